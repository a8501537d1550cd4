#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "gausscap/channels.hpp"
#include "gausscap/serialization.hpp"
#include "gausscap/symplectic.hpp"

using namespace gausscap;

namespace {

double symplectic_defect(const Eigen::MatrixXd& s, int n_modes) {
  const Eigen::MatrixXd sigma = symplectic_form(n_modes);
  return (s * sigma * s.transpose() - sigma).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("two-mode unitary family: symplectic and block structure") {
  SECTION("beam splitter blocks") {
    for (double q : {0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
      const TwoModeUnitary u = beam_splitter(q);
      CHECK(symplectic_defect(u.dilation.matrix(), 2) < 1e-12);
      const double c = std::sqrt(q), s = std::sqrt(1.0 - q);
      CHECK((u.dilation.M() - c * Eigen::Matrix2d::Identity()).norm() < 1e-14);
      CHECK((u.dilation.N() + s * Eigen::Matrix2d::Identity()).norm() < 1e-14);
      CHECK((u.dilation.O() - s * Eigen::Matrix2d::Identity()).norm() < 1e-14);
      CHECK((u.dilation.P() - c * Eigen::Matrix2d::Identity()).norm() < 1e-14);
    }
  }

  SECTION("two-mode squeezer blocks") {
    Eigen::Matrix2d sig_x;
    sig_x << 0, 1, 1, 0;
    for (double q : {1.01, 1.5, 2.0, 5.0, 20.0}) {
      const TwoModeUnitary u = two_mode_squeezer(q);
      CHECK(symplectic_defect(u.dilation.matrix(), 2) < 1e-12);
      const double c = std::sqrt(q), s = std::sqrt(q - 1.0);
      CHECK((u.dilation.M() - c * Eigen::Matrix2d::Identity()).norm() < 1e-14);
      CHECK((u.dilation.N() + s * sig_x).norm() < 1e-14);
      CHECK((u.dilation.O() + s * sig_x).norm() < 1e-14);
      CHECK((u.dilation.P() - c * Eigen::Matrix2d::Identity()).norm() < 1e-14);
    }
  }

  SECTION("parameter domain is enforced") {
    CHECK_THROWS_AS(beam_splitter(0.0), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter(1.0), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter(-0.3), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter(1.2), std::invalid_argument);
    CHECK_THROWS_AS(two_mode_squeezer(1.0), std::invalid_argument);
    CHECK_THROWS_AS(two_mode_squeezer(0.7), std::invalid_argument);
  }

  SECTION("non-symplectic dilation is rejected") {
    Eigen::Matrix4d bad = Eigen::Matrix4d::Identity();
    bad(0, 0) = 1.5;
    CHECK_THROWS_AS(SymplecticDilation(bad, 1, 1), std::invalid_argument);
  }
}

TEST_CASE("channel invariants tau = det X and y = 2 sqrt(det Y)") {
  // For every pure squeezed environment the induced-channel invariants depend
  // only on q: tau = q and y = |1 - q| for both branches of the family.
  const double thetas[] = {0.0, 0.4, 1.1, M_PI / 2};
  const double squeezes[] = {0.0, 0.3, 0.8, 1.5};

  SECTION("beam splitter branch") {
    for (double q : {0.2, 0.5, 0.75, 0.95}) {
      const TwoModeUnitary u = beam_splitter(q);
      for (double s : squeezes) {
        for (double th : thetas) {
          const CovarianceMatrix ve = squeezed_env_cm(s, th);
          const OmgChannel eff = effective_channel(u, ve);
          const OmgChannel comp = complementary_channel(u, ve);
          CHECK(std::abs(eff.tau() - q) < 1e-10);
          CHECK(std::abs(eff.y_noise() - (1.0 - q)) < 1e-10);
          CHECK(std::abs(comp.tau() - (1.0 - q)) < 1e-10);
          CHECK(std::abs(comp.y_noise() - q) < 1e-10);
          // Quantum-limited: pure environments sit on the CP boundary K = 0.
          CHECK(std::abs(eff.K()) < 1e-10);
          CHECK(std::abs(comp.K()) < 1e-10);
          CHECK(eff.is_cp());
          CHECK(comp.is_cp());
        }
      }
    }
  }

  SECTION("amplifier branch") {
    for (double q : {1.2, 2.0, 4.0}) {
      const TwoModeUnitary u = two_mode_squeezer(q);
      for (double s : squeezes) {
        for (double th : thetas) {
          const CovarianceMatrix ve = squeezed_env_cm(s, th);
          const OmgChannel eff = effective_channel(u, ve);
          const OmgChannel comp = complementary_channel(u, ve);
          CHECK(std::abs(eff.tau() - q) < 1e-10);
          CHECK(std::abs(eff.y_noise() - (q - 1.0)) < 1e-10);
          // Environment output: a phase conjugator with gain q - 1.
          CHECK(std::abs(comp.tau() + (q - 1.0)) < 1e-10);
          CHECK(std::abs(comp.y_noise() - q) < 1e-10);
          CHECK(std::abs(eff.K()) < 1e-10);
          CHECK(std::abs(comp.K()) < 1e-10);
        }
      }
    }
  }

  SECTION("sqrt(det X) splits unity across the two outputs") {
    for (double q : {0.1, 0.3, 0.6, 0.85}) {
      const TwoModeUnitary u = beam_splitter(q);
      const CovarianceMatrix ve = CovarianceMatrix::vacuum(1);
      const double xe = effective_channel(u, ve).x();
      const double xc = complementary_channel(u, ve).x();
      CHECK(std::abs(xe * xe + xc * xc - 1.0) < 1e-10);
    }
  }

  SECTION("thermal environment lifts K above the quantum limit") {
    const TwoModeUnitary u = beam_splitter(0.7);
    const OmgChannel ch = effective_channel(u, CovarianceMatrix::thermal(1.0, 1));
    CHECK(std::abs(ch.tau() - 0.7) < 1e-12);
    CHECK(std::abs(ch.y_noise() - 3.0 * 0.3) < 1e-10);  // (2 nbar + 1)(1 - q)
    CHECK(ch.K() > 0.0);
  }
}

TEST_CASE("apply_channel transforms means and covariances") {
  SECTION("amplifier on vacuum") {
    const TwoModeUnitary u = two_mode_squeezer(2.0);
    const OmgChannel ch = effective_channel(u, CovarianceMatrix::vacuum(1));
    const GaussianState out = apply_channel(ch, GaussianState::centered(CovarianceMatrix::vacuum(1)));
    CHECK((out.cm.matrix() - 1.5 * Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK(out.mean.norm() < 1e-15);
  }

  SECTION("beam splitter on thermal input") {
    const double q = 0.6, nbar = 2.0;
    const OmgChannel ch = effective_channel(beam_splitter(q), CovarianceMatrix::vacuum(1));
    Eigen::Vector2d mean(1.0, -0.5);
    const GaussianState out =
        apply_channel(ch, GaussianState(mean, CovarianceMatrix::thermal(nbar, 1)));
    const double expect = q * (nbar + 0.5) + (1.0 - q) * 0.5;
    CHECK((out.cm.matrix() - expect * Eigen::Matrix2d::Identity()).norm() < 1e-12);
    CHECK((out.mean - std::sqrt(q) * mean).norm() < 1e-12);
  }

  SECTION("displacement offset is added to the output mean") {
    const OmgChannel ch = effective_channel(beam_splitter(0.5), CovarianceMatrix::vacuum(1));
    Eigen::Vector2d offset(0.3, 0.7);
    const GaussianState out =
        apply_channel(ch, GaussianState::centered(CovarianceMatrix::vacuum(1)), offset);
    CHECK((out.mean - offset).norm() < 1e-15);
  }

  SECTION("channel constructor rejects invalid noise") {
    Eigen::Matrix2d asym;
    asym << 0.5, 0.2, -0.2, 0.5;
    CHECK_THROWS_AS(OmgChannel(Eigen::Matrix2d::Identity(), asym), std::invalid_argument);
    Eigen::Matrix2d neg = -0.1 * Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS(OmgChannel(Eigen::Matrix2d::Identity(), neg), std::invalid_argument);
  }
}

TEST_CASE("squeezed environment covariance") {
  SECTION("theta = 0 gives diag(e^{2s}, e^{-2s})/2") {
    const CovarianceMatrix v = squeezed_env_cm(0.4, 0.0);
    CHECK(std::abs(v.matrix()(0, 0) - 0.5 * std::exp(0.8)) < 1e-14);
    CHECK(std::abs(v.matrix()(1, 1) - 0.5 * std::exp(-0.8)) < 1e-14);
    CHECK(std::abs(v.matrix()(0, 1)) < 1e-15);
  }

  SECTION("pure for all parameters, det = 1/4") {
    for (double s : {0.0, 0.5, 1.2}) {
      for (double th : {0.0, 0.7, 2.0}) {
        const CovarianceMatrix v = squeezed_env_cm(s, th);
        CHECK(v.is_pure());
        CHECK(std::abs(v.matrix().determinant() - 0.25) < 1e-12);
      }
    }
  }

  SECTION("s = 0 reduces to vacuum for any angle") {
    const CovarianceMatrix v = squeezed_env_cm(0.0, 1.3);
    CHECK((v.matrix() - 0.5 * Eigen::Matrix2d::Identity()).norm() < 1e-14);
  }
}

TEST_CASE("one-mode channel classification") {
  SECTION("canonical examples") {
    const OmgChannel att(std::sqrt(0.7) * Eigen::Matrix2d::Identity(),
                         0.15 * Eigen::Matrix2d::Identity());
    const OmgClassification c_att = classify_omg(att);
    CHECK(c_att.cls == OmgClass::C_att);
    CHECK(std::abs(c_att.kappa - 0.7) < 1e-12);
    CHECK(std::abs(c_att.n0 - 0.0) < 1e-12);

    const OmgChannel erase(Eigen::Matrix2d::Zero(), 0.5 * Eigen::Matrix2d::Identity());
    CHECK(classify_omg(erase).cls == OmgClass::A1);

    const OmgChannel ident(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Zero());
    const OmgClassification c_id = classify_omg(ident);
    CHECK(c_id.cls == OmgClass::B2);
    CHECK(std::abs(c_id.n0) < 1e-12);
  }

  SECTION("induced channels land in the expected classes") {
    for (double q : {0.3, 0.6, 0.9}) {
      const CovarianceMatrix vac = CovarianceMatrix::vacuum(1);
      const OmgClassification eff = classify_omg(effective_channel(beam_splitter(q), vac));
      CHECK(eff.cls == OmgClass::C_att);
      CHECK(std::abs(eff.kappa - q) < 1e-10);
      CHECK(std::abs(eff.n0) < 1e-9);
      const OmgClassification comp = classify_omg(complementary_channel(beam_splitter(q), vac));
      CHECK(comp.cls == OmgClass::C_att);
      CHECK(std::abs(comp.kappa - (1.0 - q)) < 1e-10);
    }
    for (double q : {1.5, 2.0, 4.0}) {
      const CovarianceMatrix vac = CovarianceMatrix::vacuum(1);
      const OmgClassification eff = classify_omg(effective_channel(two_mode_squeezer(q), vac));
      CHECK(eff.cls == OmgClass::C_amp);
      CHECK(std::abs(eff.kappa - q) < 1e-10);
      const OmgClassification comp =
          classify_omg(complementary_channel(two_mode_squeezer(q), vac));
      CHECK(comp.cls == OmgClass::D);
      CHECK(std::abs(comp.kappa + (q - 1.0)) < 1e-10);
      CHECK(std::abs(comp.n0) < 1e-9);
    }
  }

  SECTION("classify is a left inverse of canonical_omg") {
    struct Case {
      OmgClass cls;
      double kappa;
      double n0;
    };
    const Case cases[] = {
        {OmgClass::A1, 0.0, 0.0},     {OmgClass::A2, 0.0, 0.0},
        {OmgClass::B1, 1.0, 0.5},     {OmgClass::B1, 1.0, 2.0},
        {OmgClass::B2, 1.0, 0.25},    {OmgClass::B2, 1.0, 3.0},
        {OmgClass::C_att, 0.3, 0.0},  {OmgClass::C_att, 0.8, 1.5},
        {OmgClass::C_amp, 1.7, 0.0},  {OmgClass::C_amp, 3.0, 0.8},
        {OmgClass::D, -0.5, 0.0},     {OmgClass::D, -2.0, 1.2},
    };
    for (const Case& c : cases) {
      const OmgChannel ch = canonical_omg(c.cls, c.kappa, c.n0);
      CHECK(ch.is_cp());
      const OmgClassification back = classify_omg(ch);
      CHECK(back.cls == c.cls);
      if (c.cls == OmgClass::C_att || c.cls == OmgClass::C_amp || c.cls == OmgClass::D) {
        CHECK(std::abs(back.kappa - c.kappa) < 1e-10);
      }
      if (c.cls != OmgClass::A1 && c.cls != OmgClass::A2) {
        CHECK(std::abs(back.n0 - c.n0) < 1e-10);
      }
    }
  }

  SECTION("rotated attenuator still classifies (conformal X)") {
    const double kappa = 0.4, phi = 0.9;
    Eigen::Matrix2d rot;
    rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
    const OmgChannel ch(std::sqrt(kappa) * rot, 0.3 * Eigen::Matrix2d::Identity());
    const OmgClassification c = classify_omg(ch);
    CHECK(c.cls == OmgClass::C_att);
    CHECK(std::abs(c.kappa - kappa) < 1e-12);
    CHECK(std::abs(c.n0 - (0.3 / 0.6 - 0.5)) < 1e-12);
  }

  SECTION("non-canonical shapes are reported, not misfiled") {
    Eigen::Matrix2d stretch = Eigen::Vector2d(2.0, 0.5).asDiagonal();  // det = 1, not conformal
    Eigen::Matrix2d y = Eigen::Vector2d(0.4, 0.1).asDiagonal();
    const OmgClassification c = classify_omg(OmgChannel(stretch, y));
    CHECK(c.cls == OmgClass::unclassified);
    CHECK_FALSE(c.note.empty());

    // A squeezed environment leaves the invariants intact but takes Y out of
    // canonical (isotropic) shape, so strict form-matching declines to label it.
    const OmgClassification sq =
        classify_omg(effective_channel(two_mode_squeezer(2.5), squeezed_env_cm(0.3, 0.0)));
    CHECK(sq.cls == OmgClass::unclassified);
    CHECK_FALSE(sq.note.empty());

    // Not completely positive: attenuator with too little noise.
    const OmgClassification bad =
        classify_omg(OmgChannel(std::sqrt(0.5) * Eigen::Matrix2d::Identity(),
                                0.05 * Eigen::Matrix2d::Identity()));
    CHECK(bad.cls == OmgClass::unclassified);
    CHECK(bad.note.find("positive") != std::string::npos);

    CHECK_THROWS_AS(canonical_omg(OmgClass::unclassified), std::invalid_argument);
    CHECK_THROWS_AS(canonical_omg(OmgClass::C_att, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(canonical_omg(OmgClass::D, 0.5), std::invalid_argument);
  }
}

TEST_CASE("serialization round-trips") {
  SECTION("dilation") {
    const TwoModeUnitary u = beam_splitter(0.37);
    const json j = to_json(u);
    const TwoModeUnitary back = unitary_from_json(j);
    CHECK((back.dilation.matrix() - u.dilation.matrix()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(back.q == u.q);
    CHECK(back.kind == u.kind);
  }

  SECTION("channel with classification metadata") {
    const OmgChannel ch = effective_channel(two_mode_squeezer(2.5), CovarianceMatrix::vacuum(1));
    const json j = to_json(ch);
    CHECK(j.at("class").get<std::string>() == "C_amp");
    CHECK(std::abs(j.at("tau").get<double>() - 2.5) < 1e-10);
    const OmgChannel back = channel_from_json(j);
    CHECK((back.X() - ch.X()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((back.Y() - ch.Y()).cwiseAbs().maxCoeff() < 1e-15);
  }

  SECTION("malformed records are rejected") {
    json j = matrix_to_json(Eigen::Matrix2d::Identity());
    j["data"] = std::vector<double>{1.0, 2.0};  // wrong length
    CHECK_THROWS_AS(matrix_from_json(j), std::invalid_argument);
    CHECK_THROWS_AS(unitary_from_json(json{{"kind", "mystery"}}), std::invalid_argument);
    CHECK_THROWS_AS(unitary_from_json(json{{"q", 0.5}}), json::exception);
  }
}
