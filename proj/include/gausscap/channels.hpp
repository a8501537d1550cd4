#pragma once

// Two-mode Gaussian unitaries, their symplectic dilations, and the one-mode
// Gaussian (OMG) channels they induce on the first mode.
//
// A dilation S = [[M, N], [O, P]] acts on (system ⊕ environment) quadratures.
// With environment state V_E the induced channel is
//   V  ->  M V M^T + N V_E N^T        (effective channel,    X = M)
//   V  ->  O V O^T + P V_E P^T        (complementary channel, X = O).
//
// One-mode channel parameters: for a 2x2 block A, A Sigma A^T = det(A) Sigma,
// so the channel's transmissivity invariant is tau = det X and the quantum
// noise invariant is y = 2 sqrt(det Y); complete positivity is exactly
// y >= |1 - tau|, i.e. K = (y - |1 - tau|)/2 >= 0.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "gausscap/symplectic.hpp"

namespace gausscap {

inline constexpr double kChannelClassTol = 1e-8;  // canonical-form matching
inline constexpr double kSymplecticTol = 1e-10;   // S Sigma S^T = Sigma check

/// Symplectic dilation of a Gaussian unitary on n_a system + n_e environment
/// modes.  Validated to satisfy S Sigma S^T = Sigma on construction.
class SymplecticDilation {
 public:
  SymplecticDilation(Eigen::MatrixXd s, int n_a, int n_e)
      : s_(std::move(s)), n_a_(n_a), n_e_(n_e) {
    if (n_a_ < 1 || n_e_ < 1 || s_.rows() != 2 * (n_a_ + n_e_) || s_.cols() != s_.rows()) {
      throw std::invalid_argument("SymplecticDilation: dimension mismatch");
    }
    const Eigen::MatrixXd sigma = symplectic_form(n_a_ + n_e_);
    const double defect = (s_ * sigma * s_.transpose() - sigma).cwiseAbs().maxCoeff();
    if (defect > kSymplecticTol) {
      throw std::invalid_argument("SymplecticDilation: S Sigma S^T != Sigma, defect " +
                                  std::to_string(defect));
    }
  }

  const Eigen::MatrixXd& matrix() const { return s_; }
  int n_system() const { return n_a_; }
  int n_env() const { return n_e_; }

  Eigen::MatrixXd M() const { return s_.topLeftCorner(2 * n_a_, 2 * n_a_); }
  Eigen::MatrixXd N() const { return s_.topRightCorner(2 * n_a_, 2 * n_e_); }
  Eigen::MatrixXd O() const { return s_.bottomLeftCorner(2 * n_e_, 2 * n_a_); }
  Eigen::MatrixXd P() const { return s_.bottomRightCorner(2 * n_e_, 2 * n_e_); }

 private:
  Eigen::MatrixXd s_;
  int n_a_;
  int n_e_;
};

enum class UnitaryKind { beam_splitter, two_mode_squeezer };

/// A member of the one-parameter family of two-mode Gaussian unitaries:
/// beam splitter for 0 < q < 1, two-mode squeezer for q > 1.
struct TwoModeUnitary {
  double q;
  UnitaryKind kind;
  SymplecticDilation dilation;
};

/// Beam splitter with transmissivity q in (0, 1).
inline TwoModeUnitary beam_splitter(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("beam_splitter: q must lie strictly in (0, 1), got " +
                                std::to_string(q));
  }
  const double c = std::sqrt(q), s = std::sqrt(1.0 - q);
  Eigen::Matrix4d m;
  m << c, 0, -s, 0,
       0, c, 0, -s,
       s, 0, c, 0,
       0, s, 0, c;
  return TwoModeUnitary{q, UnitaryKind::beam_splitter, SymplecticDilation(m, 1, 1)};
}

/// Two-mode squeezer (amplifier dilation) with gain q > 1.
inline TwoModeUnitary two_mode_squeezer(double q) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("two_mode_squeezer: q must be > 1, got " +
                                std::to_string(q));
  }
  const double c = std::sqrt(q), s = std::sqrt(q - 1.0);
  Eigen::Matrix4d m;
  m << c, 0, 0, -s,
       0, c, -s, 0,
       0, -s, c, 0,
       -s, 0, 0, c;
  return TwoModeUnitary{q, UnitaryKind::two_mode_squeezer, SymplecticDilation(m, 1, 1)};
}

/// One-mode Gaussian channel V -> X V X^T + Y (plus d -> X d on means).
class OmgChannel {
 public:
  OmgChannel(Eigen::Matrix2d x, Eigen::Matrix2d y) : x_(std::move(x)), y_(std::move(y)) {
    if ((y_ - y_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
      throw std::invalid_argument("OmgChannel: Y must be symmetric");
    }
    y_ = ((y_ + y_.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(y_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kValidityTol) {
      throw std::invalid_argument("OmgChannel: Y must be positive semidefinite");
    }
  }

  const Eigen::Matrix2d& X() const { return x_; }
  const Eigen::Matrix2d& Y() const { return y_; }

  /// Transmissivity invariant tau = det X (negative for phase-conjugating
  /// channels, class D).
  double tau() const { return x_.determinant(); }

  /// sqrt(det X); defined for the non-negative-determinant classes A-C.
  double x() const { return std::sqrt(std::max(tau(), 0.0)); }

  /// Noise invariant y = 2 sqrt(det Y): equals 1-q for the beam splitter and
  /// q-1 for the amplifier, independently of the (pure) environment squeezing.
  double y_noise() const { return 2.0 * std::sqrt(std::max(y_.determinant(), 0.0)); }

  double det_y() const { return y_.determinant(); }

  /// K = (y - |1 - tau|)/2.  K >= 0 is exactly complete positivity; K = 0 are
  /// the quantum-limited channels.
  double K() const { return (y_noise() - std::abs(1.0 - tau())) / 2.0; }

  bool is_cp(double tol = kValidityTol) const { return K() >= -tol; }

 private:
  Eigen::Matrix2d x_;
  Eigen::Matrix2d y_;
};

/// Channel induced on the system mode by dilation W with environment V_E.
inline OmgChannel effective_channel(const SymplecticDilation& w, const CovarianceMatrix& v_e) {
  if (w.n_system() != 1 || w.n_env() != 1 || v_e.n_modes() != 1) {
    throw std::invalid_argument("effective_channel: expected a (1+1)-mode dilation");
  }
  const Eigen::Matrix2d x = w.M();
  const Eigen::Matrix2d y = w.N() * v_e.matrix() * w.N().transpose();
  return OmgChannel(x, y);
}

inline OmgChannel effective_channel(const TwoModeUnitary& u, const CovarianceMatrix& v_e) {
  return effective_channel(u.dilation, v_e);
}

/// Complementary channel (system mode -> environment output mode).
inline OmgChannel complementary_channel(const SymplecticDilation& w,
                                        const CovarianceMatrix& v_e) {
  if (w.n_system() != 1 || w.n_env() != 1 || v_e.n_modes() != 1) {
    throw std::invalid_argument("complementary_channel: expected a (1+1)-mode dilation");
  }
  const Eigen::Matrix2d x = w.O();
  const Eigen::Matrix2d y = w.P() * v_e.matrix() * w.P().transpose();
  return OmgChannel(x, y);
}

inline OmgChannel complementary_channel(const TwoModeUnitary& u, const CovarianceMatrix& v_e) {
  return complementary_channel(u.dilation, v_e);
}

/// Push a Gaussian state through the channel; the output CM is re-validated.
inline GaussianState apply_channel(const OmgChannel& ch, const GaussianState& st,
                                   std::optional<Eigen::Vector2d> offset = std::nullopt) {
  if (st.cm.n_modes() != 1) {
    throw std::invalid_argument("apply_channel: one-mode states only");
  }
  Eigen::VectorXd mean = ch.X() * st.mean;
  if (offset) mean += *offset;
  Eigen::Matrix2d v = ch.X() * st.cm.matrix() * ch.X().transpose() + ch.Y();
  return GaussianState(std::move(mean), CovarianceMatrix(v));
}

/// Covariance matrix of a pure squeezed environment mode:
///   V_E(s, theta) = (1/2) R(theta) diag(e^{2s}, e^{-2s}) R(theta)^T.
inline CovarianceMatrix squeezed_env_cm(double s, double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Eigen::Matrix2d d = Eigen::Vector2d(std::exp(2.0 * s), std::exp(-2.0 * s)).asDiagonal();
  return CovarianceMatrix(0.5 * (r * d * r.transpose()));
}

// ---------------------------------------------------------------------------
// Canonical classification of one-mode Gaussian channels.

enum class OmgClass { A1, A2, B1, B2, C_att, C_amp, D, unclassified };

inline const char* to_string(OmgClass c) {
  switch (c) {
    case OmgClass::A1: return "A1";
    case OmgClass::A2: return "A2";
    case OmgClass::B1: return "B1";
    case OmgClass::B2: return "B2";
    case OmgClass::C_att: return "C_att";
    case OmgClass::C_amp: return "C_amp";
    case OmgClass::D: return "D";
    case OmgClass::unclassified: return "unclassified";
  }
  return "unclassified";
}

struct OmgClassification {
  OmgClass cls = OmgClass::unclassified;
  double kappa = 0.0;  // transmissivity/gain parameter; negative for class D
  double n0 = 0.0;     // thermal occupation of the class's canonical noise
  std::string note;    // diagnostics when unclassified
};

namespace detail {

inline bool is_isotropic(const Eigen::Matrix2d& a, double tol) {
  return std::abs(a(0, 0) - a(1, 1)) <= tol && std::abs(a(0, 1)) <= tol &&
         std::abs(a(1, 0)) <= tol;
}

}  // namespace detail

/// Identify the canonical class of (X, Y) within entrywise tolerance after the
/// obvious rotation congruences.  Channels not matching any canonical form are
/// reported as `unclassified` with a diagnostic note.
inline OmgClassification classify_omg(const OmgChannel& ch, double tol = kChannelClassTol) {
  OmgClassification out;
  const Eigen::Matrix2d x = ch.X();
  const Eigen::Matrix2d y = ch.Y();
  const double tau = ch.tau();
  const double ynorm = y.cwiseAbs().maxCoeff();

  if (!ch.is_cp()) {
    out.note = "not completely positive (K = " + std::to_string(ch.K()) + ")";
    return out;
  }

  if (x.cwiseAbs().maxCoeff() <= tol) {
    out.cls = OmgClass::A1;
    return out;
  }

  if (std::abs(tau) <= tol) {
    out.cls = OmgClass::A2;
    return out;
  }

  if (std::abs(tau - 1.0) <= tol) {
    // tau = 1: the additive-noise family.  Y = 0 is the identity (degenerate
    // B2 with N0 = 0); rank-one Y is B1; isotropic Y below the 1/2 ceiling is B2.
    if (ynorm <= tol) {
      out.cls = OmgClass::B2;
      out.kappa = 1.0;
      out.n0 = 0.0;
      return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(y, Eigen::EigenvaluesOnly);
    if (std::abs(es.eigenvalues().minCoeff()) <= tol) {
      const double y1 = y.trace();
      out.cls = OmgClass::B1;
      out.kappa = 1.0;
      out.n0 = (1.0 - 2.0 * y1) / (4.0 * y1);
      return out;
    }
    if (detail::is_isotropic(y, tol)) {
      const double yv = y.trace() / 2.0;
      if (yv < 0.5 - tol) {
        out.cls = OmgClass::B2;
        out.kappa = 1.0;
        out.n0 = yv / (1.0 - 2.0 * yv);
        return out;
      }
      out.note = "tau = 1 with isotropic noise at or above the B2 ceiling y = 1/2";
      return out;
    }
    out.note = "tau = 1 but Y is neither rank-one nor isotropic";
    return out;
  }

  // Remaining classes require X^T X = |tau| I (a scaled rotation for tau > 0,
  // a scaled reflection for tau < 0) and isotropic noise.
  const Eigen::Matrix2d xtx = x.transpose() * x;
  const bool conformal = detail::is_isotropic(xtx, tol) &&
                         std::abs(xtx(0, 0) - std::abs(tau)) <= tol;
  if (!conformal) {
    out.note = "X is not a scaled (anti-)rotation; no canonical congruence applies";
    return out;
  }
  if (!detail::is_isotropic(y, tol)) {
    out.note = "anisotropic Y outside the B classes";
    return out;
  }
  const double yv = y.trace() / 2.0;

  if (tau > 0.0 && tau < 1.0) {
    out.cls = OmgClass::C_att;
    out.kappa = tau;
    out.n0 = yv / (1.0 - tau) - 0.5;
    return out;
  }
  if (tau > 1.0) {
    out.cls = OmgClass::C_amp;
    out.kappa = tau;
    out.n0 = yv / (tau - 1.0) - 0.5;
    return out;
  }
  // tau < 0: phase conjugation.
  out.cls = OmgClass::D;
  out.kappa = tau;
  out.n0 = yv / (1.0 - tau) - 0.5;
  return out;
}

/// Canonical channel for a class, inverse of classify_omg on its range.
/// kappa is ignored for A1/A2/B1/B2 (fixed by the class); n0 >= 0 sets the
/// canonical noise occupation.
inline OmgChannel canonical_omg(OmgClass cls, double kappa = 0.0, double n0 = 0.0) {
  if (n0 < 0.0) {
    throw std::invalid_argument("canonical_omg: n0 must be >= 0");
  }
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  switch (cls) {
    case OmgClass::A1:
      return OmgChannel(Eigen::Matrix2d::Zero(), 0.5 * id);
    case OmgClass::A2: {
      Eigen::Matrix2d x = Eigen::Vector2d(1.0, 0.0).asDiagonal();
      return OmgChannel(x, 0.5 * id);
    }
    case OmgClass::B1: {
      Eigen::Matrix2d y = Eigen::Vector2d(1.0 / (4.0 * n0 + 2.0), 0.0).asDiagonal();
      return OmgChannel(id, y);
    }
    case OmgClass::B2:
      return OmgChannel(id, (n0 / (2.0 * n0 + 1.0)) * id);
    case OmgClass::C_att: {
      if (!(kappa > 0.0 && kappa < 1.0)) {
        throw std::invalid_argument("canonical_omg: C_att needs 0 < kappa < 1");
      }
      return OmgChannel(std::sqrt(kappa) * id,
                        (1.0 - kappa) * (n0 + 0.5) * id);
    }
    case OmgClass::C_amp: {
      if (!(kappa > 1.0)) {
        throw std::invalid_argument("canonical_omg: C_amp needs kappa > 1");
      }
      return OmgChannel(std::sqrt(kappa) * id,
                        (kappa - 1.0) * (n0 + 0.5) * id);
    }
    case OmgClass::D: {
      if (!(kappa < 0.0)) {
        throw std::invalid_argument("canonical_omg: D needs kappa < 0");
      }
      Eigen::Matrix2d x = Eigen::Vector2d(std::sqrt(-kappa), -std::sqrt(-kappa)).asDiagonal();
      return OmgChannel(x, (1.0 - kappa) * (n0 + 0.5) * id);
    }
    case OmgClass::unclassified:
      break;
  }
  throw std::invalid_argument("canonical_omg: no canonical form for this class");
}

}  // namespace gausscap
