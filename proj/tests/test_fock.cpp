// Tests for the truncated Fock-space oracle: exact block unitaries, channel
// action with trace accounting, closed-form output spectra, and the
// Gaussian-vs-Fock entropy cross-check.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "gausscap/fock.hpp"

using namespace gausscap;
using Catch::Approx;
using cplx = std::complex<double>;

namespace {

/// Largest |entry| difference between two vectors after aligning the global
/// phase at the largest reference entry.
double phase_aligned_gap(const Eigen::VectorXcd& got,
                         const Eigen::VectorXcd& want) {
  REQUIRE(got.size() == want.size());
  Eigen::Index pivot = 0;
  want.cwiseAbs().maxCoeff(&pivot);
  REQUIRE(std::abs(want(pivot)) > 0.0);
  const cplx phase = got(pivot) / want(pivot);
  REQUIRE(std::abs(std::abs(phase) - 1.0) < 1e-9);
  return (got - phase * want).cwiseAbs().maxCoeff();
}

/// Column of the block unitary applied to |a, b>.
Eigen::VectorXcd apply_to_basis(const BlockDiagonalUnitary& u, int a, int b) {
  const int d = u.cutoff();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
  v(a * d + b) = 1.0;
  return u.apply(v);
}

}  // namespace

TEST_CASE("ladder operators on the truncated space", "[fock]") {
  const int d = 7;
  const auto [a, adag] = ladder_ops(d);

  // Number operator diag(0..d-1).
  const Eigen::MatrixXcd num = adag * a;
  for (int n = 0; n < d; ++n) {
    CHECK(std::abs(num(n, n) - cplx(n, 0)) < 1e-14);
  }

  // Canonical commutator holds strictly below the cutoff edge.
  const Eigen::MatrixXcd comm = a * adag - adag * a;
  for (int n = 0; n + 1 < d; ++n) {
    CHECK(std::abs(comm(n, n) - cplx(1, 0)) < 1e-14);
  }

  CHECK_THROWS_AS(ladder_ops(1), std::invalid_argument);
  CHECK_THROWS_AS(fock_state(7, 7), std::invalid_argument);
}

TEST_CASE("beam splitter blocks are exactly unitary below the cutoff",
          "[fock]") {
  const int d = 24;
  for (double q : {0.3, 0.6, 0.75}) {
    const BlockDiagonalUnitary u = beam_splitter_unitary_fock(q, d);
    int complete_blocks = 0;
    for (const UnitaryBlock& blk : u.blocks()) {
      if (!blk.complete) continue;
      ++complete_blocks;
      const int w = static_cast<int>(blk.indices.size());
      const double defect =
          (blk.u.adjoint() * blk.u - Eigen::MatrixXcd::Identity(w, w))
              .cwiseAbs()
              .maxCoeff();
      CHECK(defect <= 1e-12);
    }
    CHECK(complete_blocks == d);  // one per conserved total 0..d-1
    CHECK(u.certified_total() == d - 1);
  }

  CHECK_THROWS_AS(beam_splitter_unitary_fock(0.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(beam_splitter_unitary_fock(1.0, 8), std::invalid_argument);
}

TEST_CASE("beam splitter action on |n,1> matches the closed-form expansion",
          "[fock]") {
  const int d = 16;
  for (double q : {0.35, 0.6, 0.8}) {
    const BlockDiagonalUnitary u = beam_splitter_unitary_fock(q, d);

    // |0,1> -> -(sqrt(1-q)|1,0> + sqrt(q)|0,1>) up to a global sign.
    {
      Eigen::VectorXcd want = Eigen::VectorXcd::Zero(d * d);
      want(1 * d + 0) = -std::sqrt(1.0 - q);
      want(0 * d + 1) = -std::sqrt(q);
      CHECK(phase_aligned_gap(apply_to_basis(u, 0, 1), want) <= 1e-12);
    }

    // General column: amplitude at |n+1-l, l> is
    //   -(1/sqrt((n+1)(1-q))) (-1)^l sqrt(C(n+1,l)) (1-q)^{l/2} q^{(n-l)/2}
    //     * ((n+1)(1-q) - l).
    for (int n = 1; n <= 10; ++n) {
      Eigen::VectorXcd want = Eigen::VectorXcd::Zero(d * d);
      const double norm = (n + 1.0) * (1.0 - q);
      for (int l = 0; l <= n + 1; ++l) {
        double binom = 1.0;
        for (int i = 1; i <= l; ++i) binom *= (n + 2.0 - i) / i;
        const double amp = -(1.0 / std::sqrt(norm)) * ((l % 2 == 0) ? 1.0 : -1.0) *
                           std::sqrt(binom) * std::pow(1.0 - q, l / 2.0) *
                           std::pow(q, (n - l) / 2.0) * (norm - l);
        want((n + 1 - l) * d + l) = amp;
      }
      CHECK(phase_aligned_gap(apply_to_basis(u, n, 1), want) <= 1e-12);
    }
  }
}

TEST_CASE("bs_output_spectrum normalizes and matches the unitary columns",
          "[fock]") {
  // Normalization across a broad grid.
  for (double q : {0.1, 0.35, 0.5, 0.62, 0.8, 0.95}) {
    for (int n = 0; n <= 40; ++n) {
      const std::vector<double> p = bs_output_spectrum(q, n);
      REQUIRE(p.size() == static_cast<std::size_t>(n) + 2);
      double sum = 0.0;
      for (double w : p) {
        CHECK(w >= -1e-15);
        sum += w;
      }
      CHECK(sum == Approx(1.0).margin(1e-12));
    }
  }

  // Squared amplitudes of the dense unitary columns reproduce the spectrum.
  const int d = 13;
  for (double q : {0.35, 0.6, 0.8}) {
    const BlockDiagonalUnitary u = beam_splitter_unitary_fock(q, d);
    for (int n = 0; n <= 10; ++n) {
      const Eigen::VectorXcd col = apply_to_basis(u, n, 1);
      const std::vector<double> p = bs_output_spectrum(q, n);
      for (int l = 0; l <= n + 1; ++l) {
        const double got = std::norm(col((n + 1 - l) * d + l));
        CHECK(std::abs(got - p[static_cast<std::size_t>(l)]) <= 1e-12);
      }
    }
  }

  CHECK_THROWS_AS(bs_output_spectrum(1.2, 3), std::invalid_argument);
  CHECK_THROWS_AS(bs_output_spectrum(0.5, -1), std::invalid_argument);
}

TEST_CASE("channel pair on number states reproduces the spectra", "[fock]") {
  const int d = 20;
  const double q = 0.65;
  const BlockDiagonalUnitary u = beam_splitter_unitary_fock(q, d);
  const Eigen::MatrixXcd env =
      fock_state(1, d) * fock_state(1, d).adjoint();

  for (int n = 0; n <= 8; ++n) {
    const Eigen::MatrixXcd rho =
        fock_state(n, d) * fock_state(n, d).adjoint();
    const ChannelPairResult pair = channel_pair_on_state(u, rho, env);
    CHECK(std::abs(pair.deficit_b) <= 1e-12);
    CHECK(std::abs(pair.deficit_f) <= 1e-12);

    const std::vector<double> p = bs_output_spectrum(q, n);
    for (int l = 0; l <= n + 1; ++l) {
      CHECK(std::abs(pair.rho_b(n + 1 - l, n + 1 - l).real() -
                     p[static_cast<std::size_t>(l)]) <= 1e-12);
      CHECK(std::abs(pair.rho_f(l, l).real() - p[static_cast<std::size_t>(l)]) <=
            1e-12);
    }
    // Both outputs are diagonal for number-state inputs.
    Eigen::MatrixXcd offdiag_b = pair.rho_b;
    offdiag_b.diagonal().setZero();
    CHECK(offdiag_b.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("block application agrees with the dense matrix", "[fock]") {
  const int d = 12;
  const BlockDiagonalUnitary u = beam_splitter_unitary_fock(0.55, d);
  const FockOperator dense = u.to_dense();

  Eigen::VectorXcd v(d * d);
  for (int i = 0; i < d * d; ++i) {
    v(i) = cplx(std::sin(0.1 * i + 0.3), std::cos(0.2 * i));
  }
  const Eigen::VectorXcd via_blocks = u.apply(v);
  const Eigen::VectorXcd via_dense = dense.matrix * v;
  CHECK((via_blocks - via_dense).cwiseAbs().maxCoeff() <= 1e-13);

  // Dense channel-pair overload agrees with the block route.
  const Eigen::MatrixXcd rho_a = thermal_state_fock(0.3, d);
  const Eigen::MatrixXcd eta = fock_state(0, d) * fock_state(0, d).adjoint();
  const ChannelPairResult via_b = channel_pair_on_state(u, rho_a, eta);
  const ChannelPairResult via_d = channel_pair_on_state(dense, rho_a, eta);
  CHECK((via_b.rho_b - via_d.rho_b).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((via_b.rho_f - via_d.rho_f).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("squeezer matches its direct-exponential oracle", "[fock]") {
  const int window = 15;
  for (double q : {1.3, 2.0, 3.5}) {
    // Higher gain pumps states further above the cutoff, so the cutoff that
    // can still certify the vacuum column grows with q.
    const int d = (q > 3.0) ? 60 : 30;
    const BlockDiagonalUnitary u = squeezer_unitary_fock(q, d);
    CHECK(u.certified_total() >= 0);

    // <00|U|00> = q^{-1/2}.
    const Eigen::VectorXcd col00 = apply_to_basis(u, 0, 0);
    CHECK(std::abs(col00(0) - cplx(1.0 / std::sqrt(q), 0.0)) <= 1e-13);

    // Difference-block windows vs the buffered direct exponential, on input
    // columns with total photon number <= d/2.
    for (int diff : {0, 1, 4}) {
      const Eigen::MatrixXcd direct =
          squeezer_block_direct(q, diff, window, 80);
      // Locate the block for this difference (positive branch).
      for (const UnitaryBlock& blk : u.blocks()) {
        const int a0 = blk.indices.front() / d;
        const int b0 = blk.indices.front() % d;
        if (a0 - b0 != diff) continue;
        for (int n = 0; n < window; ++n) {
          if (2 * n + diff > d / 2) break;
          for (int m = 0; m < window; ++m) {
            CHECK(std::abs(blk.u(m, n) - direct(m, n)) <= 1e-8);
          }
        }
      }
    }
  }

  CHECK_THROWS_AS(squeezer_unitary_fock(0.9, 20), std::invalid_argument);
  // A cutoff far too small for strong squeezing is reported, not silently
  // accepted.
  CHECK_THROWS_AS(squeezer_unitary_fock(50.0, 10), FockCutoffError);
}

TEST_CASE("squeezer action on |m,1> matches the closed-form expansion",
          "[fock]") {
  const int d = 50;
  for (double q : {1.3, 2.0, 3.0}) {
    const BlockDiagonalUnitary u = squeezer_unitary_fock(q, d);
    const double s = 0.5 * std::log(q);
    const cplx r(0.0, std::sqrt((q - 1.0) / q));

    for (int m : {1, 2, 3}) {
      const Eigen::VectorXcd col = u.apply([&] {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d * d);
        v(m * d + 1) = 1.0;
        return v;
      }());

      // Downward piece: sqrt(m) r e^{-ms} |m-1, 0>.
      const cplx down = std::sqrt(static_cast<double>(m)) * r * std::exp(-m * s);
      CHECK(std::abs(col((m - 1) * d + 0) - down) <= 1e-12);

      // Upward ladder: coefficient of |n+m, n+1> is
      //   (e^{-(m+2)s} sqrt(n+1) sqrt(C(n+m,m))
      //    + sqrt(m) r^2 e^{-ms} sqrt(C(n+m,m-1))) r^n.
      for (int n = 0; n <= 15; ++n) {
        if (n + m >= d || n + 1 >= d) break;
        double c_nm = 1.0, c_nm1 = 1.0;
        for (int i = 1; i <= m; ++i) c_nm *= (n + i) / static_cast<double>(i);
        for (int i = 1; i <= m - 1; ++i) {
          c_nm1 *= (n + 1 + i) / static_cast<double>(i);
        }
        const cplx want = (std::exp(-(m + 2) * s) * std::sqrt(n + 1.0) *
                               std::sqrt(c_nm) +
                           std::sqrt(static_cast<double>(m)) * r * r *
                               std::exp(-m * s) * std::sqrt(c_nm1)) *
                          std::pow(r, n);
        CHECK(std::abs(col((n + m) * d + (n + 1)) - want) <= 1e-12);
      }
    }
  }
}

TEST_CASE("c_mn zeros, normalization, and certified amplifier spectra",
          "[fock]") {
  // Designed zero at n = m(q-1)-1 when integral.
  CHECK(c_mn(2.0, 3, 2) == Approx(0.0).margin(1e-18));
  CHECK(c_mn(3.0, 1, 1) == Approx(0.0).margin(1e-18));
  CHECK(c_mn(2.0, 3, 1) > 0.0);
  CHECK_THROWS_AS(c_mn(0.8, 1, 1), std::invalid_argument);

  // atom + sum of the certified tail accounts for all the mass.
  for (double q : {1.2, 1.5, 2.0, 4.0}) {
    for (int m : {0, 1, 2, 3, 5}) {
      const AmpSpectra sp = amp_channel_spectra(q, m, 1e-13);
      double sum = sp.atom;
      for (double w : sp.tail) sum += w;
      CHECK(sum == Approx(1.0).margin(1e-12 + sp.tail_bound));
      CHECK(sp.tail_bound < 1e-12);
      CHECK(sp.atom == Approx(m * (q - 1.0) / std::pow(q, m + 1)).epsilon(1e-14));
    }
  }

  // Channel-pair diagonals at a large cutoff reproduce the closed forms.
  // The spectra describe |m> meeting a single environment photon, so the
  // environment input is |1><1| (total photon number up to 4 must certify).
  const int d = 80;
  for (double q : {1.5, 2.0}) {
    const BlockDiagonalUnitary u = squeezer_unitary_fock(q, d, 4);
    const Eigen::MatrixXcd env = fock_state(1, d) * fock_state(1, d).adjoint();
    for (int m = 0; m <= 3; ++m) {
      const Eigen::MatrixXcd rho =
          fock_state(m, d) * fock_state(m, d).adjoint();
      const ChannelPairResult pair = channel_pair_on_state(u, rho, env);
      const AmpSpectra sp = amp_channel_spectra(q, m);
      const std::vector<double> want_b = sp.dense_system(d);
      const std::vector<double> want_f = sp.dense_environment(d);
      for (int i = 0; i < d; ++i) {
        CHECK(std::abs(pair.rho_b(i, i).real() -
                       want_b[static_cast<std::size_t>(i)]) <= 1e-8);
        CHECK(std::abs(pair.rho_f(i, i).real() -
                       want_f[static_cast<std::size_t>(i)]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("state constructors match their Gaussian moments", "[fock]") {
  // Thermal entropy vs the Gaussian closed form (tail-limited agreement).
  CHECK(std::abs(entropy_fock(thermal_state_fock(3.0, 60)) - g_entropy(3.5)) <=
        1e-6);
  CHECK(std::abs(entropy_fock(thermal_state_fock(0.0, 20)) - 0.0) <= 1e-14);

  // Squeezed vacuum: quadrature covariance matches squeezed_env_cm.
  const int d = 80;
  const auto [a, adag] = ladder_ops(d);
  const Eigen::MatrixXcd qop = (a + adag) / std::sqrt(2.0);
  const Eigen::MatrixXcd pop = (a - adag) / cplx(0.0, std::sqrt(2.0));
  for (double s : {0.0, 0.4, 0.9}) {
    for (double theta : {0.0, 0.7, 1.5707963267948966}) {
      const Eigen::VectorXcd psi = squeezed_vacuum_fock(s, theta, d);
      CHECK(std::abs(psi.squaredNorm() - 1.0) <= 1e-9);
      const Eigen::MatrixXcd rho = psi * psi.adjoint();
      const Eigen::MatrixXcd ops[2] = {qop, pop};
      Eigen::Matrix2d v_fock;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          v_fock(i, j) =
              0.5 * (rho * (ops[i] * ops[j] + ops[j] * ops[i])).trace().real();
        }
      }
      const Eigen::Matrix2d v_want = squeezed_env_cm(s, theta).matrix();
      CHECK((v_fock - v_want).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("Gaussian and Fock entropies agree on the cross-check grid",
          "[fock][crosscheck]") {
  for (double q : {0.6, 0.75}) {
    for (double nbar : {0.0, 1.0, 3.0}) {
      for (double s : {0.0, 0.4}) {
        const CrosscheckRow row = gaussian_fock_crosscheck(q, nbar, s, 60);
        INFO("q=" << q << " nbar=" << nbar << " s=" << s
                  << " gap=" << row.worst_gap());
        CHECK(row.worst_gap() <= 1e-6);
      }
    }
  }

  // Vacuum everywhere: both outputs pure, entropies exactly zero.
  const CrosscheckRow vac = gaussian_fock_crosscheck(0.7, 0.0, 0.0, 30);
  CHECK(std::abs(vac.s_b_fock) <= 1e-10);
  CHECK(std::abs(vac.s_f_fock) <= 1e-10);
  CHECK(std::abs(vac.s_b_gaussian) <= 1e-10);

  // A cutoff far below the input's support is a hard, reported failure.
  const BlockDiagonalUnitary u8 = beam_splitter_unitary_fock(0.6, 8);
  const Eigen::MatrixXcd rho8 = thermal_state_fock(3.0, 8);
  const Eigen::MatrixXcd vac8 =
      fock_state(0, 8) * fock_state(0, 8).adjoint();
  CHECK_THROWS_AS(channel_pair_on_state(u8, rho8, vac8), FockCutoffError);
}

TEST_CASE("entropy_fock validates its input", "[fock]") {
  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(3, 3);
  bad(0, 1) = 1.0;  // not Hermitian
  CHECK_THROWS_AS(entropy_fock(bad), std::invalid_argument);

  Eigen::MatrixXcd neg = Eigen::MatrixXcd::Identity(2, 2);
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(entropy_fock(neg), std::invalid_argument);

  // Mixed two-level state: -sum p ln p.
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 0.25;
  rho(1, 1) = 0.75;
  CHECK(entropy_fock(rho) ==
        Approx(-0.25 * std::log(0.25) - 0.75 * std::log(0.75)).epsilon(1e-14));
}
