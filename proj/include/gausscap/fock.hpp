#pragma once

// Truncated Fock-space oracle for two-mode passive/active Gaussian unitaries.
//
// The point of this header is cross-validation: everything the Gaussian
// toolbox (channels.hpp, capacities.hpp) computes through covariance
// matrices can be recomputed here by brute force on a truncated
// number basis and compared.  The two routes share no code paths, so
// agreement is strong evidence both are right.
//
// Design notes:
//   * Two-mode states live on a D x D product space indexed A-major:
//     |a, b> -> a * D + b.
//   * Beam splitters conserve total photon number T = a + b, two-mode
//     squeezers conserve the difference d = a - b.  Both unitaries are
//     therefore stored block-by-block (BlockDiagonalUnitary) instead of
//     as one dense D^2 x D^2 matrix; blocks that fit entirely below the
//     cutoff are exact, blocks that stick out carry the truncation loss
//     and show up as a trace deficit downstream.
//   * Output spectra of number states have closed forms (bs_output_spectrum,
//     c_mn); these are the independent oracles used by the degradability
//     module, so they are implemented from the formulas, never by applying
//     the matrices above.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gausscap/channels.hpp"
#include "gausscap/symplectic.hpp"

namespace gausscap {

/// Thrown when a requested computation cannot meet its accuracy demand at
/// the given photon-number cutoff (instead of returning silently degraded
/// numbers).
class FockCutoffError : public std::runtime_error {
 public:
  FockCutoffError(const std::string& what, double deficit)
      : std::runtime_error(what), deficit_(deficit) {}

  /// Mass (trace or norm) lost to truncation that triggered the error.
  double deficit() const { return deficit_; }

 private:
  double deficit_ = 0.0;
};

/// A finite number basis {|0>, ..., |cutoff-1>} per mode.
struct TruncatedFockSpace {
  int cutoff = 0;   // states per mode, >= 2
  int n_modes = 1;  // 1 or 2

  TruncatedFockSpace(int cutoff_in, int n_modes_in)
      : cutoff(cutoff_in), n_modes(n_modes_in) {
    if (cutoff < 2) {
      throw std::invalid_argument("TruncatedFockSpace: cutoff must be >= 2");
    }
    if (n_modes != 1 && n_modes != 2) {
      throw std::invalid_argument(
          "TruncatedFockSpace: only 1- and 2-mode spaces are supported");
    }
  }

  /// Total Hilbert-space dimension, cutoff^n_modes.
  int dim() const {
    int d = 1;
    for (int m = 0; m < n_modes; ++m) d *= cutoff;
    return d;
  }

  /// A-major index of |a, b> on a two-mode space.
  int index(int a, int b) const {
    if (n_modes != 2) {
      throw std::logic_error("TruncatedFockSpace::index: two-mode only");
    }
    return a * cutoff + b;
  }
};

/// A dense operator together with the space it acts on.
struct FockOperator {
  TruncatedFockSpace space;
  Eigen::MatrixXcd matrix;

  FockOperator(TruncatedFockSpace space_in, Eigen::MatrixXcd matrix_in)
      : space(space_in), matrix(std::move(matrix_in)) {
    if (matrix.rows() != space.dim() || matrix.cols() != space.dim()) {
      throw std::invalid_argument(
          "FockOperator: matrix shape does not match space dimension");
    }
  }
};

/// Annihilation and creation matrices on a single-mode cutoff space:
/// a|n> = sqrt(n)|n-1>,  a_dag = a^T.  The pair is exact below the cutoff;
/// the canonical commutator [a, a_dag] = 1 holds on |n> with n <= cutoff-2.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> ladder_ops(int cutoff) {
  if (cutoff < 2) {
    throw std::invalid_argument("ladder_ops: cutoff must be >= 2");
  }
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  for (int n = 1; n < cutoff; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return {a, a.adjoint()};
}

/// Basis vector |n> on a cutoff-dimensional single-mode space.
inline Eigen::VectorXcd fock_state(int n, int cutoff) {
  if (n < 0 || n >= cutoff) {
    throw std::invalid_argument("fock_state: n outside [0, cutoff)");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff);
  v(n) = 1.0;
  return v;
}

/// Truncated thermal state diag((nbar/(nbar+1))^n / (nbar+1)).  The weights
/// are the exact infinite-space ones, so trace(rho) = 1 - (nbar/(nbar+1))^D;
/// the missing tail is the caller's lookout (channel_pair_on_state reports
/// it).
inline Eigen::MatrixXcd thermal_state_fock(double nbar, int cutoff) {
  if (nbar < 0.0) {
    throw std::invalid_argument("thermal_state_fock: nbar must be >= 0");
  }
  if (cutoff < 2) {
    throw std::invalid_argument("thermal_state_fock: cutoff must be >= 2");
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  if (nbar == 0.0) {
    rho(0, 0) = 1.0;
    return rho;
  }
  const double ratio = nbar / (nbar + 1.0);
  double w = 1.0 / (nbar + 1.0);
  for (int n = 0; n < cutoff; ++n) {
    rho(n, n) = w;
    w *= ratio;
  }
  return rho;
}

/// Squeezed vacuum |s, theta> as a number-basis vector.  Conventions are
/// pinned to squeezed_env_cm: the covariance matrix of the returned state is
/// (1/2) R(theta) diag(e^{2s}, e^{-2s}) R(theta)^T, which the unit tests
/// verify moment-by-moment.  Amplitudes occupy even levels only,
///   c_{2n} = (e^{2 i theta} tanh s)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh s)
/// (the + sign puts the *stretched* quadrature on q at theta = 0), computed
/// by the stable ratio recurrence c_{2(n+1)} = c_{2n} * z * sqrt((2n+1)/(2n+2)).
inline Eigen::VectorXcd squeezed_vacuum_fock(double s, double theta,
                                             int cutoff) {
  if (cutoff < 2) {
    throw std::invalid_argument("squeezed_vacuum_fock: cutoff must be >= 2");
  }
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cutoff);
  const std::complex<double> z =
      std::exp(std::complex<double>(0.0, 2.0 * theta)) * std::tanh(s);
  std::complex<double> c = 1.0 / std::sqrt(std::cosh(s));
  for (int n = 0; 2 * n < cutoff; ++n) {
    v(2 * n) = c;
    c *= z * std::sqrt((2.0 * n + 1.0) / (2.0 * n + 2.0));
  }
  return v;
}

/// Von Neumann entropy (nats) of a density matrix via its spectrum.
/// Eigenvalues in [-1e-12, 0] are clipped to zero; anything more negative is
/// rejected as unphysical.  The input is not renormalized: a trace deficit
/// simply contributes nothing, which is the right behaviour for truncated
/// states whose missing tail carries its own (reported) mass.
inline double entropy_fock(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument("entropy_fock: matrix must be square");
  }
  Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  if ((rho - herm).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("entropy_fock: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < -1e-12) {
      throw std::invalid_argument(
          "entropy_fock: matrix has a negative eigenvalue beyond tolerance");
    }
    if (lam > 0.0) s -= lam * std::log(lam);
  }
  return s;
}

namespace detail {

/// ln(n!) table, exact accumulation of std::log to keep neighbouring entries
/// consistent.
inline std::vector<double> log_factorials(int n_max) {
  std::vector<double> lf(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    lf[static_cast<std::size_t>(n)] =
        lf[static_cast<std::size_t>(n) - 1] + std::log(static_cast<double>(n));
  }
  return lf;
}

}  // namespace detail

/// One conserved-charge block of a two-mode unitary: the rows/columns of the
/// full operator restricted to `indices` (global A-major positions).  When
/// `complete` is true the infinite-space block lies entirely below the
/// cutoff and `u` is exactly unitary; otherwise `u` is the in-space corner
/// of a larger (or infinite) unitary block and is strictly contractive.
struct UnitaryBlock {
  std::vector<int> indices;
  Eigen::MatrixXcd u;
  bool complete = false;
};

/// Block-diagonal storage for beam-splitter / two-mode-squeezer unitaries on
/// a D x D product space.  Blocks partition the product basis, so applying
/// the operator is a gather-multiply-scatter per block; this stays exact
/// where the dense route would already have truncated.
class BlockDiagonalUnitary {
 public:
  BlockDiagonalUnitary(int cutoff, UnitaryKind kind, double q,
                       std::vector<UnitaryBlock> blocks)
      : cutoff_(cutoff), kind_(kind), q_(q), blocks_(std::move(blocks)) {
    compute_certified_total();
  }

  int cutoff() const { return cutoff_; }
  UnitaryKind kind() const { return kind_; }
  double q() const { return q_; }
  const std::vector<UnitaryBlock>& blocks() const { return blocks_; }

  /// Largest total photon number T such that *every* basis state with total
  /// <= T keeps its norm under apply() to within 1e-8 (-1 if not even the
  /// vacuum does).  For the beam splitter this is cutoff-1 (blocks conserve
  /// the total and are exact below the cutoff); for the squeezer it shrinks
  /// as the gain grows, because amplified states spill above any cutoff.
  int certified_total() const { return certified_total_; }

  /// Apply to a two-mode vector (dimension cutoff^2, A-major indexing).
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    const int dim = cutoff_ * cutoff_;
    if (v.size() != dim) {
      throw std::invalid_argument(
          "BlockDiagonalUnitary::apply: vector has wrong dimension");
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    Eigen::VectorXcd sub;
    for (const UnitaryBlock& blk : blocks_) {
      const int w = static_cast<int>(blk.indices.size());
      sub.resize(w);
      for (int i = 0; i < w; ++i) sub(i) = v(blk.indices[static_cast<std::size_t>(i)]);
      Eigen::VectorXcd mapped = blk.u * sub;
      for (int i = 0; i < w; ++i) out(blk.indices[static_cast<std::size_t>(i)]) = mapped(i);
    }
    return out;
  }

  /// Assemble the dense cutoff^2 x cutoff^2 matrix.  Guarded to modest
  /// cutoffs: the dense form is only ever needed for small cross-checks.
  FockOperator to_dense() const {
    if (cutoff_ > 64) {
      throw std::invalid_argument(
          "BlockDiagonalUnitary::to_dense: cutoff > 64 would allocate an "
          "unreasonably large dense matrix; use apply() instead");
    }
    const int dim = cutoff_ * cutoff_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (const UnitaryBlock& blk : blocks_) {
      const int w = static_cast<int>(blk.indices.size());
      for (int i = 0; i < w; ++i) {
        for (int j = 0; j < w; ++j) {
          m(blk.indices[static_cast<std::size_t>(i)],
            blk.indices[static_cast<std::size_t>(j)]) = blk.u(i, j);
        }
      }
    }
    return FockOperator(TruncatedFockSpace(cutoff_, 2), std::move(m));
  }

  /// Worst per-column isometry defect max_j | (U^dag U - I)_{jj} | over
  /// columns whose basis state has total photon number <= total_max.
  /// Complete blocks contribute nothing beyond eigensolver roundoff.
  double isometry_defect(int total_max) const {
    double worst = 0.0;
    for (const UnitaryBlock& blk : blocks_) {
      const int w = static_cast<int>(blk.indices.size());
      for (int j = 0; j < w; ++j) {
        const int idx = blk.indices[static_cast<std::size_t>(j)];
        const int total = idx / cutoff_ + idx % cutoff_;
        if (total > total_max) continue;
        const double defect = std::abs(blk.u.col(j).squaredNorm() - 1.0);
        worst = std::max(worst, defect);
      }
    }
    return worst;
  }

 private:
  void compute_certified_total() {
    // Worst column-norm defect per total photon number, then walk up from 0.
    std::vector<double> worst(static_cast<std::size_t>(2 * cutoff_ - 1), 0.0);
    for (const UnitaryBlock& blk : blocks_) {
      const int w = static_cast<int>(blk.indices.size());
      for (int j = 0; j < w; ++j) {
        const int idx = blk.indices[static_cast<std::size_t>(j)];
        const int total = idx / cutoff_ + idx % cutoff_;
        const double defect = std::abs(blk.u.col(j).squaredNorm() - 1.0);
        auto& slot = worst[static_cast<std::size_t>(total)];
        slot = std::max(slot, defect);
      }
    }
    certified_total_ = -1;
    for (std::size_t t = 0; t < worst.size(); ++t) {
      if (worst[t] > 1e-8) break;
      certified_total_ = static_cast<int>(t);
    }
  }

  int cutoff_;
  UnitaryKind kind_;
  double q_;
  std::vector<UnitaryBlock> blocks_;
  int certified_total_ = -1;
};

/// Beam-splitter unitary exp(theta (a_dag b - a b_dag)) with
/// theta = arccos(sqrt(q)), 0 < q < 1, assembled per total-photon-number
/// block.  Within each block the generator is a finite skew-symmetric
/// matrix, so blocks with total T <= cutoff-1 are *exactly* unitary (up to
/// eigensolver roundoff, < 1e-12); blocks reaching above the cutoff keep
/// only their in-space corner and carry the truncation loss.
inline BlockDiagonalUnitary beam_splitter_unitary_fock(double q, int cutoff) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument(
        "beam_splitter_unitary_fock: q must lie strictly inside (0, 1)");
  }
  if (cutoff < 2) {
    throw std::invalid_argument("beam_splitter_unitary_fock: cutoff >= 2");
  }
  const double theta = std::acos(std::sqrt(q));
  std::vector<UnitaryBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(2 * cutoff - 1));
  for (int total = 0; total <= 2 * (cutoff - 1); ++total) {
    const int full = total + 1;  // infinite-space block size
    // Skew generator G on |a, total-a>, a = 0..total:
    //   a_dag b |a,b> = sqrt((a+1) b) |a+1, b-1>
    //   a b_dag |a,b> = sqrt(a (b+1)) |a-1, b+1>
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(full, full);
    for (int a = 0; a < total; ++a) {
      const double up = std::sqrt(static_cast<double>(a + 1) *
                                  static_cast<double>(total - a));
      g(a + 1, a) = up;
      g(a, a + 1) = -up;
    }
    // exp(theta G) via the Hermitian matrix H = i G: exp(theta G) =
    // V exp(-i theta Lambda) V^dag, which is real orthogonal.
    Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * g.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::VectorXcd phases(full);
    for (int k = 0; k < full; ++k) {
      phases(k) = std::exp(std::complex<double>(0.0, -theta * es.eigenvalues()(k)));
    }
    Eigen::MatrixXcd u_full =
        es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

    const int a_lo = std::max(0, total - (cutoff - 1));
    const int a_hi = std::min(total, cutoff - 1);
    const int w = a_hi - a_lo + 1;
    UnitaryBlock blk;
    blk.indices.reserve(static_cast<std::size_t>(w));
    for (int a = a_lo; a <= a_hi; ++a) {
      blk.indices.push_back(a * cutoff + (total - a));
    }
    blk.u = u_full.block(a_lo, a_lo, w, w);
    blk.complete = (total <= cutoff - 1);
    // Real generator => real orthogonal block; drop the ~1e-16 imaginary dust
    // so downstream comparisons see clean real amplitudes.
    for (int i = 0; i < w; ++i) {
      for (int j = 0; j < w; ++j) {
        blk.u(i, j) = std::complex<double>(blk.u(i, j).real(),
                                           std::abs(blk.u(i, j).imag()) < 1e-14
                                               ? 0.0
                                               : blk.u(i, j).imag());
      }
    }
    blocks.push_back(std::move(blk));
  }
  return BlockDiagonalUnitary(cutoff, UnitaryKind::beam_splitter, q,
                              std::move(blocks));
}

namespace detail {

/// Matrix element <m+d, m| U |n+d, n> of the two-mode squeezer
/// U = exp(i arccosh(sqrt(q)) (a_dag b_dag + a b)), q > 1, from the
/// disentangled product form U = e^{r a_dag b_dag} e^{-s (a_dag a + b b_dag)}
/// e^{r a b} with r = i sqrt((q-1)/q) and s = ln sqrt(q):
///
///   E_d(m, n) = i^{m-n} e^{-s(d+1)} sqrt(n! (n+d)! m! (m+d)!)
///               * sum_k (-1)^k t^{m-n+2k} e^{-2s(n-k)}
///                 / (k! (m-n+k)! (n-k)! (n+d-k)!),   t = sqrt((q-1)/q),
///
/// with k running over max(0, n-m) <= k <= n.  Accumulated in long double;
/// the alternating sum is benign because t < 1.
inline std::complex<double> squeezer_element(int m, int n, int d, double t,
                                             double s,
                                             const std::vector<double>& lf) {
  const long double ln_t = std::log(static_cast<long double>(t));
  const long double pref =
      0.5L * (static_cast<long double>(lf[static_cast<std::size_t>(n)]) +
              lf[static_cast<std::size_t>(n + d)] +
              lf[static_cast<std::size_t>(m)] +
              lf[static_cast<std::size_t>(m + d)]) -
      static_cast<long double>(s) * (d + 1);
  long double sum = 0.0L;
  for (int k = std::max(0, n - m); k <= n; ++k) {
    const long double ln_mag =
        pref + (m - n + 2 * k) * ln_t - 2.0L * s * (n - k) -
        lf[static_cast<std::size_t>(k)] -
        lf[static_cast<std::size_t>(m - n + k)] -
        lf[static_cast<std::size_t>(n - k)] -
        lf[static_cast<std::size_t>(n + d - k)];
    const long double term = std::exp(ln_mag);
    sum += (k % 2 == 0) ? term : -term;
  }
  // i^{m-n} phase, reduced mod 4.
  static const std::complex<double> kPhases[4] = {
      {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
  const int p = ((m - n) % 4 + 4) % 4;
  return kPhases[p] * static_cast<double>(sum);
}

}  // namespace detail

/// Two-mode squeezer exp(i arccosh(sqrt(q)) (a_dag b_dag + a b)), q > 1,
/// assembled per photon-number-*difference* block from the closed-form
/// disentangled matrix elements (see detail::squeezer_element).  Every block
/// of the infinite-space unitary is infinite, so the stored blocks are
/// contractive windows.  Construction fails with FockCutoffError when the
/// result cannot certify states with total photon number up to
/// `min_certified_total` (see BlockDiagonalUnitary::certified_total): i.e.
/// the cutoff is too small for the requested gain and accuracy.
inline BlockDiagonalUnitary squeezer_unitary_fock(double q, int cutoff,
                                                  int min_certified_total = 0) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("squeezer_unitary_fock: q must exceed 1");
  }
  if (cutoff < 2) {
    throw std::invalid_argument("squeezer_unitary_fock: cutoff >= 2");
  }
  const double t = std::sqrt((q - 1.0) / q);
  const double s = 0.5 * std::log(q);
  const std::vector<double> lf = detail::log_factorials(2 * cutoff);
  std::vector<UnitaryBlock> blocks;
  blocks.reserve(static_cast<std::size_t>(2 * cutoff - 1));
  for (int d = -(cutoff - 1); d <= cutoff - 1; ++d) {
    const int ad = std::abs(d);
    const int w = cutoff - ad;  // window: n = 0..w-1 labels |n+|d|, n> etc.
    UnitaryBlock blk;
    blk.indices.reserve(static_cast<std::size_t>(w));
    for (int n = 0; n < w; ++n) {
      const int a = (d >= 0) ? n + ad : n;
      const int b = (d >= 0) ? n : n + ad;
      blk.indices.push_back(a * cutoff + b);
    }
    blk.u.resize(w, w);
    for (int m = 0; m < w; ++m) {
      for (int n = 0; n < w; ++n) {
        blk.u(m, n) = detail::squeezer_element(m, n, ad, t, s, lf);
      }
    }
    blk.complete = false;
    blocks.push_back(std::move(blk));
  }
  BlockDiagonalUnitary u(cutoff, UnitaryKind::two_mode_squeezer, q,
                         std::move(blocks));
  if (u.certified_total() < min_certified_total) {
    throw FockCutoffError(
        "squeezer_unitary_fock: cutoff " + std::to_string(cutoff) +
            " too small for q = " + std::to_string(q) +
            " (certified total photon number " +
            std::to_string(u.certified_total()) + " < required " +
            std::to_string(min_certified_total) + ")",
        static_cast<double>(min_certified_total - u.certified_total()));
  }
  return u;
}

/// Reference construction of the same squeezer by direct exponentiation of
/// the (buffered) tridiagonal generator in each difference block: the block
/// is extended `buffer` levels beyond the requested window before
/// diagonalizing, so the window elements converge as the buffer grows.  This
/// shares no algebra with squeezer_unitary_fock and serves as its oracle in
/// the tests.
inline Eigen::MatrixXcd squeezer_block_direct(double q, int d, int window,
                                              int buffer) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("squeezer_block_direct: q must exceed 1");
  }
  const double theta = std::acosh(std::sqrt(q));
  const int n_ext = window + buffer;
  // Hermitian generator on |n+d, n>, n = 0..n_ext-1:
  //   (a_dag b_dag + a b) |n+d, n> = sqrt((n+1)(n+d+1)) |n+d+1, n+1>
  //                                 + sqrt(n (n+d)) |n+d-1, n-1>.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_ext, n_ext);
  for (int n = 0; n + 1 < n_ext; ++n) {
    const double c = std::sqrt(static_cast<double>(n + 1) *
                               static_cast<double>(n + d + 1));
    h(n + 1, n) = c;
    h(n, n + 1) = c;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Eigen::VectorXcd phases(n_ext);
  for (int k = 0; k < n_ext; ++k) {
    phases(k) = std::exp(std::complex<double>(0.0, theta * es.eigenvalues()(k)));
  }
  Eigen::MatrixXcd u_ext = es.eigenvectors().cast<std::complex<double>>() *
                           phases.asDiagonal() *
                           es.eigenvectors().transpose().cast<std::complex<double>>();
  return u_ext.block(0, 0, window, window);
}

/// Result of pushing rho_A (x) eta_E through a two-mode unitary and tracing
/// out either side.  Trace deficits are *reported*, not hidden: deficit_b =
/// 1 - tr(rho_b) combines the mass the inputs were already missing below the
/// cutoff with whatever the truncated unitary leaked.
struct ChannelPairResult {
  Eigen::MatrixXcd rho_b;  // system output, tr_E U (rho_A x eta_E) U^dag
  Eigen::MatrixXcd rho_f;  // environment output, tr_B of the same
  double input_mass = 1.0; // tr(rho_A) * tr(eta_E) actually processed
  double deficit_b = 0.0;  // 1 - tr(rho_b)
  double deficit_f = 0.0;  // 1 - tr(rho_f)
};

namespace detail {

/// Eigendecompose a density matrix into (weight, vector) pairs, dropping
/// numerically-zero weights.  Rejects matrices that are materially
/// non-Hermitian or have negative weight beyond roundoff.
inline std::vector<std::pair<double, Eigen::VectorXcd>> state_ensemble(
    const Eigen::MatrixXcd& rho, const char* label) {
  if (rho.rows() != rho.cols()) {
    throw std::invalid_argument(std::string(label) + ": matrix must be square");
  }
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument(std::string(label) + ": state is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()));
  std::vector<std::pair<double, Eigen::VectorXcd>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double w = es.eigenvalues()(i);
    if (w < -1e-10) {
      throw std::invalid_argument(std::string(label) +
                                  ": state has a negative eigenvalue");
    }
    if (w > 1e-16) {
      out.emplace_back(w, es.eigenvectors().col(i));
    }
  }
  return out;
}

template <class ApplyFn>
ChannelPairResult channel_pair_impl(ApplyFn&& apply, int cutoff,
                                    const Eigen::MatrixXcd& rho_a,
                                    const Eigen::MatrixXcd& eta_e) {
  if (rho_a.rows() != cutoff || eta_e.rows() != cutoff) {
    throw std::invalid_argument(
        "channel_pair_on_state: state dimensions must equal the unitary's "
        "cutoff");
  }
  const auto ens_a = state_ensemble(rho_a, "channel_pair_on_state(rho_a)");
  const auto ens_e = state_ensemble(eta_e, "channel_pair_on_state(eta_e)");

  ChannelPairResult res;
  res.rho_b = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  res.rho_f = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  res.input_mass = 0.0;

  Eigen::VectorXcd prod(cutoff * cutoff);
  for (const auto& [wa, va] : ens_a) {
    for (const auto& [we, ve] : ens_e) {
      const double w = wa * we;
      res.input_mass += w;
      for (int a = 0; a < cutoff; ++a) {
        prod.segment(a * cutoff, cutoff) = va(a) * ve;
      }
      const Eigen::VectorXcd mapped = apply(prod);
      // Reshape A-major: M(a, b) = mapped(a * cutoff + b).
      Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                     Eigen::Dynamic, Eigen::RowMajor>>
          m(mapped.data(), cutoff, cutoff);
      res.rho_b.noalias() += w * (m * m.adjoint());
      res.rho_f.noalias() += w * (m.adjoint() * m).transpose();
    }
  }
  res.deficit_b = 1.0 - res.rho_b.trace().real();
  res.deficit_f = 1.0 - res.rho_f.trace().real();
  const double worst = std::max(res.deficit_b, res.deficit_f);
  if (worst > 1e-6) {
    throw FockCutoffError(
        "channel_pair_on_state: trace leakage " + std::to_string(worst) +
            " exceeds 1e-6; raise the cutoff (input mass below cutoff was " +
            std::to_string(res.input_mass) + ")",
        worst);
  }
  return res;
}

}  // namespace detail

/// Push rho_A (system) and eta_E (environment) through the two-mode unitary
/// and return both partial traces.  Throws FockCutoffError when more than
/// 1e-6 of the unit trace goes missing (input tails below the cutoff plus
/// unitary leakage); smaller deficits are reported in the result.
inline ChannelPairResult channel_pair_on_state(const BlockDiagonalUnitary& u,
                                               const Eigen::MatrixXcd& rho_a,
                                               const Eigen::MatrixXcd& eta_e) {
  return detail::channel_pair_impl(
      [&u](const Eigen::VectorXcd& v) { return u.apply(v); }, u.cutoff(),
      rho_a, eta_e);
}

/// Dense-operator overload (small cutoffs / cross-checks).
inline ChannelPairResult channel_pair_on_state(const FockOperator& u,
                                               const Eigen::MatrixXcd& rho_a,
                                               const Eigen::MatrixXcd& eta_e) {
  if (u.space.n_modes != 2) {
    throw std::invalid_argument(
        "channel_pair_on_state: unitary must act on two modes");
  }
  return detail::channel_pair_impl(
      [&u](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        return u.matrix * v;
      },
      u.space.cutoff, rho_a, eta_e);
}

// ---------------------------------------------------------------------------
// Closed-form output spectra.  These are the independent oracles: they come
// straight from the analytic matrix-element formulas and never touch the
// block unitaries above.
// ---------------------------------------------------------------------------

/// Generic-scalar weight p_l for the beam-splitter acting on |n> with a
/// single environment photon:
///   p_l(n) = C(n+1, l) (1-q)^l q^(n-l) ((n+1)(1-q) - l)^2 / ((n+1)(1-q)),
/// l = 0..n+1.  Exact when T is an exact type (rational q).  Note q^(n-l)
/// has exponent -1 at l = n+1; the zero/positive powers are multiplied out
/// and the single division handled explicitly so T never needs pow().
template <class T>
std::vector<T> bs_output_weights_t(const T& q, int n) {
  if (n < 0) {
    throw std::invalid_argument("bs_output_weights_t: n must be >= 0");
  }
  const T one = T(1);
  const T omq = one - q;  // 1 - q
  std::vector<T> p(static_cast<std::size_t>(n) + 2);
  const T norm = T(n + 1) * omq;
  T binom = one;        // C(n+1, l)
  T omq_pow = one;      // (1-q)^l
  // q^(n-l): start at q^n, divide by q once per step (final step reaches
  // q^{-1}, cancelled analytically by the squared factor's q content; the
  // division below is still exact for rational T).
  T q_pow = one;
  for (int i = 0; i < n; ++i) q_pow *= q;
  for (int l = 0; l <= n + 1; ++l) {
    const T atom = norm - T(l);
    p[static_cast<std::size_t>(l)] = binom * omq_pow * q_pow * atom * atom / norm;
    // advance to l+1
    binom = binom * T(n + 1 - l) / T(l + 1);
    omq_pow *= omq;
    q_pow /= q;
  }
  return p;
}

/// Double-precision beam-splitter output spectrum of |n> with one
/// environment photon: weight p_l sits at output level n+1-l on the system
/// side and at level l on the environment side.  Sums to 1 analytically.
inline std::vector<double> bs_output_spectrum(double q, int n) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument(
        "bs_output_spectrum: q must lie strictly inside (0, 1)");
  }
  return bs_output_weights_t<double>(q, n);
}

/// Generic-scalar amplifier tail weight
///   c_mn(q) = ((n+1-m(q-1))^2 / ((n+1) q^(m+2))) C(n+m, m) ((q-1)/q)^n,
/// the weight of |m> (with one environment photon) at output level n+m
/// (system side) and n+1 (environment side).  Vanishes exactly at
/// n = m(q-1)-1 when that is a nonnegative integer.
template <class T>
T c_mn_t(const T& q, int m, int n) {
  if (m < 0 || n < 0) {
    throw std::invalid_argument("c_mn_t: m and n must be >= 0");
  }
  const T one = T(1);
  const T atom = T(n + 1) - T(m) * (q - one);
  T value = atom * atom / T(n + 1);
  for (int i = 0; i < m + 2; ++i) value /= q;
  // C(n+m, m), multiplicatively (exact for rational T).
  for (int i = 1; i <= m; ++i) value = value * T(n + i) / T(i);
  const T ratio = (q - one) / q;
  for (int i = 0; i < n; ++i) value *= ratio;
  return value;
}

/// Double-precision c_mn for q > 1.
inline double c_mn(double q, int m, int n) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("c_mn: q must exceed 1");
  }
  return c_mn_t<double>(q, m, n);
}

/// Output spectra of the amplifier channel pair on the number state |m>
/// meeting a *single environment photon* (input |m, 1>, the configuration
/// the degradability analysis runs on): the system output has an atom of
/// weight m(q-1)/q^(m+1) at level m-1 (absent for m = 0) plus tail weights
/// c_mn at levels n+m; the environment output has the same atom weight at
/// level 0 plus c_mn at levels n+1.  The stored tail is truncated where a
/// certified geometric bound on the remaining mass drops below `tail_tol`.
struct AmpSpectra {
  int m = 0;
  double atom = 0.0;              // shared atom weight
  std::vector<double> tail;       // c_m0, c_m1, ..., c_m,n_trunc
  double tail_bound = 0.0;        // certified bound on the dropped mass

  /// Dense system-side spectrum of length `len` (atom at m-1, tail at n+m).
  std::vector<double> dense_system(int len) const {
    std::vector<double> v(static_cast<std::size_t>(len), 0.0);
    if (m >= 1 && m - 1 < len) v[static_cast<std::size_t>(m - 1)] = atom;
    for (std::size_t n = 0; n < tail.size(); ++n) {
      const std::size_t pos = n + static_cast<std::size_t>(m);
      if (pos < v.size()) v[pos] += tail[n];
    }
    return v;
  }

  /// Dense environment-side spectrum (atom at 0, tail at n+1).
  std::vector<double> dense_environment(int len) const {
    std::vector<double> v(static_cast<std::size_t>(len), 0.0);
    if (len > 0) v[0] = atom;
    for (std::size_t n = 0; n < tail.size(); ++n) {
      const std::size_t pos = n + 1;
      if (pos < v.size()) v[pos] += tail[n];
    }
    return v;
  }
};

/// Compute the amplifier spectra of |m> with a certified tail: successive
/// weight ratios obey c_{m,n+1}/c_{m,n} <= rho_bar(n0) for all n >= n0 with
///   rho_bar(n0) = (1 + 1/(n0+1-a))^2 (1 + (m-1)/(n0+2)) (q-1)/q,
///   a = m(q-1),
/// so once rho_bar < 1 the dropped mass is at most c_{m,n0} rho_bar/(1-rho_bar).
inline AmpSpectra amp_channel_spectra(double q, int m, double tail_tol = 1e-10) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("amp_channel_spectra: q must exceed 1");
  }
  if (m < 0) {
    throw std::invalid_argument("amp_channel_spectra: m must be >= 0");
  }
  if (!(tail_tol > 0.0)) {
    throw std::invalid_argument("amp_channel_spectra: tail_tol must be > 0");
  }
  AmpSpectra sp;
  sp.m = m;
  sp.atom = m * (q - 1.0) / std::pow(q, m + 1);
  const double a = m * (q - 1.0);
  const double base_ratio = (q - 1.0) / q;
  const int n_min = static_cast<int>(std::ceil(a)) + 1;  // ensure n0+1-a > 0
  for (int n = 0; n < 100000; ++n) {
    sp.tail.push_back(c_mn(q, m, n));
    if (n < n_min) continue;
    const double rho_bar = (1.0 + 1.0 / (n + 1.0 - a)) *
                           (1.0 + 1.0 / (n + 1.0 - a)) *
                           (1.0 + (m - 1.0) / (n + 2.0)) * base_ratio;
    if (rho_bar < 1.0) {
      const double bound = sp.tail.back() * rho_bar / (1.0 - rho_bar);
      if (bound < tail_tol) {
        sp.tail_bound = bound;
        return sp;
      }
    }
  }
  throw FockCutoffError(
      "amp_channel_spectra: tail failed to certify below tolerance", 0.0);
}

/// One row of the Gaussian-vs-Fock entropy cross-check: a thermal input with
/// mean photon number nbar meets a squeezed-vacuum environment (squeezing s,
/// angle 0) on a beam splitter of transmissivity q.  Both output entropies
/// are computed twice — once from covariance matrices, once from truncated
/// number-basis density matrices at the given cutoff — and reported side by
/// side.  The two routes share no code.
struct CrosscheckRow {
  double q = 0.0, nbar = 0.0, s = 0.0;
  int cutoff = 0;
  double s_b_gaussian = 0.0, s_b_fock = 0.0;
  double s_f_gaussian = 0.0, s_f_fock = 0.0;

  double worst_gap() const {
    return std::max(std::abs(s_b_gaussian - s_b_fock),
                    std::abs(s_f_gaussian - s_f_fock));
  }
};

inline CrosscheckRow gaussian_fock_crosscheck(double q, double nbar, double s,
                                              int cutoff) {
  CrosscheckRow row;
  row.q = q;
  row.nbar = nbar;
  row.s = s;
  row.cutoff = cutoff;

  // Gaussian route.
  const TwoModeUnitary bs = beam_splitter(q);
  const Eigen::Matrix2d v_a = (nbar + 0.5) * Eigen::Matrix2d::Identity();
  const CovarianceMatrix v_e = squeezed_env_cm(s, 0.0);
  const OmgChannel eff = effective_channel(bs, v_e);
  const OmgChannel comp = complementary_channel(bs, v_e);
  row.s_b_gaussian =
      entropy_gaussian(eff.X() * v_a * eff.X().transpose() + eff.Y());
  row.s_f_gaussian =
      entropy_gaussian(comp.X() * v_a * comp.X().transpose() + comp.Y());

  // Fock route.
  const BlockDiagonalUnitary u = beam_splitter_unitary_fock(q, cutoff);
  const Eigen::MatrixXcd rho_a = thermal_state_fock(nbar, cutoff);
  const Eigen::VectorXcd env_vec = squeezed_vacuum_fock(s, 0.0, cutoff);
  const Eigen::MatrixXcd eta_e = env_vec * env_vec.adjoint();
  const ChannelPairResult pair = channel_pair_on_state(u, rho_a, eta_e);
  row.s_b_fock = entropy_fock(pair.rho_b);
  row.s_f_fock = entropy_fock(pair.rho_f);
  return row;
}

}  // namespace gausscap
