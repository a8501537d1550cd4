#pragma once

// Symplectic linear algebra for Gaussian states: covariance matrices,
// symplectic spectra, and the entropy functions built on them.
//
// Conventions used across the whole library:
//   * quadrature ordering (q1, p1, ..., qn, pn)
//   * vacuum covariance matrix V = I/2, so the uncertainty relation reads
//     V + (i/2) Sigma >= 0 and symplectic eigenvalues satisfy nu >= 1/2
//   * all entropies are in nats (natural logarithm)

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gausscap {

inline constexpr double kSymmetryTol = 1e-10;  // max tolerated |V - V^T| entry
inline constexpr double kValidityTol = 1e-10;  // slack on V + (i/2) Sigma >= 0
inline constexpr double kEqualityTol = 1e-8;   // "nu equals 1/2" type comparisons

/// The 2n x 2n symplectic form Sigma = direct sum of n blocks [[0, 1], [-1, 0]].
inline Eigen::MatrixXd symplectic_form(int n_modes) {
  if (n_modes < 1) {
    throw std::invalid_argument("symplectic_form: n_modes must be >= 1");
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    sigma(2 * k, 2 * k + 1) = 1.0;
    sigma(2 * k + 1, 2 * k) = -1.0;
  }
  return sigma;
}

namespace detail {

inline void require_even_square(const Eigen::MatrixXd& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() < 2 || a.rows() % 2 != 0) {
    throw std::invalid_argument(std::string(who) +
                                ": matrix must be square with even dimension");
  }
}

inline void require_symmetric(const Eigen::MatrixXd& a, const char* who) {
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw std::invalid_argument(std::string(who) +
                                ": matrix not symmetric within 1e-10");
  }
}

/// Moduli of the eigenvalues of i Sigma A, one copy per mode, descending.
/// The spectrum of i Sigma A comes in +/- pairs for symmetric A, so sorting
/// all 2n moduli and keeping every second entry removes the duplicates.
inline std::vector<double> abs_sympl_spectrum(const Eigen::MatrixXd& a) {
  require_even_square(a, "abs_sympl_spectrum");
  require_symmetric(a, "abs_sympl_spectrum");
  const int n = static_cast<int>(a.rows()) / 2;
  const std::complex<double> iu(0.0, 1.0);
  Eigen::MatrixXcd m = iu * (symplectic_form(n) * a).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("abs_sympl_spectrum: eigensolver failed to converge");
  }
  std::vector<double> all(2 * n);
  for (int k = 0; k < 2 * n; ++k) all[k] = std::abs(solver.eigenvalues()(k));
  std::sort(all.begin(), all.end(), std::greater<double>());
  std::vector<double> nu(n);
  for (int k = 0; k < n; ++k) nu[k] = all[2 * k];
  return nu;
}

}  // namespace detail

/// Covariance matrix of an n-mode Gaussian state.  Symmetry and the
/// uncertainty relation V + (i/2) Sigma >= 0 are checked on construction;
/// instances are immutable afterwards.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXd v) : v_(std::move(v)) {
    detail::require_even_square(v_, "CovarianceMatrix");
    detail::require_symmetric(v_, "CovarianceMatrix");
    v_ = ((v_ + v_.transpose()) / 2.0).eval();
    const std::complex<double> iu(0.0, 1.0);
    Eigen::MatrixXcd herm = v_.cast<std::complex<double>>() +
                            0.5 * iu * symplectic_form(n_modes()).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < -kValidityTol) {
      throw std::invalid_argument(
          "CovarianceMatrix: uncertainty relation violated, min eig of V + (i/2)Sigma = " +
          std::to_string(lo));
    }
  }

  /// Vacuum state, V = I/2.
  static CovarianceMatrix vacuum(int n_modes) {
    return CovarianceMatrix(0.5 * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  /// Thermal state with nbar mean photons per mode, V = (nbar + 1/2) I.
  static CovarianceMatrix thermal(double nbar, int n_modes) {
    if (nbar < 0.0) {
      throw std::invalid_argument("CovarianceMatrix::thermal: nbar must be >= 0");
    }
    return CovarianceMatrix((nbar + 0.5) *
                            Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
  }

  int n_modes() const { return static_cast<int>(v_.rows()) / 2; }
  const Eigen::MatrixXd& matrix() const { return v_; }

  /// True when every symplectic eigenvalue equals 1/2 within tolerance.
  bool is_pure() const {
    const auto nu = detail::abs_sympl_spectrum(v_);
    return std::all_of(nu.begin(), nu.end(),
                       [](double x) { return std::abs(x - 0.5) <= kEqualityTol; });
  }

  /// Mean photon number per mode, (tr V / 2n - 1/2) averaged over modes.
  double mean_photons_per_mode() const {
    return v_.trace() / (2.0 * n_modes()) - 0.5;
  }

 private:
  Eigen::MatrixXd v_;
};

/// Gaussian state: first moments d plus covariance matrix.
struct GaussianState {
  Eigen::VectorXd mean;
  CovarianceMatrix cm;

  GaussianState(Eigen::VectorXd d, CovarianceMatrix v) : mean(std::move(d)), cm(std::move(v)) {
    if (mean.size() != cm.matrix().rows()) {
      throw std::invalid_argument("GaussianState: mean vector dimension must match CM");
    }
  }
  static GaussianState centered(CovarianceMatrix v) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(v.matrix().rows());
    return GaussianState(std::move(d), std::move(v));
  }
};

/// Input/environment energy constraint, as mean photon numbers per mode.
struct EnergyBudget {
  double p_a;  // input (sender) mean photon number per mode
  double p_e;  // environment mean photon number per mode

  EnergyBudget(double input, double env) : p_a(input), p_e(env) {
    if (!(p_a >= 0.0) || !(p_e >= 0.0)) {
      throw std::invalid_argument("EnergyBudget: photon numbers must be >= 0");
    }
  }
};

/// Symplectic eigenvalues of a (validated) covariance matrix, descending.
inline std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& v) {
  return detail::abs_sympl_spectrum(v.matrix());
}

/// Convenience overload validating the raw matrix first.
inline std::vector<double> symplectic_eigenvalues(const Eigen::MatrixXd& v) {
  return symplectic_eigenvalues(CovarianceMatrix(v));
}

/// Symplectic trace: the sum of the symplectic eigenvalues of a positive
/// definite symmetric matrix.
inline double symplectic_trace(const Eigen::MatrixXd& a) {
  detail::require_even_square(a, "symplectic_trace");
  detail::require_symmetric(a, "symplectic_trace");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("symplectic_trace: matrix must be positive definite");
  }
  const auto nu = detail::abs_sympl_spectrum(a);
  double s = 0.0;
  for (double x : nu) s += x;
  return s;
}

/// Entropy of one Gaussian mode with symplectic eigenvalue x:
///   g(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2),
/// with the x -> 1/2 limit handled exactly (0 ln 0 := 0 by branch).
inline double g_entropy(double x) {
  constexpr double kDomainSlack = 1e-12;
  if (!(x >= 0.5 - kDomainSlack)) {
    throw std::domain_error("g_entropy: argument must be >= 1/2, got " + std::to_string(x));
  }
  if (x <= 0.5) return 0.0;
  const double a = x + 0.5;
  const double b = x - 0.5;
  return a * std::log(a) - b * std::log(b);
}

/// Occupation-number form of the same function:
///   g_occupation(n) = (n + 1) ln(n + 1) - n ln n = g_entropy(n + 1/2).
/// Several printed capacity bounds quote their arguments as mean photon
/// numbers rather than symplectic eigenvalues; this is the evaluation those
/// formulas use.
inline double g_occupation(double nbar) {
  constexpr double kDomainSlack = 1e-12;
  if (!(nbar >= -kDomainSlack)) {
    throw std::domain_error("g_occupation: argument must be >= 0, got " +
                            std::to_string(nbar));
  }
  if (nbar <= 0.0) return 0.0;
  return (nbar + 1.0) * std::log(nbar + 1.0) - nbar * std::log(nbar);
}

/// Von Neumann entropy of a Gaussian state, S(V) = sum_i g(nu_i), in nats.
inline double entropy_gaussian(const CovarianceMatrix& v) {
  double s = 0.0;
  for (double nu : symplectic_eigenvalues(v)) {
    // Tiny dips below 1/2 are validated noise from the eigensolver; clamp.
    s += g_entropy(std::max(nu, 0.5));
  }
  return s;
}

inline double entropy_gaussian(const Eigen::MatrixXd& v) {
  return entropy_gaussian(CovarianceMatrix(v));
}

/// Relative entropy D(p || r) = sum_i p_i ln(p_i / r_i) between two diagonal
/// (classical) distributions given as aligned nonnegative sequences.
/// Returns +infinity when supp(p) is not contained in supp(r).
inline double relative_entropy_diagonal(const std::vector<double>& p,
                                        const std::vector<double>& r) {
  if (p.size() != r.size()) {
    throw std::invalid_argument("relative_entropy_diagonal: length mismatch");
  }
  constexpr double kNormTol = 1e-9;
  double sp = 0.0, sr = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0 || r[i] < 0.0) {
      throw std::invalid_argument("relative_entropy_diagonal: negative entry");
    }
    sp += p[i];
    sr += r[i];
  }
  if (std::abs(sp - 1.0) > kNormTol || std::abs(sr - 1.0) > kNormTol) {
    throw std::invalid_argument(
        "relative_entropy_diagonal: sequences must sum to 1 within 1e-9 (got " +
        std::to_string(sp) + ", " + std::to_string(sr) + ")");
  }
  double d = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;  // 0 ln 0 := 0
    if (r[i] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[i] * std::log(p[i] / r[i]);
  }
  return d;
}

}  // namespace gausscap
