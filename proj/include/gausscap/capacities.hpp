#pragma once

// Capacity quantities and bounds for environment-assisted Gaussian channels:
// coherent-information capacities (closed form and numerically optimized),
// Holevo-type classical bounds, the chi_H + chi_A uncertainty relation with
// its per-class refinements, conferencing-encoder bounds, and a continuity
// bound.  All values are in nats.
//
// Two g-function conventions appear in the literature and both are used here,
// deliberately and explicitly:
//   * g_entropy(nu)    — entropy as a function of a symplectic eigenvalue
//                        (domain nu >= 1/2);
//   * g_occupation(N)  — entropy as a function of a thermal mean photon
//                        number (domain N >= 0), g_occupation(N) = g_entropy(N + 1/2).
// Quantities whose printed arguments are photon numbers (the classical
// capacity lower bound, the conferencing bound) use g_occupation; where the
// symplectic-eigenvalue reading is also of interest the result records it
// separately instead of silently reconciling the two.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gausscap/channels.hpp"
#include "gausscap/symplectic.hpp"

namespace gausscap {

// ---------------------------------------------------------------------------
// Result plumbing.

enum class CapacityMethod { closed_form, optimized, bound };

inline const char* to_string(CapacityMethod m) {
  switch (m) {
    case CapacityMethod::closed_form: return "closed_form";
    case CapacityMethod::optimized: return "optimized";
    case CapacityMethod::bound: return "bound";
  }
  return "bound";
}

/// One-mode Gaussian state ansatz: CM = (n + 1/2) R(theta) diag(e^{2s}, e^{-2s}) R(theta)^T.
struct StateAnsatz {
  double thermal_n = 0.0;
  double squeeze = 0.0;
  double angle = 0.0;

  CovarianceMatrix cm() const {
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    Eigen::Matrix2d d =
        Eigen::Vector2d(std::exp(2.0 * squeeze), std::exp(-2.0 * squeeze)).asDiagonal();
    return CovarianceMatrix((thermal_n + 0.5) * (r * d * r.transpose()));
  }

  /// Mean photon number of the ansatz state.
  double mean_photons() const {
    return ((2.0 * thermal_n + 1.0) * std::cosh(2.0 * squeeze) - 1.0) / 2.0;
  }
};

struct CapacityResult {
  double value = 0.0;
  CapacityMethod method = CapacityMethod::bound;
  std::optional<StateAnsatz> input_state;  // optimizer description, when searched
  std::optional<StateAnsatz> env_state;
  bool converged = true;
  int iterations = 0;
};

namespace detail {

/// Golden-section maximization of a unimodal (or concave) function on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi,
                         double* arg_out = nullptr, double tol = 1e-12, int max_iter = 200) {
  if (hi < lo) std::swap(lo, hi);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = (a + b) / 2.0;
  double fm = f(xm);
  // Guard the endpoints: for monotone objectives the maximum sits on the boundary.
  if (f(lo) > fm) {
    fm = f(lo);
    if (arg_out) *arg_out = lo;
    return fm;
  }
  if (f(hi) > fm) {
    fm = f(hi);
    if (arg_out) *arg_out = hi;
    return fm;
  }
  if (arg_out) *arg_out = xm;
  return fm;
}

inline double entropy_of(const Eigen::MatrixXd& cm) {
  double s = 0.0;
  for (double nu : abs_sympl_spectrum(cm)) s += g_entropy(std::max(nu, 0.5));
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Coherent information.

/// I_c for Gaussian input V_A and environment V_E through dilation W:
/// S(M V_A M^T + N V_E N^T) - S(O V_A O^T + P V_E P^T).
inline double coherent_information_gaussian(const SymplecticDilation& w,
                                            const CovarianceMatrix& v_e,
                                            const CovarianceMatrix& v_a) {
  if (v_a.n_modes() != w.n_system() || v_e.n_modes() != w.n_env()) {
    throw std::invalid_argument("coherent_information_gaussian: dimension mismatch");
  }
  const Eigen::MatrixXd m = w.M(), n = w.N(), o = w.O(), p = w.P();
  const Eigen::MatrixXd vb = m * v_a.matrix() * m.transpose() + n * v_e.matrix() * n.transpose();
  const Eigen::MatrixXd vf = o * v_a.matrix() * o.transpose() + p * v_e.matrix() * p.transpose();
  return detail::entropy_of(vb) - detail::entropy_of(vf);
}

struct BradResult {
  double value = 0.0;
  double K = 0.0;
  /// Set when K < 0 was clamped to a zero capacity (anti-degradable regime
  /// convention); such parameter pairs do not arise from completely positive
  /// channels.
  bool antidegradable = false;
};

/// Optimized (over Gaussian inputs, at unconstrained input power) coherent
/// information of the one-mode channel with invariants (x, y):
///   (K/|1-x|) ln(K/|1-x|) - ((K+|1-x|)/|1-x|) ln((K+|1-x|)/|1-x|) + ln(x/|1-x|),
/// K = (y - |1-x|)/2, with the K -> 0 limit taken analytically (0 ln 0 = 0).
inline BradResult optimized_coherent_info_omg(double x, double y) {
  if (x == 0.0 || x == 1.0) {
    throw std::invalid_argument("optimized_coherent_info_omg: x must differ from 0 and 1");
  }
  if (x < 0.0 || y < 0.0) {
    throw std::invalid_argument("optimized_coherent_info_omg: negative channel parameters");
  }
  const double d = std::abs(1.0 - x);
  const double k = (y - d) / 2.0;
  BradResult out;
  out.K = k;
  if (k < 0.0) {
    out.value = 0.0;
    out.antidegradable = true;
    return out;
  }
  const double lead = std::log(x / d);
  if (k == 0.0) {
    out.value = lead;  // analytic limit: the two K-terms cancel to -1*ln(1) = 0
    return out;
  }
  const double u = k / d;
  out.value = u * std::log(u) - (u + 1.0) * std::log(u + 1.0) + lead;
  return out;
}

/// Closed-form optimized coherent information of the two-mode family member
/// with parameter q: zero at and below half transmissivity, ln(q/(1-q)) on the
/// beam-splitter branch above it, ln(q/(q-1)) on the amplifier branch.
inline double q_ghx_closed_form(double q) {
  if (!(q > 0.0) || q == 1.0) {
    throw std::invalid_argument("q_ghx_closed_form: requires q > 0, q != 1");
  }
  if (q <= 0.5) return 0.0;
  if (q < 1.0) return std::log(q / (1.0 - q));
  return std::log(q / (q - 1.0));
}

/// Gibbs (thermal) state CM at mean photon number P per mode: (P + 1/2) I.
inline CovarianceMatrix gibbs_state_cm(double p, int n_modes) {
  if (p < 0.0) throw std::invalid_argument("gibbs_state_cm: P must be >= 0");
  return CovarianceMatrix((p + 0.5) *
                          Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

namespace detail {

inline double env_squeeze_cap(double p_e) {
  // cosh(2s) <= 2 P_E + 1.
  return 0.5 * std::acosh(2.0 * p_e + 1.0);
}

}  // namespace detail

/// Numerically maximize coherent_information_gaussian over one-mode Gaussian
/// inputs with mean photon number <= P_A and pure squeezed environments with
/// mean photon number <= P_E (cosh(2s) <= 2 P_E + 1).  Coordinate ascent with
/// golden-section line searches; the objective is concave in the covariance
/// matrix, so a local maximum is global.
inline CapacityResult maximize_coherent_info(const SymplecticDilation& w,
                                             const EnergyBudget& budget,
                                             std::optional<StateAnsatz> start_a = std::nullopt,
                                             std::optional<StateAnsatz> start_e = std::nullopt,
                                             double tol = 1e-10, int max_iterations = 10000) {
  if (w.n_system() != 1 || w.n_env() != 1) {
    throw std::invalid_argument("maximize_coherent_info: (1+1)-mode dilations only");
  }
  const double p_a = budget.p_a, p_e = budget.p_e;
  const double se_max = detail::env_squeeze_cap(p_e);

  // Parameter vector: (n_a, s_a, theta_a, s_e, theta_e), with the input
  // squeezing bound depending on the thermal occupation:
  // (2n + 1) cosh(2 s_a) <= 2 P_A + 1.
  auto sa_max = [p_a](double n) {
    const double ratio = (2.0 * p_a + 1.0) / (2.0 * n + 1.0);
    return ratio <= 1.0 ? 0.0 : 0.5 * std::acosh(ratio);
  };

  StateAnsatz a = start_a.value_or(StateAnsatz{0.0, 0.0, 0.0});
  StateAnsatz e = start_e.value_or(StateAnsatz{0.0, 0.0, 0.0});
  a.thermal_n = std::clamp(a.thermal_n, 0.0, p_a);
  a.squeeze = std::clamp(a.squeeze, 0.0, sa_max(a.thermal_n));
  e.squeeze = std::clamp(e.squeeze, 0.0, se_max);
  e.thermal_n = 0.0;  // environment restricted to pure squeezed states

  auto objective = [&](const StateAnsatz& ia, const StateAnsatz& ie) {
    return coherent_information_gaussian(w, squeezed_env_cm(ie.squeeze, ie.angle), ia.cm());
  };

  double best = objective(a, e);
  CapacityResult out;
  out.method = CapacityMethod::optimized;
  out.converged = false;

  int it = 0;
  for (; it < max_iterations; ++it) {
    const double prev = best;

    best = detail::golden_max(
        [&](double v) { StateAnsatz t = a; t.thermal_n = v; t.squeeze = std::min(t.squeeze, sa_max(v)); return objective(t, e); },
        0.0, p_a, &a.thermal_n);
    a.squeeze = std::min(a.squeeze, sa_max(a.thermal_n));

    if (sa_max(a.thermal_n) > 0.0) {
      best = detail::golden_max(
          [&](double v) { StateAnsatz t = a; t.squeeze = v; return objective(t, e); },
          0.0, sa_max(a.thermal_n), &a.squeeze);
    }
    if (a.squeeze > 0.0) {
      best = detail::golden_max(
          [&](double v) { StateAnsatz t = a; t.angle = v; return objective(t, e); },
          0.0, M_PI, &a.angle);
    }
    if (se_max > 0.0) {
      best = detail::golden_max(
          [&](double v) { StateAnsatz t = e; t.squeeze = v; return objective(a, t); },
          0.0, se_max, &e.squeeze);
    }
    if (e.squeeze > 0.0) {
      best = detail::golden_max(
          [&](double v) { StateAnsatz t = e; t.angle = v; return objective(a, t); },
          0.0, M_PI, &e.angle);
    }

    if (std::abs(best - prev) < tol) {
      out.converged = true;
      ++it;
      break;
    }
  }

  out.value = best;
  out.input_state = a;
  out.env_state = e;
  out.iterations = it;
  return out;
}

/// Lower bound on the energy-constrained capacity: input fixed at the Gibbs
/// state gamma_A(P_A), environment optimized over pure squeezed states within
/// the P_E budget (one-dimensional search in s, scanning the angle).
inline double energy_constrained_q_lower_bound(const SymplecticDilation& w,
                                               const EnergyBudget& budget) {
  const CovarianceMatrix v_a = gibbs_state_cm(budget.p_a, w.n_system());
  const double se_max = detail::env_squeeze_cap(budget.p_e);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 8; ++k) {
    const double theta = k * M_PI / 8.0;
    const double v = detail::golden_max(
        [&](double s) {
          return coherent_information_gaussian(w, squeezed_env_cm(s, theta), v_a);
        },
        0.0, se_max);
    best = std::max(best, v);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Classical (Holevo) bounds.

/// chi_H >= S((P_A + 1/2) M M^T + (1/2) N N^T) - S((1/2) M M^T + (1/2) N N^T).
inline double chi_h_lower(const SymplecticDilation& w, const EnergyBudget& budget) {
  const Eigen::MatrixXd mm = w.M() * w.M().transpose();
  const Eigen::MatrixXd nn = w.N() * w.N().transpose();
  return detail::entropy_of((budget.p_a + 0.5) * mm + 0.5 * nn) -
         detail::entropy_of(0.5 * mm + 0.5 * nn);
}

/// chi_A >= S((P_E + 1/2) N N^T + (1/2) M M^T) - S((1/2) M M^T + (1/2) N N^T).
inline double chi_a_lower(const SymplecticDilation& w, const EnergyBudget& budget) {
  const Eigen::MatrixXd mm = w.M() * w.M().transpose();
  const Eigen::MatrixXd nn = w.N() * w.N().transpose();
  return detail::entropy_of((budget.p_e + 0.5) * nn + 0.5 * mm) -
         detail::entropy_of(0.5 * mm + 0.5 * nn);
}

/// Generic uncertainty relation: chi_H + chi_A >= min(P_A,P_E)/(2 max(P_A,P_E)+1).
inline double uncertainty_lower_bound(const EnergyBudget& budget) {
  const double lo = std::min(budget.p_a, budget.p_e);
  const double hi = std::max(budget.p_a, budget.p_e);
  return lo / (2.0 * hi + 1.0);
}

/// Gaussian-modulated coherent/squeezed-state lower bound on the classical
/// capacity with separable helper, for the one-mode channel with invariants
/// (x, y):
///   max_s  g_occ(|x| P_A + y cosh(2s) + (|x|-1)/2) - g_occ(y + (|x|-1)/2)
/// over environment squeezings s with cosh(2s) <= 2 P_E + 1 and
/// P_A >= P_th(s) = e^{2|s|} + 2 y sinh(2|s|)/|x| - 1.  The arguments are mean
/// photon numbers (g_occupation); they are nonnegative exactly when (x, y)
/// satisfies complete positivity, y >= |1 - x|.  s = 0 is always feasible.
inline double classical_capacity_lower_bound(double x, double y, const EnergyBudget& budget) {
  if (x == 0.0 || x == 1.0) {
    throw std::invalid_argument("classical_capacity_lower_bound: x must differ from 0 and 1");
  }
  if (y < 0.0) {
    throw std::invalid_argument("classical_capacity_lower_bound: y must be >= 0");
  }
  const double ax = std::abs(x);
  const double base = y + (ax - 1.0) / 2.0;
  if (base < 0.0 || ax * budget.p_a + base < 0.0) {
    throw std::invalid_argument(
        "classical_capacity_lower_bound: (x, y) violates complete positivity");
  }
  auto p_th = [&](double s) {
    return std::exp(2.0 * std::abs(s)) + 2.0 * y * std::sinh(2.0 * std::abs(s)) / ax - 1.0;
  };
  // Upper squeezing limit: the helper budget, tightened by the threshold
  // P_A >= P_th(s); P_th is increasing, so bisect for the crossing if needed.
  double s_hi = detail::env_squeeze_cap(budget.p_e);
  if (p_th(s_hi) > budget.p_a) {
    double lo = 0.0, hi = s_hi;
    for (int i = 0; i < 200; ++i) {
      const double mid = (lo + hi) / 2.0;
      (p_th(mid) <= budget.p_a ? lo : hi) = mid;
    }
    s_hi = lo;
  }
  auto objective = [&](double s) {
    return g_occupation(ax * budget.p_a + y * std::cosh(2.0 * s) + (ax - 1.0) / 2.0) -
           g_occupation(base);
  };
  return detail::golden_max(objective, 0.0, s_hi);
}

// ---------------------------------------------------------------------------
// Per-class refinements of the uncertainty bound.

/// Right-hand side of the per-class chi_H + chi_A bound, evaluated exactly as
/// printed for each canonical class.  kappa/n0 are the class parameters
/// (ignored where the class fixes them); arguments are symplectic eigenvalues.
inline double class_uncertainty_bound(OmgClass cls, double kappa, double n0,
                                      const EnergyBudget& budget) {
  const double p_a = budget.p_a, p_e = budget.p_e;
  switch (cls) {
    case OmgClass::A1:
      return g_entropy(p_e + 0.5);
    case OmgClass::A2:
      return g_entropy(std::sqrt((p_a + 1.0) / 2.0)) +
             g_entropy(std::sqrt((p_e + 1.0) * (p_e + 0.5))) -
             2.0 * g_entropy(std::sqrt(0.5));
    case OmgClass::B1: {
      if (n0 < 0.0) throw std::invalid_argument("class_uncertainty_bound: B1 needs N0 >= 0");
      const double w = 1.0 / (4.0 * n0 + 2.0);
      return g_entropy(std::sqrt((p_a + 0.5 + 2.0 * w) * (p_a + 0.5))) +
             g_entropy(std::sqrt((p_e + 0.5) * w + 0.5)) -
             2.0 * g_entropy(std::sqrt(0.25 + w));
    }
    case OmgClass::B2: {
      if (n0 < 0.0) throw std::invalid_argument("class_uncertainty_bound: B2 needs N0 >= 0");
      const double w = n0 / (2.0 * n0 + 1.0);
      return g_entropy(p_a + 0.5 + w) + g_entropy((p_e + 0.5) * 2.0 * w + 0.5) -
             2.0 * g_entropy(0.5 + w);
    }
    case OmgClass::C_att: {
      if (!(kappa > 0.0 && kappa < 1.0)) {
        throw std::invalid_argument("class_uncertainty_bound: C_att needs 0 < kappa < 1");
      }
      return g_entropy((p_a + 0.5) * kappa + 1.0 - kappa) +
             g_entropy((p_e + 0.5) * (1.0 - kappa) + kappa);
    }
    case OmgClass::C_amp: {
      if (!(kappa > 1.0)) {
        throw std::invalid_argument("class_uncertainty_bound: C_amp needs kappa > 1");
      }
      return g_entropy((p_a + 0.5) * kappa + kappa - 1.0) +
             g_entropy((p_e + 0.5) * (kappa - 1.0) + kappa) -
             2.0 * g_entropy(kappa - 0.5);
    }
    case OmgClass::D: {
      if (!(kappa < 0.0)) {
        throw std::invalid_argument("class_uncertainty_bound: D needs kappa < 0");
      }
      const double ak = std::abs(kappa);
      return g_entropy((p_a + 0.5) * ak + 1.0 - kappa) +
             g_entropy((p_e + 0.5) * (1.0 - kappa) + ak) -
             2.0 * g_entropy((ak + std::abs(1.0 - kappa)) / 2.0);
    }
    case OmgClass::unclassified:
      break;
  }
  throw std::invalid_argument("class_uncertainty_bound: no bound for this class");
}

struct UncertaintyReport {
  double chi_h_lower = 0.0;
  double chi_a_lower = 0.0;
  double generic_bound = 0.0;
  double class_bound = std::numeric_limits<double>::quiet_NaN();
  OmgClass cls = OmgClass::unclassified;
};

/// Bundle the two Holevo lower bounds with the generic and (when the induced
/// channel classifies) per-class uncertainty bounds.
inline UncertaintyReport uncertainty_report(const SymplecticDilation& w,
                                            const CovarianceMatrix& v_e,
                                            const EnergyBudget& budget) {
  UncertaintyReport rep;
  rep.chi_h_lower = chi_h_lower(w, budget);
  rep.chi_a_lower = chi_a_lower(w, budget);
  rep.generic_bound = uncertainty_lower_bound(budget);
  const OmgClassification cls = classify_omg(effective_channel(w, v_e));
  rep.cls = cls.cls;
  if (cls.cls != OmgClass::unclassified) {
    rep.class_bound = class_uncertainty_bound(cls.cls, cls.kappa, std::max(cls.n0, 0.0), budget);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Conferencing encoders.

struct ConferencingBound {
  /// Photon-number reading of the bound (defined for every dilation).
  double value = 0.0;
  /// Literal symplectic-eigenvalue reading of the same sum; NaN when any
  /// argument falls below the g domain (nu < 2 makes (nu-1)/2 < 1/2).
  double nu_form = std::numeric_limits<double>::quiet_NaN();
  /// Symplectic eigenvalues of M M^T + N N^T.
  std::vector<double> nu;
};

/// Product-state lower bound for conferencing encoders:
///   sum_i [ g(((2 P_A + 1) nu_i - 1)/2) - g((nu_i - 1)/2) ]
/// over the symplectic eigenvalues nu_i of M M^T + N N^T (all >= 1).  The
/// arguments are mean photon numbers; `value` applies g_occupation, and the
/// literal g_entropy reading is recorded as `nu_form` without reconciling the
/// two conventions.
inline ConferencingBound conferencing_lower_bound_detail(const SymplecticDilation& w,
                                                         double p_a) {
  if (p_a < 0.0) throw std::invalid_argument("conferencing_lower_bound: P_A must be >= 0");
  ConferencingBound out;
  const Eigen::MatrixXd sum =
      w.M() * w.M().transpose() + w.N() * w.N().transpose();
  out.nu = detail::abs_sympl_spectrum(sum);
  double occ = 0.0, nu_form = 0.0;
  bool nu_ok = true;
  for (double nu : out.nu) {
    const double hi = ((2.0 * p_a + 1.0) * nu - 1.0) / 2.0;
    const double lo = (nu - 1.0) / 2.0;
    occ += g_occupation(std::max(hi, 0.0)) - g_occupation(std::max(lo, 0.0));
    if (hi >= 0.5 && lo >= 0.5) {
      nu_form += g_entropy(hi) - g_entropy(lo);
    } else {
      nu_ok = false;
    }
  }
  out.value = occ;
  if (nu_ok) out.nu_form = nu_form;
  return out;
}

inline double conferencing_lower_bound(const SymplecticDilation& w, double p_a) {
  return conferencing_lower_bound_detail(w, p_a).value;
}

// ---------------------------------------------------------------------------
// Continuity bound.

/// Energy-constrained continuity bound at output energy P_B = 2 P_A + 2 P_E:
///   28 sqrt(eps) g(4 P_B / sqrt(eps) + 1/2) + 3 g(sqrt(eps) + 1/2).
inline double continuity_bound(double epsilon, double p_b) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("continuity_bound: epsilon must be positive");
  }
  if (p_b < 0.0) throw std::invalid_argument("continuity_bound: P_B must be >= 0");
  const double r = std::sqrt(epsilon);
  return 28.0 * r * g_entropy(4.0 * p_b / r + 0.5) + 3.0 * g_entropy(r + 0.5);
}

}  // namespace gausscap
