#pragma once

// Degradability witnesses for the two-mode unitary family.
//
// Two refutation mechanisms live here, one per parameter regime:
//
//  * Beam splitter (0 < q < 1): if a degrading map Gamma existed with
//    Gamma(N(|n><n|)) = N~(|n><n|) on one environment photon, its images of
//    number states would be forced by a triangular recursion
//        Gamma(|n+1><n+1|) = k_{n+1} Gamma_0 + D_{n+1},
//    with Gamma_0 = Gamma(|0><0|) unknown and everything else explicit.
//    Convex combinations chosen so the Gamma_0 terms cancel must map into
//    states; a *negative* diagonal coefficient in such a combination is a
//    witness that no Gamma exists (c_coefficient, min_negativity_scan).
//
//  * Amplifier (q > 1): anti-degradability would make the relative entropy
//    contract from the system pair to the environment pair.  The difference
//    of the two relative entropies has a closed series whose tail is
//    certified by geometric envelopes; driving q toward a designed spectral
//    zero sends the series to -infinity, so slightly above a rational q the
//    certified value drops below zero (relative_entropy_gap,
//    find_violation_near_rational).
//
// Precision policy: the recursion's pivot p_0(n) = (n+1)(1-q)q^n decays to
// ~1e-13 near q = 1/2 and the k's grow to ~1e20 near q = 1, so plain double
// suffers catastrophic cancellation at both ends of the scan range.  Scans
// run in double with condition monitoring (pivot size, coefficient growth,
// near-cancelling pairs; thresholds calibrated against exact arithmetic)
// and escalate to 200-digit floats, or to exact rationals when q is
// recognizably rational; witnesses re-validate through the exact path.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "gausscap/fock.hpp"

namespace gausscap {

/// 200-decimal-digit binary float: the scan's extended-precision tier.
/// 113-bit quads are NOT enough — at q = 0.99 the pair coefficients reach
/// ~1e20 and the |1><1| entries cancel ~40 significant digits beyond them.
using big_float =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<200>>;
using exact_rational = boost::multiprecision::cpp_rational;

/// Image of |n><n| under the putative degrading map, written as
/// k * Gamma_0 + sum_j d[j] |j><j| with Gamma_0 = Gamma(|0><0|) unknown.
template <class T>
struct GammaImageT {
  T k{};
  std::vector<T> d;  // d[j] multiplies |j><j|; empty entries are zero

  T d_at(int j) const {
    return (j >= 0 && j < static_cast<int>(d.size()))
               ? d[static_cast<std::size_t>(j)]
               : T(0);
  }
};

using GammaImage = GammaImageT<double>;

/// abs for mixed scalar types (double and any boost multiprecision number).
inline double abs_value(double x) { return std::abs(x); }
template <class Backend, boost::multiprecision::expression_template_option ET>
boost::multiprecision::number<Backend, ET> abs_value(
    const boost::multiprecision::number<Backend, ET>& x) {
  return boost::multiprecision::abs(x);
}

/// Solve the degrading-map recursion up to level n_max: the constraint
///   sum_l p_l(n) Gamma(|n+1-l><n+1-l|) = sum_l p_l(n) |l><l|,
/// with p_l(n) = bs_output_weights_t(q, n), is triangular in the images, so
/// each Gamma(|n+1><n+1|) follows from the earlier ones by dividing through
/// p_0(n).  Exact for rational scalar types.  Every image satisfies
/// k_n + sum_j d_n[j] = 1 (trace preservation), which the tests pin.
template <class T>
std::vector<GammaImageT<T>> solve_gamma_recursion_t(const T& q, int n_max) {
  if (!(q > T(0)) || !(q < T(1))) {
    throw std::invalid_argument(
        "solve_gamma_recursion: q must lie strictly inside (0, 1)");
  }
  if (n_max < 0) {
    throw std::invalid_argument("solve_gamma_recursion: n_max must be >= 0");
  }
  std::vector<GammaImageT<T>> images;
  images.reserve(static_cast<std::size_t>(n_max) + 1);
  images.push_back(GammaImageT<T>{T(1), {}});  // Gamma(|0><0|) = Gamma_0

  for (int n = 0; n < n_max; ++n) {
    const std::vector<T> p = bs_output_weights_t<T>(q, n);
    const T& pivot = p[0];
    // Exact scalar types only need the pivot nonzero; floating types lose
    // the level outright once the divisor sinks near roundoff.
    const bool degenerate = std::numeric_limits<T>::is_exact
                                ? pivot == T(0)
                                : abs_value(pivot) < T(1e-13);
    if (degenerate) {
      throw std::runtime_error(
          "solve_gamma_recursion: pivot p_0(n) too small at level " +
          std::to_string(n));
    }
    GammaImageT<T> next;
    next.d.assign(static_cast<std::size_t>(n) + 2, T(0));
    // Target side: sum_l p_l |l><l|.
    for (int l = 0; l <= n + 1; ++l) {
      next.d[static_cast<std::size_t>(l)] = p[static_cast<std::size_t>(l)];
    }
    // Move the already-known images across.
    next.k = T(0);
    for (int l = 1; l <= n + 1; ++l) {
      const GammaImageT<T>& prev = images[static_cast<std::size_t>(n + 1 - l)];
      const T& w = p[static_cast<std::size_t>(l)];
      next.k -= w * prev.k;
      for (std::size_t j = 0; j < prev.d.size(); ++j) {
        next.d[j] -= w * prev.d[j];
      }
    }
    next.k /= pivot;
    for (T& v : next.d) v /= pivot;
    images.push_back(std::move(next));
  }
  return images;
}

inline std::vector<GammaImage> solve_gamma_recursion(double q, int n_max) {
  return solve_gamma_recursion_t<double>(q, n_max);
}

/// Worst |k_n + sum_j d_n[j] - 1| over the images: trace preservation defect.
inline double gamma_trace_defect(const std::vector<GammaImage>& images) {
  double worst = 0.0;
  for (const GammaImage& im : images) {
    double sum = im.k;
    for (double v : im.d) sum += v;
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

/// Negativity coefficient of the pair (n, m): in the convex combination of
/// Gamma(|n><n|) and Gamma(|m><m|) weighted to cancel the unknown Gamma_0
/// (possible exactly when k_n k_m <= 0 with k_n != k_m), the coefficient of
/// |1><1| is
///     c(n, m) = (k_m d_n[1] - k_n d_m[1]) / (k_m - k_n).
/// A value < 0 certifies that no degrading map exists at this q.
template <class T>
T c_from_images_t(const std::vector<GammaImageT<T>>& images, int n, int m) {
  if (n < 0 || m < 0 ||
      n >= static_cast<int>(images.size()) ||
      m >= static_cast<int>(images.size()) || n == m) {
    throw std::invalid_argument("c_from_images: pair outside the recursion");
  }
  const T& kn = images[static_cast<std::size_t>(n)].k;
  const T& km = images[static_cast<std::size_t>(m)].k;
  if (kn * km > T(0)) {
    throw std::invalid_argument(
        "c_from_images: k_n and k_m have the same sign; Gamma_0 cannot be "
        "cancelled by a convex combination");
  }
  const T den = km - kn;
  if (abs_value(den) < T(1e-13)) {
    throw std::invalid_argument("c_from_images: k_m - k_n is numerically zero");
  }
  const T dn1 = images[static_cast<std::size_t>(n)].d_at(1);
  const T dm1 = images[static_cast<std::size_t>(m)].d_at(1);
  return (km * dn1 - kn * dm1) / den;
}

/// Convenience double front-end: run the recursion to max(n, m) and report
/// c(n, m).
inline double c_coefficient(double q, int n, int m) {
  const auto images = solve_gamma_recursion(q, std::max(n, m));
  return c_from_images_t<double>(images, n, m);
}

/// Same value through 200-digit floats, for cross-validation / escalation.
inline double c_coefficient_precise(double q, int n, int m) {
  const auto images =
      solve_gamma_recursion_t<big_float>(big_float(q), std::max(n, m));
  return static_cast<double>(c_from_images_t<big_float>(images, n, m));
}

/// Exact-rational evaluation at q = num/den.
inline double c_coefficient_rational(std::int64_t num, std::int64_t den,
                                     int n, int m) {
  const exact_rational q = exact_rational(num) / exact_rational(den);
  const auto images = solve_gamma_recursion_t<exact_rational>(q, std::max(n, m));
  return static_cast<double>(c_from_images_t<exact_rational>(images, n, m));
}

/// The three coefficients of the combination
///   ((1-q)/q) Gamma(|1><1|) + (2(1-q)^2/(2q^2-1)) Gamma(|2><2|)
/// on |2><2|, |1><1|, |0><0| respectively (the Gamma_0 parts cancel).  On
/// the window (1/sqrt 2, 1/2 + sqrt(3)/6) the signs are (+, -, +): the
/// middle one being negative is the explicit no-degrading-map certificate.
inline std::array<double, 3> prop_sign_coefficients(double q) {
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument("prop_sign_coefficients: q must be in (0, 1)");
  }
  const double on2 = 2.0 * (1.0 - q) * (1.0 - q) / (2.0 * q * q - 1.0);
  const double on1 =
      1.0 + std::pow(1.0 - 2.0 * q, 3) / (q * (2.0 * q * q - 1.0));
  const double on0 = (1.0 - q) / q + (1.0 - q) * (-1.0 + 6.0 * q - 6.0 * q * q) /
                                         (q * (2.0 * q * q - 1.0));
  return {on2, on1, on0};
}

/// Try to recognize q as a small-denominator rational (for exact
/// re-validation); returns (num, den) in lowest terms when q * den is an
/// integer to within 1e-12.
inline std::optional<std::pair<std::int64_t, std::int64_t>> rationalize(
    double q, std::int64_t den = 10000) {
  const double scaled = q * static_cast<double>(den);
  const double rounded = std::nearbyint(scaled);
  if (std::abs(scaled - rounded) > 1e-12 * den) return std::nullopt;
  std::int64_t num = static_cast<std::int64_t>(rounded);
  const std::int64_t g = std::gcd(num, den);
  return std::make_pair(num / g, den / g);
}

/// Which arithmetic produced a scan result.
enum class ScanArithmetic { plain, extended, exact };

inline const char* to_string(ScanArithmetic a) {
  switch (a) {
    case ScanArithmetic::plain: return "double";
    case ScanArithmetic::extended: return "bigfloat";
    case ScanArithmetic::exact: return "rational";
  }
  return "unknown";
}

/// Result of scanning all admissible pairs for the most negative c(n, m).
struct NegativityScan {
  bool found = false;  // any admissible pair at all
  double value = 0.0;  // minimum c over admissible pairs
  int n = -1, m = -1;  // argmin pair
  ScanArithmetic arithmetic = ScanArithmetic::plain;
};

namespace detail {

template <class T>
void scan_pairs(const std::vector<GammaImageT<T>>& images, int n_max,
                NegativityScan& out) {
  for (int n = 1; n <= n_max; ++n) {
    for (int m = 0; m < n; ++m) {
      const T& kn = images[static_cast<std::size_t>(n)].k;
      const T& km = images[static_cast<std::size_t>(m)].k;
      if (!(kn * km < T(0))) continue;
      const double c = static_cast<double>(c_from_images_t<T>(images, n, m));
      if (!out.found || c < out.value) {
        out.found = true;
        out.value = c;
        out.n = n;
        out.m = m;
      }
    }
  }
}

}  // namespace detail

/// Minimize c(n, m) over pairs 0 <= m < n <= n_max with k_n k_m < 0.
///
/// Arithmetic tiers (thresholds calibrated against exact rationals over the
/// grid q = 0.51..0.99, n_max = 50): plain double is provably adequate while
/// every pivot p_0(n) = (n+1)(1-q)q^n stays above 1e-9, the k's stay below
/// 1e6 and no admissible pair nearly cancels (gap >= 1e-8); outside that, q
/// is re-run through exact rationals when it is recognizably rational, else
/// through 200-digit floats (which reproduce the exact values everywhere on
/// the calibration grid).  Double's failures are dramatic, not subtle: at
/// q = 0.99 it reports a spurious minimum near -4e5 where the exact minimum
/// is +0.1488.
inline NegativityScan min_negativity_scan(double q, int n_max = 50) {
  NegativityScan out;

  double min_pivot = std::numeric_limits<double>::infinity();
  double pw = 1.0;  // q^n
  for (int n = 0; n < n_max; ++n, pw *= q) {
    min_pivot = std::min(min_pivot, (n + 1) * (1.0 - q) * pw);
  }
  bool escalate = min_pivot < 1e-9;

  std::vector<GammaImage> images;
  if (!escalate) {
    images = solve_gamma_recursion(q, n_max);
    double max_k = 0.0;
    for (const GammaImage& im : images) {
      max_k = std::max(max_k, std::abs(im.k));
    }
    escalate = max_k > 1e6;
    for (int n = 1; n <= n_max && !escalate; ++n) {
      for (int m = 0; m < n; ++m) {
        const double kn = images[static_cast<std::size_t>(n)].k;
        const double km = images[static_cast<std::size_t>(m)].k;
        if (kn * km >= 0.0) continue;
        if (std::abs(kn + km) < 1e-8 || std::abs(kn - km) < 1e-8) {
          escalate = true;
          break;
        }
      }
    }
  }

  if (!escalate) {
    out.arithmetic = ScanArithmetic::plain;
    detail::scan_pairs<double>(images, n_max, out);
    return out;
  }

  if (const auto frac = rationalize(q)) {
    out.arithmetic = ScanArithmetic::exact;
    const exact_rational qr =
        exact_rational(frac->first) / exact_rational(frac->second);
    const auto exact_images = solve_gamma_recursion_t<exact_rational>(qr, n_max);
    detail::scan_pairs<exact_rational>(exact_images, n_max, out);
    return out;
  }

  out.arithmetic = ScanArithmetic::extended;
  const auto big_images = solve_gamma_recursion_t<big_float>(big_float(q), n_max);
  detail::scan_pairs<big_float>(big_images, n_max, out);
  return out;
}

/// Preset (n, m) pair and label used for the first figure's piecewise curve:
/// the caption tracks c(k_4, -k_2) on [1/2, 1/sqrt 2), c(k_2, -k_1) on
/// [1/sqrt 2, 1/2 + sqrt(3)/6), and c(-k_4, k_2) beyond.
struct Fig1Preset {
  int n = 0, m = 0;
  const char* label = "";
};

inline Fig1Preset fig1_preset(double q) {
  const double r2 = 1.0 / std::sqrt(2.0);
  const double q_star = 0.5 + std::sqrt(3.0) / 6.0;
  if (!(q >= 0.5) || !(q < 1.0)) {
    throw std::invalid_argument("fig1_preset: q must lie in [0.5, 1)");
  }
  if (q < r2) return {4, 2, "c(k4,-k2)"};
  if (q < q_star) return {2, 1, "c(k2,-k1)"};
  return {4, 2, "c(-k4,k2)"};
}

// ---------------------------------------------------------------------------
// Amplifier side: relative-entropy gap with certified tail.
// ---------------------------------------------------------------------------

/// Certified evaluation of
///   gap = A_{m1} ln(A_{m2} / c_{m2, m1-m2-1})
///         + sum_{n>=0} c_{m1,n} ln(c_{m2,n} / c_{m2,n+m1-m2}),
/// where A_m = m(q-1)/q^{m+1}; anti-degradability of the gain-q amplifier
/// would force gap >= 0, so a certified negative value is a witness.  The
/// series is summed to `truncation` terms; the remainder is bracketed by
/// [tail_lo, tail_hi] from monotone envelopes of the log-ratio (valid for
/// n >= truncation, which must exceed m2(q-1) + m1) times the exact
/// leftover weight 1 - A_{m1} - (partial c_{m1,n} mass).
/// Witness threshold: anything in (-1e-7, 0) is treated as inconclusive.
inline constexpr double kWitnessTol = -1e-7;

struct GapResult {
  double partial = 0.0;   // first term + truncated series
  double tail_lo = 0.0;   // certified bounds on the dropped remainder
  double tail_hi = 0.0;
  int truncation = 0;
  bool minus_infinity = false;  // support violation in the environment pair
  bool plus_infinity = false;   // support violation in the system pair
  int violation_level = -1;     // series index where a support zero was hit

  // Both flags set means both relative entropies diverge and the difference
  // is indeterminate: the interval is then the whole line, and the result
  // certifies nothing.  A pure minus_infinity IS a witness.
  double lo() const {
    if (minus_infinity) return -std::numeric_limits<double>::infinity();
    if (plus_infinity) return std::numeric_limits<double>::infinity();
    return partial + tail_lo;
  }
  double hi() const {
    if (plus_infinity) return std::numeric_limits<double>::infinity();
    if (minus_infinity) return -std::numeric_limits<double>::infinity();
    return partial + tail_hi;
  }
  double width() const { return hi() - lo(); }
  bool is_witness() const {
    return minus_infinity ? !plus_infinity : hi() < kWitnessTol;
  }
};

inline GapResult relative_entropy_gap(double q, int m1, int m2, int truncation) {
  if (!(q > 1.0)) {
    throw std::invalid_argument("relative_entropy_gap: q must exceed 1");
  }
  if (m2 < 1 || m1 <= m2) {
    throw std::invalid_argument("relative_entropy_gap: need m1 > m2 >= 1");
  }
  const double a2_center = m2 * (q - 1.0);
  const int threshold = static_cast<int>(std::ceil(a2_center + m1)) + 1;
  if (truncation < threshold) {
    throw std::invalid_argument(
        "relative_entropy_gap: truncation " + std::to_string(truncation) +
        " below the certified-tail threshold " + std::to_string(threshold));
  }

  GapResult res;
  res.truncation = truncation;
  const int delta = m1 - m2;
  const double atom1 = m1 * (q - 1.0) / std::pow(q, m1 + 1);
  const double atom2 = m2 * (q - 1.0) / std::pow(q, m2 + 1);

  // Support scan first, both sides, so coinciding zeros are reported as
  // indeterminate rather than as whichever side happened to be checked
  // first.  The system pair divides by c_{m2, delta-1} (the m1 atom's
  // landing slot) and c_{m2, n+delta}; the environment pair divides by
  // c_{m2, n} wherever the m1 spectrum has weight.
  const double den0 = c_mn(q, m2, delta - 1);
  if (den0 == 0.0) {
    res.plus_infinity = true;
    res.violation_level = -2;
  }
  for (int n = 0; n < truncation; ++n) {
    if (c_mn(q, m1, n) == 0.0) continue;
    if (c_mn(q, m2, n) == 0.0 && !res.minus_infinity) {
      res.minus_infinity = true;
      res.violation_level = n;
    }
    if (c_mn(q, m2, n + delta) == 0.0 && !res.plus_infinity) {
      res.plus_infinity = true;
      res.violation_level = n;
    }
  }
  if (res.minus_infinity || res.plus_infinity) return res;

  double partial = atom1 * std::log(atom2 / den0);
  double mass = 0.0;  // sum of c_{m1,n} over the computed window
  for (int n = 0; n < truncation; ++n) {
    const double w = c_mn(q, m1, n);
    mass += w;
    if (w == 0.0) continue;  // designed zero of the m1 spectrum: term drops
    partial += w * std::log(c_mn(q, m2, n) / c_mn(q, m2, n + delta));
  }
  res.partial = partial;

  // Remainder: leftover weight times monotone bounds on the log-ratio
  // ln(c_{m2,n}/c_{m2,n+delta}) for n >= truncation.  The ratio's factors
  //   f1 = ((n+1-a)/(n+delta+1-a))^2   (increasing toward 1 from below),
  //   f2 = (n+delta+1)/(n+1)           (decreasing toward 1 from above),
  //   f3 = prod_i (n+i)/(n+delta+i)    (increasing toward 1 from below),
  // times the constant (q/(q-1))^delta, give log-ratio bounds valid for the
  // whole remainder.  The leftover weight is exact up to the summation's
  // roundoff (total spectrum mass is exactly 1), so pad its upper end by a
  // small multiple of machine epsilon per summed term.
  const double subtracted = 1.0 - atom1 - mass;
  const double roundoff =
      (truncation + 2) * 4.0 * std::numeric_limits<double>::epsilon();
  const double w_lo = std::max(0.0, subtracted - roundoff);
  const double w_hi = std::max(0.0, subtracted) + roundoff;
  const double nn = static_cast<double>(truncation);
  const double f1 = std::pow((nn + 1.0 - a2_center) /
                                 (nn + delta + 1.0 - a2_center),
                             2);
  double f3 = 1.0;
  for (int i = 1; i <= m2; ++i) f3 *= (nn + i) / (nn + delta + i);
  const double f2 = (nn + delta + 1.0) / (nn + 1.0);
  const double base = delta * std::log(q / (q - 1.0));
  const double rate_lo = std::log(f1 * f3) + base;
  const double rate_hi = std::log(f2) + base;
  res.tail_lo = rate_lo >= 0.0 ? w_lo * rate_lo : w_hi * rate_lo;
  res.tail_hi = rate_hi >= 0.0 ? w_hi * rate_hi : w_lo * rate_hi;
  return res;
}

enum class WitnessKind { negativity, relative_entropy };

inline const char* to_string(WitnessKind k) {
  switch (k) {
    case WitnessKind::negativity: return "negativity";
    case WitnessKind::relative_entropy: return "relative_entropy";
  }
  return "unknown";
}

/// A self-contained certificate that the channel pair at this q is not
/// (anti-)degradable, carrying enough data to recompute the quantity from
/// scratch (see revalidate_witness).
struct DegradabilityWitness {
  double q = 0.0;
  WitnessKind kind = WitnessKind::negativity;
  int n = 0, m = 0;        // negativity pair, or (m1, m2) for the gap
  double value = 0.0;      // c(n, m), or the certified upper gap bound
  double gap_lo = 0.0, gap_hi = 0.0;  // certified interval (gap witnesses)
  int truncation = 0;
  bool support_violation = false;     // gap was -infinity outright
};

/// Recompute a witness's quantity from scratch, in higher precision than the
/// search used, and confirm it still certifies.  Negativity witnesses re-run
/// the recursion through 200-digit floats and, when q is a small rational,
/// exact fractions; gap witnesses re-run the series at twice the truncation.
inline bool revalidate_witness(const DegradabilityWitness& w) {
  if (w.kind == WitnessKind::negativity) {
    const double precise = c_coefficient_precise(w.q, w.n, w.m);
    if (!(precise < kWitnessTol)) return false;
    if (const auto frac = rationalize(w.q)) {
      const double exact =
          c_coefficient_rational(frac->first, frac->second, w.n, w.m);
      if (!(exact < kWitnessTol)) return false;
    }
    return true;
  }
  const GapResult gap = relative_entropy_gap(w.q, w.n, w.m, 2 * w.truncation);
  return gap.is_witness();
}

/// Outcome of the amplifier witness search near a rational gain.
struct FindViolationResult {
  bool found = false;
  DegradabilityWitness witness;
  std::string diagnostics;  // per-epsilon log; filled whether or not found
};

/// Search for an anti-degradability violation of the amplifier near
/// q = x/y (coprime integers, x > y >= 1).  The designed spectral zero sits
/// at series index x-y-1 of the m2 = y spectrum; the probe pair uses the
/// smallest m1 > max(y, x-1) that keeps every denominator of the gap series
/// off that zero — the leading term's denominator index m1-m2-1 hits it
/// exactly when m1 = x, so m1 = x+1.  Each epsilon in the grid evaluates the
/// certified gap at q' = x/y + epsilon with the truncation grown until the
/// remainder interval is narrow; the first certified-negative gap wins.
inline FindViolationResult find_violation_near_rational(
    std::int64_t x, std::int64_t y,
    const std::vector<double>& eps_grid = {1e-3, 1e-4, 1e-5, 1e-6}) {
  if (y < 1 || x <= y) {
    throw std::invalid_argument(
        "find_violation_near_rational: need integers x > y >= 1");
  }
  if (std::gcd(x, y) != 1) {
    throw std::invalid_argument(
        "find_violation_near_rational: x/y must be in lowest terms");
  }
  if (eps_grid.empty()) {
    throw std::invalid_argument(
        "find_violation_near_rational: epsilon grid is empty");
  }
  const double q0 = static_cast<double>(x) / static_cast<double>(y);
  const int m2 = static_cast<int>(y);
  const int m1 = static_cast<int>(x) + 1;

  FindViolationResult out;
  std::ostringstream log;
  log << "pair m1=" << m1 << " m2=" << m2 << " around q=" << x << "/" << y
      << "; designed zero at series index " << (x - y - 1) << "\n";

  for (double eps : eps_grid) {
    if (!(eps > 0.0)) {
      throw std::invalid_argument(
          "find_violation_near_rational: epsilons must be positive");
    }
    const double q = q0 + eps;
    const int threshold =
        static_cast<int>(std::ceil(m2 * (q - 1.0) + m1)) + 1;
    int trunc = std::max(threshold, 64);
    GapResult gap;
    for (;;) {
      gap = relative_entropy_gap(q, m1, m2, trunc);
      if (gap.minus_infinity || gap.plus_infinity) break;
      if (gap.width() <= 1e-6 * std::max(std::abs(gap.partial), 1e-12)) break;
      if (trunc > (1 << 20)) break;
      trunc *= 2;
    }

    if (gap.is_witness()) {
      out.found = true;
      out.witness.q = q;
      out.witness.kind = WitnessKind::relative_entropy;
      out.witness.n = m1;
      out.witness.m = m2;
      out.witness.value = gap.hi();
      out.witness.gap_lo = gap.lo();
      out.witness.gap_hi = gap.hi();
      out.witness.truncation = gap.truncation;
      out.witness.support_violation = gap.minus_infinity;
      log << "eps=" << eps << ": certified gap in [" << gap.lo() << ", "
          << gap.hi() << "] -> witness\n";
      out.diagnostics = log.str();
      return out;
    }
    log << "eps=" << eps << ": gap in [" << gap.lo() << ", " << gap.hi()
        << "] (truncation " << gap.truncation << ") -> not a witness\n";
  }
  log << "grid exhausted without a certified violation\n";
  out.diagnostics = log.str();
  return out;
}

}  // namespace gausscap
