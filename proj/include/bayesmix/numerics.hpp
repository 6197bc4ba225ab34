#pragma once

// Log-space special functions and quadrature. Everything that multiplies or
// integrates likelihoods in this library goes through here, since the
// quantities involved (C(400,160) 2^-400 and friends) underflow in linear
// space long before the sample sizes of interest.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "bayesmix/error.hpp"
#include "bayesmix/log_value.hpp"

namespace bayesmix {

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Stirling series for ln Gamma(x), x >= kStirlingFloor:
//
//   ln Gamma(x) = (x - 1/2) ln x - x + ln(2 pi)/2 + sum_k B_2k / (2k (2k-1) x^(2k-1))
//
// The coefficients are the exact rationals B_2k / (2k(2k-1)) for k = 1..8,
// B_2..B_16 = 1/6, -1/30, 1/42, -1/30, 5/66, -691/2730, 7/6, -3617/510.
// At x >= 15 the first omitted term (k = 9, |B_18/306| x^-17 ~ 0.18 x^-17)
// is below 2e-21, under the resolution of the 64-bit-mantissa long double
// the series is evaluated in. Arguments below the floor are shifted up with
// Gamma(x+1) = x Gamma(x). On targets where long double is plain double
// the result loses roughly two digits.
inline constexpr long double kStirlingFloor = 15.0L;
inline constexpr long double kStirlingCoeffs[] = {
    1.0L / 12.0L,        -1.0L / 360.0L,     1.0L / 1260.0L,  -1.0L / 1680.0L,
    1.0L / 1188.0L,      -691.0L / 360360.0L, 1.0L / 156.0L,   -3617.0L / 122400.0L,
};
inline constexpr long double kHalfLogTwoPi =
    0.918938533204672741780329736405617639861397473637783412817151540L;

inline long double log_gamma_ext(long double x) {
  if (x == 1.0L || x == 2.0L) return 0.0L;
  long double shift = 1.0L;
  while (x < kStirlingFloor) {
    shift *= x;
    x += 1.0L;
  }
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  long double series = 0.0L;
  for (auto it = std::rbegin(kStirlingCoeffs); it != std::rend(kStirlingCoeffs); ++it) {
    series = series * inv2 + *it;
  }
  series *= inv;
  return (x - 0.5L) * std::log(x) - x + kHalfLogTwoPi + series - std::log(shift);
}

inline long double log_beta_ext(long double a, long double b) {
  return log_gamma_ext(a) + log_gamma_ext(b) - log_gamma_ext(a + b);
}

inline void require_positive(double v, const char* op, const char* name) {
  if (!(v > 0.0) || std::isnan(v)) {
    throw DomainError(std::string(op) + ": " + name + " must be positive, got " +
                      std::to_string(v));
  }
}

// ln(1 - exp(t)) for t <= 0.
inline double log1m_exp(double t) {
  if (t > -std::numbers::ln2) return std::log(-std::expm1(t));
  return std::log1p(-std::exp(t));
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
inline LogValue log_gamma(double x) {
  detail::require_positive(x, "log_gamma", "x");
  if (std::isinf(x)) return LogValue{detail::kInf};
  return LogValue{static_cast<double>(detail::log_gamma_ext(x))};
}

/// ln C(n, k). Computed on min(k, n-k), so symmetric bit for bit.
inline LogValue log_binomial_coefficient(std::uint64_t n, std::uint64_t k) {
  if (k > n) {
    throw DomainError("log_binomial_coefficient: k (" + std::to_string(k) + ") exceeds n (" +
                      std::to_string(n) + ")");
  }
  k = std::min(k, n - k);
  if (k == 0) return LogValue::one();
  const auto nl = static_cast<long double>(n);
  const auto kl = static_cast<long double>(k);
  const long double v = detail::log_gamma_ext(nl + 1.0L) - detail::log_gamma_ext(kl + 1.0L) -
                        detail::log_gamma_ext(nl - kl + 1.0L);
  return LogValue{static_cast<double>(v)};
}

/// ln B(a, b).
inline LogValue log_beta(double a, double b) {
  detail::require_positive(a, "log_beta", "a");
  detail::require_positive(b, "log_beta", "b");
  return LogValue{static_cast<double>(detail::log_beta_ext(a, b))};
}

/// ln I_x(a,b) and ln(1 - I_x(a,b)), each computed without cancellation on
/// the side the continued fraction evaluates directly.
struct IncompleteBetaLog {
  LogValue lower;  // ln I_x(a, b)
  LogValue upper;  // ln (1 - I_x(a, b))
};

namespace detail {

inline constexpr double kIncBetaTolerance = 1e-14;
inline constexpr int kIncBetaMaxIterations = 500;

// Continued fraction for I_x(a,b) (modified Lentz). Converges quickly for
// x < (a+1)/(a+b+2); callers swap arguments otherwise.
inline double incomplete_beta_cf(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kIncBetaMaxIterations; ++m) {
    const double md = m;
    const double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kIncBetaTolerance) return h;
  }
  throw NonConvergenceError("regularized_incomplete_beta: continued fraction did not converge in " +
                            std::to_string(kIncBetaMaxIterations) + " iterations (a=" +
                            std::to_string(a) + ", b=" + std::to_string(b) +
                            ", x=" + std::to_string(x) + ")");
}

inline void check_incomplete_beta_args(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("regularized_incomplete_beta: x must lie in [0,1], got " +
                      std::to_string(x));
  }
  require_positive(a, "regularized_incomplete_beta", "a");
  require_positive(b, "regularized_incomplete_beta", "b");
}

}  // namespace detail

/// Log-space regularized incomplete beta, both tails.
inline IncompleteBetaLog incomplete_beta_log(double x, double a, double b) {
  detail::check_incomplete_beta_args(x, a, b);
  if (x == 0.0) return {LogValue::zero(), LogValue::one()};
  if (x == 1.0) return {LogValue::one(), LogValue::zero()};

  const long double log_front = static_cast<long double>(a) * std::log(static_cast<long double>(x)) +
                                static_cast<long double>(b) * std::log1p(-static_cast<long double>(x)) -
                                detail::log_beta_ext(a, b);
  if (x <= (a + 1.0) / (a + b + 2.0)) {
    const double lower =
        static_cast<double>(log_front + std::log(static_cast<long double>(detail::incomplete_beta_cf(x, a, b)) / a));
    return {LogValue{lower}, LogValue{detail::log1m_exp(lower)}};
  }
  const double upper = static_cast<double>(
      log_front + std::log(static_cast<long double>(detail::incomplete_beta_cf(1.0 - x, b, a)) / b));
  return {LogValue{detail::log1m_exp(upper)}, LogValue{upper}};
}

/// I_x(a, b), the Beta(a, b) CDF at x.
inline double regularized_incomplete_beta(double x, double a, double b) {
  const auto parts = incomplete_beta_log(x, a, b);
  if (parts.lower.value > -std::numbers::ln2) return -std::expm1(parts.upper.value);
  return parts.lower.linear();
}

/// ln Σ exp(t_i), shifted by the maximum.
inline LogValue log_sum_exp(std::span<const LogValue> terms) {
  if (terms.empty()) throw DomainError("log_sum_exp: empty term list");
  const double peak =
      std::max_element(terms.begin(), terms.end(), [](LogValue l, LogValue r) {
        return l.value < r.value;
      })->value;
  if (peak == -detail::kInf) return LogValue::zero();
  if (peak == detail::kInf) return LogValue{detail::kInf};
  double sum = 0.0;
  for (const auto t : terms) sum += std::exp(t.value - peak);
  return LogValue{peak + std::log(sum)};
}

inline LogValue log_sum_exp(std::initializer_list<LogValue> terms) {
  return log_sum_exp(std::span<const LogValue>(terms.begin(), terms.size()));
}

/// ln of the Beta(a, b) probability of [lo, hi], i.e. ln(I_hi - I_lo).
/// Differences are taken on whichever tail keeps both terms small.
inline LogValue log_beta_interval_mass(double lo, double hi, double a, double b) {
  if (!(lo <= hi)) throw DomainError("log_beta_interval_mass: lo must not exceed hi");
  const auto at_hi = incomplete_beta_log(hi, a, b);
  const auto at_lo = incomplete_beta_log(lo, a, b);
  if (at_hi.lower.value <= -std::numbers::ln2) {
    if (at_lo.lower.is_zero()) return at_hi.lower;
    if (at_lo.lower.value >= at_hi.lower.value) return LogValue::zero();
    return LogValue{at_hi.lower.value + detail::log1m_exp(at_lo.lower.value - at_hi.lower.value)};
  }
  if (at_hi.upper.is_zero() && at_lo.upper.is_zero()) return LogValue::zero();
  if (at_hi.upper.is_zero()) return at_lo.upper;
  if (at_hi.upper.value >= at_lo.upper.value) return LogValue::zero();
  return LogValue{at_lo.upper.value + detail::log1m_exp(at_hi.upper.value - at_lo.upper.value)};
}

/// Closed interval inside [0, 1].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Exponents of the binomial kernel θ^successes (1-θ)^failures.
struct KernelExponents {
  double successes = 0.0;
  double failures = 0.0;
};

/// Tolerances for integrate_density. The integrand is rescaled so its
/// sampled peak is 1 before these apply.
struct QuadratureOptions {
  double abs_tolerance = 1e-12;
  double rel_tolerance = 1e-10;
  int max_depth = 60;
  std::size_t max_intervals = 1'000'000;
};

namespace detail {

struct SimpsonPanel {
  double lo, hi;
  double f_lo, f_q1, f_mid, f_q3, f_hi;
  int depth;

  double coarse() const { return (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi); }
  double fine() const { return (hi - lo) / 12.0 * (f_lo + 4.0 * f_q1 + 2.0 * f_mid + 4.0 * f_q3 + f_hi); }
  double error() const { return std::fabs(fine() - coarse()) / 15.0; }
  double estimate() const { return fine() + (fine() - coarse()) / 15.0; }

  bool operator<(const SimpsonPanel& other) const { return error() < other.error(); }
};

template <typename Fn>
SimpsonPanel make_panel(const Fn& g, double lo, double hi, double f_lo, double f_mid, double f_hi,
                        int depth) {
  const double mid = 0.5 * (lo + hi);
  return SimpsonPanel{lo, hi, f_lo, g(0.5 * (lo + mid)), f_mid, g(0.5 * (mid + hi)), f_hi, depth};
}

// Global adaptive Simpson: keep refining the panel with the largest error
// estimate until the summed estimate is within `tolerance`.
template <typename Fn>
double adaptive_simpson(const Fn& g, std::span<const double> cuts, double tolerance,
                        const QuadratureOptions& options) {
  std::priority_queue<SimpsonPanel> heap;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    auto panel = make_panel(g, lo, hi, g(lo), g(0.5 * (lo + hi)), g(hi), 0);
    total_error += panel.error();
    heap.push(panel);
  }
  std::size_t intervals = heap.size();
  while (!heap.empty() && total_error > tolerance) {
    const SimpsonPanel worst = heap.top();
    if (worst.depth >= options.max_depth) {
      throw NonConvergenceError("integrate_density: bisection depth cap " +
                                std::to_string(options.max_depth) + " reached near theta=" +
                                std::to_string(worst.lo));
    }
    if (intervals >= options.max_intervals) {
      throw NonConvergenceError("integrate_density: interval budget exhausted");
    }
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = make_panel(g, worst.lo, mid, worst.f_lo, worst.f_q1, worst.f_mid, worst.depth + 1);
    auto right = make_panel(g, mid, worst.hi, worst.f_mid, worst.f_q3, worst.f_hi, worst.depth + 1);
    total_error += left.error() + right.error() - worst.error();
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Sum from smallest contributions up.
  std::vector<double> parts;
  parts.reserve(heap.size());
  while (!heap.empty()) {
    parts.push_back(heap.top().estimate());
    heap.pop();
  }
  std::sort(parts.begin(), parts.end(), [](double l, double r) { return std::fabs(l) < std::fabs(r); });
  double sum = 0.0;
  for (double p : parts) sum += p;
  return sum;
}

inline double log_kernel(double theta, KernelExponents e) {
  // 0 * ln 0 = 0 at the endpoints.
  const double s = e.successes == 0.0 ? 0.0 : e.successes * std::log(theta);
  const double f = e.failures == 0.0 ? 0.0 : e.failures * std::log1p(-theta);
  return s + f;
}

}  // namespace detail

/// ln ∫_support θ^s (1-θ)^f density(θ) dθ by adaptive Simpson quadrature.
///
/// `density` must be finite and nonnegative on the support. `breakpoints`
/// marks kinks or jumps of the density (grid nodes of a tabulated prior);
/// the panel layout starts from them plus a ladder around the kernel mode.
template <typename Density>
  requires std::invocable<const Density&, double>
LogValue integrate_density(const Density& density, Interval support, KernelExponents exps,
                           std::span<const double> breakpoints = {},
                           const QuadratureOptions& options = {}) {
  if (!(support.lo >= 0.0 && support.hi <= 1.0 && support.lo < support.hi)) {
    throw DomainError("integrate_density: support must satisfy 0 <= lo < hi <= 1");
  }
  if (!(exps.successes >= 0.0 && exps.failures >= 0.0)) {
    throw DomainError("integrate_density: kernel exponents must be nonnegative");
  }

  auto log_integrand = [&](double theta) {
    const double f = density(theta);
    if (!(f >= 0.0) || std::isinf(f)) {
      throw DomainError("integrate_density: density must be finite and nonnegative, got " +
                        std::to_string(f) + " at theta=" + std::to_string(theta));
    }
    if (f == 0.0) return -detail::kInf;
    return detail::log_kernel(theta, exps) + std::log(f);
  };

  std::vector<double> cuts{support.lo, support.hi};
  for (double b : breakpoints) {
    if (b > support.lo && b < support.hi) cuts.push_back(b);
  }
  const double total = exps.successes + exps.failures;
  const double mode = total > 0.0 ? exps.successes / total : 0.5;
  const double spread =
      std::max(std::sqrt(mode * (1.0 - mode) / (total + 1.0)), 1.0 / (total + 2.0));
  for (double k : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    for (double sign : {-1.0, 1.0}) {
      const double c = mode + sign * k * spread;
      if (c > support.lo && c < support.hi) cuts.push_back(c);
    }
  }
  constexpr int kUniformPanels = 8;
  for (int i = 1; i < kUniformPanels; ++i) {
    cuts.push_back(support.lo + support.width() * i / kUniformPanels);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Scale by the largest log-integrand seen on a probe grid.
  double scale = -detail::kInf;
  constexpr int kProbe = 256;
  for (double c : cuts) scale = std::max(scale, log_integrand(c));
  for (int i = 0; i <= kProbe; ++i) {
    scale = std::max(scale, log_integrand(support.lo + support.width() * i / kProbe));
  }
  if (scale == -detail::kInf) {
    // Zero everywhere we looked; a last refinement pass decides.
    scale = 0.0;
  }

  auto g = [&](double theta) {
    const double l = log_integrand(theta);
    return l == -detail::kInf ? 0.0 : std::exp(l - scale);
  };

  double value = detail::adaptive_simpson(g, cuts, options.abs_tolerance, options);
  if (value > 0.0 && options.abs_tolerance > options.rel_tolerance * value) {
    // Absolute tolerance too coarse for this magnitude; tighten to relative.
    value = detail::adaptive_simpson(g, cuts, options.rel_tolerance * value, options);
  }
  if (value <= 0.0) return LogValue::zero();
  return LogValue{scale + std::log(value)};
}

}  // namespace bayesmix
