#pragma once

// Brute-force reference computations. Nothing here calls the log-space
// special functions, quadrature, or evidence code: exact results come from
// arbitrary-precision integers and rationals, integrals from fixed
// composite Simpson grids evaluated with libm. They are slow on purpose.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <variant>

#include "bayesmix/error.hpp"
#include "bayesmix/log_value.hpp"
#include "bayesmix/model.hpp"

namespace bayesmix::oracle {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_100;

inline BigInt factorial(std::uint64_t n) {
  BigInt f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) throw DomainError("oracle::binomial: k exceeds n");
  k = std::min(k, n - k);
  BigInt c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

/// Natural log of a positive rational, to ~100 decimal digits before the
/// final rounding to double.
inline double log_of(const BigRational& q) {
  if (q <= 0) throw DomainError("oracle::log_of: argument must be positive");
  const BigFloat num(boost::multiprecision::numerator(q));
  const BigFloat den(boost::multiprecision::denominator(q));
  return static_cast<double>(log(num) - log(den));
}

inline double to_double(const BigRational& q) {
  return static_cast<double>(BigFloat(boost::multiprecision::numerator(q)) /
                             BigFloat(boost::multiprecision::denominator(q)));
}

/// Exact B(a, b) = (a-1)! (b-1)! / (a+b-1)! for positive integers.
inline BigRational beta_integer(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) throw DomainError("oracle::beta_integer: arguments must be positive");
  return BigRational(factorial(a - 1) * factorial(b - 1), factorial(a + b - 1));
}

/// Posterior odds of a common proportion against two independent ones,
/// uniform priors and even prior odds, as a reduced fraction.
inline BigRational exact_two_proportion_odds(const ContingencyTable& t) {
  if (t.total() > 500) throw DomainError("exact_two_proportion_odds: total exceeds 500");
  const BigRational null_term(factorial(t.x0 + t.x1) * factorial(t.y0 + t.y1),
                              factorial(t.total() + 1));
  const BigRational alt_term =
      BigRational(factorial(t.x0) * factorial(t.y0), factorial(t.x0 + t.y0 + 1)) *
      BigRational(factorial(t.x1) * factorial(t.y1), factorial(t.x1 + t.y1 + 1));
  return null_term / alt_term;
}

/// P(r = n | m sampled, all with the property) under a uniform prior on
/// r in 0..n, by summing the hypergeometric likelihoods C(r,m)/C(n,m).
inline BigRational enumerate_succession(std::uint64_t m, std::uint64_t n) {
  if (m > n || n > 200) throw DomainError("enumerate_succession: need 0 <= m <= n <= 200");
  BigInt evidence = 0;
  for (std::uint64_t r = m; r <= n; ++r) evidence += binomial(r, m);
  return BigRational(binomial(n, m), evidence);
}

/// BF01 = C(n,a) θ0^a (1-θ0)^(n-a) / (1/(n+1)) for a rational θ0.
inline BigRational exact_point_vs_uniform_bayes_factor(std::uint64_t n, std::uint64_t a,
                                                       const BigRational& theta0) {
  if (a > n) throw DomainError("exact_point_vs_uniform_bayes_factor: a exceeds n");
  BigRational like = BigRational(binomial(n, a));
  const BigRational fail = 1 - theta0;
  for (std::uint64_t i = 0; i < a; ++i) like *= theta0;
  for (std::uint64_t i = 0; i < n - a; ++i) like *= fail;
  return like * (n + 1);
}

using DensityFn = std::function<double(double)>;

inline constexpr std::uint64_t kMinGrid = 1000;

/// Composite Simpson on [lo, hi] with `panels` (rounded up to even) of
/// exp(log_f(θ) - peak), where peak is the largest grid value. Returns the
/// log of the integral.
inline double simpson_log_integral(const std::function<double(double)>& log_f, double lo, double hi,
                                   std::uint64_t panels) {
  if (panels % 2 == 1) ++panels;
  const double h = (hi - lo) / static_cast<double>(panels);
  std::vector<double> logs(panels + 1);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i <= panels; ++i) {
    const double t = i == panels ? hi : lo + h * static_cast<double>(i);
    logs[i] = log_f(t);
    peak = std::max(peak, logs[i]);
  }
  if (peak == -std::numeric_limits<double>::infinity()) return peak;
  double sum = 0.0;
  for (std::uint64_t i = 0; i <= panels; ++i) {
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::exp(logs[i] - peak);
  }
  return peak + std::log(sum * h / 3.0);
}

inline double libm_log_choose(std::uint64_t n, std::uint64_t k) {
  const auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  return std::lgamma(d(n) + 1.0) - std::lgamma(d(k) + 1.0) - std::lgamma(d(n - k) + 1.0);
}

inline double log_binomial_kernel(double theta, double a, double b) {
  const double s = a == 0.0 ? 0.0 : a * std::log(theta);
  const double f = b == 0.0 ? 0.0 : b * std::log(1.0 - theta);
  return s + f;
}

/// Density of a continuous prior evaluated with libm only (the beta
/// normalizer through std::lgamma).
inline DensityFn density_of(const ContinuousPrior& prior) {
  if (const auto* be = std::get_if<ContinuousPrior::Beta>(&prior.kind())) {
    const double alpha = be->alpha;
    const double beta = be->beta;
    const double log_norm = std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta);
    return [=](double t) {
      if (t <= 0.0 || t >= 1.0) return 0.0;
      return std::exp((alpha - 1.0) * std::log(t) + (beta - 1.0) * std::log(1.0 - t) - log_norm);
    };
  }
  return [prior](double t) { return prior.density(t); };
}

/// ln ∫ C(n,a) θ^a (1-θ)^(n-a) f(θ) dθ over [lo, hi] on a Simpson grid.
inline LogValue grid_log_evidence(const BinomialObservation& obs, const DensityFn& density, double lo,
                                  double hi, std::uint64_t grid_size) {
  if (grid_size < kMinGrid) {
    throw DomainError("grid_log_evidence: grid_size must be at least " + std::to_string(kMinGrid));
  }
  if (!(lo < hi)) throw DomainError("grid_log_evidence: empty interval");
  const auto a = static_cast<double>(obs.successes());
  const auto b = static_cast<double>(obs.failures());
  const double log_int = simpson_log_integral(
      [&](double t) {
        const double f = density(t);
        if (f <= 0.0) return -std::numeric_limits<double>::infinity();
        return log_binomial_kernel(t, a, b) + std::log(f);
      },
      lo, hi, grid_size);
  return LogValue{libm_log_choose(obs.trials(), obs.successes()) + log_int};
}

/// Same, for a prior component; a point mass has no grid representation.
inline LogValue grid_log_evidence(const BinomialObservation& obs, const ComponentLaw& law,
                                  std::uint64_t grid_size) {
  if (std::holds_alternative<PointMass>(law)) {
    throw DomainError("grid_log_evidence: point masses cannot be integrated on a grid");
  }
  const auto& prior = std::get<ContinuousPrior>(law);
  const auto support = prior.support();
  return grid_log_evidence(obs, density_of(prior), support.lo, support.hi, grid_size);
}

/// E[θ | D] for a continuous prior, as a ratio of two Simpson grids.
inline double grid_posterior_mean(const BinomialObservation& obs, const DensityFn& density, double lo,
                                  double hi, std::uint64_t grid_size) {
  const auto a = static_cast<double>(obs.successes());
  const auto b = static_cast<double>(obs.failures());
  auto log_f = [&](double extra) {
    return [&, extra](double t) {
      const double f = density(t);
      if (f <= 0.0) return -std::numeric_limits<double>::infinity();
      return log_binomial_kernel(t, a + extra, b) + std::log(f);
    };
  };
  return std::exp(simpson_log_integral(log_f(1.0), lo, hi, grid_size) -
                  simpson_log_integral(log_f(0.0), lo, hi, grid_size));
}

/// ln of the two-proportion posterior odds from the likelihood integrals
/// themselves: ∫ θ^(x0+x1) (1-θ)^(y0+y1) dθ under the common-proportion
/// model against ∫∫ θ0^x0 (1-θ0)^y0 θ1^x1 (1-θ1)^y1 dθ0 dθ1. The double
/// integral uses the tensor-product Simpson rule; the integrand separates,
/// so the tensor sum is the product of the two one-dimensional sums.
inline double quadrature_two_proportion_log_odds(const ContingencyTable& t,
                                                 std::uint64_t grid_size = 2000) {
  auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  auto kernel = [](double a, double b) {
    return [a, b](double th) { return log_binomial_kernel(th, a, b); };
  };
  const double common = simpson_log_integral(kernel(d(t.x0 + t.x1), d(t.y0 + t.y1)), 0.0, 1.0, grid_size);
  const double first = simpson_log_integral(kernel(d(t.x0), d(t.y0)), 0.0, 1.0, grid_size);
  const double second = simpson_log_integral(kernel(d(t.x1), d(t.y1)), 0.0, 1.0, grid_size);
  return common - (first + second);
}

}  // namespace bayesmix::oracle
