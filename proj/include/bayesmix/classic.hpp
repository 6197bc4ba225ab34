#pragma once

// The historical analyses: linkage between two genes, confirmation of a
// general law after an unbroken run, finite-population succession, the
// two-proportion contingency test, and the growth of the critical
// deviation with sample size.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bayesmix/error.hpp"
#include "bayesmix/evidence.hpp"
#include "bayesmix/model.hpp"
#include "bayesmix/numerics.hpp"
#include "bayesmix/posterior.hpp"

namespace bayesmix {

struct LinkageReport {
  BinomialObservation observation;
  ModelComparison comparison;
  MixturePosterior posterior;
  /// Absent when the same-chromosome posterior has no interior mode.
  std::optional<NormalApproximation> approx;
  double expectation;
  /// ln P(M_i) P(D | M_i).
  LogValue weighted_log_evidence_0;
  LogValue weighted_log_evidence_1;
};

/// Two-model analysis of one binomial sample: comparison, mixture
/// posterior, Laplace approximation of the second component, and the
/// model-averaged expectation.
inline LinkageReport linkage_analysis(const BinomialObservation& obs, const MixturePrior& prior) {
  auto comparison = compare(obs, prior);
  auto posterior = mixture_posterior(obs, prior);
  std::optional<NormalApproximation> approx;
  try {
    approx = normal_approximation(posterior[1]);
  } catch (const DomainError&) {
    approx.reset();
  }
  const double expectation = posterior_mean(posterior);
  const LogValue w0 = LogValue::from_linear(prior[0].weight) * comparison.log_ml_0;
  const LogValue w1 = LogValue::from_linear(prior[1].weight) * comparison.log_ml_1;
  return LinkageReport{obs, comparison, std::move(posterior), approx, expectation, w0, w1};
}

/// Linkage analysis under the 11/12 different-chromosome prior.
inline LinkageReport haldane_linkage(const BinomialObservation& obs) {
  return linkage_analysis(obs, haldane_linkage_prior());
}

/// Posterior probability that θ = 0 after n trials without a success:
///
///   k / (k + ∫ (1-x)^n g(x) dx),   g = (1-k) f,
///
/// with f normalized to 1 (the historical form writes g directly, with
/// ∫ g = 1 - k). The integral is taken by adaptive quadrature; beta
/// priors, which may be unbounded at the ends, use their conjugate form.
inline double law_confirmation(std::uint64_t n, double k, const ContinuousPrior& f) {
  if (!(k > 0.0 && k < 1.0)) {
    throw DomainError("law_confirmation: k must lie in (0,1), got " + std::to_string(k));
  }
  const KernelExponents e{0.0, static_cast<double>(n)};
  LogValue integral;
  if (f.is_beta()) {
    integral = detail::log_kernel_integral(f, e);
  } else {
    integral = integrate_density([&f](double t) { return f.density(t); }, f.support(), e,
                                 f.breakpoints());
  }
  const LogValue spike = LogValue::from_linear(k);
  const LogValue slab = LogValue::from_linear(1.0 - k) * integral;
  return std::exp(spike.value - log_sum_exp({spike, slab}).value);
}

enum class Support { Null, Alternative, Neither };

inline const char* to_string(Support s) {
  switch (s) {
    case Support::Null:
      return "M0";
    case Support::Alternative:
      return "M1";
    case Support::Neither:
      return "neither";
  }
  return "?";
}

struct TwoProportionReport {
  ContingencyTable table;
  /// ln (x0+x1)! (y0+y1)! / (x0+x1+y0+y1+1)!
  LogValue log_post_0;
  /// ln [x0! y0! / (x0+y0+1)!] [x1! y1! / (x1+y1+1)!]
  LogValue log_post_1;
  double prior_odds = 1.0;
  double log_bayes_factor_01 = 0.0;
  double log_posterior_odds_01 = 0.0;
  double posterior_odds_01 = 1.0;
  /// Which model the Bayes factor favours (ratio above or below 1).
  Support supports = Support::Neither;
};

/// Common-proportion model against independent proportions, each with
/// uniform priors. The factorial ratios are the beta integrals
/// ∫ θ^x (1-θ)^y dθ = x! y! / (x+y+1)!.
inline TwoProportionReport jeffreys_two_proportion(const ContingencyTable& t, double prior_odds = 1.0) {
  if (!(prior_odds > 0.0)) {
    throw DomainError("jeffreys_two_proportion: prior_odds must be positive");
  }
  auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  TwoProportionReport r;
  r.table = t;
  r.log_post_0 = log_beta(d(t.x0 + t.x1) + 1.0, d(t.y0 + t.y1) + 1.0);
  r.log_post_1 = log_beta(d(t.x0) + 1.0, d(t.y0) + 1.0) * log_beta(d(t.x1) + 1.0, d(t.y1) + 1.0);
  r.prior_odds = prior_odds;
  r.log_bayes_factor_01 = r.log_post_0.value - r.log_post_1.value;
  r.log_posterior_odds_01 = r.log_bayes_factor_01 + std::log(prior_odds);
  r.posterior_odds_01 = std::exp(r.log_posterior_odds_01);
  if (r.log_bayes_factor_01 > 0.0) {
    r.supports = Support::Null;
  } else if (r.log_bayes_factor_01 < 0.0) {
    r.supports = Support::Alternative;
  }
  return r;
}

/// Exact fraction with a double view.
struct Fraction {
  std::uint64_t numerator;
  std::uint64_t denominator;

  double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// P(all n members have the property | a sample of m all have it), under
/// a uniform prior on how many of the n do: (m+1)/(n+1), reduced.
inline Fraction broad_succession(std::uint64_t m, std::uint64_t n) {
  if (m > n) {
    throw DomainError("broad_succession: sample size m (" + std::to_string(m) +
                      ") exceeds population size n (" + std::to_string(n) + ")");
  }
  const std::uint64_t num = m + 1;
  const std::uint64_t den = n + 1;
  const std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

/// ln BF01 for a point null θ0 against uniform(0,1), a successes in n.
inline double point_vs_uniform_log_bayes_factor(std::uint64_t n, std::uint64_t a, double theta0) {
  const BinomialObservation obs(a, n);
  return log_marginal_likelihood(obs, PointMass{theta0}).value -
         log_marginal_likelihood(obs, ContinuousPrior::uniform(0.0, 1.0)).value;
}

struct LindleyCrossing {
  std::uint64_t critical_a;
  double critical_z;
  double log_bf_01;
};

struct LindleyPoint {
  std::uint64_t n;
  /// Empty when the posterior odds never drop below 1 for any a in [0, n].
  std::optional<LindleyCrossing> crossing;
};

/// Smallest standardized deviation |a - nθ0| / sqrt(nθ0(1-θ0)) at which
/// the posterior odds of the point null fall below 1.
///
/// Scans a outward from nθ0 by increasing |a - nθ0|; equal distances
/// visit the smaller a first.
inline LindleyPoint lindley_critical(std::uint64_t n, double theta0, double prior_odds) {
  if (n == 0) throw DomainError("lindley_sweep: n must be positive");
  if (!(theta0 > 0.0 && theta0 < 1.0)) {
    throw DomainError("lindley_sweep: theta0 must lie in (0,1), got " + std::to_string(theta0));
  }
  if (!(prior_odds > 0.0)) throw DomainError("lindley_sweep: prior_odds must be positive");

  const double center = static_cast<double>(n) * theta0;
  const double se = std::sqrt(static_cast<double>(n) * theta0 * (1.0 - theta0));
  const double log_prior_odds = std::log(prior_odds);

  // below walks down from floor(center), above walks up from floor(center)+1.
  std::int64_t below = static_cast<std::int64_t>(std::floor(center));
  std::int64_t above = below + 1;
  const auto last = static_cast<std::int64_t>(n);
  LindleyPoint out{n, std::nullopt};
  while (below >= 0 || above <= last) {
    std::int64_t a;
    if (below < 0) {
      a = above++;
    } else if (above > last) {
      a = below--;
    } else if (center - static_cast<double>(below) <= static_cast<double>(above) - center) {
      a = below--;
    } else {
      a = above++;
    }
    const auto ua = static_cast<std::uint64_t>(a);
    const double lbf = point_vs_uniform_log_bayes_factor(n, ua, theta0);
    if (lbf + log_prior_odds < 0.0) {
      out.crossing = LindleyCrossing{ua, std::fabs(static_cast<double>(a) - center) / se, lbf};
      return out;
    }
  }
  return out;
}

/// lindley_critical for each n, in input order.
inline std::vector<LindleyPoint> lindley_sweep(std::span<const std::uint64_t> n_values, double theta0,
                                               double prior_odds) {
  std::vector<LindleyPoint> out;
  out.reserve(n_values.size());
  for (auto n : n_values) out.push_back(lindley_critical(n, theta0, prior_odds));
  return out;
}

}  // namespace bayesmix
