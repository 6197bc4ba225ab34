#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "bayesmix/error.hpp"
#include "bayesmix/model.hpp"
#include "bayesmix/numerics.hpp"

namespace bayesmix {

/// Two-model comparison, oriented as M0 (first component) over M1.
/// A Bayes factor above 1 favours M0.
struct ModelComparison {
  LogValue log_ml_0;
  LogValue log_ml_1;
  double prior_odds = 1.0;
  double log_bayes_factor_01 = 0.0;
  double log_posterior_odds_01 = 0.0;
  double posterior_odds_01 = 1.0;
  double posterior_prob_0 = 0.5;
  double posterior_prob_1 = 0.5;
};

namespace detail {

// ln ∫ θ^a (1-θ)^b f(θ) dθ for a continuous prior, without the binomial
// coefficient. Uniform and beta priors use the conjugate closed forms; a
// tabulated prior, or a truncated mass that underflows even in log space,
// falls back to quadrature.
inline LogValue log_kernel_integral(const ContinuousPrior& prior, KernelExponents e) {
  const LogValue closed = std::visit(
      [e](const auto& k) -> LogValue {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ContinuousPrior::Uniform>) {
          const double a = e.successes + 1.0;
          const double b = e.failures + 1.0;
          const LogValue mass = (k.lo == 0.0 && k.hi == 1.0)
                                    ? LogValue::one()
                                    : log_beta_interval_mass(k.lo, k.hi, a, b);
          if (mass.is_zero()) return mass;
          return LogValue{log_beta(a, b).value + mass.value - std::log(k.hi - k.lo)};
        } else if constexpr (std::is_same_v<T, ContinuousPrior::Beta>) {
          return LogValue{log_beta(k.alpha + e.successes, k.beta + e.failures).value -
                          log_beta(k.alpha, k.beta).value};
        } else {
          return LogValue::zero();
        }
      },
      prior.kind());
  if (!closed.is_zero()) return closed;
  return integrate_density([&prior](double t) { return prior.density(t); }, prior.support(), e,
                           prior.breakpoints());
}

}  // namespace detail

/// ln P(D | law): the binomial likelihood integrated against one component.
///
/// A point mass that makes the data impossible (θ = 0 with a success,
/// θ = 1 with a failure) yields LogValue::zero() rather than an error.
inline LogValue log_marginal_likelihood(const BinomialObservation& obs, const ComponentLaw& law) {
  const LogValue choose = log_binomial_coefficient(obs.trials(), obs.successes());
  if (const auto* p = std::get_if<PointMass>(&law)) {
    const double theta = p->location;
    const double a = static_cast<double>(obs.successes());
    const double b = static_cast<double>(obs.failures());
    if ((a > 0.0 && theta == 0.0) || (b > 0.0 && theta == 1.0)) return LogValue::zero();
    const double ls = a == 0.0 ? 0.0 : a * std::log(theta);
    const double lf = b == 0.0 ? 0.0 : b * std::log1p(-theta);
    return LogValue{choose.value + ls + lf};
  }
  return choose * detail::log_kernel_integral(std::get<ContinuousPrior>(law), obs.exponents());
}

/// Posterior model probabilities from log prior weights and log marginal
/// likelihoods, normalized with log_sum_exp. The largest weight is set to
/// one minus the rest so the vector sums to 1 to rounding.
inline std::vector<double> posterior_model_weights(std::span<const double> prior_weights,
                                                   std::span<const LogValue> log_mls) {
  if (prior_weights.size() != log_mls.size() || prior_weights.empty()) {
    throw DomainError("posterior_model_weights: mismatched or empty inputs");
  }
  std::vector<LogValue> joint;
  joint.reserve(log_mls.size());
  for (std::size_t i = 0; i < log_mls.size(); ++i) {
    joint.push_back(LogValue::from_linear(prior_weights[i]) * log_mls[i]);
  }
  const LogValue total = log_sum_exp(joint);
  if (total.is_zero()) {
    throw DomainError("the data are impossible under every component of the prior");
  }
  std::vector<double> weights(joint.size());
  std::size_t largest = 0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    weights[i] = std::exp(joint[i].value - total.value);
    if (joint[i].value > joint[largest].value) largest = i;
  }
  double rest = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (i != largest) rest += weights[i];
  }
  weights[largest] = std::max(0.0, 1.0 - rest);
  return weights;
}

/// Posterior odds from prior odds and ln(Bayes factor).
inline double odds_update(double prior_odds, double log_bayes_factor) {
  if (!(prior_odds > 0.0)) throw DomainError("odds_update: prior_odds must be positive");
  return std::exp(log_bayes_factor + std::log(prior_odds));
}

/// ln(posterior odds / prior odds).
inline double bayes_factor_from_odds(double posterior_odds, double prior_odds) {
  if (!(posterior_odds > 0.0)) {
    throw DomainError("bayes_factor_from_odds: posterior_odds must be positive");
  }
  if (!(prior_odds > 0.0)) throw DomainError("bayes_factor_from_odds: prior_odds must be positive");
  return std::log(posterior_odds) - std::log(prior_odds);
}

/// Compares the two components of `prior` on `obs`.
inline ModelComparison compare(const BinomialObservation& obs, const MixturePrior& prior) {
  if (prior.size() != 2) {
    throw DomainError("compare: expected a two-component prior, got " +
                      std::to_string(prior.size()) + " components");
  }
  const double w0 = prior[0].weight;
  const double w1 = prior[1].weight;
  if (!(w0 > 0.0 && w1 > 0.0)) throw DomainError("compare: both prior weights must be positive");

  ModelComparison out;
  out.log_ml_0 = log_marginal_likelihood(obs, prior[0].law);
  out.log_ml_1 = log_marginal_likelihood(obs, prior[1].law);
  if (out.log_ml_0.is_zero() && out.log_ml_1.is_zero()) {
    throw DomainError("compare: the data are impossible under both models");
  }
  out.prior_odds = w0 / w1;
  out.log_bayes_factor_01 = out.log_ml_0.value - out.log_ml_1.value;
  out.log_posterior_odds_01 = out.log_bayes_factor_01 + std::log(out.prior_odds);
  out.posterior_odds_01 = std::exp(out.log_posterior_odds_01);

  const double weights[] = {w0, w1};
  const LogValue mls[] = {out.log_ml_0, out.log_ml_1};
  const auto post = posterior_model_weights(weights, mls);
  out.posterior_prob_0 = post[0];
  out.posterior_prob_1 = post[1];
  return out;
}

}  // namespace bayesmix
