#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bayesmix/error.hpp"
#include "bayesmix/evidence.hpp"
#include "bayesmix/format.hpp"
#include "bayesmix/model.hpp"
#include "bayesmix/numerics.hpp"

namespace bayesmix {

/// Beta(alpha, beta) restricted to [lo, hi] and renormalized.
struct TruncatedBeta {
  double alpha;
  double beta;
  double lo = 0.0;
  double hi = 1.0;

  bool is_full_support() const noexcept { return lo == 0.0 && hi == 1.0; }

  LogValue log_mass() const {
    return is_full_support() ? LogValue::one() : log_beta_interval_mass(lo, hi, alpha, beta);
  }

  /// E[θ] = alpha/(alpha+beta) * P_{alpha+1,beta}[lo,hi] / P_{alpha,beta}[lo,hi].
  double mean() const {
    const double full = alpha / (alpha + beta);
    if (is_full_support()) return full;
    const LogValue num = log_beta_interval_mass(lo, hi, alpha + 1.0, beta);
    const LogValue den = log_mass();
    if (den.is_zero()) throw DomainError("truncated beta: no mass on the truncation interval");
    return full * std::exp(num.value - den.value);
  }
};

/// A tabulated prior tilted by the binomial kernel θ^a (1-θ)^b.
struct TiltedTabulated {
  ContinuousPrior prior;
  KernelExponents exponents;

  double mean() const {
    auto f = [this](double t) { return prior.density(t); };
    const LogValue num = integrate_density(
        f, prior.support(), {exponents.successes + 1.0, exponents.failures}, prior.breakpoints());
    const LogValue den = integrate_density(f, prior.support(), exponents, prior.breakpoints());
    if (den.is_zero()) throw DomainError("tabulated posterior: no mass");
    return std::exp(num.value - den.value);
  }
};

using PosteriorLaw = std::variant<PointMass, TruncatedBeta, TiltedTabulated>;

struct ComponentPosterior {
  double weight = 0.0;
  PosteriorLaw law;
};

inline double component_mean(const PosteriorLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return l.location;
        } else {
          return l.mean();
        }
      },
      law);
}

inline std::string describe(const PosteriorLaw& law) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, PointMass>) {
          return "point(" + format::prob(l.location) + ")";
        } else if constexpr (std::is_same_v<T, TruncatedBeta>) {
          std::string s = "beta(" + format::prob(l.alpha) + ", " + format::prob(l.beta) + ")";
          if (!l.is_full_support()) {
            s += " on [" + format::prob(l.lo) + ", " + format::prob(l.hi) + "]";
          }
          return s;
        } else {
          return "tilted " + l.prior.describe();
        }
      },
      law);
}

class MixturePosterior {
 public:
  explicit MixturePosterior(std::vector<ComponentPosterior> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw DomainError("mixture posterior: no components");
    double sum = 0.0;
    for (const auto& c : components_) {
      if (!(c.weight >= 0.0 && c.weight <= 1.0)) {
        throw DomainError("mixture posterior: weights must lie in [0,1]");
      }
      sum += c.weight;
    }
    if (std::fabs(sum - 1.0) > MixturePrior::kWeightSumTolerance) {
      throw DomainError("mixture posterior: weights sum to " + std::to_string(sum));
    }
  }

  std::span<const ComponentPosterior> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  const ComponentPosterior& operator[](std::size_t i) const { return components_.at(i); }

 private:
  std::vector<ComponentPosterior> components_;
};

struct NormalApproximation {
  double mean;
  double sd;
};

/// Conjugate update of one prior component. Point masses are unchanged by
/// the data; the weight is left at zero for mixture_posterior to fill in.
inline ComponentPosterior update_component(const BinomialObservation& obs,
                                           const PriorComponent& component) {
  const auto a = static_cast<double>(obs.successes());
  const auto b = static_cast<double>(obs.failures());
  ComponentPosterior out;
  if (const auto* p = std::get_if<PointMass>(&component.law)) {
    out.law = *p;
    return out;
  }
  const auto& prior = std::get<ContinuousPrior>(component.law);
  if (const auto* u = std::get_if<ContinuousPrior::Uniform>(&prior.kind())) {
    out.law = TruncatedBeta{a + 1.0, b + 1.0, u->lo, u->hi};
  } else if (const auto* be = std::get_if<ContinuousPrior::Beta>(&prior.kind())) {
    out.law = TruncatedBeta{be->alpha + a, be->beta + b, 0.0, 1.0};
  } else {
    out.law = TiltedTabulated{prior, obs.exponents()};
  }
  return out;
}

/// Posterior over θ for a mixture prior: every component updated, weights
/// replaced by posterior model probabilities.
inline MixturePosterior mixture_posterior(const BinomialObservation& obs, const MixturePrior& prior) {
  std::vector<double> prior_weights;
  std::vector<LogValue> log_mls;
  std::vector<ComponentPosterior> components;
  for (const auto& c : prior.components()) {
    prior_weights.push_back(c.weight);
    log_mls.push_back(c.weight > 0.0 ? log_marginal_likelihood(obs, c.law) : LogValue::zero());
    components.push_back(update_component(obs, c));
  }
  const auto weights = posterior_model_weights(prior_weights, log_mls);
  for (std::size_t i = 0; i < components.size(); ++i) components[i].weight = weights[i];
  return MixturePosterior(std::move(components));
}

/// Model-averaged E[θ | D].
inline double posterior_mean(const MixturePosterior& post) {
  double mean = 0.0;
  for (const auto& c : post.components()) {
    if (c.weight > 0.0) mean += c.weight * component_mean(c.law);
  }
  return mean;
}

/// P(next trial succeeds | D) = Σ P(M_i | D) P(success | M_i, D). Under
/// each component the conditional predictive is E[θ | M_i, D], so this
/// agrees with posterior_mean by total probability.
inline double predictive_next(const MixturePosterior& post) {
  double p = 0.0;
  for (const auto& c : post.components()) {
    if (c.weight == 0.0) continue;
    const double given_model = component_mean(c.law);
    p += c.weight * given_model;
  }
  return p;
}

/// Laplace approximation at the posterior mode: mean is the mode
/// (alpha-1)/(alpha+beta-2), variance the inverse curvature of the log
/// density there, m(1-m)/(alpha+beta-2).
inline NormalApproximation normal_approximation(const ComponentPosterior& comp) {
  const auto* tb = std::get_if<TruncatedBeta>(&comp.law);
  if (tb == nullptr) {
    throw DomainError("normal_approximation: component is not a beta posterior");
  }
  const double n_eff = tb->alpha + tb->beta - 2.0;
  if (!(tb->alpha > 1.0 && tb->beta > 1.0) || !(n_eff > 0.0)) {
    throw DomainError("normal_approximation: beta(" + std::to_string(tb->alpha) + ", " +
                      std::to_string(tb->beta) + ") has no interior mode");
  }
  const double mode = (tb->alpha - 1.0) / n_eff;
  if (!(mode > tb->lo && mode < tb->hi)) {
    throw DomainError("normal_approximation: mode " + std::to_string(mode) +
                      " is not interior to the support");
  }
  return {mode, std::sqrt(mode * (1.0 - mode) / n_eff)};
}

}  // namespace bayesmix
