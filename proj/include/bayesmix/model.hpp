#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bayesmix/error.hpp"
#include "bayesmix/format.hpp"
#include "bayesmix/numerics.hpp"

namespace bayesmix {

/// a successes in n Bernoulli trials. n = 0 means "no data".
class BinomialObservation {
 public:
  BinomialObservation(std::uint64_t successes, std::uint64_t trials)
      : successes_(successes), trials_(trials) {
    if (successes > trials) {
      throw DomainError("successes (" + std::to_string(successes) + ") exceeds trials (" +
                        std::to_string(trials) + ")");
    }
  }

  std::uint64_t successes() const noexcept { return successes_; }
  std::uint64_t trials() const noexcept { return trials_; }
  std::uint64_t failures() const noexcept { return trials_ - successes_; }

  KernelExponents exponents() const noexcept {
    return {static_cast<double>(successes_), static_cast<double>(failures())};
  }

  friend bool operator==(const BinomialObservation&, const BinomialObservation&) = default;

 private:
  std::uint64_t successes_;
  std::uint64_t trials_;
};

/// Two samples classified by a property: sample 0 has x0 with it and y0
/// without, sample 1 has x1 and y1.
struct ContingencyTable {
  std::uint64_t x0 = 0;
  std::uint64_t y0 = 0;
  std::uint64_t x1 = 0;
  std::uint64_t y1 = 0;

  std::uint64_t total() const noexcept { return x0 + y0 + x1 + y1; }
  ContingencyTable swapped() const noexcept { return {x1, y1, x0, y0}; }

  friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;
};

/// Normalized density on a subinterval of [0, 1].
class ContinuousPrior {
 public:
  struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
  };
  struct Beta {
    double alpha = 1.0;
    double beta = 1.0;
  };
  /// Piecewise-linear density through (grid[i], density[i]); zero off-grid.
  struct Tabulated {
    std::vector<double> grid;
    std::vector<double> density;
  };
  using Kind = std::variant<Uniform, Beta, Tabulated>;

  static constexpr double kNormalizationTolerance = 1e-8;

  static ContinuousPrior uniform(double lo, double hi) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
      throw DomainError("uniform prior: bounds must satisfy 0 <= lo < hi <= 1, got (" +
                        std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
    return ContinuousPrior(Uniform{lo, hi});
  }

  static ContinuousPrior beta(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || std::isinf(alpha) || std::isinf(beta)) {
      throw DomainError("beta prior: alpha and beta must be positive and finite");
    }
    return ContinuousPrior(Beta{alpha, beta});
  }

  /// Validates ordering, nonnegativity and that the trapezoid integral of
  /// the interpolant (which is exact for it) is 1 within 1e-8.
  static ContinuousPrior tabulated(std::vector<double> grid, std::vector<double> density) {
    if (grid.size() < 2 || grid.size() != density.size()) {
      throw DomainError("tabulated prior: need at least two points and matching column lengths");
    }
    if (grid.front() < 0.0 || grid.back() > 1.0) {
      throw DomainError("tabulated prior: grid must lie within [0,1]");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (!(grid[i] > grid[i - 1])) {
        throw DomainError("tabulated prior: grid must be strictly increasing (index " +
                          std::to_string(i) + ")");
      }
    }
    for (double d : density) {
      if (!(d >= 0.0) || std::isinf(d)) {
        throw DomainError("tabulated prior: density values must be finite and nonnegative");
      }
    }
    const double mass = trapezoid(grid, density);
    if (std::fabs(mass - 1.0) > kNormalizationTolerance) {
      throw DomainError("tabulated prior: density integrates to " + std::to_string(mass) +
                        ", expected 1");
    }
    return ContinuousPrior(Tabulated{std::move(grid), std::move(density)});
  }

  /// Tabulates an unnormalized density on `grid` and rescales it to unit mass.
  template <typename Fn>
  static ContinuousPrior tabulate(const Fn& unnormalized, std::vector<double> grid) {
    std::vector<double> values;
    values.reserve(grid.size());
    for (double x : grid) values.push_back(unnormalized(x));
    const double mass = trapezoid(grid, values);
    if (!(mass > 0.0)) throw DomainError("tabulate: density has no mass on the grid");
    for (double& v : values) v /= mass;
    return tabulated(std::move(grid), std::move(values));
  }

  /// f(x) = -ln x on (0, 1]: integrable, with a logarithmic infinity at 0.
  /// Tabulated on a geometric grid from `floor` to 0.01 followed by a
  /// uniform grid to 1; the mass below `floor` (floor (1 - ln floor)) is
  /// dropped and the remainder renormalized.
  static ContinuousPrior log_singular_at_zero(double floor = 1e-14, int per_decade = 1000,
                                              int uniform_points = 20000) {
    if (!(floor > 0.0 && floor < 0.01)) throw DomainError("log_singular_at_zero: floor must lie in (0, .01)");
    std::vector<double> grid;
    const double decades = std::log10(0.01 / floor);
    const int geometric = static_cast<int>(std::ceil(decades * per_decade));
    for (int i = 0; i < geometric; ++i) {
      grid.push_back(floor * std::pow(10.0, decades * i / geometric));
    }
    for (int i = 0; i <= uniform_points; ++i) {
      grid.push_back(0.01 + 0.99 * i / uniform_points);
    }
    grid.back() = 1.0;
    return tabulate([](double x) { return -std::log(x); }, std::move(grid));
  }

  const Kind& kind() const noexcept { return kind_; }

  Interval support() const {
    return std::visit(
        [](const auto& k) -> Interval {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Uniform>) {
            return {k.lo, k.hi};
          } else if constexpr (std::is_same_v<T, Beta>) {
            return {0.0, 1.0};
          } else {
            return {k.grid.front(), k.grid.back()};
          }
        },
        kind_);
  }

  double density(double theta) const {
    return std::visit(
        [theta](const auto& k) -> double {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Uniform>) {
            return (theta >= k.lo && theta <= k.hi) ? 1.0 / (k.hi - k.lo) : 0.0;
          } else if constexpr (std::is_same_v<T, Beta>) {
            if (theta < 0.0 || theta > 1.0) return 0.0;
            const double s = k.alpha == 1.0 ? 0.0 : (k.alpha - 1.0) * std::log(theta);
            const double f = k.beta == 1.0 ? 0.0 : (k.beta - 1.0) * std::log1p(-theta);
            return std::exp(s + f - log_beta(k.alpha, k.beta).value);
          } else {
            return interpolate(k, theta);
          }
        },
        kind_);
  }

  /// Nodes where the density is not smooth (for quadrature panel layout).
  std::span<const double> breakpoints() const noexcept {
    if (const auto* t = std::get_if<Tabulated>(&kind_)) return t->grid;
    return {};
  }

  bool is_beta() const noexcept { return std::holds_alternative<Beta>(kind_); }

  std::string describe() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, Uniform>) {
            return "uniform(" + format::prob(k.lo) + ", " + format::prob(k.hi) + ")";
          } else if constexpr (std::is_same_v<T, Beta>) {
            return "beta(" + format::prob(k.alpha) + ", " + format::prob(k.beta) + ")";
          } else {
            return "tabulated(" + std::to_string(k.grid.size()) + " points on [" +
                   format::prob(k.grid.front()) + ", " + format::prob(k.grid.back()) + "])";
          }
        },
        kind_);
  }

 private:
  explicit ContinuousPrior(Kind kind) : kind_(std::move(kind)) {}

  static double trapezoid(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
  }

  static double interpolate(const Tabulated& t, double theta) {
    if (theta < t.grid.front() || theta > t.grid.back()) return 0.0;
    auto it = std::upper_bound(t.grid.begin(), t.grid.end(), theta);
    if (it == t.grid.end()) return t.density.back();
    const auto hi = static_cast<std::size_t>(it - t.grid.begin());
    const std::size_t lo = hi - 1;
    const double w = (theta - t.grid[lo]) / (t.grid[hi] - t.grid[lo]);
    return (1.0 - w) * t.density[lo] + w * t.density[hi];
  }


  Kind kind_;
};

/// All prior mass on one value of θ.
struct PointMass {
  double location;

  friend bool operator==(const PointMass&, const PointMass&) = default;
};

using ComponentLaw = std::variant<PointMass, ContinuousPrior>;

struct PriorComponent {
  double weight;
  ComponentLaw law;
};

inline std::string describe(const ComponentLaw& law) {
  if (const auto* p = std::get_if<PointMass>(&law)) {
    return "point(" + format::prob(p->location) + ")";
  }
  return std::get<ContinuousPrior>(law).describe();
}

/// Weighted mixture of point masses and continuous densities on θ.
class MixturePrior {
 public:
  static constexpr double kWeightSumTolerance = 1e-12;

  explicit MixturePrior(std::vector<PriorComponent> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw DomainError("mixture prior: no components");
    double sum = 0.0;
    std::vector<double> spikes;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const auto& c = components_[i];
      if (!(c.weight >= 0.0 && c.weight <= 1.0)) {
        throw DomainError("mixture prior: weight of component " + std::to_string(i) +
                          " must lie in [0,1]");
      }
      sum += c.weight;
      if (const auto* p = std::get_if<PointMass>(&c.law)) {
        if (!(p->location >= 0.0 && p->location <= 1.0)) {
          throw DomainError("mixture prior: point mass location must lie in [0,1]");
        }
        if (std::find(spikes.begin(), spikes.end(), p->location) != spikes.end()) {
          throw DomainError("mixture prior: two point masses at " + std::to_string(p->location));
        }
        spikes.push_back(p->location);
      }
    }
    if (std::fabs(sum - 1.0) > kWeightSumTolerance) {
      throw DomainError("mixture prior: weights sum to " + std::to_string(sum) + ", expected 1");
    }
  }

  std::span<const PriorComponent> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  const PriorComponent& operator[](std::size_t i) const { return components_.at(i); }

 private:
  std::vector<PriorComponent> components_;
};

/// 11/12 on θ = .5 (genes on different chromosomes) and 1/12 spread
/// uniformly over [0, .5) (same chromosome): density 1/6 below .5.
/// The spike sits on the uniform's closed upper bound; a single point
/// carries no continuous mass, so nothing special is needed there.
inline MixturePrior haldane_linkage_prior() {
  return MixturePrior({
      {11.0 / 12.0, PointMass{0.5}},
      {1.0 / 12.0, ContinuousPrior::uniform(0.0, 0.5)},
  });
}

/// Even prior odds between a point null and a uniform alternative.
inline MixturePrior jeffreys_equal_odds_prior(double null_location = 0.5) {
  return MixturePrior({
      {0.5, PointMass{null_location}},
      {0.5, ContinuousPrior::uniform(0.0, 1.0)},
  });
}

}  // namespace bayesmix
