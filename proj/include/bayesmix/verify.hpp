#pragma once

// Self-check: each entry recomputes a main-path result with an oracle.

#include <cmath>
#include <string>
#include <vector>

#include "bayesmix/classic.hpp"
#include "bayesmix/evidence.hpp"
#include "bayesmix/format.hpp"
#include "bayesmix/numerics.hpp"
#include "bayesmix/oracle.hpp"
#include "bayesmix/posterior.hpp"

namespace bayesmix {

struct VerificationCheck {
  std::string name;
  bool passed;
  std::string detail;
};

namespace detail {

inline double relative_error(double got, double want) {
  if (got == want) return 0.0;
  return std::fabs(got - want) / std::max(std::fabs(want), std::numeric_limits<double>::min());
}

inline VerificationCheck compare_check(std::string name, double got, double want, double tol,
                                       bool relative = true) {
  const double err = relative ? relative_error(got, want) : std::fabs(got - want);
  return {std::move(name), err <= tol,
          "main=" + format::sig(got, 15) + " oracle=" + format::sig(want, 15) +
              (relative ? " rel_err=" : " abs_err=") + format::sig(err, 3) +
              " tol=" + format::sig(tol, 3)};
}

}  // namespace detail

inline std::vector<VerificationCheck> run_verification() {
  namespace orc = oracle;
  using detail::compare_check;
  std::vector<VerificationCheck> out;

  out.push_back(compare_check("log_gamma(401) vs ln 400!", log_gamma(401.0).value,
                              orc::log_of(orc::BigRational(orc::factorial(400))), 1e-13, false));
  out.push_back(compare_check("log_binomial_coefficient(400,160) vs exact",
                              log_binomial_coefficient(400, 160).value,
                              orc::log_of(orc::BigRational(orc::binomial(400, 160))), 1e-12));
  out.push_back(compare_check("log_beta(161,241) vs 160!240!/401!", log_beta(161.0, 241.0).value,
                              orc::log_of(orc::beta_integer(161, 241)), 1e-12));

  {
    const BinomialObservation obs(160, 400);
    const ComponentLaw slab = ContinuousPrior::uniform(0.0, 0.5);
    out.push_back(compare_check("linkage same-chromosome evidence vs Simpson grid 1e5",
                                log_marginal_likelihood(obs, slab).linear(),
                                orc::grid_log_evidence(obs, slab, 100000).linear(), 1e-8));
    const ComponentLaw spike = PointMass{0.5};
    out.push_back(compare_check(
        "linkage different-chromosome evidence vs exact C(400,160) 2^-400",
        log_marginal_likelihood(obs, spike).value,
        orc::log_of(orc::BigRational(orc::binomial(400, 160), orc::BigInt(1) << 400)), 1e-12));
  }

  {
    bool ok = true;
    double worst = 0.0;
    const ComponentLaw flat = ContinuousPrior::uniform(0.0, 1.0);
    for (std::uint64_t n : {1u, 7u, 50u, 400u}) {
      for (std::uint64_t a = 0; a <= n; a += std::max<std::uint64_t>(1, n / 7)) {
        const BinomialObservation obs(a, n);
        const double err = detail::relative_error(
            log_marginal_likelihood(obs, flat).linear(),
            orc::grid_log_evidence(obs, flat, 20000).linear());
        worst = std::max(worst, err);
        ok = ok && err <= 1e-8;
      }
    }
    out.push_back({"uniform(0,1) evidence 1/(n+1) vs Simpson grid", ok,
                   "worst rel_err=" + format::sig(worst, 3) + " tol=1e-08"});
  }

  {
    bool ok = true;
    double worst = 0.0;
    for (std::uint64_t x0 = 0; x0 <= 6; ++x0)
      for (std::uint64_t y0 = 0; y0 + x0 <= 6; ++y0)
        for (std::uint64_t x1 = 0; x1 <= 6; ++x1)
          for (std::uint64_t y1 = 0; y1 + x1 <= 6; ++y1) {
            const ContingencyTable t{x0, y0, x1, y1};
            const double got = jeffreys_two_proportion(t).posterior_odds_01;
            const double want = orc::to_double(orc::exact_two_proportion_odds(t));
            const double err = detail::relative_error(got, want);
            worst = std::max(worst, err);
            ok = ok && err <= 1e-9;
          }
    out.push_back({"two-proportion odds vs exact factorials (samples of up to 6)", ok,
                   "worst rel_err=" + format::sig(worst, 3) + " tol=1e-09"});
  }

  {
    bool ok = true;
    for (std::uint64_t n = 0; n <= 40; ++n) {
      for (std::uint64_t m = 0; m <= n; ++m) {
        const Fraction f = broad_succession(m, n);
        ok = ok && orc::BigRational(f.numerator, f.denominator) == orc::enumerate_succession(m, n);
      }
    }
    out.push_back({"succession (m+1)/(n+1) vs hypergeometric enumeration, n <= 40", ok, "exact"});
  }

  out.push_back(compare_check("point .5 vs uniform BF at n=100, a=50",
                              std::exp(point_vs_uniform_log_bayes_factor(100, 50, 0.5)),
                              orc::to_double(orc::exact_point_vs_uniform_bayes_factor(
                                  100, 50, orc::BigRational(1, 2))),
                              1e-9));

  {
    const BinomialObservation obs(160, 400);
    const auto post = update_component(obs, {1.0, ContinuousPrior::uniform(0.0, 0.5)});
    out.push_back(compare_check(
        "truncated beta(161,241) mean vs Simpson grid", component_mean(post.law),
        orc::grid_posterior_mean(obs, [](double) { return 2.0; }, 0.0, 0.5, 100000), 1e-8));
  }

  {
    const BinomialObservation obs(5, 10);
    out.push_back(compare_check("BF01 for 5 of 10, point .5 vs uniform: 2772/1024",
                                std::exp(compare(obs, jeffreys_equal_odds_prior()).log_bayes_factor_01),
                                orc::to_double(orc::BigRational(2772, 1024)), 1e-12));
  }

  return out;
}

}  // namespace bayesmix
