#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bayesmix/error.hpp"
#include "bayesmix/oracle.hpp"
#include "bayesmix/posterior.hpp"

using namespace bayesmix;

TEST(UpdateComponent, UniformBecomesTruncatedBeta) {
  const auto post = update_component(BinomialObservation(160, 400),
                                     {1.0 / 12.0, ContinuousPrior::uniform(0.0, 0.5)});
  const auto& tb = std::get<TruncatedBeta>(post.law);
  EXPECT_EQ(tb.alpha, 161.0);
  EXPECT_EQ(tb.beta, 241.0);
  EXPECT_EQ(tb.lo, 0.0);
  EXPECT_EQ(tb.hi, 0.5);
}

TEST(UpdateComponent, NoDataLeavesPrior) {
  const auto spike = update_component(BinomialObservation(0, 0), {0.5, PointMass{0.3}});
  EXPECT_EQ(std::get<PointMass>(spike.law).location, 0.3);
  const auto flat = update_component(BinomialObservation(0, 0), {0.5, ContinuousPrior::uniform(0.2, 0.6)});
  const auto& tb = std::get<TruncatedBeta>(flat.law);
  EXPECT_EQ(tb.alpha, 1.0);
  EXPECT_EQ(tb.beta, 1.0);
  EXPECT_NEAR(tb.mean(), 0.4, 1e-14);
  const auto be = update_component(BinomialObservation(0, 0), {1.0, ContinuousPrior::beta(2.0, 5.0)});
  EXPECT_EQ(std::get<TruncatedBeta>(be.law).alpha, 2.0);
  EXPECT_EQ(std::get<TruncatedBeta>(be.law).beta, 5.0);
}

TEST(UpdateComponent, BetaConjugacy) {
  const BinomialObservation obs(3, 10);
  const auto post = update_component(obs, {1.0, ContinuousPrior::beta(1.0, 1.0)});
  const auto& tb = std::get<TruncatedBeta>(post.law);
  EXPECT_EQ(tb.alpha, 4.0);
  EXPECT_EQ(tb.beta, 8.0);
  EXPECT_NEAR(component_mean(post.law), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(component_mean(post.law),
              oracle::grid_posterior_mean(obs, [](double) { return 1.0; }, 0.0, 1.0, 20000), 1e-10);
}

TEST(TruncatedBeta, MeanAgainstGridOracle) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    double lo = u(rng);
    double hi = u(rng);
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 0.05) continue;
    const std::uint64_t n = rng() % 500;
    const std::uint64_t a = rng() % (n + 1);
    const BinomialObservation obs(a, n);
    const auto post = update_component(obs, {1.0, ContinuousPrior::uniform(lo, hi)});
    const double density = 1.0 / (hi - lo);
    double want = 0.0;
    try {
      want = oracle::grid_posterior_mean(obs, [density](double) { return density; }, lo, hi, 100000);
    } catch (const std::exception&) {
      continue;
    }
    EXPECT_NEAR(component_mean(post.law), want, 1e-8)
        << "lo=" << lo << " hi=" << hi << " a=" << a << " n=" << n;
  }
}

TEST(TruncatedBeta, LinkageMean) {
  const auto post = update_component(BinomialObservation(160, 400), {1.0, ContinuousPrior::uniform(0.0, 0.5)});
  EXPECT_NEAR(component_mean(post.law), 0.400494, 1e-6);
  EXPECT_NEAR(component_mean(post.law),
              oracle::grid_posterior_mean(BinomialObservation(160, 400), [](double) { return 2.0; },
                                          0.0, 0.5, 100000),
              1e-8);
}

TEST(MixturePosterior, Linkage) {
  const auto post = mixture_posterior(BinomialObservation(160, 400), haldane_linkage_prior());
  ASSERT_EQ(post.size(), 2u);
  EXPECT_NEAR(post[0].weight, 0.028, 0.001);
  EXPECT_NEAR(post[1].weight, 0.972, 0.001);
  EXPECT_EQ(post[0].weight + post[1].weight, 1.0);
  EXPECT_EQ(std::get<PointMass>(post[0].law).location, 0.5);
  EXPECT_EQ(std::get<TruncatedBeta>(post[1].law).alpha, 161.0);
  EXPECT_EQ(describe(post[1].law), "beta(161, 241) on [0, 0.5]");
}

TEST(MixturePosterior, SingleComponent) {
  const MixturePrior p({{1.0, ContinuousPrior::beta(2.0, 3.0)}});
  const auto post = mixture_posterior(BinomialObservation(4, 9), p);
  ASSERT_EQ(post.size(), 1u);
  EXPECT_EQ(post[0].weight, 1.0);
  EXPECT_EQ(std::get<TruncatedBeta>(post[0].law).alpha, 6.0);
  EXPECT_EQ(std::get<TruncatedBeta>(post[0].law).beta, 8.0);
}

TEST(MixturePosterior, ThreeSpikes) {
  const MixturePrior p({{0.25, PointMass{0.0}},
                        {0.25, PointMass{0.5}},
                        {0.5, ContinuousPrior::uniform(0.0, 1.0)}});
  const auto post = mixture_posterior(BinomialObservation(2, 10), p);
  EXPECT_EQ(post[0].weight, 0.0);
  EXPECT_NEAR(post[0].weight + post[1].weight + post[2].weight, 1.0, 1e-15);
  // Weights proportional to .25 C(10,2) 2^-10 and .5/11.
  const double j1 = 0.25 * 45.0 / 1024.0;
  const double j2 = 0.5 / 11.0;
  EXPECT_NEAR(post[1].weight, j1 / (j1 + j2), 1e-14);
}

TEST(MixturePosterior, AllComponentsImpossible) {
  const MixturePrior p({{0.5, PointMass{0.0}}, {0.5, PointMass{1.0}}});
  EXPECT_THROW(mixture_posterior(BinomialObservation(1, 3), p), DomainError);
}

TEST(MixturePosterior, WeightsValidated) {
  EXPECT_THROW(MixturePosterior({{0.7, PointMass{0.1}}, {0.7, PointMass{0.2}}}), DomainError);
  EXPECT_THROW(MixturePosterior({}), DomainError);
}

TEST(PosteriorMean, Linkage) {
  const auto post = mixture_posterior(BinomialObservation(160, 400), haldane_linkage_prior());
  EXPECT_NEAR(posterior_mean(post), 0.4028, 0.0005);
}

TEST(PosteriorMean, PointMasses) {
  EXPECT_EQ(posterior_mean(MixturePosterior({{1.0, PointMass{0.37}}})), 0.37);
  EXPECT_EQ(posterior_mean(MixturePosterior({{0.5, PointMass{0.0}}, {0.5, PointMass{1.0}}})), 0.5);
}

TEST(PredictiveNext, Examples) {
  const auto linkage = mixture_posterior(BinomialObservation(160, 400), haldane_linkage_prior());
  EXPECT_NEAR(predictive_next(linkage), 0.4028, 0.0005);
  EXPECT_EQ(predictive_next(MixturePosterior({{1.0, PointMass{1.0}}})), 1.0);

  const MixturePrior law({{0.5, PointMass{0.0}}, {0.5, ContinuousPrior::uniform(0.0, 1.0)}});
  const BinomialObservation obs(0, 8);
  const auto post = mixture_posterior(obs, law);
  EXPECT_NEAR(post[0].weight, 0.9, 1e-14);
  EXPECT_NEAR(predictive_next(post), 0.01, 1e-14);
  const double grid_mean =
      oracle::grid_posterior_mean(obs, [](double) { return 1.0; }, 0.0, 1.0, 20000);
  EXPECT_NEAR(predictive_next(post), post[1].weight * grid_mean, 1e-10);
}

TEST(PredictiveNext, EqualsPosteriorMean) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 200; ++i) {
    const double w = u(rng);
    const double loc = u(rng);
    const MixturePrior p({{w, PointMass{loc}}, {1.0 - w, ContinuousPrior::uniform(0.0, 1.0)}});
    const std::uint64_t n = rng() % 300;
    const auto post = mixture_posterior(BinomialObservation(rng() % (n + 1), n), p);
    ASSERT_NEAR(predictive_next(post), posterior_mean(post), 1e-14);
  }
}

TEST(PosteriorMean, SpikeWeightGrowsWithDataAtTheNull) {
  const MixturePrior p({{0.1, PointMass{0.5}}, {0.9, ContinuousPrior::uniform(0.0, 1.0)}});
  double last = 0.0;
  for (std::uint64_t n : {10u, 100u, 1000u, 10000u}) {
    const double w = mixture_posterior(BinomialObservation(n / 2, n), p)[0].weight;
    EXPECT_GT(w, last) << "n=" << n;
    last = w;
  }
  EXPECT_GT(last, 0.5);
}

TEST(NormalApproximation, Linkage) {
  const auto post = update_component(BinomialObservation(160, 400), {1.0, ContinuousPrior::uniform(0.0, 0.5)});
  const auto na = normal_approximation(post);
  EXPECT_NEAR(na.mean, 0.4, 1e-15);
  EXPECT_NEAR(na.sd, 0.0245, 0.0005);
  EXPECT_NEAR(na.sd, std::sqrt(0.24 / 400.0), 1e-15);
}

// Curvature oracle: sd = (-d²/dθ² ln p(θ))^(-1/2) at the mode, by central
// differences on the unnormalized log density.
TEST(NormalApproximation, MatchesCurvatureOracle) {
  for (auto [al, be] : {std::pair{2.0, 2.0}, std::pair{161.0, 241.0}, std::pair{5.5, 3.25}}) {
    const ComponentPosterior c{1.0, TruncatedBeta{al, be, 0.0, 1.0}};
    const auto na = normal_approximation(c);
    auto lp = [al, be](double t) { return (al - 1.0) * std::log(t) + (be - 1.0) * std::log1p(-t); };
    const double h = 1e-4;
    const double m = na.mean;
    const double curv = (lp(m + h) - 2.0 * lp(m) + lp(m - h)) / (h * h);
    EXPECT_NEAR(na.sd, 1.0 / std::sqrt(-curv), 1e-6 * na.sd) << "beta(" << al << "," << be << ")";
  }
  const auto b22 = normal_approximation({1.0, TruncatedBeta{2.0, 2.0, 0.0, 1.0}});
  EXPECT_EQ(b22.mean, 0.5);
  EXPECT_NEAR(b22.sd, std::sqrt(0.125), 1e-15);
}

TEST(NormalApproximation, Errors) {
  EXPECT_THROW(normal_approximation({1.0, TruncatedBeta{1.0, 1.0, 0.0, 1.0}}), DomainError);
  EXPECT_THROW(normal_approximation({1.0, PointMass{0.5}}), DomainError);
  // Mode .6 lies outside [0, .5].
  EXPECT_THROW(normal_approximation({1.0, TruncatedBeta{7.0, 5.0, 0.0, 0.5}}), DomainError);
}

TEST(NormalApproximation, TotalVariationToLinkagePosterior) {
  const TruncatedBeta tb{161.0, 241.0, 0.0, 0.5};
  const auto na = normal_approximation({1.0, tb});
  const double log_norm = log_beta(161.0, 241.0).value + tb.log_mass().value;
  constexpr int kGrid = 10000;
  const double h = 1.0 / kGrid;
  double tv = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double t = (i + 0.5) * h;
    const double exact = t < 0.5 ? std::exp(160.0 * std::log(t) + 240.0 * std::log1p(-t) - log_norm) : 0.0;
    const double z = (t - na.mean) / na.sd;
    const double normal = std::exp(-0.5 * z * z) / (na.sd * std::sqrt(2.0 * std::numbers::pi));
    tv += 0.5 * std::fabs(exact - normal) * h;
  }
  EXPECT_LT(tv, 0.01);
}
