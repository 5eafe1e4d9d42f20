// Copyright 2026 The mucforest Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mucforest/attack.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mucforest/errors.h"
#include "mucforest/muc.h"
#include "mucforest/trainer.h"
#include "support/synthetic.h"

namespace mucforest {
namespace {

using testing::StumpForest;

AttackConfig UnitConfig(int d, double epsilon = 1e-4) {
  AttackConfig c;
  c.kappa.assign(d, 0.1);
  c.mu.assign(d, 1.0);
  c.immutable.assign(d, false);
  c.bounds = Box(std::vector<Interval>(d, Interval::Closed(0.0, 1.0)));
  c.epsilon = epsilon;
  return c;
}

TEST(AttackConfigTest, DefaultsFromStats) {
  Dataset d({"a", "b"});
  const double r0[] = {0.0, 5.0};
  const double r1[] = {10.0, 5.0};
  d.AddRow(r0, 0);
  d.AddRow(r1, 1);
  const AttackConfig c = AttackConfig::Defaults(ComputeFeatureStats(d));
  EXPECT_DOUBLE_EQ(c.kappa[0], 0.5);
  EXPECT_DOUBLE_EQ(c.kappa[1], 0.05);  // constant column: range 1
  EXPECT_DOUBLE_EQ(c.mu[0], 10.0);
  EXPECT_DOUBLE_EQ(c.mu[1], 1.0);
  EXPECT_EQ(c.bounds[0], Interval::Closed(0.0, 10.0));
  EXPECT_DOUBLE_EQ(c.alpha, 0.05);
  EXPECT_DOUBLE_EQ(c.beta, 0.005);
  EXPECT_DOUBLE_EQ(c.eta0, 0.2);
  EXPECT_EQ(c.iterations, 200);
  EXPECT_EQ(c.n_candidates, 1000);
  const double x[] = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(c.EpsilonFor(x), 5e-4);
  const double zero[] = {0.0, 0.0};
  EXPECT_DOUBLE_EQ(c.EpsilonFor(zero), 1e-6);
  EXPECT_NO_THROW(c.Validate(2));
  EXPECT_THROW(c.Validate(3), InputError);
}

TEST(AttackConfigTest, ValidateRejectsOutOfRange) {
  AttackConfig c = UnitConfig(1);
  c.alpha = 1.0;
  EXPECT_THROW(c.Validate(1), InputError);
  c = UnitConfig(1);
  c.kappa[0] = 0.0;
  EXPECT_THROW(c.Validate(1), InputError);
  c.immutable[0] = true;  // immutable features may have kappa 0
  EXPECT_NO_THROW(c.Validate(1));
  c = UnitConfig(1);
  c.beta = 0.0;
  EXPECT_THROW(c.Validate(1), InputError);
  c = UnitConfig(1);
  c.epsilon = -1.0;
  EXPECT_THROW(c.Validate(1), InputError);
  c = UnitConfig(1);
  c.iterations = -1;
  EXPECT_THROW(c.Validate(1), InputError);
}

TEST(SampleSeedTest, XorWithIndex) {
  EXPECT_EQ(SampleSeed(0b1010, 0b0110), 0b1100u);
  EXPECT_EQ(SampleSeed(7, 0), 7u);
}

TEST(FineGrainedBinarySearchTest, OneDimensionalBoundary) {
  const Forest f = StumpForest();
  const double x[] = {0.3};
  const double theta[] = {1.0};
  const Bracket b = FineGrainedBinarySearch(f, x, 0, theta, 0.6, UnitConfig(1));
  EXPECT_NEAR(b.v_out, 0.2, 1e-4);
  EXPECT_GT(b.v_out, 0.2);
  EXPECT_LE(b.v_in, 0.2);
  EXPECT_LE(b.v_out - b.v_in, 1e-4);
}

TEST(FineGrainedBinarySearchTest, HalfShrinkStageOneBracket) {
  const Forest f = StumpForest();
  const double x[] = {0.3};
  const double theta[] = {2.5};  // normalized internally
  AttackConfig c = UnitConfig(1, 1.0);  // tolerance wide enough to skip bisection
  c.alpha = 0.5;
  const Bracket stage1 = FineGrainedBinarySearch(f, x, 0, theta, 0.6, c);
  EXPECT_DOUBLE_EQ(stage1.v_out, 0.3);
  EXPECT_DOUBLE_EQ(stage1.v_in, 0.15);

  c.epsilon = 1e-4;
  const Bracket full = FineGrainedBinarySearch(f, x, 0, theta, 0.6, c);
  EXPECT_GE(full.v_in, 0.15);
  EXPECT_LE(full.v_out, 0.3);
  EXPECT_NEAR(full.v_out, 0.2, 1e-4);
}

TEST(FineGrainedBinarySearchTest, StartWithinToleranceOfBoundary) {
  const Forest f = StumpForest();
  const double x[] = {0.3};
  const double theta[] = {1.0};
  const double v0 = 0.2 + 4e-5;
  const Bracket b = FineGrainedBinarySearch(f, x, 0, theta, v0, UnitConfig(1));
  EXPECT_NEAR(b.v_out, v0, 1e-4);
}

TEST(FineGrainedBinarySearchTest, NonAdversarialStartIsDirectionError) {
  const Forest f = StumpForest();
  const double x[] = {0.3};
  const double theta[] = {-1.0};
  EXPECT_THROW(FineGrainedBinarySearch(f, x, 0, theta, 0.2, UnitConfig(1)),
               DirectionError);
  const double zero[] = {0.0};
  EXPECT_THROW(FineGrainedBinarySearch(f, x, 0, zero, 0.6, UnitConfig(1)),
               DirectionError);
}

TEST(FineGrainedBinarySearchProperty, BracketInvariantOnTrainedForest) {
  const Dataset d = testing::MakeSeparable(300, 5, 3, 31);
  TrainParams p;
  p.seed = 31;
  const Forest f = TrainForest(d, p);
  AttackConfig c = UnitConfig(5);
  c.bounds = Box::Unbounded(5);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  int checked = 0;
  for (std::size_t i = 0; i < d.size() && checked < 40; ++i) {
    const auto x = d.row(i);
    const int y = f.PredictLabel(x);
    std::vector<double> theta(5);
    for (double& t : theta) t = g(rng);
    double n = 0.0;
    for (double t : theta) n += t * t;
    n = std::sqrt(n);
    std::vector<double> far(5);
    for (int k = 0; k < 5; ++k) far[k] = x[k] + 3.0 * theta[k] / n;
    if (f.PredictLabel(far) == y) continue;
    const Bracket b = FineGrainedBinarySearch(f, x, y, theta, 3.0, c);
    std::vector<double> out(5), in(5);
    for (int k = 0; k < 5; ++k) {
      out[k] = x[k] + b.v_out * theta[k] / n;
      in[k] = x[k] + b.v_in * theta[k] / n;
    }
    EXPECT_TRUE(IsAdversarial(f, out, y));
    EXPECT_FALSE(IsAdversarial(f, in, y));
    EXPECT_LE(b.v_out - b.v_in, 1e-4);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(IsAdversarialTest, AgreesWithPredict) {
  const Forest f = StumpForest(0.5, 2);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double x[] = {u(rng), u(rng)};
    EXPECT_EQ(IsAdversarial(f, x, 0), f.PredictLabel(x) != 0);
  }
}

TEST(Region, OneDimensionalExpansion) {
  const Forest f = StumpForest();
  const ReachSolver solver(f);
  const double x[] = {0.3};
  const Region r = ExpandAdversarialRegion(solver, x, 0, UnitConfig(1));
  EXPECT_NEAR(r.tau[0], 0.3, 1e-12);
  EXPECT_EQ(r.expansions, 3);
  EXPECT_TRUE(r.in_core[0]);
  EXPECT_NEAR(r.ceil[0], 0.6, 1e-12);
  EXPECT_DOUBLE_EQ(r.floor[0], 0.0);  // clamped to the bounds
  EXPECT_TRUE(IsAdversarial(f, r.witness, 0));
  EXPECT_TRUE(r.box.Contains(r.witness));
}

TEST(Region, AlreadyAdversarialNeedsNoExpansion) {
  const Forest f = StumpForest();
  const ReachSolver solver(f);
  const double x[] = {0.3};
  const Region r = ExpandAdversarialRegion(solver, x, 1, UnitConfig(1));
  EXPECT_EQ(r.tau[0], 0.0);
  EXPECT_EQ(r.expansions, 0);
}

TEST(Region, ImmutableDecidingFeatureIsNoRegion) {
  const Forest f = StumpForest(0.5, 2);
  const ReachSolver solver(f);
  const double x[] = {0.3, 0.5};
  AttackConfig c = UnitConfig(2);
  c.immutable[0] = true;
  EXPECT_THROW(ExpandAdversarialRegion(solver, x, 0, c), NoRegionError);
}

TEST(Region, UnreachableWithinBoundsIsNoRegion) {
  const Forest f = StumpForest(2.0);
  const ReachSolver solver(f);
  const double x[] = {0.3};
  EXPECT_THROW(ExpandAdversarialRegion(solver, x, 0, UnitConfig(1)),
               NoRegionError);
}

TEST(RegionProperty, FrontierAndRestraintOnTrainedForest) {
  const Dataset d = testing::MakeSeparable(400, 6, 3, 41);
  TrainParams p;
  p.seed = 41;
  const Forest f = TrainForest(d, p);
  const ReachSolver solver(f);
  AttackConfig c = AttackConfig::Defaults(ComputeFeatureStats(d));
  c.immutable[5] = true;
  for (std::size_t i = 0; i < 25; ++i) {
    const auto x = d.row(i);
    const int y = f.PredictLabel(x);
    Region r;
    try {
      r = ExpandAdversarialRegion(solver, x, y, c);
    } catch (const NoRegionError&) {
      continue;
    }
    EXPECT_TRUE(solver.Decide(r.box, Target::Not(y)).sat);
    EXPECT_EQ(r.tau[5], 0.0);
    for (int k = 0; k < 6; ++k) {
      if (!r.in_core[k]) {
        EXPECT_EQ(r.tau[k], 0.0);
      }
    }
    if (r.expansions > 0) {
      // Undo the last step on every feature that can have taken it: the
      // smaller box must be unsat.
      std::vector<double> prev = r.tau;
      for (int k = 0; k < 6; ++k) prev[k] = std::max(0.0, prev[k] - c.kappa[k]);
      const Box smaller = Box::Around(x, prev).Intersect(FreeDomainFor(c.bounds, x));
      EXPECT_FALSE(solver.Decide(smaller, Target::Not(y)).sat);
    }
  }
}

TEST(InitialDirection, SingleCandidateAndMinimum) {
  const Forest f = StumpForest(0.5, 2);
  const double x[] = {0.3, 0.5};
  const AttackConfig c = UnitConfig(2);
  const InitialDirection one =
      SelectInitialDirection(f, x, 0, {{0.9, 0.9}}, c);
  EXPECT_EQ(one.evaluated, 1);
  EXPECT_NEAR(one.theta[0], 0.6, 1e-12);
  EXPECT_NEAR(one.theta[1], 0.4, 1e-12);

  const std::vector<std::vector<double>> pool = {
      {0.9, 0.9}, {0.8, 0.5}, {0.1, 0.1}, {0.7, 0.0}};
  const InitialDirection best = SelectInitialDirection(f, x, 0, pool, c);
  EXPECT_EQ(best.evaluated, 3);
  EXPECT_NEAR(best.lambda, 0.2, 1e-4);  // along (0.8, 0.5): straight across
  for (const auto& cand : pool) {
    if (!IsAdversarial(f, cand, 0)) continue;
    const double theta[] = {cand[0] - x[0], cand[1] - x[1]};
    const double v0 = std::hypot(theta[0], theta[1]);
    EXPECT_LE(best.lambda, FineGrainedBinarySearch(f, x, 0, theta, v0, c).v_out);
  }
  EXPECT_THROW(SelectInitialDirection(f, x, 0, {{0.1, 0.1}}, c),
               NoCandidateError);
}

TEST(InitialDirection, RegionCandidatesPointIntoTheAdversarialCell) {
  const Forest f = StumpForest(0.5, 2);
  const ReachSolver solver(f);
  const double x[] = {0.3, 0.5};
  const AttackConfig c = UnitConfig(2);
  const Region r = ExpandAdversarialRegion(solver, x, 0, c);
  EXPECT_EQ(r.tau[1], 0.0);  // never in a core
  const InitialDirection init = SelectInitialDirectionInRegion(f, x, 0, r, c);
  EXPECT_GT(init.theta[0], 0.0);
  EXPECT_EQ(init.theta[1], 0.0);
  EXPECT_NEAR(init.lambda, 0.2, 1e-4);
}

TEST(Optimizer, ZeroIterationsReturnsTheStart) {
  const Forest f = StumpForest(0.5, 2);
  const double x[] = {0.3, 0.0};
  const double theta[] = {1.0, 1.0};
  AttackConfig c = UnitConfig(2);
  c.iterations = 0;
  const OptimizationResult r =
      ZeroOrderOptimize(f, x, 0, theta, 0.3, {true, true}, c);
  EXPECT_EQ(r.lambda, 0.3);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_NEAR(r.theta[0], std::sqrt(0.5), 1e-15);
}

TEST(Optimizer, OneDimensionalStaysOnTheOptimum) {
  const Forest f = StumpForest();
  const double x[] = {0.3};
  const double theta[] = {1.0};
  const AttackConfig c = UnitConfig(1);
  const Bracket b = FineGrainedBinarySearch(f, x, 0, theta, 0.6, c);
  const OptimizationResult r =
      ZeroOrderOptimize(f, x, 0, theta, b.v_out, {true}, c);
  EXPECT_NEAR(r.lambda, 0.2, 1e-4);
}

TEST(Optimizer, HalfPlaneConvergesToPerpendicular) {
  const Forest f = StumpForest(0.5, 2);
  const double x[] = {0.3, 0.0};
  const double theta[] = {1.0, 1.0};
  AttackConfig c = UnitConfig(2);
  c.bounds = Box::Unbounded(2);
  const Bracket b = FineGrainedBinarySearch(f, x, 0, theta, 1.0, c);
  EXPECT_NEAR(b.v_out, 0.2 * std::sqrt(2.0), 1e-4);
  const OptimizationResult r =
      ZeroOrderOptimize(f, x, 0, theta, b.v_out, {true, true}, c);
  EXPECT_LE(r.lambda, 0.22);
  EXPECT_GT(std::abs(r.theta[0]), 0.9);
  EXPECT_EQ(r.trace.size(), 200u);
  for (std::size_t t = 1; t < r.trace.size(); ++t) {
    EXPECT_LE(r.trace[t], r.trace[t - 1]);
  }
}

TEST(Optimizer, MaskedFeaturesNeverMove) {
  const Forest f = StumpForest(0.5, 2);
  const double x[] = {0.3, 0.0};
  const double theta[] = {1.0, 0.5};
  AttackConfig c = UnitConfig(2);
  c.bounds = Box::Unbounded(2);
  const Bracket b = FineGrainedBinarySearch(f, x, 0, theta, 1.0, c);
  const OptimizationResult r =
      ZeroOrderOptimize(f, x, 0, theta, b.v_out, {true, false}, c);
  // Only the first component is perturbed; renormalization keeps the
  // direction's signs.
  EXPECT_GT(r.theta[0], 0.0);
  EXPECT_LE(r.lambda, b.v_out);
}

class AttackModes : public ::testing::TestWithParam<AttackMode> {};

TEST_P(AttackModes, ResultsAreValidAndNoWorseThanStart) {
  const Dataset d = testing::MakeSeparable(400, 6, 3, 51);
  TrainParams p;
  p.seed = 51;
  const Forest f = TrainForest(d, p);
  const ReachSolver solver(f);
  AttackConfig c = AttackConfig::Defaults(ComputeFeatureStats(d));
  c.iterations = 40;
  for (std::size_t i = 0; i < 10; ++i) {
    c.seed = SampleSeed(3, i);
    const auto x = d.row(i);
    const int y = f.PredictLabel(x);
    const AttackResult r = Attack(solver, x, y, c, GetParam(), &d);
    EXPECT_TRUE(IsAdversarial(f, r.x_adv, y));
    EXPECT_LE(r.distance, r.initial_lambda + 1e-12);
    EXPECT_EQ(r.iterations, 40);
    for (double v : r.x_adv) EXPECT_TRUE(std::isfinite(v));
    EXPECT_TRUE(c.bounds.Contains(r.x_adv));
    // Same seed, same answer.
    const AttackResult again = Attack(solver, x, y, c, GetParam(), &d);
    EXPECT_EQ(again.x_adv, r.x_adv);
  }
}

INSTANTIATE_TEST_SUITE_P(Both, AttackModes,
                         ::testing::Values(AttackMode::kMuc,
                                           AttackMode::kBaseline));

TEST(AttackTest, RejectsSampleNotPredictedAsLabel) {
  const Forest f = StumpForest();
  const ReachSolver solver(f);
  const double x[] = {0.3};
  EXPECT_THROW(Attack(solver, x, 1, UnitConfig(1), AttackMode::kMuc, nullptr),
               InputError);
  EXPECT_THROW(Attack(solver, x, 0, UnitConfig(1), AttackMode::kBaseline, nullptr),
               InputError);
}

TEST(AttackTest, BaselineKeepsImmutableFeatures) {
  const Dataset d = testing::MakeSeparable(300, 4, 2, 61);
  TrainParams p;
  p.seed = 61;
  const Forest f = TrainForest(d, p);
  const ReachSolver solver(f);
  AttackConfig c = AttackConfig::Defaults(ComputeFeatureStats(d));
  c.immutable[3] = true;
  c.iterations = 20;
  for (std::size_t i = 0; i < 5; ++i) {
    const auto x = d.row(i);
    const AttackResult r =
        Attack(solver, x, f.PredictLabel(x), c, AttackMode::kBaseline, &d);
    EXPECT_EQ(r.x_adv[3], x[3]);
  }
}

TEST(AttackJson, RoundTrip) {
  AttackResult r;
  r.sample = 4;
  r.mode = AttackMode::kBaseline;
  r.x_org = {0.1 + 0.2, 2.0};
  r.x_adv = {0.7, 2.0};
  r.distance = 0.4;
  r.search_time_ms = 12;
  r.opt_time_ms = 30;
  r.tau = {0.0, 0.0};
  r.iterations = 200;
  const std::string json = AttackResultToJson(r);
  EXPECT_EQ(json.rfind(R"({"sample":4,"mode":"baseline","x_org":)", 0), 0u);
  const AttackResult back = AttackResultFromJson(json);
  EXPECT_EQ(back.x_org, r.x_org);
  EXPECT_EQ(back.x_adv, r.x_adv);
  EXPECT_EQ(back.mode, r.mode);
  EXPECT_EQ(back.iterations, 200);
  EXPECT_EQ(back.opt_time_ms, 30);
  EXPECT_THROW(AttackResultFromJson("{}"), ParseError);
  EXPECT_THROW(ParseAttackMode("fast"), InputError);
}

TEST(MeanL2, Examples) {
  const std::vector<std::vector<double>> a = {{0.0}};
  const std::vector<std::vector<double>> b = {{3.0}};
  EXPECT_DOUBLE_EQ(MeanL2Distance(a, b), 3.0);
  const std::vector<std::vector<double>> c = {{0.0, 0.0}, {1.0, 1.0}};
  const std::vector<std::vector<double>> e = {{1.0, 0.0}, {1.0, 4.0}};
  EXPECT_DOUBLE_EQ(MeanL2Distance(c, e), 2.0);
  EXPECT_THROW(MeanL2Distance(a, c), InputError);
}

TEST(MeanL2, MatchesIndependentRecomputation) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> xs, ys;
  long double total = 0.0;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(4), y(4);
    long double sq = 0.0;
    for (int k = 0; k < 4; ++k) {
      x[k] = g(rng);
      y[k] = g(rng);
      sq += (long double)(x[k] - y[k]) * (x[k] - y[k]);
    }
    total += std::sqrt(sq);
    xs.push_back(x);
    ys.push_back(y);
  }
  EXPECT_NEAR(MeanL2Distance(xs, ys), static_cast<double>(total / 50), 1e-12);
}

}  // namespace
}  // namespace mucforest
