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

#ifndef MUCFOREST_ATTACK_H_
#define MUCFOREST_ATTACK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mucforest/box.h"
#include "mucforest/dataset.h"
#include "mucforest/forest.h"
#include "mucforest/reach_solver.h"

namespace mucforest {

struct AttackConfig {
  std::vector<double> kappa;    // per-feature region expansion step
  std::vector<bool> immutable;  // features that may never change
  Box bounds;                   // clamp box for expansion and every probe
  int n_candidates = 1000;
  double alpha = 0.05;          // stage-1 shrink ratio of the line search
  std::optional<double> epsilon;  // bisection tolerance; default 1e-4 ||x||
  double beta = 0.005;          // smoothing of the gradient estimate
  double eta0 = 0.2;            // step size, decays as eta0 / sqrt(t + 1)
  int iterations = 200;         // T
  std::vector<double> mu;       // per-feature perturbation scale
  std::uint64_t seed = 0;

  int candidate_rounds = 3;     // region resampling rounds, doubling each
  int max_resamples = 20;       // redraws of u when g is undefined

  // kappa = 0.05 * range, mu = range (1 for constant columns), bounds =
  // observed [min, max], nothing immutable.
  static AttackConfig Defaults(const FeatureStats& stats);

  void Validate(int n_features) const;
  double EpsilonFor(std::span<const double> x) const;
};

// Seed for the attack on one sample: seed XOR sample index.
std::uint64_t SampleSeed(std::uint64_t seed, std::size_t sample);

bool IsAdversarial(const Forest& forest, std::span<const double> x, int y);

struct Region {
  std::vector<double> tau;
  Box box;              // [x - tau, x + tau] intersected with the bounds
  std::vector<double> floor;
  std::vector<double> ceil;
  std::vector<double> witness;  // solver witness inside `box`
  std::vector<bool> in_core;    // feature appeared in some expansion core
  int expansions = 0;
};

// Grows tau from zero along the features of each successive core of the
// box query until the box contains a point not predicted as y. Throws
// NoRegionError when a core offers no feature that can still grow.
Region ExpandAdversarialRegion(const ReachSolver& solver,
                               std::span<const double> x, int y,
                               const AttackConfig& config);

struct Bracket {
  double v_out = 0.0;  // adversarial distance
  double v_in = 0.0;   // non-adversarial distance
};

// Distance search along theta from x: shrink by (1 - alpha) while the point
// stays adversarial, then bisect until v_out - v_in <= epsilon. Probes are
// clamped to config.bounds. Throws DirectionError if the point at v0 is not
// adversarial.
Bracket FineGrainedBinarySearch(const Forest& forest, std::span<const double> x,
                                int y, std::span<const double> theta, double v0,
                                const AttackConfig& config);

struct InitialDirection {
  std::vector<double> theta;
  double lambda = 0.0;
  int evaluated = 0;  // adversarial candidates searched
};

// Best direction among `candidates` (points; non-adversarial ones skipped).
// Throws NoCandidateError when none is adversarial.
InitialDirection SelectInitialDirection(
    const Forest& forest, std::span<const double> x, int y,
    const std::vector<std::vector<double>>& candidates,
    const AttackConfig& config);

// Samples n_candidates uniform points in the region (doubling for up to
// candidate_rounds rounds when none is adversarial), falling back to the
// region's solver witness.
InitialDirection SelectInitialDirectionInRegion(const Forest& forest,
                                                std::span<const double> x,
                                                int y, const Region& region,
                                                const AttackConfig& config);

struct OptimizationResult {
  std::vector<double> theta;  // unit direction
  double lambda = 0.0;        // g(theta)
  std::vector<double> trace;  // g after each iteration
  int accepted = 0;
};

// Randomized gradient-free minimization of g(theta), the adversarial
// distance along theta. Perturbations touch only features where
// `perturb_mask` is true; updates that do not lower g are discarded.
OptimizationResult ZeroOrderOptimize(const Forest& forest,
                                     std::span<const double> x, int y,
                                     std::span<const double> theta0,
                                     double lambda0,
                                     const std::vector<bool>& perturb_mask,
                                     const AttackConfig& config);

enum class AttackMode { kMuc, kBaseline };

std::string AttackModeName(AttackMode mode);
AttackMode ParseAttackMode(const std::string& name);

struct AttackResult {
  std::size_t sample = 0;
  AttackMode mode = AttackMode::kMuc;
  std::vector<double> x_org;
  std::vector<double> x_adv;
  double distance = 0.0;
  double initial_lambda = 0.0;
  std::vector<double> theta_final;
  std::vector<double> tau;
  std::vector<double> floor;
  std::vector<double> ceil;
  std::vector<double> trace;
  int iterations = 0;
  std::int64_t search_time_ms = 0;
  std::int64_t opt_time_ms = 0;
};

// muc: expand region, pick theta0 inside it, optimize over the features that
// were expanded. baseline: theta0 from up to n_candidates dataset rows of
// other classes, optimize over every mutable feature. Both use the same
// optimizer settings. `dataset` is only read in baseline mode.
AttackResult Attack(const ReachSolver& solver, std::span<const double> x, int y,
                    const AttackConfig& config, AttackMode mode,
                    const Dataset* dataset);

// {"sample", "mode", "x_org", "x_adv", "distance", "search_time_ms",
//  "opt_time_ms", "tau", "iterations"}
std::string AttackResultToJson(const AttackResult& result);
AttackResult AttackResultFromJson(const std::string& text);

double MeanL2Distance(std::span<const std::vector<double>> originals,
                      std::span<const std::vector<double>> adversarials);

}  // namespace mucforest

#endif  // MUCFOREST_ATTACK_H_
