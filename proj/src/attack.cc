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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"
#include "mucforest/errors.h"
#include "mucforest/muc.h"

namespace mucforest {
namespace {

using Clock = std::chrono::steady_clock;

std::int64_t MillisSince(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

double Norm(std::span<const double> v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

std::vector<double> Normalized(std::span<const double> v) {
  const double n = Norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw DirectionError("direction has zero or non-finite length");
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& a : out) a /= n;
  return out;
}

std::mt19937_64 Stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

// Adversarial probes along a ray from x, clamped to the bounds.
class RayProbe {
 public:
  RayProbe(const Forest& forest, std::span<const double> x, int y,
           const AttackConfig& config)
      : forest_(forest),
        x_(x),
        y_(y),
        bounds_(FreeDomainFor(config.bounds, x)),
        alpha_(config.alpha),
        epsilon_(config.EpsilonFor(x)),
        point_(x.size()) {}

  std::vector<double> Point(std::span<const double> unit, double v) const {
    std::vector<double> p(x_.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::clamp(x_[i] + v * unit[i], bounds_[i].lo, bounds_[i].hi);
    }
    return p;
  }

  bool Adversarial(std::span<const double> unit, double v) {
    for (std::size_t i = 0; i < point_.size(); ++i) {
      point_[i] =
          std::clamp(x_[i] + v * unit[i], bounds_[i].lo, bounds_[i].hi);
    }
    return forest_.PredictLabel(point_) != y_;
  }

  // Stage 1 shrinks toward x, stage 2 bisects the bracket.
  Bracket Search(std::span<const double> unit, double v0) {
    if (!Adversarial(unit, v0)) {
      throw DirectionError("starting point of the line search is not "
                           "adversarial");
    }
    Bracket b{v0, v0};
    while (Adversarial(unit, b.v_in)) {
      b.v_out = b.v_in;
      b.v_in = b.v_out * (1.0 - alpha_);
      if (b.v_in <= epsilon_ * 1e-9) {
        b.v_in = 0.0;
        if (Adversarial(unit, 0.0)) return {0.0, 0.0};
        break;
      }
    }
    return Bisect(unit, b);
  }

  // g(theta) warm-started at v_start: shrink if v_start is adversarial,
  // otherwise grow by (1 + alpha) up to `cap`.
  std::optional<double> Evaluate(std::span<const double> unit, double v_start,
                                 double cap) {
    if (Adversarial(unit, v_start)) return Search(unit, v_start).v_out;
    Bracket b{v_start, v_start};
    while (b.v_out <= cap) {
      b.v_in = b.v_out;
      b.v_out = b.v_in * (1.0 + alpha_);
      if (Adversarial(unit, b.v_out)) return Bisect(unit, b).v_out;
    }
    return std::nullopt;
  }

 private:
  Bracket Bisect(std::span<const double> unit, Bracket b) {
    while (b.v_out - b.v_in > epsilon_) {
      const double mid = b.v_in + (b.v_out - b.v_in) / 2.0;
      if (mid <= b.v_in || mid >= b.v_out) break;
      if (Adversarial(unit, mid)) {
        b.v_out = mid;
      } else {
        b.v_in = mid;
      }
    }
    return b;
  }

  const Forest& forest_;
  std::span<const double> x_;
  int y_;
  Box bounds_;
  double alpha_;
  double epsilon_;
  std::vector<double> point_;
};

}  // namespace

AttackConfig AttackConfig::Defaults(const FeatureStats& stats) {
  AttackConfig config;
  const int d = static_cast<int>(stats.features.size());
  std::vector<Interval> bounds;
  for (int i = 0; i < d; ++i) {
    const double range = stats.Range(i);
    config.kappa.push_back(0.05 * range);
    config.mu.push_back(range);
    bounds.push_back(
        Interval::Closed(stats.features[i].min, stats.features[i].max));
  }
  config.immutable.assign(d, false);
  config.bounds = Box(std::move(bounds));
  return config;
}

void AttackConfig::Validate(int n_features) const {
  const auto n = static_cast<std::size_t>(n_features);
  if (kappa.size() != n || mu.size() != n || immutable.size() != n ||
      bounds.size() != n_features) {
    throw InputError("attack config dimensions do not match the model");
  }
  for (int i = 0; i < n_features; ++i) {
    if (!immutable[i] && !(kappa[i] > 0.0)) {
      throw InputError("kappa must be > 0 for mutable features");
    }
    if (!(mu[i] > 0.0)) throw InputError("mu must be > 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must be in (0,1)");
  if (epsilon && !(*epsilon > 0.0)) throw InputError("epsilon must be > 0");
  if (!(beta > 0.0)) throw InputError("beta must be > 0");
  if (iterations < 0) throw InputError("iterations must be >= 0");
  if (n_candidates < 1) throw InputError("n_candidates must be >= 1");
}

double AttackConfig::EpsilonFor(std::span<const double> x) const {
  if (epsilon) return *epsilon;
  return std::max(1e-4 * Norm(x), 1e-6);
}

std::uint64_t SampleSeed(std::uint64_t seed, std::size_t sample) {
  return seed ^ static_cast<std::uint64_t>(sample);
}

bool IsAdversarial(const Forest& forest, std::span<const double> x, int y) {
  return forest.PredictLabel(x) != y;
}

Region ExpandAdversarialRegion(const ReachSolver& solver,
                               std::span<const double> x, int y,
                               const AttackConfig& config) {
  const int d = solver.forest().n_features();
  if (static_cast<int>(x.size()) != d) throw InputError("sample dimension");
  config.Validate(d);
  const Box bounds = FreeDomainFor(config.bounds, x);

  Region region;
  region.tau.assign(d, 0.0);
  region.in_core.assign(d, false);
  std::vector<int> all(d);
  std::iota(all.begin(), all.end(), 0);

  while (true) {
    region.box = Box::Around(x, region.tau).Intersect(bounds);
    SatResult probe = solver.Decide(region.box, Target::Not(y));
    if (probe.sat) {
      region.witness = std::move(probe.witness);
      break;
    }
    // Only features in S keep their tau-interval; the rest range over the
    // bounds.
    auto is_unsat = [&](std::span<const int> constrained) {
      Box box = bounds;
      for (int f : constrained) box[f] = region.box[f];
      return !solver.Decide(box, Target::Not(y)).sat;
    };
    Core core;
    try {
      core = ExtractMuc(all, is_unsat);
    } catch (const NoCoreError&) {
      // Cannot happen: the full set was just shown unsat.
      throw NoRegionError("inconsistent region query");
    }
    bool grew = false;
    for (int f : core) {
      region.in_core[f] = true;
      if (config.immutable[f]) continue;
      const double reach =
          std::max(x[f] - bounds[f].lo, bounds[f].hi - x[f]);
      if (region.tau[f] >= reach) continue;
      region.tau[f] = std::min(region.tau[f] + config.kappa[f], reach);
      grew = true;
    }
    if (!grew) {
      throw NoRegionError(
          core.empty()
              ? "no point inside the bounds is classified differently"
              : "every core feature is immutable or saturated at its bounds");
    }
    ++region.expansions;
  }
  for (int i = 0; i < d; ++i) {
    region.floor.push_back(region.box[i].lo);
    region.ceil.push_back(region.box[i].hi);
  }
  return region;
}

Bracket FineGrainedBinarySearch(const Forest& forest, std::span<const double> x,
                                int y, std::span<const double> theta, double v0,
                                const AttackConfig& config) {
  if (theta.size() != x.size()) throw InputError("direction dimension");
  const std::vector<double> unit = Normalized(theta);
  RayProbe probe(forest, x, y, config);
  return probe.Search(unit, v0);
}

InitialDirection SelectInitialDirection(
    const Forest& forest, std::span<const double> x, int y,
    const std::vector<std::vector<double>>& candidates,
    const AttackConfig& config) {
  RayProbe probe(forest, x, y, config);
  InitialDirection best;
  best.lambda = std::numeric_limits<double>::infinity();
  std::vector<double> theta(x.size());
  for (const auto& candidate : candidates) {
    if (!IsAdversarial(forest, candidate, y)) continue;
    for (std::size_t i = 0; i < x.size(); ++i) theta[i] = candidate[i] - x[i];
    const double v0 = Norm(theta);
    if (!(v0 > 0.0)) continue;
    Bracket b;
    try {
      b = probe.Search(Normalized(theta), v0);
    } catch (const DirectionError&) {
      continue;  // rounding moved the probe off the candidate's cell
    }
    ++best.evaluated;
    if (b.v_out < best.lambda) {
      best.lambda = b.v_out;
      best.theta = theta;
    }
  }
  if (best.evaluated == 0) {
    throw NoCandidateError("no adversarial candidate among " +
                           std::to_string(candidates.size()) + " points");
  }
  return best;
}

InitialDirection SelectInitialDirectionInRegion(const Forest& forest,
                                                std::span<const double> x,
                                                int y, const Region& region,
                                                const AttackConfig& config) {
  std::mt19937_64 rng = Stream(config.seed, 1);
  std::size_t count = config.n_candidates;
  for (int round = 0; round < std::max(1, config.candidate_rounds); ++round) {
    std::vector<std::vector<double>> candidates(count);
    for (auto& c : candidates) {
      c.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        std::uniform_real_distribution<double> u(region.floor[i],
                                                 region.ceil[i]);
        c[i] = region.floor[i] == region.ceil[i] ? region.floor[i] : u(rng);
      }
    }
    try {
      return SelectInitialDirection(forest, x, y, candidates, config);
    } catch (const NoCandidateError&) {
      count *= 2;
    }
  }
  if (!region.witness.empty()) {
    return SelectInitialDirection(forest, x, y, {region.witness}, config);
  }
  throw NoCandidateError("no adversarial point sampled in the region");
}

OptimizationResult ZeroOrderOptimize(const Forest& forest,
                                     std::span<const double> x, int y,
                                     std::span<const double> theta0,
                                     double lambda0,
                                     const std::vector<bool>& perturb_mask,
                                     const AttackConfig& config) {
  const std::size_t d = x.size();
  if (theta0.size() != d || perturb_mask.size() != d) {
    throw InputError("optimizer dimension mismatch");
  }
  OptimizationResult out;
  out.theta = Normalized(theta0);
  out.lambda = lambda0;

  // Relative per-feature scales, largest 1.
  std::vector<double> scale(d, 0.0);
  double max_mu = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    if (perturb_mask[i]) max_mu = std::max(max_mu, config.mu[i]);
  }
  if (max_mu <= 0.0 || config.iterations == 0) return out;
  for (std::size_t i = 0; i < d; ++i) {
    if (perturb_mask[i]) scale[i] = config.mu[i] / max_mu;
  }

  RayProbe probe(forest, x, y, config);
  std::mt19937_64 rng = Stream(config.seed, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> u(d), perturbed(d), step(d);

  for (int t = 0; t < config.iterations; ++t) {
    const double eta = config.eta0 / std::sqrt(t + 1.0);
    const double g = out.lambda;
    for (int attempt = 0; attempt <= config.max_resamples; ++attempt) {
      for (std::size_t i = 0; i < d; ++i) {
        u[i] = perturb_mask[i] ? gauss(rng) * scale[i] : 0.0;
        perturbed[i] = out.theta[i] + config.beta * u[i];
      }
      const double n = Norm(perturbed);
      if (!(n > 0.0)) continue;
      for (double& p : perturbed) p /= n;
      const std::optional<double> g_perturbed =
          probe.Evaluate(perturbed, g, 4.0 * g);
      if (!g_perturbed) continue;

      // Gradient estimate in the mu-scaled coordinates, mapped back. The
      // step is taken relative to g so it does not depend on distance units.
      const double slope = (*g_perturbed - g) / config.beta;
      for (std::size_t i = 0; i < d; ++i) {
        step[i] = out.theta[i] - eta * slope * u[i] / g;
      }
      if (!(Norm(step) > 0.0)) break;
      const std::vector<double> candidate = Normalized(step);
      const std::optional<double> g_next = probe.Evaluate(candidate, g, g);
      if (g_next && *g_next < g) {
        out.theta = candidate;
        out.lambda = *g_next;
        ++out.accepted;
      }
      break;
    }
    out.trace.push_back(out.lambda);
  }
  return out;
}

std::string AttackModeName(AttackMode mode) {
  return mode == AttackMode::kMuc ? "muc" : "baseline";
}

AttackMode ParseAttackMode(const std::string& name) {
  if (name == "muc") return AttackMode::kMuc;
  if (name == "baseline") return AttackMode::kBaseline;
  throw InputError("unknown attack mode \"" + name + "\"");
}

AttackResult Attack(const ReachSolver& solver, std::span<const double> x, int y,
                    const AttackConfig& config, AttackMode mode,
                    const Dataset* dataset) {
  const Forest& forest = solver.forest();
  const int d = forest.n_features();
  if (static_cast<int>(x.size()) != d) throw InputError("sample dimension");
  config.Validate(d);
  if (forest.PredictLabel(x) != y) {
    throw InputError("attack needs a sample predicted as its label");
  }

  AttackResult result;
  result.mode = mode;
  result.x_org.assign(x.begin(), x.end());
  result.tau.assign(d, 0.0);

  const auto search_start = Clock::now();
  InitialDirection init;
  std::vector<bool> mask(d, false);
  if (mode == AttackMode::kMuc) {
    const Region region = ExpandAdversarialRegion(solver, x, y, config);
    init = SelectInitialDirectionInRegion(forest, x, y, region, config);
    for (int i = 0; i < d; ++i) mask[i] = region.tau[i] > 0.0;
    result.tau = region.tau;
    result.floor = region.floor;
    result.ceil = region.ceil;
  } else {
    if (!dataset) throw InputError("baseline attack needs a dataset");
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < dataset->size(); ++i) {
      if (dataset->label(i) != y) others.push_back(i);
    }
    std::mt19937_64 rng = Stream(config.seed, 3);
    std::shuffle(others.begin(), others.end(), rng);
    others.resize(std::min<std::size_t>(others.size(), config.n_candidates));
    std::vector<std::vector<double>> candidates;
    for (std::size_t i : others) {
      auto row = dataset->row(i);
      std::vector<double> c(row.begin(), row.end());
      for (int f = 0; f < d; ++f) {
        if (config.immutable[f]) c[f] = x[f];
      }
      candidates.push_back(std::move(c));
    }
    init = SelectInitialDirection(forest, x, y, candidates, config);
    for (int i = 0; i < d; ++i) mask[i] = !config.immutable[i];
  }
  result.search_time_ms = MillisSince(search_start);
  result.initial_lambda = init.lambda;

  const auto opt_start = Clock::now();
  const OptimizationResult opt =
      ZeroOrderOptimize(forest, x, y, init.theta, init.lambda, mask, config);
  result.opt_time_ms = MillisSince(opt_start);

  RayProbe probe(forest, x, y, config);
  result.theta_final = opt.theta;
  result.x_adv = probe.Point(opt.theta, opt.lambda);
  result.trace = opt.trace;
  result.iterations = static_cast<int>(opt.trace.size());
  double sq = 0.0;
  for (int i = 0; i < d; ++i) {
    const double diff = result.x_adv[i] - x[i];
    sq += diff * diff;
  }
  result.distance = std::sqrt(sq);
  return result;
}

std::string AttackResultToJson(const AttackResult& r) {
  nlohmann::ordered_json j;
  j["sample"] = r.sample;
  j["mode"] = AttackModeName(r.mode);
  j["x_org"] = r.x_org;
  j["x_adv"] = r.x_adv;
  j["distance"] = r.distance;
  j["search_time_ms"] = r.search_time_ms;
  j["opt_time_ms"] = r.opt_time_ms;
  j["tau"] = r.tau;
  j["iterations"] = r.iterations;
  return j.dump();
}

AttackResult AttackResultFromJson(const std::string& text) {
  AttackResult r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.sample = j.at("sample").get<std::size_t>();
    r.mode = ParseAttackMode(j.at("mode").get<std::string>());
    r.x_org = j.at("x_org").get<std::vector<double>>();
    r.x_adv = j.at("x_adv").get<std::vector<double>>();
    r.distance = j.at("distance").get<double>();
    r.search_time_ms = j.at("search_time_ms").get<std::int64_t>();
    r.opt_time_ms = j.at("opt_time_ms").get<std::int64_t>();
    r.tau = j.at("tau").get<std::vector<double>>();
    r.iterations = j.at("iterations").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("attack result: ") + e.what());
  }
  if (r.x_org.size() != r.x_adv.size()) {
    throw ParseError("attack result: x_org and x_adv differ in length");
  }
  return r;
}

double MeanL2Distance(std::span<const std::vector<double>> originals,
                      std::span<const std::vector<double>> adversarials) {
  if (originals.size() != adversarials.size() || originals.empty()) {
    throw InputError("mean distance needs equally many, non-zero pairs");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < originals.size(); ++k) {
    if (originals[k].size() != adversarials[k].size()) {
      throw InputError("pair dimension mismatch");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < originals[k].size(); ++i) {
      const double diff = originals[k][i] - adversarials[k][i];
      sq += diff * diff;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(originals.size());
}

}  // namespace mucforest
