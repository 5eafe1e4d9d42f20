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

// mucforest: train, explain and attack random forests from the shell.
//
// Every flag overrides the matching key of the --config JSON document.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mucforest/attack.h"
#include "mucforest/config.h"
#include "mucforest/dataset.h"
#include "mucforest/errors.h"
#include "mucforest/imputation.h"
#include "mucforest/model_io.h"
#include "mucforest/muc.h"
#include "mucforest/parallel.h"
#include "mucforest/reach_solver.h"
#include "mucforest/report.h"
#include "mucforest/selftest.h"
#include "mucforest/shapley.h"
#include "mucforest/trainer.h"

namespace mucforest {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAnalysis = 2;

struct Options {
  RunConfig run;
  std::string config_path;
  std::string out;
  std::vector<std::size_t> samples;
  std::string mode = "muc";
  std::string free_domain;
  std::string immutable;
  std::string shapley_mode = "auto";
  std::string table_split = "test";
  std::string plot = "none";
  std::string ns = "0,2,4,6";
  std::string ranking;
  std::string attack_path;
  std::vector<std::string> verbs;
  int shuffles = 10;
  int forests = 200;
  bool no_bootstrap = false;
  bool json = false;
};

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> ParseIntList(const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : SplitList(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InputError("not an integer list: \"" + text + "\"");
    }
  }
  return out;
}

// The config file has to be read before CLI11 binds flags over it.
std::string FindConfigPath(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return "";
}

void Emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw InputError("cannot write \"" + o.out + "\"");
  file << text;
}

void Require(const std::string& value, const char* flag) {
  if (value.empty()) throw InputError(std::string(flag) + " is required");
}

Dataset LoadData(const Options& o) {
  Require(o.run.data, "--data");
  return LoadCsv(o.run.data, o.run.label);
}

Forest LoadForest(const Options& o) {
  Require(o.run.model, "--model");
  return LoadModelFile(o.run.model);
}

void CheckCompatible(const Forest& forest, const Dataset& data) {
  if (static_cast<int>(data.feature_names().size()) != forest.n_features()) {
    throw InputError("dataset has " +
                     std::to_string(data.feature_names().size()) +
                     " features, model expects " +
                     std::to_string(forest.n_features()));
  }
}

std::vector<std::size_t> SelectSamples(const Options& o, const Dataset& data) {
  if (o.samples.empty()) {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return all;
  }
  for (std::size_t s : o.samples) {
    if (s >= data.size()) {
      throw InputError("sample " + std::to_string(s) + " out of range");
    }
  }
  return o.samples;
}

int RunTrain(const Options& o) {
  Require(o.out, "--out");
  const Dataset data = LoadData(o);
  TrainParams params = o.run.train;
  if (o.no_bootstrap) params.bootstrap = false;
  const TrainTestSplit split = SplitDataset(data, o.run.split, o.run.seed);
  TrainDiagnostics diag;
  const Forest forest = TrainForest(split.train, params, &diag);
  SaveModelFile(forest, o.out);
  nlohmann::ordered_json j;
  j["train_rows"] = split.train.size();
  j["test_rows"] = split.test.size();
  j["test_accuracy"] =
      split.test.size() ? EvaluateAccuracy(forest, split.test) : 0.0;
  j["degenerate"] = diag.degenerate;
  std::cout << j.dump() << "\n";
  return kExitOk;
}

int RunPredict(const Options& o) {
  const Forest forest = LoadForest(o);
  const Dataset data = LoadData(o);
  CheckCompatible(forest, data);
  std::string csv = "sample,label,prediction\n";
  for (std::size_t s : SelectSamples(o, data)) {
    csv += std::to_string(s) + "," + std::to_string(data.label(s)) + "," +
           std::to_string(forest.PredictLabel(data.row(s))) + "\n";
  }
  Emit(o, csv);
  return kExitOk;
}

Box FreeDomainFor(const Options& o, const Dataset& data) {
  return FreeDomain(o.run.free_domain, ComputeFeatureStats(data));
}

int RunExplainLocal(const Options& o) {
  const Forest forest = LoadForest(o);
  const Dataset data = LoadData(o);
  CheckCompatible(forest, data);
  ExplanationCache cache(forest, FreeDomainFor(o, data));
  const std::vector<std::size_t> samples = SelectSamples(o, data);
  std::vector<Explanation> results(samples.size());
  ParallelFor(samples.size(), o.run.jobs,
              [&](std::size_t k) { results[k] = cache.Get(data, samples[k]); });
  std::string text;
  bool missing = false;
  for (const Explanation& e : results) {
    text += ExplanationToJson(e, forest.feature_names()) + "\n";
    missing |= !e.core.has_value();
  }
  Emit(o, text);
  if (missing && samples.size() == 1) {
    std::cerr << "error: sample " << samples[0]
              << " is misclassified, no core exists\n";
    return kExitAnalysis;
  }
  return kExitOk;
}

struct GlobalResult {
  ImportanceVector importance;
  MucTable table;
  std::vector<Core> cores;
};

GlobalResult ExplainGlobal(const Options& o, const Forest& forest,
                           const Dataset& data) {
  const Box domain = FreeDomainFor(o, data);
  Dataset table_rows;
  if (o.table_split == "all") {
    table_rows = data;
  } else {
    TrainTestSplit split = SplitDataset(data, o.run.split, o.run.seed);
    if (o.table_split == "test") {
      table_rows = std::move(split.test);
    } else if (o.table_split == "train") {
      table_rows = std::move(split.train);
    } else {
      throw InputError("--table-split must be test, train or all");
    }
  }
  ExplanationCache cache(forest, domain);
  const std::vector<Explanation> explanations =
      cache.ExplainAll(table_rows, o.run.jobs);
  GlobalResult result;
  result.table = MucTable::FromExplanations(explanations, forest.n_features(),
                                            o.run.class_of_interest);
  for (const Explanation& e : explanations) {
    if (e.core) result.cores.push_back(*e.core);
  }
  ShapleyOptions so;
  so.seed = o.run.seed;
  so.iterations = o.run.shapley_iterations;
  so.jobs = o.run.jobs;
  if (o.shapley_mode == "exact") {
    so.mode = ShapleyMode::kExact;
  } else if (o.shapley_mode == "sampled") {
    so.mode = ShapleyMode::kSampled;
  } else if (o.shapley_mode == "auto") {
    so.mode = forest.n_features() <= so.exact_limit ? ShapleyMode::kExact
                                                    : ShapleyMode::kSampled;
  } else {
    throw InputError("--shapley-mode must be auto, exact or sampled");
  }
  result.importance = MShapley(result.table, so);
  return result;
}

int RunExplainGlobal(const Options& o) {
  const Forest forest = LoadForest(o);
  const Dataset data = LoadData(o);
  CheckCompatible(forest, data);
  const GlobalResult g = ExplainGlobal(o, forest, data);
  const auto& names = forest.feature_names();
  if (o.plot == "bars") {
    Emit(o, ShapleyBarsCsv(names, g.importance.phi));
    return kExitOk;
  }
  if (o.plot == "histogram") {
    std::vector<std::size_t> sizes;
    for (const Core& c : g.cores) sizes.push_back(c.size());
    Emit(o, CoreSizeHistogramCsv(sizes));
    return kExitOk;
  }
  if (o.plot != "none") {
    throw InputError("--plot must be none, bars or histogram");
  }
  nlohmann::ordered_json j;
  j["class"] = o.run.class_of_interest;
  j["mode"] = g.importance.mode == ShapleyMode::kExact ? "exact" : "sampled";
  j["iterations"] = g.importance.iterations;
  j["seed"] = g.importance.seed;
  j["rows"] = g.table.rows.size();
  j["skipped"] = g.table.skipped;
  nlohmann::ordered_json phi = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < names.size(); ++i) {
    phi[names[i]] = g.importance.phi[i];
  }
  j["phi"] = phi;
  nlohmann::ordered_json ranking = nlohmann::ordered_json::array();
  for (int f : RankByMagnitude(g.importance.phi)) ranking.push_back(names[f]);
  j["ranking"] = ranking;
  if (!g.cores.empty()) {
    const FeatureUtilization u =
        ComputeFeatureUtilization(g.cores, forest.n_features());
    j["core_size_mode"] = u.mode;
    j["core_size_average"] = u.average;
    j["utilization"] = u.utilization;
  }
  Emit(o, j.dump(2) + "\n");
  return kExitOk;
}

AttackConfig AttackConfigFor(const Options& o, const Dataset& data,
                             const Forest& forest) {
  RunConfig run = o.run;
  if (!o.immutable.empty()) run.immutable = SplitList(o.immutable);
  return BuildAttackConfig(run, ComputeFeatureStats(data),
                           forest.feature_names());
}

int RunAttack(const Options& o) {
  const Forest forest = LoadForest(o);
  const Dataset data = LoadData(o);
  CheckCompatible(forest, data);
  const AttackMode mode = ParseAttackMode(o.mode);
  const AttackConfig base = AttackConfigFor(o, data, forest);
  const ReachSolver solver(forest);
  const std::vector<std::size_t> samples = SelectSamples(o, data);

  std::vector<std::string> lines(samples.size());
  std::vector<std::string> errors(samples.size());
  ParallelFor(samples.size(), o.run.jobs, [&](std::size_t k) {
    const std::size_t s = samples[k];
    AttackConfig cfg = base;
    cfg.seed = SampleSeed(base.seed, s);
    const auto x = data.row(s);
    try {
      AttackResult r =
          Attack(solver, x, forest.PredictLabel(x), cfg, mode, &data);
      r.sample = s;
      lines[k] = AttackResultToJson(r) + "\n";
    } catch (const AnalysisError& e) {
      errors[k] = e.what();
    }
  });
  std::string text;
  int failed = 0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    text += lines[k];
    if (!errors[k].empty()) {
      ++failed;
      std::cerr << "error: sample " << samples[k] << ": " << errors[k] << "\n";
    }
  }
  Emit(o, text);
  return failed ? kExitAnalysis : kExitOk;
}

VerbTable ParseVerbs(const Options& o) {
  VerbTable verbs = o.run.verbs;
  for (const std::string& entry : o.verbs) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw InputError("--verb expects name=Verb, got \"" + entry + "\"");
    }
    verbs[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return verbs;
}

int RunReport(const Options& o) {
  const Forest forest = LoadForest(o);
  Require(o.attack_path, "--attack");
  std::ifstream in(o.attack_path);
  if (!in) throw InputError("cannot open \"" + o.attack_path + "\"");
  const VerbTable verbs = ParseVerbs(o);
  std::vector<std::string> immutable_names = o.run.immutable;
  if (!o.immutable.empty()) immutable_names = SplitList(o.immutable);
  const std::vector<bool> immutable =
      ImmutableMask(immutable_names, forest.feature_names());

  std::string text;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const AttackResult r = AttackResultFromJson(line);
    if (!o.samples.empty() &&
        std::find(o.samples.begin(), o.samples.end(), r.sample) ==
            o.samples.end()) {
      continue;
    }
    if (static_cast<int>(r.x_org.size()) != forest.n_features()) {
      throw InputError("attack record does not match the model");
    }
    if (forest.PredictLabel(r.x_org) == forest.PredictLabel(r.x_adv)) {
      throw NoCandidateError("sample " + std::to_string(r.sample) +
                             ": adversarial point keeps the prediction");
    }
    const auto recs =
        Recommend(r.x_org, r.x_adv, forest.feature_names(), immutable, verbs);
    if (!first) text += o.json ? "" : "\n";
    first = false;
    if (o.json) {
      nlohmann::ordered_json j;
      j["sample"] = r.sample;
      j["recommendations"] = nlohmann::ordered_json::parse(
          RecommendationsToJson(recs));
      text += j.dump() + "\n";
    } else {
      const std::string id = o.run.client_id + " " + std::to_string(r.sample);
      text += FormatReport(id, recs);
    }
  }
  Emit(o, text);
  return kExitOk;
}

int RunEvalImputation(const Options& o) {
  const Dataset data = LoadData(o);
  const auto& names = data.feature_names();
  std::vector<int> ranking;
  if (!o.ranking.empty()) {
    for (const std::string& name : SplitList(o.ranking)) {
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw InputError("unknown feature \"" + name + "\" in --ranking");
      }
      ranking.push_back(static_cast<int>(it - names.begin()));
    }
  } else {
    const Forest forest = LoadForest(o);
    CheckCompatible(forest, data);
    ranking = RankByMagnitude(ExplainGlobal(o, forest, data).importance.phi);
  }
  ImputationOptions io;
  io.ns = ParseIntList(o.ns);
  io.shuffles = o.shuffles;
  io.train_fraction = o.run.split;
  io.seed = o.run.seed;
  io.params = o.run.train;
  if (o.no_bootstrap) io.params.bootstrap = false;
  io.jobs = o.run.jobs;
  Emit(o, ImputationCurveCsv(EvaluateMeanImputation(data, ranking, io)));
  return kExitOk;
}

int RunSelfTest(const Options& o) {
  const SelfTestSummary s = RunOracleSelfTest(o.forests, o.run.seed);
  std::printf("forests=%d queries=%d disagreements=%d bad_witnesses=%d\n",
              s.forests, s.queries, s.disagreements, s.bad_witnesses);
  if (!s.ok()) {
    std::fprintf(stderr, "error: %s\n", s.first_failure.c_str());
    return kExitAnalysis;
  }
  return kExitOk;
}

int Main(int argc, char** argv) {
  Options o;
  o.config_path = FindConfigPath(argc, argv);
  try {
    if (!o.config_path.empty()) o.run = LoadRunConfig(o.config_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  RunConfig& run = o.run;

  CLI::App app{"Explain and attack random-forest classifiers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config_path, "JSON run configuration");
  app.add_option("--seed", run.seed, "Global seed")->each([&](const std::string&) {
    run.train.seed = run.seed;
  });
  app.add_option("--jobs", run.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Output path (default stdout)");

  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--data", run.data, "CSV dataset");
    sub->add_option("--label", run.label, "Label column name");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", run.model, "Model JSON");
  };
  auto add_train = [&](CLI::App* sub) {
    sub->add_option("--n-trees", run.train.n_trees, "Trees in the forest");
    sub->add_option("--max-depth", run.train.max_depth, "Maximum tree depth");
    sub->add_option("--min-samples-leaf", run.train.min_samples_leaf,
                    "Minimum rows per leaf");
    sub->add_option("--features-per-split", run.train.features_per_split,
                    "Features tried per split (default sqrt(d))");
    sub->add_flag("--no-bootstrap", o.no_bootstrap, "Train on the full split");
  };
  auto add_split = [&](CLI::App* sub) {
    sub->add_option("--split", run.split, "Train fraction")
        ->check(CLI::Range(0.0, 1.0));
  };
  auto add_samples = [&](CLI::App* sub) {
    sub->add_option("--sample", o.samples, "Sample indices (default all)")
        ->delimiter(',');
  };
  auto add_domain = [&](CLI::App* sub) {
    sub->add_option("--free-domain", o.free_domain,
                    "Range of unconstrained features")
        ->check(CLI::IsMember({"unbounded", "data"}));
  };
  auto add_global = [&](CLI::App* sub) {
    sub->add_option("--class", run.class_of_interest, "Class of interest");
    sub->add_option("--M", run.shapley_iterations, "Sampled iterations");
    sub->add_option("--shapley-mode", o.shapley_mode, "auto, exact or sampled");
    sub->add_option("--table-split", o.table_split,
                    "Rows explained for the table: test, train or all");
    add_split(sub);
    add_domain(sub);
  };

  CLI::App* train = app.add_subcommand("train", "Train a forest");
  add_data(train);
  add_split(train);
  add_train(train);

  CLI::App* predict = app.add_subcommand("predict", "Predict labels");
  add_model(predict);
  add_data(predict);
  add_samples(predict);

  CLI::App* local = app.add_subcommand("explain-local", "Per-sample cores");
  add_model(local);
  add_data(local);
  add_samples(local);
  add_domain(local);

  CLI::App* global = app.add_subcommand("explain-global", "Feature importance");
  add_model(global);
  add_data(global);
  add_global(global);
  global->add_option("--plot", o.plot, "none, bars or histogram");

  CLI::App* attack = app.add_subcommand("attack", "Adversarial samples");
  add_model(attack);
  add_data(attack);
  add_samples(attack);
  attack->add_option("--mode", o.mode, "muc or baseline")
      ->check(CLI::IsMember({"muc", "baseline"}));
  attack->add_option("--immutable", o.immutable, "Comma-separated names");
  attack->add_option("--kappa", run.attack.kappa_fraction,
                     "Expansion step as a fraction of the range");
  attack->add_option("--candidates", run.attack.n_candidates,
                     "Initial candidates");
  attack->add_option("--alpha", run.attack.alpha, "Line-search shrink ratio");
  attack->add_option("--epsilon", run.attack.epsilon, "Bisection tolerance");
  attack->add_option("--beta", run.attack.beta, "Gradient smoothing");
  attack->add_option("--eta0", run.attack.eta0, "Initial step size");
  attack->add_option("--iterations", run.attack.iterations,
                     "Optimization iterations");

  CLI::App* report = app.add_subcommand("report", "User-centered reports");
  add_model(report);
  add_samples(report);
  report->add_option("--attack", o.attack_path, "Attack results (JSON lines)");
  report->add_option("--immutable", o.immutable, "Comma-separated names");
  report->add_option("--client-id", run.client_id, "Name used in the header");
  report->add_option("--verb", o.verbs, "Verb override, name=Verb");
  report->add_flag("--json", o.json, "Emit recommendations as JSON");

  CLI::App* impute = app.add_subcommand("eval-imputation",
                                        "Accuracy under mean imputation");
  add_model(impute);
  add_data(impute);
  add_train(impute);
  add_global(impute);
  impute->add_option("--Ns", o.ns, "Comma-separated feature counts");
  impute->add_option("--shuffles", o.shuffles, "Random splits per count")
      ->check(CLI::PositiveNumber);
  impute->add_option("--ranking", o.ranking,
                     "Comma-separated feature order (default: importance)");

  CLI::App* selftest =
      app.add_subcommand("selftest-oracle", "Solver against the grid oracle");
  selftest->add_option("--forests", o.forests, "Random forests to check")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!o.free_domain.empty()) {
      run.free_domain = ParseFreeDomainPolicy(o.free_domain);
    }
    run.Validate();
    if (*train) return RunTrain(o);
    if (*predict) return RunPredict(o);
    if (*local) return RunExplainLocal(o);
    if (*global) return RunExplainGlobal(o);
    if (*attack) return RunAttack(o);
    if (*report) return RunReport(o);
    if (*impute) return RunEvalImputation(o);
    if (*selftest) return RunSelfTest(o);
  } catch (const AnalysisError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAnalysis;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace mucforest

int main(int argc, char** argv) { return mucforest::Main(argc, argv); }
