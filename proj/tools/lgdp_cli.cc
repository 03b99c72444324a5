// Copyright 2026 The LGDP Stats Authors
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

// lgdp: privatize labeled datasets, run tests and intervals on them,
// execute experiment sweeps and the UCI Adult experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lgdp/errors.h"
#include "lgdp/io.h"
#include "lgdp/mechanisms.h"
#include "lgdp/simlab.h"

namespace {

using lgdp::Error;
using lgdp::ErrorCode;
using nlohmann::json;

std::optional<lgdp::MechanismSpec> MakeMechanism(const std::string& name, int groups,
                                                 std::optional<double> epsilon,
                                                 std::optional<int> k) {
  if (name == "none") return std::nullopt;
  if (!epsilon) throw Error(ErrorCode::kInvalidArgument, "--epsilon is required with --mech");
  switch (lgdp::ParseMechanismKind(name)) {
    case lgdp::MechanismKind::kRandResponse:
      return lgdp::MechanismSpec::RandResponse(groups, *epsilon);
    case lgdp::MechanismKind::kBitFlip:
      return lgdp::MechanismSpec::BitFlip(groups, *epsilon);
    case lgdp::MechanismKind::kSubset:
      return k ? lgdp::MechanismSpec::Subset(groups, *epsilon, *k)
               : lgdp::MechanismSpec::SubsetOptimal(groups, *epsilon);
  }
  return std::nullopt;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::string Dump(const json& j) { return j.dump(2) + "\n"; }

struct PrivatizeArgs {
  std::string input;
  std::string output;
  std::string mech;
  double epsilon = 0.0;
  std::optional<int> k;
  std::optional<int> groups;
  std::uint64_t seed = 0;
};

void RunPrivatize(const PrivatizeArgs& a) {
  lgdp::LabeledDataset data = lgdp::ReadLabeledCsv(a.input, a.groups);
  const auto mech = MakeMechanism(a.mech, data.groups, a.epsilon, a.k);
  if (!mech) throw Error(ErrorCode::kInvalidArgument, "privatize needs a mechanism");
  lgdp::LabeledDataset out = lgdp::PrivatizeDataset(data, *mech, a.seed);
  out.outcomes.clear();
  out.treated.clear();
  WriteText(a.output, lgdp::FormatLabeledCsv(out));
}

struct TestArgs {
  std::string labels;
  std::string outcomes;
  std::string scenario;
  std::string mech = "none";
  std::optional<double> epsilon;
  std::optional<int> k;
  std::optional<int> groups;
  double delta = 0.0;
  double alpha = 0.05;
  double lambda = 0.5;
  std::vector<int> pair{1, 2};
  double tau = lgdp::kDefaultCiTolerance;
  bool ci = false;
  std::string output;
};

void RunTest(const TestArgs& a, bool force_ci) {
  lgdp::LabeledDataset data = lgdp::ReadLabeledCsv(a.labels, a.groups);
  if (!a.outcomes.empty()) data = lgdp::JoinOnId(data, lgdp::ReadOutcomeCsv(a.outcomes));
  lgdp::AnalysisOptions o;
  o.scenario = lgdp::ParseScenario(a.scenario);
  o.mechanism = MakeMechanism(a.mech, data.groups, a.epsilon, a.k);
  o.delta = a.delta;
  o.alpha = a.alpha;
  o.lambda = a.lambda;
  if (a.pair.size() != 2) throw Error(ErrorCode::kInvalidArgument, "--pair takes two groups");
  o.pair_j = a.pair[0] - 1;
  o.pair_l = a.pair[1] - 1;
  o.with_ci = a.ci || force_ci;
  o.tau = a.tau;
  WriteText(a.output, Dump(lgdp::AnalyzeDataset(data, o)));
}

struct SweepArgs {
  std::string config;
  std::string json_out;
  std::string csv_out;
  bool fast = false;
  std::optional<int> trials;
  std::optional<int> threads;
};

void RunSweepCommand(const SweepArgs& a) {
  std::string kind;
  lgdp::ExperimentConfig c = lgdp::LoadExperimentConfig(a.config, &kind);
  if (a.fast) c.trials = lgdp::kFastTrials;
  if (a.trials) c.trials = *a.trials;
  if (a.threads) c.threads = *a.threads;
  c.Validate();
  if (kind == "calibration") {
    if (!a.csv_out.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "calibration output is JSON only");
    }
    WriteText(a.json_out, Dump(lgdp::ToJson(lgdp::RunNullCalibration(c))));
    return;
  }
  const lgdp::SweepResult r =
      kind == "coverage" ? lgdp::RunCoverageSweep(c) : lgdp::RunPowerSweep(c);
  if (!a.csv_out.empty()) WriteText(a.csv_out, lgdp::SweepCsv(r));
  if (!a.json_out.empty() || a.csv_out.empty()) WriteText(a.json_out, Dump(lgdp::ToJson(r)));
}

struct AdultArgs {
  std::string data;
  std::string test;
  std::string attribute = "sex";
  std::string mech = "rr";
  std::vector<double> epsilons{0.5, 1.0, 2.0, 3.0};
  int trials = 200;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::string output;
};

void RunAdult(const AdultArgs& a) {
  const lgdp::AdultData train = lgdp::LoadAdult(a.data);
  std::optional<lgdp::AdultData> reference;
  if (!a.test.empty()) reference = lgdp::LoadAdult(a.test);
  lgdp::AdultExperimentOptions o;
  o.attribute = a.attribute;
  o.mechanism = lgdp::ParseMechanismKind(a.mech);
  o.epsilons = a.epsilons;
  o.trials = a.trials;
  o.alpha = a.alpha;
  o.seed = a.seed;
  json out = lgdp::RunAdultExperiment(train, reference ? &*reference : nullptr, o);
  out["raw_rows"] = train.raw_rows;
  WriteText(a.output, Dump(out));
}

void AddTestOptions(CLI::App* cmd, TestArgs& a) {
  cmd->add_option("--labels", a.labels, "Label CSV (id + group or grp_* columns)")->required();
  cmd->add_option("--outcomes", a.outcomes, "Outcome CSV joined on id");
  cmd->add_option("--scenario", a.scenario,
                  "proportions|independence|means|anova|pairwise|abtest")
      ->required();
  cmd->add_option("--mech", a.mech, "Mechanism the labels went through: none|rr|bitflip|subset")
      ->capture_default_str();
  cmd->add_option("--epsilon", a.epsilon, "Privacy parameter");
  cmd->add_option("--k", a.k, "Subset size (default: optimal)");
  cmd->add_option("--groups", a.groups, "Group count when labels are indices");
  cmd->add_option("--delta", a.delta, "Hypothesized difference")->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "Significance level")->capture_default_str();
  cmd->add_option("--lambda", a.lambda, "Treatment probability (abtest)")->capture_default_str();
  cmd->add_option("--pair", a.pair, "Two 1-based groups (pairwise)")->expected(2);
  cmd->add_option("--tau", a.tau, "CI bisection tolerance")->capture_default_str();
  cmd->add_option("-o,--output", a.output, "Output JSON file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Statistical tests with locally privatized group labels"};
  app.require_subcommand(1);

  PrivatizeArgs pa;
  CLI::App* privatize = app.add_subcommand("privatize", "Privatize the group labels of a CSV");
  privatize->add_option("--input", pa.input, "Input CSV")->required();
  privatize->add_option("--output", pa.output, "Output CSV")->required();
  privatize->add_option("--mech", pa.mech, "rr|bitflip|subset")->required();
  privatize->add_option("--epsilon", pa.epsilon, "Privacy parameter")->required();
  privatize->add_option("--k", pa.k, "Subset size (default: optimal)");
  privatize->add_option("--groups", pa.groups, "Group count when labels are indices");
  privatize->add_option("--seed", pa.seed, "Random seed")->required();

  TestArgs ta;
  CLI::App* test = app.add_subcommand("test", "Run a chi-square test on a dataset");
  AddTestOptions(test, ta);
  test->add_flag("--ci", ta.ci, "Also compute the confidence interval");

  TestArgs ca;
  CLI::App* ci = app.add_subcommand("ci", "Confidence interval for the tested difference");
  AddTestOptions(ci, ca);

  SweepArgs sa;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a power/coverage/calibration sweep");
  sweep->add_option("--config", sa.config, "Sweep config JSON")->required();
  sweep->add_option("--json", sa.json_out, "JSON output file (default stdout)");
  sweep->add_option("--csv", sa.csv_out, "CSV output file");
  sweep->add_flag("--fast", sa.fast, "Use the fast trial count");
  sweep->add_option("--trials", sa.trials, "Override the trial count");
  sweep->add_option("--threads", sa.threads, "Worker threads");

  AdultArgs aa;
  CLI::App* adult = app.add_subcommand("adult", "UCI Adult privatization experiments");
  adult->add_option("--data", aa.data, "adult.data path")->required();
  adult->add_option("--test", aa.test, "adult.test path (reference difference)");
  adult->add_option("--attribute", aa.attribute, "sex|race")->capture_default_str();
  adult->add_option("--mech", aa.mech, "rr|bitflip|subset")->capture_default_str();
  adult->add_option("--epsilons", aa.epsilons, "Privacy levels")->capture_default_str();
  adult->add_option("--trials", aa.trials, "Privatizations per level")->capture_default_str();
  adult->add_option("--alpha", aa.alpha, "Significance level")->capture_default_str();
  adult->add_option("--seed", aa.seed, "Random seed")->required();
  adult->add_option("-o,--output", aa.output, "Output JSON file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: INVALID_ARGUMENT: %s\n", e.what());
    return 2;
  }

  try {
    if (*privatize) RunPrivatize(pa);
    if (*test) RunTest(ta, false);
    if (*ci) RunTest(ca, true);
    if (*sweep) RunSweepCommand(sa);
    if (*adult) RunAdult(aa);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(lgdp::CodeName(e.code())).c_str(),
                 e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: INTERNAL: %s\n", e.what());
    return 1;
  }
  return 0;
}
