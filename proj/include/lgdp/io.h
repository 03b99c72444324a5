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

// Data I/O and scenario dispatch: labeled CSV datasets, joins on id, JSON
// results and sweep configs, and the UCI Adult loader.

#ifndef LGDP_IO_H_
#define LGDP_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgdp/chisq_engine.h"
#include "lgdp/mechanisms.h"
#include "lgdp/simlab.h"

namespace lgdp {

inline constexpr char kSchemaVersion[] = "lgdp-stats/1";

// Labels are bit masks over `groups`; true labels are one-hot.
struct LabeledDataset {
  int groups = 0;
  std::vector<std::string> ids;
  std::vector<std::uint64_t> masks;
  std::vector<double> outcomes;  // empty when the file has no outcome column
  std::vector<char> treated;     // empty when the file has no treated column
  std::vector<std::string> group_names;  // optional display names

  std::size_t size() const { return ids.size(); }
};

// Header row required. Labels come from a `group` column holding 1-based
// indices (then `groups` must be given, or is inferred as the maximum),
// or from binary columns grp_1..grp_g. `outcome` and `treated` columns
// are optional.
LabeledDataset ReadLabeledCsv(const std::string& path,
                              std::optional<int> groups = std::nullopt);
// Writes id, grp_1..grp_g and, when present, outcome and treated.
void WriteLabeledCsv(const std::string& path, const LabeledDataset& data);
std::string FormatLabeledCsv(const LabeledDataset& data);

// Reads id plus outcome (and optionally treated) columns.
LabeledDataset ReadOutcomeCsv(const std::string& path);

// Attaches outcomes (and treatment flags) to labels by id. Every id must
// appear exactly once in each input.
LabeledDataset JoinOnId(const LabeledDataset& labels,
                        const LabeledDataset& outcomes);

// Privatizes every row's (one-hot) label; rows are processed in order
// from one stream seeded by `seed`.
LabeledDataset PrivatizeDataset(const LabeledDataset& data,
                                const MechanismSpec& mech, std::uint64_t seed);

struct AnalysisOptions {
  Scenario scenario = Scenario::kProportions;
  std::optional<MechanismSpec> mechanism;  // nullopt: labels are true
  double delta = 0.0;
  double alpha = 0.05;
  double lambda = 0.5;  // abtest only
  int pair_j = 0;       // pairwise only
  int pair_l = 1;
  bool with_ci = false;
  double tau = kDefaultCiTolerance;
};

// Runs the scenario's chi-square test (and CI) on a joined dataset and
// returns the result object, including the "schema" field.
nlohmann::json AnalyzeDataset(const LabeledDataset& data,
                              const AnalysisOptions& options);

nlohmann::json ToJson(const TestResult& result);
nlohmann::json ToJson(const ConfidenceInterval& ci);
nlohmann::json ToJson(const SweepResult& result);
nlohmann::json ToJson(const std::vector<CalibrationResult>& results);
std::string SweepCsv(const SweepResult& result);

// Parses the sweep config object. Missing fields keep ExperimentConfig
// defaults; unknown fields are a schema error. An optional "kind" field
// ("power", "coverage", "calibration") is returned through `kind`.
ExperimentConfig ParseExperimentConfig(const nlohmann::json& j,
                                       std::string* kind = nullptr);
ExperimentConfig LoadExperimentConfig(const std::string& path,
                                      std::string* kind = nullptr);

struct AdultData {
  std::size_t raw_rows = 0;    // non-blank data lines seen
  std::size_t unparseable = 0;
  LabeledDataset by_sex;   // groups: Male, Female
  LabeledDataset by_race;  // groups: White, Black, Asian-Pac-Islander,
                           //         Amer-Indian-Eskimo, Other
};

// Parses adult.data or adult.test (test-file labels carry a trailing '.',
// and its banner line is skipped). Rows missing sex, race or income are
// dropped. More than 1% unparseable rows is kMalformedCsv.
AdultData LoadAdult(const std::string& path);

struct AdultExperimentOptions {
  std::string attribute = "sex";  // "sex" or "race"
  MechanismKind mechanism = MechanismKind::kRandResponse;
  std::vector<double> epsilons{0.5, 1.0, 2.0, 3.0};
  int trials = 200;
  double alpha = 0.05;
  std::uint64_t seed = 0;
};

// For each epsilon, privatizes the training labels `trials` times. Sex:
// records how often the chi-square, corrected Z and plain Z intervals miss
// the reference difference (the non-private difference on `reference`,
// or on `train` itself), plus agreement with the non-private test.
// Race: independence-test rejection and agreement rates.
nlohmann::json RunAdultExperiment(const AdultData& train,
                                  const AdultData* reference,
                                  const AdultExperimentOptions& options);

}  // namespace lgdp

#endif  // LGDP_IO_H_
