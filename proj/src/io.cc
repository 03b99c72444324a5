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

#include "lgdp/io.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "lgdp/abtest.h"
#include "lgdp/errors.h"
#include "lgdp/independence.h"
#include "lgdp/means.h"
#include "lgdp/proportions.h"

namespace lgdp {

using nlohmann::json;

namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record; double quotes group fields and "" escapes a quote.
std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(Trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(Trim(cur));
  return fields;
}

std::string QuoteCsv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> Column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }
};

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, "cannot open " + path);
  return in;
}

CsvTable ReadCsv(const std::string& path) {
  std::ifstream in = OpenInput(path);
  CsvTable table;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty()) continue;
    std::vector<std::string> fields = SplitCsv(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::kMalformedCsv,
                  path + ":" + std::to_string(number) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(number);
  }
  if (table.header.empty()) throw Error(ErrorCode::kMalformedCsv, path + ": empty file");
  return table;
}

[[noreturn]] void CellError(const std::string& path, std::size_t line,
                            const std::string& message) {
  throw Error(ErrorCode::kMalformedCsv,
              path + ":" + std::to_string(line) + ": " + message);
}

double ParseDouble(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    CellError(path, line, "not a number: '" + s + "'");
  }
}

long long ParseInt(const std::string& s, const std::string& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    CellError(path, line, "not an integer: '" + s + "'");
  }
}

bool ParseBinary(const std::string& s, const std::string& path, std::size_t line) {
  const long long v = ParseInt(s, path, line);
  if (v != 0 && v != 1) CellError(path, line, "expected 0 or 1, got '" + s + "'");
  return v == 1;
}

void ReadOptionalColumns(const CsvTable& t, const std::string& path,
                         LabeledDataset& data) {
  if (const auto col = t.Column("outcome")) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      data.outcomes.push_back(ParseDouble(t.rows[r][*col], path, t.line_numbers[r]));
    }
  }
  if (const auto col = t.Column("treated")) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      data.treated.push_back(ParseBinary(t.rows[r][*col], path, t.line_numbers[r]));
    }
  }
}

std::vector<std::string> ReadIds(const CsvTable& t, const std::string& path) {
  const auto col = t.Column("id");
  if (!col) throw Error(ErrorCode::kMalformedCsv, path + ": missing 'id' column");
  std::vector<std::string> ids;
  for (const auto& row : t.rows) ids.push_back(row[*col]);
  return ids;
}

std::optional<double> EpsilonOf(const std::optional<MechanismSpec>& mech) {
  if (!mech) return std::nullopt;
  return mech->epsilon();
}

void RequireOutcomes(const LabeledDataset& d, bool binary) {
  if (d.outcomes.size() != d.size()) {
    throw Error(ErrorCode::kScenarioMismatch, "scenario needs an outcome per row");
  }
  if (binary) {
    for (double v : d.outcomes) {
      if (v != 0.0 && v != 1.0) {
        throw Error(ErrorCode::kScenarioMismatch, "scenario needs binary 0/1 outcomes");
      }
    }
  }
}

void RequireTwoGroupRr(const LabeledDataset& d,
                       const std::optional<MechanismSpec>& mech) {
  if (d.groups != 2) {
    throw Error(ErrorCode::kScenarioMismatch, "scenario needs exactly two groups");
  }
  if (mech && mech->kind() != MechanismKind::kRandResponse) {
    throw Error(ErrorCode::kScenarioMismatch,
                "two-group scenarios use randomized response labels");
  }
  for (std::uint64_t m : d.masks) {
    if (std::popcount(m) != 1) {
      throw Error(ErrorCode::kScenarioMismatch, "two-group labels must be one-hot");
    }
  }
}

void CheckMechanismGroups(const LabeledDataset& d,
                          const std::optional<MechanismSpec>& mech) {
  if (mech && mech->groups() != d.groups) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mechanism group count differs from the dataset");
  }
}

PropCounts CountsOf(const LabeledDataset& d) {
  double s1 = 0, s2 = 0, f1 = 0, f2 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool g0 = d.masks[i] & 1ULL;
    if (d.outcomes[i] != 0.0) {
      (g0 ? s1 : s2) += 1.0;
    } else {
      (g0 ? f1 : f2) += 1.0;
    }
  }
  return PropCounts::FromCells(s1, s2, f1, f2);
}

IndepCounts IndepCountsOf(const LabeledDataset& d) {
  std::vector<int> y(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) y[i] = d.outcomes[i] != 0.0;
  return TabulateIndependence(d.masks, y, d.groups);
}

json EstimatesJson(const Estimates& est) {
  json out = json::object();
  for (const auto& [name, value] : est.entries()) out[name] = value;
  return out;
}

double NumberOr(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

template <typename T>
std::vector<T> VectorOf(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kSchemaError, "expected an array");
  return j.get<std::vector<T>>();
}

}  // namespace

LabeledDataset ReadLabeledCsv(const std::string& path, std::optional<int> groups) {
  const CsvTable t = ReadCsv(path);
  LabeledDataset data;
  data.ids = ReadIds(t, path);
  std::vector<std::size_t> grp_cols;
  for (int j = 1;; ++j) {
    const auto col = t.Column("grp_" + std::to_string(j));
    if (!col) break;
    grp_cols.push_back(*col);
  }
  if (!grp_cols.empty()) {
    data.groups = static_cast<int>(grp_cols.size());
    if (groups && *groups != data.groups) {
      throw Error(ErrorCode::kDimensionMismatch, "label column count differs from --groups");
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      std::uint64_t mask = 0;
      for (std::size_t j = 0; j < grp_cols.size(); ++j) {
        if (ParseBinary(t.rows[r][grp_cols[j]], path, t.line_numbers[r])) mask |= 1ULL << j;
      }
      data.masks.push_back(mask);
    }
  } else if (const auto col = t.Column("group")) {
    long long max_group = 0;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const long long v = ParseInt(t.rows[r][*col], path, t.line_numbers[r]);
      if (v < 1 || v > kMaxGroups) {
        CellError(path, t.line_numbers[r], "group index must be in 1.." +
                                               std::to_string(kMaxGroups));
      }
      max_group = std::max(max_group, v);
      data.masks.push_back(1ULL << (v - 1));
    }
    data.groups = groups ? *groups : static_cast<int>(max_group);
    if (max_group > data.groups) {
      throw Error(ErrorCode::kMalformedCsv, path + ": group index exceeds --groups");
    }
  } else {
    throw Error(ErrorCode::kMalformedCsv,
                path + ": needs a 'group' column or grp_1..grp_g columns");
  }
  if (data.groups < 2) throw Error(ErrorCode::kMalformedCsv, path + ": fewer than 2 groups");
  ReadOptionalColumns(t, path, data);
  return data;
}

std::string FormatLabeledCsv(const LabeledDataset& data) {
  std::ostringstream out;
  out << "id";
  for (int j = 1; j <= data.groups; ++j) out << ",grp_" << j;
  const bool has_outcome = !data.outcomes.empty();
  const bool has_treated = !data.treated.empty();
  if (has_outcome) out << ",outcome";
  if (has_treated) out << ",treated";
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << QuoteCsv(data.ids[i]);
    for (int j = 0; j < data.groups; ++j) out << ',' << ((data.masks[i] >> j) & 1ULL);
    if (has_outcome) out << ',' << data.outcomes[i];
    if (has_treated) out << ',' << static_cast<int>(data.treated[i]);
    out << '\n';
  }
  return out.str();
}

void WriteLabeledCsv(const std::string& path, const LabeledDataset& data) {
  const std::string text = FormatLabeledCsv(data);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

LabeledDataset ReadOutcomeCsv(const std::string& path) {
  const CsvTable t = ReadCsv(path);
  LabeledDataset data;
  data.ids = ReadIds(t, path);
  if (!t.Column("outcome")) {
    throw Error(ErrorCode::kMalformedCsv, path + ": missing 'outcome' column");
  }
  ReadOptionalColumns(t, path, data);
  return data;
}

LabeledDataset JoinOnId(const LabeledDataset& labels, const LabeledDataset& outcomes) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!index.emplace(outcomes.ids[i], i).second) {
      throw Error(ErrorCode::kJoinMismatch, "duplicate id in outcomes: " + outcomes.ids[i]);
    }
  }
  if (labels.size() != outcomes.size()) {
    throw Error(ErrorCode::kJoinMismatch, "label and outcome files have different row counts");
  }
  LabeledDataset out = labels;
  out.outcomes.assign(labels.size(), 0.0);
  if (!outcomes.treated.empty()) out.treated.assign(labels.size(), 0);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = index.find(labels.ids[i]);
    if (it == index.end()) {
      throw Error(ErrorCode::kJoinMismatch, "id without outcome: " + labels.ids[i]);
    }
    if (!seen.insert(labels.ids[i]).second) {
      throw Error(ErrorCode::kJoinMismatch, "duplicate id in labels: " + labels.ids[i]);
    }
    out.outcomes[i] = outcomes.outcomes[it->second];
    if (!outcomes.treated.empty()) out.treated[i] = outcomes.treated[it->second];
  }
  return out;
}

LabeledDataset PrivatizeDataset(const LabeledDataset& data, const MechanismSpec& mech,
                                std::uint64_t seed) {
  if (mech.groups() != data.groups) {
    throw Error(ErrorCode::kDimensionMismatch, "mechanism group count differs from the dataset");
  }
  const LabelSampler sampler(mech);
  Rng rng(seed);
  LabeledDataset out = data;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (std::popcount(data.masks[i]) != 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + data.ids[i] + " is not a one-hot true label");
    }
    out.masks[i] = sampler.DrawMask(std::countr_zero(data.masks[i]), rng);
  }
  return out;
}

json ToJson(const TestResult& r) {
  json out;
  out["statistic"] = r.statistic;
  out["dof"] = r.dof;
  out["p_value"] = r.p_value;
  out["reject"] = r.reject;
  out["guard"] = std::string(GuardName(r.guard));
  out["critical_value"] = r.critical_value;
  out["minimizer"] = r.minimizer;
  out["estimates"] = EstimatesJson(r.estimates);
  return out;
}

json ToJson(const ConfidenceInterval& ci) {
  json out;
  out["lower"] = ci.lower;
  out["upper"] = ci.upper;
  out["alpha"] = ci.alpha;
  out["tolerance"] = ci.tolerance;
  out["argmin_delta"] = ci.argmin_delta;
  out["min_statistic"] = ci.min_statistic;
  out["evaluations"] = ci.evaluations;
  out["lower_clipped"] = ci.lower_clipped;
  out["upper_clipped"] = ci.upper_clipped;
  return out;
}

json ToJson(const SweepResult& r) {
  json out;
  out["schema"] = kSchemaVersion;
  out["kind"] = r.kind;
  out["sweep_variable"] = r.sweep_variable;
  json cells = json::array();
  for (const SweepCell& c : r.cells) {
    cells.push_back({{"grid_value", c.grid_value},
                     {"method", c.method},
                     {"trials", c.trials},
                     {"count", c.count},
                     {"failures", c.failures},
                     {"fraction", c.fraction},
                     {"standard_error", c.standard_error}});
  }
  out["cells"] = std::move(cells);
  return out;
}

json ToJson(const std::vector<CalibrationResult>& results) {
  json out;
  out["schema"] = kSchemaVersion;
  out["kind"] = "calibration";
  json methods = json::array();
  for (const CalibrationResult& r : results) {
    double mean = 0.0;
    for (double s : r.statistics) mean += s;
    if (!r.statistics.empty()) mean /= static_cast<double>(r.statistics.size());
    methods.push_back({{"method", r.method},
                       {"dof", r.dof},
                       {"trials", r.statistics.size()},
                       {"failures", r.failures},
                       {"mean_statistic", mean},
                       {"rejection_rate", r.rejection_rate},
                       {"rejection_se", r.rejection_se},
                       {"ks_distance", r.ks_distance},
                       {"ks_p_value", r.ks_p_value}});
  }
  out["methods"] = std::move(methods);
  return out;
}

std::string SweepCsv(const SweepResult& r) {
  std::ostringstream out;
  out.precision(10);
  out << r.sweep_variable << ",method,trials,count,failures,fraction,standard_error\n";
  for (const SweepCell& c : r.cells) {
    out << c.grid_value << ',' << QuoteCsv(c.method) << ',' << c.trials << ','
        << c.count << ',' << c.failures << ',' << c.fraction << ','
        << c.standard_error << '\n';
  }
  return out.str();
}

json AnalyzeDataset(const LabeledDataset& d, const AnalysisOptions& o) {
  if (d.size() == 0) throw Error(ErrorCode::kInvalidArgument, "dataset is empty");
  CheckMechanismGroups(d, o.mechanism);
  const std::optional<double> eps = EpsilonOf(o.mechanism);
  json out;
  out["schema"] = kSchemaVersion;
  out["scenario"] = std::string(ScenarioName(o.scenario));
  out["mechanism"] = o.mechanism ? o.mechanism->DebugString() : "none";
  out["n"] = d.size();
  out["delta"] = o.delta;
  out["alpha"] = o.alpha;
  TestResult result;
  std::optional<ConfidenceInterval> ci;
  auto no_ci = [&] {
    if (o.with_ci) {
      throw Error(ErrorCode::kScenarioMismatch,
                  "confidence intervals are not defined for " +
                      std::string(ScenarioName(o.scenario)));
    }
  };
  switch (o.scenario) {
    case Scenario::kProportions: {
      RequireTwoGroupRr(d, o.mechanism);
      RequireOutcomes(d, true);
      const PropCounts counts = CountsOf(d);
      result = PropTest(counts, eps, o.delta, o.alpha);
      if (o.with_ci) ci = PropChiSquareCi(counts, eps, o.alpha, o.tau);
      break;
    }
    case Scenario::kIndependence:
      RequireOutcomes(d, true);
      no_ci();
      result = IndepTest(IndepCountsOf(d), o.mechanism, o.alpha);
      break;
    case Scenario::kMeans: {
      RequireTwoGroupRr(d, o.mechanism);
      RequireOutcomes(d, false);
      const MomentVector mv = BuildMoments(d.masks, d.outcomes, 2);
      result = DiffMeansTest(mv, eps, o.delta, o.alpha);
      if (o.with_ci) ci = DiffMeansCi(mv, eps, o.alpha, o.tau);
      break;
    }
    case Scenario::kAnova: {
      RequireOutcomes(d, false);
      no_ci();
      result = AnovaTest(BuildMoments(d.masks, d.outcomes, d.groups), o.mechanism, o.alpha);
      break;
    }
    case Scenario::kPairwise: {
      RequireOutcomes(d, false);
      const MomentVector mv = BuildMoments(d.masks, d.outcomes, d.groups);
      result = PairwiseWithinG(mv, o.mechanism, o.pair_j, o.pair_l, o.delta, o.alpha);
      if (o.with_ci) ci = PairwiseCi(mv, o.mechanism, o.pair_j, o.pair_l, o.alpha, o.tau);
      out["pair"] = {o.pair_j + 1, o.pair_l + 1};
      break;
    }
    case Scenario::kAbTest: {
      RequireTwoGroupRr(d, o.mechanism);
      RequireOutcomes(d, false);
      if (d.treated.size() != d.size()) {
        throw Error(ErrorCode::kScenarioMismatch, "abtest needs a treated column");
      }
      std::vector<ABSample> samples(d.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        samples[i] = {d.treated[i] != 0, std::countr_zero(d.masks[i]), d.outcomes[i]};
      }
      result = AbTest(samples, o.lambda, eps, o.delta, o.alpha);
      if (o.with_ci) ci = AbCi(samples, o.lambda, eps, o.alpha, o.tau);
      out["lambda"] = o.lambda;
      break;
    }
  }
  const json r = ToJson(result);
  for (auto it = r.begin(); it != r.end(); ++it) out[it.key()] = it.value();
  if (ci) out["ci"] = ToJson(*ci);
  return out;
}

ExperimentConfig ParseExperimentConfig(const json& j, std::string* kind) {
  if (!j.is_object()) throw Error(ErrorCode::kSchemaError, "config must be a JSON object");
  if (!j.contains("schema") || j.at("schema") != kSchemaVersion) {
    throw Error(ErrorCode::kSchemaError,
                std::string("config needs \"schema\": \"") + kSchemaVersion + "\"");
  }
  static const std::set<std::string> kKnown = {
      "schema", "name", "description", "kind", "scenario", "methods",
      "epsilon", "subset_k", "pi", "p", "mu", "sigma", "lambda",
      "effect_group", "gap_weights", "pair", "delta", "n", "trials", "alpha",
      "sweep", "base_seed", "threads"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKnown.count(it.key())) {
      throw Error(ErrorCode::kSchemaError, "unknown config field '" + it.key() + "'");
    }
  }
  ExperimentConfig c;
  std::string parsed_kind;
  try {
    if (!j.contains("scenario")) throw Error(ErrorCode::kSchemaError, "missing 'scenario'");
    c.scenario = ParseScenario(j.at("scenario").get<std::string>());
    if (!j.contains("methods")) throw Error(ErrorCode::kSchemaError, "missing 'methods'");
    c.methods = VectorOf<std::string>(j.at("methods"));
    c.epsilon = NumberOr(j, "epsilon", c.epsilon);
    if (j.contains("subset_k")) c.subset_k = j.at("subset_k").get<int>();
    if (j.contains("pi")) c.pi = VectorOf<double>(j.at("pi"));
    if (j.contains("p")) c.p = VectorOf<double>(j.at("p"));
    if (j.contains("mu")) c.mu = VectorOf<double>(j.at("mu"));
    if (j.contains("sigma")) c.sigma = VectorOf<double>(j.at("sigma"));
    if (j.contains("gap_weights")) c.gap_weights = VectorOf<double>(j.at("gap_weights"));
    c.lambda = NumberOr(j, "lambda", c.lambda);
    if (j.contains("effect_group")) c.effect_group = j.at("effect_group").get<int>() - 1;
    if (j.contains("pair")) {
      const std::vector<int> pair = VectorOf<int>(j.at("pair"));
      if (pair.size() != 2) throw Error(ErrorCode::kSchemaError, "'pair' needs two groups");
      c.pair_j = pair[0] - 1;
      c.pair_l = pair[1] - 1;
    }
    c.delta = NumberOr(j, "delta", c.delta);
    if (j.contains("n")) c.n = j.at("n").get<std::int64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    c.alpha = NumberOr(j, "alpha", c.alpha);
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      if (!s.is_object() || !s.contains("variable") || !s.contains("grid")) {
        throw Error(ErrorCode::kSchemaError, "'sweep' needs 'variable' and 'grid'");
      }
      c.sweep_variable = s.at("variable").get<std::string>();
      c.grid = VectorOf<double>(s.at("grid"));
    }
    parsed_kind = j.value("kind", std::string("power"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("config: ") + e.what());
  }
  if (parsed_kind != "power" && parsed_kind != "coverage" &&
      parsed_kind != "calibration") {
    throw Error(ErrorCode::kSchemaError, "kind must be power, coverage or calibration");
  }
  c.Validate();
  if (kind) *kind = parsed_kind;
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path, std::string* kind) {
  std::ifstream in = OpenInput(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, path + ": " + e.what());
  }
  return ParseExperimentConfig(j, kind);
}

AdultData LoadAdult(const std::string& path) {
  static const std::vector<std::string> kSex = {"Male", "Female"};
  static const std::vector<std::string> kRace = {
      "White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other"};
  std::ifstream in = OpenInput(path);
  AdultData out;
  out.by_sex.groups = 2;
  out.by_sex.group_names = kSex;
  out.by_race.groups = 5;
  out.by_race.group_names = kRace;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '|') continue;
    ++out.raw_rows;
    const std::vector<std::string> f = SplitCsv(trimmed);
    if (f.size() != 15) {
      ++out.unparseable;
      continue;
    }
    std::string income = f[14];
    if (!income.empty() && income.back() == '.') income.pop_back();
    const std::string& race = f[8];
    const std::string& sex = f[9];
    if (income == "?" || race == "?" || sex == "?") continue;
    const auto sex_it = std::find(kSex.begin(), kSex.end(), sex);
    const auto race_it = std::find(kRace.begin(), kRace.end(), race);
    if (sex_it == kSex.end() || race_it == kRace.end() ||
        (income != "<=50K" && income != ">50K")) {
      ++out.unparseable;
      continue;
    }
    const double y = income == ">50K" ? 1.0 : 0.0;
    const std::string id = std::to_string(number);
    out.by_sex.ids.push_back(id);
    out.by_sex.masks.push_back(1ULL << (sex_it - kSex.begin()));
    out.by_sex.outcomes.push_back(y);
    out.by_race.ids.push_back(id);
    out.by_race.masks.push_back(1ULL << (race_it - kRace.begin()));
    out.by_race.outcomes.push_back(y);
  }
  if (out.raw_rows == 0) throw Error(ErrorCode::kMalformedCsv, path + ": no data rows");
  if (static_cast<double>(out.unparseable) > 0.01 * static_cast<double>(out.raw_rows)) {
    throw Error(ErrorCode::kMalformedCsv,
                path + ": " + std::to_string(out.unparseable) + " of " +
                    std::to_string(out.raw_rows) + " rows are unparseable");
  }
  return out;
}

json RunAdultExperiment(const AdultData& train, const AdultData* reference,
                        const AdultExperimentOptions& o) {
  if (o.trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  const bool by_sex = o.attribute == "sex";
  if (!by_sex && o.attribute != "race") {
    throw Error(ErrorCode::kInvalidArgument, "attribute must be sex or race");
  }
  const LabeledDataset& data = by_sex ? train.by_sex : train.by_race;
  const int g = data.groups;
  if (by_sex && o.mechanism != MechanismKind::kRandResponse) {
    throw Error(ErrorCode::kInvalidArgument, "the sex experiment uses randomized response");
  }
  json out;
  out["schema"] = kSchemaVersion;
  out["attribute"] = o.attribute;
  out["mechanism"] = std::string(MechanismName(o.mechanism));
  out["trials"] = o.trials;
  out["n"] = data.size();
  out["groups"] = data.group_names;
  json rows = json::array();
  if (by_sex) {
    const PropCounts truth = CountsOf(data);
    const ZTestData zt = ZTestData::FromCounts(
        reference ? CountsOf(reference->by_sex) : truth);
    const double ref_gap = zt.xbar1 - zt.xbar2;
    const TestResult np = PropTest(truth, std::nullopt, 0.0, o.alpha);
    out["reference_difference"] = ref_gap;
    out["nonprivate"] = {{"reject", np.reject},
                         {"statistic", np.statistic},
                         {"ci", ToJson(PropChiSquareCi(truth, std::nullopt, o.alpha))}};
    for (std::size_t ei = 0; ei < o.epsilons.size(); ++ei) {
      const double eps = o.epsilons[ei];
      const MechanismSpec mech = MechanismSpec::RandResponse(2, eps);
      int chisq_miss = 0, zc_miss = 0, z_miss = 0, agree = 0, z_agree = 0;
      for (int t = 0; t < o.trials; ++t) {
        const LabeledDataset priv = PrivatizeDataset(
            data, mech, TrialSeed(o.seed, ei, static_cast<std::size_t>(t)));
        const PropCounts counts = CountsOf(priv);
        const ZTestData z = ZTestData::FromCounts(counts);
        auto miss = [&](const ConfidenceInterval& ci) {
          return ref_gap < ci.lower || ref_gap > ci.upper;
        };
        chisq_miss += miss(PropChiSquareCi(counts, eps, o.alpha));
        try {
          zc_miss += miss(CorrectedZTestCi(z, eps, o.alpha));
        } catch (const Error&) {
          ++zc_miss;
        }
        z_miss += miss(WaldZTestCi(z, o.alpha));
        agree += PropTest(counts, eps, 0.0, o.alpha).reject == np.reject;
        z_agree += ZTestReject(z, 0.0, o.alpha) == np.reject;
      }
      const double n = o.trials;
      rows.push_back({{"epsilon", eps},
                      {"chisq_miss_rate", chisq_miss / n},
                      {"ztest_corrected_miss_rate", zc_miss / n},
                      {"ztest_miss_rate", z_miss / n},
                      {"chisq_agreement", agree / n},
                      {"ztest_agreement", z_agree / n}});
    }
  } else {
    const IndepCounts truth = IndepCountsOf(data);
    const TestResult np = IndepTest(truth, std::nullopt, o.alpha);
    out["nonprivate"] = {{"reject", np.reject}, {"statistic", np.statistic}};
    for (std::size_t ei = 0; ei < o.epsilons.size(); ++ei) {
      const double eps = o.epsilons[ei];
      const MechanismSpec mech =
          o.mechanism == MechanismKind::kSubset ? MechanismSpec::SubsetOptimal(g, eps)
          : o.mechanism == MechanismKind::kBitFlip ? MechanismSpec::BitFlip(g, eps)
                                                   : MechanismSpec::RandResponse(g, eps);
      int reject = 0, naive_reject = 0, agree = 0;
      for (int t = 0; t < o.trials; ++t) {
        const LabeledDataset priv = PrivatizeDataset(
            data, mech, TrialSeed(o.seed, ei, static_cast<std::size_t>(t)));
        const IndepCounts counts = IndepCountsOf(priv);
        const bool r = IndepTest(counts, mech, o.alpha).reject;
        reject += r;
        agree += r == np.reject;
        naive_reject += PearsonIndependence(counts, o.alpha).reject;
      }
      const double n = o.trials;
      rows.push_back({{"epsilon", eps},
                      {"mechanism", mech.DebugString()},
                      {"chisq_reject_rate", reject / n},
                      {"pearson_naive_reject_rate", naive_reject / n},
                      {"chisq_agreement", agree / n}});
    }
  }
  out["rows"] = std::move(rows);
  return out;
}

}  // namespace lgdp
