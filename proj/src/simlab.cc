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

#include "lgdp/simlab.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include "lgdp/abtest.h"
#include "lgdp/errors.h"
#include "lgdp/independence.h"
#include "lgdp/means.h"
#include "lgdp/numerics.h"
#include "lgdp/proportions.h"

namespace lgdp {

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

[[noreturn]] void SchemaError(const std::string& message) {
  throw Error(ErrorCode::kSchemaError, message);
}

struct Method {
  std::string label;
  std::string base;
  std::optional<MechanismKind> mechanism;
};

bool IsChiSquare(const Method& m) {
  return m.base == "chisq" || m.base == "chisq_nonprivate";
}

// Which base names each scenario accepts, and whether they need a
// mechanism suffix (1), forbid it (0) or allow either, defaulting to
// randomized response (2).
const std::map<std::string, int>& AllowedMethods(Scenario scenario) {
  static const std::map<Scenario, std::map<std::string, int>> kTable = {
      {Scenario::kProportions,
       {{"chisq", 2}, {"chisq_nonprivate", 0}, {"ztest", 2},
        {"ztest_corrected", 2}, {"ztest_nonprivate", 0}}},
      {Scenario::kIndependence,
       {{"chisq", 1}, {"chisq_nonprivate", 0}, {"pearson_naive", 1},
        {"pearson_nonprivate", 0}}},
      {Scenario::kMeans,
       {{"chisq", 2}, {"chisq_nonprivate", 0}, {"ttest", 2},
        {"ttest_corrected", 2}, {"ttest_nonprivate", 0}}},
      {Scenario::kAnova,
       {{"chisq", 1}, {"chisq_nonprivate", 0}, {"anova_naive", 1},
        {"anova_nonprivate", 0}}},
      {Scenario::kPairwise,
       {{"chisq", 1}, {"chisq_nonprivate", 0}, {"ttest_naive", 1},
        {"ttest_nonprivate", 0}}},
      {Scenario::kAbTest,
       {{"chisq", 2}, {"chisq_nonprivate", 0}, {"ttest", 2},
        {"ttest_nonprivate", 0}}},
  };
  return kTable.at(scenario);
}

Method ParseMethod(Scenario scenario, const std::string& text) {
  Method m;
  m.label = text;
  const std::size_t colon = text.find(':');
  m.base = text.substr(0, colon);
  const auto& allowed = AllowedMethods(scenario);
  const auto it = allowed.find(m.base);
  if (it == allowed.end()) {
    SchemaError("method '" + text + "' is not available for scenario " +
                std::string(ScenarioName(scenario)));
  }
  if (colon != std::string::npos) {
    if (it->second == 0) SchemaError("method '" + m.base + "' takes no mechanism");
    try {
      m.mechanism = ParseMechanismKind(text.substr(colon + 1));
    } catch (const Error& e) {
      SchemaError("method '" + text + "': " + e.what());
    }
  } else if (it->second == 1) {
    SchemaError("method '" + text + "' needs a mechanism suffix, e.g. :subset");
  } else if (it->second == 2) {
    m.mechanism = MechanismKind::kRandResponse;
  }
  const bool two_group = scenario == Scenario::kProportions ||
                         scenario == Scenario::kMeans ||
                         scenario == Scenario::kAbTest;
  if (two_group && m.mechanism && *m.mechanism != MechanismKind::kRandResponse) {
    SchemaError("two-group scenarios use randomized response only");
  }
  return m;
}

ExperimentConfig ApplySweep(const ExperimentConfig& base, double value) {
  ExperimentConfig c = base;
  const std::string& v = base.sweep_variable;
  if (v == "none") return c;
  if (v == "epsilon") {
    c.epsilon = value;
  } else if (v == "n") {
    c.n = static_cast<std::int64_t>(std::llround(value));
  } else if (v == "lambda") {
    c.lambda = value;
  } else if (v == "pi") {
    if (c.pi.size() != 2 && c.pi.size() != 1) SchemaError("sweep 'pi' needs two groups");
    c.pi = {value};
    if (base.pi.size() == 2) c.pi.push_back(1.0 - value);
  } else if (v == "gap") {
    const bool binary = c.scenario == Scenario::kProportions ||
                        c.scenario == Scenario::kIndependence;
    std::vector<double>& target = binary ? c.p : c.mu;
    if (!c.gap_weights.empty()) {
      for (std::size_t j = 0; j < target.size(); ++j) {
        target[j] += value * c.gap_weights[j];
      }
    } else if (c.scenario == Scenario::kAbTest) {
      target[2] += value;
    } else {
      target[c.effect_group] += value;
    }
  } else {
    SchemaError("unknown sweep variable '" + v + "'");
  }
  return c;
}

// Full group-probability vector.
std::vector<double> GroupProbabilities(const ExperimentConfig& c) {
  if (c.pi.size() == 1) return {c.pi[0], 1.0 - c.pi[0]};
  return c.pi;
}

MechanismSpec MakeMechanism(MechanismKind kind, int groups,
                            const ExperimentConfig& c) {
  switch (kind) {
    case MechanismKind::kRandResponse:
      return MechanismSpec::RandResponse(groups, c.epsilon);
    case MechanismKind::kBitFlip:
      return MechanismSpec::BitFlip(groups, c.epsilon);
    case MechanismKind::kSubset:
      return c.subset_k ? MechanismSpec::Subset(groups, c.epsilon, *c.subset_k)
                        : MechanismSpec::SubsetOptimal(groups, c.epsilon);
  }
  SchemaError("unknown mechanism");
}

double StandardNormal(Rng& rng) {
  // Box-Muller on the library's own uniforms keeps streams portable.
  const double u1 = 1.0 - UniformUnit(rng);
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

struct Population {
  std::vector<int> group;
  std::vector<double> outcome;
  std::vector<char> treated;
};

Population Generate(const ExperimentConfig& c, Rng& rng) {
  const std::vector<double> pi = GroupProbabilities(c);
  std::vector<double> cdf(pi.size());
  std::partial_sum(pi.begin(), pi.end(), cdf.begin());
  const std::size_t n = static_cast<std::size_t>(c.n);
  Population pop;
  pop.group.resize(n);
  pop.outcome.resize(n);
  if (c.scenario == Scenario::kAbTest) pop.treated.resize(n);
  const bool binary = c.scenario == Scenario::kProportions ||
                      c.scenario == Scenario::kIndependence;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = UniformUnit(rng) * cdf.back();
    const int j = static_cast<int>(
        std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(),
                              pi.size() - 1));
    pop.group[i] = j;
    if (binary) {
      pop.outcome[i] = UniformUnit(rng) < c.p[j] ? 1.0 : 0.0;
    } else if (c.scenario == Scenario::kAbTest) {
      const bool t = UniformUnit(rng) < c.lambda;
      pop.treated[i] = t;
      const int cell = (t ? 0 : 2) + j;
      pop.outcome[i] = c.mu[cell] + c.sigma[cell] * StandardNormal(rng);
    } else {
      pop.outcome[i] = c.mu[j] + c.sigma[j] * StandardNormal(rng);
    }
  }
  return pop;
}

// Privatized masks per mechanism for one trial, drawn lazily from
// streams keyed by the mechanism so methods sharing one see the same data.
class TrialData {
 public:
  TrialData(const ExperimentConfig& c, std::uint64_t seed)
      : config_(c), seed_(seed), groups_(c.groups()) {
    Rng rng(seed);
    pop_ = Generate(c, rng);
  }

  const Population& population() const { return pop_; }
  int groups() const { return groups_; }

  const std::vector<std::uint64_t>& Masks(std::optional<MechanismKind> kind) {
    const int key = kind ? static_cast<int>(*kind) : -1;
    auto it = masks_.find(key);
    if (it != masks_.end()) return it->second;
    std::vector<std::uint64_t> out(pop_.group.size());
    if (!kind) {
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1ULL << pop_.group[i];
    } else {
      const LabelSampler sampler(MakeMechanism(*kind, groups_, config_));
      Rng rng(SplitMix64(seed_ ^ (0xd1b54a32d192ed03ULL * (key + 1))));
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = sampler.DrawMask(pop_.group[i], rng);
      }
    }
    return masks_.emplace(key, std::move(out)).first->second;
  }

 private:
  const ExperimentConfig& config_;
  std::uint64_t seed_;
  int groups_;
  Population pop_;
  std::map<int, std::vector<std::uint64_t>> masks_;
};

enum class Mode { kPower, kCoverage, kCalibration };

struct Outcome {
  bool flag = false;  // reject (power) or miss (coverage)
  double statistic = 0.0;
  int dof = 0;
  bool failed = false;
};

std::optional<MechanismKind> DataKind(const Method& m) {
  if (m.base.ends_with("_nonprivate")) return std::nullopt;
  return m.mechanism;
}

std::optional<MechanismSpec> ModelMech(const Method& m, int groups,
                                       const ExperimentConfig& c) {
  const std::optional<MechanismKind> kind = DataKind(m);
  if (!kind) return std::nullopt;
  return MakeMechanism(*kind, groups, c);
}

std::optional<double> ModelEpsilon(const Method& m, const ExperimentConfig& c) {
  if (!DataKind(m)) return std::nullopt;
  return c.epsilon;
}

bool Misses(const ConfidenceInterval& ci, double truth) {
  return truth < ci.lower || truth > ci.upper;
}

Outcome FromResult(const TestResult& r) {
  return {r.reject, r.statistic, r.dof, false};
}

double TrueDifference(const ExperimentConfig& c) {
  switch (c.scenario) {
    case Scenario::kProportions:
      return c.p[0] - c.p[1];
    case Scenario::kMeans:
      return c.mu[0] - c.mu[1];
    case Scenario::kPairwise:
      return c.mu[c.pair_j] - c.mu[c.pair_l];
    case Scenario::kAbTest:
      return (c.mu[0] - c.mu[1]) - (c.mu[2] - c.mu[3]);
    default:
      SchemaError("coverage is not defined for scenario " +
                  std::string(ScenarioName(c.scenario)));
  }
}

PropCounts TwoGroupCounts(const std::vector<std::uint64_t>& masks,
                          const std::vector<double>& outcome) {
  double s1 = 0, s2 = 0, f1 = 0, f2 = 0;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const bool g0 = masks[i] & 1ULL;
    if (outcome[i] != 0.0) {
      (g0 ? s1 : s2) += 1.0;
    } else {
      (g0 ? f1 : f2) += 1.0;
    }
  }
  return PropCounts::FromCells(s1, s2, f1, f2);
}

Outcome RunProportions(const ExperimentConfig& c, const Method& m, Mode mode,
                       TrialData& data) {
  const PropCounts counts = TwoGroupCounts(data.Masks(DataKind(m)),
                                           data.population().outcome);
  const std::optional<double> eps = ModelEpsilon(m, c);
  const double truth = mode == Mode::kCoverage ? TrueDifference(c) : 0.0;
  if (IsChiSquare(m)) {
    if (mode == Mode::kCoverage) {
      return {Misses(PropChiSquareCi(counts, eps, c.alpha), truth)};
    }
    return FromResult(PropTest(counts, eps, c.delta, c.alpha));
  }
  const ZTestData z = ZTestData::FromCounts(counts);
  if (m.base == "ztest_corrected") {
    if (mode == Mode::kCoverage) {
      return {Misses(CorrectedZTestCi(z, c.epsilon, c.alpha), truth)};
    }
    const double pi_hat = EstimatePiPrivate(z.n1, counts.n, c.epsilon);
    return {ZTestReject(
        z, CorrectedDelta(c.delta, c.epsilon, pi_hat, z.n1, z.n2, counts.n),
        c.alpha)};
  }
  if (mode == Mode::kCoverage) return {Misses(WaldZTestCi(z, c.alpha), truth)};
  return {ZTestReject(z, c.delta, c.alpha)};
}

Outcome RunIndependence(const ExperimentConfig& c, const Method& m,
                        TrialData& data) {
  const std::vector<std::uint64_t>& masks = data.Masks(DataKind(m));
  const std::vector<double>& y = data.population().outcome;
  std::vector<int> outcomes(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) outcomes[i] = y[i] != 0.0;
  const IndepCounts counts = TabulateIndependence(masks, outcomes, data.groups());
  if (IsChiSquare(m)) {
    return FromResult(IndepTest(counts, ModelMech(m, data.groups(), c), c.alpha));
  }
  return FromResult(PearsonIndependence(counts, c.alpha));
}

Outcome RunMoments(const ExperimentConfig& c, const Method& m, Mode mode,
                   TrialData& data) {
  const int g = data.groups();
  const MomentVector mv =
      BuildMoments(data.Masks(DataKind(m)), data.population().outcome, g);
  const double truth = mode == Mode::kCoverage ? TrueDifference(c) : 0.0;
  const std::optional<MechanismSpec> mech = ModelMech(m, g, c);
  switch (c.scenario) {
    case Scenario::kMeans: {
      const std::optional<double> eps = ModelEpsilon(m, c);
      if (IsChiSquare(m)) {
        if (mode == Mode::kCoverage) {
          return {Misses(DiffMeansCi(mv, eps, c.alpha), truth)};
        }
        return FromResult(DiffMeansTest(mv, eps, c.delta, c.alpha));
      }
      const GroupSummary a = SummaryFromMoments(mv, 0);
      const GroupSummary b = SummaryFromMoments(mv, 1);
      if (m.base == "ttest_corrected") {
        if (mode == Mode::kCoverage) {
          return {Misses(CorrectedWelchCi(a, b, c.epsilon, c.alpha), truth)};
        }
        const double pi_hat = EstimatePiPrivate(a.size, mv.n, c.epsilon);
        return {WelchReject(
            a, b, CorrectedDelta(c.delta, c.epsilon, pi_hat, a.size, b.size, mv.n),
            c.alpha)};
      }
      if (mode == Mode::kCoverage) return {Misses(WelchCi(a, b, c.alpha), truth)};
      return {WelchReject(a, b, c.delta, c.alpha)};
    }
    case Scenario::kAnova: {
      if (IsChiSquare(m)) return FromResult(AnovaTest(mv, mech, c.alpha));
      std::vector<GroupSummary> summaries;
      for (int j = 0; j < g; ++j) summaries.push_back(SummaryFromMoments(mv, j));
      return {OneWayAnova(summaries, c.alpha).reject};
    }
    case Scenario::kPairwise: {
      if (IsChiSquare(m)) {
        if (mode == Mode::kCoverage) {
          return {Misses(PairwiseCi(mv, mech, c.pair_j, c.pair_l, c.alpha), truth)};
        }
        return FromResult(
            PairwiseWithinG(mv, mech, c.pair_j, c.pair_l, c.delta, c.alpha));
      }
      const GroupSummary a = SummaryFromMoments(mv, c.pair_j);
      const GroupSummary b = SummaryFromMoments(mv, c.pair_l);
      if (mode == Mode::kCoverage) return {Misses(WelchCi(a, b, c.alpha), truth)};
      return {WelchReject(a, b, c.delta, c.alpha)};
    }
    default:
      SchemaError("not a moment scenario");
  }
}

Outcome RunAbTest(const ExperimentConfig& c, const Method& m, Mode mode,
                  TrialData& data) {
  const std::vector<std::uint64_t>& masks = data.Masks(DataKind(m));
  const Population& pop = data.population();
  std::vector<ABSample> samples(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    samples[i] = {pop.treated[i] != 0, std::countr_zero(masks[i]), pop.outcome[i]};
  }
  const std::optional<double> eps = ModelEpsilon(m, c);
  const double truth = mode == Mode::kCoverage ? TrueDifference(c) : 0.0;
  if (IsChiSquare(m)) {
    if (mode == Mode::kCoverage) {
      return {Misses(AbCi(samples, c.lambda, eps, c.alpha), truth)};
    }
    return FromResult(AbTest(samples, c.lambda, eps, c.delta, c.alpha));
  }
  if (mode == Mode::kCoverage) return {Misses(NaiveAbCi(samples, c.alpha), truth)};
  return {NaiveAbReject(samples, c.delta, c.alpha)};
}

Outcome RunMethod(const ExperimentConfig& c, const Method& m, Mode mode,
                  TrialData& data) {
  try {
    switch (c.scenario) {
      case Scenario::kProportions:
        return RunProportions(c, m, mode, data);
      case Scenario::kIndependence:
        return RunIndependence(c, m, data);
      case Scenario::kAbTest:
        return RunAbTest(c, m, mode, data);
      default:
        return RunMoments(c, m, mode, data);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSchemaError) throw;
    Outcome o;
    o.failed = true;
    o.flag = mode == Mode::kCoverage;
    return o;
  }
}

int ThreadCount(const ExperimentConfig& c) {
  const int requested =
      c.threads > 0 ? c.threads
                    : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(requested, c.trials));
}

// Runs every trial of one grid point; outcomes[trial][method].
std::vector<std::vector<Outcome>> RunPoint(const ExperimentConfig& point,
                                           const std::vector<Method>& methods,
                                           Mode mode, std::size_t grid_index) {
  const std::size_t trials = static_cast<std::size_t>(point.trials);
  std::vector<std::vector<Outcome>> out(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      try {
        TrialData data(point, TrialSeed(point.base_seed, grid_index, t));
        out[t].reserve(methods.size());
        for (const Method& m : methods) out[t].push_back(RunMethod(point, m, mode, data));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = trials;
      }
    }
  };
  const int threads = ThreadCount(point);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<Method> ParseMethods(const ExperimentConfig& c) {
  std::vector<Method> methods;
  for (const std::string& text : c.methods) methods.push_back(ParseMethod(c.scenario, text));
  return methods;
}

SweepResult RunSweep(const ExperimentConfig& config, Mode mode) {
  config.Validate();
  const std::vector<Method> methods = ParseMethods(config);
  SweepResult result;
  result.kind = mode == Mode::kPower ? "power" : "coverage";
  result.sweep_variable = config.sweep_variable;
  for (std::size_t gi = 0; gi < config.grid.size(); ++gi) {
    const ExperimentConfig point = ApplySweep(config, config.grid[gi]);
    point.Validate();
    if (mode == Mode::kCoverage) TrueDifference(point);
    const auto outcomes = RunPoint(point, methods, mode, gi);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      SweepCell cell;
      cell.grid_value = config.grid[gi];
      cell.method = methods[mi].label;
      cell.trials = point.trials;
      for (const auto& trial : outcomes) {
        cell.count += trial[mi].flag;
        cell.failures += trial[mi].failed;
      }
      cell.fraction = static_cast<double>(cell.count) / cell.trials;
      cell.standard_error = std::sqrt(cell.fraction * (1.0 - cell.fraction) / cell.trials);
      result.cells.push_back(cell);
    }
  }
  return result;
}

void CheckSimplex(const std::vector<double>& v, const std::string& what) {
  double total = 0.0;
  for (double x : v) {
    if (!(x >= 0.0)) SchemaError(what + " entries must be nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) SchemaError(what + " must sum to 1");
}

}  // namespace

std::string_view ScenarioName(Scenario scenario) {
  switch (scenario) {
    case Scenario::kProportions: return "proportions";
    case Scenario::kIndependence: return "independence";
    case Scenario::kMeans: return "means";
    case Scenario::kAnova: return "anova";
    case Scenario::kPairwise: return "pairwise";
    case Scenario::kAbTest: return "abtest";
  }
  return "unknown";
}

Scenario ParseScenario(std::string_view name) {
  for (Scenario s : {Scenario::kProportions, Scenario::kIndependence,
                     Scenario::kMeans, Scenario::kAnova, Scenario::kPairwise,
                     Scenario::kAbTest}) {
    if (ScenarioName(s) == name) return s;
  }
  SchemaError("unknown scenario '" + std::string(name) + "'");
}

int ExperimentConfig::groups() const {
  if (pi.size() == 1) return 2;
  return static_cast<int>(pi.size());
}

void ExperimentConfig::Validate() const {
  if (methods.empty()) SchemaError("at least one method is required");
  if (trials < 1) SchemaError("trials must be >= 1");
  if (grid.empty()) SchemaError("grid must be nonempty");
  if (!(alpha > 0.0 && alpha < 1.0)) SchemaError("alpha must lie in (0, 1)");
  if (n < 2) SchemaError("n must be >= 2");
  if (!(epsilon > 0.0)) SchemaError("epsilon must be positive");
  const int g = groups();
  if (g < 2 || g > kMaxGroups) SchemaError("group count out of range");
  const std::vector<double> full = GroupProbabilities(*this);
  CheckSimplex(full, "pi");
  const bool two_group = scenario == Scenario::kProportions ||
                         scenario == Scenario::kMeans ||
                         scenario == Scenario::kAbTest;
  if (two_group && g != 2) SchemaError("scenario needs exactly two groups");
  switch (scenario) {
    case Scenario::kProportions:
    case Scenario::kIndependence:
      if (static_cast<int>(p.size()) != g) SchemaError("p needs one entry per group");
      for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) SchemaError("p entries must lie in [0, 1]");
      }
      break;
    case Scenario::kAbTest:
      if (mu.size() != 4 || sigma.size() != 4) {
        SchemaError("abtest needs four cell means and standard deviations");
      }
      if (!(lambda > 0.0 && lambda < 1.0)) SchemaError("lambda must lie in (0, 1)");
      break;
    default:
      if (static_cast<int>(mu.size()) != g || static_cast<int>(sigma.size()) != g) {
        SchemaError("mu and sigma need one entry per group");
      }
  }
  for (double s : sigma) {
    if (!(s >= 0.0)) SchemaError("sigma entries must be nonnegative");
  }
  if (effect_group < 0 || effect_group >= g) SchemaError("effect_group out of range");
  if (!gap_weights.empty()) {
    const std::size_t want = scenario == Scenario::kAbTest ? 4 : static_cast<std::size_t>(g);
    if (gap_weights.size() != want) SchemaError("gap_weights has the wrong length");
  }
  if (scenario == Scenario::kPairwise &&
      (pair_j < 0 || pair_l < 0 || pair_j >= g || pair_l >= g || pair_j == pair_l)) {
    SchemaError("pair must name two distinct groups");
  }
  for (const std::string& m : methods) ParseMethod(scenario, m);
}

const SweepCell& SweepResult::At(double grid_value, std::string_view method) const {
  for (const SweepCell& c : cells) {
    if (c.grid_value == grid_value && c.method == method) return c;
  }
  throw Error(ErrorCode::kOutOfRange, "no sweep cell for method " + std::string(method));
}

std::uint64_t TrialSeed(std::uint64_t base_seed, std::size_t grid_index,
                        std::size_t trial) {
  std::uint64_t h = SplitMix64(base_seed);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(grid_index));
  return SplitMix64(h ^ static_cast<std::uint64_t>(trial));
}

SweepResult RunPowerSweep(const ExperimentConfig& config) {
  return RunSweep(config, Mode::kPower);
}

SweepResult RunCoverageSweep(const ExperimentConfig& config) {
  return RunSweep(config, Mode::kCoverage);
}

std::vector<CalibrationResult> RunNullCalibration(const ExperimentConfig& config) {
  config.Validate();
  const std::vector<Method> methods = ParseMethods(config);
  for (const Method& m : methods) {
    if (!IsChiSquare(m)) SchemaError("calibration runs chisq methods only");
  }
  const ExperimentConfig point = ApplySweep(config, config.grid[0]);
  point.Validate();
  const auto outcomes = RunPoint(point, methods, Mode::kCalibration, 0);
  std::vector<CalibrationResult> results;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    CalibrationResult r;
    r.method = methods[mi].label;
    int rejects = 0;
    for (const auto& trial : outcomes) {
      const Outcome& o = trial[mi];
      if (o.failed) {
        ++r.failures;
        continue;
      }
      r.dof = o.dof;
      r.statistics.push_back(o.statistic);
      rejects += o.flag;
    }
    const double used = static_cast<double>(r.statistics.size());
    if (used > 0) {
      r.rejection_rate = rejects / used;
      r.rejection_se = std::sqrt(r.rejection_rate * (1.0 - r.rejection_rate) / used);
      const KsResult ks = KsChiSquare(r.statistics, r.dof);
      r.ks_distance = ks.distance;
      r.ks_p_value = ks.p_value;
    }
    results.push_back(std::move(r));
  }
  return results;
}

double KolmogorovPValue(double distance, std::size_t n) {
  if (n == 0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * distance;
  if (lambda < 0.2) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double odd = 2.0 * k - 1.0;
      cdf += std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult KsChiSquare(std::vector<double> sample, int dof) {
  KsResult r;
  if (sample.empty() || dof < 1) return r;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = 1.0 - Chi2Sf(std::max(sample[i], 0.0), dof);
    r.distance = std::max({r.distance, (i + 1) / n - f, f - i / n});
  }
  r.p_value = KolmogorovPValue(r.distance, sample.size());
  return r;
}

}  // namespace lgdp
