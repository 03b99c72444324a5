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

// Seeded Monte Carlo harness: population generators, power and coverage
// sweeps, and null-calibration runs for every test family.

#ifndef LGDP_SIMLAB_H_
#define LGDP_SIMLAB_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgdp/mechanisms.h"

namespace lgdp {

enum class Scenario {
  kProportions,
  kIndependence,
  kMeans,
  kAnova,
  kPairwise,
  kAbTest,
};

std::string_view ScenarioName(Scenario scenario);
Scenario ParseScenario(std::string_view name);

inline constexpr int kDefaultTrials = 1000;
inline constexpr int kFastTrials = 200;

// Population parameters follow the scenario:
//   proportions: pi = {Pr[group 0]}, p = {p_0, p_1}
//   independence: pi over g groups, p per group
//   means / anova / pairwise: pi, mu, sigma over g groups
//   abtest: pi = {Pr[group 0]}, lambda, mu and sigma over the cells
//           (group 0 treated, group 1 treated, group 0 control,
//            group 1 control)
// The sweep variable is one of "gap", "epsilon", "n", "lambda", "pi" or
// "none". "gap" adds the grid value to p[effect_group] (binary outcomes),
// to mu[effect_group] (means) or, for abtest, to mu[2]; a nonempty
// gap_weights instead adds value * gap_weights[j] to every group j. "pi"
// sets the two-group split.
//
// Methods are "<name>" or "<name>:<mechanism>" with mechanism in
// {rr, bitflip, subset}:
//   chisq[:mech], chisq_nonprivate            general chi-square test
//   ztest, ztest_corrected, ztest_nonprivate  proportions
//   ttest, ttest_corrected, ttest_nonprivate  means, abtest
//   ttest_naive:mech                          pairwise on reported labels
//   pearson_naive:mech, pearson_nonprivate    independence
//   anova_naive:mech, anova_nonprivate        anova
struct ExperimentConfig {
  Scenario scenario = Scenario::kProportions;
  std::vector<std::string> methods;
  double epsilon = 1.0;
  std::optional<int> subset_k;  // default: OptimalSubsetK
  std::vector<double> pi{0.5};
  std::vector<double> p{0.5, 0.5};
  std::vector<double> mu{0.0, 0.0};
  std::vector<double> sigma{1.0, 1.0};
  double lambda = 0.5;
  int effect_group = 0;
  std::vector<double> gap_weights;
  int pair_j = 0;
  int pair_l = 1;
  double delta = 0.0;  // hypothesized difference for power sweeps
  std::int64_t n = 10000;
  int trials = kDefaultTrials;
  double alpha = 0.05;
  std::string sweep_variable = "none";
  std::vector<double> grid{0.0};
  std::uint64_t base_seed = 0;
  int threads = 0;  // 0: hardware concurrency

  int groups() const;
  // Throws kSchemaError on inconsistent fields.
  void Validate() const;
};

struct SweepCell {
  double grid_value = 0.0;
  std::string method;
  int trials = 0;
  int count = 0;     // rejections (power) or misses (coverage)
  int failures = 0;  // trials where the method raised; counted in `count`
                     // for coverage and not for power
  double fraction = 0.0;
  double standard_error = 0.0;
};

struct SweepResult {
  std::string kind;  // "power" or "coverage"
  std::string sweep_variable;
  std::vector<SweepCell> cells;  // grid-major, then method order

  const SweepCell& At(double grid_value, std::string_view method) const;
};

struct CalibrationResult {
  std::string method;
  int dof = 0;
  std::vector<double> statistics;  // trial order
  double rejection_rate = 0.0;
  double rejection_se = 0.0;
  double ks_distance = 0.0;
  double ks_p_value = 1.0;
  int failures = 0;
};

SweepResult RunPowerSweep(const ExperimentConfig& config);
SweepResult RunCoverageSweep(const ExperimentConfig& config);
// Uses grid[0]; only chisq methods produce statistics.
std::vector<CalibrationResult> RunNullCalibration(const ExperimentConfig& config);

// Per-trial seed; stable across platforms and thread counts.
std::uint64_t TrialSeed(std::uint64_t base_seed, std::size_t grid_index,
                        std::size_t trial);

// One-sample Kolmogorov-Smirnov test of `sample` against chi-square(dof).
struct KsResult {
  double distance = 0.0;
  double p_value = 1.0;
};
KsResult KsChiSquare(std::vector<double> sample, int dof);
// Asymptotic Kolmogorov survival function with the small-sample scaling
// (sqrt(n) + 0.12 + 0.11 / sqrt(n)) * d.
double KolmogorovPValue(double distance, std::size_t n);

}  // namespace lgdp

#endif  // LGDP_SIMLAB_H_
