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

// Real-valued outcomes with privatized group labels: the moment observable
// (indicators, then label-routed first moments), the two-group difference
// in means model, the one-way ANOVA analog, the pairwise test within g
// groups, and classical Welch / one-way ANOVA baselines.

#ifndef LGDP_MEANS_H_
#define LGDP_MEANS_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lgdp/chisq_engine.h"
#include "lgdp/mechanisms.h"
#include "lgdp/numerics.h"

namespace lgdp {

// Per reported group l: sum of bit_l, bit_l * x and bit_l * x^2.
struct MomentVector {
  int groups = 2;
  std::int64_t n = 0;
  std::vector<double> indicator;
  std::vector<double> first;
  std::vector<double> second;

  // (sum W, sum W X, sum (1-W) X, sum W X^2, sum (1-W) X^2) with W the
  // group-1 bit; requires groups == 2.
  std::array<double, 5> TwoGroupTable() const;
};

MomentVector BuildMoments(std::span<const std::uint64_t> masks,
                          std::span<const double> outcomes, int groups);
MomentVector BuildMoments(std::span<const PrivatizedLabel> labels,
                          std::span<const double> outcomes, int groups);

struct MeansParams {
  std::vector<double> pi;     // simplex over g groups
  std::vector<double> mu;     // per-group means
  std::vector<double> sigma;  // per-group standard deviations
  std::optional<MechanismSpec> mechanism;
};

// Expected observable (indicators, then first moments), length 2g.
std::vector<double> MomentTheta(const MeansParams& params);
// Covariance of one sample's observable, 2g x 2g.
DenseMatrix MomentCovariance(const MeansParams& params);

// RR and non-private labels are one-hot, so the last indicator is redundant
// and dropped from the observable.
bool DropsLastIndicator(const std::optional<MechanismSpec>& mech);

ObservedMoments ToMoments(const MomentVector& mv, bool drop_last_indicator);

// Two groups, observable (group-1 indicator, group-1 and group-2 first
// moments); free parameters (pi, mu2) with mu1 = mu2 + delta.
std::unique_ptr<TestModel> DiffMeansModel(double delta,
                                          std::optional<double> epsilon);

// Equal means across g groups; free parameters (pi_1..pi_{g-1}, mu).
std::unique_ptr<TestModel> AnovaModel(int groups,
                                      const std::optional<MechanismSpec>& mech);

// mu_j = mu_l + delta with every other mean free.
std::unique_ptr<TestModel> PairwiseModel(int groups,
                                         const std::optional<MechanismSpec>& mech,
                                         int j, int l, double delta);

TestResult DiffMeansTest(const MomentVector& mv, std::optional<double> epsilon,
                         double delta, double alpha);
TestResult AnovaTest(const MomentVector& mv,
                     const std::optional<MechanismSpec>& mech, double alpha);
TestResult PairwiseWithinG(const MomentVector& mv,
                           const std::optional<MechanismSpec>& mech, int j,
                           int l, double delta, double alpha);

// CI search over the mean gap mu_j - mu_l within +-10 pooled SDs of the
// observed gap.
ConfidenceInterval DiffMeansCi(const MomentVector& mv,
                               std::optional<double> epsilon, double alpha,
                               double tau = kDefaultCiTolerance);
ConfidenceInterval PairwiseCi(const MomentVector& mv,
                              const std::optional<MechanismSpec>& mech, int j,
                              int l, double alpha,
                              double tau = kDefaultCiTolerance);

struct GroupSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  std::int64_t size = 0;
};

GroupSummary Summarize(std::span<const double> values);
// Summary of every sample whose label reports group j.
GroupSummary SummaryFromMoments(const MomentVector& mv, int j);

double WelchStatistic(const GroupSummary& a, const GroupSummary& b,
                      double delta);
bool WelchReject(const GroupSummary& a, const GroupSummary& b, double delta,
                 double alpha);
ConfidenceInterval WelchCi(const GroupSummary& a, const GroupSummary& b,
                           double alpha);
// Welch interval divided by the two-group randomized response shrinkage.
ConfidenceInterval CorrectedWelchCi(const GroupSummary& a,
                                    const GroupSummary& b, double epsilon,
                                    double alpha);

struct AnovaFResult {
  double f = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p_value = 1.0;
  bool reject = false;
};

AnovaFResult OneWayAnova(std::span<const GroupSummary> groups, double alpha);

}  // namespace lgdp

#endif  // LGDP_MEANS_H_
