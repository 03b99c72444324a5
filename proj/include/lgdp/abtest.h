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

// Difference-in-differences across two privatized groups in an A/B test.
// Treatment assignment is public; group labels pass through randomized
// response. Coordinates of the observable are the group-1 bit, then the
// label-routed outcomes of treated rows (bit 1, bit 2) and of control rows.

#ifndef LGDP_ABTEST_H_
#define LGDP_ABTEST_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lgdp/chisq_engine.h"
#include "lgdp/numerics.h"

namespace lgdp {

struct ABSample {
  bool treated = false;
  int label = 0;  // reported group, 0 or 1
  double outcome = 0.0;
};

struct ABParams {
  double pi = 0.5;      // probability of group 0
  double lambda = 0.5;  // treatment probability
  std::array<double, 4> mu{};     // (group0 treated, group1 treated,
                                  //  group0 control, group1 control)
  std::array<double, 4> sigma{1.0, 1.0, 1.0, 1.0};
  std::optional<double> epsilon;  // nullopt: labels are the true groups
};

ObservedMoments AbMoments(std::span<const ABSample> samples);

std::array<double, 5> AbTheta(const ABParams& params);
DenseMatrix AbCovariance(const ABParams& params);

// Null: mu[0] - mu[1] = mu[2] - mu[3] + delta.
std::unique_ptr<TestModel> AbModel(double lambda, std::optional<double> epsilon,
                                   double delta);

TestResult AbTest(std::span<const ABSample> samples, double lambda,
                  std::optional<double> epsilon, double delta, double alpha);

ConfidenceInterval AbCi(std::span<const ABSample> samples, double lambda,
                        std::optional<double> epsilon, double alpha,
                        double tau = kDefaultCiTolerance);

// Unmodified diff-in-diff on reported labels with a normal reference.
struct NaiveDiffInDiff {
  double estimate = 0.0;
  double standard_error = 0.0;
};
NaiveDiffInDiff NaiveAbEstimate(std::span<const ABSample> samples);
bool NaiveAbReject(std::span<const ABSample> samples, double delta, double alpha);
ConfidenceInterval NaiveAbCi(std::span<const ABSample> samples, double alpha);

}  // namespace lgdp

#endif  // LGDP_ABTEST_H_
