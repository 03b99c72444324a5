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

// Two-group binary-outcome inference: classical and corrected Z-tests and
// the 4-cell minimum chi-square proportion model.

#ifndef LGDP_PROPORTIONS_H_
#define LGDP_PROPORTIONS_H_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>

#include "lgdp/chisq_engine.h"

namespace lgdp {

// Cell counts (Y[1,1], Y[1,2], Y[2,1], Y[2,2]): successes in groups 1 and 2,
// then failures in groups 1 and 2.
struct PropCounts {
  std::array<double, 4> y{};
  std::int64_t n = 0;

  static PropCounts FromCells(double s1, double s2, double f1, double f2);
};

struct PropParams {
  double pi = 0.5;
  double p1 = 0.5;
  double p2 = 0.5;
  double delta = 0.0;
  std::optional<double> epsilon;
};

struct ZTestData {
  double xbar1 = 0.0;
  double xbar2 = 0.0;
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  static ZTestData FromCounts(const PropCounts& counts);
};

ObservedMoments ToMoments(const PropCounts& counts);

// Cell probabilities, privatized by two-group randomized response when
// params.epsilon is set.
std::array<double, 4> PropTheta(const PropParams& params);

// Unpooled (default) or pooled two-proportion Z statistic.
double ZTestStatistic(const ZTestData& z, double delta, bool pooled = false);
bool ZTestReject(const ZTestData& z, double delta, double alpha,
                 bool pooled = false);

// delta * c, with c the expected shrinkage of the observed gap under
// two-group randomized response.
double CorrectionFactor(double epsilon, double pi_hat, std::int64_t n1,
                        std::int64_t n2, std::int64_t n);
double CorrectedDelta(double delta, double epsilon, double pi_hat,
                      std::int64_t n1, std::int64_t n2, std::int64_t n);

// Debiased group-1 share from the privatized group-1 count, clamped to [0,1].
double EstimatePiPrivate(std::int64_t n1, std::int64_t n, double epsilon);

ConfidenceInterval WaldZTestCi(const ZTestData& z, double alpha);
ConfidenceInterval CorrectedZTestCi(const ZTestData& z, double epsilon,
                                    double alpha);

std::unique_ptr<TestModel> PropModel(double delta,
                                     std::optional<double> epsilon);

TestResult PropTest(const PropCounts& counts, std::optional<double> epsilon,
                    double delta, double alpha);

// CI search over Delta in [-1 + tau, 1 - tau].
ConfidenceInterval PropChiSquareCi(const PropCounts& counts,
                                   std::optional<double> epsilon, double alpha,
                                   double tau = kDefaultCiTolerance);

}  // namespace lgdp

#endif  // LGDP_PROPORTIONS_H_
