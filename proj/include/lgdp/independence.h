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

// Equal-proportion (independence) tests across g privatized groups.

#ifndef LGDP_INDEPENDENCE_H_
#define LGDP_INDEPENDENCE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lgdp/chisq_engine.h"
#include "lgdp/mechanisms.h"
#include "lgdp/numerics.h"

namespace lgdp {

// 2g cell counts: successes per reported group, then failures per group.
struct IndepCounts {
  std::vector<double> y;
  std::int64_t n = 0;

  int groups() const { return static_cast<int>(y.size() / 2); }
};

struct IndepParams {
  double p = 0.5;
  std::vector<double> pi;  // simplex over g groups
  std::optional<MechanismSpec> mechanism;  // nullopt: labels not privatized
};

// Accumulates privatized labels (bit masks) and binary outcomes.
IndepCounts TabulateIndependence(std::span<const std::uint64_t> masks,
                                 std::span<const int> outcomes, int groups);

ObservedMoments ToMoments(const IndepCounts& counts);

std::vector<double> IndepTheta(const IndepParams& params);
DenseMatrix IndepCovariance(const IndepParams& params);
IndepParams IndepEstimates(const IndepCounts& counts,
                           const std::optional<MechanismSpec>& mech);

std::unique_ptr<TestModel> IndepModel(int groups,
                                      const std::optional<MechanismSpec>& mech);

TestResult IndepTest(const IndepCounts& counts,
                     const std::optional<MechanismSpec>& mech, double alpha);

// Pearson 2 x g test on the raw counts, dof g - 1 (columns with no
// observations are dropped).
TestResult PearsonIndependence(const IndepCounts& counts, double alpha);

}  // namespace lgdp

#endif  // LGDP_INDEPENDENCE_H_
