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

// Population simulators used as oracles by the unit and acceptance tests.
// They are written directly from the sampling model and do not go through
// simlab, so simlab and the tests cannot share a bug.

#ifndef LGDP_TESTS_TEST_UTIL_H_
#define LGDP_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lgdp/abtest.h"
#include "lgdp/independence.h"
#include "lgdp/means.h"
#include "lgdp/mechanisms.h"
#include "lgdp/proportions.h"

namespace lgdp::testing {

inline int DrawGroup(std::span<const double> pi, Rng& rng) {
  double u = UniformUnit(rng);
  for (std::size_t j = 0; j + 1 < pi.size(); ++j) {
    if (u < pi[j]) return static_cast<int>(j);
    u -= pi[j];
  }
  return static_cast<int>(pi.size()) - 1;
}

// Draws label masks; the identity channel when no mechanism is given.
class Labeler {
 public:
  explicit Labeler(const std::optional<MechanismSpec>& mech) {
    if (mech) sampler_.emplace(*mech);
  }
  std::uint64_t Draw(int j, Rng& rng) const {
    return sampler_ ? sampler_->DrawMask(j, rng) : std::uint64_t{1} << j;
  }

 private:
  std::optional<LabelSampler> sampler_;
};

// Group 1 (label 0) with probability pi; labels through RR(2, eps).
inline PropCounts SimulateProp(double pi, double p1, double p2,
                               std::optional<double> eps, std::int64_t n,
                               Rng& rng) {
  std::optional<MechanismSpec> mech;
  if (eps) mech = MechanismSpec::RandResponse(2, *eps);
  const Labeler labeler(mech);
  double cells[4] = {0, 0, 0, 0};
  for (std::int64_t i = 0; i < n; ++i) {
    const int group = UniformUnit(rng) < pi ? 0 : 1;
    const bool success = UniformUnit(rng) < (group == 0 ? p1 : p2);
    const int label = (labeler.Draw(group, rng) & 1u) ? 0 : 1;
    cells[(success ? 0 : 2) + label] += 1;
  }
  return PropCounts::FromCells(cells[0], cells[1], cells[2], cells[3]);
}

inline IndepCounts SimulateIndep(std::span<const double> p,
                                 std::span<const double> pi,
                                 const std::optional<MechanismSpec>& mech,
                                 std::int64_t n, Rng& rng) {
  const int g = static_cast<int>(pi.size());
  const Labeler labeler(mech);
  IndepCounts out;
  out.y.assign(2 * g, 0.0);
  out.n = n;
  for (std::int64_t i = 0; i < n; ++i) {
    const int j = DrawGroup(pi, rng);
    const bool success = UniformUnit(rng) < p[j];
    const std::uint64_t mask = labeler.Draw(j, rng);
    for (int l = 0; l < g; ++l) {
      if ((mask >> l) & 1u) out.y[(success ? 0 : g) + l] += 1;
    }
  }
  return out;
}

inline MomentVector SimulateMeans(std::span<const double> pi,
                                  std::span<const double> mu,
                                  std::span<const double> sigma,
                                  const std::optional<MechanismSpec>& mech,
                                  std::int64_t n, Rng& rng) {
  const int g = static_cast<int>(pi.size());
  const Labeler labeler(mech);
  std::normal_distribution<double> normal;
  MomentVector mv;
  mv.groups = g;
  mv.n = n;
  mv.indicator.assign(g, 0.0);
  mv.first.assign(g, 0.0);
  mv.second.assign(g, 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const int j = DrawGroup(pi, rng);
    const double x = mu[j] + sigma[j] * normal(rng);
    const std::uint64_t mask = labeler.Draw(j, rng);
    for (int l = 0; l < g; ++l) {
      if ((mask >> l) & 1u) {
        mv.indicator[l] += 1;
        mv.first[l] += x;
        mv.second[l] += x * x;
      }
    }
  }
  return mv;
}

// Cell order of params.mu: group 0 treated, group 1 treated, group 0
// control, group 1 control.
inline std::vector<ABSample> SimulateAb(const ABParams& params, std::int64_t n,
                                        Rng& rng) {
  std::optional<MechanismSpec> mech;
  if (params.epsilon) mech = MechanismSpec::RandResponse(2, *params.epsilon);
  const Labeler labeler(mech);
  std::normal_distribution<double> normal;
  std::vector<ABSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const int group = UniformUnit(rng) < params.pi ? 0 : 1;
    const bool treated = UniformUnit(rng) < params.lambda;
    const int cell = (treated ? 0 : 2) + group;
    const double y = params.mu[cell] + params.sigma[cell] * normal(rng);
    const int label = (labeler.Draw(group, rng) & 1u) ? 0 : 1;
    out.push_back({treated, label, y});
  }
  return out;
}

// One-sample Kolmogorov-Smirnov distance of `sample` from `cdf`.
template <typename Cdf>
double KsDistance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

// Asymptotic KS critical value at level 0.01.
inline double KsCritical01(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

}  // namespace lgdp::testing

#endif  // LGDP_TESTS_TEST_UTIL_H_
