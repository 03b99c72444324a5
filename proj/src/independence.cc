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

#include "lgdp/independence.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "lgdp/errors.h"

namespace lgdp {

namespace {

// Sum over inputs m of pi_m * Pr[bits a, b | m].
double MixedPair(const ChannelProfile& ch, std::span<const double> pi, int a,
                 int b, std::span<const double> mixed) {
  if (a == b) return mixed[a];
  return ch.pair_with_input * (pi[a] + pi[b]) +
         ch.pair_without_input * (1.0 - pi[a] - pi[b]);
}

class IndepModelImpl final : public TestModel {
 public:
  IndepModelImpl(int groups, std::optional<MechanismSpec> mech)
      : g_(groups),
        mech_(std::move(mech)),
        channel_(ChannelProfile::From(mech_, groups)),
        mix_in_(static_cast<std::size_t>(groups)),
        mix_out_(static_cast<std::size_t>(groups)) {}

  std::string name() const override {
    return "indep_" +
           std::string(mech_ ? MechanismName(mech_->kind()) : "nonprivate");
  }
  std::size_t dimension() const override { return 2 * g_; }
  std::size_t free_count() const override { return g_; }
  int dof() const override {
    return (mech_ && mech_->kind() == MechanismKind::kBitFlip) ? g_ : g_ - 1;
  }
  std::vector<Domain> free_domains() const override {
    return {Domain::Probability(), Domain::Simplex(g_ - 1)};
  }

  void ThetaOf(std::span<const double> u, std::span<double> theta) const override {
    const double p = u[0];
    double rest = 1.0;
    for (int j = 0; j + 1 < g_; ++j) {
      mix_in_[j] = u[1 + j];
      rest -= u[1 + j];
    }
    mix_in_[g_ - 1] = rest;
    channel_.Mix(mix_in_.data(), mix_out_.data());
    for (int j = 0; j < g_; ++j) {
      theta[j] = p * mix_out_[j];
      theta[g_ + j] = (1.0 - p) * mix_out_[j];
    }
  }

  Estimates PluginEstimate(const ObservedMoments& obs) const override {
    IndepCounts counts;
    counts.n = obs.n;
    counts.y.resize(obs.ybar.size());
    for (std::size_t i = 0; i < obs.ybar.size(); ++i) {
      counts.y[i] = obs.ybar[i] * static_cast<double>(obs.n);
    }
    const IndepParams params = IndepEstimates(counts, mech_);
    Estimates est;
    est.Set("p", params.p);
    est.SetVector("pi", params.pi);
    return est;
  }

  DenseMatrix MiddleMatrix(const Estimates& est) const override {
    IndepParams params{est.Get("p"), est.GetVector("pi"), mech_};
    const bool multinomial =
        !mech_ || mech_->kind() == MechanismKind::kRandResponse;
    if (multinomial) {
      // Diag(theta)^-1 is a generalized inverse of the multinomial
      // covariance Diag(theta) - theta theta'.
      const std::vector<double> theta = IndepTheta(params);
      DenseMatrix m(theta.size());
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m(i, i) = 1.0 / std::max(theta[i], 1e-12);
      }
      return m;
    }
    return PseudoInverse(IndepCovariance(params)).inverse;
  }

  std::vector<double> FreeStart(const Estimates& est) const override {
    std::vector<double> start{est.Get("p")};
    const std::vector<double> pi = est.GetVector("pi");
    start.insert(start.end(), pi.begin(), pi.end() - 1);
    return start;
  }

 private:
  int g_;
  std::optional<MechanismSpec> mech_;
  ChannelProfile channel_;
  mutable std::vector<double> mix_in_;
  mutable std::vector<double> mix_out_;
};

void CheckParams(const IndepParams& params) {
  const int g = static_cast<int>(params.pi.size());
  if (g < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 groups");
  if (params.mechanism && params.mechanism->groups() != g) {
    throw Error(ErrorCode::kInvalidArgument, "mechanism group count mismatch");
  }
}

}  // namespace

IndepCounts TabulateIndependence(std::span<const std::uint64_t> masks,
                                 std::span<const int> outcomes, int groups) {
  if (masks.size() != outcomes.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "labels and outcomes differ in length");
  }
  IndepCounts counts;
  counts.n = static_cast<std::int64_t>(masks.size());
  counts.y.assign(2 * static_cast<std::size_t>(groups), 0.0);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const int row = outcomes[i] ? 0 : groups;
    std::uint64_t m = masks[i];
    while (m) {
      const int j = std::countr_zero(m);
      counts.y[row + j] += 1.0;
      m &= m - 1;
    }
  }
  return counts;
}

ObservedMoments ToMoments(const IndepCounts& counts) {
  if (counts.n < 1) throw Error(ErrorCode::kInvalidArgument, "empty table");
  ObservedMoments obs;
  obs.n = counts.n;
  obs.ybar.resize(counts.y.size());
  for (std::size_t i = 0; i < counts.y.size(); ++i) {
    obs.ybar[i] = counts.y[i] / static_cast<double>(counts.n);
  }
  return obs;
}

std::vector<double> IndepTheta(const IndepParams& params) {
  CheckParams(params);
  const int g = static_cast<int>(params.pi.size());
  const ChannelProfile ch = ChannelProfile::From(params.mechanism, g);
  std::vector<double> mixed(static_cast<std::size_t>(g));
  ch.Mix(params.pi.data(), mixed.data());
  std::vector<double> theta(2 * static_cast<std::size_t>(g));
  for (int j = 0; j < g; ++j) {
    theta[j] = params.p * mixed[j];
    theta[g + j] = (1.0 - params.p) * mixed[j];
  }
  return theta;
}

DenseMatrix IndepCovariance(const IndepParams& params) {
  CheckParams(params);
  const int g = static_cast<int>(params.pi.size());
  const ChannelProfile ch = ChannelProfile::From(params.mechanism, g);
  std::vector<double> mixed(static_cast<std::size_t>(g));
  ch.Mix(params.pi.data(), mixed.data());
  const std::vector<double> theta = IndepTheta(params);
  DenseMatrix c(2 * static_cast<std::size_t>(g));
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      const double both = MixedPair(ch, params.pi, a, b, mixed);
      c(a, b) = params.p * both;
      c(g + a, g + b) = (1.0 - params.p) * both;
    }
  }
  for (int i = 0; i < 2 * g; ++i) {
    for (int j = 0; j < 2 * g; ++j) c(i, j) -= theta[i] * theta[j];
  }
  return c;
}

IndepParams IndepEstimates(const IndepCounts& counts,
                           const std::optional<MechanismSpec>& mech) {
  const int g = counts.groups();
  if (g < 2 || counts.y.size() != 2 * static_cast<std::size_t>(g)) {
    throw Error(ErrorCode::kDimensionMismatch, "independence table must have 2g cells");
  }
  if (counts.n < 1) throw Error(ErrorCode::kInvalidArgument, "empty table");
  const ChannelProfile ch = ChannelProfile::From(mech, g);
  const double n = static_cast<double>(counts.n);
  double successes = 0.0;
  for (int j = 0; j < g; ++j) successes += counts.y[j];

  IndepParams params;
  params.mechanism = mech;
  params.p = ClampUnit(successes / (n * ch.RowSum()));
  params.pi.resize(static_cast<std::size_t>(g));
  for (int j = 0; j < g; ++j) {
    const double share = (counts.y[j] + counts.y[g + j]) / n;
    params.pi[j] = std::clamp((share - ch.off) / (ch.diag - ch.off), 1e-6, 1.0);
  }
  const double total = std::accumulate(params.pi.begin(), params.pi.end(), 0.0);
  for (double& v : params.pi) v /= total;
  return params;
}

std::unique_ptr<TestModel> IndepModel(int groups,
                                      const std::optional<MechanismSpec>& mech) {
  if (groups < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 groups");
  if (mech && mech->groups() != groups) {
    throw Error(ErrorCode::kInvalidArgument, "mechanism group count mismatch");
  }
  return std::make_unique<IndepModelImpl>(groups, mech);
}

TestResult IndepTest(const IndepCounts& counts,
                     const std::optional<MechanismSpec>& mech, double alpha) {
  const auto model = IndepModel(counts.groups(), mech);
  return GeneralChiSquare(*model, ToMoments(counts), alpha);
}

TestResult PearsonIndependence(const IndepCounts& counts, double alpha) {
  const int g = counts.groups();
  double row[2] = {0.0, 0.0};
  std::vector<double> col(static_cast<std::size_t>(g), 0.0);
  for (int j = 0; j < g; ++j) {
    row[0] += counts.y[j];
    row[1] += counts.y[g + j];
    col[j] = counts.y[j] + counts.y[g + j];
  }
  const double total = row[0] + row[1];
  TestResult result;
  int used = 0;
  double stat = 0.0;
  for (int j = 0; j < g; ++j) {
    if (col[j] <= 0.0) continue;
    ++used;
    for (int r = 0; r < 2; ++r) {
      const double expected = row[r] * col[j] / total;
      if (expected <= 0.0) continue;
      const double diff = counts.y[r * g + j] - expected;
      stat += diff * diff / expected;
    }
  }
  result.dof = std::max(used - 1, 1);
  result.statistic = stat;
  result.p_value = Chi2Sf(stat, result.dof);
  result.critical_value = CriticalValue(alpha, result.dof);
  result.reject = stat > result.critical_value;
  return result;
}

}  // namespace lgdp
