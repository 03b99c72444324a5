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

#include "lgdp/abtest.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgdp/errors.h"

namespace lgdp {

namespace {

constexpr double kMinCellCount = 5.0;

struct Mixing {
  double keep = 1.0;
  double flip = 0.0;
};

Mixing MixingFor(std::optional<double> epsilon) {
  if (!epsilon) return {};
  if (!(*epsilon > 0.0) || !std::isfinite(*epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive and finite");
  }
  return {1.0 / (1.0 + std::exp(-*epsilon)), 1.0 / (1.0 + std::exp(*epsilon))};
}

void CheckLambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must lie in (0, 1)");
  }
}

// Expected coordinates given per-cell values v (means, or raw second
// moments for the squared coordinates).
std::array<double, 5> Expected(const Mixing& mx, double lambda, double pi,
                               const std::array<double, 4>& v) {
  const double a = mx.keep;
  const double b = mx.flip;
  const double q = 1.0 - pi;
  return {a * pi + b * q,
          lambda * (a * pi * v[0] + b * q * v[1]),
          lambda * (b * pi * v[0] + a * q * v[1]),
          (1.0 - lambda) * (a * pi * v[2] + b * q * v[3]),
          (1.0 - lambda) * (b * pi * v[2] + a * q * v[3])};
}

// Covariance with the outcome-coordinate variances supplied directly.
DenseMatrix CovarianceFrom(const std::array<double, 5>& theta,
                           const std::array<double, 4>& var) {
  DenseMatrix c(5);
  for (int r = 0; r < 5; ++r) {
    for (int s = 0; s < 5; ++s) c(r, s) = -theta[r] * theta[s];
  }
  c(0, 0) = theta[0] * (1.0 - theta[0]);
  // The group-0 bit co-occurs with coordinates 1 and 3 only.
  c(0, 1) = c(1, 0) = theta[1] * (1.0 - theta[0]);
  c(0, 3) = c(3, 0) = theta[3] * (1.0 - theta[0]);
  for (int j = 0; j < 4; ++j) c(j + 1, j + 1) = var[j];
  return c;
}

std::array<double, 4> Square(const std::array<double, 4>& v) {
  return {v[0] * v[0], v[1] * v[1], v[2] * v[2], v[3] * v[3]};
}

class AbModelImpl final : public TestModel {
 public:
  AbModelImpl(double lambda, std::optional<double> epsilon, double delta)
      : lambda_(lambda), epsilon_(epsilon), mix_(MixingFor(epsilon)), delta_(delta) {
    CheckLambda(lambda);
  }

  std::string name() const override {
    return epsilon_ ? "abtest_private" : "abtest";
  }
  std::size_t dimension() const override { return 5; }
  std::size_t free_count() const override { return 4; }
  int dof() const override { return 1; }
  std::vector<Domain> free_domains() const override {
    return {Domain::Probability(), Domain::Identity(), Domain::Identity(),
            Domain::Identity()};
  }

  void ThetaOf(std::span<const double> u, std::span<double> theta) const override {
    const std::array<double, 5> t = Expected(mix_, lambda_, u[0], Means(u[1], u[2], u[3]));
    std::copy(t.begin(), t.end(), theta.begin());
  }

  Estimates PluginEstimate(const ObservedMoments& obs) const override {
    if (obs.ybar.size() != 5 || obs.second.size() != 5) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "A/B model needs a 5-coordinate observable with second moments");
    }
    const double a = mix_.keep;
    const double b = mix_.flip;
    const double raw_pi = (obs.ybar[0] - b) / (a - b);
    const double pi = std::clamp(raw_pi, 1e-6, 1.0 - 1e-6);
    const double q = 1.0 - pi;
    const double lt = lambda_;
    const double lc = 1.0 - lambda_;
    // Equations for coordinates 1-3 with mu[0] eliminated by the null.
    DenseMatrix m(3);
    m(0, 0) = lt * (a * pi + b * q);
    m(0, 1) = lt * a * pi;
    m(0, 2) = -lt * a * pi;
    m(1, 0) = lt * (b * pi + a * q);
    m(1, 1) = lt * b * pi;
    m(1, 2) = -lt * b * pi;
    m(2, 0) = 0.0;
    m(2, 1) = lc * a * pi;
    m(2, 2) = lc * b * q;
    const std::vector<double> rhs{obs.ybar[1] - lt * a * pi * delta_,
                                  obs.ybar[2] - lt * b * pi * delta_,
                                  obs.ybar[3]};
    const std::optional<std::vector<double>> sol = SolveLinear(m, rhs);

    Estimates est;
    est.Set("raw_pi", raw_pi);
    est.Set("pi", pi);
    est.Set("singular", sol ? 0.0 : 1.0);
    std::array<double, 4> mu{};
    if (sol) mu = Means((*sol)[0], (*sol)[1], (*sol)[2]);
    est.SetVector("mu", mu);

    const std::array<double, 5> theta = Expected(mix_, lambda_, pi, mu);
    const std::array<double, 5> floor2 = Expected(mix_, lambda_, pi, Square(mu));
    std::array<double, 4> var{};
    double floor_active = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double t2 = theta[j + 1] * theta[j + 1];
      var[j] = obs.second[j + 1] - t2;
      const double floor = std::max(floor2[j + 1] - t2, 0.0);
      if (var[j] < floor) {
        var[j] = floor;
        floor_active = 1.0;
      }
    }
    est.SetVector("var", var);
    est.Set("floor_active", floor_active);
    return est;
  }

  DenseMatrix MiddleMatrix(const Estimates& est) const override {
    const std::vector<double> mu_v = est.GetVector("mu");
    const std::vector<double> var_v = est.GetVector("var");
    std::array<double, 4> mu{};
    std::array<double, 4> var{};
    std::copy(mu_v.begin(), mu_v.end(), mu.begin());
    std::copy(var_v.begin(), var_v.end(), var.begin());
    const std::array<double, 5> theta = Expected(mix_, lambda_, est.Get("pi"), mu);
    return PseudoInverse(CovarianceFrom(theta, var)).inverse;
  }

  std::vector<double> FreeStart(const Estimates& est) const override {
    const std::vector<double> mu = est.GetVector("mu");
    return {est.Get("pi"), mu[1], mu[2], mu[3]};
  }

  std::optional<GuardDecision> Guards(const Estimates& est,
                                      const ObservedMoments& obs) const override {
    const double pi = est.Get("raw_pi");
    const double smallest =
        std::min(lambda_, 1.0 - lambda_) * std::min(pi, 1.0 - pi) *
        static_cast<double>(obs.n);
    if (smallest < kMinCellCount || est.Get("singular") != 0.0) {
      return GuardDecision{Guard::kGroupTooSmall, 0.0};
    }
    return std::nullopt;
  }

 private:
  std::array<double, 4> Means(double mu1, double mu2, double mu3) const {
    return {mu1 + mu2 - mu3 + delta_, mu1, mu2, mu3};
  }

  double lambda_;
  std::optional<double> epsilon_;
  Mixing mix_;
  double delta_;
};

}  // namespace

ObservedMoments AbMoments(std::span<const ABSample> samples) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "no samples");
  ObservedMoments obs;
  obs.n = static_cast<std::int64_t>(samples.size());
  obs.ybar.assign(5, 0.0);
  obs.second.assign(5, 0.0);
  for (const ABSample& s : samples) {
    if (s.label != 0 && s.label != 1) {
      throw Error(ErrorCode::kInvalidArgument, "A/B labels must be 0 or 1");
    }
    if (s.label == 0) obs.ybar[0] += 1.0;
    const int coord = 1 + (s.treated ? 0 : 2) + s.label;
    obs.ybar[coord] += s.outcome;
    obs.second[coord] += s.outcome * s.outcome;
  }
  const double n = static_cast<double>(obs.n);
  for (int j = 0; j < 5; ++j) {
    obs.ybar[j] /= n;
    obs.second[j] /= n;
  }
  obs.second[0] = obs.ybar[0];
  return obs;
}

std::array<double, 5> AbTheta(const ABParams& params) {
  CheckLambda(params.lambda);
  return Expected(MixingFor(params.epsilon), params.lambda, params.pi, params.mu);
}

DenseMatrix AbCovariance(const ABParams& params) {
  CheckLambda(params.lambda);
  const Mixing mx = MixingFor(params.epsilon);
  std::array<double, 4> raw2{};
  for (int j = 0; j < 4; ++j) {
    raw2[j] = params.mu[j] * params.mu[j] + params.sigma[j] * params.sigma[j];
  }
  const std::array<double, 5> theta = Expected(mx, params.lambda, params.pi, params.mu);
  const std::array<double, 5> second = Expected(mx, params.lambda, params.pi, raw2);
  std::array<double, 4> var{};
  for (int j = 0; j < 4; ++j) var[j] = second[j + 1] - theta[j + 1] * theta[j + 1];
  return CovarianceFrom(theta, var);
}

std::unique_ptr<TestModel> AbModel(double lambda, std::optional<double> epsilon,
                                   double delta) {
  return std::make_unique<AbModelImpl>(lambda, epsilon, delta);
}

TestResult AbTest(std::span<const ABSample> samples, double lambda,
                  std::optional<double> epsilon, double delta, double alpha) {
  const auto model = AbModel(lambda, epsilon, delta);
  return GeneralChiSquare(*model, AbMoments(samples), alpha);
}

ConfidenceInterval AbCi(std::span<const ABSample> samples, double lambda,
                        std::optional<double> epsilon, double alpha, double tau) {
  CheckLambda(lambda);
  const ObservedMoments obs = AbMoments(samples);
  const Mixing mx = MixingFor(epsilon);
  const double a = mx.keep;
  const double b = mx.flip;
  const double pi = std::clamp((obs.ybar[0] - b) / (a - b), 1e-3, 1.0 - 1e-3);
  const double q = 1.0 - pi;
  // Per-arm 2x2 de-mixing of the group means.
  auto arm_gap = [&](double weight, double y0, double y1) {
    const double det = weight * weight * pi * q * (a * a - b * b);
    const double m0 = weight * (a * q * y0 - b * q * y1) / det;
    const double m1 = weight * (a * pi * y1 - b * pi * y0) / det;
    return m0 - m1;
  };
  double gap = arm_gap(lambda, obs.ybar[1], obs.ybar[2]) -
               arm_gap(1.0 - lambda, obs.ybar[3], obs.ybar[4]);
  if (!std::isfinite(gap)) gap = 0.0;
  double mean = 0.0;
  double second = 0.0;
  for (int j = 1; j < 5; ++j) {
    mean += obs.ybar[j];
    second += obs.second[j];
  }
  const double sd = std::sqrt(std::max(second - mean * mean, 1e-12));
  return CiSearch(
      [lambda, epsilon](double delta) { return AbModel(lambda, epsilon, delta); },
      obs, alpha, gap - 10.0 * sd, gap + 10.0 * sd, tau);
}

NaiveDiffInDiff NaiveAbEstimate(std::span<const ABSample> samples) {
  std::array<double, 4> count{}, sum{}, sum2{};
  for (const ABSample& s : samples) {
    const int cell = (s.treated ? 0 : 2) + s.label;
    count[cell] += 1.0;
    sum[cell] += s.outcome;
    sum2[cell] += s.outcome * s.outcome;
  }
  std::array<double, 4> mean{};
  double var = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (count[c] < 2.0) {
      throw Error(ErrorCode::kDegenerateGroups,
                  "each treatment-by-label cell needs >= 2 samples");
    }
    mean[c] = sum[c] / count[c];
    const double s2 =
        std::max(sum2[c] - count[c] * mean[c] * mean[c], 0.0) / (count[c] - 1.0);
    var += s2 / count[c];
  }
  if (!(var > 0.0)) throw Error(ErrorCode::kZeroVariance, "diff-in-diff variance is zero");
  return {(mean[0] - mean[1]) - (mean[2] - mean[3]), std::sqrt(var)};
}

bool NaiveAbReject(std::span<const ABSample> samples, double delta, double alpha) {
  const NaiveDiffInDiff d = NaiveAbEstimate(samples);
  return std::abs(d.estimate - delta) / d.standard_error >
         NormalQuantile(1.0 - 0.5 * alpha);
}

ConfidenceInterval NaiveAbCi(std::span<const ABSample> samples, double alpha) {
  const NaiveDiffInDiff d = NaiveAbEstimate(samples);
  const double half = NormalQuantile(1.0 - 0.5 * alpha) * d.standard_error;
  ConfidenceInterval ci;
  ci.alpha = alpha;
  ci.tolerance = 0.0;
  ci.argmin_delta = d.estimate;
  ci.lower = d.estimate - half;
  ci.upper = d.estimate + half;
  return ci;
}

}  // namespace lgdp
