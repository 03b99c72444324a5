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

#include "lgdp/proportions.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgdp/errors.h"
#include "lgdp/numerics.h"

namespace lgdp {

namespace {

struct Mixing {
  double keep = 1.0;
  double flip = 0.0;
};

Mixing TwoGroupMixing(std::optional<double> epsilon) {
  if (!epsilon) return {};
  if (!(*epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  return {1.0 / (1.0 + std::exp(-*epsilon)), 1.0 / (1.0 + std::exp(*epsilon))};
}

class PropModelImpl final : public TestModel {
 public:
  PropModelImpl(double delta, std::optional<double> epsilon)
      : delta_(delta), epsilon_(epsilon), mix_(TwoGroupMixing(epsilon)) {
    if (!(delta > -1.0 && delta < 1.0)) {
      throw Error(ErrorCode::kOutOfRange, "delta must lie in (-1, 1)");
    }
    p2_lo_ = std::max(0.0, -delta);
    p2_hi_ = std::min(1.0, 1.0 - delta);
  }

  std::string name() const override {
    return epsilon_ ? "prop_private" : "prop";
  }
  std::size_t dimension() const override { return 4; }
  std::size_t free_count() const override { return 2; }
  int dof() const override { return 1; }

  std::vector<Domain> free_domains() const override {
    return {Domain::Probability(), Domain::Interval(p2_lo_, p2_hi_)};
  }

  void ThetaOf(std::span<const double> u, std::span<double> theta) const override {
    Fill(u[0], u[1] + delta_, u[1], theta);
  }

  Estimates PluginEstimate(const ObservedMoments& obs) const override {
    const std::vector<double>& y = obs.ybar;
    const double group1 = y[0] + y[2];
    const double success = y[0] + y[1];
    const double pi = ClampUnit((group1 - mix_.flip) / (mix_.keep - mix_.flip));
    const double margin = 1e-6 * std::max(p2_hi_ - p2_lo_, 1e-3);
    const double p2 =
        std::clamp(success - delta_ * pi, p2_lo_ + margin, p2_hi_ - margin);
    Estimates est;
    est.Set("pi", pi);
    est.Set("p1", p2 + delta_);
    est.Set("p2", p2);
    return est;
  }

  DenseMatrix MiddleMatrix(const Estimates& est) const override {
    std::array<double, 4> theta{};
    Fill(est.Get("pi"), est.Get("p1"), est.Get("p2"), theta);
    DenseMatrix m(4);
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0 / std::max(theta[i], 1e-12);
    return m;
  }

  std::vector<double> FreeStart(const Estimates& est) const override {
    return {est.Get("pi"), est.Get("p2")};
  }

 private:
  void Fill(double pi, double p1, double p2, std::span<double> theta) const {
    const double a = mix_.keep;
    const double b = mix_.flip;
    theta[0] = a * pi * p1 + b * (1.0 - pi) * p2;
    theta[1] = b * pi * p1 + a * (1.0 - pi) * p2;
    theta[2] = a * pi * (1.0 - p1) + b * (1.0 - pi) * (1.0 - p2);
    theta[3] = b * pi * (1.0 - p1) + a * (1.0 - pi) * (1.0 - p2);
  }

  double delta_;
  std::optional<double> epsilon_;
  Mixing mix_;
  double p2_lo_ = 0.0;
  double p2_hi_ = 1.0;
};

}  // namespace

PropCounts PropCounts::FromCells(double s1, double s2, double f1, double f2) {
  if (!(s1 >= 0 && s2 >= 0 && f1 >= 0 && f2 >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "cell counts must be nonnegative");
  }
  PropCounts c;
  c.y = {s1, s2, f1, f2};
  c.n = static_cast<std::int64_t>(std::llround(s1 + s2 + f1 + f2));
  return c;
}

ZTestData ZTestData::FromCounts(const PropCounts& counts) {
  ZTestData z;
  const double g1 = counts.y[0] + counts.y[2];
  const double g2 = counts.y[1] + counts.y[3];
  z.n1 = static_cast<std::int64_t>(std::llround(g1));
  z.n2 = static_cast<std::int64_t>(std::llround(g2));
  z.xbar1 = g1 > 0 ? counts.y[0] / g1 : 0.0;
  z.xbar2 = g2 > 0 ? counts.y[1] / g2 : 0.0;
  return z;
}

ObservedMoments ToMoments(const PropCounts& counts) {
  if (counts.n < 1) throw Error(ErrorCode::kInvalidArgument, "empty table");
  ObservedMoments obs;
  obs.n = counts.n;
  obs.ybar.resize(4);
  for (int i = 0; i < 4; ++i) {
    if (counts.y[i] < 0) throw Error(ErrorCode::kInvalidArgument, "negative cell");
    obs.ybar[i] = counts.y[i] / static_cast<double>(counts.n);
  }
  return obs;
}

std::array<double, 4> PropTheta(const PropParams& params) {
  const Mixing mix = TwoGroupMixing(params.epsilon);
  const double pi = params.pi;
  const double p1 = params.p1;
  const double p2 = params.p2;
  return {mix.keep * pi * p1 + mix.flip * (1.0 - pi) * p2,
          mix.flip * pi * p1 + mix.keep * (1.0 - pi) * p2,
          mix.keep * pi * (1.0 - p1) + mix.flip * (1.0 - pi) * (1.0 - p2),
          mix.flip * pi * (1.0 - p1) + mix.keep * (1.0 - pi) * (1.0 - p2)};
}

double ZTestStatistic(const ZTestData& z, double delta, bool pooled) {
  if (z.n1 < 1 || z.n2 < 1) {
    throw Error(ErrorCode::kDegenerateGroups, "Z-test needs both groups non-empty");
  }
  const double n1 = static_cast<double>(z.n1);
  const double n2 = static_cast<double>(z.n2);
  double var;
  if (pooled) {
    const double p = (z.xbar1 * n1 + z.xbar2 * n2) / (n1 + n2);
    var = p * (1.0 - p) * (1.0 / n1 + 1.0 / n2);
  } else {
    var = z.xbar1 * (1.0 - z.xbar1) / n1 + z.xbar2 * (1.0 - z.xbar2) / n2;
  }
  if (!(var > 0.0)) {
    throw Error(ErrorCode::kZeroVariance, "Z-test denominator is zero");
  }
  return (z.xbar1 - z.xbar2 - delta) / std::sqrt(var);
}

bool ZTestReject(const ZTestData& z, double delta, double alpha, bool pooled) {
  const double crit = NormalQuantile(1.0 - 0.5 * alpha);
  return std::abs(ZTestStatistic(z, delta, pooled)) > crit;
}

double CorrectionFactor(double epsilon, double pi_hat, std::int64_t n1,
                        std::int64_t n2, std::int64_t n) {
  if (n1 < 1 || n2 < 1) {
    throw Error(ErrorCode::kDegenerateGroups, "correction needs both groups");
  }
  const double e = std::exp(epsilon);
  const double nn = static_cast<double>(n);
  return nn * pi_hat * e / ((1.0 + e) * static_cast<double>(n1)) -
         nn * pi_hat / ((1.0 + e) * static_cast<double>(n2));
}

double CorrectedDelta(double delta, double epsilon, double pi_hat,
                      std::int64_t n1, std::int64_t n2, std::int64_t n) {
  return CorrectionFactor(epsilon, pi_hat, n1, n2, n) * delta;
}

double EstimatePiPrivate(std::int64_t n1, std::int64_t n, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  const double e = std::exp(epsilon);
  const double share = static_cast<double>(n1) / static_cast<double>(n);
  return std::clamp((e + 1.0) / (e - 1.0) * (share - 1.0 / (e + 1.0)), 0.0, 1.0);
}

ConfidenceInterval WaldZTestCi(const ZTestData& z, double alpha) {
  // The statistic at delta = gap - 1 is 1 / SE.
  const double se = 1.0 / ZTestStatistic(z, z.xbar1 - z.xbar2 - 1.0);
  const double half = NormalQuantile(1.0 - 0.5 * alpha) * se;
  ConfidenceInterval ci;
  ci.alpha = alpha;
  ci.tolerance = 0.0;
  ci.argmin_delta = z.xbar1 - z.xbar2;
  ci.lower = ci.argmin_delta - half;
  ci.upper = ci.argmin_delta + half;
  return ci;
}

ConfidenceInterval CorrectedZTestCi(const ZTestData& z, double epsilon,
                                    double alpha) {
  const std::int64_t n = z.n1 + z.n2;
  const double pi_hat = EstimatePiPrivate(z.n1, n, epsilon);
  const double c = CorrectionFactor(epsilon, pi_hat, z.n1, z.n2, n);
  if (!(c > 0.0)) {
    throw Error(ErrorCode::kDegenerateGroups,
                "correction factor is not positive");
  }
  const ConfidenceInterval wald = WaldZTestCi(z, alpha);
  ConfidenceInterval ci = wald;
  ci.lower = wald.lower / c;
  ci.upper = wald.upper / c;
  ci.argmin_delta = wald.argmin_delta / c;
  return ci;
}

std::unique_ptr<TestModel> PropModel(double delta,
                                     std::optional<double> epsilon) {
  return std::make_unique<PropModelImpl>(delta, epsilon);
}

TestResult PropTest(const PropCounts& counts, std::optional<double> epsilon,
                    double delta, double alpha) {
  const PropModelImpl model(delta, epsilon);
  return GeneralChiSquare(model, ToMoments(counts), alpha);
}

ConfidenceInterval PropChiSquareCi(const PropCounts& counts,
                                   std::optional<double> epsilon, double alpha,
                                   double tau) {
  const ObservedMoments obs = ToMoments(counts);
  return CiSearch(
      [epsilon](double delta) { return PropModel(delta, epsilon); }, obs, alpha,
      -1.0 + tau, 1.0 - tau, tau);
}

}  // namespace lgdp
