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

#include "lgdp/means.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/fisher_f.hpp>

#include "lgdp/errors.h"
#include "lgdp/proportions.h"

namespace lgdp {

namespace {

constexpr double kMinGroupCount = 5.0;

// Sum over inputs m of w_m * Pr[bits a, b | m]; `mixed` is the channel
// applied to w and `total` is sum(w).
double WeightedPair(const ChannelProfile& ch, std::span<const double> w,
                    double total, std::span<const double> mixed, int a, int b) {
  if (a == b) return mixed[a];
  return ch.pair_with_input * (w[a] + w[b]) +
         ch.pair_without_input * (total - w[a] - w[b]);
}

// `raw_second[m]` is E[X^2 | group m] = mu_m^2 + sigma_m^2.
DenseMatrix BuildMomentCovariance(const ChannelProfile& ch,
                                  std::span<const double> pi,
                                  std::span<const double> mu,
                                  std::span<const double> raw_second) {
  const int g = ch.groups;
  std::vector<double> x(g), s(g), mixed_pi(g), mixed_x(g), mixed_s(g);
  for (int m = 0; m < g; ++m) {
    x[m] = pi[m] * mu[m];
    s[m] = pi[m] * raw_second[m];
  }
  ch.Mix(pi.data(), mixed_pi.data());
  ch.Mix(x.data(), mixed_x.data());
  ch.Mix(s.data(), mixed_s.data());
  const double total_pi = std::accumulate(pi.begin(), pi.end(), 0.0);
  const double total_x = std::accumulate(x.begin(), x.end(), 0.0);
  const double total_s = std::accumulate(s.begin(), s.end(), 0.0);
  DenseMatrix c(2 * static_cast<std::size_t>(g));
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      c(a, b) = WeightedPair(ch, pi, total_pi, mixed_pi, a, b) -
                mixed_pi[a] * mixed_pi[b];
      const double cross =
          WeightedPair(ch, x, total_x, mixed_x, a, b) - mixed_pi[a] * mixed_x[b];
      c(a, g + b) = cross;
      c(g + b, a) = cross;
      c(g + a, g + b) = WeightedPair(ch, s, total_s, mixed_s, a, b) -
                        mixed_x[a] * mixed_x[b];
    }
  }
  return c;
}

enum class MeanLayout { kCommon, kPairwise };

class MomentModel final : public TestModel {
 public:
  MomentModel(std::string name, int groups, std::optional<MechanismSpec> mech,
              MeanLayout layout, int j, int l, double delta,
              bool infeasible_guard)
      : name_(std::move(name)),
        g_(groups),
        mech_(std::move(mech)),
        channel_(ChannelProfile::From(mech_, groups)),
        layout_(layout),
        j_(j),
        l_(l),
        delta_(delta),
        infeasible_guard_(infeasible_guard),
        drop_last_(DropsLastIndicator(mech_)),
        pi_buf_(groups),
        mu_buf_(groups),
        x_buf_(groups),
        mixed_pi_(groups),
        mixed_x_(groups) {
    if (groups < 2) throw Error(ErrorCode::kInvalidArgument, "need >= 2 groups");
    if (layout == MeanLayout::kPairwise &&
        (j < 0 || l < 0 || j >= groups || l >= groups || j == l)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pairwise groups must be distinct indices in [0, g)");
    }
  }

  std::string name() const override { return name_; }
  std::size_t dimension() const override {
    return static_cast<std::size_t>(IndicatorCount() + g_);
  }
  std::size_t free_count() const override {
    return static_cast<std::size_t>(g_ - 1 + MeanCount());
  }
  int dof() const override {
    const bool bitflip = mech_ && mech_->kind() == MechanismKind::kBitFlip;
    const int rank = bitflip ? 2 * g_ : 2 * g_ - 1;
    return rank - static_cast<int>(free_count());
  }
  std::vector<Domain> free_domains() const override {
    std::vector<Domain> out{Domain::Simplex(g_ - 1)};
    for (int i = 0; i < MeanCount(); ++i) out.push_back(Domain::Identity());
    return out;
  }

  void ThetaOf(std::span<const double> u, std::span<double> theta) const override {
    double rest = 1.0;
    for (int m = 0; m + 1 < g_; ++m) {
      pi_buf_[m] = u[m];
      rest -= u[m];
    }
    pi_buf_[g_ - 1] = rest;
    UnpackMeans(u.subspan(static_cast<std::size_t>(g_ - 1)), mu_buf_);
    for (int m = 0; m < g_; ++m) x_buf_[m] = pi_buf_[m] * mu_buf_[m];
    channel_.Mix(pi_buf_.data(), mixed_pi_.data());
    channel_.Mix(x_buf_.data(), mixed_x_.data());
    const int ni = IndicatorCount();
    for (int i = 0; i < ni; ++i) theta[i] = mixed_pi_[i];
    for (int m = 0; m < g_; ++m) theta[ni + m] = mixed_x_[m];
  }

  Estimates PluginEstimate(const ObservedMoments& obs) const override {
    const int ni = IndicatorCount();
    if (obs.second.size() != obs.ybar.size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  name_ + " needs per-coordinate second moments");
    }
    std::vector<double> ind(obs.ybar.begin(), obs.ybar.begin() + ni);
    if (drop_last_) {
      ind.push_back(1.0 - std::accumulate(ind.begin(), ind.end(), 0.0));
    }
    const double gain = channel_.diag - channel_.off;
    std::vector<double> raw_pi(g_), pi(g_);
    for (int m = 0; m < g_; ++m) {
      raw_pi[m] = (ind[m] - channel_.off) / gain;
      pi[m] = std::clamp(raw_pi[m], 1e-6, 1.0);
    }
    const double pi_total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& v : pi) v /= pi_total;

    const double* first = obs.ybar.data() + ni;
    const double* second = obs.second.data() + ni;
    const double first_total = std::accumulate(first, first + g_, 0.0);
    const double row_sum = channel_.RowSum();
    const double x_total = first_total / row_sum;
    std::vector<double> x(g_), mu(g_);
    for (int m = 0; m < g_; ++m) x[m] = (first[m] - channel_.off * x_total) / gain;
    if (layout_ == MeanLayout::kCommon) {
      std::fill(mu.begin(), mu.end(), x_total);
    } else {
      for (int m = 0; m < g_; ++m) mu[m] = x[m] / pi[m];
      // Adding the equations of groups j and l eliminates mu_j.
      mu[l_] = (x[j_] + x[l_] - pi[j_] * delta_) / (pi[j_] + pi[l_]);
      mu[j_] = mu[l_] + delta_;
    }

    Estimates est;
    est.SetVector("raw_pi", raw_pi);
    est.SetVector("pi", pi);
    est.SetVector("mu", mu);

    std::vector<double> w(g_), mixed_x(g_), w2(g_), mixed_2(g_);
    for (int m = 0; m < g_; ++m) {
      w[m] = pi[m] * mu[m];
      w2[m] = pi[m] * mu[m] * mu[m];
    }
    channel_.Mix(w.data(), mixed_x.data());
    channel_.Mix(w2.data(), mixed_2.data());
    double infeasible = 0.0;
    double floor_active = 0.0;
    if (PerGroupVariance()) {
      std::vector<double> var(g_);
      for (int m = 0; m < g_; ++m) {
        const double centred = second[m] - mixed_x[m] * mixed_x[m];
        const double floor = std::max(mixed_2[m] - mixed_x[m] * mixed_x[m], 0.0);
        var[m] = centred;
        if (centred < floor) {
          if (infeasible_guard_) infeasible = 1.0;
          var[m] = floor;
          floor_active = 1.0;
        }
      }
      est.SetVector("var", var);
    } else {
      // sum_j s_j^2 = R (sum_m pi_m mu_m^2 + sigma^2) - sum_j Mix(pi mu)_j^2.
      double mean_square = 0.0, sample_var = 0.0, fitted_square = 0.0;
      for (int m = 0; m < g_; ++m) {
        mean_square += w2[m];
        sample_var += second[m] - first[m] * first[m];
        fitted_square += mixed_x[m] * mixed_x[m];
      }
      const double sigma2 = (sample_var + fitted_square) / row_sum - mean_square;
      if (sigma2 < 0.0) floor_active = 1.0;
      est.Set("sigma2", std::max(sigma2, 0.0));
    }
    est.Set("floor_active", floor_active);
    est.Set("infeasible", infeasible);
    return est;
  }

  DenseMatrix MiddleMatrix(const Estimates& est) const override {
    const std::vector<double> pi = est.GetVector("pi");
    const std::vector<double> mu = est.GetVector("mu");
    const double sigma2 = PerGroupVariance() ? 0.0 : est.Get("sigma2");
    std::vector<double> raw_second(g_);
    for (int m = 0; m < g_; ++m) raw_second[m] = mu[m] * mu[m] + sigma2;
    DenseMatrix c = BuildMomentCovariance(channel_, pi, mu, raw_second);
    if (PerGroupVariance()) {
      const std::vector<double> var = est.GetVector("var");
      for (int m = 0; m < g_; ++m) c(g_ + m, g_ + m) = var[m];
    }
    if (drop_last_) c = c.Drop(static_cast<std::size_t>(g_ - 1));
    return PseudoInverse(c).inverse;
  }

  std::vector<double> FreeStart(const Estimates& est) const override {
    const std::vector<double> pi = est.GetVector("pi");
    const std::vector<double> mu = est.GetVector("mu");
    std::vector<double> start(pi.begin(), pi.end() - 1);
    if (layout_ == MeanLayout::kCommon) {
      start.push_back(mu[0]);
    } else {
      for (int m = 0; m < g_; ++m) {
        if (m != j_) start.push_back(mu[m]);
      }
    }
    return start;
  }

  std::optional<GuardDecision> Guards(const Estimates& est,
                                      const ObservedMoments& obs) const override {
    const std::vector<double> raw_pi = est.GetVector("raw_pi");
    for (double v : raw_pi) {
      if (v * static_cast<double>(obs.n) < kMinGroupCount) {
        return GuardDecision{Guard::kGroupTooSmall, 0.0};
      }
    }
    if (est.Get("infeasible") != 0.0) {
      return GuardDecision{Guard::kInfeasibleVariance, 10.0 * g_};
    }
    return std::nullopt;
  }

 private:
  int IndicatorCount() const { return drop_last_ ? g_ - 1 : g_; }
  int MeanCount() const { return layout_ == MeanLayout::kCommon ? 1 : g_ - 1; }
  bool PerGroupVariance() const { return channel_.one_hot && drop_last_; }

  void UnpackMeans(std::span<const double> u, std::vector<double>& mu) const {
    if (layout_ == MeanLayout::kCommon) {
      std::fill(mu.begin(), mu.end(), u[0]);
      return;
    }
    std::size_t k = 0;
    for (int m = 0; m < g_; ++m) {
      if (m != j_) mu[m] = u[k++];
    }
    mu[j_] = mu[l_] + delta_;
  }

  std::string name_;
  int g_;
  std::optional<MechanismSpec> mech_;
  ChannelProfile channel_;
  MeanLayout layout_;
  int j_;
  int l_;
  double delta_;
  bool infeasible_guard_;
  bool drop_last_;
  mutable std::vector<double> pi_buf_;
  mutable std::vector<double> mu_buf_;
  mutable std::vector<double> x_buf_;
  mutable std::vector<double> mixed_pi_;
  mutable std::vector<double> mixed_x_;
};

std::string MechTag(const std::optional<MechanismSpec>& mech) {
  return mech ? std::string(MechanismName(mech->kind())) : "nonprivate";
}

// De-mixed group means and the pooled outcome SD, for CI bounds.
struct GapScale {
  double gap;
  double pooled_sd;
};

GapScale ObservedGap(const MomentVector& mv, const ChannelProfile& ch, int j,
                     int l) {
  const int g = mv.groups;
  const double n = static_cast<double>(mv.n);
  const double gain = ch.diag - ch.off;
  double first_total = 0.0;
  double second_total = 0.0;
  for (int m = 0; m < g; ++m) {
    first_total += mv.first[m] / n;
    second_total += mv.second[m] / n;
  }
  const double x_total = first_total / ch.RowSum();
  auto mean_of = [&](int m) {
    const double pi = std::max((mv.indicator[m] / n - ch.off) / gain, 1e-3);
    const double x = (mv.first[m] / n - ch.off * x_total) / gain;
    return x / pi;
  };
  const double mean = x_total;
  const double var = second_total / ch.RowSum() - mean * mean;
  const double gap = mean_of(j) - mean_of(l);
  return {std::isfinite(gap) ? gap : 0.0, std::sqrt(std::max(var, 1e-12))};
}

void CheckMoments(const MomentVector& mv) {
  const std::size_t g = static_cast<std::size_t>(mv.groups);
  if (mv.indicator.size() != g || mv.first.size() != g || mv.second.size() != g) {
    throw Error(ErrorCode::kDimensionMismatch, "moment vector sizes differ from g");
  }
  if (mv.n < 1) throw Error(ErrorCode::kInvalidArgument, "no samples");
}

}  // namespace

std::array<double, 5> MomentVector::TwoGroupTable() const {
  if (groups != 2) {
    throw Error(ErrorCode::kInvalidArgument, "two-group table needs g = 2");
  }
  return {indicator[0], first[0], first[1], second[0], second[1]};
}

MomentVector BuildMoments(std::span<const std::uint64_t> masks,
                          std::span<const double> outcomes, int groups) {
  if (masks.size() != outcomes.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "labels and outcomes differ in length");
  }
  MomentVector mv;
  mv.groups = groups;
  mv.n = static_cast<std::int64_t>(masks.size());
  mv.indicator.assign(groups, 0.0);
  mv.first.assign(groups, 0.0);
  mv.second.assign(groups, 0.0);
  for (std::size_t i = 0; i < masks.size(); ++i) {
    const double x = outcomes[i];
    std::uint64_t m = masks[i];
    while (m) {
      const int l = std::countr_zero(m);
      mv.indicator[l] += 1.0;
      mv.first[l] += x;
      mv.second[l] += x * x;
      m &= m - 1;
    }
  }
  return mv;
}

MomentVector BuildMoments(std::span<const PrivatizedLabel> labels,
                          std::span<const double> outcomes, int groups) {
  std::vector<std::uint64_t> masks;
  masks.reserve(labels.size());
  for (const PrivatizedLabel& label : labels) {
    if (label.groups() != groups) {
      throw Error(ErrorCode::kDimensionMismatch, "label length differs from g");
    }
    masks.push_back(label.mask());
  }
  return BuildMoments(masks, outcomes, groups);
}

std::vector<double> MomentTheta(const MeansParams& params) {
  const int g = static_cast<int>(params.pi.size());
  const ChannelProfile ch = ChannelProfile::From(params.mechanism, g);
  std::vector<double> x(g), theta(2 * static_cast<std::size_t>(g));
  for (int m = 0; m < g; ++m) x[m] = params.pi[m] * params.mu[m];
  ch.Mix(params.pi.data(), theta.data());
  ch.Mix(x.data(), theta.data() + g);
  return theta;
}

DenseMatrix MomentCovariance(const MeansParams& params) {
  const int g = static_cast<int>(params.pi.size());
  if (params.mu.size() != params.pi.size() ||
      params.sigma.size() != params.pi.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "means parameter sizes differ");
  }
  const ChannelProfile ch = ChannelProfile::From(params.mechanism, g);
  std::vector<double> raw_second(g);
  for (int m = 0; m < g; ++m) {
    raw_second[m] = params.mu[m] * params.mu[m] + params.sigma[m] * params.sigma[m];
  }
  return BuildMomentCovariance(ch, params.pi, params.mu, raw_second);
}

bool DropsLastIndicator(const std::optional<MechanismSpec>& mech) {
  return !mech || mech->kind() == MechanismKind::kRandResponse;
}

ObservedMoments ToMoments(const MomentVector& mv, bool drop_last_indicator) {
  CheckMoments(mv);
  const int g = mv.groups;
  const double n = static_cast<double>(mv.n);
  ObservedMoments obs;
  obs.n = mv.n;
  const int ni = drop_last_indicator ? g - 1 : g;
  for (int m = 0; m < ni; ++m) {
    obs.ybar.push_back(mv.indicator[m] / n);
    obs.second.push_back(mv.indicator[m] / n);
  }
  for (int m = 0; m < g; ++m) {
    obs.ybar.push_back(mv.first[m] / n);
    obs.second.push_back(mv.second[m] / n);
  }
  return obs;
}

std::unique_ptr<TestModel> DiffMeansModel(double delta,
                                          std::optional<double> epsilon) {
  std::optional<MechanismSpec> mech;
  if (epsilon) mech = MechanismSpec::RandResponse(2, *epsilon);
  return std::make_unique<MomentModel>(
      epsilon ? "diff_means_private" : "diff_means", 2, mech,
      MeanLayout::kPairwise, 0, 1, delta, /*infeasible_guard=*/!epsilon);
}

std::unique_ptr<TestModel> AnovaModel(int groups,
                                      const std::optional<MechanismSpec>& mech) {
  return std::make_unique<MomentModel>("anova_" + MechTag(mech), groups, mech,
                                       MeanLayout::kCommon, 0, 0, 0.0, false);
}

std::unique_ptr<TestModel> PairwiseModel(int groups,
                                         const std::optional<MechanismSpec>& mech,
                                         int j, int l, double delta) {
  return std::make_unique<MomentModel>("pairwise_" + MechTag(mech), groups, mech,
                                       MeanLayout::kPairwise, j, l, delta, false);
}

TestResult DiffMeansTest(const MomentVector& mv, std::optional<double> epsilon,
                         double delta, double alpha) {
  if (mv.groups != 2) throw Error(ErrorCode::kInvalidArgument, "needs g = 2");
  const auto model = DiffMeansModel(delta, epsilon);
  return GeneralChiSquare(*model, ToMoments(mv, true), alpha);
}

TestResult AnovaTest(const MomentVector& mv,
                     const std::optional<MechanismSpec>& mech, double alpha) {
  const auto model = AnovaModel(mv.groups, mech);
  return GeneralChiSquare(*model, ToMoments(mv, DropsLastIndicator(mech)), alpha);
}

TestResult PairwiseWithinG(const MomentVector& mv,
                           const std::optional<MechanismSpec>& mech, int j,
                           int l, double delta, double alpha) {
  const auto model = PairwiseModel(mv.groups, mech, j, l, delta);
  return GeneralChiSquare(*model, ToMoments(mv, DropsLastIndicator(mech)), alpha);
}

ConfidenceInterval DiffMeansCi(const MomentVector& mv,
                               std::optional<double> epsilon, double alpha,
                               double tau) {
  CheckMoments(mv);
  std::optional<MechanismSpec> mech;
  if (epsilon) mech = MechanismSpec::RandResponse(2, *epsilon);
  const GapScale scale = ObservedGap(mv, ChannelProfile::From(mech, 2), 0, 1);
  const ObservedMoments obs = ToMoments(mv, true);
  return CiSearch(
      [epsilon](double delta) { return DiffMeansModel(delta, epsilon); }, obs,
      alpha, scale.gap - 10.0 * scale.pooled_sd,
      scale.gap + 10.0 * scale.pooled_sd, tau);
}

ConfidenceInterval PairwiseCi(const MomentVector& mv,
                              const std::optional<MechanismSpec>& mech, int j,
                              int l, double alpha, double tau) {
  CheckMoments(mv);
  const int g = mv.groups;
  const GapScale scale = ObservedGap(mv, ChannelProfile::From(mech, g), j, l);
  const ObservedMoments obs = ToMoments(mv, DropsLastIndicator(mech));
  return CiSearch(
      [&](double delta) { return PairwiseModel(g, mech, j, l, delta); }, obs,
      alpha, scale.gap - 10.0 * scale.pooled_sd,
      scale.gap + 10.0 * scale.pooled_sd, tau);
}

GroupSummary Summarize(std::span<const double> values) {
  GroupSummary s;
  s.size = static_cast<std::int64_t>(values.size());
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.variance = values.size() > 1 ? ss / static_cast<double>(values.size() - 1) : 0.0;
  return s;
}

GroupSummary SummaryFromMoments(const MomentVector& mv, int j) {
  CheckMoments(mv);
  if (j < 0 || j >= mv.groups) throw Error(ErrorCode::kOutOfRange, "group index");
  GroupSummary s;
  const double count = mv.indicator[j];
  s.size = static_cast<std::int64_t>(std::llround(count));
  if (count <= 0.0) return s;
  s.mean = mv.first[j] / count;
  s.variance =
      count > 1.0 ? std::max(mv.second[j] - count * s.mean * s.mean, 0.0) /
                        (count - 1.0)
                  : 0.0;
  return s;
}

double WelchStatistic(const GroupSummary& a, const GroupSummary& b,
                      double delta) {
  if (a.size < 2 || b.size < 2) {
    throw Error(ErrorCode::kDegenerateGroups, "t-test needs >= 2 samples per group");
  }
  const double var = a.variance / static_cast<double>(a.size) +
                     b.variance / static_cast<double>(b.size);
  if (!(var > 0.0)) throw Error(ErrorCode::kZeroVariance, "t-test variance is zero");
  return (a.mean - b.mean - delta) / std::sqrt(var);
}

bool WelchReject(const GroupSummary& a, const GroupSummary& b, double delta,
                 double alpha) {
  return std::abs(WelchStatistic(a, b, delta)) >
         NormalQuantile(1.0 - 0.5 * alpha);
}

ConfidenceInterval WelchCi(const GroupSummary& a, const GroupSummary& b,
                           double alpha) {
  const double gap = a.mean - b.mean;
  const double se = 1.0 / WelchStatistic(a, b, gap - 1.0);
  const double half = NormalQuantile(1.0 - 0.5 * alpha) * se;
  ConfidenceInterval ci;
  ci.alpha = alpha;
  ci.tolerance = 0.0;
  ci.argmin_delta = gap;
  ci.lower = gap - half;
  ci.upper = gap + half;
  return ci;
}

ConfidenceInterval CorrectedWelchCi(const GroupSummary& a,
                                    const GroupSummary& b, double epsilon,
                                    double alpha) {
  const std::int64_t n = a.size + b.size;
  const double pi_hat = EstimatePiPrivate(a.size, n, epsilon);
  const double c = CorrectionFactor(epsilon, pi_hat, a.size, b.size, n);
  if (!(c > 0.0)) {
    throw Error(ErrorCode::kDegenerateGroups, "correction factor is not positive");
  }
  ConfidenceInterval ci = WelchCi(a, b, alpha);
  ci.lower /= c;
  ci.upper /= c;
  ci.argmin_delta /= c;
  return ci;
}

AnovaFResult OneWayAnova(std::span<const GroupSummary> groups, double alpha) {
  double total = 0.0;
  double weighted = 0.0;
  int used = 0;
  for (const GroupSummary& s : groups) {
    if (s.size < 1) continue;
    ++used;
    total += static_cast<double>(s.size);
    weighted += static_cast<double>(s.size) * s.mean;
  }
  AnovaFResult r;
  r.df_between = used - 1;
  r.df_within = static_cast<int>(total) - used;
  if (r.df_between < 1 || r.df_within < 1) {
    throw Error(ErrorCode::kDegenerateGroups, "ANOVA needs >= 2 non-empty groups");
  }
  const double grand = weighted / total;
  double between = 0.0;
  double within = 0.0;
  for (const GroupSummary& s : groups) {
    if (s.size < 1) continue;
    between += static_cast<double>(s.size) * (s.mean - grand) * (s.mean - grand);
    within += static_cast<double>(s.size - 1) * s.variance;
  }
  if (!(within > 0.0)) throw Error(ErrorCode::kZeroVariance, "no within-group variance");
  r.f = (between / r.df_between) / (within / r.df_within);
  const boost::math::fisher_f dist(r.df_between, r.df_within);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.f));
  r.reject = r.p_value < alpha;
  return r;
}

}  // namespace lgdp
