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

#include "lgdp/chisq_engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lgdp/errors.h"

namespace lgdp {

namespace {

void ValidateMiddleMatrix(const DenseMatrix& m, std::size_t d) {
  if (m.dim() != d) {
    throw Error(ErrorCode::kDimensionMismatch, "middle matrix dimension");
  }
  if (!m.IsSymmetric(1e-10)) {
    throw Error(ErrorCode::kNotSymmetric, "middle matrix not symmetric");
  }
  bool diagonal = true;
  for (std::size_t i = 0; i < d && diagonal; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (i != j && m(i, j) != 0.0) {
        diagonal = false;
        break;
      }
    }
  }
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  if (diagonal) {
    lambda_min = lambda_max = d == 0 ? 0.0 : m(0, 0);
    for (std::size_t i = 0; i < d; ++i) {
      lambda_min = std::min(lambda_min, m(i, i));
      lambda_max = std::max(lambda_max, m(i, i));
    }
  } else {
    const SymmetricEigen eig = EigenDecompose(m);
    lambda_min = eig.values.front();
    lambda_max = eig.values.back();
  }
  if (lambda_min < -1e-6 * std::max(std::abs(lambda_max), 1e-300)) {
    throw Error(ErrorCode::kNegativeEigenvalue, "middle matrix not PSD");
  }
}

}  // namespace

std::string_view GuardName(Guard guard) {
  switch (guard) {
    case Guard::kNone:
      return "none";
    case Guard::kGroupTooSmall:
      return "GroupTooSmall";
    case Guard::kInfeasibleVariance:
      return "InfeasibleVariance";
  }
  return "unknown";
}

void Estimates::Set(std::string name, double value) {
  for (auto& [key, v] : entries_) {
    if (key == name) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(std::move(name), value);
}

void Estimates::SetVector(std::string_view name,
                          std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    Set(std::string(name) + "[" + std::to_string(i) + "]", values[i]);
  }
}

double Estimates::Get(std::string_view name) const {
  for (const auto& [key, v] : entries_) {
    if (key == name) return v;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "missing estimate '" + std::string(name) + "'");
}

std::vector<double> Estimates::GetVector(std::string_view name) const {
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const std::string key = std::string(name) + "[" + std::to_string(i) + "]";
    if (!Has(key)) break;
    out.push_back(Get(key));
  }
  return out;
}

bool Estimates::Has(std::string_view name) const {
  for (const auto& [key, v] : entries_) {
    if (key == name) return true;
  }
  return false;
}

std::optional<GuardDecision> TestModel::Guards(const Estimates&,
                                               const ObservedMoments&) const {
  return std::nullopt;
}

std::vector<double> TestModel::Theta(std::span<const double> free) const {
  std::vector<double> theta(dimension());
  ThetaOf(free, theta);
  return theta;
}

double ClampUnit(double v) {
  if (std::isnan(v)) return 0.5;
  return std::clamp(v, 1e-6, 1.0 - 1e-6);
}

double CriticalValue(double alpha, int dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "alpha outside (0,1)");
  }
  return Chi2Quantile(1.0 - alpha, dof);
}

double MinChiSquareObjective(const TestModel& model, const ObservedMoments& obs,
                             const DenseMatrix& middle,
                             std::span<const double> free) {
  std::vector<double> r = model.Theta(free);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = obs.ybar[i] - r[i];
  return static_cast<double>(obs.n) * middle.QuadraticForm(r);
}

TestResult GeneralChiSquare(const TestModel& model, const ObservedMoments& obs,
                            double alpha, const ChiSquareOptions& options) {
  const std::size_t d = model.dimension();
  if (obs.ybar.size() != d) {
    throw Error(ErrorCode::kDimensionMismatch,
                model.name() + " expects " + std::to_string(d) +
                    " moments, got " + std::to_string(obs.ybar.size()));
  }
  if (obs.n < 1) throw Error(ErrorCode::kInvalidArgument, "sample count < 1");

  TestResult result;
  result.dof = model.dof();
  result.critical_value = CriticalValue(alpha, result.dof);
  result.estimates = model.PluginEstimate(obs);

  if (const auto guard = model.Guards(result.estimates, obs)) {
    result.guard = guard->guard;
    result.statistic = guard->sentinel;
    result.p_value = Chi2Sf(guard->sentinel, result.dof);
    result.reject = guard->guard == Guard::kInfeasibleVariance;
    result.minimizer = model.FreeStart(result.estimates);
    return result;
  }

  const DenseMatrix middle = model.MiddleMatrix(result.estimates);
  ValidateMiddleMatrix(middle, d);
  const std::vector<double> start =
      options.start ? *options.start : model.FreeStart(result.estimates);
  if (start.size() != model.free_count()) {
    throw Error(ErrorCode::kDimensionMismatch, "free start dimension");
  }

  std::vector<double> theta(d);
  std::vector<double> resid(d);
  const double n = static_cast<double>(obs.n);
  auto objective = [&](std::span<const double> u) {
    model.ThetaOf(u, theta);
    for (std::size_t i = 0; i < d; ++i) resid[i] = obs.ybar[i] - theta[i];
    return n * middle.QuadraticForm(resid);
  };
  const std::vector<Domain> domains = model.free_domains();
  const MinimizeResult fit =
      Minimize(objective, start, domains, options.minimize);

  result.statistic = std::max(0.0, fit.value);
  result.minimizer = fit.argmin;
  result.p_value = Chi2Sf(result.statistic, result.dof);
  result.reject = result.statistic > result.critical_value;
  return result;
}

ConfidenceInterval CiSearch(const ModelFamily& family,
                            const ObservedMoments& obs, double alpha, double lo,
                            double hi, double tau) {
  if (!(lo < hi)) throw Error(ErrorCode::kInvalidArgument, "CI bounds lo >= hi");
  if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");

  ConfidenceInterval ci;
  ci.alpha = alpha;
  ci.tolerance = tau;
  double crit = 0.0;
  auto statistic = [&](double delta) {
    const std::unique_ptr<TestModel> model = family(delta);
    const TestResult r = GeneralChiSquare(*model, obs, alpha);
    crit = r.critical_value;
    ++ci.evaluations;
    // The infeasibility sentinel is a forced rejection, not a distance; it
    // must not win the search for the minimizing delta.
    if (r.guard == Guard::kInfeasibleVariance) {
      return std::numeric_limits<double>::infinity();
    }
    return r.statistic;
  };

  std::vector<double> grid(kCiGridPoints);
  std::vector<double> stats(kCiGridPoints);
  for (int i = 0; i < kCiGridPoints; ++i) {
    grid[i] = lo + (hi - lo) * i / (kCiGridPoints - 1);
    stats[i] = statistic(grid[i]);
  }
  const int best = static_cast<int>(
      std::min_element(stats.begin(), stats.end()) - stats.begin());

  // Golden-section refinement between the neighbours of the best grid point.
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, kCiGridPoints - 1)];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = statistic(c);
  double fd = statistic(d);
  while (b - a > 0.1 * tau) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = statistic(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = statistic(d);
    }
  }
  double star = fc < fd ? c : d;
  double star_stat = std::min(fc, fd);
  if (stats[best] < star_stat) {
    star = grid[best];
    star_stat = stats[best];
  }
  ci.argmin_delta = star;
  ci.min_statistic = star_stat;
  if (star_stat > crit) {
    throw Error(ErrorCode::kNoAcceptingDelta,
                "statistic exceeds the critical value over the whole range");
  }

  // Bisects between a rejecting and an accepting point and returns the
  // rejecting end once the bracket is below tau.
  auto crossing = [&](double reject_at, double accept_at) {
    while (std::abs(accept_at - reject_at) > tau) {
      const double mid = 0.5 * (reject_at + accept_at);
      if (statistic(mid) > crit) {
        reject_at = mid;
      } else {
        accept_at = mid;
      }
    }
    return reject_at;
  };

  int left = -1;
  for (int i = 0; i < kCiGridPoints && grid[i] < star; ++i) {
    if (stats[i] > crit) left = i;
  }
  if (left < 0) {
    ci.lower = lo;
    ci.lower_clipped = true;
  } else {
    const double accept =
        (left + 1 < kCiGridPoints && grid[left + 1] < star) ? grid[left + 1]
                                                            : star;
    ci.lower = crossing(grid[left], accept);
  }

  int right = -1;
  for (int i = kCiGridPoints - 1; i >= 0 && grid[i] > star; --i) {
    if (stats[i] > crit) right = i;
  }
  if (right < 0) {
    ci.upper = hi;
    ci.upper_clipped = true;
  } else {
    const double accept =
        (right - 1 >= 0 && grid[right - 1] > star) ? grid[right - 1] : star;
    ci.upper = crossing(grid[right], accept);
  }
  return ci;
}

}  // namespace lgdp
