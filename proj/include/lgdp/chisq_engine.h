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

// General minimum chi-square testing. A TestModel describes the mean map
// theta(u) over free parameters u, a consistent plug-in estimate, and the
// middle matrix built from it; GeneralChiSquare minimizes
//   n * (ybar - theta(u))' M (ybar - theta(u))
// and refers the minimum to a chi-square with dof() degrees of freedom.

#ifndef LGDP_CHISQ_ENGINE_H_
#define LGDP_CHISQ_ENGINE_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lgdp/numerics.h"

namespace lgdp {

struct ObservedMoments {
  std::vector<double> ybar;  // sample mean of the observable
  // Per-coordinate sample means of the squared observable, used by the
  // variance plug-ins of real-valued models. Empty for count models.
  std::vector<double> second;
  std::int64_t n = 0;
};

enum class Guard { kNone, kGroupTooSmall, kInfeasibleVariance };

std::string_view GuardName(Guard guard);

struct GuardDecision {
  Guard guard;
  double sentinel;  // statistic reported in place of the minimum
};

// Named plug-in estimates. Vectors are stored as name[0], name[1], ...
class Estimates {
 public:
  void Set(std::string name, double value);
  void SetVector(std::string_view name, std::span<const double> values);
  double Get(std::string_view name) const;
  std::vector<double> GetVector(std::string_view name) const;
  bool Has(std::string_view name) const;
  const std::vector<std::pair<std::string, double>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, double>> entries_;
};

class TestModel {
 public:
  virtual ~TestModel() = default;

  virtual std::string name() const = 0;
  // Observable dimension d.
  virtual std::size_t dimension() const = 0;
  // Number of minimized parameters.
  virtual std::size_t free_count() const = 0;
  virtual int dof() const = 0;
  // Domain blocks covering the free parameters.
  virtual std::vector<Domain> free_domains() const = 0;
  // Writes theta(free) into `theta` (size dimension()).
  virtual void ThetaOf(std::span<const double> free,
                       std::span<double> theta) const = 0;
  virtual Estimates PluginEstimate(const ObservedMoments& obs) const = 0;
  virtual DenseMatrix MiddleMatrix(const Estimates& est) const = 0;
  // Free parameters consistent with the null, derived from the estimates.
  virtual std::vector<double> FreeStart(const Estimates& est) const = 0;
  virtual std::optional<GuardDecision> Guards(const Estimates& est,
                                              const ObservedMoments& obs) const;

  std::vector<double> Theta(std::span<const double> free) const;
};

struct TestResult {
  double statistic = 0.0;
  int dof = 1;
  double p_value = 1.0;
  bool reject = false;
  Guard guard = Guard::kNone;
  std::vector<double> minimizer;
  Estimates estimates;
  double critical_value = 0.0;
};

struct ChiSquareOptions {
  MinimizeOptions minimize;
  // Overrides FreeStart when set.
  std::optional<std::vector<double>> start;
};

// Chi-square critical value at level alpha.
double CriticalValue(double alpha, int dof);

// n * (ybar - theta(free))' M (ybar - theta(free)).
double MinChiSquareObjective(const TestModel& model, const ObservedMoments& obs,
                             const DenseMatrix& middle,
                             std::span<const double> free);

TestResult GeneralChiSquare(const TestModel& model, const ObservedMoments& obs,
                            double alpha, const ChiSquareOptions& options = {});

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  double tolerance = 1e-3;
  double argmin_delta = 0.0;   // statistic-minimizing Delta
  double min_statistic = 0.0;
  int evaluations = 0;         // number of GeneralChiSquare calls
  bool lower_clipped = false;  // accepted at the search bound
  bool upper_clipped = false;
};

using ModelFamily = std::function<std::unique_ptr<TestModel>(double delta)>;

inline constexpr int kCiGridPoints = 64;
inline constexpr double kDefaultCiTolerance = 1e-3;

// Inverts the test over Delta in [lo, hi]: grid scan plus golden-section
// refinement locates the minimizing Delta, then bisection on each side finds
// the crossing of the critical value to resolution tau. Throws
// kNoAcceptingDelta when no Delta is accepted.
ConfidenceInterval CiSearch(const ModelFamily& family,
                            const ObservedMoments& obs, double alpha, double lo,
                            double hi, double tau = kDefaultCiTolerance);

// Clamps an estimate into [1e-6, 1 - 1e-6].
double ClampUnit(double v);

}  // namespace lgdp

#endif  // LGDP_CHISQ_ENGINE_H_
