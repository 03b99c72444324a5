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

// Dense symmetric linear algebra, chi-square and normal distribution
// functions, and a box-transformed Nelder-Mead minimizer.

#ifndef LGDP_NUMERICS_H_
#define LGDP_NUMERICS_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace lgdp {

inline constexpr std::size_t kMaxDimension = 64;

// Square row-major matrix with dimension at most kMaxDimension.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t dim, double fill = 0.0);

  static DenseMatrix Identity(std::size_t dim);
  static DenseMatrix Diagonal(std::span<const double> diag);

  std::size_t dim() const { return dim_; }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * dim_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * dim_ + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * dim_, dim_};
  }

  DenseMatrix operator*(const DenseMatrix& other) const;
  DenseMatrix operator-(const DenseMatrix& other) const;
  std::vector<double> Apply(std::span<const double> v) const;
  // v' M v.
  double QuadraticForm(std::span<const double> v) const;
  // Max absolute row sum.
  double InfNorm() const;
  double MaxAbs() const;
  bool IsSymmetric(double tolerance) const;
  // Removes row and column `index`.
  DenseMatrix Drop(std::size_t index) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column i pairs with values[i]
};

// Cyclic Jacobi rotations; `m` must be symmetric.
SymmetricEigen EigenDecompose(const DenseMatrix& m);

struct PseudoInverseResult {
  DenseMatrix inverse;
  int rank = 0;
};

inline constexpr double kDefaultEigenCutoff = 1e-10;

// Moore-Penrose inverse of a symmetric PSD matrix. Eigenvalues at or below
// eigen_cutoff * lambda_max are treated as zero. Throws kNotSymmetric or
// kNegativeEigenvalue.
PseudoInverseResult PseudoInverse(const DenseMatrix& c,
                                  double eigen_cutoff = kDefaultEigenCutoff);

// Solves a x = b by partial-pivot elimination; nullopt when singular.
std::optional<std::vector<double>> SolveLinear(DenseMatrix a,
                                               std::vector<double> b);

// Binomial coefficient as a double, zero when r < 0 or r > n.
double Binomial(int n, int r);

// Regularized upper incomplete gamma Q(a, x).
double RegularizedGammaQ(double a, double x);

double Chi2Sf(double x, int dof);
// Inverse of the chi-square CDF: returns x with 1 - Chi2Sf(x, dof) = p.
double Chi2Quantile(double p, int dof);

double NormalCdf(double x);
double NormalQuantile(double p);

// Maps an unconstrained coordinate block onto a constrained one.
struct Domain {
  enum class Kind {
    kIdentity,
    kInterval,  // scaled logistic onto (lo, hi)
    kSimplex,   // additive log-ratio onto the first `size` entries of a
                // (size + 1)-simplex; the last entry is implied
  };

  static Domain Identity() { return {Kind::kIdentity, 0.0, 0.0, 1}; }
  static Domain Probability() { return {Kind::kInterval, 0.0, 1.0, 1}; }
  static Domain Interval(double lo, double hi) {
    return {Kind::kInterval, lo, hi, 1};
  }
  static Domain Simplex(int size) { return {Kind::kSimplex, 0.0, 0.0, size}; }

  Kind kind;
  double lo;
  double hi;
  int size;  // number of coordinates covered
};

struct MinimizeOptions {
  double initial_step = 0.05;
  double diameter_tolerance = 1e-9;
  int max_iterations = 2000;
  int restarts = 1;
};

struct MinimizeResult {
  std::vector<double> argmin;  // constrained coordinates
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Nelder-Mead over transformed coordinates. `domains` must cover `start`
// exactly; an empty span means identity on every coordinate. The objective
// sees constrained coordinates. Throws kNonFiniteObjective when the start
// value is not finite.
MinimizeResult Minimize(const Objective& objective,
                        std::span<const double> start,
                        std::span<const Domain> domains,
                        const MinimizeOptions& options = {});

// Maps between constrained and unconstrained coordinates.
std::vector<double> ToUnconstrained(std::span<const double> x,
                                    std::span<const Domain> domains);
std::vector<double> ToConstrained(std::span<const double> z,
                                  std::span<const Domain> domains);

}  // namespace lgdp

#endif  // LGDP_NUMERICS_H_
