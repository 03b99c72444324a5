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

#include "lgdp/numerics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "lgdp/errors.h"

namespace lgdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void CheckDimension(std::size_t dim) {
  if (dim > kMaxDimension) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix dimension " + std::to_string(dim) + " exceeds " +
                    std::to_string(kMaxDimension));
  }
}

// Series expansion of the regularized lower incomplete gamma P(a, x).
double GammaPSeries(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
double GammaQContinuedFraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double Logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t DomainWidth(std::span<const Domain> domains) {
  std::size_t total = 0;
  for (const Domain& d : domains) total += static_cast<std::size_t>(d.size);
  return total;
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t dim, double fill)
    : dim_(dim), data_(dim * dim, fill) {
  CheckDimension(dim);
}

DenseMatrix DenseMatrix::Identity(std::size_t dim) {
  DenseMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::Diagonal(std::span<const double> diag) {
  DenseMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& other) const {
  if (other.dim_ != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix product dimensions");
  }
  DenseMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t k = 0; k < dim_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < dim_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& other) const {
  if (other.dim_ != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix difference dimensions");
  }
  DenseMatrix out(dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    out.data_[i] = data_[i] - other.data_[i];
  }
  return out;
}

std::vector<double> DenseMatrix::Apply(std::span<const double> v) const {
  if (v.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix-vector dimensions");
  }
  std::vector<double> out(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

double DenseMatrix::QuadraticForm(std::span<const double> v) const {
  double total = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double* r = data_.data() + i * dim_;
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += r[j] * v[j];
    total += v[i] * s;
  }
  return total;
}

double DenseMatrix::InfNorm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double DenseMatrix::MaxAbs() const {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

bool DenseMatrix::IsSymmetric(double tolerance) const {
  const double bound = tolerance * std::max(MaxAbs(), 1e-300);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) {
      if (std::abs((*this)(i, j) - (*this)(j, i)) > bound) return false;
    }
  }
  return true;
}

DenseMatrix DenseMatrix::Drop(std::size_t index) const {
  if (index >= dim_) throw Error(ErrorCode::kOutOfRange, "drop index");
  DenseMatrix out(dim_ - 1);
  for (std::size_t i = 0, oi = 0; i < dim_; ++i) {
    if (i == index) continue;
    for (std::size_t j = 0, oj = 0; j < dim_; ++j) {
      if (j == index) continue;
      out(oi, oj++) = (*this)(i, j);
    }
    ++oi;
  }
  return out;
}

SymmetricEigen EigenDecompose(const DenseMatrix& m) {
  const std::size_t n = m.dim();
  DenseMatrix a = m;
  DenseMatrix v = DenseMatrix::Identity(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) total += a(i, j) * a(i, j);
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    }
    if (off <= 1e-32 * total || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{std::vector<double>(n), DenseMatrix(n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

PseudoInverseResult PseudoInverse(const DenseMatrix& c, double eigen_cutoff) {
  if (!c.IsSymmetric(1e-10)) {
    throw Error(ErrorCode::kNotSymmetric, "pseudo-inverse input not symmetric");
  }
  const std::size_t n = c.dim();
  DenseMatrix sym(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (c(i, j) + c(j, i));
  }
  const SymmetricEigen eig = EigenDecompose(sym);
  PseudoInverseResult out{DenseMatrix(n), 0};
  if (n == 0) return out;
  const double lambda_max = eig.values.back();
  const double lambda_min = eig.values.front();
  const double scale = std::max(lambda_max, std::abs(lambda_min));
  if (lambda_min < -1e-6 * scale) {
    throw Error(ErrorCode::kNegativeEigenvalue,
                "eigenvalue " + std::to_string(lambda_min) +
                    " significantly negative");
  }
  if (lambda_max <= 0.0) return out;
  const double threshold = eigen_cutoff * lambda_max;
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (lambda <= threshold) continue;
    ++out.rank;
    const double inv = 1.0 / lambda;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = eig.vectors(i, k) * inv;
      for (std::size_t j = 0; j < n; ++j) {
        out.inverse(i, j) += vi * eig.vectors(j, k);
      }
    }
  }
  return out;
}

std::optional<std::vector<double>> SolveLinear(DenseMatrix a,
                                               std::vector<double> b) {
  const std::size_t n = a.dim();
  if (b.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "linear system dimensions");
  }
  const double scale = std::max(a.MaxAbs(), 1e-300);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) <= 1e-13 * scale) return std::nullopt;
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

double Binomial(int n, int r) {
  if (n < 0 || r < 0 || r > n) return 0.0;
  r = std::min(r, n - r);
  if (n < 20) {
    std::uint64_t result = 1;
    for (int i = 1; i <= r; ++i) {
      result = result * static_cast<std::uint64_t>(n - r + i) /
               static_cast<std::uint64_t>(i);
    }
    return static_cast<double>(result);
  }
  const double value = std::exp(std::lgamma(n + 1.0) - std::lgamma(r + 1.0) -
                                std::lgamma(n - r + 1.0));
  return value < 1e15 ? std::round(value) : value;
}

double RegularizedGammaQ(double a, double x) {
  if (!(a > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma shape <= 0");
  if (x <= 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - GammaPSeries(a, x);
  return GammaQContinuedFraction(a, x);
}

double Chi2Sf(double x, int dof) {
  if (dof < 1) throw Error(ErrorCode::kInvalidArgument, "dof must be >= 1");
  if (std::isnan(x)) throw Error(ErrorCode::kInvalidArgument, "x is NaN");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (dof == 2) return std::exp(-0.5 * x);
  return std::clamp(RegularizedGammaQ(0.5 * dof, 0.5 * x), 0.0, 1.0);
}

double Chi2Quantile(double p, int dof) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "chi-square quantile level outside (0,1)");
  }
  if (dof < 1) throw Error(ErrorCode::kInvalidArgument, "dof must be >= 1");
  const double target = 1.0 - p;  // survival level
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (Chi2Sf(hi, dof) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (Chi2Sf(mid, dof) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "normal quantile level outside (0,1)");
  }
  // Rational initial approximation (Acklam), polished by Halley steps.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int i = 0; i < 2; ++i) {
    const double e = NormalCdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

std::vector<double> ToUnconstrained(std::span<const double> x,
                                    std::span<const Domain> domains) {
  if (domains.empty()) return {x.begin(), x.end()};
  if (DomainWidth(domains) != x.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "domain map width");
  }
  std::vector<double> z(x.size());
  std::size_t at = 0;
  for (const Domain& d : domains) {
    switch (d.kind) {
      case Domain::Kind::kIdentity:
        z[at] = x[at];
        break;
      case Domain::Kind::kInterval: {
        const double u = std::clamp((x[at] - d.lo) / (d.hi - d.lo), 1e-15,
                                    1.0 - 1e-15);
        z[at] = std::log(u / (1.0 - u));
        break;
      }
      case Domain::Kind::kSimplex: {
        double rest = 1.0;
        for (int i = 0; i < d.size; ++i) rest -= x[at + i];
        rest = std::max(rest, 1e-300);
        for (int i = 0; i < d.size; ++i) {
          z[at + i] = std::log(std::max(x[at + i], 1e-300) / rest);
        }
        break;
      }
    }
    at += static_cast<std::size_t>(d.size);
  }
  return z;
}

std::vector<double> ToConstrained(std::span<const double> z,
                                  std::span<const Domain> domains) {
  if (domains.empty()) return {z.begin(), z.end()};
  if (DomainWidth(domains) != z.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "domain map width");
  }
  std::vector<double> x(z.size());
  std::size_t at = 0;
  for (const Domain& d : domains) {
    switch (d.kind) {
      case Domain::Kind::kIdentity:
        x[at] = z[at];
        break;
      case Domain::Kind::kInterval:
        x[at] = d.lo + (d.hi - d.lo) * Logistic(z[at]);
        break;
      case Domain::Kind::kSimplex: {
        double top = 0.0;
        for (int i = 0; i < d.size; ++i) top = std::max(top, z[at + i]);
        double denom = std::exp(-top);
        for (int i = 0; i < d.size; ++i) denom += std::exp(z[at + i] - top);
        for (int i = 0; i < d.size; ++i) {
          x[at + i] = std::exp(z[at + i] - top) / denom;
        }
        break;
      }
    }
    at += static_cast<std::size_t>(d.size);
  }
  return x;
}

MinimizeResult Minimize(const Objective& objective,
                        std::span<const double> start,
                        std::span<const Domain> domains,
                        const MinimizeOptions& options) {
  const std::size_t m = start.size();
  if (!domains.empty() && DomainWidth(domains) != m) {
    throw Error(ErrorCode::kDimensionMismatch, "domain map width");
  }
  auto eval = [&](std::span<const double> z) {
    const std::vector<double> x = ToConstrained(z, domains);
    const double v = objective(x);
    return std::isfinite(v) ? v : kInf;
  };

  const double start_value = objective(start);
  if (!std::isfinite(start_value)) {
    throw Error(ErrorCode::kNonFiniteObjective,
                "objective not finite at the starting point");
  }
  MinimizeResult result{{start.begin(), start.end()}, start_value, 0, m == 0};
  if (m == 0) return result;

  std::vector<double> best_z = ToUnconstrained(start, domains);
  double best_value = start_value;
  std::vector<std::vector<double>> simplex(m + 1);
  std::vector<double> values(m + 1);
  std::vector<double> centroid(m), trial(m), trial2(m);

  for (int run = 0; run <= options.restarts; ++run) {
    simplex[0] = best_z;
    values[0] = eval(best_z);
    for (std::size_t i = 0; i < m; ++i) {
      simplex[i + 1] = best_z;
      simplex[i + 1][i] += options.initial_step;
      values[i + 1] = eval(simplex[i + 1]);
    }
    std::vector<std::size_t> order(m + 1);
    bool converged = false;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      ++result.iterations;
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return values[x] < values[y];
      });
      const std::size_t lo = order[0];
      const std::size_t hi = order[m];
      const std::size_t next_hi = order[m - 1];
      double diameter = 0.0;
      for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
          diameter = std::max(diameter, std::abs(simplex[i][k] - simplex[lo][k]));
        }
      }
      if (diameter < options.diameter_tolerance) {
        converged = true;
        break;
      }
      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= m; ++i) {
        if (i == hi) continue;
        for (std::size_t k = 0; k < m; ++k) centroid[k] += simplex[i][k];
      }
      for (double& c : centroid) c /= static_cast<double>(m);

      for (std::size_t k = 0; k < m; ++k) {
        trial[k] = centroid[k] + (centroid[k] - simplex[hi][k]);
      }
      const double fr = eval(trial);
      if (fr < values[lo]) {
        for (std::size_t k = 0; k < m; ++k) {
          trial2[k] = centroid[k] + 2.0 * (trial[k] - centroid[k]);
        }
        const double fe = eval(trial2);
        if (fe < fr) {
          simplex[hi] = trial2;
          values[hi] = fe;
        } else {
          simplex[hi] = trial;
          values[hi] = fr;
        }
        continue;
      }
      if (fr < values[next_hi]) {
        simplex[hi] = trial;
        values[hi] = fr;
        continue;
      }
      const bool outside = fr < values[hi];
      for (std::size_t k = 0; k < m; ++k) {
        const double toward = outside ? trial[k] : simplex[hi][k];
        trial2[k] = centroid[k] + 0.5 * (toward - centroid[k]);
      }
      const double fc = eval(trial2);
      if (fc < (outside ? fr : values[hi])) {
        simplex[hi] = trial2;
        values[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= m; ++i) {
        if (i == lo) continue;
        for (std::size_t k = 0; k < m; ++k) {
          simplex[i][k] = simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
        }
        values[i] = eval(simplex[i]);
      }
    }
    const std::size_t arg =
        static_cast<std::size_t>(std::min_element(values.begin(), values.end()) -
                                 values.begin());
    if (values[arg] <= best_value) {
      best_value = values[arg];
      best_z = simplex[arg];
    }
    result.converged = converged;
  }
  if (best_value < result.value) {
    result.value = best_value;
    result.argmin = ToConstrained(best_z, domains);
  }
  return result;
}

}  // namespace lgdp
