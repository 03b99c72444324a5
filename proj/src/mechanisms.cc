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

#include "lgdp/mechanisms.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "lgdp/errors.h"
#include "lgdp/numerics.h"

namespace lgdp {

namespace {

constexpr double kMaxEnumeratedAtoms = 1e6;
constexpr double kMaxSamplerTable = 1e4;

void CheckIndex(const MechanismSpec& mech, int j, const char* what) {
  if (j < 0 || j >= mech.groups()) {
    throw Error(ErrorCode::kOutOfRange,
                std::string(what) + " index " + std::to_string(j) +
                    " outside [0, " + std::to_string(mech.groups()) + ")");
  }
}

// Pr[bit j | input j] written to stay finite for very large epsilon.
double SubsetKeep(int g, double eps, int k) {
  return k / (k + (g - k) * std::exp(-eps));
}

double BitFlipKeep(double eps) { return 1.0 / (1.0 + std::exp(-0.5 * eps)); }

// All k-subsets of {0..g-1} as bit masks in increasing numeric order.
std::vector<std::uint64_t> EnumerateSubsets(int g, int k) {
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(Binomial(g, k)));
  const std::uint64_t limit = g == 64 ? 0 : (std::uint64_t{1} << g);
  std::uint64_t v = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  while (true) {
    out.push_back(v);
    // Gosper's hack: next larger integer with the same popcount.
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    if (r == 0) break;
    v = (((r ^ v) >> 2) / c) | r;
    if (limit != 0 && v >= limit) break;
  }
  return out;
}

// Probability of one k-subset outcome `mask` given input j.
double SubsetAtomProbability(int g, double keep, int k, int j,
                             std::uint64_t mask) {
  if ((mask >> j) & 1u) return keep / Binomial(g - 1, k - 1);
  return (1.0 - keep) / Binomial(g - 1, k);
}

}  // namespace

std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kRandResponse:
      return "rr";
    case MechanismKind::kBitFlip:
      return "bitflip";
    case MechanismKind::kSubset:
      return "subset";
  }
  return "unknown";
}

MechanismKind ParseMechanismKind(std::string_view name) {
  if (name == "rr" || name == "randresponse") return MechanismKind::kRandResponse;
  if (name == "bitflip") return MechanismKind::kBitFlip;
  if (name == "subset") return MechanismKind::kSubset;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown mechanism '" + std::string(name) + "'");
}

MechanismSpec::MechanismSpec(MechanismKind kind, int groups, double epsilon,
                             int k)
    : kind_(kind), groups_(groups), epsilon_(epsilon), k_(k) {
  if (groups < 2 || groups > kMaxGroups) {
    throw Error(ErrorCode::kInvalidArgument,
                "group count must lie in [2, 64], got " + std::to_string(groups));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive and finite");
  }
  if (kind == MechanismKind::kSubset && (k < 1 || k >= groups)) {
    throw Error(ErrorCode::kInvalidArgument,
                "subset size must lie in [1, g-1], got " + std::to_string(k));
  }
}

MechanismSpec MechanismSpec::RandResponse(int groups, double epsilon) {
  return MechanismSpec(MechanismKind::kRandResponse, groups, epsilon, 1);
}

MechanismSpec MechanismSpec::BitFlip(int groups, double epsilon) {
  return MechanismSpec(MechanismKind::kBitFlip, groups, epsilon, 0);
}

MechanismSpec MechanismSpec::Subset(int groups, double epsilon, int k) {
  return MechanismSpec(MechanismKind::kSubset, groups, epsilon, k);
}

MechanismSpec MechanismSpec::SubsetOptimal(int groups, double epsilon) {
  return Subset(groups, epsilon, OptimalSubsetK(groups, epsilon));
}

std::optional<int> MechanismSpec::subset_size() const {
  if (kind_ == MechanismKind::kSubset) return k_;
  return std::nullopt;
}

int MechanismSpec::fixed_popcount() const {
  switch (kind_) {
    case MechanismKind::kRandResponse:
      return 1;
    case MechanismKind::kSubset:
      return k_;
    case MechanismKind::kBitFlip:
      return 0;
  }
  return 0;
}

std::string MechanismSpec::DebugString() const {
  std::ostringstream os;
  os << MechanismName(kind_) << "(g=" << groups_ << ", eps=" << epsilon_;
  if (kind_ == MechanismKind::kSubset) os << ", k=" << k_;
  os << ")";
  return os.str();
}

int OptimalSubsetK(int groups, double epsilon) {
  if (groups < 2) throw Error(ErrorCode::kInvalidArgument, "g must be >= 2");
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  const double raw = std::ceil(groups / (std::exp(epsilon) + 1.0));
  return static_cast<int>(std::clamp(raw, 1.0, groups - 1.0));
}

PrivatizedLabel::PrivatizedLabel(int groups, std::uint64_t mask)
    : groups_(groups), mask_(mask) {
  if (groups < 1 || groups > kMaxGroups) {
    throw Error(ErrorCode::kInvalidArgument, "label group count out of range");
  }
  if (groups < 64 && (mask >> groups) != 0) {
    throw Error(ErrorCode::kOutOfRange, "label has bits beyond g");
  }
}

PrivatizedLabel PrivatizedLabel::OneHot(int groups, int j) {
  if (j < 0 || j >= groups) throw Error(ErrorCode::kOutOfRange, "group index");
  return PrivatizedLabel(groups, std::uint64_t{1} << j);
}

int PrivatizedLabel::popcount() const { return std::popcount(mask_); }

std::vector<int> PrivatizedLabel::bits() const {
  std::vector<int> out(static_cast<std::size_t>(groups_));
  for (int l = 0; l < groups_; ++l) out[l] = test(l) ? 1 : 0;
  return out;
}

ChannelProfile ChannelProfile::Identity(int groups) {
  ChannelProfile p;
  p.groups = groups;
  return p;
}

ChannelProfile ChannelProfile::FromMechanism(const MechanismSpec& mech) {
  const int g = mech.groups();
  const double eps = mech.epsilon();
  ChannelProfile p;
  p.groups = g;
  switch (mech.kind()) {
    case MechanismKind::kRandResponse: {
      const double t = std::exp(-eps);
      p.diag = 1.0 / (1.0 + (g - 1) * t);
      p.off = t / (1.0 + (g - 1) * t);
      break;
    }
    case MechanismKind::kBitFlip: {
      p.diag = BitFlipKeep(eps);
      p.off = 1.0 / (std::exp(0.5 * eps) + 1.0);
      p.pair_with_input = p.diag * p.off;
      p.pair_without_input = p.off * p.off;
      p.one_hot = false;
      break;
    }
    case MechanismKind::kSubset: {
      const int k = *mech.subset_size();
      const double keep = SubsetKeep(g, eps, k);
      const double in = Binomial(g - 1, k - 1);
      const double out = Binomial(g - 1, k);
      p.diag = keep;
      p.off = keep * Binomial(g - 2, k - 2) / in +
              (1.0 - keep) * Binomial(g - 2, k - 1) / out;
      p.pair_with_input = keep * Binomial(g - 2, k - 2) / in;
      p.pair_without_input = keep * Binomial(g - 3, k - 3) / in +
                             (1.0 - keep) * Binomial(g - 3, k - 2) / out;
      p.one_hot = k == 1;
      break;
    }
  }
  return p;
}

ChannelProfile ChannelProfile::From(const std::optional<MechanismSpec>& mech,
                                    int groups) {
  if (!mech) return Identity(groups);
  if (mech->groups() != groups) {
    throw Error(ErrorCode::kInvalidArgument,
                "mechanism group count " + std::to_string(mech->groups()) +
                    " differs from " + std::to_string(groups));
  }
  return FromMechanism(*mech);
}

double ChannelProfile::Pair(int input, int a, int b) const {
  if (a == b) return Marginal(input, a);
  if (input == a || input == b) return pair_with_input;
  return pair_without_input;
}

void ChannelProfile::Mix(const double* v, double* out) const {
  double total = 0.0;
  for (int m = 0; m < groups; ++m) total += v[m];
  const double base = off * total;
  const double gain = diag - off;
  for (int l = 0; l < groups; ++l) out[l] = base + gain * v[l];
}

std::vector<double> MarginalProbabilities(const MechanismSpec& mech, int j) {
  CheckIndex(mech, j, "input");
  const ChannelProfile p = ChannelProfile::FromMechanism(mech);
  std::vector<double> out(static_cast<std::size_t>(mech.groups()), p.off);
  out[j] = p.diag;
  return out;
}

double PairProbability(const MechanismSpec& mech, int j, int a, int b) {
  CheckIndex(mech, j, "input");
  CheckIndex(mech, a, "first bit");
  CheckIndex(mech, b, "second bit");
  if (a == b) {
    throw Error(ErrorCode::kInvalidArgument,
                "pair probability needs distinct bits; use the marginal");
  }
  return ChannelProfile::FromMechanism(mech).Pair(j, a, b);
}

double VerifyLdp(const MechanismSpec& mech) {
  const int g = mech.groups();
  const double eps = mech.epsilon();
  // Probability of each atom under each input, atoms enumerated lazily.
  std::vector<double> probs(static_cast<std::size_t>(g));
  double worst = 1.0;
  auto consider = [&]() {
    const auto [lo, hi] = std::minmax_element(probs.begin(), probs.end());
    if (*hi == 0.0) return;
    worst = std::max(worst, *lo == 0.0 ? std::numeric_limits<double>::infinity()
                                       : *hi / *lo);
  };
  switch (mech.kind()) {
    case MechanismKind::kRandResponse: {
      const ChannelProfile p = ChannelProfile::FromMechanism(mech);
      for (int l = 0; l < g; ++l) {
        for (int x = 0; x < g; ++x) probs[x] = p.Marginal(x, l);
        consider();
      }
      break;
    }
    case MechanismKind::kSubset: {
      const int k = *mech.subset_size();
      if (Binomial(g, k) > kMaxEnumeratedAtoms) {
        throw Error(ErrorCode::kEnumerationTooLarge, "C(g,k) exceeds 1e6");
      }
      const double keep = SubsetKeep(g, eps, k);
      for (std::uint64_t mask : EnumerateSubsets(g, k)) {
        for (int x = 0; x < g; ++x) {
          probs[x] = SubsetAtomProbability(g, keep, k, x, mask);
        }
        consider();
      }
      break;
    }
    case MechanismKind::kBitFlip: {
      if (std::ldexp(1.0, g) > kMaxEnumeratedAtoms) {
        throw Error(ErrorCode::kEnumerationTooLarge, "2^g exceeds 1e6");
      }
      const double keep = BitFlipKeep(eps);
      const double flip = 1.0 / (std::exp(0.5 * eps) + 1.0);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g); ++mask) {
        const int ones = std::popcount(mask);
        for (int x = 0; x < g; ++x) {
          const bool hit = (mask >> x) & 1u;
          // Hamming distance between the atom and e_x.
          const int disagree = hit ? ones - 1 : ones + 1;
          probs[x] = std::pow(flip, disagree) * std::pow(keep, g - disagree);
        }
        consider();
      }
      break;
    }
  }
  return worst;
}

LabelSampler::LabelSampler(const MechanismSpec& mech) : mech_(mech) {
  const int g = mech.groups();
  switch (mech.kind()) {
    case MechanismKind::kBitFlip:
      keep_ = BitFlipKeep(mech.epsilon());
      return;
    case MechanismKind::kRandResponse:
    case MechanismKind::kSubset:
      break;
  }
  // RR is the k = 1 subset channel; both share the inverse-CDF tables.
  const int k = mech.kind() == MechanismKind::kSubset ? *mech.subset_size() : 1;
  const ChannelProfile profile = ChannelProfile::FromMechanism(mech);
  keep_ = profile.diag;
  if (Binomial(g, k) > kMaxSamplerTable) return;
  outcomes_ = EnumerateSubsets(g, k);
  cdf_.assign(static_cast<std::size_t>(g), {});
  for (int j = 0; j < g; ++j) {
    std::vector<double>& cdf = cdf_[j];
    cdf.reserve(outcomes_.size());
    double running = 0.0;
    for (std::uint64_t mask : outcomes_) {
      running += SubsetAtomProbability(g, keep_, k, j, mask);
      cdf.push_back(running);
    }
  }
}

std::uint64_t LabelSampler::DrawMask(int j, Rng& rng) const {
  CheckIndex(mech_, j, "input");
  const int g = mech_.groups();
  if (mech_.kind() == MechanismKind::kBitFlip) {
    std::uint64_t mask = 0;
    for (int l = 0; l < g; ++l) {
      const bool truth = l == j;
      const bool kept = UniformUnit(rng) < keep_;
      if (truth == kept) mask |= std::uint64_t{1} << l;
    }
    return mask;
  }
  if (cdf_.empty()) return DrawTwoStage(j, rng);
  const std::vector<double>& cdf = cdf_[j];
  const double u = UniformUnit(rng) * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return outcomes_[static_cast<std::size_t>(it - cdf.begin())];
}

std::uint64_t LabelSampler::DrawTwoStage(int j, Rng& rng) const {
  const int g = mech_.groups();
  const int k = mech_.fixed_popcount();
  const bool include = UniformUnit(rng) < keep_;
  std::uint64_t mask = include ? (std::uint64_t{1} << j) : 0;
  int needed = include ? k - 1 : k;
  std::vector<int> others;
  others.reserve(static_cast<std::size_t>(g - 1));
  for (int l = 0; l < g; ++l) {
    if (l != j) others.push_back(l);
  }
  // Partial Fisher-Yates over the other groups.
  for (int i = 0; i < needed; ++i) {
    const int span = static_cast<int>(others.size()) - i;
    const int pick =
        i + std::min(span - 1, static_cast<int>(UniformUnit(rng) * span));
    std::swap(others[i], others[pick]);
    mask |= std::uint64_t{1} << others[i];
  }
  return mask;
}

PrivatizedLabel Privatize(const MechanismSpec& mech, int j, Rng& rng) {
  return LabelSampler(mech).Draw(j, rng);
}

}  // namespace lgdp
