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

// Local group DP channels over g groups: randomized response, bit flipping
// and the subset mechanism. Group indices are 0-based throughout.

#ifndef LGDP_MECHANISMS_H_
#define LGDP_MECHANISMS_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace lgdp {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

enum class MechanismKind { kRandResponse, kBitFlip, kSubset };

std::string_view MechanismName(MechanismKind kind);
// Accepts "rr", "bitflip" or "subset".
MechanismKind ParseMechanismKind(std::string_view name);

inline constexpr int kMaxGroups = 64;

class MechanismSpec {
 public:
  static MechanismSpec RandResponse(int groups, double epsilon);
  static MechanismSpec BitFlip(int groups, double epsilon);
  static MechanismSpec Subset(int groups, double epsilon, int k);
  // Subset with k = OptimalSubsetK(groups, epsilon).
  static MechanismSpec SubsetOptimal(int groups, double epsilon);

  MechanismKind kind() const { return kind_; }
  int groups() const { return groups_; }
  double epsilon() const { return epsilon_; }
  // Present iff kind() == kSubset.
  std::optional<int> subset_size() const;
  // Number of set bits in every output: 1 for RR, k for Subset; BitFlip has
  // no fixed popcount and reports 0.
  int fixed_popcount() const;

  std::string DebugString() const;

 private:
  MechanismSpec(MechanismKind kind, int groups, double epsilon, int k);

  MechanismKind kind_;
  int groups_;
  double epsilon_;
  int k_;
};

// ceil(g / (e^eps + 1)) clamped to [1, g - 1].
int OptimalSubsetK(int groups, double epsilon);

// A privatized group label: bit l set means group l was reported.
class PrivatizedLabel {
 public:
  PrivatizedLabel(int groups, std::uint64_t mask);
  static PrivatizedLabel OneHot(int groups, int j);

  int groups() const { return groups_; }
  std::uint64_t mask() const { return mask_; }
  bool test(int l) const { return (mask_ >> l) & 1u; }
  int popcount() const;
  std::vector<int> bits() const;

  friend bool operator==(const PrivatizedLabel&,
                         const PrivatizedLabel&) = default;

 private:
  int groups_;
  std::uint64_t mask_;
};

// Pr[bit l set | input j] for l = 0..g-1.
std::vector<double> MarginalProbabilities(const MechanismSpec& mech, int j);

// Pr[bit a set and bit b set | input j], a != b.
double PairProbability(const MechanismSpec& mech, int j, int a, int b);

// Max over output atoms and input pairs of Pr[out | x] / Pr[out | x'].
// Throws kEnumerationTooLarge when the output space exceeds 1e6 atoms.
double VerifyLdp(const MechanismSpec& mech);

// The channel quantities every covariance needs. For the three mechanisms
// (and the identity channel) they depend only on whether the queried bits
// coincide with the input group.
struct ChannelProfile {
  int groups = 2;
  double diag = 1.0;                // Pr[bit j | input j]
  double off = 0.0;                 // Pr[bit l | input j], l != j
  double pair_with_input = 0.0;     // Pr[bits j, l | input j]
  double pair_without_input = 0.0;  // Pr[bits a, b | input j], j not in {a, b}
  bool one_hot = true;              // every output has exactly one set bit

  static ChannelProfile Identity(int groups);
  static ChannelProfile FromMechanism(const MechanismSpec& mech);
  static ChannelProfile From(const std::optional<MechanismSpec>& mech,
                             int groups);

  double Marginal(int input, int l) const { return input == l ? diag : off; }
  // Pr[bits a and b | input]; a == b gives the marginal.
  double Pair(int input, int a, int b) const;
  // Sum over l of Pr[bit l | input]; independent of the input.
  double RowSum() const { return diag + (groups - 1) * off; }
  // (channel matrix * v)_l = off * sum(v) + (diag - off) * v_l.
  void Mix(const double* v, double* out) const;
};

// Samples privatized labels. Tables for enumerated outcomes are built once,
// so reuse one sampler across many draws.
class LabelSampler {
 public:
  explicit LabelSampler(const MechanismSpec& mech);

  const MechanismSpec& mechanism() const { return mech_; }
  std::uint64_t DrawMask(int j, Rng& rng) const;
  PrivatizedLabel Draw(int j, Rng& rng) const {
    return PrivatizedLabel(mech_.groups(), DrawMask(j, rng));
  }

 private:
  std::uint64_t DrawTwoStage(int j, Rng& rng) const;

  MechanismSpec mech_;
  double keep_ = 1.0;                  // diagonal inclusion probability
  std::vector<std::uint64_t> outcomes_;  // enumerated k-subsets
  std::vector<std::vector<double>> cdf_;  // per input, over outcomes_
};

// One-off draw; builds a LabelSampler internally.
PrivatizedLabel Privatize(const MechanismSpec& mech, int j, Rng& rng);

}  // namespace lgdp

#endif  // LGDP_MECHANISMS_H_
