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

// Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails. Pass criterion numbers to run a subset.
//
// Environment:
//   LGDP_ADULT_DIR  directory with adult.data and adult.test (criterion 12)

#include <algorithm>
#include <bit>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lgdp/abtest.h"
#include "lgdp/errors.h"
#include "lgdp/independence.h"
#include "lgdp/io.h"
#include "lgdp/means.h"
#include "lgdp/mechanisms.h"
#include "lgdp/numerics.h"
#include "lgdp/proportions.h"
#include "lgdp/simlab.h"
#include "test_util.h"

namespace lgdp {
namespace {

enum class Status { kPass, kFail, kSkip };

struct Verdict {
  Status status = Status::kPass;
  std::vector<std::string> notes;

  // Records a check; any failed check fails the criterion.
  void Check(bool ok, const std::string& what) {
    if (!ok) {
      status = Status::kFail;
      notes.push_back("FAILED " + what);
    }
  }
  void Note(const std::string& text) { notes.push_back(text); }
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::vector<MechanismSpec> AllMechanisms(int g, double eps) {
  std::vector<MechanismSpec> out = {MechanismSpec::RandResponse(g, eps),
                                    MechanismSpec::BitFlip(g, eps)};
  for (int k = 1; k < g; ++k) out.push_back(MechanismSpec::Subset(g, eps, k));
  return out;
}

std::vector<double> RandomSimplex(int g, Rng& rng, double floor = 0.02) {
  std::vector<double> pi(g);
  double total = 0.0;
  for (double& v : pi) {
    v = floor - std::log(1.0 - UniformUnit(rng));
    total += v;
  }
  for (double& v : pi) v /= total;
  return pi;
}

double Uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * UniformUnit(rng); }

double MaxAbsDiff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).MaxAbs(); }

DenseMatrix Multinomial(std::span<const double> theta) {
  DenseMatrix c(theta.size());
  for (std::size_t a = 0; a < theta.size(); ++a) {
    for (std::size_t b = 0; b < theta.size(); ++b) {
      c(a, b) = (a == b ? theta[a] : 0.0) - theta[a] * theta[b];
    }
  }
  return c;
}

ExperimentConfig LoadShipped(const std::string& name, int trials) {
  ExperimentConfig c =
      LoadExperimentConfig(std::string(LGDP_SOURCE_DIR) + "/configs/" + name + ".json");
  c.trials = trials;
  return c;
}

// --- 1 ---------------------------------------------------------------------
Verdict PrivacyBound() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  double worst_excess = -1.0;
  double rr_error = 0.0;
  int checked = 0;
  for (int g = 2; g <= 8; ++g) {
    for (double eps : {0.5, 1.0, 2.0, 3.0}) {
      for (const MechanismSpec& m : AllMechanisms(g, eps)) {
        const double ratio = VerifyLdp(m);
        worst_excess = std::max(worst_excess, ratio - std::exp(eps));
        v.Check(ratio <= std::exp(eps) + 1e-9, m.DebugString());
        if (m.kind() == MechanismKind::kRandResponse) {
          rr_error = std::max(rr_error, std::abs(ratio - std::exp(eps)) / std::exp(eps));
        }
        ++checked;
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.Check(rr_error <= 1e-14, Fmt("RR ratio equals e^eps (rel err %.2e)", rr_error));
  v.Check(seconds < 10.0, Fmt("runtime %.2fs < 10s", seconds));
  v.Note(Fmt("%d mechanisms; max ratio - e^eps = %.2e; RR rel err %.1e; %.2fs", checked,
             worst_excess, rr_error, seconds));
  return v;
}

// --- 2 ---------------------------------------------------------------------
Verdict ChannelAlgebra() {
  Verdict v;
  double worst = 0.0;
  for (int g = 2; g <= 8; ++g) {
    for (double eps : {0.5, 1.0, 2.0, 3.0}) {
      for (int k = 1; k < g; ++k) {
        const MechanismSpec m = MechanismSpec::Subset(g, eps, k);
        const double e = std::exp(eps);
        const double norm = Binomial(g - 1, k - 1) * e + Binomial(g - 1, k);
        for (int j = 0; j < g; ++j) {
          std::vector<double> marg(g, 0.0);
          std::vector<std::vector<double>> pair(g, std::vector<double>(g, 0.0));
          for (std::uint64_t s = 0; s < (1ULL << g); ++s) {
            if (std::popcount(s) != k) continue;
            const double p = (((s >> j) & 1u) ? e : 1.0) / norm;
            for (int a = 0; a < g; ++a) {
              if (!((s >> a) & 1u)) continue;
              marg[a] += p;
              for (int b = 0; b < g; ++b) {
                if (b != a && ((s >> b) & 1u)) pair[a][b] += p;
              }
            }
          }
          const std::vector<double> got = MarginalProbabilities(m, j);
          for (int a = 0; a < g; ++a) {
            worst = std::max(worst, std::abs(got[a] - marg[a]));
            for (int b = a + 1; b < g; ++b) {
              worst = std::max(worst, std::abs(PairProbability(m, j, a, b) - pair[a][b]));
            }
          }
        }
      }
    }
  }
  v.Check(worst <= 1e-12, Fmt("enumeration max error %.2e <= 1e-12", worst));
  double rr_gap = 0.0;
  for (int g = 2; g <= 8; ++g) {
    for (double eps : {0.5, 1.0, 2.0, 3.0}) {
      const MechanismSpec s = MechanismSpec::Subset(g, eps, 1);
      const MechanismSpec r = MechanismSpec::RandResponse(g, eps);
      for (int j = 0; j < g; ++j) {
        const auto ms = MarginalProbabilities(s, j), mr = MarginalProbabilities(r, j);
        for (int a = 0; a < g; ++a) {
          rr_gap = std::max(rr_gap, std::abs(ms[a] - mr[a]));
          for (int b = a + 1; b < g; ++b) {
            rr_gap = std::max(rr_gap,
                              std::abs(PairProbability(s, j, a, b) - PairProbability(r, j, a, b)));
          }
        }
      }
      rr_gap = std::max(rr_gap, std::abs(VerifyLdp(s) - VerifyLdp(r)));
    }
  }
  v.Check(rr_gap <= 1e-12, Fmt("Subset(k=1) vs RR max gap %.2e", rr_gap));
  v.Note(Fmt("enumeration error %.1e; Subset(k=1) vs RR %.1e", worst, rr_gap));
  return v;
}

// --- 3 ---------------------------------------------------------------------
Verdict CovarianceLemmas() {
  Verdict v;
  Rng rng(3);
  double worst_indep = 0.0, worst_anova = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int g = 3 + static_cast<int>(rng() % 6);
    const double eps = Uniform(rng, 0.2, 4.0);
    const int k = 1 + static_cast<int>(rng() % (g - 1));
    IndepParams ip;
    ip.p = Uniform(rng, 0.05, 0.95);
    ip.pi = RandomSimplex(g, rng);
    ip.mechanism = MechanismSpec::Subset(g, eps, k);
    const DenseMatrix c = IndepCovariance(ip);
    const std::vector<double> ones(c.dim(), 1.0);
    double r = 0.0;
    for (double x : c.Apply(ones)) r = std::max(r, std::abs(x));
    worst_indep = std::max(worst_indep, r / c.InfNorm());

    MeansParams mp;
    mp.pi = RandomSimplex(g, rng);
    for (int j = 0; j < g; ++j) {
      mp.mu.push_back(Uniform(rng, -3.0, 3.0));
      mp.sigma.push_back(Uniform(rng, 0.2, 3.0));
    }
    mp.mechanism = MechanismSpec::Subset(g, eps, k);
    const DenseMatrix m = MomentCovariance(mp);
    std::vector<double> ind(2 * g, 0.0);
    std::fill(ind.begin(), ind.begin() + g, 1.0);
    double a = 0.0;
    for (double x : m.Apply(ind)) a = std::max(a, std::abs(x));
    worst_anova = std::max(worst_anova, a);
  }
  v.Check(worst_indep <= 1e-10, Fmt("independence |C1|/|C| = %.2e", worst_indep));
  v.Check(worst_anova <= 1e-8, Fmt("ANOVA |C(1,0)| = %.2e", worst_anova));
  v.Note(Fmt("100 draws each; independence %.1e (rel), ANOVA %.1e (abs)", worst_indep,
             worst_anova));
  return v;
}

// --- 4 ---------------------------------------------------------------------
Verdict GeneralizedInverse() {
  Verdict v;
  Rng rng(4);
  std::map<std::string, double> worst;
  auto check = [&](const std::string& family, const DenseMatrix& c) {
    const DenseMatrix pinv = PseudoInverse(c).inverse;
    const double err = MaxAbsDiff(c * pinv * c, c);
    worst[family] = std::max(worst[family], err);
  };
  double multinomial_gap = 0.0;
  auto check_multinomial = [&](std::span<const double> theta) {
    const DenseMatrix c = Multinomial(theta);
    std::vector<double> inv(theta.size());
    for (std::size_t a = 0; a < theta.size(); ++a) inv[a] = 1.0 / theta[a];
    const DenseMatrix d = DenseMatrix::Diagonal(inv);
    multinomial_gap = std::max(multinomial_gap, MaxAbsDiff(c * d * c, c));
    const DenseMatrix pinv = PseudoInverse(c).inverse;
    for (int r = 0; r < 5; ++r) {
      std::vector<double> w(theta.size());
      for (double& x : w) x = Uniform(rng, -1.0, 1.0);
      const std::vector<double> u = c.Apply(w);  // in the range of C
      const double qd = d.QuadraticForm(u), qp = pinv.QuadraticForm(u);
      multinomial_gap = std::max(multinomial_gap, std::abs(qd - qp) / std::max(1.0, qp));
    }
  };
  for (int t = 0; t < 25; ++t) {
    const double eps = Uniform(rng, 0.3, 3.0);
    PropParams pp;
    pp.pi = Uniform(rng, 0.05, 0.95);
    pp.p2 = Uniform(rng, 0.1, 0.9);
    pp.p1 = std::clamp(pp.p2 + Uniform(rng, -0.1, 0.1), 0.01, 0.99);
    for (std::optional<double> e : {std::optional<double>(), std::optional<double>(eps)}) {
      pp.epsilon = e;
      const auto theta = PropTheta(pp);
      check("proportions", Multinomial(theta));
      check_multinomial(theta);
    }
    const int g = 2 + static_cast<int>(rng() % 7);
    std::vector<std::optional<MechanismSpec>> mechs = {std::nullopt};
    for (const MechanismSpec& m :
         {MechanismSpec::RandResponse(g, eps), MechanismSpec::BitFlip(g, eps),
          MechanismSpec::SubsetOptimal(g, eps),
          MechanismSpec::Subset(g, eps, 1 + static_cast<int>(rng() % (g - 1)))}) {
      mechs.push_back(m);
    }
    for (const auto& mech : mechs) {
      const std::string tag = mech ? std::string(MechanismName(mech->kind())) : "none";
      IndepParams ip;
      ip.p = Uniform(rng, 0.05, 0.95);
      ip.pi = RandomSimplex(g, rng);
      ip.mechanism = mech;
      check("independence/" + tag, IndepCovariance(ip));
      if (!mech || mech->kind() == MechanismKind::kRandResponse) {
        check_multinomial(IndepTheta(ip));
      }
      MeansParams mp;
      mp.pi = RandomSimplex(g, rng);
      for (int j = 0; j < g; ++j) {
        mp.mu.push_back(Uniform(rng, -2.0, 2.0));
        mp.sigma.push_back(Uniform(rng, 0.3, 2.0));
      }
      mp.mechanism = mech;
      DenseMatrix mc = MomentCovariance(mp);
      check("means/" + tag, mc);
      if (DropsLastIndicator(mech)) check("means-dropped/" + tag, mc.Drop(g - 1));
    }
    ABParams ab;
    ab.pi = Uniform(rng, 0.1, 0.9);
    ab.lambda = Uniform(rng, 0.05, 0.95);
    for (double& m : ab.mu) m = Uniform(rng, -2.0, 2.0);
    for (double& s : ab.sigma) s = Uniform(rng, 0.3, 2.0);
    for (std::optional<double> e : {std::optional<double>(), std::optional<double>(eps)}) {
      ab.epsilon = e;
      check(e ? "abtest/private" : "abtest/none", AbCovariance(ab));
    }
  }
  double overall = 0.0;
  std::string worst_family;
  for (const auto& [family, err] : worst) {
    v.Check(err <= 1e-8, Fmt("%s |CC+C - C| = %.2e", family.c_str(), err));
    if (err >= overall) {
      overall = err;
      worst_family = family;
    }
  }
  v.Check(multinomial_gap <= 1e-8,
          Fmt("Diag(theta)^-1 vs pseudo-inverse gap %.2e", multinomial_gap));
  v.Note(Fmt("%zu covariance families; worst %.1e (%s); multinomial gap %.1e", worst.size(),
             overall, worst_family.c_str(), multinomial_gap));
  return v;
}

// --- 5 ---------------------------------------------------------------------
constexpr int kCalibrationTrials = 500;
// Ungraded re-run of any model that misses, to tell noise from bias.
constexpr int kConfirmationTrials = 20000;

std::vector<ExperimentConfig> CalibrationConfigs() {
  std::vector<ExperimentConfig> out;
  ExperimentConfig base;
  base.n = 10000;
  base.trials = kCalibrationTrials;
  base.epsilon = 1.0;
  base.base_seed = 55;

  ExperimentConfig c = base;
  c.scenario = Scenario::kProportions;
  c.methods = {"chisq", "chisq_nonprivate"};
  c.pi = {0.3};
  c.p = {0.4, 0.4};
  out.push_back(c);

  c = base;
  c.scenario = Scenario::kIndependence;
  c.methods = {"chisq_nonprivate", "chisq:rr", "chisq:bitflip", "chisq:subset"};
  c.pi = {0.4, 0.3, 0.2, 0.1};
  c.p = {0.3, 0.3, 0.3, 0.3};
  out.push_back(c);

  c = base;
  c.scenario = Scenario::kMeans;
  c.methods = {"chisq", "chisq_nonprivate"};
  c.pi = {0.4};
  c.mu = {0.5, 0.5};
  c.sigma = {2.0, 1.0};
  out.push_back(c);

  c = base;
  c.scenario = Scenario::kAnova;
  c.methods = {"chisq_nonprivate", "chisq:rr", "chisq:bitflip", "chisq:subset"};
  c.pi = {0.25, 0.25, 0.3, 0.2};
  c.mu = {1.0, 1.0, 1.0, 1.0};
  c.sigma = {1.0, 1.0, 1.0, 1.0};
  out.push_back(c);

  c = base;
  c.scenario = Scenario::kPairwise;
  c.methods = {"chisq_nonprivate", "chisq:rr", "chisq:bitflip", "chisq:subset"};
  c.pi = {0.25, 0.25, 0.3, 0.2};
  c.mu = {1.0, 1.0, 0.5, 2.0};
  c.sigma = {1.5, 1.0, 1.0, 2.0};
  out.push_back(c);

  c = base;
  c.scenario = Scenario::kAbTest;
  c.methods = {"chisq", "chisq_nonprivate"};
  c.pi = {0.4};
  c.lambda = 0.5;
  c.mu = {0.3, 0.6, 0.2, 0.5};
  c.sigma = {1.0, 1.5, 0.8, 1.2};
  out.push_back(c);
  return out;
}

Verdict Calibration() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  int models = 0;
  double widest = 0.0, lowest_ks = 1.0;
  std::vector<std::pair<ExperimentConfig, std::string>> missed;
  for (const ExperimentConfig& c : CalibrationConfigs()) {
    for (const CalibrationResult& r : RunNullCalibration(c)) {
      ++models;
      const std::string label = std::string(ScenarioName(c.scenario)) + "/" + r.method;
      const bool rate_ok = std::abs(r.rejection_rate - 0.05) <= 0.02 + 1e-12;
      const bool ks_ok = r.ks_p_value > 0.01;
      v.Check(rate_ok, Fmt("%s type-I %.3f (SE %.3f) within 0.05 +- 0.02", label.c_str(),
                           r.rejection_rate, r.rejection_se));
      v.Check(ks_ok, Fmt("%s KS vs chi2_%d p = %.4f", label.c_str(), r.dof, r.ks_p_value));
      v.Check(r.failures == 0, Fmt("%s %d failed fits", label.c_str(), r.failures));
      if (!rate_ok || !ks_ok) missed.emplace_back(c, r.method);
      widest = std::max(widest, std::abs(r.rejection_rate - 0.05));
      lowest_ks = std::min(lowest_ks, r.ks_p_value);
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.Check(seconds < 300.0, Fmt("runtime %.0fs < 300s", seconds));
  v.Note(Fmt("%d models x %d trials at n=1e4; max |rate-0.05| %.3f; min KS p %.3f; %.0fs",
             models, kCalibrationTrials, widest, lowest_ks, seconds));
  for (auto [c, method] : missed) {
    c.methods = {method};
    c.trials = kConfirmationTrials;
    c.base_seed += 1;
    const CalibrationResult r = RunNullCalibration(c).front();
    v.Note(Fmt("ungraded re-run of %s/%s with %d trials: type-I %.4f (SE %.4f), KS p %.3f",
               std::string(ScenarioName(c.scenario)).c_str(), method.c_str(),
               kConfirmationTrials, r.rejection_rate, r.rejection_se, r.ks_p_value));
  }
  return v;
}

// --- 6 ---------------------------------------------------------------------
Verdict LargeEpsilon() {
  Verdict v;
  constexpr double kEps = 20.0;
  constexpr int kDatasets = 100;
  constexpr std::int64_t kN = 10000;
  struct Tally {
    double max_diff = 0.0;
    int agree = 0;
    int rejects = 0;
  };
  std::map<std::string, Tally> tallies;
  auto record = [&](const std::string& name, const TestResult& priv, const TestResult& np) {
    Tally& t = tallies[name];
    t.max_diff = std::max(t.max_diff, std::abs(priv.statistic - np.statistic));
    t.agree += priv.reject == np.reject;
    t.rejects += np.reject;
  };
  Rng rng(6);
  const int g = 4;
  const std::vector<double> pi4 = {0.25, 0.25, 0.3, 0.2};
  for (int d = 0; d < kDatasets; ++d) {
    const double s = static_cast<double>(d) / (kDatasets - 1);  // effect scale in [0, 1]

    const PropCounts pc = testing::SimulateProp(0.4, 0.3 + 0.05 * s, 0.3, std::nullopt, kN, rng);
    record("proportions/rr", PropTest(pc, kEps, 0.0, 0.05),
           PropTest(pc, std::nullopt, 0.0, 0.05));

    std::vector<double> p = {0.3 + 0.06 * s, 0.3, 0.3, 0.3};
    const IndepCounts ic = testing::SimulateIndep(p, pi4, std::nullopt, kN, rng);
    const TestResult inp = IndepTest(ic, std::nullopt, 0.05);
    record("independence/rr", IndepTest(ic, MechanismSpec::RandResponse(g, kEps), 0.05), inp);
    record("independence/subset", IndepTest(ic, MechanismSpec::SubsetOptimal(g, kEps), 0.05),
           inp);
    record("independence/bitflip", IndepTest(ic, MechanismSpec::BitFlip(g, kEps), 0.05), inp);

    const std::vector<double> pi2 = {0.4, 0.6};
    const std::vector<double> mu2 = {0.15 * s, 0.0}, sd2 = {2.0, 1.0};
    const MomentVector m2 = testing::SimulateMeans(pi2, mu2, sd2, std::nullopt, kN, rng);
    record("means/rr", DiffMeansTest(m2, kEps, 0.0, 0.05),
           DiffMeansTest(m2, std::nullopt, 0.0, 0.05));

    const std::vector<double> mu4 = {1.0, 1.0, 1.0, 1.0 + 0.12 * s}, sd4 = {1.0, 1.0, 1.0, 1.0};
    const MomentVector m4 = testing::SimulateMeans(pi4, mu4, sd4, std::nullopt, kN, rng);
    const TestResult anp = AnovaTest(m4, std::nullopt, 0.05);
    record("anova/rr", AnovaTest(m4, MechanismSpec::RandResponse(g, kEps), 0.05), anp);
    record("anova/subset", AnovaTest(m4, MechanismSpec::SubsetOptimal(g, kEps), 0.05), anp);
    record("anova/bitflip", AnovaTest(m4, MechanismSpec::BitFlip(g, kEps), 0.05), anp);

    const std::vector<double> mup = {1.0 + 0.15 * s, 1.0, 0.5, 2.0}, sdp = {1.5, 1.0, 1.0, 2.0};
    const MomentVector mp = testing::SimulateMeans(pi4, mup, sdp, std::nullopt, kN, rng);
    const TestResult pnp = PairwiseWithinG(mp, std::nullopt, 0, 1, 0.0, 0.05);
    record("pairwise/rr",
           PairwiseWithinG(mp, MechanismSpec::RandResponse(g, kEps), 0, 1, 0.0, 0.05), pnp);
    record("pairwise/subset",
           PairwiseWithinG(mp, MechanismSpec::SubsetOptimal(g, kEps), 0, 1, 0.0, 0.05), pnp);
    record("pairwise/bitflip",
           PairwiseWithinG(mp, MechanismSpec::BitFlip(g, kEps), 0, 1, 0.0, 0.05), pnp);

    ABParams ab;
    ab.pi = 0.4;
    ab.lambda = 0.5;
    ab.mu = {0.3 + 0.15 * s, 0.6, 0.2, 0.5};
    ab.sigma = {1.0, 1.5, 0.8, 1.2};
    const auto samples = testing::SimulateAb(ab, kN, rng);
    record("abtest/rr", AbTest(samples, 0.5, kEps, 0.0, 0.05),
           AbTest(samples, 0.5, std::nullopt, 0.0, 0.05));
  }
  double worst = 0.0;
  int min_agree = kDatasets;
  for (const auto& [name, t] : tallies) {
    v.Check(t.max_diff <= 1e-3, Fmt("%s max |diff| %.2e <= 1e-3", name.c_str(), t.max_diff));
    v.Check(t.agree == kDatasets, Fmt("%s decisions agree %d/100", name.c_str(), t.agree));
    worst = std::max(worst, t.max_diff);
    min_agree = std::min(min_agree, t.agree);
  }
  v.Note(Fmt("%zu private models x 100 datasets at eps=20; max |diff| %.1e; "
                    "min agreement %d/100",
                    tallies.size(), worst, min_agree));
  return v;
}

// --- 7 ---------------------------------------------------------------------
Verdict ProportionCoverage() {
  Verdict v;
  double worst_valid = 0.0, weakest_plain = 1.0;
  for (const char* name : {"prop_coverage_pi10", "prop_coverage_pi50"}) {
    ExperimentConfig c = LoadShipped(name, 300);
    c.methods = {"chisq", "ztest_corrected", "ztest"};
    const SweepResult r = RunCoverageSweep(c);
    for (double gap : c.grid) {
      for (const char* m : {"chisq", "ztest_corrected"}) {
        const SweepCell& cell = r.At(gap, m);
        v.Check(cell.fraction <= 0.08, Fmt("%s %s miss %.3f at delta %.2f <= 0.08", name, m,
                                           cell.fraction, gap));
        worst_valid = std::max(worst_valid, cell.fraction);
      }
    }
    if (c.pi[0] == 0.1) {
      const SweepCell& plain = r.At(0.1, "ztest");
      weakest_plain = plain.fraction;
      v.Check(plain.fraction >= 0.5,
              Fmt("uncorrected miss %.3f at delta 0.10, pi 0.1 >= 0.5", plain.fraction));
    }
  }
  v.Note(Fmt("300 trials, eps=1, n=1e4; max corrected/chi2 miss %.3f; uncorrected miss "
             "%.3f at delta 0.1, pi 0.1",
             worst_valid, weakest_plain));
  return v;
}

// --- 8 ---------------------------------------------------------------------
Verdict MechanismPower() {
  Verdict v;
  for (int eps : {1, 2, 3}) {
    const ExperimentConfig c = LoadShipped("indep_power_g10_eps" + std::to_string(eps), 300);
    const SweepResult r = RunPowerSweep(c);
    double worst = 1.0;  // min of subset - max(others), or -max |z| at eps=3
    double worst_at = 0.0;
    for (double gap : c.grid) {
      const SweepCell& s = r.At(gap, "chisq:subset");
      const SweepCell& rr = r.At(gap, "chisq:rr");
      const SweepCell& bf = r.At(gap, "chisq:bitflip");
      if (eps < 3) {
        const double margin = s.fraction - std::max(rr.fraction, bf.fraction);
        v.Check(margin >= -0.03,
                Fmt("eps=%d gap %.3f subset %.3f vs max(rr %.3f, bitflip %.3f)", eps, gap,
                    s.fraction, rr.fraction, bf.fraction));
        if (margin < worst) {
          worst = margin;
          worst_at = gap;
        }
      } else {
        const double se = std::hypot(s.standard_error, rr.standard_error);
        const double diff = std::abs(s.fraction - rr.fraction);
        v.Check(diff <= 2.0 * se + 1e-12,
                Fmt("eps=3 gap %.3f |subset - rr| %.3f <= 2 SE %.3f", gap, diff, 2 * se));
        if (-diff < worst) {
          worst = -diff;
          worst_at = gap;
        }
      }
    }
    if (eps < 3) {
      v.Note(Fmt("eps=%d min(subset - max other) %+.3f at gap %.3f", eps, worst, worst_at));
    } else {
      v.Note(Fmt("eps=3 max |subset - rr| %.3f at gap %.3f", -worst, worst_at));
    }
  }
  return v;
}

// --- 9 ---------------------------------------------------------------------
// Returns the largest shortfall of the first method below the second.
double PowerShortfall(const SweepResult& r, const std::vector<double>& grid,
                      const std::string& aware, const std::string& naive, Verdict& v,
                      const std::string& label, bool graded) {
  double worst = -1.0;
  for (double gap : grid) {
    const double a = r.At(gap, aware).fraction, b = r.At(gap, naive).fraction;
    if (graded) {
      v.Check(a >= b - 0.03,
              Fmt("%s gap %.3f aware %.3f vs naive %.3f", label.c_str(), gap, a, b));
    }
    worst = std::max(worst, b - a);
  }
  return worst;
}

double MaxAbsGap(const SweepResult& r, const std::vector<double>& grid, const std::string& a,
                 const std::string& b) {
  double worst = 0.0;
  for (double gap : grid) {
    worst = std::max(worst, std::abs(r.At(gap, a).fraction - r.At(gap, b).fraction));
  }
  return worst;
}

Verdict NaiveComparison() {
  Verdict v;
  // Independence, ten uniform groups.
  std::map<int, double> indep_gap;
  for (int eps : {1, 2, 5}) {
    ExperimentConfig c = LoadShipped(
        "indep_power_g10_eps" + std::to_string(eps == 5 ? 3 : eps), 300);
    c.epsilon = eps;
    c.base_seed = 9;
    c.methods = {"chisq:subset", "pearson_naive:subset"};
    if (eps == 5) {
      c.grid.clear();
      for (int i = 0; i <= 8; ++i) c.grid.push_back(0.004 * i);
    }
    const SweepResult r = RunPowerSweep(c);
    const std::string label = Fmt("independence eps=%d", eps);
    const double shortfall = PowerShortfall(r, c.grid, "chisq:subset", "pearson_naive:subset",
                                            v, label, eps < 5);
    indep_gap[eps] = MaxAbsGap(r, c.grid, "chisq:subset", "pearson_naive:subset");
    v.Note(Fmt("%s max shortfall %+.3f, max |gap| %.3f", label.c_str(), shortfall,
               indep_gap[eps]));
  }
  // ANOVA analog, ten uniform groups with the last mean shifted.
  std::map<int, double> anova_gap;
  for (int eps : {1, 2, 5}) {
    ExperimentConfig c;
    c.scenario = Scenario::kAnova;
    c.methods = {"chisq:subset", "anova_naive:subset"};
    c.epsilon = eps;
    c.pi.assign(10, 0.1);
    c.mu.assign(10, 0.0);
    c.sigma.assign(10, 1.0);
    c.effect_group = 9;
    c.n = 10000;
    c.trials = 300;
    c.sweep_variable = "gap";
    const double step = eps == 1 ? 0.1 : eps == 2 ? 0.05 : 0.025;
    for (int i = 0; i <= 8; ++i) c.grid.push_back(step * i);
    c.base_seed = 16;
    const SweepResult r = RunPowerSweep(c);
    const std::string label = Fmt("anova eps=%d", eps);
    const double shortfall =
        PowerShortfall(r, c.grid, "chisq:subset", "anova_naive:subset", v, label, eps < 5);
    anova_gap[eps] = MaxAbsGap(r, c.grid, "chisq:subset", "anova_naive:subset");
    v.Note(Fmt("%s max shortfall %+.3f, max |gap| %.3f", label.c_str(), shortfall,
               anova_gap[eps]));
  }
  // Convergence: at eps=5 the curves differ by no more than MC noise.
  for (auto* gaps : {&indep_gap, &anova_gap}) {
    const char* which = gaps == &indep_gap ? "independence" : "anova";
    v.Check((*gaps)[5] <= 0.03 + 2.0 * std::sqrt(2 * 0.25 / 300),
            Fmt("%s eps=5 max |gap| %.3f within noise", which, (*gaps)[5]));
    v.Check((*gaps)[5] <= std::max((*gaps)[1], (*gaps)[2]),
            Fmt("%s gap shrinks at eps=5 (%.3f vs %.3f/%.3f)", which, (*gaps)[5], (*gaps)[1],
                (*gaps)[2]));
  }
  return v;
}

// --- 10 --------------------------------------------------------------------
Verdict NonPrivateEquivalence() {
  Verdict v;
  Rng rng(10);
  int agree = 0, rejects = 0;
  for (int t = 0; t < 1000; ++t) {
    const double pi = Uniform(rng, 0.2, 0.8);
    const std::vector<double> p = {pi, 1.0 - pi};
    const std::vector<double> mu = {Uniform(rng, 0.0, 0.15), 0.0};
    const std::vector<double> sd = {2.0, 1.0};
    const MomentVector mv = testing::SimulateMeans(p, mu, sd, std::nullopt, 10000, rng);
    const bool chi = DiffMeansTest(mv, std::nullopt, 0.0, 0.05).reject;
    const bool welch =
        WelchReject(SummaryFromMoments(mv, 0), SummaryFromMoments(mv, 1), 0.0, 0.05);
    agree += chi == welch;
    rejects += welch;
  }
  v.Check(agree >= 990, Fmt("diff-in-means agreement %d/1000 >= 990", agree));

  ExperimentConfig c;
  c.scenario = Scenario::kAnova;
  c.methods = {"chisq_nonprivate", "anova_nonprivate"};
  c.pi = {0.25, 0.25, 0.25, 0.25};
  c.mu = {0.0, 0.0, 0.0, 0.0};
  c.sigma = {1.0, 1.0, 1.0, 1.0};
  c.effect_group = 3;
  c.n = 1000;
  c.trials = 1000;
  c.sweep_variable = "gap";
  c.grid = {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  c.base_seed = 17;
  const SweepResult r = RunPowerSweep(c);
  const double gap = MaxAbsGap(r, c.grid, "chisq_nonprivate", "anova_nonprivate");
  v.Check(gap <= 0.02, Fmt("ANOVA max rejection-fraction gap %.3f <= 0.02", gap));
  v.Note(Fmt("diff-in-means agreement %d/1000 (Welch rejects %d); ANOVA n=1000 max gap "
             "%.3f over %zu means",
             agree, rejects, gap, c.grid.size()));
  return v;
}

// --- 11 --------------------------------------------------------------------
Verdict PairwiseInterval() {
  Verdict v;
  const int g = 10;
  std::vector<double> pi(g, 0.1), mu(g, 1.0), sd(g, 2.0);
  pi[0] = 0.15;
  pi[9] = 0.05;
  mu[9] = 1.5;
  for (double eps : {1.0, 2.0, 3.0}) {
    const MechanismSpec mech = MechanismSpec::SubsetOptimal(g, eps);
    Rng rng(20);
    const MomentVector mv = testing::SimulateMeans(pi, mu, sd, mech, 10000, rng);
    const ConfidenceInterval chi = PairwiseCi(mv, mech, 9, 0, 0.05);
    const ConfidenceInterval t =
        WelchCi(SummaryFromMoments(mv, 9), SummaryFromMoments(mv, 0), 0.05);
    v.Check(chi.lower <= 0.5 && 0.5 <= chi.upper,
            Fmt("eps=%g chi2 CI [%.3f, %.3f] covers 0.5", eps, chi.lower, chi.upper));
    v.Check(0.5 < t.lower || 0.5 > t.upper,
            Fmt("eps=%g classical t CI [%.3f, %.3f] misses 0.5", eps, t.lower, t.upper));
    v.Note(Fmt("%s: chi2 [%.3f, %.3f]%s, t [%.3f, %.3f]", mech.DebugString().c_str(),
               chi.lower, chi.upper,
               chi.lower_clipped || chi.upper_clipped ? " (clipped at search bound)" : "",
               t.lower, t.upper));
  }
  return v;
}

// --- 12 --------------------------------------------------------------------
Verdict AdultExperiments() {
  Verdict v;
  const char* dir = std::getenv("LGDP_ADULT_DIR");
  const std::filesystem::path base = dir ? dir : "";
  if (!dir || !std::filesystem::exists(base / "adult.data") ||
      !std::filesystem::exists(base / "adult.test")) {
    v.status = Status::kSkip;
    v.Note("set LGDP_ADULT_DIR to a directory with adult.data and adult.test");
    return v;
  }
  const AdultData train = LoadAdult((base / "adult.data").string());
  const AdultData test = LoadAdult((base / "adult.test").string());
  const std::vector<double> eps = {0.5, 1.0, 2.0, 3.0};
  const double slack = 2.0 * std::sqrt(0.25 / 200);
  AdultExperimentOptions o;
  o.epsilons = eps;
  o.trials = 200;
  o.seed = 12;
  const nlohmann::json sex = RunAdultExperiment(train, &test, o);
  o.attribute = "race";
  o.mechanism = MechanismKind::kSubset;
  const nlohmann::json race = RunAdultExperiment(train, &test, o);
  auto monotone = [&](const nlohmann::json& rows, const char* key, bool decreasing) {
    std::string series;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double x = rows[i][key].get<double>();
      series += Fmt("%s%.3f", i ? " " : "", x);
      if (i == 0) continue;
      const double prev = rows[i - 1][key].get<double>();
      v.Check(decreasing ? x <= prev + slack : x >= prev - slack,
              Fmt("%s moves toward the non-private conclusion (%.3f -> %.3f)", key, prev, x));
    }
    v.Note(Fmt("%s: %s", key, series.c_str()));
  };
  monotone(sex["rows"], "chisq_miss_rate", true);
  monotone(sex["rows"], "ztest_corrected_miss_rate", true);
  monotone(sex["rows"], "chisq_agreement", false);
  monotone(race["rows"], "chisq_agreement", false);
  v.Note(Fmt("train rows %zu, sex n %zu, race n %zu", train.raw_rows, train.by_sex.size(),
             train.by_race.size()));
  return v;
}

struct Criterion {
  int id;
  const char* name;
  Verdict (*run)();
};

const Criterion kCriteria[] = {
    {1, "privacy bound of all mechanisms", PrivacyBound},
    {2, "channel algebra vs enumeration", ChannelAlgebra},
    {3, "covariance null-space identities", CovarianceLemmas},
    {4, "generalized inverse of shipped covariances", GeneralizedInverse},
    {5, "null calibration of every shipped model", Calibration},
    {6, "large-epsilon reduction to non-private", LargeEpsilon},
    {7, "proportion CI coverage", ProportionCoverage},
    {8, "mechanism power comparison, g=10", MechanismPower},
    {9, "privacy-aware vs naive tests", NaiveComparison},
    {10, "non-private equivalence with classical tests", NonPrivateEquivalence},
    {11, "pairwise-within-g interval", PairwiseInterval},
    {12, "UCI Adult experiments", AdultExperiments},
};

}  // namespace
}  // namespace lgdp

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  int failed = 0;
  for (const lgdp::Criterion& c : lgdp::kCriteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    lgdp::Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.status = lgdp::Status::kFail;
      v.Note(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* tag = v.status == lgdp::Status::kPass   ? "PASS"
                      : v.status == lgdp::Status::kSkip ? "SKIP"
                                                        : "FAIL";
    std::string detail;
    for (const std::string& n : v.notes) detail += (detail.empty() ? "" : "; ") + n;
    std::printf("[%s] criterion %2d: %s (%.1fs): %s\n", tag, c.id, c.name, seconds,
                detail.c_str());
    std::fflush(stdout);
    failed += v.status == lgdp::Status::kFail;
  }
  std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
