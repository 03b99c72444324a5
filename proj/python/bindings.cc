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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lgdp/abtest.h"
#include "lgdp/errors.h"
#include "lgdp/independence.h"
#include "lgdp/io.h"
#include "lgdp/means.h"
#include "lgdp/mechanisms.h"
#include "lgdp/proportions.h"
#include "lgdp/simlab.h"

namespace py = pybind11;

namespace {

using nlohmann::json;

// Results cross the boundary as JSON text; the Python wrapper decodes it.
std::string Result(const lgdp::TestResult& r) { return lgdp::ToJson(r).dump(); }
std::string Interval(const lgdp::ConfidenceInterval& ci) { return lgdp::ToJson(ci).dump(); }

lgdp::MechanismSpec MakeMechanism(const std::string& name, int groups, double epsilon,
                                  std::optional<int> k) {
  switch (lgdp::ParseMechanismKind(name)) {
    case lgdp::MechanismKind::kRandResponse:
      return lgdp::MechanismSpec::RandResponse(groups, epsilon);
    case lgdp::MechanismKind::kBitFlip:
      return lgdp::MechanismSpec::BitFlip(groups, epsilon);
    case lgdp::MechanismKind::kSubset:
      break;
  }
  return k ? lgdp::MechanismSpec::Subset(groups, epsilon, *k)
           : lgdp::MechanismSpec::SubsetOptimal(groups, epsilon);
}

std::vector<std::uint64_t> Privatize(const lgdp::MechanismSpec& mech,
                                     const std::vector<int>& groups, std::uint64_t seed) {
  const lgdp::LabelSampler sampler(mech);
  lgdp::Rng rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(groups.size());
  for (int j : groups) out.push_back(sampler.DrawMask(j, rng));
  return out;
}

std::vector<lgdp::ABSample> AbSamples(const std::vector<bool>& treated,
                                      const std::vector<int>& labels,
                                      const std::vector<double>& outcomes) {
  if (treated.size() != labels.size() || labels.size() != outcomes.size()) {
    throw lgdp::Error(lgdp::ErrorCode::kDimensionMismatch, "input lengths differ");
  }
  std::vector<lgdp::ABSample> s(labels.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = {treated[i], labels[i], outcomes[i]};
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hypothesis tests with locally privatized group labels";
  m.attr("__version__") = "0.1.0";

  static py::exception<lgdp::Error> error(m, "LgdpError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const lgdp::Error& e) {
      py::set_error(error, (std::string(lgdp::CodeName(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<lgdp::MechanismSpec>(m, "Mechanism")
      .def_property_readonly("kind", [](const lgdp::MechanismSpec& s) {
        return std::string(lgdp::MechanismName(s.kind()));
      })
      .def_property_readonly("groups", &lgdp::MechanismSpec::groups)
      .def_property_readonly("epsilon", &lgdp::MechanismSpec::epsilon)
      .def_property_readonly("subset_size", &lgdp::MechanismSpec::subset_size)
      .def("__repr__", &lgdp::MechanismSpec::DebugString);

  m.def("mechanism", &MakeMechanism, py::arg("kind"), py::arg("groups"),
        py::arg("epsilon"), py::arg("k") = std::nullopt);
  m.def("optimal_subset_k", &lgdp::OptimalSubsetK, py::arg("groups"), py::arg("epsilon"));
  m.def("verify_ldp", &lgdp::VerifyLdp, py::arg("mechanism"));
  m.def("marginal_probabilities", &lgdp::MarginalProbabilities, py::arg("mechanism"),
        py::arg("group"));
  m.def("privatize", &Privatize, py::arg("mechanism"), py::arg("groups"), py::arg("seed"),
        "Privatized label bit masks for 0-based true groups.");

  m.def(
      "prop_test",
      [](double s1, double s2, double f1, double f2, std::optional<double> epsilon,
         double delta, double alpha) {
        return Result(lgdp::PropTest(lgdp::PropCounts::FromCells(s1, s2, f1, f2), epsilon,
                                     delta, alpha));
      },
      py::arg("s1"), py::arg("s2"), py::arg("f1"), py::arg("f2"),
      py::arg("epsilon") = std::nullopt, py::arg("delta") = 0.0, py::arg("alpha") = 0.05);
  m.def(
      "prop_ci",
      [](double s1, double s2, double f1, double f2, std::optional<double> epsilon,
         double alpha) {
        return Interval(
            lgdp::PropChiSquareCi(lgdp::PropCounts::FromCells(s1, s2, f1, f2), epsilon, alpha));
      },
      py::arg("s1"), py::arg("s2"), py::arg("f1"), py::arg("f2"),
      py::arg("epsilon") = std::nullopt, py::arg("alpha") = 0.05);

  m.def(
      "independence_test",
      [](const std::vector<std::uint64_t>& masks, const std::vector<int>& outcomes, int groups,
         std::optional<lgdp::MechanismSpec> mech, double alpha) {
        return Result(
            lgdp::IndepTest(lgdp::TabulateIndependence(masks, outcomes, groups), mech, alpha));
      },
      py::arg("masks"), py::arg("outcomes"), py::arg("groups"),
      py::arg("mechanism") = std::nullopt, py::arg("alpha") = 0.05);

  m.def(
      "diff_means_test",
      [](const std::vector<std::uint64_t>& masks, const std::vector<double>& outcomes,
         std::optional<double> epsilon, double delta, double alpha) {
        return Result(lgdp::DiffMeansTest(lgdp::BuildMoments(masks, outcomes, 2), epsilon,
                                          delta, alpha));
      },
      py::arg("masks"), py::arg("outcomes"), py::arg("epsilon") = std::nullopt,
      py::arg("delta") = 0.0, py::arg("alpha") = 0.05);
  m.def(
      "diff_means_ci",
      [](const std::vector<std::uint64_t>& masks, const std::vector<double>& outcomes,
         std::optional<double> epsilon, double alpha) {
        return Interval(
            lgdp::DiffMeansCi(lgdp::BuildMoments(masks, outcomes, 2), epsilon, alpha));
      },
      py::arg("masks"), py::arg("outcomes"), py::arg("epsilon") = std::nullopt,
      py::arg("alpha") = 0.05);
  m.def(
      "anova_test",
      [](const std::vector<std::uint64_t>& masks, const std::vector<double>& outcomes,
         int groups, std::optional<lgdp::MechanismSpec> mech, double alpha) {
        return Result(
            lgdp::AnovaTest(lgdp::BuildMoments(masks, outcomes, groups), mech, alpha));
      },
      py::arg("masks"), py::arg("outcomes"), py::arg("groups"),
      py::arg("mechanism") = std::nullopt, py::arg("alpha") = 0.05);
  m.def(
      "pairwise_test",
      [](const std::vector<std::uint64_t>& masks, const std::vector<double>& outcomes,
         int groups, int j, int l, std::optional<lgdp::MechanismSpec> mech, double delta,
         double alpha) {
        return Result(lgdp::PairwiseWithinG(lgdp::BuildMoments(masks, outcomes, groups), mech,
                                            j, l, delta, alpha));
      },
      py::arg("masks"), py::arg("outcomes"), py::arg("groups"), py::arg("j"), py::arg("l"),
      py::arg("mechanism") = std::nullopt, py::arg("delta") = 0.0, py::arg("alpha") = 0.05);
  m.def(
      "pairwise_ci",
      [](const std::vector<std::uint64_t>& masks, const std::vector<double>& outcomes,
         int groups, int j, int l, std::optional<lgdp::MechanismSpec> mech, double alpha) {
        return Interval(
            lgdp::PairwiseCi(lgdp::BuildMoments(masks, outcomes, groups), mech, j, l, alpha));
      },
      py::arg("masks"), py::arg("outcomes"), py::arg("groups"), py::arg("j"), py::arg("l"),
      py::arg("mechanism") = std::nullopt, py::arg("alpha") = 0.05);

  m.def(
      "ab_test",
      [](const std::vector<bool>& treated, const std::vector<int>& labels,
         const std::vector<double>& outcomes, double lambda, std::optional<double> epsilon,
         double delta, double alpha) {
        return Result(
            lgdp::AbTest(AbSamples(treated, labels, outcomes), lambda, epsilon, delta, alpha));
      },
      py::arg("treated"), py::arg("labels"), py::arg("outcomes"), py::arg("lambda_"),
      py::arg("epsilon") = std::nullopt, py::arg("delta") = 0.0, py::arg("alpha") = 0.05);
  m.def(
      "ab_ci",
      [](const std::vector<bool>& treated, const std::vector<int>& labels,
         const std::vector<double>& outcomes, double lambda, std::optional<double> epsilon,
         double alpha) {
        return Interval(lgdp::AbCi(AbSamples(treated, labels, outcomes), lambda, epsilon, alpha));
      },
      py::arg("treated"), py::arg("labels"), py::arg("outcomes"), py::arg("lambda_"),
      py::arg("epsilon") = std::nullopt, py::arg("alpha") = 0.05);

  m.def(
      "run_sweep",
      [](const std::string& config_json) {
        std::string kind;
        const lgdp::ExperimentConfig c =
            lgdp::ParseExperimentConfig(json::parse(config_json), &kind);
        py::gil_scoped_release release;
        if (kind == "calibration") return lgdp::ToJson(lgdp::RunNullCalibration(c)).dump();
        const lgdp::SweepResult r =
            kind == "coverage" ? lgdp::RunCoverageSweep(c) : lgdp::RunPowerSweep(c);
        return lgdp::ToJson(r).dump();
      },
      py::arg("config_json"));
}
