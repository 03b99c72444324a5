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

#include "lgdp/io.h"

#include <bit>
#include <functional>
#include <fstream>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "lgdp/errors.h"

namespace lgdp {
namespace {

std::string TempPath(const std::string& name) {
  return ::testing::TempDir() + "lgdp_io_" + name;
}

std::string WriteFile(const std::string& name, const std::string& text) {
  const std::string path = TempPath(name);
  std::ofstream(path) << text;
  return path;
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(LabeledCsvTest, RoundTrip) {
  LabeledDataset d;
  d.groups = 3;
  d.ids = {"a", "b,c", "d\"e"};
  d.masks = {0b001, 0b110, 0b000};
  d.outcomes = {0.1, -2.5, 1e-17};
  d.treated = {1, 0, 1};
  const std::string path = TempPath("round.csv");
  WriteLabeledCsv(path, d);
  const LabeledDataset back = ReadLabeledCsv(path);
  EXPECT_EQ(back.groups, 3);
  EXPECT_EQ(back.ids, d.ids);
  EXPECT_EQ(back.masks, d.masks);
  EXPECT_EQ(back.outcomes, d.outcomes);
  EXPECT_EQ(back.treated, d.treated);
  EXPECT_EQ(FormatLabeledCsv(back), FormatLabeledCsv(d));
}

TEST(LabeledCsvTest, GroupIndexColumn) {
  const std::string path =
      WriteFile("index.csv", "id,group,outcome\n1,1,0\n\n2,2,1\n3,2,1\n");
  const LabeledDataset d = ReadLabeledCsv(path);
  EXPECT_EQ(d.groups, 2);
  EXPECT_EQ(d.masks, (std::vector<std::uint64_t>{1, 2, 2}));
  EXPECT_TRUE(d.treated.empty());
  EXPECT_EQ(ReadLabeledCsv(path, 4).groups, 4);
  EXPECT_EQ(CodeOf([&] { ReadLabeledCsv(WriteFile("g3.csv", "id,group\n1,3\n2,1\n"), 2); }),
            ErrorCode::kMalformedCsv);
}

TEST(LabeledCsvTest, SchemaErrors) {
  EXPECT_EQ(CodeOf([] { ReadLabeledCsv(TempPath("missing.csv")); }),
            ErrorCode::kFileNotFound);
  EXPECT_EQ(CodeOf([] { ReadLabeledCsv(WriteFile("noid.csv", "grp_1,grp_2\n1,0\n")); }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(CodeOf([] { ReadLabeledCsv(WriteFile("ragged.csv", "id,grp_1,grp_2\n1,0\n")); }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(CodeOf([] { ReadLabeledCsv(WriteFile("bit.csv", "id,grp_1,grp_2\n1,2,0\n")); }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(CodeOf([] {
              ReadLabeledCsv(WriteFile("out.csv", "id,group,outcome\n1,1,abc\n"));
            }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(CodeOf([] { ReadLabeledCsv(WriteFile("one.csv", "id,grp_1\n1,1\n")); }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(CodeOf([] { ReadLabeledCsv(WriteFile("empty.csv", "")); }),
            ErrorCode::kMalformedCsv);
  EXPECT_EQ(CodeOf([] {
              ReadLabeledCsv(WriteFile("cols.csv", "id,grp_1,grp_2\n1,1,0\n"), 3);
            }),
            ErrorCode::kDimensionMismatch);
}

TEST(JoinTest, MatchesById) {
  const LabeledDataset labels =
      ReadLabeledCsv(WriteFile("jl.csv", "id,group\nx,1\ny,2\nz,1\n"));
  const LabeledDataset outcomes =
      ReadOutcomeCsv(WriteFile("jo.csv", "id,outcome,treated\nz,3,1\nx,1,0\ny,2,1\n"));
  const LabeledDataset joined = JoinOnId(labels, outcomes);
  EXPECT_EQ(joined.outcomes, (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(joined.treated, (std::vector<char>{0, 1, 1}));
  EXPECT_EQ(joined.masks, labels.masks);

  const LabeledDataset short_outcomes =
      ReadOutcomeCsv(WriteFile("js.csv", "id,outcome\nx,1\ny,2\n"));
  EXPECT_EQ(CodeOf([&] { JoinOnId(labels, short_outcomes); }), ErrorCode::kJoinMismatch);
  const LabeledDataset other =
      ReadOutcomeCsv(WriteFile("jw.csv", "id,outcome\nx,1\ny,2\nw,3\n"));
  EXPECT_EQ(CodeOf([&] { JoinOnId(labels, other); }), ErrorCode::kJoinMismatch);
  const LabeledDataset dup =
      ReadOutcomeCsv(WriteFile("jd.csv", "id,outcome\nx,1\nx,2\nz,3\n"));
  EXPECT_EQ(CodeOf([&] { JoinOnId(labels, dup); }), ErrorCode::kJoinMismatch);
  EXPECT_EQ(CodeOf([] { ReadOutcomeCsv(WriteFile("jn.csv", "id,value\nx,1\n")); }),
            ErrorCode::kMalformedCsv);
}

LabeledDataset Synthetic(int groups, std::size_t n, bool binary, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> group(0, groups - 1);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  LabeledDataset d;
  d.groups = groups;
  for (std::size_t i = 0; i < n; ++i) {
    const int j = group(rng);
    d.ids.push_back(std::to_string(i));
    d.masks.push_back(1ULL << j);
    d.outcomes.push_back(binary ? static_cast<double>(coin(rng)) : normal(rng) + j);
    d.treated.push_back(coin(rng));
  }
  return d;
}

TEST(PrivatizeDatasetTest, DeterministicAndShaped) {
  const LabeledDataset d = Synthetic(5, 500, true, 1);
  const MechanismSpec subset = MechanismSpec::Subset(5, 1.0, 2);
  const LabeledDataset a = PrivatizeDataset(d, subset, 9);
  EXPECT_EQ(a.masks, PrivatizeDataset(d, subset, 9).masks);
  EXPECT_NE(a.masks, PrivatizeDataset(d, subset, 10).masks);
  for (std::uint64_t m : a.masks) EXPECT_EQ(std::popcount(m), 2);
  EXPECT_EQ(a.outcomes, d.outcomes);
  EXPECT_EQ(a.ids, d.ids);
  EXPECT_EQ(CodeOf([&] { PrivatizeDataset(d, MechanismSpec::RandResponse(4, 1.0), 1); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(CodeOf([&] { PrivatizeDataset(a, subset, 1); }), ErrorCode::kInvalidArgument);
}

TEST(AnalyzeDatasetTest, ScenariosAndErrors) {
  const LabeledDataset bin = Synthetic(2, 2000, true, 2);
  AnalysisOptions o;
  o.scenario = Scenario::kProportions;
  o.with_ci = true;
  nlohmann::json r = AnalyzeDataset(bin, o);
  EXPECT_EQ(r["schema"], kSchemaVersion);
  EXPECT_EQ(r["mechanism"], "none");
  EXPECT_EQ(r["dof"], 1);
  EXPECT_LE(r["ci"]["lower"].get<double>(), r["ci"]["upper"].get<double>());
  EXPECT_TRUE(r.contains("estimates"));

  const LabeledDataset cont = Synthetic(3, 3000, false, 3);
  o.scenario = Scenario::kAnova;
  o.with_ci = false;
  o.mechanism = MechanismSpec::BitFlip(3, 2.0);
  r = AnalyzeDataset(PrivatizeDataset(cont, *o.mechanism, 4), o);
  EXPECT_TRUE(r["reject"].get<bool>());
  o.scenario = Scenario::kPairwise;
  o.with_ci = true;
  o.pair_j = 2;
  o.pair_l = 0;
  o.mechanism = MechanismSpec::RandResponse(3, 2.0);
  r = AnalyzeDataset(PrivatizeDataset(cont, *o.mechanism, 5), o);
  EXPECT_EQ(r["pair"], (std::vector<int>{3, 1}));
  EXPECT_LT(r["ci"]["lower"].get<double>(), 2.0);
  EXPECT_GT(r["ci"]["upper"].get<double>(), 2.0);

  o.scenario = Scenario::kAbTest;
  o.mechanism.reset();
  o.with_ci = false;
  r = AnalyzeDataset(Synthetic(2, 2000, false, 6), o);
  EXPECT_EQ(r["lambda"], 0.5);

  o.scenario = Scenario::kIndependence;
  o.with_ci = true;
  EXPECT_EQ(CodeOf([&] { AnalyzeDataset(bin, o); }), ErrorCode::kScenarioMismatch);
  o.scenario = Scenario::kProportions;
  o.with_ci = false;
  EXPECT_EQ(CodeOf([&] { AnalyzeDataset(cont, o); }), ErrorCode::kScenarioMismatch);
  EXPECT_EQ(CodeOf([&] { AnalyzeDataset(Synthetic(2, 100, false, 7), o); }),
            ErrorCode::kScenarioMismatch);
  o.mechanism = MechanismSpec::RandResponse(3, 1.0);
  EXPECT_EQ(CodeOf([&] { AnalyzeDataset(bin, o); }), ErrorCode::kDimensionMismatch);
  LabeledDataset no_treated = Synthetic(2, 100, false, 8);
  no_treated.treated.clear();
  o.scenario = Scenario::kAbTest;
  o.mechanism.reset();
  EXPECT_EQ(CodeOf([&] { AnalyzeDataset(no_treated, o); }), ErrorCode::kScenarioMismatch);
}

TEST(ConfigTest, ParseAndReject) {
  const nlohmann::json j = {
      {"schema", kSchemaVersion},
      {"kind", "coverage"},
      {"scenario", "pairwise"},
      {"methods", {"chisq:subset", "ttest_naive:subset"}},
      {"pi", {0.2, 0.3, 0.5}},
      {"mu", {0, 0, 0}},
      {"sigma", {1, 1, 1}},
      {"pair", {3, 1}},
      {"effect_group", 2},
      {"sweep", {{"variable", "gap"}, {"grid", {0.0, 0.5}}}},
      {"trials", 10},
      {"base_seed", 42}};
  std::string kind;
  const ExperimentConfig c = ParseExperimentConfig(j, &kind);
  EXPECT_EQ(kind, "coverage");
  EXPECT_EQ(c.scenario, Scenario::kPairwise);
  EXPECT_EQ(c.pair_j, 2);
  EXPECT_EQ(c.pair_l, 0);
  EXPECT_EQ(c.effect_group, 1);
  EXPECT_EQ(c.grid, (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(c.base_seed, 42u);

  auto schema_error = [](nlohmann::json bad) {
    EXPECT_EQ(CodeOf([&] { ParseExperimentConfig(bad); }), ErrorCode::kSchemaError)
        << bad.dump();
  };
  nlohmann::json bad = j;
  bad.erase("schema");
  schema_error(bad);
  bad = j;
  bad["colour"] = "red";
  schema_error(bad);
  bad = j;
  bad["kind"] = "speed";
  schema_error(bad);
  bad = j;
  bad["pi"] = "uniform";
  schema_error(bad);
  bad = j;
  bad["sweep"] = {{"variable", "gap"}};
  schema_error(bad);
  bad = j;
  bad["pair"] = {1, 1};
  schema_error(bad);
  schema_error(nlohmann::json::array());

  const std::string path = WriteFile("cfg.json", j.dump());
  EXPECT_EQ(LoadExperimentConfig(path).pair_l, 0);
  EXPECT_EQ(CodeOf([] { LoadExperimentConfig(WriteFile("bad.json", "{not json")); }),
            ErrorCode::kSchemaError);
}

TEST(SerializationTest, SweepJsonAndCsv) {
  SweepResult r;
  r.kind = "power";
  r.sweep_variable = "gap";
  r.cells.push_back({0.1, "chisq:rr", 10, 3, 1, 0.3, 0.145});
  const nlohmann::json j = ToJson(r);
  EXPECT_EQ(j["cells"][0]["method"], "chisq:rr");
  EXPECT_EQ(j["cells"][0]["failures"], 1);
  EXPECT_EQ(SweepCsv(r),
            "gap,method,trials,count,failures,fraction,standard_error\n"
            "0.1,chisq:rr,10,3,1,0.3,0.145\n");
  CalibrationResult c;
  c.method = "chisq";
  c.dof = 1;
  c.statistics = {1.0, 3.0};
  const nlohmann::json cj = ToJson(std::vector<CalibrationResult>{c});
  EXPECT_EQ(cj["methods"][0]["mean_statistic"], 2.0);
  EXPECT_EQ(cj["kind"], "calibration");
}

std::string AdultRow(const std::string& race, const std::string& sex,
                     const std::string& income) {
  return "39, State-gov, 77516, Bachelors, 13, Never-married, Adm-clerical, "
         "Not-in-family, " + race + ", " + sex + ", 2174, 0, 40, United-States, " +
         income + "\n";
}

TEST(AdultTest, LoaderAndExperiment) {
  std::mt19937_64 rng(12);
  std::string text = "|1x3 Cross validator\n";
  const char* races[] = {"White", "Black", "Asian-Pac-Islander", "Amer-Indian-Eskimo",
                         "Other"};
  std::size_t kept = 0;
  for (int i = 0; i < 3000; ++i) {
    const bool male = rng() % 3 != 0;
    const bool rich = rng() % 100 < (male ? 30u : 11u);
    text += AdultRow(races[rng() % 5], male ? "Male" : "Female",
                     rich ? ">50K." : "<=50K.");
    ++kept;
  }
  text += AdultRow("?", "Male", ">50K");
  text += "\n";
  const std::string path = WriteFile("adult.test", text);
  const AdultData data = LoadAdult(path);
  EXPECT_EQ(data.raw_rows, kept + 1);
  EXPECT_EQ(data.unparseable, 0u);
  EXPECT_EQ(data.by_sex.size(), kept);
  EXPECT_EQ(data.by_race.groups, 5);
  EXPECT_EQ(data.by_race.masks.size(), kept);

  AdultExperimentOptions o;
  o.trials = 20;
  o.epsilons = {0.5, 3.0};
  const nlohmann::json sex = RunAdultExperiment(data, nullptr, o);
  ASSERT_EQ(sex["rows"].size(), 2u);
  EXPECT_TRUE(sex["nonprivate"]["reject"].get<bool>());
  EXPECT_GE(sex["rows"][1]["chisq_agreement"].get<double>(),
            sex["rows"][0]["chisq_agreement"].get<double>());
  o.attribute = "race";
  o.mechanism = MechanismKind::kSubset;
  const nlohmann::json race = RunAdultExperiment(data, &data, o);
  EXPECT_EQ(race["rows"].size(), 2u);
  o.attribute = "age";
  EXPECT_EQ(CodeOf([&] { RunAdultExperiment(data, nullptr, o); }),
            ErrorCode::kInvalidArgument);

  std::string broken = text;
  for (int i = 0; i < 100; ++i) broken += "1, 2, 3\n";
  EXPECT_EQ(CodeOf([&] { LoadAdult(WriteFile("adult.bad", broken)); }),
            ErrorCode::kMalformedCsv);
}

}  // namespace
}  // namespace lgdp
