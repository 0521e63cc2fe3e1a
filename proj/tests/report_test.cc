// Copyright 2026 The FID Audit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fidaudit/report.h"

#include <filesystem>

#include <gtest/gtest.h>

#include "fidaudit/csv.h"
#include "fidaudit/error.h"
#include "test_util.h"

namespace fidaudit {
namespace {

AuditResult Result(const std::string& name, double avg_fid, double group_mean,
                   double population_mean) {
  AuditResult r;
  r.feature_name = name;
  r.notion = "GRAD";
  r.avg_fid_train = avg_fid;
  r.group_mean_train = group_mean;
  r.population_mean_train = population_mean;
  r.group.theta = Eigen::Vector3d(3.0, -4.0, 1.0);
  r.group.sensitive_feature_names = {"a", "b", "bias"};
  r.converged = true;
  return r;
}

TEST(ReportTest, TopCoefficientsSkipBiasAndSortByMagnitude) {
  SubgroupSpec g;
  g.theta = Eigen::Vector4d(1.0, -2.0, 2.0, 100.0);
  g.sensitive_feature_names = {"a", "b", "c", "bias"};
  const auto top = TopCoefficients(g, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].first, "b");  // ties keep column order
  EXPECT_EQ(top[1].first, "c");
  EXPECT_NEAR(top[0].second, -2.0 / g.theta.norm(), 1e-15);
}

TEST(ReportTest, LogRatio) {
  EXPECT_NEAR(*LogRatio(Result("x", 0, 0.02, 0.2)), 1.0, 1e-12);
  EXPECT_NEAR(*LogRatio(Result("x", 0, -0.5, -0.05)), 1.0, 1e-12);
  EXPECT_FALSE(LogRatio(Result("x", 0, -0.1, 0.1)).has_value());
  EXPECT_FALSE(LogRatio(Result("x", 0, 0.1, 0.0)).has_value());
}

TEST(ReportTest, CsvNumber) {
  EXPECT_EQ(CsvNumber(0.25), "0.25");
  EXPECT_EQ(CsvNumber(std::nullopt), "");
  EXPECT_EQ(CsvNumber(std::numeric_limits<double>::infinity()), "");
}

TEST(ReportTest, SlugKeepsSafeCharacters) {
  EXPECT_EQ(Slug("race=African-American"), "race_African-American");
  EXPECT_EQ(Slug("a b/c"), "a_b_c");
  EXPECT_EQ(Slug(""), "_");
}

TEST(ReportTest, SummarySortedByAvgFid) {
  std::vector<SummaryRow> rows = {{Result("low", 0.1, 1, 2), std::nullopt},
                                  {Result("high, quoted", 0.9, 1, 2),
                                   std::nullopt},
                                  {Result("mid", 0.5, 1, 2), std::nullopt}};
  const testing::TempDir dir("summary");
  testing::WriteText(dir.File("s.csv"), SummaryCsv(rows));
  const CsvTable t = ReadCsv(dir.File("s.csv"));
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.header.size(), 23u);
  EXPECT_EQ(t.header[1], "feature_name");
  EXPECT_EQ(t.rows[0][1], "high, quoted");
  EXPECT_EQ(t.rows[1][1], "mid");
  EXPECT_EQ(t.rows[2][1], "low");
  EXPECT_EQ(t.rows[0][17], "b:-0.7844645406;a:0.5883484054");
  EXPECT_EQ(t.rows[0][18], "");  // no fairness
}

TEST(ReportTest, PlotDataOneRowPerResult) {
  const std::string csv =
      PlotDataCsv({Result("x", 0.3, 0.02, 0.2), Result("y", 0.1, -1, 1)});
  EXPECT_EQ(csv,
            "feature_name,alpha_lo,alpha_hi,log10_ratio,avg_fid_train,"
            "avg_fid_test,size_train,converged\n"
            "x,0,0,1,0.3,,0,1\n"
            "y,0,0,,0.1,,0,1\n");
}

TEST(ReportTest, ResultJsonFields) {
  AuditResult r = Result("x", 0.3, 0.02, 0.2);
  auto j = AuditResultToJson(r);
  for (const char* key : {"feature", "notion", "direction", "subgroup", "train",
                          "test", "converged", "gap_certified", "in_band",
                          "degenerate", "dual", "config"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["test"].is_null());
  r.evaluated_on_test = true;
  j = AuditResultToJson(r);
  EXPECT_TRUE(j["test"]["avg_fid"].is_null());
  EXPECT_EQ(SubgroupFromJson(nlohmann::json::parse(j["subgroup"].dump())).theta,
            r.group.theta);
}

TEST(ReportTest, AtomicWriteReplaces) {
  const testing::TempDir dir("atomic");
  const std::string path = dir.File("f.txt");
  WriteFileAtomic(path, "one");
  WriteFileAtomic(path, "two");
  EXPECT_EQ(testing::ReadText(path), "two");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  EXPECT_THROW(WriteFileAtomic(dir.File("missing/f.txt"), "x"), AuditError);
}

}  // namespace
}  // namespace fidaudit
