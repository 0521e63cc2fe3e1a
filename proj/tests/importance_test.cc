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

#include "fidaudit/importance.h"

#include <cstdio>
#include <random>

#include <gtest/gtest.h>

#include "fidaudit/error.h"
#include "test_util.h"

namespace fidaudit {
namespace {

using testing::Col;
using testing::Iota;
using testing::TempDir;
using testing::WriteText;

Dataset TwoFeatureRows(int n) {
  Eigen::MatrixXd x(n, 2);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i % 2;
    x(i, 1) = 0.1 * i - 1.0;
  }
  return Dataset({Col("s", ColumnKind::kBinary, true),
                  Col("x", ColumnKind::kNumeric, false)},
                 x, Eigen::VectorXd::Zero(n), Iota(n));
}

LogisticModel Model(double w0, double w1, double b) {
  LogisticModel m;
  m.weights = Eigen::Vector2d(w0, w1);
  m.intercept = b;
  return m;
}

TEST(GradSaliencyTest, ZeroModel) {
  const ImportanceMatrix m = GradSaliency(Model(0, 0, 0), TwoFeatureRows(6));
  EXPECT_EQ(m.values, Eigen::MatrixXd::Zero(6, 2));
  EXPECT_EQ(m.notion, ImportanceNotion::kGrad);
}

TEST(GradSaliencyTest, QuarterAtOrigin) {
  const Dataset ds({Col("a", ColumnKind::kNumeric, true),
                    Col("b", ColumnKind::kNumeric, false)},
                   Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Zero(1),
                   Iota(1));
  const ImportanceMatrix m = GradSaliency(Model(1, 0, 0), ds);
  EXPECT_DOUBLE_EQ(m.values(0, 0), 0.25);
  EXPECT_EQ(m.values(0, 1), 0.0);
}

TEST(GradSaliencyTest, ProportionalColumnsAndSign) {
  const Dataset ds = TwoFeatureRows(20);
  const ImportanceMatrix m = GradSaliency(Model(0.7, -1.4, 0.2), ds);
  for (int i = 0; i < ds.rows(); ++i) {
    EXPECT_NEAR(m.values(i, 1), -2.0 * m.values(i, 0), 1e-15);
    EXPECT_GT(m.values(i, 0), 0.0);
    EXPECT_LT(m.values(i, 1), 0.0);
  }
}

TEST(GradSaliencyTest, DimensionMismatch) {
  LogisticModel model;
  model.weights = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(GradSaliency(model, TwoFeatureRows(4)), AuditError);
}

TEST(LoadImportanceTest, ZerosLoad) {
  TempDir dir("imp");
  WriteText(dir.File("m.csv"), "s,x\n0,0\n0,0\n0,0\n");
  const ImportanceMatrix m = LoadImportance(dir.File("m.csv"), TwoFeatureRows(3));
  EXPECT_EQ(m.notion, ImportanceNotion::kExternal);
  const ImportanceStats stats = ComputeImportanceStats(m);
  EXPECT_EQ(stats.mu_abs, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(stats.mean, Eigen::VectorXd::Zero(2));
}

ErrorCode LoadCode(const std::string& text, int rows) {
  TempDir dir("imp");
  WriteText(dir.File("m.csv"), text);
  try {
    LoadImportance(dir.File("m.csv"), TwoFeatureRows(rows));
  } catch (const AuditError& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

TEST(LoadImportanceTest, Errors) {
  EXPECT_EQ(LoadCode("s,x\n0,0\n0,0\n", 3), ErrorCode::kAlignment);
  EXPECT_EQ(LoadCode("x,s\n0,0\n0,0\n", 2), ErrorCode::kAlignment);
  EXPECT_EQ(LoadCode("s,x\n0,nan\n0,0\n", 2), ErrorCode::kNonFinite);
  EXPECT_EQ(LoadCode("s,x\n0,inf\n0,0\n", 2), ErrorCode::kNonFinite);
  EXPECT_EQ(LoadCode("row_id,s,x\n0,1,2\n2,1,2\n", 2), ErrorCode::kAlignment);
}

TEST(LoadImportanceTest, RowIdColumnAccepted) {
  TempDir dir("imp");
  WriteText(dir.File("m.csv"), "row_id,s,x\n0,1,2\n1,3,4\n");
  const ImportanceMatrix m = LoadImportance(dir.File("m.csv"), TwoFeatureRows(2));
  EXPECT_EQ(m.values(1, 0), 3.0);
  EXPECT_EQ(m.values(1, 1), 4.0);
}

// An exporter-style file written by hand: 100 rows, row_id first, values
// printed with 17 significant digits. Column means must survive loading.
TEST(LoadImportanceTest, ExporterFileRoundTrip) {
  TempDir dir("imp");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 0.2);
  std::string text = "row_id,s,x\n";
  double sums[2] = {0.0, 0.0};
  char buf[64];
  for (int i = 0; i < 100; ++i) {
    const double a = normal(rng), b = normal(rng);
    sums[0] += a;
    sums[1] += b;
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", i, a, b);
    text += buf;
  }
  WriteText(dir.File("shap.csv"), text);
  const ImportanceMatrix m =
      LoadImportance(dir.File("shap.csv"), TwoFeatureRows(100));
  const ImportanceStats stats = ComputeImportanceStats(m);
  EXPECT_NEAR(stats.mean[0], sums[0] / 100, 1e-9);
  EXPECT_NEAR(stats.mean[1], sums[1] / 100, 1e-9);
}

TEST(LoadImportanceTest, WriteThenLoad) {
  TempDir dir("imp");
  const Dataset ds = TwoFeatureRows(10);
  const ImportanceMatrix m = GradSaliency(Model(0.3, 0.9, -0.1), ds);
  WriteImportance(dir.File("g.csv"), m);
  EXPECT_EQ(LoadImportance(dir.File("g.csv"), ds).values, m.values);
}

TEST(ImportanceStatsTest, Examples) {
  const ImportanceMatrix a =
      testing::MakeImportance(Eigen::Vector2d(1.0, -1.0), {"f"});
  const ImportanceStats s = ComputeImportanceStats(a);
  EXPECT_EQ(s.mu_abs[0], 1.0);
  EXPECT_EQ(s.mean[0], 0.0);

  Eigen::VectorXd col(4);
  col << 0.09, -0.09, 0.12, -0.06;
  EXPECT_NEAR(
      ComputeImportanceStats(testing::MakeImportance(col, {"f"})).mu_abs[0],
      0.09, 1e-15);
}

TEST(ImportanceStatsTest, ColumnSumIsDatasetImportance) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd v(37, 4);
  for (int i = 0; i < 37; ++i) {
    for (int k = 0; k < 4; ++k) v(i, k) = normal(rng);
  }
  const ImportanceStats s =
      ComputeImportanceStats(testing::MakeImportance(v, {"a", "b", "c", "d"}));
  for (int k = 0; k < 4; ++k) {
    double sum = 0.0, abs = 0.0;
    for (int i = 0; i < 37; ++i) {
      sum += v(i, k);
      abs += std::abs(v(i, k));
    }
    EXPECT_NEAR(s.mean[k] * 37, sum, 1e-12);
    EXPECT_NEAR(s.mu_abs[k], abs / 37, 1e-14);
    EXPECT_GE(s.mu_abs[k], 0.0);
  }
}

}  // namespace
}  // namespace fidaudit
