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

#include "fidaudit/marginal.h"

#include <gtest/gtest.h>

#include "fidaudit/brute_force.h"
#include "test_util.h"

namespace fidaudit {
namespace {

using testing::Col;
using testing::Iota;

TEST(MarginalCandidatesTest, OneBinaryColumn) {
  const auto p = testing::MakePlanted(20);
  const auto cands = MarginalCandidates(p.ds);
  ASSERT_EQ(cands.size(), 2u);
  const Eigen::VectorXd a =
      Membership(cands[0].group, p.ds.sensitive_matrix());
  const Eigen::VectorXd b =
      Membership(cands[1].group, p.ds.sensitive_matrix());
  EXPECT_EQ(a + b, Eigen::VectorXd::Ones(20));
}

TEST(MarginalCandidatesTest, OneHotAndNumeric) {
  const int n = 100;
  Eigen::MatrixXd x(n, 4);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i % 3 == 0;
    x(i, 1) = i % 3 == 1;
    x(i, 2) = i % 3 == 2;
    x(i, 3) = i;  // numeric, 100 distinct values
  }
  const Dataset ds({Col("r=a", ColumnKind::kBinary, true, "r"),
                    Col("r=b", ColumnKind::kBinary, true, "r"),
                    Col("r=c", ColumnKind::kBinary, true, "r"),
                    Col("age", ColumnKind::kNumeric, true)},
                   x, Eigen::VectorXd::Zero(n), Iota(n));
  const auto cands = MarginalCandidates(ds);
  ASSERT_EQ(cands.size(), 3u + 9u);
  EXPECT_EQ(Membership(cands[1].group, ds.sensitive_matrix()), x.col(1));
  // Decile cuts x > t give sizes 0.9, 0.8, ..., 0.1.
  for (int q = 1; q <= 9; ++q) {
    const double size =
        GroupSize(Membership(cands[2 + q].group, ds.sensitive_matrix()));
    EXPECT_NEAR(size, 1.0 - 0.1 * q - 0.01, 1e-12);
  }
}

TEST(MarginalBaselineTest, PlantedMatchesBruteForce) {
  const auto p = testing::MakePlanted(500);
  const AuditResult r = MarginalBaseline(p.m, 1, p.ds, 0.15, 0.25);
  SearchConfig cfg;
  cfg.alpha_lo = 0.15;
  cfg.alpha_hi = 0.25;
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.avg_fid_train, BruteForceMaxFid(p.m, 1, cfg, p.ds).avg_fid,
              1e-12);
}

TEST(MarginalBaselineTest, NothingInBand) {
  const auto p = testing::MakePlanted(100);
  const AuditResult r = MarginalBaseline(p.m, 1, p.ds, 0.4, 0.5);
  EXPECT_FALSE(r.in_band);
  EXPECT_FALSE(r.converged);
}

}  // namespace
}  // namespace fidaudit
