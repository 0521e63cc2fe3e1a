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

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fidaudit/error.h"

namespace fidaudit {
namespace {

std::string FormatThreshold(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", t);
  return buf;
}

}  // namespace

std::vector<MarginalGroup> MarginalCandidates(const Dataset& ds) {
  std::vector<MarginalGroup> out;
  const int k = ds.num_sensitive();
  const Eigen::Index bias = k;
  const Eigen::MatrixXd& s = ds.sensitive_matrix();
  const auto& cols = ds.columns();
  for (int c = 0; c < k; ++c) {
    const EncodedColumn& col = cols[c];
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(k + 1);
    if (col.kind == ColumnKind::kBinary && col.name != col.source) {
      // One-hot level.
      theta[c] = 1.0;
      theta[bias] = -0.5;
      out.push_back({col.name, ThresholdGroup{theta}});
    } else if (col.kind == ColumnKind::kBinary) {
      theta[c] = 1.0;
      theta[bias] = -0.5;
      out.push_back({col.name + "=1", ThresholdGroup{theta}});
      theta[c] = -1.0;
      theta[bias] = 0.5;
      out.push_back({col.name + "=0", ThresholdGroup{theta}});
    } else {
      std::vector<double> v(s.col(c).data(), s.col(c).data() + s.rows());
      std::sort(v.begin(), v.end());
      std::vector<double> cuts;
      for (int q = 1; q <= 9; ++q) {
        const size_t idx = std::min(
            v.size() - 1, static_cast<size_t>(std::floor(q * 0.1 * v.size())));
        if (cuts.empty() || v[idx] != cuts.back()) cuts.push_back(v[idx]);
      }
      for (double t : cuts) {
        theta.setZero();
        theta[c] = 1.0;
        theta[bias] = -t;
        out.push_back({col.name + ">" + FormatThreshold(t),
                       ThresholdGroup{theta}});
      }
    }
  }
  return out;
}

AuditResult MarginalBaseline(const ImportanceMatrix& m, int j,
                             const Dataset& ds, double alpha_lo,
                             double alpha_hi) {
  if (m.rows() != ds.rows()) {
    throw AuditError(ErrorCode::kAlignment,
                     "importance rows do not match dataset rows");
  }
  const Eigen::VectorXd column = m.values.col(j);
  AuditResult r;
  r.feature = j;
  if (j < static_cast<int>(m.feature_names.size())) {
    r.feature_name = m.feature_names[j];
  }
  r.notion = NotionName(m.notion);
  r.alpha_lo = alpha_lo;
  r.alpha_hi = alpha_hi;
  r.group.kind = GroupKind::kHard;
  r.group.sensitive_feature_names = ds.sensitive_names();
  r.degenerate = column.cwiseAbs().maxCoeff() == 0.0;
  double best = -1.0;
  for (const MarginalGroup& cand : MarginalCandidates(ds)) {
    const Eigen::VectorXd w = Membership(cand.group, ds.sensitive_matrix());
    const double size = GroupSize(w);
    if (size < alpha_lo || size > alpha_hi) continue;
    const FidValues v = FidValue(column, w);
    const double avg = v.avg_fid.value_or(0.0);
    if (avg > best) {
      best = avg;
      r.group.theta = cand.group.theta;
      r.fid_train = v.fid;
      r.avg_fid_train = avg;
      r.size_train = size;
      r.group_mean_train = v.group_mean.value_or(v.population_mean);
      r.population_mean_train = v.population_mean;
      r.direction = v.group_mean.value_or(0.0) < v.population_mean
                        ? Direction::kMinimize
                        : Direction::kMaximize;
    }
  }
  r.in_band = best >= 0.0;
  r.converged = r.in_band;
  if (!r.in_band) r.group.theta = Eigen::VectorXd::Zero(ds.num_sensitive() + 1);
  return r;
}

std::vector<AuditResult> MarginalBaseline(
    const ImportanceMatrix& m, int j, const Dataset& ds,
    const std::vector<AlphaRange>& ranges) {
  std::vector<AuditResult> out;
  for (const auto& [lo, hi] : ranges) {
    out.push_back(MarginalBaseline(m, j, ds, lo, hi));
  }
  return out;
}

}  // namespace fidaudit
