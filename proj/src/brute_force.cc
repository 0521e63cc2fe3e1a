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

#include "fidaudit/brute_force.h"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "fidaudit/error.h"
#include "fidaudit/subgroup.h"

namespace fidaudit {
namespace {

constexpr double kPivotTol = 1e-9;

// Dense tableau simplex, phase one only. Rows are equality constraints
// a x = b with b >= 0 and x >= 0; returns whether the system is feasible.
// Bland's rule keeps it from cycling.
bool PhaseOneFeasible(Eigen::MatrixXd a, Eigen::VectorXd b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index nv = a.cols();
  // Columns: structural, then one artificial per row, then the rhs.
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, nv + m + 1);
  tab.topLeftCorner(m, nv) = a;
  tab.block(0, nv, m, m).setIdentity();
  tab.col(nv + m).head(m) = b;
  std::vector<Eigen::Index> basis(m);
  for (Eigen::Index i = 0; i < m; ++i) basis[i] = nv + i;
  // Objective row holds reduced costs of minimizing the artificial sum.
  for (Eigen::Index i = 0; i < m; ++i) tab.row(m) -= tab.row(i);
  tab.block(m, nv, 1, m).setZero();

  for (int iter = 0; iter < 10000; ++iter) {
    Eigen::Index enter = -1;
    for (Eigen::Index c = 0; c < nv + m; ++c) {
      if (tab(m, c) < -kPivotTol) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (tab(i, enter) > kPivotTol) {
        const double ratio = tab(i, nv + m) / tab(i, enter);
        if (ratio < best - kPivotTol ||
            (ratio <= best + kPivotTol && leave >= 0 &&
             basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) break;  // unbounded phase one cannot happen; be safe
    tab.row(leave) /= tab(leave, enter);
    for (Eigen::Index i = 0; i <= m; ++i) {
      if (i != leave && tab(i, enter) != 0.0) {
        tab.row(i) -= tab(i, enter) * tab.row(leave);
      }
    }
    basis[leave] = enter;
  }
  return -tab(m, nv + m) <= 1e-7;
}

}  // namespace

ProfileTable DistinctProfiles(const Eigen::MatrixXd& sensitive) {
  ProfileTable out;
  std::map<std::vector<double>, int> index;
  std::vector<std::vector<double>> rows;
  out.row_profile.reserve(sensitive.rows());
  for (Eigen::Index i = 0; i < sensitive.rows(); ++i) {
    std::vector<double> key(sensitive.cols());
    for (Eigen::Index k = 0; k < sensitive.cols(); ++k) key[k] = sensitive(i, k);
    auto [it, inserted] = index.emplace(key, static_cast<int>(rows.size()));
    if (inserted) rows.push_back(key);
    out.row_profile.push_back(it->second);
  }
  out.profiles.resize(static_cast<Eigen::Index>(rows.size()),
                      sensitive.cols());
  for (size_t p = 0; p < rows.size(); ++p) {
    for (Eigen::Index k = 0; k < sensitive.cols(); ++k) {
      out.profiles(static_cast<Eigen::Index>(p), k) = rows[p][k];
    }
  }
  return out;
}

bool ThresholdRealizable(const Eigen::MatrixXd& points,
                         const std::vector<bool>& member) {
  const Eigen::Index p = points.rows();
  const Eigen::Index d = points.cols();
  if (static_cast<Eigen::Index>(member.size()) != p) {
    throw AuditError(ErrorCode::kDimensionMismatch,
                     "labeling and point count differ");
  }
  bool any = false;
  for (bool b : member) any = any || b;
  if (!any) return true;  // theta = 0
  // Variables: u (d), v (d), one slack or surplus per row; theta = u - v.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, 2 * d + p);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    a.block(i, 0, 1, d) = points.row(i);
    a.block(i, d, 1, d) = -points.row(i);
    if (member[i]) {
      a(i, 2 * d + i) = -1.0;  // theta.x - s = 1
      b[i] = 1.0;
    } else {
      a(i, 2 * d + i) = 1.0;  // theta.x + s = 0
    }
  }
  return PhaseOneFeasible(a, b);
}

BruteForceResult BruteForceMaxFid(const ImportanceMatrix& m, int j,
                                  const SearchConfig& cfg, const Dataset& ds) {
  if (m.rows() != ds.rows()) {
    throw AuditError(ErrorCode::kAlignment,
                     "importance rows do not match dataset rows");
  }
  const ProfileTable table = DistinctProfiles(ds.sensitive_matrix());
  const int np = static_cast<int>(table.profiles.rows());
  if (np > kMaxBruteForceProfiles) {
    throw AuditError(ErrorCode::kTooManyProfiles,
                     std::to_string(np) + " distinct sensitive profiles; at most " +
                         std::to_string(kMaxBruteForceProfiles) + " supported");
  }
  const int n = ds.rows();
  const Eigen::VectorXd column = m.values.col(j);
  std::vector<double> profile_sum(np, 0.0);
  std::vector<int> profile_count(np, 0);
  for (int i = 0; i < n; ++i) {
    profile_sum[table.row_profile[i]] += column[i];
    profile_count[table.row_profile[i]] += 1;
  }
  const double total = column.sum();

  BruteForceResult out;
  double best_avg = -1.0;
  unsigned long best_mask = 0;
  bool have_sum = false;
  std::vector<bool> member(np);
  for (unsigned long mask = 0; mask < (1ul << np); ++mask) {
    int count = 0;
    double sum = 0.0;
    for (int p = 0; p < np; ++p) {
      member[p] = (mask >> p) & 1ul;
      if (member[p]) {
        count += profile_count[p];
        sum += profile_sum[p];
      }
    }
    if (!ThresholdRealizable(table.profiles, member)) continue;
    ++out.realizable_labelings;
    const double size = static_cast<double>(count) / n;
    if (size < cfg.alpha_lo || size > cfg.alpha_hi) continue;
    ++out.feasible_labelings;
    if (!have_sum) {
      out.min_sum = out.max_sum = sum;
      have_sum = true;
    } else {
      out.min_sum = std::min(out.min_sum, sum);
      out.max_sum = std::max(out.max_sum, sum);
    }
    out.fid = std::max(out.fid, std::abs(sum - total));
    const double avg =
        count > 0 ? std::abs(sum / count - total / n) : 0.0;
    if (avg > best_avg) {
      best_avg = avg;
      best_mask = mask;
    }
  }
  if (out.feasible_labelings == 0) return out;
  out.best_profiles.assign(np, false);
  for (int p = 0; p < np; ++p) out.best_profiles[p] = (best_mask >> p) & 1ul;
  out.best_membership = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (out.best_profiles[table.row_profile[i]]) out.best_membership[i] = 1.0;
  }
  out.avg_fid = FidValue(column, out.best_membership).avg_fid.value_or(0.0);
  return out;
}

}  // namespace fidaudit
