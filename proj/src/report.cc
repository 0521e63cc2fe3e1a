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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fidaudit/csv.h"
#include "fidaudit/error.h"

namespace fidaudit {
namespace {

nlohmann::ordered_json Optional(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

double SortKey(const AuditResult& r) {
  if (r.evaluated_on_test) return r.avg_fid_test.value_or(-1.0);
  return r.avg_fid_train;
}

}  // namespace

nlohmann::ordered_json ConfigToJson(const SearchConfig& cfg) {
  nlohmann::ordered_json j;
  j["alpha_lo"] = cfg.alpha_lo;
  j["alpha_hi"] = cfg.alpha_hi;
  j["B"] = cfg.B;
  j["eta"] = cfg.eta;
  j["nu"] = cfg.nu;
  j["max_iters"] = cfg.max_iters;
  j["direction"] = DirectionName(cfg.direction);
  j["check_every"] = cfg.check_every;
  j["literal_dual_response"] = cfg.literal_dual_response;
  j["degenerate"] = cfg.degenerate;
  return j;
}

nlohmann::ordered_json AuditResultToJson(const AuditResult& r) {
  nlohmann::ordered_json j;
  j["feature"] = r.feature;
  j["feature_name"] = r.feature_name;
  j["notion"] = r.notion;
  j["direction"] = DirectionName(r.direction);
  j["alpha_lo"] = r.alpha_lo;
  j["alpha_hi"] = r.alpha_hi;
  j["subgroup"] = SubgroupToJson(r.group);
  j["train"] = {{"fid", r.fid_train},
                {"avg_fid", r.avg_fid_train},
                {"size", r.size_train},
                {"group_mean", r.group_mean_train},
                {"population_mean", r.population_mean_train}};
  if (r.evaluated_on_test) {
    j["test"] = {{"fid", r.fid_test},
                 {"avg_fid", Optional(r.avg_fid_test)},
                 {"size", r.size_test},
                 {"group_mean", Optional(r.group_mean_test)},
                 {"population_mean", r.population_mean_test}};
  } else {
    j["test"] = nullptr;
  }
  j["iterations_used"] = r.iterations_used;
  j["converged"] = r.converged;
  j["gap_certified"] = r.gap_certified;
  j["in_band"] = r.in_band;
  j["degenerate"] = r.degenerate;
  j["final_gap"] = r.final_gap;
  j["expected"] = {{"size", r.expected_size},
                   {"violation",
                    {r.expected_violation[0], r.expected_violation[1]}},
                   {"objective", r.expected_objective},
                   {"fid", r.expected_fid}};
  j["dual"] = {{"theta", {r.dual.theta[0], r.dual.theta[1]}},
               {"lambda", {r.dual.lambda[0], r.dual.lambda[1]}},
               {"avg_lambda",
                {r.dual.iterate_avg_lambda[0], r.dual.iterate_avg_lambda[1]}},
               {"distribution_support",
                r.dual.iterate_avg_groups.members().size()}};
  j["config"] = ConfigToJson(r.config);
  return j;
}

std::vector<std::pair<std::string, double>> TopCoefficients(
    const SubgroupSpec& group, int k) {
  std::vector<std::pair<std::string, double>> out;
  const Eigen::Index d = group.theta.size();
  if (d == 0) return out;
  const double norm = group.theta.norm();
  for (Eigen::Index i = 0; i + 1 < d; ++i) {  // last coordinate is the bias
    const std::string name =
        i < static_cast<Eigen::Index>(group.sensitive_feature_names.size())
            ? group.sensitive_feature_names[i]
            : "s" + std::to_string(i);
    out.emplace_back(name, norm > 0.0 ? group.theta[i] / norm : 0.0);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  if (static_cast<int>(out.size()) > k) out.resize(k);
  return out;
}

std::optional<double> LogRatio(const AuditResult& r) {
  const double ratio = r.group_mean_train / r.population_mean_train;
  if (!std::isfinite(ratio) || !(ratio > 0.0)) return std::nullopt;
  return std::abs(std::log10(ratio));
}

std::string CsvNumber(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", *v);
  return buf;
}

std::string SummaryCsv(std::vector<SummaryRow> rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SummaryRow& a, const SummaryRow& b) {
                     return SortKey(a.result) > SortKey(b.result);
                   });
  std::ostringstream out;
  out << "feature,feature_name,notion,direction,alpha_lo,alpha_hi,"
         "population_mean,group_mean,size_train,size_test,avg_fid_train,"
         "avg_fid_test,fid_train,fid_test,converged,degenerate,iterations,"
         "top_coefficients,pos_rate_delta,tpr_delta,fpr_delta,ece_delta,"
         "log10_ratio\n";
  for (const SummaryRow& row : rows) {
    const AuditResult& r = row.result;
    std::string coefs;
    for (const auto& [name, v] : TopCoefficients(r.group)) {
      if (!coefs.empty()) coefs += ';';
      coefs += name + ':' + CsvNumber(v);
    }
    std::optional<double> pos, tpr, fpr, ece;
    if (row.fairness) {
      pos = row.fairness->pos_rate_delta;
      tpr = row.fairness->tpr_delta;
      fpr = row.fairness->fpr_delta;
      ece = row.fairness->ece_delta;
    }
    out << r.feature << ',' << CsvEscape(r.feature_name) << ',' << r.notion
        << ',' << DirectionName(r.direction) << ',' << CsvNumber(r.alpha_lo)
        << ',' << CsvNumber(r.alpha_hi) << ','
        << CsvNumber(r.population_mean_train) << ','
        << CsvNumber(r.group_mean_train) << ',' << CsvNumber(r.size_train)
        << ','
        << (r.evaluated_on_test ? CsvNumber(r.size_test) : std::string())
        << ',' << CsvNumber(r.avg_fid_train) << ','
        << CsvNumber(r.avg_fid_test) << ',' << CsvNumber(r.fid_train) << ','
        << (r.evaluated_on_test ? CsvNumber(r.fid_test) : std::string())
        << ',' << (r.converged ? 1 : 0) << ',' << (r.degenerate ? 1 : 0) << ','
        << r.iterations_used << ',' << CsvEscape(coefs) << ','
        << CsvNumber(pos) << ',' << CsvNumber(tpr) << ',' << CsvNumber(fpr)
        << ',' << CsvNumber(ece) << ',' << CsvNumber(LogRatio(r)) << '\n';
  }
  return out.str();
}

std::string PlotDataCsv(const std::vector<AuditResult>& results) {
  std::ostringstream out;
  out << "feature_name,alpha_lo,alpha_hi,log10_ratio,avg_fid_train,"
         "avg_fid_test,size_train,converged\n";
  for (const AuditResult& r : results) {
    out << CsvEscape(r.feature_name) << ',' << CsvNumber(r.alpha_lo) << ','
        << CsvNumber(r.alpha_hi) << ',' << CsvNumber(LogRatio(r)) << ','
        << CsvNumber(r.avg_fid_train) << ',' << CsvNumber(r.avg_fid_test)
        << ',' << CsvNumber(r.size_train) << ',' << (r.converged ? 1 : 0)
        << '\n';
  }
  return out.str();
}

void WriteFileAtomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw AuditError(ErrorCode::kIo, "cannot write " + tmp);
    out << contents;
    if (!out) throw AuditError(ErrorCode::kIo, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw AuditError(ErrorCode::kIo,
                     "cannot move " + tmp + " into place: " + ec.message());
  }
}

std::string Slug(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += keep ? c : '_';
  }
  return out.empty() ? "_" : out;
}

}  // namespace fidaudit
