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

// Command-line front end: audit separable | linear | score.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fidaudit/error.h"
#include "fidaudit/runner.h"

namespace {

using fidaudit::RunManifest;

void AddCommon(CLI::App* cmd, RunManifest* m, std::string* ranges,
               std::string* features, double* split) {
  cmd->add_option("--data", m->data_path, "Input CSV with header")->required();
  cmd->add_option("--schema", m->schema_path, "Column schema JSON")
      ->required();
  cmd->add_option("--importance", m->importance, "grad or file:PATH")
      ->capture_default_str();
  cmd->add_option("--ranges", *ranges,
                  "Size bands, e.g. 0.01-0.05,0.05-0.1 (default: five bands)");
  cmd->add_option("--features", *features,
                  "all, or a comma-separated list of encoded names")
      ->capture_default_str();
  cmd->add_option("--seed", m->seed, "Split, model and init seed")
      ->capture_default_str();
  cmd->add_option("--split", *split,
                  "Train fraction (default 0.8 for n >= 1000, else 0.5)");
  cmd->add_option("--out", m->out_dir, "Output directory")->required();
  cmd->add_option("--jobs", m->jobs, "Worker threads (AUDIT_JOBS overrides)")
      ->capture_default_str();
  cmd->add_flag("--standardize", m->standardize,
                "Z-score numeric columns before encoding");
  cmd->add_option("--epochs", m->logistic.epochs, "Logistic regression epochs")
      ->capture_default_str();
  cmd->add_option("--lr", m->logistic.learning_rate,
                  "Logistic regression learning rate")
      ->capture_default_str();
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature importance disparity audits over rich subgroups"};
  app.require_subcommand(1);

  RunManifest m;
  std::string ranges;
  std::string features = "all";
  double split = 0.0;
  double eta = 0.0;

  CLI::App* sep = app.add_subcommand("separable", "Constrained AVG-FID search");
  AddCommon(sep, &m, &ranges, &features, &split);
  sep->add_option("--eta", eta, "Dual step size (default 1e-5)");
  sep->add_option("--max-iters", m.hyper.max_iters, "Iteration cap")
      ->capture_default_str();
  sep->add_flag("--theoretical-eta", m.hyper.theoretical_eta,
                "Use eta = nu / (2 n^2 B)");

  CLI::App* lin = app.add_subcommand("linear", "LIN-FID search");
  AddCommon(lin, &m, &ranges, &features, &split);
  lin->add_option("--max-iters", m.linfid.max_iters, "ADAM iteration cap")
      ->capture_default_str();
  lin->add_option("--adam-lr", m.linfid.lr, "ADAM learning rate")
      ->capture_default_str();
  lin->add_option("--lambda-size", m.linfid.lambda_size, "Size penalty weight")
      ->capture_default_str();
  lin->add_option("--lambda-coef", m.linfid.lambda_coef,
                  "Coefficient weight")
      ->capture_default_str();
  lin->add_flag("--hard-eval", m.linfid.hard_evaluation,
                "Report LIN-FID of the thresholded group");

  CLI::App* score = app.add_subcommand("score", "Score a supplied subgroup");
  AddCommon(score, &m, &ranges, &features, &split);
  score->add_option("--subgroup", m.subgroup_path, "Subgroup JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fidaudit::kExitValidation;
  }

  try {
    if (!ranges.empty()) m.ranges = fidaudit::ParseAlphaRanges(ranges);
    if (features != "all") m.features = SplitList(features);
    if (split != 0.0) m.split = split;
    if (eta != 0.0) m.hyper.eta = eta;
    fidaudit::RunOutcome out;
    if (*sep) {
      out = fidaudit::RunSeparable(m);
    } else if (*lin) {
      out = fidaudit::RunLinear(m);
    } else {
      out = fidaudit::ScoreSubgroup(m);
    }
    for (const std::string& w : out.warnings) {
      std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    if (out.exit_code == fidaudit::kExitNoneConverged) {
      std::fprintf(stderr, "no feature converged\n");
    }
    return out.exit_code;
  } catch (const fidaudit::AuditError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return fidaudit::kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
