#!/usr/bin/env python3
# Copyright 2026 The FID Audit Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Builds the audit-ready COMPAS table from the public ProPublica export.

Applies the standard ProPublica row filters (screening within 30 days of
arrest, known recidivism outcome, no ordinary traffic offenses, valid score),
keeps the continuous criminal-history counts, and expands every charge
description occurring at least 10 times into a binary column. The result has
6172 rows and 95 features, 8 of them sensitive (age, male, 6 race levels).

Usage:
  prepare_compas.py [--raw data/compas/compas-scores-two-years.csv]
                    [--out-dir data/compas]
"""

import argparse
import csv
import collections
import json
import os
import re

MIN_CHARGE_COUNT = 10
COUNT_COLUMNS = ["juv_fel_count", "juv_misd_count", "juv_other_count",
                 "priors_count"]


def keep_row(row):
  try:
    days = int(row["days_b_screening_arrest"])
  except ValueError:
    return False
  return (-30 <= days <= 30 and row["is_recid"] != "-1" and
          row["c_charge_degree"] != "O" and row["score_text"] != "N/A")


def charge_column(desc):
  slug = re.sub(r"[^0-9a-zA-Z]+", "_", desc.strip().lower()).strip("_")
  return "charge_" + slug


def main():
  here = os.path.dirname(os.path.abspath(__file__))
  default_dir = os.path.join(here, "..", "data", "compas")
  parser = argparse.ArgumentParser()
  parser.add_argument("--raw", default=os.path.join(
      default_dir, "compas-scores-two-years.csv"))
  parser.add_argument("--out-dir", default=default_dir)
  args = parser.parse_args()

  with open(args.raw, newline="", encoding="utf-8") as f:
    rows = [r for r in csv.DictReader(f) if keep_row(r)]

  counts = collections.Counter(r["c_charge_desc"] for r in rows)
  charges = sorted(d for d, c in counts.items() if c >= MIN_CHARGE_COUNT)
  # The raw export spells a few descriptions with differing case; those stay
  # separate columns and later spellings get a numeric suffix.
  charge_names = []
  for d in charges:
    name = base = charge_column(d)
    k = 2
    while name in charge_names:
      name = f"{base}_{k}"
      k += 1
    charge_names.append(name)

  header = (["age", "male", "race"] + COUNT_COLUMNS + ["felony"] +
            charge_names + ["two_year_recid", "decile_score"])
  out_csv = os.path.join(args.out_dir, "compas.csv")
  with open(out_csv, "w", newline="", encoding="utf-8") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(header)
    for r in rows:
      rec = [r["age"], "1" if r["sex"] == "Male" else "0", r["race"]]
      rec += [r[c] for c in COUNT_COLUMNS]
      rec.append("1" if r["c_charge_degree"] == "F" else "0")
      rec += ["1" if r["c_charge_desc"] == d else "0" for d in charges]
      rec += [r["two_year_recid"], r["decile_score"]]
      w.writerow(rec)

  def schema(target):
    cols = [
        {"name": "age", "kind": "numeric", "sensitive": True},
        {"name": "male", "kind": "binary", "sensitive": True},
        {"name": "race", "kind": "categorical", "sensitive": True},
    ]
    cols += [{"name": c, "kind": "numeric", "sensitive": False}
             for c in COUNT_COLUMNS]
    cols.append({"name": "felony", "kind": "binary", "sensitive": False})
    cols += [{"name": c, "kind": "binary", "sensitive": False}
             for c in charge_names]
    cols.append({"name": target, "kind": "numeric", "sensitive": False,
                 "target": True})
    return cols

  for target, name in (("two_year_recid", "schema_recid.json"),
                       ("decile_score", "schema_decile.json")):
    with open(os.path.join(args.out_dir, name), "w", encoding="utf-8") as f:
      json.dump(schema(target), f, indent=1)
      f.write("\n")

  print(f"{len(rows)} rows, {3 + len(COUNT_COLUMNS) + 1 + len(charges)} "
        f"source columns -> {out_csv}")


if __name__ == "__main__":
  main()
