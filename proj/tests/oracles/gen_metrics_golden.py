# Copyright 2026 The boundrl Authors
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


"""Writes tests/data/metrics_golden.jsonl: ICR and midpoint-RMSE cases."""

import json
import math
import random
import sys

INTERVAL_FIELDS = ["growth_temperature_range_C", "pH_range", "salinity_range"]
OPTIMUM_FIELDS = ["growth_temperature_opt_C", "pH_opt", "salinity_opt_wv_percent"]


def rand_interval(rng):
    lo = rng.randint(0, 40) / 2
    return {"lower": lo, "upper": lo + rng.randint(0, 20) / 2}


def icr(instances):
    hits = 0
    for inst in instances:
        p, t = inst["prediction"], inst["truth"]
        if p is not None and p["lower"] <= t["lower"] and p["upper"] >= t["upper"]:
            hits += 1
    return hits / len(instances)


def rmse(instances):
    sq, n, failures = 0.0, 0, 0
    for inst in instances:
        p, t = inst["prediction"], inst["truth"]
        if p is None:
            failures += 1
            continue
        d = (p["lower"] + p["upper"]) / 2 - (t["lower"] + t["upper"]) / 2
        sq += d * d
        n += 1
    return (math.sqrt(sq / n) if n else None), n, failures


def main(path):
    rng = random.Random(20260401)
    cases = []
    for i in range(10):
        field = INTERVAL_FIELDS[i % 3]
        insts = []
        for _ in range(rng.randint(1, 8)):
            t = rand_interval(rng)
            p = None if rng.random() < 0.15 else rand_interval(rng)
            if p is not None and rng.random() < 0.4:
                p = {"lower": t["lower"] - rng.randint(0, 4) / 2, "upper": t["upper"] + rng.randint(0, 4) / 2}
            insts.append({"truth": t, "prediction": p})
        cases.append({"id": "icr_%02d" % i, "metric": "ICR", "field": field, "instances": insts,
                      "expected": icr(insts)})
    for i in range(10):
        field = OPTIMUM_FIELDS[i % 3]
        insts = []
        for _ in range(rng.randint(1, 8)):
            t = rand_interval(rng)
            p = None if rng.random() < 0.2 else rand_interval(rng)
            insts.append({"truth": t, "prediction": p})
        if i == 9:
            insts = [{"truth": rand_interval(rng), "prediction": None} for _ in range(3)]
        value, n, failures = rmse(insts)
        cases.append({"id": "rmse_%02d" % i, "metric": "RMSE", "field": field, "instances": insts,
                      "expected": value, "n": n, "failures": failures})
    with open(path, "w") as out:
        for c in cases:
            out.write(json.dumps(c, sort_keys=False) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
