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


"""Writes tests/data/distill_golden.jsonl: 50 candidate bundles with the
selection, deciding level and retry plan computed by a direct Python
implementation of the scoring, ranking and retry rules."""

import json
import random
import sys

FENCE = "`" * 3
FIELDS = {
    "gram_stain": "categorical",
    "motility": "boolean",
    "pH_range": "interval",
    "pH_opt": "optimum",
    "carbon_source": "multilabel",
}
INTERVAL_SCALE = {"pH_range": 7.0}
OPTIMUM_SCALE = {"pH_opt": 2.0}
COMPACTNESS = 0.25
GRAM = ["positive", "negative", "variable"]
CARBON = ["sugars", "organic_acids_TCA", "amino_acids", "C1", "alcohols_polyols", "hydrocarbons"]


def random_truth(rng, field):
    kind = FIELDS[field]
    if kind == "categorical":
        return rng.choice(GRAM)
    if kind == "boolean":
        return rng.random() < 0.5
    if kind == "interval":
        lo = rng.choice([5.0, 5.5, 6.0, 6.5])
        return {"lower": lo, "upper": lo + rng.choice([1.0, 2.0, 3.0])}
    if kind == "optimum":
        v = rng.choice([6.0, 6.5, 7.0, 7.5])
        return {"lower": v, "upper": v}
    return rng.sample(CARBON, rng.randint(1, 3))


def random_prediction(rng, field, truth):
    kind = FIELDS[field]
    if rng.random() < 0.35:
        return truth
    if kind == "categorical":
        return rng.choice(GRAM)
    if kind == "boolean":
        return rng.random() < 0.5
    if kind in ("interval", "optimum"):
        lo = rng.choice([4.0, 5.0, 5.5, 6.0, 7.0])
        return {"lower": lo, "upper": lo + rng.choice([0.0, 1.0, 2.0, 4.0])}
    return rng.sample(CARBON, rng.randint(1, 4))


def correctness(field, pred, truth):
    kind = FIELDS[field]
    if pred is None:
        return -1.0
    if kind in ("categorical", "boolean"):
        return 1.0 if pred == truth else -1.0
    if kind == "interval":
        tl = truth["upper"] - truth["lower"]
        if tl <= 0.0:
            return 1.0 if pred["lower"] <= truth["lower"] and pred["upper"] >= truth["upper"] else -1.0
        overlap = max(0.0, min(pred["upper"], truth["upper"]) - max(pred["lower"], truth["lower"]))
        excess = (pred["upper"] - pred["lower"]) - overlap
        r = 2.0 * overlap / tl - 1.0 - COMPACTNESS * excess / INTERVAL_SCALE[field]
        return min(1.0, max(-1.0, r))
    if kind == "optimum":
        err = abs((pred["lower"] + pred["upper"]) / 2 - (truth["lower"] + truth["upper"]) / 2)
        return 1.0 - 2.0 * min(err / OPTIMUM_SCALE[field], 1.0)
    p = set(pred[:5])
    t = set(truth)
    tp = len(p & t)
    return 2.0 * (2.0 * tp / (len(p) + len(t))) - 1.0


def answer_text(rng, field, pred):
    """Returns (text, strict_ok, parse_ok, strict_value)."""
    body = json.dumps({field: pred})
    style = rng.choices(["strict", "fence", "prose", "garbage", "none"], [6, 1, 1, 1, 1])[0]
    if style == "strict":
        return body, True, True, pred
    if style == "fence":
        return FENCE + "json\n" + body + "\n" + FENCE, False, True, None
    if style == "prose":
        return "Final answer: " + body, False, True, None
    if style == "garbage":
        return "I am not sure.", False, False, None
    return None, False, False, None


def rag_call(rng, field, rnd):
    errored = rng.random() < 0.2
    if errored:
        obs = {"tool": "rag_tool", "top_similar_records": [], "retrieved_count": 0, "error": "unknown handle: X"}
        return {"round": rnd, "tool": "rag_tool", "arguments": {}, "observation": obs, "errored": True}
    n = rng.choice([0, 3])
    carries = rng.random() < 0.7
    records = []
    for r in range(n):
        phen = {field: None} if carries else {"cell_shape": "rod"}
        records.append({"rank": r + 1, "strain_id": "N%d" % r, "similarity": 0.9, "phenotypes": phen})
    obs = {"tool": "rag_tool", "top_similar_records": records, "retrieved_count": n}
    return {"round": rnd, "tool": "rag_tool", "arguments": {}, "observation": obs, "errored": False}


def gem_call(rng, rnd):
    cid = rng.randint(1, 18)
    errored = rng.random() < 0.25
    if errored:
        obs = {"tool": "gem_tool", "configuration_id": cid, "minimal_substrate_dict": {},
               "error": "no feasible growth under this configuration"}
    else:
        subs = {"EX_glc_e": 1.0} if rng.random() < 0.8 else {}
        obs = {"tool": "gem_tool", "configuration_id": cid, "minimal_substrate_dict": subs, "error": None}
    return {"round": rnd, "tool": "gem_tool", "arguments": {"config_id": cid}, "observation": obs,
            "errored": errored}


def make_candidate(rng, sample_id, field, truth):
    calls = []
    for rnd in range(rng.randint(0, 4)):
        calls.append(rag_call(rng, field, rnd) if rng.random() < 0.5 else gem_call(rng, rnd))
    pred = random_prediction(rng, field, truth)
    text, strict, parse_ok, strict_value = answer_text(rng, field, pred)
    turns = [
        {"role": "system", "origin": "environment", "text": "sys", "token_ids": []},
        {"role": "user", "origin": "environment", "text": "<gene>\nhandle: %s\nfield: %s" % (sample_id, field),
         "token_ids": []},
    ]
    for c in calls:
        call_text = "<tool_call>" + json.dumps({"name": c["tool"], "arguments": c["arguments"]}) + "</tool_call>"
        turns.append({"role": "assistant", "origin": "model", "text": call_text, "token_ids": [], "logprobs": [],
                      "tool_block_start": 0})
        turns.append({"role": "tool", "origin": "environment", "text": json.dumps(c["observation"]),
                      "token_ids": []})
    if text is not None:
        turns.append({"role": "assistant", "origin": "model", "text": text, "token_ids": [], "logprobs": [],
                      "tool_block_start": None})
    traj = {"strain_id": sample_id, "field": field, "handle": sample_id, "turns": turns, "tool_calls": calls,
            "final_answer_text": text, "repaired": False}
    return traj, score(field, truth, calls, text, strict, parse_ok, strict_value)


def score(field, truth, calls, text, strict, parse_ok, strict_value):
    s = {"correctness": correctness(field, strict_value, truth), "strict_json": strict, "parse_ok": parse_ok,
         "tool_errors": 0, "non_error_tool_calls": 0, "answer_length": len(text.encode()) if text else 0,
         "used_rag": False, "used_gem": False}
    useful = 0
    gem_relevant = FIELDS[field] in ("interval", "optimum", "multilabel")
    for c in calls:
        if c["errored"]:
            s["tool_errors"] += 1
            continue
        s["non_error_tool_calls"] += 1
        obs = c["observation"]
        if c["tool"] == "rag_tool":
            s["used_rag"] = True
            relevant = any(field in r["phenotypes"] for r in obs["top_similar_records"])
            nonempty = obs["retrieved_count"] > 0
        else:
            s["used_gem"] = True
            relevant = gem_relevant
            nonempty = len(obs["minimal_substrate_dict"]) > 0
        if relevant and nonempty:
            useful += 1
    s["evidence_quality"] = useful / len(calls) if calls else 0.0
    return s


LEVELS = ["correctness", "both_tools", "strict_json", "parse_ok", "evidence_quality", "tool_errors",
          "non_error_tool_calls", "answer_length"]


def level_key(field, s, level):
    """Larger is better."""
    if level == "both_tools":
        return (s["used_rag"] and s["used_gem"]) if FIELDS[field] in ("interval", "optimum") else 0
    if level in ("tool_errors", "answer_length"):
        return -s[level]
    return s[level]


def rank(field, scores):
    order = sorted(range(len(scores)), key=lambda i: tuple([-level_key(field, scores[i], l) for l in LEVELS]) + (i,))
    winner = order[0]
    if len(scores) == 1:
        return winner, "single_candidate"
    runner = order[1]
    for level in LEVELS:
        if level_key(field, scores[winner], level) != level_key(field, scores[runner], level):
            return winner, level
    return winner, "index"


def retry(field, best):
    kind = FIELDS[field]
    imperfect = best["correctness"] < 1.0 - 1e-9
    if kind in ("interval", "optimum"):
        r = imperfect
    elif kind == "multilabel":
        r = imperfect and not best["used_gem"]
    else:
        r = imperfect and best["used_rag"] and not best["used_gem"]
    if not r:
        return {"retry": False, "forced_protocol": None, "min_gem_calls": 0}
    n = 2 if kind in ("interval", "optimum") else 1
    proto = "call rag_tool first, then at least %d gem_tool call%s" % (n, "s" if n > 1 else "")
    return {"retry": True, "forced_protocol": proto, "min_gem_calls": n}


def main(path):
    rng = random.Random(424242)
    names = list(FIELDS)
    with open(path, "w") as out:
        for b in range(50):
            field = names[b % len(names)]
            sample_id = "D%03d" % b
            truth = random_truth(rng, field)
            cands, scores = [], []
            for _ in range(rng.randint(1, 5)):
                traj, s = make_candidate(rng, sample_id, field, truth)
                cands.append(traj)
                scores.append(s)
            if len(cands) > 1 and rng.random() < 0.3:
                cands.append(json.loads(json.dumps(cands[0])))
                scores.append(dict(scores[0]))
            bundle = {"sample_id": sample_id, "field": field, "truth": truth, "candidates": cands}
            winner, decided_by = rank(field, scores)
            expected = {"winner": winner, "decided_by": decided_by, "retry": retry(field, scores[winner])}
            repair = None
            if b % 5 == 2:
                bundle["corrected_answer"] = json.dumps({field: truth})
                repair = True
            elif b % 10 == 7:
                bundle["corrected_answer"] = json.dumps({field: truth, "note": "x"})
                repair = False
            line = {"bundle": bundle, "decision": json.dumps(expected, separators=(",", ":")),
                    "correctness": [s["correctness"] for s in scores],
                    "evidence_quality": [s["evidence_quality"] for s in scores], "repair_applied": repair}
            out.write(json.dumps(line) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
