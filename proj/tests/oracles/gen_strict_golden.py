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


"""Writes tests/data/strict_json_golden.jsonl from hand-authored cases.

Each verdict follows the strict rule: exactly one JSON object, whose sole key
is the target field, holding a non-null value of the field's shape.
"""

import json
import sys

FENCE = "`" * 3

CASES = [
    # valid
    ("pH_range", '{"pH_range": {"lower": 6.0, "upper": 8.0}}', None),
    ("pH_opt", '{"pH_opt": {"lower": 7, "upper": 7}}', None),
    ("gram_stain", '  {"gram_stain": "negative"}\n', None),
    ("motility", '{"motility": false}', None),
    ("carbon_source", '{"carbon_source": ["sugars", "organic_acids_TCA"]}', None),
    ("cell_shape", '{"cell_shape": "Rod-shaped"}', None),
    # NotJson
    ("gram_stain", "", "NotJson"),
    ("gram_stain", "negative", "NotJson"),
    ("gram_stain", '["negative"]', "NotJson"),
    ("pH_range", '{"pH_range": {"lower": 6.0, "upper": 8.0}', "NotJson"),
    # MultipleObjects
    ("gram_stain", '{"gram_stain": "negative"} {"gram_stain": "positive"}', "MultipleObjects"),
    ("motility", '{"motility": true}\n{"motility": true}', "MultipleObjects"),
    # MarkdownFence
    ("pH_range", FENCE + 'json\n{"pH_range": {"lower": 6.0, "upper": 8.0}}\n' + FENCE, "MarkdownFence"),
    ("gram_stain", FENCE + '\n{"gram_stain": "negative"}\n' + FENCE, "MarkdownFence"),
    # ExtraProse
    ("gram_stain", 'The answer is {"gram_stain": "negative"}', "ExtraProse"),
    ("motility", '{"motility": true} because flagella were observed', "ExtraProse"),
    # MissingTargetField
    ("gram_stain", "{}", "MissingTargetField"),
    ("gram_stain", '{"answer": "negative"}', "MissingTargetField"),
    # WrongField
    ("pH_range", '{"pH_opt": {"lower": 6.0, "upper": 8.0}}', "WrongField"),
    ("gram_stain", '{"cell_shape": "rod"}', "WrongField"),
    # NullValue
    ("gram_stain", '{"gram_stain": null}', "NullValue"),
    ("pH_range", '{"pH_range": {"lower": null, "upper": 8.0}}', "NullValue"),
    ("carbon_source", '{"carbon_source": ["sugars", null]}', "NullValue"),
    # ExtraFields
    ("pH_range", '{"pH_range": {"lower": 6.0, "upper": 8.0}, "note": "x"}', "ExtraFields"),
    ("gram_stain", '{"gram_stain": "negative", "confidence": 0.9}', "ExtraFields"),
    # TypeMismatch
    ("pH_range", '{"pH_range": "6-8"}', "TypeMismatch"),
    ("salinity_range", '{"salinity_range": {"lower": 5.0, "upper": 2.0}}', "TypeMismatch"),
    ("pH_opt", '{"pH_opt": 7}', "TypeMismatch"),
    ("motility", '{"motility": "yes"}', "TypeMismatch"),
    ("gram_stain", '{"gram_stain": 1}', "TypeMismatch"),
    ("carbon_source", '{"carbon_source": "sugars"}', "TypeMismatch"),
    ("pH_range", '{"pH_range": {"lower": 6.0, "upper": 8.0, "unit": "pH"}}', "TypeMismatch"),
]


def main(path):
    with open(path, "w") as out:
        for i, (field, text, reason) in enumerate(CASES):
            case = {"id": "strict_%02d" % i, "field": field, "text": text, "valid": reason is None,
                    "failure_reason": reason}
            out.write(json.dumps(case) + "\n")


if __name__ == "__main__":
    main(sys.argv[1])
