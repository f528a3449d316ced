"""Validate fracobs report documents against the committed schema.

Also rejects non-finite numbers, which JSON Schema cannot express.
"""
import json
import math
import sys

import jsonschema


def finite(node, path="$"):
    if isinstance(node, float) and not math.isfinite(node):
        raise ValueError(f"non-finite number at {path}")
    if isinstance(node, dict):
        for k, v in node.items():
            finite(v, f"{path}.{k}")
    elif isinstance(node, list):
        for i, v in enumerate(node):
            finite(v, f"{path}[{i}]")


def main(argv):
    if len(argv) < 3:
        print("usage: validate_report.py SCHEMA REPORT...", file=sys.stderr)
        return 2
    with open(argv[1]) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    for path in argv[2:]:
        with open(path) as f:
            doc = json.load(f, parse_constant=lambda c: float(c))
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        try:
            finite(doc)
        except ValueError as e:
            errors.append(e)
        for e in errors:
            print(f"{path}: {getattr(e, 'message', e)}", file=sys.stderr)
        bad += bool(errors)
        if not errors:
            print(f"{path}: valid")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
