"""Validate nnbench JSON artifacts against the shipped schemas.

usage: validate_outputs.py SCHEMA_DIR PATH...

Each PATH is a report file or a directory searched recursively. The schema
is picked from the file name; unknown JSON files are an error so new report
types cannot slip through unvalidated.
"""
import json
import pathlib
import re
import sys

import jsonschema
from referencing import Registry, Resource

RULES = [
    (re.compile(r"manifest\.json$"), "manifest.schema.json"),
    (re.compile(r"results/.+\.json$"), "results.schema.json"),
    (re.compile(r"scores/comparison-.+\.json$"), "comparison.schema.json"),
    (re.compile(r"scores/.+\.json$"), "scorecard.schema.json"),
    (re.compile(r"characteristics/micro\.json$"), "characteristics.schema.json"),
    (re.compile(r"characteristics/kiviat\.json$"), "kiviat.schema.json"),
    (re.compile(r"cluster/dendrogram\.json$"), "dendrogram.schema.json"),
    (re.compile(r"cluster/summary\.json$"), "summary.schema.json"),
    (re.compile(r"specs/.+\.json$"), "netspec.schema.json"),
]


def load_schemas(schema_dir):
    schemas = {}
    registry = Registry()
    for p in sorted(schema_dir.glob("*.schema.json")):
        s = json.loads(p.read_text())
        jsonschema.Draft202012Validator.check_schema(s)
        schemas[p.name] = s
        res = Resource.from_contents(s)
        registry = registry.with_resource(p.name, res).with_resource(s["$id"], res)
    return schemas, registry


def schema_for(path):
    posix = path.as_posix()
    for rx, name in RULES:
        if rx.search(posix):
            return name
    return None


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    schemas, registry = load_schemas(pathlib.Path(argv[1]))
    files = []
    for arg in argv[2:]:
        p = pathlib.Path(arg)
        files.extend(sorted(p.rglob("*.json")) if p.is_dir() else [p])
    if not files:
        print("no JSON files found", file=sys.stderr)
        return 1
    bad = 0
    for f in files:
        name = schema_for(f)
        if name is None:
            print(f"FAIL {f}: no schema for this file")
            bad += 1
            continue
        v = jsonschema.Draft202012Validator(schemas[name], registry=registry)
        errors = sorted(v.iter_errors(json.loads(f.read_text())), key=lambda e: list(e.path))
        for e in errors[:5]:
            print(f"FAIL {f} [{name}] at {'/'.join(map(str, e.path))}: {e.message}")
        bad += bool(errors)
    print(f"{len(files) - bad}/{len(files)} files valid")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
