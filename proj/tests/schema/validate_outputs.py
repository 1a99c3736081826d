#!/usr/bin/env python3
# Copyright (C) 2026 The deskip Authors
# SPDX-License-Identifier: Apache-2.0
"""Runs every deskip subcommand on the shipped configs and validates each
emitted JSON document against the committed schemas."""
import argparse
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def load_schemas(root):
    return {p.name.removesuffix(".schema.json"): json.loads(p.read_text())
            for p in root.glob("*.schema.json")}


class Checker:
    def __init__(self, schemas):
        self.schemas = schemas
        self.failures = []
        self.checked = 0

    def check(self, doc, schema, what):
        self.checked += 1
        try:
            jsonschema.validate(doc, self.schemas[schema],
                                cls=jsonschema.Draft202012Validator)
        except jsonschema.ValidationError as e:
            self.failures.append(f"{what}: {e.message} at /{'/'.join(map(str, e.path))}")

    def check_file(self, path, schema):
        self.check(json.loads(path.read_text()), schema, str(path))


def run(tool, *args, expect=0):
    p = subprocess.run([tool, *args], capture_output=True, text=True)
    if p.returncode != expect:
        sys.exit(f"{' '.join(args)}: exit {p.returncode}, expected {expect}\n{p.stderr}")
    return p


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--tool", required=True)
    ap.add_argument("--schemas", required=True, type=pathlib.Path)
    ap.add_argument("--configs", required=True, type=pathlib.Path)
    ap.add_argument("--work", required=True, type=pathlib.Path)
    a = ap.parse_args()

    c = Checker(load_schemas(a.schemas))
    shutil.rmtree(a.work, ignore_errors=True)
    a.work.mkdir(parents=True)

    for cfg in sorted(a.configs.glob("*.json")):
        doc = json.loads(cfg.read_text())
        c.check(doc, "hwcompare_config" if "hw" in doc else "experiment_config", str(cfg))

    toy = str(a.configs / "toy.json")
    for cmd in ("run", "distill", "baseline"):
        out = a.work / cmd
        p = run(a.tool, cmd, "--config", toy, "--out", str(out))
        c.check(json.loads(p.stdout), "run_summary", f"{cmd} stdout")
        c.check_file(out / "config.json", "experiment_config")
        for seed_dir in sorted(out.glob("seed-*")):
            c.check_file(seed_dir / "records.json", "records")
            c.check_file(seed_dir / "timing.json", "timing")

    run(a.tool, "report", "--out", str(a.work), "--config", str(a.configs / "desk.json"))
    c.check_file(a.work / "summary.json", "summary")
    empty = a.work / "empty"
    empty.mkdir()
    run(a.tool, "report", "--out", str(empty))
    c.check_file(empty / "summary.json", "summary")

    hw = a.work / "hw"
    for mode in ("stall", "buffer"):
        run(a.tool, "hwcompare", "--config", str(a.configs / "hw_calibration.json"),
            "--mode", mode, "--out", str(hw))
        c.check_file(hw / "hwcompare.json", "hwcompare")

    for args, code in ((["distill", "--config", str(a.work / "missing.json")], 1),
                       (["hwcompare", "--config", str(a.configs / "toy.json")], 1),
                       (["bogus"], 2)):
        p = run(a.tool, *args, expect=code)
        c.check(json.loads(p.stderr), "error", " ".join(args[:1]) + " stderr")

    for f in c.failures:
        print("INVALID", f)
    print(f"{c.checked} documents checked, {len(c.failures)} invalid")
    return 1 if c.failures else 0


if __name__ == "__main__":
    sys.exit(main())
