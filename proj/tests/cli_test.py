"""End-to-end checks of the orbitsphere command line tool."""

import hashlib
import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

CLI, SPECS, SCHEMA = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
failures = []


def run(*args, env=None):
    full_env = dict(os.environ)
    full_env.update(env or {})
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True, env=full_env, timeout=600)


def expect(name, cond, detail=""):
    print(("ok   " if cond else "FAIL ") + name + (f" ({detail})" if detail and not cond else ""))
    if not cond:
        failures.append(name)


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


cat, pa, loz = SPECS / "anosov_cat.flowspec", SPECS / "pa_sing.flowspec", SPECS / "lozenge.flowspec"

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    r = run()
    expect("no arguments is a usage error", r.returncode == 1, r.returncode)
    r = run("frobnicate", pa)
    expect("unknown subcommand is a usage error", r.returncode == 1, r.returncode)
    r = run("validate", tmp / "missing.flowspec")
    expect("missing spec is a usage error", r.returncode == 1, r.returncode)

    broken = tmp / "broken.flowspec"
    broken.write_text("genus 2\n[rectangles]\ns0\n[gluings]\ns0 sideways s0\n")
    r = run("validate", broken)
    expect("parse error exits 1", r.returncode == 1, r.returncode)
    expect("parse error names line and column", "5:4" in r.stderr or "line 5, column 4" in r.stderr, r.stderr)

    for bad in ("one_prong", "permutation"):
        r = run("validate", SPECS / "invalid" / f"{bad}.flowspec")
        report = json.loads(r.stdout)["validation"]
        expect(f"{bad} fails validation", r.returncode == 1 and not report["ok"] and report["errors"], r.stdout)

    r = run("validate", pa)
    report = json.loads(r.stdout)["validation"]
    expect("genus two spec validates", r.returncode == 0 and report["ok"], r.stdout)
    expect("diagnostics stay off stdout", r.stdout.lstrip().startswith("{"))

    r = run("quotient", cat, "--out", tmp / "cat")
    expect("torus quotient is refused", r.returncode == 2 and "product region detected" in r.stderr, r.stderr)
    r = run("dynamics", loz, "--out", tmp / "loz")
    expect("skewed dynamics is refused", r.returncode == 2, r.returncode)

    r = run("boundary", pa, "--depth", "2", "--out", tmp / "budget", env={"ORBITSPHERE_BUDGET": "40"})
    expect("tile budget override is honored", r.returncode == 3, f"{r.returncode} {r.stderr}")

    r = run("dynamics", pa, "--element", "zz", "--out", tmp / "elem")
    expect("unknown element is a usage error", r.returncode == 1, r.returncode)

    outs = []
    for i in range(2):
        out = tmp / f"q{i}"
        r = run("quotient", pa, "--depth", "3", "--out", out)
        expect(f"quotient run {i} succeeds", r.returncode == 0, r.stderr)
        outs.append(out)
    for name in ("complex.json", "chords.svg", "curve.svg"):
        expect(f"{name} is deterministic", digest(outs[0] / name) == digest(outs[1] / name))

    complex_doc = json.loads((outs[0] / "complex.json").read_text())
    try:
        jsonschema.validate(complex_doc, json.loads(SCHEMA.read_text()))
        expect("complex.json matches its schema", True)
    except jsonschema.ValidationError as e:
        expect("complex.json matches its schema", False, e.message)
    expect("quotient is a sphere", complex_doc["euler_characteristic"] == 2 and complex_doc["connected"])

    run("quotient", pa, "--depth", "3", "--seed", "7", "--out", tmp / "s7")
    expect("seed changes only the curve", digest(tmp / "s7" / "complex.json") == digest(outs[0] / "complex.json"))

if failures:
    print(f"{len(failures)} CLI checks failed")
    sys.exit(1)
print("all CLI checks passed")
