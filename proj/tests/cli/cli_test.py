#!/usr/bin/env python3
"""Golden tests for the command-line tool: exit codes, reports and byte-stable output."""

import json
import os
import subprocess
import sys
import tempfile

BIN, DATA = sys.argv[1], sys.argv[2]
failures = []


def run(*args, env=None):
    p = subprocess.run([BIN, *args], capture_output=True, text=True, env=env)
    return p.returncode, p.stdout


def data(name):
    return os.path.join(DATA, name)


def check(name, cond):
    print(("ok   " if cond else "FAIL ") + name)
    if not cond:
        failures.append(name)


def load(name):
    with open(data(name)) as f:
        return json.load(f)


# The model hypersurface is its own normal form.
code, out = run("normalize", data("model_m1.json"), "--order", "12")
report = json.loads(out)
check("normalize model: exit 0", code == 0)
check("normalize model: normal form equals the input", report["normalization"]["normal_form"] == load("model_m1.json"))
check("normalize model: zero Cauchy data",
      all(v == [] for v in report["normalization"]["map"]["cauchy"].values()))
check("normalize model: certificate holds", report["normalization"]["certificate"]["holds"])

# alpha0 = 3 is resonant at k = 2.
code, out = run("resonance", data("crafted_alpha3.json"))
check("resonance alpha0 = 3: exit 0", code == 0)
check("resonance alpha0 = 3: resonant at [2]", json.loads(out)["resonance"]["resonant_ks"] == [2])
code, out = run("normalize", data("crafted_alpha3.json"))
check("normalize alpha0 = 3: exit 2", code == 2)
check("normalize alpha0 = 3: error names k = 2", json.loads(out)["error"]["k"] == 2)

# A hypersurface and its dilation.
code, out = run("equivalence", data("pair_a.json"), data("pair_b.json"))
report = json.loads(out)
check("equivalence of a dilation pair: exit 0", code == 0)
check("equivalence of a dilation pair: equivalent", report["equivalent"] is True)
check("equivalence of a dilation pair: witness", report["witness"] == {"lambda": ["3/5", "4/5"], "mu": "2"})

# Reruns and parallel batches are byte-identical.
first = run("normalize", data("pair_a.json"))
check("rerun is byte-identical", first == run("normalize", data("pair_a.json")))
inputs = [data("pair_a.json"), data("pair_b.json"), data("crafted_alpha3.json"), data("model_m1.json")]
serial = run("normalize", *inputs)
parallel = run("normalize", *inputs, "--jobs", "4")
check("batch: --jobs 4 matches serial output", serial == parallel)
check("batch: exit code is the maximum", serial[0] == 2)
check("batch: outputs in input order", [r["input"] for r in json.loads(serial[1])] == inputs)

# JSON round trip through the exponential form.
with tempfile.TemporaryDirectory() as tmp:
    code, out = run("exponential", data("pair_a.json"))
    exp_path = os.path.join(tmp, "exp.json")
    with open(exp_path, "w") as f:
        json.dump(json.loads(out)["exponential"], f)
    code, out = run("exponential", exp_path)
    check("exponential round trip", code == 0 and json.loads(out)["hypersurface"] == load("pair_a.json"))

    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as f:
        f.write('{"m": 1, "eps": 1, "order": 9, "h": {"2,2": [["1/0", "0"]]}}')
    check("zero denominator: exit 3", run("validate", bad)[0] == 3)
    with open(bad, "w") as f:
        f.write('{"m": 1')
    check("malformed JSON: exit 3", run("validate", bad)[0] == 3)

check("order above 16 without --allow-large: exit 4", run("validate", data("pair_a.json"), "--order", "20")[0] == 4)
check("order above 16 with --allow-large: exit 0",
      run("validate", data("pair_a.json"), "--order", "20", "--allow-large")[0] == 0)
check("normalization below order m + 7: exit 4", run("normalize", data("pair_a.json"), "--order", "7")[0] == 4)
check("bad --lambda: exit 4", run("normalize", data("pair_a.json"), "--lambda", "x")[0] == 4)
check("|lambda| != 1 for m = 1: exit 4", run("normalize", data("pair_a.json"), "--lambda", "2")[0] == 4)
check("missing file: exit 4", run("validate", data("no_such_file.json"))[0] == 4)

code, out = run("check-symmetry", data("model_m1.json"), "--order", "12")
check("check-symmetry on the model: consistent", code == 0 and json.loads(out)["consistent"])

env = dict(os.environ, CRNF_SEED="7")
code, out = run("self-test", env=env)
check("self-test passes with CRNF_SEED=7", code == 0 and json.loads(out)["seed"] == 7)

code, out = run("resonance", data("crafted_alpha3.json"), "--format", "text")
check("text format", "resonance.resonant_ks: [2]" in out.splitlines())

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
