"""Exit-code contract and worked examples for the iwo command-line tool.

usage: check_cli.py IWO
"""

import json
import math
import os
import subprocess
import sys

BINARY = sys.argv[1]
failures = []


def run(args, env=None):
    full_env = {k: v for k, v in os.environ.items() if not k.startswith("IWO_")}
    full_env.update(env or {})
    return subprocess.run([BINARY, *args], capture_output=True, text=True, env=full_env)


def expect(name, condition, detail=""):
    print(("ok   " if condition else "FAIL ") + name + (f" ({detail})" if detail and not condition else ""))
    if not condition:
        failures.append(name)


def payload(args, env=None):
    proc = run(args, env)
    expect(" ".join(args) + " exits 0", proc.returncode == 0, proc.stderr.strip())
    return json.loads(proc.stdout)["payload"] if proc.returncode == 0 else {}


# Exit code 2: usage and parse errors.
for args in (
    ["decompose", "1", "2"],
    ["decompose", "3"],
    ["orbit", "3", "2", "--group", "N", "--point", "0,0,0,0,0"],
    ["orbit", "3", "2", "--group", "N", "--point", "1,2"],
    ["orbit", "3", "2", "--group", "N", "--point", "1,x,0,0,0"],
    ["orbit", "3", "2", "--group", "N", "--point", "0.5,0,0,0,0"],
    ["orbit", "3", "2", "--group", "Q", "--point", "1,0,0,0,0"],
    ["orbit", "3", "2", "--group", "N", "--kprime", "k0", "--point", "1,0,0,0,0"],
    ["verify", "3", "2", "--suite", "nope"],
    ["verify", "3"],
    ["flow", "3", "2", "--gen", "n:99", "--point", "0,0,1,-1,0"],
    ["flow", "3", "2", "--gen", "zz:0", "--point", "0,0,1,-1,0"],
    ["flow", "3", "2", "--gen", "n:0", "--point", "0,0,1,-1,0", "--t", "0:1"],
    ["flow", "3", "2", "--gen", "n:0", "--point", "0,0,1,-1,0", "--t", "0:1:0"],
    ["frobnicate"],
    [],
):
    proc = run(args)
    expect(f"{' '.join(args) or '<none>'} exits 2", proc.returncode == 2, f"got {proc.returncode}")
expect("IWO_SEED garbage exits 2", run(["sample", "2", "1"], {"IWO_SEED": "x"}).returncode == 2)
expect("--help exits 0", run(["--help"]).returncode == 0)
expect("swap hint on p < q", "swap" in run(["decompose", "1", "2"]).stderr)

# decompose
d = payload(["decompose", "3", "2"])
expect("decompose 3 2 dims", d.get("dims") == {"so": 10, "k": 4, "p": 6, "a": 2, "k0": 0, "n": 4}, str(d.get("dims")))
d = payload(["decompose", "2", "2"])
labels = [r["label"] for r in d.get("roots", [])]
expect("decompose 2 2 has no single roots", labels and all(("+" in l[1:] or "-" in l[1:]) for l in labels), str(labels))
d = payload(["decompose", "4", "2", "--bases"])
expect("decompose --bases emits n basis", len(d.get("bases", {}).get("n", [])) == 6)

# orbit
d = payload(["orbit", "3", "2", "--group", "N", "--point", "0,0,1,0,0"])
expect("orbit N e_3", (d.get("oracleDim"), d.get("predictedDim"), d.get("stratum", {}).get("k")) == (3, 3, 1), str(d)[:200])
d = payload(["orbit", "4", "2", "--group", "K0AN", "--point", "1,0,0,0,0,0"])
expect("orbit K0AN cylinder", d.get("oracleDim") == 3 and d.get("descriptor", {}).get("form") == "cylinder-product", str(d)[:200])
d = payload(["orbit", "3", "2", "--group", "AN", "--point", "1,0,0,0,0"])
expect("orbit AN e_1", d.get("oracleDim") == 2)
d = payload(["orbit", "3", "2", "--group", "A", "--point", "1,0,1,0,0"])
expect("orbit A has no predictor", d.get("predictedDim", 0) is None and d.get("descriptor", 0) is None)
d = payload(["orbit", "5", "2", "--group", "KprimeAN", "--point", "1,0,0,0,0,0,0"])
expect("KprimeAN defaults to k0", d.get("kprime", {}).get("dim") == 3 and d.get("oracleDim") == 4, str(d.get("kprime")))

# verify
proc = run(["verify", "3", "2", "--suite", "all", "--seed", "7", "--samples", "10"])
expect("verify 3 2 all exits 0", proc.returncode == 0, proc.stderr)
d = payload(["verify", "5", "3", "--suite", "N-cohomogeneity", "--samples", "10"])
metrics = d.get("runs", [{}])[0].get("suites", [{}])[0].get("metrics", {})
expect("verify 5 3 N-cohomogeneity max 6", metrics.get("maxOrbitDim") == 6, str(metrics))
d = payload(["verify", "4", "2", "--suite", "A-orbit-count"])
expect("A-orbit-count report-only", d.get("runs", [{}])[0].get("suites", [{}])[0].get("status") == "report-only")

# precedence: flag > environment > default
expect("default seed", payload(["sample", "2", "1"]).get("seed") == 7)
expect("default samples", payload(["sample", "2", "1"]).get("samplesPerStratum") == 50)
expect("env seed", payload(["sample", "2", "1"], {"IWO_SEED": "5", "IWO_SAMPLES": "3"}).get("seed") == 5)
expect("env samples", payload(["sample", "2", "1"], {"IWO_SAMPLES": "3"}).get("samplesPerStratum") == 3)
expect("flag beats env", payload(["sample", "2", "1", "--seed", "9"], {"IWO_SEED": "5"}).get("seed") == 9)
a = payload(["sample", "3", "2", "--samples", "4"])
b = payload(["sample", "3", "2", "--samples", "4"])
expect("sample deterministic", a == b and len(a.get("points", [])) > 0)

# flow
d = payload(["flow", "2", "1", "--gen", "a:1", "--point", "0,1,-1", "--t", "-1:1:11"])
worst = 0.0
for s in d.get("samples", []):
    expected = [0.0, math.exp(-s["t"]), -math.exp(-s["t"])]
    worst = max(worst, max(abs(u - v) for u, v in zip(s["point"], expected)))
expect("flow a on w_1 is e^{-t} w_1", len(d.get("samples", [])) == 11 and worst < 1e-10 and d["maxResidual"] <= 1e-9, str(worst))
d = payload(["flow", "3", "2", "--gen", "n:0", "--point", "0,0,1,-1,0", "--t", "-3:3:7"])
expect("flow n fixes e_p - e_{p+1}", all(s["point"] == [0, 0, 1, -1, 0] for s in d.get("samples", [])))
d = payload(["flow", "3", "2", "--gen", "so@1,0,0,0,0,0,0,0,0,1", "--point", "1/2,0.25,1,0,0", "--t", "0:0:1"])
expect("steps=1 at t=0 returns the point", d.get("samples", [{}])[0].get("point") == [0.5, 0.25, 1, 0, 0])
proc = run(["flow", "2", "1", "--gen", "a:1", "--point", "0,1,-1", "--t", "-1:1:3", "--format", "csv"])
lines = proc.stdout.split("\n")
expect("csv header", lines[0] == "t,x1,x2,x3,residual", lines[0])
expect("csv rows and LF", len(lines) == 5 and lines[-1] == "" and "\r" not in proc.stdout, repr(proc.stdout))

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
