#!/usr/bin/env python3
"""Exercises the command-line error surface: exit codes, the one-line
error[Tag] stderr format, and help output. Usage: cli_errors.py <binary>."""

import json
import re
import subprocess
import sys
import tempfile
from pathlib import Path

CLI = Path(sys.argv[1]).resolve()
FAILURES = []


def run(*argv):
    return subprocess.run(
        [str(CLI), *argv], capture_output=True, text=True, timeout=120
    )


def check(name, condition, context=""):
    if condition:
        print(f"ok: {name}")
    else:
        FAILURES.append(name)
        print(f"FAIL: {name} {context}")


def check_error_line(name, proc, tag, fragment=""):
    lines = [line for line in proc.stderr.splitlines() if line]
    shaped = (
        len(lines) == 1
        and re.fullmatch(r"error\[[A-Za-z]+\]: .+", lines[0]) is not None
        and lines[0].startswith(f"error[{tag}]:")
        and fragment in lines[0]
    )
    check(name, proc.returncode == 1 and shaped, repr(proc.stderr))


work = Path(tempfile.mkdtemp(prefix="speclhs_cli_errors_"))

grid = work / "grid.csv"
with grid.open("w") as f:
    f.write("X,Y,a,b\n")
    for row in range(4):
        for col in range(4):
            f.write(
                f"{col * 10.0},{300.0 - row * 10.0},"
                f"{row + 0.25 * col},{col - 0.5 * row}\n"
            )


def write_config(name, **overrides):
    cfg = {
        "input": {"paths": [str(grid)]},
        "k": 2,
        "n": 3,
        "seed": 11,
        "threads": 1,
        "schedule": {"iterations": 5, "moves_per_temp": 5},
        "output_dir": str(work / "out"),
    }
    for key, value in overrides.items():
        if value is None:
            cfg.pop(key, None)
        else:
            cfg[key] = value
    path = work / name
    path.write_text(json.dumps(cfg))
    return str(path)


# Argument parsing is handled before any of our own validation runs.
proc = run()
check("no subcommand fails", proc.returncode != 0)

proc = run("--help")
check(
    "help exits zero and names the subcommands",
    proc.returncode == 0
    and all(w in proc.stdout for w in ("cluster", "select-k", "sample", "report")),
)

proc = run("cluster")
check("missing --config fails", proc.returncode != 0)

proc = run("sample", "--config", write_config("ok.json"), "--mode", "sideways")
check("unknown mode is rejected at parse time", proc.returncode != 0)

# Our own errors: exit code 1 and exactly one error[Tag] line on stderr.
proc = run("cluster", "--config", str(work / "absent.json"))
check_error_line("missing config file", proc, "UnreadableFile")

bad = work / "bad.json"
bad.write_text("{ this is not json")
proc = run("cluster", "--config", str(bad))
check_error_line("unparseable config", proc, "InvalidConfig")

proc = run("cluster", "--config", write_config("noseed.json", seed=None))
check_error_line("config without a seed", proc, "InvalidConfig", "seed")

proc = run("cluster", "--config", write_config("ok2.json"), "--k", "1")
check_error_line("k below two", proc, "InvalidConfig")

proc = run(
    "sample",
    "--config",
    write_config("fresh.json", output_dir=str(work / "fresh")),
    "--mode",
    "spectral",
)
check_error_line("spectral sampling before clustering", proc, "MissingClusterModel")

proc = run("report", "--config", write_config("fresh2.json", output_dir=str(work / "fresh2")))
check_error_line("report before clustering", proc, "MissingClusterModel")

proc = run(
    "cluster",
    "--config",
    write_config("missingdata.json", input={"paths": [str(work / "gone.csv")]}),
)
check_error_line("missing input raster", proc, "UnreadableFile")

proc = run("select-k", "--config", write_config("ok3.json"), "--k-min", "9", "--k-max", "3")
check_error_line("inverted k range", proc, "InvalidConfig")

# A healthy run stays quiet on stderr and exits zero.
proc = run("cluster", "--config", write_config("healthy.json"))
check(
    "healthy cluster run exits zero with empty stderr",
    proc.returncode == 0 and proc.stderr == "",
    repr(proc.stderr),
)

if FAILURES:
    print(f"{len(FAILURES)} check(s) failed: {', '.join(FAILURES)}")
    sys.exit(1)
print("all CLI error-surface checks passed")
