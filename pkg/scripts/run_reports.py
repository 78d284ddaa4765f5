"""Regenerate the example reports through the command-line interface.

Usage: python scripts/run_reports.py [OUTDIR]   (default: runs/)
Each command's JSON report is written to OUTDIR; exit codes are printed.
"""

import sys
from pathlib import Path

from ntdecay.cli import main as ntdecay

COMMANDS = [
    ("criteria_B_logpow2", ["criteria", "--g", "logpow:2", "--mode", "B"]),
    ("criteria_B_power1", ["criteria", "--g", "power:1", "--mode", "B"]),
    ("criteria_limsup", ["criteria", "--g", "log:1", "--mode", "limsup", "--weights", "power:1,1"]),
    ("construct_lemma61", ["construct", "--g", "power:1", "--depth", "15"]),
    ("construct_necessity", ["construct", "--variant", "necessity-thm2", "--g", "log:1", "--weights", "power:1,1", "--depth", "12"]),
    ("construct_rings", ["construct", "--variant", "rings", "--rings", "1,2,4,8,16", "--ring-rule", "pow2"]),
    ("construct_refused", ["construct", "--g", "exp:1", "--depth", "8"]),
]


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "runs")
    out.mkdir(parents=True, exist_ok=True)
    for name, argv in COMMANDS:
        if argv[0] == "construct":
            code = ntdecay([*argv, "--out", str(out / name)])
        else:
            code = ntdecay([*argv, "--out", str(out / f"{name}.json")])
        print(f"{name:<22} exit {code}")
    seq, meas = out / "construct_lemma61" / "sequence.jsonl", out / "construct_lemma61" / "measure.json"
    for name, argv in (
        ("analyze_lemma61", ["analyze", "--input", str(seq)]),
        ("verify_lemma61", ["verify", "--input", str(seq), "--g", "power:1", "--measure", str(meas), "--C", "auto"]),
        ("classify_rings", ["classify", "--input", str(out / "construct_rings" / "sequence.jsonl"), "--weights", "power:2", "--class", "P"]),
    ):
        print(f"{name:<22} exit {ntdecay([*argv, '--out', str(out / f'{name}.json')])}")


if __name__ == "__main__":
    main()
