"""Command line front end.

    ntdecay analyze   --input seq.jsonl
    ntdecay classify  --input seq.jsonl --weights power:1 --class S
    ntdecay criteria  --g logpow:2 --mode B
    ntdecay construct --g power:1 --depth 15 --variant lemma61 --out outdir
    ntdecay verify    --input outdir/sequence.jsonl --g power:1 --measure outdir/measure.json

Exit status: 0 when a verdict or report was produced, 1 on input errors,
2 when a construction is refused (the report then carries the certificate).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from ntdecay import io
from ntdecay.classes import (
    class_membership,
    criterion_integral,
    criterion_limsup,
    criterion_sum,
    criterion_theoremB,
    lstable_check,
    minorant_for_L,
    parse_g,
    parse_weights,
)
from ntdecay.construction import (
    ConstructionRefused,
    check_lemma61,
    check_necessity,
    construct_lemma61,
    construct_necessity_thm2,
    ring_counterexample,
)
from ntdecay.counting import coverage_distribution, sequence_profile
from ntdecay.geometry import DEFAULT_ALPHA, DiskSequence, concat
from ntdecay.potential import CircleMeasure, HarmonicWitness, calibrate_C, poisson_integral, verify_minorant_witness

EXIT_OK, EXIT_INPUT, EXIT_REFUSED = 0, 1, 2


def _cantor_table(cov, g, depth: int) -> list:
    rows = []
    gt = g.levels(depth)
    for n in range(1, depth + 1):
        need = 1.0 / gt[n] if gt[n] > 0 else math.inf
        rows.append([n, cov(n), need, bool(cov(n) >= need)])
    return rows


def cmd_analyze(args) -> dict:
    f = io.read_sequence(args.input)
    report: dict = {"command": "analyze", "alpha": args.alpha, "input_meta": f.meta}
    if f.rings is not None:
        r = f.rings
        report["rings"] = {
            "levels": list(r.ring_levels),
            "rule": r.rule,
            "per_ring_min": r.per_ring_min(args.alpha),
            "per_ring_max": r.per_ring_max(args.alpha),
            "min_phi_lower_bound": r.min_phi(args.alpha),
            "every_ring_covers": r.every_ring_covers(args.alpha),
            "blaschke_partial_sums": r.blaschke_partial_sums(),
        }
        if f.purely_rings and (not r.ring_levels or r.ring_levels[-1] > 16):
            return report
    a = f.expand()
    prof = sequence_profile(a, args.alpha)
    report["n_points"] = len(a)
    report["profile"] = prof.to_dict()
    cov = prof.coverage
    report["m_series"] = [[n, cov(n)] for n in range(0, cov.max_coverage + 1)]
    if args.horizon is not None:
        report["profile"]["coverage"]["m"] = list(cov.m[: args.horizon])
    for gspec, depth in f.cantor:
        report.setdefault("cantor", []).append({"g": gspec, "depth": depth, "table": _cantor_table(cov, parse_g(gspec), depth)})
    return report


def cmd_classify(args) -> dict:
    f = io.read_sequence(args.input)
    cls = args.cls
    w = parse_weights(args.weights, "v" if cls == "L" else "w")
    if cls in ("S", "L"):
        w.require_admissible()
    target = f.rings if f.purely_rings else f.expand()
    rep = class_membership(target, w, cls, args.alpha, args.horizon)
    return {"command": "classify", "class": cls, "weights": w.spec, "alpha": args.alpha, "result": rep.to_dict()}


def cmd_criteria(args) -> dict:
    g = parse_g(args.g)
    h = args.horizon or 200
    mode = args.mode
    out: dict = {"command": "criteria", "g": g.spec, "mode": mode}
    if mode == "B":
        rep = criterion_theoremB(g, h)
    elif mode in ("sum", "integral"):
        w = parse_weights(args.weights or "const:1")
        out["weights"] = w.spec
        rep = criterion_sum(g, w, h) if mode == "sum" else criterion_integral(g, w, h)
    elif mode == "limsup":
        v = parse_weights(args.weights or "const:1", "v")
        out["weights"] = v.spec
        if args.E is not None or args.C_fixed:
            rep = criterion_limsup(g, v, int(args.C or 1), _parse_E(args.E), h)
        else:
            rep = minorant_for_L(g, v, int(args.C or 4), args.E_budget, h)
        out["lstable"] = lstable_check(v, 2.0, h).to_dict()
    else:
        raise ValueError(f"unknown mode {mode!r}")
    out["result"] = rep.to_dict()
    return out


def _parse_E(text) -> tuple[int, ...]:
    if not text:
        return ()
    return tuple(int(x) for x in str(text).split(",") if x.strip())


def _witness_for(points: DiskSequence, targets, mu: CircleMeasure, zeros: DiskSequence, C_policy: str):
    h0 = np.atleast_1d(poisson_integral(mu, points.z)) if len(points) else np.zeros(0)
    if C_policy == "auto":
        C = calibrate_C(h0, targets) if len(points) else 1.0
    else:
        C = float(C_policy)
    w = HarmonicWitness(C, mu, zeros)
    return verify_minorant_witness(points, targets, w, h_values=h0)


def cmd_construct(args) -> tuple[dict, int]:
    g = parse_g(args.g)
    variant = args.variant
    out_dir = args.out
    report: dict = {"command": "construct", "variant": variant, "g": g.spec, "depth": args.depth, "alpha": args.alpha}
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    try:
        if variant == "lemma61":
            con = construct_lemma61(g, args.depth, args.margin)
            report["flags"] = con.flags
            report["levels"] = {"l": con.selection.l[: args.depth + 1], "A": con.split.b_levels}
            report["checks"] = check_lemma61(con, args.alpha)
            seq = concat(
                DiskSequence(con.p.rho, con.p.phi, np.full(len(con.p), io.TAG_P, dtype=np.int64)),
                DiskSequence(con.b.rho, con.b.phi, np.full(len(con.b), io.TAG_B, dtype=np.int64)),
            )
            mu = con.measure
            targets = np.atleast_1d(g.log_inv_g(con.p.rho)) if len(con.p) else np.zeros(0)
            wrep = _witness_for(con.p, targets, CircleMeasure.from_dyadic(mu), con.b, args.C or "auto")
            cov = coverage_distribution(seq, args.alpha)
            report["coverage_vs_target"] = _cantor_table(cov, g, args.depth)
        elif variant == "necessity-thm2":
            v = parse_weights(args.weights or "power:1,1", "v")
            con = construct_necessity_thm2(v, g, int(args.C_int or 1), _parse_E(args.E), args.depth, args.thicken, args.margin)
            report["flags"] = con.flags
            report["A"] = con.A
            report["E1"] = list(con.E1)
            report["g1"] = con.g1.spec
            report["checks"] = check_necessity(con, args.alpha)
            qt, bl = con.q_thick, con.blaschke_part
            seq = concat(
                DiskSequence(qt.rho, qt.phi, np.full(len(qt), io.TAG_P, dtype=np.int64)),
                DiskSequence(con.a_thick.rho, con.a_thick.phi, np.full(len(con.a_thick), io.TAG_A, dtype=np.int64)),
                DiskSequence(con.b_thick.rho, con.b_thick.phi, np.full(len(con.b_thick), io.TAG_B, dtype=np.int64)),
            )
            mu = con.base.measure
            targets = np.atleast_1d(g.log_inv_g(qt.rho)) if len(qt) else np.zeros(0)
            wrep = _witness_for(qt, targets, CircleMeasure.from_dyadic(mu), bl, args.C or "auto")
            if out_dir:
                io.write_sequence(
                    os.path.join(out_dir, "blaschke_part.jsonl"),
                    DiskSequence(bl.rho, bl.phi, np.full(len(bl), io.TAG_B, dtype=np.int64)),
                    {"role": "blaschke part", "g": g.spec},
                )
        elif variant == "rings":
            levels = [int(x) for x in (args.rings or "").split(",") if x.strip()]
            rings = ring_counterexample(levels, args.ring_rule)
            report["rings"] = {
                "levels": list(rings.ring_levels),
                "rule": rings.rule,
                "min_phi_lower_bound": rings.min_phi(args.alpha),
                "every_ring_covers": rings.every_ring_covers(args.alpha),
            }
            if out_dir:
                path = os.path.join(out_dir, "sequence.jsonl")
                rec = {"rings": list(rings.ring_levels)}
                if rings.rule:
                    rec["rule"] = rings.rule
                io.write_sequence(path, DiskSequence.empty(), {"variant": "rings"}, [rec])
                report["files"] = {"sequence": "sequence.jsonl"}
            return report, EXIT_OK
        else:
            raise ValueError(f"unknown variant {variant!r}")
    except ConstructionRefused as exc:
        report["refused"] = str(exc)
        report["certificate"] = exc.certificate
        return report, EXIT_REFUSED
    report["witness"] = wrep.to_dict()
    report["n_points"] = len(seq)
    if out_dir:
        io.write_sequence(os.path.join(out_dir, "sequence.jsonl"), seq, {"variant": variant, "g": g.spec, "depth": args.depth})
        io.write_measure(os.path.join(out_dir, "measure.json"), mu, {"variant": variant})
        report["files"] = {"sequence": "sequence.jsonl", "measure": "measure.json"}
    return report, EXIT_OK


def cmd_verify(args) -> dict:
    g = parse_g(args.g)
    f = io.read_sequence(args.input)
    a = f.expand()
    tags = a.tags if a.tags is not None else np.zeros(len(a), dtype=np.int64)
    pts = a.subset(tags == io.TAG_P)
    zeros = a.subset(tags != io.TAG_P)
    if args.measure:
        mu, _ = io.read_measure(args.measure)
        cm = CircleMeasure.from_dyadic(mu)
    else:
        cm = CircleMeasure.atoms([0.0], [1.0])
    targets = np.atleast_1d(g.log_inv_g(pts.rho)) if len(pts) else np.zeros(0)
    wrep = _witness_for(pts, targets, cm, zeros, args.C or "auto")
    return {"command": "verify", "g": g.spec, "n_points": len(pts), "n_zeros": len(zeros), "witness": wrep.to_dict()}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ntdecay", description="Nontangential counting and essential minorants.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="Stolz aperture")
        p.add_argument("--horizon", type=int, default=None)
        p.add_argument("--out", default=None, help="report path (construct: output directory)")

    p = sub.add_parser("analyze", help="separation, Blaschke sum and m_a(n) of a sequence file")
    p.add_argument("--input", required=True)
    common(p)

    p = sub.add_parser("classify", help="membership in S_w, L_v or P_w")
    p.add_argument("--input", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--class", dest="cls", choices=["S", "L", "P"], required=True)
    common(p)

    p = sub.add_parser("criteria", help="essential-minorant criteria for a decrease function")
    p.add_argument("--g", required=True)
    p.add_argument("--weights", default=None)
    p.add_argument("--mode", choices=["B", "sum", "integral", "limsup"], default="B")
    p.add_argument("--C", type=int, default=None, help="limsup: largest C searched (or the C used with --E)")
    p.add_argument("--C-fixed", dest="C_fixed", action="store_true", help="limsup: test the single instance C, E")
    p.add_argument("--E", default=None, help="comma separated exceptional indices")
    p.add_argument("--E-budget", dest="E_budget", type=float, default=1.0)
    common(p)

    p = sub.add_parser("construct", help="Cantor construction, necessity construction or rings")
    p.add_argument("--g", default="power:1")
    p.add_argument("--depth", type=int, default=15)
    p.add_argument("--variant", choices=["lemma61", "necessity-thm2", "rings"], default="lemma61")
    p.add_argument("--weights", default=None, help="v for necessity-thm2")
    p.add_argument("--C", default=None, help="witness scale: 'auto' or a number")
    p.add_argument("--C-int", dest="C_int", type=int, default=1, help="index dilation C for necessity-thm2")
    p.add_argument("--E", default=None)
    p.add_argument("--thicken", type=int, default=4)
    p.add_argument("--margin", type=int, default=8)
    p.add_argument("--rings", default=None)
    p.add_argument("--ring-rule", dest="ring_rule", default=None, choices=["pow2", "linear"])
    common(p)

    p = sub.add_parser("verify", help="check C P[mu](a_k) >= log 1/g(|a_k|)")
    p.add_argument("--input", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--measure", default=None)
    p.add_argument("--C", default=None, help="'auto' (calibrate) or a number")
    common(p)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "construct":
            report, code = cmd_construct(args)
            path = os.path.join(args.out, "report.json") if args.out else None
            io.write_report(report, path)
            return code
        handler = {"analyze": cmd_analyze, "classify": cmd_classify, "criteria": cmd_criteria, "verify": cmd_verify}[args.command]
        report = handler(args)
    except (ValueError, OSError) as exc:
        print(f"ntdecay: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    io.write_report(report, args.out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
