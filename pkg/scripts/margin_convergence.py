"""Witness scale C and minimum margin of the Cantor construction versus depth.

Usage: python scripts/margin_convergence.py [--g power:1] [--depths 8,10,12,14,16]
Prints one row per depth; the margins should settle as the depth grows.
"""

import argparse
import time

from ntdecay.classes import parse_g
from ntdecay.construction import construct_lemma61
from ntdecay.potential import lemma_witness


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g", default="power:1")
    ap.add_argument("--depths", default="8,10,12,14,16")
    args = ap.parse_args()
    g = parse_g(args.g)
    print(f"{'depth':>5} {'points':>8} {'C':>6} {'min margin':>11} {'violations':>10} {'seconds':>8}")
    for N in (int(x) for x in args.depths.split(",")):
        t0 = time.perf_counter()
        con = construct_lemma61(g, N)
        w, rep = lemma_witness(con)
        print(f"{N:>5} {rep.n_points:>8} {w.C:>6g} {rep.min_margin:>11.4f} {rep.violations:>10} {time.perf_counter() - t0:>8.2f}")


if __name__ == "__main__":
    main()
