"""Measured weak-L1 constant sup_lambda lambda |{p* > lambda}| across depths.

Usage: python scripts/weak_l1_depths.py [--g power:1,poly:0.5] [--depths 10,12,...]
The values g~(level) are attached to the construction's points.
"""

import argparse

from ntdecay.classes import parse_g
from ntdecay.construction import construct_lemma61
from ntdecay.counting import maximal_distribution


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g", default="power:1,poly:0.5,log:1")
    ap.add_argument("--depths", default="10,12,14,16,18")
    args = ap.parse_args()
    depths = [int(x) for x in args.depths.split(",")]
    specs = []
    for part in args.g.split(","):
        # family parameters also use commas; re-join pieces that lack a family name
        if ":" in part or not specs:
            specs.append(part)
        else:
            specs[-1] += "," + part
    for spec in specs:
        g = parse_g(spec)
        consts = []
        for N in depths:
            con = construct_lemma61(g, N)
            vals = con.selection.gt[con.points.levels()]
            consts.append(maximal_distribution(con.points, vals).weak_l1_constant())
        spread = (max(consts) - min(consts)) / max(consts)
        row = " ".join(f"{c:8.3f}" for c in consts)
        print(f"{spec:>12}: {row}   variation {spread:.1%}")


if __name__ == "__main__":
    main()
