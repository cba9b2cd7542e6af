"""Closed-form sizes of the lattice family and its Steiner shortcut over a
parameter grid, optionally verifying the smallest instances."""

import argparse
import itertools
from fractions import Fraction

from steiner_shortcuts.attack import base_edge_count_formula, build_attack, shortcut_edge_count_formula, verify_attack
from steiner_shortcuts.graph import materialize_cap
from steiner_shortcuts.hesse import HesseParams, build_family


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--r", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--ell", type=int, nargs="+", default=[1, 2, 4])
    ap.add_argument("--verify-below", type=int, default=20_000,
                    help="run the full verification when the graph has fewer vertices")
    args = ap.parse_args()
    print("k d r ell  vertices  base_edges  shortcut_edges  ratio  verified")
    for k, d, r, ell in itertools.product(args.k, args.d, args.r, args.ell):
        p = HesseParams(k, d, r, ell)
        base = base_edge_count_formula(p)
        short = sum(shortcut_edge_count_formula(p).values())
        verified = "-"
        if p.num_vertices < min(args.verify_below, materialize_cap()):
            g, crit = build_family(p)
            verified = "pass" if verify_attack(g, build_attack(p, g), crit, "sample:200").passed else "FAIL"
        ratio = Fraction(short, base)
        print(f"{k} {d} {r} {ell:3d}  {p.num_vertices:8d}  {base:10d}  {short:14d}  {float(ratio):.3f}  {verified}")


if __name__ == "__main__":
    main()
