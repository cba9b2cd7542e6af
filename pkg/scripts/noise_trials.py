"""Surviving critical-path fraction under random edge deletion, per seed."""

import argparse
from fractions import Fraction
from statistics import mean, pstdev

from steiner_shortcuts.hesse import HesseParams, build_family
from steiner_shortcuts.noise import census_trials, expected_survival, NoiseSpec


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--r", type=int, default=2)
    ap.add_argument("--ell", type=int, default=2)
    ap.add_argument("--p", type=Fraction, default=None, help="deletion probability (default 1/(k*ell))")
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()
    params = HesseParams(args.k, args.d, args.r, args.ell)
    p = args.p if args.p is not None else Fraction(1, args.k * args.ell)
    g, crit = build_family(params)
    rows = census_trials(g, crit, p, range(args.seeds))
    fractions = [float(Fraction(row["fraction"])) for row in rows]
    for row, f in zip(rows, fractions):
        print(f"seed {row['seed']:3d}  surviving {row['surviving']:6d}/{row['total']}  {f:.4f}")
    expected = expected_survival(NoiseSpec(p), params.k * params.ell)
    print(f"mean {mean(fractions):.4f}  sd {pstdev(fractions):.4f}  expected {float(expected):.4f}")


if __name__ == "__main__":
    main()
