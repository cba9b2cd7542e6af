"""Tabulate the number of critical subdirections Δ(r, d) and time the hull."""

import argparse
import time

from steiner_shortcuts.lattice import extreme_points


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--max-r", type=int, default=30)
    args = ap.parse_args()
    for d in args.dims:
        top = args.max_r if d == 2 else min(args.max_r, 8)
        print(f"d={d}")
        for r in range(1, top + 1):
            t0 = time.perf_counter()
            count = len(extreme_points(r, d))
            print(f"  r={r:3d}  delta={count:5d}  {1000 * (time.perf_counter() - t0):8.1f} ms")


if __name__ == "__main__":
    main()
