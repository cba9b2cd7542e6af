"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 a
resource cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import circuits as circ
from .analysis import (
    assign_critical_shortest_paths,
    critical_diameter,
    efficiency,
    normalize,
    tc_equivalent,
    thickness,
    UNBOUNDED,
    volume_check,
)
from .errors import ContractViolation, ParameterError, ResourceError
from .experiments import (
    ExperimentConfig,
    all_preset_names,
    graph_from_coding,
    preset,
    run,
    run_hesse_attack,
    run_wxx_study,
)
from .graph import ExplicitGraph, materialize
from .hesse import Check, CriticalSet, HesseGraph, validate_family
from .lattice import extreme_points
from .noise import NoiseSpec, apply_noise, survival_census, surviving_edges
from .reports import (
    Report,
    dumps,
    explicit_graph_from_json,
    graph_to_json,
    shortcut_from_json,
    shortcut_to_json,
)
from .shortcut import AugmentedGraph
from .wxx import WxxCriticals, WxxGraph

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


VERIFY_CHECKS = ("tc", "diameter", "thickness", "volume", "efficiency", "uniqueness")


class UsageError(Exception):
    pass


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _family_params(args) -> dict:
    if args.family == "wxx":
        return {"r": args.r, "identity_edges": not args.no_identity}
    k = 1 if args.family == "g1" else args.k
    return {"k": k, "d": args.d, "r": args.r, "ell": args.ell}


def _finish(report: Report, args) -> int:
    if getattr(args, "timing", False):
        report.runtime_ms = int((time.perf_counter() - args._t0) * 1000)
    _write(report.to_json(), getattr(args, "report", None))
    return EXIT_PASS if report.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    cfg = ExperimentConfig("gen", args.family, _family_params(args), seed=0)
    report = run(cfg)
    if args.out:
        g = graph_from_coding({"family": args.family, **cfg.params})
        Path(args.out).write_text(dumps(graph_to_json(g, include_edges=args.materialize)))
    return _finish(report, args)


def cmd_attack(args) -> int:
    cfg = ExperimentConfig("attack", args.family, _family_params(args), args.mode, args.seed)
    if args.family == "wxx":
        report, sc = run_wxx_study(cfg)
    else:
        report, sc = run_hesse_attack(cfg)
    if args.out:
        Path(args.out).write_text(dumps(shortcut_to_json(sc)))
    return _finish(report, args)


def _criticals_for(g):
    if isinstance(g, HesseGraph):
        return CriticalSet(g)
    if isinstance(g, WxxGraph):
        return WxxCriticals(g)
    return None


def _pairs(crit, mode: str, seed: int) -> list[tuple[int, int]]:
    if mode == "full":
        return [(p.s, p.t) for p in crit.pairs()]
    n = int(mode.split(":", 1)[1])
    return [(p.s, p.t) for p in crit.sample(n, seed)]


def cmd_verify(args) -> int:
    gdata = _load(args.graph)
    coding = gdata.get("coding", {})
    if coding.get("family") in ("hesse", "g1", "wxx"):
        g = graph_from_coding(coding)
    elif "edges" in gdata:
        g = explicit_graph_from_json(gdata)
    else:
        raise UsageError("graph file carries neither a known coding nor an edge list")
    crit = _criticals_for(g)
    checks_wanted = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in checks_wanted if c not in VERIFY_CHECKS]
    if unknown:
        raise UsageError(f"unknown check {unknown[0]!r}; choose from {', '.join(VERIFY_CHECKS)}")
    if not checks_wanted:
        raise UsageError("no checks requested")
    cfg = ExperimentConfig("verify", coding.get("family"), dict(coding), args.mode, args.seed,
                           {"checks": checks_wanted, "shortcut": bool(args.shortcut)})
    report = Report(cfg.as_dict(), {"vertices": g.n})
    g_plus = g
    sc = None
    if args.shortcut:
        try:
            sc = shortcut_from_json(_load(args.shortcut))
        except (KeyError, TypeError, ValueError, ContractViolation) as exc:
            raise UsageError(f"malformed shortcut file {args.shortcut}: {exc}") from exc
        if sc.base_n != g.n:
            raise UsageError(f"shortcut expects {sc.base_n} original vertices, graph has {g.n}")
        g_plus = AugmentedGraph(g, sc)
        report.counts.update({"steiner_vertices": sc.num_steiner, "shortcut_edges": sc.num_edges()})
    fam = coding.get("family")
    k = coding.get("k", 1)
    target = None
    if sc is not None:
        target = 2 if fam == "wxx" else k
    elif fam in ("hesse", "g1"):
        target = k * coding["ell"]
    elif fam == "wxx":
        target = 2 * coding["r"]
    pairs = _pairs(crit, args.mode, args.seed) if crit is not None else []
    if crit is not None:
        report.counts["critical_pairs"] = len(crit)
    for name in checks_wanted:
        if name == "tc":
            res = tc_equivalent(g, g_plus, args.mode, args.seed)
            wit = [] if res.equal else [{"u": res.witness[0], "v": res.witness[1]}]
            mode = "full" if res.mode == "full" else f"sample:{res.sources_checked}"
            report.add([Check("tc_equal", mode, res.equal, value=res.sources_checked, witnesses=wit)])
        elif name == "diameter":
            if crit is None:
                raise UsageError("diameter needs a family with critical pairs")
            try:
                diam = critical_diameter(g_plus, pairs)
                ok = target is None or diam <= target
                report.add([Check("diameter", args.mode, ok, value=diam, bound=target,
                                  witnesses=[] if ok else [{"diameter": diam}])])
            except ContractViolation as exc:
                report.add([Check("diameter", args.mode, False, witnesses=[{"error": str(exc)}])])
        elif name == "thickness":
            t = thickness(g_plus)
            bound = target if sc is not None else 1
            ok = t != UNBOUNDED and t <= bound
            shown = "unbounded" if t == UNBOUNDED else t
            report.add([Check("thickness", "full", ok, value=shown, bound=bound,
                              witnesses=[] if ok else [{"thickness": shown}])])
        elif name in ("volume", "efficiency"):
            if not isinstance(g, HesseGraph) or sc is None:
                report.add([Check(name, "informational", True, value="not applicable")])
                continue
            try:
                assignment = assign_critical_shortest_paths(g_plus, pairs)
            except ContractViolation as exc:
                report.add([Check(name, args.mode, False, witnesses=[{"error": str(exc)}])])
                continue
            if name == "volume":
                bound = g.params.delta ** g.k
                vol = volume_check(g_plus, assignment, bound)
                report.add([Check("volume", args.mode, vol.passed, value=vol.max_paths, bound=bound,
                                  witnesses=[] if vol.passed else [{"vertex": vol.argmax}])])
            else:
                comps = normalize(g, g_plus, g.k)
                table = [{"layers": list(c.key), "edges": len(c), "efficiency": efficiency(c, assignment, g)}
                         for c in comps]
                report.extra["components"] = table
                report.add([Check("efficiency", "informational", bool(comps), value=len(comps))])
        elif name == "uniqueness":
            if not isinstance(g, HesseGraph):
                raise UsageError("uniqueness applies to the lattice families")
            mode = "exhaustive" if args.mode == "full" else args.mode
            report.add(validate_family(g, crit, mode, args.seed).checks, "family")
    return _finish(report, args)


def cmd_noise(args) -> int:
    gdata = _load(args.graph)
    g = graph_from_coding(gdata.get("coding", {}))
    if not isinstance(g, HesseGraph):
        raise UsageError("noise runs on the lattice families")
    crit = CriticalSet(g)
    if args.p == "auto":
        p = Fraction(1, g.k * g.params.ell)
    else:
        try:
            p = Fraction(args.p)
        except ValueError as exc:
            raise UsageError(f"bad probability {args.p!r}") from exc
    config = {"command": "noise", "coding": gdata.get("coding"), "p": str(p), "seed": args.seed,
              "trials": args.trials, "census": args.census}
    out = []
    for t in range(args.trials):
        spec = NoiseSpec(p, args.seed + t)
        noised = apply_noise(g, spec)
        row = {"config": config, "trial": t, "seed": spec.seed,
               "surviving_edges": len(surviving_edges(noised, workers=args.workers))}
        if args.census:
            row["census"] = survival_census(noised, crit).as_dict()
        out.append(json.dumps(row, sort_keys=True))
    _write("\n".join(out) + "\n", getattr(args, "report", None))
    return EXIT_PASS


def cmd_circuit(args) -> int:
    if args.action == "from-graph":
        gdata = _load(args.files[0])
        g = explicit_graph_from_json(gdata) if "edges" in gdata else graph_from_coding(gdata["coding"])
        if not isinstance(g, ExplicitGraph):
            g = materialize(g)
        c = circ.graph_to_circuit(g)
        _write(dumps(c), args.out)
        return EXIT_PASS
    if args.action == "layer":
        c = circ.OrCircuit.from_dict(_load(args.files[0]))
        _write(dumps(circ.layer_circuit(c)), args.out)
        return EXIT_PASS
    if args.action == "equiv":
        if len(args.files) != 2:
            raise UsageError("equiv needs two circuit files")
        a, b = (circ.OrCircuit.from_dict(_load(f)) for f in args.files)
        try:
            same = circ.circuits_equivalent(a, b)
        except ContractViolation as exc:
            raise UsageError(str(exc)) from exc
        diff = None if same else circ.first_difference(a, b)
        report = Report({"command": "circuit equiv", "files": list(args.files)})
        report.add([Check("equivalent", "full", same,
                          witnesses=[] if same else [{"input": diff[0] + 1, "output": diff[1] + 1}])])
        return _finish(report, args)
    if args.action == "roundtrip":
        cfg = ExperimentConfig("circuit-roundtrip", None,
                               {"count": args.count, "max_n": args.max_n, "density": args.density},
                               "full", args.seed)
        return _finish(run(cfg), args)
    raise UsageError(f"unknown circuit action {args.action!r}")


def cmd_preset(args) -> int:
    if args.list or not args.name:
        _write("\n".join(all_preset_names()) + "\n", None)
        return EXIT_PASS
    return _finish(run(preset(args.name)), args)


def cmd_lattice(args) -> int:
    pts = extreme_points(args.r, args.d)
    _write(json.dumps([list(p) for p in pts]) + "\n", getattr(args, "report", None))
    return EXIT_PASS


# --------------------------------------------------------------------------
# parser


def _add_family_args(p: argparse.ArgumentParser, with_k: bool = True) -> None:
    if with_k:
        p.add_argument("--k", type=int, default=2)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--no-identity", action="store_true", help="omit identity edges (wxx)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="record runtime_ms in the report")
    parser = argparse.ArgumentParser(prog="steiner-shortcuts", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    gen = sub.add_parser("gen", parents=[common], help="generate a family and report its counts")
    gen.add_argument("family", choices=["hesse", "g1", "wxx"])
    _add_family_args(gen)
    gen.add_argument("--materialize", action="store_true", help="include the edge list in --out")
    gen.add_argument("--out", help="graph JSON path")
    gen.set_defaults(func=cmd_gen)

    att = sub.add_parser("attack", parents=[common], help="build and verify the Steiner shortcut")
    att.add_argument("family", choices=["hesse", "wxx"])
    _add_family_args(att)
    att.add_argument("--mode", default="full")
    att.add_argument("--seed", type=int, default=0)
    att.add_argument("--out", help="shortcut JSON path")
    att.set_defaults(func=cmd_attack)

    ver = sub.add_parser("verify", parents=[common], help="run checks on a graph and optional shortcut")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--shortcut")
    ver.add_argument("--checks", default="tc,diameter,thickness")
    ver.add_argument("--mode", default="full")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)

    noi = sub.add_parser("noise", parents=[common], help="random edge deletion trials")
    noi.add_argument("--graph", required=True)
    noi.add_argument("--p", default="auto")
    noi.add_argument("--seed", type=int, default=0)
    noi.add_argument("--trials", type=int, default=1)
    noi.add_argument("--census", action="store_true")
    noi.add_argument("--workers", type=int, default=1)
    noi.set_defaults(func=cmd_noise)

    cir = sub.add_parser("circuit", parents=[common], help="OR-circuit transforms")
    cir.add_argument("action", choices=["from-graph", "layer", "equiv", "roundtrip"])
    cir.add_argument("files", nargs="*")
    cir.add_argument("--out")
    cir.add_argument("--count", type=int, default=50)
    cir.add_argument("--max-n", type=int, default=40)
    cir.add_argument("--density", type=float, default=0.1)
    cir.add_argument("--seed", type=int, default=1)
    cir.set_defaults(func=cmd_circuit)

    pre = sub.add_parser("preset", parents=[common], help="run a named acceptance preset")
    pre.add_argument("name", nargs="?")
    pre.add_argument("--list", action="store_true")
    pre.set_defaults(func=cmd_preset)

    lat = sub.add_parser("lattice", parents=[common], help="dump the extreme points of the lattice ball")
    lat.add_argument("--r", type=int, required=True)
    lat.add_argument("--d", type=int, required=True)
    lat.set_defaults(func=cmd_lattice)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    try:
        return args.func(args)
    except (UsageError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ContractViolation as exc:
        # malformed input files (cyclic circuits, out-of-range edges)
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
