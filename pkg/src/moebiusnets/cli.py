"""Command-line front end: seeds, fills, verification, export, demos.

Exit codes: 0 when all hard checks pass, 1 for verification or completion
failures, 2 for malformed configuration or input files.  Reports are written
as JSON plus delimited text, with figures rendered alongside unless
--no-figures is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .algebra import AlgebraError, conformal_algebra
from .moebius import GeometryError, ConformalPoint, lift, project
from .lattice import Lattice, PairNet, nets_from_frames
from .cauchy import (
    complete_cell_3d,
    fill_lattice,
    fill_pair_lattice,
    hypercube_fill,
    seed_grid,
    seed_random_circular,
)
from .verify import verify_net
from . import netfile
from .netfile import FileFormatError

CONFIG_SCHEMA = "moebiusnets/config-v1"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moebiusnets",
        description="Discrete Ribaucour pairs of circular nets in the conformal model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; explicit flags override its values")
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    g = sub.add_parser("generate", help="generate a seed net or initial data")
    common(g)
    g.add_argument("--seed", choices=("grid", "random-circular"), required=True)
    g.add_argument("--m", type=int, default=3, help="lattice dimension")
    g.add_argument("--n", type=int, default=3, help="ambient sphere dimension")
    g.add_argument("--extent", type=int, nargs="+", default=[5], help="vertices per axis")
    g.add_argument("--spacing", type=float, nargs="+", default=[1.0], help="grid spacings per axis")
    g.add_argument("--rng-seed", type=int, default=0)
    g.add_argument("--jitter", type=float, default=0.05)
    g.add_argument("--angle-lo", type=float, default=-0.08)
    g.add_argument("--angle-hi", type=float, default=0.08)
    g.add_argument("--out", required=True, help="output net file (grid) or initial-data file")

    f = sub.add_parser("fill", help="complete a lattice from initial data")
    common(f)
    f.add_argument("--init", required=True, help="initial-data file")
    f.add_argument("--out", required=True, help="output net file")
    f.add_argument("--report-stem", default=None, help="write report files with this stem")
    f.add_argument("--pair", action="store_true", help="reconstruct frames and edge spheres as well")

    v = sub.add_parser("verify", help="verify a net file against the invariants")
    common(v)
    v.add_argument("net", help="net file")
    v.add_argument("--report-stem", default=None)
    v.add_argument("--tol", type=float, default=None, help="override every tolerance at once")

    e = sub.add_parser("export", help="export coordinate-surface quad meshes")
    common(e)
    e.add_argument("net", help="net file")
    e.add_argument("--format", choices=("obj",), default="obj")
    e.add_argument("--out-dir", required=True)
    e.add_argument("--stem", default="net")

    d = sub.add_parser("demo", help="run a built-in demonstration")
    common(d)
    d.add_argument("name", choices=("miquel", "permutability", "grid"))
    d.add_argument("--out-dir", default="demo_out")
    return parser


def _config_path(argv):
    for k, arg in enumerate(argv):
        if arg == "--config":
            return argv[k + 1] if k + 1 < len(argv) else None
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def _apply_config(parser, argv):
    """Load --config defaults before parsing; unknown keys are fatal."""
    config = _config_path(argv)
    if config is None:
        return parser.parse_args(argv)
    doc = netfile._load_json(config)
    if doc.get("schema") != CONFIG_SCHEMA:
        raise FileFormatError(f"{config}: expected schema {CONFIG_SCHEMA}")
    command = argv[0]
    sub_actions = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub_actions.choices[command]
    known = {a.dest for a in subparser._actions}
    defaults = {}
    for key, value in doc.items():
        if key in ("schema", "command"):
            if key == "command" and value != command:
                raise FileFormatError(f"{config}: config is for command {value!r}, not {command!r}")
            continue
        dest = key.replace("-", "_")
        if dest not in known:
            raise FileFormatError(f"{config}: unknown key {key!r}")
        defaults[dest] = value
    subparser.set_defaults(**defaults)
    for action in subparser._actions:
        if action.dest in defaults:
            action.required = False
    return parser.parse_args(argv)


def _write_reports(report, stem, figures: bool, net=None) -> None:
    if stem is None:
        return
    stem = Path(stem)
    stem.parent.mkdir(parents=True, exist_ok=True)
    netfile.save_report(report, stem.with_suffix(".json"), stem.with_suffix(".csv"))
    if figures:
        from . import figures as figmod

        figmod.render_report(report, stem.with_suffix(".png"))
        if net is not None:
            figmod.render_net(net, stem.parent / (stem.name + "_net.png"))


def _print_report(report) -> None:
    for line in report.summary_lines():
        print(line)
    print("overall:", "PASS" if report.passed else "FAIL")
    failure = report.first_failure()
    if failure is not None:
        print(f"first failure: {failure.name} at {failure.worst_at or 'n/a'}")


def cmd_generate(args) -> int:
    extents = tuple(args.extent if len(args.extent) > 1 else args.extent * args.m)
    if args.seed == "grid":
        spacings = tuple(args.spacing if len(args.spacing) > 1 else args.spacing * args.m)
        frames = seed_grid(args.m, args.n, spacings, extents)
        net = nets_from_frames(frames)
        netfile.save_net(net, args.out)
        print(f"grid net {extents} written to {args.out}")
        if not args.no_figures:
            from . import figures as figmod

            figmod.render_net(net, Path(args.out).with_suffix(".png"))
        return 0
    init = seed_random_circular(
        args.m, args.n, extents, args.rng_seed,
        angle_range=(args.angle_lo, args.angle_hi), jitter=args.jitter,
    )
    netfile.save_initial_data(init, args.out)
    print(f"random circular initial data {extents} (seed {args.rng_seed}) written to {args.out}")
    return 0


def cmd_fill(args) -> int:
    init = netfile.load_initial_data(args.init)
    if args.pair or init.hat_points:
        net, fill_report = fill_pair_lattice(init)
    else:
        net, fill_report = fill_lattice(init)
    netfile.save_net(net, args.out)
    report = verify_net(net, fill_report=fill_report)
    print(f"filled net written to {args.out}")
    _print_report(report)
    _write_reports(report, args.report_stem, not args.no_figures, net)
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    net = netfile.load_net(args.net)
    overrides = None
    if args.tol is not None:
        from .verify import DEFAULT_TOLERANCES

        overrides = {k: args.tol for k in DEFAULT_TOLERANCES}
    report = verify_net(net, tolerances=overrides)
    _print_report(report)
    _write_reports(report, args.report_stem, not args.no_figures, net)
    return 0 if report.passed else 1


def cmd_export(args) -> int:
    net = netfile.load_net(args.net)
    written = netfile.export_quad_meshes(net, args.out_dir, args.stem)
    print(f"wrote {len(written)} quad-mesh files to {args.out_dir}")
    return 0


def _demo_miquel(out_dir: Path, figures: bool) -> int:
    alg = conformal_algebra(3)
    corners = {
        (0, 0, 0): [0, 0, 0], (1, 0, 0): [1, 0, 0], (0, 1, 0): [0, 1, 0], (0, 0, 1): [0, 0, 1],
        (1, 1, 0): [1, 1, 0], (1, 0, 1): [1, 0, 1], (0, 1, 1): [0, 1, 1],
    }
    pts = {t: lift(alg, c) for t, c in corners.items()}
    completed, residual = complete_cell_3d(
        pts[(0, 0, 0)], pts[(1, 0, 0)], pts[(0, 1, 0)], pts[(0, 0, 1)],
        pts[(1, 1, 0)], pts[(1, 0, 1)], pts[(0, 1, 1)],
    )
    coords = project(completed)
    error = float(np.linalg.norm(coords - np.ones(3)))
    print(f"unit cube: completed vertex {np.array2string(coords, precision=12)}")
    print(f"circle incidence residual {residual:.3e}, distance to (1,1,1): {error:.3e}")
    pts[(1, 1, 1)] = completed
    einf_pt = ConformalPoint(alg.einf, "projective", validate=False)
    net = PairNet(Lattice((2, 2, 2)), pts, {t: einf_pt for t in pts}, euclidean=True)
    netfile.save_net(net, out_dir / "miquel_net.json")
    report = verify_net(net)
    _print_report(report)
    _write_reports(report, out_dir / "miquel_report", figures, net)
    return 0 if (report.passed and error < 1e-10) else 1


def _demo_permutability(out_dir: Path, figures: bool) -> int:
    init = seed_random_circular(4, 3, (2, 2, 2, 2), rng_seed=2026)
    net, fill_report = hypercube_fill(4, 2, init.points)
    spread = fill_report.max_discrepancy()
    print(f"4-cube filled from its 2-cells; {len(fill_report.discrepancies)} multiply determined "
          f"vertices agree to {spread:.3e}")
    netfile.save_net(net, out_dir / "permutability_net.json")
    report = verify_net(net, fill_report=fill_report)
    _print_report(report)
    _write_reports(report, out_dir / "permutability_report", figures, net)
    return 0 if report.passed else 1


def _demo_grid(out_dir: Path, figures: bool) -> int:
    extents = (5, 5, 5)
    frames = seed_grid(3, 3, (1.0, 1.0, 1.0), extents)
    net = nets_from_frames(frames)
    worst = 0.0
    for t in net.lattice.vertices():
        worst = max(worst, float(np.abs(project(net.f[t]) - np.array(t, float)).max()))
    print(f"grid seed: projection matches the integer grid to {worst:.3e}")
    netfile.save_net(net, out_dir / "grid_net.json")
    report = verify_net(net)
    _print_report(report)
    _write_reports(report, out_dir / "grid_report", figures, net)
    return 0 if (report.passed and worst < 1e-12) else 1


def cmd_demo(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runner = {"miquel": _demo_miquel, "permutability": _demo_permutability, "grid": _demo_grid}[args.name]
    return runner(out_dir, not args.no_figures)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = _apply_config(parser, argv)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    handlers = {
        "generate": cmd_generate,
        "fill": cmd_fill,
        "verify": cmd_verify,
        "export": cmd_export,
        "demo": cmd_demo,
    }
    try:
        return handlers[args.command](args)
    except FileFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (GeometryError, AlgebraError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
