"""Command-line front end: ``dpm analyze|curves|mesh|table|sweep|sync``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any

import numpy as np

from . import __version__
from .builder import (
    BuildError,
    Configuration,
    PolyhedronKind,
    build_mechanism,
    gamma_max,
    known_discrepancies,
    table1_rows,
)
from .kinematics import (
    VOLUME_CONVENTION,
    circumsphere_radius,
    configuration_geometry,
    insphere_radius,
    volume,
)
from .mobility import (
    MobilityError,
    compute_mobility,
    integrate_motion,
    sweep_rank,
    synchronization_check,
)
from .screw import DEFAULT_TOL, ScrewError

SCHEMA_VERSION = "1"
SYNC_BOUND = 1e-6  # rad, fold-angle spread and mid-joint error along the trajectory


class UsageError(Exception):
    """Bad argument value detected after parsing (exit 2)."""


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _round(obj: Any) -> Any:
    """Floats to 12 significant digits so output is byte-stable."""
    if isinstance(obj, float) or isinstance(obj, np.floating):
        x = float(obj)
        return x if not math.isfinite(x) else float(_fmt(x))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _radians(args: argparse.Namespace) -> dict[str, float | None]:
    """The single degrees -> radians boundary for every angle flag."""
    out: dict[str, float | None] = {}
    for name, value in vars(args).items():
        if name.endswith("_deg"):
            if value is not None and not math.isfinite(value):
                raise UsageError(f"--{name.replace('_', '-')} must be finite")
            out[name[:-4]] = None if value is None else math.radians(value)
    return out


def _kind(text: str) -> PolyhedronKind:
    try:
        return PolyhedronKind.parse(text)
    except BuildError as exc:
        raise UsageError(str(exc)) from None


def _default_tol() -> float:
    raw = os.environ.get("DPM_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"DPM_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError("DPM_TOL must be positive")
    return tol


def _document(command: str, args: argparse.Namespace, payload: dict, notes=()) -> dict:
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    return {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "arguments": echo,
        "result": payload,
        "notes": list(notes),
        "discrepancies": known_discrepancies(),
    }


def _dump_json(doc: dict) -> str:
    return json.dumps(_round(doc), indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# verbs

def cmd_analyze(args) -> int:
    ang = _radians(args)
    kind = _kind(args.polyhedron)
    config = Configuration(ang["phi"], args.a, ang["gamma"])
    graph, frames = build_mechanism(kind, args.a, ang["gamma"], ang["phi"])
    rep = compute_mobility(graph, frames, config, args.method, args.tol)
    payload = rep.to_dict()
    payload.update(
        n_links=graph.n_links if args.method == "original" else graph.n_platforms,
        n_loops=graph.loop_count if args.method == "original" else graph.equivalent().loop_count,
        n_sarrus=graph.n_units,
        gamma_deg=math.degrees(config.gamma if config.gamma is not None else gamma_max(kind)),
    )
    notes = payload.pop("notes")
    if args.format == "csv":
        keys = ["kind", "method", "phi_deg", "n_joints", "matrix_rows", "matrix_cols",
                "rank", "mobility", "tol"]
        _emit(_csv(keys + ["notes"], [[payload[k] for k in keys] + [" | ".join(notes)]]),
              args.out)
    else:
        _emit(_dump_json(_document("analyze", args, payload, notes)), args.out)
    return 0


def cmd_curves(args) -> int:
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    if not args.a > 0:
        raise UsageError("--a must be positive")
    rows = []
    for k in range(args.samples):
        deg = 90.0 * k / (args.samples - 1)
        phi = math.radians(deg)
        rows.append([deg, insphere_radius(args.a, phi), circumsphere_radius(args.a, phi),
                     volume(args.a, phi)])
    if args.format == "json":
        payload = {"columns": ["phi_deg", "r", "R", "V"], "rows": rows,
                   "volume_convention": VOLUME_CONVENTION}
        _emit(_dump_json(_document("curves", args, payload)), args.out)
    else:
        _emit(_csv(["phi_deg", "r", "R", "V"], rows), args.out)
    return 0


def obj_text(mesh, header: list[str]) -> str:
    lines = [f"# {h}" for h in header]
    lines += [f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in mesh.vertices]
    for label in ("platform", "limb", "newface"):
        faces = mesh.faces_with(label)
        if faces:
            lines.append(f"g {label}")
            lines += ["f " + " ".join(str(i + 1) for i in f) for f in faces]
    return "\n".join(lines) + "\n"


def cmd_mesh(args) -> int:
    ang = _radians(args)
    kind = _kind(args.polyhedron)
    mesh = configuration_geometry(kind, args.a, ang["gamma"], ang["phi"]).compact()
    counts = mesh.label_counts()
    header = [
        f"{kind.label} a={_fmt(args.a)} phi_deg={_fmt(args.phi_deg)}",
        f"vertices={len(mesh.vertices)} faces={len(mesh.faces)} "
        + " ".join(f"{k}={v}" for k, v in counts.items()),
    ]
    if args.format == "json":
        payload = {"kind": kind.label, "vertices": len(mesh.vertices), "faces": len(mesh.faces),
                   "labels": counts, "watertight": mesh.is_watertight(),
                   "volume": mesh.volume(), "max_radius": mesh.max_radius()}
        _emit(_dump_json(_document("mesh", args, payload)), args.out)
    else:
        _emit(obj_text(mesh, header), args.out)
    return 0


def cmd_table(args) -> int:
    if args.prism_max < 3:
        raise UsageError("--prism-max must be >= 3")
    rows = []
    for row in table1_rows(range(3, args.prism_max + 1)):
        beta = " ".join(f"{b:g}_({m},{n})" for b, (m, n) in row.beta)
        rows.append([
            row.kind.name, row.kind.n if row.kind.n is not None else "",
            row.n_sarrus, row.n_link, row.n_joint, beta,
            "" if row.gamma_max is None else f"{row.gamma_max:.2f}",
            f"{math.degrees(gamma_max(row.kind)):.2f}" if row.kind.constructible else "",
            " | ".join(row.notes),
        ])
    header = ["kind", "N", "n_sarrus", "n_link", "n_joint", "beta_deg", "gamma_max_deg",
              "gamma_max_geometric_deg", "notes"]
    if args.format == "json":
        payload = {"columns": header, "rows": rows}
        _emit(_dump_json(_document("table", args, payload)), args.out)
    else:
        _emit(_csv(header, rows), args.out)
    return 0


def cmd_sweep(args) -> int:
    ang = _radians(args)
    kind = _kind(args.polyhedron)
    graph, _ = build_mechanism(kind, args.a, ang["gamma"], math.pi / 6)
    res = sweep_rank(graph, Configuration(math.pi / 6, args.a, ang["gamma"]),
                     ang["from"], ang["to"], args.steps, args.method, args.tol)
    ok = not res.deviations
    payload = res.to_dict()
    payload["passed"] = ok
    if args.format == "csv":
        _emit(_csv(["phi_deg", "rank"],
                   [[math.degrees(p), r] for p, r in zip(res.phis, res.ranks)]), args.out)
    else:
        _emit(_dump_json(_document("sweep", args, payload, graph.notes)), args.out)
    if not ok:
        print(json.dumps({"error": "rank deviation",
                          "phi_deg": [_round(math.degrees(p)) for p in res.deviations]}),
              file=sys.stderr)
    return 0 if ok else 1


def cmd_sync(args) -> int:
    ang = _radians(args)
    kind = _kind(args.polyhedron)
    graph, _ = build_mechanism(kind, args.a, ang["gamma"], ang["phi0"])
    config = Configuration(ang["phi0"], args.a, ang["gamma"])
    rates = synchronization_check(graph, None, config, args.tol)
    traj = integrate_motion(graph, config, ang["phi0"], ang["phi1"], args.steps, args.tol)
    ok = rates.passed and traj.max_spread < SYNC_BOUND and traj.max_mid_error < SYNC_BOUND
    payload = {"rates": rates.to_dict(), "trajectory": traj.to_dict(), "bound_rad": SYNC_BOUND,
               "passed": ok}
    if args.format == "csv":
        rows = [[math.degrees(p), float(s), float(m)]
                for p, s, m in zip(traj.phi, traj.spread, traj.mid_error)]
        _emit(_csv(["phi_deg", "spread_rad", "mid_error_rad"], rows), args.out)
    else:
        _emit(_dump_json(_document("sync", args, payload, graph.notes)), args.out)
    if not ok:
        worst = int(np.argmax(traj.spread))
        print(json.dumps({"error": "synchronization failed",
                          "phi_deg": _round(math.degrees(traj.phi[worst]))}), file=sys.stderr)
    return 0 if ok else 1


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dpm",
        description="Sarrus-linkage deployable polyhedral mechanisms. Angles are in degrees.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "csv"), tol=True):
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=formats, default=formats[0],
                        help=f"output format (default: {formats[0]})")
        if tol:
            sp.add_argument("--tol", type=float, default=None,
                            help="relative rank tolerance (default: $DPM_TOL or 1e-9)")

    def kind_args(sp, gamma=True):
        sp.add_argument("--polyhedron", required=True,
                        help="tetrahedron | cube | dodecahedron | prismN")
        sp.add_argument("--a", type=float, default=1.0, help="edge length (default: 1)")
        if gamma:
            sp.add_argument("--gamma-deg", type=float, default=None,
                            help="limb angle (default: gamma_max of the kind)")

    sp = sub.add_parser("analyze", help="constraint matrix rank and mobility")
    kind_args(sp)
    sp.add_argument("--phi-deg", type=float, default=30.0, help="fold angle (default: 30)")
    sp.add_argument("--method", choices=("original", "equivalent"), default="original")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("curves", help="tetrahedral r, R, V against fold angle")
    sp.add_argument("--a", type=float, default=1.0, help="edge length (default: 1)")
    sp.add_argument("--samples", type=int, default=91, help="rows from 0 to 90 deg (default: 91)")
    common(sp, ("csv", "json"), tol=False)
    sp.set_defaults(func=cmd_curves)

    sp = sub.add_parser("mesh", help="configuration mesh as OBJ")
    kind_args(sp)
    sp.add_argument("--phi-deg", type=float, default=90.0, help="fold angle (default: 90)")
    common(sp, ("obj", "json"), tol=False)
    sp.set_defaults(func=cmd_mesh)

    sp = sub.add_parser("table", help="catalog of constructible mechanisms")
    sp.add_argument("--prism-max", type=int, default=10, help="largest prism N (default: 10)")
    common(sp, ("csv", "json"), tol=False)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("sweep", help="rank over a fold-angle range")
    kind_args(sp)
    sp.add_argument("--method", choices=("original", "equivalent"), default="original")
    sp.add_argument("--from-deg", type=float, default=5.0)
    sp.add_argument("--to-deg", type=float, default=85.0)
    sp.add_argument("--steps", type=int, default=81)
    common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("sync", help="fold-rate equality and integrated trajectory")
    kind_args(sp)
    sp.add_argument("--phi0-deg", type=float, default=10.0)
    sp.add_argument("--phi1-deg", type=float, default=80.0)
    sp.add_argument("--steps", type=int, default=200)
    common(sp)
    sp.set_defaults(func=cmd_sync)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "tol", "absent") is None:
            args.tol = _default_tol()
        elif hasattr(args, "tol") and not args.tol > 0:
            raise UsageError("--tol must be positive")
        return args.func(args)
    except (UsageError, BuildError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    except (MobilityError, ScrewError, OSError, ValueError, np.linalg.LinAlgError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
