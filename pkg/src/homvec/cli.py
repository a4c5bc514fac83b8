"""Batch front-end: hypothesis checks, lift verification, norms, harnesses.

Subcommands::

    homvec check SYSTEM [--max-depth D] [--out report.json]
    homvec verify-lift LIFT [--out report.json]
    homvec norm SYSTEM x1,x2,... [--out report.json]
    homvec harness CONFIG.json [--resolution N] [--seed S] [--out report.json]

SYSTEM / LIFT resolve to a built-in name, a packaged fixture, or a JSON
file path.  Exit codes: 0 all checks pass, 1 usage or parse error,
2 certified failure, 3 quadrature above tolerance (soft fail; partial
results are still written).  Reports embed the fully resolved
configuration, are written atomically, and are byte-identical across
runs with the same inputs and seeds.
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
from pathlib import Path

from . import analysis, hormander, lifting, systems
from .fields import check_h1
from .geometry import HomNorm
from .quadrature import QuadratureConfig
from .scalarfield import parse_prefix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED = 2
EXIT_SOFT = 3

SCHEMA_VERSION = 1


def _write_json(path: Path, data: dict) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _emit(report: dict, out: str | None) -> None:
    if out:
        _write_json(Path(out), report)
    else:
        print(json.dumps(report, indent=2, sort_keys=True))


def cmd_check(args) -> int:
    try:
        system = systems.load_system(args.system)
    except ValueError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    max_depth = args.max_depth if args.max_depth else system.sigma[-1]
    h1 = check_h1(system)
    cert = hormander.check_rank_at_origin(system, max_depth)
    depth = hormander.minimal_depth(system, max_depth)
    report = {
        "schema": SCHEMA_VERSION,
        "command": "check",
        "config": {"system": args.system, "max_depth": max_depth},
        "system": {"name": system.name, "n": system.n, "m": system.m,
                   "sigma": list(system.sigma), "q": system.q},
        "h1": h1.to_json(),
        "hormander": cert.to_json(),
        "minimal_depth": depth,
        "passed": h1.passed and cert.passed,
    }
    _emit(report, args.out)
    status = "PASS" if report["passed"] else "FAIL"
    print(
        f"[check] {system.name}: homogeneity {'ok' if h1.passed else 'VIOLATED'}, "
        f"rank {cert.rank}/{system.n} at depth <= {max_depth}, "
        f"minimal depth {depth}, q={system.q} -> {status}",
        file=_sys.stderr,
    )
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_verify_lift(args) -> int:
    try:
        spec = systems.load_lift(args.lift)
    except ValueError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    group = lifting.verify_group(spec)
    lift = lifting.verify_lift(spec)
    passed = group.passed and lift.passed
    report = {
        "schema": SCHEMA_VERSION,
        "command": "verify-lift",
        "config": {"lift": args.lift},
        "lift": {"name": spec.name, "N": spec.N, "tau": list(spec.tau),
                 "base": spec.base.name, "Q": spec.Q},
        "group": group.to_json(),
        "lifting": lift.to_json(),
        "passed": passed,
    }
    _emit(report, args.out)
    bad = [i.name for i in group.items + lift.items if not i.passed]
    print(
        f"[verify-lift] {spec.name}: "
        + ("all identities hold -> PASS" if passed else f"failed: {', '.join(bad)} -> FAIL"),
        file=_sys.stderr,
    )
    return EXIT_OK if passed else EXIT_FAILED


def cmd_norm(args) -> int:
    try:
        system = systems.load_system(args.system)
        point = tuple(float(tok) for tok in args.point.split(","))
    except ValueError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    if len(point) != system.n:
        print(
            f"error: point has {len(point)} coordinates, system needs {system.n}",
            file=_sys.stderr,
        )
        return EXIT_USAGE
    value = HomNorm(system.sigma)(point)
    report = {
        "schema": SCHEMA_VERSION,
        "command": "norm",
        "config": {"system": args.system, "point": list(point)},
        "norm": value,
    }
    _emit(report, args.out)
    print(f"[norm] {system.name} at {list(point)}: {value!r}", file=_sys.stderr)
    return EXIT_OK


def _parse_family(data, system) -> list[analysis.FamilyMember]:
    if data in (None, "default"):
        return analysis.default_family(system)
    if not isinstance(data, list):
        raise ValueError("family must be 'default' or a list of members")
    members = []
    for entry in data:
        expr = entry["expr"]
        field = parse_prefix(expr, system.n)
        members.append(
            analysis.FamilyMember(
                name=str(entry.get("name", expr)),
                field=field,
                support_radius=(
                    float(entry["support_radius"])
                    if entry.get("support_radius") is not None
                    else None
                ),
            )
        )
    return members


def _row_scale(rows) -> float:
    scale = 1.0
    for row in rows:
        for key in ("lhs", "zero_order"):
            value = row.get(key, "")
            if isinstance(value, (int, float)) and value == value:
                scale = max(scale, abs(float(value)))
    return scale


def cmd_harness(args) -> int:
    try:
        config_data = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read harness config: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    try:
        kind = config_data["harness"]
        quad_data = dict(config_data.get("quadrature", {}))
        if args.resolution:
            quad_data["resolution"] = args.resolution
        if args.seed is not None:
            quad_data["seed"] = args.seed
        if "tolerance" not in quad_data:
            quad_data["tolerance"] = 1e-4 if kind == "sandwich" else 0.05
        quad = QuadratureConfig.from_json(quad_data)
        p_value = config_data.get("p", 2.0)

        if kind == "sandwich":
            spec = systems.load_lift(config_data["lift"])
            family = _parse_family(config_data.get("family"), spec.base)
            radii = config_data.get("r", [1.0])
            radii = [float(r) for r in (radii if isinstance(radii, list) else [radii])]
            p_list = p_value if isinstance(p_value, list) else [p_value]
            results = []
            all_ok, quad_ok = True, True
            for member in family:
                for r in radii:
                    for p in p_list:
                        rep = lifting.projected_norm_sandwich(
                            spec, member.field, r, float(p), quad
                        )
                        entry = {"function": member.name, **rep.to_json()}
                        results.append(entry)
                        all_ok &= rep.passed
                        quad_ok &= rep.quadrature_error <= quad.tolerance * (
                            1.0 + rep.lifted_norm
                        )
            report = {
                "schema": SCHEMA_VERSION,
                "command": "harness",
                "config": {
                    "harness": kind,
                    "lift": config_data["lift"],
                    "p": p_list,
                    "r": radii,
                    "family": [m.name for m in family],
                    "quadrature": quad.to_json(),
                },
                "results": results,
                "passed": all_ok,
                "quadrature_ok": quad_ok,
            }
            rows = results
        else:
            system = systems.load_system(config_data["system"])
            family = _parse_family(config_data.get("family"), system)
            if kind == "interpolation":
                rep = analysis.interpolation_harness(
                    system,
                    family,
                    float(p_value),
                    eps_grid=config_data.get("eps_grid", analysis.DEFAULT_EPS_GRID),
                    R_grid=config_data.get("R_grid", analysis.DEFAULT_R_GRID),
                    config=quad,
                )
            elif kind == "apriori":
                rep = analysis.apriori_harness(
                    system,
                    family,
                    float(p_value),
                    int(config_data.get("k", 0)),
                    config=quad,
                )
            else:
                raise ValueError(f"unknown harness kind {kind!r}")
            quad_ok = rep.max_quadrature_error <= quad.tolerance * _row_scale(rep.rows)
            report = {
                "schema": SCHEMA_VERSION,
                "command": "harness",
                "config": {
                    "harness": kind,
                    "system": config_data["system"],
                    "p": float(p_value),
                    "k": int(config_data.get("k", 0)),
                    "family": [m.name for m in family],
                    "quadrature": quad.to_json(),
                },
                "report": rep.to_json(),
                "passed": rep.passed,
                "quadrature_ok": quad_ok,
            }
            rows = list(rep.rows)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE

    _emit(report, args.out)
    if args.out:
        csv_path = Path(args.out).with_suffix(".csv")
        headers = sorted({key for row in rows for key in row})
        lines = [",".join(headers)]
        for row in rows:
            lines.append(",".join(str(row.get(h, "")) for h in headers))
        tmp = csv_path.with_name(csv_path.name + ".tmp")
        tmp.write_text("\n".join(lines) + "\n")
        os.replace(tmp, csv_path)
    status = "PASS" if report["passed"] else "FAIL"
    if not report["quadrature_ok"]:
        status += " (quadrature above tolerance)"
    print(f"[harness] {kind}: {status}", file=_sys.stderr)
    if not report["passed"]:
        return EXIT_FAILED
    if not report["quadrature_ok"]:
        return EXIT_SOFT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homvec",
        description="Checks and constant estimation for homogeneous systems "
        "of polynomial vector fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="certify homogeneity and the rank condition")
    p_check.add_argument("system", help="builtin name, fixture name, or JSON path")
    p_check.add_argument("--max-depth", type=int, default=None,
                         help="bracket depth bound (default: largest exponent)")
    p_check.add_argument("--out", default=None, help="write the JSON report here")
    p_check.set_defaults(func=cmd_check)

    p_lift = sub.add_parser("verify-lift", help="verify a Carnot-group lift")
    p_lift.add_argument("lift", help="builtin name, fixture name, or JSON path")
    p_lift.add_argument("--out", default=None)
    p_lift.set_defaults(func=cmd_verify_lift)

    p_norm = sub.add_parser("norm", help="homogeneous norm of a point")
    p_norm.add_argument("system")
    p_norm.add_argument("point", help="comma-separated coordinates")
    p_norm.add_argument("--out", default=None)
    p_norm.set_defaults(func=cmd_norm)

    p_har = sub.add_parser("harness", help="run an inequality harness from a config")
    p_har.add_argument("config", help="harness config JSON path")
    p_har.add_argument("--resolution", type=int, default=None)
    p_har.add_argument("--seed", type=int, default=None)
    p_har.add_argument("--out", default=None)
    p_har.set_defaults(func=cmd_harness)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
