"""Command-line entry point.

Subcommands:
  run      execute a scenario (bundled preset name or JSON path)
  shape    sample the analytic deformed curve to CSV
  presets  list bundled scenario and shape presets
  metrics  recompute a metrics summary from a telemetry CSV

Exit codes: 0 success, 1 scenario/config error, 2 I/O error,
3 acceptance-check failure (run --check).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__, deformation, metrics, presets
from .deformation import DeformationSpec, ExprError, UnknownPreset, parse
from .embedding import EmbeddingConfig, circle_point, to_world
from .harness import RunResult, Scenario, ScenarioError, load_scenario, run
from .so3 import Vec3
from .telemetry import read_csv, write_csv

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_CHECK = 3


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits with the config-error code on bad usage."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _f(v: float) -> str:
    return format(v, ".9g")


def _resolve_scenario(name_or_path: str) -> Scenario:
    if name_or_path in presets.scenario_preset_names():
        return presets.load_preset(name_or_path)
    return load_scenario(name_or_path)


def _write_series(result: RunResult, outdir: Path) -> dict[str, str]:
    s = result.summary
    paths = {}

    sep_path = outdir / "separations.csv"
    with open(sep_path, "w") as f:
        f.write("t,rank,separation_deg\n")
        for t, seps in zip(s.times, s.separations_deg):
            for r, v in enumerate(seps):
                f.write(f"{_f(t)},{r},{_f(v)}\n")
    paths["separations"] = sep_path.name

    dist_path = outdir / "distances.csv"
    with open(dist_path, "w") as f:
        f.write("t,min_m,max_m\n")
        for t, lo, hi in zip(s.times, s.min_dist_m, s.max_dist_m):
            f.write(f"{_f(t)},{_f(lo)},{_f(hi)}\n")
    paths["distances"] = dist_path.name

    lyap_path = outdir / "lyapunov.csv"
    with open(lyap_path, "w") as f:
        f.write("t,value\n")
        for t, v in zip(s.times, s.lyapunov):
            f.write(f"{_f(t)},{_f(v)}\n")
    paths["lyapunov"] = lyap_path.name

    err_path = outdir / "tracking_error.csv"
    with open(err_path, "w") as f:
        f.write("t,id,error_m\n")
        for aid in sorted(s.tracking_err):
            for t, e in s.tracking_err[aid]:
                f.write(f"{_f(t)},{aid},{_f(e)}\n")
    paths["tracking_error"] = err_path.name

    return paths


def _apply_check(summary_dict: dict, check_doc: dict) -> list[str]:
    """Compare scalar summary fields against declared bounds."""
    violations = []
    for field, bounds in check_doc.items():
        if field not in summary_dict:
            violations.append(f"{field}: no such metrics field")
            continue
        value = summary_dict[field]
        if value is None:
            violations.append(f"{field}: not available (was None)")
            continue
        if not isinstance(value, (int, float)):
            violations.append(f"{field}: not a scalar")
            continue
        if "min" in bounds and value < bounds["min"]:
            violations.append(f"{field}: {value} < min {bounds['min']}")
        if "max" in bounds and value > bounds["max"]:
            violations.append(f"{field}: {value} > max {bounds['max']}")
    return violations


def cmd_run(args) -> int:
    try:
        sc = _resolve_scenario(args.scenario)
    except (ScenarioError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO

    if args.seed is not None:
        from dataclasses import replace

        sc = replace(sc, seed=args.seed)

    try:
        result = run(sc)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        write_csv(result.records, outdir / "telemetry.csv")
        series = _write_series(result, outdir)
        summary_dict = result.summary.to_dict()
        summary_dict["series"] = series
        summary_dict["scenario"] = sc.name
        summary_dict["seed"] = sc.seed
        summary_dict["wall_time_s"] = round(result.wall_time_s, 3)
        with open(outdir / "metrics.json", "w") as f:
            json.dump(summary_dict, f, indent=2)
            f.write("\n")
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO

    last = result.summary.final
    print(f"scenario {sc.name or args.scenario}: n={sc.n_agents} dt={sc.dt} "
          f"duration={sc.duration}s seed={sc.seed}")
    print(f"  ticks={len(result.summary.times)} agents_final={last.n_agents} "
          f"wall={result.wall_time_s:.2f}s")
    conv = last.convergence_time_s
    print(f"  convergence_time_s={conv if conv is not None else 'none'} "
          f"(band {result.summary.band_deg} deg, hold {result.summary.hold_s} s)")
    if last.steady_oscillation_deg is not None:
        print(f"  steady_oscillation_deg={last.steady_oscillation_deg:.3f}")
    print(f"  min_distance_m={min(result.summary.min_dist_m):.3f} "
          f"max_distance_m={max(result.summary.max_dist_m):.3f}")
    if result.overtake_ticks:
        print(f"  overtake ticks: {result.overtake_ticks}")
    print(f"  wrote {outdir / 'telemetry.csv'} ({len(result.records)} rows), "
          f"{outdir / 'metrics.json'}")

    if args.check:
        try:
            check_doc = json.loads(Path(args.check).read_text())
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO
        except json.JSONDecodeError as e:
            print(f"error: bad check file: {e}", file=sys.stderr)
            return EXIT_CONFIG
        violations = _apply_check(summary_dict, check_doc)
        if violations:
            for v in violations:
                print(f"check failed: {v}", file=sys.stderr)
            return EXIT_CHECK
        print(f"  all {len(check_doc)} checks passed")
    return EXIT_OK


def cmd_shape(args) -> int:
    try:
        if args.preset:
            dfm = deformation.preset(args.preset)
        else:
            if not (args.omega_x and args.omega_y and args.s is not None):
                print("error: provide --preset or all of --omega-x --omega-y --s",
                      file=sys.stderr)
                return EXIT_CONFIG
            dfm = DeformationSpec(parse(args.omega_x), parse(args.omega_y), args.s)
        if args.s is not None and args.preset:
            from dataclasses import replace

            dfm = replace(dfm, s=args.s)
        cfg = EmbeddingConfig(
            r_d=args.r_d,
            omega_zd=dfm.omega_zd if dfm.omega_zd is not None else 1.0,
            center=Vec3(*args.center),
            deformation=dfm,
        )
    except (UnknownPreset, ExprError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    if args.samples < 3:
        print("error: need at least 3 samples", file=sys.stderr)
        return EXIT_CONFIG

    try:
        with open(args.out, "w") as f:
            f.write("phi,x,y,z\n")
            for k in range(args.samples):
                phi = 2.0 * math.pi * k / args.samples
                p = to_world(circle_point(phi, cfg.r_d), phi, cfg)
                f.write(f"{_f(phi)},{_f(p.x)},{_f(p.y)},{_f(p.z)}\n")
    except deformation.EvaluationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out} ({args.samples} samples, r_d={args.r_d})")
    return EXIT_OK


def cmd_presets(args) -> int:
    rows = []
    for name in presets.scenario_preset_names():
        rows.append({"name": name, "kind": "scenario",
                     "description": presets.scenario_description(name)})
    for name in deformation.preset_names():
        info = deformation.preset_info(name)
        rows.append({"name": name, "kind": "shape", "description": info["description"],
                     "omega_x": info["omega_x"], "omega_y": info["omega_y"],
                     "s": info["s"], "omega_zd": info["omega_zd"]})
    if args.json:
        json.dump(rows, sys.stdout, indent=2)
        print()
    else:
        width = max(len(r["name"]) for r in rows)
        for r in rows:
            print(f"{r['name']:<{width}}  {r['kind']:<8}  {r['description']}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    try:
        records = read_csv(args.telemetry)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if not records:
        print("error: telemetry is empty", file=sys.stderr)
        return EXIT_CONFIG
    summary = metrics.summarize(records, band_deg=args.band, hold_s=args.hold)
    doc = summary.to_dict()
    text = json.dumps(doc, indent=2)
    if args.out:
        try:
            Path(args.out).write_text(text + "\n")
        except OSError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {args.out}")
    else:
        print(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ringswarm",
                description="Deterministic swarm simulator on deformed circular orbits")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pr = sub.add_parser("run", help="run a scenario (preset name or JSON path)")
    pr.add_argument("scenario", help="bundled preset name or path to a scenario JSON")
    pr.add_argument("-o", "--out", default="out", help="output directory")
    pr.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    pr.add_argument("--check", default=None,
                    help="JSON file of {field: {min,max}} bounds; exit 3 on violation")
    pr.set_defaults(func=cmd_run)

    ps = sub.add_parser("shape", help="sample the analytic deformed curve to CSV")
    ps.add_argument("--preset", default=None, help="shape preset name")
    ps.add_argument("--omega-x", default=None, help="expression for omega_x(phi)")
    ps.add_argument("--omega-y", default=None, help="expression for omega_y(phi)")
    ps.add_argument("--s", type=float, default=None, help="distortion factor")
    ps.add_argument("--r-d", type=float, default=1.0, help="circle radius (m)")
    ps.add_argument("--center", type=float, nargs=3, default=[0.0, 0.0, 0.0],
                    metavar=("X", "Y", "Z"), help="embedding center")
    ps.add_argument("--samples", type=int, default=1024)
    ps.add_argument("-o", "--out", default="shape.csv")
    ps.set_defaults(func=cmd_shape)

    pp = sub.add_parser("presets", help="list bundled presets")
    pp.add_argument("--json", action="store_true", help="machine-readable output")
    pp.set_defaults(func=cmd_presets)

    pm = sub.add_parser("metrics", help="recompute metrics from a telemetry CSV")
    pm.add_argument("telemetry", help="path to telemetry.csv")
    pm.add_argument("-o", "--out", default=None, help="write metrics JSON here")
    pm.add_argument("--band", type=float, default=None,
                    help="convergence band in degrees (default: by swarm size)")
    pm.add_argument("--hold", type=float, default=metrics.DEFAULT_HOLD_S,
                    help="seconds separations must stay in band")
    pm.set_defaults(func=cmd_metrics)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
