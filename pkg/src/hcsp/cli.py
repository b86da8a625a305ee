"""Command line entry point: ``hcsp generate|solve|exact|compare|eval``.

Every command writes a ``manifest.json`` next to its artifacts.  Errors are
reported as one JSON object on stderr with a nonzero exit code.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .alns import InfeasibleInstance, Proportion
from .bialns import PRESETS, BialnsConfig, bialns
from .evaluation import Solution, SolutionError, check_feasibility, evaluate
from .indicators import compare
from .instance import PROFILES, InstanceError, generate_instance, load_instance, save_instance

MANIFEST_SCHEMA = "hcsp-manifest/1"
OUTPUT_ENV = "HCSP_OUTPUT_DIR"


class CliError(Exception):
    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _proportion(text: str) -> str:
    try:
        return str(Proportion.parse(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _out_dir(args) -> Path:
    out = Path(args.out or os.environ.get(OUTPUT_ENV) or "hcsp-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, argv: list[str], **fields) -> Path:
    data = {"schema": MANIFEST_SCHEMA, "version": __version__, "command": command, "argv": argv, **fields}
    path = out / "manifest.json"
    path.write_text(json.dumps(data, indent=1, sort_keys=True, default=str) + "\n")
    return path


def _write_solutions(archive, out: Path) -> list[str]:
    sol_dir = out / "solutions"
    sol_dir.mkdir(exist_ok=True)
    files = []
    for k, payload in enumerate(archive.payloads()):
        rel = f"solutions/sol_{k:03d}.json"
        (out / rel).write_text(json.dumps(payload.to_dict(), indent=1, sort_keys=True) + "\n")
        files.append(rel)
    return files


def read_front(path: str | Path) -> list[tuple[int, int]]:
    """(f1, f2) pairs from a front CSV; only the two objective columns are required."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise CliError(f"cannot read front file {path}: {exc}") from None
    pts = []
    for k, row in enumerate(rows, start=2):
        try:
            pts.append((int(float(row["f1"])), int(float(row["f2"]))))
        except (KeyError, TypeError, ValueError):
            raise CliError(f"malformed front file {path}: line {k} lacks numeric f1/f2", path=str(path)) from None
    if not pts:
        raise CliError(f"front file {path} is empty", path=str(path))
    return pts


# commands

def cmd_generate(args, argv) -> dict:
    out = _out_dir(args)
    files = []
    for k in range(args.count):
        inst = generate_instance(args.services, args.caregivers, args.seed + k, profile=args.profile)
        path = out / f"{args.services}_{k + 1:02d}.json"
        save_instance(inst, path)
        files.append(str(path))
    _write_manifest(out, "generate", argv, config=vars_snapshot(args), seeds=[args.seed + k for k in range(args.count)],
                    artifacts={"instances": files})
    return {"instances": files}


def vars_snapshot(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def _bialns_config(args) -> BialnsConfig:
    base = dict(PRESETS[args.preset]) if args.preset else {}
    for name in ("n", "p", "nroutes", "nalns", "pr", "nsols", "step", "cooling",
                 "step1_time_limit", "step2_time_limit", "step3_time_limit"):
        v = getattr(args, name)
        if v is not None:
            base[name] = v
    base["seed"] = args.seed
    return BialnsConfig(**base)


def cmd_solve(args, argv) -> dict:
    inst = load_instance(args.instance)
    cfg = _bialns_config(args)
    out = _out_dir(args)
    t0 = time.monotonic()
    with open(out / "progress.jsonl", "w") as log_fh:
        res = bialns(inst, cfg, log_stream=log_fh)
    elapsed = time.monotonic() - t0
    files = _write_solutions(res.archive, out)
    res.archive.write_csv(out / "front.csv", files)
    _write_manifest(out, "solve", argv, instance={"path": str(args.instance), "sha256": _sha256(args.instance)},
                    config=cfg.snapshot(), seeds=[cfg.seed], timings={"total_seconds": round(elapsed, 3),
                                                                       "steps": res.log},
                    artifacts={"front": "front.csv", "solutions": files, "progress": "progress.jsonl"})
    return {"front": str(out / "front.csv"), "points": res.archive.front()}


def cmd_exact(args, argv) -> dict:
    from .exact import (EnumerationBackend, EnumerationTooLarge, ExternalBackend, GridConfig, MilpBackend,
                        augmecon2)

    inst = load_instance(args.instance)
    if args.backend == "enumeration":
        try:
            backend = EnumerationBackend(inst, step=args.time_step, max_services=args.max_services)
        except EnumerationTooLarge as exc:
            raise CliError(f"{exc}; configure a solver with --backend milp or --backend external",
                           services=inst.n_services, bound=args.max_services) from None
    elif args.backend == "milp":
        backend = MilpBackend(inst, time_limit=args.time_limit)
    else:
        if not args.solver_cmd:
            raise CliError("--backend external requires --solver-cmd")
        backend = ExternalBackend(inst, args.solver_cmd.split(), workdir=args.workdir, timeout=args.time_limit)
    grid = GridConfig(g2=args.g2, eps=args.eps, full=args.full)
    out = _out_dir(args)
    t0 = time.monotonic()
    res = augmecon2(backend, inst, grid, emit_lp=args.emit_lp)
    elapsed = time.monotonic() - t0
    files = _write_solutions(res.archive, out)
    res.archive.write_csv(out / "front.csv", files)
    _write_manifest(out, "exact", argv, instance={"path": str(args.instance), "sha256": _sha256(args.instance)},
                    config={"backend": args.backend, "time_step": args.time_step, "max_services": args.max_services,
                            "grid": grid.snapshot()},
                    seeds=[], timings={"total_seconds": round(elapsed, 3), "solves": backend.solves},
                    grid=[s.as_dict() for s in res.steps],
                    artifacts={"front": "front.csv", "solutions": files, "lp_files": res.lp_files})
    return {"front": str(out / "front.csv"), "points": res.archive.front(), "lp_files": len(res.lp_files)}


def cmd_compare(args, argv) -> dict:
    if len(args.fronts) < 2:
        raise CliError("compare needs at least two front files")
    names = args.names.split(",") if args.names else _default_names(args.fronts)
    if len(names) != len(args.fronts) or len(set(names)) != len(names):
        raise CliError("--names must give one distinct name per front file")
    fronts = {n: read_front(p) for n, p in zip(names, args.fronts)}
    reports = compare(fronts)
    out = _out_dir(args)
    with open(out / "indicators.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "CV", "EPS", "GD", "IGD", "size_A", "size_RF"])
        for n in names:
            row = reports[n].as_row()
            w.writerow([n] + [repr(row[k]) if isinstance(row[k], float) else row[k]
                              for k in ("CV", "EPS", "GD", "IGD", "size_A", "size_RF")])
    with open(out / "plot_data.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "f1", "f2"])
        for n in names:
            for f1, f2 in fronts[n]:
                w.writerow([n, f1, f2])
    _write_manifest(out, "compare", argv, inputs={n: {"path": p, "sha256": _sha256(p)} for n, p in
                                                 zip(names, args.fronts)},
                    config={}, seeds=[], artifacts={"indicators": "indicators.csv", "plot_data": "plot_data.csv"})
    return {n: reports[n].as_row() for n in names}


def _default_names(paths: list[str]) -> list[str]:
    # directory name (one run per directory), then file stem, then position
    for names in ([Path(p).parent.name for p in paths], [Path(p).stem for p in paths]):
        if all(names) and len(set(names)) == len(names):
            return names
    return [f"front{k + 1}" for k in range(len(paths))]


def cmd_eval(args, argv) -> dict:
    inst = load_instance(args.instance)
    try:
        data = json.loads(Path(args.solution).read_text())
        sol = Solution.from_dict(inst, data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(f"cannot read solution {args.solution}: {exc}") from None
    violations = check_feasibility(sol)
    result: dict = {"feasible": not violations,
                    "violations": [{"kind": v.kind, "message": v.message} for v in violations]}
    try:
        result["f1"], result["f2"] = evaluate(sol)
    except SolutionError as exc:
        result["f1"] = result["f2"] = None
        result["error"] = str(exc)
    return result


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hcsp", description="Biobjective home care scheduling toolkit.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def with_out(p):
        p.add_argument("--out", help=f"output directory (default: ${OUTPUT_ENV} or ./hcsp-out)")
        return p

    g = with_out(sub.add_parser("generate", help="write seeded random instances"))
    g.add_argument("--services", type=_positive, required=True)
    g.add_argument("--caregivers", type=_positive, default=3)
    g.add_argument("--count", type=_positive, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--profile", choices=sorted(PROFILES), default="default")
    g.set_defaults(func=cmd_generate)

    s = with_out(sub.add_parser("solve", help="approximate the Pareto front with BIALNS"))
    s.add_argument("instance")
    s.add_argument("--preset", choices=sorted(PRESETS))
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n", type=_nonneg, help="ALNS iterations per direction in the first step")
    s.add_argument("--p", type=_proportion, help="destroy proportion for the first step, e.g. auto_100%%")
    s.add_argument("--nroutes", type=_nonneg)
    s.add_argument("--nalns", type=_nonneg)
    s.add_argument("--pr", type=_proportion, help="destroy proportion for the second step")
    s.add_argument("--nsols", type=_nonneg)
    s.add_argument("--step", type=_positive, help="time grid of the schedulers and shift moves (minutes)")
    s.add_argument("--cooling", type=float)
    for k in (1, 2, 3):
        s.add_argument(f"--step{k}-time-limit", type=float, dest=f"step{k}_time_limit", metavar="SECONDS")
    s.set_defaults(func=cmd_solve)

    e = with_out(sub.add_parser("exact", help="exact front with AUGMECON2"))
    e.add_argument("instance")
    e.add_argument("--backend", choices=["enumeration", "milp", "external"], default="enumeration")
    e.add_argument("--time-step", type=_positive, default=15, help="start-time grid of the enumerator")
    e.add_argument("--max-services", type=_positive, default=6)
    e.add_argument("--g2", type=_positive, default=100)
    e.add_argument("--eps", type=float, default=1e-3)
    e.add_argument("--full", action="store_true", help="one grid interval per unit of f2")
    e.add_argument("--emit-lp", metavar="DIR", help="write one LP file per solved grid point")
    e.add_argument("--solver-cmd", help="external solver command with {lp} and {sol} placeholders")
    e.add_argument("--workdir")
    e.add_argument("--time-limit", type=float)
    e.set_defaults(func=cmd_exact)

    c = with_out(sub.add_parser("compare", help="indicator report of several fronts"))
    c.add_argument("fronts", nargs="+")
    c.add_argument("--names", help="comma separated method names")
    c.set_defaults(func=cmd_compare)

    v = sub.add_parser("eval", help="feasibility and objectives of a solution file")
    v.add_argument("instance")
    v.add_argument("solution")
    v.set_defaults(func=cmd_eval)
    return ap


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args, argv)
    except CliError as exc:
        return _fail("usage", str(exc), exc.details)
    except InstanceError as exc:
        return _fail("instance", str(exc), {"violations": exc.violations})
    except InfeasibleInstance as exc:
        return _fail("infeasible", str(exc), {})
    except (OSError, ValueError, RuntimeError) as exc:
        return _fail(type(exc).__name__, str(exc), {})
    json.dump(result, sys.stdout, default=str)
    sys.stdout.write("\n")
    return 0


def _fail(kind: str, message: str, details: dict) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, **details}, default=str) + "\n")
    return 1


if __name__ == "__main__":
    sys.exit(main())
