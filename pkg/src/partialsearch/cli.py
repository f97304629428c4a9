"""Command-line front end.

    partialsearch params --K 4 --N 4096
    partialsearch grk --N 4096 --K 4 --rep full
    partialsearch simulate --N 64 --K 4 --plan "G1:1,G2:4,G1:4" --rep reduced_exact
    partialsearch verify --suite lie --gamma 0.5236
    partialsearch scan --K 4 --N 4096 --grid-step 0.01 --format csv
    partialsearch conjecture --K 4 --grid-step 0.01 --seed 0 --starts 20

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from partialsearch import checks, explorer, planner, reduced, statevector
from partialsearch.core import GeometryError, IterationPlan, make_space

SCHEMA_VERSION = 1
COMMANDS = ("simulate", "grk", "params", "verify", "scan", "conjecture")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n_items: int | None = None
    n_blocks: int | None = None
    target_index: int = 0
    representation: str = "full"
    grid_step: float | None = None
    seed: int = 0
    output_format: str = "json"
    output_path: str | None = None
    suite: str = "all"
    plan: str | None = None
    gamma: float | None = None
    starts: int = 20
    bound: float = 2 * math.pi
    refine: bool = False
    continuous: bool = False


# --------------------------------------------------------------------------
# serialization


def _format_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(bool(obj) if obj is not None else None)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [inner + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    fields = list(rows[0])
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (_format_float(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def _space(cfg: RunConfig):
    if cfg.n_items is None or cfg.n_blocks is None:
        raise UsageError(f"{cfg.command} needs --N and --K")
    return make_space(cfg.n_items, cfg.n_blocks, cfg.target_index)


def _vec(v) -> list[float]:
    return [float(x) for x in np.real(v)]


def cmd_params(cfg: RunConfig):
    if cfg.n_blocks is None:
        raise UsageError("params needs --K")
    p = planner.optimal_params(cfg.n_blocks)
    report = {"K": p.K, "eta": p.eta, "alpha": p.alpha, "eta_minus_alpha": p.query_coefficient}
    if cfg.n_items is not None:
        space = _space(cfg)
        c1, c2 = planner.continuous_counts(space)
        j1, j2 = planner.iteration_counts(space, cfg.refine)
        report.update(N=space.n_items, j1_continuous=c1, j2_continuous=c2, j1=j1, j2=j2,
                      queries=j1 + j2 + 1,
                      asymptotic_queries=planner.asymptotic_queries(space.n_items, space.n_blocks))
    return report, 0


def cmd_grk(cfg: RunConfig):
    space = _space(cfg)
    run = planner.run_grk(space, cfg.representation, continuous=cfg.continuous, refine=cfg.refine)
    report = {
        "N": space.n_items, "K": space.n_blocks, "target": space.target_index,
        "representation": run.representation, "continuous": run.continuous,
        "j1": run.j1, "j2": run.j2, "queries": run.queries,
        "final_state": _vec(run.final_state), "u_amplitude": run.u_amplitude,
        "target_block_probability": run.target_block_probability,
    }
    if run.block_probabilities is not None:
        report["block_probabilities"] = _vec(run.block_probabilities)
    return report, 0


def cmd_simulate(cfg: RunConfig):
    space = _space(cfg)
    if cfg.plan is None:
        raise UsageError("simulate needs --plan")
    try:
        plan = IterationPlan.parse(cfg.plan)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = {"N": space.n_items, "K": space.n_blocks, "target": space.target_index,
              "plan": str(plan), "representation": cfg.representation,
              "queries": planner.query_count(plan)}
    if cfg.representation == "full":
        psi = statevector.run_sequence(space, plan)
        coeffs, resid = statevector.project_reduced(space, psi)
        blocks = statevector.block_probabilities(space, psi)
        report.update(final_state=_vec(coeffs), subspace_residual=resid,
                      block_probabilities=_vec(blocks),
                      target_block_probability=float(blocks[space.target_block]),
                      target_probability=statevector.target_probability(space, psi))
    else:
        model = "exact" if cfg.representation == "reduced_exact" else "asymptotic"
        v = reduced.plan_matrix(plan, space, model) @ reduced.reduced_state("s1", space)
        report.update(final_state=_vec(v), target_block_probability=float(v[0] ** 2 + v[1] ** 2),
                      target_probability=float(v[0] ** 2))
    return report, 0


def cmd_verify(cfg: RunConfig):
    if cfg.suite not in checks.SUITES + ("all",):
        raise UsageError(f"unknown suite {cfg.suite!r}")
    kw: dict = {"seed": cfg.seed}
    if cfg.gamma is not None:
        if not 0 < cfg.gamma <= math.pi / 4 + 1e-12:
            raise UsageError("--gamma must lie in (0, pi/4]")
        kw["gamma"] = cfg.gamma
    if cfg.n_items is not None or cfg.n_blocks is not None:
        kw["space"] = _space(cfg)
    results = checks.run_suite(cfg.suite, **kw)
    ok = all(c.passed for c in results)
    return {"suite": cfg.suite, "passed": ok, "checks": [c.to_dict() for c in results]}, 0 if ok else 1


def cmd_scan(cfg: RunConfig):
    if cfg.n_items is None or cfg.n_blocks is None:
        raise UsageError("scan needs --N and --K")
    if cfg.n_blocks < 3:
        raise UsageError("scan needs --K >= 3")
    step = cfg.grid_step if cfg.grid_step is not None else 1e-2 * math.sqrt(cfg.n_items / cfg.n_blocks)
    if step <= 0:
        raise UsageError("--grid-step must be positive")
    rep = explorer.scan_three_segment(cfg.n_blocks, cfg.n_items, step, keep_records=cfg.output_format == "csv")
    return rep.to_dict(), 0


def cmd_conjecture(cfg: RunConfig):
    if cfg.n_blocks is None:
        raise UsageError("conjecture needs --K")
    step = cfg.grid_step if cfg.grid_step is not None else 1e-2
    if step <= 0 or cfg.starts < 0:
        raise UsageError("--grid-step must be positive and --starts nonnegative")
    rep = explorer.conjecture_probe(cfg.n_blocks, j_bounds=cfg.bound, grid_step=step,
                                    n_starts=cfg.starts, seed=cfg.seed)
    return rep.to_dict(), 0


HANDLERS = {"params": cmd_params, "grk": cmd_grk, "simulate": cmd_simulate,
            "verify": cmd_verify, "scan": cmd_scan, "conjecture": cmd_conjecture}


def _csv_rows(cfg: RunConfig, report: dict) -> list[dict]:
    if cfg.command == "verify":
        return report["checks"]
    if cfg.command == "scan":
        return report["records"]
    if cfg.command == "conjecture":
        return [{"index": r["index"], "three_cost": r["three_cost"], "four_cost": r["four_cost"],
                 "gap": r["gap"], "start_t": r["start"][0], "start_ntt": r["start"][1],
                 "start_u": r["start"][2]} for r in report["records"]]
    raise UsageError(f"--format csv is not available for {cfg.command}")


def run_command(cfg: RunConfig) -> tuple[int, str]:
    """Run one command; returns the exit code and the serialized report."""
    if cfg.output_format not in ("json", "csv"):
        raise UsageError(f"unknown format {cfg.output_format!r}")
    if cfg.representation not in planner.REPRESENTATIONS:
        raise UsageError(f"unknown representation {cfg.representation!r}")
    report, code = HANDLERS[cfg.command](cfg)
    if cfg.output_format == "csv":
        return code, to_csv(_csv_rows(cfg, report))
    body = {"schema_version": SCHEMA_VERSION, "command": cfg.command}
    body.update(report)
    return code, dumps(body) + "\n"


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--N", dest="n_items", type=int)
    common.add_argument("--K", dest="n_blocks", type=int)
    common.add_argument("--target", dest="target_index", type=int, default=0)
    common.add_argument("--rep", dest="representation", default="full", choices=planner.REPRESENTATIONS)
    common.add_argument("--grid-step", dest="grid_step", type=float)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", dest="output_format", default="json", choices=("json", "csv"))
    common.add_argument("--out", dest="output_path")
    common.add_argument("--config", help="JSON file of flag defaults (keys are RunConfig fields)")

    p = _Parser(prog="partialsearch", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("params", parents=[common]).add_argument("--refine", action="store_true")
    g = sub.add_parser("grk", parents=[common])
    g.add_argument("--refine", action="store_true")
    g.add_argument("--continuous", action="store_true")
    sub.add_parser("simulate", parents=[common]).add_argument("--plan")
    v = sub.add_parser("verify", parents=[common])
    v.add_argument("--suite", default="all")
    v.add_argument("--gamma", type=float)
    sub.add_parser("scan", parents=[common])
    c = sub.add_parser("conjecture", parents=[common])
    c.add_argument("--starts", type=int, default=20)
    c.add_argument("--bound", type=float, default=2 * math.pi)
    return p


def parse_config(argv: list[str]) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    values = vars(args)
    cfg_path = values.pop("config", None)
    if cfg_path:
        try:
            with open(cfg_path) as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {cfg_path}: {exc}") from exc
        known = set(RunConfig.__dataclass_fields__)
        unknown = set(file_values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        defaults = build_parser().parse_args([values["command"]])
        for key, val in file_values.items():
            # flags given explicitly on the command line win over the file
            if key == "command" or values.get(key) != getattr(defaults, key, None):
                continue
            values[key] = val
    return RunConfig(**{k: v for k, v in values.items() if k in RunConfig.__dataclass_fields__})


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        code, text = run_command(cfg)
    except (UsageError, GeometryError) as exc:
        print(f"partialsearch: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader went away (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return code


if __name__ == "__main__":
    sys.exit(main())
