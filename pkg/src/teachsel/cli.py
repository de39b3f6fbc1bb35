"""Command-line interface: scenario in, JSON or CSV report out.

Feature indices are reported 1-based; subsets serialize as sorted,
comma-free strings like "2+3" (empty subset -> "").  CSV cells carry 15
significant digits.  Exit codes: 0 success, 1 a verification or bound check
failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from pathlib import Path

import numpy as np

from . import oracle, robustness, tradeoff
from .errors import InvalidInputError, VerificationError
from .model import mse
from .planner import (
    discounted_baseline_loss,
    optimal_static_subset,
    optimal_stationary_sequence,
)
from .scenario import Scenario, load_scenario

EVAL_STATIC_MAX_FEATURES = 12


def format_subset(subset) -> str:
    """Sorted 1-based indices joined by '+': (1, 2) -> "2+3"."""
    return "+".join(str(i + 1) for i in sorted(subset))


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def _write_csv(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row[col]) for col in header])
    return buf.getvalue()


def _emit(args, payload: dict, rows: list[dict], header: list[str]) -> None:
    if args.format == "csv":
        text = _write_csv(rows, header)
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _report_rows(scenario: Scenario, reports) -> list[dict]:
    return [
        {
            "feature": r.index + 1,
            "name": scenario.names[r.index],
            "informativeness": r.informativeness,
            "divergence0": r.divergence0,
            "value": r.value,
            "selected": r.selected,
        }
        for r in reports
    ]


def cmd_eval_static(scenario: Scenario, args) -> int:
    instance = scenario.instance
    if instance.n > EVAL_STATIC_MAX_FEATURES:
        raise InvalidInputError(
            f"eval-static enumerates all 2^n subsets; limited to "
            f"n <= {EVAL_STATIC_MAX_FEATURES}"
        )
    rows = []
    for size in range(instance.n + 1):
        for subset in itertools.combinations(range(instance.n), size):
            rows.append({"subset": format_subset(subset), "mse": mse(instance, subset)})
    _emit(args, {"rows": rows}, rows, ["subset", "mse"])
    return 0


def cmd_plan_static(scenario: Scenario, args) -> int:
    plan = optimal_static_subset(scenario.instance)
    rows = _report_rows(scenario, plan.reports)
    payload = {
        "subset": format_subset(plan.subset),
        "features": [i + 1 for i in plan.subset],
        "names": [scenario.names[i] for i in plan.subset],
        "degenerate": plan.degenerate,
        "reports": rows,
    }
    _emit(args, payload, rows, list(rows[0].keys()))
    return 0


def cmd_plan_stationary(scenario: Scenario, args) -> int:
    plan = optimal_stationary_sequence(scenario.instance, scenario.dynamic)
    baseline = discounted_baseline_loss(scenario.instance)
    rows = _report_rows(scenario, plan.reports)
    payload = {
        "subset": format_subset(plan.subset),
        "features": [i + 1 for i in plan.subset],
        "names": [scenario.names[i] for i in plan.subset],
        "total_value": plan.total_value,
        "loss": baseline - plan.total_value,
        "baseline_loss": baseline,
        "degenerate": plan.degenerate,
        "reports": rows,
    }
    _emit(args, payload, rows, list(rows[0].keys()))
    return 0


def cmd_switch_points(scenario: Scenario, args) -> int:
    points = tradeoff.all_switch_points(scenario.instance, scenario.dynamic)
    rows = [
        {
            "i": p.pair.i + 1,
            "j": p.pair.j + 1,
            "delta_info": p.pair.delta_info,
            "delta_div": p.pair.delta_div,
            "kind": p.kind,
            "threshold": "" if p.threshold is None else p.threshold,
        }
        for p in points
    ]
    payload = {
        "points": [
            {**row, "threshold": None if row["threshold"] == "" else row["threshold"]}
            for row in rows
        ]
    }
    _emit(args, payload, rows, ["i", "j", "delta_info", "delta_div", "kind", "threshold"])
    return 0


def cmd_sweep_delta(scenario: Scenario, args) -> int:
    grid = parse_grid(args.grid)
    result = tradeoff.sweep_delta(scenario.instance, scenario.dynamic, grid)
    rows = [
        {
            "delta": r.delta,
            "subset": format_subset(r.subset),
            "total_value": r.total_value,
            "informativeness": r.informativeness,
            "loss": r.loss,
        }
        for r in result.rows
    ]
    _emit(
        args,
        {"rows": rows},
        rows,
        ["delta", "subset", "total_value", "informativeness", "loss"],
    )
    return 0


def cmd_sweep_heatmap(scenario: Scenario, args) -> int:
    deltas = parse_grid(args.grid)
    ws = parse_grid(args.w_grid if args.w_grid else args.grid)
    result = tradeoff.sweep_w_delta_loss_ratio(scenario.instance, ws, deltas)
    rows = [
        {"w": float(w), "delta": float(d), "loss_ratio": float(result.ratios[wi, di])}
        for wi, w in enumerate(result.w_grid)
        for di, d in enumerate(result.delta_grid)
    ]
    payload = {
        "more_informative": result.more_informative + 1,
        "less_informative": result.less_informative + 1,
        "w_grid": result.w_grid.tolist(),
        "delta_grid": result.delta_grid.tolist(),
        "ratios": result.ratios.tolist(),
    }
    _emit(args, payload, rows, ["w", "delta", "loss_ratio"])
    return 0


def cmd_enumerate_subsets(scenario: Scenario, args) -> int:
    intervals = tradeoff.enumerate_optimal_subsets(scenario.instance, scenario.dynamic)
    rows = [
        {
            "delta_lo": iv.lo,
            "delta_hi": iv.hi,
            "subset": format_subset(iv.subset),
            "informativeness": iv.informativeness,
        }
        for iv in intervals
    ]
    _emit(
        args,
        {"intervals": rows},
        rows,
        ["delta_lo", "delta_hi", "subset", "informativeness"],
    )
    return 0


def cmd_verify(scenario: Scenario, args) -> int:
    instance = scenario.instance
    try:
        best_seq, best_value = oracle.exhaustive_prefix_search(
            instance, scenario.dynamic, args.prefix_len, tol=args.tol
        )
        passed = True
    except VerificationError as exc:
        sys.stderr.write(f"verification failed: {exc}\n")
        return 1
    stationary = optimal_stationary_sequence(instance, scenario.dynamic).total_value
    row = {
        "prefix_length": args.prefix_len,
        "tol": args.tol,
        "best_value": best_value,
        "stationary_value": stationary,
        "gap": best_value - stationary,
        "passed": passed,
    }
    payload = {
        **row,
        "best_prefix": [format_subset(s) for s in best_seq.prefix],
        "best_tail": format_subset(best_seq.tail),
    }
    _emit(args, payload, [row], list(row.keys()))
    return 0


def _parse_epsilon(text: str):
    try:
        values = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise InvalidInputError(f"--epsilon: {exc}") from exc
    if not values:
        raise InvalidInputError("--epsilon needs at least one number")
    return values[0] if len(values) == 1 else values


def cmd_misspec(scenario: Scenario, args) -> int:
    kind = robustness.ErrorKind(args.kind)
    spec = robustness.ErrorSpec(kind=kind, epsilon=_parse_epsilon(args.epsilon))
    report = robustness.margins(scenario.instance, spec, scenario.dynamic)
    margin_rows = [
        {
            "feature": i + 1,
            "name": scenario.names[i],
            "lower_margin": float(report.lower_margin[i]),
            "upper_margin": float(report.upper_margin[i]),
        }
        for i in range(scenario.instance.n)
    ]
    payload = {"kind": kind.value, "epsilon": spec.epsilon, "margins": margin_rows}
    rows, header = margin_rows, ["feature", "name", "lower_margin", "upper_margin"]
    status = 0
    if args.trials:
        validation = robustness.validate_bound(
            scenario.instance,
            spec,
            trials=args.trials,
            seed=args.seed,
            dynamic=scenario.dynamic,
        )
        payload["validation"] = validation.to_dict()
        rows = [
            {
                "trial": j,
                "gap": r.gap,
                "bound": r.bound,
                "ratio": "" if r.ratio is None else r.ratio,
            }
            for j, r in enumerate(validation.records)
        ]
        header = ["trial", "gap", "bound", "ratio"]
        if validation.violations:
            status = 1
            sys.stderr.write(
                f"bound violated in {validation.violations} of "
                f"{validation.trials} trials\n"
            )
    _emit(args, payload, rows, header)
    return status


COMMANDS = {
    "eval-static": (cmd_eval_static, "prediction MSE of every feature subset"),
    "plan-static": (cmd_plan_static, "best subset for fixed human beliefs"),
    "plan-stationary": (cmd_plan_stationary, "best repeat-forever subset for a learning human"),
    "switch-points": (cmd_switch_points, "patience thresholds for every ordered feature pair"),
    "sweep-delta": (cmd_sweep_delta, "optimal subset along a patience grid"),
    "sweep-heatmap": (cmd_sweep_heatmap, "retention/patience loss-ratio grid (2 features, k=1)"),
    "enumerate-subsets": (cmd_enumerate_subsets, "optimal subset per patience interval"),
    "verify": (cmd_verify, "brute-force check that no prefixed plan beats the stationary one"),
    "misspec": (cmd_misspec, "error margins and randomized bound validation"),
}


def parse_grid(text: str) -> np.ndarray:
    """Grid syntax: "N" (N cell midpoints in (0,1)), "lo:hi:N", or "a,b,c"."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise InvalidInputError("range grids use the form lo:hi:count")
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise InvalidInputError("grid count must be >= 1")
            return np.linspace(lo, hi, count)
        if "," in text:
            return np.array([float(p) for p in text.split(",") if p.strip() != ""])
        count = int(text)
    except ValueError as exc:
        raise InvalidInputError(f"--grid: {exc}") from exc
    if count < 1:
        raise InvalidInputError("grid count must be >= 1")
    return (np.arange(count) + 0.5) / count


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="teachsel",
        description="Plan feature selections for a learning human predictor.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, blurb) in COMMANDS.items():
        p = sub.add_parser(name, help=blurb, description=blurb)
        p.add_argument("scenario", help="path to a scenario JSON file")
        p.add_argument("--out", default=None, help="write output to this path")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument(
            "--allow-zero-coeff",
            action="store_true",
            help="accept zero true coefficients with a warning",
        )
        p.add_argument(
            "--json-errors",
            action="store_true",
            help="report errors as JSON on stderr",
        )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-9)
        if name in ("sweep-delta", "sweep-heatmap"):
            p.add_argument("--grid", default="100", help='"N", "lo:hi:N", or "a,b,c"')
        if name == "sweep-heatmap":
            p.add_argument("--w-grid", default=None, help="grid for the retention axis")
        if name == "verify":
            p.add_argument("--prefix-len", type=int, default=3)
        if name == "misspec":
            p.add_argument(
                "--kind",
                required=True,
                choices=[k.value for k in robustness.ErrorKind],
            )
            p.add_argument(
                "--epsilon",
                required=True,
                help="error bound: one number or a comma list per feature",
            )
            p.add_argument("--trials", type=int, default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(
            args.scenario, allow_zero_coeff=args.allow_zero_coeff
        )
        return COMMANDS[args.command][0](scenario, args)
    except InvalidInputError as exc:
        if args.json_errors:
            sys.stderr.write(
                json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
            )
        else:
            sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
