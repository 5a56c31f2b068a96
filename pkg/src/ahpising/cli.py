"""Command-line interface.

All subcommands read one JSON instance document (``--input``, default
stdin) and write a report (``--output``, default stdout).  Criterion
indices are 1-based in every input and output.

Exit codes: 0 success, 2 input or contract error, 3 enumeration cap refused.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from ahpising import ensemble, info, market, strategy, tropical

SCHEMA_VERSION = "1.0"
INSTANCE_FIELDS = ("schema_version", "criteria", "judgments", "quotations", "log_returns", "costs", "numeraire")
SPIN_CHECK_TOL = 1e-12

EXIT_OK, EXIT_INPUT, EXIT_CAP = 0, 2, 3


class InputError(Exception):
    pass


@dataclass
class Instance:
    criteria: list[str]
    judgments: np.ndarray | None = None
    quotations: np.ndarray | None = None
    log_returns: np.ndarray | None = None
    costs: np.ndarray | None = None
    numeraire: str | None = None

    @property
    def n(self) -> int:
        return len(self.criteria)

    def returns(self) -> np.ndarray:
        if self.log_returns is not None:
            return self.log_returns
        if self.quotations is not None:
            return market.log_returns(self.quotations)
        raise InputError("log_returns or quotations required")

    def resolved_costs(self) -> np.ndarray:
        if self.costs is not None:
            return self.costs
        if self.judgments is not None:
            return market.cost_matrix(market.decompose(self.judgments))
        raise InputError("costs required (give costs or judgments)")


def _matrix(doc: dict, key: str, rows: int, cols: int | None = None) -> np.ndarray | None:
    raw = doc.get(key)
    if raw is None:
        return None
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{key}: not a numeric matrix ({exc})") from None
    if arr.ndim != 2 or arr.shape[0] != rows or (cols is not None and arr.shape[1] != cols):
        want = f"{rows} x {cols if cols is not None else 'k'}"
        raise InputError(f"{key}: expected {want} matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{key}: entries must be finite")
    return arr


def parse_instance(doc: object) -> Instance:
    if not isinstance(doc, dict):
        raise InputError("instance must be a JSON object")
    unknown = set(doc) - set(INSTANCE_FIELDS)
    if unknown:
        raise InputError(f"unknown instance fields: {sorted(unknown)}")
    criteria = doc.get("criteria")
    if not isinstance(criteria, list) or not criteria or not all(isinstance(x, str) for x in criteria):
        raise InputError("criteria must be a non-empty list of names")
    n = len(criteria)
    inst = Instance(
        criteria=criteria,
        judgments=_matrix(doc, "judgments", n, n),
        quotations=_matrix(doc, "quotations", n),
        log_returns=_matrix(doc, "log_returns", n),
        costs=_matrix(doc, "costs", n, n),
        numeraire=doc.get("numeraire"),
    )
    if inst.numeraire is not None and not isinstance(inst.numeraire, str):
        raise InputError("numeraire must be a name")
    try:
        if inst.judgments is not None:
            market.JudgmentMatrix(inst.judgments)
        if inst.quotations is not None:
            market.log_returns(inst.quotations)
        if inst.log_returns is not None:
            strategy.as_returns(inst.log_returns)
        if inst.costs is not None:
            strategy.as_costs(inst.costs, n)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if inst.log_returns is not None and inst.quotations is not None:
        if inst.log_returns.shape[1] != inst.quotations.shape[1] - 1:
            raise InputError("log_returns and quotations disagree on k")
    return inst


def parse_strategy(text: str, n: int, k: int | None) -> np.ndarray:
    try:
        one_based = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"strategy must be comma-separated integers, got {text!r}") from None
    if any(i < 1 or i > n for i in one_based):
        raise InputError(f"strategy indices are 1-based and must lie in 1..{n}, got {text!r}")
    if k is not None and len(one_based) != k:
        raise InputError(f"strategy has {len(one_based)} steps, instance has k={k}")
    return np.array(one_based, dtype=np.intp) - 1


def _one_based(s) -> list[int]:
    return [int(i) + 1 for i in s]


def _num(x: float) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _mat(a: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in a]


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _dump(report: dict) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def _load(args) -> Instance:
    try:
        if args.input is None or args.input == "-":
            doc = json.load(sys.stdin)
        else:
            with open(args.input, encoding="utf-8") as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read instance: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    return parse_instance(doc)


def _series(inst: Instance) -> tuple[np.ndarray, np.ndarray]:
    return inst.returns(), inst.resolved_costs()


def cmd_decompose(args) -> dict:
    inst = _load(args)
    if inst.judgments is None:
        raise InputError("judgments required")
    u = market.JudgmentMatrix(inst.judgments)
    d = market.decompose(u)
    dev = market.deviation_tensor(u)
    triples = [
        {"triple": [int(v) + 1, int(r) + 1, int(m) + 1], "deviation": float(dev[v, r, m])}
        for v, r, m in zip(*np.nonzero(np.abs(dev) > args.threshold))
    ]
    return {
        "criteria": inst.criteria,
        "skew": _mat(d.skew),
        "commission": _mat(d.commission),
        "costs": _mat(market.cost_matrix(d)),
        "negative_costs": bool(np.any(market.cost_matrix(d) < 0)),
        "deviation_threshold": args.threshold,
        "deviations": triples,
        "priorities": [float(x) for x in market.priority_vector(u)],
    }


def cmd_profit(args) -> dict:
    inst = _load(args)
    h, c = _series(inst)
    s = parse_strategy(args.strategy, inst.n, h.shape[1])
    field, cost = strategy.step_contributions(s, h, c)
    value = strategy.profit(s, h, c)
    spin_value = strategy.spin_profit(s, h, c)
    return {
        "strategy": _one_based(s),
        "profit": value,
        "field": [float(x) for x in field],
        "cost": [float(x) for x in cost],
        "spin_profit": spin_value,
        "spin_identity_ok": abs(spin_value - value) <= SPIN_CHECK_TOL * max(1.0, abs(value)),
    }


def _observables_dict(o: ensemble.EnsembleObservables) -> dict:
    residual = o.identity_residual()
    return {
        "beta": o.beta,
        "temperature": _num(o.temperature),
        "infinite_temperature": o.infinite_temperature,
        "log_z": o.log_z,
        "expected_profit": o.expected_profit,
        "variance": o.variance,
        "entropy": o.entropy,
        "identity_residual": _num(residual),
    }


def cmd_ensemble(args) -> dict:
    if not math.isfinite(args.beta):
        raise InputError(f"beta must be finite, got {args.beta!r}")
    inst = _load(args)
    h, c = _series(inst)
    report = _observables_dict(ensemble.observables(args.beta, h, c))
    if args.brute_force:
        oracle = ensemble.brute_force_partition(args.beta, h, c, cap=args.cap)
        report["brute_force_log_z"] = oracle
        report["relative_gap"] = abs(report["log_z"] - oracle) / max(abs(oracle), 1.0)
    return report


def cmd_optimize(args) -> dict:
    inst = _load(args)
    h, c = _series(inst)
    res = tropical.clairvoyant(h, c)
    field, cost = strategy.step_contributions(res.strategy, h, c)
    return {
        "max_profit": res.max_profit,
        "strategy": _one_based(res.strategy),
        "field": [float(x) for x in field],
        "cost": [float(x) for x in cost],
    }


def _uniform_offdiagonal(c: np.ndarray) -> float | None:
    off = c[~np.eye(c.shape[0], dtype=bool)]
    if off.size == 0:
        return 0.0
    return float(off[0]) if np.all(off == off[0]) else None


def cmd_fisher(args) -> dict:
    inst = _load(args)
    h = None
    if inst.log_returns is not None or inst.quotations is not None:
        h = inst.returns()
    s = parse_strategy(args.strategy, inst.n, None if h is None else h.shape[1])
    report = info.strategy_fisher(s, inst.n)
    out = {
        "strategy": _one_based(s),
        "per_criterion": [float(x) for x in report.per_criterion],
        "total": report.total,
    }
    if h is not None and (inst.costs is not None or inst.judgments is not None):
        c = inst.resolved_costs()
        flat = _uniform_offdiagonal(c)
        if flat is not None and flat >= 0:
            _, cost = strategy.step_contributions(s, h, c)
            out["uniform_cost"] = flat
            out["cost_of_information"] = info.cost_of_information(report, flat)
            out["hamiltonian_cost"] = float(cost.sum())
    return out


SCAN_COLUMNS = (
    "beta", "temperature", "log_z", "expected_profit", "variance", "entropy", "dE_dS", "free_profit",
)


def cmd_scan(args) -> dict | str:
    if args.points < 2:
        raise InputError("--points must be at least 2")
    if not (math.isfinite(args.beta_from) and math.isfinite(args.beta_to)):
        raise InputError("beta bounds must be finite")
    inst = _load(args)
    h, c = _series(inst)
    betas = np.linspace(args.beta_from, args.beta_to, args.points)
    scan = ensemble.temperature_scan(betas, h, c)
    slopes = ensemble.entropy_slope(scan)
    rows = []
    for o, slope in zip(scan, slopes):
        rows.append({
            "beta": o.beta,
            "temperature": _num(o.temperature),
            "log_z": o.log_z,
            "expected_profit": o.expected_profit,
            "variance": o.variance,
            "entropy": o.entropy,
            "dE_dS": slope,
            "free_profit": _num(o.free_profit),
        })
    e = [r["expected_profit"] for r in rows]
    diffs = np.diff(e)
    diagnostics = {
        "expected_profit_monotone": bool(np.all(diffs <= 0) or np.all(diffs >= 0)),
        "max_profit": tropical.max_profit(h, c),
    }
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SCAN_COLUMNS)
        for r in rows:
            writer.writerow(["" if r[col] is None else repr(float(r[col])) for col in SCAN_COLUMNS])
        return buf.getvalue()
    return {"columns": list(SCAN_COLUMNS), "rows": rows, "diagnostics": diagnostics}


def generate_instance(n: int, k: int, seed: int, cost_scale: float = 0.01, return_scale: float = 0.05) -> dict:
    """Random instance: Gaussian log returns and symmetric nonnegative costs.

    The judgment matrix pairs random priorities with the generated costs, so
    decomposing it gives the costs back.
    """
    rng = np.random.default_rng(seed)
    h = rng.normal(0.0, return_scale, size=(n, k))
    upper = np.triu(rng.uniform(0.0, cost_scale, size=(n, n)), 1)
    costs = upper + upper.T
    log_w = rng.normal(0.0, 1.0, size=n)
    judgments = np.exp(log_w[:, None] - log_w[None, :] - costs)
    np.fill_diagonal(judgments, 1.0)
    return {
        "schema_version": SCHEMA_VERSION,
        "criteria": [f"c{i + 1}" for i in range(n)],
        "judgments": _mat(judgments),
        "log_returns": _mat(h),
        "costs": _mat(costs),
    }


def cmd_generate(args) -> dict:
    if args.n < 1 or args.k < 1:
        raise InputError("--n and --k must be at least 1")
    if not (args.cost_scale >= 0 and args.return_scale >= 0):
        raise InputError("scales must be nonnegative")
    if not 0 <= args.seed < 2**64:
        raise InputError("--seed must be an unsigned 64-bit integer")
    return generate_instance(args.n, args.k, args.seed, args.cost_scale, args.return_scale)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="instance JSON (default: stdin)")
    common.add_argument("--output", metavar="PATH", help="report destination (default: stdout)")

    parser = argparse.ArgumentParser(prog="ahpising", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", parents=[common], help="split judgments into log-rates and commissions")
    p.add_argument("--threshold", type=float, default=1e-9, help="report triple deviations above this size")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("profit", parents=[common], help="profit of a pure strategy")
    p.add_argument("--strategy", required=True, help="comma-separated 1-based criterion indices")
    p.set_defaults(func=cmd_profit)

    p = sub.add_parser("ensemble", parents=[common], help="Gibbs-ensemble observables at one beta")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--brute-force", action="store_true", help="cross-check ln Z by enumeration")
    p.add_argument("--cap", type=int, default=ensemble.ENUMERATION_CAP, help="enumeration cap in paths")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("optimize", parents=[common], help="maximum-profit (clairvoyant) strategy")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("fisher", parents=[common], help="Fisher information of a pure strategy")
    p.add_argument("--strategy", required=True)
    p.set_defaults(func=cmd_fisher)

    p = sub.add_parser("scan", parents=[common], help="observables over a beta grid")
    p.add_argument("--beta-from", type=float, required=True)
    p.add_argument("--beta-to", type=float, required=True)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("generate", parents=[common], help="emit a random instance document")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cost-scale", type=float, default=0.01)
    p.add_argument("--return-scale", type=float, default=0.05)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ensemble.EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(result if isinstance(result, str) else _dump(result), args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
