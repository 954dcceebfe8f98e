"""Command-line driver: states, sweeps over r, gain tables, thresholds and certification.

Exit status: 0 on success, 1 for invalid input, 2 when a computation fails.
Set ARTIFACT_OUTPUT_DIR to redirect relative ``--output`` paths.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import certify as cert
from .criteria import (
    VLF_NAMES,
    CriterionReport,
    classify,
    cluster_pair_rule,
    cluster_vlf_quantities,
    criterion1,
    criterion1b,
    criterion2,
    criterion3,
    criterion4,
    criterion4b,
    criterion5,
    criterion5b,
    criterion5c,
    criterion6c,
    criterion7,
    dgcz,
    directional_steering,
    giovannetti,
    vlf_quantities,
)
from .errors import ArtifactError, InvalidArgument, Unsupported, ValidationError
from .gains import cluster_gainsets, epr_gains, ghz_gains_for, optimize_steering_gains, ss_gains
from .monogamy import entanglement_monogamy_dgcz, entanglement_monogamy_general, steering_monogamy
from .networks import FAMILIES, NetworkSpec, asymmetric_r1, build, family_state
from .phase_space import GaussianState
from .quad_forms import Bipartition, enumerate_bipartitions, mode_label
from .tables import TABLES, reproduce_row, table_name

OUTPUT_ENV = "ARTIFACT_OUTPUT_DIR"
THRESHOLD_TOL = 1e-3
THRESHOLD_MAX_ITER = 60
DEFAULT_GRID = (0.0, 2.5, 101)

CRITERIA = (
    "criterion1",
    "criterion1b",
    "criterion2",
    "criterion3",
    "criterion4",
    "criterion4b",
    "criterion5",
    "criterion5b",
    "criterion5c",
    "criterion6c",
    "criterion7",
    "cluster_vlf",
    "two-way",
    "dgcz",
    "giovannetti",
)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    family: str
    n: int
    R1: float | None
    grid: tuple[float, ...]
    criteria: tuple[str, ...]
    strategy: str
    fmt: str
    output: str | None
    jobs: int = 1

    def __post_init__(self) -> None:
        if not self.grid:
            raise InvalidArgument("the r-grid is empty")
        if self.R1 is not None and not 0.0 < self.R1 < 1.0:
            raise InvalidArgument(f"R1 must lie in (0, 1), got {self.R1}")


# ---------------------------------------------------------------- evaluation helpers


def symmetric_gains(family: str, n: int, r: float, state: GaussianState | None = None, strategy: str = "analytic", R1: float | None = None) -> tuple[float, float]:
    """Per-mode (h, g) for u = x1 + h sum x_i, v = p1 + g sum p_i.

    ``analytic`` uses the closed-form gains that minimise S_{1|rest};
    ``optimized`` averages the remote gains found by the simplex search.
    """
    if strategy == "optimized":
        state = state if state is not None else family_state(family, n, r, R1)
        gs = optimize_steering_gains(state, [0], range(1, n))
        return float(np.mean([gs.h[m] for m in range(1, n)])), float(np.mean([gs.g[m] for m in range(1, n)]))
    if strategy != "analytic":
        raise InvalidArgument(f"unknown gain strategy {strategy!r}")
    scale = np.sqrt(n - 1)
    if family == "epr":
        gx, gp = epr_gains(r, 0.5 if R1 is None else R1)
        return -gx / scale, gp / scale
    if family == "ss":
        gx, gp = ss_gains(r, 0.5 if R1 is None else R1)
        return -gx / scale, gp / scale
    if family == "ghz":
        return ghz_gains_for(n, r, r)
    if family == "ghz-asym":
        return ghz_gains_for(n, asymmetric_r1(n, r), r)
    raise InvalidArgument(f"no closed-form symmetric gains for family {family!r}")


def _two_way(state: GaussianState, family: str) -> CriterionReport:
    """Largest normalised S over both directions of every bipartition; below 1 means full two-way."""
    reports = []
    if family == "cluster":
        for k, gs in enumerate(cluster_gainsets()):
            rest = [m for m in range(3) if m != k]
            reports += [directional_steering(state, [k], rest, gs), directional_steering(state, rest, [k], gs)]
    else:
        for p in enumerate_bipartitions(state.n_modes):
            a, b = p.sides()
            reports += [directional_steering(state, a, b), directional_steering(state, b, a)]
    worst = max(reports, key=lambda rep: rep.value)
    violated = all(rep.violated for rep in reports)
    terms = {rep.details["direction"]: rep.value for rep in reports}
    return CriterionReport("two-way", worst.value, 1.0, violated, ("full-two-way",) if violated else (), terms, {"directions": terms})


def evaluate(name: str, family: str, n: int, r: float, R1: float | None = None, strategy: str = "analytic") -> CriterionReport:
    """One criterion on one state of a family."""
    state = family_state(family, n, r, R1)
    if name == "criterion1b":
        h, g = symmetric_gains(family, n, r, state, strategy, R1)
        return criterion1b(state, h, g)
    if name in ("criterion1", "criterion2"):
        gs = optimize_steering_gains(state, [0], range(1, n))
        u, v = gs.forms(n)
        return (criterion1 if name == "criterion1" else criterion2)(state, u, v)
    if name == "two-way":
        return _two_way(state, family)
    if name == "dgcz":
        return dgcz(state, 0, 1)
    if name == "giovannetti":
        return giovannetti(state, 0, 1)
    if n != 3:
        raise Unsupported(f"{name} is defined for three modes")
    if name == "criterion3":
        if family == "cluster":
            return criterion3(state, cluster_gainsets())
        return criterion3(state, [optimize_steering_gains(state, [k], [m for m in range(3) if m != k]) for k in range(3)])
    if name == "cluster_vlf":
        q = cluster_vlf_quantities(state)
        return cluster_pair_rule(q["B'_I"], q["B'_II"])
    q = vlf_quantities(state)
    s = [q[f"S_{v}"] for v in VLF_NAMES]
    b = [q[f"B_{v}"] for v in VLF_NAMES]
    table: dict[str, Callable[[], CriterionReport]] = {
        "criterion4": lambda: criterion4(s),
        "criterion4b": lambda: criterion4b(b),
        "criterion5": lambda: criterion5(s),
        "criterion5b": lambda: criterion5b(b),
        "criterion5c": lambda: criterion5c(s),
        "criterion6c": lambda: criterion6c(b),
        "criterion7": lambda: criterion7(s, "S"),
    }
    if name not in table:
        raise InvalidArgument(f"unknown criterion {name!r}; choose from {', '.join(CRITERIA)}")
    return table[name]()


def bisect_threshold(violated: Callable[[float], bool], lo: float, hi: float, tol: float = THRESHOLD_TOL, max_iter: int = THRESHOLD_MAX_ITER) -> float:
    """Smallest r in [lo, hi] with ``violated(r)``, assuming a single crossing."""
    if violated(lo):
        return lo
    if not violated(hi):
        raise ArtifactError(f"criterion not violated anywhere in [{lo}, {hi}]")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if violated(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def threshold(family: str, n: int, criterion: str, R1: float | None = None, strategy: str = "analytic", lo: float | None = None, hi: float = 2.5) -> float:
    if lo is None:
        # the asymmetric family needs r2 > 0
        lo = 1e-6 if family == "ghz-asym" else 0.0
    return bisect_threshold(lambda r: evaluate(criterion, family, n, r, R1, strategy).violated, lo, hi)


# ---------------------------------------------------------------- row producers


def _map(fn: Callable[[float], dict[str, Any]], grid: Sequence[float], jobs: int) -> list[dict[str, Any]]:
    if jobs <= 1:
        return [fn(r) for r in grid]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, grid))  # map keeps grid order


def _direction(text: str | None, n: int) -> tuple[frozenset[int], frozenset[int]]:
    if text is None:
        return frozenset([0]), frozenset(range(1, n))
    a, b = Bipartition.parse(text)
    if max(a | b) >= n:
        raise InvalidArgument(f"direction {text!r} references modes beyond {n}")
    return a, b


def steer_rows(cfg: RunConfig, direction: str | None) -> list[dict[str, Any]]:
    steered, steerers = _direction(direction, cfg.n)
    col = f"S_{mode_label(steered)}|{mode_label(steerers)}"

    def row(r: float) -> dict[str, Any]:
        gs = optimize_steering_gains(family_state(cfg.family, cfg.n, r, cfg.R1), steered, steerers)
        return {"r": r, col: gs.value}

    return _map(row, cfg.grid, cfg.jobs)


def criteria_rows(cfg: RunConfig) -> list[dict[str, Any]]:
    def row(r: float) -> dict[str, Any]:
        out: dict[str, Any] = {"r": r}
        for name in cfg.criteria:
            rep = evaluate(name, cfg.family, cfg.n, r, cfg.R1, cfg.strategy)
            out[name] = rep.value
            out[f"{name}_bound"] = rep.bound
            out[f"{name}_violated"] = rep.violated
        return out

    return _map(row, cfg.grid, cfg.jobs)


def monogamy_rows(cfg: RunConfig, k: int, gains: str) -> list[dict[str, Any]]:
    if cfg.n != 3:
        raise InvalidArgument("monogamy relations are evaluated on three-mode states")
    l, m = [i for i in range(3) if i != k]

    def row(r: float) -> dict[str, Any]:
        state = family_state(cfg.family, 3, r, cfg.R1)
        reports = [*steering_monogamy(state, k, l, m), *entanglement_monogamy_dgcz(state, k, l, m)]
        reports.append(entanglement_monogamy_general(state, k, l, m, gains=gains))  # type: ignore[arg-type]
        out: dict[str, Any] = {"r": r}
        for rep in reports:
            out[f"{rep.relation}_lhs"] = rep.lhs
            out[f"{rep.relation}_rhs"] = rep.rhs
            out[f"{rep.relation}_saturated"] = rep.saturated
        steer = reports[0].details
        ent = reports[2].details
        gen = reports[4].details
        out.update({"S_k|l": steer["S_k|l"], "S_k|m": steer["S_k|m"], "S_k|lm": steer["S_k|lm"]})
        out.update({"B_kl": ent["B_kl"], "B_km": ent["B_km"], "S_kl": gen["S_kl"], "S_km": gen["S_km"], "S_lk": gen["S_lk"]})
        return out

    return _map(row, cfg.grid, cfg.jobs)


def gains_rows(family: str, kind: str, rs: Sequence[float] | None, decimals: int | None) -> list[dict[str, Any]]:
    name = table_name(family, kind)
    table = TABLES[name]
    rows = []
    for r in rs if rs else sorted(table.rows):
        values = reproduce_row(name, r)
        row: dict[str, Any] = {"r": r}
        for col, v in zip(table.columns(), values):
            row[col] = round(v, decimals) if decimals is not None else v
        rows.append(row)
    return rows


# ---------------------------------------------------------------- output


def _cell(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def render(rows: list[dict[str, Any]] | dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, sort_keys=isinstance(rows, dict), indent=2, default=float) + "\n"
    if isinstance(rows, dict):
        raise InvalidArgument("this output is only available as json")
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    return buf.getvalue()


def output_path(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    p = output_path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


# ---------------------------------------------------------------- argument parsing


def _grid(args: argparse.Namespace) -> tuple[float, ...]:
    if getattr(args, "r", None):
        return tuple(float(r) for r in args.r)
    if args.points < 1:
        raise InvalidArgument("--points must be at least 1")
    return tuple(float(r) for r in np.linspace(args.start, args.stop, args.points))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artifact", description="Multipartite CV steering toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser, family: bool = True, grid: bool = True) -> None:
        if family:
            p.add_argument("--family", choices=FAMILIES, default="ghz")
            p.add_argument("--n", type=int, default=3)
            p.add_argument("--R1", type=float, default=None, help="first splitter reflectivity (epr, ss, cluster)")
        if grid:
            p.add_argument("--start", type=float, default=DEFAULT_GRID[0])
            p.add_argument("--stop", type=float, default=DEFAULT_GRID[1])
            p.add_argument("--points", type=int, default=DEFAULT_GRID[2])
            p.add_argument("--r", type=float, action="append", help="explicit r value (repeatable); overrides the grid")
            p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None)

    p = sub.add_parser("state", help="dump a covariance matrix")
    common(p, grid=False)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--spec", default=None, help="JSON network spec file instead of a family")

    p = sub.add_parser("steer", help="sweep an optimised steering product over r")
    common(p)
    p.add_argument("--direction", default=None, help="steered|steering, e.g. 1|23 (default 1|rest)")

    p = sub.add_parser("gains", help="reproduce a published optimal-gain table")
    p.add_argument("--family", choices=("ghz", "ghz-asym", "epr", "ss"), default="ghz")
    p.add_argument("--table", default="1-23", help="fixed, 1-23 or 23-1")
    p.add_argument("--r", type=float, action="append")
    p.add_argument("--decimals", type=int, default=2)
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)

    p = sub.add_parser("criteria", help="evaluate criteria over r")
    common(p)
    p.add_argument("--criterion", action="append", choices=CRITERIA, help="repeatable; default criterion1b")
    p.add_argument("--strategy", choices=("analytic", "optimized"), default="analytic")

    p = sub.add_parser("monogamy", help="monogamy relations over r")
    common(p)
    p.add_argument("--k", type=int, default=1, help="1-based focus mode")
    p.add_argument("--mono2-gains", choices=("entanglement", "steering"), default="entanglement")

    p = sub.add_parser("certify", help="certify a measurement file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="measurement JSON file")
    src.add_argument("--bundled", help="name of a bundled measurement file")
    p.add_argument("--format", dest="fmt", choices=("json",), default="json")
    p.add_argument("--output", default=None)

    p = sub.add_parser("threshold", help="bisect the smallest r violating a criterion")
    common(p, grid=False)
    p.add_argument("--criterion", choices=CRITERIA, default="criterion1b")
    p.add_argument("--strategy", choices=("analytic", "optimized"), default="analytic")
    p.add_argument("--hi", type=float, default=2.5)

    p = sub.add_parser("classify", help="steering class of one state")
    common(p, grid=False)
    p.add_argument("--r", type=float, default=1.0)
    p.set_defaults(fmt="json")
    return parser


def run(args: argparse.Namespace) -> str:
    cmd = args.subcommand
    if cmd == "gains":
        rows = gains_rows(args.family, args.table, args.r, args.decimals)
        return render(rows, args.fmt)
    if cmd == "certify":
        if args.input:
            try:
                doc = json.loads(Path(args.input).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read {args.input}: {exc}") from exc
            records = cert.load_measurements(doc)
            n = doc.get("n_modes")
        else:
            if args.bundled not in cert.bundled_files():
                raise InvalidArgument(f"unknown bundled file {args.bundled!r}; have {', '.join(cert.bundled_files())}")
            records = cert.load_bundled(args.bundled)
            n = None
        return cert.certify(records, n).to_json()
    if cmd == "state":
        if args.spec:
            try:
                spec = NetworkSpec.from_dict(json.loads(Path(args.spec).read_text()))
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read {args.spec}: {exc}") from exc
            state = build(spec)
        else:
            state = family_state(args.family, args.n, args.r, args.R1)
        if args.fmt == "json":
            return render({"n_modes": state.n_modes, "cov": state.cov.tolist()}, "json")
        labels = [f"{q}{m + 1}" for m in range(state.n_modes) for q in ("x", "p")]
        return render([{"row": lab, **dict(zip(labels, map(float, line)))} for lab, line in zip(labels, state.cov)], "csv")
    if cmd == "threshold":
        r_star = threshold(args.family, args.n, args.criterion, args.R1, args.strategy, hi=args.hi)
        row: dict[str, Any] = {"family": args.family, "n": args.n, "criterion": args.criterion, "r": r_star}
        if args.family == "ghz-asym":
            row["r1"] = asymmetric_r1(args.n, r_star)
        return render([row], args.fmt)
    if cmd == "classify":
        sc, reports = classify(family_state(args.family, args.n, args.r, args.R1))
        return render({**sc.to_dict(), "reports": [rep.to_dict() for rep in reports]}, "json")

    cfg = RunConfig(
        cmd,
        args.family,
        args.n,
        args.R1,
        _grid(args),
        tuple(getattr(args, "criterion", None) or ("criterion1b",)),
        getattr(args, "strategy", "analytic"),
        args.fmt,
        args.output,
        args.jobs,
    )
    if cmd == "steer":
        return render(steer_rows(cfg, args.direction), args.fmt)
    if cmd == "criteria":
        return render(criteria_rows(cfg), args.fmt)
    if cmd == "monogamy":
        if not 1 <= args.k <= 3:
            raise InvalidArgument("--k must be 1, 2 or 3")
        return render(monogamy_rows(cfg, args.k - 1, args.mono2_gains), args.fmt)
    raise InvalidArgument(f"unknown subcommand {cmd!r}")


def _fail(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        text = run(args)
        emit(text, args.output)
    except (InvalidArgument, ValidationError, Unsupported) as exc:
        return _fail("validation", exc, 1)
    except (ArtifactError, ArithmeticError, AssertionError, np.linalg.LinAlgError) as exc:
        return _fail("compute", exc, 2)
    except OSError as exc:
        return _fail("io", exc, 2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
