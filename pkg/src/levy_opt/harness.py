"""Experiment runners and CSV/JSON output."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from . import _backend, __version__
from .discrete import (McConfig, Method, QuadConfig, discrete_value_function, eval_gN,
                       optimal_discrete)
from .model import MarketModel, validate_model
from .objective import continuous_value, eval_g
from .optimizer import DERIV_TOL, WIDTH_TOL, optimal_continuous
from .wealth_sim import l2_terminal_gap

DEFAULT_GRID = 20          # G: grid {0, 1/G, ..., 1}
SIGN_TOL = 1e-8


class ModelInvalid(ValueError):
    """Config failed the standing assumptions."""

    def __init__(self, report):
        super().__init__(str(report))
        self.report = report


def require_valid(model: MarketModel) -> None:
    report = validate_model(model)
    if not report.ok:
        raise ModelInvalid(report)


def unit_grid(size: int) -> list[float]:
    if size < 10:
        raise ValueError(f"sup-norm grid needs G >= 10, got {size}")
    return [i / size for i in range(size + 1)]


def sup_norm_gap(values: Sequence[float], reference: Sequence[float]) -> float:
    """Max absolute difference of two functions sampled on the same grid.

    For concave functions on ``[0, 1]`` that converge pointwise, this grid
    quantity also controls the uniform distance, which is why a modest grid
    suffices for the convergence study.
    """
    return max(abs(a - b) for a, b in zip(values, reference, strict=True))


def method_description(method: Method) -> dict[str, Any]:
    if isinstance(method, McConfig):
        return {"method": "mc", "paths": method.paths, "seed": method.seed,
                "antithetic": method.antithetic}
    return {"method": "quad", "k_max": method.k_max, "nodes": method.nodes}


# ----------------------------------------------------------- reports

@dataclass
class ConvergenceRow:
    N: int
    pi_star: float
    objective: float
    value: float
    sup_gap: float
    value_gap: float
    l2_gap: float | None
    l2_gap_se: float | None


@dataclass
class ConvergenceReport:
    rows: list[ConvergenceRow]
    pi_star_c: float
    objective_c: float
    value_c: float
    grid_size: int
    metadata: dict[str, Any] = field(default_factory=dict)

    COLUMNS = ("N", "pi_star", "objective", "value", "sup_gap", "value_gap", "l2_gap", "l2_gap_se")

    def table(self) -> list[list[Any]]:
        out = [[getattr(r, c) for c in self.COLUMNS] for r in self.rows]
        out.append(["inf", self.pi_star_c, self.objective_c, self.value_c, 0.0, 0.0, None, None])
        return out


@dataclass
class PropertyRow:
    p: float
    pi_star: float
    pi_star_N: float
    sign_check: bool
    monotonicity_check: bool


@dataclass
class PropertyReport:
    rows: list[PropertyRow]
    N: int
    b: float
    metadata: dict[str, Any] = field(default_factory=dict)

    COLUMNS = ("p", "pi_star", "pi_star_N", "sign_check", "monotonicity_check")

    @property
    def ok(self) -> bool:
        return all(r.sign_check and r.monotonicity_check for r in self.rows)

    def table(self) -> list[list[Any]]:
        return [[getattr(r, c) for c in self.COLUMNS] for r in self.rows]


# ----------------------------------------------------------- runners

def run_convergence_study(model: MarketModel, n_list: Sequence[int], grid_size: int = DEFAULT_GRID,
                          method: Method = QuadConfig(), l2: McConfig | None = McConfig()) -> ConvergenceReport:
    """Per-N discrete optimum, sup-norm objective gap, value gap and L2 wealth gap."""
    require_valid(model)
    if list(n_list) != sorted(set(n_list)) or not n_list or n_list[0] < 1:
        raise ValueError("N-list must be strictly ascending positive integers")
    grid = unit_grid(grid_size)
    g_grid = [eval_g(model, x).value for x in grid]
    ref = optimal_continuous(model, "unit")
    value_c = continuous_value(model, ref.pi)

    rows = []
    for n in n_list:
        res = optimal_discrete(model, n, method)
        gn_grid = [eval_gN(model, n, x, method).value for x in grid]
        value_n = discrete_value_function(model, n, res.pi, method)
        l2_est = l2_se = None
        if l2 is not None:
            gap = l2_terminal_gap(model, res.pi, ref.pi, n, l2)["product_exact"]
            scale = model.x0 ** 2
            l2_est, l2_se = gap.estimate * scale, gap.stderr * scale
        rows.append(ConvergenceRow(n, res.pi, res.value, value_n, sup_norm_gap(gn_grid, g_grid),
                                   abs(value_n - value_c), l2_est, l2_se))

    meta = {
        "grid_size": grid_size,
        "N_list": list(n_list),
        **method_description(method),
        "l2": None if l2 is None else {"paths": l2.paths, "seed": l2.seed},
        "reference": {"pi_star_c": ref.pi, "objective_c": ref.value, "value_c": value_c,
                      "boundary": ref.boundary},
    }
    return ConvergenceReport(rows, ref.pi, ref.value, value_c, grid_size, meta)


def run_property_checks(model: MarketModel, p_list: Sequence[float], n_periods: int = 256,
                        method: Method = QuadConfig()) -> PropertyReport:
    """Sign of the optimal strategies and their monotonicity in ``p``."""
    if list(p_list) != sorted(set(p_list)) or not p_list:
        raise ValueError("p-list must be strictly increasing")
    if any(p <= 0 for p in p_list):
        raise ValueError("risk aversion values must be positive")
    b = model.triplet.b
    rows: list[PropertyRow] = []
    for p in p_list:
        mp = model.with_p(p)
        require_valid(mp)
        cont = optimal_continuous(mp, "none").pi
        disc = optimal_discrete(mp, n_periods, method).pi
        if b > 0:
            sign_ok = cont >= -SIGN_TOL and disc >= -SIGN_TOL
        elif b < 0:
            sign_ok = cont <= SIGN_TOL and disc <= SIGN_TOL
        else:
            sign_ok = abs(cont) <= SIGN_TOL and abs(disc) <= SIGN_TOL
        if cont >= 1.0:
            sign_ok = sign_ok and disc >= 1.0 - SIGN_TOL
        if rows:
            prev = rows[-1]
            if b > 0:
                mono = cont <= prev.pi_star + SIGN_TOL and disc <= prev.pi_star_N + SIGN_TOL
            elif b < 0:
                mono = cont >= prev.pi_star - SIGN_TOL and disc >= prev.pi_star_N - SIGN_TOL
            else:
                mono = abs(cont - prev.pi_star) <= SIGN_TOL and abs(disc - prev.pi_star_N) <= SIGN_TOL
        else:
            mono = True
        rows.append(PropertyRow(p, cont, disc, sign_ok, mono))
    meta = {"N": n_periods, "p_list": list(p_list), **method_description(method)}
    return PropertyReport(rows, n_periods, b, meta)


# ----------------------------------------------------------- output

def format_cell(value: Any) -> str:
    """Shortest round-trip text for floats; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def csv_text(columns: Iterable[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(columns))
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def run_metadata(command: str, model: MarketModel, extra: dict[str, Any] | None = None) -> dict[str, Any]:
    meta = {
        "command": command,
        "version": __version__,
        "backend": _backend.BACKEND,
        "config": model.to_config(),
        "tolerances": {"derivative": DERIV_TOL, "bracket_width": WIDTH_TOL},
    }
    meta.update(extra or {})
    return meta


def json_text(payload: dict[str, Any]) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_outputs(out_dir: str | Path, stem: str, csv_body: str, payload: dict[str, Any]) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    csv_path.write_text(csv_body, encoding="utf-8")
    json_path.write_text(json_text(payload), encoding="utf-8")
    return csv_path, json_path


def report_payload(report: ConvergenceReport | PropertyReport) -> dict[str, Any]:
    return {"columns": list(report.COLUMNS), "rows": [asdict(r) for r in report.rows],
            **report.metadata}
