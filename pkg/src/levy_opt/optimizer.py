"""Maximisation of concave functions of one variable by derivative bisection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

from .model import AdmissibleInterval, MarketModel, admissible_set
from .objective import eval_g, eval_g_prime

DERIV_TOL = 1e-10
WIDTH_TOL = 1e-12
MAX_EXPANSIONS = 60
MAX_BISECTIONS = 400

Boundary = Literal["interior", "lower", "upper"]


class UnboundedProblemError(ArithmeticError):
    """The derivative never changes sign: the supremum is not attained."""


@dataclass(frozen=True)
class OptResult:
    pi: float
    value: float
    boundary: Boundary
    residual: float
    iterations: int

    @property
    def interior(self) -> bool:
        return self.boundary == "interior"


def _anchor(interval: AdmissibleInterval) -> float:
    lo, hi = interval.lower, interval.upper
    if interval.in_interior(0.0):
        return 0.0
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    return lo + 1.0 if math.isfinite(lo) else hi - 1.0


def maximize_concave_1d(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    interval: AdmissibleInterval,
    tol: float = DERIV_TOL,
    width_tol: float = WIDTH_TOL,
) -> OptResult:
    """Maximise a concave differentiable ``f`` over ``interval``.

    Closed endpoints are tested first; an outward-pointing one-sided
    derivative makes the endpoint optimal.  Otherwise the sign change of
    ``fprime`` is bracketed from an interior anchor, doubling the step
    toward an infinite bound and halving the distance to a finite open
    one, then bisected until ``|fprime| <= tol`` or the bracket is narrower
    than ``width_tol``.  Open endpoints are never evaluated.
    """
    evals = 0

    def d(x: float) -> float:
        nonlocal evals
        evals += 1
        return fprime(x)

    def result(x: float, dx: float, where: Boundary) -> OptResult:
        return OptResult(x, float(f(x)), where, abs(dx), evals)

    lo_b, hi_b = interval.lower, interval.upper
    if interval.lower_closed:
        dl = d(lo_b)
        if dl <= 0.0:
            return result(lo_b, dl, "lower")
    if interval.upper_closed:
        du = d(hi_b)
        if du >= 0.0:
            return result(hi_b, du, "upper")

    m = _anchor(interval)
    dm = d(m)
    if dm == 0.0:
        return result(m, dm, "interior")

    # walk from the anchor in the ascent direction until the derivative flips
    direction = 1.0 if dm > 0 else -1.0
    bound = hi_b if direction > 0 else lo_b
    closed = interval.upper_closed if direction > 0 else interval.lower_closed
    inner, d_inner, outer = m, dm, None
    step = 1.0
    for _ in range(MAX_EXPANSIONS):
        if math.isinf(bound):
            probe = m + direction * step
            step *= 2.0
        elif closed:
            # derivative at a closed endpoint is already known to point inward
            outer = bound
            break
        else:
            probe = inner + 0.5 * (bound - inner)
        dp = d(probe)
        if dp == 0.0:
            return result(probe, dp, "interior")
        if (dp > 0) == (direction > 0):
            inner, d_inner = probe, dp
        else:
            outer = probe
            break
    if outer is None:
        raise UnboundedProblemError(
            "derivative keeps its sign toward "
            f"{'+' if direction > 0 else '-'}{'inf' if math.isinf(bound) else bound}")

    lo, hi = (inner, outer) if direction > 0 else (outer, inner)
    x, dx = inner, d_inner
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= width_tol:
            break
        x = 0.5 * (lo + hi)
        dx = d(x)
        if abs(dx) <= tol:
            break
        if dx > 0.0:
            lo = x
        else:
            hi = x
    return result(x, dx, "interior")


def optimal_continuous(model: MarketModel, constraint: str = "none") -> OptResult:
    """Optimal constant strategy, unconstrained (``"none"``) or on ``[0, 1]`` (``"unit"``)."""
    if constraint in ("none", "unconstrained"):
        interval = admissible_set(model.triplet, model.utility)
    elif constraint in ("unit", "unit-interval"):
        interval = AdmissibleInterval.unit()
    else:
        raise ValueError(f"unknown constraint {constraint!r}")
    return maximize_concave_1d(lambda x: eval_g(model, x).value,
                               lambda x: eval_g_prime(model, x),
                               interval)
