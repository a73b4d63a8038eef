"""Continuous-time objective ``g`` and its derivative.

For a constant fraction ``pi`` the expected power utility of terminal wealth
is ``x0**(1-p)/(1-p) * exp((1-p) * g(pi) * T)`` (``log x0 + g(pi) T`` for log
utility), so the optimal constant strategy maximises the concave function

    g(pi) = pi b - p pi^2 c / 2 + sum_i lam_i [((1 + pi x_i)^(1-p) - 1)/(1-p) - pi x_i]

with the ``log(1 + pi x_i)`` branch at ``p = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import MarketModel, admissible_set


class ObjectiveDomainError(ValueError):
    """Strategy lies outside the set where the objective is defined."""


@dataclass(frozen=True)
class ObjectiveValue:
    value: float
    finite: bool

    def __float__(self) -> float:
        return self.value


def _power_term(z: float, p: float) -> float:
    """``((1+z)^(1-p) - 1)/(1-p)``, or ``log(1+z)`` at ``p = 1``; ``z >= -1``."""
    if z == -1.0:
        return -math.inf if p >= 1.0 else -1.0 / (1.0 - p)
    if p == 1.0:
        return math.log1p(z)
    q = 1.0 - p
    return math.expm1(q * math.log1p(z)) / q


def eval_g(model: MarketModel, pi: float) -> ObjectiveValue:
    """Objective ``g(pi)`` on the closure of the admissible set."""
    tri, p = model.triplet, model.p
    interval = admissible_set(tri, model.utility)
    if not interval.in_closure(pi):
        raise ObjectiveDomainError(
            f"pi={pi} outside admissible closure [{interval.lower}, {interval.upper}]")
    if pi == 0.0:
        return ObjectiveValue(0.0, True)

    terms = [pi * tri.b, -0.5 * p * pi * pi * tri.c]
    for a in tri.atoms:
        z = pi * a.x
        # rounding can push 1 + z a hair below zero at an endpoint
        jump = _power_term(max(z, -1.0), p)
        if jump == -math.inf:
            return ObjectiveValue(-math.inf, False)
        terms.append(a.lam * (jump - z))
    return ObjectiveValue(math.fsum(terms), True)


def eval_g_prime(model: MarketModel, pi: float) -> float:
    """Derivative ``g'(pi) = b - p pi c + sum lam_i [x_i (1 + pi x_i)^(-p) - x_i]``.

    Defined on the interior of the admissible set.  At a closed endpoint
    (``p < 1``) the one-sided derivative is infinite and returned as such.
    """
    tri, p = model.triplet, model.p
    interval = admissible_set(tri, model.utility)
    if not interval.in_interior(pi):
        at_closed = (pi == interval.lower and interval.lower_closed) or (
            pi == interval.upper and interval.upper_closed)
        if not at_closed:
            raise ObjectiveDomainError(
                f"pi={pi} not inside the admissible interval ({interval.lower}, {interval.upper})")

    terms = [tri.b, -p * pi * tri.c]
    for a in tri.atoms:
        z = pi * a.x
        if z <= -1.0:
            return math.copysign(math.inf, a.x)
        terms.append(a.lam * a.x * math.expm1(-p * math.log1p(z)))
    return math.fsum(terms)


def continuous_value(model: MarketModel, pi: float) -> float:
    """Expected utility of terminal wealth for the constant strategy ``pi``."""
    g = eval_g(model, pi).value
    p, T, x0 = model.p, model.T, model.x0
    if p == 1.0:
        return math.log(x0) + g * T
    q = 1.0 - p
    if g == -math.inf:
        return 0.0 if q > 0 else -math.inf
    return x0 ** q / q * math.exp(q * g * T)
