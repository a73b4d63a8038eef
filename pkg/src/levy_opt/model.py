"""Market model for a one-dimensional exponential Lévy stock.

The stock is ``S = S0 * E(L)`` where ``L`` has Lévy triplet ``(b, c, F)``
with truncation ``h(x) = x`` and a jump measure ``F`` made of finitely many
atoms.  The log-price ``log E(L)`` is again Lévy; its triplet is computed by
:func:`log_triplet`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence


class ModelError(ValueError):
    """Raised for malformed model inputs (bad config fields, bad parameters)."""


@dataclass(frozen=True)
class JumpAtom:
    """Relative jump of size ``x`` arriving with intensity ``lam`` per unit time."""

    x: float
    lam: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.x) or not math.isfinite(self.lam):
            raise ModelError(f"jump atom must be finite, got x={self.x}, lambda={self.lam}")
        if self.lam <= 0:
            raise ModelError(f"jump intensity must be positive, got {self.lam}")


@dataclass(frozen=True)
class LevyTriplet:
    """Triplet of the driving process ``L`` (drift w.r.t. ``h(x) = x``)."""

    b: float
    c: float
    atoms: tuple[JumpAtom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if not math.isfinite(self.b) or not math.isfinite(self.c):
            raise ModelError("drift and diffusion must be finite")
        if self.c < 0:
            raise ModelError(f"diffusion coefficient must be nonnegative, got {self.c}")

    @property
    def sizes(self) -> tuple[float, ...]:
        return tuple(a.x for a in self.atoms)

    @property
    def intensities(self) -> tuple[float, ...]:
        return tuple(a.lam for a in self.atoms)

    @property
    def total_intensity(self) -> float:
        return math.fsum(self.intensities)

    def scaled(self, pi: float) -> LevyTriplet:
        """Triplet of ``pi * L``."""
        return LevyTriplet(pi * self.b, pi * pi * self.c,
                           tuple(JumpAtom(pi * a.x, a.lam) for a in self.atoms if pi * a.x != 0.0))


@dataclass(frozen=True)
class LogTriplet:
    """Triplet of ``log E(L)``; atoms carry log-sizes ``y = log(1 + x)``."""

    b: float
    c: float
    atoms: tuple[JumpAtom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", tuple(self.atoms))

    @property
    def compensator(self) -> float:
        """``sum(lam_i * y_i)``, the rate subtracted from the raw jump sum."""
        return math.fsum(a.lam * a.x for a in self.atoms)

    @property
    def total_intensity(self) -> float:
        return math.fsum(a.lam for a in self.atoms)


@dataclass(frozen=True)
class PowerUtility:
    """``U(x) = x**(1 - p) / (1 - p)``; ``p == 1`` means ``log``."""

    p: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p) and self.p > 0):
            raise ModelError(f"relative risk aversion must be positive, got {self.p}")

    @property
    def is_log(self) -> bool:
        return self.p == 1.0

    def __call__(self, wealth: float) -> float:
        if self.is_log:
            return math.log(wealth) if wealth > 0 else -math.inf
        q = 1.0 - self.p
        if wealth <= 0:
            return 0.0 if (wealth == 0 and q > 0) else -math.inf
        return wealth ** q / q


@dataclass(frozen=True)
class MarketModel:
    triplet: LevyTriplet
    T: float
    x0: float
    utility: PowerUtility

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0):
            raise ModelError(f"horizon T must be positive, got {self.T}")
        if not (math.isfinite(self.x0) and self.x0 > 0):
            raise ModelError(f"initial wealth x0 must be positive, got {self.x0}")

    @property
    def p(self) -> float:
        return self.utility.p

    def with_p(self, p: float) -> MarketModel:
        return MarketModel(self.triplet, self.T, self.x0, PowerUtility(p))

    def to_config(self) -> dict[str, Any]:
        t = self.triplet
        return {
            "b": t.b,
            "c": t.c,
            "atoms": [{"x": a.x, "lambda": a.lam} for a in t.atoms],
            "T": self.T,
            "x0": self.x0,
            "p": self.p,
        }


@dataclass(frozen=True)
class AdmissibleInterval:
    """Interval of constant strategies; infinite bounds are ``±math.inf``."""

    lower: float
    upper: float
    lower_closed: bool
    upper_closed: bool

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise ModelError(f"empty interval ({self.lower}, {self.upper})")
        if math.isinf(self.lower) and self.lower_closed or math.isinf(self.upper) and self.upper_closed:
            raise ModelError("infinite endpoints cannot be closed")

    @classmethod
    def unit(cls) -> AdmissibleInterval:
        return cls(0.0, 1.0, True, True)

    def __contains__(self, pi: float) -> bool:
        above = pi >= self.lower if self.lower_closed else pi > self.lower
        below = pi <= self.upper if self.upper_closed else pi < self.upper
        return above and below

    def in_closure(self, pi: float) -> bool:
        return self.lower <= pi <= self.upper

    def in_interior(self, pi: float) -> bool:
        return self.lower < pi < self.upper


@dataclass
class ValidationReport:
    """Per-assumption outcome of :func:`validate_model`."""

    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    @property
    def failures(self) -> list[tuple[str, str]]:
        return [(name, msg) for name, passed, msg in self.checks if not passed]

    def __str__(self) -> str:
        return "\n".join(f"[{'PASS' if passed else 'FAIL'}] {name}: {msg}"
                         for name, passed, msg in self.checks)


def validate_model(model: MarketModel) -> ValidationReport:
    """Check the standing assumptions on the model.

    1. every jump keeps the stock positive (``x > -1``);
    2. the model is not a one-sided pure-jump model: ``c != 0`` or jumps of
       both signs are present;
    3. the value function is finite.  With finitely many atoms the relevant
       integral is a finite sum, so this one holds by construction.
    """
    t = model.triplet
    report = ValidationReport()

    bad = [a.x for a in t.atoms if a.x <= -1.0]
    report.checks.append((
        "assumption-1 positive stock",
        not bad,
        "all jump sizes exceed -1" if not bad else f"jump sizes {bad} are <= -1",
    ))

    has_neg = any(a.x < 0 for a in t.atoms)
    has_pos = any(a.x > 0 for a in t.atoms)
    two_sided = t.c != 0.0 or (has_neg and has_pos)
    if t.c != 0.0:
        msg = "diffusion is nonzero"
    elif two_sided:
        msg = "pure-jump with jumps of both signs"
    else:
        msg = "c == 0 and the jumps are not two-sided (one-sided pure-jump model is excluded)"
    report.checks.append(("assumption-2 non-degenerate", two_sided, msg))

    report.checks.append((
        "assumption-3 finite value function",
        True,
        "satisfied by construction (finitely many jump atoms)",
    ))
    return report


def log_triplet(triplet: LevyTriplet) -> LogTriplet:
    r"""Triplet of ``log E(L)`` for ``h(x) = x``.

    ``b~ = b - c/2 + sum lam_i (log(1+x_i) - x_i)``, ``c~ = c``, atoms move to
    ``log(1 + x_i)`` with unchanged intensities.
    """
    ys = [math.log1p(a.x) for a in triplet.atoms]
    b_tilde = triplet.b - triplet.c / 2 + math.fsum(
        a.lam * (y - a.x) for a, y in zip(triplet.atoms, ys))
    return LogTriplet(b_tilde, triplet.c,
                     tuple(JumpAtom(y, a.lam) for a, y in zip(triplet.atoms, ys)))


def levy_triplet(lt: LogTriplet) -> LevyTriplet:
    """Inverse of :func:`log_triplet`."""
    xs = [math.expm1(a.x) for a in lt.atoms]
    b = lt.b + lt.c / 2 + math.fsum(a.lam * (x - a.x) for a, x in zip(lt.atoms, xs))
    return LevyTriplet(b, lt.c, tuple(JumpAtom(x, a.lam) for a, x in zip(lt.atoms, xs)))


def cumulant_exponent(lt: LogTriplet, u: float) -> float:
    """``kappa(u) = log E[exp(u * log E(L)_1)]``, so ``E[E(L)_t**u] = exp(kappa(u) t)``."""
    jumps = math.fsum(a.lam * (math.expm1(u * a.x) - u * a.x) for a in lt.atoms)
    return u * lt.b + 0.5 * u * u * lt.c + jumps


def admissible_set(triplet: LevyTriplet, utility: PowerUtility) -> AdmissibleInterval:
    """Constant strategies keeping ``1 + pi * x_i`` positive for every atom.

    For ``p >= 1`` the constraint is strict (open endpoints); for ``p < 1``
    wealth may hit zero, so the endpoints are closed when finite.
    """
    pos = [a.x for a in triplet.atoms if a.x > 0]
    neg = [a.x for a in triplet.atoms if a.x < 0]
    lower = -1.0 / max(pos) if pos else -math.inf
    upper = -1.0 / min(neg) if neg else math.inf
    closed = utility.p < 1.0
    return AdmissibleInterval(lower, upper,
                              closed and math.isfinite(lower),
                              closed and math.isfinite(upper))


_CONFIG_FIELDS = {"b", "c", "atoms", "T", "x0", "p"}
_REQUIRED_FIELDS = {"b", "c", "T", "p"}
_ATOM_FIELDS = {"x", "lambda"}


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelError(f"field {name!r} must be a number, got {value!r}")
    return float(value)


def model_from_config(cfg: dict[str, Any]) -> MarketModel:
    """Build a model from a config mapping.

    Keys are ``b, c, atoms, T, x0, p``; ``atoms`` defaults to ``[]`` and
    ``x0`` to ``1``.  Unknown keys are rejected.
    """
    if not isinstance(cfg, dict):
        raise ModelError("config must be a JSON object")
    unknown = set(cfg) - _CONFIG_FIELDS
    if unknown:
        raise ModelError(f"unknown config fields: {sorted(unknown)}")
    missing = _REQUIRED_FIELDS - set(cfg)
    if missing:
        raise ModelError(f"missing config fields: {sorted(missing)}")

    raw_atoms = cfg.get("atoms", [])
    if not isinstance(raw_atoms, list):
        raise ModelError("'atoms' must be a list")
    atoms = []
    for i, item in enumerate(raw_atoms):
        if not isinstance(item, dict):
            raise ModelError(f"atom {i} must be an object")
        extra = set(item) - _ATOM_FIELDS
        if extra:
            raise ModelError(f"unknown fields in atom {i}: {sorted(extra)}")
        if set(item) != _ATOM_FIELDS:
            raise ModelError(f"atom {i} needs fields 'x' and 'lambda'")
        atoms.append(JumpAtom(_number(item["x"], f"atoms[{i}].x"),
                              _number(item["lambda"], f"atoms[{i}].lambda")))

    triplet = LevyTriplet(_number(cfg["b"], "b"), _number(cfg["c"], "c"), tuple(atoms))
    return MarketModel(
        triplet=triplet,
        T=_number(cfg["T"], "T"),
        x0=_number(cfg.get("x0", 1.0), "x0"),
        utility=PowerUtility(_number(cfg["p"], "p")),
    )


def load_model(path: str | Path) -> MarketModel:
    with open(path, encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_config(cfg)


def make_model(b: float, c: float, atoms: Sequence[tuple[float, float]] = (),
               *, p: float = 2.0, T: float = 1.0, x0: float = 1.0) -> MarketModel:
    """Shorthand constructor; ``atoms`` is a sequence of ``(x, lambda)`` pairs."""
    return MarketModel(LevyTriplet(b, c, tuple(JumpAtom(x, lam) for x, lam in atoms)),
                       T, x0, PowerUtility(p))
