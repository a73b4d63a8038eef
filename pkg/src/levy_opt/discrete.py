"""N-period model: trading only at ``kT/N``.

With per-period gross return ``1 + Z`` where ``Z = exp(dL~) - 1`` and
``dL~`` the log-price increment over ``T/N``, the optimal constant fraction
``pi*_N`` maximises over ``[0, 1]``

    g^N(pi) = (N/T) E[((1 + pi Z)^(1-p) - 1) / (1-p)]      (log(1 + pi Z) at p = 1)

Expectations are taken either by Monte Carlo over exact increment samples
(common random numbers, so ``pi -> g^N(pi)`` is concave sample by sample)
or by deterministic quadrature: condition on the jump count, enumerate the
atom multisets, and integrate the Gaussian part with Gauss-Hermite.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import stats

from . import _backend
from .model import AdmissibleInterval, LogTriplet, MarketModel, log_triplet
from .optimizer import OptResult, maximize_concave_1d

log = logging.getLogger(__name__)

TAIL_BOUND = 1e-12
MAX_MULTISETS = 1_000_000
_EVAL_CHUNK = 1 << 20


@dataclass(frozen=True)
class McConfig:
    paths: int = 100_000
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self) -> None:
        if self.paths < 2:
            raise ValueError(f"need at least 2 paths, got {self.paths}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class QuadConfig:
    """``k_max=None`` picks the jump-count cutoff from the Poisson tail bound."""

    k_max: int | None = None
    nodes: int = 64

    def __post_init__(self) -> None:
        if self.k_max is not None and self.k_max < 0:
            raise ValueError("k_max must be nonnegative")
        if self.nodes < 1:
            raise ValueError("need at least one Gauss-Hermite node")


Method = Union[McConfig, QuadConfig]


@dataclass(frozen=True)
class GnValue:
    value: float
    stderr: float
    method: str

    def __float__(self) -> float:
        return self.value


# ---------------------------------------------------------------- sampling

def _jump_tables(lt: LogTriplet) -> tuple[float, np.ndarray, np.ndarray]:
    lams = np.array([a.lam for a in lt.atoms], dtype=np.float64)
    sizes = np.array([a.x for a in lt.atoms], dtype=np.float64)
    lam_total = float(math.fsum(lams))
    if lams.size:
        cum = np.cumsum(lams) / lam_total
        cum[-1] = 1.0
    else:
        cum = np.zeros(0)
    return lam_total, cum, sizes


def increment_drift(lt: LogTriplet) -> float:
    """Drift of ``L~`` written as drift + Brownian part + raw (uncompensated) jump sum."""
    return lt.b - lt.compensator


def sample_log_increment(lt: LogTriplet, dt: float, rng: np.random.Generator) -> float:
    """One exact draw of ``L~_dt`` from a numpy generator."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    value = increment_drift(lt) * dt + math.sqrt(lt.c * dt) * rng.standard_normal()
    lam_total = lt.total_intensity
    if lam_total > 0:
        k = rng.poisson(lam_total * dt)
        if k:
            probs = np.array([a.lam for a in lt.atoms]) / lam_total
            picks = rng.choice(len(lt.atoms), size=k, p=probs)
            value += math.fsum(lt.atoms[i].x for i in picks)
    return value


def increment_parts(lt: LogTriplet, dt: float, paths: int, seed: int,
                    threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Counter-based Gaussian draws and raw jump sums for paths ``0..paths-1``."""
    lam_total, cum, sizes = _jump_tables(lt)
    gauss = np.empty(paths)
    jumps = np.empty(paths)
    k = _backend.kernels

    def work(s: int, e: int) -> None:
        k.increment_parts(seed, s, e, dt, lam_total, cum, sizes, gauss[s:e], jumps[s:e])

    _backend.run_blocks(paths, work, threads)
    return gauss, jumps


def sample_log_increments(lt: LogTriplet, dt: float, paths: int, seed: int = 0,
                          antithetic: bool = False) -> np.ndarray:
    """Exact samples of ``L~_dt``; shape ``(paths,)`` or ``(paths, 2)`` if antithetic."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    gauss, jumps = increment_parts(lt, dt, paths, seed)
    base = increment_drift(lt) * dt + jumps
    scale = math.sqrt(lt.c * dt)
    if antithetic:
        return np.stack([base + scale * gauss, base - scale * gauss], axis=1)
    return base + scale * gauss


# ------------------------------------------------------ increment laws

@dataclass(frozen=True)
class _McLaw:
    z: np.ndarray          # expm1 of the increments, (n,) or (n, 2)


@dataclass(frozen=True)
class _QuadLaw:
    shifts: np.ndarray     # deterministic part per jump multiset
    weights: np.ndarray    # probability per multiset
    nodes: np.ndarray      # Gaussian coordinates (already scaled)
    node_weights: np.ndarray


def poisson_cutoff(mean: float, tail: float) -> int:
    """Smallest ``K`` with ``P(Poisson(mean) > K) <= tail``."""
    if mean <= 0:
        return 0
    k = int(mean)
    while stats.poisson.sf(k, mean) > tail:
        k += 1
    while k > 0 and stats.poisson.sf(k - 1, mean) <= tail:
        k -= 1
    return k


def _tail_bound(n_periods: int) -> float:
    return TAIL_BOUND / n_periods


@functools.lru_cache(maxsize=32)
def _mc_law(lt: LogTriplet, dt: float, cfg: McConfig) -> _McLaw:
    samples = sample_log_increments(lt, dt, cfg.paths, cfg.seed, cfg.antithetic)
    z = np.expm1(samples)
    z.setflags(write=False)
    return _McLaw(z)


def multiset_count(n_atoms: int, k_max: int) -> int:
    return sum(math.comb(k + n_atoms - 1, n_atoms - 1) for k in range(k_max + 1)) if n_atoms else 1


@functools.lru_cache(maxsize=32)
def _quad_law(lt: LogTriplet, dt: float, n_periods: int, cfg: QuadConfig) -> _QuadLaw | None:
    lam_total = lt.total_intensity
    mean = lam_total * dt
    tail = _tail_bound(n_periods)
    if cfg.k_max is None:
        k_max = poisson_cutoff(mean, tail)
    else:
        k_max = cfg.k_max
        if lam_total > 0 and stats.poisson.sf(k_max, mean) > tail:
            raise ValueError(f"k_max={k_max} leaves Poisson tail "
                             f"{stats.poisson.sf(k_max, mean):.3g} > {tail:.3g}")
    m = len(lt.atoms)
    if multiset_count(m, k_max) > MAX_MULTISETS:
        return None

    shifts, logw = [], []
    if m:
        ys = [a.x for a in lt.atoms]
        log_p = [math.log(a.lam / lam_total) for a in lt.atoms]
        for k in range(k_max + 1):
            log_pois = k * math.log(mean) - mean - math.lgamma(k + 1)
            for combo in itertools.combinations_with_replacement(range(m), k):
                counts = [0] * m
                for i in combo:
                    counts[i] += 1
                lw = log_pois + math.lgamma(k + 1) + sum(
                    n * lp - math.lgamma(n + 1) for n, lp in zip(counts, log_p))
                shifts.append(math.fsum(n * y for n, y in zip(counts, ys)))
                logw.append(lw)
    else:
        shifts, logw = [0.0], [0.0]

    if lt.c > 0:
        x, w = np.polynomial.hermite_e.hermegauss(cfg.nodes)
        nodes = math.sqrt(lt.c * dt) * x
        node_weights = w / math.sqrt(2.0 * math.pi)
    else:
        nodes, node_weights = np.zeros(1), np.ones(1)
    drift = increment_drift(lt) * dt
    return _QuadLaw(drift + np.array(shifts), np.exp(np.array(logw)), nodes, node_weights)


def _law(model: MarketModel, n_periods: int, method: Method):
    lt = log_triplet(model.triplet)
    dt = model.T / n_periods
    if isinstance(method, McConfig):
        return _mc_law(lt, dt, method)
    if isinstance(method, QuadConfig):
        law = _quad_law(lt, dt, n_periods, method)
        if law is None:
            log.warning("jump multiset enumeration exceeds %d terms; falling back to Monte Carlo",
                        MAX_MULTISETS)
            return _mc_law(lt, dt, McConfig())
        return law
    raise TypeError(f"method must be McConfig or QuadConfig, got {type(method).__name__}")


# ---------------------------------------------------------- evaluation

def _utility_increment(z: np.ndarray, pi: float, p: float) -> np.ndarray:
    if p == 1.0:
        return np.log1p(pi * z)
    q = 1.0 - p
    return np.expm1(q * np.log1p(pi * z)) / q


def _marginal(z: np.ndarray, pi: float, p: float) -> np.ndarray:
    return z * np.exp(-p * np.log1p(pi * z))


def _expect(law, fn) -> tuple[float, float, str]:
    if isinstance(law, _McLaw):
        vals = fn(law.z)
        if vals.ndim == 2:
            vals = vals.mean(axis=1)
        n = vals.shape[0]
        return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(n)), "mc"
    total = 0.0
    step = max(1, _EVAL_CHUNK // law.nodes.size)
    for s in range(0, law.shifts.size, step):
        z = np.expm1(law.shifts[s:s + step, None] + law.nodes[None, :])
        inner = np.sum(fn(z) * law.node_weights[None, :], axis=1)
        total += float(np.sum(inner * law.weights[s:s + step]))
    return total, 0.0, "quadrature"


def _check(model: MarketModel, n_periods: int, pi: float) -> None:
    if n_periods < 1 or int(n_periods) != n_periods:
        raise ValueError(f"N must be a positive integer, got {n_periods}")
    if not 0.0 <= pi <= 1.0:
        from .objective import ObjectiveDomainError
        raise ObjectiveDomainError(f"N-period strategies live in [0, 1], got pi={pi}")


def eval_gN(model: MarketModel, n_periods: int, pi: float, method: Method = QuadConfig()) -> GnValue:
    """``g^N(pi)`` with its Monte Carlo standard error (zero for quadrature)."""
    _check(model, n_periods, pi)
    if pi == 0.0:
        return GnValue(0.0, 0.0, "mc" if isinstance(method, McConfig) else "quadrature")
    law = _law(model, n_periods, method)
    mean, se, tag = _expect(law, lambda z: _utility_increment(z, pi, model.p))
    scale = n_periods / model.T
    return GnValue(scale * mean, scale * se, tag)


def eval_gN_prime(model: MarketModel, n_periods: int, pi: float, method: Method = QuadConfig()) -> GnValue:
    """``(g^N)'(pi) = (N/T) E[Z (1 + pi Z)^(-p)]``; one-sided at 0 and 1."""
    _check(model, n_periods, pi)
    law = _law(model, n_periods, method)
    mean, se, tag = _expect(law, lambda z: _marginal(z, pi, model.p))
    scale = n_periods / model.T
    return GnValue(scale * mean, scale * se, tag)


def optimal_discrete(model: MarketModel, n_periods: int, method: Method = QuadConfig()) -> OptResult:
    """Maximiser ``pi*_N`` of ``g^N`` over ``[0, 1]``."""
    _check(model, n_periods, 0.0)
    return maximize_concave_1d(lambda x: eval_gN(model, n_periods, x, method).value,
                               lambda x: eval_gN_prime(model, n_periods, x, method).value,
                               AdmissibleInterval.unit())


def discrete_value_function(model: MarketModel, n_periods: int, pi: float,
                            method: Method = QuadConfig()) -> float:
    """Expected utility of ``x0 * prod(1 + pi Z_j)`` over ``N`` periods."""
    g = eval_gN(model, n_periods, pi, method).value
    p, T, x0 = model.p, model.T, model.x0
    if p == 1.0:
        return math.log(x0) + T * g
    q = 1.0 - p
    base = 1.0 + q * T * g / n_periods
    if base <= 0.0:
        log.warning("one-period moment 1 + (1-p) T g^N / N = %g <= 0 (Monte Carlo noise?)", base)
        return -math.inf
    return x0 ** q * base ** n_periods / q
