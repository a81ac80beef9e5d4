"""Metropolis sampling of beta-ensemble partitions.

Moves change a single row lam_i by +-1.  Because the pair term G and the
site weight have rational ratios under unit shifts, the log acceptance
ratio reduces to a product of O(K) rational factors; the pure-Python
reference ``log_accept_ratio`` uses log-Gamma differences instead and the
tests check that both agree.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

import numpy as np
from numba import njit
from scipy import stats

from .ensemble import EnsembleModel, _pair_log, log_pmf_unnormalized, particles
from .partitions import Partition, enumerate_box, box_count

MAX_EXACT_STATES = 10**6


class ConfigurationError(ValueError):
    pass


class StateExplosionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChainConfig:
    """Sweep schedule: samples are taken at sweeps burnin + k*thin <= steps, k >= 1."""

    steps: int
    burnin: int = 0
    thin: int = 1
    seed: int = 0
    chains: int = 1

    def __post_init__(self):
        if self.steps < self.burnin or self.burnin < 0:
            raise ConfigurationError("need steps >= burnin >= 0")
        if self.thin < 1 or self.chains < 1:
            raise ConfigurationError("thin and chains must be >= 1")

    @property
    def n_samples(self) -> int:
        return max(0, (self.steps - self.burnin) // self.thin)


# -- kernel ------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _poly(c, x):
    out = 0.0
    for k in range(c.shape[0] - 1, -1, -1):
        out = out * x + c[k]
    return out


@njit(cache=True, nogil=True)
def _pair_ratio(d, theta):
    # G(d+1)/G(d)
    return (d + 1.0) * (d + theta) / (d * (d + 1.0 - theta))


@njit(cache=True, nogil=True)
def _delta(lam, i, step, theta, phip, phim):
    K = lam.shape[0]
    li = lam[i] + (K - 1 - i) * theta
    prod = 1.0
    if step > 0:
        x = li + 1.0
        prod = _poly(phip, x) / _poly(phim, x)
        for j in range(K):
            if j == i:
                continue
            lj = lam[j] + (K - 1 - j) * theta
            if j > i:
                prod *= _pair_ratio(li - lj, theta)
            else:
                prod /= _pair_ratio(lj - li - 1.0, theta)
    else:
        prod = _poly(phim, li) / _poly(phip, li)
        for j in range(K):
            if j == i:
                continue
            lj = lam[j] + (K - 1 - j) * theta
            if j > i:
                prod /= _pair_ratio(li - lj - 1.0, theta)
            else:
                prod *= _pair_ratio(lj - li, theta)
    return math.log(prod)


@njit(cache=True, nogil=True)
def _allowed(lam, i, step, R):
    new = lam[i] + step
    if new < 0 or new > R:
        return False
    if i > 0 and new > lam[i - 1]:
        return False
    if i < lam.shape[0] - 1 and new < lam[i + 1]:
        return False
    return True


@njit(cache=True, nogil=True)
def _run_block(lam, theta, R, phip, phim, rows, steps, logu):
    accepted = 0
    for t in range(rows.shape[0]):
        i = rows[t]
        s = steps[t]
        if not _allowed(lam, i, s, R):
            continue
        if logu[t] < _delta(lam, i, s, theta, phip, phim):
            lam[i] += s
            accepted += 1
    return accepted


# -- chains ------------------------------------------------------------------


def initial_state(model: EnsembleModel, start: str = "empty") -> np.ndarray:
    if start == "empty":
        return np.zeros(model.K, dtype=np.int64)
    if start == "full":
        if model.R is None:
            raise ConfigurationError("full start needs a finite box")
        return np.full(model.K, model.R, dtype=np.int64)
    if start == "classical":
        return classical_state(model)
    raise ConfigurationError(f"unknown start {start!r}")


def classical_state(model: EnsembleModel) -> np.ndarray:
    """Rows placing l_i/K at the equilibrium quantiles (i - 1/2)/K from the top."""
    from .equilibrium import EquilibriumDensity

    K, th = model.K, model.theta
    mu = EquilibriumDensity(model.params)
    x = np.array([mu.quantile(1 - (i - 0.5) / K) for i in range(1, K + 1)])
    lam = np.rint(K * x - th * np.arange(K - 1, -1, -1)).astype(np.int64)
    lam = np.clip(lam, 0, model.R)
    return np.minimum.accumulate(lam)


class Chain:
    """One Metropolis chain with its own random stream."""

    def __init__(self, model: EnsembleModel, rng: np.random.Generator, start="empty"):
        if model.R is None:
            raise ConfigurationError("the sampler needs a finite box; set a cutoff")
        self.model = model
        self.rng = rng
        self.state = initial_state(model, start) if isinstance(start, str) else _as_state(start, model)
        self.proposals = 0
        self.accepted = 0
        self._phip = np.asarray(model.phi_plus, dtype=float)
        self._phim = np.asarray(model.phi_minus, dtype=float)

    def sweep(self, n: int = 1) -> None:
        K = self.model.K
        if n <= 0 or K == 0:
            return
        size = n * K
        rows = self.rng.integers(0, K, size=size)
        steps = 2 * self.rng.integers(0, 2, size=size) - 1
        logu = np.log(self.rng.random(size))
        self.accepted += _run_block(self.state, self.model.theta, self.model.R,
                                    self._phip, self._phim, rows, steps, logu)
        self.proposals += size

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.proposals if self.proposals else float("nan")

    def partition(self) -> Partition:
        return Partition(self.state.tolist())


def _as_state(lam, model) -> np.ndarray:
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    if not model.contains(lam):
        raise ConfigurationError(f"initial state {lam} is outside the box")
    return np.array(lam.padded(model.K), dtype=np.int64)


def run_chain(model: EnsembleModel, config: ChainConfig, start="empty",
              rng: Optional[np.random.Generator] = None) -> Iterator[tuple[int, Partition]]:
    """Yield (sweep index, partition) samples; a zero-length run yields its start."""
    chain = Chain(model, rng if rng is not None else np.random.default_rng(config.seed), start)
    if config.steps == 0:
        yield 0, chain.partition()
        return
    chain.sweep(config.burnin)
    sweep = config.burnin
    while sweep + config.thin <= config.steps:
        chain.sweep(config.thin)
        sweep += config.thin
        yield sweep, chain.partition()


def worker_count() -> int:
    env = os.environ.get("JACKGAS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class ChainResult:
    samples: np.ndarray      # (chains, n_samples, K) rows lam_i
    sweeps: np.ndarray       # sweep index of each sample
    acceptance: np.ndarray   # per chain


def run_chains(model: EnsembleModel, config: ChainConfig, start="empty",
               threads: Optional[int] = None) -> ChainResult:
    """Independent chains, one SeedSequence child stream each."""
    children = np.random.SeedSequence(config.seed).spawn(config.chains)
    if isinstance(start, str) and start == "classical":
        start = Partition(classical_state(model).tolist())
    n = config.n_samples
    steps = config.steps
    sweeps = np.arange(1, n + 1) * config.thin + config.burnin
    out = np.zeros((config.chains, n, model.K), dtype=np.int64)
    acc = np.zeros(config.chains)

    def job(c):
        chain = Chain(model, np.random.Generator(np.random.PCG64(children[c])), start)
        chain.sweep(config.burnin)
        for k in range(n):
            chain.sweep(config.thin)
            out[c, k] = chain.state
        # run to the end of the schedule if steps is not a multiple of thin
        chain.sweep(steps - config.burnin - n * config.thin)
        acc[c] = chain.acceptance_rate

    workers = min(threads or worker_count(), config.chains)
    if workers <= 1:
        for c in range(config.chains):
            job(c)
    else:
        with ThreadPoolExecutor(workers) as ex:
            list(ex.map(job, range(config.chains)))
    return ChainResult(out, sweeps, acc)


# -- reference acceptance ratio ----------------------------------------------


def log_accept_ratio(model: EnsembleModel, lam, move: tuple[int, int]) -> float:
    """log pmf(lam') - log pmf(lam) for move (row i 1-based, +-1), by log-Gamma."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    i, step = move
    K, th = model.K, model.theta
    parts = list(lam.padded(K))
    new = parts[i - 1] + step
    if (new < 0 or (model.R is not None and new > model.R)
            or (i > 1 and new > parts[i - 2]) or (i < K and new < parts[i])):
        return -math.inf
    ell = particles(lam, K, th)
    old_x = ell[i - 1]
    new_x = old_x + step
    delta = model.logw(new_x) - model.logw(old_x)
    for j in range(K):
        if j == i - 1:
            continue
        if j > i - 1:
            delta += _pair_log(new_x - ell[j], th) - _pair_log(old_x - ell[j], th)
        else:
            delta += _pair_log(ell[j] - new_x, th) - _pair_log(ell[j] - old_x, th)
    return delta


def kernel_log_accept_ratio(model: EnsembleModel, lam, move: tuple[int, int]) -> float:
    """Same quantity through the compiled rational-product kernel."""
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    state = np.array(lam.padded(model.K), dtype=np.int64)
    i, step = move
    if not _allowed(state, i - 1, step, model.R if model.R is not None else 2**62):
        return -math.inf
    return _delta(state, i - 1, step, model.theta,
                  np.asarray(model.phi_plus, float), np.asarray(model.phi_minus, float))


# -- exact enumeration -------------------------------------------------------


def exact_distribution_small(model: EnsembleModel, max_weight: Optional[int] = None) -> list[tuple[Partition, float]]:
    """Normalized pmf over the whole box (or box cut at |lam| <= max_weight)."""
    if model.R is None and max_weight is None:
        raise ConfigurationError("unbounded box needs max_weight")
    if model.R is not None and max_weight is None and box_count(model.K, model.R) > MAX_EXACT_STATES:
        raise StateExplosionError("box too large to enumerate")
    states = []
    for lam in enumerate_box(model.K, model.R, max_weight):
        states.append(lam)
        if len(states) > MAX_EXACT_STATES:
            raise StateExplosionError("box too large to enumerate")
    logp = np.array([log_pmf_unnormalized(model, lam) for lam in states])
    logp -= logp.max()
    w = np.exp(logp)
    w /= w.sum()
    return list(zip(states, w.tolist()))


# -- empirical measures ------------------------------------------------------


@dataclass
class EmpiricalMeasure:
    positions: np.ndarray   # sorted pooled l_i / scale
    n_samples: int
    scale: float

    def cdf(self, x):
        return np.searchsorted(self.positions, x, side="right") / self.positions.size

    def ks(self, cdf: Callable) -> float:
        return ks_distance(self.positions, cdf)


def empirical_measure(samples, theta: float, scale: float) -> EmpiricalMeasure:
    """Pool l_i/scale over samples given as an array (..., K) of rows lam_i."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one sample")
    K = arr.shape[-1]
    ell = arr + theta * np.arange(K - 1, -1, -1)
    flat = np.sort(ell.reshape(-1) / scale)
    return EmpiricalMeasure(flat, int(np.prod(arr.shape[:-1])), float(scale))


def ks_distance(points, cdf: Callable) -> float:
    """sup |F_emp - F| for a continuous reference cdf (vectorized callable)."""
    return float(stats.kstest(np.asarray(points), cdf).statistic)


def ks_two_sample(x, y) -> float:
    return float(stats.ks_2samp(np.asarray(x), np.asarray(y)).statistic)
