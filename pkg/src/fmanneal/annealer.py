"""Simulated-annealing QUBO sampler and an exhaustive QUBO oracle.

Each read starts from a uniform random state and runs ``outer_loops``
inverse-temperature steps on a linear schedule; at every step it performs
``inner_loops`` sweeps, each sweep proposing a single-bit flip at every
index in order (Metropolis acceptance).  The best state visited is returned.
"""

from dataclasses import dataclass

import numba as nb
import numpy as np
from sklearn.base import BaseEstimator

from ._rng import seed_sequence
from .exceptions import BudgetExceededError
from .fm import qubo_evaluate

MAX_BRUTE_FORCE_N = 24
SCHEDULES = ("linear",)
PROPOSAL_ORDER = "sequential"


@dataclass(frozen=True)
class AnnealConfig:
    beta_initial: float = 1e-5
    beta_final: float = 100.0
    schedule: str = "linear"
    outer_loops: int = 1000
    inner_loops: int = 10
    num_reads: int = 15

    def __post_init__(self):
        if not (self.beta_initial > 0 and self.beta_final > 0):
            raise ValueError("inverse temperatures must be positive")
        if self.beta_initial > self.beta_final:
            raise ValueError("beta_initial must not exceed beta_final")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}; supported: {SCHEDULES}")
        for name in ("outer_loops", "inner_loops", "num_reads"):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val or val < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {val!r}")

    def betas(self):
        t = self.outer_loops
        if t == 1:
            return np.array([self.beta_initial])
        steps = np.arange(t, dtype=np.float64) / (t - 1)
        return self.beta_initial + (self.beta_final - self.beta_initial) * steps


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Reads sorted by ascending QUBO energy (ties keep read order)."""

    states: np.ndarray  # (num_reads, N) of 0/1 as int8
    energies: np.ndarray
    read_index: np.ndarray

    def __len__(self):
        return self.energies.shape[0]

    def __iter__(self):
        for x, e in zip(self.states, self.energies):
            yield x, float(e)

    def __eq__(self, other):
        if not isinstance(other, SampleSet):
            return NotImplemented
        return (
            np.array_equal(self.states, other.states)
            and np.array_equal(self.energies, other.energies)
            and np.array_equal(self.read_index, other.read_index)
        )


@nb.njit(cache=True)
def _anneal_kernel(diag, couplings, constant, betas, inner, seed):
    n = diag.shape[0]
    np.random.seed(seed)
    x = np.zeros(n, dtype=np.int8)
    for i in range(n):
        if np.random.random() < 0.5:
            x[i] = 1
    # local field h_i = sum_j W_ij x_j over the symmetric couplings
    h = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            if x[j]:
                acc += couplings[i, j]
        h[i] = acc
    energy = constant
    for i in range(n):
        if x[i]:
            energy += diag[i] + 0.5 * h[i]
    best_energy = energy
    best = x.copy()
    for t in range(betas.shape[0]):
        beta = betas[t]
        for _ in range(inner):
            for i in range(n):
                delta = diag[i] + h[i]
                if x[i]:
                    delta = -delta
                if delta > 0.0:
                    if np.random.random() >= np.exp(-beta * delta):
                        continue
                step = 1.0 - 2.0 * x[i]
                x[i] = 1 - x[i]
                for j in range(n):
                    h[j] += couplings[j, i] * step
                energy += delta
                if energy < best_energy:
                    best_energy = energy
                    best[:] = x
    return best


def _read_seeds(seed, count):
    return [int(seed_sequence(seed, "anneal-read", r).generate_state(1, dtype=np.uint32)[0])
            for r in range(count)]


def _coerce_seed(random_state):
    if isinstance(random_state, np.random.Generator):
        return int(random_state.integers(0, 2**63))
    if random_state is None:
        return int(np.random.SeedSequence().entropy % 2**63)
    return int(random_state)


def sample(q, cfg=None, random_state=None):
    """Draw ``cfg.num_reads`` independent annealing reads.

    Read ``r`` is seeded from ``(random_state, r)`` only, so reads could be
    run in any order or in parallel with identical results.
    """
    cfg = cfg or AnnealConfig()
    seed = _coerce_seed(random_state)
    diag = np.ascontiguousarray(np.diag(q.coeffs))
    couplings = np.ascontiguousarray(q.symmetric_couplings())
    betas = cfg.betas()
    states = np.empty((cfg.num_reads, q.n), dtype=np.int8)
    energies = np.empty(cfg.num_reads)
    for r, s in enumerate(_read_seeds(seed, cfg.num_reads)):
        best = _anneal_kernel(diag, couplings, q.constant, betas, cfg.inner_loops, s)
        states[r] = best
        energies[r] = qubo_evaluate(q, best)
    order = np.argsort(energies, kind="stable")
    return SampleSet(states[order], energies[order], order.astype(np.int64))


def anneal_read(q, cfg=None, random_state=None):
    """A single read; equal to read 0 of :func:`sample` with the same seed."""
    cfg = cfg or AnnealConfig()
    one = AnnealConfig(cfg.beta_initial, cfg.beta_final, cfg.schedule,
                       cfg.outer_loops, cfg.inner_loops, 1)
    ss = sample(q, one, random_state)
    return ss.states[0], float(ss.energies[0])


@nb.njit(parallel=True, cache=True)
def _qubo_brute_chunks(coeffs, n, n_chunks):
    total = 1 << n
    size = (total + n_chunks - 1) // n_chunks
    best_e = np.empty(n_chunks)
    best_m = np.empty(n_chunks, dtype=np.int64)
    for c in nb.prange(n_chunks):
        x = np.empty(n, dtype=np.int8)
        lo = c * size
        hi = min(total, lo + size)
        be = np.inf
        bm = -1
        for m in range(lo, hi):
            for i in range(n):
                x[i] = (m >> (n - 1 - i)) & 1
            e = 0.0
            for i in range(n):
                if x[i]:
                    e += coeffs[i, i]
                    for j in range(i + 1, n):
                        if x[j]:
                            e += coeffs[i, j]
            if e < be:
                be = e
                bm = m
        best_e[c] = be
        best_m[c] = bm
    return best_e, best_m


def brute_force_qubo(q):
    """Exact minimizer over all ``2**N`` assignments, ``N <= 24``.

    Ties go to the lexicographically smallest vector (0 before 1).
    """
    n = q.n
    if n > MAX_BRUTE_FORCE_N:
        raise BudgetExceededError(f"exhaustive QUBO search supports N <= {MAX_BRUTE_FORCE_N}, got {n}")
    n_chunks = min(1 << n, 64)
    energies, indices = _qubo_brute_chunks(np.ascontiguousarray(q.coeffs), n, n_chunks)
    valid = indices >= 0
    order = np.lexsort((indices[valid], energies[valid]))
    m = int(indices[valid][order[0]])
    x = np.array([(m >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.int8)
    return x, qubo_evaluate(q, x)


class SimulatedAnnealingSampler(BaseEstimator):
    """Estimator-style front end to :func:`sample`.

    Hyperparameters are exposed through ``get_params``/``set_params`` so the
    sampler can be configured like any other estimator.
    """

    def __init__(
        self,
        beta_initial=1e-5,
        beta_final=100.0,
        schedule="linear",
        outer_loops=1000,
        inner_loops=10,
        num_reads=15,
        random_state=None,
    ):
        self.beta_initial = beta_initial
        self.beta_final = beta_final
        self.schedule = schedule
        self.outer_loops = outer_loops
        self.inner_loops = inner_loops
        self.num_reads = num_reads
        self.random_state = random_state

    def config(self):
        return AnnealConfig(self.beta_initial, self.beta_final, self.schedule,
                            self.outer_loops, self.inner_loops, self.num_reads)

    def sample(self, q, random_state=None):
        seed = self.random_state if random_state is None else random_state
        return sample(q, self.config(), seed)
