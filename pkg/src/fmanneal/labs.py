"""Low-autocorrelation binary sequences (LABS) as a black-box objective.

A sequence ``S = (s_1, ..., s_N)`` of +/-1 spins has aperiodic
autocorrelations ``C_k = sum_i s_i s_{i+k}``, energy ``E = sum_k C_k**2`` and
merit factor ``F = N**2 / (2 E)``.  The optimizer minimizes ``-F``.

Binary inputs map to spins through ``s = 2 x - 1``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numba as nb
import numpy as np

from .exceptions import BudgetExceededError, InvalidDimensionError, InvalidLagError

MAX_BRUTE_FORCE_N = 24

# Known optimal objective values (-F) that cannot be recomputed by enumeration here.
REFERENCE_OPTIMA = {64: -9.84615385}


@dataclass(frozen=True)
class LabsValue:
    energy: int
    merit_factor: float
    objective: float


def _check_spins(s):
    arr = np.asarray(s)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise InvalidDimensionError(f"spin sequence needs length >= 2, got shape {arr.shape}")
    arr = arr.astype(np.int64)
    if not np.all(np.abs(arr) == 1):
        raise ValueError("spin sequence entries must be -1 or +1")
    return arr


def spin_from_binary(x):
    """Map a 0/1 vector to +/-1 spins (``s_i = 2 x_i - 1``)."""
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.shape[0] < 2:
        raise InvalidDimensionError(f"binary vector needs length >= 2, got shape {arr.shape}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("binary vector entries must be 0 or 1")
    return 2 * arr.astype(np.int64) - 1


def binary_from_spin(s):
    """Inverse of :func:`spin_from_binary`."""
    return (_check_spins(s) + 1) // 2


def autocorrelation(s, k):
    """Aperiodic autocorrelation ``C_k`` of a spin sequence."""
    s = _check_spins(s)
    n = s.shape[0]
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= n - 1:
        raise InvalidLagError(f"lag must satisfy 1 <= k <= {n - 1}, got {k!r}")
    k = int(k)
    return int(np.dot(s[: n - k], s[k:]))


def labs_energy(s):
    s = _check_spins(s)
    n = s.shape[0]
    return int(sum(int(np.dot(s[: n - k], s[k:])) ** 2 for k in range(1, n)))


def labs_evaluate(s):
    """Energy, merit factor and objective of a spin sequence."""
    s = _check_spins(s)
    n = s.shape[0]
    energy = labs_energy(s)
    # C_{N-1} = s_1 s_N = +/-1, so the energy is at least 1.
    assert energy > 0
    merit = n * n / (2.0 * energy)
    return LabsValue(energy=energy, merit_factor=merit, objective=-merit)


def labs_objective(x):
    """Black-box objective on a binary vector: the negated merit factor."""
    return labs_evaluate(spin_from_binary(x)).objective


@nb.njit(cache=True)
def _energy_of_index(m, n, s):
    for i in range(n):
        s[i] = 1 if (m >> (n - 1 - i)) & 1 else -1
    e = 0
    for k in range(1, n):
        c = 0
        for i in range(n - k):
            c += s[i] * s[i + k]
        e += c * c
    return e


@nb.njit(parallel=True, cache=True)
def _brute_force_chunks(n, n_chunks):
    total = 1 << n
    size = (total + n_chunks - 1) // n_chunks
    best_e = np.empty(n_chunks, dtype=np.int64)
    best_m = np.empty(n_chunks, dtype=np.int64)
    for c in nb.prange(n_chunks):
        s = np.empty(n, dtype=np.int64)
        lo = c * size
        hi = min(total, lo + size)
        be = np.iinfo(np.int64).max
        bm = -1
        for m in range(lo, hi):
            e = _energy_of_index(m, n, s)
            if e < be:
                be = e
                bm = m
        best_e[c] = be
        best_m[c] = bm
    return best_e, best_m


def brute_force_optimum(n):
    """Exhaustive LABS minimum for ``2 <= n <= 24``.

    Sequences are scanned in lexicographic order with -1 before +1, so the
    returned sequence is the lexicographically smallest minimizer.  The scan
    is split into chunks that may run in parallel; merging on
    ``(energy, index)`` keeps the answer identical to a sequential scan.
    """
    if isinstance(n, bool) or int(n) != n or not 2 <= n <= MAX_BRUTE_FORCE_N:
        raise BudgetExceededError(
            f"exhaustive LABS search supports 2 <= n <= {MAX_BRUTE_FORCE_N}, got {n!r}"
        )
    n = int(n)
    n_chunks = min(1 << n, 64)
    energies, indices = _brute_force_chunks(n, n_chunks)
    valid = indices >= 0
    order = np.lexsort((indices[valid], energies[valid]))
    m = int(indices[valid][order[0]])
    spins = np.array([1 if (m >> (n - 1 - i)) & 1 else -1 for i in range(n)], dtype=np.int64)
    return spins, labs_evaluate(spins)


@lru_cache(maxsize=None)
def reference_optimum(n):
    """Optimal objective (-F) for dimension ``n`` if one is known, else ``None``.

    Dimensions up to 24 are solved by enumeration on first request and cached.
    """
    if n in REFERENCE_OPTIMA:
        return REFERENCE_OPTIMA[n]
    if 2 <= n <= MAX_BRUTE_FORCE_N:
        return brute_force_optimum(n)[1].objective
    return None
