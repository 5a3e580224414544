"""Factorization machine parameters, evaluation and QUBO export.

The second-order FM on binary inputs

    f(x) = w0 + sum_i w_i x_i + sum_{i<j} <v_i, v_j> x_i x_j

is already a QUBO with ``Q_ii = w_i``, ``Q_ij = <v_i, v_j>`` and constant
``w0``.
"""

from dataclasses import dataclass

import numpy as np

from ._rng import as_generator
from ._validation import check_binary_matrix, check_binary_vector
from .exceptions import InvalidDimensionError


@dataclass(frozen=True, eq=False)
class FmParams:
    """FM parameters ``(omega0, omega, v)``; ``v`` has one row per variable."""

    omega0: float
    omega: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        omega = np.array(self.omega, dtype=np.float64)
        v = np.array(self.v, dtype=np.float64)
        if omega.ndim != 1:
            raise InvalidDimensionError("omega must be a vector")
        if v.ndim != 2 or v.shape[0] != omega.shape[0] or v.shape[1] < 1:
            raise InvalidDimensionError(
                f"v must have shape (N, K>=1) with N={omega.shape[0]}, got {v.shape}"
            )
        if not (np.isfinite(self.omega0) and np.all(np.isfinite(omega)) and np.all(np.isfinite(v))):
            raise ValueError("FM parameters must be finite")
        omega.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "omega0", float(self.omega0))
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "v", v)

    @property
    def n(self):
        return self.omega.shape[0]

    @property
    def k(self):
        return self.v.shape[1]

    @classmethod
    def zeros(cls, n, k):
        return cls(0.0, np.zeros(n), np.zeros((n, k)))

    def to_vector(self):
        """Flatten to ``[omega0, omega..., v (row-major)...]``."""
        return np.concatenate(([self.omega0], self.omega, self.v.ravel()))

    @classmethod
    def from_vector(cls, theta, n, k):
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (1 + n + n * k,):
            raise InvalidDimensionError(f"parameter vector length {theta.shape} != {1 + n + n * k}")
        return cls(theta[0], theta[1 : 1 + n], theta[1 + n :].reshape(n, k))

    def __eq__(self, other):
        if not isinstance(other, FmParams):
            return NotImplemented
        return (
            self.omega0 == other.omega0
            and np.array_equal(self.omega, other.omega)
            and np.array_equal(self.v, other.v)
        )


def init_scales(n, k):
    """Half-widths ``(L1, L2)`` of the uniform initialization ranges.

    With ``x_i ~ Bernoulli(1/2)`` independent, ``omega_i ~ U[-L1, L1)`` and
    ``v_if ~ U[-L2, L2)``, these make the linear and pairwise terms each
    have unit variance:

        N * (L1**2 / 3) / 2 = 1
        N (N - 1) / 2 * K * (L2**2 / 3)**2 / 4 = 1
    """
    return np.sqrt(6.0 / n), (72.0 / (k * n * (n - 1))) ** 0.25


def init_params(n, k, random_state=None):
    """Random FM with zero mean output and unit-variance linear/pairwise terms."""
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n!r}")
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")
    rng = as_generator(random_state)
    l1, l2 = init_scales(int(n), int(k))
    omega = rng.uniform(-l1, l1, size=int(n))
    v = rng.uniform(-l2, l2, size=(int(n), int(k)))
    return FmParams(0.0, omega, v)


def _pairwise(v, X):
    # sum_{i<j} <v_i, v_j> x_i x_j = 1/2 sum_f [(sum_i v_if x_i)^2 - sum_i v_if^2 x_i^2]
    xv = X @ v
    return 0.5 * (np.sum(xv * xv, axis=1) - (X * X) @ np.sum(v * v, axis=1))


def fm_predict(params, X):
    """Vectorized FM evaluation on the rows of ``X`` in O(D N K)."""
    X = check_binary_matrix(X, params.n)
    return params.omega0 + X @ params.omega + _pairwise(params.v, X)


def fm_evaluate(params, x):
    """FM output for a single binary vector."""
    x = check_binary_vector(x, params.n)
    return float(fm_predict(params, x[None, :])[0])


def fm_evaluate_naive(params, x):
    """Reference double-loop evaluation, O(N^2 K); used by tests as an oracle."""
    x = check_binary_vector(x, params.n)
    total = params.omega0
    for i in range(params.n):
        total += params.omega[i] * x[i]
        for j in range(i + 1, params.n):
            total += float(np.dot(params.v[i], params.v[j])) * x[i] * x[j]
    return total


@dataclass(frozen=True, eq=False)
class Qubo:
    """Constant plus upper-triangular coefficient matrix.

    ``coeffs[i, i]`` holds linear terms and ``coeffs[i, j]`` (``i < j``) the
    pairwise terms; anything below the diagonal is rejected.
    """

    constant: float
    coeffs: np.ndarray

    def __post_init__(self):
        q = np.array(self.coeffs, dtype=np.float64)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidDimensionError(f"QUBO matrix must be square, got shape {q.shape}")
        if np.any(np.tril(q, -1) != 0.0):
            raise ValueError("QUBO matrix must be upper triangular")
        if not (np.isfinite(self.constant) and np.all(np.isfinite(q))):
            raise ValueError("QUBO entries must be finite")
        q.flags.writeable = False
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "coeffs", q)

    @property
    def n(self):
        return self.coeffs.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Qubo):
            return NotImplemented
        return self.constant == other.constant and np.array_equal(self.coeffs, other.coeffs)

    def symmetric_couplings(self):
        """Off-diagonal couplings as a symmetric zero-diagonal matrix."""
        upper = np.triu(self.coeffs, 1)
        return upper + upper.T

    def to_text(self):
        """Serialize as ``i j value`` lines (0-based) plus a ``c value`` line.

        Only nonzero entries are written; ``repr`` floats round-trip exactly.
        """
        lines = [f"c {self.constant!r}"]
        rows, cols = np.nonzero(self.coeffs)
        lines.append(f"n {self.n}")
        for i, j in zip(rows, cols):
            lines.append(f"{i} {j} {float(self.coeffs[i, j])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        """Parse the triple format.  The ``n`` line is optional; without it the
        dimension is one more than the largest index seen."""
        constant = 0.0
        n = None
        entries = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                if parts[0] == "c" and len(parts) == 2:
                    constant = float(parts[1])
                elif parts[0] == "n" and len(parts) == 2:
                    n = int(parts[1])
                elif len(parts) == 3:
                    i, j = int(parts[0]), int(parts[1])
                    if i < 0 or j < 0:
                        raise ValueError("negative index")
                    entries.append((min(i, j), max(i, j), float(parts[2])))
                else:
                    raise ValueError("expected 'i j value', 'c value' or 'n size'")
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}: {raw!r}") from None
        if n is None:
            n = 1 + max((j for _, j, _ in entries), default=-1)
        if n < 1:
            raise InvalidDimensionError("QUBO has no variables")
        q = np.zeros((n, n))
        for i, j, val in entries:
            if j >= n:
                raise InvalidDimensionError(f"index {j} out of range for n={n}")
            q[i, j] += val
        return cls(constant, q)


def export_qubo(params):
    """Exact QUBO form of an FM."""
    gram = params.v @ params.v.T
    coeffs = np.triu(gram, 1)
    coeffs[np.diag_indices(params.n)] = params.omega
    return Qubo(params.omega0, coeffs)


def qubo_evaluate(q, x):
    """``c + sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j``."""
    x = check_binary_vector(x, q.n)
    return float(q.constant + x @ q.coeffs @ x)
