"""Training dataset for the FM surrogate.

Two retention policies:

* conventional: every evaluated point is kept;
* fifo(d): after each batch is appended, the oldest entries are evicted
  until at most ``d`` remain.

The initial data are always used in full for the first training round,
even when ``d`` is smaller than the initial dataset.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleUniquenessError, SequencingError, ShortBatchWarning


@dataclass(frozen=True)
class Policy:
    """Retention policy; ``d_latest is None`` means conventional (keep all)."""

    d_latest: int = None

    def __post_init__(self):
        if self.d_latest is not None:
            d = self.d_latest
            if isinstance(d, bool) or int(d) != d or d < 1:
                raise ValueError(f"d_latest must be an integer >= 1, got {d!r}")
            object.__setattr__(self, "d_latest", int(d))

    @property
    def is_conventional(self):
        return self.d_latest is None

    @classmethod
    def parse(cls, text):
        """Accept ``conventional``, ``all``, ``fifo:<d>`` or a bare integer."""
        t = str(text).strip().lower()
        if t in ("conventional", "all"):
            return cls(None)
        if t.startswith("fifo:"):
            t = t[5:]
        try:
            return cls(int(t))
        except ValueError:
            raise ValueError(f"unrecognized dataset policy {text!r}") from None

    def __str__(self):
        return "conventional" if self.d_latest is None else f"fifo:{self.d_latest}"


CONVENTIONAL = Policy(None)


class Dataset:
    """Ordered (x, y) pairs, oldest first, each tagged with a birth index."""

    def __init__(self, n, policy=CONVENTIONAL):
        self.n = int(n)
        self.policy = policy
        self._X = []
        self._y = []
        self._birth = []
        self._next_birth = 0
        self.rounds_added = 0

    def __len__(self):
        return len(self._y)

    @property
    def X(self):
        return np.array(self._X, dtype=np.float64).reshape(len(self), self.n)

    @property
    def y(self):
        return np.array(self._y, dtype=np.float64)

    @property
    def birth_indices(self):
        return list(self._birth)

    def entries(self):
        return list(zip(self._birth, self._y, self._X))

    def _append(self, x, y):
        x = np.asarray(x, dtype=np.float64).reshape(self.n)
        self._X.append(x)
        self._y.append(float(y))
        self._birth.append(self._next_birth)
        self._next_birth += 1

    def add_batch(self, batch):
        """Append ``(x, y)`` pairs in order, then apply the retention policy."""
        batch = list(batch)
        if not batch:
            raise ValueError("batch must be nonempty")
        for x, y in batch:
            self._append(x, y)
        self.rounds_added += 1
        cap = self.policy.d_latest
        if cap is not None and len(self) > cap:
            drop = len(self) - cap
            del self._X[:drop], self._y[:drop], self._birth[:drop]
        return self

    def initial_training_view(self):
        """All initial entries as ``(X, y)``, regardless of policy.

        Only valid before the first :meth:`add_batch`.
        """
        if self.rounds_added:
            raise SequencingError("initial_training_view is only available before the first add_batch")
        return self.X, self.y

    def training_view(self):
        return self.X, self.y

    def dump(self):
        """One ``birth_index, y, bitstring`` line per entry."""
        lines = []
        for b, y, x in zip(self._birth, self._y, self._X):
            bits = "".join("1" if v else "0" for v in x)
            lines.append(f"{b}, {y!r}, {bits}")
        return "\n".join(lines) + ("\n" if lines else "")


def generate_initial(n, d_init, bb, random_state, policy=CONVENTIONAL):
    """``d_init`` distinct uniform random binary vectors, each evaluated once.

    Returns the dataset; the black box is called exactly ``d_init`` times.
    """
    if isinstance(d_init, bool) or int(d_init) != d_init or d_init < 1:
        raise ValueError(f"d_init must be an integer >= 1, got {d_init!r}")
    if n < 63 and d_init > 2**n:
        raise InfeasibleUniquenessError(f"cannot draw {d_init} unique vectors of length {n}")
    ds = Dataset(n, policy)
    seen = set()
    while len(ds) < d_init:
        x = random_state.integers(0, 2, size=n).astype(np.float64)
        key = x.tobytes()
        if key in seen:
            continue
        seen.add(key)
        ds._append(x, bb(x))
    return ds


@dataclass
class Selection:
    pairs: list
    bb_calls: int
    short: bool


def select_lowest(samples, d_adds, bb):
    """Evaluate the distinct sampler outputs and keep the ``d_adds`` best.

    Duplicate reads collapse to one (the sample set is energy-sorted, so the
    first occurrence is the lowest-energy copy).  The black box is called once
    per distinct vector; results are ranked by true objective, ties keeping
    sampler order.
    """
    seen = set()
    distinct = []
    for x, _ in samples:
        key = np.asarray(x, dtype=np.int8).tobytes()
        if key not in seen:
            seen.add(key)
            distinct.append(np.asarray(x, dtype=np.float64))
    scored = [(x, float(bb(x))) for x in distinct]
    order = sorted(range(len(scored)), key=lambda i: scored[i][1])
    chosen = [scored[i] for i in order[:d_adds]]
    short = len(chosen) < d_adds
    if short:
        warnings.warn(
            f"only {len(chosen)} distinct samples for {d_adds} requested additions",
            ShortBatchWarning,
            stacklevel=2,
        )
    return Selection(chosen, len(scored), short)
