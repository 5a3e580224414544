"""The FMA loop: train surrogate, export QUBO, sample, evaluate, update data.

Randomness is split into independent streams derived from the run seed:

* ``initial-data``  initial unique inputs (``data_seed`` overrides);
* ``fm-init``       FM initialization, index = round (``fm_seed`` overrides);
* ``anneal``        annealer seed per round, index = round (``anneal_seed``
  overrides); reads within a round are further split by read index.

Holding ``data_seed`` and ``anneal_seed`` fixed while varying ``fm_seed``
reproduces the protocol of varying only the surrogate initialization.
"""

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._rng import RNG_IDENTITY, child_generator, seed_sequence
from ._validation import bits_to_str, str_to_bits
from .annealer import sample
from .config import FmaConfig, to_flat
from .dataset import Policy, generate_initial, select_lowest
from .exceptions import ReferenceValueError, RunAborted
from .labs import labs_objective
from .regressor import FactorizationMachineRegressor
from .training import TrainConfig

OPTIMUM_TOL = 1e-9


def residual(best_objective, optimum):
    """Distance of the best objective above a known optimum (never negative)."""
    if best_objective < optimum - OPTIMUM_TOL:
        raise ReferenceValueError(
            f"objective {best_objective!r} is below the reference optimum {optimum!r}"
        )
    return max(0.0, float(best_objective) - float(optimum))


def improvement_rate(v_proposed, v_conventional):
    """``(v_proposed - v_conventional) / v_conventional``.

    For negative objectives a lower (better) proposed value gives a positive rate.
    """
    if v_conventional == 0:
        raise ValueError("conventional value must be nonzero")
    return (float(v_proposed) - float(v_conventional)) / float(v_conventional)


@dataclass
class RunRecord:
    config: dict
    seed: int
    rng: str = RNG_IDENTITY
    optimum: float = None
    initial_best_objective: float = None
    initial_bb_calls: int = 0
    trace: list = field(default_factory=list)
    best_x: str = None
    best_objective: float = None
    complete: bool = False
    error: str = None
    meta: dict = field(default_factory=dict)

    @property
    def best_residual(self):
        if self.optimum is None or self.best_objective is None:
            return None
        return residual(self.best_objective, self.optimum)

    @property
    def bb_calls(self):
        return self.trace[-1]["bb_calls_cumulative"] if self.trace else self.initial_bb_calls

    def summary(self):
        return {
            "type": "summary",
            "complete": self.complete,
            "error": self.error,
            "seed": self.seed,
            "rng": self.rng,
            "config": self.config,
            "optimum": self.optimum,
            "initial_bb_calls": self.initial_bb_calls,
            "initial_best_objective": self.initial_best_objective,
            "iterations": len(self.trace),
            "bb_calls": self.bb_calls,
            "best_x": self.best_x,
            "best_objective": self.best_objective,
            "best_residual": self.best_residual,
            "meta": self.meta,
        }

    def to_jsonl(self):
        lines = [json.dumps({"type": "iteration", **row}) for row in self.trace]
        lines.append(json.dumps(self.summary()))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text):
        rows, summary = [], None
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            kind = obj.pop("type", None)
            if kind == "iteration":
                rows.append(obj)
            elif kind == "summary":
                summary = obj
        if summary is None:
            raise ValueError("record has no summary line")
        return cls(
            config=summary["config"],
            seed=summary["seed"],
            rng=summary["rng"],
            optimum=summary["optimum"],
            initial_best_objective=summary["initial_best_objective"],
            initial_bb_calls=summary["initial_bb_calls"],
            trace=rows,
            best_x=summary["best_x"],
            best_objective=summary["best_objective"],
            complete=summary["complete"],
            error=summary["error"],
            meta=summary.get("meta") or {},
        )


def _round_seed(seed, r):
    a, b = seed_sequence(seed, "anneal", r).generate_state(2, dtype=np.uint32)
    return (int(a) << 32 | int(b)) >> 1


def _regressor(cfg, random_state, warm_start):
    t = cfg.train
    return FactorizationMachineRegressor(
        n_factors=cfg.k, n_epochs=t.epochs, learning_rate=t.lr, beta1=t.beta1, beta2=t.beta2,
        eps=t.eps, weight_decay=t.weight_decay, warm_start=warm_start, random_state=random_state,
    )


def run_fma(cfg, bb=None, optimum=None, callback=None):
    """Run the full FMA loop and return its :class:`RunRecord`.

    ``bb`` maps a 0/1 float vector to a scalar (default: negated LABS merit
    factor).  With ``optimum`` supplied, residuals are traced as well.
    ``callback(row)`` is invoked after every iteration.

    On failure a :class:`RunAborted` carrying the partial record is raised.
    """
    bb = labs_objective if bb is None else bb
    data_seed = cfg.seed if cfg.data_seed is None else cfg.data_seed
    fm_seed = cfg.seed if cfg.fm_seed is None else cfg.fm_seed
    anneal_seed = cfg.seed if cfg.anneal_seed is None else cfg.anneal_seed
    record = RunRecord(config=to_flat(cfg), seed=cfg.seed, optimum=optimum)

    try:
        ds = generate_initial(cfg.n, cfg.d_init, bb, child_generator(data_seed, "initial-data"), cfg.policy)
        y0 = ds.y
        i0 = int(np.argmin(y0))
        best_y = float(y0[i0])
        best_x = ds.X[i0]
        bb_calls = cfg.d_init
        record.initial_bb_calls = bb_calls
        record.initial_best_objective = best_y
        record.best_x, record.best_objective = bits_to_str(best_x), best_y
        model = _regressor(cfg, child_generator(fm_seed, "fm-init", 0), warm_start=True)

        for r in range(cfg.n_iter):
            X, y = ds.initial_training_view() if r == 0 else ds.training_view()
            if cfg.reset_params_each_round and r > 0:
                model.set_params(random_state=child_generator(fm_seed, "fm-init", r), warm_start=False)
            model.fit(X, y)
            samples = sample(model.to_qubo(), cfg.anneal, _round_seed(anneal_seed, r))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                sel = select_lowest(samples, cfg.d_adds, bb)
            ds.add_batch(sel.pairs)
            bb_calls += sel.bb_calls
            x_top, y_top = sel.pairs[0]
            if y_top < best_y:
                best_y, best_x = y_top, x_top
            record.best_x, record.best_objective = bits_to_str(best_x), best_y
            row = {
                "iteration": r + 1,
                "bb_calls_cumulative": bb_calls,
                "round_bb_calls": sel.bb_calls,
                "short_batch": sel.short,
                "best_objective_so_far": best_y,
                "residual_so_far": None if optimum is None else residual(best_y, optimum),
                "train_loss_final": model.train_loss_,
                "train_loss_log": [[int(e), float(v)] for e, v in model.loss_log_],
                "dataset_size": len(ds),
            }
            record.trace.append(row)
            if callback is not None:
                callback(row)
    except Exception as exc:
        record.error = repr(exc)
        raise RunAborted(record, exc) from exc
    record.complete = True
    return record


class FactorizationMachineAnnealing(BaseEstimator):
    """Estimator-style wrapper around :func:`run_fma`.

    ``d_latest=None`` selects the conventional (keep everything) dataset.
    After :meth:`optimize`, ``best_x_``, ``best_objective_`` and ``record_``
    hold the outcome.
    """

    def __init__(
        self,
        n_factors=8,
        d_init=100,
        d_reads=15,
        d_adds=3,
        n_iter=1500,
        d_latest=None,
        n_epochs=1000,
        learning_rate=0.01,
        weight_decay=0.01,
        beta_initial=1e-5,
        beta_final=100.0,
        outer_loops=1000,
        inner_loops=10,
        reset_params_each_round=False,
        random_state=0,
    ):
        self.n_factors = n_factors
        self.d_init = d_init
        self.d_reads = d_reads
        self.d_adds = d_adds
        self.n_iter = n_iter
        self.d_latest = d_latest
        self.n_epochs = n_epochs
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.beta_initial = beta_initial
        self.beta_final = beta_final
        self.outer_loops = outer_loops
        self.inner_loops = inner_loops
        self.reset_params_each_round = reset_params_each_round
        self.random_state = random_state

    def to_config(self, n_features):
        from .annealer import AnnealConfig

        return FmaConfig(
            n=n_features, k=self.n_factors, d_init=self.d_init, d_reads=self.d_reads,
            d_adds=self.d_adds, n_iter=self.n_iter, policy=Policy(self.d_latest),
            train=TrainConfig(epochs=self.n_epochs, lr=self.learning_rate,
                              weight_decay=self.weight_decay),
            anneal=AnnealConfig(self.beta_initial, self.beta_final, "linear",
                                self.outer_loops, self.inner_loops, self.d_reads),
            seed=self.random_state, reset_params_each_round=self.reset_params_each_round,
        )

    def optimize(self, objective, n_features, optimum=None):
        self.record_ = run_fma(self.to_config(n_features), objective, optimum)
        self.best_x_ = str_to_bits(self.record_.best_x)
        self.best_objective_ = self.record_.best_objective
        return self
