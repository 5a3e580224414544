"""MSE training of a factorization machine with full-batch AdamW.

Parameters are handled internally as one flat vector
``theta = [omega0, omega (N), v (N*K, row-major)]`` so the optimizer state
is a pair of arrays of the same length.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_binary_matrix
from .exceptions import EmptyDatasetError, InvalidDimensionError, NumericFailureError
from .fm import FmParams, fm_predict

LOG_EVERY = 100


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 1000
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01

    def __post_init__(self):
        if isinstance(self.epochs, bool) or int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be an integer >= 1, got {self.epochs!r}")
        if not self.lr > 0:
            raise ValueError(f"lr must be positive, got {self.lr!r}")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("beta1 and beta2 must lie in (0, 1)")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not self.weight_decay >= 0:
            raise ValueError("weight_decay must be nonnegative")


@dataclass
class AdamWState:
    """Moment accumulators for AdamW with decoupled weight decay."""

    m: np.ndarray
    v_acc: np.ndarray
    step_count: int = 0
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01

    @classmethod
    def fresh(cls, size, cfg=None, **overrides):
        cfg = cfg or TrainConfig()
        hyper = dict(
            lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps, weight_decay=cfg.weight_decay
        )
        hyper.update(overrides)
        return cls(np.zeros(size), np.zeros(size), 0, **hyper)

    @classmethod
    def for_params(cls, params, cfg=None, **overrides):
        return cls.fresh(1 + params.n + params.n * params.k, cfg, **overrides)


@dataclass
class TrainResult:
    params: FmParams
    final_loss: float
    # (epoch, loss) pairs: loss before the first step and every LOG_EVERY epochs after.
    loss_log: list = field(default_factory=list)


def _check_data(X, y, n):
    X = check_binary_matrix(X, n)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] == 0:
        raise EmptyDatasetError("dataset is empty")
    if y.shape[0] != X.shape[0]:
        raise InvalidDimensionError(f"{X.shape[0]} inputs but {y.shape[0]} targets")
    return X, y


def mse_loss(params, X, y):
    """Mean squared error of the FM over a dataset."""
    X, y = _check_data(X, y, params.n)
    r = fm_predict(params, X) - y
    return float(np.mean(r * r))


def _loss_and_grad(theta, X, X2, y, n, k):
    w0 = theta[0]
    w = theta[1 : 1 + n]
    v = theta[1 + n :].reshape(n, k)
    xv = X @ v
    pred = w0 + X @ w + 0.5 * (np.sum(xv * xv, axis=1) - X2 @ np.sum(v * v, axis=1))
    resid = pred - y
    d = y.shape[0]
    loss = float(resid @ resid) / d
    r = resid * (2.0 / d)
    grad = np.empty_like(theta)
    grad[0] = r.sum()
    grad[1 : 1 + n] = X.T @ r
    # df/dv_if = x_i * (sum_j v_jf x_j) - v_if * x_i^2
    gv = X.T @ (r[:, None] * xv) - v * (X2.T @ r)[:, None]
    grad[1 + n :] = gv.ravel()
    return loss, grad


def loss_gradient(params, X, y):
    """Gradient of :func:`mse_loss` with respect to the FM parameters.

    Returned as an :class:`FmParams` holding the partial derivatives.
    """
    X, y = _check_data(X, y, params.n)
    _, grad = _loss_and_grad(params.to_vector(), X, X * X, y, params.n, params.k)
    return FmParams.from_vector(grad, params.n, params.k)


def _adamw_update(theta, grad, state):
    bad = np.flatnonzero(~np.isfinite(grad))
    if bad.size:
        raise NumericFailureError(bad[0])
    b1, b2 = state.beta1, state.beta2
    state.step_count += 1
    t = state.step_count
    state.m *= b1
    state.m += (1.0 - b1) * grad
    state.v_acc *= b2
    state.v_acc += (1.0 - b2) * grad * grad
    m_hat = state.m / (1.0 - b1**t)
    v_hat = state.v_acc / (1.0 - b2**t)
    return theta * (1.0 - state.lr * state.weight_decay) - state.lr * (
        m_hat / (np.sqrt(v_hat) + state.eps)
    )


def adamw_step(params, grad, state):
    """One AdamW update; ``state`` is advanced in place and also returned.

    ``grad`` may be an :class:`FmParams` of partials or a flat array in
    :meth:`FmParams.to_vector` order.
    """
    g = grad.to_vector() if isinstance(grad, FmParams) else np.asarray(grad, dtype=np.float64)
    theta = params.to_vector()
    if g.shape != theta.shape or state.m.shape != theta.shape:
        raise InvalidDimensionError("gradient, state and parameters differ in shape")
    new_theta = _adamw_update(theta, g, state)
    return FmParams.from_vector(new_theta, params.n, params.k), state


def train(params, X, y, cfg=None, state=None):
    """Run ``cfg.epochs`` full-batch AdamW steps on the MSE loss.

    A fresh optimizer state is created when ``state`` is None.
    """
    cfg = cfg or TrainConfig()
    X, y = _check_data(X, y, params.n)
    n, k = params.n, params.k
    if state is None:
        state = AdamWState.for_params(params, cfg)
    X2 = X * X
    theta = params.to_vector()
    log = []
    for epoch in range(cfg.epochs):
        loss, grad = _loss_and_grad(theta, X, X2, y, n, k)
        if epoch % LOG_EVERY == 0:
            log.append((epoch, loss))
        theta = _adamw_update(theta, grad, state)
    final_loss, _ = _loss_and_grad(theta, X, X2, y, n, k)
    log.append((cfg.epochs, final_loss))
    if not np.all(np.isfinite(theta)):
        raise NumericFailureError(int(np.flatnonzero(~np.isfinite(theta))[0]), "parameters diverged")
    return TrainResult(FmParams.from_vector(theta, n, k), final_loss, log)


@dataclass(frozen=True)
class DilutionReport:
    total_loss: float
    newest_contribution: float
    dilution_weight: float


def dilution_diagnostic(params, X, y, x_new, y_new):
    """Split the loss over ``D + 1`` points into the newest point's share.

    ``X``/``y`` may be empty (``D = 0``).
    """
    y = np.asarray(y, dtype=np.float64).ravel()
    X = np.asarray(X, dtype=np.float64).reshape(y.shape[0], params.n)
    x_new = np.asarray(x_new, dtype=np.float64).reshape(1, params.n)
    d = y.shape[0]
    weight = 1.0 / (d + 1)
    r_new = float(fm_predict(params, x_new)[0]) - float(y_new)
    newest = weight * r_new * r_new
    if d:
        r = fm_predict(params, X) - y
        old = float(r @ r)
    else:
        old = 0.0
    return DilutionReport(weight * (old + r_new * r_new), newest, weight)
