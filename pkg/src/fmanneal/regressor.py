"""scikit-learn compatible factorization machine regressor for binary inputs."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._rng import as_generator
from ._validation import check_binary_matrix
from .fm import export_qubo, fm_predict, init_params
from .training import TrainConfig, train


class FactorizationMachineRegressor(RegressorMixin, BaseEstimator):
    """Second-order FM trained by full-batch AdamW on squared error.

    Parameters
    ----------
    n_factors : int, default=8
        Rank K of the pairwise factor vectors.
    n_epochs : int, default=1000
        Full-batch optimizer steps per call to :meth:`fit`.
    learning_rate, beta1, beta2, eps, weight_decay : float
        AdamW hyperparameters.
    warm_start : bool, default=False
        Continue from the current ``params_`` on repeated ``fit`` calls.
        The optimizer moments are reset on every call either way.
    random_state : None, int or numpy Generator
        Source for the variance-targeted initialization.

    Attributes
    ----------
    params_ : FmParams
    train_loss_ : float
        MSE after the last epoch.
    loss_log_ : list of (epoch, loss)
    n_features_in_ : int
    """

    def __init__(
        self,
        n_factors=8,
        n_epochs=1000,
        learning_rate=0.01,
        beta1=0.9,
        beta2=0.999,
        eps=1e-8,
        weight_decay=0.01,
        warm_start=False,
        random_state=None,
    ):
        self.n_factors = n_factors
        self.n_epochs = n_epochs
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.warm_start = warm_start
        self.random_state = random_state

    def _train_config(self):
        return TrainConfig(
            epochs=self.n_epochs,
            lr=self.learning_rate,
            beta1=self.beta1,
            beta2=self.beta2,
            eps=self.eps,
            weight_decay=self.weight_decay,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=True)
        X = check_binary_matrix(X)
        cfg = self._train_config()
        n = X.shape[1]
        if self.warm_start and getattr(self, "params_", None) is not None and self.params_.n == n:
            start = self.params_
        else:
            start = init_params(n, self.n_factors, as_generator(self.random_state))
        result = train(start, X, y, cfg)
        self.params_ = result.params
        self.train_loss_ = result.final_loss
        self.loss_log_ = result.loss_log
        self.n_features_in_ = n
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X, dtype=np.float64)
        return fm_predict(self.params_, check_binary_matrix(X, self.n_features_in_))

    def to_qubo(self):
        """Exact QUBO of the fitted model."""
        check_is_fitted(self, "params_")
        return export_qubo(self.params_)
