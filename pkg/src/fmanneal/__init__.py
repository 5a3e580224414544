"""Factorization machine with annealing (FMA) for black-box binary optimization."""

from .annealer import AnnealConfig, SampleSet, SimulatedAnnealingSampler, anneal_read, brute_force_qubo, sample
from .config import FmaConfig, load_config
from .dataset import Dataset, Policy, generate_initial, select_lowest
from .driver import FactorizationMachineAnnealing, RunRecord, improvement_rate, residual, run_fma
from .fm import FmParams, Qubo, export_qubo, fm_evaluate, fm_predict, init_params, qubo_evaluate
from .labs import brute_force_optimum, labs_evaluate, labs_objective, spin_from_binary
from .regressor import FactorizationMachineRegressor
from .training import AdamWState, TrainConfig, adamw_step, dilution_diagnostic, loss_gradient, mse_loss, train

__version__ = "0.1.0"
