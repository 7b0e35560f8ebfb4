"""Distributed nonparametric regression for sensor networks (SN-Train)."""
from .centralized import FieldEstimate, evaluate, fit_centralized, predict, rkhs_norm_sq
from .experiments import ExperimentConfig, run_connectivity_study, run_convergence_study
from .fusion import FusionRule, fuse, fuse_predict
from .kernels import KernelSpec, gram_matrix, kernel_eval
from .linalg import FactorizationError, min_eigenvalue_lower_bound, ridge_solve
from .network import SensorNetwork, build_disk_topology
from .sn_train import Schedule, local_only_train, local_update, sensor_estimate, sweep, train

__version__ = "0.1.0"
