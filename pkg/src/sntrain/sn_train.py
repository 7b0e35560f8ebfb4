"""SN-Train: distributed kernel least squares by successive projections.

Each sensor ``s`` keeps coefficients ``c_s`` over its neighborhood ``N_s``
(ascending id order). The network's shared state is the message board
``z``, one field value per sensor location. A local update is the
projection onto the set where sensor ``s``'s function agrees with ``z`` on
``N_s``::

    c_s <- (K_s + lam_s I)^{-1} (z[N_s] + lam_s c_s)
    z[N_s] <- K_s c_s

The solve is done in correction form, ``c_s += (K_s + lam_s I)^{-1}
(z[N_s] - K_s c_s)``, which is the same map but leaves ``c_s`` bit-identical
when the messages already agree with it.

Only ``z[N_s]`` and ``c_s`` change. The simulator keeps ``z`` as one global
array; locality is a property of the update, not of the storage.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .centralized import FieldEstimate
from .kernels import KernelSpec
from .linalg import RidgeFactor
from .network import SensorNetwork, local_gram


@dataclass(eq=False)
class SensorState:
    id: int
    neighbor_ids: np.ndarray
    lambda_s: float
    local_K: np.ndarray
    coeffs: np.ndarray
    factor: RidgeFactor = field(repr=False)


@dataclass(eq=False)
class MessageBoard:
    z: np.ndarray


@dataclass(frozen=True)
class Schedule:
    """Sensor visiting order within a sweep.

    ``serial`` visits 0..n-1. ``permutation`` draws a fresh order for every
    sweep from ``(seed, sweep_index)``.
    """

    kind: str = "serial"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("serial", "permutation"):
            raise ValueError(f"unknown schedule {self.kind!r}")

    def order(self, n: int, sweep_index: int) -> np.ndarray:
        if self.kind == "serial":
            return np.arange(n)
        return np.random.default_rng([self.seed, sweep_index]).permutation(n)


SERIAL = Schedule()


@dataclass
class TrainResult:
    states: list
    board: MessageBoard
    max_deltas: list  # one entry per sweep performed

    @property
    def sweeps(self) -> int:
        return len(self.max_deltas)


def _check_inputs(net: SensorNetwork, y, lambdas):
    y = np.array(y, dtype=np.float64).reshape(-1)
    lambdas = np.array(lambdas, dtype=np.float64).reshape(-1)
    if y.shape[0] != net.n or lambdas.shape[0] != net.n:
        raise ValueError(
            f"network has {net.n} sensors but got {y.shape[0]} measurements and {lambdas.shape[0]} lambdas"
        )
    if not np.all(np.isfinite(y)):
        raise ValueError("measurements must be finite")
    if not np.all(lambdas > 0):
        raise ValueError("every lambda must be positive")
    return y, lambdas


def init_states(net: SensorNetwork, spec: KernelSpec, y, lambdas):
    """Zero coefficients everywhere; the board starts at the measurements."""
    y, lambdas = _check_inputs(net, y, lambdas)
    states = []
    for s in range(net.n):
        K = local_gram(net, spec, s)
        lam = float(lambdas[s])
        states.append(SensorState(
            id=s,
            neighbor_ids=net.neighborhoods[s],
            lambda_s=lam,
            local_K=K,
            coeffs=np.zeros(K.shape[0]),
            factor=RidgeFactor(K, lam),
        ))
    return states, MessageBoard(y.copy())


def local_update(state: SensorState, board: MessageBoard) -> float:
    """Project onto sensor ``state.id``'s constraint set, in place.

    Returns the largest change written to the board.
    """
    nb = state.neighbor_ids
    z_old = board.z[nb]
    c = state.coeffs + state.factor.solve(z_old - state.local_K @ state.coeffs)
    z_new = state.local_K @ c
    state.coeffs = c
    board.z[nb] = z_new
    return float(np.max(np.abs(z_new - z_old)))


def sweep(states, board: MessageBoard, schedule: Schedule = SERIAL, sweep_index: int = 0) -> float:
    """One pass over all sensors. Returns ``max |z_end - z_start|``."""
    z_start = board.z.copy()
    for s in schedule.order(len(states), sweep_index):
        local_update(states[s], board)
    return float(np.max(np.abs(board.z - z_start)))


def train(
    net: SensorNetwork,
    spec: KernelSpec,
    y,
    lambdas,
    T: int,
    schedule: Schedule = SERIAL,
    tol: Optional[float] = None,
    on_sweep: Optional[Callable[[int, list, MessageBoard], None]] = None,
) -> TrainResult:
    """Run ``T`` sweeps from the initial state.

    If ``tol`` is given, stop early once a sweep moves no board entry by
    more than ``tol``. ``on_sweep(t, states, board)`` is called after every
    sweep with ``t`` counting from 1; it must not mutate its arguments.
    """
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    states, board = init_states(net, spec, y, lambdas)
    deltas = []
    for t in range(1, T + 1):
        deltas.append(sweep(states, board, schedule, t - 1))
        if on_sweep is not None:
            on_sweep(t, states, board)
        if tol is not None and deltas[-1] <= tol:
            break
    return TrainResult(states, board, deltas)


def local_only_train(net: SensorNetwork, spec: KernelSpec, y, lambdas):
    """Each sensor fits its neighborhood's raw measurements once, no messages."""
    states, board = init_states(net, spec, y, lambdas)
    for st in states:
        st.coeffs = st.factor.solve(board.z[st.neighbor_ids])
    return states


def sensor_estimate(state: SensorState, positions, spec: KernelSpec) -> FieldEstimate:
    P = np.asarray(positions, dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    return FieldEstimate(spec, P[state.neighbor_ids], state.coeffs.copy())


def sensor_estimates(states, positions, spec: KernelSpec) -> list:
    return [sensor_estimate(st, positions, spec) for st in states]


def product_distance_sq(states, board: MessageBoard, ref_states, ref_board: MessageBoard) -> float:
    """``||z - z_ref||^2 + sum_s lam_s ||f_s - f_ref_s||_H^2``.

    This is the weighted norm in which each local update is an orthogonal
    projection. Both runs must share one network.
    """
    dz = board.z - ref_board.z
    total = float(dz @ dz)
    for st, ref in zip(states, ref_states):
        d = st.coeffs - ref.coeffs
        total += st.lambda_s * float(d @ st.local_K @ d)
    return total
