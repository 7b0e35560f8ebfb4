"""Disk-graph sensor networks with self-inclusive neighborhoods."""
from __future__ import annotations

import csv
from collections import deque
from dataclasses import dataclass

import numpy as np

from .kernels import KernelSpec, as_points, gram_matrix


@dataclass(frozen=True, eq=False)
class SensorNetwork:
    positions: np.ndarray  # (n, d)
    radius: float
    neighborhoods: tuple  # tuple of sorted int arrays; sensor i is in its own list

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def degrees(self) -> np.ndarray:
        """|N_i| per sensor, self included."""
        return np.array([len(nb) for nb in self.neighborhoods])


def pairwise_distances(P: np.ndarray) -> np.ndarray:
    return np.sqrt(((P[:, None, :] - P[None, :, :]) ** 2).sum(axis=-1))


def build_disk_topology(positions, r: float) -> SensorNetwork:
    """Sensors i != j are neighbors when their distance is strictly below ``r``."""
    P = as_points(positions)
    if P.shape[0] == 0:
        raise ValueError("network needs at least one sensor")
    if not r >= 0:
        raise ValueError(f"radius must be nonnegative, got {r!r}")
    P = P.copy()
    P.flags.writeable = False
    adj = pairwise_distances(P) < r
    np.fill_diagonal(adj, True)
    hoods = tuple(np.flatnonzero(row) for row in adj)
    for nb in hoods:
        nb.flags.writeable = False
    return SensorNetwork(P, float(r), hoods)


def local_gram(net: SensorNetwork, spec: KernelSpec, s: int) -> np.ndarray:
    """Kernel matrix over sensor ``s``'s neighborhood, in ascending id order."""
    if not 0 <= s < net.n:
        raise IndexError(f"sensor id {s} out of range for {net.n} sensors")
    return gram_matrix(spec, net.positions[net.neighborhoods[s]])


def is_connected(net: SensorNetwork) -> bool:
    seen = np.zeros(net.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in net.neighborhoods[i]:
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


def degree_sum(net: SensorNetwork) -> int:
    return int(net.degrees().sum())


def read_positions_csv(path) -> np.ndarray:
    """Read ``id,coord1,...`` rows. Ids must be 0..n-1 in any order."""
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: no sensor rows")
    ids, coords = [], []
    for lineno, row in enumerate(rows, start=1):
        try:
            ids.append(int(row[0]))
            coords.append([float(c) for c in row[1:]])
        except ValueError as exc:
            raise ValueError(f"{path}: bad row {lineno}: {exc}") from None
    if sorted(ids) != list(range(len(ids))):
        raise ValueError(f"{path}: sensor ids must be 0..{len(ids) - 1}")
    if len({len(c) for c in coords}) != 1 or not coords[0]:
        raise ValueError(f"{path}: inconsistent coordinate dimension")
    out = np.empty((len(ids), len(coords[0])))
    out[ids] = coords
    return out


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
