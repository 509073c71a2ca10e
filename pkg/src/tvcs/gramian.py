"""Finite-horizon controllability Gramians for node-actuated linear networks.

The network evolves as ``x(k+1) = A x(k) + B(k) u(k)`` where ``B(k)`` is made of
canonical basis columns, one per node actuated at step ``k``.  Node indices are
0-based throughout the package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.linalg as la

from .errors import DimensionError, ScheduleError, UncontrollableError

SYMMETRY_RTOL = 1e-10
SINGULAR_RTOL = 1e-12
CONDITION_CAP = 1e9


class Metric(str, enum.Enum):
    """Gramian-based controllability measures (all to be maximized)."""

    TRACE = "trace"
    TRACE_INV_INV = "trinv"
    DETERMINANT = "det"
    MIN_EIGENVALUE = "mineig"

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {value!r}; expected one of {names}") from None


def as_network(a) -> np.ndarray:
    """Validate an adjacency matrix; ``a[i, j]`` is the weight of edge j -> i."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionError(f"adjacency matrix must be square and non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DimensionError("adjacency matrix has non-finite entries")
    return a


@dataclass(frozen=True)
class Schedule:
    """Controlled nodes per time step: ``nodes[k]`` is the tuple actuated at step k."""

    nodes: tuple

    def __post_init__(self):
        steps = tuple(tuple(int(i) for i in step) for step in self.nodes)
        if not steps:
            raise ScheduleError("schedule horizon must be at least 1")
        m = len(steps[0])
        if m < 1:
            raise ScheduleError("each step must actuate at least one node")
        for k, step in enumerate(steps):
            if len(step) != m:
                raise ScheduleError(f"step {k} actuates {len(step)} nodes, expected {m}")
            if len(set(step)) != m:
                raise ScheduleError(f"step {k} repeats a node: {step}")
            if min(step) < 0:
                raise ScheduleError(f"step {k} has a negative node index")
        object.__setattr__(self, "nodes", steps)

    @classmethod
    def single(cls, sequence: Iterable[int]) -> "Schedule":
        """One actuated node per step."""
        return cls(tuple((int(i),) for i in sequence))

    @classmethod
    def constant(cls, nodes, horizon: int) -> "Schedule":
        if np.isscalar(nodes):
            nodes = (nodes,)
        return cls(tuple(tuple(nodes) for _ in range(horizon)))

    @property
    def horizon(self) -> int:
        return len(self.nodes)

    @property
    def inputs_per_step(self) -> int:
        return len(self.nodes[0])

    @property
    def is_constant(self) -> bool:
        first = set(self.nodes[0])
        return all(set(step) == first for step in self.nodes)

    def check(self, n: int) -> None:
        top = max(max(step) for step in self.nodes)
        if top >= n:
            raise ScheduleError(f"schedule uses node {top} but the network has {n} nodes")

    def to_list(self) -> list:
        return [list(step) for step in self.nodes]


class MatrixPowers:
    """Lazily grown cache of ``A**k``, built by repeated multiplication."""

    def __init__(self, a):
        self.a = as_network(a)
        self._powers = [np.eye(self.a.shape[0])]

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __getitem__(self, k: int) -> np.ndarray:
        if k < 0:
            raise IndexError(k)
        while len(self._powers) <= k:
            self._powers.append(self.a @ self._powers[-1])
        return self._powers[k]

    def column_norms2(self, kmax: int) -> np.ndarray:
        """``out[i, k] = ||A**k e_i||**2`` for k < kmax."""
        return np.stack([np.einsum("ij,ij->j", self[k], self[k]) for k in range(kmax)], axis=1)


def _powers(a) -> MatrixPowers:
    return a if isinstance(a, MatrixPowers) else MatrixPowers(a)


def build_input_matrix(schedule: Schedule, k: int, n: int) -> np.ndarray:
    """Input matrix at step ``k``: canonical columns of the actuated nodes."""
    if not 0 <= k < schedule.horizon:
        raise ScheduleError(f"time index {k} outside horizon {schedule.horizon}")
    schedule.check(n)
    b = np.zeros((n, schedule.inputs_per_step))
    b[list(schedule.nodes[k]), np.arange(schedule.inputs_per_step)] = 1.0
    return b


def reachable_directions(a, schedule: Schedule) -> np.ndarray:
    """Columns ``A**(K-1-k) e_j`` for every actuated ``(k, j)``, in schedule order.

    The Gramian is ``M @ M.T`` for the returned matrix ``M``.
    """
    K = schedule.horizon
    if isinstance(a, MatrixPowers):
        schedule.check(a.n)
        cols = [a[K - 1 - k][:, list(step)] for k, step in enumerate(schedule.nodes)]
        return np.concatenate(cols, axis=1)
    a = as_network(a)
    n = a.shape[0]
    schedule.check(n)
    # Horner form: columns injected at step k are propagated by the K-1-k later steps
    m = np.zeros((n, 0))
    for step in schedule.nodes:
        m = a @ m
        e = np.zeros((n, len(step)))
        e[list(step), np.arange(len(step))] = 1.0
        m = np.concatenate([m, e], axis=1)
    return m


def gramian(a, schedule: Schedule) -> np.ndarray:
    """Controllability Gramian ``sum_k A**k B(K-1-k) B(K-1-k)^T (A^T)**k``."""
    m = reachable_directions(a, schedule)
    w = m @ m.T
    return 0.5 * (w + w.T)


def _check_symmetric(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DimensionError(f"Gramian must be square, got shape {w.shape}")
    scale = np.linalg.norm(w)
    if np.linalg.norm(w - w.T) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise DimensionError("Gramian is not symmetric within tolerance")
    return 0.5 * (w + w.T)


def eigenvalues(w) -> np.ndarray:
    """Ascending eigenvalues of the symmetrized Gramian."""
    return np.linalg.eigvalsh(_check_symmetric(w))


def metric_from_eigenvalues(lam: np.ndarray, kind: Metric) -> float:
    kind = Metric.parse(kind)
    lam = np.asarray(lam, dtype=float)
    lam_max = lam[-1] if lam.size else 0.0
    if kind is Metric.TRACE:
        return float(max(lam.sum(), 0.0))
    if kind is Metric.MIN_EIGENVALUE:
        return float(max(lam[0], 0.0))
    clamped = np.clip(lam, 0.0, None)
    if kind is Metric.DETERMINANT:
        return float(np.prod(clamped))
    # harmonic mean style: limit value 0 as soon as one direction is unreachable
    if lam_max <= 0.0 or lam[0] <= SINGULAR_RTOL * lam_max:
        return 0.0
    return float(1.0 / np.sum(1.0 / lam))


def metric(w, kind) -> float:
    """Value of a controllability measure on a Gramian.

    Singular Gramians are handled by limits: ``trinv`` returns 0, ``det`` the
    (clamped) eigenvalue product and ``mineig`` clamps tiny negatives to 0.
    """
    kind = Metric.parse(kind)
    if kind is Metric.TRACE:
        return float(max(np.trace(_check_symmetric(w)), 0.0))
    return metric_from_eigenvalues(eigenvalues(w), kind)


def min_energy_control(a, schedule: Schedule, x_f, condition_cap: float = CONDITION_CAP):
    """Minimum-energy input steering ``x(0) = 0`` to ``x(K) = x_f``.

    Returns
    -------
    u : ndarray, shape (K, m)
        ``u[k] = B(k)^T (A^T)**(K-1-k) W^{-1} x_f``.
    energy : float
        ``x_f^T W^{-1} x_f``.

    Raises
    ------
    UncontrollableError
        When the Gramian is singular or its condition number is not below
        ``condition_cap``.
    """
    pw = _powers(a)
    x_f = np.asarray(x_f, dtype=float)
    if x_f.shape != (pw.n,):
        raise DimensionError(f"target must have shape ({pw.n},), got {x_f.shape}")
    directions = reachable_directions(pw, schedule)
    # W = M M^T, so the eigenvalues of W are the squared singular values of M
    sv = la.svdvals(directions)
    lam_max = sv[0] ** 2
    lam_min = sv[-1] ** 2 if sv.size == pw.n else 0.0
    if lam_max <= 0.0 or lam_min <= SINGULAR_RTOL * lam_max or lam_max / lam_min >= condition_cap:
        cond = np.inf if lam_min <= 0 else lam_max / lam_min
        raise UncontrollableError(schedule.horizon, float(lam_min), float(cond))
    # minimum-norm solution of M u = x_f through M^T = Q R; avoids squaring the condition number
    q, r = la.qr(directions.T, mode="economic")
    z = la.solve_triangular(r, x_f, trans="T")
    u = (q @ z).reshape(schedule.horizon, schedule.inputs_per_step)
    return u, float(z @ z)


def simulate(a, schedule: Schedule, x0, u) -> np.ndarray:
    """State trajectory ``x(0..K)`` of shape (K+1, n)."""
    a = as_network(a)
    n = a.shape[0]
    K, m = schedule.horizon, schedule.inputs_per_step
    x0 = np.asarray(x0, dtype=float)
    u = np.asarray(u, dtype=float)
    if x0.shape != (n,):
        raise DimensionError(f"initial state must have shape ({n},), got {x0.shape}")
    if u.ndim == 1 and m == 1:
        u = u[:, None]
    if u.shape != (K, m):
        raise DimensionError(f"input sequence must have shape ({K}, {m}), got {u.shape}")
    schedule.check(n)
    x = np.empty((K + 1, n))
    x[0] = x0
    for k in range(K):
        x[k + 1] = a @ x[k]
        np.add.at(x[k + 1], list(schedule.nodes[k]), u[k])
    return x


def reachability_ellipsoid(w):
    """Axes of the unit-energy reachable set.

    Returns the axis directions as columns of an orthonormal matrix and the
    axis lengths ``sqrt(lambda_i)``, both sorted by decreasing length.
    """
    lam, vecs = np.linalg.eigh(_check_symmetric(w))
    order = np.argsort(-lam, kind="stable")
    return vecs[:, order], np.sqrt(np.clip(lam[order], 0.0, None))

