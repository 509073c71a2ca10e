"""Scale-dependent nodal centrality from powers of the adjacency matrix.

``R[i, k] = ((A**k)^T A**k)[i, i]`` is the squared norm of column ``i`` of
``A**k``: the squared weighted count of length-k walks leaving node ``i``.
Small ``k`` measures local influence (out-degree like), large ``k`` global
influence (left eigenvector centrality).
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import DimensionError
from .gramian import MatrixPowers, as_network

log = logging.getLogger(__name__)

FALLBACK_POWER = 200
# relative gap under which two communicabilities count as tied maxima
TIE_RTOL = 1e-12
_DENSE_EIG_MAX_N = 300


class PerronFallbackWarning(RuntimeWarning):
    """The Perron limit does not exist; a large finite power was used instead."""


@dataclass(frozen=True)
class CommunicabilityProfile:
    r_values: np.ndarray  # shape (n, K)
    r_inf: Optional[np.ndarray]
    argmax_seq: tuple
    spectral_radius: float
    r_inf_exact: bool = True

    @property
    def n(self) -> int:
        return self.r_values.shape[0]

    @property
    def horizon(self) -> int:
        return self.r_values.shape[1]


@dataclass(frozen=True)
class DominanceReport:
    leader: int
    runner_up_local: int
    runner_up_global: int
    dominance: float
    scale_pair: tuple
    leader_is_global_max: bool


def communicability_matrix(a, K: int) -> np.ndarray:
    """``R`` of shape (n, K) for k = 0..K-1, streaming over powers."""
    if K < 1:
        raise DimensionError("horizon must be at least 1")
    a = a.a if isinstance(a, MatrixPowers) else as_network(a)
    n = a.shape[0]
    out = np.empty((n, K))
    p = np.eye(n)
    for k in range(K):
        if k:
            p = a @ p
        out[:, k] = np.einsum("ij,ij->j", p, p)
    return out


def argmax_low(values) -> int:
    """Index of the maximum, lowest index on exact ties."""
    return int(np.argmax(values))


def top_m(values, m: int) -> tuple:
    """Indices of the ``m`` largest values, ties to the lowest index, ascending order."""
    order = np.argsort(-np.asarray(values), kind="stable")[:m]
    return tuple(sorted(int(i) for i in order))


def maximizers(values, rtol: float = TIE_RTOL) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    top = values.max()
    return np.flatnonzero(values >= top - rtol * abs(top))


def is_strongly_connected(a) -> bool:
    graph = sp.csr_matrix(as_network(a).T > 0)
    ncomp, _ = connected_components(graph, directed=True, connection="strong")
    return ncomp == 1


def period(a) -> int:
    """Period of an irreducible nonnegative matrix (1 means aperiodic).

    Uses BFS levels from node 0: the period is the gcd of
    ``level[src] + 1 - level[dst]`` over all edges.
    """
    a = as_network(a)
    graph = sp.csr_matrix(a.T > 0)  # graph[src, dst] for edge src -> dst
    level = shortest_path(graph, indices=0, unweighted=True, directed=True)
    src, dst = graph.nonzero()
    ok = np.isfinite(level[src]) & np.isfinite(level[dst])
    diffs = (level[src][ok] + 1 - level[dst][ok]).astype(np.int64)
    g = int(np.gcd.reduce(np.abs(diffs))) if diffs.size else 0
    return g


def is_primitive(a) -> bool:
    """Irreducible and aperiodic, i.e. the Perron limit of ``(A/rho)**k`` exists."""
    return is_strongly_connected(a) and period(a) == 1


def _perron_vector(a: np.ndarray):
    """Dominant eigenpair of a nonnegative primitive matrix, vector made nonnegative."""
    n = a.shape[0]
    if n > _DENSE_EIG_MAX_N:
        try:
            vals, vecs = spla.eigs(a, k=1, which="LM", tol=1e-13, maxiter=10 * n)
            val, vec = vals[0], vecs[:, 0]
        except spla.ArpackNoConvergence:
            val = None
        if val is not None:
            return _real_perron(val, vec)
    vals, vecs = np.linalg.eig(a)
    j = int(np.argmax(np.abs(vals)))
    return _real_perron(vals[j], vecs[:, j])


def _real_perron(val, vec):
    vec = np.real(vec * np.exp(-1j * np.angle(vec[np.argmax(np.abs(vec))])))
    if vec.sum() < 0:
        vec = -vec
    return float(np.real(val)), np.clip(vec, 0.0, None)


def spectral_radius(a) -> float:
    a = as_network(a)
    n = a.shape[0]
    if n > _DENSE_EIG_MAX_N:
        try:
            vals = spla.eigs(a, k=1, which="LM", return_eigenvectors=False, tol=1e-13, maxiter=10 * n)
            return float(np.abs(vals[0]))
        except spla.ArpackNoConvergence:
            pass
    return float(np.max(np.abs(np.linalg.eigvals(a))))


def perron_vectors(a):
    """Right and left Perron vectors ``v, u`` with ``v.v = 1`` and ``u.v = 1``."""
    a = as_network(a)
    rho, v = _perron_vector(a)
    _, u = _perron_vector(a.T.copy())
    v = v / np.linalg.norm(v)
    u = u / (u @ v)
    return rho, v, u


def asymptotic_communicability(a):
    """Limit ranking vector ``R_i(inf) = u_i**2`` and whether it is exact.

    For matrices without a Perron limit (reducible or periodic) the fallback is
    ``R_i(k) / rho**(2k)`` at ``k = 200``, returned with ``exact=False``.
    """
    a = as_network(a)
    if is_primitive(a):
        _, _, u = perron_vectors(a)
        return u**2, True
    warnings.warn(
        "adjacency matrix is reducible or periodic; using R(k)/rho^2k at "
        f"k={FALLBACK_POWER} as the limit surrogate",
        PerronFallbackWarning,
        stacklevel=2,
    )
    rho = spectral_radius(a)
    if rho <= 0.0:
        return np.zeros(a.shape[0]), False
    p = np.linalg.matrix_power(a / rho, FALLBACK_POWER)
    return np.einsum("ij,ij->j", p, p), False


def profile(a, K: int, with_limit: bool = True) -> CommunicabilityProfile:
    """Communicability at every scale ``k < K``, argmax sequence and limit vector."""
    a = as_network(a)
    r = communicability_matrix(a, K)
    argmax_seq = tuple(argmax_low(r[:, k]) for k in range(K))
    if with_limit:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", PerronFallbackWarning)
            r_inf, exact = asymptotic_communicability(a)
        if caught:
            log.info("%s", caught[0].message)
        rho = spectral_radius(a)
    else:
        r_inf, exact, rho = None, False, math.nan
    return CommunicabilityProfile(r, r_inf, argmax_seq, rho, exact)


def _gap(values, leader):
    others = np.delete(np.arange(len(values)), leader)
    runner = int(others[np.argmax(values[others])])
    top = values[leader]
    if top <= 0.0:
        return runner, (-math.inf if values[runner] > 0.0 else 0.0)
    return runner, float((top - values[runner]) / top)


def dominance(a, K: int, global_scale: str = "finite", r_values=None, r_inf=None) -> DominanceReport:
    """How distinctly the locally most central node leads at both scales.

    The leader is ``argmax R_i(1)``; its relative lead over the runner-up is
    measured at ``k = 1`` and at the global scale (``k = K-1``, or the Perron
    limit when ``global_scale="inf"``) and the smaller lead is returned.  If
    the leader is not the global maximum the global lead is negative.
    ``r_values`` and ``r_inf`` may be passed to reuse a computed profile.
    """
    if K < 2:
        raise DimensionError("dominance needs K >= 2")
    a = as_network(a)
    if a.shape[0] < 2:
        raise DimensionError("dominance needs at least two nodes")
    r = communicability_matrix(a, K) if r_values is None else r_values
    local = r[:, 1]
    if global_scale == "inf":
        glob = asymptotic_communicability(a)[0] if r_inf is None else np.asarray(r_inf, dtype=float)
        pair = (1, "inf")
    elif global_scale == "finite":
        glob = r[:, K - 1]
        pair = (1, K - 1)
    else:
        raise ValueError(f"global_scale must be 'finite' or 'inf', got {global_scale!r}")
    leader = argmax_low(local)
    ru_local, gap_local = _gap(local, leader)
    ru_global, gap_global = _gap(glob, leader)
    return DominanceReport(
        leader=leader,
        runner_up_local=ru_local,
        runner_up_global=ru_global,
        dominance=min(gap_local, gap_global),
        scale_pair=pair,
        leader_is_global_max=argmax_low(glob) == leader,
    )


def scale_heterogeneity_test(a, K: int, r_values=None) -> bool:
    """Sufficient test for a strict time-varying advantage under the trace measure.

    True when no node is maximal both at ``k = 1`` and at ``k = K-1``.  Away
    from ties this is ``argmax R_i(1) != argmax R_i(K-1)``; nodes within
    ``TIE_RTOL`` of a maximum count as maximal, so tied networks are never
    reported as heterogeneous.
    """
    if K < 2:
        raise DimensionError("the test needs K >= 2")
    r = communicability_matrix(a, K) if r_values is None else r_values
    local = maximizers(r[:, 1])
    glob = maximizers(r[:, K - 1])
    return np.intersect1d(local, glob).size == 0
