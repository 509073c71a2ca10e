"""Network generators and conversion of raw connectivity into dynamics.

Raw connectivity ``c[i, j]`` is the relative strength of the link j -> i.
Undirected graphs are symmetric matrices.  All random generators draw from a
``numpy.random.Generator`` seeded from the config, so a config reproduces its
matrix exactly.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
import scipy.linalg as la

from .communicability import spectral_radius
from .errors import DimensionError
from .gramian import as_network

INDUCTION_FORMULA = "induction-v1: A = expm(tau * (C / rho(C) - leak * I))"
TRANSMISSION_FORMULA = "transmission-v1: A[i, :] = C[i, :] / sum(C[i, :]); zero rows -> self-loop 1"


class Family(str, enum.Enum):
    LINE = "line"
    RING = "ring"
    STAR = "star"
    ER = "er"
    BA = "ba"
    WS = "ws"


class WeightMode(str, enum.Enum):
    UNIT = "unit"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class GeneratorConfig:
    family: Family
    n: int
    edge_weight: float = 1.0
    p: Optional[float] = None
    m_a: Optional[int] = None
    k_ring: Optional[int] = None
    beta: Optional[float] = None
    weight_mode: WeightMode = WeightMode.UNIT
    directed: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", Family(str(getattr(self.family, "value", self.family)).lower()))
        object.__setattr__(self, "weight_mode", WeightMode(getattr(self.weight_mode, "value", self.weight_mode)))
        self.validate()

    def validate(self):
        f, n = self.family, self.n
        if n < 1:
            raise ValueError("n must be positive")
        if not self.edge_weight > 0:
            raise ValueError("edge_weight must be positive")
        if self.directed and f is not Family.ER:
            raise ValueError("only the ER family supports directed generation")
        if f is Family.RING and n < 3:
            raise ValueError("a ring needs n >= 3")
        if f is Family.STAR and n < 2:
            raise ValueError("a star needs n >= 2")
        if f is Family.ER and (self.p is None or not 0.0 <= self.p <= 1.0):
            raise ValueError("ER needs an edge probability p in [0, 1]")
        if f is Family.BA:
            if self.m_a is None or self.m_a < 1:
                raise ValueError("BA needs an attachment count m_a >= 1")
            if n < self.m_a + 1:
                raise ValueError("BA needs n >= m_a + 1 (size of the complete seed core)")
        if f is Family.WS:
            k = self.k_ring
            if k is None or k < 2 or k % 2 or k >= n:
                raise ValueError("WS needs an even neighbour count 2 <= k_ring < n")
            if self.beta is None or not 0.0 <= self.beta <= 1.0:
                raise ValueError("WS needs a rewiring probability beta in [0, 1]")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.value
        d["weight_mode"] = self.weight_mode.value
        return d


@dataclass(frozen=True)
class RawConnectivity:
    c: np.ndarray
    directed: bool

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DimensionError(f"connectivity must be square, got shape {c.shape}")
        if np.any(c < 0) or not np.all(np.isfinite(c)):
            raise DimensionError("connectivity entries must be finite and nonnegative")
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.shape[0]


def _undirected_edges(cfg: GeneratorConfig, rng) -> list:
    n = cfg.n
    f = cfg.family
    if f is Family.LINE:
        return [(i, i + 1) for i in range(n - 1)]
    if f is Family.RING:
        return [(i, (i + 1) % n) for i in range(n)]
    if f is Family.STAR:
        return [(0, i) for i in range(1, n)]
    if f is Family.ER:
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < cfg.p
        return list(zip(iu[keep].tolist(), ju[keep].tolist()))
    if f is Family.BA:
        return _barabasi_albert(n, cfg.m_a, rng)
    return _watts_strogatz(n, cfg.k_ring, cfg.beta, rng)


def _barabasi_albert(n, m_a, rng) -> list:
    core = m_a + 1
    edges = [(i, j) for i in range(core) for j in range(i + 1, core)]
    # each node appears once per incident edge, so uniform sampling from this
    # list is sampling proportional to degree
    ends = [v for e in edges for v in e]
    for new in range(core, n):
        targets = set()
        while len(targets) < m_a:
            targets.add(ends[int(rng.integers(len(ends)))])
        for t in sorted(targets):
            edges.append((t, new))
            ends.extend((t, new))
    return edges


def _watts_strogatz(n, k_ring, beta, rng) -> list:
    adj = [set() for _ in range(n)]
    lattice = []
    for j in range(1, k_ring // 2 + 1):
        for i in range(n):
            u, v = i, (i + j) % n
            adj[u].add(v)
            adj[v].add(u)
            lattice.append((u, v))
    for u, v in lattice:
        if rng.random() >= beta:
            continue
        if len(adj[u]) >= n - 1:
            continue  # u already linked to every node
        while True:
            w = int(rng.integers(n))
            if w != u and w not in adj[u]:
                break
        adj[u].discard(v)
        adj[v].discard(u)
        adj[u].add(w)
        adj[w].add(u)
    return sorted({(min(u, w), max(u, w)) for u in range(n) for w in adj[u]})


def generate(cfg: GeneratorConfig) -> RawConnectivity:
    """Raw connectivity for a generator config."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n
    c = np.zeros((n, n))
    uniform = cfg.weight_mode is WeightMode.UNIFORM
    if cfg.directed:
        mask = rng.random((n, n)) < cfg.p
        np.fill_diagonal(mask, False)
        w = rng.random((n, n)) if uniform else np.full((n, n), cfg.edge_weight)
        c[mask] = w[mask]
        return RawConnectivity(c, True)
    edges = _undirected_edges(cfg, rng)
    if edges:
        i, j = np.array(edges).T
        w = rng.random(i.size) if uniform else np.full(i.size, cfg.edge_weight)
        c[i, j] = w
        c[j, i] = w
    return RawConnectivity(c, False)


def random_connectivity(n: int, p: float, rng, directed: bool = True) -> RawConnectivity:
    """Each off-diagonal link present with probability ``p``, weight uniform in (0, 1)."""
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    c = np.where(mask, rng.random((n, n)), 0.0)
    if not directed:
        c = np.triu(c, 1)
        c = c + c.T
    return RawConnectivity(c, directed)


def transmission(raw) -> np.ndarray:
    """Normalize each node's incoming weights to sum to one.

    Nodes without incoming links get a unit self-loop.
    """
    c = raw.c if isinstance(raw, RawConnectivity) else np.asarray(raw, dtype=float)
    rows = c.sum(axis=1)
    a = np.zeros_like(c)
    pos = rows > 0
    a[pos] = c[pos] / rows[pos, None]
    idle = np.flatnonzero(~pos)
    a[idle, idle] = 1.0
    return a


def induction(raw, tau: float = 1.0, leak: float = 1.0) -> np.ndarray:
    """Sampled continuous-time dynamics ``expm(tau * (C / rho(C) - leak * I))``."""
    if not tau > 0:
        raise ValueError("sampling interval tau must be positive")
    if leak < 0:
        raise ValueError("leak must be nonnegative")
    c = raw.c if isinstance(raw, RawConnectivity) else np.asarray(raw, dtype=float)
    rho = spectral_radius(c) if c.any() else 0.0
    scaled = c / rho if rho > 0 else c
    a = la.expm(tau * (scaled - leak * np.eye(c.shape[0])))
    # exponential of an essentially nonnegative matrix is nonnegative
    return np.clip(a, 0.0, None)


def normalize_spectral(a) -> np.ndarray:
    """Scale ``A`` to unit spectral radius."""
    a = as_network(a)
    rho = spectral_radius(a)
    if not rho > 1e-14 * max(np.abs(a).max(), 1.0):
        raise DimensionError(
            "spectral radius is zero (nilpotent dynamics, e.g. an acyclic network); "
            "add self-loops or use a conversion that creates cycles before normalizing"
        )
    return a / rho


def convert(raw: RawConnectivity, method: str = "transmission", tau: float = 1.0, leak: float = 1.0):
    """Dispatch on the conversion method name; returns ``(A, formula tag)``."""
    if method == "transmission":
        return transmission(raw), TRANSMISSION_FORMULA
    if method == "induction":
        return induction(raw, tau, leak), INDUCTION_FORMULA
    if method == "none":
        return raw.c.copy(), "none: A = C"
    raise ValueError(f"unknown conversion method {method!r}")
