"""Manifest-subnetwork manipulation.

Only a subset of nodes (the manifest set) can be actuated.  Two remedies are
compared: restricting the trace-optimal schedule to manifest nodes, or
perturbing the manifest-to-manifest couplings until the unrestricted optimal
schedule only uses manifest nodes.  The perturbation search is randomized
(direction templates + bisection on the scale), so its norms are upper
bounds on the true minimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .communicability import communicability_matrix
from .errors import DimensionError, TVCSError
from .gramian import Schedule, as_network
from .netgen import normalize_spectral, random_connectivity, transmission
from .scheduling import tvcs_trace

TEMPLATES = ("dense", "cycle", "acyclic")
BISECTION_RTOL = 1e-4


@dataclass(frozen=True)
class ManifestProblem:
    a: np.ndarray
    manifest: tuple
    K: int
    trials: int = 20
    norm_cap: float = 1.0
    templates: tuple = ("dense", "cycle")

    def __post_init__(self):
        a = as_network(self.a)
        n = a.shape[0]
        manifest = tuple(sorted({int(i) for i in self.manifest}))
        if not manifest:
            raise DimensionError("manifest set must not be empty")
        if manifest[0] < 0 or manifest[-1] >= n:
            raise DimensionError(f"manifest nodes must lie in [0, {n})")
        if self.K < 2:
            raise DimensionError("horizon K must be at least 2")
        bad = set(self.templates) - set(TEMPLATES)
        if bad or not self.templates:
            raise ValueError(f"templates must be drawn from {TEMPLATES}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "manifest", manifest)


@dataclass(frozen=True)
class ManipulationResult:
    delta: np.ndarray
    relative_norm: float
    all_manifest: bool
    tv_value_manipulated: float
    tv_value_constrained: float
    advantage_ratio: float
    has_negative_entries: bool
    scale: float = 0.0
    trial: int = -1
    template: str = ""
    argmax_seq: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "relative_norm": self.relative_norm,
            "all_manifest": self.all_manifest,
            "tv_value_manipulated": self.tv_value_manipulated,
            "tv_value_constrained": self.tv_value_constrained,
            "advantage_ratio": self.advantage_ratio,
            "has_negative_entries": self.has_negative_entries,
            "trial": self.trial,
            "template": self.template,
            "argmax_seq": list(self.argmax_seq),
            "delta_support": [[int(i), int(j), float(self.delta[i, j])] for i, j in zip(*np.nonzero(self.delta))],
        }


def constrained_tvcs_trace(a, manifest, K: int):
    """Trace-optimal time-varying schedule using manifest nodes only."""
    a = as_network(a)
    members = np.array(sorted({int(i) for i in manifest}))
    if members.size == 0:
        raise DimensionError("manifest set must not be empty")
    r = communicability_matrix(a, K)
    steps = [None] * K
    value = 0.0
    for k in range(K):
        j = members[int(np.argmax(r[members, k]))]
        steps[K - 1 - k] = (int(j),)
        value += r[j, k]
    return Schedule(tuple(steps)), float(value)


def manifest_argmax(a, K: int) -> tuple:
    """``r(k)`` for k = 1..K-1 (``r(0)`` is arbitrary since ``R_i(0) = 1``)."""
    r = communicability_matrix(a, K)
    return tuple(int(np.argmax(r[:, k])) for k in range(1, K))


def is_all_manifest(a, manifest, K: int) -> bool:
    members = set(int(i) for i in manifest)
    return all(i in members for i in manifest_argmax(a, K))


def _direction(template: str, q: int, rng) -> np.ndarray:
    """Unit spectral-norm block ``d[dst, src]`` on the manifest nodes."""
    if template == "dense":
        d = rng.random((q, q))
    elif template == "cycle":
        # short cycle on 1-3 manifest nodes; a 1-cycle is a self-loop
        length = int(rng.integers(1, min(q, 3) + 1))
        ring = rng.choice(q, size=length, replace=False)
        d = np.zeros((q, q))
        d[np.roll(ring, -1), ring] = rng.uniform(0.5, 1.0, size=length)
    else:
        order = rng.permutation(q)
        d = np.triu(rng.random((q, q)), 1)
        d = d[np.ix_(np.argsort(order), np.argsort(order))]
    norm = np.linalg.norm(d, 2)
    return d / norm if norm > 0 else d


def _bisect(feasible, hi: float, tol: float) -> float:
    """Smallest feasible scale in ``(0, hi]``, assuming ``feasible(hi)`` and not ``feasible(0)``.

    After the bisection ``s - tol`` is rechecked; if it is feasible the search
    restarts below it so the returned scale always carries that certificate.
    """
    lo = 0.0
    while True:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if feasible(mid):
                hi = mid
            else:
                lo = mid
        below = hi - tol
        if below <= 0.0 or not feasible(below):
            return hi
        lo, hi = 0.0, below


def _evaluate(a, manifest, K, delta):
    try:
        manip = normalize_spectral(a + delta)
        base = normalize_spectral(a)
    except DimensionError:
        return float("nan"), float("nan"), float("nan")
    _, tv_manip = tvcs_trace(manip, K)
    _, tv_con = constrained_tvcs_trace(base, manifest, K)
    ratio = tv_manip / tv_con if tv_con > 0 else float("nan")
    return tv_manip, tv_con, ratio


def find_min_manipulation(problem: ManifestProblem, seed: int = 0) -> ManipulationResult:
    """Randomized search for the smallest manifest-block perturbation making
    the unconstrained trace-optimal schedule all-manifest.

    Trial ``t`` draws its direction from ``default_rng([seed, t])`` so adding
    trials never changes earlier ones; the smallest successful scale wins,
    earlier trials on ties.  Without success the returned result holds the
    attempt at ``norm_cap`` whose argmax sequence had most manifest entries.
    """
    a, manifest, K = problem.a, problem.manifest, problem.K
    n = a.shape[0]
    norm_a = np.linalg.norm(a, 2)
    if norm_a <= 0:
        raise TVCSError("adjacency matrix is zero; relative manipulation size is undefined")
    members = np.array(manifest)
    block = np.ix_(members, members)
    tol = BISECTION_RTOL * norm_a
    s_max = problem.norm_cap * norm_a

    def feasible_at(direction, s):
        return is_all_manifest(a + s * direction, manifest, K)

    def result(delta, ok, scale=0.0, trial=-1, template=""):
        tv_manip, tv_con, ratio = _evaluate(a, manifest, K, delta)
        return ManipulationResult(
            delta=delta,
            relative_norm=float(np.linalg.norm(delta, 2) / norm_a),
            all_manifest=ok,
            tv_value_manipulated=tv_manip,
            tv_value_constrained=tv_con,
            advantage_ratio=ratio,
            has_negative_entries=bool(np.any(a + delta < 0)),
            scale=scale,
            trial=trial,
            template=template,
            argmax_seq=manifest_argmax(a + delta, K),
        )

    if is_all_manifest(a, manifest, K):
        return result(np.zeros_like(a), True)

    best = None  # (scale, trial, direction, template)
    fallback = None  # (-manifest hits, trial, direction, template)
    member_set = set(manifest)
    for t in range(problem.trials):
        rng = np.random.default_rng([seed, t])
        template = problem.templates[t % len(problem.templates)]
        d = np.zeros((n, n))
        d[block] = _direction(template, members.size, rng)
        if not d.any():
            continue
        if not feasible_at(d, s_max):
            hits = sum(i in member_set for i in manifest_argmax(a + s_max * d, K))
            if fallback is None or -hits < fallback[0]:
                fallback = (-hits, t, d, template)
            continue
        cap = s_max if best is None else min(s_max, best[0])
        if best is not None and not feasible_at(d, cap):
            continue  # cannot beat the incumbent at its own scale
        s = _bisect(lambda x: feasible_at(d, x), cap, tol)
        if best is None or s < best[0]:
            best = (s, t, d, template)
    if best is not None:
        s, t, d, template = best
        return result(s * d, True, s, t, template)
    if fallback is None:
        return result(np.zeros_like(a), False)
    _, t, d, template = fallback
    return result(s_max * d, False, s_max, t, template)


def manipulation_sweep(
    n: int,
    manifest_fractions,
    replicates: int,
    K: int = 10,
    seed: int = 0,
    trials: int = 20,
    norm_cap: float = 1.0,
    templates=("dense", "cycle"),
    keep_results: bool = False,
):
    """Mean/std of manipulation size and advantage over a random ensemble.

    Replicate ``r`` uses the same network for every fraction (random
    directed connectivity with edge probability uniform in [0, 1], uniform
    weights, transmission conversion, unit spectral radius).  Norm and ratio
    statistics are over successful replicates.  With ``keep_results`` the
    ``(problem, result)`` pairs are returned per fraction as well.
    """
    rows = []
    raw_results = []
    networks = []
    for r in range(replicates):
        rng = np.random.default_rng([seed, r])
        raw = random_connectivity(n, float(rng.random()), rng)
        networks.append(normalize_spectral(transmission(raw)))
    for fi, frac in enumerate(manifest_fractions):
        if not 0.0 < frac <= 1.0:
            raise ValueError(f"manifest fraction must lie in (0, 1], got {frac}")
        size = max(1, int(round(frac * n)))
        norms, ratios, successes = [], [], 0
        cell = []
        for r, a in enumerate(networks):
            rng = np.random.default_rng([seed, r, fi, 1])
            manifest = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
            problem = ManifestProblem(a, manifest, K, trials, norm_cap, tuple(templates))
            res = find_min_manipulation(problem, seed=int(rng.integers(2**32)))
            cell.append((problem, res))
            if res.all_manifest:
                successes += 1
                norms.append(res.relative_norm)
                ratios.append(res.advantage_ratio)
        raw_results.append(cell)
        rows.append(
            {
                "fraction": float(frac),
                "mean_norm": float(np.mean(norms)) if norms else float("nan"),
                "std_norm": float(np.std(norms)) if norms else float("nan"),
                "mean_ratio": float(np.mean(ratios)) if ratios else float("nan"),
                "std_ratio": float(np.std(ratios)) if ratios else float("nan"),
                "success_rate": successes / replicates if replicates else float("nan"),
            }
        )
    if keep_results:
        return rows, raw_results
    return rows
