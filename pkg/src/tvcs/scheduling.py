"""Optimal time-invariant and time-varying control schedules.

Under the trace measure both problems decouple over time steps and are solved
exactly from the communicability matrix.  Other measures are solved by
enumeration when it fits the evaluation budget and greedily otherwise.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .communicability import communicability_matrix, top_m
from .errors import BudgetError, DegenerateBaselineError, DimensionError
from .gramian import (
    SINGULAR_RTOL,
    MatrixPowers,
    Metric,
    Schedule,
    as_network,
    gramian,
    metric,
    metric_from_eigenvalues,
)

CHI_EPSILON = 1e-9
EXHAUSTIVE_BUDGET = 2_000_000
GREEDY_REG = 1e-12
_BATCH = 4096


class Solver(str, enum.Enum):
    CLOSED_FORM_TRACE = "closed_form_trace"
    EXHAUSTIVE = "exhaustive"
    GREEDY = "greedy"


@dataclass(frozen=True)
class ChiReport:
    metric: Metric
    f_ti: float
    f_tv: float
    chi: float
    schedule_ti: Schedule
    schedule_tv: Schedule
    class_label: str
    solver: Solver
    solver_ti: Solver
    chi_is_lower_bound: bool = False
    horizon: int = 0
    inputs_per_step: int = 1
    notes: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric.value,
            "horizon": self.horizon,
            "inputs_per_step": self.inputs_per_step,
            "f_ti": self.f_ti,
            "f_tv": self.f_tv,
            "chi": self.chi,
            "class_label": self.class_label,
            "solver_tv": self.solver.value,
            "solver_ti": self.solver_ti.value,
            "chi_is_lower_bound": self.chi_is_lower_bound,
            "schedule_ti": self.schedule_ti.to_list(),
            "schedule_tv": self.schedule_tv.to_list(),
            "notes": list(self.notes),
        }


def _check_dims(n, K, m):
    if K < 1:
        raise DimensionError("horizon K must be at least 1")
    if not 1 <= m <= n:
        raise DimensionError(f"inputs per step m must be in [1, {n}], got {m}")


def _r_values(a, K, r_values):
    return communicability_matrix(a, K) if r_values is None else r_values


def tvcs_trace(a, K: int, m: int = 1, r_values=None):
    """Trace-optimal time-varying schedule.

    Step ``K-1-k`` actuates the ``m`` nodes with the largest ``R_i(k)``; the
    value is the sum over k of those ``m`` largest entries.
    """
    a = as_network(a)
    _check_dims(a.shape[0], K, m)
    r = _r_values(a, K, r_values)
    steps = [None] * K
    for k in range(K):
        steps[K - 1 - k] = top_m(r[:, k], m)
    value = float(np.sort(r, axis=0)[::-1][:m].sum())
    return Schedule(tuple(steps)), value


def tics_trace(a, K: int, m: int = 1, r_values=None):
    """Trace-optimal constant schedule: the ``m`` largest diagonal entries of ``sum_k (A^k)^T A^k``."""
    a = as_network(a)
    _check_dims(a.shape[0], K, m)
    r = _r_values(a, K, r_values)
    totals = r.sum(axis=1)
    nodes = top_m(totals, m)
    return Schedule.constant(nodes, K), float(totals[list(nodes)].sum())


def _trace_pair(r, m):
    """TI/TV trace optima and their exact nonnegative difference."""
    K = r.shape[1]
    totals = r.sum(axis=1)
    ti_nodes = top_m(totals, m)
    tv_steps = [None] * K
    for k in range(K):
        tv_steps[K - 1 - k] = top_m(r[:, k], m)
    best = np.sort(r, axis=0)[::-1][:m]  # (m, K)
    f_tv = float(best.sum())
    ti_rows = r[list(ti_nodes)]
    f_ti = float(ti_rows.sum())
    # per-step differences are exactly >= 0, so their sum is 0 iff TI is TV-optimal
    diff = float((best.sum(axis=0) - ti_rows.sum(axis=0)).clip(min=0.0).sum())
    return Schedule.constant(ti_nodes, K), f_ti, Schedule(tuple(tv_steps)), f_tv, diff


def _score_eigenvalues(lam: np.ndarray, kind: Metric) -> np.ndarray:
    """Vectorized metric over a batch of ascending eigenvalue rows."""
    lam_max = lam[:, -1]
    if kind is Metric.TRACE:
        return np.clip(lam.sum(axis=1), 0.0, None)
    if kind is Metric.MIN_EIGENVALUE:
        return np.clip(lam[:, 0], 0.0, None)
    if kind is Metric.DETERMINANT:
        return np.prod(np.clip(lam, 0.0, None), axis=1)
    singular = (lam_max <= 0.0) | (lam[:, 0] <= SINGULAR_RTOL * lam_max)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = 1.0 / np.sum(1.0 / np.where(singular[:, None], 1.0, lam), axis=1)
    return np.where(singular, 0.0, val)


def exhaustive_schedule(
    a,
    K: int,
    kind=Metric.TRACE,
    constant_only: bool = False,
    budget: int = EXHAUSTIVE_BUDGET,
):
    """Global maximizer of a measure over all single-input schedules.

    Schedules are enumerated in lexicographic order of ``(i_0, ..., i_{K-1})``
    and the first one reaching the maximum is returned.
    """
    kind = Metric.parse(kind)
    pw = MatrixPowers(a)
    n = pw.n
    _check_dims(n, K, 1)
    count = n if constant_only else n**K
    if count > budget:
        raise BudgetError(
            f"exhaustive search needs {count} Gramian evaluations (budget {budget}); "
            "use the greedy solver instead"
        )
    # outer[k, j] = (A^k e_j)(A^k e_j)^T
    cols = np.stack([pw[k] for k in range(K)])  # (K, n, n), cols[k][:, j]
    outer = np.einsum("kaj,kbj->kjab", cols, cols)
    if constant_only:
        w = outer.sum(axis=0)
        scores = _batch_scores(w, kind)
        best = int(np.argmax(scores))
        return Schedule.constant(best, K), float(scores[best])
    best_val, best_idx = -np.inf, 0
    powers_of_n = n ** np.arange(K - 1, -1, -1)
    for start in range(0, count, _BATCH):
        idx = np.arange(start, min(start + _BATCH, count))
        digits = (idx[:, None] // powers_of_n) % n  # digits[:, t] = node at step t
        w = np.zeros((idx.size, n, n))
        for t in range(K):
            w += outer[K - 1 - t, digits[:, t]]
        scores = _batch_scores(w, kind)
        j = int(np.argmax(scores))
        if scores[j] > best_val:
            best_val, best_idx = float(scores[j]), int(idx[j])
    digits = [(best_idx // int(p)) % n for p in powers_of_n]
    return Schedule.single(digits), best_val


def _batch_scores(w: np.ndarray, kind: Metric) -> np.ndarray:
    if kind is Metric.TRACE:
        return np.clip(np.trace(w, axis1=-2, axis2=-1), 0.0, None)
    return _score_eigenvalues(np.linalg.eigvalsh(w), kind)


def _greedy_key(w: np.ndarray, kind: Metric):
    """Comparable score of a partial Gramian inside the greedy pass."""
    if kind is Metric.TRACE:
        return float(np.trace(w))
    lam = np.linalg.eigvalsh(w)
    if kind is Metric.MIN_EIGENVALUE:
        # leximin: rank deficient partial Gramians are compared by their
        # smallest nonzero directions instead of a flat zero
        cut = SINGULAR_RTOL * max(lam[-1], 0.0)
        return tuple(np.where(lam <= cut, 0.0, lam))
    n = w.shape[0]
    eps = GREEDY_REG * max(float(np.trace(w)), 0.0) / n
    reg = np.clip(lam, 0.0, None) + eps
    if eps <= 0.0:
        return -math.inf
    if kind is Metric.DETERMINANT:
        return float(np.sum(np.log(reg)))
    return float(1.0 / np.sum(1.0 / reg))


def greedy_schedule(a, K: int, kind=Metric.TRACE, m: int = 1):
    """Forward greedy pass over time steps.

    At step ``t`` the nodes are added one at a time, each maximizing the
    measure of the partial Gramian accumulated so far (regularized by
    ``1e-12 * tr(W) / n`` for the inverse and determinant measures).  Ties go
    to the lowest node index.  The returned value is the unregularized measure
    of the full Gramian.
    """
    kind = Metric.parse(kind)
    pw = MatrixPowers(a)
    n = pw.n
    _check_dims(n, K, m)
    w = np.zeros((n, n))
    steps = []
    for t in range(K):
        p = pw[K - 1 - t]
        if kind is Metric.TRACE:
            # additive objective: the marginal gain of node j is ||A^k e_j||^2
            step = top_m(np.einsum("ij,ij->j", p, p), m)
            steps.append(step)
            continue
        chosen = []
        for _ in range(m):
            best_key, best_j = None, None
            for j in range(n):
                if j in chosen:
                    continue
                c = p[:, j]
                key = _greedy_key(w + np.outer(c, c), kind)
                if best_key is None or key > best_key:
                    best_key, best_j = key, j
            chosen.append(best_j)
            c = p[:, best_j]
            w = w + np.outer(c, c)
        steps.append(tuple(sorted(chosen)))
    schedule = Schedule(tuple(steps))
    return schedule, metric(gramian(pw, schedule), kind)


def _ti_general(a, K, kind, m, budget):
    n = a.shape[0]
    if m == 1:
        sched, val = exhaustive_schedule(a, K, kind, constant_only=True, budget=max(budget, n))
        return sched, val, Solver.EXHAUSTIVE
    if math.comb(n, m) <= budget:
        pw = MatrixPowers(a)
        best_val, best = -np.inf, None
        for nodes in itertools.combinations(range(n), m):
            val = metric(gramian(pw, Schedule.constant(nodes, K)), kind)
            if val > best_val:
                best_val, best = val, nodes
        return Schedule.constant(best, K), float(best_val), Solver.EXHAUSTIVE
    # greedy over constant node sets
    pw = MatrixPowers(a)
    chosen = []
    for _ in range(m):
        best_val, best_j = -np.inf, None
        for j in range(n):
            if j in chosen:
                continue
            val = metric(gramian(pw, Schedule.constant(tuple(sorted(chosen + [j])), K)), kind)
            if val > best_val:
                best_val, best_j = val, j
        chosen.append(best_j)
    sched = Schedule.constant(tuple(sorted(chosen)), K)
    return sched, metric(gramian(pw, sched), kind), Solver.GREEDY


def chi_report(
    a,
    K: int,
    kind=Metric.TRACE,
    m: int = 1,
    budget: int = EXHAUSTIVE_BUDGET,
    chi_epsilon: float = CHI_EPSILON,
    r_values=None,
) -> ChiReport:
    """Relative advantage ``(f_tv - f_ti) / f_ti`` of time-varying scheduling.

    Raises
    ------
    DegenerateBaselineError
        If the best time-invariant value is zero.
    """
    kind = Metric.parse(kind)
    a = as_network(a)
    n = a.shape[0]
    _check_dims(n, K, m)
    notes = []
    lower_bound = False
    if kind is Metric.TRACE:
        r = _r_values(a, K, r_values)
        s_ti, f_ti, s_tv, f_tv, diff = _trace_pair(r, m)
        solver = solver_ti = Solver.CLOSED_FORM_TRACE
    else:
        if n > K * m:
            # rank W <= K m < n, so every non-trace measure is 0 for any schedule
            raise DegenerateBaselineError(
                f"{kind.value} is zero for every schedule when n={n} exceeds K*m={K * m}; "
                "chi is undefined"
            )
        s_ti, f_ti, solver_ti = _ti_general(a, K, kind, m, budget)
        if m == 1 and n**K <= budget:
            s_tv, f_tv = exhaustive_schedule(a, K, kind, budget=budget)
            solver = Solver.EXHAUSTIVE
        else:
            s_tv, f_tv = greedy_schedule(a, K, kind, m)
            solver = Solver.GREEDY
            lower_bound = True
            notes.append("time-varying optimum from greedy search; chi is a lower bound")
            if f_tv < f_ti:
                s_tv, f_tv = s_ti, f_ti
                notes.append("greedy value below the constant baseline; baseline schedule kept")
        if solver_ti is Solver.GREEDY:
            lower_bound = False
            notes.append("time-invariant optimum from greedy search; chi is approximate")
        diff = max(f_tv - f_ti, 0.0)
    if not f_ti > 0.0:
        raise DegenerateBaselineError(
            f"time-invariant optimum of {kind.value} is {f_ti:g}; chi is undefined"
        )
    chi = diff / f_ti
    return ChiReport(
        metric=kind,
        f_ti=f_ti,
        f_tv=f_tv,
        chi=chi,
        schedule_ti=s_ti,
        schedule_tv=s_tv,
        class_label="V" if chi > chi_epsilon else "I",
        solver=solver,
        solver_ti=solver_ti,
        chi_is_lower_bound=lower_bound,
        horizon=K,
        inputs_per_step=m,
        notes=tuple(notes),
    )


def chi_vs_horizon(a, K_max: int, kind=Metric.TRACE, m: int = 1, budget: int = EXHAUSTIVE_BUDGET):
    """``chi`` for every horizon ``2..K_max`` and the horizon maximizing it.

    Returns a list of ``(K, chi)`` pairs and the maximizing ``K`` (smallest on
    ties).  Horizons where chi is undefined (zero baseline) give NaN and are
    skipped for the maximum, which is None if no horizon is defined.
    """
    if K_max < 2:
        raise DimensionError("K_max must be at least 2")
    kind = Metric.parse(kind)
    a = as_network(a)
    rows = []
    if kind is Metric.TRACE:
        r = communicability_matrix(a, K_max)
        for K in range(2, K_max + 1):
            _, f_ti, _, _, diff = _trace_pair(r[:, :K], m)
            rows.append((K, diff / f_ti))
    else:
        for K in range(2, K_max + 1):
            try:
                rows.append((K, chi_report(a, K, kind, m, budget=budget).chi))
            except DegenerateBaselineError:
                rows.append((K, math.nan))
    defined = [kc for kc in rows if not math.isnan(kc[1])]
    best_K = max(defined, key=lambda kc: (kc[1], -kc[0]))[0] if defined else None
    return rows, best_K
