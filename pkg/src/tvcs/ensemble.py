"""Seeded ensemble sweeps of chi over random network families.

Every replicate draws its seed from ``SeedSequence([base_seed, cell, replicate])``
and results are aggregated in replicate order, so tables do not depend on
the number of worker processes.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .communicability import PerronFallbackWarning, argmax_low, communicability_matrix, dominance, scale_heterogeneity_test
from .errors import ControllabilityError
from .gramian import Metric
from .netgen import Family, GeneratorConfig, WeightMode, convert, generate, random_connectivity
from .scheduling import CHI_EPSILON, chi_report

RANDOM_FAMILY = "random"
SWEEP_COLUMNS = [
    "family",
    "n",
    "param",
    "replicates",
    "mean_chi",
    "std_chi",
    "frac_class_v",
    "frac_same_leader",
    "frac_class_v_same_leader",
    "mean_chi_same_leader",
    "mean_dominance_same_leader",
]


@dataclass(frozen=True)
class Job:
    family: str
    n: int
    param: float
    K: int
    metric: str
    m: int
    method: str
    tau: float
    leak: float
    k_ring: int
    n_range: tuple
    seed: int


@dataclass(frozen=True)
class Record:
    family: str
    n: int
    param: float
    chi: float
    class_v: bool
    same_leader: bool
    heterogeneous: bool
    dominance: float
    dominance_inf: float = math.nan


def replicate_seed(base_seed: int, cell: int, replicate: int) -> int:
    return int(np.random.SeedSequence([base_seed, cell, replicate]).generate_state(1, dtype=np.uint64)[0])


def _network(job: Job):
    if job.family == RANDOM_FAMILY:
        # log-uniform size, uniform density, uniform weights, directed
        rng = np.random.default_rng(job.seed)
        lo, hi = job.n_range
        n = int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))
        p = float(rng.random())
        return random_connectivity(n, p, rng), n, p
    family = Family(job.family)
    kwargs = {"p": job.param} if family is Family.ER else {}
    if family is Family.BA:
        kwargs = {"m_a": int(job.param)}
    if family is Family.WS:
        kwargs = {"k_ring": job.k_ring, "beta": job.param}
    cfg = GeneratorConfig(family, job.n, weight_mode=WeightMode.UNIFORM, seed=job.seed, **kwargs)
    return generate(cfg), job.n, job.param


def run_job(job: Job) -> Record:
    raw, n, param = _network(job)
    a, _ = convert(raw, job.method, job.tau, job.leak)
    K = job.K
    r = communicability_matrix(a, K)
    try:
        rep = chi_report(a, K, job.metric, job.m, r_values=r)
        chi = rep.chi
    except ControllabilityError:
        chi = math.nan
    same = argmax_low(r[:, 1]) == argmax_low(r[:, K - 1])
    dom = dom_inf = math.nan
    if same and n >= 2:
        dom = dominance(a, K, r_values=r).dominance
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PerronFallbackWarning)
            dom_inf = dominance(a, K, "inf", r_values=r).dominance
    return Record(
        family=job.family,
        n=n,
        param=param,
        chi=chi,
        class_v=bool(chi > CHI_EPSILON),
        same_leader=bool(same),
        heterogeneous=bool(scale_heterogeneity_test(a, K, r_values=r)),
        dominance=dom,
        dominance_inf=dom_inf,
    )


def run_jobs(jobs, workers: int = 1):
    if workers <= 1 or len(jobs) < 2:
        return [run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_job, jobs, chunksize=max(1, len(jobs) // (8 * workers))))


def _jobs(family, ns, params, replicates, K, metric, m, method, tau, leak, k_ring, n_range, seed):
    cells = [(n, p) for n in ns for p in params]
    jobs = []
    for ci, (n, p) in enumerate(cells):
        for r in range(replicates):
            jobs.append(Job(family, n, p, K, metric, m, method, tau, leak, k_ring, n_range, replicate_seed(seed, ci, r)))
    return cells, jobs


def _mean(values):
    values = [v for v in values if not math.isnan(v)]
    return float(np.mean(values)) if values else math.nan


def _std(values):
    values = [v for v in values if not math.isnan(v)]
    return float(np.std(values)) if values else math.nan


def summarize(records) -> dict:
    same = [r for r in records if r.same_leader]
    count = len(records)
    return {
        "replicates": count,
        "mean_chi": _mean([r.chi for r in records]),
        "std_chi": _std([r.chi for r in records]),
        "frac_class_v": sum(r.class_v for r in records) / count if count else math.nan,
        "frac_same_leader": len(same) / count if count else math.nan,
        "frac_class_v_same_leader": sum(r.class_v for r in same) / len(same) if same else math.nan,
        "mean_chi_same_leader": _mean([r.chi for r in same]),
        "mean_dominance_same_leader": _mean([r.dominance for r in same]),
    }


def sweep(
    family: str,
    ns=(),
    params=(0.0,),
    replicates: int = 100,
    K: int = 10,
    metric=Metric.TRACE,
    m: int = 1,
    method: str = "transmission",
    seed: int = 0,
    workers: int = 1,
    tau: float = 1.0,
    leak: float = 1.0,
    k_ring: int = 4,
    n_range=(10, 100),
    return_records: bool = False,
):
    """Grid of ``n`` x family parameter, ``replicates`` networks per cell.

    ``family`` is one of ``er`` (param = p), ``ba`` (param = m_a), ``ws``
    (param = beta, ``k_ring`` neighbours) or ``random``: directed random
    connectivity with log-uniform size in ``n_range`` and uniform density, in
    which case ``ns`` and ``params`` are ignored.
    """
    family = str(getattr(family, "value", family)).lower()
    metric = Metric.parse(metric).value
    if family == RANDOM_FAMILY:
        ns, params = (0,), (math.nan,)
    cells, jobs = _jobs(family, ns, params, replicates, K, metric, m, method, tau, leak, k_ring, tuple(n_range), seed)
    records = run_jobs(jobs, workers)
    rows = []
    for ci, (n, p) in enumerate(cells if replicates else ()):
        cell = records[ci * replicates : (ci + 1) * replicates]
        row = {"family": family, "n": n, "param": p}
        row.update(summarize(cell))
        rows.append(row)
    if return_records:
        return rows, records
    return rows


def random_ensemble(count: int, K: int = 10, n_range=(10, 100), seed: int = 0, workers: int = 1, method="transmission"):
    """Per-network records of the directed random-connectivity ensemble."""
    _, records = sweep(
        RANDOM_FAMILY, replicates=count, K=K, n_range=n_range, seed=seed, workers=workers,
        method=method, return_records=True,
    )
    return records
