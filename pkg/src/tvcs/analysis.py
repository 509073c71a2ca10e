"""Single-network analysis runs serialized as JSON reports.

A report embeds the full configuration, formula tags, tie-break policy and
numerical thresholds that produced it, so two runs of the same config give
byte-identical output.
"""

from __future__ import annotations

import contextlib
import warnings
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import __version__
from .communicability import (
    FALLBACK_POWER,
    TIE_RTOL,
    PerronFallbackWarning,
    dominance,
    profile,
    scale_heterogeneity_test,
)
from .errors import TVCSError
from .formats import dumps, load_edge_list
from .gramian import CONDITION_CAP, SINGULAR_RTOL, SYMMETRY_RTOL, Metric, reachability_ellipsoid, gramian
from .manipulation import BISECTION_RTOL, ManifestProblem, find_min_manipulation
from .netgen import GeneratorConfig, RawConnectivity, convert, generate
from .scheduling import CHI_EPSILON, EXHAUSTIVE_BUDGET, GREEDY_REG, chi_report

ANALYSES = ("chi", "communicability", "schedule", "manipulation")
TIE_BREAK = "lowest node index among exact maxima"


@dataclass(frozen=True)
class AnalysisRun:
    """Everything needed to reproduce one report.

    ``source`` is either ``{"edge_list": path, "directed": bool, "one_based": bool}``
    or ``{"generator": GeneratorConfig.to_dict()}``.
    """

    source: dict
    method: str = "transmission"
    K: int = 10
    metrics: tuple = ("trace",)
    m: int = 1
    seed: int = 0
    tau: float = 1.0
    leak: float = 1.0
    budget: int = EXHAUSTIVE_BUDGET
    analyses: tuple = ("chi", "communicability")
    manifest: tuple = ()
    trials: int = 20
    norm_cap: float = 1.0
    full_profile: bool = True

    def __post_init__(self):
        object.__setattr__(self, "metrics", tuple(Metric.parse(k).value for k in self.metrics))
        unknown = set(self.analyses) - set(ANALYSES)
        if unknown:
            raise ValueError(f"unknown analyses {sorted(unknown)}; choose from {ANALYSES}")
        if "manipulation" in self.analyses and not self.manifest:
            raise ValueError("the manipulation analysis needs a manifest node set")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["metrics"] = list(self.metrics)
        d["analyses"] = list(self.analyses)
        d["manifest"] = list(self.manifest)
        return d


@contextlib.contextmanager
def _module(name: str):
    """Prefix errors escaping a stage with the module that raised them."""
    try:
        yield
    except TVCSError as exc:
        if exc.args and not str(exc.args[0]).startswith(f"{name}: "):
            exc.args = (f"{name}: {exc.args[0]}",) + exc.args[1:]
        raise


def load_source(source: dict) -> RawConnectivity:
    if "edge_list" in source:
        with _module("cli_io"):
            return load_edge_list(
                source["edge_list"],
                directed=source.get("directed"),
                one_based=source.get("one_based", False),
            )
    if "generator" in source:
        with _module("netgen_convert"):
            return generate(GeneratorConfig(**source["generator"]))
    raise ValueError("source needs an 'edge_list' path or a 'generator' config")


def provenance(run: AnalysisRun, formula: str) -> dict:
    return {
        "tool": "tvcs",
        "version": __version__,
        "conversion_formula": formula,
        "tie_break": TIE_BREAK,
        "indexing": "0-based node ids; edge j -> i is a[i, j]",
        "thresholds": {
            "chi_epsilon": CHI_EPSILON,
            "singular_rtol": SINGULAR_RTOL,
            "symmetry_rtol": SYMMETRY_RTOL,
            "condition_cap": CONDITION_CAP,
            "tie_rtol": TIE_RTOL,
            "greedy_regularization": GREEDY_REG,
            "perron_fallback_power": FALLBACK_POWER,
            "bisection_rtol": BISECTION_RTOL,
        },
    }


def _communicability_section(a, run: AnalysisRun) -> dict:
    K = run.K
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerronFallbackWarning)
        prof = profile(a, K)
        out = {
            "argmax_seq": list(prof.argmax_seq),
            "spectral_radius": prof.spectral_radius,
            "r_inf_exact": prof.r_inf_exact,
            "r_inf_argmax": int(np.argmax(prof.r_inf)),
        }
        if a.shape[0] >= 2 and K >= 2:
            rep = dominance(a, K, r_values=prof.r_values)
            rep_inf = dominance(a, K, "inf", r_values=prof.r_values, r_inf=prof.r_inf)
            out["dominance"] = {
                "leader": rep.leader,
                "runner_up_local": rep.runner_up_local,
                "runner_up_global": rep.runner_up_global,
                "value": rep.dominance,
                "value_limit_scale": rep_inf.dominance,
                "leader_is_global_max": rep.leader_is_global_max,
            }
            out["scale_heterogeneous"] = bool(scale_heterogeneity_test(a, K, r_values=prof.r_values))
    if run.full_profile:
        out["r_values"] = prof.r_values.tolist()
        out["r_inf"] = prof.r_inf.tolist()
    return out, prof.r_values


def _schedule_section(a, run: AnalysisRun, chi_reports: dict) -> dict:
    out = {}
    for kind, rep in chi_reports.items():
        if isinstance(rep, dict):  # error entry
            out[kind] = rep
            continue
        _, lengths = reachability_ellipsoid(gramian(a, rep.schedule_tv))
        out[kind] = {
            "schedule_tv": rep.schedule_tv.to_list(),
            "schedule_ti": rep.schedule_ti.to_list(),
            "f_tv": rep.f_tv,
            "f_ti": rep.f_ti,
            "ellipsoid_axes_tv": lengths.tolist(),
        }
    return out


def analyze(run: AnalysisRun) -> dict:
    """Execute a run and return the report as a plain dict."""
    raw = load_source(run.source)
    with _module("netgen_convert"):
        a, formula = convert(raw, run.method, run.tau, run.leak)
    report = {
        "config": run.to_dict(),
        "provenance": provenance(run, formula),
        "network": {
            "n": int(a.shape[0]),
            "links": int(np.count_nonzero(raw.c)),
            "directed": bool(raw.directed),
        },
    }
    r_values = None
    if "communicability" in run.analyses:
        with _module("communicability"):
            report["communicability"], r_values = _communicability_section(a, run)
    chi_reports = {}
    if "chi" in run.analyses or "schedule" in run.analyses:
        for kind in run.metrics:
            with _module("scheduling"):
                try:
                    chi_reports[kind] = chi_report(a, run.K, kind, run.m, run.budget, r_values=r_values)
                except TVCSError as exc:
                    if len(run.metrics) == 1:
                        raise
                    # with several metrics one degenerate measure should not sink the report
                    chi_reports[kind] = {"error": type(exc).__name__, "message": f"scheduling: {exc}"}
    if "chi" in run.analyses:
        report["chi"] = {k: (v if isinstance(v, dict) else v.to_dict()) for k, v in chi_reports.items()}
    if "schedule" in run.analyses:
        with _module("gramian_core"):
            report["schedule"] = _schedule_section(a, run, chi_reports)
    if "manipulation" in run.analyses:
        with _module("manipulation"):
            problem = ManifestProblem(a, run.manifest, run.K, run.trials, run.norm_cap)
            report["manipulation"] = find_min_manipulation(problem, seed=run.seed).to_dict()
    return report


def run_analysis(run: AnalysisRun, path: Optional[str] = None) -> str:
    """JSON report of ``run``; written to ``path`` when given."""
    text = dumps(analyze(run))
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
