"""Epsilon sweeps over blow-up runs and scaling-law fits.

A sweep integrates one model per data size epsilon (comparison ODE or full
PDE), collects the measured blow-up times, fits the regime's scaling law by
least squares on the transformed axes, and compares the fitted exponent to
the matching theorem's prediction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .odelab import BlowupEstimate, OdeControls, SolverFailure, comparison_problem, \
    integrate_comparison
from .params import ModelParams
from .pdelab import PdeControls, run_until_blowup
from .regimes import (
    BoundFamily,
    Growth,
    RegimeReport,
    classify,
    lifespan_bound,
    theta_log,
)

ENGINE_ODE = "comparisonODE"
ENGINE_PDE = "pde"


class InsufficientRecordsError(ValueError):
    """Not enough blow-up records to fit a law."""


class SweepAbortedError(RuntimeError):
    """A run failed; the records completed so far are preserved."""

    def __init__(self, message: str, partial: list):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class SweepPlan:
    params: ModelParams
    epsilons: tuple[float, ...]
    engine: str = ENGINE_ODE
    ode_controls: OdeControls = OdeControls()
    pde_controls: PdeControls = PdeControls()
    frame_C: Optional[float] = None       # None: light-cylinder volume constant
    horizon: float = 1e9
    workers: int = 1
    exploratory: bool = False
    drop_largest: int = 2
    tolerance: float = 0.15
    r2_min: float = 0.98

    def __post_init__(self):
        if len(self.epsilons) < 4:
            raise ValueError("a sweep needs at least 4 epsilon values")
        if self.engine not in (ENGINE_ODE, ENGINE_PDE):
            raise ValueError(f"engine must be {ENGINE_ODE} or {ENGINE_PDE}")
        ordered = tuple(sorted(set(self.epsilons), reverse=True))
        if ordered != tuple(self.epsilons):
            object.__setattr__(self, "epsilons", ordered)
        if not self.exploratory:
            report = classify(self.params)
            if report.growth is Growth.BELOW_THRESHOLD:
                raise ValueError(
                    "the classified regime admits no blow-up; set exploratory "
                    "to sweep it anyway")


@dataclass(frozen=True)
class SweepRecord:
    epsilon: float
    blew_up: bool
    t_hat: Optional[float]
    t_low: float
    steps: int
    reason: str
    fit_exponent: Optional[float]

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon, "blew_up": self.blew_up,
            "t_hat": self.t_hat, "t_low": self.t_low, "steps": self.steps,
            "reason": self.reason, "fit_exponent": self.fit_exponent,
        }


@dataclass(frozen=True)
class FitResult:
    law: str                       # powerLaw | expLaw | thetaLaw
    fitted_exponent: float         # slope on the transformed axes (K for expLaw)
    r_squared: float
    n_used: int
    n_dropped: int
    theory_exponent: Optional[float] = None
    tolerance: Optional[float] = None
    verdict: Optional[bool] = None
    residual_spread: float = 0.0

    @property
    def fitted_K(self) -> float:
        return self.fitted_exponent

    def to_dict(self) -> dict:
        return {
            "law": self.law, "fitted_exponent": self.fitted_exponent,
            "r_squared": self.r_squared, "n_used": self.n_used,
            "n_dropped": self.n_dropped, "theory_exponent": self.theory_exponent,
            "tolerance": self.tolerance, "verdict": self.verdict,
            "residual_spread": self.residual_spread,
        }


def _estimate_to_record(epsilon: float, est: BlowupEstimate) -> SweepRecord:
    return SweepRecord(
        epsilon=epsilon, blew_up=est.blew_up,
        t_hat=est.T_hat if est.blew_up else None,
        t_low=est.T_low, steps=est.steps, reason=est.reason,
        fit_exponent=est.fit_exponent,
    )


def _run_one(plan: SweepPlan, epsilon: float) -> SweepRecord:
    params = plan.params.with_epsilon(epsilon)
    if plan.engine == ENGINE_ODE:
        problem = comparison_problem(params, frame_C=plan.frame_C, t_max=plan.horizon)
        est = integrate_comparison(problem, plan.ode_controls)
    else:
        est = run_until_blowup(params, plan.pde_controls).blowup
    return _estimate_to_record(epsilon, est)


def run_sweep(plan: SweepPlan) -> list[SweepRecord]:
    """One run per epsilon; results sorted by epsilon descending.

    Runs execute on a bounded worker pool; a solver failure aborts the sweep
    and the exception carries the records that did complete.
    """
    results: dict[float, SweepRecord] = {}
    failure: Optional[Exception] = None
    if plan.workers <= 1:
        for eps in plan.epsilons:
            try:
                results[eps] = _run_one(plan, eps)
            except SolverFailure as exc:
                failure = exc
                break
    else:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            futures = {eps: pool.submit(_run_one, plan, eps) for eps in plan.epsilons}
            for eps, fut in futures.items():
                try:
                    results[eps] = fut.result()
                except SolverFailure as exc:
                    failure = exc
    records = [results[eps] for eps in plan.epsilons if eps in results]
    if failure is not None:
        raise SweepAbortedError(str(failure), records)
    return records


def _least_squares(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    """Slope, intercept, r^2, and the residual spread relative to the y range."""
    slope, intercept = np.polyfit(x, y, 1)
    fit = slope * x + intercept
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 and ss_res == 0.0 else 1.0 - ss_res / ss_tot
    y_range = float(np.max(y) - np.min(y))
    spread = float(np.max(np.abs(y - fit))) / y_range if y_range > 0 else 0.0
    return float(slope), float(intercept), r2, spread


def fit_lifespan(records: list[SweepRecord], law: str, q: Optional[float] = None,
                 aux_exponent: float = 0.0, drop_largest: int = 2) -> FitResult:
    """Least-squares fit of the measured lifespans on the law's axes.

    powerLaw regresses ln T on ln eps; expLaw regresses ln T on eps^-(q-1)
    (q required); thetaLaw regresses ln theta(T) = T + aux * ln T on ln eps.
    The largest ``drop_largest`` epsilon values are discarded as
    pre-asymptotic.
    """
    blow = [r for r in records if r.blew_up and r.t_hat is not None and r.t_hat > 0]
    if len(blow) < 4:
        raise InsufficientRecordsError(
            f"need at least 4 blow-up records, got {len(blow)}")
    blow.sort(key=lambda r: -r.epsilon)
    kept = blow[drop_largest:] if drop_largest > 0 else blow
    if len(kept) < 3:
        raise InsufficientRecordsError(
            f"only {len(kept)} records left after dropping {drop_largest}")
    eps = np.array([r.epsilon for r in kept])
    t_hat = np.array([r.t_hat for r in kept])

    if law == "powerLaw":
        x, y = np.log(eps), np.log(t_hat)
    elif law == "expLaw":
        if q is None:
            raise ValueError("expLaw needs the nonlinear power q")
        x, y = eps ** (-(q - 1.0)), np.log(t_hat)
    elif law == "thetaLaw":
        x = np.log(eps)
        y = np.array([theta_log(t, aux_exponent) for t in t_hat])
    else:
        raise ValueError(f"unknown law {law!r}")
    slope, _, r2, spread = _least_squares(x, y)
    return FitResult(law=law, fitted_exponent=slope, r_squared=r2,
                     n_used=len(kept), n_dropped=len(blow) - len(kept),
                     residual_spread=spread)


_LAW_FOR_GROWTH = {
    Growth.EXPONENTIAL: "thetaLaw",
    Growth.POLYNOMIAL: "powerLaw",
    Growth.LOGARITHMIC: "expLaw",
}


def law_for_regime(report: RegimeReport) -> str:
    if report.growth is Growth.BELOW_THRESHOLD:
        raise ValueError("no scaling law below the blow-up thresholds")
    return _LAW_FOR_GROWTH[report.growth]


def compare_to_theory(fit: FitResult, report: RegimeReport, params: ModelParams,
                      tolerance: Optional[float] = None,
                      r2_min: float = 0.98) -> FitResult:
    """Attach the theorem's exponent and a pass/fail verdict to a fit.

    Power- and theta-law verdicts require the fitted slope within the
    relative tolerance of the theory exponent and r^2 above the bar. The
    exp law has no free exponent to match (the abscissa already carries
    eps^-(q-1)): its verdict checks linearity, a positive fitted K, and a
    bounded residual spread.
    """
    expected_law = law_for_regime(report)
    if fit.law != expected_law:
        raise ValueError(
            f"law {fit.law} does not pair with growth {report.growth.value} "
            f"(expected {expected_law})")
    bound = lifespan_bound(report, params)
    if fit.law == "expLaw":
        tol = 0.25 if tolerance is None else tolerance
        theory = bound.exponent_of_epsilon     # the power of eps inside exp
        verdict = (fit.r_squared >= r2_min and fit.fitted_exponent > 0.0
                   and fit.residual_spread <= tol)
    else:
        tol = 0.15 if tolerance is None else tolerance
        theory = bound.exponent_of_epsilon
        verdict = (abs(fit.fitted_exponent - theory) <= tol * abs(theory)
                   and fit.r_squared >= r2_min)
    return replace(fit, theory_exponent=theory, tolerance=tol, verdict=verdict)


def verdict_line(fit: FitResult) -> str:
    """Human-readable verdict row for report output."""
    status = "PASS" if fit.verdict else "FAIL"
    if fit.law == "expLaw":
        return (f"expLaw: fitted K {fit.fitted_exponent:+.6f}, eps power "
                f"{fit.theory_exponent:+.4f}, r2 {fit.r_squared:.4f}, "
                f"spread {fit.residual_spread:.3f} (tol {fit.tolerance}), {status}")
    return (f"{fit.law}: theory {fit.theory_exponent:+.6f}, fitted "
            f"{fit.fitted_exponent:+.6f} (tol {fit.tolerance}), "
            f"r2 {fit.r_squared:.4f}, {status}")
