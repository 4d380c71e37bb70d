"""Growth-regime classification and lifespan bound machinery.

Evaluates every closed-form threshold (critical exponential rate, critical
polynomial power, their anti-de Sitter analogues, and the dimension
thresholds), classifies a parameter tuple into a blow-up regime, and builds
the matching lifespan-bound family together with a numerical inverse of the
monotone comparison function tau -> exp(tau) * tau^a.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .params import (
    DampingRoots,
    ModelParams,
    RegimeUnsupportedError,
    RootKind,
    Spacetime,
    damping_roots,
    effective_rate,
)

RATE_TOL = 1e-12


class Dissipation(str, Enum):
    DOMINANT_DISSIPATION = "dominantDissipation"
    BALANCED = "balanced"
    DOMINANT_MASS = "dominantMass"


class Growth(str, Enum):
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"
    LOGARITHMIC = "logarithmic"
    BELOW_THRESHOLD = "belowThreshold"


class Branch(str, Enum):
    LIN_PART_DOMINANT = "linPartDominant"
    V0_DOMINANT = "v0Dominant"


class BoundFamily(str, Enum):
    THETA_DE_SITTER = "thetaDeSitter"
    ZETA_ANTI_DS_LIN = "zetaAntiDSLin"
    CHI_ANTI_DS_V0 = "chiAntiDSV0"
    POWER_LAW = "powerLaw"
    EXP_LAW = "expLaw"


@dataclass(frozen=True)
class RegimeReport:
    dissipation: Dissipation
    growth: Growth
    r_crit: float
    kappa_crit: float
    rho_crit_lin: Optional[float]
    rho_crit_v0: Optional[float]
    branch: Optional[Branch]
    N0: Optional[float]
    p_tilde: Optional[float]
    p0: Optional[float]
    note: str = ""

    @property
    def critical_rate(self) -> float:
        """The rate the model's r_exp is compared against (branch-aware)."""
        if self.branch is None:
            return self.r_crit
        if self.branch is Branch.LIN_PART_DOMINANT:
            return self.rho_crit_lin
        return self.rho_crit_v0


@dataclass(frozen=True)
class LifespanBound:
    """Scaling skeleton of the matching theorem's lifespan upper bound.

    ``exponent_of_epsilon`` is the power of epsilon on the right-hand side;
    for the exp-law family it is the power inside the exponential. The
    multiplicative constants are never quantified and stay symbolic.
    """

    family: BoundFamily
    exponent_of_epsilon: float
    aux_exponent: float = 0.0
    note: str = "multiplicative constants C, K unspecified"


def _require_dominant_damping(b: float, m2: float, balanced_tol: float = RATE_TOL):
    if b * b - 4.0 * m2 < -balanced_tol:
        raise RegimeUnsupportedError(
            f"dominant-mass regime (b^2 = {b * b} < 4*m2 = {4 * m2}) is not supported"
        )


def critical_rates(params: ModelParams, balanced_tol: float = RATE_TOL,
                   force_balanced: bool = False) -> tuple[float, float]:
    """Critical exponential rate and critical polynomial power.

    r_crit = (b - sqrt(b^2 - 4 m2)) * (q - 1) / 2, which collapses to zero in
    the massless case for any b; kappa_crit is -1 with dominant dissipation
    and -1 - q in the balanced case.
    """
    _require_dominant_damping(params.b, params.m2, balanced_tol)
    roots = damping_roots(params.b, params.m2, balanced_tol, force_balanced)
    q = params.q
    r_crit = roots.alpha1 * (q - 1.0)
    if roots.kind is RootKind.DOUBLE_ROOT:
        kappa_crit = -1.0 - q
    else:
        kappa_crit = -1.0
    return r_crit, kappa_crit


def _branch_condition(params: ModelParams, roots: DampingRoots) -> Branch:
    # linPartDominant iff n/2 - sqrt(disc)/(2H) <= 1/p, equality included.
    lhs = params.n / 2.0 - roots.spread / (2.0 * params.H)
    if lhs <= 1.0 / params.p + RATE_TOL:
        return Branch.LIN_PART_DOMINANT
    return Branch.V0_DOMINANT


def rho_crit(params: ModelParams, balanced_tol: float = RATE_TOL,
             force_balanced: bool = False) -> tuple[Branch, float]:
    """Critical rate for anti-de Sitter, with the dominating-first-bound branch."""
    if params.spacetime is not Spacetime.ANTI_DE_SITTER:
        raise RegimeUnsupportedError("rho_crit is defined for anti-de Sitter models only")
    _require_dominant_damping(params.b, params.m2, balanced_tol)
    roots = damping_roots(params.b, params.m2, balanced_tol, force_balanced)
    n, H, b, p, beta, q = params.n, params.H, params.b, params.p, params.beta, params.q
    branch = _branch_condition(params, roots)
    if branch is Branch.LIN_PART_DOMINANT:
        value = roots.alpha1 * (q - 1.0) + n * H * (beta + 1.0) * (p - 1.0)
    else:
        value = 0.5 * (b + n * H) * (q - 1.0) + n * H - (n - 1.0) * H * (beta + 1.0) - H / p
    return branch, value


def dimension_thresholds(params: ModelParams, balanced_tol: float = RATE_TOL
                         ) -> tuple[float, Optional[float], Optional[float]]:
    """Dimension threshold N0, the window exponent p_tilde, and p0.

    p_tilde exists only on the open window N0 < n < N0 + 2 (at n = N0 the
    defining ratio degenerates and no value is reported). p0 exists for
    n > 2 + b/H with beta > 0 and is 1 plus the positive root of

        (b + nH)(beta+1) x^2 + [2(b+H)beta + (b+nH) + H] x - ((n-2)H - b) beta = 0.
    """
    _require_dominant_damping(params.b, params.m2, balanced_tol)
    roots = damping_roots(params.b, params.m2, balanced_tol)
    n, H, b, beta = params.n, params.H, params.b, params.beta
    N0 = roots.spread / H

    p_tilde = None
    if N0 < n < N0 + 2.0:
        p_tilde = 2.0 * H / (n * H - roots.spread)

    p0 = None
    if beta > 0 and n > 2.0 + b / H:
        a2 = (b + n * H) * (beta + 1.0)
        a1 = 2.0 * (b + H) * beta + (b + n * H) + H
        a0 = -((n - 2.0) * H - b) * beta
        # a0 < 0 here, so there is exactly one positive root.
        x = (-a1 + math.sqrt(a1 * a1 - 4.0 * a2 * a0)) / (2.0 * a2)
        p0 = 1.0 + x
    return N0, p_tilde, p0


def critical_quadratic(params: ModelParams, p: float) -> float:
    """Left side of the p0-defining quadratic, evaluated at exponent p."""
    n, H, b, beta = params.n, params.H, params.b, params.beta
    x = p - 1.0
    return ((b + n * H) * (beta + 1.0) * x * x
            + (2.0 * (b + H) * beta + (b + n * H) + H) * x
            - ((n - 2.0) * H - b) * beta)


def classify(params: ModelParams, balanced_tol: float = RATE_TOL,
             force_balanced: bool = False) -> RegimeReport:
    """Classify a parameter tuple into dissipation and growth regimes."""
    roots = damping_roots(params.b, params.m2, balanced_tol, force_balanced)
    if roots.kind is RootKind.COMPLEX_CONJUGATE:
        return RegimeReport(
            dissipation=Dissipation.DOMINANT_MASS,
            growth=Growth.BELOW_THRESHOLD,
            r_crit=math.nan, kappa_crit=math.nan,
            rho_crit_lin=None, rho_crit_v0=None, branch=None,
            N0=None, p_tilde=None, p0=None,
            note="dominant mass: oscillatory linear part, blow-up machinery not applicable",
        )
    dissipation = (Dissipation.BALANCED if roots.kind is RootKind.DOUBLE_ROOT
                   else Dissipation.DOMINANT_DISSIPATION)
    r_crit, kappa_crit = critical_rates(params, balanced_tol, force_balanced)
    N0, p_tilde, p0 = dimension_thresholds(params, balanced_tol)

    branch = None
    rho_lin = rho_v0 = None
    if params.spacetime is Spacetime.ANTI_DE_SITTER:
        n, H, b, p, beta, q = params.n, params.H, params.b, params.p, params.beta, params.q
        rho_lin = roots.alpha1 * (q - 1.0) + n * H * (beta + 1.0) * (p - 1.0)
        rho_v0 = 0.5 * (b + n * H) * (q - 1.0) + n * H - (n - 1.0) * H * (beta + 1.0) - H / p
        branch = _branch_condition(params, roots)
        critical_rate = rho_lin if branch is Branch.LIN_PART_DOMINANT else rho_v0
    else:
        critical_rate = r_crit

    note = ""
    rate_gap = params.r_exp - critical_rate
    if rate_gap > RATE_TOL:
        growth = Growth.EXPONENTIAL
    elif abs(rate_gap) <= RATE_TOL:
        if branch is Branch.V0_DOMINANT:
            # Critical rate on the nonlinearity-dominated branch: not covered.
            growth = Growth.BELOW_THRESHOLD
            note = "critical rate on the v0-dominant branch is outside the covered regimes"
        elif params.kappa_poly - kappa_crit > RATE_TOL:
            growth = Growth.POLYNOMIAL
        elif abs(params.kappa_poly - kappa_crit) <= RATE_TOL:
            growth = Growth.LOGARITHMIC
        else:
            growth = Growth.BELOW_THRESHOLD
    else:
        growth = Growth.BELOW_THRESHOLD

    return RegimeReport(
        dissipation=dissipation, growth=growth,
        r_crit=r_crit, kappa_crit=kappa_crit,
        rho_crit_lin=rho_lin, rho_crit_v0=rho_v0, branch=branch,
        N0=N0, p_tilde=p_tilde, p0=p0, note=note,
    )


def lifespan_bound(report: RegimeReport, params: ModelParams) -> LifespanBound:
    """Bound family and exponents of the theorem matching the classified regime."""
    if report.growth is Growth.BELOW_THRESHOLD:
        raise RegimeUnsupportedError("no lifespan bound below the blow-up thresholds")
    q = params.q
    balanced = report.dissipation is Dissipation.BALANCED
    kappa = params.kappa_poly

    if report.growth is Growth.EXPONENTIAL:
        gap = params.r_exp - report.critical_rate
        eps_exponent = -(q - 1.0) / gap
        aux = ((q - 1.0 + kappa) / gap) if balanced else (kappa / gap)
        if params.spacetime is Spacetime.DE_SITTER:
            family = BoundFamily.THETA_DE_SITTER
        elif report.branch is Branch.LIN_PART_DOMINANT:
            family = BoundFamily.ZETA_ANTI_DS_LIN
        else:
            family = BoundFamily.CHI_ANTI_DS_V0
            aux = kappa / gap
        return LifespanBound(family, eps_exponent, aux)

    if report.growth is Growth.POLYNOMIAL:
        if balanced:
            eps_exponent = -1.0 / ((kappa + 2.0) / (q - 1.0) + 1.0)
        else:
            eps_exponent = -(q - 1.0) / (kappa + 1.0)
        return LifespanBound(BoundFamily.POWER_LAW, eps_exponent)

    return LifespanBound(BoundFamily.EXP_LAW, -(q - 1.0))


def theta_log(tau: float, aux_exponent: float) -> float:
    """log of theta(tau) = exp(tau) * tau^aux_exponent."""
    if tau <= 0.0:
        raise ValueError(f"theta is evaluated for tau > 0, got {tau}")
    return tau + aux_exponent * math.log(tau)


def theta_restriction_start(aux_exponent: float) -> float:
    """Left end of the increasing branch: the stationary point -aux when aux < 0."""
    return max(0.0, -aux_exponent)


def invert_theta(aux_exponent: float, s: float, rel_tol: float = 1e-10,
                 max_iter: int = 200, family: Optional[BoundFamily] = None) -> float:
    """Solve exp(tau) * tau^a = s on the increasing branch.

    ``family``, when given, must be one of the comparison-function families
    (the power-law and exp-law bounds have nothing to invert).
    """
    if s <= 0.0:
        raise ValueError(f"theta inversion needs s > 0, got {s}")
    if family in (BoundFamily.POWER_LAW, BoundFamily.EXP_LAW):
        raise ValueError(f"family {family} has no comparison function to invert")
    return _invert_theta_from_log(aux_exponent, math.log(s), rel_tol, max_iter)


def _invert_theta_from_log(aux_exponent: float, log_s: float, rel_tol: float = 1e-10,
                           max_iter: int = 200) -> float:
    """Solve tau + a*log(tau) = log_s on the increasing branch tau >= max(0, -a).

    Bracketing by doubling, then bisection with a Newton polish; log_s input
    keeps the inversion usable when s itself overflows.
    """
    a = aux_exponent
    t_start = theta_restriction_start(a)

    def g(tau: float) -> float:
        return tau + a * math.log(tau) - log_s

    if t_start > 0.0:
        lo = t_start
        if g(lo) > 0.0:
            raise ValueError(
                f"log s = {log_s} below the minimum of theta on the increasing "
                f"branch (log theta({lo}) = {theta_log(lo, a)})"
            )
    else:
        if a == 0.0:
            if log_s < 0.0:
                raise ValueError(f"log s = {log_s} below theta(0) = 1 for a pure exponential")
            return log_s
        # a > 0: g -> -inf as tau -> 0+.
        lo = min(1.0, math.exp((log_s - 1.0) / a)) if log_s < 1.0 else 1.0
        while g(lo) > 0.0:
            lo /= 2.0
            if lo < 1e-300:
                raise ValueError("failed to bracket theta inverse near zero")

    hi = max(2.0 * lo, 1.0)
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError("failed to bracket theta inverse from above")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        val = g(mid)
        if val > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rel_tol * max(1.0, lo):
            break
    tau = 0.5 * (lo + hi)
    # Newton polish; g' = 1 + a/tau > 0 on the branch.
    for _ in range(8):
        step = g(tau) / (1.0 + a / tau)
        new = tau - step
        if new <= t_start:
            new = 0.5 * (tau + max(t_start, lo))
        if abs(new - tau) <= rel_tol * max(1.0, abs(tau)):
            tau = new
            break
        tau = new
    return tau
