"""Iteration-frame replays: slicing sequences, coefficient recursions, and
the divergence-onset time.

Each blow-up regime comes with a sequence of lower bounds for the (possibly
exponentially rescaled) spatial average, driven by a recursion for the
multiplicative constants C_j and affine recursions for the exponent
sequences. The recursions are replayed exactly (in log scale, C_j grows
doubly exponentially), together with their closed forms and with the
simplified minorant recursion C_{j+1} = const * rate^{-(j+1)} C_j^q whose
normalized logs converge to an explicit limit. The onset time where the
j -> infinity limit of the lower bounds diverges is the engine's upper
bound for the lifespan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .params import ModelParams, Spacetime, damping_roots, effective_rate
from .regimes import (
    Branch,
    Growth,
    RegimeReport,
    classify,
    _invert_theta_from_log,
    theta_restriction_start,
)


class Variant(str, Enum):
    EXPONENTIAL_2STEP = "exponential2Step"
    POLYNOMIAL_DOMINANT = "polynomialDominant"
    LOG_DOMINANT = "logDominant"
    LOG_BALANCED = "logBalanced"
    ANTI_DS_EXPONENTIAL = "antiDSExponential"


_TWO_STEP = {Variant.EXPONENTIAL_2STEP, Variant.ANTI_DS_EXPONENTIAL}


class AdmissibilityError(ValueError):
    """Parameters violate the inequalities the variant's argument relies on."""


class OutOfAsymptoticRangeError(ValueError):
    """The onset formula was evaluated outside its asymptotic domain."""


@dataclass(frozen=True)
class SlicingSpec:
    variant: Variant
    ell0: float
    ells: np.ndarray       # ell_0 .. ell_K
    L: np.ndarray          # running products L_j = prod_{k <= j} ell_k
    limit_L: float
    generator: str


@dataclass(frozen=True)
class IterationTrace:
    variant: Variant
    params: ModelParams
    j_max: int
    slicing: SlicingSpec
    ln_C: np.ndarray
    ln_C_minorant: np.ndarray
    a: Optional[np.ndarray]
    b_seq: Optional[np.ndarray]
    beta_seq: Optional[np.ndarray]
    gamma_seq: Optional[np.ndarray]
    d_seq: Optional[np.ndarray]
    a_closed: Optional[np.ndarray]
    b_closed: Optional[np.ndarray]
    beta_closed: Optional[np.ndarray]
    gamma_closed: Optional[np.ndarray]
    d_closed: Optional[np.ndarray]
    q: float
    m0: Optional[float]
    m1: Optional[float]
    case_constant: float       # D, B, E, F or G depending on the variant
    tilde_constant: float
    hat_constant: float
    start_index: int
    ln_limit: float            # limit of ln(C_j^minorant) / q^j
    seed_constant: float       # K0 (or K1 for the anti-dS variant)
    frame_constant: float
    rate_effective: float
    rate_critical: float
    aux_exponent: float        # tau power in the onset comparison function

    @property
    def L(self) -> np.ndarray:
        return self.slicing.L


def weighted_geometric_sum(q: float, j: int) -> float:
    """sum_{k=0}^{j-1} (j - k) q^k = ((q^{j+1} - q)/(q - 1) - j) / (q - 1)."""
    return ((q ** (j + 1) - q) / (q - 1.0) - j) / (q - 1.0)


def _slicing_arrays(variant: Variant, params: ModelParams, count: int,
                    report: Optional[RegimeReport] = None) -> SlicingSpec:
    """Materialize ell_0 .. ell_count and the running products."""
    q = params.q
    roots = damping_roots(params.b, params.m2)
    if params.discriminant < -1e-12:
        raise AdmissibilityError("b^2 >= 4 m2 is required for every variant")

    if variant is Variant.LOG_BALANCED:
        js = np.arange(count + 1)
        L = 2.0 - 0.5 ** js
        ells = np.empty(count + 1)
        ells[0] = L[0]
        ells[1:] = L[1:] / L[:-1]
        return SlicingSpec(variant, float(ells[0]), ells, L, 2.0,
                           "L_j = 2 - 2^-j")

    if variant in (Variant.POLYNOMIAL_DOMINANT, Variant.LOG_DOMINANT):
        spread = roots.spread
        if spread <= 0.0:
            raise AdmissibilityError(
                f"alpha2 - alpha1 = {spread} must be positive (b^2 > 4 m2)")
        ell0 = 1.0 / spread
        ks = np.arange(1, count + 1)
        ells = np.concatenate(([ell0], 1.0 + q ** (-ks.astype(float))))
        generator = "ell_0 = 1/(alpha2 - alpha1), ell_k = 1 + q^-k"
        decay = 1.0
    elif variant is Variant.EXPONENTIAL_2STEP:
        rate = effective_rate(params)
        for alpha, name in ((roots.alpha1, "alpha1"), (roots.alpha2, "alpha2")):
            if rate + alpha <= 0.0:
                raise AdmissibilityError(
                    f"rate + {name} = {rate + alpha} must be positive")
        ell0 = max(1.0 / (rate + roots.alpha1), 1.0 / (rate + roots.alpha2))
        ks = np.arange(1, count + 1)
        ells = np.concatenate(([ell0], 1.0 + q ** (-ks / 2.0)))
        generator = "ell_0 = max(1/(rate+alpha1), 1/(rate+alpha2)), ell_k = 1 + q^(-k/2)"
        decay = 0.5
    elif variant is Variant.ANTI_DS_EXPONENTIAL:
        a0_shift = _anti_ds_shifts(params, report)[0]
        for alpha, name in ((roots.alpha1, "alpha1"), (roots.alpha2, "alpha2")):
            if a0_shift + alpha <= 0.0:
                raise AdmissibilityError(
                    f"A0 + {name} = {a0_shift + alpha} must be positive")
        ell0 = max(1.0 / (a0_shift + roots.alpha1), 1.0 / (a0_shift + roots.alpha2))
        ks = np.arange(1, count + 1)
        ells = np.concatenate(([ell0], 1.0 + q ** (-ks / 2.0)))
        generator = "ell_0 = max(1/(A0+alpha1), 1/(A0+alpha2)), ell_k = 1 + q^(-k/2)"
        decay = 0.5
    else:
        raise ValueError(f"unknown variant {variant}")

    L = np.cumprod(ells)
    # limit of the product: extend the tail sum of log(1 + q^(-decay*k)).
    log_limit = math.log(ell0)
    k = 1
    while True:
        inc = q ** (-decay * k)
        if inc < 1e-15:
            break
        log_limit += math.log1p(inc)
        k += 1
    return SlicingSpec(variant, float(ell0), ells, L, math.exp(log_limit), generator)


def _anti_ds_shifts(params: ModelParams, report: Optional[RegimeReport]
                    ) -> tuple[float, float, float]:
    """A0, A1 and rho - rho_crit for the nonlinearity-dominated variant."""
    if report is None:
        report = classify(params)
    if report.branch is not Branch.V0_DOMINANT:
        raise AdmissibilityError(
            "antiDSExponential needs the v0-dominant branch "
            f"(n/2 - spread/(2H) > 1/p), got branch {report.branch}")
    rho_gap = params.r_exp - report.rho_crit_v0
    q, n, H, b = params.q, params.n, params.H, params.b
    a0_shift = rho_gap + 0.5 * (b + n * H) * (q - 1.0) + H * (params.beta + 1.0)
    a1_shift = n * H * (q - 1.0) + H / params.p
    return a0_shift, a1_shift, rho_gap


def slicing_sequence(variant: Variant, params: ModelParams, j_max: int) -> SlicingSpec:
    """Slicing coefficients ell_k and products L_0..L_{j_max} for a variant."""
    if j_max < 0:
        raise ValueError("j_max must be >= 0")
    return _slicing_arrays(variant, params, j_max)


def _smallest_start_index(bound: float) -> int:
    return max(0, math.ceil(bound))


def iterate(variant: Variant, params: ModelParams, j_max: int,
            seed_constant: float = 1.0, frame_constant: float = 1.0) -> IterationTrace:
    """Replay the coefficient recursions of a variant up to index j_max.

    ``seed_constant`` is the data constant K0 (K1 for the anti-dS variant)
    of the first lower bound; the iteration-frame constant defaults to 1.
    All C_j are kept as natural logs.
    """
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    q = params.q
    mu = params.mu
    C = frame_constant
    eps = params.epsilon
    roots = damping_roots(params.b, params.m2)
    report = classify(params)
    kappa = params.kappa_poly
    kp, km = max(kappa, 0.0), max(-kappa, 0.0)
    lnq = math.log(q)
    js = np.arange(j_max + 1)

    if (params.spacetime is Spacetime.ANTI_DE_SITTER
            and variant is not Variant.ANTI_DS_EXPONENTIAL
            and report.branch is not Branch.LIN_PART_DOMINANT):
        raise AdmissibilityError(
            "anti-de Sitter models on the v0-dominant branch only admit the "
            f"antiDSExponential variant, got {variant}")

    a = b_seq = beta_seq = gamma_seq = d_seq = None
    a_cf = b_cf = beta_cf = gamma_cf = d_cf = None
    m0 = m1 = None

    if variant is Variant.EXPONENTIAL_2STEP:
        rate = effective_rate(params)
        rate_crit = roots.alpha1 * (q - 1.0)
        if rate - rate_crit <= 1e-12:
            raise AdmissibilityError(
                f"effective rate {rate} must exceed the critical rate {rate_crit}")
        slicing = _slicing_arrays(variant, params, 2 * j_max + 2)
        ells = slicing.ells
        a0 = -roots.alpha1
        b0 = 0.0 if roots.spread > 0.0 else 1.0
        a = np.empty(j_max + 1); b_seq = np.empty(j_max + 1); beta_seq = np.empty(j_max + 1)
        ln_C = np.empty(j_max + 1)
        a[0], b_seq[0], beta_seq[0] = a0, b0, 0.0
        ln_C[0] = math.log(seed_constant * eps)
        ln_pref = math.log(mu * C) + 2.0 * math.log(q - 0.5)
        for j in range(j_max):
            ln_C[j + 1] = (ln_pref + q * ln_C[j]
                           - (kp + q * b_seq[j]) * (math.log(ells[2 * j + 1]) + math.log(ells[2 * j + 2]))
                           - math.log(roots.alpha1 + rate + q * a[j])
                           - math.log(roots.alpha2 + rate + q * a[j])
                           - (4 * j + 3) * lnq)
            a[j + 1] = rate + q * a[j]
            b_seq[j + 1] = kp + q * b_seq[j]
            beta_seq[j + 1] = km + q * beta_seq[j]
        qj = q ** js.astype(float)
        a_cf = (rate / (q - 1.0) + a0) * qj - rate / (q - 1.0)
        b_cf = (kp / (q - 1.0) + b0) * qj - kp / (q - 1.0)
        beta_cf = (km / (q - 1.0)) * (qj - 1.0)
        m0 = rate / (q - 1.0) + a0 + roots.spread
        m1 = math.exp((kp / (q - 1.0) + b0) * (1.0 + math.sqrt(q)))
        # alpha + a_{j+1} <= m0 q^{j+1}, so the per-step minorant carries q^1
        # (not the q^3 a one-index-off bound would give).
        case_const = mu * C * (q - 0.5) ** 2 * q / (m1 * m0 * m0)
        rate_exponent = 6.0
        start = _smallest_start_index(math.log(case_const) / (6.0 * lnq) - q / (q - 1.0))
        tilde = seed_constant * q ** (-6.0 * q / (q - 1.0) ** 2) * case_const ** (1.0 / (q - 1.0))
        hat = 2.0 ** (-((kp + km) / (q - 1.0) + b0)) * tilde
        ln_limit = math.log(tilde * eps)
        aux = (kappa + (q - 1.0) * b0) / (rate - rate_crit)
        rate_eff, rate_critical = rate, rate_crit

    elif variant is Variant.POLYNOMIAL_DOMINANT:
        rate = effective_rate(params)
        rate_crit = roots.alpha1 * (q - 1.0)
        spread = roots.spread
        if spread <= 0.0:
            raise AdmissibilityError("polynomialDominant needs b^2 > 4 m2")
        if abs(rate - rate_crit) > 1e-12:
            raise AdmissibilityError(
                f"effective rate {rate} must equal the critical rate {rate_crit}")
        if kappa <= -1.0 + 1e-12:
            raise AdmissibilityError(f"kappa = {kappa} must exceed -1")
        slicing = _slicing_arrays(variant, params, j_max + 1)
        ells = slicing.ells
        b_seq = np.empty(j_max + 1); beta_seq = np.empty(j_max + 1)
        ln_C = np.empty(j_max + 1)
        b_seq[0], beta_seq[0] = 0.0, 0.0
        ln_C[0] = math.log(seed_constant * eps)
        ln_pref = math.log(mu * C * (q - 0.5) / spread)
        for j in range(j_max):
            bnext = 1.0 + kp + q * b_seq[j]
            ln_C[j + 1] = (ln_pref + q * ln_C[j] - math.log(bnext)
                           - bnext * math.log(ells[j + 1]) - 2.0 * (j + 1) * lnq)
            b_seq[j + 1] = bnext
            beta_seq[j + 1] = km + q * beta_seq[j]
        qj = q ** js.astype(float)
        b_cf = ((1.0 + kp) / (q - 1.0)) * (qj - 1.0)
        beta_cf = (km / (q - 1.0)) * (qj - 1.0)
        m1 = math.exp((1.0 + kp) / (q - 1.0))
        case_const = mu * C * (q - 0.5) * (q - 1.0) / (spread * (1.0 + kp) * m1)
        rate_exponent = 3.0
        start = _smallest_start_index(math.log(case_const) / (3.0 * lnq) - q / (q - 1.0))
        tilde = seed_constant * q ** (-3.0 * q / (q - 1.0) ** 2) * case_const ** (1.0 / (q - 1.0))
        hat = 2.0 ** (-(1.0 + kp + km) / (q - 1.0)) * tilde
        ln_limit = math.log(tilde * eps)
        aux = 0.0
        rate_eff, rate_critical = rate, rate_crit

    elif variant is Variant.LOG_DOMINANT:
        rate = effective_rate(params)
        rate_crit = roots.alpha1 * (q - 1.0)
        spread = roots.spread
        if spread <= 0.0:
            raise AdmissibilityError("logDominant needs b^2 > 4 m2")
        if abs(rate - rate_crit) > 1e-12 or abs(kappa + 1.0) > 1e-12:
            raise AdmissibilityError(
                "logDominant needs rate = critical rate and kappa = -1")
        slicing = _slicing_arrays(variant, params, j_max + 1)
        d_seq = np.empty(j_max + 1)
        ln_C = np.empty(j_max + 1)
        d_seq[0] = 0.0
        ln_C[0] = math.log(seed_constant * eps)
        ell0 = slicing.ell0
        ln_pref = math.log(mu * C * (q - 0.5) / (spread ** 2 * (ell0 + 1.0)))
        for j in range(j_max):
            ln_C[j + 1] = (ln_pref + q * ln_C[j]
                           - math.log(1.0 + q * d_seq[j]) - 2.0 * (j + 1) * lnq)
            d_seq[j + 1] = 1.0 + q * d_seq[j]
        qj = q ** js.astype(float)
        d_cf = (qj - 1.0) / (q - 1.0)
        case_const = mu * C * (q - 0.5) * (q - 1.0) / (spread ** 2 * (ell0 + 1.0))
        rate_exponent = 3.0
        start = _smallest_start_index(math.log(case_const) / (3.0 * lnq) - q / (q - 1.0))
        tilde = seed_constant * q ** (-3.0 * q / (q - 1.0) ** 2) * case_const ** (1.0 / (q - 1.0))
        hat = tilde
        ln_limit = math.log(tilde * eps)
        aux = 0.0
        rate_eff, rate_critical = rate, rate_crit

    elif variant is Variant.LOG_BALANCED:
        rate = effective_rate(params)
        rate_crit = roots.alpha1 * (q - 1.0)
        if roots.spread > 0.0 or params.discriminant < -1e-12:
            raise AdmissibilityError("logBalanced needs b^2 = 4 m2")
        if abs(rate - rate_crit) > 1e-12 or abs(kappa + 1.0 + q) > 1e-12:
            raise AdmissibilityError(
                "logBalanced needs rate = critical rate and kappa = -1 - q")
        slicing = _slicing_arrays(variant, params, j_max + 1)
        L = slicing.L
        d_seq = np.empty(j_max + 1)
        ln_C = np.empty(j_max + 1)
        d_seq[0] = 0.0
        ln_C[0] = math.log(seed_constant * eps)
        ln_muC = math.log(mu * C)
        ln2 = math.log(2.0)
        for j in range(j_max):
            # 1 - L_j/L_{j+1} = 2^-(j+1) / L_{j+1} exactly; the direct ratio
            # cancels to zero once L_j saturates at 2 in floating point.
            ln_C[j + 1] = (ln_muC + q * ln_C[j]
                           - math.log(1.0 + q * d_seq[j])
                           - (1.0 + q) * math.log1p(1.0 / L[j])
                           - (j + 1) * ln2 - math.log(L[j + 1]))
            d_seq[j + 1] = 1.0 + q * d_seq[j]
        qj = q ** js.astype(float)
        d_cf = (qj - 1.0) / (q - 1.0)
        case_const = 2.0 ** (-2.0 - q) * mu * C * (q - 1.0)
        rate_exponent = 1.0  # minorant rate base is (2q), handled below
        start = _smallest_start_index(math.log(case_const) / math.log(2.0 * q) - q / (q - 1.0))
        tilde = (seed_constant * (2.0 * q) ** (-q / (q - 1.0) ** 2)
                 * case_const ** (1.0 / (q - 1.0)))
        hat = tilde
        ln_limit = math.log(tilde * eps)
        aux = 0.0
        rate_eff, rate_critical = rate, rate_crit

    elif variant is Variant.ANTI_DS_EXPONENTIAL:
        if params.spacetime is not Spacetime.ANTI_DE_SITTER:
            raise AdmissibilityError("antiDSExponential needs an anti-de Sitter model")
        a0_shift, a1_shift, rho_gap = _anti_ds_shifts(params, report)
        if rho_gap <= 1e-12:
            raise AdmissibilityError(
                f"rho = {params.r_exp} must exceed rho_crit = {report.rho_crit_v0}")
        slicing = _slicing_arrays(variant, params, 2 * j_max + 2, report)
        ells = slicing.ells
        n, H, b = params.n, params.H, params.b
        a0 = rho_gap + 0.5 * n * H
        g0 = 0.5 * b + H / params.p
        sp_, sm = kp, km  # sigma_+ / sigma_- of the polynomial power
        a = np.empty(j_max + 1); gamma_seq = np.empty(j_max + 1)
        b_seq = np.empty(j_max + 1); beta_seq = np.empty(j_max + 1)
        ln_C = np.empty(j_max + 1)
        a[0], gamma_seq[0], b_seq[0], beta_seq[0] = a0, g0, sp_, sm
        ln_C[0] = math.log(seed_constant) + q * math.log(eps)
        ln_pref = math.log(mu * C) + 2.0 * math.log(q - 0.5)
        for j in range(j_max):
            ln_C[j + 1] = (ln_pref + q * ln_C[j]
                           - (sp_ + q * b_seq[j]) * (math.log(ells[2 * j + 1]) + math.log(ells[2 * j + 2]))
                           - math.log(a0_shift + roots.alpha1 + q * a[j])
                           - math.log(a0_shift + roots.alpha2 + q * a[j])
                           - (4 * j + 3) * lnq)
            a[j + 1] = a0_shift + q * a[j]
            gamma_seq[j + 1] = a1_shift + q * gamma_seq[j]
            b_seq[j + 1] = sp_ + q * b_seq[j]
            beta_seq[j + 1] = sm + q * beta_seq[j]
        qj = q ** js.astype(float)
        a_cf = (a0 + a0_shift / (q - 1.0)) * qj - a0_shift / (q - 1.0)
        gamma_cf = (g0 + a1_shift / (q - 1.0)) * qj - a1_shift / (q - 1.0)
        b_cf = sp_ * (q * qj - 1.0) / (q - 1.0)
        beta_cf = sm * (q * qj - 1.0) / (q - 1.0)
        m0 = 0.5 * (b + roots.spread) + a0 + a0_shift / (q - 1.0)
        m1 = math.exp(sp_ * q * (1.0 + math.sqrt(q)) / (q - 1.0))
        case_const = mu * C * q * (q - 0.5) ** 2 / (m0 * m0 * m1)
        rate_exponent = 6.0
        start = _smallest_start_index(math.log(case_const) / (6.0 * lnq) - q / (q - 1.0))
        tilde = seed_constant * q ** (-6.0 * q / (q - 1.0) ** 2) * case_const ** (1.0 / (q - 1.0))
        hat = 2.0 ** (-(sp_ + sm) * q / (q - 1.0)) * tilde
        ln_limit = math.log(tilde) + q * math.log(eps)
        aux = kappa / rho_gap
        rate_eff, rate_critical = params.r_exp, report.rho_crit_v0

    else:
        raise ValueError(f"unknown variant {variant}")

    # Minorant recursion C_{j+1} = case_const * base^-(j+1) * C_j^q in closed
    # form through the weighted geometric sum identity.
    ln_case = math.log(case_const)
    base_log = math.log(2.0 * q) if variant is Variant.LOG_BALANCED else rate_exponent * lnq
    ln_seed0 = ln_C[0]
    ln_C_lb = np.array([
        (q ** jj) * ln_seed0 - base_log * weighted_geometric_sum(q, jj)
        + ln_case * (q ** jj - 1.0) / (q - 1.0)
        for jj in range(j_max + 1)
    ])

    return IterationTrace(
        variant=variant, params=params, j_max=j_max, slicing=slicing,
        ln_C=ln_C, ln_C_minorant=ln_C_lb,
        a=a, b_seq=b_seq, beta_seq=beta_seq, gamma_seq=gamma_seq, d_seq=d_seq,
        a_closed=a_cf, b_closed=b_cf, beta_closed=beta_cf,
        gamma_closed=gamma_cf, d_closed=d_cf,
        q=q, m0=m0, m1=m1,
        case_constant=case_const, tilde_constant=tilde, hat_constant=hat,
        start_index=start, ln_limit=ln_limit,
        seed_constant=seed_constant, frame_constant=frame_constant,
        rate_effective=rate_eff, rate_critical=rate_critical,
        aux_exponent=aux,
    )


def lower_bound_at(trace: IterationTrace, j: int, t: float) -> float:
    """log of the j-th lower bound for the tracked functional at time t."""
    if not 0 <= j <= trace.j_max:
        raise ValueError(f"j = {j} outside the trace range 0..{trace.j_max}")
    v = trace.variant
    L = trace.slicing.L
    shift = L[2 * j] if v in _TWO_STEP else L[j]
    if t < shift:
        raise ValueError(f"t = {t} below the bound's domain start L = {shift}")

    def powlog(base: float, exponent: float) -> float:
        if base > 0.0:
            return exponent * math.log(base)
        return 0.0 if exponent == 0.0 else -math.inf

    if v is Variant.EXPONENTIAL_2STEP:
        if j == 0:
            # First bound carries (1 + t)^{b_0} rather than (t - L_0)^{b_0}.
            return trace.ln_C[0] + trace.a[0] * t + trace.b_seq[0] * math.log1p(t)
        return (trace.ln_C[j] + trace.a[j] * t
                + powlog(t - shift, trace.b_seq[j])
                - trace.beta_seq[j] * math.log1p(t))
    if v is Variant.POLYNOMIAL_DOMINANT:
        return (trace.ln_C[j] + powlog(t - shift, trace.b_seq[j])
                - trace.beta_seq[j] * math.log1p(t))
    if v is Variant.LOG_DOMINANT:
        return trace.ln_C[j] + powlog(math.log(t / L[j]), trace.d_seq[j])
    if v is Variant.LOG_BALANCED:
        return trace.ln_C[j] + math.log(t) + powlog(math.log(t / L[j]), trace.d_seq[j])
    # anti-dS exponential
    return (trace.ln_C[j] + (trace.a[j] - trace.gamma_seq[j]) * t
            + powlog(t - shift, trace.b_seq[j])
            - trace.beta_seq[j] * math.log1p(t))


def divergence_onset(trace: IterationTrace, params: Optional[ModelParams] = None) -> float:
    """Time where the limit of the lower bounds switches to divergence.

    Solves the positivity condition of the factor multiplying q^j in the
    closed final bound; the result is the engine's upper-bound estimate for
    the lifespan. Raises ``OutOfAsymptoticRangeError`` when the onset does
    not clear max(2 L, 1), the domain the final bound was derived on.
    """
    if params is None:
        params = trace.params
    q = trace.q
    eps = params.epsilon
    limit = trace.slicing.limit_L
    threshold = max(2.0 * limit, 1.0)
    v = trace.variant

    if v is Variant.EXPONENTIAL_2STEP:
        power = (trace.rate_effective - trace.rate_critical) / (q - 1.0)
        log_s = -(math.log(trace.hat_constant) + math.log(eps)) / power
        onset = _invert_theta_from_log(trace.aux_exponent, log_s)
    elif v is Variant.POLYNOMIAL_DOMINANT:
        kappa = params.kappa_poly
        onset = math.exp(-(q - 1.0) / (1.0 + kappa)
                         * (math.log(trace.hat_constant) + math.log(eps)))
    elif v is Variant.LOG_DOMINANT:
        x = math.exp(-(q - 1.0) * (math.log(trace.tilde_constant) + math.log(eps)))
        onset = limit * math.exp(x) if x < 700.0 else math.inf
    elif v is Variant.LOG_BALANCED:
        x = math.exp(-(q - 1.0) * (math.log(trace.tilde_constant) + math.log(eps)))
        onset = 2.0 * math.exp(x) if x < 700.0 else math.inf
    else:
        rho_gap = trace.rate_effective - trace.rate_critical
        log_s = (-(q - 1.0) / rho_gap
                 * (math.log(trace.hat_constant) / q + math.log(eps)))
        onset = _invert_theta_from_log(trace.aux_exponent, log_s)

    if onset <= threshold:
        raise OutOfAsymptoticRangeError(
            f"onset {onset} does not exceed max(2L, 1) = {threshold}; "
            "epsilon is too large for the asymptotic bound")
    return onset


def variant_for(params: ModelParams) -> Optional[Variant]:
    """Iteration variant matching the classified regime, or None.

    The polynomial balanced case rests on a cited comparison lemma rather
    than a slicing recursion, so it has no variant here.
    """
    report = classify(params)
    if report.growth is Growth.BELOW_THRESHOLD:
        return None
    if report.growth is Growth.EXPONENTIAL:
        if report.branch is Branch.V0_DOMINANT:
            return Variant.ANTI_DS_EXPONENTIAL
        return Variant.EXPONENTIAL_2STEP
    balanced = report.dissipation.value == "balanced"
    if report.growth is Growth.POLYNOMIAL:
        return None if balanced else Variant.POLYNOMIAL_DOMINANT
    return Variant.LOG_BALANCED if balanced else Variant.LOG_DOMINANT
