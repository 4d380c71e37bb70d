"""Comparison-ODE laboratory.

Integrates U'' + b U' + m2 U = frame_C * gamma(t) * U^q with an embedded
Dormand-Prince 5(4) pair and robust blow-up detection, provides the exact
linear solutions for all three root configurations, reconstructs the average
from recorded forcing through the representation formula (a consistency
oracle for the PDE lab), and evaluates the anti-de Sitter weighted-average
lower envelope.

When b^2 >= 4 m2 the integration runs in the exponentially rescaled variable
W(t) = exp(alpha1 t) U(t), which turns the critical-rate models into
equations with bounded coefficients: the raw product gamma(t) * U^q pairs a
doubly-huge factor with a doubly-tiny one and dies in floating point long
before the mathematics does. Blow-up of W and of U happen at the same time,
so detection thresholds apply to the integration variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .params import ModelParams, RegimeUnsupportedError, RootKind, damping_roots
from .profiles import get_profile, profile_integral, radial_quadrature
from .specfun import (
    lambda_envelope_constants,
    lambda_time_derivative,
    log_lambda,
    phi_radial,
)


class SolverFailure(RuntimeError):
    """Integration failed before reaching blow-up or the horizon."""


@dataclass(frozen=True)
class OdeProblem:
    b: float
    m2: float
    q: float
    frame_C: float
    gamma_mu: float = 1.0
    gamma_rate: float = 0.0
    gamma_power: float = 0.0
    U0: float = 1.0
    U1: float = 0.0
    t_max: float = 20.0

    def __post_init__(self):
        if not self.q > 1.0:
            raise ValueError(f"q must be > 1, got {self.q}")
        if self.frame_C < 0.0:
            raise ValueError(f"frame_C must be >= 0, got {self.frame_C}")


@dataclass(frozen=True)
class OdeControls:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    u_cap: float = 1e12
    dt_min: float = 1e-13
    max_steps: int = 5_000_000
    tail_points: int = 50


@dataclass
class BlowupEstimate:
    blew_up: bool
    T_hat: Optional[float]
    T_low: float
    fit_exponent: Optional[float]
    steps: int
    reason: str  # thresholdAndStepCollapse | horizonReached | tolerance
    t_samples: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    log_u_samples: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    sign_samples: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    @property
    def u_samples(self) -> np.ndarray:
        return self.sign_samples * np.exp(self.log_u_samples)


def linear_solution(b: float, m2: float, U0: float, U1: float, t):
    """Exact solution of U'' + b U' + m2 U = 0 for any root configuration."""
    t = np.asarray(t, dtype=float)
    roots = damping_roots(b, m2)
    if roots.kind is RootKind.DISTINCT_REAL:
        a1, a2 = roots.alpha1, roots.alpha2
        e1, e2 = np.exp(-a1 * t), np.exp(-a2 * t)
        return ((a2 * e1 - a1 * e2) * U0 + (e1 - e2) * U1) / (a2 - a1)
    if roots.kind is RootKind.DOUBLE_ROOT:
        decay = np.exp(-0.5 * b * t)
        return (1.0 + 0.5 * b * t) * decay * U0 + t * decay * U1
    omega = roots.omega
    decay = np.exp(-0.5 * b * t)
    y0 = decay * np.cos(omega * t) + 0.5 * b * decay * np.sin(omega * t) / omega
    y1 = decay * np.sin(omega * t) / omega
    return y0 * U0 + y1 * U1


# Dormand-Prince 5(4) tableau.
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
                   187 / 2100, 1 / 40])


def _signed_power(w: float, q: float) -> float:
    if w == 0.0:
        return 0.0
    return math.copysign(abs(w) ** q, w)


def integrate_comparison(problem: OdeProblem, controls: Optional[OdeControls] = None,
                         keep_trace: bool = False) -> BlowupEstimate:
    """Integrate the comparison ODE until blow-up, the horizon, or failure.

    Blow-up is declared when the integration variable exceeds ``u_cap`` and
    the accepted step has collapsed below ``dt_min`` (or time stops advancing
    in floating point while the solution is running away). The blow-up time
    is then extrapolated by regressing W^(-(q-1)/2) on t over the last
    accepted steps and taking its zero crossing, per the leading balance
    W ~ A (T - t)^(-2/(q-1)).
    """
    if controls is None:
        controls = OdeControls()
    if problem.U0 <= 0.0 and problem.U1 <= 0.0:
        raise ValueError("initial data must have U0 > 0 or U1 > 0")

    b, m2, q = problem.b, problem.m2, problem.q
    disc = b * b - 4.0 * m2
    if disc >= -1e-12:
        roots = damping_roots(b, m2)
        alpha1 = roots.alpha1
        damping = roots.spread      # W'' + (alpha2 - alpha1) W' = forcing
    else:
        alpha1 = 0.0
        damping = None              # integrate the original variables

    log_mu = math.log(problem.gamma_mu)
    rate_eff = problem.gamma_rate - alpha1 * (q - 1.0)
    kappa = problem.gamma_power
    frame_C = problem.frame_C

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        w, wp = y
        if frame_C > 0.0 and w != 0.0:
            lg = log_mu + rate_eff * t + kappa * math.log1p(t) + q * math.log(abs(w))
            forcing = 0.0 if lg < -745.0 else frame_C * math.copysign(math.exp(lg), w)
        else:
            forcing = 0.0
        if damping is not None:
            acc = -damping * wp + forcing
        else:
            acc = -b * wp - m2 * w + forcing
        return np.array([wp, acc])

    w0 = problem.U0
    w1 = problem.U1 + alpha1 * problem.U0
    y = np.array([w0, w1], dtype=float)
    t = 0.0
    rtol, atol = controls.rel_tol, controls.abs_tol

    f = rhs(t, y)
    scale = atol + rtol * np.abs(y)
    d0 = math.sqrt(float(np.mean((y / scale) ** 2)))
    d1 = math.sqrt(float(np.mean((f / scale) ** 2)))
    h = 0.01 * d0 / d1 if d1 > 0 else 1e-6
    h = min(h, problem.t_max)

    ts = [t]
    ws = [y[0]]
    tail_t: list[float] = [t]
    tail_w: list[float] = [y[0]]
    steps = 0
    reason = "horizonReached"
    blew_up = False

    while t < problem.t_max:
        if steps >= controls.max_steps:
            raise SolverFailure(f"exceeded {controls.max_steps} steps at t = {t}")
        h = min(h, problem.t_max - t)
        if t + h == t:
            if y[0] > 100.0 * abs(w0) + 1.0 and y[1] > 0.0:
                blew_up = True
                reason = "thresholdAndStepCollapse"
                break
            raise SolverFailure(f"step size collapsed at t = {t} without growth")

        ks = np.empty((7, 2))
        ks[0] = f
        bad = False
        for i in range(1, 7):
            yi = y + h * (_DP_A[i] @ ks[:i])
            ki = rhs(t + _DP_C[i] * h, yi)
            if not np.all(np.isfinite(ki)):
                bad = True
                break
            ks[i] = ki
        if not bad:
            y5 = y + h * (_DP_B5 @ ks)
            y4 = y + h * (_DP_B4 @ ks)
            err_vec = y5 - y4
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
            err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
            bad = not (math.isfinite(err) and np.all(np.isfinite(y5)))
        if bad or err > 1.0:
            if h < controls.dt_min:
                if y[0] > controls.u_cap:
                    blew_up = True
                    reason = "thresholdAndStepCollapse"
                    break
                raise SolverFailure(
                    f"tolerance failure at t = {t}: step {h} below dt_min "
                    f"with W = {y[0]}")
            h *= 0.5 if bad else max(0.2, 0.9 * err ** -0.2)
            continue

        t += h
        y = y5
        f = ks[6]  # FSAL
        steps += 1
        h_used = h
        h *= min(5.0, max(0.2, 0.9 * err ** -0.2 if err > 0 else 5.0))

        if keep_trace:
            ts.append(t)
            ws.append(y[0])
        tail_t.append(t)
        tail_w.append(y[0])
        if len(tail_t) > controls.tail_points:
            tail_t.pop(0)
            tail_w.pop(0)

        if y[0] > controls.u_cap and h_used < controls.dt_min:
            blew_up = True
            reason = "thresholdAndStepCollapse"
            break

    T_hat = None
    fit_exponent = None
    if blew_up:
        T_hat, fit_exponent = _extrapolate_blowup(tail_t, tail_w, q)
    if keep_trace:
        t_arr = np.array(ts)
        w_arr = np.array(ws)
        log_u = np.log(np.maximum(np.abs(w_arr), 1e-300)) - alpha1 * t_arr
        signs = np.where(w_arr >= 0.0, 1.0, -1.0)
    else:
        t_arr = np.empty(0)
        log_u = np.empty(0)
        signs = np.empty(0)
    return BlowupEstimate(
        blew_up=blew_up, T_hat=T_hat, T_low=t, fit_exponent=fit_exponent,
        steps=steps, reason=reason, t_samples=t_arr, log_u_samples=log_u,
        sign_samples=signs,
    )


def _centered_slope(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares slope with mean-centered abscissa (well conditioned near
    a blow-up where the samples cluster); returns (slope, x_mean, y_mean)."""
    xm, ym = float(np.mean(x)), float(np.mean(y))
    dx = x - xm
    var = float(np.dot(dx, dx))
    slope = float(np.dot(dx, y - ym)) / var if var > 0 else 0.0
    return slope, xm, ym


def _extrapolate_blowup(tail_t, tail_w, q: float) -> tuple[float, Optional[float]]:
    t = np.array(tail_t)
    w = np.array(tail_w)
    good = w > 0
    t, w = t[good], w[good]
    if len(t) < 3:
        return float(t[-1]), None
    z = w ** (-(q - 1.0) / 2.0)
    slope, tm, zm = _centered_slope(t, z)
    if slope >= 0.0:
        return float(t[-1]), None
    T_hat = tm - zm / slope
    gap = T_hat - t
    ok = gap > 0
    if np.count_nonzero(ok) >= 3:
        s, _, _ = _centered_slope(np.log(gap[ok]), np.log(w[ok]))
        fit_exponent = -float(s)
    else:
        fit_exponent = None
    return float(T_hat), fit_exponent


def comparison_problem(params: ModelParams, frame_C: Optional[float] = None,
                       profile: str = "bump", t_max: float = 20.0,
                       npts: int = 513) -> OdeProblem:
    """Comparison ODE matching a model: data integrals seed U(0), U'(0).

    The anti-de Sitter support growth shifts the effective gamma rate by
    -n H (beta+1)(p-1); the frame constant defaults to the light-cylinder
    volume factor of the Holder step.
    """
    from .params import default_frame_constant, effective_rate
    if frame_C is None:
        frame_C = default_frame_constant(params)
    mass = profile_integral(profile, params.R, params.n, npts=npts)
    return OdeProblem(
        b=params.b, m2=params.m2, q=params.q, frame_C=frame_C,
        gamma_mu=params.mu, gamma_rate=effective_rate(params),
        gamma_power=params.kappa_poly,
        U0=params.epsilon * mass, U1=params.epsilon * mass,
        t_max=t_max,
    )


def _cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral on a uniform grid, quadratic through neighbors."""
    n = len(y)
    out = np.zeros(n)
    if n < 3:
        if n == 2:
            out[1] = 0.5 * h * (y[0] + y[1])
        return out
    # First interval from the quadratic through y0, y1, y2.
    out[1] = h / 12.0 * (5.0 * y[0] + 8.0 * y[1] - y[2])
    # Later intervals from the quadratic through y[i-2], y[i-1], y[i].
    increments = h / 12.0 * (-y[:-2] + 8.0 * y[1:-1] + 5.0 * y[2:])
    out[2:] = out[1] + np.cumsum(increments)
    return out


def duhamel_reconstruct(b: float, m2: float, U0: float, U1: float,
                        t: np.ndarray, forcing: np.ndarray) -> np.ndarray:
    """Average reconstructed from its forcing via the representation formula.

    ``forcing`` holds samples of gamma(tau) * (int |u|^p dx)^(beta+1) on the
    uniform grid ``t``; the result adds the exact linear part to the double
    time integral with the exponential kernels of the factorized operator.
    """
    t = np.asarray(t, dtype=float)
    forcing = np.asarray(forcing, dtype=float)
    if len(t) < 8:
        raise ValueError("need at least 8 samples for the reconstruction")
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-8, atol=1e-12):
        raise ValueError("forcing samples must sit on a uniform grid")
    roots = damping_roots(b, m2)
    if roots.kind is RootKind.COMPLEX_CONJUGATE:
        raise RegimeUnsupportedError("reconstruction requires b^2 >= 4 m2")
    a1, a2 = roots.alpha1, roots.alpha2
    inner = _cumulative_simpson(np.exp(a1 * t) * forcing, h)
    outer = _cumulative_simpson(np.exp((a2 - a1) * t) * inner, h)
    return linear_solution(b, m2, U0, U1, t) + np.exp(-a2 * t) * outer


def v0_lower_envelope(t: float, params: ModelParams, profile: str = "bump",
                      npts: int = 513) -> float:
    """Lower envelope for the weighted average V0 at time t.

    Evaluates the two regional bounds behind V0(t) >~ eps * exp(-H t): the
    exact propagated initial term V0(0) exp(-b t) lambda(t)^2 / lambda(0)^2
    (sharp near t = 0) and the envelope form of the source term with the
    calibrated lambda_0, Lambda_0 (dominant away from 0); returns their max.
    """
    if params.discriminant < -1e-12:
        raise RegimeUnsupportedError("V0 envelope requires b^2 >= 4 m2")
    c, H, b = params.c, params.H, params.b
    lam0_log = log_lambda(0.0, params)
    phi_weight = lambda r: phi_radial(params.n, r)

    data_phi = profile_integral(profile, params.R, params.n, weight=phi_weight, npts=npts)
    v0_at_0 = params.epsilon * math.exp(lam0_log) * data_phi

    term1 = v0_at_0 * math.exp(-b * t + 2.0 * log_lambda(t, params) - 2.0 * lam0_log)

    lam_deriv0 = lambda_time_derivative(0.0, params)
    weight_v0 = b * math.exp(lam0_log) - lam_deriv0
    source_strength = params.epsilon * (math.exp(lam0_log) + weight_v0) * data_phi
    lam_lo, lam_hi = lambda_envelope_constants(params)
    term2 = (source_strength * lam_lo ** 2 / (2.0 * c * lam_hi ** 2)
             * math.exp(-H * t)
             * -math.expm1(-(2.0 * c / H) * (math.exp(H * t) - 1.0)))
    return max(term1, term2)
