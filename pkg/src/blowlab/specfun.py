"""Special functions for the anti-de Sitter construction.

Modified Bessel functions I_nu, K_nu of arbitrary real order nu >= 0, the
radial Laplace eigenfunction Phi (Delta Phi = Phi), and the time multiplier
lambda(t) = exp(b t / 2) * K_nu((c/H) exp(H t)) together with its uniform
envelope constants.

The Bessel evaluator splits by argument:

* z <= 2: power series for I_nu; Temme's series for K_mu, K_{mu+1} at the
  reduced order |mu| <= 1/2, then upward recurrence.
* 2 < z <= 20: Steed's continued fraction (CF2) for the K pair at the
  reduced order, upward recurrence, and I_nu recovered from the CF1 ratio
  I_{nu+1}/I_nu through the Wronskian I_nu K_{nu+1} + I_{nu+1} K_nu = 1/z.
* z > 20: large-argument asymptotic series for the K pair at the reduced
  order mu in [0, 1) (where the series converges well past double
  precision), then the same recurrence / CF1 / Wronskian route.

K values are carried scaled by exp(+z) and I values by exp(-z) with a
separate log offset, so the log-scaled mode stays finite for z up to 1e4
and order ladders that overflow the linear range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .params import ModelParams, RegimeUnsupportedError, damping_roots, sphere_area

_EPS = 2.2e-16
_MAX_ITER = 10000

# 1/Gamma(1+x) = sum a_k x^k; enough terms for the |mu| -> 0 limit below.
_EULER_GAMMA = 0.5772156649015328606
_ZETA3 = 1.2020569031595942854
_A3 = (_EULER_GAMMA ** 3) / 6.0 - _EULER_GAMMA * math.pi ** 2 / 12.0 + _ZETA3 / 3.0


@dataclass(frozen=True)
class BesselEval:
    order: float
    argument: float
    value_i: float
    value_k: float
    log_scaled: bool


@dataclass(frozen=True)
class LambdaProfile:
    t: float
    log_value: float
    log_lower_env: float
    log_upper_env: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    @property
    def lower_env(self) -> float:
        return math.exp(self.log_lower_env)

    @property
    def upper_env(self) -> float:
        return math.exp(self.log_upper_env)


def _gam1(mu: float) -> float:
    """(1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), continuous through mu = 0."""
    if abs(mu) < 1e-4:
        return -_EULER_GAMMA - _A3 * mu * mu
    return (1.0 / math.gamma(1.0 - mu) - 1.0 / math.gamma(1.0 + mu)) / (2.0 * mu)


def _temme_k_pair(mu: float, z: float) -> tuple[float, float]:
    """K_mu(z) and K_{mu+1}(z) for |mu| <= 1/2 and 0 < z <= 2 (Temme's series)."""
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    gam1 = _gam1(mu)
    gam2 = 0.5 * (gammi + gampl)

    pimu = math.pi * mu
    fact = pimu / math.sin(pimu) if abs(pimu) > _EPS else 1.0
    d = -math.log(z / 2.0)
    e = mu * d
    fact2 = math.sinh(e) / e if abs(e) > _EPS else 1.0
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    ee = math.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    total1 = p
    c = 1.0
    d2 = 0.25 * z * z
    mu2 = mu * mu
    for i in range(1, _MAX_ITER):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d2 / i
        p /= (i - mu)
        q /= (i + mu)
        delta = c * ff
        total += delta
        delta1 = c * (p - i * ff)
        total1 += delta1
        if abs(delta) < abs(total) * _EPS:
            break
    return total, total1 * (2.0 / z)


def _steed_k_pair_scaled(mu: float, z: float) -> tuple[float, float]:
    """exp(z)-scaled K_mu(z), K_{mu+1}(z) for |mu| <= 1/2 and z >= 2 (Steed's CF2)."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAX_ITER):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    k_mu = math.sqrt(math.pi / (2.0 * z)) / s
    k_mu1 = k_mu * (mu + z + 0.5 - h) / z
    return k_mu, k_mu1


def _asymptotic_k_pair_scaled(mu: float, z: float) -> tuple[float, float]:
    """exp(z)-scaled K_mu(z), K_{mu+1}(z) via the large-argument series.

    Restricted to 0 <= mu <= 1 where the series reaches machine precision
    for z >= 20 long before its divergent tail sets in.
    """
    def series(nu: float) -> float:
        total = term = 1.0
        fournu2 = 4.0 * nu * nu
        for k in range(1, 60):
            factor = (fournu2 - (2.0 * k - 1.0) ** 2) / (8.0 * k * z)
            new = term * factor
            if abs(new) >= abs(term):
                break
            term = new
            total += term
            if abs(term) < _EPS * abs(total):
                break
        return total

    front = math.sqrt(math.pi / (2.0 * z))
    return front * series(mu), front * series(mu + 1.0)


def _cf1_ratio(nu: float, z: float) -> float:
    """I_{nu+1}(z) / I_nu(z) by the modified Lentz algorithm."""
    tiny = 1e-300
    f = tiny
    c = f
    d = 0.0
    for j in range(1, _MAX_ITER):
        bj = 2.0 * (nu + j) / z
        d = bj + d
        if d == 0.0:
            d = tiny
        c = bj + 1.0 / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return f


def _recur_k_up(k_lo: float, k_hi: float, mu: float, steps: int, z: float
                ) -> tuple[float, float, float]:
    """Upward order recurrence with renormalization; returns pair and log offset."""
    offset = 0.0
    for j in range(1, steps + 1):
        k_lo, k_hi = k_hi, k_lo + (2.0 * (mu + j) / z) * k_hi
        if k_hi > 1e250:
            k_lo *= 1e-250
            k_hi *= 1e-250
            offset += 250.0 * math.log(10.0)
    return k_lo, k_hi, offset


def _log_i_series(nu: float, z: float) -> float:
    """log I_nu(z) by the ascending power series (efficient for z <= 2)."""
    total = term = 1.0
    quarter_z2 = 0.25 * z * z
    for k in range(1, _MAX_ITER):
        term *= quarter_z2 / (k * (nu + k))
        total += term
        if term < _EPS * total:
            break
    return nu * math.log(z / 2.0) - math.lgamma(nu + 1.0) + math.log(total)


def bessel_ik(nu: float, z: float, log_scaled: bool = False) -> BesselEval:
    """Modified Bessel functions of the first and second kind, real order.

    Parameters
    ----------
    nu : float
        Order, must be >= 0.
    z : float
        Argument, must be > 0.
    log_scaled : bool
        When True the returned fields hold log I_nu(z) and log K_nu(z),
        finite far beyond the overflow/underflow range of the plain values.
    """
    if nu < 0.0:
        raise ValueError(f"order must be >= 0, got {nu}")
    if z <= 0.0:
        raise ValueError(f"argument must be > 0, got {z}")

    if z <= 2.0:
        n_int = int(math.floor(nu + 0.5))
        mu = nu - n_int
        k_mu, k_mu1 = _temme_k_pair(mu, z)
        scale = z  # carry K scaled by exp(z); harmless for z <= 2
        k_mu *= math.exp(scale)
        k_mu1 *= math.exp(scale)
        k_nu, _k_next, offset = _recur_k_up(k_mu, k_mu1, mu, n_int, z)
        log_k = math.log(k_nu) + offset - z
        log_i = _log_i_series(nu, z)
    else:
        n_int = int(math.floor(nu))
        mu = nu - n_int
        if z <= 20.0:
            k_mu, k_mu1 = _steed_k_pair_scaled(mu, z)
        else:
            k_mu, k_mu1 = _asymptotic_k_pair_scaled(mu, z)
        k_nu, k_nu1, offset = _recur_k_up(k_mu, k_mu1, mu, n_int, z)
        log_k = math.log(k_nu) + offset - z
        ratio = _cf1_ratio(nu, z)
        # Wronskian I_nu K_{nu+1} + I_{nu+1} K_nu = 1/z with I_{nu+1} = ratio * I_nu.
        log_i = -math.log(z) - math.log(k_nu1 + ratio * k_nu) - offset + z

    if log_scaled:
        return BesselEval(nu, z, log_i, log_k, True)
    return BesselEval(nu, z, math.exp(log_i), math.exp(log_k), False)


def bessel_k_derivative(nu: float, z: float) -> float:
    """K_nu'(z) from the recurrence K_nu' = -K_{nu+1} + (nu/z) K_nu."""
    k_nu = bessel_ik(nu, z).value_k
    k_nu1 = bessel_ik(nu + 1.0, z).value_k
    return -k_nu1 + (nu / z) * k_nu


def bessel_i_derivative(nu: float, z: float) -> float:
    """I_nu'(z) from the recurrence I_nu' = I_{nu+1} + (nu/z) I_nu."""
    i_nu = bessel_ik(nu, z).value_i
    i_nu1 = bessel_ik(nu + 1.0, z).value_i
    return i_nu1 + (nu / z) * i_nu


def phi_radial(n: int, rho: float, log_scaled: bool = False) -> float:
    """Laplace eigenfunction Phi at radius rho: Delta Phi = Phi, Phi > 0.

    n = 1 uses the closed form exp(rho) + exp(-rho); n >= 2 reduces the
    sphere integral of exp(x . omega) to a modified Bessel function:
    Phi(rho) = (2 pi)^{n/2} rho^{1 - n/2} I_{n/2 - 1}(rho).
    """
    if rho < 0.0:
        raise ValueError(f"radius must be >= 0, got {rho}")
    if n == 1:
        log_phi = rho + math.log1p(math.exp(-2.0 * rho))
    elif rho < 1e-6:
        # Series limit Phi(0) = |S^{n-1}|, next term rho^2 / (2n).
        value = sphere_area(n) * (1.0 + rho * rho / (2.0 * n))
        log_phi = math.log(value)
    else:
        log_i = bessel_ik(n / 2.0 - 1.0, rho, log_scaled=True).value_i
        log_phi = (n / 2.0) * math.log(2.0 * math.pi) + (1.0 - n / 2.0) * math.log(rho) + log_i
    return log_phi if log_scaled else math.exp(log_phi)


def bessel_order(params: ModelParams) -> float:
    """Order nu = sqrt(b^2 - 4 m2) / (2 H) of the time-multiplier equation."""
    if params.discriminant < 0.0:
        raise RegimeUnsupportedError("lambda multiplier needs b^2 >= 4 m2")
    roots = damping_roots(params.b, params.m2)
    return roots.spread / (2.0 * params.H)


def log_lambda(t: float, params: ModelParams) -> float:
    """log lambda(t) with lambda(t) = exp(b t / 2) K_nu((c/H) exp(H t))."""
    nu = bessel_order(params)
    arg = (params.c / params.H) * math.exp(params.H * t)
    log_k = bessel_ik(nu, arg, log_scaled=True).value_k
    return 0.5 * params.b * t + log_k


def lambda_time_derivative(t: float, params: ModelParams) -> float:
    """lambda'(t) through the K recurrence, in linear scale.

    lambda' = (b + sqrt(b^2 - 4 m2)) / 2 * lambda
              - c exp((b/2 + H) t) K_{nu+1}((c/H) exp(H t)).
    """
    nu = bessel_order(params)
    roots = damping_roots(params.b, params.m2)
    arg = (params.c / params.H) * math.exp(params.H * t)
    lam = math.exp(log_lambda(t, params))
    log_k1 = bessel_ik(nu + 1.0, arg, log_scaled=True).value_k
    term = params.c * math.exp((0.5 * params.b + params.H) * t + log_k1)
    return 0.5 * (params.b + roots.spread) * lam - term


def _log_envelope_shape(t: float, params: ModelParams) -> float:
    return 0.5 * (params.b - params.H) * t - (params.c / params.H) * math.exp(params.H * t)


@lru_cache(maxsize=64)
def _calibrate_lambda(c: float, H: float, b: float, m2: float,
                      t_max: float = 6.0, n_grid: int = 512) -> tuple[float, float]:
    """Envelope constants (log lambda_0, log Lambda_0) on a [0, t_max] grid."""
    params = ModelParams(n=1, c=c, H=H, b=b, m2=m2)
    lo = math.inf
    hi = -math.inf
    for i in range(n_grid):
        t = t_max * i / (n_grid - 1)
        diff = log_lambda(t, params) - _log_envelope_shape(t, params)
        lo = min(lo, diff)
        hi = max(hi, diff)
    return lo, hi


def lambda_envelope_constants(params: ModelParams) -> tuple[float, float]:
    """Calibrated (lambda_0, Lambda_0) bracketing lambda between its envelopes."""
    log_lo, log_hi = _calibrate_lambda(params.c, params.H, params.b, params.m2)
    return math.exp(log_lo), math.exp(log_hi)


def lambda_multiplier(t: float, params: ModelParams) -> LambdaProfile:
    """lambda(t) in log scale together with its calibrated envelopes."""
    if t < 0.0:
        raise ValueError(f"time must be >= 0, got {t}")
    log_lo, log_hi = _calibrate_lambda(params.c, params.H, params.b, params.m2)
    shape = _log_envelope_shape(t, params)
    return LambdaProfile(
        t=t,
        log_value=log_lambda(t, params),
        log_lower_env=log_lo + shape,
        log_upper_env=log_hi + shape,
    )


def lambda_ode_residual(t: float, params: ModelParams) -> float:
    """Relative residual of lambda'' - b lambda' + (m2 - c^2 e^{2Ht}) lambda = 0.

    Derivatives by 4th-order central differences with a step tied to the
    local frequency scale c * exp(H t); lambda extends smoothly to t < 0 so
    the stencil never needs clamping.
    """
    scale = max(1.0, params.c * math.exp(params.H * t))
    h = 0.015 / scale
    lam = [math.exp(log_lambda(t + (k - 2) * h, params)) for k in range(5)]
    d1 = (-lam[4] + 8.0 * lam[3] - 8.0 * lam[1] + lam[0]) / (12.0 * h)
    d2 = (-lam[4] + 16.0 * lam[3] - 30.0 * lam[2] + 16.0 * lam[1] - lam[0]) / (12.0 * h * h)
    coeff = params.m2 - (params.c * math.exp(params.H * t)) ** 2
    num = abs(d2 - params.b * d1 + coeff * lam[2])
    den = max(abs(d2), abs(params.b * d1), abs(coeff * lam[2]))
    return num / den if den > 0.0 else num


def psi_lp_dual_norm_bound(t: float, params: ModelParams) -> float:
    """Shape of the dual-norm bound for Psi = lambda Phi on the light cone.

    exp((b - H) t / 2) * (R + (c/H)(exp(H t) - 1))^{(n-1)(1/2 - 1/p)}, up to
    the constant the estimate leaves unspecified; used for ratio tests only.
    """
    if params.p <= 1.0:
        raise ValueError("p must be > 1")
    radius = params.R + (params.c / params.H) * (math.exp(params.H * t) - 1.0)
    exponent = (params.n - 1.0) * (0.5 - 1.0 / params.p)
    return math.exp(0.5 * (params.b - params.H) * t) * radius ** exponent
