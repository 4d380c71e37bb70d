"""Model parameters and elementary derived quantities.

A model is the Cauchy problem for a semilinear wave equation with damping b,
mass-squared m2, propagation speed c*exp(-H*t) (de Sitter) or c*exp(+H*t)
(anti-de Sitter), and a nonlocal forcing term

    gamma(t) * (||u(t)||_p^p)^beta * |u|^p,
    gamma(t) = mu * exp(rate * t) * (1 + t)^power.

Everything downstream (regime classification, iteration replays, solvers)
consumes the immutable ``ModelParams`` tuple defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class Spacetime(str, Enum):
    DE_SITTER = "deSitter"
    ANTI_DE_SITTER = "antiDeSitter"


class RootKind(str, Enum):
    DISTINCT_REAL = "distinctReal"
    DOUBLE_ROOT = "doubleRoot"
    COMPLEX_CONJUGATE = "complexConjugate"


class RegimeUnsupportedError(ValueError):
    """Raised when an operation is asked about a regime it does not cover."""


@dataclass(frozen=True)
class ModelParams:
    """Full parameter tuple of the Cauchy problem and its nonlinearity.

    ``r_exp`` and ``kappa_poly`` are the exponential rate and polynomial
    power of the time factor gamma(t); ``epsilon`` scales the initial data,
    supported in the ball of radius ``R``.
    """

    n: int
    c: float = 1.0
    H: float = 1.0
    b: float = 0.0
    m2: float = 0.0
    beta: float = 0.0
    p: float = 2.0
    mu: float = 1.0
    r_exp: float = 0.0
    kappa_poly: float = 0.0
    spacetime: Spacetime = Spacetime.DE_SITTER
    R: float = 1.0
    epsilon: float = 0.1

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise ValueError(f"space dimension must be a positive integer, got {self.n}")
        for name, value, low in (
            ("c", self.c, 0.0),
            ("H", self.H, 0.0),
            ("mu", self.mu, 0.0),
            ("R", self.R, 0.0),
            ("epsilon", self.epsilon, 0.0),
        ):
            if not value > low:
                raise ValueError(f"{name} must be > {low}, got {value}")
        if self.b < 0:
            raise ValueError(f"b must be >= 0, got {self.b}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not self.p > 1:
            raise ValueError(f"p must be > 1, got {self.p}")
        object.__setattr__(self, "spacetime", Spacetime(self.spacetime))

    @property
    def q(self) -> float:
        """Combined nonlinear power (beta + 1) * p; always > 1."""
        return (self.beta + 1.0) * self.p

    @property
    def discriminant(self) -> float:
        return self.b * self.b - 4.0 * self.m2

    def with_epsilon(self, epsilon: float) -> "ModelParams":
        return replace(self, epsilon=epsilon)

    def speed(self, t: float) -> float:
        """Propagation speed at time t."""
        sign = -1.0 if self.spacetime is Spacetime.DE_SITTER else 1.0
        return self.c * math.exp(sign * self.H * t)

    def cone_amplitude(self, t: float) -> float:
        """Integrated speed: radius gained by the light cone up to time t."""
        if self.spacetime is Spacetime.DE_SITTER:
            return (self.c / self.H) * (1.0 - math.exp(-self.H * t))
        return (self.c / self.H) * (math.exp(self.H * t) - 1.0)

    def log_gamma(self, t: float) -> float:
        """log of the time factor gamma(t); kept in log form to survive large rate*t."""
        return math.log(self.mu) + self.r_exp * t + self.kappa_poly * math.log1p(t)

    def gamma(self, t: float) -> float:
        return math.exp(self.log_gamma(t))


@dataclass(frozen=True)
class DampingRoots:
    """Roots of alpha^2 - b*alpha + m2 = 0, ordered alpha1 <= alpha2 when real.

    For complex conjugate roots the stored values are the real part (alpha1)
    and the imaginary part magnitude (alpha2 slot unused, see ``omega``).
    """

    alpha1: float
    alpha2: float
    discriminant: float
    kind: RootKind

    @property
    def spread(self) -> float:
        """alpha2 - alpha1 = sqrt(discriminant) in the real cases."""
        return self.alpha2 - self.alpha1

    @property
    def omega(self) -> float:
        """Oscillation frequency sqrt(m2 - b^2/4) in the complex case."""
        if self.kind is not RootKind.COMPLEX_CONJUGATE:
            return 0.0
        return math.sqrt(-self.discriminant) / 2.0


def damping_roots(b: float, m2: float, balanced_tol: float = 1e-12,
                  force_balanced: bool = False) -> DampingRoots:
    """Solve alpha^2 - b*alpha + m2 = 0.

    The double-root case is detected with absolute tolerance ``balanced_tol``
    on the discriminant b^2 - 4*m2 (floating-point inputs rarely hit zero
    exactly); ``force_balanced`` bypasses the tolerance test.
    """
    if b < 0:
        raise ValueError(f"b must be >= 0, got {b}")
    disc = b * b - 4.0 * m2
    if force_balanced or abs(disc) <= balanced_tol:
        half = b / 2.0
        return DampingRoots(half, half, disc, RootKind.DOUBLE_ROOT)
    if disc > 0:
        root = math.sqrt(disc)
        # Stable quadratic formula: compute the larger-magnitude root first.
        alpha2 = (b + root) / 2.0
        alpha1 = m2 / alpha2 if alpha2 != 0.0 else (b - root) / 2.0
        return DampingRoots(alpha1, alpha2, disc, RootKind.DISTINCT_REAL)
    return DampingRoots(b / 2.0, b / 2.0, disc, RootKind.COMPLEX_CONJUGATE)


def sphere_area(n: int) -> float:
    """Surface measure of the unit (n-1)-sphere; 2 for n = 1 (two points)."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def ball_volume(n: int, radius: float) -> float:
    return sphere_area(n) * radius ** n / n


def default_frame_constant(params: ModelParams) -> float:
    """Volume constant of the Holder step bounding ||u||_p^p from below by U^p.

    The support of u stays inside the ball of radius R + c/H (de Sitter) or
    (R + c/H) * exp(H t) (anti-de Sitter, with the exponential factor moved
    into the effective rate of gamma).
    """
    radius = params.R + params.c / params.H
    meas = ball_volume(params.n, radius)
    return meas ** (-(params.p - 1.0) * (params.beta + 1.0))


def effective_rate(params: ModelParams) -> float:
    """Exponential rate seen by the iteration frame's inner integral.

    In anti-de Sitter the Holder step pays an extra exp(-n*H*(beta+1)*(p-1)*t)
    from the growing support, shifting the rate of gamma accordingly.
    """
    if params.spacetime is Spacetime.DE_SITTER:
        return params.r_exp
    return params.r_exp - params.n * params.H * (params.beta + 1.0) * (params.p - 1.0)
