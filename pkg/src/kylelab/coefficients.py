"""Time-dependent coefficients of the equilibrium Ornstein-Uhlenbeck demand.

From the liquidity providers' point of view the total demand solves

    dY_t = sigma dB_t + sigma^2 (a(t) Y_t + b(t)) dt,

with a(t) either of the rational form -lam rho / (L + lam rho sigma^2 (1 - t))
(L = 1 in both insider models, L = 2 for competitive agents facing an uninformed
trader) or constant (market makers facing an uninformed trader).  Everything
needed for exact simulation, the exponential martingale of the market makers'
utility and the Doob h-transform drift of the insider lives here.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import NumericalDomain, SingularTime
from .model import Branch, ModelKind, ModelParams

SERIES_CUTOFF = 1e-6
QUAD_TOL = 1e-10


def excess_log(x):
    """x - log(1 + x), with a series branch near 0 where the difference cancels."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    tiny = np.where(small, x, 0.0)
    out = np.where(small, tiny * tiny * (0.5 - tiny / 3.0), safe - np.log1p(safe))
    return out[()] if out.ndim == 0 else out


def _log_over_sqrt_excess(x):
    # log(1 + x) / sqrt(x - log(1 + x)) * x / x, finite limit sqrt(2) at x = 0
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    tiny = np.where(small, x, 0.0)
    direct = np.log1p(safe) / np.sqrt(safe - np.log1p(safe))
    series = (1.0 - tiny / 2.0) / np.sqrt(0.5 - tiny / 3.0)
    out = np.where(small, series, direct)
    return out[()] if out.ndim == 0 else out


class CoefficientSet:
    """Coefficients (a, b) of the demand OU process and its Gaussian transition law.

    Subclasses provide closed forms; ``ou_moments(..., method="quad")`` recomputes
    the same moments by adaptive quadrature of a and b only.
    """

    sigma: float
    lam: float
    rho: float

    def a(self, t):
        raise NotImplementedError

    def b(self, t):
        raise NotImplementedError

    def A(self, t):
        raise NotImplementedError

    def growth(self, s, t):
        """exp(sigma^2 (A(t) - A(s)))."""
        raise NotImplementedError

    def shift(self, s, t):
        """int_s^t exp(sigma^2 (A(t) - A(r))) sigma^2 b(r) dr."""
        raise NotImplementedError

    def v2(self, s, t):
        """Conditional variance of Y_t given Y_s."""
        raise NotImplementedError

    def noise_cov(self, s, t):
        """Covariance of the OU innovation over [s, t] with sigma (B_t - B_s)."""
        raise NotImplementedError

    def ou_moments(self, s, t, y, method: str = "closed"):
        if method == "quad":
            return _quad_moments(self, s, t, y)
        return self.growth(s, t) * y + self.shift(s, t), self.v2(s, t)

    def bridge_moments(self, s, t, y, target):
        """Law of Y_t given Y_s = y and Y_1 = target (Gaussian conditioning)."""
        g1 = self.growth(s, t)
        m1 = g1 * y + self.shift(s, t)
        v1 = self.v2(s, t)
        e = self.growth(t, 1.0)
        c2 = self.shift(t, 1.0)
        v2 = self.v2(t, 1.0)
        total = e * e * v1 + v2
        weight = e * v1 / total
        mean = m1 + weight * (target - e * m1 - c2)
        return mean, v1 * v2 / total

    def bridge_score(self, t, y, target):
        """d/dy log p(t, y; 1, target): the h-transform drift per unit sigma^2."""
        if np.any(np.asarray(t) >= 1.0):
            raise SingularTime("bridge score is singular at t = 1")
        e = self.growth(t, 1.0)
        mean = e * y + self.shift(t, 1.0)
        return (target - mean) * e / self.v2(t, 1.0)

    def log_transition_density(self, s, t, y, y_next):
        mean, var = self.ou_moments(s, t, y)
        return -0.5 * (np.log(2.0 * np.pi * var) + (y_next - mean) ** 2 / var)


@dataclass(frozen=True)
class RationalCoefficients(CoefficientSet):
    """a(t) = -lam rho / (level + lam rho sigma^2 (1 - t)).

    ``sign`` = 0 gives b = 0; sign = (-1)**i selects the market makers' b_i
    (only defined for level = 1).
    """

    sigma: float
    lam: float
    rho: float
    level: float = 1.0
    sign: int = 0

    def __post_init__(self):
        if self.sign and self.level != 1.0:
            raise ValueError("branch-signed b is only defined for level = 1")

    @property
    def k(self) -> float:
        return self.lam * self.rho * self.sigma**2

    def _d(self, t):
        return self.level + self.k * (1.0 - np.asarray(t, dtype=float))

    def a(self, t):
        return -self.lam * self.rho / self._d(t)

    def A(self, t):
        t = np.asarray(t, dtype=float)
        if self.k == 0:
            return np.zeros_like(t)[()]
        return -np.log1p(self.k * t / self._d(t)) / self.sigma**2

    def growth(self, s, t):
        return self._d(t) / self._d(s)

    def v2(self, s, t):
        return self.sigma**2 * (np.asarray(t) - np.asarray(s)) * self._d(t) / self._d(s)

    def noise_cov(self, s, t):
        dt = np.asarray(t, dtype=float) - np.asarray(s, dtype=float)
        if self.k == 0:
            return self.sigma**2 * dt
        dd = self._d(t)
        return self.sigma**2 * dd * np.log1p(self.k * dt / dd) / self.k

    def b(self, t):
        if not self.sign or self.k == 0:
            return np.zeros_like(np.asarray(t, dtype=float))[()]
        x = self.k * (1.0 - np.asarray(t, dtype=float))
        if np.any(x < -1e-12):
            raise NumericalDomain("b(t) requested beyond t = 1")
        x = np.maximum(x, 0.0)
        return self.sign * 0.5 * np.sqrt(-self.a(t)) * _log_over_sqrt_excess(x)

    def alpha1(self, t):
        """Closed form sign * sqrt(-a(t) (x - log(1 + x))), x = lam rho sigma^2 (1 - t)."""
        if not self.sign or self.k == 0:
            return np.zeros_like(np.asarray(t, dtype=float))[()]
        x = self.k * (1.0 - np.asarray(t, dtype=float))
        radicand = -self.a(t) * excess_log(x)
        if np.any(radicand < -1e-14):
            raise NumericalDomain("negative square-root argument in alpha1")
        return self.sign * np.sqrt(np.maximum(radicand, 0.0))

    def shift(self, s, t):
        if not self.sign or self.k == 0:
            return np.zeros(np.broadcast(np.asarray(s), np.asarray(t)).shape)[()]
        return self._d(t) * (self.alpha1(s) - self.alpha1(t)) / (self.lam * self.rho)


@dataclass(frozen=True)
class ConstantCoefficients(CoefficientSet):
    """a(t) = -kappa, b(t) = b0 (market makers against an uninformed trader)."""

    sigma: float
    kappa: float
    b0: float = 0.0
    lam: float = 0.0
    rho: float = 0.0

    @property
    def theta(self) -> float:
        return self.sigma**2 * self.kappa

    def a(self, t):
        return np.full_like(np.asarray(t, dtype=float), -self.kappa)[()]

    def b(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.b0)[()]

    def A(self, t):
        return -self.kappa * np.asarray(t, dtype=float)

    def _phi1(self, dt):
        # (1 - exp(-theta dt)) / theta
        dt = np.asarray(dt, dtype=float)
        if self.theta == 0:
            return dt
        return -np.expm1(-self.theta * dt) / self.theta

    def growth(self, s, t):
        return np.exp(-self.theta * (np.asarray(t) - np.asarray(s)))

    def shift(self, s, t):
        return self.sigma**2 * self.b0 * self._phi1(np.asarray(t) - np.asarray(s))

    def v2(self, s, t):
        dt = np.asarray(t, dtype=float) - np.asarray(s, dtype=float)
        if self.theta == 0:
            return self.sigma**2 * dt
        return self.sigma**2 * (-np.expm1(-2.0 * self.theta * dt)) / (2.0 * self.theta)

    def noise_cov(self, s, t):
        return self.sigma**2 * self._phi1(np.asarray(t) - np.asarray(s))


def _quad_moments(cs: CoefficientSet, s: float, t: float, y: float):
    """Transition mean and variance from quadrature of a and b alone."""
    s2 = cs.sigma**2

    def big_a(u):
        return integrate.quad(lambda r: float(cs.a(r)), 0.0, u, epsabs=QUAD_TOL, epsrel=QUAD_TOL)[0]

    at = big_a(t)
    growth = math.exp(s2 * (at - big_a(s)))
    shift = integrate.quad(
        lambda r: math.exp(s2 * (at - big_a(r))) * s2 * float(cs.b(r)), s, t, epsabs=QUAD_TOL, epsrel=QUAD_TOL
    )[0]
    var = integrate.quad(
        lambda r: math.exp(2.0 * s2 * (at - big_a(r))) * s2, s, t, epsabs=QUAD_TOL, epsrel=QUAD_TOL
    )[0]
    return growth * y + shift, var


# -- Appendix-style exponents of the market makers' utility martingale ---------------


def alpha_coeffs(t, cs: RationalCoefficients, method: str = "closed"):
    """(alpha0, alpha1, alpha2) with M_t = exp(alpha0 + alpha1 Y_t + alpha2 Y_t^2).

    ``method="integral"`` evaluates the defining integrals by quadrature instead
    of the square-root closed form of alpha1 and the identity alpha2 = -a / 2.
    """
    lr = cs.lam * cs.rho
    s2 = cs.sigma**2
    alpha0 = -lr * s2 * np.asarray(t, dtype=float) / 2.0
    if method == "closed":
        return alpha0, cs.alpha1(t), alpha2_from_lemma(t, cs)
    if method != "integral":
        raise ValueError(f"unknown method {method!r}")
    if lr == 0:
        zero = np.zeros_like(np.asarray(t, dtype=float))[()]
        return alpha0, zero, zero
    a1 = float(cs.A(1.0))

    def alpha1_int(u):
        val = integrate.quad(
            lambda r: math.exp(-s2 * float(cs.A(r))) * float(cs.b(r)), u, 1.0, epsabs=1e-13, epsrel=1e-12
        )[0]
        return lr * s2 * math.exp(s2 * a1) * val

    def alpha2_int(u):
        val = integrate.quad(
            lambda r: math.exp(2.0 * s2 * (a1 - float(cs.A(r)))), u, 1.0, epsabs=1e-13, epsrel=1e-12
        )[0]
        return lr * math.exp(s2 * (a1 - float(cs.A(u)))) + 0.5 * lr * lr * s2 * val - lr / 2.0

    ts = np.atleast_1d(np.asarray(t, dtype=float))
    al1 = np.array([alpha1_int(u) for u in ts])
    al2 = np.array([alpha2_int(u) for u in ts])
    if np.ndim(t) == 0:
        return alpha0, float(al1[0]), float(al2[0])
    return alpha0, al1, al2


def alpha2_from_lemma(t, cs: RationalCoefficients):
    """lam rho e^{s2 (A(1)-A(t))} + (lam rho)^2 s2 / 2 int_t^1 e^{2 s2 (A(1)-A(u))} du - lam rho / 2,
    with both exponentials in closed form (requires level = 1)."""
    lr = cs.lam * cs.rho
    if lr == 0:
        return np.zeros_like(np.asarray(t, dtype=float))[()]
    phi = 1.0 / cs._d(t)  # e^{s2 (A(1) - A(t))} when level = 1
    integral = (1.0 - phi) / cs.k
    return lr * phi + 0.5 * lr * lr * cs.sigma**2 * integral - lr / 2.0


def alpha0_boundary(cs: RationalCoefficients) -> float:
    """Terminal value alpha0(1) = -lam rho sigma^2 / 2 fixed by the martingale lemma."""
    return -cs.lam * cs.rho * cs.sigma**2 / 2.0


# -- Convenience wrappers mirroring the published formulas -------------------------


def a(t, lam: float, params: ModelParams):
    return RationalCoefficients(params.sigma, lam, params.rho).a(t)


def A(t, lam: float, params: ModelParams):
    return RationalCoefficients(params.sigma, lam, params.rho).A(t)


def b_mm_insider(t, lam: float, params: ModelParams, branch: Branch | int = 1):
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    return RationalCoefficients(params.sigma, lam, params.rho, sign=branch.sign).b(t)


def ou_moments(s, t, y, cs: CoefficientSet, method: str = "closed"):
    return cs.ou_moments(s, t, y, method=method)


def bridge_score(t, y, target, cs: CoefficientSet):
    return cs.bridge_score(t, y, target)


def tempered(cs: CoefficientSet, tau: float) -> CoefficientSet:
    """Same family with the mean reversion scaled by tau (importance-sampling proposals)."""
    if isinstance(cs, RationalCoefficients):
        return dataclasses.replace(cs, lam=cs.lam * tau)
    if isinstance(cs, ConstantCoefficients):
        return dataclasses.replace(cs, kappa=cs.kappa * tau)
    raise TypeError(f"cannot temper {type(cs).__name__}")


def market_coefficients(params: ModelParams, kind, quote, branch: Branch | int = 1) -> CoefficientSet:
    """Coefficients of the demand process as seen by the liquidity providers."""
    kind = ModelKind.parse(kind)
    branch = branch if isinstance(branch, Branch) else Branch(branch)
    s, r = params.sigma, params.rho
    lam = quote.lambda_pre
    if kind is ModelKind.KYLE:
        return RationalCoefficients(s, lam, 0.0)
    if kind is ModelKind.CA_INSIDER:
        return RationalCoefficients(s, lam, r)
    if kind is ModelKind.MM_INSIDER:
        return RationalCoefficients(s, lam, r, sign=branch.sign)
    if kind is ModelKind.CA_STRATEGIC:
        return RationalCoefficients(s, lam, r, level=2.0)
    if kind is ModelKind.MM_STRATEGIC:
        return ConstantCoefficients(s, kappa=lam * r / 2.0, b0=-r * (params.mu - quote.phi) / 2.0, lam=lam, rho=r)
    raise ValueError(f"unsupported kind {kind}")
