"""Laplace exponent of the auxiliary process and its boundary equations.

The stationary COGARCH theory runs through the function

    psi(u, phi) = -eta*u + integral((1 + phi*y)^u - 1) nu_S(dy),

finite exactly when E[S_1^u] is finite.  Everything here reduces to
integrals against the subordinator Levy measure nu_S, evaluated per driver:

* compound Poisson with standard normal jumps: Gauss-Hermite quadrature,
  node count doubled until the value is stable to ~1e-11 relative;
* compound Poisson with a custom jump law: a Gauss rule matched to the
  supplied raw moments (exact through polynomial degree 7, a documented
  approximation for non-integer u);
* variance gamma: adaptive quadrature against the closed-form Levy density.

For u in {1, 2} the exact closed forms in (E[S_1], Var[S_1]) override
quadrature.  Root finding is plain bisection after geometric bracket
expansion; the bracketed functions are monotone or convex where roots are
sought.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import roots_hermite

from .levy import CompoundPoisson, JumpDistribution, LevyModel, VarianceGamma, s_moments

__all__ = [
    "ExponentContext",
    "NoRootError",
    "DivergentIntegralError",
    "psi",
    "log_moment",
    "phi_max",
    "kappa_of_phi",
    "phi_max_kappa",
    "h_cross",
    "h_kappa",
]

_GH_LEVELS = (64, 128, 256, 512, 1024)
_REFINE_RTOL = 1e-11
_ROOT_XTOL_PHI = 1e-10
_ROOT_XTOL_KAPPA = 1e-12
_BRACKET_CAP = 2.0 ** 60


class NoRootError(ValueError):
    """No positive root exists: the requested regime is nonstationary."""


class DivergentIntegralError(ArithmeticError):
    """Integral against nu_S fails to converge (E[S_1^u] infinite)."""


@dataclass(frozen=True)
class ExponentContext:
    """Driver model plus the mean-reversion rate eta > 0."""

    model: LevyModel
    eta: float

    def __post_init__(self) -> None:
        if not self.eta > 0.0:
            raise ValueError(f"eta must be > 0, got {self.eta}")

    @property
    def s_mean(self) -> float:
        return s_moments(self.model)[0]

    @property
    def s_var(self) -> float:
        return s_moments(self.model)[1]


@lru_cache(maxsize=None)
def _hermite_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    # nodes/weights for weight exp(-x^2); y = sqrt(2) x maps to N(0,1)
    x, w = roots_hermite(n)
    return math.sqrt(2.0) * x, w / math.sqrt(math.pi)


@lru_cache(maxsize=None)
def _moment_rule(moments: tuple[float, ...]) -> tuple[np.ndarray, np.ndarray]:
    """Gauss rule matched to raw moments m_1..m_8 (Golub-Welsch via the
    Hankel moment matrix).  Exact for polynomials up to degree 7."""
    m = np.array((1.0,) + moments, dtype=float)
    n = (len(m) - 1) // 2  # 4 nodes from 9 moments
    hankel = np.array([[m[i + j] for j in range(n + 1)] for i in range(n + 1)])
    r = np.linalg.cholesky(hankel).T
    alpha = np.empty(n)
    beta = np.empty(n - 1)
    for k in range(n):
        alpha[k] = r[k, k + 1] / r[k, k] - (r[k - 1, k] / r[k - 1, k - 1] if k else 0.0)
        if k:
            beta[k - 1] = r[k, k] / r[k - 1, k - 1]
    jacobi = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
    nodes, vecs = np.linalg.eigh(jacobi)
    weights = m[0] * vecs[0, :] ** 2
    return nodes, weights


def _refined(values: list[float]) -> float:
    """Pick the converged value from a refinement sequence; detect blow-up."""
    grew = 0
    for prev, cur in zip(values, values[1:]):
        if abs(cur - prev) <= _REFINE_RTOL * (1.0 + abs(cur)):
            return cur
        grew = grew + 1 if abs(cur) > 2.0 * abs(prev) + 1.0 else 0
        if grew >= 3:
            raise DivergentIntegralError("integral grows without bound under refinement")
    return values[-1]


def _s_integral(model: LevyModel, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """integral of f against nu_S, i.e. integral of f(y^2) against nu_L.

    f must vanish at 0 and grow at most polynomially where E[S_1^u] is
    finite; both shipped drivers then give convergent integrals.
    """
    if isinstance(model, CompoundPoisson):
        jumps: JumpDistribution = model.jumps
        if jumps is not None and jumps.name == "standard_normal":
            vals = []
            for n in _GH_LEVELS:
                y, w = _hermite_rule(n)
                vals.append(model.rate * float(np.sum(w * f(y * y))))
            return _refined(vals)
        nodes, weights = _moment_rule(jumps.raw_moments)
        return model.rate * float(np.sum(weights * f(nodes * nodes)))

    if isinstance(model, VarianceGamma):
        # nu_L(dy) = (1/(nu |y|)) exp(-c |y|) dy with c = sqrt(2/nu)/sigma
        c = math.sqrt(2.0 / model.nu) / model.sigma
        scale = 2.0 / model.nu

        def integrand(y: float) -> float:
            return scale * f(np.array(y * y)) / y * math.exp(-c * y)

        val, err = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
        if not math.isfinite(val) or err > 1e-6 * (1.0 + abs(val)):
            raise DivergentIntegralError(
                f"quadrature against the VG Levy density did not converge (err={err})"
            )
        return val

    raise TypeError(f"unsupported Levy model: {model!r}")


def psi(ctx: ExponentContext, u: float, phi: float) -> float:
    """Laplace exponent value psi(u, phi); E[exp(-u X_t)] = exp(t psi(u, phi)).

    Closed forms for u in {1, 2}:

        psi(1, phi) = phi*E[S_1] - eta
        psi(2, phi) = 2*phi*E[S_1] + phi^2*Var[S_1] - 2*eta

    Raises DivergentIntegralError when E[S_1^u] is infinite.
    """
    if u < 0.0:
        raise ValueError(f"u must be >= 0, got {u}")
    if phi < 0.0:
        raise ValueError(f"phi must be >= 0, got {phi}")
    if phi == 0.0 or u == 0.0:
        return -ctx.eta * u
    m1, m2 = s_moments(ctx.model)
    if u == 1.0:
        return phi * m1 - ctx.eta
    if u == 2.0:
        return 2.0 * phi * m1 + phi * phi * m2 - 2.0 * ctx.eta
    integral = _s_integral(ctx.model, lambda y: (1.0 + phi * y) ** u - 1.0)
    return -ctx.eta * u + integral


@lru_cache(maxsize=4096)
def _log_moment_cached(model, phi: float) -> float:
    return _s_integral(model, lambda y: np.log1p(phi * y))


def log_moment(ctx: ExponentContext, phi: float) -> float:
    """integral of log(1 + phi*y) against nu_S; the stationarity condition
    compares this against eta.  Always finite when E[S_1] is (log(1+x) < x)."""
    if phi < 0.0:
        raise ValueError(f"phi must be >= 0, got {phi}")
    if phi == 0.0:
        return 0.0
    return _log_moment_cached(ctx.model, phi)


def _bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float) -> float:
    # caller guarantees f(lo) < 0 <= f(hi)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def phi_max(ctx: ExponentContext) -> float:
    """Upper boundary of the stationarity interval: the unique root of
    log_moment(phi) = eta.  log_moment is continuous, strictly increasing
    and unbounded in phi, so bracketing plus bisection suffices."""
    g = lambda p: log_moment(ctx, p) - ctx.eta
    hi = 1.0
    while g(hi) < 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:  # pragma: no cover - defensive
            raise NoRootError("failed to bracket the stationarity boundary")
    return _bisect(g, 0.0, hi, _ROOT_XTOL_PHI)


def kappa_of_phi(ctx: ExponentContext, phi: float) -> float:
    """The unique kappa > 0 with psi(kappa, phi) = 0: the Pareto tail
    exponent of the stationary volatility with jump scale phi.

    psi(., phi) is convex, starts negative (slope log_moment - eta < 0 for
    phi inside the stationarity region) and eventually turns positive.
    Strictly decreasing in phi.  Raises NoRootError at or beyond the
    stationarity boundary.
    """
    if not phi > 0.0:
        raise ValueError(f"phi must be > 0, got {phi}")
    if log_moment(ctx, phi) >= ctx.eta:
        raise NoRootError(
            f"phi={phi} is outside the stationarity region; psi(., phi) has no positive root"
        )
    g = lambda u: psi(ctx, u, phi)
    lo = 1.0
    for _ in range(200):
        if g(lo) < 0.0:
            break
        lo /= 2.0
    else:  # pragma: no cover - defensive
        raise NoRootError("could not find a negative section of psi")
    hi = max(2.0 * lo, 1.0)
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:
            raise DivergentIntegralError("psi never turns positive; tail root out of reach")
    return _bisect(g, lo, hi, _ROOT_XTOL_KAPPA)


def phi_max_kappa(ctx: ExponentContext, kappa: float) -> float:
    """Boundary of the kappa-th moment region: the root in phi of
    psi(kappa, phi) = 0.  Regions are nested (larger kappa, smaller phi)."""
    if not kappa > 0.0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    g = lambda p: psi(ctx, kappa, p)
    hi = 1.0
    while g(hi) <= 0.0:
        hi *= 2.0
        if hi > _BRACKET_CAP:  # pragma: no cover - defensive
            raise NoRootError("failed to bracket the moment boundary")
    return _bisect(g, 0.0, hi, _ROOT_XTOL_PHI)


def h_cross(ctx: ExponentContext, phi: float, phi_t: float) -> float:
    """Joint exponent of two COGARCHes sharing one driver:

        h(phi, phi~) = -2*eta + (phi + phi~)*E[S_1] + phi*phi~*Var[S_1].

    Symmetric, and h(phi, phi) = psi(2, phi).
    """
    m1, m2 = s_moments(ctx.model)
    return -2.0 * ctx.eta + (phi + phi_t) * m1 + phi * phi_t * m2


def h_kappa(ctx: ExponentContext, kappa: float, phi: float, phi_t: float) -> float:
    """General-order joint exponent
    -2*eta*kappa + integral(((1+phi*y)(1+phi~*y))^kappa - 1) nu_S(dy);
    order 1 reduces to h_cross and phi~ = phi reduces to psi(2*kappa, phi)."""
    if kappa == 1.0:
        return h_cross(ctx, phi, phi_t)
    integral = _s_integral(
        ctx.model, lambda y: ((1.0 + phi * y) * (1.0 + phi_t * y)) ** kappa - 1.0
    )
    return -2.0 * ctx.eta * kappa + integral
