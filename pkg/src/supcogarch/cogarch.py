"""Exact event-driven simulation of a single COGARCH volatility process and
its stationary second-order structure.

The volatility solves dV = (beta - eta*V) dt + phi * V_- dS, with S the
squared-jump subordinator of the driver.  Between marks the path relaxes
deterministically toward beta/eta; at a mark it is multiplied by
(1 + phi * dS).  For finite-activity drivers this scheme is exact: there is
no time-discretisation error anywhere.

Closed forms (valid on the respective moment regions, psi1 = psi(1, phi),
psi2 = psi(2, phi)):

    E[V]        = beta / (eta - phi*E[S_1])        = -beta / psi1
    E[V^2]      = 2*beta^2 / (psi1 * psi2)
    Cov[V_t, V_{t+h}] = exp(h*psi1) * Var[V]

and for two COGARCHes driven by the same subordinator,

    E[V^phi V^phi~]    = beta^2 (psi1 + psi1~) / (psi1 * psi1~ * h(phi, phi~))
    Cov[V^phi, V^phi~] = beta^2 phi phi~ Var[S_1] / (psi1 * psi1~ * (-h(phi, phi~)))
    Cov[V^phi_t, V^phi~_{t+h}] = exp(h * psi1~) * Cov[V^phi_0, V^phi~_0].

Infinite moments surface as MomentDivergesError, never as float inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import charexp
from .levy import JumpPath, LevyModel, s_moments, simulate_levy_path, squared_jumps

__all__ = [
    "MomentDivergesError",
    "NonStationaryError",
    "CogarchParams",
    "PathRecord",
    "evolve_value",
    "simulate_cogarch",
    "stationary_mean",
    "stationary_second_moment",
    "stationary_variance",
    "stationary_variance_alt",
    "stationary_acov",
    "cross_moment",
    "cross_cov",
    "cross_acov",
    "default_burn_in",
    "draw_stationary_v0",
    "path_to_csv",
]

BURN_IN_FACTOR = 40.0


class MomentDivergesError(ArithmeticError):
    """The requested stationary moment is infinite for these parameters."""


class NonStationaryError(ValueError):
    """No stationary version exists (phi at or beyond the boundary)."""


@dataclass(frozen=True)
class CogarchParams:
    """COGARCH parameters: level beta > 0, rate eta > 0, jump scale phi >= 0."""

    beta: float
    eta: float
    phi: float

    def __post_init__(self) -> None:
        if not self.beta > 0.0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not self.eta > 0.0:
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if self.phi < 0.0:
            raise ValueError(f"phi must be >= 0, got {self.phi}")

    @property
    def level(self) -> float:
        """Fixed point beta/eta of the between-jump drift."""
        return self.beta / self.eta

    def is_stationary_admissible(self, model: LevyModel) -> bool:
        ctx = charexp.ExponentContext(model, self.eta)
        return charexp.log_moment(ctx, self.phi) < self.eta


@dataclass(frozen=True)
class PathRecord:
    """Piecewise representation of a volatility path on [t0, t1].

    ``times`` are the jump events; ``left`` and ``post`` the values right
    before and after each one.  Between events the path is the exact ODE arc

        V(t) = beta/eta + (V(T_j) - beta/eta) * exp(-eta*(t - T_j)),

    so values anywhere can be reconstructed without a grid.
    """

    t0: float
    t1: float
    v0: float
    beta: float
    eta: float
    times: np.ndarray
    left: np.ndarray
    post: np.ndarray

    def __post_init__(self) -> None:
        for name in ("times", "left", "post"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def level(self) -> float:
        return self.beta / self.eta

    def _relax(self, v: np.ndarray, dt: np.ndarray) -> np.ndarray:
        return self.level + (v - self.level) * np.exp(-self.eta * dt)

    def _piecewise(self, ts: np.ndarray, side: str) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        if self.times.size == 0:
            return self._relax(np.full(ts.shape, self.v0), ts - self.t0)
        idx = np.searchsorted(self.times, ts, side=side)
        base_v = np.where(idx > 0, self.post[np.maximum(idx - 1, 0)], self.v0)
        base_t = np.where(idx > 0, self.times[np.maximum(idx - 1, 0)], self.t0)
        return self._relax(base_v, ts - base_t)

    def values(self, ts: np.ndarray) -> np.ndarray:
        """Cadlag values at query times (post-jump value exactly at an event)."""
        return self._piecewise(ts, "right")

    def value_at(self, t: float) -> float:
        return float(self.values(np.array([t]))[0])

    def left_limits(self, ts: np.ndarray) -> np.ndarray:
        """Left limits at query times (pre-jump value exactly at an event)."""
        return self._piecewise(ts, "left")

    def left_limit_at(self, t: float) -> float:
        return float(self.left_limits(np.array([t]))[0])

    def final_value(self) -> float:
        return self.value_at(self.t1)

    def min_value(self) -> float:
        lo = min(float(np.min(self.left)), float(np.min(self.post))) if len(self) else self.v0
        return min(lo, self.v0, self.final_value())


def _evolve(
    beta: float,
    eta: float,
    phi: float,
    times: list[float],
    sizes: list[float],
    v: float,
    t: float,
) -> tuple[float, float, list[float], list[float]]:
    """Run the exact recursion over a mark list; returns the post-jump value
    at the last mark (plus its time) and the per-event left/post values."""
    level = beta / eta
    left_out: list[float] = []
    post_out: list[float] = []
    exp = math.exp
    for T, ds in zip(times, sizes):
        v = level + (v - level) * exp(-eta * (T - t))
        left_out.append(v)
        v = v * (1.0 + phi * ds)
        post_out.append(v)
        t = T
    return v, t, left_out, post_out


def evolve_value(
    params: CogarchParams, s_path: JumpPath, v: float, t_start: float, t_end: float
) -> float:
    """Exact evolution through the marks of ``s_path`` from ``t_start``,
    relaxed up to ``t_end``; returns V(t_end)."""
    v, t, _, _ = _evolve(
        params.beta, params.eta, params.phi,
        s_path.times.tolist(), s_path.sizes.tolist(), v, t_start,
    )
    level = params.level
    return level + (v - level) * math.exp(-params.eta * (t_end - t))


def simulate_cogarch(params: CogarchParams, s_path: JumpPath, v0: float) -> PathRecord:
    """Exact path of the COGARCH driven by the subordinator path ``s_path``.

    Deterministic exponential relaxation toward beta/eta between marks and
    the multiplicative update V -> V * (1 + phi * dS) at each mark.
    """
    if not v0 > 0.0:
        raise ValueError(f"v0 must be > 0, got {v0}")
    _, _, left, post = _evolve(
        params.beta,
        params.eta,
        params.phi,
        s_path.times.tolist(),
        s_path.sizes.tolist(),
        v0,
        s_path.t0,
    )
    return PathRecord(
        t0=s_path.t0,
        t1=s_path.t1,
        v0=v0,
        beta=params.beta,
        eta=params.eta,
        times=s_path.times.copy(),
        left=np.array(left),
        post=np.array(post),
    )


def _psi12(params: CogarchParams, model: LevyModel) -> tuple[float, float]:
    m1, m2 = s_moments(model)
    psi1 = params.phi * m1 - params.eta
    psi2 = 2.0 * params.phi * m1 + params.phi**2 * m2 - 2.0 * params.eta
    return psi1, psi2


def stationary_mean(params: CogarchParams, model: LevyModel) -> float:
    psi1, _ = _psi12(params, model)
    if psi1 >= 0.0:
        raise MomentDivergesError(f"first moment diverges: psi(1, {params.phi}) = {psi1} >= 0")
    return -params.beta / psi1


def stationary_second_moment(params: CogarchParams, model: LevyModel) -> float:
    psi1, psi2 = _psi12(params, model)
    if psi2 >= 0.0:
        raise MomentDivergesError(f"second moment diverges: psi(2, {params.phi}) = {psi2} >= 0")
    return 2.0 * params.beta**2 / (psi1 * psi2)


def stationary_variance(params: CogarchParams, model: LevyModel) -> float:
    return stationary_second_moment(params, model) - stationary_mean(params, model) ** 2


def stationary_variance_alt(params: CogarchParams, model: LevyModel) -> float:
    """Equivalent algebraic form beta^2 phi^2 Var[S_1] /
    (psi1^2 * (2*eta - 2*phi*E[S_1] - phi^2*Var[S_1])); must agree with
    :func:`stationary_variance` to floating-point accuracy."""
    m1, m2 = s_moments(model)
    psi1, psi2 = _psi12(params, model)
    if psi2 >= 0.0:
        raise MomentDivergesError(f"second moment diverges: psi(2, {params.phi}) = {psi2} >= 0")
    return params.beta**2 * params.phi**2 * m2 / (psi1**2 * (-psi2))


def stationary_acov(params: CogarchParams, model: LevyModel, h: float) -> float:
    """Cov[V_t, V_{t+h}] = exp(h * psi(1, phi)) * Var[V]."""
    if h < 0.0:
        raise ValueError(f"lag must be >= 0, got {h}")
    psi1, _ = _psi12(params, model)
    return math.exp(h * psi1) * stationary_variance(params, model)


def _cross_gate(beta: float, eta: float, phi: float, phi_t: float, model: LevyModel):
    m1, m2 = s_moments(model)
    psi1a = phi * m1 - eta
    psi1b = phi_t * m1 - eta
    psi2a = 2.0 * phi * m1 + phi**2 * m2 - 2.0 * eta
    psi2b = 2.0 * phi_t * m1 + phi_t**2 * m2 - 2.0 * eta
    if psi2a >= 0.0 or psi2b >= 0.0:
        raise MomentDivergesError(
            f"cross moments diverge: psi(2, phi) must be < 0 for both scales "
            f"(got {psi2a} at {phi}, {psi2b} at {phi_t})"
        )
    h = -2.0 * eta + (phi + phi_t) * m1 + phi * phi_t * m2
    return m1, m2, psi1a, psi1b, h


def cross_moment(
    beta: float, eta: float, phi: float, phi_t: float, model: LevyModel
) -> float:
    """E[V^phi_t V^phi~_t] for two COGARCHes sharing one driver."""
    _, _, psi1a, psi1b, h = _cross_gate(beta, eta, phi, phi_t, model)
    return beta**2 * (psi1a + psi1b) / (psi1a * psi1b * h)


def cross_cov(beta: float, eta: float, phi: float, phi_t: float, model: LevyModel) -> float:
    """Cov[V^phi_t, V^phi~_t]; nonnegative."""
    _, m2, psi1a, psi1b, h = _cross_gate(beta, eta, phi, phi_t, model)
    return beta**2 * phi * phi_t * m2 / (psi1a * psi1b * (-h))


def cross_acov(
    beta: float, eta: float, phi: float, phi_t: float, model: LevyModel, h: float
) -> float:
    """Cov[V^phi_t, V^phi~_{t+h}]; the lag decays at the rate of the second
    (lagged) scale."""
    if h < 0.0:
        raise ValueError(f"lag must be >= 0, got {h}")
    m1, _ = s_moments(model)
    psi1b = phi_t * m1 - eta
    return math.exp(h * psi1b) * cross_cov(beta, eta, phi, phi_t, model)


def default_burn_in(params: CogarchParams, model: LevyModel) -> float:
    """Burn-in long enough that the initialisation bias exp(-40) is far
    below Monte Carlo noise: 40 mean-reversion times of the mean recursion
    (rate |psi(1, phi)| when negative, else eta)."""
    psi1, _ = _psi12(params, model)
    rate = -psi1 if psi1 < 0.0 else params.eta
    return BURN_IN_FACTOR / rate


def draw_stationary_v0(
    params: CogarchParams,
    model: LevyModel,
    seed: int | np.random.SeedSequence,
    burn_in: float | None = None,
) -> float:
    """One approximate draw from the stationary law, by evolving the exact
    recursion over [-burn_in, 0] from the stationary mean (or beta/eta when
    the mean diverges).  Raises NonStationaryError outside the stationarity
    region."""
    if params.phi == 0.0:
        return params.level
    if not params.is_stationary_admissible(model):
        raise NonStationaryError(f"phi={params.phi} is at or beyond the stationarity boundary")
    if burn_in is None:
        burn_in = default_burn_in(params, model)
    try:
        v_start = stationary_mean(params, model)
    except MomentDivergesError:
        v_start = params.level
    s_path = squared_jumps(simulate_levy_path(model, (-burn_in, 0.0), seed))
    return evolve_value(params, s_path, v_start, -burn_in, 0.0)


def path_to_csv(record: PathRecord, grid_step: float | None = None) -> str:
    """CSV rows ``time,value,is_jump``; event times carry two rows (left
    limit then post-jump value).  With ``grid_step`` set, values on the
    uniform grid are interleaved with the events."""
    rows: list[tuple[float, float, int]] = [(record.t0, record.v0, 0)]
    grid: np.ndarray
    if grid_step is not None:
        grid = np.arange(record.t0 + grid_step, record.t1 + 1e-12, grid_step)
    else:
        grid = np.array([record.t1])
    gvals = record.values(grid)
    event_set = set(record.times.tolist())
    for t, v in zip(grid.tolist(), gvals.tolist()):
        if t not in event_set:
            rows.append((t, v, 0))
    for t, vl, vp in zip(record.times.tolist(), record.left.tolist(), record.post.tolist()):
        rows.append((t, vl, 1))
        rows.append((t, vp, 1))
    rows.sort(key=lambda r: r[0])
    lines = ["time,value,is_jump"]
    fmt = lambda x: format(float(x), ".17g")
    for t, v, j in rows:
        lines.append(f"{fmt(t)},{fmt(v)},{j}")
    return "\n".join(lines) + "\n"


def rng_stationary_sample(
    params: CogarchParams,
    model: LevyModel,
    seed: int | np.random.SeedSequence,
    n: int,
    burn_in: float | None = None,
) -> np.ndarray:
    """n independent stationary draws; replication i uses substream(seed, i)."""
    from .levy import substream

    return np.array(
        [draw_stationary_v0(params, model, substream(seed, i), burn_in) for i in range(n)]
    )
