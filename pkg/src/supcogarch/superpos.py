"""The three superposed COGARCH volatility processes.

All three mix COGARCH components with distinct jump scales phi_i drawn from
a finitely supported probability measure pi = {(phi_i, p_i)}, sharing one
(beta, eta) pair:

* variant 1: independent drivers, one per atom; the aggregate is the
  p-weighted sum, and almost surely only one component jumps at a time;
* variant 2: a single shared driver; every component and the aggregate
  jump at every mark, the aggregate jump being the p-weighted combination;
* variant 3: a single shared driver for the component family, but the
  aggregate jumps by phi_T * V^{phi_T}_{T-} * dS_T where phi_T is an
  i.i.d. pi-draw made at each mark.

Between marks every aggregate relaxes along dV = (beta - eta*V) dt, exactly
like a single COGARCH, so the same piecewise path record applies.

Stationary starts are approximated by burn-in: components begin at their
stationary means (beta/eta if the mean diverges) 40 mean-reversion times
before the live window; shared-driver variants burn in jointly so that the
cross-sectional dependence at time t0 is the stationary one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import charexp
from .cogarch import (
    CogarchParams,
    MomentDivergesError,
    NonStationaryError,
    PathRecord,
    cross_acov,
    cross_cov,
    cross_moment,
    default_burn_in,
    evolve_value,
    simulate_cogarch,
    stationary_mean,
    stationary_variance,
)
from .levy import JumpPath, LevyModel, rng_from, s_moments, simulate_levy_path, squared_jumps, substream

__all__ = [
    "Variant",
    "TailLimit",
    "Mixture",
    "SupPathBundle",
    "simulate_sup1",
    "simulate_sup2",
    "simulate_sup3",
    "simulate_bundle",
    "sup1_mean",
    "sup1_var",
    "sup1_acov",
    "sup2_mean",
    "sup2_second_moment",
    "sup2_var",
    "sup2_acov",
    "sup3_mean",
    "sup3_second_moment",
    "sup3_var",
    "sup3_acov",
    "tail_exponent",
    "check_stationarity",
    "bundle_to_csv",
    "chosen_marks_to_csv",
]

_WEIGHT_TOL = 1e-12


class Variant(enum.Enum):
    SUP1 = "sup1"
    SUP2 = "sup2"
    SUP3 = "sup3"


class TailLimit(enum.Enum):
    """Behaviour of x^kappa_bar * P[V > x] at the tail exponent."""

    POSITIVE_CONSTANT = "positive_constant"
    ZERO = "zero"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class Mixture:
    """Finite superposition measure: atoms (phi_i, p_i), phis strictly
    ascending and pairwise distinct, weights positive and summing to 1."""

    phis: tuple[float, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.phis:
            raise ValueError("mixture needs at least one atom")
        if len(self.phis) != len(self.weights):
            raise ValueError("phis and weights must have equal length")
        if any(p < 0.0 for p in self.phis):
            raise ValueError("atom scales must be >= 0")
        if any(not w > 0.0 for w in self.weights):
            raise ValueError("weights must be > 0")
        if any(b <= a for a, b in zip(self.phis, self.phis[1:])):
            raise ValueError("atom scales must be strictly ascending and distinct")
        if abs(sum(self.weights) - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple[float, float]]) -> "Mixture":
        """Build from (phi, weight) pairs in any order."""
        pairs = sorted((float(phi), float(w)) for phi, w in atoms)
        return cls(tuple(p for p, _ in pairs), tuple(w for _, w in pairs))

    @classmethod
    def dirac(cls, phi: float) -> "Mixture":
        return cls((float(phi),), (1.0,))

    def atoms(self) -> Iterator[tuple[float, float]]:
        return iter(zip(self.phis, self.weights))

    def __len__(self) -> int:
        return len(self.phis)

    @property
    def phi_bar(self) -> float:
        """Top of the support."""
        return self.phis[-1]

    @property
    def phi_low(self) -> float:
        """Smallest strictly positive atom (0.0 if there is none)."""
        for phi in self.phis:
            if phi > 0.0:
                return phi
        return 0.0

    def weight_of(self, phi: float) -> float:
        for p, w in self.atoms():
            if p == phi:
                return w
        return 0.0


@dataclass(frozen=True)
class SupPathBundle:
    """A simulated superposition on [t0, t1]: the aggregate path, the
    component paths (one per atom, same order as the mixture), and the
    driving Levy paths restricted to the live window.

    For variant 1 ``drivers`` holds one L-path per atom; for variants 2
    and 3 a single shared one.  For variant 3 ``chosen_phis`` records the
    i.i.d. pi-draw at each shared mark (aligned with ``drivers[0].times``).
    """

    variant: Variant
    mixture: Mixture
    beta: float
    eta: float
    aggregate: PathRecord
    components: tuple[PathRecord, ...]
    drivers: tuple[JumpPath, ...]
    chosen_phis: np.ndarray | None = None

    @property
    def chosen_marks(self) -> list[tuple[float, float]]:
        if self.chosen_phis is None:
            return []
        return list(zip(self.drivers[0].times.tolist(), self.chosen_phis.tolist()))


def _require_stationary(mixture: Mixture, eta: float, model: LevyModel) -> None:
    ctx = charexp.ExponentContext(model, eta)
    for phi, _ in mixture.atoms():
        if phi > 0.0 and charexp.log_moment(ctx, phi) >= eta:
            raise NonStationaryError(
                f"atom phi={phi} violates the stationarity condition "
                f"(log-moment {charexp.log_moment(ctx, phi):.6g} >= eta={eta})"
            )


def _start_value(params: CogarchParams, model: LevyModel) -> float:
    try:
        return stationary_mean(params, model)
    except MomentDivergesError:
        return params.level


def _bundle_burn_in(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    return max(
        default_burn_in(CogarchParams(beta, eta, phi), model) for phi, _ in mixture.atoms()
    )


def _mean_or_level(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    try:
        return sup3_mean(mixture, beta, eta, model)
    except MomentDivergesError:
        return beta / eta


def simulate_sup1(
    mixture: Mixture,
    beta: float,
    eta: float,
    model: LevyModel,
    horizon: tuple[float, float],
    seed: int | np.random.SeedSequence,
    burn_in: float | None = None,
) -> SupPathBundle:
    """Variant 1: one independent driver per atom (stream key = atom index).

    Each component is a COGARCH on its own subordinator with a burned-in
    stationary start; the aggregate is the p-weighted sum and inherits the
    between-jump relaxation at rate eta.
    """
    _require_stationary(mixture, eta, model)
    t0, t1 = float(horizon[0]), float(horizon[1])
    b = _bundle_burn_in(mixture, beta, eta, model) if burn_in is None else burn_in

    components: list[PathRecord] = []
    drivers: list[JumpPath] = []
    for i, (phi, _) in enumerate(mixture.atoms()):
        params = CogarchParams(beta, eta, phi)
        l_full = simulate_levy_path(model, (t0 - b, t1), substream(seed, i))
        s_full = squared_jumps(l_full)
        s_burn = s_full.restrict(t0 - b, t0)
        v0 = evolve_value(params, s_burn, _start_value(params, model), t0 - b, t0)
        record = simulate_cogarch(params, s_full.restrict(t0, t1), v0)
        components.append(record)
        drivers.append(l_full.restrict(t0, t1))

    weights = np.array(mixture.weights)
    all_times = np.unique(np.concatenate([c.times for c in components]))
    agg_left = np.zeros_like(all_times)
    agg_post = np.zeros_like(all_times)
    v0_agg = 0.0
    for w, c in zip(weights.tolist(), components):
        agg_left += w * c.left_limits(all_times)
        agg_post += w * c.values(all_times)
        v0_agg += w * c.v0
    aggregate = PathRecord(
        t0=t0, t1=t1, v0=v0_agg, beta=beta, eta=eta,
        times=all_times, left=agg_left, post=agg_post,
    )
    return SupPathBundle(
        Variant.SUP1, mixture, beta, eta, aggregate, tuple(components), tuple(drivers)
    )


def _split_driver(
    model: LevyModel,
    t0: float,
    t1: float,
    b: float,
    seed: int | np.random.SeedSequence,
) -> tuple[JumpPath, JumpPath, JumpPath]:
    """One shared driver over burn-in plus live window (stream key 0)."""
    l_full = simulate_levy_path(model, (t0 - b, t1), substream(seed, 0))
    s_full = squared_jumps(l_full)
    return l_full.restrict(t0, t1), s_full.restrict(t0 - b, t0), s_full.restrict(t0, t1)


def simulate_sup2(
    mixture: Mixture,
    beta: float,
    eta: float,
    model: LevyModel,
    horizon: tuple[float, float],
    seed: int | np.random.SeedSequence,
    burn_in: float | None = None,
) -> SupPathBundle:
    """Variant 2: all components on one shared driver; the whole family and
    the aggregate co-jump at every mark."""
    _require_stationary(mixture, eta, model)
    t0, t1 = float(horizon[0]), float(horizon[1])
    b = _bundle_burn_in(mixture, beta, eta, model) if burn_in is None else burn_in
    l_live, s_burn, s_live = _split_driver(model, t0, t1, b, seed)
    components = []
    for phi, _ in mixture.atoms():
        params = CogarchParams(beta, eta, phi)
        v0 = evolve_value(params, s_burn, _start_value(params, model), t0 - b, t0)
        components.append(simulate_cogarch(params, s_live, v0))
    weights = np.array(mixture.weights)
    agg_left = np.zeros(len(s_live))
    agg_post = np.zeros(len(s_live))
    v0_agg = 0.0
    for w, c in zip(weights.tolist(), components):
        agg_left += w * c.left
        agg_post += w * c.post
        v0_agg += w * c.v0
    aggregate = PathRecord(
        t0=t0, t1=t1, v0=v0_agg, beta=beta, eta=eta,
        times=s_live.times.copy(), left=agg_left, post=agg_post,
    )
    return SupPathBundle(
        Variant.SUP2, mixture, beta, eta, aggregate, tuple(components), (l_live,)
    )


def simulate_sup3(
    mixture: Mixture,
    beta: float,
    eta: float,
    model: LevyModel,
    horizon: tuple[float, float],
    seed: int | np.random.SeedSequence,
    burn_in: float | None = None,
) -> SupPathBundle:
    """Variant 3: shared driver; at each mark an independent pi-draw phi_T
    picks which component's scaled jump the aggregate takes:

        dVbar_T = phi_T * V^{phi_T}_{T-} * dS_T.

    Stream keys: 0 for the driver, 1 for the pi-draws.  The pi-draws cover
    burn-in and live marks so the aggregate burn-in is joint with the
    component family.
    """
    _require_stationary(mixture, eta, model)
    t0, t1 = float(horizon[0]), float(horizon[1])
    b = _bundle_burn_in(mixture, beta, eta, model) if burn_in is None else burn_in
    l_live, s_burn, s_live = _split_driver(model, t0, t1, b, seed)

    rng = rng_from(substream(seed, 1))
    n_marks = len(s_burn) + len(s_live)
    idx = rng.choice(len(mixture), size=n_marks, p=np.array(mixture.weights))
    idx_burn, idx_live = idx[: len(s_burn)], idx[len(s_burn):]

    level = beta / eta
    params_by_atom = [CogarchParams(beta, eta, phi) for phi, _ in mixture.atoms()]

    # joint burn-in: one pass evolving the component family and the
    # aggregate state together (the aggregate consumes component left limits)
    vbar = _mean_or_level(mixture, beta, eta, model)
    comp_vals = [_start_value(p, model) for p in params_by_atom]
    t = t0 - b
    for k, (T, ds) in enumerate(zip(s_burn.times.tolist(), s_burn.sizes.tolist())):
        decay = math.exp(-eta * (T - t))
        lefts = [level + (v - level) * decay for v in comp_vals]
        j = int(idx_burn[k])
        vbar = level + (vbar - level) * decay + mixture.phis[j] * lefts[j] * ds
        comp_vals = [vl * (1.0 + p.phi * ds) for vl, p in zip(lefts, params_by_atom)]
        t = T
    end_decay = math.exp(-eta * (t0 - t))
    vbar0 = level + (vbar - level) * end_decay
    components = [
        simulate_cogarch(p, s_live, level + (v - level) * end_decay)
        for p, v in zip(params_by_atom, comp_vals)
    ]

    # live window: component left limits are already recorded per mark
    times = s_live.times
    sizes = s_live.sizes
    agg_left = np.empty(len(s_live))
    agg_post = np.empty(len(s_live))
    vbar = vbar0
    t = t0
    for k, (T, ds) in enumerate(zip(times.tolist(), sizes.tolist())):
        vbar = level + (vbar - level) * math.exp(-eta * (T - t))
        agg_left[k] = vbar
        j = int(idx_live[k])
        vbar = vbar + mixture.phis[j] * float(components[j].left[k]) * ds
        agg_post[k] = vbar
        t = T
    aggregate = PathRecord(
        t0=t0, t1=t1, v0=vbar0, beta=beta, eta=eta,
        times=times.copy(), left=agg_left, post=agg_post,
    )
    chosen = np.array([mixture.phis[int(j)] for j in idx_live])
    return SupPathBundle(
        Variant.SUP3, mixture, beta, eta, aggregate, tuple(components), (l_live,), chosen
    )


_SIMULATORS = {
    Variant.SUP1: simulate_sup1,
    Variant.SUP2: simulate_sup2,
    Variant.SUP3: simulate_sup3,
}


def simulate_bundle(
    variant: Variant,
    mixture: Mixture,
    beta: float,
    eta: float,
    model: LevyModel,
    horizon: tuple[float, float],
    seed: int | np.random.SeedSequence,
    burn_in: float | None = None,
) -> SupPathBundle:
    return _SIMULATORS[variant](mixture, beta, eta, model, horizon, seed, burn_in)


# ---------------------------------------------------------------------------
# stationary moments


def _atom_psi(mixture: Mixture, eta: float, model: LevyModel, order: int) -> list[float]:
    m1, m2 = s_moments(model)
    if order == 1:
        return [phi * m1 - eta for phi, _ in mixture.atoms()]
    return [2.0 * phi * m1 + phi * phi * m2 - 2.0 * eta for phi, _ in mixture.atoms()]


def _gate(mixture: Mixture, eta: float, model: LevyModel, order: int, what: str) -> None:
    bad = [
        phi
        for (phi, _), p in zip(mixture.atoms(), _atom_psi(mixture, eta, model, order))
        if p >= 0.0
    ]
    if bad:
        raise MomentDivergesError(
            f"{what} diverges: atoms {bad} lie outside the order-{order} moment region"
        )


def sup1_mean(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    """E[Vbar] = beta * sum_i p_i / (eta - phi_i E[S_1]); shared by all
    three variants."""
    _gate(mixture, eta, model, 1, "mean")
    return sum(
        w * stationary_mean(CogarchParams(beta, eta, phi), model)
        for phi, w in mixture.atoms()
    )


def sup1_var(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    """Var[Vbar^(1)] = sum_i p_i^2 Var[V^{phi_i}] (independent components)."""
    _gate(mixture, eta, model, 2, "variance")
    return sum(
        w * w * stationary_variance(CogarchParams(beta, eta, phi), model)
        for phi, w in mixture.atoms()
    )


def sup1_acov(mixture: Mixture, beta: float, eta: float, model: LevyModel, h: float) -> float:
    """Cov[Vbar^(1)_t, Vbar^(1)_{t+h}] = sum_i p_i^2 exp(h psi1_i) Var[V^{phi_i}]."""
    _gate(mixture, eta, model, 2, "autocovariance")
    psi1 = _atom_psi(mixture, eta, model, 1)
    return sum(
        w * w * math.exp(h * p1) * stationary_variance(CogarchParams(beta, eta, phi), model)
        for (phi, w), p1 in zip(mixture.atoms(), psi1)
    )


def sup2_mean(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    return sup1_mean(mixture, beta, eta, model)


def sup2_second_moment(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    """E[(Vbar^(2))^2]: double sum of shared-driver product moments."""
    _gate(mixture, eta, model, 2, "second moment")
    return sum(
        wi * wj * cross_moment(beta, eta, pi, pj, model)
        for pi, wi in mixture.atoms()
        for pj, wj in mixture.atoms()
    )


def sup2_var(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    _gate(mixture, eta, model, 2, "variance")
    return sum(
        wi * wj * cross_cov(beta, eta, pi, pj, model)
        for pi, wi in mixture.atoms()
        for pj, wj in mixture.atoms()
    )


def sup2_acov(mixture: Mixture, beta: float, eta: float, model: LevyModel, h: float) -> float:
    """Double sum of lagged cross-covariances; the lag decays at the rate of
    the second (lagged) atom."""
    _gate(mixture, eta, model, 2, "autocovariance")
    return sum(
        wi * wj * cross_acov(beta, eta, pi, pj, model, h)
        for pi, wi in mixture.atoms()
        for pj, wj in mixture.atoms()
    )


def sup3_mean(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    return sup1_mean(mixture, beta, eta, model)


def _sup3_correction(
    beta: float, eta: float, phi_i: float, phi_j: float, model: LevyModel
) -> float:
    # (beta/eta) * (Var[V^phi_i] - Cov[V^phi_i, V^phi_j]) / E[V^phi_i]
    params_i = CogarchParams(beta, eta, phi_i)
    var_i = stationary_variance(params_i, model)
    cov_ij = cross_cov(beta, eta, phi_i, phi_j, model)
    return (beta / eta) * (var_i - cov_ij) / stationary_mean(params_i, model)


def sup3_second_moment(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    """E[(Vbar^(3))^2]: shared-driver product moments plus the correction
    (beta/eta)(Var[V^phi] - Cov[V^phi, V^phi~]) / E[V^phi], summed over
    atom pairs.  Degenerates to the single-COGARCH second moment under a
    point mass."""
    _gate(mixture, eta, model, 2, "second moment")
    total = 0.0
    for pi, wi in mixture.atoms():
        for pj, wj in mixture.atoms():
            total += wi * wj * (
                cross_moment(beta, eta, pi, pj, model)
                + _sup3_correction(beta, eta, pi, pj, model)
            )
    return total


def sup3_var(mixture: Mixture, beta: float, eta: float, model: LevyModel) -> float:
    mean = sup3_mean(mixture, beta, eta, model)
    return sup3_second_moment(mixture, beta, eta, model) - mean * mean


def sup3_acov(mixture: Mixture, beta: float, eta: float, model: LevyModel, h: float) -> float:
    """Two-rate decay: exp(h psi1_i) on the covariance part and exp(-eta h)
    on the correction part."""
    if h < 0.0:
        raise ValueError(f"lag must be >= 0, got {h}")
    _gate(mixture, eta, model, 2, "autocovariance")
    psi1 = _atom_psi(mixture, eta, model, 1)
    total = 0.0
    for ((pi, wi), p1) in zip(mixture.atoms(), psi1):
        for pj, wj in mixture.atoms():
            cov_ij = cross_cov(beta, eta, pi, pj, model)
            corr = _sup3_correction(beta, eta, pi, pj, model)
            total += wi * wj * (math.exp(h * p1) * cov_ij + math.exp(-eta * h) * corr)
    return total


# ---------------------------------------------------------------------------
# tails and stationarity reporting


@dataclass(frozen=True)
class TailExponent:
    kappa_bar: float
    limit_kind: TailLimit


def tail_exponent(
    variant: Variant, mixture: Mixture, ctx: charexp.ExponentContext
) -> TailExponent:
    """Pareto tail exponent of the stationary aggregate: the root kappa_bar
    of psi(kappa, phi_bar) = 0 at the top atom.  For finite mixtures the top
    atom carries positive mass, so variants 1 and 2 approach a positive
    constant while variant 3 is only bounded between positive constants."""
    phi_bar = mixture.phi_bar
    if not phi_bar > 0.0:
        raise ValueError("tail exponent undefined for a point mass at 0")
    kappa_bar = charexp.kappa_of_phi(ctx, phi_bar)
    kind = TailLimit.BOUNDED if variant is Variant.SUP3 else TailLimit.POSITIVE_CONSTANT
    return TailExponent(kappa_bar, kind)


@dataclass(frozen=True)
class AtomCheck:
    phi: float
    weight: float
    log_moment: float
    stationary: bool
    in_half_moment_region: bool
    in_first_moment_region: bool
    in_second_moment_region: bool


@dataclass(frozen=True)
class StationarityReport:
    variant: Variant
    eta: float
    atoms: tuple[AtomCheck, ...]

    @property
    def stationary(self) -> bool:
        return all(a.stationary for a in self.atoms)

    @property
    def violating_atoms(self) -> tuple[float, ...]:
        return tuple(a.phi for a in self.atoms if not a.stationary)

    def moment_region_fraction(self, kappa: float) -> float:
        """pi-mass of atoms inside the order-kappa moment region."""
        key = {0.5: "in_half_moment_region", 1: "in_first_moment_region", 2: "in_second_moment_region"}
        attr = key.get(kappa)
        if attr is None:
            raise ValueError(f"tracked moment orders are 0.5, 1, 2; got {kappa}")
        return sum(a.weight for a in self.atoms if getattr(a, attr))


def check_stationarity(
    variant: Variant, mixture: Mixture, ctx: charexp.ExponentContext
) -> StationarityReport:
    """Per-atom admissibility (log-moment vs eta) and moment-region
    membership at orders 1/2, 1, 2.  Reports; never raises."""
    checks = []
    for phi, w in mixture.atoms():
        lm = charexp.log_moment(ctx, phi)
        checks.append(
            AtomCheck(
                phi=phi,
                weight=w,
                log_moment=lm,
                stationary=(phi == 0.0) or lm < ctx.eta,
                in_half_moment_region=charexp.psi(ctx, 0.5, phi) < 0.0,
                in_first_moment_region=charexp.psi(ctx, 1.0, phi) < 0.0,
                in_second_moment_region=charexp.psi(ctx, 2.0, phi) < 0.0,
            )
        )
    return StationarityReport(variant, ctx.eta, tuple(checks))


# ---------------------------------------------------------------------------
# CSV export


def bundle_to_csv(bundle: SupPathBundle, grid_step: float | None = None) -> str:
    """Aggregate plus one column per component at the union of event times
    and a uniform grid.  Event times carry two rows (left limits, then
    post-jump values)."""
    fmt = lambda x: format(float(x), ".17g")
    agg = bundle.aggregate
    header = ["time", "aggregate"] + [f"component_{phi:g}" for phi in bundle.mixture.phis]

    query: list[tuple[float, bool]] = [(agg.t0, False)]
    if grid_step is not None:
        event_set = set(agg.times.tolist())
        for t in np.arange(agg.t0 + grid_step, agg.t1 + 1e-12, grid_step).tolist():
            if t not in event_set:
                query.append((t, False))
    for t in agg.times.tolist():
        query.append((t, True))
    query.sort(key=lambda q: q[0])

    lines = [",".join(header)]
    for t, is_event in query:
        if is_event:
            k = int(np.searchsorted(agg.times, t))
            row_l = [fmt(t), fmt(agg.left[k])]
            row_p = [fmt(t), fmt(agg.post[k])]
            for c in bundle.components:
                row_l.append(fmt(c.left_limit_at(t)))
                row_p.append(fmt(c.value_at(t)))
            lines.append(",".join(row_l))
            lines.append(",".join(row_p))
        else:
            row = [fmt(t), fmt(agg.value_at(t))]
            for c in bundle.components:
                row.append(fmt(c.value_at(t)))
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def chosen_marks_to_csv(bundle: SupPathBundle) -> str:
    """Variant-3 pi-draws: ``time,phi`` per shared mark."""
    if bundle.chosen_phis is None:
        raise ValueError("bundle has no chosen marks (not a variant-3 bundle)")
    fmt = lambda x: format(float(x), ".17g")
    lines = ["time,phi"]
    for t, phi in bundle.chosen_marks:
        lines.append(f"{fmt(t)},{fmt(phi)}")
    return "\n".join(lines) + "\n"
