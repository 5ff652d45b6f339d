"""Driving Levy processes: models, jump-path simulation, and moments.

Two drivers are supported.  A compound Poisson process is simulated exactly
at its jump times and is the verification backbone (every downstream closed
form is exact for it).  A variance gamma process has infinite jump activity,
so it is approximated on a uniform grid: each grid increment, drawn from the
exact difference-of-gammas representation, is recorded as a single jump mark.

Randomness contract
-------------------
Every simulation is a pure function of ``(model, horizon, seed)``.  Derived
streams (replications, mixture atoms) are produced with :func:`substream`,
which mixes integer key words into the root seed through
``numpy.random.SeedSequence(entropy=root, spawn_key=key)``.  Serial and
parallel runs therefore draw identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

__all__ = [
    "JumpDistribution",
    "STANDARD_NORMAL",
    "CompoundPoisson",
    "VarianceGamma",
    "LevyModel",
    "JumpPath",
    "substream",
    "rng_from",
    "simulate_levy_path",
    "squared_jumps",
    "s_moments",
    "l_moments",
    "jump_path_to_csv",
]

DEFAULT_VG_GRID_STEP = 2.0 ** -8

# Raw moments E[Y^k], k = 1..8, needed for the moment-matched quadrature
# used by the exponent module; order 8 covers E[S_1^4] sanity checks.
_N_REQUIRED_MOMENTS = 8


def _fmt(x: float) -> str:
    """Full double precision (17 significant digits) for CSV output."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class JumpDistribution:
    """Jump-size law of a compound Poisson driver.

    ``sample(rng, n)`` draws n i.i.d. jump sizes; ``raw_moments`` are
    E[Y^k] for k = 1..8 and must all be supplied (construction error
    otherwise).
    """

    name: str
    sample: Callable[[np.random.Generator, int], np.ndarray]
    raw_moments: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.raw_moments) < _N_REQUIRED_MOMENTS:
            raise ValueError(
                f"jump distribution '{self.name}' must supply raw moments up to "
                f"order {_N_REQUIRED_MOMENTS}, got {len(self.raw_moments)}"
            )

    def moment(self, k: int) -> float:
        if k == 0:
            return 1.0
        return self.raw_moments[k - 1]


#: Standard normal jumps; odd moments vanish, E[Y^(2k)] = (2k-1)!!.
STANDARD_NORMAL = JumpDistribution(
    name="standard_normal",
    sample=lambda rng, n: rng.standard_normal(n),
    raw_moments=(0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0),
)


@dataclass(frozen=True)
class CompoundPoisson:
    """Compound Poisson driver with jump intensity ``rate`` per unit time."""

    rate: float
    jumps: JumpDistribution = STANDARD_NORMAL
    #: no Brownian component in either supported driver
    gaussian_var: float = field(default=0.0, init=False)

    def __post_init__(self) -> None:
        if not self.rate > 0.0:
            raise ValueError(f"compound Poisson rate must be > 0, got {self.rate}")

    @property
    def mean_l1(self) -> float:
        return self.rate * self.jumps.moment(1)


@dataclass(frozen=True)
class VarianceGamma:
    """Variance gamma driver: Brownian motion time-changed by a gamma process.

    ``sigma`` scales the Brownian motion, ``nu`` is the variance rate of the
    gamma subordinator (mean 1, variance nu per unit time).  The skew
    parameter is pinned to zero: the price-increment second-order structure
    needs a vanishing third Levy moment, which for VG forces the symmetric
    case.
    """

    sigma: float
    nu: float
    theta: float = 0.0
    grid_step: float = DEFAULT_VG_GRID_STEP
    gaussian_var: float = field(default=0.0, init=False)

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise ValueError(f"variance gamma sigma must be > 0, got {self.sigma}")
        if not self.nu > 0.0:
            raise ValueError(f"variance gamma nu must be > 0, got {self.nu}")
        if self.theta != 0.0:
            raise ValueError("variance gamma drift theta must be 0 (zero-mean driver)")
        if not self.grid_step > 0.0:
            raise ValueError("variance gamma grid_step must be > 0")

    @property
    def mean_l1(self) -> float:
        return 0.0


LevyModel = Union[CompoundPoisson, VarianceGamma]


@dataclass(frozen=True)
class JumpPath:
    """Finite, time-sorted stream of (time, jump size) marks on [t0, t1].

    Marks live in the half-open interval (t0, t1]; times are strictly
    increasing.  An S-path (subordinator) has all sizes > 0.
    """

    t0: float
    t1: float
    times: np.ndarray
    sizes: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        sizes = np.asarray(self.sizes, dtype=float)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "sizes", sizes)
        if not self.t1 > self.t0:
            raise ValueError(f"empty horizon [{self.t0}, {self.t1}]")
        if times.shape != sizes.shape or times.ndim != 1:
            raise ValueError("times and sizes must be 1-d arrays of equal length")
        if times.size:
            if times[0] <= self.t0 or times[-1] > self.t1:
                raise ValueError("mark times must lie in (t0, t1]")
            if np.any(np.diff(times) <= 0.0):
                raise ValueError("mark times must be strictly increasing")
        times.setflags(write=False)
        sizes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.times.size)

    def restrict(self, t0: float, t1: float) -> "JumpPath":
        """Marks in (t0, t1] as a new path on that horizon."""
        lo = int(np.searchsorted(self.times, t0, side="right"))
        hi = int(np.searchsorted(self.times, t1, side="right"))
        return JumpPath(t0, t1, self.times[lo:hi].copy(), self.sizes[lo:hi].copy())


def _normalize_seed(seed: int) -> int:
    # SeedSequence wants nonnegative entropy; fold negatives two's-complement style.
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def substream(seed: int | np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    """Deterministic derived stream: root seed plus integer key words.

    Splitting rule (documented contract): the replication index, and within a
    replication the atom/driver index, are appended to the SeedSequence
    ``spawn_key``.  Streams are identical no matter how work is scheduled.
    """
    if isinstance(seed, np.random.SeedSequence):
        base_key = tuple(seed.spawn_key)
        return np.random.SeedSequence(entropy=seed.entropy, spawn_key=base_key + key)
    return np.random.SeedSequence(entropy=_normalize_seed(seed), spawn_key=key)


def rng_from(seed: int | np.random.SeedSequence, *key: int) -> np.random.Generator:
    return np.random.default_rng(substream(seed, *key))


def simulate_levy_path(
    model: LevyModel,
    horizon: tuple[float, float],
    seed: int | np.random.SeedSequence,
) -> JumpPath:
    """Simulate the driver L on ``horizon`` as a stream of jump marks.

    Compound Poisson: exact (Poisson count, uniform order statistics for the
    times, i.i.d. sizes).  Variance gamma: one mark per grid increment of
    width ``model.grid_step`` (last increment may be shorter), each drawn as
    a difference of two gamma variables.  Deterministic given
    (model, horizon, seed).
    """
    t0, t1 = float(horizon[0]), float(horizon[1])
    if not t1 > t0:
        raise ValueError(f"empty horizon [{t0}, {t1}]")
    rng = np.random.default_rng(substream(seed))
    length = t1 - t0

    if isinstance(model, CompoundPoisson):
        n = int(rng.poisson(model.rate * length))
        times = np.sort(rng.uniform(t0, t1, size=n))
        sizes = np.asarray(model.jumps.sample(rng, n), dtype=float)
        keep = sizes != 0.0
        if times.size and (np.any(~keep) or np.any(np.diff(times) <= 0.0)):
            # zero sizes / tied uniforms have probability 0; drop ties defensively
            times, sizes = times[keep], sizes[keep]
            keep2 = np.concatenate(([True], np.diff(times) > 0.0))
            times, sizes = times[keep2], sizes[keep2]
        return JumpPath(t0, t1, times, sizes)

    if isinstance(model, VarianceGamma):
        step = model.grid_step
        n_steps = int(math.ceil(length / step - 1e-12))
        edges = t0 + step * np.arange(1, n_steps + 1)
        edges[-1] = t1
        widths = np.diff(np.concatenate(([t0], edges)))
        shape = widths / model.nu
        scale = model.sigma * math.sqrt(model.nu / 2.0)
        up = rng.gamma(shape, scale)
        down = rng.gamma(shape, scale)
        sizes = up - down
        # tiny-shape gamma differences underflow; drop increments whose
        # squared size would be subnormal (they carry no information)
        keep = np.abs(sizes) > 2.0**-511
        return JumpPath(t0, t1, edges[keep], sizes[keep])

    raise TypeError(f"unsupported Levy model: {model!r}")


def squared_jumps(path: JumpPath) -> JumpPath:
    """Subordinator path S driving the volatility: same times, sizes squared."""
    return JumpPath(path.t0, path.t1, path.times.copy(), path.sizes**2)


def s_moments(model: LevyModel) -> tuple[float, float]:
    """(E[S_1], Var[S_1]) of the subordinator S, i.e. the second and fourth
    moments of the Levy measure of L."""
    if isinstance(model, CompoundPoisson):
        return model.rate * model.jumps.moment(2), model.rate * model.jumps.moment(4)
    if isinstance(model, VarianceGamma):
        return model.sigma**2, 3.0 * model.sigma**4 * model.nu
    raise TypeError(f"unsupported Levy model: {model!r}")


def l_moments(model: LevyModel) -> tuple[float, float, float]:
    """(E[L_1^2], E[L_1^4], third Levy moment) of the zero-mean driver.

    For a pure-jump zero-mean Levy process E[L_1^2] = E[S_1] and
    E[L_1^4] = Var[S_1] + 3 E[S_1]^2.  The third Levy moment must vanish
    for the price-process second-order theory; it does for both symmetric
    drivers shipped here.
    """
    m1, m2 = s_moments(model)
    if isinstance(model, CompoundPoisson):
        third = model.rate * model.jumps.moment(3)
    else:
        third = 0.0
    return m1, m2 + 3.0 * m1**2, third


def jump_path_to_csv(path: JumpPath) -> str:
    """CSV export: header ``time,size``, ascending times, 17 significant digits."""
    lines = ["time,size"]
    for t, s in zip(path.times.tolist(), path.sizes.tolist()):
        lines.append(f"{_fmt(t)},{_fmt(s)}")
    return "\n".join(lines) + "\n"
