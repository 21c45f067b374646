"""Spatial-lobe mmWave channel realizations and ULA steering vectors.

Angles are radians on [0, 2*pi).  Arrays use half-wavelength spacing, so the
phase progression of a steering vector is ``pi * k * sin(angle)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidProfile

TWO_PI = 2.0 * np.pi


def wrap_angle(angle):
    """Map angles into [0, 2*pi); tiny negatives that round up to 2*pi become 0."""
    w = np.mod(angle, TWO_PI)
    w = np.where(w >= TWO_PI, 0.0, w)
    return float(w) if np.ndim(w) == 0 else w
_COVERAGE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SteeringVector:
    entries: np.ndarray
    angle: float

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[0]


def steering_matrix(angles, n_antennas: int, indices=None) -> np.ndarray:
    """Stack ULA responses for ``angles`` as columns.

    ``indices`` selects which antenna positions to evaluate (default
    ``0..n_antennas-1``); the normalization is always ``1/sqrt(n_antennas)``.
    """
    if n_antennas < 1:
        raise InvalidArgument(f"n_antennas must be >= 1, got {n_antennas}")
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    if indices is None:
        indices = np.arange(n_antennas)
    k = np.asarray(indices, dtype=float)[:, None]
    return np.exp(1j * np.pi * k * np.sin(angles)[None, :]) / np.sqrt(n_antennas)


def array_response(angle: float, n_antennas: int) -> SteeringVector:
    if n_antennas < 1:
        raise InvalidArgument(f"n_antennas must be >= 1, got {n_antennas}")
    if not math.isfinite(angle):
        raise InvalidArgument(f"angle must be finite, got {angle}")
    entries = steering_matrix([angle], n_antennas)[:, 0]
    return SteeringVector(entries=entries, angle=wrap_angle(float(angle)))


@dataclass(frozen=True)
class SpatialLobeProfile:
    """Lobe geometry shared by transmitter and receiver.

    Lobe ``i`` has physical coverage ``mean_angles[i] +/- spreads[i]/2`` and
    quantized coverage ``mean_angles[i] +/- quant_ranges[i]/2``, both taken
    modulo 2*pi.
    """

    P: int
    Q: int
    mean_angles: tuple[float, ...]
    spreads: tuple[float, ...]
    quant_ranges: tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self):
        if self.P < 1 or self.Q < 1:
            raise InvalidArgument(f"P and Q must be >= 1, got P={self.P}, Q={self.Q}")
        for name in ("mean_angles", "spreads", "quant_ranges"):
            values = getattr(self, name)
            if len(values) != self.P:
                raise InvalidArgument(f"{name} has {len(values)} entries, expected P={self.P}")
            object.__setattr__(self, name, tuple(float(v) for v in values))

    @classmethod
    def default(cls, P: int, Q: int, offset: float, quant_ranges=None) -> "SpatialLobeProfile":
        """Evenly spaced lobes with spread pi/P; quantized range equals the spread
        unless ``quant_ranges`` is given."""
        spread = np.pi / P
        means = tuple(wrap_angle(offset + TWO_PI * i / P) for i in range(P))
        ranges = tuple([spread] * P) if quant_ranges is None else tuple(quant_ranges)
        profile = cls(P=P, Q=Q, mean_angles=means, spreads=tuple([spread] * P),
                      quant_ranges=ranges, offset=wrap_angle(float(offset)))
        profile.validate()
        return profile

    @property
    def total_quant_range(self) -> float:
        return float(sum(self.quant_ranges))

    def coverage(self, i: int) -> tuple[float, float]:
        """Physical coverage interval of lobe ``i`` (unwrapped endpoints)."""
        return (self.mean_angles[i] - self.spreads[i] / 2, self.mean_angles[i] + self.spreads[i] / 2)

    def quant_coverage(self, i: int) -> tuple[float, float]:
        return (self.mean_angles[i] - self.quant_ranges[i] / 2,
                self.mean_angles[i] + self.quant_ranges[i] / 2)

    def validate(self) -> None:
        """Raise InvalidProfile naming the first violated coverage constraint."""
        for i, (w, r) in enumerate(zip(self.spreads, self.quant_ranges)):
            if w <= 0 or r <= 0:
                raise InvalidProfile(f"lobe {i}: spread and quantized range must be positive")
            if w > r + _COVERAGE_TOL:
                raise InvalidProfile(
                    f"angle spread exceeds quantized range: lobe {i} has spread {w:.6g} > range {r:.6g}")
        if self.total_quant_range > TWO_PI + _COVERAGE_TOL:
            raise InvalidProfile(
                f"quantized coverage exceeds [0, 2*pi]: total range {self.total_quant_range:.6g}")
        for i in range(self.P):
            for j in range(i + 1, self.P):
                gap = abs(self.mean_angles[i] - self.mean_angles[j]) % TWO_PI
                gap = min(gap, TWO_PI - gap)
                half_sum = (self.quant_ranges[i] + self.quant_ranges[j]) / 2
                if gap < half_sum - _COVERAGE_TOL:
                    raise InvalidProfile(
                        f"quantized coverages intersect: lobes {i} and {j} overlap by {half_sum - gap:.6g} rad")


def sample_lobe_profile(P: int, Q: int, rng: np.random.Generator, *, offset: float | None = None,
                        quant_ranges=None) -> SpatialLobeProfile:
    if offset is None:
        offset = rng.uniform(0.0, TWO_PI)
    return SpatialLobeProfile.default(P, Q, offset, quant_ranges=quant_ranges)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One narrowband channel draw and the paths that produced it.

    Columns of ``A_r``/``A_t`` (and entries of ``gains``, ``aoas``, ``aods``)
    are ordered lobe-major: path ``(p, q)`` sits at index ``p*Q + q``.
    """

    H: np.ndarray
    gains: np.ndarray
    aoas: np.ndarray
    aods: np.ndarray
    A_r: np.ndarray
    A_t: np.ndarray
    profile: SpatialLobeProfile | None = None

    @property
    def n_t(self) -> int:
        return self.H.shape[1]

    @property
    def n_r(self) -> int:
        return self.H.shape[0]

    @property
    def n_paths(self) -> int:
        return self.gains.shape[0]

    @property
    def scaled_gains(self) -> np.ndarray:
        return np.sqrt(self.n_t * self.n_r / self.n_paths) * self.gains

    def lobe_columns(self, i: int) -> slice:
        Q = self.profile.Q
        return slice(i * Q, (i + 1) * Q)


def _complex_gaussian(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def _assemble(aoas, aods, gains, n_t, n_r, profile=None) -> ChannelRealization:
    A_r = steering_matrix(aoas, n_r)
    A_t = steering_matrix(aods, n_t)
    scale = np.sqrt(n_t * n_r / gains.shape[0])
    H = (A_r * (scale * gains)[None, :]) @ A_t.conj().T
    return ChannelRealization(H=H, gains=gains, aoas=aoas, aods=aods, A_r=A_r, A_t=A_t, profile=profile)


def generate_channel(profile: SpatialLobeProfile, n_t: int, n_r: int,
                     rng: np.random.Generator) -> ChannelRealization:
    """Draw a spatial-lobe channel.

    Each subpath's AoA and AoD are drawn independently and uniformly inside
    its lobe's coverage; gains are i.i.d. CN(0, 1).
    """
    if n_t < 1 or n_r < 1:
        raise InvalidArgument(f"antenna counts must be >= 1, got n_t={n_t}, n_r={n_r}")
    profile.validate()
    P, Q = profile.P, profile.Q
    centers = np.repeat(np.asarray(profile.mean_angles), Q)
    half = np.repeat(np.asarray(profile.spreads), Q) / 2
    aoas = wrap_angle(centers + rng.uniform(-1.0, 1.0, P * Q) * half)
    aods = wrap_angle(centers + rng.uniform(-1.0, 1.0, P * Q) * half)
    gains = _complex_gaussian(rng, P * Q)
    return _assemble(aoas, aods, gains, n_t, n_r, profile)


def generate_channel_clustered(n_cl: int, n_ray: int, n_t: int, n_r: int,
                               rng: np.random.Generator) -> ChannelRealization:
    """Saleh-Valenzuela draw with AoAs/AoDs uniform on [0, 2*pi)."""
    if n_cl < 1 or n_ray < 1:
        raise InvalidArgument(f"n_cl and n_ray must be >= 1, got {n_cl}, {n_ray}")
    if n_t < 1 or n_r < 1:
        raise InvalidArgument(f"antenna counts must be >= 1, got n_t={n_t}, n_r={n_r}")
    L = n_cl * n_ray
    aoas = rng.uniform(0.0, TWO_PI, L)
    aods = rng.uniform(0.0, TWO_PI, L)
    gains = _complex_gaussian(rng, L)
    return _assemble(aoas, aods, gains, n_t, n_r)
