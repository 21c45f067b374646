"""Uniform and non-uniform beamsteering codebooks.

A UQ codebook spends ``2**b`` codewords on the whole circle.  A NUQ codebook
spends (at most) the same ``2**b`` codewords only on the lobes' quantized
coverages, so its angular step is ``sum(quant_ranges) / 2**b``: the step a UQ
codebook would have with :func:`equivalent_bits` bits.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .channel import TWO_PI, SpatialLobeProfile, steering_matrix, wrap_angle
from .errors import InvalidArgument, InvalidConfiguration, InvalidProfile

_GRID_TOL = 1e-9


class Structure(str, enum.Enum):
    FULL_ARRAY = "full"
    SUB_ARRAY_BLOCK = "sub"
    DIGITAL = "digital"


@dataclass(frozen=True, eq=False)
class LobeGrid:
    lobe_index: int
    angles: np.ndarray
    delta: float

    def __len__(self) -> int:
        return self.angles.shape[0]


@dataclass(frozen=True, eq=False)
class Codebook:
    """Unit-norm steering codewords stored as the columns of ``codewords``.

    ``column_lobe[m]`` is the lobe whose grid produced column ``m``.  Block
    codebooks additionally record ``column_slot[m]``, the subarray window the
    column is supported on, and ``n_sub``, the window width.
    """

    structure: Structure
    lobes: tuple[LobeGrid, ...]
    codewords: np.ndarray
    bits_per_index: int
    column_lobe: np.ndarray
    column_slot: np.ndarray | None = None
    n_sub: int | None = None
    profile: SpatialLobeProfile | None = None

    @property
    def n_antennas(self) -> int:
        return self.codewords.shape[0]

    @property
    def size(self) -> int:
        return self.codewords.shape[1]

    def lobe_columns(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.column_lobe == i)

    def slot_columns(self, s: int) -> np.ndarray:
        if self.column_slot is None:
            raise InvalidArgument("slot columns only exist on sub-array block codebooks")
        return np.flatnonzero(self.column_slot == s)

    def window(self, s: int) -> slice:
        if self.n_sub is None:
            raise InvalidArgument("windows only exist on sub-array block codebooks")
        return slice(s * self.n_sub, (s + 1) * self.n_sub)

    def column_angles(self) -> np.ndarray:
        if self.structure is Structure.SUB_ARRAY_BLOCK:
            return np.concatenate([self.lobes[int(self.column_lobe[cols[0]])].angles
                                   for cols in (self.slot_columns(s) for s in np.unique(self.column_slot))])
        return np.concatenate([g.angles for g in self.lobes])

    def to_dict(self) -> dict:
        d = {
            "structure": self.structure.value,
            "n_antennas": self.n_antennas,
            "n_columns": self.size,
            "bits_per_index": self.bits_per_index,
            "lobes": [{"lobe_index": g.lobe_index, "delta": g.delta, "angles": g.angles.tolist()}
                      for g in self.lobes],
            "column_lobe": self.column_lobe.tolist(),
            "codewords": {"real": self.codewords.real.tolist(), "imag": self.codewords.imag.tolist()},
        }
        if self.structure is Structure.SUB_ARRAY_BLOCK:
            d["n_sub"] = self.n_sub
            d["column_slot"] = self.column_slot.tolist()
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "Codebook":
        lobes = tuple(LobeGrid(g["lobe_index"], np.asarray(g["angles"], dtype=float), float(g["delta"]))
                      for g in d["lobes"])
        words = np.asarray(d["codewords"]["real"]) + 1j * np.asarray(d["codewords"]["imag"])
        slot = d.get("column_slot")
        return cls(structure=Structure(d["structure"]), lobes=lobes,
                   codewords=words.reshape(d["n_antennas"], d["n_columns"]),
                   bits_per_index=int(d["bits_per_index"]),
                   column_lobe=np.asarray(d["column_lobe"], dtype=int),
                   column_slot=None if slot is None else np.asarray(slot, dtype=int),
                   n_sub=d.get("n_sub"))


def index_bits(n_columns: int) -> int:
    """Bits for a flat index over ``n_columns`` codewords (at least 1)."""
    return max(1, math.ceil(math.log2(n_columns)))


def build_uq_codebook(n_antennas: int, b: int) -> Codebook:
    if b < 1:
        raise InvalidArgument(f"b must be >= 1, got {b}")
    delta = TWO_PI / 2 ** b
    angles = delta * np.arange(2 ** b)
    return Codebook(structure=Structure.FULL_ARRAY,
                    lobes=(LobeGrid(0, angles, delta),),
                    codewords=steering_matrix(angles, n_antennas),
                    bits_per_index=b,
                    column_lobe=np.zeros(2 ** b, dtype=int))


def equivalent_bits(b: float, quant_ranges) -> float:
    """UQ bit count with the same angular step as a NUQ codebook of ``b`` bits."""
    total = float(np.sum(quant_ranges))
    if total <= 0:
        raise InvalidArgument(f"total quantized range must be positive, got {total}")
    if total > TWO_PI * (1 + 1e-12):
        raise InvalidProfile(f"quantized coverage exceeds [0, 2*pi]: total range {total:.6g}")
    return b - math.log2(total / TWO_PI)


def quantization_step(b: int, quant_ranges) -> float:
    """Angular step of a NUQ grid: ``2*pi / 2**equivalent_bits(b, quant_ranges)``."""
    return float(np.sum(quant_ranges)) / 2 ** b


def lobe_grids(profile: SpatialLobeProfile, b: int) -> tuple[LobeGrid, ...]:
    """Per-lobe quantization grids.

    Lobe ``i`` gets ``floor(range_i / step)`` points starting at the lower edge
    of its quantized coverage, i.e. one point per quantization cell.  For
    equal ranges that divide evenly this spends exactly ``2**b`` points.
    """
    if b < 1:
        raise InvalidArgument(f"b must be >= 1, got {b}")
    profile.validate()
    delta = quantization_step(b, profile.quant_ranges)
    grids = []
    for i, (center, width) in enumerate(zip(profile.mean_angles, profile.quant_ranges)):
        n = max(1, math.floor(width / delta + _GRID_TOL))
        angles = wrap_angle(center - width / 2 + delta * np.arange(n))
        grids.append(LobeGrid(i, angles, delta))
    return tuple(grids)


def _full_codebook(n_antennas: int, grids, profile) -> Codebook:
    angles = np.concatenate([g.angles for g in grids])
    column_lobe = np.concatenate([np.full(len(g), g.lobe_index) for g in grids])
    return Codebook(structure=Structure.FULL_ARRAY, lobes=grids,
                    codewords=steering_matrix(angles, n_antennas),
                    bits_per_index=index_bits(angles.shape[0]),
                    column_lobe=column_lobe, profile=profile)


def build_nuq_codebook_full(n_t: int, n_r: int, b: int,
                            profile: SpatialLobeProfile) -> tuple[Codebook, Codebook]:
    """Transmit and receive NUQ codebooks: per-lobe grids concatenated lobe by lobe."""
    if n_t < 1 or n_r < 1:
        raise InvalidArgument(f"antenna counts must be >= 1, got n_t={n_t}, n_r={n_r}")
    grids = lobe_grids(profile, b)
    return _full_codebook(n_t, grids, profile), _full_codebook(n_r, grids, profile)


def subarray_windows(n_antennas: int, n_rf: int) -> list[range]:
    if n_rf < 1 or n_antennas % n_rf:
        raise InvalidConfiguration(f"{n_antennas} antennas cannot be split evenly over {n_rf} RF chains")
    n_sub = n_antennas // n_rf
    return [range(k * n_sub, (k + 1) * n_sub) for k in range(n_rf)]


def _block_codebook(n_antennas: int, n_rf: int, grids, profile) -> Codebook:
    windows = subarray_windows(n_antennas, n_rf)
    n_sub = n_antennas // n_rf
    Q = profile.Q
    blocks, lobe_of, slot_of = [], [], []
    for g in grids:
        for q in range(Q):
            slot = g.lobe_index * Q + q
            block = np.zeros((n_antennas, len(g)), dtype=complex)
            # absolute antenna indices set the phase; normalization is per subarray
            block[windows[slot].start:windows[slot].stop] = (
                steering_matrix(g.angles, n_sub, indices=windows[slot]))
            blocks.append(block)
            lobe_of.append(np.full(len(g), g.lobe_index))
            slot_of.append(np.full(len(g), slot))
    words = np.hstack(blocks)
    return Codebook(structure=Structure.SUB_ARRAY_BLOCK, lobes=grids, codewords=words,
                    bits_per_index=index_bits(words.shape[1]),
                    column_lobe=np.concatenate(lobe_of), column_slot=np.concatenate(slot_of),
                    n_sub=n_sub, profile=profile)


def build_nuq_codebook_sub(n_t: int, n_r: int, n_rf: int, b: int,
                           profile: SpatialLobeProfile) -> tuple[Codebook, Codebook]:
    """Block NUQ codebooks for the sub-connected structure.

    Subpath ``q`` of lobe ``i`` owns subarray window ``i*Q + q``; its candidate
    columns are lobe ``i``'s grid evaluated on that window only.  Windows past
    ``P*Q`` receive no columns.
    """
    if profile.P * profile.Q > n_rf:
        raise InvalidConfiguration(
            f"P*Q = {profile.P * profile.Q} paths exceed the {n_rf} available RF chains")
    subarray_windows(n_t, n_rf)
    subarray_windows(n_r, n_rf)
    grids = lobe_grids(profile, b)
    return _block_codebook(n_t, n_rf, grids, profile), _block_codebook(n_r, n_rf, grids, profile)


def feedback_bits(codebook: Codebook, n_selected_columns: int) -> int:
    if n_selected_columns < 1:
        raise InvalidArgument(f"n_selected_columns must be >= 1, got {n_selected_columns}")
    return n_selected_columns * codebook.bits_per_index
