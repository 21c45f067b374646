"""Monte Carlo scenarios, parameter sweeps and result files.

Every trial draws a fresh lobe profile and channel from its own RNG stream and
runs all requested schemes on that same draw.  A trial's stream depends only
on the root seed, the trial index and the parameters that shape the channel
(antenna counts, P, Q), so configurations that differ only in bits or RF
chains see identical realizations, and worker count never changes results.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import functools
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import SpatialLobeProfile, generate_channel, sample_lobe_profile
from .codebooks import (build_nuq_codebook_full, build_nuq_codebook_sub, build_uq_codebook,
                        feedback_bits)
from .errors import InvalidArgument, InvalidConfiguration
from .metrics import spectral_efficiency_curve
from .precoding_full import fully_digital, nuq_hyp_full, uq_omp_design
from .precoding_sub import SubArrayLayout, nuq_hyp_sub

log = logging.getLogger(__name__)

CSV_HEADER = ("scheme", "snr_db", "mean_se", "stderr_se", "trials", "feedback_bits", "config_digest")
DEFAULT_SNR_GRID = tuple(float(s) for s in range(-10, 11, 2))
HALF_RANGE = "half_range"


class Scheme(str, enum.Enum):
    NUQ_FULL = "NUQ_FULL"
    UQ_OMP = "UQ_OMP"
    FULLY_DIGITAL = "FULLY_DIGITAL"
    NUQ_SUB = "NUQ_SUB"


class Axis(str, enum.Enum):
    SNR = "snr"
    BITS = "bits"
    RF_CHAINS = "rf_chains"
    TX_ANTENNAS = "tx_antennas"
    BOTH_ANTENNAS = "both_antennas"
    LOBES = "lobes"
    SUBPATHS = "subpaths"


class TrialFailure(RuntimeError):
    def __init__(self, trial: int, cause: Exception):
        super().__init__(f"trial {trial} failed: {type(cause).__name__}: {cause}")
        self.trial = trial
        self.cause = cause


@dataclass(frozen=True)
class ScenarioConfig:
    n_t: int = 144
    n_r: int = 36
    n_rf_t: int = 8
    n_rf_r: int = 8
    P: int = 2
    Q: int = 2
    b: int = 8
    snr_grid_db: tuple[float, ...] = DEFAULT_SNR_GRID
    trials: int = 200
    seed: int = 0
    schemes: tuple[Scheme, ...] = (Scheme.NUQ_FULL, Scheme.UQ_OMP, Scheme.FULLY_DIGITAL)
    quant_range_policy: str | tuple[float, ...] = HALF_RANGE

    def __post_init__(self):
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))
        if not isinstance(self.quant_range_policy, str):
            object.__setattr__(self, "quant_range_policy", tuple(float(r) for r in self.quant_range_policy))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n_s(self) -> int:
        return self.P * self.Q

    def quant_ranges(self) -> tuple[float, ...] | None:
        if isinstance(self.quant_range_policy, str):
            if self.quant_range_policy != HALF_RANGE:
                raise InvalidConfiguration(
                    f"quant_range_policy must be {HALF_RANGE!r} or a list, got {self.quant_range_policy!r}")
            return None
        return self.quant_range_policy

    def reference_profile(self) -> SpatialLobeProfile:
        """Profile at zero offset; coverage checks and codebook sizes do not depend on the offset."""
        return SpatialLobeProfile.default(self.P, self.Q, 0.0, quant_ranges=self.quant_ranges())

    def validate(self) -> None:
        if self.trials < 1:
            raise InvalidConfiguration(f"trials must be >= 1, got {self.trials}")
        if not self.schemes:
            raise InvalidConfiguration("at least one scheme is required")
        if not self.snr_grid_db:
            raise InvalidConfiguration("snr_grid_db is empty")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidConfiguration(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if min(self.n_t, self.n_r, self.n_rf_t, self.n_rf_r, self.P, self.Q, self.b) < 1:
            raise InvalidConfiguration("antenna, RF-chain, lobe, subpath and bit counts must all be >= 1")
        if self.n_s > min(self.n_t, self.n_r):
            raise InvalidConfiguration(f"N_s = P*Q = {self.n_s} exceeds min(n_t, n_r)")
        quant = self.quant_ranges()
        if quant is not None and len(quant) != self.P:
            raise InvalidConfiguration(f"quant_range_policy lists {len(quant)} ranges, expected P={self.P}")
        self.reference_profile()  # raises InvalidProfile on coverage violations
        hybrid = {Scheme.NUQ_FULL, Scheme.UQ_OMP, Scheme.NUQ_SUB} & set(self.schemes)
        if hybrid and self.n_s > min(self.n_rf_t, self.n_rf_r):
            raise InvalidConfiguration(
                f"N_s = P*Q = {self.n_s} exceeds the RF chains ({self.n_rf_t}/{self.n_rf_r})")
        if Scheme.UQ_OMP in self.schemes and max(self.n_rf_t, self.n_rf_r) > 2 ** self.b:
            raise InvalidConfiguration(f"UQ-OMP needs n_rf <= 2**b = {2 ** self.b}")
        if Scheme.NUQ_SUB in self.schemes:
            if self.n_rf_t != self.n_rf_r:
                raise InvalidConfiguration("the sub-connected structure needs n_rf_t == n_rf_r")
            SubArrayLayout.from_counts(self.n_t, self.n_r, self.n_rf_t)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["snr_grid_db"] = list(self.snr_grid_db)
        d["schemes"] = [s.value for s in self.schemes]
        if not isinstance(self.quant_range_policy, str):
            d["quant_range_policy"] = list(self.quant_range_policy)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise InvalidConfiguration(f"unknown scenario keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except (TypeError, ValueError) as exc:
            raise InvalidConfiguration(f"bad scenario value: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ResultRecord:
    scheme: str
    snr_db: float
    mean_se: float
    stderr_se: float
    trials: int
    feedback_bits: int
    config_digest: str


class RunningStats:
    """Welford accumulator for a vector of per-SNR values."""

    def __init__(self, shape):
        self.n = 0
        self.mean = np.zeros(shape)
        self._m2 = np.zeros(shape)

    def push(self, x) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.n
        self._m2 = self._m2 + delta * (x - self.mean)

    @property
    def stderr(self) -> np.ndarray:
        if self.n < 2:
            return np.zeros_like(self.mean)
        return np.sqrt(self._m2 / (self.n - 1) / self.n)


def _channel_key(config: ScenarioConfig) -> int:
    blob = f"{config.n_t}:{config.n_r}:{config.P}:{config.Q}".encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:4], "little")


def trial_rng(config: ScenarioConfig, trial: int) -> np.random.Generator:
    seq = np.random.SeedSequence(config.seed, spawn_key=(_channel_key(config), trial))
    return np.random.default_rng(seq)


@functools.lru_cache(maxsize=32)
def _uq_codebook(n_antennas: int, b: int):
    return build_uq_codebook(n_antennas, b)


def draw_realization(config: ScenarioConfig, trial: int):
    rng = trial_rng(config, trial)
    profile = sample_lobe_profile(config.P, config.Q, rng, quant_ranges=config.quant_ranges())
    return profile, generate_channel(profile, config.n_t, config.n_r, rng)


def design(config: ScenarioConfig, scheme: Scheme, channel):
    """Precoder set for one scheme on one realization."""
    profile = channel.profile
    if scheme is Scheme.FULLY_DIGITAL:
        return fully_digital(channel.H, config.n_s)
    if scheme is Scheme.NUQ_FULL:
        cb_t, cb_r = build_nuq_codebook_full(config.n_t, config.n_r, config.b, profile)
        return nuq_hyp_full(channel, cb_t, cb_r, config.n_rf_t, config.n_rf_r)
    if scheme is Scheme.UQ_OMP:
        return uq_omp_design(channel.H, _uq_codebook(config.n_t, config.b), _uq_codebook(config.n_r, config.b),
                             config.n_rf_t, config.n_rf_r, config.n_s)
    if scheme is Scheme.NUQ_SUB:
        layout = SubArrayLayout.from_counts(config.n_t, config.n_r, config.n_rf_t)
        cb_t, cb_r = build_nuq_codebook_sub(config.n_t, config.n_r, layout.n_rf, config.b, profile)
        return nuq_hyp_sub(channel, cb_t, cb_r, layout)
    raise InvalidArgument(f"unknown scheme {scheme!r}")


def scheme_feedback_bits(config: ScenarioConfig, scheme: Scheme) -> int:
    """Bits to report the transmit analog precoder's codeword indices."""
    if scheme is Scheme.FULLY_DIGITAL:
        return 0
    if scheme is Scheme.UQ_OMP:
        return feedback_bits(_uq_codebook(config.n_t, config.b), config.n_rf_t)
    profile = config.reference_profile()
    if scheme is Scheme.NUQ_FULL:
        cb_t, _ = build_nuq_codebook_full(config.n_t, config.n_r, config.b, profile)
    else:
        cb_t, _ = build_nuq_codebook_sub(config.n_t, config.n_r, config.n_rf_t, config.b, profile)
    return feedback_bits(cb_t, config.n_s)


def run_trial(config: ScenarioConfig, trial: int) -> dict[Scheme, np.ndarray]:
    try:
        _, channel = draw_realization(config, trial)
        return {s: spectral_efficiency_curve(channel.H, design(config, s, channel), config.snr_grid_db)
                for s in config.schemes}
    except Exception as exc:
        raise TrialFailure(trial, exc) from exc


def _run_chunk(config: ScenarioConfig, trials: range):
    return [run_trial(config, t) for t in trials]


def run_trials(config: ScenarioConfig, workers: int = 1) -> dict[Scheme, np.ndarray]:
    """Per-trial spectral efficiencies, shape ``(trials, len(snr_grid_db))`` per scheme."""
    config.validate()
    if workers <= 1:
        per_trial = [run_trial(config, t) for t in range(config.trials)]
    else:
        step = math.ceil(config.trials / workers)
        chunks = [range(lo, min(lo + step, config.trials)) for lo in range(0, config.trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_trial = [r for chunk in pool.map(_run_chunk, [config] * len(chunks), chunks) for r in chunk]
    return {s: np.vstack([r[s] for r in per_trial]) for s in config.schemes}


def aggregate(config: ScenarioConfig, per_trial: dict[Scheme, np.ndarray]) -> list[ResultRecord]:
    digest = config.digest()
    records = []
    for scheme in config.schemes:
        stats = RunningStats(len(config.snr_grid_db))
        for row in per_trial[scheme]:
            stats.push(row)
        fb = scheme_feedback_bits(config, scheme)
        for snr, m, se in zip(config.snr_grid_db, stats.mean, stats.stderr):
            records.append(ResultRecord(scheme.value, snr, float(m), float(se), stats.n, fb, digest))
    return records


def run_scenario(config: ScenarioConfig, workers: int = 1) -> list[ResultRecord]:
    return aggregate(config, run_trials(config, workers))


def cell_config(config: ScenarioConfig, axis: Axis, value) -> ScenarioConfig:
    axis = Axis(axis)
    if axis is Axis.SNR:
        return dataclasses.replace(config, snr_grid_db=(float(value),))
    v = int(value)
    changes = {
        Axis.BITS: {"b": v},
        Axis.RF_CHAINS: {"n_rf_t": v, "n_rf_r": v},
        Axis.TX_ANTENNAS: {"n_t": v},
        Axis.BOTH_ANTENNAS: {"n_t": v, "n_r": v},
        Axis.LOBES: {"P": v},
        Axis.SUBPATHS: {"Q": v},
    }[axis]
    return dataclasses.replace(config, **changes)


def sweep(config: ScenarioConfig, axis: Axis, values, workers: int = 1) -> list[ResultRecord]:
    """Run one scenario per axis value; records of all cells, in cell order.

    An SNR sweep is a single scenario over ``values`` as the SNR grid.
    """
    axis = Axis(axis)
    if axis is Axis.SNR:
        return run_scenario(dataclasses.replace(config, snr_grid_db=tuple(values)), workers)
    cells = [cell_config(config, axis, v) for v in values]
    for cell in cells:
        cell.validate()
    return [r for cell in cells for r in run_scenario(cell, workers)]


def _fmt(x) -> str:
    return f"{x:.6g}"


def write_csv(records, fh) -> None:
    """CSV rows sorted by (scheme, snr_db); floats to 6 significant digits."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in sorted(records, key=lambda r: (r.scheme, r.snr_db)):
        w.writerow([r.scheme, _fmt(r.snr_db), _fmt(r.mean_se), _fmt(r.stderr_se),
                    r.trials, r.feedback_bits, r.config_digest])


def write_results(records, path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            write_csv(records, fh)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def write_results_json(records, path) -> None:
    rows = sorted(records, key=lambda r: (r.scheme, r.snr_db))
    Path(path).write_text(json.dumps([dataclasses.asdict(r) for r in rows], indent=1) + "\n")


def read_results(path) -> list[ResultRecord]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidArgument(f"{path}: unexpected header {reader.fieldnames}")
        return [ResultRecord(row["scheme"], float(row["snr_db"]), float(row["mean_se"]),
                             float(row["stderr_se"]), int(row["trials"]), int(row["feedback_bits"]),
                             row["config_digest"]) for row in reader]
