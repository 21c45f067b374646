"""Hybrid precoder/combiner design for the full-connected structure.

Three designs live here: NUQ-HYP-Full (per-lobe codeword selection followed by
per-lobe SVD), the UQ-OMP baseline (greedy sparse approximation of the SVD
precoder over a uniform beamsteering dictionary), and the unconstrained
fully-digital SVD reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .channel import ChannelRealization
from .codebooks import Codebook, Structure
from .errors import InvalidArgument, InvalidConfiguration


@dataclass(frozen=True, eq=False)
class PrecoderSet:
    F_RF: np.ndarray
    F_BB: np.ndarray
    W_RF: np.ndarray
    W_BB: np.ndarray
    structure: Structure
    selected_tx_indices: tuple[int, ...] = ()
    selected_rx_indices: tuple[int, ...] = ()
    metadata: dict = field(default_factory=dict)

    @property
    def n_s(self) -> int:
        return self.F_BB.shape[1]

    @property
    def F(self) -> np.ndarray:
        return self.F_RF @ self.F_BB

    @property
    def W(self) -> np.ndarray:
        return self.W_RF @ self.W_BB

    @property
    def transmit_power(self) -> float:
        return float(np.linalg.norm(self.F, "fro") ** 2)


def _normalize_power(F_RF: np.ndarray, F_BB: np.ndarray) -> np.ndarray:
    n_s = F_BB.shape[1]
    return np.sqrt(n_s) * F_BB / np.linalg.norm(F_RF @ F_BB, "fro")


def fully_digital(H: np.ndarray, n_s: int) -> PrecoderSet:
    """Dominant ``n_s`` right/left singular vectors with equal power per stream.

    Represented as a digital-only set: ``F_RF``/``W_RF`` hold the singular
    vectors and the baseband matrices are identities.
    """
    if n_s < 1 or n_s > min(H.shape):
        raise InvalidArgument(f"n_s must lie in [1, {min(H.shape)}], got {n_s}")
    U, _, Vh = np.linalg.svd(H)
    eye = np.eye(n_s, dtype=complex)
    return PrecoderSet(F_RF=Vh.conj().T[:, :n_s], F_BB=eye, W_RF=U[:, :n_s], W_BB=eye.copy(),
                       structure=Structure.DIGITAL)


# scores within this of the maximum count as ties and go to the lowest index;
# sin-aliased duplicate codewords differ only by rounding
TIE_RTOL = 1e-12
TIE_ATOL = 1e-18


def first_max(scores: np.ndarray) -> int:
    """Index of the maximum of a 1-D score vector, lowest index among near-ties."""
    top = np.max(scores)
    return int(np.flatnonzero(scores >= top - (TIE_RTOL * abs(top) + TIE_ATOL))[0])


def select_per_path(candidates: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """For each reference column, the candidate with the largest |projection|.

    This is the exact minimizer of ``||F - reference||_F`` over matrices whose
    columns are drawn from ``candidates`` when projections are compared by
    modulus.  Ties go to the lowest index.
    """
    scores = np.abs(candidates.conj().T @ reference)
    return np.array([first_max(scores[:, q]) for q in range(scores.shape[1])], dtype=int)


def select_top_q(candidates: np.ndarray, reference: np.ndarray, n_select: int) -> np.ndarray:
    """Pick the ``n_select`` candidates with the largest total squared projection
    onto ``reference``, without replacement; ties go to the lowest index."""
    if n_select > candidates.shape[1]:
        raise InvalidConfiguration(
            f"cannot select {n_select} distinct codewords from {candidates.shape[1]} candidates")
    scores = np.sum(np.abs(candidates.conj().T @ reference) ** 2, axis=1)
    picked = []
    for _ in range(n_select):
        k = first_max(scores)
        picked.append(k)
        scores[k] = -np.inf
    return np.asarray(picked)


_SELECTORS = ("per_path", "top_q")


def _check_codebook(cb: Codebook, channel: ChannelRealization, n_antennas: int, side: str) -> None:
    if cb.structure is not Structure.FULL_ARRAY:
        raise InvalidArgument(f"{side} codebook must be a full-array codebook, got {cb.structure.value}")
    if cb.n_antennas != n_antennas:
        raise InvalidArgument(f"{side} codebook has {cb.n_antennas} antennas, channel has {n_antennas}")
    if cb.profile is None or cb.profile != channel.profile:
        raise InvalidArgument(f"{side} codebook was not built from the channel's lobe profile")


def lobe_digital_stage(channel: ChannelRealization, F_RF: np.ndarray, W_RF: np.ndarray,
                       P: int, Q: int):
    """Block-diagonal baseband matrices from the SVD of each lobe's effective channel.

    Column block ``i`` of ``F_RF``/``W_RF`` (columns ``i*Q .. i*Q+Q-1``) serves
    lobe ``i``.  Extra RF columns beyond ``P*Q`` get zero baseband rows.
    """
    n_s = P * Q
    F_BB = np.zeros((F_RF.shape[1], n_s), dtype=complex)
    W_BB = np.zeros((W_RF.shape[1], n_s), dtype=complex)
    for i in range(P):
        s = slice(i * Q, (i + 1) * Q)
        H_eq = W_RF[:, s].conj().T @ channel.H @ F_RF[:, s]
        U, _, Vh = np.linalg.svd(H_eq)
        F_BB[s, s] = Vh.conj().T
        W_BB[s, s] = U
    return _normalize_power(F_RF, F_BB), W_BB


def nuq_hyp_full(channel: ChannelRealization, cb_t: Codebook, cb_r: Codebook,
                 n_rf_t: int | None = None, n_rf_r: int | None = None, *,
                 selection: str = "per_path") -> PrecoderSet:
    """NUQ-HYP-Full.

    Lobe by lobe, the true array responses of the lobe's ``Q`` subpaths serve
    as the reference and are quantized against that lobe's sub-codebook.
    ``selection="per_path"`` gives each subpath its best codeword;
    ``"top_q"`` instead takes the ``Q`` codewords with the largest summed
    projection onto the whole lobe.  Only ``P*Q`` RF chains are used.
    """
    if channel.profile is None:
        raise InvalidArgument("NUQ-HYP-Full needs a spatial-lobe channel (profile is missing)")
    if selection not in _SELECTORS:
        raise InvalidArgument(f"selection must be one of {_SELECTORS}, got {selection!r}")
    P, Q = channel.profile.P, channel.profile.Q
    n_rf_t = P * Q if n_rf_t is None else n_rf_t
    n_rf_r = P * Q if n_rf_r is None else n_rf_r
    if P * Q > min(n_rf_t, n_rf_r):
        raise InvalidConfiguration(
            f"P*Q = {P * Q} paths need at least that many RF chains, got {n_rf_t}/{n_rf_r}")
    _check_codebook(cb_t, channel, channel.n_t, "transmit")
    _check_codebook(cb_r, channel, channel.n_r, "receive")

    tx_idx, rx_idx = [], []
    for i in range(P):
        paths = channel.lobe_columns(i)
        for cb, A, out in ((cb_t, channel.A_t, tx_idx), (cb_r, channel.A_r, rx_idx)):
            cols = cb.lobe_columns(i)
            C = cb.codewords[:, cols]
            if selection == "per_path":
                local = select_per_path(C, A[:, paths])
            else:
                local = select_top_q(C, A[:, paths], Q)
            out.extend(int(c) for c in cols[local])

    F_RF = cb_t.codewords[:, tx_idx]
    W_RF = cb_r.codewords[:, rx_idx]
    F_BB, W_BB = lobe_digital_stage(channel, F_RF, W_RF, P, Q)
    return PrecoderSet(F_RF=F_RF, F_BB=F_BB, W_RF=W_RF, W_BB=W_BB, structure=Structure.FULL_ARRAY,
                       selected_tx_indices=tuple(tx_idx), selected_rx_indices=tuple(rx_idx),
                       metadata={"selection": selection, "rf_chains_used": P * Q})


@dataclass(frozen=True, eq=False)
class OmpResult:
    F_RF: np.ndarray
    F_BB: np.ndarray
    indices: tuple[int, ...]
    residual_norm: float
    rank_deficient: bool

    def __iter__(self):
        return iter((self.F_RF, self.F_BB))


def uq_omp(F_opt: np.ndarray, dictionary, n_rf: int, *, normalize: bool = True) -> OmpResult:
    """Orthogonal matching pursuit of ``F_opt`` over the dictionary columns.

    Each step adds the atom with the largest squared correlation against the
    residual, refits the baseband matrix by least squares, and renormalizes the
    residual.  With ``normalize`` the result is scaled to ``||F_RF F_BB||_F^2 =
    n_s``; the combiner side calls this with ``normalize=False``.
    """
    A = dictionary.codewords if isinstance(dictionary, Codebook) else np.asarray(dictionary)
    if n_rf < 1 or n_rf > A.shape[1]:
        raise InvalidArgument(f"n_rf must lie in [1, {A.shape[1]}], got {n_rf}")
    residual = F_opt.copy()
    picked: list[int] = []
    rank_deficient = False
    F_BB = None
    for _ in range(n_rf):
        corr = np.sum(np.abs(A.conj().T @ residual) ** 2, axis=1)
        picked.append(first_max(corr))
        F_RF = A[:, picked]
        F_BB, _, rank, _ = scipy.linalg.lstsq(F_RF, F_opt)
        rank_deficient = rank < len(picked)
        residual = F_opt - F_RF @ F_BB
        norm = np.linalg.norm(residual, "fro")
        if norm > 1e-12:
            residual = residual / norm
    F_RF = A[:, picked]
    residual_norm = float(np.linalg.norm(F_opt - F_RF @ F_BB, "fro"))
    if normalize:
        F_BB = _normalize_power(F_RF, F_BB)
    return OmpResult(F_RF=F_RF, F_BB=F_BB, indices=tuple(picked),
                     residual_norm=residual_norm, rank_deficient=rank_deficient)


def uq_omp_design(H: np.ndarray, cb_t: Codebook, cb_r: Codebook, n_rf_t: int, n_rf_r: int,
                  n_s: int) -> PrecoderSet:
    """UQ-OMP precoder and combiner approximating the fully-digital SVD pair."""
    if n_s > min(n_rf_t, n_rf_r):
        raise InvalidConfiguration(f"{n_s} streams need at least that many RF chains, got {n_rf_t}/{n_rf_r}")
    ref = fully_digital(H, n_s)
    tx = uq_omp(ref.F_RF, cb_t, n_rf_t)
    rx = uq_omp(ref.W_RF, cb_r, n_rf_r, normalize=False)
    return PrecoderSet(F_RF=tx.F_RF, F_BB=tx.F_BB, W_RF=rx.F_RF, W_BB=rx.F_BB,
                       structure=Structure.FULL_ARRAY,
                       selected_tx_indices=tx.indices, selected_rx_indices=rx.indices,
                       metadata={"rank_deficient": tx.rank_deficient or rx.rank_deficient})
