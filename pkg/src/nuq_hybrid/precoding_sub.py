"""NUQ-HYP-Sub: hybrid design for the sub-connected structure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .codebooks import Codebook, Structure, subarray_windows
from .errors import InvalidConfiguration
from .precoding_full import PrecoderSet, first_max, lobe_digital_stage


@dataclass(frozen=True)
class SubArrayLayout:
    n_rf: int
    n_t_sub: int
    n_r_sub: int

    @classmethod
    def from_counts(cls, n_t: int, n_r: int, n_rf: int) -> "SubArrayLayout":
        subarray_windows(n_t, n_rf)
        subarray_windows(n_r, n_rf)
        return cls(n_rf=n_rf, n_t_sub=n_t // n_rf, n_r_sub=n_r // n_rf)

    @property
    def tx_windows(self) -> tuple[range, ...]:
        return tuple(subarray_windows(self.n_rf * self.n_t_sub, self.n_rf))

    @property
    def rx_windows(self) -> tuple[range, ...]:
        return tuple(subarray_windows(self.n_rf * self.n_r_sub, self.n_rf))


def _check(cb: Codebook, n_sub: int, n_antennas: int, channel: ChannelRealization, side: str) -> None:
    if cb.structure is not Structure.SUB_ARRAY_BLOCK:
        raise InvalidConfiguration(f"{side} codebook must be a sub-array block codebook")
    if cb.n_antennas != n_antennas or cb.n_sub != n_sub:
        raise InvalidConfiguration(
            f"{side} codebook ({cb.n_antennas} antennas, windows of {cb.n_sub}) does not match the layout "
            f"({n_antennas} antennas, windows of {n_sub})")
    if cb.profile is None or cb.profile != channel.profile:
        raise InvalidConfiguration(f"{side} codebook was not built from the channel's lobe profile")


def select_in_window(codebook: Codebook, slot: int, reference: np.ndarray) -> int:
    """Column of ``slot``'s candidate block with the largest |projection| onto
    ``reference`` (a full-array steering vector).  Returns a global column index."""
    cols = codebook.slot_columns(slot)
    w = codebook.window(slot)
    # candidates vanish outside the window, so only that segment contributes
    scores = np.abs(codebook.codewords[w, cols].conj().T @ reference[w])
    return int(cols[first_max(scores)])


def nuq_hyp_sub(channel: ChannelRealization, cb_t: Codebook, cb_r: Codebook,
                layout: SubArrayLayout) -> PrecoderSet:
    """Subpath ``q`` of lobe ``i`` is steered by subarray ``i*Q + q`` at both ends.

    ``F_RF``/``W_RF`` keep all ``n_rf`` columns; windows past ``P*Q`` stay zero
    and so do the matching baseband rows.
    """
    if channel.profile is None:
        raise InvalidConfiguration("NUQ-HYP-Sub needs a spatial-lobe channel (profile is missing)")
    P, Q = channel.profile.P, channel.profile.Q
    if P * Q > layout.n_rf:
        raise InvalidConfiguration(f"P*Q = {P * Q} paths exceed the {layout.n_rf} RF chains")
    if channel.n_t != layout.n_rf * layout.n_t_sub or channel.n_r != layout.n_rf * layout.n_r_sub:
        raise InvalidConfiguration("channel dimensions do not match the sub-array layout")
    _check(cb_t, layout.n_t_sub, channel.n_t, channel, "transmit")
    _check(cb_r, layout.n_r_sub, channel.n_r, channel, "receive")

    F_RF = np.zeros((channel.n_t, layout.n_rf), dtype=complex)
    W_RF = np.zeros((channel.n_r, layout.n_rf), dtype=complex)
    tx_idx, rx_idx = [], []
    for slot in range(P * Q):
        k_t = select_in_window(cb_t, slot, channel.A_t[:, slot])
        k_r = select_in_window(cb_r, slot, channel.A_r[:, slot])
        F_RF[:, slot] = cb_t.codewords[:, k_t]
        W_RF[:, slot] = cb_r.codewords[:, k_r]
        tx_idx.append(k_t)
        rx_idx.append(k_r)

    F_BB, W_BB = lobe_digital_stage(channel, F_RF, W_RF, P, Q)
    return PrecoderSet(F_RF=F_RF, F_BB=F_BB, W_RF=W_RF, W_BB=W_BB, structure=Structure.SUB_ARRAY_BLOCK,
                       selected_tx_indices=tuple(tx_idx), selected_rx_indices=tuple(rx_idx),
                       metadata={"rf_chains_used": P * Q})
