"""Spectral efficiency of a precoder/combiner set under Gaussian signaling."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InvalidArgument

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkBudget:
    """SNR (rho / sigma_n^2, in dB) and stream count.  Noise power is fixed to 1."""

    snr_db: float
    n_s: int

    def __post_init__(self):
        if self.n_s < 1:
            raise InvalidArgument(f"n_s must be >= 1, got {self.n_s}")

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)


@dataclass(frozen=True)
class EffectiveModes:
    """Whitened stream gains: eigenvalues of R_n^{-1} G G^*, with G = W^* H F."""

    gains: np.ndarray
    n_s: int
    regularized: bool

    def rate(self, snr_linear) -> np.ndarray | float:
        snr = np.asarray(snr_linear, dtype=float)
        r = np.log2(1.0 + np.multiply.outer(snr, self.gains) / self.n_s).sum(axis=-1)
        return float(r) if r.ndim == 0 else r


def effective_modes(H: np.ndarray, F: np.ndarray, W: np.ndarray) -> EffectiveModes:
    """Reduce the log-det rate to ``n_s`` scalar gains.

    R_n = W^* W is factored as L L^*; the rate is then a sum over the
    eigenvalues of the Hermitian matrix L^{-1} G G^* L^{-*}.  A numerically
    singular R_n is loaded with eps*I, eps = 1e-12 * trace(R_n) / n_s.
    """
    n_s = F.shape[1]
    if W.shape[1] != n_s:
        raise InvalidArgument(f"precoder has {n_s} streams, combiner has {W.shape[1]}")
    G = W.conj().T @ H @ F
    Rn = W.conj().T @ W
    regularized = False
    try:
        L = np.linalg.cholesky(Rn)
        if np.linalg.cond(L) > 1e7:
            raise np.linalg.LinAlgError("ill-conditioned noise covariance")
    except np.linalg.LinAlgError:
        eps = 1e-12 * max(np.trace(Rn).real, np.finfo(float).tiny) / n_s
        L = np.linalg.cholesky(Rn + eps * np.eye(n_s))
        regularized = True
        log.debug("noise covariance numerically singular; regularized with eps=%.3g", eps)
    X = scipy.linalg.solve_triangular(L, G, lower=True)
    gains = np.clip(np.linalg.eigvalsh(X @ X.conj().T), 0.0, None)
    return EffectiveModes(gains=gains, n_s=n_s, regularized=regularized)


def spectral_efficiency(H: np.ndarray, precoders, budget: LinkBudget) -> float:
    """Achievable rate in bits/s/Hz for one precoder set at one SNR."""
    F = precoders.F_RF @ precoders.F_BB
    W = precoders.W_RF @ precoders.W_BB
    if F.shape[1] != budget.n_s:
        raise InvalidArgument(f"budget says {budget.n_s} streams, precoder carries {F.shape[1]}")
    if budget.snr_linear == 0.0:
        return 0.0
    return effective_modes(H, F, W).rate(budget.snr_linear)


def spectral_efficiency_curve(H: np.ndarray, precoders, snr_db) -> np.ndarray:
    """Rates over an SNR grid, sharing one factorization."""
    F = precoders.F_RF @ precoders.F_BB
    W = precoders.W_RF @ precoders.W_BB
    snr = 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)
    return np.atleast_1d(effective_modes(H, F, W).rate(snr))


def relative_efficiency(test: float, reference: float) -> float:
    if not reference > 0:
        raise InvalidArgument(f"reference spectral efficiency must be positive, got {reference}")
    return test / reference
