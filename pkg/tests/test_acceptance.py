"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""

import dataclasses
import functools
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nuq_hybrid.channel import SpatialLobeProfile, generate_channel, sample_lobe_profile  # noqa: E402
from nuq_hybrid.codebooks import (build_nuq_codebook_full, build_nuq_codebook_sub, build_uq_codebook,  # noqa: E402
                                  equivalent_bits, lobe_grids)
from nuq_hybrid.harness import DEFAULT_SNR_GRID, ScenarioConfig, Scheme, run_scenario, run_trials  # noqa: E402
from nuq_hybrid.harness import scheme_feedback_bits, write_results  # noqa: E402
from nuq_hybrid.metrics import LinkBudget, spectral_efficiency  # noqa: E402
from nuq_hybrid.precoding_full import fully_digital, nuq_hyp_full, uq_omp  # noqa: E402
from nuq_hybrid.precoding_sub import SubArrayLayout, nuq_hyp_sub  # noqa: E402

from oracles import (exhaustive_per_path, exhaustive_top_q, exhaustive_window_argmax,  # noqa: E402
                     omp_replay)

TRIALS = 200
SEED = 0
RESULTS: list[str] = []


def report(criterion: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    RESULTS.append(line)
    print(line)


@functools.lru_cache(maxsize=None)
def per_trial(config: ScenarioConfig) -> dict:
    return run_trials(config)


def ratio_with_stderr(x: np.ndarray, y: np.ndarray):
    """mean(x)/mean(y) per column and its paired delta-method standard error."""
    r = x.mean(0) / y.mean(0)
    se = (x - r * y).std(0, ddof=1) / np.sqrt(x.shape[0]) / y.mean(0)
    return r, se


def fmt(v) -> str:
    return "[" + ", ".join(f"{x:.4f}" for x in np.atleast_1d(v)) + "]"


def full_config(P, Q=2, n_rf=8, b=8, schemes=(Scheme.NUQ_FULL, Scheme.UQ_OMP, Scheme.FULLY_DIGITAL)):
    return ScenarioConfig(n_t=144, n_r=36, n_rf_t=n_rf, n_rf_r=n_rf, P=P, Q=Q, b=b, snr_grid_db=DEFAULT_SNR_GRID,
                          trials=TRIALS, seed=SEED, schemes=schemes)


@pytest.mark.parametrize("P", [2, 3, 4])
def test_criterion_1_near_fully_digital(P):
    runs = per_trial(full_config(P))
    r, se = ratio_with_stderr(runs[Scheme.NUQ_FULL], runs[Scheme.FULLY_DIGITAL])
    ok = bool(np.all(r - 3 * se >= 0.95))
    report(f"1 (P={P})", ok, f"NUQ_FULL/FULLY_DIGITAL min ratio {r.min():.4f}, stderr {se.max():.4f}, "
                             f"min(ratio - 3 se) {np.min(r - 3 * se):.4f} >= 0.95")
    assert ok


@pytest.mark.parametrize("P", [2, 3, 4])
def test_criterion_2_dominates_uq_omp(P):
    runs = per_trial(full_config(P))
    nuq, uq = runs[Scheme.NUQ_FULL], runs[Scheme.UQ_OMP]
    diff = nuq - uq
    se = diff.std(0, ddof=1) / np.sqrt(diff.shape[0])
    ok = bool(np.all(diff.mean(0) >= -se))
    report(f"2 (P={P})", ok, f"mean(NUQ_FULL) - mean(UQ_OMP) min {diff.mean(0).min():.4f} bits/s/Hz "
                             f"(paired stderr {se.max():.4f})")
    assert ok


def test_criterion_3_one_bit_saving():
    nuq_cfg = full_config(2, 2, n_rf=4, b=7, schemes=(Scheme.NUQ_FULL,))
    uq_cfg = full_config(2, 2, n_rf=4, b=8, schemes=(Scheme.UQ_OMP,))
    nuq = per_trial(nuq_cfg)[Scheme.NUQ_FULL]
    uq = per_trial(uq_cfg)[Scheme.UQ_OMP]
    r = nuq.mean(0) / uq.mean(0)
    close = bool(np.all(np.abs(r - 1) <= 0.03))
    # feedback at equal angular accuracy: NUQ b=7 over a range of pi has the step of UQ b=8
    step_nuq = math.pi / 2 ** 7
    step_uq = 2 * math.pi / 2 ** 8
    fb_nuq = scheme_feedback_bits(nuq_cfg, Scheme.NUQ_FULL)
    fb_uq = scheme_feedback_bits(uq_cfg, Scheme.UQ_OMP)
    saving = 1 - fb_nuq / fb_uq
    eq_bits = equivalent_bits(7, [math.pi / 2, math.pi / 2])
    fb_ok = math.isclose(step_nuq, step_uq) and saving >= 0.125 - 1e-12 and math.isclose(eq_bits, 8)
    ok = close and fb_ok
    report("3", ok, f"NUQ_FULL(b=7)/UQ_OMP(b=8) in {fmt([r.min(), r.max()])} (need within +/-3%); "
                    f"feedback {fb_nuq} vs {fb_uq} bits, saving {saving:.1%} (need >= 12.5%)")
    assert close, r
    assert fb_ok


def test_criterion_4_equivalent_bits():
    rng = np.random.default_rng(4)
    mismatches = 0
    for _ in range(100):
        b = int(rng.integers(1, 17))
        P = int(rng.integers(1, 7))
        ranges = rng.dirichlet(np.ones(P)) * rng.uniform(0.05, 1.0) * 2 * math.pi
        expected = b - math.log2(sum(ranges) / (2 * math.pi))
        mismatches += equivalent_bits(b, ranges) != pytest.approx(expected, rel=0, abs=1e-12)
    half = all(equivalent_bits(b, [math.pi]) == b + 1 for b in range(1, 17))
    ok = mismatches == 0 and half
    report("4", ok, f"{mismatches} mismatches over 100 random pairs; b+1 at total range pi: {half}")
    assert ok


@pytest.mark.parametrize("P, Q", [(2, 1), (3, 1), (2, 2)])
def test_criterion_5_sub_vs_full_uq(P, Q):
    config = full_config(P, Q, n_rf=P * Q, b=6, schemes=(Scheme.NUQ_SUB, Scheme.UQ_OMP))
    runs = per_trial(config)
    r, se = ratio_with_stderr(runs[Scheme.NUQ_SUB], runs[Scheme.UQ_OMP])
    ok = bool(np.all(r >= 0.87))
    report(f"5 (P={P}, Q={Q})", ok, f"NUQ_SUB/UQ_OMP min ratio {r.min():.4f} (stderr {se.max():.4f}) >= 0.87")
    assert ok


def test_criterion_6_sub_bit_sufficiency():
    def sub(b):
        return per_trial(full_config(3, 1, n_rf=3, b=b, schemes=(Scheme.NUQ_SUB,)))[Scheme.NUQ_SUB]
    r, se = ratio_with_stderr(sub(6), sub(10))
    ok = bool(np.all(r >= 0.99))
    report("6a (sub, P=3, Q=1)", ok, f"NUQ_SUB(b=6)/NUQ_SUB(b=10) per SNR {fmt(r)}, min {r.min():.4f} "
                                     f"(stderr {se.max():.4f}), need >= 0.99")
    assert ok


def test_criterion_6_full_needs_more_bits():
    def full(b):
        return per_trial(full_config(2, 2, n_rf=4, b=b, schemes=(Scheme.NUQ_FULL,)))[Scheme.NUQ_FULL]
    r, se = ratio_with_stderr(full(6), full(10))
    ok = bool(np.all(r < 0.99))
    report("6b (full, P=2, Q=2)", ok, f"NUQ_FULL(b=6)/NUQ_FULL(b=10) max {r.max():.4f} "
                                      f"(stderr {se.max():.4f}), need < 0.99")
    assert ok


def test_criterion_7_oracle_equivalence():
    rng = np.random.default_rng(7)
    n = 1000
    counts = {"per_path": 0, "top_q": 0, "sub": 0, "omp": 0}
    mismatches = dict.fromkeys(counts, 0)
    while min(counts.values()) < n:
        P, Q = int(rng.integers(1, 3)), int(rng.integers(1, 3))
        n_t, n_r, b = int(rng.integers(1, 9)), int(rng.integers(1, 5)), int(rng.integers(1, 5))
        profile = sample_lobe_profile(P, Q, rng)
        ch = generate_channel(profile, n_t, n_r, rng)
        cb_t, cb_r = build_nuq_codebook_full(n_t, n_r, b, profile)
        modes = ["per_path"] + (["top_q"] if min(len(g) for g in cb_t.lobes) >= Q else [])
        for mode in modes:
            pre = nuq_hyp_full(ch, cb_t, cb_r, selection=mode)
            for cb, A, picked in ((cb_t, ch.A_t, pre.selected_tx_indices), (cb_r, ch.A_r, pre.selected_rx_indices)):
                for i in range(P):
                    cols = cb.lobe_columns(i)
                    C, ref = cb.codewords[:, cols], A[:, ch.lobe_columns(i)]
                    got = list(picked[i * Q:(i + 1) * Q])
                    if mode == "per_path":
                        want = [int(cols[m]) for m in exhaustive_per_path(C, ref)]
                    else:
                        want, got = [int(cols[m]) for m in exhaustive_top_q(C, ref, Q)], sorted(got)
                    mismatches[mode] += got != want
            counts[mode] += 1

        # sub-connected: two subarrays of up to 4 antennas
        n_rf = P * Q + int(rng.integers(0, 2))
        n_t_sub, n_r_sub = int(rng.integers(1, 5)), int(rng.integers(1, 3))
        if n_rf * n_t_sub <= 8 or counts["sub"] < n:
            ch_s = generate_channel(profile, n_rf * n_t_sub, n_rf * n_r_sub, rng)
            layout = SubArrayLayout.from_counts(ch_s.n_t, ch_s.n_r, n_rf)
            s_t, s_r = build_nuq_codebook_sub(ch_s.n_t, ch_s.n_r, n_rf, b, profile)
            pre = nuq_hyp_sub(ch_s, s_t, s_r, layout)
            grids = lobe_grids(profile, b)
            for cb, A, n_sub, picked in ((s_t, ch_s.A_t, n_t_sub, pre.selected_tx_indices),
                                         (s_r, ch_s.A_r, n_r_sub, pre.selected_rx_indices)):
                for slot in range(P * Q):
                    window = range(slot * n_sub, (slot + 1) * n_sub)
                    m = exhaustive_window_argmax(grids[slot // Q].angles, window, A[:, slot])
                    mismatches["sub"] += picked[slot] != int(cb.slot_columns(slot)[m])
            counts["sub"] += 1

        # OMP on the fully-digital precoder of a random channel
        n_s = int(rng.integers(1, min(n_t, 3) + 1))
        n_rf_omp = int(rng.integers(n_s, min(2 ** b, n_s + 3) + 1)) if n_s <= 2 ** b else None
        if n_rf_omp is not None:
            H = rng.normal(size=(3, n_t)) + 1j * rng.normal(size=(3, n_t))
            F_opt = fully_digital(H, n_s).F_RF
            D = build_uq_codebook(n_t, b)
            res = uq_omp(F_opt, D, n_rf_omp, normalize=False)
            picked, _ = omp_replay(F_opt, D.codewords, n_rf_omp)
            mismatches["omp"] += list(res.indices) != picked
            counts["omp"] += 1
    ok = sum(mismatches.values()) == 0
    report("7", ok, "mismatches " + ", ".join(f"{k} {mismatches[k]}/{counts[k]}" for k in counts))
    assert ok


def _invariants_on(rng, failures: list[str]):
    P, Q = int(rng.integers(1, 4)), int(rng.integers(1, 3))
    n_rf = P * Q + int(rng.integers(0, 3))
    n_t, n_r = n_rf * int(rng.integers(2, 7)), n_rf * int(rng.integers(1, 4))
    b = int(rng.integers(3, 9))
    profile = sample_lobe_profile(P, Q, rng)
    ch = generate_channel(profile, n_t, n_r, rng)
    scale = np.sqrt(n_t * n_r / (P * Q))
    if np.max(np.abs(ch.H - ch.A_r @ np.diag(scale * ch.gains) @ ch.A_t.conj().T)) > 1e-10:
        failures.append("compact form")

    def block_diag(M):
        mask = np.zeros(M.shape, dtype=bool)
        for i in range(P):
            mask[i * Q:(i + 1) * Q, i * Q:(i + 1) * Q] = True
        return np.all(np.abs(M[~mask]) <= 1e-12)

    cb_t, cb_r = build_nuq_codebook_full(n_t, n_r, b, profile)
    pre = nuq_hyp_full(ch, cb_t, cb_r, n_rf, n_rf)
    if abs(pre.transmit_power - P * Q) > 1e-9:
        failures.append("full power")
    if np.max(np.abs(np.abs(pre.F_RF) - 1 / np.sqrt(n_t))) > 1e-12 or \
            np.max(np.abs(np.abs(pre.W_RF) - 1 / np.sqrt(n_r))) > 1e-12:
        failures.append("constant modulus")
    if not (block_diag(pre.F_BB) and block_diag(pre.W_BB)):
        failures.append("full block-diagonal digital")

    s_t, s_r = build_nuq_codebook_sub(n_t, n_r, n_rf, b, profile)
    sub = nuq_hyp_sub(ch, s_t, s_r, SubArrayLayout.from_counts(n_t, n_r, n_rf))
    if abs(sub.transmit_power - P * Q) > 1e-9:
        failures.append("sub power")
    for M, n_sub in ((sub.F_RF, n_t // n_rf), (sub.W_RF, n_r // n_rf)):
        for j in range(n_rf):
            outside = np.ones(M.shape[0], dtype=bool)
            outside[j * n_sub:(j + 1) * n_sub] = False
            inside = M[~outside, j]
            if np.any(M[outside, j] != 0):
                failures.append("sub block support")
            if j < P * Q and np.max(np.abs(np.abs(inside) - 1 / np.sqrt(n_sub))) > 1e-12:
                failures.append("sub modulus")
    if not (block_diag(sub.F_BB[:P * Q]) and block_diag(sub.W_BB[:P * Q])):
        failures.append("sub block-diagonal digital")

    fd = fully_digital(ch.H, P * Q)
    sigma = np.linalg.svd(ch.H, compute_uv=False)[:P * Q]
    for snr_db in (-10.0, 0.0, 10.0):
        closed = np.sum(np.log2(1 + 10 ** (snr_db / 10) * sigma ** 2 / (P * Q)))
        if abs(spectral_efficiency(ch.H, fd, LinkBudget(snr_db, P * Q)) - closed) > 1e-9 * max(1, closed):
            failures.append("fully-digital closed form")


def test_criterion_8_invariants(tmp_path):
    rng = np.random.default_rng(8)
    failures: list[str] = []
    for _ in range(300):
        _invariants_on(rng, failures)
    config = ScenarioConfig(n_t=32, n_r=16, n_rf_t=4, n_rf_r=4, P=2, Q=2, b=6, trials=20, seed=99,
                            schemes=(Scheme.NUQ_FULL, Scheme.UQ_OMP, Scheme.FULLY_DIGITAL))
    blobs = []
    for i, workers in enumerate((1, 1, 2)):
        p = tmp_path / f"rerun{i}.csv"
        write_results(run_scenario(config, workers=workers), p)
        blobs.append(p.read_bytes())
    if not blobs[0] == blobs[1] == blobs[2]:
        failures.append("byte-identical reruns")
    ok = not failures
    report("8", ok, "300 random instances + 3 reruns; violations: " + (", ".join(sorted(set(failures))) or "none"))
    assert ok


if __name__ == "__main__":
    import tempfile
    tests = [(name, fn) for name, fn in sorted(globals().items()) if name.startswith("test_criterion")]
    for name, fn in tests:
        params = getattr(fn, "pytestmark", [])
        cases = [dict(zip(m.args[0].replace(" ", "").split(","), v if isinstance(v, tuple) else (v,)))
                 for m in params if m.name == "parametrize" for v in m.args[1]] or [{}]
        for kwargs in cases:
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(tmp_path=Path(d), **kwargs)
                else:
                    fn(**kwargs)
            except AssertionError:
                pass
    print(f"{sum(line.startswith('[PASS]') for line in RESULTS)}/{len(RESULTS)} criterion checks passed")
