"""Mean spectral efficiency against quantization bits, relative to b=10.

Contrasts the sub-connected design (P=3, Q=1, N_RF=3) with the full-connected
one (P=2, Q=2, N_RF=4) on the 144/36 array.
"""

import argparse

import numpy as np

from nuq_hybrid.harness import ScenarioConfig, Scheme, run_trials


def relative_curve(base: ScenarioConfig, scheme: Scheme, bits, ref_bits=10):
    ref = run_trials(ScenarioConfig(**{**base.to_dict(), "b": ref_bits}))[scheme].mean(0)
    return {b: run_trials(ScenarioConfig(**{**base.to_dict(), "b": b}))[scheme].mean(0) / ref for b in bits}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    common = dict(n_t=144, n_r=36, trials=args.trials, seed=args.seed)
    cases = [
        ("sub  P=3 Q=1", ScenarioConfig(n_rf_t=3, n_rf_r=3, P=3, Q=1, schemes=(Scheme.NUQ_SUB,), **common),
         Scheme.NUQ_SUB),
        ("full P=2 Q=2", ScenarioConfig(n_rf_t=4, n_rf_r=4, P=2, Q=2, schemes=(Scheme.NUQ_FULL,), **common),
         Scheme.NUQ_FULL),
    ]
    for label, base, scheme in cases:
        print(label)
        for b, r in relative_curve(base, scheme, range(4, 10)).items():
            print(f"  b={b}: ratio to b=10 over SNR grid min {np.min(r):.4f} max {np.max(r):.4f}")


if __name__ == "__main__":
    main()
