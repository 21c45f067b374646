"""Feedback bits and equivalent bits of NUQ vs UQ codebooks for the 144/36 array.

Prints, per bit budget b, the NUQ codebook size, bits per index, the bits of
angular resolution it matches, and the total feedback for P*Q indices next to
a UQ codebook of the same resolution.
"""

import argparse

import numpy as np

from nuq_hybrid.channel import SpatialLobeProfile
from nuq_hybrid.codebooks import build_nuq_codebook_full, build_uq_codebook, equivalent_bits, feedback_bits


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lobes", type=int, default=2)
    parser.add_argument("--subpaths", type=int, default=2)
    parser.add_argument("--bits", default="4,5,6,7,8,9")
    args = parser.parse_args()

    profile = SpatialLobeProfile.default(args.lobes, args.subpaths, 0.0)
    n_idx = args.lobes * args.subpaths
    total = profile.total_quant_range
    print(f"P={args.lobes} Q={args.subpaths} total quantized range = {total / np.pi:.3f} pi, {n_idx} indices")
    print(f"{'b':>3} {'M':>5} {'bits/idx':>8} {'equiv b':>8} {'NUQ fb':>7} {'UQ fb':>6} {'saving':>7}")
    for b in (int(v) for v in args.bits.split(",")):
        nuq, _ = build_nuq_codebook_full(144, 36, b, profile)
        eq = equivalent_bits(b, profile.quant_ranges)
        uq = build_uq_codebook(144, int(np.ceil(eq - 1e-9)))
        fb_n, fb_u = feedback_bits(nuq, n_idx), feedback_bits(uq, n_idx)
        print(f"{b:>3} {nuq.size:>5} {nuq.bits_per_index:>8} {eq:>8.2f} {fb_n:>7} {fb_u:>6} {1 - fb_n / fb_u:>7.1%}")


if __name__ == "__main__":
    main()
