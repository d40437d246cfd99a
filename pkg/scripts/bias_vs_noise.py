"""Bias versus noise: average-guesswork and min-entropy rates on a shared axis.

Writes one CSV with columns x, H_1/2(x), 1-H(x), -log2(1-x) and D(x||1/2 under
noise), plus the slope ratio at the default probe points.
"""
import argparse
import csv
import sys

import numpy as np

from pufguess import analytic


def slope(f, x, h=1e-7):
    return (f(x + h) - f(x - h)) / (2 * h)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--step", type=float, default=0.005)
    ap.add_argument("--noise-probe", type=float, default=1e-4)
    ap.add_argument("--bias-probe", type=float, default=0.45)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "renyi_half_bias", "one_minus_hd_noise", "min_entropy_bias", "min_entropy_noise"])
    for x in np.round(np.arange(0.0, 0.5 + 1e-12, args.step), 10):
        w.writerow([x, analytic.renyi_entropy(x, 0.5), 1 - analytic.binary_entropy(x),
                    analytic.min_entropy_distortion_rate(x, 0.0),
                    analytic.min_entropy_distortion_rate(0.5, x)])
    if out is not sys.stdout:
        out.close()

    noise = abs(slope(lambda d: 1 - analytic.binary_entropy(d), args.noise_probe))
    bias = abs(slope(lambda p: analytic.renyi_entropy(p, 0.5), args.bias_probe))
    print(f"# slope of 1-H at D={args.noise_probe}: {noise:.4f}; slope of H_1/2 at p={args.bias_probe}: "
          f"{bias:.4f}; ratio {noise / bias:.1f}", file=sys.stderr)


if __name__ == "__main__":
    main()
