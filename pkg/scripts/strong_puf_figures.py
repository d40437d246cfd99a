"""Strong PUF curves: response FHD vs flipped key bits, and vs weak-key noise."""
import argparse
import sys

import numpy as np

from pufguess import rng, strong_puf


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--challenges", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--k-max", type=int, default=8)
    args = ap.parse_args()

    device = strong_puf.build_device(strong_puf._random_key(rng.stream(args.seed, rng.DEVICES, 1)))
    print("# avalanche\nk,mean_fhd,std_fhd")
    for k in range(args.k_max + 1):
        s = strong_puf.avalanche_experiment(device, k, args.challenges, args.seed)
        print(f"{k},{s.mean:.4f},{s.std_dev:.4f}")

    print("# noise propagation\nd,mean_fhd,expected")
    for d in np.logspace(-5, -1, 13):
        s = strong_puf.noise_propagation(float(d), args.trials, args.seed)
        print(f"{d:.3g},{s.mean:.4f},{strong_puf.expected_noise_propagation(float(d)):.4f}")

    s = strong_puf.inter_distance(1000, args.seed)
    print(f"# inter-FHD over 1000 devices: mean {s.mean:.4f} std {s.std_dev:.4f}", file=sys.stderr)


if __name__ == "__main__":
    main()
