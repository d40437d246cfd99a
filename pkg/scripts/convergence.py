"""Finite-size guesswork rates against the Renyi-1/2 limit.

For each p, prints the exact (1/m) log2 E[G] of the optimal order, the gap to
H_1/2(p), and a least-squares fit gap ~ (a + b*log2(m))/m.
"""
import argparse
import math

import numpy as np

from pufguess import analytic
from pufguess.oracle import DiscreteDistribution, bernoulli_mass, exact_guesswork_moment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+", default=[0.3, 0.4626, 0.5])
    ap.add_argument("--m-min", type=int, default=4)
    ap.add_argument("--m-max", type=int, default=20)
    args = ap.parse_args()

    print("p,m,rate,limit,gap")
    for p in args.p:
        h = analytic.renyi_entropy(p, 0.5)
        ms, gaps = [], []
        for m in range(args.m_min, args.m_max + 1):
            g = exact_guesswork_moment(DiscreteDistribution(m, np.arange(1 << m), bernoulli_mass(p, m))).moment
            rate = math.log2(g) / m
            ms.append(m)
            gaps.append(h - rate)
            print(f"{p},{m},{rate:.6f},{h:.6f},{h - rate:.6f}")
        ms = np.array(ms, dtype=float)
        A = np.column_stack([1 / ms, np.log2(ms) / ms])
        (a, b), *_ = np.linalg.lstsq(A, np.array(gaps), rcond=None)
        print(f"# p={p}: gap ~ ({a:.4f} + {b:.4f}*log2(m))/m")


if __name__ == "__main__":
    main()
