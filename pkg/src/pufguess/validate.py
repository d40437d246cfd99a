"""Cross-checks of the closed forms against the exhaustive oracles.

Every check compares an exact finite-size quantity with a bound that holds at
that size (so the default suite passes); distances from the asymptotic rates
are reported alongside as ``gap`` for information.
"""
from __future__ import annotations

import math

import numpy as np

from . import analytic, oracle
from . import rng as _rng


def _check(name, observed, lower, upper, tol, **extra):
    passed = bool(lower - tol <= observed <= upper + tol)
    return {"name": name, "observed": observed, "lower": lower, "upper": upper,
            "passed": passed, **extra}


def random_distribution(gen: np.random.Generator, max_bits: int = 10) -> oracle.DiscreteDistribution:
    m = int(gen.integers(1, max_bits + 1))
    support = int(gen.integers(1, 2**m + 1))
    words = np.sort(gen.choice(2**m, size=support, replace=False))
    weights = gen.exponential(size=support) ** float(gen.uniform(0.2, 4.0))
    return oracle.DiscreteDistribution(m, words, weights / weights.sum())


def sandwich_checks(count: int, seed: int, tol: float, rhos=(0.5, 1.0, 2.0)) -> list[dict]:
    gen = _rng.stream(seed, _rng.ORACLE, 0)
    out = []
    for i in range(count):
        dist = random_distribution(gen)
        for rho in rhos:
            value = oracle.exact_guesswork_moment(dist, rho).moment
            lo, hi = analytic.arikan_bounds(dist.probs, rho)
            out.append(_check(f"sandwich[{i}] rho={rho}", value, lo, hi, tol * max(1.0, hi)))
    return out


def iid_rate_checks(ps, ms, tol: float) -> list[dict]:
    """(1/m) log2 E[G] against the rate form of the bounds for m i.i.d. bits."""
    out = []
    for p in ps:
        h = analytic.renyi_entropy(p, 0.5)
        for m in ms:
            value = oracle.exact_guesswork_moment(oracle.DiscreteDistribution.iid_bernoulli(p, m)).moment
            rate = math.log2(value) / m
            lower = h - math.log2(1.0 + m * math.log(2.0)) / m
            out.append(_check(f"iid rate p={p} m={m}", rate, lower, h, tol, gap=h - rate))
    return out


def conditional_check(m: int, tol: float, p: float = 0.5, e: float = 0.2) -> dict:
    joint = oracle.correlated_joint(p, e, m)
    value = oracle.conditional_guesswork_moment(joint)
    lo, hi = analytic.arikan_bounds(joint)
    rate = math.log2(value) / m
    target = analytic.renyi_entropy(e, 0.5)
    return _check(f"conditional rate m={m} e={e}", rate, math.log2(lo) / m, math.log2(hi) / m,
                  tol, asymptotic=target, gap=target - rate)


def distortion_checks(m: int, tol: float) -> list[dict]:
    out = []
    exact = oracle.exact_guesswork_moment(oracle.DiscreteDistribution.iid_bernoulli(0.3, m)).moment
    greedy0 = oracle.distortion_guesswork_greedy(0.3, m, 0.0).moment
    out.append(_check(f"greedy D=0 equals sorted m={m}", greedy0, exact, exact, tol * exact))
    prev = math.inf
    for k in range(m + 1):
        value = oracle.distortion_guesswork_greedy(0.5, m, k / m).moment
        out.append(_check(f"greedy monotone in D m={m} radius={k}", value, 1.0, prev, tol * prev))
        prev = value
    return out


def failure_checks(m: int, tol: float, p: float = 0.3, s: float = 0.35) -> list[dict]:
    out = []
    base = oracle.exact_guesswork_moment(oracle.DiscreteDistribution.iid_bernoulli(p, m)).moment
    empty = oracle.failure_constrained_guesswork(p, m, 0.0, s, skip=()).moment
    out.append(_check(f"empty skip set equals unconstrained m={m}", empty, base, base, tol * base))
    res = oracle.failure_constrained_guesswork(p, m, 0.0, s)
    out.append(_check(f"constrained moment <= unconstrained m={m}", res.moment, 0.0, base, tol * base))
    out.append(_check(f"failure <= skipped type mass m={m}", res.record.failure_probability,
                      0.0, res.record.skipped_mass, tol))
    star = analytic.s_star(p)
    left = analytic.type_rate(p, 0.0, 1.0, star)
    right = analytic.failure_constrained_rate(p, 0.0, 1.0, star).upper_bound_on_rate
    out.append(_check("failure-constrained rate continuous at s*", left, right, right, tol))
    return out


def auth_checks(tol: float) -> list[dict]:
    out = []
    for h in (0.5, 1.0, 2.0):
        for n in (1, 5, 12):
            mean, cdf, fail = oracle.enumerate_auth_game([h] * n)
            closed = analytic.auth_avg_guesswork_constant(h, n)
            out.append(_check(f"auth mean H={h} n={n}", mean, closed, closed, tol))
            out.append(_check(f"auth failure H={h} n={n}", fail,
                              analytic.auth_failure_prob([h] * n), analytic.auth_failure_prob([h] * n), tol))
            last = analytic.auth_success_cdf(h, n)
            out.append(_check(f"auth cdf H={h} n={n}", float(cdf[-1]), last, last, tol))
    return out


def run_validation(max_m: int = 12, seed: int = 0, tolerance: float = 1e-9,
                   distributions: int = 100) -> dict:
    ms = list(range(max(2, max_m - 4), max_m + 1))
    checks = []
    checks += sandwich_checks(distributions, seed, tolerance)
    checks += iid_rate_checks((0.3, 0.4626, 0.5), ms, tolerance)
    checks.append(conditional_check(min(max_m, 12), tolerance))
    checks += distortion_checks(min(max_m, 10), tolerance)
    checks += failure_checks(min(max_m, 16), tolerance)
    checks += auth_checks(tolerance)
    return {
        "config": {"max_m": max_m, "seed": seed, "tolerance": tolerance,
                   "distributions": distributions},
        "passed": all(c["passed"] for c in checks),
        "failed": [c["name"] for c in checks if not c["passed"]],
        "checks": checks,
    }
