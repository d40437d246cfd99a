"""Closed-form guesswork, entropy and authentication-game quantities.

Rates are in bits per symbol (log2). Bernoulli parameters ``p`` denote the
probability of a one.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.special import gammaln, logsumexp

LN2 = math.log(2.0)


def _check_unit(name: str, q: float, lo: float = 0.0, hi: float = 1.0):
    if not (lo <= q <= hi):
        raise ValueError(f"{name} must lie in [{lo}, {hi}], got {q}")


def _xlog2x(q: float) -> float:
    return 0.0 if q == 0.0 else q * math.log2(q)


def binary_entropy(q: float) -> float:
    _check_unit("q", q)
    return -_xlog2x(q) - _xlog2x(1.0 - q)


def renyi_entropy(p: float, order: float) -> float:
    """Renyi entropy of Bernoulli(p) in bits."""
    _check_unit("p", p)
    if order <= 0 or order == 1:
        raise ValueError("order must be positive and != 1")
    total = p**order + (1.0 - p) ** order
    return math.log2(total) / (1.0 - order)


def renyi_entropy_pmf(pmf, order: float) -> float:
    pmf = np.asarray(pmf, dtype=float)
    if order <= 0 or order == 1:
        raise ValueError("order must be positive and != 1")
    pmf = pmf[pmf > 0]
    return float(np.log2(np.sum(pmf**order)) / (1.0 - order))


def kl_divergence(s: float, p: float) -> float:
    """Binary KL divergence D(s||p) in bits."""
    _check_unit("s", s)
    _check_unit("p", p)
    total = 0.0
    for a, b in ((s, p), (1.0 - s, 1.0 - p)):
        if a == 0.0:
            continue
        if b == 0.0:
            raise ValueError(f"D({s}||{p}) is infinite")
        total += a * math.log2(a / b)
    return max(total, 0.0)


def moment_growth_rate(p: float, rho: float = 1.0) -> float:
    """rho * H_{1/(1+rho)}(p): growth rate of E[G^rho] for an i.i.d. Bernoulli source."""
    _check_unit("p", p)
    if rho <= 0:
        raise ValueError("rho must be positive")
    a = 1.0 / (1.0 + rho)
    return (1.0 + rho) * math.log2(p**a + (1.0 - p) ** a)


def distortion_growth_rate(p: float, D: float, rho: float = 1.0) -> float:
    """max(rho*H_{1/(1+rho)}(p) - rho*H(D), 0): rate when guesses within distance mD succeed."""
    _check_unit("D", D, 0.0, 0.5)
    return max(moment_growth_rate(p, rho) - rho * binary_entropy(D), 0.0)


def s_star(p: float, rho: float = 1.0) -> float:
    """Type maximising rho*H(q) - D(q||p)."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if rho <= 0:
        raise ValueError("rho must be positive")
    if math.isinf(rho):
        return 0.5
    a = 1.0 / (1.0 + rho)
    return p**a / (p**a + (1.0 - p) ** a)


def type_rate(p: float, D: float, rho: float, q: float) -> float:
    """rho*(H(q) - H(D)) - D(q||p): guesswork rate contributed by type q."""
    return rho * (binary_entropy(q) - binary_entropy(D)) - kl_divergence(q, p)


class FailureConstrainedRate(NamedTuple):
    upper_bound_on_rate: float
    alpha: float
    s_star: float


def failure_constrained_rate(p: float, D: float, rho: float, s: float) -> FailureConstrainedRate:
    """Rate bound when all types at or beyond ``s`` may be left unguessed.

    The failure probability then decays like 2^{-alpha m} with alpha = D(s||p).
    """
    if not 0.0 <= D <= p <= 0.5:
        raise ValueError(f"need 0 <= D <= p <= 1/2, got D={D}, p={p}")
    if not p < s <= 1.0:
        raise ValueError(f"s must lie in (p, 1], got {s}")
    if p == 0.0:
        raise ValueError("p must be positive")
    star = s_star(p, rho)
    alpha = kl_divergence(s, p)
    if s >= star:
        rate = moment_growth_rate(p, rho) - rho * binary_entropy(D)
    else:
        rate = type_rate(p, D, rho, s)
    return FailureConstrainedRate(rate, alpha, star)


def min_entropy_distortion_rate(p: float, D: float) -> float:
    """Exponent of the most likely Hamming ball of radius mD: D(D||p) for D <= p, else 0."""
    _check_unit("p", p, 0.0, 0.5)
    _check_unit("D", D)
    if D > p:
        return 0.0
    if p == 0.0:
        return 0.0
    return kl_divergence(D, p)


class RatePair(NamedTuple):
    lower: float
    upper: float


def arikan_bounds(pmf, rho: float = 1.0) -> RatePair:
    """Bounds on the optimal E[G(X|Y)^rho].

    ``pmf`` is a 1-D array over X, or a 2-D array indexed ``[x, y]`` for a joint
    distribution. ``M`` is the number of X entries. Values are absolute
    moments, not rates.
    """
    P = np.asarray(pmf, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.ndim != 2:
        raise ValueError("pmf must be 1-D or 2-D")
    if np.any(P < 0) or abs(P.sum() - 1.0) > 1e-9:
        raise ValueError("pmf must be non-negative and sum to 1")
    if rho <= 0:
        raise ValueError("rho must be positive")
    M = P.shape[0]
    a = 1.0 / (1.0 + rho)
    upper = float(np.sum(np.sum(P**a, axis=0) ** (1.0 + rho)))
    lower = upper * (1.0 + math.log(M)) ** (-rho)
    return RatePair(lower, upper)


def log_ball_probability(p: float, m: int, D: float) -> float:
    """Natural log of sum_{i <= mD} C(m,i) p^i (1-p)^(m-i)."""
    _check_unit("p", p)
    if m < 1:
        raise ValueError("m must be >= 1")
    if D < 0:
        raise ValueError("D must be non-negative")
    radius = min(m, math.floor(m * D + 1e-9))
    i = np.arange(radius + 1, dtype=float)
    log_c = gammaln(m + 1) - gammaln(i + 1) - gammaln(m - i + 1)
    with np.errstate(divide="ignore"):
        log_p = np.log(p) if p > 0 else -np.inf
        log_q = np.log1p(-p) if p < 1 else -np.inf
    # 0 * log 0 = 0
    terms = log_c + np.where(i > 0, i * log_p, 0.0) + np.where(m - i > 0, (m - i) * log_q, 0.0)
    return float(min(logsumexp(terms), 0.0))


def ball_probability(p: float, m: int, D: float) -> float:
    return math.exp(log_ball_probability(p, m, D))


MinEntropies = Union[float, Sequence[float]]


def _success_probs(minentropies: MinEntropies, n: int | None) -> np.ndarray:
    h = np.atleast_1d(np.asarray(minentropies, dtype=float))
    if np.any(h < 0):
        raise ValueError("min-entropies must be non-negative")
    if n is None:
        n = h.size
    if h.size == 1:
        h = np.full(n, h[0])
    elif h.size < n:
        raise ValueError(f"need {n} min-entropies, got {h.size}")
    return np.exp2(-h[:n])


def auth_avg_guesswork(minentropies: MinEntropies, n: int | None = None) -> float:
    """Expected guess index over the success paths of the one-guess-per-challenge game.

    Failure (no challenge guessed) contributes nothing, as in the closed form.
    """
    if n is not None and n < 1:
        raise ValueError("n must be >= 1")
    q = _success_probs(minentropies, n)
    survive = np.concatenate(([1.0], np.cumprod(1.0 - q)[:-1]))
    return float(np.sum(np.arange(1, q.size + 1) * q * survive))


def auth_avg_guesswork_constant(h_inf: float, n: int) -> float:
    """Closed form of :func:`auth_avg_guesswork` for a constant min-entropy."""
    if h_inf < 0 or n < 1:
        raise ValueError("need h_inf >= 0 and n >= 1")
    big = 2.0**h_inf
    return big - (1.0 - 2.0**-h_inf) ** n * (n + big)


def auth_success_cdf(h_inf: MinEntropies, l: int) -> float:
    """Pr(G <= l). Scalar ``h_inf`` gives 1 - (1 - 2^-H)^l."""
    if l < 0:
        raise ValueError("l must be >= 0")
    if l == 0:
        return 0.0
    if np.ndim(h_inf) == 0:
        if h_inf < 0:
            raise ValueError("min-entropies must be non-negative")
        q = 2.0 ** -h_inf
        return float(-np.expm1(l * np.log1p(-q))) if q < 1 else 1.0
    q = _success_probs(h_inf, l)
    return float(-np.expm1(np.sum(np.log1p(-q)))) if np.all(q < 1) else 1.0


def auth_failure_prob(minentropies: Sequence[float]) -> float:
    q = _success_probs(minentropies, None) if len(np.atleast_1d(minentropies)) else np.empty(0)
    return float(np.prod(1.0 - q))


class GuessCount(NamedTuple):
    count: int | None
    log2_count: float
    saturated: bool


COUNT_LIMIT = 2**63 - 1


def guesses_for_confidence(h_inf: float, confidence: float) -> GuessCount:
    """Smallest l with 1 - (1 - 2^-H)^l >= confidence.

    When l would not fit a signed 64-bit integer, ``count`` is None,
    ``saturated`` is set and ``log2_count`` still carries the estimate.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    if h_inf <= 0:
        raise ValueError("h_inf must be positive")
    q = 2.0**-h_inf
    log_fail = math.log1p(-q)  # < 0
    if log_fail == 0.0:  # q below float resolution
        est = math.log2(-math.log1p(-confidence)) + h_inf
        return GuessCount(None, est, True)
    real = math.log1p(-confidence) / log_fail
    if real > COUNT_LIMIT:
        return GuessCount(None, math.log2(real), True)
    l = max(1, math.ceil(real))
    while l > 1 and auth_success_cdf(h_inf, l - 1) >= confidence:
        l -= 1
    while auth_success_cdf(h_inf, l) < confidence:
        l += 1
    return GuessCount(l, math.log2(l), False)


def model_attack_min_entropy(prediction_rate: float, m: int, D: float = 0.0) -> float:
    """Min-entropy (bits) of an m-bit response predicted bitwise with the given rate.

    With noise tolerance D the attacker only needs to land within distance mD.
    """
    if not 0.5 <= prediction_rate < 1.0:
        raise ValueError("prediction rate must lie in [1/2, 1)")
    _check_unit("D", D, 0.0, 0.5)
    return max(-log_ball_probability(1.0 - prediction_rate, m, D) / LN2, 0.0)


class MacGuesswork(NamedTuple):
    guesses: float
    log2_guesses: float
    exact: bool


def mac_avg_guesswork(N: int, L: int, p: float = 0.5, mapping: str = "uniform") -> MacGuesswork:
    """Average total guesses to learn the tags of all 2^N messages of an idealised MAC.

    Uniform keys give the exact value 2^N (2^L + 1)/2 for any bijective mapping.
    Biased keys are supported for the identity mapping only, where the
    returned value is the asymptotic-in-L estimate 2^{N + L H_1/2(p)}.
    """
    if N < 0 or L < 1:
        raise ValueError("need N >= 0 and L >= 1")
    if not 0.0 < p <= 0.5:
        raise ValueError("p must lie in (0, 1/2]")
    if mapping not in ("uniform", "identity"):
        raise ValueError(f"unknown mapping {mapping!r}")
    if p == 0.5:
        value = 2.0**N * (2.0**L + 1.0) / 2.0
        return MacGuesswork(value, math.log2(value), True)
    if mapping != "identity":
        raise ValueError("biased keys are only defined for the identity mapping")
    rate = N + L * renyi_entropy(p, 0.5)
    return MacGuesswork(2.0**rate, rate, False)


def mac_tail_bound(N: int, L: int, p: float, alpha: float, mapping: str = "uniform") -> float:
    """Azuma bound on Pr(G - eta > alpha * eta), clamped to 1."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    mac_avg_guesswork(N, L, p, mapping)  # parameter validation
    if p == 0.5:
        scale = 2.0**N
    else:
        scale = 2.0 ** (N - 2 * L * (1.0 - renyi_entropy(p, 0.5)))
    return min(1.0, math.exp(-(alpha**2) / 8.0 * scale))
