"""Exhaustive and Monte Carlo ground truth for the closed-form guesswork results.

Everything here works on explicit probability vectors over ``{0,1}^m`` (words
encoded as integers, most significant bit first) and is meant for small ``m``.
"""
from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from . import analytic
from . import rng as _rng

MAX_EXHAUSTIVE_BITS = 24
MAX_GREEDY_BITS = 20


def popcount(words: np.ndarray) -> np.ndarray:
    words = np.asarray(words, dtype=np.uint64)
    bytes_ = words.view(np.uint8).reshape(*words.shape, 8)
    return np.unpackbits(bytes_, axis=-1).sum(axis=-1).astype(np.int64)


@dataclass(frozen=True)
class DiscreteDistribution:
    """Explicit pmf over binary words of length ``m``."""

    m: int
    words: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        words = np.asarray(self.words, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=float)
        if words.shape != probs.shape or words.ndim != 1:
            raise ValueError("words and probs must be 1-D arrays of equal length")
        if self.m < 0 or self.m > MAX_EXHAUSTIVE_BITS:
            raise ValueError(f"m must lie in [0, {MAX_EXHAUSTIVE_BITS}]")
        if words.size == 0:
            raise ValueError("empty support")
        if np.any(words < 0) or np.any(words >> self.m):
            raise ValueError(f"support must lie in {{0,1}}^{self.m}")
        if np.unique(words).size != words.size:
            raise ValueError("duplicate words in support")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
            raise ValueError("probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "words", words)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, m: int, mapping: Mapping[int, float]) -> "DiscreteDistribution":
        items = sorted(mapping.items())
        return cls(m, np.array([w for w, _ in items]), np.array([q for _, q in items]))

    @classmethod
    def iid_bernoulli(cls, p: float, m: int) -> "DiscreteDistribution":
        return cls(m, np.arange(2**m), bernoulli_mass(p, m))

    @property
    def size(self) -> int:
        return int(self.words.size)


def bernoulli_mass(p: float, m: int) -> np.ndarray:
    """Dense pmf of m i.i.d. Bernoulli(p) bits, indexed by word.

    Probabilities are looked up by Hamming weight so that equal-type words
    carry bit-identical values.
    """
    if m > MAX_EXHAUSTIVE_BITS:
        raise ValueError(f"m={m} exceeds exhaustive limit {MAX_EXHAUSTIVE_BITS}")
    k = np.arange(m + 1)
    by_weight = np.array([p**i * (1.0 - p) ** (m - i) for i in k])
    return by_weight[popcount(np.arange(2**m))]


def type_mass(p: float, m: int, k: int) -> float:
    """Total probability of the weight-k words, computed in log domain."""
    if p in (0.0, 1.0):
        return float(k == (m if p == 1.0 else 0))
    log = gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1) + k * math.log(p) + (m - k) * math.log1p(-p)
    return math.exp(log)


def moment(masses: np.ndarray, rho: float) -> float:
    """sum_i i^rho * masses[i-1], exactly rounded."""
    masses = np.asarray(masses, dtype=float)
    pos = np.arange(1, masses.size + 1, dtype=float)
    return math.fsum((pos**rho * masses).tolist())


@dataclass
class GuessRecord:
    """Outcome of a guessing strategy.

    ``order`` lists the guessed words; ``covered[i]`` is the probability mass
    first resolved by guess ``i + 1``. ``failure_probability`` is the mass
    never resolved.
    """

    order: np.ndarray
    covered: np.ndarray
    failure_probability: float = 0.0
    skipped_types: tuple[int, ...] = ()
    skipped_mass: float = 0.0
    _index: dict | None = field(default=None, repr=False)

    def guess_count(self, word: int) -> int | None:
        if self._index is None:
            self._index = {int(w): i + 1 for i, w in enumerate(self.order.tolist())}
        return self._index.get(int(word))

    @property
    def guesses(self) -> int:
        return int(self.order.size)


class GuessResult(NamedTuple):
    moment: float
    record: GuessRecord


def exact_guesswork_moment(dist: DiscreteDistribution, rho: float = 1.0) -> GuessResult:
    """E[G^rho] for the optimal order: descending probability, ties by ascending word."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    idx = np.lexsort((dist.words, -dist.probs))
    masses = dist.probs[idx]
    return GuessResult(moment(masses, rho), GuessRecord(dist.words[idx], masses))


def moment_of_order(dist: DiscreteDistribution, order: Sequence[int], rho: float = 1.0) -> float:
    """E[G^rho] when the support is guessed in the given order."""
    lookup = dict(zip(dist.words.tolist(), dist.probs.tolist()))
    order = list(order)
    if sorted(order) != sorted(lookup):
        raise ValueError("order must be a permutation of the support")
    return moment(np.array([lookup[w] for w in order]), rho)


def conditional_guesswork_moment(joint, rho: float = 1.0) -> float:
    """sum_y p(y) E[G(X|Y=y)^rho] for a joint pmf indexed ``[x, y]``."""
    P = np.asarray(joint, dtype=float)
    if P.ndim != 2:
        raise ValueError("joint pmf must be 2-D, indexed [x, y]")
    if np.any(P < 0) or abs(P.sum() - 1.0) > 1e-9:
        raise ValueError("joint pmf must be non-negative and sum to 1")
    if rho <= 0:
        raise ValueError("rho must be positive")
    cols = -np.sort(-P, axis=0)
    w = np.arange(1, P.shape[0] + 1, dtype=float) ** rho
    return math.fsum((w @ cols).tolist())


def correlated_joint(p: float, e: float, m: int) -> np.ndarray:
    """Joint pmf of (x, y) with x i.i.d. Bernoulli(p) and y = x XOR Bernoulli(e)."""
    if m > 14:
        raise ValueError("joint tables beyond m=14 are too large")
    px = bernoulli_mass(p, m)
    pe = bernoulli_mass(e, m)
    x = np.arange(2**m)
    return px[:, None] * pe[x[:, None] ^ x[None, :]]


def ball_offsets(m: int, radius: int) -> np.ndarray:
    words = np.arange(2**m, dtype=np.int64)
    return words[popcount(words) <= radius]


def _greedy_cover(mass: np.ndarray, target: np.ndarray, m: int, radius: int):
    """Greedy Hamming-ball covering.

    Each guess is the word whose radius-``radius`` ball holds the most still
    uncovered ``target`` mass (ties: smallest word). Stops once every word with
    positive target mass is covered. Returns (order, newly covered ``mass``
    per guess, covered mask).
    """
    n = 2**m
    offsets = ball_offsets(m, radius)
    remaining = target.astype(float).copy()
    covered = np.zeros(n, dtype=bool)
    words = np.arange(n, dtype=np.int64)
    gains = np.zeros(n)
    for o in offsets:
        gains += remaining[words ^ o]
    heap = [(-g, int(w)) for w, g in enumerate(gains.tolist()) if g > 0]
    heapq.heapify(heap)
    left = int(np.count_nonzero(remaining > 0))
    order, newly = [], []
    while left:
        neg, w = heapq.heappop(heap)
        ball = w ^ offsets
        fresh = math.fsum(remaining[ball].tolist())
        if fresh != -neg:
            if fresh > 0:
                heapq.heappush(heap, (-fresh, w))
            continue
        new = ball[~covered[ball]]
        covered[new] = True
        left -= int(np.count_nonzero(remaining[new] > 0))
        remaining[new] = 0.0
        order.append(w)
        newly.append(math.fsum(mass[new].tolist()))
    return np.array(order, dtype=np.int64), np.array(newly), covered


def _check_m(m: int, limit: int = MAX_GREEDY_BITS):
    if not 1 <= m <= limit:
        raise ValueError(f"m must lie in [1, {limit}] for exhaustive search")


def distortion_guesswork_greedy(p: float, m: int, D: float, rho: float = 1.0) -> GuessResult:
    """Achievable E[G^rho] when any guess within distance floor(mD) of the secret wins."""
    _check_m(m)
    if D < 0:
        raise ValueError("D must be non-negative")
    radius = min(m, math.floor(m * D + 1e-9))
    mass = bernoulli_mass(p, m)
    order, newly, _ = _greedy_cover(mass, mass, m, radius)
    return GuessResult(moment(newly, rho), GuessRecord(order, newly))


def skipped_types(p: float, m: int, s: float) -> tuple[int, ...]:
    """Weights left unguessed: q >= s, plus q < p with D(q||p) >= D(s||p)."""
    alpha = analytic.kl_divergence(s, p)
    out = []
    for k in range(m + 1):
        q = k / m
        if q >= s - 1e-12:
            out.append(k)
        elif q < p and analytic.kl_divergence(q, p) >= alpha:
            out.append(k)
    return tuple(out)


def failure_constrained_guesswork(p: float, m: int, D: float, s: float, rho: float = 1.0,
                                  skip: Sequence[int] | None = None) -> GuessResult:
    """Guesswork when the attacker declines to guess whole type classes.

    The skipped weights default to :func:`skipped_types`. The remaining words
    are guessed by descending probability (D=0) or by greedy ball covering
    (D>0). The returned moment is E[G^rho | success]; ``record`` carries the
    achieved failure probability and the exact mass of the skipped types.
    """
    _check_m(m)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if not p < s <= 1.0:
        raise ValueError(f"s must lie in (p, 1], got {s}")
    skip = skipped_types(p, m, s) if skip is None else tuple(sorted(set(skip)))
    mass = bernoulli_mass(p, m)
    weights = popcount(np.arange(2**m))
    keep = ~np.isin(weights, skip)
    skipped_mass = math.fsum(type_mass(p, m, k) for k in skip)
    radius = min(m, math.floor(m * D + 1e-9))
    if radius == 0:
        words = np.flatnonzero(keep)
        idx = np.lexsort((words, -mass[words]))
        order = words[idx]
        newly = mass[order]
        failure = math.fsum(mass[~keep].tolist())
    else:
        order, newly, covered = _greedy_cover(mass, np.where(keep, mass, 0.0), m, radius)
        failure = math.fsum(mass[~covered].tolist())
    success = 1.0 - failure
    value = moment(newly, rho) / success if success > 0 else math.nan
    record = GuessRecord(order, newly, failure, skip, skipped_mass)
    return GuessResult(value, record)


# ---------------------------------------------------------------------------
# authentication game

CHUNK = 1 << 16


def _chunks(trials: int, size: int) -> list[tuple[int, int]]:
    return [(i, min(size, trials - i * size)) for i in range((trials + size - 1) // size)]


def _run_chunks(fn, chunks, threads: int):
    if threads <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


@dataclass(frozen=True)
class AuthGameResult:
    trials: int
    mean_guesswork: float
    mean_given_success: float
    success_cdf: np.ndarray
    failure_rate: float


def simulate_auth_game(min_entropies, n: int, trials: int, seed: int,
                       threads: int = 1) -> AuthGameResult:
    """Monte Carlo of the one-guess-per-challenge authentication game.

    At challenge i the attacker submits the most likely response and succeeds
    with probability 2^-H(i). ``mean_guesswork`` counts failed runs as 0 so it
    is comparable with the closed form; trials are drawn in fixed-size chunks,
    each from its own stream.
    """
    if trials < 1 or n < 1:
        raise ValueError("need trials >= 1 and n >= 1")
    q = analytic._success_probs(min_entropies, n)

    def run(chunk):
        idx, size = chunk
        gen = _rng.stream(seed, _rng.AUTH_GAME, idx)
        hit = gen.random((size, n)) < q
        any_hit = hit.any(axis=1)
        g = np.where(any_hit, hit.argmax(axis=1) + 1, 0)
        return np.bincount(g, minlength=n + 1)

    hist = sum(_run_chunks(run, _chunks(trials, CHUNK), threads))
    succ = trials - hist[0]
    total = float(np.dot(np.arange(n + 1), hist))
    return AuthGameResult(
        trials=trials,
        mean_guesswork=total / trials,
        mean_given_success=total / succ if succ else math.nan,
        success_cdf=np.cumsum(hist[1:]) / trials,
        failure_rate=hist[0] / trials,
    )


def enumerate_auth_game(min_entropies: Sequence[float]) -> tuple[float, np.ndarray, float]:
    """Exact (E[G] over success paths, Pr(G <= l) for l=1..n, failure) by enumerating
    all 2^n per-challenge outcome patterns."""
    q = np.exp2(-np.asarray(min_entropies, dtype=float))
    n = q.size
    if n > 20:
        raise ValueError("enumeration limited to n <= 20")
    mean = 0.0
    cdf = np.zeros(n)
    failure = 0.0
    for pattern in range(2**n):
        bits = [(pattern >> i) & 1 for i in range(n)]
        prob = math.prod(q[i] if b else 1.0 - q[i] for i, b in enumerate(bits))
        if 1 in bits:
            g = bits.index(1) + 1
            mean += g * prob
            cdf[g - 1:] += prob
        else:
            failure += prob
    return mean, cdf, failure


# ---------------------------------------------------------------------------
# MAC game

MAX_MAC_N = 10
MAX_MAC_L = 10


def bin_ranks(L: int, p: float) -> np.ndarray:
    """Guess number (1-based) of each L-bit bin value under the optimal order."""
    mass = bernoulli_mass(p, L)
    order = np.lexsort((np.arange(2**L), -mass))
    ranks = np.empty(2**L, dtype=np.int64)
    ranks[order] = np.arange(1, 2**L + 1)
    return ranks


@dataclass(frozen=True)
class MacGameResult:
    totals: np.ndarray
    eta: float

    @property
    def mean(self) -> float:
        return float(self.totals.mean())

    @property
    def std(self) -> float:
        return float(self.totals.std())

    def deviation_frequency(self, alpha: float) -> float:
        """Empirical Pr(G - eta > alpha * eta)."""
        return float(np.mean(self.totals - self.eta > alpha * self.eta))


def simulate_mac_game(N: int, L: int, p: float, mapping: str, trials: int, seed: int,
                      threads: int = 1) -> MacGameResult:
    """Total guesses to find the tags of all 2^N messages, per simulated key.

    ``identity``: the key is 2^N * L i.i.d. Bernoulli(p) bits and message k's
    tag is the k-th L-bit slice. ``uniform``: tags are i.i.d. uniform (the
    image of an unbiased key under any bijection). The attacker guesses each
    tag in descending marginal probability.
    """
    if not (0 <= N <= MAX_MAC_N and 1 <= L <= MAX_MAC_L):
        raise ValueError(f"need N <= {MAX_MAC_N} and 1 <= L <= {MAX_MAC_L}")
    if mapping not in ("uniform", "identity"):
        raise ValueError(f"unknown mapping {mapping!r}")
    if mapping == "uniform" and p != 0.5:
        raise ValueError("uniform mapping requires an unbiased key")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    msgs = 2**N
    ranks = bin_ranks(L, p)
    eta = msgs * math.fsum((ranks * bernoulli_mass(p, L)).tolist())
    size = max(1, (1 << 22) // (msgs * L))
    weights = 1 << np.arange(L - 1, -1, -1, dtype=np.int64)

    def run(chunk):
        idx, count = chunk
        gen = _rng.stream(seed, _rng.MAC_GAME, idx)
        if mapping == "identity":
            bins = (gen.random((count, msgs, L)) < p).astype(np.int64) @ weights
        else:
            bins = gen.integers(0, 2**L, size=(count, msgs))
        return ranks[bins].sum(axis=1)

    totals = np.concatenate(_run_chunks(run, _chunks(trials, size), threads))
    return MacGameResult(totals, eta)
