"""Empirical PUF quality statistics and the growth-rate report built on them."""
from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import analytic
from .bits import BitVector
from .puf_model import Population, read_flip_probability, stack


@dataclass(frozen=True)
class DistributionSummary:
    mean: float
    std_dev: float
    count: int
    histogram: tuple[tuple[float, ...], tuple[int, ...]] | None = None

    def histogram_rows(self) -> list[tuple[float, int]]:
        """(bin left edge, count) rows for plotting."""
        if self.histogram is None:
            return []
        edges, counts = self.histogram
        return list(zip(edges[:-1], counts))


def _summary(values: np.ndarray, bins: int | None) -> DistributionSummary:
    values = np.asarray(values, dtype=float)
    hist = None
    if bins:
        counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
        hist = (tuple(edges.tolist()), tuple(int(c) for c in counts))
    return DistributionSummary(float(values.mean()), float(values.std()), int(values.size), hist)


def fhd(a: BitVector, b: BitVector) -> float:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} vs {b.length}")
    return int(np.count_nonzero(a.bits != b.bits)) / a.length


def pairwise_fhd(vectors: Sequence[BitVector]) -> np.ndarray:
    """FHD of every unordered pair, in (i < j) row-major order."""
    X = stack(vectors).astype(np.float64)
    n, m = X.shape
    # disagreements = x.(1-y) + (1-x).y
    ones = X @ (1.0 - X).T
    dist = ones + ones.T
    iu = np.triu_indices(n, k=1)
    return dist[iu] / m


def intra_fhd(reads: Sequence[BitVector], bins: int | None = None) -> DistributionSummary:
    if len(reads) < 2:
        raise ValueError("intra-FHD needs at least 2 reads")
    return _summary(pairwise_fhd(reads), bins)


def inter_fhd(truths: Sequence[BitVector], bins: int | None = None) -> DistributionSummary:
    if len(truths) < 2:
        raise ValueError("inter-FHD needs at least 2 devices")
    return _summary(pairwise_fhd(truths), bins)


def stability(reads: Sequence[BitVector]) -> float:
    """Fraction of positions that read the same value in every read."""
    if len(reads) < 2:
        raise ValueError("stability needs at least 2 reads")
    X = stack(reads)
    return float(np.mean(np.all(X == X[0], axis=0)))


def bias_level(truths: Sequence[BitVector]) -> tuple[float, float]:
    if not truths:
        raise ValueError("no devices")
    ones = sum(t.weight() for t in truths)
    total = sum(t.length for t in truths)
    frac = ones / total
    return frac, 1.0 - frac


@dataclass(frozen=True)
class TupleEntropy:
    entropy: float
    independent_reference: float

    @property
    def gap(self) -> float:
        return self.independent_reference - self.entropy


def empirical_tuple_entropy(bits, k: int) -> TupleEntropy:
    """Plug-in entropy of non-overlapping k-tuples, against k * H(pooled one-fraction)."""
    arr = bits.bits if isinstance(bits, BitVector) else np.asarray(bits, dtype=np.uint8)
    if k < 1:
        raise ValueError("k must be >= 1")
    if arr.size < k:
        raise ValueError(f"stream of {arr.size} bits is shorter than k={k}")
    if arr.size % k:
        raise ValueError(f"stream length {arr.size} is not a multiple of k={k}")
    tuples = arr.reshape(-1, k)
    codes = tuples @ (1 << np.arange(k - 1, -1, -1, dtype=np.int64))
    counts = np.array(list(Counter(codes.tolist()).values()), dtype=float)
    freq = counts / counts.sum()
    h = float(-np.sum(freq * np.log2(freq)))
    ref = k * analytic.binary_entropy(float(arr.mean()))
    return TupleEntropy(max(h, 0.0), ref)


def growth_rates(ones_fraction: float, intra: float, rho: float = 1.0) -> tuple[float, float]:
    """(tabulated convention, bias-aware) guesswork growth rates.

    The tabulated convention scores a stable device by rho*H_{1/(1+rho)}(p) and
    a noisy one as if unbiased, rho*(1 - H(intra)). The bias-aware variant is
    max(rho*H_{1/(1+rho)}(p) - rho*H(intra), 0) for both.
    """
    p = min(ones_fraction, 1.0 - ones_fraction)
    biased = analytic.distortion_growth_rate(p, intra, rho)
    if intra == 0.0:
        return biased, biased
    return analytic.distortion_growth_rate(0.5, intra, rho), biased


@dataclass(frozen=True)
class SecurityReport:
    devices: int
    bits: int
    reads_per_device: int
    ones_fraction: float
    zeros_fraction: float
    intra_fhd_mean: float | None
    intra_fhd_std: float | None
    inter_fhd_mean: float | None
    inter_fhd_std: float | None
    stability: float | None
    rho: float
    growth_rate: float
    growth_rate_bias_aware: float
    note: str = ("growth_rate treats noisy devices as unbiased (1-H(intra)); "
                 "growth_rate_bias_aware uses H_1/2(p)-H(intra)")

    def to_dict(self) -> dict:
        return asdict(self)

    CSV_FIELDS = ("devices", "bits", "reads_per_device", "ones_fraction", "zeros_fraction",
                  "intra_fhd_mean", "intra_fhd_std", "inter_fhd_mean", "inter_fhd_std",
                  "stability", "rho", "growth_rate", "growth_rate_bias_aware")

    def csv_row(self) -> list[str]:
        return ["" if getattr(self, f) is None else repr(getattr(self, f)) for f in self.CSV_FIELDS]


def security_report(population: Population, rho: float = 1.0) -> SecurityReport:
    """Bias, intra/inter-FHD and stability of a population, plus the growth rates they imply.

    Intra-FHD and stability are averaged over devices. Devices with a single
    read contribute no intra statistic; if none has two reads the device is
    scored as stable.
    """
    devs = population.devices
    if not devs:
        raise ValueError("empty population")
    truths = [d.truth for d in devs]
    ones, zeros = bias_level(truths)
    multi = [d for d in devs if len(d.reads) >= 2]
    if multi:
        intras = [intra_fhd(d.reads) for d in multi]
        intra_mean = float(np.mean([s.mean for s in intras]))
        intra_std = float(np.mean([s.std_dev for s in intras]))
        stab = float(np.mean([stability(d.reads) for d in multi]))
    else:
        intra_mean = intra_std = stab = None
    inter = inter_fhd(truths) if len(truths) >= 2 else None
    tab, aware = growth_rates(ones, intra_mean or 0.0, rho)
    return SecurityReport(
        devices=len(devs),
        bits=population.spec.m,
        reads_per_device=max(len(d.reads) for d in devs),
        ones_fraction=ones,
        zeros_fraction=zeros,
        intra_fhd_mean=intra_mean,
        intra_fhd_std=intra_std,
        inter_fhd_mean=None if inter is None else inter.mean,
        inter_fhd_std=None if inter is None else inter.std_dev,
        stability=stab,
        rho=rho,
        growth_rate=tab,
        growth_rate_bias_aware=aware,
    )


def expected_stability(D: float, reads: int) -> float:
    """Probability a position agrees across all reads under the i.i.d. re-read model."""
    d = read_flip_probability(D)
    return (1.0 - d) ** reads + d**reads
