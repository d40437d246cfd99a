"""Synthetic PUF responses: stable weak-PUF bits, noisy re-reads, correlated pairs."""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import rng as _rng
from .bits import BitVector


@dataclass(frozen=True)
class PufSpec:
    """Generative parameters of a PUF family.

    ``p`` is the per-bit probability of a one, ``D`` the probability that a bit
    differs between two reads of the same device, and ``e`` the flip probability
    relating a device to a correlated twin (``e=0.5`` means independent).
    """

    m: int = 512
    p: float = 0.5
    D: float = 0.0
    e: float = 0.5

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 <= self.D <= 0.5:
            raise ValueError(f"D must lie in [0, 1/2], got {self.D}")
        if not 0.0 <= self.e <= 0.5:
            raise ValueError(f"e must lie in [0, 1/2], got {self.e}")

    @property
    def stable(self) -> bool:
        return self.D == 0.0


@dataclass(frozen=True)
class Preset:
    name: str
    spec: PufSpec
    source: str


PRESETS: dict[str, Preset] = {
    "ledpuf": Preset("ledpuf", PufSpec(m=512, p=0.4626, D=0.0),
                     "simulated DSA connection statistics; stable, 0% intra-FHD"),
    "sram": Preset("sram", PufSpec(m=512, p=0.4913, D=0.0226),
                   "45nm SOI SRAM at 20C: bias 49.13% ones, intra-FHD 2.26%"),
    "ro20": Preset("ro20", PufSpec(m=512, p=0.5138, D=0.0248),
                   "FPGA RO PUF at 20C: bias 51.38% ones, intra-FHD 2.48%"),
    "ro60": Preset("ro60", PufSpec(m=512, p=0.5138, D=0.12),
                   "FPGA RO PUF enrolled at 20C, read at 60C: ~12% intra-FHD"),
}


def preset(name: str, m: int | None = None) -> PufSpec:
    try:
        spec = PRESETS[name.lower()].spec
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return spec if m is None else replace(spec, m=m)


def _bernoulli(m: int, p: float, gen: np.random.Generator) -> np.ndarray:
    return (gen.random(m) < p).astype(np.uint8)


def _check_prob(name: str, value: float, hi: float = 1.0):
    if not 0.0 <= value <= hi:
        raise ValueError(f"{name} must lie in [0, {hi}], got {value}")


def sample_response(spec: PufSpec, seed: int) -> BitVector:
    """m i.i.d. Bernoulli(p) bits."""
    return BitVector._wrap(_bernoulli(spec.m, spec.p, _rng.stream(seed, _rng.RESPONSE)))


def resample(original: BitVector, D: float, seed: int) -> BitVector:
    """``original`` XOR an i.i.d. Bernoulli(D) error pattern."""
    _check_prob("D", D, 0.5)
    gen = _rng.stream(seed, _rng.NOISE)
    return BitVector._wrap(original.bits ^ _bernoulli(original.length, D, gen))


def correlated_pair(spec: PufSpec, seed: int) -> tuple[BitVector, BitVector]:
    """Device ``x`` and a side-channel twin ``y = x XOR Bernoulli(e)``."""
    x = _bernoulli(spec.m, spec.p, _rng.stream(seed, _rng.PAIR_X))
    e = _bernoulli(spec.m, spec.e, _rng.stream(seed, _rng.PAIR_E))
    return BitVector._wrap(x), BitVector._wrap(x ^ e)


def read_flip_probability(D: float) -> float:
    """Per-read flip probability relative to ground truth.

    Two independent reads of the same device disagree at a position with
    probability ``2d(1-d)``; this returns the ``d`` that makes that equal ``D``,
    so the pairwise intra-FHD of simulated reads matches the preset.
    """
    _check_prob("D", D, 0.5)
    return 0.5 * (1.0 - math.sqrt(1.0 - 2.0 * D))


@dataclass(frozen=True)
class DeviceMeasurements:
    truth: BitVector
    reads: tuple[BitVector, ...]


@dataclass(frozen=True)
class Population:
    spec: PufSpec
    seed: int
    devices: tuple[DeviceMeasurements, ...] = field(repr=False)

    @property
    def truths(self) -> list[BitVector]:
        return [d.truth for d in self.devices]

    def to_dict(self) -> dict:
        return {
            "spec": asdict(self.spec),
            "seed": self.seed,
            "devices": [
                {"truth": d.truth.to_hex(), "reads": [r.to_hex() for r in d.reads]}
                for d in self.devices
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Population":
        spec = PufSpec(**data["spec"])
        devices = tuple(
            DeviceMeasurements(
                BitVector.from_hex(d["truth"], spec.m),
                tuple(BitVector.from_hex(r, spec.m) for r in d["reads"]),
            )
            for d in data["devices"]
        )
        if not devices:
            raise ValueError("population has no devices")
        return cls(spec, _rng.check_seed(data["seed"]), devices)

    def save(self, path, **metadata) -> None:
        payload = {**metadata, **self.to_dict()}
        Path(path).write_text(json.dumps(payload, indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "Population":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _device(spec: PufSpec, seed: int, index: int, resamples: int, flip: float) -> DeviceMeasurements:
    truth = _bernoulli(spec.m, spec.p, _rng.stream(seed, _rng.POP_TRUTH, index))
    reads = tuple(
        BitVector._wrap(truth ^ _bernoulli(spec.m, flip, _rng.stream(seed, _rng.POP_READ, index, j)))
        for j in range(resamples)
    )
    return DeviceMeasurements(BitVector._wrap(truth), reads)


def sample_population(spec: PufSpec, devices: int, resamples: int, seed: int,
                      threads: int = 1) -> Population:
    """Ground truth plus ``resamples`` noisy re-reads for each of ``devices`` devices.

    Each device and each read draws from its own stream, so the result is the
    same for any ``threads``.
    """
    if devices < 1 or resamples < 1:
        raise ValueError("devices and resamples must be >= 1")
    seed = _rng.check_seed(seed)
    flip = read_flip_probability(spec.D)
    if threads <= 1:
        out = [_device(spec, seed, i, resamples, flip) for i in range(devices)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            out = list(pool.map(lambda i: _device(spec, seed, i, resamples, flip), range(devices)))
    return Population(spec, seed, tuple(out))


def stack(vectors: Sequence[BitVector]) -> np.ndarray:
    """(n, m) uint8 matrix of equal-length vectors."""
    lengths = {v.length for v in vectors}
    if len(lengths) != 1:
        raise ValueError("vectors must share one length")
    return np.stack([v.bits for v in vectors])
