"""Strong PUF built from a 512-bit weak-PUF response keying HMAC-SHA-256."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .bits import BitVector
from .metrics import DistributionSummary, fhd, pairwise_fhd

KEY_BITS = 512
RESPONSE_BITS = 256
BLOCK_BYTES = 64
_IPAD = bytes([0x36] * BLOCK_BYTES)
_OPAD = bytes([0x5C] * BLOCK_BYTES)


def _xor(a: bytes, b: bytes) -> bytes:
    return bytes(x ^ y for x, y in zip(a, b))


def hmac_sha256(key: bytes, message: bytes) -> bytes:
    """HMAC-SHA-256: H((K ^ opad) || H((K ^ ipad) || message))."""
    if len(key) > BLOCK_BYTES:
        key = hashlib.sha256(key).digest()
    key = key.ljust(BLOCK_BYTES, b"\x00")
    inner = hashlib.sha256(_xor(key, _IPAD) + message).digest()
    return hashlib.sha256(_xor(key, _OPAD) + inner).digest()


@dataclass(frozen=True)
class Challenge:
    payload: bytes

    def __post_init__(self):
        if not self.payload:
            raise ValueError("challenge must be nonempty")

    @classmethod
    def from_hex(cls, text: str) -> "Challenge":
        return cls(bytes.fromhex(text))

    @classmethod
    def random(cls, gen: np.random.Generator, n_bits: int = 256) -> "Challenge":
        if n_bits < 1:
            raise ValueError("n_bits must be >= 1")
        bits = gen.integers(0, 2, n_bits, dtype=np.uint8)
        return cls(np.packbits(bits).tobytes())

    def flip(self, bit: int) -> "Challenge":
        data = bytearray(self.payload)
        data[bit // 8] ^= 0x80 >> (bit % 8)
        return Challenge(bytes(data))


@dataclass(frozen=True)
class StrongPufDevice:
    """The 512-bit key fills exactly one SHA-256 block, so HMAC uses it unpadded."""

    key: BitVector
    hash_algorithm: str = "HMAC-SHA-256"

    def respond(self, challenge: Challenge) -> BitVector:
        return respond(self, challenge)


def build_device(weak_response: BitVector) -> StrongPufDevice:
    if weak_response.length != KEY_BITS:
        raise ValueError(f"weak response must have {KEY_BITS} bits, got {weak_response.length}")
    return StrongPufDevice(weak_response)


def respond(device: StrongPufDevice, challenge: Challenge) -> BitVector:
    tag = hmac_sha256(device.key.to_bytes(), challenge.payload)
    return BitVector.from_bytes(tag)


def _random_key(gen: np.random.Generator) -> BitVector:
    return BitVector._wrap(gen.integers(0, 2, KEY_BITS, dtype=np.uint8))


def avalanche_experiment(device: StrongPufDevice, bit_flips: int, challenges: int, seed: int,
                         challenge_bits: int = 256) -> DistributionSummary:
    """FHD between responses of ``device`` and a copy with ``bit_flips`` key bits flipped.

    Each trial draws a fresh challenge and a fresh set of distinct positions.
    """
    if not 0 <= bit_flips <= KEY_BITS:
        raise ValueError(f"bit_flips must lie in [0, {KEY_BITS}]")
    if challenges < 1:
        raise ValueError("challenges must be >= 1")
    gen = _rng.stream(seed, _rng.AVALANCHE)
    values = np.empty(challenges)
    for t in range(challenges):
        c = Challenge.random(gen, challenge_bits)
        pos = gen.choice(KEY_BITS, size=bit_flips, replace=False)
        twin = StrongPufDevice(device.key.flip(pos))
        values[t] = fhd(respond(device, c), respond(twin, c))
    return DistributionSummary(float(values.mean()), float(values.std()), challenges)


def expected_noise_propagation(d: float) -> float:
    """(1 - (1-d)^512) / 2: a changed key yields an unrelated response."""
    return 0.5 * (1.0 - (1.0 - d) ** KEY_BITS)


def noise_propagation(d: float, trials: int, seed: int, challenge_bits: int = 256) -> DistributionSummary:
    """Strong-PUF intra-FHD when the weak key is re-read through a Bernoulli(d) flip channel."""
    if not 0.0 <= d <= 0.5:
        raise ValueError("d must lie in [0, 1/2]")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gen = _rng.stream(seed, _rng.NOISE_PROP)
    values = np.empty(trials)
    for t in range(trials):
        key = _random_key(gen)
        reread = BitVector._wrap(key.bits ^ (gen.random(KEY_BITS) < d).astype(np.uint8))
        c = Challenge.random(gen, challenge_bits)
        values[t] = fhd(respond(StrongPufDevice(key), c), respond(StrongPufDevice(reread), c))
    return DistributionSummary(float(values.mean()), float(values.std()), trials)


def inter_distance(devices: int, seed: int, challenge: Challenge | None = None) -> DistributionSummary:
    """Pairwise response FHD of independent random-key devices on one shared challenge."""
    if devices < 2:
        raise ValueError("need at least 2 devices")
    gen = _rng.stream(seed, _rng.DEVICES)
    if challenge is None:
        challenge = Challenge.random(gen)
    responses = [respond(StrongPufDevice(_random_key(gen)), challenge) for _ in range(devices)]
    d = pairwise_fhd(responses)
    return DistributionSummary(float(d.mean()), float(d.std()), int(d.size))
