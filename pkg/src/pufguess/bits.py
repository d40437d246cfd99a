"""Fixed-length binary words."""
from __future__ import annotations

from typing import Iterable, Union

import numpy as np


class BitVector:
    """Immutable binary word of length ``m``.

    Bits are stored as a read-only ``uint8`` array. Hex and byte conversions
    are most-significant-bit first; when ``m`` is not a multiple of 8 the last
    byte is zero-padded on the right.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Union[Iterable[int], np.ndarray]):
        arr = np.array(bits, dtype=np.int64).ravel()
        if arr.size == 0:
            raise ValueError("BitVector must have positive length")
        if np.any((arr != 0) & (arr != 1)):
            raise ValueError("BitVector elements must be 0 or 1")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitVector":
        # trusted constructor: arr is already a 0/1 uint8 array
        obj = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.setflags(write=False)
        obj._bits = arr
        return obj

    @classmethod
    def zeros(cls, m: int) -> "BitVector":
        return cls._wrap(np.zeros(m, dtype=np.uint8))

    @classmethod
    def from_bytes(cls, data: bytes, m: int | None = None) -> "BitVector":
        arr = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        if m is not None:
            if m > arr.size:
                raise ValueError(f"{len(data)} bytes cannot hold {m} bits")
            arr = arr[:m]
        return cls._wrap(arr)

    @classmethod
    def from_hex(cls, text: str, m: int | None = None) -> "BitVector":
        return cls.from_bytes(bytes.fromhex(text), m)

    @classmethod
    def from_int(cls, value: int, m: int) -> "BitVector":
        if value < 0 or value >> m:
            raise ValueError(f"{value} does not fit in {m} bits")
        return cls([(value >> (m - 1 - i)) & 1 for i in range(m)])

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        return cls([int(c) for c in text])

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def length(self) -> int:
        return int(self._bits.size)

    def __len__(self) -> int:
        return self.length

    def to_bytes(self) -> bytes:
        return np.packbits(self._bits).tobytes()

    def to_hex(self) -> str:
        return self.to_bytes().hex()

    def to_int(self) -> int:
        return int("".join(map(str, self._bits.tolist())), 2)

    def weight(self) -> int:
        return int(self._bits.sum(dtype=np.int64))

    def flip(self, positions) -> "BitVector":
        out = self._bits.copy()
        out[np.asarray(positions, dtype=np.int64)] ^= 1
        return BitVector._wrap(out)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector._wrap(self._bits ^ other._bits)

    def __invert__(self) -> "BitVector":
        return BitVector._wrap(self._bits ^ 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self.length, self._bits.tobytes()))

    def __str__(self) -> str:
        if self.length <= 64:
            return "".join(map(str, self._bits.tolist()))
        return f"{self.to_hex()[:16]}...({self.length} bits)"

    def __repr__(self) -> str:
        return f"BitVector({self!s})"
