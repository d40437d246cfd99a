import hashlib
import hmac

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pufguess.bits import BitVector
from pufguess.strong_puf import (
    KEY_BITS,
    Challenge,
    avalanche_experiment,
    build_device,
    expected_noise_propagation,
    hmac_sha256,
    inter_distance,
    noise_propagation,
    respond,
)

RFC4231 = [
    (b"\x0b" * 20, b"Hi There",
     "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"),
    (b"Jefe", b"what do ya want for nothing?",
     "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"),
    (b"\xaa" * 20, b"\xdd" * 50,
     "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe"),
    (bytes(range(1, 26)), b"\xcd" * 50,
     "82558a389a443c0ea4cc819899f2083a85f0faa3e578f8077a2e3ff46729665b"),
    (b"\x0c" * 20, b"Test With Truncation", "a3b6167473100ee06e0c796c2955552b"),
    (b"\xaa" * 131, b"Test Using Larger Than Block-Size Key - Hash Key First",
     "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54"),
    (b"\xaa" * 131, b"This is a test using a larger than block-size key and a larger than "
     b"block-size data. The key needs to be hashed before being used by the HMAC algorithm.",
     "9b09ffa71b942fcb27635fbcd5b0e944bfdc63644f0713938a7f51535c3a35e2"),
]


@pytest.mark.parametrize("key,data,tag", RFC4231)
def test_rfc4231_vectors(key, data, tag):
    assert hmac_sha256(key, data).hex().startswith(tag)


@pytest.mark.parametrize("key,data,tag", [v for v in RFC4231 if len(v[0]) <= 64])
def test_device_with_zero_padded_rfc_key(key, data, tag):
    device = build_device(BitVector.from_bytes(key.ljust(64, b"\x00")))
    out = device.respond(Challenge(data))
    assert out.length == 256
    assert out.to_hex().startswith(tag)


@given(st.binary(min_size=0, max_size=200), st.binary(min_size=0, max_size=300))
def test_matches_stdlib_hmac(key, data):
    assert hmac_sha256(key, data) == hmac.new(key, data, hashlib.sha256).digest()


def test_build_device_checks_length():
    with pytest.raises(ValueError):
        build_device(BitVector.zeros(256))
    zero = build_device(BitVector.zeros(KEY_BITS))
    assert respond(zero, Challenge(b"\x00")).length == 256


def test_challenge():
    with pytest.raises(ValueError):
        Challenge(b"")
    c = Challenge.from_hex("00ff")
    assert c.flip(0).payload == bytes.fromhex("80ff")
    assert c.flip(15).payload == bytes.fromhex("00fe")
    assert len(Challenge.random(np.random.default_rng(0)).payload) == 32
    assert len(Challenge.random(np.random.default_rng(0), 12).payload) == 2


def test_respond_is_deterministic():
    key = BitVector.from_bytes(bytes(range(64)))
    a, b = build_device(key), build_device(BitVector.from_bytes(bytes(range(64))))
    c = Challenge(b"challenge")
    assert a.respond(c) == b.respond(c) == a.respond(c)
    assert a == b


def test_single_key_bit_changes_response():
    key = BitVector.from_bytes(bytes(64))
    c = Challenge(b"x" * 32)
    r0 = build_device(key).respond(c)
    r1 = build_device(key.flip([3])).respond(c)
    assert r0 != r1


def test_avalanche():
    device = build_device(BitVector.from_bytes(bytes(range(64))))
    assert avalanche_experiment(device, 0, 200, seed=1).mean == 0.0
    for k in (1, 512):
        s = avalanche_experiment(device, k, 1000, seed=2)
        assert s.mean == pytest.approx(0.5, abs=0.01)
        assert s.std_dev == pytest.approx(np.sqrt(0.25 / 256), rel=0.15)
    with pytest.raises(ValueError):
        avalanche_experiment(device, 513, 10, seed=0)


def test_challenge_bit_avalanche():
    gen = np.random.default_rng(123)
    device = build_device(BitVector.from_bytes(gen.bytes(64)))
    values = []
    for _ in range(1000):
        c = Challenge.random(gen)
        values.append((respond(device, c) ^ respond(device, c.flip(int(gen.integers(256))))).weight() / 256)
    assert np.mean(values) == pytest.approx(0.5, abs=0.02)


def test_expected_noise_propagation():
    assert expected_noise_propagation(0.0) == 0.0
    assert expected_noise_propagation(0.001) == pytest.approx(0.2004, abs=1e-4)
    assert expected_noise_propagation(0.05) == pytest.approx(0.5, abs=1e-9)


def test_noise_propagation():
    assert noise_propagation(0.0, 100, seed=1).mean == 0.0
    assert noise_propagation(0.001, 2000, seed=1).mean == pytest.approx(0.20, abs=0.02)
    assert noise_propagation(0.05, 300, seed=1).mean == pytest.approx(0.5, abs=0.01)
    with pytest.raises(ValueError):
        noise_propagation(0.6, 1, seed=0)


def test_noise_propagation_monotone():
    ds = [0.0, 0.0005, 0.001, 0.002, 0.005, 0.01, 0.05]
    means = [noise_propagation(d, 3000, seed=4).mean for d in ds]
    assert all(b >= a - 0.02 for a, b in zip(means, means[1:]))
    assert means == pytest.approx([expected_noise_propagation(d) for d in ds], abs=0.025)


def test_inter_distance():
    s = inter_distance(1000, seed=0)
    assert s.count == 1000 * 999 // 2
    assert s.mean == pytest.approx(0.5, abs=0.01)
    assert s.std_dev == pytest.approx(0.031, abs=0.003)
    with pytest.raises(ValueError):
        inter_distance(1, seed=0)
