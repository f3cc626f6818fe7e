import itertools
import math
import random
from collections import Counter

import pytest

from lossyhibe import hibe, hibtdf
from lossyhibe.auxgen import aux_selective
from lossyhibe.errors import DimensionError, ParameterError


def all_hashes(n, l):
    rows = list(itertools.product((0, 1), repeat=n))
    for A in itertools.product(rows, repeat=l):
        for b in itertools.product((0, 1), repeat=l):
            yield hibe.PairwiseHash(A, b)


def test_hash_family_pairwise_independent_exact():
    hashes = list(all_hashes(3, 2))
    assert len(hashes) == 256
    inputs = list(itertools.product((0, 1), repeat=3))
    for x, x2 in itertools.permutations(inputs, 2):
        joint = Counter((h(x), h(x2)) for h in hashes)
        assert len(joint) == 16 and set(joint.values()) == {16}


def test_message_bound_examples(t11, secure):
    small = hibtdf.hf_setup(1, 8, 2, suite=t11)
    assert hibe.omega(small) == pytest.approx(8 - math.log2(11))
    assert hibe.max_message_bits(small, eps_bits=1) == 2
    big = hibtdf.hf_setup(1, 300, 2, suite=secure)
    assert hibe.omega(big) == pytest.approx(45.14, abs=0.01)
    assert hibe.max_message_bits(big, eps_bits=20) == 5
    with pytest.raises(ParameterError):
        hibe.check_message_length(small, 0, 1)
    with pytest.raises(ParameterError):
        hibe.check_message_length(small, 3, 1)
    with pytest.raises(ParameterError):
        hibe.hibe_mkgen(big, 6, random.Random(0), eps_bits=20)


@pytest.fixture(scope="module")
def scheme(tbig):
    rng = random.Random(11)
    pms = hibtdf.hf_setup(3, 70, 2, suite=tbig)
    mpk, msk = hibe.hibe_mkgen(pms, 4, rng, eps_bits=2)
    return pms, mpk, msk


def test_roundtrip_fresh_and_delegated(scheme, rng):
    pms, mpk, msk = scheme
    for _ in range(10):
        ident = tuple((1, rng.randrange(pms.p)) for _ in range(rng.randint(1, 3)))
        m = tuple(rng.randrange(2) for _ in range(4))
        ct = hibe.hibe_enc(pms, mpk, m, ident, rng)
        assert len(ct.c2) == 4
        sk = hibe.hibe_kg(pms, msk, ident[:1], rng)
        for ell in range(2, len(ident) + 1):
            sk = hibe.hibe_del(pms, mpk, ident[:ell - 1], sk, ident[ell - 1], rng)
        assert hibe.hibe_dec(pms, mpk, sk, ct, ident) == m
        assert hibe.hibe_dec(pms, mpk, hibe.hibe_kg(pms, msk, ident, rng), ct, ident) == m


def test_zero_message_mask_and_tamper(scheme, rng):
    pms, mpk, msk = scheme
    ident = ((1, 8),)
    sk = hibe.hibe_kg(pms, msk, ident, rng)
    ct = hibe.hibe_enc(pms, mpk, (0, 0, 0, 0), ident, rng)
    x = hibtdf.hf_inv(pms, mpk.hf, ident, sk, ct.c1)
    assert ct.c2 == mpk.hash(x)
    mask = (1, 0, 1, 1)
    tampered = hibe.HibeCiphertext(ct.c1, tuple(a ^ b for a, b in zip(ct.c2, mask)))
    assert hibe.hibe_dec(pms, mpk, sk, tampered, ident) == mask


def test_encryption_is_randomized(scheme, rng):
    pms, mpk, _ = scheme
    a = hibe.hibe_enc(pms, mpk, (1, 1, 0, 0), ((1, 2),), rng)
    b = hibe.hibe_enc(pms, mpk, (1, 1, 0, 0), ((1, 2),), rng)
    assert a != b


def test_length_errors(scheme, rng):
    pms, mpk, msk = scheme
    with pytest.raises(DimensionError):
        hibe.hibe_enc(pms, mpk, (1, 0), ((1, 2),), rng)
    with pytest.raises(DimensionError):
        hibe.hibe_enc(pms, mpk, (1, 0, 2, 0), ((1, 2),), rng)


def test_smoothing_lossy_vs_injective(t11):
    rng = random.Random(3)
    pms = hibtdf.hf_setup(2, 8, 2, suite=t11)
    id_star = ((1, 3),)
    mpk, _ = hibtdf.hf_mkg(pms, aux_selective(id_star, 2, 2, 11), rng)
    hashes = [hibe.PairwiseHash.sample(8, 2, rng) for _ in range(20)]
    lossy = hibe.smoothing_distance(pms, mpk, id_star, hashes)
    assert lossy <= hibe.smoothing_bound(pms, 2)
    # an injective c1 pins x down, so h(x) is fixed: distance 1 - 2^-l exactly
    assert hibe.smoothing_distance(pms, mpk, ((1, 4),), hashes) == pytest.approx(0.75)


@pytest.mark.slow
def test_secure_roundtrip_at_default_scale(secure):
    rng = random.Random(1)
    pms = hibtdf.hf_setup(1, 300, 2, suite=secure)
    mpk, msk = hibe.hibe_mkgen(pms, 5, rng, eps_bits=20)
    sk = hibe.hibe_kg(pms, msk, [(1, 77)], rng)
    m = (1, 0, 1, 1, 0)
    assert hibe.hibe_dec(pms, mpk, sk, hibe.hibe_enc(pms, mpk, m, [(1, 77)], rng), [(1, 77)]) == m
