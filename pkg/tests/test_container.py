import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lossyhibe import container, dethibe, hibe, hibtdf
from lossyhibe.auxgen import aux_injective
from lossyhibe.groups import suite_new


def objects(suite, seed, d=2, n=3, mu=2):
    rng = random.Random(seed)
    pms = hibtdf.hf_setup(d, n, mu, suite=suite)
    mpk, msk = hibtdf.hf_mkg(pms, aux_injective(d, mu), rng)
    ident = tuple((1,) + tuple(rng.randrange(suite.p) for _ in range(mu - 1)) for _ in range(d))
    sk = hibtdf.hf_kg(pms, msk, ident[:1], rng)
    sk2 = hibtdf.hf_del(pms, mpk, ident[:1], sk, ident[1], rng)
    X = tuple(rng.randrange(2) for _ in range(n))
    out = hibtdf.hf_eval(pms, mpk, ident, X)
    hm = hibe.HibeMasterPublicKey(mpk, hibe.PairwiseHash.sample(n, 2, rng))
    ct = hibe.hibe_enc(pms, hm, (1, 0), ident[:1], rng)
    return pms, [pms, mpk, msk, sk, sk2, out, hm, ct, dethibe.DetCiphertext(out)]


@pytest.mark.parametrize("name", ["tbig", "t11", "secure"])
def test_every_kind_roundtrips(request, name):
    suite = request.getfixturevalue(name)
    pms, objs = objects(suite, 1)
    for obj in objs:
        data = container.encode(obj, pms)
        pms2, back = container.decode(data)
        assert container.encode(back, pms2) == data


def test_decoded_keys_still_work(secure):
    rng = random.Random(2)
    pms = hibtdf.hf_setup(2, 4, 2, suite=secure)
    mpk, msk = hibtdf.hf_mkg(pms, aux_injective(2, 2), rng)
    _, mpk = container.decode(container.encode(mpk), "mpk")
    _, msk = container.decode(container.encode(msk), "msk")
    sk = hibtdf.hf_kg(pms, msk, [(1, 9)], rng)
    _, sk = container.decode(container.encode(sk, pms), "sk")
    sk = hibtdf.hf_del(pms, mpk, [(1, 9)], sk, (1, 2), rng)
    X = (1, 1, 0, 1)
    _, out = container.decode(container.encode(hibtdf.hf_eval(pms, mpk, [(1, 9), (1, 2)], X), pms))
    assert hibtdf.hf_inv(pms, mpk, [(1, 9), (1, 2)], sk, out) == X


def test_row_exponents_survive(t11):
    pms = hibtdf.hf_setup(1, 3, 2, suite=t11)
    _, msk = hibtdf.hf_mkg(pms, aux_injective(1, 2), random.Random(0), expose_exponents=True)
    assert container.decode(container.encode(msk))[1].row_exponents == msk.row_exponents


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(2, 3), st.integers(0, 10**6))
def test_roundtrip_property(d, n, mu, seed):
    suite = suite_new("transparent", 2**61 - 1)
    d = max(d, 2)
    pms, objs = objects(suite, seed, d, max(n, 2), mu)
    for obj in objs:
        data = container.encode(obj, pms)
        assert container.encode(*reversed(container.decode(data))) == data


def test_rejections(tbig):
    pms, objs = objects(tbig, 3)
    mpk = container.encode(objs[1])
    with pytest.raises(container.KindMismatch):
        container.decode(mpk, "sk")
    with pytest.raises(container.ContainerError):
        container.decode(b"XXXX" + mpk[4:])
    with pytest.raises(container.ContainerError, match="version"):
        container.decode(mpk[:4] + bytes([2]) + mpk[5:])
    with pytest.raises(container.ContainerError):
        container.decode(mpk[:5] + bytes([0]) + mpk[6:])  # backend tag says secure
    with pytest.raises(container.ContainerError):
        container.decode(mpk[:6] + bytes([99]) + mpk[7:])
    with pytest.raises(container.ContainerError):
        container.decode(mpk[:-1])
    with pytest.raises(container.ContainerError):
        container.decode(mpk + b"\x00")
    (hlen,) = struct.unpack(">I", mpk[7:11])
    with pytest.raises(container.ContainerError):
        container.decode(mpk[:11] + b"{" * hlen + mpk[11 + hlen:])
    with pytest.raises(container.ContainerError):
        container.encode(objs[5])  # outputs need pms
    with pytest.raises(container.ContainerError):
        container.encode(object(), pms)


def test_peek(tbig):
    pms, objs = objects(tbig, 4)
    kind, header = container.peek(container.encode(objs[7], pms))
    assert kind == "hibe-ct" and header["l"] == 2 and header["n"] == 3
    kind, header = container.peek(container.encode(objs[6]))
    assert kind == "mpk" and "hash" in header
