import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lossyhibe import hpe
from lossyhibe.errors import ParameterError
from lossyhibe.groups import suite_new


def orthogonal(rng, p, mu, to):
    """Random vector x with <x, to> = 0 mod p (to[-1] must be invertible)."""
    x = [rng.randrange(p) for _ in range(mu - 1)]
    partial = sum(a * b for a, b in zip(x, to)) % p
    x.append(-partial * pow(to[-1], -1, p) % p)
    return tuple(x)


def rand_vec(rng, p, mu):
    return tuple([rng.randrange(p) for _ in range(mu - 1)] + [rng.randrange(1, p)])


def key_is_well_formed(suite, msk, sk):
    """Check every key component's discrete log against its defining formula."""
    dl = suite.dlog
    p = suite.p
    a_v, a_w = dl(msk.v_hat), dl(msk.w_hat)
    inv_v = pow(a_v, -1, p)
    alpha = dl(msk.g_hat_alpha) if msk.g_hat_alpha is not None else 0
    h = {k: dl(v) for k, v in msk.h_hat.items()}
    X = sk.predicate
    P = [sum(h[i1, i2] * X[i1 - 1][i2 - 1] for i2 in range(1, sk.mu + 1)) % p
         for i1 in range(1, sk.level + 1)]
    r_w = dl(sk.D_w) * inv_v % p
    r = [dl(D) * inv_v % p for D in sk.D_levels]
    assert dl(sk.D) == (alpha + sum(ri * Pi for ri, Pi in zip(r, P)) + a_w * r_w) % p
    for (j, k), K in sk.K.items():
        s_j = dl(sk.L[j]) * inv_v % p
        s_jk = [dl(sk.L_levels[j, k, i1]) * inv_v % p for i1 in range(1, sk.level + 1)]
        s_w = dl(sk.L_w[j, k]) * inv_v % p
        assert dl(K) == (sum(s * Pi for s, Pi in zip(s_jk, P)) + h[j, k] * s_j + a_w * s_w) % p
    expect_K = {(j, k) for j in range(sk.level + 1, sk.d + 1) for k in range(1, sk.mu + 1)}
    assert set(sk.K) == expect_K and set(sk.L_w) == expect_K
    assert set(sk.L) == set(range(sk.level + 1, sk.d + 1))
    return True


@pytest.fixture(params=["tbig", "secure"])
def suite(request):
    return request.getfixturevalue(request.param)


def test_roundtrip_fresh_and_delegated(suite, rng):
    p = suite.p
    params = hpe.HpeParams(suite, 3, 3)
    mpk, msk = hpe.hpe_setup(params, hpe.FULL, rng)
    Y = [rand_vec(rng, p, 3) for _ in range(3)]
    X = [orthogonal(rng, p, 3, y) for y in Y]
    sk1 = hpe.hpe_keygen(msk, X[:1], rng)
    sk2 = hpe.hpe_delegate(mpk, X[:1], sk1, X[1], rng)
    sk3 = hpe.hpe_delegate(mpk, X[:2], sk2, X[2], rng)
    ct = hpe.hpe_encrypt(mpk, Y, 200, rng)
    for ell, sk in enumerate((sk1, sk2, sk3), start=1):
        assert hpe.hpe_decrypt(mpk, X[:ell], sk, ct) == 200


def test_unsatisfied_predicate_fails(tbig, rng):
    p = tbig.p
    params = hpe.HpeParams(tbig, 2, 3)
    mpk, msk = hpe.hpe_setup(params, hpe.FULL, rng)
    Y = [rand_vec(rng, p, 3) for _ in range(2)]
    X = [orthogonal(rng, p, 3, Y[0]), rand_vec(rng, p, 3)]
    assert not hpe.predicate_holds(X, Y, p)
    sk = hpe.hpe_keygen(msk, X, rng)
    assert hpe.hpe_decrypt(mpk, X, sk, hpe.hpe_encrypt(mpk, Y, 7, rng)) is None


def test_key_deeper_than_ciphertext(tbig, rng):
    params = hpe.HpeParams(tbig, 2, 2)
    mpk, msk = hpe.hpe_setup(params, hpe.FULL, rng)
    sk = hpe.hpe_keygen(msk, [(0, 0), (0, 0)], rng)
    ct = hpe.hpe_encrypt(mpk, [(1, 1)], 3, rng)
    assert hpe.hpe_decrypt(mpk, [(0, 0), (0, 0)], sk, ct) is None


def test_keys_well_formed_transparent(tbig, rng):
    p = tbig.p
    for variant in (hpe.FULL, hpe.PREDICATE_ONLY):
        params = hpe.HpeParams(tbig, 3, 4)
        mpk, msk = hpe.hpe_setup(params, variant, rng)
        X = [rand_vec(rng, p, 4) for _ in range(3)]
        sk = hpe.hpe_keygen(msk, X[:1], rng)
        assert key_is_well_formed(tbig, msk, sk)
        for ell in (1, 2):
            sk = hpe.hpe_delegate(mpk, X[:ell], sk, X[ell], rng)
            assert key_is_well_formed(tbig, msk, sk)


def test_delegation_rerandomizes(tbig, rng):
    params = hpe.HpeParams(tbig, 2, 2)
    mpk, msk = hpe.hpe_setup(params, hpe.FULL, rng)
    sk = hpe.hpe_keygen(msk, [(1, 2)], rng)
    a = hpe.hpe_delegate(mpk, [(1, 2)], sk, (3, 4), rng)
    b = hpe.hpe_delegate(mpk, [(1, 2)], sk, (3, 4), rng)
    assert a.D != b.D


def test_predicate_only_variant(tbig, rng):
    p = tbig.p
    params = hpe.HpeParams(tbig, 2, 2)
    mpk, msk = hpe.hpe_setup(params, hpe.PREDICATE_ONLY, rng)
    assert mpk.payload_base is None and msk.g_hat_alpha is None
    Y = [rand_vec(rng, p, 2), rand_vec(rng, p, 2)]
    good = [orthogonal(rng, p, 2, Y[0])]
    bad = [rand_vec(rng, p, 2)]
    ct = hpe.hpe_encrypt(mpk, Y, None, rng)
    assert ct.C0 is None
    assert hpe.hpe_predicate_test(mpk, hpe.hpe_keygen(msk, good, rng), ct)
    assert not hpe.hpe_predicate_test(mpk, hpe.hpe_keygen(msk, bad, rng), ct)
    with pytest.raises(hpe.StructuralError):
        hpe.hpe_decrypt(mpk, good, hpe.hpe_keygen(msk, good, rng), ct)


@pytest.mark.parametrize("mu", [2, 8])
def test_pairing_count_depends_on_level_only(tbig, rng, mu):
    p = tbig.p
    params = hpe.HpeParams(tbig, 3, mu)
    mpk, msk = hpe.hpe_setup(params, hpe.FULL, rng)
    Y = [rand_vec(rng, p, mu) for _ in range(2)]
    X = [orthogonal(rng, p, mu, y) for y in Y]
    sk = hpe.hpe_keygen(msk, X, rng)
    ct = hpe.hpe_encrypt(mpk, Y, 1, rng)
    with tbig.count_pairings() as c:
        assert hpe.hpe_decrypt(mpk, X, sk, ct) == 1
    assert c[0] == 4


def test_parameter_and_shape_errors(tbig, rng):
    with pytest.raises(ParameterError):
        hpe.HpeParams(tbig, 0, 2)
    params = hpe.HpeParams(tbig, 2, 2)
    mpk, msk = hpe.hpe_setup(params, hpe.FULL, rng)
    with pytest.raises(hpe.DepthError):
        hpe.hpe_keygen(msk, [], rng)
    with pytest.raises(hpe.DepthError):
        hpe.hpe_keygen(msk, [(1, 1)] * 3, rng)
    with pytest.raises(hpe.StructuralError):
        hpe.hpe_keygen(msk, [(1, 1, 1)], rng)
    sk = hpe.hpe_keygen(msk, [(1, 1), (1, 1)], rng)
    with pytest.raises(hpe.DepthError):
        hpe.hpe_delegate(mpk, [(1, 1), (1, 1)], sk, (1, 1), rng)
    with pytest.raises(ParameterError):
        hpe.hpe_setup(params, "nope", rng)


def test_plaintext_space(tbig, t11):
    space = hpe.plaintext_space(tbig, 4)
    assert len(space) == 16
    for m in range(16):
        assert space.decode(space.encode(m)) == m
    assert space.decode(space.encode(3) * space.encode(13)) is None
    with pytest.raises(hpe.PlaintextError):
        space.encode(16)
    with pytest.raises(ParameterError):
        hpe.PlaintextSpace(t11, 8)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), st.integers(0, 2**32), st.booleans())
def test_decrypt_iff_predicate(d, mu, seed, satisfy):
    suite = suite_new("transparent", 2**61 - 1)
    r = random.Random(seed)
    p = suite.p
    mpk, msk = hpe.hpe_setup(hpe.HpeParams(suite, d, mu), hpe.FULL, r)
    kappa = r.randint(1, d)
    ell = r.randint(1, kappa)
    Y = [rand_vec(r, p, mu) for _ in range(kappa)]
    X = [orthogonal(r, p, mu, y) if satisfy else rand_vec(r, p, mu) for y in Y[:ell]]
    sk = hpe.hpe_keygen(msk, X, r)
    got = hpe.hpe_decrypt(mpk, X, sk, hpe.hpe_encrypt(mpk, Y, 5, r))
    assert (got == 5) == hpe.predicate_holds(X, Y, p)
