"""Hierarchical inner-product predicate encryption over prime-order groups.

A key for predicate vectors ``(X_1, ..., X_l)`` decrypts a ciphertext for
attribute vectors ``(Y_1, ..., Y_k)`` iff ``l <= k`` and ``<X_i, Y_i> = 0``
for every ``i <= l``.  Decryption costs ``l + 2`` pairings whatever the
vector length ``mu``.

The *predicate-only* variant drops the payload component ``C0`` from
ciphertexts and the factor ``g_hat^alpha`` from keys; decryption then
becomes a yes/no predicate test.  The trapdoor function in
:mod:`lossyhibe.hibtdf` is built on that variant.

Index conventions mirror the usual notation: levels ``i1`` and ``j`` run
from 1 to ``d``, vector coordinates ``i2`` and ``k`` from 1 to ``mu`` (with
``i2 = 0`` for the extra public element ``h_{i1,0}``).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import LossyHibeError, ParameterError
from .groups import G1, G2, GT, Element, GroupSuite

FULL = "full"
PREDICATE_ONLY = "predicate-only"
VARIANTS = (FULL, PREDICATE_ONLY)

Vector = tuple[int, ...]
Hierarchy = tuple[Vector, ...]


class HpeError(LossyHibeError):
    pass


class DepthError(HpeError, ValueError):
    pass


class StructuralError(HpeError, ValueError):
    pass


class PlaintextError(HpeError, ValueError):
    pass


@dataclass(frozen=True)
class HpeParams:
    suite: GroupSuite
    d: int
    mu: int

    def __post_init__(self):
        if self.d < 1 or self.mu < 1:
            raise ParameterError(f"need d >= 1 and mu >= 1, got d={self.d}, mu={self.mu}")


@dataclass(frozen=True, eq=False)
class HpeMasterPublicKey:
    params: HpeParams
    v: Element
    w: Element
    payload_base: Optional[Element]  # e(g, v_hat)^alpha; None in the predicate-only variant
    h: dict  # (i1, i2) -> Element, i1 in [1, d], i2 in [0, mu]

    @property
    def variant(self) -> str:
        return PREDICATE_ONLY if self.payload_base is None else FULL


@dataclass(frozen=True, eq=False)
class HpeMasterSecretKey:
    params: HpeParams
    g_hat: Element
    g_hat_alpha: Optional[Element]
    v_hat: Element
    w_hat: Element
    h_hat: dict  # (i1, i2) -> Element

    @property
    def variant(self) -> str:
        return PREDICATE_ONLY if self.g_hat_alpha is None else FULL


@dataclass(frozen=True, eq=False)
class HpeSecretKey:
    """Decryption component ``(D, D_w, D_1..D_l)`` plus delegation component.

    Delegation components are keyed by their index tuples:
    ``K[(j, k)]``, ``L[j]``, ``L_levels[(j, k, i1)]``, ``L_w[(j, k)]`` with
    ``j`` in ``[l+1, d]``, ``k`` in ``[1, mu]``, ``i1`` in ``[1, l]``.
    """

    predicate: Hierarchy
    d: int
    mu: int
    D: Element
    D_w: Element
    D_levels: tuple  # D_1 .. D_l
    K: dict = field(default_factory=dict)
    L: dict = field(default_factory=dict)
    L_levels: dict = field(default_factory=dict)
    L_w: dict = field(default_factory=dict)

    @property
    def level(self) -> int:
        return len(self.predicate)


@dataclass(frozen=True, eq=False)
class HpeCiphertext:
    C0: Optional[Element]
    C_v: Element
    C_w: Element
    C: dict  # (i1, i2) -> Element, i1 in [1, kappa], i2 in [1, mu]
    kappa: int


class PlaintextSpace:
    """Messages ``m`` in ``[0, 2^k)`` encoded as ``e(g, g_hat)^m``.

    Membership is a table lookup, so an unauthorized decryption lands in the
    space only with probability about ``2^k / p``.
    """

    def __init__(self, suite: GroupSuite, k: int = 8):
        if not 1 <= k <= 16:
            raise ParameterError("plaintext bit-length must be in [1, 16]")
        if 2**k >= suite.p:
            raise ParameterError("plaintext space must be much smaller than the group order")
        self.suite = suite
        self.k = k
        self.base = suite.pair(suite.g, suite.g_hat)
        self._table: dict | None = None

    def __len__(self) -> int:
        return 2**self.k

    def encode(self, m: int) -> Element:
        if not 0 <= m < 2**self.k:
            raise PlaintextError(f"message {m} outside [0, 2^{self.k})")
        return self.base**m

    def decode(self, elem: Element) -> Optional[int]:
        if self._table is None:
            table = {}
            acc = self.suite.identity(GT)
            for m in range(2**self.k):
                table[acc] = m
                acc = acc * self.base
            self._table = table
        return self._table.get(elem)

    def __contains__(self, elem: Element) -> bool:
        return self.decode(elem) is not None


@functools.lru_cache(maxsize=8)
def plaintext_space(suite: GroupSuite, k: int = 8) -> PlaintextSpace:
    return PlaintextSpace(suite, k)


def inner(x: Sequence[int], y: Sequence[int], p: int) -> int:
    return sum(a * b for a, b in zip(x, y)) % p


def predicate_holds(X: Sequence[Sequence[int]], Y: Sequence[Sequence[int]], p: int) -> bool:
    """The hierarchical inner-product predicate ``f_X(Y)``."""
    if len(X) > len(Y):
        return False
    return all(inner(x, y, p) == 0 for x, y in zip(X, Y))


def power_product(bases: Sequence[Element], exponents: Sequence[int], one: Element) -> Element:
    """``prod bases[i] ** exponents[i]``, skipping the cheap cases 0 and 1."""
    acc = one
    for base, e in zip(bases, exponents):
        if e == 0:
            continue
        acc = acc * (base if e == 1 else base**e)
    return acc


def _normalize(vectors: Sequence[Sequence[int]], mu: int, p: int, what: str) -> Hierarchy:
    out = []
    for i, vec in enumerate(vectors, start=1):
        vec = tuple(int(c) % p for c in vec)
        if len(vec) != mu:
            raise StructuralError(f"{what} vector {i} has length {len(vec)}, expected {mu}")
        out.append(vec)
    return tuple(out)


def hpe_setup(params: HpeParams, variant: str = FULL, rng=None):
    """Generate ``(mpk, msk)``."""
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")
    suite, d, mu = params.suite, params.d, params.mu
    g, g_hat = suite.g, suite.g_hat
    alpha = suite.random_nonzero_scalar(rng)
    alpha_v = suite.random_nonzero_scalar(rng)
    alpha_w = suite.random_nonzero_scalar(rng)
    h, h_hat = {}, {}
    for i1 in range(1, d + 1):
        for i2 in range(0, mu + 1):
            a = suite.random_nonzero_scalar(rng)
            h[i1, i2] = g**a
            h_hat[i1, i2] = g_hat**a
    v_hat = g_hat**alpha_v
    full = variant == FULL
    mpk = HpeMasterPublicKey(
        params=params,
        v=g**alpha_v,
        w=g**alpha_w,
        payload_base=suite.pair(g, v_hat) ** alpha if full else None,
        h=h,
    )
    msk = HpeMasterSecretKey(
        params=params,
        g_hat=g_hat,
        g_hat_alpha=g_hat**alpha if full else None,
        v_hat=v_hat,
        w_hat=g_hat**alpha_w,
        h_hat=h_hat,
    )
    return mpk, msk


def _keygen(msk: HpeMasterSecretKey, X: Hierarchy, rng) -> HpeSecretKey:
    suite = msk.params.suite
    d, mu = msk.params.d, msk.params.mu
    ell = len(X)
    one = suite.identity(G2)
    rand = suite.random_nonzero_scalar
    # P_i1 = prod_i2 h_hat[i1, i2]^x[i1, i2], shared by D and every K_{j,k}
    P = [power_product([msk.h_hat[i1, i2] for i2 in range(1, mu + 1)], X[i1 - 1], one)
         for i1 in range(1, ell + 1)]

    r_w = rand(rng)
    r = [rand(rng) for _ in range(ell)]
    D = power_product(P, r, one) * msk.w_hat**r_w
    if msk.g_hat_alpha is not None:
        D = msk.g_hat_alpha * D
    D_w = msk.v_hat**r_w
    D_levels = tuple(msk.v_hat**ri for ri in r)

    K, L, L_levels, L_w = {}, {}, {}, {}
    for j in range(ell + 1, d + 1):
        s_j = rand(rng)
        L[j] = msk.v_hat**s_j
        for k in range(1, mu + 1):
            s_jk = [rand(rng) for _ in range(ell)]
            s_wjk = rand(rng)
            K[j, k] = power_product(P, s_jk, one) * msk.h_hat[j, k] ** s_j * msk.w_hat**s_wjk
            for i1 in range(1, ell + 1):
                L_levels[j, k, i1] = msk.v_hat ** s_jk[i1 - 1]
            L_w[j, k] = msk.v_hat**s_wjk
    return HpeSecretKey(X, d, mu, D, D_w, D_levels, K, L, L_levels, L_w)


def hpe_keygen(msk: HpeMasterSecretKey, X: Sequence[Sequence[int]], rng) -> HpeSecretKey:
    """Key for predicate vectors ``X = (X_1, ..., X_l)``, ``1 <= l <= d``."""
    d, mu, p = msk.params.d, msk.params.mu, msk.params.suite.p
    if not 1 <= len(X) <= d:
        raise DepthError(f"predicate depth {len(X)} outside [1, {d}]")
    return _keygen(msk, _normalize(X, mu, p, "predicate"), rng)


def hpe_delegate(mpk: HpeMasterPublicKey, X: Sequence[Sequence[int]], sk: HpeSecretKey,
                 X_next: Sequence[int], rng) -> HpeSecretKey:
    """Derive a key for ``(X_1, ..., X_l, X_next)`` from a key for ``X``."""
    suite = mpk.params.suite
    d, mu, p = mpk.params.d, mpk.params.mu, suite.p
    X = _normalize(X, mu, p, "predicate")
    if X != sk.predicate:
        raise StructuralError("key does not match the given predicate vectors")
    ell = sk.level
    if ell >= d:
        raise DepthError(f"key is already at the maximal depth {d}")
    (x,) = _normalize([X_next], mu, p, "predicate")
    one = suite.identity(G2)
    rand = suite.random_nonzero_scalar
    m = ell + 1

    # 1. re-randomize the delegation component by z
    z = rand(rng)
    K = {key: val**z for key, val in sk.K.items()}
    L = {key: val**z for key, val in sk.L.items()}
    L_levels = {key: val**z for key, val in sk.L_levels.items()}
    L_w = {key: val**z for key, val in sk.L_w.items()}

    # 2. partial decryption key for level l+1
    K_m = power_product([K[m, k] for k in range(1, mu + 1)], x, one)
    L_m = {m: L[m]}
    for i1 in range(1, ell + 1):
        L_m[i1] = power_product([L_levels[m, k, i1] for k in range(1, mu + 1)], x, one)
    L_w_m = power_product([L_w[m, k] for k in range(1, mu + 1)], x, one)

    # 4. decryption component
    D = sk.D * K_m
    D_w = sk.D_w * L_w_m
    D_levels = tuple(sk.D_levels[i1 - 1] * L_m[i1] for i1 in range(1, ell + 1)) + (L_m[m],)

    # 3 + 5. per-(j, k) re-randomized copies folded into the new delegation component
    K2, L2, L_levels2, L_w2 = {}, {}, {}, {}
    for j in range(ell + 2, d + 1):
        L2[j] = L[j]
        for k in range(1, mu + 1):
            tau = rand(rng)
            K2[j, k] = K[j, k] * K_m**tau
            L_w2[j, k] = L_w[j, k] * L_w_m**tau
            for i1 in range(1, m + 1):
                # the new level has no old share: L_hat[j, k, l+1] = 1
                prev = L_levels[j, k, i1] if i1 <= ell else one
                L_levels2[j, k, i1] = prev * L_m[i1] ** tau
    return HpeSecretKey(X + (x,), d, mu, D, D_w, D_levels, K2, L2, L_levels2, L_w2)


def hpe_encrypt(mpk: HpeMasterPublicKey, Y: Sequence[Sequence[int]], message: Optional[int],
                rng, space: Optional[PlaintextSpace] = None) -> HpeCiphertext:
    """Encrypt ``message`` (an integer in the plaintext space) under attributes ``Y``.

    Predicate-only keys take ``message=None`` and produce no ``C0``.
    """
    suite = mpk.params.suite
    d, mu, p = mpk.params.d, mpk.params.mu, suite.p
    if not 1 <= len(Y) <= d:
        raise DepthError(f"attribute depth {len(Y)} outside [1, {d}]")
    Y = _normalize(Y, mu, p, "attribute")
    if mpk.payload_base is not None:
        if message is None:
            raise PlaintextError("the full variant needs a message")
        M = (space or plaintext_space(suite)).encode(message)
    elif message is not None:
        raise PlaintextError("the predicate-only variant carries no message")
    s = suite.random_nonzero_scalar(rng)
    C = {}
    for i1, y in enumerate(Y, start=1):
        h0 = mpk.h[i1, 0]
        for i2 in range(1, mu + 1):
            C[i1, i2] = (h0 ** y[i2 - 1] * mpk.h[i1, i2]) ** s
    C0 = M * mpk.payload_base**s if mpk.payload_base is not None else None
    return HpeCiphertext(C0, mpk.v**s, mpk.w**s, C, len(Y))


def collapse(ct: HpeCiphertext, X: Hierarchy, one: Element) -> list[Element]:
    """``C_i1 = prod_i2 C[i1, i2]^x[i1, i2]`` for each key level."""
    mu = len(X[0]) if X else 0
    return [power_product([ct.C[i1, i2] for i2 in range(1, mu + 1)], x, one)
            for i1, x in enumerate(X, start=1)]


def pairing_product(suite: GroupSuite, C_v: Element, C_w: Element,
                    collapsed: Sequence[Element], sk: HpeSecretKey) -> Element:
    """``e(C_v, D)^-1 * e(C_w, D_w) * prod e(C_i1, D_i1)``: exactly ``l + 2`` pairings."""
    if len(collapsed) != sk.level:
        raise StructuralError(f"{len(collapsed)} ciphertext levels for a level-{sk.level} key")
    acc = suite.pair(C_v, sk.D).inverse() * suite.pair(C_w, sk.D_w)
    for c, D_i in zip(collapsed, sk.D_levels):
        acc = acc * suite.pair(c, D_i)
    return acc


def _check_shapes(mpk: HpeMasterPublicKey, sk: HpeSecretKey, ct: HpeCiphertext):
    mu = mpk.params.mu
    if sk.mu != mu or any(len(x) != mu for x in sk.predicate):
        raise StructuralError("key vector length does not match the public key")
    expected = {(i1, i2) for i1 in range(1, ct.kappa + 1) for i2 in range(1, mu + 1)}
    if set(ct.C) != expected:
        raise StructuralError("ciphertext components do not match its depth")


def hpe_decrypt(mpk: HpeMasterPublicKey, X: Sequence[Sequence[int]], sk: HpeSecretKey,
                ct: HpeCiphertext, space: Optional[PlaintextSpace] = None) -> Optional[int]:
    """Recover the message, or ``None`` when the key's predicate rejects the ciphertext."""
    suite = mpk.params.suite
    if ct.C0 is None:
        raise StructuralError("predicate-only ciphertext; use hpe_predicate_test")
    _check_shapes(mpk, sk, ct)
    X = _normalize(X, mpk.params.mu, suite.p, "predicate")
    if X != sk.predicate:
        raise StructuralError("key does not match the given predicate vectors")
    if sk.level > ct.kappa:
        return None
    collapsed = collapse(ct, X, suite.identity(G1))
    M = ct.C0 * pairing_product(suite, ct.C_v, ct.C_w, collapsed, sk)
    return (space or plaintext_space(suite)).decode(M)


def hpe_predicate_test(mpk: HpeMasterPublicKey, sk: HpeSecretKey, ct: HpeCiphertext) -> bool:
    """True iff the pairing product of the predicate-only variant is ``1_GT``."""
    suite = mpk.params.suite
    if ct.C0 is not None:
        raise StructuralError("ciphertext carries a payload; use hpe_decrypt")
    _check_shapes(mpk, sk, ct)
    if sk.level > ct.kappa:
        return False
    collapsed = collapse(ct, sk.predicate, suite.identity(G1))
    return pairing_product(suite, ct.C_v, ct.C_w, collapsed, sk).is_identity()
