"""Hierarchical identity-based (lossy) trapdoor function.

The master public key holds an ``n x n`` matrix of predicate-only HPE
ciphertexts.  Row ``l2`` reuses one encryption exponent ``s[l2]``; column
``l1`` lives under its own HPE key pair.  Diagonal cells carry the
auxiliary vector ``y``, off-diagonal cells carry the zero vector.

Evaluating on ``X`` in ``{0,1}^n`` for identity ``id`` multiplies the rows
selected by ``X`` and folds each level's ciphertext components with the
identity vector, which leaves, per column ``l1``, an anonymous HIBE-style
ciphertext perturbed by ``x[l1] * s[l1] * <y_i1, id_i1>``.  Inversion tests
each column with the identity's key: the pairing product is ``1`` exactly
when the perturbation is absent, i.e. ``x[l1] = 0``.

If ``<y_i1, id_i1> = 0`` at every level the output only depends on
``<s, X> mod p`` and the function is lossy (image size at most ``p``).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from . import hpe
from .errors import DimensionError, IdentityError, ParameterError
from .groups import G1, G2, TRANSPARENT, Element, GroupSuite, suite_new

SELECTIVE = "selective"
ADAPTIVE = "adaptive"
MODES = (SELECTIVE, ADAPTIVE)

HierId = tuple[tuple[int, ...], ...]
AuxVector = tuple[tuple[int, ...], ...]
Bits = tuple[int, ...]


def is_prefix(a: Sequence, b: Sequence) -> bool:
    """``a <= b``: ``a`` is no deeper than ``b`` and agrees with it level by level."""
    return len(a) <= len(b) and all(tuple(x) == tuple(y) for x, y in zip(a, b))


@dataclass(frozen=True)
class HfPublicParams:
    suite: GroupSuite
    d: int
    n: int
    mu: int
    mode: str = SELECTIVE

    @property
    def p(self) -> int:
        return self.suite.p

    @property
    def input_space_size(self) -> int:
        return 2**self.n

    @property
    def aux_dimension(self) -> int:
        return self.d * self.mu

    @property
    def hpe_params(self) -> hpe.HpeParams:
        return hpe.HpeParams(self.suite, self.d, self.mu)

    def check_level(self, level: Sequence[int]) -> tuple[int, ...]:
        level = tuple(int(c) for c in level)
        if len(level) != self.mu:
            raise IdentityError(f"identity level {level} has length {len(level)}, expected {self.mu}")
        if level[0] != 1:
            raise IdentityError(f"identity level {level} must start with 1")
        if self.mode == ADAPTIVE:
            if any(c not in (0, 1) for c in level[1:]):
                raise IdentityError(f"adaptive identities need binary tails, got {level}")
            return level
        return tuple(c % self.p for c in level)

    def check_identity(self, identity: Sequence[Sequence[int]]) -> HierId:
        if not 1 <= len(identity) <= self.d:
            raise IdentityError(f"identity depth {len(identity)} outside [1, {self.d}]")
        return tuple(self.check_level(level) for level in identity)

    def check_input(self, X: Sequence[int]) -> Bits:
        X = tuple(int(b) for b in X)
        if len(X) != self.n:
            raise DimensionError(f"input has {len(X)} bits, expected {self.n}")
        if any(b not in (0, 1) for b in X):
            raise DimensionError("input must be a bit string")
        return X

    def check_aux(self, y) -> AuxVector:
        flat = [c for level in y for c in (level if isinstance(level, (tuple, list)) else [level])]
        if len(flat) != self.d * self.mu:
            raise DimensionError(f"auxiliary input has {len(flat)} entries, expected {self.d * self.mu}")
        flat = [int(c) % self.p for c in flat]
        return tuple(tuple(flat[i * self.mu:(i + 1) * self.mu]) for i in range(self.d))


def hf_setup(d: int, n: int, mu: int, mode: str = SELECTIVE,
             suite: Optional[GroupSuite] = None) -> HfPublicParams:
    """Public parameters; the group suite plays the role of the security parameter."""
    if n < 1 or d < 1:
        raise ParameterError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if mu < 2:
        raise ParameterError("mu must be at least 2 (leading 1 plus identity payload)")
    if mode not in MODES:
        raise ParameterError(f"unknown mode {mode!r}")
    return HfPublicParams(suite or suite_new(), d, n, mu, mode)


@dataclass(frozen=True, eq=False)
class HfMasterPublicKey:
    """Core parameters ``(v, w[l1], h[i1,i2,l1])`` plus the ciphertext matrix.

    Matrix entries: ``J[l2]`` (tuple, index ``l2 - 1``), ``C_w[(l2, l1)]``
    and ``C[(i1, i2, l2, l1)]``.  All dictionary keys are 1-based.
    """

    pms: HfPublicParams
    v: Element
    w: tuple
    h: dict
    J: tuple
    C_w: dict
    C: dict

    def coordinate(self, l1: int) -> hpe.HpeMasterPublicKey:
        """The predicate-only HPE public key of column ``l1``."""
        pms = self.pms
        h = {(i1, i2): self.h[i1, i2, l1] for i1 in range(1, pms.d + 1) for i2 in range(pms.mu + 1)}
        return hpe.HpeMasterPublicKey(pms.hpe_params, self.v, self.w[l1 - 1], None, h)

    def cell(self, l2: int, l1: int) -> hpe.HpeCiphertext:
        """Matrix entry ``CT[l2, l1]`` as a predicate-only HPE ciphertext of depth ``d``."""
        pms = self.pms
        C = {(i1, i2): self.C[i1, i2, l2, l1]
             for i1 in range(1, pms.d + 1) for i2 in range(1, pms.mu + 1)}
        return hpe.HpeCiphertext(None, self.J[l2 - 1], self.C_w[l2, l1], C, pms.d)


@dataclass(frozen=True, eq=False)
class HfMasterSecretKey:
    pms: HfPublicParams
    v_hat: Element
    w_hat: tuple
    h_hat: dict
    # row exponents s[1..n]; only ever populated on the transparent backend for tests
    row_exponents: Optional[tuple] = None

    def coordinate(self, l1: int) -> hpe.HpeMasterSecretKey:
        pms = self.pms
        h_hat = {(i1, i2): self.h_hat[i1, i2, l1]
                 for i1 in range(1, pms.d + 1) for i2 in range(pms.mu + 1)}
        return hpe.HpeMasterSecretKey(pms.hpe_params, pms.suite.g_hat, None,
                                      self.v_hat, self.w_hat[l1 - 1], h_hat)


@dataclass(frozen=True, eq=False)
class HfSecretKey:
    identity: HierId
    coords: tuple  # one predicate-only HpeSecretKey per column

    @property
    def level(self) -> int:
        return len(self.identity)


@dataclass(frozen=True)
class HfOutput:
    """``(C_id_v, CT_id_w[1..n], CT_id[i1][l1])`` with ``n + 1 + n*l`` elements."""

    c_v: Element
    c_w: tuple
    ct: tuple  # ct[i1 - 1][l1 - 1]

    def elements(self) -> list[Element]:
        return [self.c_v, *self.c_w, *(e for row in self.ct for e in row)]

    @property
    def level(self) -> int:
        return len(self.ct)

    @property
    def n(self) -> int:
        return len(self.c_w)


def hf_mkg(pms: HfPublicParams, y, rng, *, expose_exponents: bool = False,
           workers: Optional[int] = None):
    """Master key pair for auxiliary input ``y`` (``d`` level vectors of length ``mu``).

    All randomness is drawn up front in a fixed order, so the result only
    depends on the rng state; rows are then built on ``workers`` threads.
    """
    y = pms.check_aux(y)
    if expose_exponents and pms.suite.backend != TRANSPARENT:
        raise ParameterError("row exponents may only be exposed on the transparent backend")
    suite, d, n, mu = pms.suite, pms.d, pms.n, pms.mu
    p = suite.p
    g, g_hat = suite.g, suite.g_hat
    rand = suite.random_nonzero_scalar

    alpha_v = rand(rng)
    alpha_w = [rand(rng) for _ in range(n)]
    alpha_h = {(i1, i2, l1): rand(rng)
               for i1 in range(1, d + 1) for i2 in range(mu + 1) for l1 in range(1, n + 1)}
    s = [rand(rng) for _ in range(n)]

    v = g**alpha_v
    w = tuple(g**a for a in alpha_w)
    h = {key: g**a for key, a in alpha_h.items()}

    def row(l2):
        s2 = s[l2 - 1]
        C_w, C = {}, {}
        for l1 in range(1, n + 1):
            C_w[l2, l1] = g ** (alpha_w[l1 - 1] * s2 % p)
            for i1 in range(1, d + 1):
                a0 = alpha_h[i1, 0, l1]
                for i2 in range(1, mu + 1):
                    # (h0^(y*delta) * h)^s, computed in the exponent
                    e = alpha_h[i1, i2, l1]
                    if l1 == l2:
                        e += a0 * y[i1 - 1][i2 - 1]
                    C[i1, i2, l2, l1] = g ** (e * s2 % p)
        return v**s2, C_w, C

    workers = min(workers or os.cpu_count() or 1, n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(1, n + 1)))
    else:
        rows = [row(l2) for l2 in range(1, n + 1)]

    J = tuple(r[0] for r in rows)
    C_w, C = {}, {}
    for r in rows:
        C_w.update(r[1])
        C.update(r[2])
    mpk = HfMasterPublicKey(pms, v, w, h, J, C_w, C)
    msk = HfMasterSecretKey(
        pms,
        g_hat**alpha_v,
        tuple(g_hat**a for a in alpha_w),
        {key: g_hat**a for key, a in alpha_h.items()},
        tuple(s) if expose_exponents else None,
    )
    return mpk, msk


def hf_kg(pms: HfPublicParams, msk: HfMasterSecretKey, identity, rng) -> HfSecretKey:
    identity = pms.check_identity(identity)
    coords = tuple(hpe._keygen(msk.coordinate(l1), identity, rng) for l1 in range(1, pms.n + 1))
    return HfSecretKey(identity, coords)


def hf_del(pms: HfPublicParams, mpk: HfMasterPublicKey, identity, sk: HfSecretKey,
           child: Sequence[int], rng) -> HfSecretKey:
    """Delegate ``sk`` for ``identity`` to ``identity + (child,)``, column by column."""
    identity = pms.check_identity(identity)
    if identity != sk.identity:
        raise IdentityError("secret key does not belong to this identity")
    if len(identity) >= pms.d:
        raise hpe.DepthError(f"identity already has the maximal depth {pms.d}")
    child = pms.check_level(child)
    coords = tuple(hpe.hpe_delegate(mpk.coordinate(l1), identity, sk.coords[l1 - 1], child, rng)
                   for l1 in range(1, pms.n + 1))
    return HfSecretKey(identity + (child,), coords)


def hf_eval(pms: HfPublicParams, mpk: HfMasterPublicKey, identity, X: Sequence[int]) -> HfOutput:
    """Deterministic evaluation.

    Rows selected by ``X`` are multiplied first and the identity vector is
    applied afterwards; by commutativity this equals folding every cell with
    the identity and then taking the ``X``-weighted product.
    """
    identity = pms.check_identity(identity)
    X = pms.check_input(X)
    suite, n, mu = pms.suite, pms.n, pms.mu
    one = suite.identity(G1)
    rows = [l2 for l2 in range(1, n + 1) if X[l2 - 1]]

    def rowprod(elems):
        acc = one
        for e in elems:
            acc = acc * e
        return acc

    c_v = rowprod(mpk.J[l2 - 1] for l2 in rows)
    c_w = tuple(rowprod(mpk.C_w[l2, l1] for l2 in rows) for l1 in range(1, n + 1))
    ct = []
    for i1, level in enumerate(identity, start=1):
        ct.append(tuple(
            hpe.power_product(
                [rowprod(mpk.C[i1, i2, l2, l1] for l2 in rows) for i2 in range(1, mu + 1)],
                level, one)
            for l1 in range(1, n + 1)))
    return HfOutput(c_v, c_w, tuple(ct))


def hf_inv(pms: HfPublicParams, mpk: HfMasterPublicKey, identity, sk: HfSecretKey,
           C: HfOutput) -> Bits:
    """Recover ``X`` bit by bit with ``l + 2`` pairings per bit.

    On a lossy identity the returned bits are meaningless but no error is
    raised; compare ``hf_eval`` of the result with ``C`` to detect that.
    """
    identity = pms.check_identity(identity)
    if identity != sk.identity:
        raise IdentityError("secret key does not belong to this identity")
    n, ell = pms.n, len(identity)
    if C.n != n or C.level != ell or any(len(row) != n for row in C.ct):
        raise hpe.StructuralError(f"output shape does not match n={n}, level={ell}")
    suite = pms.suite
    bits = []
    for l1 in range(1, n + 1):
        collapsed = [C.ct[i1][l1 - 1] for i1 in range(ell)]
        prod = hpe.pairing_product(suite, C.c_v, C.c_w[l1 - 1], collapsed, sk.coords[l1 - 1])
        bits.append(0 if prod.is_identity() else 1)
    return tuple(bits)


def image(pms: HfPublicParams, mpk: HfMasterPublicKey, identity) -> set:
    """The full image of ``hf_eval`` over ``{0,1}^n`` (enumeration; small ``n`` only)."""
    out = set()
    for x in range(2**pms.n):
        X = tuple((x >> (pms.n - 1 - i)) & 1 for i in range(pms.n))
        out.add(hf_eval(pms, mpk, identity, X))
    return out
