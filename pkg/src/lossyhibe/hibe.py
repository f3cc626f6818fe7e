"""IND-ID-CPA hierarchical IBE from the trapdoor function and a pairwise-independent hash.

``Enc(m)`` picks a fresh ``x`` in ``{0,1}^n`` and outputs ``(Eval(id, x), h(x) xor m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import hibtdf
from .auxgen import aux_injective
from .errors import DimensionError, ParameterError
from .hibtdf import HfMasterPublicKey, HfOutput, HfPublicParams

DEFAULT_EPS_BITS = 40


def _bits(values: Sequence[int], length: int, what: str) -> tuple[int, ...]:
    out = tuple(int(b) for b in values)
    if len(out) != length:
        raise DimensionError(f"{what} has {len(out)} bits, expected {length}")
    if any(b not in (0, 1) for b in out):
        raise DimensionError(f"{what} must be a bit string")
    return out


@dataclass(frozen=True)
class PairwiseHash:
    """``h(x) = A x xor b`` over GF(2); ``A`` is ``l x n``, stored row by row."""

    A: tuple  # l rows of n bits
    b: tuple  # l bits

    @property
    def l(self) -> int:
        return len(self.b)

    @property
    def n(self) -> int:
        return len(self.A[0]) if self.A else 0

    @classmethod
    def sample(cls, n: int, l: int, rng) -> "PairwiseHash":
        A = tuple(tuple(rng.randrange(2) for _ in range(n)) for _ in range(l))
        b = tuple(rng.randrange(2) for _ in range(l))
        return cls(A, b)

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        x = _bits(x, self.n, "hash input")
        return tuple((sum(a & xi for a, xi in zip(row, x)) + bi) & 1 for row, bi in zip(self.A, self.b))


def omega(pms: HfPublicParams) -> float:
    """Residual lossiness ``n - log2 p`` of a lossy identity."""
    return pms.n - math.log2(pms.p)


def max_message_bits(pms: HfPublicParams, eps_bits: float = DEFAULT_EPS_BITS) -> int:
    """Largest ``l`` with ``l <= omega - 2*lg(1/eps)`` (may be negative)."""
    return math.floor(omega(pms) - 2 * eps_bits)


def check_message_length(pms: HfPublicParams, l: int, eps_bits: float = DEFAULT_EPS_BITS):
    if l < 1:
        raise ParameterError("message length must be at least 1 bit")
    bound = max_message_bits(pms, eps_bits)
    if l > bound:
        raise ParameterError(
            f"l={l} exceeds n - log2(p) - 2*{eps_bits} = {omega(pms) - 2 * eps_bits:.2f}; "
            "increase n or relax eps")


@dataclass(frozen=True, eq=False)
class HibeMasterPublicKey:
    hf: HfMasterPublicKey
    hash: PairwiseHash

    @property
    def l(self) -> int:
        return self.hash.l


@dataclass(frozen=True)
class HibeCiphertext:
    c1: HfOutput
    c2: tuple


def hibe_mkgen(pms: HfPublicParams, l: int, rng, eps_bits: float = DEFAULT_EPS_BITS):
    """``(mpk, msk)`` with an injective-mode trapdoor function and a fresh hash."""
    check_message_length(pms, l, eps_bits)
    mpk, msk = hibtdf.hf_mkg(pms, aux_injective(pms.d, pms.mu), rng)
    return HibeMasterPublicKey(mpk, PairwiseHash.sample(pms.n, l, rng)), msk


def hibe_kg(pms, msk, identity, rng):
    return hibtdf.hf_kg(pms, msk, identity, rng)


def hibe_del(pms, mpk: HibeMasterPublicKey, identity, sk, child, rng):
    return hibtdf.hf_del(pms, mpk.hf, identity, sk, child, rng)


def hibe_enc(pms: HfPublicParams, mpk: HibeMasterPublicKey, m: Sequence[int], identity, rng) -> HibeCiphertext:
    m = _bits(m, mpk.l, "message")
    x = tuple(rng.randrange(2) for _ in range(pms.n))
    c1 = hibtdf.hf_eval(pms, mpk.hf, identity, x)
    return HibeCiphertext(c1, tuple(a ^ b for a, b in zip(mpk.hash(x), m)))


def hibe_dec(pms: HfPublicParams, mpk: HibeMasterPublicKey, sk, C: HibeCiphertext, identity) -> tuple:
    c2 = _bits(C.c2, mpk.l, "ciphertext mask")
    x = hibtdf.hf_inv(pms, mpk.hf, identity, sk, C.c1)
    return tuple(a ^ b for a, b in zip(mpk.hash(x), c2))


def smoothing_distance(pms: HfPublicParams, hf_mpk: HfMasterPublicKey, identity,
                       hashes: Sequence[PairwiseHash]) -> float:
    """Mean over ``hashes`` of SD((c1, h(x)), (c1, U_l)) for uniform ``x``.

    Enumerates all ``2^n`` inputs once; ``c1`` is bucketed by its value.
    """
    n = pms.n
    inputs = [tuple((v >> (n - 1 - i)) & 1 for i in range(n)) for v in range(2**n)]
    buckets: dict = {}
    for x in inputs:
        buckets.setdefault(hibtdf.hf_eval(pms, hf_mpk, identity, x), []).append(x)
    groups = list(buckets.values())
    total = 0.0
    for h in hashes:
        size = 2**h.l
        sd = 0.0
        for xs in groups:
            counts = [0] * size
            for x in xs:
                counts[int("".join(map(str, h(x))), 2)] += 1
            # both distributions give the c1 bucket weight len(xs)/2^n
            expect = len(xs) / size
            sd += sum(abs(c - expect) for c in counts)
        total += sd / (2 * 2**n)
    return total / len(hashes)


def smoothing_bound(pms: HfPublicParams, l: int) -> float:
    """Leftover-hash bound ``2*sqrt(2^l * p / 2^n)`` on :func:`smoothing_distance`."""
    return 2 * math.sqrt(2**l * pms.p / 2**pms.n)
