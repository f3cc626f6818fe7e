"""Deterministic hierarchical IBE: encryption is the trapdoor function itself.

Also provides message sources with known min-entropy and the single-challenge
indistinguishability experiment used to exercise toy adversaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import hibtdf
from .auxgen import aux_injective
from .errors import DimensionError, InvalidAdversary, ParameterError
from .hibtdf import HfOutput, HfPublicParams
from .oracles import KeyOracle

SELECTIVE = hibtdf.SELECTIVE
ADAPTIVE = hibtdf.ADAPTIVE
INVALID = "invalid adversary"


@dataclass(frozen=True)
class DetCiphertext:
    C: HfOutput


def det_mkg(pms: HfPublicParams, rng):
    return hibtdf.hf_mkg(pms, aux_injective(pms.d, pms.mu), rng)


def det_enc(pms: HfPublicParams, mpk, m: Sequence[int], identity) -> DetCiphertext:
    """No randomness: the same ``(mpk, id, m)`` always gives the same ciphertext."""
    return DetCiphertext(hibtdf.hf_eval(pms, mpk, identity, m))


def det_dec(pms: HfPublicParams, mpk, sk, C: DetCiphertext, identity) -> tuple:
    return hibtdf.hf_inv(pms, mpk, identity, sk, C.C)


# message sources


def _rank_gf2(rows: Sequence[int]) -> int:
    rows, rank = list(rows), 0
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
    return rank


def _to_bits(v: int, n: int) -> tuple[int, ...]:
    return tuple((v >> (n - 1 - i)) & 1 for i in range(n))


@dataclass(frozen=True)
class UniformSource:
    """Uniform over ``{0,1}^n``; min-entropy ``n``."""

    n: int

    @property
    def min_entropy(self) -> float:
        return float(self.n)

    def sample(self, rng) -> tuple[int, ...]:
        return _to_bits(rng.getrandbits(self.n), self.n)

    def support(self):
        return [_to_bits(v, self.n) for v in range(2**self.n)]


@dataclass(frozen=True)
class AffineSubspaceSource:
    """Uniform over ``offset + span(basis)`` with ``t`` independent basis vectors.

    Vectors are ``n``-bit integers (MSB first); min-entropy is exactly ``t``.
    """

    n: int
    basis: tuple
    offset: int = 0

    def __post_init__(self):
        if any(not 0 <= b < 2**self.n for b in (*self.basis, self.offset)):
            raise DimensionError("basis and offset must be n-bit vectors")
        if _rank_gf2(self.basis) != len(self.basis):
            raise ParameterError("basis vectors are linearly dependent")

    @classmethod
    def random(cls, n: int, t: int, rng) -> "AffineSubspaceSource":
        if not 0 <= t <= n:
            raise ParameterError(f"need 0 <= t <= n, got t={t}")
        basis: list[int] = []
        while len(basis) < t:
            cand = rng.getrandbits(n)
            if _rank_gf2(basis + [cand]) == len(basis) + 1:
                basis.append(cand)
        return cls(n, tuple(basis), rng.getrandbits(n))

    @property
    def t(self) -> int:
        return len(self.basis)

    @property
    def min_entropy(self) -> float:
        return float(self.t)

    def _combine(self, coeffs: int) -> int:
        v = self.offset
        for i, b in enumerate(self.basis):
            if (coeffs >> i) & 1:
                v ^= b
        return v

    def sample(self, rng) -> tuple[int, ...]:
        return _to_bits(self._combine(rng.getrandbits(self.t) if self.t else 0), self.n)

    def support(self):
        return [_to_bits(self._combine(c), self.n) for c in range(2**self.t)]


def empirical_min_entropy(support: Sequence) -> float:
    """``-log2 max Pr[x]`` for the uniform distribution over a listed support (with repeats)."""
    counts: dict = {}
    for x in support:
        counts[x] = counts.get(x, 0) + 1
    return -math.log2(max(counts.values()) / len(support))


def required_min_entropy(n: int, omega: float, eps_bits: float) -> float:
    """Source entropy ``t >= n - omega + 2*lg(1/eps)`` needed for hiding."""
    return n - omega + 2 * eps_bits


# single-challenge experiment


@dataclass
class Priv1Result:
    bit: Optional[int]  # None when the adversary broke a restriction
    verdict: str
    QS: list
    IS: list
    id_star: Optional[tuple]
    message: Optional[tuple]
    log: list


def priv1_experiment(pms: HfPublicParams, source, adversary, mode: str, rng) -> Priv1Result:
    """Run the numbered guessing experiment once and return the adversary's bit.

    ``adversary.attack`` must return ``(id_star, guess)`` where ``guess`` maps
    the challenge :class:`DetCiphertext` to a bit.
    """
    if mode not in (SELECTIVE, ADAPTIVE):
        raise ParameterError(f"unknown mode {mode!r}")
    committed = adversary.target(pms) if mode == SELECTIVE else None
    if mode == SELECTIVE and committed is None:
        raise InvalidAdversary("selective adversary did not commit to an identity")
    mpk, msk = det_mkg(pms, rng)
    oracle = KeyOracle(pms, mpk, msk, rng, committed)
    try:
        id_star, guess = adversary.attack(pms, mpk, oracle)
        id_star = oracle.check_challenge(id_star)
    except InvalidAdversary:
        return Priv1Result(None, INVALID, oracle.QS, oracle.IS, None, None, oracle.log)
    m = source.sample(rng)
    bit = int(guess(det_enc(pms, mpk, m, id_star))) & 1
    return Priv1Result(bit, "ok", oracle.QS, oracle.IS, id_star, m, oracle.log)
