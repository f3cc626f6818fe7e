"""Prime-order asymmetric bilinear groups.

Two interchangeable backends sit behind :class:`GroupSuite`:

``secure``
    BLS12-381 (Type-3 pairing) through the RELIC bindings in ``petrelic``.
``transparent``
    Every element is stored as its discrete logarithm modulo a small prime,
    and ``e(a, b) = a*b mod p``.  Algebraically exact, cryptographically
    worthless.  It exists so that lossiness and key identities can be checked
    by enumeration.

Elements of both backends share one wrapper type, :class:`Element`, which
uses multiplicative notation: ``a * b``, ``a / b``, ``a ** k``.
"""

from __future__ import annotations

import contextlib
from typing import Iterator

import sympy

from .errors import LossyHibeError

G1 = "G1"
G2 = "G2"
GT = "GT"
GROUPS = (G1, G2, GT)

SECURE = "secure"
TRANSPARENT = "transparent"
BACKENDS = (SECURE, TRANSPARENT)


class GroupError(LossyHibeError):
    pass


class ModulusError(GroupError, ValueError):
    pass


class SuiteMismatchError(GroupError):
    pass


class EncodingError(GroupError, ValueError):
    pass


class _TransparentBackend:
    # raw values are discrete logs base the generator, identical for G1, G2, GT

    def __init__(self, p: int):
        self.p = p
        self._width = max(1, (p.bit_length() + 7) // 8)

    def generator(self, group):
        return 1

    def identity(self, group):
        return 0

    def mul(self, group, a, b):
        return (a + b) % self.p

    def exp(self, group, a, k):
        return (a * k) % self.p

    def inverse(self, group, a):
        return (-a) % self.p

    def eq(self, a, b):
        return a == b

    def is_identity(self, group, a):
        return a == 0

    def pair(self, a, b):
        return (a * b) % self.p

    def encode(self, group, a) -> bytes:
        return a.to_bytes((a.bit_length() + 7) // 8, "big")

    def decode(self, group, data: bytes):
        if len(data) > self._width:
            raise EncodingError(f"{group} encoding longer than modulus")
        if data[:1] == b"\x00":
            raise EncodingError("non-minimal integer encoding")
        value = int.from_bytes(data, "big")
        if value >= self.p:
            raise EncodingError(f"{group} value out of range")
        return value

    def hashable(self, a):
        return a


class _RelicBackend:
    _SIZES = {G1: 49, G2: 97, GT: 384}

    def __init__(self):
        import petrelic.multiplicative.pairing as mp

        self._mp = mp
        self._groups = {G1: mp.G1, G2: mp.G2, GT: mp.GT}
        self._elem_types = {G1: mp.G1Element, G2: mp.G2Element, GT: mp.GTElement}
        self.p = int(mp.G1.order())
        self._gens = {name: grp.generator() for name, grp in self._groups.items()}
        self._ids = {name: grp.neutral_element() for name, grp in self._groups.items()}

    def generator(self, group):
        return self._gens[group]

    def identity(self, group):
        return self._ids[group]

    def mul(self, group, a, b):
        return a * b

    def exp(self, group, a, k):
        return a ** (k % self.p)

    def inverse(self, group, a):
        return a.inverse()

    def eq(self, a, b):
        return a == b

    def is_identity(self, group, a):
        return a == self._ids[group]

    def pair(self, a, b):
        return a.pair(b)

    def encode(self, group, a) -> bytes:
        return a.to_binary()

    def decode(self, group, data: bytes):
        if data == b"\x00" and group != GT:
            return self._ids[group]
        if len(data) != self._SIZES[group]:
            raise EncodingError(f"bad {group} encoding length {len(data)}")
        if group != GT and data[0] not in (2, 3):
            raise EncodingError(f"bad {group} point prefix")
        elem = self._elem_types[group].from_binary(data)
        if not elem.is_valid():
            raise EncodingError(f"{group} encoding is not a valid subgroup element")
        return elem

    def hashable(self, a):
        return a.to_binary()


class Element:
    """A group element tied to the suite it was created in."""

    __slots__ = ("suite", "group", "raw")

    def __init__(self, suite: "GroupSuite", group: str, raw):
        self.suite = suite
        self.group = group
        self.raw = raw

    def _check(self, other: "Element"):
        if not isinstance(other, Element):
            raise TypeError(f"expected a group element, got {type(other).__name__}")
        if other.suite is not self.suite and other.suite != self.suite:
            raise SuiteMismatchError("elements belong to different group suites")
        if other.group != self.group:
            raise SuiteMismatchError(f"cannot combine {self.group} with {other.group}")

    def __mul__(self, other: "Element") -> "Element":
        self._check(other)
        return Element(self.suite, self.group, self.suite._impl.mul(self.group, self.raw, other.raw))

    def __truediv__(self, other: "Element") -> "Element":
        return self * other.inverse()

    def __pow__(self, k: int) -> "Element":
        return Element(self.suite, self.group, self.suite._impl.exp(self.group, self.raw, int(k)))

    def inverse(self) -> "Element":
        return Element(self.suite, self.group, self.suite._impl.inverse(self.group, self.raw))

    def is_identity(self) -> bool:
        return self.suite._impl.is_identity(self.group, self.raw)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return (
            self.group == other.group
            and self.suite == other.suite
            and self.suite._impl.eq(self.raw, other.raw)
        )

    def __hash__(self) -> int:
        return hash((self.group, self.suite._impl.hashable(self.raw)))

    def to_bytes(self) -> bytes:
        return self.suite._impl.encode(self.group, self.raw)

    def __repr__(self) -> str:
        body = self.to_bytes().hex()
        if len(body) > 16:
            body = body[:16] + "..."
        return f"<{self.group} {body}>"


class GroupSuite:
    """Bilinear group triple (G1, G2, GT) of prime order ``p``.

    Suites are immutable apart from the optional pairing counters used for
    instrumentation (see :meth:`count_pairings`).
    """

    def __init__(self, backend: str, impl):
        self.backend = backend
        self._impl = impl
        self.p: int = impl.p
        self._counters: list[list[int]] = []

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupSuite):
            return NotImplemented
        return self.backend == other.backend and self.p == other.p

    def __hash__(self) -> int:
        return hash((self.backend, self.p))

    def __repr__(self) -> str:
        return f"GroupSuite({self.backend!r}, p={self.p})"

    @property
    def insecure(self) -> bool:
        return self.backend == TRANSPARENT

    # generators and constants

    def generator(self, group: str) -> Element:
        return Element(self, group, self._impl.generator(group))

    def identity(self, group: str) -> Element:
        return Element(self, group, self._impl.identity(group))

    @property
    def g(self) -> Element:
        return self.generator(G1)

    @property
    def g_hat(self) -> Element:
        return self.generator(G2)

    # scalars

    def scalar(self, value: int) -> int:
        return value % self.p

    def random_scalar(self, rng) -> int:
        return rng.randrange(self.p)

    def random_nonzero_scalar(self, rng) -> int:
        return rng.randrange(1, self.p)

    # pairing

    def pair(self, a: Element, b: Element) -> Element:
        if a.group != G1 or b.group != G2:
            raise SuiteMismatchError(f"pairing takes (G1, G2), got ({a.group}, {b.group})")
        if a.suite != self or b.suite != self:
            raise SuiteMismatchError("pairing operands from a different suite")
        for counter in self._counters:
            counter[0] += 1
        return Element(self, GT, self._impl.pair(a.raw, b.raw))

    @contextlib.contextmanager
    def count_pairings(self) -> Iterator[list[int]]:
        """Count pairings evaluated inside the block; read ``counter[0]``."""
        counter = [0]
        self._counters.append(counter)
        try:
            yield counter
        finally:
            self._counters.remove(counter)

    # encoding

    def encode(self, elem: Element) -> bytes:
        if elem.suite != self:
            raise SuiteMismatchError("element from a different suite")
        return elem.to_bytes()

    def decode(self, group: str, data: bytes) -> Element:
        if group not in GROUPS:
            raise EncodingError(f"unknown group {group!r}")
        return Element(self, group, self._impl.decode(group, bytes(data)))

    # transparent-only helpers

    def dlog(self, elem: Element) -> int:
        """Discrete log of ``elem`` base the generator (transparent backend only)."""
        if self.backend != TRANSPARENT:
            raise GroupError("discrete logs are only exposed by the transparent backend")
        return elem.raw

    def from_dlog(self, group: str, value: int) -> Element:
        if self.backend != TRANSPARENT:
            raise GroupError("from_dlog is only available on the transparent backend")
        return Element(self, group, value % self.p)


_SECURE_SUITE: GroupSuite | None = None


def suite_new(backend: str = SECURE, order: int | None = None) -> GroupSuite:
    """Build a group suite.

    The secure backend ignores ``order``.  The transparent backend needs an
    explicit prime ``order >= 3``.
    """
    global _SECURE_SUITE
    if backend == SECURE:
        if _SECURE_SUITE is None:
            _SECURE_SUITE = GroupSuite(SECURE, _RelicBackend())
        return _SECURE_SUITE
    if backend != TRANSPARENT:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if order is None:
        raise ModulusError("transparent backend requires an explicit prime order")
    order = int(order)
    if order < 3 or not sympy.isprime(order):
        raise ModulusError(f"{order} is not a prime >= 3")
    return GroupSuite(TRANSPARENT, _TransparentBackend(order))
