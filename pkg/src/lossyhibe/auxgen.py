"""Auxiliary inputs that steer the trapdoor function into injective or lossy mode.

An identity ``id`` is lossy under ``y`` exactly when ``<y_i1, id_i1> = 0 mod p``
at every level of ``id``; :func:`partition` reports that verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionError, ParameterError
from .hpe import inner

LOSSY = "lossy"
INJECTIVE = "injective"


@dataclass(frozen=True)
class PartitionReport:
    products: tuple[int, ...]  # <y_i1, id_i1> mod p, one per identity level

    @property
    def verdict(self) -> str:
        return LOSSY if all(v == 0 for v in self.products) else INJECTIVE

    @property
    def lossy(self) -> bool:
        return self.verdict == LOSSY


def aux_injective(d: int, mu: int) -> tuple:
    """``[(1,0,...,0) | ... | (1,0,...,0)]``: every identity level has product 1."""
    return tuple((1,) + (0,) * (mu - 1) for _ in range(d))


def aux_selective(id_star: Sequence[Sequence[int]], d: int, mu: int = 2, p: int | None = None) -> tuple:
    """Lossy exactly on ``id_star`` and its prefixes (``mu = 2`` identities ``(1, x)``).

    Levels of ``id_star`` get ``(-x, 1)``; the remaining levels get ``(1, 0)``.
    """
    if mu != 2:
        raise ParameterError("the selective auxiliary input is only defined for mu = 2")
    if not 1 <= len(id_star) <= d:
        raise DimensionError(f"target depth {len(id_star)} outside [1, {d}]")
    levels = []
    for level in id_star:
        if len(level) != 2 or level[0] != 1:
            raise DimensionError(f"target level {tuple(level)} is not of the form (1, x)")
        x = -int(level[1])
        levels.append((x % p if p else x, 1))
    levels.extend((1, 0) for _ in range(d - len(id_star)))
    return tuple(levels)


def adaptive_xi_values(mu: int, xi_range: str = "narrow") -> int:
    """Number of values ``xi`` ranges over.

    ``"narrow"`` gives ``{0..mu-1}``, under which the non-abort lower bound holds;
    ``"wide"`` gives ``{0..mu+1}``.
    """
    if xi_range == "narrow":
        return mu
    if xi_range == "wide":
        return mu + 2
    raise ParameterError(f"unknown xi range {xi_range!r}")


def aux_adaptive(d: int, mu: int, q: int, rng, p: int, xi_range: str = "narrow") -> tuple:
    """Randomized lossy-mode input for adaptive adversaries making at most ``q`` queries.

    Per level: ``y' <- [0, 2q)``, ``xi <- [0, mu)``, ``y[1] = y' - 2*xi*q`` and
    ``y[i] <- [0, 2q)`` for ``i >= 2``; everything is reduced mod ``p``.
    """
    if q < 1 or 2 * mu * q > p:
        raise ParameterError(f"need 1 <= q <= p/(2 mu); got q={q}, mu={mu}")
    n_xi = adaptive_xi_values(mu, xi_range)
    levels = []
    for _ in range(d):
        y_prime = rng.randrange(2 * q)
        xi = rng.randrange(n_xi)
        tail = tuple(rng.randrange(2 * q) for _ in range(mu - 1))
        levels.append(((y_prime - 2 * xi * q) % p,) + tail)
    return tuple(levels)


def partition(y: Sequence[Sequence[int]], identity: Sequence[Sequence[int]], p: int) -> PartitionReport:
    """Per-level inner products of ``identity`` against ``y`` and the resulting verdict."""
    if len(identity) > len(y):
        raise DimensionError(f"identity depth {len(identity)} exceeds auxiliary depth {len(y)}")
    products = []
    for level, yv in zip(identity, y):
        if len(level) != len(yv):
            raise DimensionError("identity level and auxiliary vector lengths differ")
        products.append(inner(yv, level, p))
    return PartitionReport(tuple(products))
