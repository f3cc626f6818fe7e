"""Key-query oracle and scripted adversaries shared by the security experiments.

An adversary is any object with two methods::

    target(pms) -> identity or None        # selective adversaries commit here
    attack(pms, mpk, oracle) -> (id_star, extra)

``extra`` is whatever the experiment asks for next (a guess bit, a callback).
The oracle keeps the ``QS`` (created) and ``IS`` (revealed) lists and enforces
the reveal restrictions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import hibtdf
from .errors import InvalidAdversary
from .hibtdf import is_prefix

CREATE = "create-key"
DELEGATE = "create-delegated-key"
REVEAL = "reveal-key"


def _as_id(identity) -> tuple:
    return tuple(tuple(int(c) for c in level) for level in identity)


class KeyOracle:
    """Create-key / Create-delegated-key / Reveal-key with list bookkeeping."""

    def __init__(self, pms, mpk, msk, rng, committed=None):
        self.pms = pms
        self.mpk = mpk
        self.msk = msk
        self.rng = rng
        self.committed = _as_id(committed) if committed is not None else None
        self.QS: list = []
        self.IS: list = []
        self.log: list = []
        self._keys: dict = {}

    def create_key(self, identity) -> None:
        identity = self.pms.check_identity(identity)
        self._keys[identity] = hibtdf.hf_kg(self.pms, self.msk, identity, self.rng)
        self._add(self.QS, identity)
        self.log.append((CREATE, identity))

    def create_delegated_key(self, identity, child) -> None:
        identity = self.pms.check_identity(identity)
        if identity not in self._keys:
            raise InvalidAdversary(f"delegation from {identity}, which is not in QS")
        sk = hibtdf.hf_del(self.pms, self.mpk, identity, self._keys[identity], child, self.rng)
        self._keys[sk.identity] = sk
        self._add(self.QS, sk.identity)
        self.log.append((DELEGATE, sk.identity))

    def reveal_key(self, identity):
        """The key, or ``None`` (bottom) if it was never created."""
        identity = _as_id(identity)
        if self.committed is not None and is_prefix(identity, self.committed):
            raise InvalidAdversary(f"selective adversary revealed {identity}, a prefix of its target")
        if identity not in self._keys:
            self.log.append((REVEAL, identity, None))
            return None
        self._add(self.IS, identity)
        self.log.append((REVEAL, identity))
        return self._keys[identity]

    @staticmethod
    def _add(lst, identity):
        if identity not in lst:
            lst.append(identity)

    def check_challenge(self, id_star) -> tuple:
        """Validate the challenge identity against the mode restrictions."""
        id_star = self.pms.check_identity(id_star)
        if self.committed is not None:
            if id_star != self.committed:
                raise InvalidAdversary("selective challenge differs from the committed identity")
        else:
            for identity in self.IS:
                if is_prefix(identity, id_star):
                    raise InvalidAdversary(f"revealed {identity} is a prefix of the challenge")
        return id_star


@dataclass
class ScriptedAdversary:
    """Deterministic adversary replaying a fixed list of oracle calls.

    ``script`` entries: ``("create", id)``, ``("delegate", id, child)``,
    ``("reveal", id)``.  ``guess`` maps the challenge (or ``None``) to a bit.
    """

    challenge: Sequence
    script: Sequence = ()
    commit: Optional[Sequence] = None
    guess: Callable = field(default=lambda _challenge: 0)
    revealed: list = field(default_factory=list)

    def target(self, pms):
        return self.commit

    def attack(self, pms, mpk, oracle: KeyOracle):
        for step in self.script:
            kind = step[0]
            if kind == "create":
                oracle.create_key(step[1])
            elif kind == "delegate":
                oracle.create_delegated_key(step[1], step[2])
            elif kind == "reveal":
                self.revealed.append(oracle.reveal_key(step[1]))
            else:
                raise ValueError(f"unknown script step {kind!r}")
        return self.challenge, self.guess
