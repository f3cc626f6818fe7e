"""Experiment lab: non-abort bounds, the artificial-abort stage and the real/lossy game.

Only the statistical side is measurable here.  Computational
indistinguishability of the real and lossy key distributions is assumed,
never tested; reports say so in their ``note`` field.
"""

from __future__ import annotations

import itertools
import math
import os
import random
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import hibtdf
from .auxgen import adaptive_xi_values, aux_adaptive, aux_injective, aux_selective, partition
from .errors import InvalidAdversary, ParameterError
from .hibtdf import ADAPTIVE, SELECTIVE, HfPublicParams, is_prefix
from .oracles import KeyOracle

SAMPLE_CONSTANT = 8  # the constant hidden in the O(.) sample count of estimate_eta
REAL, LOSSY = 0, 1
NOTE = ("statistical conditions only; indistinguishability of real and lossy keys "
        "is a computational assumption and is not measured")


def eta_lower_bound(q: int, mu: int, d: int) -> Fraction:
    """``1 / (2 (2 q mu)^d)``."""
    if min(q, mu, d) < 1:
        raise ParameterError("q, mu and d must all be at least 1")
    return Fraction(1, 2 * (2 * q * mu) ** d)


def delta_bound(q: int = 1, mu: int = 1, d: int = 1, mode: str = ADAPTIVE) -> Fraction:
    """``13 / (32 (2 q mu)^d)`` against adaptive adversaries, ``1`` against selective ones."""
    if mode == SELECTIVE:
        return Fraction(1)
    if min(q, mu, d) < 1:
        raise ParameterError("q, mu and d must all be at least 1")
    return Fraction(13, 32 * (2 * q * mu) ** d)


def sample_count(zeta: float, eta_low, c: int = SAMPLE_CONSTANT) -> int:
    """``ceil(c zeta^-2 ln(1/zeta) eta_low^-1 ln(1/eta_low))``."""
    if not 0 < zeta < 1:
        raise ParameterError("zeta must lie in (0, 1)")
    el = float(eta_low)
    return math.ceil(c * zeta**-2 * math.log(1 / zeta) / el * math.log(1 / el))


# the event E(IS, id*) and its probability


def event_holds(y, IS: Sequence, id_star, p: int) -> bool:
    """All revealed identities injective and the challenge lossy under ``y``."""
    if not partition(y, id_star, p).lossy:
        return False
    return all(not partition(y, identity, p).lossy for identity in IS)


def _split_rngs(rng, workers: int) -> list:
    return [random.Random(rng.getrandbits(64)) for _ in range(workers)]


def _count_events(trials: int, IS, id_star, d, mu, q, p, rng, xi_range, workers) -> int:
    workers = max(1, min(workers or os.cpu_count() or 1, trials))
    rngs = _split_rngs(rng, workers)
    shares = [trials // workers + (1 if i < trials % workers else 0) for i in range(workers)]

    def chunk(i):
        r = rngs[i]
        return sum(event_holds(aux_adaptive(d, mu, q, r, p, xi_range), IS, id_star, p)
                   for _ in range(shares[i]))

    if workers == 1:
        return chunk(0)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(chunk, range(workers)))  # map keeps the reduction order fixed


@dataclass(frozen=True)
class AbortEstimate:
    eta: float  # eta'
    samples: int
    eta_low: Fraction
    c: int = SAMPLE_CONSTANT
    hits: int = 0


def estimate_eta(IS: Sequence, id_star, zeta: float, d: int, mu: int, q: int, rng, *,
                 p: int = 2**61 - 1, xi_range: str = "narrow", samples: Optional[int] = None,
                 c: int = SAMPLE_CONSTANT, workers: Optional[int] = None) -> AbortEstimate:
    """Monte-Carlo estimate of ``Pr_y[E(IS, id*)]`` over the adaptive sampler."""
    eta_low = eta_lower_bound(q, mu, d)
    n = samples if samples is not None else sample_count(zeta, eta_low, c)
    hits = _count_events(n, IS, id_star, d, mu, q, p, rng, xi_range, workers)
    return AbortEstimate(hits / n, n, eta_low, c, hits)


def exact_eta(IS: Sequence, id_star, d: int, mu: int, q: int, *, p: int = 2**61 - 1,
              xi_range: str = "narrow") -> Fraction:
    """``Pr_y[E(IS, id*)]`` by enumerating the sampler's whole (uniform) sample space."""
    n_xi = adaptive_xi_values(mu, xi_range)
    per_level = []
    for y_prime, xi in itertools.product(range(2 * q), range(n_xi)):
        for tail in itertools.product(range(2 * q), repeat=mu - 1):
            per_level.append(((y_prime - 2 * xi * q) % p,) + tail)
    hits = total = 0
    for y in itertools.product(per_level, repeat=d):
        total += 1
        hits += event_holds(y, IS, id_star, p)
    return Fraction(hits, total)


def preoutput_stage(estimate: AbortEstimate, rng, mode: str = ADAPTIVE) -> int:
    """Artificial abort bit ``d2``.

    Selective mode always gives 1.  Otherwise ``d2 = 1`` when ``eta' <= eta_low``
    and with probability ``eta_low / eta'`` when ``eta'`` is larger.
    """
    if mode == SELECTIVE:
        return 1
    eta, low = Fraction(estimate.eta), estimate.eta_low
    if eta <= low:
        return 1
    return 1 if rng.random() < float(low / eta) else 0


# the real / lossy experiment


@dataclass
class ExperimentTranscript:
    beta: int
    mode: str
    id_dagger: Optional[tuple]
    id_star: Optional[tuple]
    queries: list
    QS: list
    IS: list
    d_A: Optional[int]
    d1: Optional[int]
    d2: Optional[int]
    verdict: str = "ok"
    estimate: Optional[AbortEstimate] = None
    note: str = NOTE

    @property
    def d_not_abort(self) -> Optional[int]:
        if self.d1 is None or self.d2 is None:
            return None
        return self.d1 & self.d2

    @property
    def d_exp(self) -> Optional[int]:
        if self.d_not_abort is None or self.d_A is None:
            return None
        return self.d_A & self.d_not_abort


def lossiness(pms: HfPublicParams, mpk, identity) -> float:
    """``log2(2^n / |image|)``, by enumerating the image (small ``n`` only)."""
    return pms.n - math.log2(len(hibtdf.image(pms, mpk, identity)))


def run_experiment(beta: int, adversary, mode: str, pms: HfPublicParams, rng, *,
                   zeta: float = 0.5, q: int = 1, d1_method: str = "partition",
                   samples: Optional[int] = None, xi_range: str = "narrow") -> ExperimentTranscript:
    """One run of the real (``beta = 0``) or lossy (``beta = 1``) experiment.

    ``adversary.attack`` returns ``(id_star, d_A)``.  ``d1_method="image"``
    measures lossiness by image enumeration instead of the inner products.
    """
    if beta not in (REAL, LOSSY):
        raise ParameterError("beta must be 0 or 1")
    if mode != pms.mode:
        raise ParameterError(f"experiment mode {mode!r} differs from parameter mode {pms.mode!r}")
    id_dagger = None
    if mode == SELECTIVE:
        id_dagger = adversary.target(pms)
        if id_dagger is None:
            raise InvalidAdversary("selective adversary did not commit to an identity")
        id_dagger = pms.check_identity(id_dagger)
        y1 = aux_selective(id_dagger, pms.d, pms.mu, pms.p)
    else:
        y1 = aux_adaptive(pms.d, pms.mu, q, rng, pms.p, xi_range)
    keys = [hibtdf.hf_mkg(pms, aux_injective(pms.d, pms.mu), rng), hibtdf.hf_mkg(pms, y1, rng)]
    mpk, msk = keys[beta]
    oracle = KeyOracle(pms, mpk, msk, rng, id_dagger)
    try:
        id_star, d_A = adversary.attack(pms, mpk, oracle)
        id_star = oracle.check_challenge(id_star)
    except InvalidAdversary:
        return ExperimentTranscript(beta, mode, id_dagger, None, oracle.log, oracle.QS, oracle.IS,
                                    None, None, None, verdict="invalid adversary")
    if callable(d_A):
        d_A = d_A(None)
    mpk1 = keys[LOSSY][0]
    if d1_method == "image":
        omega = pms.n - math.log2(pms.p)
        d1 = (all(lossiness(pms, mpk1, i) == 0 for i in oracle.IS)
              and lossiness(pms, mpk1, id_star) >= omega)
    elif d1_method == "partition":
        d1 = event_holds(y1, oracle.IS, id_star, pms.p)
    else:
        raise ParameterError(f"unknown d1 method {d1_method!r}")
    estimate = None
    if mode == SELECTIVE:
        d2 = 1
    else:
        estimate = estimate_eta(oracle.IS, id_star, zeta, pms.d, pms.mu, q, rng,
                                p=pms.p, xi_range=xi_range, samples=samples)
        d2 = preoutput_stage(estimate, rng)
    return ExperimentTranscript(beta, mode, id_dagger, id_star, oracle.log, oracle.QS, oracle.IS,
                                int(d_A) & 1, int(d1), d2, estimate=estimate)


# non-abort bound check


@dataclass
class NonAbortReport:
    q: int
    mu: int
    d: int
    IS: list
    id_star: tuple
    eta_low: Fraction
    trials: int
    hits: int
    exact: Optional[Fraction] = None
    warning: Optional[str] = None
    note: str = NOTE

    @property
    def empirical(self) -> float:
        return self.hits / self.trials if self.trials else 0.0

    @property
    def sigma(self) -> float:
        e = self.empirical
        return math.sqrt(max(e * (1 - e), 1e-12) / self.trials) if self.trials else 0.0

    @property
    def passed(self) -> bool:
        if self.warning:
            return False
        ok = self.empirical >= float(self.eta_low) - 3 * self.sigma
        if self.exact is not None:
            ok = ok and self.exact >= self.eta_low
        return ok

    def as_dict(self) -> dict:
        return {
            "q": self.q, "mu": self.mu, "d": self.d,
            "IS": [list(map(list, i)) for i in self.IS], "id_star": list(map(list, self.id_star)),
            "eta_low": self.eta_low, "trials": self.trials, "hits": self.hits,
            "empirical": self.empirical, "sigma": self.sigma, "exact": self.exact,
            "passed": self.passed, "warning": self.warning, "note": self.note,
        }


def siblings(id_star, mu: int, count: int) -> list:
    """Up to ``count`` distinct binary-tail identities differing from ``id_star`` at its last level."""
    id_star = tuple(tuple(level) for level in id_star)
    out = []
    for tail in itertools.product((0, 1), repeat=mu - 1):
        level = (1,) + tail
        if level != id_star[-1]:
            out.append(id_star[:-1] + (level,))
        if len(out) == count:
            break
    return out


def verify_non_abort_bound(q: int, mu: int, d: int, trials: int, rng, *, IS: Optional[Sequence] = None,
                  id_star=None, exact: bool = False, p: int = 2**61 - 1,
                  xi_range: str = "narrow", workers: Optional[int] = None) -> NonAbortReport:
    """Estimate ``eta(IS, id*)`` and compare with ``eta_low``.

    By default ``id*`` is a random binary-tail identity of depth ``d`` and
    ``IS`` holds up to ``q`` of its siblings.
    """
    if id_star is None:
        id_star = tuple((1,) + tuple(rng.randrange(2) for _ in range(mu - 1)) for _ in range(d))
    id_star = tuple(tuple(level) for level in id_star)
    if IS is None:
        IS = siblings(id_star, mu, q)
    IS = [tuple(tuple(level) for level in i) for i in IS]
    eta_low = eta_lower_bound(q, mu, d)
    if any(is_prefix(i, id_star) for i in IS):
        msg = "IS contains a prefix of id*: the challenge cannot be lossy while IS stays injective"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        return NonAbortReport(q, mu, d, IS, id_star, eta_low, trials, 0, Fraction(0), msg)
    hits = _count_events(trials, IS, id_star, d, mu, q, p, rng, xi_range, workers)
    ex = exact_eta(IS, id_star, d, mu, q, p=p, xi_range=xi_range) if exact else None
    return NonAbortReport(q, mu, d, IS, id_star, eta_low, trials, hits, ex)


verify_lemma2 = verify_non_abort_bound


# lossiness demo


@dataclass
class DemoRow:
    identity: tuple
    relation: str  # "target", "prefix" or "non-prefix"
    products: tuple
    verdict: str
    image_size: int
    lossiness: float


@dataclass
class LossyDemo:
    n: int
    p: int
    omega: float
    id_star: tuple
    rows: list = field(default_factory=list)


def demo_identities(id_star, p: int) -> list:
    """``id*``, its proper prefixes, and one non-prefix sibling per level."""
    id_star = tuple(tuple(level) for level in id_star)
    out = [(id_star, "target")]
    out += [(id_star[:k], "prefix") for k in range(1, len(id_star))]
    for k in range(1, len(id_star) + 1):
        level = id_star[k - 1]
        out.append((id_star[:k - 1] + ((1, (level[1] + 1) % p),), "non-prefix"))
    return out


def lossy_demo(pms: HfPublicParams, id_star, rng, identities: Optional[Sequence] = None) -> LossyDemo:
    """Build selective lossy keys for ``id_star`` and measure every listed identity's image."""
    id_star = pms.check_identity(id_star)
    y = aux_selective(id_star, pms.d, pms.mu, pms.p)
    mpk, _ = hibtdf.hf_mkg(pms, y, rng)
    demo = LossyDemo(pms.n, pms.p, pms.n - math.log2(pms.p), id_star)
    for identity, relation in identities or demo_identities(id_star, pms.p):
        identity = pms.check_identity(identity)
        rep = partition(y, identity, pms.p)
        size = len(hibtdf.image(pms, mpk, identity))
        demo.rows.append(DemoRow(identity, relation, rep.products, rep.verdict, size,
                                 pms.n - math.log2(size)))
    return demo
