"""Command-line front end.

Exit status: 0 on success, 1 on a domain error (bad container, wrong key,
parameter violation), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import re
import sys
import time
from fractions import Fraction

from . import container, dethibe, hibe, hibtdf, lossylab
from .auxgen import aux_adaptive, aux_injective, aux_selective
from .errors import LossyHibeError
from .groups import BACKENDS, SECURE, TRANSPARENT, suite_new

BACKEND_ENV = "LOSSYHIBE_BACKEND"
_NUMERIC = re.compile(r"^-?\d+(,-?\d+)*$")


class UsageError(Exception):
    pass


# argument parsing helpers


def hash_segment(segment: str, pms) -> tuple[int, ...]:
    """Map a string path segment to ``(1, x_2, ..., x_mu)``.

    Each ``x_k`` comes from SHA-256 of the segment and ``k``; it is reduced
    mod ``p`` in selective mode and to one bit in adaptive mode.
    """
    out = [1]
    for k in range(2, pms.mu + 1):
        digest = hashlib.sha256(f"{k}:{segment}".encode()).digest()
        v = int.from_bytes(digest, "big")
        out.append(v & 1 if pms.mode == hibtdf.ADAPTIVE else v % pms.p)
    return tuple(out)


def parse_identity(text: str, pms) -> tuple:
    """``1,x1/1,x2`` style vectors; non-numeric segments are hashed."""
    levels = []
    for segment in text.split("/"):
        segment = segment.strip()
        if not segment:
            raise UsageError(f"empty identity segment in {text!r}")
        if _NUMERIC.match(segment):
            levels.append(tuple(int(c) for c in segment.split(",")))
        else:
            levels.append(hash_segment(segment, pms))
    return pms.check_identity(levels)


def parse_level(text: str, pms) -> tuple:
    if "/" in text:
        raise UsageError(f"--child takes a single level, got {text!r}")
    return parse_identity(text, pms)[0]


def parse_bits(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text or any(c not in "01" for c in text):
        raise UsageError(f"expected a bit string, got {text!r}")
    return tuple(int(c) for c in text)


def bitstr(bits) -> str:
    return "".join(str(b) for b in bits)


def _rng(args) -> random.Random:
    return random.Random(args.seed) if args.seed is not None else random.SystemRandom()


def _suite(args, p=None):
    backend = args.backend or os.environ.get(BACKEND_ENV, SECURE)
    if backend not in BACKENDS:
        raise UsageError(f"unknown backend {backend!r}")
    if backend == TRANSPARENT or p is not None:
        if not args.insecure_transparent:
            raise UsageError("the transparent backend needs --insecure-transparent")
        return suite_new(TRANSPARENT, p or args.p)
    return suite_new(SECURE)


def _load(args, path: str, kind: str):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise LossyHibeError(f"cannot read {path}: {exc.strerror}") from None
    _, header = container.peek(data)
    if header.get("backend") == TRANSPARENT and not args.insecure_transparent:
        raise UsageError(f"{path} uses the transparent backend; pass --insecure-transparent")
    return container.decode(data, expect=kind)


def _write(path: str, data: bytes):
    with open(path, "wb") as fh:
        fh.write(data)


def _json_default(o):
    if isinstance(o, Fraction):
        return f"{o.numerator}/{o.denominator}"
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _emit(record: dict):
    print(json.dumps(record, default=_json_default, sort_keys=True))


def _read_message(args) -> tuple[int, ...]:
    text = args.message if args.message is not None else sys.stdin.read()
    return parse_bits(text)


# commands


def cmd_setup(args):
    suite = _suite(args)
    pms = hibtdf.hf_setup(args.d, args.n, args.mu, args.mode, suite)
    _write(args.out, container.encode(pms))


def cmd_mkg(args):
    pms, _ = _load(args, args.pms, "pms")
    rng = _rng(args)
    if args.message_bits is not None:
        if args.aux != "injective":
            raise UsageError("--message-bits only works with --aux injective")
        mpk, msk = hibe.hibe_mkgen(pms, args.message_bits, rng, args.eps_bits)
    else:
        kind, _, arg = args.aux.partition(":")
        if kind == "injective" and not arg:
            y = aux_injective(pms.d, pms.mu)
        elif kind == "selective" and arg:
            y = aux_selective(parse_identity(arg, pms), pms.d, pms.mu, pms.p)
        elif kind == "adaptive" and arg:
            y = aux_adaptive(pms.d, pms.mu, int(arg), rng, pms.p)
        else:
            raise UsageError(f"bad --aux {args.aux!r}; use injective, selective:<id> or adaptive:<q>")
        mpk, msk = hibtdf.hf_mkg(pms, y, rng)
    _write(args.mpk_out, container.encode(mpk))
    _write(args.msk_out, container.encode(msk))


def cmd_kg(args):
    pms, msk = _load(args, args.msk, "msk")
    sk = hibtdf.hf_kg(pms, msk, parse_identity(args.id, pms), _rng(args))
    _write(args.out, container.encode(sk, pms))


def cmd_delegate(args):
    pms, mpk = _load(args, args.mpk, "mpk")
    _, sk = _load(args, args.sk, "sk")
    mpk = getattr(mpk, "hf", mpk)
    child = parse_level(args.child, pms)
    new = hibtdf.hf_del(pms, mpk, parse_identity(args.id, pms), sk, child, _rng(args))
    _write(args.out, container.encode(new, pms))


def cmd_eval(args):
    pms, mpk = _load(args, args.mpk, "mpk")
    out = hibtdf.hf_eval(pms, getattr(mpk, "hf", mpk), parse_identity(args.id, pms),
                         parse_bits(args.input))
    _write(args.out, container.encode(out, pms))


def cmd_invert(args):
    pms, mpk = _load(args, args.mpk, "mpk")
    _, sk = _load(args, args.sk, "sk")
    _, out = _load(args, args.ct, "hf-output")
    print(bitstr(hibtdf.hf_inv(pms, getattr(mpk, "hf", mpk), parse_identity(args.id, pms), sk, out)))


def _hibe_mpk(args):
    pms, mpk = _load(args, args.mpk, "mpk")
    if not isinstance(mpk, hibe.HibeMasterPublicKey):
        raise LossyHibeError("public key has no hash; create it with mkg --message-bits")
    return pms, mpk


def cmd_hibe_enc(args):
    pms, mpk = _hibe_mpk(args)
    ct = hibe.hibe_enc(pms, mpk, _read_message(args), parse_identity(args.id, pms), _rng(args))
    _write(args.out, container.encode(ct, pms))


def cmd_hibe_dec(args):
    pms, mpk = _hibe_mpk(args)
    _, sk = _load(args, args.sk, "sk")
    _, ct = _load(args, args.ct, "hibe-ct")
    print(bitstr(hibe.hibe_dec(pms, mpk, sk, ct, parse_identity(args.id, pms))))


def cmd_det_enc(args):
    pms, mpk = _load(args, args.mpk, "mpk")
    ct = dethibe.det_enc(pms, getattr(mpk, "hf", mpk), _read_message(args), parse_identity(args.id, pms))
    _write(args.out, container.encode(ct, pms))


def cmd_det_dec(args):
    pms, mpk = _load(args, args.mpk, "mpk")
    _, sk = _load(args, args.sk, "sk")
    _, ct = _load(args, args.ct, "det-ct")
    print(bitstr(dethibe.det_dec(pms, getattr(mpk, "hf", mpk), sk, ct, parse_identity(args.id, pms))))


def cmd_lossy_demo(args):
    suite = _suite(args, args.p if args.insecure_transparent else None)
    pms = hibtdf.hf_setup(args.d, args.n, args.mu, hibtdf.SELECTIVE, suite)
    id_star = parse_identity(args.id_star, pms)
    extra = [(parse_identity(t, pms), "extra") for t in args.check or ()]
    idents = lossylab.demo_identities(id_star, pms.p) + extra
    demo = lossylab.lossy_demo(pms, id_star, _rng(args), idents)
    print(f"# n={demo.n} p={demo.p} omega={demo.omega:.4f} id*={_fmt_id(id_star)}")
    print("# note: " + lossylab.NOTE)
    print("identity\trelation\tproducts\tverdict\timage_size\tlambda")
    for r in demo.rows:
        print(f"{_fmt_id(r.identity)}\t{r.relation}\t{','.join(map(str, r.products))}\t"
              f"{r.verdict}\t{r.image_size}\t{r.lossiness:.4f}")
    if args.plot_dir:
        from .plotting import plot_image_sizes
        print("# figure: " + plot_image_sizes(demo, args.plot_dir))


def _fmt_id(identity) -> str:
    return "/".join(",".join(map(str, level)) for level in identity)


def cmd_verify_bounds(args):
    rng = _rng(args)
    mu, d = args.mu, args.d
    reports = []
    for q in args.q:
        eta_low = lossylab.eta_lower_bound(q, mu, d)
        _emit({"check": "eta_lower_bound", "q": q, "mu": mu, "d": d, "value": eta_low})
        _emit({"check": "delta_bound", "mode": "adaptive", "q": q, "mu": mu, "d": d,
               "value": lossylab.delta_bound(q, mu, d)})
        rep = lossylab.verify_non_abort_bound(q, mu, d, args.trials, rng, exact=args.exact,
                                     xi_range=args.xi_range)
        reports.append(rep)
        _emit({"check": "non_abort", **rep.as_dict()})
    _emit({"check": "delta_bound", "mode": "selective", "value": lossylab.delta_bound(mode=hibtdf.SELECTIVE)})
    low = lossylab.eta_lower_bound(args.q[0], mu, d)
    for forced in (2 * low, low):
        est = lossylab.AbortEstimate(float(forced), 0, low)
        ones = sum(lossylab.preoutput_stage(est, rng) for _ in range(args.draws))
        _emit({"check": "preoutput", "forced_eta": forced, "eta_low": low, "draws": args.draws,
               "ones": ones, "expected": min(Fraction(1), low / forced)})
    if args.plot_dir:
        from .plotting import plot_non_abort
        _emit({"check": "figure", "path": plot_non_abort(reports, args.plot_dir)})


def cmd_bench(args):
    suite = _suite(args)
    rng = _rng(args)
    pms = hibtdf.hf_setup(args.d, args.n, args.mu, hibtdf.SELECTIVE, suite)
    identity = tuple((1, rng.randrange(1, pms.p)) + (0,) * (pms.mu - 2) for _ in range(args.d))
    rows = []

    def timed(name, fn, reps):
        t = time.perf_counter()
        for _ in range(reps):
            res = fn()
        rows.append((name, (time.perf_counter() - t) / reps))
        return res

    mpk, msk = timed("mkg", lambda: hibtdf.hf_mkg(pms, aux_injective(pms.d, pms.mu), rng), 1)
    sk = timed("kg", lambda: hibtdf.hf_kg(pms, msk, identity, rng), args.reps)
    X = tuple(rng.randrange(2) for _ in range(pms.n))
    out = timed("eval", lambda: hibtdf.hf_eval(pms, mpk, identity, X), args.reps)
    got = timed("inv", lambda: hibtdf.hf_inv(pms, mpk, identity, sk, out), args.reps)
    if got != X:
        raise LossyHibeError("benchmark roundtrip failed")
    if args.d > 1:
        parent = hibtdf.hf_kg(pms, msk, identity[:-1], rng)
        timed("del", lambda: hibtdf.hf_del(pms, mpk, identity[:-1], parent, identity[-1], rng), args.reps)
    print(f"# backend={suite.backend} n={pms.n} d={pms.d} mu={pms.mu} reps={args.reps}")
    print("op,seconds")
    for name, sec in rows:
        print(f"{name},{sec:.6f}")
    if args.plot_dir:
        from .plotting import plot_timings
        print("# figure: " + plot_timings(rows, args.plot_dir))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="seed every random choice (reproducible runs)")
    common.add_argument("--insecure-transparent", action="store_true",
                        help="allow the transparent (dlog-in-the-clear) test backend")
    common.add_argument("--backend", choices=BACKENDS,
                        help=f"group backend (default: ${BACKEND_ENV} or secure)")
    common.add_argument("--p", type=int, default=11, help="transparent group order (default 11)")

    parser = argparse.ArgumentParser(prog="lossyhibe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(func=fn)
        return sp

    sp = add("setup", cmd_setup, "write public parameters")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--n", type=int, default=16)
    sp.add_argument("--mu", type=int, default=2)
    sp.add_argument("--mode", choices=hibtdf.MODES, default=hibtdf.SELECTIVE)
    sp.add_argument("-o", "--out", required=True)

    sp = add("mkg", cmd_mkg, "master key generation")
    sp.add_argument("--pms", required=True)
    sp.add_argument("--aux", default="injective", help="injective | selective:<id> | adaptive:<q>")
    sp.add_argument("--message-bits", type=int, help="also sample a hash for l-bit HIBE messages")
    sp.add_argument("--eps-bits", type=float, default=hibe.DEFAULT_EPS_BITS,
                    help="leftover-hash slack lg(1/eps) (default 40)")
    sp.add_argument("--mpk-out", required=True)
    sp.add_argument("--msk-out", required=True)

    sp = add("kg", cmd_kg, "derive a secret key from the master secret key")
    sp.add_argument("--msk", required=True)
    sp.add_argument("--id", required=True)
    sp.add_argument("-o", "--out", required=True)

    sp = add("delegate", cmd_delegate, "derive a child key from a parent key")
    for name in ("--mpk", "--sk", "--id", "--child"):
        sp.add_argument(name, required=True)
    sp.add_argument("-o", "--out", required=True)

    sp = add("eval", cmd_eval, "evaluate the trapdoor function")
    for name in ("--mpk", "--id", "--input"):
        sp.add_argument(name, required=True)
    sp.add_argument("-o", "--out", required=True)

    sp = add("invert", cmd_invert, "invert an evaluation with a secret key")
    for name in ("--mpk", "--sk", "--id", "--ct"):
        sp.add_argument(name, required=True)

    for name, fn, what in (("hibe-enc", cmd_hibe_enc, "randomized"), ("det-enc", cmd_det_enc, "deterministic")):
        sp = add(name, fn, f"{what} encryption (message bits from --message or stdin)")
        sp.add_argument("--mpk", required=True)
        sp.add_argument("--id", required=True)
        sp.add_argument("--message")
        sp.add_argument("-o", "--out", required=True)
    for name, fn in (("hibe-dec", cmd_hibe_dec), ("det-dec", cmd_det_dec)):
        sp = add(name, fn, "decrypt to stdout")
        for opt in ("--mpk", "--sk", "--id", "--ct"):
            sp.add_argument(opt, required=True)

    sp = add("lossy-demo", cmd_lossy_demo, "measure image sizes under a selective lossy key")
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--mu", type=int, default=2)
    sp.add_argument("--id-star", required=True)
    sp.add_argument("--check", action="append", help="additional identity to measure")
    sp.add_argument("--plot-dir")

    sp = add("verify-bounds", cmd_verify_bounds, "check non-abort bounds; JSON lines")
    sp.add_argument("--q", type=int, nargs="+", default=[1, 2])
    sp.add_argument("--mu", type=int, default=2)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--trials", type=int, default=100000)
    sp.add_argument("--draws", type=int, default=10000)
    sp.add_argument("--exact", action="store_true", help="also enumerate the sampler exactly")
    sp.add_argument("--xi-range", choices=("narrow", "wide"), default="narrow")
    sp.add_argument("--plot-dir")

    sp = add("bench", cmd_bench, "time key generation, evaluation and inversion")
    sp.add_argument("--n", type=int, default=16)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--mu", type=int, default=2)
    sp.add_argument("--reps", type=int, default=3)
    sp.add_argument("--plot-dir")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"lossyhibe: error: {exc}", file=sys.stderr)
        return 2
    except (LossyHibeError, ValueError) as exc:
        print(f"lossyhibe: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
