"""Binary container for parameters, keys and ciphertexts.

Layout (all integers big-endian)::

    b"LHIB" | version u8 | backend u8 | kind u8 | u32 header length | JSON header
            | u32 element count | { group u8 | u16 length | encoding } ...

The JSON header always carries the public parameters (backend, p, d, n, mu,
mode) plus kind-specific fields.  Elements follow a fixed canonical order,
so ``decode(encode(x))`` re-encodes to the same bytes.
"""

from __future__ import annotations

import json
import struct
from typing import Any

from . import hpe
from .dethibe import DetCiphertext
from .errors import LossyHibeError
from .groups import G1, G2, GT, SECURE, TRANSPARENT, suite_new
from .hibe import HibeCiphertext, HibeMasterPublicKey, PairwiseHash
from .hibtdf import (HfMasterPublicKey, HfMasterSecretKey, HfOutput, HfPublicParams,
                     HfSecretKey, hf_setup)

MAGIC = b"LHIB"
VERSION = 1
BACKEND_TAGS = {SECURE: 0, TRANSPARENT: 1}
KINDS = ("pms", "mpk", "msk", "sk", "hf-output", "hibe-ct", "det-ct")
KIND_TAGS = {k: i + 1 for i, k in enumerate(KINDS)}
GROUP_TAGS = {G1: 1, G2: 2, GT: 3}


class ContainerError(LossyHibeError, ValueError):
    pass


class KindMismatch(ContainerError):
    pass


# element orderings


def _mpk_keys(pms):
    d, n, mu = pms.d, pms.n, pms.mu
    h = [(i1, i2, l1) for i1 in range(1, d + 1) for i2 in range(mu + 1) for l1 in range(1, n + 1)]
    cw = [(l2, l1) for l2 in range(1, n + 1) for l1 in range(1, n + 1)]
    c = [(i1, i2, l2, l1) for i1 in range(1, d + 1) for i2 in range(1, mu + 1)
         for l2 in range(1, n + 1) for l1 in range(1, n + 1)]
    return h, cw, c


def _sk_layout(d, mu, ell):
    js = range(ell + 1, d + 1)
    K = [(j, k) for j in js for k in range(1, mu + 1)]
    L = list(js)
    L_levels = [(j, k, i1) for j in js for k in range(1, mu + 1) for i1 in range(1, ell + 1)]
    return K, L, L_levels, K


def _pms_header(pms: HfPublicParams) -> dict:
    return {"backend": pms.suite.backend, "p": str(pms.p), "d": pms.d, "n": pms.n,
            "mu": pms.mu, "mode": pms.mode}


def _pms_from_header(h: dict) -> HfPublicParams:
    backend = h["backend"]
    suite = suite_new(SECURE) if backend == SECURE else suite_new(TRANSPARENT, int(h["p"]))
    if suite.p != int(h["p"]):
        raise ContainerError("group order in header does not match the backend")
    return hf_setup(h["d"], h["n"], h["mu"], h["mode"], suite)


def _bitstr(bits) -> str:
    return "".join(str(b) for b in bits)


def _unbits(s: str) -> tuple:
    if any(c not in "01" for c in s):
        raise ContainerError("malformed bit string in header")
    return tuple(int(c) for c in s)


def _output_elements(out: HfOutput) -> list:
    return [out.c_v, *out.c_w, *(e for row in out.ct for e in row)]


def _output_from(pms, elems, level) -> HfOutput:
    n = pms.n
    if len(elems) != 1 + n + n * level:
        raise ContainerError("element count does not match the output shape")
    ct = tuple(tuple(elems[1 + n + i * n: 1 + n + (i + 1) * n]) for i in range(level))
    return HfOutput(elems[0], tuple(elems[1:1 + n]), ct)


# encode


def _parts(obj, pms=None) -> tuple[str, HfPublicParams, dict, list]:
    if isinstance(obj, HfPublicParams):
        return "pms", obj, {}, []
    if isinstance(obj, HibeMasterPublicKey):
        kind, pms, header, elems = _parts(obj.hf)
        header["hash"] = {"A": [_bitstr(r) for r in obj.hash.A], "b": _bitstr(obj.hash.b)}
        return kind, pms, header, elems
    if isinstance(obj, HfMasterPublicKey):
        pms = obj.pms
        hk, cwk, ck = _mpk_keys(pms)
        elems = [obj.v, *obj.w, *(obj.h[k] for k in hk), *obj.J,
                 *(obj.C_w[k] for k in cwk), *(obj.C[k] for k in ck)]
        return "mpk", pms, {}, elems
    if isinstance(obj, HfMasterSecretKey):
        pms = obj.pms
        hk, _, _ = _mpk_keys(pms)
        header = {}
        if obj.row_exponents is not None:
            header["row_exponents"] = [str(s) for s in obj.row_exponents]
        return "msk", pms, header, [obj.v_hat, *obj.w_hat, *(obj.h_hat[k] for k in hk)]
    if isinstance(obj, HfSecretKey):
        if pms is None:
            raise ContainerError("secret keys need the public parameters to be encoded")
        K, L, Ll, Lw = _sk_layout(pms.d, pms.mu, obj.level)
        elems = []
        for c in obj.coords:
            elems += [c.D, c.D_w, *c.D_levels, *(c.K[k] for k in K), *(c.L[j] for j in L),
                      *(c.L_levels[k] for k in Ll), *(c.L_w[k] for k in Lw)]
        return "sk", pms, {"identity": [list(l) for l in obj.identity]}, elems
    if isinstance(obj, HibeCiphertext):
        return "hibe-ct", pms, {"level": obj.c1.level, "l": len(obj.c2), "c2": _bitstr(obj.c2)}, \
            _output_elements(obj.c1)
    if isinstance(obj, DetCiphertext):
        return "det-ct", pms, {"level": obj.C.level}, _output_elements(obj.C)
    if isinstance(obj, HfOutput):
        return "hf-output", pms, {"level": obj.level}, _output_elements(obj)
    raise ContainerError(f"cannot encode objects of type {type(obj).__name__}")


def encode(obj, pms: HfPublicParams | None = None) -> bytes:
    """Serialize ``obj``; ciphertexts and secret keys need ``pms`` alongside."""
    kind, pms, extra, elems = _parts(obj, pms)
    if pms is None:
        raise ContainerError(f"{kind} objects need the public parameters to be encoded")
    header = _pms_header(pms)
    header.update(extra)
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    out = [MAGIC, bytes([VERSION, BACKEND_TAGS[pms.suite.backend], KIND_TAGS[kind]]),
           struct.pack(">I", len(hbytes)), hbytes, struct.pack(">I", len(elems))]
    for e in elems:
        data = e.to_bytes()
        out.append(struct.pack(">BH", GROUP_TAGS[e.group], len(data)))
        out.append(data)
    return b"".join(out)


# decode


def peek(data: bytes) -> tuple[str, dict]:
    """``(kind, header)`` without decoding any group element."""
    kind, header, _ = _split(data)
    return kind, header


def _split(data: bytes):
    if len(data) < 11 or data[:4] != MAGIC:
        raise ContainerError("not a lossyhibe container")
    version, btag, ktag = data[4], data[5], data[6]
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")
    kinds = {v: k for k, v in KIND_TAGS.items()}
    if ktag not in kinds:
        raise ContainerError(f"unknown object kind tag {ktag}")
    (hlen,) = struct.unpack(">I", data[7:11])
    try:
        header = json.loads(data[11:11 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"unreadable header: {exc}") from None
    if BACKEND_TAGS.get(header.get("backend")) != btag:
        raise ContainerError("backend tag disagrees with the header")
    return kinds[ktag], header, data[11 + hlen:]


def _elements(suite, body: bytes) -> list:
    if len(body) < 4:
        raise ContainerError("truncated element list")
    (count,) = struct.unpack(">I", body[:4])
    groups = {v: k for k, v in GROUP_TAGS.items()}
    pos, out = 4, []
    for _ in range(count):
        if pos + 3 > len(body):
            raise ContainerError("truncated element header")
        gtag, length = struct.unpack(">BH", body[pos:pos + 3])
        pos += 3
        if gtag not in groups or pos + length > len(body):
            raise ContainerError("bad element record")
        out.append(suite.decode(groups[gtag], body[pos:pos + length]))
        pos += length
    if pos != len(body):
        raise ContainerError("trailing bytes after the element list")
    return out


def _take(elems, count, group):
    chunk = elems[:count]
    if len(chunk) != count or any(e.group != group for e in chunk):
        raise ContainerError("element list does not match the declared shape")
    del elems[:count]
    return chunk


def decode(data: bytes, expect: str | None = None) -> tuple[HfPublicParams, Any]:
    """Return ``(pms, obj)``; ``expect`` rejects any other object kind."""
    kind, header, body = _split(bytes(data))
    if expect is not None and kind != expect:
        raise KindMismatch(f"expected a {expect} container, found {kind}")
    try:
        pms = _pms_from_header(header)
    except (KeyError, TypeError) as exc:
        raise ContainerError(f"incomplete header: {exc}") from None
    elems = _elements(pms.suite, body)
    d, n, mu = pms.d, pms.n, pms.mu
    if kind == "pms":
        obj = pms
    elif kind == "mpk":
        hk, cwk, ck = _mpk_keys(pms)
        v = _take(elems, 1, G1)[0]
        w = tuple(_take(elems, n, G1))
        h = dict(zip(hk, _take(elems, len(hk), G1)))
        J = tuple(_take(elems, n, G1))
        C_w = dict(zip(cwk, _take(elems, len(cwk), G1)))
        C = dict(zip(ck, _take(elems, len(ck), G1)))
        obj = HfMasterPublicKey(pms, v, w, h, J, C_w, C)
        if "hash" in header:
            A = tuple(_unbits(r) for r in header["hash"]["A"])
            b = _unbits(header["hash"]["b"])
            if len(A) != len(b) or any(len(r) != n for r in A):
                raise ContainerError("hash matrix shape does not match n and l")
            obj = HibeMasterPublicKey(obj, PairwiseHash(A, b))
    elif kind == "msk":
        hk, _, _ = _mpk_keys(pms)
        v_hat = _take(elems, 1, G2)[0]
        w_hat = tuple(_take(elems, n, G2))
        h_hat = dict(zip(hk, _take(elems, len(hk), G2)))
        rows = header.get("row_exponents")
        obj = HfMasterSecretKey(pms, v_hat, w_hat, h_hat,
                                tuple(int(s) for s in rows) if rows is not None else None)
    elif kind == "sk":
        identity = pms.check_identity(header["identity"])
        ell = len(identity)
        K, L, Ll, Lw = _sk_layout(d, mu, ell)
        coords = []
        for _ in range(n):
            D, D_w = _take(elems, 2, G2)
            D_levels = tuple(_take(elems, ell, G2))
            Kd = dict(zip(K, _take(elems, len(K), G2)))
            Ld = dict(zip(L, _take(elems, len(L), G2)))
            Lld = dict(zip(Ll, _take(elems, len(Ll), G2)))
            Lwd = dict(zip(Lw, _take(elems, len(Lw), G2)))
            coords.append(hpe.HpeSecretKey(identity, d, mu, D, D_w, D_levels, Kd, Ld, Lld, Lwd))
        obj = HfSecretKey(identity, tuple(coords))
    else:
        level = header.get("level")
        if not isinstance(level, int) or not 1 <= level <= d:
            raise ContainerError("bad output level in header")
        out = _output_from(pms, _take(elems, len(elems), G1), level)
        if kind == "hf-output":
            obj = out
        elif kind == "det-ct":
            obj = DetCiphertext(out)
        else:
            c2 = _unbits(header["c2"])
            if len(c2) != header.get("l"):
                raise ContainerError("mask length disagrees with the header")
            obj = HibeCiphertext(out, c2)
    if elems:
        raise ContainerError("unexpected extra elements")
    return pms, obj
