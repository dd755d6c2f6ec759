"""Scheme-agnostic envelopes, key containers, and evaluation dispatch."""

from __future__ import annotations

import enum
import hashlib
import json
import struct
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    Corrupt,
    EncryptionBudgetExceeded,
    HEError,
    SchemeMismatch,
    UnsupportedOp,
    VersionMismatch,
)
from .rng import RngStream

FORMAT_VERSION = 1


class SchemeId(enum.IntEnum):
    ARMKNECHT = 1
    CG_VECTOR = 2
    CG_MATRIX = 3
    BOGDANOV_LEE = 4
    RANK_IDEAL = 5
    RANK_IDEAL_ADDITIVE = 6
    INTPOLY = 7
    MVIDEAL = 8
    BFV = 9
    CKKS = 10

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")

    @classmethod
    def parse(cls, value) -> "SchemeId":
        if isinstance(value, SchemeId):
            return value
        if isinstance(value, int):
            return cls(value)
        try:
            return cls[str(value).upper().replace("-", "_")]
        except KeyError:
            raise ValueError(f"unknown scheme {value!r}") from None


ALL_SCHEMES = tuple(s.label for s in SchemeId)


# ---------------------------------------------------------------------------
# ciphertext envelope
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<BBHHBI")


@dataclass(frozen=True)
class CiphertextEnvelope:
    scheme: SchemeId
    payload: bytes
    gamma: int = 0
    level: int = 0
    arity: int = 2

    def __post_init__(self):
        object.__setattr__(self, "scheme", SchemeId.parse(self.scheme))
        if not 0 <= self.gamma < 1 << 16 or not 0 <= self.level < 1 << 16:
            raise ValueError("gamma and level must fit in 16 bits")
        if self.arity not in (1, 2, 3):
            raise ValueError("arity must be 1, 2 or 3")

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(
            FORMAT_VERSION, int(self.scheme), self.gamma, self.level, self.arity, len(self.payload)
        )
        return head + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "CiphertextEnvelope":
        if len(data) < _HEADER.size:
            raise Corrupt("envelope shorter than its header")
        version, scheme, gamma, level, arity, plen = _HEADER.unpack_from(data)
        if version != FORMAT_VERSION:
            raise VersionMismatch(f"envelope version {version}, expected {FORMAT_VERSION}")
        if len(data) != _HEADER.size + plen:
            raise Corrupt("payload length does not match header")
        try:
            sid = SchemeId(scheme)
        except ValueError:
            raise Corrupt(f"unknown scheme tag {scheme}") from None
        if arity not in (1, 2, 3):
            raise Corrupt(f"bad arity {arity}")
        return cls(sid, bytes(data[_HEADER.size :]), gamma, level, arity)

    def digest(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()


def serialize(obj) -> bytes:
    if isinstance(obj, CiphertextEnvelope):
        return obj.to_bytes()
    if hasattr(obj, "to_key_bytes"):
        return obj.to_key_bytes()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def deserialize_envelope(data: bytes) -> CiphertextEnvelope:
    return CiphertextEnvelope.from_bytes(data)


# ---------------------------------------------------------------------------
# noise reports and budgets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseReport:
    """Observed noise against the bound under which decryption is guaranteed."""

    scheme: SchemeId
    observed: float | None
    bound: float | None
    detail: dict = field(default_factory=dict)

    @property
    def within_bound(self) -> bool | None:
        if self.observed is None or self.bound is None:
            return None
        return self.observed < self.bound

    @property
    def remaining_bits(self) -> float | None:
        if self.observed is None or self.bound is None:
            return None
        import math

        if self.observed <= 0:
            return math.log2(self.bound) if self.bound > 0 else 0.0
        return math.log2(self.bound) - math.log2(self.observed)


class Budget:
    """Mutable counter for a per-key usage limit (encryptions or published ciphertexts)."""

    def __init__(self, limit: int, name: str = "encryptions", hard: bool = True):
        self.limit = limit
        self.name = name
        self.hard = hard
        self.used = 0

    def consume(self, enforce: bool = True) -> None:
        if self.used + 1 > self.limit:
            if self.hard and enforce:
                raise EncryptionBudgetExceeded(f"{self.name} limit {self.limit} reached")
            if not self.hard:
                warnings.warn(f"{self.name}: {self.used + 1} reaches the advised limit {self.limit}", stacklevel=3)
        self.used += 1

    @property
    def remaining(self) -> int:
        return max(0, self.limit - self.used)


# ---------------------------------------------------------------------------
# key files
# ---------------------------------------------------------------------------

_KEY_MAGIC = b"HEZK"


@dataclass(frozen=True)
class KeyFile:
    """Parsed key file: JSON header plus named binary sections."""

    scheme: SchemeId
    params: dict
    seed: bytes
    sections: dict[str, bytes]

    def to_bytes(self) -> bytes:
        header = {
            "version": FORMAT_VERSION,
            "scheme": self.scheme.label,
            "params": self.params,
            "seed": self.seed.hex(),
            "sections": [[name, len(blob)] for name, blob in self.sections.items()],
        }
        hjson = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
        out = [_KEY_MAGIC, bytes([FORMAT_VERSION]), struct.pack("<I", len(hjson)), hjson]
        out.extend(self.sections.values())
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "KeyFile":
        if len(data) < 9 or data[:4] != _KEY_MAGIC:
            raise Corrupt("not a key file")
        if data[4] != FORMAT_VERSION:
            raise VersionMismatch(f"key file version {data[4]}, expected {FORMAT_VERSION}")
        (hlen,) = struct.unpack_from("<I", data, 5)
        if len(data) < 9 + hlen:
            raise Corrupt("truncated key header")
        try:
            header = json.loads(data[9 : 9 + hlen])
            scheme = SchemeId.parse(header["scheme"])
            seed = bytes.fromhex(header["seed"])
            layout = header["sections"]
        except (ValueError, KeyError, TypeError) as exc:
            raise Corrupt(f"malformed key header: {exc}") from None
        pos = 9 + hlen
        sections = {}
        for name, size in layout:
            if pos + size > len(data):
                raise Corrupt("truncated key section")
            sections[name] = bytes(data[pos : pos + size])
            pos += size
        if pos != len(data):
            raise Corrupt("trailing bytes after key sections")
        return cls(scheme, header["params"], seed, sections)


# ---------------------------------------------------------------------------
# scheme adapters and dispatch
# ---------------------------------------------------------------------------


def to_jsonable(value):
    """Plain Python lists and scalars from numpy containers."""
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


class SchemeAdapter:
    """Uniform interface every scheme module registers.

    Subclasses implement the native operations; this base class maps them to
    envelopes and key files.
    """

    scheme_id: SchemeId
    ops: frozenset = frozenset()

    # native layer -------------------------------------------------------
    def params_from_dict(self, d: dict) -> Any:
        raise NotImplementedError

    def params_to_dict(self, params) -> dict:
        raise NotImplementedError

    def keygen(self, params, rng: RngStream):
        raise NotImplementedError

    def key_sections(self, key) -> dict[str, bytes]:
        raise NotImplementedError

    def key_params(self, key):
        return key.params

    def encrypt(self, key, message, rng: RngStream) -> CiphertextEnvelope:
        raise NotImplementedError

    def decrypt(self, key, env: CiphertextEnvelope):
        raise NotImplementedError

    def evaluate(self, op: str, envs: list[CiphertextEnvelope], key, extra=None) -> CiphertextEnvelope:
        raise UnsupportedOp(f"{self.scheme_id.label} does not support {op}")

    def noise_report(self, key, env: CiphertextEnvelope) -> NoiseReport:
        return NoiseReport(self.scheme_id, None, None)

    # message I/O for the CLI (JSON-compatible values) ---------------------
    def message_from_json(self, params, value):
        return value

    def message_to_json(self, params, message):
        return to_jsonable(message)

    def random_message(self, params, rng: RngStream):
        raise NotImplementedError

    def messages_equal(self, params, a, b) -> bool:
        return a == b

    # key files ----------------------------------------------------------
    def save_key(self, key, seed: bytes) -> bytes:
        params = self.params_to_dict(self.key_params(key))
        return KeyFile(self.scheme_id, params, seed, self.key_sections(key)).to_bytes()

    def load_key(self, data: bytes):
        kf = KeyFile.from_bytes(data)
        if kf.scheme != self.scheme_id:
            raise SchemeMismatch(f"key belongs to {kf.scheme.label}, not {self.scheme_id.label}")
        params = self.params_from_dict(kf.params)
        key = self.keygen(params, RngStream(kf.seed))
        if self.key_sections(key) != kf.sections:
            raise Corrupt("key sections do not match the regenerated key")
        return key

    def check_envelope(self, env: CiphertextEnvelope) -> None:
        if env.scheme != self.scheme_id:
            raise SchemeMismatch(f"ciphertext belongs to {env.scheme.label}, not {self.scheme_id.label}")


_REGISTRY: dict[SchemeId, SchemeAdapter] = {}


def register(adapter: SchemeAdapter) -> SchemeAdapter:
    _REGISTRY[adapter.scheme_id] = adapter
    return adapter


def adapter_for(scheme) -> SchemeAdapter:
    from . import schemes  # noqa: F401  (populates the registry)

    sid = SchemeId.parse(scheme)
    return _REGISTRY[sid]


def eval_dispatch(op: str, cts: list[CiphertextEnvelope], key, extra=None) -> CiphertextEnvelope:
    """Apply ``op`` (add, mult, ptmult, refresh, rescale) to envelopes of one scheme."""
    if op not in ("add", "mult", "ptmult", "refresh", "rescale"):
        raise UnsupportedOp(f"unknown operation {op!r}")
    if not cts:
        raise HEError("no ciphertexts given")
    sid = cts[0].scheme
    if any(c.scheme != sid for c in cts):
        raise SchemeMismatch("ciphertexts belong to different schemes")
    adapter = adapter_for(sid)
    if op not in adapter.ops:
        raise UnsupportedOp(f"{sid.label} does not support {op}")
    return adapter.evaluate(op, list(cts), key, extra)
