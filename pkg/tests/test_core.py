import struct

import pytest
from hypothesis import given, settings, strategies as st

from hezoo import ALL_SCHEMES, CiphertextEnvelope, SchemeId, adapter_for, deserialize_envelope, eval_dispatch, serialize
from hezoo.core import KeyFile
from hezoo.errors import Corrupt, SchemeMismatch, UnsupportedOp, VersionMismatch
from hezoo.rng import RngStream


def test_scheme_labels():
    assert len(ALL_SCHEMES) == 10
    for label in ALL_SCHEMES:
        assert SchemeId.parse(label).label == label
    with pytest.raises(ValueError):
        SchemeId.parse("rsa")


@settings(max_examples=100)
@given(
    st.sampled_from(list(SchemeId)),
    st.binary(max_size=300),
    st.integers(0, 65535),
    st.integers(0, 65535),
    st.sampled_from([1, 2, 3]),
)
def test_envelope_roundtrip(sid, payload, gamma, level, arity):
    env = CiphertextEnvelope(sid, payload, gamma, level, arity)
    data = serialize(env)
    assert deserialize_envelope(data) == env
    assert len(data) == struct.calcsize("<BBHHBI") + len(payload)


def test_envelope_header_layout():
    env = CiphertextEnvelope(SchemeId.BFV, b"\x01\x02", gamma=3, level=4, arity=2)
    assert env.to_bytes() == struct.pack("<BBHHBI", 1, 9, 3, 4, 2, 2) + b"\x01\x02"


def test_envelope_rejects_malformed():
    good = CiphertextEnvelope(SchemeId.CKKS, b"abc").to_bytes()
    with pytest.raises(Corrupt):
        CiphertextEnvelope.from_bytes(good[:5])
    with pytest.raises(Corrupt):
        CiphertextEnvelope.from_bytes(good[:-1])
    with pytest.raises(VersionMismatch):
        CiphertextEnvelope.from_bytes(b"\x02" + good[1:])
    with pytest.raises(Corrupt):
        CiphertextEnvelope.from_bytes(good[:1] + b"\x63" + good[2:])


def _key_bytes(label="bfv", seed=1):
    ad = adapter_for(label)
    from hezoo.profiles import scheme_params

    key = ad.keygen(ad.params_from_dict(scheme_params(label, "desk")), RngStream(seed))
    return ad.save_key(key, normalize(seed))


def normalize(seed):
    return RngStream(seed).seed


def test_key_file_roundtrip_and_tamper_detection():
    data = _key_bytes()
    kf = KeyFile.from_bytes(data)
    assert kf.to_bytes() == data
    ad = adapter_for("bfv")
    ad.load_key(data)
    tampered = bytearray(data)
    tampered[-1] ^= 1
    with pytest.raises(Corrupt):
        ad.load_key(bytes(tampered))
    with pytest.raises(Corrupt):
        KeyFile.from_bytes(data[:-1])
    with pytest.raises(Corrupt):
        KeyFile.from_bytes(b"XXXX" + data[4:])
    with pytest.raises(VersionMismatch):
        KeyFile.from_bytes(data[:4] + b"\x09" + data[5:])
    with pytest.raises(SchemeMismatch):
        adapter_for("ckks").load_key(data)


def test_eval_dispatch_validation():
    env = CiphertextEnvelope(SchemeId.ARMKNECHT, b"")
    with pytest.raises(UnsupportedOp):
        eval_dispatch("xor", [env], None)
    with pytest.raises(SchemeMismatch):
        eval_dispatch("add", [env, CiphertextEnvelope(SchemeId.BFV, b"")], None)
    with pytest.raises(UnsupportedOp):
        eval_dispatch("rescale", [env], None)
