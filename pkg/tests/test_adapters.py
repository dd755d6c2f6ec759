"""Interface contract shared by every scheme adapter at the desk profile."""

import json

import pytest

from hezoo import ALL_SCHEMES, CiphertextEnvelope, adapter_for, eval_dispatch
from hezoo.errors import SchemeMismatch, UnsupportedOp
from hezoo.profiles import scheme_params
from hezoo.rng import RngStream

# many encryptions under one rank-ideal key are expected here
pytestmark = pytest.mark.filterwarnings("ignore::hezoo.schemes.rankideal.ExposureWarning")

SUPPORTED = {
    "armknecht": {"add", "mult"},
    "cg-vector": {"add", "mult"},
    "cg-matrix": {"add", "mult"},
    "bogdanov-lee": {"add", "mult"},
    "rank-ideal": {"add", "mult", "ptmult"},
    "rank-ideal-additive": {"add", "ptmult"},
    "intpoly": {"add", "mult", "refresh"},
    "mvideal": {"add", "mult"},
    "bfv": {"add", "mult"},
    "ckks": {"add", "mult", "rescale"},
}


@pytest.fixture(scope="module", params=ALL_SCHEMES)
def setup(request):
    label = request.param
    ad = adapter_for(label)
    params = ad.params_from_dict(scheme_params(label, "desk"))
    key = ad.keygen(params, RngStream(f"adapter-{label}"))
    return label, ad, params, key


def test_ops_declared(setup):
    label, ad, _, _ = setup
    assert set(ad.ops) == SUPPORTED[label]


def test_params_dict_roundtrip(setup):
    _, ad, params, _ = setup
    d = ad.params_to_dict(params)
    assert ad.params_to_dict(ad.params_from_dict(json.loads(json.dumps(d)))) == d


def test_roundtrip_through_bytes(setup):
    label, ad, params, key = setup
    rng = RngStream(f"rt-{label}")
    for _ in range(3):
        m = ad.random_message(params, rng)
        env = CiphertextEnvelope.from_bytes(ad.encrypt(key, m, rng).to_bytes())
        assert ad.messages_equal(params, ad.decrypt(key, env), m)


def test_message_json_roundtrip(setup):
    label, ad, params, _ = setup
    m = ad.random_message(params, RngStream(f"json-{label}"))
    text = json.dumps(ad.message_to_json(params, m))
    assert ad.messages_equal(params, ad.message_from_json(params, json.loads(text)), m)


def test_key_file_regenerates(setup):
    label, ad, _, key = setup
    seed = RngStream(f"adapter-{label}").seed
    data = ad.save_key(key, seed)
    again = ad.load_key(data)
    assert ad.save_key(again, seed) == data


def test_unsupported_ops_raise(setup):
    label, ad, params, key = setup
    env = ad.encrypt(key, ad.random_message(params, RngStream(1)), RngStream(2))
    for op in {"add", "mult", "ptmult", "refresh", "rescale"} - SUPPORTED[label]:
        with pytest.raises(UnsupportedOp):
            eval_dispatch(op, [env, env], key)


def test_foreign_envelope_rejected(setup):
    label, ad, _, _ = setup
    other = "bfv" if label != "bfv" else "ckks"
    with pytest.raises(SchemeMismatch):
        ad.check_envelope(CiphertextEnvelope(other, b""))


def test_noise_report_shape(setup):
    label, ad, params, key = setup
    env = ad.encrypt(key, ad.random_message(params, RngStream(3)), RngStream(4))
    rep = ad.noise_report(key, env)
    assert rep.scheme.label == label
    if rep.within_bound is not None:
        assert rep.within_bound
