import json

import pytest

from hezoo import ALL_SCHEMES, adapter_for
from hezoo.errors import ParameterError
from hezoo.profiles import load_profile, profile_name, scheme_params


@pytest.mark.parametrize("name", ["desk", "paper"])
def test_builtin_profiles_cover_every_scheme(name):
    data = load_profile(name)
    assert set(ALL_SCHEMES) <= set(data)
    for label in ALL_SCHEMES:
        ad = adapter_for(label)
        ad.params_from_dict(scheme_params(label, name))


def test_env_selects_profile(monkeypatch, tmp_path):
    monkeypatch.delenv("HEZOO_PROFILE", raising=False)
    assert profile_name() == "desk"
    monkeypatch.setenv("HEZOO_PROFILE", "paper")
    assert scheme_params("bfv")["n"] == 256
    custom = tmp_path / "p.json"
    custom.write_text(json.dumps({"bfv": {"n": 8, "q": 65537, "p": 16}}))
    monkeypatch.setenv("HEZOO_PROFILE", str(custom))
    assert scheme_params("bfv") == {"n": 8, "q": 65537, "p": 16}
    with pytest.raises(ParameterError):
        scheme_params("ckks")


def test_bad_profiles(tmp_path):
    with pytest.raises(ParameterError):
        load_profile(str(tmp_path / "missing.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ParameterError):
        load_profile(str(bad))
    bad.write_text("[1, 2]")
    with pytest.raises(ParameterError):
        load_profile(str(bad))
