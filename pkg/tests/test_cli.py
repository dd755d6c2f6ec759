import json
import subprocess
import sys

import pytest

from hezoo import ALL_SCHEMES, adapter_for
from hezoo.cli import main
from hezoo.profiles import scheme_params
from hezoo.rng import RngStream

pytestmark = pytest.mark.filterwarnings("ignore::hezoo.schemes.rankideal.ExposureWarning")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def keyfile(tmp_path, capsys, scheme, seed="7"):
    path = tmp_path / f"{scheme}.key"
    code, _, err = run(capsys, "keygen", "--scheme", scheme, "--seed", seed, "--out", str(path))
    assert code == 0, err
    return path


def test_keygen_deterministic_across_processes(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"k{i}"
        subprocess.run(
            [sys.executable, "-m", "hezoo.cli", "keygen", "--scheme", "armknecht", "--seed", "0x2a", "--out", str(path)],
            check=True,
            capture_output=True,
        )
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("scheme", ALL_SCHEMES)
def test_encrypt_decrypt_identity(tmp_path, capsys, scheme):
    key = keyfile(tmp_path, capsys, scheme)
    ad = adapter_for(scheme)
    params = ad.params_from_dict(scheme_params(scheme, "desk"))
    m = ad.random_message(params, RngStream(f"cli-{scheme}"))
    msg = json.dumps(ad.message_to_json(params, m))
    ct = tmp_path / "ct"
    code, _, err = run(capsys, "encrypt", "--key", str(key), "--message", msg, "--seed", "1", "--out", str(ct))
    assert code == 0, err
    code, out, err = run(capsys, "decrypt", "--key", str(key), str(ct))
    assert code == 0, err
    assert ad.messages_equal(params, ad.message_from_json(params, json.loads(out)), m)


def test_challagunta_alias(tmp_path, capsys):
    path = tmp_path / "cg.key"
    assert run(capsys, "keygen", "--scheme", "cg", "--variant", "matrix", "--seed", "1", "--out", str(path))[0] == 0
    data = path.read_bytes()
    path2 = tmp_path / "cgm.key"
    run(capsys, "keygen", "--scheme", "cg-matrix", "--seed", "1", "--out", str(path2))
    assert path2.read_bytes() == data


def test_eval_and_budget(tmp_path, capsys):
    key = keyfile(tmp_path, capsys, "armknecht")
    cts = []
    for i, m in enumerate((5, 9, 2)):
        p = tmp_path / f"c{i}"
        run(capsys, "encrypt", "--key", str(key), "--message", str(m), "--seed", str(i), "--out", str(p))
        cts.append(p)
    prod = tmp_path / "prod"
    code, _, err = run(capsys, "eval", "mult", str(cts[0]), str(cts[1]), "--key", str(key), "--out", str(prod))
    assert code == 0, err
    assert json.loads(run(capsys, "decrypt", "--key", str(key), str(prod))[1]) == 45
    code, _, err = run(capsys, "eval", "mult", str(prod), str(cts[2]), "--key", str(key))
    assert code == 1
    assert json.loads(err)["error"] == "BudgetExceeded"


def test_malformed_inputs_exit_2(tmp_path, capsys):
    key = keyfile(tmp_path, capsys, "bfv")
    junk = tmp_path / "junk"
    junk.write_bytes(b"\x01\x09garbage")
    assert run(capsys, "decrypt", "--key", str(key), str(junk))[0] == 2
    bad_key = tmp_path / "bad.key"
    bad_key.write_bytes(key.read_bytes()[:-3])
    assert run(capsys, "decrypt", "--key", str(bad_key), str(junk))[0] == 2
    assert run(capsys, "keygen", "--scheme", "nope", "--seed", "1")[0] == 2
    assert run(capsys, "keygen", "--scheme", "bfv")[0] == 2
    other = keyfile(tmp_path, capsys, "ckks")
    ct = tmp_path / "ct"
    run(capsys, "encrypt", "--key", str(other), "--message", json.dumps([[0.5, 0.0]] * 8), "--seed", "1", "--out", str(ct))
    assert run(capsys, "decrypt", "--key", str(key), str(ct))[0] == 2


@pytest.mark.parametrize("scheme", ["bfv", "ckks", "cg-matrix"])
def test_vectors_roundtrip(tmp_path, capsys, scheme):
    out = tmp_path / "v.json"
    code, _, err = run(capsys, "vectors", "emit", "--scheme", scheme, "--seed", "3", "--count", "3", "--out", str(out))
    assert code == 0, err
    code, _, err = run(capsys, "vectors", "check", str(out))
    assert code == 0, err
    doc = json.loads(out.read_text())
    doc["cases"][0]["expected_ciphertext_digest"] = "00" * 32
    out.write_text(json.dumps(doc))
    assert run(capsys, "vectors", "check", str(out))[0] == 1


def test_selftest_quick(capsys):
    code, out, _ = run(capsys, "selftest", "--scheme", "bfv", "--quick", "--json")
    assert code == 0
    rows = json.loads(out)
    assert {r["criterion"] for r in rows} >= {1, 2, 3}
    assert all(r["passed"] is not False for r in rows)


def test_params_advise(tmp_path, capsys):
    inp = tmp_path / "in.json"
    inp.write_text(json.dumps({"w": 2, "m": 11}))
    code, out, _ = run(capsys, "params", "advise", "--scheme", "rank-ideal", "--in", str(inp))
    assert code == 0
    assert json.loads(out)["derived"]["m_min_operational"] == 9
    inp.write_text(json.dumps({"w": 2, "m": 8}))
    assert run(capsys, "params", "advise", "--scheme", "rank-ideal", "--in", str(inp))[0] == 1
