"""``he-zoo`` command-line front end.

Exit status: 0 on success, 1 when a check or homomorphic operation fails,
2 on malformed input.  Errors are written to stderr as one JSON object.
Every randomized subcommand requires ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, acceptance, params as advisor, profiles
from .core import ALL_SCHEMES, CiphertextEnvelope, KeyFile, SchemeId, adapter_for, eval_dispatch
from .errors import Corrupt, HEError, ParameterError, SchemeMismatch, VersionMismatch
from .rng import RngStream

VECTOR_FILE_VERSION = 1
MALFORMED = (Corrupt, VersionMismatch, ParameterError, SchemeMismatch)


class UsageError(Exception):
    """Malformed command-line input (exit 2)."""


class CheckFailed(Exception):
    """A self-test or vector check did not pass (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def parse_seed(text: str) -> int:
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= seed < 1 << 256:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**256)")
    return seed


def resolve_scheme(name: str, variant: str | None = None) -> str:
    if name in ("challagunta", "cg"):
        if variant is None:
            raise UsageError("--variant vector|matrix is required for this scheme")
        name = f"cg-{variant}"
    try:
        return SchemeId.parse(name).label
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_bytes(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_bytes(path))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None


def read_envelope(path: str) -> CiphertextEnvelope:
    """Accepts raw envelope bytes, a hex line, or the JSON form written by ``--format json``."""
    data = _read_bytes(path)
    text = None
    try:
        text = data.decode("ascii").strip()
    except UnicodeDecodeError:
        pass
    if text is not None and text.startswith("{"):
        obj = _json_arg(text, path)
        if not isinstance(obj, dict) or "ciphertext" not in obj:
            raise UsageError(f"{path}: JSON ciphertext needs a 'ciphertext' field")
        text = obj["ciphertext"]
    if text is not None:
        try:
            data = bytes.fromhex(text)
        except ValueError:
            pass
    return CiphertextEnvelope.from_bytes(data)


def load_key(path: str):
    """Returns (adapter, key) for a key file."""
    data = _read_bytes(path)
    ad = adapter_for(KeyFile.from_bytes(data).scheme)
    return ad, ad.load_key(data)


def envelope_text(env: CiphertextEnvelope, fmt: str) -> str:
    if fmt == "hex":
        return env.to_bytes().hex()
    return json.dumps(
        {
            "scheme": env.scheme.label,
            "gamma": env.gamma,
            "level": env.level,
            "ciphertext": env.to_bytes().hex(),
            "digest": env.digest(),
        },
        sort_keys=True,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def scheme_params(scheme: str, params_path: str | None) -> dict:
    if params_path:
        data = _read_json(params_path)
        if not isinstance(data, dict):
            raise UsageError("parameter file must hold a JSON object")
        # a profile-shaped file may hold several schemes
        return dict(data[scheme]) if scheme in data and isinstance(data[scheme], dict) else data
    return profiles.scheme_params(scheme)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_keygen(args) -> int:
    scheme = resolve_scheme(args.scheme, args.variant)
    ad = adapter_for(scheme)
    params = ad.params_from_dict(scheme_params(scheme, args.params))
    seed = RngStream(args.seed).seed
    key = ad.keygen(params, RngStream(seed))
    blob = ad.save_key(key, seed)
    if args.out:
        Path(args.out).write_bytes(blob)
    else:
        print(blob.hex())
    return 0


def cmd_encrypt(args) -> int:
    ad, key = load_key(args.key)
    params = ad.key_params(key)
    raw = _json_arg(args.message, "--message") if args.message is not None else _read_json(args.message_file)
    message = ad.message_from_json(params, raw)
    env = ad.encrypt(key, message, RngStream(args.seed).fork("encrypt"))
    _emit(envelope_text(env, args.format), args.out)
    return 0


def cmd_decrypt(args) -> int:
    ad, key = load_key(args.key)
    env = read_envelope(args.ciphertext)
    ad.check_envelope(env)
    msg = ad.decrypt(key, env)
    _emit(json.dumps(ad.message_to_json(ad.key_params(key), msg)), args.out)
    return 0


def cmd_eval(args) -> int:
    ad, key = load_key(args.key)
    envs = [read_envelope(p) for p in args.ciphertexts]
    for env in envs:
        ad.check_envelope(env)
    extra = _json_arg(args.extra, "--extra") if args.extra else None
    if extra is not None and not isinstance(extra, dict):
        raise UsageError("--extra must be a JSON object")
    out = eval_dispatch(args.op, envs, key, extra)
    _emit(envelope_text(out, args.format), args.out)
    return 0


RELATED = {
    4: {"armknecht"},
    5: {"cg-vector", "cg-matrix"},
    6: {"bogdanov-lee"},
    7: {"rank-ideal", "rank-ideal-additive"},
    8: {"intpoly"},
    9: {"bfv"},
    10: {"armknecht", "bfv"},
}


def cmd_selftest(args) -> int:
    if args.scheme == "all":
        schemes = ALL_SCHEMES
    else:
        schemes = (resolve_scheme(args.scheme, args.variant),)
    criteria = sorted(acceptance.RUNNERS)
    if args.criteria:
        try:
            criteria = sorted({int(c) for c in args.criteria.split(",")})
        except ValueError:
            raise UsageError("--criteria takes a comma-separated list of numbers") from None
        if not set(criteria) <= set(acceptance.RUNNERS):
            raise UsageError(f"criteria must be within 1..{len(acceptance.RUNNERS)}")
    if args.scheme != "all":
        criteria = [c for c in criteria if c in acceptance.PER_SCHEME or schemes[0] in RELATED.get(c, ())]
    outcomes = acceptance.run(criteria, quick=args.quick, schemes=schemes)
    if args.json:
        print(json.dumps([o.__dict__ for o in outcomes], default=str, indent=1))
    else:
        print(acceptance.matrix(outcomes))
        print()
        for c in criteria:
            print(acceptance.summary_line(c, outcomes))
    return 0 if acceptance.verdict(outcomes) is not False else 1


def _vector_cases(scheme: str, params_dict: dict, seed: int, count: int):
    ad = adapter_for(scheme)
    params = ad.params_from_dict(params_dict)
    key_seed = RngStream(seed).seed
    key = ad.keygen(params, RngStream(key_seed))
    rng = RngStream(seed).fork("vectors")
    cases = []
    for i in range(count):
        m1, m2 = ad.random_message(params, rng), ad.random_message(params, rng)
        e1, e2 = ad.encrypt(key, m1, rng), ad.encrypt(key, m2, rng)
        cases.append(
            {
                "op": "encrypt",
                "messages": [ad.message_to_json(params, m1)],
                "ciphertext": e1.to_bytes().hex(),
                "expected_ciphertext_digest": e1.digest(),
                "expected_plaintext": ad.message_to_json(params, ad.decrypt(key, e1)),
            }
        )
        if "add" in ad.ops:
            s = ad.evaluate("add", [e1, e2], key)
            cases.append(
                {
                    "op": "add",
                    "messages": [ad.message_to_json(params, m1), ad.message_to_json(params, m2)],
                    "ciphertext": s.to_bytes().hex(),
                    "expected_ciphertext_digest": s.digest(),
                    "expected_plaintext": ad.message_to_json(params, ad.decrypt(key, s)),
                }
            )
    return ad, key, params, cases


def cmd_vectors_emit(args) -> int:
    scheme = resolve_scheme(args.scheme, args.variant)
    params_dict = adapter_for(scheme).params_to_dict(
        adapter_for(scheme).params_from_dict(scheme_params(scheme, args.params))
    )
    _, _, _, cases = _vector_cases(scheme, params_dict, args.seed, args.count)
    doc = {"version": VECTOR_FILE_VERSION, "scheme": scheme, "params": params_dict, "seed": args.seed, "cases": cases}
    _emit(json.dumps(doc, indent=1, sort_keys=True), args.out)
    return 0


def check_vector_file(doc) -> list[str]:
    """Regenerates every case and returns a list of mismatch descriptions."""
    if not isinstance(doc, dict) or not {"version", "scheme", "params", "seed", "cases"} <= doc.keys():
        raise UsageError("vector file needs version, scheme, params, seed and cases")
    if doc["version"] != VECTOR_FILE_VERSION:
        raise VersionMismatch(f"vector file version {doc['version']}, expected {VECTOR_FILE_VERSION}")
    scheme = resolve_scheme(doc["scheme"])
    cases = doc["cases"]
    per_round = 2 if "add" in adapter_for(scheme).ops else 1
    if not isinstance(cases, list) or len(cases) % per_round:
        raise UsageError("case list does not match the emitted layout")
    ad, key, params, fresh = _vector_cases(scheme, doc["params"], int(doc["seed"]), len(cases) // per_round)
    problems = []
    for i, (want, got) in enumerate(zip(cases, fresh)):
        if want.get("expected_ciphertext_digest") != got["expected_ciphertext_digest"]:
            problems.append(f"case {i}: ciphertext digest differs")
        env = CiphertextEnvelope.from_bytes(bytes.fromhex(want.get("ciphertext", "")))
        if env.digest() != want.get("expected_ciphertext_digest"):
            problems.append(f"case {i}: stored ciphertext does not match its digest")
        plain = ad.decrypt(key, env)
        expected = ad.message_from_json(params, want.get("expected_plaintext"))
        if not ad.messages_equal(params, plain, expected):
            problems.append(f"case {i}: decrypted plaintext differs")
    return problems


def cmd_vectors_check(args) -> int:
    problems = check_vector_file(_read_json(args.file))
    for p in problems:
        print(p)
    if problems:
        raise CheckFailed(f"{len(problems)} vector mismatches")
    print("ok")
    return 0


def cmd_params_advise(args) -> int:
    scheme = resolve_scheme(args.scheme)
    inputs = _read_json(args.inp) if args.inp else {}
    if not isinstance(inputs, dict):
        raise UsageError("advice inputs must be a JSON object")
    try:
        report = advisor.advise(scheme, inputs)
    except KeyError as exc:
        raise ParameterError(f"missing input {exc}") from None
    _emit(json.dumps(report.to_dict(), indent=1, sort_keys=True, default=str), args.out)
    failed = [c.name for c in report.checks if not c.passed]
    return 1 if failed or not report.consistent else 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="he-zoo", description="Homomorphic encryption schemes behind one interface.")
    ap.add_argument("--version", action="version", version=f"he-zoo {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scheme_flags(p, required=True):
        p.add_argument("--scheme", required=required, help="scheme label, e.g. bfv or cg-matrix")
        p.add_argument("--variant", choices=("vector", "matrix"), help="variant for the challagunta scheme")

    p = sub.add_parser("keygen", help="generate a key file")
    scheme_flags(p)
    p.add_argument("--params", help="parameter JSON (default: active profile)")
    p.add_argument("--seed", type=parse_seed, required=True)
    p.add_argument("--out", help="key file path (default: hex on stdout)")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a JSON message")
    p.add_argument("--key", required=True)
    msg = p.add_mutually_exclusive_group(required=True)
    msg.add_argument("--message", help="message as inline JSON")
    msg.add_argument("--message-file", help="file holding the message JSON")
    p.add_argument("--seed", type=parse_seed, required=True)
    p.add_argument("--format", choices=("hex", "json"), default="hex")
    p.add_argument("--out")
    p.set_defaults(func=cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext to JSON")
    p.add_argument("--key", required=True)
    p.add_argument("ciphertext", help="ciphertext file (raw, hex or JSON); '-' for stdin")
    p.add_argument("--out")
    p.set_defaults(func=cmd_decrypt)

    p = sub.add_parser("eval", help="homomorphic evaluation")
    p.add_argument("op", choices=("add", "mult", "ptmult", "refresh", "rescale"))
    p.add_argument("ciphertexts", nargs="+")
    p.add_argument("--key", required=True)
    p.add_argument("--extra", help="JSON object of operation options")
    p.add_argument("--format", choices=("hex", "json"), default="hex")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--scheme", default="all")
    p.add_argument("--variant", choices=("vector", "matrix"))
    p.add_argument("--quick", action="store_true", help="fewer sampled trials")
    p.add_argument("--criteria", help="comma-separated criterion numbers")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("vectors", help="emit or check test-vector files")
    vsub = p.add_subparsers(dest="vectors_command", required=True, parser_class=_Parser)
    e = vsub.add_parser("emit")
    scheme_flags(e)
    e.add_argument("--params")
    e.add_argument("--seed", type=parse_seed, required=True)
    e.add_argument("--count", type=int, default=4)
    e.add_argument("--out")
    e.set_defaults(func=cmd_vectors_emit)
    c = vsub.add_parser("check")
    c.add_argument("file")
    c.set_defaults(func=cmd_vectors_check)

    p = sub.add_parser("params", help="parameter advice")
    psub = p.add_subparsers(dest="params_command", required=True, parser_class=_Parser)
    a = psub.add_parser("advise")
    a.add_argument("--scheme", required=True)
    a.add_argument("--in", dest="inp", help="input JSON")
    a.add_argument("--out")
    a.set_defaults(func=cmd_params_advise)
    return ap


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail(2, "UsageError", str(exc))
    except MALFORMED as exc:
        return _fail(2, type(exc).__name__, str(exc))
    except CheckFailed as exc:
        return _fail(1, "CheckFailed", str(exc))
    except HEError as exc:
        return _fail(1, type(exc).__name__, str(exc))
    except (ValueError, TypeError, KeyError) as exc:
        # message or option values the scheme could not interpret
        return _fail(2, type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
