"""Named parameter profiles.

``HEZOO_PROFILE`` picks the active profile: ``desk`` (default), ``paper``,
or a path to a JSON file mapping scheme labels to parameter objects.
"""

from __future__ import annotations

import json
import os
from importlib import resources
from pathlib import Path

from .errors import ParameterError

BUILTIN = ("desk", "paper")


def profile_name() -> str:
    return os.environ.get("HEZOO_PROFILE", "desk").strip() or "desk"


def load_profile(name: str | None = None) -> dict:
    name = name or profile_name()
    if name in BUILTIN:
        text = resources.files("hezoo").joinpath("profiles").joinpath(f"{name}.json").read_text()
    else:
        path = Path(name)
        if not path.is_file():
            raise ParameterError(f"unknown profile {name!r}: not a builtin and not a file")
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"profile {name!r} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParameterError("profile must map scheme labels to parameter objects")
    return data


def scheme_params(scheme: str, name: str | None = None) -> dict:
    data = load_profile(name)
    try:
        return dict(data[scheme])
    except KeyError:
        raise ParameterError(f"profile has no entry for {scheme}") from None
