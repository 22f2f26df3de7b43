"""Germ and family file handling: JSON schema validation, normal-form
enforcement, and access to the shipped corpus."""

from __future__ import annotations

import json
from importlib import resources
import jsonschema

from .errors import InputError, NormalFormViolationError, PolyParseError
from .multipoint import Branch, GermSpec
from .poly import format_polynomial, parse_polynomial

_schema_cache: dict[str, dict] = {}


def load_schema(name: str) -> dict:
    if name not in _schema_cache:
        text = resources.files("germlab.schemas").joinpath(name).read_text("utf-8")
        _schema_cache[name] = json.loads(text)
    return _schema_cache[name]


def germ_from_dict(obj: dict) -> GermSpec:
    schema = load_schema("germ.schema.json")
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as exc:
        raise InputError(f"germ file does not match the schema: {exc.message}")
    n = obj["source_dim"]
    params = tuple(obj.get("params", []))
    variables = tuple(f"x{i}" for i in range(1, n)) + ("y",) + params
    branches = []
    for b in obj["branches"]:
        if len(b["components"]) != n + 1:
            raise NormalFormViolationError(
                f"branch {b['point']!r} needs {n + 1} components, found {len(b['components'])}",
                branch=b["point"],
            )
        comps = []
        for i, text in enumerate(b["components"]):
            try:
                comps.append(parse_polynomial(text, variables))
            except PolyParseError as exc:
                raise InputError(
                    f"branch {b['point']!r}, component {i}: {exc}",
                    branch=b["point"],
                    component=i,
                    position=exc.position,
                )
        branches.append(Branch(b["point"], tuple(comps)))
    germ = GermSpec(n, tuple(branches), params, obj["name"])
    germ.validate_normal_form()
    return germ


def load_germ_file(path: str) -> GermSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {path}: {exc}")
    return germ_from_dict(obj)


def germ_to_dict(germ: GermSpec) -> dict:
    return {
        "name": germ.name,
        "source_dim": germ.source_dim,
        "params": list(germ.params),
        "branches": [
            {
                "point": b.label,
                "components": [format_polynomial(c) for c in b.components],
            }
            for b in germ.branches
        ],
    }


def corpus_names() -> list[str]:
    files = resources.files("germlab.corpus")
    return sorted(
        entry.name[: -len(".germ")] for entry in files.iterdir() if entry.name.endswith(".germ")
    )


def load_corpus_germ(name: str) -> GermSpec:
    text = resources.files("germlab.corpus").joinpath(name + ".germ").read_text("utf-8")
    return germ_from_dict(json.loads(text))


def corpus_file_path(name: str) -> str:
    """Filesystem path of a shipped corpus germ (for CLI-level tests)."""
    return str(resources.files("germlab.corpus").joinpath(name + ".germ"))
