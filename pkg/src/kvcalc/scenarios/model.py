"""Declarative scenario descriptions and their TOML encoding.

A scenario is data only: a chart, named bindings (scalars, fields, metrics,
connections, cochains, forms), and a list of assertions naming probes from
the registry in probes.py. Building the live objects happens in runner.py,
so scenario files can be round-tripped and diffed without touching any
symbolic machinery.
"""
from __future__ import annotations

import json
import re
import sys
from dataclasses import dataclass, field as dc_field
from typing import Any, Mapping, Sequence

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

__all__ = [
    "Assertion",
    "Scenario",
    "ScenarioFormatError",
    "scenario_to_toml",
    "scenario_from_toml",
]

_BINDING_SECTIONS = ("scalars", "fields", "oneforms", "metrics", "tensors",
                     "connections", "cochains", "forms")


class ScenarioFormatError(ValueError):
    """Scenario file or dict does not match the schema."""


@dataclass(frozen=True)
class Assertion:
    """One named check: a probe, its arguments, and the expected verdict.

    expect is "pass" (probe residual must be within tolerance) or "fail"
    (the probe must witness a deviation of at least the witness threshold,
    args key "witness", default 1e-3). note carries the mathematical
    statement being checked and lands in the report's paper_ref field.
    """

    name: str
    probe: str
    args: Mapping[str, Any] = dc_field(default_factory=dict)
    expect: str = "pass"
    tolerance: float | None = None
    note: str = ""

    def __post_init__(self):
        if self.expect not in ("pass", "fail"):
            raise ScenarioFormatError(
                f"assertion {self.name!r}: expect must be 'pass' or 'fail'")
        if not self.name:
            raise ScenarioFormatError("assertion needs a name")

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "probe": self.probe}
        if self.args:
            out["args"] = dict(self.args)
        out["expect"] = self.expect
        if self.tolerance is not None:
            out["tolerance"] = float(self.tolerance)
        if self.note:
            out["note"] = self.note
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "Assertion":
        unknown = set(d) - {"name", "probe", "args", "expect", "tolerance",
                            "note"}
        if unknown:
            raise ScenarioFormatError(
                f"assertion has unknown keys {sorted(unknown)}")
        try:
            return cls(name=d["name"], probe=d["probe"],
                       args=dict(d.get("args", {})),
                       expect=d.get("expect", "pass"),
                       tolerance=d.get("tolerance"),
                       note=d.get("note", ""))
        except KeyError as k:
            raise ScenarioFormatError(f"assertion missing key {k}") from None


@dataclass(frozen=True)
class Scenario:
    """A chart, bindings, optional ambient-connection context, assertions."""

    name: str
    doc: str
    chart: Mapping[str, Any]
    bindings: Mapping[str, Any] = dc_field(default_factory=dict)
    context: Mapping[str, Any] = dc_field(default_factory=dict)
    assertions: Sequence[Assertion] = ()

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", self.name or ""):
            raise ScenarioFormatError(f"bad scenario name {self.name!r}")
        if "coords" not in self.chart or "box" not in self.chart:
            raise ScenarioFormatError(
                f"scenario {self.name}: chart needs coords and box")
        for section in self.bindings:
            if section not in _BINDING_SECTIONS:
                raise ScenarioFormatError(
                    f"scenario {self.name}: unknown binding section "
                    f"{section!r} (have {_BINDING_SECTIONS})")
        object.__setattr__(self, "assertions", tuple(self.assertions))
        if not self.assertions:
            raise ScenarioFormatError(
                f"scenario {self.name}: no assertions")

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "doc": self.doc,
                     "chart": _plain(self.chart)}
        if self.context:
            out["context"] = _plain(self.context)
        if self.bindings:
            out["bindings"] = _plain(self.bindings)
        out["assertions"] = [a.to_dict() for a in self.assertions]
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "Scenario":
        unknown = set(d) - {"name", "doc", "chart", "bindings", "context",
                            "assertions"}
        if unknown:
            raise ScenarioFormatError(
                f"scenario has unknown keys {sorted(unknown)}")
        try:
            return cls(
                name=d["name"], doc=d.get("doc", ""), chart=dict(d["chart"]),
                bindings=dict(d.get("bindings", {})),
                context=dict(d.get("context", {})),
                assertions=tuple(Assertion.from_dict(a)
                                 for a in d.get("assertions", ())))
        except KeyError as k:
            raise ScenarioFormatError(f"scenario missing key {k}") from None


def _plain(v):
    if isinstance(v, Mapping):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


# ---------------------------------------------------------------------------
# TOML serialization. Reading uses the stdlib parser (tomli backport on
# 3.10); writing covers exactly the scenario schema: nested tables, arrays
# of tables, and inline values.

_BARE_KEY = re.compile(r"[A-Za-z0-9_-]+")


def _toml_key(k: str) -> str:
    if _BARE_KEY.fullmatch(k):
        return k
    return json.dumps(k)


def _toml_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            raise ScenarioFormatError("non-finite float in scenario")
        s = repr(v)
        return s if ("." in s or "e" in s or "E" in s) else s + ".0"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_scalar(x) for x in v) + "]"
    if isinstance(v, Mapping):
        inner = ", ".join(f"{_toml_key(k)} = {_toml_scalar(x)}"
                          for k, x in v.items())
        return "{ " + inner + " }" if inner else "{}"
    raise ScenarioFormatError(f"cannot serialize {type(v).__name__} to TOML")


def _is_table_array(v) -> bool:
    return (isinstance(v, (list, tuple)) and len(v) > 0
            and all(isinstance(x, Mapping) for x in v))


def _emit_table(out: list, d: Mapping, path: tuple):
    plain = {k: v for k, v in d.items()
             if not isinstance(v, Mapping) and not _is_table_array(v)}
    tables = {k: v for k, v in d.items() if isinstance(v, Mapping)}
    arrays = {k: v for k, v in d.items() if _is_table_array(v)}
    if path and (plain or not (tables or arrays)):
        out.append("[" + ".".join(_toml_key(p) for p in path) + "]")
    for k, v in plain.items():
        out.append(f"{_toml_key(k)} = {_toml_scalar(v)}")
    if plain or (path and not (tables or arrays)):
        out.append("")
    for k, v in tables.items():
        _emit_table(out, v, path + (k,))
    for k, lst in arrays.items():
        header = ".".join(_toml_key(p) for p in path + (k,))
        for el in lst:
            out.append(f"[[{header}]]")
            # element values are emitted inline so array elements stay flat
            for kk, vv in el.items():
                out.append(f"{_toml_key(kk)} = {_toml_scalar(vv)}")
            out.append("")


def scenario_to_toml(s: Scenario) -> str:
    out: list = []
    _emit_table(out, s.to_dict(), ())
    while out and out[-1] == "":
        out.pop()
    return "\n".join(out) + "\n"


def scenario_from_toml(text: str) -> Scenario:
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as e:
        raise ScenarioFormatError(f"invalid TOML: {e}") from None
    return Scenario.from_dict(data)
