"""Experiment configs: one JSON document listing named experiments.

Layout (see ``docs/formats.md``)::

    {"output_dir": "out",
     "experiments": [
        {"name": "cone", "kind": "CONE", "params": {"seeds": 500}},
        {"name": "jordan", "kind": "VERIFY_BOUND", "check": "jordan", "expect": "PASS"}
     ]}

Everything is validated before any experiment runs.  Errors carry the line
of the offending key in the source text.
"""
from __future__ import annotations

import inspect
import json
import numbers
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import ConfigError, InstabError
from .maps import map_from_config
from .propositions import CHECKS


class Kind(str, Enum):
    SIMULATE = "SIMULATE"
    VERIFY_BOUND = "VERIFY_BOUND"
    CERTIFY_INSTABILITY = "CERTIFY_INSTABILITY"
    CERTIFY_STABILITY = "CERTIFY_STABILITY"
    REMAINDER_PROFILE = "REMAINDER_PROFILE"
    CONE = "CONE"
    SANDWICH = "SANDWICH"
    CHARSOLVER = "CHARSOLVER"


class Expect(str, Enum):
    PASS = "PASS"    # PASS or EVIDENCE_ONLY
    FAIL = "FAIL"


# checks each kind may run; the first is the default when "check" is omitted
KIND_CHECKS: Dict[Kind, Tuple[str, ...]] = {
    Kind.SIMULATE: ("simulate",),
    Kind.VERIFY_BOUND: ("jordan", "shift_mult", "translate_mult", "contract_support", "discont2d"),
    Kind.CERTIFY_INSTABILITY: ("scalar_sharpness",),
    Kind.CERTIFY_STABILITY: ("stability",),
    Kind.REMAINDER_PROFILE: ("remainder",),
    Kind.CONE: ("cone",),
    Kind.SANDWICH: ("sandwich",),
    Kind.CHARSOLVER: ("charsolver",),
}

TOP_KEYS = {"experiments", "output_dir"}
EXPERIMENT_KEYS = {"name", "kind", "check", "params", "expect"}
NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    kind: Kind
    check: str
    params: Dict[str, Any] = field(default_factory=dict)
    expect: Expect = Expect.PASS

    @property
    def func(self) -> Callable:
        return CHECKS[self.check]

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind.value, "check": self.check,
                "params": self.params, "expect": self.expect.value}


@dataclass(frozen=True)
class SuiteConfig:
    experiments: Tuple[ExperimentConfig, ...]
    output_dir: Optional[str] = None


class _Locator:
    """Maps a key path to a line of the source text (best effort, 1-based)."""

    def __init__(self, text: str):
        self.text = text
        self.lines = text.splitlines()

    def line_of(self, key: str, after: int = 0) -> int:
        pat = re.compile(r'"%s"\s*:' % re.escape(key))
        for i in range(after, len(self.lines)):
            if pat.search(self.lines[i]):
                return i + 1
        return after + 1 if after < len(self.lines) else max(len(self.lines), 1)

    def experiment_line(self, index: int) -> int:
        """Line where the ``index``-th experiment object begins."""
        m = re.search(r'"experiments"\s*:\s*\[', self.text)
        if m is None:
            return 1
        depth, count = 0, -1
        for pos in range(m.end(), len(self.text)):
            ch = self.text[pos]
            if ch == "{":
                depth += 1
                if depth == 1:
                    count += 1
                    if count == index:
                        return self.text.count("\n", 0, pos) + 1
            elif ch == "}":
                depth -= 1
        return self.text.count("\n", 0, m.start()) + 1


def _err(source: str, line: int, msg: str) -> ConfigError:
    return ConfigError(f"{source}:{line}: {msg}")


def _type_ok(value: Any, default: Any) -> bool:
    if default is inspect.Parameter.empty or default is None:
        return True
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, numbers.Real):
        return isinstance(value, numbers.Real) and not isinstance(value, bool)
    if isinstance(default, (tuple, list)):
        return isinstance(value, list)
    if isinstance(default, dict):
        return isinstance(value, dict)
    return isinstance(value, type(default))


def _freeze(value: Any) -> Any:
    """JSON lists become tuples (the check functions take sequences)."""
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def parse_config(text: str, source: str = "<config>") -> SuiteConfig:
    """Parse and validate a config document; raises ConfigError with ``source:line``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _err(source, exc.lineno, f"malformed JSON: {exc.msg} (column {exc.colno})") from None
    loc = _Locator(text)
    if not isinstance(doc, dict):
        raise _err(source, 1, "top level must be an object")
    for key in doc:
        if key not in TOP_KEYS:
            raise _err(source, loc.line_of(key), f"unknown key {key!r}")
    exps = doc.get("experiments", [])
    if not isinstance(exps, list):
        raise _err(source, loc.line_of("experiments"), "'experiments' must be a list")
    out_dir = doc.get("output_dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise _err(source, loc.line_of("output_dir"), "'output_dir' must be a string")
    parsed: List[ExperimentConfig] = []
    seen = set()
    for i, e in enumerate(exps):
        base = loc.experiment_line(i)
        if not isinstance(e, dict):
            raise _err(source, base, f"experiment #{i} must be an object")
        for key in e:
            if key not in EXPERIMENT_KEYS:
                raise _err(source, loc.line_of(key, base - 1), f"unknown key {key!r}")
        name = e.get("name")
        if not isinstance(name, str) or not NAME_RE.match(name):
            raise _err(source, loc.line_of("name", base - 1) if "name" in e else base,
                       f"experiment #{i} needs a 'name' of letters, digits, '_', '.', '-'")
        if name in seen:
            raise _err(source, loc.line_of("name", base - 1), f"duplicate experiment name {name!r}")
        seen.add(name)
        try:
            kind = Kind(e.get("kind"))
        except ValueError:
            raise _err(source, loc.line_of("kind", base - 1) if "kind" in e else base,
                       f"experiment {name!r}: 'kind' must be one of {[k.value for k in Kind]}") from None
        allowed = KIND_CHECKS[kind]
        check = e.get("check", allowed[0])
        if check not in allowed:
            raise _err(source, loc.line_of("check", base - 1),
                       f"experiment {name!r}: check {check!r} not available for {kind.value}; "
                       f"choose from {list(allowed)}")
        try:
            expect = Expect(e.get("expect", "PASS"))
        except ValueError:
            raise _err(source, loc.line_of("expect", base - 1),
                       f"experiment {name!r}: 'expect' must be PASS or FAIL") from None
        params = e.get("params", {})
        if not isinstance(params, dict):
            raise _err(source, loc.line_of("params", base - 1), f"experiment {name!r}: 'params' must be an object")
        sig = inspect.signature(CHECKS[check]).parameters
        for key, value in params.items():
            line = loc.line_of(key, base - 1)
            if key not in sig:
                raise _err(source, line, f"experiment {name!r}: unknown parameter {key!r} for "
                                         f"{check!r}; accepted: {sorted(sig)}")
            if not _type_ok(value, sig[key].default):
                raise _err(source, line, f"experiment {name!r}: parameter {key!r} has the wrong type")
        missing = [k for k, p in sig.items() if p.default is inspect.Parameter.empty and k not in params]
        if missing:
            raise _err(source, base, f"experiment {name!r}: missing parameters {missing}")
        if "map" in params:
            try:
                map_from_config(params["map"])
            except (KeyError, ValueError, TypeError, InstabError) as exc:
                raise _err(source, loc.line_of("map", base - 1),
                           f"experiment {name!r}: invalid map: {exc}") from None
        parsed.append(ExperimentConfig(name, kind, check, {k: _freeze(v) for k, v in params.items()}, expect))
    return SuiteConfig(tuple(parsed), out_dir)


def load_config(path: str) -> SuiteConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, path)
