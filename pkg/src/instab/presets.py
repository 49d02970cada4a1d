"""Bundled single-experiment presets and the full acceptance config."""
from __future__ import annotations

import json
from importlib import resources
from typing import List

from .config import SuiteConfig, parse_config
from .errors import ConfigError


def _read(name: str) -> str:
    return resources.files("instab").joinpath("configs", name).read_text(encoding="utf-8")


def list_presets() -> List[str]:
    return list(json.loads(_read("presets.json")))


def preset_config(name: str) -> SuiteConfig:
    table = json.loads(_read("presets.json"))
    if name not in table:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(table)}")
    return parse_config(json.dumps({"experiments": [table[name]]}, indent=1), f"preset:{name}")


def suite_path() -> str:
    return str(resources.files("instab").joinpath("configs", "acceptance_suite.json"))
