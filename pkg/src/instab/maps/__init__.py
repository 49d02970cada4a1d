"""The example maps behind one interface (``apply``, ``linearized_apply``).

Every map is a frozen dataclass deriving from :class:`MapSpec`; configs
round-trip through :func:`map_from_config` and ``MapSpec.to_config``.
"""
from __future__ import annotations

from ..operators import WeightSeq
from ..theory.alpha import AlphaProfile
from .base import BumpFn, MapSpec, MapTag, ShiftFn, ShiftKind, ShiftMode
from .contract_support import ContractSupport
from .discont2d import Discont2D
from .jordan2d import Jordan2D
from .scalar import ScalarAlpha
from .shift_mult import ShiftMult
from .translate_mult import TranslateMult, big_set_cardinality, gallun_shift_sums


def apply(spec: MapSpec, u):
    return spec.apply(u)


def linearized_apply(spec: MapSpec, u):
    return spec.linearized_apply(u)


MAP_KEYS = {
    MapTag.JORDAN2D: set(),
    MapTag.DISCONT2D: set(),
    MapTag.SHIFT_MULT: {"p", "weights"},
    MapTag.TRANSLATE_MULT: {"bump", "shift", "shift_mode", "window"},
    MapTag.TRANSLATE_MULT_DILATE: {"bump", "shift", "shift_mode", "window"},
    MapTag.CONTRACT_SUPPORT: {"n", "shift_mode"},
    MapTag.SCALAR_ALPHA: {"rho", "alpha"},
}


def map_from_config(cfg: dict) -> MapSpec:
    """Build a map from its JSON config object (see ``docs/formats.md``).

    Unknown keys raise ValueError.
    """
    tag = MapTag(cfg["tag"])
    extra = set(cfg) - MAP_KEYS[tag] - {"tag"}
    if extra:
        raise ValueError(f"unknown keys for {tag.value}: {sorted(extra)}")
    if tag is MapTag.JORDAN2D:
        return Jordan2D()
    if tag is MapTag.DISCONT2D:
        return Discont2D()
    if tag is MapTag.SHIFT_MULT:
        return ShiftMult(float(cfg.get("p", 1.0)),
                         WeightSeq.from_config(cfg.get("weights", {"kind": "log_special"})))
    if tag in (MapTag.TRANSLATE_MULT, MapTag.TRANSLATE_MULT_DILATE):
        lo, hi, n = cfg.get("window", [-4.0, 8.0, 12001])
        return TranslateMult(BumpFn.from_config(cfg.get("bump", {})),
                             ShiftFn.from_config(cfg.get("shift", {"kind": "log", "C": 2.0})),
                             dilate=tag is MapTag.TRANSLATE_MULT_DILATE,
                             shift_mode=cfg.get("shift_mode", "interp"),
                             lo=float(lo), hi=float(hi), n=int(n))
    if tag is MapTag.CONTRACT_SUPPORT:
        return ContractSupport(int(cfg.get("n", 4097)), cfg.get("shift_mode", "interp"))
    return ScalarAlpha(float(cfg.get("rho", 2.0)),
                       AlphaProfile.from_config(cfg.get("alpha", {"kind": "power", "b": 0.0, "p": 1.0})))


__all__ = [
    "BumpFn", "ContractSupport", "Discont2D", "Jordan2D", "MapSpec", "MapTag", "ScalarAlpha",
    "ShiftFn", "ShiftKind", "ShiftMode", "ShiftMult", "TranslateMult", "apply",
    "big_set_cardinality", "gallun_shift_sums", "linearized_apply", "map_from_config",
]
