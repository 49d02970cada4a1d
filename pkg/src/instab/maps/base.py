"""Common interface of the example maps and their shared building blocks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Tuple

import numpy as np

from ..spaces import NormKind, norm


class MapTag(str, Enum):
    JORDAN2D = "JORDAN2D"
    SHIFT_MULT = "SHIFT_MULT"
    TRANSLATE_MULT = "TRANSLATE_MULT"
    TRANSLATE_MULT_DILATE = "TRANSLATE_MULT_DILATE"
    CONTRACT_SUPPORT = "CONTRACT_SUPPORT"
    DISCONT2D = "DISCONT2D"
    SCALAR_ALPHA = "SCALAR_ALPHA"


class ShiftMode(str, Enum):
    """How a non-grid-aligned argument shift is realized on a grid.

    ``INTERP`` interpolates linearly; ``CEIL`` rounds the shift up to the next
    multiple of the grid spacing so every transform reads grid samples
    exactly and supports never spread by interpolation.
    """

    INTERP = "interp"
    CEIL = "ceil"


def snap_up(s: float, dx: float) -> float:
    """Smallest multiple of ``dx`` that is at least ``s`` (``s >= 0``)."""
    if s == 0.0 or not math.isfinite(s):
        return s
    k = math.ceil(s / dx - 1e-12)
    return k * dx


class MapSpec:
    """A map ``F`` with ``F(0) = 0`` and a linearization ``L`` at the origin.

    Subclasses are frozen dataclasses and implement ``apply``,
    ``linearized_apply``, ``zero``, ``to_config`` and the class attribute
    ``norm_kind``.  ``remainder`` defaults to ``F(u) - L u`` and is overridden
    where a direct formula avoids cancellation.
    """

    norm_kind: NormKind = NormKind.L2

    @property
    def tag(self) -> MapTag:
        raise NotImplementedError

    def apply(self, u):
        raise NotImplementedError

    def linearized_apply(self, u):
        raise NotImplementedError

    def remainder(self, u):
        return self.apply(u) - self.linearized_apply(u)

    def zero(self):
        raise NotImplementedError

    def norm(self, u) -> float:
        return norm(u, self.norm_kind)

    def to_config(self) -> dict:
        raise NotImplementedError


class ShiftKind(str, Enum):
    LOG = "log"
    POWER = "power"
    TABLE = "table"


@dataclass(frozen=True)
class ShiftFn:
    """Increasing shift amplitude ``h`` with ``h(0) = 0``.

    ``LOG``: ``C/|ln s|`` for ``0 < s < 1`` and infinite from ``s = 1`` on;
    ``POWER``: ``s**q``; ``TABLE``: piecewise linear through ``(0, 0)`` and
    the listed points, continued with the last slope.
    """

    kind: ShiftKind = ShiftKind.LOG
    C: float = 2.0
    q: float = 1.0
    table_s: Tuple[float, ...] = ()
    table_h: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ShiftKind(self.kind))
        if self.kind is ShiftKind.LOG and not self.C > 0:
            raise ValueError("log shift needs C > 0")
        if self.kind is ShiftKind.POWER and not self.q > 0:
            raise ValueError("power shift needs q > 0")
        if self.kind is ShiftKind.TABLE:
            s = np.asarray(self.table_s, dtype=float)
            h = np.asarray(self.table_h, dtype=float)
            if s.size == 0 or s.size != h.size:
                raise ValueError("shift table needs matching nonempty columns")
            if s[0] <= 0 or np.any(np.diff(s) <= 0) or h[0] <= 0 or np.any(np.diff(h) <= 0):
                raise ValueError("shift table must be strictly increasing from (0, 0)")
            object.__setattr__(self, "table_s", tuple(s.tolist()))
            object.__setattr__(self, "table_h", tuple(h.tolist()))

    def __call__(self, s: float) -> float:
        if s < 0:
            raise ValueError("shift amplitude is defined for s >= 0")
        if s == 0.0:
            return 0.0
        if self.kind is ShiftKind.LOG:
            return self.C / -math.log(s) if s < 1.0 else math.inf
        if self.kind is ShiftKind.POWER:
            return s ** self.q
        s_tab = np.concatenate(([0.0], self.table_s))
        h_tab = np.concatenate(([0.0], self.table_h))
        if s <= s_tab[-1]:
            return float(np.interp(s, s_tab, h_tab))
        slope = (h_tab[-1] - h_tab[-2]) / (s_tab[-1] - s_tab[-2])
        return float(h_tab[-1] + slope * (s - s_tab[-1]))

    def to_config(self) -> dict:
        if self.kind is ShiftKind.LOG:
            return {"kind": "log", "C": self.C}
        if self.kind is ShiftKind.POWER:
            return {"kind": "power", "q": self.q}
        return {"kind": "table", "s": list(self.table_s), "h": list(self.table_h)}

    @classmethod
    def from_config(cls, cfg: dict) -> "ShiftFn":
        kind = ShiftKind(cfg["kind"])
        if kind is ShiftKind.LOG:
            return cls(kind, C=float(cfg.get("C", 2.0)))
        if kind is ShiftKind.POWER:
            return cls(kind, q=float(cfg["q"]))
        return cls(kind, table_s=tuple(cfg["s"]), table_h=tuple(cfg["h"]))


@dataclass(frozen=True)
class BumpFn:
    """Smooth bump ``b*exp(1 - 1/(1 - (x/a)**2))`` on ``|x| < a``, zero elsewhere."""

    a: float = 1.0
    b: float = 2.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("bump half-width must be positive")
        if not self.b > 1:
            raise ValueError("bump height must exceed 1")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = (x / self.a) ** 2
        inside = y < 1.0
        out = np.zeros_like(x)
        out[inside] = self.b * np.exp(1.0 - 1.0 / (1.0 - y[inside]))
        return out

    def to_config(self) -> dict:
        return {"a": self.a, "b": self.b}

    @classmethod
    def from_config(cls, cfg: Any) -> "BumpFn":
        return cls(float(cfg.get("a", 1.0)), float(cfg.get("b", 2.0)))
