"""Planar map whose linearization is a Jordan block with eigenvalue one."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..spaces import NormKind, PlanarPoint
from .base import MapSpec, MapTag


def jordan_step(v, w):
    """Vectorized ``(v, w) -> (v + w - v**3, w - w**3)``."""
    return v + w - v ** 3, w - w ** 3


@dataclass(frozen=True)
class Jordan2D(MapSpec):
    """``F(v, w) = (v + w - v^3, w - w^3)`` with ``L = [[1, 1], [0, 1]]``."""

    norm_kind = NormKind.SEQ_L2

    @property
    def tag(self) -> MapTag:
        return MapTag.JORDAN2D

    def apply(self, u: PlanarPoint) -> PlanarPoint:
        return PlanarPoint(*jordan_step(u.v, u.w))

    def linearized_apply(self, u: PlanarPoint) -> PlanarPoint:
        return PlanarPoint(u.v + u.w, u.w)

    def remainder(self, u: PlanarPoint) -> PlanarPoint:
        return PlanarPoint(-u.v ** 3, -u.w ** 3)

    def zero(self) -> PlanarPoint:
        return PlanarPoint(0.0, 0.0)

    def to_config(self) -> dict:
        return {"tag": self.tag.value}


def jordan_orbit_bounds(v0: np.ndarray, w0: np.ndarray, steps: int) -> dict:
    """Iterate a batch of starts and report the worst relative slack of three bounds.

    The bounds, checked for ``1 <= n <= steps``, are ``|v_n| <= max(|v0|,
    |w0|^(1/3))``, ``|w_n| <= |w0|`` and ``|w_n| <= |w0|/sqrt(1 + 2 w0^2 n)``.
    Each slack is ``(bound - observed)/bound``; a zero bound contributes
    ``-observed``.
    """
    v = np.array(v0, dtype=float)
    w = np.array(w0, dtype=float)
    vb = np.maximum(np.abs(v), np.cbrt(np.abs(w)))
    wb = np.abs(w)
    w2 = 2.0 * w * w
    v_max = np.zeros_like(v)
    w_max = np.zeros_like(w)
    cmp_ratio = np.zeros_like(w)  # max over n of |w_n| sqrt(1 + 2 w0^2 n)
    for n in range(1, steps + 1):
        v, w = v + w - v * v * v, w - w * w * w
        aw = np.abs(w)
        np.maximum(v_max, np.abs(v), out=v_max)
        np.maximum(w_max, aw, out=w_max)
        np.maximum(cmp_ratio, aw * np.sqrt(1.0 + w2 * n), out=cmp_ratio)
    return {"v_bound": _rel_margin(vb, v_max), "w_bound": _rel_margin(wb, w_max),
            "comparison": _rel_margin(wb, cmp_ratio), "v_final": v, "w_final": w}


def _rel_margin(bound: np.ndarray, observed: np.ndarray) -> float:
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(bound > 0, (bound - observed) / bound, -observed)
    return float(np.min(rel))
