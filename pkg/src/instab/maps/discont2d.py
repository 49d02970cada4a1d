"""Discontinuous planar map that is only Gateaux differentiable at the origin."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..spaces import NormKind, PlanarPoint
from .base import MapSpec, MapTag


def in_region(v, w):
    """Membership in ``D = {0 < |w| < v^2}`` (strict on both sides)."""
    aw = np.abs(w)
    return (aw > 0) & (aw < v * v)


def discont_step(v, w):
    """Vectorized ``(v, w) -> (2v 1_{D^c}, w/2 + v^2/4)``."""
    v_new = np.where(in_region(v, w), 0.0, 2.0 * v)
    return v_new, 0.5 * w + 0.25 * v * v


@dataclass(frozen=True)
class Discont2D(MapSpec):
    """``F(v, w) = (2v 1_{D^c}(v, w), w/2 + v^2/4)`` with ``L(v, w) = (2v, w/2)``."""

    norm_kind = NormKind.SEQ_L2

    @property
    def tag(self) -> MapTag:
        return MapTag.DISCONT2D

    def apply(self, u: PlanarPoint) -> PlanarPoint:
        v, w = discont_step(u.v, u.w)
        return PlanarPoint(float(v), float(w))

    def linearized_apply(self, u: PlanarPoint) -> PlanarPoint:
        return PlanarPoint(2.0 * u.v, 0.5 * u.w)

    def zero(self) -> PlanarPoint:
        return PlanarPoint(0.0, 0.0)

    def to_config(self) -> dict:
        return {"tag": self.tag.value}


def discont_decay_margins(v0: np.ndarray, w0: np.ndarray, steps: int) -> np.ndarray:
    """Per-step minimum of ``bound - (v_n^2 + |w_n|)`` over a batch, n = 1..steps.

    The bound is ``4 (3/4)^(n-1) (v0^2 + |w0|)``; margins are relative to it
    (starts at the origin contribute zero).
    """
    v = np.array(v0, dtype=float)
    w = np.array(w0, dtype=float)
    q0 = v * v + np.abs(w)
    out = np.empty(steps)
    for n in range(1, steps + 1):
        v, w = discont_step(v, w)
        bound = 4.0 * 0.75 ** (n - 1) * q0
        obs = v * v + np.abs(w)
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(bound > 0, (bound - obs) / bound, 0.0)
        out[n - 1] = float(np.min(rel))
    return out
