"""Dilating shift on C0([-1, 0]) that contracts supports toward the origin."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..spaces import GridFunction1D, NormKind, dilate_translate, norm
from .base import MapSpec, MapTag, ShiftMode, snap_up

DEFAULT_N = 4097


@dataclass(frozen=True)
class ContractSupport(MapSpec):
    """``(F u)(x) = 2 (Eu)(2x - |u|_inf^2)`` with ``(L u)(x) = 2 (Eu)(2x)``.

    With ``shift_mode = CEIL`` the shift is rounded up to a multiple of the
    grid spacing, so every sample of ``F(u)`` is twice an exact sample of
    ``u`` and supports shrink on the grid exactly as they do in the
    continuum.  Rounding up only strengthens the support contraction.
    """

    n: int = DEFAULT_N
    shift_mode: ShiftMode = ShiftMode.INTERP

    norm_kind = NormKind.SUP

    def __post_init__(self):
        object.__setattr__(self, "shift_mode", ShiftMode(self.shift_mode))
        if self.n < 3:
            raise ValueError("grid needs at least 3 samples")

    @property
    def tag(self) -> MapTag:
        return MapTag.CONTRACT_SUPPORT

    def zero(self) -> GridFunction1D:
        return GridFunction1D.zeros(-1.0, 0.0, self.n)

    def state(self, f) -> GridFunction1D:
        return GridFunction1D.c00(f, self.n)

    def _check(self, u: GridFunction1D) -> None:
        if u.lo != -1.0 or u.hi != 0.0 or u.n != self.n:
            raise ValueError("state must live on the [-1, 0] grid of this map")
        if u.values[0] != 0.0:
            raise ValueError("state must vanish at x = -1")

    def shift_amount(self, u: GridFunction1D) -> float:
        s = norm(u, NormKind.SUP) ** 2
        if self.shift_mode is ShiftMode.CEIL:
            s = snap_up(s, u.dx)
        return s

    def apply(self, u: GridFunction1D) -> GridFunction1D:
        self._check(u)
        return dilate_translate(u, 2.0, self.shift_amount(u)) * 2.0

    def linearized_apply(self, u: GridFunction1D) -> GridFunction1D:
        self._check(u)
        return dilate_translate(u, 2.0, 0.0) * 2.0

    def to_config(self) -> dict:
        return {"tag": self.tag.value, "n": self.n, "shift_mode": self.shift_mode.value}


def support_bound(n: int) -> float:
    """Left end ``-2^-n`` of the interval containing ``supp u_n``."""
    return -(2.0 ** -n)


def decay_bound(n: int, alpha: float, sup0: float) -> float:
    """``2^(3(1-a)/2) 2^(n(3a-1)/2) |u_0|^a`` for ``n >= 1``."""
    return 2.0 ** (1.5 * (1.0 - alpha)) * 2.0 ** (0.5 * n * (3.0 * alpha - 1.0)) * sup0 ** alpha


def adversarial_states(spec: ContractSupport, count_random: int = 16, seed: int = 0x5EED):
    """Initial data probing the contraction bounds.

    Includes hats concentrated near the origin (largest growth before the
    shift acts), a ramp, sawtooth oscillations and random continuous states.
    """
    g = spec.zero()
    x = g.x
    out = [g.with_values(1.0 + x), g.with_values(np.where(x > -0.5, 1.0 + 2 * x, 0.0))]
    for w in (2.0 ** -4, 2.0 ** -8, 2.0 ** -11):
        if w < 2 * g.dx:    # unresolved on this grid
            continue
        out.append(g.with_values(np.maximum(0.0, 1.0 - np.abs(x + w) / w)))
    k = np.arange(g.n)
    saw = np.where(k % 2 == 0, 1.0, -1.0)
    saw[0] = 0.0
    out.append(g.with_values(saw))
    rng = np.random.default_rng(seed)
    for _ in range(count_random):
        v = rng.standard_normal(g.n)
        v[0] = 0.0
        out.append(g.with_values(v))
    return [u * (1.0 / norm(u, NormKind.SUP)) for u in out]
