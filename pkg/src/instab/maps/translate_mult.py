"""Translate-then-multiply maps on L2(R), realized on a finite window.

``(F u)(x) = chi(x) u(x - h(|u|))`` and the dilating variant
``(F u)(x) = chi(x) u(2x - h(|u|))``.  States are :class:`GridFunction1D`
on a window that must contain every support; a state touching the window
edge is rejected rather than silently truncated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Sequence

import numpy as np

from ..errors import WindowEdgeError
from ..spaces import GridFunction1D, NormKind, dilate_translate, norm, translate
from .base import BumpFn, MapSpec, MapTag, ShiftFn, ShiftMode, snap_up

DEFAULT_WINDOW = (-4.0, 8.0, 12001)


@dataclass(frozen=True)
class TranslateMult(MapSpec):
    bump: BumpFn = field(default_factory=BumpFn)
    shift: ShiftFn = field(default_factory=ShiftFn)
    dilate: bool = False
    shift_mode: ShiftMode = ShiftMode.INTERP
    lo: float = DEFAULT_WINDOW[0]
    hi: float = DEFAULT_WINDOW[1]
    n: int = DEFAULT_WINDOW[2]

    norm_kind = NormKind.L2

    def __post_init__(self):
        object.__setattr__(self, "shift_mode", ShiftMode(self.shift_mode))
        if not (self.lo < -self.bump.a and self.hi > self.bump.a and self.n >= 3):
            raise ValueError("window must strictly contain the bump support")

    @property
    def tag(self) -> MapTag:
        return MapTag.TRANSLATE_MULT_DILATE if self.dilate else MapTag.TRANSLATE_MULT

    @property
    def factor(self) -> float:
        return 2.0 if self.dilate else 1.0

    def grid(self) -> GridFunction1D:
        return GridFunction1D.zeros(self.lo, self.hi, self.n)

    @cached_property
    def _chi(self) -> np.ndarray:
        c = self.bump(self.grid().x)
        c.setflags(write=False)
        return c

    def chi(self) -> np.ndarray:
        """The bump sampled on the window."""
        return self._chi

    def zero(self) -> GridFunction1D:
        return self.grid()

    def state(self, f) -> GridFunction1D:
        """Sample ``f`` on this map's window."""
        return GridFunction1D.sample(f, self.lo, self.hi, self.n)

    def _check(self, u: GridFunction1D) -> None:
        if u.n != self.n or u.lo != self.lo or u.hi != self.hi:
            raise ValueError("state does not live on this map's window")
        if u.values[0] != 0.0 or u.values[-1] != 0.0:
            raise WindowEdgeError("state support reaches the window edge")

    def shift_amount(self, u: GridFunction1D) -> float:
        s = self.shift(norm(u, NormKind.L2))
        if self.shift_mode is ShiftMode.CEIL:
            s = snap_up(s, u.dx)
        return s

    def _moved(self, u: GridFunction1D, s: float) -> GridFunction1D:
        if not np.isfinite(s):   # h(|u|) = inf moves everything out of reach
            return u.with_values(np.zeros(u.n))
        if self.dilate:
            return dilate_translate(u, 2.0, s)
        return translate(u, s)

    def apply(self, u: GridFunction1D) -> GridFunction1D:
        self._check(u)
        moved = self._moved(u, self.shift_amount(u))
        return moved.with_values(self.chi() * moved.values)

    def linearized_apply(self, u: GridFunction1D) -> GridFunction1D:
        self._check(u)
        moved = self._moved(u, 0.0)
        return moved.with_values(self.chi() * moved.values)

    def to_config(self) -> dict:
        return {"tag": self.tag.value, "bump": self.bump.to_config(),
                "shift": self.shift.to_config(), "shift_mode": self.shift_mode.value,
                "window": [self.lo, self.hi, self.n]}


def gallun_shift_sums(spec: TranslateMult, norms: Sequence[float]) -> np.ndarray:
    """Table ``S[j, n] = sum_{l=j}^{n-1} h(|u_l|)`` for ``0 <= j <= n <= len(norms)-1``.

    Entries with ``j > n`` are NaN.  ``S[n, n] = 0``.
    """
    if spec.tag is not MapTag.TRANSLATE_MULT:
        raise ValueError("shift sums are defined for the plain translate-multiply map")
    h = np.array([spec.shift(float(r)) for r in norms[:-1]])
    csum = np.concatenate(([0.0], np.cumsum(h)))   # csum[n] = sum_{l<n} h_l
    m = csum.size
    table = csum[None, :] - csum[:, None]
    table[np.tril_indices(m, -1)] = np.nan
    return table


def big_set_cardinality(norms: Sequence[float], eps: float) -> int:
    """``card{n >= 1 : |u_n| >= eps}``."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    return int(np.count_nonzero(np.asarray(norms[1:]) >= eps))


def cardinality_bound(spec: TranslateMult, eps: float) -> float:
    """``2a/h(eps) + 1`` (``a`` the bump half-width)."""
    return 2.0 * spec.bump.a / spec.shift(eps) + 1.0


def growth_bound(spec: TranslateMult, delta: float) -> float:
    """``delta * b^(2a/h(delta) + 1)``, the bound on ``max_n |u_n|``."""
    return delta * spec.bump.b ** (2.0 * spec.bump.a / spec.shift(delta) + 1.0)


def sawtooth(spec: TranslateMult, half_period: int, lo: float = -1.0, hi: float = 1.0) -> GridFunction1D:
    """Zero-mean sawtooth of ``+-1`` blocks of ``half_period`` samples on ``[lo, hi]``.

    ``half_period = 1`` gives the grid-scale alternation ``(-1)^k``.
    """
    g = spec.grid()
    k = np.arange(g.n)
    vals = np.where((k // half_period) % 2 == 0, 1.0, -1.0)
    x = g.x
    vals = np.where((x > lo) & (x < hi), vals, 0.0)
    return g.with_values(vals)


def unit(u: GridFunction1D) -> GridFunction1D:
    r = norm(u, NormKind.L2)
    if r == 0:
        raise ValueError("cannot normalize the zero state")
    return u * (1.0 / r)


def seed_states(spec: TranslateMult, count_random: int = 16, seed: int = 0x5EED) -> List[GridFunction1D]:
    """Unit seeds: node spikes, the bump, sawtooth states and random states on [-a, a]."""
    g = spec.grid()
    x = g.x
    a = spec.bump.a
    seeds = []
    for x0 in (0.0, -0.5 * a, 0.5 * a):
        v = np.zeros(g.n)
        v[int(np.argmin(np.abs(x - x0)))] = 1.0
        seeds.append(g.with_values(v))
    seeds.append(g.with_values(spec.chi()))
    for hp in (1, 5, 50):
        seeds.append(sawtooth(spec, hp, -a, a))
    rng = np.random.default_rng(seed)
    inside = np.abs(x) < a
    for _ in range(count_random):
        v = np.zeros(g.n)
        v[inside] = rng.standard_normal(int(inside.sum()))
        seeds.append(g.with_values(v))
    return [unit(s) for s in seeds]
