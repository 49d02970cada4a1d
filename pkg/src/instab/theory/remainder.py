"""Remainder profiles ``r -> alpha_hat(r)`` and Gateaux difference quotients."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from ..maps.base import MapSpec, ShiftKind
from ..spaces import GridFunction1D, NormKind, norm
from .alpha import AlphaProfile


@dataclass(frozen=True)
class RemainderProfile:
    """``alpha_hat[i]`` is the largest ``|F(r d) - L(r d)|/r`` over unit directions at ``radii[i]``.

    ``by_family`` keeps the same maximum restricted to each named direction
    family, and ``argmax`` the index of the maximizing direction.
    """

    radii: np.ndarray
    alpha_hat: np.ndarray
    argmax: Tuple[int, ...]
    by_family: Dict[str, np.ndarray]

    @property
    def bounded_by(self) -> float:
        """Smallest ``b`` with ``alpha_hat <= b`` on the probed radii."""
        return float(np.max(self.alpha_hat))

    def power_fit(self) -> Tuple[float, float]:
        """``(b, p)`` of the least-squares fit ``alpha_hat ~ b r^p`` (NaN when some value is 0)."""
        if np.any(self.alpha_hat <= 0) or self.radii.size < 2:
            return math.nan, math.nan
        p, lb = np.polyfit(np.log(self.radii), np.log(self.alpha_hat), 1)
        return float(math.exp(lb)), float(p)

    def envelope(self) -> AlphaProfile:
        """Nondecreasing table profile through the running maximum of ``alpha_hat``."""
        order = np.argsort(self.radii)
        r = self.radii[order]
        env = np.maximum.accumulate(self.alpha_hat[order])
        return AlphaProfile.table(r, env)

    def to_csv(self) -> str:
        fams = sorted(self.by_family)
        rows = [",".join(["r", "alpha_hat"] + [f"alpha_hat_{f}" for f in fams])]
        for i, r in enumerate(self.radii):
            vals = [repr(float(r)), repr(float(self.alpha_hat[i]))]
            vals += [repr(float(self.by_family[f][i])) for f in fams]
            rows.append(",".join(vals))
        return "\n".join(rows) + "\n"


def remainder_norm(spec: MapSpec, u) -> float:
    return spec.norm(spec.remainder(u))


def remainder_profile(spec: MapSpec, radii: Sequence[float],
                      directions: Dict[str, Sequence[Any]]) -> RemainderProfile:
    """Tabulate the normalized nonlinear defect along named families of unit directions."""
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    flat, owner = [], []
    for name, dirs in directions.items():
        for d in dirs:
            nd = spec.norm(d)
            if not math.isclose(nd, 1.0, rel_tol=1e-9):
                raise ValueError(f"direction in family {name!r} has norm {nd}, expected 1")
            flat.append(d)
            owner.append(name)
    table = np.array([[remainder_norm(spec, d * float(r)) / r for d in flat] for r in radii])
    alpha_hat = table.max(axis=1)
    by_family = {}
    for name in directions:
        cols = [i for i, o in enumerate(owner) if o == name]
        by_family[name] = table[:, cols].max(axis=1)
    return RemainderProfile(radii, alpha_hat, tuple(int(i) for i in table.argmax(axis=1)), by_family)


def gateaux_quotient(spec: MapSpec, u, lambdas: Sequence[float]) -> np.ndarray:
    """``|F(lam u)/lam - L u|`` for each ``lam``, in the map's norm."""
    if spec.norm(u) == 0:
        raise ValueError("direction must be nonzero")
    Lu = spec.linearized_apply(u)
    out = []
    for lam in lambdas:
        if not lam > 0:
            raise ValueError("lambdas must be positive")
        out.append(spec.norm(spec.apply(u * lam) * (1.0 / lam) - Lu))
    return np.asarray(out)


def xb_constant(spec, states: Sequence[GridFunction1D]) -> np.ndarray:
    """Per-state ``|F(u) - Lu| |ln|u|| / |u|_H1`` for a translate-multiply map.

    The two-norm estimate with ``X = H^1`` asks these ratios to stay bounded;
    with ``h = C/|ln s|`` and translation by ``h`` costing at most ``h |u'|``
    they are at most ``b*C`` (``b`` the bump height).
    """
    if spec.shift.kind is not ShiftKind.LOG:
        raise ValueError("the two-norm estimate is stated for logarithmic shifts")
    out = []
    for u in states:
        r = norm(u, NormKind.L2)
        if not 0 < r < 1:
            raise ValueError("states must have norm in (0, 1)")
        out.append(remainder_norm(spec, u) * abs(math.log(r)) / norm(u, NormKind.H1SEMI))
    return np.asarray(out)
