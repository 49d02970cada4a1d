"""Scalar map ``u -> rho u - alpha(|u|) u``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..spaces import NormKind
from ..theory.alpha import AlphaProfile
from .base import MapSpec, MapTag


@dataclass(frozen=True)
class ScalarAlpha(MapSpec):
    """States are Python floats; the norm is the absolute value."""

    rho: float = 2.0
    alpha: AlphaProfile = field(default_factory=AlphaProfile.zero)

    norm_kind = NormKind.SUP

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    @property
    def tag(self) -> MapTag:
        return MapTag.SCALAR_ALPHA

    def apply(self, u: float) -> float:
        return self.rho * u - float(self.alpha(abs(u))) * u

    def linearized_apply(self, u: float) -> float:
        return self.rho * u

    def remainder(self, u: float) -> float:
        return -float(self.alpha(abs(u))) * u

    def zero(self) -> float:
        return 0.0

    def norm(self, u) -> float:
        return abs(float(u))

    def to_config(self) -> dict:
        return {"tag": self.tag.value, "rho": self.rho, "alpha": self.alpha.to_config()}


def closed_form(spec: ScalarAlpha, orbit: np.ndarray) -> np.ndarray:
    """``rho^n u_0 prod_{k<n} (1 - alpha(|u_k|)/rho)`` evaluated along a computed orbit.

    The product is accumulated as a running product, so entry ``n`` uses
    exactly the factors ``k < n``.
    """
    orbit = np.asarray(orbit, dtype=float)
    factors = 1.0 - np.asarray(spec.alpha(np.abs(orbit[:-1])), dtype=float) / spec.rho
    out = np.empty_like(orbit)
    out[0] = orbit[0]
    out[1:] = orbit[0] * np.cumprod(spec.rho * factors)
    return out
