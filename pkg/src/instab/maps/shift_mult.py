"""Damped weighted shift on truncated square-summable sequences."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import TruncationOverflow
from ..operators import WeightedShift, WeightSeq, apply_weighted_shift
from ..spaces import NormKind, SeqVector
from .base import MapSpec, MapTag


@dataclass(frozen=True)
class ShiftMult(MapSpec):
    """``F(u) = (1 - |u|^p) M S u`` with linearization ``L = M S``."""

    p: float = 1.0
    weights: WeightSeq = field(default_factory=WeightSeq)

    norm_kind = NormKind.SEQ_L2

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError("exponent p must be positive")

    @property
    def tag(self) -> MapTag:
        return MapTag.SHIFT_MULT

    @property
    def operator(self) -> WeightedShift:
        return WeightedShift(self.weights)

    def apply(self, u: SeqVector) -> SeqVector:
        damp = 1.0 - float(np.linalg.norm(u.values)) ** self.p
        return apply_weighted_shift(self.operator, u) * damp

    def linearized_apply(self, u: SeqVector) -> SeqVector:
        return apply_weighted_shift(self.operator, u)

    def remainder(self, u: SeqVector) -> SeqVector:
        return apply_weighted_shift(self.operator, u) * -(float(np.linalg.norm(u.values)) ** self.p)

    def zero(self, N: int = 16) -> SeqVector:
        return SeqVector.zeros(N)

    def to_config(self) -> dict:
        return {"tag": self.tag.value, "p": self.p, "weights": self.weights.to_config()}

    def band_norms(self, seeds: np.ndarray, steps: int) -> np.ndarray:
        """Norms ``|u_n|`` for ``n = 0..steps`` for a batch of seeds.

        ``seeds`` has shape ``(S, K)``: each row lists ``u_0^0 .. u_0^{K-1}``.
        After ``n`` steps the support of ``u_n`` lies in indices ``n .. n+K-1``,
        so only that band is stored; the arithmetic is the same as repeated
        :meth:`apply` on a long enough truncation.
        """
        band = np.array(seeds, dtype=float, copy=True)
        S, K = band.shape
        out = np.empty((S, steps + 1))
        offs = np.arange(K)
        for n in range(steps + 1):
            nrm = np.linalg.norm(band, axis=1)
            out[:, n] = nrm
            if n == steps:
                break
            damp = 1.0 - nrm ** self.p
            # new band starts at index n+1: entry j holds m_{n+1+j} * u_n^{n+j}
            band = (damp[:, None] * self.weights(n + 1 + offs)[None, :]) * band
        return out


def stability_threshold(p: float, weights: WeightSeq, eps: float, n_max: int = 10 ** 7):
    """``(N, delta_max)`` for the stability argument at level ``eps``.

    ``N`` is the least index with ``m_N (1 - eps^p / 2^p) < 1``: once
    ``|u_n| >= eps/2`` the damping beats every weight from index ``N`` on.
    Starting below ``delta_max = eps / (2 prod_{k=1}^{N} m_k)`` the first
    ``N`` steps cannot leave the ball of radius ``eps/2``.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    damp = 1.0 - (eps / 2.0) ** p
    # m_k decreases to 1, so search from a lower bound when the weights are known
    start = 1
    if weights.kind.value == "log_special":
        t = 1.0 / (1.0 / damp - 1.0)
        if t > math.log(n_max):
            raise ValueError("no admissible N below the search limit")
        start = max(1, int(math.floor(math.exp(t))) - 3)
    k = np.arange(start, start + 4096)
    while True:
        hit = np.flatnonzero(weights(k) * damp < 1.0)
        if hit.size:
            N = int(k[hit[0]])
            break
        if k[0] > n_max:
            raise ValueError("no admissible N below the search limit")
        k = k + 4096
    with np.errstate(over="ignore"):
        prod = float(np.prod(weights(np.arange(1, N + 1))))
    return N, eps / (2.0 * prod)


def overflow_guard(u: SeqVector) -> None:
    if u.values[-1] != 0.0:
        raise TruncationOverflow("sequence support reached the truncation length")
