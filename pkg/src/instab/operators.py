"""Linear operators used as linearizations.

Weighted shifts ``L = M S`` on truncated sequences, diagonal (multiplication)
operators standing in for normal operators, their spectral radii, approximate
eigenvectors and the modulus-threshold splitting of a diagonal operator.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np

from .errors import EmptyUnstable, TruncationOverflow
from .spaces import GridFunction1D, SeqVector


class WeightKind(str, Enum):
    LOG_SPECIAL = "log_special"
    CONSTANT = "constant"
    TABLE = "table"


@dataclass(frozen=True)
class WeightSeq:
    """Nonincreasing weights ``m_0, m_1, ...`` of the multiplication operator M.

    ``LOG_SPECIAL`` is ``m_k = 1 + 1/ln(k + 2)``; ``CONSTANT`` is ``m_k = c``;
    ``TABLE`` lists ``m_0 .. m_{K-1}`` and repeats the last entry afterwards.
    """

    kind: WeightKind = WeightKind.LOG_SPECIAL
    c: float = 1.0
    table: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", WeightKind(self.kind))
        object.__setattr__(self, "table", tuple(float(t) for t in self.table))
        if self.kind is WeightKind.CONSTANT and not 0.0 < self.c <= 2.0:
            raise ValueError("constant weight must lie in (0, 2]")
        if self.kind is WeightKind.TABLE:
            t = np.asarray(self.table)
            if t.size < 2:
                raise ValueError("weight table needs at least m_0 and m_1")
            if np.any(np.diff(t) > 0):
                raise ValueError("weight table must be nonincreasing")
            if t[1] > 2.0 or t[-1] < 1.0:
                raise ValueError("weight table needs m_1 <= 2 and entries >= 1")

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(k)
        if self.kind is WeightKind.LOG_SPECIAL:
            return 1.0 + 1.0 / np.log(k + 2.0)
        if self.kind is WeightKind.CONSTANT:
            return np.full(k.shape, self.c)
        t = np.asarray(self.table)
        return t[np.minimum(k, t.size - 1)]

    def to_config(self) -> dict:
        if self.kind is WeightKind.CONSTANT:
            return {"kind": "constant", "c": self.c}
        if self.kind is WeightKind.TABLE:
            return {"kind": "table", "table": list(self.table)}
        return {"kind": "log_special"}

    @classmethod
    def from_config(cls, cfg: dict) -> "WeightSeq":
        kind = WeightKind(cfg["kind"])
        if kind is WeightKind.CONSTANT:
            return cls(kind, c=float(cfg["c"]))
        if kind is WeightKind.TABLE:
            return cls(kind, table=tuple(cfg["table"]))
        return cls(kind)


@dataclass(frozen=True)
class WeightedShift:
    """The operator ``L = M S``: ``(Lu)^k = m_k u^{k-1}``, ``(Lu)^0 = 0``."""

    weights: WeightSeq = WeightSeq()

    def apply(self, u: SeqVector) -> SeqVector:
        return apply_weighted_shift(self, u)


@dataclass(frozen=True, eq=False)
class DiagonalOperator:
    """Multiplication by ``weights`` (entrywise, or pointwise on a grid)."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or not np.all(np.isfinite(w)):
            raise ValueError("weights must be a nonempty finite 1-D array")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_function(cls, f, grid: GridFunction1D) -> "DiagonalOperator":
        """Multiplication operator sampling ``f`` on the nodes of ``grid``."""
        return cls(f(grid.x))

    @property
    def N(self) -> int:
        return self.weights.size

    def apply(self, u):
        if isinstance(u, SeqVector):
            return SeqVector(self._mul(u.values))
        if isinstance(u, GridFunction1D):
            return u.with_values(self._mul(u.values))
        return self._mul(np.asarray(u, dtype=float))

    def _mul(self, vals: np.ndarray) -> np.ndarray:
        if vals.shape[-1] != self.N:
            raise ValueError(f"operator of size {self.N} applied to length {vals.shape[-1]}")
        return self.weights * vals

    def to_json(self) -> str:
        return json.dumps({"weights": self.weights.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "DiagonalOperator":
        return cls(json.loads(text)["weights"])


def apply_weighted_shift(op: WeightedShift, u: SeqVector) -> SeqVector:
    if u.values[-1] != 0.0:
        raise TruncationOverflow(
            f"last entry of a length-{u.N} vector is nonzero; the shift would leave the truncation")
    out = np.zeros(u.N)
    out[1:] = op.weights(np.arange(1, u.N)) * u.values[:-1]
    return SeqVector(out)


def power_norm_on_e0(op: WeightedShift, n: int) -> float:
    """``|(MS)^n e_0|`` computed by iteration and by the product of weights.

    The two routes must agree to relative 1e-12; the product is returned.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return 1.0
    u = SeqVector.basis(0, n + 2)
    for _ in range(n):
        u = apply_weighted_shift(op, u)
    iterated = float(np.linalg.norm(u.values))
    product = float(np.prod(op.weights(np.arange(1, n + 1))))
    if not math.isclose(iterated, product, rel_tol=1e-12):
        raise ArithmeticError(f"iterated {iterated!r} and product {product!r} disagree")
    return product


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    status: str  # "EXACT" or "ESTIMATE"

    def __float__(self):
        return self.value


def spectral_radius(op: Union[DiagonalOperator, WeightedShift], n: int = 10_000) -> RadiusEstimate:
    """Spectral radius; exact for diagonal operators, Gelfand estimate for shifts.

    For a weighted shift the estimate ``|(MS)^n e_0|^(1/n)`` is formed from the
    log of the weight product, which avoids overflow at large ``n``.
    """
    if isinstance(op, DiagonalOperator):
        return RadiusEstimate(float(np.max(np.abs(op.weights))), "EXACT")
    logs = np.log(op.weights(np.arange(1, n + 1)))
    return RadiusEstimate(float(np.exp(logs.sum() / n)), "ESTIMATE")


def approx_eigenvector(op: DiagonalOperator, nu: float, probe_n: int = 100) -> Tuple[int, float]:
    """Basis index ``k`` with ``|lambda_k| = r(L)`` and its eigenvalue.

    ``e_k`` is an exact eigenvector, so ``|(L - lambda) e_k| = 0 <= nu``.  The
    factorization bound ``|(L^n - lambda^n) e_k| <= nu n r^(n-1)`` is checked
    for ``n = 1 .. probe_n``.
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    k = int(np.argmax(np.abs(op.weights)))
    lam = float(op.weights[k])
    e = np.zeros(op.N)
    e[k] = 1.0
    defect = float(np.linalg.norm(op.weights * e - lam * e))
    if defect > nu:
        raise ArithmeticError("basis vector is not an approximate eigenvector")
    worst = power_defect_slack(op, e, lam, nu, probe_n)
    if worst < 0:
        raise ArithmeticError(f"factorization bound violated (slack {worst})")
    return k, lam


def cluster_eigenvector(op: DiagonalOperator, nu: float, rng=None) -> Tuple[np.ndarray, float]:
    """Unit vector spread over all indices with ``|lambda_j - lambda| <= nu``.

    Unlike a basis vector this is generally not an exact eigenvector, so the
    defect ``|(L - lambda) v|`` is nonzero but still at most ``nu``.
    """
    k = int(np.argmax(np.abs(op.weights)))
    lam = float(op.weights[k])
    near = np.flatnonzero(np.abs(op.weights - lam) <= nu)
    rng = np.random.default_rng(0x5EED) if rng is None else rng
    v = np.zeros(op.N)
    v[near] = rng.standard_normal(near.size)
    return v / np.linalg.norm(v), lam


def power_defect_slack(op: DiagonalOperator, v: np.ndarray, lam: float, nu: float,
                       probe_n: int) -> float:
    """Smallest relative slack of ``|(L^n - lam^n) v| <= nu n r^(n-1)`` over n."""
    r = float(np.max(np.abs(op.weights)))
    w = np.asarray(op.weights)
    worst = math.inf
    for n in range(1, probe_n + 1):
        lhs = float(np.linalg.norm((w ** n - lam ** n) * v))
        rhs = nu * n * r ** (n - 1)
        worst = min(worst, (rhs - lhs) / rhs if rhs > 0 else -lhs)
    return worst


@dataclass(frozen=True)
class SpectralSplit:
    rho: float
    hi_indices: np.ndarray
    lo_indices: np.ndarray

    def restrict(self, op: DiagonalOperator) -> Tuple[DiagonalOperator, DiagonalOperator]:
        """Restrictions ``L1`` (to ``|lambda| >= rho``) and ``L2`` (the rest)."""
        lo = op.weights[self.lo_indices] if self.lo_indices.size else np.zeros(1)
        return DiagonalOperator(op.weights[self.hi_indices]), DiagonalOperator(lo)

    def project(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        u = np.asarray(u, dtype=float)
        w = u[self.lo_indices] if self.lo_indices.size else np.zeros(1)
        return u[self.hi_indices], w


def spectral_split(op: DiagonalOperator, rho: float) -> SpectralSplit:
    if not rho > 1:
        raise ValueError("threshold rho must exceed 1")
    mod = np.abs(op.weights)
    hi = np.flatnonzero(mod >= rho)
    if hi.size == 0:
        raise EmptyUnstable(f"no weight reaches modulus {rho}")
    return SpectralSplit(float(rho), hi, np.flatnonzero(mod < rho))


def weights_sampling(lo: float, hi: float, count: int) -> DiagonalOperator:
    """Diagonal operator whose weights sample [lo, hi] uniformly."""
    return DiagonalOperator(np.linspace(lo, hi, count))


def random_unit_states(N: int, count: int, seed: int = 0x5EED) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((count, N))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def operator_norm_probe(op: DiagonalOperator, states: Sequence[np.ndarray]) -> float:
    """Largest ``|Lu|/|u|`` over the given states."""
    s = np.atleast_2d(np.asarray(states, dtype=float))
    return float(np.max(np.linalg.norm(s * op.weights, axis=1) / np.linalg.norm(s, axis=1)))
