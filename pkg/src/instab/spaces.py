"""State representations, norms and elementary transforms.

Three kinds of state are used throughout the package:

* :class:`GridFunction1D` -- samples of a real function on a uniform grid,
  standing in for elements of L2(R) (on a finite window, extended by zero) or
  of C0([-1, 0]) (continuous functions vanishing at -1).  Between samples a
  state is understood as its piecewise-linear interpolant.
* :class:`SeqVector` -- a finitely supported real sequence (truncated l2).
* :class:`PlanarPoint` -- a point (v, w) of the plane.

All states are immutable; arithmetic returns new objects.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np

from .errors import IncompatibleNorm

# Fractional index offsets below this are treated as lying on a grid node.
SNAP_TOL = 1e-9


class NormKind(str, Enum):
    L2 = "L2"
    SUP = "SUP"
    H1SEMI = "H1SEMI"
    SEQ_L2 = "SEQ_L2"
    PLANAR_MIX = "PLANAR_MIX"


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError("state values must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError("state values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction1D:
    """Samples ``values[k] = f(lo + k*dx)`` with ``dx = (hi - lo)/(n - 1)``."""

    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        object.__setattr__(self, "values", _frozen_array(self.values))
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or self.hi <= self.lo:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.values.size < 2:
            raise ValueError("a grid function needs at least two samples")

    @classmethod
    def zeros(cls, lo: float, hi: float, n: int) -> "GridFunction1D":
        return cls(lo, hi, np.zeros(n))

    @classmethod
    def sample(cls, f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
               n: int) -> "GridFunction1D":
        x = np.linspace(lo, hi, n)
        return cls(lo, hi, np.broadcast_to(np.asarray(f(x), dtype=float), x.shape))

    @classmethod
    def c00(cls, f: Callable[[np.ndarray], np.ndarray], n: int = 4097) -> "GridFunction1D":
        """Sample ``f`` on [-1, 0] and pin the left endpoint to zero."""
        x = np.linspace(-1.0, 0.0, n)
        vals = np.array(np.broadcast_to(np.asarray(f(x), dtype=float), x.shape))
        vals[0] = 0.0
        return cls(-1.0, 0.0, vals)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def dx(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    @property
    def is_c00(self) -> bool:
        """True when the state is a valid element of C0([-1, 0])."""
        return self.lo == -1.0 and self.hi == 0.0 and self.values[0] == 0.0

    def with_values(self, values) -> "GridFunction1D":
        return GridFunction1D(self.lo, self.hi, values)

    def same_grid(self, other: "GridFunction1D") -> bool:
        return (self.lo, self.hi, self.n) == (other.lo, other.hi, other.n)

    def __call__(self, xq) -> np.ndarray:
        """Evaluate the piecewise-linear interpolant, extended by zero."""
        return sample_at(self, np.asarray(xq, dtype=float))

    def _binary(self, other, op):
        if isinstance(other, GridFunction1D):
            if not self.same_grid(other):
                raise ValueError("grid functions live on different grids")
            return self.with_values(op(self.values, other.values))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        if isinstance(c, GridFunction1D):
            return self._binary(c, np.multiply)
        return self.with_values(float(c) * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    # serialization
    def to_json(self) -> str:
        return json.dumps({"lo": self.lo, "hi": self.hi, "n": self.n,
                           "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "GridFunction1D":
        obj = json.loads(text)
        if len(obj["values"]) != obj["n"]:
            raise ValueError("length of values does not match n")
        return cls(obj["lo"], obj["hi"], obj["values"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for xk, vk in zip(self.x.tolist(), self.values.tolist()):
            w.writerow([repr(xk), repr(vk)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction1D":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["x", "value"]:
            raise ValueError(f"unexpected CSV header {rows[0]}")
        xs = [float(r[0]) for r in rows[1:]]
        return cls(xs[0], xs[-1], [float(r[1]) for r in rows[1:]])


@dataclass(frozen=True, eq=False)
class SeqVector:
    """Entries ``u^0 .. u^{N-1}`` of a sequence whose tail is exactly zero."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.size < 1:
            raise ValueError("truncation length must be positive")

    @classmethod
    def zeros(cls, N: int) -> "SeqVector":
        return cls(np.zeros(N))

    @classmethod
    def basis(cls, k: int, N: int) -> "SeqVector":
        e = np.zeros(N)
        e[k] = 1.0
        return cls(e)

    @property
    def N(self) -> int:
        return self.values.size

    def _binary(self, other, op):
        if isinstance(other, SeqVector):
            if other.N != self.N:
                raise ValueError("sequence vectors have different truncation lengths")
            return SeqVector(op(self.values, other.values))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __mul__(self, c):
        return SeqVector(float(c) * self.values)

    __rmul__ = __mul__

    def __neg__(self):
        return SeqVector(-self.values)

    def to_json(self) -> str:
        return json.dumps({"N": self.N, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "SeqVector":
        obj = json.loads(text)
        if len(obj["values"]) != obj["N"]:
            raise ValueError("length of values does not match N")
        return cls(obj["values"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "value"])
        for k, vk in enumerate(self.values.tolist()):
            w.writerow([k, repr(vk)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SeqVector":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["index", "value"]:
            raise ValueError(f"unexpected CSV header {rows[0]}")
        return cls([float(r[1]) for r in rows[1:]])


@dataclass(frozen=True)
class PlanarPoint:
    v: float
    w: float

    def __post_init__(self):
        object.__setattr__(self, "v", float(self.v))
        object.__setattr__(self, "w", float(self.w))
        if not (np.isfinite(self.v) and np.isfinite(self.w)):
            raise ValueError("planar point must be finite")

    def __add__(self, other):
        if not isinstance(other, PlanarPoint):
            return NotImplemented
        return PlanarPoint(self.v + other.v, self.w + other.w)

    def __sub__(self, other):
        if not isinstance(other, PlanarPoint):
            return NotImplemented
        return PlanarPoint(self.v - other.v, self.w - other.w)

    def __mul__(self, c):
        return PlanarPoint(float(c) * self.v, float(c) * self.w)

    __rmul__ = __mul__

    def __neg__(self):
        return PlanarPoint(-self.v, -self.w)


State = Union[GridFunction1D, SeqVector, PlanarPoint]

_DEFAULT_KIND = {GridFunction1D: NormKind.L2, SeqVector: NormKind.SEQ_L2,
                 PlanarPoint: NormKind.SEQ_L2}


def norm(state: State, kind: Optional[NormKind] = None) -> float:
    """Norm of a state.

    ``L2`` is the trapezoidal rule on the grid, ``H1SEMI`` the L2 norm of the
    forward difference quotients, ``SUP`` the largest absolute sample.  On a
    planar point ``SEQ_L2`` is the Euclidean norm and ``PLANAR_MIX`` the
    quantity ``v**2 + |w|`` (not a norm, but monitored like one).
    """
    if kind is None:
        kind = _DEFAULT_KIND[type(state)]
    kind = NormKind(kind)
    if isinstance(state, GridFunction1D):
        vals = state.values
        if kind is NormKind.SUP:
            return float(np.max(np.abs(vals)))
        if kind is NormKind.L2:
            scale = float(np.max(np.abs(vals)))
            if scale == 0.0:
                return 0.0
            sq = (vals / scale) ** 2
            return scale * float(np.sqrt(state.dx * (sq.sum() - 0.5 * (sq[0] + sq[-1]))))
        if kind is NormKind.H1SEMI:
            d = np.diff(vals) / state.dx
            scale = float(np.max(np.abs(d)))
            if scale == 0.0:
                return 0.0
            d = d / scale
            return scale * float(np.sqrt(state.dx * np.dot(d, d)))
    elif isinstance(state, SeqVector):
        if kind is NormKind.SEQ_L2:
            return float(np.linalg.norm(state.values))
        if kind is NormKind.SUP:
            return float(np.max(np.abs(state.values)))
    elif isinstance(state, PlanarPoint):
        if kind is NormKind.SEQ_L2:
            return float(np.hypot(state.v, state.w))
        if kind is NormKind.SUP:
            return max(abs(state.v), abs(state.w))
        if kind is NormKind.PLANAR_MIX:
            return state.v * state.v + abs(state.w)
    raise IncompatibleNorm(f"norm {kind.value} is not defined for {type(state).__name__}")


def sample_at(f: GridFunction1D, xq: np.ndarray) -> np.ndarray:
    """Values of the interpolant of ``f`` at ``xq``; zero outside [lo, hi].

    Query points within SNAP_TOL (in units of dx) of a node read that sample
    directly, so grid-aligned transforms are exact.
    """
    pos = (xq - f.lo) / f.dx
    idx = np.rint(pos)
    on_node = np.abs(pos - idx) <= SNAP_TOL
    inside = (idx >= 0) & (idx <= f.n - 1)
    out = np.interp(xq, f.x, f.values, left=0.0, right=0.0)
    hit = on_node & inside
    out[hit] = f.values[idx[hit].astype(np.intp)]
    out[on_node & ~inside] = 0.0
    return out


def translate(f: GridFunction1D, s: float) -> GridFunction1D:
    """Return ``g(x) = f(x - s)`` with extension by zero."""
    if not np.isfinite(s):
        raise ValueError("shift must be finite")
    if s == 0.0:
        return f
    return f.with_values(sample_at(f, f.x - s))


def dilate_translate(f: GridFunction1D, a: float, s: float) -> GridFunction1D:
    """Return ``g(x) = (Ef)(a*x - s)`` where E extends by zero."""
    if not a > 0:
        raise ValueError("dilation factor must be positive")
    if a == 1.0 and s == 0.0:
        return f
    return f.with_values(sample_at(f, a * f.x - s))


def support_interval(f: GridFunction1D, tol: float = 0.0) -> Optional[Tuple[float, float]]:
    """Smallest grid-aligned interval holding every sample with ``|value| > tol``.

    Returns None when no sample exceeds the tolerance.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    idx = np.flatnonzero(np.abs(f.values) > tol)
    if idx.size == 0:
        return None
    x = f.x
    return float(x[idx[0]]), float(x[idx[-1]])
