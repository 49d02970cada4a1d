"""Remainder profiles ``alpha`` and the integrability test for alpha(s)/s.

An :class:`AlphaProfile` is a nondecreasing function with ``alpha(0+) = 0``
bounding the nonlinear remainder ``|F(u) - Lu| <= alpha(|u|) |u|``.  The
quantity that decides everything downstream is

    I(a) = integral_0^a alpha(s)/s ds.

After the substitution ``s = exp(-t)`` this is ``integral_{t_a}^inf
alpha(exp(-t)) dt``, which is how every profile is evaluated internally: the
log variable stays representable at depths where ``s`` itself underflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

# Convergence-detection constants.
DEPTH = 200               # number of dyadic slices s_k = a 2^-k examined
CONVERGENT_RATIO = 0.999  # block ratio strictly below this => CONVERGENT
DIVERGENT_RATIO = 1.0 - 1e-6  # block ratios at or above this => DIVERGENT

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


class AlphaKind(str, Enum):
    POWER = "power"
    LOG = "log"
    TABLE = "table"


class IntegralStatus(str, Enum):
    CONVERGENT = "CONVERGENT"
    DIVERGENT = "DIVERGENT"
    AMBIGUOUS = "AMBIGUOUS"


@dataclass(frozen=True)
class AlphaProfile:
    """``POWER``: ``b s^p``; ``LOG``: ``|ln s|^-gamma``; ``TABLE``: tabulated.

    ``a`` is the validity radius; beyond it the profile is held constant at
    ``alpha(a)``, which keeps it nondecreasing.  A ``TABLE`` profile is
    piecewise a power law between its nodes (linear in ``ln s`` instead when
    some tabulated value is zero) and, below the smallest node, continues as
    the power law through its two smallest nodes (constant if that power is
    not positive).
    """

    kind: AlphaKind
    a: float
    b: float = 1.0
    p: float = 1.0
    gamma: float = 1.0
    table_s: Tuple[float, ...] = ()
    table_alpha: Tuple[float, ...] = ()
    _tail_power: float = field(default=0.0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", AlphaKind(self.kind))
        if not self.a > 0:
            raise ValueError("validity radius must be positive")
        if self.kind is AlphaKind.LOG and not self.a < 1:
            raise ValueError("log profile needs a < 1")
        if self.kind is AlphaKind.POWER and (self.b < 0 or self.p <= 0):
            raise ValueError("power profile needs b >= 0 and p > 0")
        if self.kind is AlphaKind.LOG and self.gamma <= 0:
            raise ValueError("log profile needs gamma > 0")
        if self.kind is AlphaKind.TABLE:
            s = np.asarray(self.table_s, dtype=float)
            al = np.asarray(self.table_alpha, dtype=float)
            if s.size < 2 or s.size != al.size:
                raise ValueError("table needs matching s and alpha columns of length >= 2")
            if np.any(np.diff(s) <= 0) or s[0] <= 0:
                raise ValueError("table radii must be positive and increasing")
            if np.any(np.diff(al) < 0) or al[0] < 0:
                raise ValueError("tabulated alpha must be nonnegative and nondecreasing")
            object.__setattr__(self, "table_s", tuple(s.tolist()))
            object.__setattr__(self, "table_alpha", tuple(al.tolist()))
            tail = 0.0
            if al[0] > 0 and al[1] > al[0]:
                tail = math.log(al[1] / al[0]) / math.log(s[1] / s[0])
            object.__setattr__(self, "_tail_power", tail)

    # constructors
    @classmethod
    def power(cls, b: float, p: float, a: float = 1.0) -> "AlphaProfile":
        return cls(AlphaKind.POWER, a, b=b, p=p)

    @classmethod
    def log(cls, gamma: float, a: float = math.exp(-1.0)) -> "AlphaProfile":
        return cls(AlphaKind.LOG, a, gamma=gamma)

    @classmethod
    def table(cls, s, alpha, a: Optional[float] = None) -> "AlphaProfile":
        s = tuple(float(x) for x in s)
        return cls(AlphaKind.TABLE, s[-1] if a is None else a,
                   table_s=s, table_alpha=tuple(float(x) for x in alpha))

    @classmethod
    def zero(cls, a: float = 1.0) -> "AlphaProfile":
        return cls(AlphaKind.POWER, a, b=0.0, p=1.0)

    @property
    def is_zero(self) -> bool:
        return self.kind is AlphaKind.POWER and self.b == 0.0

    def at_log(self, t) -> np.ndarray:
        """``alpha(exp(-t))``, evaluated without forming ``exp(-t)``."""
        t = np.maximum(np.asarray(t, dtype=float), -math.log(self.a))
        if self.kind is AlphaKind.POWER:
            return self.b * np.exp(-self.p * t)
        if self.kind is AlphaKind.LOG:
            return t ** (-self.gamma)
        ls = -np.log(np.asarray(self.table_s))[::-1]   # increasing in t
        al = np.asarray(self.table_alpha)[::-1]
        if np.all(al > 0):
            out = np.exp(np.interp(t, ls, np.log(al)))
        else:
            out = np.interp(t, ls, al)
        deep = t > ls[-1]
        if np.any(deep):
            out = np.where(deep, al[-1] * np.exp(-self._tail_power * (t - ls[-1])), out)
        return out

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        with np.errstate(divide="ignore"):
            t = -np.log(s)
        out = np.where(s > 0, self.at_log(np.where(s > 0, t, 0.0)), 0.0)
        return float(out) if out.ndim == 0 else out

    def analytic_integral(self, x: float) -> Optional[float]:
        """Closed form of ``integral_0^x alpha(s)/s ds`` for ``x <= a``; None for tables."""
        if x <= 0:
            return 0.0
        if self.kind is AlphaKind.POWER:
            return self.b * x ** self.p / self.p
        if self.kind is AlphaKind.LOG:
            if self.gamma <= 1:
                return math.inf
            return (-math.log(x)) ** (1.0 - self.gamma) / (self.gamma - 1.0)
        return None

    def analytic_status(self) -> Optional[IntegralStatus]:
        if self.kind is AlphaKind.POWER:
            return IntegralStatus.CONVERGENT
        if self.kind is AlphaKind.LOG:
            return IntegralStatus.CONVERGENT if self.gamma > 1 else IntegralStatus.DIVERGENT
        return None

    def to_config(self) -> dict:
        if self.kind is AlphaKind.POWER:
            return {"kind": "power", "b": self.b, "p": self.p, "a": self.a}
        if self.kind is AlphaKind.LOG:
            return {"kind": "log", "gamma": self.gamma, "a": self.a}
        return {"kind": "table", "s": list(self.table_s), "alpha": list(self.table_alpha),
                "a": self.a}

    @classmethod
    def from_config(cls, cfg: dict) -> "AlphaProfile":
        kind = AlphaKind(cfg["kind"])
        if kind is AlphaKind.POWER:
            return cls.power(float(cfg["b"]), float(cfg["p"]), float(cfg.get("a", 1.0)))
        if kind is AlphaKind.LOG:
            return cls.log(float(cfg["gamma"]), float(cfg.get("a", math.exp(-1.0))))
        return cls.table(cfg["s"], cfg["alpha"], cfg.get("a"))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    status: IntegralStatus
    numeric_status: IntegralStatus
    quadrature: float          # partial sum over the examined slices plus tail estimate
    block_ratios: Tuple[float, ...]


def slice_contributions(alpha: AlphaProfile, a: float, depth: int = DEPTH) -> np.ndarray:
    """``c_k = integral over [a 2^-(k+1), a 2^-k] of alpha(s)/s ds``, k < depth.

    Each slice is a unit of length ln 2 in the log variable and is integrated
    with 16-point Gauss-Legendre.
    """
    t0 = -math.log(a)
    h = math.log(2.0)
    left = t0 + h * np.arange(depth)
    nodes = left[:, None] + 0.5 * h * (_GL_NODES[None, :] + 1.0)
    return 0.5 * h * (alpha.at_log(nodes) @ _GL_WEIGHTS)


def _block_ratios(c: np.ndarray) -> Tuple[float, ...]:
    """Ratios of sums over successive depth-doubling blocks of slices.

    A tail decaying like ``k^-q`` gives ratios near ``2^(1-q)``, so the tail is
    summable exactly when the ratio settles below one; geometric decay gives
    ratios near zero.
    """
    depth = c.size
    edges = [depth // 8, depth // 4, depth // 2, depth]
    blocks = [float(c[edges[i]:edges[i + 1]].sum()) for i in range(3)]
    ratios = []
    for prev, nxt in zip(blocks[:-1], blocks[1:]):
        ratios.append(0.0 if prev == 0.0 else nxt / prev)
    return tuple(ratios)


def classify_slices(c: np.ndarray) -> Tuple[IntegralStatus, Tuple[float, ...]]:
    ratios = _block_ratios(c)
    if ratios[-1] < CONVERGENT_RATIO:
        return IntegralStatus.CONVERGENT, ratios
    if all(r >= DIVERGENT_RATIO for r in ratios):
        return IntegralStatus.DIVERGENT, ratios
    return IntegralStatus.AMBIGUOUS, ratios


def integral_alpha_over_s(alpha: AlphaProfile, a: Optional[float] = None,
                          depth: int = DEPTH) -> IntegralResult:
    """Value and convergence verdict for ``integral_0^a alpha(s)/s ds``.

    The verdict comes from dyadic slices ``s_k = a 2^-k``; for POWER and LOG
    profiles the closed form overrides it, and a numeric verdict that
    contradicts the closed form (one says CONVERGENT, the other DIVERGENT) is
    an internal error.  For convergent TABLE profiles the value is computed by
    adaptive quadrature of the log-substituted integrand.
    """
    a = alpha.a if a is None else a
    if not 0 < a <= alpha.a * (1 + 1e-12):
        raise ValueError("integration radius must lie in (0, alpha.a]")
    c = slice_contributions(alpha, a, depth)
    numeric, ratios = classify_slices(c)
    partial = float(c.sum())
    q = ratios[-1]
    last_block = float(c[depth // 2:].sum())
    quad_value = partial + (last_block * q / (1 - q) if q < 1 else math.inf)

    status = alpha.analytic_status() or numeric
    if alpha.analytic_status() is not None:
        opposite = {IntegralStatus.CONVERGENT: IntegralStatus.DIVERGENT,
                    IntegralStatus.DIVERGENT: IntegralStatus.CONVERGENT}
        if numeric is opposite[status]:
            raise ArithmeticError(f"slice test says {numeric.value}, closed form says {status.value}")
        value = alpha.analytic_integral(a)
    elif status is IntegralStatus.CONVERGENT:
        value = log_quad(alpha, a)
    elif status is IntegralStatus.DIVERGENT:
        value = math.inf
    else:
        value = math.nan
    return IntegralResult(value, status, numeric, quad_value, ratios)


def log_quad(alpha: AlphaProfile, a: float) -> float:
    """Adaptive quadrature of ``integral_{-ln a}^inf alpha(exp(-t)) dt``."""
    val, _ = integrate.quad(lambda t: float(alpha.at_log(t)), -math.log(a), math.inf,
                            limit=500, epsabs=0.0, epsrel=1e-11)
    return float(val)


def integral_upto(alpha: AlphaProfile, x: float) -> float:
    """``integral_0^x alpha(s)/s ds`` for a convergent profile (closed form when known)."""
    if x <= 0:
        return 0.0
    if x > alpha.a:
        # constant continuation beyond the validity radius
        return integral_upto(alpha, alpha.a) + float(alpha(alpha.a)) * math.log(x / alpha.a)
    exact = alpha.analytic_integral(x)
    if exact is not None:
        return exact
    return log_quad(alpha, x)
