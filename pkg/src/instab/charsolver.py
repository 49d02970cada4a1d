"""Characteristics solver for ``u_t + ((-x + u^2) u)_x = 0`` on [-1, 0].

For nondecreasing data with ``u_0(-1) = 0`` the characteristic from ``x0``
is ``X(t) = e^-t (x0 + u_0(x0)^2 (e^{3t} - 1))`` and carries the value
``e^t u_0(x0)``.  The map ``x0 -> X(t)`` is strictly increasing, so the
solution at time ``t`` is found by inverting it with bisection.  The
linearized equation ``v_t - (x v)_x = 0`` has the explicit solution
``e^t v_0(e^t x)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .maps.base import MapSpec
from .report import BoundReport, upper
from .spaces import GridFunction1D, NormKind

BISECTION_TOL = 1e-12
C_DECAY = (1.0 - math.exp(-3.0)) ** -0.5


@dataclass(frozen=True, eq=False)
class MonotoneInitialData:
    """A nondecreasing grid function on [-1, 0] vanishing at -1.

    Between grid nodes it is evaluated by linear interpolation, which keeps
    it nondecreasing.
    """

    f: GridFunction1D

    def __post_init__(self):
        f = self.f
        if f.lo != -1.0 or f.hi != 0.0:
            raise ValueError("initial data must live on [-1, 0]")
        if f.values[0] != 0.0:
            raise ValueError("initial data must vanish at x = -1")
        if np.any(np.diff(f.values) < 0):
            raise ValueError("initial data must be nondecreasing")

    @classmethod
    def from_function(cls, g, n: int = 4097) -> "MonotoneInitialData":
        return cls(GridFunction1D.c00(g, n))

    def __call__(self, x):
        return np.interp(x, self.f.x, self.f.values)

    @property
    def sup(self) -> float:
        return float(self.f.values[-1])

    def scaled(self, lam: float) -> "MonotoneInitialData":
        return MonotoneInitialData(self.f * lam)


@dataclass(frozen=True)
class CharacteristicRecord:
    x0: float
    t: float
    X: float
    u_along: float


def _check_x0(x0) -> None:
    x0 = np.asarray(x0)
    if np.any(x0 < -1.0) or np.any(x0 > 0.0):
        raise ValueError("x0 must lie in [-1, 0]")


def characteristic_position(x0: float, t: float, u0: MonotoneInitialData) -> CharacteristicRecord:
    _check_x0(x0)
    if t < 0:
        raise ValueError("t must be nonnegative")
    a = float(u0(x0))
    X = math.exp(-t) * (x0 + a * a * math.expm1(3.0 * t))
    return CharacteristicRecord(float(x0), float(t), X, math.exp(t) * a)


def rk4_characteristics(x0: np.ndarray, t: float, u0: MonotoneInitialData,
                        steps: int = 20_000) -> np.ndarray:
    """Integrate ``X' = -X + 3 (e^s u_0(x0))^2`` from ``X(0) = x0`` with classical RK4.

    An independent check on the closed-form characteristics.
    """
    _check_x0(x0)
    x0 = np.asarray(x0, dtype=float)
    a2 = 3.0 * u0(x0) ** 2
    h = t / steps

    def rhs(s, X):
        return -X + a2 * math.exp(2.0 * s)

    X = x0.copy()
    s = 0.0
    for _ in range(steps):
        k1 = rhs(s, X)
        k2 = rhs(s + h / 2, X + h / 2 * k1)
        k3 = rhs(s + h / 2, X + h / 2 * k2)
        k4 = rhs(s + h, X + h * k3)
        X = X + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        s += h
    return X


def foot_points(u0: MonotoneInitialData, t: float, xs: np.ndarray) -> np.ndarray:
    """``x0`` with ``X(t; x0) = x`` for each ``x`` in ``[-e^-t, 0]`` (NaN elsewhere).

    Vectorized bisection on ``x0 + u_0(x0)^2 (e^{3t} - 1) = e^t x``, run in
    ``y = 1 + x0`` to relative width BISECTION_TOL, so feet close to ``-1``
    (large ``t``) keep their relative accuracy.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    xs = np.asarray(xs, dtype=float)
    target = math.exp(t) * xs
    grow = math.expm1(3.0 * t)
    inside = target >= -1.0
    lo = np.zeros(xs.shape)
    hi = np.ones(xs.shape)

    def g(y):
        return (y - 1.0) + u0(y - 1.0) ** 2 * grow - target

    if np.any(g(hi)[inside] < 0):
        raise ArithmeticError("bisection bracket does not contain a root")
    for _ in range(2000):
        active = inside & ((hi - lo) > BISECTION_TOL * hi)
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        stuck = (mid <= lo) | (mid >= hi)
        if np.all(stuck[active]):
            break
        right = g(mid) >= 0
        hi = np.where(active & right, mid, hi)
        lo = np.where(active & ~right, mid, lo)
    out = 0.5 * (lo + hi) - 1.0
    return np.where(inside, out, np.nan)


def solve_at_time(u0: MonotoneInitialData, t: float, xs: Optional[np.ndarray] = None) -> GridFunction1D:
    """Solution at time ``t`` on the grid ``xs`` (default: the grid of ``u0``)."""
    xs = u0.f.x if xs is None else np.asarray(xs, dtype=float)
    x0 = foot_points(u0, t, xs)
    vals = np.where(np.isnan(x0), 0.0, math.exp(t) * u0(np.nan_to_num(x0, nan=-1.0)))
    out = GridFunction1D(float(xs[0]), float(xs[-1]), vals)
    if np.any(np.diff(vals) < 0):
        raise ArithmeticError("solution left the monotone cone")
    return out


def linearized_at_time(u0: MonotoneInitialData, t: float, xs: Optional[np.ndarray] = None) -> GridFunction1D:
    """``e^t u_0(e^t x)`` on ``[-e^-t, 0]`` and zero to the left."""
    if not t > 0:
        raise ValueError("t must be positive")
    xs = u0.f.x if xs is None else np.asarray(xs, dtype=float)
    y = math.exp(t) * xs
    vals = np.where(y >= -1.0, math.exp(t) * u0(np.maximum(y, -1.0)), 0.0)
    return GridFunction1D(float(xs[0]), float(xs[-1]), vals)


@dataclass(frozen=True)
class GateauxTable:
    lambdas: np.ndarray
    errors: np.ndarray

    def slope(self) -> float:
        """Least-squares slope of ``log(error)`` against ``log(lambda)``."""
        return float(np.polyfit(np.log(self.lambdas), np.log(self.errors), 1)[0])

    def to_csv(self) -> str:
        rows = ["lambda,sup_error"] + [f"{l!r},{e!r}" for l, e in
                                       zip(self.lambdas.tolist(), self.errors.tolist())]
        return "\n".join(rows) + "\n"


def gateaux_limit_experiment(u0: MonotoneInitialData, t: float, lambdas: Sequence[float],
                             xs: Optional[np.ndarray] = None) -> GateauxTable:
    """``sup |lam^-1 u[lam u_0](t) - v(t)|`` with ``v`` the linearized solution."""
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas <= 0) or np.any(lambdas > 1):
        raise ValueError("lambdas must lie in (0, 1]")
    lin = linearized_at_time(u0, t, xs).values
    errs = []
    for lam in lambdas:
        nl = solve_at_time(u0.scaled(lam), t, xs).values / lam
        errs.append(float(np.max(np.abs(nl - lin))))
    return GateauxTable(lambdas, np.asarray(errs))


def decay_bound(t: float, alpha: float, sup0: float) -> float:
    """``C^(1-a) e^((3a-1)t/2) |u_0|^a`` with ``C = (1 - e^-3)^(-1/2)``."""
    return C_DECAY ** (1.0 - alpha) * math.exp((3.0 * alpha - 1.0) * t / 2.0) * sup0 ** alpha


def decay_bound_check(u0: MonotoneInitialData, ts: Sequence[float], alpha: float,
                      experiment: str = "decay") -> BoundReport:
    """Compare ``|u(., t)|_inf`` with the interpolated decay bound for ``t >= 1``.

    Solutions are nondecreasing, so the sup norm is the value at ``x = 0``,
    which is computed exactly through its foot point.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    checks = []
    for t in ts:
        if t < 1:
            raise ValueError("the decay bound is stated for t >= 1")
        x0 = foot_points(u0, t, np.array([0.0]))[0]
        sup_t = math.exp(t) * float(u0(x0))
        checks.append(upper(f"sup_alpha={alpha}", t, sup_t, decay_bound(t, alpha, u0.sup)))
    return BoundReport.build(experiment, checks)


class TimeOneMap(MapSpec):
    """The time-``dt`` solution map on nondecreasing grid functions, as a map."""

    norm_kind = NormKind.SUP

    def __init__(self, dt: float = 1.0, n: int = 4097):
        self.dt = dt
        self.n = n

    @property
    def tag(self):
        return "TIME_ONE"

    def apply(self, u: GridFunction1D) -> GridFunction1D:
        return solve_at_time(MonotoneInitialData(u), self.dt)

    def linearized_apply(self, u: GridFunction1D) -> GridFunction1D:
        return linearized_at_time(MonotoneInitialData(u), self.dt)

    def zero(self) -> GridFunction1D:
        return GridFunction1D.zeros(-1.0, 0.0, self.n)

    def to_config(self) -> dict:
        return {"tag": "TIME_ONE", "dt": self.dt, "n": self.n}


def cone_examples(n: int = 4097) -> Tuple[Tuple[str, MonotoneInitialData], ...]:
    """Five members of the monotone cone used in experiments."""
    fns = (
        ("half_ramp", lambda x: (1 + x) / 2),
        ("square", lambda x: (1 + x) ** 2),
        ("sqrt", lambda x: np.sqrt(np.maximum(1 + x, 0.0))),
        ("late_ramp", lambda x: 2 * np.maximum(x + 0.5, 0.0)),
        ("smooth_step", lambda x: 0.3 * (1 - np.cos(np.pi * (1 + x))) / 2),
    )
    return tuple((name, MonotoneInitialData.from_function(f, n)) for name, f in fns)
