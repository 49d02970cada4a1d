"""Invariant cones ``D = {0 < |v| <= r0, |w| <= beta(|v|)}`` for product systems.

For ``v_{n+1} = L1 v_n + N1``, ``w_{n+1} = L2 w_n + N2`` with
``|L1 v| >= rho |v|``, ``|L2 w| <= rho |w|`` and ``|N1| + |N2| <= alpha(|v|) |v|``,
the cone is invariant as long as ``|v_n| <= r0`` when ``beta`` solves

    rho beta(r) + r alpha(r) <= beta(rho r - r alpha(r)),   0 <= r <= r0,

and the candidate ``beta(r) = C r int_0^r alpha(s)/s ds`` works for
``C > 1/(rho ln rho)`` and small ``r0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DivergentAlpha
from ..operators import DiagonalOperator
from ..report import BoundReport, lower, upper
from .alpha import AlphaProfile, IntegralStatus, integral_alpha_over_s, integral_upto

HINEQ_SAMPLES = 1000
GEOMETRIC_SPAN = 1e-10   # samples cover [r0 * GEOMETRIC_SPAN, r0]


@dataclass(frozen=True)
class BetaFn:
    C: float
    r0: float
    alpha: AlphaProfile

    def __call__(self, r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.array([self.C * x * integral_upto(self.alpha, x) if x > 0 else 0.0
                        for x in r_arr])
        return float(out[0]) if np.ndim(r) == 0 else out


def hineq_slack(beta: BetaFn, alpha: AlphaProfile, rho: float, r: np.ndarray) -> np.ndarray:
    """``beta(rho r - r alpha(r)) - rho beta(r) - r alpha(r)`` at each ``r``."""
    r = np.asarray(r, dtype=float)
    al = np.asarray(alpha(r), dtype=float)
    return beta(rho * r - r * al) - rho * beta(r) - r * al


def _admissible(beta: BetaFn, alpha: AlphaProfile, rho: float, r0: float, samples: int) -> bool:
    r = np.geomspace(r0 * GEOMETRIC_SPAN, r0, samples)
    if rho - float(alpha(r0)) <= 1.0:
        return False
    if np.any(beta(r) > r):
        return False
    return bool(np.all(hineq_slack(beta, alpha, rho, r) > 0))


def beta_build(alpha: AlphaProfile, rho: float, C: float, samples: int = HINEQ_SAMPLES) -> BetaFn:
    """Cone profile ``beta`` and the largest admissible ``r0`` found by halving then bisection.

    Raises DivergentAlpha when ``int_0 alpha(s)/s ds`` diverges, in which
    case no continuous nondecreasing solution exists at all.
    """
    if not rho > 1:
        raise ValueError("rho must exceed 1")
    if not C > 1.0 / (rho * math.log(rho)):
        raise ValueError("C must exceed 1/(rho ln rho)")
    res = integral_alpha_over_s(alpha)
    if res.status is not IntegralStatus.CONVERGENT:
        raise DivergentAlpha(f"no solution: integral of alpha(s)/s is {res.status.value}")
    if alpha.is_zero:
        return BetaFn(C, alpha.a, alpha)
    r0 = alpha.a
    for _ in range(200):
        if _admissible(BetaFn(C, r0, alpha), alpha, rho, r0, samples):
            break
        r0 *= 0.5
    else:
        raise ArithmeticError("no admissible r0 found")
    good, bad = r0, min(2.0 * r0, alpha.a)
    if bad > good:
        for _ in range(60):
            mid = 0.5 * (good + bad)
            if _admissible(BetaFn(C, mid, alpha), alpha, rho, mid, samples):
                good = mid
            else:
                bad = mid
    return BetaFn(C, good, alpha)


def verify_hineq(beta: BetaFn, alpha: AlphaProfile, rho: float, samples: int = 10_000,
                 r0: Optional[float] = None, experiment: str = "hineq") -> BoundReport:
    """Report ``rho beta(r) + r alpha(r) <= beta(rho r - r alpha(r))`` on geometric samples."""
    r0 = beta.r0 if r0 is None else r0
    r = np.geomspace(r0 * GEOMETRIC_SPAN, r0, samples)
    al = np.asarray(alpha(r), dtype=float)
    lhs = rho * beta(r) + r * al
    rhs = beta(rho * r - r * al)
    checks = [upper("hineq", ri, li, ri_) for ri, li, ri_ in zip(r, lhs, rhs)]
    checks += [upper("beta_le_r", ri, bi, ri) for ri, bi in zip(r, beta(r))]
    return BoundReport.build(experiment, checks, r0=r0, rho=rho, C=beta.C)


Op = Union[float, DiagonalOperator]


def _apply(op: Op, x):
    if isinstance(op, DiagonalOperator):
        return op.weights * x
    return op * x


def _size(x) -> float:
    return float(np.linalg.norm(x)) if isinstance(x, np.ndarray) else abs(float(x))


@dataclass
class ProductSystem:
    """``v' = L1 v + N1(v, w)``, ``w' = L2 w + N2(v, w)``.

    ``L1``, ``L2`` are scalars or diagonal operators; ``N1``, ``N2`` are
    callables ``(v, w, n) -> vector`` (``n`` the step, for time-dependent
    adversaries).
    """

    L1: Op
    L2: Op
    N1: Callable
    N2: Callable
    rho: float
    beta: BetaFn
    alpha: AlphaProfile

    def __post_init__(self):
        for name, op, ok in (("L1", self.L1, lambda m: m >= self.rho),
                             ("L2", self.L2, lambda m: m <= self.rho)):
            mods = np.abs(op.weights) if isinstance(op, DiagonalOperator) else np.array([abs(op)])
            if not np.all(ok(mods)):
                raise ValueError(f"{name} violates the splitting bounds at rho={self.rho}")

    def step(self, v, w, n: int):
        return (_apply(self.L1, v) + self.N1(v, w, n), _apply(self.L2, w) + self.N2(v, w, n))

    def in_cone(self, v, w) -> bool:
        rv = _size(v)
        return 0 < rv <= self.beta.r0 and _size(w) <= self.beta(rv)


def _direction(w, rng):
    """Unit vector along ``w`` (or a fixed choice when ``w = 0``)."""
    if isinstance(w, np.ndarray):
        n = np.linalg.norm(w)
        if n > 0:
            return w / n
        e = np.zeros_like(w)
        e[0] = 1.0
        return e
    return 1.0 if w >= 0 else -1.0


def adversarial_system(alpha: AlphaProfile, rho: float, beta: BetaFn, seed: int = 0x5EED,
                       L1: Optional[Op] = None, L2: Optional[Op] = None) -> ProductSystem:
    """Product system whose nonlinearity uses the full budget ``alpha(|v|)|v|``.

    A fraction ``theta`` of the budget shrinks ``v`` and the rest pushes ``w``
    outward; ``theta`` and a scalar ``L2`` in ``[-rho, rho]`` are drawn per
    step from a seeded generator.
    """
    rng = np.random.default_rng(seed)
    thetas = {}

    def theta(n):
        if n not in thetas:
            thetas[n] = rng.uniform()
        return thetas[n]

    def N1(v, w, n):
        return -theta(n) * float(alpha(_size(v))) * v

    def N2(v, w, n):
        return (1.0 - theta(n)) * float(alpha(_size(v))) * _size(v) * _direction(w, rng)

    L1 = rho if L1 is None else L1
    L2 = float(rng.uniform(-rho, rho)) if L2 is None else L2
    return ProductSystem(L1, L2, N1, N2, rho, beta, alpha)


@dataclass(frozen=True)
class ConeResult:
    report: BoundReport
    precondition_failures: Tuple[int, ...]
    steps_in_cone: Tuple[int, ...]


def cone_simulate(system: ProductSystem, seeds: Sequence[Tuple[object, object]],
                  max_steps: int = 10_000, experiment: str = "cone") -> ConeResult:
    """Iterate each seed while ``|v_n| <= r0``; check cone membership and growth.

    Seeds outside ``D`` are listed as precondition failures and skipped.
    The growth check is ``|v_n| >= (rho - alpha(r0))^n |v_0|``.
    """
    r0 = system.beta.r0
    rate = system.rho - float(system.alpha(r0))
    checks, bad_seeds, lengths = [], [], []
    for i, (v, w) in enumerate(seeds):
        if not system.in_cone(v, w):
            bad_seeds.append(i)
            continue
        v0 = _size(v)
        worst_cone = (math.inf, 0, 0.0, 0.0)
        worst_growth = (math.inf, 0, 0.0, 0.0)
        n = 0
        while n < max_steps:
            v, w = system.step(v, w, n)
            n += 1
            rv = _size(v)
            if rv > r0:
                break
            b = system.beta(rv)
            m = b - _size(w)
            if m < worst_cone[0]:
                worst_cone = (m, n, _size(w), b)
            g = rate ** n * v0
            if rv - g < worst_growth[0]:
                worst_growth = (rv - g, n, rv, g)
        lengths.append(n)
        if math.isfinite(worst_cone[0]):
            checks.append(upper(f"cone[{i}]", worst_cone[1], worst_cone[2], worst_cone[3]))
            checks.append(lower(f"growth[{i}]", worst_growth[1], worst_growth[2], worst_growth[3]))
    report = BoundReport.build(experiment, checks, r0=r0, rate=rate, seeds=len(seeds),
                               precondition_failures=len(bad_seeds))
    return ConeResult(report, tuple(bad_seeds), tuple(lengths))


def random_cone_seeds(beta: BetaFn, count: int, seed: int = 0x5EED, dim: Optional[Tuple[int, int]] = None,
                      scale: float = 1e-3) -> List[Tuple[object, object]]:
    """Starts strictly inside ``D`` with ``|v| <= scale * r0``.

    Scalars by default; with ``dim = (d1, d2)`` random vectors of those sizes.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        rv = beta.r0 * scale * rng.uniform(0.01, 1.0)
        rw = beta(rv) * rng.uniform(0.0, 0.999)
        if dim is None:
            out.append((rv * rng.choice([-1.0, 1.0]), rw * rng.choice([-1.0, 1.0])))
        else:
            v = rng.standard_normal(dim[0])
            w = rng.standard_normal(dim[1])
            out.append((rv * v / np.linalg.norm(v), rw * w / np.linalg.norm(w)))
    return out
