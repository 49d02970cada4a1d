"""Instability of a normal (diagonal) linearization against an integrable remainder.

With ``L`` diagonal, ``r = r(L) > 1`` and the nonlinearity
``N(u) = -alpha(|u|) u``, an orbit started at ``delta e_k`` (``e_k`` a top
eigenvector) stays within a factor two of ``r^n delta`` for ``n <= N(delta)``
provided ``eta`` satisfies ``(2/(r ln r)) int_0^eta alpha(s)/s ds <= 1/4`` and
``2 r^N delta <= eta < 2 r^(N+1) delta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DivergentAlpha
from ..operators import DiagonalOperator, approx_eigenvector, spectral_radius
from ..report import BoundReport, lower, upper
from .alpha import AlphaProfile, IntegralStatus, integral_alpha_over_s, integral_upto

REL = 1e-12   # relative tolerance on the two-sided definition of N(delta)


@dataclass(frozen=True)
class InstabilityBudget:
    eta: float
    r: float

    def N_of_delta(self, delta: float) -> int:
        """The integer ``N >= 1`` with ``2 r^N delta <= eta < 2 r^(N+1) delta``."""
        if not delta > 0:
            raise ValueError("delta must be positive")
        r, eta = self.r, self.eta
        N = int(math.floor(math.log(eta / (2.0 * delta)) / math.log(r)))
        while N > 0 and 2.0 * r ** N * delta > eta * (1 + REL):
            N -= 1
        while 2.0 * r ** (N + 1) * delta <= eta * (1 + REL):
            N += 1
        if N < 1:
            raise ValueError(f"delta={delta!r} exceeds eta/(2r); no positive N exists")
        return N

    def nu(self, delta: float) -> float:
        return self.r / (4.0 * self.N_of_delta(delta))

    @property
    def eps(self) -> float:
        """``eta/(4r)``, the size every such orbit reaches at step ``N(delta)``."""
        return self.eta / (4.0 * self.r)


def eta_condition(alpha: AlphaProfile, r: float, eta: float) -> float:
    """Left side of the smallness condition on ``eta`` (must be ``<= 1/4``)."""
    return 2.0 / (r * math.log(r)) * integral_upto(alpha, eta)


def budget(alpha: AlphaProfile, r: float, a: Optional[float] = None) -> InstabilityBudget:
    """Largest ``eta`` in ``(0, a]`` meeting the smallness condition.

    Bisection runs in ``t = -ln eta`` so that budgets as small as
    ``exp(-700)`` are representable.
    """
    if not r > 1:
        raise ValueError("spectral radius must exceed 1")
    a = alpha.a if a is None else a
    res = integral_alpha_over_s(alpha, a)
    if res.status is not IntegralStatus.CONVERGENT:
        raise DivergentAlpha(f"integral of alpha(s)/s is {res.status.value}")
    target = r * math.log(r) / 8.0
    if integral_upto(alpha, a) <= target:
        return InstabilityBudget(a, r)
    t_lo = -math.log(a)          # infeasible end
    t_hi = t_lo + 1.0
    while integral_upto(alpha, math.exp(-t_hi)) > target:
        t_hi = t_lo + 2.0 * (t_hi - t_lo)
        if t_hi > 745:
            raise ArithmeticError("eta underflows double precision")
    for _ in range(200):
        mid = 0.5 * (t_lo + t_hi)
        if mid in (t_lo, t_hi):
            break
        if integral_upto(alpha, math.exp(-mid)) > target:
            t_lo = mid
        else:
            t_hi = mid
    return InstabilityBudget(math.exp(-t_hi), r)


def sandwich_orbit(op: DiagonalOperator, alpha: AlphaProfile, delta: float, steps: int,
                   nu: float = 1.0):
    """Norms of ``u_{n+1} = L u_n - alpha(|u_n|) u_n`` from ``delta e_k``, ``n <= steps``."""
    k, _ = approx_eigenvector(op, nu)
    u = np.zeros(op.N)
    u[k] = delta
    norms = [delta]
    for _ in range(steps):
        u = op.weights * u - float(alpha(float(np.linalg.norm(u)))) * u
        norms.append(float(np.linalg.norm(u)))
    return np.asarray(norms)


def sandwich_check(op: DiagonalOperator, alpha: AlphaProfile, delta: float,
                   eta: Optional[float] = None, experiment: str = "sandwich") -> BoundReport:
    """Check ``r^n delta / 2 <= |u_n| <= 2 r^n delta`` for ``1 <= n <= N(delta)``
    and ``|u_N| >= eta/(4r)``.

    ``eta`` defaults to the budget of ``alpha``; passing it explicitly allows
    running a divergent profile with a borrowed budget (where the lower bound
    is expected to break for small ``delta``).
    """
    r = spectral_radius(op).value
    bud = budget(alpha, r) if eta is None else InstabilityBudget(eta, r)
    N = bud.N_of_delta(delta)
    norms = sandwich_orbit(op, alpha, delta, N, bud.nu(delta))
    checks = []
    for n in range(1, N + 1):
        lin = r ** n * delta
        checks.append(upper("upper", n, norms[n], 2.0 * lin))
        checks.append(lower("lower", n, norms[n], 0.5 * lin))
    checks.append(lower("final_size", N, norms[N], bud.eps))
    return BoundReport.build(experiment, checks, eta=bud.eta, N=N, r=r, delta=delta,
                             norms=norms)
