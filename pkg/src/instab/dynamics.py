"""Iteration of maps, growth-rate fits and empirical (in)stability certificates."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InstabError
from .maps import (ContractSupport, Discont2D, Jordan2D, MapSpec, ScalarAlpha, ShiftMult,
                   TranslateMult)
from .maps.contract_support import adversarial_states
from .maps.translate_mult import seed_states
from .report import SLACK, BoundReport, upper
from .spaces import PlanarPoint, SeqVector

SEED = 0x5EED
KEEP_STATES = 64


class StopReason(str, Enum):
    MAX_STEPS = "MAX_STEPS"
    NORM_BELOW = "NORM_BELOW"
    NORM_ABOVE = "NORM_ABOVE"
    MAP_ERROR = "MAP_ERROR"


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Norms ``|u_0| .. |u_N|`` of an orbit, with the first states retained."""

    spec: Any
    states: Tuple[Any, ...]
    norms: np.ndarray
    stop_reason: StopReason
    detail: str = ""

    @property
    def steps(self) -> int:
        return self.norms.size - 1

    def norms_csv(self) -> str:
        rows = ["n,norm"] + [f"{n},{r!r}" for n, r in enumerate(self.norms.tolist())]
        return "\n".join(rows) + "\n"


def _norm_of(spec, u) -> float:
    return spec.norm(u)


def iterate(spec: MapSpec, u0, max_steps: int, floor: float = 0.0, ceiling: float = math.inf,
            keep: int = KEEP_STATES) -> Trajectory:
    """Apply ``spec`` until ``max_steps`` or a norm leaves ``[floor, ceiling]``.

    A norm strictly below ``floor`` stops with NORM_BELOW, strictly above
    ``ceiling`` with NORM_ABOVE (``u_0`` included).  Errors raised by the map
    end the orbit with MAP_ERROR; the states computed so far are kept.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    if not floor < ceiling:
        raise ValueError("floor must be below ceiling")
    states = [u0]
    norms = [_norm_of(spec, u0)]
    reason, detail = StopReason.MAX_STEPS, ""
    u = u0
    for _ in range(max_steps + 1):
        r = norms[-1]
        if r < floor:
            reason = StopReason.NORM_BELOW
            break
        if r > ceiling:
            reason = StopReason.NORM_ABOVE
            break
        if len(norms) == max_steps + 1:
            break
        try:
            u = spec.apply(u)
        except (InstabError, FloatingPointError) as exc:
            reason, detail = StopReason.MAP_ERROR, f"{type(exc).__name__}: {exc}"
            break
        if len(states) < keep:
            states.append(u)
        norms.append(_norm_of(spec, u))
    return Trajectory(spec, tuple(states), np.asarray(norms, dtype=float), reason, detail)


def orbit_norms(spec: MapSpec, u0, steps: int) -> np.ndarray:
    """``|u_0| .. |u_steps|`` without keeping states; uses banded storage for shifts."""
    if isinstance(spec, ShiftMult) and isinstance(u0, SeqVector):
        return spec.band_norms(u0.values[None, :], steps)[0]
    out = np.empty(steps + 1)
    u = u0
    out[0] = spec.norm(u)
    for n in range(1, steps + 1):
        u = spec.apply(u)
        out[n] = spec.norm(u)
    return out


class LinearPart(MapSpec):
    """The linearization of a map, iterated as a map in its own right."""

    def __init__(self, spec: MapSpec):
        self.base = spec
        self.norm_kind = spec.norm_kind

    @property
    def tag(self):
        return self.base.tag

    def apply(self, u):
        return self.base.linearized_apply(u)

    def linearized_apply(self, u):
        return self.base.linearized_apply(u)

    def remainder(self, u):
        return self.base.zero() if not isinstance(u, float) else 0.0

    def zero(self):
        return self.base.zero()

    def norm(self, u) -> float:
        return self.base.norm(u)

    def to_config(self) -> dict:
        return {"linear_part_of": self.base.to_config()}


def growth_rate_fit(norms, window: Tuple[int, int]) -> Tuple[float, float]:
    """Exponentiated least-squares slope of ``ln|u_n|`` over ``n in [a, b]`` and its r^2."""
    if isinstance(norms, Trajectory):
        norms = norms.norms
    a, b = window
    y = np.asarray(norms, dtype=float)[a:b + 1]
    if y.size < 2 or b + 1 > len(norms):
        raise ValueError("window must hold at least two recorded norms")
    if np.any(y <= 0):
        raise ValueError("norms must be positive on the fit window")
    n = np.arange(a, a + y.size, dtype=float)
    ly = np.log(y)
    slope, icept = np.polyfit(n, ly, 1)
    resid = ly - (slope * n + icept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0.0 or ss_res == 0.0 else 1.0 - ss_res / ss_tot
    return float(math.exp(slope)), r2


def seed_family(spec: MapSpec, count_random: int = 16, seed: int = SEED, band: int = 32) -> List[Any]:
    """Unit-norm initial directions for a map.

    Canonical basis directions, a smooth bump where the state space has one,
    rough high-frequency (sawtooth) states and ``count_random`` seeded random
    states.  Shift-map seeds have length ``band``.
    """
    if isinstance(spec, TranslateMult):
        return seed_states(spec, count_random, seed)
    if isinstance(spec, ContractSupport):
        return adversarial_states(spec, count_random, seed)
    rng = np.random.default_rng(seed)
    if isinstance(spec, ShiftMult):
        out = [SeqVector.basis(k, band) for k in (0, 1, 5)]
        k = np.arange(band)
        out.append(SeqVector(np.exp(-0.5 * ((k - band / 2) / 4.0) ** 2)))
        out.append(SeqVector(np.where(k % 2 == 0, 1.0, -1.0)))
        out += [SeqVector(rng.standard_normal(band)) for _ in range(count_random)]
        return [u * (1.0 / float(np.linalg.norm(u.values))) for u in out]
    if isinstance(spec, (Jordan2D, Discont2D)):
        out = [PlanarPoint(1.0, 0.0), PlanarPoint(0.0, 1.0), PlanarPoint(1.0, -1.0)]
        out += [PlanarPoint(*rng.standard_normal(2)) for _ in range(count_random)]
        return [p * (1.0 / math.hypot(p.v, p.w)) for p in out]
    if isinstance(spec, ScalarAlpha):
        return [1.0, -1.0]
    raise TypeError(f"no seed family for {type(spec).__name__}")


@dataclass(frozen=True)
class InstabilityWitness:
    u0: Any
    delta: float
    eps: float
    C: float
    rho: float
    n_star: int        # last n with max(|u_0|..|u_n|) <= eps
    margin: float      # min over n <= n_star of |u_n|/(C rho^n |u_0|) - 1

    def to_dict(self) -> dict:
        u0 = self.u0
        if hasattr(u0, "values"):
            u0 = {"norm_seed": True}
        return {"delta": self.delta, "eps": self.eps, "C": self.C, "rho": self.rho,
                "n_star": self.n_star, "margin": self.margin,
                "u0": u0 if isinstance(u0, (float, dict)) else repr(u0)}


@dataclass(frozen=True)
class CertificationResult:
    found: bool
    witnesses: Tuple[InstabilityWitness, ...]
    per_delta: Tuple[dict, ...]
    best_margin: float

    def to_json(self) -> str:
        return json.dumps({"found": self.found, "best_margin": self.best_margin,
                           "per_delta": list(self.per_delta),
                           "witnesses": [w.to_dict() for w in self.witnesses]}, indent=2)


def _chain_margin(norms: np.ndarray, eps: float, C: float, rho: float) -> Tuple[Optional[int], float]:
    """``(n_star, margin)`` of the exponential-growth chain on one orbit.

    ``n_star`` is None when the orbit never exceeds ``eps`` (the chain is then
    inconclusive on the simulated horizon).
    """
    over = np.flatnonzero(norms > eps)
    if over.size == 0:
        n_star = None
        upto = norms.size
    else:
        n_star = int(over[0]) - 1
        upto = n_star + 1
    if upto <= 0:
        return n_star, -math.inf
    n = np.arange(upto)
    with np.errstate(divide="ignore"):
        log_ratio = np.log(norms[:upto]) - math.log(C) - n * math.log(rho) - math.log(norms[0])
    return n_star, float(np.min(np.expm1(log_ratio)))


def certify_exponential_instability(spec: MapSpec, seeds: Sequence[Any], eps: float, C: float,
                                    rho: float, delta_list: Sequence[float],
                                    max_steps: int = 10_000) -> CertificationResult:
    """Search, for every ``delta``, a start of norm ``delta`` growing like ``C rho^n``.

    A start qualifies when its orbit exceeds ``eps`` within ``max_steps`` and
    ``|u_n| >= C rho^n |u_0|`` (up to relative slack) for every ``n`` before
    the first exceedance.  The result holds one witness per ``delta`` or
    reports the best margin seen.
    """
    if not (eps > 0 and C > 0 and rho > 1):
        raise ValueError("need eps > 0, C > 0 and rho > 1")
    deltas = list(delta_list)
    if any(d <= 0 for d in deltas) or any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta_list must be positive and strictly decreasing")
    witnesses, per_delta = [], []
    best_overall = -math.inf
    for delta in deltas:
        best = None
        for seed in seeds:
            u0 = seed * delta
            norms = orbit_norms_until(spec, u0, eps, max_steps)
            n_star, margin = _chain_margin(norms, eps, C, rho)
            if n_star is None:
                continue
            if best is None or margin > best[2]:
                best = (u0, n_star, margin)
        if best is None:
            per_delta.append({"delta": delta, "status": "NO_EXCEEDANCE", "margin": None})
            continue
        u0, n_star, margin = best
        best_overall = max(best_overall, margin)
        ok = margin >= -SLACK
        per_delta.append({"delta": delta, "status": "WITNESS" if ok else "CHAIN_BROKEN",
                          "n_star": n_star, "margin": margin})
        if ok:
            witnesses.append(InstabilityWitness(u0, delta, eps, C, rho, n_star, margin))
    found = len(witnesses) == len(deltas)
    return CertificationResult(found, tuple(witnesses), tuple(per_delta), best_overall)


def orbit_norms_until(spec: MapSpec, u0, ceiling: float, max_steps: int) -> np.ndarray:
    """Norms from ``u_0`` up to and including the first one above ``ceiling``."""
    out = [spec.norm(u0)]
    u = u0
    for _ in range(max_steps):
        if out[-1] > ceiling:
            break
        u = spec.apply(u)
        out.append(spec.norm(u))
    return np.asarray(out)


def validate_witness(spec: MapSpec, w: InstabilityWitness) -> bool:
    """Re-iterate from ``w.u0`` and re-check the growth chain independently."""
    u = w.u0
    r0 = spec.norm(u)
    if not 0 < r0 <= w.delta * (1 + 1e-12):
        return False
    running = r0
    for n in range(w.n_star + 1):
        r = spec.norm(u)
        running = max(running, r)
        if running > w.eps:
            return False
        if r < w.C * w.rho ** n * r0 * (1 - SLACK):
            return False
        u = spec.apply(u)
    return spec.norm(u) > w.eps


def certify_stability_empirical(spec: MapSpec, eps: float, delta_grid: Sequence[float],
                                seeds: Sequence[Any], steps: int,
                                experiment: str = "stability") -> BoundReport:
    """Largest norm over seeds scaled to each ``delta`` and ``steps`` iterations.

    The report compares each maximum against ``eps``.  It is evidence gathered
    on finitely many orbits, never a proof, and is tagged EVIDENCE_ONLY unless
    some orbit reaches ``eps``.  ``extras['delta_threshold']`` is the largest
    probed ``delta`` below which every probed ``delta`` stayed under ``eps``.
    """
    checks = []
    deltas = sorted(delta_grid)
    ok_up_to, broken = 0.0, False
    for delta in deltas:
        if isinstance(spec, ShiftMult):
            arr = np.stack([s.values for s in seeds]) * delta
            peak = float(spec.band_norms(arr, steps).max())
        else:
            peak = max(float(orbit_norms(spec, s * delta, steps).max()) for s in seeds)
        checks.append(upper("max_norm", delta, peak, eps))
        if peak < eps and not broken:
            ok_up_to = delta
        else:
            broken = True
    return BoundReport.build(experiment, checks, evidence_only=True,
                             notes=["finite-orbit evidence, not a proof"],
                             delta_threshold=ok_up_to, eps=eps, steps=steps, seeds=len(seeds))
