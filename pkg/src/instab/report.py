"""Bound reports: observed quantities compared against stated bounds."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Tuple

import numpy as np

# A bound is violated when the margin falls below -SLACK * |bound|.
SLACK = 1e-10


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    EVIDENCE_ONLY = "EVIDENCE_ONLY"


class Sense(str, Enum):
    UPPER = "<="   # observed <= bound
    LOWER = ">="   # observed >= bound


@dataclass(frozen=True)
class Check:
    label: str
    index: float
    observed: float
    bound: float
    sense: Sense = Sense.UPPER

    @property
    def margin(self) -> float:
        if self.sense is Sense.UPPER:
            return self.bound - self.observed
        return self.observed - self.bound

    @property
    def violated(self) -> bool:
        m = self.margin
        return math.isnan(m) or m < -SLACK * abs(self.bound)


def upper(label: str, index, observed, bound) -> Check:
    return Check(label, float(index), float(observed), float(bound), Sense.UPPER)


def lower(label: str, index, observed, bound) -> Check:
    return Check(label, float(index), float(observed), float(bound), Sense.LOWER)


@dataclass(frozen=True)
class BoundReport:
    experiment: str
    checks: Tuple[Check, ...] = ()
    evidence_only: bool = False
    notes: Tuple[str, ...] = ()
    extras: dict = field(default_factory=dict)

    @classmethod
    def build(cls, experiment: str, checks: Iterable[Check], evidence_only: bool = False,
              notes: Iterable[str] = (), **extras) -> "BoundReport":
        return cls(experiment, tuple(checks), evidence_only, tuple(notes), dict(extras))

    @property
    def worst_margin(self) -> float:
        if not self.checks:
            return math.inf
        return min(c.margin for c in self.checks)

    @property
    def worst_check(self) -> Optional[Check]:
        if not self.checks:
            return None
        return min(self.checks, key=lambda c: c.margin)

    @property
    def violations(self) -> List[Check]:
        return [c for c in self.checks if c.violated]

    @property
    def verdict(self) -> Verdict:
        if self.violations:
            return Verdict.FAIL
        return Verdict.EVIDENCE_ONLY if self.evidence_only else Verdict.PASS

    @property
    def ok(self) -> bool:
        return self.verdict is not Verdict.FAIL

    def merged(self, other: "BoundReport", experiment: Optional[str] = None) -> "BoundReport":
        return BoundReport(experiment or self.experiment, self.checks + other.checks,
                           self.evidence_only or other.evidence_only,
                           self.notes + other.notes, {**self.extras, **other.extras})

    def summary(self) -> dict:
        worst = self.worst_check
        out = {"experiment": self.experiment, "verdict": self.verdict.value,
               "checks": len(self.checks), "violations": len(self.violations),
               "worst_margin": _finite_or_str(self.worst_margin)}
        if worst is not None:
            out["worst"] = {"label": worst.label, "index": worst.index,
                            "observed": worst.observed, "bound": worst.bound}
        return out

    def to_json(self) -> str:
        payload = self.summary()
        payload["notes"] = list(self.notes)
        payload["extras"] = _jsonable(self.extras)
        payload["check_list"] = [
            {"label": c.label, "index": c.index, "observed": _finite_or_str(c.observed),
             "bound": _finite_or_str(c.bound), "sense": c.sense.value,
             "margin": _finite_or_str(c.margin)} for c in self.checks]
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["label", "index", "observed", "bound", "sense", "margin"])
        for c in self.checks:
            wr.writerow([c.label, repr(c.index), repr(c.observed), repr(c.bound),
                         c.sense.value, repr(c.margin)])
        return buf.getvalue()


def _finite_or_str(x: float):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _finite_or_str(obj)
    if isinstance(obj, Enum):
        return obj.value
    return obj
