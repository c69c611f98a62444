"""Structured outcomes of identity checks."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

PASS = "pass"
FAIL = "fail"
ERROR = "error"


@dataclass
class CheckReport:
    check: str
    params: dict = field(default_factory=dict)
    status: str = PASS
    witness: Optional[str] = None
    elapsed_ms: int = 0

    def __post_init__(self):
        if self.status not in (PASS, FAIL, ERROR):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == FAIL and not self.witness:
            raise ValueError("a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "params": dict(self.params),
            "status": self.status,
            "witness": self.witness,
            "elapsed_ms": self.elapsed_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        return cls(d["check"], dict(d["params"]), d["status"], d.get("witness"), int(d["elapsed_ms"]))


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = int(round((time.perf_counter() - self.t0) * 1000))
        return False


def verdict(check: str, witness: Optional[str], params: Optional[dict] = None, elapsed_ms: int = 0) -> CheckReport:
    """Pass when no witness was found, fail otherwise."""
    return CheckReport(check, dict(params or {}), PASS if witness is None else FAIL, witness, elapsed_ms)


def combine(check: str, parts, params: Optional[dict] = None) -> CheckReport:
    """Merge sub-reports: first failure wins, elapsed times add up."""
    parts = list(parts)
    elapsed = sum(p.elapsed_ms for p in parts)
    for p in parts:
        if p.status == ERROR:
            return CheckReport(check, dict(params or {}), ERROR, f"{p.check}: {p.witness}", elapsed)
    for p in parts:
        if p.status == FAIL:
            return CheckReport(check, dict(params or {}), FAIL, f"{p.check}: {p.witness}", elapsed)
    return CheckReport(check, dict(params or {}), PASS, None, elapsed)


def timed(check: str, fn, params: Optional[dict] = None) -> CheckReport:
    """Run fn() -> witness-or-None and wrap the outcome with timing."""
    with Timer() as t:
        w = fn()
    return verdict(check, w, params, t.ms)
