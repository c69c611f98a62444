"""Dataclass configurations shared by the experiment scripts."""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Tuple

from ytwist.catalog import DEFAULT_CATALOG


@dataclass
class SuiteRun:
    pairs: List[str] = field(default_factory=lambda: list(DEFAULT_CATALOG))
    checks: str = "all"
    sites: int = 1
    shifts: Tuple[Fraction, ...] = (Fraction(0), Fraction(1, 3))
    order: int = 10
    out: str = "suite_report.json"


@dataclass
class Benchmark:
    pairs: List[str] = field(default_factory=lambda: list(DEFAULT_CATALOG))
    sites: Tuple[int, ...] = (1, 2)
    max_two_site_N: int = 5
    repeats: int = 1


@dataclass
class Discrepancy:
    pairs: List[str] = field(default_factory=lambda: ["B0:3", "CI:4", "BDI:5:3:2"])
    order: int = 8
    max_r: int = 3
