"""Check registry, suite runner and report rendering."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Tuple, Union

from . import current, gmatrix, reps, tensor
from .catalog import DEFAULT_CATALOG, PairError, PairSpec, check_fixed_dim, parse_key
from .exact import DEFAULT_ORDER, rat
from .report import ERROR, CheckReport, Timer, combine

SCHEMA_VERSION = 1
FORMATS = ("json", "text")


class ConfigError(ValueError):
    pass


def default_order() -> int:
    env = os.environ.get("YTWIST_ORDER")
    if env is None:
        return DEFAULT_ORDER
    try:
        order = int(env)
    except ValueError:
        raise ConfigError(f"YTWIST_ORDER must be an integer, got {env!r}")
    if order < 1:
        raise ConfigError("YTWIST_ORDER must be positive")
    return order


@dataclass
class SuiteConfig:
    """pairs holds catalog keys; a PairSpec may be passed directly (used by tests)."""

    pairs: List[Union[str, PairSpec]] = field(default_factory=lambda: list(DEFAULT_CATALOG))
    checks: Union[str, List[str]] = "all"
    sites: int = 1
    shifts: Tuple[Fraction, ...] = reps.DEFAULT_SHIFTS
    order: int = field(default_factory=default_order)
    format: str = "json"

    def check_ids(self) -> List[str]:
        return list(REGISTRY) if self.checks == "all" else list(self.checks)

    def validate(self) -> None:
        ids = self.checks
        if ids != "all":
            if isinstance(ids, str) or not ids:
                raise ConfigError("checks must be 'all' or a non-empty list of check ids")
            unknown = [c for c in ids if c not in REGISTRY]
            if unknown:
                raise ConfigError(f"unknown check id(s): {', '.join(unknown)}")
        if not isinstance(self.sites, int) or not 0 <= self.sites <= 2:
            raise ConfigError("sites must be 0, 1 or 2")
        try:
            self.shifts = tuple(rat(a) for a in self.shifts)
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise ConfigError(f"bad shift: {e}")
        if len(self.shifts) < max(self.sites, 2):
            raise ConfigError("need at least two shifts")
        if len(set(self.shifts[:2])) < 2:
            raise ConfigError("the first two shifts must differ")
        if not isinstance(self.order, int) or self.order < 1:
            raise ConfigError("order must be a positive integer")
        if self.format not in FORMATS:
            raise ConfigError(f"unsupported format {self.format!r}")
        if not self.pairs:
            raise ConfigError("no pairs given")


class Context:
    """One pair under one configuration; caches the operators shared between checks."""

    def __init__(self, pair: PairSpec, config: SuiteConfig):
        self.pair = pair
        self.config = config
        self.rep = reps.RepSpec(pair, tuple(config.shifts[:config.sites]))
        self._cache: Dict[str, object] = {}

    def get(self, name: str, fn: Callable[[], object]):
        if name not in self._cache:
            self._cache[name] = fn()
        return self._cache[name]

    @property
    def T(self):
        return self.get("T", lambda: reps.eval_T(self.rep))

    @property
    def S(self):
        return self.get("S", lambda: reps.build_S(self.rep, T=self.T))

    def series(self, name: str) -> CheckReport:
        reports = self.get("series", lambda: {r.check: r for r in
                                              reps.series_checks(self.rep, self.config.order, self.T)})
        return reports[name]

    @property
    def family(self) -> str:
        return self.pair.lie_type

    @property
    def params(self) -> dict:
        return dict(self.rep.params(), order=self.config.order)


def _named(name: str, reports: Sequence[CheckReport], ctx: Context) -> CheckReport:
    return combine(name, reports, ctx.params)


def _pick(name: str, wanted: Sequence[str]):
    def run(ctx: Context) -> CheckReport:
        got = [r for r in ctx.get("r-identities",
                                  lambda: tensor.check_r_identities(ctx.family, ctx.pair.N))
               if r.check in wanted]
        return _named(name, got, ctx)
    return run


def _qybe(ctx: Context) -> CheckReport:
    parts = [tensor.check_qybe(ctx.family, ctx.pair.N, ctx.pair.kappa)]
    if ctx.rep.sites:
        parts.append(reps.check_rtt(ctx.T, ctx.pair.kappa, ctx.params))
        parts.append(reps.check_alpha_stability(ctx.rep, ctx.T))
    return _named("qybe", parts, ctx)


def _series(name: str):
    return lambda ctx: ctx.series(name)


def _retag(name: str, report: CheckReport, ctx: Context) -> CheckReport:
    report.check = name
    report.params = dict(ctx.params, **{k: v for k, v in report.params.items() if k not in ctx.params})
    return report


REGISTRY: Dict[str, Callable[[Context], CheckReport]] = {
    "qybe": _qybe,
    "r-unitarity": _pick("r-unitarity", ("r-unitarity",)),
    "r-transpose": _pick("r-transpose", ("r-t1t2", "r-crossing")),
    "pq-identities": _pick("pq-identities", ("p-squared", "q-squared", "pq", "qp", "q-is-p-t1", "q-is-p-t2")),
    "g-reflection": lambda c: _retag("g-reflection", gmatrix.check_g_reflection(c.pair), c),
    "g-subidentities": lambda c: _named("g-subidentities", gmatrix.check_g_subidentities(c.pair), c),
    "g-symmetry": lambda c: _retag("g-symmetry", gmatrix.check_g_symmetry(c.pair), c),
    "s-reflection": lambda c: reps.check_reflection(c.S, c.pair.kappa, c.params),
    "s-symmetry": lambda c: reps.check_symmetry(c.S, c.pair, c.params),
    "s-unitarity": _series("s-unitarity"),
    "w-even": _series("w-even"),
    "w-z-consistency": _series("w-z-consistency"),
    "c-is-one": _series("c-is-one"),
    "c-involution": _series("c-involution"),
    "p-product": lambda c: _retag("p-product", reps.check_p_product(c.pair), c),
    "d-formula": _series("d-formula"),
    "sigma-unitary": _series("sigma-unitary"),
    "tau-unitary-tt": _series("tau-unitary-tt"),
    "coideal-dressing": lambda c: _retag("coideal-dressing", reps.check_coideal(c.pair, c.config.shifts), c),
    "zw-grouplike": lambda c: _retag("zw-grouplike", reps.check_zw_grouplike(
        c.pair, c.config.shifts, c.config.order), c),
    "f-relations": lambda c: _retag("f-relations", current.check_F_relations(c.family, c.pair.N), c),
    "level-one-embedding": lambda c: reps.check_level_one(c.rep),
    "fixed-dim": lambda c: _retag("fixed-dim", check_fixed_dim(c.pair), c),
    "graded-dims": lambda c: _retag("graded-dims", current.check_graded_dims(c.pair), c),
    "pbw-counts": lambda c: _retag("pbw-counts", current.check_pbw_counts(c.pair), c),
    "cobracket-anti": lambda c: _retag("cobracket-anti", current.check_cobracket_anti(c.pair), c),
    "tau-formula": lambda c: _retag("tau-formula", current.check_tau_formula(c.pair), c),
    "componentwise": lambda c: reps.check_componentwise(c.S, c.pair, params=c.params),
    "t31-bonus": lambda c: _named("t31-bonus", tensor.check_t31(c.family, c.pair.N), c),
}


def _resolve(p: Union[str, PairSpec]) -> PairSpec:
    return p if isinstance(p, PairSpec) else parse_key(p)


def run_one(check: str, ctx: Context) -> CheckReport:
    with Timer() as t:
        try:
            r = REGISTRY[check](ctx)
        except Exception as e:  # a corrupted pair must produce a report, never a crash
            r = CheckReport(check, ctx.params, ERROR, f"{type(e).__name__}: {e}")
    if r.check != check:
        r = _retag(check, r, ctx)
    r.elapsed_ms = r.elapsed_ms or t.ms
    return r


def run_suite(config: SuiteConfig) -> List[CheckReport]:
    """One report per (pair, check), in config order."""
    config.validate()
    ids = config.check_ids()
    out: List[CheckReport] = []
    for p in config.pairs:
        try:
            pair = _resolve(p)
        except (PairError, ValueError) as e:
            out.extend(CheckReport(c, {"pair": str(p)}, ERROR, str(e)) for c in ids)
            continue
        ctx = Context(pair, config)
        out.extend(run_one(c, ctx) for c in ids)
    return out


def render_report(reports: Sequence[CheckReport], fmt: str = "json") -> bytes:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "reports": [r.to_dict() for r in reports]}
        return json.dumps(doc, separators=(",", ":")).encode()
    if fmt == "text":
        lines = []
        for r in reports:
            line = f"{r.status.upper()} {r.check} {r.params.get('pair', '-')} ({r.elapsed_ms} ms)"
            if r.witness:
                line += f": {r.witness}"
            lines.append(line)
        return ("\n".join(lines) + ("\n" if lines else "")).encode()
    raise ConfigError(f"unsupported format {fmt!r}")


def parse_report(data: bytes) -> List[CheckReport]:
    doc = json.loads(data)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError("unsupported schema version")
    return [CheckReport.from_dict(d) for d in doc["reports"]]
