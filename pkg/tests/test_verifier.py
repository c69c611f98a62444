import json

import pytest

from ytwist import cli
from ytwist.catalog import parse_key, tampered
from ytwist.report import CheckReport
from ytwist.verifier import (REGISTRY, SCHEMA_VERSION, ConfigError, SuiteConfig, default_order,
                             parse_report, render_report, run_suite)

IDS = ["qybe", "r-unitarity", "r-transpose", "pq-identities", "g-reflection", "g-subidentities",
       "g-symmetry", "s-reflection", "s-symmetry", "s-unitarity", "w-even", "w-z-consistency",
       "c-is-one", "c-involution", "p-product", "d-formula", "sigma-unitary", "tau-unitary-tt",
       "coideal-dressing", "zw-grouplike", "f-relations", "level-one-embedding", "fixed-dim",
       "graded-dims", "pbw-counts", "cobracket-anti", "tau-formula", "componentwise", "t31-bonus"]


def test_registry_ids():
    assert list(REGISTRY) == IDS


def test_run_suite_small():
    reps = run_suite(SuiteConfig(pairs=["B0:3"], checks=["qybe", "s-reflection", "p-product"]))
    assert [r.check for r in reps] == ["qybe", "s-reflection", "p-product"]
    assert all(r.passed for r in reps)
    assert all(r.params["pair"] == "B0:3" for r in reps)


def test_run_suite_all_b03():
    reps = run_suite(SuiteConfig(pairs=["B0:3"]))
    got = {r.check: r.status for r in reps}
    assert len(reps) == len(IDS)
    bad = {k: v for k, v in got.items() if v != "pass"}
    assert bad == {"d-formula": "fail", "tau-formula": "fail"}


@pytest.mark.parametrize("kw", [dict(checks=["bogus"]), dict(sites=3), dict(shifts=(0,)),
                                dict(shifts=(1, 1)), dict(order=0), dict(format="xml"), dict(pairs=[]),
                                dict(checks=[])])
def test_bad_config(kw):
    with pytest.raises(ConfigError):
        run_suite(SuiteConfig(**dict(dict(pairs=["B0:3"]), **kw)))


def test_env_order(monkeypatch):
    monkeypatch.setenv("YTWIST_ORDER", "7")
    assert default_order() == 7
    monkeypatch.setenv("YTWIST_ORDER", "x")
    with pytest.raises(ConfigError):
        default_order()


def test_unknown_pair_gives_error_reports():
    reps = run_suite(SuiteConfig(pairs=["BDI:9:9:9"], checks=["qybe", "fixed-dim"]))
    assert [r.status for r in reps] == ["error", "error"]
    assert "invalid symmetric pair parameters" in reps[0].witness


def test_corrupted_pair_fails_without_crash():
    bad = tampered(parse_key("BDI:5:3:2"), 2, 2, -1)
    reps = run_suite(SuiteConfig(pairs=[bad], checks=["g-reflection", "s-reflection", "fixed-dim"]))
    assert all(r.status in ("fail", "error") for r in reps)
    assert reps[0].status == "fail" and reps[0].witness


def test_render_json_roundtrip():
    reps = run_suite(SuiteConfig(pairs=["C0:4"], checks=["qybe", "d-formula"], order=6))
    data = render_report(reps, "json")
    doc = json.loads(data)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert set(doc["reports"][0]) == {"check", "params", "status", "witness", "elapsed_ms"}
    back = parse_report(data)
    assert [r.to_dict() for r in back] == [r.to_dict() for r in reps]


def test_render_text():
    r = [CheckReport("qybe", {"pair": "B0:3"}, "pass", None, 3),
         CheckReport("d-formula", {"pair": "B0:3"}, "fail", "u^-3 differs", 5)]
    assert render_report(r, "text") == b"PASS qybe B0:3 (3 ms)\nFAIL d-formula B0:3 (5 ms): u^-3 differs\n"
    with pytest.raises(ConfigError):
        render_report(r, "yaml")


def test_report_requires_witness_on_fail():
    with pytest.raises(ValueError):
        CheckReport("x", {}, "fail", None)
    with pytest.raises(ValueError):
        CheckReport("x", {}, "maybe")


def test_parse_report_schema():
    with pytest.raises(ValueError):
        parse_report(b'{"schema_version": 99, "reports": []}')


def test_deterministic_apart_from_timing():
    cfg = lambda: SuiteConfig(pairs=["CI:4"], checks=["s-symmetry", "c-is-one", "pbw-counts"], order=6)
    strip = lambda rs: [dict(r.to_dict(), elapsed_ms=0) for r in rs]
    assert strip(run_suite(cfg())) == strip(run_suite(cfg()))


def test_sites_zero_and_two():
    r0 = run_suite(SuiteConfig(pairs=["B0:3"], checks=["s-reflection", "s-symmetry"], sites=0))
    r2 = run_suite(SuiteConfig(pairs=["B0:3"], checks=["s-reflection", "s-symmetry"], sites=2))
    assert all(r.passed for r in r0 + r2)
    assert r2[0].params["sites"] == 2


def test_cli_list(capsys):
    assert cli.main(["list-checks"]) == 0
    assert capsys.readouterr().out.split() == IDS
    assert cli.main(["list-pairs"]) == 0
    assert "BDI:5:3:2" in capsys.readouterr().out


def test_cli_check_exit_codes(capsys):
    assert cli.main(["check", "--pair", "B0:3", "--suite", "qybe,p-product"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS qybe B0:3")
    assert cli.main(["check", "--pair", "B0:3", "--suite", "d-formula", "--format", "json", "--order", "6"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["reports"][0]["status"] == "fail"
    assert cli.main(["check", "--suite", "nope"]) == 2
    assert cli.main(["check", "--pair", "B0:3", "--shifts", "0,x"]) == 2
