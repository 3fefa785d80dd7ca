import copy
import json

import pytest

from toyshtlab.cli import (
    DEFAULT_SUITE,
    REGISTRY,
    CheckSpec,
    load_config,
    main,
    replay_witness,
    run,
    run_suite,
)
from toyshtlab.errors import ConfigParseError, UnknownCheckError


def test_registry_names():
    expected = {
        "chart_equivalence",
        "schubert_decomposition",
        "radon_duality",
        "dichotomy",
        "partial_frobenius_composition",
        "radon_fourier_square",
        "picard_relation",
        "gamma_identity",
        "canonical_preimage",
        "transversality_locus",
        "pullback_multiplicity",
        "trivial_locus_count",
        "grassmannian_count",
        "selftest_negated",
    }
    assert expected <= set(REGISTRY)


def test_run_radon_duality():
    r = run(CheckSpec("radon_duality", {"p": 2, "e": 1, "N": 3, "n": 1, "trials": 100}))
    assert r.verdict == "pass" and r.mode == "exhaustive"
    assert r.counters["trials"] == 100


def test_run_grassmannian_count():
    r = run(CheckSpec("grassmannian_count", {"p": 2, "e": 1, "m": 1, "N": 4, "n": 2}))
    assert r.verdict == "pass"
    assert r.counters["count"] == 35


def test_run_schubert_vacuous():
    r = run(CheckSpec("schubert_decomposition", {"p": 2, "e": 1, "m": 1, "N": 4, "n": 2}))
    assert r.verdict == "vacuous"


def test_unknown_check():
    with pytest.raises(UnknownCheckError):
        run(CheckSpec("no_such_check", {}))


def test_run_suite_empty():
    reports, code = run_suite([])
    assert reports == [] and code == 0


def test_selftest_negated_fails_with_replayable_witness():
    r = run(CheckSpec("selftest_negated", {"p": 2, "e": 1, "m": 2, "N": 2}))
    assert r.verdict == "fail"
    witnesses = r.counters["witnesses"]
    assert witnesses
    assert replay_witness(witnesses[0])


def test_suite_exit_codes():
    specs = [
        CheckSpec("grassmannian_count", {"p": 2, "e": 1, "m": 1, "N": 3, "n": 1}),
        CheckSpec("selftest_negated", {"p": 2, "e": 1, "m": 2, "N": 2}),
    ]
    reports, code = run_suite(specs)
    assert code == 1
    assert [r.verdict for r in reports] == ["pass", "fail"]
    reports, code = run_suite(specs[:1])
    assert code == 0


def test_reports_stable_for_fixed_seed():
    spec = CheckSpec(
        "schubert_decomposition", {"p": 2, "e": 1, "m": 2, "N": 3, "n": 1}, seed=11
    )
    a, b = run(spec), run(copy.deepcopy(spec))
    a.elapsed_ms = b.elapsed_ms = 0
    assert a == b


def test_jobs_preserve_order_and_results():
    specs = [
        CheckSpec("grassmannian_count", {"p": 2, "e": 1, "m": 1, "N": 3, "n": 1}),
        CheckSpec("radon_duality", {"p": 2, "e": 1, "N": 3, "n": 1, "trials": 20}),
        CheckSpec("picard_relation", {"p": 2, "e": 1, "D": 4, "c": -2}),
    ]
    seq, _ = run_suite([copy.deepcopy(s) for s in specs], jobs=1)
    par, _ = run_suite([copy.deepcopy(s) for s in specs], jobs=3)
    for x, y in zip(seq, par):
        x.elapsed_ms = y.elapsed_ms = 0
    assert seq == par


def test_config_loading(tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(
        json.dumps(
            {
                "suite": [
                    {"name": "grassmannian_count",
                     "params": {"p": 2, "e": 1, "m": 1, "N": 3, "n": 1},
                     "seed": 5}
                ]
            }
        )
    )
    specs = load_config(str(cfg))
    assert specs == [
        CheckSpec("grassmannian_count", {"p": 2, "e": 1, "m": 1, "N": 3, "n": 1}, 5)
    ]
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ConfigParseError):
        load_config(str(bad))
    malformed = tmp_path / "malformed.json"
    malformed.write_text(json.dumps({"suite": [{"params": {}}]}))
    with pytest.raises(ConfigParseError):
        load_config(str(malformed))


def test_main_single_check_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(
        ["--check", "grassmannian_count", "--param", "N=4", "--param", "n=2",
         "--param", "m=1", "--out", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["schema_version"] == "toyshtlab-report-v1"
    assert doc["reports"][0]["counters"]["count"] == 35


def test_main_csv_format(tmp_path):
    out = tmp_path / "r.csv"
    code = main(
        ["--check", "picard_relation", "--param", "D=4", "--param", "c=-2",
         "--format", "csv", "--out", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("name,verdict,mode")
    assert lines[1].startswith("picard_relation,pass")


def test_main_config_with_failure(tmp_path):
    cfg = tmp_path / "suite.json"
    cfg.write_text(
        json.dumps(
            {"suite": [{"name": "selftest_negated",
                        "params": {"p": 2, "e": 1, "m": 2, "N": 2}}]}
        )
    )
    out = tmp_path / "r.json"
    code = main(["--config", str(cfg), "--out", str(out)])
    assert code == 1
    doc = json.loads(out.read_text())
    w = doc["reports"][0]["counters"]["witnesses"][0]
    w["rows"] = [tuple(r) for r in w["rows"]]
    assert replay_witness(w)


def test_default_suite_all_pass():
    reports, code = run_suite([copy.deepcopy(s) for s in DEFAULT_SUITE])
    assert code == 0
    assert all(r.verdict == "pass" for r in reports)


def test_budget_env_override(monkeypatch):
    monkeypatch.setenv("TOYSHT_BUDGET", "4")
    r = run(CheckSpec("grassmannian_count", {"p": 2, "e": 1, "m": 1, "N": 3, "n": 1}))
    assert r.verdict == "fail"
    assert r.counters["witnesses"][0]["kind"] == "budget_exceeded"
    # a budget overrun does not abort the rest of a suite
    reports, code = run_suite(
        [
            CheckSpec("grassmannian_count", {"p": 2, "e": 1, "m": 1, "N": 3, "n": 1}),
            CheckSpec("picard_relation", {"p": 2, "e": 1, "D": 4, "c": -2}),
        ]
    )
    assert [x.verdict for x in reports] == ["fail", "pass"] and code == 1
    monkeypatch.delenv("TOYSHT_BUDGET")
