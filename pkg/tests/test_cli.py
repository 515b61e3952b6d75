import json

import pytest

from s2cover.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def corpus(corpus_dir, name):
    return str(corpus_dir / name)


def test_validate_ok_exit_zero(corpus_dir, capsys):
    code, out, _ = run(capsys, "validate", "--input", corpus(corpus_dir, "power.json"))
    assert code == 0
    assert "document valid" in out


def test_missing_file_is_input_error(capsys):
    code, _, err = run(capsys, "validate", "--input", "does-not-exist.json")
    assert code == 2
    assert "no such file" in err


def test_orbifold_basilica(corpus_dir, capsys):
    code, out, _ = run(capsys, "orbifold", "--input", corpus(corpus_dir, "basilica.json"))
    assert code == 0
    assert "euler characteristic: -1" in out
    assert "hyperbolic" in out


def test_orbifold_levy_flags_anomaly(corpus_dir, capsys):
    code, out, _ = run(capsys, "orbifold", "--input", corpus(corpus_dir, "levy.json"))
    assert code == 0
    assert "anomaly" in out


def test_search_levy_exits_one_with_canonical_candidate(corpus_dir, capsys):
    code, out, _ = run(capsys, "search", "--input", corpus(corpus_dir, "levy.json"))
    assert code == 1
    assert "canonical candidate" in out


def test_search_power_exits_zero(corpus_dir, capsys):
    code, out, _ = run(capsys, "search", "--input", corpus(corpus_dir, "power.json"))
    assert code == 0
    assert "no obstructions" in out


def test_search_reports_decay_when_floor_given(corpus_dir, capsys):
    code, out, _ = run(
        capsys,
        "search",
        "--input",
        corpus(corpus_dir, "twocurve.json"),
        "--floor",
        "0.01",
    )
    assert code == 1
    assert "gamma_c: {g1, g2}" in out


def test_thurston_matrix_report(corpus_dir, capsys):
    code, out, _ = run(
        capsys,
        "thurston",
        "--input",
        corpus(corpus_dir, "twocurve.json"),
        "--multicurve",
        "g1,g2",
    )
    assert code == 0
    assert "EQ vs 1" in out


def test_thurston_unknown_curve_is_input_error(corpus_dir, capsys):
    code, _, err = run(
        capsys,
        "thurston",
        "--input",
        corpus(corpus_dir, "twocurve.json"),
        "--multicurve",
        "bogus",
    )
    assert code == 2


def test_decompose_report(corpus_dir, capsys):
    code, out, _ = run(capsys, "decompose", "--input", corpus(corpus_dir, "twocurve.json"))
    assert code == 0
    assert "P2 -> P2" in out
    assert "at least one is periodic" in out


def test_decompose_missing_section_is_input_error(corpus_dir, capsys):
    code, _, err = run(capsys, "decompose", "--input", corpus(corpus_dir, "power.json"))
    assert code == 2
    assert "standard_form" in err


def test_extend_reports_default_multiplier(corpus_dir, capsys):
    code, out, _ = run(capsys, "extend", "--input", corpus(corpus_dir, "twocurve.json"))
    assert code == 0
    assert "multiplier defaulted to 1/2" in out


def test_extend_custom_multiplier(corpus_dir, capsys):
    code, out, _ = run(
        capsys,
        "extend",
        "--input",
        corpus(corpus_dir, "twocurve.json"),
        "--multiplier-default",
        "1/3",
    )
    assert code == 0
    assert "1/3" in out


def test_verdict_realizable_exit_zero(corpus_dir, capsys):
    code, out, _ = run(capsys, "verdict", "--input", corpus(corpus_dir, "twocurve.json"))
    assert code == 0
    assert "realizable" in out
    assert "chi = -1/4" in out


def test_verdict_json_is_deterministic(corpus_dir, capsys):
    code1, out1, _ = run(
        capsys, "verdict", "--input", corpus(corpus_dir, "twocurve.json"), "--json"
    )
    code2, out2, _ = run(
        capsys, "verdict", "--input", corpus(corpus_dir, "twocurve.json"), "--json"
    )
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["format_version"] == 1
    assert payload["status"] == "realizable"
    assert payload["chi"] == "-1/4"


def test_estimates_thin_cut(capsys):
    code, out, _ = run(capsys, "estimates", "thin-cut", "--K", "1", "--K1", "1")
    assert code == 0
    assert "0.224553" in out


def test_estimates_domain_violation_is_input_error(capsys):
    code, _, err = run(capsys, "estimates", "cayley-sqrt", "--z", "2")
    assert code == 2


def test_estimates_sweep_emits_tsv(capsys):
    code, out, _ = run(
        capsys,
        "estimates",
        "collar",
        "--sweep",
        "l=0.5:1.5:3",
        "--precision",
        "6",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "l\tcollar"
    assert len(lines) == 4
    assert all("\t" in line for line in lines[1:])


def test_estimates_json_report(capsys):
    code, out, _ = run(capsys, "estimates", "separation", "--abs-z", "1", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["formula"] == "separation"


def test_search_json_determinism(corpus_dir, capsys):
    args = ("search", "--input", corpus(corpus_dir, "twocurve.json"), "--json")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert out1 == out2
    payload = json.loads(out1)
    assert [o["multicurve"] for o in payload["obstructions"]] == [
        ["g1", "g2"],
        ["g1", "g2", "g3"],
    ]
    assert payload["obstructions"][0]["canonical_candidate"] is True
    assert payload["obstructions"][1]["canonical_candidate"] is False


def test_universe_cap_flag(corpus_dir, capsys):
    code, _, err = run(
        capsys,
        "search",
        "--input",
        corpus(corpus_dir, "twocurve.json"),
        "--universe-cap",
        "2",
    )
    assert code == 2
    assert "universe-cap" in err
