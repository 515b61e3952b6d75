import json

import pytest

from s2cover.document import (
    DocumentError,
    SCHEMA,
    corpus_names,
    emit,
    load_corpus,
    load_path,
    parse,
)

MINIMAL = {
    "format_version": 1,
    "covering": {
        "degree": 2,
        "points": [
            {"id": "0", "image": "0", "local_degree": 2},
            {"id": "inf", "image": "inf", "local_degree": 2},
        ],
    },
    "curves": {
        "universe": ["eq"],
        "pullback": {"eq": [{"curve": "eq", "degree": 2}]},
    },
}


def test_parse_minimal_document():
    doc = parse(json.dumps(MINIMAL))
    assert doc.covering.degree == 2
    assert doc.curves.universe == ("eq",)
    assert doc.standard_form is None


def test_syntax_error_carries_line_and_column():
    with pytest.raises(DocumentError) as err:
        parse('{"format_version": 1,\n  "covering": }')
    assert "line 2" in str(err.value)
    assert "column" in str(err.value)


def test_unknown_key_rejected_in_strict_mode():
    raw = dict(MINIMAL)
    raw["mystery"] = 1
    with pytest.raises(DocumentError, match="mystery"):
        parse(json.dumps(raw))


def test_unknown_key_warned_in_lenient_mode():
    raw = dict(MINIMAL)
    raw["mystery"] = 1
    doc = parse(json.dumps(raw), lenient=True)
    assert any("mystery" in w for w in doc.warnings)


def test_duplicate_curve_key_outside_universe_is_error():
    raw = json.loads(json.dumps(MINIMAL))
    raw["curves"]["pullback"]["ghost"] = [{"trivial": True, "degree": 2}]
    with pytest.raises(DocumentError, match="ghost"):
        parse(json.dumps(raw))


def test_dangling_marked_point_reference():
    raw = json.loads(json.dumps(MINIMAL))
    raw["curves"]["pullback"]["eq"] = [{"peripheral": "nope", "degree": 2}]
    with pytest.raises(DocumentError, match="nope"):
        parse(json.dumps(raw))


def test_component_shape_must_be_unique():
    raw = json.loads(json.dumps(MINIMAL))
    raw["curves"]["pullback"]["eq"] = [{"curve": "eq", "trivial": True, "degree": 2}]
    with pytest.raises(DocumentError, match="exactly one"):
        parse(json.dumps(raw))


def test_schema_violation_carries_json_path():
    raw = json.loads(json.dumps(MINIMAL))
    raw["covering"]["degree"] = "two"
    with pytest.raises(DocumentError) as err:
        parse(json.dumps(raw))
    assert "$.covering.degree" in str(err.value)


def test_rational_strings_are_exact():
    raw = json.loads(json.dumps(MINIMAL))
    raw["covering"]["p_finite"] = False
    raw["covering"]["points"].append({"id": "a", "image": "a", "local_degree": 1})
    raw["covering"]["cycles"] = [
        {"points": ["a"], "kind": "attracting", "multiplier": "1/3"}
    ]
    doc = parse(json.dumps(raw))
    from fractions import Fraction

    assert doc.covering.cycles[0].multiplier == Fraction(1, 3)


def test_bad_rational_string_is_an_error():
    raw = json.loads(json.dumps(MINIMAL))
    raw["covering"]["cycles"] = [
        {"points": ["0"], "kind": "attracting", "multiplier": "0.5x"}
    ]
    with pytest.raises(DocumentError, match="rational"):
        parse(json.dumps(raw))


def test_round_trip_on_all_corpus_documents(corpus_dir):
    for name in corpus_names():
        doc = load_path(str(corpus_dir / name))
        assert parse(emit(doc)) == doc


def test_emit_is_canonical_and_deterministic(corpus_docs):
    doc = corpus_docs["twocurve.json"]
    assert emit(doc) == emit(parse(emit(doc)))


def test_corpus_loads_by_package_data():
    names = corpus_names()
    assert "twocurve.json" in names and len(names) >= 6
    doc = load_corpus("power.json")
    assert doc.covering.degree == 2


def test_schema_is_valid_draft202012():
    import jsonschema

    jsonschema.Draft202012Validator.check_schema(SCHEMA)
