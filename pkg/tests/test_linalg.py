import random
from fractions import Fraction

import pytest

from oracles import (
    mat_power,
    oracle_comparison_vs_1,
    random_matrix,
    random_stable_multicurve,
    random_table,
)
from s2cover.curves import (
    Multicurve,
    PreimageComponent,
    PullbackTable,
    TRIVIAL,
    compose_table,
    curve,
    peripheral,
)
from s2cover.linalg import (
    DecayDiagnostic,
    LengthTrace,
    ThurstonMatrix,
    UniverseCapExceeded,
    char_poly,
    is_irreducible,
    is_obstruction,
    length_decay_diagnostic,
    search_obstructions,
    spectral_radius,
    thurston_matrix,
)

F = Fraction


def tm(order, rows):
    return ThurstonMatrix(tuple(order), tuple(tuple(F(x) for x in r) for r in rows))


def comp(cls, d):
    return PreimageComponent(cls, d)


LEVY = PullbackTable(2, ("g",), {curve("g"): (comp(curve("g"), 1), comp(TRIVIAL, 1))})


# --- thurston_matrix ---------------------------------------------------------


def test_levy_matrix_is_one():
    m = thurston_matrix(LEVY, Multicurve(("g",)))
    assert m.entries == ((F(1),),)


def test_two_halves_sum_to_one():
    t = PullbackTable(4, ("g",), {curve("g"): (comp(curve("g"), 2), comp(curve("g"), 2))})
    m = thurston_matrix(t, Multicurve(("g",)))
    assert m.entries == ((F(1),),)


def test_off_diagonal_halves():
    t = PullbackTable(
        8,
        ("g1", "g2"),
        {
            curve("g1"): (comp(curve("g2"), 2), comp(TRIVIAL, 6)),
            curve("g2"): (comp(curve("g1"), 4), comp(curve("g1"), 4)),
        },
    )
    m = thurston_matrix(t, Multicurve(("g1", "g2")))
    assert m.entries == ((F(0), F(1, 2)), (F(1, 2), F(0)))


def test_components_outside_multicurve_contribute_nothing():
    t = PullbackTable(
        2,
        ("g1", "g2"),
        {
            curve("g1"): (comp(curve("g2"), 1), comp(curve("g1"), 1)),
            curve("g2"): (comp(TRIVIAL, 2),),
        },
    )
    m = thurston_matrix(t, Multicurve(("g1",)))
    assert m.entries == ((F(1),),)


# --- spectral_radius ---------------------------------------------------------


def test_zero_matrix_certificate():
    cert = spectral_radius(tm(("a",), [[0]]))
    assert cert.value == 0.0
    assert cert.exact_comparison_vs_1 == "LT"


def test_tie_matrix_is_eq():
    cert = spectral_radius(tm(("a", "b"), [[F(1, 2), F(1, 2)], [F(1, 2), F(1, 2)]]))
    assert cert.exact_comparison_vs_1 == "EQ"
    assert abs(cert.value - 1.0) < 1e-12


def test_half_is_lt():
    cert = spectral_radius(tm(("a",), [[F(1, 2)]]))
    assert cert.exact_comparison_vs_1 == "LT"
    assert abs(cert.value - 0.5) < 1e-12


def test_charpoly_known_values():
    assert char_poly(tm(("a", "b"), [[0, 1], [1, 0]])) == [F(-1), F(0), F(1)]
    assert char_poly(tm(("a",), [[2]])) == [F(-2), F(1)]
    assert char_poly(tm(("a", "b", "c"), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == [
        F(-1),
        F(3),
        F(-3),
        F(1),
    ]


def test_charpoly_mandatory_method_small_dims():
    cert = spectral_radius(tm(("a",), [[F(3, 2)]]))
    assert cert.method == "charpoly-exact"
    assert cert.exact_comparison_vs_1 == "GE"


def test_power_bounds_kick_in_above_cap():
    n = 13
    rows = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = F(2)  # diagonal 2: certified GE by the first power
    cert = spectral_radius(ThurstonMatrix(tuple(f"c{i}" for i in range(n)), tuple(tuple(r) for r in rows)))
    assert cert.exact_comparison_vs_1 == "GE"
    assert cert.method == "power-iteration-bounded"


def test_certificates_agree_with_oracle_on_levy_ties():
    # permutation cycles have radius exactly 1
    for n in (2, 3, 4):
        rows = [[F(0)] * n for _ in range(n)]
        for i in range(n):
            rows[i][(i + 1) % n] = F(1)
        matrix = ThurstonMatrix(tuple(f"c{i}" for i in range(n)), tuple(tuple(r) for r in rows))
        assert spectral_radius(matrix).exact_comparison_vs_1 == "EQ"
        assert oracle_comparison_vs_1([list(r) for r in rows]) == "EQ"


# --- is_obstruction ----------------------------------------------------------


def test_levy_is_obstruction():
    assert is_obstruction(LEVY, Multicurve(("g",)))


def test_half_weight_is_not_obstruction():
    t = PullbackTable(2, ("g",), {curve("g"): (comp(curve("g"), 2),)})
    assert not is_obstruction(t, Multicurve(("g",)))


def test_unstable_is_never_obstruction():
    t = PullbackTable(
        2,
        ("g1", "g2"),
        {
            curve("g1"): (comp(curve("g2"), 1), comp(TRIVIAL, 1)),
            curve("g2"): (comp(curve("g2"), 1), comp(TRIVIAL, 1)),
        },
    )
    assert not is_obstruction(t, Multicurve(("g1",)))


# --- is_irreducible ----------------------------------------------------------


def test_two_cycle_is_irreducible():
    assert is_irreducible(tm(("a", "b"), [[0, F(1, 2)], [F(1, 2), 0]]))


def test_block_triangular_is_reducible():
    assert not is_irreducible(tm(("a", "b"), [[1, 0], [1, 1]]))


def test_one_by_one_zero_is_reducible():
    assert not is_irreducible(tm(("a",), [[0]]))


def test_one_by_one_loop_is_irreducible():
    assert is_irreducible(tm(("a",), [[F(1, 3)]]))


# --- search_obstructions -----------------------------------------------------


def test_search_levy_reports_canonical_candidate():
    records = search_obstructions(LEVY)
    assert len(records) == 1
    rec = records[0]
    assert rec.multicurve.curves == ("g",)
    assert rec.certificate.exact_comparison_vs_1 == "EQ"
    assert rec.stable and rec.full and rec.irreducible
    assert rec.canonical_candidate


def test_search_all_trivial_universe_is_empty():
    t = PullbackTable(
        2,
        ("g1", "g2"),
        {
            curve("g1"): (comp(TRIVIAL, 2),),
            curve("g2"): (comp(TRIVIAL, 2),),
        },
    )
    assert search_obstructions(t) == []


def test_search_subunit_pair_not_reported():
    t = PullbackTable(
        4,
        ("g1", "g2"),
        {
            curve("g1"): (comp(curve("g2"), 2), comp(TRIVIAL, 2)),
            curve("g2"): (comp(curve("g1"), 2), comp(TRIVIAL, 2)),
        },
    )
    # matrix [[0,1/2],[1/2,0]], radius 1/2 < 1
    assert search_obstructions(t) == []


def test_search_respects_universe_cap():
    universe = tuple(f"c{i}" for i in range(5))
    entries = {curve(c): (comp(TRIVIAL, 2),) for c in universe}
    t = PullbackTable(2, universe, entries)
    with pytest.raises(UniverseCapExceeded):
        search_obstructions(t, universe_cap=4)
    assert search_obstructions(t, universe_cap=5) == []
    # the default cap refuses genuinely oversized universes
    big = tuple(f"c{i}" for i in range(17))
    big_table = PullbackTable(2, big, {curve(c): (comp(TRIVIAL, 2),) for c in big})
    with pytest.raises(UniverseCapExceeded, match="universe-cap"):
        search_obstructions(big_table)


def test_search_output_closed_under_definition():
    rng = random.Random(23)
    for _ in range(15):
        t = random_table(rng, max_universe=4)
        for rec in search_obstructions(t):
            assert rec.stable
            assert rec.certificate.exact_comparison_vs_1 in ("EQ", "GE")


# --- iterate identity and monotonicity ---------------------------------------


def test_iterate_identity_exact():
    rng = random.Random(29)
    for _ in range(30):
        t = random_table(rng)
        mc = random_stable_multicurve(rng, t)
        base = thurston_matrix(t, mc)
        for k in (2, 3):
            lhs = thurston_matrix(compose_table(t, k), mc)
            rhs = mat_power([list(r) for r in base.entries], k)
            assert [list(r) for r in lhs.entries] == rhs


def test_submulticurve_principal_submatrix_and_radius():
    rng = random.Random(31)
    checked = 0
    for _ in range(40):
        t = random_table(rng)
        big = random_stable_multicurve(rng, t)
        if len(big) < 2:
            continue
        # stability closure of the first curve, a sub-multicurve of big
        seed = {big.curves[0]}
        changed = True
        while changed:
            changed = False
            for cid in sorted(seed):
                for c in t.entry(curve(cid)):
                    if c.cls.kind == "curve" and c.cls.ref not in seed:
                        seed.add(c.cls.ref)
                        changed = True
        small = Multicurve(tuple(c for c in big.curves if c in seed))
        a_big = thurston_matrix(t, big)
        a_small = thurston_matrix(t, small)
        index = {cid: k for k, cid in enumerate(big.curves)}
        for i, ci in enumerate(small.curves):
            for j, cj in enumerate(small.curves):
                assert a_small.entries[i][j] == a_big.entries[index[ci]][index[cj]]
        r_small = spectral_radius(a_small).value
        r_big = spectral_radius(a_big).value
        assert r_small <= r_big + 1e-9
        checked += 1
    assert checked >= 10


# --- length decay diagnostic --------------------------------------------------


def test_decay_detects_geometric_curve():
    trace = LengthTrace(
        curves=("a", "b"),
        samples=((1.0, 2.0), (0.5, 2.0), (0.25, 2.0), (0.125, 2.0)),
    )
    out = length_decay_diagnostic(trace, floor=0.5, decay_window=3)
    assert out.gamma_c == ("a",)
    assert out.floor_violations == ()


def test_decay_all_constant_trace_is_empty():
    trace = LengthTrace(curves=("a",), samples=tuple((1.0,) for _ in range(6)))
    out = length_decay_diagnostic(trace, floor=0.5, decay_window=4)
    assert out.gamma_c == ()
    assert out.floor_violations == ()


def test_decay_oscillation_across_floor_is_violation():
    rows = [(1.0,), (0.1,), (1.0,), (0.1,), (1.0,), (0.1,)]
    trace = LengthTrace(curves=("a",), samples=tuple(rows))
    out = length_decay_diagnostic(trace, floor=0.5, decay_window=4)
    assert out.gamma_c == ()
    assert len(out.floor_violations) == 1
    assert "a" in out.floor_violations[0]


def test_decay_requires_enough_samples():
    trace = LengthTrace(curves=("a",), samples=((1.0,), (0.5,)))
    with pytest.raises(ValueError):
        length_decay_diagnostic(trace, floor=0.1, decay_window=3)
