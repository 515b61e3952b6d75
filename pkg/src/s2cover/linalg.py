"""Thurston matrices, certified spectral radii, and obstruction search.

The obstruction predicate compares the Perron root of a non-negative
rational matrix against 1.  That comparison sits exactly on a decision
boundary (Levy cycles give spectral radius exactly 1), so it is certified
with exact arithmetic: the characteristic polynomial is computed over the
rationals and the largest real root is located with Sturm chains.  The
floating-point radius carried alongside is advisory only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import mpmath as mp

from . import exactpoly
from .curves import KIND_CURVE, Multicurve, PullbackTable, curve, is_full, is_stable
from .report import ReportBuilder, ValidationReport

LT = "LT"
EQ = "EQ"
GE = "GE"

METHOD_CHARPOLY = "charpoly-exact"
METHOD_POWER = "power-iteration-bounded"

CHARPOLY_MANDATORY_DIM = 12
DEFAULT_UNIVERSE_CAP = 16


class UniverseCapExceeded(ValueError):
    """Subset search refused; raise the cap flag if the size is intended."""


@dataclass(frozen=True)
class ThurstonMatrix:
    curve_order: tuple[str, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.curve_order)

    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, Fraction(0)) for row in self.entries)


@dataclass(frozen=True)
class SpectralCertificate:
    value: float
    exact_comparison_vs_1: str  # LT, EQ or GE
    method: str

    @property
    def is_obstruction_radius(self) -> bool:
        return self.exact_comparison_vs_1 in (EQ, GE)


def thurston_matrix(table: PullbackTable, multicurve: Multicurve) -> ThurstonMatrix:
    """Entry (i, j) = sum over components of curve j of class curve i of 1/degree."""
    order = tuple(multicurve.curves)
    index = {cid: k for k, cid in enumerate(order)}
    rows = [[Fraction(0)] * len(order) for _ in order]
    for j, cid in enumerate(order):
        for comp in table.entry(curve(cid)):
            if comp.cls.kind == KIND_CURVE and comp.cls.ref in index:
                rows[index[comp.cls.ref]][j] += Fraction(1, comp.degree)
    return ThurstonMatrix(order, tuple(tuple(r) for r in rows))


def char_poly(matrix: ThurstonMatrix) -> list[Fraction]:
    """Characteristic polynomial det(tI - A), exact, ascending coefficients.

    Faddeev-LeVerrier recursion; O(n^4) rational operations, fine at desk
    scale.
    """
    n = matrix.dim
    a = [list(row) for row in matrix.entries]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for k in range(1, n + 1):
        if k > 1:
            # M_k = A * M_{k-1} + c_{n-k+1} I
            prod = [
                [
                    sum(a[i][l] * m[l][j] for l in range(n))
                    for j in range(n)
                ]
                for i in range(n)
            ]
            for i in range(n):
                prod[i][i] += coeffs[n - k + 1]
            m = prod
        am = [
            [sum(a[i][l] * m[l][j] for l in range(n)) for j in range(n)]
            for i in range(n)
        ]
        trace = sum(am[i][i] for i in range(n))
        coeffs[n - k] = -trace / k
    return coeffs


def _radius_from_charpoly(coeffs: Sequence[Fraction], dps: int = 50) -> float:
    # The square-free part has the same root set and keeps the numerical
    # solver away from multiple roots, where it converges badly.
    squarefree = exactpoly.square_free(list(coeffs))
    if exactpoly.degree(squarefree) < 1:
        return 0.0
    with mp.workdps(dps + 10):
        poly = [
            mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in reversed(squarefree)
        ]
        try:
            roots = mp.polyroots(poly, maxsteps=200, extraprec=120)
        except mp.libmp.libhyper.NoConvergence:  # pragma: no cover
            roots = mp.polyroots(poly, maxsteps=2000, extraprec=400)
        radius = max((abs(r) for r in roots), default=mp.mpf(0))
        return float(radius)


def _exact_comparison(coeffs: list[Fraction]) -> str:
    """Certified trichotomy of the Perron root against 1.

    The Perron root is the largest real root of the characteristic
    polynomial.  A real root in (1, B] certifies GE; otherwise the root at 1
    (exact polynomial evaluation) certifies EQ; otherwise LT.
    """
    one = Fraction(1)
    q = exactpoly.square_free(coeffs)
    root_at_one = exactpoly.evaluate(q, one) == 0
    if root_at_one:
        q = exactpoly.deflate_root(q, one)
    if exactpoly.degree(q) >= 1:
        chain = exactpoly.sturm_chain(q)
        bound = exactpoly.cauchy_root_bound(q)
        if bound > 1 and exactpoly.count_roots_open(chain, one, bound) >= 1:
            return GE
    return EQ if root_at_one else LT


def _power_bounds_comparison(matrix: ThurstonMatrix, max_power: int = 64) -> Optional[str]:
    """Try to certify LT/GE from exact powers of the matrix.

    diag(A^k) > 1 forces radius > 1; max row sum of A^k < 1 forces
    radius < 1.  Returns None when undecided (ties are undecidable here).
    """
    n = matrix.dim
    power = [list(row) for row in matrix.entries]
    k = 1
    while k <= max_power:
        if any(power[i][i] > 1 for i in range(n)):
            return GE
        if max(sum(row, Fraction(0)) for row in power) < 1:
            return LT
        power = [
            [
                sum(power[i][l] * matrix.entries[l][j] for l in range(n))
                for j in range(n)
            ]
            for i in range(n)
        ]
        k += 1
    return None


def spectral_radius(matrix: ThurstonMatrix, dps: int = 50) -> SpectralCertificate:
    """Perron-root approximation plus a certified comparison against 1."""
    if matrix.dim == 0:
        return SpectralCertificate(0.0, LT, METHOD_CHARPOLY)
    method = METHOD_CHARPOLY
    comparison: Optional[str] = None
    if matrix.dim > CHARPOLY_MANDATORY_DIM:
        comparison = _power_bounds_comparison(matrix)
        if comparison is not None:
            method = METHOD_POWER
    coeffs = char_poly(matrix)
    if comparison is None:
        comparison = _exact_comparison(coeffs)
        method = METHOD_CHARPOLY
    value = _radius_from_charpoly(coeffs, dps=dps)
    return SpectralCertificate(value, comparison, method)


def is_obstruction(table: PullbackTable, multicurve: Multicurve) -> bool:
    """Stable and spectral radius >= 1 (ties count as obstructions)."""
    if not is_stable(table, multicurve):
        return False
    cert = spectral_radius(thurston_matrix(table, multicurve))
    return cert.is_obstruction_radius


def is_irreducible(matrix: ThurstonMatrix) -> bool:
    """No permutation block-triangularizes the matrix.

    Equivalent to strong connectivity (with at least one step, so a 1x1 zero
    matrix is reducible) of the digraph with an edge j -> i whenever entry
    (i, j) is nonzero.
    """
    n = matrix.dim
    if n == 0:
        return False
    reach = [[matrix.entries[i][j] != 0 for j in range(n)] for i in range(n)]
    for l in range(n):
        for i in range(n):
            if reach[i][l]:
                row_l = reach[l]
                row_i = reach[i]
                for j in range(n):
                    if row_l[j]:
                        row_i[j] = True
    return all(reach[i][j] for i in range(n) for j in range(n))


@dataclass(frozen=True)
class ObstructionRecord:
    multicurve: Multicurve
    certificate: SpectralCertificate
    stable: bool
    full: bool
    irreducible: bool

    @property
    def canonical_candidate(self) -> bool:
        return self.stable and self.full and self.irreducible


def search_obstructions(
    table: PullbackTable, universe_cap: int = DEFAULT_UNIVERSE_CAP
) -> list[ObstructionRecord]:
    """Exhaustive scan of every non-empty subset of the universe.

    Reports every stable multicurve whose radius certificate is EQ or GE;
    canonical candidates are additionally full and irreducible.  Output
    order is deterministic: by subset size, then curve order.
    """
    universe = table.universe
    if len(universe) > universe_cap:
        raise UniverseCapExceeded(
            f"universe has {len(universe)} curves, cap is {universe_cap}; "
            "raise --universe-cap if this is intended"
        )
    records: list[ObstructionRecord] = []
    for size in range(1, len(universe) + 1):
        for subset in itertools.combinations(universe, size):
            mc = Multicurve(subset)
            if not is_stable(table, mc):
                continue
            matrix = thurston_matrix(table, mc)
            # max row sum bounds the radius of a non-negative matrix, so a
            # sum below 1 discharges the subset without the exact charpoly
            if max(matrix.row_sums()) < 1:
                continue
            cert = spectral_radius(matrix)
            if not cert.is_obstruction_radius:
                continue
            records.append(
                ObstructionRecord(
                    multicurve=mc,
                    certificate=cert,
                    stable=True,
                    full=is_full(table, mc),
                    irreducible=is_irreducible(matrix),
                )
            )
    return records


@dataclass(frozen=True)
class LengthTrace:
    """Hyperbolic geodesic lengths sampled along a pullback iteration.

    The artifact never computes these lengths; they arrive as data and are
    only screened for the decay / uniform-floor dichotomy.
    """

    curves: tuple[str, ...]
    samples: tuple[tuple[float, ...], ...]

    def validate(self) -> ValidationReport:
        rb = ReportBuilder()
        width = len(self.curves)
        for n, row in enumerate(self.samples):
            if len(row) != width:
                rb.violation(f"sample {n}: {len(row)} values for {width} curves")
            for cid, value in zip(self.curves, row):
                if not value > 0:
                    rb.violation(f"sample {n}, curve {cid}: non-positive length {value}")
        return rb.build()


@dataclass(frozen=True)
class DecayDiagnostic:
    gamma_c: tuple[str, ...]
    floor_violations: tuple[str, ...]
    ratios: dict[str, float]


def length_decay_diagnostic(
    trace: LengthTrace,
    floor: float,
    decay_window: int,
    ratio_threshold: float = 0.95,
) -> DecayDiagnostic:
    """Split curves into decaying-to-zero and bounded-below-by-the-floor.

    A curve joins gamma_c when its trailing window is strictly decreasing,
    ends below the floor, and has geometric-ratio estimate below the
    threshold.  Every remaining curve must stay at or above the floor over
    the window; curves that do neither witness a breach of the expected
    decay/floor dichotomy and are reported as floor violations.
    """
    if decay_window < 2:
        raise ValueError("decay window must be at least 2")
    if len(trace.samples) < decay_window:
        raise ValueError(
            f"trace has {len(trace.samples)} samples, need at least {decay_window}"
        )
    report = trace.validate()
    if not report.ok:
        raise ValueError(f"malformed trace:\n{report}")

    gamma_c: list[str] = []
    violations: list[str] = []
    ratios: dict[str, float] = {}
    for k, cid in enumerate(trace.curves):
        tail = [row[k] for row in trace.samples[-decay_window:]]
        decreasing = all(a > b for a, b in zip(tail, tail[1:]))
        ratio = (tail[-1] / tail[0]) ** (1.0 / (decay_window - 1))
        ratios[cid] = ratio
        if decreasing and tail[-1] < floor and ratio < ratio_threshold:
            gamma_c.append(cid)
        elif min(tail) < floor:
            violations.append(
                f"curve {cid}: dips below floor {floor} (min {min(tail)}) "
                "without qualifying as decaying"
            )
    return DecayDiagnostic(tuple(gamma_c), tuple(violations), ratios)
