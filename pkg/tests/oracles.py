"""Independent oracle implementations used only by the tests.

Deliberately different algorithms from the package: the characteristic
polynomial is computed with the division-free Berkowitz recursion (the
package uses Faddeev-LeVerrier) and real-root counting uses Descartes
bisection (the package uses Sturm chains).  Matrix powers and random data
generators for the property suites also live here.
"""

from __future__ import annotations

import random
from fractions import Fraction

from s2cover.curves import (
    Multicurve,
    PreimageComponent,
    PullbackTable,
    TRIVIAL,
    curve,
    is_stable,
    peripheral,
)
from s2cover.decomposition import (
    BoundaryCurveRef,
    Level1Annulus,
    Level1Piece,
    Piece,
    StandardFormSpec,
    ThinAnnulus,
)
from s2cover.model import CoveringSpec, MarkedPoint

Matrix = list[list[Fraction]]


# ---------------------------------------------------------------------------
# Exact matrix arithmetic


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)
    ]


def mat_power(a: Matrix, k: int) -> Matrix:
    n = len(a)
    out = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(k):
        out = mat_mul(out, a)
    return out


# ---------------------------------------------------------------------------
# Berkowitz characteristic polynomial (division-free)


def berkowitz_charpoly(a: Matrix) -> list[Fraction]:
    """Coefficients of det(xI - A), ascending order."""
    n = len(a)
    if n == 0:
        return [Fraction(1)]
    poly = [Fraction(1), -a[0][0]]  # descending, 1x1 block
    for i in range(1, n):
        row = a[i][:i]
        col = [a[k][i] for k in range(i)]
        block = [r[:i] for r in a[:i]]
        toeplitz = [Fraction(1), -a[i][i]]
        vec = col[:]
        for _ in range(i):
            toeplitz.append(-sum(x * y for x, y in zip(row, vec)))
            vec = [sum(block[r][c] * vec[c] for c in range(i)) for r in range(i)]
        new = [Fraction(0)] * (i + 2)
        for r in range(i + 2):
            total = Fraction(0)
            for c in range(min(r + 1, i + 1)):
                total += toeplitz[r - c] * poly[c]
            new[r] = total
        poly = new
    return list(reversed(poly))


# ---------------------------------------------------------------------------
# Descartes / bisection real-root counting


def _poly_eval(p: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _strip(p: list[Fraction]) -> list[Fraction]:
    q = list(p)
    while q and q[-1] == 0:
        q.pop()
    return q


def _poly_derivative(p: list[Fraction]) -> list[Fraction]:
    return _strip([k * c for k, c in enumerate(p)][1:])


def _poly_divmod(num, den):
    den = _strip(den)
    rem = _strip(num)
    if len(rem) < len(den):
        return [], rem
    quo = [Fraction(0)] * (len(rem) - len(den) + 1)
    while rem and len(rem) >= len(den):
        shift = len(rem) - len(den)
        factor = rem[-1] / den[-1]
        quo[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] -= factor * c
        rem = _strip(rem)
    return _strip(quo), rem


def _poly_gcd(x, y):
    x, y = _strip(x), _strip(y)
    while y:
        _, r = _poly_divmod(x, y)
        x, y = y, _strip(r)
    if x:
        x = [c / x[-1] for c in x]
    return x


def oracle_square_free(p: list[Fraction]) -> list[Fraction]:
    p = _strip(p)
    if len(p) <= 2:
        q = p
    else:
        g = _poly_gcd(p, _poly_derivative(p))
        q, r = _poly_divmod(p, g)
        assert not _strip(r)
    q = _strip(q)
    if q and q[-1] < 0:
        q = [-c for c in q]
    return q


def _taylor_shift(p: list[Fraction], c: Fraction) -> list[Fraction]:
    """p(x + c), by Horner in (x + c)."""
    out: list[Fraction] = []
    for coeff in reversed(p):
        # out := out * (x + c) + coeff
        shifted = [Fraction(0)] + out
        for i in range(len(out)):
            shifted[i] += c * out[i]
        out = shifted if shifted else [Fraction(0)]
        out[0] += coeff
    return _strip(out)


def _variations(coeffs: list[Fraction]) -> int:
    signs = [1 if c > 0 else -1 for c in coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _mobius_01_variations(p: list[Fraction]) -> int:
    """Sign variations of (1+x)^n p(1/(1+x)); bounds roots in (0,1)."""
    rev = list(reversed(_strip(p)))
    return _variations(_taylor_shift(rev, Fraction(1)))


def _count_open_01(p: list[Fraction]) -> int:
    """Distinct roots of square-free p in the open interval (0,1)."""
    v = _mobius_01_variations(p)
    if v == 0:
        return 0
    if v == 1:
        return 1
    half = Fraction(1, 2)
    left = _strip([c / (2**k) for k, c in enumerate(p)])  # p(x/2) on (0,1)
    right = _taylor_shift(left, Fraction(1))  # p((x+1)/2)
    at_half = 1 if _poly_eval(p, half) == 0 else 0
    return _count_open_01(left) + at_half + _count_open_01(right)


def oracle_count_roots_above_one(p: list[Fraction]) -> int:
    """Distinct real roots of p strictly greater than 1."""
    q = oracle_square_free(p)
    if len(q) <= 1:
        return 0
    bound = Fraction(2) + max(abs(c) for c in q[:-1]) / abs(q[-1])
    shifted = _taylor_shift(q, Fraction(1))  # roots > 1 become roots > 0
    width = bound - 1
    scaled = _strip(
        [c * (width**k) for k, c in enumerate(shifted)]
    )  # roots in (0,1) now cover (1, bound)
    count = _count_open_01(scaled)
    if _poly_eval(q, bound) == 0:
        count += 1
    return count


def oracle_comparison_vs_1(entries: Matrix) -> str:
    """Trichotomy of the Perron root against 1, certified independently."""
    p = berkowitz_charpoly(entries)
    if oracle_count_roots_above_one(p) >= 1:
        return "GE"
    if _poly_eval(p, Fraction(1)) == 0:
        return "EQ"
    return "LT"


# ---------------------------------------------------------------------------
# Random generators


def random_matrix(rng: random.Random, dim: int, pool) -> Matrix:
    return [[Fraction(rng.choice(pool)) for _ in range(dim)] for _ in range(dim)]


def _random_composition(rng: random.Random, total: int) -> list[int]:
    parts = []
    left = total
    while left > 0:
        part = rng.randint(1, left)
        parts.append(part)
        left -= part
    rng.shuffle(parts)
    return parts


def random_table(
    rng: random.Random, max_universe: int = 5, max_degree: int = 4
) -> PullbackTable:
    """Random valid table, closed under composition (all peripherals present).

    Every curve-class component references the universe, so the full
    universe is always stable.
    """
    size = rng.randint(1, max_universe)
    degree = rng.randint(2, max_degree)
    universe = tuple(f"c{i}" for i in range(size))
    points = tuple(f"x{i}" for i in range(rng.randint(1, 3)))

    def random_components(allow_curves: bool) -> tuple[PreimageComponent, ...]:
        comps = []
        for part in _random_composition(rng, degree):
            kind = rng.random()
            if allow_curves and kind < 0.5:
                comps.append(PreimageComponent(curve(rng.choice(universe)), part))
            elif kind < 0.75:
                comps.append(PreimageComponent(peripheral(rng.choice(points)), part))
            else:
                comps.append(PreimageComponent(TRIVIAL, part))
        return tuple(comps)

    entries = {curve(c): random_components(True) for c in universe}
    # Peripheral classes pull back to peripheral/trivial classes only; this
    # is what makes the iterate identity an exact matrix equality (curve
    # contributions routed through a peripheral class would be invisible to
    # the matrix power).
    for p in points:
        entries[peripheral(p)] = random_components(False)
    return PullbackTable(degree, universe, entries)


def random_stable_multicurve(rng: random.Random, table: PullbackTable) -> Multicurve:
    """Stability closure of a random non-empty seed subset."""
    seed = set(rng.sample(table.universe, rng.randint(1, len(table.universe))))
    changed = True
    while changed:
        changed = False
        for cid in sorted(seed):
            for comp in table.entry(curve(cid)):
                if comp.cls.kind == "curve" and comp.cls.ref not in seed:
                    seed.add(comp.cls.ref)
                    changed = True
    mc = Multicurve(tuple(cid for cid in table.universe if cid in seed))
    assert is_stable(table, mc)
    return mc


def random_portrait(rng: random.Random, max_degree: int = 4) -> CoveringSpec:
    """Random valid declared-complete portrait."""
    degree = rng.randint(2, max_degree)
    n_points = rng.randint(max(3, degree), 2 * degree + 4)
    ids = [f"m{i}" for i in range(n_points)]

    degrees = {pid: 1 for pid in ids}
    budget = 2 * degree - 2
    k = 0
    while budget > 0:
        part = rng.randint(1, min(degree - 1, budget))
        pid = ids[k % n_points]
        if degrees[pid] + part <= degree:
            degrees[pid] += part
            budget -= part
        k += 1

    incoming = {pid: 0 for pid in ids}
    images = {}
    for pid in ids:
        options = [t for t in ids if incoming[t] + degrees[pid] <= degree]
        target = rng.choice(options)
        images[pid] = target
        incoming[target] += degrees[pid]
    points = tuple(MarkedPoint(pid, images[pid], degrees[pid]) for pid in ids)
    return CoveringSpec(degree=degree, points=points)


def random_standard_form(rng: random.Random, max_pieces: int = 6) -> StandardFormSpec:
    """Random valid standard form: a chain of pieces with a random piece map.

    Pieces P0 | A1 | P1 | ... | An | Pn in a chain; each piece gets a carrier
    plus disk filler components so every structural condition holds.
    """
    n = rng.randint(1, max_pieces - 1)  # number of thin annuli
    piece_ids = [f"P{i}" for i in range(n + 1)]
    annuli0 = tuple(ThinAnnulus(f"A0{i}", f"core{i}") for i in range(n))
    annuli1 = tuple(
        Level1Annulus(f"A1{i}", f"A0{rng.randrange(n)}", f"A0{i}", f"A0{i}", rng.randint(1, 3), ("+", "-"))
        for i in range(n)
    )

    def boundary_of(i: int) -> tuple[str, ...]:
        curves = []
        if i > 0:
            curves.append(f"b{i}R")
        if i < n:
            curves.append(f"b{i + 1}L")
        return tuple(curves)

    pieces = tuple(
        Piece(pid, boundary_of(i), (f"pt{i}a", f"pt{i}b"))
        for i, pid in enumerate(piece_ids)
    )
    tau = {pid: rng.choice(piece_ids) for pid in piece_ids}
    level1 = [
        Level1Piece(
            f"carrier{i}",
            tau[pid],
            rng.randint(1, 3),
            pid,
            tuple(BoundaryCurveRef(b, "inherited") for b in boundary_of(i))
            + (BoundaryCurveRef(f"per{i}", "peripheral"),),
            (f"pt{i}a",),
        )
        for i, pid in enumerate(piece_ids)
    ]
    for j in range(rng.randint(0, 3)):
        level1.append(
            Level1Piece(
                f"disk{j}",
                rng.choice(piece_ids),
                rng.randint(1, 2),
                rng.choice(piece_ids),
                (BoundaryCurveRef(f"dper{j}", "peripheral"),),
                (),
            )
        )
    return StandardFormSpec(annuli0, annuli1, pieces, tuple(level1))
