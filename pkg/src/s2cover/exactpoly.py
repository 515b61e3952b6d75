"""Exact univariate polynomial arithmetic over the rationals.

Polynomials are lists of Fractions in ascending power order (index =
exponent), trailing zeros stripped.  Everything here is exact; it backs the
certified spectral-radius comparison, where floating point is advisory only.
"""

from __future__ import annotations

from fractions import Fraction

Poly = list[Fraction]


def strip(p: Poly) -> Poly:
    q = list(p)
    while q and q[-1] == 0:
        q.pop()
    return q


def degree(p: Poly) -> int:
    return len(p) - 1


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return strip([c * k for k, c in enumerate(p)][1:])


def divmod_poly(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    den = strip(den)
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    rem = strip(num)
    if len(rem) < len(den):
        return [], rem
    quo = [Fraction(0)] * (len(rem) - len(den) + 1)
    dc = den[-1]
    while rem and len(rem) >= len(den):
        shift = len(rem) - len(den)
        factor = rem[-1] / dc
        quo[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] -= factor * c
        rem = strip(rem)  # top term cancels exactly
    return strip(quo), rem


def gcd_poly(a: Poly, b: Poly) -> Poly:
    a, b = strip(a), strip(b)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, strip(r)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def square_free(p: Poly) -> Poly:
    """p divided by gcd(p, p'); same roots, all simple, positive leading sign."""
    p = strip(p)
    if degree(p) <= 1:
        q = list(p)
    else:
        g = gcd_poly(p, derivative(p))
        q, r = divmod_poly(p, g)
        if strip(r):
            raise ArithmeticError("square-free division left a remainder")
    q = strip(q)
    if q and q[-1] < 0:
        q = [-c for c in q]
    return q


def sturm_chain(p: Poly) -> list[Poly]:
    """Canonical Sturm chain of the square-free part of p."""
    p0 = square_free(p)
    chain = [p0, derivative(p0)]
    while strip(chain[-1]):
        _, r = divmod_poly(chain[-2], chain[-1])
        r = strip(r)
        if not r:
            break
        chain.append([-c for c in r])
    return [c for c in chain if strip(c)]


def _variations(chain: list[Poly], x: Fraction) -> int:
    signs = []
    for q in chain:
        v = evaluate(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_open(chain: list[Poly], a: Fraction, b: Fraction) -> int:
    """Distinct real roots of the chain's polynomial in (a, b].

    Assumes the chain is built from a square-free polynomial; endpoint a may
    be a root (zero entries are skipped in sign-variation counting, which
    excludes a itself).
    """
    return _variations(chain, a) - _variations(chain, b)


def cauchy_root_bound(p: Poly) -> Fraction:
    """B with all real roots of p in [-B, B]."""
    p = strip(p)
    if degree(p) < 1:
        return Fraction(1)
    lead = abs(p[-1])
    mx = max((abs(c) for c in p[:-1]), default=Fraction(0))
    return Fraction(1) + mx / lead


def deflate_root(p: Poly, r: Fraction) -> Poly:
    """Divide out (x - r); requires p(r) == 0."""
    if evaluate(p, r) != 0:
        raise ArithmeticError(f"{r} is not a root")
    q, rem = divmod_poly(p, [-r, Fraction(1)])
    if strip(rem):
        raise ArithmeticError("deflation left a remainder")
    return q


def largest_real_root_bracket(
    p: Poly, width: Fraction = Fraction(1, 10**30)
) -> tuple[Fraction, Fraction] | None:
    """Shrinking bracket around the largest real root, or None if no real root.

    Bisection on the Sturm count of roots in (mid, B]; exact throughout.
    """
    q = square_free(p)
    if degree(q) < 1:
        return None
    chain = sturm_chain(q)
    bound = cauchy_root_bound(q)
    lo, hi = -bound, bound
    if count_roots_open(chain, lo, hi) == 0 and evaluate(q, lo) != 0:
        return None
    while hi - lo > width:
        mid = (lo + hi) / 2
        if evaluate(q, mid) == 0:
            # mid is the largest root iff nothing lies above it
            if count_roots_open(chain, mid, bound) == 0:
                return (mid, mid)
            lo = mid
            continue
        if count_roots_open(chain, mid, bound) >= 1:
            lo = mid
        else:
            hi = mid
    return (lo, hi)
