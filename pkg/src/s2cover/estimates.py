"""Explicit hyperbolic-geometry bounds.

Every formula is evaluated on the real slice used in the underlying
estimates, with mpmath at no less than 50 significant digits internally;
logs are natural throughout.  These are closed-form bounds, not general
hyperbolic-length computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping

import mpmath as mp

MIN_DPS = 50


@dataclass(frozen=True)
class BoundResult:
    value: Any  # mpf (or tuple of mpf for interval results)
    formula: str
    inputs: Mapping[str, Any]


def _workdps(dps: int) -> int:
    return max(MIN_DPS, dps) + 10


def collar_modulus_bounds(length, dps: int = MIN_DPS):
    """Modulus window (pi/(2l) - 1, pi/(2l)) of the collar around a geodesic.

    The lower end may be negative for long geodesics and is reported as-is.
    """
    with mp.workdps(_workdps(dps)):
        l = mp.mpf(length)
        if not l > 0:
            raise ValueError(f"geodesic length must be positive, got {length}")
        hi = mp.pi / (2 * l)
        return (hi - 1, hi)


def cayley_sqrt(z, dps: int = MIN_DPS):
    """Cayley transform of sqrt(1 - z) on the real slice 0 < z < 1.

    Strictly negative and strictly decreasing from 0 to -1; it is the
    kernel of the Poincare-density lower bound on the thrice-punctured
    sphere.
    """
    with mp.workdps(_workdps(dps)):
        x = mp.mpf(z)
        if not 0 < x < 1:
            raise ValueError(f"argument must lie in (0,1), got {z}")
        s = mp.sqrt(1 - x)
        return (s - 1) / (s + 1)


def cayley_sqrt_derivative_magnitude(z, dps: int = MIN_DPS):
    """|d/dz cayley_sqrt| = 1 / (sqrt(1-z) (1 + sqrt(1-z))^2) on (0,1)."""
    with mp.workdps(_workdps(dps)):
        x = mp.mpf(z)
        if not 0 < x < 1:
            raise ValueError(f"argument must lie in (0,1), got {z}")
        s = mp.sqrt(1 - x)
        return 1 / (s * (1 + s) ** 2)


def cut_radius(k1, dps: int = MIN_DPS):
    """r0 = 1 / (2 e^(2 K1)): radius confining a capped disk of collar modulus K1."""
    with mp.workdps(_workdps(dps)):
        k = mp.mpf(k1)
        if not k > 0:
            raise ValueError(f"K1 must be positive, got {k1}")
        return 1 / (2 * mp.e ** (2 * k))


def crossing_length_floor(k1, dps: int = MIN_DPS):
    """C = log((4 - log(-zeta(r0))) / (4 - log(-zeta(1/2)))) with zeta = cayley_sqrt.

    Lower bound for the hyperbolic length of an arc crossing from radius r0
    out to radius 1/2; strictly positive and increasing in K1.
    """
    with mp.workdps(_workdps(dps)):
        r = cut_radius(k1, dps)
        half = mp.mpf(1) / 2
        num = 4 - mp.log(-cayley_sqrt(r, dps))
        den = 4 - mp.log(-cayley_sqrt(half, dps))
        return mp.log(num / den)


def thin_cut_lower_bound(k, k1, dps: int = MIN_DPS):
    """Uniform length floor on the capped surface.

    min(pi K / (2 pi + 2 K), pi C / (4 + 2 C)) where K floors the lengths
    away from the capped curves and C = crossing_length_floor(K1).
    """
    with mp.workdps(_workdps(dps)):
        kk = mp.mpf(k)
        if not kk > 0:
            raise ValueError(f"K must be positive, got {k}")
        c = crossing_length_floor(k1, dps)
        first = mp.pi * kk / (2 * mp.pi + 2 * kk)
        second = mp.pi * c / (4 + 2 * c)
        return min(first, second)


def separation_modulus_bound(abs_z, dps: int = MIN_DPS):
    """Upper modulus (1/2pi) log(|z| + 1) of an annulus separating {0,1} from {z,oo}."""
    with mp.workdps(_workdps(dps)):
        r = mp.mpf(abs_z)
        if not r > 0:
            raise ValueError(f"|z| must be positive, got {abs_z}")
        return mp.log(r + 1) / (2 * mp.pi)


def poincare_density_lower(x, dps: int = MIN_DPS):
    """Lower bound for the Poincare density of the thrice-punctured sphere.

    (|zeta'(x)| / |zeta(x)|) / (4 - log |zeta(x)|) on the real slice, with
    zeta = cayley_sqrt.  Its antiderivative is -log(4 - log(-zeta)), which
    is how crossing_length_floor arises as its integral from r0 to 1/2.
    """
    with mp.workdps(_workdps(dps)):
        xx = mp.mpf(x)
        if not 0 < xx < 1:
            raise ValueError(f"argument must lie in (0,1), got {x}")
        mag = -cayley_sqrt(xx, dps)
        dmag = cayley_sqrt_derivative_magnitude(xx, dps)
        return (dmag / mag) / (4 - mp.log(mag))


def capped_length_lower_bound(l_e, c, dps: int = MIN_DPS):
    """l_Q >= l_E / (1 + (2c/pi) l_E): disk-complement length from puncture length.

    c > 1 is the collar-defect constant; it is caller-supplied because only
    its existence is established.
    """
    with mp.workdps(_workdps(dps)):
        le = mp.mpf(l_e)
        cc = mp.mpf(c)
        if not le > 0:
            raise ValueError(f"length must be positive, got {l_e}")
        if not cc > 1:
            raise ValueError(f"constant c must exceed 1, got {c}")
        return le / (1 + (2 * cc / mp.pi) * le)


def capped_length_ceiling(l_e, epsilon, dps: int = MIN_DPS):
    """Upper bound l_E / (1 - eps) on the disk-complement length.

    Scaffold of the short-curve comparison: once l_E is below the
    (non-constructive) threshold, l_E > (1 - eps) l_Q.
    """
    with mp.workdps(_workdps(dps)):
        le = mp.mpf(l_e)
        ee = mp.mpf(epsilon)
        if not le > 0:
            raise ValueError(f"length must be positive, got {l_e}")
        if not 0 < ee < 1:
            raise ValueError(f"epsilon must lie in (0,1), got {epsilon}")
        return le / (1 - ee)


FORMULAS: dict[str, tuple[Callable[..., Any], tuple[str, ...]]] = {
    "collar": (collar_modulus_bounds, ("l",)),
    "cayley-sqrt": (cayley_sqrt, ("z",)),
    "cut-radius": (cut_radius, ("K1",)),
    "crossing-floor": (crossing_length_floor, ("K1",)),
    "thin-cut": (thin_cut_lower_bound, ("K", "K1")),
    "separation": (separation_modulus_bound, ("abs-z",)),
    "density-lower": (poincare_density_lower, ("x",)),
    "capped-lower": (capped_length_lower_bound, ("lE", "c")),
    "capped-ceiling": (capped_length_ceiling, ("lE", "epsilon")),
}


def evaluate_formula(name: str, params: Mapping[str, Any], dps: int = MIN_DPS) -> BoundResult:
    """Evaluate a named formula; used by the CLI estimates subcommand."""
    if name not in FORMULAS:
        known = ", ".join(sorted(FORMULAS))
        raise ValueError(f"unknown formula {name!r}; known: {known}")
    func, argnames = FORMULAS[name]
    missing = [a for a in argnames if a not in params]
    if missing:
        raise ValueError(f"formula {name!r} needs parameters: {', '.join(missing)}")
    args = [params[a] for a in argnames]
    value = func(*args, dps=dps)
    return BoundResult(value=value, formula=name, inputs={a: params[a] for a in argnames})
