"""Marked spheres and branched-covering portraits.

A covering is described combinatorially: a finite set of marked points with
forward images and local degrees, optional accumulation-cycle data for the
geometrically finite case, and an optional shield (disks plus attached
annuli) that encodes an infinite marked set by finite means.  All dynamics
downstream (signatures, orbifolds, classification) read only this data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, Optional

from .report import ReportBuilder, ValidationReport

ROLE_POSTCRITICAL = "postcritical"
ROLE_EXTRA = "extra-marked"
ROLE_DISK_CENTER = "disk-center"
ROLES = (ROLE_POSTCRITICAL, ROLE_EXTRA, ROLE_DISK_CENTER)

ATTRACTING = "attracting"
SUPERATTRACTING = "superattracting"


class PortraitError(ValueError):
    """A portrait is structurally unusable for the requested operation."""


class NotSemiRationalError(ValueError):
    """An infinite marked set whose cycle data breaks the local-model bounds."""


class Infinity:
    """The distinguished infinite signature value.

    Not a number: arithmetic rules (1 - 1/oo = 1, divisibility by anything)
    are implemented where needed instead of overloading operators.
    """

    _instance: Optional["Infinity"] = None

    def __new__(cls) -> "Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "oo"


INF = Infinity()


@dataclass(frozen=True)
class MarkedPoint:
    id: str
    image: str
    local_degree: int = 1
    role: str = ROLE_POSTCRITICAL

    @property
    def is_critical(self) -> bool:
        return self.local_degree >= 2


@dataclass(frozen=True)
class AccumulationCycle:
    """A periodic accumulation orbit with its local model data.

    ``kind`` is "attracting" (multiplier modulus strictly inside (0,1)) or
    "superattracting" (leading power >= 2).  Moduli are kept exact so the
    0 < |lambda| < 1 bound is decided without rounding.
    """

    points: tuple[str, ...]
    kind: str
    multiplier: Optional[Fraction] = None
    power: Optional[int] = None


@dataclass(frozen=True)
class ShieldDisk:
    id: str
    center: str
    boundary_anchor: str


@dataclass(frozen=True)
class ShieldAnnulus:
    id: str
    attached_to: str


@dataclass(frozen=True)
class ShieldedStructure:
    """Disks around accumulation cycles plus their isolating annuli.

    ``image`` records, per disk, the disk that contains the image of the
    closed disk together with its attached annulus.
    """

    disks: tuple[ShieldDisk, ...]
    annuli: tuple[ShieldAnnulus, ...]
    image: Mapping[str, str]

    def disk_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.disks)


@dataclass(frozen=True)
class CoveringSpec:
    degree: int
    points: tuple[MarkedPoint, ...]
    cycles: tuple[AccumulationCycle, ...] = ()
    shield: Optional[ShieldedStructure] = None
    p_finite: bool = True
    declared_complete: bool = True

    def point_map(self) -> dict[str, MarkedPoint]:
        return {p.id: p for p in self.points}

    def point(self, pid: str) -> MarkedPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)


@dataclass(frozen=True)
class OrbifoldSignature:
    """The signature nu over the declared points and the exact Euler value.

    Points absent from ``nu`` have signature 1 and contribute nothing to
    chi.  chi is exact; for genuinely infinite postcritical sets it is only
    the declared-point part (the unenumerated tail in the shield disks is
    not summed; see the user guide).
    """

    nu: Mapping[str, object]  # int >= 1 or INF
    chi: Fraction


HYPERBOLIC = "hyperbolic"
PARABOLIC = "parabolic"
SPHERICAL = "spherical"

PCF_TYPE = "pcf-type"
SHSR_TYPE = "shsr-type"


def validate_spec(spec: CoveringSpec) -> ValidationReport:
    """Consistency gate: reports every violated portrait invariant."""
    rb = ReportBuilder()
    ids = [p.id for p in spec.points]
    idset = set(ids)
    if len(ids) != len(idset):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        rb.violation(f"duplicate marked-point ids: {', '.join(dupes)}")
    if spec.degree < 2:
        rb.violation(f"degree {spec.degree} < 2")

    for p in spec.points:
        if p.local_degree < 1:
            rb.violation(f"point {p.id}: local degree {p.local_degree} < 1")
        if p.image not in idset:
            rb.violation(f"point {p.id}: image {p.image!r} is not a declared point")
        if p.role not in ROLES:
            rb.violation(f"point {p.id}: unknown role {p.role!r}")

    if spec.declared_complete:
        total = sum(p.local_degree - 1 for p in spec.points)
        expected = 2 * spec.degree - 2
        if total != expected:
            rb.violation(
                f"Riemann-Hurwitz: sum of (local_degree - 1) is {total}, "
                f"expected {expected} (residual {total - expected})"
            )

    # No declared point may receive more preimage multiplicity than the
    # degree.  Disk centers are exempt: mapping to a center encodes "orbit
    # enters the disk", and a disk absorbs any number of orbits.
    centers = (
        {d.center for d in spec.shield.disks} if spec.shield is not None else set()
    )
    incoming: dict[str, int] = {}
    for p in spec.points:
        if p.image in idset and p.image not in centers:
            incoming[p.image] = incoming.get(p.image, 0) + p.local_degree
    for target, mult in sorted(incoming.items()):
        if mult > spec.degree:
            rb.violation(
                f"point {target}: declared preimages carry multiplicity {mult} "
                f"> degree {spec.degree}"
            )

    point_by_id = {p.id: p for p in spec.points}
    for cyc in spec.cycles:
        if not cyc.points:
            rb.violation("empty accumulation cycle")
            continue
        for pid in cyc.points:
            if pid not in idset:
                rb.violation(f"cycle references undeclared point {pid!r}")
        declared = [pid for pid in cyc.points if pid in idset]
        if len(declared) == len(cyc.points):
            n = len(cyc.points)
            for k, pid in enumerate(cyc.points):
                img = point_by_id[pid].image
                if img != cyc.points[(k + 1) % n]:
                    rb.violation(
                        f"cycle {cyc.points}: {pid} maps to {img}, breaking the cycle"
                    )
                    break
        if cyc.kind == ATTRACTING:
            if cyc.multiplier is None or not (0 < abs(cyc.multiplier) < 1):
                rb.violation(
                    f"attracting cycle {cyc.points}: multiplier modulus "
                    f"{cyc.multiplier} not strictly inside (0,1)"
                )
        elif cyc.kind == SUPERATTRACTING:
            if cyc.power is None or cyc.power < 2:
                rb.violation(
                    f"superattracting cycle {cyc.points}: power {cyc.power} < 2"
                )
        else:
            rb.violation(f"cycle {cyc.points}: unknown kind {cyc.kind!r}")

    if spec.shield is not None:
        sh = spec.shield
        disk_ids = [d.id for d in sh.disks]
        if len(disk_ids) != len(set(disk_ids)):
            rb.violation("duplicate shield disk ids")
        for d in sh.disks:
            if d.center not in idset:
                rb.violation(f"shield disk {d.id}: center {d.center!r} undeclared")
            if d.boundary_anchor not in idset:
                rb.violation(
                    f"shield disk {d.id}: boundary anchor {d.boundary_anchor!r} undeclared"
                )
        for a in sh.annuli:
            if a.attached_to not in disk_ids:
                rb.violation(f"shield annulus {a.id}: attached to unknown disk {a.attached_to!r}")
        for src in disk_ids:
            if src not in sh.image:
                rb.violation(f"shield disk {src}: no image disk declared")
        for src, dst in sorted(sh.image.items()):
            if src not in disk_ids or dst not in disk_ids:
                rb.violation(f"shield image {src} -> {dst} references unknown disk")

    if not spec.p_finite and spec.shield is None and not spec.cycles:
        rb.warning(
            "marked set declared infinite but neither cycles nor a shield are given"
        )
    return rb.build()


def postcritical_set(spec: CoveringSpec) -> frozenset[str]:
    """Forward orbit of every critical value inside the declared points.

    Disk centers reachable through the shield image map are included: once
    an orbit is absorbed into a shield disk the center stands in for the
    unenumerated points inside.
    """
    points = spec.point_map()
    center_to_disk: dict[str, str] = {}
    disk_to_center: dict[str, str] = {}
    if spec.shield is not None:
        for d in spec.shield.disks:
            center_to_disk[d.center] = d.id
            disk_to_center[d.id] = d.center

    result: set[str] = set()
    frontier: list[str] = []
    for p in spec.points:
        if p.is_critical:
            frontier.append(p.image)
    while frontier:
        pid = frontier.pop()
        if pid in result:
            continue
        if pid not in points:
            raise PortraitError(f"portrait incomplete: orbit reaches undeclared point {pid!r}")
        result.add(pid)
        frontier.append(points[pid].image)
        if pid in center_to_disk and spec.shield is not None:
            nxt = spec.shield.image.get(center_to_disk[pid])
            if nxt is not None and nxt in disk_to_center:
                frontier.append(disk_to_center[nxt])
    return frozenset(result)


def _image_cycles(spec: CoveringSpec) -> list[list[str]]:
    """Periodic cycles of the declared image map."""
    points = spec.point_map()
    color: dict[str, int] = {}
    cycles: list[list[str]] = []
    for start in points:
        if start in color:
            continue
        path: list[str] = []
        seen_at: dict[str, int] = {}
        cur = start
        while cur in points and cur not in color and cur not in seen_at:
            seen_at[cur] = len(path)
            path.append(cur)
            cur = points[cur].image
        if cur in seen_at:
            cycles.append(path[seen_at[cur]:])
        for pid in path:
            color[pid] = 1
    return cycles


def compute_signature(spec: CoveringSpec) -> OrbifoldSignature:
    """Least signature satisfying the divisibility closure.

    nu(f(y)) must be divisible by local_degree(y) * nu(y) for every declared
    y; the fixpoint is reached by repeated lcm updates.  Infinite values are
    seeded on every image-map cycle containing a critical point and on every
    declared accumulation cycle (both attracting and superattracting, which
    also covers shield disk centers sitting on those cycles).
    """
    report = validate_spec(spec)
    if not report.ok:
        raise PortraitError(f"invalid portrait:\n{report}")
    postcritical_set(spec)  # raises on incomplete portraits

    points = spec.point_map()
    nu: dict[str, object] = {pid: 1 for pid in points}

    for cyc in _image_cycles(spec):
        if any(points[pid].is_critical for pid in cyc):
            for pid in cyc:
                nu[pid] = INF
    for acc in spec.cycles:
        for pid in acc.points:
            if pid in nu:
                nu[pid] = INF

    changed = True
    rounds = 0
    limit = 4 * len(points) + 8
    while changed:
        changed = False
        rounds += 1
        if rounds > limit:  # impossible on finite portraits; guards bad edits
            raise PortraitError("signature fixpoint failed to terminate")
        for p in spec.points:
            target = p.image
            src = nu[p.id]
            if src is INF:
                if nu[target] is not INF:
                    nu[target] = INF
                    changed = True
                continue
            if nu[target] is INF:
                continue
            required = p.local_degree * src  # type: ignore[operator]
            merged = lcm(nu[target], required)  # type: ignore[arg-type]
            if merged != nu[target]:
                nu[target] = merged
                changed = True

    trimmed = {pid: v for pid, v in nu.items() if v is INF or v != 1}
    sig = OrbifoldSignature(nu=trimmed, chi=Fraction(0))
    return OrbifoldSignature(nu=trimmed, chi=euler_characteristic(sig))


def euler_characteristic(sig: OrbifoldSignature) -> Fraction:
    """2 - sum(1 - 1/nu) with 1 - 1/oo contributing exactly 1."""
    total = Fraction(0)
    for value in sig.nu.values():
        if value is INF:
            total += 1
        else:
            total += 1 - Fraction(1, value)  # type: ignore[arg-type]
    return Fraction(2) - total


def orbifold_type(sig: OrbifoldSignature) -> str:
    """Hyperbolic iff chi < 0, parabolic iff chi = 0, spherical otherwise.

    Spherical is anomalous for portraits whose marked set carries the whole
    postcritical set; callers surface that flag in reports.
    """
    if sig.chi < 0:
        return HYPERBOLIC
    if sig.chi == 0:
        return PARABOLIC
    return SPHERICAL


def classify_type(spec: CoveringSpec) -> str:
    """Partition valid specs into PCF-type and SHSR-type.

    PCF-type: the marked set is finite and forward invariant and carries the
    postcritical set.  SHSR-type: the marked set is infinite and every
    accumulation cycle satisfies the local-model bounds.
    """
    report = validate_spec(spec)
    if not report.ok:
        raise PortraitError(f"invalid portrait:\n{report}")
    postcritical_set(spec)  # P_f subset of declared points, or raises

    if spec.p_finite:
        return PCF_TYPE

    if not spec.cycles:
        raise NotSemiRationalError(
            "infinite marked set but no accumulation cycles declared"
        )
    for cyc in spec.cycles:
        if cyc.kind == ATTRACTING:
            if cyc.multiplier is None or not (0 < abs(cyc.multiplier) < 1):
                raise NotSemiRationalError(
                    f"not semi-rational: attracting cycle {cyc.points} has "
                    f"multiplier modulus {cyc.multiplier}, not in (0,1)"
                )
        elif cyc.kind == SUPERATTRACTING:
            if cyc.power is None or cyc.power < 2:
                raise NotSemiRationalError(
                    f"not semi-rational: superattracting cycle {cyc.points} "
                    f"has power {cyc.power} < 2"
                )
        else:
            raise NotSemiRationalError(f"unknown cycle kind {cyc.kind!r}")
    return SHSR_TYPE
