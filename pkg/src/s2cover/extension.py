"""Extension of a periodic thick piece to a branched covering of the sphere.

Each boundary curve of the piece is capped with a disk carrying one new
marked point; the covering on the caps is a power map of the declared
boundary degree, so only the induced local degrees and point dynamics are
represented.  The result is classified, its pullback table on interior
curves is derived, and the realizability verdict is assembled from the
orbifold precondition plus an obstruction search on that induced table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from .curves import (
    KIND_CURVE,
    KIND_PERIPHERAL,
    KIND_TRIVIAL,
    CurveClass,
    Multicurve,
    PreimageComponent,
    PullbackTable,
    TRIVIAL,
    compose_table,
    curve,
    peripheral,
    validate_table,
)
from .linalg import (
    DEFAULT_UNIVERSE_CAP,
    ObstructionRecord,
    search_obstructions,
)
from .model import (
    HYPERBOLIC,
    PCF_TYPE,
    ROLE_EXTRA,
    CoveringSpec,
    MarkedPoint,
    OrbifoldSignature,
    classify_type,
    compute_signature,
    orbifold_type,
)
from .report import ReportBuilder, ValidationReport

PLACE_INTERIOR = "interior"
PLACE_OUTSIDE = "outside"

DEFAULT_MULTIPLIER = Fraction(1, 2)


class ExtensionError(ValueError):
    """Periodic-piece data cannot be extended as declared."""


@dataclass(frozen=True)
class BoundaryCurve:
    """A boundary curve of the periodic piece: its class, image and degree."""

    curve: str
    image: int  # 1-based index into the gamma list
    degree: int


@dataclass(frozen=True)
class PeripheralCap:
    """A peripheral boundary curve of the level-k piece, bounding a cap disk.

    ``interior_marked`` names the marked point sitting at the branch center
    of the disk, when the disk carries one.
    """

    target: int  # 1-based index of the gamma curve it covers
    degree: int
    interior_marked: Optional[str] = None


@dataclass(frozen=True)
class Placement:
    """Containment flags for pullback classes relative to the piece."""

    curves: Mapping[str, str] = field(default_factory=dict)
    points: Mapping[str, str] = field(default_factory=dict)
    trivial: str = PLACE_INTERIOR


@dataclass(frozen=True)
class PeriodicPieceData:
    piece: str
    period: int
    piece_degree: int
    gamma: tuple[BoundaryCurve, ...]
    beta: tuple[PeripheralCap, ...]
    interior_portrait: CoveringSpec
    interior_curves: tuple[str, ...] = ()
    placement: Placement = field(default_factory=Placement)


@dataclass(frozen=True)
class ZCycle:
    points: tuple[str, ...]
    degree_product: int
    kind: str  # "superattracting" or "attracting"
    multiplier: Optional[Fraction]
    default_multiplier_applied: bool


@dataclass(frozen=True)
class ExtendedCovering:
    spec: CoveringSpec
    new_marked: tuple[str, ...]
    new_cycles: tuple[ZCycle, ...]
    p_set: tuple[str, ...]
    classification: str
    z_of_boundary: Mapping[int, str]  # 1-based gamma index -> new point id


@dataclass(frozen=True)
class Verdict:
    status: str  # "realizable", "obstructed" or "precondition-failed"
    classification: str
    signature: OrbifoldSignature
    chi: Fraction
    orbifold: str
    obstructions: tuple[ObstructionRecord, ...]
    statement: str
    notes: tuple[str, ...]


def _interior_critical_ids(data: PeriodicPieceData) -> list[MarkedPoint]:
    """Interior critical points, excluding cap centers counted via beta."""
    capped = {b.interior_marked for b in data.beta if b.interior_marked}
    return [
        p
        for p in data.interior_portrait.points
        if p.is_critical and p.id not in capped
    ]


def validate_extension(data: PeriodicPieceData) -> ValidationReport:
    """Degree bookkeeping forced by the capping construction.

    For every boundary index m the cap disks covering it (peripheral caps
    targeting m, boundary disks mapping to m) must carry total degree equal
    to the piece degree, and the extended covering must satisfy
    Riemann-Hurwitz exactly.
    """
    rb = ReportBuilder()
    d = data.piece_degree
    p = len(data.gamma)

    if data.period < 1:
        rb.violation(f"period {data.period} < 1")
    if d < 2:
        rb.violation(f"degree {d} piece: extension needs piece degree >= 2")
    if p < 1:
        rb.violation("piece has no boundary curves")

    curve_ids = [g.curve for g in data.gamma]
    if len(set(curve_ids)) != len(curve_ids):
        rb.violation("duplicate boundary curve classes in gamma")
    for i, g in enumerate(data.gamma, 1):
        if not 1 <= g.image <= p:
            rb.violation(f"gamma {i} ({g.curve}): image index {g.image} outside 1..{p}")
        if g.degree < 1:
            rb.violation(f"gamma {i} ({g.curve}): degree {g.degree} < 1")

    marked_caps: set[str] = set()
    for j, b in enumerate(data.beta, 1):
        if not 1 <= b.target <= p:
            rb.violation(f"beta {j}: target index {b.target} outside 1..{p}")
        if b.degree < 1:
            rb.violation(f"beta {j}: degree {b.degree} < 1")
        if b.interior_marked is not None:
            if b.interior_marked in marked_caps:
                rb.violation(
                    f"beta {j}: marked point {b.interior_marked} already caps another disk"
                )
            marked_caps.add(b.interior_marked)

    for m in range(1, p + 1):
        total = sum(b.degree for b in data.beta if b.target == m) + sum(
            g.degree for g in data.gamma if g.image == m
        )
        if total != d:
            rb.violation(
                f"boundary {m}: cap degrees sum to {total} != piece degree {d} "
                f"(residual {total - d})"
            )

    interior_sum = sum(pt.local_degree - 1 for pt in _interior_critical_ids(data))
    beta_sum = sum(b.degree - 1 for b in data.beta)
    gamma_sum = sum(g.degree - 1 for g in data.gamma)
    expected = 2 * d - 2
    total = interior_sum + beta_sum + gamma_sum
    if total != expected:
        rb.violation(
            f"Riemann-Hurwitz for the extension: interior {interior_sum} + caps "
            f"{beta_sum} + boundary disks {gamma_sum} = {total}, expected {expected} "
            f"(residual {total - expected})"
        )

    for pt in data.interior_portrait.points:
        if pt.local_degree < 1:
            rb.violation(f"interior point {pt.id}: local degree {pt.local_degree} < 1")
    return rb.build()


def _fresh_id(base: str, taken: set[str]) -> str:
    while base in taken:
        base = base + "*"
    return base


def _gamma_cycles(data: PeriodicPieceData) -> list[list[int]]:
    tau = {i: g.image for i, g in enumerate(data.gamma, 1)}
    cycles: list[list[int]] = []
    on_cycle: set[int] = set()
    for start in tau:
        seen: dict[int, int] = {}
        path: list[int] = []
        cur = start
        while cur not in seen and cur not in on_cycle:
            seen[cur] = len(path)
            path.append(cur)
            cur = tau[cur]
        if cur in seen:
            cyc = path[seen[cur]:]
            cycles.append(cyc)
            on_cycle.update(cyc)
    cycles.sort(key=lambda c: min(c))
    return cycles


def extend(
    data: PeriodicPieceData, default_multiplier: Fraction = DEFAULT_MULTIPLIER
) -> ExtendedCovering:
    """Build the portrait of the extended covering.

    New marked points: one per boundary curve, following the boundary
    dynamics with the boundary degrees; one critical cap center per
    peripheral cap of degree >= 2 (reusing the declared marked point when the
    disk carries one).  When a boundary cycle has degree product 1 the cap
    maps are homeomorphisms and carry no preferred multiplier; the cycle is
    recorded as attracting with the supplied default modulus and flagged.
    """
    report = validate_extension(data)
    if not report.ok:
        raise ExtensionError(f"invalid periodic-piece data:\n{report}")
    if not 0 < abs(default_multiplier) < 1:
        raise ExtensionError(
            f"default multiplier modulus {default_multiplier} not in (0,1)"
        )

    interior_pts = {pt.id: pt for pt in data.interior_portrait.points}
    taken = set(interior_pts)
    for b in data.beta:
        if b.interior_marked:
            taken.add(b.interior_marked)

    z_ids: dict[int, str] = {}
    for i in range(1, len(data.gamma) + 1):
        z_ids[i] = _fresh_id(f"z{i}", taken)
        taken.add(z_ids[i])

    capped = {b.interior_marked for b in data.beta if b.interior_marked}
    points: list[MarkedPoint] = []
    for pt in data.interior_portrait.points:
        if pt.id in capped:
            continue  # re-emitted below with the cap image and degree
        points.append(pt)

    for j, b in enumerate(data.beta, 1):
        target_z = z_ids[b.target]
        if b.interior_marked is not None:
            prior = interior_pts.get(b.interior_marked)
            role = prior.role if prior is not None else ROLE_EXTRA
            points.append(
                MarkedPoint(b.interior_marked, target_z, b.degree, role)
            )
        elif b.degree >= 2:
            wid = _fresh_id(f"w{j}", taken)
            taken.add(wid)
            points.append(MarkedPoint(wid, target_z, b.degree, ROLE_EXTRA))

    for i, g in enumerate(data.gamma, 1):
        points.append(
            MarkedPoint(z_ids[i], z_ids[g.image], g.degree, ROLE_EXTRA)
        )

    spec = CoveringSpec(
        degree=data.piece_degree,
        points=tuple(points),
        cycles=data.interior_portrait.cycles,
        shield=data.interior_portrait.shield,
        p_finite=data.interior_portrait.p_finite,
        declared_complete=True,
    )

    new_cycles: list[ZCycle] = []
    for cyc in _gamma_cycles(data):
        product = 1
        for i in cyc:
            product *= data.gamma[i - 1].degree
        ids = tuple(z_ids[i] for i in cyc)
        if product >= 2:
            new_cycles.append(ZCycle(ids, product, "superattracting", None, False))
        else:
            new_cycles.append(
                ZCycle(ids, 1, "attracting", default_multiplier, True)
            )

    p_set = (
        tuple(pt.id for pt in data.interior_portrait.points)
        + tuple(sorted(capped - set(interior_pts)))  # type: ignore[arg-type]
        + tuple(z_ids[i] for i in sorted(z_ids))
    )
    return ExtendedCovering(
        spec=spec,
        new_marked=tuple(z_ids[i] for i in sorted(z_ids)),
        new_cycles=tuple(new_cycles),
        p_set=p_set,
        classification=classify_type(spec),
        z_of_boundary=dict(z_ids),
    )


def classify_extended(ext: ExtendedCovering) -> str:
    """Single source of truth: the core classification of the built portrait."""
    return classify_type(ext.spec)


def _component_flag(
    data: PeriodicPieceData, cls: CurveClass
) -> tuple[str, int] | str:
    gamma_index = {g.curve: i for i, g in enumerate(data.gamma, 1)}
    if cls.kind == KIND_TRIVIAL:
        return data.placement.trivial
    if cls.kind == KIND_CURVE:
        assert cls.ref is not None
        if cls.ref in gamma_index:
            return ("boundary", gamma_index[cls.ref])
        flag = data.placement.curves.get(cls.ref)
    else:
        assert cls.ref is not None
        flag = data.placement.points.get(cls.ref)
    if flag is None:
        raise ExtensionError(f"containment flags incomplete: no placement for {cls!r}")
    if flag in (PLACE_INTERIOR, PLACE_OUTSIDE):
        return flag
    kind, _, index = flag.partition(":")
    if kind in ("disk", "boundary") and index.isdigit():
        return (kind, int(index))
    raise ExtensionError(f"containment flags incomplete: bad placement {flag!r} for {cls!r}")


def induced_pullback(
    original: PullbackTable, data: PeriodicPieceData, ext: ExtendedCovering
) -> PullbackTable:
    """Pullback table of the extension on the interior curve universe.

    The original table composed to the period is restricted to components
    lying in the piece: interior components survive unchanged, components
    homotopic to a boundary curve become peripheral about its new marked
    point, components inside a cap disk collapse to the cap's marked class
    (trivial when the disk is unmarked), and outside components are dropped.
    Entries for the new marked points are derived from the cap degrees.
    """
    composed = compose_table(original, data.period)
    d = data.piece_degree

    def restrict(
        comps: tuple[PreimageComponent, ...], keyname: str
    ) -> tuple[PreimageComponent, ...]:
        out: list[PreimageComponent] = []
        total = 0
        for comp in comps:
            flag = _component_flag(data, comp.cls)
            if flag == PLACE_OUTSIDE:
                continue
            if flag == PLACE_INTERIOR:
                if comp.cls.kind == KIND_CURVE and comp.cls.ref not in data.interior_curves:
                    raise ExtensionError(
                        f"containment flags inconsistent: component {comp.cls!r} of "
                        f"{keyname} is flagged interior but not an interior curve"
                    )
                out.append(comp)
                total += comp.degree
                continue
            kind, index = flag  # type: ignore[misc]
            if kind == "boundary":
                out.append(
                    PreimageComponent(peripheral(ext.z_of_boundary[index]), comp.degree)
                )
            else:  # disk
                cap = data.beta[index - 1]
                if cap.interior_marked is not None:
                    out.append(
                        PreimageComponent(peripheral(cap.interior_marked), comp.degree)
                    )
                else:
                    out.append(PreimageComponent(TRIVIAL, comp.degree))
            total += comp.degree
        if total != d:
            raise ExtensionError(
                f"containment flags inconsistent: restricted entry for {keyname} "
                f"has degree sum {total}, expected {d}"
            )
        return tuple(sorted(out, key=PreimageComponent.sort_key))

    entries: dict[CurveClass, tuple[PreimageComponent, ...]] = {}
    for cid in data.interior_curves:
        entries[curve(cid)] = restrict(composed.entry(curve(cid)), f"curve {cid}")

    keep_points = {
        pid
        for pid, flag in data.placement.points.items()
        if flag == PLACE_INTERIOR or flag.startswith("disk:")
    }
    for cls in composed.entries:
        if cls.kind == KIND_PERIPHERAL and cls.ref in keep_points:
            entries[cls] = restrict(composed.entries[cls], f"point {cls.ref}")

    for i, g in enumerate(data.gamma, 1):
        comps: list[PreimageComponent] = []
        for i2, g2 in enumerate(data.gamma, 1):
            if g2.image == i:
                comps.append(
                    PreimageComponent(peripheral(ext.z_of_boundary[i2]), g2.degree)
                )
        for b in data.beta:
            if b.target == i:
                if b.interior_marked is not None:
                    comps.append(
                        PreimageComponent(peripheral(b.interior_marked), b.degree)
                    )
                else:
                    comps.append(PreimageComponent(TRIVIAL, b.degree))
        entries[peripheral(ext.z_of_boundary[i])] = tuple(
            sorted(comps, key=PreimageComponent.sort_key)
        )

    table = PullbackTable(d, tuple(data.interior_curves), entries)
    report = validate_table(table)
    if not report.ok:
        raise ExtensionError(f"induced table invalid:\n{report}")
    return table


_UNIVERSE_CAVEAT = (
    "the obstruction scan is scoped to the declared curve universe; absence of "
    "obstructions there does not certify absence in the full curve complex"
)
_UNIQUENESS_NOTE = (
    "the realized rational map is unique up to conjugation by an automorphism "
    "of the Riemann sphere"
)


def realizability_report(
    ext: ExtendedCovering,
    induced: PullbackTable,
    universe_cap: int = DEFAULT_UNIVERSE_CAP,
) -> Verdict:
    """Desk-scale realizability verdict for the extended covering.

    Hyperbolic orbifold plus no obstruction in the declared universe yields
    the positive verdict; an obstruction in the induced table contradicts a
    genuine canonical-obstruction decomposition and is flagged as such.
    """
    sig = compute_signature(ext.spec)
    otype = orbifold_type(sig)
    obstructions = tuple(search_obstructions(induced, universe_cap))

    notes = [_UNIVERSE_CAVEAT]
    for cyc in ext.new_cycles:
        if cyc.default_multiplier_applied:
            notes.append(
                f"boundary cycle {'->'.join(cyc.points)} has degree product 1; its "
                f"multiplier modulus was set to the default {cyc.multiplier} (the "
                "capping maps leave it unconstrained)"
            )
    if otype == "spherical":
        notes.append("anomaly: positive orbifold Euler characteristic")

    if otype != HYPERBOLIC:
        status = "precondition-failed"
        statement = (
            f"precondition failed: orbifold not hyperbolic (chi = {sig.chi}, "
            f"{otype})"
        )
    elif obstructions:
        status = "obstructed"
        statement = "obstructed in declared universe"
        notes.append(
            "an obstruction for the extended covering contradicts a genuine "
            "canonical-obstruction decomposition; check the input data"
        )
    else:
        status = "realizable"
        if ext.classification == PCF_TYPE:
            statement = (
                "realizable: combinatorially equivalent to a post-critically "
                "finite rational map"
            )
        else:
            statement = (
                "realizable: CLH-equivalent to a geometrically finite rational map"
            )
        notes.append(_UNIQUENESS_NOTE)

    return Verdict(
        status=status,
        classification=ext.classification,
        signature=sig,
        chi=sig.chi,
        orbifold=otype,
        obstructions=obstructions,
        statement=statement,
        notes=tuple(notes),
    )
