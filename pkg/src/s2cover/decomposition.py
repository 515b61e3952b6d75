"""Standard-form validation and the thick/thin decomposition.

The sphere cut along the canonical obstruction splits into thin annuli and
thick pieces; pulling the pieces back one level induces a self-map on thick
piece indices whose functional graph is analyzed here.  The normalizing
isotopy that produces the standard form is an existence statement, not an
algorithm, so inputs arrive already in standard form and are validated
structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .report import ReportBuilder, ValidationReport

BOUNDARY_INHERITED = "inherited"
BOUNDARY_PERIPHERAL = "peripheral"

OUTER_LABELS = ("+", "-")

DISK = "disk"
PUNCTURED_DISK = "punctured-disk"
ANNULUS = "annulus"
COMPLEX = "complex"


class StandardFormError(ValueError):
    """The declared data is not a standard form."""


@dataclass(frozen=True)
class ThinAnnulus:
    id: str
    core: str  # curve id of the obstruction class it fattens


@dataclass(frozen=True)
class Level1Annulus:
    """A preimage annulus component homotopic to a thin annulus.

    ``shares_outer`` lists which outer boundary circles of the containing
    thin annulus this component shares ("+" and/or "-").
    """

    id: str
    preimage_of: str
    homotopic_to: str
    contained_in: str
    degree: int
    shares_outer: tuple[str, ...] = ()


@dataclass(frozen=True)
class Piece:
    id: str
    boundary_curves: tuple[str, ...]
    marked_ids: tuple[str, ...] = ()

    @property
    def boundary_count(self) -> int:
        return len(self.boundary_curves)


@dataclass(frozen=True)
class BoundaryCurveRef:
    curve: str
    kind: str  # inherited or peripheral


@dataclass(frozen=True)
class Level1Piece:
    id: str
    maps_to: str
    degree: int
    contained_in: str
    boundary: tuple[BoundaryCurveRef, ...]
    marked_ids: tuple[str, ...] = ()

    def inherited_curves(self) -> frozenset[str]:
        return frozenset(b.curve for b in self.boundary if b.kind == BOUNDARY_INHERITED)

    def peripheral_curves(self) -> frozenset[str]:
        return frozenset(b.curve for b in self.boundary if b.kind == BOUNDARY_PERIPHERAL)


@dataclass(frozen=True)
class StandardFormSpec:
    annuli0: tuple[ThinAnnulus, ...]
    annuli1: tuple[Level1Annulus, ...]
    pieces: tuple[Piece, ...]
    level1_pieces: tuple[Level1Piece, ...]
    map_degree: Optional[int] = None


@dataclass(frozen=True)
class PieceMap:
    tau: Mapping[str, str]
    cycles: tuple[tuple[str, ...], ...]
    tails: Mapping[str, int]

    def periodic_ids(self) -> frozenset[str]:
        return frozenset(pid for cyc in self.cycles for pid in cyc)

    def period_of(self, piece_id: str) -> Optional[int]:
        for cyc in self.cycles:
            if piece_id in cyc:
                return len(cyc)
        return None


@dataclass(frozen=True)
class DecompositionResult:
    annuli0: tuple[ThinAnnulus, ...]
    pieces: tuple[Piece, ...]
    level1_pieces: tuple[Level1Piece, ...]
    classifications: Mapping[str, str]
    piece_map: PieceMap
    periodic_pieces: tuple[str, ...]


def classify_component(boundary_count: int, marked_count: int) -> str:
    """Four-way class of a pullback component of the thick part."""
    if boundary_count < 0 or marked_count < 0:
        raise ValueError("counts must be non-negative")
    if boundary_count == 1 and marked_count == 0:
        return DISK
    if boundary_count == 1 and marked_count == 1:
        return PUNCTURED_DISK
    if boundary_count == 2 and marked_count == 0:
        return ANNULUS
    return COMPLEX


def validate_standard_form(spec: StandardFormSpec) -> ValidationReport:
    """Structural check of the standard-form conditions (1)-(5)."""
    rb = ReportBuilder()

    a0_ids = [a.id for a in spec.annuli0]
    if len(set(a0_ids)) != len(a0_ids):
        rb.violation("duplicate thin-annulus ids")
    cores = [a.core for a in spec.annuli0]
    if len(set(cores)) != len(cores):
        rb.violation("(1): a curve is the core of more than one thin annulus")
    a0_set = set(a0_ids)

    contained: dict[str, list[Level1Annulus]] = {aid: [] for aid in a0_ids}
    for a1 in spec.annuli1:
        for fieldname, ref in (
            ("preimage_of", a1.preimage_of),
            ("homotopic_to", a1.homotopic_to),
            ("contained_in", a1.contained_in),
        ):
            if ref not in a0_set:
                rb.violation(f"(2): level-1 annulus {a1.id}: {fieldname} {ref!r} unknown")
        if a1.contained_in in a0_set and a1.homotopic_to in a0_set:
            if a1.contained_in != a1.homotopic_to:
                rb.violation(
                    f"(3): level-1 annulus {a1.id} contained in {a1.contained_in} "
                    f"but homotopic to {a1.homotopic_to}"
                )
        if a1.degree < 1:
            rb.violation(f"(5): level-1 annulus {a1.id}: degree {a1.degree} < 1")
        for label in a1.shares_outer:
            if label not in OUTER_LABELS:
                rb.violation(f"level-1 annulus {a1.id}: unknown outer label {label!r}")
        if a1.contained_in in contained:
            contained[a1.contained_in].append(a1)

    for aid in a0_ids:
        group = contained[aid]
        if not group:
            rb.violation(f"(4): thin annulus {aid} contains no level-1 annuli")
            continue
        for label in OUTER_LABELS:
            claims = [a1.id for a1 in group if label in a1.shares_outer]
            if len(claims) != 1:
                rb.violation(
                    f"(4): thin annulus {aid}: outer boundary {label!r} shared by "
                    f"{len(claims)} level-1 annuli, expected exactly 1"
                )

    piece_ids = [p.id for p in spec.pieces]
    if len(set(piece_ids)) != len(piece_ids):
        rb.violation("duplicate piece ids")
    piece_set = set(piece_ids)
    boundary_owner: dict[str, str] = {}
    for p in spec.pieces:
        if len(set(p.boundary_curves)) != len(p.boundary_curves):
            rb.violation(f"piece {p.id}: repeated boundary curve")
        for b in p.boundary_curves:
            if b in boundary_owner:
                rb.violation(
                    f"boundary curve {b} claimed by pieces {boundary_owner[b]} and {p.id}"
                )
            boundary_owner[b] = p.id

    # Planarity leaves no embedding data; the Euler count is the cheap
    # necessary condition (annuli contribute 0).
    if spec.pieces:
        euler = sum(2 - p.boundary_count for p in spec.pieces)
        if euler != 2:
            rb.violation(
                f"Euler count: sum over pieces of (2 - boundary_count) is {euler}, expected 2"
            )

    marked_owner: dict[str, str] = {}
    for p in spec.pieces:
        for m in p.marked_ids:
            if m in marked_owner:
                rb.violation(
                    f"marked point {m} claimed by pieces {marked_owner[m]} and {p.id}"
                )
            marked_owner[m] = p.id

    l1_ids = [q.id for q in spec.level1_pieces]
    if len(set(l1_ids)) != len(l1_ids):
        rb.violation("duplicate level-1 piece ids")
    inherited_all = set(boundary_owner)
    for q in spec.level1_pieces:
        if q.maps_to not in piece_set:
            rb.violation(f"level-1 piece {q.id}: maps_to {q.maps_to!r} unknown")
        if q.contained_in not in piece_set:
            rb.violation(f"level-1 piece {q.id}: contained_in {q.contained_in!r} unknown")
        if q.degree < 1:
            rb.violation(f"level-1 piece {q.id}: degree {q.degree} < 1")
        for b in q.boundary:
            if b.kind not in (BOUNDARY_INHERITED, BOUNDARY_PERIPHERAL):
                rb.violation(f"level-1 piece {q.id}: unknown boundary kind {b.kind!r}")
            elif b.kind == BOUNDARY_INHERITED and b.curve not in inherited_all:
                rb.violation(
                    f"level-1 piece {q.id}: inherited boundary {b.curve!r} is not a "
                    "piece boundary curve"
                )

    if spec.map_degree is not None:
        for p in spec.pieces:
            total = sum(q.degree for q in spec.level1_pieces if q.maps_to == p.id)
            if total != spec.map_degree:
                rb.violation(
                    f"degree bookkeeping: preimages of piece {p.id} carry total degree "
                    f"{total} != map degree {spec.map_degree}"
                )
    return rb.build()


def carrier_piece(piece: Piece, level1: tuple[Level1Piece, ...]) -> Level1Piece:
    """The unique level-1 piece whose boundary extends the piece's boundary.

    It must inherit every boundary component of the piece and nothing else,
    with all remaining boundary curves peripheral.
    """
    want = frozenset(piece.boundary_curves)
    candidates = [q for q in level1 if q.inherited_curves() == want]
    if len(candidates) != 1:
        raise StandardFormError(
            f"standard form violated: piece {piece.id} has {len(candidates)} "
            "carrier candidates, expected exactly 1"
        )
    return candidates[0]


def piece_map(spec: StandardFormSpec) -> PieceMap:
    """tau(i) = j where the carrier of piece i maps onto piece j."""
    tau = {
        p.id: carrier_piece(p, spec.level1_pieces).maps_to for p in spec.pieces
    }
    cycles: list[tuple[str, ...]] = []
    on_cycle: set[str] = set()
    for start in tau:
        seen: dict[str, int] = {}
        path: list[str] = []
        cur = start
        while cur not in seen:
            if cur in on_cycle:
                break
            seen[cur] = len(path)
            path.append(cur)
            cur = tau[cur]
        else:
            cyc = path[seen[cur]:]
            pivot = min(range(len(cyc)), key=lambda i: cyc[i])
            cyc = cyc[pivot:] + cyc[:pivot]
            cycles.append(tuple(cyc))
            on_cycle.update(cyc)
    cycles.sort(key=lambda c: c[0])

    tails: dict[str, int] = {}
    for pid in tau:
        steps = 0
        cur = pid
        while cur not in on_cycle:
            cur = tau[cur]
            steps += 1
        tails[pid] = steps
    return PieceMap(tau=tau, cycles=tuple(cycles), tails=tails)


def decomposition_report(spec: StandardFormSpec) -> DecompositionResult:
    """Validate, classify, and analyze periodicity in one bundle.

    Every piece is preperiodic and at least one is periodic; for a total map
    on a finite index set this cannot fail, so it is asserted rather than
    checked.
    """
    report = validate_standard_form(spec)
    if not report.ok:
        raise StandardFormError(f"invalid standard form:\n{report}")
    pm = piece_map(spec)
    assert pm.cycles, "finite functional graphs always have a cycle"
    classifications = {
        q.id: classify_component(len(q.boundary), len(q.marked_ids))
        for q in spec.level1_pieces
    }
    periodic = tuple(sorted(pm.periodic_ids()))
    return DecompositionResult(
        annuli0=spec.annuli0,
        pieces=spec.pieces,
        level1_pieces=spec.level1_pieces,
        classifications=classifications,
        piece_map=pm,
        periodic_pieces=periodic,
    )
