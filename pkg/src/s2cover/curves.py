"""Curve universes, multicurves, and pullback tables.

Homotopy classes are opaque ids; the pullback table is the ground truth for
how the covering acts on them.  Every entry lists the preimage components
of one class together with the degree of the covering on each component.
The trivial class has the implicit entry ``[(trivial, d)]``: a marked-point
free disk has marked-point free preimages, bookkept as a single aggregate
component carrying the full degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .report import ReportBuilder, ValidationReport

KIND_CURVE = "curve"
KIND_PERIPHERAL = "peripheral"
KIND_TRIVIAL = "trivial"

_KIND_ORDER = {KIND_CURVE: 0, KIND_PERIPHERAL: 1, KIND_TRIVIAL: 2}


class TableError(ValueError):
    """A pullback table cannot support the requested operation."""


class PeripheralUndeclaredError(TableError):
    """Composition needed the pullback of a peripheral class that is absent."""


@dataclass(frozen=True, order=False)
class CurveClass:
    kind: str
    ref: Optional[str] = None

    def sort_key(self) -> tuple[int, str]:
        return (_KIND_ORDER[self.kind], self.ref or "")

    def __repr__(self) -> str:
        if self.kind == KIND_TRIVIAL:
            return "trivial"
        return f"{self.kind}({self.ref})"


def curve(curve_id: str) -> CurveClass:
    return CurveClass(KIND_CURVE, curve_id)


def peripheral(point_id: str) -> CurveClass:
    return CurveClass(KIND_PERIPHERAL, point_id)


TRIVIAL = CurveClass(KIND_TRIVIAL)


@dataclass(frozen=True)
class PreimageComponent:
    cls: CurveClass
    degree: int

    def sort_key(self) -> tuple[int, str, int]:
        k = self.cls.sort_key()
        return (k[0], k[1], self.degree)


def _canon(components: Iterable[PreimageComponent]) -> tuple[PreimageComponent, ...]:
    return tuple(sorted(components, key=PreimageComponent.sort_key))


@dataclass(frozen=True)
class Multicurve:
    curves: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.curves:
            raise ValueError("multicurve must be non-empty")
        if len(set(self.curves)) != len(self.curves):
            raise ValueError(f"duplicate curves in multicurve: {self.curves}")

    def __contains__(self, curve_id: str) -> bool:
        return curve_id in self.curves

    def __iter__(self):
        return iter(self.curves)

    def __len__(self) -> int:
        return len(self.curves)


@dataclass(frozen=True)
class PullbackTable:
    map_degree: int
    universe: tuple[str, ...]
    entries: Mapping[CurveClass, tuple[PreimageComponent, ...]] = field(
        default_factory=dict
    )

    def entry(self, cls: CurveClass) -> tuple[PreimageComponent, ...]:
        if cls.kind == KIND_TRIVIAL:
            return self.entries.get(
                TRIVIAL, (PreimageComponent(TRIVIAL, self.map_degree),)
            )
        if cls in self.entries:
            return self.entries[cls]
        if cls.kind == KIND_PERIPHERAL:
            raise PeripheralUndeclaredError(
                f"peripheral pullback undeclared for point {cls.ref!r}"
            )
        raise TableError(f"unknown curve {cls.ref!r}")

    def canonicalized(self) -> "PullbackTable":
        return PullbackTable(
            self.map_degree,
            self.universe,
            {cls: _canon(comps) for cls, comps in self.entries.items()},
        )


def validate_table(table: PullbackTable) -> ValidationReport:
    """Degree-sum and reference checks; reports exact residuals."""
    rb = ReportBuilder()
    if table.map_degree < 2:
        rb.violation(f"map degree {table.map_degree} < 2")
    if len(set(table.universe)) != len(table.universe):
        rb.violation("duplicate curve ids in universe")
    universe = set(table.universe)
    for cid in table.universe:
        if curve(cid) not in table.entries:
            rb.violation(f"curve {cid}: no pullback entry")
    for cls, comps in table.entries.items():
        if cls.kind == KIND_CURVE and cls.ref not in universe:
            rb.violation(f"entry key {cls!r} is not in the universe")
        total = 0
        for comp in comps:
            if comp.degree < 1:
                rb.violation(f"entry {cls!r}: component degree {comp.degree} < 1")
            total += comp.degree
            if comp.cls.kind == KIND_CURVE and comp.cls.ref not in universe:
                rb.violation(
                    f"entry {cls!r}: component references undeclared curve {comp.cls.ref!r}"
                )
        if total != table.map_degree:
            rb.violation(
                f"entry {cls!r}: degree sum {total} != {table.map_degree} "
                f"(residual {total - table.map_degree})"
            )
    return rb.build()


def pullback_classes(
    table: PullbackTable, multicurve: Multicurve
) -> tuple[PreimageComponent, ...]:
    """Concatenated (canonically sorted) preimage components of the multicurve."""
    unknown = [cid for cid in multicurve if cid not in table.universe]
    if unknown:
        raise TableError(f"unknown curves: {', '.join(unknown)}")
    out: list[PreimageComponent] = []
    for cid in multicurve:
        out.extend(table.entry(curve(cid)))
    return _canon(out)


def is_stable(table: PullbackTable, multicurve: Multicurve) -> bool:
    """Every non-peripheral preimage component stays inside the multicurve."""
    for cid in multicurve:
        for comp in table.entry(curve(cid)):
            if comp.cls.kind == KIND_CURVE and comp.cls.ref not in multicurve:
                return False
    return True


def is_full(table: PullbackTable, multicurve: Multicurve) -> bool:
    """Stable, and every member reappears as a preimage component class."""
    if not is_stable(table, multicurve):
        return False
    seen: set[str] = set()
    for cid in multicurve:
        for comp in table.entry(curve(cid)):
            if comp.cls.kind == KIND_CURVE:
                seen.add(comp.cls.ref)  # type: ignore[arg-type]
    return all(cid in seen for cid in multicurve)


def _expand(level1: PullbackTable, levelm: PullbackTable) -> PullbackTable:
    """One composition step: expand level-1 components into level-m tables."""
    entries: dict[CurveClass, tuple[PreimageComponent, ...]] = {}
    for cls in level1.entries:
        out: list[PreimageComponent] = []
        for comp in level1.entries[cls]:
            inner = levelm.entry(comp.cls)
            out.extend(
                PreimageComponent(c.cls, c.degree * comp.degree) for c in inner
            )
        entries[cls] = _canon(out)
    return PullbackTable(
        level1.map_degree * levelm.map_degree, level1.universe, entries
    )


def compose_table(table: PullbackTable, k: int) -> PullbackTable:
    """Class-level table of the k-th iterate.

    The degree of a level-(m+1) component is the product of the degree of
    the level-1 component it expands and the degree of the level-m component
    it comes from; entries of the result sum to map_degree ** k.
    """
    if k < 1:
        raise ValueError(f"iterate count {k} < 1")
    if k == 1:
        return table.canonicalized()
    result = table.canonicalized()
    for _ in range(k - 1):
        result = _expand(table, result)
    return result
