"""The covering-spec document format.

One JSON document bundles everything a run needs: the covering portrait,
the curve universe with its pullback table, and optionally a standard form,
periodic-piece data, and length traces.  Rationals travel as "p/q" strings
so exact values never pass through binary floating point.  ``emit`` is the
canonical serializer; parse(emit(doc)) == doc.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Any, Optional

import jsonschema

from .curves import (
    KIND_CURVE,
    KIND_PERIPHERAL,
    CurveClass,
    PreimageComponent,
    PullbackTable,
    TRIVIAL,
    curve,
    peripheral,
)
from .decomposition import (
    BoundaryCurveRef,
    Level1Annulus,
    Level1Piece,
    Piece,
    StandardFormSpec,
    ThinAnnulus,
)
from .extension import BoundaryCurve, PeripheralCap, PeriodicPieceData, Placement
from .linalg import LengthTrace
from .model import (
    AccumulationCycle,
    CoveringSpec,
    MarkedPoint,
    ShieldAnnulus,
    ShieldDisk,
    ShieldedStructure,
)

FORMAT_VERSION = 1


class DocumentError(ValueError):
    """Parsing failed; every problem carries a location."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("\n".join(problems))


@dataclass(frozen=True)
class SpecDocument:
    covering: CoveringSpec
    curves: Optional[PullbackTable] = None
    standard_form: Optional[StandardFormSpec] = None
    periodic_pieces: tuple[PeriodicPieceData, ...] = ()
    traces: Optional[LengthTrace] = None
    format_version: int = FORMAT_VERSION
    warnings: tuple[str, ...] = field(default=(), compare=False)


_POINT_SCHEMA = {
    "type": "object",
    "required": ["id", "image"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string"},
        "image": {"type": "string"},
        "local_degree": {"type": "integer"},
        "role": {"enum": ["postcritical", "extra-marked", "disk-center"]},
    },
}

_CYCLE_SCHEMA = {
    "type": "object",
    "required": ["points", "kind"],
    "additionalProperties": False,
    "properties": {
        "points": {"type": "array", "items": {"type": "string"}},
        "kind": {"enum": ["attracting", "superattracting"]},
        "multiplier": {"type": "string"},
        "power": {"type": "integer"},
    },
}

_SHIELD_SCHEMA = {
    "type": "object",
    "required": ["disks", "annuli", "image"],
    "additionalProperties": False,
    "properties": {
        "disks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "center", "boundary_anchor"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "center": {"type": "string"},
                    "boundary_anchor": {"type": "string"},
                },
            },
        },
        "annuli": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "attached_to"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "attached_to": {"type": "string"},
                },
            },
        },
        "image": {"type": "object", "additionalProperties": {"type": "string"}},
    },
}

_COVERING_SCHEMA = {
    "type": "object",
    "required": ["degree", "points"],
    "additionalProperties": False,
    "properties": {
        "degree": {"type": "integer"},
        "p_finite": {"type": "boolean"},
        "declared_complete": {"type": "boolean"},
        "points": {"type": "array", "items": _POINT_SCHEMA},
        "cycles": {"type": "array", "items": _CYCLE_SCHEMA},
        "shield": _SHIELD_SCHEMA,
    },
}

_COMPONENT_SCHEMA = {
    "type": "object",
    "required": ["degree"],
    "additionalProperties": False,
    "properties": {
        "curve": {"type": "string"},
        "peripheral": {"type": "string"},
        "trivial": {"type": "boolean"},
        "degree": {"type": "integer"},
    },
}

_CURVES_SCHEMA = {
    "type": "object",
    "required": ["universe", "pullback"],
    "additionalProperties": False,
    "properties": {
        "universe": {"type": "array", "items": {"type": "string"}},
        "pullback": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": _COMPONENT_SCHEMA},
        },
        "peripheral_pullback": {
            "type": "object",
            "additionalProperties": {"type": "array", "items": _COMPONENT_SCHEMA},
        },
    },
}

_STANDARD_FORM_SCHEMA = {
    "type": "object",
    "required": ["thin_annuli", "pieces", "level1_pieces"],
    "additionalProperties": False,
    "properties": {
        "map_degree": {"type": "integer"},
        "thin_annuli": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "core"],
                "additionalProperties": False,
                "properties": {"id": {"type": "string"}, "core": {"type": "string"}},
            },
        },
        "level1_annuli": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "preimage_of", "homotopic_to", "contained_in", "degree"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "preimage_of": {"type": "string"},
                    "homotopic_to": {"type": "string"},
                    "contained_in": {"type": "string"},
                    "degree": {"type": "integer"},
                    "shares_outer": {
                        "type": "array",
                        "items": {"enum": ["+", "-"]},
                    },
                },
            },
        },
        "pieces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "boundary"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "boundary": {"type": "array", "items": {"type": "string"}},
                    "marked": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "level1_pieces": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "maps_to", "degree", "contained_in", "boundary"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string"},
                    "maps_to": {"type": "string"},
                    "degree": {"type": "integer"},
                    "contained_in": {"type": "string"},
                    "boundary": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["curve", "kind"],
                            "additionalProperties": False,
                            "properties": {
                                "curve": {"type": "string"},
                                "kind": {"enum": ["inherited", "peripheral"]},
                            },
                        },
                    },
                    "marked": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
    },
}

_PLACEMENT_FLAG = {"type": "string", "pattern": "^(interior|outside|disk:[0-9]+|boundary:[0-9]+)$"}

_PERIODIC_PIECE_SCHEMA = {
    "type": "object",
    "required": ["id", "period", "piece_degree", "gamma", "interior_portrait"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string"},
        "period": {"type": "integer"},
        "piece_degree": {"type": "integer"},
        "gamma": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["curve", "image", "degree"],
                "additionalProperties": False,
                "properties": {
                    "curve": {"type": "string"},
                    "image": {"type": "integer"},
                    "degree": {"type": "integer"},
                },
            },
        },
        "beta": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["target", "degree"],
                "additionalProperties": False,
                "properties": {
                    "target": {"type": "integer"},
                    "degree": {"type": "integer"},
                    "interior_marked": {"type": ["string", "null"]},
                },
            },
        },
        "interior_portrait": _COVERING_SCHEMA,
        "interior_curves": {"type": "array", "items": {"type": "string"}},
        "placement": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "curves": {"type": "object", "additionalProperties": _PLACEMENT_FLAG},
                "points": {"type": "object", "additionalProperties": _PLACEMENT_FLAG},
                "trivial": _PLACEMENT_FLAG,
            },
        },
    },
}

_TRACES_SCHEMA = {
    "type": "object",
    "required": ["curves", "samples"],
    "additionalProperties": False,
    "properties": {
        "curves": {"type": "array", "items": {"type": "string"}},
        "samples": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "number"}},
        },
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format_version", "covering"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"type": "integer"},
        "covering": _COVERING_SCHEMA,
        "curves": _CURVES_SCHEMA,
        "standard_form": _STANDARD_FORM_SCHEMA,
        "periodic_pieces": {"type": "array", "items": _PERIODIC_PIECE_SCHEMA},
        "traces": _TRACES_SCHEMA,
    },
}


def _fraction(text: str, where: str, problems: list[str]) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        problems.append(f"{where}: not a rational 'p/q' string: {text!r}")
        return Fraction(0)


def _covering_from_json(data: dict, where: str, problems: list[str]) -> CoveringSpec:
    points = tuple(
        MarkedPoint(
            id=p["id"],
            image=p["image"],
            local_degree=p.get("local_degree", 1),
            role=p.get("role", "postcritical"),
        )
        for p in data.get("points", [])
    )
    cycles = []
    for k, c in enumerate(data.get("cycles", [])):
        multiplier = None
        if "multiplier" in c:
            multiplier = _fraction(c["multiplier"], f"{where}.cycles[{k}].multiplier", problems)
        cycles.append(
            AccumulationCycle(
                points=tuple(c["points"]),
                kind=c["kind"],
                multiplier=multiplier,
                power=c.get("power"),
            )
        )
    shield = None
    if "shield" in data:
        s = data["shield"]
        shield = ShieldedStructure(
            disks=tuple(
                ShieldDisk(d["id"], d["center"], d["boundary_anchor"])
                for d in s["disks"]
            ),
            annuli=tuple(ShieldAnnulus(a["id"], a["attached_to"]) for a in s["annuli"]),
            image=dict(s["image"]),
        )
    return CoveringSpec(
        degree=data["degree"],
        points=points,
        cycles=tuple(cycles),
        shield=shield,
        p_finite=data.get("p_finite", True),
        declared_complete=data.get("declared_complete", True),
    )


def _covering_to_json(spec: CoveringSpec) -> dict:
    out: dict[str, Any] = {
        "degree": spec.degree,
        "p_finite": spec.p_finite,
        "declared_complete": spec.declared_complete,
        "points": [
            {
                "id": p.id,
                "image": p.image,
                "local_degree": p.local_degree,
                "role": p.role,
            }
            for p in spec.points
        ],
    }
    if spec.cycles:
        cycles = []
        for c in spec.cycles:
            entry: dict[str, Any] = {"points": list(c.points), "kind": c.kind}
            if c.multiplier is not None:
                entry["multiplier"] = str(c.multiplier)
            if c.power is not None:
                entry["power"] = c.power
            cycles.append(entry)
        out["cycles"] = cycles
    if spec.shield is not None:
        out["shield"] = {
            "disks": [
                {"id": d.id, "center": d.center, "boundary_anchor": d.boundary_anchor}
                for d in spec.shield.disks
            ],
            "annuli": [
                {"id": a.id, "attached_to": a.attached_to} for a in spec.shield.annuli
            ],
            "image": dict(spec.shield.image),
        }
    return out


def _component_from_json(c: dict, where: str, problems: list[str]) -> PreimageComponent:
    keys = [k for k in ("curve", "peripheral", "trivial") if k in c]
    if len(keys) != 1:
        problems.append(f"{where}: component must have exactly one of curve/peripheral/trivial")
        return PreimageComponent(TRIVIAL, c.get("degree", 1))
    if "curve" in c:
        cls = curve(c["curve"])
    elif "peripheral" in c:
        cls = peripheral(c["peripheral"])
    else:
        cls = TRIVIAL
    return PreimageComponent(cls, c["degree"])


def _component_to_json(comp: PreimageComponent) -> dict:
    out: dict[str, Any] = {"degree": comp.degree}
    if comp.cls.kind == KIND_CURVE:
        out["curve"] = comp.cls.ref
    elif comp.cls.kind == KIND_PERIPHERAL:
        out["peripheral"] = comp.cls.ref
    else:
        out["trivial"] = True
    return out


def _table_from_json(data: dict, covering: CoveringSpec, problems: list[str]) -> PullbackTable:
    universe = tuple(data["universe"])
    entries: dict[CurveClass, tuple[PreimageComponent, ...]] = {}
    for cid, comps in data["pullback"].items():
        if cid not in universe:
            problems.append(f"curves.pullback: key {cid!r} is not in the universe")
        entries[curve(cid)] = tuple(
            _component_from_json(c, f"curves.pullback[{cid}][{k}]", problems)
            for k, c in enumerate(comps)
        )
    point_ids = {p.id for p in covering.points}
    for pid, comps in data.get("peripheral_pullback", {}).items():
        if pid not in point_ids:
            problems.append(
                f"curves.peripheral_pullback: key {pid!r} is not a declared marked point"
            )
        entries[peripheral(pid)] = tuple(
            _component_from_json(c, f"curves.peripheral_pullback[{pid}][{k}]", problems)
            for k, c in enumerate(comps)
        )
    for cls, comps in entries.items():
        for comp in comps:
            if comp.cls.kind == KIND_CURVE and comp.cls.ref not in universe:
                problems.append(
                    f"curves: entry {cls!r} references undeclared curve {comp.cls.ref!r}"
                )
            if comp.cls.kind == KIND_PERIPHERAL and comp.cls.ref not in point_ids:
                problems.append(
                    f"curves: entry {cls!r} references undeclared point {comp.cls.ref!r}"
                )
    return PullbackTable(covering.degree, universe, entries)


def _table_to_json(table: PullbackTable) -> dict:
    pullback: dict[str, Any] = {}
    peripheral_pullback: dict[str, Any] = {}
    for cls, comps in table.entries.items():
        encoded = [_component_to_json(c) for c in comps]
        if cls.kind == KIND_CURVE:
            pullback[cls.ref] = encoded
        elif cls.kind == KIND_PERIPHERAL:
            peripheral_pullback[cls.ref] = encoded
    out: dict[str, Any] = {"universe": list(table.universe), "pullback": pullback}
    if peripheral_pullback:
        out["peripheral_pullback"] = peripheral_pullback
    return out


def _standard_form_from_json(data: dict, problems: list[str]) -> StandardFormSpec:
    return StandardFormSpec(
        annuli0=tuple(ThinAnnulus(a["id"], a["core"]) for a in data["thin_annuli"]),
        annuli1=tuple(
            Level1Annulus(
                id=a["id"],
                preimage_of=a["preimage_of"],
                homotopic_to=a["homotopic_to"],
                contained_in=a["contained_in"],
                degree=a["degree"],
                shares_outer=tuple(a.get("shares_outer", [])),
            )
            for a in data.get("level1_annuli", [])
        ),
        pieces=tuple(
            Piece(p["id"], tuple(p["boundary"]), tuple(p.get("marked", [])))
            for p in data["pieces"]
        ),
        level1_pieces=tuple(
            Level1Piece(
                id=q["id"],
                maps_to=q["maps_to"],
                degree=q["degree"],
                contained_in=q["contained_in"],
                boundary=tuple(
                    BoundaryCurveRef(b["curve"], b["kind"]) for b in q["boundary"]
                ),
                marked_ids=tuple(q.get("marked", [])),
            )
            for q in data["level1_pieces"]
        ),
        map_degree=data.get("map_degree"),
    )


def _standard_form_to_json(sf: StandardFormSpec) -> dict:
    out: dict[str, Any] = {
        "thin_annuli": [{"id": a.id, "core": a.core} for a in sf.annuli0],
        "pieces": [
            {"id": p.id, "boundary": list(p.boundary_curves), "marked": list(p.marked_ids)}
            for p in sf.pieces
        ],
        "level1_pieces": [
            {
                "id": q.id,
                "maps_to": q.maps_to,
                "degree": q.degree,
                "contained_in": q.contained_in,
                "boundary": [{"curve": b.curve, "kind": b.kind} for b in q.boundary],
                "marked": list(q.marked_ids),
            }
            for q in sf.level1_pieces
        ],
    }
    if sf.annuli1:
        out["level1_annuli"] = [
            {
                "id": a.id,
                "preimage_of": a.preimage_of,
                "homotopic_to": a.homotopic_to,
                "contained_in": a.contained_in,
                "degree": a.degree,
                "shares_outer": list(a.shares_outer),
            }
            for a in sf.annuli1
        ]
    if sf.map_degree is not None:
        out["map_degree"] = sf.map_degree
    return out


def _piece_from_json(data: dict, where: str, problems: list[str]) -> PeriodicPieceData:
    placement = data.get("placement", {})
    return PeriodicPieceData(
        piece=data["id"],
        period=data["period"],
        piece_degree=data["piece_degree"],
        gamma=tuple(
            BoundaryCurve(g["curve"], g["image"], g["degree"]) for g in data["gamma"]
        ),
        beta=tuple(
            PeripheralCap(b["target"], b["degree"], b.get("interior_marked"))
            for b in data.get("beta", [])
        ),
        interior_portrait=_covering_from_json(
            data["interior_portrait"], f"{where}.interior_portrait", problems
        ),
        interior_curves=tuple(data.get("interior_curves", [])),
        placement=Placement(
            curves=dict(placement.get("curves", {})),
            points=dict(placement.get("points", {})),
            trivial=placement.get("trivial", "interior"),
        ),
    )


def _piece_to_json(piece: PeriodicPieceData) -> dict:
    out: dict[str, Any] = {
        "id": piece.piece,
        "period": piece.period,
        "piece_degree": piece.piece_degree,
        "gamma": [
            {"curve": g.curve, "image": g.image, "degree": g.degree} for g in piece.gamma
        ],
        "interior_portrait": _covering_to_json(piece.interior_portrait),
    }
    if piece.beta:
        out["beta"] = [
            {"target": b.target, "degree": b.degree, "interior_marked": b.interior_marked}
            for b in piece.beta
        ]
    if piece.interior_curves:
        out["interior_curves"] = list(piece.interior_curves)
    out["placement"] = {
        "curves": dict(piece.placement.curves),
        "points": dict(piece.placement.points),
        "trivial": piece.placement.trivial,
    }
    return out


def _cross_reference_checks(doc: SpecDocument, problems: list[str]) -> None:
    point_ids = {p.id for p in doc.covering.points}
    universe = set(doc.curves.universe) if doc.curves else set()
    if doc.standard_form is not None:
        for a in doc.standard_form.annuli0:
            if doc.curves is not None and a.core not in universe:
                problems.append(
                    f"standard_form: thin annulus {a.id} core {a.core!r} is not in the universe"
                )
        for p in doc.standard_form.pieces:
            for m in p.marked_ids:
                if m not in point_ids:
                    problems.append(
                        f"standard_form: piece {p.id} marks undeclared point {m!r}"
                    )
    for piece in doc.periodic_pieces:
        for g in piece.gamma:
            if doc.curves is not None and g.curve not in universe:
                problems.append(
                    f"periodic piece {piece.piece}: boundary curve {g.curve!r} not in universe"
                )
        for cid in piece.interior_curves:
            if doc.curves is not None and cid not in universe:
                problems.append(
                    f"periodic piece {piece.piece}: interior curve {cid!r} not in universe"
                )
        for pt in piece.interior_portrait.points:
            if pt.id not in point_ids:
                problems.append(
                    f"periodic piece {piece.piece}: interior point {pt.id!r} is not a "
                    "declared marked point of the covering"
                )
    if doc.traces is not None and doc.curves is not None:
        for cid in doc.traces.curves:
            if cid not in universe:
                problems.append(f"traces: curve {cid!r} not in universe")


def parse(text: str, lenient: bool = False) -> SpecDocument:
    """Parse and cross-check a document.

    Syntax errors carry line/column; schema and reference errors carry JSON
    paths.  Unknown keys are rejected unless ``lenient``, in which case they
    become warnings on the returned document.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(
            [f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"]
        ) from exc

    validator = jsonschema.Draft202012Validator(SCHEMA)
    problems: list[str] = []
    warnings: list[str] = []
    for error in sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path)):
        path = "$" + "".join(
            f"[{p}]" if isinstance(p, int) else f".{p}" for p in error.absolute_path
        )
        message = f"schema violation at {path}: {error.message}"
        if lenient and error.validator == "additionalProperties":
            warnings.append(message)
        else:
            problems.append(message)
    if problems:
        raise DocumentError(problems)

    covering = _covering_from_json(raw["covering"], "covering", problems)
    table = (
        _table_from_json(raw["curves"], covering, problems) if "curves" in raw else None
    )
    standard_form = (
        _standard_form_from_json(raw["standard_form"], problems)
        if "standard_form" in raw
        else None
    )
    pieces = tuple(
        _piece_from_json(p, f"periodic_pieces[{k}]", problems)
        for k, p in enumerate(raw.get("periodic_pieces", []))
    )
    traces = None
    if "traces" in raw:
        traces = LengthTrace(
            curves=tuple(raw["traces"]["curves"]),
            samples=tuple(tuple(row) for row in raw["traces"]["samples"]),
        )

    doc = SpecDocument(
        covering=covering,
        curves=table,
        standard_form=standard_form,
        periodic_pieces=pieces,
        traces=traces,
        format_version=raw["format_version"],
        warnings=tuple(warnings),
    )
    _cross_reference_checks(doc, problems)
    if problems:
        raise DocumentError(problems)
    return doc


def to_json_dict(doc: SpecDocument) -> dict:
    out: dict[str, Any] = {
        "format_version": doc.format_version,
        "covering": _covering_to_json(doc.covering),
    }
    if doc.curves is not None:
        out["curves"] = _table_to_json(doc.curves)
    if doc.standard_form is not None:
        out["standard_form"] = _standard_form_to_json(doc.standard_form)
    if doc.periodic_pieces:
        out["periodic_pieces"] = [_piece_to_json(p) for p in doc.periodic_pieces]
    if doc.traces is not None:
        out["traces"] = {
            "curves": list(doc.traces.curves),
            "samples": [list(row) for row in doc.traces.samples],
        }
    return out


def emit(doc: SpecDocument) -> str:
    """Canonical serialization: sorted keys, two-space indent, newline at end."""
    return json.dumps(to_json_dict(doc), sort_keys=True, indent=2) + "\n"


def load_path(path: str, lenient: bool = False) -> SpecDocument:
    with open(path, "r", encoding="utf-8") as handle:
        return parse(handle.read(), lenient=lenient)


def corpus_names() -> list[str]:
    files = resources.files("s2cover") / "corpus"
    return sorted(p.name for p in files.iterdir() if p.name.endswith(".json"))


def load_corpus(name: str) -> SpecDocument:
    """Load a bundled document by file name (e.g. 'twocurve.json')."""
    files = resources.files("s2cover") / "corpus"
    return parse((files / name).read_text(encoding="utf-8"))
