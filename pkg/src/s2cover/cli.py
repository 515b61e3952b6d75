"""Command-line interface.

Exit codes: 0 = success, 1 = negative domain verdict (obstruction found or
realizability precondition failed), 2 = invalid input.  Reports separate
data-level diagnostics (validation) from the verdicts themselves, and
``--json`` switches to a stable machine-readable rendering.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any

import mpmath as mp

from . import document, estimates
from .curves import Multicurve, validate_table
from .decomposition import StandardFormError, decomposition_report, validate_standard_form
from .extension import (
    ExtensionError,
    classify_extended,
    extend,
    induced_pullback,
    realizability_report,
    validate_extension,
)
from .linalg import (
    DEFAULT_UNIVERSE_CAP,
    UniverseCapExceeded,
    length_decay_diagnostic,
    search_obstructions,
    spectral_radius,
    thurston_matrix,
)
from .model import (
    PortraitError,
    SPHERICAL,
    classify_type,
    compute_signature,
    orbifold_type,
    postcritical_set,
    validate_spec,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INVALID = 2

FORMAT_VERSION = 1


class _CliFailure(Exception):
    def __init__(self, exit_code: int, message: str):
        self.exit_code = exit_code
        self.message = message
        super().__init__(message)


def _load(args) -> document.SpecDocument:
    if not args.input:
        raise _CliFailure(EXIT_INVALID, "missing required --input FILE")
    try:
        return document.load_path(args.input, lenient=args.lenient)
    except FileNotFoundError:
        raise _CliFailure(EXIT_INVALID, f"no such file: {args.input}")
    except document.DocumentError as exc:
        raise _CliFailure(EXIT_INVALID, f"invalid document:\n{exc}")


def _need(doc: document.SpecDocument, section: str) -> Any:
    value = getattr(doc, section)
    if not value:
        raise _CliFailure(EXIT_INVALID, f"document has no {section} section")
    return value


def _emit(args, payload: dict, human: list[str]) -> None:
    if args.json:
        payload = {"format_version": FORMAT_VERSION, **payload}
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        for line in human:
            print(line)


def _certificate_json(cert) -> dict:
    return {
        "radius": repr(cert.value),
        "comparison_vs_1": cert.exact_comparison_vs_1,
        "method": cert.method,
    }


def _cmd_validate(args) -> int:
    doc = _load(args)
    reports = {"covering": validate_spec(doc.covering)}
    if doc.curves is not None:
        reports["curves"] = validate_table(doc.curves)
    if doc.standard_form is not None:
        reports["standard_form"] = validate_standard_form(doc.standard_form)
    for piece in doc.periodic_pieces:
        reports[f"periodic_piece:{piece.piece}"] = validate_extension(piece)
    if doc.traces is not None:
        reports["traces"] = doc.traces.validate()

    ok = all(r.ok for r in reports.values())
    payload = {
        "command": "validate",
        "valid": ok,
        "sections": {
            name: {"violations": list(r.violations), "warnings": list(r.warnings)}
            for name, r in reports.items()
        },
    }
    human = []
    for name, r in reports.items():
        human.append(f"[{name}] {'valid' if r.ok else 'INVALID'}")
        human.extend(f"  violation: {v}" for v in r.violations)
        human.extend(f"  warning: {w}" for w in r.warnings)
    human.append("document valid" if ok else "document INVALID")
    _emit(args, payload, human)
    return EXIT_OK if ok else EXIT_INVALID


def _cmd_orbifold(args) -> int:
    doc = _load(args)
    try:
        sig = compute_signature(doc.covering)
        ctype = classify_type(doc.covering)
        pset = postcritical_set(doc.covering)
    except (PortraitError, ValueError) as exc:
        raise _CliFailure(EXIT_INVALID, str(exc))
    otype = orbifold_type(sig)
    nu_repr = {pid: str(v) for pid, v in sorted(sig.nu.items())}
    payload = {
        "command": "orbifold",
        "classification": ctype,
        "postcritical": sorted(pset),
        "signature": nu_repr,
        "chi": str(sig.chi),
        "orbifold": otype,
        "anomalous": otype == SPHERICAL,
    }
    human = [
        f"classification: {ctype}",
        f"postcritical set: {', '.join(sorted(pset)) or '(empty)'}",
        "signature: " + ", ".join(f"nu({p}) = {v}" for p, v in sorted(sig.nu.items())),
        f"euler characteristic: {sig.chi}",
        f"orbifold: {otype}",
    ]
    if otype == SPHERICAL:
        human.append("anomaly: positive Euler characteristic for a branched covering portrait")
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_thurston(args) -> int:
    doc = _load(args)
    table = _need(doc, "curves")
    if not args.multicurve:
        raise _CliFailure(EXIT_INVALID, "missing --multicurve g1,g2,...")
    try:
        mc = Multicurve(tuple(args.multicurve.split(",")))
        matrix = thurston_matrix(table, mc)
    except ValueError as exc:
        raise _CliFailure(EXIT_INVALID, str(exc))
    cert = spectral_radius(matrix)
    payload = {
        "command": "thurston",
        "multicurve": list(mc.curves),
        "matrix": [[str(e) for e in row] for row in matrix.entries],
        "certificate": _certificate_json(cert),
    }
    human = [f"multicurve: {', '.join(mc.curves)}", "matrix (rows = classes):"]
    human += ["  [" + ", ".join(str(e) for e in row) + "]" for row in matrix.entries]
    human.append(
        f"spectral radius ~ {cert.value} ({cert.exact_comparison_vs_1} vs 1, {cert.method})"
    )
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_search(args) -> int:
    doc = _load(args)
    table = _need(doc, "curves")
    try:
        records = search_obstructions(table, universe_cap=args.universe_cap)
    except UniverseCapExceeded as exc:
        raise _CliFailure(EXIT_INVALID, str(exc))

    decay = None
    if doc.traces is not None and args.floor is not None:
        decay = length_decay_diagnostic(doc.traces, args.floor, args.window)

    payload: dict[str, Any] = {
        "command": "search",
        "universe": list(table.universe),
        "obstructions": [
            {
                "multicurve": list(r.multicurve.curves),
                "certificate": _certificate_json(r.certificate),
                "stable": r.stable,
                "full": r.full,
                "irreducible": r.irreducible,
                "canonical_candidate": r.canonical_candidate,
            }
            for r in records
        ],
    }
    human = [f"universe: {', '.join(table.universe)}"]
    if not records:
        human.append("no obstructions in the declared universe")
    for r in records:
        tags = [t for t, on in (("full", r.full), ("irreducible", r.irreducible)) if on]
        if r.canonical_candidate:
            tags.append("canonical candidate")
        human.append(
            f"obstruction {{{', '.join(r.multicurve.curves)}}}: radius ~ "
            f"{r.certificate.value} ({r.certificate.exact_comparison_vs_1} vs 1)"
            + (f" [{', '.join(tags)}]" if tags else "")
        )
    if decay is not None:
        payload["length_decay"] = {
            "gamma_c": list(decay.gamma_c),
            "floor_violations": list(decay.floor_violations),
        }
        human.append(f"length-decay gamma_c: {{{', '.join(decay.gamma_c)}}}")
        human.extend(f"floor violation: {v}" for v in decay.floor_violations)
    _emit(args, payload, human)
    return EXIT_NEGATIVE if records else EXIT_OK


def _cmd_decompose(args) -> int:
    doc = _load(args)
    sf = _need(doc, "standard_form")
    try:
        result = decomposition_report(sf)
    except StandardFormError as exc:
        raise _CliFailure(EXIT_INVALID, str(exc))
    pm = result.piece_map
    payload = {
        "command": "decompose",
        "thin_annuli": [{"id": a.id, "core": a.core} for a in result.annuli0],
        "pieces": [p.id for p in result.pieces],
        "classifications": dict(sorted(result.classifications.items())),
        "tau": dict(sorted(pm.tau.items())),
        "cycles": [list(c) for c in pm.cycles],
        "tails": dict(sorted(pm.tails.items())),
        "periodic_pieces": list(result.periodic_pieces),
    }
    human = [
        f"thin annuli: {', '.join(a.id + ' (core ' + a.core + ')' for a in result.annuli0)}",
        f"thick pieces: {', '.join(p.id for p in result.pieces)}",
        "piece map: " + ", ".join(f"{i} -> {j}" for i, j in sorted(pm.tau.items())),
        "cycles: " + "; ".join("(" + " -> ".join(c) + ")" for c in pm.cycles),
        "preperiods: " + ", ".join(f"{i}: {t}" for i, t in sorted(pm.tails.items())),
        f"periodic pieces: {', '.join(result.periodic_pieces)}",
        "every thick piece is preperiodic; at least one is periodic",
    ]
    _emit(args, payload, human)
    return EXIT_OK


def _pick_piece(doc: document.SpecDocument, args):
    pieces = _need(doc, "periodic_pieces")
    if args.piece:
        for p in pieces:
            if p.piece == args.piece:
                return p
        raise _CliFailure(EXIT_INVALID, f"no periodic piece named {args.piece!r}")
    return pieces[0]


def _cmd_extend(args) -> int:
    doc = _load(args)
    data = _pick_piece(doc, args)
    report = validate_extension(data)
    if not report.ok:
        raise _CliFailure(EXIT_INVALID, f"periodic-piece data invalid:\n{report}")
    ext = extend(data, default_multiplier=Fraction(args.multiplier_default))
    payload = {
        "command": "extend",
        "piece": data.piece,
        "degree": ext.spec.degree,
        "classification": classify_extended(ext),
        "new_marked": list(ext.new_marked),
        "new_cycles": [
            {
                "points": list(c.points),
                "degree_product": c.degree_product,
                "kind": c.kind,
                "multiplier": str(c.multiplier) if c.multiplier is not None else None,
                "default_multiplier_applied": c.default_multiplier_applied,
            }
            for c in ext.new_cycles
        ],
        "portrait": [
            {"id": p.id, "image": p.image, "local_degree": p.local_degree, "role": p.role}
            for p in ext.spec.points
        ],
        "p_set": list(ext.p_set),
    }
    human = [
        f"piece {data.piece}: extended covering of degree {ext.spec.degree}",
        f"classification: {ext.classification}",
        f"new marked points: {', '.join(ext.new_marked)}",
    ]
    for c in ext.new_cycles:
        line = (
            f"boundary cycle ({' -> '.join(c.points)}): {c.kind}, degree product "
            f"{c.degree_product}"
        )
        if c.default_multiplier_applied:
            line += f" [multiplier defaulted to {c.multiplier}]"
        human.append(line)
    human.append("portrait:")
    human += [
        f"  {p.id} -> {p.image} (degree {p.local_degree}, {p.role})"
        for p in ext.spec.points
    ]
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_verdict(args) -> int:
    doc = _load(args)
    table = _need(doc, "curves")
    data = _pick_piece(doc, args)
    try:
        ext = extend(data, default_multiplier=Fraction(args.multiplier_default))
        induced = induced_pullback(table, data, ext)
        verdict = realizability_report(ext, induced, universe_cap=args.universe_cap)
    except (ExtensionError, UniverseCapExceeded) as exc:
        raise _CliFailure(EXIT_INVALID, str(exc))
    payload = {
        "command": "verdict",
        "piece": data.piece,
        "status": verdict.status,
        "classification": verdict.classification,
        "chi": str(verdict.chi),
        "orbifold": verdict.orbifold,
        "signature": {p: str(v) for p, v in sorted(verdict.signature.nu.items())},
        "induced_universe": list(induced.universe),
        "obstructions": [
            {
                "multicurve": list(r.multicurve.curves),
                "certificate": _certificate_json(r.certificate),
                "canonical_candidate": r.canonical_candidate,
            }
            for r in verdict.obstructions
        ],
        "statement": verdict.statement,
        "notes": list(verdict.notes),
    }
    human = [
        f"piece {data.piece}: {verdict.statement}",
        f"  classification: {verdict.classification}",
        f"  chi = {verdict.chi} ({verdict.orbifold})",
        f"  induced universe: {{{', '.join(induced.universe)}}}",
        f"  obstructions found: {len(verdict.obstructions)}",
    ]
    human += [f"  note: {n}" for n in verdict.notes]
    _emit(args, payload, human)
    return EXIT_OK if verdict.status == "realizable" else EXIT_NEGATIVE


def _parse_sweep(sweep: str) -> tuple[str, list[str]]:
    name, _, spec = sweep.partition("=")
    parts = spec.split(":")
    if len(parts) != 3:
        raise _CliFailure(EXIT_INVALID, "sweep must look like param=start:stop:steps")
    start, stop, steps = mp.mpf(parts[0]), mp.mpf(parts[1]), int(parts[2])
    if steps < 2:
        raise _CliFailure(EXIT_INVALID, "sweep needs at least 2 steps")
    values = [start + (stop - start) * k / (steps - 1) for k in range(steps)]
    return name, [mp.nstr(v, 17) for v in values]


def _cmd_estimates(args) -> int:
    params = {}
    for key in ("l", "z", "K", "K1", "abs_z", "x", "lE", "c", "epsilon"):
        value = getattr(args, key, None)
        if value is not None:
            params[key.replace("abs_z", "abs-z")] = value
    dps = max(50, args.precision + 10)

    try:
        if args.sweep:
            name, values = _parse_sweep(args.sweep)
            rows = []
            for v in values:
                local = dict(params)
                local[name] = v
                result = estimates.evaluate_formula(args.formula, local, dps=dps)
                rows.append((v, result.value))
            lines = [f"{name}\t{args.formula}"]
            for v, val in rows:
                if isinstance(val, tuple):
                    rendered = "\t".join(mp.nstr(x, args.precision) for x in val)
                else:
                    rendered = mp.nstr(val, args.precision)
                lines.append(f"{v}\t{rendered}")
            print("\n".join(lines))
            return EXIT_OK
        result = estimates.evaluate_formula(args.formula, params, dps=dps)
    except ValueError as exc:
        raise _CliFailure(EXIT_INVALID, str(exc))

    if isinstance(result.value, tuple):
        rendered = (
            "(" + ", ".join(mp.nstr(v, args.precision) for v in result.value) + ")"
        )
        json_value: Any = [mp.nstr(v, args.precision) for v in result.value]
    else:
        rendered = mp.nstr(result.value, args.precision)
        json_value = rendered
    payload = {
        "command": "estimates",
        "formula": result.formula,
        "inputs": {k: str(v) for k, v in result.inputs.items()},
        "value": json_value,
    }
    _emit(args, payload, [f"{result.formula}({', '.join(f'{k}={v}' for k, v in result.inputs.items())}) = {rendered}"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s2cover",
        description=(
            "Obstruction linear algebra, thick/thin decomposition, extension and "
            "realizability verdicts for branched self-coverings of the marked sphere."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
        if needs_input:
            p.add_argument("--input", help="covering-spec document (JSON)")
            p.add_argument(
                "--lenient", action="store_true", help="warn on unknown keys instead of rejecting"
            )
        p.add_argument("--json", action="store_true", help="machine-readable report")

    p = sub.add_parser("validate", help="run every data-level validator")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("orbifold", help="signature, Euler characteristic, orbifold type")
    common(p)
    p.set_defaults(func=_cmd_orbifold)

    p = sub.add_parser("thurston", help="Thurston matrix and certificate for a multicurve")
    common(p)
    p.add_argument("--multicurve", help="comma-separated curve ids")
    p.set_defaults(func=_cmd_thurston)

    p = sub.add_parser("search", help="exhaustive obstruction search over the universe")
    common(p)
    p.add_argument("--universe-cap", type=int, default=DEFAULT_UNIVERSE_CAP)
    p.add_argument("--floor", type=float, help="length floor for the decay diagnostic")
    p.add_argument("--window", type=int, default=8, help="trailing decay window")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("decompose", help="thick/thin decomposition report")
    common(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("extend", help="extend a periodic thick piece")
    common(p)
    p.add_argument("--piece", help="periodic piece id (default: first)")
    p.add_argument("--multiplier-default", default="1/2", help="modulus for degree-1 cycles")
    p.set_defaults(func=_cmd_extend)

    p = sub.add_parser("verdict", help="extension plus realizability verdict")
    common(p)
    p.add_argument("--piece", help="periodic piece id (default: first)")
    p.add_argument("--multiplier-default", default="1/2")
    p.add_argument("--universe-cap", type=int, default=DEFAULT_UNIVERSE_CAP)
    p.set_defaults(func=_cmd_verdict)

    p = sub.add_parser("estimates", help="evaluate a hyperbolic-geometry bound")
    common(p, needs_input=False)
    p.add_argument("formula", help="one of: " + ", ".join(sorted(estimates.FORMULAS)))
    p.add_argument("--l", help="geodesic length")
    p.add_argument("--z", help="argument in (0,1)")
    p.add_argument("--K", help="length floor on the uncut surface")
    p.add_argument("--K1", help="collar modulus floor")
    p.add_argument("--abs-z", dest="abs_z", help="|z| for the separation bound")
    p.add_argument("--x", help="argument in (0,1) for the density bound")
    p.add_argument("--lE", help="length on the puncture complement")
    p.add_argument("--c", help="collar-defect constant (> 1)")
    p.add_argument("--epsilon", help="comparison epsilon in (0,1)")
    p.add_argument("--precision", type=int, default=15, help="output digits")
    p.add_argument("--sweep", help="param=start:stop:steps, emits a TSV table")
    p.set_defaults(func=_cmd_estimates)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliFailure as exc:
        print(exc.message, file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
