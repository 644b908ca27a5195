"""Batch front end: parse instance documents, run analyses, emit reports.

Exit codes: 0 analysis completed (whatever the mathematical outcome),
1 internal invariant failure, 2 parse/schema/usage error, 3 validation
error (bad gram, rejected ample, bad nodal data).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .lattice import Lattice, Vec
from .oracle import cross_validate
from .surface import (
    ContextError,
    Effectivity,
    LineBundle,
    SurfaceContext,
    SurfaceKind,
    nodal_list_hash,
)
from .vanishing import (
    BundleAnalysis,
    H1Case,
    InvariantViolation,
    QuasiNefReport,
    analyze,
    is_quasi_nef,
)

SCHEMA = "qnef-report/1"

_H1_METHOD_NOTE = "exact h1 via fixed-component reduction"
_NONSTANDARD_WARNING = (
    "enriques semantics on a lattice that is not the rank-10 unimodular one"
)


class InstanceError(ValueError):
    """Schema-level problem in an instance document, addressed by field."""


@dataclass(frozen=True)
class InstanceDocument:
    surface: str
    gram: tuple[Vec, ...]
    ample: Vec
    enriques_mode: str | None  # "unnodal" | "nodal" | None (K3)
    nodal: tuple[Vec, ...] | None
    half_fibers: dict[Vec, frozenset[int]] | None
    bundles: tuple[tuple[str, LineBundle], ...]

    def bundle(self, label: str) -> LineBundle:
        for name, lb in self.bundles:
            if name == label:
                return lb
        known = ", ".join(repr(name) for name, _ in self.bundles) or "none"
        raise InstanceError(f"no bundle labeled {label!r} (known labels: {known})")


# -- strict JSON parsing -----------------------------------------------------


def _reject_float(text: str):
    raise InstanceError(f"floating-point literal {text!r}: integers only")


def _as_int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise InstanceError(f"{where}: expected an integer, got {x!r}")
    return x


def _as_vector(x, where: str, rank: int | None = None) -> Vec:
    if not isinstance(x, list):
        raise InstanceError(f"{where}: expected a list of integers, got {x!r}")
    v = tuple(_as_int(c, f"{where}[{i}]") for i, c in enumerate(x))
    if rank is not None and len(v) != rank:
        raise InstanceError(f"{where}: expected {rank} coordinates, got {len(v)}")
    return v


def _check_fields(obj: dict, where: str, required: tuple[str, ...], optional: tuple[str, ...]):
    for key in required:
        if key not in obj:
            raise InstanceError(f"{where}: missing required field {key!r}")
    for key in obj:
        if key not in required and key not in optional:
            raise InstanceError(f"{where}: unknown field {key!r}")


def parse_instance(text: str) -> InstanceDocument:
    """Strict parse of a JSON instance document; InstanceError names the field."""
    raw = json.loads(text, parse_float=_reject_float, parse_constant=_reject_float)
    if not isinstance(raw, dict):
        raise InstanceError("document: expected a JSON object at top level")
    _check_fields(
        raw, "document",
        required=("surface", "gram", "ample", "bundles"),
        optional=("enriques_mode", "nodal", "half_fibers"),
    )

    surface = raw["surface"]
    if surface not in ("k3", "enriques"):
        raise InstanceError(f'surface: expected "k3" or "enriques", got {surface!r}')
    is_enriques = surface == "enriques"

    if not isinstance(raw["gram"], list) or not raw["gram"]:
        raise InstanceError("gram: expected a nonempty list of rows")
    rank = len(raw["gram"])
    gram = tuple(_as_vector(row, f"gram[{i}]", rank) for i, row in enumerate(raw["gram"]))
    ample = _as_vector(raw["ample"], "ample", rank)

    mode = raw.get("enriques_mode")
    if not is_enriques:
        for key in ("enriques_mode", "nodal", "half_fibers"):
            if key in raw:
                raise InstanceError(f"{key}: applies to enriques surfaces only")
        mode = None
    else:
        if mode is None:
            mode = "unnodal"
        elif mode not in ("unnodal", "nodal"):
            raise InstanceError(
                f'enriques_mode: expected "unnodal" or "nodal", got {mode!r}'
            )

    nodal = None
    if "nodal" in raw:
        if mode != "nodal":
            raise InstanceError('nodal: only allowed when enriques_mode is "nodal"')
        if not isinstance(raw["nodal"], list):
            raise InstanceError("nodal: expected a list of classes")
        nodal = tuple(_as_vector(c, f"nodal[{i}]", rank) for i, c in enumerate(raw["nodal"]))
    elif mode == "nodal":
        raise InstanceError('nodal: required when enriques_mode is "nodal"')

    half_fibers = None
    if "half_fibers" in raw:
        if not isinstance(raw["half_fibers"], list):
            raise InstanceError("half_fibers: expected a list of declarations")
        half_fibers = {}
        for i, item in enumerate(raw["half_fibers"]):
            where = f"half_fibers[{i}]"
            if not isinstance(item, dict):
                raise InstanceError(f"{where}: expected an object")
            _check_fields(item, where, required=("coords", "bits"), optional=())
            coords = _as_vector(item["coords"], f"{where}.coords", rank)
            if not isinstance(item["bits"], list) or not item["bits"]:
                raise InstanceError(f"{where}.bits: expected a nonempty list of 0/1")
            bits = frozenset(_as_int(b, f"{where}.bits[{j}]") for j, b in enumerate(item["bits"]))
            if not bits <= {0, 1}:
                raise InstanceError(f"{where}.bits: entries must be 0 or 1")
            if coords in half_fibers:
                raise InstanceError(f"{where}.coords: duplicate declaration for {list(coords)}")
            half_fibers[coords] = bits

    if not isinstance(raw["bundles"], list):
        raise InstanceError("bundles: expected a list")
    bundles = []
    seen = set()
    for i, item in enumerate(raw["bundles"]):
        where = f"bundles[{i}]"
        if not isinstance(item, dict):
            raise InstanceError(f"{where}: expected an object")
        _check_fields(item, where, required=("label", "coords"), optional=("torsion",))
        label = item["label"]
        if not isinstance(label, str) or not label:
            raise InstanceError(f"{where}.label: expected a nonempty string")
        if label in seen:
            raise InstanceError(f"{where}.label: duplicate label {label!r}")
        seen.add(label)
        coords = _as_vector(item["coords"], f"{where}.coords", rank)
        torsion = _as_int(item.get("torsion", 0), f"{where}.torsion")
        if torsion not in (0, 1):
            raise InstanceError(f"{where}.torsion: expected 0 or 1, got {torsion}")
        if torsion and not is_enriques:
            raise InstanceError(f"{where}.torsion: must be 0 on a k3 surface")
        bundles.append((label, LineBundle(coords, torsion)))

    return InstanceDocument(
        surface=surface,
        gram=gram,
        ample=ample,
        enriques_mode=mode,
        nodal=nodal,
        half_fibers=half_fibers,
        bundles=tuple(bundles),
    )


_KINDS = {"k3": SurfaceKind.K3, "enriques": SurfaceKind.ENRIQUES}


def build_context(doc: InstanceDocument) -> SurfaceContext:
    """Validated SurfaceContext; ContextError / ValueError mean exit code 3."""
    lattice = Lattice(doc.gram)
    return SurfaceContext(
        _KINDS[doc.surface],
        lattice,
        doc.ample,
        nodal=doc.nodal,
        half_fibers=doc.half_fibers,
    )


# -- report assembly ---------------------------------------------------------


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(c) for c in v) + ")"


def _envelope(command: str, doc: InstanceDocument, ctx: SurfaceContext) -> dict:
    warnings = [_NONSTANDARD_WARNING] if ctx.nonstandard_lattice else []
    return {
        "schema": SCHEMA,
        "command": command,
        "surface": doc.surface,
        "chi": ctx.chi,
        "gram": [list(row) for row in ctx.lattice.gram],
        "ample": list(ctx.ample),
        "enriques_mode": doc.enriques_mode,
        "nodal_hash": nodal_list_hash(ctx.nodal) if ctx.nodal is not None else None,
        "conditional": ctx.conditional,
        "warnings": warnings,
    }


def _chain_json(chain) -> list[dict]:
    return [
        {
            "gamma": list(s.gamma),
            "pairing": s.pairing,
            "before": list(s.before.coords),
            "after": list(s.after.coords),
        }
        for s in chain.steps
    ]


def _bundle_json(label: str, ba: BundleAnalysis) -> dict:
    cls = ba.classification
    out = {
        "label": label,
        "coords": list(ba.bundle.coords),
        "torsion": ba.bundle.torsion,
        "status": ba.status,
        "effective": ba.effective.value,
        "norm": ba.norm,
        "degree": ba.degree,
        "euler_characteristic": ba.euler,
        "h0": ba.h0,
        "h1": ba.h1,
        "h2": ba.h2,
        "nef": ba.nef,
        "nef_violator": list(ba.nef_violator) if ba.nef_violator else None,
        "quasi_nef": ba.quasi_nef,
        "case": cls.case.value if cls else None,
        "n": cls.n if cls else None,
        "e": list(cls.e) if cls and cls.e else None,
        "e_torsion": cls.e_torsion if cls else None,
        "witness": list(cls.witness) if cls and cls.witness else None,
        "witness_pairing": cls.witness_pairing if cls else None,
        "chain": _chain_json(cls.chain) if cls else None,
        "final": list(cls.chain.final.coords) if cls else None,
        "bounded_search": cls.chain.bounded if cls else False,
        "via_serre_dual": ba.via_serre_dual,
        "conditional": ba.conditional,
        "notes": list(ba.notes),
    }
    if cls and cls.case is H1Case.ROOT_OBSTRUCTED:
        out["notes"].append(_H1_METHOD_NOTE)
    return out


def _render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _text_header(doc: InstanceDocument, ctx: SurfaceContext) -> list[str]:
    lines = [
        f"surface: {ctx.kind.value} (chi {ctx.chi}), rank {ctx.lattice.rank}",
        f"ample: {_fmt_vec(ctx.ample)}",
    ]
    if doc.enriques_mode is not None:
        lines.append(f"enriques mode: {doc.enriques_mode}")
    if ctx.nodal is not None:
        lines.append(f"nodal classes: {len(ctx.nodal)}, hash {nodal_list_hash(ctx.nodal)}")
    if ctx.nonstandard_lattice:
        lines.append(f"warning: {_NONSTANDARD_WARNING}")
    if ctx.conditional:
        lines.append("note: answers are conditional on the declared nodal list being complete")
    return lines


def _fmt_chain(chain) -> str:
    if not chain.steps:
        return "already nef"
    parts = [_fmt_vec(chain.start.coords)]
    for s in chain.steps:
        parts.append(f"-[{_fmt_vec(s.gamma)}, {s.pairing}]-> {_fmt_vec(s.after.coords)}")
    return " ".join(parts)


def _bundle_text(label: str, ba: BundleAnalysis) -> list[str]:
    lb = ba.bundle
    torsion = " + torsion" if lb.torsion else ""
    lines = [
        f"[{label}] {_fmt_vec(lb.coords)}{torsion}",
        f"  status: {ba.status}; effective: {ba.effective.value}; "
        f"norm {ba.norm}; degree {ba.degree}; chi {ba.euler}",
    ]
    if ba.h0 is not None:
        lines.append(f"  h0 {ba.h0}   h1 {ba.h1}   h2 {ba.h2}")
    if ba.nef is not None:
        nv = f", violator {_fmt_vec(ba.nef_violator)}" if ba.nef_violator else ""
        lines.append(f"  nef: {'yes' if ba.nef else 'no'}{nv}")
    if ba.quasi_nef is not None:
        lines.append(f"  quasi-nef: {'yes' if ba.quasi_nef else 'no'}")
    cls = ba.classification
    if cls is not None:
        dual = " (of the Serre dual)" if ba.via_serre_dual else ""
        lines.append(f"  case{dual}: {cls.case.value}")
        if cls.n is not None:
            bit = f", torsion {cls.e_torsion}" if cls.e_torsion else ""
            lines.append(f"  isotropic structure: n = {cls.n}, E = {_fmt_vec(cls.e)}{bit}")
        if cls.witness is not None:
            lines.append(
                f"  witness: {_fmt_vec(cls.witness)} with pairing {cls.witness_pairing}"
            )
        if cls.chain.steps or ba.via_serre_dual:
            lines.append(f"  chain{dual}: {_fmt_chain(cls.chain)}")
        if cls.chain.bounded:
            lines.append("  bounded search: results valid up to the degree cap only")
        if cls.case is H1Case.ROOT_OBSTRUCTED:
            lines.append(f"  note: {_H1_METHOD_NOTE}")
    for note in ba.notes:
        lines.append(f"  note: {note}")
    if ba.conditional:
        lines.append("  conditional: yes")
    return lines


# -- commands ----------------------------------------------------------------


def _cmd_analyze(args, doc: InstanceDocument, ctx: SurfaceContext) -> tuple[str, int]:
    def run(item):
        label, lb = item
        return label, analyze(ctx, lb, args.max_degree)

    if args.threads > 1 and len(doc.bundles) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(run, doc.bundles))
    else:
        results = [run(item) for item in doc.bundles]

    if args.format == "json":
        report = _envelope("analyze", doc, ctx)
        report["max_degree"] = args.max_degree
        report["bundles"] = [_bundle_json(label, ba) for label, ba in results]
        return _render_json(report), 0
    lines = _text_header(doc, ctx)
    if args.max_degree is not None:
        lines.append(f"bounded search: degree cap {args.max_degree}")
    for label, ba in results:
        lines.append("")
        lines.extend(_bundle_text(label, ba))
    return "\n".join(lines) + "\n", 0


def _cmd_roots(args, doc: InstanceDocument, ctx: SurfaceContext) -> tuple[str, int]:
    slices = []
    for d in range(1, args.max_degree + 1):
        for v in ctx.roots_of_degree(d):
            eff = ctx.is_effective(LineBundle(v))
            slices.append((d, v, eff))
    if args.format == "json":
        report = _envelope("roots", doc, ctx)
        report["max_degree"] = args.max_degree
        report["roots"] = [
            {"degree": d, "coords": list(v), "effective": eff.value}
            for d, v, eff in slices
        ]
        return _render_json(report), 0
    lines = _text_header(doc, ctx)
    lines.append(f"roots of degree 1..{args.max_degree}: {len(slices)}")
    for d, v, eff in slices:
        lines.append(f"  degree {d}: {_fmt_vec(v)}  [{eff.value}]")
    return "\n".join(lines) + "\n", 0


def _cmd_reduce(args, doc: InstanceDocument, ctx: SurfaceContext) -> tuple[str, int]:
    lb = doc.bundle(args.label)
    ba = analyze(ctx, lb, args.max_degree)
    cls = ba.classification
    if args.format == "json":
        report = _envelope("reduce", doc, ctx)
        report["max_degree"] = args.max_degree
        report["label"] = args.label
        report["coords"] = list(lb.coords)
        report["torsion"] = lb.torsion
        report["status"] = ba.status
        report["via_serre_dual"] = ba.via_serre_dual
        report["notes"] = list(ba.notes)
        if cls is not None:
            report["chain"] = _chain_json(cls.chain)
            report["final"] = list(cls.chain.final.coords)
            report["final_norm"] = ctx.norm(cls.chain.final.coords)
            report["final_degree"] = ctx.degree(cls.chain.final)
            report["bounded_search"] = cls.chain.bounded
            report["h1_increment"] = sum(-s.pairing - 1 for s in cls.chain.steps)
        else:
            report["chain"] = None
            report["final"] = None
        return _render_json(report), 0
    lines = _text_header(doc, ctx)
    lines.append(f"[{args.label}] {_fmt_vec(lb.coords)}" + (" + torsion" if lb.torsion else ""))
    if cls is None:
        lines.append(f"  status: {ba.status}; no reduction chain")
        for note in ba.notes:
            lines.append(f"  note: {note}")
    else:
        if ba.via_serre_dual:
            lines.append("  reduction ran on the Serre dual (the class itself is not effective)")
        lines.append(f"  chain: {_fmt_chain(cls.chain)}")
        lines.append(
            f"  final: {_fmt_vec(cls.chain.final.coords)}"
            f" (norm {ctx.norm(cls.chain.final.coords)},"
            f" degree {ctx.degree(cls.chain.final)})"
        )
        lines.append(f"  h1 increment from the chain: {sum(-s.pairing - 1 for s in cls.chain.steps)}")
        if cls.chain.bounded:
            lines.append("  bounded search: results valid up to the degree cap only")
    return "\n".join(lines) + "\n", 0


def _cmd_quasinef(args, doc: InstanceDocument, ctx: SurfaceContext) -> tuple[str, int]:
    lb = doc.bundle(args.label)
    ba = analyze(ctx, lb, args.max_degree)
    qn: QuasiNefReport | None = None
    if (
        ba.status == "ok"
        and ba.effective is Effectivity.EFFECTIVE
        and not lb.is_zero_class
        and ba.norm >= 0
    ):
        qn = is_quasi_nef(ctx, lb, args.max_degree)
    elif lb.is_zero_class and lb.torsion == 0:
        qn = QuasiNefReport(True)
    if args.format == "json":
        report = _envelope("quasinef", doc, ctx)
        report["max_degree"] = args.max_degree
        report["label"] = args.label
        report["coords"] = list(lb.coords)
        report["torsion"] = lb.torsion
        report["status"] = ba.status
        report["quasi_nef"] = qn.quasi_nef if qn else None
        report["witness"] = list(qn.witness) if qn and qn.witness else None
        report["witness_pairing"] = qn.witness_pairing if qn else None
        report["isotropic"] = (
            {"n": qn.isotropic[0], "e": list(qn.isotropic[1])}
            if qn and qn.isotropic
            else None
        )
        report["notes"] = list(ba.notes)
        return _render_json(report), 0
    lines = _text_header(doc, ctx)
    lines.append(f"[{args.label}] {_fmt_vec(lb.coords)}" + (" + torsion" if lb.torsion else ""))
    if qn is None:
        lines.append(f"  status: {ba.status}; quasi-nefness not defined for this class")
        for note in ba.notes:
            lines.append(f"  note: {note}")
    elif qn.quasi_nef:
        iso = ""
        if qn.isotropic:
            iso = f" (isotropic multiple: n = {qn.isotropic[0]}, E = {_fmt_vec(qn.isotropic[1])})"
        lines.append(f"  quasi-nef: yes{iso}")
    else:
        lines.append(
            f"  quasi-nef: no; witness {_fmt_vec(qn.witness)}"
            f" with pairing {qn.witness_pairing}"
        )
    if qn and qn.conditional:
        lines.append("  conditional: yes")
    return "\n".join(lines) + "\n", 0


def _cmd_oracle_check(args, doc: InstanceDocument, ctx: SurfaceContext) -> tuple[str, int]:
    rep = cross_validate(ctx, args.cap)
    code = 0 if rep.clean else 1
    if args.format == "json":
        report = _envelope("oracle-check", doc, ctx)
        report["cap"] = rep.degree_cap
        report["bundles_checked"] = rep.bundles_checked
        report["counts"] = dict(sorted(rep.counts.items()))
        report["mismatches"] = rep.mismatches
        report["clean"] = rep.clean
        return _render_json(report), code
    lines = _text_header(doc, ctx)
    lines.append(f"cross-validation up to degree {rep.degree_cap}: {rep.bundles_checked} bundles")
    for case, count in sorted(rep.counts.items()):
        lines.append(f"  {case}: {count}")
    if rep.clean:
        lines.append("  all checks agree")
    else:
        lines.append(f"  MISMATCHES: {len(rep.mismatches)}")
        for m in rep.mismatches:
            lines.append(f"    {m}")
    return "\n".join(lines) + "\n", code


# -- entry point -------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnef",
        description=(
            "Decide first-cohomology vanishing for line bundle classes on K3 "
            "and Enriques surfaces from lattice data, in exact arithmetic."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, max_degree=True):
        p.add_argument("instance", help="path to a JSON instance document, or - for stdin")
        p.add_argument(
            "--format", choices=("text", "json"), default="text",
            help="output format (default: text)",
        )
        if max_degree:
            p.add_argument(
                "--max-degree", type=_positive_int, default=None,
                help="cap root searches at this ample degree (marks the report as bounded)",
            )

    p = sub.add_parser("analyze", help="full classification of every bundle in the document")
    common(p)
    p.add_argument(
        "--threads", type=_positive_int, default=1,
        help="analyze bundles in parallel; report order still follows the document",
    )
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("roots", help="list roots graded by ample degree")
    common(p, max_degree=False)
    p.add_argument(
        "--max-degree", type=_positive_int, required=True,
        help="largest ample degree to enumerate",
    )
    p.set_defaults(func=_cmd_roots)

    p = sub.add_parser("reduce", help="show the nef-reduction chain of one labeled bundle")
    common(p)
    p.add_argument("label", help="bundle label from the document")
    p.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("quasinef", help="quasi-nefness verdict for one labeled bundle")
    common(p)
    p.add_argument("label", help="bundle label from the document")
    p.set_defaults(func=_cmd_quasinef)

    p = sub.add_parser("oracle-check", help="cross-validate the classifier against brute force")
    common(p, max_degree=False)
    p.add_argument(
        "--cap", type=_positive_int, required=True,
        help="check every effective class up to this ample degree",
    )
    p.set_defaults(func=_cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return exc.code if isinstance(exc.code, int) else 2

    try:
        if args.instance == "-":
            text = sys.stdin.read()
        else:
            with open(args.instance, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        print(f"error: cannot read instance: {exc}", file=sys.stderr)
        return 2

    try:
        doc = parse_instance(text)
    except json.JSONDecodeError as exc:
        print(f"error: instance is not valid JSON: {exc}", file=sys.stderr)
        return 2
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        ctx = build_context(doc)
    except (ContextError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    try:
        output, code = args.func(args, doc, ctx)
    except InstanceError as exc:  # unknown label and similar addressing errors
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolation, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(output)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
