"""
SolAut Reports Module
Matrix argument parsing and the report documents shared by the command
line and the HTTP API.

Report documents keep a fixed top-level layout
{version, command, input, result, verification, flags} and emit every
integer as a decimal string.
"""

import logging
import re
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from . import __version__
from . import gl2z, sapphire, torusbundle
from .errors import ParseError, VerificationError
from .intmat import Mat2
from .structgrp import check_group_axioms, isomorphic, out_bruteforce, realize, verify_presentation

logger = logging.getLogger(__name__)

_MATRIX_RE = re.compile(r"^\s*(-?\d+)\s*,\s*(-?\d+)\s*;\s*(-?\d+)\s*,\s*(-?\d+)\s*$")

KINDS = ("torus-bundle", "sapphire")


def parse_matrix(text: str) -> Mat2:
    """Parse "a,b;c,d" (whitespace tolerated) into a Mat2."""
    m = _MATRIX_RE.match(text or "")
    if not m:
        raise ParseError(f"cannot parse matrix {text!r}; expected 'a,b;c,d'", {"input": text})
    return Mat2(*(int(x) for x in m.groups()))


def format_matrix(A: Mat2) -> str:
    return f"{A.a},{A.b};{A.c},{A.d}"


def stringify(value: Any) -> Any:
    """Recursively turn integers into decimal strings; booleans and None stay as they are."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, dict):
        return {str(k): stringify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [stringify(v) for v in value]
    return value


class ReportDocument(BaseModel):
    version: str = __version__
    command: str
    input: Dict[str, Any] = Field(default_factory=dict)
    result: Dict[str, Any] = Field(default_factory=dict)
    verification: Dict[str, Any] = Field(default_factory=dict)
    flags: Dict[str, Any] = Field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(v.get("ok", True) for v in self.verification.values() if isinstance(v, dict))

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def make_report(command: str, input: dict, result: dict, verification: Optional[dict] = None,
                flags: Optional[dict] = None) -> ReportDocument:
    return ReportDocument(
        command=command,
        input=stringify(input),
        result=stringify(result),
        verification=stringify(verification or {}),
        flags=stringify(flags or {}),
    )


# ----- classify -----

def classify_report(A: Mat2) -> ReportDocument:
    cls = gl2z.classify(A)
    result: Dict[str, Any] = {"classification": cls.to_dict()}
    if cls.anosov:
        result["primitive_root"] = gl2z.primitive_root(A).to_dict()
        reverser = gl2z.find_reverser(A)
        result["reverser"] = reverser.to_dict()
        if reverser.exists:
            result["reverser"]["reidemeister_finite"] = gl2z.reidemeister_finite_flag(A, reverser.witness)
    if not A.is_scalar():
        result["square_roots"] = [str(X) for X in gl2z.sqrt_matrices(A)]
    return make_report("classify", {"matrix": format_matrix(A)}, result)


# ----- aut / out -----

def _build(kind: str, M: Mat2):
    if kind == "torus-bundle":
        return torusbundle, torusbundle.build(M)
    if kind == "sapphire":
        return sapphire, sapphire.build(M)
    raise ParseError(f"unknown group kind {kind!r}; expected one of {', '.join(KINDS)}", {"kind": kind})


def _case_fields(kind: str, G) -> dict:
    if kind == "torus-bundle":
        return {"case": G.case.to_dict()}
    return {"case": G.case, "omega_grade": G.omega_grade, "aut01": G.aut01.to_dict()}


def _group_flags(kind: str, G) -> dict:
    return {"generic_shape": bool(kind == "sapphire" and G.generic_shape)}


def aut_report(kind: str, M: Mat2, verify: bool = False) -> ReportDocument:
    module, G = _build(kind, M)
    tree = module.aut_structure(G)
    result = {
        "group": G.to_dict(),
        **_case_fields(kind, G),
        "shape": tree.shape(),
        "tree": tree.to_dict(),
        "automorphisms": {name: phi.to_dict() for name, phi in G.named.items()},
    }
    verification = {}
    if verify:
        report = module.verify_aut_relators(G)
        verification["relators"] = report.to_dict()
        if not report.ok:
            raise VerificationError(f"Aut(E) relators fail for {M}: {report.failures}", {"failures": report.failures})
    return make_report("aut", {"kind": kind, "matrix": format_matrix(M)}, result, verification, _group_flags(kind, G))


def verify_out(module, G, out) -> Dict[str, dict]:
    """Relators mod Inn in the word engine, the realization, and the brute-force oracle."""
    checks: Dict[str, dict] = {}
    checks["relators_mod_inner"] = module.verify_out_relators(G, out).to_dict()

    g = realize(out.tree)
    axioms = check_group_axioms(g)
    checks["axioms"] = {"ok": axioms.ok, "exhaustive": axioms.exhaustive, "checked": axioms.checked_triples}
    checks["presentation"] = verify_presentation(out.presentation, g).to_dict()

    table = out_bruteforce(G)
    same = table.order == out.order and isomorphic(g, table.realization())
    checks["bruteforce"] = {"ok": same, "order": table.order}

    failed = [name for name, check in checks.items() if not check["ok"]]
    if failed:
        raise VerificationError(f"Out(E) verification failed: {', '.join(failed)}", {"checks": stringify(checks)})
    return checks


def out_report(kind: str, M: Mat2, verify: bool = False) -> ReportDocument:
    module, G = _build(kind, M)
    out = module.out_structure(G)
    result = {"group": G.to_dict(), **_case_fields(kind, G), **out.to_dict()}
    verification = verify_out(module, G, out) if verify else {}
    return make_report("out", {"kind": kind, "matrix": format_matrix(M)}, result, verification, _group_flags(kind, G))


# ----- homeo -----

def homeo_report(A: Mat2, B: Mat2) -> ReportDocument:
    homeomorphic, P, inverted = gl2z.homeo_witness(A, B)
    result: Dict[str, Any] = {"homeomorphic": homeomorphic}
    if homeomorphic:
        result["conjugator"] = str(P)
        result["target"] = "inverse" if inverted else "matrix"
    return make_report("homeo", {"A": format_matrix(A), "B": format_matrix(B)}, result)


# ----- text rendering -----

def _render(value: Any, indent: int, lines: List[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                _render(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key}: {_scalar(item)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                _render(item, indent + 1, lines)
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(value)}")


def _scalar(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (dict, list)):
        return "none"
    return str(value)


def render_text(doc: ReportDocument) -> str:
    lines = [f"solaut {doc.version} {doc.command}"]
    for section in ("input", "result", "verification", "flags"):
        data = getattr(doc, section)
        if data:
            lines.append(f"{section}:")
            _render(data, 1, lines)
    return "\n".join(lines)

