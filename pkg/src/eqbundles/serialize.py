"""Document serialization: bundles, structures, certificates, reports.

Documents are canonical JSON (sorted keys, two-space indent) whose
scalar leaves use the canonical text forms of the exact arithmetic
layer ("3/4", "z^-2", "(1+z4)·z^3" where z4 denotes the primitive
4th root of unity).  Conductors are always declared explicitly; there
is no implicit field extension.  parse(render(x)) returns x on every
canonical document.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .bundle import VectorBundle, line_bundle, make_bundle
from .classify import DecompositionCertificate
from .equivariant import EquivariantStructure
from .errors import EqBundlesError, ParseError, ValidationError
from .group import Character, GroupSpec, cyclic, klein
from .laurent import LaurentMatrix, parse_laurent, render_laurent


@dataclass(frozen=True)
class Report:
    """Deterministic command output; the only write-only document kind."""
    command: str
    lines: tuple
    exit_code: int


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _matrix_to_doc(M: LaurentMatrix):
    return [[render_laurent(p) for p in row] for row in M.entries]


def _matrix_from_doc(doc, conductor: int) -> LaurentMatrix:
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        raise ValidationError("matrix must be a non-empty list of rows")
    return LaurentMatrix(conductor,
                         [[parse_laurent(s, conductor) for s in row]
                          for row in doc])


def _group_to_doc(G: GroupSpec, lift: bool = False):
    if G.kind == "cyclic":
        return {"kind": "cyclic", "n": G.n}
    return {"kind": "klein_lift" if lift else "klein"}


def _group_from_doc(doc):
    """(GroupSpec, lift flag)."""
    kind = doc.get("kind")
    if kind == "cyclic":
        n = doc.get("n")
        if not isinstance(n, int) or n < 1:
            raise ValidationError(f"bad cyclic order {n!r}")
        return cyclic(n), False
    if kind == "klein":
        return klein(), False
    if kind == "klein_lift":
        return klein(), True
    raise ValidationError(f"unknown group kind {kind!r}")


def _character_to_doc(chi: Character):
    if chi.group.kind == "cyclic":
        return {"index": chi.index}
    return {"a1": chi.signs[0], "a2": chi.signs[1]}


def _character_from_doc(doc, G: GroupSpec) -> Character:
    if G.kind == "cyclic":
        k = doc.get("index")
        if not isinstance(k, int):
            raise ValidationError(f"bad character index {k!r}")
        return Character(G, index=k % G.n)
    s1, s2 = doc.get("a1"), doc.get("a2")
    if s1 not in (1, -1) or s2 not in (1, -1):
        raise ValidationError(f"bad Klein character signs {doc!r}")
    return Character(G, signs=(s1, s2))


# -- bundle ------------------------------------------------------------------

def bundle_to_doc(E: VectorBundle):
    return {"kind": "bundle",
            "conductor": E.conductor,
            "rank": E.rank,
            "transition": _matrix_to_doc(E.transition)}


def bundle_from_doc(doc) -> VectorBundle:
    conductor = doc.get("conductor")
    if not isinstance(conductor, int) or conductor < 1:
        raise ValidationError(f"bad conductor {conductor!r}")
    T = _matrix_from_doc(doc.get("transition"), conductor)
    try:
        E = make_bundle(T)
    except EqBundlesError as err:
        raise ValidationError(f"invalid transition matrix: {err}") from err
    if "rank" in doc and doc["rank"] != E.rank:
        raise ValidationError(f"declared rank {doc['rank']} != matrix size {E.rank}")
    return E


# -- structure ----------------------------------------------------------------

def structure_to_doc(S: EquivariantStructure):
    return {"kind": "structure",
            "group": _group_to_doc(S.group, S.lift),
            "bundle": bundle_to_doc(S.bundle),
            "maps": {name: _matrix_to_doc(M) for name, M in sorted(S.maps.items())}}


def structure_from_doc(doc) -> EquivariantStructure:
    G, lift = _group_from_doc(doc.get("group", {}))
    E = bundle_from_doc(doc.get("bundle", {}))
    maps_doc = doc.get("maps")
    if not isinstance(maps_doc, dict):
        raise ValidationError("structure needs a maps table")
    maps = {name: _matrix_from_doc(m, E.conductor)
            for name, m in maps_doc.items()}
    try:
        return EquivariantStructure(E, G, maps, lift=lift)
    except EqBundlesError as err:
        raise ValidationError(f"invalid structure: {err}") from err


# -- certificate --------------------------------------------------------------

def certificate_to_doc(cert: DecompositionCertificate):
    return {"kind": "certificate",
            "group": _group_to_doc(cert.group),
            "conductor": cert.conductor,
            "even_blocks": [{"degree": d, "character": _character_to_doc(chi)}
                            for d, chi in cert.even_blocks],
            "odd_blocks": list(cert.odd_blocks),
            "change_of_frame": _matrix_to_doc(cert.change_of_frame)}


def certificate_from_doc(doc) -> DecompositionCertificate:
    G, lift = _group_from_doc(doc.get("group", {}))
    if lift:
        raise ValidationError("certificates describe genuine structures")
    conductor = doc.get("conductor")
    if not isinstance(conductor, int) or conductor < 1:
        raise ValidationError(f"bad conductor {conductor!r}")
    even = []
    for item in doc.get("even_blocks", []):
        d = item.get("degree")
        if not isinstance(d, int):
            raise ValidationError(f"bad block degree {d!r}")
        even.append((d, _character_from_doc(item.get("character", {}), G)))
    odd = doc.get("odd_blocks", [])
    if not all(isinstance(d, int) for d in odd):
        raise ValidationError("odd block degrees must be integers")
    frame = _matrix_from_doc(doc.get("change_of_frame"), conductor)
    try:
        return DecompositionCertificate(group=G, even_blocks=tuple(even),
                                        odd_blocks=tuple(odd),
                                        change_of_frame=frame,
                                        conductor=conductor)
    except ValueError as err:
        raise ValidationError(f"inconsistent certificate: {err}") from err


# -- report --------------------------------------------------------------------

def report_to_doc(rep: Report):
    return {"kind": "report",
            "command": rep.command,
            "lines": list(rep.lines),
            "exit": rep.exit_code}


def report_from_doc(doc) -> Report:
    return Report(command=doc.get("command", ""),
                  lines=tuple(doc.get("lines", [])),
                  exit_code=doc.get("exit", 0))


# -- document front door --------------------------------------------------------

_RENDERERS = {
    VectorBundle: bundle_to_doc,
    EquivariantStructure: structure_to_doc,
    DecompositionCertificate: certificate_to_doc,
    Report: report_to_doc,
}

_PARSERS = {
    "bundle": bundle_from_doc,
    "structure": structure_from_doc,
    "certificate": certificate_from_doc,
    "report": report_from_doc,
}


def render_document(obj) -> str:
    for cls, fn in _RENDERERS.items():
        if isinstance(obj, cls):
            return _dump(fn(obj))
    raise TypeError(f"no document form for {type(obj).__name__}")


def parse_document(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, line=err.lineno, column=err.colno) from None
    if not isinstance(doc, dict):
        raise ValidationError("document must be a JSON object")
    kind = doc.get("kind")
    parser = _PARSERS.get(kind)
    if parser is None:
        raise ValidationError(f"unknown document kind {kind!r}")
    return parser(doc)


# -- CLI shortcuts ----------------------------------------------------------------

def parse_bundle_shortcut(text: str, conductor: int) -> VectorBundle:
    """Expand O(d), O(d)+O(e)+..., or tangent into a bundle."""
    text = text.strip()
    if text == "tangent":
        return line_bundle(conductor, 2)
    degrees = []
    for part in text.split("+"):
        part = part.strip()
        if not (part.startswith("O(") and part.endswith(")")):
            raise ParseError(f"bad bundle shortcut {part!r}")
        try:
            degrees.append(int(part[2:-1]))
        except ValueError:
            raise ParseError(f"bad degree in {part!r}") from None
    if not degrees:
        raise ParseError(f"empty bundle shortcut {text!r}")
    from .bundle import model_bundle
    return model_bundle(conductor, degrees)


def parse_group_shortcut(text: str) -> GroupSpec:
    """cyclic:N or klein."""
    text = text.strip().lower()
    if text == "klein":
        return klein()
    if text.startswith("cyclic:"):
        try:
            return cyclic(int(text.split(":", 1)[1]))
        except ValueError:
            raise ParseError(f"bad cyclic order in {text!r}") from None
    raise ParseError(f"bad group {text!r}; expected cyclic:N or klein")


def parse_character_shortcut(text: str, G: GroupSpec) -> Character:
    """Cyclic: the index k; Klein: two signs like '+-'."""
    text = text.strip()
    if G.kind == "cyclic":
        try:
            return Character(G, index=int(text) % G.n)
        except ValueError:
            raise ParseError(f"bad character index {text!r}") from None
    if len(text) == 2 and set(text) <= {"+", "-"}:
        signs = tuple(1 if c == "+" else -1 for c in text)
        return Character(G, signs=signs)
    raise ParseError(f"bad Klein character {text!r}; expected e.g. '+-'")
