"""Plain-text formats for posets and diagrams.

Poset file::

    a b c d        # element names
    a < b
    a < c

Diagram file::

    ring 3 2
    diagram source          # optional section header
    obj a : 1 2             # Z/3 + Z/9
    obj z :                 # zero object
    map a b : 2x1 : 1 ; 3   # rows separated by ';'
    morphism f              # section of component maps
    hom a : 2x2 : 1 0 ; 0 1

Lines outside any section belong to the diagram ``main``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .diagrams import Prediagram, _Family
from .errors import ParseError, ShapeMismatch
from .modcat import ModMorphism, ModObject, RingParams
from .poset import Poset, from_cover_relations


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


# ---------------------------------------------------------------------------
# posets


def parse_poset(text: str) -> Poset:
    lines = [(i + 1, _strip(l)) for i, l in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l]
    if not lines:
        raise ParseError("empty poset file")
    names = lines[0][1].split()
    rels = []
    for n, line in lines[1:]:
        m = re.fullmatch(r"(\S+)\s*<\s*(\S+)", line)
        if m is None:
            raise ParseError(f"line {n}: expected 'a < b', got {line!r}")
        rels.append((m.group(1), m.group(2)))
    return from_cover_relations(names, rels)


def write_poset(P: Poset) -> str:
    out = [" ".join(P.elements)]
    out += [f"{a} < {b}" for a, b in sorted(P.covers(), key=lambda ab: (P.index(ab[0]), P.index(ab[1])))]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# diagrams


@dataclass
class DiagramSection:
    objects: dict[str, ModObject] = field(default_factory=dict)
    arrows: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)


@dataclass
class DiagramDocument:
    ring: RingParams
    diagrams: dict[str, DiagramSection] = field(default_factory=dict)
    morphisms: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)

    def prediagram(self, shape: Poset, label: str = "main") -> Prediagram:
        sec = self.diagrams.get(label)
        if sec is None:
            raise ParseError(f"no diagram section {label!r}")
        for a in shape:
            if a not in sec.objects:
                raise ParseError(f"diagram {label!r}: no object for {a}")
        for a in sec.objects:
            if a not in shape:
                raise ParseError(f"diagram {label!r}: object {a} is not in the poset")
        arrows = {}
        for a, b in shape.strict_relations():
            M = sec.arrows.get((a, b))
            if M is None:
                raise ParseError(f"diagram {label!r}: missing map {a} {b}")
            arrows[(a, b)] = ModMorphism(sec.objects[a], sec.objects[b], M)
        for key in sec.arrows:
            if key not in arrows:
                raise ParseError(f"diagram {label!r}: map {key} is not a strict relation")
        return Prediagram(shape, sec.objects, arrows, self.ring)

    def components(self, label: str, source: Prediagram, target: Prediagram) -> dict[str, ModMorphism]:
        comps = self.morphisms.get(label)
        if comps is None:
            raise ParseError(f"no morphism section {label!r}")
        out = {}
        for a in source.shape:
            if a not in comps:
                raise ParseError(f"morphism {label!r}: no component at {a}")
            out[a] = ModMorphism(source.objects[a], target.objects[a], comps[a])
        return out


def _parse_matrix(spec: str, body: str, where: str) -> np.ndarray:
    m = re.fullmatch(r"(\d+)\s*x\s*(\d+)", spec.strip())
    if m is None:
        raise ParseError(f"{where}: bad shape {spec!r}")
    r, c = int(m.group(1)), int(m.group(2))
    if r == 0 or c == 0:
        if body.strip():
            raise ParseError(f"{where}: an empty {r}x{c} matrix takes no entries")
        return np.zeros((r, c), dtype=np.int64)
    rows = [row.split() for row in body.split(";")]
    if len(rows) != r or any(len(row) != c for row in rows):
        raise ParseError(f"{where}: matrix does not have shape {r}x{c}")
    try:
        return np.array([[int(x) for x in row] for row in rows], dtype=np.int64).reshape(r, c)
    except ValueError:
        raise ParseError(f"{where}: non-integer entry") from None


def parse_diagram(text: str) -> DiagramDocument:
    ring = None
    doc = None
    current: tuple[str, str] = ("diagram", "main")
    for i, raw in enumerate(text.splitlines()):
        line = _strip(raw)
        if not line:
            continue
        where = f"line {i + 1}"
        head = line.split()[0]
        if head == "ring":
            parts = line.split()
            if len(parts) != 3 or doc is not None:
                raise ParseError(f"{where}: 'ring p k' must come once, first")
            try:
                ring = RingParams(int(parts[1]), int(parts[2]))
            except ValueError:
                raise ParseError(f"{where}: bad ring") from None
            doc = DiagramDocument(ring)
            continue
        if doc is None:
            raise ParseError(f"{where}: file must start with 'ring p k'")
        if head in ("diagram", "morphism"):
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{where}: expected '{head} <label>'")
            current = (head, parts[1])
            if head == "diagram":
                doc.diagrams.setdefault(parts[1], DiagramSection())
            else:
                doc.morphisms.setdefault(parts[1], {})
            continue
        fields = [f.strip() for f in line.split(":")]
        if head == "obj":
            if current[0] != "diagram" or len(fields) != 2:
                raise ParseError(f"{where}: bad obj line")
            name = fields[0].split()[1:]
            if len(name) != 1:
                raise ParseError(f"{where}: obj needs one name")
            try:
                exps = [int(x) for x in fields[1].split()]
            except ValueError:
                raise ParseError(f"{where}: bad exponent") from None
            sec = doc.diagrams.setdefault(current[1], DiagramSection())
            sec.objects[name[0]] = ModObject(ring, exps)
        elif head == "map":
            if current[0] != "diagram" or len(fields) != 3:
                raise ParseError(f"{where}: bad map line")
            ends = fields[0].split()[1:]
            if len(ends) != 2:
                raise ParseError(f"{where}: map needs two element names")
            sec = doc.diagrams.setdefault(current[1], DiagramSection())
            sec.arrows[(ends[0], ends[1])] = _parse_matrix(fields[1], fields[2], where)
        elif head == "hom":
            if current[0] != "morphism" or len(fields) != 3:
                raise ParseError(f"{where}: hom lines belong to a morphism section")
            name = fields[0].split()[1:]
            if len(name) != 1:
                raise ParseError(f"{where}: hom needs one element name")
            doc.morphisms[current[1]][name[0]] = _parse_matrix(fields[1], fields[2], where)
        else:
            raise ParseError(f"{where}: unknown directive {head!r}")
    if doc is None:
        raise ParseError("empty diagram file")
    return doc


def _matrix_text(M: np.ndarray) -> str:
    r, c = M.shape
    body = " ; ".join(" ".join(str(int(x)) for x in row) for row in M)
    return f"{r}x{c} : {body}".rstrip()


def write_diagram_section(X: Prediagram, label: str | None = None) -> list[str]:
    out = [f"diagram {label}"] if label else []
    for a in X.shape:
        exps = " ".join(str(e) for e in X.objects[a].exponents)
        out.append(f"obj {a} : {exps}".rstrip())
    for a, b in X.shape.strict_relations():
        out.append(f"map {a} {b} : {_matrix_text(X.arrow(a, b).matrix)}")
    return out


def write_morphism_section(components: dict[str, ModMorphism], order, label: str) -> list[str]:
    out = [f"morphism {label}"]
    for a in order:
        out.append(f"hom {a} : {_matrix_text(components[a].matrix)}")
    return out


def write_diagram(X: Prediagram, label: str | None = None) -> str:
    return "\n".join([f"ring {X.ring.p} {X.ring.k}"] + write_diagram_section(X, label)) + "\n"


def write_document(ring: RingParams, diagrams: dict[str, Prediagram],
                   families: dict[str, _Family] | None = None) -> str:
    out = [f"ring {ring.p} {ring.k}"]
    for label, X in diagrams.items():
        out += write_diagram_section(X, label)
    for label, F in (families or {}).items():
        out += write_morphism_section(F.components, F.source.shape.elements, label)
    return "\n".join(out) + "\n"


def write_morphism_file(X: Prediagram, Y: Prediagram, fhat: dict[str, ModMorphism]) -> str:
    if X.ring != Y.ring:
        raise ShapeMismatch("source and target rings differ")
    out = [f"ring {X.ring.p} {X.ring.k}"]
    out += write_diagram_section(X, "source")
    out += write_diagram_section(Y, "target")
    out += write_morphism_section(fhat, X.shape.elements, "f")
    return "\n".join(out) + "\n"


__all__ = [
    "parse_poset", "write_poset", "parse_diagram", "write_diagram", "write_document",
    "write_morphism_file", "DiagramDocument", "DiagramSection",
]
