"""Prediagrams over finite posets with values in Z/p^k-mod, and their morphisms."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import modcat as mc
from .errors import IllFormed, IllTyped, RingMismatch, ShapeMismatch, UnknownName
from .modcat import ModMorphism, ModObject, RingParams
from .poset import Poset

LEVELS = ("typed", "stably_commutative", "strictly_commutative", "purely_monic")


class Prediagram:
    """Objects at every element and one arrow for every strict relation.

    Arrows on non-cover relations carry independent data; nothing is
    assumed to commute.
    """

    def __init__(self, shape: Poset, objects: Mapping[str, ModObject],
                 arrows: Mapping[tuple[str, str], ModMorphism], ring: RingParams | None = None):
        self.shape = shape
        # keep shape order; stray names (caught by check) go last
        self.objects = {a: objects[a] for a in shape.elements if a in objects}
        self.objects.update({a: o for a, o in objects.items() if a not in self.objects})
        self.arrows = dict(arrows)
        if ring is None:
            if not self.objects:
                raise ShapeMismatch("an empty prediagram needs an explicit ring")
            ring = next(iter(self.objects.values())).ring
        self.ring = ring

    def __getitem__(self, a: str) -> ModObject:
        return self.objects[a]

    def arrow(self, a: str, b: str) -> ModMorphism:
        if a == b:
            return mc.identity(self.objects[a])
        try:
            return self.arrows[(a, b)]
        except KeyError:
            raise UnknownName(f"no arrow {a} -> {b}") from None

    def replace(self, objects: Mapping[str, ModObject] | None = None,
                arrows: Mapping[tuple[str, str], ModMorphism] | None = None) -> Prediagram:
        """Copy with some objects/arrows overwritten."""
        obj = dict(self.objects)
        arr = dict(self.arrows)
        obj.update(objects or {})
        arr.update(arrows or {})
        return Prediagram(self.shape, obj, arr, self.ring)

    def __eq__(self, other):
        return (isinstance(other, Prediagram) and self.shape == other.shape
                and self.objects == other.objects and self.arrows == other.arrows)

    def __repr__(self):
        return f"Prediagram({list(self.shape.elements)}, {self.objects})"

    def size(self) -> int:
        """Total log_p order of all objects."""
        return sum(o.log_order for o in self.objects.values())


def from_covers(shape: Poset, objects: Mapping[str, ModObject],
                covers: Mapping[tuple[str, str], ModMorphism], ring: RingParams | None = None) -> Prediagram:
    """Strict diagram generated by arrows on the Hasse edges (composed along
    the first path found in input order); the caller ensures commutativity."""
    arrows: dict[tuple[str, str], ModMorphism] = {}
    cover_set = dict(covers)
    for a, b in shape.covers():
        if (a, b) not in cover_set:
            raise ShapeMismatch(f"missing cover arrow {a} -> {b}")
    pos = {e: i for i, e in enumerate(shape.elements)}
    # process pairs by increasing length of the interval
    rel = sorted(shape.strict_relations(),
                 key=lambda ab: sum(1 for x in shape if shape.le(ab[0], x) and shape.le(x, ab[1])))
    for a, b in rel:
        if (a, b) in cover_set:
            arrows[(a, b)] = cover_set[(a, b)]
            continue
        mids = [x for x in shape if x not in (a, b) and shape.lt(a, x) and shape.lt(x, b)]
        mids.sort(key=pos.get)
        m = mids[0]
        arrows[(a, b)] = mc.compose(arrows[(a, m)], arrows[(m, b)])
    return Prediagram(shape, objects, arrows, ring)


@dataclass
class Failure:
    kind: str
    where: tuple[str, ...]
    defect: ModMorphism | None = None
    message: str = ""


@dataclass
class CheckReport:
    level: str
    ok: bool
    failures: list[Failure] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _typed_failures(X: Prediagram) -> list[Failure]:
    out = []
    P = X.shape
    for a in P:
        if a not in X.objects:
            out.append(Failure("missing_object", (a,)))
        elif X.objects[a].ring != X.ring:
            out.append(Failure("ring", (a,)))
    rel = set(P.strict_relations())
    for key in X.arrows:
        if key not in rel:
            out.append(Failure("extra_arrow", key))
    for a, b in P.strict_relations():
        f = X.arrows.get((a, b))
        if f is None:
            out.append(Failure("missing_arrow", (a, b)))
            continue
        if f.source != X.objects.get(a) or f.target != X.objects.get(b):
            out.append(Failure("arrow_type", (a, b), f))
            continue
        try:
            mc.validate(f)
        except IllTyped as exc:
            out.append(Failure("divisibility", (a, b), f, str(exc)))
    return out


def triples(P: Poset) -> Iterable[tuple[str, str, str]]:
    L = P.leq
    E = P.elements
    n = len(E)
    for i in range(n):
        for j in range(n):
            if i == j or not L[i, j]:
                continue
            for k in range(n):
                if k != j and L[j, k]:
                    yield E[i], E[j], E[k]


def commutativity_defect(X: Prediagram, a: str, b: str, c: str) -> ModMorphism:
    return mc.compose(X.arrow(a, b), X.arrow(b, c)) - X.arrow(a, c)


def check(X: Prediagram, level: str) -> CheckReport:
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}")
    failures = _typed_failures(X)
    if failures or level == "typed":
        return CheckReport(level, not failures, failures)
    if level in ("stably_commutative", "strictly_commutative"):
        strict = level == "strictly_commutative"
        for a, b, c in triples(X.shape):
            d = commutativity_defect(X, a, b, c)
            bad = not d.is_zero() if strict else mc.is_stably_zero(d) is None
            if bad:
                failures.append(Failure("defect", (a, b, c), d))
    else:
        for (a, b), f in X.arrows.items():
            if not mc.is_mono(f):
                failures.append(Failure("not_mono", (a, b), f))
    return CheckReport(level, not failures, failures)


def is_diagram(X: Prediagram) -> bool:
    return check(X, "strictly_commutative").ok


def is_purely_monic(X: Prediagram) -> bool:
    return check(X, "purely_monic").ok


def restrict(X: Prediagram, subset: Iterable[str]) -> Prediagram:
    S = X.shape.full_subposet(subset)
    objects = {a: X.objects[a] for a in S}
    arrows = {(a, b): X.arrows[(a, b)] for a, b in S.strict_relations()}
    return Prediagram(S, objects, arrows, X.ring)


def along_order(X: Prediagram, order: Poset) -> Prediagram:
    """Same objects, indexed by a (possibly coarser) order contained in the shape's."""
    objects = {a: X.objects[a] for a in order}
    arrows = {(a, b): X.arrow(a, b) for a, b in order.strict_relations()}
    return Prediagram(order, objects, arrows, X.ring)


def dual_prediagram(X: Prediagram) -> Prediagram:
    """Transpose every arrow under module duality; the shape is reversed."""
    arrows = {(b, a): mc.dual(f) for (a, b), f in X.arrows.items()}
    return Prediagram(X.shape.opposite(), X.objects, arrows, X.ring)


# ---------------------------------------------------------------------------
# morphisms and families


@dataclass
class _Family:
    source: Prediagram
    target: Prediagram
    components: dict[str, ModMorphism]

    def __post_init__(self):
        if self.source.shape.elements != self.target.shape.elements or \
                not (self.source.shape.leq == self.target.shape.leq).all():
            raise ShapeMismatch("families need source and target over the same shape")
        if self.source.ring != self.target.ring:
            raise RingMismatch("families need a common ring")
        for a in self.source.shape:
            f = self.components.get(a)
            if f is None:
                raise ShapeMismatch(f"no component at {a}")
            if f.source != self.source.objects[a] or f.target != self.target.objects[a]:
                raise ShapeMismatch(f"component at {a} has the wrong type")

    def naturality_defect(self, a: str, b: str) -> ModMorphism:
        """``f_a xi'_{a,b} - xi_{a,b} f_b`` (source arrows primed)."""
        return (mc.compose(self.components[a], self.target.arrow(a, b))
                - mc.compose(self.source.arrow(a, b), self.components[b]))

    def is_strictly_natural(self) -> bool:
        return all(self.naturality_defect(a, b).is_zero() for a, b in self.source.shape.strict_relations())


class DiagramMorphism(_Family):
    """Strictly natural family of component morphisms."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_strictly_natural():
            raise IllFormed("components are not strictly natural")


class StableIsoFamily(_Family):
    """Pointwise stable isomorphisms, natural up to stably zero maps."""


def identity_family(X: Prediagram) -> StableIsoFamily:
    return StableIsoFamily(X, X, {a: mc.identity(X.objects[a]) for a in X.shape})


def compose_families(F: _Family, G: _Family) -> StableIsoFamily:
    """Pointwise composite ``F`` then ``G``."""
    if F.target != G.source:
        raise ShapeMismatch("families are not composable")
    return StableIsoFamily(F.source, G.target,
                           {a: mc.compose(F.components[a], G.components[a]) for a in F.source.shape})


def as_family(f: _Family) -> StableIsoFamily:
    return StableIsoFamily(f.source, f.target, dict(f.components))


def as_morphism(f: _Family) -> DiagramMorphism:
    return DiagramMorphism(f.source, f.target, dict(f.components))


@dataclass
class FamilyReport:
    ok: bool
    non_iso: list[str] = field(default_factory=list)
    non_natural: list[Failure] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def stable_iso_report(F: _Family, *, witnesses: bool = False) -> FamilyReport:
    """Pointwise stable iso (cone test, or explicit witnesses) plus stable naturality."""
    test = (lambda f: mc.stable_iso_witness(f) is not None) if witnesses else mc.is_stable_iso
    non_iso = [a for a in F.source.shape if not test(F.components[a])]
    non_nat = []
    for a, b in F.source.shape.strict_relations():
        d = F.naturality_defect(a, b)
        if mc.is_stably_zero(d) is None:
            non_nat.append(Failure("not_stably_natural", (a, b), d))
    return FamilyReport(not non_iso and not non_nat, non_iso, non_nat)


def verify_stable_iso(F: _Family, *, witnesses: bool = False) -> bool:
    return stable_iso_report(F, witnesses=witnesses).ok


def verify_homotopism(f: _Family, *, witnesses: bool = False) -> bool:
    if not f.is_strictly_natural():
        raise IllFormed("not strictly natural")
    test = (lambda g: mc.stable_iso_witness(g) is not None) if witnesses else mc.is_stable_iso
    return all(test(f.components[a]) for a in f.source.shape)


def restrict_family(F: _Family, subset: Iterable[str]) -> StableIsoFamily:
    S = list(subset)
    X, Y = restrict(F.source, S), restrict(F.target, S)
    return StableIsoFamily(X, Y, {a: F.components[a] for a in X.shape})
