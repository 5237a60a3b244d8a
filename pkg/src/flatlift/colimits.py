"""Colimits of purely monic diagrams.

Over a componentwise 1-connected crown the colimit is glued one element at a
time along the peel sequence (coproduct, pushout, or reuse of an existing
leg). Over a general poset it is the colimit over the ind-crown, extended to
all elements through the maxima. :func:`brute_force_colimit` is the plain
cokernel presentation used as an independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import modcat as mc
from .crowns import is_crown, peel
from .diagrams import Prediagram, along_order, check
from .errors import (IllDefinedTransition, NoSolution, NotACrown, NotOneConnected, PreconditionViolated,
                     NotPurelyMonic, PurityViolation, ShapeMismatch)
from .modcat import ModMorphism, ModObject


@dataclass
class Cocone:
    diagram: Prediagram
    apex: ModObject
    legs: dict[str, ModMorphism]

    def is_cocone(self) -> bool:
        X = self.diagram
        return all(mc.compose(X.arrow(a, b), self.legs[b]) == self.legs[a]
                   for a, b in X.shape.strict_relations())

    def stacked(self) -> ModMorphism:
        """``<leg_p over ...>``: the sum of all objects into the apex."""
        X = self.diagram
        if not len(X.shape):
            return mc.zero(mc.zero_object(X.ring), self.apex)
        return mc.merge(*[self.legs[p] for p in X.shape])


def _require_monic(X: Prediagram) -> None:
    rep = check(X, "purely_monic")
    if not rep.ok:
        raise NotPurelyMonic(f"arrows not mono: {[f.where for f in rep.failures]}")


def crown_colimit(X: Prediagram, *, check_input: bool = True) -> Cocone:
    C = X.shape
    if not is_crown(C):
        raise NotACrown(repr(C))
    seq = peel(C)
    if seq is None:
        raise NotOneConnected(repr(C))
    if check_input:
        _require_monic(X)
    apex = mc.zero_object(X.ring)
    legs: dict[str, ModMorphism] = {}
    for c, tag in reversed(seq):
        Xc = X.objects[c]
        below = [d for d in legs if C.lt(d, c)]
        above = [d for d in legs if C.lt(c, d)]
        if tag == "ii" and above:
            (d,) = above
            legs[c] = mc.compose(X.arrow(c, d), legs[d])
        elif tag == "i" and below:
            (d,) = below
            po = mc.pushout(legs[d], X.arrow(d, c))
            legs = {e: mc.compose(f, po.in_left) for e, f in legs.items()}
            legs[c] = po.in_right
            apex = po.object
        else:
            parts = [apex, Xc]
            apex = mc.direct_sum(*parts)
            legs = {e: mc.compose(f, mc.injection(parts, 0)) for e, f in legs.items()}
            legs[c] = mc.injection(parts, 1)
    for c, f in legs.items():
        if not mc.is_mono(f):
            raise PurityViolation(f"leg at {c} is not mono")
    return Cocone(X, apex, legs)


def poset_colimit_via_crown(X: Prediagram, *, check_input: bool = True) -> Cocone:
    P = X.shape
    if check_input:
        if not check(X, "strictly_commutative").ok:
            raise PreconditionViolated("input is not strictly commutative")
        _require_monic(X)
    crown = P.ind_crown()
    base = crown_colimit(along_order(X, crown), check_input=False)
    maxima = P.maxima()
    legs: dict[str, ModMorphism] = {}
    for p in P:
        cands = [mc.compose(X.arrow(p, c), base.legs[c]) for c in maxima if P.le(p, c)]
        theta = cands[0]
        if any(t != theta for t in cands[1:]):
            raise IllDefinedTransition(f"transition at {p} depends on the chosen maximum")
        if not mc.is_mono(theta):
            raise PurityViolation(f"transition at {p} is not mono")
        legs[p] = theta
    return Cocone(X, base.apex, legs)


def brute_force_colimit(X: Prediagram) -> Cocone:
    """Cokernel of ``(+) X_a -> (+) X_p`` over the Hasse edges a < b."""
    P = X.shape
    objs = [X.objects[p] for p in P]
    if not objs:
        return Cocone(X, mc.zero_object(X.ring), {})
    total = mc.direct_sum(*objs)
    offs = np.cumsum([0] + [o.rank for o in objs])
    pos = {p: i for i, p in enumerate(P.elements)}
    blocks = []
    for a, b in P.covers():
        Xa = X.objects[a]
        M = np.zeros((Xa.rank, total.rank), dtype=np.int64)
        ia, ib = pos[a], pos[b]
        M[:, offs[ib]:offs[ib + 1]] = X.arrow(a, b).matrix
        M[:, offs[ia]:offs[ia + 1]] -= np.eye(Xa.rank, dtype=np.int64)
        blocks.append(mc.ModMorphism(Xa, total, M, check=False))
    if blocks:
        rel = mc.merge(*blocks)
    else:
        rel = mc.zero(mc.zero_object(X.ring), total)
    ck = mc.cokernel(rel)
    legs = {p: mc.compose(mc.injection(objs, pos[p]), ck.projection) for p in P}
    return Cocone(X, ck.object, legs)


def induced_map(cocone: Cocone, test: Cocone) -> ModMorphism:
    """The unique ``z`` with ``leg_p z = test_p`` for every p."""
    if cocone.diagram.shape.elements != test.diagram.shape.elements:
        raise ShapeMismatch("cocones over different shapes")
    src = cocone.stacked()
    tgt = test.stacked()
    z = mc.solve(src, tgt, "through_source")
    if z is None:
        raise NoSolution("test is not a cocone over this diagram")
    if not mc.is_epi(src):
        raise PurityViolation("colimit legs are not jointly epi")
    return z
