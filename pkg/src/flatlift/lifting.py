"""Strictification of prediagrams and lifting of stable morphisms.

Everything here works by replacements: an object X_a is enlarged to
``X_a + N`` with N free, and the arrows touching a are extended. The
projection back to X_a is a stable isomorphism, and a homotopism when a is
maximal. The entry points are :func:`lift_diagram` (every stably commutative
prediagram over an ind-flat shape is stably isomorphic to a purely monic
diagram) and :func:`lift_morphism` (over a quasitree, stable morphisms lift
after a homotopism).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from . import modcat as mc
from .colimits import poset_colimit_via_crown
from .crowns import peel
from .diagrams import (DiagramMorphism, Prediagram, StableIsoFamily, as_morphism, check,
                       compose_families, dual_prediagram, identity_family, restrict,
                       stable_iso_report, verify_homotopism)
from .errors import (FactorizationFailed, InternalInconsistency, NotIndFlat, NotPurelyMonic,
                     NotQuasitree, NotStablyCommutative, NotStablyNatural, PreconditionViolated,
                     ShapeMismatch)
from .flatness import is_ind_flat, quasitree_check
from .modcat import ModMorphism, ModObject


@dataclass
class TraceStep:
    element: str
    step: str
    added_rank: int = 0


# ---------------------------------------------------------------------------
# replacements


def replace_at(X: Prediagram, a: str, eta: Mapping[str, ModMorphism] | None,
               zeta: Mapping[str, ModMorphism] | None, N: ModObject) -> tuple[Prediagram, StableIsoFamily]:
    """Replace X_a by ``X_a + N``.

    Arrows out of a become ``<xi_{a,c} over eta_c>``, arrows into a become
    ``(xi_{b,a} | zeta_b)``; missing ``eta``/``zeta`` entries are zero.
    The returned family projects ``X_a + N`` onto X_a.
    """
    mc.require_free(N)
    P = X.shape
    eta = dict(eta or {})
    zeta = dict(zeta or {})
    up, down = P.strict_above(a), P.strict_below(a)
    for c in eta:
        if c not in up:
            raise ShapeMismatch(f"eta given at {c}, which is not above {a}")
    for b in zeta:
        if b not in down:
            raise ShapeMismatch(f"zeta given at {b}, which is not below {a}")
    Xa = X.objects[a]
    parts = [Xa, N]
    new_obj = mc.direct_sum(Xa, N)
    arrows = {}
    for c in up:
        e = eta.get(c, mc.zero(N, X.objects[c]))
        if e.source != N or e.target != X.objects[c]:
            raise ShapeMismatch(f"eta at {c} has the wrong type")
        arrows[(a, c)] = mc.merge(X.arrow(a, c), e)
    for b in down:
        z = zeta.get(b, mc.zero(X.objects[b], N))
        if z.source != X.objects[b] or z.target != N:
            raise ShapeMismatch(f"zeta at {b} has the wrong type")
        arrows[(b, a)] = mc.fork(X.arrow(b, a), z)
    Xn = X.replace({a: new_obj}, arrows)
    comps = {b: mc.identity(X.objects[b]) for b in P}
    comps[a] = mc.projection(parts, 0)
    return Xn, StableIsoFamily(Xn, X, comps)


def _colimit_below(X: Prediagram, c: str):
    """Colimit cocone of X over the strict down-cone of c and its embedding iota."""
    sub = restrict(X, X.shape.strict_below(c))
    cone = poset_colimit_via_crown(sub, check_input=False)
    iota = mc.canonical_embedding(cone.apex)
    return cone, iota


def purify_at_max(X: Prediagram, c: str, *, check_input: bool = True) -> tuple[Prediagram, DiagramMorphism]:
    P = X.shape
    if c not in P.maxima():
        raise PreconditionViolated(f"{c} is not maximal")
    if check_input:
        rest = restrict(X, [e for e in P if e != c])
        if not check(rest, "purely_monic").ok:
            raise NotPurelyMonic(f"restriction away from {c} is not purely monic")
        if not check(X, "strictly_commutative").ok:
            raise PreconditionViolated("input is not strictly commutative")
        if peel(P.strict_down(c).ind_crown()) is None:
            raise PreconditionViolated(f"ind-crown below {c} is not 1-connected")
    cone, iota = _colimit_below(X, c)
    zeta = {b: mc.compose(cone.legs[b], iota) for b in cone.legs}
    Xn, fam = replace_at(X, c, None, zeta, iota.target)
    return Xn, as_morphism(fam)


def _arrows_into_mono(X: Prediagram, c: str) -> bool:
    return all(mc.is_mono(X.arrow(b, c)) for b in X.shape.strict_below(c))


def purify(X: Prediagram, *, check_input: bool = True, skip_monic: bool = True,
           trace: list[TraceStep] | None = None) -> tuple[Prediagram, DiagramMorphism]:
    """Homotopic purely monic replacement of a strict diagram over an ind-flat shape.

    With ``skip_monic`` an element whose incoming arrows are already mono
    (after the recursive step) is left alone instead of receiving a free
    summand.
    """
    P = X.shape
    if check_input:
        if not is_ind_flat(P):
            raise NotIndFlat(repr(P))
        if not check(X, "strictly_commutative").ok:
            raise PreconditionViolated("input is not strictly commutative")
    if not len(P):
        return X, as_morphism(identity_family(X))
    c = P.maxima()[0]
    rest = [e for e in P if e != c]
    Y, g = purify(restrict(X, rest), check_input=False, skip_monic=skip_monic, trace=trace)
    objects = dict(Y.objects)
    objects[c] = X.objects[c]
    arrows = dict(Y.arrows)
    for b in P.strict_below(c):
        arrows[(b, c)] = mc.compose(g.components[b], X.arrow(b, c))
    X2 = Prediagram(P, objects, arrows, X.ring)
    comps = dict(g.components)
    comps[c] = mc.identity(X.objects[c])
    f = DiagramMorphism(X2, X, comps)
    if skip_monic and _arrows_into_mono(X2, c):
        return X2, f
    X3, h = purify_at_max(X2, c, check_input=False)
    if trace is not None:
        trace.append(TraceStep(c, "purify_at_max", X3.objects[c].rank - X2.objects[c].rank))
    return X3, as_morphism(compose_families(h, f))


def add_commutativity(X: Prediagram, c: str, d: str, e: str, *, check_input: bool = True,
                      skip_zero: bool = True) -> tuple[Prediagram, StableIsoFamily]:
    """Replacement at d that makes ``xi_{e,c} = xi_{e,d} xi_{d,c}`` hold exactly."""
    P = X.shape
    if check_input:
        if c not in P.maxima():
            raise PreconditionViolated(f"{c} is not maximal")
        if d not in P.strict_down(c).maxima():
            raise PreconditionViolated(f"{d} is not maximal below {c}")
        if not P.lt(e, d):
            raise PreconditionViolated(f"{e} is not below {d}")
        if peel(P.strict_down(d).ind_crown()) is None:
            raise PreconditionViolated(f"ind-crown below {d} is not 1-connected")
        if not check(restrict(X, [x for x in P if x != c]), "strictly_commutative").ok:
            raise PreconditionViolated("restriction away from the top is not strict")
        if not check(restrict(X, P.strict_below(c)), "purely_monic").ok:
            raise NotPurelyMonic(f"restriction below {c} is not purely monic")
    defect = X.arrow(e, c) - mc.compose(X.arrow(e, d), X.arrow(d, c))
    if skip_zero and defect.is_zero():
        return X, identity_family(X)
    cone, iota = _colimit_below(X, d)
    theta = mc.solve(mc.compose(cone.legs[e], iota), defect, "through_source")
    if theta is None:
        raise FactorizationFailed(f"defect at ({e},{d},{c}) is not stably zero")
    zeta = {b: mc.compose(cone.legs[b], iota) for b in cone.legs}
    Xn, fam = replace_at(X, d, {c: theta}, zeta, iota.target)
    if mc.compose(Xn.arrow(e, d), Xn.arrow(d, c)) != Xn.arrow(e, c):
        raise InternalInconsistency("commutativity was not achieved")
    return Xn, fam


# ---------------------------------------------------------------------------
# density


@dataclass
class LiftResult:
    lifted: Prediagram
    iso: StableIsoFamily
    trace: list[TraceStep] = field(default_factory=list)


def _lift(X: Prediagram, trace: list[TraceStep]) -> tuple[Prediagram, StableIsoFamily]:
    P = X.shape
    if not len(P):
        return X, identity_family(X)
    c = P.maxima()[0]
    rest = [e for e in P if e != c]
    Y, g = _lift(restrict(X, rest), trace)

    # re-attach X_c along representatives of g
    objects = dict(Y.objects)
    objects[c] = X.objects[c]
    arrows = dict(Y.arrows)
    for d in P.strict_below(c):
        arrows[(d, c)] = mc.compose(g.components[d], X.arrow(d, c))
    Xc = Prediagram(P, objects, arrows, X.ring)
    comps = dict(g.components)
    comps[c] = mc.identity(X.objects[c])
    fam = StableIsoFamily(Xc, X, comps)
    if not check(Xc, "stably_commutative").ok:
        raise InternalInconsistency("re-attachment broke stable commutativity")

    # commutant induction over the ind-crown below c
    crown = P.strict_down(c).ind_crown()
    seq = peel(crown)
    if seq is None:
        raise NotIndFlat(f"ind-crown below {c} is not 1-connected")
    done: list[str] = []
    for u, tag in reversed(seq):
        below = [v for v in done if crown.lt(v, u)]
        above = [v for v in done if crown.lt(u, v)]
        if tag == "i" and below:
            (v,) = below
            Xn, step = add_commutativity(Xc, c, u, v, check_input=False)
            if Xn is not Xc:
                trace.append(TraceStep(u, "add_commutativity", Xn.objects[u].rank - Xc.objects[u].rank))
                fam = compose_families(step, fam)
                Xc = Xn
        elif tag == "ii" and above:
            (v,) = above
            new = mc.compose(Xc.arrow(u, v), Xc.arrow(v, c))
            if new != Xc.arrow(u, c):
                Xn = Xc.replace(arrows={(u, c): new})
                fam = compose_families(StableIsoFamily(Xn, Xc, {a: mc.identity(Xc.objects[a]) for a in P}), fam)
                Xc = Xn
                trace.append(TraceStep(u, "reroute"))
        done.append(u)

    # collapse: every arrow into c goes through a maximum below c
    tops = P.strict_down(c).maxima()
    collapsed = {}
    for b in P.strict_below(c):
        cands = [mc.compose(Xc.arrow(b, t), Xc.arrow(t, c)) for t in tops if P.le(b, t)]
        if any(x != cands[0] for x in cands[1:]):
            raise InternalInconsistency(f"collapse at {b} depends on the chosen maximum")
        collapsed[(b, c)] = cands[0]
    X2 = Xc.replace(arrows=collapsed)
    fam = compose_families(StableIsoFamily(X2, Xc, {a: mc.identity(Xc.objects[a]) for a in P}), fam)

    X3, h = purify(X2, check_input=False, trace=trace)
    return X3, compose_families(h, fam)


def lift_diagram(X: Prediagram, *, verify: bool = True) -> LiftResult:
    """Purely monic diagram stably isomorphic to the prediagram X."""
    if not is_ind_flat(X.shape):
        raise NotIndFlat(repr(X.shape))
    rep = check(X, "stably_commutative")
    if not rep.ok:
        raise NotStablyCommutative(f"defects at {[f.where for f in rep.failures]}")
    trace: list[TraceStep] = []
    lifted, iso = _lift(X, trace)
    res = LiftResult(lifted, iso, trace)
    if verify:
        verify_lift(res)
    return res


def verify_lift(res: LiftResult, *, epi: bool = False) -> None:
    level = "purely_monic"
    Y = dual_prediagram(res.lifted) if epi else res.lifted
    if not check(Y, level).ok:
        raise InternalInconsistency("lift is not purely " + ("epic" if epi else "monic"))
    if not check(res.lifted, "strictly_commutative").ok:
        raise InternalInconsistency("lift is not strictly commutative")
    if not stable_iso_report(res.iso).ok:
        raise InternalInconsistency("lift family is not a stable isomorphism")


def lift_diagram_epi(X: Prediagram, *, verify: bool = True) -> LiftResult:
    """Purely epic lift over a pro-flat shape, by duality.

    The returned family points from the input to the lift, the transpose of
    the monic case.
    """
    res = lift_diagram(dual_prediagram(X), verify=verify)
    lifted = dual_prediagram(res.lifted)
    comps = {a: mc.dual(f) for a, f in res.iso.components.items()}
    out = LiftResult(lifted, StableIsoFamily(X, lifted, comps), res.trace)
    if verify:
        if not all(mc.is_epi(f) for f in lifted.arrows.values()):
            raise InternalInconsistency("dual lift is not purely epic")
        verify_lift(out, epi=True)
    return out


# ---------------------------------------------------------------------------
# morphisms


def _stable_naturality_failures(X: Prediagram, Y: Prediagram, fhat: Mapping[str, ModMorphism]):
    out = []
    for a, b in X.shape.strict_relations():
        d = mc.compose(fhat[a], Y.arrow(a, b)) - mc.compose(X.arrow(a, b), fhat[b])
        if mc.is_stably_zero(d) is None:
            out.append((a, b))
    return out


def _check_pair(X: Prediagram, Y: Prediagram, fhat: Mapping[str, ModMorphism]) -> None:
    if X.shape != Y.shape:
        raise ShapeMismatch("X and Y live over different shapes")
    for a in X.shape:
        f = fhat.get(a)
        if f is None or f.source != X.objects[a] or f.target != Y.objects[a]:
            raise ShapeMismatch(f"representative at {a} is missing or mistyped")
    bad = _stable_naturality_failures(X, Y, fhat)
    if bad:
        raise NotStablyNatural(f"squares {bad}")


def strict_lift_of_stable_morphism(X: Prediagram, Y: Prediagram,
                                   fhat: Mapping[str, ModMorphism]) -> DiagramMorphism | None:
    """Strictly natural ``g`` with ``g_a - fhat_a`` stably zero for all a, or None."""
    _check_pair(X, Y, fhat)
    P = X.shape
    sys = mc.HomSystem(X.ring)
    iotas = {a: mc.canonical_embedding(X.objects[a]) for a in P}
    h = {a: sys.unknown(iotas[a].target, Y.objects[a]) for a in P}
    for a, b in P.strict_relations():
        rhs = mc.compose(X.arrow(a, b), fhat[b]) - mc.compose(fhat[a], Y.arrow(a, b))
        sys.equation([(iotas[a], h[a], Y.arrow(a, b)),
                      (-1, mc.compose(X.arrow(a, b), iotas[b]), h[b], None)], rhs)
    sol = sys.solve()
    if sol is None:
        return None
    comps = {a: fhat[a] + mc.compose(iotas[a], sol[i]) for i, a in enumerate(P)}
    return DiagramMorphism(X, Y, comps)


@dataclass
class MorphismLiftResult:
    replaced: Prediagram
    g_prime: DiagramMorphism
    g: DiagramMorphism
    certificate: dict[str, ModMorphism]


def _lift_morphism(X: Prediagram, Y: Prediagram, fhat: Mapping[str, ModMorphism]):
    P = X.shape
    if not len(P):
        ident = as_morphism(identity_family(X))
        return X, ident, DiagramMorphism(X, Y, {})
    c = P.maxima()[0]
    rest = [e for e in P if e != c]
    X1, hp1, h1 = _lift_morphism(restrict(X, rest), restrict(Y, rest), fhat)

    objects = dict(X1.objects)
    objects[c] = X.objects[c]
    arrows = dict(X1.arrows)
    for b in P.strict_below(c):
        arrows[(b, c)] = mc.compose(hp1.components[b], X.arrow(b, c))
    X2 = Prediagram(P, objects, arrows, X.ring)
    hp_comps = dict(hp1.components)
    hp_comps[c] = mc.identity(X.objects[c])
    hp = DiagramMorphism(X2, X, hp_comps)

    tops = P.strict_down(c).maxima()
    parts = [X2.objects[a] for a in tops]
    if parts:
        big = mc.direct_sum(*parts)
    else:
        big = mc.zero_object(X.ring)
    iota = mc.canonical_embedding(big)
    N = iota.target
    inj = {a: mc.compose(mc.injection(parts, i), iota) for i, a in enumerate(tops)}
    f_c = fhat[c]
    if tops:
        rhs = mc.merge(*[mc.compose(h1.components[a], Y.arrow(a, c)) - mc.compose(X2.arrow(a, c), f_c)
                         for a in tops])
        s = mc.solve(iota, rhs, "through_source")
        if s is None:
            raise FactorizationFailed(f"stable defect at {c} does not factor through a free module")
    else:
        s = mc.zero(N, Y.objects[c])

    zeta = {}
    for b in P.strict_below(c):
        above = [a for a in tops if P.le(b, a)]
        # the largest element of V(b) below c; unique in a quasitree
        (a,) = above
        zeta[b] = mc.compose(X2.arrow(b, a), inj[a])
    X3, fam = replace_at(X2, c, None, zeta, N)
    hpp = as_morphism(fam)
    g_prime = as_morphism(compose_families(hpp, hp))
    g_comps = dict(h1.components)
    g_comps[c] = mc.merge(f_c, s)
    g = DiagramMorphism(X3, Y, g_comps)
    return X3, g_prime, g


def lift_morphism(X: Prediagram, Y: Prediagram, fhat: Mapping[str, ModMorphism], *,
                  verify: bool = True) -> MorphismLiftResult:
    """Homotopism ``g' : X' -> X`` and strict ``g : X' -> Y`` with ``g' fhat = g`` stably."""
    if not quasitree_check(X.shape):
        raise NotQuasitree(repr(X.shape))
    for Z, name in ((X, "X"), (Y, "Y")):
        if not check(Z, "strictly_commutative").ok:
            raise PreconditionViolated(f"{name} is not strictly commutative")
        if not check(Z, "purely_monic").ok:
            raise NotPurelyMonic(f"{name} is not purely monic")
    _check_pair(X, Y, fhat)
    X3, g_prime, g = _lift_morphism(X, Y, fhat)
    cert = {}
    for a in X.shape:
        d = mc.compose(g_prime.components[a], fhat[a]) - g.components[a]
        w = mc.stably_zero_witness(d)
        if w is None:
            raise InternalInconsistency(f"g' f and g differ stably at {a}")
        cert[a] = w
    res = MorphismLiftResult(X3, g_prime, g, cert)
    if verify:
        if not (check(X3, "strictly_commutative").ok and check(X3, "purely_monic").ok):
            raise InternalInconsistency("replaced diagram is not a purely monic diagram")
        if not verify_homotopism(g_prime):
            raise InternalInconsistency("g' is not a homotopism")
    return res


__all__ = [
    "TraceStep", "replace_at", "purify_at_max", "purify", "add_commutativity", "LiftResult",
    "lift_diagram", "lift_diagram_epi", "verify_lift", "strict_lift_of_stable_morphism",
    "MorphismLiftResult", "lift_morphism",
]
