"""Named regression fixtures with known verdicts.

Every fixture has a builder producing its data and a checker yielding
``(invariant, holds)`` pairs. ``tampered`` returns a copy of a fixture whose
data has one matrix mutated; it must fail with a named invariant.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from . import modcat as mc
from .census import canonical_form
from .colimits import brute_force_colimit, crown_colimit
from .crowns import connectedness_check, is_crown
from .diagrams import Prediagram, check, is_purely_monic
from .errors import FlatliftError, NotOneConnected
from .flatness import (flatness_check, ind_crown_report, is_ind_flat, is_pro_flat,
                       iter_full_embeddings, mitchell_check, quasitree_check, suspended_crown)
from .lifting import add_commutativity, lift_diagram, lift_morphism, strict_lift_of_stable_morphism
from .modcat import ModMorphism, ModObject, RingParams
from .poset import Poset, chain, from_cover_relations, inclusion_poset, powerset, product, set_name

Checks = Iterator[tuple[str, bool]]


def S(*xs: int) -> str:
    return set_name(xs)


def sets_poset(*sets) -> Poset:
    return inclusion_poset([set(s) for s in sets])


def cube_minus_top() -> Poset:
    return powerset(3).without(S(1, 2, 3))


def non_full_crown_poset() -> Poset:
    return sets_poset((), (1,), (2,), (2, 3), (2, 4))


def small_crown_poset() -> Poset:
    return sets_poset((1,), (2,), (1, 2), (2, 3))


def two_level_flat_poset() -> Poset:
    return sets_poset((1,), (2,), (1, 2), (1, 2, 3), (1, 2, 4), (1, 2, 3, 4))


def mediated_poset() -> Poset:
    return sets_poset((), (1,), (2,), (3,), (1, 2), (2, 3), (1, 3), (1, 2, 3), (1, 3, 4), (1, 2, 3, 4))


def jump_poset() -> Poset:
    return sets_poset((), (1,), (2,), (3,), (1, 2), (2, 3, 4), (1, 3, 4), (1, 2, 3), (1, 2, 3, 4))


def ten_element_poset() -> Poset:
    return sets_poset((), (1,), (2,), (3,), (1, 4), (1, 5), (1, 2, 3), (3, 4), (3, 5), (1, 2, 3, 4, 5))


def _mor(src: ModObject, tgt: ModObject, rows) -> ModMorphism:
    return ModMorphism(src, tgt, np.array(rows, dtype=np.int64).reshape(src.rank, tgt.rank))


def zero_chain_prediagram() -> Prediagram:
    """Chain 0 < 1 < 2 over Z/9: zero, zero, and the mono Z/3 -> Z/9 on the long arrow."""
    R = RingParams(3, 2)
    P = chain(2)
    X0, X1, X2 = ModObject(R, [1]), ModObject(R, [1]), ModObject(R, [2])
    arrows = {("0", "1"): mc.zero(X0, X1), ("1", "2"): mc.zero(X1, X2), ("0", "2"): _mor(X0, X2, [[3]])}
    return Prediagram(P, {"0": X0, "1": X1, "2": X2}, arrows, R)


def dense_not_full_instance(p: int = 3):
    """Two monos Z/p^2 -> (Z/p^2)^2 over {1},{2} < {1,2} in Z/p^3-mod, mapping to Z/p^2 at the top."""
    R = RingParams(p, 3)
    P = sets_poset((1,), (2,), (1, 2))
    a, b, t = S(1), S(2), S(1, 2)
    C = ModObject(R, [2])
    X = Prediagram(P, {a: C, b: C, t: ModObject(R, [2, 2])},
                   {(a, t): _mor(C, ModObject(R, [2, 2]), [[p - 1, 1]]),
                    (b, t): _mor(C, ModObject(R, [2, 2]), [[p + 1, -1]])}, R)
    Z = mc.zero_object(R)
    Y = Prediagram(P, {a: Z, b: Z, t: C}, {(a, t): mc.zero(Z, C), (b, t): mc.zero(Z, C)}, R)
    fhat = {a: mc.zero(C, Z), b: mc.zero(C, Z), t: _mor(X.objects[t], C, [[1], [1]])}
    return X, Y, fhat


def square_crown_diagram(p: int = 3, k: int = 2) -> Prediagram:
    """Crown a, b < u, v with identities except the arrow b -> v, which is p + 1."""
    R = RingParams(p, k)
    P = from_cover_relations(["a", "b", "u", "v"], [("a", "u"), ("a", "v"), ("b", "u"), ("b", "v")])
    F = ModObject(R, [k])
    one = _mor(F, F, [[1]])
    arrows = {("a", "u"): one, ("a", "v"): one, ("b", "u"): one, ("b", "v"): _mor(F, F, [[p + 1]])}
    return Prediagram(P, {x: F for x in P}, arrows, R)


# ---------------------------------------------------------------------------


@dataclass
class FixtureResult:
    name: str
    passed: bool
    failed: list[str] = field(default_factory=list)
    error: str | None = None


@dataclass
class Fixture:
    name: str
    description: str
    build: Callable[[], dict]
    checks: Callable[[dict], Checks]
    data: dict | None = None

    def run(self) -> FixtureResult:
        failed = []
        try:
            data = self.data if self.data is not None else self.build()
            for invariant, ok in self.checks(data):
                if not ok:
                    failed.append(invariant)
        except FlatliftError as exc:
            return FixtureResult(self.name, False, failed, f"{type(exc).__name__}: {exc}")
        return FixtureResult(self.name, not failed, failed)


def _proportional(u, v) -> bool:
    u = [Fraction(x) for x in u]
    v = [Fraction(x) for x in v]
    i = next((j for j, x in enumerate(v) if x), None)
    if i is None or not u[i]:
        return False
    r = u[i] / v[i]
    return all(a == r * b for a, b in zip(u, v))


def _same_iso_class(P: Poset, Q: Poset) -> bool:
    return len(P) == len(Q) and canonical_form(P.leq)[0] == canonical_form(Q.leq)[0]


# --- crowns -------------------------------------------------------------------


def _check_cube_minus_top(d) -> Checks:
    P = d["poset"]
    C = P.ind_crown()
    yield "crown_elements", set(C.elements) == {S(1), S(2), S(3), S(1, 2), S(1, 3), S(2, 3)}
    yield "crown_relations", len(C.strict_relations()) == 6
    rep = connectedness_check(C)
    yield "kernel_dim", rep.kernel_dim == 1
    yield "not_one_connected", not rep.one_connected
    order = [(S(1), S(1, 2)), (S(1), S(1, 3)), (S(2), S(1, 2)), (S(2), S(2, 3)), (S(3), S(1, 3)), (S(3), S(2, 3))]
    w = dict(zip(rep.boundary.rows, rep.cycle_witness or []))
    yield "cycle_witness", _proportional([w.get(r, 0) for r in order], [1, -1, -1, 1, 1, -1])


def _check_non_full(d) -> Checks:
    P = d["poset"]
    C = P.ind_crown()
    yield "crown_has_all_objects", set(C.elements) == set(P.elements)
    yield "relation_dropped", P.lt(S(), S(2)) and not C.lt(S(), S(2))
    yield "poset_not_crown", not is_crown(P)
    yield "ind_crown_is_crown", is_crown(C)


def _check_small_crown(d) -> Checks:
    P = d["poset"]
    yield "is_crown", is_crown(P)
    yield "ind_crown", set(P.ind_crown().elements) == {S(2), S(1, 2), S(2, 3)}
    yield "pro_crown", set(P.pro_crown().elements) == {S(1), S(2), S(1, 2)}


def _check_square_crown(d) -> Checks:
    X = d["diagram"]
    rep = connectedness_check(X.shape)
    yield "kernel_dim", rep.kernel_dim == 1 and not rep.one_connected
    cone = brute_force_colimit(X)
    yield "apex_invariants", cone.apex.invariants() == ModObject(X.ring, [1]).invariants()
    yield "leg_u_not_mono", not mc.is_mono(cone.legs["u"])
    yield "leg_v_not_mono", not mc.is_mono(cone.legs["v"])
    try:
        crown_colimit(X)
        refused = False
    except NotOneConnected:
        refused = True
    yield "crown_method_refuses", refused


# --- flatness -----------------------------------------------------------------


def _check_flatness_list(d) -> Checks:
    rep = flatness_check(d["cube_minus_top"])
    yield "i_ind_flat", rep.ind_flat
    yield "i_not_pro_flat", not rep.pro_flat
    yield "i_failing_element", [(e, m) for e, m, _ in rep.failures] == [(S(), "pro")]
    yield "ii_flat", flatness_check(d["non_full"]).flat
    yield "iii_flat", flatness_check(d["small_crown"]).flat
    yield "iv_grids_flat", all(flatness_check(product(chain(m), chain(n))).flat
                               for m in range(5) for n in range(5))
    # derived verdict: pro-flat, but the ind-crown below the top has cycle rank 4
    ten = flatness_check(d["ten"])
    yield "v_pro_flat", ten.pro_flat
    yield "v_ind_failure_at_top", [(e, m, r.kernel_dim) for e, m, r in ten.failures] == [(S(1, 2, 3, 4, 5), "ind", 4)]
    for m in (3, 4):
        P = powerset(m)
        yield f"powerset_{m}_neither", not is_ind_flat(P) and not is_pro_flat(P)
    yield "cube_is_product", _same_iso_class(powerset(3), product(chain(1), chain(1), chain(1)))


def _check_full_subposet(d) -> Checks:
    D = d["poset"]
    Dp = D.without(S(1, 2))
    yield "D_flat", flatness_check(D).flat
    rep = flatness_check(Dp)
    yield "Dprime_not_ind_flat", not rep.ind_flat
    yield "Dprime_failing_element", [e for e, m, _ in rep.failures if m == "ind"] == [S(1, 2, 3, 4)]
    C = Dp.strict_down(S(1, 2, 3, 4)).ind_crown()
    yield "Dprime_crown", set(C.elements) == {S(1), S(2), S(1, 2, 3), S(1, 2, 4)}


def _check_quasitree_example(d) -> Checks:
    P = d["poset"]
    yield "quasitree", quasitree_check(P)
    yield "flat", flatness_check(P).flat


def _check_suspended_core(d) -> Checks:
    SC = suspended_crown(3)
    yield "size", len(SC) == 8
    core = SC.without("s", "t")
    yield "core_is_crown", is_crown(core)
    yield "core_matches_cube_crown", _same_iso_class(core, cube_minus_top().ind_crown())


def _images(n: int, P: Poset) -> list[set[str]]:
    return [emb.image() for emb in iter_full_embeddings(suspended_crown(n), P)]


def _check_mediated(d) -> Checks:
    D = d["poset"]
    target = set(D.elements) - {S(1, 2, 3), S(1, 3)}
    yield "sc3_image", target in _images(3, D)
    yield "top_one_connected", ind_crown_report(D, S(1, 2, 3, 4)).one_connected
    yield "inner_not_one_connected", not ind_crown_report(D, S(1, 2, 3)).one_connected
    m = mitchell_check(D)
    yield "mitchell_fails_via_sc3", (not m.dimension_le_2) and m.witness is not None and m.witness[0] == 3


def _check_jump(d) -> Checks:
    D = d["poset"]
    Dp = D.without(S(1, 2, 3))
    yield "sc3_image", set(Dp.elements) in _images(3, D)
    yield "sub_is_sc3", _same_iso_class(Dp, suspended_crown(3))
    yield "kernel_dim_sub", ind_crown_report(Dp, S(1, 2, 3, 4)).kernel_dim == 1
    yield "kernel_dim_full", ind_crown_report(D, S(1, 2, 3, 4)).kernel_dim == 2
    yield "not_ind_flat", not is_ind_flat(D)


# --- modules and lifting ----------------------------------------------------


def _check_zero_chain(d) -> Checks:
    X = d["diagram"]
    yield "typed", check(X, "typed").ok
    yield "stably_commutative", check(X, "stably_commutative").ok
    strict = check(X, "strictly_commutative")
    yield "strict_fails_at_triple", (not strict.ok) and [f.where for f in strict.failures] == [("0", "1", "2")]
    res = lift_diagram(X)
    yield "lift_purely_monic", check(res.lifted, "purely_monic").ok
    yield "lift_strict", check(res.lifted, "strictly_commutative").ok
    yield "lift_family_not_strict", not res.iso.is_strictly_natural()
    Xn, _ = add_commutativity(X, "2", "1", "0", check_input=False)
    yield "add_commutativity_exact", mc.compose(Xn.arrow("0", "1"), Xn.arrow("1", "2")) == Xn.arrow("0", "2")


def _check_involution(d) -> Checks:
    R = d["ring"]
    C, N = ModObject(R, [2]), ModObject(R, [3])
    a, u, v, at = (_mor(C, C, d["a"]), _mor(C, N, d["u"]), _mor(N, C, d["v"]), _mor(N, N, d["at"]))
    yield "a_squared_minus_one_is_uv", mc.compose(a, a) - mc.identity(C) == mc.compose(u, v)
    yield "prolongation", mc.compose(u, at) == mc.compose(a, u)
    yield "condition_1", (mc.compose(at, v) - mc.compose(v, a)).is_zero()
    yield "condition_2", (mc.compose(at, at) - mc.identity(N) - mc.compose(v, u)).is_zero()
    CN = mc.direct_sum(C, N)
    blk = mc.merge(mc.fork(a, u), mc.fork(-v, -at))
    yield "involution", mc.compose(blk, blk) == mc.identity(CN)
    yield "inclusion_stable_iso", mc.is_stable_iso(mc.injection([C, N], 0))


def _check_dense_not_full(d) -> Checks:
    X, Y, fhat = d["X"], d["Y"], d["fhat"]
    yield "quasitree", quasitree_check(X.shape)
    yield "X_purely_monic", is_purely_monic(X)
    yield "Y_strict", check(Y, "strictly_commutative").ok
    yield "strict_lift_none", strict_lift_of_stable_morphism(X, Y, fhat) is None
    res = lift_morphism(X, Y, fhat)
    yield "lift_morphism_ok", all(mc.is_stably_zero(mc.compose(res.g_prime.components[a], fhat[a])
                                                    - res.g.components[a]) is not None for a in X.shape)


FIXTURES: list[Fixture] = [
    Fixture("cube_minus_top_crown", "ind-crown of the cube without its top: one cycle",
            lambda: {"poset": cube_minus_top()}, _check_cube_minus_top),
    Fixture("non_full_ind_crown", "ind-crown keeping all objects but dropping a relation",
            lambda: {"poset": non_full_crown_poset()}, _check_non_full),
    Fixture("small_crown_crowns", "ind- and pro-crowns of a four-element crown",
            lambda: {"poset": small_crown_poset()}, _check_small_crown),
    Fixture("square_crown_colimit", "colimit over a square crown loses injectivity",
            lambda: {"diagram": square_crown_diagram()}, _check_square_crown),
    Fixture("flatness_catalogue", "ind/pro flatness of the standard list",
            lambda: {"cube_minus_top": cube_minus_top(), "non_full": non_full_crown_poset(),
                     "small_crown": small_crown_poset(), "ten": ten_element_poset()},
            _check_flatness_list),
    Fixture("full_subposet_not_flat", "a flat poset with a full subposet that is not ind-flat",
            lambda: {"poset": two_level_flat_poset()}, _check_full_subposet),
    Fixture("quasitree_v", "the V-shaped quasitree is flat",
            lambda: {"poset": sets_poset((1,), (2,), (1, 2))}, _check_quasitree_example),
    Fixture("suspended_crown_core", "SC_3 minus its extremes is the cube crown",
            lambda: {}, _check_suspended_core),
    Fixture("mediated_suspended_crown", "SC_3 inside, yet the top cone is 1-connected",
            lambda: {"poset": mediated_poset()}, _check_mediated),
    Fixture("suspended_crown_jump", "adding one element raises the kernel dimension",
            lambda: {"poset": jump_poset()}, _check_jump),
    Fixture("zero_chain_prediagram", "prediagram on a 3-chain with no homotopic strict model",
            lambda: {"diagram": zero_chain_prediagram()}, _check_zero_chain),
    Fixture("involution_arithmetic", "Z/27 identities for an involution replacement",
            lambda: {"ring": RingParams(3, 3), "a": [[2]], "u": [[3]], "v": [[1]], "at": [[2]]},
            _check_involution),
    Fixture("dense_not_full", "stable morphism with no strict lift that still lifts after replacement",
            lambda: dict(zip(("X", "Y", "fhat"), dense_not_full_instance())), _check_dense_not_full),
]


def get(name: str) -> Fixture:
    for f in FIXTURES:
        if f.name == name:
            return f
    raise KeyError(name)


def run_all(fixtures: list[Fixture] | None = None) -> list[FixtureResult]:
    return [f.run() for f in (FIXTURES if fixtures is None else fixtures)]


def tampered(name: str = "dense_not_full") -> Fixture:
    """Copy of a fixture with one matrix mutated (negative control)."""
    base = get(name)
    data = copy.deepcopy(base.build())
    if name == "dense_not_full":
        X = data["X"]
        a, t = S(1), S(1, 2)
        f = X.arrow(a, t)
        data["X"] = X.replace(arrows={(a, t): _mor(f.source, f.target, [[X.ring.p, 0]])})
    elif name == "involution_arithmetic":
        data["at"] = [[5]]
    elif name == "square_crown_colimit":
        X = data["diagram"]
        f = X.arrow("b", "v")
        data["diagram"] = X.replace(arrows={("b", "v"): _mor(f.source, f.target, [[1]])})
    else:
        raise KeyError(f"no tampering defined for {name}")
    return Fixture(base.name + "[tampered]", base.description, base.build, base.checks, data)
