import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatlift import diagrams as dg
from flatlift import lifting as lf
from flatlift import modcat as mc
from flatlift.errors import NotIndFlat, NotQuasitree, NotStablyCommutative, NotStablyNatural
from flatlift.fixtures import dense_not_full_instance, zero_chain_prediagram
from flatlift.modcat import ModMorphism, ModObject, RingParams
from flatlift.poset import chain, powerset, product
from flatlift.random_instances import (random_ind_flat_poset, random_monic_diagram, random_morphism_instance,
                                       random_prediagram, random_pro_flat_poset, random_quasitree, random_ring,
                                       random_strict_diagram)

R32 = RingParams(3, 2)
seeds = st.integers(0, 2 ** 32 - 1)


def assert_lift_ok(X, res, epi=False):
    """Independent re-check: explicit stable-iso witnesses instead of the cone test."""
    L = res.lifted
    assert dg.check(L, "strictly_commutative").ok
    if epi:
        assert all(mc.is_epi(f) for f in L.arrows.values())
        assert res.iso.source == X and res.iso.target == L
    else:
        assert dg.check(L, "purely_monic").ok
        assert res.iso.source == L and res.iso.target == X
    assert dg.stable_iso_report(res.iso, witnesses=True).ok


def constant_chain(n, exp=2):
    P = chain(n)
    Z = ModObject(R32, [exp])
    one = mc.identity(Z)
    return dg.Prediagram(P, {a: Z for a in P}, {ab: one for ab in P.strict_relations()}, R32)


# --- replacements -----------------------------------------------------------


def test_replace_with_zero_free_module_is_trivial():
    X = constant_chain(2)
    Xn, fam = lf.replace_at(X, "1", None, None, mc.zero_object(R32))
    assert Xn == X
    assert all(f == mc.identity(X[a]) for a, f in fam.components.items())


@given(seeds)
def test_replacement_at_maximum_is_a_homotopism(seed):
    rng = np.random.default_rng(seed)
    P = random_ind_flat_poset(rng)
    X = random_strict_diagram(P, random_ring(rng), rng)
    c = P.maxima()[0]
    N = mc.free(X.ring, int(rng.integers(0, 3)))
    zeta = {b: mc.random_morphism(X[b], N, rng) for b in P.strict_below(c)}
    Xn, fam = lf.replace_at(X, c, None, zeta, N)
    assert fam.is_strictly_natural()
    assert dg.verify_homotopism(fam, witnesses=True)


def test_interior_replacement_is_stable_but_not_strict():
    X = constant_chain(2)
    N = mc.free(R32, 1)
    one = ModMorphism(N, X["2"], [[1]])
    Xn, fam = lf.replace_at(X, "1", {"2": one}, {"0": ModMorphism(X["0"], N, [[1]])}, N)
    assert Xn.arrow("1", "2").matrix.tolist() == [[1], [1]]
    assert not fam.is_strictly_natural()
    assert dg.verify_stable_iso(fam, witnesses=True)


def test_purify_at_max_on_zero_arrow():
    P = chain(1)
    Z3, Z0 = ModObject(R32, [1]), mc.zero_object(R32)
    X = dg.Prediagram(P, {"0": Z3, "1": Z0}, {("0", "1"): mc.zero(Z3, Z0)}, R32)
    Xn, h = lf.purify_at_max(X, "1")
    assert Xn["1"] == ModObject(R32, [2])
    assert Xn.arrow("0", "1").matrix.tolist() == [[3]]
    assert dg.is_purely_monic(Xn) and dg.verify_homotopism(h, witnesses=True)


def test_purify_empty_and_monic():
    P = chain(0).without("0")
    E = dg.Prediagram(P, {}, {}, R32)
    Y, h = lf.purify(E)
    assert Y == E
    X = constant_chain(2)
    Y, h = lf.purify(X, skip_monic=False)
    assert dg.is_purely_monic(Y) and dg.verify_homotopism(h)


@given(seeds)
def test_purify_random(seed):
    rng = np.random.default_rng(seed)
    P = random_ind_flat_poset(rng)
    X = random_strict_diagram(P, random_ring(rng), rng)
    Y, h = lf.purify(X)
    assert dg.is_diagram(Y) and dg.is_purely_monic(Y)
    assert h.source == Y and h.target == X
    assert dg.verify_homotopism(h, witnesses=True)


def test_add_commutativity_on_zero_chain():
    X = zero_chain_prediagram()
    Xn, fam = lf.add_commutativity(X, "2", "1", "0", check_input=False)
    assert mc.compose(Xn.arrow("0", "1"), Xn.arrow("1", "2")) == Xn.arrow("0", "2")
    assert dg.is_purely_monic(dg.restrict(Xn, ["0", "1"]))
    assert dg.verify_stable_iso(fam, witnesses=True)
    # away from the replaced element nothing changed
    assert Xn.arrow("0", "2") == X.arrow("0", "2") and Xn["2"] == X["2"]


def test_add_commutativity_with_zero_defect():
    X = constant_chain(2)
    Xn, fam = lf.add_commutativity(X, "2", "1", "0")
    assert Xn == X


# --- density ----------------------------------------------------------------


def test_zero_chain_lifts_without_homotopism():
    X = zero_chain_prediagram()
    res = lf.lift_diagram(X)
    assert_lift_ok(X, res)
    # no homotopism to X exists, so the family cannot be strict
    assert not res.iso.is_strictly_natural()


def test_monic_diagram_lifts_to_itself_up_to_stable_iso():
    X = random_monic_diagram(chain(3), R32, np.random.default_rng(3))
    res = lf.lift_diagram(X)
    assert_lift_ok(X, res)


def test_lift_errors():
    X = random_strict_diagram(powerset(3), R32, np.random.default_rng(0))
    with pytest.raises(NotIndFlat):
        lf.lift_diagram(X)
    Y = constant_chain(2, exp=1)
    bad = Y.replace(arrows={("0", "2"): mc.scale(Y.arrow("0", "2"), 2)})  # defect -1 on Z/3
    with pytest.raises(NotStablyCommutative):
        lf.lift_diagram(bad)


@settings(max_examples=40)
@given(seeds)
def test_random_lifts(seed):
    rng = np.random.default_rng(seed)
    P = random_ind_flat_poset(rng)
    X = random_prediagram(P, random_ring(rng), rng)
    res = lf.lift_diagram(X, verify=False)
    assert_lift_ok(X, res)


def test_diamond_lifts_exercise_every_step():
    # the crown below the top is m < t1, m < t2, so the commutant induction has work to do
    P = product(chain(1), chain(1))
    rng = np.random.default_rng(2024)
    steps = set()
    for _ in range(30):
        X = random_prediagram(P, random_ring(rng), rng)
        res = lf.lift_diagram(X, verify=False)
        assert_lift_ok(X, res)
        steps |= {t.step for t in res.trace}
    assert {"add_commutativity", "purify_at_max"} <= steps


@settings(max_examples=20)
@given(seeds)
def test_lift_is_idempotent_up_to_stable_iso(seed):
    rng = np.random.default_rng(seed)
    P = random_ind_flat_poset(rng, (1, 5))
    X = random_prediagram(P, random_ring(rng), rng)
    r1 = lf.lift_diagram(X)
    r2 = lf.lift_diagram(r1.lifted)
    assert_lift_ok(r1.lifted, r2)
    assert dg.verify_stable_iso(dg.compose_families(r2.iso, r1.iso))


@settings(max_examples=30)
@given(seeds)
def test_epi_lifts(seed):
    rng = np.random.default_rng(seed)
    P = random_pro_flat_poset(rng)
    X = random_prediagram(P, random_ring(rng), rng)
    res = lf.lift_diagram_epi(X)
    assert_lift_ok(X, res, epi=True)


# --- morphisms --------------------------------------------------------------


def test_dense_not_full():
    X, Y, fhat = dense_not_full_instance(3)
    assert lf.strict_lift_of_stable_morphism(X, Y, fhat) is None
    res = lf.lift_morphism(X, Y, fhat)
    assert dg.verify_homotopism(res.g_prime, witnesses=True)
    assert res.g.is_strictly_natural()


def test_strictly_natural_representatives_are_kept():
    X = random_monic_diagram(chain(2), R32, np.random.default_rng(5))
    fhat = {a: mc.identity(X[a]) for a in X.shape}
    g = lf.strict_lift_of_stable_morphism(X, X, fhat)
    assert g is not None and all(g.components[a] == fhat[a] for a in X.shape)
    res = lf.lift_morphism(X, X, fhat)
    assert all(w.is_zero() or mc.is_stably_zero(w) for w in res.certificate.values())


def test_morphism_errors():
    Z9 = ModObject(RingParams(3, 3), [2])
    P = chain(1)
    A = dg.Prediagram(P, {"0": Z9, "1": Z9}, {("0", "1"): mc.identity(Z9)}, Z9.ring)
    with pytest.raises(NotStablyNatural):
        lf.strict_lift_of_stable_morphism(A, A, {"0": mc.identity(Z9), "1": mc.zero(Z9, Z9)})
    B = random_monic_diagram(powerset(3), R32, np.random.default_rng(0))
    with pytest.raises(NotQuasitree):
        lf.lift_morphism(B, B, {a: mc.identity(B[a]) for a in B.shape})


@settings(max_examples=30)
@given(seeds)
def test_random_morphism_lifts(seed):
    rng = np.random.default_rng(seed)
    P = random_quasitree(rng)
    X, Y, fhat = random_morphism_instance(P, random_ring(rng), rng)
    res = lf.lift_morphism(X, Y, fhat, verify=False)
    Xp = res.replaced
    assert dg.check(Xp, "strictly_commutative").ok and dg.check(Xp, "purely_monic").ok
    assert res.g_prime.source == Xp and res.g_prime.target == X
    assert dg.verify_homotopism(res.g_prime, witnesses=True)
    assert res.g.is_strictly_natural()
    for a in P:
        d = mc.compose(res.g_prime.components[a], fhat[a]) - res.g.components[a]
        assert mc.compose(mc.canonical_embedding(Xp[a]), res.certificate[a]) == d
