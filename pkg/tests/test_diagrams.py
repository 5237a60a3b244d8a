import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flatlift import diagrams as dg
from flatlift import modcat as mc
from flatlift.errors import IllFormed, ShapeMismatch
from flatlift.fixtures import S, dense_not_full_instance, zero_chain_prediagram
from flatlift.random_instances import (random_poset, random_prediagram, random_ring, random_strict_diagram,
                                       stably_zero_noise)

seeds = st.integers(0, 2 ** 32 - 1)


def strict_instance(seed, n_max=5):
    rng = np.random.default_rng(seed)
    P = random_poset(int(rng.integers(1, n_max + 1)), rng)
    return random_strict_diagram(P, random_ring(rng), rng), rng


def conjugation_family(X, rng, noisy=False):
    """(Y, F: Y -> X) with Y the conjugate of X and F a strict iso, optionally perturbed."""
    auts = {a: mc.random_automorphism(X.objects[a], rng) for a in X.shape}
    invs = {a: mc.inverse(f) for a, f in auts.items()}
    arrows = {(a, b): mc.compose_all(invs[a], f, auts[b]) for (a, b), f in X.arrows.items()}
    Y = dg.Prediagram(X.shape, X.objects, arrows, X.ring)
    comps = dict(invs)
    if noisy:
        comps = {a: f + stably_zero_noise(f.source, f.target, rng) for a, f in comps.items()}
    return Y, dg.StableIsoFamily(Y, X, comps)


def test_zero_chain_stably_but_not_strictly_commutative():
    X = zero_chain_prediagram()
    assert dg.check(X, "stably_commutative").ok
    rep = dg.check(X, "strictly_commutative")
    assert not rep.ok
    assert [f.where for f in rep.failures] == [("0", "1", "2")]
    assert rep.failures[0].defect.matrix.tolist() == [[6]]  # -3 mod 9


def test_dense_not_full_source_is_monic():
    X, Y, _ = dense_not_full_instance(3)
    assert dg.is_purely_monic(X)
    D = dg.restrict(X, [S(1), S(2)])
    assert not D.arrows and len(D.shape) == 2
    assert dg.restrict(X, X.shape.elements) == X


def test_typed_failures_are_reported():
    X = zero_chain_prediagram()
    broken = dg.Prediagram(X.shape, X.objects, {k: v for k, v in X.arrows.items() if k != ("0", "2")}, X.ring)
    rep = dg.check(broken, "strictly_commutative")
    assert not rep.ok and rep.failures[0].kind == "missing_arrow"
    extra = X.replace(arrows={("2", "0"): mc.zero(X["2"], X["0"])})
    assert dg.check(extra, "typed").failures[0].kind == "extra_arrow"
    with pytest.raises(ValueError):
        dg.check(X, "commutative-ish")


def test_zero_morphism_not_a_homotopism():
    X = zero_chain_prediagram()
    # the zero family is natural on 1 < 2, where both arrows vanish
    top = dg.restrict(X, ["1", "2"])
    zero = dg.DiagramMorphism(top, top, {a: mc.zero(top[a], top[a]) for a in top.shape})
    assert not dg.verify_homotopism(zero)
    assert dg.verify_homotopism(dg.as_morphism(dg.identity_family(top)))


def test_non_natural_family_rejected():
    X = zero_chain_prediagram()
    comps = {a: mc.identity(X[a]) for a in X.shape}
    comps["2"] = mc.scale(comps["2"], 2)  # 0 -> 2 square now reads 3 against 6
    with pytest.raises(IllFormed):
        dg.DiagramMorphism(X, X, comps)
    with pytest.raises(IllFormed):
        dg.verify_homotopism(dg.StableIsoFamily(X, X, comps))
    with pytest.raises(ShapeMismatch):
        dg.StableIsoFamily(X, X, {"0": comps["0"]})


def test_family_with_one_non_iso_component():
    X = zero_chain_prediagram()
    comps = {a: mc.identity(X[a]) for a in X.shape}
    comps["1"] = mc.zero(X["1"], X["1"])
    rep = dg.stable_iso_report(dg.StableIsoFamily(X, X, comps))
    assert not rep.ok and rep.non_iso == ["1"]


@given(seeds)
def test_strict_implies_stable_and_restriction_inherits(seed):
    X, rng = strict_instance(seed)
    assert dg.check(X, "strictly_commutative").ok
    assert dg.check(X, "stably_commutative").ok
    keep = [a for a in X.shape if rng.random() < 0.6]
    R = dg.restrict(X, keep)
    for level in ("typed", "stably_commutative", "strictly_commutative"):
        assert dg.check(R, level).ok
    if dg.is_purely_monic(X):
        assert dg.is_purely_monic(R)


@given(seeds)
def test_random_prediagrams_are_stably_commutative(seed):
    rng = np.random.default_rng(seed)
    P = random_poset(int(rng.integers(1, 6)), rng)
    X = random_prediagram(P, random_ring(rng), rng)
    assert dg.check(X, "stably_commutative").ok
    keep = [a for a in P if rng.random() < 0.6]
    assert dg.check(dg.restrict(X, keep), "stably_commutative").ok


@given(seeds)
def test_homotopism_implies_stable_iso(seed):
    X, rng = strict_instance(seed)
    Y, F = conjugation_family(X, rng)
    assert F.is_strictly_natural()
    assert dg.verify_homotopism(F) and dg.verify_stable_iso(F)
    assert dg.verify_stable_iso(F, witnesses=True)


@given(seeds)
def test_stable_iso_families_compose(seed):
    X, rng = strict_instance(seed, n_max=4)
    Y, F = conjugation_family(X, rng, noisy=True)
    Z, G = conjugation_family(Y, rng, noisy=True)
    assert dg.verify_stable_iso(F) and dg.verify_stable_iso(G)
    H = dg.compose_families(G, F)
    assert dg.verify_stable_iso(H)
    keep = [a for a in X.shape if rng.random() < 0.5]
    assert dg.verify_stable_iso(dg.restrict_family(H, keep))


@given(seeds)
def test_dual_prediagram_swaps_mono_and_epi(seed):
    X, _ = strict_instance(seed)
    D = dg.dual_prediagram(X)
    assert dg.is_diagram(D)
    for (b, a), f in D.arrows.items():
        assert mc.is_epi(f) == mc.is_mono(X.arrow(a, b))
    assert dg.dual_prediagram(D) == X
