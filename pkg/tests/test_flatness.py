from hypothesis import given

from flatlift.census import canonical_form
from flatlift.crowns import is_crown
from flatlift.flatness import (_quasitree_by_crowns, _quasitree_by_intervals, find_full_embedding,
                               flatness_check, ind_crown_report, is_ind_flat, is_pro_flat,
                               iter_full_embeddings, mitchell_check, quasitree_check, suspended_crown)
from flatlift.fixtures import (S, cube_minus_top, jump_poset, mediated_poset, non_full_crown_poset,
                               sets_poset, small_crown_poset, ten_element_poset, two_level_flat_poset)
from flatlift.poset import chain, powerset, product
from conftest import crowns, posets
from test_crowns import cycle_rank


def test_cube_minus_top_ind_but_not_pro():
    rep = flatness_check(cube_minus_top())
    assert rep.ind_flat and not rep.pro_flat
    assert [(d, m) for d, m, _ in rep.failures] == [(S(), "pro")]


def test_small_examples_flat():
    assert flatness_check(non_full_crown_poset()).flat
    assert flatness_check(small_crown_poset()).flat


def test_grids_flat():
    for m in range(5):
        for n in range(5):
            assert flatness_check(product(chain(m), chain(n))).flat


def test_powersets_neither():
    for m in (3, 4):
        P = powerset(m)
        assert not is_ind_flat(P) and not is_pro_flat(P)


def test_ten_element_poset_verdict():
    # the ind-crown below the top contains the square {} < {1,4} > {1} < {1,5} > {}
    P = ten_element_poset()
    C = P.strict_down(S(1, 2, 3, 4, 5)).ind_crown()
    assert {(S(), S(1, 4)), (S(), S(1, 5)), (S(1), S(1, 4)), (S(1), S(1, 5))} <= set(C.strict_relations())
    assert cycle_rank(C) == 4
    rep = flatness_check(P)
    assert rep.pro_flat and not rep.ind_flat


def test_full_subposet_breaks_ind_flatness():
    D = two_level_flat_poset()
    assert flatness_check(D).flat
    rep = flatness_check(D.without(S(1, 2)))
    assert not rep.ind_flat
    assert [d for d, m, _ in rep.failures if m == "ind"] == [S(1, 2, 3, 4)]


def test_v_shape_is_quasitree():
    assert quasitree_check(sets_poset((1,), (2,), (1, 2)))


def test_suspended_crowns():
    sc2 = suspended_crown(2)
    assert len(sc2) == 6
    assert all(sc2.le("s", x) and sc2.le(x, "t") for x in sc2)
    core = suspended_crown(3).without("s", "t")
    C = cube_minus_top().ind_crown()
    assert is_crown(core) and canonical_form(core.leq)[0] == canonical_form(C.leq)[0]


def test_mediated_poset():
    D = mediated_poset()
    images = [e.image() for e in iter_full_embeddings(suspended_crown(3), D)]
    assert set(D.elements) - {S(1, 2, 3), S(1, 3)} in images
    assert ind_crown_report(D, S(1, 2, 3, 4)).one_connected
    assert not ind_crown_report(D, S(1, 2, 3)).one_connected
    m = mitchell_check(D)
    assert not m.dimension_le_2 and m.witness[0] == 3


def test_jump_poset():
    D = jump_poset()
    Dp = D.without(S(1, 2, 3))
    assert set(Dp.elements) in [e.image() for e in iter_full_embeddings(suspended_crown(3), D)]
    assert ind_crown_report(Dp, S(1, 2, 3, 4)).kernel_dim == 1
    assert ind_crown_report(D, S(1, 2, 3, 4)).kernel_dim == 2


def test_embedding_search_negative():
    assert find_full_embedding(suspended_crown(3), chain(7)) is None
    emb = find_full_embedding(suspended_crown(2), suspended_crown(2))
    assert emb is not None and emb.is_valid()


@given(posets(max_n=7))
def test_quasitree_methods_agree_and_imply_flat(P):
    a, b = _quasitree_by_intervals(P), _quasitree_by_crowns(P)
    assert a == b
    if a:
        assert flatness_check(P).flat


@given(posets(max_n=6))
def test_flatness_self_dual(P):
    assert is_ind_flat(P) == is_pro_flat(P.opposite())


@given(posets(max_n=7))
def test_full_embeddings_are_full(P):
    for emb in iter_full_embeddings(suspended_crown(2), P):
        f = emb.mapping
        for x in emb.source:
            for y in emb.source:
                assert emb.source.le(x, y) == P.le(f[x], f[y])
        break


@given(crowns())
def test_crowns_are_quasitrees(C):
    assert quasitree_check(C)
