"""Random test instances whose preconditions hold by construction.

Monic diagrams are configurations of submodules S_a of an ambient free
module F with S_a inside S_b whenever a <= b; the arrows are the inclusions.
Non-monic strict diagrams add a constant summand supported on a down-set.
Prediagrams perturb arrows by maps that factor through the canonical free
embedding.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

from . import kernels
from . import modcat as mc
from .diagrams import Prediagram
from .flatness import is_ind_flat, is_pro_flat, quasitree_check
from .modcat import ModMorphism, ModObject, RingParams
from .poset import Poset, transitive_closure


def random_poset(n: int, rng: np.random.Generator, density: float | None = None) -> Poset:
    """Random order on ``p0..p{n-1}``; the input order is a linear extension."""
    if density is None:
        density = rng.uniform(0.15, 0.6)
    R = np.triu(rng.random((n, n)) < density, k=1) | np.eye(n, dtype=bool)
    return Poset([f"p{i}" for i in range(n)], transitive_closure(R), check=False)


def random_poset_where(pred: Callable[[Poset], bool], rng: np.random.Generator,
                       n_range=(1, 6), tries: int = 1000) -> Poset:
    """Rejection sampling until ``pred`` holds."""
    for _ in range(tries):
        P = random_poset(int(rng.integers(n_range[0], n_range[1] + 1)), rng)
        if pred(P):
            return P
    raise RuntimeError("rejection sampling gave up")


def random_ind_flat_poset(rng, n_range=(1, 6)) -> Poset:
    return random_poset_where(is_ind_flat, rng, n_range)


def random_pro_flat_poset(rng, n_range=(1, 6)) -> Poset:
    return random_poset_where(is_pro_flat, rng, n_range)


def random_quasitree(rng, n_range=(1, 6)) -> Poset:
    return random_poset_where(quasitree_check, rng, n_range)


def random_ring(rng, primes=(2, 3), ks=(2, 3)) -> RingParams:
    return RingParams(int(rng.choice(primes)), int(rng.choice(ks)))


# ---------------------------------------------------------------------------
# submodule configurations


def _submodule(gens: np.ndarray, ring: RingParams) -> ModMorphism:
    """Row span of ``gens`` inside the free module, as a mono from a cyclic sum."""
    p, k = ring.p, ring.k
    R = gens.shape[1]
    F = mc.free(ring, R)
    if gens.shape[0] == 0:
        return mc.zero(mc.zero_object(ring), F)
    exps, U, V = kernels.snf_mod(gens, p, k)
    basis = mc.matmul_mod(U, gens, ring.q)
    keep = [t for t in range(len(exps)) if exps[t] < k]
    S = ModObject(ring, [k - int(exps[t]) for t in keep])
    return ModMorphism(S, F, basis[keep], check=True)


def random_monic_diagram(P: Poset, ring: RingParams, rng: np.random.Generator,
                         ambient_rank: int | None = None, extra: int = 2) -> Prediagram:
    """Strict purely monic diagram of nested submodules of a free module."""
    R = int(rng.integers(1, 4)) if ambient_rank is None else ambient_rank
    gens: dict[str, np.ndarray] = {}
    embed: dict[str, ModMorphism] = {}
    for a in P:  # input order is a linear extension for generated posets
        rows = [gens[b] for b in P.strict_below(a) if b in gens]
        m = int(rng.integers(0 if rows else 1, extra + 1))
        new = rng.integers(0, ring.q, size=(m, R)) * ring.p ** rng.integers(0, ring.k, size=(m, 1))
        G = np.vstack(rows + [new % ring.q]) if rows or m else np.zeros((0, R), dtype=np.int64)
        gens[a] = G.astype(np.int64)
        embed[a] = _submodule(gens[a], ring)
    objects = {a: embed[a].source for a in P}
    arrows = {}
    for a, b in P.strict_relations():
        x = mc.solve(embed[b], embed[a], "through_target")
        if x is None:
            raise AssertionError("nested submodule does not factor")
        arrows[(a, b)] = x
    return Prediagram(P, objects, arrows, ring)


def conjugate(X: Prediagram, rng: np.random.Generator) -> Prediagram:
    """Change coordinates at every element by a random automorphism."""
    auts = {a: mc.random_automorphism(X.objects[a], rng) for a in X.shape}
    invs = {a: mc.inverse(f) for a, f in auts.items()}
    arrows = {(a, b): mc.compose_all(invs[a], f, auts[b]) for (a, b), f in X.arrows.items()}
    return Prediagram(X.shape, X.objects, arrows, X.ring)


def random_down_set(P: Poset, rng: np.random.Generator) -> list[str]:
    chosen = set()
    for a in P:
        if rng.random() < 0.5:
            chosen.update(P.strict_below(a))
            chosen.add(a)
    return [a for a in P if a in chosen]


def random_strict_diagram(P: Poset, ring: RingParams, rng: np.random.Generator) -> Prediagram:
    """Monic diagram plus a constant summand on a random down-set (zero above it)."""
    X = random_monic_diagram(P, ring, rng)
    down = set(random_down_set(P, rng))
    T = ModObject(ring, [int(rng.integers(1, ring.k + 1))])
    objects = {}
    for a in P:
        objects[a] = mc.direct_sum(X.objects[a], T) if a in down else X.objects[a]
    arrows = {}
    for (a, b), f in X.arrows.items():
        if a in down and b in down:
            arrows[(a, b)] = mc.direct_sum_maps(f, mc.identity(T))
        elif a in down:
            arrows[(a, b)] = mc.merge(f, mc.zero(T, X.objects[b]))
        else:
            arrows[(a, b)] = f
    return conjugate(Prediagram(P, objects, arrows, ring), rng)


def stably_zero_noise(X: ModObject, Y: ModObject, rng: np.random.Generator) -> ModMorphism:
    iota = mc.canonical_embedding(X)
    return mc.compose(iota, mc.random_morphism(iota.target, Y, rng))


def perturb(X: Prediagram, rng: np.random.Generator, covers_too: bool = False) -> Prediagram:
    """Add stably zero noise to every non-cover arrow (and covers if asked)."""
    covers = set(X.shape.covers())
    arrows = {}
    for (a, b), f in X.arrows.items():
        if covers_too or (a, b) not in covers:
            f = f + stably_zero_noise(X.objects[a], X.objects[b], rng)
        arrows[(a, b)] = f
    return Prediagram(X.shape, X.objects, arrows, X.ring)


def random_prediagram(P: Poset, ring: RingParams, rng: np.random.Generator) -> Prediagram:
    """Stably commutative, generally not strictly commutative, generally not monic."""
    return perturb(random_strict_diagram(P, ring, rng), rng, covers_too=bool(rng.random() < 0.5))


def random_morphism_instance(P: Poset, ring: RingParams, rng: np.random.Generator):
    """``(X, Y, fhat)``: X, Y purely monic diagrams, fhat stably natural.

    Y is ``X + Z`` and fhat is the inclusion plus stably zero noise.
    """
    X = random_monic_diagram(P, ring, rng)
    Z = random_monic_diagram(P, ring, rng)
    objects = {a: mc.direct_sum(X.objects[a], Z.objects[a]) for a in P}
    arrows = {(a, b): mc.direct_sum_maps(X.arrows[(a, b)], Z.arrows[(a, b)]) for a, b in P.strict_relations()}
    Y = Prediagram(P, objects, arrows, ring)
    fhat = {}
    for a in P:
        inc = mc.injection([X.objects[a], Z.objects[a]], 0)
        fhat[a] = inc + stably_zero_noise(X.objects[a], Y.objects[a], rng)
    return X, Y, fhat
