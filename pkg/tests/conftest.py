from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from flatlift import modcat as mc
from flatlift.modcat import ModMorphism, ModObject, RingParams
from flatlift.poset import Poset, transitive_closure

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


# --- strategies ---------------------------------------------------------------


@st.composite
def posets(draw, min_n: int = 0, max_n: int = 6) -> Poset:
    n = draw(st.integers(min_n, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * (n - 1) // 2, max_size=n * (n - 1) // 2))
    R = np.eye(n, dtype=bool)
    it = iter(bits)
    for i in range(n):
        for j in range(i + 1, n):
            R[i, j] = next(it)
    perm = draw(st.permutations(range(n))) if n else []
    L = transitive_closure(R)
    names = [f"e{i}" for i in range(n)]
    if n:
        inv = np.argsort(perm)
        L = L[np.ix_(inv, inv)]
    return Poset(names, L, check=False)


@st.composite
def crowns(draw, max_low: int = 4, max_high: int = 4) -> Poset:
    lo = draw(st.integers(0, max_low))
    hi = draw(st.integers(0, max_high))
    bits = draw(st.lists(st.booleans(), min_size=lo * hi, max_size=lo * hi))
    n = lo + hi
    L = np.eye(n, dtype=bool)
    for t, b in enumerate(bits):
        L[t // hi, lo + t % hi] = b
    return Poset([f"l{i}" for i in range(lo)] + [f"h{j}" for j in range(hi)], L, check=False)


rings = st.sampled_from([RingParams(2, 2), RingParams(2, 3), RingParams(3, 2), RingParams(3, 3)])


@st.composite
def objects(draw, ring: RingParams | None = None, max_rank: int = 3) -> ModObject:
    R = ring or draw(rings)
    exps = draw(st.lists(st.integers(1, R.k), max_size=max_rank))
    return ModObject(R, exps)


@st.composite
def morphisms(draw, X: ModObject | None = None, Y: ModObject | None = None, max_rank: int = 3) -> ModMorphism:
    if X is None:
        X = draw(objects(max_rank=max_rank))
    if Y is None:
        Y = draw(objects(X.ring, max_rank=max_rank))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return mc.random_morphism(X, Y, np.random.default_rng(seed))


# --- brute force over finite abelian groups -----------------------------------


def elements(X: ModObject):
    """All elements of X as integer row vectors."""
    ranges = [range(X.ring.p ** e) for e in X.exponents]
    for t in itertools.product(*ranges):
        yield np.array(t, dtype=np.int64)


def apply(f: ModMorphism, x: np.ndarray) -> tuple[int, ...]:
    mods = np.array([f.ring.p ** e for e in f.target.exponents], dtype=np.int64)
    if f.target.rank == 0:
        return ()
    return tuple(int(v) for v in (x @ f.matrix) % mods)


def image(f: ModMorphism) -> set[tuple[int, ...]]:
    return {apply(f, x) for x in elements(f.source)}


def all_homs(X: ModObject, Y: ModObject):
    """Every well-typed matrix X -> Y (entry (i,j) a multiple of the required power, mod p^{e_j})."""
    p = X.ring.p
    div = mc.required_divisibility(X, Y)
    choices = []
    for i in range(X.rank):
        for j in range(Y.rank):
            step = p ** int(div[i, j])
            choices.append(range(0, p ** Y.exponents[j], step))
    for t in itertools.product(*choices):
        M = np.array(t, dtype=np.int64).reshape(X.rank, Y.rank)
        yield ModMorphism(X, Y, M)


def hom_count(X: ModObject, Y: ModObject) -> int:
    p = X.ring.p
    n = 1
    for a in X.exponents:
        for b in Y.exponents:
            n *= p ** min(a, b)
    return n


def subgroup_generated(gens: list[np.ndarray], mods: np.ndarray) -> set[tuple[int, ...]]:
    seen = {tuple([0] * len(mods))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(int(v) for v in (np.array(x) + g) % mods)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def quotient_invariants(order_fn, p: int, k: int) -> tuple[int, ...]:
    """Cyclic decomposition from the orders |p^i Q|, i = 0..k."""
    sizes = [order_fn(i) for i in range(k + 1)]
    # number of cyclic factors of order >= p^(i+1) is log_p(|p^i Q| / |p^(i+1) Q|)
    counts = []
    for i in range(k):
        r = sizes[i] // sizes[i + 1]
        c = 0
        while r > 1:
            r //= p
            c += 1
        counts.append(c)
    out = []
    for i in range(k):
        exact = counts[i] - (counts[i + 1] if i + 1 < k else 0)
        out += [i + 1] * exact
    return tuple(sorted(out))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# --- acceptance reporting -------------------------------------------------------

ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
