"""Finite posets stored as closed order matrices."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BadParameter, CycleDetected, DuplicateName, UnknownName

CONE_MODES = ("down", "strict_down", "up", "strict_up")


class Poset:
    """A finite partial order on named elements.

    ``leq[i, j]`` is true iff ``elements[i] <= elements[j]``. Element order is
    the input order and every "pick an element" step in the package scans it.
    """

    __slots__ = ("elements", "leq", "_index", "_hash")

    def __init__(self, elements: Sequence[str], leq, *, check: bool = True):
        elements = tuple(str(e) for e in elements)
        leq = np.array(leq, dtype=bool).reshape(len(elements), len(elements))
        leq.setflags(write=False)
        index = {}
        for i, e in enumerate(elements):
            if e in index:
                raise DuplicateName(e)
            index[e] = i
        self.elements = elements
        self.leq = leq
        self._index = index
        self._hash = None
        if check:
            self._check()

    def _check(self):
        n = len(self.elements)
        L = self.leq
        if n and not L.diagonal().all():
            raise CycleDetected("order matrix is not reflexive")
        anti = L & L.T
        np.fill_diagonal(anti, False)
        if anti.any():
            i, j = map(int, np.argwhere(anti)[0])
            raise CycleDetected(f"{self.elements[i]} and {self.elements[j]} lie below each other")
        if n:
            li = L.astype(np.int64)
            if ((li @ li > 0) & ~L).any():
                raise CycleDetected("order matrix is not transitive")

    # -- basic queries --------------------------------------------------

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, name):
        return name in self._index

    def __eq__(self, other):
        if not isinstance(other, Poset):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.leq, other.leq)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.elements, self.leq.tobytes()))
        return self._hash

    def __repr__(self):
        rel = ", ".join(f"{a}<{b}" for a, b in self.covers())
        return f"Poset([{', '.join(self.elements)}]; {rel})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownName(name) from None

    def le(self, a: str, b: str) -> bool:
        return bool(self.leq[self.index(a), self.index(b)])

    def lt(self, a: str, b: str) -> bool:
        return a != b and self.le(a, b)

    def strict_relations(self) -> list[tuple[str, str]]:
        """All pairs a < b, ordered by (source, target) input position."""
        E = self.elements
        ii, jj = np.nonzero(self.leq & ~np.eye(len(E), dtype=bool))
        return [(E[i], E[j]) for i, j in zip(ii, jj)]

    def covers(self) -> list[tuple[str, str]]:
        """Hasse diagram edges, ordered like :meth:`strict_relations`."""
        L = self.leq.astype(np.int64)
        S = L - np.eye(len(self), dtype=np.int64)
        cover = (S > 0) & ~((S @ S) > 0)
        E = self.elements
        ii, jj = np.nonzero(cover)
        return [(E[i], E[j]) for i, j in zip(ii, jj)]

    def strict_below(self, p: str) -> list[str]:
        i = self.index(p)
        return [e for j, e in enumerate(self.elements) if j != i and self.leq[j, i]]

    def strict_above(self, p: str) -> list[str]:
        i = self.index(p)
        return [e for j, e in enumerate(self.elements) if j != i and self.leq[i, j]]

    # -- constructions --------------------------------------------------

    def full_subposet(self, subset: Iterable[str]) -> Poset:
        keep = set(subset)
        for s in keep:
            self.index(s)
        idx = [i for i, e in enumerate(self.elements) if e in keep]
        return Poset([self.elements[i] for i in idx], self.leq[np.ix_(idx, idx)], check=False)

    def without(self, *names: str) -> Poset:
        for s in names:
            self.index(s)
        drop = set(names)
        return self.full_subposet(e for e in self.elements if e not in drop)

    def opposite(self) -> Poset:
        return Poset(self.elements, self.leq.T, check=False)

    def cone(self, p: str, mode: str = "strict_down") -> tuple[Poset, SubposetEmbedding]:
        i = self.index(p)
        if mode == "down":
            mask = self.leq[:, i]
        elif mode == "strict_down":
            mask = self.leq[:, i].copy()
            mask[i] = False
        elif mode == "up":
            mask = self.leq[i, :]
        elif mode == "strict_up":
            mask = self.leq[i, :].copy()
            mask[i] = False
        else:
            raise BadParameter(f"unknown cone mode {mode!r}")
        sub = self.full_subposet(e for e, m in zip(self.elements, mask) if m)
        return sub, SubposetEmbedding.inclusion(sub, self, full=True)

    def down(self, p: str) -> Poset:
        return self.cone(p, "down")[0]

    def strict_down(self, p: str) -> Poset:
        return self.cone(p, "strict_down")[0]

    def up(self, p: str) -> Poset:
        return self.cone(p, "up")[0]

    def strict_up(self, p: str) -> Poset:
        return self.cone(p, "strict_up")[0]

    def maxima(self) -> list[str]:
        S = self.leq & ~np.eye(len(self), dtype=bool)
        return [e for e, row in zip(self.elements, S) if not row.any()]

    def minima(self) -> list[str]:
        S = self.leq & ~np.eye(len(self), dtype=bool)
        return [e for e, col in zip(self.elements, S.T) if not col.any()]

    def extrema(self, mode: str = "max") -> list[str]:
        if mode == "max":
            return self.maxima()
        if mode == "min":
            return self.minima()
        raise BadParameter(f"unknown extrema mode {mode!r}")

    def crown_of(self, mode: str = "ind") -> tuple[Poset, SubposetEmbedding]:
        """The ind-crown (or pro-crown) with its non-full order.

        Objects: for each pair of maxima p, q the maximal elements of
        ``down(p) & down(q)``. Order: r < s iff r < s in P, r is not maximal
        and s is maximal. The pro-crown is the dual construction.
        """
        if mode == "pro":
            crown, _ = self.opposite().crown_of("ind")
            crown = crown.opposite()
            return crown, SubposetEmbedding.inclusion(crown, self, full=False)
        if mode != "ind":
            raise BadParameter(f"unknown crown mode {mode!r}")
        L = self.leq
        n = len(self)
        maxi = [self.index(m) for m in self.maxima()]
        keep = np.zeros(n, dtype=bool)
        for a, b in itertools.combinations_with_replacement(maxi, 2):
            common = L[:, a] & L[:, b]
            # maximal elements of the common down-set
            sub = L[np.ix_(common, common)]
            members = np.nonzero(common)[0]
            for r, idx in enumerate(members):
                if sub[r].sum() == 1:
                    keep[idx] = True
        idx = np.nonzero(keep)[0]
        is_max = np.zeros(n, dtype=bool)
        is_max[maxi] = True
        rel = L[np.ix_(idx, idx)] & (~is_max[idx])[:, None] & is_max[idx][None, :]
        rel = rel | np.eye(len(idx), dtype=bool)
        crown = Poset([self.elements[i] for i in idx], rel, check=False)
        return crown, SubposetEmbedding.inclusion(crown, self, full=False)

    def ind_crown(self) -> Poset:
        return self.crown_of("ind")[0]

    def pro_crown(self) -> Poset:
        return self.crown_of("pro")[0]

    def relabel(self, mapping: Mapping[str, str]) -> Poset:
        return Poset([mapping[e] for e in self.elements], self.leq, check=False)


@dataclass(frozen=True)
class SubposetEmbedding:
    source: Poset
    target: Poset
    mapping: Mapping[str, str]
    full: bool

    @classmethod
    def inclusion(cls, sub: Poset, ambient: Poset, *, full: bool) -> SubposetEmbedding:
        return cls(sub, ambient, {e: e for e in sub.elements}, full)

    def image(self) -> set[str]:
        return set(self.mapping.values())

    def is_valid(self) -> bool:
        m = self.mapping
        if len(set(m.values())) != len(m) or set(m) != set(self.source.elements):
            return False
        for a in self.source:
            for b in self.source:
                s = self.source.le(a, b)
                t = self.target.le(m[a], m[b])
                if s and not t:
                    return False
                if self.full and t and not s:
                    return False
        return True


# ---------------------------------------------------------------------------
# constructors


def from_cover_relations(names: Sequence[str], covers: Iterable[tuple[str, str]]) -> Poset:
    """Reflexive-transitive closure of the given relations."""
    names = [str(n) for n in names]
    index = {}
    for i, n in enumerate(names):
        if n in index:
            raise DuplicateName(n)
        index[n] = i
    m = len(names)
    R = np.eye(m, dtype=bool)
    for a, b in covers:
        if a not in index:
            raise UnknownName(a)
        if b not in index:
            raise UnknownName(b)
        R[index[a], index[b]] = True
    R = transitive_closure(R)
    return Poset(names, R)


def transitive_closure(R) -> np.ndarray:
    R = np.array(R, dtype=bool)
    n = len(R)
    for j in range(n):
        R |= R[:, j][:, None] & R[j, :][None, :]
    return R


def chain(n: int) -> Poset:
    """Delta_n = {0 < 1 < ... < n}."""
    if n < 0:
        raise BadParameter("chain length must be >= 0")
    return Poset([str(i) for i in range(n + 1)], np.triu(np.ones((n + 1, n + 1), dtype=bool)))


def product(*factors: Poset) -> Poset:
    """Componentwise order; elements are named ``(a,b,...)``."""
    if not factors:
        return Poset(["()"], [[True]])
    tuples = list(itertools.product(*[range(len(f)) for f in factors]))
    names = ["(" + ",".join(f.elements[i] for f, i in zip(factors, t)) + ")" for t in tuples]
    n = len(tuples)
    L = np.ones((n, n), dtype=bool)
    for axis, f in enumerate(factors):
        col = np.array([t[axis] for t in tuples])
        L &= f.leq[np.ix_(col, col)]
    return Poset(names, L, check=False)


def set_name(s: Iterable[int]) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


def inclusion_poset(sets: Sequence[Iterable[int]], names: Sequence[str] | None = None) -> Poset:
    """Sets ordered by inclusion, named like ``{1,2}`` unless names are given."""
    sets = [frozenset(s) for s in sets]
    if names is None:
        names = [set_name(s) for s in sets]
    L = np.array([[a <= b for b in sets] for a in sets], dtype=bool).reshape(len(sets), len(sets))
    return Poset(names, L)


def powerset(m: int) -> Poset:
    """All subsets of {1..m} by inclusion, listed by size then lexicographically."""
    if m < 0:
        raise BadParameter("powerset size must be >= 0")
    sets = [c for r in range(m + 1) for c in itertools.combinations(range(1, m + 1), r)]
    return inclusion_poset(sets)


def antichain(n: int) -> Poset:
    return Poset([str(i) for i in range(n)], np.eye(n, dtype=bool))


def build(kind: str, *args) -> Poset:
    """Dispatch ``chain n | product P Q ... | powerset m | opposite P | full_subposet P S``."""
    if kind == "chain":
        return chain(int(args[0]))
    if kind == "product":
        return product(*args)
    if kind == "powerset":
        return powerset(int(args[0]))
    if kind == "opposite":
        return args[0].opposite()
    if kind == "full_subposet":
        return args[0].full_subposet(args[1])
    raise BadParameter(f"unknown construction {kind!r}")
