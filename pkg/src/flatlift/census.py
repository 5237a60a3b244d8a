"""Isomorphism classes of small posets and their classification.

Classes of size n are obtained from classes of size n-1 by adding a new
maximal element over an arbitrary order ideal, then deduplicated by a
canonical code (lexicographically least relation code over relabelings that
respect the (down-degree, up-degree) signature).
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .crowns import connectedness_check, is_crown
from .flatness import is_ind_flat, is_pro_flat, mitchell_check, quasitree_check
from .poset import Poset

# labeled poset counts, n = 0..6; n <= 5 is recomputed by the test-suite
LABELED_COUNTS = (1, 1, 3, 19, 219, 4231, 130023)
CLASS_COUNTS = (1, 1, 2, 5, 16, 63, 318, 2045)


def _cells(leq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    S = leq & ~np.eye(len(leq), dtype=bool)
    sig = list(zip(S.sum(axis=0).tolist(), S.sum(axis=1).tolist()))
    distinct = sorted(set(sig))
    ids = {s: i for i, s in enumerate(distinct)}
    cell_of_elem = np.array([ids[s] for s in sig], dtype=np.int64)
    return np.sort(cell_of_elem), cell_of_elem


def canonical_form(leq) -> tuple[int, np.ndarray]:
    """``(code, perm)``; ``leq[perm][:, perm]`` is the canonical matrix."""
    leq = np.asarray(leq, dtype=bool)
    cell_of_pos, cell_of_elem = _cells(leq)
    code, perm = kernels.canonical_code(leq.astype(np.int64), cell_of_pos, cell_of_elem)
    return int(code), np.asarray(perm, dtype=np.int64)


def canonical_key(leq) -> tuple[int, int]:
    return len(leq), canonical_form(leq)[0]


def order_ideals(leq: np.ndarray):
    """All down-closed subsets, as boolean masks."""
    n = len(leq)
    for bits in range(1 << n):
        mask = np.array([(bits >> i) & 1 for i in range(n)], dtype=bool)
        # closed: every element below a member is a member
        if not (leq[:, mask].any(axis=1) & ~mask).any():
            yield mask


def enumerate_classes(max_n: int) -> dict[int, list[np.ndarray]]:
    """Canonical order matrices of all posets with 1..max_n elements."""
    out: dict[int, list[np.ndarray]] = {0: [np.zeros((0, 0), dtype=bool)]}
    for n in range(1, max_n + 1):
        seen: dict[int, np.ndarray] = {}
        for Q in out[n - 1]:
            for mask in order_ideals(Q):
                L = np.zeros((n, n), dtype=bool)
                L[:n - 1, :n - 1] = Q
                L[:n - 1, n - 1] = mask
                L[n - 1, n - 1] = True
                code, perm = canonical_form(L)
                if code not in seen:
                    seen[code] = L[np.ix_(perm, perm)]
        out[n] = [seen[c] for c in sorted(seen)]
    return out


# ---------------------------------------------------------------------------
# independent oracle: labeled counts and automorphism groups


def labeled_posets(n: int):
    """All order matrices on {0..n-1}, built by inserting the last label
    with a compatible (down-set, up-set) pair."""
    if n == 0:
        yield np.zeros((0, 0), dtype=bool)
        return
    for Q in labeled_posets(n - 1):
        m = n - 1
        downs = list(order_ideals(Q))
        ups = [~d for d in downs]  # complements of ideals are filters
        for D in downs:
            for U in ups:
                if (D & U).any():
                    continue
                if not Q[np.ix_(D, U)].all():
                    continue
                L = np.zeros((n, n), dtype=bool)
                L[:m, :m] = Q
                L[:m, m] = D
                L[m, :m] = U
                L[m, m] = True
                yield L


def count_labeled(n: int) -> int:
    return sum(1 for _ in labeled_posets(n))


def automorphism_count(leq: np.ndarray) -> int:
    n = len(leq)
    if n == 0:
        return 1
    _, cell_of_elem = _cells(leq)
    count = 0
    for perm in itertools.permutations(range(n)):
        p = np.array(perm)
        if (cell_of_elem[p] != cell_of_elem).any():
            continue
        if np.array_equal(leq[np.ix_(p, p)], leq):
            count += 1
    return count


def labeled_from_classes(classes: list[np.ndarray]) -> int:
    return sum(math.factorial(len(L)) // automorphism_count(L) for L in classes)


# ---------------------------------------------------------------------------
# classification


@dataclass
class CensusRecord:
    n: int
    code: int
    leq: np.ndarray
    crown: bool
    one_connected: bool | None
    ind_flat: bool
    pro_flat: bool
    quasitree: bool
    mitchell_dim_le_2: bool

    @property
    def qumit0_candidate(self) -> bool:
        """Ind-flat yet failing Mitchell's criterion."""
        return self.ind_flat and not self.mitchell_dim_le_2

    def poset(self) -> Poset:
        return Poset([str(i) for i in range(self.n)], self.leq, check=False)


def classify(leq: np.ndarray) -> CensusRecord:
    P = Poset([str(i) for i in range(len(leq))], leq, check=False)
    crown = is_crown(P)
    return CensusRecord(
        n=len(P),
        code=canonical_form(leq)[0],
        leq=leq,
        crown=crown,
        one_connected=connectedness_check(P).one_connected if crown else None,
        ind_flat=is_ind_flat(P),
        pro_flat=is_pro_flat(P),
        quasitree=quasitree_check(P),
        mitchell_dim_le_2=mitchell_check(P).dimension_le_2,
    )


def run_census(max_n: int, jobs: int = 1) -> list[CensusRecord]:
    classes = enumerate_classes(max_n)
    todo = [L for n in range(1, max_n + 1) for L in classes[n]]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(classify, todo))
    return [classify(L) for L in todo]


@dataclass
class CensusSummary:
    n: int
    classes: int
    crowns: int
    one_connected_crowns: int
    ind_flat: int
    pro_flat: int
    flat: int
    quasitrees: int
    mitchell_le_2: int
    qumit0_candidates: int
    quasitree_not_flat: int


def summarize(records: list[CensusRecord]) -> list[CensusSummary]:
    out = []
    for n in sorted({r.n for r in records}):
        rs = [r for r in records if r.n == n]
        out.append(CensusSummary(
            n=n,
            classes=len(rs),
            crowns=sum(r.crown for r in rs),
            one_connected_crowns=sum(bool(r.one_connected) for r in rs),
            ind_flat=sum(r.ind_flat for r in rs),
            pro_flat=sum(r.pro_flat for r in rs),
            flat=sum(r.ind_flat and r.pro_flat for r in rs),
            quasitrees=sum(r.quasitree for r in rs),
            mitchell_le_2=sum(r.mitchell_dim_le_2 for r in rs),
            qumit0_candidates=sum(r.qumit0_candidate for r in rs),
            quasitree_not_flat=sum(r.quasitree and not (r.ind_flat and r.pro_flat) for r in rs),
        ))
    return out
