"""Crowns and their componentwise 1-connectedness.

Three independent deciders are run on every query and must agree:

* rank: the boundary map (c -> d) |-> d - c is injective over Q;
* peeling: repeatedly delete a maximal element with at most one element
  below it, or a minimal element with at most one element above it;
* forest: the comparability graph has no cycle.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import MethodDisagreement, NotACrown
from .kernels import rank_q
from .poset import Poset


def is_crown(P: Poset) -> bool:
    """True iff there is no chain c < c' < c''."""
    S = (P.leq & ~np.eye(len(P), dtype=bool)).astype(np.int64)
    return not (S @ S).any()


@dataclass(frozen=True)
class BoundaryMatrix:
    crown: Poset
    rows: list[tuple[str, str]]
    cols: list[str]
    entries: np.ndarray


def boundary_matrix(C: Poset) -> BoundaryMatrix:
    if not is_crown(C):
        raise NotACrown(repr(C))
    rows = C.strict_relations()
    cols = list(C.elements)
    M = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, (c, d) in enumerate(rows):
        M[r, C.index(c)] = -1
        M[r, C.index(d)] = 1
    return BoundaryMatrix(C, rows, cols, M)


@dataclass
class CrownReport:
    is_crown: bool
    one_connected: bool
    kernel_dim: int
    peel_sequence: list[tuple[str, str]] | None = None
    cycle_witness: list[int] | None = None
    boundary: BoundaryMatrix | None = field(default=None, repr=False)


def peel(C: Poset) -> list[tuple[str, str]] | None:
    """Peel sequence (element, case) or None when peeling gets stuck.

    Cases: ``"i"`` a maximal element with one element below, ``"ii"`` a
    minimal element with one element above, ``"isolated"`` no neighbours.
    Elements are scanned in input order; case i wins over case ii.
    """
    names = list(C.elements)
    S = C.leq & ~np.eye(len(C), dtype=bool)
    alive = np.ones(len(C), dtype=bool)
    out = []
    for _ in range(len(names)):
        picked = None
        for i in np.nonzero(alive)[0]:
            below = int((S[:, i] & alive).sum())
            above = int((S[i, :] & alive).sum())
            if above == 0 and below == 0:
                picked = (i, "isolated")
            elif above == 0 and below == 1:
                picked = (i, "i")
            elif below == 0 and above == 1:
                picked = (i, "ii")
            if picked:
                break
        if picked is None:
            return None
        i, tag = picked
        alive[i] = False
        out.append((names[i], tag))
    return out


def is_forest(C: Poset) -> bool:
    parent = list(range(len(C)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in C.strict_relations():
        ra, rb = find(C.index(a)), find(C.index(b))
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def left_kernel_basis(M: np.ndarray) -> list[list[int]]:
    """Integer basis (content 1, first nonzero entry positive) of {w : w M = 0}."""
    rows, cols = M.shape
    # reduced row echelon form of M^T over Q; kernel of M^T as columns
    A = [[Fraction(int(M[r, c])) for r in range(rows)] for c in range(cols)]
    pivots = []
    lead = 0
    for col in range(rows):
        piv = next((i for i in range(lead, cols) if A[i][col] != 0), None)
        if piv is None:
            continue
        A[lead], A[piv] = A[piv], A[lead]
        pv = A[lead][col]
        A[lead] = [x / pv for x in A[lead]]
        for i in range(cols):
            if i != lead and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[lead])]
        pivots.append(col)
        lead += 1
    free = [c for c in range(rows) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * rows
        v[fcol] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -A[r][fcol]
        den = 1
        for x in v:
            den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in v]
        g = 0
        for x in ints:
            g = gcd(g, abs(x))
        ints = [x // g for x in ints]
        first = next(x for x in ints if x)
        if first < 0:
            ints = [-x for x in ints]
        basis.append(ints)
    return basis


def connectedness_check(C: Poset) -> CrownReport:
    """Decide componentwise 1-connectedness by all three methods."""
    bm = boundary_matrix(C)
    nrel = len(bm.rows)
    rank = rank_q(bm.entries) if nrel else 0
    by_rank = rank == nrel
    seq = peel(C)
    by_peel = seq is not None
    by_forest = is_forest(C)
    if not (by_rank == by_peel == by_forest):
        raise MethodDisagreement(
            f"rank={by_rank} peel={by_peel} forest={by_forest} on {C!r}")
    witness = None
    if not by_rank:
        basis = left_kernel_basis(bm.entries)
        witness = basis[0]
        if any(x for x in np.asarray(witness) @ bm.entries):
            raise MethodDisagreement("kernel witness does not annihilate the boundary map")
    return CrownReport(True, by_rank, nrel - rank, seq, witness, bm)


def one_connected(C: Poset) -> bool:
    return connectedness_check(C).one_connected
