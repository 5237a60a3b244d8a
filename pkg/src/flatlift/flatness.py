"""Ind-/pro-flatness, quasitrees, suspended crowns and Mitchell's criterion."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .crowns import CrownReport, connectedness_check
from .errors import BadParameter, CharacterizationDisagreement
from .poset import Poset, SubposetEmbedding, from_cover_relations


@dataclass
class FlatnessReport:
    ind_flat: bool
    pro_flat: bool
    failures: list[tuple[str, str, CrownReport]] = field(default_factory=list)

    @property
    def flat(self) -> bool:
        return self.ind_flat and self.pro_flat


def ind_crown_report(P: Poset, d: str) -> CrownReport:
    return connectedness_check(P.strict_down(d).ind_crown())


def pro_crown_report(P: Poset, d: str) -> CrownReport:
    return connectedness_check(P.strict_up(d).pro_crown())


def flatness_check(P: Poset) -> FlatnessReport:
    failures = []
    for d in P:
        rep = ind_crown_report(P, d)
        if not rep.one_connected:
            failures.append((d, "ind", rep))
    for d in P:
        rep = pro_crown_report(P, d)
        if not rep.one_connected:
            failures.append((d, "pro", rep))
    ind = not any(f[1] == "ind" for f in failures)
    pro = not any(f[1] == "pro" for f in failures)
    return FlatnessReport(ind, pro, failures)


def is_ind_flat(P: Poset) -> bool:
    return all(ind_crown_report(P, d).one_connected for d in P)


def is_pro_flat(P: Poset) -> bool:
    return all(pro_crown_report(P, d).one_connected for d in P)


# ---------------------------------------------------------------------------
# quasitrees


def _quasitree_by_intervals(P: Poset) -> bool:
    n = len(P)
    S = P.leq & ~np.eye(n, dtype=bool)
    L = P.leq
    for a in range(n):
        for b in range(n):
            inside = S[a, :] & S[:, b]
            idx = np.nonzero(inside)[0]
            sub = L[np.ix_(idx, idx)]
            if not (sub | sub.T).all():
                return False
    return True


def _quasitree_by_crowns(P: Poset) -> bool:
    return all(not P.strict_down(a).ind_crown().strict_relations() for a in P)


def quasitree_check(P: Poset) -> bool:
    """Every open interval is a chain; cross-checked against discreteness of
    the ind-crowns of all strict down-cones."""
    a = _quasitree_by_intervals(P)
    b = _quasitree_by_crowns(P)
    if a != b:
        raise CharacterizationDisagreement(f"intervals={a} crowns={b} on {P!r}")
    return a


# ---------------------------------------------------------------------------
# suspended crowns and full embeddings


def suspended_crown(n: int) -> Poset:
    """SC_n: bottom s, top t, and v_i below u_i and u_{i-1} for i in Z/n."""
    if n < 2:
        raise BadParameter("suspended crown needs n >= 2")
    names = ["s"] + [f"v{i}" for i in range(n)] + [f"u{i}" for i in range(n)] + ["t"]
    covers = []
    for i in range(n):
        covers += [("s", f"v{i}"), (f"v{i}", f"u{i}"), (f"v{i}", f"u{(i - 1) % n}"), (f"u{i}", "t")]
    return from_cover_relations(names, covers)


def _signature(P: Poset) -> np.ndarray:
    S = P.leq & ~np.eye(len(P), dtype=bool)
    return np.stack([S.sum(axis=0), S.sum(axis=1)], axis=1)


def iter_full_embeddings(S: Poset, P: Poset) -> Iterator[SubposetEmbedding]:
    """All full order embeddings of S into P, in deterministic order.

    Candidates are pruned by comparability degrees (below/above counts)
    before backtracking; an image element needs at least the degrees of its
    source element.
    """
    m, n = len(S), len(P)
    if m > n:
        return
    sig_s, sig_p = _signature(S), _signature(P)
    # high-degree elements first: they have the fewest candidates
    order = sorted(range(m), key=lambda i: -(sig_s[i, 0] + sig_s[i, 1]))
    cands = [np.nonzero((sig_p[:, 0] >= sig_s[i, 0]) & (sig_p[:, 1] >= sig_s[i, 1]))[0] for i in order]
    LS, LP = S.leq, P.leq
    assign = [-1] * m
    used = np.zeros(n, dtype=bool)

    def rec(depth):
        if depth == m:
            yield SubposetEmbedding(S, P, {S.elements[i]: P.elements[assign[i]] for i in range(m)}, True)
            return
        i = order[depth]
        for x in cands[depth]:
            if used[x]:
                continue
            ok = True
            for prev in order[:depth]:
                y = assign[prev]
                if LS[i, prev] != LP[x, y] or LS[prev, i] != LP[y, x]:
                    ok = False
                    break
            if not ok:
                continue
            assign[i] = x
            used[x] = True
            yield from rec(depth + 1)
            used[x] = False
            assign[i] = -1

    yield from rec(0)


def find_full_embedding(S: Poset, P: Poset) -> SubposetEmbedding | None:
    return next(iter_full_embeddings(S, P), None)


# ---------------------------------------------------------------------------
# Mitchell's criterion


@dataclass
class MitchellReport:
    dimension_le_2: bool
    witness: tuple[int, SubposetEmbedding, str] | None = None
    sc2_embeddings: int = 0
    sc2_without_mediator: int = 0

    @property
    def condition_ii_for_all_embeddings(self) -> bool:
        """Stricter reading of condition (ii): every SC_2 copy lacks a mediator."""
        return self.sc2_embeddings > 0 and self.sc2_without_mediator == self.sc2_embeddings


def _has_mediator(P: Poset, emb: SubposetEmbedding) -> bool:
    f = emb.mapping
    L = P.leq
    v0, v1, u0, u1 = (P.index(f[x]) for x in ("v0", "v1", "u0", "u1"))
    mask = L[v0, :] & L[v1, :] & L[:, u0] & L[:, u1]
    return bool(mask.any())


def mitchell_check(P: Poset) -> MitchellReport:
    """Mitchell's combinatorial criterion for cohomological dimension <= 2.

    Condition (i): SC_n embeds fully for some n >= 3. Condition (ii): some
    full copy of SC_2 has no d with v0, v1 <= d <= u0, u1.
    """
    witness = None
    for n in range(3, (len(P) - 2) // 2 + 1):
        emb = find_full_embedding(suspended_crown(n), P)
        if emb is not None:
            witness = (n, emb, "i")
            break
    total = 0
    bad = 0
    if len(P) >= 6:
        for emb in iter_full_embeddings(suspended_crown(2), P):
            total += 1
            if not _has_mediator(P, emb):
                bad += 1
                if witness is None:
                    witness = (2, emb, "ii")
    return MitchellReport(witness is None, witness, total, bad)
