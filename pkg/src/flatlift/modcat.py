"""Finitely generated Z/p^k-modules with all short exact sequences pure.

An object is ``Z/p^e1 + ... + Z/p^er`` (a list of exponents in [1, k]); the
bijective objects are the free ones (every exponent equal to k). A morphism
``X -> Y`` is an integer matrix with one row per generator of X and one
column per generator of Y; column j is read modulo ``p^(e_j)`` of the target
and is stored reduced. Composition is written on the right:
``compose(f, g)`` means "first f, then g" and has matrix ``M_f @ M_g``.

Every categorical question asked by the lifting algorithms is turned into a
linear system over Z/p^k (:class:`HomSystem`) and settled with the Smith form
kernel.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import kernels
from .errors import BadParameter, IllTyped, NotFree, RingMismatch, ShapeMismatch


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class RingParams:
    p: int
    k: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise BadParameter(f"{self.p} is not prime")
        if self.k < 1:
            raise BadParameter("exponent cap k must be >= 1")
        if self.p**self.k >= kernels.MAX_MODULUS:
            raise BadParameter("p**k must stay below 2**31")

    @property
    def q(self) -> int:
        return self.p**self.k

    def __str__(self):
        return f"Z/{self.p}^{self.k}"


class ModObject:
    __slots__ = ("ring", "exponents", "_arr")

    def __init__(self, ring: RingParams, exponents: Iterable[int] = ()):
        exps = tuple(int(e) for e in exponents)
        for e in exps:
            if not 1 <= e <= ring.k:
                raise BadParameter(f"exponent {e} outside [1, {ring.k}]")
        self.ring = ring
        self.exponents = exps
        self._arr = np.array(exps, dtype=np.int64)

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def log_order(self) -> int:
        """log_p of the number of elements."""
        return sum(self.exponents)

    def is_free(self) -> bool:
        return all(e == self.ring.k for e in self.exponents)

    def is_zero(self) -> bool:
        return not self.exponents

    def __eq__(self, other):
        return isinstance(other, ModObject) and self.ring == other.ring and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.ring, self.exponents))

    def __repr__(self):
        if not self.exponents:
            return "0"
        p = self.ring.p
        return " + ".join(f"Z/{p**e}" for e in self.exponents)

    def invariants(self) -> tuple[int, ...]:
        return tuple(sorted(self.exponents))


def _column_moduli(target: ModObject) -> np.ndarray:
    return target.ring.p ** target._arr


class ModMorphism:
    """A module homomorphism; the matrix is normalised on construction."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: ModObject, target: ModObject, matrix=None, *, check: bool = True):
        if source.ring != target.ring:
            raise RingMismatch(f"{source.ring} vs {target.ring}")
        shape = (source.rank, target.rank)
        if matrix is None:
            M = np.zeros(shape, dtype=np.int64)
        else:
            M = np.array(matrix, dtype=np.int64)
            if M.size == 0:
                M = M.reshape(shape)
            if M.shape != shape:
                raise ShapeMismatch(f"matrix {M.shape} for Hom with shape {shape}")
        if M.size:
            M %= _column_moduli(target)[None, :]
        M.setflags(write=False)
        self.source = source
        self.target = target
        self.matrix = M
        if check:
            validate(self)

    @property
    def ring(self) -> RingParams:
        return self.source.ring

    def __eq__(self, other):
        return (isinstance(other, ModMorphism) and self.source == other.source
                and self.target == other.target and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def __repr__(self):
        return f"ModMorphism({self.source!r} -> {self.target!r}, {self.matrix.tolist()})"

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, negate(other))

    def __neg__(self):
        return negate(self)

    def __matmul__(self, other):
        return compose(self, other)

    def is_zero(self) -> bool:
        return not self.matrix.any()


# ---------------------------------------------------------------------------
# category structure


def required_divisibility(source: ModObject, target: ModObject) -> np.ndarray:
    """Exponent d[i, j]: entry (i, j) of any morphism is divisible by p^d."""
    return np.maximum(0, target._arr[None, :] - source._arr[:, None])


def matmul_mod(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """``A @ B mod q`` without int64 overflow."""
    inner = A.shape[1]
    if not (A.size and B.size):
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    if inner * (q - 1) ** 2 < 2**63:
        return (A @ B) % q
    return ((A.astype(object) @ B.astype(object)) % q).astype(np.int64)


def validate(f: ModMorphism) -> None:
    if not f.matrix.size:
        return
    p = f.ring.p
    need = p ** required_divisibility(f.source, f.target)
    bad = f.matrix % need != 0
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        raise IllTyped(
            f"entry ({i},{j}) = {f.matrix[i, j]} of {f.source!r} -> {f.target!r} "
            f"must be divisible by {need[i, j]}")


def zero_object(ring: RingParams) -> ModObject:
    return ModObject(ring, ())


def free(ring: RingParams, rank: int) -> ModObject:
    return ModObject(ring, (ring.k,) * rank)


def identity(X: ModObject) -> ModMorphism:
    return ModMorphism(X, X, np.eye(X.rank, dtype=np.int64), check=False)


def zero(X: ModObject, Y: ModObject) -> ModMorphism:
    return ModMorphism(X, Y, None, check=False)


def _same_ring(*objs: ModObject) -> None:
    rings = {o.ring for o in objs}
    if len(rings) > 1:
        raise RingMismatch(", ".join(map(str, rings)))


def compose(f: ModMorphism, g: ModMorphism) -> ModMorphism:
    """First ``f``, then ``g``."""
    if f.target != g.source:
        raise ShapeMismatch(f"cannot compose {f.target!r} with {g.source!r}")
    M = matmul_mod(f.matrix, g.matrix, f.ring.q)
    return ModMorphism(f.source, g.target, M, check=False)


def compose_all(*fs: ModMorphism) -> ModMorphism:
    out = fs[0]
    for g in fs[1:]:
        out = compose(out, g)
    return out


def add(f: ModMorphism, g: ModMorphism) -> ModMorphism:
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("adding morphisms with different source/target")
    return ModMorphism(f.source, f.target, f.matrix + g.matrix, check=False)


def negate(f: ModMorphism) -> ModMorphism:
    return ModMorphism(f.source, f.target, -f.matrix, check=False)


def scale(f: ModMorphism, c: int) -> ModMorphism:
    return ModMorphism(f.source, f.target, (f.matrix * (c % f.ring.q)) % f.ring.q, check=False)


def direct_sum(*objs: ModObject) -> ModObject:
    if not objs:
        raise BadParameter("direct_sum of nothing needs a ring; use zero_object")
    _same_ring(*objs)
    return ModObject(objs[0].ring, [e for o in objs for e in o.exponents])


def direct_sum_maps(*fs: ModMorphism) -> ModMorphism:
    """Block-diagonal sum of morphisms."""
    src = direct_sum(*[f.source for f in fs])
    tgt = direct_sum(*[f.target for f in fs])
    M = np.zeros((src.rank, tgt.rank), dtype=np.int64)
    r = c = 0
    for f in fs:
        M[r:r + f.source.rank, c:c + f.target.rank] = f.matrix
        r += f.source.rank
        c += f.target.rank
    return ModMorphism(src, tgt, M, check=False)


def fork(*fs: ModMorphism) -> ModMorphism:
    """``(f | g | ...)``: X -> Y + Z + ... from maps out of one source."""
    src = fs[0].source
    for f in fs:
        if f.source != src:
            raise ShapeMismatch("fork needs a common source")
    tgt = direct_sum(*[f.target for f in fs])
    M = np.hstack([f.matrix for f in fs]) if fs else np.zeros((src.rank, 0))
    return ModMorphism(src, tgt, M.reshape(src.rank, tgt.rank), check=False)


def merge(*fs: ModMorphism) -> ModMorphism:
    """``<f over g over ...>``: X + Y + ... -> Z from maps into one target."""
    tgt = fs[0].target
    for f in fs:
        if f.target != tgt:
            raise ShapeMismatch("merge needs a common target")
    src = direct_sum(*[f.source for f in fs])
    M = np.vstack([f.matrix for f in fs])
    return ModMorphism(src, tgt, M.reshape(src.rank, tgt.rank), check=False)


def injection(summands: Sequence[ModObject], i: int) -> ModMorphism:
    """Inclusion of the i-th summand into the direct sum."""
    total = direct_sum(*summands)
    off = sum(s.rank for s in summands[:i])
    M = np.zeros((summands[i].rank, total.rank), dtype=np.int64)
    M[:, off:off + summands[i].rank] = np.eye(summands[i].rank, dtype=np.int64)
    return ModMorphism(summands[i], total, M, check=False)


def projection(summands: Sequence[ModObject], i: int) -> ModMorphism:
    """Projection of the direct sum onto its i-th summand."""
    total = direct_sum(*summands)
    off = sum(s.rank for s in summands[:i])
    M = np.zeros((total.rank, summands[i].rank), dtype=np.int64)
    M[off:off + summands[i].rank, :] = np.eye(summands[i].rank, dtype=np.int64)
    return ModMorphism(total, summands[i], M, check=False)


def row_block(f: ModMorphism, summands: Sequence[ModObject], i: int) -> ModMorphism:
    """Restriction of ``f`` (out of a direct sum) to the i-th summand."""
    return compose(injection(summands, i), f)


def col_block(f: ModMorphism, summands: Sequence[ModObject], i: int) -> ModMorphism:
    """Component of ``f`` (into a direct sum) in the i-th summand."""
    return compose(f, projection(summands, i))


# ---------------------------------------------------------------------------
# normal form


@dataclass(frozen=True)
class NormalForm:
    diag_exponents: tuple[int, ...]
    left_transform: np.ndarray
    right_transform: np.ndarray


def normal_form(m, ring: RingParams) -> NormalForm:
    """Equivalent diagonal form over Z/p^k: ``left @ m @ right == diag(p^d)``.

    Exponent ``k`` on the diagonal stands for a zero entry.
    """
    m = np.asarray(m, dtype=np.int64)
    exps, U, V = kernels.snf_mod(m, ring.p, ring.k)
    return NormalForm(tuple(int(e) for e in exps), U, V)


def diagonal_matrix(nf: NormalForm, shape: tuple[int, int], ring: RingParams) -> np.ndarray:
    D = np.zeros(shape, dtype=np.int64)
    for t, e in enumerate(nf.diag_exponents):
        D[t, t] = ring.p**e % ring.q
    return D


# ---------------------------------------------------------------------------
# linear systems in Hom-groups


class HomSystem:
    """Linear equations in unknown morphisms.

    An equation is ``sum_t L_t @ X_t @ R_t == T`` with known ``L_t, R_t``
    (``None`` meaning identity) and a known morphism ``T``. Unknown entry
    (a, b) of X is written ``p^d[a,b] * y`` so divisibility holds
    automatically; each equation entry (i, j) is scaled by ``p^(k - e_j)``
    to live in Z/p^k.
    """

    def __init__(self, ring: RingParams):
        self.ring = ring
        self.unknowns: list[tuple[ModObject, ModObject]] = []
        self._offsets: list[int] = []
        self._nvars = 0
        self._blocks: list[tuple[int, int, np.ndarray]] = []  # (eq offset, var offset, coeffs)
        self._rhs: list[np.ndarray] = []
        self._neq = 0

    def unknown(self, source: ModObject, target: ModObject) -> int:
        _same_ring(source, target)
        self.unknowns.append((source, target))
        self._offsets.append(self._nvars)
        self._nvars += source.rank * target.rank
        return len(self.unknowns) - 1

    def equation(self, terms, rhs: ModMorphism) -> None:
        """``terms`` is a list of ``(left, handle, right)`` or ``(sign, left, handle, right)``."""
        ring = self.ring
        p, k, q = ring.p, ring.k, ring.q
        S, T = rhs.source, rhs.target
        scale_cols = p ** (k - T._arr)
        off = self._neq
        for term in terms:
            if len(term) == 3:
                sign, (left, h, right) = 1, term
            else:
                sign, left, h, right = term
            A, B = self.unknowns[h]
            Lm = np.eye(A.rank, dtype=np.int64) if left is None else left.matrix
            Rm = np.eye(B.rank, dtype=np.int64) if right is None else right.matrix
            lsrc = A if left is None else left.source
            rtgt = B if right is None else right.target
            lmid = A if left is None else left.target
            rmid = B if right is None else right.source
            if lsrc != S or rtgt != T or lmid != A or rmid != B:
                raise ShapeMismatch("equation term does not match its right-hand side")
            if not (S.rank and T.rank and A.rank and B.rank):
                continue
            pd = p ** required_divisibility(A, B)
            W = (pd[:, :, None] * Rm[None, :, :]) % q            # (a, b, j)
            W = (W * scale_cols[None, None, :]) % q
            C = (Lm[:, None, :, None] * np.transpose(W, (2, 0, 1))[None, :, :, :]) % q  # (i, j, a, b)
            if sign != 1:
                C = (sign * C) % q
            self._blocks.append((off, self._offsets[h], C.reshape(S.rank * T.rank, A.rank * B.rank)))
        self._rhs.append(((rhs.matrix * scale_cols[None, :]) % q).reshape(-1))
        self._neq += S.rank * T.rank

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        M = np.zeros((self._neq, self._nvars), dtype=np.int64)
        for r, c, C in self._blocks:
            M[r:r + C.shape[0], c:c + C.shape[1]] = (M[r:r + C.shape[0], c:c + C.shape[1]] + C) % self.ring.q
        b = np.concatenate(self._rhs) if self._rhs else np.zeros(0, dtype=np.int64)
        return M, b

    def solve(self) -> list[ModMorphism] | None:
        """Lexicographically least solution (unknowns in order, row-major), or None."""
        M, b = self.matrix()
        y = solve_mod(M, b, self.ring)
        if y is None:
            return None
        out = []
        for (A, B), off in zip(self.unknowns, self._offsets):
            Y = y[off:off + A.rank * B.rank].reshape(A.rank, B.rank)
            pd = self.ring.p ** required_divisibility(A, B)
            out.append(ModMorphism(A, B, (pd * Y) % self.ring.q, check=False))
        return out


def _solve_block(M, b, ring):
    p, k, q = ring.p, ring.k, ring.q
    m, n = M.shape
    exps, U, V = kernels.snf_mod(M, p, k)
    c = matmul_mod(U, b.reshape(-1, 1), q).ravel() if m else np.zeros(0, dtype=np.int64)
    r = len(exps)
    if m > r and c[r:].any():
        return None
    w = np.zeros(n, dtype=np.int64)
    gens = []
    for t in range(r):
        e = int(exps[t])
        if c[t] % p**e if e < k else c[t]:
            return None
        if e < k:
            w[t] = c[t] // p**e
        if e > 0:
            gens.append(V[:, t] * p ** (k - e) % q)
    for t in range(r, n):
        gens.append(V[:, t])
    z0 = matmul_mod(V, w.reshape(-1, 1), q).ravel()
    G = np.array(gens, dtype=np.int64).reshape(len(gens), n)
    return kernels.lexmin_coset(z0, G, p, k)


def solve_mod(M: np.ndarray, b: np.ndarray, ring: RingParams) -> np.ndarray | None:
    """Least solution of ``M y = b`` over Z/p^k, or None.

    The system is split into independent blocks (connected components of its
    sparsity pattern) first; the lexicographic minimum of a product of
    solution sets is taken blockwise.
    """
    m, n = M.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64) if not (b % ring.q).any() else None
    nz_r, nz_c = np.nonzero(M)
    graph = coo_matrix((np.ones(len(nz_r)), (nz_r, m + nz_c)), shape=(m + n, m + n))
    ncomp, labels = connected_components(graph, directed=False)
    y = np.zeros(n, dtype=np.int64)
    row_lab, col_lab = labels[:m], labels[m:]
    for comp in range(ncomp):
        rows = np.nonzero(row_lab == comp)[0]
        cols = np.nonzero(col_lab == comp)[0]
        if cols.size == 0:
            if (b[rows] % ring.q).any():
                return None
            continue
        if rows.size == 0:
            continue
        sub = _solve_block(M[np.ix_(rows, cols)], b[rows], ring)
        if sub is None:
            return None
        y[cols] = sub
    return y


# ---------------------------------------------------------------------------
# solving, exactness, stable category


def solve(f: ModMorphism, target_map: ModMorphism, side: str = "through_source") -> ModMorphism | None:
    """Find x with ``compose(f, x) == target_map`` (through_source) or
    ``compose(x, f) == target_map`` (through_target); least solution wins."""
    sys = HomSystem(f.ring)
    if side == "through_source":
        if f.source != target_map.source:
            raise ShapeMismatch("f and target_map must share their source")
        x = sys.unknown(f.target, target_map.target)
        sys.equation([(f, x, None)], target_map)
    elif side == "through_target":
        if f.target != target_map.target:
            raise ShapeMismatch("f and target_map must share their target")
        x = sys.unknown(target_map.source, f.source)
        sys.equation([(None, x, f)], target_map)
    else:
        raise BadParameter(f"unknown side {side!r}")
    sol = sys.solve()
    return None if sol is None else sol[0]


@dataclass(frozen=True)
class Cokernel:
    object: ModObject
    projection: ModMorphism


def cokernel(f: ModMorphism) -> Cokernel:
    """Target modulo image, presented in sorted cyclic normal form."""
    ring = f.ring
    p, k, q = ring.p, ring.k, ring.q
    Y = f.target
    m = Y.rank
    if m == 0:
        return Cokernel(Y, identity(Y))
    R = np.vstack([f.matrix, np.diag(p**Y._arr % q)]).astype(np.int64)
    exps, U, V = kernels.snf_mod(R, p, k)
    keep = [t for t in range(m) if exps[t] > 0]
    Q = ModObject(ring, [int(exps[t]) for t in keep])
    proj = ModMorphism(Y, Q, V[:, keep], check=False)
    return Cokernel(Q, proj)


def is_epi(f: ModMorphism) -> bool:
    return cokernel(f).object.is_zero()


def is_mono(f: ModMorphism) -> bool:
    """Injective iff |source| * |coker| == |target|."""
    return f.source.log_order + cokernel(f).object.log_order == f.target.log_order


def is_iso(f: ModMorphism) -> bool:
    return f.source.log_order == f.target.log_order and is_epi(f)


@dataclass(frozen=True)
class Pushout:
    object: ModObject
    in_left: ModMorphism
    in_right: ModMorphism


def pushout(f: ModMorphism, g: ModMorphism) -> Pushout:
    """Pushout of ``L <-f- W -g-> Y`` as the cokernel of ``(f | -g)``."""
    if f.source != g.source:
        raise ShapeMismatch("pushout legs need a common source")
    L, Y = f.target, g.target
    ck = cokernel(fork(f, negate(g)))
    return Pushout(ck.object, row_block(ck.projection, [L, Y], 0), row_block(ck.projection, [L, Y], 1))


def bijective_embedding(X: ModObject) -> tuple[ModObject, ModMorphism]:
    """``(N, iota)`` with ``iota = canonical_embedding(X)``."""
    iota = canonical_embedding(X)
    return iota.target, iota


def canonical_embedding(X: ModObject) -> ModMorphism:
    """Canonical pure mono ``X -> free``: generator i goes to p^(k - e_i)."""
    ring = X.ring
    N = free(ring, X.rank)
    M = np.diag(ring.p ** (ring.k - X._arr)).astype(np.int64).reshape(X.rank, X.rank)
    return ModMorphism(X, N, M, check=False)


def stably_zero_witness(f: ModMorphism) -> ModMorphism | None:
    """``h`` with ``compose(canonical_embedding(X), h) == f``, or None.

    The canonical embedding is diagonal, so the factorisation is entrywise:
    row i must be divisible by p^(k - e_i) in each target coordinate.
    """
    X, Y = f.source, f.target
    ring = X.ring
    p, k = ring.p, ring.k
    N = free(ring, X.rank)
    if not (X.rank and Y.rank):
        return zero(N, Y)
    s = (k - X._arr)[:, None]                  # shift per row
    b = Y._arr[None, :]
    M = f.matrix
    tight = s >= b                             # then f_ij must vanish
    if (M[np.broadcast_to(tight, M.shape)] != 0).any():
        return None
    ps = p ** np.minimum(s, b)
    if (M % ps != 0).any():
        return None
    H = np.where(tight, 0, (M // ps) % (p ** np.maximum(b - s, 0)))
    return ModMorphism(N, Y, H, check=False)


def is_stably_zero(f: ModMorphism) -> ModMorphism | None:
    """Witness ``h`` (truthy) when ``f`` factors through a free module, else None."""
    return stably_zero_witness(f)


def is_stable_iso(f: ModMorphism) -> bool:
    """Stable iso iff the cone of ``(f | iota_X)`` is free."""
    return cokernel(fork(f, canonical_embedding(f.source))).object.is_free()


@dataclass(frozen=True)
class StableIsoWitness:
    inverse: ModMorphism
    h1: ModMorphism
    h2: ModMorphism


def stable_iso_witness(f: ModMorphism) -> StableIsoWitness | None:
    """Solve ``f g - 1 = iota_X h1`` and ``g f - 1 = iota_Y h2`` simultaneously."""
    X, Y = f.source, f.target
    iX, iY = canonical_embedding(X), canonical_embedding(Y)
    sys = HomSystem(f.ring)
    g = sys.unknown(Y, X)
    h1 = sys.unknown(iX.target, X)
    h2 = sys.unknown(iY.target, Y)
    sys.equation([(f, g, None), (-1, iX, h1, None)], identity(X))
    sys.equation([(None, g, f), (-1, iY, h2, None)], identity(Y))
    sol = sys.solve()
    if sol is None:
        return None
    return StableIsoWitness(*sol)


def inverse(f: ModMorphism) -> ModMorphism:
    if not is_iso(f):
        raise BadParameter("morphism is not invertible")
    return solve(f, identity(f.source), "through_source")


def require_free(N: ModObject) -> None:
    if not N.is_free():
        raise NotFree(repr(N))


# ---------------------------------------------------------------------------
# duality Hom(-, Z/p^k)


def dual_object(X: ModObject) -> ModObject:
    return X


def dual(f: ModMorphism) -> ModMorphism:
    """The transpose under the self-duality of Z/p^k-mod.

    Entry (j, i) of the dual is ``m_ij * p^(a_i - b_j)`` for
    ``f: (+) Z/p^a_i -> (+) Z/p^b_j``; composition order reverses.
    """
    X, Y = f.source, f.target
    p = f.ring.p
    if not (X.rank and Y.rank):
        return zero(Y, X)
    d = X._arr[:, None] - Y._arr[None, :]
    M = f.matrix
    up = M * p ** np.maximum(d, 0)
    down = M // p ** np.maximum(-d, 0)
    return ModMorphism(Y, X, np.where(d >= 0, up, down).T, check=False)


def random_morphism(X: ModObject, Y: ModObject, rng: np.random.Generator) -> ModMorphism:
    ring = X.ring
    if not (X.rank and Y.rank):
        return zero(X, Y)
    d = required_divisibility(X, Y)
    free_part = rng.integers(0, ring.q, size=(X.rank, Y.rank))
    return ModMorphism(X, Y, free_part * ring.p**d, check=False)


def random_automorphism(X: ModObject, rng: np.random.Generator) -> ModMorphism:
    while True:
        f = random_morphism(X, X, rng)
        if is_iso(f):
            return f
