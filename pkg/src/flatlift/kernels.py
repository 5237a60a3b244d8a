"""Hot integer kernels.

Every kernel has two implementations: a loop form compiled by numba and a
vectorised numpy form. ``flatlift._backend.USE_NUMBA`` picks the one bound to
the public name; both stay importable (``*_jit`` / ``*_numpy``) so tests and
the benchmark can compare them.

All modular kernels work over Z/q with q = p**k < 2**31, so a product of two
reduced entries fits in int64.
"""
import itertools

import numpy as np

from ._backend import USE_NUMBA, njit

MAX_MODULUS = 2**31


# ---------------------------------------------------------------------------
# scalar helpers (shared by the numba kernels)


@njit
def _valuation(x, p, k):
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@njit
def _inverse_mod(u, q):
    # extended Euclid; u must be a unit mod q
    a, b = u % q, q
    x0, x1 = 1, 0
    while b != 0:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
    return x0 % q


def _valuations_numpy(block, p, k):
    vals = np.zeros(block.shape, dtype=np.int64)
    pe = 1
    for _ in range(k):
        pe *= p
        vals += (block % pe == 0)
    return vals


# ---------------------------------------------------------------------------
# Smith normal form over Z/p^k


@njit
def _snf_loop(a, p, k):
    q = p**k
    m, n = a.shape
    A = a.copy() % q
    U = np.eye(m, dtype=np.int64)
    V = np.eye(n, dtype=np.int64)
    r = min(m, n)
    exps = np.full(r, k, dtype=np.int64)
    for t in range(r):
        best_v = k
        bi = -1
        bj = -1
        for i in range(t, m):
            for j in range(t, n):
                x = A[i, j]
                if x != 0:
                    v = _valuation(x, p, k)
                    if v < best_v:
                        best_v = v
                        bi = i
                        bj = j
            if best_v == 0:
                break
        if bi < 0:
            break
        if bi != t:
            for j in range(n):
                A[t, j], A[bi, j] = A[bi, j], A[t, j]
            for j in range(m):
                U[t, j], U[bi, j] = U[bi, j], U[t, j]
        if bj != t:
            for i in range(m):
                A[i, t], A[i, bj] = A[i, bj], A[i, t]
            for i in range(n):
                V[i, t], V[i, bj] = V[i, bj], V[i, t]
        pv = p**best_v
        inv = _inverse_mod(A[t, t] // pv, q)
        for j in range(n):
            A[t, j] = A[t, j] * inv % q
        for j in range(m):
            U[t, j] = U[t, j] * inv % q
        for i in range(t + 1, m):
            if A[i, t] != 0:
                f = A[i, t] // pv
                for j in range(n):
                    A[i, j] = (A[i, j] - f * A[t, j]) % q
                for j in range(m):
                    U[i, j] = (U[i, j] - f * U[t, j]) % q
        for j in range(t + 1, n):
            if A[t, j] != 0:
                f = A[t, j] // pv
                for i in range(m):
                    A[i, j] = (A[i, j] - f * A[i, t]) % q
                for i in range(n):
                    V[i, j] = (V[i, j] - f * V[i, t]) % q
        exps[t] = best_v
    return exps, U, V


def _snf_numpy(a, p, k):
    q = p**k
    m, n = a.shape
    A = np.asarray(a, dtype=np.int64) % q
    U = np.eye(m, dtype=np.int64)
    V = np.eye(n, dtype=np.int64)
    r = min(m, n)
    exps = np.full(r, k, dtype=np.int64)
    for t in range(r):
        block = A[t:, t:]
        vals = _valuations_numpy(block, p, k)
        flat = int(np.argmin(vals))
        best_v = int(vals.flat[flat])
        if best_v >= k:
            break
        bi, bj = divmod(flat, block.shape[1])
        bi += t
        bj += t
        A[[t, bi]] = A[[bi, t]]
        U[[t, bi]] = U[[bi, t]]
        A[:, [t, bj]] = A[:, [bj, t]]
        V[:, [t, bj]] = V[:, [bj, t]]
        pv = p**best_v
        inv = pow(int(A[t, t] // pv), -1, q)
        A[t] = A[t] * inv % q
        U[t] = U[t] * inv % q
        f = A[t + 1:, t] // pv
        A[t + 1:] = (A[t + 1:] - np.outer(f, A[t]) % q) % q
        U[t + 1:] = (U[t + 1:] - np.outer(f, U[t]) % q) % q
        g = A[t, t + 1:] // pv
        A[:, t + 1:] = (A[:, t + 1:] - np.outer(A[:, t], g) % q) % q
        V[:, t + 1:] = (V[:, t + 1:] - np.outer(V[:, t], g) % q) % q
        exps[t] = best_v
    return exps, U, V


# ---------------------------------------------------------------------------
# lexicographically least element of a coset z0 + rowspan(G) over Z/p^k
# (interleaved Howell-form construction)


@njit
def _lexmin_loop(z0, G, p, k):
    q = p**k
    g, n = G.shape
    W = np.zeros((g + n, n), dtype=np.int64)
    for i in range(g):
        for j in range(n):
            W[i, j] = G[i, j] % q
    nw = g
    active = np.ones(g + n, dtype=np.bool_)
    z = z0.copy() % q
    for j in range(n):
        best = -1
        bv = k
        for r in range(nw):
            if active[r] and W[r, j] != 0:
                v = _valuation(W[r, j], p, k)
                if v < bv:
                    bv = v
                    best = r
        if best < 0:
            continue
        pv = p**bv
        inv = _inverse_mod(W[best, j] // pv, q)
        for c in range(n):
            W[best, c] = W[best, c] * inv % q
        active[best] = False
        for r in range(nw):
            if active[r] and W[r, j] != 0:
                f = W[r, j] // pv
                for c in range(n):
                    W[r, c] = (W[r, c] - f * W[best, c]) % q
        if bv > 0:
            s = p ** (k - bv)
            for c in range(n):
                W[nw, c] = W[best, c] * s % q
            nw += 1
        f = z[j] // pv
        if f != 0:
            for c in range(n):
                z[c] = (z[c] - f * W[best, c]) % q
    return z


def _lexmin_numpy(z0, G, p, k):
    q = p**k
    g, n = G.shape
    W = np.zeros((g + n, n), dtype=np.int64)
    W[:g] = np.asarray(G, dtype=np.int64) % q
    nw = g
    active = np.zeros(g + n, dtype=bool)
    active[:g] = True
    z = np.asarray(z0, dtype=np.int64) % q
    for j in range(n):
        col = W[:nw, j]
        cand = np.nonzero(active[:nw] & (col != 0))[0]
        if cand.size == 0:
            continue
        vals = _valuations_numpy(col[cand], p, k)
        best = int(cand[int(np.argmin(vals))])
        bv = int(vals.min())
        pv = p**bv
        inv = pow(int(W[best, j] // pv), -1, q)
        W[best] = W[best] * inv % q
        active[best] = False
        rows = np.nonzero(active[:nw] & (W[:nw, j] != 0))[0]
        if rows.size:
            f = W[rows, j] // pv
            W[rows] = (W[rows] - np.outer(f, W[best]) % q) % q
        if bv > 0:
            W[nw] = W[best] * p ** (k - bv) % q
            active[nw] = True
            nw += 1
        f = int(z[j] // pv)
        if f:
            z = (z - f * W[best]) % q
    return z


# ---------------------------------------------------------------------------
# exact rank over Q (fraction-free Bareiss elimination)


@njit
def _rank_loop(a):
    m, n = a.shape
    A = a.copy()
    prev = 1
    rank = 0
    row = 0
    for col in range(n):
        if row >= m:
            break
        piv = -1
        for i in range(row, m):
            if A[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            for j in range(n):
                A[row, j], A[piv, j] = A[piv, j], A[row, j]
        for i in range(row + 1, m):
            for j in range(col + 1, n):
                A[i, j] = (A[row, col] * A[i, j] - A[i, col] * A[row, j]) // prev
            A[i, col] = 0
        prev = A[row, col]
        row += 1
        rank += 1
    return rank


def _rank_numpy(a):
    # object dtype keeps Python integers, so no overflow at any size
    A = np.array(a, dtype=object)
    m, n = A.shape
    prev = 1
    row = 0
    for col in range(n):
        if row >= m:
            break
        nz = np.nonzero(A[row:, col] != 0)[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            A[[row, piv]] = A[[piv, row]]
        below = A[row + 1:]
        below[:, col + 1:] = (A[row, col] * below[:, col + 1:]
                              - np.outer(below[:, col], A[row, col + 1:])) // prev
        below[:, col] = 0
        prev = A[row, col]
        row += 1
    return row


# ---------------------------------------------------------------------------
# canonical code of a finite relation under cell-respecting relabelings
#
# Positions are grouped into cells (cell_of_pos is non-decreasing); a
# relabeling puts an element of cell c at each position of cell c. The code
# lists, for t = 0..n-1 and s < t, the bits leq[s,t], leq[t,s] of the
# relabeled matrix, most significant first. The minimum over all allowed
# relabelings is an isomorphism invariant when the cells are.


@njit
def _canon_loop(leq, cell_of_pos, cell_of_elem):
    n = leq.shape[0]
    total = n * (n - 1)
    perm = np.full(n, -1, dtype=np.int64)
    best_perm = np.arange(n)
    used = np.zeros(n, dtype=np.bool_)
    nxt = np.zeros(n + 1, dtype=np.int64)
    code = np.zeros(n + 1, dtype=np.int64)
    best = np.int64(0)
    have_best = False
    if n == 0:
        return best, best_perm
    t = 0
    while True:
        if t == n:
            c = code[n]
            if (not have_best) or c < best:
                best = c
                have_best = True
                for i in range(n):
                    best_perm[i] = perm[i]
            t -= 1
            used[perm[t]] = False
            continue
        e = nxt[t]
        found = False
        while e < n:
            if (not used[e]) and cell_of_elem[e] == cell_of_pos[t]:
                found = True
                break
            e += 1
        if not found:
            if t == 0:
                break
            t -= 1
            used[perm[t]] = False
            continue
        nxt[t] = e + 1
        c = code[t]
        for s in range(t):
            c = (c << 2) | (np.int64(leq[perm[s], e]) << 1) | np.int64(leq[e, perm[s]])
        if have_best:
            nb = t * (t + 1)
            if c > (best >> (total - nb)):
                continue
        perm[t] = e
        used[e] = True
        code[t + 1] = c
        t += 1
        nxt[t] = 0
    return best, best_perm


def _canon_numpy(leq, cell_of_pos, cell_of_elem):
    n = leq.shape[0]
    if n == 0:
        return np.int64(0), np.arange(0)
    leq = np.asarray(leq, dtype=np.int64)
    cells = sorted(set(int(c) for c in cell_of_pos))
    blocks = []
    for c in cells:
        members = [e for e in range(n) if cell_of_elem[e] == c]
        blocks.append(np.array(list(itertools.permutations(members)), dtype=np.int64))
    perms = blocks[0]
    for b in blocks[1:]:
        left = np.repeat(perms, len(b), axis=0)
        right = np.tile(b, (len(perms), 1))
        perms = np.hstack([left, right])
    codes = np.zeros(len(perms), dtype=np.int64)
    for t in range(n):
        for s in range(t):
            codes = (codes << 2) | (leq[perms[:, s], perms[:, t]] << 1) | leq[perms[:, t], perms[:, s]]
    i = int(np.argmin(codes))
    return codes[i], perms[i]


# ---------------------------------------------------------------------------
# public bindings

snf_jit = _snf_loop
snf_numpy = _snf_numpy
lexmin_jit = _lexmin_loop
lexmin_numpy = _lexmin_numpy
rank_jit = _rank_loop
rank_numpy = _rank_numpy
canon_jit = _canon_loop
canon_numpy = _canon_numpy

if USE_NUMBA:
    _snf, _lexmin, _rank, _canon = _snf_loop, _lexmin_loop, _rank_loop, _canon_loop
else:
    _snf, _lexmin, _rank, _canon = _snf_numpy, _lexmin_numpy, _rank_numpy, _canon_numpy


def snf_mod(a, p, k):
    """Smith form over Z/p^k: returns ``(exps, U, V)`` with ``U a V`` diagonal.

    The diagonal is ``p**exps[t]`` (exponent ``k`` meaning zero), ascending.
    """
    a = np.ascontiguousarray(a, dtype=np.int64).reshape(np.shape(a))
    return _snf(a, p, k)


def lexmin_coset(z0, gens, p, k):
    """Least element (entrywise lexicographic) of ``z0 + rowspan(gens)`` mod p^k."""
    z0 = np.ascontiguousarray(z0, dtype=np.int64)
    gens = np.ascontiguousarray(gens, dtype=np.int64).reshape(-1, z0.shape[0])
    return _lexmin(z0, gens, p, k)


def rank_q(a):
    """Rank over the rationals of a small integer matrix."""
    a = np.ascontiguousarray(a, dtype=np.int64).reshape(np.shape(a))
    if a.size == 0:
        return 0
    return int(_rank(a))


def canonical_code(leq, cell_of_pos, cell_of_elem):
    """Minimal relation code under cell-respecting relabelings; see module notes."""
    leq = np.ascontiguousarray(leq, dtype=np.int64)
    return _canon(leq, np.ascontiguousarray(cell_of_pos, dtype=np.int64),
                  np.ascontiguousarray(cell_of_elem, dtype=np.int64))
