"""Linear algebra over Z/p^K and F_p.

Finite abelian p-groups are handled as ``⊕ Z/p^{a_i}`` with an exponent vector
``a``.  Every such group embeds into the free module ``(Z/p^K)^L`` (K >= max a)
via ``x_i -> p^(K - a_i) x_i``; kernels, images, subgroups and quotients are
then computed with a Smith normal form over the local ring Z/p^K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def valuation(x: int, p: int, K: int) -> int:
    """p-adic valuation of a residue mod p^K, with v(0) = K."""
    x %= p**K
    if x == 0:
        return K
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def valuations(arr: np.ndarray, p: int, K: int) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.int64) % (p**K)
    out = np.full(arr.shape, K, dtype=np.int64)
    for v in range(K - 1, -1, -1):
        out[(arr % (p ** (v + 1)) != 0) & (arr % (p**v) == 0)] = v
    return out


@dataclass(frozen=True)
class SmithForm:
    """``U @ M @ V == diag(p**vals)`` modulo p^K.

    ``vals`` has length ``min(rows, cols)``; ``vals[i] == K`` marks a zero
    diagonal entry.  ``Uinv`` is the inverse of ``U``.
    """

    U: np.ndarray
    Uinv: np.ndarray
    V: np.ndarray
    vals: tuple
    p: int
    K: int

    @property
    def rank(self) -> int:
        return sum(1 for v in self.vals if v < self.K)


def smith(M, p: int, K: int) -> SmithForm:
    """Smith normal form over Z/p^K.

    Pivot rule: minimal valuation in the remaining block (so units first),
    ties broken by the lowest (row, column) index.  Diagonal entries are
    normalized to exact powers of p, which makes the form deterministic.
    """
    q = p**K
    A = np.array(M, dtype=np.int64).reshape(len(M), -1) % q if len(M) else np.zeros((0, 0), dtype=np.int64)
    rows, cols = A.shape
    U = np.eye(rows, dtype=np.int64)
    Uinv = np.eye(rows, dtype=np.int64)
    V = np.eye(cols, dtype=np.int64)
    vals = []
    for k in range(min(rows, cols)):
        block = A[k:, k:]
        if not block.any():
            vals.extend([K] * (min(rows, cols) - k))
            break
        vb = valuations(block, p, K)
        vmin = int(vb.min())
        flat = int(np.flatnonzero(vb.ravel() == vmin)[0])
        i, j = divmod(flat, block.shape[1])
        i += k
        j += k
        if i != k:
            A[[k, i]] = A[[i, k]]
            U[[k, i]] = U[[i, k]]
            Uinv[:, [k, i]] = Uinv[:, [i, k]]
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            V[:, [k, j]] = V[:, [j, k]]
        piv = int(A[k, k])
        unit = piv // p**vmin
        uinv = pow(unit, -1, q)
        A[k] = A[k] * uinv % q
        U[k] = U[k] * uinv % q
        Uinv[:, k] = Uinv[:, k] * unit % q
        pk = p**vmin
        # rows below: every entry is divisible by p^vmin
        for r in range(k + 1, rows):
            if A[r, k]:
                f = int(A[r, k]) // pk
                A[r] = (A[r] - f * A[k]) % q
                U[r] = (U[r] - f * U[k]) % q
                Uinv[:, k] = (Uinv[:, k] + f * Uinv[:, r]) % q
        for c in range(k + 1, cols):
            if A[k, c]:
                f = int(A[k, c]) // pk
                A[:, c] = (A[:, c] - f * A[:, k]) % q
                V[:, c] = (V[:, c] - f * V[:, k]) % q
        vals.append(vmin)
    return SmithForm(U, Uinv, V, tuple(vals), p, K)


def _embed(ann, p, K):
    return np.array([p ** (K - a) for a in ann], dtype=np.int64)


def _width(K_candidates):
    return max([1, *K_candidates])


def subgroup_basis(gens, ann, p: int):
    """Basis of the subgroup of ``⊕ Z/p^{ann}`` generated by ``gens``.

    Returns ``(basis, orders)`` where ``basis`` is a list of integer vectors
    and ``orders`` the exponents e_i with the subgroup ≅ ⊕ Z/p^{e_i}.
    """
    ann = list(ann)
    L = len(ann)
    gens = [np.asarray(g, dtype=np.int64) for g in gens]
    if not gens or L == 0:
        return [], []
    K = _width(ann)
    q = p**K
    emb = _embed(ann, p, K)
    Mat = (np.stack(gens, axis=1) * emb[:, None]) % q
    sf = smith(Mat, p, K)
    basis, orders = [], []
    for i, v in enumerate(sf.vals):
        if v >= K:
            continue
        col = sf.Uinv[:, i] * p**v % q
        basis.append(col // emb % np.array([p**a for a in ann]))
        orders.append(K - v)
    return basis, orders


def subgroup_order_exponent(gens, ann, p: int) -> int:
    return sum(subgroup_basis(gens, ann, p)[1])


def kernel(F, src_ann, tgt_ann, p: int):
    """Kernel of the homomorphism ``⊕Z/p^{src} -> ⊕Z/p^{tgt}`` given by ``F``.

    ``F`` has shape (len(tgt), len(src)) and must be well defined.  Returns
    ``(basis, orders)`` of the kernel as a subgroup of the source.
    """
    src_ann = list(src_ann)
    tgt_ann = list(tgt_ann)
    n = len(src_ann)
    if n == 0:
        return [], []
    K = _width(src_ann + tgt_ann)
    q = p**K
    F = np.asarray(F, dtype=np.int64).reshape(len(tgt_ann), n)
    if len(tgt_ann) == 0:
        gens = [np.eye(n, dtype=np.int64)[i] for i in range(n)]
        return subgroup_basis(gens, src_ann, p)
    Fe = (F * _embed(tgt_ann, p, K)[:, None]) % q
    sf = smith(Fe, p, K)
    vals = list(sf.vals) + [K] * (n - len(sf.vals))
    smod = np.array([p**a for a in src_ann], dtype=np.int64)
    gens = [(sf.V[:, i] * p ** (K - v)) % q % smod for i, v in enumerate(vals)]
    gens = [g for g in gens if g.any()]
    return subgroup_basis(gens, src_ann, p)


def image_exponent(F, src_ann, tgt_ann, p: int) -> int:
    """log_p of the order of the image of ``F``."""
    F = np.asarray(F, dtype=np.int64).reshape(len(tgt_ann), len(src_ann))
    cols = [F[:, i] * 1 for i in range(len(src_ann))]
    return subgroup_order_exponent(cols, tgt_ann, p)


def solve(F, src_ann, tgt_ann, y, p: int):
    """A solution x of ``F x = y`` in ``⊕Z/p^{src}``, or None."""
    src_ann = list(src_ann)
    tgt_ann = list(tgt_ann)
    n = len(src_ann)
    K = _width(src_ann + tgt_ann)
    q = p**K
    y = np.asarray(y, dtype=np.int64)
    if len(tgt_ann) == 0:
        return np.zeros(n, dtype=np.int64)
    tmod = np.array([p**a for a in tgt_ann], dtype=np.int64)
    if n == 0:
        return np.zeros(0, dtype=np.int64) if not (y % tmod).any() else None
    emb = _embed(tgt_ann, p, K)
    F = np.asarray(F, dtype=np.int64).reshape(len(tgt_ann), n)
    sf = smith(F * emb[:, None] % q, p, K)
    z = sf.U @ ((y % tmod) * emb % q) % q
    w = np.zeros(n, dtype=np.int64)
    for i in range(len(z)):
        v = sf.vals[i] if i < len(sf.vals) else K
        zi = int(z[i])
        if v >= K:
            if zi:
                return None
            continue
        if zi % p**v:
            return None
        w[i] = zi // p**v
    x = sf.V @ w % q
    return x % np.array([p**a for a in src_ann], dtype=np.int64)


@dataclass(frozen=True)
class Quotient:
    """``⊕Z/p^{ann} / S`` ≅ ``⊕Z/p^{new_ann}``.

    ``proj`` maps old coordinates to new ones, ``lift`` is a set-theoretic
    section given by a matrix (new -> old).
    """

    new_ann: tuple
    proj: np.ndarray
    lift: np.ndarray


def quotient(ann, gens, p: int) -> Quotient:
    ann = list(ann)
    L = len(ann)
    K = _width(ann)
    q = p**K
    cols = [np.eye(L, dtype=np.int64)[i] * p ** ann[i] % q for i in range(L)]
    cols += [np.asarray(g, dtype=np.int64) % q for g in gens]
    R = np.stack(cols, axis=1) if cols else np.zeros((L, 0), dtype=np.int64)
    sf = smith(R, p, K)
    keep = [i for i, v in enumerate(sf.vals) if v > 0]
    new_ann = tuple(sf.vals[i] for i in keep)
    proj = sf.U[keep, :] % q
    proj = proj % np.array([p**a for a in new_ann], dtype=np.int64)[:, None] if keep else np.zeros((0, L), dtype=np.int64)
    lift = sf.Uinv[:, keep] % np.array([p**a for a in ann], dtype=np.int64)[:, None] if keep else np.zeros((L, 0), dtype=np.int64)
    return Quotient(new_ann, proj, lift)


# ---------------------------------------------------------------------------
# F_p linear algebra


def rref(M, p: int):
    """Reduced row echelon form over F_p; returns (R, pivot_columns)."""
    A = np.array(M, dtype=np.int64) % p
    if A.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    if A.size == 0:
        return np.zeros((0, A.shape[1]), dtype=np.int64), []
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = A[r] * inv % p
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if others.size:
            A[others] = (A[others] - np.outer(A[others, c], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank_mod_p(M, p: int) -> int:
    return len(rref(M, p)[1])


def nullspace_mod_p(M, p: int) -> np.ndarray:
    """Basis (rows) of {x : M x = 0} over F_p, in canonical RREF-derived form."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[1]
    R, piv = rref(M, p)
    free = [c for c in range(cols) if c not in set(piv)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(piv):
            basis[k, pc] = (-R[i, f]) % p
    return basis


def solve_mod_p(M, b, p: int):
    """One solution of ``M x = b`` over F_p, or None."""
    M = np.asarray(M, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    R, piv = rref(np.hstack([M, b]), p)
    cols = M.shape[1]
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = R[i, cols]
    return x


class Echelon:
    """A subspace of F_p^n kept in RREF, used for canonical reduction."""

    def __init__(self, rows, n: int, p: int):
        self.p = p
        self.n = n
        rows = np.asarray(rows, dtype=np.int64)
        rows = rows.reshape(-1, n) if rows.size else np.zeros((0, n), dtype=np.int64)
        self.R, self.pivots = rref(rows, p) if len(rows) else (np.zeros((0, n), dtype=np.int64), [])

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def reduce(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        v = v.copy()
        for i, c in enumerate(self.pivots):
            if v[c]:
                v = (v - v[c] * self.R[i]) % self.p
        return v

    def contains(self, v) -> bool:
        return not self.reduce(v).any()
