"""Matrix representations of finite groups over finite local rings.

A representation stores its full image table: an integer array of shape
``(|G|, n, n, r)`` holding the ring coordinates of every matrix entry.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from . import linalg
from .config import get_caps
from .errors import CapExceeded, InvalidInput, NotAHomomorphism
from .groups import FiniteGroup, GroupHom
from .rings import FiniteLocalAlgebra, RingMorphism, residue_map, tensor_rings


def mat_inv(A: FiniteLocalAlgebra, X):
    """Inverse of a single invertible matrix over A."""
    X = np.asarray(X, dtype=np.int64)
    n = X.shape[0]
    p = A.p
    bar = A.residue(X)
    R, piv = linalg.rref(np.hstack([bar, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)):
        raise InvalidInput("matrix is not invertible")
    Y = A.lift_matrix(R[:, n:])
    two = A.lift_matrix(2 * np.eye(n, dtype=np.int64))
    for _ in range(A.N * A.rank + 2):
        Y = A.matmul(Y, (two - A.matmul(X, Y)) % A.mods)
    if not np.array_equal(A.matmul(X, Y), A.eye(n)):
        raise AssertionError("matrix inversion did not converge")
    return Y


def unipotent_inv(A: FiniteLocalAlgebra, X):
    """(1 + x)^{-1} for matrices (..., n, n, r) with entries of x in m_A."""
    X = np.asarray(X, dtype=np.int64)
    n = X.shape[-2]
    I = np.broadcast_to(A.eye(n), X.shape)
    x = (X - I) % A.mods
    term = I.copy()
    total = I.copy()
    for _ in range(A.nilpotency * n + 1):
        term = A.neg(A.matmul(term, x))
        if not term.any():
            break
        total = (total + term) % A.mods
    return total


class MatrixRep:
    def __init__(self, group: FiniteGroup, ring: FiniteLocalAlgebra, images, check=True):
        self.group = group
        self.ring = ring
        images = np.asarray(images, dtype=np.int64) % ring.mods
        if images.ndim != 4 or images.shape[0] != group.order or images.shape[3] != ring.rank:
            raise InvalidInput(f"image table has shape {images.shape}")
        self.n = images.shape[1]
        if self.n > get_caps().dimension:
            raise CapExceeded(f"dimension {self.n} exceeds cap")
        images.flags.writeable = False
        self.images = images
        if check:
            self.verify()

    def verify(self):
        G, A = self.group, self.ring
        if not np.array_equal(self.images[G.identity], A.eye(self.n)):
            raise NotAHomomorphism("identity does not map to the identity matrix")
        prod = A.matmul(self.images[:, None], self.images[None, :])
        bad = np.argwhere(np.any(prod != self.images[G.table], axis=(2, 3, 4)))
        if len(bad):
            g, h = (int(v) for v in bad[0])
            raise NotAHomomorphism(f"rho({g})rho({h}) != rho({g}*{h})", witness=(g, h))

    @property
    def gen_images(self):
        return self.images[list(self.group.generators)]

    @cached_property
    def key(self) -> bytes:
        return np.ascontiguousarray(self.gen_images).tobytes()

    def sort_key(self):
        return tuple(self.gen_images.ravel().tolist())

    def __eq__(self, other):
        return (
            isinstance(other, MatrixRep)
            and self.group is other.group
            and self.ring == other.ring
            and np.array_equal(self.images, other.images)
        )

    def __hash__(self):
        return hash((id(self.group), self.ring, self.key))

    def __repr__(self):
        return f"<rep of {self.group.name} over {self.ring.name}, n={self.n}>"

    def residual(self) -> "MatrixRep":
        return reduce_rep(self, residue_map(self.ring))

    def to_json(self):
        return {
            "ring": self.ring.name,
            "group": self.group.name,
            "n": self.n,
            "generator_images": self.gen_images.tolist(),
        }


def propagate(G: FiniteGroup, A: FiniteLocalAlgebra, gen_images):
    """Full image tables from generator images, batched: (..., gens, n, n, r)."""
    gen_images = np.asarray(gen_images, dtype=np.int64)
    batch = gen_images.shape[:-4]
    n = gen_images.shape[-3]
    T = np.zeros(batch + (G.order, n, n, A.rank), dtype=np.int64)
    T[..., G.identity, :, :, :] = A.eye(n)
    for g, parent, pos in G.spanning_tree:
        T[..., g, :, :, :] = A.matmul(T[..., parent, :, :, :], gen_images[..., pos, :, :, :])
    return T


def homomorphism_mask(G: FiniteGroup, A: FiniteLocalAlgebra, tables):
    """Which stacked image tables satisfy rho(g s) = rho(g) rho(s) for all g and
    generators s (equivalent to being a homomorphism)."""
    tables = np.asarray(tables)
    ok = np.ones(tables.shape[0], dtype=bool)
    for pos, s in enumerate(G.generators):
        prod = A.matmul(tables[:, :, :, :, :], tables[:, None, s])
        ok &= np.all(prod == tables[:, G.table[:, s]], axis=(1, 2, 3, 4))
    return ok


def _as_matrix(A, m, n=None):
    m = np.asarray(m, dtype=np.int64)
    if m.ndim < 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"matrix of shape {m.shape} is not square")
    if m.ndim == 2:
        return A.lift_matrix(m)
    if m.ndim == 3 and m.shape[-1] == A.rank:
        return m % A.mods
    raise InvalidInput(f"cannot read matrix of shape {m.shape}")


def make_rep(G: FiniteGroup, A: FiniteLocalAlgebra, generator_images) -> MatrixRep:
    """Representation from images of ``G.generators``.

    Images are n×n integer matrices (entries read as multiples of 1) or
    n×n×r coordinate arrays.  ``generator_images`` may be a list in
    generator order or a dict ``{generator index: matrix}``.
    """
    if isinstance(generator_images, dict):
        missing = [g for g in G.generators if g not in generator_images]
        if missing:
            raise InvalidInput(f"no image for generators {missing}")
        generator_images = [generator_images[g] for g in G.generators]
    if len(generator_images) != len(G.generators):
        raise InvalidInput("need one image per generator")
    mats = [_as_matrix(A, m) for m in generator_images]
    if len({m.shape for m in mats}) > 1:
        raise InvalidInput("generator images have different sizes")
    mats = np.stack(mats)
    res = A.residue(mats)
    for k, m in enumerate(res):
        if linalg.rank_mod_p(m, A.p) < m.shape[0]:
            raise InvalidInput(f"image of generator {G.generators[k]} is not invertible")
    return MatrixRep(G, A, propagate(G, A, mats))


def trivial_rep(G: FiniteGroup, A: FiniteLocalAlgebra, n: int = 1) -> MatrixRep:
    return MatrixRep(G, A, np.broadcast_to(A.eye(n), (G.order, n, n, A.rank)).copy(), check=False)


def reduce_rep(rho: MatrixRep, phi: RingMorphism) -> MatrixRep:
    if phi.source != rho.ring:
        raise InvalidInput("morphism source is not the coefficient ring")
    return MatrixRep(rho.group, phi.target, phi(rho.images), check=False)


def _is_prime_field(A):
    return A.rank == 1 and A.ann == (1,)


def is_absolutely_irreducible(rhobar: MatrixRep) -> bool:
    """Burnside: the F_p-span of the image is all of M_n(F_p)."""
    if not _is_prime_field(rhobar.ring):
        raise InvalidInput("absolute irreducibility is tested over F_p only")
    n = rhobar.n
    flat = rhobar.images[..., 0].reshape(rhobar.group.order, n * n)
    return linalg.rank_mod_p(flat, rhobar.ring.p) == n * n


def _commutator_map(A, gens, n):
    """Integer matrix of X -> (X g - g X)_g on coordinates of M_n(A)."""
    r = A.rank
    dim = n * n * r
    basis = np.eye(dim, dtype=np.int64).reshape(dim, n, n, r)
    cols = []
    for g in gens:
        cols.append((A.matmul(basis, g) - A.matmul(g, basis)) % A.mods)
    out = np.stack(cols, axis=1)  # (dim, gens, n, n, r)
    return out.reshape(dim, -1).T


class Centralizer:
    """The commutant of a representation inside M_n(A), as an abelian group."""

    def __init__(self, ring, n, basis, orders):
        self.ring = ring
        self.n = n
        self.basis = [np.asarray(b).reshape(n, n, ring.rank) for b in basis]
        self.orders = list(orders)

    @property
    def order(self) -> int:
        return self.ring.p ** sum(self.orders)

    def elements(self):
        A = self.ring
        if not self.basis:
            return np.zeros((1, self.n, self.n, A.rank), dtype=np.int64)
        flat = [b.ravel() for b in self.basis]
        mods = np.tile(A.mods, self.n * self.n)
        coeffs = np.array(list(itertools.product(*[range(A.p**o) for o in self.orders])), dtype=np.int64)
        return ((coeffs @ np.stack(flat)) % mods).reshape(-1, self.n, self.n, A.rank)

    def is_scalar(self) -> bool:
        """Every generator is a scalar matrix."""
        n = self.n
        for b in self.basis:
            off = b.copy()
            for i in range(n):
                off[i, i] = 0
            if off.any() or any(np.any(b[i, i] != b[0, 0]) for i in range(n)):
                return False
        return True


def centralizer(rho: MatrixRep, verify=False) -> Centralizer:
    """Solve X rho(s) = rho(s) X over A for the generators s."""
    A, n = rho.ring, rho.n
    F = _commutator_map(A, rho.gen_images, n)
    src = list(A.ann) * (n * n)
    tgt = src * len(rho.group.generators)
    basis, orders = linalg.kernel(F, src, tgt, A.p)
    C = Centralizer(A, n, basis, orders)
    if verify:
        for X in C.basis:
            if np.any(A.matmul(X[None], rho.images) != A.matmul(rho.images, X[None])):
                raise AssertionError("centralizer element fails on a non-generator")
    return C


def stabilizer_in_congruence(rho: MatrixRep) -> Centralizer:
    """C(rho) ∩ M_n(m_A); the stabilizer of rho in G_A is 1 + this group."""
    A, n = rho.ring, rho.n
    mb, mo = A.maximal_ideal
    r = A.rank
    # parametrize M_n(m_A) by entrywise coordinates in the basis of m_A
    cols = []
    for i in range(n):
        for j in range(n):
            for b in mb:
                X = np.zeros((n, n, r), dtype=np.int64)
                X[i, j] = b
                cols.append(X)
    if not cols:
        return Centralizer(A, n, [], [])
    Xs = np.stack(cols)
    imgs = []
    for g in rho.gen_images:
        imgs.append((A.matmul(Xs, g) - A.matmul(g, Xs)) % A.mods)
    F = np.stack(imgs, axis=1).reshape(len(cols), -1).T
    src = list(mo) * (n * n)
    tgt = list(A.ann) * (n * n * len(rho.gen_images))
    kb, ko = linalg.kernel(F, src, tgt, A.p)
    basis = [(np.tensordot(c, Xs, axes=(0, 0))) % A.mods for c in kb]
    return Centralizer(A, n, basis, ko)


def centralizer_orders_batch(A: FiniteLocalAlgebra, rhobar_gens, gen_images):
    """log_p |C(rho)| for many lifts of one residual representation at once.

    Gaussian elimination over A with pivots chosen on the residual map
    (pivots are then units for every lift); the residual block must vanish
    for the fast path, otherwise the lift is recomputed exactly.
    Returns an integer array, one exponent per lift.
    """
    gen_images = np.asarray(gen_images, dtype=np.int64)
    L, k, n = gen_images.shape[0], gen_images.shape[1], gen_images.shape[2]
    r = A.rank
    p = A.p
    # A-matrix of X -> (X g - g X): rows (s, i, j), columns (a, b)
    M = np.zeros((L, k * n * n, n * n, r), dtype=np.int64)
    for s in range(k):
        g = gen_images[:, s]
        for i in range(n):
            for j in range(n):
                row = s * n * n + i * n + j
                for b in range(n):
                    M[:, row, i * n + b] = (M[:, row, i * n + b] + g[:, b, j]) % A.mods
                for a in range(n):
                    M[:, row, a * n + j] = (M[:, row, a * n + j] - g[:, i, a]) % A.mods
    bar = A.residue(M[0])
    _, pivots = linalg.rref(bar, p)
    R, piv_cols = linalg.rref(bar, p)
    # locate a pivot row for every pivot column by elimination on the batch
    rows_used = []
    for c in piv_cols:
        cand = [i for i in range(M.shape[1]) if i not in rows_used and A.residue(M[0, i, c]) != 0]
        i = cand[0]
        rows_used.append(i)
        inv = A.inv(M[:, i, c])
        M[:, i] = A.mul(M[:, i], inv[:, None, :])
        for other in range(M.shape[1]):
            if other == i:
                continue
            f = M[:, other, c]
            if f.any():
                M[:, other] = A.sub(M[:, other], A.mul(f[:, None, :], M[:, i]))
    free = [c for c in range(n * n) if c not in piv_cols]
    rest = [i for i in range(M.shape[1]) if i not in rows_used]
    residual = M[:, rest][:, :, free] if free and rest else np.zeros((L, 0), dtype=np.int64)
    clean = ~residual.reshape(L, -1).any(axis=1)
    out = np.full(L, len(free) * A.size_exp, dtype=np.int64)
    for idx in np.flatnonzero(~clean):
        F = _commutator_map(A, gen_images[idx], n)
        src = list(A.ann) * (n * n)
        out[idx] = sum(linalg.kernel(F, src, src * k, p)[1])
    return out


def direct_sum(rho1: MatrixRep, rho2: MatrixRep) -> MatrixRep:
    if rho1.group is not rho2.group or rho1.ring != rho2.ring:
        raise InvalidInput("direct sum needs the same group and ring")
    n1, n2 = rho1.n, rho2.n
    out = np.zeros((rho1.group.order, n1 + n2, n1 + n2, rho1.ring.rank), dtype=np.int64)
    out[:, :n1, :n1] = rho1.images
    out[:, n1:, n1:] = rho2.images
    return MatrixRep(rho1.group, rho1.ring, out, check=False)


def conjugate(rho: MatrixRep, c, c_inv=None) -> MatrixRep:
    A = rho.ring
    c = np.asarray(c, dtype=np.int64)
    if c_inv is None:
        c_inv = mat_inv(A, c)
    return MatrixRep(rho.group, A, A.matmul(A.matmul(c, rho.images), c_inv), check=False)


def twist(rho: MatrixRep, chi: MatrixRep) -> MatrixRep:
    if chi.n != 1 or chi.group is not rho.group or chi.ring != rho.ring:
        raise InvalidInput("twist needs a character of the same group over the same ring")
    A = rho.ring
    scal = chi.images[:, 0, 0][:, None, None, :]
    return MatrixRep(rho.group, A, A.mul(rho.images, scal), check=False)


def inverse_character(chi: MatrixRep) -> MatrixRep:
    if chi.n != 1:
        raise InvalidInput("not a character")
    return MatrixRep(chi.group, chi.ring, chi.images[chi.group.inverses], check=False)


def tensor_reps(rho: MatrixRep, sigma: MatrixRep, rings=None):
    """Kronecker product over A ⊗ A'; returns (rep, (C, iota_A, iota_A'))."""
    if rho.group is not sigma.group:
        raise InvalidInput("tensor product needs the same group")
    if rings is None:
        rings = tensor_rings(rho.ring, sigma.ring)
    C, ia, ib = rings
    X = ia(rho.images)  # (G, n, n, rc)
    Y = ib(sigma.images)
    n, m = rho.n, sigma.n
    prod = C.mul(X[:, :, None, :, None, :], Y[:, None, :, None, :, :])  # (G, n, m, n, m, rc)
    out = prod.reshape(rho.group.order, n * m, n * m, C.rank)
    return MatrixRep(rho.group, C, out, check=True), rings


def contragredient(rho: MatrixRep) -> MatrixRep:
    imgs = rho.images[rho.group.inverses].transpose(0, 2, 1, 3)
    return MatrixRep(rho.group, rho.ring, imgs, check=False)


def pullback(rho: MatrixRep, f: GroupHom) -> MatrixRep:
    if f.target is not rho.group:
        raise InvalidInput("homomorphism target is not the group of the representation")
    return MatrixRep(f.source, rho.ring, rho.images[f.images], check=False)


def has_central_character(rho: MatrixRep):
    """(True, {z: scalar coordinates}) iff rho(z) is scalar for all central z."""
    n = rho.n
    values = {}
    for z in rho.group.center():
        M = rho.images[z]
        off = M.copy()
        for i in range(n):
            off[i, i] = 0
        if off.any() or any(np.any(M[i, i] != M[0, 0]) for i in range(n)):
            return False, None
        values[z] = M[0, 0].copy()
    return True, values


class AdjointModule:
    """M_n(F_p) with g acting by X -> rhobar(g) X rhobar(g)^{-1} (row-major vec)."""

    def __init__(self, rhobar: MatrixRep):
        if not _is_prime_field(rhobar.ring):
            raise InvalidInput("adjoint module needs a representation over F_p")
        self.rhobar = rhobar
        self.p = rhobar.ring.p
        self.n = rhobar.n
        self.dim = self.n * self.n
        G = rhobar.group
        mats = rhobar.images[..., 0]
        inv = mats[G.inverses]
        self.action = np.einsum("gik,gjl->gijkl", mats, inv.transpose(0, 2, 1)).reshape(G.order, self.dim, self.dim) % self.p
        self.action.flags.writeable = False

    def act(self, g, v):
        return self.action[g] @ np.asarray(v) % self.p
