"""H¹ and H² of a finite group with coefficients in Ad(rhobar), over F_p.

Cochains are normalized and inhomogeneous.  A normalized 1-cocycle is
determined by its values on the generators, and a normalized 2-cocycle by
the values c(s, x) with s a generator (use c(sh, k) = s·c(h, k) + c(s, hk)
- c(s, h) along a breadth-first tree).  So both spaces are computed in these
small coordinates, with the cocycle identity imposed for every generator s
and all remaining arguments; by induction on word length this is the full
identity.  Full cochain tables are available through ``expand``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg
from .errors import CapExceeded, ConsistencyError, InvalidInput
from .reps import AdjointModule, MatrixRep, reduce_rep
from .rings import RingMorphism, is_small_extension, residue_map

_MAX_ENTRIES = 6 * 10**7


def _distinct_generators(G):
    out = []
    for s in G.generators:
        if s != G.identity and s not in out:
            out.append(s)
    return out


def _left_tree(G, gens):
    """[(g, s_pos, h)] with g = gens[s_pos]·h, in BFS order from the identity."""
    seen = {G.identity}
    order = [G.identity]
    edges = []
    for h in order:
        for pos, s in enumerate(gens):
            g = int(G.table[s, h])
            if g not in seen:
                seen.add(g)
                order.append(g)
                edges.append((g, pos, h))
    return edges


@dataclass
class CochainSpace:
    degree: int
    group_order: int
    module_dim: int
    p: int

    @property
    def dim(self) -> int:
        """Dimension of the normalized cochain space."""
        return (self.group_order - 1) ** self.degree * self.module_dim


def coboundary0(ad: AdjointModule, X):
    """(dX)(g) = g·X - X, shape (|G|, n²)."""
    X = np.asarray(X, dtype=np.int64)
    return (ad.action @ X - X) % ad.p


def coboundary1(ad: AdjointModule, c):
    """(dc)(g, h) = g·c(h) - c(gh) + c(g) for c of shape (|G|, n²)."""
    c = np.asarray(c, dtype=np.int64)
    G = ad.rhobar.group
    gc = np.einsum("gab,hb->gha", ad.action, c)
    return (gc - c[G.table] + c[:, None, :]) % ad.p


def cocycle2_defect(ad: AdjointModule, c, firsts=None):
    """g·c(h,k) - c(gh,k) + c(g,hk) - c(g,h) for g in ``firsts`` (default all)."""
    c = np.asarray(c, dtype=np.int64)
    G = ad.rhobar.group
    firsts = range(G.order) if firsts is None else firsts
    out = []
    for g in firsts:
        term = np.einsum("ab,hkb->hka", ad.action[g], c)
        term = term - c[G.table[g]] + c[g][G.table] - c[g][:, None, :]
        out.append(term % ad.p)
    return np.stack(out)


def _require_field(rhobar):
    A = rhobar.ring
    if not (A.rank == 1 and A.ann == (1,)):
        raise InvalidInput("cohomology needs a representation over F_p")


@dataclass
class H1:
    rhobar: MatrixRep
    dim: int
    z1_dim: int
    b1_dim: int
    gens: list
    expand_matrix: np.ndarray  # (|G|, n², k·n²): generator values -> full cocycle
    b1: linalg.Echelon
    complement: np.ndarray  # RREF rows spanning a complement of B¹ in Z¹
    pivots: list
    basis: list = field(default_factory=list)  # full cocycle tables, one per class

    def expand(self, v):
        return (self.expand_matrix @ np.asarray(v, dtype=np.int64)) % self.b1.p

    def restrict(self, c):
        return np.asarray(c, dtype=np.int64)[self.gens].reshape(-1) % self.b1.p

    def coordinates(self, c) -> tuple:
        """Coordinates of the class of a 1-cocycle c (table of shape (|G|, n²))."""
        c = np.asarray(c, dtype=np.int64) % self.b1.p
        if np.any(self.expand(self.restrict(c)) != c):
            raise InvalidInput("not a 1-cocycle")
        red = self.b1.reduce(self.restrict(c))
        return tuple(int(red[j]) for j in self.pivots)

    def from_coordinates(self, coords):
        v = np.zeros(self.expand_matrix.shape[2], dtype=np.int64)
        for a, row in zip(coords, self.complement):
            v = (v + int(a) * row) % self.b1.p
        return self.expand(v)


@lru_cache(maxsize=64)
def h1(rhobar: MatrixRep) -> H1:
    """Z¹, B¹ and a canonical complement, for Ad(rhobar)."""
    _require_field(rhobar)
    ad = AdjointModule(rhobar)
    G, p, n2 = rhobar.group, ad.p, ad.dim
    gens = _distinct_generators(G)
    V = len(gens) * n2
    C = np.zeros((G.order, n2, V), dtype=np.int64)
    for pos, s in enumerate(gens):
        C[s, :, pos * n2 : (pos + 1) * n2] = np.eye(n2, dtype=np.int64)
    for g, pos, h in _left_tree(G, gens):
        s = gens[pos]
        if g in gens:
            continue
        C[g] = (C[s] + ad.action[s] @ C[h]) % p
    rows = []
    for s in gens:
        r = C[G.table[s]] - C[s][None] - np.einsum("ab,hbv->hav", ad.action[s], C)
        rows.append(r.reshape(-1, V) % p)
    M = np.concatenate(rows) if rows else np.zeros((0, V), dtype=np.int64)
    M = M[M.any(axis=1)]
    Z = linalg.nullspace_mod_p(M, p) if V else np.zeros((0, 0), dtype=np.int64)
    # coboundaries restricted to generators: X -> (s·X - X)_s
    Bgen = np.zeros((n2, V), dtype=np.int64)
    for pos, s in enumerate(gens):
        Bgen[:, pos * n2 : (pos + 1) * n2] = (ad.action[s] - np.eye(n2, dtype=np.int64)).T % p
    b1 = linalg.Echelon(Bgen, V, p)
    red = np.array([b1.reduce(z) for z in Z], dtype=np.int64).reshape(len(Z), V)
    comp, piv = linalg.rref(red, p) if len(red) else (np.zeros((0, V), dtype=np.int64), [])
    out = H1(rhobar, len(piv), len(Z), b1.dim, gens, C, b1, comp, piv)
    out.basis = [out.expand(row) for row in comp]
    if out.z1_dim != out.dim + out.b1_dim:
        raise ConsistencyError("dim Z1 != dim H1 + dim B1")
    return out


@dataclass
class H2:
    rhobar: MatrixRep
    dim: int
    z2_dim: int
    b2_dim: int
    gens: list
    expand_matrix: np.ndarray  # (|G|, |G|, n², U)
    b2: linalg.Echelon  # in restricted coordinates
    complement: np.ndarray
    pivots: list
    basis: list = field(default_factory=list)

    @property
    def p(self):
        return self.b2.p

    def expand(self, u):
        return (self.expand_matrix @ np.asarray(u, dtype=np.int64)) % self.p

    def restrict(self, c):
        """Coordinates u = (c(s, x))_{s generator, x != 1}."""
        G = self.rhobar.group
        nonid = [x for x in range(G.order) if x != G.identity]
        c = np.asarray(c, dtype=np.int64)
        return c[np.ix_(self.gens, nonid)].reshape(-1) % self.p

    def is_cocycle(self, c) -> bool:
        return bool(np.array_equal(self.expand(self.restrict(c)), np.asarray(c) % self.p))

    def class_of(self, c) -> tuple:
        """Canonical coordinates of the class of a normalized 2-cocycle."""
        if not self.is_cocycle(c):
            raise InvalidInput("not a normalized 2-cocycle")
        red = self.b2.reduce(self.restrict(c))
        return tuple(int(red[j]) for j in self.pivots)

    def is_coboundary(self, c) -> bool:
        return not any(self.class_of(c))


@lru_cache(maxsize=64)
def h2(rhobar: MatrixRep) -> H2:
    _require_field(rhobar)
    ad = AdjointModule(rhobar)
    G, p, n2 = rhobar.group, ad.p, ad.dim
    gens = _distinct_generators(G)
    nonid = [x for x in range(G.order) if x != G.identity]
    col = {x: i for i, x in enumerate(nonid)}
    U = len(gens) * len(nonid) * n2
    if G.order * G.order * n2 * max(U, 1) > _MAX_ENTRIES:
        raise CapExceeded("H2 cochain table too large")
    C = np.zeros((G.order, G.order, n2, U), dtype=np.int64)
    eye = np.eye(n2, dtype=np.int64)
    for pos, s in enumerate(gens):
        for x in nonid:
            start = (pos * len(nonid) + col[x]) * n2
            C[s, x, :, start : start + n2] = eye
    for g, pos, h in _left_tree(G, gens):
        if g in gens:
            continue
        s = gens[pos]
        # c(sh, k) = s·c(h, k) + c(s, hk) - c(s, h)
        C[g] = (
            np.einsum("ab,kbu->kau", ad.action[s], C[h]) + C[s][G.table[h]] - C[s, h][None]
        ) % p
    rows = []
    for s in gens:
        r = (
            C[G.table[s]]
            - np.einsum("ab,hkbu->hkau", ad.action[s], C)
            - C[s][G.table]
            + C[s][:, None]
        ) % p
        r = r.reshape(-1, U)
        rows.append(r[r.any(axis=1)])
    M = np.concatenate(rows) if rows else np.zeros((0, U), dtype=np.int64)
    Z = linalg.nullspace_mod_p(M, p) if U else np.zeros((0, 0), dtype=np.int64)
    # B² in restricted coordinates: images of the basis 1-cochains e_(y,a)
    D = len(nonid) * n2
    X = np.zeros((D, G.order, n2), dtype=np.int64)
    for i, y in enumerate(nonid):
        X[i * n2 : (i + 1) * n2, y, :] = eye
    if gens and D:
        s_idx = np.array(gens)
        x_idx = np.array(nonid)
        sX = np.einsum("sab,dxb->dsxa", ad.action[s_idx], X[:, x_idx])
        dX = sX - X[:, G.table[np.ix_(s_idx, x_idx)]] + X[:, s_idx][:, :, None, :]
        Bres = dX.reshape(D, -1) % p
    else:
        Bres = np.zeros((0, U), dtype=np.int64)
    b2 = linalg.Echelon(Bres, U, p)
    red = np.array([b2.reduce(z) for z in Z], dtype=np.int64).reshape(len(Z), U)
    comp, piv = linalg.rref(red, p) if len(red) else (np.zeros((0, U), dtype=np.int64), [])
    out = H2(rhobar, len(piv), len(Z), b2.dim, gens, C, b2, comp, piv)
    out.basis = [out.expand(row) for row in comp]
    # dim B² = dim C¹ - dim Z¹
    if b2.dim != D - h1(rhobar).z1_dim:
        raise ConsistencyError("dim B2 disagrees with dim C1 - dim Z1")
    if out.z2_dim != out.dim + out.b2_dim:
        raise ConsistencyError("dim Z2 != dim H2 + dim B2")
    return out


def small_kernel_coefficients(A, t, x):
    """lambda in F_p with x = lambda·t, for arrays x (..., r) lying in F_p·t."""
    x = np.asarray(x, dtype=np.int64)
    p = A.p
    i = int(np.flatnonzero(t)[0])
    shift = p ** (A.ann[i] - 1)
    u = int(t[i]) // shift
    lam = (x[..., i] // shift) * pow(u, -1, p) % p
    if np.any(A.mul(lam[..., None] * np.ones(A.rank, dtype=np.int64), t) != x % A.mods):
        raise ConsistencyError("element is not a multiple of the kernel generator")
    return lam


@dataclass
class Obstruction:
    cocycle: np.ndarray  # (|G|, |G|, n²) over F_p
    class_coords: tuple
    vanishes: bool
    h2_dim: int


def obstruction_class(rho_B: MatrixRep, phi: RingMorphism, section_images=None) -> Obstruction:
    """Obstruction to lifting rho_B along the small extension phi: A -> B.

    ``section_images`` optionally replaces the default set-theoretic lift
    (an array (|G|, n, n, r_A) reducing to rho_B with identity at 1).
    """
    small, t = is_small_extension(phi)
    if not small:
        raise InvalidInput("obstruction classes need a small extension")
    if phi.target != rho_B.ring:
        raise InvalidInput("morphism target is not the ring of the representation")
    A = phi.source
    G, n = rho_B.group, rho_B.n
    rhobar = reduce_rep(rho_B, residue_map(rho_B.ring))
    if section_images is None:
        lift = phi.lift(rho_B.images)
        lift[G.identity] = A.eye(n)
    else:
        lift = np.asarray(section_images, dtype=np.int64) % A.mods
        if np.any(phi(lift) != rho_B.images) or np.any(lift[G.identity] != A.eye(n)):
            raise InvalidInput("section images do not lift rho_B")
    defect = (A.matmul(lift[:, None], lift[None, :]) - lift[G.table]) % A.mods
    y = small_kernel_coefficients(A, t, defect)  # (|G|, |G|, n, n)
    p = A.p
    barinv = rhobar.images[..., 0][G.inverses][G.table]  # rhobar(gh)^{-1}
    o = np.einsum("ghij,ghjk->ghik", y, barinv) % p
    o = o.reshape(G.order, G.order, n * n)
    H = h2(rhobar)
    cls = H.class_of(o)
    return Obstruction(o, cls, not any(cls), H.dim)
