"""Finite groups as Cayley tables with distinguished generators."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import get_caps
from .errors import CapExceeded, InvalidInput, NotAHomomorphism
from .rings import is_prime


class FiniteGroup:
    """Elements are indices ``0..order-1``; ``table[g, h]`` is the index of gh.

    ``labels`` optionally holds the concrete elements (permutations,
    matrices, ...) the table was built from, in index order.
    """

    def __init__(self, table, generators, identity=None, name=None, labels=None, check=True):
        self.table = np.asarray(table, dtype=np.int64)
        n = self.table.shape[0]
        if self.table.shape != (n, n):
            raise InvalidInput("multiplication table must be square")
        if n > get_caps().group:
            raise CapExceeded(f"group of order {n} exceeds cap {get_caps().group}")
        self.order = n
        self.table.flags.writeable = False
        if identity is None:
            ids = [e for e in range(n) if np.array_equal(self.table[e], np.arange(n))]
            if not ids:
                raise InvalidInput("table has no identity")
            identity = ids[0]
        self.identity = int(identity)
        self.generators = tuple(int(g) for g in generators)
        if not self.generators:
            self.generators = (self.identity,)
        self.name = name or f"G{n}"
        self.labels = labels
        if check:
            self.verify()

    def verify(self):
        T = self.table
        n = self.order
        if T.min() < 0 or T.max() >= n:
            raise InvalidInput("table entries out of range")
        e = self.identity
        if not (np.array_equal(T[e], np.arange(n)) and np.array_equal(T[:, e], np.arange(n))):
            raise InvalidInput("identity is not two-sided")
        a = np.arange(n)
        if np.any(T[T[a[:, None], a[None, :]][:, :, None], a[None, None, :]] != T[a[:, None, None], T[a[:, None], a[None, :]][None, :, :]]):
            raise InvalidInput("table is not associative")
        for row in T:
            if len(set(row.tolist())) != n:
                raise InvalidInput("table rows are not permutations (no inverses)")
        if len(self.closure(self.generators)) != n:
            raise InvalidInput("generators do not generate the group")

    def __repr__(self):
        return f"<{self.name} of order {self.order}>"

    def mul(self, g, h):
        return int(self.table[g, h])

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.zeros(self.order, dtype=np.int64)
        for g in range(self.order):
            inv[g] = int(np.flatnonzero(self.table[g] == self.identity)[0])
        return inv

    def inverse(self, g):
        return int(self.inverses[g])

    def power(self, g, k):
        x = self.identity
        for _ in range(k % self.element_order(g)):
            x = self.mul(x, g)
        return x

    def element_order(self, g) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.mul(x, g)
            k += 1
        return k

    def closure(self, gens):
        """Subgroup generated by ``gens`` (sorted list of indices)."""
        seen = {self.identity}
        frontier = [self.identity]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = int(self.table[x, s])
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def commutator(self, g, h):
        return self.mul(self.mul(self.inverse(g), self.inverse(h)), self.mul(g, h))

    @cached_property
    def spanning_tree(self):
        """BFS over the right Cayley graph: list of (g, parent, generator position)
        with g = parent * generators[pos], identity excluded."""
        order = []
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for pos, s in enumerate(self.generators):
                    y = int(self.table[x, s])
                    if y not in seen:
                        seen.add(y)
                        order.append((y, x, pos))
                        nxt.append(y)
            frontier = nxt
        return order

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def center(self):
        return [z for z in range(self.order) if np.array_equal(self.table[z], self.table[:, z])]

    def words(self):
        """A generator word (tuple of positions) for every element."""
        w = {self.identity: ()}
        for g, parent, pos in self.spanning_tree:
            w[g] = w[parent] + (pos,)
        return w


def center(G: FiniteGroup):
    return G.center()


# ---------------------------------------------------------------------------
# presets


def _from_elements(elements, mul, gens, name, key=None):
    elements = sorted(elements, key=key) if key else list(elements)
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    if n > get_caps().group:
        raise CapExceeded(f"group of order {n} exceeds cap {get_caps().group}")
    table = np.array([[index[mul(a, b)] for b in elements] for a in elements], dtype=np.int64)
    return FiniteGroup(table, [index[g] for g in gens], name=name, labels=elements)


def _close(gens, mul, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = mul(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def _perm_mul(a, b):
    # (ab)(i) = a(b(i)): apply b first
    return tuple(a[i] for i in b)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise InvalidInput("cyclic group order must be >= 1")
    if n > get_caps().group:
        raise CapExceeded(f"group of order {n} exceeds cap")
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, [1 % n], identity=0, name=f"C{n}", labels=list(range(n)))


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 5:
        raise InvalidInput("symmetric groups are supported for n <= 5")
    ident = tuple(range(n))
    if n == 1:
        return _from_elements([ident], _perm_mul, [ident], "S1")
    transposition = (1, 0) + tuple(range(2, n))
    cycle = tuple(list(range(1, n)) + [0])
    els = _close([transposition, cycle], _perm_mul, ident)
    return _from_elements(els, _perm_mul, [transposition, cycle], f"S{n}", key=lambda x: x)


def alternating4() -> FiniteGroup:
    ident = (0, 1, 2, 3)
    a = (1, 2, 0, 3)  # (0 1 2)
    b = (1, 0, 3, 2)  # (0 1)(2 3)
    els = _close([a, b], _perm_mul, ident)
    return _from_elements(els, _perm_mul, [a, b], "A4", key=lambda x: x)


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; generators rotation, reflection."""
    if n < 1:
        raise InvalidInput("dihedral parameter must be >= 1")
    # element (k, s) = r^k f^s
    def mul(x, y):
        k1, s1 = x
        k2, s2 = y
        return ((k1 + (-k2 if s1 else k2)) % n, s1 ^ s2)

    els = [(k, s) for s in (0, 1) for k in range(n)]
    return _from_elements(els, mul, [(1 % n, 0), (0, 1)], f"D{n}", key=lambda x: (x[1], x[0]))


def quaternion() -> FiniteGroup:
    """Q8 as {±1, ±i, ±j, ±k}; generators i, j."""
    # unit quaternions as (sign, axis) with axis in 1, i, j, k
    units = ["1", "i", "j", "k"]
    prod = {
        ("1", x): (1, x) for x in units
    }
    prod.update({(x, "1"): (1, x) for x in units})
    prod.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1")})
    prod.update({("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j")})
    prod.update({("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})

    def mul(a, b):
        s, u = prod[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    els = [(s, u) for s in (1, -1) for u in units]
    return _from_elements(els, mul, [(1, "i"), (1, "j")], "Q8")


def special_linear2(p: int) -> FiniteGroup:
    """SL_2(F_p) for p <= 3; labels are 2x2 tuples ((a, b), (c, d))."""
    if p not in (2, 3):
        raise InvalidInput("SL2 preset supports p <= 3")

    def mul(x, y):
        return tuple(
            tuple(sum(x[i][k] * y[k][j] for k in range(2)) % p for j in range(2)) for i in range(2)
        )

    els = [
        ((a, b), (c, d))
        for a, b, c, d in itertools.product(range(p), repeat=4)
        if (a * d - b * c) % p == 1
    ]
    t = ((1, 1), (0, 1))
    w = ((0, p - 1), (1, 0))
    return _from_elements(els, mul, [t, w], f"SL2(F{p})", key=lambda x: x)


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    n, m = G.order, H.order
    if n * m > get_caps().group:
        raise CapExceeded("direct product exceeds group cap")
    idx = lambda g, h: g * m + h
    table = np.zeros((n * m, n * m), dtype=np.int64)
    for g1 in range(n):
        for h1 in range(m):
            table[idx(g1, h1)] = (G.table[g1][:, None] * m + H.table[h1][None, :]).ravel()
    gens = [idx(g, H.identity) for g in G.generators] + [idx(G.identity, h) for h in H.generators]
    labels = [(g, h) for g in range(n) for h in range(m)]
    return FiniteGroup(table, gens, identity=idx(G.identity, H.identity), name=f"{G.name}x{H.name}", labels=labels)


GROUP_PRESETS = ("C", "D", "Q8", "S", "A4", "SL2", "product")


def make_group(preset: str, *args) -> FiniteGroup:
    if preset == "C":
        return cyclic(*args)
    if preset == "D":
        return dihedral(*args)
    if preset == "Q8":
        return quaternion()
    if preset == "S":
        return symmetric(*args)
    if preset == "A4":
        return alternating4()
    if preset == "SL2":
        return special_linear2(*args)
    if preset == "product":
        G, H = args
        return direct_product(G, H)
    raise InvalidInput(f"unknown group preset {preset!r}")


# ---------------------------------------------------------------------------
# homomorphisms


class GroupHom:
    """A homomorphism given by the list of images of all elements."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, images, check=True):
        self.source = source
        self.target = target
        self.images = np.asarray(images, dtype=np.int64)
        if check:
            S, T = source.table, target.table
            f = self.images
            bad = np.argwhere(f[S] != T[f[:, None], f[None, :]])
            if len(bad):
                g, h = bad[0]
                raise NotAHomomorphism(f"f({g}*{h}) != f({g})f({h})", witness=(int(g), int(h)))

    @classmethod
    def from_generators(cls, source, target, gen_images):
        images = {source.identity: target.identity}
        for g, parent, pos in source.spanning_tree:
            images[g] = target.mul(images[parent], gen_images[pos])
        return cls(source, target, [images[g] for g in range(source.order)])

    def __call__(self, g):
        return int(self.images[g])

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self ∘ inner."""
        return GroupHom(inner.source, self.target, self.images[inner.images], check=False)


def identity_hom(G):
    return GroupHom(G, G, np.arange(G.order), check=False)


def pullback_along(f: GroupHom):
    """The map rep of f.target -> rep of f.source, by precomposition.

    Returns a callable acting on image tables (arrays indexed by elements of
    the target group).
    """
    def pull(table):
        return np.asarray(table)[f.images]

    return pull


# ---------------------------------------------------------------------------
# abelianization


def commutator_subgroup(G: FiniteGroup):
    comms = {G.commutator(g, h) for g in range(G.order) for h in range(G.order)}
    return G.closure(sorted(comms))


def _int_smith(M):
    """Smith form over Z of a small integer matrix: (U, V, diag) with U M V = D."""
    A = [list(map(int, row)) for row in M]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def swap_rows(M_, i, j):
        M_[i], M_[j] = M_[j], M_[i]

    def swap_cols(M_, i, j):
        for row in M_:
            row[i], row[j] = row[j], row[i]

    diag = []
    for k in range(min(rows, cols)):
        while True:
            entries = [(abs(A[i][j]), i, j) for i in range(k, rows) for j in range(k, cols) if A[i][j]]
            if not entries:
                return U, V, diag + [0] * (min(rows, cols) - k)
            _, i, j = min(entries)
            swap_rows(A, k, i)
            swap_rows(U, k, i)
            swap_cols(A, k, j)
            swap_cols(V, k, j)
            piv = A[k][k]
            done = True
            for i in range(k + 1, rows):
                q = A[i][k] // piv
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[k])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[k])]
                if A[i][k]:
                    done = False
            for j in range(k + 1, cols):
                q = A[k][j] // piv
                if q:
                    for row in A:
                        row[j] -= q * row[k]
                    for row in V:
                        row[j] -= q * row[k]
                if A[k][j]:
                    done = False
            if not done:
                continue
            bad = [(i, j) for i in range(k + 1, rows) for j in range(k + 1, cols) if A[i][j] % piv]
            if bad:
                i, _ = bad[0]
                A[k] = [a + b for a, b in zip(A[k], A[i])]
                U[k] = [a + b for a, b in zip(U[k], U[i])]
                continue
            break
        if A[k][k] < 0:
            A[k] = [-a for a in A[k]]
            U[k] = [-a for a in U[k]]
        diag.append(A[k][k])
    return U, V, diag


@dataclass(frozen=True)
class AbelianizationDescriptor:
    """Γ ≅ Z_p^free_rank × ∏ Z/p^{e_i}."""

    p: int
    free_rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.free_rank < 0 or any(e < 1 for e in self.torsion):
            raise InvalidInput("invalid abelianization descriptor")

    def to_json(self):
        return {"p": self.p, "free_rank": self.free_rank, "torsion": list(self.torsion)}


@dataclass(frozen=True)
class ProPAbelianization:
    """Γ for a finite group with an explicit projection γ: G -> ∏ Z/p^{e_i}."""

    descriptor: AbelianizationDescriptor
    gamma: np.ndarray = field(repr=False)  # shape (|G|, len(torsion))

    @property
    def exponents(self):
        return self.descriptor.torsion


def pro_p_abelianization(G: FiniteGroup, p: int) -> ProPAbelianization:
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    comm = set(commutator_subgroup(G))
    # cosets of the commutator subgroup
    coset_of = {}
    reps = []
    for g in range(G.order):
        if g in coset_of:
            continue
        k = len(reps)
        reps.append(g)
        for c in comm:
            coset_of[G.mul(g, c)] = k
    Q = len(reps)
    gens = G.generators
    k = len(gens)
    # word vector in Z^k for every coset via BFS over the quotient
    word = {coset_of[G.identity]: [0] * k}
    frontier = [G.identity]
    seen = {coset_of[G.identity]}
    while frontier:
        nxt = []
        for x in frontier:
            for pos, s in enumerate(gens):
                y = G.mul(x, s)
                cy = coset_of[y]
                if cy not in seen:
                    seen.add(cy)
                    w = list(word[coset_of[x]])
                    w[pos] += 1
                    word[cy] = w
                    nxt.append(y)
        frontier = nxt
    relations = []
    for c in range(Q):
        x = reps[c]
        for pos, s in enumerate(gens):
            y = coset_of[G.mul(x, s)]
            rel = [a - b for a, b in zip(word[c], word[y])]
            rel[pos] += 1
            if any(rel):
                relations.append(rel)
    if not relations:
        relations = [[0] * k]
    # relation lattice rows; Z^k / rowspace ≅ ⊕ Z/d_i
    U, V, diag = _int_smith(np.array(relations).T)  # columns are relations
    # U R V = D with R = relations^T (k x m); coordinates of v are U v
    torsion, rows = [], []
    for i, d in enumerate(diag):
        d = abs(d)
        if d == 0:
            raise AssertionError("finite group has infinite abelianization")
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if e:
            torsion.append(e)
            rows.append(i)
    order = sorted(range(len(torsion)), key=lambda i: torsion[i])
    torsion = [torsion[i] for i in order]
    rows = [rows[i] for i in order]
    U = np.array(U, dtype=object)
    gamma = np.zeros((G.order, len(rows)), dtype=np.int64)
    for g in range(G.order):
        v = np.array(word[coset_of[g]], dtype=object)
        coords = U.dot(v) if k else np.zeros(0, dtype=object)
        for j, (r, e) in enumerate(zip(rows, torsion)):
            gamma[g, j] = int(coords[r]) % p**e
    desc = AbelianizationDescriptor(p, 0, tuple(torsion))
    return ProPAbelianization(desc, gamma)


def abelianization(G: FiniteGroup, p: int) -> AbelianizationDescriptor:
    return pro_p_abelianization(G, p).descriptor


def glqp_descriptor(n: int, p: int) -> AbelianizationDescriptor:
    """Γ for GL_n(Q_p): pro-p completion of Q_p^× = p^Z × μ_{p-1} × U^1."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if p == 2:
        raise InvalidInput("p = 2 is not supported (U^1 has extra 2-torsion)")
    # p^Z contributes Z_p, μ_{p-1} is prime to p, U^1 ≅ Z_p via log
    return AbelianizationDescriptor(p, 2, ())


def homomorphisms(G: FiniteGroup, H: FiniteGroup):
    """All homomorphisms G -> H by exhaustive search over generator images."""
    out = []
    for imgs in itertools.product(range(H.order), repeat=len(G.generators)):
        try:
            out.append(GroupHom.from_generators(G, H, imgs))
        except NotAHomomorphism:
            pass
    return out
