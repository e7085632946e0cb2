"""Finite commutative local Z/p^N-algebras with residue field F_p.

A ring is a structure-constant algebra: a basis ``e_0..e_{r-1}`` where
``e_i`` has additive order ``p^{ann[i]}``, a table ``T[i, j, k]`` with
``e_i e_j = sum_k T[i, j, k] e_k``, the coordinates of the unit and the
residue functional to F_p.  Elements are integer coordinate vectors; every
arithmetic routine accepts stacked arrays of shape ``(..., r)``.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from . import linalg
from .config import get_caps
from .errors import CapExceeded, InvalidInput


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


class FiniteLocalAlgebra:
    def __init__(self, p, ann, table, one, residue, name=None, presentation=None, check=True):
        if not is_prime(p):
            raise InvalidInput(f"{p} is not prime")
        self.p = p
        self.ann = tuple(int(a) for a in ann)
        if not self.ann or min(self.ann) < 1:
            raise InvalidInput("annihilator exponents must be >= 1")
        self.rank = len(self.ann)
        self.N = max(self.ann)
        self.size_exp = sum(self.ann)
        cap = get_caps().ring
        if p**self.size_exp > cap:
            raise CapExceeded(f"ring of order {p}^{self.size_exp} exceeds cap {cap}")
        self.order = p**self.size_exp
        self.mods = np.array([p**a for a in self.ann], dtype=np.int64)
        self.table = np.asarray(table, dtype=np.int64).reshape(self.rank, self.rank, self.rank) % self.mods
        self.table.flags.writeable = False
        self._flat = self.table.reshape(self.rank * self.rank, self.rank)
        self.one = np.asarray(one, dtype=np.int64) % self.mods
        self.residue_form = np.asarray(residue, dtype=np.int64) % p
        self.name = name or f"A(p={p}, ann={self.ann})"
        # (algebra generators, exponent word of each basis vector); used to
        # enumerate morphisms out of this ring
        self.presentation = presentation
        if check:
            self.verify()

    # -- identity -----------------------------------------------------------
    @cached_property
    def key(self):
        return (self.p, self.ann, self.table.tobytes(), self.one.tobytes(), self.residue_form.tobytes())

    def __eq__(self, other):
        return isinstance(other, FiniteLocalAlgebra) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"<{self.name}: order {self.p}^{self.size_exp}>"

    def __call__(self, value):
        return RingElement(self, self.coerce(value))

    # -- arithmetic on coordinate arrays -------------------------------------
    def coerce(self, value) -> np.ndarray:
        """Coordinates of an int (multiple of 1) or coordinate sequence."""
        if isinstance(value, RingElement):
            if value.ring != self:
                raise InvalidInput("element of a different ring")
            return value.coords
        if isinstance(value, (int, np.integer)):
            return self.scalar(int(value))
        v = np.asarray(value, dtype=np.int64)
        if v.shape != (self.rank,):
            raise InvalidInput(f"expected {self.rank} coordinates, got shape {v.shape}")
        return v % self.mods

    def reduce(self, x):
        return np.asarray(x, dtype=np.int64) % self.mods

    def zero(self):
        return np.zeros(self.rank, dtype=np.int64)

    def scalar(self, c: int):
        return (c * self.one) % self.mods

    def add(self, x, y):
        return (np.asarray(x) + np.asarray(y)) % self.mods

    def sub(self, x, y):
        return (np.asarray(x) - np.asarray(y)) % self.mods

    def neg(self, x):
        return (-np.asarray(x)) % self.mods

    def mul(self, x, y):
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        outer = x[..., :, None] * y[..., None, :]
        z = outer.reshape(outer.shape[:-2] + (self.rank * self.rank,)) @ self._flat
        return z % self.mods

    def power(self, x, k: int):
        result = np.broadcast_to(self.one, np.shape(x)).copy()
        base = np.asarray(x, dtype=np.int64)
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def residue(self, x):
        return (np.asarray(x, dtype=np.int64) @ self.residue_form) % self.p

    def is_unit(self, x):
        return self.residue(x) != 0

    def inv(self, x):
        """Inverse of a unit (vectorized), by Newton iteration from F_p."""
        x = np.asarray(x, dtype=np.int64)
        r = self.residue(x)
        if np.any(r == 0):
            raise InvalidInput("element is not a unit")
        rinv = np.vectorize(lambda a: pow(int(a), -1, self.p), otypes=[np.int64])(r)
        y = (rinv[..., None] * self.one) % self.mods
        two = self.scalar(2)
        for _ in range(self.N * self.rank + 2):
            y = self.mul(y, self.sub(two, self.mul(x, y)))
        if not np.all(self.mul(x, y) == self.one):
            raise AssertionError("Newton inversion did not converge")
        return y

    # -- matrices over the ring: arrays of shape (..., n, n, r) ----------------
    def eye(self, n: int):
        out = np.zeros((n, n, self.rank), dtype=np.int64)
        for i in range(n):
            out[i, i] = self.one
        return out

    def matmul(self, X, Y):
        X = np.asarray(X, dtype=np.int64)
        Y = np.asarray(Y, dtype=np.int64)
        P = np.einsum("...ika,...kjb->...ijab", X, Y)
        Z = P.reshape(P.shape[:-2] + (self.rank * self.rank,)) @ self._flat
        return Z % self.mods

    def lift_matrix(self, M):
        """Matrix of integers (multiples of 1) -> coordinate array."""
        M = np.asarray(M, dtype=np.int64)
        return (M[..., None] * self.one) % self.mods

    def residue_matrix(self, X):
        return self.residue(X)

    # -- structure ------------------------------------------------------------
    def elements(self) -> np.ndarray:
        grids = [range(int(m)) for m in self.mods]
        return np.array(list(itertools.product(*grids)), dtype=np.int64).reshape(-1, self.rank)

    @cached_property
    def maximal_ideal(self):
        """(basis, orders) of m_A = ker(residue) as an abelian group."""
        return linalg.kernel(self.residue_form.reshape(1, -1), self.ann, [1], self.p)

    @property
    def m_basis(self):
        return self.maximal_ideal[0]

    @cached_property
    def m_exp(self) -> int:
        """log_p |m_A|."""
        return sum(self.maximal_ideal[1])

    def span_elements(self, basis, orders) -> np.ndarray:
        if not basis:
            return np.zeros((1, self.rank), dtype=np.int64)
        B = np.stack(basis)
        coeffs = np.array(list(itertools.product(*[range(self.p**o) for o in orders])), dtype=np.int64)
        return (coeffs @ B) % self.mods

    def m_elements(self) -> np.ndarray:
        return self.span_elements(*self.maximal_ideal)

    def ideal_generated(self, gens):
        """(basis, orders) of the ideal generated by ``gens``."""
        gens = [np.asarray(g, dtype=np.int64) for g in gens]
        basis = np.eye(self.rank, dtype=np.int64)
        products = [self.mul(g, b) for g in gens for b in basis]
        return linalg.subgroup_basis(products, self.ann, self.p)

    def ideal_product(self, I, J):
        prods = [self.mul(a, b) for a in I[0] for b in J[0]]
        if not prods:
            return [], []
        return linalg.subgroup_basis(prods, self.ann, self.p)

    @cached_property
    def m_powers(self):
        """[m^1, m^2, ..., m^{e-1}] as (basis, orders) pairs, m^e = 0."""
        powers = []
        cur = self.maximal_ideal
        while cur[0]:
            powers.append(cur)
            cur = self.ideal_product(cur, self.maximal_ideal)
            if len(powers) > self.size_exp + 1:
                raise AssertionError("maximal ideal is not nilpotent")
        return powers

    @property
    def nilpotency(self) -> int:
        """Smallest e with m^e = 0."""
        return len(self.m_powers) + 1

    def verify(self):
        p, r, T = self.p, self.rank, self.table
        # well defined with respect to the annihilators
        for i in range(r):
            if np.any((self.p ** self.ann[i] * T[i]) % self.mods):
                raise InvalidInput(f"structure constants of basis vector {i} ignore its order")
        if np.any(T != T.transpose(1, 0, 2)):
            raise InvalidInput("multiplication is not commutative")
        E = np.eye(r, dtype=np.int64)
        left = self.mul(self.mul(E[:, None, None, :], E[None, :, None, :]), E[None, None, :, :])
        right = self.mul(E[:, None, None, :], self.mul(E[None, :, None, :], E[None, None, :, :]))
        if np.any(left != right):
            raise InvalidInput("multiplication is not associative")
        if np.any(self.mul(self.one, E) != E):
            raise InvalidInput("unit coordinates are not a unit")
        # residue map is a unital ring map
        if self.residue(self.one) != 1:
            raise InvalidInput("residue map is not unital")
        res_prod = self.residue(self.mul(E[:, None, :], E[None, :, :]))
        if np.any(res_prod != np.outer(self.residue_form, self.residue_form) % p):
            raise InvalidInput("residue map is not multiplicative")
        # nilpotency of m bounded by rank * N
        if self.nilpotency > self.rank * self.N + 1:
            raise InvalidInput("maximal ideal nilpotency degree too large")
        if p ** (self.size_exp - self.m_exp) != p:
            raise InvalidInput("residue field is not F_p")

    def verify_exhaustive(self):
        """Units are exactly the elements outside m; m is nil (all elements)."""
        els = self.elements()
        res = self.residue(els)
        units = els[res != 0]
        if len(units):
            inv = self.inv(units)
            if np.any(self.mul(units, inv) != self.one):
                raise AssertionError("a non-residue-zero element is not invertible")
        nil = els[res == 0]
        if np.any(self.power(nil, self.nilpotency) != 0):
            raise AssertionError("an element of m is not nilpotent")
        return True

    def describe(self) -> dict:
        return {
            "name": self.name,
            "p": self.p,
            "N": self.N,
            "rank": self.rank,
            "cardinality": self.order,
            "nilpotency": self.nilpotency,
        }


class RingElement:
    __slots__ = ("ring", "coords")

    def __init__(self, ring, coords):
        self.ring = ring
        self.coords = np.asarray(coords, dtype=np.int64) % ring.mods
        self.coords.flags.writeable = False

    def _other(self, other):
        return self.ring.coerce(other)

    def __add__(self, other):
        return RingElement(self.ring, self.ring.add(self.coords, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return RingElement(self.ring, self.ring.sub(self.coords, self._other(other)))

    def __rsub__(self, other):
        return RingElement(self.ring, self.ring.sub(self._other(other), self.coords))

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.coords))

    def __mul__(self, other):
        return RingElement(self.ring, self.ring.mul(self.coords, self._other(other)))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return RingElement(self.ring, self.ring.power(self.ring.inv(self.coords), -k))
        return RingElement(self.ring, self.ring.power(self.coords, k))

    def inverse(self):
        return RingElement(self.ring, self.ring.inv(self.coords))

    def is_unit(self) -> bool:
        return bool(self.ring.is_unit(self.coords))

    def residue(self) -> int:
        return int(self.ring.residue(self.coords))

    def __eq__(self, other):
        try:
            return bool(np.all(self.coords == self._other(other)))
        except InvalidInput:
            return False

    def __hash__(self):
        return hash((self.ring, self.coords.tobytes()))

    def __repr__(self):
        return f"{tuple(int(c) for c in self.coords)}"


class RingMorphism:
    """Z-linear map given by target coordinates of each source basis vector."""

    def __init__(self, source, target, matrix, check=True):
        self.source = source
        self.target = target
        self.matrix = np.asarray(matrix, dtype=np.int64).reshape(target.rank, source.rank) % target.mods[:, None]
        if source.p != target.p:
            raise InvalidInput("rings over different primes")
        if check:
            problem = self.defect()
            if problem:
                raise InvalidInput(f"not a ring morphism: {problem}")

    def defect(self):
        S, T = self.source, self.target
        for i in range(S.rank):
            if np.any((S.p ** S.ann[i] * self.matrix[:, i]) % T.mods):
                return f"image of basis vector {i} has the wrong order"
        if np.any(self(S.one) != T.one):
            return "not unital"
        E = np.eye(S.rank, dtype=np.int64)
        prod = self(S.mul(E[:, None, :], E[None, :, :]))
        img = self(E)
        if np.any(prod != T.mul(img[:, None, :], img[None, :, :])):
            return "not multiplicative"
        if np.any(T.residue(img) != S.residue(E)):
            return "does not induce the identity on residue fields"
        return None

    def __call__(self, x):
        x = np.asarray(x, dtype=np.int64)
        return (x @ self.matrix.T) % self.target.mods

    def compose(self, inner: "RingMorphism") -> "RingMorphism":
        """self ∘ inner."""
        if inner.target != self.source:
            raise InvalidInput("morphisms are not composable")
        return RingMorphism(inner.source, self.target, self.matrix @ inner.matrix, check=False)

    def __eq__(self, other):
        return (
            isinstance(other, RingMorphism)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.matrix.tobytes()))

    def __repr__(self):
        return f"<{self.source.name} -> {self.target.name}>"

    @cached_property
    def kernel(self):
        return linalg.kernel(self.matrix, self.source.ann, self.target.ann, self.source.p)

    def is_surjective(self) -> bool:
        return linalg.image_exponent(self.matrix, self.source.ann, self.target.ann, self.source.p) == self.target.size_exp

    def is_injective(self) -> bool:
        return not self.kernel[0]

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.source.order == self.target.order

    @cached_property
    def section(self) -> np.ndarray:
        """Matrix S with self(S y) = y for reduced y (a set-theoretic section)."""
        S, T = self.source, self.target
        cols = []
        for j in range(T.rank):
            e = np.zeros(T.rank, dtype=np.int64)
            e[j] = 1
            x = linalg.solve(self.matrix, S.ann, T.ann, e, S.p)
            if x is None:
                raise InvalidInput("morphism is not surjective")
            cols.append(x)
        return np.stack(cols, axis=1)

    def lift(self, y):
        """Set-theoretic preimage of coordinate arrays (..., r_target)."""
        y = self.target.reduce(y)
        return (y @ self.section.T) % self.source.mods


def identity(A) -> RingMorphism:
    return RingMorphism(A, A, np.eye(A.rank, dtype=np.int64), check=False)


# ---------------------------------------------------------------------------
# presets


def _check_prime(p):
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")


def Zpn(p: int, N: int = 1) -> FiniteLocalAlgebra:
    _check_prime(p)
    if N < 1:
        raise InvalidInput("N must be >= 1")
    name = f"F_{p}" if N == 1 else f"Z/{p}^{N}"
    return FiniteLocalAlgebra(p, [N], [[[1]]], [1], [1], name=name, presentation=([], [()]))


def truncated(p: int, e: int) -> FiniteLocalAlgebra:
    """F_p[x]/(x^e), basis 1, x, ..., x^{e-1}."""
    _check_prime(p)
    if e < 1:
        raise InvalidInput("e must be >= 1")
    T = np.zeros((e, e, e), dtype=np.int64)
    for i in range(e):
        for j in range(e):
            if i + j < e:
                T[i, j, i + j] = 1
    one = np.eye(e, dtype=np.int64)[0]
    x = np.eye(e, dtype=np.int64)[1] if e > 1 else np.zeros(e, dtype=np.int64)
    gens = [x] if e > 1 else []
    words = [(i,) for i in range(e)] if e > 1 else [()]
    name = f"F_{p}[x]/(x^{e})"
    return FiniteLocalAlgebra(p, [1] * e, T, one, one, name=name, presentation=(gens, words))


def dual_numbers(p: int) -> FiniteLocalAlgebra:
    A = truncated(p, 2)
    A.name = f"F_{p}[eps]"
    return A


def mixed(p: int, N: int = 2) -> FiniteLocalAlgebra:
    """Z/p^N[x]/(x^2, p x), basis 1 (order p^N), x (order p)."""
    _check_prime(p)
    T = np.zeros((2, 2, 2), dtype=np.int64)
    T[0, 0, 0] = 1
    T[0, 1, 1] = T[1, 0, 1] = 1
    return FiniteLocalAlgebra(
        p, [N, 1], T, [1, 0], [1, 0], name=f"Z/{p}^{N}[x]/(x^2,{p}x)", presentation=([np.array([0, 1])], [(0,), (1,)])
    )


PRESETS = ("Zpn", "dual", "trunc", "mixed")


def make_preset_ring(preset: str, p: int, N: int = 1, e: int = 2) -> FiniteLocalAlgebra:
    if preset == "Zpn":
        A = Zpn(p, N)
    elif preset == "dual":
        A = dual_numbers(p)
    elif preset == "trunc":
        A = truncated(p, e)
    elif preset == "mixed":
        A = mixed(p, N)
    else:
        raise InvalidInput(f"unknown ring preset {preset!r}")
    return A


def residue_map(A) -> RingMorphism:
    return RingMorphism(A, Zpn(A.p, 1), A.residue_form.reshape(1, -1), check=False)


def reduction(p: int, N: int, M: int) -> RingMorphism:
    """Z/p^N -> Z/p^M for M <= N."""
    return RingMorphism(Zpn(p, N), Zpn(p, M), [[1]])


def truncation(p: int, e: int, f: int) -> RingMorphism:
    """F_p[x]/(x^e) -> F_p[x]/(x^f), f <= e."""
    M = np.zeros((f, e), dtype=np.int64)
    for i in range(f):
        M[i, i] = 1
    return RingMorphism(truncated(p, e), truncated(p, f), M)


# ---------------------------------------------------------------------------
# constructions


def _basis_coordinates(basis, orders, ann, p, vectors):
    """Coordinates of ``vectors`` (rows) in the given subgroup basis."""
    B = np.stack(basis, axis=1)
    out = []
    for v in np.atleast_2d(vectors):
        c = linalg.solve(B, orders, ann, v, p)
        if c is None:
            raise InvalidInput("vector outside the subgroup")
        out.append(c)
    return np.array(out, dtype=np.int64)


def _subring(p, basis, orders, ann, mul, one, residue, name):
    """Ring structure on a subgroup closed under ``mul``."""
    r = len(basis)
    T = np.zeros((r, r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            T[i, j] = _basis_coordinates(basis, orders, ann, p, mul(basis[i], basis[j]))[0]
    one_c = _basis_coordinates(basis, orders, ann, p, one)[0]
    res = np.array([residue(b) for b in basis], dtype=np.int64)
    return FiniteLocalAlgebra(p, orders, T, one_c, res, name=name)


def fiber_product(phi1: RingMorphism, phi2: RingMorphism):
    """A1 ×_{A0} A2 with its two projections."""
    A1, A2, A0 = phi1.source, phi2.source, phi1.target
    if phi2.target != A0:
        raise InvalidInput("morphisms have different targets")
    if len({A1.p, A2.p, A0.p}) != 1:
        raise InvalidInput("mismatched primes")
    if not (phi1.is_surjective() and phi2.is_surjective()):
        raise InvalidInput("fiber product needs surjective morphisms")
    p = A0.p
    ann = list(A1.ann) + list(A2.ann)
    r1 = A1.rank
    D = np.hstack([phi1.matrix, -phi2.matrix])
    basis, orders = linalg.kernel(D, ann, A0.ann, p)
    if p ** sum(orders) > get_caps().ring:
        raise CapExceeded(f"fiber product of order {p}^{sum(orders)} exceeds cap")

    def mul(a, b):
        return np.concatenate([A1.mul(a[:r1], b[:r1]), A2.mul(a[r1:], b[r1:])])

    one = np.concatenate([A1.one, A2.one])
    A3 = _subring(p, basis, orders, ann, mul, one, lambda b: A1.residue(b[:r1]), f"({A1.name} x_{A0.name} {A2.name})")
    B = np.stack(basis, axis=1)
    pi1 = RingMorphism(A3, A1, B[:r1], check=True)
    pi2 = RingMorphism(A3, A2, B[r1:], check=True)
    return A3, pi1, pi2


def glue_elements(pi1: RingMorphism, pi2: RingMorphism, a1, a2):
    """The element of the fiber product with projections (a1, a2)."""
    A3 = pi1.source
    M = np.vstack([pi1.matrix, pi2.matrix])
    tgt = list(pi1.target.ann) + list(pi2.target.ann)
    a1 = np.atleast_2d(a1)
    a2 = np.atleast_2d(a2)
    out = []
    for x, y in zip(a1, a2):
        c = linalg.solve(M, A3.ann, tgt, np.concatenate([x, y]), A3.p)
        if c is None:
            raise InvalidInput("pair is not in the fiber product")
        out.append(c)
    return np.array(out, dtype=np.int64)


def quotient_ring(A, ideal_gens, name=None):
    """A/I and the projection, for the ideal generated by ``ideal_gens``."""
    basis, _ = A.ideal_generated(ideal_gens)
    Q = linalg.quotient(A.ann, basis, A.p)
    r = len(Q.new_ann)
    if r == 0:
        raise InvalidInput("quotient by the unit ideal")
    proj = lambda x: (Q.proj @ (np.asarray(x) % A.mods)) % np.array([A.p**a for a in Q.new_ann])
    lifts = [Q.lift[:, i] for i in range(r)]
    T = np.zeros((r, r, r), dtype=np.int64)
    for i in range(r):
        for j in range(r):
            T[i, j] = proj(A.mul(lifts[i], lifts[j]))
    res = np.array([A.residue(l) for l in lifts], dtype=np.int64)
    B = FiniteLocalAlgebra(A.p, Q.new_ann, T, proj(A.one), res, name=name or f"{A.name}/I")
    return B, RingMorphism(A, B, Q.proj)


def is_small_extension(phi: RingMorphism):
    """(True, kernel generator) iff ker phi is nonzero, principal, killed by m."""
    if not phi.is_surjective():
        raise InvalidInput("is_small_extension needs a surjective morphism")
    A = phi.source
    basis, orders = phi.kernel
    if not basis or sum(orders) != 1:
        return False, None
    t = basis[0]
    if any(np.any(A.mul(t, m)) for m in A.m_basis):
        return False, None
    return True, t


def _socle_element(A, basis, orders):
    """A nonzero element of the ideal spanned by ``basis`` killed by m."""
    p = A.p
    ms = A.m_basis
    # map ideal coordinates c -> (c·b)·m_k for every generator m_k of m
    cols = []
    for b in basis:
        cols.append(np.concatenate([A.mul(b, m) for m in ms]) if ms else np.zeros(0, dtype=np.int64))
    F = np.stack(cols, axis=1)
    tgt = list(A.ann) * len(ms)
    kb, ko = linalg.kernel(F, orders, tgt, p)
    B = np.stack(basis, axis=1)
    for c, o in zip(kb, ko):
        t = (B @ c) % A.mods
        t = (p ** (o - 1) * t) % A.mods
        if t.any():
            return t
    raise AssertionError("ideal has no socle element")


def factor_into_small_extensions(phi: RingMorphism):
    """Chain [A -> A', A' -> A'', ..., -> B] of small extensions composing to phi."""
    if not phi.is_surjective():
        raise InvalidInput("factorization needs a surjective morphism")
    chain = []
    cur = phi
    while cur.kernel[0]:
        small, _ = is_small_extension(cur)
        if small:
            chain.append(cur)
            break
        A = cur.source
        t = _socle_element(A, *cur.kernel)
        B, q = quotient_ring(A, [t], name=f"{A.name}/({tuple(int(c) for c in t)})")
        rest = RingMorphism(B, cur.target, (cur.matrix @ q.section) % cur.target.mods[:, None], check=True)
        chain.append(q)
        cur = rest
    if not chain and not cur.is_isomorphism():
        raise AssertionError("trivial kernel but not an isomorphism")
    return chain


def residue_tower(A):
    """Small extensions A = A_k -> ... -> A_0 = F_p (top first)."""
    return factor_into_small_extensions(residue_map(A))


def tensor_rings(A, B):
    """A ⊗_Z B with the structure maps a -> a⊗1 and b -> 1⊗b."""
    if A.p != B.p:
        raise InvalidInput("mismatched primes")
    p = A.p
    ra, rb = A.rank, B.rank
    ann = [min(A.ann[i], B.ann[j]) for i in range(ra) for j in range(rb)]
    if p ** sum(ann) > get_caps().ring:
        raise CapExceeded("tensor product exceeds ring cap")
    T = np.einsum("iku,jlv->ijkluv", A.table, B.table).reshape(ra * rb, ra * rb, ra * rb)
    one = np.outer(A.one, B.one).ravel()
    res = np.outer(A.residue_form, B.residue_form).ravel()
    mods = np.array([p**a for a in ann], dtype=np.int64)
    C = FiniteLocalAlgebra(p, ann, T % mods, one % mods, res, name=f"({A.name} (x) {B.name})")
    ia = np.einsum("iu,j->uji", np.eye(ra, dtype=np.int64), B.one).reshape(ra * rb, ra)
    ib = np.einsum("i,ju->iju", A.one, np.eye(rb, dtype=np.int64)).reshape(ra * rb, rb)
    return C, RingMorphism(A, C, ia), RingMorphism(B, C, ib)


def ring_homs(T, A):
    """All ring morphisms T -> A (T must carry a presentation)."""
    if T.presentation is None:
        raise InvalidInput(f"{T.name} has no presentation to enumerate morphisms from")
    gens, words = T.presentation
    candidates = A.m_elements()
    out = []
    for images in itertools.product(range(len(candidates)), repeat=len(gens)):
        ys = [candidates[i] for i in images]
        cols = []
        for w in words:
            v = A.one.copy()
            for y, k in zip(ys, w):
                v = A.mul(v, A.power(y, k))
            cols.append(v)
        phi = RingMorphism(T, A, np.stack(cols, axis=1), check=False)
        if phi.defect() is None:
            out.append(phi)
    return out
