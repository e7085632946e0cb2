"""Finite modules over a finite local ring: duals, tensor products, products.

A module is an abelian p-group ⊕ Z/p^{d_i} together with integer matrices
giving the action of each additive basis vector of the ring.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import linalg
from .config import get_caps
from .errors import CapExceeded, InvalidInput
from .rings import FiniteLocalAlgebra


class FiniteModule:
    def __init__(self, ring: FiniteLocalAlgebra, invariants, action, presentation=None, check=True):
        self.ring = ring
        self.p = ring.p
        self.invariants = tuple(int(d) for d in invariants)
        self.mods = np.array([self.p**d for d in self.invariants], dtype=np.int64)
        g = len(self.invariants)
        self.action = np.asarray(action, dtype=np.int64).reshape(ring.rank, g, g)
        if g:
            self.action = self.action % self.mods[None, :, None]
        self.presentation = presentation
        if check:
            self.verify()

    @property
    def rank(self):
        return len(self.invariants)

    @property
    def size_exp(self):
        return sum(self.invariants)

    @property
    def order(self):
        return self.p**self.size_exp

    def __repr__(self):
        return f"<module over {self.ring.name} with invariants {self.invariants}>"

    def reduce(self, m):
        return np.asarray(m, dtype=np.int64) % self.mods

    def scalar_matrix(self, a):
        """Matrix of multiplication by the ring element a."""
        a = np.asarray(a, dtype=np.int64)
        return np.tensordot(a, self.action, axes=(0, 0)) % self.mods[:, None] if self.rank else np.zeros((0, 0), dtype=np.int64)

    def act(self, a, m):
        return (self.scalar_matrix(a) @ np.asarray(m, dtype=np.int64)) % self.mods

    def verify(self):
        p, d = self.p, self.invariants
        A = self.ring
        for T in self.action:
            for i in range(self.rank):
                for j in range(self.rank):
                    # p^{d_j} e_j = 0 must map to 0
                    if (p ** d[j] * int(T[i, j])) % p ** d[i]:
                        raise InvalidInput("action matrix is not well defined")
        if self.rank == 0:
            return
        if np.any(self.scalar_matrix(A.one) != np.eye(self.rank, dtype=np.int64) % self.mods[:, None]):
            raise InvalidInput("1 does not act as the identity")
        for i in range(A.rank):
            for j in range(A.rank):
                lhs = (self.action[i] @ self.action[j]) % self.mods[:, None]
                rhs = self.scalar_matrix(A.table[i, j])
                if np.any(lhs != rhs):
                    raise InvalidInput("action is not multiplicative")

    def elements(self):
        if self.order > get_caps().ring:
            raise CapExceeded("module too large to enumerate")
        return np.array(list(itertools.product(*[range(int(m)) for m in self.mods])), dtype=np.int64).reshape(self.order, self.rank)

    def to_json(self):
        return {"ring": self.ring.name, "invariants": list(self.invariants), "order": self.order}


def free_module(A: FiniteLocalAlgebra, r: int) -> FiniteModule:
    ann = list(A.ann) * r
    action = np.zeros((A.rank, A.rank * r, A.rank * r), dtype=np.int64)
    for b in range(A.rank):
        # multiplication by basis vector b: e_j -> sum_k table[b, j, k] e_k
        M = A.table[b].T
        for s in range(r):
            action[b, s * A.rank : (s + 1) * A.rank, s * A.rank : (s + 1) * A.rank] = M
    return FiniteModule(A, ann, action, presentation=(r, []))


def quotient_module(M: FiniteModule, gens) -> tuple:
    """M / (A-submodule generated by gens) and the projection matrix."""
    A = M.ring
    vecs = []
    for g in gens:
        for b in range(A.rank):
            vecs.append((M.action[b] @ np.asarray(g, dtype=np.int64)) % M.mods)
    Q = linalg.quotient(list(M.invariants), vecs, M.p)
    mods = np.array([M.p**d for d in Q.new_ann], dtype=np.int64)
    r = len(Q.new_ann)
    action = np.zeros((A.rank, r, r), dtype=np.int64)
    for b in range(A.rank):
        action[b] = (Q.proj @ M.action[b] @ Q.lift) % mods[:, None] if r else action[b]
    return FiniteModule(A, Q.new_ann, action), Q


def from_presentation(A: FiniteLocalAlgebra, generators: int, relations) -> FiniteModule:
    """A^g / (relations), each relation a list of g ring elements."""
    F = free_module(A, generators)
    rel = [np.concatenate([np.asarray(x, dtype=np.int64) for x in r]) for r in relations]
    Mq, _ = quotient_module(F, rel)
    Mq.presentation = (generators, [[list(map(int, x)) for x in r] for r in relations])
    return Mq


def cyclic_module(A: FiniteLocalAlgebra, ideal_gens) -> FiniteModule:
    """A / I."""
    return from_presentation(A, 1, [[g] for g in ideal_gens])


def direct_product(M: FiniteModule, N: FiniteModule) -> FiniteModule:
    if M.ring != N.ring:
        raise InvalidInput("base ring mismatch")
    g, h = M.rank, N.rank
    action = np.zeros((M.ring.rank, g + h, g + h), dtype=np.int64)
    action[:, :g, :g] = M.action
    action[:, g:, g:] = N.action
    return FiniteModule(M.ring, M.invariants + N.invariants, action)


# ---------------------------------------------------------------------------
# duality with values in Q_p/Z_p


def dual_module(M: FiniteModule) -> FiniteModule:
    """Hom(M, Q_p/Z_p) in the dual basis f_i(e_j) = delta_ij / p^{d_i}."""
    if M.size_exp > round(np.log(get_caps().ring) / np.log(M.p)) + 1e-9:
        raise CapExceeded("module too large")
    d = M.invariants
    g = M.rank
    action = np.zeros_like(M.action)
    for b in range(M.ring.rank):
        T = M.action[b]
        for i in range(g):
            for j in range(g):
                # (a f)(m) = f(a m): coefficient on f_j is sum_i c_i T_ij p^{d_j - d_i}
                shift = d[j] - d[i]
                v = int(T[i, j])
                action[b, j, i] = v * M.p**shift if shift >= 0 else v // M.p ** (-shift)
    return FiniteModule(M.ring, d, action)


def pairing(M: FiniteModule, f, m) -> int:
    """f(m) in Q_p/Z_p, returned as an integer modulo p^K with K = max d."""
    if M.rank == 0:
        return 0
    K = max(M.invariants)
    f = np.asarray(f, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    weights = np.array([M.p ** (K - d) for d in M.invariants], dtype=np.int64)
    return int(np.sum(f * m * weights) % M.p**K)


def evaluation_map(M: FiniteModule):
    """Matrix of M -> M^vv, m -> (f -> f(m)), found by solving against the
    values on the dual basis."""
    D = dual_module(M)
    g = M.rank
    E = np.zeros((g, g), dtype=np.int64)
    for j in range(g):
        e = np.zeros(g, dtype=np.int64)
        e[j] = 1
        # ev(e_j)(f_i) = f_i(e_j); in the double-dual basis the coefficient
        # on the i-th vector is p^{d_i} times that value
        for i in range(g):
            fi = np.zeros(g, dtype=np.int64)
            fi[i] = 1
            val = pairing(M, fi, e)
            K = max(M.invariants)
            E[i, j] = (val // M.p ** (K - M.invariants[i])) % M.p ** D.invariants[i]
    return E


def is_isomorphism(M: FiniteModule, N: FiniteModule, F) -> bool:
    """F: M -> N (matrix on coordinates) is an A-linear bijection."""
    if M.ring != N.ring or M.order != N.order:
        return False
    F = np.asarray(F, dtype=np.int64).reshape(N.rank, M.rank)
    for j in range(M.rank):
        # well defined: p^{d_j} e_j must map to 0
        if ((M.p ** M.invariants[j] * F[:, j]) % N.mods).any():
            return False
    for b in range(M.ring.rank):
        if np.any((F @ M.action[b]) % N.mods[:, None] != (N.action[b] @ F) % N.mods[:, None]):
            return False
    if M.rank == 0:
        return True
    _, orders = linalg.kernel(F, M.invariants, N.invariants, M.p)
    return sum(orders) == 0


def double_dual_check(M: FiniteModule) -> bool:
    DD = dual_module(dual_module(M))
    E = evaluation_map(M)
    if not is_isomorphism(M, DD, E):
        return False
    # elementwise on small modules: ev(m)(f) = f(m)
    D = dual_module(M)
    if M.order <= 729:
        for m in M.elements():
            em = (E @ m) % DD.mods
            for f in D.elements():
                if pairing(D, em, f) != pairing(M, f, m):
                    return False
    return True


# ---------------------------------------------------------------------------
# tensor products


def tensor_modules(M: FiniteModule, N: FiniteModule):
    """M ⊗_A N; returns (module, projection from the Z-tensor coordinates)."""
    if M.ring != N.ring:
        raise InvalidInput("base ring mismatch")
    A = M.ring
    g, h = M.rank, N.rank
    inv = [min(a, b) for a in M.invariants for b in N.invariants]
    idx = lambda i, j: i * h + j  # noqa: E731
    mods = np.array([A.p**d for d in inv], dtype=np.int64)
    rels = []
    for b in range(A.rank):
        TM, TN = M.action[b], N.action[b]
        for i in range(g):
            for j in range(h):
                v = np.zeros(g * h, dtype=np.int64)
                for k in range(g):
                    v[idx(k, j)] += TM[k, i]
                for l in range(h):
                    v[idx(i, l)] -= TN[l, j]
                rels.append(v % mods)
    # action through the left factor
    action = np.zeros((A.rank, g * h, g * h), dtype=np.int64)
    for b in range(A.rank):
        for i in range(g):
            for j in range(h):
                for k in range(g):
                    action[b, idx(k, j), idx(i, j)] = M.action[b, k, i]
    big = FiniteModule(A, inv, action % mods[None, :, None] if len(inv) else action, check=False)
    Q = linalg.quotient(inv, rels, A.p)
    qmods = np.array([A.p**d for d in Q.new_ann], dtype=np.int64)
    r = len(Q.new_ann)
    qa = np.zeros((A.rank, r, r), dtype=np.int64)
    for b in range(A.rank):
        if r:
            qa[b] = (Q.proj @ big.action[b] @ Q.lift) % qmods[:, None]
    return FiniteModule(A, Q.new_ann, qa), Q


def tensor_product_map(M, N1, N2):
    """Natural map M ⊗ (N1 x N2) -> (M ⊗ N1) x (M ⊗ N2) as a matrix."""
    N = direct_product(N1, N2)
    T, Q = tensor_modules(M, N)
    T1, Q1 = tensor_modules(M, N1)
    T2, Q2 = tensor_modules(M, N2)
    target = direct_product(T1, T2)
    g, h1, h2 = M.rank, N1.rank, N2.rank
    cols = []
    for c in range(T.rank):
        v = Q.lift[:, c]  # coordinates on pairs (i, j), j over N1 then N2
        v = v.reshape(g, h1 + h2)
        a = (Q1.proj @ v[:, :h1].reshape(-1)) if T1.rank else np.zeros(0, dtype=np.int64)
        b = (Q2.proj @ v[:, h1:].reshape(-1)) if T2.rank else np.zeros(0, dtype=np.int64)
        cols.append(np.concatenate([a, b]) % target.mods if target.rank else np.zeros(0, dtype=np.int64))
    F = np.stack(cols, axis=1) if cols else np.zeros((target.rank, 0), dtype=np.int64)
    return T, target, F


def distributivity_check(M, N1, N2) -> bool:
    T, target, F = tensor_product_map(M, N1, N2)
    return is_isomorphism(T, target, F)


def unit_map(M: FiniteModule):
    """A ⊗_A M -> M, a ⊗ m -> a m."""
    A = M.ring
    F0 = free_module(A, 1)
    T, Q = tensor_modules(F0, M)
    cols = []
    for c in range(T.rank):
        v = Q.lift[:, c].reshape(A.rank, M.rank)
        out = np.zeros(M.rank, dtype=np.int64)
        for i in range(A.rank):
            out = out + M.action[i] @ v[i]
        cols.append(out % M.mods)
    F = np.stack(cols, axis=1) if cols else np.zeros((M.rank, 0), dtype=np.int64)
    return T, F


def unit_check(M: FiniteModule) -> bool:
    T, F = unit_map(M)
    return is_isomorphism(T, M, F)


def residue_module(A: FiniteLocalAlgebra) -> FiniteModule:
    """k = A / m_A."""
    return cyclic_module(A, list(A.m_basis))


def module_catalog(A: FiniteLocalAlgebra):
    """Small modules over A: 0, k, A/m^2, A, A x k."""
    k = residue_module(A)
    out = [("0", free_module(A, 0)), ("k", k)]
    m2 = A.m_powers[1][0] if len(A.m_powers) > 1 else []
    out.append(("A/m^2", cyclic_module(A, list(m2))))
    out.append(("A", free_module(A, 1)))
    out.append(("A x k", direct_product(free_module(A, 1), k)))
    return out
