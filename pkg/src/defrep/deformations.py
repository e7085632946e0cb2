"""Lifts, deformation classes and the structural checks on them.

A lift of rhobar to A is stored by its generator images, an array of shape
(k, n, n, r).  Lift sets are kept sorted lexicographically on the flattened
images, so the first member of an orbit is its canonical representative.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .cohomology import h1, h2, obstruction_class, small_kernel_coefficients
from .config import get_caps
from .errors import CapExceeded, ConsistencyError, HypothesisWarning, InvalidInput
from .groups import FiniteGroup
from .reps import (
    MatrixRep,
    centralizer_orders_batch,
    has_central_character,
    is_absolutely_irreducible,
    propagate,
    reduce_rep,
    stabilizer_in_congruence,
    tensor_reps,
    twist,
    unipotent_inv,
)
from .rings import (
    FiniteLocalAlgebra,
    RingMorphism,
    dual_numbers,
    fiber_product,
    glue_elements,
    is_small_extension,
    reduction,
    residue_map,
    residue_tower,
)

STRATEGIES = ("tower", "exhaustive")


# ---------------------------------------------------------------------------
# helpers on stacked generator images


def _flat(Z):
    Z = np.asarray(Z, dtype=np.int64)
    return Z.reshape(Z.shape[0], -1)


def _void(flat):
    flat = np.ascontiguousarray(flat, dtype=np.int64)
    return flat.view(np.dtype((np.void, flat.shape[1] * 8))).ravel()


def _canonical_sort(Z):
    """Deduplicate and sort stacked images lexicographically."""
    if len(Z) == 0:
        return Z
    shape = Z.shape[1:]
    flat = np.unique(_flat(Z), axis=0)
    return flat.reshape((-1,) + shape)


def _relations_ok(G: FiniteGroup, A: FiniteLocalAlgebra, positions, Z, chunk=20000):
    """For a batch Z (B, len(positions), n, n, r) of images of the generators
    at ``positions``, test whether they define a homomorphism on the subgroup
    those generators span."""
    gens = [G.generators[i] for i in positions]
    # BFS over the subgroup by right multiplication
    order = [G.identity]
    where = {G.identity: 0}
    tree = []
    for x in order:
        for j, s in enumerate(gens):
            y = int(G.table[x, s])
            if y not in where:
                where[y] = len(order)
                order.append(y)
                tree.append((where[y], where[x], j))
    edges = [(where[x], j, where[int(G.table[x, s])]) for x in order for j, s in enumerate(gens)]
    out = np.zeros(len(Z), dtype=bool)
    n = Z.shape[-2]
    for lo in range(0, len(Z), chunk):
        z = Z[lo : lo + chunk]
        T = np.zeros((len(z), len(order), n, n, A.rank), dtype=np.int64)
        T[:, 0] = A.eye(n)
        for i, parent, j in tree:
            T[:, i] = A.matmul(T[:, parent], z[:, j])
        src = np.array([e[0] for e in edges])
        gj = np.array([e[1] for e in edges])
        dst = np.array([e[2] for e in edges])
        prod = A.matmul(T[:, src], z[:, gj])
        out[lo : lo + chunk] = np.all(prod == T[:, dst], axis=(1, 2, 3, 4))
    return out


def _matrix_power(A, X, k):
    n = X.shape[-2]
    result = np.broadcast_to(A.eye(n), X.shape).copy()
    base = X.copy()
    while k:
        if k & 1:
            result = A.matmul(result, base)
        base = A.matmul(base, base)
        k >>= 1
    return result


def _residual_check(rhobar):
    A = rhobar.ring
    if not (A.rank == 1 and A.ann == (1,)):
        raise InvalidInput("the residual representation must be over F_p")


# ---------------------------------------------------------------------------
# lift sets


@dataclass
class LiftSet:
    rhobar: MatrixRep
    ring: FiniteLocalAlgebra
    gen_images: np.ndarray  # (L, k, n, n, r), sorted and deduplicated
    complete: bool = True
    strategy: str = "tower"

    def __post_init__(self):
        self._keys = _void(_flat(self.gen_images)) if len(self.gen_images) else None
        if self._keys is not None:
            self._order = np.argsort(self._keys, kind="stable")
            self._sorted = self._keys[self._order]

    def __len__(self):
        return len(self.gen_images)

    def rep(self, i) -> MatrixRep:
        G = self.rhobar.group
        return MatrixRep(G, self.ring, propagate(G, self.ring, self.gen_images[i]), check=False)

    def reps(self):
        return [self.rep(i) for i in range(len(self))]

    def index_of(self, Z):
        """Index of each stacked image tuple in the set, -1 when absent."""
        Z = np.asarray(Z, dtype=np.int64).reshape((-1,) + self.gen_images.shape[1:])
        if self._keys is None:
            return np.full(len(Z), -1)
        q = _void(_flat(Z))
        pos = np.searchsorted(self._sorted, q)
        pos = np.minimum(pos, len(self._sorted) - 1)
        hit = self._sorted[pos] == q
        return np.where(hit, self._order[pos], -1)


def _residual_images(rhobar, A):
    return A.lift_matrix(rhobar.gen_images[..., 0])


def _lift_over_small(G, Y_base, phi: RingMorphism, t, verify=True):
    """All lifts along the small extension phi: A -> B of the lifts whose
    images over B are ``Y_base`` (L, k, n, n, r_B)."""
    A = phi.source
    p = A.p
    L, k, n = Y_base.shape[0], Y_base.shape[1], Y_base.shape[2]
    if L == 0:
        return np.zeros((0, k, n, n, A.rank), dtype=np.int64)
    Y = phi.lift(Y_base)
    dim = k * n * n
    gens = list(G.generators)
    tgt = G.table[:, gens]  # (|G|, k)

    def defect_coeffs(Z):
        T = propagate(G, A, Z)
        prod = A.matmul(T[:, :, None], Z[:, None, :])
        d = (prod - T[:, tgt]) % A.mods
        return small_kernel_coefficients(A, t, d).reshape(len(Z), -1)

    c0 = np.concatenate([defect_coeffs(Y[i : i + 2048]) for i in range(0, L, 2048)])
    # linear part, evaluated on the first base lift
    E = np.eye(dim, dtype=np.int64).reshape(dim, k, n, n)
    tE = (E[..., None] * t) % A.mods
    probe = (Y[0][None] + tE) % A.mods
    Lmat = ((defect_coeffs(probe) - c0[0][None]) % p).T  # (rows, dim)
    rows = Lmat.shape[0]
    R, piv = linalg.rref(np.hstack([Lmat, np.eye(rows, dtype=np.int64)]), p)
    top = [i for i, c in enumerate(piv) if c < dim]
    rest = [i for i, c in enumerate(piv) if c >= dim]
    T_top = R[top, dim:]
    T_rest = R[rest, dim:]
    b = (-c0) % p
    ok = ~np.any((b @ T_rest.T) % p, axis=1) if rest else np.ones(L, dtype=bool)
    x0 = np.zeros((L, dim), dtype=np.int64)
    if top:
        x0[:, [piv[i] for i in top]] = (b @ T_top.T) % p
    K = linalg.nullspace_mod_p(Lmat, p) if rows else np.eye(dim, dtype=np.int64)
    coeffs = np.array(list(itertools.product(range(p), repeat=len(K))), dtype=np.int64).reshape(p ** len(K), len(K))
    shifts = (coeffs @ K) % p if len(K) else np.zeros((1, dim), dtype=np.int64)
    idx = np.flatnonzero(ok)
    if get_caps().search < len(idx) * len(shifts):
        raise CapExceeded(f"{len(idx) * len(shifts)} lifts exceed the search cap")
    X = (x0[idx][:, None, :] + shifts[None]) % p  # (L', S, dim)
    X = X.reshape(-1, k, n, n)
    base = np.repeat(Y[idx], len(shifts), axis=0)
    out = (base + X[..., None] * t) % A.mods
    if verify and len(out):
        for i in range(0, len(out), 4096):
            if np.any(defect_coeffs(out[i : i + 4096])):
                raise ConsistencyError("tower step produced a non-homomorphism")
    return out


def _enumerate_tower(rhobar, A):
    chain = residue_tower(A)
    Z = rhobar.gen_images.copy()[None]
    for phi in reversed(chain):
        _, t = is_small_extension(phi)
        Z = _lift_over_small(rhobar.group, Z, phi, t)
    if chain and chain[0].source != A:
        raise AssertionError("tower does not start at A")
    return Z


def _exhaustive_worker(args):
    G, A, positions, P, cands = args
    combo = np.concatenate(
        [np.repeat(P, len(cands), axis=0), np.tile(cands, (len(P), 1, 1, 1))[:, None]], axis=1
    )
    ok = _relations_ok(G, A, positions, combo)
    return combo[ok]


def _enumerate_exhaustive(rhobar, A, workers=1):
    G = rhobar.group
    n = rhobar.n
    caps = get_caps()
    ms = A.m_elements()
    if len(ms) ** (n * n) > caps.search:
        raise CapExceeded("too many candidate matrices per generator")
    entries = np.array(list(itertools.product(range(len(ms)), repeat=n * n)), dtype=np.int64)
    Mset = ms[entries].reshape(-1, n, n, A.rank)
    base = _residual_images(rhobar, A)
    cands = [(base[pos][None] + Mset) % A.mods for pos in range(len(G.generators))]
    return _progressive_search(G, A, cands, workers)


def _progressive_search(G, A, cands, workers=1):
    """All tuples from cands[0] x cands[1] x ... satisfying the relations,
    adding one generator at a time and pruning on the subgroup spanned so far."""
    caps = get_caps()
    n = cands[0].shape[-2]
    cands = [
        C[np.all(_matrix_power(A, C, G.element_order(s)) == A.eye(n), axis=(1, 2, 3))]
        for C, s in zip(cands, G.generators)
    ]
    if len(cands) > 1 and len(cands[0]) * len(cands[1]) > caps.search:
        raise CapExceeded(f"search space {len(cands[0]) * len(cands[1])} exceeds cap {caps.search}")
    P = cands[0][:, None]
    P = P[_relations_ok(G, A, [0], P)]
    for j in range(1, len(cands)):
        if len(P) * len(cands[j]) > caps.search:
            raise CapExceeded("exhaustive search space exceeds cap")
        step = max(1, 200000 // max(1, len(cands[j])))
        jobs = [(G, A, list(range(j + 1)), P[i : i + step], cands[j]) for i in range(0, len(P), step)]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                parts = list(ex.map(_exhaustive_worker, jobs))
        else:
            parts = [_exhaustive_worker(a) for a in jobs]
        P = np.concatenate(parts) if parts else P[:0]
    return P


def enumerate_lifts(rhobar: MatrixRep, A: FiniteLocalAlgebra, strategy="tower", workers=1) -> LiftSet:
    """E_A: every lift of rhobar to A, by climbing a small-extension tower or
    by exhaustive search over generator images."""
    _residual_check(rhobar)
    if A.p != rhobar.ring.p:
        raise InvalidInput("ring and residual representation have different primes")
    G_A = A.p ** (A.m_exp * rhobar.n * rhobar.n)
    if G_A > get_caps().congruence:
        raise CapExceeded(f"|G_A| = {G_A} exceeds cap")
    if strategy == "tower":
        Z = _enumerate_tower(rhobar, A)
    elif strategy == "exhaustive":
        Z = _enumerate_exhaustive(rhobar, A, workers)
    else:
        raise InvalidInput(f"unknown strategy {strategy!r}")
    return LiftSet(rhobar, A, _canonical_sort(Z), True, strategy)


# ---------------------------------------------------------------------------
# the congruence subgroup and orbits


def congruence_generators(A: FiniteLocalAlgebra, n: int):
    """1 + x E_ij, x running over additive generators of every m^j: these
    generate G_A = 1 + M_n(m_A) since they generate each graded piece."""
    xs = []
    for basis, _ in A.m_powers:
        for b in basis:
            if not any(np.array_equal(b, y) for y in xs):
                xs.append(b)
    out = []
    for x in xs:
        for i in range(n):
            for j in range(n):
                c = A.eye(n)
                c[i, j] = (c[i, j] + x) % A.mods
                out.append(c)
    if not out:
        return np.zeros((0, n, n, A.rank), dtype=np.int64)
    return np.stack(out)


def congruence_order(A: FiniteLocalAlgebra, n: int) -> int:
    return A.p ** (A.m_exp * n * n)


def conjugate_images(A, c, c_inv, Z):
    return A.matmul(A.matmul(c, Z), c_inv)


@dataclass
class DeformationClass:
    ring: FiniteLocalAlgebra
    representative: MatrixRep
    orbit_size: int
    stabilizer_size: int
    index: int = -1

    @property
    def key(self):
        return self.representative.key

    def to_json(self):
        return {
            "representative": self.representative.gen_images.tolist(),
            "orbit": self.orbit_size,
            "stabilizer": self.stabilizer_size,
        }


class DeformationSpace:
    """D_rho(A) = E_A / G_A with canonical representatives."""

    def __init__(self, lifts: LiftSet):
        self.lifts = lifts
        self.rhobar = lifts.rhobar
        self.ring = lifts.ring
        A, n = self.ring, self.rhobar.n
        L = len(lifts)
        self.group_order = congruence_order(A, n)
        gens = congruence_generators(A, n)
        rows, cols = [], []
        Z = lifts.gen_images
        for c in gens:
            ci = unipotent_inv(A, c)
            idx = lifts.index_of(conjugate_images(A, c, ci, Z))
            if np.any(idx < 0):
                bad = int(np.flatnonzero(idx < 0)[0])
                raise ConsistencyError("a conjugate of a lift is missing from E_A", payload=bad)
            rows.append(np.arange(L))
            cols.append(idx)
        if rows:
            r = np.concatenate(rows)
            c = np.concatenate(cols)
            graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(L, L))
            _, comp = connected_components(graph, directed=True, connection="weak")
        else:
            comp = np.arange(L)
        # relabel by smallest member, i.e. by canonical representative
        first = {}
        for i, lab in enumerate(comp):
            first.setdefault(int(lab), i)
        order = sorted(first.values())
        relabel = {int(comp[i]): k for k, i in enumerate(order)}
        self.labels = np.array([relabel[int(x)] for x in comp], dtype=np.int64)
        sizes = np.bincount(self.labels, minlength=len(order)) if L else np.zeros(0, dtype=np.int64)
        self.classes = []
        for k, i in enumerate(order):
            orbit = int(sizes[k])
            if self.group_order % orbit:
                raise ConsistencyError("orbit size does not divide |G_A|")
            self.classes.append(DeformationClass(A, lifts.rep(i), orbit, self.group_order // orbit, k))
        self.rep_index = order

    def __len__(self):
        return len(self.classes)

    def class_index(self, rep_or_images) -> int:
        Z = rep_or_images.gen_images if isinstance(rep_or_images, MatrixRep) else rep_or_images
        idx = int(self.lifts.index_of(Z)[0])
        if idx < 0:
            raise InvalidInput("not a lift of the residual representation")
        return int(self.labels[idx])

    def orbit_members(self, k):
        return np.flatnonzero(self.labels == k)


_SPACES: dict = {}


def deformation_space(rhobar: MatrixRep, A: FiniteLocalAlgebra, strategy="tower", workers=1) -> DeformationSpace:
    key = (rhobar, A, strategy)
    if key not in _SPACES:
        _SPACES[key] = DeformationSpace(enumerate_lifts(rhobar, A, strategy, workers))
    return _SPACES[key]


def clear_cache():
    _SPACES.clear()
    h1.cache_clear()
    h2.cache_clear()


def deformation_classes(rhobar, A, strategy="tower", workers=1):
    return deformation_space(rhobar, A, strategy, workers).classes


def canonical_class(rep: MatrixRep) -> DeformationClass:
    """Orbit of a single lift by breadth-first search over G_A."""
    A, n = rep.ring, rep.n
    order = congruence_order(A, n)
    if order > get_caps().congruence:
        raise CapExceeded(f"|G_A| = {order} exceeds cap")
    gens = congruence_generators(A, n)
    invs = [unipotent_inv(A, c) for c in gens]
    start = rep.gen_images[None]
    seen = {start.tobytes(): start[0]}
    frontier = start
    while len(frontier):
        new = []
        for c, ci in zip(gens, invs):
            for z in conjugate_images(A, c, ci, frontier):
                b = z.tobytes()
                if b not in seen:
                    seen[b] = z
                    new.append(z)
        frontier = np.stack(new) if new else frontier[:0]
    members = _canonical_sort(np.stack(list(seen.values())))
    G = rep.group
    best = MatrixRep(G, A, propagate(G, A, members[0]), check=False)
    return DeformationClass(A, best, len(members), order // len(members))


def induced_map(src: DeformationSpace, tgt: DeformationSpace, phi: RingMorphism):
    """D(phi): class index over phi.source -> class index over phi.target."""
    if phi.source != src.ring or phi.target != tgt.ring:
        raise InvalidInput("morphism does not match the deformation spaces")
    out = []
    for cl in src.classes:
        out.append(tgt.class_index(phi(cl.representative.gen_images)))
    return np.array(out, dtype=np.int64)


# ---------------------------------------------------------------------------
# checks


@dataclass
class Check:
    name: str
    statement: str
    passed: bool
    detail: dict = field(default_factory=dict)
    enforced: bool = True

    def to_json(self):
        return {
            "name": self.name,
            "statement": self.statement,
            "passed": bool(self.passed),
            "enforced": bool(self.enforced),
            "detail": self.detail,
        }


def _hypothesis(rhobar, what):
    ok = is_absolutely_irreducible(rhobar)
    if not ok:
        warnings.warn(f"{what}: residual representation is not absolutely irreducible", HypothesisWarning, stacklevel=3)
    return ok


def orbit_check(space: DeformationSpace) -> Check:
    """Orbits partition E_A and orbit x stabilizer = |G_A|; for absolutely
    irreducible rhobar every stabilizer is 1 + m_A."""
    A = space.ring
    absirr = is_absolutely_irreducible(space.rhobar)
    total = sum(c.orbit_size for c in space.classes)
    ok = total == len(space.lifts)
    bad = []
    for c in space.classes:
        stab = stabilizer_in_congruence(c.representative)
        if stab.order * c.orbit_size != space.group_order:
            bad.append(c.index)
        if absirr and (stab.order != A.p**A.m_exp or not stab.is_scalar()):
            bad.append(c.index)
    if absirr and len(space.lifts):
        logs = centralizer_orders_batch(A, None, space.lifts.gen_images)
        # C(rho) = A forces the stabilizer to be exactly 1 + m_A
        if np.any(logs != A.size_exp):
            bad.extend(int(i) for i in np.flatnonzero(logs != A.size_exp))
    ok = ok and not bad
    return Check(
        "orbits",
        "Lem.E_A",
        ok,
        {
            "ring": A.name,
            "lifts": len(space.lifts),
            "classes": len(space.classes),
            "G_A": space.group_order,
            "failures": sorted(set(bad))[:5],
        },
        enforced=True,
    )


def schur_check(space: DeformationSpace) -> Check:
    A = space.ring
    absirr = is_absolutely_irreducible(space.rhobar)
    if not absirr:
        warnings.warn("Schur check on a residual representation that is not absolutely irreducible", HypothesisWarning, stacklevel=2)
    logs = centralizer_orders_batch(A, None, space.lifts.gen_images) if len(space.lifts) else np.zeros(0, dtype=np.int64)
    exceptions = int(np.sum(logs != A.size_exp))
    return Check(
        "schur",
        "Lem.schur",
        exceptions == 0,
        {"ring": A.name, "lifts": len(space.lifts), "exceptions": exceptions},
        enforced=absirr,
    )


# ---------------------------------------------------------------------------
# tangent space


def epsilon_cocycle(rep: MatrixRep, t=None):
    """c with rep(g) = (1 + eps c(g)) rhobar(g) over a ring with m = F_p eps."""
    A = rep.ring
    if t is None:
        small, t = is_small_extension(residue_map(A))
        if not small:
            raise InvalidInput("ring is not a small extension of F_p")
    rb = reduce_rep(rep, residue_map(A))
    bar = rb.images[..., 0]
    E = small_kernel_coefficients(A, t, (rep.images - A.lift_matrix(bar)) % A.mods)
    p = A.p
    c = np.einsum("gij,gjk->gik", E, bar[rep.group.inverses]) % p
    return c.reshape(rep.group.order, -1)


def lift_from_cocycle(rhobar: MatrixRep, A, t, c) -> MatrixRep:
    """g -> (1 + eps c(g)) rhobar(g)."""
    n = rhobar.n
    bar = rhobar.images[..., 0]
    c = np.asarray(c, dtype=np.int64).reshape(-1, n, n)
    cb = np.einsum("gij,gjk->gik", c, bar) % A.p
    imgs = (A.lift_matrix(bar) + cb[..., None] * t) % A.mods
    return MatrixRep(rhobar.group, A, imgs)


@dataclass
class TangentSpace:
    rhobar: MatrixRep
    space: DeformationSpace
    dim: int
    coords: list
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)


def tangent_space(rhobar: MatrixRep, strategy="tower") -> TangentSpace:
    _residual_check(rhobar)
    p = rhobar.ring.p
    A = dual_numbers(p)
    _, t = is_small_extension(residue_map(A))
    sp = deformation_space(rhobar, A, strategy)
    H = h1(rhobar)
    coords = [H.coordinates(epsilon_cocycle(c.representative, t)) for c in sp.classes]
    count_ok = len(sp) == p**H.dim
    injective = len(set(coords)) == len(coords)
    roundtrip = True
    for k, co in enumerate(coords):
        back = lift_from_cocycle(rhobar, A, t, H.from_coordinates(co))
        if sp.class_index(back) != k:
            roundtrip = False
    additive = True
    pairs = list(itertools.combinations_with_replacement(range(len(coords)), 2))
    if len(pairs) > 400:
        pairs = [(a, b) for a in range(len(coords)) for b in range(min(len(coords), 3))]
    for a, b in pairs:
        ca = epsilon_cocycle(sp.classes[a].representative, t)
        cb = epsilon_cocycle(sp.classes[b].representative, t)
        s = lift_from_cocycle(rhobar, A, t, (ca + cb) % p)
        got = coords[sp.class_index(s)]
        want = tuple((x + y) % p for x, y in zip(coords[a], coords[b]))
        if got != want:
            additive = False
    checks = [
        Check("tangent-count", "Prop.tangent", count_ok, {"classes": len(sp), "h1": H.dim, "p": p}),
        Check("tangent-bijection", "Prop.tangent", injective and roundtrip, {"injective": injective, "roundtrip": roundtrip}),
        Check("tangent-linear", "Prop.tangent", additive, {"pairs": len(pairs)}),
    ]
    return TangentSpace(rhobar, sp, H.dim, coords, checks)


# ---------------------------------------------------------------------------
# fiber products


def find_conjugator(rho_x: MatrixRep, rho_y: MatrixRep):
    """c in G_A with c rho_x c^{-1} = rho_y, or None."""
    A, n = rho_x.ring, rho_x.n
    r = A.rank
    dim = n * n * r
    basis = np.eye(dim, dtype=np.int64).reshape(dim, n, n, r)
    cols = [(A.matmul(basis, x) - A.matmul(y, basis)) % A.mods for x, y in zip(rho_x.gen_images, rho_y.gen_images)]
    F = np.stack(cols, axis=1).reshape(dim, -1).T
    src = list(A.ann) * (n * n)
    kb, ko = linalg.kernel(F, src, src * len(cols), A.p)

    def normalize(X):
        bar = A.residue(X)
        mu = int(bar[0, 0])
        if mu == 0 or np.any(bar != mu * np.eye(n, dtype=np.int64)):
            return None
        return A.mul(X, A.scalar(pow(mu, -1, A.p)))

    vecs = [np.asarray(b).reshape(n, n, r) for b in kb]
    for X in vecs:
        c = normalize(X)
        if c is not None:
            return c
    # general case: search small combinations of kernel generators
    if A.p ** sum(ko) <= 10**5:
        for coeffs in itertools.product(*[range(A.p**o) for o in ko]):
            X = sum(int(a) * v for a, v in zip(coeffs, vecs)) % A.mods if vecs else None
            if X is not None:
                c = normalize(X)
                if c is not None:
                    return c
    return None


def glue_over_fiber_product(rho1: MatrixRep, rho2: MatrixRep, phi1: RingMorphism, phi2: RingMorphism, fp=None, max_steps=None):
    """Lift over A1 x_{A0} A2 whose projections are conjugate to rho1, rho2.

    Each step writes the conjugator c = 1 + l over A0 as
    l = lambda + phi2(m2) - phi1(m1) with lambda scalar and moves
    rho1 <- (1 - m1) rho1 (1 - m1)^{-1}, rho2 <- (1 + m2)^{-1} rho2 (1 + m2).
    """
    A1, A2, A0 = phi1.source, phi2.source, phi1.target
    if phi2.target != A0 or rho1.ring != A1 or rho2.ring != A2:
        raise InvalidInput("rings do not match the fiber-product data")
    A3, pi1, pi2 = fp if fp is not None else fiber_product(phi1, phi2)
    n = rho1.n
    G = rho1.group
    steps = max_steps or 2 * (A0.nilpotency + 1)
    mb1, mo1 = A1.maximal_ideal
    mb2, mo2 = A2.maximal_ideal
    mb0, mo0 = A0.maximal_ideal
    # unknown coordinates: lambda in m0 (scalar), m1 entries, m2 entries
    cols, src = [], []
    for b, o in zip(mb0, mo0):
        cols.append(np.tile(b, n * n) * np.eye(n, dtype=np.int64).reshape(-1).repeat(A0.rank))
        src.append(o)
    for i in range(n * n):
        for b, o in zip(mb1, mo1):
            v = np.zeros((n * n, A0.rank), dtype=np.int64)
            v[i] = -phi1(b)
            cols.append(v.reshape(-1))
            src.append(o)
    for i in range(n * n):
        for b, o in zip(mb2, mo2):
            v = np.zeros((n * n, A0.rank), dtype=np.int64)
            v[i] = phi2(b)
            cols.append(v.reshape(-1))
            src.append(o)
    F = np.stack(cols, axis=1) if cols else np.zeros((n * n * A0.rank, 0), dtype=np.int64)
    tgt = list(A0.ann) * (n * n)
    n0 = len(mb0)
    n1 = len(mb1) * n * n
    for _ in range(steps):
        x = reduce_rep(rho1, phi1)
        y = reduce_rep(rho2, phi2)
        if np.array_equal(x.gen_images, y.gen_images):
            break
        c = find_conjugator(x, y)
        if c is None:
            raise InvalidInput("the classes do not agree over A0")
        l = (c - A0.eye(n)) % A0.mods
        sol = linalg.solve(F, src, tgt, l.reshape(-1), A0.p) if cols else None
        if sol is None:
            raise ConsistencyError("could not decompose the discrepancy", payload=l.tolist())
        m1 = np.zeros((n * n, A1.rank), dtype=np.int64)
        m2 = np.zeros((n * n, A2.rank), dtype=np.int64)
        s1 = sol[n0 : n0 + n1].reshape(n * n, len(mb1))
        s2 = sol[n0 + n1 :].reshape(n * n, len(mb2))
        for i in range(n * n):
            for j, b in enumerate(mb1):
                m1[i] = (m1[i] + s1[i, j] * b) % A1.mods
            for j, b in enumerate(mb2):
                m2[i] = (m2[i] + s2[i, j] * b) % A2.mods
        g1 = (A1.eye(n) - m1.reshape(n, n, A1.rank)) % A1.mods
        g2 = (A2.eye(n) + m2.reshape(n, n, A2.rank)) % A2.mods
        rho1 = MatrixRep(G, A1, A1.matmul(A1.matmul(g1, rho1.images), unipotent_inv(A1, g1)), check=False)
        rho2 = MatrixRep(G, A2, A2.matmul(A2.matmul(unipotent_inv(A2, g2), rho2.images), g2), check=False)
    else:
        raise ConsistencyError("gluing did not converge")
    if not np.array_equal(reduce_rep(rho1, phi1).gen_images, reduce_rep(rho2, phi2).gen_images):
        raise ConsistencyError("gluing did not converge")
    k = len(G.generators)
    a1 = rho1.gen_images.reshape(-1, A1.rank)
    a2 = rho2.gen_images.reshape(-1, A2.rank)
    glued = glue_elements(pi1, pi2, a1, a2).reshape(k, n, n, A3.rank)
    rho3 = MatrixRep(G, A3, propagate(G, A3, glued))
    if not (np.array_equal(pi1(rho3.images), rho1.images) and np.array_equal(pi2(rho3.images), rho2.images)):
        raise ConsistencyError("glued lift does not project to the inputs")
    return rho3


@dataclass
class FiberReport:
    label: str
    counts: dict
    checks: list
    counterexample: dict | None = None

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.enforced)

    def to_json(self):
        return {
            "label": self.label,
            "counts": self.counts,
            "checks": [c.to_json() for c in self.checks],
            "counterexample": self.counterexample,
        }


def fiber_product_check(rhobar, phi1, phi2, strategy="tower", condition=None, label=None, glue=True) -> FiberReport:
    """Compare D(A1 x_{A0} A2) with D(A1) x_{D(A0)} D(A2) through the map b."""
    absirr = _hypothesis(rhobar, "fiber_product_check")
    A3, pi1, pi2 = fiber_product(phi1, phi2)
    A0 = phi1.target
    S = {name: deformation_space(rhobar, R, strategy) for name, R in (("A0", A0), ("A1", phi1.source), ("A2", phi2.source), ("A3", A3))}

    def keep(sp):
        if condition is None:
            return list(range(len(sp)))
        return [c.index for c in filter_by_condition(sp.classes, *condition)]

    K = {name: keep(sp) for name, sp in S.items()}
    d1 = induced_map(S["A1"], S["A0"], phi1)
    d2 = induced_map(S["A2"], S["A0"], phi2)
    b1 = induced_map(S["A3"], S["A1"], pi1)
    b2 = induced_map(S["A3"], S["A2"], pi2)
    fiber = {(i, j) for i in K["A1"] for j in K["A2"] if d1[i] == d2[j]}
    image = {}
    counter = None
    lands = True
    for x in K["A3"]:
        pair = (int(b1[x]), int(b2[x]))
        if pair not in fiber:
            lands = False
            counter = counter or {"kind": "outside", "class": x, "pair": pair}
        image.setdefault(pair, []).append(x)
    injective = all(len(v) == 1 for v in image.values())
    if not injective and counter is None:
        dup = next(v for v in image.values() if len(v) > 1)
        counter = {"kind": "collision", "classes": dup}
    missing = sorted(fiber - set(image))
    surjective = not missing
    if missing and counter is None:
        counter = {"kind": "missing", "pair": list(missing[0])}
    checks = [
        Check("b-well-defined", "Thm.grothendieck", lands, {}, enforced=True),
        Check("b-injective", "Lem.inj", injective, {}, enforced=absirr),
        Check("b-surjective", "Lem.onto", surjective, {}, enforced=absirr),
    ]
    if glue and absirr and condition is None:
        glue_ok = True
        for i, j in sorted(fiber):
            r1 = S["A1"].classes[i].representative
            r2 = S["A2"].classes[j].representative
            try:
                r3 = glue_over_fiber_product(r1, r2, phi1, phi2, fp=(A3, pi1, pi2))
            except (ConsistencyError, InvalidInput) as exc:
                glue_ok = False
                counter = counter or {"kind": "glue", "pair": [i, j], "error": str(exc)}
                continue
            if S["A1"].class_index(pi1(r3.gen_images)) != i or S["A2"].class_index(pi2(r3.gen_images)) != j:
                glue_ok = False
        checks.append(Check("glue-projects", "Lem.onto", glue_ok, {"pairs": len(fiber)}))
    counts = {
        "D(A0)": len(K["A0"]),
        "D(A1)": len(K["A1"]),
        "D(A2)": len(K["A2"]),
        "D(A3)": len(K["A3"]),
        "fiber": len(fiber),
        "|A3|": A3.order,
    }
    return FiberReport(label or f"{phi1.source.name} x_{A0.name} {phi2.source.name}", counts, checks, counter)


# ---------------------------------------------------------------------------
# inverse limits


def zp_tower(p: int, N: int):
    """[Z/p^N -> Z/p^{N-1}, ..., Z/p^2 -> Z/p]."""
    return [reduction(p, k, k - 1) for k in range(N, 1, -1)]


@dataclass
class LimitReport:
    levels: list
    counts: list
    systems: int
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.enforced)


def inverse_limit_check(rhobar, tower=None, N=None, strategy="tower") -> LimitReport:
    """D(A_top) -> lim D(A_i) along a chain of surjections (top first)."""
    _residual_check(rhobar)
    if tower is None:
        tower = zp_tower(rhobar.ring.p, N or 2)
    rings = [phi.source for phi in tower] + ([tower[-1].target] if tower else [Zpn_field(rhobar)])
    for a, b in zip(tower, tower[1:]):
        if a.target != b.source:
            raise InvalidInput("tower morphisms are not composable")
    spaces = [deformation_space(rhobar, R, strategy) for R in rings]
    maps = [induced_map(spaces[i], spaces[i + 1], tower[i]) for i in range(len(tower))]
    # compatible systems, built from the bottom level up
    systems = [(x,) for x in range(len(spaces[-1]))]
    for lvl in range(len(tower) - 1, -1, -1):
        systems = [(y,) + s for s in systems for y in range(len(spaces[lvl])) if maps[lvl][y] == s[0]]
    images = []
    for x in range(len(spaces[0])):
        s = [x]
        for m in maps:
            s.append(int(m[s[-1]]))
        images.append(tuple(s))
    bij = sorted(images) == sorted(systems) and len(set(images)) == len(images)
    onto = []
    for phi in tower:
        A, B = phi.source, phi.target
        imgs = [phi(b) for b in A.m_basis]
        onto.append(linalg.subgroup_order_exponent(imgs, B.ann, B.p) == B.m_exp if imgs else B.m_exp == 0)
    checks = [
        Check("limit-bijection", "Cor.cont", bij, {"top": len(spaces[0]), "systems": len(systems)}),
        Check("congruence-onto", "Cor.cont", all(onto), {"levels": len(tower)}),
    ]
    return LimitReport([R.name for R in rings], [len(s) for s in spaces], len(systems), checks)


def Zpn_field(rhobar):
    return rhobar.ring


# ---------------------------------------------------------------------------
# small-extension lifting


def search_lifts_small(rho_B: MatrixRep, phi: RingMorphism):
    """Brute force: every lift of rho_B along phi, testing all tX corrections."""
    small, t = is_small_extension(phi)
    if not small:
        raise InvalidInput("not a small extension")
    A = phi.source
    G, n = rho_B.group, rho_B.n
    k = len(G.generators)
    if A.p ** (n * n) > get_caps().search:
        raise CapExceeded("lift search space exceeds cap")
    Y = phi.lift(rho_B.gen_images)
    X = np.array(list(itertools.product(range(A.p), repeat=n * n)), dtype=np.int64).reshape(-1, n, n)
    cands = [(Y[j][None] + X[..., None] * t) % A.mods for j in range(k)]
    return _canonical_sort(_progressive_search(G, A, cands))


@dataclass
class LiftReport:
    classes: list  # class indices over the source ring
    obstruction: object
    lifts_found: int
    consistent: bool


def lift_classes(rho_B: MatrixRep, phi: RingMorphism, strategy="tower") -> LiftReport:
    small, _ = is_small_extension(phi)
    if not small:
        raise InvalidInput("lift_classes needs a small extension")
    obs = obstruction_class(rho_B, phi)
    found = search_lifts_small(rho_B, phi)
    rhobar = reduce_rep(rho_B, residue_map(rho_B.ring))
    classes = []
    if len(found):
        sp = deformation_space(rhobar, phi.source, strategy)
        classes = sorted({sp.class_index(z) for z in found})
    return LiftReport(classes, obs, len(found), obs.vanishes == bool(len(found)))


# ---------------------------------------------------------------------------
# deformation conditions


CONDITIONS = ("central_character", "z_trivial")


def satisfies(rep: MatrixRep, condition: str, z=None) -> bool:
    if condition == "central_character":
        return has_central_character(rep)[0]
    if condition == "z_trivial":
        return bool(np.array_equal(rep.images[z], rep.ring.eye(rep.n)))
    raise InvalidInput(f"unknown condition {condition!r}")


def filter_by_condition(classes, condition: str, z=None, check_invariance=True):
    if condition not in CONDITIONS:
        raise InvalidInput(f"unknown condition {condition!r}")
    out = []
    for cl in classes:
        rep = cl.representative
        if condition == "z_trivial" and (z is None or z not in rep.group.center()):
            raise InvalidInput(f"element {z} is not central")
        val = satisfies(rep, condition, z)
        if check_invariance:
            A = rep.ring
            for c in congruence_generators(A, rep.n)[:4]:
                conj = MatrixRep(rep.group, A, conjugate_images(A, c, unipotent_inv(A, c), rep.images), check=False)
                if satisfies(conj, condition, z) != val:
                    raise ConsistencyError("condition is not conjugation invariant")
        if val:
            out.append(cl)
    return out


# ---------------------------------------------------------------------------
# twists and tensor products


def twist_class(cl: DeformationClass, chi: MatrixRep) -> DeformationClass:
    return canonical_class(twist(cl.representative, chi))


def tensor_classes(c1: DeformationClass, c2: DeformationClass) -> DeformationClass:
    rep, _ = tensor_reps(c1.representative, c2.representative)
    return canonical_class(rep)


# ---------------------------------------------------------------------------
# summary


@dataclass
class DeformationReport:
    group: str
    p: int
    n: int
    absolutely_irreducible: bool
    h1: int
    h2: int
    counts: dict
    rigid: bool
    smooth_model: dict
    checks: list

    def to_json(self):
        return {
            "group": self.group,
            "p": self.p,
            "n": self.n,
            "absolutely_irreducible": self.absolutely_irreducible,
            "h1": self.h1,
            "h2": self.h2,
            "counts": self.counts,
            "rigid": self.rigid,
            "smooth_model": self.smooth_model,
            "checks": [c.to_json() for c in self.checks],
        }


def summary(rhobar: MatrixRep, rings, strategy="tower") -> DeformationReport:
    _residual_check(rhobar)
    p = rhobar.ring.p
    H1, H2 = h1(rhobar), h2(rhobar)
    absirr = is_absolutely_irreducible(rhobar)
    counts, model, checks = {}, {}, []
    for A in rings:
        sp = deformation_space(rhobar, A, strategy)
        counts[A.name] = len(sp)
        if H2.dim == 0 and absirr:
            want = p ** (H1.dim * A.m_exp)
            model[A.name] = want
            checks.append(Check("smooth-count", "Cor.tangent", len(sp) == want, {"ring": A.name, "classes": len(sp), "model": want}))
        if A.m_exp == 0:
            checks.append(Check("residue-singleton", "Def.D", len(sp) == 1, {"ring": A.name}))
    return DeformationReport(
        rhobar.group.name, p, rhobar.n, absirr, H1.dim, H2.dim, counts, H1.dim == 0, model, checks
    )
