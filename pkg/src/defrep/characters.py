"""Character deformations: R = o[[Γ]], Teichmüller lifts, principal series.

Points of o[[x1, x2]] attached to a character of Q_p^× use the coordinates
x1 = chi(p)/omega(chibar(p)) - 1 and x2 = chi(1+p) - 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput
from .groups import AbelianizationDescriptor, pro_p_abelianization
from .reps import MatrixRep
from .rings import FiniteLocalAlgebra, is_prime


@dataclass(frozen=True)
class UniversalRingDescriptor:
    p: int
    variables: int
    torsion: tuple = ()
    noetherian: bool = True

    @property
    def gamma_order(self):
        """|Γ| when Γ is finite, else None."""
        if self.variables:
            return None
        return self.p ** sum(self.torsion)

    def describe(self) -> str:
        base = f"Z_{self.p}"
        if self.variables:
            xs = ",".join(f"x{i + 1}" for i in range(self.variables))
            base += f"[[{xs}]]"
        if self.torsion:
            base += "[" + " x ".join(f"Z/{self.p}^{e}" for e in self.torsion) + "]"
        return base

    def to_json(self):
        return {
            "p": self.p,
            "variables": self.variables,
            "torsion": list(self.torsion),
            "noetherian": self.noetherian,
            "gamma_order": self.gamma_order,
            "ring": self.describe(),
        }


def universal_character_ring(desc: AbelianizationDescriptor) -> UniversalRingDescriptor:
    return UniversalRingDescriptor(desc.p, desc.free_rank, tuple(sorted(desc.torsion)), True)


# ---------------------------------------------------------------------------
# the group 1 + m_A


def principal_units(A: FiniteLocalAlgebra) -> np.ndarray:
    return (A.m_elements() + A.one) % A.mods


def unit_torsion_orders(A: FiniteLocalAlgebra, U=None):
    """[log_p |U[p^j]| for j = 0, 1, ...] until it stabilizes at log_p |U|."""
    U = principal_units(A) if U is None else U
    total = A.m_exp
    out = [0]
    j = 0
    while out[-1] < total:
        j += 1
        # U[p^j] = {u : u^{p^j} = 1}
        vals = np.stack([A.power(u, A.p**j) for u in U])
        killed = int(np.sum(np.all(vals == A.one, axis=1)))
        out.append(round(np.log(killed) / np.log(A.p)))
        if j > A.size_exp + 1:
            raise AssertionError("1 + m_A is not a p-group")
    return out


def unit_invariants(A: FiniteLocalAlgebra):
    """Exponents f_i with 1 + m_A ≅ ⊕ Z/p^{f_i}, sorted ascending."""
    t = unit_torsion_orders(A)
    # number of cyclic factors of exponent >= j is t[j] - t[j-1]
    ge = [t[j] - t[j - 1] for j in range(1, len(t))]
    inv = []
    for j, c in enumerate(ge, start=1):
        nxt = ge[j] if j < len(ge) else 0
        inv.extend([j] * (c - nxt))
    return sorted(inv)


def hom_count(desc: AbelianizationDescriptor, A: FiniteLocalAlgebra) -> int:
    """|Hom(Γ, 1 + m_A)| from abelian invariants."""
    f = unit_invariants(A)
    exp = desc.free_rank * sum(f)
    for e in desc.torsion:
        exp += sum(min(e, x) for x in f)
    return A.p**exp


# ---------------------------------------------------------------------------
# Teichmüller


def teichmuller(a: int, p: int, N: int) -> int:
    """The (p-1)-st root of unity mod p^N congruent to a."""
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    if a % p == 0:
        raise InvalidInput("Teichmüller lift of 0 is undefined")
    mod = p**N
    x = a % mod
    while True:
        y = pow(x, p, mod)
        if y == x:
            return x
        x = y


def _character_values(chibar: MatrixRep):
    if chibar.n != 1:
        raise InvalidInput("not a character")
    A = chibar.ring
    if not (A.rank == 1 and A.ann == (1,)):
        raise InvalidInput("residual character must be over F_p")
    return chibar.images[:, 0, 0, 0]


def canonical_lift(chibar: MatrixRep, A: FiniteLocalAlgebra) -> np.ndarray:
    """chi_0 = omega o chibar as ring coordinates, shape (|G|, r)."""
    vals = _character_values(chibar)
    p = A.p
    omega = {int(v): teichmuller(int(v), p, A.N) for v in set(vals.tolist())}
    return np.stack([A.scalar(omega[int(v)]) for v in vals])


@dataclass
class CharacterDeformations:
    chibar: MatrixRep
    ring: FiniteLocalAlgebra
    descriptor: AbelianizationDescriptor
    count: int
    characters: np.ndarray  # (count, |G|, r), sorted by generator images
    homs: list  # tuples (u_1, ..., u_s) of coordinates in 1 + m_A

    def as_reps(self):
        G = self.chibar.group
        return [MatrixRep(G, self.ring, c[:, None, None, :], check=False) for c in self.characters]


def count_character_deformations(chibar: MatrixRep, A: FiniteLocalAlgebra) -> CharacterDeformations:
    """Deformations of chibar to A as chi_0 · (f o gamma), f in Hom(Γ, 1+m_A)."""
    G = chibar.group
    p = A.p
    if chibar.ring.p != p:
        raise InvalidInput("prime mismatch")
    ab = pro_p_abelianization(G, p)
    chi0 = canonical_lift(chibar, A)
    U = principal_units(A)
    choices = []
    for e in ab.exponents:
        ok = [u for u in U if np.array_equal(A.power(u, p**e), A.one)]
        choices.append(ok)
    chars, homs = [], []
    for us in itertools.product(*choices):
        vals = chi0.copy()
        for j, u in enumerate(us):
            pw = np.stack([A.power(u, int(k)) for k in range(p ** ab.exponents[j])])
            vals = A.mul(vals, pw[ab.gamma[:, j]])
        chars.append(vals)
        homs.append(tuple(tuple(int(c) for c in u) for u in us))
    chars = np.stack(chars) if chars else np.zeros((0, G.order, A.rank), dtype=np.int64)
    gens = list(G.generators)
    order = sorted(range(len(chars)), key=lambda i: tuple(chars[i][gens].ravel().tolist()))
    count = hom_count(ab.descriptor, A)
    if count != len(chars):
        raise AssertionError("hom count from invariants disagrees with enumeration")
    return CharacterDeformations(chibar, A, ab.descriptor, count, chars[order], [homs[i] for i in order])


# ---------------------------------------------------------------------------
# characters of Q_p^×


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    phi = p - 1
    factors = {q for q in range(2, phi + 1) if phi % q == 0 and is_prime(q)}
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in factors):
            return g
    raise AssertionError("no primitive root")


@dataclass(frozen=True)
class SmoothCharacter:
    """A smooth character Q_p^× -> F_p^×: values at p and at the generator of
    μ_{p-1} lifting the smallest primitive root mod p."""

    p: int
    at_p: int
    on_teich: int

    def __post_init__(self):
        if self.p == 2:
            raise InvalidInput("characters of Q_2^× are not supported")
        if self.at_p % self.p == 0 or self.on_teich % self.p == 0:
            raise InvalidInput("character values must be nonzero mod p")

    def times_inverse(self, other: "SmoothCharacter") -> "SmoothCharacter":
        p = self.p
        return SmoothCharacter(p, self.at_p * pow(other.at_p, -1, p) % p, self.on_teich * pow(other.on_teich, -1, p) % p)

    def key(self):
        return (self.at_p % self.p, self.on_teich % self.p)


def cyclotomic(p: int) -> SmoothCharacter:
    """x -> x|x| mod p: trivial at p, identity on units."""
    return SmoothCharacter(p, 1, primitive_root(p))


@dataclass(frozen=True)
class PadicCharacter:
    p: int
    precision: int
    at_p: int
    on_teich: int
    at_1p: int

    def __post_init__(self):
        mod = self.p**self.precision
        if self.at_p % self.p == 0:
            raise InvalidInput("chi(p) must be a unit")
        if self.at_1p % self.p != 1 % self.p:
            raise InvalidInput("chi(1+p) must lie in 1 + pZ")
        if pow(self.on_teich, self.p - 1, mod) != 1 % mod:
            raise InvalidInput("Teichmüller component must have order dividing p-1")

    def reduce(self) -> SmoothCharacter:
        return SmoothCharacter(self.p, self.at_p % self.p, self.on_teich % self.p)

    def value(self, k: int, j: int, m: int) -> int:
        """chi(p^k · zeta^j · (1+p)^m) for m >= 0."""
        mod = self.p**self.precision
        return pow(self.at_p, k, mod) * pow(self.on_teich, j, mod) * pow(self.at_1p, m, mod) % mod

    def coordinates(self):
        """(x1, x2) with chi(p) = omega(chibar(p))(1 + x1), chi(1+p) = 1 + x2."""
        mod = self.p**self.precision
        w = teichmuller(self.at_p % self.p, self.p, self.precision)
        x1 = (self.at_p * pow(w, -1, mod) - 1) % mod
        return (x1, (self.at_1p - 1) % mod)

    def key(self):
        return (self.at_p, self.on_teich, self.at_1p)

    def to_json(self):
        return {"at_p": self.at_p, "on_teich": self.on_teich, "at_1p": self.at_1p, "precision": self.precision}


def character_lift(chibar: SmoothCharacter, x1: int, x2: int, N: int) -> PadicCharacter:
    p = chibar.p
    mod = p**N
    if x1 % p or x2 % p:
        raise InvalidInput("coordinates must be divisible by p")
    w = teichmuller(chibar.at_p, p, N)
    return PadicCharacter(p, N, w * (1 + x1) % mod, teichmuller(chibar.on_teich, p, N), (1 + x2) % mod)


def check_principal_series_hypothesis(chi1: SmoothCharacter, chi2: SmoothCharacter):
    ratio = chi1.times_inverse(chi2)
    if ratio.key() == (1, 1):
        raise InvalidInput("chibar1/chibar2 is trivial")
    if ratio.key() == cyclotomic(chi1.p).key():
        raise InvalidInput("chibar1/chibar2 is the mod p cyclotomic character")


def principal_series_point(chi1: SmoothCharacter, chi2: SmoothCharacter, a1, a2, N: int):
    """The pair of characters at the point with coordinates a1 = (x1, x2) for
    chi1 and a2 = (x1, x2) for chi2."""
    if chi1.p != chi2.p:
        raise InvalidInput("prime mismatch")
    check_principal_series_hypothesis(chi1, chi2)
    return character_lift(chi1, *a1, N), character_lift(chi2, *a2, N)


def parametrized_lifts(chibar: SmoothCharacter, N: int):
    """All character_lift(chibar, x1, x2, N) for x1, x2 in pZ/p^N."""
    p = chibar.p
    pts = range(0, p**N, p)
    return [character_lift(chibar, x1, x2, N) for x1 in pts for x2 in pts]


def brute_force_lifts(chibar: SmoothCharacter, N: int):
    """Every continuous character Q_p^× -> (Z/p^N)^× reducing to chibar,
    by scanning all triples of units (chi(p), chi(zeta), chi(1+p))."""
    p = chibar.p
    mod = p**N
    units = np.array([u for u in range(mod) if u % p], dtype=np.int64)
    a = units[units % p == chibar.at_p % p]
    # chi(zeta) must have order dividing p - 1 and reduce correctly
    b = np.array([u for u in units if pow(int(u), p - 1, mod) == 1 and u % p == chibar.on_teich % p])
    # chi(1+p) must have p-power order (continuity) and be 1 mod p
    c = np.array([u for u in units if pow(int(u), p ** (N - 1), mod) == 1 and u % p == 1])
    out = []
    for x, y, z in itertools.product(a.tolist(), b.tolist(), c.tolist()):
        out.append(PadicCharacter(p, N, x, y, z))
    return out
