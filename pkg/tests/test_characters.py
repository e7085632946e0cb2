import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defrep import characters as ch
from defrep import deformations as df
from defrep.errors import InvalidInput
from defrep.fixtures import fixture_by_name, ring_catalog
from defrep.groups import AbelianizationDescriptor, glqp_descriptor, make_group, pro_p_abelianization
from defrep.reps import make_rep
from defrep.rings import Zpn, dual_numbers, truncated

import oracles

PRIMES = [2, 3, 5, 7, 11]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(PRIMES), st.integers(1, 4), st.integers(1, 10**6))
def test_teichmuller_is_a_root_of_unity(p, N, a):
    if a % p == 0:
        a += 1
    w = ch.teichmuller(a, p, N)
    mod = p**N
    assert w % p == a % p
    assert pow(w, p - 1, mod) == 1 % mod
    # uniqueness among residues congruent to a
    roots = [x for x in range(a % p, mod, p) if pow(x, p - 1, mod) == 1 % mod]
    assert roots == [w]


def test_teichmuller_errors():
    with pytest.raises(InvalidInput):
        ch.teichmuller(3, 3, 2)
    with pytest.raises(InvalidInput):
        ch.teichmuller(1, 4, 2)


def _oracle_units(R):
    return [R.add(R.one(), m) for m in R.maximal()]


def _oracle_power(R, u, k):
    out = R.one()
    for _ in range(k):
        out = R.mul(out, u)
    return out


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("pos", range(8))
def test_unit_invariants_match_oracle(p, pos):
    A = ring_catalog(p)[pos]
    R = oracles.oracle_ring(oracles.CATALOG_KEYS[pos], p)
    U = _oracle_units(R)
    inv = ch.unit_invariants(A)
    assert p ** sum(inv) == len(U)
    # |U[p^j]| from the invariants equals the count of p^j-torsion units
    for j in range(1, 4):
        killed = sum(1 for u in U if _oracle_power(R, u, p**j) == R.one())
        assert killed == p ** sum(min(j, f) for f in inv)


@pytest.mark.parametrize(
    "A,inv",
    [
        (Zpn(5, 3), [2]),
        (Zpn(2, 3), [1, 1]),
        (dual_numbers(7), [1]),
        (truncated(3, 3), [1, 1]),
        (truncated(2, 3), [2]),
        (Zpn(3, 1), []),
    ],
)
def test_unit_invariant_examples(A, inv):
    assert ch.unit_invariants(A) == inv


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 9])
@pytest.mark.parametrize("pos", [1, 2, 3, 5])
def test_hom_count_for_cyclic_groups(n, pos):
    p = 3 if n % 2 else 2
    A = ring_catalog(p)[pos]
    R = oracles.oracle_ring(oracles.CATALOG_KEYS[pos], p)
    # homomorphisms C_n -> U are elements of U with u^n = 1
    want = sum(1 for u in _oracle_units(R) if _oracle_power(R, u, n) == R.one())
    desc = pro_p_abelianization(make_group("C", n), p).descriptor
    assert ch.hom_count(desc, A) == want


def test_hom_count_free_part():
    A = Zpn(3, 3)
    desc = glqp_descriptor(2, 3)
    assert ch.hom_count(desc, A) == 3 ** (2 * 2)
    assert ch.hom_count(AbelianizationDescriptor(3, 1, (1,)), A) == 3**2 * 3


@pytest.mark.parametrize("name", ["C2-trivial", "C3-trivial", "C4-trivial", "C9-trivial"])
def test_character_deformations_equal_lifts(name):
    fx = fixture_by_name(name)
    for A in ring_catalog(fx.p):
        cd = ch.count_character_deformations(fx.rhobar, A)
        sp = df.deformation_space(fx.rhobar, A)
        assert cd.count == len(sp)
        gens = list(fx.rhobar.group.generators)
        got = {z[:, 0, 0, :].tobytes() for z in sp.lifts.gen_images}
        assert {c[gens].tobytes() for c in cd.characters} == got
        for rep in cd.as_reps()[:5]:
            rep.verify()


def test_nontrivial_residual_character():
    # chibar of order 2 on C6 over F_3, with Teichmuller lift
    G = make_group("C", 6)
    chibar = make_rep(G, Zpn(3, 1), [[[2]]])
    A = Zpn(3, 2)
    lift0 = ch.canonical_lift(chibar, A)
    assert sorted(set(lift0[:, 0].tolist())) == [1, 8]
    cd = ch.count_character_deformations(chibar, A)
    # units of Z/9 congruent to 2 mod 3 with u^6 = 1
    want = [u for u in range(9) if u % 3 == 2 and pow(u, 6, 9) == 1]
    assert cd.count == len(want) == 3


def test_character_errors():
    rho = fixture_by_name("S3-standard").rhobar
    with pytest.raises(InvalidInput):
        ch.count_character_deformations(rho, Zpn(5, 2))
    chibar = fixture_by_name("C3-trivial").rhobar
    with pytest.raises(InvalidInput):
        ch.count_character_deformations(chibar, Zpn(5, 2))


@pytest.mark.parametrize(
    "desc,text,variables",
    [
        (glqp_descriptor(2, 5), "Z_5[[x1,x2]]", 2),
        (AbelianizationDescriptor(3, 0, (2,)), "Z_3[Z/3^2]", 0),
        (AbelianizationDescriptor(2, 0, ()), "Z_2", 0),
        (AbelianizationDescriptor(3, 1, (1,)), "Z_3[[x1]][Z/3^1]", 1),
    ],
)
def test_universal_ring_descriptor(desc, text, variables):
    d = ch.universal_character_ring(desc)
    assert d.describe() == text
    assert d.variables == variables
    js = d.to_json()
    assert js["ring"] == text
    assert d.gamma_order == (None if variables else desc.p ** sum(desc.torsion))


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_parametrized_lifts_match_brute_force(p, N):
    for a in range(1, p):
        chibar = ch.SmoothCharacter(p, a, ch.primitive_root(p))
        par = ch.parametrized_lifts(chibar, N)
        brute = ch.brute_force_lifts(chibar, N)
        assert len(par) == p ** (2 * (N - 1))
        assert sorted(x.key() for x in par) == sorted(x.key() for x in brute)
        for x in par:
            assert x.reduce() == chibar
            assert ch.character_lift(chibar, *x.coordinates(), N) == x


def test_padic_character_values():
    chibar = ch.SmoothCharacter(5, 2, 2)
    chi = ch.character_lift(chibar, 5, 10, 2)
    assert chi.value(1, 0, 0) == chi.at_p
    assert chi.value(0, 0, 1) == 11
    # the Teichmuller part has order dividing p - 1
    assert chi.value(0, 4, 0) == 1
    assert chi.to_json()["precision"] == 2


def test_smooth_character_validation():
    with pytest.raises(InvalidInput):
        ch.SmoothCharacter(2, 1, 1)
    with pytest.raises(InvalidInput):
        ch.SmoothCharacter(5, 0, 1)
    with pytest.raises(InvalidInput):
        ch.PadicCharacter(5, 2, 2, 2, 11)  # 2 has order 20 mod 25
    with pytest.raises(InvalidInput):
        ch.PadicCharacter(5, 2, 2, 7, 12)
    assert ch.PadicCharacter(5, 2, 2, 7, 11).on_teich == 7  # 7 has order 4 mod 25
    with pytest.raises(InvalidInput):
        ch.character_lift(ch.SmoothCharacter(5, 2, 2), 1, 0, 2)


def test_primitive_roots():
    for p in [3, 5, 7, 11, 13]:
        g = ch.primitive_root(p)
        assert len({pow(g, k, p) for k in range(p - 1)}) == p - 1


def test_principal_series_hypothesis():
    p = 5
    g = ch.primitive_root(p)
    chi2 = ch.SmoothCharacter(p, 2, 3)
    with pytest.raises(InvalidInput):
        ch.principal_series_point(chi2, chi2, (0, 0), (0, 0), 2)
    # chi1 = chi2 * cyclotomic is excluded
    cyc = ch.SmoothCharacter(p, 2, 3 * g % p)
    with pytest.raises(InvalidInput):
        ch.principal_series_point(cyc, chi2, (0, 0), (0, 0), 2)
    chi1 = ch.SmoothCharacter(p, 3, 3)
    a, b = ch.principal_series_point(chi1, chi2, (5, 0), (0, 10), 2)
    assert a.coordinates() == (5, 0)
    assert b.coordinates() == (0, 10)
    # the full set of points has p^(4(N-1)) elements
    pts = list(itertools.product(ch.parametrized_lifts(chi1, 2), ch.parametrized_lifts(chi2, 2)))
    assert len(pts) == p**4


def test_cyclotomic_character():
    c = ch.cyclotomic(7)
    assert c.at_p == 1
    assert c.on_teich == ch.primitive_root(7)
