import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defrep.cohomology import coboundary0, coboundary1, h1, h2, obstruction_class
from defrep.deformations import deformation_space
from defrep.errors import InvalidInput
from defrep.fixtures import fixture_by_name
from defrep.groups import make_group
from defrep.reps import AdjointModule, make_rep, reduce_rep
from defrep.rings import Zpn, dual_numbers, reduction, residue_map

import oracles

# (fixture, expected dim H^1, dim H^2); the oracle recomputes both
SMALL = [
    ("C3-trivial", 1, 1),
    ("S3-standard", 0, 0),
    ("Q8-2dim", 0, 0),
    ("C2-jordan", 0, 0),
    ("V4-trivial", 2, 3),
]


@pytest.mark.parametrize("name,d1,d2", SMALL)
def test_dimensions_match_full_complex(name, d1, d2):
    rho = fixture_by_name(name).rhobar
    G = rho.group
    dims = oracles.cohomology_dims(G.table, rho.images[..., 0], rho.ring.p)
    assert dims[1:] == [d1, d2]
    assert h1(rho).dim == d1
    assert h2(rho).dim == d2


def test_sl2_h1_against_oracle():
    rho = fixture_by_name("SL2F3-natural").rhobar
    dims = oracles.cohomology_dims(rho.group.table, rho.images[..., 0], 3, top=1)
    assert h1(rho).dim == dims[1]


@pytest.mark.parametrize("n,p", [(2, 2), (4, 2), (5, 5), (6, 3)])
def test_cyclic_trivial_character(n, p):
    # H^1 = Hom(C_n, F_p), H^2 = F_p / n
    rho = make_rep(make_group("C", n), Zpn(p, 1), [[[1]]])
    want = 1 if n % p == 0 else 0
    assert h1(rho).dim == want
    assert h2(rho).dim == want


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_h1_coordinates_round_trip(data):
    rho = fixture_by_name("V4-trivial").rhobar
    H = h1(rho)
    coords = tuple(data.draw(st.integers(0, 1)) for _ in range(H.dim))
    c = H.from_coordinates(coords)
    # adding a coboundary leaves the class unchanged
    X = np.array([data.draw(st.integers(0, 1)) for _ in range(AdjointModule(rho).dim)])
    c2 = (c + coboundary0(AdjointModule(rho), X)) % 2
    assert H.coordinates(c) == coords
    assert H.coordinates(c2) == coords


def test_h1_rejects_non_cocycle():
    rho = fixture_by_name("C3-trivial").rhobar
    bad = np.zeros((3, 1), dtype=np.int64)
    bad[1] = 1
    with pytest.raises(InvalidInput):
        h1(rho).coordinates(bad)


def test_coboundaries_are_trivial_in_h2():
    rho = fixture_by_name("V4-trivial").rhobar
    ad = AdjointModule(rho)
    H = h2(rho)
    rng = np.random.default_rng(0)
    for _ in range(5):
        c = rng.integers(0, 2, size=(4, ad.dim))
        c[rho.group.identity] = 0
        assert H.is_coboundary(coboundary1(ad, c))
    for u in H.basis:
        assert not H.is_coboundary(u)


def test_cohomology_needs_a_field():
    with pytest.raises(InvalidInput):
        make_rep(make_group("C", 3), dual_numbers(3), [[[1, 0]]])
    rho = make_rep(make_group("C", 3), dual_numbers(3), [[[[1, 0]]]])
    with pytest.raises(InvalidInput):
        h1(rho)


def _oracle_lift_exists(rho_B, phi, R):
    """Brute force over the oracle ring Z/p^N: does rho_B lift along phi?"""
    G = rho_B.group
    gens = list(G.generators)
    rhobar = reduce_rep(rho_B, residue_map(rho_B.ring))
    residual = [rhobar.images[s][..., 0] for s in gens]
    target = [rho_B.images[s][..., 0] % rho_B.ring.mods[0] for s in gens]
    q = int(rho_B.ring.mods[0])
    for imgs in oracles.brute_lifts(G.table, gens, G.identity, residual, R):
        if all(np.array_equal(np.array(X) % q, Y) for X, Y in zip(imgs, target)):
            return True
    return False


@pytest.mark.parametrize(
    "images,p",
    [
        ([[[4]]], 3),  # C3 character of order 3 over Z/9
        ([[[1]]], 3),
        ([[[7]]], 3),
        ([[[3]]], 2),  # C2 over Z/4
        ([[[1]]], 2),
    ],
)
def test_obstruction_matches_oracle_characters(images, p):
    n = 3 if p == 3 else 2
    G = make_group("C", n)
    rho_B = make_rep(G, Zpn(p, 2), images)
    phi = reduction(p, 3, 2)
    obs = obstruction_class(rho_B, phi)
    want = _oracle_lift_exists(rho_B, phi, oracles.ZmodRing(p, 3))
    assert obs.vanishes is want


def test_obstruction_c2_jordan_over_z4():
    fx = fixture_by_name("C2-jordan")
    phi = reduction(2, 3, 2)
    R = oracles.ZmodRing(2, 3)
    for cl in deformation_space(fx.rhobar, Zpn(2, 2)).classes:
        obs = obstruction_class(cl.representative, phi)
        assert obs.vanishes is _oracle_lift_exists(cl.representative, phi, R)


def test_obstruction_is_independent_of_section():
    rho_B = make_rep(make_group("C", 3), Zpn(3, 2), [[[4]]])
    phi = reduction(3, 3, 2)
    A = phi.source
    base = obstruction_class(rho_B, phi)
    lift = phi.lift(rho_B.images)
    lift[rho_B.group.identity] = A.eye(1)
    lift[2] = (lift[2] + 9) % 27
    other = obstruction_class(rho_B, phi, section_images=lift)
    assert other.class_coords == base.class_coords
    with pytest.raises(InvalidInput):
        obstruction_class(rho_B, phi, section_images=(lift + 1) % 27)


def test_obstruction_needs_small_extension():
    rho_B = make_rep(make_group("C", 3), Zpn(3, 1), [[[1]]])
    with pytest.raises(InvalidInput):
        obstruction_class(rho_B, reduction(3, 3, 1))
