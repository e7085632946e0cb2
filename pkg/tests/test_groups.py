import itertools
from math import gcd

import numpy as np
import pytest

from defrep.errors import InvalidInput, NotAHomomorphism
from defrep.groups import (
    FiniteGroup,
    GroupHom,
    abelianization,
    commutator_subgroup,
    direct_product,
    glqp_descriptor,
    homomorphisms,
    identity_hom,
    make_group,
    pro_p_abelianization,
)

GROUPS = [
    (("C", 1), 1),
    (("C", 6), 6),
    (("S", 3), 6),
    (("S", 4), 24),
    (("D", 4), 8),
    (("Q8",), 8),
    (("A4",), 12),
    (("SL2", 3), 24),
]


@pytest.mark.parametrize("args,order", GROUPS)
def test_group_axioms(args, order):
    G = make_group(*args)
    assert G.order == order
    T = G.table
    e = G.identity
    assert np.array_equal(T[e], np.arange(order))
    # associativity on every triple
    for a, b in itertools.product(range(order), repeat=2):
        assert np.array_equal(T[T[a, b]], T[a][T[b]])
    # latin square
    assert all(len(set(row)) == order for row in T)
    assert sorted(G.closure(list(G.generators))) == list(range(order))


def test_sl2_labels_are_matrices_of_determinant_one():
    G = make_group("SL2", 3)
    mats = [np.array(G.labels[g]) for g in range(G.order)]
    assert all(round(np.linalg.det(m)) % 3 == 1 for m in mats)
    assert len({m.tobytes() for m in (x % 3 for x in mats)}) == 24
    # the table is matrix multiplication mod 3
    for g, h in itertools.product(range(24), repeat=2):
        assert np.array_equal(np.array(G.labels[G.mul(g, h)]) % 3, mats[g] @ mats[h] % 3)


def test_quaternion_structure():
    G = make_group("Q8")
    orders = sorted(G.element_order(g) for g in range(8))
    assert orders == [1, 2, 4, 4, 4, 4, 4, 4]
    assert len(G.center()) == 2


@pytest.mark.parametrize("n,m", [(4, 6), (3, 9), (5, 7), (6, 6)])
def test_cyclic_hom_counts(n, m):
    assert len(homomorphisms(make_group("C", n), make_group("C", m))) == gcd(n, m)


def test_hom_s3_to_c2():
    # sign is the only nontrivial map
    assert len(homomorphisms(make_group("S", 3), make_group("C", 2))) == 2


def test_bad_hom_has_witness():
    G = make_group("C", 4)
    with pytest.raises(NotAHomomorphism) as exc:
        GroupHom(G, G, [0, 1, 1, 1])
    assert len(exc.value.witness) == 2


def test_identity_hom_composes():
    G = make_group("S", 3)
    f = identity_hom(G)
    assert np.array_equal(f.compose(f).images, np.arange(6))


@pytest.mark.parametrize(
    "args,p,torsion",
    [
        (("C", 9), 3, (2,)),
        (("C", 6), 3, (1,)),
        (("C", 6), 5, ()),
        (("S", 3), 2, (1,)),
        (("S", 3), 3, ()),
        (("Q8",), 2, (1, 1)),
        (("A4",), 3, (1,)),
        (("SL2", 3), 3, (1,)),
        (("D", 4), 2, (1, 1)),
    ],
)
def test_pro_p_abelianization(args, p, torsion):
    G = make_group(*args)
    ab = pro_p_abelianization(G, p)
    assert ab.descriptor.torsion == torsion
    assert ab.descriptor.free_rank == 0
    # oracle: |G/[G,G]| has p-part p^sum(torsion)
    q = G.order // len(commutator_subgroup(G))
    pp = 1
    while q % p == 0:
        q //= p
        pp *= p
    assert pp == p ** sum(torsion)
    # gamma is a surjective homomorphism onto the torsion group
    if torsion:
        mods = np.array([p**e for e in torsion])
        gam = ab.gamma
        for g, h in itertools.product(range(G.order), repeat=2):
            assert np.array_equal((gam[g] + gam[h]) % mods, gam[G.mul(g, h)])
        assert len({tuple(r) for r in gam}) == p ** sum(torsion)


def test_product_abelianization():
    G = direct_product(make_group("C", 2), make_group("C", 4))
    assert abelianization(G, 2).torsion == (1, 2)


@pytest.mark.parametrize("n,p", [(1, 3), (2, 3), (2, 5), (3, 7)])
def test_glqp_has_two_variables(n, p):
    d = glqp_descriptor(n, p)
    assert d.free_rank == 2
    assert d.torsion == ()


def test_glqp_rejects_p2_and_bad_input():
    with pytest.raises(InvalidInput):
        glqp_descriptor(2, 2)
    with pytest.raises(InvalidInput):
        glqp_descriptor(0, 3)
    with pytest.raises(InvalidInput):
        pro_p_abelianization(make_group("C", 3), 4)


def test_invalid_table_rejected():
    with pytest.raises(Exception):
        FiniteGroup(np.array([[0, 1], [0, 1]]), [1])
