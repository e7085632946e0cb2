import numpy as np
import pytest

from defrep import modules as md
from defrep.config import caps
from defrep.errors import CapExceeded, InvalidInput
from defrep.fixtures import ring_catalog
from defrep.rings import Zpn, dual_numbers

import oracles


def _catalog_pairs(p):
    for A in ring_catalog(p):
        cat = md.module_catalog(A)
        for (a, M) in cat:
            for (b, N) in cat:
                yield A, a, M, b, N


def _small(M, N):
    return sum(min(d, e) for d in M.invariants for e in N.invariants) <= 9


@pytest.mark.parametrize("p", [2, 3])
def test_tensor_order_matches_balanced_maps(p):
    checked = 0
    for A, a, M, b, N in _catalog_pairs(p):
        if not _small(M, N):
            continue
        T, _ = md.tensor_modules(M, N)
        assert T.order == oracles.balanced_map_count(M, N), (A.name, a, b)
        checked += 1
    assert checked > 100


@pytest.mark.parametrize("p", [2, 3])
def test_dual_module_adjunction(p):
    # Hom_A(k, M^vee) = (k (x) M)^vee, counted by brute force on both sides
    for A in ring_catalog(p)[:6]:
        k = md.residue_module(A)
        for name, M in md.module_catalog(A):
            D = md.dual_module(M)
            assert D.order == M.order
            if _small(k, M) and D.order <= 729:
                assert oracles.module_hom_count(k, D) == oracles.balanced_map_count(k, M), (A.name, name)


def test_tensor_examples():
    A = Zpn(3, 2)
    k = md.residue_module(A)
    T, _ = md.tensor_modules(k, k)
    assert T.order == 3
    F = md.free_module(A, 2)
    T, _ = md.tensor_modules(F, k)
    assert T.order == 9
    Z = md.free_module(A, 0)
    assert md.tensor_modules(Z, F)[0].order == 1


def test_free_module_dual_cardinality():
    A = dual_numbers(3)
    for r in range(3):
        assert md.dual_module(md.free_module(A, r)).order == A.order**r


@pytest.mark.parametrize("p", [2, 3])
def test_duality_and_unit_on_catalog(p):
    for A in ring_catalog(p):
        for name, M in md.module_catalog(A):
            assert md.double_dual_check(M), (A.name, name)
            assert md.unit_check(M), (A.name, name)


@pytest.mark.parametrize("p", [2, 3])
def test_distributivity_on_catalog(p):
    for A in ring_catalog(p)[:6]:
        cat = dict(md.module_catalog(A))
        for a, b, c in [("k", "A", "k"), ("A/m^2", "k", "A x k"), ("A", "0", "A/m^2")]:
            assert md.distributivity_check(cat[a], cat[b], cat[c]), (A.name, a, b, c)


def test_hom_counts():
    A = Zpn(3, 2)
    k = md.residue_module(A)
    F = md.free_module(A, 1)
    # Hom(A, N) = N and Hom(k, A) = socle of A = 3A
    assert oracles.module_hom_count(F, k) == 3
    assert oracles.module_hom_count(k, F) == 3
    assert oracles.module_hom_count(F, F) == 9


def test_is_isomorphism_rejects_bad_maps():
    A = Zpn(3, 2)
    F = md.free_module(A, 1)
    k = md.residue_module(A)
    assert md.is_isomorphism(F, F, [[1]])
    assert md.is_isomorphism(F, F, [[2]])
    assert not md.is_isomorphism(F, F, [[3]])
    assert not md.is_isomorphism(F, k, [[1]])
    assert not md.is_isomorphism(k, md.quotient_module(F, [[3]])[0], [[0]])
    # Z/3 x Z/9 -> Z/9 x Z/3: swapping generators is an isomorphism, while the
    # identity matrix sends an element of order 3 to one of order 9
    M = md.direct_product(k, F)
    N = md.direct_product(F, k)
    assert md.is_isomorphism(M, N, [[0, 1], [1, 0]])
    assert not md.is_isomorphism(M, N, [[1, 0], [0, 1]])
    D = dual_numbers(3)
    FD = md.free_module(D, 1)
    # swapping the coordinates 1 and eps is additive but not D-linear
    assert not md.is_isomorphism(FD, FD, [[0, 1], [1, 0]])


def test_pairing_and_evaluation():
    A = Zpn(3, 2)
    M = md.direct_product(md.free_module(A, 1), md.residue_module(A))
    D = md.dual_module(M)
    E = md.evaluation_map(M)
    assert E.shape == (2, 2)
    # f_i(e_j) is delta_ij / p^{d_i}, written over p^K with K = 2
    assert md.pairing(M, [1, 0], [1, 0]) == 1
    assert md.pairing(M, [0, 1], [0, 1]) == 3
    assert md.pairing(M, [1, 0], [0, 1]) == 0
    assert D.invariants == M.invariants


def test_bad_action_rejected():
    A = Zpn(3, 2)
    with pytest.raises(InvalidInput):
        md.FiniteModule(A, [1], [[2]])  # 1 must act as the identity
    with pytest.raises(InvalidInput):
        md.FiniteModule(A, [1, 2], np.eye(2, dtype=np.int64) + np.array([[0, 1], [0, 0]]))
    D = dual_numbers(3)
    with pytest.raises(InvalidInput):
        md.FiniteModule(D, [1], [[1], [1]])  # eps^2 = 0 but eps acts as 1
    with pytest.raises(InvalidInput):
        md.direct_product(md.free_module(A, 1), md.free_module(D, 1))


def test_cyclic_module_and_presentation():
    D = dual_numbers(3)
    M = md.cyclic_module(D, [[0, 1]])
    assert M.order == 3
    assert M.presentation[0] == 1
    N = md.from_presentation(D, 2, [[[1, 0], [0, 0]]])
    assert N.order == 9
    assert N.to_json()["order"] == 9


def test_module_enumeration_cap():
    M = md.free_module(Zpn(3, 2), 3)
    assert len(M.elements()) == 729
    with caps(ring=100):
        with pytest.raises(CapExceeded):
            M.elements()
    assert md.free_module(Zpn(3, 1), 0).elements().shape == (1, 0)
