import numpy as np
import pytest

from defrep import deformations as df
from defrep.errors import InvalidInput, NotAHomomorphism
from defrep.fixtures import fixture_by_name, ring_catalog
from defrep.groups import GroupHom, make_group
from defrep.reps import (
    AdjointModule,
    centralizer,
    centralizer_orders_batch,
    conjugate,
    contragredient,
    direct_sum,
    has_central_character,
    inverse_character,
    is_absolutely_irreducible,
    make_rep,
    mat_inv,
    pullback,
    reduce_rep,
    stabilizer_in_congruence,
    tensor_reps,
    trivial_rep,
    twist,
)
from defrep.rings import Zpn, dual_numbers, residue_map

import oracles


def test_make_rep_rejects_bad_input():
    G = make_group("C", 3)
    F3 = Zpn(3, 1)
    with pytest.raises(InvalidInput):
        make_rep(G, F3, [[[0, 0], [0, 1]]])
    with pytest.raises(NotAHomomorphism) as exc:
        make_rep(G, F3, [[[2, 0], [0, 1]]])
    g, h = exc.value.witness
    assert 0 <= g < 3 and 0 <= h < 3
    with pytest.raises(InvalidInput):
        make_rep(G, F3, [])


@pytest.mark.parametrize(
    "name,expected",
    [
        ("C3-trivial", True),
        ("S3-standard", True),
        ("Q8-2dim", True),
        ("SL2F3-natural", True),
        ("C2-jordan", False),
        ("V4-trivial", True),
    ],
)
def test_absolute_irreducibility_matches_span_rank(name, expected):
    rho = fixture_by_name(name).rhobar
    n, p = rho.n, rho.ring.p
    span = oracles.rank_mod_p(rho.images[..., 0].reshape(rho.group.order, -1), p)
    assert (span == n * n) is expected
    assert is_absolutely_irreducible(rho) is expected


def test_direct_sum_is_not_irreducible():
    rho = trivial_rep(make_group("C", 3), Zpn(3, 1))
    assert not is_absolutely_irreducible(direct_sum(rho, rho))


def _to_oracle_matrix(A, key, M):
    n = M.shape[0]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            c = [int(x) for x in M[i, j]]
            row.append(c[0] if key in ("F_p", "Z/p^2", "Z/p^3") else tuple(c))
        out.append(tuple(row))
    return tuple(out)


@pytest.mark.parametrize(
    "name,ring_index",
    [("S3-standard", 0), ("C2-jordan", 1), ("C2-jordan", 2), ("Q8-2dim", 2), ("SL2F3-natural", 2), ("C2-jordan", 0)],
)
def test_centralizer_order_matches_oracle(name, ring_index):
    fx = fixture_by_name(name)
    A = ring_catalog(fx.p)[ring_index]
    key = oracles.CATALOG_KEYS[ring_index]
    R = oracles.oracle_ring(key, fx.p)
    sp = df.deformation_space(fx.rhobar, A)
    for cl in sp.classes[:3]:
        rep = cl.representative
        gens = [_to_oracle_matrix(A, key, M) for M in rep.gen_images]
        want = oracles.centralizer_size(R, gens)
        assert centralizer(rep, verify=True).order == want
        logs = centralizer_orders_batch(A, None, rep.gen_images[None])
        assert A.p ** int(logs[0]) == want


def test_stabilizer_is_scalar_for_irreducible():
    fx = fixture_by_name("S3-standard")
    A = Zpn(5, 2)
    sp = df.deformation_space(fx.rhobar, A)
    for cl in sp.classes:
        st = stabilizer_in_congruence(cl.representative)
        assert st.order == A.p**A.m_exp
        assert st.is_scalar()


def test_twist_and_tensor_of_characters():
    G = make_group("C", 4)
    A = Zpn(5, 2)
    chi = make_rep(G, A, [[[7]]])  # 7 has order 4 mod 25
    psi = make_rep(G, A, [[[24]]])
    tw = twist(chi, psi)
    assert tw.gen_images.ravel().tolist() == [7 * 24 % 25]
    ten, (C, ia, ib) = tensor_reps(chi, psi)
    assert ten.n == 1
    assert C.order == 25
    assert np.array_equal(ten.images, C.mul(ia(chi.images), ib(psi.images)))
    inv = inverse_character(chi)
    assert np.all(A.mul(inv.images, chi.images)[:, 0, 0] == A.one)


def test_contragredient_is_an_involution():
    rho = fixture_by_name("SL2F3-natural").rhobar
    back = contragredient(contragredient(rho))
    assert back == rho
    # rho(g)^T rho^vee(g) = 1
    dual = contragredient(rho)
    A = rho.ring
    prod = A.matmul(rho.images.transpose(0, 2, 1, 3), dual.images)
    assert np.all(prod == A.eye(2))


def test_pullback_along_projection():
    S3 = make_group("S", 3)
    C2 = make_group("C", 2)
    sign = [0 if np.linalg.det(np.eye(3)[list(S3.labels[g])]) > 0 else 1 for g in range(6)]
    f = GroupHom(S3, C2, sign)
    chi = make_rep(C2, Zpn(3, 1), [[[2]]])
    pb = pullback(chi, f)
    pb.verify()
    assert sorted(set(pb.images[:, 0, 0, 0].tolist())) == [1, 2]
    with pytest.raises(InvalidInput):
        pullback(pb, f)


def test_central_character():
    q8 = fixture_by_name("Q8-2dim").rhobar
    ok, vals = has_central_character(q8)
    assert ok
    assert sorted(int(v[0]) for v in vals.values()) == [1, 2]
    jordan = fixture_by_name("C2-jordan").rhobar
    assert not has_central_character(jordan)[0]


def test_conjugate_and_reduce():
    rho = fixture_by_name("S3-standard").rhobar
    A = Zpn(5, 2)
    lift = df.deformation_space(rho, A).classes[0].representative
    c = A.lift_matrix(np.array([[1, 5], [0, 1]]))
    conj = conjugate(lift, c)
    conj.verify()
    assert reduce_rep(conj, residue_map(A)) == reduce_rep(lift, residue_map(A))
    assert np.all(A.matmul(c, mat_inv(A, c)) == A.eye(2))


def test_adjoint_action_is_a_homomorphism():
    rho = fixture_by_name("SL2F3-natural").rhobar
    ad = AdjointModule(rho)
    G = rho.group
    for g in range(G.order):
        for h in range(0, G.order, 5):
            assert np.array_equal(ad.action[g] @ ad.action[h] % 3, ad.action[G.mul(g, h)])
    with pytest.raises(InvalidInput):
        AdjointModule(trivial_rep(G, dual_numbers(3)))
