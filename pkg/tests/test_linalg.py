import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defrep import linalg

P = 3


def _group(ann):
    return np.array(list(itertools.product(*[range(P**a) for a in ann])), dtype=np.int64).reshape(-1, len(ann))


@st.composite
def hom_case(draw):
    src = draw(st.lists(st.integers(1, 2), min_size=1, max_size=3))
    tgt = draw(st.lists(st.integers(1, 2), min_size=1, max_size=2))
    F = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for i, a in enumerate(tgt):
        for j, b in enumerate(src):
            # well defined needs p^b F_ij = 0 mod p^a
            step = P ** max(0, a - b)
            F[i, j] = draw(st.integers(0, P**a - 1)) // step * step
    return src, tgt, F


def _apply(F, X, tgt):
    return (X @ F.T) % np.array([P**a for a in tgt])


@settings(max_examples=40, deadline=None)
@given(hom_case())
def test_kernel_matches_enumeration(case):
    src, tgt, F = case
    X = _group(src)
    zero = ~_apply(F, X, tgt).any(axis=1)
    _, orders = linalg.kernel(F, src, tgt, P)
    assert P ** sum(orders) == zero.sum()
    assert linalg.image_exponent(F, src, tgt, P) == sum(src) - sum(orders)


@settings(max_examples=40, deadline=None)
@given(hom_case(), st.data())
def test_solve_matches_enumeration(case, data):
    src, tgt, F = case
    X = _group(src)
    imgs = _apply(F, X, tgt)
    y = np.array([data.draw(st.integers(0, P**a - 1)) for a in tgt])
    x = linalg.solve(F, src, tgt, y, P)
    reachable = (imgs == y).all(axis=1).any()
    if reachable:
        assert x is not None
        assert np.array_equal(_apply(F, x[None], tgt)[0], y)
    else:
        assert x is None


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 2), min_size=1, max_size=3), st.data())
def test_quotient_order_and_projection(ann, data):
    k = data.draw(st.integers(0, 2))
    gens = [np.array([data.draw(st.integers(0, P**a - 1)) for a in ann]) for _ in range(k)]
    Q = linalg.quotient(ann, gens, P)
    X = _group(ann)
    mods = np.array([P**a for a in ann])
    # subgroup generated by gens, by closure
    S = {tuple([0] * len(ann))}
    frontier = list(S)
    while frontier:
        nxt = []
        for s in frontier:
            for g in gens:
                t = tuple(((np.array(s) + g) % mods).tolist())
                if t not in S:
                    S.add(t)
                    nxt.append(t)
        frontier = nxt
    assert P ** sum(Q.new_ann) * len(S) == len(X)
    if Q.new_ann:
        qm = np.array([P**a for a in Q.new_ann])
        for g in gens:
            assert not ((Q.proj @ g) % qm).any()
        # lift then project is the identity on the quotient
        for i in range(len(Q.new_ann)):
            e = np.zeros(len(Q.new_ann), dtype=np.int64)
            e[i] = 1
            assert np.array_equal((Q.proj @ (Q.lift @ e)) % qm, e)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_rref_and_nullspace(r, c, data):
    M = np.array([[data.draw(st.integers(0, P - 1)) for _ in range(c)] for _ in range(r)])
    N = linalg.nullspace_mod_p(M, P)
    # oracle rank: count vectors in the row space
    rowspace = {tuple((np.array(coef) @ M % P).tolist()) for coef in itertools.product(range(P), repeat=r)}
    rank = round(np.log(len(rowspace)) / np.log(P))
    assert linalg.rank_mod_p(M, P) == rank
    assert len(N) == c - rank
    if len(N):
        assert not (M @ np.asarray(N).T % P).any()


def test_echelon_membership():
    E = linalg.Echelon(np.array([[1, 2, 0], [0, 0, 1]]), 3, 5)
    assert E.dim == 2
    assert E.contains(np.array([2, 4, 3]))
    assert not E.contains(np.array([0, 1, 0]))


def test_rref_empty_and_bad_shape():
    assert linalg.rref(np.zeros((0, 3), dtype=np.int64), 3)[0].shape == (0, 3)
    with pytest.raises(Exception):
        linalg.rref(np.zeros(3, dtype=np.int64), 3)
