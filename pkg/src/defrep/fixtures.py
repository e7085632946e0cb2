"""Standard residual representations, ring catalogs and fiber configurations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import direct_product, make_group
from .reps import MatrixRep, make_rep, trivial_rep
from .rings import (
    RingMorphism,
    Zpn,
    dual_numbers,
    fiber_product,
    identity,
    mixed,
    reduction,
    residue_map,
    truncated,
    truncation,
)


@dataclass
class Fixture:
    name: str
    rhobar: MatrixRep
    p: int

    @property
    def group(self):
        return self.rhobar.group


def trivial_character(order: int, p: int) -> Fixture:
    G = make_group("C", order)
    return Fixture(f"C{order}-trivial-p{p}", trivial_rep(G, Zpn(p, 1)), p)


def s3_standard(p: int = 5) -> Fixture:
    G = make_group("S", 3)
    return Fixture(f"S3-standard-p{p}", make_rep(G, Zpn(p, 1), [[[0, 1], [1, 0]], [[0, -1], [1, -1]]]), p)


def q8_two_dim(p: int = 3) -> Fixture:
    G = make_group("Q8")
    return Fixture(f"Q8-2dim-p{p}", make_rep(G, Zpn(p, 1), [[[0, -1], [1, 0]], [[1, 1], [1, -1]]]), p)


def sl2_natural(p: int = 3) -> Fixture:
    G = make_group("SL2", p)
    return Fixture(f"SL2F{p}-natural", make_rep(G, Zpn(p, 1), [G.labels[g] for g in G.generators]), p)


def c2_jordan() -> Fixture:
    G = make_group("C", 2)
    return Fixture("C2-jordan-p2", make_rep(G, Zpn(2, 1), [[[1, 1], [0, 1]]]), 2)


def v4_trivial() -> Fixture:
    G = direct_product(make_group("C", 2), make_group("C", 2))
    return Fixture("V4-trivial-p2", trivial_rep(G, Zpn(2, 1)), 2)


def standard_fixtures():
    return [
        trivial_character(3, 3),
        s3_standard(5),
        q8_two_dim(3),
        sl2_natural(3),
        c2_jordan(),
    ]


def fixture_by_name(name: str) -> Fixture:
    table = {
        "C2-trivial": lambda: trivial_character(2, 2),
        "C3-trivial": lambda: trivial_character(3, 3),
        "C5-trivial": lambda: trivial_character(5, 5),
        "C4-trivial": lambda: trivial_character(4, 2),
        "C9-trivial": lambda: trivial_character(9, 3),
        "S3-standard": lambda: s3_standard(5),
        "Q8-2dim": lambda: q8_two_dim(3),
        "SL2F3-natural": lambda: sl2_natural(3),
        "C2-jordan": c2_jordan,
        "V4-trivial": v4_trivial,
    }
    if name not in table:
        raise KeyError(name)
    return table[name]()


FIXTURE_NAMES = (
    "C2-trivial",
    "C3-trivial",
    "C5-trivial",
    "C4-trivial",
    "C9-trivial",
    "S3-standard",
    "Q8-2dim",
    "SL2F3-natural",
    "C2-jordan",
    "V4-trivial",
)


def ring_catalog(p: int):
    """Local rings with residue field F_p and |m_A| <= p^2."""
    d = dual_numbers(p)
    z2 = Zpn(p, 2)
    dd, _, _ = fiber_product(residue_map(d), residue_map(d))
    dd.name = f"F_{p}[eps]xF_{p}[eps]"
    zz, _, _ = fiber_product(residue_map(z2), residue_map(z2))
    zz.name = f"Z/{p}^2xZ/{p}^2"
    return [Zpn(p, 1), d, z2, Zpn(p, 3), truncated(p, 3), mixed(p, 2), dd, zz]


def fiber_configurations(p: int):
    """(label, phi1, phi2) with phi1, phi2 surjective onto a common A0."""
    d = dual_numbers(p)
    z2 = Zpn(p, 2)
    t2 = truncated(p, 2)
    return [
        ("eps x eps over F_p", residue_map(d), residue_map(d)),
        ("Z/p^2 x Z/p^2 over F_p", residue_map(z2), residue_map(z2)),
        ("Z/p^2 x eps over F_p", residue_map(z2), residue_map(d)),
        ("eps x F_p over F_p (identity)", residue_map(d), identity(Zpn(p, 1))),
        ("Z/p^3 x Z/p^2 over Z/p^2 (identity)", reduction(p, 3, 2), identity(z2)),
        ("x^3 x x^2 over F_p[x]/x^2 (identity)", truncation(p, 3, 2), identity(t2)),
    ]


def small_extensions(p: int):
    """Small extensions among catalog rings."""
    d = dual_numbers(p)
    z2 = Zpn(p, 2)
    out = [
        ("Z/p^2 -> F_p", residue_map(z2)),
        ("eps -> F_p", residue_map(d)),
        ("Z/p^3 -> Z/p^2", reduction(p, 3, 2)),
        ("x^3 -> x^2", truncation(p, 3, 2)),
    ]
    m = mixed(p, 2)
    # Z/p^2[x]/(x^2, px) -> Z/p^2, killing x
    out.append(("mixed -> Z/p^2", RingMorphism(m, z2, np.array([[1, 0]]))))
    return out
