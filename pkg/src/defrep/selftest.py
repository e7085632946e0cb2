"""Self-verification over the shipped fixture pack.

The report is a list of checks in a fixed order; every check names the
statement it instantiates.  Units of work are independent, so they can be
spread over worker processes and merged back in input order.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ProcessPoolExecutor

from . import characters as ch
from . import deformations as df
from . import modules as md
from .cohomology import h1, h2
from .errors import HypothesisWarning
from .fixtures import fixture_by_name, fiber_configurations, ring_catalog, small_extensions
from .groups import glqp_descriptor
from .reps import is_absolutely_irreducible

TANGENT_FIXTURES = ("C3-trivial", "S3-standard", "Q8-2dim", "SL2F3-natural", "C2-jordan")
ABSIRR_FIXTURES = ("S3-standard", "Q8-2dim", "SL2F3-natural")
RIGID_FIXTURES = ("S3-standard", "Q8-2dim")
CHARACTER_FIXTURES = ("C2-trivial", "C3-trivial", "C4-trivial", "C5-trivial", "C9-trivial")
LIMIT_FIXTURES = ("S3-standard", "C3-trivial")
OBSTRUCTION_FIXTURES = TANGENT_FIXTURES + ("V4-trivial",)
G_A_LIMIT = 10**6


def _row(section, subject, check: df.Check):
    out = check.to_json()
    out["section"] = section
    out["subject"] = subject
    return out


def _plain(name, statement, passed, detail=None, enforced=True):
    return df.Check(name, statement, bool(passed), detail or {}, enforced)


# ---------------------------------------------------------------------------
# units


def unit_tangent(name, strategy):
    fx = fixture_by_name(name)
    T = df.tangent_space(fx.rhobar, strategy)
    return [_row("tangent", name, c) for c in T.checks]


def unit_orbits(name, strategy):
    fx = fixture_by_name(name)
    absirr = is_absolutely_irreducible(fx.rhobar)
    rows = []
    for A in ring_catalog(fx.p):
        if df.congruence_order(A, fx.rhobar.n) > G_A_LIMIT:
            continue
        sp = df.deformation_space(fx.rhobar, A, strategy)
        rows.append(_row("orbits", name, df.orbit_check(sp)))
        if absirr:
            rows.append(_row("schur", name, df.schur_check(sp)))
    return rows


def unit_rigidity(name, strategy):
    fx = fixture_by_name(name)
    H1, H2 = h1(fx.rhobar), h2(fx.rhobar)
    rows = [_row("rigidity", name, _plain("cohomology-vanishes", "Cor.tangent", H1.dim == 0 and H2.dim == 0, {"h1": H1.dim, "h2": H2.dim}))]
    for A in ring_catalog(fx.p):
        n = len(df.deformation_space(fx.rhobar, A, strategy))
        rows.append(_row("rigidity", name, _plain("single-class", "Cor.tangent", n == 1, {"ring": A.name, "classes": n})))
    return rows


def unit_fiber(name, strategy):
    fx = fixture_by_name(name)
    rows = []
    for label, phi1, phi2 in fiber_configurations(fx.p):
        rep = df.fiber_product_check(fx.rhobar, phi1, phi2, strategy, label=label)
        for c in rep.checks:
            c.detail = dict(c.detail, configuration=label, counts=rep.counts)
            rows.append(_row("fiber", name, c))
    return rows


def unit_limit(name, strategy):
    fx = fixture_by_name(name)
    rep = df.inverse_limit_check(fx.rhobar, N=3, strategy=strategy)
    rows = []
    for c in rep.checks:
        c.detail = dict(c.detail, levels=rep.levels, counts=rep.counts)
        rows.append(_row("limit", name, c))
    return rows


def unit_obstruction(name, strategy):
    fx = fixture_by_name(name)
    rows = []
    for label, phi in small_extensions(fx.p):
        sp = df.deformation_space(fx.rhobar, phi.target, strategy)
        for cl in sp.classes:
            rep = df.lift_classes(cl.representative, phi, strategy)
            detail = {
                "extension": label,
                "class": cl.index,
                "vanishes": bool(rep.obstruction.vanishes),
                "lifts_found": int(rep.lifts_found),
                "lift_classes": [int(x) for x in rep.classes],
            }
            ok = rep.consistent and (bool(rep.classes) == bool(rep.lifts_found))
            rows.append(_row("obstruction", name, _plain("lift-iff-unobstructed", "Prop.obstruction", ok, detail)))
    return rows


def character_set_equal(chibar, A, strategy="tower"):
    cd = ch.count_character_deformations(chibar, A)
    sp = df.deformation_space(chibar, A, strategy)
    gens = list(chibar.group.generators)
    want = {c[gens].tobytes() for c in cd.characters}
    got = {z[:, 0, 0, :].tobytes() for z in sp.lifts.gen_images}
    return want == got and cd.count == len(sp.lifts) == len(cd.characters), cd.count, len(sp.lifts)


def unit_characters(name, strategy):
    fx = fixture_by_name(name)
    rows = []
    for A in ring_catalog(fx.p):
        ok, count, lifts = character_set_equal(fx.rhobar, A, strategy)
        rows.append(_row("characters", name, _plain("character-deformations", "Prop.character", ok, {"ring": A.name, "hom_count": count, "lifts": lifts})))
    return rows


def unit_stated_values(_name, _strategy):
    rows = []
    for n in (2, 3):
        for p in (3, 5, 7):
            d = ch.universal_character_ring(glqp_descriptor(n, p))
            rows.append(_row("stated-values", f"GL{n}(Q_{p})", _plain("glqp-variables", "Ex.glqp", d.variables == 2 and d.describe() == f"Z_{p}[[x1,x2]]", {"ring": d.describe()})))
    for p in (3, 5):
        for N in (1, 2, 3):
            for a in range(1, p):
                chibar = ch.SmoothCharacter(p, a, 1)
                par = ch.parametrized_lifts(chibar, N)
                brute = ch.brute_force_lifts(chibar, N)
                ok = len(par) == p ** (2 * (N - 1)) and sorted(x.key() for x in par) == sorted(x.key() for x in brute)
                rows.append(_row("stated-values", f"p={p},N={N},chi(p)={a}", _plain("principal-series-count", "Cor.ps", ok, {"parametrized": len(par), "brute_force": len(brute)})))
    return rows


def unit_modules(p_str, _strategy):
    p = int(p_str)
    rows = []
    for A in ring_catalog(p):
        cat = md.module_catalog(A)
        dd = all(md.double_dual_check(M) for _, M in cat)
        unit = all(md.unit_check(M) for _, M in cat)
        dist = all(md.distributivity_check(M, N1, N2) for _, M in cat for _, N1 in cat for _, N2 in cat[:3])
        subj = f"{A.name}"
        rows.append(_row("modules", subj, _plain("double-dual", "Lem.duality", dd, {"modules": len(cat)})))
        rows.append(_row("modules", subj, _plain("unit-object", "Lem.tensor", unit, {"modules": len(cat)})))
        rows.append(_row("modules", subj, _plain("tensor-products", "Lem.tensor", dist, {"triples": len(cat) * len(cat) * 3})))
    return rows


UNITS = {
    "tangent": (unit_tangent, TANGENT_FIXTURES),
    "orbits": (unit_orbits, TANGENT_FIXTURES),
    "rigidity": (unit_rigidity, RIGID_FIXTURES),
    "fiber": (unit_fiber, ABSIRR_FIXTURES),
    "limit": (unit_limit, LIMIT_FIXTURES),
    "obstruction": (unit_obstruction, OBSTRUCTION_FIXTURES),
    "characters": (unit_characters, CHARACTER_FIXTURES),
    "stated-values": (unit_stated_values, ("all",)),
    "modules": (unit_modules, ("2", "3")),
}


def work_items(sections=None):
    sections = list(UNITS) if sections is None else list(sections)
    return [(s, subj) for s in sections for subj in UNITS[s][1]]


def run_unit(item, strategy="tower"):
    section, subject = item
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HypothesisWarning)
        return UNITS[section][0](subject, strategy)


def _run_unit_star(args):
    return run_unit(*args)


def run_selftest(workers=1, strategy="tower", sections=None) -> dict:
    items = work_items(sections)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_unit_star, [(it, strategy) for it in items]))
    else:
        results = [run_unit(it, strategy) for it in items]
    checks = [row for rows in results for row in rows]
    failed = [c for c in checks if c["enforced"] and not c["passed"]]
    sections_out = {}
    for c in checks:
        s = sections_out.setdefault(c["section"], {"checks": 0, "failed": 0})
        s["checks"] += 1
        s["failed"] += int(c["enforced"] and not c["passed"])
    return {
        "kind": "selftest",
        "strategy": strategy,
        "passed": not failed,
        "sections": sections_out,
        "checks": checks,
    }

