"""The eleven acceptance criteria, one test each.

Each test prints a single ``criterion N title: PASS/FAIL`` line and the
summary is repeated at the end of the session by conftest.py.
"""

import subprocess
import sys
import time

from defrep import characters as ch
from defrep import deformations as df
from defrep import selftest as stt
from defrep.cohomology import h1, h2
from defrep.fixtures import fiber_configurations, fixture_by_name, ring_catalog, trivial_character
from defrep.groups import glqp_descriptor


def _section(name, subjects=None):
    """Rows of one selftest section, optionally restricted to some subjects."""
    items = [it for it in stt.work_items([name]) if subjects is None or it[1] in subjects]
    rows = []
    for it in items:
        rows.extend(stt.run_unit(it))
    return rows


def _failures(rows):
    return [r for r in rows if r["enforced"] and not r["passed"]]


def test_criterion_01_tangent_space(record_criterion):
    fixtures = [trivial_character(p, p) for p in (2, 3, 5)] + [
        fixture_by_name(n) for n in ("S3-standard", "Q8-2dim", "SL2F3-natural", "C2-jordan")
    ]
    bad, slowest = [], 0.0
    for fx in fixtures:
        t0 = time.perf_counter()
        ts = df.tangent_space(fx.rhobar)
        elapsed = time.perf_counter() - t0
        slowest = max(slowest, elapsed)
        exact = len(ts.space) == fx.p ** h1(fx.rhobar).dim
        if not (ts.passed and exact and elapsed < 60):
            bad.append(fx.name)
    ok = not bad
    record_criterion(1, "tangent space", ok, f"{len(fixtures)} fixtures, slowest {slowest:.1f}s" + (f", failing {bad}" if bad else ""))
    assert ok


def test_criterion_02_orbits(record_criterion):
    rows = [r for r in _section("orbits") if r["section"] == "orbits"]
    fails = _failures(rows)
    expected = sum(
        1
        for n in stt.TANGENT_FIXTURES
        for A in ring_catalog(fixture_by_name(n).p)
        if df.congruence_order(A, fixture_by_name(n).rhobar.n) <= stt.G_A_LIMIT
    )
    ok = not fails and len(rows) == expected
    record_criterion(2, "orbit description", ok, f"{len(rows)} (fixture, ring) pairs, {len(fails)} failures")
    assert ok


def test_criterion_03_schur(record_criterion):
    rows = [r for r in _section("orbits", stt.ABSIRR_FIXTURES) if r["section"] == "schur"]
    exceptions = sum(r["detail"]["exceptions"] for r in rows)
    lifts = sum(r["detail"]["lifts"] for r in rows)
    ok = bool(rows) and exceptions == 0 and all(r["enforced"] for r in rows)
    record_criterion(3, "Schur centralizers", ok, f"{lifts} lifts, {exceptions} exceptions")
    assert ok


def test_criterion_04_fiber_products(record_criterion):
    rows = _section("fiber")
    fails = _failures(rows)
    per_fixture = {}
    for r in rows:
        per_fixture.setdefault(r["subject"], set()).add(r["detail"]["configuration"])
    enough = all(len(v) >= 6 for v in per_fixture.values()) and set(per_fixture) == set(stt.ABSIRR_FIXTURES)
    has_identity = all(any("identity" in c for c in v) for v in per_fixture.values())
    glue = [r for r in rows if r["name"] == "glue-projects"]
    ok = not fails and enough and has_identity and len(glue) == sum(len(v) for v in per_fixture.values())
    n_conf = len(fiber_configurations(3))
    record_criterion(4, "fiber products", ok, f"{len(per_fixture)} fixtures x {n_conf} configurations, {len(fails)} failures")
    assert ok


def test_criterion_05_continuity(record_criterion):
    rows = _section("limit")
    subjects = {r["subject"] for r in rows}
    ok = not _failures(rows) and {"S3-standard", "C3-trivial"} <= subjects
    tops = {r["subject"]: r["detail"]["counts"] for r in rows if r["name"] == "limit-bijection"}
    record_criterion(5, "inverse limits", ok, f"class counts {tops}")
    assert ok


def test_criterion_06_rigidity(record_criterion):
    rows = _section("rigidity")
    single = [r for r in rows if r["name"] == "single-class"]
    ok = not _failures(rows) and len(single) == 2 * len(ring_catalog(3))
    for name in stt.RIGID_FIXTURES:
        rho = fixture_by_name(name).rhobar
        ok = ok and h1(rho).dim == 0 and h2(rho).dim == 0
    record_criterion(6, "rigidity", ok, f"{len(single)} rings, one class each")
    assert ok


def test_criterion_07_characters(record_criterion):
    rows = _section("characters")
    ok = not _failures(rows) and len(rows) == len(stt.CHARACTER_FIXTURES) * len(ring_catalog(2))
    ok = ok and all(r["detail"]["hom_count"] == r["detail"]["lifts"] for r in rows)
    record_criterion(7, "character deformations", ok, f"{len(rows)} (character, ring) pairs")
    assert ok


def test_criterion_08_stated_values(record_criterion):
    rows = _section("stated-values")
    glqp = all(glqp_descriptor(n, p).free_rank == 2 for n in (1, 2, 3) for p in (3, 5, 7))
    counts = {}
    for p in (3, 5):
        for N in (1, 2, 3):
            counts[(p, N)] = len(ch.parametrized_lifts(ch.SmoothCharacter(p, 1, 1), N))
    exact = all(c == p ** (2 * (N - 1)) for (p, N), c in counts.items())
    ok = not _failures(rows) and glqp and exact
    record_criterion(8, "stated values", ok, f"r = 2; lifts per slot {sorted(counts.values())}")
    assert ok


def test_criterion_09_obstructions(record_criterion):
    rows = _section("obstruction")
    vanish = sum(r["detail"]["vanishes"] for r in rows)
    ok = not _failures(rows) and len(rows) > 0
    record_criterion(9, "obstruction consistency", ok, f"{len(rows)} classes, {vanish} unobstructed, {len(rows) - vanish} obstructed")
    assert ok


def test_criterion_10_modules(record_criterion):
    rows = _section("modules")
    ok = not _failures(rows) and {r["name"] for r in rows} == {"double-dual", "unit-object", "tensor-products"}
    record_criterion(10, "module identities", ok, f"{len(rows)} checks over {len(rows) // 3} rings")
    assert ok


def _selftest_cmd(*extra):
    return [sys.executable, "-m", "defrep", "selftest", "--format", "json", *extra]


def test_criterion_11_determinism(record_criterion):
    outputs, codes = [], []
    for extra in ((), (), (), ("--workers", "8")):
        proc = subprocess.run(_selftest_cmd(*extra), capture_output=True, timeout=600)
        outputs.append(proc.stdout)
        codes.append(proc.returncode)
    serial_same = outputs[0] == outputs[1] == outputs[2]
    workers_same = outputs[0] == outputs[3]
    ok = serial_same and workers_same and codes == [0, 0, 0, 0] and len(outputs[0]) > 1000
    record_criterion(
        11,
        "determinism",
        ok,
        f"{len(outputs[0])} bytes, 3 serial runs identical: {serial_same}, workers 1 vs 8 identical: {workers_same}",
    )
    assert ok
