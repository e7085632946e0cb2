"""Batch front end.

Input is a JSON document with a "definitions" block (rings, groups, reps,
morphisms) and a "jobs" array.  The shorthand verbs (``ring``, ``tangent``,
``deform classes`` ...) build a one-job document from flags.

Exit codes: 0 when every enforced check passes, 2 when one fails, 1 on
input errors (bad JSON, schema violations, unknown references, caps).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor

import jsonschema
import numpy as np

from . import characters as ch
from . import deformations as df
from . import modules as md
from .cohomology import h1, h2
from .config import caps, get_caps
from .errors import CapExceeded, ConsistencyError, DefrepError, InvalidInput, NotAHomomorphism
from .fixtures import FIXTURE_NAMES, fiber_configurations, fixture_by_name, ring_catalog, small_extensions
from .groups import direct_product, glqp_descriptor, make_group, pro_p_abelianization
from .reps import centralizer, has_central_character, is_absolutely_irreducible, make_rep, trivial_rep
from .rings import (
    RingMorphism,
    fiber_product,
    identity,
    make_preset_ring,
    reduction,
    residue_map,
    ring_homs,
    truncation,
)
from .selftest import run_selftest

log = logging.getLogger("defrep")

SCHEMA_VERSION = 1

JOB_KINDS = (
    "ring",
    "group",
    "rep",
    "module",
    "tangent",
    "h2",
    "deform.enumerate",
    "deform.classes",
    "deform.fiber-check",
    "deform.tower-check",
    "deform.lift",
    "deform.summary",
    "char.ring",
    "char.count",
    "char.lift",
    "selftest",
)

_ref = {"type": ["string", "object"]}

DOCUMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "definitions": {
            "type": "object",
            "properties": {
                "rings": {"type": "object", "additionalProperties": {"type": "object"}},
                "groups": {"type": "object", "additionalProperties": {"type": "object"}},
                "reps": {"type": "object", "additionalProperties": {"type": "object"}},
                "morphisms": {"type": "object", "additionalProperties": {"type": "object"}},
            },
            "additionalProperties": False,
        },
        "jobs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {
                    "name": {"type": "string"},
                    "kind": {"enum": list(JOB_KINDS)},
                    "ring": _ref,
                    "group": _ref,
                    "rep": _ref,
                    "phi": _ref,
                    "phi1": _ref,
                    "phi2": _ref,
                    "rings": {"type": "array", "items": _ref},
                    "tower": {"type": "array", "items": _ref},
                    "p": {"type": "integer", "minimum": 2},
                    "N": {"type": "integer", "minimum": 1},
                    "n": {"type": "integer", "minimum": 1},
                    "strategy": {"enum": ["tower", "exhaustive"]},
                    "cap": {"type": "integer", "minimum": 1},
                    "configurations": {"enum": ["standard"]},
                    "condition": {"type": ["string", "object"]},
                    "sections": {"type": "array", "items": {"type": "string"}},
                    "chi1": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                    "chi2": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                    "a1": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                    "a2": {"type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2},
                    "glqp": {"type": "boolean"},
                },
                "additionalProperties": False,
            },
        },
    },
    "required": ["jobs"],
    "additionalProperties": False,
}


class InputError(DefrepError):
    def __init__(self, message, path=None):
        super().__init__(message)
        self.path = list(path or [])


def to_jsonable(x):
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    return x


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), sort_keys=True, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------------------
# reference resolution


class Resolver:
    def __init__(self, definitions):
        self.defs = definitions or {}
        self._cache = {}

    def _named(self, section, ref):
        table = self.defs.get(section, {})
        if ref not in table:
            raise InputError(f"unknown {section[:-1]} {ref!r}", ["definitions", section, ref])
        key = (section, ref)
        if key not in self._cache:
            self._cache[key] = getattr(self, section[:-1])(table[ref])
        return self._cache[key]

    def ring(self, ref):
        if isinstance(ref, str):
            return self._named("rings", ref)
        if "preset" in ref:
            return make_preset_ring(ref["preset"], int(ref["p"]), int(ref.get("N", 1)), int(ref.get("e", 2)))
        if "ring" in ref:
            return self.ring(ref["ring"])
        if "fiber" in ref:
            a1, a2, a0 = (self.ring(r) for r in ref["fiber"])
            A3, _, _ = fiber_product(canonical_surjection(a1, a0), canonical_surjection(a2, a0))
            return A3
        if "catalog" in ref:
            cat = ring_catalog(int(ref["catalog"]))
            i = int(ref.get("index", 0))
            if not 0 <= i < len(cat):
                raise InputError(f"catalog index {i} out of range")
            return cat[i]
        raise InputError(f"cannot read ring reference {ref!r}")

    def group(self, ref):
        if isinstance(ref, str):
            return self._named("groups", ref)
        if "product" in ref:
            G, H = (self.group(r) for r in ref["product"])
            return direct_product(G, H)
        if "preset" in ref:
            return make_group(ref["preset"], *[int(a) for a in ref.get("args", [])])
        raise InputError(f"cannot read group reference {ref!r}")

    def rep(self, ref):
        if isinstance(ref, str):
            if ref in self.defs.get("reps", {}):
                return self._named("reps", ref)
            if ref in FIXTURE_NAMES:
                return fixture_by_name(ref).rhobar
            raise InputError(f"unknown rep {ref!r}", ["definitions", "reps", ref])
        if "fixture" in ref:
            if ref["fixture"] not in FIXTURE_NAMES:
                raise InputError(f"unknown fixture {ref['fixture']!r}")
            return fixture_by_name(ref["fixture"]).rhobar
        for k in ("group", "ring"):
            if k not in ref:
                raise InputError(f"rep definition needs {k!r}")
        G, A = self.group(ref["group"]), self.ring(ref["ring"])
        if "trivial" in ref:
            return trivial_rep(G, A, int(ref["trivial"]))
        if "images" not in ref:
            raise InputError("rep definition needs 'images' or 'trivial'")
        images = ref["images"]
        if isinstance(images, dict):
            images = {int(k): v for k, v in images.items()}
        return make_rep(G, A, images)

    def morphism(self, ref):
        if isinstance(ref, str):
            return self._named("morphisms", ref)
        if "residue" in ref:
            return residue_map(self.ring(ref["residue"]))
        if "identity" in ref:
            return identity(self.ring(ref["identity"]))
        if "reduction" in ref:
            return reduction(*[int(x) for x in ref["reduction"]])
        if "truncation" in ref:
            return truncation(*[int(x) for x in ref["truncation"]])
        if "source" in ref and "target" in ref:
            A, B = self.ring(ref["source"]), self.ring(ref["target"])
            if "matrix" in ref:
                return RingMorphism(A, B, np.asarray(ref["matrix"], dtype=np.int64))
            return canonical_surjection(A, B)
        raise InputError(f"cannot read morphism reference {ref!r}")


def canonical_surjection(A, B) -> RingMorphism:
    """The identity, the residue map, or the smallest surjective morphism."""
    if A == B:
        return identity(A)
    if B.size_exp == 1:
        return residue_map(A)
    homs = [f for f in ring_homs(A, B) if f.is_surjective()] if A.presentation is not None else []
    if not homs:
        raise InputError(f"no surjection {A.name} -> {B.name} available")
    return min(homs, key=lambda f: f.matrix.tolist())


# ---------------------------------------------------------------------------
# jobs


def _check_rows(checks):
    return [c.to_json() if hasattr(c, "to_json") else c for c in checks]


def job_ring(job, R):
    A = R.ring(job["ring"])
    A.verify()
    out = A.describe()
    out["m_powers"] = [int(sum(o)) for _, o in A.m_powers]
    return out, []


def job_group(job, R):
    G = R.group(job["group"])
    out = {"name": G.name, "order": G.order, "generators": list(G.generators), "abelian": G.is_abelian()}
    if "p" in job:
        out["pro_p_abelianization"] = pro_p_abelianization(G, int(job["p"])).descriptor.to_json()
    return out, []


def job_rep(job, R):
    rho = R.rep(job["rep"])
    C = centralizer(rho)
    central, vals = has_central_character(rho)
    out = {
        "group": rho.group.name,
        "ring": rho.ring.name,
        "n": rho.n,
        "absolutely_irreducible": is_absolutely_irreducible(rho) if rho.ring.size_exp == 1 else None,
        "central_character": central,
        "centralizer_order": C.order,
        "generator_images": rho.gen_images,
    }
    return out, []


def job_module(job, R):
    A = R.ring(job["ring"])
    cat = md.module_catalog(A)
    rows, checks = [], []
    for name, M in cat:
        rows.append({"module": name, "invariants": list(M.invariants), "order": M.order, "dual_order": md.dual_module(M).order})
        checks.append(df.Check("double-dual", "Lem.duality", md.double_dual_check(M), {"module": name}))
        checks.append(df.Check("unit-object", "Lem.tensor", md.unit_check(M), {"module": name}))
    dist = all(md.distributivity_check(M, N1, N2) for _, M in cat for _, N1 in cat for _, N2 in cat)
    checks.append(df.Check("tensor-products", "Lem.tensor", dist, {"modules": len(cat)}))
    return {"ring": A.name, "modules": rows}, checks


def job_tangent(job, R):
    rho = R.rep(job["rep"])
    T = df.tangent_space(rho, job.get("strategy", "tower"))
    return {"d": T.dim, "classes": len(T.space), "coordinates": [list(c) for c in T.coords]}, T.checks


def job_h2(job, R):
    rho = R.rep(job["rep"])
    H1, H2 = h1(rho), h2(rho)
    return {"h1": H1.dim, "h2": H2.dim, "z2": H2.z2_dim, "b2": H2.b2_dim}, []


def job_enumerate(job, R, workers=1):
    rho, A = R.rep(job["rep"]), R.ring(job["ring"])
    L = df.enumerate_lifts(rho, A, job.get("strategy", "tower"), workers)
    return {"ring": A.name, "lifts": len(L), "complete": L.complete, "strategy": L.strategy, "G_A": df.congruence_order(A, rho.n)}, []


def job_classes(job, R):
    rho, A = R.rep(job["rep"]), R.ring(job["ring"])
    sp = df.deformation_space(rho, A, job.get("strategy", "tower"))
    checks = [df.orbit_check(sp)]
    if is_absolutely_irreducible(rho):
        checks.append(df.schur_check(sp))
    classes = sp.classes
    if "condition" in job:
        name, z = _condition(job["condition"])
        classes = df.filter_by_condition(classes, name, z)
    return {"ring": A.name, "lifts": len(sp.lifts), "G_A": sp.group_order, "classes": [c.to_json() for c in classes]}, checks


def _condition(c):
    if isinstance(c, str):
        return c, None
    return c["name"], c.get("z")


def job_fiber(job, R):
    rho = R.rep(job["rep"])
    strategy = job.get("strategy", "tower")
    cond = _condition(job["condition"]) if "condition" in job else None
    if "phi1" in job:
        configs = [(None, R.morphism(job["phi1"]), R.morphism(job["phi2"]))]
    else:
        configs = fiber_configurations(rho.ring.p)
    reports, checks = [], []
    for label, f1, f2 in configs:
        rep = df.fiber_product_check(rho, f1, f2, strategy, condition=cond, label=label)
        reports.append(rep.to_json())
        for c in rep.checks:
            c.detail = dict(c.detail, configuration=rep.label)
            checks.append(c)
    return {"configurations": reports}, checks


def job_tower(job, R):
    rho = R.rep(job["rep"])
    tower = [R.morphism(m) for m in job["tower"]] if "tower" in job else None
    rep = df.inverse_limit_check(rho, tower=tower, N=int(job.get("N", 3)), strategy=job.get("strategy", "tower"))
    return {"levels": rep.levels, "counts": rep.counts, "systems": rep.systems}, rep.checks


def job_lift(job, R):
    rho = R.rep(job["rep"])
    strategy = job.get("strategy", "tower")
    if "phi" in job:
        exts = [(None, R.morphism(job["phi"]))]
    else:
        exts = small_extensions(rho.ring.p)
    rows, checks = [], []
    for label, phi in exts:
        label = label or f"{phi.source.name} -> {phi.target.name}"
        if rho.ring == phi.target and rho.ring.size_exp > 1:
            targets = [(None, rho)]
        else:
            sp = df.deformation_space(rho, phi.target, strategy)
            targets = [(c.index, c.representative) for c in sp.classes]
        for idx, r in targets:
            rep = df.lift_classes(r, phi, strategy)
            row = {
                "extension": label,
                "class": idx,
                "obstruction": list(rep.obstruction.class_coords),
                "vanishes": rep.obstruction.vanishes,
                "lifts_found": rep.lifts_found,
                "lift_classes": rep.classes,
            }
            rows.append(row)
            checks.append(df.Check("lift-iff-unobstructed", "Prop.obstruction", rep.consistent, {"extension": label, "class": idx}))
    return {"lifts": rows}, checks


def job_summary(job, R):
    rho = R.rep(job["rep"])
    rings = [R.ring(r) for r in job["rings"]] if "rings" in job else ring_catalog(rho.ring.p)
    rep = df.summary(rho, rings, job.get("strategy", "tower"))
    out = rep.to_json()
    checks = out.pop("checks")
    return out, checks


def job_char_ring(job, R):
    p = int(job["p"])
    if job.get("glqp"):
        desc = glqp_descriptor(int(job.get("n", 2)), p)
    else:
        desc = pro_p_abelianization(R.group(job["group"]), p).descriptor
    return ch.universal_character_ring(desc).to_json(), []


def job_char_count(job, R):
    from .selftest import character_set_equal

    rho = R.rep(job["rep"])
    rings = [R.ring(job["ring"])] if "ring" in job else ring_catalog(rho.ring.p)
    rows, checks = [], []
    for A in rings:
        ok, count, lifts = character_set_equal(rho, A, job.get("strategy", "tower"))
        rows.append({"ring": A.name, "hom_count": count, "lifts": lifts})
        checks.append(df.Check("character-deformations", "Prop.character", ok, {"ring": A.name}))
    return {"counts": rows}, checks


def job_char_lift(job, R):
    p, N = int(job["p"]), int(job.get("N", 2))
    c1 = ch.SmoothCharacter(p, *job["chi1"])
    c2 = ch.SmoothCharacter(p, *job["chi2"])
    ch.check_principal_series_hypothesis(c1, c2)
    out, checks = {"p": p, "N": N}, []
    if "a1" in job or "a2" in job:
        x, y = ch.principal_series_point(c1, c2, job.get("a1", [0, 0]), job.get("a2", [0, 0]), N)
        out["point"] = [x.to_json(), y.to_json()]
    slots = []
    for c in (c1, c2):
        par = ch.parametrized_lifts(c, N)
        brute = ch.brute_force_lifts(c, N)
        ok = sorted(x.key() for x in par) == sorted(x.key() for x in brute)
        slots.append({"parametrized": len(par), "brute_force": len(brute)})
        checks.append(df.Check("principal-series-count", "Cor.ps", ok and len(par) == p ** (2 * (N - 1)), {"character": list(c.key())}))
    out["slots"] = slots
    return out, checks


def job_selftest(job, R, workers=1):
    rep = run_selftest(workers=workers, strategy=job.get("strategy", "tower"), sections=job.get("sections"))
    checks = rep.pop("checks")
    return rep, checks


JOBS = {
    "ring": job_ring,
    "group": job_group,
    "rep": job_rep,
    "module": job_module,
    "tangent": job_tangent,
    "h2": job_h2,
    "deform.enumerate": job_enumerate,
    "deform.classes": job_classes,
    "deform.fiber-check": job_fiber,
    "deform.tower-check": job_tower,
    "deform.lift": job_lift,
    "deform.summary": job_summary,
    "char.ring": job_char_ring,
    "char.count": job_char_count,
    "char.lift": job_char_lift,
    "selftest": job_selftest,
}
_WORKER_AWARE = {"deform.enumerate", "selftest"}
_STRATEGY_KINDS = {"tangent", "char.count", "selftest"} | {k for k in JOB_KINDS if k.startswith("deform.")}


def run_job(job, definitions, inner_workers=1, cap=None):
    """Run one job; returns (report, seconds).  Errors become part of the report."""
    R = Resolver(definitions)
    kind = job["kind"]
    t0 = time.perf_counter()
    report = {"name": job.get("name", kind), "kind": kind}
    overrides = {}
    c = job.get("cap", cap)
    if c is not None:
        overrides["ring"] = int(c)
    try:
        with caps(**overrides), warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            fn = JOBS[kind]
            result, checks = fn(job, R, inner_workers) if kind in _WORKER_AWARE else fn(job, R)
        rows = _check_rows(checks)
        report["result"] = result
        report["checks"] = rows
        report["warnings"] = sorted({str(w.message) for w in caught if issubclass(w.category, UserWarning)})
        report["passed"] = all(r["passed"] for r in rows if r.get("enforced", True))
        report["status"] = "ok" if report["passed"] else "check-failed"
    except ConsistencyError as exc:
        report.update(status="check-failed", passed=False, error={"kind": "consistency", "message": str(exc), "payload": to_jsonable(exc.payload)})
    except NotAHomomorphism as exc:
        report.update(status="input-error", passed=False, error={"kind": "not-a-homomorphism", "message": str(exc), "witness": to_jsonable(exc.witness)})
    except InputError as exc:
        report.update(status="input-error", passed=False, error={"kind": "input", "message": str(exc), "path": exc.path})
    except CapExceeded as exc:
        report.update(status="input-error", passed=False, error={"kind": "cap", "message": str(exc)})
    except (InvalidInput, KeyError, TypeError, ValueError) as exc:
        report.update(status="input-error", passed=False, error={"kind": "input", "message": str(exc)})
    return to_jsonable(report), time.perf_counter() - t0


def _run_job_star(args):
    return run_job(*args)


def validate_document(doc):
    v = jsonschema.Draft202012Validator(DOCUMENT_SCHEMA)
    errors = sorted(v.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise InputError(f"schema violation: {e.message}", list(e.absolute_path))


def run_document(doc, job_filter=None, workers=1, cap=None, timing=False):
    """Returns (report document, exit code)."""
    validate_document(doc)
    jobs = doc["jobs"]
    for i, j in enumerate(jobs):
        j.setdefault("name", f"{j['kind']}#{i}")
    names = [j["name"] for j in jobs]
    if len(set(names)) != len(names):
        raise InputError("duplicate job names", ["jobs"])
    if job_filter is not None:
        jobs = [j for j in jobs if j["name"] == job_filter]
        if not jobs:
            raise InputError(f"no job named {job_filter!r}", ["jobs"])
    defs = doc.get("definitions", {})
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_run_job_star, [(j, defs, 1, cap) for j in jobs]))
    else:
        results = []
        for j in jobs:
            log.info("running %s", j["name"])
            results.append(run_job(j, defs, workers, cap))
    reports = [r for r, _ in results]
    out = {"schema": SCHEMA_VERSION, "passed": all(r["passed"] for r in reports), "reports": reports}
    if timing:
        out["timing"] = {r["name"]: round(t, 3) for r, t in results}
    if any(r["status"] == "input-error" for r in reports):
        code = 1
    elif not out["passed"]:
        code = 2
    else:
        code = 0
    return out, code


# ---------------------------------------------------------------------------
# table output


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3f}"
    if isinstance(v, (list, dict)):
        s = json.dumps(v, sort_keys=True)
        return s if len(s) <= 60 else s[:57] + "..."
    return str(v)


def render_table(doc) -> str:
    lines = []
    if "error" in doc:
        e = doc["error"]
        path = "/".join(str(x) for x in e.get("path", []))
        return f"error ({e['kind']}): {e['message']}" + (f" at {path}" if path else "")
    for r in doc["reports"]:
        lines.append(f"== {r['name']} [{r['kind']}] {r['status']}")
        if "error" in r:
            lines.append(f"   error: {r['error']['message']}")
            continue
        res = r.get("result", {})
        for k in sorted(res):
            lines.append(f"   {k:<24} {_fmt(res[k])}")
        if r.get("checks"):
            w = max(len(c["name"]) for c in r["checks"])
            for c in r["checks"]:
                mark = "pass" if c["passed"] else ("FAIL" if c.get("enforced", True) else "fail (not enforced)")
                det = c.get("detail", {})
                subj = c.get("subject") or next((str(det[k]) for k in ("ring", "configuration", "extension", "module", "character") if k in det), "")
                lines.append(f"   {c['statement']:<16} {c['name']:<{w}}  {mark:<6} {subj}")
        for wmsg in r.get("warnings", []):
            lines.append(f"   warning: {wmsg}")
    if "timing" in doc:
        for k, v in doc["timing"].items():
            lines.append(f"-- {k}: {v:.3f}s")
    if any(r["status"] == "input-error" for r in doc["reports"]):
        lines.append("input errors")
    else:
        lines.append("all checks passed" if doc["passed"] else "some checks FAILED")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument parsing


def _ring_arg(s):
    """preset:p[:N or e], e.g. Zpn:3:2, dual:5, trunc:3:3, mixed:3:2."""
    parts = s.split(":")
    try:
        preset, p = parts[0], int(parts[1])
        extra = int(parts[2]) if len(parts) > 2 else None
    except (IndexError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"bad ring {s!r}; expected preset:p[:N]") from exc
    ref = {"preset": preset, "p": p}
    if extra is not None:
        ref["e" if preset == "trunc" else "N"] = extra
    return ref


def _pair(s):
    try:
        a, b = (int(x) for x in s.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected two integers a,b, got {s!r}") from exc
    return [a, b]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON job document")
    common.add_argument("--job", help="run only the job with this name")
    common.add_argument("--cap", type=int, help="ring size cap")
    common.add_argument("--strategy", choices=["tower", "exhaustive"])
    common.add_argument("--format", choices=["table", "json"], default="table")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--timing", action="store_true", help="add a non-canonical timing section")

    ap = argparse.ArgumentParser(prog="defrep", description="Deformations of finite group representations.")
    sub = ap.add_subparsers(dest="verb", required=True)
    sub.add_parser("run", parents=[common], help="run a job document")
    st = sub.add_parser("selftest", parents=[common], help="verify the fixture pack")
    st.add_argument("--sections", nargs="*")

    r = sub.add_parser("ring", parents=[common])
    r.add_argument("ring", type=_ring_arg)
    g = sub.add_parser("group", parents=[common])
    g.add_argument("preset")
    g.add_argument("args", nargs="*", type=int)
    g.add_argument("--p", type=int)
    m = sub.add_parser("module", parents=[common])
    m.add_argument("ring", type=_ring_arg)
    for verb in ("rep", "tangent", "h2"):
        s = sub.add_parser(verb, parents=[common])
        s.add_argument("fixture", choices=FIXTURE_NAMES)

    d = sub.add_parser("deform", help="deformation jobs")
    dsub = d.add_subparsers(dest="action", required=True)
    for action in ("enumerate", "classes"):
        s = dsub.add_parser(action, parents=[common])
        s.add_argument("fixture", choices=FIXTURE_NAMES)
        s.add_argument("ring", type=_ring_arg)
    for action in ("fiber-check", "lift", "summary"):
        s = dsub.add_parser(action, parents=[common])
        s.add_argument("fixture", choices=FIXTURE_NAMES)
    s = dsub.add_parser("tower-check", parents=[common])
    s.add_argument("fixture", choices=FIXTURE_NAMES)
    s.add_argument("--N", type=int, default=3)

    c = sub.add_parser("char", help="character jobs")
    csub = c.add_subparsers(dest="action", required=True)
    s = csub.add_parser("ring", parents=[common])
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--group", nargs="+", help="group preset and arguments, e.g. C 9")
    s.add_argument("--glqp", type=int, metavar="n", help="GL_n(Q_p) instead of a finite group")
    s = csub.add_parser("count", parents=[common])
    s.add_argument("fixture", choices=FIXTURE_NAMES)
    s.add_argument("--ring", type=_ring_arg)
    s = csub.add_parser("lift", parents=[common])
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--N", type=int, default=2)
    s.add_argument("--chi1", type=_pair, required=True, help="chi(p),chi(zeta) mod p")
    s.add_argument("--chi2", type=_pair, required=True)
    s.add_argument("--a1", type=_pair)
    s.add_argument("--a2", type=_pair)
    return ap


def document_from_args(args):
    """The job document a shorthand verb stands for."""
    if args.verb == "run" or args.input:
        if not args.input:
            raise InputError("run needs --input")
        try:
            with open(args.input, encoding="utf-8") as fh:
                return json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {args.input}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc
    v = args.verb
    job = {}
    if v == "selftest":
        job = {"kind": "selftest"}
        if args.sections:
            job["sections"] = args.sections
    elif v in ("ring", "module"):
        job = {"kind": v, "ring": args.ring}
    elif v == "group":
        job = {"kind": "group", "group": {"preset": args.preset, "args": args.args}}
        if args.p:
            job["p"] = args.p
    elif v in ("rep", "tangent", "h2"):
        job = {"kind": v, "rep": args.fixture}
    elif v == "deform":
        job = {"kind": f"deform.{args.action}", "rep": args.fixture}
        if args.action in ("enumerate", "classes"):
            job["ring"] = args.ring
        if args.action == "tower-check":
            job["N"] = args.N
    elif v == "char":
        job = {"kind": f"char.{args.action}"}
        if args.action == "ring":
            job["p"] = args.p
            if args.glqp:
                job.update(glqp=True, n=args.glqp)
            elif args.group:
                job["group"] = {"preset": args.group[0], "args": [int(a) for a in args.group[1:]]}
            else:
                raise InputError("char ring needs --group or --glqp")
        elif args.action == "count":
            job["rep"] = args.fixture
            if args.ring:
                job["ring"] = args.ring
        else:
            job.update(p=args.p, N=args.N, chi1=args.chi1, chi2=args.chi2)
            if args.a1:
                job["a1"] = args.a1
            if args.a2:
                job["a2"] = args.a2
    job["name"] = job["kind"]
    return {"jobs": [job]}


def _emit(doc, fmt):
    text = dumps(doc) if fmt == "json" else render_table(doc)
    sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr, format="%(name)s: %(message)s")
    if args.cap is not None and args.cap < 1:
        _emit({"schema": SCHEMA_VERSION, "error": {"kind": "input", "message": "--cap must be positive", "path": []}}, args.format)
        return 1
    try:
        doc = document_from_args(args)
        if args.strategy and isinstance(doc, dict):
            for j in doc.get("jobs", []):
                if isinstance(j, dict) and j.get("kind") in _STRATEGY_KINDS:
                    j.setdefault("strategy", args.strategy)
        out, code = run_document(doc, args.job, max(1, args.workers), args.cap, args.timing)
    except InputError as exc:
        _emit({"schema": SCHEMA_VERSION, "error": {"kind": "input", "message": str(exc), "path": exc.path}}, args.format)
        return 1
    log.info("caps: %s", get_caps())
    _emit(out, args.format)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
