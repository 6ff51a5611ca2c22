"""Acceptance gate: one timed end-to-end check per shipped guarantee.

Each test prints a single PASS/FAIL line (shown via the -rA report) and
builds its own inputs so the quoted runtimes are honest.
"""
import json
import time

import numpy as np
import pytest

from profilekit import io as pio
from profilekit.cli import run
from profilekit.diagram import linking_number, linking_number_gauss, project, writhe
from profilekit.framing import surface_linking, writhe_definitional
from profilekit.generators import (
    preset,
    standard_surface,
    torus_with_curve,
    tube_around_knot,
    twin_projection_cores,
)
from profilekit.geom import perturb, perturb_jointly, rotated
from profilekit.obstruction import check_contour, check_realizable, ri_correct
from profilekit.profile import extract_profile


def _report(num, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}: criterion {num} - {detail}")
    assert ok, f"criterion {num}: {detail}"


def test_criterion_1_unlink_count(tmp_path, capsys):
    counts, worst = [], 0.0
    ok = True
    for g in range(4):
        t0 = time.perf_counter()
        mesh_path = str(tmp_path / f"g{g}.obj")
        pio.write_obj(mesh_path, standard_surface(g))
        rc = run(["profile", "summary", mesh_path])
        doc = json.loads(capsys.readouterr().out)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        counts.append(doc["components"])
        zero = all(v == 0 for row in doc["linking_matrix"] for v in row)
        ok = ok and rc == 0 and doc["components"] == g + 1 and zero and dt < 10.0
    _report(1, ok, f"profile summary on genus 0..3 -> components {counts}, "
                   f"all-zero linking matrices; worst genus {worst:.1f} s (< 10 s)")


def test_criterion_2_torus_surface_linking():
    pairs = [(1, 0), (0, 1), (1, 1), (2, 3), (3, 2), (2, 5)]
    got, worst = [], 0.0
    ok = True
    for p, q in pairs:
        t0 = time.perf_counter()
        lam = surface_linking(torus_with_curve(p, q))
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        got.append(lam)
        ok = ok and lam == p * q and dt < 5.0
    _report(2, ok, f"surface_linking{pairs} = {got} (= p*q each); "
                   f"worst pair {worst:.1f} s (< 5 s)")


def test_criterion_3_obstruction_and_fix():
    t0 = time.perf_counter()
    cos = torus_with_curve(1, 1)
    before = check_realizable(cos)
    fixed = ri_correct(cos)
    after = check_realizable(fixed)
    dt = time.perf_counter() - t0
    ok = ((before.writhe, before.surface_linking, before.realizable) == (0, 1, False)
          and (after.writhe, after.surface_linking, after.realizable) == (1, 1, True)
          and dt < 5.0)
    _report(3, ok, f"(1,1) curve: w={before.writhe} lam={before.surface_linking} "
                   f"realizable={before.realizable}; after fix ri: w={after.writhe} "
                   f"lam={after.surface_linking} realizable={after.realizable}; "
                   f"{dt:.1f} s (< 5 s)")


def test_criterion_4_profile_soundness():
    t0 = time.perf_counter()
    meshes = [standard_surface(g) for g in range(4)]
    meshes.append(rotated(standard_surface(1), (1.0, 0.0, 0.0), np.pi / 3))
    meshes.append(tube_around_knot(preset("trefoil_standard")))
    checked = sum(
        check_realizable(comp).realizable
        for mesh in meshes
        for comp in extract_profile(mesh)
    )
    dt = time.perf_counter() - t0
    ok = checked == 14 and dt < 60.0
    _report(4, ok, f"w = surface linking on {checked}/14 profile components "
                   f"across 6 generator meshes; {dt:.1f} s (< 60 s)")


def test_criterion_5_cusp_laws():
    t0 = time.perf_counter()
    tilted = rotated(standard_surface(1), (1.0, 0.0, 0.0), np.pi / 3)
    comps = extract_profile(tilted)
    laws = all(len(c.cusps) % 2 == 0 and len({ch for _, ch in c.cusps}) <= 1
               for c in comps)
    verdict = check_contour(preset("mixed_chirality_contour"))
    dt = time.perf_counter() - t0
    counts = [len(c.cusps) for c in comps]
    ok = laws and not verdict.passed and dt < 10.0
    _report(5, ok, f"tilted torus cusp counts {counts} (even, uniform chirality); "
                   f"mixed-chirality contour -> FAIL; {dt:.1f} s (< 10 s)")


def test_criterion_6_route_equivalence():
    curves = [preset("figeight_w1"), preset("trefoil_standard")]
    for p, q in [(1, 0), (1, 1), (2, 3), (3, 2), (2, 5), (1, 2)]:
        curves.append(torus_with_curve(p, q).curve)
    curves.extend(twin_projection_cores())
    pairs = []
    for g in range(4):
        comps = [c.curve for c in extract_profile(standard_surface(g))]
        curves.extend(comps)
        pairs.extend((comps[i], comps[j])
                     for i in range(len(comps)) for j in range(i + 1, len(comps)))
    tube = [c.curve for c in extract_profile(tube_around_knot(preset("trefoil_standard")))]
    curves.extend(tube)
    pairs.append((tube[0], tube[1]))

    w_bad = sum(
        writhe(pc, seed=s) != writhe_definitional(pc, seed=s)
        for c in curves for s in range(1, 11)
        for pc in [perturb(c, s, 1e-4)]
    )
    lk_bad = sum(
        linking_number(pa, pb, seed=s) != linking_number_gauss(pa, pb)
        for a, b in pairs for s in range(1, 11)
        for pa, pb in [perturb_jointly((a, b), s, 1e-4)]
    )
    ok = len(curves) == 22 and len(pairs) == 11 and w_bad == 0 and lk_bad == 0
    _report(6, ok, f"crossing-count vs push-off writhe agree on {len(curves)} curves "
                   f"x 10 seeds ({w_bad} mismatches); crossing vs integral linking "
                   f"agree on {len(pairs)} pairs x 10 seeds ({lk_bad} mismatches)")


def test_criterion_7_tube_push_off():
    t0 = time.perf_counter()
    core = preset("trefoil_standard")
    comps = extract_profile(tube_around_knot(core))
    w_core = writhe(core)
    lk = linking_number(comps[0].curve, comps[1].curve) if len(comps) == 2 else None
    dt = time.perf_counter() - t0
    ok = (len(comps) == 2 and lk is not None and abs(lk) == 3
          and lk in (w_core, -w_core) and dt < 10.0)
    _report(7, ok, f"trefoil tube: {len(comps)} profile components, pairwise "
                   f"linking {lk} vs core writhe {w_core} (|lk| = 3); "
                   f"{dt:.1f} s (< 10 s)")


def test_criterion_8_exclusion_rules(capsys):
    rc1 = run(["check", "exclude", "preset:figeight_w1", "--declare-knot", "unknot"])
    fig = {e["class"] for e in json.loads(capsys.readouterr().out)["exclusions"]}
    rc2 = run(["check", "exclude", "preset:trefoil_standard",
               "--declare-knot", "trefoil"])
    doc = json.loads(capsys.readouterr().out)
    tref = {e["class"] for e in doc["exclusions"]}
    ok = (rc1 == 0 and rc2 == 0
          and fig == {"sphere", "knotted torus"}
          and (doc["crossings"], doc["cusps"]) == (3, 0)
          and "unknotted torus" in tref)
    _report(8, ok, f"writhe-1 unknot curve excludes {sorted(fig)}; declared trefoil "
                   f"(3 crossings, 0 cusps) excludes {sorted(tref)}")
