"""Command-line interface.

JSON reports go to stdout, human-readable summaries to stderr.  Exit
codes: 0 for success and PASS verdicts, 1 for FAIL verdicts
(realizable=false, contour FAIL), 2 for usage or runtime errors.

Curve and diagram positions accept ``preset:<name>`` in place of a
file path.  The PROFILEKIT_SEED environment variable sets the default
seed; the --seed flag overrides it.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import io as pio
from .diagram import PlanarDiagram, linking_number, project, writhe
from .errors import ProfileKitError
from .framing import surface_linking
from .generators import (GeneratorParams, PRESET_NAMES, preset, standard_surface,
                         torus_with_curve, tube_around_knot)
from .geom import CurveOnSurface, PLCurve3
from .obstruction import DiagramFacts, check_contour, check_realizable, exclude_surfaces, ri_correct
from .profile import extract_profile, profile_link_summary
from .render import render_figure, render_svg


def _say(msg):
    print(msg, file=sys.stderr)


def _emit(doc, out_path=None):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _seed(args):
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("PROFILEKIT_SEED", "0"))


def _params(args):
    kw = {}
    for name in ("samples_core", "samples_tube", "tube_radius", "major_radius", "minor_radius"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    return GeneratorParams(**kw)


def _load_any(arg):
    """Resolve a path or preset: reference to a curve, curve-on-surface
    or diagram object."""
    if arg.startswith("preset:"):
        return preset(arg[len("preset:"):])
    doc = pio.read_json(arg)
    if "strands" in doc:
        return pio.diagram_from_json(doc)
    return pio.curve_from_json(doc, base_dir=os.path.dirname(os.path.abspath(arg)))


def _load_curve(arg):
    obj = _load_any(arg)
    if isinstance(obj, PlanarDiagram):
        raise ProfileKitError(f"{arg} is a diagram; a curve is required here")
    return obj


def _load_cos(arg):
    obj = _load_curve(arg)
    if not isinstance(obj, CurveOnSurface):
        raise ProfileKitError(f"{arg} has no surface anchors; a curve-on-surface is required")
    return obj


def _bare(obj):
    return obj.curve if isinstance(obj, CurveOnSurface) else obj


def _as_diagram(obj):
    if isinstance(obj, PlanarDiagram):
        return obj
    return project(_bare(obj))


# --------------------------------------------------------------------------- generate

def cmd_generate_preset(args):
    obj = preset(args.name)
    if isinstance(obj, PlanarDiagram):
        doc = pio.diagram_to_json(obj)
        _say(f"preset {args.name}: diagram, {len(obj.crossings)} crossings, {len(obj.cusps)} cusps")
    else:
        doc = pio.curve_to_json(obj)
        _say(f"preset {args.name}: curve, {len(obj.samples)} samples")
    _emit(doc, args.output)
    return 0


def cmd_generate_surface(args):
    mesh = standard_surface(args.genus, _params(args))
    pio.write_obj(args.output, mesh)
    _say(f"genus {args.genus} surface: {len(mesh.vertices)} vertices, "
         f"{len(mesh.faces)} faces -> {args.output}")
    return 0


def cmd_generate_torus_curve(args):
    cos = torus_with_curve(args.p, args.q, _params(args))
    mesh_out = args.mesh_out or os.path.splitext(args.output)[0] + "_mesh.obj"
    pio.write_obj(mesh_out, cos.mesh)
    mesh_ref = os.path.relpath(mesh_out, os.path.dirname(os.path.abspath(args.output)))
    _emit(pio.curve_to_json(cos, mesh_path=mesh_ref), args.output)
    _say(f"({args.p},{args.q}) torus curve: {len(cos.curve.samples)} samples "
         f"-> {args.output}, mesh -> {mesh_out}")
    return 0


def cmd_generate_tube(args):
    core = _bare(_load_curve(args.core))
    mesh = tube_around_knot(core, radius=args.radius, params=_params(args))
    pio.write_obj(args.output, mesh)
    _say(f"tube around {args.core}: {len(mesh.faces)} faces -> {args.output}")
    return 0


# --------------------------------------------------------------------------- profile

def cmd_profile_extract(args):
    mesh = pio.read_obj(args.mesh)
    profiles = extract_profile(mesh, seed=_seed(args))
    mesh_ref = None
    if args.mesh_out:
        pio.write_obj(args.mesh_out, profiles[0].mesh)
        mesh_ref = args.mesh_out
    doc = {"components": [pio.curve_to_json(p, mesh_path=mesh_ref) for p in profiles]}
    _emit(doc, args.output)
    _say(f"{len(profiles)} profile component(s)")
    if args.figure:
        render_figure(project([p.curve for p in profiles]), args.figure)
        _say(f"figure -> {args.figure}")
    return 0


def cmd_profile_summary(args):
    mesh = pio.read_obj(args.mesh)
    seed = _seed(args)
    profiles = extract_profile(mesh, seed=seed)
    summary = profile_link_summary(profiles, seed=seed)
    _emit(summary.to_json(), args.output)
    _say(f"components={summary.components} writhes={summary.writhes}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["component", "writhe", "cusps"]
                        + [f"lk_{j}" for j in range(summary.components)])
            for i in range(summary.components):
                wr.writerow([i, summary.writhes[i], len(summary.cusps[i])]
                            + list(summary.linking_matrix[i]))
        _say(f"csv -> {args.csv}")
    if args.figure:
        render_figure(project([p.curve for p in profiles]), args.figure)
        _say(f"figure -> {args.figure}")
    return 0


# --------------------------------------------------------------------------- invariants

def cmd_inv_writhe(args):
    curve = _bare(_load_curve(args.curve))
    w = writhe(curve, seed=_seed(args))
    _emit({"writhe": w})
    _say(f"writhe {w}")
    return 0


def cmd_inv_link(args):
    a = _bare(_load_curve(args.curve_a))
    b = _bare(_load_curve(args.curve_b))
    lk = linking_number(a, b, seed=_seed(args))
    _emit({"linking_number": lk})
    _say(f"linking number {lk}")
    return 0


def cmd_inv_surface_linking(args):
    cos = _load_cos(args.curve)
    lam = surface_linking(cos, seed=_seed(args))
    _emit({"surface_linking": lam})
    _say(f"surface linking number {lam}")
    return 0


# --------------------------------------------------------------------------- check / fix

def cmd_check_realizable(args):
    rep = check_realizable(_load_cos(args.curve), seed=_seed(args))
    _emit(rep.to_json())
    verdict = "realizable" if rep.realizable else "NOT realizable"
    _say(f"w={rep.writhe} lambda={rep.surface_linking} deficit={rep.deficit}: {verdict}")
    return 0 if rep.realizable else 1


def cmd_check_contour(args):
    d = _as_diagram(_load_any(args.diagram))
    verdict = check_contour(d, orientable_neighborhood=not args.mobius)
    _emit(verdict.to_json())
    _say("PASS" if verdict.passed else "FAIL: " + "; ".join(verdict.failures))
    return 0 if verdict.passed else 1


def cmd_check_exclude(args):
    obj = _load_any(args.curve)
    seed = _seed(args)
    if isinstance(obj, PlanarDiagram):
        d = obj
        w = d.self_crossing_sum()
    else:
        curve = _bare(obj)
        d = project(curve)
        w = writhe(curve, seed=seed)
    facts = DiagramFacts(crossings=len(d.crossings), cusps=len(d.cusps),
                         knot_type=args.declare_knot, sign_unknown=args.sign_unknown)
    exclusions = exclude_surfaces(w, facts)
    _emit({
        "writhe": abs(w) if args.sign_unknown else w,
        "sign_unknown": args.sign_unknown,
        "crossings": facts.crossings,
        "cusps": facts.cusps,
        "exclusions": [e.to_json() for e in exclusions],
    })
    if exclusions:
        _say("excluded: " + ", ".join(e.surface_class for e in exclusions))
    else:
        _say("no exclusions")
    return 0


def cmd_fix_ri(args):
    doc = pio.read_json(args.curve) if not args.curve.startswith("preset:") else None
    cos = _load_cos(args.curve)
    fixed = ri_correct(cos, seed=_seed(args))
    mesh_ref = doc.get("mesh") if doc else None
    _emit(pio.curve_to_json(fixed, mesh_path=mesh_ref), args.output)
    added = len(fixed.curve.samples) - len(cos.curve.samples)
    _say(f"inserted kink samples: {added}")
    return 0


# --------------------------------------------------------------------------- render

def cmd_render(args):
    objs = [_load_any(a) for a in args.inputs]
    seed = _seed(args)
    if any(isinstance(o, PlanarDiagram) for o in objs):
        if len(objs) != 1:
            raise ProfileKitError("a diagram input must be the only input")
        d = objs[0]
    else:
        d = project([_bare(o) for o in objs])
    render_svg(d, args.output)
    _say(f"svg -> {args.output}")
    if args.figure:
        render_figure(d, args.figure)
        _say(f"figure -> {args.figure}")
    return 0


# --------------------------------------------------------------------------- parser

def _add_seed(p):
    p.add_argument("--seed", type=int, default=None,
                   help="perturbation seed (default: $PROFILEKIT_SEED or 0)")


def _add_params(p, tube=False):
    p.add_argument("--samples-core", type=int, dest="samples_core")
    p.add_argument("--samples-tube", type=int, dest="samples_tube")
    p.add_argument("--major-radius", type=float, dest="major_radius")
    p.add_argument("--minor-radius", type=float, dest="minor_radius")
    if tube:
        p.add_argument("--tube-radius", type=float, dest="tube_radius")


def _build_parser():
    p = argparse.ArgumentParser(prog="profilekit",
                                description="Profile curves of surfaces: extraction, "
                                            "invariants, realizability and rendering.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build example meshes, curves and presets")
    gsub = g.add_subparsers(dest="what", required=True)

    gp = gsub.add_parser("preset", help="hard-coded example curve or diagram")
    gp.add_argument("name", choices=PRESET_NAMES)
    gp.add_argument("-o", "--output")
    gp.set_defaults(func=cmd_generate_preset)

    gs = gsub.add_parser("surface", help="standardly embedded genus-g surface")
    gs.add_argument("--genus", type=int, required=True)
    _add_params(gs, tube=True)
    gs.add_argument("-o", "--output", required=True)
    gs.set_defaults(func=cmd_generate_surface)

    gt = gsub.add_parser("torus-curve", help="(p,q) curve on a standard torus")
    gt.add_argument("-p", type=int, required=True)
    gt.add_argument("-q", type=int, required=True)
    _add_params(gt)
    gt.add_argument("-o", "--output", required=True)
    gt.add_argument("--mesh-out")
    gt.set_defaults(func=cmd_generate_torus_curve)

    gu = gsub.add_parser("tube", help="tube mesh around a knot core")
    gu.add_argument("--core", default="preset:trefoil_standard")
    gu.add_argument("--radius", type=float, default=None)
    _add_params(gu, tube=True)
    gu.add_argument("-o", "--output", required=True)
    gu.set_defaults(func=cmd_generate_tube)

    pr = sub.add_parser("profile", help="extract profile curves from a mesh")
    psub = pr.add_subparsers(dest="what", required=True)

    pe = psub.add_parser("extract")
    pe.add_argument("mesh")
    pe.add_argument("-o", "--output")
    pe.add_argument("--mesh-out", help="write the (possibly perturbed) mesh actually used")
    pe.add_argument("--figure", help="render the profile diagram to this image file")
    _add_seed(pe)
    pe.set_defaults(func=cmd_profile_extract)

    ps = psub.add_parser("summary")
    ps.add_argument("mesh")
    ps.add_argument("-o", "--output")
    ps.add_argument("--csv", help="write per-component writhe/linking table")
    ps.add_argument("--figure", help="render the profile diagram to this image file")
    _add_seed(ps)
    ps.set_defaults(func=cmd_profile_summary)

    inv = sub.add_parser("invariants", help="writhe and linking numbers")
    isub = inv.add_subparsers(dest="what", required=True)

    iw = isub.add_parser("writhe")
    iw.add_argument("curve")
    _add_seed(iw)
    iw.set_defaults(func=cmd_inv_writhe)

    il = isub.add_parser("link")
    il.add_argument("curve_a")
    il.add_argument("curve_b")
    _add_seed(il)
    il.set_defaults(func=cmd_inv_link)

    isl = isub.add_parser("surface-linking")
    isl.add_argument("curve")
    _add_seed(isl)
    isl.set_defaults(func=cmd_inv_surface_linking)

    ch = sub.add_parser("check", help="realizability, contour and exclusion rules")
    csub = ch.add_subparsers(dest="what", required=True)

    cr = csub.add_parser("realizable")
    cr.add_argument("curve")
    _add_seed(cr)
    cr.set_defaults(func=cmd_check_realizable)

    cc = csub.add_parser("contour")
    cc.add_argument("diagram")
    cc.add_argument("--mobius", action="store_true",
                    help="test the one-sided (odd cusp count) law instead")
    _add_seed(cc)
    cc.set_defaults(func=cmd_check_contour)

    ce = csub.add_parser("exclude")
    ce.add_argument("curve")
    ce.add_argument("--declare-knot", choices=("unknot", "trefoil"), default=None)
    ce.add_argument("--sign-unknown", action="store_true",
                    help="writhe known only up to sign (unlabeled crossings)")
    _add_seed(ce)
    ce.set_defaults(func=cmd_check_exclude)

    fx = sub.add_parser("fix", help="writhe correction by kink insertion")
    fsub = fx.add_subparsers(dest="what", required=True)
    fr = fsub.add_parser("ri")
    fr.add_argument("curve")
    fr.add_argument("-o", "--output")
    _add_seed(fr)
    fr.set_defaults(func=cmd_fix_ri)

    rd = sub.add_parser("render", help="draw a diagram or projected curves as SVG")
    rd.add_argument("inputs", nargs="+")
    rd.add_argument("-o", "--output", required=True)
    rd.add_argument("--figure", help="also write a matplotlib figure")
    _add_seed(rd)
    rd.set_defaults(func=cmd_render)

    return p


def run(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProfileKitError as e:
        _say(f"error: {e}")
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as e:
        _say(f"error: {e}")
        return 2


def main():
    sys.exit(run())
