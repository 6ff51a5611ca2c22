"""File formats: OBJ meshes and JSON curves, framed curves, diagrams.

All writers are deterministic (sorted keys, fixed float formatting via
repr) so identical inputs produce identical bytes.
"""
from __future__ import annotations

import json
import os

import numpy as np

from .diagram import PlanarDiagram
from .framing import FramedCurve
from .geom import CurveOnSurface, TriMesh, build_curve, build_mesh


def read_obj(path) -> TriMesh:
    """Read a triangle mesh from an OBJ file (v/f lines, 1-based)."""
    vertices, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(p.split("/")[0]) for p in parts[1:]]
                if len(idx) != 3:
                    raise ValueError(f"non-triangle face in {path}: {line.strip()}")
                faces.append([i - 1 if i > 0 else len(vertices) + i for i in idx])
    return build_mesh(np.array(vertices, dtype=np.float64),
                      np.array(faces, dtype=np.int64))


def write_obj(path, mesh: TriMesh):
    with open(path, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def curve_to_json(obj, mesh_path=None) -> dict:
    """Serialize a curve; anchors and a mesh path are included when the
    input is a curve-on-surface."""
    curve = obj.curve if isinstance(obj, CurveOnSurface) else obj
    doc = {
        "samples": [[float(x) for x in p] for p in curve.samples],
        "cusps": sorted(int(i) for i in curve.cusp_marks),
    }
    if isinstance(obj, CurveOnSurface):
        doc["anchors"] = [int(a) for a in obj.anchors]
        if mesh_path is not None:
            doc["mesh"] = str(mesh_path)
    if hasattr(obj, "component_id"):
        doc["component_id"] = int(obj.component_id)
    return doc


def curve_from_json(doc, mesh=None, base_dir=None):
    """Rebuild a curve (or curve-on-surface when anchors are present)
    from its JSON document.  A `mesh` object overrides the document's
    mesh path; otherwise the path is resolved against base_dir."""
    samples = np.array(doc["samples"], dtype=np.float64)
    curve = build_curve(samples, cusp_marks=doc.get("cusps", ()))
    if "anchors" not in doc:
        return curve
    if mesh is None:
        path = doc.get("mesh")
        if path is None:
            raise ValueError("curve has anchors but no mesh was given")
        if base_dir is not None and not os.path.isabs(path):
            path = os.path.join(base_dir, path)
        mesh = read_obj(path)
    anchors = np.array(doc["anchors"], dtype=np.int64)
    return CurveOnSurface(curve, anchors, mesh)


def framed_to_json(fc: FramedCurve) -> dict:
    return {
        "samples": [[float(x) for x in p] for p in fc.curve.samples],
        "normals": [[float(x) for x in v] for v in fc.normals],
        "kind": fc.kind,
        "cusps": sorted(int(i) for i in fc.curve.cusp_marks),
    }


def framed_from_json(doc) -> FramedCurve:
    curve = build_curve(np.array(doc["samples"], dtype=np.float64),
                        cusp_marks=doc.get("cusps", ()))
    return FramedCurve(curve, np.array(doc["normals"], dtype=np.float64), doc["kind"])


def diagram_to_json(d: PlanarDiagram) -> dict:
    return {
        "strands": [[[float(x) for x in p] for p in s] for s in d.strands],
        "crossings": [
            {
                "over": [int(c.over[0]), int(c.over[1])],
                "under": [int(c.under[0]), int(c.under[1])],
                "point": [float(c.point[0]), float(c.point[1])],
                "sign": int(c.sign),
            }
            for c in d.crossings
        ],
        "cusps": [
            {"strand": int(c.strand), "vertex": int(c.vertex), "chirality": c.chirality}
            for c in d.cusps
        ],
    }


def diagram_from_json(doc) -> PlanarDiagram:
    from .diagram import Crossing, CuspPoint

    strands = [np.array(s, dtype=np.float64) for s in doc["strands"]]
    crossings = tuple(
        Crossing(
            over=(int(c["over"][0]), int(c["over"][1])),
            under=(int(c["under"][0]), int(c["under"][1])),
            point=(float(c["point"][0]), float(c["point"][1])),
            sign=int(c["sign"]),
        )
        for c in doc["crossings"]
    )
    cusps = tuple(
        CuspPoint(strand=int(c["strand"]), vertex=int(c["vertex"]), chirality=c["chirality"])
        for c in doc["cusps"]
    )
    return PlanarDiagram(strands=strands, crossings=crossings, cusps=cusps)
