"""Interchange formats: net files, initial-data files, reports, quad meshes.

Net and initial-data files are JSON documents carrying every representation
level: chart coordinates (or an infinity flag) for readability, plus the raw
homogeneous coefficient vectors that reconstruct points, frames and edge
vectors bit-exactly (JSON floats round-trip through repr).  Serialization is
deterministic: fixed key order, fixed record order.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import Versor, conformal_algebra
from .moebius import POINT_AT_INFINITY, ConformalPoint, GeometryError, project
from .lattice import EdgeVectorField, FrameField, Lattice, PairNet
from .cauchy import InitialData

__all__ = [
    "NET_SCHEMA",
    "INIT_SCHEMA",
    "FileFormatError",
    "save_net",
    "load_net",
    "save_initial_data",
    "load_initial_data",
    "save_report",
    "export_quad_meshes",
]

NET_SCHEMA = "moebiusnets/net-v1"
INIT_SCHEMA = "moebiusnets/init-v1"


class FileFormatError(ValueError):
    """Malformed or wrong-schema input file."""


def _dump_json(doc: dict, path) -> None:
    Path(path).write_text(json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=1) + "\n")


def _load_json(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    return doc


def _require(doc: dict, key: str, path):
    if key not in doc:
        raise FileFormatError(f"{path}: missing key {key!r}")
    return doc[key]


def _point_record(index, point: ConformalPoint) -> dict:
    coords = project(point)
    finite = coords is not POINT_AT_INFINITY
    return {
        "index": list(index),
        "infinite": not finite,
        "coords": [float(c) for c in coords] if finite else None,
        "coefficients": [float(c) for c in point.mv.coeffs],
    }


def save_net(net: PairNet, path) -> None:
    lattice = net.lattice
    alg = net.algebra
    doc = {
        "schema": NET_SCHEMA,
        "n": alg.n,
        "m": lattice.dim,
        "extents": list(lattice.extents),
        "euclidean": net.euclidean,
        "vertices": [
            {
                **_point_record(t, net.f[t]),
                "hat_coefficients": [float(c) for c in net.fhat[t].mv.coeffs],
            }
            for t in lattice.vertices()
        ],
    }
    if net.edge_spheres is not None:
        doc["edge_spheres"] = [
            {"index": list(t), "axis": j, "coefficients": [float(c) for c in net.edge_spheres[t, j].coeffs]}
            for t, j in lattice.edges()
        ]
    if net.transitions is not None:
        doc["transitions"] = [
            {"index": list(t), "axis": j, "coefficients": [float(c) for c in net.transitions[t, j].coeffs]}
            for t, j in lattice.edges()
        ]
    if net.frames is not None:
        doc["frames"] = [
            {"index": list(t), "coefficients": [float(c) for c in net.frames[t].mv.coeffs]}
            for t in lattice.vertices()
        ]
    _dump_json(doc, path)


def load_net(path) -> PairNet:
    doc = _load_json(path)
    if _require(doc, "schema", path) != NET_SCHEMA:
        raise FileFormatError(f"{path}: expected schema {NET_SCHEMA}, got {doc['schema']!r}")
    n = int(_require(doc, "n", path))
    extents = tuple(int(e) for e in _require(doc, "extents", path))
    alg = conformal_algebra(n)
    lattice = Lattice(extents)
    f, fhat = {}, {}
    for rec in _require(doc, "vertices", path):
        t = tuple(int(x) for x in _require(rec, "index", path))
        if not lattice.contains(t):
            raise FileFormatError(f"{path}: vertex index {t} outside extents {extents}")
        try:
            f[t] = ConformalPoint(alg.from_coefficients(rec["coefficients"]), "projective", validate=False)
            fhat[t] = ConformalPoint(alg.from_coefficients(rec["hat_coefficients"]), "projective", validate=False)
        except (KeyError, ValueError) as exc:
            raise FileFormatError(f"{path}: bad vertex record at {t}: {exc}") from exc
    missing = [t for t in lattice.vertices() if t not in f]
    if missing:
        raise FileFormatError(f"{path}: missing vertices, first {missing[0]}")
    net = PairNet(lattice, f, fhat, euclidean=bool(doc.get("euclidean", False)))

    def load_edge_field(key):
        fld = EdgeVectorField(lattice)
        for rec in doc[key]:
            t = tuple(int(x) for x in rec["index"])
            fld[t, int(rec["axis"])] = alg.from_coefficients(rec["coefficients"])
        return fld

    try:
        if "edge_spheres" in doc:
            net.edge_spheres = load_edge_field("edge_spheres")
        if "transitions" in doc:
            net.transitions = load_edge_field("transitions")
        if "frames" in doc:
            frames = FrameField(lattice)
            for rec in doc["frames"]:
                t = tuple(int(x) for x in rec["index"])
                frames[t] = Versor(alg.from_coefficients(rec["coefficients"]))
            net.frames = frames
    except (KeyError, ValueError, GeometryError) as exc:
        raise FileFormatError(f"{path}: bad field record: {exc}") from exc
    return net


def save_initial_data(init: InitialData, path) -> None:
    doc = {
        "schema": INIT_SCHEMA,
        "n": init.n,
        "m": init.m,
        "extents": list(init.extents),
        "points": [_point_record(t, p) for t, p in sorted(init.points.items())],
    }
    if init.hat_points:
        doc["hat_points"] = [_point_record(t, p) for t, p in sorted(init.hat_points.items())]
    if init.frame_origin is not None:
        doc["frame_origin"] = [float(c) for c in init.frame_origin.mv.coeffs]
    _dump_json(doc, path)


def load_initial_data(path) -> InitialData:
    doc = _load_json(path)
    if _require(doc, "schema", path) != INIT_SCHEMA:
        raise FileFormatError(f"{path}: expected schema {INIT_SCHEMA}, got {doc['schema']!r}")
    n = int(_require(doc, "n", path))
    m = int(_require(doc, "m", path))
    alg = conformal_algebra(n)

    def load_points(records):
        out = {}
        for rec in records:
            t = tuple(int(x) for x in rec["index"])
            out[t] = ConformalPoint(alg.from_coefficients(rec["coefficients"]), "projective", validate=False)
        return out

    try:
        points = load_points(_require(doc, "points", path))
        hat = load_points(doc["hat_points"]) if "hat_points" in doc else None
        frame = Versor(alg.from_coefficients(doc["frame_origin"])) if "frame_origin" in doc else None
    except (KeyError, ValueError, GeometryError) as exc:
        raise FileFormatError(f"{path}: bad record: {exc}") from exc
    return InitialData(m, n, tuple(int(e) for e in _require(doc, "extents", path)), points, hat, frame)


def save_report(report, json_path, csv_path) -> None:
    """Write a verification report as JSON and as delimited text."""
    _dump_json(report.to_dict(), json_path)
    lines = [";".join(row) for row in report.csv_rows()]
    Path(csv_path).write_text("\n".join(lines) + "\n")


def export_quad_meshes(net: PairNet, out_dir, stem: str = "net") -> list:
    """Write one OBJ quad mesh per coordinate-surface slice of the net.

    Requires ambient dimension 3 and a chart-finite net.  For a 2-dimensional
    net the single surface is written; for higher dimensions one file per
    fixed lattice coordinate.
    """
    alg = net.algebra
    if alg.n != 3:
        raise GeometryError(f"quad-mesh export needs ambient dimension 3, net has {alg.n}")
    lattice = net.lattice
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    coords = {}
    for t in lattice.vertices():
        c = project(net.f[t])
        if c is POINT_AT_INFINITY:
            raise GeometryError(f"vertex {t} is at infinity; no mesh representation")
        coords[t] = c

    def write_slice(fixed_axis, level, slice_axes, name):
        verts = []
        index = {}
        ranges = [range(lattice.extents[a]) for a in slice_axes]
        for multi in np.ndindex(*[len(r) for r in ranges]):
            t = [0] * lattice.dim
            if fixed_axis is not None:
                t[fixed_axis] = level
            for a, v in zip(slice_axes, multi):
                t[a] = v
            t = tuple(t)
            index[multi] = len(verts) + 1
            verts.append(coords[t])
        lines = [f"v {p[0]!r} {p[1]!r} {p[2]!r}" for p in verts]
        na, nb = (lattice.extents[a] for a in slice_axes)
        for ia in range(na - 1):
            for ib in range(nb - 1):
                q = (index[(ia, ib)], index[(ia + 1, ib)], index[(ia + 1, ib + 1)], index[(ia, ib + 1)])
                lines.append("f {} {} {} {}".format(*q))
        path = out_dir / f"{stem}_{name}.obj"
        path.write_text("\n".join(lines) + "\n")
        return path

    written = []
    if lattice.dim == 2:
        written.append(write_slice(None, 0, (0, 1), "surface"))
    else:
        for fixed_axis in range(lattice.dim):
            slice_axes = tuple(a for a in range(lattice.dim) if a != fixed_axis)[:2]
            for level in range(lattice.extents[fixed_axis]):
                written.append(write_slice(fixed_axis, level, slice_axes, f"axis{fixed_axis}_level{level}"))
    return written
