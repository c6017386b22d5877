"""Net verification: one report over every discrete invariant of a pair net.

Each check records its worst scaled residual, the tolerance it was judged
against and where the worst case occurred.  Pass/fail is a pure function of
residuals and tolerances, and serialization of a report is byte-stable, so
identical runs produce identical report files.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .algebra import minkowski_inner, projective_distance
from .moebius import DegenerateConfiguration, GeometryError, cross_ratio
from .lattice import (
    DegenerateEdge,
    PairNet,
    cell_sphere_check,
    edge_cross_ratio_closed_form,
    face_cross_ratio_closed_form,
    mc_residual_face,
    mc_residual_spheres,
)
from . import linalg

__all__ = ["CheckResult", "VerificationReport", "verify_net", "DEFAULT_TOLERANCES", "TOLERANCE_ENV_VAR"]

#: Environment variable that, when set to a float, overrides every default
#: tolerance below (explicit overrides still win).  Echoed into the report.
TOLERANCE_ENV_VAR = "MOEBIUSNETS_TOL"

DEFAULT_TOLERANCES = {
    "face_concircular": 1e-8,
    "hat_face_concircular": 1e-8,
    "edge_pair_concircular": 1e-8,
    "edge_sphere_symmetry": 1e-10,
    "edge_reflection": 1e-8,
    "mc_transitions": 1e-10,
    "mc_spheres": 1e-10,
    "face_sphere_collinear": 1e-7,
    "edge_cross_ratio_closed_form": 1e-8,
    "face_cross_ratio_closed_form": 1e-8,
    "cell_spheres": 1e-8,
    "pair_cell_spheres": 1e-8,
    "frame_unit": 1e-10,
    "euclidean_planes": 1e-10,
    "chart_margin": 1e-9,
    "consistency": 1e-8,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    worst_at: str = ""
    count: int = 0


@dataclass
class VerificationReport:
    n: int
    m: int
    extents: tuple
    euclidean: bool
    checks: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    tolerance_env: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self):
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def to_dict(self) -> dict:
        return {
            "schema": "moebiusnets/report-v1",
            "n": self.n,
            "m": self.m,
            "extents": list(self.extents),
            "euclidean": self.euclidean,
            "passed": self.passed,
            "tolerance_env": self.tolerance_env,
            "counts": dict(sorted(self.counts.items())),
            "checks": [
                {
                    "name": c.name,
                    "value": c.value,
                    "tolerance": c.tolerance,
                    "passed": c.passed,
                    "worst_at": c.worst_at,
                    "count": c.count,
                }
                for c in self.checks
            ],
        }

    def csv_rows(self):
        yield ("check", "value", "tolerance", "passed", "worst_at", "count")
        for c in self.checks:
            yield (c.name, repr(c.value), repr(c.tolerance), str(c.passed).lower(), c.worst_at, str(c.count))

    def summary_lines(self):
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            where = f"  worst at {c.worst_at}" if c.worst_at and not c.passed else ""
            yield f"[{status}] {c.name}: {c.value:.3e} (tol {c.tolerance:.1e}, {c.count} checked){where}"


class _Worst:
    """Track a maximal residual and where it occurred."""

    def __init__(self):
        self.value = 0.0
        self.at = ""
        self.count = 0

    def update(self, value: float, where) -> None:
        self.count += 1
        if value > self.value:
            self.value = value
            self.at = str(where)


def _relative(delta: float, reference: float) -> float:
    return delta / max(1.0, abs(reference))


def _quad_concircularity(points, where, worst: _Worst) -> None:
    """Imaginary part of the cross ratio, scaled; wedge fallback when a pair
    of the four points coincides (the quadruple is then trivially circular)."""
    try:
        cr = cross_ratio(*points)
        worst.update(_relative(cr.imag, cr.real), where)
    except DegenerateConfiguration:
        mvs = [p.mv for p in points]
        scale = math.prod(mv.norm() for mv in mvs)
        w = mvs[0].wedge(mvs[1]).wedge(mvs[2]).wedge(mvs[3])
        worst.update(w.max_abs() / scale, where)


def verify_net(net: PairNet, tolerances: dict | None = None, fill_report=None) -> VerificationReport:
    """Run every applicable invariant over a pair net and report the maxima.

    Point-level checks always run; frame, sphere and transition checks run
    when the net carries that data.  ``tolerances`` overrides individual
    defaults; the MOEBIUSNETS_TOL environment variable overrides all
    remaining defaults at once and is echoed into the report.
    """
    tol = dict(DEFAULT_TOLERANCES)
    env = os.environ.get(TOLERANCE_ENV_VAR, "")
    if env:
        try:
            env_value = float(env)
        except ValueError as exc:
            raise ValueError(f"{TOLERANCE_ENV_VAR} must be a float, got {env!r}") from exc
        tol = {k: env_value for k in tol}
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        tol.update(tolerances)

    lattice = net.lattice
    alg = net.algebra
    report = VerificationReport(alg.n, lattice.dim, lattice.extents, net.euclidean, tolerance_env=env)
    checks = report.checks

    faces = _Worst()
    hat_faces = _Worst()
    mc_t = _Worst()
    mc_s = _Worst()
    rank_excess = _Worst()
    face_cf = _Worst()
    for base, i, j in lattice.faces():
        where = f"face {base} axes ({i},{j})"
        _quad_concircularity(net.face_points(base, i, j, "f"), where, faces)
        if net.euclidean:
            # the companion net is one constant point; its faces are circular
            # by collapse, there is nothing to measure
            hat_faces.count += 1
        else:
            _quad_concircularity(net.face_points(base, i, j, "fhat"), where, hat_faces)
        bi, bj = lattice.shift(base, i), lattice.shift(base, j)
        if net.transitions is not None:
            mc_t.update(
                mc_residual_face(
                    i,
                    j,
                    net.transitions[base, i],
                    net.transitions[base, j],
                    net.transitions[bj, i],
                    net.transitions[bi, j],
                ),
                where,
            )
            try:
                cf = face_cross_ratio_closed_form(
                    net.transitions[base, i],
                    net.transitions[bj, i],
                    net.transitions[base, j],
                    net.transitions[bi, j],
                )
                dv = cross_ratio(*net.face_points(base, i, j, "f"))
                face_cf.update(_relative(abs(cf - dv.real), cf), where)
            except (DegenerateEdge, DegenerateConfiguration):
                report.counts["degenerate_faces"] = report.counts.get("degenerate_faces", 0) + 1
        if net.edge_spheres is not None:
            quad = [
                net.edge_spheres[base, i],
                net.edge_spheres[bi, j],
                net.edge_spheres[base, j],
                net.edge_spheres[bj, i],
            ]
            mc_s.update(mc_residual_spheres(*quad), where)
            m = np.stack([s.vector_coordinates() for s in quad], axis=1)
            sv = np.linalg.svd(m, compute_uv=False)
            rank_excess.update(float(sv[2] / sv[0]) if sv[0] > 0 else 0.0, where)
    checks.append(CheckResult("face_concircular", faces.value, tol["face_concircular"],
                              faces.value <= tol["face_concircular"], faces.at, faces.count))
    checks.append(CheckResult("hat_face_concircular", hat_faces.value, tol["hat_face_concircular"],
                              hat_faces.value <= tol["hat_face_concircular"], hat_faces.at, hat_faces.count))
    if net.transitions is not None:
        checks.append(CheckResult("mc_transitions", mc_t.value, tol["mc_transitions"],
                                  mc_t.value <= tol["mc_transitions"], mc_t.at, mc_t.count))
        checks.append(CheckResult("face_cross_ratio_closed_form", face_cf.value, tol["face_cross_ratio_closed_form"],
                                  face_cf.value <= tol["face_cross_ratio_closed_form"], face_cf.at, face_cf.count))
    if net.edge_spheres is not None:
        checks.append(CheckResult("mc_spheres", mc_s.value, tol["mc_spheres"],
                                  mc_s.value <= tol["mc_spheres"], mc_s.at, mc_s.count))
        checks.append(CheckResult("face_sphere_collinear", rank_excess.value, tol["face_sphere_collinear"],
                                  rank_excess.value <= tol["face_sphere_collinear"], rank_excess.at, rank_excess.count))

    edge_quads = _Worst()
    symmetry = _Worst()
    reflection = _Worst()
    edge_cf = _Worst()
    planes = _Worst()
    degenerate_edges = 0
    for t, j in lattice.edges():
        nxt = lattice.shift(t, j)
        where = f"edge {t} axis {j}"
        if net.euclidean:
            edge_quads.count += 1  # three distinct points are always concircular
        else:
            _quad_concircularity(
                [net.fhat[t], net.f[t], net.f[nxt], net.fhat[nxt]], where, edge_quads
            )
        if net.frames is not None:
            phi_t, phi_n = net.frames[t], net.frames[nxt]
            ej = alg.e(j + 1)
            fwd = phi_t.inverse_mv() * ej * phi_n.mv
            bwd = phi_n.inverse_mv() * ej * phi_t.mv
            symmetry.update((fwd - bwd).max_abs(), where)
        if net.edge_spheres is not None:
            s = net.edge_spheres[t, j]
            reflection.update(projective_distance((s * net.f[t].mv * s).grade(1), net.f[nxt].mv), where)
            reflection.update(projective_distance((s * net.fhat[t].mv * s).grade(1), net.fhat[nxt].mv), where)
            if net.euclidean:
                planes.update((s * alg.einf + alg.einf * s).max_abs(), where)
        if net.transitions is not None:
            try:
                cf = edge_cross_ratio_closed_form(net.transitions[t, j])
                dv = cross_ratio(net.fhat[t], net.f[t], net.f[nxt], net.fhat[nxt])
                edge_cf.update(_relative(abs(cf - dv.real), cf), where)
            except (DegenerateEdge, DegenerateConfiguration):
                degenerate_edges += 1
    report.counts["degenerate_edges"] = degenerate_edges
    checks.append(CheckResult("edge_pair_concircular", edge_quads.value, tol["edge_pair_concircular"],
                              edge_quads.value <= tol["edge_pair_concircular"], edge_quads.at, edge_quads.count))
    if net.frames is not None:
        checks.append(CheckResult("edge_sphere_symmetry", symmetry.value, tol["edge_sphere_symmetry"],
                                  symmetry.value <= tol["edge_sphere_symmetry"], symmetry.at, symmetry.count))
    if net.edge_spheres is not None:
        checks.append(CheckResult("edge_reflection", reflection.value, tol["edge_reflection"],
                                  reflection.value <= tol["edge_reflection"], reflection.at, reflection.count))
    if net.transitions is not None:
        checks.append(CheckResult("edge_cross_ratio_closed_form", edge_cf.value, tol["edge_cross_ratio_closed_form"],
                                  edge_cf.value <= tol["edge_cross_ratio_closed_form"], edge_cf.at, edge_cf.count))
    if net.euclidean and net.edge_spheres is not None:
        checks.append(CheckResult("euclidean_planes", planes.value, tol["euclidean_planes"],
                                  planes.value <= tol["euclidean_planes"], planes.at, planes.count))

    cells = _Worst()
    pair_cells = _Worst()
    for k in range(1, lattice.dim + 1):
        for base, axes in lattice.cells(k):
            where = f"{k}-cell {base} axes {axes}"
            try:
                if k >= 2:
                    cells.update(cell_sphere_check(net, base, axes, "f"), where)
                    if not net.euclidean:  # companion cells collapse to one point
                        cells.update(cell_sphere_check(net, base, axes, "fhat"), where)
                pair_cells.update(cell_sphere_check(net, base, axes, "pair"), where)
            except GeometryError:
                report.counts["degenerate_cells"] = report.counts.get("degenerate_cells", 0) + 1
    checks.append(CheckResult("cell_spheres", cells.value, tol["cell_spheres"],
                              cells.value <= tol["cell_spheres"], cells.at, cells.count))
    checks.append(CheckResult("pair_cell_spheres", pair_cells.value, tol["pair_cell_spheres"],
                              pair_cells.value <= tol["pair_cell_spheres"], pair_cells.at, pair_cells.count))

    if net.frames is not None:
        unit = _Worst()
        for t in lattice.vertices():
            unit.update(abs(net.frames[t].eta - 1.0), f"vertex {t}")
        checks.append(CheckResult("frame_unit", unit.value, tol["frame_unit"],
                                  unit.value <= tol["frame_unit"], unit.at, unit.count))

    if net.euclidean:
        margin = _Worst()
        for t in lattice.vertices():
            mv = net.f[t].mv
            c = abs(minkowski_inner(mv, alg.einf)) / mv.norm()
            # flag 1.0 when the point approaches the infinity class, i.e. the
            # net leaves the Euclidean chart
            margin.update(1.0 if c <= tol["chart_margin"] else 0.0, f"vertex {t}")
        checks.append(CheckResult("chart_margin", margin.value, 0.5,
                                  margin.value <= 0.5, margin.at, margin.count))

    if fill_report is not None:
        disc = fill_report.max_discrepancy()
        checks.append(CheckResult("consistency", disc, tol["consistency"],
                                  disc <= tol["consistency"], "", len(fill_report.discrepancies)))

    return report
