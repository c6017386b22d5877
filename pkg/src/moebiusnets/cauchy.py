"""Completion machinery: Miquel cells, lattice filling, hypercube demo, seeds.

The elementary step determines the eighth vertex of a circular 3-cell as the
common point of the three circles through the known vertices of its unknown
faces (Miquel's configuration): all eight vertices lie on one 2-sphere, each
face on a circle.  Lattice filling runs this step in lexicographic order;
for four and more axes every new vertex is over-determined and the spread of
the alternative determinations is recorded, which is the operative form of
the discrete consistency of the construction.

The point-level step is the production path; the projective scheme that
intersects sphere spans is kept only as the rank cross-check exposed by
:func:`moebiusnets.lattice.face_sphere_rank`, because circle intersection is
the better conditioned computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .algebra import Versor, minkowski_inner, projective_distance
from .moebius import (
    GEOM_RTOL,
    ConformalPoint,
    DegenerateConfiguration,
    GeometryError,
    SphereBlade,
    _point_mv,
    circle_intersect,
    lift,
    points_wedge,
    sphere_through,
)
from .lattice import (
    EdgeVectorField,
    FrameField,
    Lattice,
    PairNet,
    _greedy_sphere_blade,
    frames_from_transitions,
    reconstruct_pair_net,
)
from . import linalg

__all__ = [
    "HARD_CONSISTENCY_TOL",
    "SOFT_CONSISTENCY_TOL",
    "CompletionError",
    "AmbiguousCompletion",
    "InitialData",
    "CompletionReport",
    "complete_cell_3d",
    "point_on_circle",
    "fill_lattice",
    "fill_pair_lattice",
    "hypercube_fill",
    "seed_grid",
    "seed_random_circular",
    "random_pair_net",
]

#: Scaled discrepancy between alternative determinations that aborts a fill.
HARD_CONSISTENCY_TOL = 1e-5
#: Scaled discrepancy that is only recorded in the report.
SOFT_CONSISTENCY_TOL = 1e-8


class CompletionError(GeometryError):
    """A cell could not be completed; carries the offending cell when known."""

    def __init__(self, message: str, cell=None):
        super().__init__(message if cell is None else f"{message} (cell {cell})")
        self.cell = cell


class AmbiguousCompletion(CompletionError):
    """Both circle-intersection candidates fit the third circle; the cell is
    too close to degenerate to trust either."""


def _concircular_residual(points) -> float:
    mvs = [_point_mv(p) for p in points]
    scale = math.prod(m.norm() for m in mvs)
    return points_wedge(mvs).max_abs() / scale


class _CellChart:
    """Similarity (plus optional inversion) that renormalizes a point cluster.

    Completion is equivariant under Moebius maps, so cells may be moved into
    a well-conditioned position (centered, unit spread, away from infinity)
    and the result mapped back; only this makes wildly transformed cells
    numerically tractable.
    """

    INF = object()

    def __init__(self, alg, mvs):
        self.alg = alg
        n = alg.n
        coords = []
        for mv in mvs:
            c = -2.0 * minkowski_inner(mv, alg.einf)
            coords.append(self.INF if abs(c) <= 1e-12 * mv.norm() else mv.vector_coordinates()[1:-1] / c)
        finite = np.array([c for c in coords if c is not self.INF])
        if finite.size == 0:
            raise GeometryError("every point of the cell is at infinity")
        center = np.median(finite, axis=0)
        dists = np.linalg.norm(finite - center, axis=1)
        spread = float(np.median(dists)) or 1.0
        self.inversion = None
        if any(c is self.INF for c in coords) or dists.max() > 100.0 * spread:
            # keep the inversion center clear of every input point
            for k in range(8):
                off = center + 0.37 * spread * k * np.ones(n) / math.sqrt(n)
                if np.linalg.norm(finite - off, axis=1).min() > 1e-6 * spread:
                    center = off
                    break
            self.inversion = (center, spread)
            coords = [self._invert(c) for c in coords]
            finite = np.array(coords)
            center = np.median(finite, axis=0)
            spread = float(np.median(np.linalg.norm(finite - center, axis=1))) or 1.0
        self.shift = center
        self.scale = spread
        self.normalized = [lift(alg, (c - self.shift) / self.scale) for c in coords]

    def _invert(self, c):
        ctr, r = self.inversion
        if c is self.INF:
            return ctr.copy()
        d = c - ctr
        return ctr + (r * r / float(d @ d)) * d

    def restore(self, point: ConformalPoint) -> ConformalPoint:
        from .moebius import POINT_AT_INFINITY, project

        y = project(point, rtol=1e-12)
        if y is POINT_AT_INFINITY:
            if self.inversion is None:
                return ConformalPoint(self.alg.einf, "projective", validate=False)
            return lift(self.alg, self.inversion[0])
        y = y * self.scale + self.shift
        if self.inversion is not None:
            ctr, r = self.inversion
            if np.linalg.norm(y - ctr) <= 1e-12 * r:
                return ConformalPoint(self.alg.einf, "projective", validate=False)
            y = self._invert(y)
        return lift(self.alg, y)


def complete_cell_3d(
    p,
    p1,
    p2,
    p3,
    p12,
    p13,
    p23,
    *,
    rtol: float = GEOM_RTOL,
    select_rtol: float = 1e-6,
    check_input: bool = True,
):
    """Eighth vertex of a circular 3-cell from its seven known vertices.

    ``p`` is the corner opposite the unknown vertex, ``p_i`` its axis
    neighbours and ``p_ij`` the face diagonals.  The cell is first moved into
    a normalized position; the three circles through (p_i, p_ij, p_ik) then
    intersect pairwise in a known diagonal and in one new point, and the
    candidate incident with the third circle is mapped back and returned
    together with its worst scaled incidence residual.

    Raises CompletionError when the known faces are not concircular, the
    seven points do not fit one 2-sphere, the circles fail to intersect, or
    (AmbiguousCompletion) both candidates fit the third circle.
    """
    mvs = [_point_mv(q) for q in (p, p1, p2, p3, p12, p13, p23)]
    chart = _CellChart(mvs[0].algebra, mvs)
    p, p1, p2, p3, p12, p13, p23 = chart.normalized
    if check_input:
        for quad, name in (
            ((p, p1, p12, p2), "axes (1,2)"),
            ((p, p1, p13, p3), "axes (1,3)"),
            ((p, p2, p23, p3), "axes (2,3)"),
        ):
            r = _concircular_residual(quad)
            if r > select_rtol:
                raise CompletionError(f"known face {name} is not concircular (residual {r:.3g})")
        seven = [p, p1, p2, p3, p12, p13, p23]
        sphere = SphereBlade(_greedy_sphere_blade(seven, 4, rtol), validate=False)
        worst = max(sphere.incidence_residual(q) for q in seven)
        if worst > select_rtol:
            raise CompletionError(f"the seven vertices do not lie on one 2-sphere (residual {worst:.3g})")

    try:
        c1 = sphere_through([p1, p12, p13], rtol)
        c2 = sphere_through([p2, p12, p23], rtol)
        c3 = sphere_through([p3, p13, p23], rtol)
    except DegenerateConfiguration as exc:
        raise CompletionError(f"collapsed face circle: {exc}") from exc
    try:
        cand_a, cand_b = circle_intersect(c1, c2)
    except GeometryError as exc:
        raise CompletionError(f"face circles do not intersect: {exc}") from exc

    res_a, res_b = c3.incidence_residual(cand_a), c3.incidence_residual(cand_b)
    fits_a, fits_b = res_a <= select_rtol, res_b <= select_rtol
    if fits_a and fits_b:
        raise AmbiguousCompletion(
            f"both intersection candidates lie on the third circle ({res_a:.3g}, {res_b:.3g})"
        )
    if not (fits_a or fits_b):
        raise CompletionError(
            f"no intersection candidate lies on the third circle ({res_a:.3g}, {res_b:.3g})"
        )
    chosen = cand_a if fits_a else cand_b
    residual = max(
        c1.incidence_residual(chosen),
        c2.incidence_residual(chosen),
        c3.incidence_residual(chosen),
    )
    return chart.restore(chosen), residual


def point_on_circle(a, b, c, u: float) -> ConformalPoint:
    """Point at arc parameter u in (0, 1) on the circle through a, b, c.

    The parametrized arc runs from a (u -> 0) to b (u -> 1) on the side not
    containing c, so any u produces a cyclically ordered concircular quad
    (c, a, new, b).
    """
    blade = sphere_through([a, b, c]).mv
    alg = blade.algebra
    span = linalg.blade_span(blade)
    gram = linalg.minkowski_gram(alg, span)
    evals, evecs = np.linalg.eigh(gram)
    # signature (2,1): one negative eigenvalue, two positive ones
    if not (evals[0] < 0 < evals[1]):
        raise GeometryError("circle blade has no real points (wrong signature)")
    w = span @ (evecs[:, 0] / math.sqrt(-evals[0]))
    u1 = span @ (evecs[:, 1] / math.sqrt(evals[1]))
    u2 = span @ (evecs[:, 2] / math.sqrt(evals[2]))

    def angle(point):
        x = _point_mv(point).vector_coordinates()
        metric = alg.vector_metric
        gamma = -float(x @ (metric * w))
        alpha = float(x @ (metric * u1))
        beta = float(x @ (metric * u2))
        return math.atan2(beta / gamma, alpha / gamma)

    ta, tb, tc = angle(a), angle(b), angle(c)
    delta = (tb - ta) % (2.0 * math.pi)
    if (tc - ta) % (2.0 * math.pi) < delta:
        delta -= 2.0 * math.pi
    theta = ta + u * delta
    coords = math.cos(theta) * u1 + math.sin(theta) * u2 + w
    return ConformalPoint(alg.vector(coords), "projective", validate=False)


@dataclass
class InitialData:
    """Cauchy data: the 2-dimensional coordinate subnets through the origin.

    ``points`` maps a multi-index with at most two nonzero entries (more for
    hypercube data) to its point; ``hat_points`` optionally carries the
    companion net, and ``frame_origin`` anchors frame reconstruction.
    """

    m: int
    n: int
    extents: tuple
    points: dict
    hat_points: Optional[dict] = None
    frame_origin: Optional[Versor] = None

    def __post_init__(self):
        self.extents = tuple(int(e) for e in self.extents)
        if len(self.extents) != self.m:
            raise ValueError(f"extents {self.extents} do not match dimension {self.m}")

    def support_limit(self) -> int:
        return max((sum(1 for x in t if x) for t in self.points), default=0)

    def validate(self, rtol: float = 1e-7) -> float:
        """Check coverage and concircularity of the given subnets.

        Returns the worst face residual found.
        """
        lattice = Lattice(self.extents)
        for t in lattice.vertices():
            if sum(1 for x in t if x) <= min(2, self.m) and t not in self.points:
                raise GeometryError(f"initial data is missing subnet vertex {t}")
        worst = 0.0
        for store in (self.points, self.hat_points or {}):
            for base, i, j in lattice.faces():
                quad = [
                    base,
                    lattice.shift(base, i),
                    lattice.shift(lattice.shift(base, i), j),
                    lattice.shift(base, j),
                ]
                if all(t in store for t in quad):
                    r = _concircular_residual([store[t] for t in quad])
                    worst = max(worst, r)
                    if r > rtol:
                        raise GeometryError(
                            f"initial face at {base} axes ({i},{j}) is not concircular (residual {r:.3g})"
                        )
        return worst


@dataclass
class CompletionReport:
    """Residual log of a fill: one entry per completed cell, plus the
    consistency spread of vertices determined by several 3-cells."""

    cell_residuals: dict = field(default_factory=dict)     # (net, vertex) -> float
    discrepancies: dict = field(default_factory=dict)      # (net, vertex) -> float
    initial_face_residual: float = 0.0
    degenerate_cells: list = field(default_factory=list)
    hard_threshold: float = HARD_CONSISTENCY_TOL
    soft_threshold: float = SOFT_CONSISTENCY_TOL

    def max_cell_residual(self) -> float:
        return max(self.cell_residuals.values(), default=0.0)

    def max_discrepancy(self) -> float:
        return max(self.discrepancies.values(), default=0.0)

    def merge(self, other: "CompletionReport") -> None:
        self.cell_residuals.update(other.cell_residuals)
        self.discrepancies.update(other.discrepancies)
        self.initial_face_residual = max(self.initial_face_residual, other.initial_face_residual)
        self.degenerate_cells.extend(other.degenerate_cells)


def _cell_seven(points: dict, t, axes):
    """The seven known vertices of the 3-cell with top corner t along axes."""
    base = list(t)
    for a in axes:
        base[a] -= 1
    base = tuple(base)

    def corner(mask):
        v = list(base)
        for bit, a in enumerate(axes):
            if mask >> bit & 1:
                v[a] += 1
        return tuple(v)

    p = points[corner(0b000)]
    p1, p2, p3 = points[corner(0b001)], points[corner(0b010)], points[corner(0b100)]
    p12, p13, p23 = points[corner(0b011)], points[corner(0b101)], points[corner(0b110)]
    return base, (p, p1, p2, p3, p12, p13, p23)


def _fill_points(
    lattice: Lattice,
    given: dict,
    report: CompletionReport,
    net_tag: str,
    hard_tol: float,
) -> dict:
    """Lexicographic Miquel fill of one net; consistency spread recorded."""
    points = dict(given)
    for t in lattice.vertices():
        support = tuple(a for a in range(lattice.dim) if t[a] > 0)
        known = t in points
        if len(support) < 3:
            if not known:
                raise GeometryError(f"initial data is missing subnet vertex {t}")
            continue
        value = points.get(t)
        spread = 0.0
        for triple in combinations(support, 3):
            base, seven = _cell_seven(points, t, triple)
            try:
                cand, residual = complete_cell_3d(*seven)
            except CompletionError as exc:
                exc.cell = (base, triple)
                raise CompletionError(str(exc), cell=(base, triple)) from exc
            if value is None:
                value = cand
                points[t] = cand
                report.cell_residuals[(net_tag, t)] = residual
            else:
                spread = max(spread, projective_distance(value.mv, cand.mv))
        if spread:
            report.discrepancies[(net_tag, t)] = spread
            if spread > hard_tol:
                raise CompletionError(
                    f"determinations of vertex {t} disagree by {spread:.3g} (> {hard_tol:g})"
                )
        if not known:
            points[t] = value
    return points


def fill_lattice(
    init: InitialData,
    extents=None,
    hard_tol: float = HARD_CONSISTENCY_TOL,
):
    """Complete a circular net from its 2-dimensional subnets through 0.

    Returns the filled net (Euclidean mode: the companion net is the
    constant infinity class) and the completion report.  Any completion
    failure aborts with the offending cell; determinations disagreeing above
    ``hard_tol`` abort as well.
    """
    extents = tuple(extents) if extents is not None else init.extents
    lattice = Lattice(extents)
    report = CompletionReport(hard_threshold=hard_tol)
    report.initial_face_residual = init.validate()
    f = _fill_points(lattice, init.points, report, "f", hard_tol)
    alg = next(iter(f.values())).mv.algebra
    einf_point = ConformalPoint(alg.einf, "projective", validate=False)
    fhat = {t: einf_point for t in lattice.vertices()}
    if init.hat_points:
        fhat = _fill_points(lattice, init.hat_points, report, "fhat", hard_tol)
        euclidean = False
    else:
        euclidean = True
    return PairNet(lattice, f, fhat, euclidean=euclidean), report


def fill_pair_lattice(
    init: InitialData,
    extents=None,
    hard_tol: float = HARD_CONSISTENCY_TOL,
):
    """Complete both nets of a Ribaucour pair and reconstruct its frames.

    The given subnets must satisfy the pair conditions (edge quadruples
    concircular); the first violated quadruple is reported.  After the two
    point fills, edge spheres are recovered, a frame field is integrated with
    sign fixing, and the returned net carries frames, spheres and transition
    vectors.
    """
    if init.hat_points:
        lattice = Lattice(tuple(extents) if extents is not None else init.extents)
        for t, j in lattice.edges():
            nxt = lattice.shift(t, j)
            quad = (t, nxt)
            if all(v in init.points and v in init.hat_points for v in quad):
                r = _concircular_residual(
                    [init.points[t], init.points[nxt], init.hat_points[t], init.hat_points[nxt]]
                )
                if r > 1e-7:
                    raise GeometryError(
                        f"edge quadruple at {t} axis {j} is not concircular (residual {r:.3g})"
                    )
    net, report = fill_lattice(init, extents, hard_tol)
    full = reconstruct_pair_net(net, init.frame_origin)
    full.euclidean = net.euclidean
    return full, report


def hypercube_fill(k: int, i: int, points: dict, face_parameters=None, hard_tol: float = HARD_CONSISTENCY_TOL):
    """Fill the unit hypercube {0,1}^k from data on the i-cells containing 0.

    For i >= 2 the completion is unique; given vertices of higher support
    are cross-checked against their own determinations.  For i = 1 the 2-cell
    completions are a one-parameter family, so ``face_parameters`` must
    supply an arc parameter in (0, 1) per axis pair (a mapping (i, j) -> u,
    or one float for all faces).
    """
    if k < 2:
        raise ValueError("hypercube dimension must be at least 2")
    points = {tuple(t): p for t, p in points.items()}
    lattice = Lattice((2,) * k)
    expected = i if i >= 2 else 1
    for t in lattice.vertices():
        if sum(t) <= expected and t not in points:
            raise GeometryError(f"hypercube data is missing vertex {t} (support <= {expected})")
    report = CompletionReport(hard_threshold=hard_tol)
    if i < 2:
        if face_parameters is None:
            raise GeometryError("i = 1 data needs one arc parameter per 2-cell")
        for a, b in combinations(range(k), 2):
            u = face_parameters if isinstance(face_parameters, float) else face_parameters[(a, b)]
            t = tuple(1 if x in (a, b) else 0 for x in range(k))
            ta = tuple(1 if x == a else 0 for x in range(k))
            tb = tuple(1 if x == b else 0 for x in range(k))
            origin = (0,) * k
            points[t] = point_on_circle(points[ta], points[tb], points[origin], u)
            report.cell_residuals[("f", t)] = _concircular_residual(
                [points[origin], points[ta], points[t], points[tb]]
            )
    alg = next(iter(points.values())).mv.algebra
    filled = _fill_points(lattice, points, report, "f", hard_tol)
    einf_point = ConformalPoint(alg.einf, "projective", validate=False)
    fhat = {t: einf_point for t in lattice.vertices()}
    return PairNet(lattice, filled, fhat, euclidean=True), report


def seed_grid(m: int, n: int, spacings, extents) -> FrameField:
    """Frame field whose net projects to a rectangular grid.

    The transition vectors e_j + spacing_j * e_inf translate by spacing_j
    along axis j and satisfy the integrability condition identically.
    """
    spacings = tuple(float(b) for b in spacings)
    if len(spacings) != m or any(b == 0 for b in spacings):
        raise ValueError("need one nonzero spacing per axis")
    if m > n:
        raise ValueError(f"a grid seed needs lattice dimension m={m} <= ambient n={n}")
    from .algebra import conformal_algebra

    alg = conformal_algebra(n)
    lattice = Lattice(extents)
    trans = EdgeVectorField(lattice)
    for t, j in lattice.edges():
        trans[t, j] = alg.e(j + 1) + spacings[j] * alg.einf
    return frames_from_transitions(lattice, trans, Versor.identity(alg))


def circular_quad_completion(a, b, c, angle_offset: float = 0.0) -> ConformalPoint:
    """Fourth concircular vertex near the parallelogram completion.

    The parallelogram point a + b - c is projected radially onto the
    circumcircle of (a, b, c) and then rotated along the circle by
    ``angle_offset`` radians.  Unlike a fixed arc fraction this keeps a
    jittered grid flat on average, so completions do not accumulate
    curvature across a large lattice.
    """
    from .moebius import project

    alg = _point_mv(a).algebra
    A, B, C = (np.asarray(project(q), dtype=float) for q in (a, b, c))
    d1, d2 = A - C, B - C
    g = np.array([[d1 @ d1, d1 @ d2], [d1 @ d2, d2 @ d2]])
    try:
        x = np.linalg.solve(2.0 * g, np.array([d1 @ d1, d2 @ d2]))
    except np.linalg.LinAlgError as exc:
        raise GeometryError("circumcircle of collinear points is undefined") from exc
    center = C + x[0] * d1 + x[1] * d2
    radius = float(np.linalg.norm(A - center))
    v = (A + B - C) - center
    if np.linalg.norm(v) <= 1e-12 * radius:
        raise GeometryError("parallelogram point coincides with the circumcenter")
    w = v / np.linalg.norm(v)
    s = d1 - (d1 @ w) * w
    if np.linalg.norm(s) <= 1e-12 * np.linalg.norm(d1):
        s = d2 - (d2 @ w) * w
    s /= np.linalg.norm(s)
    d = center + radius * (math.cos(angle_offset) * w + math.sin(angle_offset) * s)
    return lift(alg, d)


def seed_random_circular(
    m: int,
    n: int,
    extents,
    rng_seed: int,
    angle_range=(-0.08, 0.08),
    jitter: float = 0.05,
    transform_scale: float = 5.0,
) -> InitialData:
    """Random circular Cauchy data: jittered axis lines, every face closed on
    its circumcircle near the parallelogram completion.

    The per-face freedom is the arc offset (radians) sampled uniformly from
    ``angle_range``.  Deterministic for a fixed seed; faces are concircular
    by construction.
    """
    from .algebra import conformal_algebra

    alg = conformal_algebra(n)
    rng = np.random.default_rng(rng_seed)
    extents = tuple(int(e) for e in extents)
    lo, hi = angle_range

    def axis_direction(axis):
        if axis < n:
            d = np.zeros(n)
            d[axis] = 1.0
            return d
        # extra axes (e.g. the transform direction of a pair) must be
        # transversal to every coordinate direction, and long enough that the
        # completion-induced oscillation of the offset field cannot make
        # corresponding edges cross
        signs = np.array([(-1.0) ** ((i * (axis - n + 1)) % 2) for i in range(n)])
        return transform_scale * signs / math.sqrt(n)

    def base_coord(axis, k):
        return float(k) * axis_direction(axis)

    points = {}
    origin = (0,) * m
    points[origin] = lift(alg, rng.normal(scale=jitter, size=n))
    for a in range(m):
        for k in range(1, extents[a]):
            t = tuple(k if x == a else 0 for x in range(m))
            points[t] = lift(alg, base_coord(a, k) + rng.normal(scale=jitter, size=n))
    for a, b in combinations(range(m), 2):
        for ka in range(1, extents[a]):
            for kb in range(1, extents[b]):
                t = tuple(ka if x == a else kb if x == b else 0 for x in range(m))
                t_a = tuple(ka if x == a else kb - 1 if x == b else 0 for x in range(m))
                t_b = tuple(ka - 1 if x == a else kb if x == b else 0 for x in range(m))
                t_c = tuple(ka - 1 if x == a else kb - 1 if x == b else 0 for x in range(m))
                offset = float(rng.uniform(lo, hi))
                points[t] = circular_quad_completion(points[t_a], points[t_b], points[t_c], offset)
    return InitialData(m, n, extents, points)


def random_pair_net(m: int, n: int, extents, rng_seed: int, **seed_kwargs) -> PairNet:
    """A generic (non-Euclidean) Ribaucour pair with frames on the given box.

    Built as two adjacent layers of an (m+1)-dimensional random circular net,
    then closed through sphere recovery and frame integration, so every
    integrability invariant holds by construction up to rounding.
    """
    big_init = seed_random_circular(m + 1, n, tuple(extents) + (2,), rng_seed, **seed_kwargs)
    big, _ = fill_lattice(big_init)
    lattice = Lattice(extents)
    f = {t: big.f[t + (0,)] for t in lattice.vertices()}
    fhat = {t: big.f[t + (1,)] for t in lattice.vertices()}
    flat = PairNet(lattice, f, fhat)
    return reconstruct_pair_net(flat)
