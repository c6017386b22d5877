"""The Moebius-geometric dictionary over the Clifford kernel.

Points of the conformal n-sphere are null grade-1 elements up to scale;
hyperspheres are unit spacelike vectors (square -1); an m-sphere is a pure
blade, either spacelike of grade n-m or timelike of grade m+2, the two
representations being exchanged by the pseudoscalar duality.  Incidence,
orthogonality, angles, inversions and the cross ratio are all evaluated
against the product conventions documented in :mod:`moebiusnets.algebra`.

Finite points use the chart in which ``p e_inf + e_inf p = 1``:

    lift(x) = e_0 + sum_i x_i e_i + |x|^2 e_inf.

All predicates take relative tolerances scaled by the coefficient magnitudes
of their inputs; classification near tangency is reported inside a wider
band rather than guessed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import (
    ConformalAlgebra,
    GradeError,
    Multivector,
    Versor,
    dual,
    is_pure_blade,
    lambda_inner,
    minkowski_inner,
    projective_distance,
)
from . import linalg

__all__ = [
    "GEOM_RTOL",
    "TANGENT_RTOL",
    "GeometryError",
    "DegenerateConfiguration",
    "TangentIntersection",
    "DisjointIntersection",
    "PointAtInfinity",
    "POINT_AT_INFINITY",
    "ConformalPoint",
    "Hypersphere",
    "SphereBlade",
    "CrossRatioValue",
    "lift",
    "project",
    "chart_normalize",
    "hypersphere",
    "plane",
    "incident_point_sphere",
    "incident_point_circle",
    "spheres_orthogonal",
    "sphere_angle",
    "sphere_through",
    "points_wedge",
    "cross_ratio",
    "inversion",
    "extract_point_pair",
    "circle_intersect",
    "versor_from_point_pair",
]

GEOM_RTOL = 1e-9
#: Wider band inside which sphere/point intersections are reported tangent.
TANGENT_RTOL = 1e-7


class GeometryError(ValueError):
    """Base class for geometric failures (degeneracies, bad incidences)."""


class DegenerateConfiguration(GeometryError):
    """Input points or blades are in special position and determine nothing."""


class TangentIntersection(GeometryError):
    """Intersection exists but collapses to a single point within tolerance."""


class DisjointIntersection(GeometryError):
    """The objects have no real common point."""


class PointAtInfinity:
    """Singleton marker returned when a point projects to the infinity class."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "PointAtInfinity"


POINT_AT_INFINITY = PointAtInfinity()


class ConformalPoint:
    """Null grade-1 element representing a point, with projective semantics.

    ``normalization`` records whether the stored representative satisfies the
    chart condition (finite points scaled so that <p, e_inf> = -1/2) or is an
    arbitrary scalar multiple.
    """

    __slots__ = ("mv", "normalization")

    def __init__(self, mv: Multivector, normalization: str = "projective", *, validate: bool = True):
        if normalization not in ("chart", "projective"):
            raise ValueError(f"unknown normalization tag {normalization!r}")
        if validate:
            if not mv.is_grade(1):
                raise GradeError("a conformal point must be a grade-1 element")
            scale = mv.norm()
            if scale == 0.0:
                raise GeometryError("zero vector is not a point")
            if abs(minkowski_inner(mv, mv)) > GEOM_RTOL * scale * scale:
                raise GeometryError("point representative is not null")
        self.mv = mv
        self.normalization = normalization

    @property
    def algebra(self) -> ConformalAlgebra:
        return self.mv.algebra

    def coords(self):
        return project(self)

    def projectively_equals(self, other, rtol: float = GEOM_RTOL) -> bool:
        return projective_distance(self.mv, _point_mv(other)) <= rtol

    def __repr__(self):
        c = self.coords()
        if isinstance(c, PointAtInfinity):
            return "ConformalPoint(infinity)"
        return f"ConformalPoint({np.array2string(c, precision=6)})"


def _point_mv(p) -> Multivector:
    if isinstance(p, ConformalPoint):
        return p.mv
    if isinstance(p, Multivector):
        return p
    raise TypeError(f"expected a point, got {type(p).__name__}")


def _sphere_mv(s) -> Multivector:
    if isinstance(s, Hypersphere):
        return s.mv
    if isinstance(s, Multivector):
        return s
    raise TypeError(f"expected a hypersphere, got {type(s).__name__}")


def _blade_mv(b) -> Multivector:
    if isinstance(b, SphereBlade):
        return b.mv
    if isinstance(b, Multivector):
        return b
    raise TypeError(f"expected a sphere blade, got {type(b).__name__}")


def lift(alg: ConformalAlgebra, x) -> ConformalPoint:
    """Chart-normalized lift of a Euclidean point: e_0 + x.e + |x|^2 e_inf."""
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.shape != (alg.n,):
        raise GeometryError(f"expected {alg.n} coordinates, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise GeometryError("coordinates must be finite")
    coords = np.empty(alg.dimension)
    s = float(x @ x)
    coords[0] = 0.5 * (1.0 + s)       # e_0 + |x|^2 e_inf over (f_0, f_{n+1})
    coords[-1] = 0.5 * (1.0 - s)
    coords[1:-1] = x
    return ConformalPoint(alg.vector(coords), "chart", validate=False)


def chart_normalize(p) -> ConformalPoint:
    """Rescale a finite point onto the chart <p, e_inf> = -1/2."""
    mv = _point_mv(p)
    alg = mv.algebra
    c = -2.0 * minkowski_inner(mv, alg.einf)
    if abs(c) <= GEOM_RTOL * mv.norm():
        raise GeometryError("point lies in the infinity class; no chart representative")
    return ConformalPoint(mv / c, "chart", validate=False)


def project(p, rtol: float = GEOM_RTOL):
    """Euclidean coordinates of a point, or POINT_AT_INFINITY.

    Projectively invariant: any nonzero null representative gives the same
    answer.
    """
    mv = _point_mv(p)
    alg = mv.algebra
    scale = mv.norm()
    if scale == 0.0:
        raise GeometryError("zero vector is not a point")
    if not mv.is_grade(1) or abs(minkowski_inner(mv, mv)) > rtol * scale * scale:
        raise GeometryError("cannot project a non-null element")
    c = -2.0 * minkowski_inner(mv, alg.einf)
    if abs(c) <= rtol * scale:
        return POINT_AT_INFINITY
    return mv.vector_coordinates()[1:-1] / c


class Hypersphere:
    """Unit spacelike vector (square -1) representing a hypersphere or plane."""

    __slots__ = ("mv",)

    def __init__(self, mv: Multivector, *, validate: bool = True):
        if validate:
            if not mv.is_grade(1):
                raise GradeError("a hypersphere must be a grade-1 element")
            q = minkowski_inner(mv, mv)
            if q <= 0.0:
                raise GeometryError("hypersphere vector must be spacelike")
            mv = mv / math.sqrt(q)
        self.mv = mv

    @property
    def algebra(self) -> ConformalAlgebra:
        return self.mv.algebra

    @property
    def is_plane(self) -> bool:
        alg = self.algebra
        return abs(minkowski_inner(self.mv, alg.einf)) <= GEOM_RTOL * self.mv.norm()

    def euclidean(self):
        """('sphere', center, radius) or ('plane', unit normal, offset).

        The sphere readout rescales so the e_0 coefficient is 1/r; the plane
        normal is oriented to make its first significant component positive.
        """
        alg = self.algebra
        v = self.mv.vector_coordinates()
        alpha = v[0] + v[-1]           # e_0 coefficient
        beta = v[0] - v[-1]            # e_inf coefficient
        if self.is_plane:
            normal = v[1:-1].copy()
            nn = np.linalg.norm(normal)
            normal /= nn
            offset = beta / (2.0 * nn)
            lead = normal[np.argmax(np.abs(normal))]
            if lead < 0:
                normal, offset = -normal, -offset
            return ("plane", normal, float(offset))
        center = v[1:-1] / alpha
        radius = 1.0 / abs(alpha)
        return ("sphere", center, float(radius))

    def __repr__(self):
        kind, a, b = self.euclidean()
        return f"Hypersphere({kind}, {np.array2string(a, precision=6)}, {b:.6g})"


def hypersphere(alg: ConformalAlgebra, center, radius: float) -> Hypersphere:
    """Hypersphere with Euclidean center and radius > 0."""
    if radius <= 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    center = np.asarray(center, dtype=np.float64)
    if center.shape != (alg.n,):
        raise GeometryError(f"expected {alg.n} center coordinates")
    coords = np.empty(alg.dimension)
    s = float(center @ center) - radius * radius
    coords[0] = 0.5 * (1.0 + s) / radius
    coords[-1] = 0.5 * (1.0 - s) / radius
    coords[1:-1] = center / radius
    return Hypersphere(alg.vector(coords), validate=False)


def plane(alg: ConformalAlgebra, normal, offset: float) -> Hypersphere:
    """Hyperplane {x . normal = offset} with |normal| = 1."""
    normal = np.asarray(normal, dtype=np.float64)
    nn = np.linalg.norm(normal)
    if abs(nn - 1.0) > 1e-9:
        raise GeometryError("plane normal must be a unit vector")
    coords = np.empty(alg.dimension)
    coords[0] = offset            # 2*offset*e_inf over (f_0, f_{n+1})
    coords[-1] = offset
    coords[1:-1] = normal
    return Hypersphere(alg.vector(coords), validate=False)


def incident_point_sphere(p, s, rtol: float = GEOM_RTOL) -> bool:
    """Point-on-hypersphere incidence, the anti-commutation ps + sp = 0."""
    pm, sm = _point_mv(p), _sphere_mv(s)
    return abs(minkowski_inner(pm, sm)) <= rtol * pm.norm() * sm.norm()


def incident_point_circle(p, c, rtol: float = GEOM_RTOL) -> bool:
    """Point-on-circle incidence for a spacelike grade-2 circle, pc - cp = 0."""
    pm, cm = _point_mv(p), _blade_mv(c)
    if not cm.is_grade(2):
        raise GradeError("circle must be a grade-2 element in this predicate")
    comm = pm * cm - cm * pm
    return comm.max_abs() <= rtol * pm.norm() * cm.norm()


def spheres_orthogonal(s1, s2, rtol: float = GEOM_RTOL) -> bool:
    m1, m2 = _sphere_mv(s1), _sphere_mv(s2)
    return abs(minkowski_inner(m1, m2)) <= rtol * m1.norm() * m2.norm()


def sphere_angle(s1, s2) -> float:
    """Intersection angle of two unit hyperspheres, arccos <s1, s2>."""
    m1, m2 = _sphere_mv(s1), _sphere_mv(s2)
    return math.acos(max(-1.0, min(1.0, minkowski_inner(m1, m2))))


class SphereBlade:
    """Pure blade representing an m-sphere.

    ``representation`` is "spacelike" for grade n-m (intersection of n-m
    hyperspheres, positive Gram determinant) and "timelike" for grade m+2
    (span of m+2 points, negative Gram determinant).  ``dual()`` converts
    between the two.
    """

    __slots__ = ("mv", "grade", "representation", "sphere_dim")

    def __init__(self, mv: Multivector, *, validate: bool = True):
        grades = mv.grades()
        if len(grades) != 1:
            raise GradeError(f"sphere blade must be a single grade, found {grades}")
        g = grades[0]
        if validate and not is_pure_blade(mv, g):
            raise GeometryError(f"grade-{g} element does not factor as a blade")
        n = mv.algebra.n
        norm_sq = lambda_inner(mv, mv)
        if norm_sq > 0:
            representation, m = "spacelike", n - g
        else:
            representation, m = "timelike", g - 2
        if not 0 <= m <= n - 1:
            raise GeometryError(f"grade-{g} {representation} blade is not a sphere in S^{n}")
        self.mv = mv
        self.grade = g
        self.representation = representation
        self.sphere_dim = m

    @property
    def algebra(self) -> ConformalAlgebra:
        return self.mv.algebra

    def norm_squared(self) -> float:
        return lambda_inner(self.mv, self.mv)

    def dual(self) -> "SphereBlade":
        return SphereBlade(dual(self.mv), validate=False)

    def contains(self, p, rtol: float = GEOM_RTOL) -> bool:
        return self.incidence_residual(p) <= rtol

    def incidence_residual(self, p) -> float:
        """Scaled incidence residual of a point (0 when the point lies on the sphere)."""
        pm = _point_mv(p)
        scale = pm.norm() * self.mv.norm()
        if self.representation == "timelike":
            return pm.wedge(self.mv).max_abs() / scale
        contraction = (pm * self.mv).grade(self.grade - 1)
        return contraction.max_abs() / scale

    def __repr__(self):
        return f"SphereBlade(m={self.sphere_dim}, {self.representation}, grade={self.grade})"


def points_wedge(points) -> Multivector:
    """Exterior product of point representatives, in the given order."""
    mvs = [_point_mv(p) for p in points]
    out = mvs[0]
    for m in mvs[1:]:
        out = out.wedge(m)
    return out


def sphere_through(points, rtol: float = GEOM_RTOL) -> SphereBlade:
    """The unique m-sphere through m+2 points in general position.

    Raises DegenerateConfiguration when the points lie on an (m-1)-sphere,
    i.e. when their exterior product vanishes within tolerance.
    """
    points = list(points)
    if len(points) < 2:
        raise GeometryError("need at least two points")
    mvs = [_point_mv(p) for p in points]
    alg = mvs[0].algebra
    if len(points) > alg.dimension:
        raise GeometryError(f"at most {alg.dimension} points can be independent")
    scale = 1.0
    out = mvs[0]
    scale *= mvs[0].norm()
    for m in mvs[1:]:
        out = out.wedge(m)
        scale *= m.norm()
    if out.max_abs() <= rtol * scale:
        raise DegenerateConfiguration(
            f"{len(points)} points lie on a {len(points) - 3}-sphere; wedge vanished"
        )
    return SphereBlade(out, validate=False)


@dataclass(frozen=True)
class CrossRatioValue:
    """Real part and grade-4 magnitude of the cross ratio of four points.

    ``real + 1j * imag`` is the complex cross ratio of the points on the
    2-sphere they span, determined up to complex conjugation; ``imag`` is 0
    exactly when the four points are concircular.
    """

    real: float
    imag: float

    def as_complex(self) -> complex:
        return complex(self.real, self.imag)

    def isclose(self, other: "CrossRatioValue", rtol: float = 1e-9) -> bool:
        scale = max(abs(self.real), abs(self.imag), abs(other.real), abs(other.imag), 1e-300)
        return abs(self.real - other.real) <= rtol * scale and abs(self.imag - other.imag) <= rtol * scale


def cross_ratio(p1, p2, p3, p4, rtol: float = GEOM_RTOL) -> CrossRatioValue:
    """Cross ratio (p1 p2 p3 p4 + p4 p3 p2 p1) / ((p1p4 + p4p1)(p2p3 + p3p2)).

    Independent of the choice of representatives and invariant under versor
    conjugation of all four points.  Raises DegenerateConfiguration when a
    denominator pair coincides (p1 ~ p4 or p2 ~ p3).
    """
    m1, m2, m3, m4 = (_point_mv(p) for p in (p1, p2, p3, p4))
    # scale invariance is exact, so normalize representatives up front; this
    # keeps the quadruple products near unit size and the rounding error flat
    m1, m2, m3, m4 = (m / m.norm() for m in (m1, m2, m3, m4))
    d14 = -2.0 * minkowski_inner(m1, m4)
    d23 = -2.0 * minkowski_inner(m2, m3)
    if abs(d14) <= rtol * m1.norm() * m4.norm() or abs(d23) <= rtol * m2.norm() * m3.norm():
        raise DegenerateConfiguration("cross ratio undefined: a denominator point pair coincides")
    num = m1 * m2 * m3 * m4 + m4 * m3 * m2 * m1
    r = num / (d14 * d23)
    r4 = r.grade(4)
    return CrossRatioValue(r.scalar, math.sqrt(abs(lambda_inner(r4, r4))))


def inversion(p, s) -> ConformalPoint:
    """Image of a point under inversion at a hypersphere, p -> s p s.

    The center class maps to the point at infinity; points on s are fixed.
    """
    pm, sm = _point_mv(p), _sphere_mv(s)
    return ConformalPoint((sm * pm * sm).grade(1), "projective", validate=False)


def _canonical_null(mv: Multivector) -> Multivector:
    coeffs = mv.coeffs
    scale = np.abs(coeffs).max()
    lead = coeffs[np.argmax(np.abs(coeffs) >= 0.5 * scale)]
    out = mv / (mv.norm() if lead >= 0 else -mv.norm())
    return out


def _null_pair_from_span(alg: ConformalAlgebra, span: np.ndarray, tangent_rtol: float):
    """Two null rays of a 2-dimensional vector span, classified by signature."""
    gram = linalg.minkowski_gram(alg, span)
    evals, evecs = np.linalg.eigh(gram)
    lo, hi = evals[0], evals[1]
    scale = max(abs(lo), abs(hi))
    if scale == 0.0 or min(abs(lo), abs(hi)) <= tangent_rtol * scale:
        raise TangentIntersection("the span is degenerate (tangent configuration)")
    if lo > 0 or hi < 0:
        raise DisjointIntersection("the span carries no real null directions")
    # evals lo < 0 < hi: null rays are sqrt(-lo) v_hi +- sqrt(hi) v_lo
    a = span @ (math.sqrt(-lo) * evecs[:, 1])
    b = span @ (math.sqrt(hi) * evecs[:, 0])
    first = _canonical_null(alg.vector(a + b))
    second = _canonical_null(alg.vector(a - b))
    if tuple(first.coeffs) > tuple(second.coeffs):
        first, second = second, first
    return (
        ConformalPoint(first, "projective", validate=False),
        ConformalPoint(second, "projective", validate=False),
    )


def extract_point_pair(blade, tangent_rtol: float = TANGENT_RTOL):
    """The two points spanned by a timelike grade-2 blade.

    Raises DisjointIntersection for spacelike planes (no real null rays) and
    TangentIntersection inside the degenerate band.  The returned pair is in
    a deterministic canonical order.
    """
    mv = _blade_mv(blade)
    if not mv.is_grade(2):
        raise GradeError("point-pair extraction needs a grade-2 blade")
    span = linalg.blade_span(mv)
    if span.shape[1] != 2:
        raise DegenerateConfiguration("element is not a pure grade-2 blade")
    return _null_pair_from_span(mv.algebra, span, tangent_rtol)


def circle_intersect(c1, c2, rtol: float = GEOM_RTOL, tangent_rtol: float = TANGENT_RTOL):
    """Intersection points of two distinct circles lying on one 2-sphere.

    Both circles enter in the timelike grade-3 representation.  Their spans
    must together fill exactly the 4-dimensional span of the common sphere;
    the intersection plane is classified by its signature: two points,
    TangentIntersection, or DisjointIntersection.
    """
    m1, m2 = _blade_mv(c1), _blade_mv(c2)
    if not (m1.is_grade(3) and m2.is_grade(3)):
        raise GradeError("circles must be grade-3 blades (timelike representation)")
    s1, s2 = linalg.blade_span(m1), linalg.blade_span(m2)
    if s1.shape[1] != 3 or s2.shape[1] != 3:
        raise DegenerateConfiguration("input is not a pure circle blade")
    # structural rank decisions tolerate more drift than point predicates;
    # the final incidence check below is the authoritative gate
    union = linalg.span_union_rank(s1, s2, rtol=1e-6)
    if union == 3:
        raise DegenerateConfiguration("the circles coincide")
    if union > 4:
        raise GeometryError("circles do not lie on a common 2-sphere")
    plane2 = linalg.span_intersection(s1, s2, rtol=1e-6)
    if plane2.shape[1] != 2:
        raise DegenerateConfiguration("circle spans intersect degenerately")
    pair = _null_pair_from_span(m1.algebra, plane2, tangent_rtol)
    for pt in pair:
        for circle in (m1, m2):
            if pt.mv.wedge(circle).max_abs() > 1e-6 * pt.mv.norm() * circle.norm():
                raise GeometryError("computed intersection fails incidence check")
    return pair


def versor_from_point_pair(alg: ConformalAlgebra, p, q, rtol: float = GEOM_RTOL) -> Versor:
    """An even unit versor carrying (e_0, e_inf) to the rays of (p, q).

    Used to anchor frame integration at a known point pair.  The two point
    classes must be distinct (<p, q> != 0).
    """
    pm, qm = _point_mv(p), _point_mv(q)
    if abs(minkowski_inner(pm, qm)) <= rtol * pm.norm() * qm.norm():
        raise GeometryError("the two points coincide; no adapted versor exists")
    e0, einf = alg.e0, alg.einf

    def reflection_to(src: Multivector, dst: Multivector, rho: float) -> Multivector:
        # any rho*src' - dst with <src, dst> < 0 after sign fixing is spacelike
        d = minkowski_inner(src, dst)
        dst = -dst if d > 0 else dst
        v = rho * src - dst
        return v / math.sqrt(minkowski_inner(v, v))

    best = None
    for rho in (1.0, 2.0, 0.5, 4.0, 0.25, 8.0, 0.125):
        factors = []
        cur0, curinf = e0, einf
        if projective_distance(cur0, pm) > rtol:
            s1 = reflection_to(cur0, pm, rho / pm.norm() * e0.norm())
            factors.append(s1)
            cur0 = (s1 * cur0 * s1).grade(1)
            curinf = (s1 * curinf * s1).grade(1)
        if projective_distance(curinf, qm) > rtol:
            # move curinf to q while fixing the p ray: reflect in a vector
            # orthogonal to p inside span{curinf, q}
            lam = minkowski_inner(qm, pm)
            mu = minkowski_inner(curinf, pm)
            v = lam * curinf - mu * qm
            vv = minkowski_inner(v, v)
            if vv <= rtol * v.norm() ** 2:
                continue
            if vv < 0:
                continue  # would need a timelike reflection; try another rho
            s2 = v / math.sqrt(vv)
            factors.append(s2)
            cur0 = (s2 * cur0 * s2).grade(1)
            curinf = (s2 * curinf * s2).grade(1)
        if len(factors) % 2 == 1:
            # parity fix: a sphere through both target points acts trivially on them
            comp = linalg.kernel_basis(
                np.stack([pm.vector_coordinates() * alg.vector_metric,
                          qm.vector_coordinates() * alg.vector_metric])
            )
            s3 = alg.vector(comp[:, 0])
            s3 = s3 / math.sqrt(minkowski_inner(s3, s3))
            factors.append(s3)
        mv = alg.scalar(1.0)
        for f in factors:
            mv = mv * f
        cand = Versor(mv)
        err = max(
            projective_distance(cand.apply(e0), pm),
            projective_distance(cand.apply(einf), qm),
        )
        if err <= 1e-9:
            if cand.is_spin:
                return cand
            best = best or cand
    if best is not None:
        return best
    raise GeometryError("failed to construct an adapted versor for the point pair")
