"""Integer-lattice nets, spin frames and discrete Ribaucour-pair machinery.

A frame field ``Phi`` on a box in Z^m propagates along an edge in direction j
by left multiplication with ``e_j s_j``, where ``s_j`` is a unit spacelike
transition vector attached to the edge.  The two induced nets are

    F = Phi^{-1} e_0 Phi        and        Fhat = Phi^{-1} e_inf Phi,

and every edge carries the sphere ``S_j = Phi(t)^{-1} e_j Phi(t + t_j)``
which exchanges the endpoints of both nets by inversion.  Face-wise
integrability is expressed by two equivalent Maurer-Cartan conditions, one on
the transition vectors and one on the edge spheres; the latter also forces
the four spheres of a face to be linearly dependent in pairs (collinear as
points of projective space).

Edges are keyed by (base vertex, axis); the symmetric dependence of the edge
sphere on its endpoints is asserted, not encoded in the key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Optional

import numpy as np

from .algebra import (
    GradeError,
    Multivector,
    Versor,
    minkowski_inner,
    projective_distance,
)
from .moebius import (
    GEOM_RTOL,
    ConformalPoint,
    GeometryError,
    SphereBlade,
    _point_mv,
    versor_from_point_pair,
)
from . import linalg

__all__ = [
    "Lattice",
    "EdgeVectorField",
    "FrameField",
    "PairNet",
    "DegenerateEdge",
    "ConsistencyError",
    "propagate_frame",
    "frames_from_transitions",
    "nets_from_frames",
    "edge_sphere",
    "transition_vector",
    "mc_residual_face",
    "mc_residual_spheres",
    "face_sphere_rank",
    "edge_cross_ratio_closed_form",
    "face_cross_ratio_closed_form",
    "cell_sphere_check",
    "ribaucour_congruence",
    "recover_edge_sphere",
    "recover_edge_spheres",
    "frame_from_edge_spheres",
    "reconstruct_pair_net",
]

#: Projective distance below which an edge of a net counts as degenerate.
DEGENERATE_EDGE_TOL = 1e-9


class DegenerateEdge(GeometryError):
    """An edge whose closed-form cross ratio is undefined (a net is fixed)."""


class ConsistencyError(GeometryError):
    """Face- or edge-level integrability failure; carries the offending key."""

    def __init__(self, message: str, key=None):
        super().__init__(message if key is None else f"{message} at {key}")
        self.key = key


class Lattice:
    """Index bookkeeping for a box [0, N_1) x ... x [0, N_m) in Z^m."""

    def __init__(self, extents):
        extents = tuple(int(e) for e in extents)
        if not extents or any(e < 1 for e in extents):
            raise ValueError(f"extents must be positive, got {extents}")
        self.extents = extents
        self.dim = len(extents)

    def __repr__(self):
        return f"Lattice{self.extents}"

    def contains(self, t) -> bool:
        return len(t) == self.dim and all(0 <= ti < ei for ti, ei in zip(t, self.extents))

    def shift(self, t, axis: int, step: int = 1):
        out = list(t)
        out[axis] += step
        return tuple(out)

    def vertices(self) -> Iterator[tuple]:
        """All multi-indices in lexicographic order."""
        return iter(np.ndindex(*self.extents))

    def edges(self) -> Iterator[tuple]:
        """(base vertex, axis) for every edge, lexicographic."""
        for t in self.vertices():
            for j in range(self.dim):
                if t[j] + 1 < self.extents[j]:
                    yield (t, j)

    def faces(self) -> Iterator[tuple]:
        """(base vertex, axis i, axis j) with i < j, lexicographic."""
        for t in self.vertices():
            for i, j in combinations(range(self.dim), 2):
                if t[i] + 1 < self.extents[i] and t[j] + 1 < self.extents[j]:
                    yield (t, i, j)

    def cells(self, k: int) -> Iterator[tuple]:
        """(base vertex, axes) for every elementary k-cell."""
        if not 1 <= k <= self.dim:
            return
        for t in self.vertices():
            for axes in combinations(range(self.dim), k):
                if all(t[a] + 1 < self.extents[a] for a in axes):
                    yield (t, axes)

    def cell_vertices(self, base, axes) -> list[tuple]:
        out = []
        for corner in np.ndindex(*(2,) * len(axes)):
            t = list(base)
            for a, da in zip(axes, corner):
                t[a] += da
            out.append(tuple(t))
        return out

    def vertex_count(self) -> int:
        return int(np.prod(self.extents))


class EdgeVectorField:
    """Unit grade-1 vectors attached to lattice edges (transitions or spheres)."""

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        self.data: dict[tuple, Multivector] = {}

    def __setitem__(self, key, value: Multivector):
        t, axis = key
        if not value.is_grade(1):
            raise GradeError("edge vectors must be grade 1")
        q = minkowski_inner(value, value)
        if abs(q - 1.0) > 1e-7:
            raise GeometryError(f"edge vector at {key} is not unit (square {-q:.3g})")
        self.data[(tuple(t), axis)] = value

    def __getitem__(self, key) -> Multivector:
        t, axis = key
        return self.data[(tuple(t), axis)]

    def __contains__(self, key) -> bool:
        t, axis = key
        return (tuple(t), axis) in self.data

    def __len__(self):
        return len(self.data)


class FrameField:
    """Even unit versors attached to lattice vertices."""

    def __init__(self, lattice: Lattice):
        self.lattice = lattice
        self.data: dict[tuple, Versor] = {}

    def __setitem__(self, t, phi: Versor):
        if not phi.is_even:
            raise GeometryError(f"frame at {t} must be an even versor")
        if abs(phi.eta - 1.0) > 1e-7:
            raise GeometryError(f"frame at {t} is not unit (reverse-product {phi.eta:.3g})")
        self.data[tuple(t)] = phi

    def __getitem__(self, t) -> Versor:
        return self.data[tuple(t)]

    def __contains__(self, t) -> bool:
        return tuple(t) in self.data

    def __len__(self):
        return len(self.data)


@dataclass
class PairNet:
    """A pair of point nets with optional frames and per-edge vector data.

    In Euclidean mode the companion net is the constant infinity class and
    every edge sphere is a plane.
    """

    lattice: Lattice
    f: dict
    fhat: dict
    frames: Optional[FrameField] = None
    edge_spheres: Optional[EdgeVectorField] = None
    transitions: Optional[EdgeVectorField] = None
    euclidean: bool = False

    @property
    def algebra(self):
        return next(iter(self.f.values())).mv.algebra

    def point(self, t) -> ConformalPoint:
        return self.f[tuple(t)]

    def hat_point(self, t) -> ConformalPoint:
        return self.fhat[tuple(t)]

    def face_points(self, base, i, j, net="f") -> list[ConformalPoint]:
        store = self.f if net == "f" else self.fhat
        lat = self.lattice
        return [
            store[tuple(base)],
            store[lat.shift(base, i)],
            store[lat.shift(lat.shift(base, i), j)],
            store[lat.shift(base, j)],
        ]


# -- frame propagation and derived data --------------------------------------------


def propagate_frame(phi: Versor, s: Multivector, axis: int) -> Versor:
    """One step of the discrete frame equation: Phi -> e_axis * s * Phi."""
    alg = phi.mv.algebra
    if not s.is_grade(1):
        raise GradeError("transition vector must be grade 1")
    if abs(minkowski_inner(s, s) - 1.0) > 1e-9:
        raise GeometryError("transition vector must be unit spacelike")
    return Versor(alg.e(axis + 1) * s * phi.mv)


def frames_from_transitions(
    lattice: Lattice,
    transitions: EdgeVectorField,
    phi_origin: Versor,
    mc_rtol: float = 1e-9,
) -> FrameField:
    """Integrate the frame equation over the whole box.

    The transition field must satisfy the face-wise Maurer-Cartan condition;
    every face is checked and a ConsistencyError names the first failure.
    """
    for base, i, j in lattice.faces():
        r = mc_residual_face(
            i,
            j,
            transitions[base, i],
            transitions[base, j],
            transitions[lattice.shift(base, j), i],
            transitions[lattice.shift(base, i), j],
        )
        if r > mc_rtol:
            raise ConsistencyError(f"transition field violates integrability (residual {r:.3g})", (base, i, j))
    frames = FrameField(lattice)
    frames[(0,) * lattice.dim] = phi_origin
    for t in lattice.vertices():
        if t in frames:
            continue
        j = next(a for a in range(lattice.dim) if t[a] > 0)
        prev = lattice.shift(t, j, -1)
        frames[t] = propagate_frame(frames[prev], transitions[prev, j], j)
    return frames


def nets_from_frames(frames: FrameField) -> PairNet:
    """Both point nets, edge spheres and transitions induced by a frame field."""
    lattice = frames.lattice
    alg = frames[(0,) * lattice.dim].mv.algebra
    f, fhat = {}, {}
    for t in lattice.vertices():
        phi = frames[t]
        f[t] = ConformalPoint(phi.apply(alg.e0).grade(1), "projective", validate=False)
        fhat[t] = ConformalPoint(phi.apply(alg.einf).grade(1), "projective", validate=False)
    spheres = EdgeVectorField(lattice)
    trans = EdgeVectorField(lattice)
    for t, j in lattice.edges():
        nxt = lattice.shift(t, j)
        spheres[t, j] = edge_sphere(frames[t], frames[nxt], j)
        trans[t, j] = transition_vector(frames[t], frames[nxt], j)
    euclidean = all(
        projective_distance(p.mv, alg.einf) <= 1e-9 for p in fhat.values()
    )
    return PairNet(lattice, f, fhat, frames, spheres, trans, euclidean)


def edge_sphere(phi_t: Versor, phi_next: Versor, axis: int, rtol: float = 1e-9) -> Multivector:
    """The inversion sphere of an edge, Phi(t)^{-1} e_j Phi(t + t_j).

    The two orderings of the product must agree (they do exactly when the
    frames are related by the frame equation along the edge); their residual
    above tolerance raises.
    """
    alg = phi_t.mv.algebra
    ej = alg.e(axis + 1)
    s_forward = phi_t.inverse_mv() * ej * phi_next.mv
    s_backward = phi_next.inverse_mv() * ej * phi_t.mv
    if (s_forward - s_backward).max_abs() > rtol:
        raise ConsistencyError(
            f"frames are not edge-related; ordering residual {(s_forward - s_backward).max_abs():.3g}"
        )
    s = s_forward.grade(1)
    if (s_forward - s).max_abs() > rtol:
        raise ConsistencyError("edge sphere is not grade 1; frames are not edge-related")
    return s


def transition_vector(phi_t: Versor, phi_next: Versor, axis: int, rtol: float = 1e-9) -> Multivector:
    """The transition vector s with Phi(t + t_j) = e_j s Phi(t)."""
    alg = phi_t.mv.algebra
    s = -1 * (alg.e(axis + 1) * (phi_next.mv * phi_t.inverse_mv()))
    s1 = s.grade(1)
    if (s - s1).max_abs() > rtol:
        raise ConsistencyError("frames are not related by a grade-1 transition along this edge")
    return s1


# -- integrability residuals ---------------------------------------------------------


def mc_residual_face(
    i: int,
    j: int,
    s_i: Multivector,
    s_j: Multivector,
    s_i_shifted: Multivector,
    s_j_shifted: Multivector,
) -> float:
    """Integrability residual of a face in terms of transition vectors.

    Zero exactly when propagating i-then-j equals j-then-i across the face:
    e_j s_j(t+t_i+..) e_i s_i(t+..) = e_i s_i(t+t_j+..) e_j s_j(t+..).
    """
    alg = s_i.algebra
    ei, ej = alg.e(i + 1), alg.e(j + 1)
    lhs = ej * s_j_shifted * ei * s_i
    rhs = ei * s_i_shifted * ej * s_j
    return (lhs - rhs).max_abs()


def mc_residual_spheres(
    s_i: Multivector,
    s_j_shifted: Multivector,
    s_j: Multivector,
    s_i_shifted: Multivector,
) -> float:
    """Integrability residual of a face in terms of edge spheres.

    Zero exactly when a frame generating the four spheres exists:
    S_i(t+..) S_j(t+t_i+..) + S_j(t+..) S_i(t+t_j+..) = 0.  The condition is
    sign-sensitive; flipping a single sphere breaks it.
    """
    return (s_i * s_j_shifted + s_j * s_i_shifted).max_abs()


def face_sphere_rank(spheres, rtol: float = 1e-7) -> int:
    """Numerical rank of the span of a face's edge spheres.

    Integrable faces are rank 2: the four spheres share a codimension-2
    sphere, so they are collinear as points of projective space.
    """
    m = np.stack([s.vector_coordinates() for s in spheres], axis=1)
    return linalg.numerical_rank(m, rtol)


# -- closed-form cross ratios ---------------------------------------------------------


def edge_cross_ratio_closed_form(s: Multivector, rtol: float = GEOM_RTOL) -> float:
    """Cross ratio of (Fhat, F, F_next, Fhat_next) along an edge from its transition.

    Equals -1 / (4 <e_0, s> <e_inf, s>); the constant is pinned by direct
    evaluation of the cross ratio (see the test suite).  Either vanishing
    product means the corresponding net does not move along the edge, which
    is reported as DegenerateEdge rather than a value.
    """
    alg = s.algebra
    a = minkowski_inner(alg.e0, s)
    b = minkowski_inner(alg.einf, s)
    if abs(a) <= rtol or abs(b) <= rtol:
        raise DegenerateEdge(
            f"edge transition fixes a net (<e_0,s>={a:.3g}, <e_inf,s>={b:.3g})"
        )
    return -1.0 / (4.0 * a * b)


def face_cross_ratio_closed_form(
    s_i: Multivector,
    s_i_shifted: Multivector,
    s_j: Multivector,
    s_j_shifted: Multivector,
    rtol: float = GEOM_RTOL,
) -> float:
    """Cross ratio of a face of F from its four transition vectors.

    - <e_0, s_i> <e_0, s_i(t+t_j+..)> / (<e_0, s_j> <e_0, s_j(t+t_i+..)>),
    valid on integrable faces.
    """
    alg = s_i.algebra
    e0 = alg.e0
    num = minkowski_inner(e0, s_i) * minkowski_inner(e0, s_i_shifted)
    den = minkowski_inner(e0, s_j) * minkowski_inner(e0, s_j_shifted)
    if abs(den) <= rtol**2:
        raise DegenerateEdge("face cross ratio undefined: denominator transitions fix F")
    return -num / den


# -- cell lemmas -----------------------------------------------------------------------


def _greedy_sphere_blade(points, count: int, rtol: float = GEOM_RTOL):
    """Wedge of ``count`` points chosen greedily for numerical independence.

    Representatives are normalized and each step takes the candidate that
    keeps the wedge largest, so clustered or wildly scaled inputs only fail
    when the configuration is genuinely degenerate.
    """
    remaining = [(_point_mv(p) / _point_mv(p).norm()) for p in points]
    blade = None
    prev_size = 1.0
    for _ in range(count):
        best_idx, best_trial, best_size = -1, None, 0.0
        for idx, mv in enumerate(remaining):
            trial = mv if blade is None else blade.wedge(mv)
            size = trial.max_abs()
            if size > best_size:
                best_idx, best_trial, best_size = idx, trial, size
        # gate relative to the previous step: clustered configurations shrink
        # geometrically at every step, only true degeneracy falls off a cliff
        if best_trial is None or best_size <= rtol * prev_size:
            raise GeometryError(f"fewer than {count} points in general position in this cell")
        blade, prev_size = best_trial, best_size
        remaining.pop(best_idx)
    return blade


def cell_sphere_check(net: PairNet, base, axes, which: str = "f", rtol: float = GEOM_RTOL) -> float:
    """Max scaled incidence residual of a cell against its spanned sphere.

    An elementary k-cell of one net lies on a (k-1)-sphere (k+1 spanning
    points); the two corresponding k-cells of a pair lie together on a
    k-sphere (k+2 spanning points).  Returns the worst residual over the
    cell's remaining vertices.
    """
    k = len(axes)
    verts = net.lattice.cell_vertices(base, axes)
    if which == "f":
        points = [net.f[t] for t in verts]
        count = k + 1
    elif which == "fhat":
        points = [net.fhat[t] for t in verts]
        count = k + 1
    elif which == "pair":
        if k >= net.algebra.n:
            return 0.0  # an n-sphere in S^n is the whole space; nothing to check
        if net.euclidean:
            # the companion cell collapses to the single infinity point
            points = [net.f[t] for t in verts] + [net.fhat[verts[0]]]
        else:
            points = [net.f[t] for t in verts] + [net.fhat[t] for t in verts]
        count = k + 2
    else:
        raise ValueError(f"unknown net selector {which!r}")
    blade = SphereBlade(_greedy_sphere_blade(points, count, rtol), validate=False)
    return max(blade.incidence_residual(p) for p in points)


def ribaucour_congruence(net: PairNet, base) -> SphereBlade:
    """Congruence sphere of an elementary m-cell: Phi^{-1} e_0^s_1^...^s_m^e_inf Phi.

    Defined for m < n; the resulting timelike (m+2)-blade passes through all
    vertices of the two corresponding m-cells.
    """
    lattice = net.lattice
    alg = net.algebra
    m = lattice.dim
    if m >= alg.n:
        raise GeometryError(f"congruence spheres need cell dimension {m} < ambient {alg.n}")
    if net.frames is None or net.transitions is None:
        raise GeometryError("congruence spheres need frames and transition vectors")
    base = tuple(base)
    blade = alg.e0
    for j in range(m):
        blade = blade.wedge(net.transitions[base, j])
    blade = blade.wedge(alg.einf)
    phi = net.frames[base]
    return SphereBlade(phi.apply(blade), validate=False)


# -- reconstruction ---------------------------------------------------------------------


def _canonical_sign(mv: Multivector) -> Multivector:
    coeffs = mv.coeffs
    scale = np.abs(coeffs).max()
    lead = coeffs[int(np.argmax(np.abs(coeffs) >= 0.5 * scale))]
    return -mv if lead < 0 else mv


def recover_edge_sphere(fa, fb, fhat_a, fhat_b, rtol: float = GEOM_RTOL) -> Multivector:
    """The inversion sphere swapping (fa, fb) and (fhat_a, fhat_b), up to sign.

    For non-degenerate edges the sphere spans the intersection of the two
    chords span{fa, fb} and span{fhat_a, fhat_b}; if one pair degenerates the
    sphere is the member of the other chord orthogonal to the fixed point.
    Raises when the four points are not concircular, when the exchanged pairs
    separate each other on their circle (no real sphere), or when both edges
    degenerate.  The returned representative has a canonical sign.
    """
    ma, mb = _point_mv(fa), _point_mv(fb)
    ha, hb = _point_mv(fhat_a), _point_mv(fhat_b)
    ma, mb, ha, hb = (x / x.norm() for x in (ma, mb, ha, hb))
    alg = ma.algebra
    f_deg = projective_distance(ma, mb) <= DEGENERATE_EDGE_TOL
    h_deg = projective_distance(ha, hb) <= DEGENERATE_EDGE_TOL
    if f_deg and h_deg:
        raise DegenerateEdge("both nets are stationary along this edge; sphere undetermined")

    def swap_residual(v):
        vv = minkowski_inner(v, v)
        if not vv > 0:
            return math.inf, None
        s = v / math.sqrt(vv)
        return (
            max(
                projective_distance((s * src * s).grade(1), dst)
                for src, dst in ((ma, mb), (ha, hb))
            ),
            s,
        )

    candidates = []
    if f_deg or h_deg:
        pa, pb = (ha, hb) if f_deg else (ma, mb)
        fixed = ma if f_deg else ha
        candidates.append(minkowski_inner(pb, fixed) * pa - minkowski_inner(pa, fixed) * pb)
    else:
        # closed-form intersection ratio of the two chords: S = rho*pa - pb lies
        # in span{qa, qb}; this stays stable when the chords nearly coincide,
        # where a least-squares subspace intersection loses its direction
        def chord_ratio(pa, pb, qa, qb):
            al = minkowski_inner(qa, pa)
            be = minkowski_inner(qa, pb)
            ap = minkowski_inner(qb, pa)
            bp = minkowski_inner(qb, pb)
            ga = minkowski_inner(pa, pb)
            de = minkowski_inner(qa, qb)
            core = bp * al - ap * be
            num = be * (core + ga * de)
            den = al * (core - ga * de)
            if abs(den) <= 1e-300:
                return None
            return num / den

        for pa, pb, qa, qb in ((ma, mb, ha, hb), (ha, hb, ma, mb)):
            rho = chord_ratio(pa, pb, qa, qb)
            if rho is not None:
                candidates.append(rho * pa - pb)
        span_f = np.stack([ma.vector_coordinates(), mb.vector_coordinates()], axis=1)
        span_h = np.stack([ha.vector_coordinates(), hb.vector_coordinates()], axis=1)
        _, sv, vt = np.linalg.svd(np.hstack([span_f, -span_h]))
        if sv[-1] > 1e-6 * sv[0]:
            raise GeometryError("the four edge points are not concircular; no common sphere")
        candidates.append(alg.vector(span_f @ vt[-1][:2]))

    best_res, best_s = math.inf, None
    for v in candidates:
        res, s = swap_residual(v)
        if res < best_res:
            best_res, best_s = res, s
    if best_s is None:
        raise GeometryError("edge point pairs separate on their circle; no real inversion sphere")
    if best_res > 1e-6:
        raise GeometryError(
            f"recovered sphere fails to exchange the edge points (residual {best_res:.3g})"
        )
    return _canonical_sign(best_s)


def recover_edge_spheres(net: PairNet, rtol: float = GEOM_RTOL) -> EdgeVectorField:
    """Per-edge inversion spheres of a pair net, with an axis-continuity gauge.

    Signs are chosen so that consecutive spheres along each axis have a
    non-negative product; remaining ambiguity is resolved during frame
    integration.
    """
    lattice = net.lattice
    out = EdgeVectorField(lattice)
    for t, j in lattice.edges():
        nxt = lattice.shift(t, j)
        s = recover_edge_sphere(net.f[t], net.f[nxt], net.fhat[t], net.fhat[nxt], rtol)
        prev_key = (lattice.shift(t, j, -1), j)
        if t[j] > 0 and prev_key in out:
            if minkowski_inner(s, out[prev_key]) < 0:
                s = -1 * s
        out[t, j] = s
    return out


def frame_from_edge_spheres(
    lattice: Lattice,
    spheres: EdgeVectorField,
    phi_origin: Versor,
    *,
    fix_signs: bool = False,
    mc_rtol: float = 1e-8,
):
    """Integrate a frame field from edge spheres, Phi(t+t_j) = -e_j Phi(t) S_j.

    In the strict mode the sphere signs must already satisfy the sphere-level
    Maurer-Cartan condition on every face (checked first; ConsistencyError
    names the first bad face) and the integrated frames reproduce every
    sphere exactly.  With ``fix_signs`` the input is accepted up to per-edge
    sign and the canonical (frame-derived) spheres are returned alongside the
    frames; inconsistency beyond sign still raises.
    """
    if not fix_signs:
        for base, i, j in lattice.faces():
            r = mc_residual_spheres(
                spheres[base, i],
                spheres[lattice.shift(base, i), j],
                spheres[base, j],
                spheres[lattice.shift(base, j), i],
            )
            if r > mc_rtol:
                raise ConsistencyError(f"edge spheres violate integrability (residual {r:.3g})", (base, i, j))

    alg = phi_origin.mv.algebra
    frames = FrameField(lattice)
    frames[(0,) * lattice.dim] = phi_origin
    for t in lattice.vertices():
        if t in frames:
            continue
        j = next(a for a in range(lattice.dim) if t[a] > 0)
        prev = lattice.shift(t, j, -1)
        frames[t] = Versor(-1 * (alg.e(j + 1) * frames[prev].mv * spheres[prev, j]))

    corrected = EdgeVectorField(lattice)
    for t, j in lattice.edges():
        nxt = lattice.shift(t, j)
        derived = edge_sphere(frames[t], frames[nxt], j, rtol=mc_rtol)
        given = spheres[t, j]
        match = (derived - given).max_abs()
        flipped = (derived + given).max_abs()
        if fix_signs:
            if min(match, flipped) > mc_rtol * 10:
                raise ConsistencyError(
                    f"sphere field is not integrable even up to sign (residual {min(match, flipped):.3g})",
                    (t, j),
                )
            corrected[t, j] = derived
        elif match > mc_rtol * 10:
            raise ConsistencyError(f"integrated frames do not reproduce the sphere (residual {match:.3g})", (t, j))
    if fix_signs:
        return frames, corrected
    return frames


def reconstruct_pair_net(net: PairNet, phi_origin: Optional[Versor] = None) -> PairNet:
    """Close the loop nets -> edge spheres -> frames -> nets.

    With an anchor versor adapted to the initial point pair (constructed
    automatically when not supplied) the reconstructed nets agree with the
    input projectively at every vertex.
    """
    lattice = net.lattice
    origin = (0,) * lattice.dim
    if phi_origin is None:
        phi_origin = versor_from_point_pair(net.algebra, net.f[origin].mv, net.fhat[origin].mv)
    spheres = recover_edge_spheres(net)
    frames, _ = frame_from_edge_spheres(lattice, spheres, phi_origin, fix_signs=True)
    return nets_from_frames(frames)
