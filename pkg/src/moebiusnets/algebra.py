"""Dense Clifford-algebra kernel for the conformal model of the n-sphere.

The algebra is Cl(n+1, 1), the Clifford algebra of Minkowski space of
dimension n+2.  Internally everything is expressed over an orthonormal
generator basis

    f_0, f_1, ..., f_{n+1}     with    f_0^2 = +1,   f_i^2 = -1  (i >= 1),

so that all product signs live in a precomputed diagonal table.  The
geometry layer works with the pseudo-orthonormal null basis derived from it:

    e_0   = (f_0 + f_{n+1}) / 2            e_0^2 = 0
    e_i   = f_i               (1 <= i <= n)  e_i^2 = -1
    e_inf = (f_0 - f_{n+1}) / 2            e_inf^2 = 0
    e_0 e_inf + e_inf e_0 = 1

Because the change of basis only involves halving, these relations hold
*exactly* in binary floating point.

The Minkowski scalar product on vectors is fixed by ``<u, v> = -(uv + vu)/2``,
which makes ``<e_i, e_i> = 1`` (unit spacelike), ``<f_0, f_0> = -1``
(timelike) and ``<e_0, e_inf> = -1/2``.  Null vectors represent points of the
conformal n-sphere, unit spacelike vectors represent hyperspheres.

Basis blades are indexed by bitmasks over the f-generators (bit b set means
the blade contains f_b); coefficients are stored densely in an array of
length 2^(n+2).  Dimensions 2 <= n <= 8 are supported.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "AlgebraError",
    "GradeError",
    "ConformalAlgebra",
    "Multivector",
    "Versor",
    "conformal_algebra",
    "minkowski_inner",
    "lambda_inner",
    "adjoint_bracket",
    "versor_apply",
    "dual",
    "is_pure_blade",
    "projective_distance",
    "random_multivector",
    "random_unit_spacelike",
    "random_spin_versor",
]

#: Relative tolerance for purity / nullity / scalar-ness tests, applied
#: against the largest coefficient magnitude of the inputs.
PURITY_RTOL = 1e-9

MAX_DIMENSION = 8


class AlgebraError(ValueError):
    """Raised for malformed algebraic input (signature mismatch, bad versor)."""


class GradeError(AlgebraError):
    """Raised when an operand does not have the grade an operation requires."""


def _popcount_table(size: int) -> np.ndarray:
    bits = np.arange(size, dtype=np.uint32)
    counts = np.zeros(size, dtype=np.int64)
    while bits.any():
        counts += bits & 1
        bits >>= 1
    return counts


class ConformalAlgebra:
    """Signature data and product tables for Cl(n+1, 1) with 2 <= n <= 8."""

    def __init__(self, n: int):
        if not isinstance(n, int) or n < 2:
            raise AlgebraError(f"ambient sphere dimension must be an integer >= 2, got {n!r}")
        if n > MAX_DIMENSION:
            raise AlgebraError(f"ambient sphere dimension {n} exceeds the supported maximum {MAX_DIMENSION}")
        self.n = n
        self.dimension = n + 2            # number of generators
        self.size = 1 << self.dimension   # number of basis blades

        N, size = self.dimension, self.size
        idx = np.arange(size, dtype=np.int64)
        pop = _popcount_table(size)
        self.grades = pop.copy()

        # reordering sign: parity of #{(i, j) : i in a, j in b, i > j}
        swaps = np.zeros((size, size), dtype=np.int64)
        shifted = idx.copy()
        for _ in range(N):
            shifted >>= 1
            swaps += pop[shifted[:, None] & idx[None, :]]
        reorder = np.where(swaps & 1, -1, 1).astype(np.int8)

        # metric factor: annihilated generators contribute f_b^2
        # (f_0^2 = +1, all others -1, so only bits above 0 flip the sign)
        common = idx[:, None] & idx[None, :]
        metric = np.where(pop[common & ~np.int64(1)] & 1, -1, 1).astype(np.int8)

        self._gp_sign = (reorder * metric).astype(np.float64)
        self._wedge_sign = np.where(common == 0, reorder, 0).astype(np.float64)
        self._target = (idx[:, None] ^ idx[None, :]).ravel()

        self._reverse_sign = np.where((self.grades * (self.grades - 1) // 2) & 1, -1.0, 1.0)
        # diagonal of the blade scalar product: product of <f_b, f_b> over the
        # blade's generators; only the timelike f_0 contributes -1
        self._lambda_sign = np.where(idx & 1, -1.0, 1.0)
        self.grade_indices = [np.flatnonzero(self.grades == k) for k in range(N + 1)]
        self._offgrade_indices = [np.flatnonzero(self.grades != k) for k in range(N + 1)]

        # dense product operators (one matmul per product) are affordable for
        # the small algebras in actual use; larger ones fall back to bincount
        self._dense = size <= 256
        if self._dense:
            rows = np.arange(size * size)
            self._gp_matrix = np.zeros((size * size, size))
            self._gp_matrix[rows, self._target] = self._gp_sign.ravel()
            self._wedge_matrix = np.zeros((size * size, size))
            self._wedge_matrix[rows, self._target] = self._wedge_sign.ravel()

        self.vector_indices = np.array([1 << b for b in range(N)], dtype=np.int64)
        self.vector_metric = np.array([-1.0] + [1.0] * (N - 1))

        self.e0 = self._make_null(+1.0)
        self.einf = self._make_null(-1.0)
        eps = self.e0 - self.einf          # = f_{n+1}
        for i in range(1, n + 1):
            eps = eps.wedge(self.e(i))
        self.pseudoscalar = eps.wedge(self.e0 + self.einf)

    def _make_null(self, sign: float) -> "Multivector":
        c = np.zeros(self.size)
        c[1] = 0.5
        c[1 << (self.dimension - 1)] = 0.5 * sign
        return Multivector(self, c)

    def __repr__(self):
        return f"ConformalAlgebra(n={self.n})"

    def __eq__(self, other):
        return isinstance(other, ConformalAlgebra) and other.n == self.n

    def __hash__(self):
        return hash(("ConformalAlgebra", self.n))

    # -- constructors --------------------------------------------------------

    def scalar(self, value: float) -> "Multivector":
        c = np.zeros(self.size)
        c[0] = value
        return Multivector(self, c)

    def e(self, i: int) -> "Multivector":
        """Unit spacelike generator e_i, 1 <= i <= n."""
        if not 1 <= i <= self.n:
            raise AlgebraError(f"generator index must be in 1..{self.n}, got {i}")
        c = np.zeros(self.size)
        c[1 << i] = 1.0
        return Multivector(self, c)

    def vector(self, coeffs) -> "Multivector":
        """Grade-1 element from its n+2 coordinates over f_0, ..., f_{n+1}."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.dimension,):
            raise AlgebraError(f"expected {self.dimension} vector coordinates, got shape {coeffs.shape}")
        c = np.zeros(self.size)
        c[self.vector_indices] = coeffs
        return Multivector(self, c)

    def basis_blade(self, mask: int) -> "Multivector":
        c = np.zeros(self.size)
        c[mask] = 1.0
        return Multivector(self, c)

    def from_coefficients(self, coeffs) -> "Multivector":
        coeffs = np.asarray(coeffs, dtype=np.float64)
        if coeffs.shape != (self.size,):
            raise AlgebraError(f"expected {self.size} blade coefficients, got shape {coeffs.shape}")
        return Multivector(self, coeffs.copy())

    # -- low-level products on raw coefficient arrays -------------------------

    def _product(self, a: np.ndarray, b: np.ndarray, sign: np.ndarray) -> np.ndarray:
        weights = (a[:, None] * b[None, :]) * sign
        return np.bincount(self._target, weights=weights.ravel(), minlength=self.size)

    def geometric(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self._dense:
            return (a[:, None] * b).reshape(-1) @ self._gp_matrix
        return self._product(a, b, self._gp_sign)

    def exterior(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self._dense:
            return (a[:, None] * b).reshape(-1) @ self._wedge_matrix
        return self._product(a, b, self._wedge_sign)


@lru_cache(maxsize=None)
def conformal_algebra(n: int) -> ConformalAlgebra:
    """Shared, cached algebra instance for ambient dimension n."""
    return ConformalAlgebra(n)


class Multivector:
    """Immutable element of a conformal Clifford algebra.

    Supports ``a * b`` (geometric product), ``a ^ b`` (exterior product,
    note the low precedence of ``^``), ``~a`` (reversion), scalar ``*``/``/``
    and ``+``/``-``.  Coefficients are read-only.
    """

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: ConformalAlgebra, coeffs: np.ndarray):
        self.algebra = algebra
        coeffs = np.asarray(coeffs, dtype=np.float64)
        coeffs.flags.writeable = False
        self.coeffs = coeffs

    # -- ring structure -------------------------------------------------------

    def _check_same(self, other: "Multivector") -> None:
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraError("operands belong to different algebras")

    def __add__(self, other):
        if isinstance(other, Multivector):
            self._check_same(other)
            return Multivector(self.algebra, self.coeffs + other.coeffs)
        if isinstance(other, (int, float)):
            c = self.coeffs.copy()
            c[0] += other
            return Multivector(self.algebra, c)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Multivector):
            self._check_same(other)
            return Multivector(self.algebra, self.coeffs - other.coeffs)
        if isinstance(other, (int, float)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Multivector(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            self._check_same(other)
            return Multivector(self.algebra, self.algebra.geometric(self.coeffs, other.coeffs))
        if isinstance(other, (int, float)):
            return Multivector(self.algebra, self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.algebra, self.coeffs * other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.algebra, self.coeffs / other)
        return NotImplemented

    def __xor__(self, other):
        if isinstance(other, Multivector):
            return self.wedge(other)
        return NotImplemented

    def __invert__(self):
        return self.reverse()

    def __eq__(self, other):
        return (
            isinstance(other, Multivector)
            and other.algebra == self.algebra
            and np.array_equal(other.coeffs, self.coeffs)
        )

    def __hash__(self):
        return hash((self.algebra, self.coeffs.tobytes()))

    # -- core operations -------------------------------------------------------

    def wedge(self, other: "Multivector") -> "Multivector":
        self._check_same(other)
        return Multivector(self.algebra, self.algebra.exterior(self.coeffs, other.coeffs))

    def reverse(self) -> "Multivector":
        return Multivector(self.algebra, self.coeffs * self.algebra._reverse_sign)

    def grade(self, k: int) -> "Multivector":
        """Projection onto the grade-k component."""
        if not 0 <= k <= self.algebra.dimension:
            raise GradeError(f"grade must be in 0..{self.algebra.dimension}, got {k}")
        c = np.zeros(self.algebra.size)
        idx = self.algebra.grade_indices[k]
        c[idx] = self.coeffs[idx]
        return Multivector(self.algebra, c)

    def grades(self, rtol: float = PURITY_RTOL) -> tuple[int, ...]:
        """Grades carrying coefficients above rtol * max|coeff|."""
        mags = np.abs(self.coeffs)
        scale = float(mags.max())
        if scale == 0.0:
            return ()
        return tuple(
            k
            for k in range(self.algebra.dimension + 1)
            if mags[self.algebra.grade_indices[k]].max(initial=0.0) > rtol * scale
        )

    def is_grade(self, k: int, rtol: float = PURITY_RTOL) -> bool:
        mags = np.abs(self.coeffs)
        off = float(mags[self.algebra._offgrade_indices[k]].max(initial=0.0))
        return off <= rtol * float(mags.max())

    @property
    def scalar(self) -> float:
        return float(self.coeffs[0])

    def norm(self) -> float:
        """Euclidean norm of the coefficient array (a scale, not the metric norm)."""
        return float(np.linalg.norm(self.coeffs))

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max(initial=0.0))

    def vector_coordinates(self) -> np.ndarray:
        """Grade-1 coordinates over f_0, ..., f_{n+1} (other grades ignored)."""
        return self.coeffs[self.algebra.vector_indices].copy()

    def __repr__(self):
        terms = []
        scale = self.max_abs()
        for i in np.flatnonzero(np.abs(self.coeffs) > 1e-12 * max(scale, 1e-300)):
            name = "".join(f"f{b}" for b in range(self.algebra.dimension) if i >> b & 1) or "1"
            terms.append(f"{self.coeffs[i]:+.6g}*{name}")
        body = " ".join(terms) if terms else "0"
        return f"<{body}>"


# -- scalar products ------------------------------------------------------------


def minkowski_inner(u: Multivector, v: Multivector) -> float:
    """Minkowski scalar product of two grade-1 elements, -(uv + vu)/2."""
    if not (u.is_grade(1) and v.is_grade(1)):
        raise GradeError("minkowski_inner requires grade-1 operands")
    u._check_same(v)
    alg = u.algebra
    a = u.coeffs[alg.vector_indices]
    b = v.coeffs[alg.vector_indices]
    return float(np.dot(a * alg.vector_metric, b))


def lambda_inner(a: Multivector, b: Multivector) -> float:
    """Diagonal extension of the scalar product to the whole exterior algebra.

    On a k-blade, ``lambda_inner(s, s)`` equals the Gram determinant
    det(<s_i, s_j>) of its factors; it is positive on spacelike blades and
    negative on timelike ones.
    """
    a._check_same(b)
    return float(np.dot(a.coeffs * a.algebra._lambda_sign, b.coeffs))


# -- named operations -------------------------------------------------------------


def adjoint_bracket(v: Multivector, bivector: Multivector) -> Multivector:
    """Commutator action of a bivector on a vector, v*B - B*v (grade 1).

    A scalar component of B is tolerated (it commutes out), so products of
    two non-orthogonal vectors can be passed directly.
    """
    if not v.is_grade(1):
        raise GradeError("adjoint_bracket requires a grade-1 first operand")
    if not set(bivector.grades()) <= {0, 2}:
        raise GradeError("adjoint_bracket requires a grade-2 second operand")
    return v * bivector - bivector * v


def dual(v: Multivector) -> Multivector:
    """Left multiplication by the pseudoscalar.

    Exchanges the two blade representations of an m-sphere: pure spacelike
    grade-(n-m) blades map to pure timelike grade-(m+2) blades, with
    ``lambda_inner`` of the image equal to minus that of the argument.
    """
    return v.algebra.pseudoscalar * v


def is_pure_blade(a: Multivector, k: int, rtol: float = PURITY_RTOL) -> bool:
    """Whether a grade-k element factors as a wedge of k vectors.

    Grades 0 and 1 are always pure; grade 2 uses the a ^ a = 0 criterion;
    higher grades test the dimension of {v : v ^ a = 0}, which equals k
    exactly for decomposable elements.  Mixed-grade input is rejected.
    """
    if not a.is_grade(k, rtol):
        raise GradeError(f"expected a pure grade-{k} element, found grades {a.grades(rtol)}")
    scale = a.max_abs()
    if scale == 0.0:
        return False
    if k <= 1:
        return True
    if k == 2:
        return a.wedge(a).max_abs() <= rtol * scale * scale
    if k == a.algebra.dimension:
        return True
    alg = a.algebra
    cols = [alg.exterior(alg.basis_blade(1 << b).coeffs, a.coeffs) for b in range(alg.dimension)]
    sv = np.linalg.svd(np.stack(cols, axis=1), compute_uv=False)
    nullity = int(np.sum(sv <= max(rtol * sv[0], 1e-300)))
    return nullity == k


def versor_apply(phi: "Versor | Multivector", x: Multivector) -> Multivector:
    """Sandwich action phi^{-1} x phi."""
    if isinstance(phi, Multivector):
        phi = Versor(phi)
    return phi.apply(x)


class Versor:
    """A (product-of-unit-vectors) element acting by sandwich conjugation.

    ``eta`` caches the scalar reverse(V)*V, which is +1 for even products of
    unit spacelike vectors (the spin group) and -1 for odd ones; the inverse
    is reverse(V)/eta.  Mixed grades or a non-scalar reverse-product are
    rejected.
    """

    __slots__ = ("mv", "parity", "eta")

    def __init__(self, mv: Multivector, rtol: float = PURITY_RTOL):
        grades = mv.grades(rtol)
        if not grades:
            raise AlgebraError("zero element is not a versor")
        if all(g % 2 == 0 for g in grades):
            parity = 0
        elif all(g % 2 == 1 for g in grades):
            parity = 1
        else:
            raise AlgebraError(f"versor must have pure parity, found grades {grades}")
        prod = mv.reverse() * mv
        scale = prod.max_abs()
        if not prod.is_grade(0, rtol):
            raise AlgebraError("reverse(V)*V is not a scalar; not a versor")
        eta = prod.scalar
        if abs(eta) <= rtol * max(scale, 1.0):
            raise AlgebraError("versor is not invertible (norm ~ 0)")
        self.mv = mv
        self.parity = parity
        self.eta = eta

    @classmethod
    def identity(cls, algebra: ConformalAlgebra) -> "Versor":
        return cls(algebra.scalar(1.0))

    @classmethod
    def from_vectors(cls, vectors) -> "Versor":
        vectors = list(vectors)
        if not vectors:
            raise AlgebraError("need at least one vector")
        mv = vectors[0]
        for v in vectors[1:]:
            mv = mv * v
        return cls(mv)

    @property
    def is_even(self) -> bool:
        return self.parity == 0

    @property
    def is_spin(self) -> bool:
        """Even with reverse(V)*V = +1: the double cover of the Moebius group."""
        return self.is_even and abs(self.eta - 1.0) <= 1e-9

    def inverse_mv(self) -> Multivector:
        return self.mv.reverse() / self.eta

    def reverse(self) -> "Versor":
        return Versor(self.mv.reverse())

    def __mul__(self, other):
        if isinstance(other, Versor):
            return Versor(self.mv * other.mv)
        return NotImplemented

    def apply(self, x: Multivector) -> Multivector:
        """phi^{-1} x phi; preserves grades and Minkowski products of vectors."""
        return self.inverse_mv() * x * self.mv

    def __repr__(self):
        kind = "even" if self.is_even else "odd"
        return f"Versor({kind}, eta={self.eta:+.3g}, {self.mv!r})"


# -- projective comparison ---------------------------------------------------------


def projective_distance(a: Multivector, b: Multivector) -> float:
    """Distance between the rays of a and b: min over sign of |a/|a| -+ b/|b||.

    Zero exactly when the elements agree up to scale (and sign); this is the
    comparison used wherever the model is projective.
    """
    na, nb = a.norm(), b.norm()
    if na == 0.0 or nb == 0.0:
        return math.inf
    ca, cb = a.coeffs / na, b.coeffs / nb
    return float(min(np.linalg.norm(ca - cb), np.linalg.norm(ca + cb)))


# -- randomized constructions (testing and demos) -----------------------------------


def random_multivector(alg: ConformalAlgebra, rng: np.random.Generator, scale: float = 1.0) -> Multivector:
    return Multivector(alg, rng.normal(scale=scale, size=alg.size))


def random_unit_spacelike(alg: ConformalAlgebra, rng: np.random.Generator) -> Multivector:
    """Random grade-1 vector with square -1 (a hypersphere vector).

    Nearly-null directions are rejected so that normalization cannot blow up
    coefficients; versors composed from these stay well conditioned.
    """
    while True:
        coords = rng.normal(size=alg.dimension)
        v = alg.vector(coords)
        q = minkowski_inner(v, v)
        if q > 0.1 * float(coords @ coords):
            return v / math.sqrt(q)


def random_spin_versor(alg: ConformalAlgebra, rng: np.random.Generator, factors: int = 4) -> Versor:
    """Random element of the spin group: an even product of unit spacelike vectors."""
    if factors % 2:
        raise AlgebraError("spin versors need an even number of factors")
    return Versor.from_vectors(random_unit_spacelike(alg, rng) for _ in range(factors))
