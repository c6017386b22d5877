"""Shared fixtures and independent numeric oracles for the test suite.

The oracles here never touch the Clifford kernel: cross ratios come from
complex arithmetic after an explicit circumsphere fit and stereographic
projection, inversions from the textbook Euclidean formula.  Expected values
asserted in the tests are computed through these paths.
"""

import math

import numpy as np
import pytest

from moebiusnets import conformal_algebra, random_pair_net


@pytest.fixture(scope="session")
def alg3():
    return conformal_algebra(3)


@pytest.fixture(scope="session")
def alg4():
    return conformal_algebra(4)


@pytest.fixture(scope="session")
def pair_net_2d():
    """Generic (non-Euclidean) Ribaucour pair on a 4x4 lattice."""
    return random_pair_net(2, 3, (4, 4), 5)


@pytest.fixture(scope="session")
def pair_net_3d():
    """Generic (non-Euclidean) Ribaucour pair on a 3x3x3 lattice."""
    return random_pair_net(3, 3, (3, 3, 3), 1)


def euclidean_inversion(x, center, radius):
    """Textbook inversion formula x -> m + r^2 (x - m) / |x - m|^2."""
    x = np.asarray(x, float)
    center = np.asarray(center, float)
    d = x - center
    return center + (radius**2 / float(d @ d)) * d


def line_cross_ratio(z1, z2, z3, z4):
    """(p1-p2)(p3-p4) / ((p2-p3)(p4-p1)) on complex or real coordinates."""
    return (z1 - z2) * (z3 - z4) / ((z2 - z3) * (z4 - z1))


def stereographic_cross_ratio(points):
    """Complex cross ratio of four points of R^n via their common 2-sphere.

    Fits the affine 3-flat and a circumsphere with plain linear algebra,
    projects stereographically from a pole away from the points, and applies
    the line formula.  Defined up to complex conjugation.
    """
    P = np.stack([np.asarray(p, float) for p in points])
    centroid = P.mean(axis=0)
    Q = P - centroid
    _, _, vt = np.linalg.svd(Q, full_matrices=False)
    basis = vt[: min(3, vt.shape[0])]
    if basis.shape[0] < 3:
        basis = np.vstack([basis, np.zeros((3 - basis.shape[0], P.shape[1]))])
    X = Q @ basis.T

    A = np.hstack([2.0 * X, np.ones((4, 1))])
    b = (X**2).sum(axis=1)
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    center, d = sol[:3], -sol[3]
    radius = math.sqrt(float(center @ center) - d)
    Y = (X - center) / radius

    candidates = [sign * np.eye(3)[k] for k in range(3) for sign in (1.0, -1.0)]
    s = Y.sum(axis=0)
    if np.linalg.norm(s) > 1e-9:
        candidates.append(-s / np.linalg.norm(s))
    pole = max(candidates, key=lambda p: min(np.linalg.norm(Y - p, axis=1)))

    u = np.eye(3)[int(np.argmin(np.abs(pole)))]
    u = u - (u @ pole) * pole
    u /= np.linalg.norm(u)
    v = np.cross(pole, u)
    w = []
    for y in Y:
        denom = 1.0 - float(y @ pole)
        w.append(complex(float(y @ u), float(y @ v)) / denom)
    return line_cross_ratio(*w)
