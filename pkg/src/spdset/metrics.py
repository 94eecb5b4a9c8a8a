"""Dissimilarity measures between SPD matrices.

All four measures return the square root of the quantity usually written
as a squared distance, so that they can be swapped freely in nearest
neighbour ranking. Pass ``squared=True`` to get the squared value.
"""

from enum import Enum

import numpy as np

from .exceptions import DimMismatch, NumericalError
from .spd import check_spd, spd_log, spd_power, sym_eig

# negative squared divergences smaller than this (relative) are rounding noise
NEGATIVE_SLACK = 1e-10


class MetricKind(str, Enum):
    AIRM = "airm"
    STEIN = "stein"
    JEFFREY = "jeffrey"
    LEM = "lem"


def _pair(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise DimMismatch(f"shapes differ: {X.shape} vs {Y.shape}")
    return check_spd(X), check_spd(Y)


def _root(d2, scale, squared):
    if d2 < 0:
        if -d2 > NEGATIVE_SLACK * max(1.0, scale):
            raise NumericalError(f"squared divergence is negative ({d2:.3e})")
        d2 = 0.0
    return d2 if squared else np.sqrt(d2)


def _logdet(X):
    return float(np.sum(np.log(sym_eig(X).values)))


def airm_dist(X, Y, squared=False):
    """Affine-invariant geodesic distance ``||log(X^-1/2 Y X^-1/2)||_F``."""
    X, Y = _pair(X, Y)
    P = spd_power(X, -0.5)
    w = sym_eig(P @ Y @ P).values
    if np.any(w <= 0):
        raise NumericalError("congruence lost positive definiteness")
    return _root(float(np.sum(np.log(w) ** 2)), 0.0, squared)


def stein_div(X, Y, squared=False):
    """Stein (S-) divergence: ``log det((X+Y)/2) - log det(XY) / 2``."""
    X, Y = _pair(X, Y)
    a = _logdet(0.5 * (X + Y))
    b = 0.5 * (_logdet(X) + _logdet(Y))
    return _root(a - b, abs(a) + abs(b), squared)


def _trace_solve(X, Y):
    # Tr(X^-1 Y) through the spectral factorisation of X
    w, U = sym_eig(X)
    return float(np.sum(np.einsum("ji,jk,ki->i", U, Y, U) / w))


def jeffrey_div(X, Y, squared=False):
    """Jeffrey (J-) divergence: ``Tr(X^-1 Y)/2 + Tr(Y^-1 X)/2 - n``."""
    X, Y = _pair(X, Y)
    n = X.shape[-1]
    t = 0.5 * _trace_solve(X, Y) + 0.5 * _trace_solve(Y, X)
    return _root(t - n, t + n, squared)


def lem_dist(X, Y, squared=False):
    """Log-Euclidean distance ``||log X - log Y||_F``."""
    X, Y = _pair(X, Y)
    d2 = float(np.sum((spd_log(X) - spd_log(Y)) ** 2))
    return d2 if squared else np.sqrt(d2)


_METRICS = {
    MetricKind.AIRM: airm_dist,
    MetricKind.STEIN: stein_div,
    MetricKind.JEFFREY: jeffrey_div,
    MetricKind.LEM: lem_dist,
}


def distance(X, Y, metric="airm", squared=False):
    return _METRICS[MetricKind(metric)](X, Y, squared=squared)


class _Prepared:
    """Per-matrix quantities reused when one matrix meets many others."""

    def __init__(self, X):
        w, U = sym_eig(X)
        if w[-1] <= 0:
            raise NumericalError("matrix is not positive definite")
        self.X = X
        self.w = w
        self.U = U
        self.logdet = float(np.sum(np.log(w)))
        self.log = (U * np.log(w)) @ U.T
        self.inv_sqrt = (U * w ** -0.5) @ U.T
        self.inv = (U / w) @ U.T


def pairwise_distances(A, B, metric="airm", squared=False):
    """Distance matrix between two stacks of SPD matrices.

    Equivalent to calling :func:`distance` on every pair, but each matrix is
    factorised only once.
    """
    metric = MetricKind(metric)
    A = check_spd(A)
    B = check_spd(B)
    if A.shape[1:] != B.shape[1:]:
        raise DimMismatch(f"matrix shapes differ: {A.shape[1:]} vs {B.shape[1:]}")
    pa = [_Prepared(x) for x in A]
    pb = pa if B is A else [_Prepared(x) for x in B]
    n = A.shape[-1]
    D = np.empty((len(pa), len(pb)))
    for i, p in enumerate(pa):
        for j, q in enumerate(pb):
            if metric is MetricKind.LEM:
                d2, scale = float(np.sum((p.log - q.log) ** 2)), 0.0
            elif metric is MetricKind.AIRM:
                w = np.linalg.eigvalsh(p.inv_sqrt @ q.X @ p.inv_sqrt)
                if np.any(w <= 0):
                    raise NumericalError("congruence lost positive definiteness")
                d2, scale = float(np.sum(np.log(w) ** 2)), 0.0
            elif metric is MetricKind.STEIN:
                a = float(np.sum(np.log(np.linalg.eigvalsh(0.5 * (p.X + q.X)))))
                b = 0.5 * (p.logdet + q.logdet)
                d2, scale = a - b, abs(a) + abs(b)
            else:
                t = 0.5 * float(np.sum(p.inv * q.X)) + 0.5 * float(np.sum(q.inv * p.X))
                d2, scale = t - n, t + n
            D[i, j] = _root(d2, scale, squared)
    return D
