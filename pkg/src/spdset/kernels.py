"""Kernels on SPD matrices evaluated in the matrix-logarithm domain."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimMismatch, InvalidInput, InvalidSpec, NumericalError
from .spd import as_symmetric, double_center, spd_log

MAX_ORDER = 3
# a log-norm at or below this is treated as zero (the argument is the identity)
ZERO_NORM = 1e-12
# tolerated overshoot of |cos(theta)| beyond 1 before clamping
COSINE_SLACK = 1e-9

FAMILIES = ("loge-linear", "loge-arc", "loge-pol", "loge-exp", "loge-gau")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its order / hyperparameters.

    ``order`` is only used by ``loge-arc``. ``params`` may hold ``gamma``,
    ``coef0`` and ``degree`` for the polynomial, exponential and Gaussian
    variants.
    """

    family: str = "loge-arc"
    order: int = 0
    params: dict = field(default_factory=dict)
    max_order: int = MAX_ORDER

    def __post_init__(self):
        family = self.family.lower().replace("_", "-").replace(".", "-")
        object.__setattr__(self, "family", family)
        if family not in FAMILIES:
            raise InvalidSpec(f"unknown kernel family {self.family!r}")
        if family == "loge-arc" and not 0 <= self.order <= self.max_order:
            raise InvalidSpec(f"arc-cosine order must be in 0..{self.max_order}")
        gamma = self.params.get("gamma")
        if gamma is not None and not gamma > 0:
            raise InvalidSpec("gamma must be positive")
        degree = self.params.get("degree", 2)
        if int(degree) != degree or degree < 1:
            raise InvalidSpec("degree must be a positive integer")


def angular_j(r, theta):
    """Angular dependence function of the order-``r`` arc-cosine kernel.

    Closed forms of ``(-1)^r sin^(2r+1) t ((1/sin t) d/dt)^r ((pi - t)/sin t)``::

        J0 = pi - t
        J1 = sin t + (pi - t) cos t
        J2 = 3 sin t cos t + (pi - t)(1 + 2 cos^2 t)
        J3 = 15 sin t - 11 sin^3 t + (pi - t)(9 cos t + 6 cos^3 t)
    """
    t = np.asarray(theta, dtype=float)
    if np.any(t < -1e-12) or np.any(t > np.pi + 1e-12):
        raise InvalidInput("theta must lie in [0, pi]")
    t = np.clip(t, 0.0, np.pi)
    s, c, p = np.sin(t), np.cos(t), np.pi - t
    if r == 0:
        out = p
    elif r == 1:
        out = s + p * c
    elif r == 2:
        out = 3.0 * s * c + p * (1.0 + 2.0 * c ** 2)
    elif r == 3:
        out = 15.0 * s - 11.0 * s ** 3 + p * (9.0 * c + 6.0 * c ** 3)
    else:
        raise InvalidInput(f"no closed form for order {r}")
    return out if out.ndim else float(out)


def _angle(inner, nx, ny):
    """Angle from an inner product and two norms; pi/2 when a norm vanishes.

    The pi/2 convention is the feature map of a zero vector under a step
    function evaluated at 0 as 1/2, so Gram matrices stay PSD.
    """
    inner = np.asarray(inner, dtype=float)
    denom = np.asarray(nx * ny, dtype=float)
    zero = (np.asarray(nx) <= ZERO_NORM) | (np.asarray(ny) <= ZERO_NORM)
    cos = np.divide(inner, denom, out=np.zeros_like(inner), where=~zero)
    excess = np.max(np.abs(cos)) - 1.0 if cos.size else 0.0
    if excess > COSINE_SLACK:
        raise NumericalError(f"cosine exceeds 1 by {excess:.2e}")
    return np.where(zero, np.pi / 2, np.arccos(np.clip(cos, -1.0, 1.0)))


def _arc_from_parts(inner, nx, ny, r, theta=None):
    if theta is None:
        theta = _angle(inner, nx, ny)
    return (nx ** r) * (ny ** r) * angular_j(r, theta) / np.pi


def _self_angles(inner, norms):
    # arccos is ill-conditioned at 1, so pin the diagonal of a Gram to its exact angle
    theta = _angle(inner, norms[:, None], norms[None, :])
    d = np.arange(len(norms))
    theta[d, d] = np.where(norms > ZERO_NORM, 0.0, np.pi / 2)
    return theta


def arccos_kernel(x, y, r):
    """Arc-cosine kernel of order ``r`` between two vectors."""
    x = np.ravel(np.asarray(x, dtype=float))
    y = np.ravel(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise DimMismatch("vectors differ in length")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    return float(_arc_from_parts(np.sum(x * y), nx, ny, r))


def _logs(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.shape != Y.shape:
        raise DimMismatch(f"shapes differ: {X.shape} vs {Y.shape}")
    return spd_log(X), spd_log(Y)


def loge_linear_kernel(X, Y):
    """Log-Euclidean kernel ``Tr(log X log Y)``."""
    LX, LY = _logs(X, Y)
    return float(np.sum(LX * LY))


def loge_arc_kernel(X, Y, r):
    """Arc-cosine kernel of order ``r`` applied to ``log X`` and ``log Y``."""
    LX, LY = _logs(X, Y)
    nx = np.sqrt(np.sum(LX * LX))
    ny = np.sqrt(np.sum(LY * LY))
    theta = 0.0 if nx > ZERO_NORM and np.array_equal(LX, LY) else None
    return float(_arc_from_parts(np.sum(LX * LY), nx, ny, r, theta))


def _variant_params(spec, gamma=None):
    p = spec.params
    g = p.get("gamma", gamma)
    if g is None:
        raise InvalidSpec(f"{spec.family} needs gamma")
    return float(g), float(p.get("coef0", 1.0)), int(p.get("degree", 2))


def loge_variant_kernel(X, Y, spec):
    """Polynomial, exponential or Gaussian kernel in the log domain."""
    if spec.family not in ("loge-pol", "loge-exp", "loge-gau"):
        raise InvalidSpec(f"{spec.family} is not a variant kernel")
    LX, LY = _logs(X, Y)
    return float(_variant_from_logs(LX[None], LY[None], spec, None)[0, 0])


def _variant_from_logs(LA, LB, spec, gamma):
    g, c, d = _variant_params(spec, gamma)
    VA = LA.reshape(len(LA), -1)
    VB = LB.reshape(len(LB), -1)
    inner = VA @ VB.T
    if spec.family == "loge-pol":
        return (g * inner + c) ** d
    if spec.family == "loge-exp":
        return np.exp(g * inner)
    sq = (VA ** 2).sum(1)[:, None] + (VB ** 2).sum(1)[None, :] - 2.0 * inner
    return np.exp(-g * np.maximum(sq, 0.0))


def default_gamma(logs):
    """``1 / mean ||log X||_F^2`` over a stack of log matrices."""
    m = float(np.mean(np.sum(logs.reshape(len(logs), -1) ** 2, axis=1)))
    return 1.0 / m if m > 0 else 1.0


def _mirror(K):
    return np.triu(K) + np.triu(K, 1).T


def gram_from_logs(logs, spec, gamma=None):
    """Gram matrix from precomputed matrix logarithms, shape ``(N, n, n)``."""
    logs = np.asarray(logs, dtype=float)
    V = logs.reshape(len(logs), -1)
    if spec.family in ("loge-pol", "loge-exp", "loge-gau"):
        if "gamma" not in spec.params and gamma is None:
            gamma = default_gamma(logs)
        return _mirror(_variant_from_logs(logs, logs, spec, gamma))
    inner = V @ V.T
    if spec.family == "loge-linear":
        return _mirror(inner)
    norms = np.sqrt(np.sum(V * V, axis=1))
    theta = _self_angles(inner, norms)
    return _mirror(_arc_from_parts(inner, norms[:, None], norms[None, :], spec.order, theta))


def arc_grams_from_logs(logs, orders):
    """Arc-cosine Gram matrices for several orders, sharing one inner-product pass."""
    logs = np.asarray(logs, dtype=float)
    V = logs.reshape(len(logs), -1)
    inner = V @ V.T
    norms = np.sqrt(np.sum(V * V, axis=1))
    theta = _self_angles(inner, norms)
    outer = norms[:, None] * norms[None, :]
    return np.stack([_mirror(outer ** r * angular_j(r, theta) / np.pi) for r in orders])


def gram(items, spec):
    """Gram matrix of a list of SPD matrices under ``spec``.

    Each matrix logarithm is computed once. Only the upper triangle is
    trusted and mirrored, so the result is exactly symmetric.
    """
    items = np.asarray(items, dtype=float)
    if items.ndim != 3 or len(items) == 0:
        raise InvalidInput("expected a non-empty stack of square matrices")
    logs = np.empty_like(items)
    for i, X in enumerate(items):
        try:
            logs[i] = spd_log(X)
        except Exception as exc:
            raise type(exc)(f"item {i}: {exc}") from exc
    return gram_from_logs(logs, spec)


def center_gram(K):
    """Center a kernel matrix in feature space (double centering)."""
    return as_symmetric(double_center(as_symmetric(K)))
