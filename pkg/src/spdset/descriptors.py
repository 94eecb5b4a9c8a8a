"""Image-set descriptors: the classical covariance descriptor and CovDs-S.

CovDs-S slides a window over every frame of an image set, models each
stack of co-located patches (a sub-image set) as a Gaussian embedded on the
SPD manifold, mean-centralizes those embeddings and represents the whole set
by the weighted sum of their arc-cosine Gram matrices in the log domain.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateRepresentation, DegenerateSet, InvalidInput
from .kernels import KernelSpec, arc_grams_from_logs, gram_from_logs
from .spd import as_symmetric, double_center, spd_log, sym_eig, sym_exp


@dataclass
class ImageSet:
    """Grayscale frames of shape ``(n, h, w)`` with intensities in [0, 1]."""

    frames: np.ndarray
    label: object = None
    source_id: str = ""

    def __post_init__(self):
        self.frames = check_frames(self.frames)


def check_frames(frames):
    frames = np.asarray(frames, dtype=float)
    if frames.ndim != 3:
        raise InvalidInput(f"frames must have shape (n, h, w), got {frames.shape}")
    if frames.shape[0] < 2:
        raise InvalidInput("an image set needs at least two frames")
    if not np.all(np.isfinite(frames)):
        raise InvalidInput("frames contain non-finite intensities")
    if frames.min() < 0.0 or frames.max() > 1.0:
        raise InvalidInput("intensities must lie in [0, 1]")
    return frames


@dataclass(frozen=True)
class PipelineConfig:
    win: int = 6
    stride: int = 2
    beta: float = 0.9
    lambda_frac: float = 1e-3
    orders: tuple = (0, 1, 2, 3)
    eig_floor: float = 1e-8
    keep_locals: bool = False
    # kernel between sub-image-set descriptors; variants ignore ``orders``
    kernel: str = "loge-arc"
    gamma: float = None
    coef0: float = 1.0
    degree: int = 2
    # absolute covariance ridge; keeps constant windows (e.g. flat background) embeddable
    min_reg: float = 1e-6

    def kernel_spec(self, order=0):
        params = {"coef0": self.coef0, "degree": self.degree}
        if self.gamma is not None:
            params["gamma"] = self.gamma
        return KernelSpec(self.kernel, order=order if self.kernel == "loge-arc" else 0,
                          params=params)

    @property
    def local_orders(self):
        """Orders of the local Gram matrices this config produces."""
        return tuple(self.orders) if self.kernel == "loge-arc" else (0,)


@dataclass
class SubImageSet:
    window_origin: tuple
    features: np.ndarray  # (win*win, n): one vectorized patch per frame


@dataclass
class CovDsS:
    """Sum-kernel representation of one image set."""

    matrix: np.ndarray
    orders_used: tuple
    weights: np.ndarray
    locals: np.ndarray = field(default=None, repr=False)


def traditional_covds(frames, lambda_frac=1e-3):
    """Pixel covariance of an image set, regularized by ``lambda_frac * Tr(C) * I``."""
    frames = np.asarray(frames, dtype=float)
    n = frames.shape[0]
    if n < 2:
        raise InvalidInput("need at least two frames")
    S = frames.reshape(n, -1).T
    S_tilde = (S - S.mean(axis=1, keepdims=True)) / np.sqrt(n - 1)
    C = S_tilde @ S_tilde.T
    tr = np.trace(C)
    if tr <= 0:
        raise DegenerateSet("all frames are identical; covariance is zero")
    return as_symmetric(C + lambda_frac * tr * np.eye(len(C)))


def covds_kernel_view(frames):
    """The same covariance written as linear-kernel values between pixel rows."""
    frames = np.asarray(frames, dtype=float)
    n = frames.shape[0]
    S = frames.reshape(n, -1).T
    S_tilde = (S - S.mean(axis=1, keepdims=True)) / np.sqrt(n - 1)
    d = len(S_tilde)
    C = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            C[i, j] = C[j, i] = float(np.dot(S_tilde[i], S_tilde[j]))
    return C


def window_count(h, w, win, stride):
    return ((h - win) // stride + 1) * ((w - win) // stride + 1)


def _patch_stack(frames, win, stride):
    n, h, w = frames.shape
    if win < 1 or stride < 1:
        raise InvalidInput("window and stride must be positive")
    if win > min(h, w):
        raise InvalidInput(f"window {win} larger than frame {h}x{w}")
    view = np.lib.stride_tricks.sliding_window_view(frames, (win, win), axis=(1, 2))
    view = view[:, ::stride, ::stride]
    rows, cols = view.shape[1:3]
    # -> (rows*cols, win*win, n), patches flattened row-major
    feats = view.reshape(n, rows * cols, win * win).transpose(1, 2, 0)
    origins = [(i * stride, j * stride) for i in range(rows) for j in range(cols)]
    return origins, np.ascontiguousarray(feats)


def extract_subsets(frames, win=6, stride=2):
    """Sub-image sets of all fully contained ``win x win`` windows on a ``stride`` grid."""
    frames = np.asarray(frames, dtype=float)
    origins, feats = _patch_stack(frames, win, stride)
    return [SubImageSet(o, f) for o, f in zip(origins, feats)]


def gaussian_embed(features, beta, lambda_frac=1e-3, min_reg=0.0):
    """Embed the Gaussian fitted to the columns of ``features`` as an SPD matrix.

    ``features`` has shape ``(d, n)`` or a stack ``(N, d, n)``. Returns
    ``[[S + b^2 m m^T, b m], [b m^T, 1]]`` of size ``d + 1`` where ``m`` is the
    column mean and ``S`` the regularized unbiased covariance.
    """
    F = np.asarray(features, dtype=float)
    if beta <= 0:
        raise InvalidInput("beta must be positive")
    if F.shape[-1] < 2:
        raise InvalidInput("need at least two samples")
    single = F.ndim == 2
    F = F[None] if single else F
    N, d, n = F.shape
    mu = F.mean(axis=2)
    Fc = F - mu[:, :, None]
    sigma = Fc @ Fc.transpose(0, 2, 1) / (n - 1)
    tr = np.trace(sigma, axis1=1, axis2=2)
    lam = np.maximum(lambda_frac * tr, min_reg)
    dead = (tr <= 0) & (lam <= 0)
    if np.any(dead):
        bad = int(np.argmax(dead))
        raise DegenerateSet(f"sub-image set {bad} has zero covariance and no regularization")
    sigma = sigma + lam[:, None, None] * np.eye(d)
    bm = beta * mu
    G = np.empty((N, d + 1, d + 1))
    G[:, :d, :d] = sigma + bm[:, :, None] * bm[:, None, :]
    G[:, :d, d] = bm
    G[:, d, :d] = bm
    G[:, d, d] = 1.0
    G = as_symmetric(G)
    return G[0] if single else G


def _centralized_logs(descriptors):
    w, U = sym_eig(descriptors)
    if np.any(w[:, -1] <= 0):
        raise DegenerateSet("a sub-image-set descriptor is not positive definite")
    L = (U * np.log(w)[:, None, :]) @ U.transpose(0, 2, 1)
    centred = sym_exp(double_center(as_symmetric(L)))
    # log of the centralized descriptors, each computed once for all orders
    return spd_log(centred, policy="clamp")


def local_grams(frames, cfg):
    """Per-order local Gram matrices ``(len(orders), N, N)`` for one image set."""
    frames = check_frames(frames)
    _, feats = _patch_stack(frames, cfg.win, cfg.stride)
    G = gaussian_embed(feats, cfg.beta, cfg.lambda_frac, cfg.min_reg)
    logs = _centralized_logs(G)
    if cfg.kernel == "loge-arc":
        return arc_grams_from_logs(logs, cfg.orders)
    return gram_from_logs(logs, cfg.kernel_spec())[None]


def combine(locals_, weights):
    """Fixed-order weighted sum of local Gram matrices."""
    out = np.zeros(locals_.shape[-2:])
    for w, C in zip(weights, locals_):
        if w != 0:
            out = out + w * C
    return out


def build_covds_s(frames, cfg, weights=None):
    """CovDs-S representation of one image set.

    ``weights`` defaults to all ones over ``cfg.local_orders``.
    """
    locals_ = local_grams(frames, cfg)
    orders = cfg.local_orders
    weights = np.ones(len(orders)) if weights is None else np.asarray(weights, dtype=float)
    if weights.shape != (len(orders),):
        raise InvalidInput(f"expected {len(orders)} weights, got {weights.shape}")
    return CovDsS(combine(locals_, weights), orders, weights,
                  locals_ if cfg.keep_locals else None)


def finalize_representation(C, eig_floor=1e-8):
    """Lift the spectrum of a PSD representation to at least ``eig_floor * max``."""
    C = as_symmetric(C)
    w, U = sym_eig(C)
    top = w[0]
    if top <= 0:
        raise DegenerateRepresentation("representation has no positive eigenvalue")
    floor = eig_floor * top
    if w[-1] >= floor:
        return C
    w = np.maximum(w, floor)
    return as_symmetric((U * w) @ U.T)
