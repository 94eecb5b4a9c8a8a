"""Input checks shared by the estimators."""

import numpy as np

from .descriptors import ImageSet, check_frames
from .exceptions import DimMismatch, InvalidInput
from .spd import check_spd


def check_image_sets(X):
    """Return a list of ``(n_i, h, w)`` float arrays.

    Accepts a list of :class:`ImageSet`, a list of frame arrays, or a single
    4-d array ``(n_sets, n_frames, h, w)``. All sets must share ``h x w``.
    """
    if isinstance(X, np.ndarray) and X.ndim == 4:
        X = list(X)
    if isinstance(X, ImageSet):
        raise InvalidInput("expected a collection of image sets, got a single ImageSet")
    sets = [x.frames if isinstance(x, ImageSet) else check_frames(x) for x in X]
    if not sets:
        raise InvalidInput("no image sets given")
    shape = sets[0].shape[1:]
    for i, s in enumerate(sets):
        if s.shape[1:] != shape:
            raise DimMismatch(f"image set {i} has frames {s.shape[1:]}, expected {shape}")
    return sets


def check_spd_stack(X, policy="reject"):
    """Validate a stack ``(n, d, d)`` of SPD matrices."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 3:
        raise InvalidInput(f"expected shape (n_samples, d, d), got {X.shape}")
    return check_spd(X, policy)


def check_labels(y, n):
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != n:
        raise InvalidInput(f"expected {n} labels, got shape {y.shape}")
    return y
