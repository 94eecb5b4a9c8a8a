"""scikit-learn compatible estimators.

Descriptors are transformers mapping a collection of image sets to a stack
of SPD matrices; classifiers consume such stacks. They compose with
:class:`sklearn.pipeline.Pipeline`::

    make_pipeline(CovDsSEncoder(beta=0.9, k_orders=2), LogEuclideanSVC(C=1.0))
"""

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .alignment import KernelWeights, learn_weights
from .classifiers import svm_predict, svm_train
from .descriptors import (
    PipelineConfig,
    combine,
    finalize_representation,
    local_grams,
    traditional_covds,
)
from .metrics import MetricKind, pairwise_distances
from .spd import spd_log
from .validation import check_image_sets, check_labels, check_spd_stack


class CovDsEncoder(TransformerMixin, BaseEstimator):
    """Regularized pixel covariance of every image set."""

    def __init__(self, lambda_frac=1e-3):
        self.lambda_frac = lambda_frac

    def fit(self, X, y=None):
        sets = check_image_sets(X)
        self.n_features_in_ = int(np.prod(sets[0].shape[1:]))
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        return np.stack([traditional_covds(s, self.lambda_frac) for s in check_image_sets(X)])


class CovDsSEncoder(TransformerMixin, BaseEstimator):
    """CovDs-S representation of image sets.

    With the arc-cosine kernel and ``weights=None``, :meth:`fit` learns the
    order weights from the labels by kernel target alignment and keeps the
    ``k_orders`` orders with the largest absolute weights. ``weights`` may
    instead be a fixed vector over ``orders``.

    Attributes
    ----------
    weights_ : KernelWeights
        Learned (or given) weights; ``weights_.mask`` is applied in transform.
    """

    def __init__(self, win=6, stride=2, beta=0.9, lambda_frac=1e-3, orders=(0, 1, 2, 3),
                 kernel="loge-arc", gamma=None, coef0=1.0, degree=2, k_orders=2,
                 weights=None, eig_floor=1e-8, min_reg=1e-6, n_jobs=None):
        self.win = win
        self.stride = stride
        self.beta = beta
        self.lambda_frac = lambda_frac
        self.orders = orders
        self.kernel = kernel
        self.gamma = gamma
        self.coef0 = coef0
        self.degree = degree
        self.k_orders = k_orders
        self.weights = weights
        self.eig_floor = eig_floor
        self.min_reg = min_reg
        self.n_jobs = n_jobs

    def _config(self):
        return PipelineConfig(
            win=self.win, stride=self.stride, beta=self.beta, lambda_frac=self.lambda_frac,
            orders=tuple(self.orders), eig_floor=self.eig_floor, kernel=self.kernel,
            gamma=self.gamma, coef0=self.coef0, degree=self.degree, min_reg=self.min_reg,
        )

    def local_grams(self, X):
        """Per-order local Gram matrices, shape ``(n_sets, n_orders, N, N)``."""
        cfg = self._config()
        sets = check_image_sets(X)
        out = Parallel(n_jobs=self.n_jobs)(delayed(local_grams)(s, cfg) for s in sets)
        return np.stack(out)

    def _fit_locals(self, L, y):
        orders = self._config().local_orders
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            self.weights_ = KernelWeights(w, w, orders)
        elif len(orders) == 1:
            self.weights_ = KernelWeights(np.ones(1), np.ones(1), orders)
        else:
            if y is None:
                raise ValueError("labels are required to learn order weights")
            y = check_labels(y, len(L))
            self.weights_ = learn_weights(L, y, self.k_orders, orders)
        self.n_sub_sets_ = L.shape[-1]
        return self

    def fit(self, X, y=None):
        return self._fit_locals(self.local_grams(X), y)

    def represent(self, L):
        """Finalized representations from precomputed local Gram matrices."""
        check_is_fitted(self, "weights_")
        return np.stack([finalize_representation(combine(l, self.weights_.mask), self.eig_floor)
                         for l in L])

    def transform(self, X):
        return self.represent(self.local_grams(X))

    def fit_transform(self, X, y=None, **fit_params):
        L = self.local_grams(X)
        return self._fit_locals(L, y).represent(L)


class SPDNearestNeighbor(ClassifierMixin, BaseEstimator):
    """1-NN under one of ``airm``, ``stein``, ``jeffrey`` or ``lem``."""

    def __init__(self, metric="airm"):
        self.metric = metric

    def fit(self, X, y):
        X = check_spd_stack(X)
        self.X_ = X
        self.y_ = check_labels(y, len(X))
        self.classes_ = np.unique(self.y_)
        MetricKind(self.metric)
        return self

    def predict(self, X):
        check_is_fitted(self, "X_")
        D = pairwise_distances(check_spd_stack(X), self.X_, self.metric)
        return self.y_[np.argmin(D, axis=1)]


class LogEuclideanSVC(ClassifierMixin, BaseEstimator):
    """One-vs-all SVM with the Log-Euclidean kernel on SPD matrices."""

    def __init__(self, C=1.0, tol=1e-3, max_iter=100_000):
        self.C = C
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        X = check_spd_stack(X)
        y = check_labels(y, len(X))
        self.model_ = svm_train(X, y, self.C, self.tol, self.max_iter)
        self.classes_ = self.model_.classes
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        return self.model_.decision_function(spd_log(check_spd_stack(X)))

    def predict(self, X):
        check_is_fitted(self, "model_")
        return svm_predict(self.model_, check_spd_stack(X))
