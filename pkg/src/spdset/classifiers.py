"""Nearest-neighbour and one-vs-all kernel SVM classifiers for SPD representations."""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConvergenceFailure, DimMismatch, InvalidInput, KernelNotPSD
from .metrics import pairwise_distances
from .spd import as_symmetric, spd_log

TAU = 1e-12


def nn_classify(train, labels, query, metric="airm"):
    """Label of the training matrix nearest to ``query``; ties go to the lowest index."""
    train = np.asarray(train, dtype=float)
    query = np.asarray(query, dtype=float)
    if len(train) == 0:
        raise InvalidInput("empty training set")
    if query.shape != train.shape[1:]:
        raise DimMismatch(f"query shape {query.shape} vs training {train.shape[1:]}")
    d = pairwise_distances(query[None], train, metric)[0]
    return np.asarray(labels)[int(np.argmin(d))]


def smo(K, y, C=1.0, tol=1e-3, max_iter=100_000):
    """Soft-margin SVM dual on a precomputed Gram matrix.

    Pairwise coordinate descent with second-order working-set selection.
    Returns ``(alpha, b, gap, n_iter)``; ``gap`` is the maximal KKT violation
    ``m(alpha) - M(alpha)`` at exit.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of 0.5 a'Qa - e'a, Q = yy' * K
    diag = np.diag(K)
    for it in range(max_iter):
        up = ((alpha < C) & (y > 0)) | ((alpha > 0) & (y < 0))
        low = ((alpha < C) & (y < 0)) | ((alpha > 0) & (y > 0))
        score = -y * grad
        if not up.any() or not low.any():
            gap = 0.0
            break
        i = int(np.flatnonzero(up)[np.argmax(score[up])])
        m_up = score[i]
        m_low = np.min(score[low])
        gap = m_up - m_low
        if gap < tol:
            break
        cand = low & (score < m_up)
        b_it = m_up - score
        a_it = diag[i] + diag - 2.0 * K[i]
        a_it = np.where(a_it > 0, a_it, TAU)
        obj = np.where(cand, -(b_it ** 2) / a_it, np.inf)
        j = int(np.argmin(obj))
        a = a_it[j]
        bij = b_it[j]
        ai_old, aj_old = alpha[i], alpha[j]
        ai = ai_old + y[i] * bij / a
        aj = aj_old - y[j] * bij / a
        total = y[i] * ai_old + y[j] * aj_old
        ai = min(max(ai, 0.0), C)
        aj = y[j] * (total - y[i] * ai)
        aj = min(max(aj, 0.0), C)
        ai = y[i] * (total - y[j] * aj)
        alpha[i], alpha[j] = ai, aj
        grad += y * (K[:, i] * y[i] * (ai - ai_old) + K[:, j] * y[j] * (aj - aj_old))
    else:
        raise ConvergenceFailure(
            f"SMO did not reach KKT tolerance {tol} in {max_iter} iterations",
            {"gap": float(gap), "iterations": max_iter, "alpha": alpha.copy()},
        )
    yg = y * grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(np.mean(yg[free]))
    else:
        ub = np.min(np.where(((alpha == C) & (y < 0)) | ((alpha == 0) & (y > 0)), yg, np.inf))
        lb = np.max(np.where(((alpha == C) & (y > 0)) | ((alpha == 0) & (y < 0)), yg, -np.inf))
        rho = 0.5 * (ub + lb)
    return alpha, -rho, float(gap), it


def check_psd_gram(K, rtol=1e-8):
    K = as_symmetric(K)
    w = np.linalg.eigvalsh(K)
    if w[0] < -rtol * max(1.0, w[-1]):
        raise KernelNotPSD(f"Gram matrix has eigenvalue {w[0]:.3e}")
    return K


@dataclass
class SvmModel:
    classes: np.ndarray
    alphas: np.ndarray  # (n_classes, n_train)
    biases: np.ndarray
    signs: np.ndarray  # (n_classes, n_train), +1 for the class, -1 otherwise
    train_logs: np.ndarray = field(repr=False)
    C: float = 1.0
    gaps: np.ndarray = None

    def decision_function(self, query_logs):
        Kq = np.einsum("tij,qij->qt", self.train_logs, query_logs)
        return Kq @ (self.alphas * self.signs).T + self.biases


def svm_train(train, labels, C=1.0, tol=1e-3, max_iter=100_000):
    """One-vs-all soft-margin SVM under the Log-Euclidean kernel ``Tr(log X log Y)``."""
    logs = spd_log(np.asarray(train, dtype=float))
    labels = np.asarray(labels)
    classes = np.unique(labels)
    if len(classes) < 2:
        raise InvalidInput("need at least two classes")
    V = logs.reshape(len(logs), -1)
    K = check_psd_gram(V @ V.T)
    alphas, biases, signs, gaps = [], [], [], []
    for c in classes:
        y = np.where(labels == c, 1.0, -1.0)
        a, b, gap, _ = smo(K, y, C, tol, max_iter)
        alphas.append(a)
        biases.append(b)
        signs.append(y)
        gaps.append(gap)
    return SvmModel(classes, np.array(alphas), np.array(biases), np.array(signs),
                    logs, C, np.array(gaps))


def _argmax_low_tie(scores, rtol=1e-10):
    top = scores.max(axis=1, keepdims=True)
    slack = rtol * (1.0 + np.abs(scores).max(axis=1, keepdims=True))
    return np.argmax(scores >= top - slack, axis=1)


def svm_predict(model, query):
    """Class with the largest one-vs-all decision value (ties: smallest class)."""
    q = np.asarray(query, dtype=float)
    single = q.ndim == 2
    q = q[None] if single else q
    if q.shape[1:] != model.train_logs.shape[1:]:
        raise DimMismatch(f"query shape {q.shape[1:]} vs training {model.train_logs.shape[1:]}")
    scores = model.decision_function(spd_log(q))
    pred = model.classes[_argmax_low_tie(scores)]
    return pred[0] if single else pred
