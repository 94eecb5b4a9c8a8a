"""Learning the order weights of a sum kernel by kernel target alignment."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateAlignment, IllConditioned, InvalidInput
from .kernels import center_gram

RIDGE = 1e-10


@dataclass
class KernelWeights:
    """Unit-norm alignment solution ``raw`` and its binarized ``mask``."""

    raw: np.ndarray
    mask: np.ndarray
    orders: tuple


@dataclass
class AlignmentProblem:
    local_kernels: np.ndarray  # (R+1, M, M)
    target: np.ndarray  # (M, M)
    classes: np.ndarray


def frobenius(A, B):
    return float(np.sum(np.asarray(A) * np.asarray(B)))


def alignment(K, K_T):
    """Cosine of the angle between two kernel matrices under the Frobenius product."""
    K = np.asarray(K, dtype=float)
    K_T = np.asarray(K_T, dtype=float)
    if K.shape != K_T.shape:
        raise InvalidInput(f"shapes differ: {K.shape} vs {K_T.shape}")
    nk, nt = frobenius(K, K), frobenius(K_T, K_T)
    if nk == 0 or nt == 0:
        raise DegenerateAlignment("alignment with an all-zero kernel matrix")
    return frobenius(K, K_T) / np.sqrt(nk * nt)


def target_kernel(labels):
    """``Y Y^T`` for the one-hot label matrix ``Y``."""
    classes, idx = np.unique(np.asarray(labels), return_inverse=True)
    Y = np.eye(len(classes))[idx]
    return Y @ Y.T, classes


def build_problem(local_grams_per_set, labels):
    """Alignment problem from the local Gram matrices of M training image sets.

    ``local_grams_per_set`` is indexable as ``[set][order] -> (N, N)``; entry
    ``(i, j)`` of the order-``r`` kernel is ``Tr(C_r^i C_r^j)``.
    """
    if len(labels) == 0:
        raise InvalidInput("no training labels")
    counts = {len(g) for g in local_grams_per_set}
    if len(counts) != 1:
        raise InvalidInput("training sets disagree on the number of orders")
    if len(local_grams_per_set) != len(labels):
        raise InvalidInput("one label per training set required")
    L = np.asarray(local_grams_per_set, dtype=float)
    M, R1 = L.shape[:2]
    V = L.reshape(M, R1, -1).transpose(1, 0, 2)
    K = np.einsum("rin,rjn->rij", V, V)
    K = 0.5 * (K + K.transpose(0, 2, 1))
    K_T, classes = target_kernel(labels)
    return AlignmentProblem(K, K_T, classes)


def solve_weights(problem, center=True):
    """Closed-form maximizer ``W = Omega^-1 b / ||Omega^-1 b||`` of the alignment.

    Each local kernel is centered, then normalized to unit Frobenius norm
    before ``Omega`` is formed; the scaling is undone on the solution, so the
    result is exactly equivariant to rescaling any single kernel.
    """
    K = problem.local_kernels
    Kc = np.stack([center_gram(k) for k in K]) if center else np.asarray(K, dtype=float)
    norms = np.sqrt(np.einsum("rij,rij->r", Kc, Kc))
    if np.any(norms == 0):
        raise IllConditioned(f"local kernel(s) {np.flatnonzero(norms == 0).tolist()} vanish")
    Kn = Kc / norms[:, None, None]
    b = np.einsum("rij,ij->r", Kn, problem.target)
    omega = np.einsum("rij,sij->rs", Kn, Kn)
    omega = omega + RIDGE * np.trace(omega) / len(omega) * np.eye(len(omega))
    if np.linalg.cond(omega) > 1e14:
        raise IllConditioned("local kernels are (nearly) linearly dependent")
    v = np.linalg.solve(omega, b) / norms
    nv = np.linalg.norm(v)
    if not np.isfinite(nv) or nv == 0:
        raise DegenerateAlignment("kernels carry no alignment with the labels")
    raw = v / nv
    return KernelWeights(raw, np.ones(len(raw)), tuple(range(len(raw))))


def combined_alignment(problem, w):
    """Alignment of ``sum_r w_r center(K_r)`` with the target."""
    Kc = sum(wr * center_gram(k) for wr, k in zip(w, problem.local_kernels))
    return alignment(Kc, problem.target)


def binarize_weights(weights, k):
    """Mask keeping the ``k`` largest ``|raw|`` entries; ties favour the lower order."""
    raw = np.asarray(weights.raw)
    if not 1 <= k <= len(raw):
        raise InvalidInput(f"k must be in 1..{len(raw)}")
    keep = np.argsort(-np.abs(raw), kind="stable")[:k]
    mask = np.zeros(len(raw))
    mask[keep] = 1.0
    return KernelWeights(raw.copy(), mask, weights.orders)


def learn_weights(local_grams_per_set, labels, k, orders=None):
    """Solve and binarize in one step."""
    w = solve_weights(build_problem(local_grams_per_set, labels))
    if orders is not None:
        w.orders = tuple(orders)
    return binarize_weights(w, k)
