"""Probability and loss primitives.

All quantities are float64 and measured in nats.
"""

import math

import numpy as np

from .errors import DomainError

EPS_Q = 1e-12
_ONE = np.ones(1)


def _as_finite(x, what):
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{what} must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} contains non-finite entries")
    return arr


def softmax(logits):
    """Max-shifted softmax of a 1-D logit vector."""
    z = _as_finite(logits, "logits")
    e = np.exp(z - z.max())
    return e / e.sum()


def log_softmax(logits):
    z = _as_finite(logits, "logits")
    shifted = z - z.max()
    return shifted - math.log(np.exp(shifted).sum())


def cross_entropy(p, q):
    """H(p, q) = -sum_i p_i log q_i, with q clamped below at ``EPS_Q``."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise DomainError(f"length mismatch: p has shape {p.shape}, q has {q.shape}")
    mask = p != 0.0
    return float(-np.sum(p[mask] * np.log(np.maximum(q[mask], EPS_Q))))


def one_hot(index, size):
    if not 0 <= index < size:
        raise DomainError(f"index {index} outside [0, {size})")
    v = np.zeros(size, dtype=np.float64)
    v[index] = 1.0
    return v


def nll(q, target):
    """Negative log-likelihood of ``target`` under ``q``."""
    q = np.asarray(q, dtype=np.float64)
    if not 0 <= target < q.shape[0]:
        raise DomainError(f"target {target} outside [0, {q.shape[0]})")
    # same arithmetic as the single surviving term of cross_entropy(one_hot, q)
    return float(-np.sum(_ONE * np.log(np.maximum(q[target:target + 1], EPS_Q))))


def batch_loss(predictions, targets):
    """Mean per-token negative log-likelihood."""
    predictions = list(predictions)
    targets = list(targets)
    if not predictions:
        raise DomainError("empty batch")
    if len(predictions) != len(targets):
        raise DomainError(
            f"length mismatch: {len(predictions)} predictions, {len(targets)} targets")
    return math.fsum(nll(q, t) for q, t in zip(predictions, targets)) / len(predictions)


def loss_from_logits(logits, targets):
    """Fused log-sum-exp form of ``batch_loss(softmax(logits_t), targets)``.

    ``logits`` is a (T, V) array.
    """
    z = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.intp)
    if z.ndim != 2 or z.shape[0] == 0:
        raise DomainError("logits must be a non-empty (T, V) array")
    if targets.shape != (z.shape[0],):
        raise DomainError("length mismatch between logits and targets")
    if np.any(targets < 0) or np.any(targets >= z.shape[1]):
        raise DomainError("target index out of range")
    m = z.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(z - m).sum(axis=1))
    return float(np.mean(lse - z[np.arange(z.shape[0]), targets]))


def perplexity(h):
    if not math.isfinite(h):
        raise DomainError("loss must be finite")
    return math.exp(h)
