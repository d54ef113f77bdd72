"""ADAM with bias correction and global-norm gradient clipping.

Parameters, gradients and moments are all :class:`LstmParameters` trees, but
the functions only rely on ``arrays()`` / ``from_arrays()`` so any object with
that pair works.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class AdamHyper:
    alpha: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    clip_norm: float | None = 5.0

    def __post_init__(self):
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise DomainError("beta1 and beta2 must lie in (0, 1)")
        if self.alpha <= 0 or self.eps <= 0:
            raise DomainError("alpha and eps must be positive")
        if self.clip_norm is not None and self.clip_norm <= 0:
            raise DomainError("clip_norm must be positive or None")


class ArrayTree:
    """Flat list of arrays with the tree interface the optimizer expects."""

    def __init__(self, arrays):
        self._arrays = [np.asarray(a, dtype=np.float64) for a in arrays]

    def arrays(self):
        return list(self._arrays)

    @classmethod
    def from_arrays(cls, arrays):
        return cls(arrays)

    def map(self, fn):
        return type(self)(fn(a) for a in self._arrays)

    def zeros_like(self):
        return self.map(np.zeros_like)


@dataclass
class AdamState:
    m: object
    v: object
    t: int = 0

    @classmethod
    def zeros_like(cls, params):
        return cls(params.zeros_like(), params.zeros_like(), 0)


def global_norm(tree):
    return math.sqrt(math.fsum(float(np.sum(a * a)) for a in tree.arrays()))


def clip_gradients(grads, clip_norm):
    """Rescale ``grads`` so their global L2 norm is at most ``clip_norm``."""
    if clip_norm <= 0:
        raise DomainError("clip_norm must be positive")
    norm = global_norm(grads)
    if norm <= clip_norm:
        return grads
    scale = clip_norm / norm
    return grads.map(lambda a: a * scale)


def adam_step(params, grads, state, hyper):
    """One bias-corrected ADAM update. Returns new ``(params, state)``.

    Inputs are left untouched.
    """
    p_arrays, g_arrays = params.arrays(), grads.arrays()
    m_arrays, v_arrays = state.m.arrays(), state.v.arrays()
    if not (len(p_arrays) == len(g_arrays) == len(m_arrays) == len(v_arrays)) or any(
            p.shape != g.shape or p.shape != m.shape or p.shape != v.shape
            for p, g, m, v in zip(p_arrays, g_arrays, m_arrays, v_arrays)):
        raise DomainError("parameter, gradient and moment shapes differ")
    if hyper.clip_norm is not None:
        g_arrays = clip_gradients(grads, hyper.clip_norm).arrays()

    t = state.t + 1
    b1, b2 = hyper.beta1, hyper.beta2
    bc1 = 1.0 - b1 ** t
    bc2 = 1.0 - b2 ** t
    new_p, new_m, new_v = [], [], []
    for p, g, m, v in zip(p_arrays, g_arrays, m_arrays, v_arrays):
        m = b1 * m + (1.0 - b1) * g
        v = b2 * v + (1.0 - b2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        new_p.append(p - hyper.alpha * m_hat / (np.sqrt(v_hat) + hyper.eps))
        new_m.append(m)
        new_v.append(v)
    cls = type(params)
    return cls.from_arrays(new_p), AdamState(cls.from_arrays(new_m), cls.from_arrays(new_v), t)
