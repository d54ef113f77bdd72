"""Central-difference gradient verification.

The numeric side does not reuse :func:`notelstm.model.forward_sequence`. It
runs a separate forward-only pass in ``np.longdouble`` so that round-off in
the loss difference stays well below the gradients being checked, including
recurrent-weight gradients of order 1e-10 on very short windows.
"""

import numpy as np

from .errors import DomainError
from .model import ModelConfig, init_parameters, loss_and_gradients

EXT = np.longdouble


def relative_error(a, n):
    return abs(a - n) / max(1e-8, abs(a) + abs(n))


def _sig(x):
    return EXT(1) / (EXT(1) + np.exp(-x))


def reference_loss(window, arrays):
    """Mean next-step NLL from a plain step-by-step forward pass.

    ``arrays`` is the canonical parameter list (see
    ``LstmParameters.arrays``) already cast to ``np.longdouble``.
    """
    inputs, targets = window
    P, c_out = arrays[-2], arrays[-1]
    V, H = P.shape
    layers = [arrays[i:i + 3] for i in range(0, len(arrays) - 2, 3)]
    h = [np.zeros(H, dtype=EXT) for _ in layers]
    c = [np.zeros(H, dtype=EXT) for _ in layers]
    total = EXT(0)
    for tok, tgt in zip(inputs, targets):
        x = np.zeros(V, dtype=EXT)
        x[tok] = 1
        for l, (W, U, b) in enumerate(layers):
            Wi, Wf, Wg, Wo = W[:H], W[H:2 * H], W[2 * H:3 * H], W[3 * H:]
            Ui, Uf, Ug, Uo = U[:H], U[H:2 * H], U[2 * H:3 * H], U[3 * H:]
            bi, bf, bg, bo = b[:H], b[H:2 * H], b[2 * H:3 * H], b[3 * H:]
            ig = _sig(Wi @ x + Ui @ h[l] + bi)
            fg = _sig(Wf @ x + Uf @ h[l] + bf)
            cand = np.tanh(Wg @ x + Ug @ h[l] + bg)
            og = _sig(Wo @ x + Uo @ h[l] + bo)
            c[l] = fg * c[l] + ig * cand
            h[l] = og * np.tanh(c[l])
            x = h[l]
        z = P @ x + c_out
        zmax = z.max()
        total += zmax + np.log(np.sum(np.exp(z - zmax))) - z[tgt]
    return total / EXT(len(targets))


def finite_difference_check(params, window, epsilon=1e-5, grads=None):
    """Max relative error between analytic and central-difference gradients.

    Every scalar parameter is perturbed by +/- ``epsilon``. ``grads``
    replaces the analytic gradients, which is how negative controls are run.
    """
    if not 0 < epsilon <= 1e-2:
        raise DomainError("epsilon must lie in (0, 1e-2]")
    if grads is None:
        _, grads = loss_and_gradients(window, params)
    probe = [a.astype(EXT) for a in params.arrays()]
    eps = EXT(epsilon)
    worst = 0.0
    for arr, g in zip(probe, grads.arrays()):
        flat = arr.reshape(-1)
        gflat = g.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + eps
            plus = reference_loss(window, probe)
            flat[k] = orig - eps
            minus = reference_loss(window, probe)
            flat[k] = orig
            numeric = float((plus - minus) / (2 * eps))
            worst = max(worst, relative_error(float(gflat[k]), numeric))
    return worst


def random_check(vocab_size=4, hidden_size=3, num_layers=2, window_len=5, epsilon=1e-5,
                 seed=0, init_scale=0.5, zero_grads=False):
    """Build a random tiny model and window, then run the check on it."""
    config = ModelConfig(vocab_size, hidden_size, num_layers, window_len, init_scale, seed)
    params = init_parameters(config)
    rng = np.random.default_rng([seed, 1])
    window = (rng.integers(0, vocab_size, window_len), rng.integers(0, vocab_size, window_len))
    grads = params.zeros_like() if zero_grads else None
    return finite_difference_check(params, window, epsilon, grads=grads)
