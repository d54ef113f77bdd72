"""Stacked LSTM next-note model with exact backpropagation through time.

Inputs are one-hot vocabulary indices fed straight into the first layer (no
embedding). Gate pre-activations are packed in the order
``[input, forget, cell candidate, output]``, each block ``H`` rows tall.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .mathcore import loss_from_logits

DEFAULT_HIDDEN = 128
DEFAULT_LAYERS = 2
DEFAULT_INIT_SCALE = 0.08
FORGET_BIAS = 1.0


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    hidden_size: int = DEFAULT_HIDDEN
    num_layers: int = DEFAULT_LAYERS
    window_len: int = 32
    init_scale: float = DEFAULT_INIT_SCALE
    rng_seed: int = 0

    def __post_init__(self):
        if self.vocab_size < 2:
            raise DomainError("vocab_size must be at least 2")
        if self.hidden_size < 1 or self.num_layers < 1 or self.window_len < 1:
            raise DomainError("hidden_size, num_layers and window_len must be positive")
        if self.init_scale < 0:
            raise DomainError("init_scale must be non-negative")
        if not 0 <= self.rng_seed < 2**64:
            raise DomainError("rng_seed must fit in an unsigned 64-bit integer")


@dataclass
class LayerParams:
    W: np.ndarray  # (4H, in_dim)
    U: np.ndarray  # (4H, H)
    b: np.ndarray  # (4H,)


@dataclass
class LstmParameters:
    """Weights of every layer plus the output projection.

    The same class holds gradients, which share the shape tree.
    """

    layers: list
    P: np.ndarray  # (V, H)
    c: np.ndarray  # (V,)

    @property
    def vocab_size(self):
        return self.P.shape[0]

    @property
    def hidden_size(self):
        return self.P.shape[1]

    def named_arrays(self):
        """(name, array) pairs in the canonical serialization order."""
        out = []
        for l, layer in enumerate(self.layers):
            out += [(f"layer{l}.W", layer.W), (f"layer{l}.U", layer.U), (f"layer{l}.b", layer.b)]
        out += [("proj.P", self.P), ("proj.c", self.c)]
        return out

    def arrays(self):
        return [a for _, a in self.named_arrays()]

    @classmethod
    def from_arrays(cls, arrays):
        arrays = list(arrays)
        if len(arrays) < 5 or (len(arrays) - 2) % 3:
            raise DomainError(f"cannot build parameters from {len(arrays)} arrays")
        layers = [LayerParams(*arrays[i:i + 3]) for i in range(0, len(arrays) - 2, 3)]
        return cls(layers, arrays[-2], arrays[-1])

    def map(self, fn):
        return LstmParameters.from_arrays(fn(a) for a in self.arrays())

    def copy(self):
        return self.map(np.copy)

    def zeros_like(self):
        return self.map(np.zeros_like)

    def num_scalars(self):
        return sum(a.size for a in self.arrays())

    def equals(self, other):
        """Bitwise equality, shapes included."""
        mine, theirs = self.arrays(), other.arrays()
        return len(mine) == len(theirs) and all(
            a.shape == b.shape and a.tobytes() == b.tobytes() for a, b in zip(mine, theirs))


def init_parameters(config):
    """Uniform(-init_scale, init_scale) weights, zero biases, forget bias 1."""
    rng = np.random.default_rng(config.rng_seed)
    H, V, s = config.hidden_size, config.vocab_size, config.init_scale

    def uniform(*shape):
        return rng.uniform(-s, s, size=shape) if s > 0 else np.zeros(shape)

    layers = []
    in_dim = V
    for _ in range(config.num_layers):
        W = uniform(4 * H, in_dim)
        U = uniform(4 * H, H)
        b = np.zeros(4 * H)
        b[H:2 * H] = FORGET_BIAS
        layers.append(LayerParams(W, U, b))
        in_dim = H
    return LstmParameters(layers, uniform(V, H), np.zeros(V))


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _check_layer(layer, in_dim, H):
    if (layer.W.shape != (4 * H, in_dim) or layer.U.shape != (4 * H, H)
            or layer.b.shape != (4 * H,)):
        raise DomainError("layer parameter shapes do not match the cell inputs")


def lstm_cell_forward(x, h_prev, c_prev, layer):
    """One LSTM step. Returns ``(h, c, cache)``."""
    x = np.asarray(x, dtype=np.float64)
    H = h_prev.shape[0]
    _check_layer(layer, x.shape[0], H)
    if c_prev.shape != (H,):
        raise DomainError("cell state shape mismatch")
    z = layer.W @ x + layer.U @ h_prev + layer.b
    return _cell_from_preact(z, c_prev, H)


def _cell_from_preact(z, c_prev, H):
    i = sigmoid(z[:H])
    f = sigmoid(z[H:2 * H])
    g = np.tanh(z[2 * H:3 * H])
    o = sigmoid(z[3 * H:])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    h = o * tc
    return h, c, {"i": i, "f": f, "g": g, "o": o, "tc": tc}


@dataclass
class ForwardCache:
    inputs: np.ndarray  # (T,) vocabulary indices
    layer_inputs: list = field(default_factory=list)  # per layer, (T, in_dim)
    h: list = field(default_factory=list)  # per layer, (T+1, H); row 0 is the initial state
    c: list = field(default_factory=list)  # per layer, (T+1, H)
    gates: list = field(default_factory=list)  # per layer, (T, 4H) activations [i f g o]
    tanh_c: list = field(default_factory=list)  # per layer, (T, H)

    @property
    def steps(self):
        return len(self.inputs)


def zero_state(params):
    H = params.hidden_size
    return [(np.zeros(H), np.zeros(H)) for _ in params.layers]


def forward_sequence(inputs, params, state=None):
    """Run the network over an index sequence.

    Returns ``(logits, cache, final_state)`` with ``logits`` of shape (T, V).
    ``state`` is a per-layer list of ``(h, c)``; ``None`` means zeros.
    """
    inputs = np.asarray(inputs, dtype=np.intp)
    V, H = params.vocab_size, params.hidden_size
    if inputs.ndim != 1 or inputs.size == 0:
        raise DomainError("inputs must be a non-empty index sequence")
    if np.any(inputs < 0) or np.any(inputs >= V):
        raise DomainError(f"input index outside [0, {V})")
    if state is None:
        state = zero_state(params)
    T = inputs.size
    cache = ForwardCache(inputs)
    x = np.zeros((T, V))
    x[np.arange(T), inputs] = 1.0
    final_state = []
    for l, layer in enumerate(params.layers):
        _check_layer(layer, x.shape[1], H)
        zx = x @ layer.W.T + layer.b
        hs = np.empty((T + 1, H))
        cs = np.empty((T + 1, H))
        gates = np.empty((T, 4 * H))
        tcs = np.empty((T, H))
        hs[0], cs[0] = state[l]
        U = layer.U
        for t in range(T):
            z = zx[t] + U @ hs[t]
            gates[t, :2 * H] = sigmoid(z[:2 * H])
            gates[t, 2 * H:3 * H] = np.tanh(z[2 * H:3 * H])
            gates[t, 3 * H:] = sigmoid(z[3 * H:])
            cs[t + 1] = gates[t, H:2 * H] * cs[t] + gates[t, :H] * gates[t, 2 * H:3 * H]
            tcs[t] = np.tanh(cs[t + 1])
            hs[t + 1] = gates[t, 3 * H:] * tcs[t]
        cache.layer_inputs.append(x)
        cache.h.append(hs)
        cache.c.append(cs)
        cache.gates.append(gates)
        cache.tanh_c.append(tcs)
        final_state.append((hs[T].copy(), cs[T].copy()))
        x = hs[1:]
    logits = x @ params.P.T + params.c
    return logits, cache, final_state


def window_loss(window, params):
    inputs, targets = window
    logits, _, _ = forward_sequence(inputs, params)
    return loss_from_logits(logits, targets)


def loss_and_gradients(window, params):
    """Mean cross-entropy of a teacher-forced window and its exact gradient."""
    inputs, targets = window
    targets = np.asarray(targets, dtype=np.intp)
    if len(inputs) != len(targets):
        raise DomainError("inputs and targets differ in length")
    logits, cache, _ = forward_sequence(inputs, params)
    loss = loss_from_logits(logits, targets)
    T = cache.steps
    H = params.hidden_size

    m = logits.max(axis=1, keepdims=True)
    probs = np.exp(logits - m)
    probs /= probs.sum(axis=1, keepdims=True)
    dlogits = probs
    dlogits[np.arange(T), targets] -= 1.0
    dlogits /= T

    top = cache.h[-1][1:]
    dP = dlogits.T @ top
    dc_out = dlogits.sum(axis=0)
    dh_above = dlogits @ params.P

    grads = [None] * len(params.layers)
    for l in reversed(range(len(params.layers))):
        layer = params.layers[l]
        gates = cache.gates[l]
        tcs = cache.tanh_c[l]
        cs = cache.c[l]
        UT = layer.U.T
        dz = np.empty((T, 4 * H))
        dh_next = np.zeros(H)
        dc_next = np.zeros(H)
        for t in reversed(range(T)):
            i = gates[t, :H]
            f = gates[t, H:2 * H]
            g = gates[t, 2 * H:3 * H]
            o = gates[t, 3 * H:]
            dh = dh_above[t] + dh_next
            dcell = dc_next + dh * o * (1.0 - tcs[t] * tcs[t])
            dz[t, :H] = dcell * g * i * (1.0 - i)
            dz[t, H:2 * H] = dcell * cs[t] * f * (1.0 - f)
            dz[t, 2 * H:3 * H] = dcell * i * (1.0 - g * g)
            dz[t, 3 * H:] = dh * tcs[t] * o * (1.0 - o)
            dh_next = UT @ dz[t]
            dc_next = dcell * f
        grads[l] = LayerParams(dz.T @ cache.layer_inputs[l], dz.T @ cache.h[l][:-1],
                               dz.sum(axis=0))
        dh_above = dz @ layer.W
    return loss, LstmParameters(grads, dP, dc_out)
