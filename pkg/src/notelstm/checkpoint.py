"""Binary ``.mlck`` checkpoint format.

Layout (all integers little-endian)::

    b"MLCK"            magic
    u16                format version
    u64                payload length N
    N bytes            payload
    u64                checksum: BLAKE2b-64 of every preceding byte

Payload::

    u32 + bytes        header, UTF-8 JSON with sorted keys
    u32                array count
    per array:
        u16 + bytes    name, UTF-8
        u8             ndim
        u32 * ndim     shape
        f64 * size     C-order data

Arrays are written as ``param/<name>``, ``adam_m/<name>`` and
``adam_v/<name>`` in the canonical parameter order.
"""

import hashlib
import json
import struct
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ChecksumError, CheckpointError, TruncatedCheckpointError, VersionMismatchError
from .model import LstmParameters, ModelConfig
from .optim import AdamHyper, AdamState
from .vocab import Vocabulary

MAGIC = b"MLCK"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<4sHQ")
_CHECKSUM = struct.Struct("<Q")


@dataclass
class TrainingCheckpoint:
    config: ModelConfig
    params: LstmParameters
    adam: AdamState
    hyper: AdamHyper
    iteration: int
    loss_at_capture: float
    vocab: Vocabulary
    rng_state: dict
    version: int = FORMAT_VERSION

    def to_bytes(self):
        return dumps(self)

    def __eq__(self, other):
        return isinstance(other, TrainingCheckpoint) and self.to_bytes() == other.to_bytes()


def _checksum(data):
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def dumps(ckpt):
    header = {
        "config": asdict(ckpt.config),
        "hyper": asdict(ckpt.hyper),
        "iteration": int(ckpt.iteration),
        "loss_at_capture": float(ckpt.loss_at_capture).hex(),
        "adam_t": int(ckpt.adam.t),
        "vocab": list(ckpt.vocab.tokens),
        "rng_state": ckpt.rng_state,
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    named = ([("param/" + n, a) for n, a in ckpt.params.named_arrays()]
             + [("adam_m/" + n, a) for n, a in ckpt.adam.m.named_arrays()]
             + [("adam_v/" + n, a) for n, a in ckpt.adam.v.named_arrays()])
    parts = [struct.pack("<I", len(head)), head, struct.pack("<I", len(named))]
    for name, arr in named:
        raw = name.encode("utf-8")
        parts.append(struct.pack("<H", len(raw)) + raw)
        parts.append(struct.pack(f"<B{arr.ndim}I", arr.ndim, *arr.shape))
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    payload = b"".join(parts)
    body = _PREFIX.pack(MAGIC, ckpt.version, len(payload)) + payload
    return body + _CHECKSUM.pack(_checksum(body))


class _Reader:
    def __init__(self, data):
        self.data = data
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.data):
            raise TruncatedCheckpointError("checkpoint payload ends early")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        s = struct.Struct(fmt)
        return s.unpack(self.take(s.size))


def loads(data):
    data = bytes(data)
    if len(data) < _PREFIX.size:
        raise TruncatedCheckpointError("file is shorter than the checkpoint prefix")
    magic, version, n = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic bytes)")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"checkpoint version {version}, expected {FORMAT_VERSION}")
    end = _PREFIX.size + n
    if len(data) < end + _CHECKSUM.size:
        raise TruncatedCheckpointError(
            f"checkpoint truncated: {len(data)} bytes, expected {end + _CHECKSUM.size}")
    if len(data) > end + _CHECKSUM.size:
        raise ChecksumError("trailing bytes after checkpoint checksum")
    (stored,) = _CHECKSUM.unpack_from(data, end)
    if stored != _checksum(data[:end]):
        raise ChecksumError("checkpoint checksum mismatch")

    r = _Reader(data[_PREFIX.size:end])
    (hlen,) = r.unpack("<I")
    header = json.loads(r.take(hlen).decode("utf-8"))
    (count,) = r.unpack("<I")
    arrays = {}
    for _ in range(count):
        (nlen,) = r.unpack("<H")
        name = r.take(nlen).decode("utf-8")
        (ndim,) = r.unpack("<B")
        shape = r.unpack(f"<{ndim}I") if ndim else ()
        size = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(r.take(8 * size), dtype="<f8").astype(np.float64).reshape(shape)
        arrays[name] = arr

    def tree(prefix):
        names = sorted((k for k in arrays if k.startswith(prefix)), key=_canonical_key)
        return LstmParameters.from_arrays(arrays[k] for k in names)

    hyper = dict(header["hyper"])
    return TrainingCheckpoint(
        config=ModelConfig(**header["config"]),
        params=tree("param/"),
        adam=AdamState(tree("adam_m/"), tree("adam_v/"), header["adam_t"]),
        hyper=AdamHyper(**hyper),
        iteration=header["iteration"],
        loss_at_capture=float.fromhex(header["loss_at_capture"]),
        vocab=Vocabulary(header["vocab"]),
        rng_state=header["rng_state"],
        version=version,
    )


def _canonical_key(name):
    # "param/layer10.U" must sort after "param/layer2.b"; projection arrays last
    _, local = name.split("/", 1)
    group, leaf = local.split(".")
    if group == "proj":
        return (1, 0, "Pc".index(leaf))
    return (0, int(group[len("layer"):]), "WUb".index(leaf))


def save_checkpoint(ckpt, sink):
    """Write ``ckpt`` to a path or binary file object."""
    data = dumps(ckpt)
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as fh:
            fh.write(data)


def load_checkpoint(source):
    if hasattr(source, "read"):
        return loads(source.read())
    with open(source, "rb") as fh:
        return loads(fh.read())
