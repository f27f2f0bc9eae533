"""Binary weight-file writer (and reader, for round-trip checks).

Produces exactly the container the inference engine consumes:
little-endian, magic "RGWT", format version 1, a config block
(num_blocks, num_heads, hidden_dim, input_dim as u32, pe_mode as u8), a
u32 tensor count, then per tensor a u16-length utf-8 name, u8 rank, u32
dims and row-major float32 data. Tensors are written in sorted name
order.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from .model import INPUT_DIM, PE_CODE_DEGREE, ModelSpec, RoleClassifier

MAGIC = b"RGWT"
FORMAT_VERSION = 1


def pack_weights(tensors: dict[str, np.ndarray], spec: ModelSpec) -> bytes:
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<IIIII", FORMAT_VERSION, spec.num_blocks,
                          spec.num_heads, spec.hidden_dim, INPUT_DIM))
    buf.write(struct.pack("<B", PE_CODE_DEGREE))
    names = sorted(tensors)
    buf.write(struct.pack("<I", len(names)))
    for name in names:
        arr = np.ascontiguousarray(tensors[name], dtype=np.float32)
        encoded = name.encode("utf-8")
        buf.write(struct.pack("<H", len(encoded)))
        buf.write(encoded)
        buf.write(struct.pack("<B", arr.ndim))
        for dim in arr.shape:
            buf.write(struct.pack("<I", dim))
        buf.write(arr.tobytes(order="C"))
    return buf.getvalue()


def export_weights(model: RoleClassifier, path: Path | str) -> None:
    Path(path).write_bytes(pack_weights(model.export_tensors(), model.spec))


def read_weights(path: Path | str) -> tuple[ModelSpec, dict[str, np.ndarray]]:
    """Parse a container back (round-trip tests and warm starts)."""
    data = Path(path).read_bytes()
    pos = 0

    def take(count):
        nonlocal pos
        if pos + count > len(data):
            raise ValueError("weight file truncated")
        out = data[pos:pos + count]
        pos += count
        return out

    if take(4) != MAGIC:
        raise ValueError("bad magic")
    version, num_blocks, num_heads, hidden_dim, input_dim = struct.unpack(
        "<IIIII", take(20))
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported version {version}")
    if input_dim != INPUT_DIM:
        raise ValueError(f"unexpected input_dim {input_dim}")
    (pe_code,) = struct.unpack("<B", take(1))
    if pe_code != PE_CODE_DEGREE:
        raise ValueError(f"unexpected pe mode code {pe_code}")
    (count,) = struct.unpack("<I", take(4))
    tensors = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<H", take(2))
        name = take(name_len).decode("utf-8")
        (rank,) = struct.unpack("<B", take(1))
        dims = struct.unpack(f"<{rank}I", take(4 * rank))
        numel = int(np.prod(dims)) if rank else 1
        tensors[name] = np.frombuffer(
            take(4 * numel), dtype="<f4").reshape(dims).copy()
    if pos != len(data):
        raise ValueError("trailing bytes")
    return ModelSpec(num_blocks, num_heads, hidden_dim), tensors


def load_model(path: Path | str) -> RoleClassifier:
    spec, tensors = read_weights(path)
    model = RoleClassifier(spec)
    model.load_tensors(tensors)
    model.eval()
    return model
