"""GNN model container and the binary weight-file format.

The inference engine never trains; it loads an immutable weight set
produced elsewhere. File layout (little-endian):

    magic "RGWT" | u32 version | u32 num_blocks | u32 num_heads |
    u32 hidden_dim | u32 input_dim | u8 pe_mode | u32 tensor_count |
    tensor records

each tensor record being

    u16 name_len | name (utf-8) | u8 rank | u32 dims[rank] |
    float32 data, row-major.

Tensor names and shapes are fully determined by the config; any missing,
extra, or misshapen tensor is an integrity error naming the offender.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, WeightFormatError, WeightIntegrityError
from .features import PeMode, feature_dim

MAGIC = b"RGWT"
FORMAT_VERSION = 1
LAYER_NORM_EPS = 1e-5
ATTN_LEAKY_SLOPE = 0.2
NUM_CLASSES = 3


@dataclass(frozen=True)
class GnnConfig:
    num_blocks: int = 12
    num_heads: int = 12
    hidden_dim: int = 72
    pe_mode: PeMode = PeMode.DEGREE

    def __post_init__(self):
        if self.num_blocks < 1 or self.num_heads < 1 or self.hidden_dim < 1:
            raise ConfigError("num_blocks, num_heads, hidden_dim must be >= 1")
        if self.hidden_dim % self.num_heads != 0:
            raise ConfigError(
                f"hidden_dim {self.hidden_dim} not divisible by "
                f"num_heads {self.num_heads}")

    @property
    def input_dim(self) -> int:
        return feature_dim(self.pe_mode)

    @property
    def head_dim(self) -> int:
        return self.hidden_dim // self.num_heads


def expected_shapes(config: GnnConfig) -> dict[str, tuple[int, ...]]:
    """Canonical tensor name -> shape map implied by a config."""
    h, d = config.hidden_dim, config.input_dim
    dh = config.head_dim
    shapes: dict[str, tuple[int, ...]] = {
        "embed.w": (h, d),
        "embed.b": (h,),
    }
    for i in range(config.num_blocks):
        p = f"block{i}"
        shapes[f"{p}.ff.w"] = (h, h)
        shapes[f"{p}.ff.b"] = (h,)
        shapes[f"{p}.ln1.g"] = (h,)
        shapes[f"{p}.ln1.b"] = (h,)
        for m in range(config.num_heads):
            q = f"{p}.head{m}"
            shapes[f"{q}.wq"] = (dh, h)
            shapes[f"{q}.wk"] = (dh, h)
            shapes[f"{q}.wv"] = (dh, h)
            shapes[f"{q}.a"] = (2 * dh,)
        shapes[f"{p}.attn_out.w"] = (h, h)
        shapes[f"{p}.attn_out.b"] = (h,)
        shapes[f"{p}.ln2.g"] = (h,)
        shapes[f"{p}.ln2.b"] = (h,)
    shapes["classify.w"] = (NUM_CLASSES, h)
    shapes["classify.b"] = (NUM_CLASSES,)
    return shapes


@dataclass(frozen=True, eq=False)
class GnnModel:
    """Immutable weight set; safe to share across concurrent requests."""

    config: GnnConfig
    tensors: dict[str, np.ndarray] = field(repr=False)

    def __post_init__(self):
        shapes = expected_shapes(self.config)
        missing = sorted(set(shapes) - set(self.tensors))
        extra = sorted(set(self.tensors) - set(shapes))
        if missing:
            raise WeightIntegrityError(f"missing tensor {missing[0]}")
        if extra:
            raise WeightIntegrityError(f"unexpected tensor {extra[0]}")
        for name, shape in shapes.items():
            got = self.tensors[name].shape
            if tuple(got) != shape:
                raise WeightIntegrityError(
                    f"tensor {name}: expected shape {shape}, found {tuple(got)}")


def save_weights(model: GnnModel) -> bytes:
    """Serialize to the binary container; tensors stored float32 row-major."""
    cfg = model.config
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<IIIII", FORMAT_VERSION, cfg.num_blocks,
                          cfg.num_heads, cfg.hidden_dim, cfg.input_dim))
    buf.write(struct.pack("<B", int(cfg.pe_mode)))
    names = sorted(model.tensors)
    buf.write(struct.pack("<I", len(names)))
    for name in names:
        arr = np.ascontiguousarray(model.tensors[name], dtype=np.float32)
        encoded = name.encode("utf-8")
        buf.write(struct.pack("<H", len(encoded)))
        buf.write(encoded)
        buf.write(struct.pack("<B", arr.ndim))
        for dim in arr.shape:
            buf.write(struct.pack("<I", dim))
        buf.write(arr.tobytes(order="C"))
    return buf.getvalue()


def save_weights_file(model: GnnModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(save_weights(model))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        if self.pos + count > len(self.data):
            raise WeightIntegrityError(f"file truncated while reading {what}")
        out = self.data[self.pos:self.pos + count]
        self.pos += count
        return out

    def u8(self, what: str) -> int:
        return struct.unpack("<B", self.take(1, what))[0]

    def u16(self, what: str) -> int:
        return struct.unpack("<H", self.take(2, what))[0]

    def u32(self, what: str) -> int:
        return struct.unpack("<I", self.take(4, what))[0]


def load_weights(data: bytes) -> GnnModel:
    """Parse and shape-check a weight file.

    Raises WeightFormatError on bad magic/version, ConfigError when the
    embedded config violates its invariants, and WeightIntegrityError for
    truncation or tensor-set mismatches (naming the offending tensor).
    """
    r = _Reader(data)
    if r.take(4, "magic") != MAGIC:
        raise WeightFormatError("bad magic; not a weight file")
    version = r.u32("version")
    if version != FORMAT_VERSION:
        raise WeightFormatError(f"unsupported format version {version}")
    num_blocks = r.u32("num_blocks")
    num_heads = r.u32("num_heads")
    hidden_dim = r.u32("hidden_dim")
    input_dim = r.u32("input_dim")
    pe_raw = r.u8("pe_mode")
    try:
        pe_mode = PeMode(pe_raw)
    except ValueError:
        raise ConfigError(f"unknown pe_mode code {pe_raw}") from None
    config = GnnConfig(num_blocks=num_blocks, num_heads=num_heads,
                       hidden_dim=hidden_dim, pe_mode=pe_mode)
    if input_dim != config.input_dim:
        raise ConfigError(
            f"input_dim {input_dim} inconsistent with pe_mode "
            f"{pe_mode.name} (expects {config.input_dim})")
    count = r.u32("tensor_count")
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        name_len = r.u16("tensor name length")
        name = r.take(name_len, "tensor name").decode("utf-8")
        rank = r.u8(f"rank of {name}")
        dims = tuple(r.u32(f"dim of {name}") for _ in range(rank))
        numel = 1
        for dim in dims:
            numel *= dim
        raw = r.take(4 * numel, f"data of {name}")
        if name in tensors:
            raise WeightIntegrityError(f"duplicate tensor {name}")
        tensors[name] = np.frombuffer(raw, dtype="<f4").reshape(dims).copy()
    if r.pos != len(data):
        raise WeightIntegrityError("trailing bytes after last tensor")
    return GnnModel(config, tensors)


def load_weights_file(path) -> GnnModel:
    with open(path, "rb") as fh:
        return load_weights(fh.read())


def random_model(config: GnnConfig, seed: int = 0) -> GnnModel:
    """Randomly initialized model (testing and benchmarking aid).

    Linear weights ~ N(0, 1/sqrt(fan_in)), biases 0, layer norm gains 1.
    """
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, shape in expected_shapes(config).items():
        leaf = name.rsplit(".", 1)[-1]
        if leaf in ("b",) or name.endswith("ln1.b") or name.endswith("ln2.b"):
            tensors[name] = np.zeros(shape, dtype=np.float32)
        elif name.endswith("ln1.g") or name.endswith("ln2.g"):
            tensors[name] = np.ones(shape, dtype=np.float32)
        else:
            fan_in = shape[-1]
            tensors[name] = rng.normal(
                0.0, 1.0 / np.sqrt(fan_in), size=shape).astype(np.float32)
    return GnnModel(config, tensors)
