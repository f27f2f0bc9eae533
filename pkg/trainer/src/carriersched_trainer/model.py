"""Attention-GNN node classifier, float64 end to end.

The math mirrors the inference engine's forward pass exactly: per block a
node-wise relu feed-forward and a multi-head additive-attention
aggregation over each node's closed neighborhood, each wrapped in a skip
connection plus layer normalization; a final linear map yields three role
logits per node. Keeping both sides at the same formulas in double
precision is what makes the exported-weight logit parity tight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

LAYER_NORM_EPS = 1e-5
ATTN_LEAKY_SLOPE = 0.2
NUM_CLASSES = 3
INPUT_DIM = 4  # hosted, node id, min tag id, degree PE

PE_CODE_DEGREE = 1


@dataclass(frozen=True)
class ModelSpec:
    num_blocks: int = 12
    num_heads: int = 12
    hidden_dim: int = 72

    def __post_init__(self):
        if self.hidden_dim % self.num_heads != 0:
            raise ValueError("hidden_dim must be divisible by num_heads")

    @property
    def head_dim(self) -> int:
        return self.hidden_dim // self.num_heads


class AttentionHead(nn.Module):
    """Parameter holder; the math runs stacked across heads in Block."""

    def __init__(self, hidden: int, head_dim: int):
        super().__init__()
        self.wq = nn.Parameter(torch.empty(head_dim, hidden))
        self.wk = nn.Parameter(torch.empty(head_dim, hidden))
        self.wv = nn.Parameter(torch.empty(head_dim, hidden))
        self.a = nn.Parameter(torch.empty(2 * head_dim))


class Block(nn.Module):
    def __init__(self, spec: ModelSpec):
        super().__init__()
        h = spec.hidden_dim
        self.ff = nn.Linear(h, h)
        self.ln1 = nn.LayerNorm(h, eps=LAYER_NORM_EPS)
        self.heads = nn.ModuleList(
            AttentionHead(h, spec.head_dim) for _ in range(spec.num_heads))
        self.attn_out = nn.Linear(h, h)
        self.ln2 = nn.LayerNorm(h, eps=LAYER_NORM_EPS)

    def _attention(self, h, src, dst):
        """All heads at once: (n, M, dh) projections, edge-wise additive
        scores softmax-normalized per destination node."""
        m = len(self.heads)
        dh = self.heads[0].wq.shape[0]
        n = h.shape[0]
        wq = torch.stack([head.wq for head in self.heads])  # (M, dh, H)
        wk = torch.stack([head.wk for head in self.heads])
        wv = torch.stack([head.wv for head in self.heads])
        a = torch.stack([head.a for head in self.heads])    # (M, 2*dh)
        query = torch.einsum("nh,mdh->nmd", h, wq)
        key = torch.einsum("nh,mdh->nmd", h, wk)
        value = torch.einsum("nh,mdh->nmd", h, wv)
        scores = torch.nn.functional.leaky_relu(
            (query[dst] * a[:, :dh]).sum(-1) + (key[src] * a[:, dh:]).sum(-1),
            negative_slope=ATTN_LEAKY_SLOPE)                # (E, M)
        smax = torch.full((n, m), -torch.inf, dtype=h.dtype)
        smax = smax.scatter_reduce(0, dst[:, None].expand(-1, m), scores,
                                   reduce="amax")
        shifted = torch.exp(scores - smax[dst])
        denom = torch.zeros(n, m, dtype=h.dtype).index_add(0, dst, shifted)
        alpha = shifted / denom[dst]                        # (E, M)
        out = torch.zeros(n, m, dh, dtype=h.dtype)
        out = out.index_add(0, dst, alpha[:, :, None] * value[src])
        return out.reshape(n, m * dh)  # row-major = heads concatenated

    def forward(self, h, src, dst):
        h = self.ln1(h + torch.relu(self.ff(h)))
        return self.ln2(h + self.attn_out(self._attention(h, src, dst)))


class RoleClassifier(nn.Module):
    """dtype: float64 for inference parity checks; float32 trains faster."""

    def __init__(self, spec: ModelSpec = ModelSpec(),
                 dtype: torch.dtype = torch.float64):
        super().__init__()
        self.spec = spec
        self.embed = nn.Linear(INPUT_DIM, spec.hidden_dim)
        self.blocks = nn.ModuleList(Block(spec) for _ in range(spec.num_blocks))
        self.classify = nn.Linear(spec.hidden_dim, NUM_CLASSES)
        self.to(dtype)

    def forward(self, features: torch.Tensor, src: torch.Tensor,
                dst: torch.Tensor) -> torch.Tensor:
        h = self.embed(features.to(self.embed.weight.dtype))
        for block in self.blocks:
            h = block(h, src, dst)
        return self.classify(h)

    @torch.no_grad()
    def init_weights(self, seed: int):
        """Fan-in scaled normals, unit layer-norm gains, zero biases."""
        rng = np.random.default_rng(seed)
        for name, param in sorted(self.named_parameters()):
            if name.endswith(".bias") or ".ln" in name and name.endswith("bias"):
                param.zero_()
            elif ".ln" in name and name.endswith("weight"):
                param.fill_(1.0)
            else:
                fan_in = param.shape[-1]
                values = rng.normal(0.0, 1.0 / np.sqrt(fan_in),
                                    size=tuple(param.shape))
                param.copy_(torch.from_numpy(values))

    def export_tensors(self) -> dict[str, np.ndarray]:
        """Weights under the binary container's canonical tensor names."""
        out: dict[str, np.ndarray] = {
            "embed.w": self.embed.weight.detach().numpy(),
            "embed.b": self.embed.bias.detach().numpy(),
            "classify.w": self.classify.weight.detach().numpy(),
            "classify.b": self.classify.bias.detach().numpy(),
        }
        for i, block in enumerate(self.blocks):
            p = f"block{i}"
            out[f"{p}.ff.w"] = block.ff.weight.detach().numpy()
            out[f"{p}.ff.b"] = block.ff.bias.detach().numpy()
            out[f"{p}.ln1.g"] = block.ln1.weight.detach().numpy()
            out[f"{p}.ln1.b"] = block.ln1.bias.detach().numpy()
            for m, head in enumerate(block.heads):
                q = f"{p}.head{m}"
                out[f"{q}.wq"] = head.wq.detach().numpy()
                out[f"{q}.wk"] = head.wk.detach().numpy()
                out[f"{q}.wv"] = head.wv.detach().numpy()
                out[f"{q}.a"] = head.a.detach().numpy()
            out[f"{p}.attn_out.w"] = block.attn_out.weight.detach().numpy()
            out[f"{p}.attn_out.b"] = block.attn_out.bias.detach().numpy()
            out[f"{p}.ln2.g"] = block.ln2.weight.detach().numpy()
            out[f"{p}.ln2.b"] = block.ln2.bias.detach().numpy()
        return out

    @torch.no_grad()
    def load_tensors(self, tensors: dict[str, np.ndarray]):
        """Inverse of export_tensors; accepts float32 container payloads."""
        def put(param, name):
            param.copy_(torch.from_numpy(
                np.ascontiguousarray(tensors[name], dtype=np.float64)))

        put(self.embed.weight, "embed.w")
        put(self.embed.bias, "embed.b")
        put(self.classify.weight, "classify.w")
        put(self.classify.bias, "classify.b")
        for i, block in enumerate(self.blocks):
            p = f"block{i}"
            put(block.ff.weight, f"{p}.ff.w")
            put(block.ff.bias, f"{p}.ff.b")
            put(block.ln1.weight, f"{p}.ln1.g")
            put(block.ln1.bias, f"{p}.ln1.b")
            for m, head in enumerate(block.heads):
                q = f"{p}.head{m}"
                put(head.wq, f"{q}.wq")
                put(head.wk, f"{q}.wk")
                put(head.wv, f"{q}.wv")
                put(head.a, f"{q}.a")
            put(block.attn_out.weight, f"{p}.attn_out.w")
            put(block.attn_out.bias, f"{p}.attn_out.b")
            put(block.ln2.weight, f"{p}.ln2.g")
            put(block.ln2.bias, f"{p}.ln2.b")
