"""Binary model serialization.

Container layout (little-endian):

    magic   4 bytes  "OCMS"
    u32     format version (1)
    u32     flags: bit0 center present, bit1 final bias present,
                   bit2 amortized head follows (no fixed final layer)
    u32     input_dim
    u32     n_hidden
    u32     hidden dim, n_hidden times
    u32     latent_dim
    f64[]   per hidden layer: weights (out x in, row-major), then bias (out)
    f64[]   final weights (latent x last_hidden), then final bias (latent)
            if bit1 -- both omitted when bit2 is set
    f64[]   center (latent) if bit0
    -- bit2 only --
    u32     inference hidden width 1
    u32     inference hidden width 2
    f64[]   three inference layers: weights (out x in, row-major), bias (out);
            the last layer has 2 x (final-layer parameter count) outputs

Weights are stored (out x in) and transposed back on load; round trips are
bit-exact.
"""

import struct

import numpy as np

from .errors import FormatError
from .mlp import EncoderConfig, EncoderParams

MAGIC = b"OCMS"
VERSION = 1
FLAG_CENTER = 1
FLAG_FINAL_BIAS = 2
FLAG_META = 4

_MAX_DIM = 1 << 24
_MAX_HIDDEN = 1024


def _pack_mat(w):
    # stored orientation is (out x in)
    return np.ascontiguousarray(w.T).astype("<f8").tobytes()


def _pack_vec(v):
    return np.ascontiguousarray(v).astype("<f8").tobytes()


class _Reader:
    def __init__(self, path, data):
        self.path = str(path)
        self.data = data
        self.off = 0

    def take(self, n, what):
        if self.off + n > len(self.data):
            raise FormatError(self.path, self.off, f"truncated while reading {what}")
        chunk = self.data[self.off : self.off + n]
        self.off += n
        return chunk

    def u32(self, what):
        return struct.unpack("<I", self.take(4, what))[0]

    def dim(self, what):
        d = self.u32(what)
        if not 1 <= d <= _MAX_DIM:
            raise FormatError(self.path, self.off - 4, f"implausible {what} ({d})")
        return d

    def f64s(self, count, what):
        raw = self.take(8 * count, what)
        return np.frombuffer(raw, dtype="<f8").astype(np.float64)

    def mat(self, out_dim, in_dim, what):
        flat = self.f64s(out_dim * in_dim, what)
        return np.ascontiguousarray(flat.reshape(out_dim, in_dim).T)

    def finish(self):
        if self.off != len(self.data):
            raise FormatError(self.path, self.off, "trailing bytes after payload")


def _header(config, flags):
    parts = [MAGIC, struct.pack("<II", VERSION, flags)]
    parts.append(struct.pack("<II", config.input_dim, len(config.hidden_dims)))
    for d in config.hidden_dims:
        parts.append(struct.pack("<I", d))
    parts.append(struct.pack("<I", config.latent_dim))
    return parts


def _read_header(r):
    magic = r.take(4, "magic")
    if magic != MAGIC:
        raise FormatError(r.path, 0, f"bad magic {magic!r}")
    version = r.u32("version")
    if version != VERSION:
        raise FormatError(r.path, 4, f"unsupported format version {version}")
    flags = r.u32("flags")
    input_dim = r.dim("input_dim")
    n_hidden = r.u32("hidden layer count")
    if n_hidden > _MAX_HIDDEN:
        raise FormatError(r.path, r.off - 4, f"implausible hidden layer count ({n_hidden})")
    hidden_dims = tuple(r.dim("hidden dim") for _ in range(n_hidden))
    latent_dim = r.dim("latent_dim")
    config = EncoderConfig(
        input_dim=input_dim,
        hidden_dims=hidden_dims,
        latent_dim=latent_dim,
        final_bias=bool(flags & FLAG_FINAL_BIAS),
    )
    return config, flags


def _read_trunk(r, config):
    hidden = []
    fan_in = config.input_dim
    for width in config.hidden_dims:
        w = r.mat(width, fan_in, "hidden weights")
        b = r.f64s(width, "hidden bias")
        hidden.append((w, b))
        fan_in = width
    return hidden, fan_in


def save_model(path, params, config, center=None):
    flags = 0
    if center is not None:
        flags |= FLAG_CENTER
    if config.final_bias:
        flags |= FLAG_FINAL_BIAS
    parts = _header(config, flags)
    for w, b in params.hidden:
        parts.append(_pack_mat(w))
        parts.append(_pack_vec(b))
    parts.append(_pack_mat(params.final_w))
    if config.final_bias:
        parts.append(_pack_vec(params.final_b))
    if center is not None:
        parts.append(_pack_vec(center))
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load_model(path):
    """Returns (params, config, center); center is None when absent."""
    with open(path, "rb") as f:
        data = f.read()
    r = _Reader(path, data)
    config, flags = _read_header(r)
    if flags & FLAG_META:
        raise FormatError(path, 8, "file holds an amortized-head model, not a plain encoder")
    hidden, fan_in = _read_trunk(r, config)
    final_w = r.mat(config.latent_dim, fan_in, "final weights")
    final_b = r.f64s(config.latent_dim, "final bias") if config.final_bias else None
    center = r.f64s(config.latent_dim, "center") if flags & FLAG_CENTER else None
    r.finish()
    return EncoderParams(hidden=hidden, final_w=final_w, final_b=final_b), config, center


def save_meta_model(path, trunk, config, inference_layers):
    """Trunk-plus-inference-net container (flag bit2); no fixed final layer."""
    flags = FLAG_META
    if config.final_bias:
        flags |= FLAG_FINAL_BIAS
    if len(inference_layers) != 3:
        raise ValueError("inference net must have exactly 3 layers")
    parts = _header(config, flags)
    for w, b in trunk:
        parts.append(_pack_mat(w))
        parts.append(_pack_vec(b))
    h1 = inference_layers[0][0].shape[1]
    h2 = inference_layers[1][0].shape[1]
    parts.append(struct.pack("<II", h1, h2))
    for w, b in inference_layers:
        parts.append(_pack_mat(w))
        parts.append(_pack_vec(b))
    with open(path, "wb") as f:
        f.write(b"".join(parts))


def load_meta_model(path):
    """Returns (trunk, config, inference_layers)."""
    with open(path, "rb") as f:
        data = f.read()
    r = _Reader(path, data)
    config, flags = _read_header(r)
    if not flags & FLAG_META:
        raise FormatError(path, 8, "file holds a plain encoder, not an amortized-head model")
    trunk, feat_dim = _read_trunk(r, config)
    h1 = r.dim("inference width 1")
    h2 = r.dim("inference width 2")
    n_final = feat_dim * config.latent_dim + (config.latent_dim if config.final_bias else 0)
    dims = [(h1, feat_dim), (h2, h1), (2 * n_final, h2)]
    layers = []
    for out_dim, in_dim in dims:
        w = r.mat(out_dim, in_dim, "inference weights")
        b = r.f64s(out_dim, "inference bias")
        layers.append((w, b))
    r.finish()
    return trunk, config, layers
