"""Forward-only inference engine for convolutional image transforms.

Networks are flat lists of :class:`LayerSpec` records.  Residual blocks are
expressed with begin/end markers rather than nesting, so the whole network
serializes as a flat sequence.  All arithmetic runs in float32, matching the
training-side semantics of the exported weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InferenceError
from .quantizer import LATENT_BOUND

KIND_CONV = "conv"
KIND_TRANSPOSED_CONV = "transposed_conv"
KIND_LEAKY_RELU = "leaky_relu"
KIND_TANH = "tanh"
KIND_RESIDUAL_BEGIN = "residual_begin"
KIND_RESIDUAL_END = "residual_end"
KIND_SUBPIXEL = "subpixel"

_CONV_KINDS = (KIND_CONV, KIND_TRANSPOSED_CONV)
_ALL_KINDS = (
    KIND_CONV,
    KIND_TRANSPOSED_CONV,
    KIND_LEAKY_RELU,
    KIND_TANH,
    KIND_RESIDUAL_BEGIN,
    KIND_RESIDUAL_END,
    KIND_SUBPIXEL,
)


@dataclass(frozen=True, eq=False)
class LayerSpec:
    """One layer of a network in execution order.

    Only convolution kinds carry shape fields and parameters; for marker and
    activation layers every shape field stays zero.
    """

    kind: str
    out_channels: int = 0
    in_channels: int = 0
    kernel_h: int = 0
    kernel_w: int = 0
    stride: int = 0
    padding: int = 0
    slope: float = 0.0
    factor: int = 0
    weights: np.ndarray | None = field(default=None, repr=False)
    bias: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True, eq=False)
class NetworkWeights:
    """A full analysis/synthesis transform pair plus latent metadata."""

    encoder_layers: tuple[LayerSpec, ...]
    decoder_layers: tuple[LayerSpec, ...]
    latent_channels: int
    quantizer_step_hint: float


def _validate_layer(layer: LayerSpec, where: str) -> None:
    if layer.kind not in _ALL_KINDS:
        raise ConfigError(f"{where}: unknown layer kind {layer.kind!r}")
    if layer.kind in _CONV_KINDS:
        shape = (
            layer.out_channels,
            layer.in_channels,
            layer.kernel_h,
            layer.kernel_w,
        )
        if min(shape) < 1:
            raise ConfigError(f"{where}: convolution shape {shape} has a zero entry")
        if layer.stride < 1:
            raise ConfigError(f"{where}: stride must be >= 1, got {layer.stride}")
        if layer.padding < 0:
            raise ConfigError(f"{where}: padding must be >= 0, got {layer.padding}")
        if layer.weights is None or layer.bias is None:
            raise ConfigError(f"{where}: convolution layer is missing parameters")
        if layer.weights.shape != shape:
            raise ConfigError(
                f"{where}: weight shape {layer.weights.shape} does not match {shape}"
            )
        if layer.bias.shape != (layer.out_channels,):
            raise ConfigError(
                f"{where}: bias shape {layer.bias.shape} does not match "
                f"({layer.out_channels},)"
            )
    else:
        if layer.weights is not None or layer.bias is not None:
            raise ConfigError(f"{where}: {layer.kind} layer must not carry parameters")
        if layer.kind == KIND_SUBPIXEL and layer.factor < 1:
            raise ConfigError(f"{where}: subpixel factor must be >= 1, got {layer.factor}")


def _validate_markers(layers: tuple[LayerSpec, ...], section: str) -> None:
    depth = 0
    for index, layer in enumerate(layers):
        if layer.kind == KIND_RESIDUAL_BEGIN:
            depth += 1
        elif layer.kind == KIND_RESIDUAL_END:
            depth -= 1
            if depth < 0:
                raise ConfigError(
                    f"{section} layer {index}: residual end without matching begin"
                )
    if depth != 0:
        raise ConfigError(f"{section}: {depth} unterminated residual block(s)")


def validate_weights(net: NetworkWeights) -> None:
    """Check structural invariants; raise ConfigError on the first violation."""
    if net.latent_channels < 1:
        raise ConfigError(f"latent_channels must be >= 1, got {net.latent_channels}")
    if not math.isfinite(net.quantizer_step_hint) or net.quantizer_step_hint <= 0:
        raise ConfigError(
            f"quantizer_step_hint must be positive, got {net.quantizer_step_hint}"
        )
    if not net.encoder_layers:
        raise ConfigError("encoder has no layers")
    for section, layers in (("encoder", net.encoder_layers), ("decoder", net.decoder_layers)):
        for index, layer in enumerate(layers):
            _validate_layer(layer, f"{section} layer {index}")
        _validate_markers(layers, section)
    # The final encoder layer must bound the latent so quantization has the
    # whole [-1, 1] range to work with.
    if net.encoder_layers[-1].kind != KIND_TANH:
        raise ConfigError(
            f"final encoder layer must be tanh, got {net.encoder_layers[-1].kind}"
        )


def conv2d(x: np.ndarray, layer: LayerSpec) -> np.ndarray:
    """Strided cross-correlation of a (C, H, W) tensor with zero padding."""
    if x.shape[0] != layer.in_channels:
        raise InferenceError(
            f"expected {layer.in_channels} input channels, got {x.shape[0]}"
        )
    pad, stride = layer.padding, layer.stride
    kh, kw = layer.kernel_h, layer.kernel_w
    padded = np.pad(x, ((0, 0), (pad, pad), (pad, pad)))
    out_h = (padded.shape[1] - kh) // stride + 1
    out_w = (padded.shape[2] - kw) // stride + 1
    if out_h < 1 or out_w < 1:
        raise InferenceError(
            f"input {x.shape[2]}x{x.shape[1]} is too small for kernel "
            f"{kw}x{kh} with stride {stride}"
        )
    s0, s1, s2 = padded.strides
    patches = np.lib.stride_tricks.as_strided(
        padded,
        shape=(layer.in_channels, out_h, out_w, kh, kw),
        strides=(s0, s1 * stride, s2 * stride, s1, s2),
    )
    out = np.tensordot(layer.weights, patches, axes=([1, 2, 3], [0, 3, 4]))
    return (out + layer.bias[:, None, None]).astype(np.float32)


def transposed_conv2d(x: np.ndarray, layer: LayerSpec) -> np.ndarray:
    """Gradient-of-conv upsampling of a (C, H, W) tensor.

    Weight layout is (out_channels, in_channels, kh, kw), the transpose of
    the usual training-framework layout for this operation.
    """
    if x.shape[0] != layer.in_channels:
        raise InferenceError(
            f"expected {layer.in_channels} input channels, got {x.shape[0]}"
        )
    pad, stride = layer.padding, layer.stride
    kh, kw = layer.kernel_h, layer.kernel_w
    h, w = x.shape[1], x.shape[2]
    out_h = (h - 1) * stride - 2 * pad + kh
    out_w = (w - 1) * stride - 2 * pad + kw
    if out_h < 1 or out_w < 1:
        raise InferenceError(
            f"input {w}x{h} produces an empty {out_w}x{out_h} output"
        )
    # contrib[o, dy, dx, i, j] = sum_c w[o, c, dy, dx] * x[c, i, j]
    contrib = np.tensordot(layer.weights, x, axes=([1], [0]))
    full = np.zeros(
        (layer.out_channels, (h - 1) * stride + kh, (w - 1) * stride + kw),
        dtype=np.float32,
    )
    for dy in range(kh):
        for dx in range(kw):
            full[:, dy : dy + h * stride : stride, dx : dx + w * stride : stride] += (
                contrib[:, dy, dx]
            )
    out = full[:, pad : pad + out_h, pad : pad + out_w]
    return (out + layer.bias[:, None, None]).astype(np.float32)


def leaky_relu(x: np.ndarray, slope: float) -> np.ndarray:
    return np.where(x >= 0, x, np.float32(slope) * x)


def subpixel(x: np.ndarray, factor: int) -> np.ndarray:
    """Rearrange (C*r*r, H, W) into (C, H*r, W*r) pixel-shuffle style."""
    channels, h, w = x.shape
    if channels % (factor * factor) != 0:
        raise InferenceError(
            f"{channels} channels are not divisible by subpixel factor "
            f"{factor} squared"
        )
    out_c = channels // (factor * factor)
    blocks = x.reshape(out_c, factor, factor, h, w)
    return blocks.transpose(0, 3, 1, 4, 2).reshape(out_c, h * factor, w * factor)


def run_layers(x: np.ndarray, layers: tuple[LayerSpec, ...]) -> np.ndarray:
    """Execute a layer list on a (C, H, W) float32 tensor."""
    stack: list[np.ndarray] = []
    for index, layer in enumerate(layers):
        try:
            if layer.kind == KIND_CONV:
                x = conv2d(x, layer)
            elif layer.kind == KIND_TRANSPOSED_CONV:
                x = transposed_conv2d(x, layer)
            elif layer.kind == KIND_LEAKY_RELU:
                x = leaky_relu(x, layer.slope)
            elif layer.kind == KIND_TANH:
                x = np.tanh(x)
            elif layer.kind == KIND_RESIDUAL_BEGIN:
                stack.append(x)
            elif layer.kind == KIND_RESIDUAL_END:
                skip = stack.pop()
                if skip.shape != x.shape:
                    raise InferenceError(
                        f"residual skip shape {skip.shape} does not match "
                        f"block output {x.shape}"
                    )
                x = x + skip
            elif layer.kind == KIND_SUBPIXEL:
                x = subpixel(x, layer.factor)
            else:
                raise InferenceError(f"unknown layer kind {layer.kind!r}")
        except IndexError:
            raise InferenceError(f"layer {index}: residual end without begin") from None
        except InferenceError as exc:
            raise InferenceError(f"layer {index}: {exc}") from None
    if stack:
        raise InferenceError(f"{len(stack)} residual block(s) never terminated")
    return x


def encoder_stride_product(net: NetworkWeights) -> int:
    """Total spatial downsampling factor of the analysis transform."""
    product = 1
    for layer in net.encoder_layers:
        if layer.kind == KIND_CONV:
            product *= layer.stride
    return product


def normalize_image(image: np.ndarray) -> np.ndarray:
    """Map uint8 (H, W, C) pixels to float32 (C, H, W) values in [-1, 1]."""
    if image.ndim != 3:
        raise InferenceError(f"expected an (H, W, C) image, got shape {image.shape}")
    v = image.astype(np.float32) / np.float32(127.5) - np.float32(1.0)
    return np.ascontiguousarray(v.transpose(2, 0, 1))


def denormalize_image(x: np.ndarray) -> np.ndarray:
    """Map float32 (C, H, W) values back to uint8 (H, W, C) pixels."""
    v = (x.astype(np.float64) + 1.0) * 127.5
    v = np.clip(np.rint(v), 0, 255)
    return v.astype(np.uint8).transpose(1, 2, 0)


def encode_image(image: np.ndarray, net: NetworkWeights) -> np.ndarray:
    """Run the analysis transform on a uint8 (H, W, C) image.

    The result is a float32 (C', H', W') latent tensor inside
    [-LATENT_BOUND, LATENT_BOUND].
    """
    height, width = image.shape[0], image.shape[1]
    product = encoder_stride_product(net)
    if height % product != 0 or width % product != 0:
        raise InferenceError(
            f"image dimensions {width}x{height} must be divisible by the "
            f"encoder stride product {product}"
        )
    latent = run_layers(normalize_image(image), net.encoder_layers)
    if latent.shape[0] != net.latent_channels:
        raise InferenceError(
            f"encoder produced {latent.shape[0]} channels, header declares "
            f"{net.latent_channels}"
        )
    return np.clip(latent, -LATENT_BOUND, LATENT_BOUND).astype(np.float32)


def decode_latent(latent: np.ndarray, net: NetworkWeights) -> np.ndarray:
    """Run the synthesis transform; returns a uint8 (H, W, C) image."""
    if latent.ndim != 3 or latent.shape[0] != net.latent_channels:
        raise InferenceError(
            f"expected a ({net.latent_channels}, H, W) latent, got shape "
            f"{latent.shape}"
        )
    out = run_layers(latent.astype(np.float32), net.decoder_layers)
    return denormalize_image(out)
