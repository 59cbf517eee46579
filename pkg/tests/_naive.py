"""Slow, obviously-correct implementations used as oracles by the tests."""

from __future__ import annotations

import numpy as np


def naive_conv(x, w, b, stride, pad):
    """Quadruple-loop cross-correlation in float64."""
    c_in, _, _ = x.shape
    c_out, _, kh, kw = w.shape
    xp = np.pad(x.astype(np.float64), ((0, 0), (pad, pad), (pad, pad)))
    out_h = (xp.shape[1] - kh) // stride + 1
    out_w = (xp.shape[2] - kw) // stride + 1
    out = np.zeros((c_out, out_h, out_w))
    for oc in range(c_out):
        for i in range(out_h):
            for j in range(out_w):
                acc = float(b[oc])
                for ic in range(c_in):
                    for dy in range(kh):
                        for dx in range(kw):
                            acc += float(w[oc, ic, dy, dx]) * xp[
                                ic, i * stride + dy, j * stride + dx
                            ]
                out[oc, i, j] = acc
    return out


def naive_transposed_conv(x, w, b, stride, pad):
    """Scatter-style transposed convolution in float64.

    Weight layout is (out_channels, in_channels, kh, kw).
    """
    c_in, h, w_in = x.shape
    c_out, _, kh, kw = w.shape
    full = np.zeros((c_out, (h - 1) * stride + kh, (w_in - 1) * stride + kw))
    for ic in range(c_in):
        for i in range(h):
            for j in range(w_in):
                for oc in range(c_out):
                    for dy in range(kh):
                        for dx in range(kw):
                            full[oc, i * stride + dy, j * stride + dx] += float(
                                x[ic, i, j]
                            ) * float(w[oc, ic, dy, dx])
    out_h = (h - 1) * stride - 2 * pad + kh
    out_w = (w_in - 1) * stride - 2 * pad + kw
    out = full[:, pad : pad + out_h, pad : pad + out_w]
    return out + np.asarray(b, dtype=np.float64)[:, None, None]


def naive_subpixel(x, factor):
    """Index-formula pixel shuffle."""
    channels, h, w = x.shape
    out_c = channels // (factor * factor)
    out = np.zeros((out_c, h * factor, w * factor), dtype=x.dtype)
    for c in range(out_c):
        for i in range(h):
            for j in range(w):
                for dy in range(factor):
                    for dx in range(factor):
                        out[c, i * factor + dy, j * factor + dx] = x[
                            c * factor * factor + dy * factor + dx, i, j
                        ]
    return out


def naive_dct2(block):
    """Direct double-sum orthonormal type-II cosine transform of one block."""
    n = block.shape[0]
    out = np.zeros((n, n))
    for u in range(n):
        for v in range(n):
            cu = np.sqrt(1.0 / n) if u == 0 else np.sqrt(2.0 / n)
            cv = np.sqrt(1.0 / n) if v == 0 else np.sqrt(2.0 / n)
            acc = 0.0
            for x in range(n):
                for y in range(n):
                    acc += (
                        block[x, y]
                        * np.cos((2 * x + 1) * u * np.pi / (2 * n))
                        * np.cos((2 * y + 1) * v * np.pi / (2 * n))
                    )
            out[u, v] = cu * cv * acc
    return out
