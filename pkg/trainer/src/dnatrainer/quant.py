"""Straight-through uniform quantization for latent tensors.

The forward pass applies the same midpoint rule the codec uses on encode:
``round-half-up to the nearest multiple of the step, then clamp to the
latent bound``.  The backward pass treats the whole operation as the
identity, so gradients flow through the quantizer unchanged and the
encoder can be trained end to end despite the zero-derivative staircase.
"""

from __future__ import annotations

import torch

LATENT_BOUND = 1.0


def hard_quantize(z: torch.Tensor, step: float) -> torch.Tensor:
    """Quantize ``z`` to the center of its cell and clamp to the bound.

    Matches the codec's encode-then-decode value exactly: the cell index
    is ``floor(z / step + 0.5)`` and the reconstruction is that index
    times ``step``, clipped to ``[-LATENT_BOUND, LATENT_BOUND]``.
    """
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    cells = torch.floor(z / step + 0.5)
    return torch.clamp(cells * step, -LATENT_BOUND, LATENT_BOUND)


def straight_through_quantize(z: torch.Tensor, step: float) -> torch.Tensor:
    """Quantize with identity gradients.

    Forward values equal :func:`hard_quantize`; the additive-detach form
    keeps the graph connected to ``z`` with derivative one everywhere.
    """
    return z + (hard_quantize(z, step) - z).detach()
