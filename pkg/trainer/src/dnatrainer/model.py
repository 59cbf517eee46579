"""Convolutional autoencoder trained for the DNA-storage codec.

The layer vocabulary is restricted to what the codec's inference engine
executes — plain and transposed convolutions, leaky ReLU, tanh, additive
residual blocks, and sub-pixel upsampling — so every trained model can be
exported to the interchange weight format without approximation.
"""

from __future__ import annotations

import torch
from torch import nn


class Residual(nn.Module):
    """Adds the block input to the output of its body."""

    def __init__(self, body: nn.Sequential) -> None:
        super().__init__()
        self.body = body

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return x + self.body(x)


def _residual_block(channels: int, slope: float) -> Residual:
    return Residual(nn.Sequential(
        nn.Conv2d(channels, channels, kernel_size=3, stride=1, padding=1),
        nn.LeakyReLU(slope),
        nn.Conv2d(channels, channels, kernel_size=3, stride=1, padding=1),
    ))


def build_autoencoder(in_channels: int = 3, latent_channels: int = 4,
                      base_channels: int = 16,
                      slope: float = 0.2) -> tuple[nn.Sequential, nn.Sequential]:
    """Construct the encoder/decoder pair.

    The encoder downsamples by a total stride of 4 and ends in tanh so the
    latent fits the quantizer's bounded range.  The decoder mirrors it with
    one transposed convolution and one sub-pixel stage, restoring the input
    resolution.  Images enter and leave as ``in_channels``-plane tensors in
    the codec's normalized pixel range.
    """
    encoder = nn.Sequential(
        nn.Conv2d(in_channels, base_channels, kernel_size=3, stride=2, padding=1),
        nn.LeakyReLU(slope),
        _residual_block(base_channels, slope),
        nn.Conv2d(base_channels, latent_channels, kernel_size=3, stride=2, padding=1),
        nn.Tanh(),
    )
    decoder = nn.Sequential(
        nn.ConvTranspose2d(latent_channels, base_channels, kernel_size=4, stride=2, padding=1),
        nn.LeakyReLU(slope),
        _residual_block(base_channels, slope),
        nn.Conv2d(base_channels, in_channels * 4, kernel_size=3, stride=1, padding=1),
        nn.PixelShuffle(2),
    )
    return encoder, decoder


def seed_everything(seed: int) -> None:
    """Make model initialization and data order reproducible."""
    torch.manual_seed(seed)
