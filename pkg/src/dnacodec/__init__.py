"""Image codec and substitution-channel simulator for synthetic-DNA storage.

The pipeline maps an image through a bounded transform, a uniform scalar
quantizer, and a constrained quaternary code; the channel simulator applies
i.i.d. base substitutions; the decoder inverts each stage, repairing
corrupted codewords by nearest-codeword search.
"""

from .channel import LatentNoiseModel, SubstitutionChannel, perturb_latent, substitute
from .codebook import Codebook, CodebookConfig, bind_symbols, capacity, generate
from .codec import NucleotideSequence, decode_robust, decode_strict, encode
from .container import (
    ChannelRecord,
    ContainerHeader,
    DnaContainer,
    load_container,
    save_container,
    to_fasta,
)
from .errors import (
    CapacityError,
    ConfigError,
    DecodeError,
    DnaCodecError,
    DomainError,
    EncodeError,
    FormatError,
    InferenceError,
)
from .images import crop_to_size, load_image, pad_to_multiple, save_image
from .latent_dump import read_latent_dump, write_latent_dump
from .metrics import RateReport, SymbolHistogram, entropy_nt, histogram, psnr, rate_report
from .nn import LayerSpec, NetworkWeights, decode_latent, encode_image, validate_weights
from .pipeline import (
    Transform,
    apply_channel,
    decode_to_image,
    encode_to_container,
    parse_transform,
    reference_transform,
    roundtrip,
    weights_transform,
)
from .quantizer import (
    LATENT_BOUND,
    QuantizerConfig,
    dequantize,
    quantize,
    symbol_range,
)
from .reference import reference_decode, reference_encode
from .sweep import SweepRow, SweepSpec, run_sweep, write_csv
from .weights_io import load_weights, save_weights

__version__ = "0.1.0"
