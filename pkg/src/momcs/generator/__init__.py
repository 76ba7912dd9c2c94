from .network import (
    DimensionMismatchError,
    ForwardCache,
    GeneratorDefinitionError,
    GeneratorNet,
    LatentVector,
    as_latent,
    forward,
    forward_with_cache,
    latent_gradient,
    random_generator,
)
from .weights_file import (
    BadMagicError,
    TruncatedWeightFileError,
    WeightFileError,
    WeightPayloadMismatchError,
    load_weights,
    save_weights,
)
