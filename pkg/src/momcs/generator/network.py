"""
The fixed generative prior G: R^k -> R^n.

A `GeneratorNet` is a dense feed-forward ReLU network. The last layer is ReLU or identity depending on
`final_relu`. Nets are immutable once built: evaluations keep their intermediate values in a per-call
`ForwardCache`, so a single net can be shared by any number of concurrent workers.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from momcs.core.errors import MomcsError
from momcs.core.seeds import SeedLike, as_generator

logger = logging.getLogger(__name__)

LatentVector = np.ndarray
"""A float64 vector of length k, the input dimension of the generator."""


class GeneratorDefinitionError(MomcsError, ValueError):
    """Raised when layer dimensions, weights or biases do not describe a valid network."""

    pass


class DimensionMismatchError(MomcsError, ValueError):
    """Raised when a vector handed to the generator has the wrong length."""

    pass


@dataclass(frozen=True, eq=False)
class GeneratorNet:
    """
    Dense ReLU network with d layers.

    Args:
        layer_dims: [k, h1, ..., h_{d-1}, n]
        weights: d matrices, matrix l has shape (layer_dims[l + 1], layer_dims[l])
        biases: d vectors, bias l has length layer_dims[l + 1]
        final_relu: whether the last layer is followed by a ReLU

    Attributes:
        input_dim: k
        output_dim: n
        depth: d
    """

    layer_dims: Tuple[int, ...]
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    final_relu: bool = False

    def __post_init__(self):
        dims = tuple(int(d) for d in self.layer_dims)
        if len(dims) < 2:
            raise GeneratorDefinitionError(f"A network needs at least 2 layer dims, got {list(dims)}")
        if any(d < 1 for d in dims):
            raise GeneratorDefinitionError(f"All layer dims must be >= 1, got {list(dims)}")
        depth = len(dims) - 1
        if len(self.weights) != depth or len(self.biases) != depth:
            raise GeneratorDefinitionError(
                f"Expected {depth} weight matrices and {depth} bias vectors, "
                f"got {len(self.weights)} and {len(self.biases)}"
            )
        weights, biases = [], []
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            w = np.array(w, dtype=np.float64)
            b = np.array(b, dtype=np.float64)
            if w.shape != (dims[layer + 1], dims[layer]):
                raise GeneratorDefinitionError(
                    f"Weight {layer} has shape {w.shape}, expected {(dims[layer + 1], dims[layer])}"
                )
            if b.shape != (dims[layer + 1],):
                raise GeneratorDefinitionError(f"Bias {layer} has shape {b.shape}, expected {(dims[layer + 1],)}")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise GeneratorDefinitionError(f"Layer {layer} holds non-finite entries")
            w.setflags(write=False)
            b.setflags(write=False)
            weights.append(w)
            biases.append(b)
        object.__setattr__(self, "layer_dims", dims)
        object.__setattr__(self, "weights", tuple(weights))
        object.__setattr__(self, "biases", tuple(biases))
        object.__setattr__(self, "final_relu", bool(self.final_relu))

    @property
    def input_dim(self) -> int:
        return self.layer_dims[0]

    @property
    def output_dim(self) -> int:
        return self.layer_dims[-1]

    @property
    def depth(self) -> int:
        return len(self.weights)

    def is_rectified(self, layer: int) -> bool:
        """Whether layer `layer` (0 based) is followed by a ReLU."""
        return layer < self.depth - 1 or self.final_relu

    def activation_pattern(self, z: LatentVector) -> List[np.ndarray]:
        """
        Boolean masks of the strictly positive pre-activations of every rectified layer.
        Two latents with equal patterns lie in the same linear piece of G.
        """
        _, cache = forward_with_cache(self, z)
        return [pre > 0 for layer, pre in enumerate(cache.pre_activations) if self.is_rectified(layer)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GeneratorNet):
            return NotImplemented
        return (
            self.layer_dims == other.layer_dims
            and self.final_relu == other.final_relu
            and all(np.array_equal(a, b) for a, b in zip(self.weights, other.weights))
            and all(np.array_equal(a, b) for a, b in zip(self.biases, other.biases))
        )

    def __repr__(self) -> str:
        return f"GeneratorNet(layer_dims={list(self.layer_dims)}, final_relu={self.final_relu})"


@dataclass
class ForwardCache:
    """
    Per-call workspace of a forward pass.

    Attributes:
        inputs: the input of every layer (inputs[0] is z)
        pre_activations: W_l x_l + b_l for every layer
        output: G(z)
    """

    inputs: List[np.ndarray] = field(default_factory=list)
    pre_activations: List[np.ndarray] = field(default_factory=list)
    output: Optional[np.ndarray] = None


def as_latent(net: GeneratorNet, z: Sequence[float]) -> LatentVector:
    """
    Validate a latent vector against the generator input dimension.
    Raises:
        DimensionMismatchError: when the length differs from k or the vector is not one dimensional.
    """
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or z.shape[0] != net.input_dim:
        raise DimensionMismatchError(f"Expected a latent vector of length {net.input_dim}, got shape {z.shape}")
    return z


def forward_with_cache(net: GeneratorNet, z: Sequence[float]) -> Tuple[np.ndarray, ForwardCache]:
    """
    Evaluate G(z) and keep the pre-activations needed by `latent_gradient`.
    Args:
        net: the generator
        z: latent vector of length k

    Returns:
        The output vector of length n and the cache of the pass.
    """
    x = as_latent(net, z)
    cache = ForwardCache()
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        cache.inputs.append(x)
        pre = w @ x + b
        cache.pre_activations.append(pre)
        x = np.maximum(pre, 0.0) if net.is_rectified(layer) else pre
    cache.output = x
    return x, cache


def forward(net: GeneratorNet, z: Sequence[float]) -> np.ndarray:
    """
    Evaluate G(z) = s_d(W_d(... s_1(W_1 z + b_1) ...) + b_d).
    """
    return forward_with_cache(net, z)[0]


def latent_gradient(
    net: GeneratorNet,
    z: Sequence[float],
    upstream: Sequence[float],
    cache: Optional[ForwardCache] = None,
) -> np.ndarray:
    """
    Back-propagate `upstream` through the generator: returns J(z)^T upstream, J = dG/dz.
    The ReLU derivative is 0 at exactly zero pre-activations.
    Args:
        net: the generator
        z: latent vector of length k
        upstream: vector of length n
        cache: the cache of a forward pass at the same z; computed when omitted

    Returns:
        A vector of length k.
    """
    z = as_latent(net, z)
    grad = np.asarray(upstream, dtype=np.float64)
    if grad.ndim != 1 or grad.shape[0] != net.output_dim:
        raise DimensionMismatchError(f"Expected an upstream vector of length {net.output_dim}, got shape {grad.shape}")
    if cache is None:
        _, cache = forward_with_cache(net, z)
    for layer in reversed(range(net.depth)):
        if net.is_rectified(layer):
            grad = grad * (cache.pre_activations[layer] > 0)
        grad = net.weights[layer].T @ grad
    return grad


def random_generator(
    dims: Sequence[int],
    seed: SeedLike = None,
    scale: float = 1.0,
    final_relu: bool = False,
) -> GeneratorNet:
    """
    A random-weight generator standing in for a trained one.
    Weights of layer l are i.i.d. N(0, scale^2 / fan_in), biases are zero.
    Args:
        dims: [k, h1, ..., n]
        seed: seed of the weight draw
        scale: weight scale
        final_relu: whether the last layer is rectified

    Returns:
        A new GeneratorNet.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise GeneratorDefinitionError(f"A network needs at least 2 layer dims, got {dims}")
    if any(d < 1 for d in dims):
        raise GeneratorDefinitionError(f"All layer dims must be >= 1, got {dims}")
    rng = as_generator(seed)
    weights = [rng.normal(0.0, scale / np.sqrt(fan_in), size=(fan_out, fan_in)) for fan_in, fan_out in zip(dims[:-1], dims[1:])]
    biases = [np.zeros(fan_out) for fan_out in dims[1:]]
    logger.debug("Drew random generator with dims %s", dims)
    return GeneratorNet(layer_dims=tuple(dims), weights=tuple(weights), biases=tuple(biases), final_relu=final_relu)
