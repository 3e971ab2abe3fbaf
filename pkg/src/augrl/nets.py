"""Plain-numpy dense networks: forward, analytic backward, Adam, polyak.

All math is float64 and seeded through numpy Generators, so a run is
bit-reproducible. Networks here are tiny (a few hidden layers of tens of
units), which keeps hand-written backprop both fast enough and easy to
check against finite differences.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

HIDDEN_ACTIVATIONS = ("relu", "tanh")
OUTPUT_ACTIVATIONS = ("identity", "tanh")


class ShapeMismatchError(ValueError):
    """An array does not match the shapes declared by the network."""


class NonFiniteGradientError(FloatingPointError):
    """A gradient contained NaN or +-inf; the update would poison the net."""


@dataclass
class Mlp:
    """Fully connected net. weights[k] has shape (fan_out, fan_in)."""

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    hidden_activation: str = "relu"
    output_activation: str = "identity"

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> "Mlp":
        return Mlp(
            layer_sizes=self.layer_sizes,
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            hidden_activation=self.hidden_activation,
            output_activation=self.output_activation,
        )


@dataclass
class MlpGrads:
    """Parameter gradients, same shapes as the owning Mlp."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]


def mlp_init(
    layer_sizes: tuple[int, ...] | list[int],
    rng: np.random.Generator,
    hidden_activation: str = "relu",
    output_activation: str = "identity",
) -> Mlp:
    """Create an Mlp with uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) params."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or any(s <= 0 for s in sizes):
        raise ValueError(f"layer_sizes must be >=2 positive ints, got {sizes}")
    if hidden_activation not in HIDDEN_ACTIVATIONS:
        raise ValueError(f"hidden_activation must be one of {HIDDEN_ACTIVATIONS}")
    if output_activation not in OUTPUT_ACTIVATIONS:
        raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")
    weights: list[np.ndarray] = []
    biases: list[np.ndarray] = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return Mlp(sizes, weights, biases, hidden_activation, output_activation)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    return z  # identity


def _activation_grad(kind: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    """d activation / d pre-activation, from pre-activation z and output a."""
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    if kind == "tanh":
        return 1.0 - a * a
    return np.ones_like(z)


def _as_batch(net: Mlp, x: np.ndarray) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    xb = x[None, :] if single else x
    if xb.ndim != 2 or xb.shape[1] != net.input_dim:
        raise ShapeMismatchError(
            f"expected input with {net.input_dim} features, got shape {x.shape}"
        )
    return xb, single


def _forward_cached(net: Mlp, xb: np.ndarray) -> tuple[np.ndarray, list, list]:
    """Forward pass keeping per-layer inputs and pre-activations for backprop."""
    inputs = []  # activation feeding each layer
    preacts = []
    h = xb
    last = len(net.weights) - 1
    for k, (w, b) in enumerate(zip(net.weights, net.biases)):
        inputs.append(h)
        z = h @ w.T + b
        preacts.append(z)
        kind = net.output_activation if k == last else net.hidden_activation
        h = _activate(z, kind)
    return h, inputs, preacts


def mlp_forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """Evaluate the net on one input (1-D) or a batch (2-D, rows are inputs)."""
    xb, single = _as_batch(net, x)
    y, _, _ = _forward_cached(net, xb)
    return y[0] if single else y


def _backward_from_cache(
    net: Mlp,
    inputs: list,
    preacts: list,
    outputs: np.ndarray,
    upstream: np.ndarray,
) -> tuple[MlpGrads, np.ndarray]:
    """Backprop upstream (d loss / d output) through a cached forward pass.

    Parameter gradients are summed over the batch; the input gradient keeps
    batch shape.
    """
    last = len(net.weights) - 1
    w_grads: list[np.ndarray] = [None] * len(net.weights)  # type: ignore[list-item]
    b_grads: list[np.ndarray] = [None] * len(net.biases)  # type: ignore[list-item]
    delta = upstream * _activation_grad(net.output_activation, preacts[last], outputs)
    for k in range(last, -1, -1):
        w_grads[k] = delta.T @ inputs[k]
        b_grads[k] = delta.sum(axis=0)
        if k > 0:
            back = delta @ net.weights[k]
            a_prev = inputs[k]  # activation that layer k consumed
            delta = back * _activation_grad(net.hidden_activation, preacts[k - 1], a_prev)
        else:
            input_grad = delta @ net.weights[0]
    return MlpGrads(w_grads, b_grads), input_grad


def forward_cached(net: Mlp, xb: np.ndarray) -> tuple[np.ndarray, tuple]:
    """Batched forward returning (outputs, cache) for backward_from_cache.

    Two-phase variant of mlp_backward for callers that need the outputs
    before choosing the upstream gradient (e.g. regression residuals).
    """
    if xb.ndim != 2 or xb.shape[1] != net.input_dim:
        raise ShapeMismatchError(
            f"expected batch with {net.input_dim} features, got shape {xb.shape}"
        )
    y, inputs, preacts = _forward_cached(net, xb)
    return y, (inputs, preacts, y)


def backward_from_cache(
    net: Mlp, cache: tuple, upstream: np.ndarray
) -> tuple[MlpGrads, np.ndarray]:
    """Backprop through a forward_cached pass; grads sum over the batch."""
    inputs, preacts, outputs = cache
    if upstream.shape != outputs.shape:
        raise ShapeMismatchError(
            f"expected upstream shape {outputs.shape}, got {upstream.shape}"
        )
    return _backward_from_cache(net, inputs, preacts, outputs, upstream)


def mlp_backward(
    net: Mlp, x: np.ndarray, upstream: np.ndarray
) -> tuple[MlpGrads, np.ndarray]:
    """Gradients of sum(output * upstream) w.r.t. parameters and input.

    upstream must match the output shape (per sample for batched x). The
    returned input gradient has the same shape as x.
    """
    xb, single = _as_batch(net, x)
    up = np.asarray(upstream, dtype=np.float64)
    up_b = up[None, :] if single else up
    if up_b.shape != (xb.shape[0], net.output_dim):
        raise ShapeMismatchError(
            f"expected upstream shape {(xb.shape[0], net.output_dim)}, got {up.shape}"
        )
    y, inputs, preacts = _forward_cached(net, xb)
    grads, input_grad = _backward_from_cache(net, inputs, preacts, y, up_b)
    return grads, (input_grad[0] if single else input_grad)


@dataclass
class AdamState:
    """Adam with bias correction; moments mirror the parameter shapes."""

    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    m_weights: list[np.ndarray] = field(default_factory=list)
    v_weights: list[np.ndarray] = field(default_factory=list)
    m_biases: list[np.ndarray] = field(default_factory=list)
    v_biases: list[np.ndarray] = field(default_factory=list)


def adam_init(
    net: Mlp,
    learning_rate: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    epsilon: float = 1e-8,
) -> AdamState:
    if learning_rate <= 0.0:
        raise ValueError("learning_rate must be positive")
    return AdamState(
        learning_rate=learning_rate,
        beta1=beta1,
        beta2=beta2,
        epsilon=epsilon,
        m_weights=[np.zeros_like(w) for w in net.weights],
        v_weights=[np.zeros_like(w) for w in net.weights],
        m_biases=[np.zeros_like(b) for b in net.biases],
        v_biases=[np.zeros_like(b) for b in net.biases],
    )


def _adam_apply(
    p: np.ndarray,
    g: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    lr: float,
    b1: float,
    b2: float,
    eps: float,
    bc1: float,
    bc2: float,
) -> None:
    m *= b1
    m += (1.0 - b1) * g
    v *= b2
    v += (1.0 - b2) * (g * g)
    p -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


def adam_step(state: AdamState, net: Mlp, grads: MlpGrads) -> None:
    """One in-place Adam update of net from grads."""
    if len(grads.weights) != len(net.weights):
        raise ShapeMismatchError("gradient layer count does not match net")
    for g in (*grads.weights, *grads.biases):
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError("non-finite gradient")
    state.step_count += 1
    bc1 = 1.0 - state.beta1 ** state.step_count
    bc2 = 1.0 - state.beta2 ** state.step_count
    for p, g, m, v in zip(net.weights, grads.weights, state.m_weights, state.v_weights):
        if p.shape != g.shape:
            raise ShapeMismatchError(f"weight grad shape {g.shape} != {p.shape}")
        _adam_apply(p, g, m, v, state.learning_rate, state.beta1, state.beta2,
                    state.epsilon, bc1, bc2)
    for p, g, m, v in zip(net.biases, grads.biases, state.m_biases, state.v_biases):
        if p.shape != g.shape:
            raise ShapeMismatchError(f"bias grad shape {g.shape} != {p.shape}")
        _adam_apply(p, g, m, v, state.learning_rate, state.beta1, state.beta2,
                    state.epsilon, bc1, bc2)


def polyak_update(target: Mlp, source: Mlp, tau: float) -> None:
    """target <- tau * target + (1 - tau) * source, in place.

    tau is the retained fraction of the target, so tau=1 freezes the target
    and tau=0 copies the source.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    if target.layer_sizes != source.layer_sizes:
        raise ShapeMismatchError("target and source architectures differ")
    for t, s in zip(target.weights, source.weights):
        t *= tau
        t += (1.0 - tau) * s
    for t, s in zip(target.biases, source.biases):
        t *= tau
        t += (1.0 - tau) * s


def clone_as_target(net: Mlp) -> Mlp:
    """Deep copy used to start a target network identical to its source."""
    return copy.deepcopy(net)
