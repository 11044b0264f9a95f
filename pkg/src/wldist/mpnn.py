"""Message passing networks with order-normalised sum aggregation.

Layer ``t`` computes ``h_v = act(W_t @ (sum_{u in N(v)} h_u / |V|) + b_t)``;
the graph embedding is ``psi(mean_v h_v^(L))``.

:func:`certify` bounds how far embeddings can move per unit of
Wasserstein WL distance. It needs two per-layer quantities: a Lipschitz
bound ``lip_t`` of the layer map and a bound ``r_t`` on the Euclidean
norm of any feature the layer can output. Aggregated messages are
integrals against measures of mass at most one, so their norm never
exceeds ``r_{t-1}``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

SCHEMA_VERSION = 1

ACTIVATIONS = {
    "relu": lambda x: np.maximum(x, 0.0),
    "tanh": np.tanh,
    "identity": lambda x: x,
}


@dataclass(frozen=True)
class Layer:
    weight: np.ndarray      # shape (d_out, d_in)
    bias: np.ndarray        # shape (d_out,)
    activation: str = "identity"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        w = np.asarray(self.weight, dtype=float)
        b = np.asarray(self.bias, dtype=float)
        if w.ndim != 2 or b.shape != (w.shape[0],):
            raise ValueError("weight must be (d_out, d_in) and bias (d_out,)")
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)

    @property
    def d_in(self):
        return self.weight.shape[1]

    @property
    def d_out(self):
        return self.weight.shape[0]

    def __call__(self, x):
        return ACTIVATIONS[self.activation](x @ self.weight.T + self.bias)


@dataclass(frozen=True)
class MpnnModel:
    initial: np.ndarray
    layers: tuple[Layer, ...]
    readout: Layer
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        init = np.asarray(self.initial, dtype=float).reshape(-1)
        object.__setattr__(self, "initial", init)
        object.__setattr__(self, "layers", tuple(self.layers))
        d = init.shape[0]
        for t, layer in enumerate(self.layers, 1):
            if layer.d_in != d:
                raise ValueError(f"layer {t} expects width {layer.d_in}, gets {d}")
            d = layer.d_out
        if self.readout.d_in != d:
            raise ValueError(f"readout expects width {self.readout.d_in}, gets {d}")

    @property
    def depth(self):
        return len(self.layers)

    @property
    def dims(self):
        return (self.initial.shape[0], *(l.d_out for l in self.layers), self.readout.d_out)


def random_model(dims, activation="relu", seed=0, scale=1.0, readout_activation=None):
    """Gaussian weights ``N(0, scale**2)``, zero biases, all-ones initial features.

    ``dims = (d_0, d_1, ..., d_L, d)``; the last entry is the readout width.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 2 or min(dims) < 1:
        raise ValueError("dims needs at least an input and an output width, all >= 1")
    rng = np.random.default_rng(seed)
    layers = []
    for d_in, d_out in zip(dims[:-2], dims[1:-1]):
        layers.append(Layer(rng.normal(0.0, scale, (d_out, d_in)) if scale else np.zeros((d_out, d_in)),
                            np.zeros(d_out), activation))
    d_in, d_out = dims[-2], dims[-1]
    readout = Layer(rng.normal(0.0, scale, (d_out, d_in)) if scale else np.zeros((d_out, d_in)),
                    np.zeros(d_out), readout_activation or activation)
    return MpnnModel(np.ones(dims[0]), tuple(layers), readout, seed)


def _aggregate(G, H):
    out = np.zeros_like(H)
    for v, nb in enumerate(G.adj):
        if nb:
            out[v] = H[list(nb)].sum(axis=0)
    return out / G.n


def vertex_features(G: Graph, model: MpnnModel):
    """Feature tables ``[h^(0), ..., h^(L)]``, each of shape ``(|V|, d_t)``."""
    if G.n == 0:
        raise ValueError("empty graph")
    H = np.tile(model.initial, (G.n, 1))
    feats = [H]
    for layer in model.layers:
        H = layer(_aggregate(G, H))
        feats.append(H)
    return feats


def embed(G: Graph, model: MpnnModel):
    final = vertex_features(G, model)[-1]
    return model.readout(final.mean(axis=0))


def embedding_distance(G, H, model):
    return float(np.linalg.norm(embed(G, model) - embed(H, model)))


# ---------------------------------------------------------------- certificate

@dataclass(frozen=True)
class LipschitzCertificate:
    radius: tuple[float, ...]     # r_0..r_L: Euclidean bounds on reachable features
    lip: tuple[float, ...]        # lip_1..lip_L, then the readout's
    model_constant: float         # C_phi
    constant: float               # C_(phi, psi)

    def per_level(self):
        """``C_{phi_t}`` for ``t = 0..L``."""
        out = [0.0]
        for t in range(len(self.radius) - 1):
            out.append(self.lip[t] * (self.radius[t] + out[-1]))
        return out


def _spectral_norm(W):
    if W.size == 0:
        return 0.0
    return float(np.linalg.norm(W, 2))


def _output_radius(layer, r_in, lip):
    bound = lip * r_in + float(np.linalg.norm(layer.bias))
    if layer.activation == "tanh":
        bound = min(bound, float(np.sqrt(layer.d_out)))
    return bound


def certify(model: MpnnModel) -> LipschitzCertificate:
    """Lipschitz certificate ``C_t = lip_t * (r_{t-1} + C_{t-1})``, readout included.

    Every activation is 1-Lipschitz and satisfies ``|act(z)| <= |z|``
    coordinatewise, so ``lip_t`` is the spectral norm of ``W_t`` and
    ``r_t <= lip_t * r_{t-1} + |b_t|`` (tanh additionally caps at ``sqrt(d_t)``).
    """
    r = [float(np.linalg.norm(model.initial))]
    lips = []
    C = 0.0
    for layer in model.layers:
        lip = _spectral_norm(layer.weight)
        C = lip * (r[-1] + C)
        lips.append(lip)
        r.append(_output_radius(layer, r[-1], lip))
    lip_out = _spectral_norm(model.readout.weight)
    lips.append(lip_out)
    return LipschitzCertificate(tuple(r), tuple(lips), C, lip_out * (r[-1] + C))


def certified_lower_bound(G, H, model, certificate=None):
    """``embedding_distance / C_(phi, psi)``: never exceeds the depth-``L`` Wasserstein WL distance."""
    cert = certificate or certify(model)
    if cert.constant == 0:
        return 0.0
    return embedding_distance(G, H, model) / cert.constant


# ---------------------------------------------------------------- persistence

def _layer_doc(layer):
    return {"activation": layer.activation,
            "weight": layer.weight.tolist(),
            "bias": layer.bias.tolist()}


def _layer_from(doc):
    w = np.array(doc["weight"], dtype=float)
    b = np.array(doc["bias"], dtype=float)
    if w.size == 0:
        w = w.reshape(len(b), -1)
    return Layer(w, b, doc["activation"])


def model_to_dict(model):
    return {"schema_version": SCHEMA_VERSION,
            "dims": list(model.dims),
            "seed": model.seed,
            "initial": model.initial.tolist(),
            "layers": [_layer_doc(l) for l in model.layers],
            "readout": _layer_doc(model.readout)}


def model_from_dict(doc):
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema {doc.get('schema_version')!r}")
    return MpnnModel(np.array(doc["initial"], dtype=float),
                     tuple(_layer_from(l) for l in doc["layers"]),
                     _layer_from(doc["readout"]), doc.get("seed"))


def save_model(model, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh)


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))


def parse_model_spec(spec, input_dim=1, seed=0, scale=1.0):
    """``"64x2:relu"`` -> two hidden layers of width 64 and a width-64 readout."""
    try:
        shape, _, act = spec.partition(":")
        width, _, depth = shape.partition("x")
        width, depth = int(width), int(depth or 1)
    except ValueError:
        raise ValueError(f"bad model spec {spec!r}; expected WIDTHxLAYERS[:ACT]") from None
    act = act or "relu"
    return random_model((input_dim, *([width] * depth), width), act, seed, scale)


def model_fingerprint(model):
    """Hex digest of all parameters, for regression fixtures."""
    h = hashlib.sha256()
    for arr in (model.initial, *(x for l in (*model.layers, model.readout) for x in (l.weight, l.bias))):
        h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return h.hexdigest()
