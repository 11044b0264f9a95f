import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_graph
from wldist.graph import (Graph, blowup, complete_graph, cycle_graph, disjoint_union,
                          empty_graph, sample_er)
from wldist.mpnn import (Layer, MpnnModel, certified_lower_bound, certify, embed,
                         embedding_distance, load_model, model_fingerprint, model_from_dict,
                         model_to_dict, parse_model_spec, random_model, save_model,
                         vertex_features)
from wldist.wl import delta_h

FIXTURE_FINGERPRINT = "544218e3fd5523e30b83ccd8f3ed243caed7ca20405e3f07a127ca7014b54392"


def identity_model(bias=0.0):
    one = Layer(np.eye(1), np.array([bias]), "identity")
    return MpnnModel(np.ones(1), (one,), Layer(np.eye(1), np.zeros(1), "identity"))


def relabel(G, perm):
    return Graph.from_edges(G.n, [(perm[u], perm[v]) for u, v in G.edges()])


def test_scalar_examples():
    m = identity_model()
    assert vertex_features(complete_graph(2), m)[1].ravel().tolist() == [0.5, 0.5]
    assert vertex_features(complete_graph(3), m)[1].ravel() == pytest.approx([2 / 3] * 3)
    assert embed(complete_graph(2), m) == pytest.approx([0.5])
    assert embed(complete_graph(3), m) == pytest.approx([2 / 3])
    assert embedding_distance(complete_graph(2), complete_graph(3), m) == pytest.approx(1 / 6)


def test_isolated_vertex_gets_layer_of_zero():
    m = identity_model(bias=0.25)
    assert vertex_features(empty_graph(1), m)[1].ravel().tolist() == [0.25]


def test_empty_graph_rejected():
    with pytest.raises(ValueError):
        embed(empty_graph(0), identity_model())


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        MpnnModel(np.ones(2), (Layer(np.eye(1), np.zeros(1)),), Layer(np.eye(1), np.zeros(1)))
    with pytest.raises(ValueError):
        Layer(np.eye(2), np.zeros(3))
    with pytest.raises(ValueError):
        Layer(np.eye(1), np.zeros(1), "sigmoid")


def test_random_model_determinism():
    a, b = random_model((1, 8, 8), seed=7), random_model((1, 8, 8), seed=7)
    assert model_fingerprint(a) == model_fingerprint(b) == FIXTURE_FINGERPRINT
    assert model_fingerprint(random_model((1, 8, 8), seed=8)) != FIXTURE_FINGERPRINT
    zero = random_model((1, 4, 4, 2), seed=3, scale=0)
    assert all(not l.weight.any() for l in (*zero.layers, zero.readout))
    assert zero.initial.tolist() == [1.0]


def test_parse_model_spec():
    m = parse_model_spec("64x2:relu", seed=1)
    assert m.dims == (1, 64, 64, 64) and m.depth == 2
    assert parse_model_spec("5x3:tanh").layers[0].activation == "tanh"
    with pytest.raises(ValueError):
        parse_model_spec("wide")


def test_certificate_examples():
    cert = certify(identity_model())
    assert cert.model_constant == 1
    # readout treated as one more layer: lip 1 times (r_1 + C_phi) = 1 + 1
    assert cert.constant == 2
    assert cert.per_level() == [0.0, 1.0]
    assert certify(random_model((1, 6, 6, 3), seed=2, scale=0)).constant == 0


def test_scaling_a_layer_scales_its_lipschitz_bound():
    m = random_model((1, 5, 4, 3), seed=11)
    c = 3.0
    layers = list(m.layers)
    layers[1] = Layer(c * layers[1].weight, layers[1].bias, layers[1].activation)
    scaled = certify(MpnnModel(m.initial, tuple(layers), m.readout))
    base = certify(m)
    assert scaled.lip[1] == pytest.approx(c * base.lip[1], rel=1e-12)
    assert scaled.lip[0] == base.lip[0] and scaled.lip[2] == base.lip[2]
    r = scaled.radius
    C = [0.0]
    for t in range(2):
        C.append(scaled.lip[t] * (r[t] + C[-1]))
    assert scaled.model_constant == pytest.approx(C[-1])
    assert scaled.constant == pytest.approx(scaled.lip[2] * (r[2] + C[-1]))


@pytest.mark.parametrize("act", ["relu", "tanh", "identity"])
def test_finite_difference_never_exceeds_certificate(act):
    rng = np.random.default_rng(4)
    m = random_model((1, 6, 6, 4), activation=act, seed=5)
    cert = certify(m)
    for layer, lip in zip((*m.layers, m.readout), cert.lip):
        X = rng.normal(size=(200, layer.d_in))
        Y = X + rng.normal(scale=1e-3, size=X.shape)
        est = np.linalg.norm(layer(X) - layer(Y), axis=1) / np.linalg.norm(X - Y, axis=1)
        assert est.max() <= lip * (1 + 1e-9)
    pyrng = random.Random(6)
    L = m.depth
    for _ in range(30):
        G, H = random_graph(pyrng, 1, 7), random_graph(pyrng, 1, 7)
        assert embedding_distance(G, H, m) <= cert.constant * delta_h(G, H, L, "W") + 1e-7


def test_radius_bounds_reachable_features():
    pyrng = random.Random(9)
    for act in ("relu", "tanh"):
        m = random_model((1, 8, 8, 8, 2), activation=act, seed=3)
        cert = certify(m)
        for _ in range(20):
            feats = vertex_features(random_graph(pyrng, 1, 9), m)
            for t, F in enumerate(feats):
                assert np.linalg.norm(F, axis=1).max() <= cert.radius[t] + 1e-12


def test_lower_bound_examples():
    m = random_model((1, 8, 8, 4), seed=1)
    G = sample_er(6, 0.5, 2)
    assert certified_lower_bound(G, G, m) == 0
    C6, K3K3 = cycle_graph(6), disjoint_union(complete_graph(3), complete_graph(3))
    assert certified_lower_bound(C6, K3K3, m) == pytest.approx(0, abs=1e-12)
    assert certified_lower_bound(G, C6, random_model((1, 3, 3), seed=0, scale=0)) == 0


def test_lower_bound_on_k2_vs_two_isolated():
    K2, two = complete_graph(2), empty_graph(2)
    m = identity_model()
    dist = embedding_distance(K2, two, m)
    assert dist == pytest.approx(0.5)
    # constant 2 includes the readout, so the certified bound is 1/4 against 1/2
    assert certified_lower_bound(K2, two, m) == pytest.approx(0.25)
    assert certified_lower_bound(K2, two, m) <= delta_h(K2, two, 1, "W") == 0.5


def test_json_round_trip(tmp_path):
    m = random_model((1, 5, 3), activation="tanh", seed=13)
    path = tmp_path / "m.json"
    save_model(m, path)
    back = load_model(path)
    assert model_fingerprint(back) == model_fingerprint(m)
    assert back.seed == 13 and back.dims == m.dims
    assert [l.activation for l in back.layers] == ["tanh"]
    zero_wide = MpnnModel(np.ones(1), (), Layer(np.zeros((2, 1)), np.zeros(2)))
    assert model_fingerprint(model_from_dict(model_to_dict(zero_wide))) == \
        model_fingerprint(zero_wide)
    with pytest.raises(ValueError):
        model_from_dict({**model_to_dict(m), "schema_version": 99})


@settings(max_examples=25)
@given(st.integers(1, 9), st.integers(0, 2**20))
def test_permutation_invariance(n, seed):
    rng = random.Random(seed)
    G = sample_er(n, rng.random(), seed)
    perm = list(range(n))
    rng.shuffle(perm)
    m = random_model((1, 6, 6, 3), activation=rng.choice(["relu", "tanh"]), seed=seed)
    assert np.allclose(embed(G, m), embed(relabel(G, perm), m), atol=1e-9)


@settings(max_examples=25)
@given(st.integers(1, 7), st.integers(2, 3), st.integers(0, 2**20))
def test_blowup_invariance(n, k, seed):
    G = sample_er(n, 0.5, seed)
    m = random_model((1, 6, 6, 3), seed=seed)
    assert np.allclose(embed(G, m), embed(blowup(G, k), m), atol=1e-9)


@settings(max_examples=25)
@given(st.integers(0, 2**20))
def test_wl_equivalent_graphs_embed_alike(seed):
    rng = random.Random(seed)
    G = sample_er(rng.randint(1, 6), rng.random(), seed)
    m = random_model((1, 8, 8, 8, 4), activation=rng.choice(["relu", "tanh"]), seed=seed)
    for a, b in ((cycle_graph(6), disjoint_union(complete_graph(3), complete_graph(3))),
                 (G, blowup(G, 2))):
        assert embedding_distance(a, b, m) <= 1e-9


@settings(max_examples=40)
@given(st.integers(0, 2**20))
def test_soundness(seed):
    rng = random.Random(seed)
    depth = rng.randint(1, 3)
    width = rng.randint(1, 10)
    m = random_model((1, *[width] * depth, rng.randint(1, 6)),
                     activation=rng.choice(["relu", "tanh", "identity"]),
                     seed=seed, scale=rng.uniform(0.1, 2))
    G, H = random_graph(rng, 1, 8), random_graph(rng, 1, 8)
    assert embedding_distance(G, H, m) <= certify(m).constant * delta_h(G, H, depth, "W") + 1e-7
