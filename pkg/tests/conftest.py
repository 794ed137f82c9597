import numpy as np
import pytest

from downsample_gcn.gcn_engine import GcnModel, activation_fn
from downsample_gcn.graph_sampler import SparseGraph


def random_graph(n, p, rng):
    """Erdos-Renyi graph for small oracle comparisons."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return SparseGraph.from_edges(n, iu[keep], ju[keep])


def random_model(L, F, K, rng, activation="relu"):
    widths = [1] + [F] * (L - 1) + [1]
    taps = tuple(rng.uniform(-1, 1, size=(widths[l - 1], widths[l], K)) for l in range(1, L + 1))
    return GcnModel(L, F, K, taps, activation)


def dense_forward(model, S, x):
    """Brute-force GCN on a dense shift matrix: explicit matrix powers."""
    sigma = activation_fn(model.activation)
    feats = [np.asarray(x, dtype=float)]
    powers = [np.linalg.matrix_power(S, k) for k in range(model.K)]
    for taps in model.taps:
        nxt = []
        for g in range(taps.shape[1]):
            z = np.zeros(S.shape[0])
            for f, xf in enumerate(feats):
                H = sum(taps[f, g, k] * powers[k] for k in range(model.K))
                z = z + H @ xf
            nxt.append(sigma(z))
        feats = nxt
    return feats[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
