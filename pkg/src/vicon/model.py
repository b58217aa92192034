"""Network parameters and the partitioned-mixture posterior.

Each neuron carries a weight vector, a bias, and a reference vector, all
confined to its raw receptive field.  Weight and reference vectors are
stored flat in the topology's receptive-field layout (neuron-major), so a
neuron's coefficients live in ``params.weights[topo.rf_slice(y)]``.

The posterior over neurons for an input ``x`` is built in three stages:
sigmoid raw responses, localized posteriors normalised within each
inhibition neighbourhood, and the average of those local posteriors over
the inverse neighbourhood.  A row-stochastic leakage matrix then smears
the result onto neighbouring neurons.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ._backend import posterior_pass
from ._kernels_np import sigmoid
from .errors import ConfigError
from .topology import Topology


@dataclass
class NetworkParams:
    """Per-neuron weights, biases, and reference vectors (flat RF layout)."""

    weights: np.ndarray
    biases: np.ndarray
    references: np.ndarray

    def copy(self) -> "NetworkParams":
        return NetworkParams(
            weights=self.weights.copy(),
            biases=self.biases.copy(),
            references=self.references.copy(),
        )

    def all_finite(self) -> bool:
        return bool(
            np.all(np.isfinite(self.weights))
            and np.all(np.isfinite(self.biases))
            and np.all(np.isfinite(self.references))
        )


@dataclass
class PosteriorState:
    """All per-sample probability fields produced by ``pmd_posterior``."""

    raw: np.ndarray                 # sigmoid responses Q, one per neuron
    local: sp.csr_matrix            # rows: posterior within each neighbourhood
    accumulated: np.ndarray         # p, sum of local posteriors received
    posterior: np.ndarray           # p / M
    leaked_posterior: np.ndarray    # leakage-smeared posterior
    neighborhood_sums: np.ndarray = field(repr=False)  # denominators, diagnostics


def init_params(
    topo: Topology,
    rng: np.random.Generator,
    weight_scale: float = 0.1,
    reference_scale: float = 0.01,
) -> NetworkParams:
    """Small symmetric random start: breaks ties without saturating sigmoids."""
    n = topo.num_rf_entries
    return NetworkParams(
        weights=rng.uniform(-weight_scale, weight_scale, n),
        biases=np.zeros(topo.num_neurons),
        references=rng.uniform(-reference_scale, reference_scale, n),
    )


def check_params(params: NetworkParams, topo: Topology) -> None:
    n = topo.num_rf_entries
    if params.weights.shape != (n,) or params.references.shape != (n,):
        raise ConfigError(
            f"parameter layout {params.weights.shape}/{params.references.shape} "
            f"does not match the topology's {n} receptive-field entries"
        )
    if params.biases.shape != (topo.num_neurons,):
        raise ConfigError(
            f"bias vector {params.biases.shape} does not match "
            f"{topo.num_neurons} neurons"
        )
    if not params.all_finite():
        raise ConfigError("parameters contain non-finite values")


def check_sample(x: np.ndarray, topo: Topology) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (topo.input_dim,):
        raise ConfigError(
            f"sample shape {x.shape} does not match input dimension {topo.input_dim}"
        )
    return x


def raw_response(params: NetworkParams, topo: Topology, x: np.ndarray, y: int) -> float:
    """Sigmoid response of a single neuron to the receptive-field restriction of x."""
    x = check_sample(x, topo)
    if not 0 <= y < topo.num_neurons:
        raise ConfigError(f"neuron index {y} out of range [0, {topo.num_neurons})")
    seg = topo.rf_slice(y)
    z = params.weights[seg] @ x[topo.rf_indices[seg]] + params.biases[y]
    return float(sigmoid(np.asarray([z]))[0])


def raw_responses(params: NetworkParams, topo: Topology, x: np.ndarray) -> np.ndarray:
    x = check_sample(x, topo)
    q, _, _, _, _ = posterior_pass(topo, params.weights, params.biases, x)
    return q


def pmd_posterior(params: NetworkParams, topo: Topology, x: np.ndarray) -> PosteriorState:
    """Posterior probability field for one input.

    The local rows hold, for each neuron y, the posterior over its
    neighbourhood's members; averaging the rows that contain a neuron
    (and dividing by M) yields the single posterior, which the leakage
    matrix then redistributes.
    """
    x = check_sample(x, topo)
    q, s, r, p, ltp = posterior_pass(topo, params.weights, params.biases, x)
    m = topo.num_neurons
    row_counts = np.diff(topo.n_indptr)
    local = sp.csr_matrix(
        (q[topo.n_indices] / np.repeat(s, row_counts), topo.n_indices, topo.n_indptr),
        shape=(m, m),
    )
    return PosteriorState(
        raw=q,
        local=local,
        accumulated=p,
        posterior=p / m,
        leaked_posterior=ltp / m,
        neighborhood_sums=s,
    )
