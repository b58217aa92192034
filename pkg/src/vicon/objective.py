"""Reconstruction objective and its analytic gradients.

The per-sample objective is

    D(x) = (2/M) sum_y (L^T p)_y |x - x'(y)|^2

with reference components outside the raw receptive field fixed at zero.
Gradients follow the chain through the accumulated posterior:

    dD/dx'(y) = -(4/M) (L^T p)_y (x~(y) - x'(y))
    dD/db(y)  =  (2/M) (p_y (Le)_y - (P^T P L e)_y) (1 - Q(x|y))
    dD/dw(y)  =  dD/db(y) * x~(y)

where the error vector e enters in its projected form
``x'(y) . (x'(y) - 2 x~(y))``; the omitted constant ``|x|^2`` cancels
inside ``p (Le) - P^T P L e`` and so never affects the gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import gradient_pass
from .model import NetworkParams, check_params, check_sample
from .topology import Topology


@dataclass
class GradientSet:
    """Gradients in the same flat layout as ``NetworkParams``."""

    d_weights: np.ndarray
    d_biases: np.ndarray
    d_references: np.ndarray


@dataclass
class ErrorIntermediates:
    """Named intermediate fields of the gradient computation (diagnostics)."""

    e: np.ndarray        # per-neuron error term (projected by default)
    le: np.ndarray       # leakage-smeared error
    ple: np.ndarray      # neighbourhood-posterior average of le
    ptple: np.ndarray    # accumulated back through the inverse neighbourhood
    ltp: np.ndarray      # leaked accumulated posterior
    p: np.ndarray        # accumulated posterior


def sample_objective(params: NetworkParams, topo: Topology, x: np.ndarray) -> float:
    """Leaked-posterior-weighted squared reconstruction error of one input."""
    x = check_sample(x, topo)
    objective, *_ = gradient_pass(topo, params.weights, params.biases, params.references, x)
    return objective


def sample_gradients(params: NetworkParams, topo: Topology, x: np.ndarray) -> GradientSet:
    x = check_sample(x, topo)
    _, g_w, g_b, g_x, *_ = gradient_pass(
        topo, params.weights, params.biases, params.references, x
    )
    return GradientSet(d_weights=g_w, d_biases=g_b, d_references=g_x)


def sample_objective_and_gradients(
    params: NetworkParams, topo: Topology, x: np.ndarray
) -> tuple[float, GradientSet]:
    """One fused evaluation; this is the trainer's per-update workhorse."""
    x = check_sample(x, topo)
    objective, g_w, g_b, g_x, *_ = gradient_pass(
        topo, params.weights, params.biases, params.references, x
    )
    return objective, GradientSet(d_weights=g_w, d_biases=g_b, d_references=g_x)


def batch_objective(params: NetworkParams, topo: Topology, xs) -> float:
    """Mean per-sample objective over a batch (deterministic order)."""
    xs = list(xs)
    if not xs:
        raise ValueError("empty batch")
    return float(np.mean([sample_objective(params, topo, x) for x in xs]))


def batch_gradients(params: NetworkParams, topo: Topology, xs) -> GradientSet:
    """Mean gradients over a batch, accumulated in iteration order."""
    xs = list(xs)
    if not xs:
        raise ValueError("empty batch")
    acc = None
    for x in xs:
        g = sample_gradients(params, topo, x)
        if acc is None:
            acc = g
        else:
            acc.d_weights += g.d_weights
            acc.d_biases += g.d_biases
            acc.d_references += g.d_references
    acc.d_weights /= len(xs)
    acc.d_biases /= len(xs)
    acc.d_references /= len(xs)
    return acc


def error_intermediates(
    params: NetworkParams, topo: Topology, x: np.ndarray, projected: bool = True
) -> ErrorIntermediates:
    """Expose the notation-level fields (e, Le, PLe, P^T P L e, L^T p).

    With ``projected=False`` the full squared error ``|x - x'(y)|^2`` is
    used instead of the projected form; only ``e``, ``le``, ``ple`` and
    ``ptple`` change, and ``p (Le) - P^T P L e`` provably does not.
    """
    from ._kernels_np import posterior_pass as np_posterior_pass

    check_params(params, topo)
    x = check_sample(x, topo)
    q, s, r, p, ltp = np_posterior_pass(topo, params.weights, params.biases, x)
    xr = x[topo.rf_indices]
    e = np.add.reduceat(
        params.references * (params.references - 2.0 * xr), topo.rf_indptr[:-1]
    )
    if not projected:
        e = e + x @ x
    le = topo.l_csr @ e
    ple = (topo.n_csr @ (q * le)) / s
    ptple = q * (topo.nt_csr @ (ple / s))
    return ErrorIntermediates(e=e, le=le, ple=ple, ptple=ptple, ltp=ltp, p=p)
