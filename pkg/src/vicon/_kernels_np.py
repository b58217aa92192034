"""Pure-NumPy evaluation kernels (fallback backend).

Implements the same two entry points as the compiled extension:
``posterior_pass`` and ``gradient_pass``.  Everything reduces to sparse
matrix-vector products over the topology's precomputed CSR structure plus
segment reductions over the flat receptive-field layout.
"""

import numpy as np

from .errors import DegenerateResponseError

NAME = "numpy"


def sigmoid(z):
    """Numerically safe logistic function, branched on the sign of z."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _raw_responses(topo, weights, biases, x):
    contrib = weights * x[topo.rf_indices]
    z = np.add.reduceat(contrib, topo.rf_indptr[:-1]) + biases
    return sigmoid(z)


def posterior_pass(topo, weights, biases, x):
    """Raw responses and the accumulated localized posteriors.

    Returns ``(q, s, r, p, ltp)`` where ``q`` are the sigmoid responses,
    ``s`` the inhibition-neighbourhood sums, ``r`` the summed inverse sums
    over the inverse neighbourhood, ``p = q * r`` the accumulated posterior
    (``p / M`` is the posterior proper) and ``ltp`` its leaked counterpart.
    """
    q = _raw_responses(topo, weights, biases, x)
    s = topo.n_csr @ q
    if np.any(s <= 0.0):
        raise DegenerateResponseError(
            "raw responses underflowed: a neighbourhood sum is zero"
        )
    r = topo.nt_csr @ (1.0 / s)
    p = q * r
    ltp = topo.lt_csr @ p
    return q, s, r, p, ltp


def gradient_pass(topo, weights, biases, references, x):
    """Per-sample objective and analytic gradients.

    Returns ``(objective, g_w, g_b, g_x, q, s, r, p, ltp, e_proj)``.
    The error term enters the weight/bias gradients in its projected form
    ``x'(y) . (x'(y) - 2 x)``; the constant ``|x|^2`` cancels there but is
    restored for the objective value itself.
    """
    q, s, r, p, ltp = posterior_pass(topo, weights, biases, x)
    m = topo.num_neurons

    xr = x[topo.rf_indices]
    e_proj = np.add.reduceat(references * (references - 2.0 * xr), topo.rf_indptr[:-1])
    objective = (2.0 / m) * float(ltp @ (e_proj + x @ x))

    le = topo.l_csr @ e_proj
    ple = (topo.n_csr @ (q * le)) / s
    ptple = q * (topo.nt_csr @ (ple / s))
    g_b = (2.0 / m) * (p * le - ptple) * (1.0 - q)

    counts = np.diff(topo.rf_indptr)
    g_w = np.repeat(g_b, counts) * xr
    g_x = (-4.0 / m) * np.repeat(ltp, counts) * (xr - references)
    return objective, g_w, g_b, g_x, q, s, r, p, ltp, e_proj
