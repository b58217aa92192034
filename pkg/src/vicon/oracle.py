"""Brute-force reference implementations for validating the fast paths.

Everything here recomputes quantities from their defining summations,,
with none of the algebraic rearrangements used by the production code:
the objective is a literal nested sum with the full squared error (the
only concession to speed is memoising repeated identical subexpressions,
which cannot change any value), gradients come either from dense-matrix
transcription of the derivative formulas or from central finite
differences of the naive objective, and the featureless-input reduction
identities are checked against an explicitly constructed low-dimensional
quantiser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import NetworkParams, check_sample
from .objective import GradientSet, sample_gradients, sample_objective
from .topology import Topology, build_topology


def _sigmoid(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def _raw_q(params: NetworkParams, topo: Topology, x: np.ndarray) -> np.ndarray:
    q = np.empty(topo.num_neurons)
    for y in range(topo.num_neurons):
        seg = topo.rf_slice(y)
        z = float(params.biases[y])
        for k in range(seg.start, seg.stop):
            z += params.weights[k] * x[topo.rf_indices[k]]
        q[y] = _sigmoid(z)
    return q


def dense_reference(params: NetworkParams, topo: Topology, y: int) -> np.ndarray:
    """Reference vector of neuron y expanded to full input dimension."""
    ref = np.zeros(topo.input_dim)
    seg = topo.rf_slice(y)
    ref[topo.rf_indices[seg]] = params.references[seg]
    return ref


def naive_pmd_posterior(
    params: NetworkParams, topo: Topology, x: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior and leaked posterior by direct nested summation."""
    x = check_sample(x, topo)
    m = topo.num_neurons
    q = _raw_q(params, topo, x)
    neigh = [list(topo.neighborhood(y)) for y in range(m)]
    s = np.asarray([sum(q[j] for j in neigh[y]) for y in range(m)])
    posterior = np.empty(m)
    for y in range(m):
        total = 0.0
        for yp in range(m):
            if y in neigh[yp]:
                total += q[y] / s[yp]
        posterior[y] = total / m
    leak = topo.leak_matrix()
    leaked = np.empty(m)
    for y in range(m):
        total = 0.0
        for yp in range(m):
            total += leak[yp, y] * posterior[yp]
        leaked[y] = total
    return posterior, leaked


def naive_objective(params: NetworkParams, topo: Topology, x: np.ndarray) -> float:
    """Literal summation of the complete leaked objective, full squared error.

    The neighbourhood sums and the per-neuron inhibition factors are each
    computed once (they are identical wherever they reappear); the outer
    double sum over source and destination neurons is left explicit.
    """
    x = check_sample(x, topo)
    m = topo.num_neurons
    q = _raw_q(params, topo, x)
    neigh = [list(topo.neighborhood(y)) for y in range(m)]
    s = [sum(q[j] for j in row) for row in neigh]
    # inhibition factor of y': sum over all y'' whose neighbourhood holds y'
    bracket = []
    for yp in range(m):
        total = 0.0
        for ypp in range(m):
            if yp in neigh[ypp]:
                total += 1.0 / s[ypp]
        bracket.append(total)
    e = []
    for y in range(m):
        ref = dense_reference(params, topo, y)
        e.append(float(((x - ref) ** 2).sum()))
    leak = topo.leak_matrix()
    total = 0.0
    for y in range(m):
        for yp in range(m):
            if leak[yp, y] != 0.0:  # zero rows contribute exactly zero
                total += leak[yp, y] * q[yp] * bracket[yp] * e[y]
    return 2.0 / m * total


def naive_gradients(
    params: NetworkParams, topo: Topology, x: np.ndarray, projected: bool = False
) -> GradientSet:
    """Dense-matrix transcription of the derivative formulas.

    Uses the full squared error by default; ``projected=True`` switches to
    the projected error term, which must leave the result unchanged.
    """
    x = check_sample(x, topo)
    m = topo.num_neurons
    q = _raw_q(params, topo, x)
    nmat = np.zeros((m, m))
    for y in range(m):
        nmat[y, topo.neighborhood(y)] = 1.0
    s = nmat @ q
    r = nmat.T @ (1.0 / s)
    p = q * r
    pmat = nmat * q[None, :] / s[:, None]
    leak = topo.leak_matrix()

    refs_dense = np.stack([dense_reference(params, topo, y) for y in range(m)])
    if projected:
        e = np.asarray([ref @ (ref - 2.0 * x) for ref in refs_dense])
    else:
        e = ((x[None, :] - refs_dense) ** 2).sum(axis=1)
    le = leak @ e
    ple = pmat @ le
    ptple = pmat.T @ ple
    ltp = leak.T @ p

    g_b = (2.0 / m) * (p * le - ptple) * (1.0 - q)
    g_w = np.empty_like(params.weights)
    g_x = np.empty_like(params.references)
    for y in range(m):
        seg = topo.rf_slice(y)
        xt = x[topo.rf_indices[seg]]
        g_w[seg] = g_b[y] * xt
        g_x[seg] = (-4.0 / m) * ltp[y] * (xt - params.references[seg])
    return GradientSet(d_weights=g_w, d_biases=g_b, d_references=g_x)


def fd_gradients(
    params: NetworkParams, topo: Topology, x: np.ndarray, step: float = 1e-5
) -> GradientSet:
    """Central finite differences of the naive objective, per component."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")

    def central(array, i):
        saved = array[i]
        array[i] = saved + step
        hi = naive_objective(params, topo, x)
        array[i] = saved - step
        lo = naive_objective(params, topo, x)
        array[i] = saved
        return (hi - lo) / (2.0 * step)

    g_w = np.asarray([central(params.weights, i) for i in range(params.weights.size)])
    g_b = np.asarray([central(params.biases, i) for i in range(params.biases.size)])
    g_x = np.asarray([central(params.references, i) for i in range(params.references.size)])
    return GradientSet(d_weights=g_w, d_biases=g_b, d_references=g_x)


def constant_cancellation_check(
    params: NetworkParams, topo: Topology, x: np.ndarray, c: float, tol: float = 1e-10
) -> bool:
    """Adding a constant to every error term must not move p(Le) - P^T P L e."""
    x = check_sample(x, topo)
    m = topo.num_neurons
    q = _raw_q(params, topo, x)
    nmat = np.zeros((m, m))
    for y in range(m):
        nmat[y, topo.neighborhood(y)] = 1.0
    s = nmat @ q
    p = q * (nmat.T @ (1.0 / s))
    pmat = nmat * q[None, :] / s[:, None]
    leak = topo.leak_matrix()

    def combination(e):
        le = leak @ e
        return p * le - pmat.T @ (pmat @ le)

    e = np.asarray(
        [((x - dense_reference(params, topo, y)) ** 2).sum() for y in range(m)]
    )
    drift = np.abs(combination(e) - combination(e + c)).max()
    return bool(drift <= tol * max(1.0, abs(c)))


# ---------------------------------------------------------------------------
# featureless-input reduction to a low-dimensional soft quantiser


@dataclass
class ReductionReport:
    """Per-sample comparison of the full objective with its reduced form."""

    full: np.ndarray       # D of the full network on replicated inputs
    predicted: np.ndarray  # outside-moment term + scaled reduced objective
    outside: np.ndarray    # contribution of components outside the fields
    reduced: np.ndarray    # objective of the reduced quantiser
    max_abs_diff: float


def make_featureless_params(topo: Topology, rng: np.random.Generator) -> NetworkParams:
    """Random parameters whose references are constant within each retina field."""
    weights = rng.uniform(-0.5, 0.5, topo.num_rf_entries)
    biases = rng.uniform(-0.3, 0.3, topo.num_neurons)
    references = np.empty(topo.num_rf_entries)
    for y in range(topo.num_neurons):
        start = int(topo.rf_indptr[y])
        n = topo.rf_retina_count(y)
        for t in range(topo.num_retinae):
            references[start + t * n : start + (t + 1) * n] = rng.uniform(-0.5, 0.5)
    return NetworkParams(weights=weights, biases=biases, references=references)


def reduced_quantiser(params: NetworkParams, topo: Topology) -> tuple[NetworkParams, Topology]:
    """Collapse each retina to one component: summed weights, shared references."""
    red_topo = build_topology(
        grid_shape=topo.grid_shape,
        retina_shape=(1,) * topo.grid_rank,
        num_retinae=topo.num_retinae,
        rf_shape=(1,) * topo.grid_rank,
        inhibition_shape=topo.inhibition_shape,
        leakage_shape=topo.leakage_shape,
        leakage_sigma=topo.leakage_sigma,
        wrap=topo.wrap,
    )
    t_count = topo.num_retinae
    weights = np.empty(topo.num_neurons * t_count)
    references = np.empty(topo.num_neurons * t_count)
    for y in range(topo.num_neurons):
        start = int(topo.rf_indptr[y])
        n = topo.rf_retina_count(y)
        for t in range(t_count):
            seg = slice(start + t * n, start + (t + 1) * n)
            weights[y * t_count + t] = params.weights[seg].sum()
            references[y * t_count + t] = params.references[seg][0]
    return NetworkParams(weights=weights, biases=params.biases.copy(),
                         references=references), red_topo


def subspace_reduction_check(
    params: NetworkParams, topo: Topology, brightness_samples: np.ndarray
) -> ReductionReport:
    """Verify the featureless-input decomposition of the objective.

    With every retina showing a single brightness value and references
    constant within each field, the objective splits exactly into a
    second-moment term from the (d - w) components outside the fields
    plus the per-retina window size times the reduced quantiser objective.
    Requires a 1-D wrap-around topology so all fields have equal size.
    """
    if topo.grid_rank != 1:
        raise ConfigError("reduction check is defined for 1-D topologies")
    if not topo.wrap:
        raise ConfigError("reduction check needs wrap=True (uniform field sizes)")
    brightness = np.atleast_2d(np.asarray(brightness_samples, dtype=np.float64))
    if brightness.shape[1] != topo.num_retinae:
        raise ConfigError(
            f"brightness samples have {brightness.shape[1]} columns, "
            f"topology has {topo.num_retinae} retinae"
        )
    for y in range(topo.num_neurons):
        start = int(topo.rf_indptr[y])
        n = topo.rf_retina_count(y)
        for t in range(topo.num_retinae):
            seg = params.references[start + t * n : start + (t + 1) * n]
            if np.ptp(seg) != 0.0:
                raise ConfigError(
                    "references must be constant within each retina field "
                    "(non-featureless parameters)"
                )

    red_params, red_topo = reduced_quantiser(params, topo)
    r_size = topo.retina_size
    k = topo.rf_retina_count(0)  # equal for every neuron under wrap

    full = np.empty(brightness.shape[0])
    reduced = np.empty(brightness.shape[0])
    outside = np.empty(brightness.shape[0])
    for i, values in enumerate(brightness):
        x_full = np.repeat(values, r_size)
        full[i] = sample_objective(params, topo, x_full)
        reduced[i] = sample_objective(red_params, red_topo, values.copy())
        outside[i] = 2.0 * (r_size - k) * float((values**2).sum())
    predicted = outside + k * reduced
    return ReductionReport(
        full=full,
        predicted=predicted,
        outside=outside,
        reduced=reduced,
        max_abs_diff=float(np.abs(full - predicted).max()),
    )


# ---------------------------------------------------------------------------
# seeded random instances and the aggregate verification suite


def random_instance(
    rng: np.random.Generator,
    grid=8,
    rf=3,
    inhibition=3,
    leakage=3,
    num_retinae: int = 1,
    wrap: bool = False,
    retina=None,
    sigma=1.0,
):
    """Small random network and input for equivalence/gradient testing.

    Window sizes are clamped to the largest odd value the grid/retina
    admits, so any (grid, window) combination is safe to request.
    """
    def clamp(window, extent):
        cap = extent if extent % 2 else extent - 1
        return min(window, cap)

    grid = int(grid)
    retina_extent = grid if retina is None else int(retina)
    topo = build_topology(
        grid_shape=grid,
        retina_shape=retina_extent,
        num_retinae=num_retinae,
        rf_shape=clamp(rf, retina_extent),
        inhibition_shape=clamp(inhibition, grid),
        leakage_shape=clamp(leakage, grid),
        leakage_sigma=sigma,
        wrap=wrap,
    )
    params = NetworkParams(
        weights=rng.normal(0.0, 0.5, topo.num_rf_entries),
        biases=rng.normal(0.0, 0.3, topo.num_neurons),
        references=rng.normal(0.0, 0.5, topo.num_rf_entries),
    )
    x = rng.uniform(-1.0, 1.0, topo.input_dim)
    return params, topo, x


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _class_rel_error(analytic: GradientSet, reference: GradientSet):
    """Largest norm-wise relative error over the three parameter classes."""
    worst = (0.0, "")
    for name in ("d_weights", "d_biases", "d_references"):
        a = getattr(analytic, name)
        f = getattr(reference, name)
        scale = max(float(np.abs(f).max()), 1e-12)
        err = np.abs(a - f) / scale
        i = int(np.argmax(err))
        if err[i] > worst[0]:
            worst = (float(err[i]), f"{name}[{i}]")
    return worst


def verify_suite(seed: int = 20240, gradient_perturbation: float = 0.0):
    """Run every oracle check on seeded instances; returns CheckResults.

    ``gradient_perturbation`` is a test hook: it corrupts one analytic
    gradient component so the suite's failure reporting can be exercised.
    """
    rng = np.random.default_rng(seed)
    results: list[CheckResult] = []

    worst = (0.0, "")
    for _ in range(5):
        m = int(rng.integers(8, 13))
        params, topo, x = random_instance(rng, grid=m, inhibition=5, leakage=3)
        analytic = sample_gradients(params, topo, x)
        if gradient_perturbation:
            analytic.d_weights[3] += gradient_perturbation
        fd = fd_gradients(params, topo, x, step=1e-5)
        err, where = _class_rel_error(analytic, fd)
        if err > worst[0]:
            worst = (err, where)
    results.append(CheckResult(
        name="analytic gradients vs finite differences",
        passed=worst[0] < 1e-5,
        detail=f"max rel err {worst[0]:.3e} at {worst[1]}",
    ))

    worst_obj = 0.0
    for _ in range(10):
        params, topo, x = random_instance(rng, grid=int(rng.integers(6, 13)),
                                          inhibition=5, leakage=3,
                                          num_retinae=int(rng.integers(1, 3)))
        a = sample_objective(params, topo, x)
        b = naive_objective(params, topo, x)
        worst_obj = max(worst_obj, abs(a - b) / max(1.0, abs(b)))
    results.append(CheckResult(
        name="optimized objective vs naive summation",
        passed=worst_obj < 1e-12,
        detail=f"max rel diff {worst_obj:.3e}",
    ))

    worst_proj = 0.0
    for _ in range(5):
        params, topo, x = random_instance(rng, grid=10, inhibition=5, leakage=3)
        full = naive_gradients(params, topo, x, projected=False)
        prod = sample_gradients(params, topo, x)
        for name in ("d_weights", "d_biases", "d_references"):
            diff = np.abs(getattr(full, name) - getattr(prod, name)).max()
            worst_proj = max(worst_proj, float(diff))
    results.append(CheckResult(
        name="projected vs full error-term gradients",
        passed=worst_proj < 1e-10,
        detail=f"max abs diff {worst_proj:.3e}",
    ))

    worst_norm = 0.0
    for _ in range(20):
        params, topo, x = random_instance(rng, grid=int(rng.integers(5, 15)),
                                          inhibition=3, leakage=3)
        post, leaked = naive_pmd_posterior(params, topo, x)
        worst_norm = max(worst_norm, abs(post.sum() - 1.0), abs(leaked.sum() - 1.0))
    results.append(CheckResult(
        name="posterior normalisation (naive path)",
        passed=worst_norm < 1e-12,
        detail=f"max |sum - 1| {worst_norm:.3e}",
    ))

    ok = True
    for c in (0.0, 1.0, 1e6):
        params, topo, x = random_instance(rng, grid=9, inhibition=3, leakage=3)
        ok = ok and constant_cancellation_check(params, topo, x, c)
    results.append(CheckResult(
        name="constant error shift cancels in bias gradient",
        passed=ok,
        detail="c in {0, 1, 1e6}",
    ))

    topo1 = build_topology(grid_shape=9, retina_shape=9, num_retinae=1,
                           rf_shape=9, inhibition_shape=9, leakage_shape=3,
                           leakage_sigma=1.0, wrap=True)
    params1 = make_featureless_params(topo1, rng)
    rep1 = subspace_reduction_check(params1, topo1, rng.uniform(-1, 1, (20, 1)))
    results.append(CheckResult(
        name="one-subspace reduction (full field)",
        passed=rep1.max_abs_diff < 1e-10,
        detail=f"max abs diff {rep1.max_abs_diff:.3e}",
    ))

    topo2 = build_topology(grid_shape=11, retina_shape=11, num_retinae=2,
                           rf_shape=5, inhibition_shape=5, leakage_shape=3,
                           leakage_sigma=1.0, wrap=True)
    params2 = make_featureless_params(topo2, rng)
    rep2 = subspace_reduction_check(params2, topo2, rng.uniform(-1, 1, (20, 2)))
    results.append(CheckResult(
        name="two-subspace reduction (finite fields)",
        passed=rep2.max_abs_diff < 1e-10,
        detail=f"max abs diff {rep2.max_abs_diff:.3e}",
    ))

    return results
