"""On-line gradient-following trainer with adaptive per-class step rescaling.

Each update draws one sample, evaluates the analytic gradients, and then
rescales the three gradient classes independently so that the largest
per-neuron update norm equals the requested step size: weight vectors and
biases move by at most the step size, reference vectors by three times it
(they chase the moving weights, so they are kept more agile).  The rates
are recomputed from scratch every update; parameters end up jittering
around their optima rather than converging exactly.

A schedule is a list of phases; each phase fixes the update count, the
step size, and the leakage-profile standard deviation.  The leakage
kernel is rebuilt at every phase boundary, which is how stripe-sharpening
runs (wide leakage first, narrow later) are expressed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, TrainingDivergedError
from .model import NetworkParams
from .objective import sample_objective_and_gradients
from .topology import Topology

REFERENCE_RATE_FACTOR = 3.0


@dataclass
class TrainerState:
    """Adaptive rates, requested step size, and the update counter."""

    step_size: float
    rate_w: float = 0.0
    rate_b: float = 0.0
    rate_x: float = 0.0
    updates_done: int = 0
    rng_seed: int = 0


@dataclass
class Phase:
    num_updates: int
    step_size: float
    leakage_sigma: float | tuple[float, ...]

    def __post_init__(self):
        if self.num_updates <= 0:
            raise ValueError(f"phase must have num_updates > 0, got {self.num_updates}")


@dataclass
class Schedule:
    phases: list[Phase] = field(default_factory=list)


@dataclass
class TraceEntry:
    update: int
    phase: int
    objective: float  # mean sample objective over the logging window


def _segment_norms(values: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    return np.sqrt(np.add.reduceat(values * values, indptr[:-1]))


def _draw(source):
    if hasattr(source, "sample"):
        return source.sample()
    try:
        return next(source)
    except StopIteration:
        raise DataError("training data exhausted") from None


def train_step(
    params: NetworkParams, topo: Topology, state: TrainerState, x: np.ndarray
) -> float:
    """One on-line update in place; returns the pre-update sample objective."""
    objective, grads = sample_objective_and_gradients(params, topo, x)

    max_w = float(_segment_norms(grads.d_weights, topo.rf_indptr).max())
    max_b = float(np.abs(grads.d_biases).max())
    max_x = float(_segment_norms(grads.d_references, topo.rf_indptr).max())
    if not (np.isfinite(objective) and np.isfinite(max_w) and np.isfinite(max_b) and np.isfinite(max_x)):
        raise TrainingDivergedError(
            f"non-finite objective or gradient at update {state.updates_done}"
        )

    eps = state.step_size
    if max_w > 0.0:
        state.rate_w = eps / max_w
        params.weights -= state.rate_w * grads.d_weights
    if max_b > 0.0:
        state.rate_b = eps / max_b
        params.biases -= state.rate_b * grads.d_biases
    if max_x > 0.0:
        state.rate_x = REFERENCE_RATE_FACTOR * eps / max_x
        params.references -= state.rate_x * grads.d_references
    state.updates_done += 1
    return objective


def train(
    params: NetworkParams,
    topo: Topology,
    schedule: Schedule,
    source,
    *,
    seed: int = 0,
    log_interval: int = 100,
    log_fn=None,
) -> tuple[NetworkParams, Topology, list[TraceEntry]]:
    """Run every phase of the schedule; returns params, the final topology
    (its leakage kernel reflects the last phase), and the objective trace.

    ``source`` is either an object with a ``sample()`` method or an
    iterator of sample vectors (exhaustion raises ``DataError``).
    """
    if not isinstance(source, (list, tuple)) and not hasattr(source, "sample"):
        source = iter(source)
    state = TrainerState(
        step_size=schedule.phases[0].step_size if schedule.phases else 0.0,
        rng_seed=seed,
    )
    trace: list[TraceEntry] = []
    for phase_idx, phase in enumerate(schedule.phases):
        topo = topo.with_leakage_sigma(phase.leakage_sigma)
        state.step_size = phase.step_size
        window_sum = 0.0
        window_n = 0
        for _ in range(phase.num_updates):
            x = _draw(source)
            window_sum += train_step(params, topo, state, x)
            window_n += 1
            if window_n == log_interval or state.updates_done == _phase_end(schedule, phase_idx):
                entry = TraceEntry(
                    update=state.updates_done,
                    phase=phase_idx,
                    objective=window_sum / window_n,
                )
                trace.append(entry)
                if log_fn is not None:
                    log_fn(f"update {entry.update:>8d}  phase {entry.phase}  "
                           f"objective {entry.objective:.6f}")
                window_sum = 0.0
                window_n = 0
        if not params.all_finite():
            raise TrainingDivergedError(
                f"non-finite parameters after phase {phase_idx}"
            )
    return params, topo, trace


def _phase_end(schedule: Schedule, phase_idx: int) -> int:
    return sum(p.num_updates for p in schedule.phases[: phase_idx + 1])
