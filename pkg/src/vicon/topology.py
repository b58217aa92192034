"""Network geometry: grids, receptive fields, neighbourhoods, leakage kernel.

A topology ties together three index spaces:

* the neuron grid (1-D or 2-D, ``M`` neurons, row-major),
* the retina pixel grid(s) (one or two retinae, same rank as the neuron
  grid), flattened into a single input vector of dimension ``d``,
* centred windows on both: the raw receptive field of each neuron (on the
  retinae), the lateral-inhibition neighbourhood ``N(y)`` and the leakage
  neighbourhood (on the neuron grid).

Windows are truncated at borders by default; ``wrap=True`` switches every
window to toroidal indexing.  Leakage rows carry a Gaussian profile over
window offsets and are renormalised to sum to one after truncation.

All neighbourhood structure is precomputed in CSR form so per-sample
evaluation reduces to a handful of sparse matrix-vector products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError

Shape = tuple[int, ...]


def _as_shape(value, rank: int | None = None, name: str = "shape") -> Shape:
    if isinstance(value, (int, np.integer)):
        shape = (int(value),)
    else:
        shape = tuple(int(v) for v in value)
    if rank is not None and len(shape) == 1 and rank > 1:
        shape = shape * rank
    if rank is not None and len(shape) != rank:
        raise ConfigError(f"{name} {shape} does not match grid rank {rank}")
    return shape


def _as_sigma(value, rank: int) -> tuple[float, ...]:
    if isinstance(value, (int, float, np.floating, np.integer)):
        sig = (float(value),) * rank
    else:
        sig = tuple(float(v) for v in value)
        if len(sig) == 1:
            sig = sig * rank
    if len(sig) != rank:
        raise ConfigError(f"leakage_sigma {sig} does not match grid rank {rank}")
    if any(s <= 0 or not np.isfinite(s) for s in sig):
        raise ConfigError(f"leakage_sigma must be positive and finite, got {sig}")
    return sig


def _check_window(window: Shape, extent: Shape, name: str) -> None:
    for w, e in zip(window, extent):
        if w <= 0:
            raise ConfigError(f"{name} {window} must be positive")
        if w % 2 == 0:
            raise ConfigError(f"{name} {window} must be odd (centred window)")
        if w > e:
            raise ConfigError(f"{name} {window} exceeds extent {extent}")


def _window_offsets(window: Shape) -> np.ndarray:
    """Row-major integer offsets covering a centred window."""
    axes = [np.arange(-(w - 1) // 2, (w - 1) // 2 + 1) for w in window]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _grid_coords(shape: Shape) -> np.ndarray:
    axes = [np.arange(n) for n in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _map_center(coord: np.ndarray, grid: Shape, retina: Shape) -> np.ndarray:
    """Topographic position of a neuron on a retina (proportional map)."""
    out = np.empty_like(coord)
    for i, (g, r) in enumerate(zip(grid, retina)):
        if g == r:
            out[:, i] = coord[:, i]
        elif g == 1:
            out[:, i] = (r - 1) // 2
        else:
            out[:, i] = np.floor(coord[:, i] * (r - 1) / (g - 1) + 0.5).astype(coord.dtype)
    return out


def _window_rows(
    centers: np.ndarray,
    extent: Shape,
    window: Shape,
    wrap: bool,
    weights_of_offset=None,
):
    """Per-row (index, weight, cell) lists for a centred window around each center.

    Returns (indices, indptr, data, cells); ``cells`` holds the row-major
    position of each surviving entry inside the full window.
    """
    offsets = _window_offsets(window)
    n_rows = centers.shape[0]
    w_flat = offsets.shape[0]
    indices, indptr, data, cells = [], [0], [], []
    weight = None
    if weights_of_offset is not None:
        weight = weights_of_offset(offsets)
    for i in range(n_rows):
        pos = centers[i][None, :] + offsets
        if wrap:
            pos = pos % np.asarray(extent)
            valid = np.ones(w_flat, dtype=bool)
        else:
            valid = np.all((pos >= 0) & (pos < np.asarray(extent)), axis=1)
        flat = np.ravel_multi_index(tuple(pos[valid].T), extent)
        order = np.argsort(flat, kind="stable")
        indices.append(flat[order])
        cells.append(np.nonzero(valid)[0][order])
        if weight is not None:
            data.append(weight[valid][order])
        indptr.append(indptr[-1] + flat.size)
    indices = np.concatenate(indices).astype(np.int64)
    cells = np.concatenate(cells).astype(np.int64)
    indptr = np.asarray(indptr, dtype=np.int64)
    if weight is not None:
        data = np.concatenate(data).astype(np.float64)
    else:
        data = None
    return indices, indptr, data, cells


@dataclass(frozen=True, eq=False)
class Topology:
    """Immutable geometry plus precomputed neighbourhood structure."""

    grid_shape: Shape
    retina_shape: Shape
    num_retinae: int
    rf_shape: Shape
    inhibition_shape: Shape
    leakage_shape: Shape
    leakage_sigma: tuple[float, ...]
    wrap: bool

    num_neurons: int = field(repr=False)
    retina_size: int = field(repr=False)
    input_dim: int = field(repr=False)

    # receptive fields: flat input indices per neuron (per-retina segments
    # are contiguous: all left-retina entries, then all right-retina entries)
    rf_indices: np.ndarray = field(repr=False)
    rf_indptr: np.ndarray = field(repr=False)
    rf_cells: np.ndarray = field(repr=False)  # window cell per entry, montage layout

    # inhibition neighbourhood N(y) and its inverse, 0/1 CSR structure
    n_indices: np.ndarray = field(repr=False)
    n_indptr: np.ndarray = field(repr=False)
    ninv_indices: np.ndarray = field(repr=False)
    ninv_indptr: np.ndarray = field(repr=False)

    # leakage matrix rows Pr(:|y) and the transposed structure
    l_indices: np.ndarray = field(repr=False)
    l_indptr: np.ndarray = field(repr=False)
    l_data: np.ndarray = field(repr=False)
    lt_indices: np.ndarray = field(repr=False)
    lt_indptr: np.ndarray = field(repr=False)
    lt_data: np.ndarray = field(repr=False)

    # scipy views over the same structure, used by the NumPy backend
    n_csr: sp.csr_matrix = field(repr=False)
    nt_csr: sp.csr_matrix = field(repr=False)
    l_csr: sp.csr_matrix = field(repr=False)
    lt_csr: sp.csr_matrix = field(repr=False)

    @property
    def grid_rank(self) -> int:
        return len(self.grid_shape)

    @property
    def num_rf_entries(self) -> int:
        return int(self.rf_indptr[-1])

    def rf_slice(self, y: int) -> slice:
        return slice(int(self.rf_indptr[y]), int(self.rf_indptr[y + 1]))

    def rf_retina_count(self, y: int) -> int:
        """Number of surviving window cells per retina for neuron ``y``."""
        return (int(self.rf_indptr[y + 1]) - int(self.rf_indptr[y])) // self.num_retinae

    def neighborhood(self, y: int) -> np.ndarray:
        return self.n_indices[self.n_indptr[y] : self.n_indptr[y + 1]]

    def inverse_neighborhood(self, y: int) -> np.ndarray:
        return self.ninv_indices[self.ninv_indptr[y] : self.ninv_indptr[y + 1]]

    def leak_neighborhood(self, y: int) -> np.ndarray:
        return self.l_indices[self.l_indptr[y] : self.l_indptr[y + 1]]

    def leak_matrix(self) -> np.ndarray:
        """Dense M x M leakage matrix, rows Pr(:|y)."""
        return self.l_csr.toarray()

    def with_leakage_sigma(self, sigma) -> "Topology":
        """Same geometry with a rebuilt leakage kernel."""
        return build_topology(
            grid_shape=self.grid_shape,
            retina_shape=self.retina_shape,
            num_retinae=self.num_retinae,
            rf_shape=self.rf_shape,
            inhibition_shape=self.inhibition_shape,
            leakage_shape=self.leakage_shape,
            leakage_sigma=sigma,
            wrap=self.wrap,
        )

    def describe(self) -> str:
        grid = "x".join(map(str, self.grid_shape))
        retina = "x".join(map(str, self.retina_shape))
        return f"grid {grid}, {self.num_retinae} retina(e) {retina}"


def build_topology(
    grid_shape,
    rf_shape,
    inhibition_shape,
    leakage_shape,
    leakage_sigma=1.0,
    retina_shape=None,
    num_retinae: int = 1,
    wrap: bool = False,
) -> Topology:
    """Materialise neighbourhood index lists and the leakage kernel.

    All window shapes must be odd (centred) and no larger than the extent
    they live on.  Leakage rows get the Gaussian profile
    ``exp(-|offset|^2 / (2 sigma^2))`` over surviving window offsets and are
    renormalised to sum to one.
    """
    grid = _as_shape(grid_shape, name="grid_shape")
    rank = len(grid)
    if rank not in (1, 2):
        raise ConfigError(f"grid must be 1-D or 2-D, got rank {rank}")
    retina = _as_shape(retina_shape if retina_shape is not None else grid, rank, "retina_shape")
    rf = _as_shape(rf_shape, rank, "rf_shape")
    inhibition = _as_shape(inhibition_shape, rank, "inhibition_shape")
    leakage = _as_shape(leakage_shape, rank, "leakage_shape")
    sigma = _as_sigma(leakage_sigma, rank)

    if num_retinae not in (1, 2):
        raise ConfigError(f"num_retinae must be 1 or 2, got {num_retinae}")
    if any(g <= 0 for g in grid) or any(r <= 0 for r in retina):
        raise ConfigError(f"grid {grid} and retina {retina} must be positive")
    _check_window(rf, retina, "rf_shape")
    _check_window(inhibition, grid, "inhibition_shape")
    _check_window(leakage, grid, "leakage_shape")

    num_neurons = int(np.prod(grid))
    retina_size = int(np.prod(retina))
    input_dim = num_retinae * retina_size

    coords = _grid_coords(grid)
    centers = _map_center(coords, grid, retina)

    # receptive-field index lists, one window per retina
    rf_idx_1, rf_ptr_1, _, rf_cells_1 = _window_rows(centers, retina, rf, wrap)
    if num_retinae == 1:
        rf_indices, rf_indptr, rf_cells = rf_idx_1, rf_ptr_1, rf_cells_1
    else:
        parts, cells, ptr = [], [], [0]
        for y in range(num_neurons):
            seg = slice(rf_ptr_1[y], rf_ptr_1[y + 1])
            for t in range(num_retinae):
                parts.append(rf_idx_1[seg] + t * retina_size)
                cells.append(rf_cells_1[seg])
            ptr.append(ptr[-1] + num_retinae * (rf_ptr_1[y + 1] - rf_ptr_1[y]))
        rf_indices = np.concatenate(parts).astype(np.int64)
        rf_cells = np.concatenate(cells).astype(np.int64)
        rf_indptr = np.asarray(ptr, dtype=np.int64)

    # inhibition neighbourhood and its transpose
    n_indices, n_indptr, _, _ = _window_rows(coords, grid, inhibition, wrap)
    n_csr = sp.csr_matrix(
        (np.ones(n_indices.size), n_indices, n_indptr),
        shape=(num_neurons, num_neurons),
    )
    nt_csr = n_csr.T.tocsr()
    nt_csr.sort_indices()

    # leakage rows: truncated Gaussian profile, renormalised
    inv_two_sigma_sq = np.asarray([1.0 / (2.0 * s * s) for s in sigma])

    def gauss(offsets: np.ndarray) -> np.ndarray:
        return np.exp(-np.sum(offsets.astype(float) ** 2 * inv_two_sigma_sq, axis=1))

    l_indices, l_indptr, l_raw, _ = _window_rows(coords, grid, leakage, wrap, gauss)
    l_data = l_raw.copy()
    for y in range(num_neurons):
        seg = slice(l_indptr[y], l_indptr[y + 1])
        l_data[seg] /= l_data[seg].sum()
    l_csr = sp.csr_matrix((l_data, l_indices, l_indptr), shape=(num_neurons, num_neurons))
    lt_csr = l_csr.T.tocsr()
    lt_csr.sort_indices()

    return Topology(
        grid_shape=grid,
        retina_shape=retina,
        num_retinae=num_retinae,
        rf_shape=rf,
        inhibition_shape=inhibition,
        leakage_shape=leakage,
        leakage_sigma=sigma,
        wrap=wrap,
        num_neurons=num_neurons,
        retina_size=retina_size,
        input_dim=input_dim,
        rf_indices=rf_indices,
        rf_indptr=rf_indptr,
        rf_cells=rf_cells,
        n_indices=n_indices,
        n_indptr=n_indptr,
        ninv_indices=nt_csr.indices.astype(np.int64),
        ninv_indptr=nt_csr.indptr.astype(np.int64),
        l_indices=l_indices,
        l_indptr=l_indptr,
        l_data=l_data,
        lt_indices=lt_csr.indices.astype(np.int64),
        lt_indptr=lt_csr.indptr.astype(np.int64),
        lt_data=lt_csr.data.astype(np.float64),
        n_csr=n_csr,
        nt_csr=nt_csr,
        l_csr=l_csr,
        lt_csr=lt_csr,
    )
