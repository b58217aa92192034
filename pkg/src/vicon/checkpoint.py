"""Versioned binary checkpoints: exact-precision parameter save/restore.

Layout (little-endian):

    magic "VICN" | u32 version | u8 rank | u8 num_retinae | u8 wrap | u8 pad
    rank x u32 for each of: grid, retina, rf, inhibition, leakage shapes
    rank x f64 leakage sigma
    u64 neuron count | u64 receptive-field entry count
    f64 weights | f64 biases | f64 references   (neuron-major)

The topology echo lets a checkpoint stand alone; loading against an
explicit topology verifies that every geometric field agrees.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import CheckpointError
from .model import NetworkParams
from .topology import Topology, build_topology

MAGIC = b"VICN"
VERSION = 1


def save_checkpoint(path, params: NetworkParams, topo: Topology) -> None:
    rank = topo.grid_rank
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIBBBB", MAGIC, VERSION, rank, topo.num_retinae,
                             int(topo.wrap), 0))
        for shape in (topo.grid_shape, topo.retina_shape, topo.rf_shape,
                      topo.inhibition_shape, topo.leakage_shape):
            fh.write(struct.pack(f"<{rank}I", *shape))
        fh.write(struct.pack(f"<{rank}d", *topo.leakage_sigma))
        fh.write(struct.pack("<QQ", topo.num_neurons, topo.num_rf_entries))
        fh.write(np.ascontiguousarray(params.weights, "<f8").tobytes())
        fh.write(np.ascontiguousarray(params.biases, "<f8").tobytes())
        fh.write(np.ascontiguousarray(params.references, "<f8").tobytes())


def _read(fh, fmt, path):
    size = struct.calcsize(fmt)
    blob = fh.read(size)
    if len(blob) != size:
        raise CheckpointError(f"{path}: truncated checkpoint")
    return struct.unpack(fmt, blob)


def load_checkpoint(path, topo: Topology | None = None) -> tuple[NetworkParams, Topology]:
    """Read parameters; rebuilds the echoed topology unless one is supplied.

    A supplied topology must match the echo field-for-field.
    """
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from None
    with fh:
        magic, version, rank, num_retinae, wrap, _ = _read(fh, "<4sIBBBB", path)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise CheckpointError(f"{path}: unsupported version {version}")
        shapes = [tuple(_read(fh, f"<{rank}I", path)) for _ in range(5)]
        grid, retina, rf, inhibition, leakage = shapes
        sigma = tuple(_read(fh, f"<{rank}d", path))
        m, nnz = _read(fh, "<QQ", path)

        if topo is None:
            topo = build_topology(
                grid_shape=grid, retina_shape=retina, num_retinae=num_retinae,
                rf_shape=rf, inhibition_shape=inhibition, leakage_shape=leakage,
                leakage_sigma=sigma, wrap=bool(wrap),
            )
        else:
            echo = {
                "grid": (grid, topo.grid_shape),
                "retina": (retina, topo.retina_shape),
                "num_retinae": (num_retinae, topo.num_retinae),
                "rf": (rf, topo.rf_shape),
                "inhibition": (inhibition, topo.inhibition_shape),
                "leakage": (leakage, topo.leakage_shape),
                "wrap": (bool(wrap), topo.wrap),
            }
            for name, (got, want) in echo.items():
                if got != want:
                    raise CheckpointError(
                        f"{path}: checkpoint {name} {got} does not match topology {name} {want}"
                    )
        if m != topo.num_neurons or nnz != topo.num_rf_entries:
            raise CheckpointError(
                f"{path}: checkpoint sizes (M={m}, rf={nnz}) do not match topology "
                f"(M={topo.num_neurons}, rf={topo.num_rf_entries})"
            )

        def arr(count):
            blob = fh.read(8 * count)
            if len(blob) != 8 * count:
                raise CheckpointError(f"{path}: truncated parameter block")
            return np.frombuffer(blob, dtype="<f8").copy()

        params = NetworkParams(weights=arr(nnz), biases=arr(m), references=arr(nnz))
    return params, topo
