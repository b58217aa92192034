"""Command-line front end: train, analyze, verify, gen-texture.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical
failure.  ``VICON_THREADS`` caps intra-step parallelism (applied to the
BLAS thread pools before the numerical modules load); the training loop
itself is sequential, so outputs are bit-reproducible under a fixed seed.
"""

from __future__ import annotations

import argparse
import os
import sys


def _apply_thread_cap() -> None:
    cap = os.environ.get("VICON_THREADS", "").strip()
    if cap:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
            os.environ.setdefault(var, cap)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="vicon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run an experiment from a config file")
    p_train.add_argument("config", help="experiment config path")

    p_an = sub.add_parser("analyze", help="re-emit analysis artifacts from a checkpoint")
    p_an.add_argument("checkpoint", help="checkpoint path")
    p_an.add_argument("config", help="experiment config path (topology must match)")
    p_an.add_argument("--outdir", default=None,
                      help="output directory (default: the config's run.outdir)")

    sub.add_parser("verify", help="run the built-in verification oracle suite")

    p_gen = sub.add_parser("gen-texture", help="write a seeded procedural texture")
    p_gen.add_argument("seed", type=int)
    p_gen.add_argument("out", help="output graymap path (.pgm)")
    p_gen.add_argument("--size", default="256x256")
    p_gen.add_argument("--corr-length", type=float, default=7.0)

    return parser


# a dedicated stream for the post-training demonstration sample, so train
# and analyze render the identical reconstruction triptych
_TRIPTYCH_SEED_OFFSET = 900_001


def _unit_scale(a, lo=None, hi=None):
    import numpy as np

    a = np.asarray(a, dtype=float)
    lo = a.min() if lo is None else lo
    hi = a.max() if hi is None else hi
    if hi > lo:
        return np.clip((a - lo) / (hi - lo), 0.0, 1.0)
    return np.full_like(a, 0.5)


def _retina_image(x, topo, retina: int):
    return x[retina * topo.retina_size : (retina + 1) * topo.retina_size].reshape(
        topo.retina_shape
    )


def _side_by_side(left, right):
    import numpy as np

    divider = np.ones((left.shape[0], 1))
    return np.hstack([left, divider, right])


def _emit_analysis(params, topo, cfg, outdir) -> list[str]:
    """Analysis artifacts shared by the train and analyze commands."""
    import numpy as np

    from .analysis import (dominance_map_2d, montage, ocularity_profile,
                           reconstruct, stripe_stats, write_ocularity_csv)
    from .errors import FlatProfileError
    from .imageio import write_pgm, write_ppm

    written = []

    def path(name):
        written.append(name)
        return os.path.join(outdir, name)

    synthetic = cfg.mode == "synthetic"
    if topo.num_retinae == 2:
        write_ocularity_csv(path("ocularity.csv"),
                            ocularity_profile(params, topo, measure="absolute"))
        signed = ocularity_profile(params, topo, measure="signed")
        write_ocularity_csv(path("ocularity_signed.csv"), signed)
        stripe_profile = signed if synthetic else ocularity_profile(params, topo)
        if topo.grid_rank == 1:
            try:
                stats = stripe_stats(stripe_profile)
                print(f"stripes: period {stats.dominant_period:.2f} neurons, "
                      f"antiphase corr {stats.antiphase_corr:+.3f}, "
                      f"amplitude {stats.amplitude:.4f}")
            except FlatProfileError:
                print("stripes: profiles flat, no period")
        else:
            labels = dominance_map_2d(
                params, topo, measure="signed" if synthetic else "absolute"
            )
            write_pgm(path("dominance.pgm"), (labels > 0).astype(float))

    if topo.grid_rank == 2:
        tiles = montage(params, topo, which="weights")
        if tiles.ndim == 3:
            write_ppm(path("montage.ppm"), tiles)
        else:
            write_pgm(path("montage.pgm"), tiles)

    if topo.grid_rank == 2 and len(topo.retina_shape) == 2:
        rng = np.random.default_rng(cfg.seed + _TRIPTYCH_SEED_OFFSET)
        sample = cfg.make_source(topo, rng).sample()
        x_hat, posterior = reconstruct(params, topo, sample)
        lo = min(sample.min(), x_hat.min())
        hi = max(sample.max(), x_hat.max())
        if topo.num_retinae == 2:
            inp = _side_by_side(_unit_scale(_retina_image(sample, topo, 0), lo, hi),
                                _unit_scale(_retina_image(sample, topo, 1), lo, hi))
            rec = _side_by_side(_unit_scale(_retina_image(x_hat, topo, 0), lo, hi),
                                _unit_scale(_retina_image(x_hat, topo, 1), lo, hi))
        else:
            inp = _unit_scale(_retina_image(sample, topo, 0), lo, hi)
            rec = _unit_scale(_retina_image(x_hat, topo, 0), lo, hi)
        write_pgm(path("input.pgm"), inp)
        write_pgm(path("reconstruction.pgm"), rec)
        write_pgm(path("posterior.pgm"),
                  _unit_scale(posterior.reshape(topo.grid_shape), 0.0, posterior.max()))
    return written


def _cmd_train(args) -> int:
    import numpy as np

    from .checkpoint import save_checkpoint
    from .config import load_config
    from .model import init_params
    from .trainer import train

    cfg = load_config(args.config)
    topo = cfg.to_topology()
    outdir = cfg.outdir
    try:
        os.makedirs(outdir, exist_ok=True)
        probe = os.path.join(outdir, ".write-probe")
        with open(probe, "w"):
            pass
        os.remove(probe)
    except OSError as exc:
        print(f"error: output directory {outdir!r} is not writable: {exc}",
              file=sys.stderr)
        return 1

    params = init_params(topo, np.random.default_rng(cfg.seed),
                         cfg.weight_scale, cfg.reference_scale)
    source = cfg.make_source(topo, np.random.default_rng(cfg.seed + 1))
    params, topo, trace = train(
        params, topo, cfg.to_schedule(), source,
        seed=cfg.seed, log_interval=cfg.log_interval, log_fn=print,
    )

    save_checkpoint(os.path.join(outdir, "checkpoint.vicn"), params, topo)
    with open(os.path.join(outdir, "objective_trace.csv"), "w") as fh:
        fh.write("update,phase,objective\n")
        for entry in trace:
            fh.write(f"{entry.update},{entry.phase},{entry.objective:.17g}\n")
    written = _emit_analysis(params, topo, cfg, outdir)
    print(f"wrote checkpoint.vicn, objective_trace.csv, {', '.join(written)} -> {outdir}")
    return 0


def _cmd_analyze(args) -> int:
    from .checkpoint import load_checkpoint
    from .config import load_config

    cfg = load_config(args.config)
    topo = cfg.to_topology()
    # analysis artifacts reflect the last phase's leakage kernel, as training left it
    if cfg.phases:
        topo = topo.with_leakage_sigma(cfg.phases[-1].leakage_sigma)
    params, topo = load_checkpoint(args.checkpoint, topo)
    outdir = args.outdir if args.outdir is not None else cfg.outdir
    os.makedirs(outdir, exist_ok=True)
    written = _emit_analysis(params, topo, cfg, outdir)
    print(f"wrote {', '.join(written)} -> {outdir}")
    return 0


def _cmd_verify(args) -> int:
    from .oracle import verify_suite

    results = verify_suite()
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark}  {r.name:<{width}}  {r.detail}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 3


def _cmd_gen_texture(args) -> int:
    from .config import _parse_shape
    from .data import generate_texture
    from .imageio import write_pgm

    size = _parse_shape(args.size)
    if len(size) == 1:
        size = size * 2
    write_pgm(args.out, generate_texture(args.seed, size, args.corr_length))
    print(f"wrote {size[0]}x{size[1]} texture -> {args.out}")
    return 0


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1

    from .errors import ConfigError, DataError, NumericalError

    handlers = {
        "train": _cmd_train,
        "analyze": _cmd_analyze,
        "verify": _cmd_verify,
        "gen-texture": _cmd_gen_texture,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
