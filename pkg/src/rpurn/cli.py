"""Command-line interface.

Subcommands: ``ingest``, ``simulate``, ``fit-eval``, ``smooth`` and
``params-evolution``.  Every flag can also be supplied through an
environment variable named ``RPURN_<FLAG>`` (dashes become underscores,
e.g. ``RPURN_SLOTS=30``); explicit flags win.  All tabular outputs are
comma-delimited UTF-8 with a header row, written atomically, and contain no
timestamps, so identical inputs reproduce byte-identical files.

Exit codes: 0 success, 2 usage or configuration error, 3 data or format
error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataFormatError, NumericError
from .fitting import MODEL_NAMES, ParamTrajectory, SlotScheme, fit_trajectory
from .ingest import (
    SERIES_MAGIC,
    SUBSETS,
    BinarySeries,
    binarize,
    descriptives,
    read_records,
    read_series,
    write_series,
)
from .metrics import NO_SMOOTH
from .pipeline import DEFAULT_KNOT_COUNTS, in_sample_path, run_fit_eval
from .predictors import ApproxParams, PolyaPredictorParams, simulate_series
from .smoothing import smooth
from .urns import RPUrnState, simulate as simulate_urn

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

GENERATORS = ("complete", "only_fashion", "no_fashion", "polya", "rp_exact")


def _env(flag: str) -> str | None:
    return os.environ.get("RPURN_" + flag.replace("-", "_").upper())


def _add_option(parser: argparse.ArgumentParser, flag: str, *, required: bool = False,
                default=None, **kwargs) -> None:
    """Register a flag whose default can come from RPURN_<FLAG>."""
    env_value = _env(flag)
    if env_value is not None:
        kwargs["default"] = env_value
        required = False
    else:
        kwargs["default"] = default
    parser.add_argument(f"--{flag}", required=required, **kwargs)


def _parse_models(text) -> tuple[str, ...]:
    names = tuple(part.strip() for part in str(text).split(",") if part.strip())
    unknown = [name for name in names if name not in MODEL_NAMES]
    if unknown or not names:
        raise ConfigError(
            f"--models must name at least one of {', '.join(MODEL_NAMES)}; got {text!r}"
        )
    return names


def _parse_knots(text) -> tuple[int, ...]:
    try:
        knots = tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"--knots must be a comma-separated integer list, got {text!r}")
    if not knots or any(k < 3 for k in knots):
        raise ConfigError("--knots entries must all be at least 3")
    return knots


def _parse_mass_pair(text, flag: str) -> tuple[float, float]:
    try:
        parts = [float(p) for p in str(text).split(",")]
    except ValueError:
        parts = []
    if len(parts) != 2:
        raise ConfigError(f"--{flag} expects two comma-separated numbers, got {text!r}")
    return parts[0], parts[1]


def _write_atomic(path: Path, data: str | bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, mode) as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        os.unlink(tmp_name)
        raise


def _write_series_atomic(series: BinarySeries, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    os.close(fd)
    try:
        write_series(series, tmp_name)
        os.replace(tmp_name, path)
    except BaseException:
        os.unlink(tmp_name)
        raise


def _trajectory_csv(trajectory: ParamTrajectory, scheme: SlotScheme) -> str:
    rows = ["slot,training_end,p0,gamma_star,beta,a1,a,log_likelihood,iterations,converged,degenerate"]
    for s, fr in trajectory.per_slot:
        p = fr.params
        if isinstance(p, PolyaPredictorParams):
            fields = ["", "", "", repr(p.a1), repr(p.a)]
        else:
            fields = [repr(p.p0), repr(p.gamma_star), repr(p.beta), "", ""]
        rows.append(
            ",".join(
                [str(s), str(scheme.training_end(s)), *fields,
                 repr(fr.log_likelihood), str(fr.iterations),
                 str(fr.converged).lower(), str(fr.degenerate_data).lower()]
            )
        )
    return "\n".join(rows) + "\n"


def _psi_csv(psi: np.ndarray) -> str:
    rows = ["index,psi_hat"]
    for i, value in enumerate(psi):
        if np.isnan(value):
            continue
        rows.append(f"{i},{float(value)!r}")
    return "\n".join(rows) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_ingest(args) -> int:
    records, malformed = read_records(args.input)
    series = binarize(records, threshold=float(args.threshold), subset=args.subset)
    if len(series) == 0:
        raise DataFormatError("no observations survived thresholding")
    out = Path(args.output_dir)
    _write_series_atomic(series, out / "series.txt")
    desc = descriptives(series)
    summary = (
        f"posts,{desc.posts}\n"
        f"pct_positive,{desc.pct_positive:.2f}\n"
        f"discarded,{series.discarded_count}\n"
        f"subset_removed,{series.subset_removed_count}\n"
        f"malformed_lines,{malformed}\n"
    )
    _write_atomic(out / "descriptives.csv", "metric,value\n" + summary)
    print(f"wrote {out / 'series.txt'} ({desc.posts} bits, "
          f"{desc.pct_positive:.2f}% positive, {series.discarded_count} discarded)")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    steps = int(args.steps)
    seed = int(args.seed)
    if args.model == "rp_exact":
        b0 = _parse_mass_pair(args.b0, "b0")
        reinforced = _parse_mass_pair(args.b0_reinforced, "b0-reinforced")
        try:
            state = RPUrnState.initial(
                b0, reinforced, alpha=float(args.alpha), beta=float(args.beta)
            )
        except ValueError as exc:
            raise ConfigError(str(exc))
        draws = simulate_urn(state, steps, seed)
        bits = (draws == 0).astype(np.uint8)  # color 0 is the positive color
    else:
        try:
            if args.model == "complete":
                params = ApproxParams.complete(
                    float(args.p0), float(args.gamma_star), float(args.beta),
                    float(args.b_tilde_init),
                )
            elif args.model == "only_fashion":
                params = ApproxParams.only_fashion(
                    float(args.beta), float(args.b_tilde_init)
                )
            elif args.model == "no_fashion":
                params = ApproxParams.no_fashion(float(args.p0))
            else:
                params = PolyaPredictorParams(a1=float(args.a1), a=float(args.a))
        except ValueError as exc:
            raise ConfigError(str(exc))
        bits = simulate_series(params, steps, seed)
    series = BinarySeries(values=bits, source_count=bits.size, discarded_count=0)
    out = Path(args.output_dir)
    _write_series_atomic(series, out / "series.txt")
    print(f"wrote {out / 'series.txt'} ({bits.size} bits, model={args.model}, seed={seed})")
    return EXIT_OK


def _load_series_values(path) -> np.ndarray:
    return read_series(path).values


def _load_curve_values(path) -> np.ndarray:
    """Load a series file or a psi-curve CSV (as written by fit-eval)."""
    with open(path, "rb") as handle:
        first = handle.readline().decode("utf-8", "replace").strip()
    if first == SERIES_MAGIC:
        return read_series(path).values.astype(np.float64)
    if first.startswith("index,"):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return data[:, 1]
    raise DataFormatError(f"{path}: expected a series file or an index,psi_hat CSV")


def _cmd_fit_eval(args) -> int:
    xi = _load_series_values(args.input)
    scheme = _make_scheme(args.slots, xi.size)
    models = _parse_models(args.models)
    knots = _parse_knots(args.knots)
    report, evaluations = run_fit_eval(
        xi,
        scheme,
        variants=models,
        knot_counts=knots,
        b_tilde_init=float(args.b_tilde_init),
        grid_points=int(args.grid),
        warm_start=not args.no_warm_start,
    )
    out = Path(args.output_dir)
    _write_atomic(out / "report.csv", report.to_csv())
    _write_atomic(out / "report.json", report.to_json())
    for model in models:
        _write_atomic(
            out / f"params_{model}.csv",
            _trajectory_csv(evaluations[model].trajectory, scheme),
        )
        if args.curves == "out_of_sample":
            _write_atomic(out / f"psi_{model}.csv", _psi_csv(evaluations[model].psi_hat))
        elif args.curves == "in_sample":
            _, psi = in_sample_path(
                model, xi,
                b_tilde_init=float(args.b_tilde_init), grid_points=int(args.grid),
            )
            _write_atomic(out / f"psi_{model}.csv", _psi_csv(psi))
    print(report.to_csv(), end="")
    return EXIT_OK


def _cmd_smooth(args) -> int:
    xi = _load_curve_values(args.input)
    knots = _parse_knots(args.knots)
    max_k = max(knots)
    if xi.size < max_k + 4:
        raise ConfigError(
            f"series of length {xi.size} is too short for {max_k} knots "
            f"(needs at least {max_k + 4} points)"
        )
    columns = [smooth(xi, k).values for k in knots]
    header = ",".join(f"k{k}" for k in knots)
    lines = [header]
    for row in zip(*columns):
        lines.append(",".join(repr(float(v)) for v in row))
    _write_atomic(Path(args.output_dir) / "smoothed.csv", "\n".join(lines) + "\n")
    print(f"wrote {Path(args.output_dir) / 'smoothed.csv'} "
          f"({xi.size} rows, knots={','.join(map(str, knots))})")
    return EXIT_OK


def _cmd_params_evolution(args) -> int:
    xi = _load_series_values(args.input)
    scheme = _make_scheme(args.slots, xi.size)
    models = _parse_models(args.models)
    out = Path(args.output_dir)
    for model in models:
        trajectory = fit_trajectory(
            model, xi, scheme,
            b_tilde_init=float(args.b_tilde_init),
            grid_points=int(args.grid),
            warm_start=not args.no_warm_start,
        )
        _write_atomic(out / f"params_{model}.csv", _trajectory_csv(trajectory, scheme))
        print(f"wrote {out / f'params_{model}.csv'}")
    return EXIT_OK


def _make_scheme(slots, n_obs: int) -> SlotScheme:
    n_slots = int(slots)
    if n_slots < 2:
        raise ConfigError(f"--slots must be at least 2, got {n_slots}")
    if n_obs < 2 * n_slots:
        raise ConfigError(
            f"series of length {n_obs} is too short for {n_slots} slots "
            f"(needs at least {2 * n_slots} observations)"
        )
    return SlotScheme(n_slots=n_slots, n_obs=n_obs)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rpurn",
        description="Fit, simulate and score locally reinforced urn models "
                    "on binary sentiment series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="threshold scored posts into a binary series")
    _add_option(p_ingest, "input", required=True)
    _add_option(p_ingest, "output-dir", required=True)
    _add_option(p_ingest, "threshold", default="0.35", type=float)
    _add_option(p_ingest, "subset", default="entire", choices=SUBSETS)
    p_ingest.set_defaults(func=_cmd_ingest)

    p_sim = sub.add_parser("simulate", help="sample a synthetic series from a model")
    _add_option(p_sim, "model", required=True, choices=GENERATORS)
    _add_option(p_sim, "steps", required=True, type=int)
    _add_option(p_sim, "output-dir", required=True)
    _add_option(p_sim, "seed", default="0", type=int)
    _add_option(p_sim, "p0", default="0.5", type=float)
    _add_option(p_sim, "gamma-star", default="0.5", type=float)
    _add_option(p_sim, "beta", default="0.9", type=float)
    _add_option(p_sim, "b-tilde-init", default="0.5", type=float)
    _add_option(p_sim, "a1", default="1.0", type=float)
    _add_option(p_sim, "a", default="2.0", type=float)
    _add_option(p_sim, "alpha", default="1.0", type=float)
    _add_option(p_sim, "b0", default="1,1",
                help="fixed-component masses for rp_exact, e.g. 1,1")
    _add_option(p_sim, "b0-reinforced", default="0,0",
                help="initial reinforced-component masses for rp_exact")
    p_sim.set_defaults(func=_cmd_simulate)

    p_fit = sub.add_parser("fit-eval", help="slot-fit models and score their forecasts")
    _add_option(p_fit, "input", required=True)
    _add_option(p_fit, "output-dir", required=True)
    _add_option(p_fit, "slots", required=True, type=int)
    _add_option(p_fit, "models", default=",".join(MODEL_NAMES))
    _add_option(p_fit, "knots", default=",".join(map(str, DEFAULT_KNOT_COUNTS)))
    _add_option(p_fit, "b-tilde-init", default="0.5", type=float)
    _add_option(p_fit, "grid", default="21", type=int)
    _add_option(p_fit, "curves", default="none",
                choices=("none", "out_of_sample", "in_sample"))
    p_fit.add_argument("--no-warm-start", action="store_true",
                       help="run the full grid at every slot (slow)")
    p_fit.set_defaults(func=_cmd_fit_eval)

    p_smooth = sub.add_parser("smooth", help="emit smoothed curves for plotting")
    _add_option(p_smooth, "input", required=True)
    _add_option(p_smooth, "output-dir", required=True)
    _add_option(p_smooth, "knots", default=",".join(map(str, DEFAULT_KNOT_COUNTS)))
    p_smooth.set_defaults(func=_cmd_smooth)

    p_params = sub.add_parser("params-evolution",
                              help="export per-slot fitted parameters")
    _add_option(p_params, "input", required=True)
    _add_option(p_params, "output-dir", required=True)
    _add_option(p_params, "slots", required=True, type=int)
    _add_option(p_params, "models", default=",".join(MODEL_NAMES))
    _add_option(p_params, "b-tilde-init", default="0.5", type=float)
    _add_option(p_params, "grid", default="21", type=int)
    p_params.add_argument("--no-warm-start", action="store_true")
    p_params.set_defaults(func=_cmd_params_evolution)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"rpurn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataFormatError, OSError) as exc:
        print(f"rpurn: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, FloatingPointError) as exc:
        print(f"rpurn: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"rpurn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
