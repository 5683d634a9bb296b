"""Command-line interface.

Subcommands: generate, estimate, sweep, swimmer, lambda-path, theory-check,
concentration. Exit codes: 0 on success, 1 on usage errors, 2 on numeric
failures (the failing error class name is printed to stderr). All randomness
is controlled by explicit seeds, so repeated invocations produce
byte-identical outputs.
"""

import argparse
import os
import sys

import numpy as np

from .exceptions import InvalidConfigError, MatrixIOError, NmfDimError
from .grouplasso import SolverSettings
from .guarantees import choose_support_rows, recovery_constants
from .io import ensure_dir, read_json, read_matrix_csv, write_json
from .laws import LatentLaw
from .pipeline import (
    DEFAULT_EPSILON,
    DEFAULT_REG,
    SweepConfig,
    concentration_table,
    estimate_components,
    lambda_path,
    sweep,
)
from .synth import GenerativeConfig, export_pgm, generate, save_dataset, swimmer


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_log_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidConfigError(f"grid must be start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise InvalidConfigError(f"bad grid {text!r}") from exc
    if start <= 0 or stop <= start or count < 2:
        raise InvalidConfigError(f"grid must satisfy 0 < start < stop, count >= 2")
    return list(np.logspace(np.log10(start), np.log10(stop), count))

def _parse_int_list(text):
    try:
        return [int(float(f)) for f in text.split(",")]
    except ValueError as exc:
        raise InvalidConfigError(f"bad integer list {text!r}") from exc


def _format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path, header, rows):
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_format_value(v) for v in row) + "\n")
    except OSError as exc:
        raise MatrixIOError(f"cannot write {path}: {exc}") from exc


def _solver_settings(args):
    kwargs = {}
    if getattr(args, "max_iters", None) is not None:
        kwargs["max_iters"] = args.max_iters
    return SolverSettings(**kwargs) if kwargs else None


def _cmd_generate(args):
    config = GenerativeConfig.from_json(read_json(args.config))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    save_dataset(generate(config), args.out)
    return 0


def _cmd_estimate(args):
    data = read_matrix_csv(args.data)
    result = estimate_components(
        data, reg=args.reg, epsilon=args.epsilon, settings=_solver_settings(args)
    )
    write_json(result.to_json(), args.out)
    return 0


def _cmd_sweep(args):
    config = SweepConfig.from_json(read_json(args.config))
    if args.seed is not None:
        config.seed_base = args.seed
    rows = sweep(config, settings=_solver_settings(args))
    _write_csv(
        args.out,
        ("F", "N", "mean_khat", "std_khat", "trials", "failures"),
        [
            (r.n_features, r.n_samples, r.mean_estimate, r.std_estimate, r.trials, r.failures)
            for r in rows
        ],
    )
    return 0


def _cmd_swimmer(args):
    dataset = swimmer()
    ensure_dir(args.out)
    save_dataset(dataset, args.out)
    if args.pgm:
        export_pgm(dataset, os.path.join(args.out, "frames"))
    return 0


def _cmd_lambda_path(args):
    data = read_matrix_csv(args.data)
    rows = lambda_path(
        data,
        _parse_log_grid(args.grid),
        epsilon=args.epsilon,
        settings=_solver_settings(args),
    )
    _write_csv(
        args.out,
        ("lambda", "k_hat", "relative_error", "converged", "kkt_residual"),
        [
            (r.reg, r.n_components, r.relative_error, r.converged, r.kkt_residual)
            for r in rows
        ],
    )
    return 0


def _cmd_theory_check(args):
    dictionary = read_matrix_csv(args.dict)
    law = LatentLaw.parse(args.law)
    support = choose_support_rows(dictionary)
    report = recovery_constants(
        dictionary, support, law, args.sigma, args.delta, n_samples=args.n_samples
    )
    write_json(report.to_json(), args.out)
    return 0


def _cmd_concentration(args):
    config = GenerativeConfig.from_json(read_json(args.config))
    if args.seed is not None:
        config = config.with_seed(args.seed)
    rows = concentration_table(config, _parse_int_list(args.grid), args.trials)
    _write_csv(
        args.out,
        ("N", "mean_err", "std_err", "trials"),
        [(r.n_samples, r.mean_error, r.std_error, r.trials) for r in rows],
    )
    return 0


def build_parser():
    parser = _Parser(prog="nmfdim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="draw a synthetic dataset from a config")
    p.add_argument("--config", required=True, help="GenerativeConfig JSON file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("estimate", help="estimate the component count of a data matrix")
    p.add_argument("--data", required=True, help="data matrix CSV (features x samples)")
    p.add_argument("--lambda", dest="reg", type=float, required=True,
                   help="row-sparsity penalty strength")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON,
                   help="row-norm threshold of the count")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--out", required=True, help="result JSON file")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("sweep", help="sample-size sweep over seeded trials")
    p.add_argument("--config", required=True, help="SweepConfig JSON file")
    p.add_argument("--out", required=True, help="output CSV file")
    p.add_argument("--seed", type=int, default=None, help="override seed_base")
    p.add_argument("--max-iters", type=int, default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("swimmer", help="emit the procedural swimmer benchmark")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--pgm", action="store_true", help="also export one PGM per image")
    p.set_defaults(func=_cmd_swimmer)

    p = sub.add_parser("lambda-path", help="regularization path with warm starts")
    p.add_argument("--data", required=True, help="data matrix CSV (features x samples)")
    p.add_argument("--grid", required=True,
                   help="log-spaced penalty grid as start:stop:count, e.g. 1e-5:1e9:29")
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=_cmd_lambda_path)

    p = sub.add_parser("theory-check", help="evaluate recovery constants for a dictionary")
    p.add_argument("--dict", required=True, help="dictionary CSV (features x components)")
    p.add_argument("--law", required=True, help="latent law as kind:param, e.g. exponential:1")
    p.add_argument("--sigma", type=float, required=True, help="noise standard deviation")
    p.add_argument("--delta", type=float, required=True, help="failure probability")
    p.add_argument("--n-samples", type=float, default=None,
                   help="sample count at which to evaluate the penalty window")
    p.add_argument("--out", required=True, help="report JSON file")
    p.set_defaults(func=_cmd_theory_check)

    p = sub.add_parser("concentration", help="moment concentration against sample size")
    p.add_argument("--config", required=True, help="GenerativeConfig JSON file")
    p.add_argument("--grid", required=True, help="comma-separated sample counts")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", required=True, help="output CSV file")
    p.set_defaults(func=_cmd_concentration)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NmfDimError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
