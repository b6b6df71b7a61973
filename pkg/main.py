import argparse
import logging
import sys
import traceback

from src.errors import CodaError, DataError, NumericalError, UsageError
from src.logger import setup_logging

logger = logging.getLogger(__name__)

# Subcommand -> pipeline stages it runs
COMMAND_STAGES = {
    "impute": ("impute",),
    "cluster": ("impute", "cluster"),
    "ratios": ("impute", "ratios"),
    "associate": ("impute", "cluster", "associate"),
    "run": ("impute", "cluster", "ratios", "associate"),
}
SEEDED_COMMANDS = ("cluster", "associate", "run")


class CodaArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{self.prog}: error: {message}\n")


def _logging_flags():
    parser = CodaArgumentParser(add_help=False)
    parser.add_argument("--verbose", "-v", action="store_true", help="debug output on the console")
    parser.add_argument("--log-dir", default=None, help="also write session logs under this directory")
    return parser


def _pipeline_flags():
    parser = CodaArgumentParser(add_help=False)
    parser.add_argument("--input", required=True, help="firm-year CSV file")
    parser.add_argument("--config", default=None, help="key=value settings file")
    parser.add_argument("--dl-percentile", type=float, default=None)
    parser.add_argument("--em-tol", type=float, default=None)
    parser.add_argument("--em-max-iter", type=int, default=None)
    parser.add_argument("--delta-fraction", type=float, default=None)
    parser.add_argument("--imputation", choices=["em", "multiplicative"], default=None)
    parser.add_argument("--k-min", type=int, default=None)
    parser.add_argument("--k-max", type=int, default=None)
    parser.add_argument("--k", type=int, default=None, help="force the number of clusters")
    parser.add_argument("--k-index", choices=["silhouette", "calinski_harabasz"], default=None,
                        help="index used to pick k")
    parser.add_argument("--restarts", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--employee-threshold", type=int, default=None)
    parser.add_argument("--group-by", action="append", default=None,
                        choices=["year", "nace", "cluster", "year_nace"])
    parser.add_argument("--covariate", action="append", default=None,
                        help="nace, year, legal_form, importer, exporter, or none")
    parser.add_argument("--workers", type=int, default=None, help="threads for k-means restarts")
    return parser


def build_parser():
    parser = CodaArgumentParser(
        prog="coda-ratios",
        description="Compositional analysis of financial statements: imputation, clustering, ratios.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=CodaArgumentParser)
    logging_flags = _logging_flags()
    pipeline_flags = _pipeline_flags()

    validate = subparsers.add_parser("validate", parents=[pipeline_flags, logging_flags],
                                     help="check and filter the input file")
    validate.add_argument("--out", default=None, help="directory for the exclusion report")

    for name, help_text in (
        ("impute", "replace zeros and write the imputed parts"),
        ("cluster", "select k and cluster firm-years in CLR space"),
        ("ratios", "compositional mean ratios by group"),
        ("associate", "relate clusters to covariates"),
        ("run", "full pipeline"),
    ):
        sub = subparsers.add_parser(name, parents=[pipeline_flags, logging_flags], help=help_text)
        sub.add_argument("--out", required=True, help="report directory")

    simulate = subparsers.add_parser("simulate", parents=[logging_flags], help="write a synthetic panel")
    simulate.add_argument("--out", required=True, help="CSV file to write")
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--firms", type=int, default=100)
    simulate.add_argument("--years", default="2021,2022,2023", help="comma separated years")
    simulate.add_argument("--clusters", type=int, default=3)
    simulate.add_argument("--separation", type=float, default=5.0)
    simulate.add_argument("--spread", type=float, default=0.1)
    simulate.add_argument("--zero-fraction", type=float, default=0.0)
    simulate.add_argument("--switch-prob", type=float, default=0.0)
    return parser


def _overrides(args):
    overrides = {
        "dl_percentile": args.dl_percentile,
        "em_tol": args.em_tol,
        "em_max_iter": args.em_max_iter,
        "delta_fraction": args.delta_fraction,
        "imputation": args.imputation,
        "k_min": args.k_min,
        "k_max": args.k_max,
        "k": args.k,
        "k_selection_index": args.k_index,
        "restarts": args.restarts,
        "seed": args.seed,
        "employee_threshold": args.employee_threshold,
        "group_keys": tuple(args.group_by) if args.group_by else None,
        "workers": args.workers,
    }
    if args.covariate:
        names = [c.strip() for item in args.covariate for c in item.split(",") if c.strip()]
        if names == ["none"]:
            overrides["covariates"] = ()
            overrides["numeric_covariates"] = ()
        else:
            overrides["covariates"] = tuple(names)
    return overrides


def _simulate(args):
    from src.pipeline import synthetic_panel

    try:
        years = tuple(int(y) for y in args.years.split(",") if y.strip())
    except ValueError as e:
        raise UsageError(f"--years must be comma separated integers: {args.years!r}") from e
    panel = synthetic_panel(
        firms=args.firms,
        years=years,
        clusters=args.clusters,
        seed=args.seed,
        separation=args.separation,
        spread=args.spread,
        zero_fraction=args.zero_fraction,
        switch_prob=args.switch_prob,
    )
    panel.write_csv(args.out)


def _run_command(args):
    from src.config import config
    from src.pipeline import emit_reports, emit_validation, ingest, run_pipeline

    run_config = config.run_config(args.config, **_overrides(args))
    if args.command in SEEDED_COMMANDS:
        run_config.require_seed()
    logger.info(f"Command '{args.command}' with config digest {run_config.digest()[:12]}")

    dataset = ingest(args.input, run_config.employee_threshold)
    if args.command == "validate":
        print(f"{dataset.n_ingested} rows read, {dataset.n_kept} kept, {len(dataset.exclusions)} excluded")
        for reason, count in dataset.exclusion_counts().items():
            print(f"  {reason}: {count}")
        if args.out:
            emit_validation(dataset, run_config, args.out, decimals=config.report_decimals)
        return

    stages = COMMAND_STAGES[args.command]
    if args.command == "ratios" and run_config.seed is not None:
        stages = ("impute", "cluster", "ratios")
    result = run_pipeline(dataset, run_config, stages)
    emit_reports(result, args.out, decimals=config.report_decimals, plot_config=config.plot_config)


def main(argv=None):
    """
    CLI entry point. Returns the process exit code:
    0 success, 1 usage error, 2 data error, 3 numerical failure.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(verbose=args.verbose, logs_dir=args.log_dir)

    try:
        if args.command == "simulate":
            _simulate(args)
        else:
            _run_command(args)
    except CodaError as e:
        logger.error(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {str(e)}")
        return DataError.exit_code
    except Exception as e:
        logger.error(f"Unhandled error: {str(e)}")
        logger.error(traceback.format_exc())
        return NumericalError.exit_code

    logger.info(f"Command '{args.command}' finished")
    return 0


if __name__ == "__main__":
    sys.exit(main())
