"""Command-line interface: ``syrbo fit | predict | experiment | compare``.

Every option can also be set through an environment variable named
``SYRBO_<OPTION>`` (e.g. ``SYRBO_SEED=7``, ``SYRBO_JOBS=4``); an explicit
flag wins over the environment.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, boosting, harness, stats
from .boosting import SyrboConfig
from .data import DEFAULT_TARGET, DataError, l2_normalize_rows, load_dataset, read_table
from .gp import GpConfig
from .harness import ExperimentConfig

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("syrbo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _env(dest, default=None):
    return os.environ.get(f"SYRBO_{dest.upper()}", default)


def _add(p, *flags, dest, default=None, **kw):
    env = _env(dest)
    if env is not None:
        default = env
        kw.pop("required", None)
    p.add_argument(*flags, dest=dest, default=default, **kw)


def _gp_options(p, stages_required=True):
    _add(p, "--stages", dest="stages", type=int, required=stages_required,
         help="number of boosting stages (no default)")
    _add(p, "--population-size", dest="population_size", type=int, default=200)
    _add(p, "--generations", dest="generations", type=int, default=200)
    _add(p, "--seed", dest="seed", type=int, default=0, help="master seed")
    _add(p, "--target-column", dest="target_column", default=DEFAULT_TARGET)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="syrbo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a boosted model on a whole dataset")
    p.add_argument("dataset")
    _gp_options(p)
    _add(p, "--model-out", dest="model_out", default="model.json")

    p = sub.add_parser("predict", help="predict with a saved model")
    p.add_argument("model")
    p.add_argument("dataset")
    _add(p, "--target-column", dest="target_column", default=DEFAULT_TARGET)
    _add(p, "--out", dest="out", default="predictions.tsv")

    p = sub.add_parser("experiment", help="cross-validated SyRBo vs. baseline comparison")
    p.add_argument("datasets", nargs="+")
    _gp_options(p)
    _add(p, "--replicates", dest="replicates", type=int, default=30)
    _add(p, "--folds", dest="folds", type=int, default=5)
    _add(p, "--rounds", dest="rounds", type=int, default=10_000)
    _add(p, "--jobs", dest="jobs", type=int, default=1)
    _add(p, "--out-dir", dest="out_dir", default="results")

    p = sub.add_parser("compare", help="re-analyse stored records without retraining")
    p.add_argument("syrbo_records", help="records file supplying the SyRBo scores")
    p.add_argument("baseline_records", help="records file supplying the baseline scores")
    _add(p, "--rounds", dest="rounds", type=int, default=10_000)
    _add(p, "--seed", dest="seed", type=int, default=0)
    _add(p, "--out", dest="out", default="-")
    return parser


# ------------------------------------------------------------------ helpers

def _gp_config(args) -> GpConfig:
    try:
        return GpConfig(population_size=args.population_size,
                        generations=args.generations, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _syrbo_config(args) -> SyrboConfig:
    gp = _gp_config(args)
    if args.stages is None or args.stages < 1:
        raise UsageError(f"--stages must be >= 1, got {args.stages}")
    return SyrboConfig(args.stages, gp)


def _provenance(command, **fields) -> dict:
    return {"command": command, "syrbo_version": __version__, **fields}


def _write(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ------------------------------------------------------------------ commands

def cmd_fit(args) -> int:
    config = _syrbo_config(args)
    ds = load_dataset(args.dataset, args.target_column).normalized()
    model = boosting.fit(config, ds.X, ds.y)
    cumulative = np.zeros(ds.n_rows)
    for s, booster in enumerate(model.boosters):
        cumulative = cumulative + booster.predict(ds.X)
        print(f"stage {s}: training MAE {harness.mae(cumulative, ds.y)!r}  {booster}")
    header = _provenance("fit", dataset=str(args.dataset), target_column=args.target_column)
    _write(args.model_out, boosting.dumps_model(model, header))
    return EXIT_OK


def cmd_predict(args) -> int:
    try:
        model = boosting.load_model(args.model)
    except (OSError, ValueError, KeyError) as exc:
        raise DataError(f"cannot read model {args.model}: {exc}") from None
    header, values = read_table(args.dataset)
    y = None
    if args.target_column in header:
        t = header.index(args.target_column)
        y = values[:, t]
        values = np.delete(values, t, axis=1)
    if values.shape[1] != model.feature_count:
        raise DataError(f"model expects {model.feature_count} feature(s), "
                        f"{args.dataset} has {values.shape[1]}")
    pred = boosting.predict(model, l2_normalize_rows(values))
    _write(args.out, "prediction\n" + "".join(f"{v!r}\n" for v in pred.tolist()))
    if y is not None and len(y):
        print(f"MAE {harness.mae(pred, y)!r}")
    return EXIT_OK


def _experiment_config(args) -> ExperimentConfig:
    syrbo = _syrbo_config(args)
    if args.rounds < 1:
        raise UsageError("--rounds must be >= 1")
    if args.jobs == 0:
        raise UsageError("--jobs must be non-zero")
    try:
        return ExperimentConfig(syrbo, args.replicates, args.folds, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write_reports(out_dir, outcomes, records, stages, provenance, timings=True):
    out = Path(out_dir)
    _write(out / "records.tsv", harness.format_records(records, provenance))
    doc = {"provenance": provenance, "stages": stages,
           "datasets": [o.to_dict() for o in outcomes]}
    _write(out / "comparison.json", json.dumps(doc, indent=2) + "\n")
    table = stats.format_summary_table([(stages, stats.summarize(outcomes))])
    head = "".join(f"# {k}: {v}\n" for k, v in provenance.items())
    _write(out / "summary.txt", head + table)
    if timings:
        lines = ["dataset\tsyrbo_median_seconds\tbaseline_median_seconds\n"]
        for name in harness.datasets_in(records):
            lines.append(f"{name}\t{harness.median_seconds(records, harness.SYRBO, name):.2f}"
                         f"\t{harness.median_seconds(records, harness.BASELINE, name):.2f}\n")
        _write(out / "timings.tsv", "".join(lines))
        _write(out / "timings_records.tsv", harness.format_records(records, timings=True))


def cmd_experiment(args) -> int:
    config = _experiment_config(args)
    provenance = _provenance(
        "experiment", datasets=" ".join(map(str, args.datasets)),
        target_column=args.target_column, stages=config.syrbo.stages,
        replicates=config.replicates, folds=config.folds, rounds=args.rounds,
        seed=config.master_seed, gp_config=json.dumps(config.syrbo.gp.to_dict()),
    )
    records = []
    failed = exit_code = 0
    seen = set()
    for path in args.datasets:
        try:
            ds = load_dataset(path, args.target_column).normalized()
            if ds.name in seen:
                raise DataError(f"duplicate dataset name {ds.name!r}")
            seen.add(ds.name)
            log.info("%s: %d rows, %d features", ds.name, ds.n_rows, ds.n_features)
            records += harness.run_experiment(ds, config, jobs=args.jobs)
        except DataError as exc:
            print(f"syrbo: skipping {path}: {exc}", file=sys.stderr)
            failed += 1
            exit_code = max(exit_code, EXIT_DATA)
        except ValueError as exc:
            print(f"syrbo: skipping {path}: {exc}", file=sys.stderr)
            failed += 1
            exit_code = EXIT_RUNTIME
    outcomes = harness.compare(records, records, args.rounds, config.master_seed)
    _write_reports(args.out_dir, outcomes, records, config.syrbo.stages, provenance)
    for o in outcomes:
        print(f"{o.dataset}: SyRBo {o.median_syrbo:.4g}, baseline {o.median_baseline:.4g}, "
              f"p {o.p_value:.1E} {o.marker}".rstrip())
    print(stats.format_summary_table([(config.syrbo.stages, stats.summarize(outcomes))]), end="")
    if failed:
        print(f"syrbo: {failed} dataset(s) failed", file=sys.stderr)
    return exit_code


def cmd_compare(args) -> int:
    if args.rounds < 1:
        raise UsageError("--rounds must be >= 1")
    try:
        a = harness.read_records(args.syrbo_records)
        b = harness.read_records(args.baseline_records)
    except OSError as exc:
        raise DataError(str(exc)) from None
    except ValueError as exc:
        raise DataError(str(exc)) from None
    outcomes = harness.compare(a, b, args.rounds, args.seed)
    provenance = _provenance("compare", syrbo_records=str(args.syrbo_records),
                             baseline_records=str(args.baseline_records),
                             rounds=args.rounds, seed=args.seed)
    doc = {"provenance": provenance, "datasets": [o.to_dict() for o in outcomes],
           "summary": stats.summarize(outcomes)._asdict()}
    text = json.dumps(doc, indent=2) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        _write(args.out, text)
    return EXIT_OK


COMMANDS = {"fit": cmd_fit, "predict": cmd_predict,
            "experiment": cmd_experiment, "compare": cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"syrbo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"syrbo: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - last-resort diagnostic for the CLI
        print(f"syrbo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
