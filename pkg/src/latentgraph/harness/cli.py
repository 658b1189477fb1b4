"""Command-line entry point: generate-data | train | evaluate | ablate | correlate."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import defaultdict
from pathlib import Path

from ..forecasting import assign_params
from ..synthetic import DagDatasetConfig, DiffusionDatasetConfig, dag_dataset, diffusion_dataset, export_dataset
from .analysis import ABLATION_MODES, correlate_records, run_ablation_suite
from .config import GRAPH_SOURCES, MODELS, ConfigError, ExperimentConfig, read_config
from .models import build_model
from .records import CONFIG_FILE, find_records, format_value, load_record, save_record
from .sources import load_series, prepare
from .train import HORIZONS, evaluate_mae, predict_original, train

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("latentgraph")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat TOML experiment config")
    common.add_argument("--seed", type=int)
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--graph-source", choices=GRAPH_SOURCES)
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--repeats", type=int, default=5)
    common.add_argument("--kind", choices=("diffusion", "dag"), default="diffusion")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="latentgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("generate-data", parents=[common], help="write a synthetic dataset (CSV, edge list, metadata)")
    sub.add_parser("train", parents=[common], help="train one model and save a run record")
    sub.add_parser("evaluate", parents=[common], help="re-evaluate a saved run record on its test split")
    sub.add_parser("ablate", parents=[common], help="train under every graph source and tabulate deltas")
    corr = sub.add_parser("correlate", parents=[common], help="correlate edge scores across saved runs")
    corr.add_argument("runs", nargs="*", type=Path, help="run directories or roots (default: --out)")
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = read_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.model is not None:
        changes["model"] = args.model
    if args.graph_source is not None:
        changes["graph_source"] = args.graph_source
    cfg = cfg.replace(**changes) if changes else cfg
    cfg.validate()
    return cfg


def cmd_generate(args) -> int:
    if args.out is None:
        raise ConfigError("generate-data needs --out")
    seed = 0 if args.seed is None else args.seed
    extra = {}
    if args.config:
        cfg = read_config(args.config)
        extra = {"n": cfg.n, "T": cfg.T}
    if args.kind == "diffusion":
        ds = diffusion_dataset(DiffusionDatasetConfig(seed=seed, **extra))
    else:
        ds = dag_dataset(DagDatasetConfig(seed=seed, **extra))
    paths = export_dataset(ds, args.out)
    for name, p in paths.items():
        print(f"{name}: {p}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = resolve_config(args)
    data, gt = prepare(cfg)
    record = train(cfg, data, gt)
    out = args.out or Path("runs") / f"{cfg.model}-{cfg.graph_source}-seed{cfg.seed}"
    save_record(record, out)
    print(f"run: {out}")
    print(f"best epoch {record.best_epoch}, val MAE {record.best_val_mae:.5f}")
    for h, v in record.test_mae.items():
        print(f"test MAE@{h}: {format_value(v)}")
    return EXIT_OK


def _run_dir(args) -> Path:
    if args.out is not None:
        return args.out
    if args.config is not None:
        return args.config.parent if args.config.name == CONFIG_FILE else args.config
    raise ConfigError("evaluate needs the run directory via --out (or --config RUN/config.toml)")


def cmd_evaluate(args) -> int:
    run = _run_dir(args)
    if not (run / CONFIG_FILE).is_file():
        raise ConfigError(f"no run record at {run}")
    record = load_record(run)
    cfg = record.config
    data, gt = prepare(cfg)
    model = build_model(cfg, data.n, data.train_series, gt)
    assign_params(model, record.params)
    pred = predict_original(model, data, "test")
    mae = evaluate_mae(pred, data.targets_raw["test"], data.test.mask, [h for h in HORIZONS if h <= cfg.horizon])
    lines = ["horizon,mae,recorded"]
    for h, v in mae.items():
        lines.append(f"{h},{format_value(v)},{format_value(record.test_mae.get(h, float('nan')))}")
        print(f"test MAE@{h}: {format_value(v)} (recorded {format_value(record.test_mae.get(h, float('nan')))})")
    (run / "evaluation.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_ablate(args) -> int:
    cfg = resolve_config(args)
    if args.repeats < 1:
        raise ConfigError("--repeats must be positive")
    data, gt = prepare(cfg)
    modes = [m for m in ABLATION_MODES if m != "ground-truth" or gt is not None]
    out = args.out or Path("runs") / f"ablate-{cfg.model}"
    table, _ = run_ablation_suite(cfg, data, gt, modes=modes, repeats=args.repeats, out_dir=out)
    print(table.render())
    print(f"table: {out / 'ablation.csv'}")
    return EXIT_OK


def cmd_correlate(args) -> int:
    roots = args.runs or ([args.out] if args.out else [])
    if not roots:
        raise ConfigError("correlate needs run directories or --out")
    dirs = sorted({d for root in roots for d in find_records(root)})
    if not dirs:
        raise ConfigError(f"no run records under {', '.join(map(str, roots))}")
    groups = defaultdict(list)
    for d in dirs:
        rec = load_record(d)
        if rec.edge_scores is not None:
            groups[(rec.config.model, rec.config.gt_weight)].append((d, rec))
    if not groups:
        raise ConfigError("none of the runs carry learned edge scores")
    out = args.out or roots[0]
    reports = {}
    for (model, weight), items in sorted(groups.items()):
        _, gt = load_series(items[0][1].config)
        report = correlate_records([r for _, r in items], gt, labels=[str(d) for d, _ in items])
        key = model if weight == 0 else f"{model}-gtreg{weight:g}"
        reports[key] = report.to_dict()
        print(f"{key}: mean cross-run r = {format_value(report.mean_cross_run)}, "
              f"mean GT r = {format_value(report.mean_gt)} over {len(items)} runs")
    Path(out).mkdir(parents=True, exist_ok=True)
    (Path(out) / "correlation.json").write_text(json.dumps(reports, indent=1), encoding="utf-8")
    print(f"report: {Path(out) / 'correlation.json'}")
    return EXIT_OK


COMMANDS = {
    "generate-data": cmd_generate,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "ablate": cmd_ablate,
    "correlate": cmd_correlate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        log.debug("failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
