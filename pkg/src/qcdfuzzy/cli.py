"""Command-line interface.

Subcommands: ``cluster``, ``simulate``, ``benchmark``, ``mds`` and
``validate``. Every option may also be given in a JSON config file
(``--config``); keys are the option names with dashes replaced by
underscores and flags on the command line take precedence.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import aufc, fari, mds_2d, switch_success
from .exceptions import ConfigurationError, DataError, NumericalError
from .fuzzycluster import fcm_means_fit, fcm_medoids_fit, select_hyperparameters, validity_indices
from .io import FORMAT_VERSION, dump_json, read_panel_csv, write_panel_csv
from .qspec import DEFAULT_TAUS, pairwise_euclidean, qcd_features
from .reduce import DEFAULT_RETAINED_FRACTION, pca_scores
from .simgen import scenario_panel

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
THREADS_ENV = "QCDFUZZY_THREADS"

DEFAULTS = {
    "taus": list(DEFAULT_TAUS),
    "bandwidth": "auto",
    "retained_fraction": DEFAULT_RETAINED_FRACTION,
    "variant": "means",
    "C": "3",
    "m": "1.5",
    "restarts": 10,
    "max_iter": 1000,
    "tol": 1e-6,
    "seed": 0,
    "exponent_mode": "standard",
    "logdiff": False,
    "standardize": False,
    "truncate": False,
    "out": None,
    "scenario": 1,
    "T": 200,
    "innovation": "gaussian",
    "df": 3.0,
    "replication": 0,
    "burn_in": 500,
    "reps": 20,
    "T_list": None,
    "m_list": "1.5,2.0",
    "cutoff": 0.7,
    "records": None,
    "threads": None,
    "space": "features",
    "max_iter_mds": 300,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(v) for v in str(text).split(",") if v.strip()]


def _grid(text, cast):
    """Parse ``3``, ``2,3,4`` or ``start:stop[:step]`` (inclusive)."""
    if isinstance(text, (list, tuple)):
        return [cast(v) for v in text]
    if isinstance(text, (int, float)):
        return [cast(text)]
    text = str(text)
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise ConfigurationError(f"bad grid {text!r}")
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1.0
        if step <= 0 or stop < start:
            raise ConfigurationError(f"bad grid {text!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [cast(round(start + i * step, 10)) for i in range(count)]
    return [cast(v) for v in text.split(",") if v.strip()]


def _common(p):
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--taus", type=_float_list, help="comma-separated quantile levels")
    p.add_argument("--bandwidth", help="smoothing bandwidth in radians or 'auto'")
    p.add_argument("--retained-fraction", dest="retained_fraction", type=float)
    p.add_argument("--logdiff", action="store_true", default=argparse.SUPPRESS, help="first differences of logs")
    p.add_argument("--standardize", action="store_true", default=argparse.SUPPRESS, help="zero mean, unit variance")
    p.add_argument("--truncate", action="store_true", default=argparse.SUPPRESS, help="cut series to a common length")
    p.add_argument("--threads", type=int, help=f"worker count (default ${THREADS_ENV} or 1)")
    p.add_argument("--out", help="output path")


def _fit_opts(p):
    p.add_argument("--variant", choices=["means", "medoids"])
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--exponent-mode", dest="exponent_mode", choices=["standard", "paper_means"])


def build_parser():
    parser = _Parser(prog="qcdfuzzy", description="Fuzzy clustering of multivariate time series by QCD features.")
    parser.add_argument("--version", action="version", version=f"qcdfuzzy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cluster", help="cluster a panel CSV")
    p.add_argument("panel")
    _common(p)
    _fit_opts(p)
    p.add_argument("--C", help="number of clusters, or a grid like 2:6")
    p.add_argument("--m", help="fuzziness, or a grid like 1.1:3.0:0.1")

    p = sub.add_parser("simulate", help="simulate a scenario panel")
    p.add_argument("--config")
    p.add_argument("--scenario", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--innovation", choices=["gaussian", "student_t"])
    p.add_argument("--df", type=float)
    p.add_argument("--replication", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--out")

    p = sub.add_parser("benchmark", help="replicated simulation study")
    _common(p)
    _fit_opts(p)
    p.add_argument("--scenario", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--T-list", dest="T_list", help="comma-separated series lengths")
    p.add_argument("--m-list", dest="m_list", help="comma-separated fuzziness values")
    p.add_argument("--innovation", choices=["gaussian", "student_t"])
    p.add_argument("--df", type=float)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--cutoff", type=float)
    p.add_argument("--records", help="CSV path for per-replication records")

    p = sub.add_parser("mds", help="2-D scaling of the QCD dissimilarities")
    p.add_argument("panel")
    _common(p)
    p.add_argument("--space", choices=["features", "scores"], help="distances between raw features or PCA scores")
    p.add_argument("--max-iter", dest="max_iter_mds", type=int)

    p = sub.add_parser("validate", help="check a panel CSV against the schema")
    p.add_argument("panel")
    return parser


def resolve_config(args) -> dict:
    """Defaults, then the config file, then explicit flags."""
    cfg = dict(DEFAULTS)
    path = getattr(args, "config", None)
    if path:
        try:
            loaded = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path}: line {exc.lineno}: {exc.msg}") from None
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"config {path} must hold a JSON object")
        loaded.pop("format_version", None)
        unknown = sorted(set(loaded) - set(DEFAULTS))
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("config", "command") or value is None:
            continue
        cfg[key] = value
    return cfg


def _bandwidth(cfg):
    bw = cfg["bandwidth"]
    if bw in (None, "auto"):
        return None
    try:
        return float(bw)
    except (TypeError, ValueError):
        raise ConfigurationError(f"bandwidth must be a number or 'auto', got {bw!r}") from None


def _threads(cfg):
    n = cfg.get("threads")
    if n is None:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(env)
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if n < 1:
        raise ConfigurationError("thread count must be at least 1")
    return n


def _load(cfg, path):
    panel = read_panel_csv(path)
    if cfg["logdiff"] or cfg["standardize"]:
        panel = panel.preprocess(logdiff=cfg["logdiff"], standardize=cfg["standardize"])
    return panel


def _echo(cfg, keys):
    return {k: cfg[k] for k in keys}


_FEATURE_KEYS = ["taus", "bandwidth", "retained_fraction", "logdiff", "standardize", "truncate"]
_FIT_KEYS = ["variant", "restarts", "max_iter", "tol", "seed", "exponent_mode"]


def _fit(X, C, m, cfg, stream_key=()):
    if cfg["variant"] == "means":
        return fcm_means_fit(
            X, C, m, cfg["max_iter"], cfg["tol"], cfg["restarts"], cfg["seed"], cfg["exponent_mode"], stream_key=stream_key
        )
    return fcm_medoids_fit(
        X, C, m, cfg["max_iter"], cfg["restarts"], cfg["seed"], cfg["exponent_mode"], stream_key=stream_key
    )


def _partition_doc(part, X):
    doc = {
        "membership": part.U,
        "crisp_labels": part.crisp_labels(),
        "prototypes": part.prototypes,
        "objective": part.objective,
        "iterations": part.iterations,
        "converged": part.converged,
        "C": part.U.shape[1],
        "m": part.m,
    }
    if part.medoids is not None:
        doc["medoids"] = part.medoids
    if part.U.shape[1] >= 2:
        try:
            doc["validity"] = validity_indices(X, part)._asdict()
        except NumericalError as exc:
            doc["validity"] = {"error": str(exc)}
    return doc


def cmd_cluster(cfg, out):
    panel = _load(cfg, cfg["panel"])
    feats = qcd_features(panel, cfg["taus"], _bandwidth(cfg), cfg["truncate"], _threads(cfg))
    scores = pca_scores(feats, cfg["retained_fraction"])
    C_grid = _grid(cfg["C"], int)
    m_grid = _grid(cfg["m"], float)
    doc = {
        "format_version": FORMAT_VERSION,
        "command": "cluster",
        "version": __version__,
        "config": _echo(cfg, ["panel", "C", "m"] + _FEATURE_KEYS + _FIT_KEYS),
        "series_ids": panel.ids,
        "pca": {"p": scores.p, "k": scores.k, "explained": scores.explained},
    }
    if len(C_grid) * len(m_grid) > 1:
        report = select_hyperparameters(
            scores.scores, C_grid, m_grid, cfg["restarts"], cfg["seed"], cfg["variant"], cfg["max_iter"], cfg["tol"],
            cfg["exponent_mode"], _threads(cfg),
        )
        doc["grid"] = report.cells
        C, m = report.best_pair
        part = report.partitions[(C, m)]
    else:
        C, m = C_grid[0], m_grid[0]
        part = _fit(scores.scores, C, m, cfg)
    doc["selected"] = {"C": C, "m": m}
    doc["partition"] = _partition_doc(part, scores.scores)
    if panel.true_labels is not None:
        doc["fari_vs_labels"] = fari(part.U, panel.true_labels)
    _emit(doc, cfg["out"], out)
    msg = f"C={C} m={m} objective={part.objective:.6g}"
    if "fari_vs_labels" in doc:
        msg += f" FARI={doc['fari_vs_labels']:.4f}"
    print(msg, file=sys.stderr)


def _emit(doc, path, out):
    text = dump_json(doc, path)
    if path is None:
        out.write(text)


def cmd_simulate(cfg, out):
    panel = scenario_panel(cfg["scenario"], cfg["T"], cfg["innovation"], cfg["seed"], cfg["replication"], cfg["burn_in"], cfg["df"])
    path = cfg["out"] or f"scenario{cfg['scenario']}_T{cfg['T']}_seed{cfg['seed']}.csv"
    write_panel_csv(panel, path)
    out.write(f"wrote {path} ({len(panel)} series, T={cfg['T']}, d={panel.d})\n")


def _replication(task):
    """One benchmark replication across all m values; run in a worker."""
    cfg, T, ti, rep = task
    scenario = cfg["scenario"]
    panel = scenario_panel(scenario, T, cfg["innovation"], cfg["seed"], rep, cfg["burn_in"], cfg["df"])
    feats = qcd_features(panel, cfg["taus"], _bandwidth(cfg))
    scores = pca_scores(feats, cfg["retained_fraction"])
    switching = panel.switch_index is not None
    C = 2 if switching else 3
    records = []
    for mi, m in enumerate(cfg["m_values"]):
        part = _fit(scores.scores, C, m, cfg, stream_key=(rep, ti, mi))
        rec = {"T": T, "replication": rep, "m": m, "iterations": part.iterations, "converged": part.converged}
        rec["max_membership"] = part.U.max(axis=0).tolist()
        if switching:
            rec["success"] = switch_success(part.U, panel.true_labels, panel.switch_index, cfg["cutoff"])
            rec["switch_membership"] = part.U[panel.switch_index].tolist()
        else:
            rec["fari"] = fari(part.U, panel.true_labels)
        records.append(rec)
    return records


def _table_text(title, T_list, m_values, cells, aufcs=None):
    lines = [title, "T".rjust(6) + "".join(f"m={m:g}".rjust(10) for m in m_values)]
    if aufcs is not None:
        lines[-1] += "AUFC".rjust(10)
    for ti, T in enumerate(T_list):
        row = f"{T:6d}" + "".join(f"{cells[ti][mi]:10.3f}" for mi in range(len(m_values)))
        if aufcs is not None:
            row += f"{aufcs[ti]:10.4f}" if aufcs[ti] is not None else "-".rjust(10)
        lines.append(row)
    return "\n".join(lines) + "\n"


def cmd_benchmark(cfg, out):
    from .simgen import SCENARIO_LENGTHS

    scenario = int(cfg["scenario"])
    T_list = [int(t) for t in _grid(cfg["T_list"], float)] if cfg["T_list"] is not None else list(SCENARIO_LENGTHS[scenario])
    m_values = _grid(cfg["m_list"], float)
    if cfg["reps"] < 1:
        raise ConfigurationError("reps must be at least 1")
    work = dict(cfg, m_values=m_values)
    work.pop("panel", None)
    tasks = [(work, T, ti, rep) for ti, T in enumerate(T_list) for rep in range(cfg["reps"])]
    threads = _threads(cfg)
    if threads == 1:
        chunks = [_replication(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_replication, tasks))  # map keeps task order
    records = [r for chunk in chunks for r in chunk]

    switching = scenario >= 4
    metric = "success" if switching else "fari"
    cells = [[float(np.mean([r[metric] for r in records if r["T"] == T and r["m"] == m])) for m in m_values] for T in T_list]
    doc = {
        "format_version": FORMAT_VERSION,
        "command": "benchmark",
        "version": __version__,
        "config": _echo(
            cfg, ["scenario", "reps", "innovation", "df", "burn_in", "cutoff"] + _FEATURE_KEYS + _FIT_KEYS
        ),
        "T_list": T_list,
        "m_list": m_values,
        "metric": "success_rate" if switching else "mean_fari",
        "table": cells,
        "records": records,
    }
    aufcs = None
    if switching:
        aufcs = [aufc(m_values, row) if len(m_values) >= 2 else None for row in cells]
        doc["aufc"] = aufcs
    title = f"Scenario {scenario}: {'success rate' if switching else 'mean FARI'} over {cfg['reps']} replications"
    out.write(_table_text(title, T_list, m_values, cells, aufcs))
    if cfg["out"]:
        dump_json(doc, cfg["out"])
    if cfg["records"]:
        _write_records(records, cfg["records"], switching)


def _write_records(records, path, switching):
    keys = ["T", "replication", "m", "success" if switching else "fari", "iterations", "converged"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# format_version: {FORMAT_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for r in records:
            w.writerow([int(r[k]) if isinstance(r[k], bool) else r[k] for k in keys])


def cmd_mds(cfg, out):
    panel = _load(cfg, cfg["panel"])
    feats = qcd_features(panel, cfg["taus"], _bandwidth(cfg), cfg["truncate"], _threads(cfg))
    X = feats if cfg["space"] == "features" else pca_scores(feats, cfg["retained_fraction"]).scores
    emb = mds_2d(pairwise_euclidean(X), max_iter=cfg["max_iter_mds"])
    doc = {
        "format_version": FORMAT_VERSION,
        "command": "mds",
        "version": __version__,
        "config": _echo(cfg, ["panel", "space", "max_iter_mds"] + _FEATURE_KEYS),
        "series_ids": panel.ids,
        "coords": emb.coords,
        "stress": emb.stress,
        "r_squared": emb.r_squared,
        "iterations": emb.iterations,
    }
    if panel.true_labels is not None:
        doc["labels"] = panel.true_labels
    _emit(doc, cfg["out"], out)


def cmd_validate(cfg, out):
    panel = read_panel_csv(cfg["panel"])
    lengths = sorted(set(panel.lengths))
    out.write(
        f"ok: {len(panel)} series, d={panel.d}, lengths {lengths[0]}..{lengths[-1]}"
        f"{', labels present' if panel.true_labels is not None else ''}\n"
    )


COMMANDS = {
    "cluster": cmd_cluster,
    "simulate": cmd_simulate,
    "benchmark": cmd_benchmark,
    "mds": cmd_mds,
    "validate": cmd_validate,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        COMMANDS[args.command](cfg, out)
    except (ConfigurationError, UsageError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
