"""Command-line driver: fit / predict / simulate / compare.

Every command is a pure function of its input files, the resolved
configuration, and the master seed; rerunning with the same inputs produces
byte-identical outputs. Configuration precedence is CLI flags over config
file over defaults, and the fully resolved configuration is hashed into the
simulation manifest.

Exit codes: 0 success, 1 invalid input (missing or malformed file, bad
configuration), 2 processing failure (model selection or simulation could
not complete).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import _jsonfmt, evaluation, scenarios, selection
from .arma import conditional_residuals
from .errors import (DataFormatError, FitError, MissingModelError,
                     SelectionError)
from .selection import FailedHour, FitReport, OrderGrid
from .series import NightMask, detect_night_hours, load_series, slice_by_hour, split_at_date

MODELS_FORMAT = "solar-arma-models"
MODELS_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters; defaults reproduce the reference setup."""

    data: Optional[str] = None
    out: str = "."
    models: Optional[str] = None
    split: Union[float, str] = 0.2
    grid_max: int = 4
    lags: tuple = (5, 10, 15)
    scenarios: int = 2000
    quantiles: tuple = (0.1, 0.5, 0.9)
    seed: int = 0
    night_threshold: float = 0.0
    sp_window: int = 2

    def validate(self) -> None:
        if isinstance(self.split, float):
            if not 0.0 < self.split < 1.0:
                raise ValueError(f"split fraction must be in (0, 1), got {self.split}")
        elif not isinstance(self.split, str):
            raise ValueError("split must be a fraction or an ISO date string")
        if self.grid_max < 1:
            raise ValueError("grid-max must be >= 1")
        if self.scenarios < 1:
            raise ValueError("scenarios must be >= 1")
        if not self.lags or any(int(l) < 1 for l in self.lags):
            raise ValueError("lags must be positive integers")
        qs = [float(p) for p in self.quantiles]
        if any(not 0.0 < p < 1.0 for p in qs) or qs != sorted(qs) or len(set(qs)) != len(qs):
            raise ValueError("quantiles must be strictly increasing and inside (0, 1)")
        if self.night_threshold < 0.0:
            raise ValueError("night-threshold must be >= 0")
        if self.sp_window < 1:
            raise ValueError("sp_window must be >= 1")

    @property
    def grid(self) -> OrderGrid:
        return OrderGrid.square(self.grid_max)

    @property
    def models_path(self) -> Path:
        return Path(self.models) if self.models else Path(self.out) / "models.json"

    def to_dict(self) -> dict:
        return {
            "data": self.data,
            "out": self.out,
            "models": self.models,
            "split": self.split,
            "grid_max": self.grid_max,
            "lags": list(self.lags),
            "scenarios": self.scenarios,
            "quantiles": list(self.quantiles),
            "seed": self.seed,
            "night_threshold": self.night_threshold,
            "sp_window": self.sp_window,
        }

    def hash(self) -> str:
        return hashlib.sha256(_jsonfmt.dumps(self.to_dict()).encode()).hexdigest()


_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def _parse_split(raw) -> Union[float, str]:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return float(raw)
    s = str(raw)
    try:
        return float(s)
    except ValueError:
        return s  # treated as the last training date


def _parse_lags(raw) -> tuple:
    if isinstance(raw, str):
        raw = raw.split(",")
    return tuple(int(v) for v in raw)


def _parse_quantiles(raw) -> tuple:
    if isinstance(raw, str):
        raw = raw.split(",")
    return tuple(float(v) for v in raw)


def resolve_config(config_file: Optional[str], overrides: dict) -> RunConfig:
    """defaults <- config file <- CLI flags, with full validation."""
    values: dict = {}
    if config_file:
        try:
            with open(config_file) as fh:
                loaded = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"config file {config_file}: invalid JSON ({exc})") from exc
        if not isinstance(loaded, dict):
            raise DataFormatError(f"config file {config_file}: expected a JSON object")
        unknown = set(loaded) - _FIELD_NAMES
        if unknown:
            raise DataFormatError(
                f"config file {config_file}: unknown keys {sorted(unknown)}")
        values.update(loaded)
    values.update({k: v for k, v in overrides.items() if v is not None})

    if "split" in values:
        values["split"] = _parse_split(values["split"])
    if "lags" in values:
        values["lags"] = _parse_lags(values["lags"])
    if "quantiles" in values:
        values["quantiles"] = _parse_quantiles(values["quantiles"])
    for key in ("grid_max", "scenarios", "seed", "sp_window"):
        if key in values:
            values[key] = int(values[key])
    if "night_threshold" in values:
        values["night_threshold"] = float(values["night_threshold"])

    cfg = RunConfig(**values)
    try:
        cfg.validate()
    except ValueError as exc:
        raise DataFormatError(f"invalid configuration: {exc}") from exc
    return cfg


def _require_data(cfg: RunConfig) -> Path:
    if not cfg.data:
        raise DataFormatError("no data file given (use --data)")
    path = Path(cfg.data)
    if not path.exists():
        raise DataFormatError(f"data file not found: {path}")
    return path


def _load_split(cfg: RunConfig):
    data = load_series(_require_data(cfg))
    mask = detect_night_hours(data, cfg.night_threshold)
    train, test = evaluation._split(data, cfg.split)
    return data, mask, train, test


def _last_date(s) -> str:
    return str(s.timestamps[-1].astype("datetime64[D]"))


# ---------------------------------------------------------------------------
# subcommands

def cmd_fit(cfg: RunConfig) -> int:
    data, mask, train, test = _load_split(cfg)
    reports = selection.fit_all_hours(train, mask, cfg.grid,
                                      lags=cfg.lags, seed=cfg.seed)
    fitted = [r for r in reports if isinstance(r, FitReport)]
    failed = [r for r in reports if isinstance(r, FailedHour)]
    if not fitted:
        detail = "; ".join(f"hour {r.hour:02d}: {r.error}" for r in failed)
        raise SelectionError(f"every modelled hour failed: {detail}")

    doc = {
        "format": MODELS_FORMAT,
        "version": MODELS_VERSION,
        "seed": cfg.seed,
        "night_threshold": cfg.night_threshold,
        "zero_hours": sorted(mask.zero_hours),
        "grid": cfg.grid.to_dict(),
        "lags": list(cfg.lags),
        "split": cfg.split,
        "train_end_date": _last_date(train),
        "n_train_days": train.n_days,
        "hours": [r.to_dict() for r in reports],
    }
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg.models_path.parent.mkdir(parents=True, exist_ok=True)
    cfg.models_path.write_text(_jsonfmt.dumps(doc) + "\n")

    print("hour   p  q")
    for r in fitted:
        print(f"{r.hour:02d}:00  {r.chosen[0]}  {r.chosen[1]}")
    print(f"({len(fitted)} models; grid {cfg.grid.p_min}..{cfg.grid.p_max} x "
          f"{cfg.grid.q_min}..{cfg.grid.q_max}; seed {cfg.seed}; "
          f"wrote {cfg.models_path})")
    for r in fitted:
        for w in r.warnings:
            print(f"warning: {w}", file=sys.stderr)
    for r in failed:
        print(f"warning: hour {r.hour:02d} unusable: {r.error}", file=sys.stderr)
    return 0


def _load_models(cfg: RunConfig) -> dict:
    path = cfg.models_path
    if not path.exists():
        raise DataFormatError(f"models file not found: {path}")
    try:
        doc = _jsonfmt.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"models file {path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODELS_FORMAT:
        raise DataFormatError(f"models file {path}: not a {MODELS_FORMAT} document")
    if doc.get("version") != MODELS_VERSION:
        raise DataFormatError(f"models file {path}: unsupported version {doc.get('version')}")
    return doc


def _reports_from_doc(doc: dict):
    reports = []
    for entry in doc["hours"]:
        if "error" in entry:
            reports.append(FailedHour.from_dict(entry))
        else:
            reports.append(FitReport.from_dict(entry))
    return reports


def cmd_predict(cfg: RunConfig) -> int:
    doc = _load_models(cfg)
    reports = _reports_from_doc(doc)
    fitted = {r.hour: r for r in reports if isinstance(r, FitReport)}
    for r in reports:
        if isinstance(r, FailedHour):
            print(f"warning: hour {r.hour:02d} has no model ({r.error}); excluded",
                  file=sys.stderr)

    data = load_series(_require_data(cfg))
    train, test = split_at_date(data, doc["train_end_date"])

    data_hours = {int(h) for h in np.unique(data.hour_of_day)}
    missing = [h for h in sorted(fitted) if h not in data_hours]
    if missing:
        raise DataFormatError(
            f"model/data hour mismatch: data has no observations at hours {missing}")

    rows = []
    pred_by_pos: dict = {}
    test_hours = test.hour_of_day
    observed = ~np.isnan(test.power)
    for h, rep in sorted(fitted.items()):
        te = slice_by_hour(test, h)
        if len(te) == 0:
            continue
        tr = slice_by_hour(train, h)
        full = np.concatenate([tr.values, te.values])
        one_step = full - conditional_residuals(rep.model, full)
        for pos, pred in zip(np.where((test_hours == h) & observed)[0],
                             one_step[len(tr):]):
            pred_by_pos[int(pos)] = float(pred)
    if not pred_by_pos:
        raise DataFormatError("empty test window: no modelled-hour observations "
                              f"after {doc['train_end_date']}")
    for pos in sorted(pred_by_pos):
        rows.append((str(test.timestamps[pos]), float(test.power[pos]), pred_by_pos[pos]))

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    pred_path = out / "predictions.csv"
    with open(pred_path, "w", newline="") as fh:
        fh.write("timestamp,actual,predicted\n")
        for ts, act, pred in rows:
            fh.write(f"{ts},{act!r},{pred!r}\n")

    report = evaluation.metric_report([r[1] for r in rows], [r[2] for r in rows])
    metrics_path = out / "metrics.json"
    metrics_path.write_text(_jsonfmt.dumps(report.to_dict()) + "\n")
    print(f"wrote {pred_path} ({len(rows)} predictions) and {metrics_path}")
    print(f"mae={report.mae:.4f} MW ({report.mae_pct_of_max:.2f}% of max)  "
          f"rmse={report.rmse:.4f} MW ({report.rmse_pct_of_max:.2f}% of max)")
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    doc = _load_models(cfg)
    reports = _reports_from_doc(doc)
    mask = NightMask(frozenset(int(h) for h in doc["zero_hours"]))
    sset = scenarios.generate_scenarios(reports, mask, n=cfg.scenarios, seed=cfg.seed)
    bands = scenarios.quantile_bands(sset, cfg.quantiles) if sset.n_scenarios >= 2 else None
    frac0, frac5 = scenarios.negative_rate_report(sset)

    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    scen_path = out / "scenarios.csv"
    scenarios.write_scenarios_csv(sset, scen_path)
    written = [str(scen_path)]
    if bands is not None:
        q_path = out / "quantiles.csv"
        scenarios.write_quantiles_csv(bands, q_path)
        written.append(str(q_path))
    manifest = {
        "seed": cfg.seed,
        "config_hash": cfg.hash(),
        "n_scenarios": sset.n_scenarios,
        "modeled_hours": list(sset.modeled_hours),
        "truncated_count": sset.truncated_count,
        "below_neg5_count": sset.below_neg5_count,
        "fraction_below_zero": frac0,
        "fraction_below_neg5": frac5,
        "models_file": str(cfg.models_path),
    }
    man_path = out / "manifest.json"
    man_path.write_text(_jsonfmt.dumps(manifest) + "\n")
    written.append(str(man_path))
    print(f"wrote {', '.join(written)}")
    print(f"{sset.n_scenarios} scenarios; {100 * frac0:.2f}% of raw draws below 0, "
          f"{100 * frac5:.2f}% below -5 MW (truncated to 0)")
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    data, mask, train, test = _load_split(cfg)
    table = evaluation.compare_models(data, mask, cfg.grid, split=cfg.split,
                                      sp_window=cfg.sp_window, lags=cfg.lags,
                                      seed=cfg.seed)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "comparison.csv"
    table.write_csv(csv_path)
    print(table.to_text())
    print(f"wrote {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data", help="input CSV (date,hour,power_mw)")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="master random seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--split", help="test fraction in (0,1) or last training date")
    common.add_argument("--scenarios", type=int, help="number of scenarios to sample")
    common.add_argument("--grid-max", type=int, dest="grid_max",
                        help="orders searched: 1..N for both p and q")
    common.add_argument("--lags", help="Ljung-Box lags, comma-separated")
    common.add_argument("--night-threshold", type=float, dest="night_threshold",
                        help="max MW for an hour to count as night")
    common.add_argument("--models", help="models.json path (default <out>/models.json)")

    parser = argparse.ArgumentParser(
        prog="solar-arma",
        description="Hour-by-hour ARMA forecasting and scenario generation "
                    "for solar power series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("fit", parents=[common],
                   help="select and fit one model per daylight hour")
    sub.add_parser("predict", parents=[common],
                   help="day-ahead one-step predictions over the test window")
    sub.add_parser("simulate", parents=[common],
                   help="Monte Carlo scenarios and quantile bands")
    sub.add_parser("compare", parents=[common],
                   help="hourly ARMA vs single ARMA vs Smart-Persistence")
    return parser


_COMMANDS = {"fit": cmd_fit, "predict": cmd_predict,
             "simulate": cmd_simulate, "compare": cmd_compare}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in
                 ("data", "seed", "out", "split", "scenarios", "grid_max",
                  "lags", "night_threshold", "models")}
    try:
        cfg = resolve_config(args.config, overrides)
        return _COMMANDS[args.command](cfg)
    except (DataFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SelectionError, FitError, MissingModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
