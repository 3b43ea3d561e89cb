"""Command-line surface: CSV ingestion, fitting, simulation, reports.

Subcommands
-----------
fit       estimate threshold-response directions from a CSV dataset
simulate  run a Monte Carlo preset or a custom cell file
km        product-limit survival curve from a time/status file

Every report embeds a provenance block: tool version, the fully resolved
configuration (defaults included), seed, RNG identifier, and the
estimation conventions in force. Re-running the same configuration
reproduces a report bitwise apart from timing, which is confined to
dedicated ``# generated_at`` / ``# elapsed_seconds`` lines in TSV and to
the single ``timing`` key in JSON.

Exit codes: 0 success, 1 computational failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import (
    IndredError,
    ParseError,
    ThresholdTooLate,
    TooFewRows,
)
from .estimator import (
    SdrMethod,
    fit_direct,
    fit_two_stage,
    fit_two_stage_merc,
    merc_select,
)
from .harness import (
    TABLE1_CONFIGS,
    CellSpec,
    SimReport,
    preset_table1_model4,
    preset_table1_model5,
    run_intro_scenario,
    run_table,
)
from .kernels import DataSet
from .simgen import RNG_ALGORITHM, ModelSpec
from .survival import kaplan_meier

__all__ = [
    "RunConfig",
    "parse_csv",
    "cmd_fit",
    "cmd_simulate",
    "cmd_km",
    "main",
]

_PAIR_METHODS = ("sir-sir", "sir-save")
_SINGLE_METHODS = ("sir", "save")
_PRESETS = ("table1-model4", "table1-model5", "intro-gamma", "custom")
_OUTPUT_DIR_ENV = "INDRED_OUTPUT_DIR"
_DEFAULT_D_STAR = 5

# conventions are echoed into every report so a reader can tell which
# resolution of each ambiguous parameterization produced the numbers
_FIT_CONVENTIONS = {
    "standardization": "sample mean, 1/n covariance, symmetric inverse square root",
    "slicing": "equal-count response slices; tied values share a slice",
    "censored-moments": "raw group averages beyond t; events at or before t "
    "weighted by the inverse Kaplan-Meier censoring survival",
    "quantile-thresholds": "empirical quantile of the response; Kaplan-Meier "
    "quantile when a status column is present",
}
_SIM_CONVENTIONS = {
    "censor-law": "gamma censoring second argument read as the mean",
    "lognormal-noise": "conditional noise scale read as the standard deviation",
}


class _UsageError(Exception):
    """Flag combinations or values the parser cannot accept."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Fully resolved options of one invocation; defaults are explicit."""

    command: str
    input: str | None = None
    output: str | None = None
    fmt: str = "tsv"
    seed: int | None = None
    method: str | None = None
    t: str | None = None
    d: int | None = None
    dg: int | None = None
    merc: bool = False
    dstar: int | None = None
    h: int = 10
    h0: int = 5
    h1: int = 10
    standardize_columns: bool = False
    preset: str | None = None
    cells: str | None = None
    reps: int | None = None
    jobs: int = 1
    plot: bool = False

    def __post_init__(self):
        if self.fmt not in ("tsv", "json"):
            raise _UsageError(f"unknown output format {self.fmt!r}")

    @classmethod
    def from_mapping(cls, mapping) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ParseError(f"unknown configuration keys: {sorted(unknown)}")
        return cls(**dict(mapping))

    def to_dict(self) -> dict:
        return asdict(self)


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    payload = {k: v for k, v in vars(args).items() if k != "func"}
    return RunConfig(**payload)


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def parse_csv(path: str, standardize_columns: bool = False) -> DataSet:
    """Read a UTF-8 CSV with header into a DataSet.

    The response column must be named ``y``; an optional ``status``
    column of 0/1 marks events vs censorings; every other column is a
    numeric covariate, order preserved and names carried. Rows with
    missing fields are rejected together with their line numbers;
    malformed numbers name the line and column. ``standardize_columns``
    divides each covariate by its sample standard deviation (n-1
    denominator).
    """
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path} is empty", line=1)
    header = [name.strip() for name in rows[0]]
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names in header", line=1)
    if "y" not in header:
        raise ParseError("no response column named 'y'", line=1)
    y_pos = header.index("y")
    status_pos = header.index("status") if "status" in header else None
    cov_pos = [
        i for i in range(len(header)) if i != y_pos and i != status_pos
    ]
    names = tuple(header[i] for i in cov_pos)

    missing_lines = []
    y_vals, status_vals, x_rows = [], [], []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue  # blank line
        if len(row) > len(header):
            raise ParseError(
                f"line {line_no} has {len(row)} fields, header has {len(header)}",
                line=line_no,
            )
        if len(row) < len(header) or any(field.strip() == "" for field in row):
            missing_lines.append(line_no)
            continue

        def _number(pos):
            token = row[pos].strip()
            try:
                value = float(token)
            except ValueError:
                raise ParseError(
                    f"line {line_no}, column {header[pos]!r}: "
                    f"not a number: {token!r}",
                    line=line_no,
                    column=header[pos],
                ) from None
            if not np.isfinite(value):
                raise ParseError(
                    f"line {line_no}, column {header[pos]!r}: "
                    f"non-finite value {token!r}",
                    line=line_no,
                    column=header[pos],
                )
            return value

        y_vals.append(_number(y_pos))
        if status_pos is not None:
            s = _number(status_pos)
            if s not in (0.0, 1.0):
                raise ParseError(
                    f"line {line_no}, column 'status': must be 0 or 1, got {s:g}",
                    line=line_no,
                    column="status",
                )
            status_vals.append(int(s))
        x_rows.append([_number(i) for i in cov_pos])

    if missing_lines:
        shown = ", ".join(str(v) for v in missing_lines[:10])
        more = "" if len(missing_lines) <= 10 else f" (+{len(missing_lines) - 10} more)"
        raise ParseError(
            f"rows with missing fields: lines {shown}{more}",
            line=missing_lines[0],
        )

    n, p = len(y_vals), len(cov_pos)
    if n <= p + 1:
        raise TooFewRows(f"need n > p + 1 (= {p + 1}), got n = {n}")
    x = np.asarray(x_rows, dtype=float).reshape(n, p)
    if standardize_columns:
        sd = x.std(axis=0, ddof=1)
        flat = np.nonzero(sd == 0.0)[0]
        if flat.size:
            raise ParseError(
                f"column {names[flat[0]]!r} is constant and cannot be scaled",
                column=names[flat[0]],
            )
        x = x / sd
    return DataSet(
        X=x,
        y=np.asarray(y_vals, dtype=float),
        status=np.asarray(status_vals, dtype=np.int64) if status_pos is not None else None,
        names=names if p else None,
    )


# ---------------------------------------------------------------------------
# shared report plumbing
# ---------------------------------------------------------------------------

def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _fmt(value: float) -> str:
    return repr(float(value))


def _provenance_comments(cfg: RunConfig, conventions: dict, elapsed: float) -> list[str]:
    lines = [
        f"# indred {__version__}",
        f"# generated_at {datetime.now(timezone.utc).isoformat()}",
        f"# elapsed_seconds {elapsed:.3f}",
        f"# rng {RNG_ALGORITHM}",
        f"# config {json.dumps(cfg.to_dict(), sort_keys=True)}",
    ]
    lines += [f"# convention {key}: {text}" for key, text in sorted(conventions.items())]
    return lines


def _json_report(cfg: RunConfig, conventions: dict, payload: dict, elapsed: float) -> str:
    doc = {
        "version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "config": cfg.to_dict(),
        "conventions": conventions,
        **_jsonable(payload),
        "timing": {
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "elapsed_seconds": elapsed,
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _resolve_output(cfg: RunConfig) -> str:
    if cfg.output:
        path = cfg.output
    else:
        stem = {
            "fit": "indred-fit",
            "km": "indred-km",
            "simulate": f"indred-simulate-{cfg.preset}",
        }[cfg.command]
        root = os.environ.get(_OUTPUT_DIR_ENV, "")
        path = os.path.join(root, f"{stem}.{cfg.fmt}") if root else f"{stem}.{cfg.fmt}"
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {path}")


def _figure_path(report_path: str) -> str:
    stem, _ = os.path.splitext(report_path)
    return stem + ".png"


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

def _resolve_threshold(flag: str, data: DataSet) -> float:
    if flag.startswith("q:"):
        try:
            percent = float(flag[2:])
        except ValueError:
            raise _UsageError(f"bad quantile threshold {flag!r}") from None
        if not 0.0 < percent < 100.0:
            raise _UsageError(f"quantile percent must lie in (0, 100), got {percent:g}")
        if data.is_censored:
            return _km_quantile(data, percent)
        return float(np.quantile(data.y, percent / 100.0))
    try:
        return float(flag)
    except ValueError:
        raise _UsageError(f"bad threshold {flag!r}; use a number or q:<percent>") from None


def _km_quantile(data: DataSet, percent: float) -> float:
    # smallest event time where the product-limit curve falls to 1 - q
    curve = kaplan_meier(data.y, data.status)
    target = 1.0 - percent / 100.0
    hit = np.nonzero(curve.values <= target + 1e-12)[0]
    if hit.size == 0:
        raise ThresholdTooLate(
            f"the survival curve never reaches {target:.3f}; "
            f"too much censoring for a {percent:g}% threshold"
        )
    return float(curve.jump_times[hit[0]])


def _validate_fit_flags(cfg: RunConfig) -> None:
    if cfg.method not in _PAIR_METHODS + _SINGLE_METHODS:
        raise _UsageError(f"unknown method {cfg.method!r}")
    if cfg.merc:
        if cfg.d is not None or cfg.dg is not None:
            raise _UsageError("conflicting dimension flags: --merc excludes --d/--dg")
    else:
        if cfg.dstar is not None:
            raise _UsageError("--dstar only applies with --merc")
        if cfg.method in _PAIR_METHODS:
            if cfg.d is None or cfg.dg is None:
                raise _UsageError(f"{cfg.method} needs both --d and --dg (or --merc)")
        else:
            given = [v for v in (cfg.d, cfg.dg) if v is not None]
            if len(given) != 1:
                raise _UsageError(
                    f"{cfg.method} needs exactly one of --d/--dg (or --merc)"
                )
    if cfg.method in _PAIR_METHODS and cfg.t is None:
        raise _UsageError(f"{cfg.method} needs --t")
    if cfg.method == "save" and cfg.t is None:
        raise _UsageError("save needs --t; only sir supports a full-response fit")


def _fit_methods(cfg: RunConfig, data: DataSet, t: float | None):
    censored = data.is_censored
    full = (
        SdrMethod.sir_doubleslice(cfg.h0, cfg.h1)
        if censored
        else SdrMethod.sir(cfg.h)
    )
    if cfg.method in _PAIR_METHODS:
        save = cfg.method == "sir-save"
        if censored:
            stage2 = (
                SdrMethod.save_binary_censored(t) if save else SdrMethod.sir_binary_censored(t)
            )
        else:
            stage2 = SdrMethod.save_binary(t) if save else SdrMethod.sir_binary(t)
        return full, stage2
    if cfg.t is None:
        return (full,)  # full-response sir
    if cfg.method == "save":
        single = SdrMethod.save_binary_censored(t) if censored else SdrMethod.save_binary(t)
    else:
        single = SdrMethod.sir_binary_censored(t) if censored else SdrMethod.sir_binary(t)
    return (single,)


_DIAG_DROP = ("stage1_basis", "projected_vectors")


def _diag_payload(diagnostics: dict) -> dict:
    return _jsonable({k: v for k, v in diagnostics.items() if k not in _DIAG_DROP})


def _fit_tsv(cfg, conventions, names, fit, dims, method_kinds, t, elapsed) -> str:
    lines = _provenance_comments(cfg, conventions, elapsed)
    lines.append(f"# method {' -> '.join(method_kinds)}")
    if t is not None:
        lines.append(f"# threshold {_fmt(t)}")
    for key, value in dims.items():
        lines.append(f"# {key} {value}")
    for warning in fit.diagnostics.get("warnings", []):
        lines.append(f"# warning {warning}")
    k = fit.gamma_hat.shape[1]
    lines.append("")
    lines.append("# section direction-estimates")
    lines.append("\t".join(["covariate"] + [f"dir{j + 1}" for j in range(k)]))
    for i, name in enumerate(names):
        lines.append("\t".join([name] + [_fmt(v) for v in fit.gamma_hat[i]]))
    lines.append("")
    lines.append("# section eigenvalues")
    lines.append("index\tvalue")
    for j, value in enumerate(fit.eigenvalues, start=1):
        lines.append(f"{j}\t{_fmt(value)}")
    return "\n".join(lines) + "\n"


def cmd_fit(cfg: RunConfig) -> int:
    _validate_fit_flags(cfg)
    start = time.perf_counter()
    data = parse_csv(cfg.input, standardize_columns=cfg.standardize_columns)
    t = _resolve_threshold(cfg.t, data) if cfg.t is not None else None
    methods = _fit_methods(cfg, data, t)
    d_star = cfg.dstar if cfg.dstar is not None else _DEFAULT_D_STAR
    dims: dict = {}

    if len(methods) == 2:
        stage1, stage2 = methods
        if cfg.merc:
            fit, d_hat, d_g_hat = fit_two_stage_merc(data, stage1, stage2, d_star=d_star)
            dims = {"d_star": d_star, "d_hat": d_hat, "d_g_hat": d_g_hat}
        else:
            fit = fit_two_stage(data, stage1, stage2, cfg.d, cfg.dg)
            dims = {"d": cfg.d, "d_g": cfg.dg}
    else:
        (method,) = methods
        if cfg.merc:
            probe = fit_direct(data, method, 1)
            d_hat = merc_select(probe.eigenvalues, d_star)
            fit = fit_direct(data, method, d_hat)
            dims = {"d_star": d_star, "d_hat": d_hat}
        else:
            dim = cfg.d if cfg.d is not None else cfg.dg
            fit = fit_direct(data, method, dim)
            dims = {"d": dim}

    names = data.names or tuple(f"x{i + 1}" for i in range(data.p))
    kinds = tuple(m.kind for m in methods)
    elapsed = time.perf_counter() - start
    path = _resolve_output(cfg)
    if cfg.fmt == "tsv":
        text = _fit_tsv(cfg, _FIT_CONVENTIONS, names, fit, dims, kinds, t, elapsed)
    else:
        payload = {
            "method": list(kinds),
            "threshold": t,
            "dimensions": dims,
            "covariates": list(names),
            "gamma_hat": fit.gamma_hat,
            "eigenvalues": fit.eigenvalues,
            "diagnostics": _diag_payload(fit.diagnostics),
        }
        text = _json_report(cfg, _FIT_CONVENTIONS, payload, elapsed)
    _write(path, text)
    if cfg.plot:
        from . import figures

        print(f"wrote {figures.plot_spectrum(fit.eigenvalues, _figure_path(path))}")
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _load_cells(path: str, reps: int | None, seed: int | None) -> list:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(
                f"invalid JSON in {path}: {exc.msg}", line=exc.lineno, column=exc.colno
            ) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("cells"), list):
        raise ParseError("custom cell file needs a top-level 'cells' list")
    cells = []
    for i, item in enumerate(doc["cells"]):
        if not isinstance(item, dict):
            raise ParseError(f"cell {i} must be an object")
        item = dict(item)
        model_doc = item.pop("model", None)
        if not isinstance(model_doc, dict):
            raise ParseError(f"cell {i} needs a 'model' object")
        if reps is not None:
            item["reps"] = reps
        if seed is not None:
            item["seed"] = seed
        try:
            model = ModelSpec.from_dict(model_doc)
            cells.append(CellSpec(model=model, **item))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"cell {i}: {exc}") from None
    if not cells:
        raise ParseError("custom cell file lists no cells")
    return cells


def _grid_layout(report: SimReport):
    """Map (t_percent, config) -> cell when cells form the benchmark grid."""
    by_key = {}
    for cell in report.cells:
        key = (cell.t_percent, (cell.n, cell.p, cell.cr_percent > 0))
        if key in by_key:
            return None
        by_key[key] = cell
    percents = sorted({k[0] for k in by_key})
    expected = {(pct, config) for pct in percents for config in TABLE1_CONFIGS}
    if set(by_key) != expected:
        return None
    return percents, by_key


_CELL_COLUMNS = (
    "label",
    "n",
    "p",
    "cr_percent",
    "t_percent",
    "t_value",
    "method_pair",
    "mean_two_stage",
    "se_two_stage",
    "mean_direct",
    "se_direct",
    "completed",
    "failed",
    "flagged",
    "rejected_draws",
)


def _table_tsv(cfg: RunConfig, conventions: dict, report: SimReport) -> str:
    elapsed = report.provenance.get("elapsed_seconds", 0.0)
    lines = _provenance_comments(cfg, conventions, elapsed)
    lines.append(f"# seeds {report.provenance['seeds']}")
    lines.append(f"# failed_total {report.provenance['failed_total']}")
    for label in report.provenance["flagged_cells"]:
        lines.append(f"# flagged {label}")

    grid = _grid_layout(report)
    if grid is not None:
        percents, by_key = grid
        heads = [f"n={n} p={p} CR={25 if c else 0}%" for n, p, c in TABLE1_CONFIGS]
        lines.append("")
        lines.append("# section benchmark-grid (mean (se) of the span distance)")
        lines.append("\t".join(["threshold", "method"] + heads))
        for pct in percents:
            row_cells = [by_key[(pct, config)] for config in TABLE1_CONFIGS]
            for attr_mean, attr_se, label in (
                ("mean_two_stage", "se_two_stage", "two-stage"),
                ("mean_direct", "se_direct", "direct"),
            ):
                values = [
                    f"{getattr(c, attr_mean):.3f} ({getattr(c, attr_se):.3f})"
                    for c in row_cells
                ]
                lines.append("\t".join([f"t{pct:g}", label] + values))

    lines.append("")
    lines.append("# section cells")
    lines.append("\t".join(_CELL_COLUMNS))
    for cell in report.cells:
        row = []
        for col in _CELL_COLUMNS:
            value = getattr(cell, col)
            row.append(_fmt(value) if isinstance(value, float) else str(value))
        lines.append("\t".join(row))
        for warning in cell.warnings:
            lines.append(f"# warning {cell.label}: {warning}")
    return "\n".join(lines) + "\n"


def _table_json(cfg: RunConfig, conventions: dict, report: SimReport) -> str:
    provenance = {
        k: v for k, v in report.provenance.items() if k != "elapsed_seconds"
    }
    cells = []
    for cell in report.cells:
        doc = {col: getattr(cell, col) for col in _CELL_COLUMNS}
        doc["warnings"] = list(cell.warnings)
        cells.append(doc)
    payload = {"provenance": provenance, "cells": cells}
    elapsed = report.provenance.get("elapsed_seconds", 0.0)
    return _json_report(cfg, conventions, payload, elapsed)


def _intro_tsv(cfg: RunConfig, conventions: dict, summary, elapsed: float) -> str:
    lines = _provenance_comments(cfg, conventions, elapsed)
    lines.append(f"# reps {summary.reps}")
    lines.append(f"# seed {summary.seed}")
    lines.append(f"# threshold {_fmt(summary.t_value)}")
    lines.append("")
    lines.append("# section direction-summary (first coordinate scaled to 1)")
    lines.append("coordinate\tmean_full\tsd_full\tmean_induced\tsd_induced")
    for i in range(summary.means_full.shape[0]):
        lines.append(
            "\t".join(
                [f"x{i + 1}"]
                + [
                    _fmt(arr[i])
                    for arr in (
                        summary.means_full,
                        summary.sds_full,
                        summary.means_induced,
                        summary.sds_induced,
                    )
                ]
            )
        )
    return "\n".join(lines) + "\n"


def cmd_simulate(cfg: RunConfig) -> int:
    if cfg.preset not in _PRESETS:
        raise _UsageError(
            f"unknown preset {cfg.preset!r}; choose from {', '.join(_PRESETS)}"
        )
    if cfg.preset == "custom" and not cfg.cells:
        raise _UsageError("preset 'custom' needs --cells <file>")
    if cfg.reps is not None and cfg.reps < 1:
        raise _UsageError("--reps must be >= 1")
    conventions = {**_FIT_CONVENTIONS, **_SIM_CONVENTIONS}
    path = _resolve_output(cfg)
    start = time.perf_counter()

    if cfg.preset == "intro-gamma":
        summary = run_intro_scenario(
            seed=cfg.seed if cfg.seed is not None else 20230,
            reps=cfg.reps if cfg.reps is not None else 500,
        )
        elapsed = time.perf_counter() - start
        if cfg.fmt == "tsv":
            text = _intro_tsv(cfg, conventions, summary, elapsed)
        else:
            payload = {
                "reps": summary.reps,
                "seed": summary.seed,
                "threshold": summary.t_value,
                "means_full": summary.means_full,
                "sds_full": summary.sds_full,
                "means_induced": summary.means_induced,
                "sds_induced": summary.sds_induced,
            }
            text = _json_report(cfg, conventions, payload, elapsed)
        _write(path, text)
        if cfg.plot:
            from . import figures

            print(f"wrote {figures.plot_intro_summary(summary, _figure_path(path))}")
        return 0

    if cfg.preset == "table1-model4":
        cells = preset_table1_model4(
            reps=cfg.reps if cfg.reps is not None else 500,
            seed=cfg.seed if cfg.seed is not None else 20244,
        )
    elif cfg.preset == "table1-model5":
        cells = preset_table1_model5(
            reps=cfg.reps if cfg.reps is not None else 500,
            seed=cfg.seed if cfg.seed is not None else 20255,
        )
    else:
        cells = _load_cells(cfg.cells, cfg.reps, cfg.seed)
    report = run_table(cells, parallelism=cfg.jobs)

    if cfg.fmt == "tsv":
        text = _table_tsv(cfg, conventions, report)
    else:
        text = _table_json(cfg, conventions, report)
    _write(path, text)
    if cfg.plot:
        from . import figures

        print(f"wrote {figures.plot_sim_report(report, _figure_path(path))}")
    return 0


# ---------------------------------------------------------------------------
# km
# ---------------------------------------------------------------------------

def cmd_km(cfg: RunConfig) -> int:
    start = time.perf_counter()
    data = parse_csv(cfg.input)
    events = data.status if data.status is not None else np.ones(data.n, dtype=np.int64)
    curve = kaplan_meier(data.y, events)
    elapsed = time.perf_counter() - start
    path = _resolve_output(cfg)
    if cfg.fmt == "tsv":
        lines = _provenance_comments(cfg, _FIT_CONVENTIONS, elapsed)
        lines.append(f"# observations {data.n}")
        lines.append(f"# events {int(events.sum())}")
        if data.p:
            lines.append(f"# covariates ignored (p={data.p})")
        lines.append("")
        lines.append("# section survival-curve (survival is 1 before the first time)")
        lines.append("time\tsurvival")
        for t, s in zip(curve.jump_times, curve.values):
            lines.append(f"{_fmt(t)}\t{_fmt(s)}")
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "observations": data.n,
            "events": int(events.sum()),
            "jump_times": curve.jump_times,
            "values": curve.values,
        }
        text = _json_report(cfg, _FIT_CONVENTIONS, payload, elapsed)
    _write(path, text)
    if cfg.plot:
        from . import figures

        print(f"wrote {figures.plot_km(curve, _figure_path(path))}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indred",
        description="Sufficient dimension reduction for threshold-induced responses.",
    )
    parser.add_argument("--version", action="version", version=f"indred {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p):
        p.add_argument("--output", default=None, help="report path")
        p.add_argument(
            "--format", dest="fmt", choices=("tsv", "json"), default="tsv"
        )
        p.add_argument(
            "--plot", action="store_true", help="also render a PNG figure"
        )

    p_fit = sub.add_parser("fit", help="fit directions on a CSV dataset")
    p_fit.add_argument("input", help="CSV file with a 'y' column")
    p_fit.add_argument(
        "--method", required=True, choices=_PAIR_METHODS + _SINGLE_METHODS
    )
    p_fit.add_argument("--t", default=None, help="threshold: a value or q:<percent>")
    p_fit.add_argument("--d", type=int, default=None)
    p_fit.add_argument("--dg", type=int, default=None)
    p_fit.add_argument("--merc", action="store_true", help="select dimensions by eigenvalue ratios")
    p_fit.add_argument("--dstar", type=int, default=None, help="ratio-search cap (with --merc)")
    p_fit.add_argument("--h", type=int, default=10)
    p_fit.add_argument("--h0", type=int, default=5)
    p_fit.add_argument("--h1", type=int, default=10)
    p_fit.add_argument("--seed", type=int, default=None)
    p_fit.add_argument("--standardize-columns", action="store_true")
    add_output_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_sim = sub.add_parser("simulate", help="run Monte Carlo presets")
    p_sim.add_argument("--preset", required=True)
    p_sim.add_argument("--cells", default=None, help="cell file for --preset custom")
    p_sim.add_argument("--reps", type=int, default=None)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--jobs", type=int, default=1)
    add_output_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_km = sub.add_parser("km", help="product-limit survival curve")
    p_km.add_argument("input", help="CSV file with 'y' and optional 'status'")
    add_output_flags(p_km)
    p_km.set_defaults(func=cmd_km)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = args.func
    try:
        cfg = _config_from_args(args)
        return handler(cfg)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 2
    except (ParseError, TooFewRows) as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 2
    except IndredError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
