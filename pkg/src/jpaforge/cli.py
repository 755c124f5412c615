"""Command-line front end: sweeps and fits in, CSV/JSON artifacts out.

Subcommands map one-to-one onto the library layers: ``transformer``
(impedance-transformation curve), ``gain`` (reflection-gain sweep plus
metrics), ``noise-fit`` (calibration fit), ``optimize`` (bounded
search), and ``sweep`` (one-parameter study).  Curves go to CSV,
scalar reports to JSON; both are plain text so design runs diff
cleanly under version control.

Exit codes: 0 success, 2 config/usage, 3 numeric/singularity,
4 degenerate fit, 5 infeasible optimization.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
import warnings

import numpy as np

from . import __version__
from .config import (
    GHZ,
    build_amplifier,
    build_noise_frequency,
    build_optimize_settings,
    build_sweep_settings,
    build_transformer,
    load_config,
)
from .errors import (
    ConfigError,
    DegenerateFitError,
    JpaForgeError,
    OscillationThresholdError,
    UsageError,
)
from .gain import gain_metrics, gain_sweep
from .network import ruthroff_impedance, ruthroff_impedance_values
from .noise import NoiseDataset, fit_noise, sql_temperature
from .optimizer import grid_search, optimize, sweep as parameter_sweep
from .quantities import to_angular, to_cyclic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_DEGENERATE_FIT = 4
EXIT_INFEASIBLE = 5

SCHEMA_VERSION = 1

log = logging.getLogger("jpaforge")


def _fmt(value) -> str:
    """Full-precision CSV cell for a real scalar (shortest round-trip)."""
    return repr(float(value))


def _json_safe(value):
    """Coerce numpy scalars and replace non-finite floats with null so
    reports stay strict JSON."""
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def _report(command: str, args, config_echo, payload: dict,
            errors: list, warn_list: list, started: float) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "tool": "jpa-forge",
        "version": __version__,
        "command": command,
        "seed": args.seed,
        "config": config_echo,
    }
    doc.update(payload)
    doc["errors"] = errors
    doc["warnings"] = warn_list
    doc["duration_s"] = time.time() - started
    return _json_safe(doc)


def _write_json(args, name: str, doc: dict) -> None:
    if args.format == "csv" and name not in ("noise_fit", "optimize"):
        return
    path = os.path.join(args.out_dir, name + ".json")
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2, allow_nan=False)
        handle.write("\n")
    log.info("wrote %s", path)


def _write_csv(args, name: str, header: list, rows: list) -> None:
    if args.format == "json":
        return
    path = os.path.join(args.out_dir, name + ".csv")
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    log.info("wrote %s", path)


def _metrics_dict(m) -> dict:
    return {
        "peak_gain_db": m.peak_gain_db,
        "peak_freq_hz": to_cyclic(m.peak_frequency),
        "bandwidth_at_level_hz": m.bandwidth_at_level_hz,
        "gbw_product_hz": m.gbw_product_hz,
        "ripple_db": m.ripple_db,
        "profile_class": m.profile_class,
    }


def cmd_transformer(args) -> int:
    started = time.time()
    raw = load_config(args.config)
    env = raw.get("environment", {})
    z_high = float(env.get("source_impedance_ohm", 50.0))
    spec = build_transformer(raw, z_high)

    if args.points < 1:
        raise UsageError("--points must be >= 1")
    if not 0 < args.fmin <= args.fmax:
        raise UsageError("need 0 < --fmin <= --fmax")
    freqs = np.linspace(args.fmin * GHZ, args.fmax * GHZ, args.points)
    omegas = to_angular(freqs)

    z_ext, pole_mask = ruthroff_impedance_values(spec, omegas)
    rows = []
    warn_list = []
    for f, z, poled in zip(freqs, z_ext, pole_mask):
        if poled:
            rows.append([_fmt(f), "", "", "", ""])
            warn_list.append(
                "pole at %.6g Hz: impedance unbounded, row left empty" % f)
        else:
            ratio = z_high / z
            rows.append([_fmt(f), _fmt(z.real), _fmt(z.imag),
                         _fmt(abs(ratio)), _fmt(ratio.real)])
    _write_csv(args, "transformer",
               ["freq_hz", "re_zext_ohm", "im_zext_ohm", "ratio_mag",
                "ratio_re"], rows)

    # Low-frequency limit probed at an electrical angle of 1e-4 rad.
    f_lf = spec.cutoff_hz * 1.0e-4 / math.pi
    z_lf = ruthroff_impedance(spec, to_angular(f_lf)).z
    payload = {
        "transformer": {
            "z_odd_ohm": spec.z_odd,
            "z_even_ohm": spec.z_even,
            "cutoff_hz": spec.cutoff_hz,
            "low_frequency_ratio": abs(z_high / z_lf),
            "grid_points": int(args.points),
            "pole_rows": int(np.count_nonzero(pole_mask)),
        }
    }
    _write_json(args, "transformer",
                _report("transformer", args, raw, payload, [], warn_list,
                        started))
    return EXIT_OK


def cmd_gain(args) -> int:
    started = time.time()
    raw = load_config(args.config)
    amp = build_amplifier(raw)
    sweep_cfg = build_sweep_settings(raw)

    curve = gain_sweep(amp, sweep_cfg.omega_grid, jobs=args.jobs)
    if len(curve) == 0:
        first = curve.faults[0] if curve.faults else None
        raise OscillationThresholdError(
            "no valid sweep points%s"
            % (" (first fault: %s)" % first.reason if first else ""))

    fault_reasons = {f.omega: f.reason for f in curve.faults}
    valid = {p.omega: p for p in curve.points}
    rows = []
    warn_list = []
    for w in sweep_cfg.omega_grid:
        f_hz = to_cyclic(float(w))
        if w in fault_reasons:
            rows.append([_fmt(f_hz), "", "", ""])
            warn_list.append("%.6g Hz: %s" % (f_hz, fault_reasons[w]))
        else:
            p = valid[float(w)]
            rows.append([_fmt(f_hz), _fmt(p.gain_db), _fmt(p.g.real),
                         _fmt(p.g.imag)])
    _write_csv(args, "gain", ["freq_hz", "gain_db", "re_g", "im_g"], rows)

    level = sweep_cfg.level_db
    if level is None:
        level = float(np.max(curve.gains_db())) - 3.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        metrics = gain_metrics(curve, level, band=sweep_cfg.band)
    warn_list.extend(str(w.message) for w in caught)

    payload = {
        "level_db": level,
        "metrics": _metrics_dict(metrics),
        "valid_points": len(curve),
        "fault_points": len(curve.faults),
    }
    _write_json(args, "gain",
                _report("gain", args, raw, payload, [], warn_list, started))
    return EXIT_OK


def read_noise_csv(path) -> tuple:
    """Parse ``temperature_K,psd_K[,weight]`` rows; strict about shape."""
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise ConfigError("cannot read dataset: %s" % exc) from None
    with handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("dataset %s is empty" % path) from None
        header = [h.strip() for h in header]
        if header not in (["temperature_K", "psd_K"],
                          ["temperature_K", "psd_K", "weight"]):
            raise ConfigError(
                "dataset header must be 'temperature_K,psd_K[,weight]', "
                "got %r" % ",".join(header))
        with_weight = len(header) == 3
        temps, psd, weights = [], [], []
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ConfigError(
                    "dataset line %d has %d fields, expected %d"
                    % (i, len(row), len(header)))
            try:
                temps.append(float(row[0]))
                psd.append(float(row[1]))
                if with_weight:
                    weights.append(float(row[2]))
            except ValueError:
                raise ConfigError(
                    "dataset line %d is not numeric: %r"
                    % (i, ",".join(row))) from None
    return tuple(temps), tuple(psd), tuple(weights) if with_weight else None


def cmd_noise_fit(args) -> int:
    started = time.time()
    raw = load_config(args.config) if args.config else {}
    if args.freq_ghz is not None:
        omega = to_angular(args.freq_ghz * GHZ)
    elif raw:
        omega = build_noise_frequency(raw)
    else:
        raise UsageError(
            "noise-fit needs --freq-ghz or a --config with [noise]")

    temps, psd, weights = read_noise_csv(args.datafile)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dataset = NoiseDataset(omega=omega, temperatures=temps, psd=psd,
                               weights=weights)
        result = fit_noise(dataset)
    warn_list = [str(w.message) for w in caught]

    payload = {
        "fit": {
            "f_signal_hz": to_cyclic(omega),
            "gain": result.gain,
            "gain_db": 10.0 * math.log10(result.gain),
            "t_sys_K": result.t_sys,
            "n_add": result.n_add,
            "t_sql_K": sql_temperature(omega),
            "residual_rms_K": result.residual_rms,
            "gain_std_error": result.gain_std_error,
            "t_sys_std_error_K": result.t_sys_std_error,
            "clamped": result.clamped,
            "samples": len(dataset),
        }
    }
    _write_json(args, "noise_fit",
                _report("noise-fit", args, raw, payload, [], warn_list,
                        started))
    return EXIT_OK


def _trace_rows(names, trace):
    header = ["index"] + list(names) + [
        "score_hz", "feasible", "peak_gain_db", "ripple_db", "violation",
        "error",
    ]
    rows = []
    for e in trace:
        rows.append([e.index]
                    + [_fmt(e.values[n]) for n in names]
                    + [_fmt(e.score), int(e.feasible),
                       _fmt(e.peak_gain_db), _fmt(e.ripple_db),
                       _fmt(e.violation), e.error or ""])
    return header, rows


def cmd_optimize(args) -> int:
    started = time.time()
    raw = load_config(args.config)
    amp = build_amplifier(raw)
    sweep_cfg = build_sweep_settings(raw)
    opt = build_optimize_settings(raw, sweep_cfg)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if opt.mode == "grid":
            result = grid_search(amp, opt.space, opt.objective,
                                 points_per_axis=opt.points_per_axis)
        else:
            result = optimize(amp, opt.space, opt.objective,
                              budget=opt.budget, seed=args.seed)
    warn_list = sorted({str(w.message) for w in caught})

    trace_name = "optimize_trace"
    header, rows = _trace_rows(opt.space.names, result.trace)
    _write_csv(args, trace_name, header, rows)

    payload = {
        "optimize": {
            "mode": opt.mode,
            "feasible": result.feasible,
            "score_hz": result.score,
            "violation": result.violation,
            "best_parameters": result.values,
            "metrics": (_metrics_dict(result.metrics)
                        if result.metrics is not None else None),
            "evaluations": result.evaluations,
            "optimizer_seed": result.seed,
            "trace_file": trace_name + ".csv",
        }
    }
    _write_json(args, "optimize",
                _report("optimize", args, raw, payload, [], warn_list,
                        started))
    if not result.feasible:
        log.warning("no feasible point found (violation %.3g)",
                    result.violation)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(args) -> int:
    started = time.time()
    raw = load_config(args.config)
    amp = build_amplifier(raw)
    sweep_cfg = build_sweep_settings(raw)
    if sweep_cfg.param is None:
        raise ConfigError("the sweep subcommand needs a [sweep.grid] "
                          "section naming one parameter")
    if sweep_cfg.level_db is None:
        raise ConfigError("missing required key 'level_db' in [sweep]")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        rows_out = parameter_sweep(amp, sweep_cfg.param,
                                   sweep_cfg.param_values,
                                   sweep_cfg.omega_grid,
                                   level_db=sweep_cfg.level_db,
                                   band=sweep_cfg.band, jobs=args.jobs)
    warn_list = sorted({str(w.message) for w in caught})

    csv_rows = []
    table = []
    errors = []
    for row in rows_out:
        if row.metrics is None:
            csv_rows.append([_fmt(row.value), "", "", "", "", "", "",
                             row.error])
            table.append({"value": row.value, "metrics": None,
                          "error": row.error})
            errors.append("value %.6g: %s" % (row.value, row.error))
        else:
            m = row.metrics
            csv_rows.append([
                _fmt(row.value), _fmt(m.peak_gain_db),
                _fmt(to_cyclic(m.peak_frequency)),
                _fmt(m.bandwidth_at_level_hz), _fmt(m.gbw_product_hz),
                _fmt(m.ripple_db), m.profile_class or "", "",
            ])
            table.append({"value": row.value,
                          "metrics": _metrics_dict(m), "error": None})
    _write_csv(args, "sweep",
               ["value", "peak_gain_db", "peak_freq_hz",
                "bandwidth_at_level_hz", "gbw_product_hz", "ripple_db",
                "profile_class", "error"], csv_rows)

    payload = {
        "sweep": {
            "parameter": sweep_cfg.param,
            "level_db": sweep_cfg.level_db,
            "rows": table,
        }
    }
    _write_json(args, "sweep",
                _report("sweep", args, raw, payload, errors, warn_list,
                        started))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jpa-forge",
        description="Josephson parametric amplifier design toolkit",
    )
    parser.add_argument("--config", help="TOML run configuration")
    parser.add_argument("--out-dir", default=".",
                        help="directory for CSV/JSON artifacts")
    parser.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker threads for sweeps")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for stochastic steps (optimizer simplex)")
    parser.add_argument("--format", choices=("csv", "json", "both"),
                        default="both", help="which artifacts to write")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transformer",
                       help="impedance-transformation curve of the "
                            "coupled-line transformer")
    p.add_argument("--fmin", type=float, default=0.5, help="GHz")
    p.add_argument("--fmax", type=float, default=20.0, help="GHz")
    p.add_argument("--points", type=int, default=401)
    p.set_defaults(func=cmd_transformer)

    p = sub.add_parser("gain", help="reflection-gain sweep and metrics")
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("noise-fit",
                       help="fit gain and noise temperature to hot/cold "
                            "calibration data")
    p.add_argument("datafile", help="CSV: temperature_K,psd_K[,weight]")
    p.add_argument("--freq-ghz", type=float, default=None,
                   help="signal frequency (overrides [noise] in config)")
    p.set_defaults(func=cmd_noise_fit)

    p = sub.add_parser("optimize", help="bounded design optimization")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="one-parameter design study")
    p.set_defaults(func=cmd_sweep)
    return parser


def _require_config(args) -> None:
    if args.command != "noise-fit" and not args.config:
        raise UsageError("--config is required for this subcommand")


def main(argv=None) -> int:
    level_name = os.environ.get("JPA_FORGE_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _require_config(args)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        os.makedirs(args.out_dir, exist_ok=True)
        return args.func(args)
    except DegenerateFitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_DEGENERATE_FIT
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except JpaForgeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
