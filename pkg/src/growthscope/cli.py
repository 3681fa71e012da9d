"""Command-line pipeline: ingest -> wavelet -> skeleton -> density -> trend -> synthetic.

    growthscope analyze --input fixture:quarterly --out results/

Settings come from built-in defaults, then an optional INI file
(``--config``, section ``[analyze]``), then command-line flags.
"""
import argparse
import configparser
import dataclasses
import hashlib
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .density import (DEFAULT_BANDWIDTH, DEFAULT_PROMINENCE_FLOOR, FULL_FIELD, SKELETON,
                      RegimeSummary, conditional_stats, kde, regime_entry, skewness)
from .errors import (ConfigError, DataError, GridIncompatible, GrowthscopeError,
                     InvariantViolation, WriteFailure)
from .figures import emit_svg_figures
from .ingest import DATE_CONVENTIONS, FIXTURES, fixture_path, load_series, log_transform
from .skeleton import build_skeleton, intercepts_at_scale, skeleton_samples
from .synthetic import DEFAULT_EXCLUSION, reconstruction_error, synthetic_gdp
from .trend import ols_loggrowth
from .wavelet import NAMED_SCALES, TRUNCATION, ScaleGrid, cwt_slope, parse_grid_spec, \
    write_scalogram

log = logging.getLogger("growthscope")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_SYNTHETIC_SCALES = (1.0, 2.0, 4.0, 8.0)
NORMALIZATION_BOUNDS = (0.999, 1.001)
SCHEMA_PATH = Path(__file__).resolve().parent / "schemas" / "report.schema.json"


@dataclass(frozen=True)
class PipelineConfig:
    input: str
    out: str
    dates: str | None = None
    scales: str = "::16"
    pdf_scales: tuple | None = None
    bandwidth: float = DEFAULT_BANDWIDTH
    prominence_floor: float = DEFAULT_PROMINENCE_FLOOR
    coi: str = "exclude"
    synthetic_scales: tuple | None = None
    window: tuple | None = None
    exclude: tuple | None = DEFAULT_EXCLUSION
    quantile: float = 0.5
    figures: bool = True

    def __post_init__(self):
        if self.dates is not None and self.dates not in DATE_CONVENTIONS:
            raise ConfigError(f"dates must be one of {DATE_CONVENTIONS}, got {self.dates!r}")
        if self.coi not in ("exclude", "include"):
            raise ConfigError(f"coi must be 'exclude' or 'include', got {self.coi!r}")
        if not self.bandwidth > 0:
            raise ConfigError("bandwidth must be positive")
        if not 0 <= self.prominence_floor < 1:
            raise ConfigError("prominence floor must lie in [0, 1)")
        if not 0 < self.quantile < 1:
            raise ConfigError("quantile must lie in (0, 1)")
        for name in ("pdf_scales", "synthetic_scales"):
            vals = getattr(self, name)
            if vals is not None and (len(vals) == 0 or any(not v > 0 for v in vals)):
                raise ConfigError(f"{name} must be a non-empty list of positive scales")
        try:
            lo, hi, per = parse_grid_spec(self.scales)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if (lo is not None and lo <= 0) or (hi is not None and hi <= 0) or per <= 0:
            raise ConfigError("scale grid parameters must be positive")
        for name in ("window", "exclude"):
            w = getattr(self, name)
            if w is not None and not w[0] < w[1]:
                raise ConfigError(f"{name} must satisfy start < end")

    def resolved_input(self):
        """(path, date convention, label) with ``fixture:NAME`` expanded."""
        if self.input.startswith("fixture:"):
            name = self.input.split(":", 1)[1]
            if name not in FIXTURES:
                raise ConfigError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}")
            _, convention, label = FIXTURES[name]
            return fixture_path(name), self.dates or convention, label
        return Path(self.input), self.dates or "year_decimal", None

    def echo(self):
        doc = dataclasses.asdict(self)
        del doc["out"]  # keep outputs independent of where they are written
        for k, v in doc.items():
            if isinstance(v, tuple):
                doc[k] = list(v)
        return doc


@dataclass
class Artifacts:
    config: PipelineConfig
    checksum: str
    series: object
    log_series: object
    field: object
    skeleton: object
    trend: object
    densities: list
    regimes: RegimeSummary
    quantiles: list
    synthetics: list
    large_scale: dict


def _floats(text):
    return tuple(float(v) for v in text.split(",") if v.strip())


def _window(text):
    a, _, b = text.partition(":")
    if not b:
        raise ValueError(f"expected START:END, got {text!r}")
    return float(a), float(b)


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_PARSERS = {
    "input": str, "out": str, "dates": str, "scales": str, "coi": str,
    "pdf_scales": _floats, "synthetic_scales": _floats,
    "bandwidth": float, "prominence_floor": float, "quantile": float,
    "window": _window, "exclude": _window, "figures": _bool,
}


def read_config_file(path):
    """Flat key/value settings from an INI file (``[analyze]`` section optional)."""
    parser = configparser.ConfigParser()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not text.lstrip().startswith("["):
        text = "[analyze]\n" + text
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config {path}: {exc}") from None
    section = parser["analyze"] if parser.has_section("analyze") else parser.defaults()
    values = {}
    for key, raw in section.items():
        name = key.replace("-", "_")
        if name not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        values[name] = _coerce(name, raw)
    return values


def _coerce(name, raw):
    if name == "exclude" and str(raw).strip().lower() == "none":
        return None
    try:
        return _PARSERS[name](raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {exc}") from None


def build_config(file_values, flag_values):
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    for required in ("input", "out"):
        if required not in merged:
            raise ConfigError(f"missing required setting {required!r}")
    try:
        return PipelineConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _realizable(scales, grid_lo, grid_hi, span):
    """Scales that fit the grid and have some coi-valid coefficient."""
    return tuple(s for s in scales
                 if grid_lo * (1 - 1e-9) <= s <= grid_hi * (1 + 1e-9)
                 and 2 * TRUNCATION * s <= span * (1 + 1e-9))


def run_pipeline(config):
    """Run the whole analysis in memory; nothing is written."""
    path, convention, label = config.resolved_input()
    try:
        series = load_series(path, convention, label=label)
        checksum = _sha256(path)
    except OSError as exc:
        raise DataError(f"cannot read input {path}: {exc}") from None
    if config.window is not None:
        a, b = config.window
        # YYYY:YYYY covers the whole end year
        stop = b + 1 - 1e-9 if float(b).is_integer() else b
        series = series.window(a, stop)
    logs = log_transform(series)

    lo, hi, per_octave = parse_grid_spec(config.scales)
    lo = series.step if lo is None else lo
    hi = series.span / 4 if hi is None else hi
    pdf_scales = config.pdf_scales or _realizable(NAMED_SCALES, lo, hi, series.span)
    syn_scales = config.synthetic_scales or _realizable(DEFAULT_SYNTHETIC_SCALES, lo, hi,
                                                        series.span)
    for s in tuple(pdf_scales) + tuple(syn_scales):
        if not lo * (1 - 1e-9) <= s <= hi * (1 + 1e-9):
            raise ConfigError(f"scale {s!r} lies outside the grid range [{lo!r}, {hi!r}]")
    try:
        grid = ScaleGrid.default(series.step, series.span, per_octave, lo, hi,
                                 extra=tuple(NAMED_SCALES) + tuple(pdf_scales) + tuple(syn_scales))
        grid.check_compatible(series.step, series.span)
    except GridIncompatible as exc:
        raise ConfigError(str(exc)) from None

    field = cwt_slope(logs, grid)
    if not np.all(np.isfinite(field.coeffs)):
        raise InvariantViolation("WaveletField coefficients finite")
    skeleton = build_skeleton(field)
    trend = ols_loggrowth(logs)

    densities, entries, quantiles = [], [], []
    for s in sorted(pdf_scales):
        samples = field.samples(s, config.coi)
        if samples.size == 0:
            raise InvariantViolation("density scale has samples", f"scale {s!r}")
        sources = [(FULL_FIELD, samples)]
        skel = skeleton_samples(skeleton, s)
        if skel.size:
            sources.append((SKELETON, skel))
        for source, x in sources:
            d = kde(x, config.bandwidth, scale=s, source=source)
            area = d.integral()
            if not NORMALIZATION_BOUNDS[0] <= area <= NORMALIZATION_BOUNDS[1]:
                raise InvariantViolation("GrowthDensity integral within [0.999, 1.001]",
                                         f"scale {s!r} source {source}: {area!r}")
            entry = regime_entry(d, config.prominence_floor)
            if entry.bimodal and not entry.rho_low < entry.rho_high:
                raise InvariantViolation("rho_low < rho_high", f"scale {s!r}")
            densities.append(d)
            entries.append(entry)
        if samples.size >= 2 and np.ptp(samples) > 0:
            quantiles.append((s, conditional_stats(samples, config.quantile),
                              skewness(samples), int(samples.size)))
    regimes = RegimeSummary(tuple(entries), trend.rho_lt)

    synthetics = []
    for s in sorted(syn_scales):
        hits = intercepts_at_scale(skeleton, s)
        synth = synthetic_gdp(hits, float(series.values[0]), float(series.times[0]), s)
        if np.any(synth.values <= 0):
            raise InvariantViolation("synthetic values positive", f"s* = {s!r}")
        synthetics.append((synth, reconstruction_error(synth, series, config.exclude)))

    valid_rows = np.flatnonzero(field.coi.any(axis=1))
    large_scale = {}
    if valid_rows.size:
        i = int(valid_rows[-1])
        large_scale = {"scale": float(grid.scales[i]),
                       "mean_rho": float(field.coeffs[i][field.coi[i]].mean())}

    return Artifacts(config, checksum, series, logs, field, skeleton, trend, densities,
                     regimes, quantiles, synthetics, large_scale)


def _tag(scale):
    return f"{float(scale)!r}y"


def build_report(a, files):
    path, convention, _ = a.config.resolved_input()
    return {
        "format": "growthscope-report/1",
        "version": __version__,
        "input": {
            "path": a.config.input, "sha256": a.checksum, "label": a.series.label,
            "date_convention": convention, "n_samples": len(a.series),
            "start": float(a.series.times[0]), "end": float(a.series.times[-1]),
            "step": a.series.step,
        },
        "config": a.config.echo(),
        "grid": {"n_scales": len(a.field.grid), "min": float(a.field.grid.scales[0]),
                 "max": float(a.field.grid.scales[-1])},
        "trend": dataclasses.asdict(a.trend),
        "large_scale": a.large_scale,
        "regimes": [dataclasses.asdict(e) for e in a.regimes.entries],
        "quantile_stats": [
            {"scale": s, "quantile": q.quantile, "quantile_value": q.quantile_value,
             "conditional_mean_above": q.conditional_mean_above, "skewness": sk,
             "n_samples": n}
            for s, q, sk, n in a.quantiles],
        "skeleton": {"n_lines": len(a.skeleton.lines), "n_points": len(a.skeleton.points)},
        "synthetic": [
            {"s_star": sy.s_star, "n_intercepts": len(sy.times) - 1,
             "median_abs_log_ratio": err.median_abs_log_ratio,
             "max_abs_log_ratio": err.max_abs_log_ratio,
             "median_abs_log_ratio_all": err.median_abs_log_ratio_all,
             "max_abs_log_ratio_all": err.max_abs_log_ratio_all,
             "exclude": None if err.exclude is None else list(err.exclude)}
            for sy, err in a.synthetics],
        "files": sorted(files),
    }


def write_outputs(a, out_dir):
    """Write every data artifact (and figures unless disabled); returns report dict."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = []

        def put(name):
            files.append(name)
            return out / name

        write_scalogram(a.field, put("scalogram.csv"))
        a.skeleton.write(put("skeleton.json"))
        for d in a.densities:
            d.write_csv(put(f"density_{d.source}_{_tag(d.scale)}.csv"))
        a.regimes.write(put("regimes.json"))
        for sy, _ in a.synthetics:
            sy.write_csv(put(f"synthetic_{_tag(sy.s_star)}.csv"))
        if a.config.figures:
            for p in emit_svg_figures(a, out / "figures"):
                files.append(f"figures/{p.name}")
        report = build_report(a, files + ["report.json"])
        (out / "report.json").write_text(json.dumps(report, indent=1, sort_keys=True) + "\n",
                                         encoding="utf-8")
    except OSError as exc:
        raise WriteFailure(f"cannot write outputs to {out}: {exc}") from None
    return report


def make_parser():
    p = argparse.ArgumentParser(prog="growthscope", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", help="run the full multiscale growth analysis")
    a.add_argument("--config", help="INI file with default settings")
    a.add_argument("--input", help="CSV path, or fixture:quarterly / fixture:annual")
    a.add_argument("--dates", choices=DATE_CONVENTIONS)
    a.add_argument("--scales", help="MIN:MAX:PER_OCTAVE, blanks take defaults")
    a.add_argument("--pdf-scales", type=_floats, help="comma-separated scales in years")
    a.add_argument("--bandwidth", type=float)
    a.add_argument("--prominence-floor", type=float)
    a.add_argument("--coi", choices=("exclude", "include"))
    a.add_argument("--synthetic-scales", type=_floats)
    a.add_argument("--window", type=_window, help="YYYY:YYYY, end year inclusive")
    a.add_argument("--exclude", type=_window, help="error-summary exclusion window")
    a.add_argument("--quantile", type=float)
    a.add_argument("--no-figures", dest="figures", action="store_const", const=False)
    a.add_argument("--out", help="output directory")
    a.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    flags = {k: getattr(args, k) for k in _PARSERS}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        config = build_config(file_values, flags)
        artifacts = run_pipeline(config)
        report = write_outputs(artifacts, config.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except GrowthscopeError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    log.info("rho_lt = %.4f per year; wrote %d files to %s", report["trend"]["rho_lt"],
             len(report["files"]), config.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
