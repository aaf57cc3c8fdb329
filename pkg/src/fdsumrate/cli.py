"""Experiment orchestration: spec files, parameter sweeps, CSV emission.

A spec file is INI-style with two sections. [network] holds NetworkConfig
scalars; powers and variances take an optional ``_db`` key suffix
(``P_a_db = 25`` means 10^(25/10) linear). [experiment] holds the sweep
axis and value list, the scheme list, trial count, seed, analytic
co-evaluations, the output path, and the outage threshold ``gamma_th``.

Each run emits one CSV row per (sweep value, scheme, source). The mc
source is the seeded simulation; an analytic entry ``ul:<variant>`` or
``dl:<variant>`` adds a row holding that link's average rate from the
matching closed form. Rows list every config scalar first so the CSV is
self-describing; cells that do not apply stay empty, and per-point
analytic failures leave the cell empty with the reason in ``note``.
Reruns of the same spec are byte-identical.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import math
import sys
from dataclasses import dataclass, field, fields

from . import analytic, montecarlo
from .analytic import EvalSpec, SeriesNonConvergent
from .geometry import NetworkConfig

CONFIG_FIELDS = ("lambda_d", "R_c", "alpha", "d", "P_a", "P_u", "sigma_n2",
                 "sigma_aa2", "n_u", "n_d", "delta")
_INT_FIELDS = frozenset({"n_u", "n_d"})
_DB_FIELDS = frozenset({"P_a", "P_u", "sigma_n2", "sigma_aa2"})

SWEEP_AXES = ("P_a", "P_u", "d", "sigma_aa2", "n_antennas", "delta", "none")
PSEUDO_SCHEMES = ("hd_ac", "hd_rc", "large_array")
KNOWN_SCHEMES = montecarlo.SCHEMES + PSEUDO_SCHEMES

_DEFAULT_ANALYTIC = ("ul:case1_exact", "dl:exact")

# Scheme each closed form analyzes; orders analytic rows under the mc rows.
_VARIANT_SCHEME = {
    "ul": {"case1_exact": "MrcMrt", "case1_alpha2": "MrcMrt",
           "case1_alpha4_ub": "MrcMrt", "case2_il": "MrcMrt",
           "mrczf": "MrcZf", "zfmrt": "ZfMrt", "dual_ub_alpha2": "MrcMrt"},
    "dl": {"exact": "MrcMrt", "il": "MrcMrt", "il_mrczf": "MrcZf",
           "nd1": "MrcMrt", "dual_ub": "MrcMrt", "hd_expectation": "hd_rc"},
}

# Plot-grade tolerance; callers needing tighter use the analytic module.
_CLI_REL_TOL = 1e-6


class SpecError(ValueError):
    """Raised by run() on an invalid spec; carries the diagnostics."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = tuple(diagnostics)


@dataclass
class ExperimentSpec:
    """One experiment: base parameters plus sweep, schemes, and sources.

    base holds raw NetworkConfig scalars (missing keys take the dataclass
    defaults); it stays a plain mapping so validate() can diagnose
    out-of-domain values instead of failing in a constructor.
    """

    base: dict = field(default_factory=dict)
    sweep: str = "none"
    values: tuple = ()
    schemes: tuple = ("MrcMrt",)
    trials: int = 1000
    seed: int = 0
    analytic: tuple = ()
    out: str = "results.csv"
    gamma_th: float = 1.0
    load_diagnostics: tuple = ()


@dataclass
class ResultRow:
    """One CSV record; None renders as an empty cell."""

    lambda_d: float
    R_c: float
    alpha: float
    d: float
    P_a: float
    P_u: float
    sigma_n2: float
    sigma_aa2: float
    n_u: int
    n_d: int
    delta: float
    scheme: str
    source: str
    rate_ul: float | None = None
    rate_dl: float | None = None
    rate_sum: float | None = None
    se_ul: float | None = None
    se_dl: float | None = None
    se_sum: float | None = None
    outage_ul: float | None = None
    outage_dl: float | None = None
    gain_vs_hd_ac: float | None = None
    gain_vs_hd_rc: float | None = None
    note: str = ""


COLUMNS = tuple(f.name for f in fields(ResultRow))


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0.0:
        raise ValueError("dB form needs a positive linear value")
    return 10.0 * math.log10(x)


def load_spec(path: str) -> ExperimentSpec:
    """Parse a spec file. Malformed values become load diagnostics on the
    returned spec (surfaced by validate) rather than exceptions; only I/O
    and INI-syntax errors raise."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)

    diags = []
    spec = ExperimentSpec()

    for section in cp.sections():
        if section not in ("network", "experiment"):
            diags.append(f"unknown section [{section}]")

    base = {}
    if cp.has_section("network"):
        for key, raw in cp.items("network"):
            name, in_db = key, False
            if key.endswith("_db"):
                name, in_db = key[:-3], True
            if name not in CONFIG_FIELDS:
                diags.append(f"network.{key}: unknown parameter")
                continue
            if in_db and name not in _DB_FIELDS:
                diags.append(f"network.{key}: {name} takes no dB form")
                continue
            if name in base:
                diags.append(f"network.{name}: given more than once "
                             "(linear and dB forms conflict)")
                continue
            try:
                val = float(raw)
            except ValueError:
                diags.append(f"network.{key}: not a number: {raw!r}")
                continue
            if in_db:
                val = db_to_linear(val)
            if name in _INT_FIELDS:
                if val != int(val):
                    diags.append(f"network.{key}: not an integer: {raw!r}")
                    continue
                val = int(val)
            base[name] = val
    spec.base = base

    if cp.has_section("experiment"):
        exp = dict(cp.items("experiment"))
        spec.sweep = exp.pop("sweep", spec.sweep).strip()
        if "values" in exp:
            vals = []
            for tok in _split(exp.pop("values")):
                try:
                    vals.append(float(tok))
                except ValueError:
                    diags.append(f"experiment.values: not a number: {tok!r}")
            spec.values = tuple(vals)
        if "schemes" in exp:
            spec.schemes = tuple(_split(exp.pop("schemes")))
        if "analytic" in exp:
            spec.analytic = tuple(_split(exp.pop("analytic")))
        for key, attr in (("trials", "trials"), ("seed", "seed")):
            if key in exp:
                raw = exp.pop(key)
                try:
                    setattr(spec, attr, int(raw))
                except ValueError:
                    diags.append(f"experiment.{key}: not an integer: {raw!r}")
        if "gamma_th" in exp:
            raw = exp.pop("gamma_th")
            try:
                spec.gamma_th = float(raw)
            except ValueError:
                diags.append(f"experiment.gamma_th: not a number: {raw!r}")
        if "out" in exp:
            spec.out = exp.pop("out").strip()
        for key in exp:
            diags.append(f"experiment.{key}: unknown key")

    spec.load_diagnostics = tuple(diags)
    return spec


def _split(raw: str) -> list:
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


def _sweep_configs(spec: ExperimentSpec):
    """Yield (value, merged config dict) per sweep point; value is None
    for sweep=none. Dict form so validate can report before construction."""
    if spec.sweep == "none":
        yield None, dict(spec.base)
        return
    for v in spec.values:
        merged = dict(spec.base)
        if spec.sweep == "n_antennas":
            merged["n_u"] = merged["n_d"] = int(v) if v == int(v) else v
        else:
            merged[spec.sweep] = v
        yield v, merged


def validate(spec: ExperimentSpec) -> list:
    """Structural diagnostics; empty exactly when run() accepts the spec."""
    diags = list(spec.load_diagnostics)

    if spec.sweep not in SWEEP_AXES:
        diags.append(f"sweep: unknown axis {spec.sweep!r}; "
                     f"expected one of {', '.join(SWEEP_AXES)}")
        return diags
    if spec.sweep == "none" and spec.values:
        diags.append("values: sweep=none takes no value list")
    if spec.sweep != "none" and not spec.values:
        diags.append(f"values: sweep={spec.sweep} needs a value list")
    if spec.trials < 1:
        diags.append(f"trials: must be >= 1, got {spec.trials}")
    if not spec.gamma_th > 0.0:
        diags.append(f"gamma_th: must be > 0, got {spec.gamma_th}")

    if not spec.schemes:
        diags.append("schemes: must not be empty")
    for s in spec.schemes:
        if s not in KNOWN_SCHEMES:
            diags.append(f"schemes: unknown scheme {s!r}; "
                         f"expected one of {', '.join(KNOWN_SCHEMES)}")

    for entry in spec.analytic:
        link, sep, variant = entry.partition(":")
        if not sep or link not in ("ul", "dl"):
            diags.append(f"analytic: entry {entry!r} is not ul:<variant> "
                         "or dl:<variant>")
            continue
        table = (analytic.UL_RATE_VARIANTS if link == "ul"
                 else analytic.DL_RATE_VARIANTS)
        if variant not in table:
            diags.append(f"analytic: unknown {link} rate variant {variant!r}")

    if diags:
        return diags

    for v, merged in _sweep_configs(spec):
        where = "" if v is None else f" at {spec.sweep}={v:g}"
        if spec.sweep == "n_antennas" and v != int(v):
            diags.append(f"values: n_antennas takes integers, got {v!r}")
            continue
        try:
            cfg = NetworkConfig(**merged)
        except (TypeError, ValueError) as err:
            diags.append(f"network{where}: {err}")
            continue
        for s in spec.schemes:
            if s == "MrcZf" and cfg.n_d < 2:
                diags.append(f"schemes: MrcZf needs n_d > 1{where} (n_d = "
                             f"{cfg.n_d})")
            if s == "ZfMrt" and cfg.n_u < 2:
                diags.append(f"schemes: ZfMrt needs n_u > 1{where} (n_u = "
                             f"{cfg.n_u})")
            if s in PSEUDO_SCHEMES and cfg.sigma_n2 <= 0.0:
                diags.append(f"schemes: {s} needs sigma_n2 > 0{where}")
    return diags


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, int):
        return str(v)
    return "%.17g" % v


def _analytic_rate(cfg: NetworkConfig, entry: str):
    """(rate or None, note) for one ul:/dl: rate-variant entry."""
    link, _, variant = entry.partition(":")
    fn = analytic.ul_rate if link == "ul" else analytic.dl_rate
    try:
        return fn(cfg, EvalSpec(variant, quad_rel_tol=_CLI_REL_TOL)), ""
    except SeriesNonConvergent as err:
        return None, f"non-convergent: {err}"
    except ValueError as err:
        return None, str(err)


def _hd_pair(cache: dict, cfg: NetworkConfig, cond: str, spec: ExperimentSpec):
    if cond not in cache:
        cache[cond] = montecarlo.estimate_hd(
            cfg, cond, cfg.delta, spec.trials, spec.seed,
            gamma_th=spec.gamma_th)
    return cache[cond]


def _mc_row(cfg: NetworkConfig, scheme: str, spec: ExperimentSpec,
            hd_cache: dict) -> ResultRow:
    notes = []
    if scheme in montecarlo.SCHEMES:
        rep = montecarlo.estimate_fd(cfg, scheme, spec.trials, spec.seed,
                                     gamma_th=spec.gamma_th)
    elif scheme == "large_array":
        rep = montecarlo.estimate_large_array(cfg, spec.trials, spec.seed,
                                              gamma_th=spec.gamma_th)
    else:
        cond = "AC" if scheme == "hd_ac" else "RC"
        rep = _hd_pair(hd_cache, cfg, cond, spec)
    gain_ac = gain_rc = None
    if scheme in montecarlo.SCHEMES:
        if cfg.sigma_n2 <= 0.0:
            notes.append("gains need sigma_n2 > 0")
        elif rep.mean_sum <= 0.0:
            notes.append("gains need a positive FD sum rate")
        else:
            gain_ac = montecarlo.relative_gain(
                rep.mean_sum, _hd_pair(hd_cache, cfg, "AC", spec).mean_sum)
            gain_rc = montecarlo.relative_gain(
                rep.mean_sum, _hd_pair(hd_cache, cfg, "RC", spec).mean_sum)
    return ResultRow(
        *(getattr(cfg, f) for f in CONFIG_FIELDS), scheme=scheme, source="mc",
        rate_ul=rep.mean_rate_ul, rate_dl=rep.mean_rate_dl,
        rate_sum=rep.mean_sum, se_ul=rep.se_ul, se_dl=rep.se_dl,
        se_sum=rep.se_sum, outage_ul=rep.outage_ul, outage_dl=rep.outage_dl,
        gain_vs_hd_ac=gain_ac, gain_vs_hd_rc=gain_rc,
        note="; ".join(notes))


def _analytic_row(cfg: NetworkConfig, entry: str, scheme: str) -> ResultRow:
    value, note = _analytic_rate(cfg, entry)
    link = entry.partition(":")[0]
    return ResultRow(
        *(getattr(cfg, f) for f in CONFIG_FIELDS), scheme=scheme,
        source=f"analytic:{entry}",
        rate_ul=value if link == "ul" else None,
        rate_dl=value if link == "dl" else None,
        note=note)


def compute_rows(spec: ExperimentSpec) -> list:
    """All ResultRows in emission order; raises SpecError when invalid."""
    diags = validate(spec)
    if diags:
        raise SpecError(diags)
    by_scheme = {}
    orphans = []
    for entry in spec.analytic:
        link, _, variant = entry.partition(":")
        home = _VARIANT_SCHEME[link][variant]
        (by_scheme.setdefault(home, []) if home in spec.schemes
         else orphans).append((entry, home))
    rows = []
    for _, merged in _sweep_configs(spec):
        cfg = NetworkConfig(**merged)
        hd_cache = {}
        for scheme in spec.schemes:
            rows.append(_mc_row(cfg, scheme, spec, hd_cache))
            for entry, home in by_scheme.get(scheme, ()):
                rows.append(_analytic_row(cfg, entry, home))
        for entry, home in orphans:
            rows.append(_analytic_row(cfg, entry, home))
    return rows


def write_csv(rows, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, c)) for c in COLUMNS])


def run(spec: ExperimentSpec, stream=None) -> list:
    """Execute the experiment: write the CSV, print a summary, return the
    rows. Invalid specs raise SpecError before anything is written."""
    stream = sys.stdout if stream is None else stream
    rows = compute_rows(spec)
    write_csv(rows, spec.out)
    for row in rows:
        cells = [f"{spec.sweep}={getattr(row, spec.sweep):g}"] \
            if spec.sweep not in ("none", "n_antennas") else \
            ([f"n={row.n_d}"] if spec.sweep == "n_antennas" else [])
        cells += [row.scheme, row.source]
        for name in ("rate_ul", "rate_dl", "rate_sum"):
            v = getattr(row, name)
            if v is not None:
                cells.append(f"{name}={v:.6g}")
        if row.note:
            cells.append(f"note: {row.note}")
        print("  ".join(cells), file=stream)
    print(f"{len(rows)} rows -> {spec.out}", file=stream)
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fdsumrate",
        description="Full-duplex sum-rate experiments: seeded simulation "
                    "and closed-form co-evaluation over parameter sweeps.")
    parser.add_argument("--spec", metavar="PATH",
                        help="experiment spec file (INI; [network] and "
                             "[experiment] sections)")
    parser.add_argument("--trials", type=int, metavar="N")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--out", metavar="PATH")
    parser.add_argument("--schemes", metavar="A,B,C",
                        help=f"comma list from {', '.join(KNOWN_SCHEMES)}")
    parser.add_argument("--analytic", choices=("on", "off"),
                        help="force closed-form co-evaluation on (default "
                             "variants if the spec lists none) or off")
    args = parser.parse_args(argv)

    if args.spec is not None:
        try:
            spec = load_spec(args.spec)
        except OSError as err:
            print(f"spec: {err}", file=sys.stderr)
            return 2
        except configparser.Error as err:
            print(f"spec: {err}", file=sys.stderr)
            return 2
    else:
        spec = ExperimentSpec()

    if args.trials is not None:
        spec.trials = args.trials
    if args.seed is not None:
        spec.seed = args.seed
    if args.out is not None:
        spec.out = args.out
    if args.schemes is not None:
        spec.schemes = tuple(_split(args.schemes))
    if args.analytic == "off":
        spec.analytic = ()
    elif args.analytic == "on" and not spec.analytic:
        spec.analytic = _DEFAULT_ANALYTIC

    try:
        run(spec)
    except SpecError as err:
        for diag in err.diagnostics:
            print(f"invalid spec: {diag}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
