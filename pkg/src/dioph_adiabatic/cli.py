"""Command-line driver: ``dioph-adiabatic {run,scan,search,probe}``.

Config files are INI-style. ``[experiment]`` keys are the
:class:`~dioph_adiabatic.criterion.ExperimentConfig` field names; ``[search]``
holds ``dimension``, ``trials``, ``seed``, ``boundary``, ``wrap_coefficient``,
``t_min`` and ``t_max``. Complex numbers are written ``a+bi`` and ``alphas``
is a comma-separated list.

Exit codes: 0 success, 1 configuration error, 2 numerical guard abort,
3 criterion mismatch under ``--assert-match``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import hashlib
import datetime as _dt
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .criterion import (
    MISMATCH,
    SEARCH_T_RANGE,
    ExperimentConfig,
    _complex_str,
    counterexample_search,
    parse_complex,
    run_experiment,
)
from .errors import AdiabaticError, ConfigError, NumericalGuardError
from .fock import BoundaryCondition, FockSpace, Scheme
from .hamiltonian import CoherentParams, build_HI, build_HP, interpolate
from .polynomial import parse
from .spectral import condition_scan, eigendecompose, partial_sum_probe, recurrence_residual

log = logging.getLogger("dioph_adiabatic")

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_MISMATCH = 0, 1, 2, 3

_INT_KEYS = {"cutoff", "t_count", "grid_points", "seed", "num_vars"}
_FLOAT_KEYS = {"t_initial", "t_ratio", "steps_per_unit_time"}
_SEARCH_DEFAULTS = {
    "dimension": "5",
    "trials": "1000",
    "seed": "0",
    "boundary": "abrupt",
    "wrap_coefficient": "1+0i",
    "t_min": repr(SEARCH_T_RANGE[0]),
    "t_max": repr(SEARCH_T_RANGE[1]),
}


@dataclasses.dataclass(frozen=True)
class RunManifest:
    config_hash: str
    timestamp: str
    version: str
    outputs: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "timestamp": self.timestamp,
            "version": self.version,
            "outputs": list(self.outputs),
        }


# --- config files -----------------------------------------------------------------

def _read_ini(path) -> configparser.ConfigParser:
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {str(path)!r}: {exc.strerror or exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {str(path)!r}: {exc}") from exc
    return parser


def experiment_from_section(section) -> ExperimentConfig:
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown [experiment] keys: {', '.join(sorted(unknown))}")
    if "polynomial" not in section:
        raise ConfigError("[experiment] needs a 'polynomial' key")
    kwargs = {}
    for key, raw in section.items():
        try:
            if key == "alphas":
                kwargs[key] = tuple(parse_complex(a) for a in raw.split(",") if a.strip())
            elif key == "wrap_coefficient":
                kwargs[key] = parse_complex(raw)
            elif key in _INT_KEYS:
                kwargs[key] = None if raw.strip().lower() in ("", "none") else int(raw)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(raw)
            else:
                kwargs[key] = raw.strip()
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    return ExperimentConfig(**kwargs)


def load_experiment(path) -> ExperimentConfig:
    parser = _read_ini(path)
    if not parser.has_section("experiment"):
        raise ConfigError(f"{str(path)!r} has no [experiment] section")
    return experiment_from_section(dict(parser["experiment"]))


def dump_experiment(config: ExperimentConfig) -> str:
    """INI text that :func:`load_experiment` reads back to an equal config."""
    d = config.to_dict()
    lines = ["[experiment]"]
    for f in dataclasses.fields(ExperimentConfig):
        value = d[f.name]
        if f.name == "alphas":
            value = ", ".join(value)
        elif value is None:
            value = "none"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def load_search(path) -> dict:
    parser = _read_ini(path)
    if not parser.has_section("search"):
        raise ConfigError(f"{str(path)!r} has no [search] section")
    section = dict(parser["search"])
    unknown = set(section) - set(_SEARCH_DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown [search] keys: {', '.join(sorted(unknown))}")
    merged = {**_SEARCH_DEFAULTS, **section}
    try:
        out = {
            "dimension": int(merged["dimension"]),
            "trials": int(merged["trials"]),
            "seed": int(merged["seed"]),
            "boundary": Scheme(merged["boundary"].strip().lower()).value,
            "wrap_coefficient": parse_complex(merged["wrap_coefficient"]),
            "t_range": (float(merged["t_min"]), float(merged["t_max"])),
        }
    except ValueError as exc:
        raise ConfigError(f"bad [search] value: {exc}") from exc
    if out["dimension"] < 1 or out["trials"] < 0:
        raise ConfigError("dimension must be positive and trials non-negative")
    if not 0 < out["t_range"][0] <= out["t_range"][1]:
        raise ConfigError("need 0 < t_min <= t_max")
    return out


# --- writers ---------------------------------------------------------------------

def _label_str(label) -> str:
    return ",".join(str(int(n)) for n in label)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return _complex_str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_json(path: Path, data):
    path.write_text(json.dumps(data, indent=2, default=_json_default) + "\n", encoding="utf-8")


def _scan_rows(report):
    return [(repr(s), i, j, repr(v)) for s, i, j, v in report.per_s_minimum]


SCAN_HEADER = ("s", "pair_i", "pair_j", "abs_element")
PROB_HEADER = ("T", "label", "probability")
HITS_HEADER = ("trial", "seed", "config_hash", "violating_label", "probability", "T")


def _manifest(out: Path, config_hash: str, outputs) -> RunManifest:
    manifest = RunManifest(
        config_hash=config_hash,
        timestamp=_dt.datetime.now(_dt.timezone.utc).isoformat(),
        version=__version__,
        outputs=tuple(str(out / name) for name in outputs),
    )
    _write_json(out / "manifest.json", manifest.to_dict())
    return manifest


# --- subcommands -----------------------------------------------------------------

def cmd_run(args) -> int:
    config = load_experiment(args.config)
    if args.dump_config:
        return _dump(config, args.dump_config)
    report = run_experiment(config, workers=args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "report.json", report.to_dict())
    _write_csv(
        out / "probabilities.csv",
        PROB_HEADER,
        [(repr(T), _label_str(l), repr(p)) for T, l, p in report.probability_rows()],
    )
    _write_csv(out / "condition_scan.csv", SCAN_HEADER, _scan_rows(report.condition))
    _manifest(out, config.config_hash(), ["report.json", "probabilities.csv", "condition_scan.csv"])
    print(
        f"verdict={report.verdict} ground={_label_str(report.ground_label)} "
        f"identified={report.identified[-1] and _label_str(report.identified[-1])} "
        f"solution={report.solution_verdict!r} -> {out}"
    )
    if args.assert_match and report.verdict == MISMATCH:
        return EXIT_MISMATCH
    return EXIT_OK


def _dump(config: ExperimentConfig, target: str) -> int:
    text = dump_experiment(config)
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")
    return EXIT_OK


def _inline_space(args) -> tuple:
    try:
        alphas = tuple(parse_complex(a) for a in args.alpha.split(","))
        params = CoherentParams(alphas)
        scheme = Scheme(args.bc)
        bc = BoundaryCondition.abrupt() if scheme is Scheme.ABRUPT else BoundaryCondition(scheme, parse_complex(args.c))
        space = FockSpace(len(alphas), args.nmax, bc)
        poly = parse(args.poly, len(alphas))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return poly, params, space


def cmd_scan(args) -> int:
    if args.config:
        cfg = load_experiment(args.config)
        poly, params, space, grid = cfg.poly(), cfg.params(), cfg.space(), cfg.grid_points
    else:
        if args.poly is None:
            raise ConfigError("scan needs --config or --poly")
        poly, params, space = _inline_space(args)
        grid = args.grid
    HI, HP = build_HI(space, params), build_HP(space, poly)
    report = condition_scan(HI, HP, grid, workers=args.threads)
    rows = _scan_rows(report)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(out / "condition_scan.csv", SCAN_HEADER, rows)
        _write_json(out / "condition_scan.json", report.summary())
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SCAN_HEADER)
        writer.writerows(rows)
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_search(args) -> int:
    params = load_search(args.config)
    report = counterexample_search(
        dimension=params["dimension"],
        trials=params["trials"],
        seed=params["seed"],
        boundary=params["boundary"],
        wrap_coefficient=params["wrap_coefficient"],
        t_range=params["t_range"],
        workers=args.threads,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out / "search_hits.csv",
        HITS_HEADER,
        [
            (h.config.trial, h.config.seed, h.config.config_hash(), h.violating_label,
             repr(h.probability), repr(h.config.total_time))
            for h in report.hits
        ],
    )
    _write_json(out / "search_report.json", report.to_dict())
    digest = hashlib.sha256(json.dumps(params, sort_keys=True, default=_json_default).encode()).hexdigest()
    _manifest(out, digest, ["search_hits.csv", "search_report.json"])
    print(
        f"trials={report.trials} evaluated={report.evaluated} hits={len(report.hits)} "
        f"unconverged={len(report.unconverged)} -> {out}"
    )
    return EXIT_OK


def cmd_probe(args) -> int:
    if args.poly is None:
        raise ConfigError("probe needs --poly")
    poly, params, space = _inline_space(args)
    if space.num_modes != 1:
        raise ConfigError("probe works on a single mode")
    if not 0 <= args.s < 1:
        raise ConfigError("probe needs 0 <= s < 1")
    HI, HP = build_HI(space, params), build_HP(space, poly)
    H = interpolate(HI, HP, args.s)
    system = eigendecompose(H)
    if not 0 <= args.index < space.dimension:
        raise ConfigError(f"eigenindex must be in 0..{space.dimension - 1}")
    resid = recurrence_residual(system, args.index, args.s, params, poly, space)
    i, j = (int(x) for x in args.pair.split(","))
    overlap, weighted, variation = partial_sum_probe(system, (i, j), poly, args.upto)
    result = {
        "s": args.s,
        "eigenindex": args.index,
        "energy": float(system.energies[args.index]),
        "recurrence_residual": resid.tolist(),
        "max_residual": float(resid.max()),
        "residual_scale": H.frobenius_norm(),
        "pair": [i, j],
        "upto": args.upto,
        "overlap_sum": _complex_str(overlap),
        "weighted_sum": _complex_str(weighted),
        "variation_sum": variation,
    }
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return EXIT_OK


# --- entry point -----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dioph-adiabatic", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $ADIA_THREADS or 1)")

    def inline(p):
        p.add_argument("--poly", help='polynomial such as "x1-2"')
        p.add_argument("--alpha", default="1+0i", help="comma-separated complex alphas")
        p.add_argument("--nmax", type=int, default=8)
        p.add_argument("--bc", default="antiperiodic", choices=[s.value for s in Scheme])
        p.add_argument("--c", default="1+0i", help="wrap coefficient")

    p = sub.add_parser("run", help="run the identification experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="results")
    p.add_argument("--assert-match", action="store_true")
    p.add_argument("--dump-config", metavar="PATH", help="write canonical config ('-' for stdout) and exit")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("scan", help="condition scan only")
    p.add_argument("--config")
    inline(p)
    p.add_argument("--grid", type=int, default=19)
    p.add_argument("--out")
    common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("search", help="randomized counterexample search")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="results")
    common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("probe", help="recurrence residual and partial sums")
    inline(p)
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--pair", default="0,1")
    p.add_argument("--upto", type=int, default=10)
    common(p)
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalGuardError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, AdiabaticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
