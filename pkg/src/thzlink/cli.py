"""Command-line front end: scenario file in, CSV out.

Exit codes: 0 success, 2 configuration error, 3 catalog/data error,
4 numerical failure. Diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from typing import Iterable, List, Optional, Sequence

from . import __version__
from .arrays import subarray_sweep
from .channel import loss_spectrum
from .config import CatalogNotFound, ConfigError, ScenarioConfig, load_config
from .linkbudget import NoSolution, build_ladder, rate_vs_distance
from .spectroscopy import LineCatalog, SpectroscopyError, read_catalog
from .windows import find_windows, usable_bandwidth

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

SPECTRUM_COLUMNS = ("frequency_ghz", "fspl_db", "absorption_db", "rain_db", "fog_db", "total_db")
RATE_COLUMNS = ("distance_m", "snr_db", "qam_order", "net_rate_gbps")
SUBARRAY_COLUMNS = ("n_elements", "opening_angle_deg", "net_rate_gbps")
WINDOW_COLUMNS = ("f_lo_ghz", "f_hi_ghz", "width_ghz", "usable_width_at_distance_ghz")


class DataError(Exception):
    pass


class NumericalError(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    value = float(value)
    if not math.isfinite(value):
        raise NumericalError(f"non-finite value in output: {value}")
    text = format(value, ".6g")
    return "0" if text == "-0" else text


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _load_catalog(config: ScenarioConfig) -> LineCatalog:
    try:
        return read_catalog(
            config.catalog_path, config["catalog"]["molecule"], config.catalog_band
        )
    except (SpectroscopyError, OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{config.catalog_path}: {exc}") from None


# --- commands ----------------------------------------------------------------


def cmd_spectrum(config: ScenarioConfig) -> str:
    catalog = _load_catalog(config)
    s = config["spectrum"]
    spectrum = loss_spectrum(
        (s["f_lo_ghz"], s["f_hi_ghz"]),
        s["step_ghz"],
        s["distance_m"],
        config.atmosphere(),
        config.weather(),
        catalog,
        config.line_shape,
    )
    rows = (
        (p.frequency, p.fspl_db, p.absorption_db, p.rain_db, p.fog_db, p.total_db)
        for p in spectrum
    )
    return to_csv(SPECTRUM_COLUMNS, rows)


def cmd_rate_distance(config: ScenarioConfig) -> str:
    catalog = _load_catalog(config)
    scenario = config.link_scenario()
    points = rate_vs_distance(
        scenario,
        config["rate_distance"]["distances_m"],
        config.atmosphere(),
        config.weather(),
        catalog,
        build_ladder(scenario.target_ber),
    )
    rows = (
        (p.distance, p.snr, "none" if p.selected_order is None else p.selected_order, p.net_rate)
        for p in points
    )
    return to_csv(RATE_COLUMNS, rows)


def cmd_subarray(config: ScenarioConfig) -> str:
    catalog = _load_catalog(config)
    rows = subarray_sweep(
        [int(n) for n in config["subarray"]["n_elements"]],
        [float(a) for a in config["subarray"]["opening_angles_deg"]],
        config.subarray_template(),
        config.atmosphere(),
        catalog,
        config.weather(),
    )
    return to_csv(SUBARRAY_COLUMNS, ((r.n_elements, r.opening_angle, r.net_rate) for r in rows))


def cmd_windows(config: ScenarioConfig) -> str:
    catalog = _load_catalog(config)
    s, w = config["spectrum"], config["windows"]
    atmosphere, weather = config.atmosphere(), config.weather()
    spectrum = loss_spectrum(
        (s["f_lo_ghz"], s["f_hi_ghz"]), s["step_ghz"], s["distance_m"],
        atmosphere, weather, catalog, config.line_shape,
    )
    scenario = config.link_scenario()
    rows = []
    for window in find_windows(spectrum, w["threshold_db_per_km"]):
        usable = usable_bandwidth(
            window, scenario, w["distance_m"], atmosphere, catalog, weather, w["step_ghz"]
        )
        rows.append((window.f_lo, window.f_hi, window.width, usable.width))
    return to_csv(WINDOW_COLUMNS, rows)


def cmd_parse_catalog(
    path, molecule: Optional[int], band: Sequence[float], table: bool = False
) -> str:
    try:
        catalog = read_catalog(path, molecule, band)
    except (SpectroscopyError, OSError, UnicodeDecodeError) as exc:
        raise DataError(f"{path}: {exc}") from None
    out = [f"lines: {len(catalog)}"]
    if len(catalog):
        freqs = catalog.frequencies
        out.append(f"frequency range: {_fmt(freqs[0])} - {_fmt(freqs[-1])} GHz")
    else:
        out.append("frequency range: none")
    text = "\n".join(out) + "\n"
    if table:
        text += to_csv(
            ("molecule", "isotopologue", "frequency_ghz", "intensity", "air_halfwidth",
             "self_halfwidth", "lower_state_energy", "temperature_exponent"),
            (
                (ln.molecule_id, ln.isotopologue_id, ln.center_frequency, ln.intensity,
                 ln.air_halfwidth, ln.self_halfwidth, ln.lower_state_energy,
                 ln.temperature_exponent)
                for ln in catalog
            ),
        )
    return text


COMMANDS = {
    "spectrum": cmd_spectrum,
    "rate-distance": cmd_rate_distance,
    "subarray": cmd_subarray,
    "windows": cmd_windows,
}


# --- argument handling -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="scenario TOML file or built-in name (backhaul-fig4, channel-fig5, subarray-fig6)")
    common.add_argument("--catalog", metavar="PATH", help="HITRAN .par catalog (default: bundled)")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--set", metavar="KEY=VALUE", action="append", default=[], dest="overrides",
                        help="override a scenario field, e.g. link.tx_power_dbm=10 (repeatable)")
    common.add_argument("--threshold", metavar="DB_PER_KM", type=float,
                        help="window absorption threshold")

    parser = argparse.ArgumentParser(prog="thzlink", description="THz link planning sweeps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    pc = sub.add_parser("parse-catalog", parents=[common], help="summarize a .par file")
    pc.add_argument("path", nargs="?", help="catalog to read (default: --catalog or the scenario's)")
    pc.add_argument("--molecule", type=int, help="molecule id filter (default: scenario value)")
    pc.add_argument("--all-molecules", action="store_true", help="disable the molecule filter")
    pc.add_argument("--band", nargs=2, type=float, metavar=("LO", "HI"), help="band in GHz")
    pc.add_argument("--table", action="store_true", help="append a per-line table")
    return parser


def _resolve_config(args) -> ScenarioConfig:
    overrides = list(args.overrides)
    if args.catalog is not None:
        overrides.append(f"catalog.path={_toml_string(args.catalog)}")
    if args.out is not None:
        overrides.append(f"output.path={_toml_string(args.out)}")
    if args.threshold is not None:
        overrides.append(f"windows.threshold_db_per_km={args.threshold!r}")
    return load_config(args.config, overrides)


def _toml_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _emit(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def run(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        if args.command == "parse-catalog":
            if args.all_molecules:
                molecule = None
            elif args.molecule is not None:
                molecule = args.molecule
            else:
                molecule = config["catalog"]["molecule"]
            band = args.band or config.catalog_band
            path = args.path or config.catalog_path
            text = cmd_parse_catalog(path, molecule, band, args.table)
        else:
            text = COMMANDS[args.command](config)
        _emit(text, config["output"]["path"])
    except CatalogNotFound as exc:
        print(f"thzlink: catalog error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigError as exc:
        print(f"thzlink: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"thzlink: catalog error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericalError, NoSolution, ArithmeticError) as exc:
        print(f"thzlink: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # domain invariants tripped by scenario values (e.g. rain model range)
        print(f"thzlink: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"thzlink: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
