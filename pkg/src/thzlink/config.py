"""Scenario files.

A scenario is a TOML document with the sections below; every key is
optional and falls back to the backhaul defaults. Unknown sections or keys
are rejected. Three scenarios ship with the package and can be referred to
by name: ``backhaul-fig4``, ``channel-fig5`` and ``subarray-fig6``.
"""
from __future__ import annotations

import copy
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .arrays import ELEMENT_GAIN_CONSTANT, SubarrayConfig
from .channel import AtmosphereState, WeatherState
from .linkbudget import LinkScenario
from .spectroscopy import bundled_catalog_path

__all__ = ["ConfigError", "CatalogNotFound", "DEFAULTS", "BUILTIN_SCENARIOS", "ScenarioConfig", "load_config", "parse_override"]

BUNDLED = "bundled"

BUILTIN_SCENARIOS = ("backhaul-fig4", "channel-fig5", "subarray-fig6")

_NUM = (int, float)

# section -> key -> (default, accepted types)
DEFAULTS: Dict[str, Dict[str, Tuple[Any, tuple]]] = {
    "catalog": {
        "path": (BUNDLED, (str,)),
        "molecule": (1, (int,)),
        "f_lo_ghz": (0.0, _NUM),
        "f_hi_ghz": (1100.0, _NUM),
    },
    "link": {
        "carrier_frequency_ghz": (300.0, _NUM),
        "symbol_rate_gbd": (64.0, _NUM),
        "noise_bandwidth_ghz": (None, _NUM),
        "tx_power_dbm": (0.0, _NUM),
        "tx_gain_dbi": (55.0, _NUM),
        "rx_gain_dbi": (55.0, _NUM),
        "antenna_diameter_m": (None, _NUM),
        "antenna_efficiency": (0.8, _NUM),
        "noise_figure_db": (10.0, _NUM),
        "implementation_margin_db": (0.0, _NUM),
        "code_rate": (0.893, _NUM),
        "polarizations": (1, (int,)),
        "max_qam_order": (128, (int,)),
        "target_ber": (2e-2, _NUM),
    },
    "atmosphere": {
        "pressure_pa": (101325.0, _NUM),
        "temperature_k": (296.0, _NUM),
        "water_mixing_ratio": (0.01, _NUM),
        "line_shape": ("vvw", (str,)),
    },
    "weather": {
        "rain_rate_mm_h": (0.0, _NUM),
        "fog_liquid_water_g_m3": (0.0, _NUM),
    },
    "spectrum": {
        "f_lo_ghz": (100.0, _NUM),
        "f_hi_ghz": (1000.0, _NUM),
        "step_ghz": (1.0, _NUM),
        "distance_m": (1000.0, _NUM),
    },
    "rate_distance": {
        "distances_m": ([1.0, 10.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0], (list,)),
    },
    "subarray": {
        "n_elements": ([4, 8, 16], (list,)),
        "opening_angles_deg": ([5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0, 60.0], (list,)),
        "per_element_power_dbm": (0.0, _NUM),
        "link_distance_m": (10.0, _NUM),
        "element_gain_constant": (ELEMENT_GAIN_CONSTANT, _NUM),
    },
    "windows": {
        "threshold_db_per_km": (10.0, _NUM),
        "distance_m": (1000.0, _NUM),
        "step_ghz": (1.0, _NUM),
    },
    "output": {
        "path": ("-", (str,)),
    },
}


class ConfigError(ValueError):
    pass


class CatalogNotFound(ConfigError):
    pass


def _check_type(section: str, key: str, value: Any) -> Any:
    _, types = DEFAULTS[section][key]
    if isinstance(value, bool) or not isinstance(value, types):
        names = "/".join(t.__name__ for t in types)
        raise ConfigError(f"{section}.{key}: expected {names}, got {value!r}")
    if list in types:
        if not value or not all(isinstance(v, _NUM) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{section}.{key}: expected a nonempty list of numbers")
    return value


def _merge(base: Dict[str, Dict[str, Any]], doc: Mapping[str, Any], origin: str) -> None:
    for section, body in doc.items():
        if section not in DEFAULTS:
            raise ConfigError(f"{origin}: unknown section [{section}]")
        if not isinstance(body, Mapping):
            raise ConfigError(f"{origin}: [{section}] must be a table")
        for key, value in body.items():
            if key not in DEFAULTS[section]:
                raise ConfigError(f"{origin}: unknown key {section}.{key}")
            base[section][key] = _check_type(section, key, value)


def parse_override(text: str) -> Tuple[str, str, Any]:
    """Split ``section.key=value``; the value is read as a TOML literal,
    falling back to a bare string."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not KEY=VALUE")
    dotted, raw = text.split("=", 1)
    parts = dotted.strip().split(".")
    if len(parts) != 2 or not all(parts):
        raise ConfigError(f"override key {dotted!r} must be section.key")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return parts[0], parts[1], value


def _builtin_path(name: str) -> Path:
    return Path(str(resources.files("thzlink") / "configs" / f"{name}.toml"))


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario with constructors for the domain objects."""

    values: Mapping[str, Mapping[str, Any]]
    base_dir: Path = Path(".")

    def __getitem__(self, section: str) -> Mapping[str, Any]:
        return self.values[section]

    @property
    def catalog_path(self) -> Path:
        path = self.values["catalog"]["path"]
        if path == BUNDLED:
            return bundled_catalog_path()
        path = Path(path).expanduser()
        return path if path.is_absolute() else self.base_dir / path

    @property
    def catalog_band(self) -> Tuple[float, float]:
        c = self.values["catalog"]
        return float(c["f_lo_ghz"]), float(c["f_hi_ghz"])

    def link_scenario(self) -> LinkScenario:
        v = self.values["link"]
        kwargs = dict(
            carrier_frequency=float(v["carrier_frequency_ghz"]),
            symbol_rate=float(v["symbol_rate_gbd"]),
            noise_bandwidth=None if v["noise_bandwidth_ghz"] is None else float(v["noise_bandwidth_ghz"]),
            tx_power=float(v["tx_power_dbm"]),
            noise_figure=float(v["noise_figure_db"]),
            implementation_margin=float(v["implementation_margin_db"]),
            code_rate=float(v["code_rate"]),
            polarizations=int(v["polarizations"]),
            max_qam_order=int(v["max_qam_order"]),
            target_ber=float(v["target_ber"]),
        )
        if v["antenna_diameter_m"] is not None:
            return LinkScenario.from_aperture(
                float(v["antenna_diameter_m"]), float(v["antenna_efficiency"]), **kwargs
            )
        return LinkScenario(tx_gain=float(v["tx_gain_dbi"]), rx_gain=float(v["rx_gain_dbi"]), **kwargs)

    def atmosphere(self) -> AtmosphereState:
        v = self.values["atmosphere"]
        return AtmosphereState(
            pressure=float(v["pressure_pa"]),
            temperature=float(v["temperature_k"]),
            water_mixing_ratio=float(v["water_mixing_ratio"]),
        )

    @property
    def line_shape(self) -> str:
        return self.values["atmosphere"]["line_shape"]

    def weather(self) -> WeatherState:
        v = self.values["weather"]
        return WeatherState(float(v["rain_rate_mm_h"]), float(v["fog_liquid_water_g_m3"]))

    def subarray_template(self) -> SubarrayConfig:
        v = self.values["subarray"]
        return SubarrayConfig(
            n_elements=int(v["n_elements"][0]),
            opening_angle=float(v["opening_angles_deg"][0]),
            per_element_power=float(v["per_element_power_dbm"]),
            link_distance=float(v["link_distance_m"]),
            element_gain_constant=float(v["element_gain_constant"]),
            base_scenario=self.link_scenario(),
        )

    def validate(self) -> None:
        """Build every domain object once so invariant violations surface early."""
        try:
            self.link_scenario()
            self.atmosphere()
            self.weather()
            self.subarray_template()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        v = self.values
        if v["atmosphere"]["line_shape"] not in ("vvw", "lorentz"):
            raise ConfigError("atmosphere.line_shape must be 'vvw' or 'lorentz'")
        if any(int(n) != n or n < 1 for n in v["subarray"]["n_elements"]):
            raise ConfigError("subarray.n_elements must be integers >= 1")
        if any(not 0 < a <= 180 for a in v["subarray"]["opening_angles_deg"]):
            raise ConfigError("subarray.opening_angles_deg must lie in (0, 180]")
        d = v["rate_distance"]["distances_m"]
        if any(x <= 0 for x in d) or list(d) != sorted(d):
            raise ConfigError("rate_distance.distances_m must be positive and ascending")
        s = v["spectrum"]
        if not (0 < s["f_lo_ghz"] <= s["f_hi_ghz"]) or s["step_ghz"] <= 0 or s["distance_m"] <= 0:
            raise ConfigError("spectrum needs 0 < f_lo_ghz <= f_hi_ghz, step_ghz > 0, distance_m > 0")
        w = v["windows"]
        if w["threshold_db_per_km"] <= 0 or w["distance_m"] <= 0 or w["step_ghz"] <= 0:
            raise ConfigError("windows.threshold_db_per_km, distance_m and step_ghz must be > 0")
        c = v["catalog"]
        if not 0 <= c["f_lo_ghz"] < c["f_hi_ghz"]:
            raise ConfigError("catalog band needs 0 <= f_lo_ghz < f_hi_ghz")
        if not self.catalog_path.is_file():
            raise CatalogNotFound(f"catalog file not found: {self.catalog_path}")


def load_config(
    source: Optional[str] = None,
    overrides: Optional[List[str]] = None,
) -> ScenarioConfig:
    """Read a scenario file (path or built-in name), apply ``section.key=value``
    overrides and validate the result."""
    values = {section: {k: copy.deepcopy(d) for k, (d, _) in keys.items()} for section, keys in DEFAULTS.items()}
    base_dir = Path(".")
    if source is not None:
        path = Path(source)
        if not path.is_file() and source in BUILTIN_SCENARIOS:
            path = _builtin_path(source)
        if not path.is_file():
            raise ConfigError(f"scenario file not found: {source}")
        try:
            doc = tomllib.loads(path.read_text(encoding="utf-8"))
        except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        _merge(values, doc, str(path))
        base_dir = path.parent
    for text in overrides or []:
        section, key, value = parse_override(text)
        _merge(values, {section: {key: value}}, "--set")
    config = ScenarioConfig(values, base_dir)
    config.validate()
    return config
