"""Line-of-sight propagation losses below ~1 THz.

Free-space spreading (Friis), water-vapour absorption computed line by line
and integrated with Beer-Lambert, rain attenuation (ITU-R P.838-3) and
fog / cloud attenuation (ITU-R P.840-6 double-Debye model).

Frequencies are in GHz, distances in metres and losses in dB throughout.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterator, NamedTuple, Sequence, Tuple, Union

import numpy as np

from .spectroscopy import WAVENUMBER_TO_GHZ, LineCatalog

__all__ = [
    "SPEED_OF_LIGHT",
    "BOLTZMANN",
    "DB_PER_NEPER",
    "FOG_MODEL_MAX_GHZ",
    "ChannelError",
    "InvalidAtmosphere",
    "NonPositiveInput",
    "FrequencyOutOfModelRange",
    "AtmosphereState",
    "WeatherState",
    "LossBreakdown",
    "LossSpectrum",
    "FogAttenuation",
    "van_vleck_weisskopf",
    "lorentzian",
    "absorption_coefficient",
    "beer_lambert_db",
    "fspl_db",
    "rain_coefficients",
    "rain_attenuation_db_per_km",
    "fog_specific_coefficient",
    "fog_attenuation_db_per_km",
    "total_loss",
    "frequency_grid",
    "loss_spectrum",
    "local_maxima",
    "absorption_dominance_frequency",
]

SPEED_OF_LIGHT = 299_792_458.0  # m/s
BOLTZMANN = 1.380649e-23  # J/K
DB_PER_NEPER = 10.0 * math.log10(math.e)

P_REF = 101_325.0  # Pa, 1 atm
T_REF = 296.0  # K, HITRAN reference

FOG_MODEL_MAX_GHZ = 200.0

ArrayLike = Union[float, Sequence[float], np.ndarray]


class ChannelError(ValueError):
    """Base class for channel-model input errors."""


class InvalidAtmosphere(ChannelError):
    pass


class NonPositiveInput(ChannelError):
    pass


class FrequencyOutOfModelRange(ChannelError):
    pass


@dataclass(frozen=True)
class AtmosphereState:
    """Homogeneous gas state along the path.

    Defaults are the HITRAN reference conditions with the European mean
    water-vapour volume mixing ratio of 1 %.
    """

    pressure: float = P_REF  # Pa
    temperature: float = T_REF  # K
    water_mixing_ratio: float = 0.01

    def __post_init__(self) -> None:
        if not self.pressure > 0:
            raise InvalidAtmosphere(f"pressure must be > 0 Pa, got {self.pressure}")
        if not self.temperature > 0:
            raise InvalidAtmosphere(f"temperature must be > 0 K, got {self.temperature}")
        if not 0 <= self.water_mixing_ratio < 1:
            raise InvalidAtmosphere(
                f"water mixing ratio must be in [0, 1), got {self.water_mixing_ratio}"
            )

    @property
    def water_number_density(self) -> float:
        """Absorber molecules per m^3."""
        return self.water_mixing_ratio * self.pressure / (BOLTZMANN * self.temperature)


@dataclass(frozen=True)
class WeatherState:
    rain_rate: float = 0.0  # mm/h
    fog_liquid_water: float = 0.0  # g/m^3

    def __post_init__(self) -> None:
        if not self.rain_rate >= 0:
            raise ChannelError(f"rain rate must be >= 0, got {self.rain_rate}")
        if not self.fog_liquid_water >= 0:
            raise ChannelError(f"fog liquid water must be >= 0, got {self.fog_liquid_water}")


@dataclass(frozen=True)
class LossBreakdown:
    frequency: float
    distance: float
    fspl_db: float
    absorption_db: float
    rain_db: float
    fog_db: float
    total_db: float
    fog_extrapolated: bool = False


@dataclass(frozen=True)
class LossSpectrum:
    """Loss breakdowns on a strictly increasing frequency grid."""

    points: Tuple[LossBreakdown, ...]
    atmosphere: AtmosphereState
    weather: WeatherState

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        freqs = [p.frequency for p in self.points]
        if any(a >= b for a, b in zip(freqs, freqs[1:])):
            raise ChannelError("spectrum frequencies must be strictly increasing")
        if len({p.distance for p in self.points}) > 1:
            raise ChannelError("spectrum points must share one distance")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[LossBreakdown]:
        return iter(self.points)

    def __getitem__(self, i: int) -> LossBreakdown:
        return self.points[i]

    @property
    def distance(self) -> float:
        return self.points[0].distance if self.points else float("nan")

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([p.frequency for p in self.points])

    def column(self, name: str) -> np.ndarray:
        """One LossBreakdown field across the grid, e.g. ``"absorption_db"``."""
        return np.array([getattr(p, name) for p in self.points], dtype=float)


class FogAttenuation(NamedTuple):
    db_per_km: float
    extrapolated: bool


# --- line shapes -------------------------------------------------------------


def van_vleck_weisskopf(f, f0, gamma):
    """Van Vleck-Weisskopf profile in 1/GHz (all arguments in GHz)."""
    return (f / f0) * (gamma / math.pi) * (
        1.0 / ((f - f0) ** 2 + gamma ** 2) + 1.0 / ((f + f0) ** 2 + gamma ** 2)
    )


def lorentzian(f, f0, gamma):
    """Lorentz profile in 1/GHz."""
    return (gamma / math.pi) / ((f - f0) ** 2 + gamma ** 2)


LINE_SHAPES = {"vvw": van_vleck_weisskopf, "lorentz": lorentzian}


@functools.lru_cache(maxsize=16)
def _line_arrays(catalog: LineCatalog):
    cols = list(
        zip(
            *(
                (ln.center_frequency, ln.intensity, ln.air_halfwidth,
                 ln.self_halfwidth, ln.temperature_exponent)
                for ln in catalog.lines
            )
        )
    )
    return tuple(np.array(c, dtype=float) for c in cols)


def absorption_coefficient(
    frequency: ArrayLike,
    catalog: LineCatalog,
    atmosphere: AtmosphereState,
    line_shape: str = "vvw",
):
    """Water-vapour absorption coefficient in 1/m.

    Sums ``n * S_i * F(f; f_i, gamma_i)`` over the catalog, where ``n`` is the
    absorber number density and ``gamma_i`` the pressure- and
    temperature-scaled Lorentz half width. Intensities are used at their
    296 K reference values. Accepts a scalar or an array of frequencies.
    """
    if not isinstance(atmosphere, AtmosphereState):
        raise InvalidAtmosphere("atmosphere must be an AtmosphereState")
    try:
        shape = LINE_SHAPES[line_shape]
    except KeyError:
        raise ChannelError(f"unknown line shape {line_shape!r}; use one of {sorted(LINE_SHAPES)}") from None
    f = np.asarray(frequency, dtype=float)
    if np.any(~(f > 0)):
        raise NonPositiveInput("frequency must be > 0 GHz")

    scalar = f.ndim == 0
    n_abs = atmosphere.water_number_density
    if len(catalog) == 0 or n_abs == 0.0:
        return 0.0 if scalar else np.zeros_like(f)

    f0, s, g_air, g_self, n_exp = _line_arrays(catalog)
    q = atmosphere.water_mixing_ratio
    gamma = (
        (g_air * (1.0 - q) + g_self * q)
        * (atmosphere.pressure / P_REF)
        * (T_REF / atmosphere.temperature) ** n_exp
        * WAVENUMBER_TO_GHZ
    )
    profile = shape(f[..., None], f0, gamma)  # 1/GHz
    # n [m^-3] * S [cm/molecule] * F [cm] -> cm^-1 scale factor 1e-4 to m^-1
    k = 1e-4 * n_abs * WAVENUMBER_TO_GHZ * np.sum(s * profile, axis=-1)
    return float(k) if scalar else k


def beer_lambert_db(k: float, distance: float) -> float:
    """Attenuation in dB of a homogeneous path with absorption coefficient ``k`` (1/m)."""
    return DB_PER_NEPER * k * distance


def fspl_db(frequency: ArrayLike, distance: ArrayLike):
    """Friis free-space path loss, 20 log10(4 pi d f / c)."""
    f = np.asarray(frequency, dtype=float)
    d = np.asarray(distance, dtype=float)
    if np.any(~(f > 0)) or np.any(~(d > 0)):
        raise NonPositiveInput("frequency and distance must be > 0")
    loss = 20.0 * np.log10(4.0 * math.pi * d * f * 1e9 / SPEED_OF_LIGHT)
    return float(loss) if loss.ndim == 0 else loss


# --- rain: ITU-R P.838-3 -----------------------------------------------------


@functools.lru_cache(maxsize=1)
def _p838_table() -> dict:
    text = (resources.files("thzlink") / "data" / "p838-3.json").read_text(encoding="utf-8")
    return json.loads(text)


def _p838_fit(coeffs: dict, log_f: float) -> float:
    a, b, c = (np.asarray(coeffs[key]) for key in ("a", "b", "c"))
    return float(np.sum(a * np.exp(-(((log_f - b) / c) ** 2))) + coeffs["m"] * log_f + coeffs["offset"])


def rain_coefficients(
    frequency: float,
    elevation_deg: float = 0.0,
    tilt_deg: float = 0.0,
) -> Tuple[float, float]:
    """P.838-3 power-law coefficients ``(k, alpha)``.

    ``tilt_deg`` is the polarization tilt angle: 0 for horizontal, 90 for
    vertical and 45 for circular polarization.
    """
    table = _p838_table()
    f_min, f_max = table["frequency_range_ghz"]
    if not f_min <= frequency <= f_max:
        raise FrequencyOutOfModelRange(
            f"P.838-3 is defined for {f_min}-{f_max} GHz, got {frequency}"
        )
    log_f = math.log10(frequency)
    k_h = 10.0 ** _p838_fit(table["k_h"], log_f)
    k_v = 10.0 ** _p838_fit(table["k_v"], log_f)
    a_h = _p838_fit(table["alpha_h"], log_f)
    a_v = _p838_fit(table["alpha_v"], log_f)

    geom = math.cos(math.radians(elevation_deg)) ** 2 * math.cos(2.0 * math.radians(tilt_deg))
    k = (k_h + k_v + (k_h - k_v) * geom) / 2.0
    alpha = (k_h * a_h + k_v * a_v + (k_h * a_h - k_v * a_v) * geom) / (2.0 * k)
    return k, alpha


def rain_attenuation_db_per_km(
    frequency: float,
    rain_rate: float,
    elevation_deg: float = 0.0,
    tilt_deg: float = 0.0,
) -> float:
    """Rain specific attenuation ``k R^alpha`` in dB/km."""
    if rain_rate < 0:
        raise ChannelError(f"rain rate must be >= 0, got {rain_rate}")
    k, alpha = rain_coefficients(frequency, elevation_deg, tilt_deg)
    return k * rain_rate ** alpha


# --- fog / cloud: ITU-R P.840-6 ---------------------------------------------


def fog_specific_coefficient(frequency: float, temperature: float) -> float:
    """Liquid-water specific attenuation coefficient K_l in (dB/km)/(g/m^3).

    Double-Debye permittivity of water; the recommendation covers
    frequencies up to 200 GHz and the same expressions are used beyond.
    """
    if not frequency > 0:
        raise NonPositiveInput("frequency must be > 0 GHz")
    if not temperature > 0:
        raise NonPositiveInput("temperature must be > 0 K")
    theta = 300.0 / temperature
    eps0 = 77.66 + 103.3 * (theta - 1.0)
    eps1 = 0.0671 * eps0
    eps2 = 3.52
    fp = 20.20 - 146.0 * (theta - 1.0) + 316.0 * (theta - 1.0) ** 2  # principal relaxation, GHz
    fs = 39.8 * fp  # secondary relaxation, GHz
    rp = 1.0 + (frequency / fp) ** 2
    rs = 1.0 + (frequency / fs) ** 2
    eps_im = frequency * (eps0 - eps1) / (fp * rp) + frequency * (eps1 - eps2) / (fs * rs)
    eps_re = (eps0 - eps1) / rp + (eps1 - eps2) / rs + eps2
    eta = (2.0 + eps_re) / eps_im
    return 0.819 * frequency / (eps_im * (1.0 + eta ** 2))


def fog_attenuation_db_per_km(
    frequency: float, liquid_water: float, temperature: float = T_REF
) -> FogAttenuation:
    """Fog specific attenuation ``K_l * M`` in dB/km.

    ``extrapolated`` is set when ``frequency`` lies above the model's stated
    validity limit (:data:`FOG_MODEL_MAX_GHZ`).
    """
    if liquid_water < 0:
        raise ChannelError(f"liquid water must be >= 0, got {liquid_water}")
    value = fog_specific_coefficient(frequency, temperature) * liquid_water
    return FogAttenuation(value, frequency > FOG_MODEL_MAX_GHZ)


# --- totals ------------------------------------------------------------------


def total_loss(
    frequency: float,
    distance: float,
    atmosphere: AtmosphereState,
    weather: WeatherState,
    catalog: LineCatalog,
    line_shape: str = "vvw",
) -> LossBreakdown:
    """All loss components at one frequency and path length.

    Rain and fog are taken as uniform along the path. The rain model is
    only consulted when it rains, so clear-air evaluations may go beyond
    the P.838-3 frequency range.
    """
    fspl = fspl_db(frequency, distance)
    k = absorption_coefficient(frequency, catalog, atmosphere, line_shape)
    absorption = beer_lambert_db(k, distance)
    km = distance / 1000.0
    rain = rain_attenuation_db_per_km(frequency, weather.rain_rate) * km if weather.rain_rate > 0 else 0.0
    fog = fog_attenuation_db_per_km(frequency, weather.fog_liquid_water, atmosphere.temperature)
    fog_db = fog.db_per_km * km
    return LossBreakdown(
        frequency=float(frequency),
        distance=float(distance),
        fspl_db=fspl,
        absorption_db=absorption,
        rain_db=rain,
        fog_db=fog_db,
        total_db=fspl + absorption + rain + fog_db,
        fog_extrapolated=fog.extrapolated and weather.fog_liquid_water > 0,
    )


def frequency_grid(f_lo: float, f_hi: float, step: float) -> np.ndarray:
    """``f_lo, f_lo + step, ...`` up to and including ``f_hi`` (to 1e-9 of a step)."""
    if not step > 0:
        raise ChannelError(f"step must be > 0, got {step}")
    if not f_lo <= f_hi:
        raise ChannelError(f"band edges out of order: [{f_lo}, {f_hi}]")
    n = int(math.floor((f_hi - f_lo) / step + 1e-9)) + 1
    return f_lo + step * np.arange(n)


def loss_spectrum(
    band: Sequence[float],
    step: float,
    distance: float,
    atmosphere: AtmosphereState,
    weather: WeatherState,
    catalog: LineCatalog,
    line_shape: str = "vvw",
) -> LossSpectrum:
    """:func:`total_loss` on the regular grid spanning ``band``.

    A degenerate band ``[f, f]`` yields a single point.
    """
    f_lo, f_hi = float(band[0]), float(band[1])
    grid = frequency_grid(f_lo, f_hi, step)
    points = tuple(
        total_loss(float(f), distance, atmosphere, weather, catalog, line_shape) for f in grid
    )
    return LossSpectrum(points, atmosphere, weather)


# --- spectrum analysis -------------------------------------------------------


def local_maxima(spectrum: LossSpectrum, field: str = "absorption_db") -> np.ndarray:
    """Frequencies of strict interior local maxima of one loss column."""
    y = spectrum.column(field)
    if len(y) < 3:
        return np.array([])
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] > y[2:])
    return spectrum.frequencies[1:-1][inner]


def absorption_dominance_frequency(
    spectrum: LossSpectrum, reference_frequency: float = 300.0
) -> float:
    """Lowest grid frequency above which molecular absorption dominates.

    At a grid point absorption dominates when it exceeds the growth of
    FSPL relative to ``reference_frequency`` as well as the rain and fog
    losses. Returns the first frequency from which that holds for every
    higher grid point, or ``nan`` if it fails at the top of the grid.
    """
    fspl_ref = fspl_db(reference_frequency, spectrum.distance)
    absorption = spectrum.column("absorption_db")
    dominant = (
        (absorption > spectrum.column("fspl_db") - fspl_ref)
        & (absorption > spectrum.column("rain_db"))
        & (absorption > spectrum.column("fog_db"))
    )
    freqs = spectrum.frequencies
    onset = float("nan")
    for f, ok in zip(freqs[::-1], dominant[::-1]):
        if not ok:
            break
        onset = float(f)
    return onset
