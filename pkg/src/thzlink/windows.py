"""Low-absorption transmission windows and distance-aware band plans."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .channel import AtmosphereState, LossSpectrum, WeatherState, frequency_grid, total_loss
from .linkbudget import LinkScenario, build_ladder, max_tolerable_loss_db
from .spectroscopy import LineCatalog

__all__ = [
    "DEFAULT_THRESHOLD_DB_PER_KM",
    "WindowError",
    "EmptySpectrum",
    "InsufficientWindow",
    "Strategy",
    "TransmissionWindow",
    "BandPlan",
    "UsableBand",
    "absorption_db_per_km",
    "find_windows",
    "usable_bandwidth",
    "select_band",
]

DEFAULT_THRESHOLD_DB_PER_KM = 10.0

SubBand = Tuple[float, float]


class WindowError(ValueError):
    pass


class EmptySpectrum(WindowError):
    pass


class InsufficientWindow(WindowError):
    pass


class Strategy(str, enum.Enum):
    WHOLE_WINDOW = "whole-window"
    CENTER = "center"
    EDGES = "edges"


@dataclass(frozen=True)
class TransmissionWindow:
    f_lo: float
    f_hi: float
    min_absorption_db_per_km: float
    max_absorption_db_per_km: float

    def __post_init__(self) -> None:
        if not self.f_lo < self.f_hi:
            raise WindowError(f"window edges out of order: [{self.f_lo}, {self.f_hi}]")

    @property
    def width(self) -> float:
        return self.f_hi - self.f_lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.f_lo + self.f_hi)

    def contains(self, band: SubBand, tol: float = 1e-9) -> bool:
        return self.f_lo - tol <= band[0] <= band[1] <= self.f_hi + tol


@dataclass(frozen=True)
class BandPlan:
    strategy: Strategy
    sub_bands: Tuple[SubBand, ...]
    window: TransmissionWindow
    target_distance: Optional[float] = None

    def __post_init__(self) -> None:
        if not all(self.window.contains(b) for b in self.sub_bands):
            raise WindowError("sub-bands must lie within the parent window")
        if self.strategy is Strategy.EDGES and len(self.sub_bands) != 2:
            raise WindowError("the edges strategy yields exactly two sub-bands")

    @property
    def total_bandwidth(self) -> float:
        return sum(hi - lo for lo, hi in self.sub_bands)


class UsableBand(NamedTuple):
    width: float
    sub_band: Optional[SubBand]


def absorption_db_per_km(spectrum: LossSpectrum) -> np.ndarray:
    return spectrum.column("absorption_db") * (1000.0 / spectrum.distance)


def _runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Inclusive index ranges of consecutive True values."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def find_windows(
    spectrum: LossSpectrum, threshold: float = DEFAULT_THRESHOLD_DB_PER_KM
) -> List[TransmissionWindow]:
    """Maximal grid intervals whose absorption stays below ``threshold`` dB/km.

    Edges sit on grid points (no interpolation). A run of a single grid
    point has zero width and is not reported.
    """
    if len(spectrum) == 0:
        raise EmptySpectrum("spectrum has no points")
    if not threshold > 0:
        raise WindowError(f"threshold must be > 0, got {threshold}")
    per_km = absorption_db_per_km(spectrum)
    freqs = spectrum.frequencies
    windows = []
    for i, j in _runs(per_km < threshold):
        if j == i:
            continue
        seg = per_km[i : j + 1]
        windows.append(TransmissionWindow(float(freqs[i]), float(freqs[j]), float(seg.min()), float(seg.max())))
    return windows


def usable_bandwidth(
    window: TransmissionWindow,
    scenario: LinkScenario,
    distance: float,
    atmosphere: AtmosphereState,
    catalog: LineCatalog,
    weather: Optional[WeatherState] = None,
    step: float = 1.0,
) -> UsableBand:
    """Widest sub-band of ``window`` over which the lowest QAM rung closes.

    The window is sampled every ``step`` GHz; a frequency is usable when its
    total loss at ``distance`` does not exceed the loss the scenario can
    tolerate at the lowest rung's SNR. Returns ``UsableBand(0.0, None)``
    when no frequency is usable.
    """
    if not distance > 0:
        raise WindowError(f"distance must be > 0, got {distance}")
    weather = weather or WeatherState()
    lowest = build_ladder(scenario.target_ber)[0]
    budget = max_tolerable_loss_db(scenario, lowest.required_snr)

    grid = frequency_grid(window.f_lo, window.f_hi, step)
    if grid[-1] < window.f_hi - 1e-9 * step:
        grid = np.append(grid, window.f_hi)
    feasible = np.array(
        [total_loss(float(f), distance, atmosphere, weather, catalog).total_db <= budget for f in grid]
    )
    best = None
    for i, j in _runs(feasible):
        if best is None or grid[j] - grid[i] > grid[best[1]] - grid[best[0]]:
            best = (i, j)
    if best is None:
        return UsableBand(0.0, None)
    lo, hi = float(grid[best[0]]), float(grid[best[1]])
    return UsableBand(hi - lo, (lo, hi))


def select_band(
    strategy,
    window: TransmissionWindow,
    required_bandwidth: float = 0.0,
    target_distance: Optional[float] = None,
) -> BandPlan:
    """Place a sub-band of ``required_bandwidth`` GHz in ``window``.

    ``whole-window`` takes the entire window, ``center`` a band centred on
    the window midpoint and ``edges`` two halves abutting the window edges.
    """
    strategy = Strategy(strategy)
    if strategy is Strategy.WHOLE_WINDOW:
        bands = ((window.f_lo, window.f_hi),)
    else:
        if not required_bandwidth > 0:
            raise WindowError(f"required bandwidth must be > 0, got {required_bandwidth}")
        # f_hi - f_lo can come out an ulp short of the requested width
        if required_bandwidth > window.width * (1.0 + 1e-12):
            raise InsufficientWindow(
                f"{required_bandwidth} GHz requested, window [{window.f_lo}, {window.f_hi}] "
                f"is {window.width} GHz wide"
            )
        half = required_bandwidth / 2.0
        if strategy is Strategy.CENTER:
            bands = ((max(window.f_lo, window.midpoint - half), min(window.f_hi, window.midpoint + half)),)
        else:
            bands = ((window.f_lo, min(window.f_hi, window.f_lo + half)), (max(window.f_lo, window.f_hi - half), window.f_hi))
    return BandPlan(strategy, bands, window, target_distance)
