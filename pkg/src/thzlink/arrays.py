"""Small pencil-beam sub-arrays: opening angle vs element count vs rate.

The array opening angle (twice the maximum scan angle) is set equal to the
3 dB beamwidth of one element, whose gain follows the symmetric pencil-beam
approximation ``G_e = kappa / theta^2`` (theta in degrees). An ``N``-element
transmit array adds ``10 log10 N`` of combined power and ``10 log10 N`` of
coherent gain; the receiver is an identical array. Everything else is the
backhaul link budget of :mod:`thzlink.linkbudget`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import List, NamedTuple, Optional, Sequence

from .channel import AtmosphereState, WeatherState, total_loss
from .linkbudget import (
    LinkScenario,
    ModulationScheme,
    RatePoint,
    build_ladder,
    max_tolerable_loss_db,
    rate_point,
)
from .spectroscopy import LineCatalog, load_bundled_catalog

__all__ = [
    "ELEMENT_GAIN_CONSTANT",
    "AngleOutOfRange",
    "BeamGeometry",
    "SubarrayConfig",
    "SweepRow",
    "element_gain_dbi",
    "subarray_gains",
    "subarray_eirp_dbm",
    "subarray_scenario",
    "subarray_rate",
    "subarray_sweep",
    "max_angle_for_rate",
    "calibrate_element_gain_constant",
]

# Pencil-beam constant in deg^2, frozen from calibrate_element_gain_constant()
# (see scripts/calibrate_element_gain.py): 4 elements, 15 deg opening angle,
# 10 m, 0 dBm per element -> the 16-QAM threshold (24471.9, rounded up).
ELEMENT_GAIN_CONSTANT = 24480.0


class AngleOutOfRange(ValueError):
    pass


@dataclass(frozen=True)
class BeamGeometry:
    opening_angle: float  # deg

    @property
    def max_scan_angle(self) -> float:
        return self.opening_angle / 2.0

    @property
    def element_beamwidth_3db(self) -> float:
        return self.opening_angle


def element_gain_dbi(opening_angle: float, kappa: float = ELEMENT_GAIN_CONSTANT) -> float:
    """Element gain for a 3 dB beamwidth of ``opening_angle`` degrees."""
    if not 0 < opening_angle <= 180:
        raise AngleOutOfRange(f"opening angle must be in (0, 180] deg, got {opening_angle}")
    return 10.0 * math.log10(kappa / opening_angle ** 2)


@dataclass(frozen=True)
class SubarrayConfig:
    """One sub-array link.

    ``element_gain`` overrides the pencil-beam model with an explicit
    per-element gain in dBi. ``base_scenario`` supplies everything that is
    not array related; its power and antenna gains are ignored.
    """

    n_elements: int
    opening_angle: float  # deg
    per_element_power: float = 0.0  # dBm
    link_distance: float = 10.0  # m
    element_gain_constant: float = ELEMENT_GAIN_CONSTANT
    element_gain: Optional[float] = None  # dBi
    base_scenario: LinkScenario = field(default_factory=LinkScenario)

    def __post_init__(self) -> None:
        if not (isinstance(self.n_elements, int) and self.n_elements >= 1):
            raise ValueError(f"n_elements must be an integer >= 1, got {self.n_elements}")
        if not 0 < self.opening_angle <= 180:
            raise AngleOutOfRange(f"opening angle must be in (0, 180] deg, got {self.opening_angle}")
        if not self.link_distance > 0:
            raise ValueError("link distance must be > 0")
        if not self.element_gain_constant > 0:
            raise ValueError("element gain constant must be > 0")

    @property
    def geometry(self) -> BeamGeometry:
        return BeamGeometry(self.opening_angle)


def _element_gain(config: SubarrayConfig) -> float:
    if config.element_gain is not None:
        return config.element_gain
    return element_gain_dbi(config.opening_angle, config.element_gain_constant)


def subarray_gains(config: SubarrayConfig):
    """``(tx_power_dbm, tx_gain_dbi, rx_gain_dbi)`` of the array link."""
    array_db = 10.0 * math.log10(config.n_elements)
    gain = array_db + _element_gain(config)
    return config.per_element_power + array_db, gain, gain


def subarray_eirp_dbm(config: SubarrayConfig) -> float:
    power, tx_gain, _ = subarray_gains(config)
    return power + tx_gain


def subarray_scenario(config: SubarrayConfig) -> LinkScenario:
    power, tx_gain, rx_gain = subarray_gains(config)
    return config.base_scenario.with_changes(tx_power=power, tx_gain=tx_gain, rx_gain=rx_gain)


def subarray_rate(
    config: SubarrayConfig,
    atmosphere: AtmosphereState,
    catalog: LineCatalog,
    weather: Optional[WeatherState] = None,
    ladder: Optional[Sequence[ModulationScheme]] = None,
) -> RatePoint:
    scenario = subarray_scenario(config)
    loss = total_loss(
        scenario.carrier_frequency,
        config.link_distance,
        atmosphere,
        weather or WeatherState(),
        catalog,
    )
    return rate_point(scenario, loss, ladder)


class SweepRow(NamedTuple):
    n_elements: int
    opening_angle: float
    net_rate: float
    selected_order: Optional[int]
    snr: float


def subarray_sweep(
    n_list: Sequence[int],
    angle_grid: Sequence[float],
    template: SubarrayConfig,
    atmosphere: AtmosphereState,
    catalog: LineCatalog,
    weather: Optional[WeatherState] = None,
) -> List[SweepRow]:
    """Rate over the element-count x opening-angle grid.

    Rows are ordered by element count (outer, as given) and ascending angle.
    """
    if not n_list or not angle_grid:
        raise ValueError("element and angle grids must be nonempty")
    ladder = build_ladder(template.base_scenario.target_ber)
    rows = []
    for n in n_list:
        for theta in sorted(angle_grid):
            config = replace(template, n_elements=int(n), opening_angle=float(theta))
            point = subarray_rate(config, atmosphere, catalog, weather, ladder)
            rows.append(SweepRow(int(n), float(theta), point.net_rate, point.selected_order, point.snr))
    return rows


def max_angle_for_rate(rows: Sequence[SweepRow], n_elements: int, rate: float) -> Optional[float]:
    """Widest opening angle in a sweep that still sustains ``rate`` Gbps."""
    ok = [r.opening_angle for r in rows if r.n_elements == n_elements and r.net_rate >= rate]
    return max(ok) if ok else None


def calibrate_element_gain_constant(
    n_elements: int = 4,
    opening_angle: float = 15.0,
    link_distance: float = 10.0,
    per_element_power: float = 0.0,
    qam_order: int = 16,
    atmosphere: Optional[AtmosphereState] = None,
    catalog: Optional[LineCatalog] = None,
    base_scenario: Optional[LinkScenario] = None,
) -> float:
    """Pencil-beam constant that puts ``opening_angle`` exactly at the
    ``qam_order`` threshold for the given array size and distance."""
    atmosphere = atmosphere or AtmosphereState()
    catalog = catalog if catalog is not None else load_bundled_catalog()
    scenario = base_scenario or LinkScenario()
    ladder = {s.order: s for s in build_ladder(scenario.target_ber)}
    loss = total_loss(scenario.carrier_frequency, link_distance, atmosphere, WeatherState(), catalog)

    array_db = 10.0 * math.log10(n_elements)
    bare = scenario.with_changes(
        tx_power=per_element_power + array_db, tx_gain=array_db, rx_gain=array_db
    )
    # two element gains must bridge the remaining gap to the threshold
    needed = loss.total_db - max_tolerable_loss_db(bare, ladder[qam_order].required_snr)
    element_db = needed / 2.0
    return opening_angle ** 2 * 10.0 ** (element_db / 10.0)
