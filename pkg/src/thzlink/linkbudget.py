"""Link budget, adaptive QAM selection and net data rates.

The receive SNR is a plain dB chain::

    snr = P_tx + G_tx + G_rx - L_total - N - margin
    N   = -174 dBm/Hz + NF + 10 log10(B)

The highest QAM order whose required SNR at the FEC BER threshold is met
is selected from a ladder capped at ``max_qam_order``; the net rate is
``symbol_rate * log2(M) * code_rate * polarizations``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, List, Optional, Sequence, Tuple

from .channel import AtmosphereState, LossBreakdown, SPEED_OF_LIGHT, WeatherState, total_loss
from .spectroscopy import LineCatalog

__all__ = [
    "THERMAL_NOISE_DBM_HZ",
    "DEFAULT_LADDER_ORDERS",
    "LinkBudgetError",
    "InconsistentFrequency",
    "NoSolution",
    "EmptyLadder",
    "LinkScenario",
    "ModulationScheme",
    "RatePoint",
    "antenna_gain_from_aperture",
    "noise_power_dbm",
    "snr_db",
    "max_tolerable_loss_db",
    "qam_ber",
    "required_snr_for_ber",
    "build_ladder",
    "max_modulation",
    "net_rate",
    "rate_point",
    "rate_vs_distance",
]

THERMAL_NOISE_DBM_HZ = -174.0
DEFAULT_LADDER_ORDERS = (4, 8, 16, 32, 64, 128)


class LinkBudgetError(ValueError):
    pass


class InconsistentFrequency(LinkBudgetError):
    pass


class NoSolution(LinkBudgetError):
    """Target BER cannot be reached by any SNR."""


class EmptyLadder(LinkBudgetError):
    pass


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def antenna_gain_from_aperture(diameter: float, efficiency: float, frequency: float) -> float:
    """Gain in dBi of a circular aperture: 10 log10(eta (pi D f / c)^2).

    ``diameter`` in m, ``frequency`` in GHz.
    """
    if not diameter > 0 or not frequency > 0:
        raise LinkBudgetError("diameter and frequency must be > 0")
    if not 0 < efficiency <= 1:
        raise LinkBudgetError(f"aperture efficiency must be in (0, 1], got {efficiency}")
    x = math.pi * diameter * frequency * 1e9 / SPEED_OF_LIGHT
    return 10.0 * math.log10(efficiency * x * x)


def noise_power_dbm(bandwidth: float, noise_figure: float) -> float:
    """Receiver noise power in dBm for ``bandwidth`` in GHz."""
    if not bandwidth > 0:
        raise LinkBudgetError(f"bandwidth must be > 0, got {bandwidth}")
    return THERMAL_NOISE_DBM_HZ + noise_figure + 10.0 * math.log10(bandwidth * 1e9)


@dataclass(frozen=True)
class LinkScenario:
    """Transmit/receive parameter set of a point-to-point link.

    The defaults describe the 300 GHz backhaul link: 64 GBd, 0 dBm linear
    transmit power, 55 dBi at both ends, NF 10 dB, FEC threshold
    BER 2e-2, QAM capped at 128. ``noise_bandwidth`` defaults to the symbol
    rate. ``code_rate`` 0.893 makes 64 GBd dual-polarization 128-QAM come
    out at 800 Gbps.
    """

    carrier_frequency: float = 300.0  # GHz
    symbol_rate: float = 64.0  # GBd
    noise_bandwidth: Optional[float] = None  # GHz
    tx_power: float = 0.0  # dBm
    tx_gain: float = 55.0  # dBi
    rx_gain: float = 55.0  # dBi
    noise_figure: float = 10.0  # dB
    implementation_margin: float = 0.0  # dB
    code_rate: float = 0.893
    polarizations: int = 1
    max_qam_order: int = 128
    target_ber: float = 2e-2

    def __post_init__(self) -> None:
        if self.noise_bandwidth is None:
            object.__setattr__(self, "noise_bandwidth", self.symbol_rate)
        if not self.carrier_frequency > 0:
            raise LinkBudgetError("carrier frequency must be > 0")
        if not self.symbol_rate > 0:
            raise LinkBudgetError("symbol rate must be > 0")
        if not self.noise_bandwidth >= self.symbol_rate:
            raise LinkBudgetError("noise bandwidth must be >= symbol rate")
        if not self.implementation_margin >= 0:
            raise LinkBudgetError("implementation margin must be >= 0")
        if not 0 < self.code_rate <= 1:
            raise LinkBudgetError("code rate must be in (0, 1]")
        if self.polarizations not in (1, 2):
            raise LinkBudgetError("polarizations must be 1 or 2")
        if not (_is_power_of_two(self.max_qam_order) and self.max_qam_order >= 4):
            raise LinkBudgetError("max QAM order must be a power of two >= 4")
        if not 0 < self.target_ber < 0.5:
            raise LinkBudgetError("target BER must be in (0, 0.5)")

    @classmethod
    def from_aperture(cls, diameter: float, efficiency: float, **kwargs) -> "LinkScenario":
        """Scenario whose both antennas are circular apertures of the given size."""
        f = kwargs.get("carrier_frequency", cls.carrier_frequency)
        gain = antenna_gain_from_aperture(diameter, efficiency, f)
        return cls(tx_gain=gain, rx_gain=gain, **kwargs)

    @property
    def noise_power(self) -> float:
        return noise_power_dbm(self.noise_bandwidth, self.noise_figure)

    def with_changes(self, **changes) -> "LinkScenario":
        return replace(self, **changes)


@dataclass(frozen=True)
class ModulationScheme:
    order: int
    required_snr: float  # dB

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.order))

    @property
    def is_cross(self) -> bool:
        return self.bits_per_symbol % 2 == 1


@dataclass(frozen=True)
class RatePoint:
    distance: float
    snr: float
    selected_order: Optional[int]
    net_rate: float  # Gbps
    loss: Optional[LossBreakdown] = field(default=None, compare=False, repr=False)


def snr_db(scenario: LinkScenario, loss: LossBreakdown) -> float:
    """Receive SNR in dB for the given channel loss."""
    if not math.isclose(loss.frequency, scenario.carrier_frequency, rel_tol=1e-9, abs_tol=1e-9):
        raise InconsistentFrequency(
            f"loss evaluated at {loss.frequency} GHz, carrier is {scenario.carrier_frequency} GHz"
        )
    return (
        scenario.tx_power
        + scenario.tx_gain
        + scenario.rx_gain
        - loss.total_db
        - scenario.noise_power
        - scenario.implementation_margin
    )


def max_tolerable_loss_db(scenario: LinkScenario, required_snr: float) -> float:
    """Largest total path loss at which the SNR still reaches ``required_snr``."""
    return (
        scenario.tx_power
        + scenario.tx_gain
        + scenario.rx_gain
        - scenario.noise_power
        - scenario.implementation_margin
        - required_snr
    )


def _q(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def qam_ber(order: int, snr: float) -> float:
    """Approximate Gray-coded M-QAM bit error rate on AWGN at ``snr`` dB.

    Square constellations use ``(4/k)(1 - 1/sqrt(M)) Q(sqrt(3 g/(M-1)))``;
    odd-bit (cross) constellations use ``(4/k)(1 - 1/sqrt(2M))
    Q(sqrt(3 g/(31M/32 - 1)))``, with ``k = log2 M`` and ``g`` the linear
    SNR per symbol.
    """
    if not (_is_power_of_two(order) and order >= 4):
        raise LinkBudgetError(f"QAM order must be a power of two >= 4, got {order}")
    k = math.log2(order)
    g = 10.0 ** (snr / 10.0)
    if int(k) % 2 == 0:
        coeff = 1.0 - 1.0 / math.sqrt(order)
        energy = order - 1.0
    else:
        coeff = 1.0 - 1.0 / math.sqrt(2.0 * order)
        energy = 31.0 * order / 32.0 - 1.0
    return 4.0 / k * coeff * _q(math.sqrt(3.0 * g / energy))


def required_snr_for_ber(
    order: int,
    target_ber: float,
    tolerance: float = 0.01,
    bracket: Tuple[float, float] = (-30.0, 80.0),
) -> float:
    """SNR in dB at which :func:`qam_ber` equals ``target_ber``.

    Bisection on the monotone BER curve until the bracket is narrower than
    ``tolerance`` dB; returns the upper end so the target is met.
    """
    if not 0 < target_ber < 0.5:
        raise LinkBudgetError(f"target BER must be in (0, 0.5), got {target_ber}")
    lo, hi = bracket
    if qam_ber(order, lo) <= target_ber:
        raise NoSolution(f"BER {target_ber} is not below the {order}-QAM error rate at {lo} dB")
    if qam_ber(order, hi) > target_ber:
        raise NoSolution(f"BER {target_ber} not reached by {order}-QAM below {hi} dB")
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if qam_ber(order, mid) > target_ber:
            lo = mid
        else:
            hi = mid
    return hi


def build_ladder(
    target_ber: float = 2e-2,
    orders: Iterable[int] = DEFAULT_LADDER_ORDERS,
    tolerance: float = 0.001,
) -> List[ModulationScheme]:
    """QAM rungs sorted by order, each with its SNR requirement."""
    ladder = [
        ModulationScheme(m, required_snr_for_ber(m, target_ber, tolerance)) for m in sorted(orders)
    ]
    for lower, upper in zip(ladder, ladder[1:]):
        if not lower.required_snr < upper.required_snr:
            raise LinkBudgetError(
                f"ladder not monotone: {lower.order}-QAM needs {lower.required_snr:.2f} dB, "
                f"{upper.order}-QAM {upper.required_snr:.2f} dB"
            )
    return ladder


def max_modulation(
    snr: float, ladder: Sequence[ModulationScheme], cap: Optional[int] = None
) -> Optional[ModulationScheme]:
    """Highest rung with ``required_snr <= snr`` and ``order <= cap``.

    Returns ``None`` when even the lowest rung fails (outage).
    """
    if not ladder:
        raise EmptyLadder("modulation ladder is empty")
    orders = [s.order for s in ladder]
    if orders != sorted(orders):
        raise LinkBudgetError("ladder must be sorted by order")
    best = None
    for scheme in ladder:
        if cap is not None and scheme.order > cap:
            break
        if scheme.required_snr <= snr:
            best = scheme
    return best


def net_rate(scheme: Optional[ModulationScheme], scenario: LinkScenario) -> float:
    """Net data rate in Gbps; 0 for an outage (``scheme is None``)."""
    if scheme is None:
        return 0.0
    return scenario.symbol_rate * scheme.bits_per_symbol * scenario.code_rate * scenario.polarizations


def rate_point(
    scenario: LinkScenario,
    loss: LossBreakdown,
    ladder: Optional[Sequence[ModulationScheme]] = None,
) -> RatePoint:
    if ladder is None:
        ladder = build_ladder(scenario.target_ber)
    snr = snr_db(scenario, loss)
    scheme = max_modulation(snr, ladder, scenario.max_qam_order)
    return RatePoint(
        distance=loss.distance,
        snr=snr,
        selected_order=None if scheme is None else scheme.order,
        net_rate=net_rate(scheme, scenario),
        loss=loss,
    )


def rate_vs_distance(
    scenario: LinkScenario,
    distances: Sequence[float],
    atmosphere: AtmosphereState,
    weather: WeatherState,
    catalog: LineCatalog,
    ladder: Optional[Sequence[ModulationScheme]] = None,
) -> List[RatePoint]:
    """Net rate at each distance (m); distances must be positive and ascending."""
    distances = [float(d) for d in distances]
    if any(d <= 0 for d in distances):
        raise LinkBudgetError("distances must be > 0")
    if any(a > b for a, b in zip(distances, distances[1:])):
        raise LinkBudgetError("distances must be ascending")
    if ladder is None:
        ladder = build_ladder(scenario.target_ber)
    return [
        rate_point(
            scenario,
            total_loss(scenario.carrier_frequency, d, atmosphere, weather, catalog),
            ladder,
        )
        for d in distances
    ]
