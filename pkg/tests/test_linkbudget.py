import math
from statistics import NormalDist

import pytest
from hypothesis import given, settings, strategies as st

from thzlink.channel import AtmosphereState, LossBreakdown, WeatherState, total_loss
from thzlink.linkbudget import (
    EmptyLadder,
    InconsistentFrequency,
    LinkBudgetError,
    LinkScenario,
    ModulationScheme,
    NoSolution,
    antenna_gain_from_aperture,
    build_ladder,
    max_modulation,
    max_tolerable_loss_db,
    net_rate,
    noise_power_dbm,
    qam_ber,
    rate_point,
    rate_vs_distance,
    required_snr_for_ber,
    snr_db,
)

ORDERS = (4, 8, 16, 32, 64, 128)


def oracle_required_snr(order, ber):
    """Closed-form inversion of the Gray-coded QAM approximation via the
    inverse normal CDF (no bisection, no erfc)."""
    k = math.log2(order)
    if int(k) % 2 == 0:
        coeff, energy = 1 - 1 / math.sqrt(order), order - 1
    else:
        coeff, energy = 1 - 1 / math.sqrt(2 * order), 31 * order / 32 - 1
    x = -NormalDist().inv_cdf(ber * k / (4 * coeff))
    return 10 * math.log10(x * x * energy / 3)


def _loss(total, f=300.0, d=1000.0):
    return LossBreakdown(f, d, total, 0.0, 0.0, 0.0, total)


# --- closed forms ------------------------------------------------------------


def test_aperture_gain():
    assert antenna_gain_from_aperture(0.225, 0.8, 300.0) == pytest.approx(56.0236, abs=1e-4)
    d_unity = 299792458.0 / (math.pi * 300e9)
    assert antenna_gain_from_aperture(d_unity, 1.0, 300.0) == pytest.approx(0.0, abs=1e-12)
    assert antenna_gain_from_aperture(0.45, 0.8, 300.0) - antenna_gain_from_aperture(0.225, 0.8, 300.0) == pytest.approx(6.0206, abs=1e-4)
    with pytest.raises(LinkBudgetError):
        antenna_gain_from_aperture(0.225, 1.2, 300.0)


def test_noise_power():
    assert noise_power_dbm(1e-9, 0.0) == pytest.approx(-174.0, abs=1e-12)
    assert noise_power_dbm(64.0, 10.0) == pytest.approx(-55.9382, abs=1e-4)
    assert noise_power_dbm(64.0, 13.0) - noise_power_dbm(64.0, 10.0) == pytest.approx(3.0)


def test_snr_zero_case():
    # noise 0 dBm: -174 + NF + 10 log10(64e9) = 0
    nf = 174.0 - 10 * math.log10(64e9)
    sc = LinkScenario(tx_power=0, tx_gain=0, rx_gain=0, noise_figure=nf)
    assert snr_db(sc, _loss(0.0)) == pytest.approx(0.0, abs=1e-12)


def test_snr_backhaul_defaults(catalog):
    sc = LinkScenario()
    loss = total_loss(300.0, 1000.0, AtmosphereState(), WeatherState(), catalog)
    # hand chain: 0 + 55 + 55 - loss - (-174 + 10 + 10 log10 64e9)
    by_hand = 110.0 - loss.total_db - (-164.0 + 10 * math.log10(64e9))
    assert snr_db(sc, loss) == pytest.approx(by_hand, abs=1e-12)
    assert snr_db(sc, loss) == pytest.approx(20.0, abs=1.5)


def test_frequency_mismatch():
    with pytest.raises(InconsistentFrequency):
        snr_db(LinkScenario(), _loss(100.0, f=310.0))


@settings(max_examples=100, deadline=None)
@given(
    p=st.floats(-20, 30), gt=st.floats(0, 60), gr=st.floats(0, 60), total=st.floats(50, 250), h=st.floats(0.1, 10)
)
def test_snr_affine(p, gt, gr, total, h):
    sc = LinkScenario(tx_power=p, tx_gain=gt, rx_gain=gr)
    base = snr_db(sc, _loss(total))
    for field in ("tx_power", "tx_gain", "rx_gain"):
        bumped = sc.with_changes(**{field: getattr(sc, field) + h})
        assert (snr_db(bumped, _loss(total)) - base) / h == pytest.approx(1.0, abs=1e-9)
    assert (snr_db(sc, _loss(total + h)) - base) / h == pytest.approx(-1.0, abs=1e-9)


def test_tx_power_plus_ten():
    sc = LinkScenario()
    assert snr_db(sc.with_changes(tx_power=10.0), _loss(150.0)) - snr_db(sc, _loss(150.0)) == pytest.approx(10.0)


def test_max_tolerable_loss_consistent():
    sc = LinkScenario()
    budget = max_tolerable_loss_db(sc, 12.0)
    assert snr_db(sc, _loss(budget)) == pytest.approx(12.0, abs=1e-12)


def test_scenario_validation():
    for bad in [dict(code_rate=0), dict(polarizations=3), dict(max_qam_order=100), dict(target_ber=0.6),
                dict(noise_bandwidth=32.0), dict(symbol_rate=0)]:
        with pytest.raises(LinkBudgetError):
            LinkScenario(**bad)
    assert LinkScenario().noise_bandwidth == 64.0


def test_from_aperture():
    sc = LinkScenario.from_aperture(0.225, 0.8)
    assert sc.tx_gain == sc.rx_gain == pytest.approx(56.0236, abs=1e-4)


# --- BER and ladder ----------------------------------------------------------


def test_qam4_is_q_of_sqrt_snr():
    for snr in (0.0, 5.0, 10.0):
        g = 10 ** (snr / 10)
        assert qam_ber(4, snr) == pytest.approx(1 - NormalDist().cdf(math.sqrt(g)), rel=1e-9)


@pytest.mark.parametrize("order", ORDERS)
def test_required_snr_against_oracle(order):
    got = required_snr_for_ber(order, 2e-2, tolerance=1e-4)
    want = oracle_required_snr(order, 2e-2)
    assert want <= got <= want + 1e-4 + 1e-9


def test_required_snr_qam4_value():
    assert required_snr_for_ber(4, 2e-2) == pytest.approx(6.25, abs=0.05)


@settings(max_examples=100, deadline=None)
@given(order=st.sampled_from(ORDERS), ber=st.floats(1e-6, 0.05))
def test_inversion_round_trip(order, ber):
    snr = required_snr_for_ber(order, ber)
    assert qam_ber(order, snr) == pytest.approx(ber, rel=0.02)
    assert qam_ber(order, snr) <= ber


def test_required_snr_errors():
    with pytest.raises(LinkBudgetError):
        required_snr_for_ber(16, 0.7)
    with pytest.raises(NoSolution):
        required_snr_for_ber(128, 1e-300, bracket=(0.0, 20.0))
    with pytest.raises(LinkBudgetError):
        qam_ber(6, 10.0)


def test_ladder():
    ladder = build_ladder(2e-2)
    assert [s.order for s in ladder] == list(ORDERS)
    snrs = [s.required_snr for s in ladder]
    assert all(a < b for a, b in zip(snrs, snrs[1:]))
    assert ladder[2].required_snr < ladder[4].required_snr  # 16 < 64
    expected = [6.252, 9.773, 12.711, 15.585, 18.430, 21.149]
    assert snrs == pytest.approx(expected, abs=0.002)
    assert [s.is_cross for s in ladder] == [False, True, False, True, False, True]


def test_max_modulation_rules():
    ladder = build_ladder()
    assert max_modulation(ladder[0].required_snr - 0.01, ladder) is None
    assert max_modulation(100.0, ladder, cap=128).order == 128
    assert max_modulation(100.0, ladder, cap=32).order == 32
    for s in ladder:
        assert max_modulation(s.required_snr, ladder) == s  # ties admit
    with pytest.raises(EmptyLadder):
        max_modulation(10.0, [])


@settings(max_examples=200, deadline=None)
@given(snr=st.floats(-10, 40), offset=st.floats(-50, 50))
def test_selection_offset_invariance(snr, offset):
    ladder = [ModulationScheme(m, s) for m, s in zip(ORDERS, (6.0, 9.5, 12.5, 15.5, 18.5, 21.0))]
    shifted = [ModulationScheme(s.order, s.required_snr + offset) for s in ladder]
    a = max_modulation(snr, ladder)
    b = max_modulation(snr + offset, shifted)
    # offsets can perturb exact ties by one ulp; skip those
    if any(abs(snr - s.required_snr) < 1e-9 for s in ladder):
        return
    assert (a and a.order) == (b and b.order)


def test_net_rate():
    sc = LinkScenario(code_rate=1.0)
    assert net_rate(ModulationScheme(64, 18.0), sc) == pytest.approx(384.0)
    dual = LinkScenario(polarizations=2)
    assert net_rate(ModulationScheme(128, 21.0), dual) == pytest.approx(800.0, rel=0.02)
    assert net_rate(ModulationScheme(128, 21.0), LinkScenario()) == pytest.approx(
        net_rate(ModulationScheme(128, 21.0), dual) / 2, rel=1e-15
    )
    assert net_rate(None, sc) == 0.0


# --- rate vs distance --------------------------------------------------------


def test_rate_vs_distance_backhaul(catalog):
    sc = LinkScenario()
    pts = rate_vs_distance(sc, [1.0, 1000.0, 3000.0, 50000.0], AtmosphereState(), WeatherState(), catalog)
    assert pts[0].selected_order == 128
    assert 240 <= pts[1].net_rate <= 360
    assert pts[-1].selected_order is None and pts[-1].net_rate == 0.0
    assert pts[1].loss is not None and pts[1].loss.distance == 1000.0


def test_rate_vs_distance_steps(catalog):
    sc = LinkScenario()
    distances = [10.0 * 1.25 ** i for i in range(40)]
    pts = rate_vs_distance(sc, distances, AtmosphereState(), WeatherState(), catalog)
    rates = [p.net_rate for p in pts]
    assert all(a >= b for a, b in zip(rates, rates[1:]))
    unit = sc.symbol_rate * sc.code_rate * sc.polarizations
    bits = [0 if p.selected_order is None else math.log2(p.selected_order) for p in pts]
    for r, b in zip(rates, bits):
        assert r == pytest.approx(unit * b)


def test_rate_vs_distance_validation(catalog):
    with pytest.raises(LinkBudgetError):
        rate_vs_distance(LinkScenario(), [10.0, 5.0], AtmosphereState(), WeatherState(), catalog)
    with pytest.raises(LinkBudgetError):
        rate_vs_distance(LinkScenario(), [0.0], AtmosphereState(), WeatherState(), catalog)


def test_rate_point_ladder_default(catalog):
    loss = total_loss(300.0, 1000.0, AtmosphereState(), WeatherState(), catalog)
    assert rate_point(LinkScenario(), loss) == rate_point(LinkScenario(), loss, build_ladder())
