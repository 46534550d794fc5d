import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from simris.errors import BelowReferenceDistance, DegenerateGeometry, FarFieldWarning, NotSquare
from simris.geometry import AnglePair
from simris.propagation import (
    PATH_LOSS_PROFILES,
    ElementPattern,
    PathLossParams,
    RisPanel,
    array_response,
    element_gain,
    los_indicator,
    los_probability,
    path_loss,
    path_loss_db,
    radar_path_gains,
    wavelength,
    wavenumber,
)


def test_default_pattern_boresight_is_pi():
    assert ElementPattern().boresight_gain == pytest.approx(np.pi, abs=1e-15)
    assert element_gain(ElementPattern(), 0.0) == pytest.approx(np.pi)


@pytest.mark.parametrize("q", [0.1, 0.285, 1.0, 2.0])
def test_pattern_hemisphere_integral(q):
    p = ElementPattern(q)
    val, _ = integrate.quad(lambda t: element_gain(p, t) * np.sin(t), 0, np.pi / 2, epsabs=0, epsrel=1e-12)
    # the pattern depends on the polar angle only
    assert 2 * np.pi * val == pytest.approx(4 * np.pi, rel=1e-9)


def test_pattern_zero_behind():
    assert element_gain(ElementPattern(), np.pi / 2) == 0.0
    assert element_gain(ElementPattern(), -2.0) == 0.0
    with pytest.raises(ValueError):
        ElementPattern(-0.5)


def test_path_loss_hand_value():
    # -20 log10(4 pi f / c) - 17.3 at 10 m
    assert path_loss_db(PATH_LOSS_PROFILES["InH-LOS"], 28e9, 10.0) == pytest.approx(-78.69, abs=0.01)


def test_path_loss_frequency_dependent_exponent():
    p = PATH_LOSS_PROFILES["InH-NLOS"]
    assert p.effective_exponent(24.2e9) == pytest.approx(3.19)
    assert p.effective_exponent(73e9) == pytest.approx(3.19 * (1 + 0.06 * (73 - 24.2) / 24.2))


def test_path_loss_shadow_and_linear():
    p = PATH_LOSS_PROFILES["UMi-LOS"]
    assert path_loss_db(p, 28e9, 20.0, 5.0) == pytest.approx(path_loss_db(p, 28e9, 20.0) - 5.0)
    assert path_loss(p, 28e9, 20.0) == pytest.approx(10 ** (path_loss_db(p, 28e9, 20.0) / 10))


def test_path_loss_reference_distance():
    with pytest.raises(BelowReferenceDistance):
        path_loss_db(PATH_LOSS_PROFILES["InH-LOS"], 28e9, 0.5)
    assert path_loss_db(PATH_LOSS_PROFILES["InH-LOS"], 28e9, 1.0) == pytest.approx(
        -20 * np.log10(4 * np.pi / wavelength(28e9)))


@settings(max_examples=100, deadline=None)
@given(d1=st.floats(1.0, 1e3), d2=st.floats(1.0, 1e3))
def test_path_loss_monotone(d1, d2):
    p = PATH_LOSS_PROFILES["InH-NLOS"]
    a, b = path_loss_db(p, 28e9, d1), path_loss_db(p, 28e9, d2)
    assert (a - b) * (d1 - d2) <= 1e-9


def test_path_loss_params_validation():
    with pytest.raises(ValueError):
        PathLossParams(n=0, sigma_db=1)
    with pytest.raises(ValueError):
        PathLossParams(n=2, sigma_db=-1)


def test_los_probability_branches():
    assert los_probability("InH", 1.0) == 1.0
    assert los_probability("InH", 6.5) == pytest.approx(np.exp(-5.3 / 4.7), abs=1e-15)
    assert los_probability("InH", 100.0) == pytest.approx(0.32 * np.exp(-93.5 / 32.6), abs=1e-15)
    assert los_probability("UMi", 10.0) == 1.0
    e = np.exp(-1.0)
    assert los_probability("UMi", 39.0) == pytest.approx(20 / 39 * (1 - e) + e, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(d=st.floats(0.01, 1e4), env=st.sampled_from(["InH", "UMi"]))
def test_los_probability_is_probability(d, env):
    assert 0.0 <= los_probability(env, d) <= 1.0


def test_los_indicator_forced_indoors():
    rng = np.random.default_rng(0)
    assert np.all(los_indicator("InH", 100.0, True, rng, size=100) == 1)
    # outdoors the height rule does not apply
    flags = los_indicator("UMi", 1000.0, True, rng, size=10_000)
    assert flags.mean() < 0.1


def test_array_response_first_entry_and_modulus():
    a = array_response(64, AnglePair(0.3, -0.2), wavenumber(28e9))
    assert a.shape == (64,) and a[0] == 1
    assert np.allclose(np.abs(a), 1)


def test_array_response_phase_structure():
    k = wavenumber(28e9)
    d = np.pi / k
    phi, theta = 0.4, 0.25
    a = array_response(16, AnglePair(phi, theta), k)
    # element (x=1, y=0) and (x=0, y=1)
    assert np.angle(a[1]) == pytest.approx(np.angle(np.exp(1j * k * d * np.sin(theta))))
    assert np.angle(a[4]) == pytest.approx(np.angle(np.exp(1j * k * d * np.sin(phi) * np.cos(theta))))


def test_array_response_broadcast():
    a = array_response(16, AnglePair(np.zeros(7), np.zeros(7)), 1.0)
    assert a.shape == (7, 16) and np.allclose(a, 1)


def test_panel_validation():
    with pytest.raises(NotSquare):
        RisPanel(200)
    with pytest.raises(NotSquare):
        array_response(8, AnglePair(0, 0), 1.0)
    p = RisPanel(64, (1, 2, 3))
    assert p.side == 8 and p.element_spacing(28e9) == pytest.approx(wavelength(28e9) / 2)


def test_far_field_warning():
    p = RisPanel(1024, (0, 0, 0))
    with pytest.warns(FarFieldWarning):
        assert not p.check_far_field(1.0, 28e9)
    assert p.check_far_field(100.0, 28e9)


def test_radar_gains():
    lam = wavelength(28e9)
    l_ris, l_los = radar_path_gains(10.0, 5.0, 12.0, 2.0, np.pi, lam)
    assert l_los == pytest.approx(np.pi * lam**2 / (4 * np.pi * 12) ** 2)
    assert l_ris == pytest.approx(np.pi * lam**2 * 2 / ((4 * np.pi) ** 3 * 100 * 25))
    with pytest.raises(DegenerateGeometry):
        radar_path_gains(0.0, 1, 1, 1, 1, lam)
