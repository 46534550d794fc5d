import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from simris.errors import DimensionMismatch
from simris.ris import (
    PhaseMode,
    RisPhaseConfig,
    apply_phase_mode,
    compose,
    optimal_phases,
    perturb_phases,
    quantize_phases,
)

cplx = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 16), data=st.data())
def test_optimal_phases_reach_bound(n, data):
    h = data.draw(arrays(complex, n, elements=cplx))
    g = data.draw(arrays(complex, n, elements=cplx))
    hs = data.draw(cplx)
    cfg = optimal_phases(h, g, hs)
    got = abs(compose(h, g, cfg, hs))
    bound = np.sum(np.abs(g * h)) + abs(hs)
    assert got == pytest.approx(bound, rel=1e-12, abs=1e-9)
    assert np.all((cfg.phases >= 0) & (cfg.phases < 2 * np.pi))


def test_optimal_phases_batch():
    rng = np.random.default_rng(0)
    h = rng.standard_normal((5, 9)) + 1j * rng.standard_normal((5, 9))
    g = rng.standard_normal((5, 9)) + 1j * rng.standard_normal((5, 9))
    hs = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    c = compose(h, g, optimal_phases(h, g, hs), hs)
    assert np.allclose(np.abs(c), np.abs(g * h).sum(1) + np.abs(hs))


def test_quantize_levels_and_ties():
    step = np.pi / 2
    cfg = RisPhaseConfig(np.array([0.0, 0.1, step / 2, step * 0.51, 2 * np.pi - 0.1, 3 * step + step / 2]))
    out = quantize_phases(cfg, 2).phases
    assert np.allclose(out, [0, 0, 0, step, 0, 3 * step])
    assert quantize_phases(cfg, 2).mode is PhaseMode.QUANTIZED
    with pytest.raises(ValueError):
        quantize_phases(cfg, 0)


@settings(max_examples=100, deadline=None)
@given(arrays(float, 20, elements=st.floats(0, 2 * np.pi, exclude_max=True)), st.integers(1, 6))
def test_quantize_error_bound(ph, q):
    out = quantize_phases(RisPhaseConfig(ph), q).phases
    err = np.angle(np.exp(1j * (out - ph)))
    assert np.all(np.abs(err) <= np.pi / 2**q + 1e-12)
    levels = out / (2 * np.pi / 2**q)
    assert np.allclose(levels, np.round(levels))


def test_perturb_infinite_kappa_is_identity():
    cfg = RisPhaseConfig(np.linspace(0, 6, 10))
    out = perturb_phases(cfg, np.inf, np.random.default_rng(0))
    assert np.allclose(out.phases, cfg.phases)


def test_combined_mode_perturbs_then_quantizes():
    cfg = RisPhaseConfig(np.full(1000, 0.3))
    out = apply_phase_mode(cfg, "quantized-noisy", q_bits=1, kappa=2.0, rng=np.random.default_rng(1))
    assert set(np.round(out.phases, 12)) <= {0.0, round(np.pi, 12)}
    assert out.mode is PhaseMode.QUANTIZED_NOISY
    assert 0 < np.mean(out.phases > 0) < 0.5


def test_apply_mode_requirements():
    cfg = RisPhaseConfig(np.zeros(4))
    assert apply_phase_mode(cfg, "ideal") is cfg
    with pytest.raises(ValueError):
        apply_phase_mode(cfg, "noisy")
    with pytest.raises(ValueError):
        apply_phase_mode(cfg, "quantized")
    with pytest.raises(ValueError):
        PhaseMode.parse("perfect")


def test_compose_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        compose(np.ones(4), np.ones(5), RisPhaseConfig(np.zeros(4)))
    with pytest.raises(DimensionMismatch):
        optimal_phases(np.ones(4), np.ones(3))


def test_compose_alpha():
    h, g = np.ones(4), np.ones(4)
    assert compose(h, g, RisPhaseConfig(np.zeros(4), alpha=0.5)) == pytest.approx(2.0)
