import pytest
from hypothesis import given
from hypothesis import strategies as st

from toonbench.sustainability import (
    DEFAULT_X_REF,
    DecodeMeasurement,
    EmissionConfig,
    EmissionMode,
    MissingMeasurement,
    ZeroTokens,
    carbon_intensity,
    ees,
    estimate_ce,
)

intensities = st.floats(min_value=0, max_value=1e3, allow_nan=False)
TOKEN_FACTOR = EmissionConfig(mode="token_factor", token_factor=DEFAULT_X_REF)


class TestEstimate:
    def test_token_factor_at_reference_scale(self):
        assert estimate_ce(DecodeMeasurement(1000, 1.0), TOKEN_FACTOR) == pytest.approx(0.001719)

    def test_token_factor_zero_tokens(self):
        assert estimate_ce(DecodeMeasurement(0, 0.0), TOKEN_FACTOR) == 0

    def test_measured_energy(self):
        cfg = EmissionConfig(grid_intensity=0.4)
        assert estimate_ce(DecodeMeasurement(10, 1.0, energy_kwh=0.1), cfg) == pytest.approx(0.04)

    def test_measured_prefers_recorded_emissions(self):
        cfg = EmissionConfig(grid_intensity=0.4)
        assert estimate_ce(DecodeMeasurement(10, 1.0, energy_kwh=0.1, ce_kg=0.007), cfg) == 0.007

    def test_missing(self):
        with pytest.raises(MissingMeasurement):
            estimate_ce(DecodeMeasurement(10, 1.0), EmissionConfig())
        with pytest.raises(MissingMeasurement):
            estimate_ce(DecodeMeasurement(10, 1.0, energy_kwh=0.1), EmissionConfig())

    @pytest.mark.parametrize(
        "kwargs", [dict(token_factor=0), dict(grid_intensity=-1), dict(x_ref=0), dict(mode="telemetry")]
    )
    def test_config_invariants(self, kwargs):
        with pytest.raises(ValueError):
            EmissionConfig(**kwargs)

    def test_mode_from_text(self):
        assert EmissionConfig(mode="measured").mode is EmissionMode.MEASURED

    def test_measurement_invariants(self):
        with pytest.raises(ValueError):
            DecodeMeasurement(-1, 0.0)
        with pytest.raises(ValueError):
            DecodeMeasurement(1, -0.5)


class TestIntensity:
    def test_examples(self):
        assert carbon_intensity(4.22e-5, 296.15) == pytest.approx(1.425e-4, rel=1e-3)
        assert carbon_intensity(0, 100) == 0
        assert carbon_intensity(1.719e-3, 1000) == pytest.approx(1.719e-3)

    def test_zero_tokens(self):
        with pytest.raises(ZeroTokens):
            carbon_intensity(0.1, 0)

    @given(st.integers(1, 10**6), st.floats(1e-9, 1.0))
    def test_token_factor_is_recovered(self, n, factor):
        cfg = EmissionConfig(mode="token_factor", token_factor=factor)
        assert carbon_intensity(estimate_ce(DecodeMeasurement(n, 1.0), cfg), n) == pytest.approx(factor, rel=1e-12)

    @given(st.lists(st.integers(1, 10**5), min_size=2, max_size=20))
    def test_token_factor_makes_ees_constant(self, counts):
        scores = {ees(carbon_intensity(estimate_ce(DecodeMeasurement(n, 1.0), TOKEN_FACTOR), n)) for n in counts}
        assert max(scores) - min(scores) < 1e-12


class TestEes:
    def test_anchors(self):
        assert ees(0, DEFAULT_X_REF) == 1.0
        assert ees(DEFAULT_X_REF, DEFAULT_X_REF) == 0.5

    def test_table_scale_json(self):
        # mean-of-ratios vs ratio-of-means: within 0.01 of the published aggregate
        assert ees(1.425e-4) == pytest.approx(0.923, abs=5e-4)
        assert abs(ees(1.425e-4) - 0.926) < 0.01

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ees(-1e-9)

    @given(intensities, intensities)
    def test_bounded_and_decreasing(self, a, b):
        lo, hi = sorted((a, b))
        assert 0 < ees(hi) <= ees(lo) <= 1
        if hi > lo * (1 + 1e-9) + 1e-12:  # strict wherever doubles can resolve it
            assert ees(hi) < ees(lo)
