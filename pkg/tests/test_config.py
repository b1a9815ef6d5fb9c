import pytest
from pydantic import ValidationError

from glstep.config import Discretization, Settings


class TestSettings:
    def test_defaults(self):
        s = Settings()
        assert s.m_schedule == sorted(s.m_schedule)

    def test_only_solver_fields(self):
        assert "app_name" not in Settings.model_fields
        assert "version" not in Settings.model_fields

    def test_environment_prefix(self, monkeypatch):
        monkeypatch.setenv("GLSTEP_SPACING", "0.02")
        monkeypatch.setenv("GLSTEP_M_SCHEDULE", "[4, 8]")
        s = Settings()
        assert s.spacing == 0.02
        assert s.m_schedule == [4.0, 8.0]

    @pytest.mark.parametrize("field, value", [("spacing", 0.0), ("descent_tol", -1.0), ("strip_spacing", -0.1)])
    def test_positive_fields(self, field, value):
        with pytest.raises(ValidationError):
            Settings(**{field: value})

    @pytest.mark.parametrize("schedule", [[], [3.0, 6.0], [6.0, 4.0]])
    def test_m_schedule(self, schedule):
        with pytest.raises(ValidationError):
            Settings(m_schedule=schedule)


class TestDiscretization:
    def test_from_settings_with_overrides(self):
        source = Settings(spacing=0.01, profile_spacing=0.04)
        disc = Discretization.from_settings(source, descent_tol=1e-9)
        assert disc.spacing == 0.01
        assert disc.descent_tol == 1e-9
        assert disc.for_profiles().spacing == 0.04
        assert disc.with_spacing(0.5).profile_spacing == 0.04

    def test_frozen(self):
        disc = Discretization.from_settings()
        with pytest.raises(AttributeError):
            disc.spacing = 1.0
