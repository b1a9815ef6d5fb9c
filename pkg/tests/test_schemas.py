import pytest
from pydantic import ValidationError

from glstep.schemas import (
    BarrierConfig,
    DegennesConfig,
    EnergySource,
    OutputFormat,
    PhaseConfig,
    StripConfig,
    parse_grid,
)


class TestParseGrid:
    def test_range_is_inclusive(self):
        assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_range_without_exact_end(self):
        assert parse_grid("0:1:0.3") == [0.0, 0.3, 0.6, 0.9]

    def test_list_and_scalars(self):
        assert parse_grid("-1, 0.5") == [-1.0, 0.5]
        assert parse_grid(2) == [2.0]
        assert parse_grid([1, 2]) == [1.0, 2.0]
        assert parse_grid("") == []

    @pytest.mark.parametrize("text", ["0:1", "1:0:0.1", "0:1:0", "a,b"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_grid(text)


class TestRunConfigs:
    def test_defaults(self):
        config = DegennesConfig(grid="0")
        assert config.format == OutputFormat.CSV
        assert config.threads == 1
        assert not config.stdout and not config.timing

    def test_unknown_field_forbidden(self):
        with pytest.raises(ValidationError):
            DegennesConfig(grid="0", colour="red")

    def test_strip_bulk_refused(self):
        with pytest.raises(ValidationError):
            StripConfig(a=-0.5, b=1.5)

    def test_strip_threshold_allowed(self):
        assert StripConfig(a=-0.5, b=2.0).m == 6.0

    def test_barrier_schedule_is_parsed(self):
        config = BarrierConfig(a=-1.0, b=1.2, schedule="4,8,16")
        assert config.schedule == [4.0, 8.0, 16.0]
        assert BarrierConfig(a=-1.0, b=1.2).schedule is None

    def test_barrier_threshold_is_bulk(self):
        with pytest.raises(ValidationError):
            BarrierConfig(a=-0.5, b=2.0)

    def test_phase_config(self):
        config = PhaseConfig(a="-1,0.5", grid="1.2:1.4:0.1", source="strip")
        assert config.a == [-1.0, 0.5]
        assert config.grid == [1.2, 1.3, 1.4]
        assert config.source == EnergySource.STRIP
        assert config.geometry == [1.0, 1.0, 1.0]

    def test_phase_rejects_zero_ratio(self):
        with pytest.raises(ValidationError):
            PhaseConfig(a="-1,0", grid="1.2")
