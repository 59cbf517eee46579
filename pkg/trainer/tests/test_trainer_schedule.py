import pytest

from dnatrainer import NoiseSchedule
from dnatrainer.errors import ConfigError


def test_starts_at_zero_and_ends_at_max_level():
    schedule = NoiseSchedule(max_level=0.4, total_epochs=10)
    assert schedule.level(0) == 0.0
    assert schedule.level(9) == pytest.approx(0.4)


def test_levels_are_non_decreasing():
    schedule = NoiseSchedule(max_level=0.7, total_epochs=37)
    levels = [schedule.level(e) for e in range(37)]
    assert all(a <= b for a, b in zip(levels, levels[1:]))


def test_ramp_is_linear():
    schedule = NoiseSchedule(max_level=1.0, total_epochs=5)
    assert [schedule.level(e) for e in range(5)] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])


def test_single_epoch_schedule_stays_at_zero():
    assert NoiseSchedule(max_level=0.4, total_epochs=1).level(0) == 0.0


def test_epochs_past_the_end_hold_the_peak():
    schedule = NoiseSchedule(max_level=0.4, total_epochs=4)
    assert schedule.level(100) == pytest.approx(0.4)


def test_zero_max_level_is_always_zero():
    schedule = NoiseSchedule(max_level=0.0, total_epochs=10)
    assert all(schedule.level(e) == 0.0 for e in range(10))


def test_invalid_parameters_rejected():
    with pytest.raises(ConfigError):
        NoiseSchedule(max_level=-0.1, total_epochs=5)
    with pytest.raises(ConfigError):
        NoiseSchedule(max_level=0.1, total_epochs=0)
    with pytest.raises(ConfigError):
        NoiseSchedule(max_level=0.1, total_epochs=5).level(-1)
