from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from timeinfo import (
    PAST_INFINITE,
    ObservationWindow,
    TimeMoment,
    compare_durations,
    interval_to_frequency,
    window_contains,
)
from timeinfo.errors import UnboundedWindow, ZeroLengthInterval


def test_moment_rejects_negative_and_non_integer():
    with pytest.raises(ValueError):
        TimeMoment(-1)
    with pytest.raises(TypeError):
        TimeMoment(1.5)
    assert TimeMoment(2) < TimeMoment(3)
    assert TimeMoment(4) == TimeMoment(4)


@pytest.mark.parametrize(
    "start, end, expected",
    [(2, 4, Fraction(1, 2)), (4, 2, Fraction(-1, 2)), (0, 7, Fraction(1, 7))],
)
def test_interval_to_frequency(start, end, expected):
    f = interval_to_frequency(TimeMoment(start), TimeMoment(end))
    assert f == expected
    assert isinstance(f, Fraction)


def test_zero_length_interval():
    with pytest.raises(ZeroLengthInterval):
        interval_to_frequency(TimeMoment(3), TimeMoment(3))
    with pytest.raises(ZeroLengthInterval):
        ObservationWindow(TimeMoment(3), 0)


def test_past_window_contains_anchor_when_closed():
    w = ObservationWindow.past(5)
    assert window_contains(w, TimeMoment(5))
    assert not window_contains(w, TimeMoment(6))
    assert window_contains(w, TimeMoment(0))
    assert w.frequency == 0
    assert not window_contains(ObservationWindow.past(5, closed=False), TimeMoment(5))


def test_finite_window_endpoint_closedness():
    # [far = 2 closed, anchor = 5 open)
    w = ObservationWindow(TimeMoment(5), 3, anchor_closed=False, far_closed=True)
    assert w.far_tick == 2
    assert window_contains(w, TimeMoment(2))
    assert not window_contains(w, TimeMoment(5))
    assert [t for t in range(8) if w.contains(t)] == [2, 3, 4]


def test_forward_window_has_negative_frequency():
    w = ObservationWindow(TimeMoment(1), -3)
    assert w.forward
    assert w.frequency == Fraction(-1, 3)
    assert w.far_tick == 4
    assert [t for t in range(7) if w.contains(t)] == [1, 2, 3, 4]


def test_compare_durations():
    a = ObservationWindow(TimeMoment(9), 3)
    b = ObservationWindow(TimeMoment(9), -5)
    assert compare_durations(a, b) == -1
    assert compare_durations(b, a) == 1
    assert compare_durations(ObservationWindow(TimeMoment(9), 4), ObservationWindow(TimeMoment(1), -4)) == 0
    with pytest.raises(UnboundedWindow):
        compare_durations(ObservationWindow.past(3), ObservationWindow(TimeMoment(9), 4))


@given(st.integers(0, 50), st.integers(0, 50))
def test_frequency_antisymmetry(a, b):
    if a == b:
        return
    assert interval_to_frequency(a, b) == -interval_to_frequency(b, a)


@given(
    st.integers(0, 100),
    st.integers(-40, 40).filter(bool),
    st.booleans(),
    st.booleans(),
)
def test_frequency_round_trip(anchor, duration, ac, fc):
    w = ObservationWindow(TimeMoment(anchor), duration, ac, fc)
    back = ObservationWindow.from_frequency(w.frequency, w.anchor, ac, fc)
    assert back == w
    assert back.far_tick == w.far_tick and back.forward == w.forward


def _ticks(w, horizon=60):
    return {t for t in range(horizon) if w.contains(t)}


windows = st.builds(
    ObservationWindow,
    st.integers(0, 30).map(TimeMoment),
    st.one_of(st.integers(-20, 20).filter(bool), st.just(PAST_INFINITE)),
    st.booleans(),
    st.booleans(),
)


@given(windows, windows, st.integers(0, 59))
def test_containment_monotone_in_tick_sets(w1, w2, m):
    if _ticks(w1) <= _ticks(w2) and w1.contains(m):
        assert w2.contains(m)


@given(windows)
def test_compare_matches_frequency_modulus(w):
    if not w.is_bounded:
        return
    other = ObservationWindow(TimeMoment(10), 5)
    by_duration = compare_durations(w, other)
    by_frequency = (abs(w.frequency) < abs(other.frequency)) - (abs(w.frequency) > abs(other.frequency))
    assert by_duration == by_frequency
