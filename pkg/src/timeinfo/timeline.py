"""Discrete time axis: time moments, directed intervals and observation windows.

Time is counted in integer ticks.  A period of time can be written either as a
directed pair of moments or as a signed frequency plus one endpoint; the sign of
the frequency carries the direction and its modulus the (inverse) length.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

from .errors import UnboundedWindow, ZeroLengthInterval

__all__ = [
    "TimeMoment",
    "Unbounded",
    "PAST_INFINITE",
    "ObservationWindow",
    "interval_to_frequency",
    "window_contains",
    "compare_durations",
]


@total_ordering
@dataclass(frozen=True)
class TimeMoment:
    """A point on the time axis, ``tick`` axis units after the origin."""

    tick: int

    def __post_init__(self):
        if isinstance(self.tick, bool) or not isinstance(self.tick, int):
            raise TypeError(f"tick must be an int, got {type(self.tick).__name__}")
        if self.tick < 0:
            raise ValueError(f"tick must be non-negative, got {self.tick}")

    def __lt__(self, other):
        if not isinstance(other, TimeMoment):
            return NotImplemented
        return self.tick < other.tick

    def __repr__(self):
        return f"TimeMoment({self.tick})"


class Unbounded(enum.Enum):
    PAST_INFINITE = "past-infinite"

    def __repr__(self):
        return self.name


PAST_INFINITE = Unbounded.PAST_INFINITE


def _as_moment(value) -> TimeMoment:
    return value if isinstance(value, TimeMoment) else TimeMoment(value)


@dataclass(frozen=True)
class ObservationWindow:
    """A directed window hanging off ``anchor``.

    A finite ``duration`` d places the far endpoint at ``anchor.tick - d``: a
    positive duration looks back into the past, a negative one looks ahead.
    ``PAST_INFINITE`` covers the whole history up to the anchor.
    """

    anchor: TimeMoment
    duration: int | Unbounded
    anchor_closed: bool = True
    far_closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "anchor", _as_moment(self.anchor))
        d = self.duration
        if d is PAST_INFINITE:
            return
        if isinstance(d, bool) or not isinstance(d, int):
            raise TypeError(f"duration must be an int or PAST_INFINITE, got {d!r}")
        if d == 0:
            raise ZeroLengthInterval("a zero-length window is a time moment, not a window")

    @classmethod
    def past(cls, anchor, closed: bool = True) -> ObservationWindow:
        """The window (F, anchor] (or (F, anchor) when ``closed`` is false)."""
        return cls(_as_moment(anchor), PAST_INFINITE, anchor_closed=closed)

    @classmethod
    def from_frequency(cls, frequency, anchor, anchor_closed=True, far_closed=True):
        frequency = Fraction(frequency)
        if frequency == 0:
            return cls(_as_moment(anchor), PAST_INFINITE, anchor_closed, far_closed)
        duration = 1 / frequency
        if duration.denominator != 1:
            raise ValueError(f"frequency {frequency} does not span a whole number of ticks")
        return cls(_as_moment(anchor), int(duration), anchor_closed, far_closed)

    @property
    def is_bounded(self) -> bool:
        return self.duration is not PAST_INFINITE

    @property
    def frequency(self) -> Fraction:
        if not self.is_bounded:
            return Fraction(0)
        return Fraction(1, self.duration)

    @property
    def far_tick(self) -> int | None:
        """Far endpoint tick, which may lie before the origin; None when unbounded."""
        if not self.is_bounded:
            return None
        return self.anchor.tick - self.duration

    @property
    def forward(self) -> bool:
        """True when the window extends from the anchor towards later ticks."""
        return self.is_bounded and self.duration < 0

    def contains(self, moment) -> bool:
        tick = _as_moment(moment).tick
        a = self.anchor.tick
        if tick == a:
            return self.anchor_closed
        if not self.is_bounded:
            return tick < a
        far = self.far_tick
        if tick == far:
            return self.far_closed
        return min(a, far) < tick < max(a, far)

    __contains__ = contains


def interval_to_frequency(start, end) -> Fraction:
    """Signed frequency 1/(end - start) of the directed interval start -> end."""
    start, end = _as_moment(start), _as_moment(end)
    if start.tick == end.tick:
        raise ZeroLengthInterval(f"interval {start.tick} -> {end.tick} has zero length")
    return Fraction(1, end.tick - start.tick)


def window_contains(window: ObservationWindow, moment) -> bool:
    return window.contains(moment)


def compare_durations(a: ObservationWindow, b: ObservationWindow) -> int:
    """Return -1, 0 or 1 as |a| is shorter than, equal to or longer than |b|."""
    if not (a.is_bounded and b.is_bounded):
        raise UnboundedWindow("durations can only be compared between finite windows")
    la, lb = abs(a.duration), abs(b.duration)
    return (la > lb) - (la < lb)
