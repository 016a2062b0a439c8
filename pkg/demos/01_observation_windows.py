"""
Observation windows on a discrete time axis
===========================================

A window is anchored at a moment and reaches back (or forward) over a
number of ticks. Its frequency is the signed reciprocal of that length.
"""

from timeinfo import PAST_INFINITE, ObservationWindow, TimeMoment, compare_durations

# a window covering ticks 2, 3 and 4: anchor 5 open, far end closed
w = ObservationWindow(TimeMoment(5), 3, anchor_closed=False, far_closed=True)
print("frequency", w.frequency, "far tick", w.far_tick)
print("ticks inside", [t for t in range(8) if t in w])

# the same window rebuilt from its frequency
print("round trip ok:", ObservationWindow.from_frequency(w.frequency, w.anchor, False, True) == w)

# everything up to and including tick 5
history = ObservationWindow.past(5)
print("history bounded?", history.is_bounded, "| reaches back forever:", history.duration is PAST_INFINITE)

# a forward window has negative frequency
ahead = ObservationWindow(TimeMoment(1), -4)
print("forward frequency", ahead.frequency, "compare with w:", compare_durations(w, ahead))
