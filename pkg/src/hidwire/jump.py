"""Jump detection over accelerometer magnitude.

Orientation-free: the controller sits in a pocket at an unknown angle, so
detection uses the magnitude of the acceleration vector.  A two-threshold
hysteresis machine triggers once per excursion above the high threshold and
re-arms only after the magnitude falls below the low threshold; a debounce
gap suppresses whole excursions that start too soon after the last emitted
jump.  The thresholds here are hand-picked starting values, not derived from
any measurement campaign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .joycon import ImuFrame

__all__ = [
    "JumpConfig",
    "JumpEvent",
    "JumpState",
    "NonMonotoneTimeError",
    "magnitude",
    "process_sample",
    "detect_jumps",
]


class NonMonotoneTimeError(ValueError):
    pass


@dataclass(frozen=True)
class JumpConfig:
    """Trigger threshold, re-arm threshold and minimum gap between jumps."""

    t_high_g: float = 1.8
    t_low_g: float = 1.2
    debounce_ms: int = 250

    def __post_init__(self) -> None:
        if not self.t_low_g < self.t_high_g:
            raise ValueError(
                f"re-arm threshold {self.t_low_g} must be below trigger "
                f"threshold {self.t_high_g}"
            )
        if self.debounce_ms < 0:
            raise ValueError("debounce_ms must be >= 0")


@dataclass
class JumpEvent:
    """A detected jump; peak_g tracks the excursion's running maximum."""

    t_ms: int
    peak_g: float


@dataclass
class JumpState:
    """Per-stream detector state; feed one device's samples only."""

    armed: bool = True
    last_emit_ms: Optional[int] = None
    last_t_ms: Optional[int] = None
    # live event of the current excursion; None while armed or when the
    # excursion was suppressed by the debounce gap
    _current_event: Optional[JumpEvent] = None

    @property
    def excursion_peak(self) -> Optional[float]:
        """Running peak of the active excursion's emitted event, if any."""
        return self._current_event.peak_g if self._current_event else None


def magnitude(frame: ImuFrame) -> float:
    """Euclidean norm of the acceleration vector, in g."""
    ax, ay, az = frame.accel
    return math.sqrt(ax * ax + ay * ay + az * az)


def process_sample(
    state: JumpState, t_ms: int, m: float, config: JumpConfig
) -> Optional[JumpEvent]:
    """Advance the hysteresis machine by one magnitude sample.

    Returns the emitted event at the triggering sample, carrying the peak so
    far; later samples of the same excursion raise that event's peak_g in
    place (visible through ``state.excursion_peak`` and the returned object).
    An excursion starting inside the debounce window is swallowed whole: it
    still flips the machine to triggered without emitting.
    """
    if state.last_t_ms is not None and t_ms < state.last_t_ms:
        raise NonMonotoneTimeError(f"t_ms {t_ms} < previous {state.last_t_ms}")
    state.last_t_ms = t_ms

    if state.armed:
        if m > config.t_high_g:
            state.armed = False
            if state.last_emit_ms is None or t_ms - state.last_emit_ms >= config.debounce_ms:
                event = JumpEvent(t_ms=t_ms, peak_g=m)
                state.last_emit_ms = t_ms
                state._current_event = event
                return event
            state._current_event = None
    else:
        if m < config.t_low_g:
            state.armed = True
            state._current_event = None
        elif state._current_event is not None and m > state._current_event.peak_g:
            state._current_event.peak_g = m
    return None


def detect_jumps(
    trace: Iterable[tuple[int, ImuFrame]], config: JumpConfig
) -> list[JumpEvent]:
    """Fold process_sample over a (t_ms, frame) trace."""
    state = JumpState()
    events: list[JumpEvent] = []
    for t_ms, frame in trace:
        event = process_sample(state, t_ms, magnitude(frame), config)
        if event is not None:
            events.append(event)
    return events
