"""Jump detector tests.

The reference here is a two-phase brute-force oracle: first enumerate
maximal above-threshold excursions (an excursion opens at a sample above the
trigger threshold after a below-re-arm sample or trace start, and closes at
the next below-re-arm sample), then greedily keep excursions starting at
least debounce_ms after the previously kept one.  The incremental machine
must agree with it on any trace.
"""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidwire.joycon import ImuFrame
from hidwire.jump import (
    JumpConfig,
    JumpState,
    NonMonotoneTimeError,
    detect_jumps,
    magnitude,
    process_sample,
)

CFG = JumpConfig(t_high_g=1.8, t_low_g=1.2, debounce_ms=250)


def frame(ax=0.0, ay=0.0, az=0.0, t_ms=0):
    return ImuFrame(accel=(ax, ay, az), gyro=(0.0, 0.0, 0.0), t_ms=t_ms)


def trace_from_magnitudes(samples):
    """[(t_ms, m)] -> [(t_ms, frame)] with the magnitude on the z axis."""
    return [(t, frame(az=m, t_ms=t)) for t, m in samples]


def oracle_emissions(samples, config):
    """Brute-force cluster oracle; returns emission timestamps."""
    starts = []
    rearmed = True
    in_excursion = False
    for t, m in samples:
        if in_excursion:
            if m < config.t_low_g:
                in_excursion = False
                rearmed = True
        else:
            if m < config.t_low_g:
                rearmed = True
            if rearmed and m > config.t_high_g:
                in_excursion = True
                rearmed = False
                starts.append(t)
    kept = []
    for t in starts:
        if not kept or t - kept[-1] >= config.debounce_ms:
            kept.append(t)
    return kept


# -- magnitude -------------------------------------------------------------------


def test_magnitude_rest_gravity():
    assert magnitude(frame(az=1.0)) == 1.0


def test_magnitude_zero():
    assert magnitude(frame()) == 0.0


def test_magnitude_pythagorean():
    assert magnitude(frame(1.0, 2.0, 2.0)) == pytest.approx(3.0)  # sqrt(9)


# -- config ----------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        JumpConfig(t_high_g=1.0, t_low_g=1.5)
    with pytest.raises(ValueError):
        JumpConfig(debounce_ms=-1)
    assert JumpConfig().t_high_g == 1.8
    assert JumpConfig().t_low_g == 1.2
    assert JumpConfig().debounce_ms == 250


# -- process_sample ----------------------------------------------------------------


def test_constant_one_g_never_fires():
    samples = [(t, 1.0) for t in range(0, 1000, 10)]
    assert detect_jumps(trace_from_magnitudes(samples), CFG) == []


def test_single_spike_fires_once_with_peak():
    samples = [(0, 1.0), (10, 2.5), (20, 1.0)]
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert len(events) == 1
    assert events[0].t_ms == 10
    assert events[0].peak_g == pytest.approx(2.5)


def test_two_spikes_inside_debounce_fire_once():
    samples = [(0, 1.0), (10, 2.5), (20, 1.0), (110, 2.5), (120, 1.0)]
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert len(events) == 1
    assert events[0].t_ms == 10


def test_two_spikes_outside_debounce_fire_twice():
    samples = [(0, 1.0), (10, 2.5), (20, 1.0), (300, 2.5), (310, 1.0)]
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert [e.t_ms for e in events] == [10, 300]


def test_long_excursion_fires_once():
    samples = [(0, 1.0)] + [(t, 2.5) for t in range(10, 800, 10)] + [(800, 1.0)]
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert len(events) == 1


def test_dip_between_thresholds_does_not_rearm():
    # 2.5 -> 1.5 (between t_low and t_high) -> 2.5 is one excursion
    samples = [(0, 1.0), (300, 2.5), (310, 1.5), (620, 2.5), (630, 1.0)]
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert len(events) == 1


def test_suppressed_excursion_consumes_whole_excursion():
    # second excursion starts inside the debounce window and must not fire
    # later even though it outlasts the window
    samples = [(0, 2.5), (10, 1.0), (100, 2.5), (200, 2.5), (300, 2.5),
               (400, 2.5), (410, 1.0)]
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert [e.t_ms for e in events] == [0]
    assert oracle_emissions(samples, CFG) == [0]


def test_retroactive_peak_tracking():
    state = JumpState()
    event = process_sample(state, 0, 2.0, CFG)
    assert event is not None and event.peak_g == 2.0
    assert process_sample(state, 10, 2.7, CFG) is None
    assert event.peak_g == pytest.approx(2.7)  # raised in place
    assert state.excursion_peak == pytest.approx(2.7)
    assert process_sample(state, 20, 2.1, CFG) is None
    assert event.peak_g == pytest.approx(2.7)
    process_sample(state, 30, 1.0, CFG)
    assert state.excursion_peak is None


def test_non_monotone_time_rejected():
    state = JumpState()
    process_sample(state, 10, 1.0, CFG)
    with pytest.raises(NonMonotoneTimeError):
        process_sample(state, 9, 1.0, CFG)


def test_detect_jumps_rejects_non_monotone_trace():
    with pytest.raises(NonMonotoneTimeError):
        detect_jumps(trace_from_magnitudes([(10, 1.0), (5, 1.0)]), CFG)


def test_detect_empty_trace():
    assert detect_jumps([], CFG) == []


def test_detect_equals_fold_of_process_sample():
    rng = random.Random(7)
    samples = random_trace(rng)
    state = JumpState()
    folded = []
    for t, m in samples:
        event = process_sample(state, t, m, CFG)
        if event is not None:
            folded.append((event.t_ms,))
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert [(e.t_ms,) for e in events] == folded


# -- generated traces ---------------------------------------------------------------


def random_trace(rng, rest=0.2, spike_low=2.0, spike_high=4.0):
    """Rest-level noise with occasional multi-sample spikes, 10 ms sampling."""
    samples = []
    t = 0
    for _ in range(rng.randint(10, 60)):
        if rng.random() < 0.25:
            width = rng.randint(1, 4)
            for _ in range(width):
                samples.append((t, rng.uniform(spike_low, spike_high)))
                t += 10
        gap = rng.randint(1, 12)
        for _ in range(gap):
            samples.append((t, rest + rng.uniform(-0.1, 0.1)))
            t += 10
    return samples


def ten_jump_trace(spacing_ms=400):
    """Exactly ten well-separated spikes over a rest baseline."""
    samples = []
    t = 0
    for _ in range(10):
        samples.append((t, 1.0))
        samples.append((t + 10, 2.5))
        samples.append((t + 20, 2.2))
        samples.append((t + 30, 1.0))
        t += spacing_ms
    return samples


def test_ten_jump_fixture_yields_ten_events():
    events = detect_jumps(trace_from_magnitudes(ten_jump_trace()), CFG)
    assert len(events) == 10


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_oracle_equivalence(seed):
    samples = random_trace(random.Random(seed))
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    assert [e.t_ms for e in events] == oracle_emissions(samples, CFG)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_monotone_output_with_debounce_gaps(seed):
    samples = random_trace(random.Random(seed))
    events = detect_jumps(trace_from_magnitudes(samples), CFG)
    for earlier, later in zip(events, events[1:]):
        assert later.t_ms - earlier.t_ms >= CFG.debounce_ms
        assert later.t_ms > earlier.t_ms
    for event in events:
        assert event.peak_g >= CFG.t_high_g


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1.0, 3.0))
def test_scaling_magnitudes_never_loses_events(seed, scale):
    """With rest << t_low and spikes > t_high, scaling up preserves clusters."""
    samples = random_trace(random.Random(seed))
    base = detect_jumps(trace_from_magnitudes(samples), CFG)
    scaled = detect_jumps(
        trace_from_magnitudes([(t, m * scale) for t, m in samples]), CFG
    )
    assert len(scaled) >= len(base)
