"""Ground-truth target displacement: servo phantom and a parametric chest."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AliasedMotion, EmptyTrace


@dataclass(frozen=True)
class DisplacementTrace:
    """Uniformly sampled displacement relative to ``base_range`` (metres).

    ``base_range`` may be None when the trace is not tied to a distance,
    e.g. a displacement recovered from phase alone.
    """

    rate: float
    samples: np.ndarray
    base_range: float | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", samples)
        if self.rate <= 0:
            raise ValueError("trace rate must be positive")
        if samples.ndim != 1 or samples.size < 1:
            raise EmptyTrace("a trace needs at least one sample")
        if self.base_range is not None and np.max(np.abs(samples)) >= self.base_range:
            raise ValueError("displacement would cross the radar")

    @property
    def duration(self) -> float:
        return self.samples.size / self.rate

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.rate

    def __len__(self):
        return self.samples.size

    def window(self, start: int, stop: int) -> DisplacementTrace:
        return DisplacementTrace(self.rate, self.samples[start:stop], self.base_range)


@dataclass(frozen=True)
class BeatTimes:
    times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", t)
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("beat times must be strictly increasing")

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class ChestParams:
    rr: float = 0.25  # Hz
    hr: float = 1.2  # Hz
    breath_amplitude: float = 1.2e-3  # m
    heart_amplitude: float = 0.3e-3  # m
    # (harmonic order, amplitude relative to breath_amplitude)
    breath_harmonics: tuple[tuple[int, float], ...] = field(default_factory=tuple)
    heart_pulse_width: float = 0.120  # s, full support of one raised-cosine pulse
    # (breathing phase, heartbeat phase) in radians
    phase_offsets: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not 0.1 <= self.rr <= 0.5:
            raise ValueError(f"respiration rate {self.rr} Hz outside [0.1, 0.5]")
        if not 0.7 <= self.hr <= 2.0:
            raise ValueError(f"heart rate {self.hr} Hz outside [0.7, 2.0]")
        if self.breath_amplitude < 0 or self.heart_amplitude < 0:
            raise ValueError("amplitudes must be non-negative")
        if self.heart_pulse_width <= 0:
            raise ValueError("pulse width must be positive")
        for order, rel in self.breath_harmonics:
            if int(order) < 2 or rel < 0:
                raise ValueError(f"bad breathing harmonic ({order}, {rel})")


def quantize(x, step):
    if step <= 0:
        return np.asarray(x, dtype=np.float64)
    return step * np.round(np.asarray(x) / step)


def _times(duration, rate):
    # Small slack so e.g. 20 s at 100 Hz gives 2000 samples despite rounding.
    count = int(np.floor(duration * rate + 1e-9))
    if count < 1:
        raise EmptyTrace("duration shorter than one sample")
    return np.arange(count) / rate


def sinusoid_motion(amplitude, freq, duration, rate, step_quantization=0.0,
                    base_range=0.5) -> DisplacementTrace:
    """Servo phantom: a quantized sinusoid ``amplitude * sin(2*pi*freq*t)``."""
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    if freq >= rate / 2:
        raise AliasedMotion(f"{freq} Hz motion aliases at {rate} Hz sampling")
    t = _times(duration, rate)
    x = quantize(amplitude * np.sin(2 * np.pi * freq * t), step_quantization)
    return DisplacementTrace(rate, x, base_range)


def breathing_component(params: ChestParams, t):
    phase = params.phase_offsets[0]
    x = params.breath_amplitude * np.sin(2 * np.pi * params.rr * t + phase)
    for order, rel in params.breath_harmonics:
        x = x + rel * params.breath_amplitude * np.sin(
            2 * np.pi * order * params.rr * t + order * phase)
    return x


def beat_centres(params: ChestParams, duration) -> np.ndarray:
    period = 1.0 / params.hr
    first = (params.phase_offsets[1] / (2 * np.pi)) % 1.0 * period
    return np.arange(first, duration, period)


def heart_component(params: ChestParams, t, centres=None):
    """Raised-cosine pulse train, one pulse per beat centre."""
    if centres is None:
        centres = beat_centres(params, t[-1] + 1.0 / params.hr)
    x = np.zeros_like(t, dtype=np.float64)
    if params.heart_amplitude == 0 or centres.size == 0:
        return x
    half = params.heart_pulse_width / 2
    # Pulses at 2 Hz and 120 ms never overlap, so each sample sees the nearest centre only.
    idx = np.clip(np.searchsorted(centres, t), 1, max(centres.size - 1, 1))
    if centres.size == 1:
        nearest = np.full_like(t, centres[0])
    else:
        left, right = centres[idx - 1], centres[idx]
        nearest = np.where(np.abs(t - left) <= np.abs(t - right), left, right)
    dt = t - nearest
    inside = np.abs(dt) <= half
    x[inside] = params.heart_amplitude * 0.5 * (1 + np.cos(np.pi * dt[inside] / half))
    return x


def chest_motion(params: ChestParams, duration, rate, base_range=0.5):
    """Breathing (fundamental plus harmonics) plus a heartbeat pulse train.

    Returns the displacement trace and the pulse centres, which serve as the
    ground-truth beat instants.
    """
    highest = max([params.hr] + [o * params.rr for o, _ in params.breath_harmonics])
    if highest >= rate / 2:
        raise AliasedMotion(f"{highest} Hz component aliases at {rate} Hz sampling")
    t = _times(duration, rate)
    centres = beat_centres(params, duration)
    x = breathing_component(params, t) + heart_component(params, t, centres)
    return DisplacementTrace(rate, x, base_range), BeatTimes(centres)


def peak_to_peak(trace: DisplacementTrace) -> float:
    if len(trace) < 2:
        raise EmptyTrace("peak-to-peak needs at least two samples")
    return float(np.max(trace.samples) - np.min(trace.samples))
