"""Raw chirps to displacement: range FFT, clutter removal, bin pick, phase."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from . import kernels
from .errors import OutOfRange, TooFewChirps, ZeroMagnitude
from .motion import DisplacementTrace
from .profiles import ProfileId, RadarProfile, derive_chirp_params
from .synth import ChirpRecording

WINDOWS = ("hann", "rect")
BIN_POLICIES = ("per_window", "per_chirp")


@dataclass(frozen=True)
class RangeSpectrumSeries:
    """One-sided range spectra, ``M x (n_fft // 2 + 1)``.

    The IF is real, so bins above ``n_fft / 2`` mirror the ones below and are
    not stored.
    """

    spectra: np.ndarray
    n_fft: int
    bin_size: float  # m
    profile: RadarProfile
    rate: float  # chirps per second

    @property
    def n_chirps(self) -> int:
        return self.spectra.shape[0]


@dataclass(frozen=True)
class PhaseSeries:
    rate: float
    values: np.ndarray
    bin: int | np.ndarray
    wrapped: bool


def fft_length(profile: RadarProfile, target_bin: float | None) -> int:
    """Smallest power of two, at least n, whose bin is no coarser than ``target_bin``."""
    n = profile.samples_per_chirp
    if target_bin is None:
        return n
    r = derive_chirp_params(profile).range_bin
    n_fft = 1 << max(int(np.ceil(np.log2(n))), 0)
    while r * n / n_fft > target_bin:
        n_fft *= 2
    return n_fft


def range_window(n: int, kind: str = "hann") -> np.ndarray:
    if kind == "rect":
        return np.ones(n)
    if kind == "hann":
        # Periodic form: keeps bin-aligned tones exactly on their bin with their phase.
        return 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(n) / n)
    raise ValueError(f"unknown window {kind!r}")


def range_fft(recording: ChirpRecording, pad_target: float | None = None,
              window: str = "hann") -> RangeSpectrumSeries:
    profile = recording.profile
    n = profile.samples_per_chirp
    n_fft = fft_length(profile, pad_target)
    frames = recording.frames * range_window(n, window)
    spectra = scipy.fft.rfft(frames, n=n_fft, axis=1)
    r = derive_chirp_params(profile).range_bin
    return RangeSpectrumSeries(spectra, n_fft, r * n / n_fft, profile,
                               1.0 / profile.chirp_interval)


def dc_offset_removal(series: RangeSpectrumSeries) -> RangeSpectrumSeries:
    """Subtract the slow-time complex mean from every range bin."""
    if series.n_chirps < 2:
        raise TooFewChirps("clutter removal needs at least two chirps")
    spectra = series.spectra - series.spectra.mean(axis=0, keepdims=True)
    return RangeSpectrumSeries(spectra, series.n_fft, series.bin_size,
                               series.profile, series.rate)


def select_target_bin(series: RangeSpectrumSeries, policy: str = "per_window",
                      min_bin: int = 1):
    """Strongest range bin, excluding the IF DC bin and the Nyquist bin.

    ``per_window`` takes the argmax of the slow-time mean magnitude and
    returns one index; ``per_chirp`` returns one index per chirp. Ties go to
    the lowest bin.
    """
    mag = np.abs(series.spectra[:, min_bin:series.n_fft // 2])
    if policy == "per_window":
        return int(np.argmax(mag.mean(axis=0))) + min_bin
    if policy == "per_chirp":
        return np.argmax(mag, axis=1) + min_bin
    raise ValueError(f"unknown bin policy {policy!r}")


def bin_to_range(bin, series: RangeSpectrumSeries):
    b = np.asarray(bin)
    if np.any(b < 0) or np.any(b >= series.n_fft // 2):
        raise OutOfRange("bin at or above Nyquist")
    out = b * series.bin_size
    return float(out) if out.ndim == 0 else out


def extract_phase(series: RangeSpectrumSeries, bin) -> PhaseSeries:
    b = np.asarray(bin)
    rows = np.arange(series.n_chirps)
    values = series.spectra[rows, b] if b.ndim else series.spectra[:, int(b)]
    peak = np.max(np.abs(series.spectra)) if series.spectra.size else 0.0
    mags = np.abs(values)
    if peak == 0 or np.min(mags) <= 1e-12 * peak:
        raise ZeroMagnitude("selected bin is empty in at least one chirp")
    return PhaseSeries(series.rate, np.angle(values), bin, True)


def unwrap_phase(series: PhaseSeries) -> PhaseSeries:
    if not series.wrapped:
        raise ValueError("phase series is already unwrapped")
    return PhaseSeries(series.rate, kernels.unwrap(series.values), series.bin, False)


def phase_to_displacement(series: PhaseSeries, wavelength: float,
                          base_range: float | None = None) -> DisplacementTrace:
    """Displacement ``wavelength * dphi / (4*pi)``, anchored at the first chirp."""
    if series.wrapped:
        raise ValueError("unwrap the phase before converting it")
    v = series.values
    return DisplacementTrace(series.rate, wavelength * (v - v[0]) / (4 * np.pi), base_range)


def default_dc_removal(profile: RadarProfile) -> bool:
    """Whether the reference processing used clutter removal for this radar."""
    return profile.id in (ProfileId.BGT60, ProfileId.BGT120)


@dataclass(frozen=True)
class PipelineOptions:
    pad_target: float | None = None
    # Off by default: mean subtraction bends the phase of motions that do
    # not sweep whole phase circles (see README).
    dc_removal: bool = False
    bin_policy: str = "per_window"
    window: str = "hann"


def run_pipeline(recording: ChirpRecording, options: PipelineOptions | None = None):
    """Full chain; returns ``(range_m, DisplacementTrace)``."""
    opts = options or PipelineOptions()
    series = range_fft(recording, opts.pad_target, opts.window)
    if opts.dc_removal:
        series = dc_offset_removal(series)
    b = select_target_bin(series, opts.bin_policy)
    rng = float(np.mean(bin_to_range(b, series)))
    phase = unwrap_phase(extract_phase(series, b))
    lam = derive_chirp_params(recording.profile).wavelength
    return rng, phase_to_displacement(phase, lam)
