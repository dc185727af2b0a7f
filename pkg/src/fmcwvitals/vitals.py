"""Heart and respiration rates from a displacement trace."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.optimize
import scipy.signal

from . import kernels
from .errors import BandInvalid, NoPeak, TraceTooShort
from .motion import BeatTimes, DisplacementTrace


class BandKind(str, enum.Enum):
    HEART = "heart"
    RESPIRATION = "respiration"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Band:
    low: float
    high: float
    kind: BandKind = BandKind.CUSTOM

    def check(self, rate: float):
        if not 0 < self.low < self.high < rate / 2:
            raise BandInvalid(
                f"band [{self.low}, {self.high}] Hz invalid at {rate} Hz sampling")


HEART_BAND = Band(0.7, 2.0, BandKind.HEART)
RESP_BAND = Band(0.1, 0.5, BandKind.RESPIRATION)

# Butterworth order per band edge: the band-pass is 8th order (4 biquads),
# 16th after the forward-backward pass. Lower orders cannot hold the whole
# band within 1 dB and still reject a tone at 1.5x the upper edge by 20 dB.
FILTER_ORDER = 4
PASSBAND_RIPPLE_DB = 1.0


@dataclass(frozen=True)
class VitalsEstimate:
    window_start: float  # s
    hr: float  # beats per minute
    rr: float  # breaths per minute
    hr_peak_mag: float
    rr_peak_mag: float


@lru_cache(maxsize=64)
def _design(kind: str, edges: tuple, rate: float, order: int):
    return scipy.signal.butter(order, edges if len(edges) > 1 else edges[0],
                               btype=kind, fs=rate, output="sos")


def _zero_phase_gain_db(sos, f, rate):
    _, h = scipy.signal.sosfreqz(sos, worN=np.atleast_1d(f), fs=rate)
    return 40 * np.log10(np.maximum(np.abs(h), 1e-300))


@lru_cache(maxsize=64)
def design_bandpass(low: float, high: float, rate: float, order: int = FILTER_ORDER):
    """Band-pass whose zero-phase gain stays within 1 dB over all of [low, high].

    Butterworth edges sit at -3 dB per pass (-6 dB forward-backward), so
    the design edges are pushed out by a common factor, found by root
    search, until both nominal edges come up to -1 dB.
    """
    nyq = rate / 2

    def shortfall(stretch):
        sos = _design("bandpass", (low / stretch, high * stretch), rate, order)
        return min(_zero_phase_gain_db(sos, [low, high], rate)) + PASSBAND_RIPPLE_DB

    top = min(4.0, 0.98 * nyq / high)
    if top <= 1.0 or shortfall(top) < 0:
        raise BandInvalid(f"band [{low}, {high}] Hz too close to Nyquist at {rate} Hz")
    stretch = scipy.optimize.brentq(shortfall, 1.0, top, xtol=1e-10)
    return _design("bandpass", (low / stretch, high * stretch), rate, order), stretch


def zero_phase(sos, x, padlen):
    """Forward-backward biquad cascade with odd extension at both ends.

    Same construction as ``scipy.signal.sosfiltfilt`` (steady-state initial
    conditions scaled by the first sample of each pass); the recursion runs
    in ``kernels.sosfilt``.
    """
    x = np.asarray(x, dtype=np.float64)
    padlen = int(min(padlen, x.size - 1))
    if padlen > 0:
        left = 2 * x[0] - x[padlen:0:-1]
        right = 2 * x[-1] - x[-2:-padlen - 2:-1]
        ext = np.concatenate([left, x, right])
    else:
        ext = x
    zi = scipy.signal.sosfilt_zi(sos)
    y, _ = kernels.sosfilt(sos, ext, zi * ext[0])
    y = y[::-1]
    y, _ = kernels.sosfilt(sos, y, zi * y[0])
    y = y[::-1]
    return y[padlen:ext.size - padlen] if padlen > 0 else y


def bandpass(trace: DisplacementTrace, band: Band) -> DisplacementTrace:
    band.check(trace.rate)
    sos, stretch = design_bandpass(band.low, band.high, trace.rate)
    # Pad by three periods of the lower design edge so start-up transients settle.
    padlen = int(np.ceil(3 * trace.rate * stretch / band.low))
    return DisplacementTrace(trace.rate, zero_phase(sos, trace.samples, padlen),
                             trace.base_range)


def lowpass(trace: DisplacementTrace, cutoff: float, order: int = 4) -> DisplacementTrace:
    if not 0 < cutoff < trace.rate / 2:
        raise BandInvalid(f"cutoff {cutoff} Hz invalid at {trace.rate} Hz sampling")
    sos = _design("lowpass", (cutoff,), trace.rate, order)
    padlen = int(np.ceil(3 * trace.rate / cutoff))
    return DisplacementTrace(trace.rate, zero_phase(sos, trace.samples, padlen),
                             trace.base_range)


def _parabolic(a, b, c):
    denom = a - 2 * b + c
    return 0.0 if denom == 0 else 0.5 * (a - c) / denom


def rate_and_peak(trace: DisplacementTrace, band: Band, pad_factor: int = 8,
                  interpolate: bool = True):
    """Dominant in-band frequency (per minute) and its normalised magnitude."""
    if trace.duration < 2.0 / band.low:
        raise TraceTooShort(
            f"{trace.duration:.1f} s trace is shorter than 2/low = {2 / band.low:.1f} s")
    y = bandpass(trace, band).samples
    nfft = max(int(pad_factor), 1) * y.size
    mag = np.abs(np.fft.rfft(y, nfft))
    freqs = np.fft.rfftfreq(nfft, 1.0 / trace.rate)
    inband = np.flatnonzero((freqs >= band.low) & (freqs <= band.high))
    k = inband[np.argmax(mag[inband])]
    scale = np.sum(np.abs(trace.samples))
    if mag[k] <= 1e-9 * scale or mag[k] == 0:
        raise NoPeak("no spectral content inside the band")
    f = freqs[k]
    if interpolate and 0 < k < mag.size - 1:
        f += _parabolic(mag[k - 1], mag[k], mag[k + 1]) * (freqs[1] - freqs[0])
        f = min(max(f, band.low), band.high)
    return 60.0 * f, mag[k] / y.size


def estimate_rate(trace: DisplacementTrace, band: Band, pad_factor: int = 8,
                  interpolate: bool = True) -> float:
    """Rate per minute of the strongest spectral line inside ``band``.

    With ``pad_factor=1`` and ``interpolate=False`` the result sits on the
    plain FFT grid of ``60 / duration`` per minute.
    """
    return rate_and_peak(trace, band, pad_factor, interpolate)[0]


def window_count(n_samples, rate, window, step):
    win = int(round(window * rate))
    hop = int(round(step * rate))
    if n_samples < win:
        return 0
    return (n_samples - win) // hop + 1


def sliding_estimates(trace: DisplacementTrace, window: float = 60.0, step: float = 1.0,
                      heart_band: Band = HEART_BAND, resp_band: Band = RESP_BAND,
                      **rate_kw) -> list[VitalsEstimate]:
    win = int(round(window * trace.rate))
    hop = int(round(step * trace.rate))
    count = window_count(len(trace), trace.rate, window, step)
    if count < 1:
        raise TraceTooShort(f"{trace.duration:.1f} s trace is shorter than the {window} s window")
    out = []
    for i in range(count):
        seg = trace.window(i * hop, i * hop + win)
        hr, hmag = rate_and_peak(seg, heart_band, **rate_kw)
        rr, rmag = rate_and_peak(seg, resp_band, **rate_kw)
        out.append(VitalsEstimate(i * hop / trace.rate, hr, rr, hmag, rmag))
    return out


def detect_beats(trace: DisplacementTrace, k: float = 0.5, window: float = 5.0,
                 min_spacing: float = 0.5) -> BeatTimes:
    """Heartbeat instants in a heart-band signal.

    A beat is a local maximum above ``rolling median + k * MAD`` (window of
    ``window`` seconds), with beats at least ``min_spacing`` seconds apart.
    """
    half = max(int(round(window * trace.rate / 2)), 1)
    med, mad = kernels.rolling_median_mad(trace.samples, half)
    idx = kernels.pick_peaks(trace.samples, med + k * mad,
                             int(round(min_spacing * trace.rate)))
    return BeatTimes(idx / trace.rate)


@dataclass(frozen=True)
class BeatMatch:
    true_pos: int
    false_pos: int
    false_neg: int

    @property
    def sensitivity(self) -> float:
        n = self.true_pos + self.false_neg
        return self.true_pos / n if n else 1.0

    @property
    def precision(self) -> float:
        n = self.true_pos + self.false_pos
        return self.true_pos / n if n else 1.0


def match_beats(detected: BeatTimes, truth: BeatTimes, tol: float = 0.150) -> BeatMatch:
    """Greedy one-to-one matching, closest pairs first, within ``tol`` seconds."""
    d, t = detected.times, truth.times
    pairs = []
    for i, x in enumerate(d):
        lo = np.searchsorted(t, x - tol - 1e-12, side="left")
        hi = np.searchsorted(t, x + tol + 1e-12, side="right")
        for j in range(lo, hi):
            gap = abs(x - t[j])
            if gap <= tol + 1e-12:
                pairs.append((gap, i, j))
    pairs.sort()
    used_d, used_t = set(), set()
    for _, i, j in pairs:
        if i not in used_d and j not in used_t:
            used_d.add(i)
            used_t.add(j)
    tp = len(used_d)
    return BeatMatch(tp, d.size - tp, t.size - tp)
