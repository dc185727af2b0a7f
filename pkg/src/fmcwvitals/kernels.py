"""Hot inner loops, each with a numba and a numpy implementation.

The numba path is the default when numba imports. Setting the environment
variable ``FMCWVITALS_NO_NUMBA=1`` selects the numpy path at import time;
``set_backend`` switches at runtime (the benchmark and the equivalence tests
use it). Both paths compute the same quantities; results agree to rounding,
and each path on its own is bit-reproducible.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.signal

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

ENV_FLAG = "FMCWVITALS_NO_NUMBA"
BACKENDS = ("numba", "numpy")


def _backend_from_env() -> str:
    if not HAVE_NUMBA:
        return "numpy"
    flag = os.environ.get(ENV_FLAG, "").strip().lower()
    return "numba" if flag in ("", "0", "false", "no") else "numpy"


_backend = _backend_from_env()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previous one."""
    global _backend
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    prev, _backend = _backend, name
    return prev


# ---------------------------------------------------------------- tone synthesis

def _add_tones_np(frames, t_fast, freqs, phases, amp):
    w = 2.0 * np.pi * freqs
    frames += amp * np.cos(w[:, None] * t_fast[None, :] + phases[:, None])


# ---------------------------------------------------------------- phase unwrap

def _unwrap_np(values):
    return np.unwrap(values)


# ---------------------------------------------------------------- biquad cascade

def _sosfilt_np(sos, x, zi):
    return scipy.signal.sosfilt(sos, x, zi=zi)


# ---------------------------------------------------------------- rolling median/MAD

def _rolling_median_mad_np(padded, width):
    win = np.lib.stride_tricks.sliding_window_view(padded, width)
    med = np.median(win, axis=1)
    mad = np.median(np.abs(win - med[:, None]), axis=1)
    return med, mad


# ---------------------------------------------------------------- peak picking

def _local_maxima_np(x, thr):
    mid = x[1:-1]
    hit = (mid > x[:-2]) & (mid >= x[2:]) & (mid > thr[1:-1])
    return np.flatnonzero(hit) + 1


def _suppress_np(x, cand, min_dist):
    keep = np.ones(cand.size, dtype=bool)
    order = np.argsort(-x[cand], kind="mergesort")
    for i in order:
        if not keep[i]:
            continue
        j = i - 1
        while j >= 0 and cand[i] - cand[j] < min_dist:
            keep[j] = False
            j -= 1
        j = i + 1
        while j < cand.size and cand[j] - cand[i] < min_dist:
            keep[j] = False
            j += 1
    return cand[keep]


def _pick_peaks_np(x, thr, min_dist):
    return _suppress_np(x, _local_maxima_np(x, thr), min_dist)


if HAVE_NUMBA:

    @njit(cache=True)
    def _add_tones_nb(frames, t_fast, freqs, phases, amp):
        m, n = frames.shape
        for i in range(m):
            w = 2.0 * np.pi * freqs[i]
            p = phases[i]
            for k in range(n):
                frames[i, k] += amp * np.cos(w * t_fast[k] + p)

    @njit(cache=True)
    def _unwrap_nb(values):
        # Same arithmetic as np.unwrap, including its tie rule at exactly pi.
        out = np.empty_like(values)
        if values.size == 0:
            return out
        out[0] = values[0]
        acc = 0.0
        two_pi = 2.0 * np.pi
        for i in range(1, values.size):
            dd = values[i] - values[i - 1]
            ddmod = (dd + np.pi) % two_pi - np.pi
            if ddmod == -np.pi and dd > 0:
                ddmod = np.pi
            corr = ddmod - dd
            if abs(dd) < np.pi:
                corr = 0.0
            acc += corr
            out[i] = values[i] + acc
        return out

    @njit(cache=True)
    def _sosfilt_nb(sos, x, zi):
        # Direct form II transposed, one section after another per sample.
        ns = sos.shape[0]
        z = zi.copy()
        y = np.empty_like(x)
        for i in range(x.size):
            cur = x[i]
            for s in range(ns):
                b0, b1, b2 = sos[s, 0], sos[s, 1], sos[s, 2]
                a1, a2 = sos[s, 4], sos[s, 5]
                out = b0 * cur + z[s, 0]
                z[s, 0] = b1 * cur - a1 * out + z[s, 1]
                z[s, 1] = b2 * cur - a2 * out
                cur = out
            y[i] = cur
        return y, z

    @njit(cache=True)
    def _kth_deviation(buf, lo, hi, med, k):
        # k-th smallest |buf - med| by merging outward from the median split.
        val = 0.0
        for _ in range(k + 1):
            if lo < 0:
                val = buf[hi] - med
                hi += 1
            elif hi >= buf.size:
                val = med - buf[lo]
                lo -= 1
            else:
                dl = med - buf[lo]
                dh = buf[hi] - med
                if dl <= dh:
                    val = dl
                    lo -= 1
                else:
                    val = dh
                    hi += 1
        return val, lo, hi

    @njit(cache=True)
    def _window_stats(buf):
        w = buf.size
        if w % 2 == 1:
            med = buf[w // 2]
        else:
            med = (buf[w // 2 - 1] + buf[w // 2]) / 2.0
        split = np.searchsorted(buf, med)
        k1 = (w - 1) // 2
        v1, lo, hi = _kth_deviation(buf, split - 1, split, med, k1)
        if w % 2 == 1:
            return med, v1
        v2, lo, hi = _kth_deviation(buf, lo, hi, med, 0)
        return med, (v1 + v2) / 2.0

    @njit(cache=True)
    def _rolling_median_mad_nb(padded, width):
        # Sorted sliding buffer: O(width) per step instead of a fresh sort.
        count = padded.size - width + 1
        med = np.empty(count)
        mad = np.empty(count)
        buf = np.sort(padded[:width].copy())
        med[0], mad[0] = _window_stats(buf)
        for i in range(1, count):
            old = padded[i - 1]
            new = padded[i + width - 1]
            j = np.searchsorted(buf, old)
            while j < width - 1:
                buf[j] = buf[j + 1]
                j += 1
            pos = np.searchsorted(buf[: width - 1], new)
            j = width - 1
            while j > pos:
                buf[j] = buf[j - 1]
                j -= 1
            buf[pos] = new
            med[i], mad[i] = _window_stats(buf)
        return med, mad

    @njit(cache=True)
    def _pick_peaks_nb(x, thr, min_dist):
        n = x.size
        cand = np.empty(n, dtype=np.int64)
        nc = 0
        for i in range(1, n - 1):
            if x[i] > x[i - 1] and x[i] >= x[i + 1] and x[i] > thr[i]:
                cand[nc] = i
                nc += 1
        cand = cand[:nc]
        heights = np.empty(nc)
        for i in range(nc):
            heights[i] = -x[cand[i]]
        order = np.argsort(heights, kind="mergesort")
        keep = np.ones(nc, dtype=np.bool_)
        for i in order:
            if not keep[i]:
                continue
            j = i - 1
            while j >= 0 and cand[i] - cand[j] < min_dist:
                keep[j] = False
                j -= 1
            j = i + 1
            while j < nc and cand[j] - cand[i] < min_dist:
                keep[j] = False
                j += 1
        return cand[keep]


def _pick(np_impl, nb_name):
    if _backend == "numba":
        return globals()[nb_name]
    return np_impl


# ---------------------------------------------------------------- public dispatch

def add_tones(frames, t_fast, freqs, phases, amp):
    """Accumulate ``amp * cos(2*pi*f[m]*t + phase[m])`` into ``frames`` in place."""
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    t_fast = np.ascontiguousarray(t_fast, dtype=np.float64)
    _pick(_add_tones_np, "_add_tones_nb")(frames, t_fast, freqs, phases, float(amp))


def unwrap(values):
    values = np.ascontiguousarray(values, dtype=np.float64)
    return _pick(_unwrap_np, "_unwrap_nb")(values)


def sosfilt(sos, x, zi):
    """Run a biquad cascade with initial state ``zi``; returns ``(y, zf)``."""
    sos = np.ascontiguousarray(sos, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    zi = np.ascontiguousarray(zi, dtype=np.float64)
    return _pick(_sosfilt_np, "_sosfilt_nb")(sos, x, zi)


def rolling_median_mad(x, half_width):
    """Centred rolling median and median absolute deviation.

    The window spans ``2*half_width + 1`` samples; the signal is mirror
    extended at both ends so every output sample sees a full window.
    """
    x = np.asarray(x, dtype=np.float64)
    width = 2 * int(half_width) + 1
    if x.size == 0:
        return np.empty(0), np.empty(0)
    padded = np.pad(x, int(half_width), mode="symmetric")
    return _pick(_rolling_median_mad_np, "_rolling_median_mad_nb")(padded, width)


def pick_peaks(x, thr, min_dist):
    """Indices of local maxima above ``thr`` at least ``min_dist`` samples apart.

    A local maximum rises strictly from its left neighbour and does not fall
    below its right one, so a flat top is reported at its left edge. Close
    peaks are resolved in favour of the taller one; equal heights go to the
    earlier index.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    thr = np.ascontiguousarray(np.broadcast_to(thr, x.shape), dtype=np.float64)
    if x.size < 3:
        return np.empty(0, dtype=np.int64)
    out = _pick(_pick_peaks_np, "_pick_peaks_nb")(x, thr, int(max(min_dist, 1)))
    return np.asarray(out, dtype=np.int64)
