"""Time each hot kernel, and two end-to-end runs, on both backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]

JIT compilation is excluded: every kernel is called once before timing.
"""

import argparse
import time

import numpy as np
import scipy.signal

from fmcwvitals import bench, kernels
from fmcwvitals.motion import ChestParams, chest_motion
from fmcwvitals.pipeline import run_pipeline
from fmcwvitals.profiles import make_profile
from fmcwvitals.synth import NoiseModel, static_scene, synthesize_recording


def best_of(fn, repeat):
    fn()  # warm-up (and compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(quick):
    rng = np.random.default_rng(0)
    m = 2000 if quick else 12000
    frames = np.zeros((m, 128))
    t_fast = np.arange(128) / 2e6
    freqs = rng.uniform(1e4, 5e5, m)
    phases = rng.uniform(-np.pi, np.pi, m)
    walk = np.cumsum(rng.normal(0, 1.0, m * 10))
    wrapped = np.angle(np.exp(1j * walk))
    sos = scipy.signal.butter(2, (0.7, 2.0), btype="bandpass", fs=100, output="sos")
    x = rng.normal(size=m)
    zi = scipy.signal.sosfilt_zi(sos) * x[0]
    thr = np.zeros(m)
    p = make_profile("BGT120")
    chest, _ = chest_motion(ChestParams(), m / 100, 100)
    rec = synthesize_recording(p, static_scene(0.5, motion=chest), NoiseModel(0.03, 0, 1), m / 100)

    return [
        (f"add_tones ({m} chirps)", lambda: kernels.add_tones(frames, t_fast, freqs, phases, 1.0)),
        (f"unwrap ({wrapped.size})", lambda: kernels.unwrap(wrapped)),
        (f"sosfilt ({m})", lambda: kernels.sosfilt(sos, x, zi)),
        (f"rolling median/MAD ({m}, w=501)", lambda: kernels.rolling_median_mad(x, 250)),
        (f"pick_peaks ({m})", lambda: kernels.pick_peaks(x, thr, 50)),
        ("synthesize + pipeline", lambda: run_pipeline(synthesize_recording(
            p, static_scene(0.5, motion=chest), NoiseModel(0.03, 0, 1), m / 100))),
        ("vitals run (BGT120, 120 s)" if not quick else "vitals run (BGT120, 60 s)",
         lambda: bench.vitals_run(p, ChestParams(), 60.0 if quick else 120.0,
                                  NoiseModel(0.03, 0, 1))),
        ("pipeline only", lambda: run_pipeline(rec)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller inputs")
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        print("numba is not installed; only the numpy backend can be timed")

    rows = []
    for name, fn in cases(args.quick):
        t = {}
        for backend in kernels.BACKENDS:
            if backend == "numba" and not kernels.HAVE_NUMBA:
                continue
            prev = kernels.set_backend(backend)
            try:
                t[backend] = best_of(fn, args.repeat)
            finally:
                kernels.set_backend(prev)
        rows.append((name, t.get("numba"), t["numpy"]))

    w = max(len(r[0]) for r in rows)
    print(f"{'case'.ljust(w)}  {'numba ms':>10}  {'numpy ms':>10}  {'speedup':>8}")
    for name, nb, npy in rows:
        nb_s = f"{nb * 1e3:10.2f}" if nb is not None else f"{'-':>10}"
        sp = f"{npy / nb:8.2f}" if nb else f"{'-':>8}"
        print(f"{name.ljust(w)}  {nb_s}  {npy * 1e3:10.2f}  {sp}")


if __name__ == "__main__":
    main()
