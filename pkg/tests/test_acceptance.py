"""Acceptance suite: one marker per criterion, summarised at the end of the run.

Each check runs at its stated tolerance. The terminal summary prints one
PASS/FAIL line per criterion (see conftest.py).
"""

import time

import numpy as np
import pytest

from fmcwvitals import bench, kernels, report, runner
from fmcwvitals.motion import ChestParams, DisplacementTrace, chest_motion, sinusoid_motion
from fmcwvitals.pipeline import fft_length, range_fft, run_pipeline
from fmcwvitals.profiles import derive_chirp_params, make_profile
from fmcwvitals.recfile import decode_recording, encode_recording
from fmcwvitals.scenario import load_scenario, resolve_scenario
from fmcwvitals.synth import (ChirpRecording, NoiseModel, PhantomKind, Scene, Target,
                              noise_calibrate, static_scene, synthesize_recording)
from fmcwvitals.vitals import HEART_BAND, RESP_BAND, bandpass

from . import oracles

PAD = 0.00157
_suite_start = time.perf_counter()


def calibrated(pid, seed=11):
    """IF noise that reproduces the metal 0 deg baseline for this radar."""
    target = bench.reference_value(bench.HW_BASELINE_MM, ("metal", 0), pid) * 1e-3
    sigma = noise_calibrate(make_profile(pid), static_scene(0.5), target, seed=seed)
    return sigma.if_noise_sigma


# ---------------------------------------------------------------- 1. range

@pytest.mark.criterion(1, "range error within one achieved bin, under 5 s")
def test_range_within_bin_and_fast():
    t0 = time.perf_counter()
    reports = {pid: bench.range_experiment(make_profile(pid), [0.3, 0.4, 0.5, 0.6],
                                           PhantomKind.METAL, None, pad_target=PAD)
               for pid in bench.PROFILES}
    elapsed = time.perf_counter() - t0
    for pid, rep in reports.items():
        p = make_profile(pid)
        bin_cm = derive_chirp_params(p).range_bin * p.samples_per_chirp / fft_length(p, PAD) * 100
        assert bin_cm <= PAD * 100
        for row in rep.rows:
            assert abs(row.value) <= bin_cm, row.label
    assert elapsed < 5.0, f"{elapsed:.2f} s"


# ---------------------------------------------------------------- 2. calibration

@pytest.mark.criterion(2, "calibrated baseline noise reproduces within 20%")
@pytest.mark.parametrize("pid, target_mm", [("BGT24", 0.015), ("BGT120", 0.001)])
def test_calibration_reproduces(pid, target_mm):
    p = make_profile(pid)
    sigma = noise_calibrate(p, static_scene(0.5), target_mm * 1e-3, seed=1).if_noise_sigma
    fresh = bench.static_displacement_std(p, static_scene(0.5), NoiseModel(sigma, 0.0, 987654),
                                          duration=20.0)
    assert 0.8 <= fresh / (target_mm * 1e-3) <= 1.2


# ---------------------------------------------------------------- 3. displacement

AMPS = [0.08e-3, 0.3e-3, 1.2e-3]


@pytest.mark.criterion(3, "peak-to-peak displacement error")
@pytest.mark.parametrize("pid", bench.PROFILES)
def test_displacement_noiseless(pid):
    rep = bench.displacement_experiment(make_profile(pid), AMPS, freq=0.5, step=0.4e-6)
    for row, amp in zip(rep.rows, AMPS):
        assert row.value <= 0.02 * amp * 1e3, row.label


@pytest.mark.criterion(3, "peak-to-peak displacement error")
@pytest.mark.parametrize("pid", bench.PROFILES)
def test_displacement_calibrated_noise(pid):
    noise = NoiseModel(calibrated(pid), 0.0, 21)
    rep = bench.displacement_experiment(make_profile(pid), AMPS, PhantomKind.METAL, noise,
                                        freq=0.5, step=0.4e-6)
    for row, amp in zip(rep.rows, AMPS):
        bound = bench.reference_value(bench.HW_DISPLACEMENT_ERROR_MM,
                                  ("metal", round(amp * 1e3, 2)), pid) + 0.01
        assert row.value <= bound, f"{row.label}: {row.value:.4f} > {bound:.4f}"


# ---------------------------------------------------------------- 4. vitals

CHEST = ChestParams(rr=15 / 60, hr=72 / 60, breath_amplitude=1.2e-3, heart_amplitude=0.3e-3)


@pytest.mark.criterion(4, "vital-sign rates and beat matching with calibrated noise")
def test_vitals_calibrated():
    noise = NoiseModel(calibrated("BGT120"), 0.0, 5)
    out = bench.vitals_run(make_profile("BGT120"), CHEST, 120.0, noise, tol=0.150)
    assert len(out.estimates) == 61
    assert out.hr_mae <= 1.0
    assert out.rr_mae <= 1.0
    assert out.sensitivity >= 0.9


# ---------------------------------------------------------------- 5. harmonic confusion

@pytest.mark.criterion(5, "breathing harmonic confuses the heart rate")
def test_harmonic_confusion():
    chest = ChestParams(rr=15 / 60, hr=72 / 60, breath_amplitude=1.2e-3,
                        heart_amplitude=0.3e-3, breath_harmonics=((4, 0.9),))
    assert 4 * chest.rr != chest.hr
    noise = NoiseModel(calibrated("BGT120"), 0.0, 5)
    rep = bench.vitals_experiment(make_profile("BGT120"), chest, 120.0, noise)
    assert rep.values(label="BGT120/hr_mae")[0] > 5.0
    assert any("harmonic" in n for n in rep.notes)
    assert "harmonic" in report.markdown_report([rep])


# ---------------------------------------------------------------- 6. properties

@pytest.mark.criterion(6, "property suites")
def test_unwrap_exact_on_random_walks(backend):
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(2, 400))
        steps = rng.uniform(-0.95 * np.pi, 0.95 * np.pi, n - 1)
        walk = rng.uniform(-np.pi, np.pi) + np.concatenate([[0.0], np.cumsum(steps)])
        back = kernels.unwrap(oracles.wrap(walk))
        assert np.max(np.abs(back - walk)) <= 1e-9


@pytest.mark.criterion(6, "property suites")
@pytest.mark.parametrize("pid", bench.PROFILES)
@pytest.mark.parametrize("kind", ["sinusoid", "chest"])
def test_pipeline_round_trip(pid, kind):
    p = make_profile(pid)
    lam = derive_chirp_params(p).wavelength
    if kind == "sinusoid":
        truth = sinusoid_motion(0.5e-3, 0.4, 20, 100, 0.0, 0.45)
    else:
        truth, _ = chest_motion(CHEST, 20, 100, 0.45)
    rec = synthesize_recording(p, static_scene(0.45, motion=truth), duration=20)
    _, est = run_pipeline(rec)
    ref = truth.samples - truth.samples[0]
    assert np.sqrt(np.mean((est.samples - ref) ** 2)) <= lam / 1000
    assert np.corrcoef(est.samples, ref)[0, 1] >= 0.999


@pytest.mark.criterion(6, "property suites")
@pytest.mark.parametrize("band", [HEART_BAND, RESP_BAND], ids=["heart", "respiration"])
def test_bandpass_response(band):
    def gain_db(f):
        g = oracles.tone_gain(lambda x: bandpass(DisplacementTrace(100, x), band).samples, f)
        return 20 * np.log10(g)

    for f in np.linspace(band.low, band.high, 15):
        assert abs(gain_db(f)) <= 1.0, f
    for f in (band.low / 2, band.high * 2):
        assert gain_db(f) <= -20.0, f


@pytest.mark.criterion(6, "property suites")
def test_parseval():
    rng = np.random.default_rng(7)
    p = make_profile("BGT60")
    for pad in (None, 0.01, PAD):
        x = rng.normal(size=(5, 128))
        s = range_fft(ChirpRecording(p, x), pad, "rect")
        X, n = s.spectra, s.n_fft
        energy = (np.abs(X[:, 0]) ** 2 + np.abs(X[:, -1]) ** 2
                  + 2 * np.sum(np.abs(X[:, 1:-1]) ** 2, axis=1)) / n
        assert np.allclose(energy, np.sum(x ** 2, axis=1), rtol=1e-9, atol=0)


@pytest.mark.criterion(6, "property suites")
@pytest.mark.parametrize("pid", bench.PROFILES)
def test_superposition(pid):
    p = make_profile(pid)
    ta = Target(0.33, sinusoid_motion(0.2e-3, 0.5, 1, 100, 0.0, 0.33), 0.7)
    tb = Target(0.61, None, 0.4)
    both = synthesize_recording(p, Scene((ta, tb)), duration=1).frames
    ra = synthesize_recording(p, Scene((ta,)), duration=1).frames
    rb = synthesize_recording(p, Scene((tb,)), duration=1).frames
    assert np.max(np.abs(both - (ra + rb))) <= 1e-9


@pytest.mark.criterion(6, "property suites")
def test_recording_round_trip_bit_exact():
    rec = synthesize_recording(make_profile("BGT120"), static_scene(0.5),
                               NoiseModel(0.05, 0.1, 3), 2.0)
    rec = ChirpRecording(rec.profile, rec.frames.astype(np.float32).astype(np.float64),
                         rec.t0, rec.scene_digest)
    data = encode_recording(rec)
    back = decode_recording(data)
    assert back.frames.tobytes() == rec.frames.tobytes()
    assert back.profile == rec.profile and back.scene_digest == rec.scene_digest
    assert encode_recording(back) == data


# ---------------------------------------------------------------- 7. determinism

BENCH_RUNS = [("range", "table2_metal"), ("range", "range_gelatin"),
              ("noise", "baseline_noise"), ("displacement", "displacement_sweep"),
              ("vitals", "vitals_chest"), ("vitals", "vitals_harmonic")]


def _bench_bytes(experiment, scenario, outdir):
    rep = runner.run_experiment(experiment, load_scenario(resolve_scenario(scenario)))
    return {p.name: p.read_bytes() for p in report.write_bench_outputs(rep, outdir)}


@pytest.mark.criterion(7, "bench runs are bit-reproducible; suite under 2 minutes")
@pytest.mark.parametrize("experiment, scenario", BENCH_RUNS)
def test_bench_bit_reproducible(experiment, scenario, tmp_path):
    first = _bench_bytes(experiment, scenario, tmp_path / "a")
    second = _bench_bytes(experiment, scenario, tmp_path / "b")
    assert first == second
    assert first


@pytest.mark.criterion(7, "bench runs are bit-reproducible; suite under 2 minutes")
def test_suite_time_budget():
    # Runs last in this module: measures everything above, imports included.
    elapsed = time.perf_counter() - _suite_start
    assert elapsed < 120.0, f"{elapsed:.1f} s"
