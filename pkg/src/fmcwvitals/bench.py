"""Simulated versions of the four characterization experiments and their metrics.

The hardware numbers below are calibration targets and upper bounds for the
simulation, never exact oracles: coupling, phase noise and mechanical slack
are not modelled.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import LengthMismatch
from .motion import ChestParams, chest_motion, peak_to_peak, sinusoid_motion
from .pipeline import (PipelineOptions, bin_to_range, range_fft, run_pipeline,
                       select_target_bin)
from .profiles import RadarProfile
from .synth import (NOISELESS, NoiseModel, PhantomKind, Scene, static_scene,
                    synthesize_recording)
from .vitals import HEART_BAND, bandpass, detect_beats, lowpass, match_beats, sliding_estimates

PROFILES = ("BGT24", "BGT60", "BGT120")

# Range estimation error, cm: (phantom, distance cm) -> mean, std per radar.
HW_RANGE_ERROR_CM = {
    ("metal", 30): ((6.25, 0.2), (0.49, 0.01), (0.02, 0.0)),
    ("metal", 40): ((5.53, 0.18), (-0.55, 0.01), (-0.87, 0.01)),
    ("metal", 50): ((6.57, 0.3), (0.14, 0.01), (-0.65, 0.01)),
    ("metal", 60): ((3.45, 1.88), (0.64, 0.01), (0.04, 0.0)),
    ("gelatin", 30): ((6.02, 0.2), (1.25, 0.04), (0.05, 0.13)),
    ("gelatin", 40): ((7.2, 3.2), (-0.21, 0.05), (-0.01, 0.72)),
    ("gelatin", 50): ((6.3, 0.76), (0.64, 0.11), (2.32, 0.06)),
    ("gelatin", 60): ((5.0, 0.18), (3.13, 0.01), (4.07, 0.04)),
}

# Baseline noise, mm: (phantom, angle deg) -> per radar.
HW_BASELINE_MM = {
    ("metal", 0): (0.015, 0.004, 0.001),
    ("metal", 30): (0.059, 0.001, 0.001),
    ("metal", 60): (0.044, 0.021, 0.348),
    ("gelatin", 0): (0.040, 0.001, 0.001),
    ("gelatin", 30): (0.060, 0.001, 0.001),
    ("gelatin", 60): (2.988, 0.031, 3.796),
}

# Peak-to-peak displacement error, mm: (phantom, amplitude mm) -> per radar.
HW_DISPLACEMENT_ERROR_MM = {
    ("metal", 1.2): (0.038, 0.018, 0.028),
    ("metal", 0.3): (0.055, 0.010, 0.010),
    ("metal", 0.08): (0.020, 0.047, 0.004),
    ("gelatin", 1.2): (0.071, 0.040, 0.059),
    ("gelatin", 0.3): (0.120, 0.033, 0.013),
    ("gelatin", 0.08): (0.026, 0.019, 0.015),
}

# Heart-rate MAE (bpm) and its std on human subjects, per radar.
HW_HR_MAE_BPM = {"BGT24": (4.0, 7.0), "BGT60": (6.0, 7.0), "BGT120": (0.4, 1.0)}

BASELINE_UNITS_NOTE = ("Baseline noise is the standard deviation of the displacement trace "
               "in mm; the reference table labels it a phase variance in mm.")


def reference_value(table, key, profile_id):
    return table[key][PROFILES.index(profile_id)]


class Experiment(str, enum.Enum):
    RANGE = "range"
    BASELINE_NOISE = "noise"
    DISPLACEMENT = "displacement"
    VITALS = "vitals"


@dataclass
class ReportRow:
    label: str
    profile: str
    phantom: str
    setting: str
    value: float
    units: str
    std: float | None = None
    flag: str = ""

    def as_dict(self):
        return {"label": self.label, "profile": self.profile, "phantom": self.phantom,
                "setting": self.setting, "value": self.value, "std": self.std,
                "units": self.units, "flag": self.flag}


@dataclass
class ExperimentReport:
    experiment: Experiment
    rows: list[ReportRow] = field(default_factory=list)
    seed: int = 0
    version: str = __version__
    notes: list[str] = field(default_factory=list)
    # Plot data: name -> column name -> array.
    series: dict[str, dict[str, np.ndarray]] = field(default_factory=dict)

    def extend(self, other: ExperimentReport):
        self.rows.extend(other.rows)
        self.series.update(other.series)
        for n in other.notes:
            if n not in self.notes:
                self.notes.append(n)
        return self

    def values(self, **match) -> list[float]:
        return [r.value for r in self.rows
                if all(getattr(r, k) == v for k, v in match.items())]


def child_noise(noise: NoiseModel | None, *keys) -> NoiseModel:
    """Per-job noise with its own random stream derived from the base seed."""
    noise = noise or NOISELESS
    ss = np.random.SeedSequence([noise.seed, *[int(k) for k in keys]])
    return noise.with_seed(int(ss.generate_state(1, dtype=np.uint64)[0] >> 1))


def mae(estimates, truth) -> float:
    e = np.asarray(estimates, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if e.shape != t.shape:
        raise LengthMismatch(f"{e.size} estimates against {t.size} truth values")
    return float(np.mean(np.abs(e - t)))


# ---------------------------------------------------------------- range

def range_experiment(profile: RadarProfile, distances, phantom_kind=PhantomKind.METAL,
                     noise: NoiseModel | None = None, duration=60.0, n_sub=12,
                     pad_target=0.00157, window="hann") -> ExperimentReport:
    """Static target per distance; error of the per-sub-interval mean range.

    Each sub-interval estimate is the average of per-chirp argmax ranges on
    the zero-padded range FFT.
    """
    phantom = PhantomKind(phantom_kind)
    seed = (noise or NOISELESS).seed
    report = ExperimentReport(Experiment.RANGE, seed=seed)
    for i, dist in enumerate(distances):
        rec = synthesize_recording(profile, static_scene(dist, phantom),
                                   child_noise(noise, i), duration)
        edges = np.linspace(0, rec.n_chirps, n_sub + 1).round().astype(int)
        errors = []
        for a, b in zip(edges[:-1], edges[1:]):
            series = range_fft(rec.slice(a, b), pad_target, window)
            ranges = bin_to_range(select_target_bin(series, "per_chirp"), series)
            errors.append(np.mean(ranges) - dist)
        errors = np.asarray(errors) * 100
        report.rows.append(ReportRow(
            f"{profile.id.value}/{phantom.value}/{dist * 100:g}cm", profile.id.value,
            phantom.value, f"{dist * 100:g} cm", float(errors.mean()), "cm",
            float(errors.std())))
    return report


# ---------------------------------------------------------------- baseline noise

def baseline_noise_experiment(profile: RadarProfile, phantom_kind=PhantomKind.METAL,
                              angle=0.0, noise: NoiseModel | None = None,
                              duration=20.0, distance=0.5) -> float:
    """Standard deviation (m) of the displacement of a static target.

    Clutter removal is off: on a static scene the slow-time mean is the
    target itself.
    """
    return static_displacement_std(profile, static_scene(distance, phantom_kind, angle),
                                   noise, duration)


def static_displacement_std(profile: RadarProfile, scene: Scene,
                            noise: NoiseModel | None = None, duration=20.0) -> float:
    rec = synthesize_recording(profile, scene, noise or NOISELESS, duration)
    _, trace = run_pipeline(rec, PipelineOptions(dc_removal=False))
    return float(np.std(trace.samples))


def baseline_noise_report(profile: RadarProfile, noise: NoiseModel | None,
                          phantoms=(PhantomKind.METAL, PhantomKind.GELATIN),
                          angles=(0.0, 30.0, 60.0), duration=20.0,
                          distance=0.5) -> ExperimentReport:
    report = ExperimentReport(Experiment.BASELINE_NOISE, seed=(noise or NOISELESS).seed,
                              notes=[BASELINE_UNITS_NOTE])
    for i, ph in enumerate(phantoms):
        ph = PhantomKind(ph)
        for j, ang in enumerate(angles):
            std = baseline_noise_experiment(profile, ph, ang, child_noise(noise, i, j),
                                            duration, distance)
            report.rows.append(ReportRow(
                f"{profile.id.value}/{ph.value}/{ang:g}deg", profile.id.value, ph.value,
                f"{ang:g} deg", std * 1e3, "mm"))
    return report


# ---------------------------------------------------------------- displacement

def displacement_experiment(profile: RadarProfile, amplitudes,
                            phantom_kind=PhantomKind.METAL, noise: NoiseModel | None = None,
                            freq=0.5, step=0.4e-6, duration=20.0, distance=0.5,
                            smooth_cutoff: float | None = 2.0,
                            options: PipelineOptions | None = None) -> ExperimentReport:
    """Peak-to-peak error of the recovered sinusoid against the commanded one.

    Both traces go through the same zero-phase low-pass (``smooth_cutoff``,
    None to skip) before max minus min is taken, so white noise far above
    the motion band does not inflate the radar's extremes.
    """
    phantom = PhantomKind(phantom_kind)
    rate = 1.0 / profile.chirp_interval
    report = ExperimentReport(Experiment.DISPLACEMENT, seed=(noise or NOISELESS).seed)
    for i, amp in enumerate(amplitudes):
        truth = sinusoid_motion(amp, freq, duration, rate, step, distance)
        rec = synthesize_recording(profile, static_scene(distance, phantom, motion=truth),
                                   child_noise(noise, i), duration)
        _, est = run_pipeline(rec, options)
        t_s, e_s = truth, est
        if smooth_cutoff is not None:
            t_s, e_s = lowpass(truth, smooth_cutoff), lowpass(est, smooth_cutoff)
        err = abs(peak_to_peak(e_s) - peak_to_peak(t_s))
        label = f"{profile.id.value}/{phantom.value}/{amp * 1e3:g}mm"
        report.rows.append(ReportRow(label, profile.id.value, phantom.value,
                                     f"{amp * 1e3:g} mm", err * 1e3, "mm",
                                     flag="degenerate" if amp == 0 else ""))
        report.series[f"displacement_{label.replace('/', '_')}"] = {
            "time_s": est.times, "displacement_m": est.samples,
            "truth_m": truth.samples[:len(est)]}
    return report


# ---------------------------------------------------------------- vitals

@dataclass
class VitalsOutcome:
    hr_mae: float
    rr_mae: float
    sensitivity: float
    precision: float
    estimates: list


def vitals_run(profile: RadarProfile, chest: ChestParams, duration=120.0,
               noise: NoiseModel | None = None, distance=0.5, window=60.0, step=1.0,
               options: PipelineOptions | None = None, tol=0.150,
               rate_kw: dict | None = None) -> VitalsOutcome:
    rate = 1.0 / profile.chirp_interval
    truth, beats = chest_motion(chest, duration, rate, distance)
    rec = synthesize_recording(profile, static_scene(distance, motion=truth),
                               noise or NOISELESS, duration)
    _, est = run_pipeline(rec, options)
    estimates = sliding_estimates(est, window, step, **(rate_kw or {}))
    hr = [e.hr for e in estimates]
    rr = [e.rr for e in estimates]
    detected = detect_beats(bandpass(est, HEART_BAND))
    match = match_beats(detected, beats, tol)
    return VitalsOutcome(mae(hr, np.full(len(hr), 60 * chest.hr)),
                         mae(rr, np.full(len(rr), 60 * chest.rr)),
                         match.sensitivity, match.precision, estimates)


def vitals_experiment(profile: RadarProfile, chest: ChestParams, duration=120.0,
                      noise: NoiseModel | None = None, **kw) -> ExperimentReport:
    if duration < kw.get("window", 60.0):
        raise ValueError("duration shorter than one estimation window")
    out = vitals_run(profile, chest, duration, noise, **kw)
    pid = profile.id.value
    report = ExperimentReport(Experiment.VITALS, seed=(noise or NOISELESS).seed)
    setting = f"hr {chest.hr * 60:g} bpm, rr {chest.rr * 60:g} brpm"
    report.rows += [
        ReportRow(f"{pid}/hr_mae", pid, "chest", setting, out.hr_mae, "bpm"),
        ReportRow(f"{pid}/rr_mae", pid, "chest", setting, out.rr_mae, "brpm"),
        ReportRow(f"{pid}/beat_sensitivity", pid, "chest", setting, out.sensitivity, "ratio"),
        ReportRow(f"{pid}/beat_precision", pid, "chest", setting, out.precision, "ratio"),
    ]
    report.series[f"rolling_{pid}"] = {
        "window_start_s": np.array([e.window_start for e in out.estimates]),
        "hr_bpm": np.array([e.hr for e in out.estimates]),
        "rr_brpm": np.array([e.rr for e in out.estimates]),
        "hr_truth_bpm": np.full(len(out.estimates), chest.hr * 60),
        "rr_truth_brpm": np.full(len(out.estimates), chest.rr * 60),
    }
    if chest.breath_harmonics:
        report.notes.append(
            "Breathing harmonics inside the heart band can outrank the heartbeat "
            "line; a plain FFT peak then reports the harmonic as the heart rate.")
    return report
