"""Turn a scenario into recordings and experiment reports."""

from __future__ import annotations

import numpy as np

from . import bench
from .errors import ParseError
from .motion import chest_motion, sinusoid_motion
from .pipeline import PipelineOptions, default_dc_removal
from .profiles import ProfileId, RadarProfile
from .scenario import ScenarioConfig
from .synth import (Clutter, NoiseModel, PhantomKind, Scene, Target, noise_calibrate,
                    static_scene, synthesize_recording)

EXPERIMENTS = ("range", "noise", "displacement", "vitals")


def _profile_seed(seed, profile: RadarProfile):
    # Stable per-radar stream, independent of the order radars are listed in.
    tag = int.from_bytes(profile.id.value.encode(), "little") % (2**31)
    ss = np.random.SeedSequence([int(seed), tag])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def noise_for(cfg: ScenarioConfig, profile: RadarProfile) -> NoiseModel:
    seed = _profile_seed(cfg.seed, profile)
    mode = cfg.get("noise", "calibrate")
    dc = cfg.get("noise", "dc_offset")
    if mode == "none":
        return NoiseModel(cfg.get("noise", "if_noise_sigma"), dc, seed)
    if mode == "reference":
        if profile.id == ProfileId.CUSTOM:
            raise ParseError("calibrate = reference has no reference value for a Custom radar")
        target = bench.reference_value(bench.HW_BASELINE_MM, ("metal", 0), profile.id.value) * 1e-3
    else:
        target = cfg.get("noise", "target_baseline")
        if target is None:
            raise ParseError("calibrate = target needs target_baseline")
    ref = static_scene(0.5, PhantomKind.METAL, 0.0)
    sigma = noise_calibrate(profile, ref, target, seed=seed).if_noise_sigma
    return NoiseModel(sigma, dc, seed)


def options_for(cfg: ScenarioConfig, profile: RadarProfile, pad=True) -> PipelineOptions:
    mode = cfg.get("processing", "dc_removal")
    dc = default_dc_removal(profile) if mode == "auto" else mode == "on"
    return PipelineOptions(cfg.get("processing", "pad") if pad else None, dc,
                           cfg.get("processing", "bin_policy"), cfg.get("processing", "window"))


def scene_for(cfg: ScenarioConfig, profile: RadarProfile, duration: float):
    """The configured scene plus its ground truth (trace, beats or None)."""
    rate = 1.0 / profile.chirp_interval
    dist = cfg.get("scene", "distance")
    kind = cfg.get("motion", "kind")
    beats = None
    if kind == "static":
        motion = None
    elif kind == "sinusoid":
        motion = sinusoid_motion(cfg.get("motion", "amplitude"), cfg.get("motion", "frequency"),
                                 duration, rate, cfg.get("motion", "step"), dist)
    else:
        motion, beats = chest_motion(cfg.chest(), duration, rate, dist)
    ranges, amps = cfg.get("scene", "clutter_range"), cfg.get("scene", "clutter_amplitude")
    if len(ranges) != len(amps):
        raise ParseError("clutter_range and clutter_amplitude differ in length")
    scene = Scene((Target(dist, motion, cfg.get("scene", "reflect_amplitude")),),
                  tuple(Clutter(r, a) for r, a in zip(ranges, amps)),
                  cfg.get("scene", "phantom"), cfg.get("scene", "angle"))
    return scene, motion, beats


def simulate(cfg: ScenarioConfig, profile: RadarProfile | None = None):
    profile = profile or cfg.profiles()[0]
    duration = cfg.get("motion", "duration")
    scene, _, _ = scene_for(cfg, profile, duration)
    return synthesize_recording(profile, scene, noise_for(cfg, profile), duration)


def _one(experiment, cfg: ScenarioConfig, profile: RadarProfile, noise: NoiseModel):
    if experiment == "range":
        return bench.range_experiment(
            profile, cfg.get("range", "distances"), cfg.get("range", "phantom"), noise,
            cfg.get("range", "duration"), cfg.get("range", "sub_intervals"),
            cfg.get("processing", "pad"), cfg.get("processing", "window"))
    if experiment == "noise":
        return bench.baseline_noise_report(
            profile, noise, cfg.get("baseline", "phantoms"), cfg.get("baseline", "angles"),
            cfg.get("baseline", "duration"), cfg.get("baseline", "distance"))
    if experiment == "displacement":
        return bench.displacement_experiment(
            profile, cfg.get("displacement", "amplitudes"), cfg.get("displacement", "phantom"),
            noise, cfg.get("displacement", "frequency"), cfg.get("displacement", "step"),
            cfg.get("displacement", "duration"), cfg.get("displacement", "distance"),
            cfg.get("displacement", "smooth_cutoff"), options_for(cfg, profile, pad=False))
    if experiment == "vitals":
        return bench.vitals_experiment(
            profile, cfg.chest(), cfg.get("vitals", "duration"), noise,
            distance=cfg.get("vitals", "distance"), window=cfg.get("vitals", "window"),
            step=cfg.get("vitals", "step"), options=options_for(cfg, profile, pad=False),
            tol=cfg.get("vitals", "beat_tolerance"))
    raise ValueError(f"unknown experiment {experiment!r}")


def run_experiment(experiment: str, cfg: ScenarioConfig) -> bench.ExperimentReport:
    """Every configured radar in turn; each radar owns its own noise stream."""
    report = bench.ExperimentReport(bench.Experiment(experiment), seed=cfg.seed)
    for profile in cfg.profiles():
        noise = noise_for(cfg, profile)
        if cfg.get("noise", "calibrate") != "none":
            report.notes.append(f"{profile.id.value}: IF noise sigma calibrated to "
                                f"{noise.if_noise_sigma:.6g}")
        report.extend(_one(experiment, cfg, profile, noise))
    return report
