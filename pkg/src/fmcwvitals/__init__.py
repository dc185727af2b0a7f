"""Simulated FMCW radar recordings and vital-sign extraction."""

__version__ = "0.1.0"

from .motion import BeatTimes, ChestParams, DisplacementTrace, chest_motion, sinusoid_motion
from .pipeline import PipelineOptions, run_pipeline
from .profiles import ProfileId, RadarProfile, derive_chirp_params, make_profile
from .synth import (ChirpRecording, NoiseModel, PhantomKind, Scene, Target,
                    noise_calibrate, static_scene, synthesize_recording)
from .vitals import estimate_rate, sliding_estimates

__all__ = [
    "BeatTimes", "ChestParams", "ChirpRecording", "DisplacementTrace", "NoiseModel",
    "PhantomKind", "PipelineOptions", "ProfileId", "RadarProfile", "Scene", "Target",
    "chest_motion", "derive_chirp_params", "estimate_rate", "make_profile",
    "noise_calibrate", "run_pipeline", "sinusoid_motion", "sliding_estimates",
    "static_scene", "synthesize_recording",
]
