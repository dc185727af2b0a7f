"""Scene-to-IF synthesis: the forward model of the measurement chain."""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import OutOfRange, Unreachable
from .motion import DisplacementTrace
from .profiles import SPEED_OF_LIGHT, RadarProfile, derive_chirp_params


class PhantomKind(str, enum.Enum):
    METAL = "metal"
    GELATIN = "gelatin"


@dataclass(frozen=True)
class Target:
    base_range: float
    motion: DisplacementTrace | None = None  # None means static
    reflect_amplitude: float = 1.0

    def __post_init__(self):
        if not 0 < self.reflect_amplitude <= 1:
            raise ValueError("reflect_amplitude must lie in (0, 1]")


@dataclass(frozen=True)
class Clutter:
    range: float
    amplitude: float


@dataclass(frozen=True)
class Scene:
    targets: tuple[Target, ...]
    clutter: tuple[Clutter, ...] = ()
    phantom_kind: PhantomKind = PhantomKind.METAL
    incidence_angle: float = 0.0  # degrees

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "clutter", tuple(self.clutter))
        object.__setattr__(self, "phantom_kind", PhantomKind(self.phantom_kind))
        if not self.targets:
            raise ValueError("a scene needs at least one target")


def static_scene(distance, phantom_kind=PhantomKind.METAL, incidence_angle=0.0,
                 motion=None) -> Scene:
    return Scene((Target(distance, motion),), phantom_kind=phantom_kind,
                 incidence_angle=incidence_angle)


@dataclass(frozen=True)
class NoiseModel:
    if_noise_sigma: float = 0.0
    dc_offset: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.if_noise_sigma < 0:
            raise ValueError("if_noise_sigma must be non-negative")

    def with_seed(self, seed: int) -> NoiseModel:
        return replace(self, seed=int(seed))


NOISELESS = NoiseModel()


@dataclass(frozen=True)
class ChirpRecording:
    profile: RadarProfile
    frames: np.ndarray  # M chirps x n samples, real IF
    t0: float = 0.0
    scene_digest: str = field(default="0" * 64)

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        object.__setattr__(self, "frames", frames)
        if frames.ndim != 2 or frames.shape[0] < 1:
            raise ValueError("frames must be a non-empty M x n matrix")
        if frames.shape[1] != self.profile.samples_per_chirp:
            raise ValueError(
                f"frames have {frames.shape[1]} samples, profile says "
                f"{self.profile.samples_per_chirp}")
        if not np.all(np.isfinite(frames)):
            raise ValueError("frames contain non-finite values")

    @property
    def n_chirps(self) -> int:
        return self.frames.shape[0]

    @property
    def slow_times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_chirps) * self.profile.chirp_interval

    def slice(self, start: int, stop: int) -> ChirpRecording:
        t0 = self.t0 + start * self.profile.chirp_interval
        return ChirpRecording(self.profile, self.frames[start:stop], t0, self.scene_digest)


def if_tone(profile: RadarProfile, range_m: float) -> float:
    """Beat frequency of a static reflector, f_IF = 2*S*d/c."""
    derived = derive_chirp_params(profile)
    if not 0 <= range_m <= derived.max_range:
        raise OutOfRange(f"{range_m} m outside [0, {derived.max_range}] m")
    return 2.0 * derived.slope * range_m / SPEED_OF_LIGHT


# Amplitude gain versus incidence angle, derived from the BGT24 rows of the
# baseline-noise table (noise ~ 1/gain), forced monotone and taken to zero
# at grazing incidence.
_ANGLES = np.array([0.0, 30.0, 60.0, 90.0])
_GAIN = {
    PhantomKind.METAL: np.array([1.0, 0.015 / 0.059, 0.015 / 0.059, 0.0]),
    PhantomKind.GELATIN: np.array([0.015 / 0.040, 0.015 / 0.060, 0.015 / 2.988, 0.0]),
}


def angle_gain(phantom_kind, incidence_angle) -> float:
    kind = PhantomKind(phantom_kind)
    angle = float(incidence_angle)
    if not 0 <= angle < 90:
        raise ValueError("incidence angle must lie in [0, 90) degrees")
    return float(np.interp(angle, _ANGLES, _GAIN[kind]))


def _motion_at(motion: DisplacementTrace | None, times):
    if motion is None:
        return np.zeros_like(times)
    if motion.samples.size == 1:
        return np.full_like(times, motion.samples[0])
    if times[-1] > (motion.samples.size - 1) / motion.rate + 1e-9:
        raise ValueError("motion trace is shorter than the recording")
    return np.interp(times, motion.times, motion.samples)


def scene_digest(profile, scene, noise, duration) -> str:
    def motion_id(m):
        if m is None:
            return "static"
        h = hashlib.sha256(np.ascontiguousarray(m.samples).tobytes()).hexdigest()
        return f"{m.rate}:{h}"

    doc = {
        "profile": profile.to_dict(),
        "targets": [[t.base_range, t.reflect_amplitude, motion_id(t.motion)]
                    for t in scene.targets],
        "clutter": [[c.range, c.amplitude] for c in scene.clutter],
        "phantom": scene.phantom_kind.value,
        "angle": scene.incidence_angle,
        "noise": [noise.if_noise_sigma, noise.dc_offset, noise.seed],
        "duration": duration,
    }
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def synthesize_recording(profile: RadarProfile, scene: Scene,
                         noise: NoiseModel = NOISELESS,
                         duration: float = 20.0) -> ChirpRecording:
    """Raw real-valued IF chirps for ``scene``.

    Each reflector at instantaneous range d contributes
    ``a * cos(2*pi*f_IF(d)*t + 4*pi*f_start*d/c)``: the tone encodes range and
    the phase offset is the round-trip delay at the start of the sweep.
    Motion is sampled once per chirp.
    """
    derived = derive_chirp_params(profile)
    if duration < profile.chirp_interval:
        raise ValueError("duration shorter than one chirp interval")
    m = int(np.floor(duration / profile.chirp_interval + 1e-9))
    n = profile.samples_per_chirp
    slow = np.arange(m) * profile.chirp_interval
    t_fast = np.arange(n) / profile.sample_rate
    k_freq = 2.0 * derived.slope / SPEED_OF_LIGHT
    k_phase = 4.0 * np.pi * profile.f_start / SPEED_OF_LIGHT
    gain = angle_gain(scene.phantom_kind, scene.incidence_angle)

    frames = np.zeros((m, n))
    for tgt in scene.targets:
        d = tgt.base_range + _motion_at(tgt.motion, slow)
        if np.any(d <= 0) or np.any(d >= derived.max_range):
            raise OutOfRange(f"target leaves (0, {derived.max_range}) m")
        kernels.add_tones(frames, t_fast, k_freq * d, k_phase * d,
                          tgt.reflect_amplitude * gain)
    for cl in scene.clutter:
        if not 0 < cl.range < derived.max_range:
            raise OutOfRange(f"clutter at {cl.range} m outside (0, {derived.max_range}) m")
        d = np.full(m, cl.range)
        kernels.add_tones(frames, t_fast, k_freq * d, k_phase * d, cl.amplitude)

    if noise.dc_offset:
        frames += noise.dc_offset
    if noise.if_noise_sigma > 0:
        rng = np.random.default_rng(noise.seed)
        frames += rng.normal(0.0, noise.if_noise_sigma, size=frames.shape)
    return ChirpRecording(profile, frames, 0.0,
                          scene_digest(profile, scene, noise, duration))


def noise_calibrate(profile: RadarProfile, scene: Scene, target_baseline: float,
                    seed: int = 0, duration: float = 20.0, tol: float = 0.05) -> NoiseModel:
    """Find the IF noise level whose static-target displacement std hits a target.

    Motion is stripped from the scene. The search brackets the target, then
    bisects ``if_noise_sigma`` on a log scale with a fixed seed (so the
    measured std is a deterministic, monotone function of sigma) until the
    measurement is within ``tol`` of ``target_baseline``.
    """
    from .bench import static_displacement_std

    if not target_baseline > 0:
        raise Unreachable("target baseline must be positive")
    still = replace(scene, targets=tuple(replace(t, motion=None) for t in scene.targets))

    def measure(sigma):
        return static_displacement_std(profile, still, NoiseModel(sigma, 0.0, seed), duration)

    floor = measure(0.0)
    if floor * (1 + tol) >= target_baseline:
        raise Unreachable(f"pipeline floor {floor:.3g} m is above {target_baseline:.3g} m")

    hi = 1e-3
    value = measure(hi)
    while value < target_baseline:
        hi *= 4
        if hi > 1e4:
            raise Unreachable(f"no noise level reaches {target_baseline:.3g} m")
        value = measure(hi)
    lo = hi / 4 if hi > 1e-3 else 0.0
    best = (abs(value / target_baseline - 1), hi)
    for _ in range(80):
        mid = np.sqrt(lo * hi) if lo > 0 else hi / 4
        value = measure(mid)
        err = abs(value / target_baseline - 1)
        best = min(best, (err, mid))
        if err <= tol:
            break
        if value < target_baseline:
            lo = mid
        else:
            hi = mid
    return NoiseModel(best[1], 0.0, seed)
