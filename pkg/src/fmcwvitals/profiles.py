"""Radar configurations and the chirp constants derived from them."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import InvalidProfile

# The nominal range bins 7.5 / 3 / 1.5 cm are exact only for c = 3e8.
SPEED_OF_LIGHT = 3.0e8


class ProfileId(str, enum.Enum):
    BGT24 = "BGT24"
    BGT60 = "BGT60"
    BGT120 = "BGT120"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class RadarProfile:
    id: ProfileId
    f_start: float  # Hz
    f_end: float  # Hz
    sample_rate: float  # Hz, ADC rate Fc
    samples_per_chirp: int
    chirp_interval: float  # s

    def to_dict(self) -> dict:
        return {
            "id": self.id.value,
            "f_start_hz": self.f_start,
            "f_end_hz": self.f_end,
            "sample_rate_hz": self.sample_rate,
            "samples_per_chirp": self.samples_per_chirp,
            "chirp_interval_s": self.chirp_interval,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RadarProfile:
        return cls(
            id=ProfileId(d["id"]),
            f_start=float(d["f_start_hz"]),
            f_end=float(d["f_end_hz"]),
            sample_rate=float(d["sample_rate_hz"]),
            samples_per_chirp=int(d["samples_per_chirp"]),
            chirp_interval=float(d["chirp_interval_s"]),
        )


@dataclass(frozen=True)
class ChirpDerived:
    bandwidth: float  # Hz
    chirp_duration: float  # s
    slope: float  # Hz/s
    range_bin: float  # m
    max_range: float  # m, n * R
    usable_range: float  # m, n * R / 2 for a real-valued IF
    wavelength: float  # m, at mid-band
    slow_time_rate: float  # Hz


# Common settings shared by all built-in profiles.
_FC = 2.0e6
_N = 128
_INTERVAL = 10e-3

_BANDS = {
    ProfileId.BGT24: (23e9, 25e9),
    ProfileId.BGT60: (58e9, 63e9),
    ProfileId.BGT120: (116e9, 126e9),
}


def make_profile(id: ProfileId | str) -> RadarProfile:
    pid = ProfileId(id) if not isinstance(id, ProfileId) else id
    if pid not in _BANDS:
        raise InvalidProfile(f"{pid.value} is not a built-in profile")
    f0, f1 = _BANDS[pid]
    return RadarProfile(pid, f0, f1, _FC, _N, _INTERVAL)


def custom_profile(f_start, f_end, sample_rate=_FC, samples_per_chirp=_N,
                   chirp_interval=_INTERVAL) -> RadarProfile:
    return RadarProfile(ProfileId.CUSTOM, float(f_start), float(f_end),
                        float(sample_rate), int(samples_per_chirp),
                        float(chirp_interval))


def builtin_profiles() -> list[RadarProfile]:
    return [make_profile(p) for p in _BANDS]


def validate_profile(profile: RadarProfile) -> list[str]:
    """Return every violated invariant; an empty list means the profile is valid."""
    out = []
    if profile.f_start <= 0:
        out.append("non-positive start frequency")
    if profile.f_end == profile.f_start:
        out.append("zero bandwidth")
    elif profile.f_end < profile.f_start:
        out.append("negative bandwidth")
    if profile.sample_rate <= 0:
        out.append("non-positive sample rate")
    if profile.samples_per_chirp < 2:
        out.append("fewer than 2 samples per chirp")
    if profile.sample_rate > 0 and profile.chirp_interval < profile.samples_per_chirp / profile.sample_rate:
        out.append("chirp longer than interval")
    return out


def derive_chirp_params(profile: RadarProfile) -> ChirpDerived:
    problems = validate_profile(profile)
    if problems:
        raise InvalidProfile("; ".join(problems))
    bandwidth = profile.f_end - profile.f_start
    tc = profile.samples_per_chirp / profile.sample_rate
    r = SPEED_OF_LIGHT / (2.0 * bandwidth)
    return ChirpDerived(
        bandwidth=bandwidth,
        chirp_duration=tc,
        slope=bandwidth / tc,
        range_bin=r,
        max_range=profile.samples_per_chirp * r,
        usable_range=profile.samples_per_chirp * r / 2.0,
        wavelength=SPEED_OF_LIGHT / ((profile.f_start + profile.f_end) / 2.0),
        slow_time_rate=1.0 / profile.chirp_interval,
    )
