"""Binary recording files.

Layout, all little-endian, no padding::

    magic        8s   b"FMCWREC1"
    version      u32  1
    f_start_hz   u64
    f_end_hz     u64
    sample_rate  u64  Hz
    n            u32  samples per chirp
    m            u32  chirps
    interval     f64  seconds between chirps
    digest       32s  sha256 of the scene description
    payload      m*n float32, chirp-major

Samples are stored as float32, so a float64 recording loses precision on
the first write; after that, read/write cycles are byte-identical.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .errors import BadMagic, RecordingFormatError, TruncatedPayload, VersionUnsupported
from .profiles import ProfileId, RadarProfile, builtin_profiles
from .synth import ChirpRecording

MAGIC = b"FMCWREC1"
VERSION = 1
HEADER = struct.Struct("<8sIQQQIId32s")
HEADER_SIZE = HEADER.size  # 84 bytes


def _profile_from_fields(f_start, f_end, fc, n, interval) -> RadarProfile:
    fields = (float(f_start), float(f_end), float(fc), int(n), float(interval))
    for p in builtin_profiles():
        if (p.f_start, p.f_end, p.sample_rate, p.samples_per_chirp, p.chirp_interval) == fields:
            return p
    return RadarProfile(ProfileId.CUSTOM, *fields)


def _hz(value, name):
    if value < 0 or value != int(value):
        raise ValueError(f"{name} = {value} is not a whole number of Hz")
    return int(value)


def encode_recording(recording: ChirpRecording) -> bytes:
    p = recording.profile
    m, n = recording.frames.shape
    digest = bytes.fromhex(recording.scene_digest)
    if len(digest) != 32:
        raise ValueError("scene digest must be 32 bytes")
    header = HEADER.pack(MAGIC, VERSION, _hz(p.f_start, "f_start"), _hz(p.f_end, "f_end"),
                         _hz(p.sample_rate, "sample_rate"), n, m, float(p.chirp_interval),
                         digest)
    return header + np.ascontiguousarray(recording.frames, dtype="<f4").tobytes()


def decode_recording(data: bytes) -> ChirpRecording:
    if bytes(data[:8]) != MAGIC:
        raise BadMagic(f"expected magic {MAGIC!r}, found {bytes(data[:8])!r}")
    if len(data) < HEADER_SIZE:
        raise TruncatedPayload(f"header needs {HEADER_SIZE} bytes, file has {len(data)}")
    _, version, f0, f1, fc, n, m, interval, digest = HEADER.unpack_from(data)
    if version != VERSION:
        raise VersionUnsupported(f"version {version} (this reader handles {VERSION})")
    need = 4 * m * n
    have = len(data) - HEADER_SIZE
    if have < need:
        raise TruncatedPayload(f"payload has {have} bytes, header promises {need}")
    if have > need:
        raise RecordingFormatError(f"{have - need} trailing bytes after the payload")
    frames = np.frombuffer(data, dtype="<f4", count=m * n, offset=HEADER_SIZE)
    profile = _profile_from_fields(f0, f1, fc, n, interval)
    return ChirpRecording(profile, frames.reshape(m, n).astype(np.float64), 0.0, digest.hex())


def write_recording(recording: ChirpRecording, path) -> None:
    data = encode_recording(recording)
    tmp = f"{os.fspath(path)}.part"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def read_recording(path) -> ChirpRecording:
    with open(path, "rb") as fh:
        return decode_recording(fh.read())
