import dataclasses

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fmcwvitals.errors import InvalidProfile
from fmcwvitals.profiles import (SPEED_OF_LIGHT, ProfileId, RadarProfile, builtin_profiles,
                                 custom_profile, derive_chirp_params, make_profile,
                                 validate_profile)

from . import oracles


@pytest.mark.parametrize("pid, f0, f1, bw, r_cm", [
    ("BGT24", 23e9, 25e9, 2e9, 7.5),
    ("BGT60", 58e9, 63e9, 5e9, 3.0),
    ("BGT120", 116e9, 126e9, 10e9, 1.5),
])
def test_builtin_bands_and_bins(pid, f0, f1, bw, r_cm):
    p = make_profile(pid)
    assert (p.f_start, p.f_end) == (f0, f1)
    assert (p.sample_rate, p.samples_per_chirp, p.chirp_interval) == (2e6, 128, 10e-3)
    d = derive_chirp_params(p)
    assert d.bandwidth == bw
    # exact equality, not approx: 3e8 / (2 * B) is exactly representable here
    assert d.range_bin * 100 == r_cm


def test_bgt60_derived_numbers():
    d = derive_chirp_params(make_profile(ProfileId.BGT60))
    assert d.chirp_duration == pytest.approx(64e-6, rel=1e-15)
    assert d.slope == pytest.approx(7.8125e13, rel=1e-15)
    assert d.max_range == pytest.approx(3.84, rel=1e-15)
    assert d.usable_range == pytest.approx(1.92, rel=1e-15)
    assert d.slow_time_rate == 100.0


def test_custom_bin_one_metre():
    assert derive_chirp_params(custom_profile(10e9, 10e9 + 1.5e8)).range_bin == pytest.approx(1.0)


def test_validate():
    assert validate_profile(make_profile("BGT120")) == []
    assert "zero bandwidth" in validate_profile(custom_profile(24e9, 24e9))
    assert "negative bandwidth" in validate_profile(custom_profile(25e9, 24e9))
    bad = custom_profile(58e9, 63e9, chirp_interval=32e-6)
    assert validate_profile(bad) == ["chirp longer than interval"]
    with pytest.raises(InvalidProfile, match="chirp longer"):
        derive_chirp_params(bad)


def test_validate_lists_every_violation():
    p = RadarProfile(ProfileId.CUSTOM, -1.0, -1.0, 0.0, 1, 1.0)
    assert len(validate_profile(p)) == 4


def test_unknown_builtin():
    with pytest.raises(InvalidProfile):
        make_profile(ProfileId.CUSTOM)
    with pytest.raises(ValueError):
        make_profile("BGT77")


def test_dict_round_trip():
    for p in builtin_profiles() + [custom_profile(10e9, 11e9, 1e6, 64, 1e-3)]:
        assert RadarProfile.from_dict(p.to_dict()) == p


def test_profiles_are_immutable():
    with pytest.raises(dataclasses.FrozenInstanceError):
        make_profile("BGT24").f_start = 1.0


@given(f0=st.floats(1e9, 200e9), bw=st.floats(1e6, 50e9),
       fc=st.floats(1e5, 1e8), n=st.integers(2, 4096))
def test_derived_identities(f0, bw, fc, n):
    p = custom_profile(f0, f0 + bw, fc, n, n / fc * 1.5)
    d = derive_chirp_params(p)
    assert d.range_bin * 2 * d.bandwidth == pytest.approx(SPEED_OF_LIGHT, rel=1e-12)
    assert d.slope * d.chirp_duration == pytest.approx(d.bandwidth, rel=1e-12)
    ref = oracles.chirp_constants(p.f_start, p.f_end, fc, n)
    assert d.wavelength == pytest.approx(ref["lam"], rel=1e-12)
    assert d.max_range == pytest.approx(n * ref["R"], rel=1e-12)
