"""Scenario files: INI sections whose physical keys carry their unit in the name.

``distance_cm = 50`` and ``distance_m = 0.5`` mean the same thing; a bare
``distance = 50`` is rejected. Lists are comma separated. Every value is
converted to SI (angles to degrees) on load.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, UnitViolation, UnknownKey
from .motion import ChestParams
from .profiles import ProfileId, RadarProfile, custom_profile, make_profile

UNITS = {
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6},
    "frequency": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9, "bpm": 1 / 60, "brpm": 1 / 60},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "min": 60.0},
    "angle": {"deg": 1.0, "rad": math.degrees(1.0)},
}


@dataclass(frozen=True)
class Key:
    kind: str  # a UNITS dimension, or int / float / str / choice
    default: object = None
    many: bool = False
    choices: tuple = ()


def _choice(default, *options, many=False):
    return Key("choice", default, many, options)


SCHEMA = {
    "run": {
        "name": Key("str", "scenario"),
        "seed": Key("int", 0),
    },
    "radar": {
        "profiles": _choice(("BGT24", "BGT60", "BGT120"), "BGT24", "BGT60", "BGT120",
                            "Custom", many=True),
        "f_start": Key("frequency"),
        "f_end": Key("frequency"),
        "sample_rate": Key("frequency", 2e6),
        "samples_per_chirp": Key("int", 128),
        "chirp_interval": Key("time", 10e-3),
    },
    "scene": {
        "phantom": _choice("metal", "metal", "gelatin"),
        "distance": Key("length", 0.5),
        "angle": Key("angle", 0.0),
        "reflect_amplitude": Key("float", 1.0),
        "clutter_range": Key("length", (), many=True),
        "clutter_amplitude": Key("float", (), many=True),
    },
    "motion": {
        "kind": _choice("static", "static", "sinusoid", "chest"),
        "amplitude": Key("length", 0.3e-3),
        "frequency": Key("frequency", 0.5),
        "step": Key("length", 0.4e-6),
        "duration": Key("time", 20.0),
    },
    "chest": {
        "rr": Key("frequency", 0.25),
        "hr": Key("frequency", 1.2),
        "breath_amplitude": Key("length", 1.2e-3),
        "heart_amplitude": Key("length", 0.3e-3),
        # order:relative_amplitude pairs, e.g. "4:0.9, 2:0.2"
        "breath_harmonics": Key("str", ""),
        "pulse_width": Key("time", 0.120),
        "breath_phase": Key("angle", 0.0),
        "heart_phase": Key("angle", 0.0),
    },
    "noise": {
        "if_noise_sigma": Key("float", 0.0),
        "dc_offset": Key("float", 0.0),
        # none: use if_noise_sigma; reference: per radar, hit the metal 0 deg
        # baseline of the reference measurements; target: hit target_baseline
        "calibrate": _choice("none", "none", "reference", "target"),
        "target_baseline": Key("length"),
    },
    "processing": {
        "dc_removal": _choice("off", "off", "on", "auto"),
        "pad": Key("length", 0.157e-2),
        "bin_policy": _choice("per_window", "per_window", "per_chirp"),
        "window": _choice("hann", "hann", "rect"),
    },
    "range": {
        "distances": Key("length", (0.3, 0.4, 0.5, 0.6), many=True),
        "phantom": _choice("metal", "metal", "gelatin"),
        "duration": Key("time", 60.0),
        "sub_intervals": Key("int", 12),
    },
    "baseline": {
        "phantoms": _choice(("metal", "gelatin"), "metal", "gelatin", many=True),
        "angles": Key("angle", (0.0, 30.0, 60.0), many=True),
        "duration": Key("time", 20.0),
        "distance": Key("length", 0.5),
    },
    "displacement": {
        "amplitudes": Key("length", (1.2e-3, 0.3e-3, 0.08e-3), many=True),
        "phantom": _choice("metal", "metal", "gelatin"),
        "frequency": Key("frequency", 0.5),
        "step": Key("length", 0.4e-6),
        "duration": Key("time", 20.0),
        "distance": Key("length", 0.5),
        "smooth_cutoff": Key("frequency", 2.0),
    },
    "vitals": {
        "duration": Key("time", 120.0),
        "window": Key("time", 60.0),
        "step": Key("time", 1.0),
        "beat_tolerance": Key("time", 0.150),
        "distance": Key("length", 0.5),
    },
}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^([^\s=:#;\[][^=:]*?)\s*[=:]")


def _line_index(text):
    """(section, key) -> 1-based line number, from a plain scan of the text."""
    index, section = {}, None
    for no, line in enumerate(text.splitlines(), 1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip().lower()
            index[(section, None)] = no
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip().lower()), no)
    return index


def _resolve_key(section, key):
    """Map a written key to (schema name, unit scale); raise on unit problems."""
    fields = SCHEMA[section]
    if key in fields:
        key_def = fields[key]
        if key_def.kind in UNITS:
            units = ", ".join(f"{key}_{u}" for u in UNITS[key_def.kind])
            raise UnitViolation(f"[{section}] {key} needs a unit suffix ({units})")
        return key, None
    base, _, unit = key.rpartition("_")
    if base in fields and fields[base].kind in UNITS:
        table = UNITS[fields[base].kind]
        if unit not in table:
            raise UnitViolation(
                f"[{section}] {key}: '{unit}' is not a {fields[base].kind} unit "
                f"({', '.join(table)})")
        return base, table[unit]
    if base in fields:
        raise UnitViolation(f"[{section}] {base} is dimensionless; drop the '_{unit}' suffix")
    # "amplitude" where the key is "amplitudes" is still a missing unit
    for near in (key + "s", key.removesuffix("s")):
        if near in fields and fields[near].kind in UNITS:
            units = ", ".join(f"{near}_{u}" for u in UNITS[fields[near].kind])
            raise UnitViolation(f"[{section}] {key} needs a unit suffix ({units})")
    raise UnknownKey(f"[{section}] unknown key '{key}'")


def _convert(key_def: Key, raw: str, scale, where):
    items = [s.strip() for s in raw.split(",")] if key_def.many else [raw.strip()]
    items = [s for s in items if s] if key_def.many else items
    out = []
    for item in items:
        try:
            if key_def.kind in UNITS:
                out.append(float(item) * scale)
            elif key_def.kind == "int":
                out.append(int(item))
            elif key_def.kind == "float":
                out.append(float(item))
            elif key_def.kind == "choice":
                match = [c for c in key_def.choices if c.lower() == item.lower()]
                if not match:
                    raise ValueError(f"'{item}' is not one of {', '.join(key_def.choices)}")
                out.append(match[0])
            else:
                out.append(item)
        except ValueError as exc:
            raise ParseError(f"{where}: {exc}") from None
    return tuple(out) if key_def.many else out[0]


@dataclass
class ScenarioConfig:
    values: dict = field(default_factory=dict)  # section -> name -> SI value
    source: str = "<string>"

    def get(self, section, name):
        v = self.values.get(section, {}).get(name)
        return SCHEMA[section][name].default if v is None else v

    def has(self, section, name) -> bool:
        return name in self.values.get(section, {})

    @property
    def name(self) -> str:
        return self.get("run", "name")

    @property
    def seed(self) -> int:
        return self.get("run", "seed")

    def profiles(self) -> list[RadarProfile]:
        out = []
        for pid in self.get("radar", "profiles"):
            if pid == ProfileId.CUSTOM.value:
                f0, f1 = self.get("radar", "f_start"), self.get("radar", "f_end")
                if f0 is None or f1 is None:
                    raise ParseError("a Custom radar needs f_start and f_end")
                out.append(custom_profile(f0, f1, self.get("radar", "sample_rate"),
                                          self.get("radar", "samples_per_chirp"),
                                          self.get("radar", "chirp_interval")))
            else:
                out.append(make_profile(pid))
        return out

    def chest(self) -> ChestParams:
        harmonics = []
        text = self.get("chest", "breath_harmonics")
        for item in filter(None, (s.strip() for s in text.split(","))):
            try:
                order, rel = item.split(":")
                harmonics.append((int(order), float(rel)))
            except ValueError:
                raise ParseError(f"[chest] breath_harmonics: bad pair '{item}'") from None
        return ChestParams(
            rr=self.get("chest", "rr"), hr=self.get("chest", "hr"),
            breath_amplitude=self.get("chest", "breath_amplitude"),
            heart_amplitude=self.get("chest", "heart_amplitude"),
            breath_harmonics=tuple(harmonics),
            heart_pulse_width=self.get("chest", "pulse_width"),
            phase_offsets=(math.radians(self.get("chest", "breath_phase")),
                           math.radians(self.get("chest", "heart_phase"))))


def parse_scenario(text: str, source="<string>") -> ScenarioConfig:
    if not text.strip():
        raise ParseError(f"{source}: empty scenario", line=1)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str.lower
    try:
        parser.read_string(text, source=str(source))
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("content before the first [section]", line=exc.lineno) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ParseError(exc.message.split(": ", 1)[-1], line=exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", line=line) from None

    index = _line_index(text)
    cfg = ScenarioConfig(source=str(source))
    if not parser.sections():
        raise ParseError(f"{source}: no sections", line=1)
    for section in parser.sections():
        sec = section.strip().lower()
        if sec not in SCHEMA:
            raise UnknownKey(f"unknown section [{section}]", line=index.get((sec, None)))
        out = cfg.values.setdefault(sec, {})
        for key, raw in parser.items(section):
            line = index.get((sec, key))
            try:
                name, scale = _resolve_key(sec, key)
                if name in out:
                    raise ParseError(f"[{sec}] {name} given twice with different units")
                out[name] = _convert(SCHEMA[sec][name], raw, scale, f"[{sec}] {key}")
            except (UnitViolation, UnknownKey, ParseError) as exc:
                if exc.line is not None:
                    raise
                raise type(exc)(str(exc), line=line) from None
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text ({exc.reason})") from None
    return parse_scenario(text, path)


SCENARIO_DIR = Path(__file__).with_name("scenarios")


def shipped_scenarios() -> list[str]:
    return sorted(p.name for p in SCENARIO_DIR.glob("*.cfg"))


def resolve_scenario(name) -> Path:
    """A path as given if it exists, else a shipped scenario of that name."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (SCENARIO_DIR / p.name, SCENARIO_DIR / f"{p.name}.cfg"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no scenario file '{name}' (shipped: {', '.join(shipped_scenarios())})")
