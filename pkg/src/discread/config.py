"""Run configuration: a plain ``key = value`` file plus command-line overrides.

Lengths accept SI suffixes (``780nm``, ``4mm``, ``1.5um``) or multiples of
the beam waist (``w0/6``, ``0.5w0``); waist-relative values are resolved once
the optics are known.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import asdict, dataclass, fields, replace

from .errors import ConfigError

_UNITS = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9, "pm": 1e-12}
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_length(text, w0: float | None = None) -> float:
    """Length in metres; waist-relative forms need ``w0``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().replace(" ", "")
    m = re.fullmatch(rf"([-+])?({_NUM})?\*?w0(?:/({_NUM}))?", s)
    if m:
        if w0 is None:
            raise ConfigError(f"length {text!r} is relative to w0, which is not known here")
        num = float(m.group(2)) if m.group(2) else 1.0
        num = -num if m.group(1) == "-" else num
        den = float(m.group(3)) if m.group(3) else 1.0
        if den == 0:
            raise ConfigError(f"length {text!r}: division by zero")
        return num * w0 / den
    m = re.fullmatch(rf"({_NUM})([a-zµ]*)", s)
    if not m or m.group(2) not in _UNITS and m.group(2) != "":
        raise ConfigError(f"cannot parse length {text!r}")
    return float(m.group(1)) * _UNITS.get(m.group(2) or "m")


def is_waist_relative(text) -> bool:
    return isinstance(text, str) and "w0" in text


@dataclass(frozen=True)
class RunConfig:
    # optics
    wavelength: str = "780nm"
    na: float = 0.47
    medium_index: float = 1.0
    model: str = "vectorial"
    focal_length: str = "4mm"
    lens_diameter: str = ""
    method: str = "fraunhofer"
    # disc
    pitch: str = "w0"
    offset: str = "0"
    # detector
    pixel_boundaries: str = ""
    disc_points: int = 4096
    detector_points: int = 1024
    detector_span: float = 1.2
    # noise / read
    photons: float = 25.0
    excess_db: float = 10.0
    squeeze_db: float = 10.0
    kappa: float = 3.0
    trials: int = 10000
    correlated: bool = False
    # run
    seed: int = 0
    na_list: str = "0.1,0.2,0.3,0.47,0.6,0.8,0.9,0.95"
    power: float = 1e-3
    oversampling: float = 10.0
    calibrate: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, value):
    kind = _TYPES[key]
    try:
        if kind == "bool":
            if isinstance(value, bool):
                return value
            v = str(value).strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        return str(value).strip()
    except ValueError:
        raise ConfigError(f"{key}: cannot interpret {value!r} as {kind}") from None


def load(path=None, overrides: dict | None = None) -> RunConfig:
    values = {}
    if path is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        cp.optionxform = str
        try:
            with open(path) as fh:
                cp.read_string("[run]\n" + fh.read())
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for k, v in cp["run"].items():
            k = k.replace("-", "_")
            if k not in _TYPES:
                raise ConfigError(f"unknown config key {k!r}")
            values[k] = _coerce(k, v)
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = _coerce(k, v)
    cfg = replace(RunConfig(), **values)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Raise :class:`ConfigError` naming the first violated constraint."""
    import numpy as np

    lam = parse_length(cfg.wavelength)
    if not lam > 0:
        raise ConfigError("wavelength must be > 0")
    if not cfg.medium_index > 0:
        raise ConfigError("medium_index must be > 0")
    if not 0 < cfg.na < cfg.medium_index:
        raise ConfigError(f"na must satisfy 0 < NA < medium_index (NA={cfg.na}, n={cfg.medium_index})")
    if cfg.model not in ("vectorial", "paraxial"):
        raise ConfigError(f"model must be vectorial or paraxial, got {cfg.model!r}")
    if cfg.method not in ("fraunhofer", "rayleigh_sommerfeld"):
        raise ConfigError(f"method must be fraunhofer or rayleigh_sommerfeld, got {cfg.method!r}")
    f = parse_length(cfg.focal_length)
    if not f / lam > 1e3:
        raise ConfigError("focal_length must exceed 1e3 wavelengths")
    if cfg.lens_diameter:
        D = parse_length(cfg.lens_diameter)
        want = 2 * f * np.tan(np.arcsin(cfg.na))
        if abs(D - want) > 1e-6 * want:
            raise ConfigError(f"lens_diameter {D:.6g} m inconsistent with NA {cfg.na} and focal length "
                              f"(expected {want:.6g} m)")
    if cfg.detector_span < 1.0:
        raise ConfigError("detector_span must be >= 1 so the grid covers the lens aperture")
    if cfg.disc_points < 16 or cfg.detector_points < 16:
        raise ConfigError("disc_points and detector_points must be >= 16")
    if not cfg.photons > 0:
        raise ConfigError("photons (N_inc) must be > 0")
    if cfg.squeeze_db < 0:
        raise ConfigError("squeeze_db must be >= 0")
    if not cfg.kappa > 0:
        raise ConfigError("kappa must be > 0")
    if cfg.trials < 1:
        raise ConfigError("trials must be >= 1")
    if not (cfg.power > 0 and cfg.oversampling > 0):
        raise ConfigError("power and oversampling must be > 0")
    for key in ("pitch", "offset"):
        val = getattr(cfg, key)
        if not is_waist_relative(val):
            parse_length(val)
    if not is_waist_relative(cfg.pitch) and not parse_length(cfg.pitch) > 0:
        raise ConfigError("pitch must be > 0")
    if cfg.pixel_boundaries:
        b = pixel_boundaries(cfg)
        if len(b) != 6 or any(y <= x for x, y in zip(b, b[1:])):
            raise ConfigError("pixel_boundaries must be 6 strictly increasing lengths")
        half = f * np.tan(np.arcsin(cfg.na))
        if b[0] > -half * (1 - 1e-9) or b[-1] < half * (1 - 1e-9):
            raise ConfigError("pixel_boundaries must cover the lens aperture")
        if b[0] < -0.5 * cfg.detector_span * 2 * half or b[-1] > 0.5 * cfg.detector_span * 2 * half:
            raise ConfigError("pixel_boundaries extend beyond the detector grid")
    na_values(cfg)


def pixel_boundaries(cfg: RunConfig) -> tuple:
    return tuple(parse_length(v) for v in cfg.pixel_boundaries.split(",") if v.strip())


def na_values(cfg: RunConfig) -> list[float]:
    try:
        vals = [float(v) for v in cfg.na_list.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"na_list: cannot parse {cfg.na_list!r}") from None
    if not vals:
        raise ConfigError("na_list is empty")
    for v in vals:
        if not 0 < v < cfg.medium_index:
            raise ConfigError(f"na_list entry {v} outside (0, medium_index)")
    return vals


def system_config(cfg: RunConfig):
    """Resolve lengths (including w0-relative ones) into a :class:`SystemConfig`."""
    from .focal_field import FocusSpec, beam_waist
    from .system import SystemConfig

    lam = parse_length(cfg.wavelength)
    w0 = None
    if is_waist_relative(cfg.pitch) or is_waist_relative(cfg.offset):
        w0 = beam_waist(FocusSpec(lam, cfg.na, cfg.medium_index, cfg.model))
    return SystemConfig(
        wavelength=lam, na=cfg.na, medium_index=cfg.medium_index, model=cfg.model,
        focal_length=parse_length(cfg.focal_length),
        lens_diameter=parse_length(cfg.lens_diameter) if cfg.lens_diameter else None,
        method=cfg.method, pitch=parse_length(cfg.pitch, w0), offset=parse_length(cfg.offset, w0),
        n_inc=cfg.photons, disc_points=cfg.disc_points, detector_points=cfg.detector_points,
        detector_span=cfg.detector_span,
        pixel_boundaries=pixel_boundaries(cfg) if cfg.pixel_boundaries else None,
    ), w0

