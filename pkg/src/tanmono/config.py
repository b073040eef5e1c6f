"""Run configuration shared by the CLI commands.

Values come from three layers: dataclass defaults, an optional JSON file,
then command-line flags (flags win).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .census import Rectangle
from .errors import ParameterError
from .families import FunctionFamily
from .paths import DEFAULT_CLEARANCE, DEFAULT_RADIUS
from .tracker import TrackOptions, default_window


@dataclass
class RunConfig:
    family: str = "tan"
    window_half_width: float | None = None
    window_half_height: float | None = None
    basepoint: list | None = None  # [re, im]; None means the family default
    detour_radius: float = DEFAULT_RADIUS
    loop_radius: float = DEFAULT_RADIUS
    clearance: float = DEFAULT_CLEARANCE
    n_max: int = 4
    tolerances: dict = field(default_factory=dict)
    report: str | None = None
    trajectories: str | None = None
    figure: str | None = None
    jobs: int = 1

    def validate(self) -> "RunConfig":
        FunctionFamily.from_name(self.family)
        for name in ("detour_radius", "loop_radius", "clearance"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0):
                raise ParameterError(f"{name} must be > 0, got {v!r}")
        if not self.clearance < self.detour_radius:
            raise ParameterError(f"clearance {self.clearance} must be smaller than detour_radius {self.detour_radius}")
        for name in ("window_half_width", "window_half_height"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ParameterError(f"{name} must be > 0, got {v!r}")
        if self.basepoint is not None:
            if len(self.basepoint) != 2:
                raise ParameterError(f"basepoint must be [re, im], got {self.basepoint!r}")
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0):
                raise ParameterError(f"tolerance {k} must be positive, got {v!r}")
        if self.jobs < 1:
            raise ParameterError(f"jobs must be >= 1, got {self.jobs}")
        self.track_options()
        return self

    @property
    def family_enum(self) -> FunctionFamily:
        return FunctionFamily.from_name(self.family)

    @property
    def basepoint_value(self) -> complex | None:
        return None if self.basepoint is None else complex(*self.basepoint)

    def window(self) -> Rectangle:
        base = default_window(self.family_enum, self.n_max)
        return Rectangle(base.center, self.window_half_width or base.half_width,
                         self.window_half_height or base.half_height)

    def track_options(self) -> TrackOptions:
        tol = dict(self.tolerances)
        tol.setdefault("clearance", self.clearance)
        return TrackOptions.from_tolerances(tol)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParameterError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ParameterError(f"{path}: unknown config keys {unknown}")
    return doc


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then file values, then non-None overrides; tolerances merge key-wise."""
    merged: dict = {}
    tol: dict = {}
    for layer in (file_values or {}, overrides or {}):
        for k, v in layer.items():
            if v is None:
                continue
            if k == "tolerances":
                tol.update(v)
            else:
                merged[k] = v
    merged["tolerances"] = tol
    return RunConfig(**merged).validate()
