"""Run configuration for the CLI: JSON in, dataclasses out, plus the
canonical hashing that stamps every output file."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from .errors import DomainError
from .families import FunctionFamily, family_from_dict

VERSION = "0.1.0"


@dataclass
class TraceSettings:
    t_min: float = 0.0
    t_max: float = 1.0e40
    tol: float = 1.0e-3
    spacing: float = 0.25
    max_samples: int = 2000
    k_max: int = 16

    def __post_init__(self):
        if self.tol <= 0 or self.spacing <= 0:
            raise DomainError("trace tolerances must be positive")


@dataclass
class ProjectionSettings:
    log_R: float = 30.0           # radius of the avoided disc, as log
    n_max: int = 25
    t_tol: float = 1.0e-6
    orbit_horizon: int = 64
    samples_per_hair: int = 3
    # hair tracing for projections: one fixed-depth stratum gives smooth
    # coverage across the region boundary
    trace_depth: int = 2
    trace_tol: float = 0.02
    trace_t_max: float = 1.0e80
    trace_spacing: float = 0.3

    def __post_init__(self):
        if self.n_max < 1 or self.t_tol <= 0:
            raise DomainError("invalid projection settings")


@dataclass
class ConjugacySettings:
    Q: float | None = None        # default: 2|log lam| + 2
    depth: int = 12
    samples: int = 200
    lam_override: float | None = None   # 1.0 selects the degenerate identity

    def __post_init__(self):
        if self.depth < 1 or self.samples < 1:
            raise DomainError("invalid conjugacy settings")


@dataclass
class RenderSettings:
    x_min: float = -4.0
    x_max: float = 4.0
    y_min: float = -4.0
    y_max: float = 4.0
    width: int = 96
    height: int = 96
    horizon: int = 24
    log_R: float = 2.5
    scheme: str = "default"
    overlay_rays: bool = True

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DomainError("pixel dimensions must be at least 1")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError("viewport must have positive area")


@dataclass
class RunConfig:
    family: dict = field(default_factory=lambda: {"kind": "exponential", "lambda": [1.0, 0.0]})
    rescale_mode: str = "domain"
    addresses: list = field(default_factory=lambda: [{"prefix": [], "period": [0]}])
    trace: TraceSettings = field(default_factory=TraceSettings)
    projection: ProjectionSettings = field(default_factory=ProjectionSettings)
    conjugacy: ConjugacySettings = field(default_factory=ConjugacySettings)
    render: RenderSettings = field(default_factory=RenderSettings)
    brush: dict | None = None     # inline brush instance; None = worked instance
    out_dir: str = "out"
    seed: int = 1

    def family_obj(self) -> FunctionFamily:
        return family_from_dict(self.family)

    def canonical(self) -> dict:
        d = asdict(self)
        d["version"] = VERSION
        return d

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    with open(path) as fh:
        raw = json.load(fh)
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    cfg = RunConfig()
    for key in ("family", "rescale_mode", "addresses", "brush", "out_dir", "seed"):
        if key in raw:
            setattr(cfg, key, raw[key])
    for key, cls in (("trace", TraceSettings), ("projection", ProjectionSettings),
                     ("conjugacy", ConjugacySettings), ("render", RenderSettings)):
        if key in raw:
            setattr(cfg, key, cls(**raw[key]))
    cfg.family_obj()  # validate eagerly
    return cfg


def dump_json(obj, path: str, cfg: RunConfig) -> None:
    """Write a JSON report stamped with the config hash and tool version,
    byte-stable across reruns."""
    payload = {"version": VERSION, "config_hash": cfg.hash(), "data": obj}
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"), allow_nan=True)
        fh.write("\n")
