"""Flat JSON run configuration shared by all subcommands."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .blaschke import BlaschkeProduct
from .errors import ConfigError

COMMANDS = (
    "cfrac",
    "rotnum",
    "tune",
    "center",
    "qs-estimate",
    "swiatek-scan",
    "df-ratios",
    "geodesic",
    "siegel-render",
    "siegel-qc",
    "verify",
)


@dataclass
class RunConfig:
    command: str = "verify"
    theta: object = "golden"
    product: object = "douady-ghys"
    t: float = 0.0
    depth: int = 12
    N: int = 2**16
    n_iter: int = 10**6
    x0: float = 0.0
    tol: float = 1e-10
    n_levels: list = field(default_factory=lambda: [6, 7, 8])
    grid: int = 64
    I: list = field(default_factory=lambda: [0.0, 2.0])
    J: list = field(default_factory=lambda: [0.5, 1.5])
    terms: int = 1000
    r: float = 0.9
    r_grid: list = field(default_factory=lambda: [0.5, 0.9, 0.99])
    samples: int = 4096
    tuples: int = 10_000
    seed: int = 0
    suite: str = "full"
    out: object = None
    ppm: object = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if f.type == "int" and (isinstance(v, bool) or not isinstance(v, int)):
                raise ConfigError(f"{f.name} must be an integer, got {v!r}")
            if f.type == "float":
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise ConfigError(f"{f.name} must be a number, got {v!r}")
                setattr(self, f.name, float(v))
            if f.type == "list" and not isinstance(v, list):
                raise ConfigError(f"{f.name} must be a list, got {v!r}")

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls.from_dict(parse_json(text))

    def blaschke(self) -> BlaschkeProduct:
        return parse_product(self.product)


def parse_json(text: str, source: str = "<config>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    data = parse_json(text, path)
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: configuration must be a JSON object")
    return data


def parse_product(spec) -> BlaschkeProduct:
    """A preset name (``douady-ghys``), a JSON object/string, or a path to a JSON file."""
    if isinstance(spec, BlaschkeProduct):
        return spec
    if isinstance(spec, dict):
        return BlaschkeProduct.from_dict(spec)
    text = str(spec).strip()
    if text in ("douady-ghys", "dg"):
        return BlaschkeProduct.douady_ghys()
    if text.startswith("{"):
        return BlaschkeProduct.from_dict(parse_json(text, "<product>"))
    try:
        with open(text, encoding="utf-8") as fh:
            return BlaschkeProduct.from_dict(parse_json(fh.read(), text))
    except OSError as exc:
        raise ConfigError(f"unknown product specification {text!r}") from exc
