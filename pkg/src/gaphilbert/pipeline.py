"""Run configuration and a lazily evaluated experiment context."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .asymptotics import AsymptoticModel
from .geometry import REFERENCE_ENDPOINTS, GapGeometry
from .spectral import Spectral
from .surface import Surface
from .theta import DivisorScan, ThetaContext, find_kappa_tilde

__all__ = ["ConfigError", "RunConfig", "parse_config", "Pipeline", "write_csv"]

log = logging.getLogger("gaphilbert")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _pairs(text: str) -> list[tuple[float, float]]:
    v = _floats(text)
    if len(v) % 2:
        raise ValueError("expected an even number of values (lo hi pairs)")
    return [(v[2 * k], v[2 * k + 1]) for k in range(len(v) // 2)]


@dataclass
class RunConfig:
    """All knobs of a run; every field can be set from the key/value file."""

    endpoints: list = field(default_factory=lambda: list(REFERENCE_ENDPOINTS))
    nq: int = 96
    nd: int = 400
    nystrom_n: int = 128
    theta_tol: float = 1e-14
    kappa_min: float = 0.0
    kappa_max: float = 40.0
    kappa_step: float = 0.0  # 0 selects 2% of the asymptotic spacing
    nmax: int = 0  # 0 selects the spectral noise floor
    omega: float = 0.05  # fraction of the shortest gap
    points: int = 5  # continuation points per gap
    phantom_degree: int = 0
    s1: int = 1
    s2: int = 1
    J: list = field(default_factory=list)  # empty selects (a_2, a_{2g+1}) shrunk by 10% of a gap
    d_gamma: float = 0.05
    samples: int = 100
    seed: int = 0

    _parsers = {
        "endpoints": _floats,
        "J": _pairs,
    }

    def validate(self) -> GapGeometry:
        for name in ("nq", "nd", "nystrom_n", "points", "samples"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("theta_tol", "omega", "d_gamma"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.kappa_max <= self.kappa_min:
            raise ConfigError("kappa_max must exceed kappa_min")
        if self.nmax < 0 or self.phantom_degree < 0 or self.seed < 0:
            raise ConfigError("nmax, phantom_degree and seed must be non-negative")
        if not 0 <= self.s1 <= 4 or self.s2 < 0:
            raise ConfigError("s1 must lie in 0..4 and s2 must be non-negative")
        try:
            return GapGeometry(self.endpoints)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def parse_config(text: str, base: RunConfig | None = None, source: str = "config") -> RunConfig:
    """Parse ``key = value`` lines (``#`` comments) on top of ``base``.

    Errors name the file and line number.
    """
    cfg = dataclasses.replace(base) if base is not None else RunConfig()
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split(sep, 1))
        if key not in types:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            if key in RunConfig._parsers:
                val = RunConfig._parsers[key](value)
            elif types[key] in ("int", int):
                val = int(value)
            else:
                val = float(value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
        setattr(cfg, key, val)
    return cfg


class Pipeline:
    """Shared, lazily built objects for one configuration."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.geometry = cfg.validate()

    @cached_property
    def surface(self) -> Surface:
        log.info("building surface data for %s", self.geometry)
        return Surface(self.geometry, nq=self.cfg.nq, nd=self.cfg.nd)

    @cached_property
    def theta_ctx(self) -> ThetaContext:
        return ThetaContext(self.surface.tau, tol=self.cfg.theta_tol)

    @cached_property
    def scan(self) -> DivisorScan:
        log.info("scanning theta divisor on [%g, %g]", self.cfg.kappa_min, self.cfg.kappa_max)
        step = self.cfg.kappa_step or None
        return find_kappa_tilde(self.surface, self.theta_ctx, self.cfg.kappa_min, self.cfg.kappa_max, step)

    @cached_property
    def spectral(self) -> Spectral:
        log.info("Nystrom decomposition with %d nodes per cut", self.cfg.nystrom_n)
        return Spectral(self.geometry, self.cfg.nystrom_n)

    @cached_property
    def model(self) -> AsymptoticModel:
        return AsymptoticModel(self.surface, self.scan.roots, self.theta_ctx)

    @property
    def nmax(self) -> int:
        n = self.cfg.nmax or self.spectral.n_resolved
        return min(n, self.spectral.n_resolved)

    @property
    def J(self) -> list[tuple[float, float]]:
        if self.cfg.J:
            return [tuple(p) for p in self.cfg.J]
        a = self.geometry.a
        m = 0.1 * min(hi - lo for lo, hi in self.geometry.gaps)
        return [(a[1] + m, a[-2] - m)]

    def gap_points(self, per_gap: int | None = None, inner: float = 0.5) -> np.ndarray:
        """Points in the middle ``inner`` fraction of every gap, kept ``omega`` from the ends."""
        per_gap = self.cfg.points if per_gap is None else per_gap
        om = self.cfg.omega * min(hi - lo for lo, hi in self.geometry.gaps)
        pts = []
        for lo, hi in self.geometry.gaps:
            c, h = 0.5 * (lo + hi), 0.5 * inner * (hi - lo)
            pts.append(np.linspace(max(c - h, lo + om), min(c + h, hi - om), per_gap))
        return np.concatenate(pts)


def write_csv(path: Path, header: list[str], rows) -> None:
    """Deterministic CSV writer (full-precision floats)."""
    def fmt(v):
        if isinstance(v, (bool, np.bool_)):
            return str(int(v))
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return str(v)

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([fmt(v) for v in r] for r in rows)
