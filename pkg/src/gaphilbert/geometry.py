"""Multi-interval geometry, the weight ``w``, the radical ``R`` and quadrature.

The real line is split by ordered endpoints ``a_1 < ... < a_{2g+2}`` into
``g + 1`` cuts ``[a_{2k-1}, a_{2k}]`` separated by ``g`` gaps. The first and
last cut form the exterior set ``I_e``; the middle cuts form the interior
set ``I_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "GapGeometry",
    "QuadratureRule",
    "GeometryError",
    "cosine_rule",
    "graded_rule",
    "REFERENCE_ENDPOINTS",
]

REFERENCE_ENDPOINTS = (-3.0, -2.0, -1.0, 1.0, 2.0, 3.0)

EXTERIOR = "exterior-cut"
INTERIOR = "interior-cut"
GAP = "gap"


class GeometryError(ValueError):
    """Raised for invalid endpoint configurations."""


@lru_cache(maxsize=64)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    t, wt = leggauss(n)
    t.setflags(write=False)
    wt.setflags(write=False)
    return t, wt


@dataclass(frozen=True)
class QuadratureRule:
    """Quadrature on one segment ``[lo, hi]``.

    Attributes
    ----------
    segment : int
        Index of the segment in :attr:`GapGeometry.segments`.
    kind : str
        Segment tag (``"exterior-cut"``, ``"interior-cut"`` or ``"gap"``).
    lo, hi : float
        Segment endpoints.
    nodes, weights : ndarray
        Nodes strictly inside ``(lo, hi)`` and positive weights for ``dx``.
    dist_lo, dist_hi : ndarray
        ``nodes - lo`` and ``hi - nodes`` computed without cancellation.
    substitution : str
        ``"cosine"`` or ``"graded"``.
    """

    segment: int
    kind: str
    lo: float
    hi: float
    nodes: np.ndarray
    weights: np.ndarray
    dist_lo: np.ndarray
    dist_hi: np.ndarray
    substitution: str = "cosine"

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Apply the rule to samples ``values`` (first axis over nodes)."""
        return np.tensordot(self.weights, values, axes=(0, 0))


def _rule_from_theta(lo, hi, th, wth, segment=-1, kind="", substitution="cosine"):
    r = 0.5 * (hi - lo)
    c = 0.5 * (hi + lo)
    x = c - r * np.cos(th)
    dlo = 2.0 * r * np.sin(0.5 * th) ** 2
    dhi = 2.0 * r * np.cos(0.5 * th) ** 2
    wts = r * np.sin(th) * wth
    keep = (dlo > 0) & (dhi > 0) & (wts > 0)
    return QuadratureRule(segment, kind, float(lo), float(hi), x[keep], wts[keep],
                          dlo[keep], dhi[keep], substitution)


def cosine_rule(lo: float, hi: float, n: int, segment: int = -1, kind: str = "") -> QuadratureRule:
    """Gauss-Legendre rule in ``theta`` under ``x = c - r cos(theta)``.

    The factor ``sin(theta)`` in ``dx`` cancels inverse square-root
    endpoint behaviour, so integrands like ``1/R`` become smooth.
    """
    t, wt = _gauss_legendre(n)
    th = 0.5 * np.pi * (t + 1.0)
    wth = 0.5 * np.pi * wt
    return _rule_from_theta(lo, hi, th, wth, segment, kind, "cosine")


def graded_rule(lo: float, hi: float, n: int, segment: int = -1, kind: str = "") -> QuadratureRule:
    """Cosine rule composed with ``s(t) = t - sin(2 pi t)/(2 pi)``.

    The extra grading flattens logarithmic endpoint singularities, e.g.
    ``ln w / R`` near ``a_1`` and ``a_{2g+2}``.
    """
    t, wt = _gauss_legendre(n)
    s = 0.5 * (t + 1.0)
    ws = 0.5 * wt
    th = np.pi * (s - np.sin(2 * np.pi * s) / (2 * np.pi))
    wth = np.pi * (1.0 - np.cos(2 * np.pi * s)) * ws
    return _rule_from_theta(lo, hi, th, wth, segment, kind, "graded")


@dataclass(frozen=True)
class GapGeometry:
    """Endpoint configuration ``a_1 < ... < a_{2g+2}`` with ``g >= 2``.

    Parameters
    ----------
    endpoints : sequence of float
        Strictly increasing, even length at least 6.

    Examples
    --------
    >>> geo = GapGeometry([-3, -2, -1, 1, 2, 3])
    >>> geo.genus, float(geo.weight_w(0.0).real)
    (2, 3.0)
    """

    endpoints: np.ndarray
    genus: int = field(init=False)

    def __init__(self, endpoints: Sequence[float]):
        a = np.asarray(endpoints, dtype=float).ravel()
        if a.size < 6 or a.size % 2:
            raise GeometryError(
                f"need an even number (>= 6) of endpoints, got {a.size}")
        if not np.all(np.isfinite(a)):
            raise GeometryError("endpoints must be finite")
        bad = np.nonzero(np.diff(a) <= 0)[0]
        if bad.size:
            i = int(bad[0])
            raise GeometryError(
                f"endpoints not strictly increasing: a_{i + 1}={float(a[i])!r} >= a_{i + 2}={float(a[i + 1])!r}")
        a.setflags(write=False)
        object.__setattr__(self, "endpoints", a)
        object.__setattr__(self, "genus", a.size // 2 - 1)

    # structure ---------------------------------------------------------

    @property
    def a(self) -> np.ndarray:
        return self.endpoints

    @property
    def cuts(self) -> list[tuple[float, float]]:
        a = self.endpoints
        return [(a[2 * k], a[2 * k + 1]) for k in range(self.genus + 1)]

    @property
    def gaps(self) -> list[tuple[float, float]]:
        a = self.endpoints
        return [(a[2 * k + 1], a[2 * k + 2]) for k in range(self.genus)]

    @property
    def interior_cuts(self) -> list[tuple[float, float]]:
        return self.cuts[1:-1]

    @property
    def exterior_cuts(self) -> list[tuple[float, float]]:
        c = self.cuts
        return [c[0], c[-1]]

    @property
    def segments(self) -> list[tuple[str, float, float]]:
        """All segments from ``a_1`` to ``a_{2g+2}`` with their tags."""
        out = []
        cuts, gaps = self.cuts, self.gaps
        for k, (lo, hi) in enumerate(cuts):
            tag = EXTERIOR if k in (0, self.genus) else INTERIOR
            out.append((tag, lo, hi))
            if k < self.genus:
                out.append((GAP, *gaps[k]))
        return out

    @property
    def center(self) -> float:
        return 0.5 * (self.endpoints[0] + self.endpoints[-1])

    def interior_length(self) -> float:
        return float(sum(hi - lo for lo, hi in self.interior_cuts))

    def classify(self, x) -> np.ndarray:
        """Segment tag for each real ``x`` (``"outside"`` beyond ``[a_1, a_{2g+2}]``)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.full(x.shape, "outside", dtype=object)
        for tag, lo, hi in self.segments:
            out[(x >= lo) & (x <= hi)] = tag
        return out

    def in_cuts(self, x, which: str = "all") -> np.ndarray:
        x = np.asarray(x, dtype=float)
        cuts = {"all": self.cuts, "interior": self.interior_cuts,
                "exterior": self.exterior_cuts}[which]
        m = np.zeros(x.shape, bool)
        for lo, hi in cuts:
            m |= (x >= lo) & (x <= hi)
        return m

    # scalar functions --------------------------------------------------

    def weight_w(self, z) -> np.ndarray:
        """``w(z) = sqrt((a_{2g+2} - z)(z - a_1))`` on the principal branch."""
        a = self.endpoints
        z = np.asarray(z, dtype=complex)
        return np.sqrt((a[-1] - z) * (z - a[0]))

    def w_real(self, x) -> np.ndarray:
        """``w`` on the real interval ``[a_1, a_{2g+2}]`` (clipped at 0)."""
        a = self.endpoints
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.clip((a[-1] - x) * (x - a[0]), 0.0, None))

    def radical_R(self, z, return_flag: bool = False):
        """``R(z) = prod_j sqrt(z - a_j)`` with principal square roots.

        Analytic off the cuts and ``R(z) ~ z^{g+1}`` at infinity. On a cut use
        :meth:`R_plus` or :meth:`R_minus`. Exactly at a branch point the
        value is 0 and, if requested, the flag is set.
        """
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape, dtype=complex)
        for aj in self.endpoints:
            out = out * np.sqrt(z - aj)
        if return_flag:
            return out, bool(np.any(np.isin(z, self.endpoints)))
        return out

    def R_plus(self, x) -> np.ndarray:
        """Boundary value of ``R`` from the upper half-plane on real ``x``."""
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape, dtype=complex)
        for aj in self.endpoints:
            d = x - aj
            out = out * np.where(d >= 0, np.sqrt(np.abs(d)), 1j * np.sqrt(np.abs(d)))
        return out

    def R_minus(self, x) -> np.ndarray:
        """Boundary value of ``R`` from the lower half-plane on real ``x``."""
        return np.conj(self.R_plus(x))

    def R_plus_rule(self, rule: QuadratureRule) -> np.ndarray:
        """``R_plus`` at the nodes of ``rule`` using the accurate endpoint distances."""
        x = rule.nodes
        out = np.ones(x.shape, dtype=complex)
        for aj in self.endpoints:
            if aj == rule.lo:
                d = rule.dist_lo
            elif aj == rule.hi:
                d = -rule.dist_hi
            else:
                d = x - aj
            out = out * np.where(d >= 0, np.sqrt(np.abs(d)), 1j * np.sqrt(np.abs(d)))
        return out

    def w_rule(self, rule: QuadratureRule) -> np.ndarray:
        a = self.endpoints
        x = rule.nodes
        left = rule.dist_lo if rule.lo == a[0] else x - a[0]
        right = rule.dist_hi if rule.hi == a[-1] else a[-1] - x
        return np.sqrt(left * right)

    # quadrature --------------------------------------------------------

    def build_rules(self, nq: int, kind: str = "cosine") -> list[QuadratureRule]:
        """One rule per segment, cuts and gaps, in left-to-right order."""
        if nq < 8:
            raise GeometryError(f"quadrature order must be >= 8, got {nq}")
        maker = cosine_rule if kind == "cosine" else graded_rule
        return [maker(lo, hi, nq, i, tag) for i, (tag, lo, hi) in enumerate(self.segments)]

    def scaled(self, factor: float, shift: float = 0.0) -> "GapGeometry":
        return GapGeometry(factor * self.endpoints + shift)

    def __repr__(self) -> str:
        return f"GapGeometry({list(map(float, self.endpoints))})"

    def __hash__(self) -> int:
        return hash(tuple(self.endpoints))

    def __eq__(self, other) -> bool:
        return isinstance(other, GapGeometry) and np.array_equal(self.endpoints, other.endpoints)
