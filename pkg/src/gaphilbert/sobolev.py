"""Sobolev-norm experiments for continuation from ``I_i``.

Positive norms on ``I_i`` use exact derivatives. Negative norms on a target set
``J`` are bounded below by pairing with translates of a fixed smooth bump.
The weighted coefficient space ``A`` uses weights
``w_n = (n + 1) e^{kappa_n (G + 1/2)}`` with ``G = sup_J Re g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .spectral import Spectral
from .surface import Surface

__all__ = [
    "SobolevNorms",
    "BumpDictionary",
    "bump",
    "bump_hs_norm",
    "InstabilityResult",
    "instability_experiment",
    "WeightSpaceA",
    "StabilityResult",
    "stability_experiment",
    "max_re_g_on_contour",
]

MAX_S1 = 4


def bump(t) -> np.ndarray:
    """Mollifier ``exp(-1/(1 - t^2))`` on ``(-1, 1)``, zero outside."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    m = np.abs(t) < 1
    out[m] = np.exp(-1.0 / (1.0 - t[m] ** 2))
    return out


def bump_hs_norm(width: float, s: int, n: int = 1 << 14, pad: float = 16.0) -> float:
    """``||phi||_{H^s(R)}`` of the bump rescaled to support length ``width``.

    Uses ``||phi||^2 = int (1 + xi^2)^s |phi_hat(xi)|^2 dxi / (2 pi)`` on an FFT grid.
    """
    half = 0.5 * width
    L = pad * width
    y = np.linspace(-L / 2, L / 2, n, endpoint=False)
    h = y[1] - y[0]
    ph = bump(y / half)
    F = np.fft.fft(ph) * h
    xi = 2 * np.pi * np.fft.fftfreq(n, d=h)
    dxi = 2 * np.pi / (n * h)
    return float(np.sqrt(np.sum((1 + xi ** 2) ** s * np.abs(F) ** 2) * dxi / (2 * np.pi)))


class SobolevNorms:
    """Integer-order norms on a union of intervals.

    Parameters
    ----------
    intervals : sequence of (lo, hi)
    nq : int
        Gauss-Legendre nodes per interval.
    """

    def __init__(self, intervals: Sequence[tuple[float, float]], nq: int = 64):
        t, wt = leggauss(nq)
        xs, ws = [], []
        for lo, hi in intervals:
            xs.append(0.5 * (hi + lo) + 0.5 * (hi - lo) * t)
            ws.append(0.5 * (hi - lo) * wt)
        self.intervals = list(intervals)
        self.x = np.concatenate(xs)
        self.w = np.concatenate(ws)

    @property
    def length(self) -> float:
        return float(sum(hi - lo for lo, hi in self.intervals))

    def pos_norm(self, derivatives: Callable[[np.ndarray, int], np.ndarray], s1: int) -> float:
        """``(sum_{j<=s1} int |f^{(j)}|^2)^{1/2}``.

        ``derivatives(x, k)`` returns an array of shape ``(k + 1, len(x))`` with
        ``f, f', ..., f^{(k)}`` at ``x``.
        """
        s1 = int(s1)
        if s1 < 0 or s1 > MAX_S1:
            raise ValueError(f"s1={s1} outside the supported range 0..{MAX_S1}")
        D = np.asarray(derivatives(self.x, s1))
        return float(np.sqrt(np.sum(self.w[None, :] * np.abs(D[: s1 + 1]) ** 2)))


@dataclass
class BumpDictionary:
    """Translates of one bump of support length ``width`` inside ``J``, away from ``I_i``.

    Attributes
    ----------
    centers : ndarray
    width : float
    min_distance : float
        Smallest distance from any support to ``I_i``.
    """

    centers: np.ndarray
    width: float
    min_distance: float
    nq: int = 96

    @classmethod
    def build(cls, J: Sequence[tuple[float, float]], interior: Sequence[tuple[float, float]],
              width: float, distance: float, per_unit: int = 40) -> "BumpDictionary":
        half = 0.5 * width
        centers = []
        for lo, hi in J:
            k = max(int(per_unit * (hi - lo)), 2)
            for c in np.linspace(lo + half, hi - half, k):
                a, b = c - half, c + half
                d = min((max(lo_i - b, a - hi_i, 0.0) if (b <= lo_i or a >= hi_i) else 0.0)
                        for lo_i, hi_i in interior)
                if d >= distance:
                    centers.append(c)
        if not centers:
            raise ValueError("empty bump dictionary: J leaves no room at the requested distance")
        centers = np.array(centers)
        md = min(min(abs(c - half - hi_i) if c > hi_i else abs(lo_i - c - half) for lo_i, hi_i in interior)
                 for c in centers)
        return cls(centers, float(width), float(md))

    def pairings(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """``int f(y) phi_k(y) dy`` for every translate."""
        t, wt = leggauss(self.nq)
        half = 0.5 * self.width
        y = self.centers[:, None] + half * t[None, :]
        vals = f(y.ravel()).reshape(y.shape)
        return (vals * bump(t)[None, :] * (half * wt)[None, :]).sum(1)

    def neg_norm_lb(self, f: Callable[[np.ndarray], np.ndarray], s2: int) -> tuple[float, float]:
        """Lower bound ``max_k |<f, phi_k>| / ||phi||_{H^{s2}}`` and the maximizing center."""
        p = np.abs(self.pairings(f))
        k = int(np.argmax(p))
        return float(p[k] / bump_hs_norm(self.width, s2)), float(self.centers[k])


def max_re_g_on_contour(surface: Surface, intervals, d_gamma: float, n_side: int = 24) -> float:
    """``max Re g`` on rectangles at distance ``d_gamma`` around each interval (upper half suffices)."""
    pts = []
    for lo, hi in intervals:
        xs = np.linspace(lo - d_gamma, hi + d_gamma, n_side)
        pts.append(xs + 1j * d_gamma)
        ys = np.linspace(1e-3 * d_gamma, d_gamma, n_side // 2)
        pts.append(lo - d_gamma + 1j * ys)
        pts.append(hi + d_gamma + 1j * ys)
    z = np.concatenate(pts)
    return float(surface.g_function(z).real.max())


def re_g_real(surface: Surface, x) -> np.ndarray:
    """``Re g`` at real points in the gaps or on ``I_i``."""
    return surface.g_function(np.asarray(x, dtype=float) + 0j, side=1).real


@dataclass
class InstabilityResult:
    n: np.ndarray
    kappa: np.ndarray
    pos_norm: np.ndarray
    neg_norm_lb: np.ndarray
    centers: np.ndarray
    predicted_rate: float
    rate_upper: float
    s1: int
    s2: int

    @property
    def ratio(self) -> np.ndarray:
        return self.neg_norm_lb / self.pos_norm

    @property
    def rate(self) -> np.ndarray:
        """``log r_n / kappa_n``."""
        return np.log(self.ratio) / self.kappa

    def rows(self):
        return list(zip(self.n, self.pos_norm, self.neg_norm_lb, self.ratio, self.kappa))


def instability_experiment(spectral: Spectral, surface: Surface, s1: int, s2: int,
                           J: Sequence[tuple[float, float]], ns: Sequence[int],
                           width: float | None = None, distance: float | None = None,
                           d_gamma: float = 0.05) -> InstabilityResult:
    """Ratios ``r_n = ||f_n||_{H^{-s2}(J)} lower bound / ||f_n||_{H^{s1}(I_i)}``.

    The predicted rate of ``log r_n / kappa_n`` is the largest over bump
    supports of ``min Re g`` on the support, minus ``max Re g`` on a contour
    ``d_gamma`` around ``I_i``. ``rate_upper`` uses ``sup Re g`` over all
    supports instead of the minimum.
    """
    geo = spectral.geometry
    gaps_len = min(hi - lo for lo, hi in geo.gaps)
    width = 0.25 * gaps_len if width is None else width
    distance = 0.1 * gaps_len if distance is None else distance
    dic = BumpDictionary.build(J, geo.interior_cuts, width, distance)
    norms = SobolevNorms(geo.interior_cuts)
    ns = np.asarray(list(ns), dtype=int)
    pos, neg, cen = [], [], []
    for n in ns:
        spectral.check_resolved(int(n))
        fn = lambda y, n=n: spectral.evaluate_f_off_interval(int(n), y).real
        der = lambda x, k, n=n: spectral.evaluate_f_derivatives(int(n), x, k).real
        pos.append(norms.pos_norm(der, s1))
        v, c = dic.neg_norm_lb(fn, s2)
        neg.append(v)
        cen.append(c)
    gamma = max_re_g_on_contour(surface, geo.interior_cuts, d_gamma)
    # best support: where min Re g over the support is largest
    half = 0.5 * width
    t = np.linspace(-1, 1, 41)
    reg = re_g_real(surface, (dic.centers[:, None] + half * t[None, :]).ravel()).reshape(len(dic.centers), -1)
    lower = float(reg.min(1).max() - gamma)
    upper = float(reg.max() - gamma)
    return InstabilityResult(ns, spectral.kappa[ns], np.array(pos), np.array(neg), np.array(cen),
                             lower, upper, s1, s2)


@dataclass
class WeightSpaceA:
    """Weights ``w_n = (n + 1) e^{kappa_n (G + 1/2)}`` with ``G = sup_J Re g``."""

    kappa: np.ndarray
    G: float

    @property
    def weights(self) -> np.ndarray:
        n = np.arange(len(self.kappa))
        return (n + 1) * np.exp(self.kappa * (self.G + 0.5))

    def norm(self, psi_n: np.ndarray) -> float:
        psi_n = np.asarray(psi_n)
        return float(np.sqrt(np.sum((self.weights[: len(psi_n)] * psi_n) ** 2)))


@dataclass
class StabilityResult:
    n_max: np.ndarray
    empirical_C: np.ndarray
    analytic_C: np.ndarray
    c_J: float
    sup_f: np.ndarray
    extra: dict = field(default_factory=dict)

    def rows(self):
        return list(zip(self.n_max, self.empirical_C, self.analytic_C))


def _sup_re_g(surface: Surface, J, n: int = 201) -> float:
    x = np.concatenate([np.linspace(lo, hi, n) for lo, hi in J])
    return float(re_g_real(surface, x).max())


def stability_experiment(spectral: Spectral, surface: Surface, J: Sequence[tuple[float, float]],
                         n_max_list: Sequence[int], samples: int = 100, seed: int = 0,
                         nq: int = 64) -> StabilityResult:
    """Continuation norms of random unit-ball elements of ``A`` on ``L^2(J)``.

    ``samples`` coefficient vectors with ``sum (w_n psi_n)^2 = 1`` over
    ``n < max(n_max_list)`` are drawn once; for each ``n_max`` the series is
    truncated and the empirical constant is the largest ``||sum psi_n f_n||_{L^2(J)}``.
    The analytic constant ``sqrt(sum (||f_n||_{L^2(J)} / w_n)^2)`` follows from
    the triangle and Cauchy-Schwarz inequalities; the cruder forms
    ``sqrt(|J| sum (sup_J |f_n| / w_n)^2)`` and ``c_J sqrt(|J| sum 1/(n+1)^2)``
    are reported in ``extra``.
    """
    rng = np.random.default_rng(seed)
    norms = SobolevNorms(J, nq)
    G = _sup_re_g(surface, J)
    N = max(n_max_list)
    if N > spectral.n_resolved:
        raise ValueError(f"n_max={N} exceeds the resolved count {spectral.n_resolved}")
    A = WeightSpaceA(spectral.kappa[:N], G)
    wts = A.weights
    F = spectral.evaluate_f_off_interval(np.arange(N), norms.x).real  # (nodes, N)
    l2 = np.sqrt((norms.w[:, None] * F ** 2).sum(0))
    xs = np.concatenate([np.linspace(lo, hi, 401) for lo, hi in J])
    sup_f = np.abs(spectral.evaluate_f_off_interval(np.arange(N), xs)).max(0)
    c_J = float((sup_f / np.exp(spectral.kappa[:N] * (G + 0.5))).max())
    Z = rng.standard_normal((samples, N))
    psi = Z / np.linalg.norm(Z, axis=1, keepdims=True) / wts[None, :]
    emp, ana, ana_sup, ana_316 = [], [], [], []
    for m in n_max_list:
        vals = psi[:, :m] @ F[:, :m].T
        emp.append(float(np.sqrt((norms.w[None, :] * vals ** 2).sum(1)).max()))
        ana.append(float(np.sqrt(np.sum((l2[:m] / wts[:m]) ** 2))))
        ana_sup.append(float(np.sqrt(norms.length * np.sum((sup_f[:m] / wts[:m]) ** 2))))
        ana_316.append(float(c_J * np.sqrt(norms.length * np.sum(1.0 / np.arange(1, m + 1) ** 2))))
    return StabilityResult(np.asarray(list(n_max_list)), np.array(emp), np.array(ana), c_J, sup_f,
                           {"G": G, "weights": wts, "analytic_C_sup": np.array(ana_sup),
                            "analytic_C_316": np.array(ana_316)})
