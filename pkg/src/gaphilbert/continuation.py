"""Analytic continuation of ``psi = H_e^{-1} phi`` from ``I_i`` into the gaps.

Given exterior data ``phi = sum phi_n h_n`` the function ``psi`` has the
expansion ``psi = sum psi_n f_n`` with ``psi_n = 2 lambda_n phi_n``. Each
``f_n`` extends analytically off ``I_e`` through its Cauchy integral, so the
partial sums continue ``psi`` into the gaps. The same series can be built
from ``psi`` on ``I_i`` alone, which is the interior-problem setting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P

from .geometry import GapGeometry, cosine_rule
from .spectral import Spectral
from .surface import Surface

__all__ = [
    "ContinuationSeries",
    "decompose",
    "decompose_psi",
    "default_gap_points",
    "direct_psi",
    "fit_envelope",
    "pv_integral",
    "pv_weighted_full",
    "phantom_phi",
    "recover_roi",
    "RecoveryResult",
]


# principal-value quadrature ------------------------------------------------

def _gl(n):
    return np.polynomial.legendre.leggauss(n)


def pv_integral(func: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, y, n: int = 200) -> np.ndarray:
    """``PV int_lo^hi func(x)/(x - y) dx`` for smooth ``func`` by singularity subtraction.

    Points ``y`` outside ``(lo, hi)`` get the ordinary integral.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    t, wt = _gl(n)
    x = 0.5 * (hi + lo) + 0.5 * (hi - lo) * t
    wx = 0.5 * (hi - lo) * wt
    fx = func(x)
    fy = func(y)
    inside = (y > lo) & (y < hi)
    diff = x[None, :] - y[:, None]
    out = np.empty(y.shape, dtype=np.result_type(fx, fy, float))
    if inside.any():
        d = diff[inside]
        small = np.abs(d) < 1e-14 * (hi - lo)
        num = fx[None, :] - fy[inside][:, None]
        vals = np.where(small, 0.0, num / np.where(small, 1.0, d))
        yi = y[inside]
        out[inside] = vals @ wx + fy[inside] * np.log((hi - yi) / (yi - lo))
    if (~inside).any():
        out[~inside] = (fx[None, :] / diff[~inside]) @ wx
    return out


def pv_weighted_full(geometry: GapGeometry, func: Callable[[np.ndarray], np.ndarray], y, n: int = 200) -> np.ndarray:
    """``PV int_{a_1}^{a_{2g+2}} func(x) / (w(x) (x - y)) dx`` for smooth ``func``.

    In the angle variable ``x = c - r cos(theta)`` the weight ``dx/w`` becomes
    ``dtheta`` and ``PV int_0^pi dtheta/(x(theta) - y) = 0`` inside, so only the
    subtracted integrand remains.
    """
    a = geometry.a
    y = np.atleast_1d(np.asarray(y, dtype=float))
    c, r = 0.5 * (a[0] + a[-1]), 0.5 * (a[-1] - a[0])
    t, wt = _gl(n)
    th = 0.5 * np.pi * (t + 1)
    wth = 0.5 * np.pi * wt
    x = c - r * np.cos(th)
    fx = func(x)
    fy = func(y)
    diff = x[None, :] - y[:, None]
    small = np.abs(diff) < 1e-14 * r
    vals = np.where(small, 0.0, (fx[None, :] - fy[:, None]) / np.where(small, 1.0, diff))
    return vals @ wth


def _w_moments(geometry: GapGeometry, kmax: int) -> np.ndarray:
    """``M_j = int_{a_1}^{a_{2g+2}} w(y) y^j dy`` for ``j <= kmax`` (Gauss-Legendre in the angle)."""
    a = geometry.a
    c, r = 0.5 * (a[0] + a[-1]), 0.5 * (a[-1] - a[0])
    t, wt = _gl(kmax + 48)
    th = 0.5 * np.pi * (t + 1)
    wth = 0.5 * np.pi * wt
    y = c - r * np.cos(th)
    base = (r * np.sin(th)) ** 2 * wth
    return np.array([np.sum(base * y ** j) for j in range(kmax + 1)])


def phantom_phi(geometry: GapGeometry, coeffs) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form ``phi = H f`` for ``f = w p`` with ``p = sum coeffs[k] x^k``.

    Splitting ``p(y) = p(x) + (y - x) q(x, y)`` gives
    ``(1/pi) int w p/(y - x) dy = p(x)(c - x) + (1/pi) int w(y) q(x, y) dy``.
    """
    p = np.atleast_1d(np.asarray(coeffs, dtype=float))
    c = geometry.center
    deg = len(p) - 1
    M = _w_moments(geometry, max(deg - 1, 0))
    # q(x, y) = sum_k p_k sum_{j<k} y^j x^{k-1-j}; integrate in y
    qc = np.zeros(max(deg, 1))
    for k in range(1, deg + 1):
        for j in range(k):
            qc[k - 1 - j] += p[k] * M[j]

    def phi(x):
        x = np.asarray(x, dtype=float)
        return P.polyval(x, p) * (c - x) + P.polyval(x, qc) / np.pi

    return phi


# envelope and series ------------------------------------------------------

def fit_envelope(spectral: Spectral, surface: Surface, z, nmax: int | None = None) -> float:
    """Fitted ``C_omega = max_{n, z} |f_n(z)| e^{-kappa_n (Re g(z) + 1/2)}`` over resolved ``n``."""
    nmax = spectral.n_resolved if nmax is None else min(nmax, spectral.n_resolved)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    ns = np.arange(nmax)
    fz = np.abs(spectral.evaluate_f_off_interval(ns, z))
    reg = surface.g_function(z + 0j, side=1).real
    env = np.exp(spectral.kappa[None, :nmax] * (reg[:, None] + 0.5))
    return float((fz / env).max())


@dataclass
class ContinuationSeries:
    """Truncated expansion ``psi = sum_{n < n_max} psi_n f_n``.

    Attributes
    ----------
    psi_n, phi_n : ndarray
        Coefficients with ``psi_n = 2 lambda_n phi_n`` for every resolved ``n``.
    n_max : int
        Number of retained terms.
    C_omega : float
        Fitted envelope constant for ``|f_n|`` in the gaps.
    phi_star : float
        ``max |phi_n|`` over all resolved coefficients.
    """

    spectral: Spectral
    surface: Surface
    psi_n: np.ndarray
    phi_n: np.ndarray
    n_max: int
    C_omega: float = float("nan")
    phi_star: float = float("nan")
    tol: float = 1e-3
    extra: dict = field(default_factory=dict)

    def terms(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.n_max == 0:
            return np.zeros((len(z), 0))
        ns = np.arange(self.n_max)
        return self.spectral.evaluate_f_off_interval(ns, z) * self.psi_n[None, : self.n_max]

    def value(self, z) -> np.ndarray:
        """Partial sum at points ``z`` off ``I_e``."""
        t = self.terms(z)
        out = t.sum(1)
        return out.real if np.isrealobj(self.psi_n) and np.all(np.imag(z) == 0) else out

    def tail_bound(self, z) -> np.ndarray:
        """``2 C_omega phi* sum_{n >= n_max} e^{kappa_n (Re g(z) - 1/2)}``.

        Resolved ``kappa_n`` are used where available; beyond the noise floor
        they are extended with the asymptotic spacing and summed geometrically.
        """
        z = np.atleast_1d(np.asarray(z, dtype=float))
        reg = self.surface.g_function(z + 0j, side=1).real
        a = reg - 0.5
        kap = self.spectral.kappa[: self.spectral.n_resolved]
        slope = np.pi / abs(self.surface.tau11.imag)
        total = np.zeros(len(z))
        for n in range(self.n_max, len(kap)):
            total += np.exp(kap[n] * a)
        start = max(self.n_max, len(kap))
        k_start = kap[-1] + slope * (start - len(kap) + 1)
        # sum_{m >= 0} e^{(k_start + m slope) a}
        total += np.exp(k_start * a) / (1 - np.exp(slope * a))
        return 2 * self.C_omega * self.phi_star * total

    def evaluate(self, z):
        """Return ``(value, tail_bound, ok)`` with ``ok`` false where the bound exceeds ``tol``."""
        v = self.value(z)
        tb = self.tail_bound(z)
        scale = np.maximum(np.abs(v), 1e-300)
        return v, tb, tb <= self.tol * np.maximum(scale, 1.0)

    def increments(self, z) -> np.ndarray:
        """Absolute partial sums ``sum_{k<=n} |psi_k f_k(z)|`` per point."""
        return np.cumsum(np.abs(self.terms(z)), axis=1)


def _finish(spectral, surface, psi_n, phi_n, n_max, envelope_points, tol):
    if envelope_points is None:
        envelope_points = default_gap_points(spectral.geometry, 16, 0.05)
    C = fit_envelope(spectral, surface, envelope_points) if n_max else 0.0
    # phi* bounds every coefficient, not only the retained ones
    phi_star = float(np.abs(phi_n).max()) if n_max else 0.0
    return ContinuationSeries(spectral, surface, psi_n, phi_n, n_max, C, phi_star, tol)


def _nmax(spectral: Spectral, n_max):
    if n_max is None:
        return spectral.n_resolved
    if n_max > spectral.n_resolved:
        raise ValueError(f"n_max={n_max} exceeds the resolved count {spectral.n_resolved}")
    return int(n_max)


def decompose(spectral: Spectral, surface: Surface, phi_values: np.ndarray, n_max: int | None = None,
              envelope_points=None, tol: float = 1e-3) -> ContinuationSeries:
    """Expand exterior data in ``{h_n}`` and set ``psi_n = 2 lambda_n phi_n``.

    ``phi_values`` are samples at ``spectral.exterior.x``. Coefficients are
    kept for every resolved ``n``; the series uses the first ``n_max``.
    """
    n_max = _nmax(spectral, n_max)
    ge = spectral.exterior
    nres = spectral.n_resolved
    phi_values = np.asarray(phi_values, dtype=float)
    H = spectral.h_weighted(np.arange(nres))
    phi_n = (ge.w * phi_values / ge.wfun) @ H
    psi_n = 2 * spectral.lam[:nres] * phi_n
    return _finish(spectral, surface, psi_n, phi_n, n_max, envelope_points, tol)


def decompose_psi(spectral: Spectral, surface: Surface, psi_values: np.ndarray, n_max: int | None = None,
                  envelope_points=None, tol: float = 1e-3) -> ContinuationSeries:
    """Expand ``psi`` sampled at ``spectral.interior.x`` in ``{f_n}``."""
    n_max = _nmax(spectral, n_max)
    gi = spectral.interior
    nres = spectral.n_resolved
    F = spectral.f_weighted(np.arange(nres))
    psi_n = (gi.w * np.asarray(psi_values, dtype=float) / gi.wfun) @ F
    phi_n = psi_n / (2 * spectral.lam[:nres])
    return _finish(spectral, surface, psi_n, phi_n, n_max, envelope_points, tol)


def direct_psi(geometry: GapGeometry, phi: Callable[[np.ndarray], np.ndarray], z, n: int = 400) -> np.ndarray:
    """Oracle ``psi(z) = -(w(z)/pi) int_{I_e} phi(x) / (w(x)(x - z)) dx`` for ``z`` off ``I_e``."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    total = np.zeros(z.shape, complex)
    for lo, hi in geometry.exterior_cuts:
        r = cosine_rule(lo, hi, n)
        wx = geometry.w_rule(r)
        total += ((r.weights * phi(r.nodes) / wx)[None, :] / (r.nodes[None, :] - z[:, None])).sum(1)
    out = -geometry.weight_w(z) / np.pi * total
    return out.real if np.all(z.imag == 0) else out


def default_gap_points(geometry: GapGeometry, per_gap: int, margin: float) -> np.ndarray:
    """Evenly spaced points in every gap, ``margin * gap length`` away from its ends."""
    pts = []
    for lo, hi in geometry.gaps:
        d = margin * (hi - lo)
        pts.append(np.linspace(lo + d, hi - d, per_gap))
    return np.concatenate(pts)


# end-to-end interior problem ------------------------------------------------

@dataclass
class RecoveryResult:
    z: np.ndarray
    recovered: np.ndarray
    truth: np.ndarray
    tail_bound: np.ndarray
    series: ContinuationSeries

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.recovered - self.truth)

    @property
    def rel_err(self) -> np.ndarray:
        return self.abs_err / np.maximum(np.abs(self.truth), 1e-300)

    def rows(self):
        return list(zip(self.z, self.recovered, self.truth, self.abs_err, self.tail_bound))


def recover_roi(spectral: Spectral, surface: Surface, coeffs, z, n_max: int | None = None,
                n_pv: int = 200) -> RecoveryResult:
    """Recover the phantom ``f = w p`` in the gaps from ROI data and the prior on ``I_i``.

    ``psi`` on ``I_i`` is assembled from the prior and the Hilbert data on
    ``[a_2, a_{2g+1}]``, continued into the gaps by the series, and ``f`` is
    recovered by subtracting the same principal-value term.
    """
    geo = spectral.geometry
    a = geo.a
    p = np.atleast_1d(np.asarray(coeffs, dtype=float))
    phi = phantom_phi(geo, p)
    lo, hi = a[1], a[-2]

    def roi_term(y):
        # (w(y)/pi) PV int_{a_2}^{a_{2g+1}} phi/(w(x)(x - y)) dx
        G = lambda x: phi(x) / geo.w_real(x)
        return geo.w_real(y) / np.pi * pv_integral(G, lo, hi, y, n_pv)

    truth_f = lambda y: geo.w_real(y) * P.polyval(y, p)
    xi = spectral.interior.x
    psi_i = truth_f(xi) + roi_term(xi)
    series = decompose_psi(spectral, surface, psi_i, n_max)
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if not np.any(p):
        rec = np.zeros(len(z))
    else:
        rec = series.value(z) - roi_term(z)
    return RecoveryResult(z, rec, truth_f(z), series.tail_bound(z), series)
