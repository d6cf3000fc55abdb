"""Riemann theta function, the real line ``W(kappa)`` and its divisor crossings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .surface import Surface

__all__ = [
    "ThetaContext",
    "ThetaError",
    "DivisorScan",
    "line_W",
    "constant_W0",
    "find_kappa_tilde",
]


class ThetaError(RuntimeError):
    pass


class ThetaContext:
    """Truncated lattice sum for ``Theta(v) = sum_n exp(i pi n.tau.n + 2 pi i n.v)``.

    The argument is first reduced by quasi-periodicity so that
    ``Im v = Im(tau) c`` with ``|c_k| <= 1/2``; the lattice cube ``[-m, m]^g``
    then captures every term above ``tol`` relative to the leading one.

    Parameters
    ----------
    tau : (g, g) complex array
        Symmetric with positive definite imaginary part.
    tol : float
        Target truncation accuracy.
    radius : int, optional
        Override the automatically chosen cube half-width.
    """

    def __init__(self, tau: np.ndarray, tol: float = 1e-14, radius: int | None = None):
        tau = np.asarray(tau, dtype=complex)
        self.tau = tau
        self.g = tau.shape[0]
        self.tol = float(tol)
        Y = 0.5 * (tau.imag + tau.imag.T)
        lam = np.linalg.eigvalsh(Y).min()
        if lam <= 0:
            raise ThetaError("Im tau must be positive definite")
        self.lambda_min = float(lam)
        self._Y = Y
        self._Yinv = np.linalg.inv(Y)
        if radius is None:
            # exp(-pi lam (m - c)^2) < tol with a shift margin for |c| <= g/2
            base = math.sqrt(-math.log(self.tol) / (math.pi * lam))
            radius = int(math.ceil(base + 0.5 * math.sqrt(self.g))) + 1
        self.radius = int(radius)
        rng = range(-self.radius, self.radius + 1)
        self.lattice = np.array(list(itertools.product(rng, repeat=self.g)), dtype=float)
        self.quad = np.einsum("ni,ij,nj->n", self.lattice, tau, self.lattice)

    def tail_bound(self) -> float:
        """Bound on dropped terms relative to the leading one for reduced arguments."""
        m = self.radius - 0.5 * math.sqrt(self.g)
        return math.exp(-math.pi * self.lambda_min * m * m)

    def _reduce(self, v: np.ndarray):
        c = (v.imag @ self._Yinv.T)
        n0 = np.round(c)
        vr = v - n0 @ self.tau.T
        # Theta(v) = exp(-2 pi i n0.vr - i pi n0.tau.n0) Theta(vr)
        logf = -2j * np.pi * np.einsum("...i,...i->...", n0, vr) \
            - 1j * np.pi * np.einsum("...i,ij,...j->...", n0, self.tau, n0)
        return vr, n0, logf

    def _terms(self, vr: np.ndarray) -> np.ndarray:
        return np.exp(1j * np.pi * self.quad + 2j * np.pi * (vr @ self.lattice.T))

    def theta(self, v) -> np.ndarray:
        """``Theta(v)`` for ``v`` of shape ``(..., g)``."""
        v = np.asarray(v, dtype=complex)
        vr, _, logf = self._reduce(v)
        return np.exp(logf) * self._terms(vr).sum(-1)

    def grad_theta(self, v) -> np.ndarray:
        """Gradient ``dTheta/dv`` of shape ``(..., g)``."""
        v = np.asarray(v, dtype=complex)
        vr, n0, logf = self._reduce(v)
        e = self._terms(vr)
        th = e.sum(-1)
        gr = 2j * np.pi * (e @ self.lattice)
        return np.exp(logf)[..., None] * (gr - 2j * np.pi * n0 * th[..., None])

    def log_abs_theta(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        vr, _, logf = self._reduce(v)
        return logf.real + np.log(np.abs(self._terms(vr).sum(-1)))


def line_W(surface: Surface, kappa) -> np.ndarray:
    """``W(kappa) = kappa tau_1/(i pi) + u(inf) + e_1/2 + e_g/4``; real for real ``kappa``.

    The constant ``u(inf) + e_g/4`` equals ``L delta/(2 pi) + e_g/2``, i.e. it is
    tied to the jump constants of ``d``.
    """
    kappa = np.asarray(kappa, dtype=float)
    g = surface.g
    const = surface.u_infinity + 0.5 * surface.e(1) + 0.25 * surface.e(g)
    W = kappa[..., None] * (surface.tau1 / (1j * np.pi)) + const
    return W


def constant_W0(surface: Surface) -> np.ndarray:
    """``W_0 = tau_1/2 - (e_1 + e_g)/2``."""
    return 0.5 * surface.tau1 - 0.5 * (surface.e(1) + surface.e(surface.g))


@dataclass
class DivisorScan:
    """Scan of ``Theta(W(kappa) - W_0)`` along real ``kappa``.

    Attributes
    ----------
    kappa : ndarray
        Scan grid.
    values : ndarray
        ``|Theta(W(kappa) - W_0)|`` on the grid.
    roots : ndarray
        Refined crossings ``kappa_tilde_n`` in increasing order.
    flagged : list of float
        Grid locations of near-tangential minima that were not accepted.
    """

    kappa: np.ndarray
    values: np.ndarray
    roots: np.ndarray
    flagged: list = field(default_factory=list)
    period: float = float("nan")

    @property
    def lambda_tilde(self) -> np.ndarray:
        return np.exp(-self.roots)

    def window_counts(self, n_windows: int, start: float | None = None, g: int = 2) -> np.ndarray:
        """Root counts in consecutive windows of length ``(g - 1) * period``."""
        start = self.kappa[0] if start is None else start
        width = (g - 1) * self.period
        edges = start + width * np.arange(n_windows + 1)
        return np.histogram(self.roots, bins=edges)[0]

    def rows(self):
        """``(kappa, |Theta|, is_root)`` rows with refined roots merged in."""
        k = np.concatenate([self.kappa, self.roots])
        v = np.concatenate([self.values, np.zeros_like(self.roots)])
        flag = np.concatenate([np.zeros(len(self.kappa), int), np.ones(len(self.roots), int)])
        o = np.argsort(k, kind="stable")
        return list(zip(k[o], v[o], flag[o]))


def _dephased(ctx: ThetaContext, surface: Surface, W0: np.ndarray, kappa) -> np.ndarray:
    """Real function with the same zeros as ``Theta(W(kappa) - W_0)``.

    With ``Im(W - W_0) = -Im tau_1/2`` one has
    ``conj Theta(v) = exp(-2 pi i v_1 - i pi tau_11) Theta(v)``, so
    ``Theta(v) exp(-i pi Re v_1)`` is real up to a positive factor.
    """
    v = line_W(surface, kappa) - W0
    th = ctx.theta(v)
    val = th * np.exp(-1j * np.pi * v[..., 0].real)
    return val.real


def find_kappa_tilde(surface: Surface, ctx: ThetaContext | None = None,
                     kappa_min: float = 0.0, kappa_max: float = 40.0,
                     step: float | None = None, xtol: float = 1e-12) -> DivisorScan:
    """Locate the crossings ``kappa_tilde_n`` of ``W(kappa) - W_0`` with the theta divisor.

    Sign changes of the de-phased real function are bracketed on the grid and
    refined with Brent's method. Grid minima of ``|Theta|`` that are deep but
    show no sign change are reported in ``flagged`` rather than accepted.
    """
    ctx = ThetaContext(surface.tau) if ctx is None else ctx
    period = math.pi / surface.tau11.imag
    step = 0.02 * period if step is None else step
    if step >= 0.1 * period:
        raise ValueError(f"grid step {step} must be below {0.1 * period:.4g}")
    W0 = constant_W0(surface)
    n = int(math.ceil((kappa_max - kappa_min) / step)) + 1
    ks = np.linspace(kappa_min, kappa_max, n)
    F = _dephased(ctx, surface, W0, ks)
    values = np.abs(ctx.theta(line_W(surface, ks) - W0))
    roots = []
    f = lambda k: float(_dephased(ctx, surface, W0, np.array([k]))[0])
    for i in np.nonzero(np.sign(F[:-1]) * np.sign(F[1:]) < 0)[0]:
        roots.append(brentq(f, ks[i], ks[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps))
    roots.extend(ks[np.nonzero(F == 0)[0]])
    roots = np.unique(np.array(roots))
    flagged = []
    scale = np.median(values)
    for i in range(1, n - 1):
        if values[i] < values[i - 1] and values[i] < values[i + 1] and values[i] < 1e-3 * scale:
            if not np.any(np.abs(roots - ks[i]) < 2 * step):
                flagged.append(float(ks[i]))
    return DivisorScan(ks, values, roots, flagged, period)
