"""Asymptotic singular functions built from theta functions on the surface.

For each divisor crossing ``kappa_tilde_n`` the model function

``Upsilon(z) = s sqrt(Theta(W_0 + sX) / Theta(f + sX) * C_0 / (i tau_1 . grad Theta(f)))
              * Theta(u_+(z) + s u(inf) + f) r_+(z) / Theta(u_+(z) + s u(inf) + W_0)``

with ``s = +-1``, ``X = 2 u(inf)`` and ``C_0 = [A^{-1} grad Theta(W_0)]_g`` gives

``f_tilde = i Im[2 Upsilon e^{-i kappa Im g_+ - i Im d_+}]`` on ``I_i`` and
``h_tilde = Re[2 Upsilon e^{-i kappa Im g_+ - i Im d_+}]`` on ``I_e``.

The lattice representative of the divisor point is ``f = W(kappa) - W_0 + tau_1``
and ``Upsilon`` carries an extra factor ``i``; both choices are fixed by
agreement with the Nystrom singular functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .surface import Surface
from .theta import ThetaContext, constant_W0, line_W

__all__ = ["AsymptoticModel", "AsymptoticTriple", "BoundaryTable", "lambda_asymptotic_slope"]


def lambda_asymptotic_slope(surface: Surface) -> float:
    """Predicted growth of ``-ln lambda_n`` per index, ``pi / Im tau_11``."""
    return float(math.pi / abs(surface.tau11.imag))


@dataclass
class BoundaryTable:
    """n-independent boundary data on a set of real points inside cuts."""

    x: np.ndarray
    u_plus: np.ndarray
    im_g_plus: np.ndarray
    im_d_plus: np.ndarray
    r_plus: np.ndarray


@dataclass
class AsymptoticTriple:
    n: int
    kappa_tilde: float
    f_vec: np.ndarray
    prefactor: complex
    branch: int
    theta_at_f: complex

    @property
    def lambda_model(self) -> float:
        return math.exp(-self.kappa_tilde)


class AsymptoticModel:
    """Evaluator for ``Upsilon``, ``f_tilde`` and ``h_tilde``.

    Parameters
    ----------
    surface : Surface
    kappa_tilde : array_like
        Accepted divisor crossings in increasing order.
    ctx : ThetaContext, optional
    """

    def __init__(self, surface: Surface, kappa_tilde, ctx: ThetaContext | None = None):
        self.surface = surface
        self.ctx = ThetaContext(surface.tau) if ctx is None else ctx
        self.kappa_tilde = np.asarray(kappa_tilde, dtype=float)
        self.W0 = constant_W0(surface)
        self.uinf = surface.u_infinity
        g = surface.g
        self.C0 = (surface.A_inv @ self.ctx.grad_theta(self.W0))[g - 1]
        self._triples: dict[int, AsymptoticTriple] = {}

    def table(self, x) -> BoundaryTable:
        """Tabulate ``u_+``, ``Im g_+``, ``Im d_+`` and ``r_+`` at real ``x`` inside cuts."""
        s = self.surface
        x = np.asarray(x, dtype=float)
        up = s.abel_boundary(x, 1)
        img = (-2 * up[:, 0]).imag
        imd = s.d_function(x + 0j, side=1).imag
        rp = s.r_function(x + 0j, side=1)
        return BoundaryTable(x, up, img, imd, rp)

    def f_vec(self, n: int) -> np.ndarray:
        k = self.kappa_tilde[n]
        return line_W(self.surface, k) - self.W0 + self.surface.tau1

    def triple(self, n: int, branch: int | None = None) -> AsymptoticTriple:
        """Prefactor data for index ``n``.

        Without ``branch`` the sign ``s`` maximizing ``|Theta(f + 2 s u(inf))|``
        is used; on symmetric geometries the other branch is 0/0.
        """
        if branch is None and n in self._triples:
            return self._triples[n]
        if n >= len(self.kappa_tilde):
            raise IndexError(f"no divisor crossing for n={n}")
        th = self.ctx.theta
        f = self.f_vec(n)
        X = 2 * self.uinf
        if branch is None:
            vals = {s: abs(th(f + s * X)) for s in (1, -1)}
            s = max(vals, key=vals.get)
        else:
            s = int(branch)
        grad = self.ctx.grad_theta(f)
        q = th(self.W0 + s * X) / th(f + s * X) * self.C0 / (1j * (self.surface.tau1 @ grad))
        pref = 1j * s * np.sqrt(q)
        t = AsymptoticTriple(n, float(self.kappa_tilde[n]), f, complex(pref), s, complex(th(f)))
        if branch is None:
            self._triples[n] = t
        return t

    def upsilon(self, n: int, tab: BoundaryTable, branch: int | None = None) -> np.ndarray:
        """``Upsilon`` (including the phase factor ``i``) at the table points."""
        t = self.triple(n, branch)
        th = self.ctx.theta
        s = t.branch
        num = th(tab.u_plus + s * self.uinf + t.f_vec)
        den = th(tab.u_plus + s * self.uinf + self.W0)
        return t.prefactor * num * tab.r_plus / den

    def _carrier(self, n: int, tab: BoundaryTable, branch: int | None = None) -> np.ndarray:
        k = self.kappa_tilde[n]
        return 2 * self.upsilon(n, tab, branch) * np.exp(-1j * k * tab.im_g_plus - 1j * tab.im_d_plus)

    def f_tilde(self, n: int, tab: BoundaryTable, branch: int | None = None) -> np.ndarray:
        """Model for ``hat f_n`` on ``I_i``; purely imaginary."""
        return 1j * self._carrier(n, tab, branch).imag

    def h_tilde(self, n: int, tab: BoundaryTable, branch: int | None = None) -> np.ndarray:
        """Model for ``hat h_n`` on ``I_e``; real."""
        return self._carrier(n, tab, branch).real

    def f_tilde_weighted(self, n: int, tab: BoundaryTable, w: np.ndarray) -> np.ndarray:
        """Model for ``f_n`` normalized in ``L^2(I_i, 1/w)``."""
        return np.sqrt(w) * self._carrier(n, tab).imag

    def h_tilde_weighted(self, n: int, tab: BoundaryTable, w: np.ndarray) -> np.ndarray:
        return np.sqrt(w) * self._carrier(n, tab).real


def align(reference: np.ndarray, model: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, float]:
    """Flip ``model`` to maximize its real ``L^2`` inner product with ``reference``."""
    ip = np.sum(weights * np.conj(reference) * model).real
    s = -1.0 if ip < 0 else 1.0
    return s * model, s


def l2_norm(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.sum(weights * np.abs(values) ** 2)))
