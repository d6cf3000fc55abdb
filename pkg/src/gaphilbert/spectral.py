"""Nystrom discretization of the coupled singular value problem.

With ``hat h = h/sqrt(w)`` on ``I_e`` and ``hat f = i f/sqrt(w)`` on ``I_i`` the
system reads ``H_e^{-1} hat h = lambda hat f`` and ``H_i hat f = lambda hat h``
with kernels ``sqrt(w(y)) / (2 pi i sqrt(w(x)) (x - y))`` and its adjoint. The
block ``C[y, x] = sqrt(W_y W_x) sqrt(w(y)) / (2 pi sqrt(w(x)) (x - y))``
(``W`` quadrature weights) is real and ``H_e^{-1}`` discretizes to ``-i C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import eigh, svd

from .geometry import GapGeometry, cosine_rule

__all__ = ["Spectral", "SpectralError", "NOISE_FLOOR"]

NOISE_FLOOR = 1e-13


class SpectralError(RuntimeError):
    pass


def count_sign_changes(v: np.ndarray, rel_tol: float = 1e-8) -> int:
    v = np.asarray(v, dtype=float)
    v = v[np.abs(v) > rel_tol * np.abs(v).max()]
    return int(np.sum(np.sign(v[:-1]) != np.sign(v[1:])))


@dataclass
class _Grid:
    x: np.ndarray
    w: np.ndarray
    cut: np.ndarray
    wfun: np.ndarray  # w(x) from accurate endpoint distances


class Spectral:
    """Singular triples ``(lambda_n, hat f_n, hat h_n)`` from a Nystrom grid.

    Parameters
    ----------
    geometry : GapGeometry
    n_per_segment : int
        Cosine-Gauss nodes per cut.
    """

    def __init__(self, geometry: GapGeometry, n_per_segment: int = 128):
        if n_per_segment < 8:
            raise SpectralError("need at least 8 nodes per cut")
        self.geometry = geometry
        self.n_per_segment = int(n_per_segment)
        self.interior = self._grid(geometry.interior_cuts, 1)
        ext = geometry.exterior_cuts
        self.exterior = self._grid(ext, 0, last=geometry.genus)
        self._decompose()

    def _grid(self, cuts, first, last=None) -> _Grid:
        xs, ws, cs, wf = [], [], [], []
        ids = list(range(first, first + len(cuts))) if last is None else [0, last]
        for k, (lo, hi) in zip(ids, cuts):
            r = cosine_rule(lo, hi, self.n_per_segment)
            xs.append(r.nodes)
            ws.append(r.weights)
            cs.append(np.full(r.order, k))
            wf.append(self.geometry.w_rule(r))
        return _Grid(np.concatenate(xs), np.concatenate(ws), np.concatenate(cs), np.concatenate(wf))

    # matrices ----------------------------------------------------------

    @cached_property
    def C(self) -> np.ndarray:
        gi, ge = self.interior, self.exterior
        num = np.sqrt(gi.w * gi.wfun)[:, None] * np.sqrt(ge.w / ge.wfun)[None, :]
        return num / (2 * np.pi * (ge.x[None, :] - gi.x[:, None]))

    def build_khat(self) -> np.ndarray:
        """Hermitian Nystrom matrix ``D^{1/2} K D^{1/2}`` with blocks ordered ``(I_i, I_e)``."""
        C = self.C
        ni, ne = C.shape
        M = np.zeros((ni + ne, ni + ne), complex)
        M[:ni, ni:] = -1j * C
        M[ni:, :ni] = 1j * C.T
        return M

    def khat_eigenvalues(self) -> np.ndarray:
        return eigh(self.build_khat(), eigvals_only=True)

    # decomposition -----------------------------------------------------

    def _decompose(self):
        U, S, Vt = svd(self.C, full_matrices=False)
        V = Vt.T
        # first lobe of hat f on I_i positive imaginary: hat f = -i U/sqrt(W)
        order = np.argsort(self.interior.x, kind="stable")
        for n in range(len(S)):
            col = -U[order, n]
            big = np.nonzero(np.abs(col) > 1e-3 * np.abs(col).max())[0]
            if big.size and col[big[0]] < 0:
                U[:, n] *= -1
                V[:, n] *= -1
        self.U, self.S, self.V = U, S, V
        self.lam = S
        self.kappa = -np.log(S)
        self.n_resolved = int(np.sum(S > NOISE_FLOOR * S[0]))

    @property
    def size(self) -> int:
        return len(self.S)

    def f_hat(self, n) -> np.ndarray:
        """``hat f_n`` at interior nodes (purely imaginary), unit ``L^2(I_i)`` norm."""
        return -1j * self.U[:, n] / np.sqrt(self.interior.w)[:, None] if np.ndim(n) else \
            -1j * self.U[:, n] / np.sqrt(self.interior.w)

    def h_hat(self, n) -> np.ndarray:
        """``hat h_n`` at exterior nodes (real), unit ``L^2(I_e)`` norm."""
        return self.V[:, n] / (np.sqrt(self.exterior.w)[:, None] if np.ndim(n) else np.sqrt(self.exterior.w))

    def f_weighted(self, n) -> np.ndarray:
        """``f_n = -i sqrt(w) hat f_n`` (real), unit norm in ``L^2(I_i, 1/w)``."""
        s = np.sqrt(self.interior.wfun)
        return (-1j * (s[:, None] if np.ndim(n) else s) * self.f_hat(n)).real

    def h_weighted(self, n) -> np.ndarray:
        """``h_n = sqrt(w) hat h_n``, unit norm in ``L^2(I_e, 1/w)``."""
        s = np.sqrt(self.exterior.wfun)
        return (s[:, None] if np.ndim(n) else s) * self.h_hat(n)

    def sign_changes(self, n: int) -> int:
        o = np.argsort(self.interior.x)
        return count_sign_changes(self.f_hat(n).imag[o])

    def check_resolved(self, n: int):
        if n >= self.n_resolved:
            raise SpectralError(
                f"n={n} is below the noise floor (lambda_n/lambda_0 < {NOISE_FLOOR:g}); "
                f"resolved n < {self.n_resolved}")

    # discrete operators ------------------------------------------------

    def apply_He_inv(self, h_hat_vals: np.ndarray) -> np.ndarray:
        """Discrete ``H_e^{-1}`` acting on ``hat h`` samples."""
        sw = np.sqrt(self.exterior.w)
        return -1j * (self.C @ (sw * h_hat_vals)) / np.sqrt(self.interior.w)

    def apply_Hi(self, f_hat_vals: np.ndarray) -> np.ndarray:
        """Discrete ``H_i`` acting on ``hat f`` samples."""
        sw = np.sqrt(self.interior.w)
        return 1j * (self.C.T @ (sw * f_hat_vals)) / np.sqrt(self.exterior.w)

    # off-interval evaluation -------------------------------------------

    def evaluate_f_off_interval(self, n, z, weighted: bool = True) -> np.ndarray:
        """Singular function ``f_n`` (or ``hat f_n``) at points ``z`` off ``I_e``.

        Uses ``2 lambda_n f_n = H_e^{-1} h_n``, a Cauchy integral over ``I_e``
        that is analytic off ``I_e``. Returns shape ``(len(z), len(n))`` for an
        array of indices.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        scalar = np.ndim(n) == 0
        ns = np.atleast_1d(n)
        for k in ns:
            self.check_resolved(int(k))
        ge = self.exterior
        hh = self.V[:, ns] / np.sqrt(ge.w)[:, None]  # hat h
        kern = (ge.w / np.sqrt(ge.wfun))[None, :] / (ge.x[None, :] - z[:, None])
        integral = kern @ hh  # int hat h/(sqrt(w)(x - z))
        lam = self.S[ns][None, :]
        wz = self.geometry.weight_w(z)[:, None]
        if weighted:
            out = -wz * integral / (2 * np.pi * lam)
        else:
            out = np.sqrt(wz) * integral / (2j * np.pi * lam)
        return out[:, 0] if scalar else out

    def evaluate_f_derivatives(self, n: int, z, kmax: int) -> np.ndarray:
        """Derivatives ``f_n^{(k)}(z)``, ``k = 0..kmax``, of the weighted singular function.

        ``f_n = -w I / (2 pi lambda_n)`` with ``I(z) = int hat h/(sqrt(w)(x - z))``;
        ``I^{(k)}`` comes from differentiating the Cauchy kernel and ``w^{(k)}``
        from ``w^2 = (a_{2g+2} - z)(z - a_1)``.
        """
        self.check_resolved(int(n))
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        ge = self.exterior
        dens = ge.w / np.sqrt(ge.wfun) * self.V[:, n] / np.sqrt(ge.w)
        diff = ge.x[None, :] - z[:, None]
        I = np.array([math.factorial(k) * (dens[None, :] / diff ** (k + 1)).sum(1) for k in range(kmax + 1)])
        a1, b = self.geometry.a[0], self.geometry.a[-1]
        q = [-(z - a1) * (z - b), -(2 * z - a1 - b), np.full(z.shape, -2.0 + 0j)]
        wd = [self.geometry.weight_w(z)]
        for k in range(1, kmax + 1):
            qk = q[k] if k < 3 else 0.0
            s = sum(math.comb(k, j) * wd[j] * wd[k - j] for j in range(1, k))
            wd.append((qk - s) / (2 * wd[0]))
        out = np.array([sum(math.comb(k, j) * wd[j] * I[k - j] for j in range(k + 1)) for k in range(kmax + 1)])
        return -out / (2 * np.pi * self.S[n])

    def summary_rows(self, kappa_tilde: np.ndarray | None = None, nmax: int | None = None):
        nmax = self.n_resolved if nmax is None else min(nmax, self.n_resolved)
        rows = []
        for n in range(nmax):
            kt = float(kappa_tilde[n]) if kappa_tilde is not None and n < len(kappa_tilde) else float("nan")
            rows.append((n, float(self.S[n]), float(self.kappa[n]), self.sign_changes(n), kt,
                         abs(float(self.kappa[n]) - kt)))
        return rows
