"""Hyperelliptic surface data attached to a :class:`GapGeometry`.

The surface is ``y^2 = prod (z - a_j)`` with the cuts of the geometry. All
cycles deform onto the real axis, so every period is a sum of segment
integrals of ``omega`` taken on the upper side of the cuts.

Conventions
-----------
* ``A`` normalizes the differentials ``omega = [1, z, ..., z^{g-1}] / R @ A^{-1}``
  so that ``2 int_gap_j omega = e_j`` for ``j < g`` and
  ``2 int_{a_1}^{a_{2g+2}} omega_+ = e_g``.
* ``tau[i] = 2 sum_{k=i+1}^{g} int_{cut k} omega_+`` for ``i < g`` and
  ``tau[g-1] = -2 sum_{k=1}^{g} int_{cut k} omega_+``. This orientation gives
  a symmetric purely imaginary ``tau`` with positive definite imaginary part.
* The Abel map has base point ``a_1``; on the real axis the default side is
  the upper one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad_vec

from .geometry import GAP, GapGeometry, QuadratureRule

__all__ = ["Surface", "SurfaceError"]


class SurfaceError(RuntimeError):
    """Raised when a computed surface quantity violates a structural invariant."""


def _sqrt_side(d: np.ndarray, side: int, p: float = 0.5) -> np.ndarray:
    """``d**p`` with the boundary value from ``side`` (+1 upper, -1 lower) for ``d < 0``."""
    ad = np.abs(d) ** p
    return np.where(d >= 0, ad, ad * np.exp(1j * np.pi * p * side))


@dataclass
class _ThetaRule:
    """Segment rule expressed in the angle variable, ``dx / sqrt((x-lo)(hi-x)) = dtheta``."""

    lo: float
    hi: float
    kind: str
    theta: np.ndarray
    wtheta: np.ndarray
    x: np.ndarray
    dlo: np.ndarray
    dhi: np.ndarray


def _theta_rule(lo, hi, kind, n, graded=True):
    t, wt = leggauss(n)
    s = 0.5 * (t + 1.0)
    ws = 0.5 * wt
    if graded:
        th = np.pi * (s - np.sin(2 * np.pi * s) / (2 * np.pi))
        wth = np.pi * (1.0 - np.cos(2 * np.pi * s)) * ws
    else:
        th = np.pi * s
        wth = np.pi * ws
    r = 0.5 * (hi - lo)
    x = 0.5 * (hi + lo) - r * np.cos(th)
    dlo = 2 * r * np.sin(0.5 * th) ** 2
    dhi = 2 * r * np.cos(0.5 * th) ** 2
    keep = (dlo > 0) & (dhi > 0)
    return _ThetaRule(lo, hi, kind, th[keep], wth[keep], x[keep], dlo[keep], dhi[keep])


class Surface:
    """Period data, Abel map and the scalar functions ``g``, ``d`` and ``r``.

    Parameters
    ----------
    geometry : GapGeometry
    nq : int
        Gauss-Legendre order per segment for periods and Abel map values.
    nd : int
        Order of the graded rules used for the Cauchy integrals in ``d``.
    """

    def __init__(self, geometry: GapGeometry, nq: int = 96, nd: int = 400):
        self.geometry = geometry
        self.g = geometry.genus
        self.nq = int(nq)
        self.nd = int(nd)
        self.rules: list[QuadratureRule] = geometry.build_rules(self.nq)
        t, wt = leggauss(self.nq)
        self._gl = (0.5 * (t + 1.0), 0.5 * wt)
        self._build_periods()

    # periods -----------------------------------------------------------

    def _omega_raw_rule(self, rule: QuadratureRule) -> np.ndarray:
        """``[1, z, ..., z^{g-1}] / R_+`` at the nodes of ``rule``."""
        x = rule.nodes
        R = self.geometry.R_plus_rule(rule)
        return np.stack([x ** j for j in range(self.g)], -1) / R[:, None]

    def _build_periods(self):
        g = self.g
        raw = [self._omega_raw_rule(r) for r in self.rules]
        seg_raw = np.array([r.integrate(v) for r, v in zip(self.rules, raw)])
        A = np.zeros((g, g))
        gap_ids = [i for i, r in enumerate(self.rules) if r.kind == GAP]
        for j in range(g - 1):
            A[j] = 2 * seg_raw[gap_ids[j]].real
        full = 2 * seg_raw.sum(0)
        self.A_row_g_imag = float(np.abs(full.imag).max() / max(np.abs(full.real).max(), 1e-300))
        A[g - 1] = full.real
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > 1e12:
            raise SurfaceError(f"matrix A is singular (condition number {cond:.3e})")
        self.A = A
        self.A_inv = np.linalg.inv(A)
        # segment integrals of the normalized omega_+ (upper side)
        self.segment_integrals = seg_raw @ self.A_inv
        cut_ids = [i for i, r in enumerate(self.rules) if r.kind != GAP]
        self.cut_integrals = self.segment_integrals[cut_ids]
        ci = self.cut_integrals
        tau = np.zeros((g, g), complex)
        for i in range(g - 1):
            tau[i] = 2 * ci[i + 1:g].sum(0)
        tau[g - 1] = -2 * ci[:g].sum(0)
        self.tau = tau
        self._check_tau()
        # cumulative Abel map at each endpoint (upper side)
        acc = np.zeros((len(self.rules) + 1, g), complex)
        acc[1:] = np.cumsum(self.segment_integrals, 0)
        self.endpoint_abel = acc
        self.L = np.eye(g, dtype=int)
        self.L[:-1, -1] = -1

    def _check_tau(self):
        tau = self.tau
        sym = np.abs(tau - tau.T).max()
        re = np.abs(tau.real).max()
        lam = np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T)).min()
        self.tau_diagnostics = {"symmetry": float(sym), "real_part": float(re),
                                "min_eig_imag": float(lam)}
        if lam <= 0:
            raise SurfaceError(f"Im tau is not positive definite (min eigenvalue {lam:.3e})")

    @property
    def tau1(self) -> np.ndarray:
        return self.tau[:, 0]

    @property
    def tau11(self) -> complex:
        return complex(self.tau[0, 0])

    @property
    def L_inv(self) -> np.ndarray:
        Li = np.eye(self.g, dtype=int)
        Li[:-1, -1] = 1
        return Li

    @staticmethod
    def mu(j: int, g: int) -> int:
        """Index of the gap-``j`` constant in ``[x_1, ..., x_{g-1}, x_0]`` (0-based)."""
        return j - 1

    def e(self, k: int) -> np.ndarray:
        """Unit vector ``e_k`` (1-based)."""
        v = np.zeros(self.g)
        v[k - 1] = 1.0
        return v

    def a_periods(self) -> np.ndarray:
        """Matrix of A-periods; row ``j`` is the period over cycle ``A_j`` (identity)."""
        g = self.g
        gi = [i for i, r in enumerate(self.rules) if r.kind == GAP]
        out = np.zeros((g, g), complex)
        for j in range(g - 1):
            out[j] = 2 * self.segment_integrals[gi[j]]
        out[g - 1] = 2 * self.segment_integrals.sum(0)
        return out

    # differentials and the Abel map ------------------------------------

    def omega(self, z, side: int = 0) -> np.ndarray:
        """Normalized holomorphic differentials at ``z``; shape ``z.shape + (g,)``.

        ``side`` selects the boundary value on a cut for real ``z``.
        """
        z = np.asarray(z)
        if side:
            R = self.geometry.R_plus(z.real)
            if side < 0:
                R = np.conj(R)
        else:
            R = self.geometry.radical_R(z)
        zc = z.astype(complex)
        P = np.stack([zc ** j for j in range(self.g)], -1)
        return (P / R[..., None]) @ self.A_inv

    @cached_property
    def u_infinity(self) -> np.ndarray:
        """``u(inf) = -int_{-inf}^{a_1} omega``; real for real endpoints."""
        a1 = self.geometry.a[0]
        t, wt = leggauss(200)
        phi = 0.25 * np.pi * (t + 1.0)
        wphi = 0.25 * np.pi * wt
        s = np.tan(phi)
        ds = wphi / np.cos(phi) ** 2
        x = a1 - s ** 2
        # dx = -2 s ds; the 1/s behaviour of omega near a_1 is cancelled by s
        val = -np.sum(self.omega(x + 0j) * (2 * s * ds)[:, None], 0)
        return val.real

    def _partial(self, rule_idx: int, x: np.ndarray) -> np.ndarray:
        """``int_{lo}^{x} omega_+`` on segment ``rule_idx`` for ``x`` inside it."""
        rule = self.rules[rule_idx]
        lo, hi = rule.lo, rule.hi
        s, ws = self._gl
        out = np.zeros((len(x), self.g), complex)
        near_lo = (x - lo) <= (hi - x)
        full = self.segment_integrals[rule_idx]
        for mask, start, sign in ((near_lo, lo, 1.0), (~near_lo, hi, -1.0)):
            if not mask.any():
                continue
            xm = x[mask]
            h = xm - start
            tt = start + h[:, None] * s[None] ** 2
            dt = 2 * h[:, None] * s[None] * ws[None]
            vals = self.omega(tt, side=1)
            part = np.einsum("ij,ijk->ik", dt, vals)
            out[mask] = part if sign > 0 else full + part
        return out

    def abel_boundary(self, x, side: int = 1) -> np.ndarray:
        """Abel map on the real axis; on ``[a_1, a_{2g+2}]`` the ``side`` boundary value."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if side < 0:
            return np.conj(self.abel_boundary(x, 1))
        a = self.geometry.a
        out = np.zeros((len(x), self.g), complex)
        base = self.endpoint_abel
        for i, rule in enumerate(self.rules):
            if i == len(self.rules) - 1:
                m = (x >= rule.lo) & (x <= rule.hi)
            else:
                m = (x >= rule.lo) & (x < rule.hi)
            if m.any():
                out[m] = base[i] + self._partial(i, x[m])
        left = x < a[0]
        if left.any():
            out[left] = -self._outer(x[left], a[0])
        right = x > a[-1]
        if right.any():
            out[right] = base[-1] + self._outer(x[right], a[-1])
        return out

    def _outer(self, x: np.ndarray, start: float) -> np.ndarray:
        """``int_{start}^{x} omega`` along the real axis outside ``[a_1, a_{2g+2}]``."""
        def f(v):
            h = x - start
            tt = start + h * v * v
            return self.omega(tt + 0j) * (2 * h * v)[:, None]
        val, _ = quad_vec(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12, limit=200)
        return val

    def abel_map(self, z, side: int = 1) -> np.ndarray:
        """Abel map ``u(z) = int_{a_1}^{z} omega`` in the plane cut along ``[a_1, inf)``.

        Off the real axis the path runs along the upper (lower) side of the
        axis to ``Re z`` and then vertically. Real ``z`` inside
        ``[a_1, a_{2g+2}]`` uses the boundary value selected by ``side``.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.zeros(z.shape + (self.g,), complex)
        real = z.imag == 0
        if real.any():
            out[real] = self.abel_boundary(z[real].real, side)
        off = ~real
        if off.any():
            zz = z[off]
            up = zz.imag > 0
            zu = np.where(up, zz, np.conj(zz))
            x0 = zu.real
            base = self.abel_boundary(x0, 1)
            y = zu.imag

            def f(v):
                zeta = x0 + 1j * y * v * v
                return self.omega(zeta) * (1j * 2 * y * v)[:, None]

            leg, _ = quad_vec(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-11, limit=400)
            val = base + leg
            val[~up] = np.conj(val[~up])
            out[off] = val
        return out

    # jump constants ----------------------------------------------------

    @cached_property
    def Omega(self) -> np.ndarray:
        """``Omega = -2i L^{-1} tau_1`` ordered ``[Omega_1, ..., Omega_{g-1}, Omega_0]``."""
        v = -2j * (self.L_inv @ self.tau1)
        return v.real

    def Omega_from_cuts(self) -> np.ndarray:
        """``Omega_j = 4i sum_{k<=j} int_{cut k} omega_{1,+}`` with ``Omega_0`` at index ``g``."""
        c = np.cumsum(self.cut_integrals[:, 0])[: self.g]
        return 4j * c

    @cached_property
    def delta(self) -> np.ndarray:
        """``delta = 2 pi L^{-1}(u(inf) - e_g/4)``, ordered ``[delta_1, ..., delta_{g-1}, delta_0]``.

        This is the unique choice making ``d`` analytic at infinity.
        """
        return 2 * np.pi * (self.L_inv @ (self.u_infinity - 0.25 * self.e(self.g)))

    # the g-function ----------------------------------------------------

    def g_function(self, z, side: int = 0) -> np.ndarray:
        """``g(z) = 1/2 - 2 u_1(z)``; boundary values on the real axis via ``side``."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        s = side if side else 1
        if side == 0 and np.any((z.imag == 0) & (z.real >= self.geometry.a[0])):
            raise ValueError("real z >= a_1 requires a side flag")
        return 0.5 - 2 * self.abel_map(z, s)[..., 0]

    @property
    def g_infinity(self) -> float:
        return float(0.5 - 2 * self.u_infinity[0])

    # the d-function ----------------------------------------------------

    @cached_property
    def _d_rules(self) -> list[_ThetaRule]:
        return [_theta_rule(lo, hi, tag, self.nd, True) for tag, lo, hi in self.geometry.segments]

    def _phi(self, tr: _ThetaRule, x: np.ndarray, dlo: np.ndarray, dhi: np.ndarray, seg: int):
        """Density ``F * sqrt((x-lo)(hi-x))`` of the Cauchy integral defining ``d``."""
        a = self.geometry.a
        other = np.ones(x.shape, complex)
        for aj in a:
            if aj in (tr.lo, tr.hi):
                continue
            other = other * _sqrt_side(x - aj, 1)
        # sqrt(x-lo) * sqrt_+(x-hi) = i sqrt(dlo dhi)
        if tr.kind == GAP:
            dj = self.delta[seg // 2]
            return dj / other
        left = dlo if tr.lo == a[0] else x - a[0]
        right = dhi if tr.hi == a[-1] else a[-1] - x
        lnw = 0.5 * (np.log(left) + np.log(right))
        return -lnw / (1j * other)

    @cached_property
    def _phi_nodes(self) -> list[np.ndarray]:
        return [self._phi(tr, tr.x, tr.dlo, tr.dhi, i) for i, tr in enumerate(self._d_rules)]

    def _phi_continued(self, tr: _ThetaRule, z: np.ndarray, seg: int) -> np.ndarray:
        """Analytic continuation of :meth:`_phi` off the interior of its segment."""
        other = np.ones(z.shape, complex)
        for aj in self.geometry.a:
            if aj in (tr.lo, tr.hi):
                continue
            other = other * (np.sqrt(z - aj) if aj < tr.lo else 1j * np.sqrt(aj - z))
        if tr.kind == GAP:
            return self.delta[seg // 2] / other
        a = self.geometry.a
        lnw = 0.5 * (np.log(z - a[0]) + np.log(a[-1] - z))
        return -lnw / (1j * other)

    def _cauchy_sum(self, z: np.ndarray, skip: np.ndarray | None = None) -> np.ndarray:
        """``sum_seg int F/(x - z) dx`` for complex ``z``; ``skip[k]`` excludes segment ``seg``.

        Points close to the interior of a segment get that segment's integral by
        subtracting the continued density at ``z`` and adding it back through
        ``int_0^pi dtheta/(c - r cos(theta) - z) = pi / sqrt((c - z)^2 - r^2)``.
        """
        out = np.zeros(z.shape, complex)
        for i, (tr, ph) in enumerate(zip(self._d_rules, self._phi_nodes)):
            m = np.ones(z.shape, bool) if skip is None else skip != i
            r = 0.5 * (tr.hi - tr.lo)
            c = 0.5 * (tr.hi + tr.lo)
            near = m & (np.abs(z.imag) < 0.5 * r) & (z.real > tr.lo + 0.1 * r) & (z.real < tr.hi - 0.1 * r)
            far = m & ~near
            if far.any():
                out[far] += ((ph * tr.wtheta)[None] / (tr.x[None] - z[far][:, None])).sum(1)
            if near.any():
                zn = z[near]
                phz = self._phi_continued(tr, zn, i)
                diff = tr.x[None] - zn[:, None]
                reg = (((ph[None] - phz[:, None]) / diff) * tr.wtheta[None]).sum(1)
                al = c - zn
                out[near] += reg + phz * np.pi / (np.sqrt(al - r) * np.sqrt(al + r))
        return out

    def _pv_own(self, seg: int, x: np.ndarray) -> np.ndarray:
        """PV over the segment containing ``x`` using ``PV int dtheta/(x(theta) - x) = 0``."""
        tr = self._d_rules[seg]
        ph = self._phi_nodes[seg]
        r = 0.5 * (tr.hi - tr.lo)
        c = 0.5 * (tr.hi + tr.lo)
        dlo = x - tr.lo
        dhi = tr.hi - x
        phx = self._phi(tr, x, dlo, dhi, seg)
        diff = tr.x[None] - x[:, None]
        num = ph[None] - phx[:, None]
        small = np.abs(diff) < 1e-14 * max(r, 1.0)
        diff = np.where(small, 1.0, diff)
        vals = np.where(small, 0.0, num / diff)
        return (vals * tr.wtheta[None]).sum(1)

    def d_moments(self, kmax: int | None = None) -> np.ndarray:
        """Moments ``m_k = int F x^k dx``, ``k = 0..kmax`` (default ``g``)."""
        kmax = self.g if kmax is None else kmax
        out = np.zeros(kmax + 1, complex)
        for tr, ph in zip(self._d_rules, self._phi_nodes):
            for k in range(kmax + 1):
                out[k] += np.sum(ph * tr.wtheta * tr.x ** k)
        return out

    @property
    def d_infinity(self) -> complex:
        return complex(-self.d_moments()[self.g] / (2j * np.pi))

    def d_function(self, z, side: int = 0) -> np.ndarray:
        """``d(z) = R(z)/(2 pi i) int_I F(x)/(x - z) dx`` with ``F = -ln w/R_+`` on cuts
        and ``i delta/R`` on gaps.

        For real ``z`` in ``(a_1, a_{2g+2})`` the ``side`` boundary value is
        returned (``side`` must be +1 or -1).
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.zeros(z.shape, complex)
        a = self.geometry.a
        real = (z.imag == 0) & (z.real > a[0]) & (z.real < a[-1])
        if real.any() and side == 0:
            raise ValueError("real z inside [a_1, a_{2g+2}] requires a side flag")
        off = ~real
        if off.any():
            zz = z[off]
            out[off] = self.geometry.radical_R(zz) / (2j * np.pi) * self._cauchy_sum(zz)
        if real.any():
            out[real] = self._d_boundary(z[real].real, side)
        return out

    def _d_boundary(self, x: np.ndarray, side: int) -> np.ndarray:
        seg = np.full(x.shape, -1)
        for i, (tag, lo, hi) in enumerate(self.geometry.segments):
            seg[(x > lo) & (x < hi)] = i
        if np.any(seg < 0):
            raise ValueError("boundary evaluation at a branch point")
        pv = self._cauchy_sum(x + 0j, skip=seg)
        for i in np.unique(seg):
            m = seg == i
            pv[m] += self._pv_own(int(i), x[m])
        out = np.zeros(x.shape, complex)
        gap = np.array([self.geometry.segments[i][0] == GAP for i in seg])
        cut = ~gap
        if cut.any():
            Rp = self.geometry.R_plus(x[cut])
            lnw = np.log(self.geometry.w_real(x[cut]))
            out[cut] = side * Rp * pv[cut] / (2j * np.pi) - 0.5 * lnw
        if gap.any():
            Rg = self.geometry.R_plus(x[gap]).real
            dj = self.delta[seg[gap] // 2]
            out[gap] = Rg * pv[gap] / (2j * np.pi) + side * 0.5j * dj
        return out

    # the r-function ----------------------------------------------------

    @cached_property
    def J(self) -> list[int]:
        """Index set ``J = {1, 5, 7, ..., 2g-1}`` (1-based)."""
        return [1] + list(range(5, 2 * self.g, 2))

    @cached_property
    def J_prime(self) -> list[int]:
        return [j for j in range(1, 2 * self.g + 3) if j not in self.J]

    def _r_powers(self) -> np.ndarray:
        return np.array([0.25 if j in self.J else -0.25 for j in range(1, 2 * self.g + 3)])

    def r_function(self, z, side: int = 0) -> np.ndarray:
        """``r(z) = (prod_J (z-a_j) / prod_J' (z-a_l))^{1/4}`` with ``z r(z) -> 1``.

        For real ``z`` inside ``[a_1, a_{2g+2}]`` pass ``side`` = +1 or -1.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        p = self._r_powers()
        out = np.ones(z.shape, complex)
        if side:
            x = z.real
            for aj, pj in zip(self.geometry.a, p):
                out = out * _sqrt_side(x - aj, side, pj)
            return out
        for aj, pj in zip(self.geometry.a, p):
            out = out * (z - aj) ** pj
        return out

    # summaries ---------------------------------------------------------

    def summary(self) -> dict:
        return {
            "endpoints": [float(v) for v in self.geometry.a],
            "genus": self.g,
            "A": self.A.tolist(),
            "tau_imag": self.tau.imag.tolist(),
            "tau_real_max": float(np.abs(self.tau.real).max()),
            "u_infinity": self.u_infinity.tolist(),
            "delta": self.delta.tolist(),
            "Omega": self.Omega.tolist(),
            "eigenvalue_slope": float(np.pi / self.tau11.imag),
        }
