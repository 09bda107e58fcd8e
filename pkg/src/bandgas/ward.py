"""Numerical verification of Ward's equation for the limiting kernels.

The Cauchy transform C(z) = int B(z,w)/(z-w) dA(w) is evaluated in polar
coordinates centered at z, where the area Jacobian cancels the 1/(z-w) pole
exactly (Gauss-Legendre radially, trapezoid in the angle).  The residual of
d-bar C = R - Delta Q - Delta log R is measured with complex finite
differences for d-bar C and a five-point stencil for the quarter-Laplacian
Delta = (1/4)(d_xx + d_yy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import ComplexGrid


@dataclass
class WardVariant:
    """Which form of Ward's equation to verify.

    kind 'free': dbar C = R - 1 - Delta log R (bulk families);
    kind 'hard': same equation restricted to the strip |Im z| < a;
    kind 'bessel': dbar C = R - Delta Q0 - Delta log R with the radially
    symmetric confining term Q0 supplied by the kernel.
    """

    kind: str = "free"
    a: float | None = None
    nu: float | None = None


@dataclass
class WardReport:
    grid: ComplexGrid
    residual_sup: float
    mass_one_max_dev: float
    residuals: np.ndarray
    skipped: int
    details: dict = field(default_factory=dict)


def berezin(kernel, z, w):
    """Berezin value B(z,w) = |K(z,w)|^2 / R(z)."""
    r = kernel.onepoint(z)
    if not r > 1e-280:
        raise ArithmeticError(f"diagonal underflow at z={z}: R={r}")
    return float(kernel.abs_k2(z, np.asarray([w], dtype=complex))[0]) / r


def _polar_nodes(radius, nr, ntheta):
    r, wr = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * radius * (r + 1.0)
    wr = 0.5 * radius * wr
    th = (np.arange(ntheta) + 0.5) * (2.0 * math.pi / ntheta)
    dth = 2.0 * math.pi / ntheta
    return r, wr, np.exp(1j * th), dth


def _band_tail(kernel, z, radius, rz):
    """Tail of int B dA beyond the disc for band (sine-type) kernels.

    Along the band |K|^2 ~ envelope(y)/x^2; the envelope is measured from
    the kernel itself by averaging x^2 B over one oscillation period at
    |Re(w-z)| = radius, then integrated: tail = (1/pi) int dy env(y) (2/L).
    """
    a_band = getattr(kernel, "a", 1.0)
    yspan = a_band + 5.0
    y, wy = np.polynomial.legendre.leggauss(48)
    y = z.imag + yspan * y
    wy = yspan * wy
    xs = np.linspace(0.0, math.pi, 17)[:-1]
    tail = 0.0
    for sign in (1.0, -1.0):
        w = (z.real + sign * (radius + xs))[None, :] + 1j * y[:, None]
        b = kernel.abs_k2(z, w) * (radius + xs[None, :]) ** 2
        env = b.mean(axis=1)
        tail += float(np.sum(wy * env)) / radius
    return tail / math.pi / rz


def mass_one_deficit(kernel, z, radius=12.0, nr=72, ntheta=96,
                     band_tail=None):
    """1 - int B(z,w) dA(w) over the disc |w-z| <= radius.

    Kernels flagged band_tail get the power-law tail beyond the disc
    estimated from their own values (Gaussian-decay kernels need none).
    """
    rg, wg = np.polynomial.legendre.leggauss(nr)
    th = (np.arange(ntheta) + 0.5) * (2.0 * math.pi / ntheta)
    dth = 2.0 * math.pi / ntheta
    eith = np.exp(1j * th)
    caps = _strip_radial_caps(kernel, complex(z), radius, eith)
    r = 0.5 * caps[None, :] * (rg[:, None] + 1.0)
    wr = 0.5 * caps[None, :] * wg[:, None]
    w = z + r * eith[None, :]
    b = kernel.abs_k2(z, w)
    rz = kernel.onepoint(z)
    if not rz > 1e-280:
        raise ArithmeticError(f"diagonal underflow at z={z}")
    total = np.einsum("ij,ij->", wr * r, b) * dth / math.pi / rz
    if band_tail is None:
        band_tail = getattr(kernel, "band_tail", False)
    if band_tail:
        total += _band_tail(kernel, z, radius, rz)
    return 1.0 - float(total)


def _strip_radial_caps(kernel, z, radius, eith):
    """Per-angle radial cutoffs keeping rays inside a strip kernel's band.

    B vanishes identically outside |Im w| < a for hard-edge kernels; capping
    each ray at the boundary keeps the quadrature away from the jump.
    """
    a = getattr(kernel, "strip_half", None)
    if a is None:
        return np.full(eith.shape, radius)
    caps = np.full(eith.shape, radius)
    s = eith.imag
    up = s > 1e-12
    dn = s < -1e-12
    caps[up] = np.minimum(caps[up], (a - z.imag) / s[up] * (1 - 1e-12))
    caps[dn] = np.minimum(caps[dn], (-a - z.imag) / s[dn] * (1 - 1e-12))
    return caps


def cauchy_transform_C(kernel, z, radius=8.0, nr=64, ntheta=96):
    """C(z) = int B(z,w)/(z-w) dA(w), dA = d^2w/pi, polar around z.

    With w = z + r e^{i t}: C = -(1/pi) int dr int dt B(z, w) e^{-i t};
    the r from the Jacobian cancels the pole, so no singular patch is
    needed anywhere.  Strip kernels get per-angle radial caps.
    """
    rg, wg = np.polynomial.legendre.leggauss(nr)
    th = (np.arange(ntheta) + 0.5) * (2.0 * math.pi / ntheta)
    dth = 2.0 * math.pi / ntheta
    eith = np.exp(1j * th)
    caps = _strip_radial_caps(kernel, complex(z), radius, eith)
    r = 0.5 * caps[None, :] * (rg[:, None] + 1.0)
    wr = 0.5 * caps[None, :] * wg[:, None]
    w = z + r * eith[None, :]
    b = kernel.abs_k2(z, w)
    rz = kernel.onepoint(z)
    if not rz > 1e-280:
        raise ArithmeticError(f"diagonal underflow at z={z}")
    return -complex(np.einsum("ij,ij,j->", wr, b, np.conj(eith))) * dth \
        / math.pi / rz


def _dbar_fd(fun, z, h):
    """dbar f = (f_x + i f_y)/2 by central differences."""
    fx = (fun(z + h) - fun(z - h)) / (2.0 * h)
    fy = (fun(z + 1j * h) - fun(z - 1j * h)) / (2.0 * h)
    return 0.5 * (fx + 1j * fy)


def _quarter_laplacian_fd(fun, z, h):
    """Delta f = (1/4)(f_xx + f_yy) by the five-point stencil."""
    s = fun(z + h) + fun(z - h) + fun(z + 1j * h) + fun(z - 1j * h) \
        - 4.0 * fun(z)
    return s / (4.0 * h * h)


def _in_domain(kernel, variant, z, margin):
    pts = [z, z + margin, z - margin, z + 1j * margin, z - 1j * margin]
    if variant.kind == "hard":
        a = variant.a if variant.a is not None else kernel.a
        if not all(abs(p.imag) < a for p in pts):
            return False
    if variant.kind == "bessel":
        # stay off the cut/singularity at the origin
        if not all(abs(p) > 0.05 for p in pts):
            return False
    return all(kernel.in_domain(p) for p in pts)


def ward_residual(kernel, variant, grid, fd_step=1e-3, lap_step=1e-2,
                  radius=8.0, nr=64, ntheta=96, mass_one_points=None):
    """Sup of |dbar C - (R - Delta Q - Delta log R)| over the grid.

    Points whose stencils cross the kernel's domain boundary are skipped
    and counted in the report.
    """
    if isinstance(variant, str):
        variant = WardVariant(variant)
    pts = grid.points()
    res = np.full(pts.shape, np.nan)
    skipped = 0

    def cfun(z):
        return cauchy_transform_C(kernel, z, radius=radius, nr=nr,
                                  ntheta=ntheta)

    def logr(z):
        return math.log(kernel.onepoint(z))

    stencil_margin = max(fd_step, lap_step) * 1.5
    for i in range(pts.shape[0]):
        for j in range(pts.shape[1]):
            z = complex(pts[i, j])
            if not _in_domain(kernel, variant, z, stencil_margin):
                skipped += 1
                continue
            lhs = _dbar_fd(cfun, z, fd_step)
            lap_logr = _quarter_laplacian_fd(logr, z, lap_step)
            if variant.kind in ("free", "hard"):
                confining = 1.0
            elif variant.kind == "bessel":
                confining = _quarter_laplacian_fd(kernel.q_zero, z, lap_step)
            else:
                raise ValueError(f"unknown variant {variant.kind!r}")
            rhs = kernel.onepoint(z) - confining - lap_logr
            res[i, j] = abs(lhs - rhs)
    sup = float(np.nanmax(res)) if np.isfinite(res).any() else math.nan

    mdev = math.nan
    if mass_one_points:
        mdev = max(abs(mass_one_deficit(kernel, z, radius=max(radius, 12.0),
                                        nr=nr, ntheta=ntheta))
                   for z in mass_one_points)
    return WardReport(ComplexGrid(grid.xs, grid.ys, res), sup, mdev, res,
                      skipped, details={"fd_step": fd_step,
                                        "lap_step": lap_step,
                                        "radius": radius,
                                        "kernel": getattr(kernel, "name", "?"),
                                        "variant": variant.kind})
