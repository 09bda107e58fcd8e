"""Closed-form limiting kernels and one-point densities of the
almost-Hermitian scaling limits, including both endpoint degenerations of
each interpolating family (Ginibre/sine, erfc/Airy, planar-Bessel/Bessel,
Mittag-Leffler/insertion-sine).

Exponentially large prefactors (e^{4c^6/3} against |Ai|^2, K_nu against
e^{Re z}) are always folded inside log-space integrands, so the c <= 6
boundary family and c ~ 8 planar surrogates evaluate without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.special as _sp

from .specfun import gamma_p, gauss_window, log_airy_ai

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _gl(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


# ---------------------------------------------------------------------------
# Ginibre and the bulk interpolating family


def ginibre_G(z, w):
    """Ginibre kernel e^{z conj(w) - |z|^2/2 - |w|^2/2}."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.exp(z * np.conj(w) - 0.5 * np.abs(z) ** 2 - 0.5 * np.abs(w) ** 2)


def _maybe_scalar(out):
    out = np.asarray(out)
    if out.ndim == 0:
        return float(np.real(out))
    return out


def fks_R(a, z):
    """Bulk interpolating density R(z) = F(2 Im z), F the Gaussian window."""
    z = np.asarray(z, dtype=complex)
    return _maybe_scalar(np.real(np.asarray(gauss_window(a, 2.0 * z.imag))))


def fks_K(a, z, w):
    """Bulk interpolating kernel K(z,w) = G(z,w) F((z - conj w)/i)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return ginibre_G(z, w) * gauss_window(a, (z - np.conj(w)) / 1j)


def tilde_K(a, z, w, nodes=400):
    """One-dimensional normalization of the bulk kernel (alpha = 2a/pi).

    (1/(sqrt(2 pi) alpha)) e^{-(Im z)^2/alpha^2 - (Im w)^2/alpha^2}
    int_{-pi}^{pi} e^{-alpha^2 u^2/2 + i u (z - conj w)} du.
    Agrees with fks_K(a, z/alpha, w/alpha)/alpha^2 up to a cocycle (exactly
    at real arguments and on the diagonal).
    """
    alpha = 2.0 * a / math.pi
    z = complex(z)
    w = complex(w)
    u, wu = _gl(nodes, -math.pi, math.pi)
    integral = np.sum(wu * np.exp(-0.5 * alpha ** 2 * u ** 2
                                  + 1j * u * (z - np.conj(w))))
    pref = math.exp(-(z.imag ** 2 + w.imag ** 2) / alpha ** 2) \
        / (_SQRT2PI * alpha)
    return complex(pref * integral)


def tilde_K_line(a, x1, x2, nodes=160):
    """Vertical collapse int tilde_K(x1+is, x2+is) ds.

    This is the quantity that converges to pi times the sine kernel as
    a -> 0 (the rescaled band degenerates onto the real line; pointwise
    values of tilde_K blow up like 1/alpha there, the line-collapsed kernel
    does not).
    """
    alpha = 2.0 * a / math.pi
    s, ws = _gl(nodes, -6.0 * alpha, 6.0 * alpha)
    vals = np.array([tilde_K(a, x1 + 1j * t, x2 + 1j * t) for t in s])
    return complex(np.sum(ws * vals))


def sine_K(x, y):
    """Sine kernel sin(pi(x-y)) / (pi (x-y)), diagonal value 1."""
    return float(np.sinc(np.asarray(x, dtype=float) - y))


# ---------------------------------------------------------------------------
# Airy / boundary interpolating family


def airy_K(x, y, form="cd"):
    """Airy kernel; 'cd' = Christoffel-Darboux ratio, 'integral' = tail form."""
    x = float(x)
    y = float(y)
    if form == "cd":
        aix, aipx, _, _ = _sp.airy(x)
        aiy, aipy, _, _ = _sp.airy(y)
        if abs(x - y) < 1e-12:
            return aipx ** 2 - x * aix ** 2
        return (aix * aipy - aipx * aiy) / (x - y)
    if form == "integral":
        lo = min(x, y)
        upper = max(14.0 - lo, 8.0)
        u, wu = _gl(600, 0.0, upper)
        ax = _sp.airy(x + u)[0]
        ay = _sp.airy(y + u)[0]
        return float(np.sum(wu * ax * ay))
    raise ValueError("form must be 'cd' or 'integral'")


def erfc_edge_R(z):
    """Planar free-boundary density erfc((z + conj z)/sqrt 2)/2 (c=inf Bender)."""
    z = np.asarray(z, dtype=complex)
    return _maybe_scalar(0.5 * _sp.erfc(_SQRT2 * z.real))


_BENDER_CMAX = 6.0


def _bender_log_integrand(c, z, u):
    """log of e^{4c^3(u+x)} |Ai(2c(z+u)+c^4)|^2 e^{4c^6/3 - 2y^2}, stable."""
    z = np.asarray(z, dtype=complex)
    warg = 2.0 * c * (z + u) + c ** 4
    la = log_airy_ai(warg)
    return (4.0 / 3.0) * c ** 6 - 2.0 * z.imag ** 2 \
        + 4.0 * c ** 3 * (u + z.real) + 2.0 * np.real(la)


def _bender_upper(c, xmax, drop=48.0):
    """Integration cutoff: beyond it the integrand is e^{-drop} of its peak."""
    u = 0.0
    step = max(0.25 / c, 0.25)
    peak = -math.inf
    while True:
        val = float(_bender_log_integrand(c, complex(xmax, 0.0), u))
        peak = max(peak, val)
        if val < peak - drop and u > abs(xmax) + 1.0:
            return u
        u += step
        if u > 4000.0:
            return u


def bender_R(c, z, panel_nodes=16):
    """Boundary interpolating density (almost-Hermitian edge family).

    sqrt(2 pi) 4c^2 e^{4c^6/3 - 2(Im z)^2} int_0^inf e^{4c^3(u+Re z)}
    |Ai(2c(z+u)+c^4)|^2 du, with the huge prefactor folded into the
    integrand in log space.  Supported for 0 < c <= 6.
    """
    if not 0 < c <= _BENDER_CMAX:
        raise ValueError(f"bender_R supports 0 < c <= {_BENDER_CMAX}")
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    upper = _bender_upper(c, float(np.max(flat.real)))
    h = min(0.5 / c, 1.0)
    npan = max(int(math.ceil(upper / h)), 4)
    xg, wg = np.polynomial.legendre.leggauss(panel_nodes)
    edges = np.linspace(0.0, upper, npan + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wu = (half[:, None] * wg[None, :]).ravel()
    ell = _bender_log_integrand(c, flat[:, None], u[None, :])
    vals = _SQRT2PI * 4.0 * c ** 2 * np.sum(wu[None, :] * np.exp(ell), axis=1)
    return _maybe_scalar(vals.reshape(z.shape))


def bender_K(c, z, w, panel_nodes=16):
    """Boundary interpolating correlation kernel (two Airy factors).

    Diagonal equals bender_R; used for Ward-equation checks.
    """
    if not 0 < c <= _BENDER_CMAX:
        raise ValueError(f"bender_K supports 0 < c <= {_BENDER_CMAX}")
    z = complex(z)
    w = complex(w)
    upper = _bender_upper(c, max(z.real, w.real))
    h = min(0.5 / c, 1.0)
    npan = max(int(math.ceil(upper / h)), 4)
    xg, wg = np.polynomial.legendre.leggauss(panel_nodes)
    edges = np.linspace(0.0, upper, npan + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    u = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    wu = (half[:, None] * wg[None, :]).ravel()
    ell = (4.0 / 3.0) * c ** 6 - z.imag ** 2 - w.imag ** 2 \
        + 2.0 * c ** 3 * (2.0 * u + z + np.conj(w)) \
        + log_airy_ai(2.0 * c * (z + u) + c ** 4) \
        + log_airy_ai(2.0 * c * (np.conj(w) + u) + c ** 4)
    return complex(_SQRT2PI * 4.0 * c ** 2 * np.sum(wu * np.exp(ell)))


# ---------------------------------------------------------------------------
# Laguerre edge (hard-spectrum origin) family


def _check_off_cut(zd):
    zd = np.asarray(zd, dtype=complex)
    bad = (zd.real <= 0) & (np.abs(zd.imag) < 1e-300)
    if np.any(bad):
        raise ValueError("argument on the branch cut (-inf, 0]")


def alue_edge_R(c, nu, z, nodes=400):
    """Laguerre-edge interpolating density about the origin.

    (1/2) K_nu(|z|) e^{Re z} int_0^{2c} s e^{-s^2/2} |J_nu(s z^{1/2})|^2 ds,
    principal branch of z^{1/2}; domain excludes (-inf, 0].
    """
    if nu <= -1:
        raise ValueError("nu must be > -1")
    z = np.asarray(z, dtype=complex)
    _check_off_cut(z)
    flat = z.ravel()
    s, ws = _gl(nodes, 0.0, 2.0 * c)
    sq = np.sqrt(flat)[:, None]
    jv = _sp.jv(nu, s[None, :] * sq)
    integral = np.sum(ws[None, :] * s[None, :]
                      * np.exp(-0.5 * s[None, :] ** 2) * np.abs(jv) ** 2,
                      axis=1)
    # K_nu(|z|) e^{Re z} assembled via the scaled kve to survive large |z|
    r = np.abs(flat)
    pref = 0.5 * _sp.kve(nu, r) * np.exp(flat.real - r)
    out = (pref * integral).reshape(z.shape)
    return _maybe_scalar(np.real(out))


def planar_bessel_R(nu, z):
    """Planar Bessel density K_nu(|z|) I_nu(|z|) / 2 (c=inf Laguerre edge)."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    out = 0.5 * _sp.kve(nu, r) * _sp.ive(nu, r)   # scalings cancel exactly
    return _maybe_scalar(out)


def bessel_K_line(nu, x, y, form="ratio", nodes=240):
    """Line Bessel kernel (c=0 Laguerre edge), two representations.

    'integral': (1/2) int_0^1 t J_nu(t sqrt x) J_nu(t sqrt y) dt;
    'ratio': the closed Christoffel-Darboux-type quotient, with the
    diagonal handled by (J_nu^2 - J_{nu+1} J_{nu-1})/4.
    """
    if x <= 0 or y <= 0:
        raise ValueError("x and y must be > 0")
    sx, sy = math.sqrt(x), math.sqrt(y)
    if form == "integral":
        t, wt = _gl(nodes, 0.0, 1.0)
        return float(0.5 * np.sum(wt * t * _sp.jv(nu, t * sx)
                                  * _sp.jv(nu, t * sy)))
    if form == "ratio":
        if abs(x - y) < 1e-10 * max(x, y):
            return 0.25 * (_sp.jv(nu, sx) ** 2
                           - _sp.jv(nu + 1, sx) * _sp.jv(nu - 1, sx))
        num = _sp.jv(nu, sx) * sy * _sp.jvp(nu, sy) \
            - sx * _sp.jvp(nu, sx) * _sp.jv(nu, sy)
        return float(num / (2.0 * (x - y)))
    raise ValueError("form must be 'integral' or 'ratio'")


def chiral_edge_R(c, nu, d, z, nodes=400):
    """Chiral (d-fold) edge density: d |z|^{2d-2} times the Laguerre edge
    density evaluated at z^d."""
    if d < 1 or d != int(d):
        raise ValueError("d must be an integer >= 1")
    z = np.asarray(z, dtype=complex)
    zd = z ** int(d)
    out = d * np.abs(z) ** (2 * (d - 1)) * alue_edge_R(c, nu, zd, nodes=nodes)
    return _maybe_scalar(out)


def chiral_planar_R(nu, d, z):
    """c=inf chiral edge: (d/2) |z|^{2d-2} K_nu(|z|^d) I_nu(|z|^d)."""
    z = np.asarray(z, dtype=complex)
    rd = np.abs(z) ** d
    out = 0.5 * d * np.abs(z) ** (2 * (d - 1)) * _sp.kve(nu, rd) * _sp.ive(nu, rd)
    return _maybe_scalar(out)


def chiral_ray_R(nu, d, x):
    """c=0 chiral edge density on the invariant rays (x > 0 radial part)."""
    if x <= 0:
        raise ValueError("x must be > 0")
    s = x ** (d / 2.0)
    return 0.25 * math.pi * d * x ** (d - 1) \
        * (_sp.jv(nu, s) ** 2 - _sp.jv(nu + 1, s) * _sp.jv(nu - 1, s))


# ---------------------------------------------------------------------------
# insertion (induced) family


def induced_R1(c, z):
    """Density of the charge-1 induced bulk family at the origin.

    R^{(1,c)}(z) = R^{(0,c)}(z) - B^{(0,c)}(0,z) with R^{(0,c)} the bulk
    interpolating density at band height a = c and the Berezin term in its
    explicit erf form.
    """
    if c <= 0:
        raise ValueError("c must be > 0")
    z = np.asarray(z, dtype=complex)
    base = fks_R(c, z)
    e1 = _sp.erf((2.0 * c + 1j * z) / _SQRT2)
    e2 = _sp.erf((2.0 * c - 1j * z) / _SQRT2)
    ber = np.exp(-np.abs(z) ** 2) * np.abs(e1 + e2) ** 2 \
        / (4.0 * _sp.erf(_SQRT2 * c))
    return _maybe_scalar(np.real(np.asarray(base - ber)))


def ml_kernel(nu, z, w):
    """Mittag-Leffler insertion kernel G(z,w) P(nu, z conj w) (nu > 0)."""
    if nu <= 0:
        raise ValueError("nu must be > 0")
    z = complex(z)
    w = complex(w)
    return complex(ginibre_G(z, w)) * gamma_p(nu, z * np.conj(w)).value


def gen_sine_K(nu, x, y):
    """Insertion sine kernel on the line (integer nu >= 0, xy > 0).

    (pi/2) sqrt(xy)/(x-y) [J_{nu+1/2}(pi x) J_{nu-1/2}(pi y) -
    J_{nu+1/2}(pi y) J_{nu-1/2}(pi x)]; nu = 0 degenerates to the sine
    kernel.  Diagonal by the derivative limit.
    """
    if nu < 0 or nu != int(nu):
        raise ValueError("nu must be an integer >= 0")
    if x * y <= 0:
        raise ValueError("x y must be > 0")
    p, q = nu + 0.5, nu - 0.5
    if abs(x - y) < 1e-10 * max(abs(x), abs(y)):
        d = 0.5 * math.pi ** 2 * x * (_sp.jvp(p, math.pi * x) * _sp.jv(q, math.pi * x)
                                      - _sp.jv(p, math.pi * x) * _sp.jvp(q, math.pi * x))
        return float(d)
    num = _sp.jv(p, math.pi * x) * _sp.jv(q, math.pi * y) \
        - _sp.jv(p, math.pi * y) * _sp.jv(q, math.pi * x)
    return float(0.5 * math.pi * math.sqrt(x * y) / (x - y) * num)


def gen_sine_K_nu1_explicit(x, y):
    """The nu=1 insertion sine kernel in its elementary closed form."""
    if abs(x - y) < 1e-12:
        sx = math.sin(math.pi * x)
        return 1.0 - (sx / (math.pi * x)) ** 2 if x != 0 else 0.0
    return sine_K(x, y) \
        - math.sin(math.pi * x) * math.sin(math.pi * y) / (math.pi ** 2 * x * y)


# ---------------------------------------------------------------------------
# hard edge


def hardedge_F2(a, q, nodes=200):
    """(1/sqrt(2 pi)) int_{-2a}^{2a} e^{-(q-t)^2/2} / F(t) dt, entire in q."""
    q = np.asarray(q, dtype=complex)
    t, wt = _gl(nodes, -2.0 * a, 2.0 * a)
    F = np.real(gauss_window(a, t))
    ker = np.exp(-0.5 * (q[..., None] - t) ** 2) / F
    return np.sum(wt * ker, axis=-1) / _SQRT2PI


def hardedge_R(a, z, nodes=200):
    """Hard-edge strip density: F2(2 Im z) inside |Im z| < a, 0 outside."""
    if a <= 0:
        raise ValueError("a must be > 0")
    z = np.asarray(z, dtype=complex)
    inside = np.abs(z.imag) < a
    vals = np.real(hardedge_F2(a, np.asarray(2.0 * z.imag, dtype=complex),
                               nodes=nodes))
    out = np.where(inside, vals, 0.0)
    return _maybe_scalar(out)


# ---------------------------------------------------------------------------
# limit-family registry (CLI-facing)


@dataclass(frozen=True)
class LimitFamily:
    kind: str
    params: dict


_KINDS = ("fks_bulk", "sine", "ginibre", "bender_edge", "airy", "alue_edge",
          "planar_bessel", "bessel_line", "chiral_edge", "induced_bulk",
          "ml_insertion", "hardedge_bulk")

_ALIASES = {"fks": "fks_bulk", "bender": "bender_edge", "osborn": "alue_edge",
            "hardedge": "hardedge_bulk", "ml": "ml_insertion",
            "induced": "induced_bulk"}


def limit_family(kind, **params):
    kind = _ALIASES.get(kind, kind)
    if kind not in _KINDS:
        raise ValueError(f"unknown limit family {kind!r}")
    if kind in ("fks_bulk", "hardedge_bulk") and params.get("a", 0) <= 0:
        raise ValueError(f"{kind} needs a > 0")
    return LimitFamily(kind, params)


def limit_R(family):
    """Density callable z -> R(z) for a limit family."""
    k, p = family.kind, family.params
    if k == "fks_bulk":
        return lambda z: fks_R(p["a"], z)
    if k == "sine":
        return lambda z: sine_K(np.real(z), np.real(z))
    if k == "ginibre":
        return lambda z: np.ones_like(np.asarray(z, dtype=float).real) \
            if np.ndim(z) else 1.0
    if k == "bender_edge":
        return lambda z: bender_R(p["c"], z)
    if k == "airy":
        return lambda z: airy_K(np.real(z), np.real(z))
    if k == "alue_edge":
        return lambda z: alue_edge_R(p["c"], p["nu"], z)
    if k == "planar_bessel":
        return lambda z: planar_bessel_R(p["nu"], z)
    if k == "bessel_line":
        return lambda z: bessel_K_line(p["nu"], np.real(z), np.real(z))
    if k == "chiral_edge":
        return lambda z: chiral_edge_R(p["c"], p["nu"], p["d"], z)
    if k == "induced_bulk":
        return lambda z: induced_R1(p["c"], z)
    if k == "ml_insertion":
        return lambda z: np.real(ml_kernel(p["nu"], z, z)) if np.ndim(z) == 0 \
            else np.array([np.real(ml_kernel(p["nu"], zz, zz))
                           for zz in np.ravel(z)]).reshape(np.shape(z))
    if k == "hardedge_bulk":
        return lambda z: hardedge_R(p["a"], z)
    raise AssertionError(k)


# ---------------------------------------------------------------------------
# Ward-ready kernel objects: onepoint(z) and |K(z,w)|^2 vectorized in w


class GinibreKernel:
    name = "ginibre"

    def onepoint(self, z):
        return 1.0

    def abs_k2(self, z, w):
        return np.exp(-np.abs(np.asarray(w, dtype=complex) - z) ** 2)

    def in_domain(self, z):
        return True


class FksKernel:
    """Bulk interpolating kernel at band height a.

    |K|^2 decays like 1/(Re z - Re w)^2 along the band (sine-type), only
    Gaussian transversally; mass-one integration must account for the
    band tail.
    """

    band_tail = True

    def __init__(self, a):
        if a <= 0:
            raise ValueError("a must be > 0")
        self.a = a
        self.name = f"fks(a={a})"

    def onepoint(self, z):
        return float(fks_R(self.a, z))

    def abs_k2(self, z, w):
        # assembled as exp(-|z-w|^2 + 2 log|F|): the window grows like
        # e^{(Im q)^2/2} along the band and the Gaussian tames it only in
        # the combined exponent (finite F needs |Re z - Re w| < ~35)
        w = np.asarray(w, dtype=complex)
        F = np.abs(gauss_window(self.a, (z - np.conj(w)) / 1j))
        with np.errstate(divide="ignore"):
            logf = np.log(F)
        return np.exp(-np.abs(w - z) ** 2 + 2.0 * logf)

    def in_domain(self, z):
        return True


class HardEdgeStripKernel:
    """Hard-edge strip kernel K = G(z,w) F2((z - conj w)/i), |Im| < a."""

    band_tail = True

    def __init__(self, a, nodes=200):
        self.a = a
        self.strip_half = a
        self.nodes = nodes
        self.name = f"hardedge(a={a})"

    def onepoint(self, z):
        return float(hardedge_R(self.a, z, nodes=self.nodes))

    def abs_k2(self, z, w):
        w = np.asarray(w, dtype=complex)
        F2 = np.abs(hardedge_F2(self.a, (z - np.conj(w)) / 1j,
                                nodes=self.nodes))
        with np.errstate(divide="ignore"):
            logf = np.log(F2)
        out = np.exp(-np.abs(w - z) ** 2 + 2.0 * logf)
        return np.where(np.abs(w.imag) < self.a, out, 0.0)

    def in_domain(self, z):
        return abs(np.imag(z)) < self.a


class PlanarBesselKernel:
    """Planar Bessel kernel: |K(z,w)|^2 = K_nu(|z|) K_nu(|w|) |I_nu(sqrt(z conj w))|^2 / 4."""

    def __init__(self, nu):
        self.nu = nu
        self.name = f"planar_bessel(nu={nu})"

    def onepoint(self, z):
        return float(planar_bessel_R(self.nu, z))

    def abs_k2(self, z, w):
        w = np.asarray(w, dtype=complex)
        u = np.sqrt(z * np.conj(w))          # principal; Re u >= 0
        iv = _sp.ive(self.nu, u) * np.exp(u.real)    # undo the e^{-Re u} scaling
        kz = _sp.kve(self.nu, abs(z)) * math.exp(-abs(z))
        kw = _sp.kv(self.nu, np.abs(w))
        return 0.25 * kz * kw * np.abs(iv) ** 2

    def q_zero(self, z):
        """Confining term Q_0(z) = -log(K_nu(|z|) |z|^nu) of the Ward equation."""
        r = abs(z)
        return -(math.log(_sp.kve(self.nu, r)) - r + self.nu * math.log(r))

    def in_domain(self, z):
        return abs(z) > 1e-12


class MlInsertionKernel:
    """Mittag-Leffler insertion kernel (diagonal P(nu, |z|^2))."""

    def __init__(self, nu):
        if nu <= 0:
            raise ValueError("nu must be > 0")
        self.nu = nu
        self.name = f"ml(nu={nu})"

    def onepoint(self, z):
        return float(np.real(gamma_p(self.nu, abs(z) ** 2).value))

    def abs_k2(self, z, w):
        w = np.asarray(w, dtype=complex)
        flat = w.ravel()
        p = np.array([gamma_p(self.nu, z * np.conj(ww)).value for ww in flat])
        out = np.exp(-np.abs(flat - z) ** 2) * np.abs(p) ** 2
        return out.reshape(w.shape)

    def in_domain(self, z):
        return abs(z) > 1e-6


class BenderKernel:
    """Boundary interpolating kernel for Ward checks (expensive; small grids)."""

    def __init__(self, c):
        self.c = c
        self.name = f"bender(c={c})"

    def onepoint(self, z):
        return float(bender_R(self.c, z))

    def abs_k2(self, z, w):
        w = np.asarray(w, dtype=complex)
        flat = w.ravel()
        out = np.array([abs(bender_K(self.c, z, ww)) ** 2 for ww in flat])
        return out.reshape(w.shape)

    def in_domain(self, z):
        return True
