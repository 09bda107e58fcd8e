"""Ensemble definitions: confining potentials, droplets, equilibrium laws,
microscopic rescaling maps and the band height a(p).

All ensembles here live in the almost-Hermitian regime: an N-dependent
potential squeezes the eigenvalues into a band of height O(1/N) around the
real axis, and the real marginal follows a classical equilibrium law
(semicircle for the Gaussian family, Marchenko-Pastur for the Laguerre one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import log_bessel_k

AGUE = "AGUE"
AGUE_MODIFIED = "AGUE_modified"
ALUE = "ALUE"
ALUE_ALPHA = "ALUE_alpha"
CHIRAL_D = "chiral_d"
INDUCED_AGUE = "induced_AGUE"
HARD_EDGE_AGUE = "hard_edge_AGUE"

FAMILIES = (AGUE, AGUE_MODIFIED, ALUE, ALUE_ALPHA, CHIRAL_D, INDUCED_AGUE,
            HARD_EDGE_AGUE)

_GAUSSIAN_FAMILIES = (AGUE, AGUE_MODIFIED, INDUCED_AGUE, HARD_EDGE_AGUE)
_LAGUERRE_FAMILIES = (ALUE, ALUE_ALPHA, CHIRAL_D)


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters of one almost-Hermitian ensemble.

    nu is required for the Laguerre-type families and for induced_AGUE
    (charge strength), alpha only for ALUE_alpha, d only for chiral_d.
    """

    family: str
    N: int
    c: float
    nu: float | None = None
    alpha: float | None = None
    d: int | None = None
    beta: float = 1.0
    hard_edge: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.family == ALUE_ALPHA:
            if self.alpha is None or self.alpha < 0:
                raise ValueError("ALUE_alpha requires alpha >= 0")
        elif self.alpha is not None:
            raise ValueError("alpha is only meaningful for ALUE_alpha")
        if self.family == CHIRAL_D:
            if self.d is None or self.d < 1:
                raise ValueError("chiral_d requires integer d >= 1")
        elif self.d is not None:
            raise ValueError("d is only meaningful for chiral_d")
        if self.family in (ALUE, CHIRAL_D):
            if self.nu is None or self.nu <= -1:
                raise ValueError(f"{self.family} requires nu > -1")
        elif self.family == INDUCED_AGUE:
            if self.nu is None or self.nu <= -0.5:
                raise ValueError("induced_AGUE requires nu > -1/2")
        elif self.nu is not None and self.family != ALUE_ALPHA:
            raise ValueError("nu is not a parameter of this family")

    def effective_nu(self):
        """Order of the Bessel weight (alpha*N for the rectangular family)."""
        if self.family == ALUE_ALPHA:
            return self.alpha * self.N
        return self.nu


@dataclass(frozen=True)
class EllipticDroplet:
    center: float
    semi_axis_x: float
    semi_axis_y: float

    def contains(self, zeta, dilate=1.0):
        zeta = np.asarray(zeta, dtype=complex)
        u = (zeta.real - self.center) / (self.semi_axis_x * dilate)
        v = zeta.imag / (self.semi_axis_y * dilate)
        out = u * u + v * v <= 1.0
        if out.ndim == 0:
            return bool(out)
        return out

    def height_at(self, xi):
        """Half-height of the ellipse above the point xi (0 outside)."""
        u = (xi - self.center) / self.semi_axis_x
        if abs(u) >= 1.0:
            return 0.0
        return self.semi_axis_y * math.sqrt(1.0 - u * u)


@dataclass(frozen=True)
class EquilibriumLaw:
    family: str                 # "semicircle" | "marchenko_pastur"
    alpha: float
    support: tuple[float, float]


def semicircle_law():
    return EquilibriumLaw("semicircle", 0.0, (-2.0, 2.0))


def marchenko_pastur_law(alpha=0.0):
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    lam_minus = (math.sqrt(alpha + 1.0) - 1.0) ** 2
    lam_plus = (math.sqrt(alpha + 1.0) + 1.0) ** 2
    return EquilibriumLaw("marchenko_pastur", alpha, (lam_minus, lam_plus))


def equilibrium_density(law, xi):
    """Density of the equilibrium law at xi (0 outside the support).

    The critical MP density (alpha=0) has an integrable 1/sqrt(xi)
    singularity; at exactly xi=0 a signaled infinity is returned.
    """
    lo, hi = law.support
    if law.family == "semicircle":
        if xi <= lo or xi >= hi:
            return 0.0
        return math.sqrt(4.0 - xi * xi) / (2.0 * math.pi)
    if law.family == "marchenko_pastur":
        if law.alpha == 0.0 and xi == 0.0:
            return math.inf
        if xi <= lo or xi >= hi:
            return 0.0
        return math.sqrt((hi - xi) * (xi - lo)) / (2.0 * math.pi * xi)
    raise ValueError(f"unknown law {law.family!r}")


@lru_cache(maxsize=16)
def _cdf_grid(law):
    lo, hi = law.support
    n = 40001
    # MP(0) has a 1/sqrt singularity at 0: integrate in sqrt-space there
    if law.family == "marchenko_pastur" and law.alpha == 0.0:
        s = np.linspace(0.0, math.sqrt(hi), n)
        x = s * s
    else:
        x = np.linspace(lo, hi, n)
    dens = np.array([equilibrium_density(law, xi) for xi in x])
    if not np.isfinite(dens[0]):
        dens[0] = dens[1]
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) / 2.0
                                           * np.diff(x))])
    cdf /= cdf[-1]
    return x, cdf


def equilibrium_cdf(law, x):
    """CDF of the equilibrium law (numeric, ~1e-6 accurate)."""
    grid, cdf = _cdf_grid(law)
    x = np.asarray(x, dtype=float)
    out = np.interp(x, grid, cdf, left=0.0, right=1.0)
    if out.ndim == 0:
        return float(out)
    return out


def equilibrium_law_for(spec):
    if spec.family in _GAUSSIAN_FAMILIES:
        return semicircle_law()
    if spec.family == ALUE_ALPHA:
        return marchenko_pastur_law(spec.alpha)
    return marchenko_pastur_law(0.0)


# ---------------------------------------------------------------------------
# potentials


def _gaussian_b(spec):
    """Coefficient of eta^2 in the Gaussian-family potential (times 1)."""
    if spec.family == AGUE_MODIFIED:
        return spec.N ** (1.0 / 3.0) / (2.0 * spec.c ** 2)
    return spec.N / (2.0 * spec.c ** 2)


def potential_value(spec, zeta):
    """Confining potential Q_N(zeta); +inf outside the droplet for hard edge.

    At the ALUE singularity zeta=0 the weight K_nu(..)|zeta|^nu stays finite
    for nu > 0 (finite Q), and diverges for nu <= 0, where Q tends to -inf
    (an integrable well, reported as -inf rather than a fake large float).
    """
    zeta = complex(zeta)
    xi, eta = zeta.real, zeta.imag
    c, N = spec.c, spec.N
    if spec.family in _GAUSSIAN_FAMILIES:
        q = 0.5 * xi * xi + _gaussian_b(spec) * eta * eta
        if spec.family == INDUCED_AGUE:
            if zeta == 0:
                return math.inf if spec.nu > 0 else q
            q += (2.0 * spec.nu / N) * math.log(1.0 / abs(zeta))
        if spec.family == HARD_EDGE_AGUE or spec.hard_edge:
            if not droplet(_free_version(spec)).contains(zeta):
                return math.inf
        return q
    if spec.family in (ALUE, ALUE_ALPHA):
        nu = spec.effective_nu()
        if zeta == 0:
            if nu > 0:
                lk = math.log(0.5) + math.lgamma(nu) \
                    + nu * math.log(2.0 * c ** 2 / N ** 2)
                return -lk / N
            return -math.inf
        r = abs(zeta)
        lk = log_bessel_k(nu, N * N * r / c ** 2)
        return -(lk + nu * math.log(r)) / N - (N / c ** 2 - 1.0) * xi
    if spec.family == CHIRAL_D:
        d, nu = spec.d, spec.nu
        if zeta == 0:
            exponent = d * (nu + 2.0) - 2.0
            return -math.inf if exponent > 0 or nu <= 0 else math.inf
        r = abs(zeta)
        zd = zeta ** d
        lk = log_bessel_k(nu, N * N * r ** d / c ** 2)
        return -(lk + (d * (nu + 2.0) - 2.0) * math.log(r)) / N \
            - (N / c ** 2 - 1.0) * zd.real
    raise ValueError(f"potential not implemented for {spec.family}")


def _free_version(spec):
    if spec.family == HARD_EDGE_AGUE:
        return EnsembleSpec(AGUE, spec.N, spec.c, beta=spec.beta)
    if spec.hard_edge:
        return EnsembleSpec(spec.family, spec.N, spec.c, nu=spec.nu,
                            alpha=spec.alpha, d=spec.d, beta=spec.beta)
    return spec


def log_weight_half(spec, zeta):
    """-N Q_N(zeta)/2 evaluated in log space, vectorized over zeta.

    This is the log of the weight attached to each weighted polynomial; for the
    Laguerre families it folds the exponentially small K_nu and the
    exponentially large e^{b N Re zeta} together without overflow.
    """
    zeta = np.asarray(zeta, dtype=complex)
    xi, eta = zeta.real, zeta.imag
    c, N = spec.c, spec.N
    if spec.family in _GAUSSIAN_FAMILIES:
        out = -N * (0.5 * xi ** 2 + _gaussian_b(spec) * eta ** 2) / 2.0
        if spec.family == INDUCED_AGUE:
            out = out + spec.nu * np.log(np.abs(zeta))
        return out
    if spec.family in (ALUE, ALUE_ALPHA):
        nu = spec.effective_nu()
        r = np.abs(zeta)
        x = N * N * r / c ** 2
        lk = np.log(np.asarray(_kve_vec(nu, x))) - x
        return 0.5 * (lk + nu * np.log(r)) + 0.5 * (N / c ** 2 - 1.0) * N * xi
    raise ValueError(f"log weight not implemented for {spec.family}")


def _kve_vec(nu, x):
    import scipy.special as sp
    return sp.kve(nu, x)


# ---------------------------------------------------------------------------
# droplets


def ellipse_droplet_from_quadratic(a, b):
    """Droplet of the potential a*xi^2 + b*eta^2 (a, b > 0).

    Elliptic disc (a^2+ab)/(2b) xi^2 + (ab+b^2)/(2a) eta^2 <= 1.
    """
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    ax = (a * a + a * b) / (2.0 * b)
    ay = (a * b + b * b) / (2.0 * a)
    return EllipticDroplet(0.0, 1.0 / math.sqrt(ax), 1.0 / math.sqrt(ay))


def droplet(spec):
    """Droplet (support of the equilibrium measure) for the ensemble.

    Laguerre families use the leading-order ellipse; their exact finite-N
    droplet is not available in closed form.
    """
    N, c = spec.N, spec.c
    if spec.family in (AGUE, HARD_EDGE_AGUE, AGUE_MODIFIED):
        return ellipse_droplet_from_quadratic(0.5, _gaussian_b(spec))
    if spec.family == ALUE:
        t = 2.0 - c ** 2 / N
        return EllipticDroplet(t, t, 2.0 * c ** 2 / N)
    if spec.family == ALUE_ALPHA:
        s = math.sqrt(spec.alpha + 1.0)
        return EllipticDroplet(spec.alpha + 2.0, 2.0 * s,
                               2.0 * c ** 2 * s / N)
    raise ValueError(f"droplet not implemented for family {spec.family}")


def droplet_membership_chiral(spec, zeta):
    """Whether zeta lies in the d-droplet {zeta : zeta^d in S_1}."""
    if spec.family != CHIRAL_D:
        raise ValueError("spec must be a chiral_d ensemble")
    base = EnsembleSpec(ALUE, spec.N, spec.c, nu=spec.nu)
    return droplet(base).contains(complex(zeta) ** spec.d)


# ---------------------------------------------------------------------------
# rescaling and band height


@dataclass(frozen=True)
class AffineMap:
    scale: float
    center: float

    def forward(self, zeta):
        return self.scale * (np.asarray(zeta, dtype=complex) - self.center)

    def inverse(self, z):
        return self.center + np.asarray(z, dtype=complex) / self.scale


def microscopic_scale(spec, p):
    """sqrt(N * Delta Q_N(p)) at leading order (the blow-up factor)."""
    N, c = spec.N, spec.c
    if spec.family in (AGUE, HARD_EDGE_AGUE):
        return N / (2.0 * c)
    if spec.family == AGUE_MODIFIED:
        return N ** (2.0 / 3.0) / (2.0 * c)
    if spec.family == INDUCED_AGUE:
        if p == 0:
            raise ValueError("Laplacian singular at p=0 for induced_AGUE")
        return N / (2.0 * c)
    if spec.family in (ALUE, ALUE_ALPHA):
        if p <= 0:
            raise ValueError("rescaling point must avoid the singularity at 0")
        return N / (2.0 * c * math.sqrt(p))
    raise ValueError(f"no rescale map for family {spec.family}")


def rescale_map(spec, p):
    return AffineMap(microscopic_scale(spec, p), float(p))


def band_height(spec, p):
    """Limiting half-height a(p) of the rescaled droplet cross-section.

    a(p) = (pi/2) rho(p) sigma_V(p) with rho = 2c for the Gaussian families
    and rho = 2c sqrt(p) for the Laguerre ones; 0 outside the support.
    """
    c = spec.c
    if spec.family in (AGUE, HARD_EDGE_AGUE, INDUCED_AGUE):
        law = semicircle_law()
        return math.pi * c * equilibrium_density(law, p)
    if spec.family in (ALUE, ALUE_ALPHA):
        law = equilibrium_law_for(spec)
        if p <= 0:
            return 0.0
        dens = equilibrium_density(law, p)
        return math.pi * c * math.sqrt(p) * dens
    raise ValueError(f"band height not defined for family {spec.family}")
