"""Statistical cross-sections c_N(xi) and their convergence to the
equilibrium laws (semicircle / Marchenko-Pastur).

c_N(xi) = (1/N^2) int_R R_N(xi + i y/N) dy; the y-substitution makes the
transverse Gaussian profile N-independent (width ~ c for the Gaussian
family, c sqrt(xi) for the Laguerre one), so a fixed Gauss-Legendre rule
with a doubling check covers every N.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.special as _sp

from . import finiten, geometry
from .geometry import (AGUE, AGUE_MODIFIED, ALUE, ALUE_ALPHA, EnsembleSpec)

_EDGE_DELTA = 0.1    # interior grid stays this far from endpoints/singularity


@dataclass
class CrossSectionTable:
    xi_values: np.ndarray
    c_N_over_pi: np.ndarray
    equilibrium: np.ndarray
    N: int
    family: str
    c: float
    nu: float | None = None
    alpha: float | None = None
    sup_distance: float = field(default=math.nan)


def _y_halfwidth(spec, xi):
    c = spec.c
    if spec.family in (ALUE, ALUE_ALPHA):
        return 12.0 * c * math.sqrt(max(xi, 1e-2)) + 6.0
    return 12.0 * c + 6.0


def cross_section(spec, xi, nodes=201, check=False):
    """c_N(xi) by Gauss-Legendre quadrature along the vertical line.

    With check=True the rule is doubled and a failure to agree to 1e-6
    relative raises (non-convergent quadrature diagnostics).
    """
    xi = float(xi)
    N = spec.N
    ymax = _y_halfwidth(spec, xi)
    y, wy = np.polynomial.legendre.leggauss(nodes)
    y = y * ymax
    wy = wy * ymax
    r = finiten.onepoint_grid(spec, xi + 1j * y / N)
    val = float(np.sum(wy * r)) / N ** 2
    if check:
        y2, wy2 = np.polynomial.legendre.leggauss(2 * nodes)
        r2 = finiten.onepoint_grid(spec, xi + 1j * y2 * ymax / N)
        val2 = float(np.sum(wy2 * ymax * r2)) / N ** 2
        if abs(val2 - val) > 1e-6 * max(abs(val2), 1e-12):
            raise ArithmeticError(
                f"cross-section quadrature not converged at xi={xi}: "
                f"{val} vs {val2}")
    return val


def alue_cs_closed_form(N, c, nu, xi):
    """Closed-form main term of the ALUE cross-section (integer nu >= 0).

    pi (N xi)^nu e^{-N xi} sum_{j<N} j!/(j+nu)! [L_j^nu(N xi)]^2, evaluated
    with a stable weighted recurrence (the tau factors of the finite-N
    orthogonal polynomials are at their N->infinity limit 1 here; this is
    the Christoffel-Darboux-ready main term that converges to pi sigma_MP).
    """
    if nu < 0 or nu != int(nu):
        raise ValueError("closed form stated for integer nu >= 0")
    if not 0 < xi < 4:
        raise ValueError("closed form is for xi in (0, 4)")
    nu = int(nu)
    x = N * xi
    logpref = 0.5 * (nu * math.log(x) - x)
    m, e = finiten._seed_from_log(np.asarray([logpref - 0.5 * math.lgamma(nu + 1.0)]))
    m_prev = np.zeros_like(m)
    e_prev = np.zeros_like(e)
    acc_m = np.zeros(1)
    acc_e = np.full(1, finiten._E_EMPTY, dtype=np.int64)
    for j in range(N):
        acc_m, acc_e = finiten._acc_add(acc_m, acc_e, np.abs(m) ** 2, 2 * e)
        c1 = 1.0 / math.sqrt((j + 1.0) * (j + nu + 1.0))
        c2 = math.sqrt(j * (j + nu) / ((j + 1.0) * (j + nu + 1.0)))
        m_new = c1 * (2 * j + nu + 1.0 - x) * m \
            - c2 * finiten._pow2c(m_prev, e_prev - e)
        m_prev, e_prev = m, e
        m, e = finiten._renorm(m_new, e.copy())
    return math.pi * float(finiten._collapse_real(acc_m, acc_e)[0])


def j_integral(N, k, c, xi):
    """J(N,k) = int e^{-y^2/(2 c^2 xi)} (1 + (y/(N xi))^2)^k dy, closed form.

    Equals c sqrt(2 pi xi) k! (-2c^2/(N^2 xi))^k L_k^{-k-1/2}(N^2 xi/(2c^2));
    the Laguerre polynomial with negative non-integer parameter is evaluated
    by its explicit finite sum (scipy's evaluator returns NaN there).
    """
    if xi <= 0:
        raise ValueError("xi must be > 0")
    if k < 0:
        raise ValueError("k must be >= 0")
    s = N * N * xi / (2.0 * c * c)
    # L_k^{-k-1/2}(s) = sum_j sqrt(pi) (-s)^j / (Gamma(j-k+1/2) (k-j)! j!)
    tot = 0.0
    for j in range(k + 1):
        tot += math.sqrt(math.pi) * (-s) ** j \
            / (_sp.gamma(j - k + 0.5) * math.factorial(k - j) * math.factorial(j))
    return c * math.sqrt(2.0 * math.pi * xi) * math.factorial(k) \
        * (-2.0 * c * c / (N * N * xi)) ** k * tot


def _interior_mask(spec, xi):
    law = geometry.equilibrium_law_for(spec)
    lo, hi = law.support
    lo_eff = max(lo, 0.0) if spec.family in (ALUE, ALUE_ALPHA) else lo
    return (xi >= lo_eff + _EDGE_DELTA) & (xi <= hi - _EDGE_DELTA)


def _one_table(spec, xi_grid, nodes):
    law = geometry.equilibrium_law_for(spec)
    eq = np.array([geometry.equilibrium_density(law, x) for x in xi_grid])
    cn = np.array([cross_section(spec, x, nodes=nodes) for x in xi_grid]) / math.pi
    mask = _interior_mask(spec, xi_grid)
    sup = float(np.max(np.abs(cn[mask] - eq[mask]))) if mask.any() else math.nan
    return CrossSectionTable(np.asarray(xi_grid, dtype=float), cn, eq, spec.N,
                             spec.family, spec.c, spec.nu, spec.alpha,
                             sup_distance=sup)


def convergence_table(family, c, xi_grid, N_list, nu=None, alpha=None,
                      nodes=201):
    """One CrossSectionTable per N, with sup distance on the interior grid.

    Parallelizes over xi points when BANDGAS_THREADS > 1.
    """
    xi_grid = np.asarray(xi_grid, dtype=float)
    if xi_grid.size == 0 or not N_list:
        raise ValueError("grids must be nonempty")
    nthreads = int(os.environ.get("BANDGAS_THREADS", "1") or "1")
    tables = []
    for N in N_list:
        spec = EnsembleSpec(family, int(N), c, nu=nu, alpha=alpha)
        if nthreads > 1:
            from concurrent.futures import ThreadPoolExecutor
            law = geometry.equilibrium_law_for(spec)
            eq = np.array([geometry.equilibrium_density(law, x) for x in xi_grid])
            with ThreadPoolExecutor(max_workers=nthreads) as ex:
                cn = np.array(list(ex.map(
                    lambda x: cross_section(spec, x, nodes=nodes), xi_grid)))
            cn = cn / math.pi
            mask = _interior_mask(spec, xi_grid)
            sup = float(np.max(np.abs(cn[mask] - eq[mask]))) if mask.any() else math.nan
            tables.append(CrossSectionTable(xi_grid, cn, eq, spec.N,
                                            spec.family, spec.c, spec.nu,
                                            spec.alpha, sup_distance=sup))
        else:
            tables.append(_one_table(spec, xi_grid, nodes))
    return tables
