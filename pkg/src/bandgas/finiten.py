"""Finite-N determinantal machinery: weighted orthonormal bases, one-point
functions, correlation/Berezin kernels and the exact summation identities.

Everything runs through base-2 scaled recurrences (mantissa + integer
exponent), so degrees up to ~10^5 and weights like e^{-N Q_N/2} never leave
the representable range.  Vectorized internals carry numpy arrays of
mantissas and exponents; the public basis operations return ScaledComplex
objects per degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .geometry import (AGUE, AGUE_MODIFIED, ALUE, ALUE_ALPHA, CHIRAL_D,
                       INDUCED_AGUE, EnsembleSpec)
from .specfun import ScaledComplex, laguerre_seq

_LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# vectorized scaled arithmetic helpers


# exponent sentinel for an empty accumulator (far below any real term)
_E_EMPTY = -(1 << 60)


def _pow2(x, n):
    """x * 2^n for real arrays, exact for any integer n (ldexp-based)."""
    return np.ldexp(x, np.clip(n, -2200, 2200).astype(np.int32))


def _pow2c(m, n):
    """m * 2^n for complex arrays."""
    n = np.clip(n, -2200, 2200).astype(np.int32)
    return np.ldexp(m.real, n) + 1j * np.ldexp(m.imag, n)


def _renorm(m, e):
    """Pull the base-2 exponent of |m| into e (elementwise)."""
    _, k = np.frexp(np.abs(m))
    k = k.astype(np.int64)
    return _pow2c(m, -k), e + k


def _renorm_real(m, e):
    _, k = np.frexp(np.abs(m))
    k = k.astype(np.int64)
    return _pow2(m, -k), e + k


def _seed_from_log(log_abs):
    """Scaled array representing exp(log_abs) (real positive)."""
    log_abs = np.asarray(log_abs, dtype=float)
    e = np.floor(log_abs / _LN2).astype(np.int64)
    m = np.exp(log_abs - e * _LN2).astype(complex)
    return m, e


def _acc_add(acc_m, acc_e, m, e):
    """Accumulate the (real, nonnegative) scaled values m*2^e into acc."""
    hi = np.maximum(acc_e, e)
    acc_m = _pow2(acc_m, acc_e - hi) + _pow2(m, e - hi)
    return _renorm_real(acc_m, hi)


def _collapse_real(m, e):
    return _pow2(m, e)


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class WeightedBasisEval:
    """psi_j(zeta) = q_j(zeta) e^{-N Q_N(zeta)/2} for j = 0 .. N-1."""

    values: tuple


@dataclass(frozen=True)
class KernelValue:
    K: complex
    absK2: float
    berezin: float | None


# ---------------------------------------------------------------------------
# Gaussian (Hermite) families


def _hermite_params(spec):
    a = 0.5
    b = geometry._gaussian_b(spec)
    if b < a:
        raise ValueError("almost-Hermitian regime requires b >= a (N >= c^2)")
    tau = (b - a) / (b + a)
    gamma = math.sqrt(spec.N * a * b / (b - a)) if b > a else math.inf
    return a, b, tau, gamma


def _hermite_psi_iter(spec, zeta, n_funcs=None):
    """Yield (m_j, e_j) scaled values of psi_j at the array zeta.

    The growth coefficient sqrt(2 tau/(j+1)) * gamma stays finite even at
    tau = 0 (b = a, the round Ginibre degeneration), so it is carried as
    kappa = sqrt(2 N a b / (b + a)).
    """
    zeta = np.asarray(zeta, dtype=complex)
    a, b, tau, _ = _hermite_params(spec)
    N = spec.N
    n_funcs = N if n_funcs is None else n_funcs
    kappa = math.sqrt(2.0 * N * a * b / (b + a))
    log_t0 = 0.25 * math.log(a * b) + 0.5 * math.log(N) \
        + geometry.log_weight_half(spec, zeta)
    m, e = _seed_from_log(log_t0)
    m_prev = np.zeros_like(m)
    e_prev = np.zeros_like(e)
    yield m, e
    for j in range(n_funcs - 1):
        c1 = kappa / math.sqrt(j + 1.0)
        c2 = tau * math.sqrt(j / (j + 1.0))
        m_new = c1 * zeta * m - c2 * _pow2c(m_prev, e_prev - e)
        m_prev, e_prev = m, e
        m, e = _renorm(m_new, e.copy())
        yield m, e


def agu_onepoint_grid(spec, zeta):
    """R_N on an array of points, for the Gaussian families."""
    zeta = np.asarray(zeta, dtype=complex)
    acc_m = np.zeros(zeta.shape, dtype=float)
    acc_e = np.full(zeta.shape, _E_EMPTY, dtype=np.int64)
    for m, e in _hermite_psi_iter(spec, zeta):
        acc_m, acc_e = _acc_add(acc_m, acc_e, np.abs(m) ** 2, 2 * e)
    return _collapse_real(acc_m, acc_e)


def weighted_hermite_basis(spec, zeta):
    """All N weighted basis values at one point, as ScaledComplex."""
    vals = []
    for m, e in _hermite_psi_iter(spec, np.asarray([zeta], dtype=complex)):
        vals.append(ScaledComplex(complex(m[0]), int(e[0])).normalized())
    return WeightedBasisEval(tuple(vals))


def agu_onepoint(spec, zeta):
    """One-point intensity R_N(zeta) = sum_j |psi_j(zeta)|^2 (AGUE-type)."""
    return float(agu_onepoint_grid(spec, np.asarray([zeta]))[0])


def _hermite_normalized_seq(z, n, tau):
    """u_j = (tau/2)^{j/2} H_j(z)/sqrt(j!) for j = 0..n, ScaledComplex."""
    u = [ScaledComplex.from_complex(1.0)]
    if n == 0:
        return u
    prev = ScaledComplex.zero()
    cur = u[0]
    for j in range(n):
        c1 = math.sqrt(2.0 * tau / (j + 1))
        c2 = tau * math.sqrt(j / (j + 1.0))
        nxt = (c1 * z) * cur - c2 * prev
        prev, cur = cur, nxt
        u.append(cur)
    return u


def agu_dFdx(spec, z):
    """d/dx of F_N(z) = sum_{j<N} (tau/2)^j |H_j(z)|^2 / j! (x = Re z).

    Closed form: (4 tau x/(1+tau)) F_N - (4/(1+tau)) (tau/2)^N
    Re[H_{N-1}(z) H_N(conj z)] / (N-1)!, evaluated with scaled recurrences.
    """
    _, _, tau, _ = _hermite_params(spec)
    N = spec.N
    z = complex(z)
    u = _hermite_normalized_seq(z, N, tau)
    f_m = np.zeros(1)
    f_e = np.full(1, _E_EMPTY, dtype=np.int64)
    for uj in u[:N]:
        sq = uj.abs2()
        f_m, f_e = _acc_add(f_m, f_e, np.asarray([sq.mantissa.real]),
                            np.asarray([sq.exponent], dtype=np.int64))
    F = float(_collapse_real(f_m, f_e)[0])
    prod = u[N - 1] * u[N].conj()
    return (4.0 * tau * z.real / (1.0 + tau)) * F \
        - (4.0 / (1.0 + tau)) * math.sqrt(N * tau / 2.0) * prod.value().real


def agu_onepoint_dxi(spec, zeta):
    """Exact d R_N / d xi for the Gaussian families (no asymptotics).

    Combines the F_N derivative identity with the weight factor; the
    self-interaction terms cancel, leaving the pure Hermite cross product.
    """
    a, b, tau, gamma = _hermite_params(spec)
    N, c = spec.N, spec.c
    zeta = complex(zeta)
    w = gamma * zeta
    u = _hermite_normalized_seq(w, N, tau)
    prod = u[N - 1] * u[N].conj()
    # prefactor: -N * sqrt(ab)*... * 4/(1+tau) * gamma * sqrt(N tau/2)
    # assembled in log space together with the weight e^{-N Q_N}
    logpref = 0.5 * math.log(a * b) + math.log(N) + math.log(4.0 / (1.0 + tau)) \
        + math.log(gamma) + 0.5 * math.log(N * tau / 2.0) \
        + 2.0 * float(geometry.log_weight_half(spec, np.asarray([zeta]))[0])
    scale = ScaledComplex.from_log(logpref)
    return -(scale * prod).value().real


# ---------------------------------------------------------------------------
# Laguerre families


def _laguerre_params(spec):
    N, c = spec.N, spec.c
    a = N / c ** 2
    b = N / c ** 2 - 1.0
    if b <= 0:
        raise ValueError("ALUE parameters need N > c^2")
    tau = b / a
    nu = spec.effective_nu()
    xcoef = (a + b) / (2.0 * b) * N       # a^2-b^2 = a+b here
    log_cn = 0.5 * math.log(a * N) \
        + 0.5 * (nu + 1.0) * math.log((a + b) * N / (2.0 * a))
    return a, b, tau, nu, xcoef, log_cn


def _laguerre_psi_iter(spec, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    _, _, tau, nu, xcoef, log_cn = _laguerre_params(spec)
    N = spec.N
    x = xcoef * zeta
    log_t0 = log_cn - 0.5 * math.lgamma(nu + 1.0) \
        + geometry.log_weight_half(spec, zeta)
    m, e = _seed_from_log(log_t0)
    m_prev = np.zeros_like(m)
    e_prev = np.zeros_like(e)
    yield m, e
    for j in range(N - 1):
        c1 = tau / math.sqrt((j + 1.0) * (j + nu + 1.0))
        c2 = tau * tau * math.sqrt(j * (j + nu)
                                   / ((j + 1.0) * (j + nu + 1.0)))
        m_new = c1 * (2 * j + nu + 1.0 - x) * m - c2 * _pow2c(m_prev, e_prev - e)
        m_prev, e_prev = m, e
        m, e = _renorm(m_new, e.copy())
        yield m, e


def alue_onepoint_grid(spec, zeta):
    zeta = np.asarray(zeta, dtype=complex)
    acc_m = np.zeros(zeta.shape, dtype=float)
    acc_e = np.full(zeta.shape, _E_EMPTY, dtype=np.int64)
    for m, e in _laguerre_psi_iter(spec, zeta):
        acc_m, acc_e = _acc_add(acc_m, acc_e, np.abs(m) ** 2, 2 * e)
    return _collapse_real(acc_m, acc_e)


def weighted_laguerre_basis(spec, zeta):
    zeta = complex(zeta)
    if zeta == 0 and spec.effective_nu() <= 0:
        raise ValueError("weight is singular at zeta=0 for nu <= 0")
    vals = []
    for m, e in _laguerre_psi_iter(spec, np.asarray([zeta], dtype=complex)):
        vals.append(ScaledComplex(complex(m[0]), int(e[0])).normalized())
    return WeightedBasisEval(tuple(vals))


def alue_onepoint(spec, zeta):
    return float(alue_onepoint_grid(spec, np.asarray([zeta]))[0])


def onepoint(spec, zeta):
    """R_N(zeta) for any family with an implemented basis."""
    if spec.family in (AGUE, AGUE_MODIFIED):
        return agu_onepoint(spec, zeta)
    if spec.family in (ALUE, ALUE_ALPHA):
        return alue_onepoint(spec, zeta)
    return kernel(spec, zeta, zeta).K.real


def onepoint_grid(spec, zeta):
    if spec.family in (AGUE, AGUE_MODIFIED):
        return agu_onepoint_grid(spec, zeta)
    if spec.family in (ALUE, ALUE_ALPHA):
        return alue_onepoint_grid(spec, zeta)
    zeta = np.asarray(zeta, dtype=complex)
    flat = zeta.ravel()
    out = np.array([kernel(spec, z, z).K.real for z in flat])
    return out.reshape(zeta.shape)


# ---------------------------------------------------------------------------
# kernels


_UNDERFLOW_DIAG = 1e-300


def _pair_kernel(psi_iter_z, psi_iter_w):
    """Accumulate K = sum psi_j(z) conj(psi_j(w)) and the two diagonals."""
    k_m = np.zeros(1, dtype=complex)
    k_e = np.full(1, _E_EMPTY, dtype=np.int64)
    rz_m = np.zeros(1)
    rz_e = np.full(1, _E_EMPTY, dtype=np.int64)
    rw_m = np.zeros(1)
    rw_e = np.full(1, _E_EMPTY, dtype=np.int64)
    for (mz, ez), (mw, ew) in zip(psi_iter_z, psi_iter_w):
        pm = mz * np.conj(mw)
        pe = ez + ew
        hi = np.maximum(k_e, pe)
        k_m = _pow2c(k_m, k_e - hi) + _pow2c(pm, pe - hi)
        k_m, k_e = _renorm(k_m, hi)
        rz_m, rz_e = _acc_add(rz_m, rz_e, np.abs(mz) ** 2, 2 * ez)
        rw_m, rw_e = _acc_add(rw_m, rw_e, np.abs(mw) ** 2, 2 * ew)
    K = ScaledComplex(complex(k_m[0]), int(k_e[0])).value()
    Rz = float(_collapse_real(rz_m, rz_e)[0])
    Rw = float(_collapse_real(rw_m, rw_e)[0])
    return K, Rz, Rw


def _make_kernel_value(K, Rz):
    absk2 = abs(K) ** 2
    berezin = absk2 / Rz if Rz > _UNDERFLOW_DIAG else None
    return KernelValue(K, absk2, berezin)


def kernel(spec, zeta, eta):
    """Canonical correlation kernel K_N(zeta, eta) with |K|^2 and Berezin.

    Berezin value is |K(zeta,eta)|^2 / K(zeta,zeta); flagged None when the
    diagonal underflows.
    """
    zeta = complex(zeta)
    eta = complex(eta)
    if spec.family in (AGUE, AGUE_MODIFIED):
        K, Rz, _ = _pair_kernel(
            _hermite_psi_iter(spec, np.asarray([zeta])),
            _hermite_psi_iter(spec, np.asarray([eta])))
        return _make_kernel_value(K, Rz)
    if spec.family in (ALUE, ALUE_ALPHA):
        K, Rz, _ = _pair_kernel(
            _laguerre_psi_iter(spec, np.asarray([zeta])),
            _laguerre_psi_iter(spec, np.asarray([eta])))
        return _make_kernel_value(K, Rz)
    if spec.family == CHIRAL_D:
        base = EnsembleSpec(ALUE, spec.N, spec.c, nu=spec.nu)
        d = spec.d
        kv = kernel(base, zeta ** d, eta ** d)
        fac = d * abs(zeta) ** (d - 1) * abs(eta) ** (d - 1)
        K = fac * kv.K
        facz = d * abs(zeta) ** (2 * (d - 1))
        Rz = facz * kernel(base, zeta ** d, zeta ** d).K.real
        return _make_kernel_value(K, Rz)
    if spec.family == INDUCED_AGUE:
        return _induced_kernel(spec, zeta, eta)
    raise ValueError(f"no implemented basis for family {spec.family}")


def _induced_kernel(spec, zeta, eta):
    """Induced AGUE kernel for integer nu >= 0 by charge insertion at 0.

    The weighted subspace is zeta^nu * (polys of degree < N) * e^{-N q_N/2};
    it equals the span of the first N+nu elliptic-Hermite basis functions
    intersected with {f vanishing to order nu at 0}, a rank-nu projection.
    """
    nu = spec.nu
    if nu is None or nu < 0 or nu != int(nu):
        raise ValueError("induced kernel implemented for integer nu >= 0")
    nu = int(nu)
    base = EnsembleSpec(AGUE, spec.N, spec.c)
    if nu == 0:
        return kernel(base, zeta, eta)
    a, b, tau, gamma = _hermite_params(base)
    n_tot = spec.N + nu
    # q_j^{(k)}(0) data, scaled: u_j = (tau/2)^{j/2} H_j / sqrt(j!) framework
    # H_j^{(k)}(0) = 2^k j!/(j-k)! H_{j-k}(0)
    T = np.zeros((nu, n_tot))
    for k in range(nu):
        for j in range(k, n_tot):
            m = j - k
            if m % 2:
                continue
            # log |(tau/2)^{j/2} gamma^k 2^k (j!/(j-k)!) H_m(0) / sqrt(j!)|
            lg = 0.5 * j * math.log(tau / 2.0) + k * math.log(2.0 * gamma) \
                + math.lgamma(j + 1) - math.lgamma(m + 1) \
                - 0.5 * math.lgamma(j + 1) \
                + (math.lgamma(m + 1) - math.lgamma(m / 2 + 1))
            sign = (-1.0) ** (m // 2)
            T[k, j] = sign * math.exp(lg)
    # orthonormal rows of the constraint space
    q, _ = np.linalg.qr(T.T)          # n_tot x nu
    proj = np.eye(n_tot) - q @ q.T    # projector onto admissible coefficients
    psi_z = [ScaledComplex(complex(m[0]), int(e[0]))
             for m, e in _hermite_psi_iter_ntot(base, zeta, n_tot)]
    psi_w = [ScaledComplex(complex(m[0]), int(e[0]))
             for m, e in _hermite_psi_iter_ntot(base, eta, n_tot)]
    vz = np.array([p.value() for p in psi_z])
    vw = np.array([p.value() for p in psi_w])
    K = complex(vz @ proj @ np.conj(vw))
    Rz = float((vz @ proj @ np.conj(vz)).real)
    return _make_kernel_value(K, Rz)


def _hermite_psi_iter_ntot(spec, zeta, n_tot):
    """Like _hermite_psi_iter but yielding n_tot basis functions."""
    yield from _hermite_psi_iter(spec, np.asarray([zeta], dtype=complex),
                                 n_funcs=n_tot)


def dginibre_kernel(N, d, zeta, eta):
    """d-Ginibre kernel N sum_j (N zeta conj(eta))^{dj}/(dj)! e^{-N(|z|^2+|w|^2)/2}."""
    if d < 1:
        raise ValueError("d must be >= 1")
    zeta = complex(zeta)
    eta = complex(eta)
    u = N * zeta * np.conj(eta)
    gexp = -0.5 * N * (abs(zeta) ** 2 + abs(eta) ** 2)

    def log_sum(uu):
        if uu == 0:
            return 0.0, 1.0 + 0j
        la = math.log(abs(uu))
        ph = np.angle(uu)
        j = np.arange(N)
        logs = d * j * la - np.array([math.lgamma(d * jj + 1) for jj in j])
        mx = logs.max()
        s = np.sum(np.exp(logs - mx) * np.exp(1j * d * j * ph))
        return mx, s

    mx, s = log_sum(u)
    K = N * math.exp(min(mx + gexp, 700.0)) * s if mx + gexp > -745 else 0j
    mxd, sd = log_sum(N * abs(zeta) ** 2)
    gz = -N * abs(zeta) ** 2
    Rz = N * math.exp(mxd + gz) * sd.real if mxd + gz > -745 else 0.0
    return _make_kernel_value(complex(K), Rz)


def rescaled_onepoint(spec, p, z):
    """Rescaled density R_N(z) = R_N^{big}(Gamma^{-1} z) / (N Delta Q_N(p))."""
    gmap = geometry.rescale_map(spec, p)
    zeta = gmap.inverse(z)
    dq = gmap.scale ** 2 / spec.N
    return onepoint_grid(spec, zeta) / (spec.N * dq)


# ---------------------------------------------------------------------------
# exact identities


def laguerre_square_identity(j, nu, z):
    """Both sides of the |L_j^nu|^2 summation identity (integer nu >= 0).

    lhs = j!/(j+nu)! |L_j^nu(z)|^2,
    rhs = sum_k |z|^{2k} / (k!(k+nu)!) L_{j-k}^{nu+2k}(z + conj z).
    """
    if nu < 0 or nu != int(nu):
        raise ValueError("identity stated for integer nu >= 0")
    nu = int(nu)
    z = complex(z)
    lval = laguerre_seq(z, nu, j)[j]
    lhs = math.exp(math.lgamma(j + 1) - math.lgamma(j + nu + 1)) * abs(lval) ** 2
    x = z + np.conj(z)
    rhs = 0.0
    for k in range(j + 1):
        lk = laguerre_seq(x, nu + 2 * k, j - k)[j - k]
        w = math.exp(2 * k * math.log(abs(z)) - math.lgamma(k + 1)
                     - math.lgamma(k + nu + 1)) if z != 0 else \
            (1.0 / math.exp(math.lgamma(nu + 1.0)) if k == 0 else 0.0)
        rhs += w * lk.real
    return lhs, rhs


def contour_direct_G(N, nu, z, tau):
    """G_N(z) = sum_{j<N} tau^{2j} j!/(j+nu)! L_j^nu(z) conj(L_j^nu(z))."""
    seq = laguerre_seq(z, nu, N - 1)
    total = 0.0
    for j in range(N):
        total += tau ** (2 * j) \
            * math.exp(math.lgamma(j + 1) - math.lgamma(j + nu + 1)) \
            * abs(seq[j]) ** 2
    return total


def contour_identity_check(N, nu, z, c=1.0, nodes=512, r1=0.5, r2=None):
    """Evaluate G_N directly and through the double contour integral.

    The inner circle |u| = r1 < 1 encircles 0 only; the outer |v| = r2
    encircles 1 and keeps tau^2 v - u away from zero (r2 > (1+r1)/tau^2).
    Returns (direct, via_contour).
    """
    if nu < 0 or nu != int(nu):
        raise ValueError("contour identity stated for integer nu")
    nu = int(nu)
    tau = 1.0 - c ** 2 / N
    if not 0 < tau < 1:
        raise ValueError("need 0 < tau < 1 (N > c^2)")
    if r2 is None:
        r2 = 1.2 * (1.0 + r1) / tau ** 2
    if tau ** 2 * r2 <= (1.0 + r1):
        raise ValueError("contour radii violate tau^2 v - u != 0 safety")
    z = complex(z)
    th = (np.arange(nodes) + 0.5) * (2 * np.pi / nodes)
    u = r1 * np.exp(1j * th)
    v = r2 * np.exp(1j * th)
    du = 1j * u * (2 * np.pi / nodes)
    dv = 1j * v * (2 * np.pi / nodes)
    U = u[:, None]
    V = v[None, :]
    integrand = ((V * (U - 1) / ((V - 1) * U)) ** nu
                 * (V / U) ** N
                 * np.exp(z * U / (U - 1) - np.conj(z) * V / (V - 1))
                 / ((tau ** 2 * V - U) * (V - 1) * (U - 1)))
    un = np.einsum("ij,i,j->", integrand, du, dv)
    g_contour = tau ** (2 * N) * np.exp(np.conj(z)) / (4 * np.pi ** 2 * z ** nu) * un
    return contour_direct_G(N, nu, z, tau), complex(g_contour)
