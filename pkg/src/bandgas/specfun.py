"""Special functions for kernel evaluation, with complex arguments where needed.

Hermite/Laguerre sequences use the bare three-term recurrences and are meant
for small degree; large-degree work goes through the scaled recurrences in
:mod:`bandgas.finiten` and :mod:`bandgas.asymptotics`, built on
:class:`ScaledComplex`.

Bessel J/I/K, Airy Ai and the complex error function are backed by
scipy.special (AMOS / Faddeeva), wrapped so every call reports a conservative
a-priori relative-error estimate.  The regularized lower incomplete gamma is
implemented here because scipy does not accept a complex second argument.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.special as _sp

_LN2 = math.log(2.0)

# np.float64 exponent range; collapse beyond this is inf/0
_MAX_EXP = 1020


@dataclass(frozen=True)
class ScaledComplex:
    """A complex number stored as mantissa * 2**exponent.

    The mantissa magnitude is kept in [0.5, 2) (0 for the zero element), so
    products and recurrences can run far past the float64 exponent range.
    """

    mantissa: complex
    exponent: int

    @staticmethod
    def zero():
        return ScaledComplex(0j, 0)

    @staticmethod
    def from_complex(z):
        z = complex(z)
        if z == 0:
            return ScaledComplex.zero()
        _, e = math.frexp(abs(z))
        return ScaledComplex(z * 2.0 ** (-e), e)

    @staticmethod
    def from_log(log_abs, phase=0.0):
        """Value exp(log_abs + i*phase) without intermediate overflow."""
        e = int(math.floor(log_abs / _LN2))
        m = math.exp(log_abs - e * _LN2) * cmath.exp(1j * phase)
        return ScaledComplex(m, e).normalized()

    def normalized(self):
        if self.mantissa == 0:
            return ScaledComplex.zero()
        _, e = math.frexp(abs(self.mantissa))
        if e == 0:
            return self
        return ScaledComplex(self.mantissa * 2.0 ** (-e), self.exponent + e)

    def value(self):
        """Collapse to complex; overflows to inf, underflows to 0."""
        if self.mantissa == 0:
            return 0j
        if self.exponent > _MAX_EXP:
            return complex(math.inf * self.mantissa.real,
                           math.inf * self.mantissa.imag)
        if self.exponent < -_MAX_EXP:
            return 0j
        return self.mantissa * 2.0 ** self.exponent

    def log2_abs(self):
        if self.mantissa == 0:
            return -math.inf
        return math.log2(abs(self.mantissa)) + self.exponent

    def log_abs(self):
        return self.log2_abs() * _LN2

    def conj(self):
        return ScaledComplex(self.mantissa.conjugate(), self.exponent)

    def __mul__(self, other):
        if isinstance(other, ScaledComplex):
            return ScaledComplex(self.mantissa * other.mantissa,
                                 self.exponent + other.exponent).normalized()
        return ScaledComplex(self.mantissa * other, self.exponent).normalized()

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        if self.mantissa == 0:
            return other
        if other.mantissa == 0:
            return self
        # align to the larger exponent; the smaller term may underflow to 0
        if self.exponent >= other.exponent:
            big, small = self, other
        else:
            big, small = other, self
        shift = small.exponent - big.exponent
        if shift < -1060:
            return big
        m = big.mantissa + small.mantissa * 2.0 ** shift
        return ScaledComplex(m, big.exponent).normalized()

    def __sub__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return self + ScaledComplex(-other.mantissa, other.exponent)

    def ratio(self, other):
        """self / other collapsed to a plain complex."""
        if other.mantissa == 0:
            raise ZeroDivisionError("ratio with zero ScaledComplex")
        m = self.mantissa / other.mantissa
        e = self.exponent - other.exponent
        return ScaledComplex(m, e).value()

    def abs2(self):
        """|self|^2 as a ScaledComplex (real mantissa)."""
        m = self.mantissa
        return ScaledComplex(complex(m.real * m.real + m.imag * m.imag, 0.0),
                             2 * self.exponent).normalized()


@dataclass(frozen=True)
class SpecialFunctionResult:
    value: complex
    est_rel_error: float


def hermite_seq(z, n_max):
    """H_0(z) .. H_{n_max}(z), physicists' normalization.

    Bare recurrence H_{j+1} = 2 z H_j - 2 j H_{j-1}; overflows for large
    n_max combined with large |z| -- callers needing big degrees must use the
    scaled recurrences.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    z = complex(z)
    out = [complex(1.0)]
    if n_max == 0:
        return out
    out.append(2 * z)
    for j in range(1, n_max):
        out.append(2 * z * out[j] - 2 * j * out[j - 1])
    return out


def laguerre_seq(x, nu, n_max):
    """Generalized Laguerre L_0^nu(x) .. L_{n_max}^nu(x) (nu > -1)."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if nu <= -1:
        raise ValueError("nu must be > -1")
    x = complex(x)
    out = [complex(1.0)]
    if n_max == 0:
        return out
    out.append(nu + 1 - x)
    for j in range(1, n_max):
        nxt = ((2 * j + nu + 1 - x) * out[j] - (j + nu) * out[j - 1]) / (j + 1)
        out.append(nxt)
    return out


def bessel_j(nu, z):
    """J_nu(z) for real order, complex argument."""
    if nu < -1:
        raise ValueError("nu must be >= -1")
    z = complex(z)
    if z.imag == 0 and z.real < 0 and nu != int(nu):
        raise ValueError("non-integer order on the negative real axis needs "
                         "branch information from the caller")
    v = complex(_sp.jv(nu, z))
    return SpecialFunctionResult(v, 1e-13 * (1.0 + abs(z)))


def bessel_i(nu, x):
    """Modified Bessel I_nu(x), x >= 0."""
    if x < 0:
        raise ValueError("x must be >= 0")
    return SpecialFunctionResult(complex(_sp.iv(nu, x)), 1e-13 * (1.0 + x))


def bessel_k(nu, x):
    """Modified Bessel K_nu(x), x > 0 (pole at x = 0)."""
    if x <= 0:
        raise ValueError("K_nu has a pole at x=0 and is not evaluated for x<=0")
    return SpecialFunctionResult(complex(_sp.kv(nu, x)), 1e-13 * (1.0 + x))


def log_bessel_k(nu, x):
    """log K_nu(x) for x > 0, stable for very large x (kve-based)."""
    if x <= 0:
        raise ValueError("x must be > 0")
    return float(np.log(_sp.kve(nu, x)) - x)


def airy_ai(z):
    """Airy Ai(z), complex argument."""
    z = complex(z)
    v = complex(_sp.airy(z)[0])
    return SpecialFunctionResult(v, 1e-13 * (1.0 + abs(z)))


def log_airy_ai(z):
    """Complex log of Ai(z) via the scaled Airy function.

    Safe far into the exponentially small region; the imaginary part is a
    branch of the phase (intended to be exponentiated, not compared).
    """
    z = np.asarray(z, dtype=complex)
    aip = _sp.airye(z)[0]           # Ai(z) * exp((2/3) z^{3/2})
    return np.log(aip) - (2.0 / 3.0) * z ** 1.5


def erf_c(z):
    """Error function erf(z) at complex argument (erfc = 1 - erf)."""
    z = complex(z)
    return SpecialFunctionResult(complex(_sp.erf(z)), 1e-13 * (1.0 + abs(z.imag) ** 2))


def gauss_window(a, w):
    """Half-Gaussian window F(w) = (1/sqrt(2 pi)) int_{-2a}^{2a} e^{-(w-t)^2/2} dt.

    Entire in w; equals (erf((w+2a)/sqrt2) - erf((w-2a)/sqrt2))/2.  Accepts
    ndarray w.  Overflows for |Im w| beyond ~37 (the erf factors blow up).
    """
    if a < 0:
        raise ValueError("a must be >= 0")
    w = np.asarray(w, dtype=complex)
    s = math.sqrt(2.0)
    out = 0.5 * (_sp.erf((w + 2 * a) / s) - _sp.erf((w - 2 * a) / s))
    if out.ndim == 0:
        return complex(out)
    return out


def gamma_p(a, z, max_terms=600):
    """Regularized lower incomplete gamma P(a, z), complex z, a > 0.

    Power series for moderate |z| or Re z <= 0; Lentz continued fraction for
    the upper function otherwise.  Accuracy degrades like e^{|z|-Re z} * eps
    from series cancellation, fine for the |z| <~ 30 arguments used here.
    """
    if a <= 0:
        raise ValueError("a must be > 0")
    z = complex(z)
    if z == 0:
        return SpecialFunctionResult(0j, 0.0)
    lg = math.lgamma(a)
    if z.real > 0 and abs(z) > a + 1.0:
        # continued fraction for Q(a,z) (Numerical Recipes gcf)
        tiny = 1e-300
        b = z + 1.0 - a
        c = 1.0 / tiny
        d = 1.0 / b
        h = d
        for i in range(1, max_terms):
            an = -i * (i - a)
            b += 2.0
            d = an * d + b
            if abs(d) < tiny:
                d = tiny
            c = b + an / c
            if abs(c) < tiny:
                c = tiny
            d = 1.0 / d
            delta = d * c
            h *= delta
            if abs(delta - 1.0) < 1e-16:
                break
        q = cmath.exp(-z + a * cmath.log(z) - lg) * h
        return SpecialFunctionResult(1.0 - q, 1e-14 * (1.0 + abs(z)))
    # series: P(a,z) = z^a e^{-z} / Gamma(a) * sum_n z^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(max_terms):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    val = total * cmath.exp(-z + a * cmath.log(z) - lg)
    est = 1e-16 * math.exp(min(abs(z) - z.real, 60.0)) + 1e-15
    return SpecialFunctionResult(val, est)
