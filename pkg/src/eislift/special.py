"""Scalar special functions shared by the whole package.

The K-Bessel value used here is the integral

    bessel_k(s, a) = int_0^oo exp(-a(t + 1/t)/2) t^s dt/t,

which is exactly TWICE the conventional modified Bessel function of the
second kind.  All weight factors downstream assume this normalization; it
is the one for which k_weight(0, a) = 1 + sgn(a).  Do not "fix" it.

beta_incomplete(s, t) = int_1^oo exp(-t*y) y^(s-1) dy = t^(-s) * Gamma(s, t)
with Gamma the upper incomplete gamma function, which is implemented here
for arbitrary (also negative and complex) order.
"""

import math
from dataclasses import dataclass

import numpy as np

_MAX_HALVINGS = 14

# Lanczos coefficients (g = 7, n = 9) for the complex gamma function.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def cgamma(z):
    """Gamma function for complex argument (Lanczos approximation)."""
    z = complex(z)
    if z.real < 0.5:
        return math.pi / (np.sin(math.pi * z) * cgamma(1.0 - z))
    z -= 1.0
    x = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * np.exp(-t) * x


def hermite(d, t):
    """Physicists' Hermite polynomial H_d(t) = (2t - d/dt)^d . 1.

    Evaluated by the three-term recurrence H_{d+1} = 2t H_d - 2d H_{d-1};
    accepts scalar or array t.
    """
    if d < 0:
        raise ValueError("Hermite degree must be non-negative")
    t = np.asarray(t, dtype=float)
    h0 = np.ones_like(t)
    if d == 0:
        return h0 if h0.shape else float(h0)
    h1 = 2.0 * t
    for k in range(1, d):
        h0, h1 = h1, 2.0 * t * h1 - 2.0 * k * h0
    return h1 if h1.shape else float(h1)


@dataclass(frozen=True)
class MultiIndex:
    """Tuple of non-negative integers with its total degree."""

    entries: tuple

    def __post_init__(self):
        if any(int(d) != d or d < 0 for d in self.entries):
            raise ValueError("multi-index entries must be non-negative integers")
        object.__setattr__(self, "entries", tuple(int(d) for d in self.entries))

    @property
    def degree(self):
        return sum(self.entries)

    def __len__(self):
        return len(self.entries)


def multi_hermite(dbar, v):
    """prod_m H_{d_m}(<v, e_m>) for a multi-index dbar and vector v."""
    if not isinstance(dbar, MultiIndex):
        dbar = MultiIndex(tuple(dbar))
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != len(dbar):
        raise ValueError("vector length does not match multi-index length")
    out = 1.0
    for m, d in enumerate(dbar.entries):
        out = out * hermite(d, v[..., m])
    return out


def _trap_even_halfline(f, cutoff, rtol):
    """Trapezoid value of int_0^cutoff f(u) du for f even and analytic.

    Halves the step until the relative change is below rtol; raises if the
    budget of refinements is exhausted.
    """
    h = 0.5
    val = None
    for _ in range(_MAX_HALVINGS):
        n = max(int(cutoff / h) + 1, 8)
        u = np.arange(n + 1) * h
        w = np.full(n + 1, h)
        w[0] = 0.5 * h
        w[-1] = 0.5 * h
        new = np.dot(f(u), w)
        if val is not None:
            scale = max(abs(new), 1e-300)
            if abs(new - val) <= rtol * scale:
                return new
        val = new
        h *= 0.5
    raise ArithmeticError("quadrature did not reach the requested tolerance")


def _bessel_cutoff(a, smax, rtol):
    # need a*(cosh U - 1) - smax*U >= -log(rtol) + margin
    target = -math.log(rtol) + 40.0
    u = 1.0
    for _ in range(40):
        u = math.acosh(1.0 + (target + smax * u) / a)
    return u


def bessel_k_scaled(s, a, rtol=1e-12):
    """exp(a) * bessel_k(s, a); stable for large a."""
    if a <= 0:
        raise ValueError("bessel_k requires a > 0")
    s = complex(s)
    smax = abs(s.real) + 1.0
    cutoff = _bessel_cutoff(a, smax, rtol)

    def f(u):
        return 2.0 * np.exp(-a * (np.cosh(u) - 1.0)) * np.cosh(s * u)

    val = _trap_even_halfline(f, cutoff, rtol)
    if s.imag == 0.0:
        return float(val.real)
    return complex(val)


def bessel_k(s, a, rtol=1e-12):
    """int_0^oo exp(-a(t+1/t)/2) t^s dt/t  (twice the standard K_s(a))."""
    return bessel_k_scaled(s, a, rtol=rtol) * math.exp(-a)


def _k_weight_pair(sp, sm, x, rtol):
    # shared quadrature grid so the s = 0 difference cancels exactly
    smax = max(abs(complex(sp).real), abs(complex(sm).real)) + 1.0
    cutoff = _bessel_cutoff(x, smax, rtol)

    sp = complex(sp)
    sm = complex(sm)

    def f(u):
        base = 2.0 * np.exp(-x * (np.cosh(u) - 1.0))
        return np.stack([base * np.cosh(sp * u), base * np.cosh(sm * u)])

    h = 0.5
    val = None
    for _ in range(_MAX_HALVINGS):
        n = max(int(cutoff / h) + 1, 8)
        u = np.arange(n + 1) * h
        w = np.full(n + 1, h)
        w[0] = 0.5 * h
        w[-1] = 0.5 * h
        new = f(u) @ w
        if val is not None:
            scale = max(np.max(np.abs(new)), 1e-300)
            if np.max(np.abs(new - val)) <= rtol * scale:
                return new[0], new[1]
        val = new
        h *= 0.5
    raise ArithmeticError("quadrature did not reach the requested tolerance")


def k_weight(s, a, rtol=1e-12):
    """Fourier weight k_s(a) = e^{2 pi a} |a|^{1/2+s} (K_{1/2+s} + sgn(a) K_{1/2-s})(2 pi |a|).

    Uses the package's doubled K normalization, so k_0(a) = 1 + sgn(a).
    """
    if a == 0:
        raise ValueError("k_weight requires a != 0")
    s = complex(s)
    x = 2.0 * math.pi * abs(a)
    kp, km = _k_weight_pair(0.5 + s, 0.5 - s, x, rtol)
    amp = abs(a) ** (0.5 + s)
    if a > 0:
        out = amp * (kp + km)
    else:
        out = amp * math.exp(-2.0 * x) * (kp - km)
    if s.imag == 0.0:
        return float(out.real)
    return complex(out)


# ---------------------------------------------------------------------------
# upper incomplete gamma, arbitrary order
# ---------------------------------------------------------------------------


def _gamma_upper_cf(a, x, rtol):
    # modified Lentz continued fraction; good for x >= ~1.5
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, 600):
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
        if abs(delta - 1.0) < rtol:
            break
    return np.exp(-x + a * np.log(x)) * h


def _gamma_lower_series(a, x, rtol):
    # one-sign series for the lower incomplete gamma, x small
    term = 1.0 / a
    total = term
    n = 0
    while abs(term) > rtol * abs(total):
        n += 1
        term *= x / (a + n)
        total += term
        if n > 500:
            raise ArithmeticError("incomplete gamma series did not converge")
    return np.exp(-x + a * np.log(x)) * total


_EULER_GAMMA = 0.5772156649015328606


def _exp1_series(x, rtol):
    # E1(x) = -gamma - log x + sum_{k>=1} (-1)^(k+1) x^k / (k k!),  x < 1.5
    total = -_EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, 200):
        term *= -x / k
        piece = -term / k
        total += piece
        if abs(piece) < rtol * max(abs(total), 1e-300):
            return total
    raise ArithmeticError("E1 series did not converge")


def gamma_upper(a, x, rtol=1e-14):
    """Upper incomplete gamma Gamma(a, x) for x > 0 and any real/complex a."""
    if x <= 0:
        raise ValueError("gamma_upper requires x > 0")
    a = complex(a)
    if x >= 1.5:
        out = _gamma_upper_cf(a, x, rtol)
    elif a.imag == 0.0 and a.real <= 0.0 and a.real == int(a.real):
        # the raise-and-recurse path divides by the order, so handle the
        # non-positive integer orders through Gamma(0,x) = E1(x)
        gb = _exp1_series(x, rtol)
        b = 0.0
        while b > a.real:
            b -= 1.0
            gb = (gb - math.exp(-x + b * math.log(x))) / b
        out = gb
    else:
        # shift the order into (0.5, 1.5] where the series is safe, then
        # recurse back down with Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x)/a
        k = 0
        while (a + k).real <= 0.5:
            k += 1
        b = a + k
        gb = cgamma(b) - _gamma_lower_series(b, x, rtol)
        for j in range(k):
            bj = b - 1 - j
            gb = (gb - np.exp(-x + bj * np.log(x))) / bj
        out = gb
    if a.imag == 0.0:
        return float(out.real)
    return complex(out)


def gamma_upper_quad(a, x, rtol=1e-12, with_log=False):
    """Gamma(a, x) by direct quadrature; with_log inserts log(t) in the integrand.

    Independent of gamma_upper: substitutes t = x(1 + e^p) and applies the
    trapezoid rule on the doubly-exponentially decaying integrand.  Used as
    an oracle and for the order-derivative d/da Gamma(a, x).
    """
    if x <= 0:
        raise ValueError("gamma_upper_quad requires x > 0")
    a = complex(a)
    p_lo = math.log(rtol) - 8.0
    body = -math.log(rtol) + 8.0
    p_hi = math.log(body / x + 1.0) + 4.0

    def f(p):
        t = x * (1.0 + np.exp(p))
        val = np.exp((a - 1.0) * np.log(t) - t) * x * np.exp(p)
        if with_log:
            val = val * np.log(t)
        return val

    h = 0.25
    val = None
    for _ in range(_MAX_HALVINGS):
        p = np.arange(p_lo, p_hi, h)
        new = np.sum(f(p)) * h
        if val is not None:
            scale = max(abs(new), 1e-300)
            if abs(new - val) <= rtol * scale:
                break
        val = new
        h *= 0.5
    else:
        raise ArithmeticError("quadrature did not reach the requested tolerance")
    if a.imag == 0.0 and abs(new.imag) < 1e-300:
        return float(new.real)
    return complex(new)


def beta_incomplete(s, t, rtol=1e-14):
    """beta_s(t) = int_1^oo exp(-t*y) y^(s-1) dy = t^(-s) Gamma(s, t)."""
    if t <= 0:
        raise ValueError("beta_incomplete requires t > 0")
    s = complex(s)
    out = np.exp(-s * math.log(t)) * gamma_upper(s, t, rtol=rtol)
    if s.imag == 0.0:
        return float(np.real(out))
    return complex(out)


def kappa(a):
    """beta_0(4 pi a), the s-derivative at 0 of k_s(-a) for a > 0.

    Always computed through beta_incomplete; the finite-difference route
    through k_weight exists only in the tests.
    """
    if a <= 0:
        raise ValueError("kappa requires a > 0")
    return beta_incomplete(0.0, 4.0 * math.pi * a)
