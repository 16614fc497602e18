"""The regularized lift: harmonic-weak-Maass input data, the xi operator,
the truncated-fundamental-domain period with log T subtraction, the exact
cusp corrections kappa_r, and the algebraic number their sum produces.

Inputs with numeric evaluators are eta quotients f_p = (eta(t)/eta(pt))^
(24/(p-1)), weight 0 and weakly holomorphic, so xi(f) = 0 and the
Petersson term drops out of the closure identity; general harmonic Maass
data participates through its exact principal parts only.

The identity under test (N = 2, level p):

    -4 * Phi(f) = kappa_inf + p * kappa_0,

with kappa_r assembled from the termwise s-derivative expansion:
the y-free constant A(r) pairs with a+_r(f, 0) and the coefficient limit
C_n(r, T -> oo) = -log J(n)-data pairs with the principal part.
"""

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .eisenstein import AlgebraicLog, build_derivative, cusp_zero_expansion
from .theta import (
    TorusQuadrature,
    coset_blocks,
    psi_constant_coefficient,
    schwartz_blocks,
    torus_period,
    torus_period_psi,
    _psi_singular,
)

SUPPORTED_PRIMES = (2, 3, 5, 7, 13)


def _series_mul(a, b, order):
    out = [0] * order
    for i, ai in enumerate(a):
        if ai == 0 or i >= order:
            continue
        for j, bj in enumerate(b):
            if i + j >= order:
                break
            out[i + j] += ai * bj
    return out


def _series_pow_eta_factor(n, e, order):
    """(1 - q^n)^e as an integer series (binomial, sparse)."""
    out = [0] * order
    c = 1
    for k in range(0, (order - 1) // n + 1):
        out[k * n] = c
        c = -c * (e - k) // (k + 1)
    return out


def _series_inv(a, order):
    """Multiplicative inverse of a series with a(0) = 1, integer output."""
    assert a[0] == 1
    out = [0] * order
    out[0] = 1
    for k in range(1, order):
        s = 0
        for j in range(1, min(k, len(a) - 1) + 1):
            s += a[j] * out[k - j]
        out[k] = -s
    return out


def eta_quotient_series(p, e, order):
    """Integer q-series of prod (1-q^n)^e (1-q^(pn))^(-e) to the given order."""
    num = [0] * order
    num[0] = 1
    for n in range(1, order):
        num = _series_mul(num, _series_pow_eta_factor(n, e, order), order)
    den = [0] * order
    den[0] = 1
    for n in range(1, (order - 1) // p + 1):
        den = _series_mul(den, _series_pow_eta_factor(p * n, e, order), order)
    return _series_mul(num, _series_inv(den, order), order)


@dataclass
class MaassInput:
    """Principal-part data of a weight 2-N harmonic weak Maass form.

    Indices at the cusp 0 live in (1/p)Z; prin_zero[m] is the coefficient
    of e(-(m/p) tau) in the slashed expansion.
    """

    weight: int
    level: int
    prin_inf: dict  # n >= 1 -> exact coefficient of q^-n
    const_inf: Fraction
    prin_zero: dict  # m >= 1 -> coefficient of q_p^-m
    const_zero: Fraction
    coeffs_inf: list = None  # q-expansion from q^-1 on (eta quotient inputs)
    coeffs_zero: list = None  # cusp-0 expansion from q_p^1 on, WITHOUT p^(e/2)
    cusp0_prefactor: int = 1
    a_minus: dict = field(default_factory=dict)  # n > 0 -> a^-(f, n)

    def is_weakly_holomorphic(self):
        return not self.a_minus

    def eval_inf(self, tau):
        """f(tau) by the q-expansion; needs Im(tau) not too small."""
        if self.coeffs_inf is None:
            raise ValueError("this input carries no evaluator")
        q = cmath.exp(2j * math.pi * tau)
        acc = 0j
        qn = 1.0 / q
        for c in self.coeffs_inf:
            acc += c * qn
            qn *= q
        return acc


def hauptmodul(p, n_max=64):
    """f_p = (eta(tau)/eta(p tau))^(24/(p-1)), exact expansion and cusp data.

    At the cusp 0: f_p | gamma_0 = p^(12/(p-1)) q_p (1 + ...), so the
    principal part there is empty and a+_0(f, 0) = 0.
    """
    if p not in SUPPORTED_PRIMES:
        raise ValueError(f"supported primes are {SUPPORTED_PRIMES}")
    e = 24 // (p - 1)
    order = n_max + 2
    ser = eta_quotient_series(p, e, order)  # f = q^-1 * ser
    cusp0 = eta_quotient_series_swapped(p, e, order)
    return MaassInput(
        weight=0,
        level=p,
        prin_inf={1: Fraction(1)},
        const_inf=Fraction(ser[1]),
        prin_zero={},
        const_zero=Fraction(0),
        coeffs_inf=ser,
        coeffs_zero=cusp0,
        cusp0_prefactor=p ** (12 // (p - 1)),
    )


def eta_quotient_series_swapped(p, e, order):
    """prod (1-q^(pn))^e (1-q^n)^(-e): the cusp-0 series (without q_p and
    the p-power prefactor)."""
    num = [0] * order
    num[0] = 1
    for n in range(1, (order - 1) // p + 1):
        num = _series_mul(num, _series_pow_eta_factor(p * n, e, order), order)
    den = [0] * order
    den[0] = 1
    for n in range(1, order):
        den = _series_mul(den, _series_pow_eta_factor(n, e, order), order)
    return _series_mul(num, _series_inv(den, order), order)


def eval_f_coset(f, tau, j):
    """f(gamma tau) for gamma = S T^j, via f(-1/sigma) = p^(e/2) q_p (...)
    with sigma = tau + j; exact cusp-0 series evaluated at q_p = e(sigma/p)."""
    if f.coeffs_zero is None:
        raise ValueError("this input carries no evaluator")
    p = f.level
    qp = cmath.exp(2j * math.pi * (tau + j) / p)
    acc = 0j
    qn = qp
    for c in f.coeffs_zero:
        acc += c * qn
        qn *= qp
    return f.cusp0_prefactor * acc


def xi_operator(f):
    """Coefficients of xi_{2-N}(f): zero for weakly holomorphic input, and
    -conj(a^-(f, n)) otherwise (from d/dy beta_k(n, y) = -e^{-4 pi n y} y^-k)."""
    if f.is_weakly_holomorphic():
        return []
    top = max(f.a_minus)
    return [-complex(f.a_minus.get(n, 0)).conjugate() for n in range(1, top + 1)]


# ---------------------------------------------------------------------------
# exact cusp corrections
# ---------------------------------------------------------------------------


@dataclass
class KappaValue:
    """kappa_r = a_mult * A_chi + log_part, with the log part exact."""

    a_mult: Fraction
    log_part: AlgebraicLog
    a_chi: float

    @property
    def value(self):
        return float(self.a_mult) * self.a_chi + self.log_part.value


def kappa_corrections(f, dexp_inf, dexp_zero=None, t_max=50.0):
    """(kappa_inf, kappa_0) from exact expansion data.

    kappa_inf = A_chi a+_inf(0) + log[alpha(chi,c)^{a+_inf(0)}
                prod_n J_{chi,c}(n)^{-a+_inf(-n)}],
    kappa_0   = (chi(c)/N(c)) (A_chi a+_0(0) + log[alpha(chi,cbar)^{a+_0(0)}
                p^{-B a+_0(0)} prod_n J_{chi,cbar}(p n)^{-a+_0(-n)}]).

    The finite-height remainders sum_n a(n, T) a+(f, -n) decay like
    beta_0(4 pi T |nu_l|); their bound at t_max is returned as well.
    """
    td = dexp_inf.td
    a0_inf = f.const_inf
    log_inf = dexp_inf.log_alpha.scaled(a0_inf)
    for n, coef in f.prin_inf.items():
        log_inf = log_inf * AlgebraicLog([(dexp_inf.j_value(n), -Fraction(coef))])
    k_inf = KappaValue(a_mult=Fraction(a0_inf), log_part=log_inf, a_chi=dexp_inf.a_chi)

    scale = Fraction(td.chi_c) / Fraction(td.norm_c)
    if dexp_zero is None and (f.const_zero or f.prin_zero):
        dexp_zero = cusp_zero_expansion(dexp_inf)
    a0_zero = f.const_zero
    factors = []
    if a0_zero or f.prin_zero:
        factors = list(dexp_zero.log_alpha.scaled(a0_zero).factors)
        factors.append((Fraction(td.prime), -Fraction(dexp_zero.b_chi) * a0_zero))
        for m, coef in f.prin_zero.items():
            factors.append((dexp_zero.j_value(td.prime * m), -Fraction(coef)))
    log_zero = AlgebraicLog([(q, e * scale) for q, e in factors])
    k_zero = KappaValue(a_mult=scale * a0_zero, log_part=log_zero, a_chi=dexp_inf.a_chi)

    # finite-T remainder bound: each a(n, T) term decays like e^{-4 pi T m}
    # with m the least |nu_l| in its slice
    rem = 0.0
    for n, coef in f.prin_inf.items():
        rem += abs(float(coef)) * abs(dexp_inf.a_term(n, t_max))
    for m, coef in f.prin_zero.items():
        if dexp_zero is not None:
            rem += abs(float(coef)) * abs(dexp_zero.a_term(td.prime * m, t_max)) * float(scale) * td.prime
    return k_inf, k_zero, rem


def alpha_invariant(f, dexp_inf, dexp_zero=None):
    """alpha(f, chi, c) = alpha_inf * alpha_0^(p chi(c)/N(c)) as a formal
    product of rational powers (AlgebraicLog factors)."""
    td = dexp_inf.td
    k_inf, k_zero, _ = kappa_corrections(f, dexp_inf, dexp_zero)
    return k_inf.log_part * AlgebraicLog(
        [(q, e * td.prime) for q, e in k_zero.log_part.factors]
    )


# ---------------------------------------------------------------------------
# regularized period
# ---------------------------------------------------------------------------


class PsiPeriod:
    """Evaluator of int_{c_eps} E_psi(z1, tau, phi_gamma) for all coset
    transforms of phi_{chi, c}, organized per height row (the expensive
    pair integrals depend on y only)."""

    def __init__(self, td, tol=1e-10, mode_shift=1.0):
        self.td = td
        self.quad = TorusQuadrature(td, tol=tol)
        self.mode_shift = mode_shift  # largest principal-part index paired
        self.block_sets = {"inf": schwartz_blocks(td)}
        for j in range(td.prime):
            self.block_sets[j] = coset_blocks(td, j)

    def row(self, key, y):
        """Mode data of the psi period at height y: (coefficients, exact
        rational Q-indices) per block plus the x-independent singular part.

        The pair budget carries the caller's amplification shift, so the
        q <= shift modes stay accurate after multiplication by e^{2 pi q y}.
        """
        from . import _kernels

        p = self.td.prime
        vals_all = []
        qq_all = []
        sing = 0.0
        for block in self.block_sets[key]:
            pairs = self.quad.pair_reps(
                block.basis_v, block.basis_w, y, shift=self.mode_shift
            )
            if pairs.shape[0]:
                a1, b1 = _kernels.pair_logt_integrals(
                    pairs[:, 0], pairs[:, 2], y, self.quad.u_nodes, self.quad.u_wts
                )
                a2, b2 = _kernels.pair_logt_integrals(
                    pairs[:, 1], pairs[:, 3], y, self.quad.u_nodes, self.quad.u_wts
                )
                nv = pairs[:, 0] * pairs[:, 1]
                nw = pairs[:, 2] * pairs[:, 3]
                vals = (y**2) / 2.0 * (nv * a1 * a2 - nw * b1 * b2) * block.coeff
                qq = pairs[:, 0] * pairs[:, 2] + pairs[:, 1] * pairs[:, 3]
                # Q(v, w) is an exact multiple of 1/p; snap the float products
                qint = np.round(qq * p)
                assert np.max(np.abs(qq * p - qint)) < 1e-6
                if block.jshift:
                    vals = vals * np.exp(-2j * math.pi * block.jshift * qint / p)
                vals_all.append(vals.astype(complex))
                qq_all.append(qint.astype(np.int64))
            sing += float(np.real(block.coeff * _psi_singular(self.quad, block, y)))
        if vals_all:
            vals = np.concatenate(vals_all)
            qq = np.concatenate(qq_all)
        else:
            vals = np.zeros(0, dtype=complex)
            qq = np.zeros(0, dtype=np.int64)
        return vals, qq, sing

    def eval_point(self, row, x):
        vals, qq, sing = row
        p = self.td.prime
        return complex(sing) + complex(np.sum(vals * np.exp(2j * math.pi * x * qq / p)))

    def constant_coefficient(self, key):
        """int_{c_eps} e_psi(z1, phi_r): the y-linear constant-mode slope."""
        total = 0.0
        for block in self.block_sets[key]:
            total += float(np.real(block.coeff * psi_constant_coefficient(block, self.quad)))
        return total


def _f_mode_arrays(f, key, y):
    """Fourier modes of f or f|gamma_j at height y: (indices in 1/level
    units, coefficients including the e^{-2 pi m y} factor)."""
    p = f.level
    if key == "inf":
        m = np.arange(-1, len(f.coeffs_inf) - 1) * p  # integer modes, in 1/p units
        coef = np.array([float(c) for c in f.coeffs_inf]) * np.exp(
            -2.0 * math.pi * (m / p) * y
        )
        return m, coef.astype(complex)
    j = key
    n = np.arange(1, len(f.coeffs_zero) + 1)
    coef = (
        f.cusp0_prefactor
        * np.array([float(c) for c in f.coeffs_zero])
        * np.exp(-2.0 * math.pi * n * y / p)
        * np.exp(2j * math.pi * n * j / p)
    )
    return n, coef


def _sinc1(a):
    out = np.ones_like(a, dtype=float)
    nz = np.abs(a) > 1e-14
    out[nz] = np.sin(math.pi * a[nz]) / (math.pi * a[nz])
    return out


def _row_times_f_xint(pp, row, f, key, y):
    """Exact x-integral over [-1/2, 1/2] of (psi period) * (f | gamma):
    sum over mode pairs with sinc weights (exact for matched widths)."""
    vals, qq, sing = row
    p = pp.td.prime
    m_idx, m_coef = _f_mode_arrays(f, key, y)
    # singular part is the q = 0 mode
    total = complex(sing) * complex(np.sum(m_coef * _sinc1(m_idx / p)))
    if vals.size:
        # pairings e((q + m)x / p): sinc of the combined index
        comb = (qq[:, None] + m_idx[None, :]) / p
        total += complex(np.sum(vals[:, None] * m_coef[None, :] * _sinc1(comb)))
    return total


def regularized_period(
    f, td, t_max=32.0, tol=1e-9, nx_band=12, ny_unit=14, method="logT"
):
    """lim_T [ int_{F_T} (int_{c_eps} E_psi) f dmu - log T * Q ] over the
    p+1 coset tiles of the standard fundamental domain.

    The domain splits into the curved band (height below 1), integrated
    pointwise, and the rectangle [−1/2,1/2] x [1, T], where the
    x-integral is carried out exactly by mode pairing -- pointwise
    quadrature there would have to cancel e^{2 pi y}-sized terms to
    power-law accuracy, which double precision cannot do.

    Returns (value, ladder) with the ladder at t_max/4, t_max/2, t_max;
    method "rho" runs the constant-term-in-rho regularization instead.
    """
    if td.n_degree != 2:
        raise ValueError("regularized_period supports N = 2")
    p = td.prime
    if f.level != p:
        raise ValueError("level mismatch between input form and torus data")
    shift = max([float(n) for n in f.prin_inf] + [1.0])
    pp = PsiPeriod(td, tol=tol, mode_shift=shift)
    q_inf = pp.constant_coefficient("inf")
    q_zero = pp.constant_coefficient(0)
    qcoef = float(f.const_inf) * q_inf + p * float(f.const_zero) * q_zero

    keys = ["inf"] + list(range(p))
    t_ladder = [t_max / 4.0, t_max / 2.0, t_max]
    rhos = (0.2, 0.1, 0.05) if method == "rho" else (0.0,)
    totals = {rho: np.zeros(len(t_ladder), dtype=complex) for rho in rhos}

    # curved band: y in [sqrt(1-x^2), 1], pointwise (bounded integrand)
    yn, yw = np.polynomial.legendre.leggauss(10)
    xs, xw = np.polynomial.legendre.leggauss(nx_band)
    band = 0j
    band_r = {rho: 0j for rho in rhos}
    for ynode, ywt in zip(yn, yw):
        y = 0.5 * (1.0 + math.sqrt(3.0) / 2.0) + 0.5 * (1.0 - math.sqrt(3.0) / 2.0) * ynode
        wy = 0.5 * (1.0 - math.sqrt(3.0) / 2.0) * ywt
        rows = {key: pp.row(key, y) for key in keys}
        x_edge = math.sqrt(max(1.0 - y * y, 0.0))
        half = 0.5 - x_edge
        if half <= 0:
            continue
        for xnode, xwt in zip(xs, xw):
            for side in (-1.0, 1.0):
                x = side * (x_edge + half * (0.5 * (xnode + 1.0)))
                wx = half * 0.5 * xwt
                tau = complex(x, y)
                mass = wx * wy / y**2
                term = 0j
                for key in keys:
                    e_val = pp.eval_point(rows[key], x)
                    fv = f.eval_inf(tau) if key == "inf" else eval_f_coset(f, tau, key)
                    term += e_val * fv * mass
                for rho in rhos:
                    band_r[rho] += term * y ** (-rho)

    # rectangle: y in [1, T] in ladder segments, exact in x
    bounds = [1.0] + t_ladder
    for seg in range(len(t_ladder)):
        lo, hi = bounds[seg], bounds[seg + 1]
        n_nodes = max(int(ny_unit * (math.log(hi) - math.log(lo))) + 6, 8)
        gn, gw = np.polynomial.legendre.leggauss(n_nodes)
        ly = 0.5 * (math.log(hi) - math.log(lo)) * (gn + 1.0) + math.log(lo)
        lw = 0.5 * (math.log(hi) - math.log(lo)) * gw
        for lyy, lww in zip(ly, lw):
            y = math.exp(lyy)
            wy = lww * y
            acc = 0j
            for key in keys:
                row = pp.row(key, y)
                acc += _row_times_f_xint(pp, row, f, key, y)
            for rho in rhos:
                totals[rho][seg] += acc * wy / y**2 * y ** (-rho)

    ladders = {}
    for rho in rhos:
        cums = np.cumsum(totals[rho]) + band_r[rho]
        if method == "logT":
            ladders[rho] = [cums[i] - qcoef * math.log(t_ladder[i]) for i in range(3)]
        else:
            ladders[rho] = list(cums)
    if method == "logT":
        ladder = ladders[0.0]
        return complex(ladder[-1]), [complex(v) for v in ladder]
    # rho variant: fit P (1 - T^-rho)/rho + Phi + c rho at T = t_max
    t = t_max
    rows = np.array([[(1 - t ** (-r)) / r, 1.0, r] for r in rhos])
    vals = np.array([ladders[r][-1] for r in rhos])
    sol = np.linalg.solve(rows, vals)
    return complex(sol[1]), [complex(ladders[r][-1]) for r in rhos]


# ---------------------------------------------------------------------------
# adjointness and Petersson machinery
# ---------------------------------------------------------------------------


def adjointness_check(td, tau_samples, h=1e-3, tol=1e-10):
    """Residuals of int_c E_psi = -(1/4) L_N d/ds int_c E_phi u^(-4s).

    Both sides fully numeric: the right-hand side is a central difference
    in s followed by finite-difference lowering in tau; the tolerance
    budget is set by the double differentiation.
    """
    quad = TorusQuadrature(td, tol=tol)
    blocks = schwartz_blocks(td)
    out = []
    for tau in tau_samples:
        tau = complex(tau)
        lhs = torus_period_psi(blocks, tau, quad=quad)

        def e_prime(t):
            return (torus_period(td, t, h, quad=quad) - torus_period(td, t, -h, quad=quad)) / (
                2 * h
            )

        dx = (e_prime(tau + h) - e_prime(tau - h)) / (2 * h)
        dy = (e_prime(tau + 1j * h) - e_prime(tau - 1j * h)) / (2 * h)
        l_n = -2j * tau.imag**2 * 0.5 * (dx + 1j * dy)
        rhs = -0.25 * l_n
        out.append(abs(lhs - rhs) / max(abs(rhs), 1e-12))
    return out


def lowering_of_log_y(tau, h=1e-5):
    """Finite-difference L_N applied to log y at tau; equals y exactly."""
    tau = complex(tau)

    def f(t):
        return math.log(t.imag)

    dx = (f(tau + h) - f(tau - h)) / (2 * h)
    dy = (f(tau + 1j * h) - f(tau - 1j * h)) / (2 * h)
    return -2j * tau.imag**2 * 0.5 * (dx + 1j * dy)


def petersson_pairing(f_eval, g_coeffs, p, height=12.0, nx=16, ny=48):
    """<F, g> = int_{Gamma_0(p) \\ H} F(tau) conj(g(tau)) y^N dmu by tiled
    quadrature with a height cutoff; g is a cusp form given by integer
    q-coefficients (g = sum_{n>=1} b_n q^n), evaluated directly.
    """
    g_coeffs = list(g_coeffs)
    if g_coeffs and g_coeffs[0] != 0:
        raise ValueError("g must be cuspidal (vanishing constant term)")

    def g_at(tau):
        q = cmath.exp(2j * math.pi * tau)
        acc = 0j
        qn = q
        for b in g_coeffs[1:] if g_coeffs and g_coeffs[0] == 0 else g_coeffs:
            acc += b * qn
            qn *= q
        return acc

    cosets = [None] + [j for j in range(p)]  # None = identity
    xs, xw = np.polynomial.legendre.leggauss(nx)
    xs = 0.5 * xs
    xw = 0.5 * xw
    y0 = math.sqrt(3.0) / 2.0
    yn, yw = np.polynomial.legendre.leggauss(ny)
    ly = 0.5 * (math.log(height) - math.log(y0)) * (yn + 1.0) + math.log(y0)
    lw = 0.5 * (math.log(height) - math.log(y0)) * yw
    total = 0j
    for lyy, lww in zip(ly, lw):
        y = math.exp(lyy)
        for x, wx in zip(xs, xw):
            tau = complex(x, y)
            if abs(tau) < 1.0:
                continue
            mass = wx * lww * y / y**2
            for c in cosets:
                if c is None:
                    zt = tau
                else:
                    zt = -1.0 / (tau + c)
                total += f_eval(zt) * np.conj(g_at(zt)) * zt.imag**2 * mass
    return total
