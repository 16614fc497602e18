"""Hecke L-function of a totally odd quadratic character.

Three independent routes are kept deliberately separate:

* dirichlet_partial -- the raw ideal sum, valid for Re(s) > 1;
* LContext.lambda_value -- the completed function
      Lambda(chi, w) = Gamma((1+w)/2)^2 * pi^(-(1+w)) * L(chi, w)
  computed everywhere by a two-sided incomplete-gamma representation
  (odd theta kernel per narrow class folded along the unit torus, split
  at the covolume scale and reflected by Poisson summation), termwise
  differentiable in w;
* genus_exact_L0 -- the exact rational L(chi, 0) through the genus
  factorization D = D1 * D2 into two negative fundamental discriminants
  and generalized Bernoulli sums.

No root number is ever assumed: the reflected sum carries the functional
equation implicitly.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .qfield import factorize, is_squarefree, kronecker
from .special import cgamma, gamma_upper, gamma_upper_quad

NOT_GENUS = "NOT_GENUS"

DIRICHLET = "DIRICHLET"
CONTINUED = "CONTINUED"
GENUS_EXACT = "GENUS_EXACT"


@dataclass
class LValue:
    s: complex
    value: complex
    method: str
    error: float


# ---------------------------------------------------------------------------
# Dirichlet series
# ---------------------------------------------------------------------------


def ideals_up_to(F, bound):
    """All integral ideals of norm <= bound as (ideal, norm) pairs."""
    primes = []
    p = 2
    while p <= bound:
        if kronecker(F.D, p) != -1:
            for P in F.prime_ideals_above(p):
                primes.append((P, p))
        elif p * p <= bound:
            primes.append((F.principal(F.element(p)), p * p))
        p = _next_prime(p)
    out = [(F.unit_ideal, 1)]
    for P, q in primes:
        grown = list(out)
        for I, n in out:
            J, m = I, n
            while m * q <= bound:
                J = J.mul(P)
                m = m * q
                grown.append((J, m))
        out = grown
    return out


def _next_prime(p):
    q = p + 1
    while True:
        if q < 4 or all(q % r for r in range(2, math.isqrt(q) + 1)):
            return q
        q += 1


def dirichlet_partial(F, chi, s, bound):
    """Partial sum of L(chi, s) over ideals of norm <= bound, Re(s) > 1."""
    s = complex(s)
    if s.real <= 1:
        raise ValueError("dirichlet_partial requires Re(s) > 1")
    total = 0j
    for I, n in ideals_up_to(F, bound):
        total += chi(I) * n ** (-s)
    # tail: #ideals of norm n is at most d(n) <= 2 sqrt(n)
    if s.real > 1.5:
        err = 2.0 * bound ** (1.5 - s.real) / (s.real - 1.5)
    else:
        err = math.inf
    if abs(total.imag) < 1e-15:
        total = total.real
    return LValue(s=s, value=total, method=DIRICHLET, error=err)


def ideal_count_of_norm(F, n):
    """Number of integral ideals of norm exactly n."""
    return sum(kronecker(F.D, m) for m in range(1, n + 1) if n % m == 0)


# ---------------------------------------------------------------------------
# completed function by incomplete-gamma sums
# ---------------------------------------------------------------------------


def _gauss_legendre(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


class LContext:
    """Per-(field, character) machinery for the completed L-function."""

    def __init__(self, F, chi, tol=1e-12, rho_nodes=48):
        self.F = F
        self.chi = chi
        self.tol = tol
        grp = F.narrow_class_group()
        self.class_data = []
        eps1, eps2 = F.eps_plus.embeddings()
        self.logeps = math.log(eps1)
        v, w = _gauss_legendre(rho_nodes, 0.0, 2.0 * self.logeps)
        self.rho = np.exp(v)
        self.rho_w = w
        sqrt_d = math.sqrt(F.D)
        for idx, a in enumerate(grp.representatives):
            atil = a.inverse().mul(F.different.inverse())
            na = float(a.norm())
            self.class_data.append(
                {
                    "chi": chi.on_class(idx),
                    "norm_a": a.norm(),
                    "lat_a": self._lattice_terms(a, 1.0 / (na * sqrt_d)),
                    "lat_atil": self._lattice_terms(atil, na * sqrt_d),
                    "inv_covol": 1.0 / (na * sqrt_d),
                }
            )

    def _lattice_terms(self, ideal, cut):
        """Per-mu data (prod mu1*mu2 and c_mu on the rho grid) for theta_b."""
        b1, b2 = ideal.basis()
        e1 = np.array(b1.embeddings())
        e2 = np.array(b2.embeddings())
        basis = np.column_stack([e1, e2])
        eps1 = self.F.eps_plus.embeddings()[0]
        lthr = -math.log(self.tol) + 46.0
        x1 = math.sqrt(lthr / (math.pi * cut))
        x2 = eps1 * x1  # eps_plus^2 bounds rho; sqrt of it scales mu_2
        box = _box_from_bounds(basis, x1, x2)
        prods = []
        c_rows = []
        for i in range(-box, box + 1):
            for j in range(-box, box + 1):
                if i == 0 and j == 0:
                    continue
                m1 = basis[0, 0] * i + basis[0, 1] * j
                m2 = basis[1, 0] * i + basis[1, 1] * j
                if abs(m1) > x1 + 1e-9 or abs(m2) > x2 + 1e-9:
                    continue
                prods.append(m1 * m2)
                c_rows.append(m1 * m1 * self.rho + m2 * m2 / self.rho)
        return {
            "prod": np.array(prods),
            "c": np.array(c_rows),  # (n_mu, n_rho)
            "cut": cut,
        }

    def _g_value(self, lat, sigma, deriv=False):
        """G_b(sigma) (and optionally its sigma-derivative) for one lattice."""
        c = lat["c"]
        x = math.pi * c * lat["cut"]
        sig = complex(sigma)
        flat_x = x.ravel()
        ga = np.array([gamma_upper(sig + 1.0, xx) for xx in flat_x]).reshape(x.shape)
        pc = math.pi * c
        pref = np.exp(-(sig + 1.0) * np.log(pc))
        core = pref * ga
        val = 2.0 * np.dot(np.dot(lat["prod"], core), self.rho_w)
        if not deriv:
            return val
        gd = np.array(
            [gamma_upper_quad(sig + 1.0, xx, rtol=1e-12, with_log=True) for xx in flat_x]
        ).reshape(x.shape)
        dcore = pref * (gd - np.log(pc) * ga)
        dval = 2.0 * np.dot(np.dot(lat["prod"], dcore), self.rho_w)
        return val, dval

    def lambda_value(self, w):
        """Lambda(chi, w) = Gamma((1+w)/2)^2 pi^-(1+w) L(chi, w), entire in w.

        The per-class orbit sums count every integral ideal 2^N times
        (sign units times the kernel of the narrow-to-ordinary class map),
        hence the 2^-N in front.
        """
        w = complex(w)
        total = 0j
        for cd in self.class_data:
            na = float(cd["norm_a"])
            i_w = self._g_value(cd["lat_a"], w) - cd["inv_covol"] * self._g_value(
                cd["lat_atil"], 1.0 - w
            )
            total += cd["chi"] * np.exp(w * math.log(na)) * i_w
        total *= 0.25
        if abs(total.imag) < 1e-12 * max(abs(total), 1.0):
            return total.real
        return total

    def lambda_derivative0(self):
        """d/dw Lambda(chi, w) at w = 0, by termwise differentiation."""
        total = 0.0
        for cd in self.class_data:
            na = float(cd["norm_a"])
            g0, dg0 = self._g_value(cd["lat_a"], 0.0, deriv=True)
            g1, dg1 = self._g_value(cd["lat_atil"], 1.0, deriv=True)
            i0 = g0 - cd["inv_covol"] * g1
            di0 = dg0 + cd["inv_covol"] * dg1  # chain rule on G(1 - w)
            total += cd["chi"] * (math.log(na) * i0 + di0)
        return float(np.real(total)) * 0.25

    def l_value(self, w):
        """Plain L(chi, w) from the completed function."""
        w = complex(w)
        gam = cgamma((1.0 + w) / 2.0) ** 2
        lam = self.lambda_value(w)
        return lam * np.exp((1.0 + w) * math.log(math.pi)) / gam


def _box_from_bounds(basis, x1, x2):
    inv = np.linalg.inv(basis)
    corners = [
        inv @ np.array([sx * x1, sy * x2]) for sx in (-1, 1) for sy in (-1, 1)
    ]
    return int(math.ceil(max(np.max(np.abs(c)) for c in corners))) + 1


def lambda_continuation(F, chi, w, tol=1e-12):
    ctx = _context(F, chi, tol)
    val = ctx.lambda_value(w)
    return LValue(s=complex(w), value=val, method=CONTINUED, error=tol * max(abs(val), 1.0))


def lambda_derivative0(F, chi, tol=1e-12):
    return _context(F, chi, tol).lambda_derivative0()


_CTX_CACHE = {}


def _context(F, chi, tol=1e-12):
    key = (F.D, chi.values, tol)
    if key not in _CTX_CACHE:
        _CTX_CACHE[key] = LContext(F, chi, tol=tol)
    return _CTX_CACHE[key]


# ---------------------------------------------------------------------------
# genus oracle
# ---------------------------------------------------------------------------


def is_fundamental_any(d):
    """Fundamental discriminant test for either sign (d != 1)."""
    if d == 1 or d == 0:
        return False
    if d % 4 == 1:
        return is_squarefree(abs(d))
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(abs(m))
    return False


def dirichlet_l0_exact(d):
    """L(chi_d, 0) = -(1/|d|) sum_a chi_d(a) a for an odd character chi_d."""
    q = abs(d)
    return Fraction(-sum(kronecker(d, a) * a for a in range(1, q + 1)), q)


def genus_factorizations(D):
    """Factorizations D = D1 * D2 with both factors negative fundamental."""
    out = []
    for e in range(1, D + 1):
        if D % e:
            continue
        d1, d2 = -e, -(D // e)
        if d1 < d2:
            continue
        if is_fundamental_any(d1) and is_fundamental_any(d2):
            out.append((d1, d2))
    return out


def genus_exact_L0(F, chi):
    """Exact rational L(chi, 0) via the matching genus factorization.

    Returns NOT_GENUS when no factorization reproduces the character's
    values on the prime classes.
    """
    match = match_genus_factorization(F, chi)
    if match is None:
        return NOT_GENUS
    d1, d2 = match
    return dirichlet_l0_exact(d1) * dirichlet_l0_exact(d2)


def match_genus_factorization(F, chi):
    cands = genus_factorizations(F.D)
    p = 2
    probes = []
    while len(probes) < 12 and p < 500:
        if kronecker(F.D, p) != -1:
            P = F.prime_ideals_above(p)[0]
            probes.append((p, chi(P)))
        p = _next_prime(p)
    good = []
    for d1, d2 in cands:
        ok = True
        for p, val in probes:
            if d1 % p != 0:
                want = kronecker(d1, p)
            else:
                want = kronecker(d2, p)
            if want != val:
                ok = False
                break
        if ok:
            good.append((d1, d2))
    return good[0] if len(good) == 1 else None


def genus_lprime0(F, chi):
    """L'(chi, 0) through the genus factorization (test oracle).

    Uses L'(chi_d, 0) = -log|d| L(chi_d, 0) + sum_a chi_d(a) log Gamma(a/|d|).
    """
    match = match_genus_factorization(F, chi)
    if match is None:
        return None
    out = []
    for d in match:
        q = abs(d)
        l0 = float(dirichlet_l0_exact(d))
        lp = -math.log(q) * l0 + sum(
            kronecker(d, a) * math.lgamma(a / q) for a in range(1, q)
        )
        out.append((l0, lp))
    (l1, lp1), (l2, lp2) = out
    return lp1 * l2 + l1 * lp2


def detect_rational(values, max_den=10**6):
    """Rational reconstruction: both precision levels must round alike."""
    fracs = [Fraction(float(v)).limit_denominator(max_den) for v in values]
    if all(f == fracs[0] for f in fracs):
        return fracs[0]
    return None
