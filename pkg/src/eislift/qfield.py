"""Exact arithmetic in a real quadratic field F = Q(sqrt(m)).

Elements are pairs of Fractions (x, y) meaning x + y*sqrt(m); ideals are
rank-2 Z-modules in column Hermite normal form over the integral basis
(1, omega).  The narrow class group is computed through the classical
bijection with SL_2(Z)-classes of primitive indefinite binary quadratic
forms of discriminant D: two ideals are narrowly equivalent iff their
reduced form cycles coincide.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache


def _isqrt(n):
    return math.isqrt(n)


def is_squarefree(n):
    if n % 4 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        d += 2
    return True


def is_fundamental_discriminant(D):
    if D <= 1:
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def kronecker(a, n):
    """Kronecker symbol (a|n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    result = 1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        while n % 2 == 0:
            n //= 2
            if a % 8 in (3, 5):
                result = -result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def factorize(n):
    """Prime factorization of |n| as a dict p -> e (trial division)."""
    n = abs(int(n))
    out = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    d = 7
    inc = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += inc[i]
        i = (i + 1) % 8
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class QuadElem:
    """x + y*sqrt(m) with exact rational x, y."""

    __slots__ = ("x", "y", "m")

    def __init__(self, x, y, m):
        self.x = Fraction(x)
        self.y = Fraction(y)
        self.m = m

    def __repr__(self):
        return f"({self.x} + {self.y}*sqrt({self.m}))"

    def __eq__(self, other):
        return (
            isinstance(other, QuadElem)
            and self.m == other.m
            and self.x == other.x
            and self.y == other.y
        )

    def __hash__(self):
        return hash((self.x, self.y, self.m))

    def __add__(self, other):
        other = self._coerce(other)
        return QuadElem(self.x + other.x, self.y + other.y, self.m)

    def __sub__(self, other):
        other = self._coerce(other)
        return QuadElem(self.x - other.x, self.y - other.y, self.m)

    def __neg__(self):
        return QuadElem(-self.x, -self.y, self.m)

    def __mul__(self, other):
        other = self._coerce(other)
        return QuadElem(
            self.x * other.x + self.m * self.y * other.y,
            self.x * other.y + self.y * other.x,
            self.m,
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, QuadElem):
            if other.m != self.m:
                raise ValueError("mixed fields")
            return other
        return QuadElem(Fraction(other), 0, self.m)

    def conj(self):
        return QuadElem(self.x, -self.y, self.m)

    def norm(self):
        return self.x * self.x - self.m * self.y * self.y

    def trace(self):
        return 2 * self.x

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("element is zero")
        return QuadElem(self.x / n, -self.y / n, self.m)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def is_zero(self):
        return self.x == 0 and self.y == 0

    def sign_embedding(self, which):
        """Exact sign of x + (-1)^which * y*sqrt(m)."""
        y = self.y if which == 0 else -self.y
        x = self.x
        if x == 0 and y == 0:
            return 0
        if x >= 0 and y >= 0:
            return 1
        if x <= 0 and y <= 0:
            return -1
        # mixed signs: compare x^2 with m y^2
        t = x * x - self.m * y * y
        big_is_x = t > 0
        if x > 0:
            return 1 if big_is_x else -1
        return -1 if big_is_x else 1

    def is_totally_positive(self):
        return self.sign_embedding(0) > 0 and self.sign_embedding(1) > 0

    def embeddings(self):
        r = math.sqrt(self.m)
        return (float(self.x) + float(self.y) * r, float(self.x) - float(self.y) * r)


def _hnf_columns(cols):
    """Column HNF of a rank-2 integer column collection [[p, q], ...].

    Returns (a, b, c) with module = Z*(a, 0) + Z*(b, c), a, c > 0,
    0 <= b < a.
    """
    pairs = [(int(p), int(q)) for p, q in cols if (p, q) != (0, 0)]
    if not pairs:
        raise ValueError("zero module")
    # c = gcd of second coordinates, achieved by a combination
    c = 0
    for _, q in pairs:
        c = math.gcd(c, q)
    if c == 0:
        raise ValueError("module has rank < 2")
    # find (b, c) by running extended gcd over the generators
    b, cc = pairs[0]
    for p, q in pairs[1:]:
        if cc == 0:
            b, cc = p, q
            continue
        if q == 0:
            continue
        g, u, v = _xgcd(cc, q)
        b, cc = u * b + v * p, g
    assert abs(cc) == c
    if cc < 0:
        b, cc = -b, -cc
    # a = gcd of first coordinates of elements with zero second coordinate
    a = 0
    for p, q in pairs:
        k = q // c
        a = math.gcd(a, p - k * b)
    if a == 0:
        raise ValueError("module has rank < 2")
    b %= a
    return a, b, c


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


class FracIdeal:
    """Fractional ideal (1/den) * (Z*a + Z*(b + c*omega)) of a Field."""

    __slots__ = ("field", "den", "a", "b", "c")

    def __init__(self, fld, den, a, b, c):
        g = math.gcd(math.gcd(a, b), math.gcd(c, den))
        self.field = fld
        self.den = den // g
        self.a = a // g
        self.b = (b // g) % (a // g)
        self.c = c // g

    def __repr__(self):
        return f"Ideal(1/{self.den} * [{self.a}, {self.b} + {self.c}w])"

    def __eq__(self, other):
        return (
            isinstance(other, FracIdeal)
            and self.field.D == other.field.D
            and (self.den, self.a, self.b, self.c) == (other.den, other.a, other.b, other.c)
        )

    def __hash__(self):
        return hash((self.den, self.a, self.b, self.c))

    def basis(self):
        """Z-basis as two QuadElems."""
        w = self.field.omega
        d = Fraction(1, self.den)
        return (
            QuadElem(Fraction(self.a) * d, 0, self.field.m),
            (QuadElem(Fraction(self.b) * d, 0, self.field.m) + w * (Fraction(self.c) * d)),
        )

    def norm(self):
        return Fraction(self.a * self.c, self.den**2)

    def is_integral(self):
        alpha, beta = self.basis()
        return self.field.contains_integer(alpha) and self.field.contains_integer(beta)

    def coords(self, elem):
        """Coordinates of elem in the (1, omega) basis, as Fractions."""
        w = self.field.omega
        # elem = p + q*omega with omega = w.x + w.y*sqrt(m)
        q = elem.y / w.y
        p = elem.x - q * w.x
        return p, q

    def contains(self, elem):
        if elem.is_zero():
            return True
        p, q = self.coords(elem)
        # solve s*(a,0) + t*(b,c) = den*(p,q) over Z
        dp = p * self.den
        dq = q * self.den
        t = dq / self.c
        if t.denominator != 1:
            return False
        s = (dp - t * self.b) / self.a
        return s.denominator == 1

    def mul(self, other):
        f = self.field
        a1, b1 = self.basis()
        a2, b2 = other.basis()
        gens = [a1 * a2, a1 * b2, b1 * a2, b1 * b2]
        return f.module_from_elements(gens)

    def __mul__(self, other):
        if isinstance(other, QuadElem):
            return self.scale(other)
        return self.mul(other)

    def scale(self, elem):
        a1, b1 = self.basis()
        return self.field.module_from_elements([a1 * elem, b1 * elem, a1 * elem * self.field.omega, b1 * elem * self.field.omega])

    def conj(self):
        a1, b1 = self.basis()
        return self.field.module_from_elements(
            [a1.conj(), b1.conj(), a1.conj() * self.field.omega, b1.conj() * self.field.omega]
        )

    def inverse(self):
        n = self.norm()
        a1, b1 = self.conj().basis()
        inv = QuadElem(1 / n, 0, self.field.m)
        return self.field.module_from_elements(
            [a1 * inv, b1 * inv, a1 * inv * self.field.omega, b1 * inv * self.field.omega]
        )

    def divides(self, other):
        """self | other, i.e. other * self^-1 integral."""
        return other.mul(self.inverse()).is_integral()


@dataclass
class NarrowClassGroup:
    order: int
    representatives: list
    cycle_keys: list
    elementary_divisors: list
    _field: object = field(repr=False, default=None)

    def class_of(self, ideal):
        key = self._field.cycle_key(ideal)
        return self.cycle_keys.index(key)

    def compose(self, i, j):
        return self.class_of(self.representatives[i].mul(self.representatives[j]))


@dataclass(frozen=True)
class NarrowCharacter:
    values: tuple
    is_totally_odd: bool
    group: NarrowClassGroup = field(compare=False)

    def on_class(self, idx):
        return self.values[idx]

    def __call__(self, ideal):
        return self.values[self.group.class_of(ideal)]


class Field:
    """Real quadratic field of fundamental discriminant D."""

    def __init__(self, D):
        if not isinstance(D, int) or not is_fundamental_discriminant(D):
            raise ValueError(f"{D!r} is not a positive fundamental discriminant")
        self.D = D
        self.m = D // 4 if D % 4 == 0 else D
        if D % 4 == 0:
            self.omega = QuadElem(0, 1, self.m)  # sqrt(m)
        else:
            self.omega = QuadElem(Fraction(1, 2), Fraction(1, 2), self.m)  # (1+sqrt(D))/2
        self.sqrt_m = math.sqrt(self.m)
        self.fund_unit = self._fundamental_unit()
        nu = self.fund_unit.norm()
        assert nu in (1, -1)
        self.eps_plus = self.fund_unit if nu == 1 else self.fund_unit * self.fund_unit
        self.unit_ideal = self.module_from_elements([QuadElem(1, 0, self.m), self.omega])
        self.different = self.principal(QuadElem(0, 1, self.m) * (2 if D % 4 == 0 else 1))
        # different = (sqrt(D)): sqrt(D) = 2 sqrt(m) when D = 4m, sqrt(D) otherwise
        if D % 4 == 1:
            self.different = self.principal(QuadElem(0, 1, self.m))
        assert self.different.norm() == D

    # -- construction helpers -------------------------------------------

    def contains_integer(self, elem):
        """elem lies in the ring of integers."""
        q = elem.y / self.omega.y
        p = elem.x - q * self.omega.x
        return p.denominator == 1 and q.denominator == 1

    def module_from_elements(self, elems):
        """The Z-module spanned by QuadElems, as a FracIdeal."""
        coords = []
        den = 1
        raw = []
        for e in elems:
            if e.is_zero():
                continue
            q = e.y / self.omega.y
            p = e.x - q * self.omega.x
            raw.append((p, q))
            den = math.lcm(den, p.denominator, q.denominator)
        for p, q in raw:
            coords.append((int(p * den), int(q * den)))
        a, b, c = _hnf_columns(coords)
        return FracIdeal(self, den, a, b, c)

    def principal(self, elem):
        if elem.is_zero():
            raise ValueError("zero element generates the zero module")
        return self.module_from_elements([elem, elem * self.omega])

    def element(self, x, y=0):
        return QuadElem(x, y, self.m)

    def _fundamental_unit(self):
        """Fundamental unit > 1, by the continued fraction of omega."""
        # continued fraction of (P0 + sqrt(Dcf)) / Q0
        if self.D % 4 == 0:
            P, Q, Dcf = 0, 1, self.m
        else:
            P, Q, Dcf = 1, 2, self.D
        sq = math.isqrt(Dcf)
        p_prev, p = 1, None
        q_prev, q = 0, None
        P0, Q0 = P, Q
        h_km1, h_km2 = 1, 0
        k_km1, k_km2 = 0, 1
        for _ in range(10000):
            a = (P + sq) // Q
            h_k = a * h_km1 + h_km2
            k_k = a * k_km1 + k_km2
            h_km2, h_km1 = h_km1, h_k
            k_km2, k_km1 = k_km1, k_k
            # candidate unit h - k*conj-part: u = h_k - k_k * conj(omega)? use u = h + k*omega form
            cand = QuadElem(h_k, 0, self.m) - self.omega.conj() * k_k
            n = cand.norm()
            if n in (1, -1) and not (h_k == 1 and k_k == 0):
                u = cand
                if u.embeddings()[0] < 0:
                    u = -u
                if abs(u.embeddings()[0]) < 1:
                    u = u.inverse()
                    if u.embeddings()[0] < 0:
                        u = -u
                return u
            P = a * Q - P
            Q = (Dcf - P * P) // Q
        raise ArithmeticError("continued fraction did not find a unit")

    # -- primes ----------------------------------------------------------

    def factor_prime(self, p):
        """Prime ideals above a rational prime p with their type."""
        if p < 2 or any(p % q == 0 for q in range(2, min(p, _isqrt(p) + 1))):
            raise ValueError(f"{p} is not prime")
        chi = kronecker(self.D, p)
        one = self.element(1)
        if chi == -1:
            return "inert", [self.principal(self.element(p))]
        # root of the minimal polynomial of omega mod p
        roots = []
        for r in range(p):
            val = self._omega_minpoly(r) % p
            if val == 0:
                roots.append(r)
        if chi == 0:
            r = roots[0]
            P = self.module_from_elements(
                [self.element(p), self.omega - self.element(r), self.element(p) * self.omega,
                 (self.omega - self.element(r)) * self.omega]
            )
            return "ramified", [P]
        r1, r2 = roots[0], roots[1]
        ps = []
        for r in (r1, r2):
            ps.append(
                self.module_from_elements(
                    [self.element(p), self.omega - self.element(r),
                     self.element(p) * self.omega, (self.omega - self.element(r)) * self.omega]
                )
            )
        return "split", ps

    def _omega_minpoly(self, x):
        # omega = sqrt(m): x^2 - m ; omega = (1+sqrt(D))/2: x^2 - x + (1-D)/4
        if self.D % 4 == 0:
            return x * x - self.m
        return x * x - x + (1 - self.D) // 4

    def prime_ideals_above(self, p):
        return self.factor_prime(p)[1]

    def ideal_valuation(self, I, P):
        """Valuation of the fractional ideal I at the prime P."""
        return self._val_signed(I, P)

    def _val_signed(self, I, P):
        v = 0
        J = I
        Pinv = P.inverse()
        while not J.is_integral():
            J = J.mul(P)
            v -= 1
        while True:
            K = J.mul(Pinv)
            if not K.is_integral():
                break
            J = K
            v += 1
        return v

    # -- narrow classes via indefinite forms ------------------------------

    def ideal_form(self, I):
        """Primitive form of discriminant D attached to an oriented ideal basis."""
        alpha, beta = I.basis()
        # orientation: (alpha*beta' - alpha'*beta)/sqrt(D) > 0
        cross = alpha * beta.conj() - alpha.conj() * beta
        # cross is a pure sqrt(m)-multiple: sign of its y-part decides
        sgn = 1 if cross.y > 0 else -1
        if sgn < 0:
            alpha, beta = beta, alpha
        n = I.norm()
        A = alpha.norm() / n
        B = (alpha * beta.conj() + alpha.conj() * beta).x / n  # trace of alpha*conj(beta)
        C = beta.norm() / n
        assert A.denominator == 1 and B.denominator == 1 and C.denominator == 1
        A, B, C = int(A), int(B), int(C)
        assert B * B - 4 * A * C == self.D
        return (A, B, C)

    def _rho(self, form):
        a, b, c = form
        sq = _isqrt(self.D)
        if abs(c) >= sq:
            # -|c| < b' <= |c|
            b2 = (-b) % (2 * abs(c))
            if b2 > abs(c):
                b2 -= 2 * abs(c)
        else:
            # sq - 2|c| < b' < sq  (take the largest admissible residue)
            b2 = (-b) % (2 * abs(c))
            while b2 > sq:
                b2 -= 2 * abs(c)
            while b2 <= sq - 2 * abs(c):
                b2 += 2 * abs(c)
        c2 = (b2 * b2 - self.D) // (4 * c)
        return (c, b2, c2)

    def _is_reduced(self, form):
        # reduced iff |sqrt(D) - 2|a|| < b < sqrt(D); exact integer tests
        a, b, c = form
        D = self.D
        if not (0 < b and b * b < D):
            return False
        if D >= (b + 2 * abs(a)) ** 2:  # sqrt(D) >= b + 2|a|
            return False
        t = 2 * abs(a) - b
        return t <= 0 or t * t < D

    def form_cycle(self, form):
        f = form
        for _ in range(2000):
            if self._is_reduced(f):
                break
            f = self._rho(f)
        else:
            raise ArithmeticError("form reduction did not terminate")
        cycle = [f]
        g = self._rho(f)
        while g != f:
            cycle.append(g)
            g = self._rho(g)
            if len(cycle) > 4000:
                raise ArithmeticError("runaway form cycle")
        return cycle

    def cycle_key(self, I):
        # scale fractional ideals to integral ones (narrow class unchanged
        # only under totally positive scaling, so scale by a positive integer)
        J = I
        if not J.is_integral():
            J = self.module_from_elements(
                [e * self.element(J.den) for e in J.basis()]
                + [e * self.element(J.den) * self.omega for e in J.basis()]
            )
        return min(self.form_cycle(self.ideal_form(J)))

    def narrowly_equivalent(self, I, J):
        return self.cycle_key(I) == self.cycle_key(J)

    @lru_cache(maxsize=None)
    def narrow_class_group(self):
        gens = [self.unit_ideal, self.different]
        bound = max(2, int(math.isqrt(self.D) // 2) + 1)
        p = 2
        while p <= bound:
            if kronecker(self.D, p) != -1:
                gens.extend(self.prime_ideals_above(p))
            p = _next_prime(p)
        gens.sort(key=lambda I: I.norm())  # small-norm representatives first
        # BFS closure under multiplication
        reps = {}
        frontier = [self.unit_ideal]
        reps[self.cycle_key(self.unit_ideal)] = self.unit_ideal
        while frontier:
            new_frontier = []
            for I in frontier:
                for g in gens:
                    J = I.mul(g)
                    key = self.cycle_key(J)
                    if key not in reps:
                        reps[key] = J
                        new_frontier.append(J)
            frontier = new_frontier
        keys = sorted(reps)
        keys.remove(self.cycle_key(self.unit_ideal))
        keys = [self.cycle_key(self.unit_ideal)] + keys
        representatives = [reps[k] for k in keys]
        grp = NarrowClassGroup(
            order=len(keys),
            representatives=representatives,
            cycle_keys=keys,
            elementary_divisors=[],
            _field=self,
        )
        grp.elementary_divisors = _abelian_invariants(grp)
        return grp

    def totally_odd_characters(self):
        """All +-1 characters of the narrow class group that are -1 on [different]."""
        grp = self.narrow_class_group()
        h = grp.order
        table = [[grp.compose(i, j) for j in range(h)] for i in range(h)]
        d_idx = grp.class_of(self.different)
        out = []
        for mask in range(2**h):
            vals = tuple(1 if not (mask >> i) & 1 else -1 for i in range(h))
            if vals[0] != 1:
                continue
            ok = all(
                vals[table[i][j]] == vals[i] * vals[j] for i in range(h) for j in range(i, h)
            )
            if ok and vals[d_idx] == -1:
                out.append(NarrowCharacter(values=vals, is_totally_odd=True, group=grp))
        return out

    # -- divisor enumeration ----------------------------------------------

    def factor_ideal(self, I):
        """Prime factorization of an integral ideal as [(P, e), ...]."""
        if not I.is_integral():
            raise ValueError("factor_ideal needs an integral ideal")
        n = I.norm()
        assert n.denominator == 1
        out = []
        for p in sorted(factorize(int(n))):
            for P in self.prime_ideals_above(p):
                e = self._val_signed(I, P)
                if e:
                    out.append((P, e))
        return out

    def divisors_between(self, nu, c):
        """Integral ideals n with c | n | (nu)*different."""
        if nu.is_zero():
            raise ValueError("nu must be nonzero")
        I = self.principal(nu).mul(self.different)
        if not I.is_integral():
            raise ValueError("(nu)*different is not integral")
        fac = self.factor_ideal(I)
        c_vals = [self._val_signed(c, P) for P, _ in fac]
        # if c has a prime outside the support of I, the sandwich is empty
        for P, _ in self.factor_ideal(c) if c != self.unit_ideal else []:
            if not any(P == Q for Q, _ in fac):
                return []
        if any(cv > e for (_, e), cv in zip(fac, c_vals)):
            return []
        divisors = [self.unit_ideal]
        for (P, e), cv in zip(fac, c_vals):
            new = []
            for J in divisors:
                Pk = self.unit_ideal
                for k in range(e + 1):
                    if k >= cv:
                        new.append(J.mul(Pk))
                    Pk = Pk.mul(P)
            divisors = new
        # the per-prime lower bounds already enforce c | n
        divisors.sort(key=lambda J: (J.norm(), J.a, J.b, J.c))
        return divisors


def _next_prime(p):
    q = p + 1
    while True:
        if q > 2 and q % 2 == 0:
            q += 1
            continue
        if all(q % r for r in range(3, _isqrt(q) + 1, 2)) and q > 1:
            return q
        q += 1


def _abelian_invariants(grp):
    """Invariant factor decomposition from the composition table.

    Reconstructs the p-part partitions from the counts of solutions of
    x^(p^k) = e, then aligns them into invariant factors.
    """
    h = grp.order
    if h == 1:
        return []
    orders = []
    for i in range(h):
        k, j = 1, i
        while j != 0:
            j = grp.compose(j, i)
            k += 1
        orders.append(k)

    def count_killed(d):
        return sum(1 for o in orders if d % o == 0)

    parts = {}
    for p in factorize(h):
        exps = []
        k = 1
        prev = count_killed(1)
        while True:
            cur = count_killed(p**k)
            lam = round(math.log(cur / prev, p))
            if lam == 0:
                break
            exps.append(lam)
            prev = cur
            k += 1
        # exps[k-1] = #invariants with p-exponent >= k; conjugate it
        col = []
        for i in range(exps[0]):
            col.append(sum(1 for lam in exps if lam > i))
        parts[p] = sorted(col, reverse=True)
    width = max(len(v) for v in parts.values())
    invs = []
    for i in range(width):
        d = 1
        for p, col in parts.items():
            if i < len(col):
                d *= p ** col[i]
        invs.append(d)
    return sorted(invs)


def _divisors(n):
    out = []
    for d in range(1, n + 1):
        if n % d == 0:
            out.append(d)
    return out


def make_field(D):
    """Validated Field for a positive fundamental discriminant D."""
    return Field(D)
