"""Enumeration of field lattice points under trace and sign constraints.

These index sets drive every Fourier coefficient downstream: the totally
positive trace-n slice is finite (the hyperplane meets the positive
quadrant in a compact set), while the mixed-sign slices are infinite and
come with a certified truncation derived from the one-dimensional spacing
of the trace-zero sublattice and the exponential decay of the weight.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class ExpWeight:
    """Weight bounded by amp * exp(-rate * x) for x > 0."""

    rate: float
    amp: float = 1.0

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("weight must decay (rate > 0)")

    def bound(self, x):
        return self.amp * math.exp(-self.rate * x)


def beta0_weight(y):
    """Decay descriptor of beta_0(4 pi y |t|)."""
    return ExpWeight(rate=4.0 * math.pi * y)


@dataclass
class TraceLattice:
    """Rank-N lattice given by embedded basis columns, optionally exact."""

    basis: np.ndarray  # N x N, columns are basis vectors
    exact_basis: list = None  # QuadElem basis when field-backed (N = 2)
    field: object = None

    @property
    def n(self):
        return self.basis.shape[0]

    @classmethod
    def from_ideal(cls, F, ideal):
        a, b = ideal.basis()
        a1, a2 = a.embeddings()
        b1, b2 = b.embeddings()
        return cls(basis=np.array([[a1, b1], [a2, b2]]), exact_basis=[a, b], field=F)

    @classmethod
    def from_exact_pairs(cls, F, pairs):
        elems = [F.element(x, y) for x, y in pairs]
        cols = [e.embeddings() for e in elems]
        return cls(basis=np.array(cols).T, exact_basis=elems, field=F)


@dataclass
class LatticePoint:
    coeffs: tuple
    embed: np.ndarray
    elem: object = None  # QuadElem on the exact path

    @property
    def trace(self):
        if self.elem is not None:
            return self.elem.trace()
        return float(np.sum(self.embed))


def _coeff_box_radius(basis, radius):
    """Coefficient box bound for points with euclidean norm <= radius.

    Uses the smallest singular value of the basis: |c|_oo <= |c|_2
    <= radius / smin, which makes the scan provably complete.
    """
    smin = np.linalg.svd(basis, compute_uv=False)[-1]
    return int(math.floor(radius / smin)) + 1


def totally_positive_trace(lat, n):
    """All lattice points with every embedding positive and trace n.

    Complete by construction: positivity with trace n forces every
    coordinate into (0, n), hence euclidean norm below n*sqrt(N); the
    coefficient box follows from the basis' smallest singular value.
    Field-backed lattices are enumerated and verified exactly.
    """
    if n <= 0:
        return []
    if lat.exact_basis is not None:
        return _tpt_exact(lat, n)
    return _tpt_scan(lat, n)


def _tpt_scan(lat, n, tol=1e-9):
    nn = lat.n
    bound = _coeff_box_radius(lat.basis, n * math.sqrt(nn))
    rng = range(-bound, bound + 1)
    out = []
    grids = np.meshgrid(*([list(rng)] * nn), indexing="ij")
    coeffs = np.stack([g.ravel() for g in grids])
    pts = lat.basis @ coeffs
    ok = np.all(pts > tol, axis=0) & (np.abs(np.sum(pts, axis=0) - n) < tol)
    for idx in np.nonzero(ok)[0]:
        out.append(LatticePoint(coeffs=tuple(int(c) for c in coeffs[:, idx]), embed=pts[:, idx]))
    out.sort(key=lambda p: tuple(p.embed))
    return out


def _trace_line_solutions(lat, n):
    """Integer solutions of Tr(a*b1 + b*b2) = n as (base, step) pairs."""
    b1, b2 = lat.exact_basis
    t1, t2 = b1.trace(), b2.trace()
    den = math.lcm(t1.denominator, t2.denominator, Fraction(n).denominator)
    T1, T2, Nn = int(t1 * den), int(t2 * den), int(Fraction(n) * den)
    g = math.gcd(T1, T2)
    if g == 0:
        raise ValueError("trace functional vanishes on the lattice basis")
    if Nn % g != 0:
        return None
    # particular solution by extended gcd
    _, u, v = _xgcd(T1, T2)
    a0, b0 = u * (Nn // g), v * (Nn // g)
    step = (T2 // g, -(T1 // g))
    return (a0, b0), step


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


def _tpt_exact(lat, n):
    sol = _trace_line_solutions(lat, n)
    if sol is None:
        return []
    (a0, b0), (da, db) = sol
    b1, b2 = lat.exact_basis
    gamma = b1 * a0 + b2 * b0
    delta = b1 * da + b2 * db
    # positivity in both embeddings bounds k; float window plus exact filter
    lo, hi = _k_window(gamma, delta, n)
    out = []
    for k in range(lo, hi + 1):
        nu = gamma + delta * k
        if nu.is_totally_positive():
            assert nu.trace() == n
            out.append(
                LatticePoint(
                    coeffs=(a0 + da * k, b0 + db * k),
                    embed=np.array(nu.embeddings()),
                    elem=nu,
                )
            )
    out.sort(key=lambda p: tuple(p.embed))
    return out


def _k_window(gamma, delta, n, pad=2):
    ge = gamma.embeddings()
    de = delta.embeddings()
    lo, hi = -math.inf, math.inf
    for g, d in zip(ge, de):
        if abs(d) < 1e-300:
            continue
        r = -g / d
        if d > 0:
            lo = max(lo, r)
        else:
            hi = min(hi, r)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        # a positivity constraint must bound both sides for nonzero delta
        scale = max(abs(n), 1.0)
        lo = -1e6 * scale if not math.isfinite(lo) else lo
        hi = 1e6 * scale if not math.isfinite(hi) else hi
    return int(math.floor(lo)) - pad, int(math.ceil(hi)) + pad


def mixed_sign_trace(lat, n, slot, eps, weight):
    """Points with embedding `slot` negative, the rest positive, trace n.

    The family is infinite; it is truncated at |nu_slot| <= cutoff chosen so
    that (line spacing count) * sum of the weight tail is below eps.
    Returns (points, tail_bound, cutoff).
    """
    if not isinstance(weight, ExpWeight):
        raise ValueError("weight must be an ExpWeight descriptor")
    if lat.exact_basis is None:
        raise ValueError("mixed_sign_trace requires an exact field-backed lattice")
    sol = _trace_line_solutions(lat, n)
    if sol is None:
        return [], 0.0, 0.0
    (a0, b0), (da, db) = sol
    b1, b2 = lat.exact_basis
    gamma = b1 * a0 + b2 * b0
    delta = b1 * da + b2 * db
    de = np.array(delta.embeddings())
    spacing = abs(de[slot])
    if spacing < 1e-14:
        raise ValueError("degenerate trace line")
    # tail over |nu_slot| > X:  (1/spacing + 1) * amp * e^(-rate X)/(1 - e^(-rate*spacing))
    per = (1.0 / spacing + 1.0) * weight.amp
    denom = -math.expm1(-weight.rate * spacing)
    cutoff = max(
        (math.log(per / max(denom, 1e-300)) + math.log(1.0 / eps)) / weight.rate, spacing
    )
    tail = per * math.exp(-weight.rate * cutoff) / denom
    # k-range from |gamma_slot + k delta_slot| <= cutoff
    g = gamma.embeddings()[slot]
    lo = int(math.floor((-cutoff - g) / de[slot]))
    hi = int(math.ceil((cutoff - g) / de[slot]))
    if lo > hi:
        lo, hi = hi, lo
    out = []
    for k in range(lo - 2, hi + 3):
        nu = gamma + delta * k
        signs = [nu.sign_embedding(i) for i in range(2)]
        if signs[slot] == -1 and all(signs[i] == 1 for i in range(2) if i != slot):
            if abs(nu.embeddings()[slot]) <= cutoff:
                assert nu.trace() == n
                out.append(
                    LatticePoint(
                        coeffs=(a0 + da * k, b0 + db * k),
                        embed=np.array(nu.embeddings()),
                        elem=nu,
                    )
                )
    out.sort(key=lambda p: tuple(p.embed))
    return out, tail, cutoff


def dual_different_lattice(td, class_index):
    """sigma(a^-1 d^-1) for the given narrow class of a TorusData."""
    if not 0 <= class_index < len(td.classes):
        raise IndexError("class index out of range")
    cd = td.classes[class_index]
    if cd.exact_w is not None and td.n_degree == 2:
        return TraceLattice.from_exact_pairs(td.field(), cd.exact_w)
    return TraceLattice(basis=cd.basis_w.copy())
