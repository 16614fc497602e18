"""Torus data container and its on-disk schema (torusdata-v1).

TorusData carries everything the kernel and period numerics need about the
embedded field torus: the embedding matrix of the chosen basis, one lattice
pair per narrow class, character values, unit data and cusp widths.  It is
exported from qfield for degree 2 and can be user-supplied for higher even
degree, in which case only the generic torus operations accept it.

The JSON layout stores exact rationals as "p/q" strings and floats as
decimal strings with a declared precision, so saving and reloading is
bit-exact and files diff cleanly.
"""

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

FORMAT_TAG = "torusdata-v1"

# validation violation codes
ORIENTATION = "ORIENTATION"
DUALITY = "DUALITY"
DET_NORM = "DET_NORM"
CHAR = "CHAR"
WIDTHS = "WIDTHS"
DEGREE = "DEGREE"


def _frac_str(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _parse_frac(s):
    n, d = s.split("/")
    return Fraction(int(n), int(d))


def _mat_str(m):
    return [[repr(float(x)) for x in row] for row in np.asarray(m)]


def _parse_mat(rows):
    return np.array([[float(x) for x in row] for row in rows], dtype=float)


def _exact_pairs(pairs):
    if pairs is None:
        return None
    return [[_frac_str(x), _frac_str(y)] for x, y in pairs]


def _parse_exact_pairs(pairs):
    if pairs is None:
        return None
    return [(_parse_frac(x), _parse_frac(y)) for x, y in pairs]


@dataclass
class ClassData:
    chi: int
    rep_hnf: tuple  # (den, a, b, c) over the (1, omega) basis
    norm_a: Fraction
    basis_ac: np.ndarray  # columns are embedded basis vectors of sigma(a*c)
    basis_a: np.ndarray  # sigma(a)
    basis_w: np.ndarray  # sigma(a^-1 d^-1)
    exact_ac: list = None  # basis elements as (x, y) meaning x + y*sqrt(m)
    exact_a: list = None
    exact_w: list = None


@dataclass
class TorusData:
    n_degree: int
    disc: int
    prime: int
    g_eps: np.ndarray
    chi_c: int
    chi_d: int
    norm_c: Fraction
    norm_d: Fraction
    classes: list
    unit_log: np.ndarray  # (N-1, N) rows span the log unit lattice
    eps_embed: np.ndarray  # embeddings of the totally positive fundamental unit
    widths: tuple  # (w_infinity, w_zero)
    ideal_c_hnf: tuple = None
    ideal_cbar_hnf: tuple = None
    eps_exact: tuple = None  # (x, y)
    _field_cache: object = field(default=None, repr=False, compare=False)

    @property
    def h_plus(self):
        return len(self.classes)

    def require_degree2(self, what):
        if self.n_degree != 2:
            raise ValueError(f"{what} supports only degree 2 torus data (got N={self.n_degree})")

    def field(self):
        self.require_degree2("field reconstruction")
        if self._field_cache is None:
            from .qfield import make_field

            self._field_cache = make_field(self.disc)
        return self._field_cache

    def ideal_from_hnf(self, hnf):
        from .qfield import FracIdeal

        den, a, b, c = hnf
        return FracIdeal(self.field(), den, a, b, c)

    def ideal_c(self):
        return self.ideal_from_hnf(self.ideal_c_hnf)

    def ideal_cbar(self):
        return self.ideal_from_hnf(self.ideal_cbar_hnf)

    def character(self):
        """The NarrowCharacter matching the stored chi table."""
        F = self.field()
        grp = F.narrow_class_group()
        stored = []
        for cd in self.classes:
            stored.append((grp.class_of(self.ideal_from_hnf(cd.rep_hnf)), cd.chi))
        for chi in F.totally_odd_characters():
            if all(chi.on_class(i) == v for i, v in stored):
                return chi
        raise ValueError("stored character table matches no totally odd character")


def export_n2(F, chi, c, p):
    """TorusData for a quadratic field, totally odd chi and c | (p)."""
    pO = F.principal(F.element(p))
    if not c.is_integral() or not pO.mul(c.inverse()).is_integral():
        raise ValueError("c must be an integral ideal dividing (p)")
    if not chi.is_totally_odd:
        raise ValueError("character must be totally odd")
    d = F.different
    cbar = pO.mul(c.inverse())
    grp = F.narrow_class_group()
    classes = []
    for idx, a in enumerate(grp.representatives):
        ac = a.mul(c)
        w = a.inverse().mul(d.inverse())
        classes.append(
            ClassData(
                chi=chi.on_class(idx),
                rep_hnf=(a.den, a.a, a.b, a.c),
                norm_a=a.norm(),
                basis_ac=_embed_basis(ac),
                basis_a=_embed_basis(a),
                basis_w=_embed_basis(w),
                exact_ac=[(e.x, e.y) for e in ac.basis()],
                exact_a=[(e.x, e.y) for e in a.basis()],
                exact_w=[(e.x, e.y) for e in w.basis()],
            )
        )
    w1, w2 = F.omega.embeddings()
    g_eps = np.array([[w1, 1.0], [w2, 1.0]])
    if np.linalg.det(g_eps) < 0:
        g_eps = g_eps[::-1].copy()
    e1, e2 = F.eps_plus.embeddings()
    return TorusData(
        n_degree=2,
        disc=F.D,
        prime=p,
        g_eps=g_eps,
        chi_c=chi(c),
        chi_d=chi(d),
        norm_c=c.norm(),
        norm_d=d.norm(),
        classes=classes,
        unit_log=np.array([[math.log(e1), math.log(e2)]]),
        eps_embed=np.array([e1, e2]),
        widths=(1, p),
        ideal_c_hnf=(c.den, c.a, c.b, c.c),
        ideal_cbar_hnf=(cbar.den, cbar.a, cbar.b, cbar.c),
        eps_exact=(F.eps_plus.x, F.eps_plus.y),
    )


def _embed_basis(I):
    a, b = I.basis()
    a1, a2 = a.embeddings()
    b1, b2 = b.embeddings()
    return np.array([[a1, b1], [a2, b2]])


def save(td, path):
    doc = {
        "format": FORMAT_TAG,
        "precision": 17,
        "N": td.n_degree,
        "disc": td.disc,
        "prime": td.prime,
        "g_eps": _mat_str(td.g_eps),
        "chi_c": td.chi_c,
        "chi_d": td.chi_d,
        "norm_c": _frac_str(td.norm_c),
        "norm_d": _frac_str(td.norm_d),
        "unit_log": _mat_str(td.unit_log),
        "eps_embed": [repr(float(x)) for x in td.eps_embed],
        "widths": list(td.widths),
        "ideal_c_hnf": list(td.ideal_c_hnf) if td.ideal_c_hnf else None,
        "ideal_cbar_hnf": list(td.ideal_cbar_hnf) if td.ideal_cbar_hnf else None,
        "eps_exact": [_frac_str(x) for x in td.eps_exact] if td.eps_exact else None,
        "classes": [
            {
                "chi": cd.chi,
                "rep_hnf": list(cd.rep_hnf),
                "norm_a": _frac_str(cd.norm_a),
                "basis_ac": _mat_str(cd.basis_ac),
                "basis_a": _mat_str(cd.basis_a),
                "basis_w": _mat_str(cd.basis_w),
                "exact_ac": _exact_pairs(cd.exact_ac),
                "exact_a": _exact_pairs(cd.exact_a),
                "exact_w": _exact_pairs(cd.exact_w),
            }
            for cd in td.classes
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"not a {FORMAT_TAG} document")
    classes = [
        ClassData(
            chi=int(cd["chi"]),
            rep_hnf=tuple(cd["rep_hnf"]) if cd.get("rep_hnf") else None,
            norm_a=_parse_frac(cd["norm_a"]),
            basis_ac=_parse_mat(cd["basis_ac"]),
            basis_a=_parse_mat(cd["basis_a"]),
            basis_w=_parse_mat(cd["basis_w"]),
            exact_ac=_parse_exact_pairs(cd.get("exact_ac")),
            exact_a=_parse_exact_pairs(cd.get("exact_a")),
            exact_w=_parse_exact_pairs(cd.get("exact_w")),
        )
        for cd in doc["classes"]
    ]
    return TorusData(
        n_degree=int(doc["N"]),
        disc=int(doc["disc"]),
        prime=int(doc["prime"]),
        g_eps=_parse_mat(doc["g_eps"]),
        chi_c=int(doc["chi_c"]),
        chi_d=int(doc["chi_d"]),
        norm_c=_parse_frac(doc["norm_c"]),
        norm_d=_parse_frac(doc["norm_d"]),
        classes=classes,
        unit_log=_parse_mat(doc["unit_log"]),
        eps_embed=np.array([float(x) for x in doc["eps_embed"]]),
        widths=tuple(doc["widths"]),
        ideal_c_hnf=tuple(doc["ideal_c_hnf"]) if doc.get("ideal_c_hnf") else None,
        ideal_cbar_hnf=tuple(doc["ideal_cbar_hnf"]) if doc.get("ideal_cbar_hnf") else None,
        eps_exact=tuple(_parse_frac(x) for x in doc["eps_exact"]) if doc.get("eps_exact") else None,
    )


def validate(td, tol=1e-9):
    """Re-check every structural invariant; returns a list of violation codes."""
    bad = []
    if td.n_degree % 2 != 0:
        bad.append(DEGREE)
    if np.linalg.det(td.g_eps) <= 0:
        bad.append(ORIENTATION)
    sqrt_d = math.sqrt(td.disc)
    for cd in td.classes:
        det_a = abs(np.linalg.det(cd.basis_a))
        if abs(det_a - float(cd.norm_a) * sqrt_d) > tol * max(det_a, 1.0):
            bad.append(DET_NORM)
            break
    for cd in td.classes:
        # sigma(a^-1 d^-1) must be the standard dual of sigma(a)
        dual = np.linalg.inv(cd.basis_a).T
        m1 = np.linalg.solve(cd.basis_w, dual)
        m2 = np.linalg.solve(dual, cd.basis_w)
        if np.max(np.abs(m1 - np.round(m1))) > tol or np.max(np.abs(m2 - np.round(m2))) > tol:
            bad.append(DUALITY)
            break
    if td.chi_c not in (1, -1) or td.chi_d not in (1, -1) or any(
        cd.chi not in (1, -1) for cd in td.classes
    ):
        bad.append(CHAR)
    if td.widths[0] != 1 or td.widths[1] != td.prime:
        bad.append(WIDTHS)
    return bad
