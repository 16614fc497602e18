import math

import numpy as np
import pytest

from eislift.lattice import (
    ExpWeight,
    TraceLattice,
    beta0_weight,
    dual_different_lattice,
    mixed_sign_trace,
    totally_positive_trace,
)
from eislift.field_data import export_n2
from eislift.qfield import make_field


def dinv_lattice(D):
    F = make_field(D)
    return F, TraceLattice.from_ideal(F, F.different.inverse())


def naive_scan(basis, n, box, tol=1e-9):
    """Brute-force coefficient box scan oracle."""
    pts = []
    for a in range(-box, box + 1):
        for b in range(-box, box + 1):
            v = basis @ np.array([a, b], dtype=float)
            if np.all(v > tol) and abs(v.sum() - n) < tol:
                pts.append((a, b))
    return sorted(pts)


def test_d12_trace_one_three_points():
    F, lat = dinv_lattice(12)
    pts = totally_positive_trace(lat, 1)
    assert len(pts) == 3
    elems = [p.elem for p in pts]
    # nu = 1/2 + a/(2 sqrt 3), a in {-1, 0, 1}
    from fractions import Fraction

    want = {F.element(Fraction(1, 2), Fraction(-1, 6)), F.element(Fraction(1, 2), 0),
            F.element(Fraction(1, 2), Fraction(1, 6))}
    assert set(elems) == want


def test_d12_trace_two_seven_points():
    _, lat = dinv_lattice(12)
    assert len(totally_positive_trace(lat, 2)) == 7


def test_trace_zero_or_negative_empty():
    _, lat = dinv_lattice(12)
    assert totally_positive_trace(lat, 0) == []
    assert totally_positive_trace(lat, -3) == []


def test_exact_matches_naive_scan():
    rng = np.random.default_rng(20)
    for D in (12, 24, 40):
        F, lat = dinv_lattice(D)
        for _ in range(7):
            n = int(rng.integers(1, 8))
            exact = totally_positive_trace(lat, n)
            brute = naive_scan(lat.basis, n, box=24 * n)
            assert sorted(p.coeffs for p in exact) == brute
            for p in exact:
                assert p.elem.trace() == n
                assert p.elem.is_totally_positive()


def test_float_path_matches_exact():
    for D in (12, 24, 40):
        F, lat = dinv_lattice(D)
        latf = TraceLattice(basis=lat.basis.copy())
        for n in (1, 2, 3, 5):
            assert len(totally_positive_trace(latf, n)) == len(totally_positive_trace(lat, n))


def test_point_count_growth_slope():
    # |points(n)| should grow like n^(N-1) = n for N=2
    _, lat = dinv_lattice(12)
    ns = np.arange(4, 40, 4)
    counts = np.array([len(totally_positive_trace(lat, int(n))) for n in ns])
    slope = np.polyfit(np.log(ns), np.log(counts), 1)[0]
    assert abs(slope - 1.0) < 0.3


def test_mixed_sign_infinite_family_truncates():
    _, lat = dinv_lattice(12)
    pts, tail, cutoff = mixed_sign_trace(lat, 0, 1, 1e-9, beta0_weight(1.0))
    assert tail < 1e-9
    assert cutoff > 0
    assert len(pts) >= 3
    for p in pts:
        assert p.elem.trace() == 0
        assert p.elem.sign_embedding(1) == -1
        assert p.elem.sign_embedding(0) == 1


def test_mixed_sign_monotone_in_eps():
    _, lat = dinv_lattice(12)
    for n in (-1, 0, 2):
        a, _, _ = mixed_sign_trace(lat, n, 0, 1e-8, beta0_weight(0.7))
        b, _, _ = mixed_sign_trace(lat, n, 0, 1e-9, beta0_weight(0.7))
        assert len(b) >= len(a)
        assert {p.elem for p in a} <= {p.elem for p in b}


def test_mixed_sign_count_matches_box_scan():
    _, lat = dinv_lattice(12)
    pts, _, cutoff = mixed_sign_trace(lat, 0, 1, 1e-12, beta0_weight(1.0))
    # direct box scan with the same cutoff
    count = 0
    for a in range(-300, 301):
        for b in range(-300, 301):
            v = lat.basis @ np.array([a, b], dtype=float)
            if v[0] > 1e-12 and v[1] < -1e-12 and abs(v.sum()) < 1e-9 and abs(v[1]) <= cutoff:
                count += 1
    assert count == len(pts)


def test_weight_must_decay():
    with pytest.raises(ValueError):
        ExpWeight(rate=0.0)
    _, lat = dinv_lattice(12)
    with pytest.raises(ValueError):
        mixed_sign_trace(lat, 0, 1, 1e-9, ExpWeight(rate=-1.0))


def test_dual_different_lattice():
    F = make_field(12)
    chi = F.totally_odd_characters()[0]
    td = export_n2(F, chi, F.principal(F.element(4, 1)), 13)
    lat = dual_different_lattice(td, 0)
    # principal class: sigma(d^-1), dual to sigma(O) under the trace form
    gram = lat.basis.T @ td.classes[0].basis_a
    assert np.max(np.abs(gram - np.round(gram))) < 1e-9
    with pytest.raises(IndexError):
        dual_different_lattice(td, 2)
