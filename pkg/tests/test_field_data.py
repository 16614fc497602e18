import numpy as np
import pytest

from eislift.field_data import (
    DUALITY,
    ORIENTATION,
    export_n2,
    load,
    save,
    validate,
)
from eislift.qfield import make_field


@pytest.fixture(scope="module")
def F12():
    return make_field(12)


@pytest.fixture(scope="module")
def td(F12):
    chi = F12.totally_odd_characters()[0]
    c = F12.principal(F12.element(4, 1))
    return export_n2(F12, chi, c, 13)


def test_export_basic_structure(td):
    assert td.n_degree == 2
    assert td.h_plus == 2
    assert td.norm_c == 13
    assert td.norm_d == 12
    assert td.chi_c == 1 and td.chi_d == -1
    assert td.widths == (1, 13)
    assert validate(td) == []


def test_export_with_unit_ideal_c(F12):
    chi = F12.totally_odd_characters()[0]
    td = export_n2(F12, chi, F12.unit_ideal, 13)
    assert td.norm_c == 1
    assert td.chi_c == 1
    assert validate(td) == []


def test_export_rejects_non_divisor(F12):
    chi = F12.totally_odd_characters()[0]
    with pytest.raises(ValueError):
        export_n2(F12, chi, F12.principal(F12.element(5)), 13)


def test_round_trip(tmp_path, td):
    path = tmp_path / "d12.json"
    save(td, path)
    td2 = load(path)
    assert validate(td2) == []
    assert np.array_equal(td.g_eps, td2.g_eps)
    assert np.array_equal(td.unit_log, td2.unit_log)
    assert td.norm_c == td2.norm_c
    for a, b in zip(td.classes, td2.classes):
        assert np.array_equal(a.basis_ac, b.basis_ac)
        assert np.array_equal(a.basis_w, b.basis_w)
        assert a.exact_w == b.exact_w
        assert a.chi == b.chi
    # byte-stable re-save
    path2 = tmp_path / "d12b.json"
    save(td2, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_validate_flags_orientation(tmp_path, td):
    path = tmp_path / "d12.json"
    save(td, path)
    bad = load(path)
    bad.g_eps = bad.g_eps[::-1].copy()
    assert ORIENTATION in validate(bad)


def test_validate_flags_duality(tmp_path, td):
    path = tmp_path / "d12.json"
    save(td, path)
    bad = load(path)
    bad.classes[0].basis_w = bad.classes[0].basis_w * 1.001
    assert DUALITY in validate(bad)


def test_cbar_is_conjugate(td, F12):
    assert td.ideal_cbar() == F12.principal(F12.element(4, -1))
    assert td.ideal_cbar().norm() == 13


def test_character_reconstruction(td):
    chi = td.character()
    assert chi.values == (1, -1)
