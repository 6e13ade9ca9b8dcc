import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ccwp.fcidump import (FcidumpError, FcidumpHeader, IntegralTable,
                          integral_lookup, parse_fcidump, spin_orbital_transform,
                          write_fcidump)
from conftest import random_table

MINIMAL = "&FCI NORB=1,NELEC=2,MS2=0,\n ORBSYM=1,\n ISYM=1,\n&END\n" \
          " 0.5 0 0 0 0\n"


def test_minimal_core_only_file():
    t = parse_fcidump(MINIMAL)
    assert t.header.norb == 1 and t.header.nelec == 2
    assert t.core_energy == 0.5
    assert not t.h.any() and not t.eri.any()


def test_fortran_d_exponent():
    t = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0 /\n1.0D-01 2 1 0 0\n")
    assert t.h[1, 0] == pytest.approx(0.1) and t.h[0, 1] == pytest.approx(0.1)


def test_header_variants_and_errors():
    parse_fcidump("&FCI NORB=2,NELEC=2 &END\n0.0 0 0 0 0\n")
    with pytest.raises(FcidumpError):
        parse_fcidump("&FCI NELEC=2 /\n")
    with pytest.raises(FcidumpError):
        parse_fcidump("&FCI NORB=2,NELEC=2,MS2=2 /\n")      # open shell
    with pytest.raises(FcidumpError):
        parse_fcidump("&FCI NORB=2,NELEC=2 /\n1.0 3 1 0 0\n")  # out of range
    with pytest.raises(FcidumpError):
        parse_fcidump("&FCI NORB=2,NELEC=2 /\nxyz 1 1 0 0\n")  # bad value
    with pytest.raises(FcidumpError):
        parse_fcidump("&FCI NORB=2,NELEC=2 /\n1.0 1 0 1 0\n")  # bad pattern


def test_duplicate_record_last_wins_with_warning():
    text = "&FCI NORB=2,NELEC=2 /\n1.0 1 1 0 0\n2.0 1 1 0 0\n"
    with pytest.warns(UserWarning):
        t = parse_fcidump(text)
    assert t.h[0, 0] == 2.0


def test_lookup_patterns():
    t = random_table(3, 4)
    assert integral_lookup(t, 0, 0, 0, 0) == t.core_energy
    assert integral_lookup(t, 1, 2, 3, 3) == integral_lookup(t, 3, 3, 2, 1)
    assert integral_lookup(t, 2, 1, 0, 0) == integral_lookup(t, 1, 2, 0, 0)
    with pytest.raises(FcidumpError):
        integral_lookup(t, 1, 0, 1, 0)
    with pytest.raises(FcidumpError):
        integral_lookup(t, 0, 1, 1, 1)


def test_eightfold_symmetry_exact():
    t = random_table(4, 4, seed=3)
    rng = np.random.default_rng(1)
    for _ in range(200):
        p, q, r, s = rng.integers(1, 5, size=4)
        v = integral_lookup(t, p, q, r, s)
        assert v == integral_lookup(t, q, p, r, s)
        assert v == integral_lookup(t, p, q, s, r)
        assert v == integral_lookup(t, r, s, p, q)
        assert v == integral_lookup(t, s, r, q, p)


def test_roundtrip_structural_and_byte_identical():
    t = random_table(3, 4, seed=11)
    text = write_fcidump(t)
    t2 = parse_fcidump(text)
    assert t2 == t
    assert write_fcidump(t2) == text          # double round-trip, byte level


def test_write_minimal_core_record():
    t = IntegralTable(header=FcidumpHeader(norb=1, nelec=2), core_energy=0.5)
    out = write_fcidump(t)
    assert out.splitlines()[-1].split() == [f"{0.5:23.16E}".strip(), "0", "0", "0", "0"]
    assert "E+00" in out.splitlines()[-1].replace("E-01", "E+00") or "E-" in out


@given(st.integers(1, 4), st.integers(0, 2 ** 31 - 1))
@settings(max_examples=25, deadline=None)
def test_roundtrip_property(norb, seed):
    t = random_table(norb, min(2 * norb, 2), seed=seed)
    assert parse_fcidump(write_fcidump(t)) == t


def test_spin_transform_antisymmetry(toy_table):
    so = spin_orbital_transform(toy_table)
    assert so.n_spin == 6
    rng = np.random.default_rng(5)
    idx = rng.integers(0, so.n_spin, size=(1000, 4))
    v = so.eri_anti[idx[:, 0], idx[:, 1], idx[:, 2], idx[:, 3]]
    swapped = so.eri_anti[idx[:, 1], idx[:, 0], idx[:, 2], idx[:, 3]]
    assert np.array_equal(v, -swapped)
    swapped2 = so.eri_anti[idx[:, 0], idx[:, 1], idx[:, 3], idx[:, 2]]
    assert np.array_equal(v, -swapped2)
    herm = so.eri_anti[idx[:, 2], idx[:, 3], idx[:, 0], idx[:, 1]]
    assert np.allclose(v, herm)


def test_spin_transform_hubbard_like():
    # one spatial orbital with (11|11)=U: <12||12> = U, <11||11> = 0
    t = IntegralTable(header=FcidumpHeader(norb=1, nelec=2))
    t.eri[0, 0, 0, 0] = 0.7
    so = spin_orbital_transform(t)
    assert so.eri_anti[0, 1, 0, 1] == pytest.approx(0.7)
    assert so.eri_anti[0, 0, 0, 0] == 0.0


def test_spin_transform_brute_force(toy_table):
    so = spin_orbital_transform(toy_table)
    t = toy_table

    def spatial(s):
        return (s + 1) // 2 - 1

    def spin(s):
        return s % 2

    rng = np.random.default_rng(9)
    for _ in range(300):
        p, q, r, s = (int(x) for x in rng.integers(1, 7, size=4))
        coul = 0.0
        exch = 0.0
        if spin(p) == spin(r) and spin(q) == spin(s):
            coul = t.eri[spatial(p), spatial(r), spatial(q), spatial(s)]
        if spin(p) == spin(s) and spin(q) == spin(r):
            exch = t.eri[spatial(p), spatial(s), spatial(q), spatial(r)]
        assert so.eri_anti[p - 1, q - 1, r - 1, s - 1] == pytest.approx(coul - exch, abs=1e-15)
