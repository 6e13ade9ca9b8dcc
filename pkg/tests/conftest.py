import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from ccwp.fcidump import FcidumpHeader, IntegralTable, canonical_eri_key

FIXDIR = os.path.join(os.path.dirname(__file__), "..", "fixtures")


def fixture_path(name):
    return os.path.join(FIXDIR, name)


def random_table(norb, nelec, seed=0, core=0.5):
    """Random symmetric integral table (not physical, but well-formed)."""
    rng = np.random.default_rng(seed)
    table = IntegralTable(header=FcidumpHeader(norb=norb, nelec=nelec),
                          core_energy=core)
    h = rng.normal(size=(norb, norb))
    table.h[:] = 0.5 * (h + h.T)
    seen = set()
    for p in range(1, norb + 1):
        for q in range(1, p + 1):
            for r in range(1, norb + 1):
                for s in range(1, r + 1):
                    key = canonical_eri_key(p, q, r, s)
                    if key in seen:
                        continue
                    seen.add(key)
                    val = rng.normal()
                    for a, b, c, d in _eightfold(key):
                        table.eri[a - 1, b - 1, c - 1, d - 1] = val
    return table


def _eightfold(key):
    p, q, r, s = key
    return {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
            (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}


@pytest.fixture(scope="session")
def toy_table():
    """4-electron, 3-orbital random-but-symmetric table (JW-oracle sized)."""
    return random_table(3, 4, seed=7)
