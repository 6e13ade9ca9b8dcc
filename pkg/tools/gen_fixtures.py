"""Generate the committed FCIDUMP fixtures.

Molecules at documented experimental equilibrium geometries; STO-6G
bases re-derived by the published Slater-fit construction (6-31G for the
LiH and HF molecules, see basisgen/opt631g).  Integrals are transformed
to the canonical RHF molecular-orbital basis and written with the
package's canonical FCIDUMP writer.  A JSON sidecar records the
generator's own AO-basis SCF energy as an independent reference.
"""

import json
import os
import sys
import time
import warnings

import numpy as np

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                "..", "src"))

from basisgen import H_631G, SLATER_ZETA, Z_OF, sto_ng_shells
from gto import ANGSTROM, nuclear_repulsion
from scfgen import ao_integrals, rhf

from ccwp.fcidump import FcidumpHeader, IntegralTable, write_fcidump

warnings.filterwarnings("ignore")

OUTDIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..",
                      "fixtures")

# experimental equilibrium geometries (Angstrom), NIST CCCBDB
def water():
    r, theta = 0.9572, np.deg2rad(104.52)
    return [("O", (0.0, 0.0, 0.0)),
            ("H", (r * np.sin(theta / 2), 0.0, r * np.cos(theta / 2))),
            ("H", (-r * np.sin(theta / 2), 0.0, r * np.cos(theta / 2)))]


def ammonia():
    r, hnh = 1.0124, np.deg2rad(106.67)
    sin_b = np.sqrt((1.0 - np.cos(hnh)) * 2.0 / 3.0)
    cos_b = np.sqrt(1.0 - sin_b ** 2)
    out = [("N", (0.0, 0.0, 0.0))]
    for i in range(3):
        phi = 2.0 * np.pi * i / 3.0
        out.append(("H", (r * sin_b * np.cos(phi), r * sin_b * np.sin(phi),
                          r * cos_b)))
    return out


def trigonal(center, rest, r):
    out = [(center, (0.0, 0.0, 0.0))]
    for i in range(3):
        phi = 2.0 * np.pi * i / 3.0
        out.append((rest, (r * np.cos(phi), r * np.sin(phi), 0.0)))
    return out


MOLECULES = {
    "h2_sto6g": ("sto6g", [("H", (0, 0, 0)), ("H", (0, 0, 0.7414))]),
    "lih_631g": ("631g", [("Li", (0, 0, 0)), ("H", (0, 0, 1.5957))]),
    "beh2_sto6g": ("sto6g", [("Be", (0, 0, 0)), ("H", (0, 0, 1.3264)),
                             ("H", (0, 0, -1.3264))]),
    "bh3_sto6g": ("sto6g", trigonal("B", "H", 1.19)),
    "hf_631g": ("631g", [("F", (0, 0, 0)), ("H", (0, 0, 0.9168))]),
    "h2o_sto6g": ("sto6g", water()),
    "nh3_sto6g": ("sto6g", ammonia()),
    "n2_sto6g": ("sto6g", [("N", (0, 0, 0)), ("N", (0, 0, 1.0977))]),
    "co_sto6g": ("sto6g", [("C", (0, 0, 0)), ("O", (0, 0, 1.1283))]),
}


def load_631g(element):
    if element == "H":
        return H_631G
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                        f"basis631g_{element}.json")
    with open(path) as fh:
        data = json.load(fh)
    return [(l, np.array(e), np.array(c)) for l, e, c in data["basis"]]


def build_molecule(geom, basis_kind):
    atoms = []
    shells = []
    for element, xyz in geom:
        xyz_bohr = tuple(x * ANGSTROM for x in xyz)
        idx = len(atoms)
        atoms.append((Z_OF[element], xyz_bohr))
        basis = (sto_ng_shells(element, 6) if basis_kind == "sto6g"
                 else load_631g(element))
        for l, exps, coefs in basis:
            shells.append((idx, l, np.asarray(exps), np.asarray(coefs)))
    return atoms, shells


def mo_fcidump(name, basis_kind, geom):
    atoms, shells = build_molecule(geom, basis_kind)
    S, hcore, eri = ao_integrals(atoms, shells)
    e_nuc = nuclear_repulsion(atoms)
    nelec = sum(z for z, _ in atoms)
    energy, mo_e, C, conv = rhf(S, hcore, eri, nelec // 2, e_nuc, tol=1e-12)
    if not conv:
        raise RuntimeError(f"{name}: AO-basis RHF did not converge")
    h_mo = C.T @ hcore @ C
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, C, C, C, C,
                       optimize=True)
    k = len(C)
    table = IntegralTable(header=FcidumpHeader(norb=k, nelec=nelec),
                          core_energy=float(e_nuc))
    table.h[:] = 0.5 * (h_mo + h_mo.T)
    # canonicalize the transformed tensor under the 8-fold symmetry
    from ccwp.fcidump import canonical_eri_key
    for p in range(1, k + 1):
        for q in range(1, p + 1):
            for r in range(1, k + 1):
                for s in range(1, r + 1):
                    if (p, q) < (r, s):
                        continue
                    val = eri_mo[p - 1, q - 1, r - 1, s - 1]
                    if abs(val) < 1e-14:
                        continue
                    for a, b in ((p, q), (q, p)):
                        for c, d in ((r, s), (s, r)):
                            table.eri[a - 1, b - 1, c - 1, d - 1] = val
                            table.eri[c - 1, d - 1, a - 1, b - 1] = val
    return table, energy, mo_e, atoms


def main(names):
    os.makedirs(OUTDIR, exist_ok=True)
    for name in names:
        basis_kind, geom = MOLECULES[name]
        t0 = time.time()
        table, e_scf, mo_e, atoms = mo_fcidump(name, basis_kind, geom)
        with open(os.path.join(OUTDIR, f"{name}.fcidump"), "w") as fh:
            fh.write(write_fcidump(table))
        with open(os.path.join(OUTDIR, f"{name}.xyz"), "w") as fh:
            fh.write(f"{len(geom)}\n{name}: documented equilibrium geometry (Angstrom)\n")
            for element, xyz in geom:
                fh.write(f"{element} {xyz[0]:.6f} {xyz[1]:.6f} {xyz[2]:.6f}\n")
        meta = {
            "name": name,
            "basis": basis_kind,
            "generator_scf_energy": float(e_scf),
            "orbital_energies": [float(x) for x in mo_e],
            "norb": table.norb,
            "nelec": table.nelec,
        }
        with open(os.path.join(OUTDIR, f"{name}.json"), "w") as fh:
            json.dump(meta, fh, indent=1)
        print(f"{name}: K={table.norb} N={table.nelec} "
              f"E_SCF={e_scf:.8f}  ({time.time() - t0:.0f} s)")


if __name__ == "__main__":
    main(sys.argv[1:] or list(MOLECULES))
