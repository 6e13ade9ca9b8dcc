"""Re-derive split-valence (6/3-1, sp-shared) basis sets by atomic SCF.

Protocol per exponent set: solve the atom in the uncontracted primitive
basis with (spherically averaged) fractional occupations, extract
segmented contraction coefficients from the atomic orbitals, then score
the contracted-basis SCF energy.  Exponents are optimized by Nelder-Mead.

Run as a script; writes JSON next to this file.  Used once to produce
the committed fixture bases for Li and F (and to validate the protocol
against the published hydrogen 6-31G set).
"""

import json
import sys
import time
import warnings

import numpy as np
from scipy.optimize import minimize

from basisgen import _radial_overlap, _gto_radial, _sto_radial, SLATER_ZETA
from scfgen import ao_integrals, uhf

warnings.filterwarnings("ignore")

ATOMS = {
    # element: (Z, (n_alpha, n_beta), #core s prims)
    "Li": (3, (2, 1), 6),
    "F": (9, (5, 4), 6),
}


def _uncontracted(z, s_exps, p_exps):
    shells = [(0, 0, np.array([a]), np.array([1.0])) for a in s_exps]
    shells += [(0, 1, np.array([a]), np.array([1.0])) for a in p_exps]
    atoms = [(z, (0.0, 0.0, 0.0))]
    return atoms, shells


def _fit_p_to_sto(exps, zeta):
    """Overlap-fit p contraction on fixed exponents to a 2p Slater(zeta)."""
    sto = _norm_scaled_2p(zeta)
    gs = [_gto_radial(a, 1) for a in exps]
    s = np.array([_radial_overlap(sto, g) for g in gs])
    S = np.array([[_radial_overlap(gi, gj) for gj in gs] for gi in gs])
    c = np.linalg.solve(S, s)
    return c / np.sqrt(c @ S @ c)


def _norm_scaled_2p(zeta):
    base = _sto_radial(2)
    # R(zeta; r) = zeta^{3/2} R(1; zeta r)
    return lambda r: zeta ** 1.5 * base(zeta * r)


def objective(log_exps, element, return_basis=False):
    z, occs, ncore = ATOMS[element]
    exps = np.exp(log_exps)
    s_exps = exps[:ncore + 4]
    sp_exps = exps[ncore:ncore + 4]          # inner 3 + outer 1, shared s/p
    if np.any(exps <= 1e-4) or np.any(exps > 5e5):
        return 1e6
    try:
        atoms, shells = _uncontracted(z, s_exps, sp_exps)
        S, h, eri = ao_integrals(atoms, shells)
        E, (ea, eb), (Ca, Cb), conv = uhf(S, h, eri, occs[0], occs[1], 0.0)
        if not conv:
            return 1e6
        ns = len(s_exps)
        # alpha AOs: 1s -> core contraction, 2s -> inner-s contraction
        core_c = Ca[:ncore, 0]
        inner_s = Ca[ncore:ncore + 3, 1]
        if element == "F":
            # strongest-p alpha MO, components on the inner three p shells
            pw = np.abs(Ca[ns, :]) + np.abs(Ca[ns + 3, :]) + np.abs(Ca[ns + 6, :])
            pcol = int(np.argmax(pw[:occs[0]]))
            comp = int(np.argmax([np.abs(Ca[ns + d, pcol]) for d in range(3)]))
            pz = Ca[[ns + comp, ns + 3 + comp, ns + 6 + comp], pcol]
            inner_p = pz / np.linalg.norm(pz)
        else:
            inner_p = _fit_p_to_sto(sp_exps[:3], SLATER_ZETA[element][1])

        basis = [
            (0, s_exps[:ncore].tolist(), (core_c / np.linalg.norm(core_c)).tolist()),
            (0, sp_exps[:3].tolist(), (inner_s / np.linalg.norm(inner_s)).tolist()),
            (0, [sp_exps[3]], [1.0]),
            (1, sp_exps[:3].tolist(), np.asarray(inner_p).tolist()),
            (1, [sp_exps[3]], [1.0]),
        ]
        # contract the uncontracted integrals instead of re-evaluating
        n_unc = len(s_exps) + 3 * 4
        M = np.zeros((n_unc, 9))
        M[:ncore, 0] = basis[0][2]
        M[ncore:ncore + 3, 1] = basis[1][2]
        M[ncore + 3, 2] = 1.0
        for comp in range(3):
            rows = [ns + 3 * k + comp for k in range(3)]
            M[rows, 3 + comp] = basis[3][2]
            M[ns + 9 + comp, 6 + comp] = 1.0
        norms = np.sqrt(np.einsum("pi,pq,qi->i", M, S, M))
        M = M / norms
        S2 = M.T @ S @ M
        h2 = M.T @ h @ M
        eri2 = np.einsum("pqrs,pi,qj,rk,sl->ijkl", eri, M, M, M, M, optimize=True)
        E2, _, _, conv2 = uhf(S2, h2, eri2, occs[0], occs[1], 0.0)
        if not conv2:
            return 1e6
    except Exception:
        return 1e6
    if return_basis:
        return E2, basis
    return E2


STARTS = {
    "Li": np.array([640.0, 96.0, 22.0, 6.2, 1.9, 0.64, 2.4, 0.62, 0.079, 0.036]),
    "F": np.array([7000.0, 1050.0, 239.0, 74.0, 27.0, 10.5, 43.0, 9.9, 2.8, 0.36]),
}


def run(element):
    t0 = time.time()
    x0 = np.log(STARTS[element])
    res = minimize(objective, x0, args=(element,), method="Nelder-Mead",
                   options={"xatol": 1e-8, "fatol": 1e-10,
                            "maxiter": 4000, "maxfev": 4000})
    res = minimize(objective, res.x, args=(element,), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-11,
                            "maxiter": 2000, "maxfev": 2000})
    energy, basis = objective(res.x, element, return_basis=True)
    out = {"element": element, "scf_energy": energy, "basis": basis,
           "seconds": time.time() - t0}
    with open(f"basis631g_{element}.json", "w") as fh:
        json.dump(out, fh, indent=1)
    print(element, "E =", energy, "t = %.0f s" % out["seconds"])


if __name__ == "__main__":
    for element in sys.argv[1:] or ["Li", "F"]:
        run(element)
