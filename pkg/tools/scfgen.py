"""AO-basis SCF used only by the fixture generator.

Closed-shell RHF with DIIS for molecules; fractional-occupation RHF for
the open-shell atoms that appear during split-valence basis optimization.
Independent of the ccwp package's own orthonormal-basis SCF.
"""

import numpy as np
import scipy.linalg

from gto import (build_basis, overlap_matrix, kinetic_matrix, nuclear_matrix,
                 eri_tensor, nuclear_repulsion)


def ao_integrals(atoms, shells):
    funcs = build_basis(atoms, shells)
    S = overlap_matrix(funcs)
    hcore = kinetic_matrix(funcs) + nuclear_matrix(funcs, atoms)
    eri = eri_tensor(funcs)
    return S, hcore, eri


def rhf(S, hcore, eri, nocc_or_occs, e_nuc=0.0, max_iter=400, tol=1e-10, damp=0.35):
    """Generalized-eigenproblem RHF.  nocc_or_occs: int or per-MO occupations."""
    n = S.shape[0]
    X = scipy.linalg.fractional_matrix_power(S, -0.5).real

    def density(F):
        e, C = scipy.linalg.eigh(X.T @ F @ X)
        C = X @ C
        if np.isscalar(nocc_or_occs):
            occ = np.zeros(n)
            occ[:nocc_or_occs] = 2.0
        else:
            occ = np.zeros(n)
            occ[:len(nocc_or_occs)] = nocc_or_occs
        D = (C * occ) @ C.T
        return D, e, C

    D, mo_e, C = density(hcore)
    energy = 0.0
    diis_F, diis_R = [], []
    for it in range(max_iter):
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        F = hcore + J - 0.5 * K
        energy_new = 0.5 * np.sum(D * (hcore + F)) + e_nuc

        resid = F @ D @ S - S @ D @ F
        diis_F.append(F)
        diis_R.append(resid)
        if len(diis_F) > 8:
            diis_F.pop(0)
            diis_R.pop(0)
        if len(diis_F) > 1:
            m = len(diis_F)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    B[i, j] = np.sum(diis_R[i] * diis_R[j])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(B, rhs)[:m]
                F = sum(wi * Fi for wi, Fi in zip(w, diis_F))
            except np.linalg.LinAlgError:
                pass

        D_new, mo_e, C = density(F)
        dmax = np.max(np.abs(D_new - D))
        if it < 8 and len(diis_F) < 2:
            D_new = (1 - damp) * D_new + damp * D
        D = D_new
        if dmax < tol and abs(energy_new - energy) < tol * 100:
            return energy_new, mo_e, C, True
        energy = energy_new
    return energy, mo_e, C, False


def uhf(S, hcore, eri, nalpha, nbeta, e_nuc=0.0, max_iter=600, tol=1e-8, damp=0.4):
    """Unrestricted SCF via damped fixed-point iteration with MOM occupation.

    Maximum-overlap occupation pins the symmetry-broken hole among
    degenerate orbitals; plain damping is robust for the small atomic
    bases this generator optimizes.
    """
    X = scipy.linalg.fractional_matrix_power(S, -0.5).real

    def density(F, nocc, D_prev=None):
        e, C = scipy.linalg.eigh(X.T @ F @ X)
        C = X @ C
        if D_prev is not None:
            weight = np.einsum("pi,pq,qr,rs,si->i", C, S, D_prev, S, C)
            occ_idx = np.sort(np.argsort(-weight)[:nocc])
        else:
            occ_idx = np.arange(nocc)
        D = C[:, occ_idx] @ C[:, occ_idx].T
        return D, e, C

    Da, ea, Ca = density(hcore, nalpha)
    Db, eb, Cb = density(hcore, nbeta)
    energy = 0.0
    for it in range(max_iter):
        J = np.einsum("pqrs,rs->pq", eri, Da + Db)
        Fa = hcore + J - np.einsum("prqs,rs->pq", eri, Da)
        Fb = hcore + J - np.einsum("prqs,rs->pq", eri, Db)
        energy_new = 0.5 * (np.sum((Da + Db) * hcore) + np.sum(Da * Fa)
                            + np.sum(Db * Fb)) + e_nuc
        mom = it >= 3
        Da_new, ea, Ca = density(Fa, nalpha, Da if mom else None)
        Db_new, eb, Cb = density(Fb, nbeta, Db if mom else None)
        dmax = max(np.max(np.abs(Da_new - Da)), np.max(np.abs(Db_new - Db)))
        Da = (1 - damp) * Da_new + damp * Da
        Db = (1 - damp) * Db_new + damp * Db
        if dmax < tol and abs(energy_new - energy) < 1e-10:
            return energy_new, (ea, eb), (Ca, Cb), True
        energy = energy_new
    return energy, (ea, eb), (Ca, Cb), False
