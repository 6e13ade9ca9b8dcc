"""Restricted Hartree-Fock in the orthonormal FCIDUMP orbital basis.

The overlap is the identity by construction, so the Roothaan step is a
plain symmetric diagonalization.  DIIS on the Fock-density commutator
with a damping fallback; core-Hamiltonian initial guess.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .fcidump import FcidumpHeader, IntegralTable, canonical_eri_key

__all__ = ["ScfState", "build_fock_matrix", "run_scf", "mo_transform"]


@dataclass
class ScfState:
    coeffs: np.ndarray             # (K, K) orthogonal MO coefficients
    orbital_energies: np.ndarray   # ascending
    hf_energy: float
    converged: bool
    iterations: int
    commutator: float              # max-abs FD - DF at the last step


def build_fock_matrix(density, table):
    """Closed-shell Fock matrix F = h + sum_rs D_rs [(pq|rs) - (pr|qs)/2]."""
    density = np.asarray(density, dtype=float)
    k = table.norb
    if density.shape != (k, k):
        raise ValueError("density dimension mismatch")
    coul = np.einsum("pqrs,rs->pq", table.eri, density)
    exch = np.einsum("prqs,rs->pq", table.eri, density)
    F = table.h + coul - 0.5 * exch
    return 0.5 * (F + F.T)


def _density_from(fock, nocc):
    energies, vecs = scipy.linalg.eigh(fock)
    occ = vecs[:, :nocc]
    return 2.0 * occ @ occ.T, energies, vecs


def run_scf(table, max_iter=200, conv_tol=1e-10, diis_depth=8,
            initial_density=None):
    """Roothaan iteration with DIIS; returns an ScfState (never raises on
    plain non-convergence, only on structural problems)."""
    nelec = table.nelec
    if nelec % 2:
        raise ValueError("run_scf requires an even electron count")
    nocc = nelec // 2
    if nocc > table.norb:
        raise ValueError("more electron pairs than orbitals")

    if initial_density is None:
        D, _, _ = _density_from(table.h, nocc)
    else:
        D = np.asarray(initial_density, dtype=float).copy()

    diis_F, diis_R = [], []
    energy = np.inf
    oscillating = False
    converged = False
    it = 0
    commutator = np.inf
    for it in range(1, max_iter + 1):
        F = build_fock_matrix(D, table)
        energy_new = 0.5 * np.sum(D * (table.h + F)) + table.core_energy
        resid = F @ D - D @ F
        commutator = float(np.max(np.abs(resid)))

        diis_F.append(F)
        diis_R.append(resid)
        if len(diis_F) > diis_depth:
            diis_F.pop(0)
            diis_R.pop(0)
        F_eff = F
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
                F_eff = sum(wi * Fi for wi, Fi in zip(w, diis_F))
            except np.linalg.LinAlgError:
                diis_F, diis_R = [F], [resid]

        D_new, energies, vecs = _density_from(F_eff, nocc)
        delta = float(np.max(np.abs(D_new - D)))
        if energy_new > energy + 1e-9 and len(diis_F) < 3:
            oscillating = True
        if oscillating:
            D_new = 0.7 * D_new + 0.3 * D
        D = D_new
        energy = energy_new
        if delta < conv_tol:
            converged = True
            break

    F = build_fock_matrix(D, table)
    energies, vecs = scipy.linalg.eigh(F)
    hf_energy = 0.5 * np.sum(D * (table.h + F)) + table.core_energy
    commutator = float(np.max(np.abs(F @ D - D @ F)))
    if nocc < table.norb and converged:
        gap = energies[nocc] - energies[nocc - 1]
        if gap < 1e-8:
            raise ValueError(
                f"degenerate HOMO at the Aufbau boundary (gap {gap:.2e})")
    return ScfState(coeffs=vecs, orbital_energies=energies,
                    hf_energy=float(hf_energy), converged=converged,
                    iterations=it, commutator=commutator)


def mo_transform(table, coeffs):
    """Rotate the integral table into the (orthogonal) orbital basis."""
    C = np.asarray(coeffs, dtype=float)
    k = table.norb
    gram = C.T @ C
    if np.max(np.abs(gram - np.eye(k))) > 1e-8:
        raise ValueError("transformation coefficients are not orthogonal")
    h_mo = C.T @ table.h @ C
    eri_mo = np.einsum("pqrs,pi,qj,rk,sl->ijkl", table.eri, C, C, C, C,
                       optimize=True)
    out = IntegralTable(header=FcidumpHeader(
        norb=k, nelec=table.nelec, ms2=table.header.ms2,
        orbsym=table.header.orbsym, isym=table.header.isym),
        core_energy=table.core_energy)
    out.h[:] = 0.5 * (h_mo + h_mo.T)
    # enforce exact 8-fold symmetry by canonical-representative assignment
    for p in range(k):
        for q in range(p + 1):
            for r in range(k):
                for s in range(r + 1):
                    if (p, q) < (r, s):
                        continue
                    val = eri_mo[p, q, r, s]
                    for a, b in ((p, q), (q, p)):
                        for c, d in ((r, s), (s, r)):
                            out.eri[a, b, c, d] = val
                            out.eri[c, d, a, b] = val
    return out
