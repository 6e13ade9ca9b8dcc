"""Minimal McMurchie-Davidson Gaussian integral engine (s/p/d... general L).

Standalone fixture-generation support; the ccwp package itself never
evaluates Gaussian integrals.  All lengths in Bohr, energies in Hartree.
"""

import numpy as np
from scipy.special import hyp1f1

ANGSTROM = 1.0 / 0.529177210903

_CART = {
    0: [(0, 0, 0)],
    1: [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
}


def _dfact(n):
    # (2k-1)!! with the empty-product convention
    out = 1
    for i in range(n, 1, -2):
        out *= i
    return out


def prim_norm(a, lmn):
    l, m, n = lmn
    L = l + m + n
    return ((2 * a / np.pi) ** 0.75 * (4 * a) ** (L / 2)
            / np.sqrt(_dfact(2 * l - 1) * _dfact(2 * m - 1) * _dfact(2 * n - 1)))


def boys(m, x):
    return hyp1f1(m + 0.5, m + 1.5, -x) / (2.0 * m + 1.0)


def _E(i, j, t, Qx, a, b):
    """Hermite expansion coefficient for 1D Gaussian product."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-q * Qx * Qx)
    if j == 0:
        return (_E(i - 1, j, t - 1, Qx, a, b) / (2 * p)
                - q * Qx / a * _E(i - 1, j, t, Qx, a, b)
                + (t + 1) * _E(i - 1, j, t + 1, Qx, a, b))
    return (_E(i, j - 1, t - 1, Qx, a, b) / (2 * p)
            + q * Qx / b * _E(i, j - 1, t, Qx, a, b)
            + (t + 1) * _E(i, j - 1, t + 1, Qx, a, b))


def _overlap_prim(a, lmn1, A, b, lmn2, B):
    p = a + b
    out = 1.0
    for d in range(3):
        out *= _E(lmn1[d], lmn2[d], 0, A[d] - B[d], a, b)
    return out * (np.pi / p) ** 1.5


def _kinetic_prim(a, lmn1, A, b, lmn2, B):
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * _overlap_prim(a, lmn1, A, b, lmn2, B)
    term1 = -2 * b * b * (
        _overlap_prim(a, lmn1, A, b, (l2 + 2, m2, n2), B)
        + _overlap_prim(a, lmn1, A, b, (l2, m2 + 2, n2), B)
        + _overlap_prim(a, lmn1, A, b, (l2, m2, n2 + 2), B))
    term2 = -0.5 * (
        l2 * (l2 - 1) * _overlap_prim(a, lmn1, A, b, (l2 - 2, m2, n2), B)
        + m2 * (m2 - 1) * _overlap_prim(a, lmn1, A, b, (l2, m2 - 2, n2), B)
        + n2 * (n2 - 1) * _overlap_prim(a, lmn1, A, b, (l2, m2, n2 - 2), B))
    return term0 + term1 + term2


def _R(t, u, v, n, p, PC, cache):
    key = (t, u, v, n)
    if key in cache:
        return cache[key]
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        val = (-2.0 * p) ** n * boys(n, p * (PC[0] ** 2 + PC[1] ** 2 + PC[2] ** 2))
    elif t > 0:
        val = ((t - 1) * _R(t - 2, u, v, n + 1, p, PC, cache)
               + PC[0] * _R(t - 1, u, v, n + 1, p, PC, cache))
    elif u > 0:
        val = ((u - 1) * _R(t, u - 2, v, n + 1, p, PC, cache)
               + PC[1] * _R(t, u - 1, v, n + 1, p, PC, cache))
    else:
        val = ((v - 1) * _R(t, u, v - 2, n + 1, p, PC, cache)
               + PC[2] * _R(t, u, v - 1, n + 1, p, PC, cache))
    cache[key] = val
    return val


def _nuclear_prim(a, lmn1, A, b, lmn2, B, C):
    p = a + b
    P = (a * np.asarray(A) + b * np.asarray(B)) / p
    PC = P - np.asarray(C)
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    cache = {}
    val = 0.0
    for t in range(l1 + l2 + 1):
        Et = _E(l1, l2, t, A[0] - B[0], a, b)
        for u in range(m1 + m2 + 1):
            Eu = _E(m1, m2, u, A[1] - B[1], a, b)
            for v in range(n1 + n2 + 1):
                Ev = _E(n1, n2, v, A[2] - B[2], a, b)
                val += Et * Eu * Ev * _R(t, u, v, 0, p, PC, cache)
    return 2 * np.pi / p * val


def _eri_prim(a, lmn1, A, b, lmn2, B, c, lmn3, C, d, lmn4, D):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = (a * np.asarray(A) + b * np.asarray(B)) / p
    Q = (c * np.asarray(C) + d * np.asarray(D)) / q
    PQ = P - Q
    l1, m1, n1 = lmn1
    l2, m2, n2 = lmn2
    l3, m3, n3 = lmn3
    l4, m4, n4 = lmn4
    cache = {}
    val = 0.0
    for t in range(l1 + l2 + 1):
        E1t = _E(l1, l2, t, A[0] - B[0], a, b)
        for u in range(m1 + m2 + 1):
            E1u = _E(m1, m2, u, A[1] - B[1], a, b)
            for v in range(n1 + n2 + 1):
                E1v = _E(n1, n2, v, A[2] - B[2], a, b)
                e1 = E1t * E1u * E1v
                if e1 == 0.0:
                    continue
                for tau in range(l3 + l4 + 1):
                    E2t = _E(l3, l4, tau, C[0] - D[0], c, d)
                    for nu in range(m3 + m4 + 1):
                        E2u = _E(m3, m4, nu, C[1] - D[1], c, d)
                        for phi in range(n3 + n4 + 1):
                            E2v = _E(n3, n4, phi, C[2] - D[2], c, d)
                            e2 = E2t * E2u * E2v
                            if e2 == 0.0:
                                continue
                            val += e1 * e2 * (-1) ** (tau + nu + phi) * _R(
                                t + tau, u + nu, v + phi, 0, alpha, PQ, cache)
    return val * 2 * np.pi ** 2.5 / (p * q * np.sqrt(p + q))


class BasisFunction:
    """Contracted Cartesian Gaussian."""

    def __init__(self, center, lmn, exps, coefs):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exps = np.asarray(exps, dtype=float)
        self.coefs = np.asarray(coefs, dtype=float) * np.array(
            [prim_norm(a, lmn) for a in exps])
        # normalize the contraction
        s = 0.0
        for ci, ai in zip(self.coefs, self.exps):
            for cj, aj in zip(self.coefs, self.exps):
                s += ci * cj * _overlap_prim(ai, lmn, self.center, aj, lmn, self.center)
        self.coefs = self.coefs / np.sqrt(s)


def build_basis(atoms, shells):
    """atoms: [(Z, xyz)], shells: [(atom_idx, l, exps, coefs)] -> [BasisFunction]"""
    funcs = []
    for atom_idx, l, exps, coefs in shells:
        _, xyz = atoms[atom_idx]
        for lmn in _CART[l]:
            funcs.append(BasisFunction(xyz, lmn, exps, coefs))
    return funcs


def overlap_matrix(funcs):
    n = len(funcs)
    S = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            v = sum(ci * cj * _overlap_prim(ai, funcs[i].lmn, funcs[i].center,
                                            aj, funcs[j].lmn, funcs[j].center)
                    for ci, ai in zip(funcs[i].coefs, funcs[i].exps)
                    for cj, aj in zip(funcs[j].coefs, funcs[j].exps))
            S[i, j] = S[j, i] = v
    return S


def kinetic_matrix(funcs):
    n = len(funcs)
    T = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            T[i, j] = sum(ci * cj * _kinetic_prim(ai, funcs[i].lmn, funcs[i].center,
                                                  aj, funcs[j].lmn, funcs[j].center)
                          for ci, ai in zip(funcs[i].coefs, funcs[i].exps)
                          for cj, aj in zip(funcs[j].coefs, funcs[j].exps))
    return 0.5 * (T + T.T)


def nuclear_matrix(funcs, atoms):
    n = len(funcs)
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            v = 0.0
            for Z, C in atoms:
                v -= Z * sum(
                    ci * cj * _nuclear_prim(ai, funcs[i].lmn, funcs[i].center,
                                            aj, funcs[j].lmn, funcs[j].center, C)
                    for ci, ai in zip(funcs[i].coefs, funcs[i].exps)
                    for cj, aj in zip(funcs[j].coefs, funcs[j].exps))
            V[i, j] = V[j, i] = v
    return V


def eri_tensor(funcs):
    n = len(funcs)
    eri = np.zeros((n, n, n, n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for ij, (i, j) in enumerate(pairs):
        for kl in range(ij + 1):
            k, l = pairs[kl]
            v = 0.0
            for ci, ai in zip(funcs[i].coefs, funcs[i].exps):
                for cj, aj in zip(funcs[j].coefs, funcs[j].exps):
                    for ck, ak in zip(funcs[k].coefs, funcs[k].exps):
                        for cl, al in zip(funcs[l].coefs, funcs[l].exps):
                            v += ci * cj * ck * cl * _eri_prim(
                                ai, funcs[i].lmn, funcs[i].center,
                                aj, funcs[j].lmn, funcs[j].center,
                                ak, funcs[k].lmn, funcs[k].center,
                                al, funcs[l].lmn, funcs[l].center)
            for a, b in ((i, j), (j, i)):
                for c, d in ((k, l), (l, k)):
                    eri[a, b, c, d] = v
                    eri[c, d, a, b] = v
    return eri


def nuclear_repulsion(atoms):
    e = 0.0
    for i, (Zi, Ri) in enumerate(atoms):
        for j, (Zj, Rj) in enumerate(atoms[:i]):
            e += Zi * Zj / np.linalg.norm(np.asarray(Ri) - np.asarray(Rj))
    return e
