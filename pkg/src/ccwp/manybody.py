"""Many-body operators on a DeterminantSpace.

Dense matrices are assembled through Slater-Condon rules whose phases
come from the same string primitive as detspace, so operator identities
hold exactly.  Spaces too large for dense work are served by the
string-based matrix-free action in ccwp.strings.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .detspace import _apply_string
from .strings import contract_hamiltonian, hamiltonian_diagonal

__all__ = [
    "WavefunctionVector",
    "MeanFieldMetric",
    "hamiltonian_matrix",
    "hamiltonian_columns",
    "hamiltonian_operator",
    "mean_field_metric",
    "fluctuation_matrix",
    "weighted_operator_norm",
    "project_subspace",
]

DENSE_CUTOFF = 20000


@dataclass
class WavefunctionVector:
    space: object
    coeffs: np.ndarray

    def norm(self):
        return float(np.linalg.norm(self.coeffs))


@dataclass
class MeanFieldMetric:
    """Diagonal of the shifted N-particle mean-field operator.

    weights[0] = 1 for the reference; any excited determinant carries the
    sum of its orbital-energy differences.  All weights are positive for
    a positive HOMO-LUMO gap.
    """

    space: object
    weights: np.ndarray


def _spin_orbital_lists(det, n_spin):
    occ = [s for s in range(1, n_spin + 1) if det >> (s - 1) & 1]
    vir = [s for s in range(1, n_spin + 1) if not det >> (s - 1) & 1]
    return occ, vir


def _connections(det, n_spin, spin_ints):
    """Yield (image_det, value) over Sz-conserving singles and doubles."""
    eri = spin_ints.eri_anti
    h = spin_ints.h_so
    occ, vir = _spin_orbital_lists(det, n_spin)
    occ0 = np.array(occ) - 1
    occ_a = [s for s in occ if s % 2]
    occ_b = [s for s in occ if not s % 2]
    vir_a = [s for s in vir if s % 2]
    vir_b = [s for s in vir if not s % 2]

    for occ_s, vir_s in ((occ_a, vir_a), (occ_b, vir_b)):
        for l in occ_s:
            for a in vir_s:
                val = h[l - 1, a - 1] + eri[l - 1, occ0, a - 1, occ0].sum()
                phase, image = _apply_string(det, (a,), (l,))
                yield image, phase * val

    def _doubles(holes_pool_1, holes_pool_2, parts_pool_1, parts_pool_2, same):
        if same:
            hole_pairs = [(holes_pool_1[i], holes_pool_1[j])
                          for i in range(len(holes_pool_1))
                          for j in range(i + 1, len(holes_pool_1))]
            part_pairs = [(parts_pool_1[i], parts_pool_1[j])
                          for i in range(len(parts_pool_1))
                          for j in range(i + 1, len(parts_pool_1))]
        else:
            hole_pairs = [(h1, h2) for h1 in holes_pool_1 for h2 in holes_pool_2]
            part_pairs = [(p1, p2) for p1 in parts_pool_1 for p2 in parts_pool_2]
        for h1, h2 in hole_pairs:
            hl = (h1, h2) if h1 < h2 else (h2, h1)
            for p1, p2 in part_pairs:
                pl = (p1, p2) if p1 < p2 else (p2, p1)
                val = eri[hl[0] - 1, hl[1] - 1, pl[0] - 1, pl[1] - 1]
                phase, image = _apply_string(det, pl, hl)
                yield image, phase * val

    yield from _doubles(occ_a, None, vir_a, None, True)
    yield from _doubles(occ_b, None, vir_b, None, True)
    yield from _doubles(occ_a, occ_b, vir_a, vir_b, False)


def hamiltonian_matrix(space, spin_ints):
    """Dense <det_i|H|det_j> over the space, core energy on the diagonal."""
    if space.n_spin > spin_ints.n_spin:
        raise ValueError("space uses more spin orbitals than the integrals")
    n = space.size
    if n > DENSE_CUTOFF:
        raise ValueError(f"space of size {n} exceeds the dense cutoff {DENSE_CUTOFF}")
    H = np.zeros((n, n))
    diag = hamiltonian_diagonal(space, spin_ints)
    index_of = space.index_of
    for i in range(n):
        det = int(space.dets[i])
        for image, value in _connections(det, space.n_spin, spin_ints):
            j = index_of.get(image)
            if j is not None:
                H[j, i] = value
    H[np.arange(n), np.arange(n)] = diag
    return 0.5 * (H + H.T)


def hamiltonian_columns(space, spin_ints, col_positions):
    """Sparse H columns at the given basis positions (any space size)."""
    diag = None
    rows, cols, vals = [], [], []
    index_of = space.index_of
    dets = space.dets
    occ = np.zeros((len(col_positions), space.n_spin))
    for jj, j in enumerate(col_positions):
        det = int(dets[j])
        for s in range(space.n_spin):
            occ[jj, s] = det >> s & 1
    e1 = occ @ np.diag(spin_ints.h_so)
    pair = np.einsum("pqpq->pq", spin_ints.eri_anti)
    e2 = 0.5 * np.einsum("ip,pq,iq->i", occ, pair, occ)
    diag = e1 + e2 + spin_ints.core_energy

    for jj, j in enumerate(col_positions):
        det = int(dets[j])
        rows.append(j)
        cols.append(jj)
        vals.append(diag[jj])
        for image, value in _connections(det, space.n_spin, spin_ints):
            i = index_of.get(image)
            if i is not None:
                rows.append(i)
                cols.append(jj)
                vals.append(value)
    return sp.csc_matrix((vals, (rows, cols)),
                         shape=(space.size, len(col_positions)))


class HamiltonianOperator(spla.LinearOperator):
    """Matrix-free H on a FULL space via the direct-CI contraction."""

    def __init__(self, space, table, spin_ints):
        super().__init__(dtype=float, shape=(space.size, space.size))
        self.space = space
        self.table = table
        self.spin_ints = spin_ints

    def _matvec(self, x):
        return contract_hamiltonian(self.space, self.table, np.asarray(x).ravel())

    def _rmatvec(self, x):
        return self._matvec(x)

    def diagonal(self):
        if "hdiag" not in self.space._caches:
            self.space._caches["hdiag"] = hamiltonian_diagonal(
                self.space, self.spin_ints)
        return self.space._caches["hdiag"]


def hamiltonian_operator(space, table, spin_ints, dense_cutoff=DENSE_CUTOFF):
    """Dense matrix below the cutoff, matrix-free LinearOperator above."""
    if space.size <= dense_cutoff:
        return hamiltonian_matrix(space, spin_ints)
    return HamiltonianOperator(space, table, spin_ints)


def mean_field_metric(space, orbital_energies):
    """Diagonal mean-field weights; raises if a weight is not positive."""
    lam = np.asarray(orbital_energies, dtype=float)
    if np.any(np.diff(lam) < -1e-12):
        raise ValueError("orbital energies must be ascending")
    lam_spin = np.repeat(lam, 2)
    occ = np.zeros((space.size, space.n_spin))
    dets = space.dets.astype(np.uint64)
    for s in range(space.n_spin):
        occ[:, s] = (dets >> np.uint64(s)) & np.uint64(1)
    sums = occ @ lam_spin
    weights = sums - sums[0]
    weights[0] = 1.0
    if np.any(weights[1:] <= 0.0):
        raise ValueError("non-positive mean-field weight: HOMO-LUMO gap violated")
    return MeanFieldMetric(space=space, weights=weights)


def fluctuation_matrix(space, spin_ints, orbital_energies, hmat=None):
    """U = H - F_N with the diagonal F_N calibrated to zero at the reference."""
    if hmat is None:
        hmat = hamiltonian_matrix(space, spin_ints)
    metric = mean_field_metric(space, orbital_energies)
    f_diag = metric.weights.copy()
    f_diag[0] = 0.0
    f_diag += hmat[0, 0]
    U = hmat.copy()
    U[np.arange(space.size), np.arange(space.size)] -= f_diag
    return U


def _weight_vector(metric, n):
    if isinstance(metric, str) and metric == "euclidean":
        return np.ones(n)
    if isinstance(metric, MeanFieldMetric):
        return metric.weights
    w = np.asarray(metric, dtype=float)
    if w.shape != (n,):
        raise ValueError("metric weight vector has wrong length")
    return w


def weighted_operator_norm(A, metric_in="euclidean", metric_out="euclidean",
                           exact_cutoff=1500):
    """Largest singular value of W_out^(1/2) A W_in^(-1/2).

    Metrics are "euclidean", a MeanFieldMetric, or a raw positive weight
    vector (pass inverse weights for dual norms).  A may be a dense
    matrix, sparse matrix, or LinearOperator.
    """
    n_out, n_in = A.shape
    w_in = _weight_vector(metric_in, n_in)
    w_out = _weight_vector(metric_out, n_out)
    if np.any(w_in <= 0) or np.any(w_out <= 0):
        raise ValueError("metric weights must be positive")
    sqrt_out = np.sqrt(w_out)
    inv_sqrt_in = 1.0 / np.sqrt(w_in)
    if isinstance(A, np.ndarray) and max(A.shape) <= exact_cutoff:
        M = sqrt_out[:, None] * A * inv_sqrt_in[None, :]
        return float(np.linalg.svd(M, compute_uv=False)[0])

    if isinstance(A, np.ndarray) or sp.issparse(A):
        mv = lambda x: sqrt_out * (A @ (inv_sqrt_in * np.ravel(x)))
        rmv = lambda y: inv_sqrt_in * (A.T @ (sqrt_out * np.ravel(y)))
    else:
        mv = lambda x: sqrt_out * np.ravel(A.matvec(inv_sqrt_in * np.ravel(x)))
        rmv = lambda y: inv_sqrt_in * np.ravel(A.rmatvec(sqrt_out * np.ravel(y)))
    op = spla.LinearOperator(shape=A.shape, matvec=mv, rmatvec=rmv, dtype=float)
    v0 = np.cos(np.arange(n_in) * 0.7) + 0.1     # deterministic start
    s = spla.svds(op, k=1, which="LM", v0=v0, tol=1e-9,
                  return_singular_vectors=False)
    return float(s[0])


def project_subspace(A, space_sub, space):
    """Restrict (or zero-extend) A between a prefix-aligned pair of spaces."""
    m, n = space_sub.size, space.size
    if m > n or not np.array_equal(space_sub.dets, space.dets[:m]):
        raise ValueError("subspace is not a prefix of the host space")
    A = np.asarray(A)
    if A.shape == (n, n):
        return A[:m, :m].copy()
    if A.shape == (m, m):
        out = np.zeros((n, n))
        out[:m, :m] = A
        return out
    raise ValueError("operator shape matches neither space")
