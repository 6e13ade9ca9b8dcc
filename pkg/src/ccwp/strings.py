"""Alpha/beta string factorization for FULL determinant spaces.

The Sz = 0 FULL space is a product grid of alpha and beta spatial
occupation strings.  This module exposes that structure: the grid <->
basis-ordering maps, single-excitation link tables driving the direct-CI
Hamiltonian action, and a sparse-matrix builder for cluster operators.
Cluster phases factorize per spin sector in the blocked orbital ordering;
the remaining mu-dependent sign is anchored to the from-reference phases
stored on the DeterminantSpace, so the sparse operators agree with
ccwp.detspace exactly.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .detspace import ExcitationIndex, apply_excitation

__all__ = ["StringStructure", "string_structure", "ClusterPattern",
           "cluster_pattern", "contract_hamiltonian", "hamiltonian_diagonal"]


def _interleave_table(k):
    # spatial mask -> interleaved spin-orbital mask (alpha at even bits)
    table = np.zeros(1 << k, dtype=np.uint64)
    for m in range(1 << k):
        out = 0
        for p in range(k):
            if m >> p & 1:
                out |= 1 << (2 * p)
        table[m] = np.uint64(out)
    return table


@dataclass
class StringStructure:
    norb: int
    nocc: int                  # per spin
    strings: np.ndarray        # spatial masks, combination (lex) order
    string_index: dict
    grid_to_space: np.ndarray  # (n_str, n_str) int32 -> basis index
    space_to_grid: np.ndarray  # (size, 2) int32 rows (ia, ib)
    link_flat: tuple           # (src, p, q, dst, sign) int32 arrays

    @property
    def n_str(self):
        return len(self.strings)


def _make_strings(norb, nocc):
    masks = []
    for occ in combinations(range(norb), nocc):
        m = 0
        for p in occ:
            m |= 1 << p
        masks.append(m)
    return np.array(masks, dtype=np.int64)


def _string_phase(mask, p, q):
    """Sign of a+_p a_q within one spin sector (spatial, 0-based, p != q)."""
    lo, hi = (q, p) if q < p else (p, q)
    between = mask & (((1 << hi) - 1) ^ ((1 << (lo + 1)) - 1))
    return -1 if bin(between).count("1") % 2 else 1


def _link_table(strings, string_index, norb):
    """Flat arrays (src, p, q, dst, sign) over all E_pq moves, incl. p=q."""
    src, ps, qs, dst, sgn = [], [], [], [], []
    for i, m in enumerate(strings):
        m = int(m)
        occ = [p for p in range(norb) if m >> p & 1]
        for q in occ:
            src.append(i); ps.append(q); qs.append(q); dst.append(i); sgn.append(1)
            for p in range(norb):
                if not m >> p & 1:
                    m2 = m ^ (1 << q) | (1 << p)
                    src.append(i); ps.append(p); qs.append(q)
                    dst.append(string_index[m2]); sgn.append(_string_phase(m, p, q))
    return tuple(np.array(a, dtype=np.int32) for a in (src, ps, qs, dst, sgn))


def string_structure(space):
    """Build (and cache) the string factorization of a FULL space."""
    if "strings" in space._caches:
        return space._caches["strings"]
    if not space.is_full:
        raise ValueError("string structure requires a FULL space")
    if space.nelec % 2:
        raise ValueError("closed-shell Sz=0 spaces only")
    k = space.n_spin // 2
    nocc = space.nelec // 2
    strings = _make_strings(k, nocc)
    string_index = {int(m): i for i, m in enumerate(strings)}
    inter = _interleave_table(k)
    na = len(strings)

    alpha_masks = inter[strings]
    beta_masks = alpha_masks << np.uint64(1)
    grid_to_space = np.empty((na, na), dtype=np.int32)
    index_of = space.index_of
    for ia in range(na):
        am = int(alpha_masks[ia])
        row = grid_to_space[ia]
        for ib in range(na):
            row[ib] = index_of[am | int(beta_masks[ib])]
    space_to_grid = np.empty((space.size, 2), dtype=np.int32)
    flat = grid_to_space.ravel()
    ia_grid, ib_grid = np.divmod(np.arange(na * na, dtype=np.int64), na)
    space_to_grid[flat, 0] = ia_grid
    space_to_grid[flat, 1] = ib_grid

    out = StringStructure(norb=k, nocc=nocc, strings=strings,
                          string_index=string_index,
                          grid_to_space=grid_to_space,
                          space_to_grid=space_to_grid,
                          link_flat=_link_table(strings, string_index, k))
    space._caches["strings"] = out
    return out


def _sector_pairs(struct, max_rank):
    """Single-sector excitation pairs as int32 arrays.

    Columns: exc_string (the image of the sector excitation on the
    reference string), from_string, to_string, phase, rank.  The phase is
    the exact detspace phase of the pure-alpha embedding; by the blocked
    ordering it also serves the beta sector.
    """
    k = struct.norb
    nocc = struct.nocc
    inter = _interleave_table(k)
    ref_mask = (1 << nocc) - 1
    cols = []
    for i_star, m_star in enumerate(struct.strings):
        m_star = int(m_star)
        holes_sp = ref_mask & ~m_star
        parts_sp = m_star & ~ref_mask
        rank = bin(holes_sp).count("1")
        if rank > max_rank:
            continue
        holes = tuple(2 * p + 1 for p in range(k) if holes_sp >> p & 1)
        parts = tuple(2 * p + 1 for p in range(k) if parts_sp >> p & 1)
        mu = ExcitationIndex(holes=holes, particles=parts) if rank else None
        for i_from, m_from in enumerate(struct.strings):
            m_from = int(m_from)
            if holes_sp & ~m_from or parts_sp & m_from:
                continue
            i_to = struct.string_index[m_from & ~holes_sp | parts_sp]
            if mu is None:
                phase = 1
            else:
                phase = apply_excitation(mu, int(inter[m_from]))[0]
            cols.append((i_star, i_from, i_to, phase, rank))
    return np.array(cols, dtype=np.int32)


@dataclass
class ClusterPattern:
    """Fixed sparsity pattern of cluster operators of rank <= max_rank."""

    space: object
    max_rank: int
    indptr: np.ndarray
    indices: np.ndarray
    mu_of_data: np.ndarray     # amplitude position feeding each data slot
    sign_of_data: np.ndarray   # int8

    def operator(self, t_full):
        """CSR matrix of sum_mu t_mu X_mu; t_full aligned with excitations."""
        data = t_full[self.mu_of_data] * self.sign_of_data
        n = self.space.size
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))


def cluster_pattern(space, max_rank):
    """Sparse pattern of rank-limited cluster operators on a FULL space."""
    key = ("cluster_pattern", int(max_rank))
    if key in space._caches:
        return space._caches[key]
    struct = string_structure(space)
    na = struct.n_str
    pairs = _sector_pairs(struct, max_rank)
    b_star, b_from, b_to = pairs[:, 0], pairs[:, 1], pairs[:, 2]
    b_phase, b_rank = pairs[:, 3], pairs[:, 4]

    ref_a = int(struct.space_to_grid[0, 0])
    sector_ref_phase = np.zeros(na, dtype=np.int8)
    at_ref = b_from == ref_a
    sector_ref_phase[b_star[at_ref]] = b_phase[at_ref]

    mu_pos_grid = struct.grid_to_space.astype(np.int64) - 1
    full_ref_phase = np.concatenate(([1], space.ref_phases)).astype(np.int8)
    chi = (full_ref_phase[mu_pos_grid + 1]
           * sector_ref_phase[:, None] * sector_ref_phase[None, :])

    g2s = struct.grid_to_space.astype(np.int64)
    rows_list, cols_list, mu_list, sign_list = [], [], [], []
    for qa in range(len(pairs)):
        ia_star, ia_from, ia_to, pa, ra = (int(x) for x in pairs[qa])
        keep = b_rank + ra <= max_rank
        if ia_star == ref_a:
            keep = keep & (b_star != ref_a)
        if not np.any(keep):
            continue
        jb_star = b_star[keep]
        rows_list.append((g2s[ia_to, b_to[keep]]).astype(np.int32))
        cols_list.append((g2s[ia_from, b_from[keep]]).astype(np.int32))
        mu_list.append((mu_pos_grid[ia_star, jb_star]).astype(np.int32))
        sign_list.append((pa * b_phase[keep] * chi[ia_star, jb_star]).astype(np.int8))

    rows = np.concatenate(rows_list); rows_list.clear()
    cols = np.concatenate(cols_list); cols_list.clear()
    mu = np.concatenate(mu_list); mu_list.clear()
    signs = np.concatenate(sign_list); sign_list.clear()

    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    mu = mu[order]
    signs = signs[order]
    indptr = np.zeros(space.size + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    np.cumsum(indptr, out=indptr)

    pattern = ClusterPattern(space=space, max_rank=int(max_rank),
                             indptr=indptr, indices=cols,
                             mu_of_data=mu, sign_of_data=signs)
    space._caches[key] = pattern
    return pattern


def hamiltonian_diagonal(space, spin_ints):
    """<det|H|det> for every basis determinant (vectorized)."""
    n = space.n_spin
    occ = np.zeros((space.size, n))
    dets = space.dets.astype(np.uint64)
    for s in range(n):
        occ[:, s] = (dets >> np.uint64(s)) & np.uint64(1)
    e1 = occ @ np.diag(spin_ints.h_so)
    pair = np.einsum("pqpq->pq", spin_ints.eri_anti)
    e2 = 0.5 * np.einsum("ip,pq,iq->i", occ, pair, occ)
    return e1 + e2 + spin_ints.core_energy


def contract_hamiltonian(space, table, ci_vec):
    """Direct-CI action (H @ ci_vec) on a FULL space, core energy included.

    table is the spatial-orbital IntegralTable in the same basis.
    """
    struct = string_structure(space)
    k = struct.norb
    na = struct.n_str
    eri = table.eri
    hbar = table.h - 0.5 * np.einsum("prrq->pq", eri)

    c = np.asarray(ci_vec, dtype=float)[struct.grid_to_space]   # (na, nb)
    src, p, q, dst, sgn = struct.link_flat
    pq = (p * k + q).astype(np.int64)

    d = np.zeros((k * k, na, na))
    np.add.at(d, (pq, dst), sgn[:, None] * c[src, :])           # alpha moves
    np.add.at(d.transpose(0, 2, 1), (pq, dst), sgn[:, None] * c[:, src].T)

    g = (eri.reshape(k * k, k * k) @ d.reshape(k * k, -1)).reshape(k * k, na, na)
    g *= 0.5
    g += hbar.reshape(k * k, 1, 1) * c[None, :, :]

    sigma = np.zeros((na, na))
    np.add.at(sigma, (dst,), sgn[:, None] * g[pq, src, :])       # alpha moves
    np.add.at(sigma.T, (dst,), sgn[:, None] * g[pq, :, src])     # beta moves

    out = np.empty(space.size)
    out[struct.grid_to_space] = sigma
    return out + table.core_energy * np.asarray(ci_vec, dtype=float)
