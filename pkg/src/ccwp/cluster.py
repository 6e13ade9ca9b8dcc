"""Cluster-operator algebra on amplitude vectors.

Amplitudes live on a (possibly rank-truncated) DeterminantSpace whose
excitation list is always a prefix of the FULL host's list.  All
intermediate vectors live on the FULL host, where the cluster operator
is realized as a cached sparse matrix; truncated spaces are not
excitation-closed, so applying operators inside them raises instead of
dropping components.
"""

from dataclasses import dataclass

import numpy as np

from .detspace import apply_deexcitation, apply_excitation
from .manybody import WavefunctionVector
from .strings import cluster_pattern

__all__ = [
    "AmplitudeVector",
    "cluster_matrix",
    "cluster_apply",
    "exp_cluster_apply",
    "exp_apply_block",
    "log_cluster",
    "cc_residual",
    "cc_energy_and_residual",
    "cc_jacobian",
    "amplitudes_from_ci",
]


@dataclass
class AmplitudeVector:
    space: object              # defines the excitation index set
    t: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        if self.t.shape != (len(self.space.excitations),):
            raise ValueError("amplitude length does not match the index set")

    @property
    def rank_cap(self):
        mr = self.space.max_rank
        if mr == "full" or mr is None:
            return min(self.space.nelec, self.space.n_spin - self.space.nelec)
        return int(mr)


def _check_prefix(space, host):
    m = space.size
    if m > host.size or not np.array_equal(space.dets, host.dets[:m]):
        raise ValueError("amplitude space is not a prefix of the host")


def cluster_matrix(t, host, adjoint=False):
    """Sparse matrix of T (or T-dagger) on the FULL host space."""
    _check_prefix(t.space, host)
    if not host.is_full:
        raise ValueError("cluster matrices require a FULL host")
    pattern = cluster_pattern(host, t.rank_cap)
    t_full = np.zeros(len(host.excitations))
    t_full[:len(t.t)] = t.t
    mat = pattern.operator(t_full)
    return mat.T.tocsr() if adjoint else mat


def cluster_apply(t, psi, adjoint=False, host=None):
    """sum_mu t_mu X_mu psi (or the adjoint action) on the host space."""
    host = host or psi.space
    if psi.space is not host:
        raise ValueError("psi must live in the host space")
    if host.is_full:
        return WavefunctionVector(host, cluster_matrix(t, host, adjoint) @ psi.coeffs)
    return WavefunctionVector(host, _apply_naive(t, psi.coeffs, host, adjoint))


def _apply_naive(t, coeffs, host, adjoint):
    action = apply_deexcitation if adjoint else apply_excitation
    out = np.zeros(host.size)
    index_of = host.index_of
    for pos, amp in enumerate(t.t):
        if amp == 0.0:
            continue
        mu = t.space.excitations[pos]
        for j in np.flatnonzero(coeffs):
            res = action(mu, int(host.dets[j]))
            if res is None:
                continue
            phase, image = res
            i = index_of.get(image)
            if i is None:
                raise ValueError(
                    f"image of {mu} lies outside the host space")
            out[i] += amp * phase * coeffs[j]
    return out


def exp_cluster_apply(t, psi, sign=1, adjoint=False, host=None):
    """exp(sign*T) psi as the exact nilpotent polynomial (N+1 terms)."""
    host = host or psi.space
    if host.is_full:
        mat = cluster_matrix(t, host, adjoint)
        apply_term = lambda v: mat @ v
    else:
        apply_term = lambda v: _apply_naive(t, v, host, adjoint)
    acc = psi.coeffs.copy()
    term = psi.coeffs.copy()
    for k in range(1, host.nelec + 1):
        term = sign * apply_term(term) / k
        if not np.any(term):
            break
        acc = acc + term
    return WavefunctionVector(host, acc)


def exp_apply_block(t, block, sign=1, adjoint=False, host=None):
    """exp(sign*T) applied to the columns of a dense block."""
    mat = cluster_matrix(t, host, adjoint)
    acc = block.copy()
    term = block.copy()
    for k in range(1, host.nelec + 1):
        term = sign * (mat @ term) / k
        if not np.any(term):
            break
        acc = acc + term
    return acc


def reference_vector(host):
    v = np.zeros(host.size)
    v[0] = 1.0
    return WavefunctionVector(host, v)


def log_cluster(phi):
    """Amplitudes t with exp(T(t)) Psi0 = phi / <Psi0, phi>.

    phi must have a non-negligible reference coefficient; the Taylor
    series of log(I + C) terminates by nilpotency.
    """
    host = phi.space
    c0 = phi.coeffs[0]
    if abs(c0) < 1e-12:
        raise ValueError("vanishing reference coefficient: overlap assumption violated")
    c = phi.coeffs / c0
    c_amp = c[1:] * host.ref_phases
    cvec = AmplitudeVector(host, c_amp)
    mat = cluster_matrix(cvec, host)
    theta = np.zeros(host.size)
    term = np.zeros(host.size)
    term[0] = 1.0
    for j in range(1, host.nelec + 1):
        term = mat @ term
        if not np.any(term):
            break
        theta += (-1) ** (j + 1) / j * term
    t = theta[1:] * host.ref_phases
    return AmplitudeVector(host, t)


def amplitudes_from_ci(psi_star):
    """Cluster amplitudes of an (un-normalized) CI vector."""
    return log_cluster(psi_star)


def _h_apply(hamiltonian, v):
    if isinstance(hamiltonian, np.ndarray):
        return hamiltonian @ v
    return hamiltonian.matvec(v)


def cc_energy_and_residual(t, hamiltonian, host):
    """(energy, residual over t.space.excitations) of the CC equations."""
    _check_prefix(t.space, host)
    sigma = exp_cluster_apply(t, reference_vector(host), sign=1, host=host)
    hsig = _h_apply(hamiltonian, sigma.coeffs)
    rho = exp_cluster_apply(t, WavefunctionVector(host, hsig), sign=-1,
                            host=host)
    n_amp = len(t.t)
    energy = float(rho.coeffs[0])
    residual = rho.coeffs[1:n_amp + 1] * host.ref_phases[:n_amp]
    return energy, residual


def cc_residual(t, hamiltonian, host):
    return cc_energy_and_residual(t, hamiltonian, host)


def cc_jacobian(t, hamiltonian, energy_shift, host):
    """Dense J[nu, mu] = <X_nu Psi0, e^-T (H - E) e^T X_mu Psi0>."""
    _check_prefix(t.space, host)
    if not isinstance(hamiltonian, np.ndarray):
        raise ValueError("dense Jacobians need a dense Hamiltonian")
    n_amp = len(t.t)
    B = np.zeros((host.size, n_amp))
    B[np.arange(1, n_amp + 1), np.arange(n_amp)] = host.ref_phases[:n_amp]
    C = exp_apply_block(t, B, sign=1, host=host)
    C = hamiltonian @ C - energy_shift * C
    C = exp_apply_block(t, C, sign=-1, host=host)
    return host.ref_phases[:n_amp, None] * C[1:n_amp + 1, :]
