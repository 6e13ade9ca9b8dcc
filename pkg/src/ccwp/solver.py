"""Eigenvalue and nonlinear solves: FCI ground state, quasi-Newton CC,
and the residual-based a-posteriori error bound."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from .cluster import AmplitudeVector, cc_energy_and_residual, cc_jacobian
from .manybody import WavefunctionVector

__all__ = ["FciResult", "CcResult", "solve_fci", "solve_cc",
           "aposteriori_bound", "davidson_lowest"]

DEGENERACY_TOL = 1e-8


@dataclass
class FciResult:
    energy: float
    psi: WavefunctionVector
    gap: float


@dataclass
class CcResult:
    t: AmplitudeVector
    energy: float
    converged: bool
    iterations: int
    residual_norm: float


def davidson_lowest(op, diag, k=2, tol=1e-10, max_iter=200, block=None):
    """Lowest-k eigenpairs of a symmetric operator with diagonal preconditioner."""
    n = op.shape[0]
    block = block or (k + 2)
    rng = np.random.default_rng(12345)
    V = np.zeros((n, 0))
    guess_idx = np.argsort(diag)[:block]
    X = np.zeros((n, block))
    X[guess_idx, np.arange(block)] = 1.0
    AX_list = []
    theta = None
    for it in range(max_iter):
        # orthonormalize additions against V
        for j in range(X.shape[1]):
            x = X[:, j]
            for _ in range(2):
                if V.shape[1]:
                    x = x - V @ (V.T @ x)
            nrm = np.linalg.norm(x)
            if nrm > 1e-10:
                V = np.column_stack([V, x / nrm])
                AX_list.append(op(V[:, -1]))
        if not AX_list:
            break
        AV = np.column_stack(AX_list)
        G = V.T @ AV
        G = 0.5 * (G + G.T)
        theta, S = scipy.linalg.eigh(G)
        theta, S = theta[:k], S[:, :k]
        Ritz = V @ S
        R = AV @ S - Ritz * theta
        rnorms = np.linalg.norm(R, axis=0)
        if np.all(rnorms < tol):
            return theta, Ritz
        X = np.zeros((n, 0))
        for j in range(k):
            if rnorms[j] < tol:
                continue
            denom = diag - theta[j]
            denom = np.where(np.abs(denom) < 1e-8, 1e-8, denom)
            X = np.column_stack([X, R[:, j] / denom])
        if V.shape[1] > max(10 * k, 60):
            # restart from current Ritz vectors
            V = np.zeros((n, 0))
            AX_list = []
            X = Ritz
    return theta, V @ S if theta is not None else (None, None)


def solve_fci(space, hamiltonian, dense_cutoff=1500):
    """Lowest eigenpair on a FULL space, with the spectral-gap diagnostic."""
    if not space.is_full:
        raise ValueError("solve_fci requires a FULL space")
    n = space.size
    if isinstance(hamiltonian, np.ndarray):
        if n <= dense_cutoff:
            w, v = scipy.linalg.eigh(hamiltonian)
            e0, e1 = w[0], w[1]
            psi = v[:, 0]
        else:
            v0 = np.cos(np.arange(n) * 0.3) + 0.05
            w, v = spla.eigsh(hamiltonian, k=2, which="SA", v0=v0, tol=0)
            order = np.argsort(w)
            e0, e1 = w[order[0]], w[order[1]]
            psi = v[:, order[0]]
    else:
        diag = hamiltonian.diagonal()
        theta, ritz = davidson_lowest(
            lambda x: hamiltonian.matvec(x), diag, k=2, tol=1e-9)
        e0, e1 = float(theta[0]), float(theta[1])
        psi = ritz[:, 0]
    gap = float(e1 - e0)
    if gap < DEGENERACY_TOL:
        raise ValueError(f"degenerate FCI ground state: gap {gap:.2e}")
    psi = psi / np.linalg.norm(psi)
    if psi[0] < 0:
        psi = -psi
    return FciResult(energy=float(e0), psi=WavefunctionVector(space, psi),
                     gap=gap)


def solve_cc(space, hamiltonian, metric, host, tol=1e-10, max_iter=200,
             level_shift=0.0, diis_depth=8, t0=None):
    """Quasi-Newton CC solve with DIIS on the rank-truncated space.

    Update rule: t <- t - r / (w + shift), w the mean-field weights of
    the amplitude determinants.
    """
    n_amp = len(space.excitations)
    weights = metric.weights[1:n_amp + 1]
    t = np.zeros(n_amp) if t0 is None else np.asarray(t0, dtype=float).copy()
    trail_t, trail_r = [], []
    energy = np.nan
    for it in range(1, max_iter + 1):
        amp = AmplitudeVector(space, t)
        energy, r = cc_energy_and_residual(amp, hamiltonian, host)
        rnorm = float(np.max(np.abs(r))) if n_amp else 0.0
        if rnorm < tol:
            return CcResult(t=amp, energy=energy, converged=True,
                            iterations=it, residual_norm=rnorm)
        t_new = t - r / (weights + level_shift)

        trail_t.append(t_new)
        trail_r.append(r)
        if len(trail_t) > diis_depth:
            trail_t.pop(0)
            trail_r.pop(0)
        m = len(trail_t)
        if m > 1:
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for i in range(m):
                for j in range(m):
                    B[i, j] = trail_r[i] @ trail_r[j]
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            cond = np.linalg.cond(B[:m, :m]) if m > 1 else 1.0
            if cond < 1e12:
                try:
                    w = np.linalg.solve(B, rhs)[:m]
                    t_new = sum(wi * ti for wi, ti in zip(w, trail_t))
                except np.linalg.LinAlgError:
                    trail_t, trail_r = [trail_t[-1]], [trail_r[-1]]
            else:
                trail_t, trail_r = [trail_t[-1]], [trail_r[-1]]
        t = t_new
        if np.linalg.norm(t) > 1e3:
            raise RuntimeError("CC amplitudes diverged")
    amp = AmplitudeVector(space, t)
    energy, r = cc_energy_and_residual(amp, hamiltonian, host)
    return CcResult(t=amp, energy=energy, converged=False,
                    iterations=max_iter, residual_norm=float(np.max(np.abs(r))))


def aposteriori_bound(t, hamiltonian, e_ref, metric, host, jacobian=None):
    """2 ||Df^-1|| ||f|| in the mean-field metric (residual error bound)."""
    energy, r = cc_energy_and_residual(t, hamiltonian, host)
    n_amp = len(t.t)
    w = metric.weights[1:n_amp + 1]
    if jacobian is None:
        jacobian = cc_jacobian(t, hamiltonian, e_ref, host)
    Jw = jacobian / np.sqrt(w)[:, None] / np.sqrt(w)[None, :]
    smin = np.linalg.svd(Jw, compute_uv=False)[-1]
    if smin < 1e-10:
        raise ValueError("singular CC Jacobian")
    res_norm = np.sqrt(np.sum(r * r / w))
    return 2.0 * res_norm / smin
