import numpy as np
import pytest

from ccwp.detspace import FULL, build_space
from ccwp.fcidump import spin_orbital_transform
from ccwp.manybody import (MeanFieldMetric, fluctuation_matrix,
                           hamiltonian_columns, hamiltonian_matrix,
                           mean_field_metric, project_subspace,
                           weighted_operator_norm)
from ccwp.strings import contract_hamiltonian, hamiltonian_diagonal
from conftest import random_table
from oracles import fock_space_hamiltonian, permutation_matrix_element


@pytest.fixture(scope="module")
def toy():
    table = random_table(3, 4, seed=7)
    space = build_space(4, 6, FULL)
    spin = spin_orbital_transform(table)
    H = hamiltonian_matrix(space, spin)
    return table, space, spin, H


def test_hamiltonian_symmetric(toy):
    _, _, _, H = toy
    assert np.max(np.abs(H - H.T)) < 1e-12


def test_hamiltonian_vs_fock_space_oracle(toy):
    table, space, _, H = toy
    H_oracle = fock_space_hamiltonian(space, table)
    assert np.max(np.abs(H - H_oracle)) < 1e-11


def test_hamiltonian_vs_permutation_oracle(toy):
    table, space, _, H = toy
    rng = np.random.default_rng(3)
    for _ in range(50):
        i, j = rng.integers(0, space.size, size=2)
        ref = permutation_matrix_element(int(space.dets[i]), int(space.dets[j]),
                                         table)
        assert H[i, j] == pytest.approx(ref, abs=1e-11)


def test_rank_three_blocks_vanish():
    table = random_table(4, 6, seed=13)
    space = build_space(6, 8, FULL)
    H = hamiltonian_matrix(space, spin_orbital_transform(table))
    ranks = space.ranks
    for i in range(space.size):
        far = np.abs(ranks - ranks[i]) > 2
        # excitation rank between two dets, not rank relative to ref
        from ccwp.detspace import excitation_rank
        for j in range(space.size):
            if excitation_rank(int(space.dets[i]), int(space.dets[j])) > 2:
                assert H[i, j] == 0.0


def test_hamiltonian_diagonal_matches(toy):
    _, space, spin, H = toy
    diag = hamiltonian_diagonal(space, spin)
    assert np.allclose(diag, np.diag(H), atol=1e-12)


def test_contract_hamiltonian_matches_dense(toy):
    table, space, _, H = toy
    rng = np.random.default_rng(11)
    for _ in range(5):
        x = rng.normal(size=space.size)
        assert np.allclose(contract_hamiltonian(space, table, x), H @ x,
                           atol=1e-11)


def test_hamiltonian_columns_match_dense(toy):
    table, space, spin, H = toy
    cols = [0, 3, 7]
    B = hamiltonian_columns(space, spin, cols).toarray()
    assert np.allclose(B, H[:, cols], atol=1e-12)


def test_mean_field_metric_weights():
    space = build_space(4, 8, FULL)
    lam = np.array([-2.0, -1.0, 0.5, 1.5])
    metric = mean_field_metric(space, lam)
    assert metric.weights[0] == 1.0
    # single excitation 2beta -> 3alpha has weight lam3 - lam1
    from ccwp.detspace import ExcitationIndex, apply_excitation
    mu = ExcitationIndex(holes=(2,), particles=(6,))
    pos = space.index_of[apply_excitation(mu, space.reference)[1]]
    assert metric.weights[pos] == pytest.approx(lam[2] - lam[0])
    # weights of rank-j determinants are sums of j differences
    for i in range(1, space.size):
        det = int(space.dets[i])
        holes = [s for s in range(1, 9) if space.reference >> (s - 1) & 1
                 and not det >> (s - 1) & 1]
        parts = [s for s in range(1, 9) if det >> (s - 1) & 1
                 and not space.reference >> (s - 1) & 1]
        expect = sum(lam[(s - 1) // 2] for s in parts) - sum(
            lam[(s - 1) // 2] for s in holes)
        assert metric.weights[i] == pytest.approx(expect)


def test_mean_field_metric_gap_error():
    space = build_space(2, 4, FULL)
    with pytest.raises(ValueError):
        mean_field_metric(space, np.array([1.0, 1.0]))   # zero gap


def test_fluctuation_matrix_calibration(toy):
    table, space, spin, H = toy
    lam = np.linspace(-1.5, 1.0, 3)
    U = fluctuation_matrix(space, spin, lam, hmat=H)
    assert U[0, 0] == pytest.approx(0.0, abs=1e-12)
    # off-diagonal entries inherit H exactly (diagonal subtraction)
    off = ~np.eye(space.size, dtype=bool)
    assert np.array_equal(U[off], H[off])


def test_weighted_operator_norm_basics():
    A = np.eye(5)
    w = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    assert weighted_operator_norm(A, w, w) == pytest.approx(1.0)
    d = np.diag([1.0, -3.0, 2.0, 0.5, 0.1])
    assert weighted_operator_norm(d) == pytest.approx(3.0)


def test_weighted_operator_norm_monte_carlo():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(5, 5))
    w_in = rng.uniform(0.5, 2.0, size=5)
    w_out = rng.uniform(0.5, 2.0, size=5)
    norm = weighted_operator_norm(A, w_in, w_out)
    best = 0.0
    for _ in range(10000):
        x = rng.normal(size=5)
        x /= np.sqrt(x @ (w_in * x))
        y = A @ x
        best = max(best, np.sqrt(y @ (w_out * y)))
    assert best <= norm * (1 + 1e-9)
    assert best == pytest.approx(norm, rel=0.01)


def test_weighted_norm_iterative_matches_dense():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(60, 60))
    w_in = rng.uniform(0.5, 2.0, size=60)
    w_out = rng.uniform(0.5, 2.0, size=60)
    exact = weighted_operator_norm(A, w_in, w_out)
    import scipy.sparse.linalg as spla
    op = spla.aslinearoperator(A)
    it = weighted_operator_norm(op, w_in, w_out)
    assert it == pytest.approx(exact, rel=1e-7)


def test_project_subspace():
    space = build_space(4, 8, FULL)
    sub = build_space(4, 8, 1)
    n, m = space.size, sub.size
    A = np.arange(n * n, dtype=float).reshape(n, n)
    R = project_subspace(A, sub, space)
    assert np.array_equal(R, A[:m, :m])
    E = project_subspace(R, sub, space)
    assert E.shape == (n, n) and np.array_equal(E[:m, :m], R)
    assert not E[m:, :].any() and not E[:, m:].any()
    # projector idempotence and commutation with diagonal metrics
    P = np.zeros((n, n))
    P[:m, :m] = np.eye(m)
    assert np.array_equal(P @ P, P)
    W = np.diag(np.arange(1, n + 1, dtype=float))
    assert np.array_equal(P @ W, W @ P)
