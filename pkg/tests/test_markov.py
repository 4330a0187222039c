import numpy as np
import pytest

from expandec.generators import complete, cycle, circulant, petersen, random_regular
from expandec.markov import (
    apply_markov,
    cheeger_certificate,
    contraction_defect,
    is_boxed,
    l1_norm,
    l2_norm,
    markov_matrix,
    markov_power_defect,
    second_eigenvalue,
    standard_function_family,
)
from expandec.multigraph import GraphError, MultiGraph, edge_boundary, edge_expansion_constant


def dense_markov(g):
    """Independent dense oracle for the averaging operator."""
    d = int(g.degrees[0])
    mat = np.zeros((g.n, g.n))
    for u, v in g.edges.tolist():
        mat[u, v] += 1
        mat[v, u] += 1
    return mat / d


def test_norms_normalized():
    f = np.array([3.0, -4.0])
    assert l2_norm(f) == pytest.approx(np.sqrt(25 / 2))
    assert l1_norm(f) == pytest.approx(3.5)


def test_apply_markov_is_stochastic_and_mean_preserving():
    for g in (petersen(), circulant(12, [1, 3]), random_regular(20, 4, seed=2)):
        ones = np.ones(g.n)
        assert np.allclose(apply_markov(g, ones), ones)
        f = np.random.default_rng(3).uniform(-1, 1, g.n)
        assert apply_markov(g, f).mean() == pytest.approx(f.mean(), abs=1e-13)


def test_apply_markov_matches_dense_oracle():
    for seed in range(4):
        g = random_regular(16, 3, seed=seed)
        f = np.random.default_rng(seed).uniform(0, 1, g.n)
        assert np.allclose(apply_markov(g, f), dense_markov(g) @ f, atol=1e-13)
    assert np.allclose(markov_matrix(g), dense_markov(g))


def test_apply_markov_parallel_edges_weighted():
    g = MultiGraph(3, [(0, 1), (0, 1), (1, 2), (0, 2), (2, 1)])
    # degrees: 0 -> 3, 1 -> 4: irregular, must refuse
    with pytest.raises(GraphError):
        apply_markov(g, np.zeros(3))
    g2 = MultiGraph(2, [(0, 1), (0, 1)])
    out = apply_markov(g2, np.array([1.0, 0.0]))
    assert np.allclose(out, [0.0, 1.0])


def test_apply_markov_length_check():
    with pytest.raises(GraphError):
        apply_markov(cycle(4), np.zeros(5))


def test_petersen_outer_indicator_values():
    # direct-summation oracle: outer vertices average 2/3, inner 1/3
    g = petersen()
    chi = np.array([1.0] * 5 + [0.0] * 5)
    out = apply_markov(g, chi)
    assert np.allclose(out[:5], 2 / 3)
    assert np.allclose(out[5:], 1 / 3)


def test_indicator_l1_identity():
    # n * ||M chi_S - chi_S||_1 == 2 * boundary(S) / d
    rng = np.random.default_rng(12)
    for seed in range(5):
        g = random_regular(18, 4, seed=seed)
        s = rng.choice(18, size=rng.integers(1, 17), replace=False)
        chi = np.zeros(18)
        chi[s] = 1.0
        lhs = 18 * l1_norm(apply_markov(g, chi) - chi)
        rhs = 2 * edge_boundary(g, s.tolist()) / 4
        assert lhs == pytest.approx(rhs, abs=1e-11)


def test_boxedness():
    assert is_boxed(np.array([0.0, 0.5, 1.0]))
    assert not is_boxed(np.array([-0.1, 0.5]))
    assert not is_boxed(np.array([0.2, 1.1]))


def test_contraction_defect_rejects_unboxed():
    with pytest.raises(GraphError):
        contraction_defect(cycle(6), np.full(6, 1.5), 0.2)


def test_contraction_defect_epsilon_range():
    with pytest.raises(GraphError):
        contraction_defect(cycle(6), np.full(6, 0.5), 0.0)
    with pytest.raises(GraphError):
        contraction_defect(cycle(6), np.full(6, 0.5), 1.0)


def test_c100_tent_defect_frozen_value():
    """Dense-oracle regression for the cycle tent function.

    The exact closed form is 2 n^{-3/2} (1 - (1-eps) sqrt(2)): one Markov
    step halves the squared norm of the two isolated kink spikes. At
    eps = 0.1 the defect is negative; a positive tent defect on a cycle
    would need eps > 1 - 1/sqrt(2).
    """
    n = 100
    g = cycle(n)
    i = np.arange(n)
    tent = np.minimum(i, n - i) / 50.0
    got = contraction_defect(g, tent, 0.1)
    closed = 2 * n ** -1.5 * (1 - 0.9 * np.sqrt(2))
    assert got == pytest.approx(closed, abs=1e-15)
    assert got == pytest.approx(-5.455844122715714e-4, abs=1e-12)
    # dense oracle route
    M = dense_markov(g)
    mf = M @ tent
    oracle = np.sqrt(np.mean((M @ mf - mf) ** 2)) - 0.9 * np.sqrt(np.mean((mf - tent) ** 2))
    assert got == pytest.approx(oracle, abs=1e-13)


def test_cycle_eigenvector_bump_has_positive_defect():
    """Cycles do fail the contraction condition, witnessed by a smooth bump."""
    n = 100
    g = cycle(n)
    f = 0.5 + 0.5 * np.cos(2 * np.pi * np.arange(n) / n)
    lam2 = np.cos(2 * np.pi / n)
    eps = 2 * (1 - lam2)  # anything above 1 - lam2 works
    defect = contraction_defect(g, f, eps)
    assert defect > 0
    # eigenfunction: defect is exactly (lam2 - (1 - eps)) * ||Mf - f||
    mf = apply_markov(g, f)
    assert defect == pytest.approx((lam2 - (1 - eps)) * l2_norm(mf - f), abs=1e-12)


def test_markov_power_defect_petersen_frozen():
    g = petersen()
    outer = [0, 1, 2, 3, 4]
    got = markov_power_defect(g, outer, 2, 0.2)
    assert got == pytest.approx(-0.17629629629629634, abs=1e-12)
    # dense oracle
    M = dense_markov(g)
    chi = np.zeros(10)
    chi[outer] = 1.0
    cur = M @ (M @ chi)
    val = np.sqrt(np.mean((M @ cur - cur) ** 2)) - 0.8 ** 2 * np.sqrt(np.mean((M @ chi - chi) ** 2))
    assert got == pytest.approx(val, abs=1e-13)


def test_markov_power_defect_validation():
    with pytest.raises(GraphError):
        markov_power_defect(cycle(4), [0], 0, 0.3)


def test_second_eigenvalue_c8():
    est = second_eigenvalue(cycle(8))
    assert est.converged
    assert est.lambda2 == pytest.approx(np.cos(np.pi / 4), abs=1e-8)
    assert est.lambda_min == pytest.approx(-1.0, abs=1e-8)  # bipartite


def test_second_eigenvalue_k4():
    est = second_eigenvalue(complete(4))
    assert est.lambda2 == pytest.approx(-1 / 3, abs=1e-9)
    assert est.lambda_min == pytest.approx(-1 / 3, abs=1e-9)


def test_second_eigenvalue_disconnected():
    g = MultiGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    est = second_eigenvalue(g)
    assert est.lambda2 == pytest.approx(1.0, abs=1e-8)


def test_second_eigenvalue_matches_dense_oracle():
    for seed in range(5):
        g = random_regular(14, 3, seed=seed)
        est = second_eigenvalue(g)
        w = np.sort(np.linalg.eigvalsh(dense_markov(g)))
        assert est.lambda2 == pytest.approx(w[-2], abs=1e-7)
        assert est.lambda_min == pytest.approx(w[0], abs=1e-7)


def test_second_eigenvalue_deterministic():
    a = second_eigenvalue(random_regular(20, 4, seed=3))
    b = second_eigenvalue(random_regular(20, 4, seed=3))
    assert a == b


def test_cheeger_certificate_k4():
    # exact expansion constant of K4 is 2/3 and the certificate meets it
    cert = cheeger_certificate(complete(4))
    assert cert == pytest.approx(2 / 3, abs=1e-7)
    assert cert <= float(edge_expansion_constant(complete(4)))


def test_cheeger_certificate_sound_on_samples():
    for seed in range(8):
        g = random_regular(12, 3, seed=seed)
        cert = cheeger_certificate(g)
        assert cert <= float(edge_expansion_constant(g)) + 1e-12


def test_cheeger_certificate_c8():
    cert = cheeger_certificate(cycle(8))
    assert cert == pytest.approx((1 - np.cos(np.pi / 4)) / 2, abs=1e-7)
    assert cert <= 0.25


def test_standard_family_boxed_and_deterministic():
    g = random_regular(24, 4, seed=1)
    fam1 = standard_function_family(g, seed=9)
    fam2 = standard_function_family(g, seed=9)
    assert [lab for lab, _ in fam1] == [lab for lab, _ in fam2]
    labels = [lab for lab, _ in fam1]
    assert len(labels) == len(set(labels))
    for (lab, f), (_, f2) in zip(fam1, fam2):
        assert is_boxed(f), lab
        assert np.array_equal(f, f2)
    assert len(fam1) >= 20
