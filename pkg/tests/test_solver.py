import numpy as np
import pytest
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from conftest import small_config
from hmortar.solver import (COND_LIMIT, InstabilityError, assemble_system, block_residuals,
                            factorizations, interface_condition, precompute_schur, reconstruct,
                            solve_interface, solve_monolithic, solve_schur)


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.fixture(scope="module")
def zero_sys():
    return assemble_system(small_config(b_remanence=0.0))


def test_zero_sources_give_zero_solution(zero_sys):
    pre = precompute_schur(zero_sys)
    for st in (solve_schur(pre, 0.4), solve_monolithic(zero_sys, 0.4)):
        assert not np.any(st.a_S) and not np.any(st.a_R) and not np.any(st.lam)
    for v in (pre.y_S, pre.y_R, pre.g_S, pre.g_R):
        assert not np.any(v)


@pytest.mark.parametrize("alpha", [0.0, 0.37, 2.9])
def test_monolithic_residuals(excited_sys, alpha):
    st = solve_monolithic(excited_sys, alpha)
    assert max(block_residuals(excited_sys, alpha, st.a_S, st.a_R, st.lam)) <= 1e-10


def test_full_turn_is_identity(small_sys, small_pre):
    a = solve_schur(small_pre, 0.3)
    b = solve_schur(small_pre, 0.3 + 2 * np.pi)
    for x, y in ((a.a_S, b.a_S), (a.a_R, b.a_R), (a.lam, b.lam)):
        np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-12 * np.abs(y).max())


def test_small_blocks_symmetric(excited_sys, excited_pre):
    # raw products, before the precomputation symmetrises them
    for B, X in ((excited_sys.B_S, excited_pre.X_S), (excited_sys.B_R0, excited_pre.X_R)):
        G = B @ X
        assert np.abs(G - G.T).max() <= 1e-13 * np.abs(G).max()
    for alpha in (0.0, 1.1, 4.0):
        K = excited_pre.K_int(alpha)
        np.testing.assert_array_equal(K, K.T)
        assert np.linalg.eigvalsh(K).min() > 0


def test_rotor_block_against_cg(small_sys, small_pre):
    K = small_sys.K_R
    precond = sp.diags(1.0 / K.diagonal())
    cols = [0, 3, 8, 17]
    for k in cols:
        x, info = spla.cg(K, small_sys.B_R0[k], rtol=1e-13, maxiter=20000, M=precond)
        assert info == 0
        np.testing.assert_allclose(small_sys.B_R0 @ x, small_pre.G_R[:, k], rtol=0,
                                   atol=1e-8 * np.abs(small_pre.G_R).max())


@pytest.mark.parametrize("alpha", [0.0, 0.21, 1.7, 5.5])
def test_interface_multiplier_matches_monolithic(excited_sys, excited_pre, alpha):
    mono = solve_monolithic(excited_sys, alpha)
    lam = solve_interface(excited_pre, alpha)
    assert rel(lam, mono.lam) <= 1e-8
    st = reconstruct(excited_pre, lam, alpha)
    assert rel(st.a_S, mono.a_S) <= 1e-8
    assert rel(st.a_R, mono.a_R) <= 1e-8


def test_reconstruct_without_multiplier(excited_pre):
    st = reconstruct(excited_pre, np.zeros(2 * excited_pre.N + 1), 0.8)
    np.testing.assert_array_equal(st.a_S, excited_pre.y_S)
    np.testing.assert_array_equal(st.a_R, excited_pre.y_R)


def test_schur_satisfies_coupling(excited_sys, excited_pre):
    for alpha in (0.1, 2.2):
        st = solve_schur(excited_pre, alpha)
        jump = excited_sys.B_S @ st.a_S - excited_sys.B_R(alpha) @ st.a_R
        assert np.linalg.norm(jump) <= 1e-8 * np.linalg.norm(excited_sys.B_S @ st.a_S)
        assert max(block_residuals(excited_sys, alpha, st.a_S, st.a_R, st.lam)) <= 1e-8


def test_offline_online_factorization_count(small_cfg):
    sys_ = assemble_system(small_cfg)
    before = factorizations.count
    pre = precompute_schur(sys_)
    for alpha in np.linspace(0, 2 * np.pi, 50, endpoint=False):
        solve_schur(pre, alpha)
    assert factorizations.count - before == 2


def test_degree_above_trace_dofs_is_unstable(small_sys):
    bound = sum(small_sys.trace_dofs)
    N = bound // 2 + 1
    big = assemble_system(small_sys.cfg, meshes=(small_sys.rotor, small_sys.stator), N=N)
    pre = precompute_schur(big)
    assert interface_condition(pre.K_int(0.3)) > COND_LIMIT
    with pytest.raises(InstabilityError) as info:
        solve_interface(pre, 0.3)
    assert info.value.condition > COND_LIMIT


def test_moderate_degree_is_stable(small_sys):
    N = sum(small_sys.trace_dofs) // 4
    big = assemble_system(small_sys.cfg, meshes=(small_sys.rotor, small_sys.stator), N=N)
    pre = precompute_schur(big)
    assert interface_condition(pre.K_int(0.3)) < COND_LIMIT
    solve_interface(pre, 0.3)
