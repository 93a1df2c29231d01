import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlaplace import numerics
from qlaplace.apps import dlt_matrix
from qlaplace.circuit import SimulationTooLarge, extract_block
from qlaplace.numerics import SeriesKind
from qlaplace.qlt import (
    QltProblem,
    as_problem,
    build_qlt,
    certified_alpha,
    plan_matrix,
    plan_series,
    random_problem,
    resource_report,
    verify_qlt,
)

LN2 = math.log(2)


def encoded(be):
    return be.alpha * extract_block(be.circuit, be.n)


# problem validation


@pytest.mark.parametrize(
    "x, y, eps, kind",
    [
        ([0, 1, 2], [0, 1, 2], 0.1, "taylor"),
        ([0], [0], 0.1, "taylor"),
        ([0, 1], [0, 1, 2, 3], 0.1, "taylor"),
        ([0, 1], [0, 1], 1.0, "taylor"),
        ([0, 1], [0, 1], 0.0, "taylor"),
        ([0, 1j], [0, 1], 0.1, "chebyshev"),
        ([0, np.inf], [0, 1], 0.1, "taylor"),
    ],
)
def test_problem_validation(x, y, eps, kind):
    with pytest.raises(ValueError):
        as_problem(x, y, eps, kind)


def test_problem_derived_fields():
    p = as_problem([0.5, -2], [1, 0.25], 0.1)
    assert (p.N, p.n, p.x_max, p.y_max, p.product) == (2, 1, 2.0, 1.0, 2.0)
    assert p.is_real and not p.degenerate


# plan_series


def test_plan_degenerate():
    plan = plan_series(as_problem([0, 0], [0, 0], 0.1))
    assert plan.K == 0 and plan.terms == 1 and plan.alpha == 1.0
    assert np.allclose(plan_matrix(plan), np.full((2, 2), 0.5))


def test_plan_taylor_ln2():
    plan = plan_series(as_problem([0, LN2], [0, 1], 1e-3))
    assert plan.product == pytest.approx(LN2)
    assert plan.K == 5
    assert numerics.taylor_tail_bound(LN2, 4) > 1e-3
    assert numerics.taylor_tail_bound(LN2, 5) == pytest.approx(3.1e-4, rel=0.05)
    assert plan.weights == pytest.approx([LN2**k / math.factorial(k) for k in range(6)])


def test_plan_chebyshev_weights():
    plan = plan_series(as_problem([0, 1], [0, 1], 1e-3, "chebyshev"))
    assert plan.K == 5
    e = math.e
    assert plan.weights[:3] == pytest.approx([e, e, e / 4])
    assert plan.alpha == pytest.approx(e * (2 * math.exp(0.5) - 1))


def test_plan_budget_split():
    p = random_problem(2, 1e-2, seed=5)
    plan = plan_series(p)
    assert plan.truncation_bound <= p.eps / 3
    assert plan.normalization_gap <= p.eps / 3
    assert plan.diagonal_eps == pytest.approx(p.eps / (6 * plan.alpha))


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**31),
    n=st.integers(1, 3),
    kind=st.sampled_from(list(SeriesKind)),
    bound=st.floats(0.1, 2.0),
)
def test_plan_eigenvalue_moduli(seed, n, kind, bound):
    p = random_problem(n, 1e-2, kind, seed=seed, complex_values=kind is not SeriesKind.CHEBYSHEV, bound=bound)
    plan = plan_series(p)
    for v in plan.left + plan.right:
        assert np.max(np.abs(v)) <= 1 + 1e-12
    assert all(w >= 0 for w in plan.weights)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 3), kind=st.sampled_from(list(SeriesKind)))
def test_plan_matrix_within_two_thirds_eps(seed, n, kind):
    # the dense series matrix obeys truncation + normalization gap <= 2 eps / 3
    p = random_problem(n, 1e-2, kind, seed=seed, complex_values=kind is SeriesKind.DOUBLE_CHEBYSHEV)
    err = numerics.spectral_norm(dlt_matrix(p.x, p.y) - plan_matrix(plan_series(p)))
    assert err <= 2 * p.eps / 3


# build_qlt


def test_build_degenerate():
    be = build_qlt(as_problem([0, 0], [0, 0], 0.1))
    assert be.alpha == 1.0
    assert np.allclose(extract_block(be.circuit, 1), np.full((2, 2), 0.5), atol=1e-12)


def test_build_ln2_example():
    p = as_problem([0, LN2], [0, 1], 1e-3)
    be = build_qlt(p)
    oracle = 0.5 * np.array([[1, 1], [1, 2]])
    assert np.allclose(dlt_matrix(p.x, p.y), oracle)
    assert numerics.spectral_norm(oracle - encoded(be)) <= 1e-3
    assert be.alpha == pytest.approx(2.0)


def test_build_complex_example():
    p = as_problem([0, 1j * math.pi / 4], [0, 1], 1e-3)
    oracle = 0.5 * np.array([[1, 1], [1, np.exp(1j * math.pi / 4)]])
    assert numerics.spectral_norm(oracle - encoded(build_qlt(p))) <= 1e-3


def test_dlt_matrix_examples():
    assert np.allclose(dlt_matrix([0, 0], [0, 0]), np.full((2, 2), 0.5))
    assert np.allclose(dlt_matrix([0, 1j * math.pi], [0, 1]), 0.5 * np.array([[1, 1], [1, -1]]))
    with pytest.raises(ValueError):
        dlt_matrix([0, 1], [0, 1, 2, 3])


def test_certified_alpha_formulas():
    p = 0.7
    assert certified_alpha(SeriesKind.TAYLOR, p) == pytest.approx(math.exp(p))
    cheb = math.exp(p) * (2 * math.exp(p / 2) - 1)
    assert certified_alpha(SeriesKind.CHEBYSHEV, p) == pytest.approx(cheb)
    assert certified_alpha(SeriesKind.DOUBLE_CHEBYSHEV, p) == pytest.approx(cheb**2)


# resource report


def test_resource_invocation_counts():
    r = resource_report(build_qlt(p := as_problem([0, 0], [0, 0], 0.1)), plan_series(p))
    assert r.controlled_diagonal_invocations == 2
    p = as_problem([0, LN2], [0, 1], 1e-3)
    plan = plan_series(p)
    r = resource_report(build_qlt(p, plan), plan)
    assert plan.K == 5 and r.controlled_diagonal_invocations == 12
    assert r.total_qubits == sum(r.registers.values())
    assert r.system_qubits == 1
    d = r.to_dict()
    assert {"alpha", "eps", "K", "size", "depth", "registers", "controlled_diagonal_invocations"} <= d.keys()


def test_resource_double_chebyshev_invocations():
    p = random_problem(1, 1e-2, SeriesKind.DOUBLE_CHEBYSHEV, seed=3, complex_values=True)
    plan = plan_series(p)
    r = resource_report(build_qlt(p, plan), plan)
    assert r.controlled_diagonal_invocations == 2 * (plan.K + 1) ** 2


def test_resource_growth_n2_to_n3():
    sizes = {}
    for n in (2, 3):
        base = random_problem(n, 1e-2, seed=0)
        p = QltProblem(base.x, base.y, base.eps, base.kind, K_override=5)
        plan = plan_series(p)
        sizes[n] = resource_report(build_qlt(p, plan), plan).size
    assert sizes[3] / sizes[2] < 1.9


# verify_qlt


def test_verify_degenerate():
    p = as_problem([0, 0, 0, 0], [0, 0, 0, 0], 0.1)
    assert verify_qlt(p, build_qlt(p)).measured_error <= 1e-9


@pytest.mark.parametrize("kind", [SeriesKind.TAYLOR, SeriesKind.CHEBYSHEV])
def test_verify_random_n2(kind):
    p = random_problem(2, 1e-2, kind, seed=11)
    assert verify_qlt(p, build_qlt(p)).passed


def test_verify_forced_failure():
    p = QltProblem(np.array([0, 1.0]), np.array([0, 1.0]), 1e-6, SeriesKind.TAYLOR, K_override=0)
    result = verify_qlt(p, build_qlt(p))
    assert not result.passed and result.measured_error > p.eps


def test_verify_refuses_large():
    p = random_problem(5, 1e-2, seed=0)
    with pytest.raises(SimulationTooLarge):
        verify_qlt(p, build_qlt(p))


def test_certificate_soundness_sweep():
    count = 0
    for n in (1, 2):
        for kind in (SeriesKind.TAYLOR, SeriesKind.CHEBYSHEV):
            for eps in (1e-2, 1e-3):
                for seed in range(4):
                    p = random_problem(n, eps, kind, seed=100 + seed)
                    be = build_qlt(p)
                    assert verify_qlt(p, be).passed
                    # normalization dominance
                    assert be.alpha >= numerics.spectral_norm(dlt_matrix(p.x, p.y))
                    count += 1
    assert count == 32


@pytest.mark.parametrize("seed", range(3))
def test_taylor_chebyshev_agree(seed):
    pt = random_problem(2, 1e-2, SeriesKind.TAYLOR, seed=seed)
    pc = random_problem(2, 1e-2, SeriesKind.CHEBYSHEV, seed=seed)
    diff = numerics.spectral_norm(encoded(build_qlt(pt)) - encoded(build_qlt(pc)))
    assert diff <= pt.eps + pc.eps


def test_double_chebyshev_structure():
    p = random_problem(1, 1e-2, SeriesKind.DOUBLE_CHEBYSHEV, seed=1, complex_values=True)
    plan = plan_series(p)
    be = build_qlt(p, plan)
    P = p.product
    assert plan.terms == (plan.K + 1) ** 2
    assert be.alpha == pytest.approx(math.exp(2 * P) * (2 * math.exp(P / 2) - 1) ** 2, rel=1e-14)
    assert verify_qlt(p, be).passed


def test_build_is_deterministic():
    p = random_problem(2, 1e-2, seed=4)
    assert build_qlt(p).circuit == build_qlt(p).circuit
