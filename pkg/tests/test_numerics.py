import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlaplace import numerics
from qlaplace.numerics import SeriesKind


# tail bounds


def test_taylor_tail_examples():
    assert numerics.taylor_tail_bound(0.0, 4) == 0.0
    assert numerics.taylor_tail_bound(1.0, 3) == pytest.approx(math.e / 24, rel=1e-14)
    assert numerics.taylor_tail_bound(1.0, 6) == pytest.approx(math.e / 5040, rel=1e-14)


def test_chebyshev_tail_examples():
    assert numerics.chebyshev_tail_bound(0.0, 0) == 0.0
    assert numerics.chebyshev_tail_bound(1.0, 3) == pytest.approx(math.e / 96, rel=1e-14)
    assert numerics.chebyshev_tail_bound(2.0, 1) > 0
    with pytest.raises(ValueError):
        numerics.chebyshev_tail_bound(2.0, 0)


def test_complex_double_tail_examples():
    assert numerics.complex_double_tail_bound(0.0, 0) == 0.0
    assert numerics.complex_double_tail_bound(1.0, 3) == pytest.approx(8 * math.exp(2.5) / 16 / 24, rel=1e-14)
    expected = 8 * math.exp(2.5) * 0.5**11 / math.factorial(11)
    assert numerics.complex_double_tail_bound(1.0, 10) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.19e-9, rel=1e-2)
    with pytest.raises(ValueError):
        numerics.complex_double_tail_bound(3.0, 1)


def test_log_domain_matches_direct_and_saturates():
    # exponent above the log-domain switch, compared against mpmath
    got = numerics.taylor_tail_bound(3.0, 150)
    want = float(mpmath.e**3 * mpmath.mpf(3) ** 151 / mpmath.factorial(151))
    assert got == pytest.approx(want, rel=1e-10)
    assert math.isinf(numerics.taylor_tail_bound(700.0, 2))


def test_power_over_factorial():
    assert numerics.power_over_factorial(2.0, 3) == pytest.approx(8 / 6)
    assert numerics.power_over_factorial(0.0, 0) == 1.0
    assert numerics.power_over_factorial(10.0, 200) == pytest.approx(
        float(mpmath.mpf(10) ** 200 / mpmath.factorial(200)), rel=1e-10
    )


# truncation order


def test_truncation_order_examples():
    r = numerics.truncation_order(SeriesKind.TAYLOR, 0.0, 0.5)
    assert (r.K, r.bound) == (0, 0.0)
    assert numerics.truncation_order(SeriesKind.TAYLOR, 1.0, 1e-3).K == 6
    r = numerics.truncation_order(SeriesKind.CHEBYSHEV, 1.0, 1e-3)
    assert r.K == 5
    assert r.bound == pytest.approx(4 * math.e * 0.5**6 / 720, rel=1e-12)
    assert numerics.chebyshev_tail_bound(1.0, 4) > 1e-3


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 2.0])
def test_truncation_order_rejects_eps(eps):
    with pytest.raises(ValueError):
        numerics.truncation_order(SeriesKind.TAYLOR, 1.0, eps)


@settings(max_examples=60, deadline=None)
@given(
    kind=st.sampled_from(list(SeriesKind)),
    product=st.floats(0.0, 8.0),
    eps=st.floats(1e-10, 0.9),
)
def test_truncation_order_minimal(kind, product, eps):
    r = numerics.truncation_order(kind, product, eps)
    assert r.bound <= eps
    assert r.bound == numerics.tail_bound(kind, product, r.K)
    if kind is not SeriesKind.TAYLOR:
        assert r.K + 1 >= product
    if r.K >= 1 and (kind is SeriesKind.TAYLOR or r.K >= product):
        assert numerics.tail_bound(kind, product, r.K - 1) > eps


# residual checks against mpmath


@mpmath.workdps(40)
def _taylor_residual(x, y, K):
    z = mpmath.mpf(x) * mpmath.mpf(y)
    return float(abs(mpmath.e**z - sum(z**k / mpmath.factorial(k) for k in range(K + 1))))


@mpmath.workdps(40)
def _chebyshev_residual(x, y, x_max, y_max, K):
    xt, yt = mpmath.mpf(y_max) * x, mpmath.mpf(y) / y_max
    series = mpmath.besseli(0, xt)
    for k in range(1, K + 1):
        series += 2 * mpmath.besseli(k, xt) * mpmath.chebyt(k, yt)
    return float(abs(mpmath.e ** (mpmath.mpf(x) * y) - series))


def test_taylor_bound_holds_on_samples():
    rng = np.random.default_rng(1)
    for _ in range(60):
        x_max, y_max = rng.uniform(0.1, 2.0, 2)
        x, y = rng.uniform(-x_max, x_max), rng.uniform(-y_max, y_max)
        K = int(rng.integers(0, 13))
        assert _taylor_residual(x, y, K) <= numerics.taylor_tail_bound(x_max * y_max, K)


def test_chebyshev_bound_holds_on_samples():
    rng = np.random.default_rng(2)
    checked = 0
    while checked < 60:
        x_max, y_max = rng.uniform(0.1, 2.0, 2)
        K = int(rng.integers(0, 13))
        if K + 1 < x_max * y_max:
            continue
        x, y = rng.uniform(-x_max, x_max), rng.uniform(-y_max, y_max)
        assert _chebyshev_residual(x, y, x_max, y_max, K) <= numerics.chebyshev_tail_bound(x_max * y_max, K)
        checked += 1


# special functions


def test_bessel_examples():
    assert numerics.bessel_I(0, 0) == 1
    assert numerics.bessel_I(3, 0) == 0
    assert numerics.bessel_I(0, 1) == pytest.approx(1.2660658777520082, rel=1e-13)
    # subnormal argument: z/2 underflows to zero
    assert numerics.bessel_I(0, 5e-324) == 1 and numerics.bessel_I(2, 5e-324) == 0


@settings(max_examples=80, deadline=None)
@given(
    k=st.integers(0, 20),
    re=st.floats(-20, 20),
    im=st.floats(-20, 20),
)
def test_bessel_matches_mpmath(k, re, im):
    z = complex(re, im)
    want = complex(mpmath.besseli(k, mpmath.mpc(re, im)))
    got = numerics.bessel_I(k, z)
    # relative accuracy against the scale of the series terms, which bounds
    # the achievable accuracy near zeros of I_k for complex arguments
    scale = abs(complex(mpmath.besseli(k, abs(z))))
    assert abs(got - want) <= 1e-12 * max(scale, 1e-300)


def test_bessel_rejects_large_argument():
    with pytest.raises(ValueError):
        numerics.bessel_I(0, 51.0)


def test_bessel_vec_matches_scalar():
    z = np.array([0.0, 0.5, -1.2 + 0.3j])
    v = numerics.bessel_I_vec(2, z)
    assert np.allclose(v, [numerics.bessel_I(2, zz) for zz in z], rtol=0, atol=1e-15)


def test_chebyshev_T_examples():
    assert numerics.chebyshev_T(0, 0.77) == 1
    assert numerics.chebyshev_T(1, 0.3) == pytest.approx(0.3)
    assert numerics.chebyshev_T(2, 0.5) == pytest.approx(2 * 0.25 - 1)
    assert numerics.chebyshev_T(3, 1 + 5e-13) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        numerics.chebyshev_T(2, 1.01)


def test_chebyshev_T_bounded_on_grid():
    t = np.linspace(-1, 1, 2001)
    for k in range(65):
        assert np.all(np.abs(numerics.chebyshev_T(k, t)) <= 1 + 1e-15)


@settings(max_examples=50, deadline=None)
@given(k=st.integers(0, 30), t=st.floats(-1, 1))
def test_chebyshev_T_recurrence_oracle(k, t):
    a, b = 1.0, t
    for _ in range(k):
        a, b = b, 2 * t * b - a
    assert numerics.chebyshev_T(k, t) == pytest.approx(a, abs=1e-10)


def test_i_k_max_examples():
    assert numerics.i_k_max(0, 0.0) == 1.0
    assert numerics.i_k_max(0, 1.0) == pytest.approx(math.e)
    assert abs(numerics.bessel_I(0, 1.0)) <= math.e
    assert numerics.i_k_max(2, 1.0) == pytest.approx(math.e / 8)


@settings(max_examples=60, deadline=None)
@given(k=st.integers(0, 15), product=st.floats(0, 10), frac=st.floats(-1, 1))
def test_i_k_max_dominates_bessel(k, product, frac):
    assert abs(numerics.bessel_I(k, frac * product)) <= numerics.i_k_max(k, product) * (1 + 1e-12)


# spectral norm


def test_spectral_norm_examples():
    assert numerics.spectral_norm(np.eye(4)) == pytest.approx(1.0)
    assert numerics.spectral_norm(np.full((8, 8), 1 / 8)) == pytest.approx(1.0)
    assert numerics.spectral_norm(np.diag([0.3, -0.7])) == pytest.approx(0.7)


def test_spectral_norm_power_iteration_matches_svd():
    rng = np.random.default_rng(3)
    m = rng.normal(size=(128, 96)) + 1j * rng.normal(size=(128, 96))
    assert numerics.spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-10)


def test_spectral_norm_rejects_nonfinite():
    with pytest.raises(ValueError):
        numerics.spectral_norm(np.array([[np.nan]]))
