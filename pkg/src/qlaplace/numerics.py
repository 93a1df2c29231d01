"""Scalar special functions, truncation bounds and matrix norms.

Everything here is a pure function of its arguments. The bounds are the
right-hand sides of the exponential-series truncation inequalities and are
evaluated in log-space once the powers involved get large.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

BESSEL_MAX_ABS_ARG = 50.0
_LOG_DOMAIN_EXPONENT = 120
_SERIES_RTOL = 1e-18


class SeriesKind(str, enum.Enum):
    TAYLOR = "taylor"
    CHEBYSHEV = "chebyshev"
    DOUBLE_CHEBYSHEV = "double_chebyshev"


@dataclass(frozen=True)
class TruncationBound:
    K: int
    bound: float
    product: float


def _checked_product(product: float) -> float:
    product = float(product)
    if not math.isfinite(product) or product < 0:
        raise ValueError(f"product must be finite and nonnegative, got {product}")
    return product


def _scaled_power_over_factorial(log_prefactor: float, base: float, power: int) -> float:
    """exp(log_prefactor) * base**power / power!, saturating to inf."""
    if base == 0.0:
        return math.exp(log_prefactor) if power == 0 else 0.0
    if power <= _LOG_DOMAIN_EXPONENT:
        try:
            value = math.exp(log_prefactor) * base**power / math.factorial(power)
        except OverflowError:
            value = math.inf
        if math.isfinite(value):
            return value
    log_value = log_prefactor + power * math.log(base) - math.lgamma(power + 1)
    if log_value > 709.0:
        return math.inf
    return math.exp(log_value)


def taylor_tail_bound(product: float, K: int) -> float:
    """e^p p^(K+1) / (K+1)! for the Taylor series of e^(xy), p = x_max*y_max."""
    p = _checked_product(product)
    if K < 0:
        raise ValueError("K must be nonnegative")
    return _scaled_power_over_factorial(p, p, K + 1)


def _require_side_condition(p: float, K: int) -> None:
    if K < 0:
        raise ValueError("K must be nonnegative")
    if K + 1 < p:
        raise ValueError(f"Chebyshev bound needs K+1 >= x_max*y_max (K={K}, product={p})")


def chebyshev_tail_bound(product: float, K: int) -> float:
    """4 e^p (p/2)^(K+1) / (K+1)!, valid only when K+1 >= p."""
    p = _checked_product(product)
    _require_side_condition(p, K)
    return _scaled_power_over_factorial(p + math.log(4.0), p / 2.0, K + 1)


def complex_double_tail_bound(product: float, K: int) -> float:
    """8 e^(5p/2) (p/2)^(K+1) / (K+1)! for the double Chebyshev series."""
    p = _checked_product(product)
    _require_side_condition(p, K)
    return _scaled_power_over_factorial(2.5 * p + math.log(8.0), p / 2.0, K + 1)


_TAIL_BOUNDS = {
    SeriesKind.TAYLOR: taylor_tail_bound,
    SeriesKind.CHEBYSHEV: chebyshev_tail_bound,
    SeriesKind.DOUBLE_CHEBYSHEV: complex_double_tail_bound,
}


def tail_bound(kind: SeriesKind, product: float, K: int) -> float:
    return _TAIL_BOUNDS[SeriesKind(kind)](product, K)


def truncation_order(kind: SeriesKind, product: float, eps: float) -> TruncationBound:
    """Smallest K whose tail bound for ``kind`` is at most ``eps``.

    Linear scan from K = 0 (or from the first K allowed by the side
    condition K+1 >= p for the Chebyshev kinds). The search always
    terminates because every bound tends to zero factorially.
    """
    kind = SeriesKind(kind)
    p = _checked_product(product)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    K = 0
    if kind is not SeriesKind.TAYLOR:
        K = max(0, math.ceil(p) - 1)
    while True:
        bound = tail_bound(kind, p, K)
        if bound <= eps:
            return TruncationBound(K=K, bound=bound, product=p)
        K += 1


def bessel_I(k: int, z: complex) -> complex:
    """Modified Bessel function of the first kind I_k(z) for integer k >= 0.

    Ascending series sum_m (z/2)^(k+2m) / (m! (m+k)!), summed until the
    terms drop below 1e-18 of the running sum past the peak term. Limited to
    |z| <= 50. For arguments with Re z dominant the terms do not cancel and
    the result is accurate to ~1e-14 relative; for strongly imaginary z the
    error is absolute, of order 1e-16 * e^|z|.
    """
    if k < 0:
        raise ValueError("order must be a nonnegative integer")
    z = complex(z)
    if abs(z) > BESSEL_MAX_ABS_ARG:
        raise ValueError(f"|z| = {abs(z):.3g} outside the supported domain |z| <= {BESSEL_MAX_ABS_ARG}")
    if z == 0:
        return 1.0 + 0j if k == 0 else 0j
    half = z / 2.0
    if half == 0:
        # z/2 underflowed: only the k = 0 constant term survives
        return 1.0 + 0j if k == 0 else 0j
    term = np.exp(k * np.log(half) - math.lgamma(k + 1))
    quarter = half * half
    re_parts = [term.real]
    im_parts = [term.imag]
    total = term
    m = 0
    while True:
        m += 1
        term = term * quarter / (m * (m + k))
        re_parts.append(term.real)
        im_parts.append(term.imag)
        total += term
        past_peak = m * (m + k) > abs(quarter)
        if past_peak and abs(term) <= _SERIES_RTOL * max(abs(total), 1e-300):
            break
        if m > 500:
            break
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def bessel_I_vec(k: int, z) -> np.ndarray:
    return np.array([bessel_I(k, complex(v)) for v in np.ravel(z)], dtype=complex).reshape(np.shape(z))


def chebyshev_T(k: int, t):
    """T_k(t) = cos(k arccos t); inputs within 1e-12 of [-1, 1] are clamped."""
    if k < 0:
        raise ValueError("order must be nonnegative")
    t_arr = np.asarray(t, dtype=float)
    if np.any(np.abs(t_arr) > 1.0 + 1e-12):
        raise ValueError("Chebyshev argument outside [-1, 1]")
    values = np.cos(k * np.arccos(np.clip(t_arr, -1.0, 1.0)))
    if np.ndim(values) == 0:
        return float(values)
    return values


def power_over_factorial(base: float, k: int) -> float:
    """base^k / k! for base >= 0, evaluated in log-space when needed."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return _scaled_power_over_factorial(0.0, _checked_product(base), k)


def i_k_max(k: int, product: float) -> float:
    """e^p (p/2)^k / k!, an upper bound on |I_k(z)| for |z| <= p."""
    p = _checked_product(product)
    if k < 0:
        raise ValueError("order must be nonnegative")
    return _scaled_power_over_factorial(p, p / 2.0, k)


def spectral_norm(M, *, dense_max_dim: int = 64, tol: float = 1e-12, max_iter: int = 20000) -> float:
    """Largest singular value.

    Dense SVD up to ``dense_max_dim``; power iteration on M^H M above that.
    """
    A = np.atleast_2d(np.asarray(M, dtype=complex))
    if A.ndim != 2:
        raise ValueError("expected a matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    if A.size == 0:
        return 0.0
    if max(A.shape) <= dense_max_dim:
        return float(np.linalg.norm(A, 2))
    rng = np.random.default_rng(0)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    sigma_sq = 0.0
    for _ in range(max_iter):
        w = A.conj().T @ (A @ v)
        new_sigma_sq = float(np.real(np.vdot(v, w)))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
        if abs(new_sigma_sq - sigma_sq) <= tol * max(new_sigma_sq, 1e-300):
            sigma_sq = new_sigma_sq
            break
        sigma_sq = new_sigma_sq
    return math.sqrt(max(sigma_sq, 0.0))
