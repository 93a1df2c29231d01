"""Classical oracles and application pipelines built on the QLT.

Index convention: the QLT maps input index j to output index i through
e^{x_i y_j}/N, so the coefficient attached to the *output* register goes in
``x`` and the one attached to the *input* register goes in ``y``. For a
Z-transform the output is indexed by the evaluation point z and the input
by the sequence index; for the continuous Laplace pipeline the output is
indexed by the contour point and the input by the time grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import numerics
from .blockenc import BlockEncoding
from .circuit.simulate import MAX_SIM_QUBITS, SimulationTooLarge, project_output
from .numerics import SeriesKind
from .qlt import MAX_VERIFY_N, QltProblem, build_qlt, plan_series, resource_report

SUP_GRID_POINTS = 2**14
NORM_TOL = 1e-9


def _power_of_two(length: int) -> int:
    if length < 1 or length & (length - 1):
        raise ValueError(f"length {length} is not a power of two")
    return length.bit_length() - 1


def dlt_matrix(x: Sequence[complex], y: Sequence[complex]) -> np.ndarray:
    """Exact QLT matrix with entries e^{x_i y_j}/N."""
    x = np.asarray(x, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if x.shape != y.shape:
        raise ValueError(f"x and y lengths differ: {x.shape[0]} vs {y.shape[0]}")
    _power_of_two(x.shape[0])
    return np.exp(np.outer(x, y)) / x.shape[0]


# Z-transform


def ztransform_problem(
    z_points: Sequence[complex], eps: float = 1e-2, kind: SeriesKind = SeriesKind.TAYLOR
) -> QltProblem:
    """QLT problem whose row j is sum_i s(i) z_j^{-i} / N.

    Output coefficient x_j = -ln z_j (principal branch), input coefficient
    y_i = i.
    """
    z = np.asarray(z_points, dtype=complex).ravel()
    if np.any(z == 0):
        raise ValueError("z points must be nonzero")
    N = z.shape[0]
    _power_of_two(N)
    return QltProblem(-np.log(z), np.arange(N, dtype=float), eps, kind)


def ztransform_direct(s: Sequence[complex], z_points: Sequence[complex]) -> np.ndarray:
    """Classical Z{s}(z_j) = sum_i s(i) z_j^{-i}."""
    s = np.asarray(s, dtype=complex).ravel()
    z = np.asarray(z_points, dtype=complex).ravel()
    if np.any(z == 0):
        raise ValueError("z points must be nonzero")
    i = np.arange(s.shape[0])
    return (z[:, None] ** (-i[None, :])) @ s


def ztransform_via_qlt_matrix(s: Sequence[complex], z_points: Sequence[complex]) -> np.ndarray:
    """N * dlt_matrix(-ln z, i) @ s, the classical path through the QLT oracle."""
    p = ztransform_problem(z_points)
    return p.N * dlt_matrix(p.x, p.y) @ np.asarray(s, dtype=complex)


def ztransform_via_circuit(s: Sequence[complex], z_points: Sequence[complex], eps: float = 1e-2):
    """Z{s}(z_j) from the simulated block-encoding.

    Returns (values, error_bound) where the bound is N * eps * ||s|| from the
    block-encoding certificate.
    """
    s = np.asarray(s, dtype=complex).ravel()
    p = ztransform_problem(z_points, eps)
    be = build_qlt(p)
    norm = float(np.linalg.norm(s))
    out = project_output(be.circuit, be.n, s / norm)
    return p.N * be.alpha * norm * out, p.N * eps * norm


# continuous Laplace transform


def truncation_M(k: float, a: float, t0: float, sigma_min: float, eps: float) -> float:
    """Horizon M = max(t0, ln(k/(eps (sigma_min - a))) / (sigma_min - a)), floored at 0."""
    if not sigma_min > a:
        raise ValueError(f"sigma_min={sigma_min} must exceed a={a}")
    if not (k > 0 and eps > 0):
        raise ValueError("k and eps must be positive")
    gap = sigma_min - a
    return max(t0, math.log(k / (eps * gap)) / gap, 0.0)


def truncation_bound(k: float, a: float, sigma: float, M: float) -> float:
    """k e^{-(sigma - a) M} / (sigma - a): the tail integral of k e^{(a - sigma) t}."""
    if not sigma > a:
        raise ValueError("sigma must exceed a")
    return k * math.exp(-(sigma - a) * M) / (sigma - a)


def discretization_bound(M: float, N: int, sigma: float, omega: float, sup_ef: float, sup_efprime: float) -> float:
    """(M^2/2N)(|sigma + i omega| sup|e^{-sigma t} f| + sup|e^{-sigma t} f'|)."""
    if N < 1:
        raise ValueError("N must be at least 1")
    return (M * M / (2.0 * N)) * (math.hypot(sigma, omega) * sup_ef + sup_efprime)


def time_grid(M: float, N: int) -> np.ndarray:
    return np.arange(N) * (M / N)


def continuous_laplace_quadrature(f_samples: Sequence[float], M: float, z_points: Sequence[complex]) -> np.ndarray:
    """Left Riemann sum (M/N) sum_i e^{-z_j t_i} f(t_i) with t_i = i M/N."""
    f = np.asarray(f_samples, dtype=complex).ravel()
    z = np.asarray(z_points, dtype=complex).ravel()
    N = f.shape[0]
    t = time_grid(M, N)
    return (M / N) * (np.exp(-np.outer(z, t)) @ f)


def gauss_legendre_integral(h: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, panels: int = 64, order: int = 32):
    """Composite Gauss-Legendre quadrature of a smooth vector-valued h(t)."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
        total = total + 0.5 * (b - a) * (h(t) @ weights)
    return total


def truncated_laplace(f: Callable[[np.ndarray], np.ndarray], M: float, z_points: Sequence[complex]) -> np.ndarray:
    """int_0^M e^{-z t} f(t) dt for each z, by Gauss-Legendre quadrature."""
    z = np.asarray(z_points, dtype=complex).ravel()
    if M == 0:
        return np.zeros_like(z)
    return gauss_legendre_integral(lambda t: np.exp(-np.outer(z, t)) * f(t)[None, :], 0.0, M)


def sup_bounds(
    f: Callable[[np.ndarray], np.ndarray],
    M: float,
    sigma: float,
    fprime: Callable[[np.ndarray], np.ndarray] | None = None,
    points: int = SUP_GRID_POINTS,
) -> tuple[float, float]:
    """Grid maxima of |e^{-sigma t} f| and |e^{-sigma t} f'| on [0, M].

    Without ``fprime`` the derivative comes from central differences on the
    same grid.
    """
    t = np.linspace(0.0, M, points)
    damp = np.exp(-sigma * t)
    fv = np.asarray(f(t), dtype=complex)
    if fprime is not None:
        dv = np.asarray(fprime(t), dtype=complex)
    else:
        dv = np.gradient(fv, t) if M > 0 else np.zeros_like(fv)
    return float(np.max(np.abs(damp * fv))), float(np.max(np.abs(damp * dv)))


def normalized_distance_bound(diff_norm: float, ref_norm: float) -> float:
    """||u/|u| - v/|v||| <= 2 ||u - v|| / ||v||, capped at 2."""
    if ref_norm <= 0:
        return 2.0
    return min(2.0, 2.0 * diff_norm / ref_norm)


@dataclass(frozen=True, eq=False)
class ContinuousProblem:
    """Job description for the continuous Laplace pipeline.

    ``f`` is a callable on arrays of times (or give ``f_values`` on the
    t_i = i M/N grid together with ``M``). ``z_points`` are the contour
    samples, or ``contour`` maps s in [0, 1) to z(s) and z_j = z(j/N).
    ``exact`` is an optional closed-form L{f}(z) used only for reporting.
    """

    n: int
    eps: float
    k: float
    a: float
    t0: float = 0.0
    f: Callable[[np.ndarray], np.ndarray] | None = None
    fprime: Callable[[np.ndarray], np.ndarray] | None = None
    f_values: np.ndarray | None = None
    z_points: np.ndarray | None = None
    contour: Callable[[np.ndarray], np.ndarray] | None = None
    M: float | None = None
    kind: SeriesKind = SeriesKind.TAYLOR
    exact: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 < self.eps < 1:
            raise ValueError("eps must lie in (0, 1)")
        if (self.f is None) == (self.f_values is None):
            raise ValueError("give exactly one of f or f_values")
        if self.f_values is not None:
            vals = np.asarray(self.f_values, dtype=float).ravel()
            if vals.shape[0] != self.N:
                raise ValueError(f"f_values needs {self.N} samples")
            if self.M is None:
                raise ValueError("f_values requires the horizon M")
            object.__setattr__(self, "f_values", vals)
        if (self.z_points is None) == (self.contour is None):
            raise ValueError("give exactly one of z_points or contour")
        if self.z_points is not None:
            z = np.asarray(self.z_points, dtype=complex).ravel()
            if z.shape[0] != self.N:
                raise ValueError(f"z_points needs {self.N} entries")
        else:
            z = np.asarray(self.contour(np.arange(self.N) / self.N), dtype=complex).ravel()
        object.__setattr__(self, "z_points", z)
        object.__setattr__(self, "kind", SeriesKind(self.kind))
        if not self.sigma_min > self.a:
            raise ValueError(f"min Re z = {self.sigma_min} must exceed a = {self.a}")

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def sigma_min(self) -> float:
        return float(np.min(self.z_points.real))

    def horizon(self) -> float:
        if self.M is not None:
            return float(self.M)
        return truncation_M(self.k, self.a, self.t0, self.sigma_min, self.eps)

    def samples(self, M: float) -> np.ndarray:
        if self.f_values is not None:
            return self.f_values
        return np.asarray(self.f(time_grid(M, self.N)), dtype=float)


@dataclass(frozen=True)
class LaplaceReport:
    n: int
    M: float
    eps: float
    empty: bool
    success_probability: float
    qlt_state_error: float
    qlt_state_budget: float
    truncation_bounds: tuple[float, ...]
    discretization_bounds: tuple[float, ...]
    truncation_errors: tuple[float, ...] | None
    discretization_errors: tuple[float, ...] | None
    quadrature_state_error: float | None
    quadrature_state_budget: float
    final_state_error: float | None
    combined_budget: float
    grid_condition_met: bool
    success_exponent: float
    resources: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            out[name] = list(v) if isinstance(v, tuple) else v
        return out


def success_probability(be: BlockEncoding, psi: Sequence[complex]) -> float:
    """Squared norm of the ancilla-zero part of U (|0> |psi>)."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if psi.shape[0] != 2**be.n:
        raise ValueError(f"psi must have dimension {2**be.n}")
    if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
        raise ValueError("psi must be normalized")
    if be.total_qubits > MAX_SIM_QUBITS:
        raise SimulationTooLarge(be.total_qubits)
    out = project_output(be.circuit, be.n, psi)
    return float(min(1.0, np.vdot(out, out).real))


def _empty_report(p: ContinuousProblem, M: float) -> LaplaceReport:
    zeros = tuple(0.0 for _ in range(p.N))
    return LaplaceReport(
        n=p.n,
        M=M,
        eps=p.eps,
        empty=True,
        success_probability=0.0,
        qlt_state_error=0.0,
        qlt_state_budget=0.0,
        truncation_bounds=zeros,
        discretization_bounds=zeros,
        truncation_errors=None,
        discretization_errors=None,
        quadrature_state_error=None,
        quadrature_state_budget=0.0,
        final_state_error=None,
        combined_budget=0.0,
        grid_condition_met=p.N >= M * M / p.eps,
        success_exponent=_success_exponent(p),
    )


def _success_exponent(p: ContinuousProblem) -> float:
    return (p.a + 2.0 * float(np.max(np.abs(p.z_points)))) / (p.sigma_min - p.a)


def prepare_laplace_state(p: ContinuousProblem) -> LaplaceReport:
    """Run the QLT on |f> and compare the post-selected state with the
    quadrature vector and, when ``p.exact`` is given, the true transform.

    Budgets: the QLT certificate gives ||alpha*out - QLT|f>|| <= eps, hence a
    normalized-state error of at most 2 eps M ||f|| / ||Q|| against the
    Riemann vector Q. The truncation and discretization bounds give
    ||Q - L|| <= E and a normalized error of at most 2 E / ||Q||.
    """
    M = p.horizon()
    f_vals = p.samples(M)
    z = p.z_points
    N = p.N
    if not np.any(f_vals):
        return _empty_report(p, M)
    if p.n > MAX_VERIFY_N:
        raise SimulationTooLarge(p.n)

    problem = QltProblem(-z, time_grid(M, N), p.eps, p.kind)
    plan = plan_series(problem)
    be = build_qlt(problem, plan)
    if be.total_qubits > MAX_SIM_QUBITS:
        raise SimulationTooLarge(be.total_qubits)

    f_norm = float(np.linalg.norm(f_vals))
    out = project_output(be.circuit, be.n, f_vals / f_norm)
    P = float(np.vdot(out, out).real)
    state = out / math.sqrt(P) if P > 0 else out
    Q = continuous_laplace_quadrature(f_vals, M, z)
    Q_norm = float(np.linalg.norm(Q))
    Qn = Q / Q_norm
    qlt_err = float(np.linalg.norm(state - Qn))
    qlt_budget = normalized_distance_bound(p.eps * M * f_norm, Q_norm)

    trunc_b = [truncation_bound(p.k, p.a, float(zj.real), max(M, p.t0)) for zj in z]
    if p.f is not None:
        sups = [sup_bounds(p.f, M, float(zj.real), p.fprime) for zj in z]
    else:
        sups = _sample_sups(f_vals, M, z)
    disc_b = [discretization_bound(M, N, float(zj.real), float(zj.imag), s0, s1) for zj, (s0, s1) in zip(z, sups)]
    E = float(np.linalg.norm(np.array(trunc_b) + np.array(disc_b)))
    quad_budget = normalized_distance_bound(E, Q_norm)

    trunc_err = disc_err = None
    quad_err = final_err = None
    if p.exact is not None and p.f is not None:
        exact = np.asarray(p.exact(z), dtype=complex)
        partial = truncated_laplace(p.f, M, z)
        trunc_err = tuple(float(v) for v in np.abs(exact - partial))
        disc_err = tuple(float(v) for v in np.abs(partial - Q))
        L_n = exact / np.linalg.norm(exact)
        quad_err = float(np.linalg.norm(Qn - L_n))
        final_err = float(np.linalg.norm(state - L_n))

    report = resource_report(be, plan).to_dict()
    return LaplaceReport(
        n=p.n,
        M=M,
        eps=p.eps,
        empty=False,
        success_probability=P,
        qlt_state_error=qlt_err,
        qlt_state_budget=qlt_budget,
        truncation_bounds=tuple(trunc_b),
        discretization_bounds=tuple(disc_b),
        truncation_errors=trunc_err,
        discretization_errors=disc_err,
        quadrature_state_error=quad_err,
        quadrature_state_budget=quad_budget,
        final_state_error=final_err,
        combined_budget=min(2.0, qlt_budget + quad_budget),
        grid_condition_met=N >= M * M / p.eps,
        success_exponent=_success_exponent(p),
        resources=report,
    )


def _sample_sups(f_vals: np.ndarray, M: float, z: np.ndarray) -> list[tuple[float, float]]:
    t = time_grid(M, f_vals.shape[0])
    deriv = np.gradient(f_vals, t) if f_vals.shape[0] > 1 else np.zeros_like(f_vals)
    out = []
    for zj in z:
        damp = np.exp(-zj.real * t)
        out.append((float(np.max(np.abs(damp * f_vals))), float(np.max(np.abs(damp * deriv)))))
    return out


# success probability for smooth coefficient functions


def success_probability_limit(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    h: Callable[[np.ndarray], np.ndarray],
    order: int = 64,
) -> float:
    """Large-N limit of the post-selection probability for x_i = f(i/N),
    y_j = g(j/N), |h> ~ h(j/N), with the Taylor normalization alpha = e^{x_max y_max}:

        e^{-2 |f|_inf |g|_inf} int_0^1 |int_0^1 e^{f(x) g(y)} h(y) dy|^2 dx / int_0^1 |h|^2.
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    fx = np.asarray(f(s), dtype=complex)
    gy = np.asarray(g(s), dtype=complex)
    hy = np.asarray(h(s), dtype=complex)
    grid = np.linspace(0.0, 1.0, 4097)
    sup = float(np.max(np.abs(f(grid)))) * float(np.max(np.abs(g(grid))))
    inner = np.exp(np.outer(fx, gy)) @ (w * hy)
    num = float(np.sum(w * np.abs(inner) ** 2))
    den = float(np.sum(w * np.abs(hy) ** 2))
    return math.exp(-2.0 * sup) * num / den


def success_probability_sequence(
    f: Callable[[np.ndarray], np.ndarray],
    g: Callable[[np.ndarray], np.ndarray],
    h: Callable[[np.ndarray], np.ndarray],
    ns: Sequence[int],
    eps: float = 1e-2,
    kind: SeriesKind = SeriesKind.TAYLOR,
) -> list[float]:
    """Measured P at each n for the Taylor QLT with x_i = f(i/N), y_j = g(j/N)."""
    out = []
    for n in ns:
        N = 2**n
        grid = np.arange(N) / N
        be = build_qlt(QltProblem(f(grid) * np.ones(N), g(grid) * np.ones(N), eps, kind))
        psi = np.asarray(h(grid) * np.ones(N), dtype=complex)
        out.append(success_probability(be, psi / np.linalg.norm(psi)))
    return out
