"""Block-encodings and their combinators.

Every BlockEncoding uses the same local layout, least significant first:

* ``[0, n)``          system register
* ``[n, n + work)``   clean work qubits, returned to |0> on every input
* ``[n + work, ...)`` certificate ancillas, the ``a`` of the (alpha, a, eps)
  certificate

The encoded block is read with all non-system qubits projected on |0>.
Work qubits (parallel-control copies, LCU flag, AND-tree scratch) are shared
between factors because each factor leaves them clean.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .circuit.builders import (
    decompose_mcx_gates,
    multiplexed_rotation_gates,
    parallel_controlled_gates,
    prepare_state_gates,
)
from .circuit.core import CNOT, Circuit, Gate, H, Phase, Register, RegisterLayout, U2, X

DIAGONAL_TAG = "diagonal:"
MODULUS_TOL = 1e-12
PREPARE_TAG = "prepare"
SELECT_TAG = "select"


@dataclass(frozen=True)
class BlockEncoding:
    """A circuit with its (alpha, a, eps) certificate.

    ``diagonals`` lists the labels of the diagonal block-encodings the
    circuit invokes, in emission order. ``info`` holds construction details
    that are reported but not part of the certificate.
    """

    circuit: Circuit
    n: int
    a: int
    alpha: float
    eps: float
    label: str = ""
    diagonals: tuple[str, ...] = ()
    info: Mapping = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.n < 0 or self.a < 0:
            raise ValueError("register sizes must be nonnegative")
        if self.n + self.a > self.circuit.num_qubits:
            raise ValueError("circuit narrower than system plus certificate ancillas")
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise ValueError(f"eps must be nonnegative and finite, got {self.eps}")

    @property
    def work(self) -> int:
        return self.circuit.num_qubits - self.n - self.a

    @property
    def total_qubits(self) -> int:
        return self.circuit.num_qubits

    @property
    def layout(self) -> RegisterLayout:
        return self.circuit.layout

    def certificate(self) -> tuple[float, int, float]:
        return (self.alpha, self.a, self.eps)

    def _regions(self, role: str) -> list[Register]:
        return [r for r in self.layout.registers if r.role == role]


def _layout(n: int, work: Sequence[tuple[str, int]], anc: Sequence[tuple[str, int]]) -> RegisterLayout:
    entries = [("system", n, "system")]
    entries += [(name, size, "work") for name, size in work if size > 0]
    entries += [(name, size, "ancilla") for name, size in anc if size > 0]
    return RegisterLayout.from_sizes(*entries)


def _unique(names: list[tuple[str, int]]) -> list[tuple[str, int]]:
    seen: dict[str, int] = {}
    out = []
    for name, size in names:
        count = seen.get(name, 0) + 1
        seen[name] = count
        out.append((name if count == 1 else f"{name}_{count}", size))
    return out


def _embed(be: BlockEncoding, work_offset: int, anc_offset: int) -> list[int]:
    n, w = be.n, be.work
    mapping = list(range(n))
    mapping += [work_offset + i for i in range(w)]
    mapping += [anc_offset + i for i in range(be.a)]
    return mapping


def _anc_registers(be: BlockEncoding) -> list[tuple[str, int]]:
    return [(r.name, r.size) for r in be.layout.registers if r.role == "ancilla"]


def identity_be(n: int) -> BlockEncoding:
    """The trivial (1, 0, 0) encoding of the identity."""
    return BlockEncoding(Circuit((), _layout(n, [], [])), n=n, a=0, alpha=1.0, eps=0.0, label="identity")


def unitary_be(c: Circuit, n: int | None = None, label: str = "unitary") -> BlockEncoding:
    """Wrap a unitary circuit on n qubits as a (1, 0, 0) encoding of itself."""
    n = c.num_qubits if n is None else n
    if c.num_qubits != n:
        raise ValueError("unitary_be expects a circuit on exactly n qubits")
    return BlockEncoding(Circuit(c.gates, _layout(n, [], [])), n=n, a=0, alpha=1.0, eps=0.0, label=label)


def product_be(A: BlockEncoding, B: BlockEncoding, label: str = "") -> BlockEncoding:
    """Encoding of A.block * B.block: B runs first, then A, on disjoint ancillas.

    Certificate (alpha_A alpha_B, a_A + a_B, alpha_A eps_B + alpha_B eps_A).
    """
    if A.n != B.n:
        raise ValueError(f"system sizes differ: {A.n} vs {B.n}")
    n = A.n
    W = max(A.work, B.work)
    anc_A = n + W
    anc_B = anc_A + A.a
    layout = _layout(n, [("work", W)], _unique(_anc_registers(A) + _anc_registers(B)))
    gates = [g.remap(_embed(B, n, anc_B)) for g in B.circuit.gates]
    gates += [g.remap(_embed(A, n, anc_A)) for g in A.circuit.gates]
    return BlockEncoding(
        Circuit(tuple(gates), layout),
        n=n,
        a=A.a + B.a,
        alpha=A.alpha * B.alpha,
        eps=A.alpha * B.eps + B.alpha * A.eps,
        label=label or f"({A.label})*({B.label})",
        diagonals=A.diagonals + B.diagonals,
    )


def _flip_gates(mask: int, register: Sequence[int]) -> list[Gate]:
    return [X(q, frame=True, tag=SELECT_TAG) for i, q in enumerate(register) if (mask >> i) & 1]


def lcu_be(terms: Sequence[BlockEncoding], lambdas: Sequence[float], label: str = "lcu") -> BlockEncoding:
    """Encoding of sum_k lambda_k A_k from encodings of the A_k.

    PREPARE loads mu_k = sqrt(lambda_k alpha_k / lam) on a b-qubit selector,
    SELECT applies each term under an anti-control pattern, and PREPARE is
    undone. Per term the selector pattern is ANDed into a flag qubit with an
    AND-tree, the term is controlled from the flag through parallel control,
    and the flag is cleared again. Certificate (lam, a + b, sum lambda_k eps_k)
    with lam = sum lambda_k alpha_k.
    """
    terms = list(terms)
    lambdas = [float(v) for v in lambdas]
    if not terms:
        raise ValueError("lcu_be needs at least one term")
    if len(lambdas) != len(terms):
        raise ValueError("one weight per term required")
    if any(not math.isfinite(v) or v < 0 for v in lambdas):
        raise ValueError("weights must be nonnegative and finite")
    n = terms[0].n
    if any(t.n != n for t in terms):
        raise ValueError("all terms must act on the same system size")
    lam = math.fsum(l * t.alpha for l, t in zip(lambdas, terms))
    if not lam > 0:
        raise ValueError("total weight sum lambda_k alpha_k must be positive")
    eps = math.fsum(l * t.eps for l, t in zip(lambdas, terms))
    diagonals = tuple(d for t in terms for d in t.diagonals)
    if len(terms) == 1:
        t = terms[0]
        return replace(t, alpha=lam, eps=eps, label=label, diagonals=diagonals, info={"terms": 1, "selector": 0})

    T = len(terms)
    b = math.ceil(math.log2(T))
    W = max(t.work for t in terms)
    A = max(t.a for t in terms)
    copies = max(1, n - 1)
    scratch = max(0, b - 2 - copies)
    anc_names = _anc_registers(terms[0])
    if not all(_anc_registers(t) == anc_names for t in terms):
        anc_names = [("term_ancilla", A)]
    layout = _layout(
        n,
        [("term_work", W), ("flag", 1), ("copies", copies), ("mcx_scratch", scratch)],
        anc_names + [("selector", b)],
    )
    flag = n + W
    copy_q = list(range(flag + 1, flag + 1 + copies))
    scratch_q = list(range(flag + 1 + copies, flag + 1 + copies + scratch))
    term_anc = flag + 1 + copies + scratch
    selector = list(range(term_anc + A, term_anc + A + b))

    weights = np.array([l * t.alpha for l, t in zip(lambdas, terms)]) / lam
    mu = np.zeros(2**b)
    mu[:T] = np.sqrt(weights)
    mu /= np.linalg.norm(mu)
    prep = [replace(g, frame=True, tag=PREPARE_TAG) for g in prepare_state_gates(mu, selector)]

    gates: list[Gate] = list(prep)
    full = (1 << b) - 1
    prev = 0
    for k, t in enumerate(terms):
        mask = ~k & full
        gates += _flip_gates(prev ^ mask, selector)
        prev = mask
        mcx = decompose_mcx_gates(selector, flag, copy_q + scratch_q, frame=True, tag=SELECT_TAG)
        body = Circuit(tuple(g.remap(_embed(t, n, term_anc)) for g in t.circuit.gates), layout)
        gates += mcx
        gates += parallel_controlled_gates(body, flag, copy_q)
        gates += mcx
    gates += _flip_gates(prev, selector)
    gates += [g.inverse() for g in reversed(prep)]
    return BlockEncoding(
        Circuit(tuple(gates), layout),
        n=n,
        a=A + b,
        alpha=lam,
        eps=eps,
        label=label,
        diagonals=diagonals,
        info={"terms": T, "selector": b, "mu": tuple(float(v) for v in mu)},
    )


def elementwise_product_be(U: Circuit, V: Circuit, label: str = "elementwise") -> BlockEncoding:
    """(1, n, 0) encoding of the entrywise product of two n-qubit unitaries.

    CNOT fan system -> ancilla, U on the system and V on the ancilla
    register, CNOT fan again.
    """
    n = U.num_qubits
    if V.num_qubits != n:
        raise ValueError(f"circuit sizes differ: {n} vs {V.num_qubits}")
    layout = _layout(n, [], [("elementwise", n)])
    fan = [CNOT(i, n + i, frame=True) for i in range(n)]
    body = [g.remap([n + i for i in range(n)]) for g in V.gates] + list(U.gates)
    return BlockEncoding(Circuit(tuple(fan + body + fan), layout), n=n, a=n, alpha=1.0, eps=0.0, label=label)


def hadamard_tower(n: int) -> Circuit:
    return Circuit.on(n, [H(q) for q in range(n)])


def uniform_matrix_be(n: int) -> BlockEncoding:
    """(1, n, 0) encoding of the all-1/2^n matrix: size 4n, depth 3."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return elementwise_product_be(hadamard_tower(n), hadamard_tower(n), label="uniform")


class DiagonalMethod(str, enum.Enum):
    EXACT_ROTATION = "exact_rotation"
    FOURIER_LCU = "fourier_lcu"


def _checked_modulus(d: np.ndarray) -> np.ndarray:
    mod = np.abs(d)
    if np.any(mod > 1.0 + MODULUS_TOL):
        j = int(np.argmax(mod))
        raise ValueError(f"|d_{j}| = {mod[j]:.15g} exceeds 1")
    over = mod > 1.0
    if np.any(over):
        d = np.where(over, d / np.where(over, mod, 1.0), d)
    return d


def _num_qubits_for(length: int) -> int:
    n = int(round(math.log2(length))) if length > 0 else -1
    if n < 0 or 2**n != length:
        raise ValueError(f"vector length {length} is not a power of two")
    return n


@dataclass(frozen=True)
class DiagonalSpec:
    """Eigenvalues of one diagonal factor and how to synthesize it.

    FourierLCU needs the periodic function ``g`` (eigenvalues are g(j/N)),
    derivative-bound constants ``C`` and ``R`` with
    ||g^(M)|| <= C M! / R^M, and either a truncation ``M`` or a target error.
    """

    eigenvalues: tuple[complex, ...]
    method: DiagonalMethod = DiagonalMethod.EXACT_ROTATION
    g: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    C: float | None = None
    R: float | None = None
    M: int | None = None
    target_eps: float | None = None

    def __post_init__(self) -> None:
        vals = tuple(complex(v) for v in np.ravel(self.eigenvalues))
        _num_qubits_for(len(vals))
        _checked_modulus(np.array(vals))
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "method", DiagonalMethod(self.method))
        if self.method is DiagonalMethod.FOURIER_LCU:
            if self.g is None or self.C is None or self.R is None:
                raise ValueError("FourierLCU needs g, C and R")
            if not (self.C > 0 and self.R > 1):
                raise ValueError("FourierLCU needs C > 0 and R > 1")
            if self.M is None and self.target_eps is None:
                raise ValueError("FourierLCU needs M or target_eps")

    @property
    def n(self) -> int:
        return _num_qubits_for(len(self.eigenvalues))

    @classmethod
    def fourier(
        cls,
        g: Callable[[np.ndarray], np.ndarray],
        n: int,
        C: float,
        R: float,
        *,
        M: int | None = None,
        target_eps: float | None = None,
    ) -> "DiagonalSpec":
        vals = np.asarray(g(np.arange(2**n) / 2**n), dtype=complex)
        return cls(tuple(vals), DiagonalMethod.FOURIER_LCU, g=g, C=C, R=R, M=M, target_eps=target_eps)


def diagonal_be_exact(d: Sequence[complex], label: str = "D") -> BlockEncoding:
    """(1, 1, 0) encoding of diag(d) for |d_j| <= 1.

    The ancilla gets G_j = [[d_j, -s_j], [s_j, conj(d_j)]], s_j = sqrt(1-|d_j|^2),
    when the system holds |j>. Real d is one uniformly controlled RY with
    angles 2 arccos(d_j); complex d = |d| e^{i phi} uses
    RZ(-phi) RY(2 arccos|d|) RZ(-phi), each uniformly controlled.
    """
    d = _checked_modulus(np.asarray(d, dtype=complex).ravel())
    n = _num_qubits_for(d.shape[0])
    tag = DIAGONAL_TAG + label
    controls = list(range(n))
    target = n
    if np.all(d.imag == 0):
        theta = 2.0 * np.arccos(np.clip(d.real, -1.0, 1.0))
        gates = multiplexed_rotation_gates("ry", theta, controls, target, tag=tag)
    else:
        phi = np.angle(d)
        theta = 2.0 * np.arccos(np.clip(np.abs(d), 0.0, 1.0))
        gates = multiplexed_rotation_gates("rz", -phi, controls, target, tag=tag)
        gates += multiplexed_rotation_gates("ry", theta, controls, target, tag=tag)
        gates += multiplexed_rotation_gates("rz", -phi, controls, target, tag=tag)
    layout = _layout(n, [], [("diagonal", 1)])
    return BlockEncoding(
        Circuit(tuple(gates), layout), n=n, a=1, alpha=1.0, eps=0.0, label=label, diagonals=(label,)
    )


def fourier_coefficients(g_samples: Sequence[complex], M: int) -> np.ndarray:
    """a_{-M}, ..., a_{M} from samples g(l/L), l < L, by the rectangle rule.

    For periodic g this is the DFT divided by L. Requires L >= 8M.
    """
    samples = np.asarray(g_samples, dtype=complex).ravel()
    L = samples.shape[0]
    _num_qubits_for(L)
    if M < 0:
        raise ValueError("M must be nonnegative")
    if L < 8 * max(M, 1):
        raise ValueError(f"{L} samples undersample M={M}; need at least {8 * max(M, 1)}")
    c = np.fft.fft(samples) / L
    ks = np.arange(-M, M + 1)
    return c[ks % L]


def fourier_truncation_bound(C: float, R: float, M: int) -> float:
    """eps_M = 2C sqrt(2 pi M^3) e^{1/(12M)} / ((2 pi e R)^M (M-1))."""
    if M < 2:
        raise ValueError("M must be at least 2")
    if not (C > 0 and R > 1):
        raise ValueError("need C > 0 and R > 1")
    log_val = (
        math.log(2.0 * C)
        + 0.5 * math.log(2.0 * math.pi * M**3)
        + 1.0 / (12.0 * M)
        - M * math.log(2.0 * math.pi * math.e * R)
        - math.log(M - 1)
    )
    return math.exp(log_val) if log_val < 709 else math.inf


def aliasing_bound(C: float, R: float, M: int, L: int) -> float:
    """Bound on sum_k |a_k(DFT) - a_k| over |k| <= M from L samples.

    Every aliased index has modulus >= L - M >= 7L/8; the coefficient decay
    |a_m| <= C s!/(2 pi R |m|)^s, minimized over s >= 2, and a geometric tail
    factor of 2 on each side give the per-coefficient bound.
    """
    base = 2.0 * math.pi * R * (L - M)
    smax = int(base) + 2
    best = min(math.log(C) + math.lgamma(s + 1) - s * math.log(base) for s in range(2, smax + 1))
    return (2 * M + 1) * 4.0 * math.exp(best)


def minimal_fourier_M(C: float, R: float, eps: float, M_max: int = 10_000) -> int:
    for M in range(2, M_max + 1):
        if fourier_truncation_bound(C, R, M) <= eps:
            return M
    raise ValueError(f"no M <= {M_max} reaches eps={eps}")


def exp_cos_constants(R: float = 1.0 + 1e-6) -> tuple[float, float]:
    """(C, R) for g(x) = exp(cos 2 pi x - 1) from the Cauchy estimate.

    On a circle of radius R, |exp(cos 2 pi w)| <= exp(cosh 2 pi R), so
    ||g^(M)|| <= M! exp(cosh(2 pi R) - 1) / R^M.
    """
    if R <= 1:
        raise ValueError("R must exceed 1")
    return math.exp(math.cosh(2.0 * math.pi * R) - 1.0), R


def _power_circuit(n: int, k: int, phase: float, tag: str) -> Circuit:
    """e^{i phase} U_omega^k with U_omega = sum_j e^{2 pi i j / N} |j><j|."""
    N = 2**n
    gates: list[Gate] = []
    for q in range(n):
        angle = math.remainder(2.0 * math.pi * k * 2**q / N, 2.0 * math.pi)
        if abs(angle) > 1e-15:
            gates.append(Phase(q, angle, tag=tag))
    if abs(phase) > 1e-15:
        gates.append(U2(0, cmath.exp(1j * phase) * np.eye(2), tag=tag))
    return Circuit.on(n, gates)


def fourier_diagonal_be(spec: DiagonalSpec, n: int | None = None, label: str = "F") -> BlockEncoding:
    """Encoding of diag(g(j/N)) from the truncated Fourier series of g.

    D_M = e^{-2 pi i M x} sum_{k=0}^{2M} a_{k-M} U_omega^k. The polynomial is
    an LCU over powers of U_omega (n phase gates each), the complex phase of
    each coefficient rides on its term, and the prefactor is n phase gates.
    Coefficients below 1e-15 of sum |a_k| are dropped. The certificate
    eps is the exact sup-norm distance between g(j/N) and the implemented
    eigenvalues, which is sound because both operators are diagonal; the a
    priori eps_M and the aliasing bound are reported in ``info``.
    """
    if spec.method is not DiagonalMethod.FOURIER_LCU:
        raise ValueError("spec is not a FourierLCU spec")
    n = spec.n if n is None else n
    if n != spec.n:
        raise ValueError("spec eigenvalue count does not match n")
    if n < 1:
        raise ValueError("n must be at least 1")
    N = 2**n
    C, R = float(spec.C), float(spec.R)
    M = spec.M if spec.M is not None else minimal_fourier_M(C, R, spec.target_eps)
    if M < 0:
        raise ValueError("M must be nonnegative")
    # the a priori bound needs M >= 2; below that only the exact certificate applies
    eps_M = fourier_truncation_bound(C, R, M) if M >= 2 else math.inf
    if spec.target_eps is not None and eps_M > spec.target_eps:
        raise ValueError(f"eps_M = {eps_M:.3g} at M={M} exceeds the target {spec.target_eps:.3g}")
    L = 1 << max(8, math.ceil(math.log2(8 * max(M, 1))))
    coeffs = fourier_coefficients(spec.g(np.arange(L) / L), M)
    alias = aliasing_bound(C, R, M, L)

    tag = DIAGONAL_TAG + label
    total = float(np.sum(np.abs(coeffs)))
    keep = [k for k in range(2 * M + 1) if abs(coeffs[k]) > 1e-15 * total]
    terms = [unitary_be(_power_circuit(n, k, cmath.phase(coeffs[k]), tag), n) for k in keep]
    lcu = lcu_be(terms, [abs(coeffs[k]) for k in keep], label=label)
    prefactor = [
        Phase(q, math.remainder(-2.0 * math.pi * M * 2**q / N, 2.0 * math.pi), tag=tag)
        for q in range(n)
    ]
    prefactor = [g for g in prefactor if abs(g.param) > 1e-15]
    circuit = Circuit(tuple(replace(g, tag=tag) for g in lcu.circuit.gates) + tuple(prefactor), lcu.layout)

    j = np.arange(N)
    implemented = np.zeros(N, dtype=complex)
    for k in keep:
        implemented += coeffs[k] * np.exp(2j * math.pi * (k - M) * j / N)
    target = np.asarray(spec.eigenvalues, dtype=complex)
    eps = float(np.max(np.abs(target - implemented))) + 1e-12
    info = {
        "M": M,
        "samples": L,
        "eps_M": eps_M,
        "aliasing_bound": alias,
        "terms_kept": len(keep),
        "coefficient_l1": total,
    }
    return BlockEncoding(circuit, n=n, a=lcu.a, alpha=lcu.alpha, eps=eps, label=label, diagonals=(label,), info=info)


def diagonal_be(spec: DiagonalSpec, label: str = "D") -> BlockEncoding:
    if spec.method is DiagonalMethod.FOURIER_LCU:
        return fourier_diagonal_be(spec, label=label)
    return diagonal_be_exact(spec.eigenvalues, label=label)
