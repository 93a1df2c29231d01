"""Dense state-vector simulation.

The state is held as an array of shape (2,)*n + (batch,) so that a batch of
input columns is pushed through the gate list in one pass. Qubit q lives on
axis n-1-q, which makes the flat C-order index little-endian in q.
"""
from __future__ import annotations

import warnings

import numpy as np

from .core import Circuit, Gate

MAX_SIM_QUBITS = 24
NORM_TOL = 1e-9


class SimulationTooLarge(ValueError):
    """Raised when a dense simulation would exceed the qubit limit."""

    def __init__(self, qubits: int, limit: int = MAX_SIM_QUBITS):
        super().__init__(f"dense simulation of {qubits} qubits exceeds the limit of {limit}")
        self.qubits = qubits
        self.limit = limit


def _check_size(n: int) -> None:
    if n > MAX_SIM_QUBITS:
        raise SimulationTooLarge(n)


def _apply(psi: np.ndarray, g: Gate, n: int) -> None:
    idx = [slice(None)] * (n + 1)
    for c in g.controls:
        idx[n - 1 - c] = 1
    t = n - 1 - g.target
    i0 = list(idx)
    i1 = list(idx)
    i0[t] = 0
    i1[t] = 1
    i0 = tuple(i0)
    i1 = tuple(i1)
    if g.op == "x":
        tmp = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = tmp
        return
    if g.op == "p":
        psi[i1] *= np.exp(1j * g.param)
        return
    m = g.matrix()
    if g.op == "rz" or (m[0, 1] == 0 and m[1, 0] == 0):
        if m[0, 0] != 1:
            psi[i0] *= m[0, 0]
        if m[1, 1] != 1:
            psi[i1] *= m[1, 1]
        return
    a = psi[i0].copy()
    b = psi[i1]
    psi[i0] = m[0, 0] * a + m[0, 1] * b
    psi[i1] = m[1, 0] * a + m[1, 1] * b


def apply_circuit(c: Circuit, states: np.ndarray) -> np.ndarray:
    """Apply ``c`` to each column of ``states`` (shape (2**n, batch))."""
    n = c.num_qubits
    _check_size(n)
    states = np.asarray(states, dtype=complex)
    if states.ndim != 2 or states.shape[0] != 2**n:
        raise ValueError(f"expected shape (2**{n}, batch), got {states.shape}")
    batch = states.shape[1]
    psi = np.array(states, dtype=complex, copy=True).reshape((2,) * n + (batch,))
    for g in c.gates:
        _apply(psi, g, n)
    return psi.reshape(2**n, batch)


def simulate(c: Circuit, state) -> np.ndarray:
    """Apply ``c`` to a single state vector of dimension 2**num_qubits."""
    vec = np.asarray(state, dtype=complex)
    n = c.num_qubits
    if vec.ndim != 1 or vec.shape[0] != 2**n:
        raise ValueError(f"state has dimension {vec.shape}, circuit needs {2**n}")
    norm = np.linalg.norm(vec)
    if abs(norm - 1.0) > NORM_TOL:
        warnings.warn(f"input state norm {norm:.12g} differs from 1", stacklevel=2)
    return apply_circuit(c, vec[:, None])[:, 0]


def basis_state(n: int, index: int = 0) -> np.ndarray:
    v = np.zeros(2**n, dtype=complex)
    v[index] = 1.0
    return v


def unitary(c: Circuit) -> np.ndarray:
    """Full 2**n x 2**n matrix of the circuit (n <= 12)."""
    n = c.num_qubits
    if n > 12:
        raise SimulationTooLarge(n, 12)
    return apply_circuit(c, np.eye(2**n, dtype=complex))


def extract_block(c: Circuit, n: int, a: int | None = None) -> np.ndarray:
    """(<0|_anc (x) I_n) U (|0>_anc (x) I_n) with the system on qubits [0, n).

    Every qubit at index >= n is treated as ancilla and projected onto |0>.
    ``a`` may be given to assert the ancilla count.
    """
    total = c.num_qubits
    if a is not None and n + a != total:
        raise ValueError(f"system {n} + ancillas {a} != circuit width {total}")
    if not 0 <= n <= total:
        raise ValueError("system size out of range")
    _check_size(total)
    dim = 2**n
    cols = np.zeros((2**total, dim), dtype=complex)
    cols[np.arange(dim), np.arange(dim)] = 1.0
    out = apply_circuit(c, cols)
    return out[:dim, :]


def project_output(c: Circuit, n: int, psi) -> np.ndarray:
    """Ancilla-zero projection of U (|0>_anc |psi>), unnormalized."""
    psi = np.asarray(psi, dtype=complex)
    dim = 2**n
    if psi.shape != (dim,):
        raise ValueError(f"psi must have dimension {dim}")
    col = np.zeros((2**c.num_qubits, 1), dtype=complex)
    col[:dim, 0] = psi
    return apply_circuit(c, col)[:dim, 0]
