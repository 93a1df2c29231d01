"""Structural sub-circuits: copy tree, parallel control, multi-controlled X,
uniformly controlled rotations and amplitude preparation."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .core import CNOT, Circuit, Gate, RegisterLayout, Toffoli
from .metrics import and_tree_levels, layers

COPY_TAG = "parallel-control"
MCX_TAG = "mcx"


def _width(num_qubits: int | None, *qubit_groups: Sequence[int]) -> int:
    needed = 1 + max((q for group in qubit_groups for q in group), default=-1)
    if num_qubits is None:
        return needed
    if num_qubits < needed:
        raise ValueError(f"num_qubits={num_qubits} too small for qubit index {needed - 1}")
    return num_qubits


def _check_distinct(*groups: Sequence[int]) -> None:
    flat = [q for g in groups for q in g]
    if len(set(flat)) != len(flat):
        raise ValueError(f"qubit roles overlap: {flat}")


def copy_gates(source: int, targets: Sequence[int], *, frame: bool = False, tag: str = "") -> list[Gate]:
    holders = [source]
    pending = list(targets)
    gates: list[Gate] = []
    while pending:
        new_holders = []
        for h in holders:
            if not pending:
                break
            t = pending.pop(0)
            gates.append(CNOT(h, t, frame=frame, tag=tag))
            new_holders.append(t)
        holders.extend(new_holders)
    return gates


def copy_circuit(
    n_a: int,
    source: int = 0,
    targets: Sequence[int] | None = None,
    *,
    num_qubits: int | None = None,
    frame: bool = False,
) -> Circuit:
    """Doubling tree of n_a-1 CNOTs fanning ``source`` onto zeroed ``targets``.

    Each round every qubit already holding the value feeds one fresh target,
    so the tree has depth ceil(log2 n_a).
    """
    if n_a < 1:
        raise ValueError("n_a must be at least 1")
    if targets is None:
        targets = [q for q in range(n_a) if q != source][: n_a - 1]
    targets = list(targets)
    if len(targets) != n_a - 1:
        raise ValueError(f"need exactly n_a-1={n_a - 1} targets, got {len(targets)}")
    _check_distinct([source], targets)
    width = _width(num_qubits, [source], targets)
    return Circuit.on(width, copy_gates(source, targets, frame=frame))


def decompose_mcx_gates(
    controls: Sequence[int],
    target: int,
    ancillas: Sequence[int] = (),
    *,
    frame: bool = False,
    tag: str = MCX_TAG,
) -> list[Gate]:
    controls = list(controls)
    c = len(controls)
    if c < 1:
        raise ValueError("need at least one control")
    if c == 1:
        return [CNOT(controls[0], target, frame=frame, tag=tag)]
    if c == 2:
        return [Toffoli(controls[0], controls[1], target, frame=frame, tag=tag)]
    if len(ancillas) < c - 2:
        raise ValueError(f"{c}-controlled X needs {c - 2} zeroed ancillas, got {len(ancillas)}")
    _check_distinct(controls, [target], list(ancillas)[: c - 2])
    free = list(ancillas)
    bits = list(controls)
    compute: list[Gate] = []
    for pairs in and_tree_levels(c, 2):
        produced = []
        for i in range(pairs):
            anc = free.pop(0)
            compute.append(Toffoli(bits[2 * i], bits[2 * i + 1], anc, frame=frame, tag=tag))
            produced.append(anc)
        bits = produced + bits[2 * pairs :]
    final = Toffoli(bits[0], bits[1], target, frame=frame, tag=tag)
    return compute + [final] + [g.inverse() for g in reversed(compute)]


def decompose_mcx(
    controls: Sequence[int],
    target: int,
    borrowed_ancillas: Sequence[int] = (),
    *,
    num_qubits: int | None = None,
) -> Circuit:
    """Exact C^c(X) from CNOT/Toffoli gates.

    For c > 2 a balanced AND-tree computes pairwise ANDs into c-2 zeroed
    ancillas, one Toffoli hits the target and the tree is uncomputed, so the
    ancillas come back to |0>. Size 2c-3, depth 2*ceil(log2(c/2))+1.
    """
    gates = decompose_mcx_gates(controls, target, borrowed_ancillas)
    used_anc = list(borrowed_ancillas)[: max(0, len(list(controls)) - 2)]
    width = _width(num_qubits, list(controls), [target], used_anc)
    return Circuit.on(width, gates)


def parallel_controlled_gates(
    u: Circuit,
    control: int,
    ancillas: Sequence[int] = (),
    *,
    tag: str = COPY_TAG,
) -> list[Gate]:
    ancillas = list(ancillas)
    _check_distinct([control], ancillas)
    reserved = set([control] + ancillas)
    for g in u.gates:
        if reserved.intersection(g.qubits):
            raise ValueError("u acts on the control or a parallel-control ancilla")
    controllers = [control] + ancillas
    body: list[Gate] = []
    for layer in layers(u):
        active = [g for g in layer if not g.frame]
        body.extend(g for g in layer if g.frame)
        if len(active) > 1 and not ancillas:
            raise ValueError("a layer with several gates needs at least one parallel-control ancilla")
        for start in range(0, len(active), len(controllers)):
            chunk = active[start : start + len(controllers)]
            body.extend(g.with_control(ctrl) for g, ctrl in zip(chunk, controllers))
    fan = copy_gates(control, ancillas, frame=True, tag=tag)
    return fan + body + list(reversed(fan))


def parallel_controlled(
    u: Circuit,
    control: int,
    ancillas: Sequence[int] = (),
    *,
    num_qubits: int | None = None,
) -> Circuit:
    """Controlled-u whose control is fanned out over zeroed ancillas.

    The control is copied onto the ancillas by a CNOT tree, each layer of u
    is split into sublayers of at most 1+len(ancillas) gates, every gate of a
    sublayer takes a distinct copy as its control, and the tree is undone.
    Frame gates of u are kept uncontrolled because they cancel when the
    control is off.
    """
    gates = parallel_controlled_gates(u, control, ancillas)
    width = _width(num_qubits, [control], list(ancillas), range(u.num_qubits))
    return Circuit.on(width, gates)


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def multiplexor_angles(alpha: Sequence[float]) -> np.ndarray:
    """Solve M theta = alpha with M[x, i] = (-1)^popcount(x & gray(i))."""
    alpha = np.asarray(alpha, dtype=float)
    L = alpha.shape[0]
    if L & (L - 1):
        raise ValueError("number of multiplexed angles must be a power of two")
    x = np.arange(L)[:, None]
    g = np.array([_gray(i) for i in range(L)])[None, :]
    parity = np.vectorize(lambda v: bin(int(v)).count("1") & 1)(x & g)
    M = 1 - 2 * parity
    return M.T @ alpha / L


def multiplexed_rotation_gates(
    axis: str,
    alpha: Sequence[float],
    controls: Sequence[int],
    target: int,
    *,
    prune: bool = False,
    tag: str = "",
    frame_cnots: bool = True,
    atol: float = 1e-15,
) -> list[Gate]:
    """Uniformly controlled R_axis: applies R(alpha[x]) to ``target`` when the
    controls hold x (bit t of x is controls[t]).

    Emitted as 2^k rotations interleaved with Gray-code CNOTs. The CNOTs
    multiply to the identity over the full cycle, so they are frame gates.
    With ``prune`` the zero rotations are dropped and a multiplexor whose
    angles are all equal collapses to a single rotation.
    """
    if axis not in ("ry", "rz"):
        raise ValueError("axis must be 'ry' or 'rz'")
    controls = list(controls)
    k = len(controls)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (2**k,):
        raise ValueError(f"expected {2**k} angles for {k} controls")
    theta = multiplexor_angles(alpha)
    if prune and np.all(np.abs(theta[1:]) <= atol):
        if abs(theta[0]) <= atol:
            return []
        return [Gate(axis, target, param=float(theta[0]), tag=tag)]
    gates: list[Gate] = []
    L = 2**k
    for i in range(L):
        if not (prune and abs(theta[i]) <= atol):
            gates.append(Gate(axis, target, param=float(theta[i]), tag=tag))
        if k:
            flip = _gray(i) ^ _gray((i + 1) % L)
            pos = flip.bit_length() - 1
            gates.append(CNOT(controls[pos], target, frame=frame_cnots, tag=tag))
    return gates


def prepare_state_gates(mu: Sequence[float], register: Sequence[int], *, tol: float = 1e-10) -> list[Gate]:
    register = list(register)
    b = len(register)
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (2**b,):
        raise ValueError(f"amplitude vector must have length 2**{b}")
    if np.any(mu < -tol):
        raise ValueError("amplitudes must be nonnegative")
    mu = np.clip(mu, 0.0, None)
    if abs(float(np.sum(mu**2)) - 1.0) > tol:
        raise ValueError(f"amplitudes are not normalized (sum of squares {np.sum(mu**2):.12g})")
    gates: list[Gate] = []
    for q in range(b - 1, -1, -1):
        blocks = mu.reshape(2 ** (b - q - 1), 2, 2**q)
        r0 = np.linalg.norm(blocks[:, 0, :], axis=1)
        r1 = np.linalg.norm(blocks[:, 1, :], axis=1)
        alpha = 2.0 * np.arctan2(r1, r0)
        gates.extend(multiplexed_rotation_gates("ry", alpha, register[q + 1 :], register[q], prune=True))
    return gates


def prepare_state(
    mu: Sequence[float],
    register: Sequence[int] | None = None,
    *,
    num_qubits: int | None = None,
) -> Circuit:
    """Map |0...0> to sum_k mu_k |k> for a nonnegative normalized ``mu``.

    Binary tree of uniformly controlled RY rotations, most significant qubit
    first; each level splits the remaining weight between the two halves.
    """
    mu = np.asarray(mu, dtype=float)
    b = int(round(math.log2(mu.shape[0]))) if mu.shape[0] else -1
    if b < 0 or 2**b != mu.shape[0]:
        raise ValueError("amplitude vector length must be a power of two")
    if register is None:
        register = list(range(b))
    gates = prepare_state_gates(mu, register)
    width = _width(num_qubits, list(register))
    return Circuit(tuple(gates), RegisterLayout.flat(width))
