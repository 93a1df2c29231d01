"""Gate-level circuit IR.

A gate is one base operation (h, x, p, ry, rz or an arbitrary 2x2 unitary)
on a target qubit, optionally controlled on a tuple of qubits being |1>.
The named gate kinds (CNOT, Toffoli, ControlledU2, MultiControlledX)
are derived from the base op and the number of controls.

Two pieces of bookkeeping ride along with every gate:

``frame``
    Marks gates whose ordered product over a whole circuit is the identity
    (CNOT fans, multiplexor CNOTs, compute/uncompute pairs, PREP/PREP^dag).
    Controlling a circuit only needs to control its non-frame gates, since
    with the control off the frame gates cancel.
``tag``
    Free-form provenance label. Gates emitted by a diagonal block-encoding
    carry ``diagonal:<label>`` so resource counts can separate them.

Qubit 0 is the least significant bit of a basis-state index.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

UNITARY_ATOL = 1e-12

BASE_OPS = ("h", "x", "p", "ry", "rz", "u2")
_PARAM_OPS = ("p", "ry", "rz")
_SQRT_HALF = 1.0 / math.sqrt(2.0)


def _matrix_tuple(m) -> tuple[complex, complex, complex, complex]:
    a = np.asarray(m, dtype=complex)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if np.linalg.norm(a.conj().T @ a - np.eye(2), 2) > UNITARY_ATOL:
        raise ValueError("matrix is not unitary to 1e-12")
    return (complex(a[0, 0]), complex(a[0, 1]), complex(a[1, 0]), complex(a[1, 1]))


@dataclass(frozen=True)
class Gate:
    op: str
    target: int
    controls: tuple[int, ...] = ()
    param: float = 0.0
    unitary: tuple[complex, complex, complex, complex] | None = None
    frame: bool = False
    tag: str = ""

    def __post_init__(self) -> None:
        if self.op not in BASE_OPS:
            raise ValueError(f"unknown gate op {self.op!r}")
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        object.__setattr__(self, "target", int(self.target))
        if self.target < 0 or any(c < 0 for c in self.controls):
            raise ValueError("qubit indices must be nonnegative")
        if self.target in self.controls:
            raise ValueError("controls must be distinct from the target")
        if len(set(self.controls)) != len(self.controls):
            raise ValueError("controls must be distinct")
        if self.op == "u2":
            if self.unitary is None:
                raise ValueError("u2 gate needs a matrix")
            object.__setattr__(self, "unitary", _matrix_tuple(np.reshape(self.unitary, (2, 2))))
        elif self.unitary is not None:
            raise ValueError(f"{self.op} gate takes no matrix")
        if self.op in _PARAM_OPS:
            object.__setattr__(self, "param", float(self.param))
            if not math.isfinite(self.param):
                raise ValueError("gate angle must be finite")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + (self.target,)

    @property
    def kind(self) -> str:
        """Conventional gate name (H, X, Phase, RY, RZ, U2, CNOT, ...)."""
        c = len(self.controls)
        if self.op == "x":
            return {0: "X", 1: "CNOT", 2: "Toffoli"}.get(c, "MultiControlledX")
        base = {"h": "H", "p": "Phase", "ry": "RY", "rz": "RZ", "u2": "U2"}[self.op]
        if c == 0:
            return base
        return "ControlledU2" if c == 1 else "MultiControlledU2"

    def matrix(self) -> np.ndarray:
        """The 2x2 matrix applied to the target when all controls are set."""
        if self.op == "h":
            return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF
        if self.op == "x":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.op == "p":
            return np.array([[1, 0], [0, cmath.exp(1j * self.param)]], dtype=complex)
        if self.op == "ry":
            c, s = math.cos(self.param / 2), math.sin(self.param / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.op == "rz":
            return np.diag([cmath.exp(-0.5j * self.param), cmath.exp(0.5j * self.param)])
        return np.array(self.unitary, dtype=complex).reshape(2, 2)

    def inverse(self) -> "Gate":
        if self.op in ("h", "x"):
            return self
        if self.op in _PARAM_OPS:
            return replace(self, param=-self.param)
        return replace(self, unitary=tuple(self.matrix().conj().T.ravel()))

    def remap(self, mapping: Sequence[int]) -> "Gate":
        return replace(
            self,
            target=mapping[self.target],
            controls=tuple(mapping[c] for c in self.controls),
        )

    def with_control(self, control: int) -> "Gate":
        return replace(self, controls=(control,) + self.controls)


def H(q: int, **kw) -> Gate:
    return Gate("h", q, **kw)


def X(q: int, **kw) -> Gate:
    return Gate("x", q, **kw)


def CNOT(control: int, target: int, **kw) -> Gate:
    return Gate("x", target, (control,), **kw)


def Toffoli(c0: int, c1: int, target: int, **kw) -> Gate:
    return Gate("x", target, (c0, c1), **kw)


def MCX(controls: Iterable[int], target: int, **kw) -> Gate:
    return Gate("x", target, tuple(controls), **kw)


def Phase(q: int, theta: float, **kw) -> Gate:
    return Gate("p", q, param=theta, **kw)


def RY(q: int, theta: float, **kw) -> Gate:
    return Gate("ry", q, param=theta, **kw)


def RZ(q: int, theta: float, **kw) -> Gate:
    return Gate("rz", q, param=theta, **kw)


def U2(q: int, matrix, **kw) -> Gate:
    return Gate("u2", q, unitary=tuple(np.asarray(matrix, dtype=complex).ravel()), **kw)


@dataclass(frozen=True)
class Register:
    name: str
    start: int
    size: int
    role: str = "work"

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.start + self.size))


@dataclass(frozen=True)
class RegisterLayout:
    """Named, disjoint qubit ranges covering [0, total)."""

    registers: tuple[Register, ...] = ()

    def __post_init__(self) -> None:
        pos = 0
        names = set()
        for reg in self.registers:
            if reg.size < 0:
                raise ValueError(f"register {reg.name!r} has negative size")
            if reg.start != pos:
                raise ValueError("registers must be contiguous, ordered and disjoint")
            if reg.name in names:
                raise ValueError(f"duplicate register name {reg.name!r}")
            names.add(reg.name)
            pos += reg.size

    @classmethod
    def from_sizes(cls, *entries: tuple[str, int, str]) -> "RegisterLayout":
        regs, pos = [], 0
        for name, size, role in entries:
            regs.append(Register(name, pos, int(size), role))
            pos += int(size)
        return cls(tuple(regs))

    @classmethod
    def flat(cls, total: int, name: str = "q", role: str = "system") -> "RegisterLayout":
        return cls.from_sizes((name, total, role))

    @property
    def total(self) -> int:
        return sum(r.size for r in self.registers)

    def __getitem__(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(r.name == name for r in self.registers)

    def qubits(self, name: str) -> tuple[int, ...]:
        return self[name].indices

    def index_map(self) -> dict[str, tuple[int, ...]]:
        return {r.name: r.indices for r in self.registers}

    def breakdown(self) -> dict[str, int]:
        return {r.name: r.size for r in self.registers}


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    layout: RegisterLayout = field(default_factory=RegisterLayout)

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        total = self.layout.total
        for g in self.gates:
            if max(g.qubits) >= total:
                raise ValueError(f"gate {g.kind} on qubits {g.qubits} outside a {total}-qubit layout")

    @classmethod
    def on(cls, num_qubits: int, gates: Iterable[Gate] = ()) -> "Circuit":
        return cls(tuple(gates), RegisterLayout.flat(num_qubits))

    @property
    def num_qubits(self) -> int:
        return self.layout.total

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def inverse(self) -> "Circuit":
        return Circuit(tuple(g.inverse() for g in reversed(self.gates)), self.layout)

    def as_frame(self, frame: bool = True) -> "Circuit":
        return Circuit(tuple(replace(g, frame=frame) for g in self.gates), self.layout)

    def tagged(self, tag: str) -> "Circuit":
        return Circuit(tuple(replace(g, tag=tag) for g in self.gates), self.layout)

    def remapped(self, mapping: Sequence[int], layout: RegisterLayout) -> "Circuit":
        """Relabel qubit q as mapping[q] inside a larger layout."""
        if len(mapping) < self.num_qubits:
            raise ValueError("mapping shorter than the circuit width")
        return Circuit(tuple(g.remap(mapping) for g in self.gates), layout)

    def then(self, other: "Circuit") -> "Circuit":
        if other.num_qubits > self.num_qubits:
            raise ValueError("appended circuit is wider than the layout")
        return Circuit(self.gates + other.gates, self.layout)

    def with_layout(self, layout: RegisterLayout) -> "Circuit":
        return Circuit(self.gates, layout)

    def frame_only(self) -> "Circuit":
        return Circuit(tuple(g for g in self.gates if g.frame), self.layout)
