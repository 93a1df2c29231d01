"""OpenQASM 3 export and a reader for the exported subset.

Standard gates (h, x, p, ry, rz, cx, ccx, ch, cp, cry, crz, cu) cover
everything with at most two controls. Wider controls use the ``ctrl(c) @``
modifier. A U2 matrix is written as ``U(theta, phi, lambda)`` plus
``gphase`` (or the fourth ``cu`` angle when controlled). Frame and tag
bookkeeping is kept in a trailing comment so the reader can rebuild the
exact IR, including the diagonal tags used by resource reports.
"""
from __future__ import annotations

import cmath
import json
import math
import re

import numpy as np

from .core import Circuit, Gate, Register, RegisterLayout, U2

HEADER = 'OPENQASM 3.0;\ninclude "stdgates.inc";\n'
_EPS = 1e-14


def zyz_angles(m: np.ndarray) -> tuple[float, float, float, float]:
    """(theta, phi, lam, gamma) with m = e^{i gamma} U(theta, phi, lam)."""
    m = np.asarray(m, dtype=complex)
    c, s = abs(m[0, 0]), abs(m[1, 0])
    theta = 2.0 * math.atan2(s, c)
    if c > _EPS and s > _EPS:
        gamma = cmath.phase(m[0, 0])
        phi = cmath.phase(m[1, 0]) - gamma
        lam = cmath.phase(-m[0, 1]) - gamma
    elif s <= _EPS:
        gamma = cmath.phase(m[0, 0])
        phi = cmath.phase(m[1, 1]) - gamma
        lam = 0.0
    else:
        phi = 0.0
        gamma = cmath.phase(m[1, 0])
        lam = cmath.phase(-m[0, 1]) - gamma
    return theta, phi, lam, gamma


def u_matrix(theta: float, phi: float, lam: float, gamma: float = 0.0) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return cmath.exp(1j * gamma) * np.array(
        [[c, -cmath.exp(1j * lam) * s], [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def _f(v: float) -> str:
    return repr(float(v))


def _q(i: int) -> str:
    return f"q[{i}]"


def _gate_line(g: Gate) -> str:
    c = len(g.controls)
    args = ", ".join(_q(i) for i in g.controls + (g.target,))
    if g.op == "u2":
        theta, phi, lam, gamma = zyz_angles(g.matrix())
        if c == 0:
            return f"U({_f(theta)}, {_f(phi)}, {_f(lam)}) {args}; gphase({_f(gamma)});"
        if c == 1:
            return f"cu({_f(theta)}, {_f(phi)}, {_f(lam)}, {_f(gamma)}) {args};"
        return f"ctrl({c - 1}) @ cu({_f(theta)}, {_f(phi)}, {_f(lam)}, {_f(gamma)}) {args};"
    name = g.op
    param = f"({_f(g.param)})" if g.op in ("p", "ry", "rz") else ""
    if c == 0:
        return f"{name}{param} {args};"
    if c == 1:
        return f"c{name}{param} {args};"
    if c == 2 and g.op == "x":
        return f"ccx {args};"
    return f"ctrl({c}) @ {name}{param} {args};"


def _annotation(g: Gate) -> str:
    marks = []
    if g.frame:
        marks.append("@frame")
    if g.tag:
        marks.append(f"@tag={g.tag}")
    return (" // " + " ".join(marks)) if marks else ""


def to_qasm(c: Circuit, meta: dict | None = None) -> str:
    """Deterministic OpenQASM 3 text for ``c``.

    ``meta`` entries become ``// meta key <json>`` comment lines, read back
    by :func:`read_qasm_meta`.
    """
    lines = [HEADER.rstrip("\n")]
    for key in sorted(meta or {}):
        lines.append(f"// meta {key} {json.dumps(meta[key], sort_keys=True)}")
    lines.append(f"qubit[{c.num_qubits}] q;")
    for reg in c.layout.registers:
        lines.append(f"// register {reg.name} {reg.role} {reg.start} {reg.size}")
    for g in c.gates:
        lines.append(_gate_line(g) + _annotation(g))
    return "\n".join(lines) + "\n"


_LINE = re.compile(
    r"^(?:ctrl\((?P<ctrl>\d+)\)\s*@\s*)?(?P<name>[A-Za-z]+)(?:\((?P<params>[^)]*)\))?\s+(?P<args>[^;]+);"
    r"(?:\s*gphase\((?P<gphase>[^)]*)\);)?\s*(?://(?P<note>.*))?$"
)
_REG = re.compile(r"^// register (\S+) (\S+) (\d+) (\d+)$")
_META = re.compile(r"^// meta (\S+) (.*)$")


def read_qasm_meta(text: str) -> dict:
    """The ``meta`` mapping written by :func:`to_qasm`."""
    out = {}
    for raw in text.splitlines():
        m = _META.match(raw.strip())
        if m:
            out[m.group(1)] = json.loads(m.group(2))
    return out


def from_qasm(text: str) -> Circuit:
    """Rebuild a Circuit from text produced by :func:`to_qasm`."""
    width = None
    regs: list[Register] = []
    gates: list[Gate] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("OPENQASM") or line.startswith("include") or _META.match(line):
            continue
        m = re.match(r"^qubit\[(\d+)\] q;$", line)
        if m:
            width = int(m.group(1))
            continue
        m = _REG.match(line)
        if m:
            regs.append(Register(m.group(1), int(m.group(3)), int(m.group(4)), m.group(2)))
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"cannot parse QASM line: {raw!r}")
        gates.append(_parse_gate(m))
    if width is None:
        raise ValueError("missing qubit declaration")
    layout = RegisterLayout(tuple(regs)) if regs else RegisterLayout.flat(width)
    if layout.total != width:
        raise ValueError("register comments do not cover the declared qubits")
    return Circuit(tuple(gates), layout)


def _parse_gate(m: re.Match) -> Gate:
    qubits = [int(x) for x in re.findall(r"q\[(\d+)\]", m.group("args"))]
    params = [float(p) for p in m.group("params").split(",")] if m.group("params") else []
    extra = int(m.group("ctrl") or 0)
    name = m.group("name")
    note = m.group("note") or ""
    frame = "@frame" in note
    tag_m = re.search(r"@tag=(\S+)", note)
    tag = tag_m.group(1) if tag_m else ""
    kw = dict(frame=frame, tag=tag)
    if name == "U":
        gamma = float(m.group("gphase") or 0.0)
        return U2(qubits[-1], u_matrix(*params, gamma), **kw)
    if name == "cu":
        g = U2(qubits[-1], u_matrix(*params), **kw)
        return Gate("u2", qubits[-1], tuple(qubits[:-1]), unitary=g.unitary, **kw)
    if name == "ccx":
        op, ncontrols = "x", 2
    elif name in ("h", "x", "p", "ry", "rz"):
        op, ncontrols = name, 0
    elif name.startswith("c") and name[1:] in ("h", "x", "p", "ry", "rz"):
        op, ncontrols = name[1:], 1
    else:
        raise ValueError(f"unsupported gate {name!r}")
    ncontrols += extra
    if len(qubits) != ncontrols + 1:
        raise ValueError(f"gate {name} expects {ncontrols + 1} qubits, got {len(qubits)}")
    param = params[0] if params else 0.0
    return Gate(op, qubits[-1], tuple(qubits[:-1]), param=param, **kw)
