"""Size and depth of circuits.

Depth is greedy earliest-slot layering: each gate starts right after the
latest gate sharing any of its qubits (controls included). Gates with three
or more controls are priced as their AND-tree decomposition: a c-controlled
X costs 2c-3 gates (c-2 compute Toffolis, one final Toffoli, c-2 uncompute)
and a c-controlled non-X gate costs 2c-1 (c-1 compute, one controlled gate,
c-1 uncompute). Their depth span is that of the same tree.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .core import Circuit, Gate

COST_MODELS = ("ir", "two_qubit")
TOFFOLI_TWO_QUBIT_COST = 5


@dataclass(frozen=True)
class Metrics:
    size: int
    depth: int
    counts: dict = field(default_factory=dict, compare=False)
    model: str = "ir"


@lru_cache(maxsize=None)
def and_tree_levels(c: int, keep: int) -> tuple[int, ...]:
    """Toffoli counts per level when pairing c bits down to ``keep`` bits."""
    levels = []
    width = c
    while width > keep:
        pairs = min(width // 2, width - keep)
        levels.append(pairs)
        width -= pairs
    return tuple(levels)


def _tree_cost(c: int, keep: int) -> tuple[int, int]:
    levels = and_tree_levels(c, keep)
    return sum(levels), len(levels)


def gate_cost(g: Gate, model: str = "ir") -> tuple[int, int]:
    """(size, depth span) contributed by one IR gate."""
    c = len(g.controls)
    if g.op == "x" and c >= 3:
        toffolis, levels = _tree_cost(c, 2)
        size, span = 2 * toffolis + 1, 2 * levels + 1
        if model == "two_qubit":
            size = TOFFOLI_TWO_QUBIT_COST * size
        return size, span
    if g.op != "x" and c >= 2:
        toffolis, levels = _tree_cost(c, 1)
        size, span = 2 * toffolis + 1, 2 * levels + 1
        if model == "two_qubit":
            size = TOFFOLI_TWO_QUBIT_COST * 2 * toffolis + 1
        return size, span
    if model == "two_qubit" and c == 2:
        return TOFFOLI_TWO_QUBIT_COST, 1
    return 1, 1


def metrics(
    c: Circuit,
    *,
    exclude_tag_prefix: str | None = None,
    model: str = "ir",
) -> Metrics:
    """Gate count and greedy-layered depth.

    ``exclude_tag_prefix`` drops gates whose tag starts with the prefix
    before counting, which isolates the overhead around diagonal factors.
    """
    if model not in COST_MODELS:
        raise ValueError(f"unknown cost model {model!r}")
    free = [0] * c.num_qubits
    size = 0
    depth = 0
    counts: Counter = Counter()
    for g in c.gates:
        if exclude_tag_prefix is not None and g.tag.startswith(exclude_tag_prefix):
            continue
        cost, span = gate_cost(g, model)
        size += cost
        counts[g.kind] += 1
        start = max(free[q] for q in g.qubits)
        end = start + span
        for q in g.qubits:
            free[q] = end
        depth = max(depth, end)
    return Metrics(size=size, depth=depth, counts=dict(counts), model=model)


def layers(c: Circuit) -> list[list[Gate]]:
    """Greedy earliest-slot layers, each gate counted with unit span."""
    free = [0] * c.num_qubits
    out: list[list[Gate]] = []
    for g in c.gates:
        slot = max(free[q] for q in g.qubits)
        if slot == len(out):
            out.append([])
        out[slot].append(g)
        for q in g.qubits:
            free[q] = slot + 1
    return out
