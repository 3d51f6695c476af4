"""Node, edge, and graph-level readouts.

All estimators are exact when shots = 0 and otherwise emulate repeated
preparation: the exact Born probability is computed once and the shot
record is drawn binomially from it. Input states are never modified.
"""
from __future__ import annotations

import numpy as np

from .graph import Graph
from .graphstate import EdgeConvention, edge_gate
from .sim import (MAX_QUBITS, GateOp, StateVector, apply_gate, expectation_pauli,
                  new_state, tensor)

_READOUT_BASES = ("Y", "Z")


def _binomial_estimate(p: float, shots: int, rng: np.random.Generator | None) -> float:
    if rng is None:
        raise ValueError("shot-based estimation needs an rng")
    p = min(max(p, 0.0), 1.0)
    return float(rng.binomial(shots, p)) / shots


def node_readout(s: StateVector, qubit: int, basis: str = "Y", shots: int = 0,
                 rng: np.random.Generator | None = None) -> tuple[float, int]:
    """Probability of the -1 outcome on one qubit, plus the thresholded bit.

    Returns (p1, class_bit) with class_bit = 1 iff p1 > 0.5. Multi-class
    readouts use several qubits per node, one call each.
    """
    s.require_normalized()
    if basis not in _READOUT_BASES:
        raise ValueError(f"node readout basis must be Y or Z, got {basis!r}")
    work = s.clone()
    if basis == "Y":
        apply_gate(work, GateOp.sdg(qubit))
        apply_gate(work, GateOp.h(qubit))
    view = work.amps.reshape(-1, 2, 1 << qubit)
    p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
    if shots > 0:
        p1 = _binomial_estimate(p1, shots, rng)
    return p1, int(p1 > 0.5)


def edge_readout(s: StateVector, u: int, v: int, shots: int = 0,
                 rng: np.random.Generator | None = None) -> float:
    """Estimate of <Z_u Z_v>, exact when shots = 0."""
    if u == v:
        raise ValueError("edge readout needs two distinct qubits")
    exact = expectation_pauli(s, {u: "Z", v: "Z"})
    if shots == 0:
        return exact
    p_plus = 0.5 * (1.0 + exact)
    return 2.0 * _binomial_estimate(p_plus, shots, rng) - 1.0


def edge_phase_estimate(s: StateVector, g: Graph, u: int, v: int, shots: int = 0,
                        rng: np.random.Generator | None = None,
                        convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE) -> float:
    """Hadamard-test estimate of Re<s|Uz(u,v,w_uv)|s> for an existing edge."""
    w = g.weight(u, v)  # raises for a missing edge
    transformed = s.clone()
    apply_gate(transformed, edge_gate(convention, u, v, w))
    re = complex(np.vdot(s.amps, transformed.amps)).real
    if shots == 0:
        return re
    p0 = 0.5 * (1.0 + re)
    return 2.0 * _binomial_estimate(p0, shots, rng) - 1.0


def swap_test_overlap(s1: StateVector, s2: StateVector, shots: int = 0,
                      rng: np.random.Generator | None = None) -> tuple[float, float]:
    """Ancilla-H / controlled-SWAP / H circuit between two equal-size states.

    Returns (p0, overlap_sq) with p0 the ancilla-|0> probability and
    overlap_sq = 2*p0 - 1 clamped to [0, 1] (the raw shot estimator can dip
    slightly negative).
    """
    if s1.n_qubits != s2.n_qubits:
        raise ValueError(
            f"states differ in size: {s1.n_qubits} vs {s2.n_qubits} qubits")
    n = s1.n_qubits
    if 2 * n + 1 > MAX_QUBITS:
        raise ValueError(f"swap test needs {2 * n + 1} qubits, cap is {MAX_QUBITS}")
    ancilla = 2 * n
    full = tensor(tensor(s1, s2), new_state(1, "zero"))
    apply_gate(full, GateOp.h(ancilla))
    for i in range(n):
        apply_gate(full, GateOp.cswap(ancilla, i, n + i))
    apply_gate(full, GateOp.h(ancilla))
    view = full.amps.reshape(-1, 2, 1 << ancilla)
    p0 = float(np.sum(np.abs(view[:, 0, :]) ** 2))
    if shots > 0:
        p0 = _binomial_estimate(p0, shots, rng)
    overlap_sq = min(max(2.0 * p0 - 1.0, 0.0), 1.0)
    return p0, overlap_sq


def classify_graph(s: StateVector, class_states, shots: int = 0,
                   rng: np.random.Generator | None = None) -> tuple[list[float], int]:
    """Swap-test s against each class state; prediction is the argmax score.

    Ties break toward the lowest class index.
    """
    class_states = list(class_states)
    if not class_states:
        raise ValueError("need at least one class state")
    scores = [swap_test_overlap(s, c, shots, rng)[1] for c in class_states]
    best = int(np.argmax(scores))
    return scores, best
