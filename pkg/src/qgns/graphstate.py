"""Graph-state construction and verification.

A graph state entangles one qubit per vertex by applying a two-qubit phase
gate along every edge of an initialized product state. Two edge-gate
conventions are supported:

* ControlledPhase: Uz(u,v,w) = diag(1,1,1,e^{iw}). With w = pi this is the
  controlled-Z, and the built amplitudes obey the closed form
  e^{i(1/2) W.A.W} / sqrt(2^n) on the |+>^n init (see
  decomposition_amplitude).
* IsingZZ: the symmetric coupling e^{-iw Z(x)Z}. Equivalent to a
  controlled-phase up to single-qubit Z rotations and a global phase, but
  with a reweighting: IsingZZ(w) matches CP(-4w) that way.

Stabilizer checks apply only to unweighted graphs (weight pi, CP
convention); weighted edge phases leave the Pauli stabilizer group.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import Graph, adjacency_matrix, neighborhood
from .sim import GateOp, MeasurementRecord, StateVector, apply_gate, measure_qubit, new_state


class EdgeConvention(Enum):
    CONTROLLED_PHASE = "cp"
    ISING_ZZ = "ising"


def edge_gate(convention: EdgeConvention, u: int, v: int, w: float) -> GateOp:
    """The two-qubit entangler for one edge under the given convention."""
    if convention is EdgeConvention.CONTROLLED_PHASE:
        return GateOp.cp(u, v, w)
    if convention is EdgeConvention.ISING_ZZ:
        return GateOp.ising_zz(u, v, w)
    raise ValueError(f"unknown convention {convention!r}")


@dataclass(frozen=True)
class PauliString:
    """Signed Pauli product, {qubit: "X"|"Y"|"Z"} with identity elsewhere."""

    paulis: tuple[tuple[int, str], ...]
    sign: int = 1

    def apply_to(self, s: StateVector) -> StateVector:
        """Return a fresh state P|s> (s is left untouched)."""
        out = s.clone()
        for q, p in self.paulis:
            apply_gate(out, GateOp(p, (q,)))
        if self.sign == -1:
            out.amps *= -1.0
        return out

    def as_dict(self) -> dict[int, str]:
        return dict(self.paulis)


def _resolve_init(g: Graph, init) -> StateVector:
    n = g.n_vertices
    if isinstance(init, str):
        if init != "plus":
            raise ValueError(f"unknown init {init!r}")
        return new_state(n, "plus")
    tag, payload = init
    if tag == "product":
        pairs = list(payload)
        if len(pairs) != n:
            raise ValueError(f"expected {n} amplitude pairs, got {len(pairs)}")
        return new_state(n, pairs)
    if tag == "ry":
        angles = list(payload)
        if len(angles) != n:
            raise ValueError(f"expected {n} angles, got {len(angles)}")
        s = new_state(n, "zero")
        for q, theta in enumerate(angles):
            apply_gate(s, GateOp.ry(q, theta))
        return s
    raise ValueError(f"unknown init tag {tag!r}")


def build_graph_state(g: Graph, convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE,
                      init="plus", weights=None) -> StateVector:
    """Initialize one qubit per vertex, then entangle along every edge.

    init is "plus", ("product", [(alpha, beta), ...]) or ("ry", [theta, ...]).
    weights, when given, overrides the per-edge phases (aligned with g.edges);
    the gates are diagonal so edge order is irrelevant.
    """
    s = _resolve_init(g, init)
    if weights is None:
        edge_weights = [w for _, _, w in g.edges]
    else:
        edge_weights = [float(w) for w in weights]
        if len(edge_weights) != g.n_edges:
            raise ValueError(f"expected {g.n_edges} edge weights, got {len(edge_weights)}")
    for (u, v, _), w in zip(g.edges, edge_weights):
        apply_gate(s, edge_gate(convention, u, v, w))
    return s


def stabilizer_of(g: Graph, v: int) -> PauliString:
    """X on v, Z on each neighbor of v: the generator whose +1 eigenspace
    contains the (unweighted) graph state."""
    hood = neighborhood(g, v)  # validates v
    paulis = [(v, "X")] + [(u, "Z") for u in sorted(hood)]
    return PauliString(tuple(paulis), sign=1)


@dataclass(frozen=True)
class StabilizerReport:
    residuals: tuple[float, ...]  # per-vertex ||S_v s - s||
    tol: float

    @property
    def max_residual(self) -> float:
        return max(self.residuals)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tol


def verify_stabilizers(g: Graph, s: StateVector, tol: float = 1e-10) -> StabilizerReport:
    """Per-vertex Euclidean residual ||S_v s - s||; passes iff all < tol."""
    if s.n_qubits != g.n_vertices:
        raise ValueError(
            f"state has {s.n_qubits} qubits but graph has {g.n_vertices} vertices")
    residuals = []
    for v in range(g.n_vertices):
        transformed = stabilizer_of(g, v).apply_to(s)
        residuals.append(float(np.linalg.norm(transformed.amps - s.amps)))
    return StabilizerReport(tuple(residuals), tol)


def decomposition_amplitude(g: Graph, basis_index: int) -> complex:
    """Closed-form amplitude e^{i(1/2) W.A.W} / sqrt(2^n) of the CP-convention
    graph state on |+>^n, with W the 0/1 vertex indicator of basis_index."""
    n = g.n_vertices
    if not 0 <= basis_index < (1 << n):
        raise ValueError(f"basis index {basis_index} out of range for n={n}")
    w_vec = np.array([(basis_index >> v) & 1 for v in range(n)], dtype=float)
    a = adjacency_matrix(g)
    phase = 0.5 * float(w_vec @ a @ w_vec)
    return cmath.exp(1j * phase) / math.sqrt(1 << n)


@dataclass(frozen=True)
class ConstraintRound:
    """One measurement round of the pattern X on v, Z on N(v)."""

    records: tuple[MeasurementRecord, ...]
    product: int  # m_x^v * prod_u m_z^u

    @property
    def satisfied(self) -> bool:
        return self.product == 1


def constraint_round(g: Graph, v: int, rng: np.random.Generator) -> ConstraintRound:
    """Build a fresh unweighted graph state and measure the stabilizer
    pattern of v: X on v, then Z on each neighbor, collapsing as it goes.
    The outcome product is +1 on every round for a valid graph state."""
    if not g.is_unweighted():
        raise ValueError("constraint rounds require an unweighted graph (all weights pi)")
    s = build_graph_state(g)
    records = []
    rec, s = measure_qubit(s, v, "X", rng)
    records.append(rec)
    product = rec.outcome
    for u in sorted(neighborhood(g, v)):
        rec, s = measure_qubit(s, u, "Z", rng)
        records.append(rec)
        product *= rec.outcome
    return ConstraintRound(tuple(records), product)
