"""Independent brute-force oracles used across the test suite.

Everything here is deliberately written against the basis-index definition
(explicit loops, kron products) rather than the package's vectorized
kernels, so the two paths never share a bug.
"""
from __future__ import annotations

import numpy as np

from qgns import Graph


def dense_apply(mat: np.ndarray, targets, n: int, vec: np.ndarray) -> np.ndarray:
    """Apply a 2^k x 2^k matrix to the target qubits by explicit index loops.

    Operator bit j corresponds to targets[j]; qubit q is bit q of the index.
    """
    targets = list(targets)
    out = np.zeros_like(np.asarray(vec, dtype=complex))
    for idx in range(len(vec)):
        row = 0
        for j, q in enumerate(targets):
            row |= ((idx >> q) & 1) << j
        for col in range(mat.shape[0]):
            src = idx
            for j, q in enumerate(targets):
                bit = (col >> j) & 1
                src = (src & ~(1 << q)) | (bit << q)
            out[idx] += mat[row, col] * vec[src]
    return out


def cp_matrix(w: float) -> np.ndarray:
    return np.diag([1.0, 1.0, 1.0, np.exp(1j * w)])


def ising_matrix(w: float) -> np.ndarray:
    return np.diag([np.exp(-1j * w), np.exp(1j * w), np.exp(1j * w), np.exp(-1j * w)])


def cry_4x4(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = [[c, -s], [s, c]]
    return m


def random_state(rng: np.random.Generator, n: int) -> np.ndarray:
    vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return vec / np.linalg.norm(vec)


def random_graph(rng: np.random.Generator, n: int, weighted: bool = False,
                 p_edge: float = 0.5) -> Graph:
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p_edge:
                if weighted:
                    edges.append((u, v, float(rng.uniform(0.0, 2.0 * np.pi))))
                else:
                    edges.append((u, v))
    return Graph.from_edges(n, edges)


def permute_qubits(amps: np.ndarray, perm) -> np.ndarray:
    """Relabel qubits: bit q of the input becomes bit perm[q] of the output."""
    n = len(perm)
    out = np.zeros_like(amps)
    for idx in range(len(amps)):
        tgt = 0
        for q in range(n):
            tgt |= ((idx >> q) & 1) << perm[q]
        out[tgt] = amps[idx]
    return out


def graph_state_amp_oracle(g: Graph, idx: int) -> complex:
    """Closed-form amplitude from the edge sum: the quadratic form reduces to
    sum of w_uv over edges with both endpoint bits set."""
    phase = 0.0
    for u, v, w in g.edges:
        if (idx >> u) & 1 and (idx >> v) & 1:
            phase += w
    return np.exp(1j * phase) / np.sqrt(1 << g.n_vertices)
