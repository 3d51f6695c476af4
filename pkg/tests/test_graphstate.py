from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from qgns import (EdgeConvention, Graph, PauliString, build_graph_state, constraint_round,
                  decomposition_amplitude, new_state, stabilizer_of, verify_stabilizers)

from helpers import (cp_matrix, dense_apply, graph_state_amp_oracle, permute_qubits,
                     random_graph)

SQ2 = math.sqrt(2.0)


def test_k2_cz_state(k2):
    s = build_graph_state(k2)
    assert np.allclose(s.amps, np.array([1, 1, 1, -1]) / 2.0, atol=1e-15)


def test_edgeless_graph_is_plain_plus():
    s = build_graph_state(Graph(3))
    assert np.allclose(s.amps, new_state(3, "plus").amps)


def test_weighted_k2_against_dense_oracle():
    g = Graph.from_edges(2, [(0, 1, math.pi / 3)])
    s = build_graph_state(g)
    expected = dense_apply(cp_matrix(math.pi / 3), (0, 1), 2, np.full(4, 0.5, dtype=complex))
    assert np.allclose(s.amps, expected, atol=1e-14)
    assert s.amps[3] == pytest.approx(cmath.exp(1j * math.pi / 3) / 2)


def test_build_with_ry_and_product_inits(k2):
    via_ry = build_graph_state(k2, init=("ry", [math.pi / 2, math.pi / 2]))
    assert np.allclose(via_ry.amps, build_graph_state(k2).amps, atol=1e-15)
    via_product = build_graph_state(k2, init=("product", [(0.6, 0.8), (1.0, 0.0)]))
    # |x0> = 0.6|0> + 0.8|1>, |x1> = |0>: no 11 component, so CZ acts trivially
    assert np.allclose(via_product.amps, [0.6, 0.8, 0.0, 0.0])


def test_build_init_errors(k2):
    with pytest.raises(ValueError, match="angles"):
        build_graph_state(k2, init=("ry", [0.1]))
    with pytest.raises(ValueError, match="pair"):
        build_graph_state(k2, init=("product", [(0.6, 0.8)]))
    with pytest.raises(ValueError, match="weights"):
        build_graph_state(k2, weights=[0.1, 0.2])


def test_stabilizer_of_k2_and_fixture(k2, demo5):
    assert stabilizer_of(k2, 0).as_dict() == {0: "X", 1: "Z"}
    assert stabilizer_of(demo5, 0).as_dict() == {0: "X", 1: "Z", 3: "Z", 4: "Z"}
    assert stabilizer_of(Graph(2), 1).as_dict() == {1: "X"}
    with pytest.raises(ValueError):
        stabilizer_of(k2, 5)


def test_verify_k2_and_fixture_pass(k2, demo5):
    for g in (k2, demo5):
        report = verify_stabilizers(g, build_graph_state(g))
        assert report.passed
        assert report.max_residual < 1e-10
        assert len(report.residuals) == g.n_vertices


def test_verify_rejects_non_graph_state(k2):
    report = verify_stabilizers(k2, new_state(2, "zero"))
    assert not report.passed
    # X0 Z1 |00> = |01>, orthogonal to |00>: residual sqrt(2)
    assert report.residuals[0] == pytest.approx(SQ2)


def test_verify_qubit_count_mismatch(k2):
    with pytest.raises(ValueError, match="vertices"):
        verify_stabilizers(k2, new_state(3, "plus"))


def test_decomposition_examples(k2):
    assert decomposition_amplitude(k2, 3) == pytest.approx(-0.5)
    g = random_graph(np.random.default_rng(0), 4, weighted=True)
    assert decomposition_amplitude(g, 0) == pytest.approx(1 / 4.0)
    g7 = Graph.from_edges(2, [(0, 1, 0.7)])
    assert decomposition_amplitude(g7, 3) == pytest.approx(cmath.exp(0.7j) / 2)
    assert decomposition_amplitude(g7, 3) == pytest.approx(build_graph_state(g7).amps[3])
    with pytest.raises(ValueError, match="range"):
        decomposition_amplitude(k2, 4)


def test_random_unweighted_suite_stabilizers(rng):
    for _ in range(12):
        g = random_graph(rng, int(rng.integers(2, 9)))
        report = verify_stabilizers(g, build_graph_state(g))
        assert report.passed, report.residuals


def test_random_weighted_suite_decomposition(rng):
    for _ in range(8):
        g = random_graph(rng, int(rng.integers(2, 7)), weighted=True)
        s = build_graph_state(g)
        for idx in range(s.dim):
            assert abs(s.amps[idx] - decomposition_amplitude(g, idx)) < 1e-10
            # second, independent oracle: phase = sum of w over edges inside W
            assert abs(s.amps[idx] - graph_state_amp_oracle(g, idx)) < 1e-10


def test_edge_order_invariance(rng):
    for _ in range(6):
        g = random_graph(rng, 6, weighted=True)
        edges = list(g.edges)
        rng.shuffle(edges)
        shuffled = Graph.from_edges(6, edges)
        a = build_graph_state(g).amps
        b = build_graph_state(shuffled).amps
        assert np.max(np.abs(a - b)) <= 1e-12


def test_vertex_relabeling_matches_qubit_permutation(rng):
    for _ in range(6):
        n = 5
        g = random_graph(rng, n, weighted=True)
        perm = rng.permutation(n)
        relabeled = Graph.from_edges(
            n, [(int(perm[u]), int(perm[v]), w) for u, v, w in g.edges])
        direct = build_graph_state(relabeled).amps
        permuted = permute_qubits(build_graph_state(g).amps, perm)
        assert np.max(np.abs(direct - permuted)) <= 1e-12


def test_constraint_round_examples(k2, demo5):
    for seed in range(10):
        assert constraint_round(k2, 0, np.random.default_rng(seed)).product == 1
    # isolated vertex: the |+> factor gives m_x = +1 with no neighbors
    lone = Graph(2)
    for seed in range(5):
        round_ = constraint_round(lone, 1, np.random.default_rng(seed))
        assert round_.records[0].outcome == 1
        assert round_.product == 1
    for seed in range(20):
        v = seed % 5
        assert constraint_round(demo5, v, np.random.default_rng(seed)).product == 1


def test_constraint_round_requires_unweighted():
    g = Graph.from_edges(2, [(0, 1, 0.4)])
    with pytest.raises(ValueError, match="unweighted"):
        constraint_round(g, 0, np.random.default_rng(0))


def test_ising_convention_k2():
    g = Graph.from_edges(2, [(0, 1, 0.9)])
    s = build_graph_state(g, EdgeConvention.ISING_ZZ)
    expected = np.array([cmath.exp(-0.9j), cmath.exp(0.9j),
                         cmath.exp(0.9j), cmath.exp(-0.9j)]) / 2.0
    assert np.allclose(s.amps, expected, atol=1e-14)


def test_pauli_string_sign():
    flipped = PauliString(((0, "X"),), sign=-1).apply_to(new_state(1, "plus"))
    assert np.allclose(flipped.amps, -new_state(1, "plus").amps)
