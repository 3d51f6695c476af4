from __future__ import annotations

import math

import numpy as np
import pytest

from qgns import (Graph, StateVector, build_graph_state, classify_graph,
                  edge_phase_estimate, edge_readout, new_state, node_readout,
                  swap_test_overlap)

from helpers import random_state


def test_node_readout_z_basis():
    assert node_readout(new_state(1), 0, "Z") == (pytest.approx(0.0), 0)
    assert node_readout(new_state(1, [(0, 1)]), 0, "Z") == (pytest.approx(1.0), 1)


def test_node_readout_y_eigenstate():
    # (|0> + i|1>)/sqrt(2) is the +1 eigenvector of Y: oracle via the 2-dim
    # basis change H.Sdg giving (1, 0)
    plus_i = np.array([1.0, 1j]) / math.sqrt(2)
    basis_change = (np.array([[1, 1], [1, -1]]) / math.sqrt(2)) @ np.diag([1, -1j])
    assert np.allclose(basis_change @ plus_i, [1.0, 0.0])
    p1, bit = node_readout(StateVector(1, plus_i), 0, "Y")
    assert p1 == pytest.approx(0.0, abs=1e-12) and bit == 0


def test_node_readout_leaves_state_alone():
    s = new_state(1, "plus")
    node_readout(s, 0, "Y")
    assert np.allclose(s.amps, new_state(1, "plus").amps)
    with pytest.raises(ValueError, match="basis"):
        node_readout(s, 0, "X")


def test_node_readout_shot_mode(rng):
    s = new_state(1, "plus")
    p1, _ = node_readout(s, 0, "Z", shots=10_000, rng=rng)
    assert abs(p1 - 0.5) < 0.05
    with pytest.raises(ValueError, match="rng"):
        node_readout(s, 0, "Z", shots=10)


def test_edge_readout_examples(k2):
    assert edge_readout(new_state(2), 0, 1) == pytest.approx(1.0)
    assert edge_readout(new_state(2, "plus"), 0, 1) == pytest.approx(0.0, abs=1e-12)
    assert edge_readout(build_graph_state(k2), 0, 1) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError, match="distinct"):
        edge_readout(new_state(2), 1, 1)


def test_edge_phase_estimate_examples(k2):
    flat = Graph.from_edges(2, [(0, 1, 0.0)])
    assert edge_phase_estimate(new_state(2, "plus"), flat, 0, 1) == pytest.approx(1.0)

    # |11>-supported eigenstate picks up exactly the edge phase
    ones = new_state(2, [(0.0, 1.0), (0.0, 1.0)])
    for w in (0.3, 1.1, 2.9):
        g = Graph.from_edges(2, [(0, 1, w)])
        assert edge_phase_estimate(ones, g, 0, 1) == pytest.approx(math.cos(w))

    g = Graph.from_edges(2, [(0, 1, math.pi / 2)])
    s = build_graph_state(g)
    # 4-dim oracle: sum |amp_k|^2 e^{i w [k=11]} -> 3/4 + i/4
    assert edge_phase_estimate(s, g, 0, 1) == pytest.approx(0.75)

    with pytest.raises(ValueError, match="no edge"):
        edge_phase_estimate(s, Graph(2), 0, 1)


def test_swap_test_examples(k2):
    s = build_graph_state(k2)
    p0, overlap = swap_test_overlap(s, s.clone())
    assert p0 == pytest.approx(1.0) and overlap == pytest.approx(1.0)

    p0, overlap = swap_test_overlap(new_state(1), new_state(1, [(0, 1)]))
    assert p0 == pytest.approx(0.5) and overlap == pytest.approx(0.0, abs=1e-12)

    p0, overlap = swap_test_overlap(s, new_state(2, "plus"))
    assert overlap == pytest.approx(0.25)

    with pytest.raises(ValueError, match="size"):
        swap_test_overlap(new_state(1), new_state(2))


def test_swap_test_symmetry_and_inner_product_oracle(rng):
    for _ in range(10):
        n = int(rng.integers(1, 7))
        a = StateVector(n, random_state(rng, n))
        b = StateVector(n, random_state(rng, n))
        _, ab = swap_test_overlap(a, b)
        _, ba = swap_test_overlap(b, a)
        assert abs(ab - ba) <= 1e-12
        direct = abs(np.vdot(a.amps, b.amps)) ** 2
        assert abs(ab - direct) <= 1e-10


def test_swap_test_shot_convergence():
    shots = 10_000
    failures = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 5))
        a = StateVector(n, random_state(rng, n))
        b = StateVector(n, random_state(rng, n))
        exact_p0, _ = swap_test_overlap(a, b)
        est_p0, _ = swap_test_overlap(a, b, shots=shots, rng=rng)
        bound = 3 * math.sqrt(exact_p0 * (1 - exact_p0) / shots) + 2 / shots
        if abs(est_p0 - exact_p0) > bound:
            failures += 1
    assert failures <= 1  # >= 99% of seeded trials inside 3 sigma


def test_classify_graph_examples(k2):
    s = build_graph_state(k2)
    scores, best = classify_graph(s, [s.clone(), new_state(2, "zero")])
    assert best == 0 and scores[0] == pytest.approx(1.0)

    scores, best = classify_graph(s, [new_state(2, "plus")])
    assert best == 0 and scores == [pytest.approx(0.25)]

    scores, best = classify_graph(s, [new_state(2, "plus"), s.clone()])
    assert best == 1
    assert scores == [pytest.approx(0.25), pytest.approx(1.0)]

    with pytest.raises(ValueError, match="class"):
        classify_graph(s, [])


def test_classify_argmax_stable_under_duplicate_losers(rng):
    for _ in range(5):
        n = 3
        s = StateVector(n, random_state(rng, n))
        classes = [StateVector(n, random_state(rng, n)) for _ in range(3)]
        _, best = classify_graph(s, classes)
        _, best_dup = classify_graph(s, classes + [classes[(best + 1) % 3].clone()])
        assert best_dup == best


def test_classify_tie_breaks_low_index():
    s = new_state(1, "plus")
    scores, best = classify_graph(s, [s.clone(), s.clone()])
    assert best == 0
    assert scores[0] == pytest.approx(scores[1])
