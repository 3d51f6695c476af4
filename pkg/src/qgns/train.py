"""Classical optimization of the circuit parameters.

The trainable model is the layered circuit: per-layer Ry rotations (layer 0
additionally carries the angle-encoded item features) interleaved with the
graph's edge entanglers, whose phases are the trainable edge weights.
Gradients come from central finite differences (valid for every parameter)
or from the two-point shift rule applied at the readout level; the
optimizer is plain gradient descent.

Everything is deterministic: exact mode never touches an rng, shot mode
threads one seeded generator through all estimates.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, from_edge_list
from .graphstate import EdgeConvention, build_graph_state, edge_gate
from .qgnn import Formalism, ModelSpec, encode_features
from .sim import GateOp, StateVector, apply_gate, new_state
from .tasks import edge_readout, node_readout, swap_test_overlap

_CLIP = 1e-7

TASKS = ("node", "edge", "graph")


@dataclass(frozen=True)
class DataItem:
    graph: Graph
    features: np.ndarray
    labels: object  # node: per-node bits (None = unlabeled) | edge: per-edge reals | graph: class index

    def __post_init__(self) -> None:
        object.__setattr__(self, "features", np.asarray(self.features, dtype=float))
        if self.features.shape != (self.graph.n_vertices,):
            raise ValueError(
                f"features shape {self.features.shape} != ({self.graph.n_vertices},)")


@dataclass(frozen=True)
class Dataset:
    task: str
    items: tuple[DataItem, ...]
    node_basis: str = "Y"

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise ValueError(f"task must be one of {TASKS}, got {self.task!r}")
        if not self.items:
            raise ValueError("dataset has no items")
        for item in self.items:
            self._check_labels(item)

    def _check_labels(self, item: DataItem) -> None:
        n, e = item.graph.n_vertices, item.graph.n_edges
        if self.task == "node":
            if len(item.labels) != n:
                raise ValueError(f"node task needs {n} labels, got {len(item.labels)}")
        elif self.task == "edge":
            if len(item.labels) != e:
                raise ValueError(f"edge task needs {e} targets, got {len(item.labels)}")
        else:
            if not isinstance(item.labels, int) or item.labels < 0:
                raise ValueError("graph task needs a nonnegative class index label")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 100
    seed: int = 0
    shots: int = 0          # 0 = exact readouts
    grad: str = "fd"        # "fd" (central differences) | "pshift"
    eps: float = 1e-5       # finite-difference step
    loss: str = "bce"       # node task only; edge is MSE, graph is BCE

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.eps <= 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if self.grad not in ("fd", "pshift"):
            raise ValueError(f"grad must be 'fd' or 'pshift', got {self.grad!r}")
        if self.loss not in ("bce", "mse"):
            raise ValueError(f"loss must be 'bce' or 'mse', got {self.loss!r}")
        if self.shots < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots}")


# -- parameter plumbing ------------------------------------------------------

def params_of(model: ModelSpec) -> np.ndarray:
    """Flat parameter vector: theta entries then edge-weight entries."""
    return np.concatenate([model.theta.ravel(), model.weights.ravel()])


def with_params(model: ModelSpec, params: np.ndarray) -> ModelSpec:
    nt = model.theta.size
    theta = np.asarray(params[:nt], dtype=float).reshape(model.theta.shape)
    weights = np.asarray(params[nt:], dtype=float).reshape(model.weights.shape)
    return ModelSpec(model.graph, model.m, model.formalism, theta, weights,
                     model.schedule, model.shared_weights)


def initial_model(graph: Graph, m: int = 1, formalism: Formalism = Formalism.SEQUENTIAL,
                  shared_weights: bool = False) -> ModelSpec:
    """Training start: zero angle offsets, edge phases from the graph itself."""
    rows = 1 if shared_weights else m
    weights = (np.tile([w for _, _, w in graph.edges], (rows, 1))
               if graph.n_edges else np.zeros((rows, 0)))
    return ModelSpec(graph, m, formalism, np.zeros((m, graph.n_vertices)), weights,
                     (), shared_weights)


def _angle_rows(model: ModelSpec, features) -> np.ndarray:
    """Total Ry angles per layer; layer 0 adds the encoded features."""
    rows = model.theta.copy()
    if features is not None:
        _, enc = encode_features(features, "angle")
        rows[0] += np.asarray(enc)
    return rows


def _expanded_weights(model: ModelSpec) -> np.ndarray:
    if model.shared_weights:
        return np.tile(model.weights[0], (model.m, 1))
    return model.weights.copy()


def _circuit(graph: Graph, angle_rows: np.ndarray, weight_rows: np.ndarray,
             convention: EdgeConvention) -> StateVector:
    s = new_state(graph.n_vertices, "zero")
    for i in range(angle_rows.shape[0]):
        for v in range(graph.n_vertices):
            apply_gate(s, GateOp.ry(v, angle_rows[i, v]))
        for e, (u, v, _) in enumerate(graph.edges):
            apply_gate(s, edge_gate(convention, u, v, weight_rows[i, e]))
    return s


def model_circuit(model: ModelSpec, features=None,
                  convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE) -> StateVector:
    """The model's state for one item (features may be None for a bare model)."""
    return _circuit(model.graph, _angle_rows(model, features),
                    _expanded_weights(model), convention)


# -- readouts and losses -----------------------------------------------------

def class_prototypes(dataset: Dataset,
                     convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE
                     ) -> list[StateVector]:
    """Per-class reference states for the graph task: the plain graph state
    of each class's mean feature vector (no trainable parameters)."""
    if dataset.task != "graph":
        raise ValueError("class prototypes only apply to the graph task")
    n_classes = max(item.labels for item in dataset.items) + 1
    graph = dataset.items[0].graph
    protos = []
    for c in range(n_classes):
        feats = [item.features for item in dataset.items if item.labels == c]
        if not feats:
            raise ValueError(f"class {c} has no items")
        mean = np.mean(feats, axis=0)
        protos.append(build_graph_state(graph, convention, encode_features(mean)))
    return protos


def _item_values(model: ModelSpec, item: DataItem, dataset: Dataset,
                 convention: EdgeConvention, prototypes,
                 shots: int = 0, rng=None,
                 angle_rows=None, weight_rows=None) -> np.ndarray:
    """Raw per-readout values: node p1's, edge <ZZ>'s, or class scores."""
    if angle_rows is None:
        angle_rows = _angle_rows(model, item.features)
    if weight_rows is None:
        weight_rows = _expanded_weights(model)
    s = _circuit(model.graph, angle_rows, weight_rows, convention)
    if dataset.task == "node":
        return np.array([node_readout(s, v, dataset.node_basis, shots, rng)[0]
                         for v, lab in enumerate(item.labels) if lab is not None])
    if dataset.task == "edge":
        return np.array([edge_readout(s, u, v, shots, rng)
                         for u, v, _ in model.graph.edges])
    return np.array([swap_test_overlap(s, proto, shots, rng)[1] for proto in prototypes])


def _bce(p: float, y: float) -> float:
    q = min(max(p, _CLIP), 1.0 - _CLIP)
    return -(y * math.log(q) + (1.0 - y) * math.log(1.0 - q))


def _bce_dp(p: float, y: float) -> float:
    if p <= _CLIP or p >= 1.0 - _CLIP:
        return 0.0
    return (p - y) / (p * (1.0 - p))


def _item_loss_grad(values: np.ndarray, item: DataItem, dataset: Dataset,
                    loss_kind: str) -> tuple[float, np.ndarray]:
    """Per-item loss and its gradient with respect to the readout values."""
    task = dataset.task
    if task == "node":
        targets = [float(lab) for lab in item.labels if lab is not None]
    elif task == "edge":
        targets = [float(t) for t in item.labels]
    else:
        targets = [1.0 if c == item.labels else 0.0 for c in range(values.size)]
    if len(targets) != values.size:
        raise ValueError(f"{values.size} readouts vs {len(targets)} targets")
    if values.size == 0:
        raise ValueError("item produced no readouts (no labeled nodes or edges)")
    total = 0.0
    grad = np.zeros(values.size)
    for k, (p, y) in enumerate(zip(values, targets)):
        if task == "edge" or (task == "node" and loss_kind == "mse"):
            total += (p - y) ** 2
            grad[k] = 2.0 * (p - y)
        else:
            total += _bce(p, y)
            grad[k] = _bce_dp(p, y)
    return total / values.size, grad / values.size


def _check_compat(model: ModelSpec, dataset: Dataset) -> None:
    for item in dataset.items:
        if item.graph != model.graph:
            raise ValueError("dataset item graph differs from the model graph")


def loss(model: ModelSpec, dataset: Dataset, config: TrainConfig,
         convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE,
         rng=None) -> float:
    """Mean per-item loss; deterministic in exact mode (shots = 0)."""
    _check_compat(model, dataset)
    if config.shots > 0 and rng is None:
        rng = np.random.default_rng(config.seed)
    protos = class_prototypes(dataset, convention) if dataset.task == "graph" else None
    total = 0.0
    for item in dataset.items:
        values = _item_values(model, item, dataset, convention, protos,
                              config.shots, rng)
        item_loss, _ = _item_loss_grad(values, item, dataset, config.loss)
        total += item_loss
    return total / len(dataset.items)


def accuracy(model: ModelSpec, dataset: Dataset, config: TrainConfig,
             convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE,
             rng=None) -> float:
    """Fraction of correct readouts: thresholded bits (node), targets hit
    within 0.5 (edge), or argmax class (graph)."""
    _check_compat(model, dataset)
    if config.shots > 0 and rng is None:
        rng = np.random.default_rng(config.seed)
    protos = class_prototypes(dataset, convention) if dataset.task == "graph" else None
    hits, count = 0, 0
    for item in dataset.items:
        values = _item_values(model, item, dataset, convention, protos,
                              config.shots, rng)
        if dataset.task == "node":
            targets = [lab for lab in item.labels if lab is not None]
            for p, y in zip(values, targets):
                hits += int((p > 0.5) == bool(y))
                count += 1
        elif dataset.task == "edge":
            for p, y in zip(values, item.labels):
                hits += int(abs(p - float(y)) <= 0.5)
                count += 1
        else:
            hits += int(int(np.argmax(values)) == item.labels)
            count += 1
    return hits / count


# -- gradients ----------------------------------------------------------------

_SHIFTS = {
    # gate family -> (shift, prefactor) for the two-point rule
    "ry": (math.pi / 2.0, 0.5),
    EdgeConvention.CONTROLLED_PHASE: (math.pi / 2.0, 0.5),
    EdgeConvention.ISING_ZZ: (math.pi / 4.0, 1.0),
}


def _fd_gradient(model, dataset, config, convention, rng) -> np.ndarray:
    base = params_of(model)
    grad = np.zeros(base.size)
    for k in range(base.size):
        shifted = base.copy()
        shifted[k] = base[k] + config.eps
        up = loss(with_params(model, shifted), dataset, config, convention, rng)
        shifted[k] = base[k] - config.eps
        down = loss(with_params(model, shifted), dataset, config, convention, rng)
        grad[k] = (up - down) / (2.0 * config.eps)
    return grad


def _pshift_gradient(model, dataset, config, convention, rng) -> np.ndarray:
    n, e, m = model.graph.n_vertices, model.graph.n_edges, model.m
    n_theta = m * n
    protos = None  # graph task never reaches here
    edge_shift, edge_factor = _SHIFTS[convention]
    ry_shift, ry_factor = _SHIFTS["ry"]
    grad = np.zeros(params_of(model).size)
    for item in dataset.items:
        angles = _angle_rows(model, item.features)
        wts = _expanded_weights(model)
        values = _item_values(model, item, dataset, convention, protos,
                              config.shots, rng, angles, wts)
        _, dvals = _item_loss_grad(values, item, dataset, config.loss)

        def shifted_values(arows, wrows):
            return _item_values(model, item, dataset, convention, protos,
                                config.shots, rng, arows, wrows)

        for i in range(m):
            for v in range(n):
                plus, minus = angles.copy(), angles.copy()
                plus[i, v] += ry_shift
                minus[i, v] -= ry_shift
                col = ry_factor * (shifted_values(plus, wts) - shifted_values(minus, wts))
                grad[i * n + v] += float(dvals @ col)
            for k in range(e):
                plus, minus = wts.copy(), wts.copy()
                plus[i, k] += edge_shift
                minus[i, k] -= edge_shift
                col = edge_factor * (shifted_values(angles, plus) - shifted_values(angles, minus))
                # shared weights: occurrences across layers sum into one slot
                slot = n_theta + (k if model.shared_weights else i * e + k)
                grad[slot] += float(dvals @ col)
    return grad / len(dataset.items)


def gradient(model: ModelSpec, dataset: Dataset, config: TrainConfig,
             convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE,
             rng=None) -> np.ndarray:
    """Loss gradient over the flat (theta, weights) parameter vector."""
    _check_compat(model, dataset)
    if config.shots > 0 and rng is None:
        rng = np.random.default_rng(config.seed)
    if config.grad == "fd":
        return _fd_gradient(model, dataset, config, convention, rng)
    if dataset.task == "graph":
        warnings.warn("param_shift needs Pauli-expectation readouts; graph-task "
                      "swap scores fall back to finite differences", stacklevel=2)
        return _fd_gradient(model, dataset, config, convention, rng)
    return _pshift_gradient(model, dataset, config, convention, rng)


@dataclass(frozen=True)
class FitResult:
    model: ModelSpec
    history: tuple[float, ...]      # loss at the start of each epoch
    accuracies: tuple[float, ...]


def fit(model: ModelSpec, dataset: Dataset, config: TrainConfig,
        convention: EdgeConvention = EdgeConvention.CONTROLLED_PHASE) -> FitResult:
    """Plain gradient descent, p <- p - lr * grad, for config.epochs steps."""
    rng = np.random.default_rng(config.seed) if config.shots > 0 else None
    params = params_of(model)
    current = model
    history, accuracies = [], []
    for epoch in range(config.epochs):
        epoch_loss = loss(current, dataset, config, convention, rng)
        if not math.isfinite(epoch_loss):
            raise RuntimeError(f"training diverged at epoch {epoch}: loss={epoch_loss}")
        history.append(epoch_loss)
        accuracies.append(accuracy(current, dataset, config, convention, rng))
        params = params - config.learning_rate * gradient(current, dataset, config,
                                                          convention, rng)
        current = with_params(current, params)
    return FitResult(current, tuple(history), tuple(accuracies))


# -- dataset files -------------------------------------------------------------

def _graph_from_entry(entry, base_dir: Path | None) -> Graph:
    if isinstance(entry, dict):
        return Graph.from_dict(entry)
    if isinstance(entry, str):
        if entry.lstrip().startswith("qgraph"):
            return from_edge_list(entry)
        path = Path(entry)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return from_edge_list(path.read_text(encoding="utf-8"))
    raise ValueError(f"graph entry must be a dict, inline text or path, got {type(entry)}")


def dataset_from_dict(d: dict, base_dir: Path | None = None) -> Dataset:
    items = []
    for entry in d["items"]:
        labels = entry["labels"]
        if isinstance(labels, list):
            labels = tuple(labels)
        items.append(DataItem(_graph_from_entry(entry["graph"], base_dir),
                              np.asarray(entry["features"], dtype=float), labels))
    return Dataset(d["task"], tuple(items), d.get("node_basis", "Y"))


def dataset_to_dict(ds: Dataset) -> dict:
    d = {"task": ds.task, "node_basis": ds.node_basis, "items": []}
    for item in ds.items:
        labels = item.labels
        if isinstance(labels, tuple):
            labels = list(labels)
        d["items"].append({"graph": item.graph.to_dict(),
                           "features": list(map(float, item.features)),
                           "labels": labels})
    return d


def load_dataset(path) -> Dataset:
    path = Path(path)
    return dataset_from_dict(json.loads(path.read_text(encoding="utf-8")), path.parent)


def save_dataset(ds: Dataset, path) -> None:
    Path(path).write_text(json.dumps(dataset_to_dict(ds), indent=2) + "\n",
                          encoding="utf-8")


# -- bundled toy task -----------------------------------------------------------

def demo_graph() -> Graph:
    """The five-vertex demo fixture: vertex 0 joined to 1, 3, 4; vertex 3 to
    2 and 4; vertex 1 to 2. All edges carry the default weight pi."""
    return Graph.from_edges(5, [(0, 1), (1, 2), (0, 3), (3, 2), (0, 4), (3, 4)])


def toy_node_dataset() -> Dataset:
    """Node bipartition benchmark on the demo graph: vertices {0, 2, 4}
    labeled 1 against {1, 3} labeled 0, with class-correlated features."""
    labels = (1, 0, 1, 0, 1)
    feature_sets = [
        [0.90, 0.15, 0.80, 0.10, 0.95],
        [0.85, 0.20, 0.70, 0.25, 0.80],
        [0.95, 0.10, 0.85, 0.05, 0.90],
        [0.75, 0.30, 0.90, 0.20, 0.85],
    ]
    g = demo_graph()
    items = tuple(DataItem(g, np.array(f), labels) for f in feature_sets)
    return Dataset("node", items, node_basis="Y")


def toy_dataset_path() -> Path:
    """Filesystem path of the bundled toy dataset JSON (for the CLI)."""
    from importlib.resources import files

    return Path(str(files("qgns").joinpath("data", "toy_node.json")))
