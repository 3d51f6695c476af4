"""Dense statevector simulator kernel.

Basis convention: qubit q is bit q of the basis index, qubit 0 least
significant. Amplitudes live in one contiguous complex128 vector of length
2^n; diagonal gates act by masked phase multiplication, dense gates by
tensor contraction, so no gate ever materializes a 2^n x 2^n matrix.

States mutate in place; clone() before applying gates if the original is
still needed. Randomness always comes from an explicit numpy Generator.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 24  # 2^24 complex128 amplitudes ~ 256 MB

_SQRT2_INV = 1.0 / math.sqrt(2.0)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


def ry_matrix(theta: float) -> np.ndarray:
    """Ry(theta) with Ry(theta)|0> = cos(theta/2)|0> + sin(theta/2)|1>."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def cry_matrix(theta: float) -> np.ndarray:
    """Controlled-Ry on operator bits (bit0 = target, bit1 = control)."""
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = ry_matrix(theta)
    return m


class StateVector:
    """2^n complex amplitudes with a normalization flag."""

    __slots__ = ("n_qubits", "amps", "normalized")

    def __init__(self, n_qubits: int, amps: np.ndarray, normalized: bool = True):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
        amps = np.ascontiguousarray(amps, dtype=complex)
        if amps.shape != (1 << n_qubits,):
            raise ValueError(f"expected {1 << n_qubits} amplitudes, got shape {amps.shape}")
        self.n_qubits = n_qubits
        self.amps = amps
        self.normalized = normalized

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def clone(self) -> StateVector:
        return StateVector(self.n_qubits, self.amps.copy(), self.normalized)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def require_normalized(self) -> None:
        if not self.normalized:
            raise ValueError("operation requires a normalized state")

    def __repr__(self) -> str:
        return f"StateVector(n_qubits={self.n_qubits}, normalized={self.normalized})"


def new_state(n_qubits: int, init="zero") -> StateVector:
    """Fresh state: "zero", "plus", or a sequence of per-qubit (alpha, beta) pairs."""
    if isinstance(init, str):
        if init == "zero":
            amps = np.zeros(1 << n_qubits, dtype=complex)
            amps[0] = 1.0
            return StateVector(n_qubits, amps)
        if init == "plus":
            dim = 1 << n_qubits
            amps = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
            return StateVector(n_qubits, amps)
        raise ValueError(f"unknown init {init!r}")
    pairs = list(init)
    if len(pairs) != n_qubits:
        raise ValueError(f"expected {n_qubits} amplitude pairs, got {len(pairs)}")
    acc = np.ones(1, dtype=complex)
    for alpha, beta in reversed(pairs):
        vec = np.array([alpha, beta], dtype=complex)
        nrm = abs(alpha) ** 2 + abs(beta) ** 2
        if abs(nrm - 1.0) > 1e-9:
            raise ValueError(f"amplitude pair ({alpha}, {beta}) has |a|^2+|b|^2 = {nrm}")
        acc = np.kron(acc, vec)
    return StateVector(n_qubits, acc)


def tensor(low: StateVector, high: StateVector) -> StateVector:
    """Combined register with `low` on qubits 0..n_low-1 and `high` above."""
    n = low.n_qubits + high.n_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"combined register of {n} qubits exceeds cap {MAX_QUBITS}")
    return StateVector(n, np.kron(high.amps, low.amps),
                       normalized=low.normalized and high.normalized)


@dataclass(frozen=True, eq=False)
class GateOp:
    """Gate descriptor: kind, qubit tuple, optional angle/phase, optional matrix."""

    kind: str
    qubits: tuple[int, ...]
    param: float = 0.0
    matrix: np.ndarray | None = None

    @classmethod
    def h(cls, q: int) -> GateOp:
        return cls("H", (q,))

    @classmethod
    def x(cls, q: int) -> GateOp:
        return cls("X", (q,))

    @classmethod
    def y(cls, q: int) -> GateOp:
        return cls("Y", (q,))

    @classmethod
    def z(cls, q: int) -> GateOp:
        return cls("Z", (q,))

    @classmethod
    def s(cls, q: int) -> GateOp:
        return cls("S", (q,))

    @classmethod
    def sdg(cls, q: int) -> GateOp:
        return cls("Sdg", (q,))

    @classmethod
    def ry(cls, q: int, theta: float) -> GateOp:
        return cls("Ry", (q,), float(theta))

    @classmethod
    def rz(cls, q: int, theta: float) -> GateOp:
        return cls("Rz", (q,), float(theta))

    @classmethod
    def phase(cls, q: int, w: float) -> GateOp:
        """diag(1, e^{iw}) on one qubit, as a LinOp (w = pi gives Z)."""
        return cls.linop(np.diag([1.0, cmath.exp(1j * w)]), (q,))

    @classmethod
    def cp(cls, control: int, target: int, w: float) -> GateOp:
        """Controlled phase diag(1,1,1,e^{iw}); CP(pi) is controlled-Z."""
        return cls("CP", (control, target), float(w))

    @classmethod
    def ising_zz(cls, u: int, v: int, w: float) -> GateOp:
        """e^{-iw Z(x)Z} = diag(e^{-iw}, e^{iw}, e^{iw}, e^{-iw})."""
        return cls("IsingZZ", (u, v), float(w))

    @classmethod
    def cry(cls, control: int, target: int, theta: float) -> GateOp:
        return cls("CRy", (control, target), float(theta))

    @classmethod
    def mcz(cls, *qubits: int) -> GateOp:
        return cls("MCZ", tuple(qubits))

    @classmethod
    def swap(cls, u: int, v: int) -> GateOp:
        return cls("SWAP", (u, v))

    @classmethod
    def cswap(cls, control: int, u: int, v: int) -> GateOp:
        return cls("CSWAP", (control, u, v))

    @classmethod
    def linop(cls, matrix: np.ndarray, targets) -> GateOp:
        return cls("LinOp", tuple(targets), matrix=np.asarray(matrix, dtype=complex))


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    basis: str
    outcome: int        # +1 or -1
    probability: float  # Born probability of the observed outcome


def _check_qubits(s: StateVector, qubits: tuple[int, ...]) -> None:
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit indices must be distinct, got {qubits}")
    for q in qubits:
        if not 0 <= q < s.n_qubits:
            raise ValueError(f"qubit {q} out of range for {s.n_qubits}-qubit state")


def _view1(amps: np.ndarray, q: int) -> np.ndarray:
    # axis 1 of the view is bit q
    return amps.reshape(-1, 2, 1 << q)


def _view2(amps: np.ndarray, hi: int, lo: int) -> np.ndarray:
    # axes 1 and 3 are bits hi and lo (hi > lo)
    return amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)


def _apply_matrix_inplace(s: StateVector, mat: np.ndarray, targets: tuple[int, ...]) -> None:
    """Contract a 2^k x 2^k matrix into the state; operator bit j is targets[j]."""
    n, k = s.n_qubits, len(targets)
    tensor_view = s.amps.reshape((2,) * n)
    # state axis of qubit q is n-1-q; trailing block axes ordered so targets[0] is fastest
    src = [n - 1 - q for q in reversed(targets)]
    dest = list(range(n - k, n))
    moved = np.moveaxis(tensor_view, src, dest)
    flat = moved.reshape(-1, 1 << k)
    out = flat @ mat.T
    out = np.moveaxis(out.reshape((2,) * n), dest, src)
    s.amps = np.ascontiguousarray(out).reshape(-1)


def _swap_blocks(amps: np.ndarray, u: int, v: int, cmask: int = 0) -> None:
    """Exchange amplitudes between bit patterns u=1,v=0 and u=0,v=1.

    With cmask nonzero only indices where all cmask bits are set take part
    (controlled swap).
    """
    if cmask == 0 and u > v:
        view = _view2(amps, u, v)
        tmp = view[:, 1, :, 0, :].copy()
        view[:, 1, :, 0, :] = view[:, 0, :, 1, :]
        view[:, 0, :, 1, :] = tmp
        return
    idx = np.arange(amps.shape[0])
    sel = ((idx >> u) & 1 == 1) & ((idx >> v) & 1 == 0)
    if cmask:
        sel &= (idx & cmask) == cmask
    a = idx[sel]
    b = a ^ ((1 << u) | (1 << v))
    tmp = amps[a].copy()
    amps[a] = amps[b]
    amps[b] = tmp


def apply_gate(s: StateVector, g: GateOp) -> StateVector:
    """Apply g to s in place and return s."""
    _check_qubits(s, g.qubits)
    kind = g.kind
    if kind == "H":
        _apply_matrix_inplace(s, _H, g.qubits)
    elif kind == "X":
        _apply_matrix_inplace(s, _X, g.qubits)
    elif kind == "Y":
        _apply_matrix_inplace(s, _Y, g.qubits)
    elif kind == "Ry":
        _apply_matrix_inplace(s, ry_matrix(g.param), g.qubits)
    elif kind == "Z":
        _view1(s.amps, g.qubits[0])[:, 1, :] *= -1.0
    elif kind == "S":
        _view1(s.amps, g.qubits[0])[:, 1, :] *= 1j
    elif kind == "Sdg":
        _view1(s.amps, g.qubits[0])[:, 1, :] *= -1j
    elif kind == "Rz":
        view = _view1(s.amps, g.qubits[0])
        view[:, 0, :] *= cmath.exp(-0.5j * g.param)
        view[:, 1, :] *= cmath.exp(0.5j * g.param)
    elif kind == "CP":
        hi, lo = max(g.qubits), min(g.qubits)
        _view2(s.amps, hi, lo)[:, 1, :, 1, :] *= cmath.exp(1j * g.param)
    elif kind == "IsingZZ":
        hi, lo = max(g.qubits), min(g.qubits)
        view = _view2(s.amps, hi, lo)
        same, diff = cmath.exp(-1j * g.param), cmath.exp(1j * g.param)
        view[:, 0, :, 0, :] *= same
        view[:, 1, :, 1, :] *= same
        view[:, 0, :, 1, :] *= diff
        view[:, 1, :, 0, :] *= diff
    elif kind == "CRy":
        control, target = g.qubits
        _apply_matrix_inplace(s, cry_matrix(g.param), (target, control))
    elif kind == "MCZ":
        mask = 0
        for q in g.qubits:
            mask |= 1 << q
        idx = np.arange(s.dim)
        s.amps[(idx & mask) == mask] *= -1.0
    elif kind == "SWAP":
        u, v = g.qubits
        _swap_blocks(s.amps, max(u, v), min(u, v))
    elif kind == "CSWAP":
        control, u, v = g.qubits
        _swap_blocks(s.amps, u, v, cmask=1 << control)
    elif kind == "LinOp":
        mat = g.matrix
        if mat is None or mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("LinOp requires a square matrix")
        if mat.shape[0] != 1 << len(g.qubits):
            raise ValueError(
                f"LinOp matrix is {mat.shape[0]}-dim but {len(g.qubits)} targets "
                f"span {1 << len(g.qubits)}")
        _apply_matrix_inplace(s, mat, g.qubits)
        s.normalized = abs(float(np.linalg.norm(s.amps)) - 1.0) < 1e-9
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
    return s


_BASIS_FORWARD = {
    "Z": (),
    "X": ("H",),
    "Y": ("Sdg", "H"),
}
_BASIS_BACKWARD = {
    "Z": (),
    "X": ("H",),
    "Y": ("H", "S"),
}


def measure_qubit(s: StateVector, qubit: int, basis: str, rng: np.random.Generator
                  ) -> tuple[MeasurementRecord, StateVector]:
    """Projective measurement in the X, Y, or Z basis.

    The outcome is sampled from Born probabilities after the basis change;
    the kept state is re-expressed in the computational frame, so only the
    record carries the basis tag. Collapses s in place.
    """
    s.require_normalized()
    _check_qubits(s, (qubit,))
    if basis not in _BASIS_FORWARD:
        raise ValueError(f"basis must be X, Y or Z, got {basis!r}")
    for kind in _BASIS_FORWARD[basis]:
        apply_gate(s, GateOp(kind, (qubit,)))
    view = _view1(s.amps, qubit)
    p0 = float(np.sum(np.abs(view[:, 0, :]) ** 2))
    p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
    total = p0 + p1
    bit = 0 if rng.random() * total < p0 else 1
    prob = (p0 if bit == 0 else p1) / total
    view[:, 1 - bit, :] = 0.0
    s.amps /= math.sqrt(p0 if bit == 0 else p1)
    for kind in _BASIS_BACKWARD[basis]:
        apply_gate(s, GateOp(kind, (qubit,)))
    outcome = 1 if bit == 0 else -1
    return MeasurementRecord(qubit, basis, outcome, prob), s


def sample_counts(s: StateVector, shots: int, rng: np.random.Generator) -> dict[int, int]:
    """Multinomial sample of |amp|^2; map basis index -> count (zeros omitted)."""
    s.require_normalized()
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = s.probabilities()
    probs = probs / probs.sum()
    counts = rng.multinomial(shots, probs)
    return {int(k): int(c) for k, c in enumerate(counts) if c > 0}


def expectation_pauli(s: StateVector, pauli_string: dict[int, str]) -> float:
    """<s|P|s> for a Pauli product given as {qubit: "X"|"Y"|"Z"}."""
    s.require_normalized()
    transformed = s.clone()
    for q, p in pauli_string.items():
        if p not in ("X", "Y", "Z"):
            raise ValueError(f"Pauli must be X, Y or Z, got {p!r}")
        apply_gate(transformed, GateOp(p, (q,)))
    val = complex(np.vdot(s.amps, transformed.amps))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"Pauli expectation has imaginary part {val.imag}")
    return val.real


def apply_linear_operator(s: StateVector, matrix: np.ndarray, targets,
                          renormalize: bool = False) -> tuple[StateVector, float]:
    """Apply an arbitrary (possibly non-unitary) matrix to the target qubits.

    Returns (state, norm) where norm is the result's length before any
    rescaling; with renormalize the state is scaled back to unit norm and a
    zero-norm result (operator annihilates the state) raises.
    """
    targets = tuple(targets)
    _check_qubits(s, targets)
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"operator matrix must be square, got shape {matrix.shape}")
    if matrix.shape[0] != 1 << len(targets):
        raise ValueError(
            f"operator is {matrix.shape[0]}-dim but {len(targets)} targets "
            f"span {1 << len(targets)}")
    _apply_matrix_inplace(s, matrix, targets)
    nrm = float(np.linalg.norm(s.amps))
    if renormalize:
        if nrm < 1e-12:
            raise ValueError("operator annihilated the state (zero-norm result)")
        s.amps /= nrm
        s.normalized = True
    else:
        s.normalized = abs(nrm - 1.0) < 1e-9
    return s, nrm


def dump_state(s: StateVector) -> str:
    """Golden-file dump: one line per amplitude, `index real imag`."""
    lines = [f"{k} {a.real:.17g} {a.imag:.17g}" for k, a in enumerate(s.amps)]
    return "\n".join(lines) + "\n"
