"""Gate-level construction of the walk operator and the local oracle.

Register layout for the walk circuit (width ``l1 + 1``): qubit 0 is the
block selector ("top"), qubits ``1..l1`` hold the vertex index, big-endian.
Basis index ``c = top * 2**l1 + index``; the first part occupies ``top = 0``,
the second part the first ``n`` entries of ``top = 1`` and the ``d = m - n``
padding coordinates the rest.

The walk is simulated by diagonalization,
``exp(-iAt) = Q exp(-i Lambda t) Q^dagger``, where only the middle factor
depends on ``t`` and is a single anti-controlled phase-pair gate.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, ResourceError
from .graph import BicliqueInstance
from .linalg import max_deviation
from .walk import walk_operator_full

MAX_DENSE_WIDTH = 14

GATE_KINDS = (
    "hadamard_block",
    "anti_controlled_hadamard",
    "anti_controlled_phase_pair",
    "pauli_z",
    "controlled_z_on_value",
    "standard_oracle_query",
    "global_phase",
)

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_Z = np.diag([1, -1]).astype(complex)


@dataclass(frozen=True)
class Gate:
    """One elementary gate.

    The base operation acts on ``targets`` only when every ``(qubit, value)``
    pair in ``controls`` is satisfied; a value of 0 is an anti-control.
    ``marked`` is the oracle's marked-vertex set for ``standard_oracle_query``,
    whose targets are the vertex qubits followed by the oracle qubit.
    """

    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[tuple[int, int], ...] = ()
    phase: Optional[float] = None
    marked: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(q) for q in self.targets)
        controls = tuple((int(q), int(v)) for q, v in self.controls)
        if any(v not in (0, 1) for _, v in controls):
            raise DomainError(f"control values must be 0 or 1, got {controls}")
        used = list(targets) + [q for q, _ in controls]
        if len(set(used)) != len(used):
            raise DomainError(f"targets and controls overlap: {targets}, {controls}")
        if self.kind in ("anti_controlled_hadamard", "anti_controlled_phase_pair"):
            if len(targets) != 1 or any(v != 0 for _, v in controls):
                raise DomainError(f"{self.kind} needs one target and only 0-valued controls")
        if self.kind in ("pauli_z", "controlled_z_on_value") and len(targets) != 1:
            raise DomainError(f"{self.kind} needs exactly one target")
        if self.kind in ("anti_controlled_phase_pair", "global_phase"):
            if self.phase is None or not math.isfinite(self.phase):
                raise DomainError(f"{self.kind} needs a finite phase")
        if self.kind == "global_phase" and targets:
            raise DomainError("global_phase takes no targets")
        if self.kind == "standard_oracle_query":
            if len(targets) < 2 or self.marked is None:
                raise DomainError("standard_oracle_query needs vertex qubits, an oracle qubit and a marked set")
            object.__setattr__(self, "marked", tuple(sorted(int(i) for i in self.marked)))
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "controls", controls)
        if self.phase is not None:
            object.__setattr__(self, "phase", float(self.phase))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + tuple(q for q, _ in self.controls)

    def local_matrix(self) -> np.ndarray:
        """Base operation on ``targets`` (big-endian in target order)."""
        kind = self.kind
        if kind == "hadamard_block":
            out = np.ones((1, 1), dtype=complex)
            for _ in self.targets:
                out = np.kron(out, _H)
            return out
        if kind == "anti_controlled_hadamard":
            return _H
        if kind == "anti_controlled_phase_pair":
            return np.diag([np.exp(-1j * self.phase), np.exp(1j * self.phase)])
        if kind in ("pauli_z", "controlled_z_on_value"):
            return _Z
        if kind == "global_phase":
            return np.array([[np.exp(1j * self.phase)]])
        # standard_oracle_query: |i>|q> -> |i>|q xor f(i)>
        nv = len(self.targets) - 1
        marked = set(self.marked)
        P = np.zeros((2 ** (nv + 1), 2 ** (nv + 1)), dtype=complex)
        for i in range(2 ** nv):
            f = 1 if i in marked else 0
            for qb in (0, 1):
                P[2 * i + (qb ^ f), 2 * i + qb] = 1.0
        return P

    def inverse(self) -> "Gate":
        if self.phase is None:
            return self
        return Gate(self.kind, self.targets, self.controls, -self.phase, self.marked)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "targets": list(self.targets),
            "controls": [[q, v] for q, v in self.controls],
            "phase": self.phase,
        }
        if self.marked is not None:
            d["marked"] = list(self.marked)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Gate":
        return cls(d["kind"], tuple(d.get("targets", ())),
                   tuple(tuple(c) for c in d.get("controls", ())),
                   d.get("phase"), tuple(d["marked"]) if d.get("marked") is not None else None)


@dataclass(frozen=True)
class QubitRegister:
    width: int
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.width < 1:
            raise DomainError(f"register width must be positive, got {self.width}")
        labels = tuple(self.labels) or tuple(f"q{i}" for i in range(self.width))
        if len(labels) != self.width:
            raise DomainError(f"{len(labels)} labels for a width-{self.width} register")
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return 1 << self.width


@dataclass(frozen=True)
class GateSequence:
    """Gates in application order: ``gates[0]`` acts first."""

    register: QubitRegister
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            bad = [q for q in g.qubits if not 0 <= q < self.register.width]
            if bad:
                raise DomainError(f"gate {g.kind} touches qubits {bad} outside the register")
        object.__setattr__(self, "gates", gates)

    def __add__(self, other: "GateSequence") -> "GateSequence":
        if other.register.width != self.register.width:
            raise DomainError("cannot concatenate sequences on different registers")
        return GateSequence(self.register, self.gates + other.gates)

    def inverse(self) -> "GateSequence":
        return GateSequence(self.register, tuple(g.inverse() for g in reversed(self.gates)))

    def to_dict(self) -> dict:
        return {
            "width": self.register.width,
            "labels": list(self.register.labels),
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "GateSequence":
        reg = QubitRegister(int(d["width"]), tuple(d.get("labels", ())))
        return cls(reg, tuple(Gate.from_dict(g) for g in d["gates"]))

    @classmethod
    def from_json(cls, text: str) -> "GateSequence":
        return cls.from_dict(json.loads(text))


def apply_gate(gate: Gate, tensor: np.ndarray, width: int) -> np.ndarray:
    """Apply ``gate`` to a batch of states shaped ``(2,)*width + (batch,)``."""
    out = tensor.copy()
    index = [slice(None)] * (width + 1)
    for q, v in gate.controls:
        index[q] = v
    index = tuple(index)
    sub = out[index]
    G = gate.local_matrix()
    if not gate.targets:
        out[index] = G[0, 0] * sub
        return out
    ctrl = sorted(q for q, _ in gate.controls)
    # axis of each target inside ``sub`` once the control axes are sliced away
    axes = [q - sum(1 for c in ctrl if c < q) for q in gate.targets]
    r = len(axes)
    Gt = G.reshape((2,) * (2 * r))
    moved = np.tensordot(Gt, sub, axes=(list(range(r, 2 * r)), axes))
    out[index] = np.moveaxis(moved, list(range(r)), axes)
    return out


def assemble_unitary(seq: GateSequence) -> np.ndarray:
    """Dense unitary of the whole sequence (later gates multiply on the left)."""
    w = seq.register.width
    if w > MAX_DENSE_WIDTH:
        raise ResourceError(f"register width {w} exceeds the dense cap of {MAX_DENSE_WIDTH}")
    D = 1 << w
    T = np.eye(D, dtype=complex).reshape((2,) * w + (D,))
    for g in seq.gates:
        T = apply_gate(g, T, w)
    return T.reshape(D, D)


def gate_count(seq: GateSequence) -> tuple[int, dict[str, int]]:
    counts = Counter(g.kind for g in seq.gates)
    return len(seq.gates), dict(sorted(counts.items()))


def gate_shape(seq: GateSequence) -> tuple:
    """Everything about the sequence except gate phases."""
    return tuple((g.kind, g.targets, g.controls, g.marked) for g in seq.gates)


# -- walk circuit ---------------------------------------------------------

class PaddedLayout(NamedTuple):
    l1: int
    l2: int
    d: int
    padded_dim: int


def _is_power_of_two(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


def _next_power_of_two(x: int) -> int:
    return 1 << (int(x) - 1).bit_length()


def round_sizes(m: int, n: int) -> tuple[int, int, bool]:
    """Part sizes rounded up to powers of two, larger part first.

    Returns ``(m', n', swapped)``; the added dummy vertices are unmarked and
    sit at the end of each part.
    """
    if m < 1 or n < 1:
        raise DomainError(f"part sizes must be positive, got m={m}, n={n}")
    mp, np_ = _next_power_of_two(m), _next_power_of_two(n)
    if mp < np_:
        return np_, mp, True
    return mp, np_, False


def pad_instance(m: int, n: int) -> PaddedLayout:
    mp, np_, _ = round_sizes(m, n)
    l1, l2 = mp.bit_length() - 1, np_.bit_length() - 1
    return PaddedLayout(l1, l2, mp - np_, 2 * mp)


def _walk_register(l1: int) -> QubitRegister:
    return QubitRegister(l1 + 1, ("top",) + tuple(f"idx{i}" for i in range(l1)))


def build_qtilde(l1: int, l2: int) -> GateSequence:
    """Gates for ``Q = (block Hadamards) (top-qubit mixing)``.

    Applied first: Hadamard on the top qubit, anti-controlled on the whole
    index register. Then ``H^{l1}`` on the index register when ``top = 0``,
    and ``H^{l2}`` on the low ``l2`` index qubits when ``top = 1`` and the
    high ``l1 - l2`` index qubits are 0.
    """
    if not 0 <= l2 <= l1:
        raise DomainError(f"need 0 <= l2 <= l1, got l1={l1}, l2={l2}")
    index = tuple(range(1, l1 + 1))
    high, low = index[: l1 - l2], index[l1 - l2:]
    gates = [Gate("anti_controlled_hadamard", (0,), tuple((q, 0) for q in index))]
    if index:
        gates.append(Gate("hadamard_block", index, ((0, 0),)))
    if low:
        gates.append(Gate("hadamard_block", low, ((0, 1),) + tuple((q, 0) for q in high)))
    return GateSequence(_walk_register(l1), tuple(gates))


def build_phase_core(l1: int, t: float, mn_product: float) -> GateSequence:
    """``exp(-i Lambda t)``: phases ``e^{-i phi}, e^{+i phi}`` on the two non-zero eigenvalues.

    ``phi = sqrt(mn) t``; the gate fires only when the index register is all zeros.
    """
    if not math.isfinite(t):
        raise DomainError(f"t must be finite, got {t!r}")
    phi = math.sqrt(mn_product) * t
    gate = Gate("anti_controlled_phase_pair", (0,),
                tuple((q, 0) for q in range(1, l1 + 1)), phase=phi)
    return GateSequence(_walk_register(l1), (gate,))


def build_walk_circuit(m: int, n: int, t: float) -> GateSequence:
    """Circuit for ``exp(-iAt)`` on ``K_{m,n}`` padded to ``2m`` coordinates.

    ``m`` and ``n`` must be powers of two with ``m >= n``; use
    :func:`round_sizes` first for other sizes.
    """
    if not (_is_power_of_two(m) and _is_power_of_two(n)):
        raise DomainError(f"m and n must be powers of two (got m={m}, n={n}); round them first")
    if m < n:
        raise DomainError(f"need m >= n, got m={m}, n={n}; swap the parts")
    l1, l2, _, _ = pad_instance(m, n)
    q = build_qtilde(l1, l2)
    return q.inverse() + build_phase_core(l1, t, m * n) + q


def qtilde_dense(l1: int, l2: int) -> np.ndarray:
    """``Q`` built directly from its block definition, for cross-checking gates."""
    if not 0 <= l2 <= l1:
        raise DomainError(f"need 0 <= l2 <= l1, got l1={l1}, l2={l2}")
    m, n = 1 << l1, 1 << l2
    D = 2 * m
    mixing = np.eye(D, dtype=complex)
    r = 1 / math.sqrt(2)
    mixing[0, 0], mixing[0, m], mixing[m, 0], mixing[m, m] = r, r, r, -r
    Hm = np.ones((1, 1), dtype=complex)
    for _ in range(l1):
        Hm = np.kron(Hm, _H)
    Hn = np.ones((1, 1), dtype=complex)
    for _ in range(l2):
        Hn = np.kron(Hn, _H)
    block = np.eye(D, dtype=complex)
    block[:m, :m] = Hm
    block[m:m + n, m:m + n] = Hn
    return block @ mixing


def walk_dense(m: int, n: int, t: float) -> np.ndarray:
    """``Q exp(-i Lambda t) Q^dagger`` from dense blocks, padded dimension ``2m``."""
    l1, l2, _, D = pad_instance(m, n)
    Q = qtilde_dense(l1, l2)
    g = math.sqrt(m * n)
    lam = np.zeros(D)
    lam[0], lam[m] = g, -g
    return (Q * np.exp(-1j * lam * t)) @ Q.conj().T


def walk_circuit_deviation(m: int, n: int, t: float) -> dict:
    """Compare the assembled walk circuit with ``exp(-iAt)`` on ``K_{m,n}``.

    Returns max-entry deviations on the original block, on the padding
    block (against identity) and on the coupling between them.
    """
    G = assemble_unitary(build_walk_circuit(m, n, t))
    N = m + n
    target = walk_operator_full(BicliqueInstance.from_counts(m, n, 1), t)
    d = G.shape[0] - N
    return {
        "original": max_deviation(G[:N, :N], target),
        "padding": max_deviation(G[N:, N:], np.eye(d)) if d else 0.0,
        "coupling": float(max(np.max(np.abs(G[:N, N:]), initial=0.0),
                              np.max(np.abs(G[N:, :N]), initial=0.0))),
    }


# -- oracle circuit -------------------------------------------------------

def vertex_qubits(inst: BicliqueInstance) -> int:
    return max(1, math.ceil(math.log2(inst.dim)))


def build_oracle_circuit(inst: BicliqueInstance, part: int = 1,
                         sign_correction: bool = False) -> GateSequence:
    """Local oracle from one standard query: ``-C_jZ . O_std . C_jZ``.

    Register: vertex qubits, then the part ancilla ``b`` and the oracle qubit
    ``q``. Inputs are ``|v>|b(v)>|+>`` with ``b(v) = 0`` on the first part.
    Without correction the unselected part picks up a ``-1``; with
    ``sign_correction`` a phase on ``b != part`` cancels it.
    """
    if part not in (0, 1):
        raise DomainError(f"part must be 0 or 1, got {part!r}")
    nv = vertex_qubits(inst)
    b, q = nv, nv + 1
    reg = QubitRegister(nv + 2, tuple(f"v{i}" for i in range(nv)) + ("b", "q"))
    cz = Gate("controlled_z_on_value", (q,), ((b, part),))
    gates = [
        cz,
        Gate("standard_oracle_query", tuple(range(nv)) + (q,), marked=inst.marked),
        cz,
        Gate("global_phase", phase=math.pi),
    ]
    if sign_correction:
        gates.append(Gate("global_phase", controls=((b, 1 - part),), phase=math.pi))
    return GateSequence(reg, tuple(gates))


def _oracle_inputs(inst: BicliqueInstance) -> np.ndarray:
    """Columns ``|v>|b(v)>|+>`` for every vertex ``v``."""
    nv = vertex_qubits(inst)
    D = 1 << (nv + 2)
    E = np.zeros((D, inst.dim), dtype=complex)
    r = 1 / math.sqrt(2)
    for v in range(inst.dim):
        b = 0 if v < inst.m else 1
        base = (v << 2) | (b << 1)
        E[base, v] = r
        E[base | 1, v] = r
    return E


def oracle_vertex_action(inst: BicliqueInstance, seq: GateSequence) -> tuple[np.ndarray, float]:
    """Effective operator on the vertex space and the ancilla leakage.

    Leakage is the largest norm, over vertices, of the output component
    outside ``span{|v>|b(v)>|+>}``; zero means ``b`` and ``q`` come back
    unchanged.
    """
    G = assemble_unitary(seq)
    E = _oracle_inputs(inst)
    out = G @ E
    action = E.conj().T @ out
    leak = float(np.max(np.linalg.norm(out - E @ action, axis=0)))
    return action, leak
