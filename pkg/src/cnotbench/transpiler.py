"""Direction-aware CNOT passes over the circuit IR.

enforce_direction rewrites every CNOT onto the hardware's physical
control direction using the Hadamard sandwich. orient_for_error instead
picks, per CNOT, whichever realization maximizes the product of per-gate
success probabilities (1 - error), consuming the dual-direction error
rates carried by the coupling map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .circuits import Circuit, Gate, GateKind, reverse_cnot
from .noise import DirectedEdgeParams, NoiseModel, QubitParams, load_noise_model

__all__ = [
    "CouplingMap",
    "CnotDecision",
    "TranspileReport",
    "enforce_direction",
    "orient_for_error",
    "estimate_success",
    "cancel_adjacent_hadamards",
]


@dataclass(frozen=True)
class CouplingMap:
    """Directed CNOT characterization plus the hardware control direction.

    Shares the noise-model document schema, so a calibration snapshot
    serves both the simulator and the transpiler. qubit_params supplies
    single-qubit error rates for success estimates when present.
    """

    num_qubits: int
    edges: dict[tuple[int, int], DirectedEdgeParams]
    physical_direction: dict[tuple[int, int], int]
    qubit_params: tuple[QubitParams, ...] | None = None

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError(f"coupling map needs at least one qubit, got {self.num_qubits}")
        for direction, edge in self.edges.items():
            if direction != edge.direction:
                raise ValueError(f"edge stored under {direction} describes {edge.direction}")
            if max(direction) >= self.num_qubits:
                raise ValueError(f"edge {direction} outside register of {self.num_qubits}")
        for pair, ctrl in self.physical_direction.items():
            a, b = pair
            if not (0 <= a < b < self.num_qubits):
                raise ValueError(f"pair {pair} is not ordered and in range")
            if ctrl not in pair:
                raise ValueError(f"physical control {ctrl} not in pair {pair}")
        if self.qubit_params is not None and len(self.qubit_params) != self.num_qubits:
            raise ValueError(
                f"{len(self.qubit_params)} qubit parameter set(s) for {self.num_qubits} qubit(s)"
            )

    @classmethod
    def from_noise_model(cls, model: NoiseModel) -> "CouplingMap":
        return cls(
            num_qubits=model.num_qubits,
            edges={e.direction: e for e in model.edges},
            physical_direction=dict(model.physical_direction),
            qubit_params=model.qubits,
        )

    @classmethod
    def from_document(cls, document: dict) -> "CouplingMap":
        return cls.from_noise_model(load_noise_model(document))

    def has_edge(self, control: int, target: int) -> bool:
        return (control, target) in self.edges

    def edge(self, control: int, target: int) -> DirectedEdgeParams:
        try:
            return self.edges[(control, target)]
        except KeyError:
            raise ValueError(f"no edge characterization for ({control} -> {target})") from None

    def physical_control(self, a: int, b: int) -> int:
        pair = (min(a, b), max(a, b))
        try:
            return self.physical_direction[pair]
        except KeyError:
            raise ValueError(f"qubits {pair} are not a coupled pair") from None


@dataclass(frozen=True)
class CnotDecision:
    """How one logical CNOT was realized and what each option scored."""

    index: int
    control: int
    target: int
    realization: str  # "direct" | "sandwich"
    est_success_direct: float | None
    est_success_sandwich: float | None

    def to_document(self) -> dict:
        return {
            "index": self.index,
            "logical": [self.control, self.target],
            "realization": self.realization,
            "est_success_direct": self.est_success_direct,
            "est_success_sandwich": self.est_success_sandwich,
        }


@dataclass(frozen=True)
class TranspileReport:
    """Rewritten circuit, per-CNOT decisions, and the success estimate."""

    circuit: Circuit
    decisions: tuple[CnotDecision, ...]
    estimated_success: float | None
    gates_before: int
    gates_after: int

    def decision_lines(self) -> list[str]:
        return [json.dumps(d.to_document(), sort_keys=True) for d in self.decisions]


# ── success estimation ──────────────────────────────────────────────────


def _resolve_params(
    cmap: CouplingMap, qubit_params: tuple[QubitParams, ...] | None
) -> tuple[QubitParams, ...] | None:
    return qubit_params if qubit_params is not None else cmap.qubit_params


def _single_qubit_success(gate: Gate, params: tuple[QubitParams, ...] | None) -> float:
    if params is None:
        raise ValueError("single-qubit error rates are needed but no qubit parameters were given")
    return 1.0 - params[gate.qubits[0]].gate_error(gate.kind)


def estimate_success(
    circuit: Circuit,
    cmap: CouplingMap,
    qubit_params: tuple[QubitParams, ...] | None = None,
) -> float:
    """Product of per-gate success probabilities (1 - error) over the circuit.

    Barriers and measurements contribute nothing; every CNOT direction used
    must be characterized on the map.
    """
    params = _resolve_params(cmap, qubit_params)
    success = 1.0
    for gate in circuit.instructions:
        if gate.kind in (GateKind.BARRIER, GateKind.MEASURE):
            continue
        if gate.kind is GateKind.CNOT:
            success *= 1.0 - cmap.edge(gate.control, gate.target).cnot_error
        else:
            success *= _single_qubit_success(gate, params)
    return success


def _cnot_options(
    control: int,
    target: int,
    cmap: CouplingMap,
    params: tuple[QubitParams, ...] | None,
) -> tuple[float | None, float | None]:
    """Success of the direct and sandwich realizations, where computable."""
    direct = None
    if cmap.has_edge(control, target):
        direct = 1.0 - cmap.edge(control, target).cnot_error
    sandwich = None
    if cmap.has_edge(target, control) and params is not None:
        h_success = (1.0 - params[control].gate_error(GateKind.H)) ** 2
        h_success *= (1.0 - params[target].gate_error(GateKind.H)) ** 2
        sandwich = h_success * (1.0 - cmap.edge(target, control).cnot_error)
    return direct, sandwich


def _finish(
    original: Circuit,
    rewritten: list[Gate],
    decisions: list[CnotDecision],
    cmap: CouplingMap,
    params: tuple[QubitParams, ...] | None,
) -> TranspileReport:
    circuit = Circuit(original.num_qubits, original.num_clbits, tuple(rewritten))
    try:
        success: float | None = estimate_success(circuit, cmap, params)
    except ValueError:
        success = None
    return TranspileReport(
        circuit=circuit,
        decisions=tuple(decisions),
        estimated_success=success,
        gates_before=original.unitary_gate_count,
        gates_after=circuit.unitary_gate_count,
    )


# ── passes ──────────────────────────────────────────────────────────────


def enforce_direction(
    circuit: Circuit,
    cmap: CouplingMap,
    qubit_params: tuple[QubitParams, ...] | None = None,
) -> TranspileReport:
    """Realize every CNOT in the hardware's physical control direction.

    A CNOT already oriented with the physical direction is kept; the
    reversed one becomes the Hadamard sandwich. CNOTs on uncoupled pairs
    are errors.
    """
    params = _resolve_params(cmap, qubit_params)
    rewritten: list[Gate] = []
    decisions: list[CnotDecision] = []
    for index, gate in enumerate(circuit.instructions):
        if gate.kind is not GateKind.CNOT:
            rewritten.append(gate)
            continue
        control, target = gate.control, gate.target
        physical = cmap.physical_control(control, target)
        direct, sandwich = _cnot_options(control, target, cmap, params)
        if control == physical:
            rewritten.append(gate)
            realization = "direct"
        else:
            rewritten.extend(reverse_cnot(control, target))
            realization = "sandwich"
        decisions.append(
            CnotDecision(index, control, target, realization, direct, sandwich)
        )
    return _finish(circuit, rewritten, decisions, cmap, params)


def orient_for_error(
    circuit: Circuit,
    cmap: CouplingMap,
    qubit_params: tuple[QubitParams, ...] | None = None,
) -> TranspileReport:
    """Pick per-CNOT realizations maximizing the success product.

    The sandwich is chosen only when it strictly beats the direct
    realization, so ties keep the cheaper direct form and a second pass
    changes nothing.
    """
    params = _resolve_params(cmap, qubit_params)
    rewritten: list[Gate] = []
    decisions: list[CnotDecision] = []
    for index, gate in enumerate(circuit.instructions):
        if gate.kind is not GateKind.CNOT:
            rewritten.append(gate)
            continue
        control, target = gate.control, gate.target
        direct, sandwich = _cnot_options(control, target, cmap, params)
        if direct is None and sandwich is None:
            if cmap.has_edge(target, control) and params is None:
                raise ValueError(
                    "qubit parameters are needed to cost the sandwich realization"
                )
            raise ValueError(f"qubits ({control}, {target}) are not a coupled pair")
        if direct is None or (sandwich is not None and sandwich > direct):
            rewritten.extend(reverse_cnot(control, target))
            realization = "sandwich"
        else:
            rewritten.append(gate)
            realization = "direct"
        decisions.append(
            CnotDecision(index, control, target, realization, direct, sandwich)
        )
    return _finish(circuit, rewritten, decisions, cmap, params)


def cancel_adjacent_hadamards(circuit: Circuit) -> Circuit:
    """Drop H pairs with nothing in between on that qubit.

    Barriers and measurements act as fences: a pair straddling one is
    kept. Off by default in the CLI since it can erase deliberate
    sandwich structure.
    """
    dropped: set[int] = set()
    pending: dict[int, int] = {}  # qubit -> index of an uncancelled H
    for index, gate in enumerate(circuit.instructions):
        if gate.kind is GateKind.H:
            q = gate.qubits[0]
            if q in pending:
                dropped.add(pending.pop(q))
                dropped.add(index)
            else:
                pending[q] = index
            continue
        for q in gate.qubits:
            pending.pop(q, None)
    kept = tuple(g for i, g in enumerate(circuit.instructions) if i not in dropped)
    return Circuit(circuit.num_qubits, circuit.num_clbits, kept)
