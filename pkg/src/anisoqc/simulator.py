"""Dense state-vector simulation, ground states and pair readout.

Basis ordering: qubit 1 is the most significant bit of the basis index.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import Encoding, Kind, leakage_of, pair_sites
from .errors import ContractError, DimensionError
from .model import ControlSchedule, HamiltonianSpec, validate_schedule
from .pauli import OperatorSum, to_matrix
from .synthesis import schedule_unitary, spec_hamiltonian

AMPLITUDE_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class StateVector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (1 << self.n_qubits,):
            raise DimensionError(f"state of {self.n_qubits} qubits needs {1 << self.n_qubits} amplitudes")
        if abs(np.linalg.norm(amp) - 1) > 1e-10:
            raise ContractError("state is not normalized")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def basis(cls, n_qubits: int, index: int | str) -> "StateVector":
        if isinstance(index, str):
            if len(index) != n_qubits:
                raise DimensionError("bitstring length differs from qubit count")
            index = int(index, 2)
        amp = np.zeros(1 << n_qubits, dtype=complex)
        amp[index] = 1.0
        return cls(n_qubits, amp)

    @classmethod
    def normalized(cls, n_qubits: int, amplitudes) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=complex)
        return cls(n_qubits, amp / np.linalg.norm(amp))

    def to_triples(self) -> list[tuple[int, float, float]]:
        """Sparse ``(index, re, im)`` form above the amplitude floor."""
        return [(int(k), float(a.real), float(a.imag))
                for k, a in enumerate(self.amplitudes) if abs(a) > AMPLITUDE_FLOOR]

    @classmethod
    def from_triples(cls, n_qubits: int, triples) -> "StateVector":
        amp = np.zeros(1 << n_qubits, dtype=complex)
        for k, re, im in triples:
            amp[int(k)] = complex(re, im)
        return cls(n_qubits, amp)


def run_schedule(spec: HamiltonianSpec, schedule: ControlSchedule, initial: StateVector,
                 drift: OperatorSum | None = None) -> StateVector:
    """Apply each segment's exact propagator in order."""
    if initial.n_qubits != spec.n_qubits:
        raise DimensionError("state and device sizes differ")
    validate_schedule(spec, schedule)
    if len(schedule) == 0:
        return initial
    u = schedule_unitary(schedule, spec_hamiltonian(spec, drift), spec.n_qubits)
    out = u @ initial.amplitudes
    return StateVector(spec.n_qubits, out / np.linalg.norm(out))


@dataclass(frozen=True, eq=False)
class GroundState:
    energy: float
    state: StateVector
    degeneracy: int
    basis: tuple[StateVector, ...]

    @property
    def degenerate(self) -> bool:
        return self.degeneracy > 1


def _fix_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > np.abs(v).max() - 1e-9))
    return v * (abs(v[k]) / v[k])


def ground_state(h: OperatorSum, tol: float = 1e-9, dense_cap: int | None = None) -> GroundState:
    """Lowest eigenpair; degenerate ground spaces come back as a full orthonormal basis."""
    w, v = np.linalg.eigh(to_matrix(h, dense_cap))
    deg = int(np.sum(w - w[0] <= tol))
    basis = tuple(StateVector(h.n_qubits, _fix_phase(v[:, k])) for k in range(deg))
    return GroundState(float(w[0]), basis[0], deg, basis)


def state_fidelity(a: StateVector, b: StateVector) -> float:
    if a.n_qubits != b.n_qubits:
        raise DimensionError("states have different sizes")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def leakage(state: StateVector, enc: Encoding) -> float:
    if state.n_qubits != enc.n_physical:
        raise DimensionError("state and encoding sizes differ")
    return leakage_of(state.amplitudes, enc)


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """One outcome of the idealized projective singlet/triplet readout."""

    m: int
    outcome: str  # "singlet" | "triplet"
    probability: float
    post_state: StateVector | None

    def to_dict(self) -> dict:
        return {
            "pair": self.m,
            "outcome": self.outcome,
            "probability": self.probability,
            "post_state": None if self.post_state is None else self.post_state.to_triples(),
        }


def singlet_like(kind) -> np.ndarray:
    """Two-qubit state singled out by the pair readout."""
    kind = Kind.parse(kind)
    s = np.zeros(4, dtype=complex)
    if kind is Kind.AS:
        s[0b01], s[0b10] = 1, -1
    else:
        s[0b00], s[0b11] = 1, -1
    return s / np.sqrt(2)


def measure_pair(state: StateVector, m: int, enc: Encoding) -> list[MeasurementRecord]:
    if state.n_qubits != enc.n_physical:
        raise DimensionError("state and encoding sizes differ")
    enc.check_pair(m)
    i, _ = pair_sites(m)
    n = state.n_qubits
    s = singlet_like(enc.kind)
    # move pair m to its own tensor axis
    psi = state.amplitudes.reshape(1 << (i - 1), 4, 1 << (n - i - 1))
    overlap = np.einsum("p,apb->ab", s.conj(), psi)
    singlet = np.einsum("p,ab->apb", s, overlap)
    records = []
    for outcome, part in (("singlet", singlet), ("triplet", psi - singlet)):
        vec = part.reshape(-1)
        p = float(np.vdot(vec, vec).real)
        post = StateVector(n, vec / np.sqrt(p)) if p > 1e-15 else None
        records.append(MeasurementRecord(m, outcome, p, post))
    return records
