"""Gate synthesis from the natural generators of an exchange device.

Convention: a segment with Hamiltonian ``H`` and duration ``t`` applies
``exp(-i H t)``.  Targets written as ``exp(+i ...)`` are reached by negating
control values.  Schedules are replayed in chronological order, so the
unitary of ``[s1, s2]`` is ``U(s2) @ U(s1)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from .algebra import restricted_closure
from .encoding import Encoding, Kind, entangling_generator, pair_sites, restrict
from .errors import CapabilityError, ContractError, DimensionError
from .model import (
    ControlSchedule,
    HamiltonianSpec,
    Segment,
    build_operator,
    parameter_generator,
)
from .pauli import OperatorSum, bracket, to_matrix

Hamiltonian = Callable[[Mapping[str, float]], OperatorSum]

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1.0 + 0j, -1.0]),
}


# --------------------------------------------------------------------------
# exponentials and replay

def _hermitian_matrix(h) -> np.ndarray:
    mat = to_matrix(h) if isinstance(h, OperatorSum) else np.asarray(h, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError("Hamiltonian must be square")
    if np.linalg.norm(mat - mat.conj().T) > 1e-12 * max(1.0, np.linalg.norm(mat)):
        raise ContractError("Hamiltonian is not Hermitian")
    return mat


def _expm_h(mat: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def exact_gate(h, t: float) -> np.ndarray:
    """``exp(-i H t)`` through the eigendecomposition of ``H``."""
    return _expm_h(_hermitian_matrix(h), float(t))


def spec_hamiltonian(spec: HamiltonianSpec, drift: OperatorSum | None = None) -> Hamiltonian:
    def h(assignments):
        op = build_operator(spec, assignments)
        return op if drift is None else op + drift
    return h


def generator_hamiltonian(generators: Mapping[str, OperatorSum]) -> Hamiltonian:
    """Hamiltonian ``sum_k value_k G_k`` for schedules keyed by generator name."""
    gens = dict(generators)
    n = next(iter(gens.values())).n_qubits

    def h(assignments):
        out = OperatorSum.zero(n)
        for name, value in assignments.items():
            if name not in gens:
                raise ContractError(f"schedule names unknown generator {name!r}")
            out = out + gens[name] * value
        return out
    return h


def schedule_unitary(schedule: ControlSchedule, hamiltonian: Hamiltonian, n_qubits: int) -> np.ndarray:
    """Compose exact segment unitaries, reusing eigendecompositions of repeated Hamiltonians."""
    dim = 1 << n_qubits
    u = np.eye(dim, dtype=complex)
    cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
    for seg in schedule:
        key = tuple(seg.assignments.items())
        if key not in cache:
            mat = _hermitian_matrix(hamiltonian(seg.assignments))
            if mat.shape != (dim, dim):
                raise DimensionError("segment Hamiltonian has the wrong size")
            cache[key] = np.linalg.eigh(mat)
        w, v = cache[key]
        u = ((v * np.exp(-1j * w * seg.duration)) @ v.conj().T) @ u
    return u


# --------------------------------------------------------------------------
# figures of merit

def _isometry(space, dim: int) -> np.ndarray:
    if space is None:
        return np.eye(dim, dtype=complex)
    if isinstance(space, Encoding):
        return space.isometry
    p = np.asarray(space, dtype=complex)
    if p.shape != (dim, dim):
        raise DimensionError("projector does not match the unitary size")
    w, v = np.linalg.eigh(p)
    return v[:, w > 0.5]


def gate_fidelity(u: np.ndarray, v: np.ndarray, space=None) -> float:
    """Phase-insensitive ``|Tr(P U^dagger V P) / d|^2`` on the range of ``space``.

    ``space`` may be ``None`` (whole space), an :class:`Encoding`, or a projector.
    """
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape:
        raise DimensionError("unitaries have different shapes")
    iso = _isometry(space, u.shape[0])
    d = iso.shape[1]
    val = np.trace(iso.conj().T @ u.conj().T @ v @ iso) / d
    return float(min(1.0, abs(val) ** 2))


def gate_leakage(u: np.ndarray, space) -> float:
    """Worst-case population pushed out of the code space, ``||(1-P) U P||^2``."""
    iso = _isometry(space, u.shape[0])
    out = u @ iso
    out = out - iso @ (iso.conj().T @ out)
    return float(np.linalg.norm(out, 2) ** 2) if out.size else 0.0


@dataclass
class GateResult:
    """A synthesized gate and its audit trail.

    ``relations`` records the engine-measured conversion factors used to
    turn rotation angles into durations, so conventions can be checked.
    """

    unitary: np.ndarray
    schedule: ControlSchedule
    fidelity: float
    leakage: float
    step_count: int
    converged: bool = True
    error: float | None = None
    relations: dict = field(default_factory=dict)
    target: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "schedule": self.schedule.to_document(),
            "fidelity": self.fidelity,
            "leakage": self.leakage,
            "step_count": self.step_count,
            "converged": self.converged,
            "relations": self.relations,
        }
        if self.error is not None:
            out["error"] = self.error
        return out


# --------------------------------------------------------------------------
# product formulas

def trotter_sum(a: OperatorSum, b: OperatorSum, alpha: float, beta: float, n: int) -> GateResult:
    """``(e^{i alpha A / n} e^{i beta B / n})^n`` approximating ``e^{i(alpha A + beta B)}``.

    The schedule is keyed by the pseudo-parameters ``"A"`` and ``"B"``;
    ``error`` is the spectral-norm distance to the exact exponential.
    """
    if n < 1:
        raise ContractError("n must be at least 1")
    if a.n_qubits != b.n_qubits:
        raise DimensionError("A and B act on different numbers of qubits")
    segs = []
    for _ in range(n):
        # B acts first within each step
        segs.append(Segment({"B": -float(beta)}, 1.0 / n))
        segs.append(Segment({"A": -float(alpha)}, 1.0 / n))
    sched = ControlSchedule(tuple(segs))
    u = schedule_unitary(sched, generator_hamiltonian({"A": a, "B": b}), a.n_qubits)
    exact = exact_gate(a * (-alpha) + b * (-beta), 1.0)
    err = float(np.linalg.norm(u - exact, 2))
    return GateResult(u, sched, gate_fidelity(exact, u), 0.0, 2 * n, True, err, target=exact)


@dataclass(frozen=True)
class Leaf:
    """A directly switchable Hamiltonian: ``op`` realized by ``assignments``."""

    op: OperatorSum
    assignments: Mapping[str, float]


@dataclass(frozen=True)
class Comm:
    """The Hermitian bracket ``-i[a, b]`` of two nodes."""

    a: "Leaf | Comm"
    b: "Leaf | Comm"


def node_operator(node) -> OperatorSum:
    if isinstance(node, Leaf):
        return node.op
    return bracket(node_operator(node.a), node_operator(node.b))


def _emit(node, tau: float, steps: Sequence[int], baseline: Mapping[str, float], out: list):
    """Append segments realizing ``exp(-i op(node) tau)``."""
    if tau == 0:
        return
    if isinstance(node, Leaf):
        sign = 1.0 if tau > 0 else -1.0
        seg = dict(baseline)
        seg.update({k: sign * v for k, v in node.assignments.items()})
        out.append(Segment(seg, abs(tau)))
        return
    a, b = (node.a, node.b) if tau > 0 else (node.b, node.a)
    n = steps[0]
    s = math.sqrt(abs(tau) / (2 * n))
    for _ in range(n):
        # e^X e^Y e^-X e^-Y (X = -i A s, Y = -i B s, e^-Y first), then the
        # same with X, Y negated; third-order terms cancel between the halves
        for sign in (1, -1):
            for node_, t in ((b, -s), (a, -s), (b, s), (a, s)):
                _emit(node_, sign * t, steps[1:], baseline, out)


def nested_commutator_schedule(node, tau: float, steps: Sequence[int] | int,
                               baseline: Mapping[str, float] | None = None) -> ControlSchedule:
    """Schedule approximating ``exp(-i op(node) tau)`` by nested group commutators.

    ``steps[k]`` is the repetition count at nesting level ``k``.
    """
    depth = _depth(node)
    if isinstance(steps, int):
        steps = [steps] * max(depth, 1)
    if len(steps) < depth:
        raise ContractError(f"need {depth} step counts for this nesting depth")
    if any(k < 1 for k in steps):
        raise ContractError("step counts must be positive")
    out: list = []
    _emit(node, float(tau), list(steps), dict(baseline or {}), out)
    return ControlSchedule(tuple(out))


def _depth(node) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_depth(node.a), _depth(node.b))


def group_commutator_gate(a: OperatorSum, b: OperatorSum, t: float, n: int) -> GateResult:
    """``n`` group-commutator steps approximating ``e^{-[A,B] t}``."""
    if t < 0:
        raise ContractError("t must be non-negative")
    if n < 1:
        raise ContractError("n must be at least 1")
    node = Comm(Leaf(a, {"A": 1.0}), Leaf(b, {"B": 1.0}))
    sched = nested_commutator_schedule(node, t, [n])
    u = schedule_unitary(sched, generator_hamiltonian({"A": a, "B": b}), a.n_qubits)
    target = exact_gate(bracket(a, b), t)
    err = float(np.linalg.norm(u - target, 2))
    return GateResult(u, sched, gate_fidelity(target, u), 0.0, len(sched), True, err, target=target)


def dm_y_rotation(spec: HamiltonianSpec, i: int, j: int, theta: float,
                  steps: Sequence[int] = (16, 16)) -> GateResult:
    """``exp(-i theta Y_i)`` from the DM, isotropic-exchange and ``eps_i`` controls.

    Uses ``bracket(Z_i, bracket(D, S)) = c Y_i`` with ``D = Y_i Z_j - Z_i Y_j``
    and ``S`` the isotropic coupling; ``c`` (8 with these normalizations) is
    measured and reported as ``y_scale``.
    """
    n = spec.n_qubits
    tag = f"{i}_{j}"
    need = [f"dx_{tag}", f"J_{tag}", f"Jz_{tag}", f"eps_{i}"]
    controls = set(spec.control_names())
    for name in need:
        if name not in controls:
            raise CapabilityError(f"control {name!r} is not available", missing=name)
    d = Leaf(parameter_generator(spec, f"dx_{tag}"), {f"dx_{tag}": 1.0})
    s = Leaf(parameter_generator(spec, f"J_{tag}") * 2 + parameter_generator(spec, f"Jz_{tag}"),
             {f"J_{tag}": 2.0, f"Jz_{tag}": 1.0})
    z = Leaf(parameter_generator(spec, f"eps_{i}") * 2, {f"eps_{i}": 2.0})
    node = Comm(z, Comm(d, s))
    baseline = {name: 0.0 for name in spec.control_names()}
    op = node_operator(node)
    y = OperatorSum.pauli(n, {i: "Y"})
    c = op.coefficient(y.terms and next(iter(y.terms))).real
    if not op.allclose(y * c) or abs(c) < 1e-12:
        raise AssertionError("nested bracket is not proportional to Y_i")
    sched = nested_commutator_schedule(node, theta / c, list(steps), baseline)
    u = schedule_unitary(sched, spec_hamiltonian(spec), n)
    target = exact_gate(OperatorSum.pauli(n, {i: "Y"}), theta)
    return GateResult(u, sched, gate_fidelity(target, u), 0.0, len(sched), True,
                      float(np.linalg.norm(u - target, 2)),
                      {"node_operator": op.render(), "y_scale": c}, target=target)


# --------------------------------------------------------------------------
# encoded single-qubit gates

def _embed(single: np.ndarray, m: int, n_logical: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(1 << (m - 1)), single), np.eye(1 << (n_logical - m)))


def _axis_controls(spec: HamiltonianSpec, enc: Encoding, m: int) -> dict[str, tuple[dict, float]]:
    """Unit control assignments for the logical Z and X axes of pair ``m``.

    Returns ``{axis: (assignments, k)}`` where the assignments at unit
    amplitude restrict to ``k`` times the logical Pauli.
    """
    i, j = pair_sites(m)
    controls = set(spec.control_names())
    out = {}
    if f"eps_{i}" in controls:
        z_unit = {f"eps_{i}": 1.0}
    elif f"eps_{j}" in controls:
        z_unit = {f"eps_{j}": -1.0 if enc.kind is Kind.AS else 1.0}
    else:
        raise CapabilityError(f"no single-qubit energy control on pair {m}", missing=f"eps_{i}")
    out["z"] = z_unit
    bond = f"{i}_{j}"
    if enc.kind is Kind.AS:
        if f"J_{bond}" in controls:
            out["x"] = {f"J_{bond}": 1.0}
        elif {f"Jx_{bond}", f"Jy_{bond}"} <= controls:
            out["x"] = {f"Jx_{bond}": 0.5, f"Jy_{bond}": 0.5}
        else:
            raise CapabilityError(f"exchange J on pair {m} is not controllable", missing=f"J_{bond}")
    else:
        if f"Delta_{bond}" in controls:
            out["x"] = {f"Delta_{bond}": 1.0}
        elif {f"Jx_{bond}", f"Jy_{bond}"} <= controls:
            out["x"] = {f"Jx_{bond}": 0.5, f"Jy_{bond}": -0.5}
        else:
            raise CapabilityError(f"anisotropy Delta on pair {m} is not controllable",
                                  missing=f"Delta_{bond}")
    result = {}
    for axis, unit in out.items():
        gen = OperatorSum.zero(spec.n_qubits)
        for name, v in unit.items():
            gen = gen + parameter_generator(spec, name) * v
        mat = restrict(gen, enc)
        pauli = _embed(_PAULI[axis.upper()], m, enc.n_logical)
        k = np.vdot(pauli, mat).real / np.vdot(pauli, pauli).real
        if np.linalg.norm(mat - k * pauli) > 1e-12 or abs(k) < 1e-12:
            raise AssertionError(f"{axis} control does not restrict to a logical Pauli")
        result[axis] = (unit, float(k))
    return result


def _su2_check(target) -> np.ndarray:
    u = np.asarray(target, dtype=complex)
    if u.shape != (2, 2):
        raise DimensionError("single-qubit target must be 2x2")
    if np.linalg.norm(u.conj().T @ u - np.eye(2)) > 1e-10 or abs(np.linalg.det(u) - 1) > 1e-10:
        raise ContractError("target is not special unitary")
    return u


def _rotation_of(u: np.ndarray) -> tuple[float, np.ndarray]:
    """Angle ``phi in [0, pi]`` and unit axis with ``u = +-exp(-i phi n.sigma / 2)``."""
    w = np.trace(u).real / 2
    vec = np.array([(1j * np.trace(_PAULI[a] @ u) / 2).real for a in "XYZ"])
    lead = vec[np.flatnonzero(np.abs(vec) > 1e-12)[:1]]
    if w < -1e-15 or (abs(w) <= 1e-15 and lead.size and lead[0] < 0):
        w, vec = -w, -vec
    s = np.linalg.norm(vec)
    phi = 2 * math.atan2(s, w)
    axis = vec / s if s > 0 else np.array([0.0, 0.0, 1.0])
    return phi, axis


def _base_assignments(spec: HamiltonianSpec) -> dict[str, float]:
    return {name: 0.0 for name in spec.control_names()}


def _finish(spec, enc, sched, target_code, relations, converged=True) -> GateResult:
    u = schedule_unitary(sched, spec_hamiltonian(spec), spec.n_qubits)
    uc = enc.isometry.conj().T @ u @ enc.isometry
    fid = gate_fidelity(target_code, uc)
    return GateResult(u, sched, fid, gate_leakage(u, enc), len(sched), converged,
                      relations=relations, target=target_code)


def euler_schedule(target, m: int, enc: Encoding, spec: HamiltonianSpec,
                   amplitude: float = 1.0) -> GateResult:
    """Encoded single-qubit gate on logical qubit ``m``.

    Rotations about an axis in the x-z plane use one tilted segment; others
    use the Z-X-Z Euler factorization.  Durations are ``angle / (2 k a)``
    where ``k`` is the measured restriction factor of the control and ``a``
    the amplitude.
    """
    u = _su2_check(target)
    enc.check_pair(m)
    if spec.n_qubits != enc.n_physical:
        raise DimensionError("device and encoding sizes differ")
    if amplitude <= 0:
        raise ContractError("amplitude must be positive")
    axes = _axis_controls(spec, enc, m)
    (zu, kz), (xu, kx) = axes["z"], axes["x"]
    base = _base_assignments(spec)
    relations = {"z_per_unit": kz, "x_per_unit": kx, "z_control": zu, "x_control": xu}
    phi, n = _rotation_of(u)
    segs = []
    if phi < 1e-15:
        pass
    elif abs(n[1]) < 1e-12:
        # one tilted segment: H_L = a (n_x X + n_z Z) up to the measured factors
        if abs(n[0]) > 1e-12:
            scale = amplitude * abs(kx) / abs(n[0])
        else:
            scale = amplitude * abs(kz)
        a = dict(base)
        for unit, k, comp in ((zu, kz, n[2]), (xu, kx, n[0])):
            for name, v in unit.items():
                a[name] = a.get(name, 0.0) + v * scale * comp / k
        segs.append(Segment(a, phi / (2 * scale)))
        relations["decomposition"] = "tilted"
    else:
        quat = [*(n * math.sin(phi / 2)), math.cos(phi / 2)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UserWarning)
            alpha, beta, gamma = Rotation.from_quat(quat).as_euler("ZXZ")
        # matrix order Rz(alpha) Rx(beta) Rz(gamma): gamma acts first
        for angle, unit, k in ((gamma, zu, kz), (beta, xu, kx), (alpha, zu, kz)):
            if abs(angle) < 1e-15:
                continue
            sign = 1.0 if angle > 0 else -1.0
            a = dict(base)
            for name, v in unit.items():
                a[name] = sign * v * amplitude
            segs.append(Segment(a, abs(angle) / (2 * abs(k) * amplitude)))
        relations["decomposition"] = "zxz"
        relations["euler_angles"] = [float(alpha), float(beta), float(gamma)]
    sched = ControlSchedule(tuple(segs))
    return _finish(spec, enc, sched, _embed(u, m, enc.n_logical), relations)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def hadamard_schedule(m: int, enc: Encoding, spec: HamiltonianSpec, amplitude: float = 1.0) -> GateResult:
    """Encoded Hadamard (realized as the special-unitary ``i H``)."""
    return euler_schedule(1j * HADAMARD, m, enc, spec, amplitude)


def rotation(axis: str, theta: float) -> np.ndarray:
    """``exp(-i theta sigma_axis / 2)``."""
    return np.cos(theta / 2) * np.eye(2) - 1j * np.sin(theta / 2) * _PAULI[axis.upper()]


# --------------------------------------------------------------------------
# entangling gate

_MAGIC = np.array([[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]]) / math.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)


def makhlin_invariants(u: np.ndarray) -> tuple[complex, float]:
    """Local invariants ``(G1, G2)`` of a two-qubit gate."""
    u = np.asarray(u, dtype=complex)
    ub = _MAGIC.conj().T @ u @ _MAGIC
    mm = ub.T @ ub
    det = np.linalg.det(u)
    tr = np.trace(mm)
    g1 = tr ** 2 / (16 * det)
    g2 = (tr ** 2 - np.trace(mm @ mm)) / (4 * det)
    return complex(g1), float(g2.real)


def locally_equivalent(u: np.ndarray, v: np.ndarray, tol: float = 1e-8) -> bool:
    g1u, g2u = makhlin_invariants(u)
    g1v, g2v = makhlin_invariants(v)
    return abs(g1u - g1v) <= tol and abs(g2u - g2v) <= tol


def two_qubit_block(u_code: np.ndarray, m: int, n_logical: int) -> np.ndarray:
    """4x4 action on logical qubits ``(m, m+1)`` of a gate acting trivially elsewhere."""
    left, right = 1 << (m - 1), 1 << (n_logical - m - 1)
    t = u_code.reshape(left, 4, right, left, 4, right)
    return np.einsum("aibajb->ij", t) / (left * right)


def entangling_schedule(enc: Encoding, m: int, spec: HamiltonianSpec, amplitude: float = 1.0,
                        duration: float | None = None, local_corrections: bool = False) -> GateResult:
    """Controlled-phase between logical qubits ``m`` and ``m+1`` via ``Jz_{2m,2m+1}``.

    The coupling restricts to ``s Z_L Z_L`` (``s`` measured), so the default
    duration ``pi / (4 a)`` yields a gate locally equivalent to CZ.  With
    ``local_corrections`` a second segment of encoded Z rotations turns it
    into CZ itself.
    """
    enc.check_pair(m)
    if m >= enc.n_logical:
        raise ContractError("entangling gate needs logical qubits m and m+1")
    name = f"Jz_{2 * m}_{2 * m + 1}"
    if name not in spec.control_names():
        raise CapabilityError(f"control {name!r} is not available", missing=name)
    rel = entangling_generator(enc, m)
    s = rel.logical_scale
    t = math.pi / (4 * amplitude) if duration is None else float(duration)
    base = _base_assignments(spec)
    segs = []
    if t > 0:
        a = dict(base)
        a[name] = amplitude
        segs.append(Segment(a, t))
    zz = _embed(_PAULI["Z"], m, enc.n_logical) @ _embed(_PAULI["Z"], m + 1, enc.n_logical)
    target = _expm_h(s * amplitude * zz, t)
    relations = {"code_scalar": rel.scalar, "logical_scale": s}
    if local_corrections:
        if duration is not None:
            raise ContractError("local corrections assume the default duration")
        # CZ = phase * exp(+i pi/4 s (Z_m + Z_{m+1})) exp(-i s pi/4 Z_m Z_{m+1})
        zm = _axis_controls(spec, enc, m)["z"]
        zn = _axis_controls(spec, enc, m + 1)["z"]
        theta = -s * math.pi / 2
        a = dict(base)
        for unit, k in (zm, zn):
            for nm, v in unit.items():
                a[nm] = math.copysign(1.0, theta) * v * amplitude
        segs.append(Segment(a, abs(theta) / (2 * abs(zm[1]) * amplitude)))
        target = np.kron(np.kron(np.eye(1 << (m - 1)), CZ), np.eye(1 << (enc.n_logical - m - 1)))
    sched = ControlSchedule(tuple(segs))
    result = _finish(spec, enc, sched, target, relations)
    block = two_qubit_block(enc.isometry.conj().T @ result.unitary @ enc.isometry, m, enc.n_logical)
    g1, g2 = makhlin_invariants(block)
    result.relations["makhlin"] = {"g1_re": g1.real, "g1_im": g1.imag, "g2": g2}
    result.relations["cz_equivalent"] = locally_equivalent(block, CZ)
    return result


# --------------------------------------------------------------------------
# refocusing

@dataclass(frozen=True)
class RefocusReport:
    schedule: ControlSchedule
    fidelity_before: float
    fidelity_after: float
    leakage_after: float


def _check_drift(drift: OperatorSum):
    for p in drift.terms:
        sites = p.support
        z_only = all(p.letter(s) == "Z" for s in sites)
        ok = z_only and (len(sites) <= 1 or (len(sites) == 2 and (
            (sites[0] % 2 == 1 and sites[1] == sites[0] + 1) or
            (sites[0] % 2 == 0 and sites[1] == sites[0] + 1))))
        if not ok:
            raise CapabilityError(f"drift term {p.label()} cannot be refocused by pair echoes",
                                  missing=p.label())


def _toggle(assignments: Mapping[str, float], pairs: set[int]) -> dict[str, float]:
    """Control assignments in the frame toggled by a pi pulse about ``G^x`` on ``pairs``.

    The map is exact on the code space, where ``Z`` on either qubit of a
    pulsed pair changes sign in both encodings.
    """
    def flipped(site):
        return (site + 1) // 2 in pairs

    out = dict(assignments)
    for name, v in assignments.items():
        head, *idx = name.split("_")
        idx = [int(k) for k in idx]
        if head == "eps" and flipped(idx[0]):
            out[name] = -v
        elif head == "Jz" and (idx[0] + 1) // 2 != (idx[1] + 1) // 2:
            if flipped(idx[0]) != flipped(idx[1]):
                out[name] = -v
        elif head in ("fx", "fy", "dx", "dy", "dz") and v:
            raise CapabilityError(f"control {name} does not toggle cleanly under the echo", missing=name)
        elif head in ("J", "Delta", "Jx", "Jy") and (idx[0] + 1) // 2 != (idx[1] + 1) // 2 and v:
            raise CapabilityError(f"control {name} does not toggle cleanly under the echo", missing=name)
    return out


def refocus(schedule: ControlSchedule, drift: OperatorSum, enc: Encoding, spec: HamiltonianSpec,
            pairs: Sequence[int] | None = None, periods: int = 1,
            pulse_amplitude: float | None = None) -> ControlSchedule:
    """Interleave pi pulses about ``G^x`` so the drift averages out over each echo period.

    Each segment is split into ``periods`` echo periods of the form
    ``half segment, pi pulse, toggled half segment, pi pulse``.  Pulses have
    finite amplitude and the drift stays on during them.
    """
    if drift.is_zero() or len(schedule) == 0:
        return schedule
    _check_drift(drift)
    pairs = set(range(1, enc.n_logical + 1) if pairs is None else pairs)
    for m in pairs:
        enc.check_pair(m)
    if periods < 1:
        raise ContractError("periods must be at least 1")
    scale = max([abs(c) for c in drift.terms.values()] +
                [abs(v) for s in schedule for v in s.assignments.values()] + [1.0])
    amp = 1e6 * scale if pulse_amplitude is None else float(pulse_amplitude)
    pulse = dict(_base_assignments(spec))
    for m in sorted(pairs):
        unit, k = _axis_controls(spec, enc, m)["x"]
        for name, v in unit.items():
            pulse[name] = v * amp
        pulse_t = math.pi / (2 * abs(k) * amp)
    segs = []
    for seg in schedule:
        half = seg.duration / (2 * periods)
        toggled = _toggle(seg.assignments, pairs)
        for _ in range(periods):
            segs.append(Segment(seg.assignments, half))
            segs.append(Segment(pulse, pulse_t))
            segs.append(Segment(toggled, half))
            segs.append(Segment(pulse, pulse_t))
    return ControlSchedule(tuple(segs))


def refocus_report(schedule: ControlSchedule, drift: OperatorSum, enc: Encoding, spec: HamiltonianSpec,
                   **kwargs) -> RefocusReport:
    """Code-space fidelity to the drift-free evolution before and after refocusing."""
    n = spec.n_qubits
    ideal = schedule_unitary(schedule, spec_hamiltonian(spec), n)
    noisy = schedule_unitary(schedule, spec_hamiltonian(spec, drift), n)
    echoed = refocus(schedule, drift, enc, spec, **kwargs)
    fixed = schedule_unitary(echoed, spec_hamiltonian(spec, drift), n)
    return RefocusReport(echoed, gate_fidelity(ideal, noisy, enc), gate_fidelity(ideal, fixed, enc),
                         gate_leakage(fixed, enc))


# --------------------------------------------------------------------------
# numerical compilation

def compile_gate(target, generators, budget: int, space=None, target_fidelity: float = 0.999,
                 seeds: Sequence[int] = (0, 1, 2), max_evals: int = 20000,
                 baseline: Mapping[str, float] | None = None) -> GateResult:
    """Alternating-generator ansatz with durations tuned by a derivative-free search.

    ``generators`` is a name -> OperatorSum mapping or a list (named ``g1``, ``g2``, ...).
    ``baseline`` values (for example zeros for every control of a device)
    are written into each segment alongside the active generator.
    ``target`` acts on the range of ``space`` (an Encoding, a projector, or
    ``None`` for the full space).  Segment ``k`` switches on generator
    ``k mod G`` with a signed amplitude.
    """
    if not isinstance(generators, Mapping):
        generators = {f"g{k + 1}": g for k, g in enumerate(generators)}
    names = sorted(generators)
    gens = [generators[k] for k in names]
    if not gens:
        raise ContractError("no generators")
    n = gens[0].n_qubits
    dim = 1 << n
    proj = np.eye(dim, dtype=complex) if space is None else (
        space.projector if isinstance(space, Encoding) else np.asarray(space, dtype=complex))
    target = np.asarray(target, dtype=complex)
    iso = _isometry(proj, dim)
    d = iso.shape[1]
    if target.shape != (d, d):
        raise DimensionError(f"target must be {d}x{d}")
    if np.linalg.norm(target.conj().T @ target - np.eye(d)) > 1e-10:
        raise ContractError("target is not unitary")
    rc = restricted_closure(gens, proj)
    if not rc.acts_as_full_special_unitary:
        raise CapabilityError(
            f"generators span a {rc.traceless_dimension}-dimensional algebra on the "
            f"{d}-dimensional space; su({d}) needs {d * d - 1}", missing="generators")
    h = generator_hamiltonian({**{k: OperatorSum.zero(n) for k in (baseline or {})}, **generators})
    if abs(abs(np.trace(target)) / d - 1) < 1e-12:
        sched = ControlSchedule(())
        u = np.eye(dim, dtype=complex)
        return GateResult(u, sched, 1.0, 0.0, 0, True, target=target)
    if budget < 1:
        raise ContractError("budget must be at least 1")
    blocks = [iso.conj().T @ to_matrix(g) @ iso for g in gens]
    eig = [np.linalg.eigh(b) for b in blocks]
    order = [k % len(gens) for k in range(budget)]
    norms = [max(np.abs(w).max(), 1e-12) for w, _ in eig]

    def unitary(ts):
        u = np.eye(d, dtype=complex)
        for k, t in zip(order, ts):
            w, v = eig[k]
            u = ((v * np.exp(-1j * w * t)) @ v.conj().T) @ u
        return u

    def cost(ts):
        return 1.0 - abs(np.trace(target.conj().T @ unitary(ts)) / d) ** 2

    best = None
    for seed in seeds:
        rng = np.random.default_rng(seed)
        x0 = np.array([rng.uniform(-math.pi, math.pi) / norms[k] for k in order])
        res = minimize(cost, x0, method="Powell",
                       options={"maxfev": max_evals, "xtol": 1e-10, "ftol": 1e-14})
        if best is None or res.fun < best.fun:
            best = res
        if 1 - best.fun >= target_fidelity and 1 - best.fun > 1 - 1e-9:
            break
    base = dict(baseline or {})
    segs = [Segment({**base, names[k]: math.copysign(1.0, t)}, abs(t))
            for k, t in zip(order, best.x) if abs(t) > 1e-14]
    sched = ControlSchedule(tuple(segs))
    u = schedule_unitary(sched, h, n)
    fid = gate_fidelity(iso @ target @ iso.conj().T, u, proj)
    return GateResult(u, sched, fid, gate_leakage(u, proj), len(sched), fid >= target_fidelity,
                      relations={"optimizer": "powell", "seeds": list(seeds),
                                 "closure_dimension": rc.dimension}, target=target)


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
