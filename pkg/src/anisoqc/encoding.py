"""Two-physical-qubit encodings of one logical qubit.

Pair ``m`` occupies physical qubits ``(2m-1, 2m)``.  The axially symmetric
code uses the odd-occupation states ``|01>, |10>`` of each pair and is driven
by the T operators; the axially asymmetric code uses ``|00>, |11>`` and the R
operators.

The operators are kept exactly as defined on the physical qubits.  On code
words ``T^z`` (``R^z``) acts as ``2 Z_L`` while ``T^x`` (``R^x``) acts as
``X_L``; these scale factors are measured by :func:`logical_ops` and carried
into gate durations by the synthesis module instead of renormalizing the
operators.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import config
from .errors import ContractError, DimensionError, LeakageError, ResourceError
from .pauli import OperatorSum, bracket, product, sigma_minus, sigma_plus, single, to_matrix

_ZERO_TOL = 1e-12


class Kind(str, enum.Enum):
    AS = "axial-symmetric"
    AA = "axial-asymmetric"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, Kind):
            return value
        key = str(value).strip().lower()
        if key in ("as", "axial-symmetric", "symmetric"):
            return cls.AS
        if key in ("aa", "axial-asymmetric", "asymmetric"):
            return cls.AA
        raise ContractError(f"unknown encoding kind {value!r}")

    @property
    def short(self) -> str:
        return "as" if self is Kind.AS else "aa"


# --------------------------------------------------------------------------
# pair operators

def t_ops(n_qubits: int, i: int, j: int) -> dict[str, OperatorSum]:
    """``T^x = s+_j s-_i + s+_i s-_j`` and ``T^z = Z_i - Z_j``."""
    tx = product(sigma_plus(n_qubits, j), sigma_minus(n_qubits, i)) + \
        product(sigma_plus(n_qubits, i), sigma_minus(n_qubits, j))
    tz = single(n_qubits, i, "Z") - single(n_qubits, j, "Z")
    return {"x": tx.real(), "z": tz}


def r_ops(n_qubits: int, i: int, j: int) -> dict[str, OperatorSum]:
    """``R^x = s-_i s-_j + s+_i s+_j`` and ``R^z = Z_i + Z_j``."""
    rx = product(sigma_minus(n_qubits, i), sigma_minus(n_qubits, j)) + \
        product(sigma_plus(n_qubits, i), sigma_plus(n_qubits, j))
    rz = single(n_qubits, i, "Z") + single(n_qubits, j, "Z")
    return {"x": rx.real(), "z": rz}


def pair_sites(m: int) -> tuple[int, int]:
    return 2 * m - 1, 2 * m


# --------------------------------------------------------------------------
# encodings

_WORDS = {Kind.AS: ("01", "10"), Kind.AA: ("00", "11")}


@dataclass(frozen=True, eq=False)
class Encoding:
    kind: Kind
    n_logical: int
    code_words: dict[str, int]
    isometry: np.ndarray = field(repr=False)
    projector: np.ndarray = field(repr=False)

    @property
    def n_physical(self) -> int:
        return 2 * self.n_logical

    @property
    def dim(self) -> int:
        return 1 << self.n_logical

    def physical_word(self, logical: str) -> str:
        return format(self.code_words[logical], f"0{self.n_physical}b")

    def check_pair(self, m: int):
        if not 1 <= m <= self.n_logical:
            raise ContractError(f"logical qubit {m} outside 1..{self.n_logical}")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "n_logical": self.n_logical,
            "n_physical": self.n_physical,
            "code_words": {k: self.physical_word(k) for k in self.code_words},
        }


def make_encoding(kind, n_logical: int, dense_cap: int | None = None) -> Encoding:
    kind = Kind.parse(kind)
    if n_logical < 1:
        raise ContractError("need at least one logical qubit")
    cap = config.DENSE_CAP if dense_cap is None else dense_cap
    if 2 * n_logical > cap:
        raise ResourceError(f"{2 * n_logical} physical qubits exceeds the dense cap of {cap}")
    zero, one = _WORDS[kind]
    words = {}
    for k in range(1 << n_logical):
        logical = format(k, f"0{n_logical}b")
        phys = "".join(one if b == "1" else zero for b in logical)
        words[logical] = int(phys, 2)
    dim_phys = 1 << (2 * n_logical)
    iso = np.zeros((dim_phys, 1 << n_logical), dtype=complex)
    for col, idx in enumerate(words.values()):
        iso[idx, col] = 1.0
    proj = iso @ iso.conj().T
    return Encoding(kind, n_logical, words, iso, proj)


def restrict(op_or_matrix, enc: Encoding) -> np.ndarray:
    """Matrix of an operator compressed to the code space, in logical basis order."""
    mat = to_matrix(op_or_matrix) if isinstance(op_or_matrix, OperatorSum) else np.asarray(op_or_matrix)
    return enc.isometry.conj().T @ mat @ enc.isometry


def logical_pauli(n_logical: int, m: int, letter: str) -> np.ndarray:
    return to_matrix(single(n_logical, m, letter))


@dataclass(frozen=True)
class LogicalOperatorSet:
    """Generators of the encoded su(2) on one logical qubit.

    ``scales[a]`` is the factor ``s`` with ``P G^a P = s * (logical Pauli a)``;
    ``structure_constant`` is ``c`` in ``bracket(G^z, G^x) = c G^y``.
    """

    m: int
    x: OperatorSum
    y: OperatorSum
    z: OperatorSum
    structure_constant: float
    scales: dict[str, float]

    def as_dict(self) -> dict[str, OperatorSum]:
        return {"x": self.x, "y": self.y, "z": self.z}


def _proportionality(a: np.ndarray, b: np.ndarray) -> tuple[complex, float]:
    """Least-squares scalar ``c`` with ``a ~ c b`` and the residual norm."""
    denom = np.vdot(b, b)
    if abs(denom) == 0:
        return 0j, float(np.linalg.norm(a))
    c = np.vdot(b, a) / denom
    return c, float(np.linalg.norm(a - c * b))


def logical_ops(enc: Encoding, m: int) -> LogicalOperatorSet:
    enc.check_pair(m)
    i, j = pair_sites(m)
    base = t_ops if enc.kind is Kind.AS else r_ops
    ops = base(enc.n_physical, i, j)
    gx, gz = ops["x"], ops["z"]
    raw = bracket(gz, gx)
    c = raw.norm() / gx.norm()
    gy = raw / c
    scales = {}
    for name, g in (("x", gx), ("y", gy), ("z", gz)):
        s, resid = _proportionality(restrict(g, enc), logical_pauli(enc.n_logical, m, name.upper()))
        if resid > _ZERO_TOL or abs(s.imag) > _ZERO_TOL:
            raise AssertionError(f"G^{name} does not restrict to a logical Pauli")
        scales[name] = float(s.real)
    return LogicalOperatorSet(m, gx, gy, gz, float(c), scales)


def encode_state(logical, enc: Encoding) -> np.ndarray:
    logical = np.asarray(logical, dtype=complex)
    if logical.shape != (enc.dim,):
        raise DimensionError(f"logical state must have length {enc.dim}")
    if abs(np.linalg.norm(logical) - 1) > 1e-12:
        raise ContractError("logical state is not normalized")
    return enc.isometry @ logical


def leakage_of(state, enc: Encoding) -> float:
    state = np.asarray(state, dtype=complex)
    kept = enc.isometry.conj().T @ state
    return float(max(0.0, np.vdot(state, state).real - np.vdot(kept, kept).real))


def decode_state(physical, enc: Encoding, force: bool = False, tol: float = 1e-9) -> np.ndarray:
    physical = np.asarray(physical, dtype=complex)
    if physical.shape != (enc.isometry.shape[0],):
        raise DimensionError(f"physical state must have length {enc.isometry.shape[0]}")
    leak = leakage_of(physical, enc)
    logical = enc.isometry.conj().T @ physical
    if leak > tol:
        if not force:
            raise LeakageError(f"state has leakage {leak:.3e} outside the code space", leak)
        return logical / np.linalg.norm(logical)
    return logical


@dataclass(frozen=True)
class EntanglingRelation:
    """``P (Z_{2m} Z_{2m+1}) P = scalar * P (G^z_m G^z_{m+1}) P``.

    ``logical_scale`` is the factor in front of ``Z_L (x) Z_L`` for the
    physical coupling itself.
    """

    m: int
    operator: OperatorSum
    scalar: float
    logical_scale: float


def entangling_generator(enc: Encoding, m: int) -> EntanglingRelation:
    enc.check_pair(m)
    if m >= enc.n_logical:
        raise ContractError("entangling generator needs logical qubits m and m+1")
    n = enc.n_physical
    op = OperatorSum.pauli(n, {2 * m: "Z", 2 * m + 1: "Z"})
    gz_m = logical_ops(enc, m).z
    gz_n = logical_ops(enc, m + 1).z
    a = restrict(op, enc)
    b = restrict(product(gz_m, gz_n), enc)
    c, resid = _proportionality(a, b)
    if resid > _ZERO_TOL or abs(c.imag) > _ZERO_TOL:
        raise AssertionError("coupling is not proportional to G^z G^z on the code space")
    zz = logical_pauli(enc.n_logical, m, "Z") @ logical_pauli(enc.n_logical, m + 1, "Z")
    s, resid = _proportionality(a, zz)
    if resid > _ZERO_TOL or abs(s) < _ZERO_TOL:
        raise AssertionError("coupling does not act as a multiple of Z_L Z_L")
    return EntanglingRelation(m, op, float(c.real), float(s.real))


class Bath(str, enum.Enum):
    COLLECTIVE = "collective-per-pair"
    ANTI_COLLECTIVE = "anti-collective-per-pair"

    @classmethod
    def parse(cls, value) -> "Bath":
        if isinstance(value, Bath):
            return value
        key = str(value).strip().lower()
        if key in ("collective", "collective-per-pair"):
            return cls.COLLECTIVE
        if key in ("anti-collective", "anti-collective-per-pair", "anticollective"):
            return cls.ANTI_COLLECTIVE
        raise ContractError(f"unknown bath symmetry {value!r}")


@dataclass(frozen=True)
class DFSVerdict:
    verdict: str  # "decoherence-free" | "not-protected"
    bath: Bath
    annihilation_norms: dict[int, float]
    commutation_norms: dict[str, float]

    @property
    def protected(self) -> bool:
        return self.verdict == "decoherence-free"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "bath": self.bath.value,
            "annihilation_norms": {str(k): v for k, v in self.annihilation_norms.items()},
            "commutation_norms": dict(self.commutation_norms),
        }


def bath_coupling(enc: Encoding, m: int, bath) -> OperatorSum:
    """System side of ``sum_i Z_i (x) B_i`` on pair ``m`` under the bath symmetry.

    ``B_{2m-1} = B_{2m}`` gives ``R^z_m``; ``B_{2m-1} = -B_{2m}`` gives ``T^z_m``.
    """
    bath = Bath.parse(bath)
    i, j = pair_sites(m)
    if bath is Bath.COLLECTIVE:
        return r_ops(enc.n_physical, i, j)["z"]
    return t_ops(enc.n_physical, i, j)["z"]


def dfs_check(enc: Encoding, bath) -> DFSVerdict:
    bath = Bath.parse(bath)
    controls = {}
    for m in range(1, enc.n_logical + 1):
        for name, g in logical_ops(enc, m).as_dict().items():
            controls[f"G{name}_{m}"] = g
    for m in range(1, enc.n_logical):
        controls[f"ZZ_{2 * m}_{2 * m + 1}"] = entangling_generator(enc, m).operator
    annihilation = {}
    commutation = {}
    for m in range(1, enc.n_logical + 1):
        s = bath_coupling(enc, m, bath)
        annihilation[m] = float(np.linalg.norm(to_matrix(s) @ enc.projector, 2))
        for name, g in controls.items():
            commutation[f"S_{m},{name}"] = bracket(s, g).norm()
    ok = all(v <= _ZERO_TOL for v in annihilation.values()) and \
        all(v <= _ZERO_TOL for v in commutation.values())
    return DFSVerdict("decoherence-free" if ok else "not-protected", bath, annihilation, commutation)


def su_pair_commute(n_qubits: int, i: int, j: int) -> bool:
    """True when every T generator commutes with every R generator on pair (i, j)."""
    t = t_ops(n_qubits, i, j)
    r = r_ops(n_qubits, i, j)
    ty = bracket(t["z"], t["x"])
    ry = bracket(r["z"], r["x"])
    return all(bracket(a, b).is_zero() for a in (t["x"], ty, t["z"]) for b in (r["x"], ry, r["z"]))


__all__ = [
    "Kind", "Encoding", "LogicalOperatorSet", "EntanglingRelation", "DFSVerdict", "Bath",
    "t_ops", "r_ops", "pair_sites", "make_encoding", "restrict", "logical_ops",
    "encode_state", "decode_state", "leakage_of", "entangling_generator",
    "bath_coupling", "dfs_check", "su_pair_commute",
]
