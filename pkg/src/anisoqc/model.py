"""Device descriptions and the exchange Hamiltonians built from them.

The Hamiltonian of a device is

    H = sum_i eps_i/2 Z_i + sum_{i<j} (Jx XX + Jy YY + Jz ZZ)_{ij}
        + sum_i (fx_i X_i + fy_i Y_i) + sum_{i<j} d_ij . (sigma_i x sigma_j)

with hbar = 1.  Every scalar in it is addressed by a parameter name:

    eps_I  fx_I  fy_I                      per qubit
    Jx_I_J Jy_I_J Jz_I_J                   per declared bond
    J_I_J Delta_I_J                        exchange form, J = Jx + Jy, Delta = Jx - Jy
    dx_I_J dy_I_J dz_I_J                   per declared DM vector

Device description grammar (line oriented, ``#`` starts a comment)::

    qubits N
    qubit I eps=R [fx=R] [fy=R]
    bond I J Jx=R Jy=R Jz=R        (or: bond I J J=R Delta=R Jz=R)
    dm I J dx=R dy=R dz=R
    control NAME [NAME ...]

``qubits`` must come first.  Indices are 1-based with ``I < J`` for bonds.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .encoding import pair_sites, r_ops, t_ops
from .errors import ContractError, SpecParseError
from .pauli import OperatorSum, hs_inner, product, single

_BOND_KINDS = ("Jx", "Jy", "Jz", "J", "Delta")
_DM_KINDS = ("dx", "dy", "dz")
_SITE_KINDS = ("eps", "fx", "fy")


@dataclass(frozen=True)
class Coupling:
    i: int
    j: int
    jx: float = 0.0
    jy: float = 0.0
    jz: float = 0.0

    @property
    def exchange(self) -> float:
        return self.jx + self.jy

    @property
    def delta(self) -> float:
        return self.jx - self.jy


@dataclass(frozen=True)
class DMVector:
    i: int
    j: int
    d: tuple[float, float, float]


@dataclass(frozen=True)
class HamiltonianSpec:
    n_qubits: int
    eps: tuple[float, ...]
    fx: tuple[float, ...]
    fy: tuple[float, ...]
    couplings: tuple[Coupling, ...] = ()
    dm: tuple[DMVector, ...] = ()
    controllable: tuple[str, ...] = ()

    def __post_init__(self):
        n = self.n_qubits
        if n < 1:
            raise ContractError("need at least one qubit")
        for seq in (self.eps, self.fx, self.fy):
            if len(seq) != n:
                raise ContractError("per-site arrays must have n_qubits entries")
        seen = set()
        for c in self.couplings:
            if not 1 <= c.i < c.j <= n:
                raise ContractError(f"bond ({c.i},{c.j}) violates 1 <= i < j <= {n}")
            if (c.i, c.j) in seen:
                raise ContractError(f"duplicate bond ({c.i},{c.j})")
            seen.add((c.i, c.j))
        seen = set()
        for d in self.dm:
            if not 1 <= d.i < d.j <= n:
                raise ContractError(f"dm ({d.i},{d.j}) violates 1 <= i < j <= {n}")
            if (d.i, d.j) in seen:
                raise ContractError(f"duplicate dm ({d.i},{d.j})")
            seen.add((d.i, d.j))
        known = self.parameter_names()
        for name in self.controllable:
            if name not in known:
                raise ContractError(f"control {name!r} names no parameter of this device")

    @classmethod
    def empty(cls, n_qubits: int) -> "HamiltonianSpec":
        zeros = (0.0,) * n_qubits
        return cls(n_qubits, zeros, zeros, zeros)

    @property
    def fields(self) -> tuple[complex, ...]:
        """Complex fields ``f_i = fx_i - i fy_i``."""
        return tuple(complex(a, -b) for a, b in zip(self.fx, self.fy))

    def coupling(self, i: int, j: int) -> Coupling | None:
        for c in self.couplings:
            if (c.i, c.j) == (i, j):
                return c
        return None

    def parameter_names(self) -> list[str]:
        names = [f"{k}_{i}" for i in range(1, self.n_qubits + 1) for k in _SITE_KINDS]
        for c in self.couplings:
            names += [f"{k}_{c.i}_{c.j}" for k in _BOND_KINDS]
        for d in self.dm:
            names += [f"{k}_{d.i}_{d.j}" for k in _DM_KINDS]
        return names

    def parameters(self) -> dict[str, float]:
        """Current value of every parameter."""
        out = {}
        for i in range(1, self.n_qubits + 1):
            out[f"eps_{i}"] = self.eps[i - 1]
            out[f"fx_{i}"] = self.fx[i - 1]
            out[f"fy_{i}"] = self.fy[i - 1]
        for c in self.couplings:
            tag = f"{c.i}_{c.j}"
            out.update({f"Jx_{tag}": c.jx, f"Jy_{tag}": c.jy, f"Jz_{tag}": c.jz,
                        f"J_{tag}": c.exchange, f"Delta_{tag}": c.delta})
        for d in self.dm:
            tag = f"{d.i}_{d.j}"
            out.update({f"dx_{tag}": d.d[0], f"dy_{tag}": d.d[1], f"dz_{tag}": d.d[2]})
        return out

    def control_names(self) -> list[str]:
        """Controllable parameters.

        A device without any ``control`` line treats every term present in
        the description as independently switchable, using the exchange form
        (J, Delta, Jz) for bonds so that axial symmetry is respected.
        """
        if self.controllable:
            return sorted(self.controllable)
        values = self.parameters()
        names = []
        for i in range(1, self.n_qubits + 1):
            names += [f"{k}_{i}" for k in _SITE_KINDS if values[f"{k}_{i}"] != 0]
        for c in self.couplings:
            names += [f"{k}_{c.i}_{c.j}" for k in ("J", "Delta", "Jz")
                      if values[f"{k}_{c.i}_{c.j}"] != 0]
        for d in self.dm:
            names += [f"{k}_{d.i}_{d.j}" for k in _DM_KINDS if values[f"{k}_{d.i}_{d.j}"] != 0]
        return sorted(names)

    def with_controllable(self, names: Iterable[str]) -> "HamiltonianSpec":
        return replace(self, controllable=tuple(sorted(set(names))))


# --------------------------------------------------------------------------
# operators

def dm_term(n_qubits: int, i: int, j: int, d) -> OperatorSum:
    """``d . (sigma_i x sigma_j)``."""
    if not i < j:
        raise ContractError("dm term needs i < j")
    dx, dy, dz = (float(v) for v in d)
    out = OperatorSum.zero(n_qubits)
    for coeff, (a, b) in ((dx, ("Y", "Z")), (dy, ("Z", "X")), (dz, ("X", "Y"))):
        if coeff:
            out = out + OperatorSum.pauli(n_qubits, {i: a, j: b}, coeff) \
                - OperatorSum.pauli(n_qubits, {i: b, j: a}, coeff)
    return out


def _split(name: str) -> tuple[str, tuple[int, ...]]:
    kind, *idx = name.split("_")
    return kind, tuple(int(v) for v in idx)


def parameter_generator(spec: HamiltonianSpec, name: str) -> OperatorSum:
    """Derivative of the device Hamiltonian with respect to one parameter."""
    if name not in spec.parameter_names():
        raise ContractError(f"unknown parameter {name!r}")
    n = spec.n_qubits
    kind, idx = _split(name)
    if kind == "eps":
        return single(n, idx[0], "Z", 0.5)
    if kind == "fx":
        return single(n, idx[0], "X")
    if kind == "fy":
        return single(n, idx[0], "Y")
    i, j = idx
    if kind in ("Jx", "Jy", "Jz"):
        a = kind[1].upper()
        return OperatorSum.pauli(n, {i: a, j: a})
    if kind == "J":
        return t_ops(n, i, j)["x"]
    if kind == "Delta":
        return r_ops(n, i, j)["x"]
    axis = {"dx": (1, 0, 0), "dy": (0, 1, 0), "dz": (0, 0, 1)}[kind]
    return dm_term(n, i, j, axis)


def resolve(spec: HamiltonianSpec, controls: Mapping[str, float] | None = None) -> HamiltonianSpec:
    """Return a copy of ``spec`` with parameter overrides applied.

    Exchange-form names (``J``, ``Delta``) and Cartesian names (``Jx``, ``Jy``)
    may not both be assigned for the same bond.
    """
    controls = dict(controls or {})
    known = set(spec.parameter_names())
    for name in controls:
        if name not in known:
            raise ContractError(f"unknown parameter {name!r}")
    eps, fx, fy = list(spec.eps), list(spec.fx), list(spec.fy)
    site_lists = {"eps": eps, "fx": fx, "fy": fy}
    bonds = {(c.i, c.j): c for c in spec.couplings}
    dms = {(d.i, d.j): list(d.d) for d in spec.dm}
    bond_updates: dict[tuple[int, int], dict[str, float]] = {}
    for name, value in controls.items():
        value = float(value)
        kind, idx = _split(name)
        if kind in site_lists:
            site_lists[kind][idx[0] - 1] = value
        elif kind in _DM_KINDS:
            dms[idx][_DM_KINDS.index(kind)] = value
        else:
            bond_updates.setdefault(idx, {})[kind] = value
    for key, upd in bond_updates.items():
        if ({"J", "Delta"} & upd.keys()) and ({"Jx", "Jy"} & upd.keys()):
            raise ContractError(f"bond {key} assigned in both Cartesian and exchange form")
        c = bonds[key]
        jx, jy, jz = c.jx, c.jy, upd.get("Jz", c.jz)
        if "Jx" in upd or "Jy" in upd:
            jx, jy = upd.get("Jx", jx), upd.get("Jy", jy)
        elif "J" in upd or "Delta" in upd:
            jx, jy = from_exchange(upd.get("Delta", c.delta), upd.get("J", c.exchange))
        bonds[key] = Coupling(c.i, c.j, jx, jy, jz)
    return replace(spec, eps=tuple(eps), fx=tuple(fx), fy=tuple(fy),
                   couplings=tuple(bonds.values()),
                   dm=tuple(DMVector(i, j, tuple(v)) for (i, j), v in dms.items()))


def build_operator(spec: HamiltonianSpec, controls: Mapping[str, float] | None = None) -> OperatorSum:
    """Device Hamiltonian with parameters overridden by ``controls``."""
    s = resolve(spec, controls)
    n = s.n_qubits
    h = OperatorSum.zero(n)
    for i in range(1, n + 1):
        for letter, coeff in (("Z", 0.5 * s.eps[i - 1]), ("X", s.fx[i - 1]), ("Y", s.fy[i - 1])):
            if coeff:
                h = h + single(n, i, letter, coeff)
    for c in s.couplings:
        for letter, coeff in (("X", c.jx), ("Y", c.jy), ("Z", c.jz)):
            if coeff:
                h = h + OperatorSum.pauli(n, {c.i: letter, c.j: letter}, coeff)
    for d in s.dm:
        h = h + dm_term(n, d.i, d.j, d.d)
    return h


def drift_operator(spec: HamiltonianSpec) -> OperatorSum:
    """Part of the Hamiltonian that no control can switch off."""
    return build_operator(spec, {name: 0.0 for name in spec.control_names()})


def control_generators(spec: HamiltonianSpec) -> dict[str, OperatorSum]:
    return {name: parameter_generator(spec, name) for name in spec.control_names()}


# --------------------------------------------------------------------------
# exchange form

@dataclass(frozen=True)
class ExchangeParams:
    delta: float
    j: float
    jz: float


def exchange_form(spec: HamiltonianSpec) -> dict[tuple[int, int], ExchangeParams]:
    return {(c.i, c.j): ExchangeParams(c.delta, c.exchange, c.jz) for c in spec.couplings}


def from_exchange(delta: float, j: float) -> tuple[float, float]:
    """Inverse of ``(Delta, J) = (Jx - Jy, Jx + Jy)``."""
    return (j + delta) / 2, (j - delta) / 2


# --------------------------------------------------------------------------
# pair (block) form

@dataclass(frozen=True)
class PairBlock:
    m: int
    eps_diff: float  # eps_{2m-1} - eps_{2m}
    eps_sum: float  # eps_{2m-1} + eps_{2m}
    j: float
    delta: float
    jz: float


@dataclass(frozen=True)
class InterPairCoupling:
    m: int  # couples qubits 2m and 2m+1
    jx: float
    jy: float
    jz: float

    @property
    def delta(self) -> float:
        return self.jx - self.jy


@dataclass(frozen=True)
class BlockForm:
    """Hamiltonian rewritten as independent pair modes plus inter-pair couplings.

    ``tz_scale`` and ``h1_scale`` are the engine-measured coefficients with
    ``eps/2 Z`` terms equal to ``tz_scale * eps_diff * T^z + h1_scale * eps_sum * R^z``.
    ``h0`` holds the intra-pair ``Jz ZZ`` terms; ``h0_scale`` is the factor
    ``s`` in ``Z_{2m-1} Z_{2m} = s ((R^z)^2 - (T^z)^2)``, and ``h0_squares`` is
    the unscaled ``sum Jz ((R^z)^2 - (T^z)^2)``.
    """

    n_qubits: int
    pairs: tuple[PairBlock, ...]
    inter: tuple[InterPairCoupling, ...]
    tz_scale: float
    h1_scale: float
    h0_scale: float
    h1: OperatorSum
    h0: OperatorSum
    h0_squares: OperatorSum
    extra: OperatorSum = field(repr=False)

    def mode_operator(self, m: int) -> OperatorSum:
        b = self.pairs[m - 1]
        i, j = pair_sites(m)
        t = t_ops(self.n_qubits, i, j)
        r = r_ops(self.n_qubits, i, j)
        return self.tz_scale * b.eps_diff * t["z"] + b.j * t["x"] + b.delta * r["x"]

    def inter_operator(self) -> OperatorSum:
        out = OperatorSum.zero(self.n_qubits)
        for c in self.inter:
            a, b = 2 * c.m, 2 * c.m + 1
            for letter, coeff in (("X", c.jx), ("Y", c.jy), ("Z", c.jz)):
                if coeff:
                    out = out + OperatorSum.pauli(self.n_qubits, {a: letter, b: letter}, coeff)
        return out

    def reassemble(self) -> OperatorSum:
        total = self.h1 + self.h0 + self.inter_operator() + self.extra
        for b in self.pairs:
            total = total + self.mode_operator(b.m)
        return total


def _measure_scale(target: OperatorSum, basis: OperatorSum) -> float:
    s = hs_inner(basis, target) / hs_inner(basis, basis)
    if not target.allclose(basis * s):
        raise AssertionError("operators are not proportional")
    return float(s.real)


def block_form(spec: HamiltonianSpec) -> BlockForm:
    n = spec.n_qubits
    if n % 2:
        raise ContractError("block form needs an even number of qubits")
    intra = {}
    inter = []
    for c in spec.couplings:
        if c.i % 2 == 1 and c.j == c.i + 1:
            intra[(c.i + 1) // 2] = c
        elif c.i % 2 == 0 and c.j == c.i + 1:
            inter.append(InterPairCoupling(c.i // 2, c.jx, c.jy, c.jz))
        else:
            raise ContractError(f"bond ({c.i},{c.j}) is neither intra-pair nor nearest inter-pair")
    # scale relations measured on one reference pair
    ref = 2
    t_ref, r_ref = t_ops(ref, 1, 2), r_ops(ref, 1, 2)
    tz_scale = _measure_scale(single(ref, 1, "Z", 0.5) - single(ref, 2, "Z", 0.5), t_ref["z"]) / 2
    h1_scale = _measure_scale(single(ref, 1, "Z", 0.5) + single(ref, 2, "Z", 0.5), r_ref["z"]) / 2
    squares_shape = product(r_ref["z"], r_ref["z"]) - product(t_ref["z"], t_ref["z"])
    h0_scale = _measure_scale(OperatorSum.pauli(ref, "ZZ"), squares_shape)

    pairs = []
    h1 = OperatorSum.zero(n)
    h0 = OperatorSum.zero(n)
    h0_squares = OperatorSum.zero(n)
    for m in range(1, n // 2 + 1):
        i, j = pair_sites(m)
        c = intra.get(m, Coupling(i, j))
        b = PairBlock(m, spec.eps[i - 1] - spec.eps[j - 1], spec.eps[i - 1] + spec.eps[j - 1],
                      c.exchange, c.delta, c.jz)
        pairs.append(b)
        t, r = t_ops(n, i, j), r_ops(n, i, j)
        h1 = h1 + r["z"] * (h1_scale * b.eps_sum)
        shape = product(r["z"], r["z"]) - product(t["z"], t["z"])
        h0 = h0 + shape * (h0_scale * b.jz)
        h0_squares = h0_squares + shape * b.jz
    extra = OperatorSum.zero(n)
    for i in range(1, n + 1):
        if spec.fx[i - 1]:
            extra = extra + single(n, i, "X", spec.fx[i - 1])
        if spec.fy[i - 1]:
            extra = extra + single(n, i, "Y", spec.fy[i - 1])
    for d in spec.dm:
        extra = extra + dm_term(n, d.i, d.j, d.d)
    return BlockForm(n, tuple(pairs), tuple(sorted(inter, key=lambda c: c.m)),
                     tz_scale, h1_scale, h0_scale, h1, h0, h0_squares, extra)


# --------------------------------------------------------------------------
# control schedules

@dataclass(frozen=True)
class Segment:
    assignments: Mapping[str, float]
    duration: float

    def __post_init__(self):
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ContractError(f"segment duration must be positive, got {self.duration}")
        object.__setattr__(self, "duration", float(self.duration))
        object.__setattr__(self, "assignments",
                           {str(k): float(v) for k, v in sorted(self.assignments.items())})

    def to_dict(self) -> dict:
        return {"assignments": dict(self.assignments), "duration": self.duration}


@dataclass(frozen=True)
class ControlSchedule:
    segments: tuple[Segment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def __len__(self):
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __add__(self, other: "ControlSchedule") -> "ControlSchedule":
        return ControlSchedule(self.segments + other.segments)

    @property
    def total_time(self) -> float:
        return sum(s.duration for s in self.segments)

    def control_names(self) -> set[str]:
        return {k for s in self.segments for k in s.assignments}

    def to_document(self) -> list[dict]:
        return [s.to_dict() for s in self.segments]

    @classmethod
    def from_document(cls, doc) -> "ControlSchedule":
        if not isinstance(doc, list):
            raise ContractError("schedule document must be a list of segments")
        segs = []
        for k, item in enumerate(doc):
            try:
                segs.append(Segment({str(a): float(v) for a, v in item["assignments"].items()},
                                    float(item["duration"])))
            except (KeyError, TypeError, AttributeError, ValueError) as exc:
                raise ContractError(f"segment {k} is malformed: {exc}") from None
        return cls(tuple(segs))

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ControlSchedule":
        return cls.from_document(json.loads(text))


def validate_schedule(spec: HamiltonianSpec, schedule: ControlSchedule) -> None:
    """Check that a schedule only moves controllable parameters."""
    known = set(spec.parameter_names())
    allowed = set(spec.control_names())
    values = spec.parameters()
    for k, seg in enumerate(schedule.segments):
        for name, value in seg.assignments.items():
            if name not in known:
                raise ContractError(f"segment {k}: unknown control {name!r}")
            if name not in allowed and not math.isclose(value, values[name], abs_tol=1e-15):
                raise ContractError(f"segment {k}: parameter {name!r} is not controllable")


# --------------------------------------------------------------------------
# device description parser

_KV_RE = re.compile(r"(\S+)")
_NAME_RE = re.compile(r"^[A-Za-z]+(_\d+){1,2}$")


def _tokens(line: str):
    return [(m.group(1), m.start() + 1) for m in _KV_RE.finditer(line)]


def _int_token(tok, col, lineno) -> int:
    try:
        return int(tok)
    except ValueError:
        raise SpecParseError(f"expected an integer, got {tok!r}", lineno, col) from None


def _kv(tokens, lineno, allowed) -> dict[str, float]:
    out = {}
    for tok, col in tokens:
        key, sep, val = tok.partition("=")
        if not sep:
            raise SpecParseError(f"expected key=value, got {tok!r}", lineno, col)
        if key not in allowed:
            raise SpecParseError(f"unknown key {key!r}", lineno, col)
        if key in out:
            raise SpecParseError(f"key {key!r} given twice", lineno, col, "duplicate")
        try:
            value = float(val)
        except ValueError:
            raise SpecParseError(f"bad number {val!r}", lineno, col + len(key) + 1) from None
        if not math.isfinite(value):
            raise SpecParseError(f"non-finite value {val!r}", lineno, col + len(key) + 1)
        out[key] = value
    return out


def parse_spec(text: str) -> HamiltonianSpec:
    n = None
    eps = fx = fy = None
    seen_sites: set[int] = set()
    bonds: dict[tuple[int, int], Coupling] = {}
    dms: dict[tuple[int, int], DMVector] = {}
    controls: list[tuple[str, int, int]] = []

    def check_site(tok, col, lineno) -> int:
        i = _int_token(tok, col, lineno)
        if not 1 <= i <= n:
            raise SpecParseError(f"qubit index {i} outside 1..{n}", lineno, col, "index")
        return i

    def check_pair(toks, lineno) -> tuple[int, int]:
        if len(toks) < 2:
            raise SpecParseError("expected two qubit indices", lineno, toks[0][1] if toks else 1)
        i = check_site(*toks[0], lineno)
        j = check_site(*toks[1], lineno)
        if not i < j:
            raise SpecParseError(f"pair ({i},{j}) must satisfy i < j", lineno, toks[1][1], "index")
        return i, j

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        head, col = toks[0]
        rest = toks[1:]
        if head == "qubits":
            if n is not None:
                raise SpecParseError("'qubits' declared twice", lineno, col, "duplicate")
            if len(rest) != 1:
                raise SpecParseError("'qubits' takes exactly one integer", lineno, col)
            n = _int_token(*rest[0], lineno)
            if n < 1:
                raise SpecParseError("qubit count must be positive", lineno, rest[0][1], "index")
            eps, fx, fy = [0.0] * n, [0.0] * n, [0.0] * n
            continue
        if n is None:
            raise SpecParseError("'qubits N' must come first", lineno, col)
        if head == "qubit":
            if not rest:
                raise SpecParseError("'qubit' needs an index", lineno, col)
            i = check_site(*rest[0], lineno)
            if i in seen_sites:
                raise SpecParseError(f"qubit {i} described twice", lineno, rest[0][1], "duplicate")
            seen_sites.add(i)
            kv = _kv(rest[1:], lineno, _SITE_KINDS)
            eps[i - 1] = kv.get("eps", 0.0)
            fx[i - 1] = kv.get("fx", 0.0)
            fy[i - 1] = kv.get("fy", 0.0)
        elif head == "bond":
            i, j = check_pair(rest, lineno)
            if (i, j) in bonds:
                raise SpecParseError(f"duplicate bond ({i},{j})", lineno, col, "duplicate")
            kv = _kv(rest[2:], lineno, _BOND_KINDS)
            if ({"J", "Delta"} & kv.keys()) and ({"Jx", "Jy"} & kv.keys()):
                raise SpecParseError("mix of Cartesian and exchange-form keys", lineno, col)
            if "J" in kv or "Delta" in kv:
                jx, jy = from_exchange(kv.get("Delta", 0.0), kv.get("J", 0.0))
            else:
                jx, jy = kv.get("Jx", 0.0), kv.get("Jy", 0.0)
            bonds[(i, j)] = Coupling(i, j, jx, jy, kv.get("Jz", 0.0))
        elif head == "dm":
            i, j = check_pair(rest, lineno)
            if (i, j) in dms:
                raise SpecParseError(f"duplicate dm ({i},{j})", lineno, col, "duplicate")
            kv = _kv(rest[2:], lineno, _DM_KINDS)
            dms[(i, j)] = DMVector(i, j, (kv.get("dx", 0.0), kv.get("dy", 0.0), kv.get("dz", 0.0)))
        elif head == "control":
            if not rest:
                raise SpecParseError("'control' needs at least one name", lineno, col)
            for tok, c in rest:
                if not _NAME_RE.match(tok):
                    raise SpecParseError(f"bad control name {tok!r}", lineno, c)
                controls.append((tok, lineno, c))
        else:
            raise SpecParseError(f"unknown directive {head!r}", lineno, col)
    if n is None:
        raise SpecParseError("missing 'qubits N' declaration", 1, 1)
    spec = HamiltonianSpec(n, tuple(eps), tuple(fx), tuple(fy),
                           tuple(sorted(bonds.values(), key=lambda c: (c.i, c.j))),
                           tuple(sorted(dms.values(), key=lambda d: (d.i, d.j))))
    known = set(spec.parameter_names())
    names = []
    for tok, lineno, c in controls:
        if tok not in known:
            raise SpecParseError(f"control {tok!r} names no declared parameter", lineno, c, "index")
        if tok in names:
            raise SpecParseError(f"control {tok!r} listed twice", lineno, c, "duplicate")
        names.append(tok)
    return spec.with_controllable(names)


def render_spec(spec: HamiltonianSpec) -> str:
    lines = [f"qubits {spec.n_qubits}"]
    for i in range(spec.n_qubits):
        e, x, y = spec.eps[i], spec.fx[i], spec.fy[i]
        if e or x or y:
            lines.append(f"qubit {i + 1} eps={e!r} fx={x!r} fy={y!r}")
    for c in spec.couplings:
        lines.append(f"bond {c.i} {c.j} Jx={c.jx!r} Jy={c.jy!r} Jz={c.jz!r}")
    for d in spec.dm:
        lines.append(f"dm {d.i} {d.j} dx={d.d[0]!r} dy={d.d[1]!r} dz={d.d[2]!r}")
    if spec.controllable:
        lines.append("control " + " ".join(sorted(spec.controllable)))
    return "\n".join(lines) + "\n"
