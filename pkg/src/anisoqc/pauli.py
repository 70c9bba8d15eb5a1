"""Exact algebra over N-qubit Pauli strings.

Conventions used throughout the package:

* qubits are numbered from 1, and qubit 1 is the most significant bit of a
  computational-basis index, so ``|01>`` is index 1 for two qubits;
* ``Z|0> = +|0>`` and the occupation number is ``n = (1 - Z)/2``;
* ``s+ = (X - iY)/2`` raises the occupation (``|0> -> |1>``) and
  ``s- = (X + iY)/2`` lowers it.

A :class:`PauliString` is stored as an X bitmask and a Z bitmask (bit ``N - i``
belongs to qubit ``i``) with the letter ``Y`` meaning both bits set.  The
phase of a product lives outside the string, in the coefficient of an
:class:`OperatorSum`.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from . import config
from .errors import ContractError, DimensionError, ResourceError

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_IPOW = np.array([1, 1j, -1, -1j], dtype=complex)


def _popcount(a):
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


@dataclass(frozen=True, slots=True)
class PauliString:
    """An N-site word over {I, X, Y, Z}."""

    n_qubits: int
    x: int
    z: int

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ContractError("a Pauli string needs at least one qubit")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise ContractError("bitmask has bits beyond n_qubits")

    @classmethod
    def from_letters(cls, letters: str) -> "PauliString":
        x = z = 0
        for ch in letters.upper():
            try:
                bx, bz = _LETTER_BITS[ch]
            except KeyError:
                raise ContractError(f"invalid Pauli letter {ch!r}") from None
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(letters), x, z)

    @classmethod
    def from_sites(cls, n_qubits: int, sites: Mapping[int, str]) -> "PauliString":
        """Build from a ``{site: letter}`` map with 1-based sites."""
        letters = ["I"] * n_qubits
        for site, letter in sites.items():
            if not 1 <= site <= n_qubits:
                raise DimensionError(f"site {site} outside 1..{n_qubits}")
            letters[site - 1] = letter
        return cls.from_letters("".join(letters))

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits, 0, 0)

    @classmethod
    def from_index(cls, n_qubits: int, index: int) -> "PauliString":
        mask = (1 << n_qubits) - 1
        return cls(n_qubits, index >> n_qubits, index & mask)

    @property
    def index(self) -> int:
        return (self.x << self.n_qubits) | self.z

    @property
    def letters(self) -> str:
        out = []
        for site in range(1, self.n_qubits + 1):
            bit = self.n_qubits - site
            out.append(_BITS_LETTER[((self.x >> bit) & 1, (self.z >> bit) & 1)])
        return "".join(out)

    def letter(self, site: int) -> str:
        bit = self.n_qubits - site
        return _BITS_LETTER[((self.x >> bit) & 1, (self.z >> bit) & 1)]

    @property
    def support(self) -> tuple[int, ...]:
        occupied = self.x | self.z
        return tuple(s for s in range(1, self.n_qubits + 1) if (occupied >> (self.n_qubits - s)) & 1)

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def commutes_with(self, other: "PauliString") -> bool:
        _check_size(self, other)
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def label(self) -> str:
        """Sparse label such as ``"X1 Z3"``; the identity renders as ``"I"``."""
        parts = [f"{self.letter(s)}{s}" for s in self.support]
        return " ".join(parts) if parts else "I"

    def __str__(self):
        return self.label()

    def sort_key(self):
        """Canonical term order: higher weight first, then by letters."""
        return (-self.weight, self.letters)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


def _check_size(a, b):
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Return ``(phase, c)`` with ``a @ b == phase * c`` and phase in {1, i, -1, -i}."""
    _check_size(a, b)
    x, z = a.x ^ b.x, a.z ^ b.z
    e = ((a.x & a.z).bit_count() + (b.x & b.z).bit_count()
         + 2 * (a.z & b.x).bit_count() - (x & z).bit_count()) % 4
    return complex(_IPOW[e]), PauliString(a.n_qubits, x, z)


class OperatorSum:
    """Sparse linear combination of Pauli strings with complex coefficients.

    Instances are immutable; every arithmetic operation returns a new object.
    Coefficients with magnitude at or below ``config.COEFF_TOL`` are dropped.
    """

    __slots__ = ("n_qubits", "_terms")

    def __init__(self, n_qubits: int, terms: Mapping[PauliString, complex] | None = None):
        if n_qubits < 1:
            raise ContractError("an operator needs at least one qubit")
        clean = {}
        for p, c in (terms or {}).items():
            if p.n_qubits != n_qubits:
                raise DimensionError(f"term {p.letters} does not act on {n_qubits} qubits")
            c = complex(c)
            if abs(c) > config.COEFF_TOL:
                clean[p] = c
        self.n_qubits = n_qubits
        self._terms = MappingProxyType(dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key())))

    # construction helpers -------------------------------------------------
    @classmethod
    def zero(cls, n_qubits: int) -> "OperatorSum":
        return cls(n_qubits)

    @classmethod
    def identity(cls, n_qubits: int, coeff: complex = 1.0) -> "OperatorSum":
        return cls(n_qubits, {PauliString.identity(n_qubits): coeff})

    @classmethod
    def pauli(cls, n_qubits: int, sites: Mapping[int, str] | str, coeff: complex = 1.0) -> "OperatorSum":
        """Single term.  ``sites`` is ``{1: "X", 3: "Z"}`` or a full letter word."""
        if isinstance(sites, str):
            if len(sites) != n_qubits:
                raise DimensionError("letter word length differs from n_qubits")
            p = PauliString.from_letters(sites)
        else:
            p = PauliString.from_sites(n_qubits, sites)
        return cls(n_qubits, {p: coeff})

    @classmethod
    def from_arrays(cls, n_qubits, xs, zs, coeffs) -> "OperatorSum":
        """Accumulate (possibly repeated) terms given as parallel arrays."""
        xs = np.asarray(xs, dtype=np.int64)
        zs = np.asarray(zs, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=complex)
        if xs.size == 0:
            return cls(n_qubits)
        keys = (xs << n_qubits) | zs
        uniq, inv = np.unique(keys, return_inverse=True)
        sums = np.zeros(uniq.size, dtype=complex)
        np.add.at(sums, inv, coeffs)
        keep = np.abs(sums) > config.COEFF_TOL
        return cls(n_qubits, {PauliString.from_index(n_qubits, int(k)): c
                              for k, c in zip(uniq[keep], sums[keep])})

    @classmethod
    def from_vector(cls, n_qubits: int, vec) -> "OperatorSum":
        """Inverse of :meth:`to_vector`."""
        vec = np.asarray(vec)
        if vec.shape != (4 ** n_qubits,):
            raise DimensionError("coefficient vector must have length 4**n_qubits")
        nz = np.flatnonzero(np.abs(vec) > config.COEFF_TOL)
        return cls(n_qubits, {PauliString.from_index(n_qubits, int(i)): vec[i] for i in nz})

    # accessors ------------------------------------------------------------
    @property
    def terms(self) -> Mapping[PauliString, complex]:
        return self._terms

    def coefficient(self, p: PauliString | str) -> complex:
        if isinstance(p, str):
            p = PauliString.from_letters(p)
        return self._terms.get(p, 0j)

    def arrays(self):
        """Return ``(x, z, coeff)`` numpy arrays of the stored terms."""
        ps = list(self._terms)
        xs = np.fromiter((p.x for p in ps), dtype=np.int64, count=len(ps))
        zs = np.fromiter((p.z for p in ps), dtype=np.int64, count=len(ps))
        cs = np.fromiter(self._terms.values(), dtype=complex, count=len(ps))
        return xs, zs, cs

    def to_vector(self, dtype=complex) -> np.ndarray:
        """Dense coefficient vector indexed by :attr:`PauliString.index`."""
        vec = np.zeros(4 ** self.n_qubits, dtype=complex)
        for p, c in self._terms.items():
            vec[p.index] = c
        if dtype is float:
            return vec.real.copy()
        return vec

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def is_hermitian(self, tol: float = config.COEFF_TOL) -> bool:
        return all(abs(c.imag) <= tol for c in self._terms.values())

    def adjoint(self) -> "OperatorSum":
        return OperatorSum(self.n_qubits, {p: c.conjugate() for p, c in self._terms.items()})

    def real(self) -> "OperatorSum":
        """Drop imaginary parts (use only on operators known to be Hermitian)."""
        return OperatorSum(self.n_qubits, {p: c.real for p, c in self._terms.items()})

    def norm(self) -> float:
        """Norm induced by :func:`hs_inner`."""
        return float(np.sqrt(sum(abs(c) ** 2 for c in self._terms.values())))

    def trace_part(self) -> complex:
        return self.coefficient(PauliString.identity(self.n_qubits))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, OperatorSum):
            _check_size(self, other)
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return OperatorSum.identity(self.n_qubits, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for p, c in other._terms.items():
            terms[p] = terms.get(p, 0) + c
        return OperatorSum(self.n_qubits, terms)

    __radd__ = __add__

    def __neg__(self):
        return OperatorSum(self.n_qubits, {p: -c for p, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorSum):
            return product(self, scalar)
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return OperatorSum(self.n_qubits, {p: c * scalar for p, c in self._terms.items()})

    def __rmul__(self, scalar):
        if not isinstance(scalar, (int, float, complex, np.number)):
            return NotImplemented
        return self * scalar

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __matmul__(self, other):
        return product(self, other)

    def __eq__(self, other):
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.n_qubits, tuple(self._terms.items())))

    def allclose(self, other: "OperatorSum", atol: float = 1e-12) -> bool:
        _check_size(self, other)
        diff = self - other
        return all(abs(c) <= atol for c in diff._terms.values())

    # text -----------------------------------------------------------------
    def render(self) -> str:
        return render(self)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"OperatorSum({self.n_qubits}, {render(self)!r})"


# --------------------------------------------------------------------------
# products and brackets

def _product_arrays(a: OperatorSum, b: OperatorSum):
    xa, za, ca = a.arrays()
    xb, zb, cb = b.arrays()
    x = xa[:, None] ^ xb[None, :]
    z = za[:, None] ^ zb[None, :]
    e = (_popcount(xa & za)[:, None] + _popcount(xb & zb)[None, :]
         + 2 * _popcount(za[:, None] & xb[None, :]) - _popcount(x & z)) % 4
    c = ca[:, None] * cb[None, :] * _IPOW[e]
    return x.ravel(), z.ravel(), c.ravel()


def product(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """Exact operator product ``a @ b``."""
    _check_size(a, b)
    if a.is_zero() or b.is_zero():
        return OperatorSum.zero(a.n_qubits)
    return OperatorSum.from_arrays(a.n_qubits, *_product_arrays(a, b))


def commutator(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """Raw commutator ``[a, b] = ab - ba`` (no Hermiticity requirement)."""
    _check_size(a, b)
    if a.is_zero() or b.is_zero():
        return OperatorSum.zero(a.n_qubits)
    xa, za, ca = a.arrays()
    xb, zb, cb = b.arrays()
    # Pauli strings either commute (term cancels) or anticommute (term doubles)
    anti = (_popcount(xa[:, None] & zb[None, :]) + _popcount(za[:, None] & xb[None, :])) % 2 == 1
    x, z, c = _product_arrays(a, b)
    mask = anti.ravel()
    return OperatorSum.from_arrays(a.n_qubits, x[mask], z[mask], 2 * c[mask])


def bracket(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """Hermitian Lie bracket ``-i [a, b]`` of two Hermitian operators."""
    _check_size(a, b)
    if not a.is_hermitian() or not b.is_hermitian():
        raise ContractError("bracket requires Hermitian operands")
    return (commutator(a, b) * -1j).real()


def hs_inner(a: OperatorSum, b: OperatorSum) -> complex:
    """Normalized Hilbert-Schmidt pairing ``Tr(a^dagger b) / 2^N``."""
    _check_size(a, b)
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = 0j
    for p, c in small.terms.items():
        d = large.terms.get(p)
        if d is not None:
            total += (c.conjugate() * d) if small is a else (d.conjugate() * c)
    return total


# --------------------------------------------------------------------------
# dense realization

def to_matrix(op: OperatorSum, dense_cap: int | None = None) -> np.ndarray:
    """Dense ``2^N x 2^N`` matrix in the computational basis."""
    cap = config.DENSE_CAP if dense_cap is None else dense_cap
    n = op.n_qubits
    if n > cap:
        raise ResourceError(f"{n} qubits exceeds the dense cap of {cap}")
    dim = 1 << n
    mat = np.zeros((dim, dim), dtype=complex)
    cols = np.arange(dim, dtype=np.int64)
    for p, c in op.terms.items():
        rows = cols ^ p.x
        sign = 1 - 2 * (_popcount(cols & p.z) & 1)
        mat[rows, cols] += c * _IPOW[(p.x & p.z).bit_count() % 4] * sign
    return mat


def from_matrix(mat, dense_cap: int | None = None) -> OperatorSum:
    """Pauli decomposition of a dense ``2^N x 2^N`` matrix."""
    mat = np.asarray(mat, dtype=complex)
    dim = mat.shape[0]
    n = dim.bit_length() - 1
    if mat.shape != (dim, dim) or dim != 1 << n or n < 1:
        raise DimensionError("matrix must be square with a power-of-two size >= 2")
    cap = config.DENSE_CAP if dense_cap is None else dense_cap
    if n > cap:
        raise ResourceError(f"{n} qubits exceeds the dense cap of {cap}")
    cols = np.arange(dim, dtype=np.int64)
    signs = {}
    terms = {}
    for x in range(dim):
        rows_x = cols ^ x
        picked = mat[cols, rows_x]
        for z in range(dim):
            if z not in signs:
                signs[z] = 1 - 2 * (_popcount(cols & z) & 1)
            val = np.dot(signs[z], picked) * _IPOW[(x & z).bit_count() % 4] / dim
            if abs(val) > config.COEFF_TOL:
                terms[PauliString(n, x, z)] = val
    return OperatorSum(n, terms)


# --------------------------------------------------------------------------
# common operators

def single(n_qubits: int, site: int, letter: str, coeff: complex = 1.0) -> OperatorSum:
    return OperatorSum.pauli(n_qubits, {site: letter}, coeff)


def sigma_plus(n_qubits: int, site: int) -> OperatorSum:
    """Raising operator ``(X - iY)/2``."""
    return single(n_qubits, site, "X", 0.5) + single(n_qubits, site, "Y", -0.5j)


def sigma_minus(n_qubits: int, site: int) -> OperatorSum:
    """Lowering operator ``(X + iY)/2``."""
    return single(n_qubits, site, "X", 0.5) + single(n_qubits, site, "Y", 0.5j)


def occupation(n_qubits: int, site: int) -> OperatorSum:
    """``n_i = (1 - Z_i)/2``."""
    return OperatorSum.identity(n_qubits, 0.5) + single(n_qubits, site, "Z", -0.5)


def total_number(n_qubits: int) -> OperatorSum:
    out = OperatorSum.zero(n_qubits)
    for i in range(1, n_qubits + 1):
        out = out + occupation(n_qubits, i)
    return out


def parity(n_qubits: int) -> OperatorSum:
    """``(-1)^n`` as the Pauli string ``Z...Z``."""
    return OperatorSum.pauli(n_qubits, "Z" * n_qubits)


def heisenberg(n_qubits: int, i: int, j: int) -> OperatorSum:
    """``sigma_i . sigma_j``."""
    return sum((OperatorSum.pauli(n_qubits, {i: a, j: a}) for a in "XYZ"),
               OperatorSum.zero(n_qubits))


# --------------------------------------------------------------------------
# ladder form

_PRIMITIVE_NAMES = {"+": "s+", "-": "s-", "n": "n", "h": "(1-n)"}


def _primitive(n_qubits: int, site: int, kind: str) -> OperatorSum:
    if kind == "+":
        return sigma_plus(n_qubits, site)
    if kind == "-":
        return sigma_minus(n_qubits, site)
    if kind == "n":
        return occupation(n_qubits, site)
    if kind == "h":
        return OperatorSum.identity(n_qubits) - occupation(n_qubits, site)
    raise ContractError(f"unknown ladder primitive {kind!r}")


# per-letter expansion in the basis {1, s+, s-, n}:
# X = s+ + s-,  Y = i s+ - i s-,  Z = 1 - 2n
_LETTER_LADDER = {
    "X": (("+", 1.0), ("-", 1.0)),
    "Y": (("+", 1j), ("-", -1j)),
    "Z": ((None, 1.0), ("n", -2.0)),
}


@dataclass(frozen=True)
class LadderTerm:
    coefficient: complex
    factors: tuple[tuple[int, str], ...]  # (site, kind), kind in {"+", "-", "n", "h"}

    @property
    def k(self) -> int:
        """Number of raising factors."""
        return sum(1 for _, f in self.factors if f == "+")

    @property
    def l(self) -> int:
        """Number of lowering factors."""
        return sum(1 for _, f in self.factors if f == "-")

    def __str__(self):
        body = " ".join(f"{_PRIMITIVE_NAMES[f]}{s}" for s, f in self.factors) or "1"
        return f"{_format_coeff(self.coefficient)} {body}"


@dataclass(frozen=True)
class LadderForm:
    n_qubits: int
    terms: tuple[LadderTerm, ...]

    def expand(self) -> OperatorSum:
        total = OperatorSum.zero(self.n_qubits)
        for term in self.terms:
            op = OperatorSum.identity(self.n_qubits, term.coefficient)
            for site, kind in term.factors:
                op = product(op, _primitive(self.n_qubits, site, kind))
            total = total + op
        return total

    def __str__(self):
        return " ".join(str(t) for t in self.terms) if self.terms else "0"


def to_ladder(op: OperatorSum) -> LadderForm:
    """Rewrite ``op`` over products of ``s+``, ``s-`` and ``n`` factors.

    The single-site basis {1, s+, s-, n} is complete, so the result is unique.
    """
    acc: dict[tuple, complex] = {}
    for p, c in op.terms.items():
        options = []
        for site in p.support:
            options.append([(site, kind, w) for kind, w in _LETTER_LADDER[p.letter(site)]])
        for choice in itertools.product(*options):
            coeff = c
            factors = []
            for site, kind, w in choice:
                coeff *= w
                if kind is not None:
                    factors.append((site, kind))
            key = tuple(factors)
            acc[key] = acc.get(key, 0) + coeff
    terms = [LadderTerm(complex(c), key) for key, c in acc.items() if abs(c) > config.COEFF_TOL]
    terms.sort(key=lambda t: (len(t.factors), t.factors))
    return LadderForm(op.n_qubits, tuple(terms))


class Grade(str, enum.Enum):
    NUMBER_CONSERVING = "number-conserving"
    PARITY_EVEN = "parity-even"
    ODD = "odd"
    MIXED = "mixed"


@dataclass(frozen=True)
class Grading:
    per_term: tuple[tuple[LadderTerm, Grade], ...]
    overall: Grade


def _term_grade(term: LadderTerm) -> Grade:
    d = term.k - term.l
    if d == 0:
        return Grade.NUMBER_CONSERVING
    return Grade.PARITY_EVEN if d % 2 == 0 else Grade.ODD


def grading(op: OperatorSum) -> Grading:
    """Classify each ladder term by ``k - l`` and join the labels."""
    per_term = tuple((t, _term_grade(t)) for t in to_ladder(op).terms)
    labels = {g for _, g in per_term}
    if labels <= {Grade.NUMBER_CONSERVING}:
        overall = Grade.NUMBER_CONSERVING
    elif labels <= {Grade.NUMBER_CONSERVING, Grade.PARITY_EVEN}:
        overall = Grade.PARITY_EVEN
    elif labels == {Grade.ODD}:
        overall = Grade.ODD
    else:
        overall = Grade.MIXED
    return Grading(per_term, overall)


# --------------------------------------------------------------------------
# text format:  "+1.0 Z1 Z2 -0.5 X1",  complex coefficients as "+(0.5+1j)"

def _format_coeff(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:+}"
    if c.real == 0:
        return f"{c.imag:+}j"
    return f"+({c.real}{c.imag:+}j)"


def render(op: OperatorSum) -> str:
    if op.is_zero():
        return "0"
    return " ".join(f"{_format_coeff(c)} {p.label()}" for p, c in op.terms.items())


_SITE_RE = re.compile(r"^([IXYZ])(\d+)$")
_COEFF_RE = re.compile(r"^[+\-]?(\(.*\)|[0-9.eE+\-]+j?|j)$")


def _parse_coeff(tok: str) -> complex:
    sign = 1.0
    if tok[0] in "+-":
        sign = -1.0 if tok[0] == "-" else 1.0
        tok = tok[1:]
    if tok.startswith("(") and tok.endswith(")"):
        tok = tok[1:-1]
    return sign * complex(tok)


def parse(text: str, n_qubits: int | None = None) -> OperatorSum:
    """Parse the :func:`render` grammar back into an :class:`OperatorSum`."""
    text = text.replace("−", "-").strip()
    if text in ("", "0"):
        if n_qubits is None:
            raise ContractError("cannot infer qubit count of an empty operator")
        return OperatorSum.zero(n_qubits)
    terms: list[tuple[complex, dict[int, str]]] = []
    for tok in text.split():
        m = _SITE_RE.match(tok)
        if m:
            if not terms:
                terms.append((1.0, {}))
            letter, site = m.group(1), int(m.group(2))
            sites = terms[-1][1]
            if site in sites or site < 1:
                raise ContractError(f"bad or repeated site {site} in one term")
            sites[site] = letter
        elif tok == "I":
            if not terms:
                terms.append((1.0, {}))
        elif _COEFF_RE.match(tok):
            try:
                terms.append((_parse_coeff(tok), {}))
            except ValueError:
                raise ContractError(f"bad coefficient {tok!r}") from None
        else:
            raise ContractError(f"unrecognized token {tok!r}")
    max_site = max((max(s) for _, s in terms if s), default=1)
    n = max_site if n_qubits is None else n_qubits
    if max_site > n:
        raise DimensionError(f"site {max_site} exceeds {n} qubits")
    out: dict[PauliString, complex] = {}
    for c, sites in terms:
        p = PauliString.from_sites(n, {s: l for s, l in sites.items() if l != "I"})
        out[p] = out.get(p, 0) + c
    return OperatorSum(n, out)


def canonical_key(op: OperatorSum) -> tuple:
    """Deterministic sort key for operators (used to order generator sets)."""
    return tuple((p.letters, round(c.real, 12), round(c.imag, 12)) for p, c in op.terms.items())


def operator_sum(ops: Iterable[OperatorSum], n_qubits: int) -> OperatorSum:
    total = OperatorSum.zero(n_qubits)
    for op in ops:
        total = total + op
    return total
