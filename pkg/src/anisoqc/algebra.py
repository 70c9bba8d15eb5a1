"""Lie and associative closures, conserved quantities and universality verdicts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import config
from .errors import ContractError, DimensionError, ResourceError
from .pauli import (
    Grade,
    OperatorSum,
    _popcount,
    canonical_key,
    commutator,
    from_matrix,
    grading,
    to_matrix,
    total_number,
)

_IPOW = np.array([1, 1j, -1, -1j])


# --------------------------------------------------------------------------
# orthonormal real span, shared by every closure below

class _Span:
    """Incrementally grown orthonormal basis (two-pass classical Gram-Schmidt)."""

    def __init__(self, dim: int, tol: float, dtype=float):
        self.tol = tol
        self.rows = np.zeros((min(dim, 64), dim), dtype=dtype)
        self.size = 0

    @property
    def basis(self) -> np.ndarray:
        return self.rows[: self.size]

    def residual(self, vec: np.ndarray) -> np.ndarray:
        q = self.basis
        for _ in range(2):
            vec = vec - q.T @ (q.conj() @ vec)
        return vec

    def add(self, vec: np.ndarray) -> np.ndarray | None:
        norm = np.linalg.norm(vec)
        if norm == 0:
            return None
        r = self.residual(vec / norm)
        rn = np.linalg.norm(r)
        if rn <= self.tol:
            return None
        r = r / rn
        if self.size == self.rows.shape[0]:
            grown = np.zeros((2 * self.size, self.rows.shape[1]), dtype=self.rows.dtype)
            grown[: self.size] = self.rows
            self.rows = grown
        self.rows[self.size] = r
        self.size += 1
        return r


def _closure(seeds: Sequence[np.ndarray], brk: Callable, dim: int, cap: int, ceiling: int):
    """Breadth-first real Lie span of ``seeds`` under ``brk``.

    Returns ``(vectors, depth, converged, hit_cap)``.
    """
    span = _Span(dim, config.RANK_TOL)
    frontier = []
    for v in seeds:
        if span.size >= cap:
            return span.basis.copy(), 0, False, True
        r = span.add(v)
        if r is not None:
            frontier.append(r)
    depth = 0
    while frontier and span.size < ceiling:
        depth += 1
        fresh = []
        for a in frontier:
            for b in span.basis.copy():
                if span.size >= ceiling:
                    break
                c = brk(a, b)
                if not np.any(c):
                    continue
                if span.size >= cap:
                    if np.linalg.norm(span.residual(c / np.linalg.norm(c))) > span.tol:
                        return span.basis.copy(), depth, False, True
                    continue
                r = span.add(c)
                if r is not None:
                    fresh.append(r)
        frontier = fresh
    return span.basis.copy(), depth, True, False


# --------------------------------------------------------------------------
# Lie closure over Pauli coefficient vectors

@dataclass(frozen=True)
class LieBasis:
    elements: tuple[OperatorSum, ...]
    dimension: int
    converged: bool
    depth: int

    def vectors(self) -> np.ndarray:
        if not self.elements:
            return np.zeros((0, 0))
        return np.array([e.to_vector(float) for e in self.elements])


def _pauli_bracket(n: int):
    mask = (1 << n) - 1
    size = 1 << (2 * n)

    def brk(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        ia, ib = np.flatnonzero(a), np.flatnonzero(b)
        xa, za = ia >> n, ia & mask
        xb, zb = ib >> n, ib & mask
        anti = (_popcount(xa[:, None] & zb[None, :]) + _popcount(za[:, None] & xb[None, :])) & 1
        sel = np.nonzero(anti)
        if sel[0].size == 0:
            return np.zeros(size)
        xa, za, xb, zb = xa[sel[0]], za[sel[0]], xb[sel[1]], zb[sel[1]]
        x, z = xa ^ xb, za ^ zb
        e = (_popcount(xa & za) + _popcount(xb & zb) + 2 * _popcount(za & xb) - _popcount(x & z)) % 4
        # -i [P, Q] = -2i PQ for anticommuting strings
        c = (-2j * _IPOW[e]).real * a[ia[sel[0]]] * b[ib[sel[1]]]
        out = np.zeros(size)
        np.add.at(out, (x << n) | z, c)
        out[np.abs(out) <= config.COEFF_TOL] = 0.0
        return out

    return brk


def _check_generators(generators) -> int:
    generators = list(generators)
    if not generators:
        raise ContractError("need at least one generator")
    n = generators[0].n_qubits
    for g in generators:
        if g.n_qubits != n:
            raise DimensionError("generators act on different numbers of qubits")
    return n


def lie_closure(generators: Iterable[OperatorSum], dim_cap: int | None = None) -> LieBasis:
    """Orthonormal basis of the real Lie algebra generated under ``-i[A, B]``.

    Raises ``ResourceError`` (with a partial, non-converged basis) when the
    span would exceed ``dim_cap``.
    """
    generators = list(generators)
    n = _check_generators(generators)
    for g in generators:
        if not g.is_hermitian():
            raise ContractError(f"generator {g.render()} is not Hermitian")
    size = 1 << (2 * n)
    cap = size if dim_cap is None else int(dim_cap)
    if cap < 1:
        raise ContractError("dim_cap must be at least 1")
    ordered = sorted((g.real() for g in generators), key=canonical_key)
    seeds = [g.to_vector(float) for g in ordered]
    has_identity = any(v[0] != 0 for v in seeds)
    ceiling = size if has_identity else size - 1
    vecs, depth, converged, hit = _closure(seeds, _pauli_bracket(n), size, cap, ceiling)
    basis = LieBasis(tuple(OperatorSum.from_vector(n, v) for v in vecs), len(vecs), converged, depth)
    if hit:
        raise ResourceError(f"Lie closure exceeds dim_cap={cap}", partial=basis)
    return basis


# --------------------------------------------------------------------------
# associative closure

def associative_closure(generators: Iterable[OperatorSum], dim_cap: int | None = None):
    """Complex span of all products of generators, identity included.

    Returns ``(basis, dimension)``; the basis is orthonormal in the
    Hilbert-Schmidt pairing.
    """
    generators = sorted(generators, key=canonical_key)
    n = _check_generators(generators)
    d = 1 << n
    full = d * d
    cap = full if dim_cap is None else int(dim_cap)
    mats = [to_matrix(g) for g in generators]
    span = _Span(full, config.RANK_TOL, dtype=complex)

    def push(mat) -> np.ndarray | None:
        if span.size >= full:
            return None
        vec = mat.ravel()
        if span.size >= cap:
            if np.linalg.norm(vec) and np.linalg.norm(span.residual(vec / np.linalg.norm(vec))) > span.tol:
                raise ResourceError(f"associative closure exceeds dim_cap={cap}",
                                    partial=_as_ops(span.basis, n))
            return None
        return span.add(vec)

    frontier = []
    for m in [np.eye(d, dtype=complex)] + mats:
        r = push(m)
        if r is not None:
            frontier.append(r.reshape(d, d))
    while frontier and span.size < full:
        fresh = []
        for w in frontier:
            for g in mats:
                r = push(g @ w)
                if r is not None:
                    fresh.append(r.reshape(d, d))
        frontier = fresh
    return _as_ops(span.basis, n), span.size


def _as_ops(rows: np.ndarray, n: int) -> list[OperatorSum]:
    d = 1 << n
    # rows are unit Frobenius vectors; rescale so hs_inner is orthonormal
    return [from_matrix(r.reshape(d, d) * np.sqrt(d)) for r in rows]


# --------------------------------------------------------------------------
# conserved quantities and sectors

def conserves(op: OperatorSum, which: str) -> bool:
    if which == "number":
        return commutator(op, total_number(op.n_qubits)).is_zero()
    if which == "parity":
        xs, _, _ = op.arrays()
        return bool(np.all(_popcount(xs) % 2 == 0))
    raise ContractError(f"unknown conserved quantity {which!r}")


@dataclass(frozen=True)
class BlockDecomposition:
    which: str
    sectors: tuple[tuple[int, tuple[int, ...]], ...]
    operator_is_block_diagonal: bool
    off_block_norm: float

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(idx) for _, idx in self.sectors)


def sectors(n_qubits: int, which: str) -> tuple[tuple[int, tuple[int, ...]], ...]:
    """Eigen-sectors of the number (label ``n``) or parity (label ``+-1``) operator."""
    idx = np.arange(1 << n_qubits)
    occ = _popcount(idx)
    if which == "number":
        return tuple((k, tuple(int(i) for i in idx[occ == k])) for k in range(n_qubits + 1))
    if which == "parity":
        return tuple((p, tuple(int(i) for i in idx[(occ % 2) == (0 if p == 1 else 1)])) for p in (1, -1))
    raise ContractError(f"unknown conserved quantity {which!r}")


def sector_decompose(op: OperatorSum, which: str, dense_cap: int | None = None) -> BlockDecomposition:
    mat = to_matrix(op, dense_cap)
    secs = sectors(op.n_qubits, which)
    label = np.empty(mat.shape[0], dtype=int)
    for k, (_, idx) in enumerate(secs):
        label[list(idx)] = k
    off = label[:, None] != label[None, :]
    norm = float(np.linalg.norm(mat[off]))
    return BlockDecomposition(which, secs, norm <= 1e-12, norm)


# --------------------------------------------------------------------------
# closure restricted to an invariant subspace

@dataclass(frozen=True)
class RestrictedClosure:
    """Lie closure of compressed generators acting on a ``d``-dimensional subspace.

    ``matrices`` are ``d x d`` Hermitian and orthonormal under ``Re Tr(A^dagger B)``.
    """

    matrices: tuple[np.ndarray, ...]
    dimension: int
    traceless_dimension: int
    subspace_dim: int
    converged: bool
    depth: int
    acts_as_full_special_unitary: bool


def _check_projector(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise DimensionError("projector must be a square matrix")
    if np.linalg.norm(p - p.conj().T) > 1e-10 or np.linalg.norm(p @ p - p) > 1e-10:
        raise ContractError("matrix is not an orthogonal projector")
    w, v = np.linalg.eigh(p)
    iso = v[:, w > 0.5]
    if iso.shape[1] < 2:
        raise ContractError("projector rank must be at least 2")
    return iso


def compress(generators, projector) -> list[np.ndarray]:
    """``V^dagger A V`` for each generator, after checking that it preserves the range."""
    p = np.asarray(projector, dtype=complex)
    iso = _check_projector(p)
    eye = np.eye(p.shape[0])
    out = []
    for g in generators:
        mat = to_matrix(g) if isinstance(g, OperatorSum) else np.asarray(g, dtype=complex)
        if mat.shape != p.shape:
            raise DimensionError("generator and projector sizes differ")
        if np.linalg.norm((eye - p) @ mat @ p, 2) > 1e-10:
            name = g.render() if isinstance(g, OperatorSum) else "matrix generator"
            raise ContractError(f"generator {name} does not preserve the subspace")
        out.append(iso.conj().T @ mat @ iso)
    return out


def restricted_closure(generators, projector) -> RestrictedClosure:
    blocks = compress(generators, projector)
    d = blocks[0].shape[0]
    for b in blocks:
        if np.linalg.norm(b - b.conj().T) > 1e-10:
            raise ContractError("compressed generator is not Hermitian")

    def vec(m):
        return np.concatenate([m.real.ravel(), m.imag.ravel()])

    def mat(v):
        return (v[: d * d] + 1j * v[d * d:]).reshape(d, d)

    def brk(a, b):
        ma, mb = mat(a), mat(b)
        c = -1j * (ma @ mb - mb @ ma)
        out = vec(c)
        out[np.abs(out) <= config.COEFF_TOL] = 0.0
        return out

    seeds = sorted((vec(b) for b in blocks), key=lambda v: tuple(np.round(v, 12)))
    has_identity = any(abs(np.trace(b)) > 1e-12 for b in blocks)
    ceiling = d * d if has_identity else d * d - 1
    vecs, depth, converged, _ = _closure(seeds, brk, 2 * d * d, d * d, ceiling)
    mats = [mat(v) for v in vecs]
    traceless = [m - np.trace(m) / d * np.eye(d) for m in mats]
    if traceless:
        flat = np.array([vec(m) for m in traceless])
        sv = np.linalg.svd(flat, compute_uv=False)
        tdim = int(np.sum(sv > config.RANK_TOL))
    else:
        tdim = 0
    return RestrictedClosure(tuple(mats), len(mats), tdim, d, converged, depth, tdim == d * d - 1)


# --------------------------------------------------------------------------
# universality verdict

UNIVERSAL = "universal"
SUBSPACE_CANDIDATE = "universal-on-subspace-candidate"
NOT_UNIVERSAL = "not-universal"


@dataclass(frozen=True)
class ClosureReport:
    closure: LieBasis
    conserves_number: bool
    conserves_parity: bool
    has_odd_term: bool
    verdict: str
    block_dims: tuple[int, ...]
    generators: tuple[OperatorSum, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "closure": {
                "dimension": self.closure.dimension,
                "converged": self.closure.converged,
                "depth": self.closure.depth,
            },
            "conserves_number": self.conserves_number,
            "conserves_parity": self.conserves_parity,
            "has_odd_term": self.has_odd_term,
            "verdict": self.verdict,
            "block_dims": list(self.block_dims),
            "generators": [g.render() for g in self.generators],
        }


def analyse_generators(generators: Sequence[OperatorSum], dim_cap: int | None = None) -> ClosureReport:
    """Closure, conservation flags and verdict for a raw generator set."""
    gens = [g for g in generators if not g.is_zero()]
    if not gens:
        raise ContractError("no nonzero generators")
    n = _check_generators(gens)
    closure = lie_closure(gens, dim_cap)
    has_odd = any(t[1] is Grade.ODD for g in gens for t in grading(g).per_term)
    number = all(conserves(g, "number") for g in gens)
    par = all(conserves(g, "parity") for g in gens)
    if closure.dimension >= 4 ** n - 1:
        verdict = UNIVERSAL
    elif par:
        verdict = NOT_UNIVERSAL
    else:
        verdict = SUBSPACE_CANDIDATE
    if number:
        dims = tuple(len(i) for _, i in sectors(n, "number"))
    elif par:
        dims = tuple(len(i) for _, i in sectors(n, "parity"))
    else:
        dims = (1 << n,)
    return ClosureReport(closure, number, par, has_odd, verdict, dims, tuple(gens))


def reachable_generators(spec) -> list[OperatorSum]:
    """Every independently controllable direction of ``spec``, plus its drift."""
    from .model import control_generators, drift_operator

    gens = list(control_generators(spec).values())
    drift = drift_operator(spec)
    if not drift.is_zero():
        gens.append(drift)
    return gens


def universality_report(spec, dim_cap: int | None = None) -> ClosureReport:
    return analyse_generators(reachable_generators(spec), dim_cap)
