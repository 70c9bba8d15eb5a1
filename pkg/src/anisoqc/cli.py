"""Command-line entry point.

Every command writes one JSON report (stdout or ``--out``).  Exit status is
0 on success, 1 on contract or capability errors, 2 on parse errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, config
from .algebra import (
    analyse_generators,
    associative_closure,
    restricted_closure,
    sector_decompose,
    universality_report,
)
from .encoding import (
    Bath,
    dfs_check,
    encode_state,
    entangling_generator,
    logical_ops,
    make_encoding,
)
from .errors import AnisoError, ContractError, SpecParseError
from .model import ControlSchedule, build_operator, control_generators, parse_spec
from .pauli import parse
from .simulator import StateVector, ground_state, leakage, measure_pair, run_schedule
from .synthesis import (
    CNOT,
    HADAMARD,
    compile_gate,
    dm_y_rotation,
    entangling_schedule,
    euler_schedule,
    rotation,
)

SCHEMA_VERSION = 1


class InputError(AnisoError):
    """Unreadable or malformed input outside the device grammar."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


def _clean(obj):
    """JSON-safe, platform-stable copy of a report payload."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        # values below the numerical floor are noise and would break byte stability
        return 0.0 if abs(x) < 1e-12 else float(f"{x:.12g}")
    if isinstance(obj, complex):
        return {"re": _clean(obj.real), "im": _clean(obj.imag)}
    return obj


def _read(path: str, digest) -> str:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    digest.update(data)
    digest.update(b"\0")
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None


# --------------------------------------------------------------------------
# commands

def cmd_classify(args, digest) -> tuple[dict, list]:
    spec = parse_spec(_read(args.spec, digest))
    rep = universality_report(spec)
    out = rep.to_dict()
    h = build_operator(spec)
    out["controls"] = spec.control_names()
    out["hamiltonian"] = h.render()
    diags = []
    if spec.n_qubits <= config.DENSE_CAP:
        for which in ("number", "parity"):
            out[f"{which}_block_diagonal"] = sector_decompose(h, which).operator_is_block_diagonal
    return out, diags


def _encoding_for(spec, kind):
    if spec.n_qubits % 2:
        raise ContractError(f"encoding needs an even qubit count, got {spec.n_qubits}")
    return make_encoding(kind, spec.n_qubits // 2)


def cmd_encode(args, digest) -> tuple[dict, list]:
    spec = parse_spec(_read(args.spec, digest))
    enc = _encoding_for(spec, args.kind)
    out = enc.to_dict()
    pairs = []
    gens = []
    for m in range(1, enc.n_logical + 1):
        ops = logical_ops(enc, m)
        pairs.append({
            "pair": m,
            "generators": {k: v.render() for k, v in ops.as_dict().items()},
            "logical_scales": ops.scales,
            "structure_constant": ops.structure_constant,
        })
        gens += [ops.z, ops.x]
    out["pairs"] = pairs
    rels = []
    for m in range(1, enc.n_logical):
        r = entangling_generator(enc, m)
        rels.append({"pair": m, "coupling": r.operator.render(), "code_scalar": r.scalar,
                     "logical_scale": r.logical_scale})
        gens.append(r.operator)
    out["entangling_relations"] = rels
    out["dfs"] = {b.value: dfs_check(enc, b).to_dict() for b in Bath}
    rc = restricted_closure(gens, enc.projector)
    out["restricted_closure"] = {"dimension": rc.dimension,
                                 "traceless_dimension": rc.traceless_dimension,
                                 "acts_as_full_special_unitary": rc.acts_as_full_special_unitary}
    return out, []


_SINGLE_TARGETS = {
    "hadamard": 1j * HADAMARD,
    "x": -1j * np.array([[0, 1], [1, 0]], dtype=complex),
    "y": -1j * np.array([[0, -1j], [1j, 0]]),
    "z": -1j * np.diag([1.0 + 0j, -1.0]),
    "s": rotation("z", math.pi / 2),
    "t": rotation("z", math.pi / 4),
}


def _read_matrix(path, digest) -> np.ndarray:
    text = _read(path, digest)
    try:
        doc = json.loads(text)
        mat = np.array(doc["re"], dtype=float) + 1j * np.array(doc["im"], dtype=float)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"matrix file must hold {{'re': [[...]], 'im': [[...]]}}: {exc}") from None
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InputError("target matrix must be square")
    return mat


def cmd_synth(args, digest) -> tuple[dict, list]:
    spec = parse_spec(_read(args.spec, digest))
    target = args.target
    matrix = _read_matrix(args.matrix, digest) if args.matrix else None
    m = args.pair
    diags = []
    if args.kind == "none":
        n = spec.n_qubits
        if matrix is None and target == "dm-y":
            # quarter turn exp(-i pi/4 Y_m)
            res = dm_y_rotation(spec, m, m + 1, math.pi / 4, (args.steps, args.steps))
            return {"target": target, "gates": [res.to_dict()]}, diags
        if matrix is None:
            if target != "cnot":
                raise ContractError("on the bare space only cnot, dm-y or --matrix are supported")
            matrix = np.kron(np.kron(np.eye(1 << (m - 1)), CNOT), np.eye(1 << (n - m - 1)))
        gens = control_generators(spec)
        res = compile_gate(matrix, gens, args.budget, None,
                           baseline={k: 0.0 for k in gens})
        return {"target": target or "matrix", "gates": [res.to_dict()]}, diags
    enc = _encoding_for(spec, args.kind)
    if matrix is not None and matrix.shape == (2, 2):
        det = np.linalg.det(matrix)
        res = euler_schedule(matrix / np.sqrt(det), m, enc, spec)
    elif matrix is not None or target == "cnot":
        if matrix is None:
            matrix = np.kron(np.kron(np.eye(1 << (m - 1)), CNOT), np.eye(1 << (enc.n_logical - m - 1)))
        gens = control_generators(spec)
        res = compile_gate(matrix, gens, args.budget, enc, baseline={k: 0.0 for k in gens})
    elif target in ("cphase", "cz"):
        res = entangling_schedule(enc, m, spec, local_corrections=(target == "cz"))
    elif target in _SINGLE_TARGETS:
        res = euler_schedule(_SINGLE_TARGETS[target], m, enc, spec)
    else:
        raise ContractError(f"unknown target {target!r}")
    if not res.converged:
        diags.append({"kind": "not-converged", "message": "budget exhausted; best schedule reported"})
    return {"target": target or "matrix", "gates": [res.to_dict()]}, diags


def _init_state(spec, init: str, kind: str) -> tuple[StateVector, list]:
    diags = []
    if init == "ground":
        g = ground_state(build_operator(spec))
        if g.degenerate:
            diags.append({"kind": "degenerate-ground-state",
                          "message": f"ground space has dimension {g.degeneracy}; first basis vector used"})
        return g.state, diags
    if set(init) <= {"0", "1"}:
        if kind == "none":
            return StateVector.basis(spec.n_qubits, init), diags
        enc = _encoding_for(spec, kind)
        if len(init) != enc.n_logical:
            raise InputError(f"logical bitstring must have {enc.n_logical} bits")
        logical = np.zeros(enc.dim, dtype=complex)
        logical[int(init, 2)] = 1
        return StateVector(spec.n_qubits, encode_state(logical, enc)), diags
    raise InputError(f"--init must be 'ground' or a bitstring, got {init!r}")


def cmd_simulate(args, digest) -> tuple[dict, list]:
    spec = parse_spec(_read(args.spec, digest))
    sched_text = _read(args.schedule, digest)
    try:
        doc = json.loads(sched_text)
    except ValueError as exc:
        raise InputError(f"schedule is not valid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    if isinstance(doc, dict) and "segments" in doc:
        doc = doc["segments"]
    schedule = ControlSchedule.from_document(doc)
    state, diags = _init_state(spec, args.init, args.kind)
    final = run_schedule(spec, schedule, state)
    out = {"segments": len(schedule), "total_time": schedule.total_time,
           "final_state": final.to_triples(),
           "norm": float(np.linalg.norm(final.amplitudes))}
    if args.kind != "none":
        enc = _encoding_for(spec, args.kind)
        out["leakage"] = leakage(final, enc)
        if args.measure:
            out["measurement"] = [r.to_dict() for r in measure_pair(final, args.measure, enc)]
            out["measurement_model"] = "idealized projective singlet/triplet readout"
    elif args.measure:
        raise ContractError("--measure needs an encoding (--kind as|aa)")
    return out, diags


def cmd_closure(args, digest) -> tuple[dict, list]:
    text = _read(args.generators, digest)
    rows = []
    for k, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if body:
            rows.append((k, body))
    if not rows:
        raise InputError("generator file holds no operators", 1, 1)
    parsed = []
    for k, body in rows:
        try:
            parsed.append((k, parse(body)))
        except (ValueError, AnisoError) as exc:
            raise InputError(str(exc), k, 1) from None
    n = max(op.n_qubits for _, op in parsed)
    gens = []
    for k, body in rows:
        op = parse(body, n)
        if not op.is_hermitian():
            raise InputError("generator is not Hermitian", k, 1)
        gens.append(op)
    rep = analyse_generators(gens, args.dim_cap)
    out = rep.to_dict()
    out["n_qubits"] = n
    if args.associative:
        out["associative_dimension"] = associative_closure(gens)[1]
    return out, []


COMMANDS = {
    "classify": cmd_classify,
    "encode": cmd_encode,
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "closure": cmd_closure,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anisoqc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--dense-cap", type=int, default=None, help="largest qubit count for dense matrices")

    sp = sub.add_parser("classify", help="conservation laws and universality verdict")
    sp.add_argument("spec")
    common(sp)

    sp = sub.add_parser("encode", help="code words, scalar relations and DFS verdicts")
    sp.add_argument("spec")
    sp.add_argument("--kind", choices=["as", "aa"], default="as")
    common(sp)

    sp = sub.add_parser("synth", help="synthesize a gate schedule")
    sp.add_argument("spec")
    sp.add_argument("--target", default=None,
                    help="hadamard, x, y, z, s, t, cphase, cz, cnot; dm-y with --kind none")
    sp.add_argument("--matrix", default=None, help="JSON file with 're' and 'im' arrays")
    sp.add_argument("--kind", choices=["as", "aa", "none"], default="as")
    sp.add_argument("--pair", type=int, default=1, help="logical qubit index (1-based)")
    sp.add_argument("--budget", type=int, default=20, help="segment budget for numerical compilation")
    sp.add_argument("--steps", type=int, default=16, help="product-formula repetitions")
    common(sp)

    sp = sub.add_parser("simulate", help="run a schedule from an initial state")
    sp.add_argument("spec")
    sp.add_argument("schedule")
    sp.add_argument("--init", default="ground", help="'ground' or a bitstring")
    sp.add_argument("--kind", choices=["as", "aa", "none"], default="none")
    sp.add_argument("--measure", type=int, default=None, help="pair to read out after the schedule")
    common(sp)

    sp = sub.add_parser("closure", help="Lie closure of a generator list")
    sp.add_argument("generators")
    sp.add_argument("--dim-cap", type=int, default=None)
    sp.add_argument("--associative", action="store_true", help="also report the associative closure")
    common(sp)
    return p


def run(argv=None) -> tuple[int, str]:
    """Execute a command; returns ``(exit_status, report_text)`` without writing anything."""
    args = build_parser().parse_args(argv)
    return _execute(args)


def _execute(args) -> tuple[int, str]:
    if args.command == "synth" and not (args.target or args.matrix):
        args.target = "hadamard"
    digest = hashlib.sha256()
    status = 0
    result = None
    diags: list = []
    old_cap = config.DENSE_CAP
    try:
        if args.dense_cap is not None:
            config.set_dense_cap(args.dense_cap)
        result, diags = COMMANDS[args.command](args, digest)
    except SpecParseError as exc:
        status = 2
        diags = [{"kind": f"parse-error:{exc.kind}", "message": exc.detail,
                  "line": exc.line, "column": exc.column}]
    except InputError as exc:
        status = 2
        d = {"kind": "parse-error:input", "message": str(exc)}
        if exc.line is not None:
            d.update(line=exc.line, column=exc.column)
        diags = [d]
    except (AnisoError, ValueError) as exc:
        status = 1
        d = {"kind": type(exc).__name__, "message": str(exc)}
        missing = getattr(exc, "missing", None)
        if missing is not None:
            d["missing"] = missing
        diags = [d]
    finally:
        config.set_dense_cap(old_cap)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": args.command,
        "input_digest": digest.hexdigest(),
        "status": "ok" if status == 0 else "error",
        "result": result,
        "diagnostics": diags,
    }
    text = json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"
    return status, text


def main(argv=None) -> int:
    args = build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    status, text = _execute(args)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
