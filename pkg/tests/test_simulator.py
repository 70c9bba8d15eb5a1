import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anisoqc.encoding import make_encoding, t_ops
from anisoqc.errors import ContractError, DimensionError
from anisoqc.model import ControlSchedule, Segment, build_operator, parse_spec
from anisoqc.pauli import OperatorSum, single, to_matrix
from anisoqc.simulator import (
    StateVector,
    ground_state,
    leakage,
    measure_pair,
    run_schedule,
    state_fidelity,
)
from anisoqc.synthesis import exact_gate, hadamard_schedule

P = OperatorSum.pauli
SQ2 = 1 / math.sqrt(2)
SPECS = {
    "as": parse_spec("qubits 2\nqubit 1 eps=1\nbond 1 2 J=1\n"),
    "aa": parse_spec("qubits 2\nqubit 1 eps=1\nbond 1 2 Delta=1\n"),
}
CHAIN = parse_spec("qubits 3\nqubit 1 eps=1 fx=0.2\nqubit 3 eps=0.5\nbond 1 2 Jx=1 Jy=0.3 Jz=0.4\n"
                   "bond 2 3 J=0.8\ndm 1 2 dy=0.1\n")


def logical(kind, amps):
    enc = make_encoding(kind, 1)
    return StateVector(2, enc.isometry @ np.asarray(amps, dtype=complex)), enc


def test_empty_schedule():
    s = StateVector.basis(2, "01")
    assert run_schedule(SPECS["as"], ControlSchedule(()), s) is s


def test_full_precession_returns_home():
    spec = parse_spec("qubits 1\nqubit 1 eps=1\n")
    s = StateVector.basis(1, 0)
    out = run_schedule(spec, ControlSchedule((Segment({"eps_1": 1.0}, 2 * math.pi),)), s)
    assert state_fidelity(out, s) == pytest.approx(1.0, abs=1e-12)
    assert out.amplitudes[0] == pytest.approx(-1.0)


@pytest.mark.parametrize("kind", ["as", "aa"])
def test_hadamard_on_zero(kind):
    zero, enc = logical(kind, [1, 0])
    plus, _ = logical(kind, [SQ2, SQ2])
    out = run_schedule(SPECS[kind], hadamard_schedule(1, enc, SPECS[kind]).schedule, zero)
    assert state_fidelity(out, plus) >= 1 - 1e-10
    assert leakage(out, enc) <= 1e-12


def test_rejects_mismatch_and_unknown_controls():
    with pytest.raises(DimensionError):
        run_schedule(SPECS["as"], ControlSchedule(()), StateVector.basis(3, 0))
    with pytest.raises(ContractError):
        run_schedule(SPECS["as"], ControlSchedule((Segment({"dz_1_2": 1.0}, 1.0),)),
                     StateVector.basis(2, 0))
    with pytest.raises(ContractError):
        StateVector(1, np.array([1.0, 1.0]))


def random_schedule(rng, n_segments):
    names = CHAIN.control_names()
    return ControlSchedule(tuple(
        Segment({k: float(rng.normal()) for k in names if rng.random() < 0.7}, float(rng.uniform(0.01, 1)))
        for _ in range(n_segments)))


@settings(max_examples=10)
@given(st.integers(0, 10_000))
def test_norm_preserved_over_long_schedules(seed):
    rng = np.random.default_rng(seed)
    s = StateVector.normalized(3, rng.normal(size=8) + 1j * rng.normal(size=8))
    out = run_schedule(CHAIN, random_schedule(rng, 100), s)
    assert abs(np.linalg.norm(out.amplitudes) - 1) <= 1e-10


@settings(max_examples=20)
@given(st.integers(0, 10_000), st.floats(0.05, 0.95))
def test_splitting_a_segment_changes_nothing(seed, frac):
    rng = np.random.default_rng(seed)
    sched = random_schedule(rng, 3)
    k = int(rng.integers(3))
    seg = sched.segments[k]
    split = sched.segments[:k] + (Segment(seg.assignments, seg.duration * frac),
                                  Segment(seg.assignments, seg.duration * (1 - frac))) + sched.segments[k + 1:]
    s = StateVector.basis(3, 5)
    a = run_schedule(CHAIN, sched, s).amplitudes
    b = run_schedule(CHAIN, ControlSchedule(split), s).amplitudes
    np.testing.assert_allclose(a, b, atol=1e-10)


def test_ground_state_examples():
    g = ground_state(P(2, "XX") + P(2, "YY"))
    assert g.energy == pytest.approx(-2) and not g.degenerate
    assert state_fidelity(g.state, StateVector(2, np.array([0, SQ2, -SQ2, 0]))) >= 1 - 1e-10
    g = ground_state(P(2, "XX") - P(2, "YY"))
    assert g.energy == pytest.approx(-2)
    assert state_fidelity(g.state, StateVector(2, np.array([SQ2, 0, 0, -SQ2]))) >= 1 - 1e-10
    g = ground_state(-single(1, 1, "Z"))
    assert g.energy == pytest.approx(-1)
    np.testing.assert_allclose(g.state.amplitudes, [1, 0])


def test_degenerate_ground_space():
    g = ground_state(single(2, 1, "Z"))
    assert g.degenerate and g.degeneracy == 2
    gram = np.array([[np.vdot(a.amplitudes, b.amplitudes) for b in g.basis] for a in g.basis])
    np.testing.assert_allclose(gram, np.eye(2), atol=1e-12)


@settings(max_examples=5)
@given(st.integers(0, 10_000))
def test_ground_energy_is_variational_minimum(seed):
    rng = np.random.default_rng(seed)
    h = build_operator(CHAIN)
    m = to_matrix(h)
    e0 = ground_state(h).energy
    for _ in range(100):
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert e0 <= (np.vdot(v, m @ v) / np.vdot(v, v)).real + 1e-12


def test_state_fidelity_examples():
    a = StateVector.basis(2, 1)
    assert state_fidelity(a, a) == 1.0
    assert state_fidelity(a, StateVector.basis(2, 2)) == 0.0
    plus, _ = logical("as", [SQ2, SQ2])
    minus, _ = logical("as", [SQ2, -SQ2])
    assert state_fidelity(plus, minus) == pytest.approx(0.0, abs=1e-15)


def test_leakage_examples():
    enc = make_encoding("as", 1)
    assert leakage(StateVector.basis(2, "01"), enc) == 0.0
    assert leakage(StateVector.basis(2, "00"), enc) == 1.0
    start = StateVector.basis(2, "10")
    u = exact_gate(t_ops(2, 1, 2)["x"] * 0.7 + t_ops(2, 1, 2)["z"] * 0.3, 1.3)
    assert leakage(StateVector(2, u @ start.amplitudes), enc) <= 1e-12


def test_readout_examples():
    zero, enc = logical("as", [1, 0])
    recs = {r.outcome: r for r in measure_pair(zero, 1, enc)}
    assert recs["singlet"].probability == pytest.approx(0.5)
    minus, _ = logical("as", [SQ2, -SQ2])
    recs = {r.outcome: r for r in measure_pair(minus, 1, enc)}
    assert recs["singlet"].probability == pytest.approx(1.0)
    assert recs["triplet"].post_state is None


@pytest.mark.parametrize("kind", ["as", "aa"])
def test_readout_protocol(kind):
    enc = make_encoding(kind, 1)
    sched = hadamard_schedule(1, enc, SPECS[kind]).schedule
    probs = []
    for amps in ([1, 0], [0, 1]):
        s, _ = logical(kind, amps)
        out = run_schedule(SPECS[kind], sched, s)
        probs.append([r.probability for r in measure_pair(out, 1, enc)])
    np.testing.assert_allclose(probs, [[0, 1], [1, 0]], atol=1e-10)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_measurement_is_idempotent(seed):
    rng = np.random.default_rng(seed)
    enc = make_encoding("aa", 2)
    s = StateVector.normalized(4, rng.normal(size=16) + 1j * rng.normal(size=16))
    m = int(rng.integers(1, 3))
    recs = measure_pair(s, m, enc)
    assert sum(r.probability for r in recs) == pytest.approx(1.0, abs=1e-10)
    for r in recs:
        again = {q.outcome: q.probability for q in measure_pair(r.post_state, m, enc)}
        assert again[r.outcome] == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_triples_round_trip(seed):
    rng = np.random.default_rng(seed)
    s = StateVector.normalized(3, rng.normal(size=8) + 1j * rng.normal(size=8))
    back = StateVector.from_triples(3, s.to_triples())
    np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-14)
    assert all(abs(complex(re, im)) > 1e-14 for _, re, im in StateVector.basis(3, 4).to_triples())
