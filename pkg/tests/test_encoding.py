import numpy as np
import pytest
from hypothesis import given, strategies as st

from anisoqc.encoding import (
    Bath,
    Kind,
    bath_coupling,
    decode_state,
    dfs_check,
    encode_state,
    entangling_generator,
    leakage_of,
    logical_ops,
    make_encoding,
    r_ops,
    restrict,
    su_pair_commute,
    t_ops,
)
from anisoqc.errors import ContractError, DimensionError, LeakageError
from anisoqc.model import block_form, parse_spec
from anisoqc.pauli import OperatorSum, bracket, to_matrix


def test_code_words():
    assert make_encoding("as", 2).to_dict()["code_words"] == {
        "00": "0101", "01": "0110", "10": "1001", "11": "1010"}
    assert make_encoding("aa", 1).to_dict()["code_words"] == {"0": "00", "1": "11"}
    with pytest.raises(ContractError):
        Kind.parse("bogus")


def test_pair_operators_are_the_exchange_combinations():
    P = OperatorSum.pauli
    assert t_ops(2, 1, 2)["x"].allclose((P(2, "XX") + P(2, "YY")) / 2)
    assert r_ops(2, 1, 2)["x"].allclose((P(2, "XX") - P(2, "YY")) / 2)


@pytest.mark.parametrize("kind", ["as", "aa"])
def test_logical_scales(kind):
    enc = make_encoding(kind, 2)
    for m in (1, 2):
        ops = logical_ops(enc, m)
        assert ops.scales == pytest.approx({"x": 1.0, "y": 1.0, "z": 2.0}, abs=1e-12)
        assert ops.structure_constant == pytest.approx(4.0)
        assert bracket(ops.z, ops.x).allclose(ops.y * 4.0)


@pytest.mark.parametrize("kind,scalar,logical", [("as", -0.25, -1.0), ("aa", 0.25, 1.0)])
def test_entangling_relation(kind, scalar, logical):
    rel = entangling_generator(make_encoding(kind, 2), 1)
    assert rel.scalar == pytest.approx(scalar, abs=1e-12)
    assert rel.logical_scale == pytest.approx(logical, abs=1e-12)


@pytest.mark.parametrize("kind", ["as", "aa"])
def test_generators_preserve_code_space(kind):
    enc = make_encoding(kind, 2)
    p = enc.projector
    gens = [g for m in (1, 2) for g in logical_ops(enc, m).as_dict().values()]
    gens.append(entangling_generator(enc, 1).operator)
    for g in gens:
        m = to_matrix(g)
        np.testing.assert_allclose(m @ p, p @ m @ p, atol=1e-12)


@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=4, max_size=4).filter(lambda v: np.linalg.norm(v) > 1e-3),
       st.sampled_from(["as", "aa"]))
def test_encode_decode_round_trip(amps, kind):
    enc = make_encoding(kind, 2)
    v = np.array(amps) / np.linalg.norm(amps)
    phys = encode_state(v, enc)
    assert leakage_of(phys, enc) < 1e-14
    np.testing.assert_allclose(decode_state(phys, enc), v, atol=1e-14)


def test_decode_rejects_leaked_state():
    enc = make_encoding("as", 1)
    state = np.array([1, 1, 0, 0]) / np.sqrt(2)
    with pytest.raises(LeakageError) as info:
        decode_state(state, enc)
    assert info.value.leakage == pytest.approx(0.5)
    np.testing.assert_allclose(decode_state(state, enc, force=True), [1, 0])
    with pytest.raises(DimensionError):
        encode_state([1, 0, 0], enc)


def test_restrict_logical_z():
    enc = make_encoding("aa", 1)
    np.testing.assert_allclose(restrict(r_ops(2, 1, 2)["z"], enc), np.diag([2, -2]))


def test_t_and_r_commute():
    assert su_pair_commute(2, 1, 2)
    assert su_pair_commute(4, 2, 3)


def test_h0_commutes_with_code_generators():
    b = block_form(parse_spec("qubits 4\nbond 1 2 J=1\nbond 2 3 Jz=1\nbond 3 4 J=1"))
    enc = make_encoding("as", 2)
    for m in (1, 2):
        for g in logical_ops(enc, m).as_dict().values():
            assert bracket(b.h0, g).is_zero()


@pytest.mark.parametrize("kind,bath,protected", [
    ("as", "collective", True),
    ("aa", "anti-collective", True),
    ("as", "anti-collective", False),
    ("aa", "collective", False),
])
def test_dfs(kind, bath, protected):
    enc = make_encoding(kind, 2)
    verdict = dfs_check(enc, bath)
    assert verdict.protected is protected
    if protected:
        assert max(verdict.annihilation_norms.values()) == 0.0
        assert max(verdict.commutation_norms.values()) == 0.0


def test_bath_coupling_shape():
    enc = make_encoding("as", 1)
    assert bath_coupling(enc, 1, Bath.COLLECTIVE) == r_ops(2, 1, 2)["z"]
    assert to_matrix(bath_coupling(enc, 1, "collective")) @ enc.projector == pytest.approx(0)
