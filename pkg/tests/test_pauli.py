import numpy as np
import pytest
from hypothesis import given, strategies as st

from anisoqc.errors import ContractError, DimensionError, ResourceError
from anisoqc.pauli import (
    Grade,
    OperatorSum,
    PauliString,
    bracket,
    commutator,
    from_matrix,
    grading,
    hs_inner,
    multiply,
    occupation,
    parity,
    parse,
    product,
    render,
    sigma_minus,
    sigma_plus,
    single,
    to_ladder,
    to_matrix,
    total_number,
)
from conftest import operators, pauli_strings
import oracle


def test_single_qubit_products():
    x, y, z = (PauliString.from_letters(c) for c in "XYZ")
    assert multiply(x, y) == (1j, z)
    assert multiply(y, x) == (-1j, z)
    assert multiply(z, x) == (1j, y)
    assert multiply(x, x) == (1, PauliString.identity(1))


def test_two_qubit_product_phase():
    phase, p = multiply(PauliString.from_letters("XY"), PauliString.from_letters("YY"))
    assert phase == 1j and p.letters == "ZI"


def test_qubit_one_is_most_significant():
    z1 = to_matrix(single(2, 1, "Z"))
    np.testing.assert_allclose(np.diag(z1).real, [1, 1, -1, -1])


def test_ladder_conventions():
    up = to_matrix(sigma_plus(1, 1))
    np.testing.assert_allclose(up @ [1, 0], [0, 1])
    assert product(sigma_plus(1, 1), sigma_minus(1, 1)).allclose(occupation(1, 1))


def test_exchange_operator_matrix():
    tx = (OperatorSum.pauli(2, "XX") + OperatorSum.pauli(2, "YY")) / 2
    m = to_matrix(tx).real
    expected = np.zeros((4, 4))
    expected[1, 2] = expected[2, 1] = 1
    np.testing.assert_allclose(m, expected)


@given(operators(), st.data())
def test_product_matches_dense(a, data):
    b = data.draw(operators(n=a.n_qubits))
    np.testing.assert_allclose(to_matrix(product(a, b)), to_matrix(a) @ to_matrix(b), atol=1e-12)


@given(operators(), st.data())
def test_commutator_matches_dense(a, data):
    b = data.draw(operators(n=a.n_qubits))
    np.testing.assert_allclose(to_matrix(commutator(a, b)), oracle.comm(to_matrix(a), to_matrix(b)),
                               atol=1e-12)


@given(operators(hermitian=True), st.data())
def test_bracket_is_hermitian_and_antisymmetric(a, data):
    b = data.draw(operators(n=a.n_qubits, hermitian=True))
    c = bracket(a, b)
    assert c.is_hermitian()
    assert (c + bracket(b, a)).is_zero()


@given(operators(hermitian=True, max_terms=3), st.data())
def test_bracket_jacobi(a, data):
    b = data.draw(operators(n=a.n_qubits, hermitian=True, max_terms=3))
    c = data.draw(operators(n=a.n_qubits, hermitian=True, max_terms=3))
    total = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b))
    assert total.allclose(OperatorSum.zero(a.n_qubits), atol=1e-10)


def test_bracket_rejects_non_hermitian():
    with pytest.raises(ContractError):
        bracket(OperatorSum.pauli(1, "X", 1j), single(1, 1, "Z"))


@given(operators(), st.data())
def test_hs_inner_is_normalized_trace(a, data):
    b = data.draw(operators(n=a.n_qubits))
    d = 1 << a.n_qubits
    expected = np.trace(to_matrix(a).conj().T @ to_matrix(b)) / d
    assert abs(hs_inner(a, b) - expected) < 1e-12


@given(operators())
def test_matrix_round_trip(a):
    assert from_matrix(to_matrix(a)).allclose(a)


@given(operators())
def test_text_round_trip(a):
    assert parse(render(a), a.n_qubits).allclose(a, atol=0)


def test_render_format():
    op = OperatorSum.pauli(2, "ZZ") - OperatorSum.pauli(2, {1: "X"}, 0.5)
    assert render(op) == "+1.0 Z1 Z2 -0.5 X1"
    assert parse("+1.0 Z1 Z2 −0.5 X1").allclose(op)
    assert render(OperatorSum.zero(3)) == "0"


def test_parse_errors():
    with pytest.raises(ContractError):
        parse("+1.0 X1 X1")
    with pytest.raises(ContractError):
        parse("+1.0 Q1")
    with pytest.raises(DimensionError):
        parse("X3", 2)


@given(operators())
def test_ladder_expansion_round_trip(a):
    assert to_ladder(a).expand().allclose(a, atol=1e-12)


def test_ladder_forms_of_single_paulis():
    assert {str(t) for t in to_ladder(single(1, 1, "Z")).terms} == {"+1.0 1", "-2.0 n1"}
    tx2 = OperatorSum.pauli(2, "XX") + OperatorSum.pauli(2, "YY")
    kinds = sorted(tuple(f[1] for f in t.factors) for t in to_ladder(tx2).terms)
    assert kinds == [("+", "-"), ("-", "+")]


@pytest.mark.parametrize("word,grade", [
    ("ZI", Grade.NUMBER_CONSERVING),
    ("ZZ", Grade.NUMBER_CONSERVING),
    ("ZX", Grade.ODD),
    ("XI", Grade.ODD),
])
def test_grading_of_words(word, grade):
    assert grading(OperatorSum.pauli(2, word)).overall is grade


def test_grading_exchange_terms():
    t = (OperatorSum.pauli(2, "XX") + OperatorSum.pauli(2, "YY")) / 2
    r = (OperatorSum.pauli(2, "XX") - OperatorSum.pauli(2, "YY")) / 2
    assert grading(t).overall is Grade.NUMBER_CONSERVING
    assert grading(r).overall is Grade.PARITY_EVEN
    assert grading(t + single(2, 1, "X")).overall is Grade.MIXED


def test_number_and_parity_operators():
    n = to_matrix(total_number(3)).real
    np.testing.assert_allclose(np.diag(n), [bin(k).count("1") for k in range(8)])
    p = to_matrix(parity(2)).real
    np.testing.assert_allclose(np.diag(p), [1, -1, -1, 1])


def test_dense_cap():
    with pytest.raises(ResourceError):
        to_matrix(single(5, 1, "X"), dense_cap=4)


def test_size_mismatch():
    with pytest.raises(DimensionError):
        single(1, 1, "X") + single(2, 1, "X")


@given(pauli_strings(3), pauli_strings(3))
def test_commutation_rule(p, q):
    a, b = OperatorSum(3, {p: 1}), OperatorSum(3, {q: 1})
    assert p.commutes_with(q) == commutator(a, b).is_zero()
