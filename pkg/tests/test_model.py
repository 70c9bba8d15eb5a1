import json

import pytest
from hypothesis import given, strategies as st

from anisoqc.encoding import r_ops, t_ops
from anisoqc.errors import ContractError, SpecParseError
from anisoqc.model import (
    ControlSchedule,
    Segment,
    block_form,
    build_operator,
    dm_term,
    exchange_form,
    from_exchange,
    parameter_generator,
    parse_spec,
    render_spec,
    validate_schedule,
)
from anisoqc.pauli import Grade, OperatorSum, grading, product, single

P = OperatorSum.pauli
SAMPLE = "qubits 2\nqubit 1 eps=1.0\nqubit 2 eps=0.4\nbond 1 2 Jx=1.0 Jy=1.0 Jz=0.0"


def test_parse_exchange_form():
    s = parse_spec(SAMPLE)
    ex = exchange_form(s)[(1, 2)]
    assert (ex.delta, ex.j, ex.jz) == (0.0, 2.0, 0.0)


def test_parse_dm():
    s = parse_spec("qubits 2\ndm 1 2 dx=0.01 dy=0 dz=0")
    assert s.dm[0].d == (0.01, 0.0, 0.0)


def test_parse_exchange_keys():
    s = parse_spec("qubits 2\nbond 1 2 J=1.0 Delta=0.2 Jz=0.1")
    c = s.couplings[0]
    assert (c.jx, c.jy, c.jz) == (0.6, 0.4, 0.1)


@pytest.mark.parametrize("text,kind,line", [
    ("qubits 2\nbond 1 1 Jx=1", "index", 2),
    ("qubits 2\nbond 1 3 Jx=1", "index", 2),
    ("qubits 2\nbond 1 2 Jx=1\nbond 1 2 Jy=1", "duplicate", 3),
    ("qubits 2\nqubit 1 eps=abc", "syntax", 2),
    ("qubit 1 eps=1", "syntax", 1),
    ("qubits 2\nfrobnicate 1", "syntax", 2),
    ("qubits 2\ncontrol eps_7", "index", 2),
    ("qubits 2\nqubit 1 eps=1 eps=2", "duplicate", 2),
])
def test_parse_errors(text, kind, line):
    with pytest.raises(SpecParseError) as info:
        parse_spec(text)
    assert info.value.kind == kind
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}, column ")


def test_parse_error_column():
    with pytest.raises(SpecParseError) as info:
        parse_spec("qubits 2\nbond 1 2 Jx=oops")
    assert info.value.column == 13


@st.composite
def specs(draw):
    n = draw(st.integers(1, 4))
    num = st.floats(-3, 3, allow_nan=False).map(lambda v: round(v, 3))
    lines = [f"qubits {n}"]
    for i in range(1, n + 1):
        if draw(st.booleans()):
            lines.append(f"qubit {i} eps={draw(num)} fx={draw(num)} fy={draw(num)}")
    for i in range(1, n):
        if draw(st.booleans()):
            lines.append(f"bond {i} {i + 1} Jx={draw(num)} Jy={draw(num)} Jz={draw(num)}")
        if draw(st.booleans()):
            lines.append(f"dm {i} {i + 1} dx={draw(num)} dy={draw(num)} dz={draw(num)}")
    return "\n".join(lines) + "\n"


@given(specs())
def test_render_parse_fixed_point(text):
    s = parse_spec(text)
    once = render_spec(s)
    assert parse_spec(once) == s
    assert render_spec(parse_spec(once)) == once


@given(specs())
def test_operator_is_hermitian(text):
    assert build_operator(parse_spec(text)).is_hermitian()


def test_build_operator_examples():
    s = parse_spec("qubits 2\nqubit 1 eps=1\nbond 1 2 Jx=1 Jy=1\ndm 1 2 dx=1")
    zero = {k: 0.0 for k in ("eps_1", "eps_2", "fx_1", "fx_2", "fy_1", "fy_2",
                             "Jx_1_2", "Jy_1_2", "Jz_1_2", "dx_1_2", "dy_1_2", "dz_1_2")}
    assert build_operator(s, zero).is_zero()
    assert build_operator(s, {**zero, "eps_1": 1.0}) == single(2, 1, "Z", 0.5)
    d = build_operator(s, {**zero, "dx_1_2": 0.3})
    assert d.allclose(P(2, "YZ", 0.3) - P(2, "ZY", 0.3))
    with pytest.raises(ContractError):
        build_operator(s, {"bogus_1": 1.0})
    with pytest.raises(ContractError):
        build_operator(s, {"J_1_2": 1.0, "Jx_1_2": 1.0})


def test_fields_and_their_sign():
    s = parse_spec("qubits 1\nqubit 1 fx=0.3 fy=0.2")
    assert s.fields == (complex(0.3, -0.2),)
    assert build_operator(s).allclose(single(1, 1, "X", 0.3) + single(1, 1, "Y", 0.2))


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(a, b, c):
    s = parse_spec("qubits 2\nqubit 1 eps=1\nbond 1 2 Jx=1 Jy=1 Jz=1")
    names = ["eps_1", "Jx_1_2", "Jz_1_2"]
    base = {k: 0.0 for k in s.parameter_names() if not k.startswith(("J_", "Delta_"))}
    h = build_operator(s, {**base, names[0]: a, names[1]: b, names[2]: c})
    expected = sum((parameter_generator(s, k) * v for k, v in zip(names, (a, b, c))),
                   OperatorSum.zero(2))
    assert h.allclose(expected, atol=1e-12)


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
def test_exchange_models_stay_parity_even(e1, e2, j, d):
    s = parse_spec("qubits 2\nbond 1 2 Jx=1")
    h = build_operator(s, {"eps_1": e1, "eps_2": e2, "J_1_2": j, "Delta_1_2": d, "Jz_1_2": 0.5})
    assert grading(h).overall in (Grade.NUMBER_CONSERVING, Grade.PARITY_EVEN)


@pytest.mark.parametrize("jx,jy,delta,j", [(1, 1, 0, 2), (1, -1, 2, 0), (0.6, 0.4, 0.2, 1.0)])
def test_exchange_form_table(jx, jy, delta, j):
    s = parse_spec(f"qubits 2\nbond 1 2 Jx={jx} Jy={jy}")
    ex = exchange_form(s)[(1, 2)]
    assert ex.delta == pytest.approx(delta, abs=1e-15) and ex.j == pytest.approx(j, abs=1e-15)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_exchange_round_trip(jx, jy):
    back = from_exchange(jx - jy, jx + jy)
    assert back[0] == pytest.approx(jx, abs=1e-14) and back[1] == pytest.approx(jy, abs=1e-14)


def test_dm_term_axes():
    assert dm_term(2, 1, 2, (0, 0, 1)).allclose(P(2, "XY") - P(2, "YX"))
    assert dm_term(2, 1, 2, (0, 0, 0)).is_zero()


def test_block_form_scalars():
    b = block_form(parse_spec("qubits 2\nqubit 1 eps=1.0\nqubit 2 eps=0.4"))
    assert b.pairs[0].eps_diff == pytest.approx(0.6) and b.pairs[0].eps_sum == pytest.approx(1.4)


def test_block_form_h0_scale():
    b = block_form(parse_spec("qubits 2\nbond 1 2 Jz=1"))
    assert b.h0 == P(2, "ZZ")
    assert b.h0_squares == P(2, "ZZ", 4.0)
    t, r = t_ops(2, 1, 2), r_ops(2, 1, 2)
    shape = product(r["z"], r["z"]) - product(t["z"], t["z"])
    assert shape == P(2, "ZZ", 4.0)
    assert b.h0_scale == 0.25


@pytest.mark.parametrize("text", [
    "qubits 4\nbond 1 2 J=1\nbond 3 4 J=0.7",
    "qubits 4\nqubit 1 eps=0.3 fx=0.1\nqubit 4 eps=-1\nbond 1 2 Jx=1 Jy=0.2 Jz=0.5\n"
    "bond 2 3 Jz=1 Jx=0.1\nbond 3 4 J=2\ndm 1 2 dx=0.01 dy=0.5",
])
def test_block_form_reassembles(text):
    s = parse_spec(text)
    assert block_form(s).reassemble() == build_operator(s) or \
        block_form(s).reassemble().allclose(build_operator(s), atol=1e-15)


def test_block_form_rejects():
    with pytest.raises(ContractError):
        block_form(parse_spec("qubits 3"))
    with pytest.raises(ContractError):
        block_form(parse_spec("qubits 4\nbond 1 3 Jz=1"))


def test_schedule_document_round_trip():
    sched = ControlSchedule((Segment({"eps_1": 1.0}, 0.5), Segment({"J_1_2": -2.0}, 1.5)))
    doc = json.loads(sched.to_json())
    assert doc == [{"assignments": {"eps_1": 1.0}, "duration": 0.5},
                   {"assignments": {"J_1_2": -2.0}, "duration": 1.5}]
    assert ControlSchedule.from_json(sched.to_json()) == sched


def test_schedule_rejects_bad_segments():
    with pytest.raises(ContractError):
        Segment({}, 0.0)
    with pytest.raises(ContractError):
        ControlSchedule.from_document([{"duration": 1}])


def test_validate_schedule():
    s = parse_spec(SAMPLE + "\ncontrol eps_1")
    validate_schedule(s, ControlSchedule((Segment({"eps_1": 3.0, "eps_2": 0.4}, 1.0),)))
    with pytest.raises(ContractError, match="eps_2"):
        validate_schedule(s, ControlSchedule((Segment({"eps_2": 3.0}, 1.0),)))
    with pytest.raises(ContractError, match="nope_1"):
        validate_schedule(s, ControlSchedule((Segment({"nope_1": 3.0}, 1.0),)))


def test_automatic_controls():
    s = parse_spec(SAMPLE)
    assert s.control_names() == ["J_1_2", "eps_1", "eps_2"]
