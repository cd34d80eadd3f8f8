import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_letters, dense, dense_of, pauli_pair, pauli_strategy
from paulipart.errors import (
    EmptyString,
    InvalidCharacter,
    LengthMismatch,
    NonHermitianProduct,
    ParseError,
)
from paulipart.pauli import (
    Hamiltonian,
    HamiltonianTerm,
    PauliString,
    all_pauli_strings,
    anticommuting_mask,
    commutes_gc,
    commutes_qwc,
    format_hamiltonian,
    multiply,
    parse_hamiltonian,
    parse_pauli,
    product,
)


def test_letters_round_trip():
    for s in all_letters(3, include_identity=True):
        assert parse_pauli(s).letters == s


def test_bit_layout_qubit_zero_is_leftmost():
    p = parse_pauli("XZY")
    assert p.letter(0) == "X" and p.letter(1) == "Z" and p.letter(2) == "Y"
    assert (p.z, p.x) == (0b110, 0b101)


def test_signed_parse_and_str():
    assert str(parse_pauli("-XX")) == "-XX"
    assert parse_pauli("+ZZ").sign == 1
    assert (-parse_pauli("YI")).sign == -1


def test_parse_errors():
    with pytest.raises(InvalidCharacter) as info:
        parse_pauli("XQZ")
    assert info.value.position == 1 and info.value.char == "Q"
    with pytest.raises(EmptyString):
        parse_pauli("")
    with pytest.raises(EmptyString):
        parse_pauli("-")


def test_properties():
    p = parse_pauli("IXYZ")
    assert p.weight == 3 and p.y_count == 1 and p.support == 0b1110
    assert not p.is_diagonal()
    assert parse_pauli("IZZI").is_diagonal()
    assert parse_pauli("III").is_identity()


def test_commutation_examples():
    assert commutes_qwc(parse_pauli("IZ"), parse_pauli("ZI"))
    assert not commutes_qwc(parse_pauli("XX"), parse_pauli("YY"))
    assert commutes_gc(parse_pauli("XX"), parse_pauli("YY"))
    assert not commutes_gc(parse_pauli("XI"), parse_pauli("ZI"))
    with pytest.raises(LengthMismatch):
        commutes_gc(parse_pauli("X"), parse_pauli("XX"))


@settings(max_examples=300, deadline=None)
@given(pauli_pair(n_max=4))
def test_gc_matches_dense_commutator(pair):
    a, b = pair
    ma, mb = dense_of(a), dense_of(b)
    assert commutes_gc(a, b) == np.allclose(ma @ mb, mb @ ma)


@settings(max_examples=300, deadline=None)
@given(pauli_pair(n_max=4))
def test_qwc_is_letterwise_commutation(pair):
    a, b = pair
    per_letter = all(
        np.allclose(dense(x) @ dense(y), dense(y) @ dense(x)) for x, y in zip(a.letters, b.letters)
    )
    assert commutes_qwc(a, b) == per_letter
    if commutes_qwc(a, b):
        assert commutes_gc(a, b)
    assert anticommuting_mask(a, b) == anticommuting_mask(b, a)


@settings(max_examples=300, deadline=None)
@given(pauli_pair(n_max=4, signed=True))
def test_multiply_matches_dense_product(pair):
    a, b = pair
    if commutes_gc(a, b):
        c = multiply(a, b)
        assert np.allclose(dense_of(c), dense_of(a) @ dense_of(b))
    else:
        with pytest.raises(NonHermitianProduct):
            multiply(a, b)


def test_product_examples():
    assert str(multiply(parse_pauli("XX"), parse_pauli("ZZ"))) == "-YY"
    pair = [parse_pauli(s) for s in ("IYX", "ZZZ")]
    assert str(product(pair, 3)) == "ZXY"
    triple = pair + [parse_pauli("XIX")]
    assert product(triple, 3).letters == "YXZ"


@given(pauli_strategy(signed=True)())
def test_self_product_is_identity(p):
    sq = multiply(p, p)
    assert sq.is_identity() and sq.sign == 1


def test_hamiltonian_merges_duplicates_in_order():
    h = Hamiltonian(2, [HamiltonianTerm(1.0, parse_pauli("XX")), HamiltonianTerm(0.5, parse_pauli("ZZ")),
                        HamiltonianTerm(2.0, parse_pauli("XX"))])
    assert [t.pauli.letters for t in h] == ["XX", "ZZ"]
    assert h.coefficients == [3.0, 0.5]
    assert h.index_of(parse_pauli("ZZ")) == 1


def test_hamiltonian_term_rejects_signed_string_and_nan():
    with pytest.raises(ValueError):
        HamiltonianTerm(1.0, parse_pauli("-XX"))
    with pytest.raises(ValueError):
        HamiltonianTerm(float("nan"), parse_pauli("XX"))


def test_from_pairs_folds_sign():
    h = Hamiltonian.from_pairs([(2.0, "-XY")])
    assert h[0].coefficient == -2.0 and h[0].pauli.letters == "XY"
    assert str(h[0].signed_pauli) == "-XY"


def test_parse_hamiltonian_and_format_round_trip():
    text = "# comment\n0.5 XZ\n\n-1.25 ZZ\n"
    h = parse_hamiltonian(text)
    again = parse_hamiltonian(format_hamiltonian(h))
    assert again.paulis == h.paulis and again.coefficients == h.coefficients


@pytest.mark.parametrize("text, line", [
    ("0.5 XX\nbogus\n", 2),
    ("0.5 XX\nabc ZZ\n", 2),
    ("0.5 XX\n1 ZZZ\n", 2),
    ("1 XQ\n", 1),
    ("1 XX\ninf ZZ\n", 2),
])
def test_parse_hamiltonian_reports_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_hamiltonian(text)
    assert info.value.line == line
    assert str(info.value).startswith(f"line {line}:")


def test_parse_hamiltonian_empty():
    with pytest.raises(ParseError):
        parse_hamiltonian("# nothing\n\n")


def test_all_pauli_strings_order():
    strings = [p.letters for p in all_pauli_strings(2, include_identity=False)]
    assert strings == all_letters(2)
    assert len(all_pauli_strings(3)) == 64


def test_identity_and_single():
    assert PauliString.identity(3).letters == "III"
    assert PauliString.single(3, 1, "Y").letters == "IYI"


@given(st.integers(1, 6), st.data())
def test_pauli_is_hashable_value(n, data):
    p = data.draw(pauli_strategy()(n=n))
    assert parse_pauli(str(p)) == p
