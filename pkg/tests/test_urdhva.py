import pytest
from hypothesis import given
from hypothesis import strategies as st

from kufpmul.bitvec import UBits, WidthError
from kufpmul.urdhva import (
    PartialTerms4,
    assemble_product_4x4,
    cascade_adder_count,
    partial_terms_4x4,
    urdhva_4x4_fig5,
    urdhva_cascade,
    urdhva_n,
    urdhva_trace,
)


def column_sums_bruteforce(a, b, n):
    """Every (i, j) pair, dropped into bucket i + j."""
    t = [0] * (2 * n - 1)
    for i in range(n):
        for j in range(n):
            t[i + j] += ((a >> i) & 1) * ((b >> j) & 1)
    return t


def terms(a, b):
    return [t.value for t in partial_terms_4x4(UBits(4, a), UBits(4, b)).terms()]


def test_column_oracle_values():
    assert column_sums_bruteforce(0b1111, 0b1111, 4) == [1, 2, 3, 4, 3, 2, 1]


def test_partial_terms_examples():
    for b in range(16):
        assert terms(0, b) == [0] * 7
    assert terms(0b1111, 0b1111) == [1, 2, 3, 4, 3, 2, 1]
    assert terms(0b0001, 0b0001) == [1, 0, 0, 0, 0, 0, 0]


def test_partial_terms_exhaustive_and_widths():
    for a in range(16):
        for b in range(16):
            pt = partial_terms_4x4(UBits(4, a), UBits(4, b))
            assert [t.value for t in pt.terms()] == column_sums_bruteforce(a, b, 4)
            assert [t.width for t in pt.terms()] == [1, 2, 2, 3, 2, 2, 1]
            assert pt.t0.value == (a & 1) & (b & 1)
            assert pt.t6.value == (a >> 3) & (b >> 3) & 1


def test_partial_terms_rejects_bad_widths():
    with pytest.raises(WidthError):
        partial_terms_4x4(UBits(5, 1), UBits(5, 1))
    with pytest.raises(WidthError):
        PartialTerms4(*(UBits(2, 0) for _ in range(7)))


@pytest.mark.parametrize("a,b,expected", [(0, 0, 0), (0b1111, 0b1111, 0b11100001), (0b1010, 0b0101, 50)])
def test_assemble_examples(a, b, expected):
    assert a * b == expected
    assert assemble_product_4x4(partial_terms_4x4(UBits(4, a), UBits(4, b))) == UBits(8, expected)


def test_cascade4_examples():
    for y in range(16):
        assert urdhva_4x4_fig5(UBits(4, 0), UBits(4, y)).value == 0
    assert urdhva_4x4_fig5(UBits(4, 0b1111), UBits(4, 0b1111)) == UBits(8, 0b11100001)


def test_cascade4_exhaustive_against_integers_and_row_form():
    for a in range(16):
        for b in range(16):
            x, y = UBits(4, a), UBits(4, b)
            structural = urdhva_4x4_fig5(x, y)
            behavioral = assemble_product_4x4(partial_terms_4x4(x, y))
            assert structural == behavioral == UBits(8, a * b)


def test_cascade4_rejects_other_widths():
    with pytest.raises(WidthError):
        urdhva_4x4_fig5(UBits(8, 1), UBits(8, 1))


def test_cascade4_has_six_adders_with_carry_save_in_2_to_5():
    tr = urdhva_trace(UBits(4, 0b1111), UBits(4, 0b1111))
    assert [s.column for s in tr.adders] == [1, 2, 3, 4, 5, 6]
    assert [s.carry_save for s in tr.adders] == [False, True, True, True, True, False]
    # p1..p6 are the adder LSBs, p7 the last adder's carry
    product = 1 | sum(s.product_bit << s.column for s in tr.adders) | (tr.adders[-1].carry_out << 7)
    assert product == 225
    # adder k+1 receives everything above the LSB of adder k
    for prev, nxt in zip(tr.adders, tr.adders[1:]):
        assert nxt.carry_in == prev.total >> 1


def test_adder_widths_cover_worst_case_columns():
    tr = urdhva_trace(UBits(4, 0b1111), UBits(4, 0b1111))
    # column 3: four products plus the carry from adder 2
    assert tr.adders[2].width == 3
    for s in tr.adders:
        assert s.total < (1 << s.width)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 7])
def test_urdhva_n_exhaustive_small(n):
    for a in range(1 << n):
        for b in range(1 << n):
            assert urdhva_n(UBits(n, a), UBits(n, b)) == UBits(2 * n, a * b)
            assert urdhva_cascade(UBits(n, a), UBits(n, b)).value == a * b


def test_urdhva_n_examples():
    assert urdhva_n(UBits(1, 1), UBits(1, 1)) == UBits(2, 0b01)
    assert urdhva_n(UBits(8, 0xFF), UBits(8, 0xFF)) == UBits(16, 0xFE01)


@pytest.mark.slow
def test_urdhva_8x8_structural_exhaustive():
    for a in range(256):
        x = UBits(8, a)
        for b in range(256):
            assert urdhva_n(x, UBits(8, b)).value == a * b


def test_urdhva_n_rejects_wide_and_mismatched():
    with pytest.raises(WidthError):
        urdhva_n(UBits(9, 1), UBits(9, 1))
    with pytest.raises(WidthError):
        urdhva_n(UBits(4, 1), UBits(5, 1))


@given(st.integers(1, 8).flatmap(
    lambda n: st.tuples(st.just(n), st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1))))
def test_commutative(args):
    n, a, b = args
    assert urdhva_n(UBits(n, a), UBits(n, b)) == urdhva_n(UBits(n, b), UBits(n, a))


@pytest.mark.parametrize("n", range(1, 9))
def test_max_value_bound(n):
    top = (1 << n) - 1
    assert urdhva_n(UBits(n, top), UBits(n, top)).value == (1 << 2 * n) - (1 << (n + 1)) + 1


@pytest.mark.parametrize("n", range(1, 9))
def test_cascade_uses_2n_minus_2_adders(n):
    assert cascade_adder_count(n) == 2 * n - 2


def test_trace_terms_match_partial_terms():
    tr = urdhva_trace(UBits(4, 0b1011), UBits(4, 0b0110))
    assert tr.terms == terms(0b1011, 0b0110)
    assert tr.product == 0b1011 * 0b0110
    lines = tr.lines()
    assert lines[1].strip() == " ".join(f"t{k}={t}" for k, t in enumerate(tr.terms))
