import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kufpmul.bitvec import (
    UBits,
    WidthError,
    add_carry_save,
    add_carry_select,
    add_ripple,
    concat,
    shift_left,
    shift_right,
    slice_bits,
    sub_borrow,
)


def int_add(a, b, w):
    s = a + b
    return s & ((1 << w) - 1), s >> w


def int_sub(a, b, w):
    return (a - b) % (1 << w), int(a < b)


def test_ubits_rejects_out_of_range():
    with pytest.raises(WidthError):
        UBits(4, 16)
    with pytest.raises(WidthError):
        UBits(0, 0)
    with pytest.raises(WidthError):
        UBits(3, -1)


@pytest.mark.parametrize("a,b,expected", [
    (0b0000, 0b0000, (0b0000, 0)),
    (0b1111, 0b0001, (0b0000, 1)),
    (0b0101, 0b0011, (0b1000, 0)),
])
def test_add_ripple_examples(a, b, expected):
    assert int_add(a, b, 4) == expected
    s, c = add_ripple(UBits(4, a), UBits(4, b))
    assert (s.value, c) == expected
    assert s.width == 4


@pytest.mark.parametrize("a,b,expected", [
    (0b1000, 0b0011, (0b0101, 0)),
    (0b0011, 0b1000, (0b1011, 1)),
])
def test_sub_borrow_examples(a, b, expected):
    assert int_sub(a, b, 4) == expected
    d, bo = sub_borrow(UBits(4, a), UBits(4, b))
    assert (d.value, bo) == expected


@given(st.integers(1, 130).flatmap(lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1))))
def test_self_subtraction(wx):
    w, x = wx
    d, bo = sub_borrow(UBits(w, x), UBits(w, x))
    assert (d.value, bo) == (0, 0)


@pytest.mark.parametrize("op", [add_ripple, sub_borrow, add_carry_select])
def test_width_mismatch(op):
    with pytest.raises(WidthError):
        op(UBits(4, 1), UBits(5, 1))


def test_adders_exhaustive_up_to_8_bits():
    for w in range(1, 9):
        top = 1 << w
        for a in range(top):
            for b in range(top):
                x, y = UBits(w, a), UBits(w, b)
                r = add_ripple(x, y)
                assert (r[0].value, r[1]) == int_add(a, b, w)
                cs = add_carry_select(x, y)
                assert (cs[0].value, cs[1]) == (r[0].value, r[1])
                d = sub_borrow(x, y)
                assert (d[0].value, d[1]) == int_sub(a, b, w)


@pytest.mark.parametrize("a,b,expected", [(0xFF, 0x01, (0x00, 1)), (0xA5, 0x5A, (0xFF, 0))])
def test_carry_select_examples(a, b, expected):
    assert int_add(a, b, 8) == expected
    s, c = add_carry_select(UBits(8, a), UBits(8, b))
    assert (s.value, c) == expected


@given(st.integers(1, 128).flatmap(
    lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1), st.integers(0, (1 << w) - 1), st.integers(0, 1))))
def test_wide_adders_match_integers(args):
    w, a, b, cin = args
    s, c = add_ripple(UBits(w, a), UBits(w, b), cin)
    assert c * (1 << w) + s.value == a + b + cin
    assert add_carry_select(UBits(w, a), UBits(w, b), cin) == (s, c)


def test_carry_save_examples():
    s, c = add_carry_save([UBits(4, 0)] * 3)
    assert (s.value, c.value) == (0, 0)
    s, c = add_carry_save([UBits(2, 0b01)] * 3)
    assert s.value + 2 * c.value == 3
    s, c = add_carry_save([UBits(2, 0b11)] * 4)
    assert s.value + 2 * c.value == 12


def test_carry_save_needs_three():
    with pytest.raises(WidthError):
        add_carry_save([UBits(4, 1), UBits(4, 2)])
    with pytest.raises(WidthError):
        add_carry_save([UBits(4, 1), UBits(4, 2), UBits(5, 3)])


def test_carry_save_redundant_form_randomized():
    r = random.Random(7)
    for _ in range(100_000):
        w = r.randint(1, 64)
        k = r.randint(3, 9)
        ops = [r.getrandbits(w) for _ in range(k)]
        s, c = add_carry_save([UBits(w, v) for v in ops])
        assert s.value + 2 * c.value == sum(ops)


def test_slice_concat_shift_examples():
    assert slice_bits(UBits(4, 0b1101), 3, 2) == UBits(2, 0b11)
    assert concat(UBits(2, 0b11), UBits(2, 0b01)) == UBits(4, 0b1101)
    assert shift_left(UBits(3, 0b001), 2, 5) == UBits(5, 0b00100)
    assert shift_left(UBits(4, 0b1001), 1) == UBits(4, 0b0010)
    assert shift_right(UBits(4, 0b1001), 3) == UBits(4, 0b0001)


@pytest.mark.parametrize("hi,lo", [(4, 0), (2, 3), (-1, 0), (3, -1)])
def test_slice_out_of_range(hi, lo):
    with pytest.raises(WidthError):
        slice_bits(UBits(4, 5), hi, lo)


@given(st.integers(2, 130).flatmap(
    lambda w: st.tuples(st.just(w), st.integers(0, (1 << w) - 1), st.integers(1, w - 1))))
def test_slice_concat_round_trip(args):
    w, x, m = args
    a = UBits(w, x)
    assert concat(slice_bits(a, w - 1, m), slice_bits(a, m - 1, 0)) == a


def test_shift_left_cannot_narrow():
    with pytest.raises(WidthError):
        shift_left(UBits(8, 1), 1, 4)


def test_ubits_is_hashable_and_immutable():
    a = UBits(8, 3)
    assert {a: 1}[UBits(8, 3)] == 1
    with pytest.raises(AttributeError):
        a.value = 4
