import pytest
from hypothesis import given, strategies as st

from siegeltheta.core import (
    FpElem, IndexOutOfRange, ParameterMismatch, ThetaError, TMatrix, ValidationError, Weight,
    check_prime, delta_p, det_t, is_prime, m_shift, odd_primes, psd_matrices,
    theta_target_weight, weight_lex_le,
)

primes = st.sampled_from([2, 3, 5, 7, 11, 13, 97])
weights = st.tuples(st.integers(-20, 60), st.integers(0, 8)).map(lambda t: Weight(t[0] + t[1], t[0]))


@pytest.mark.parametrize("p, w, expected", [
    (2, Weight(5, 3), Weight(0, 0)),
    (5, Weight(4, 4), Weight(4, 4)),
    (5, Weight(7, 4), Weight(8, 8)),
])
def test_m_shift_examples(p, w, expected):
    assert m_shift(p, w) == expected


@pytest.mark.parametrize("p, w, expected", [
    (5, Weight(4, 4), Weight(10, 10)),
    (2, Weight(3, 2), Weight(5, 4)),
    (7, Weight(10, 3), Weight(24, 17)),
])
def test_theta_target_weight_examples(p, w, expected):
    assert theta_target_weight(p, w) == expected


def test_weight_lex_le_examples():
    assert weight_lex_le(Weight(5, 3), Weight(4, 4))
    assert weight_lex_le(Weight(5, 3), Weight(5, 3))
    assert not weight_lex_le(Weight(9, 4), Weight(6, 4))


def test_det_examples():
    assert det_t(TMatrix(1, 1, 1)) == 3
    assert det_t(TMatrix(0, 0, 0)) == 0
    assert det_t(TMatrix(2, 1, 1)) == 7


def test_delta_p_examples():
    assert delta_p(5, 0, 0) == Weight(4, 4)
    assert delta_p(5, 1, 0) == Weight(0, 0)
    assert delta_p(2, 3, 3) == Weight(1, 1)


def test_weight_rejects_k1_below_k2():
    with pytest.raises(ValidationError):
        Weight(2, 3)
    assert Weight(-1, -4).r == 3


def test_prime_checks():
    assert [q for q in range(30) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert odd_primes(13) == [3, 5, 7, 11, 13]
    for bad in (1, 4, 9, 2.0, True, "5"):
        with pytest.raises(ValidationError):
            check_prime(bad)


def test_error_hierarchy():
    assert issubclass(ParameterMismatch, ValidationError)
    assert issubclass(IndexOutOfRange, IndexError)
    err = ValidationError("bad", p=4)
    assert err.to_dict() == {"code": "ValidationError", "message": "bad", "details": {"p": 4}}
    assert isinstance(err, ThetaError) and isinstance(err, ValueError)


def test_psd_enumeration_counts():
    mats = list(psd_matrices(2))
    assert mats == sorted(mats)
    assert all(t.is_psd() and t.trace <= 2 for t in mats)
    # brute force over a box
    box = [TMatrix(a, b, c) for a in range(3) for c in range(3) for b in range(-5, 6)
           if a + c <= 2 and 4 * a * c - b * b >= 0]
    assert set(mats) == set(box)


def test_tmatrix_serialization():
    t = TMatrix(2, -3, 5)
    assert TMatrix.from_list(t.to_list()) == t
    with pytest.raises(ValidationError):
        TMatrix.from_list([1, 2])


@given(weights, weights, weights)
def test_lex_order_is_total_and_transitive(w1, w2, w3):
    assert weight_lex_le(w1, w2) or weight_lex_le(w2, w1)
    if weight_lex_le(w1, w2) and weight_lex_le(w2, w1):
        assert w1 == w2
    if weight_lex_le(w1, w2) and weight_lex_le(w2, w3):
        assert weight_lex_le(w1, w3)


@given(primes, weights)
def test_theta_preserves_r_and_shift_class(p, w):
    target = theta_target_weight(p, w)
    assert target.r == w.r
    assert m_shift(p, w) == m_shift(p, target)


@given(st.integers(0, 30), st.integers(-30, 30), st.integers(0, 30))
def test_det_nonnegative_on_psd(a, b, c):
    t = TMatrix(a, b, c)
    if t.is_psd():
        assert det_t(t) >= 0


@given(st.sampled_from([3, 5, 7, 13]), st.integers(-100, 100), st.integers(-100, 100))
def test_fp_field_axioms(p, x, y):
    a, b = FpElem(x, p), FpElem(y, p)
    assert 0 <= a.value < p
    assert a + b == (x + y)
    assert a * b == x * y
    assert a - b + b == a
    if a.value:
        assert a * a.inverse() == 1
        assert (b / a) * a == b


def test_fp_mixed_moduli_rejected():
    with pytest.raises(ParameterMismatch):
        FpElem(1, 5) + FpElem(1, 7)
    with pytest.raises(ZeroDivisionError):
        FpElem(0, 5).inverse()
