import pytest
from hypothesis import given, strategies as st

from siegeltheta.core import ValidationError, odd_primes
from siegeltheta.cycle import (
    CongruenceExcluded, IndeterminateStep, LowPoint, UnsupportedClosedForm, cycle_closed_form,
    cycle_solver, is_trigger, k0_of, selector, validate_cycle_input, walk,
)


def admissible_k0(p):
    return [k0 for k0 in range(1, p + 1) if k0 not in (1, (p + 3) // 2, p)]


CASE = {(1, 1): lambda p: 0, (1, 2): lambda p: (p + 3) // 2,
        (2, 1): lambda p: (p - 3) // 2, (2, 2): lambda p: 0}


def check_cycle(res):
    """Self-consistency of an r = 1 non-semi-ordinary cycle."""
    p, k = res.p, res.k
    assert len(res.values) == (p - 1) // 2
    assert res.values[-1] == k
    lows = res.low_points
    assert sum(lp.low_number for lp in lows) == (p - 1) // 2
    assert sum(lp.jumping_number for lp in lows) == (p + 1) // 2
    values, _ = walk(p, k, res.structure())
    assert tuple(values) == res.values
    for lp in lows:
        shift = 0 if lp.type == 1 else (p + 3) // 2
        assert (lp.anchor - lp.jumping_number - shift) % p == 0
    # consecutive pairs, read cyclically
    for i in range(len(lows) if len(lows) > 1 else 0):
        prev, nxt = lows[i], lows[(i + 1) % len(lows)]
        assert (nxt.low_number + prev.jumping_number - CASE[(prev.type, nxt.type)](p)) % p == 0


def test_validate_examples():
    with pytest.raises(CongruenceExcluded) as info:
        validate_cycle_input(7, 1, 12)
    assert info.value.details["k0"] == 5
    validate_cycle_input(7, 1, 13)
    validate_cycle_input(2, 1, 1)
    validate_cycle_input(7, 1, 12, semi_ordinary=True)
    for bad in [(4, 1, 3), (7, -1, 3), (7, 1, 0)]:
        with pytest.raises(ValidationError):
            validate_cycle_input(*bad)


@pytest.mark.parametrize("args, values, lows", [
    ((5, 1, 13), (19, 13), [(1, 2, 3)]),
    ((7, 1, 13), (3, 11, 13), [(1, 1, 3), (2, 2, 1)]),
    ((7, 1, 10), (18, 20, 10), [(2, 2, 1), (1, 1, 3)]),
])
def test_closed_form_examples(args, values, lows):
    res = cycle_closed_form(*args)
    assert res.values == values
    assert [(lp.type, lp.low_number, lp.jumping_number) for lp in res.low_points] == lows
    assert res.provenance == "closed_form"


def test_degenerate_examples():
    assert cycle_closed_form(2, 1, 9).values == (11,)
    assert cycle_closed_form(2, 0, 4).values == (6,)
    res = cycle_closed_form(5, 3, 10)
    assert res.values == (20, 30) and res.provenance == "degenerate"
    assert cycle_closed_form(7, 2, 5).values == (19, 33, 47)


def test_semi_ordinary_examples():
    assert cycle_closed_form(5, 1, 11, semi_ordinary=True).values == (17, 23)
    with pytest.raises(IndeterminateStep):
        cycle_closed_form(7, 1, 13, semi_ordinary=True)  # k0 = 6, p | k0 + 1
    with pytest.raises(IndeterminateStep):
        cycle_closed_form(7, 1, 11, semi_ordinary=True)  # k0 = 4, p | 2k0 - 1


def test_r0_has_no_closed_form():
    with pytest.raises(UnsupportedClosedForm):
        cycle_closed_form(5, 0, 7)


@pytest.mark.parametrize("p", odd_primes(97))
def test_closed_form_self_consistency(p):
    for k0 in admissible_k0(p):
        for a in (0, 1, 4):
            check_cycle(cycle_closed_form(p, 1, a * p + k0))


@pytest.mark.parametrize("p", odd_primes(97))
def test_excluded_residues(p):
    for k0 in set(range(1, p + 1)) - set(admissible_k0(p)):
        with pytest.raises(CongruenceExcluded):
            cycle_closed_form(p, 1, 2 * p + k0)


@pytest.mark.parametrize("p", [q for q in odd_primes(47) if q >= 5])
def test_solver_matches_closed_form(p):
    for k0 in admissible_k0(p):
        k = 2 * p + k0
        sols = cycle_solver(p, 1, k)
        assert len(sols) == 1
        cf = cycle_closed_form(p, 1, k)
        assert sols[0].values == cf.values and sols[0].low_points == cf.low_points
        assert len(sols[0].low_points) <= 2


@pytest.mark.parametrize("p", odd_primes(31))
def test_solver_finds_nothing_on_excluded_residues(p):
    for k0 in (1, (p + 3) // 2, p):
        assert cycle_solver(p, 1, 3 * p + k0) == []


def test_solver_p3_collision_is_flagged():
    sols = cycle_solver(3, 1, 5)
    assert len(sols) == 2
    assert {lp.type for s in sols for lp in s.low_points} == {1, 2}
    assert all("ambiguous" in s.flags for s in sols)
    assert "ambiguous_type" in cycle_closed_form(3, 1, 5).flags


def test_solver_example_p5():
    (sol,) = cycle_solver(5, 1, 13)
    assert sol.values == (19, 13)
    assert sol.low_points == (LowPoint(1, 2, 3, 13),)
    assert sol.provenance == "solver"


@pytest.mark.parametrize("p", odd_primes(47))
def test_semi_ordinary_reduction(p):
    for k0 in range(1, p + 1):
        if (k0 + 1) * (2 * k0 - 1) % p == 0:
            continue
        k = 3 * p + k0
        semi = cycle_closed_form(p, 1, k, semi_ordinary=True)
        assert len(semi.values) == (p - 1) // 2
        if k0 == p:
            # Theta(f) sits on k0 = 1, which carries no low-point structure
            assert semi.flags == ("no_low_point_structure",)
            with pytest.raises(CongruenceExcluded):
                cycle_closed_form(p, 1, k + p + 1)
            continue
        g = cycle_closed_form(p, 1, k + p + 1)
        assert semi.values == (k + p + 1,) + g.values[:-1]
        assert semi.low_points == g.low_points
        sols = cycle_solver(p, 1, k, semi_ordinary=True)
        assert {s.values for s in sols} == {semi.values}


def test_semi_indeterminate_candidates():
    p, k = 7, 13
    sols = cycle_solver(p, 1, k, semi_ordinary=True)
    assert sols and all("candidate" in s.flags for s in sols)
    for s in sols:
        b = int(next(f for f in s.flags if f.startswith("first_drop=")).split("=")[1])
        assert s.values[0] == k + (p + 1) - b * (p - 1)
        assert (s.values[0] - b) % p == 0  # p | k0 + 1 branch


def test_solver_r0_carries_caveat():
    sols = cycle_solver(7, 0, 15)
    for s in sols:
        assert "r0_deferred" in s.flags and "caveat" in s.to_dict()
        assert s.values[-1] == 15


def test_solver_preconditions():
    with pytest.raises(ValidationError):
        cycle_solver(2, 1, 5)
    with pytest.raises(ValidationError):
        cycle_solver(5, 2, 5)


def test_trigger_predicates():
    assert is_trigger(7, 1, 13, 1) and not is_trigger(7, 1, 13, 2)
    assert is_trigger(7, 1, 11, 2)


@pytest.mark.parametrize("p, w, expected", [(7, 10, (2, False)), (5, 3, (1, True)), (5, 0, (0, False))])
def test_selector_examples(p, w, expected):
    assert selector(p, w) == expected


@pytest.mark.parametrize("p", odd_primes(97))
def test_selector_totality(p):
    half = (p - 1) // 2
    seen = set()
    for w in range(p - 1):
        j, flag = selector(p, w)
        assert 0 <= j < half
        assert (2 * j + flag - w) % (p - 1) == 0
        seen.add((j, flag))
    assert len(seen) == p - 1


@given(st.sampled_from(odd_primes(97)), st.integers(-10**6, 10**6))
def test_selector_periodic(p, w):
    assert selector(p, w) == selector(p, w + (p - 1))


@given(st.sampled_from(odd_primes(97)), st.integers(1, 10**5))
def test_k0_range(p, k):
    k0 = k0_of(p, k)
    assert 1 <= k0 <= p and (k - k0) % p == 0


def test_result_serialization():
    d = cycle_closed_form(7, 1, 13).to_dict()
    assert d["values"] == [3, 11, 13] and d["provenance"] == "closed_form"
    assert d["low_points"][0] == {"type": 1, "low_number": 1, "jumping_number": 3, "anchor": 3}
