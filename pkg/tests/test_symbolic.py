import pytest
from hypothesis import given, strategies as st

from siegeltheta.core import IndexOutOfRange
from siegeltheta import symbolic as sy
from siegeltheta.symbolic import F, IntPoly, K, K1, K2, SymPoly, c11, c12, c21, c22, detC

s = SymPoly.symbol


def line(poly, r):
    return sy.on_weight_line(poly, r)


def test_psi1_examples():
    b2, _, _ = sy.psi1_coefficients(0, 0)
    assert b2 == s(F(0, "11")) - s(F(0)) * c11 * K1

    b2, _, _ = sy.psi1_coefficients(2, 2)
    expected = s(F(2, "11")) - s(F(2)) * c11 * K2 - s(F(1)) * c12
    assert line(b2 - expected, 2).is_zero()

    _, _, b0 = sy.psi1_coefficients(1, 0)
    assert b0 == s(F(0, "22")) - s(F(0)) * c22 * K2 - s(F(1)) * c12
    assert all(sym.name != "c21" for sym in b0.symbols())


@pytest.mark.parametrize("r", range(0, 7))
def test_psi1_top_index_b2(r):
    b2, _, _ = sy.psi1_coefficients(r, r)
    top = s(F(r, "11")) - s(F(r)) * c11 * K2 - (s(F(r - 1)) * c12 if r else SymPoly())
    assert line(b2 - top, r).is_zero()


def test_general_r0_examples():
    g = sy.theta_local_general(0, 0)
    det_coeff = g.coefficient(sy.Symbol("detC"), F(0))
    assert det_coeff.subs({"k1": K, "k2": K}) == 2 * K * (2 * K - 1)
    assert g.coefficient(sy.Symbol("c12"), sy.Symbol("c12"), F(0)).subs({"k1": K2}).is_zero()


def test_general_drops_out_of_range_terms():
    g = sy.theta_local_general(3, 0)
    assert sy.f_indices(g) <= {0, 1, 2, 3}
    assert min(sy.f_indices(g)) == 0


def test_special_examples():
    r0 = sy.theta_local_r0()
    assert r0.coefficient(sy.Symbol("detC"), F(0)) == 2 * K * (2 * K - 1)
    r1 = sy.theta_local_r1(1)
    assert r1.coefficient(sy.Symbol("c12"), F(1, "12")) == 2 * (1 + 4 * K)
    block = sy.theta_local_r1(0).filter(lambda m: sy.block_of(m) == "second_order")
    assert block == 4 * s(F(0, "11", "22")) - s(F(0, "12", "12"))


def test_sympoly_diff_examples():
    x = c11 * s(F(0, "12"))
    assert sy.sympoly_diff(x, x).is_zero()
    d = sy.specialize(sy.sympoly_diff(sy.theta_local_general(0, 0), sy.theta_local_r0()), 0)
    assert d.terms and all(sy.block_of(m) == "c_nabla" for m in d.terms)
    d = sy.specialize(sy.sympoly_diff(sy.theta_local_general(1, 1), sy.theta_local_r1(1)), 1)
    assert d.coefficient(sy.Symbol("c12"), F(1, "12")).is_zero()


def test_pole_order_examples():
    for n in range(4):
        assert sy.pole_order(sy.theta_local_general(3, n)) == 2
    assert sy.pole_order(sy.theta_local_r0()) == 1
    assert sy.pole_order(s(F(0, "11")) * 3) == 0


@pytest.mark.parametrize("r", range(0, 7))
def test_pole_order_bounds(r):
    for n in range(r + 1):
        assert sy.pole_order(sy.theta_local_general(r, n)) <= 2
        assert sy.pole_order(sy.derive_theta_local(r, n)) <= 2
    if r <= 1:
        cors = [sy.theta_local_r0()] if r == 0 else [sy.theta_local_r1(0), sy.theta_local_r1(1)]
        assert [sy.pole_order(c) for c in cors] == [1] * len(cors)


@pytest.mark.parametrize("r, n", [(0, 0), (1, 0), (1, 1)])
def test_general_vs_special_asserted_blocks(r, n):
    cor = sy.theta_local_r0() if r == 0 else sy.theta_local_r1(n)
    diff = sy.specialize(sy.theta_local_general(r, n) - cor, r)
    parts = sy.split_blocks(diff)
    for name in sy.ASSERTED_BLOCKS:
        assert parts[name].is_zero(), name
    assert parts["other"].is_zero()


def test_documented_c_nabla_residues():
    # general minus special, at (k1, k2) = (k + r, k)
    d00 = sy.specialize(sy.theta_local_general(0, 0) - sy.theta_local_r0(), 0)
    assert d00 == c12 * s(F(0, "12")) * (4 * K)
    d10 = sy.specialize(sy.theta_local_general(1, 0) - sy.theta_local_r1(0), 1)
    assert d10 == c12 * s(F(0, "12")) * (4 * K + 2)
    d11 = sy.specialize(sy.theta_local_general(1, 1) - sy.theta_local_r1(1), 1)
    assert d11.is_zero()


@pytest.mark.parametrize("r", range(0, 7))
def test_derivation_against_general(r):
    for n in range(r + 1):
        diff = line(sy.derive_theta_local(r, n) - sy.theta_local_general(r, n), r)
        assert diff == c12 * s(F(n, "12")) * (-4 * K2 - 2 * r)


def test_derivation_against_special_cases():
    assert sy.specialize(sy.derive_theta_local(0, 0) - sy.theta_local_r0(), 0).is_zero()
    assert sy.specialize(sy.derive_theta_local(1, 0) - sy.theta_local_r1(0), 1).is_zero()
    d = sy.specialize(sy.derive_theta_local(1, 1) - sy.theta_local_r1(1), 1)
    assert d == c12 * s(F(1, "12")) * (-4 * K - 2)


@pytest.mark.parametrize("r", range(0, 5))
def test_derivation_shape(r):
    for n in range(r + 1):
        a = sy.derive_theta_local(r, n)
        assert all(sym.name != "c21" for sym in a.symbols())
        assert sy.f_indices(a) <= set(range(r + 1))
    assert 2 not in sy.f_indices(sy.derive_theta_local(1, 0))


@pytest.mark.parametrize("r", range(0, 5))
def test_basis_rules_reproduce_psi1(r):
    # nabla_kl(sum F_m delta_m), read at delta_n, is the matching psi1 entry
    out_index = {"11": 0, "12": 1, "22": 2}
    for kl, slot in out_index.items():
        coeff = {}
        for m in range(r + 1):
            coeff[m] = coeff.get(m, SymPoly()) + s(F(m, kl))
            for idx, c in sy.nabla_delta(kl, m, r).items():
                coeff[idx] = coeff.get(idx, SymPoly()) + s(F(m)) * c
        for n in range(r + 1):
            expected = sy.psi1_coefficients(r, n, identify=False)[slot]
            assert line(coeff.get(n, SymPoly()) - expected, r).is_zero(), (kl, n)


def test_index_range_errors():
    for bad in [(0, 1), (2, -1), (-1, 0)]:
        with pytest.raises(IndexOutOfRange):
            sy.theta_local_general(*bad)
        with pytest.raises(IndexOutOfRange):
            sy.derive_theta_local(*bad)
        with pytest.raises(IndexOutOfRange):
            sy.psi1_coefficients(*bad)
    with pytest.raises(IndexOutOfRange):
        sy.theta_local_r1(2)


def test_text_form_is_canonical():
    a = c11 * s(F(0, "12")) * 2 + detC * s(F(0)) * K1
    b = detC * s(F(0)) * K1 + s(F(0, "12")) * c11 * 2
    assert a.to_text() == b.to_text()
    assert "c21" not in sy.derive_theta_local(2, 1).to_text()


def test_intpoly_arithmetic():
    p = (K1 + 2) * (K1 - 2)
    assert p == K1 * K1 - 4
    assert p.evaluate({"k1": 5}) == 21
    assert (K1 - K2).subs({"k1": K2 + 3}) == IntPoly.const(3)


_names = st.sampled_from(["c11", "c12", "c22", "detC"])
_fs = st.builds(lambda n, ops: F(n, *ops), st.integers(0, 3),
                st.lists(st.sampled_from(["11", "12", "22"]), max_size=2))
_terms = st.lists(st.tuples(st.lists(_names, max_size=2), _fs, st.integers(-9, 9),
                            st.integers(-3, 3)), max_size=6)


def _build(terms):
    out = SymPoly()
    for cs, f, a, b in terms:
        mono = s(f)
        for name in cs:
            mono = mono * s(sy.Symbol(name))
        out = out + mono * (K1 * a + b)
    return out


@given(_terms, _terms)
def test_random_diff_properties(t1, t2):
    a, b = _build(t1), _build(t2)
    assert sy.sympoly_diff(a, a).is_zero()
    assert sy.sympoly_diff(a, b) + b == a
    assert (a + b) - b == a
    assert a * 2 == a + a
