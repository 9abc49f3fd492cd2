import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hartmann_gup.matel import (
    ELEMENT_COLUMNS,
    Verdict,
    angular_diagonal_seed,
    angular_offdiagonal,
    angular_oracle,
    element_table,
    gegenbauer_product_integral,
    matrix_element,
    potential_elements,
    radial_diagonal,
    radial_general,
    radial_oracle,
    radial_series,
    verdict_for,
)
from hartmann_gup.model import HartmannModel, derive_state
from hartmann_gup.quad_oracle import DivergentIntegralError

import mpmath as mp
from mp_oracle import angular_moment
from mp_oracle import gegenbauer as mp_gegenbauer

H = HartmannModel()
RING = HartmannModel(q=2.0)
SQRT2 = math.sqrt(2.0)

# frozen from tests/mp_oracle.py (30-digit mpmath quadrature), q=2 state (1,1,1)
RING_111_RADIAL = {
    -4: 0.000083233580915417450839,
    -3: 0.00048400765915996005617,
    -2: 0.0039895012242692499248,
    -1: 0.051320788280845504228,
    1: 25.106601717798212866,
    2: 718.01785668734102458,
}
# <Theta_{n1,k}| (1-x^2)^-t |Theta_{n2,k}>
OFFDIAG = {
    (0, 2, 1.5, 1): 0.59628479399994391904,
    (1, 3, SQRT2, 2): 17.385887221497069278,
    (2, 4, 2.3, 1): 1.0643435687211963514,
}
HYDROGEN_1S_2S_INV_R = 0.20951312035156963686


def test_verdict_rule():
    assert verdict_for(1.0 + 5e-9, 1.0) is Verdict.MATCH
    assert verdict_for(1.0 + 5e-8, 1.0) is Verdict.MISMATCH
    assert verdict_for(None, 1.0) is Verdict.UNAVAILABLE
    assert verdict_for(math.nan, 1.0) is Verdict.UNAVAILABLE
    assert verdict_for(5e-10, 0.0) is Verdict.MATCH


@pytest.mark.parametrize("s", sorted(RING_111_RADIAL))
def test_radial_oracle_frozen(s):
    st_ = derive_state(RING, 1, 1, 1)
    res = radial_oracle(st_, st_, s)
    assert res.converged
    assert res.value == pytest.approx(RING_111_RADIAL[s], rel=1e-10)
    assert radial_series(st_, st_, s) == pytest.approx(RING_111_RADIAL[s], rel=1e-10)


@pytest.mark.parametrize("s", [-1, -2, -3, -4])
def test_printed_radial_diagonals_match(s):
    st_ = derive_state(RING, 1, 1, 1)
    assert radial_diagonal(st_, s) == pytest.approx(RING_111_RADIAL[s], rel=1e-10)


def test_hydrogen_radial_textbook():
    for npr in range(1, 6):
        for l in range(npr):
            st_ = derive_state(H, npr - l - 1, 0, l)  # q = 0: k = |m|, n = 0
            assert radial_diagonal(st_, -1) == pytest.approx(1 / npr**2, rel=1e-12)
            assert radial_diagonal(st_, -2) == pytest.approx(1 / (npr**3 * (l + 0.5)), rel=1e-12)
            assert radial_series(st_, st_, 1) == pytest.approx((3 * npr**2 - l * (l + 1)) / 2, rel=1e-10)


def test_radial_divergence_guard():
    st_ = derive_state(H, 0, 0, 0)
    with pytest.raises(DivergentIntegralError):
        radial_oracle(st_, st_, -3)
    with pytest.raises(DivergentIntegralError):
        radial_diagonal(st_, -3)


def test_printed_general_radial_only_for_nodeless():
    a, b = derive_state(H, 0, 0, 0), derive_state(H, 1, 0, 0)
    assert radial_oracle(a, b, -1).value == pytest.approx(HYDROGEN_1S_2S_INV_R, rel=1e-12)
    assert radial_series(a, b, -1) == pytest.approx(HYDROGEN_1S_2S_INV_R, rel=1e-12)
    # nodeless diagonal: the printed sum agrees
    st_ = derive_state(RING, 0, 1, 1)
    assert verdict_for(radial_general(st_, st_, -2), radial_oracle(st_, st_, -2).value) is Verdict.MATCH
    # one radial node: it does not
    st_ = derive_state(RING, 1, 1, 1)
    assert verdict_for(radial_general(st_, st_, -1), RING_111_RADIAL[-1]) is Verdict.MISMATCH


@pytest.mark.parametrize("key", sorted(OFFDIAG))
def test_angular_offdiagonal_frozen(key):
    n1, n2, k, t = key
    assert angular_oracle(n1, k, n2, k, -t).value == pytest.approx(OFFDIAG[key], rel=1e-10)
    assert angular_offdiagonal(n1, k, n2, k, t) == pytest.approx(OFFDIAG[key], rel=1e-10)


def test_printed_offdiagonal_disagrees():
    n1, n2, k, t = 1, 3, SQRT2, 2
    assert verdict_for(angular_offdiagonal(n1, k, n2, k, t, printed=True), OFFDIAG[(n1, n2, k, t)]) is Verdict.MISMATCH


def test_removable_point_lambda_zero():
    # k = 1/2, t = 1 puts the weight exponent at lam = 0
    assert angular_offdiagonal(0, 0.5, 2, 0.5, 1) == pytest.approx(2.0, rel=1e-12)


@given(st.integers(0, 5), st.integers(0, 5), st.sampled_from([0.0, 0.5, 1.0, SQRT2, 2.3]), st.integers(0, 2))
def test_parity_and_symmetry(n1, n2, k, t):
    try:
        fwd = angular_offdiagonal(n1, k, n2, k, t)
    except DivergentIntegralError:
        return
    if (n1 + n2) % 2:
        assert fwd == 0.0
        assert angular_offdiagonal(n1, k, n2, k, t, printed=True) == 0.0
    assert angular_offdiagonal(n2, k, n1, k, t) == pytest.approx(fwd, rel=1e-11, abs=1e-13)


@settings(max_examples=20)
@given(st.integers(0, 4), st.integers(0, 4), st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.05, 2.5))
def test_gegenbauer_product_vs_mpmath(n1, n2, th, mu, lam):
    # mpmath's tanh-sinh loses digits for weight exponents below about -0.5,
    # so lam < 0 is covered by the exact Beta-function case below
    with mp.workdps(20):
        ref = mp.quad(lambda x: mp_gegenbauer(n1, th, x) * mp_gegenbauer(n2, mu, x) * (1 - x * x) ** (lam - 0.5), [-1, 0, 1])
    val = gegenbauer_product_integral(n1, th, n2, mu, lam)
    assert val == pytest.approx(float(ref), rel=1e-9, abs=1e-10)


@pytest.mark.parametrize("lam", [-0.45, -0.3, -0.1, 0.0, 0.35])
def test_gegenbauer_product_singular_weight(lam):
    # C_2^mu(x) = 2 mu (1 + mu) x^2 - mu; moments of (1-x^2)^a are Beta functions
    mu = 0.4
    a = lam - 0.5
    exact = 2 * mu * (1 + mu) * float(mp.beta(1.5, a + 1)) - mu * float(mp.beta(0.5, a + 1))
    assert gegenbauer_product_integral(0, 0.3, 2, mu, lam) == pytest.approx(exact, rel=1e-12)


def test_printed_5f4_forms():
    # <sin^-2>_{0,2} = (2k+1)/(2k) = 5/4; printed form gives 15/8
    assert angular_moment(0, 2, 0, 2, -1) == pytest.approx(1.25, rel=1e-20)
    assert angular_oracle(0, 2.0, 0, 2.0, -1).value == pytest.approx(1.25, rel=1e-12)
    assert angular_diagonal_seed(0, 2.0, 1) == pytest.approx(1.875, rel=1e-12)
    with pytest.raises(DivergentIntegralError):
        angular_diagonal_seed(0, 0.9, 2)


def test_matrix_element_tracks():
    a, b = derive_state(RING, 0, 1, 1), derive_state(RING, 1, 1, 1)
    el = matrix_element(a, b, -2, 1, track="validated")
    assert el.oracle.converged
    assert el.verdict is Verdict.MATCH
    assert set(el.row()) == set(ELEMENT_COLUMNS)
    odd = matrix_element(derive_state(RING, 0, 0, 1), a, -2, 1)
    assert odd.closed_form == 0.0 and odd.oracle.value == 0.0
    with pytest.raises(ValueError):
        matrix_element(a, derive_state(RING, 0, 1, 2), -1, 0)


def test_element_table_skips_divergent():
    st_ = derive_state(H, 0, 0, 0)
    rows = element_table([(st_, st_)], [(-1, 0), (-3, 0), (-2, 1)])
    assert [(e.s, e.t) for e in rows] == [(-1, 0)]


def test_potential_elements_hydrogen():
    st_ = derive_state(H, 0, 0, 0)
    V, V2 = potential_elements(st_, st_)
    assert V == pytest.approx(-1.0, rel=1e-12)
    assert V2 == pytest.approx(2.0, rel=1e-12)
    other = derive_state(H, 0, 0, 1)
    assert potential_elements(st_, other) == (0.0, 0.0)


@pytest.mark.parametrize("bra,ket", [((1, 0, 0), (1, 0, 0)), ((1, 0, 0), (0, 1, 0)), ((0, 2, 1), (2, 0, 1))])
def test_potential_closed_form_agrees_with_oracle(bra, ket):
    model = HartmannModel(q=8.0)
    a, b = derive_state(model, *bra), derive_state(model, *ket)
    oracle = potential_elements(a, b)
    closed = potential_elements(a, b, source="closed_form")
    assert closed == pytest.approx(oracle, rel=1e-9, abs=1e-12)
