"""Walk measures, syllable laws, frequencies, densities and decay fits."""
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from amalgam.automata import factor_automaton, from_core_graph
from amalgam.experiments import build_census
from amalgam.measures import (
    InsufficientData,
    MeasureParams,
    ThetaDist,
    UnsupportedConfiguration,
    bidim_frequency,
    cesaro_density,
    conditioned_mu_s,
    cumulative,
    fit_decay,
    frequency,
    layer_mass,
    mu_free_product,
    mu_s,
    mu_s_mass,
    mu_s_relative,
    mu_s_sphere,
    parity_product,
    relative_walk_mass,
    sphere_fractions,
    visits,
)
from amalgam.stratify import representatives_of_length, classify_rep
from amalgam.subgraph import count_reduced_accepted, fold, schreier_transversal
from amalgam.words import enumerate_ball, sphere_count


@pytest.fixture(scope="module")
def T2():
    return schreier_transversal(fold([(1, 1)], 2))


def test_mu_s_examples():
    p = MeasureParams(0.5, 2)
    assert mu_s((), p) == 0.5
    assert mu_s((1,), p) == pytest.approx(0.0625, abs=1e-15)
    assert MeasureParams.from_l(3).s == 0.25 and MeasureParams(0.25).l == 3


def test_mu_s_ball_mass():
    p = MeasureParams(0.3, 2)
    direct = sum(mu_s(w, p) for w in enumerate_ball(2, 8))
    by_class = sum(sphere_count(2, n) * mu_s((1,) * n, p) for n in range(13))
    assert direct == pytest.approx(1 - 0.7 ** 9, abs=1e-12)
    assert by_class == pytest.approx(1 - 0.7 ** 13, abs=1e-12)


@pytest.mark.parametrize("s", [0, 1, -0.1, 1.5])
def test_bad_stop_probability(s):
    with pytest.raises(ValueError):
        MeasureParams(s)


def test_visits_examples(T2):
    assert visits((2,), T2) == 1
    assert visits((1, 1, 2), T2) == 2
    p = MeasureParams(0.4, 2)
    assert mu_s_relative((2,), T2, p, include_stop=False) == pytest.approx(1 / 4)
    with pytest.raises(ValueError):
        mu_s_relative((1, 1), T2, p)
    with pytest.raises(UnsupportedConfiguration):
        mu_s_relative((1,), schreier_transversal(fold([(1,), (2,)])), p)


def test_relative_law_sums_to_one(T2):
    p = MeasureParams(0.5, 2)
    total = sum(mu_s_relative(w, T2, p) for w in enumerate_ball(2, 12)
                if T2.graph.read(w) != T2.base)
    assert 0.99 < total <= 1 + 1e-12
    mass, rest = relative_walk_mass(factor_automaton(T2, "minus_C"), T2, p)
    assert mass == pytest.approx(1.0, abs=1e-9) and rest < 1e-9


def test_relative_walk_mass_matches_enumeration(T2):
    p = MeasureParams(0.5, 2)
    U = factor_automaton(T2, "unstable_minus_C")
    direct = sum(mu_s_relative(w, T2, p) for w in enumerate_ball(2, 12) if U.accepts(w))
    mass, _ = relative_walk_mass(U, T2, p)
    assert mass == pytest.approx(direct, abs=2e-4)
    assert mass >= direct


def test_mu_s_mass_of_subgroup():
    p = MeasureParams(0.4, 2)
    G = fold([(1, 1)], 2)
    mass, tail = mu_s_mass(from_core_graph(G), p)
    direct = sum(mu_s_sphere(n, p) * count_reduced_accepted(G, n) / sphere_count(2, n)
                 for n in range(200))
    assert mass == pytest.approx(direct, abs=1e-12) and tail < 1e-40


def test_sphere_fractions_agree_with_counts():
    G = fold([(1, 2), (2, 1, -2)], 2)
    A = from_core_graph(G)
    fr = sphere_fractions(A, 8)
    for n, f in enumerate(fr):
        assert f == pytest.approx(count_reduced_accepted(G, n) / sphere_count(2, n), abs=1e-14)


def test_free_product_measure_single_syllable():
    theta = ThetaDist()
    p = MeasureParams(0.5, 2)
    mu = conditioned_mu_s(p)
    f = (("A", (1, 2)),)
    assert mu_free_product(f, theta, mu, mu) == pytest.approx(0.5 * theta.pmf(1) * mu((1, 2)))


@pytest.mark.parametrize("theta", [ThetaDist(), ThetaDist("geometric", 0.3), ThetaDist("uniform", 5)])
def test_layer_sums_equal_theta(theta):
    pA, pB = MeasureParams(0.3, 2), MeasureParams(0.45, 3)
    for i in range(1, 4):
        assert abs(layer_mass(i, theta, pA, pB) - theta.pmf(i)) < 1e-9
        # independent route: sum the conditioned law over length classes
        mA = sum(sphere_count(2, n) * conditioned_mu_s(pA)((1,) * n) for n in range(1, 120))
        mB = sum(sphere_count(3, n) * conditioned_mu_s(pB)((1,) * n) for n in range(1, 120))
        assert abs(0.5 * theta.pmf(i) * 2 * parity_product(mA, mB, i) - theta.pmf(i)) < 1e-9


def test_truncated_total_mass():
    theta = ThetaDist()
    p = MeasureParams(0.3, 2)
    for J in (5, 50, 500):
        total = sum(layer_mass(i, theta, p, p) for i in range(1, J + 1))
        assert total >= 1 - theta.tail(J) - 1e-9
        assert total <= 1 + 1e-9


@given(st.sampled_from(["N1", "N0", "CRF", "CRF0"]), st.integers(1, 40))
def test_theta_domain_positions(domain, j):
    th = ThetaDist("geometric", 0.2, domain)
    assert th.position(th.element(j)) == j


def test_theta_pmf_sums_to_one():
    for th in (ThetaDist(), ThetaDist("geometric", 0.25, "CRF"), ThetaDist("uniform", 7, "N0")):
        s = sum(th.weight(j) for j in range(1, 200001))
        assert s == pytest.approx(1.0, abs=1e-5)


def test_frequency_examples():
    G = fold([(1, 1)], 2)
    R = [count_reduced_accepted(G, n) for n in range(5)]
    L = [sphere_count(2, n) for n in range(5)]
    assert frequency(R, L, 2) == Fraction(2, 12)
    assert frequency(L, L, 3) == 1
    assert frequency(R, [0] * 5, 1) is None


def test_representative_fractions_decrease(T2):
    S = [sum(1 for _ in representatives_of_length(T2, n)) for n in range(9)]
    U = [sum(classify_rep(s, T2).unstable for s in representatives_of_length(T2, n))
         for n in range(9)]
    fr = [frequency(U, S, n) for n in range(1, 9)]
    assert all(b <= a for a, b in zip(fr, fr[1:]))
    balls = [cumulative(U, S, n) for n in range(1, 9)]
    delta, q = fit_decay(balls, range(1, 9))
    assert delta < 1 and q > 0.9


def test_cesaro_examples():
    assert cesaro_density([0.3] * 10).value == pytest.approx(0.3)
    assert cesaro_density([(n + 1) % 2 for n in range(1000)]).value == pytest.approx(0.5, abs=1e-3)
    G = fold([(1, 1)], 2)
    f = [count_reduced_accepted(G, n) / sphere_count(2, n) for n in range(1, 200)]
    assert cesaro_density(f).value < 0.01
    with pytest.raises(InsufficientData):
        cesaro_density([None, None])


def test_bidim_frequency_examples():
    assert bidim_frequency(5, 7, 5, 7, 3) == 1
    assert bidim_frequency(2, 8, 4, 8, 2) == Fraction(1, 2)
    assert bidim_frequency(0.5, 1.0, 1.0, 1.0, 2) == pytest.approx(0.5)
    assert bidim_frequency(1, 1, 0, 0, 2) is None


def test_unstable_ef_cells_have_exponential_shape(square_spec):
    census = build_census(square_spec, 6, kinds=("EF",))
    qs = []
    for n in range(1, 7):
        for k in range(2, 7):
            qs.append(float(census.rho("EF", n, k)) ** (1 / (k - 1)))
    assert max(qs) < 1


def test_fit_decay_examples():
    delta, q = fit_decay([2.0 ** -t for t in range(10)])
    assert abs(delta - 0.5) < 1e-6 and q == pytest.approx(1.0)
    delta, q = fit_decay([0.7] * 6)
    assert delta == pytest.approx(1.0) and q == 1.0
    with pytest.raises(InsufficientData):
        fit_decay([1.0, 0.5, 0.0])
