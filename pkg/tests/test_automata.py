"""Automata over group alphabets, walk weights and factor languages."""
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from amalgam.automata import (
    FACTOR_KINDS,
    GroupAutomaton,
    L_cone,
    aggregate_series,
    complement,
    cone_automaton,
    cone_membership,
    difference,
    factor_automaton,
    forbidden_subword_automaton,
    free_product_regular,
    from_core_graph,
    full_group,
    intersect,
    lambda_walk,
    minimize,
    nontrivial_words,
    smallness_probe,
)
from amalgam.stratify import classify_rep
from amalgam.subgraph import fold, schreier_transversal
from amalgam.words import enumerate_ball, random_reduced_word, sphere_count

from conftest import reduced_words


def _contains(w, pats):
    return any(w[i:i + len(p)] == p for p in pats for i in range(len(w) - len(p) + 1))


def test_forbidden_single_letter():
    F0 = forbidden_subword_automaton([(1,)], (1, 2))
    assert F0.accepts(())
    assert F0.accepts((-1, 2, -1))
    assert not F0.accepts((2, 1))


@pytest.mark.parametrize("W", [[(1, 2)], [(1, 2), (2, 2, -1)], [(1,), (-2, -1, 2)]])
def test_forbidden_matches_factor_scan(W):
    F0 = forbidden_subword_automaton(W, (1, 2))
    assert not F0.accepts((1, 1, 2)) or (1, 2) not in W
    for w in enumerate_ball(2, 6):
        assert F0.accepts(w) == (not _contains(w, W))


def test_free_product_smallest_case():
    L = GroupAutomaton((1,), ({1: 1}, {}), 0, frozenset({1}), name="a")
    M = L.shifted(1)
    P = free_product_regular(L, M)
    two = {w for w in P.words_of_length(2)}
    assert two == {(1, 2), (2, 1)}
    assert P.accepts((1, 2, 1)) and not P.accepts((1, 1))


def _split(w, ra):
    out = []
    for x in w:
        side = "A" if abs(x) <= ra else "B"
        if out and out[-1][0] == side:
            out[-1][1].append(x)
        else:
            out.append((side, [x]))
    return [(s, tuple(p)) for s, p in out]


def test_free_product_agrees_with_splitter():
    T = schreier_transversal(fold([(1, 1)], 2))
    U = schreier_transversal(fold([(1, 1, 1)], 2))
    L, Lf = factor_automaton(T, "minus_C"), factor_automaton(T, "unstable_minus_C")
    M = factor_automaton(U, "minus_C").shifted(2)
    P = free_product_regular(Lf, M, L_first=L)
    rng = random.Random(5)
    for _ in range(10_000):
        w = random_reduced_word(4, rng.randint(0, 9), rng)
        parts = _split(w, 2)
        ok = True
        for i, (side, p) in enumerate(parts):
            if side == "A":
                ok &= (L if i == 0 else Lf).accepts(p)
            else:
                ok &= M.accepts(p)
        assert P.accepts(w) == ok, w


def test_prefix_closed_inheritance():
    A = nontrivial_words((1, 2))
    P = free_product_regular(A, A.shifted(2))
    assert P.is_prefix_closed()
    T = schreier_transversal(fold([(1, 1)], 2))
    R = factor_automaton(T, "minus_C")
    assert not free_product_regular(R, R.shifted(2)).is_prefix_closed()


def test_lambda_on_full_group():
    F = full_group(2)
    for w in list(enumerate_ball(2, 4))[1:]:
        assert lambda_walk(F, w, exact=True) == Fraction(1, 4) * Fraction(1, 3) ** (len(w) - 1)


def test_lambda_on_single_path():
    P = cone_automaton((1, 2, 1), (1, 2))
    chain = intersect(P, full_group(2))
    w = (1, 2, 1)
    # a language with a single word: every step has out-degree one
    single = intersect(chain, GroupAutomaton((1, 2), ({1: 1}, {2: 2}, {1: 3}, {}), 0,
                                             frozenset({3})))
    assert lambda_walk(single, w, exact=True) == 1


def test_lambda_multiplicative():
    T = schreier_transversal(fold([(1, 1), (2, 1, -2)], 2))
    A = factor_automaton(T, "minus_C")
    E = A.expand()
    rng = random.Random(3)
    done = 0
    while done < 1000:
        u = random_reduced_word(2, rng.randint(0, 5), rng)
        v = random_reduced_word(2, rng.randint(0, 5), rng)
        if u and v and u[-1] == -v[0]:
            continue
        w = u + v
        if E.run(w) is None:
            continue
        q = E.run(u)
        tail = Fraction(1)
        for x in v:
            tail /= len(E.trans[q])
            q = E.trans[q][x]
        assert lambda_walk(A, w, exact=True) == lambda_walk(A, u, exact=True) * tail
        done += 1


@pytest.mark.parametrize("gens", [[(1, 1)], [(1, 2, -1, -2)], [(1, 1), (2, 1, -2)]])
def test_walk_aggregate_equals_sphere_fraction_on_free_group(gens):
    G = fold(gens, 2)
    R = from_core_graph(G)
    F = full_group(2)
    fp = aggregate_series(F, R, 8, exact=True)
    counts = R.count_by_length(8)
    for n in range(9):
        assert fp[n] == Fraction(counts[n], sphere_count(2, n))


def test_aggregate_predicate_route_agrees():
    T = schreier_transversal(fold([(1, 1)], 2))
    A = factor_automaton(T, "minus_C")
    U = factor_automaton(T, "unstable_minus_C")
    a = aggregate_series(A, U, 6, exact=True)
    b = aggregate_series(A, U.accepts, 6, exact=True)
    assert a == b


def test_cones():
    assert cone_membership((1,), (1, 2))
    assert not cone_membership((1,), (-1, 2))
    F = full_group(2)
    assert L_cone(F, ()).count_by_length(5) == F.count_by_length(5)
    probe = smallness_probe(F, (1,), 10)
    assert not probe.small
    assert all(abs(v - 0.25) < 1e-12 for v in probe.series[1:])


def test_cone_in_forbidden_language_is_small():
    # after a, every continuation is forbidden: the cone is finite
    F0 = forbidden_subword_automaton([(1, 2), (1, 1), (1, -2)], (1, 2))
    probe = smallness_probe(F0, (1,), 12)
    assert probe.series[1] > 0 and probe.series[3] == 0 and probe.small
    # words b^n and b^n a: at each step half of the cone's mass ends
    L = GroupAutomaton((1, 2), ({2: 0, 1: 1}, {}), 0, frozenset({0, 1}))
    probe = smallness_probe(L, (2,), 14)
    assert probe.small and probe.delta < 0.6
    assert all(abs(probe.series[n + 1] / probe.series[n] - 0.5) < 1e-12 for n in range(2, 14))


def test_complement_and_difference():
    T = schreier_transversal(fold([(1, 1)], 2))
    C = factor_automaton(T, "C")
    nC = complement(C)
    for w in enumerate_ball(2, 6):
        assert nC.accepts(w) != C.accepts(w)
    D = difference(full_group(2), C)
    assert all(D.accepts(w) == nC.accepts(w) for w in enumerate_ball(2, 5))


@given(reduced_words(max_size=8))
@settings(max_examples=200)
def test_minimize_preserves_language(w):
    T = schreier_transversal(fold([(1, 1), (2, 1, -2)], 2))
    A = factor_automaton(T, "unstable_reps")
    assert minimize(A).accepts(w) == A.accepts(w)


def _brute(T, kind, w):
    G = T.graph
    inC = G.read(w) == G.base
    rep = T.representative_of(w)
    uns = classify_rep(rep, T).unstable
    return {
        "all": True,
        "nontrivial": bool(w),
        "C": inC,
        "minus_C": not inC,
        "unstable": uns,
        "unstable_minus_C": uns and not inC,
        "reps": T.is_representative(w),
        "reps_nontrivial": T.is_representative(w) and bool(w),
        "unstable_reps": T.is_representative(w) and uns,
        "unstable_reps_nontrivial": T.is_representative(w) and uns and bool(w),
    }[kind]


@pytest.mark.parametrize("gens", [[(1, 1)], [(1, 1, 1)], [(1, 2, -1, -2)], [(1, 1), (2, 1, -2)]])
@pytest.mark.parametrize("kind", FACTOR_KINDS)
def test_factor_automata_match_enumeration(gens, kind):
    T = schreier_transversal(fold(gens, 2))
    A = factor_automaton(T, kind)
    for w in enumerate_ball(2, 5):
        assert A.accepts(w) == _brute(T, kind, w), (kind, w)


def test_dot_and_text_exports():
    A = nontrivial_words((1,))
    assert A.to_dot().startswith("digraph")
    assert A.to_text().splitlines()[0].startswith("states")
