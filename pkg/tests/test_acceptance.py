"""Acceptance checks, one test per criterion.

Every test records a ``PASS``/``FAIL`` line in :data:`RESULTS`; the lines are
printed as they happen (visible with ``-s``) and again in the terminal summary
(see ``conftest.py``).  Running this file directly prints the lines as well.
"""
import math
import random
import time
from fractions import Fraction
from itertools import product

from amalgam.automata import (
    factor_automaton,
    forbidden_subword_automaton,
    from_core_graph,
    full_group,
    aggregate_series,
)
from amalgam.experiments import ExperimentConfig, run_census, run_theorem_a, run_theorem_b
from amalgam.forms import finite_index_spec, reference_spec, to_canonical_form
from amalgam.measures import (
    MeasureParams,
    ThetaDist,
    conditioned_mu_s,
    layer_mass,
    mu_free_product,
    mu_s,
)
from amalgam.samplers import make_rng, sample_mu_s
from amalgam.stratify import classify_rep, representatives_of_length
from amalgam.subgraph import accepts, fold, schreier_transversal
from amalgam.words import (
    concat_reduce,
    enumerate_ball,
    free_reduce,
    inverse,
    random_reduced_word,
    sphere_count,
)

RESULTS: list[str] = []


def record(num: int, title: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'} [{num:2d}] {title}" + (f": {detail}" if detail else "")
    RESULTS.append(line)
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1. folding against generator products


def _generator_closure(gens, bound, ball_len, target):
    """Reduced products of generators whose partial products stay within
    ``bound``; stops early once ``target`` words of length ``ball_len`` or
    less have been found."""
    pool = set(gens) | {inverse(g) for g in gens}
    seen = {()}
    frontier = [()]
    short = 1
    while frontier and short < target:
        nxt = []
        for w in frontier:
            for g in pool:
                p = concat_reduce(w, g)
                if len(p) <= bound and p not in seen:
                    seen.add(p)
                    nxt.append(p)
                    short += len(p) <= ball_len
        frontier = nxt
    return {w for w in seen if len(w) <= ball_len}


def test_01_membership_matches_generator_products():
    t0 = time.time()
    rng = random.Random(2026)
    ball = list(enumerate_ball(2, 8))
    agree = total = 0
    for _ in range(20):
        gens = [random_reduced_word(2, rng.randint(1, 6), rng) for _ in range(rng.randint(1, 3))]
        G = fold(gens, 2)
        by_fold = {w for w in ball if accepts(G, w)}
        # the early stop only saves time; the verdict compares the two sets
        brute = _generator_closure(gens, 8 + max(map(len, gens)), 8, len(by_fold))
        agree += sum((w in by_fold) == (w in brute) for w in ball)
        total += len(ball)
    dt = time.time() - t0
    record(1, "fold membership = generator products", agree == total and dt < 60,
           f"{agree}/{total} words agree, {dt:.1f}s")


# ---------------------------------------------------------------------------
# 2. finite index: everything is unstable and singular


def test_02_finite_index_census_is_full():
    res = run_census(ExperimentConfig(finite_index_spec(), n_max=6, k_max=8))
    cells = res["grid"]
    bad = [r for r in cells if r["numerator"] != r["denominator"] or r["rho"] != "1"]
    strata = res["strata"]
    bad_strata = [r for r in strata if not r["unstable"] == r["singular"] == r["total"]]
    record(2, "finite-index census fractions all equal 1", bool(cells) and not bad and not bad_strata,
           f"{len(cells)} cells, {len(bad)} off; {len(strata)} strata rows, {len(bad_strata)} off")


# ---------------------------------------------------------------------------
# 3 and 4. exact census fits and walk-measure ratios


_THEOREM_A = {}


def _theorem_a():
    if not _THEOREM_A:
        t0 = time.time()
        rep = run_theorem_a(ExperimentConfig(reference_spec(), n_max=6, k_max=8, ls=(2, 4, 8)),
                            monte_carlo_samples=0)
        _THEOREM_A["rep"], _THEOREM_A["time"] = rep, time.time() - t0
    return _THEOREM_A["rep"], _THEOREM_A["time"]


def test_03_census_fractions_decay():
    rep, dt = _theorem_a()
    verdicts = rep.form_verdicts()
    dirs = {f.direction for f in rep.fits}
    ok = len(dirs) >= 3 and dt < 600
    parts = []
    for kind, v in verdicts.items():
        fs = [f for f in rep.fits if f.form == kind]
        ok &= all(f.delta <= 0.95 and f.quality >= 0.9 for f in fs)
        ok &= v["spread"] <= 0.1
        parts.append(f"{kind} delta<={max(f.delta for f in fs):.3f} "
                     f"R2>={min(f.quality for f in fs):.3f} spread={v['spread']:.3f}")
    record(3, "census fractions decay in k", ok, "; ".join(parts) + f"; {dt:.1f}s")


def test_04_cesaro_ratios():
    rep, _ = _theorem_a()
    ok = {r.l for r in rep.cesaro} == {2, 4, 8}
    worst = 0.0
    for r in rep.cesaro:
        ok &= r.decreasing and r.q < 1
        ok &= all(v <= r.q ** (k // 2 - 1) + 1e-15 for k, v in r.rho)
        worst = max(worst, r.q)
    record(4, "walk-measure ratios decrease geometrically", ok,
           f"{len(rep.cesaro)} (form, l) rows, largest fitted q={worst:.4f}")


# ---------------------------------------------------------------------------
# 5. regular languages


def test_05_regular_languages_and_forbidden_subwords():
    rep = run_theorem_b(ExperimentConfig(reference_spec(), seed=5), containment_samples=10 ** 5)
    ok = rep.fit_ok("EF") and rep.fit_ok("RF") and rep.containment_ok()
    ok &= all(r.sampled == 10 ** 5 for r in rep.rows)
    detail = "; ".join(f"{r.form} delta={r.delta:.3f} R2={r.quality:.3f} "
                       f"exact={r.exact_containment} violations={r.violations}/{r.sampled}"
                       for r in rep.rows)
    record(5, "unstable language decays and avoids W", ok,
           f"s={rep.stable_rep}; " + detail)


# ---------------------------------------------------------------------------
# 6. the no-return walk sampler


def test_06_mu_s_sampler_law():
    p = MeasureParams(1 / 3, 2)
    rng = make_rng(6)
    N = 10 ** 6
    counts = {}
    total_len = 0
    for _ in range(N):
        w = sample_mu_s(p, rng)
        total_len += len(w)
        if len(w) <= 3:
            counts[w] = counts.get(w, 0) + 1
    worst = 0.0
    for w in enumerate_ball(2, 3):
        q = mu_s(w, p)
        z = abs(counts.get(w, 0) / N - q) / math.sqrt(q * (1 - q) / N)
        worst = max(worst, z)
    z_id = abs(counts.get((), 0) / N - p.s) / math.sqrt(p.s * (1 - p.s) / N)
    # length is geometric on {0, 1, ...}: mean (1-s)/s, variance (1-s)/s^2
    mean = total_len / N
    z_mean = abs(mean - (1 / p.s - 1)) / math.sqrt((1 - p.s) / p.s ** 2 / N)
    ok = worst <= 3 and z_id <= 3 and z_mean <= 3
    record(6, "no-return walk sampler law", ok,
           f"max z over 53 words={worst:.2f}, identity z={z_id:.2f}, mean length {mean:.4f} z={z_mean:.2f}")


# ---------------------------------------------------------------------------
# 7. free-product measure


def _layer_by_length_classes(i, theta, pA, pB, L):
    """Layer mass summed with the free-product measure over length classes."""
    mA, mB = conditioned_mu_s(pA), conditioned_mu_s(pB)
    total = 0.0
    for first, second in (("A", "B"), ("B", "A")):
        sides = [first if j % 2 == 0 else second for j in range(i)]
        for lens in product(range(1, L + 1), repeat=i):
            f = tuple((sd, (1,) * n) for sd, n in zip(sides, lens))
            mult = 1
            for sd, n in zip(sides, lens):
                mult *= sphere_count(pA.rank if sd == "A" else pB.rank, n)
            total += mult * mu_free_product(f, theta, mA, mB)
    return total


def test_07_free_product_normalization():
    theta = ThetaDist()
    pA, pB = MeasureParams(0.5, 2), MeasureParams(0.45, 2)
    layers = {i: _layer_by_length_classes(i, theta, pA, pB, 45) for i in (1, 2, 3)}
    err = max(abs(layers[i] - theta.pmf(i)) for i in layers)
    err2 = max(abs(layer_mass(i, theta, pA, pB) - theta.pmf(i)) for i in layers)
    ok = err < 1e-9 and err2 < 1e-9
    worst_gap = -1.0
    for J in (3, 10, 100, 1000):
        trunc = sum(layers.get(i) or layer_mass(i, theta, pA, pB) for i in range(1, J + 1))
        worst_gap = max(worst_gap, (1 - theta.tail(J)) - trunc)
        ok &= trunc >= 1 - theta.tail(J) - 1e-12
    record(7, "free-product measure normalisation", ok,
           f"layer error {max(err, err2):.2e}, truncated mass minus bound >= {-worst_gap:.2e}")


# ---------------------------------------------------------------------------
# 8. canonical normal form uniqueness


def _rerepresent(g, spec, rng):
    """Another mixed word for the same element: syllables are split, trivial
    pairs inserted and ``c c^-1`` spliced across the two factors."""
    parts = []
    for side, w in g:
        cut = rng.randint(0, len(w))
        parts += [(side, w[:cut]), (side, w[cut:])]
    for _ in range(rng.randint(1, 4)):
        i = rng.randint(0, len(parts))
        move = rng.random()
        side = rng.choice("AB")
        oth = "B" if side == "A" else "A"
        if move < 0.6:
            z = random_reduced_word(spec.rank_c, rng.randint(1, 3), rng)
            parts[i:i] = [(side, spec.embed(z, side)), (oth, inverse(spec.embed(z, oth)))]
        else:
            u = random_reduced_word(spec.rank(side), rng.randint(1, 3), rng)
            parts[i:i] = [(side, u), (side, inverse(u))]
    return tuple((s, free_reduce(w)) for s, w in parts)


def test_08_canonical_form_uniqueness():
    spec = reference_spec()
    rng = random.Random(88)
    mismatches = 0
    for _ in range(100):
        side = rng.choice("AB")
        g = []
        for _ in range(rng.randint(1, 5)):
            g.append((side, random_reduced_word(spec.rank(side), rng.randint(1, 4), rng)))
            side = "B" if side == "A" else "A"
        target = to_canonical_form(tuple(g), spec)
        for _ in range(500):
            mismatches += to_canonical_form(_rerepresent(g, spec, rng), spec) != target
    record(8, "canonical form is unique", mismatches == 0,
           f"100 elements x 500 re-representations, {mismatches} mismatches")


# ---------------------------------------------------------------------------
# 9. singular representatives are unstable


def test_09_singular_strata_inside_unstable():
    lines, ok = [], True
    for spec in (reference_spec(), finite_index_spec()):
        for side in "AB":
            T = spec.transversal(side)
            sing = uns = both_bad = reps = 0
            for n in range(9):
                for s in representatives_of_length(T, n):
                    cls = classify_rep(s, T)
                    reps += 1
                    sing += cls.singular
                    uns += cls.unstable
                    if cls.singular and not cls.unstable:
                        ok = False
                    if cls.singular and cls.certified_stable:
                        both_bad += 1
            ok &= both_bad == 0
            lines.append(f"{spec.label}/{side}: {reps} reps, {sing} singular, {uns} unstable, "
                         f"{both_bad} singular+certified")
    record(9, "singular strata inside unstable strata", ok, "; ".join(lines))


# ---------------------------------------------------------------------------
# 10. walk aggregate on the full free group


def test_10_walk_aggregate_equals_sphere_fraction():
    F = full_group(2)
    T = schreier_transversal(fold([(1, 1)], 2))
    languages = {
        "<a^2>": from_core_graph(fold([(1, 1)], 2)),
        "<ab, ba^-1>": from_core_graph(fold([(1, 2), (2, -1)], 2)),
        "unstable reps": factor_automaton(T, "unstable"),
        "no aa": forbidden_subword_automaton([(1, 1)], (1, 2)),
        "F": F,
    }
    ok = True
    for name, R in languages.items():
        fp = aggregate_series(F, R, 8, exact=True)
        counts = R.count_by_length(8)
        for n in range(9):
            exact = Fraction(counts[n], sphere_count(2, n))
            ok &= isinstance(fp[n], Fraction) and fp[n] == exact
    record(10, "walk aggregate equals sphere fraction on F", ok,
           f"{len(languages)} languages, n <= 8, exact rational equality")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
