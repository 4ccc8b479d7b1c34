"""Experiment drivers: exact censuses, density fits and regularity checks.

Every driver returns plain records (dicts and lists) and, when given an
output directory, writes CSV tables plus a text report.  Outputs carry the
spec digest and the seed and contain no timestamps, so a rerun with the same
inputs reproduces them byte for byte.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .automata import (
    GroupAutomaton,
    aggregate_series,
    complement,
    factor_automaton,
    forbidden_subword_automaton,
    free_product_regular,
    intersect,
    nontrivial_words,
)
from .forms import SIDES, ConfigError, GroupSpec, classify_form, syllable_class
from .measures import (
    InsufficientData,
    MeasureParams,
    ThetaDist,
    fit_decay,
    mu_s_mass,
    parity_product,
    relative_walk_mass,
)
from .samplers import (
    GENERATORS,
    SamplerStats,
    sample_from_automaton,
    spawn_rngs,
)
from .stratify import (
    CENSUS_FIELDS,
    GuardExceeded,
    StableCertified,
    classify_rep,
    conjugate_into,
    representatives_of_length,
    stratify_sphere,
)
from .subgraph import index
from .words import ball_count, concat_reduce, enumerate_sphere

FORM_KINDS = ("EF", "RF", "CNF", "CRF")
REGULAR_KINDS = ("EF", "RF", "CNF")

GUARDS = {"n_max": 8, "k_max": 8, "samples": 10 ** 7}


class Inconclusive(RuntimeError):
    """The data needed for a verdict could not be produced."""


@dataclass
class ExperimentConfig:
    spec: GroupSpec
    kind: str = "census"
    n_max: int = 6
    k_max: int = 8
    ls: tuple = (2, 4, 8)
    samples: int = 10 ** 4
    seed: int | None = None
    radius: int | None = None
    out: Path | None = None
    theorem_b_n: int = 24
    extra: dict = field(default_factory=dict)

    def check(self, sampling: bool = False) -> None:
        for key, limit in GUARDS.items():
            if getattr(self, key) > limit:
                raise GuardExceeded(f"{key}={getattr(self, key)} exceeds guard {limit}")
        if self.n_max < 1 or self.k_max < 1 or self.samples < 1:
            raise ConfigError("grid bounds and sample counts must be positive")
        if sampling and self.seed is None:
            raise ConfigError("a seed is required for sampling")

    def digest(self) -> str:
        text = (f"{self.spec.to_text()}|{self.kind}|{self.n_max}|{self.k_max}|"
                f"{self.ls}|{self.samples}|{self.seed}|{self.radius}")
        return hashlib.sha256(text.encode()).hexdigest()[:12]

    def header(self) -> str:
        return f"# spec={self.spec.digest()} config={self.digest()} seed={self.seed}\n"


def _write(cfg: ExperimentConfig, name: str, text: str) -> None:
    if cfg.out is None:
        return
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(cfg.header() + text)


def _csv(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# per-factor censuses


@dataclass
class FactorCensus:
    """Cumulative counts over the length-``≤ n`` ball of one factor language."""

    side: str
    language: str
    total: list
    unstable: list
    singular: list


def _factor_words(spec: GroupSpec, side: str, language: str, n: int):
    T = spec.transversal(side)
    if language == "CNF":
        yield from (s for s in representatives_of_length(T, n) if s)
        return
    for w in enumerate_sphere(spec.rank(side), n):
        if not w:
            continue
        if language == "RF" and T.graph.read(w) == T.base:
            continue
        yield w


def factor_census(spec: GroupSpec, side: str, language: str, n_max: int,
                  R: int | None = None) -> FactorCensus:
    """Classify every syllable of length ``≤ n_max`` that a form of the given
    kind may carry on ``side`` (EF: nontrivial words, RF: words outside C,
    CNF/CRF: nontrivial representatives)."""
    language = "CNF" if language == "CRF" else language
    tot, uns, sin = [0], [0], [0]
    for n in range(1, n_max + 1):
        t = u = g = 0
        for w in _factor_words(spec, side, language, n):
            cls = syllable_class(side, w, spec, R)
            if cls.singular and cls.certified_stable:
                raise AssertionError(f"singular syllable {w} certified stable")
            t += 1
            u += cls.unstable
            g += cls.singular
        tot.append(tot[-1] + t)
        uns.append(uns[-1] + u)
        sin.append(sin[-1] + g)
    return FactorCensus(side, language, tot, uns, sin)


def crf_single_census(spec: GroupSpec, n_max: int, R: int | None = None) -> dict:
    """Counts of one-syllable cyclically reduced forms ``c p`` with ``|c|, |p| ≤ n``.

    Returns cumulative lists keyed by stratum; both sides are summed.
    """
    out = {key: [0] * (n_max + 1) for key in ("total", "unstable", "singular")}
    for side in SIDES:
        T = spec.transversal(side)
        G = T.graph
        zwords = [[()]] + [list(enumerate_sphere(spec.rank_c, m)) for m in range(1, n_max + 1)]
        # table[m][n]: counts with |c| = m and |p| = n
        table = {key: [[0] * (n_max + 1) for _ in range(n_max + 1)] for key in out}
        for n in range(1, n_max + 1):
            for p in representatives_of_length(T, n):
                if not p:
                    continue
                cls = classify_rep(p, T, R)
                for m in range(n_max + 1):
                    for c in zwords[m]:
                        if conjugate_into(concat_reduce(spec.embed(c, side), p), G):
                            continue
                        table["total"][m][n] += 1
                        table["unstable"][m][n] += cls.unstable
                        table["singular"][m][n] += cls.singular
        for key in out:
            for n in range(n_max + 1):
                out[key][n] += sum(table[key][m][j] for m in range(n + 1) for j in range(n + 1))
    return out


@dataclass
class Census:
    spec: GroupSpec
    n_max: int
    factors: dict  # (kind, side) -> FactorCensus
    crf1: dict

    def head(self, kind: str, n: int) -> int:
        return 1 if kind == "EF" else ball_count(self.spec.rank_c, n)

    def cell(self, kind: str, n: int, k: int):
        """``(total, unstable, singular)`` for the ``(n, k)`` cell, or None."""
        if k == 0:
            h = self.head(kind, n)
            return h, h, h  # head-only forms are singular and unstable
        if kind == "CRF":
            if k == 1:
                return tuple(self.crf1[key][n] for key in ("total", "unstable", "singular"))
            if k % 2:
                return None
        fa, fb = self.factors[(kind, "A")], self.factors[(kind, "B")]
        mult = self.head(kind, n) if kind in ("CNF", "CRF") else 1
        hi, lo = (k + 1) // 2, k // 2

        def prod(a, b):
            return mult * (a[n] ** hi * b[n] ** lo + a[n] ** lo * b[n] ** hi)

        return (prod(fa.total, fb.total), prod(fa.unstable, fb.unstable),
                prod(fa.singular, fb.singular))

    def rho(self, kind: str, n: int, k: int, stratum: str = "unstable"):
        c = self.cell(kind, n, k)
        if c is None or c[0] == 0:
            return None
        return Fraction(c[1 if stratum == "unstable" else 2], c[0])


def build_census(spec: GroupSpec, n_max: int, kinds=FORM_KINDS, R=None) -> Census:
    if n_max > GUARDS["n_max"]:
        raise GuardExceeded(f"n_max={n_max} exceeds guard {GUARDS['n_max']}")
    factors = {}
    shared: dict = {}
    for kind in kinds:
        lang = "CNF" if kind == "CRF" else kind
        for side in SIDES:
            key = (lang, side)
            if key not in shared:
                shared[key] = factor_census(spec, side, lang, n_max, R)
            factors[(kind, side)] = shared[key]
    crf1 = crf_single_census(spec, n_max, R) if "CRF" in kinds else {}
    return Census(spec, n_max, factors, crf1)


GRID_FIELDS = ("form", "stratum", "n", "k", "numerator", "denominator", "rho")


def run_census(cfg: ExperimentConfig) -> dict:
    """Transversal strata per length and exact ``(n, k)`` grids for every form kind."""
    cfg.check()
    spec = cfg.spec
    strata = []
    for side in SIDES:
        T = spec.transversal(side)
        for n in range(cfg.n_max + 1):
            rec = stratify_sphere(T, n, cfg.radius, exact=True, max_n=GUARDS["n_max"])
            strata.append({"side": side, **rec})
    census = build_census(spec, cfg.n_max, R=cfg.radius)
    grid = []
    for kind in FORM_KINDS:
        for n in range(1, cfg.n_max + 1):
            for k in range(cfg.k_max + 1):
                cell = census.cell(kind, n, k)
                if cell is None:
                    continue
                for stratum, num in (("uns", cell[1]), ("sin", cell[2])):
                    rho = None if cell[0] == 0 else num / cell[0]
                    grid.append({"form": kind, "stratum": stratum, "n": n, "k": k,
                                 "numerator": num, "denominator": cell[0],
                                 "rho": "" if rho is None else f"{rho:.12g}"})
    _write(cfg, "strata.csv", _csv(("side",) + CENSUS_FIELDS, strata))
    _write(cfg, "grid.csv", _csv(GRID_FIELDS, grid))
    return {"strata": strata, "grid": grid, "census": census}


# ---------------------------------------------------------------------------
# theorem-a report: exponential negligibility of unstable forms


DIRECTIONS = {
    "n=k": lambda k: k,
    "n=ceil(k/2)": lambda k: (k + 1) // 2,
    "n=ceil(sqrt(k))": lambda k: math.isqrt(k - 1) + 1 if k > 0 else 0,
}


@dataclass
class DirectionFit:
    form: str
    direction: str
    ks: tuple
    rhos: tuple
    delta: float
    quality: float


def direction_fits(census: Census, kind: str, k_max: int) -> list[DirectionFit]:
    fits = []
    for name, d in DIRECTIONS.items():
        ks, rhos = [], []
        for k in range(1, k_max + 1):
            n = d(k)
            if n > census.n_max:
                continue
            r = census.rho(kind, n, k)
            if r is None or r == 0:
                continue
            ks.append(k)
            rhos.append(float(r))
        try:
            delta, q = fit_decay(rhos, ks)
        except InsufficientData:
            delta, q = math.nan, math.nan
        fits.append(DirectionFit(kind, name, tuple(ks), tuple(rhos), delta, q))
    return fits


def factor_unstable_ratios(spec: GroupSpec, kind: str, s: float) -> tuple[float, float]:
    """Walk-mass ratio of unstable syllables per side for one form kind.

    EF syllables follow ``mu_s`` on nontrivial words; RF, CNF and CRF syllables
    follow the walk that never stops in ``C`` (coset masses for CNF and CRF).
    """
    out = []
    for side in SIDES:
        T = spec.transversal(side)
        p = MeasureParams(s, spec.rank(side))
        if kind == "EF":
            letters = tuple(range(1, spec.rank(side) + 1))
            uns = intersect(factor_automaton(T, "unstable"), nontrivial_words(letters))
            out.append(mu_s_mass(uns, p)[0] / (1 - s))
        elif index(T.graph) == math.inf:
            num = relative_walk_mass(factor_automaton(T, "unstable_minus_C"), T, p)[0]
            den = relative_walk_mass(factor_automaton(T, "minus_C"), T, p)[0]
            out.append(num / den)
        else:
            out.append(1.0)  # finite index: every coset is unstable
    return out[0], out[1]


@dataclass
class CesaroRow:
    form: str
    l: int
    ratios: tuple  # (side A, side B)
    rho: tuple  # (k, value)
    decreasing: bool
    q: float


def cesaro_rows(spec: GroupSpec, ls, k_max: int) -> list[CesaroRow]:
    rows = []
    for kind in FORM_KINDS:
        for l in ls:
            a, b = factor_unstable_ratios(spec, kind, 1 / (l + 1))
            ks = [k for k in range(2, k_max + 1) if kind != "CRF" or k % 2 == 0]
            vals = [(k, parity_product(a, b, k)) for k in ks]
            dec = all(vals[i + 1][1] < vals[i][1] for i in range(len(vals) - 1))
            qs = [v ** (1 / (k // 2 - 1)) for k, v in vals if k // 2 - 1 >= 1]
            rows.append(CesaroRow(kind, l, (a, b), tuple(vals), dec, max(qs)))
    return rows


@dataclass
class MonteCarloRow:
    form: str
    k: int
    draws: int
    hits: int
    predicted: float | None
    z: float | None
    p_value: float | None = None


# two-sided normal tail beyond 3 sigma
MC_LEVEL = math.erfc(3 / math.sqrt(2))


def binomial_two_sided(hits: int, n: int, p: float) -> float:
    """Exact two-sided tail ``min(1, 2 min(P[X <= hits], P[X >= hits]))`` for
    ``X ~ Bin(n, p)``; stays valid when ``n p`` is tiny, unlike a z-score."""
    if p <= 0 or p >= 1:
        return 1.0 if hits == (0 if p <= 0 else n) else 0.0
    # pmf built by the ratio recurrence in log space
    logq = math.log1p(-p)
    log_pmf = n * logq
    lo = hi = 0.0
    for j in range(n + 1):
        v = math.exp(log_pmf)
        if j <= hits:
            lo += v
        if j >= hits:
            hi += v
        if j < n:
            log_pmf += math.log((n - j) / (j + 1)) + math.log(p) - logq
    return min(1.0, 2 * min(lo, hi))


def monte_carlo(spec: GroupSpec, kinds, k_max: int, samples: int, seed: int,
                s: float = 1 / 3, chunks: int = 8) -> tuple[list[MonteCarloRow], dict]:
    """Sample forms with ``k`` uniform on ``0..k_max`` and compare the unstable
    fraction per ``k`` with the exact product of per-syllable probabilities."""
    theta = ThetaDist("uniform", k_max + 1, "N0")
    rows = []
    stats = {}
    for kind in kinds:
        rngs = spawn_rngs(seed, chunks)
        per_chunk = [samples // chunks + (i < samples % chunks) for i in range(chunks)]
        draws = [0] * (k_max + 1)
        hits = [0] * (k_max + 1)
        st = SamplerStats()
        for rng, m in zip(rngs, per_chunk):
            for _ in range(m):
                if kind == "CRF":
                    nf = GENERATORS[kind](spec, ThetaDist("uniform", k_max // 2 + 2, "CRF0"),
                                          s, s, rng, stats=st)
                else:
                    nf = GENERATORS[kind](spec, theta, s, s, rng)
                k = nf.k
                if k > k_max:
                    continue
                draws[k] += 1
                hits[k] += classify_form(nf, spec).unstable
        stats[kind] = st
        a = b = None
        if kind != "CRF":
            a, b = factor_unstable_ratios(spec, kind, s)
        for k in range(k_max + 1):
            if not draws[k]:
                continue
            pred = z = pv = None
            if a is not None:
                pred = 1.0 if k == 0 else parity_product(a, b, k)
                var = pred * (1 - pred) / draws[k]
                obs = hits[k] / draws[k]
                z = 0.0 if var == 0 and obs == pred else (
                    math.inf if var == 0 else abs(obs - pred) / math.sqrt(var))
                pv = binomial_two_sided(hits[k], draws[k], pred)
            rows.append(MonteCarloRow(kind, k, draws[k], hits[k], pred, z, pv))
    return rows, stats


@dataclass
class TheoremAReport:
    fits: list
    cesaro: list
    mc: list
    census: Census | None
    threshold: float = 0.95
    min_quality: float = 0.9
    spread_limit: float = 0.1

    def form_verdicts(self) -> dict:
        out = {}
        for kind in FORM_KINDS:
            fs = [f for f in self.fits if f.form == kind]
            deltas = [f.delta for f in fs]
            ok_fit = all(f.delta <= self.threshold and f.quality >= self.min_quality
                         for f in fs)
            spread = max(deltas) - min(deltas) if deltas else math.nan
            out[kind] = {"fits_ok": ok_fit, "spread": spread,
                         "spread_ok": spread <= self.spread_limit}
        return out

    def cesaro_ok(self) -> bool:
        return all(r.decreasing and r.q < 1 for r in self.cesaro)

    def mc_ok(self) -> bool:
        return all(r.p_value is None or r.p_value >= MC_LEVEL for r in self.mc)

    def render(self) -> str:
        lines = ["theorem A report", ""]
        lines.append("exact census fits (delta, R^2) per direction")
        for f in self.fits:
            lines.append(f"  {f.form:4s} {f.direction:16s} k={list(f.ks)} "
                         f"delta={f.delta:.4f} R2={f.quality:.4f}")
        for kind, v in self.form_verdicts().items():
            lines.append(f"  {kind:4s} fits_ok={v['fits_ok']} spread={v['spread']:.4f} "
                         f"spread_ok={v['spread_ok']}")
        lines += ["", "walk-measure (Cesaro) ratios"]
        for r in self.cesaro:
            vals = " ".join(f"{k}:{v:.4g}" for k, v in r.rho)
            lines.append(f"  {r.form:4s} l={r.l} sides=({r.ratios[0]:.4f},{r.ratios[1]:.4f}) "
                         f"decreasing={r.decreasing} q={r.q:.4f} [{vals}]")
        if self.mc:
            lines += ["", "Monte Carlo unstable fraction per k"]
            for r in self.mc:
                pred = "-" if r.predicted is None else f"{r.predicted:.4f}"
                z = "-" if r.z is None else f"{r.z:.2f}"
                pv = "-" if r.p_value is None else f"{r.p_value:.3g}"
                lines.append(f"  {r.form:4s} k={r.k} draws={r.draws} hits={r.hits} "
                             f"predicted={pred} z={z} p={pv}")
        return "\n".join(lines) + "\n"


def run_theorem_a(cfg: ExperimentConfig, monte_carlo_samples: int | None = None) -> TheoremAReport:
    cfg.check()
    spec = cfg.spec
    if all(index(spec.graph(s)) != math.inf for s in SIDES):
        raise ConfigError("the negligibility check needs C of infinite index in some factor")
    census = build_census(spec, cfg.n_max, R=cfg.radius)
    fits = [f for kind in FORM_KINDS for f in direction_fits(census, kind, cfg.k_max)]
    ces = cesaro_rows(spec, cfg.ls, cfg.k_max)
    mc = []
    n_mc = cfg.samples if monte_carlo_samples is None else monte_carlo_samples
    if n_mc and cfg.seed is not None:
        mc, _ = monte_carlo(spec, FORM_KINDS, cfg.k_max, n_mc, cfg.seed)
    rep = TheoremAReport(fits, ces, mc, census)
    fit_rows = [{"form": f.form, "direction": f.direction, "ks": " ".join(map(str, f.ks)),
                 "delta": f"{f.delta:.6g}", "quality": f"{f.quality:.6g}"} for f in fits]
    _write(cfg, "theorem_a_fits.csv", _csv(("form", "direction", "ks", "delta", "quality"),
                                           fit_rows))
    ces_rows = [{"form": r.form, "l": r.l, "k": k, "rho": f"{v:.12g}"}
                for r in ces for k, v in r.rho]
    _write(cfg, "theorem_a_cesaro.csv", _csv(("form", "l", "k", "rho"), ces_rows))
    if mc:
        _write(cfg, "theorem_a_mc.csv", _csv(
            ("form", "k", "draws", "hits", "predicted", "z", "p_value"),
            [{"form": r.form, "k": r.k, "draws": r.draws, "hits": r.hits,
              "predicted": "" if r.predicted is None else f"{r.predicted:.6g}",
              "z": "" if r.z is None else f"{r.z:.4g}",
              "p_value": "" if r.p_value is None else f"{r.p_value:.4g}"} for r in mc]))
    _write(cfg, "theorem_a_report.txt", rep.render())
    return rep


# ---------------------------------------------------------------------------
# theorem-b report: regular languages of forms and the forbidden-subword bound


def _side_language(spec: GroupSpec, side: str, kind: str) -> GroupAutomaton:
    T = spec.transversal(side)
    letters = tuple(range(1, spec.rank(side) + 1))
    if kind == "unstable_nontrivial":
        A = intersect(factor_automaton(T, "unstable"), nontrivial_words(letters))
    else:
        A = factor_automaton(T, kind)
    return A if side == "A" else A.shifted(spec.rank_a)


def nf_automata(spec: GroupSpec, kind: str) -> tuple[GroupAutomaton, GroupAutomaton]:
    """Automata for a form language and its unstable part over the joint
    alphabet (B letters shifted past the A letters)."""
    lang = {
        "EF": ("nontrivial", "unstable_nontrivial", None, None),
        "RF": ("minus_C", "unstable_minus_C", None, None),
        "CNF": ("reps_nontrivial", "unstable_reps_nontrivial",
                "nontrivial", "unstable_nontrivial"),
    }
    if kind not in lang:
        raise ConfigError(f"no regular language for {kind}")
    body, body_uns, first, first_uns = lang[kind]

    def build(b, f, name):
        L, M = _side_language(spec, "A", b), _side_language(spec, "B", b)
        if f is None:
            return free_product_regular(L, M, name=name)
        return free_product_regular(L, M, _side_language(spec, "A", f),
                                    _side_language(spec, "B", f), name=name)

    return build(body, first, kind), build(body_uns, first_uns, kind + "_uns")


def find_stable_rep(spec: GroupSpec, side: str = "A", max_len: int = 6,
                    R: int | None = None):
    """Shortest nontrivial representative certified stable, or None."""
    T = spec.transversal(side)
    for n in range(1, max_len + 1):
        for s in representatives_of_length(T, n):
            if isinstance(classify_rep(s, T, R).stability, StableCertified):
                return s
    return None


def forbidden_set(spec: GroupSpec, s, side: str = "A") -> list:
    """``W = {y s y'}``: ``s`` framed by letters of the other factor."""
    off = spec.rank_a
    if side == "A":
        ys = [x for j in range(1, spec.rank_b + 1) for x in (j + off, -(j + off))]
        core = tuple(s)
    else:
        ys = [x for j in range(1, spec.rank_a + 1) for x in (j, -j)]
        core = tuple(x + off if x > 0 else x - off for x in s)
    return [(y,) + core + (y2,) for y in ys for y2 in ys]


def contains_factor(word, pats) -> bool:
    word = tuple(word)
    for p in pats:
        m = len(p)
        for i in range(len(word) - m + 1):
            if word[i:i + m] == p:
                return True
    return False


@dataclass
class TheoremBRow:
    form: str
    states: int
    states_uns: int
    exact_containment: bool
    sampled: int
    violations: int
    series: tuple
    sanity: tuple
    delta: float
    quality: float


@dataclass
class TheoremBReport:
    stable_rep: tuple
    rows: list
    threshold: float = 0.95
    min_quality: float = 0.9

    def fit_ok(self, form: str) -> bool:
        r = next(r for r in self.rows if r.form == form)
        return r.delta <= self.threshold and r.quality >= self.min_quality

    def containment_ok(self) -> bool:
        return all(r.exact_containment and r.violations == 0 for r in self.rows)

    def render(self) -> str:
        lines = ["theorem B report", f"certified stable representative: {self.stable_rep}", ""]
        for r in self.rows:
            lines.append(f"{r.form}: states {r.states} (unstable part {r.states_uns}); "
                         f"exact containment {r.exact_containment}; "
                         f"sampled {r.sampled} violations {r.violations}")
            lines.append(f"  decay delta={r.delta:.4f} R2={r.quality:.4f}")
            lines.append("  f'_n(uns) " + " ".join(f"{v:.4g}" for v in r.series))
            lines.append("  f'_n(all) " + " ".join(f"{v:.4g}" for v in r.sanity))
        return "\n".join(lines) + "\n"


def run_theorem_b(cfg: ExperimentConfig, containment_samples: int = 10 ** 5,
                  s: float = 1 / 3) -> TheoremBReport:
    cfg.check()
    spec = cfg.spec
    side = "A" if index(spec.graph("A")) == math.inf else "B"
    stable = find_stable_rep(spec, side, R=cfg.radius)
    if stable is None:
        raise Inconclusive("no certified stable representative within the search bound")
    W = forbidden_set(spec, stable, side)
    letters = tuple(range(1, spec.rank_a + spec.rank_b + 1))
    F0 = forbidden_subword_automaton(W, letters)
    seed = 0 if cfg.seed is None else cfg.seed
    rows = []
    for kind, rng in zip(REGULAR_KINDS, spawn_rngs(seed, len(REGULAR_KINDS))):
        NF, NFu = nf_automata(spec, kind)
        bad = intersect(NFu, complement(F0, letters))
        exact = bad.is_empty()
        E = NFu.expand()
        viol = 0
        for _ in range(containment_samples):
            w = sample_from_automaton(E, s, rng)
            if not F0.accepts(w) or contains_factor(w, W):
                viol += 1
        series = aggregate_series(NF, NFu, cfg.theorem_b_n)
        sanity = aggregate_series(NF, NF, cfg.theorem_b_n)
        ns = [n for n in range(1, cfg.theorem_b_n + 1) if series[n] > 0]
        try:
            delta, q = fit_decay([series[n] for n in ns], ns)
        except InsufficientData:
            delta, q = math.nan, math.nan
        rows.append(TheoremBRow(kind, NF.num_states, NFu.num_states, exact,
                                containment_samples, viol, tuple(series), tuple(sanity),
                                delta, q))
    rep = TheoremBReport(stable, rows)
    series_rows = [{"form": r.form, "n": n, "f_uns": f"{r.series[n]:.12g}",
                    "f_all": f"{r.sanity[n]:.12g}"}
                   for r in rows for n in range(len(r.series))]
    _write(cfg, "theorem_b_series.csv", _csv(("form", "n", "f_uns", "f_all"), series_rows))
    _write(cfg, "theorem_b_report.txt", rep.render())
    return rep


# ---------------------------------------------------------------------------
# config lint


def validate_config(spec: GroupSpec) -> list[str]:
    """Human-readable facts about a spec; raises ConfigError on problems."""
    lines = [f"spec {spec.label or '(inline)'} digest {spec.digest()}"]
    for side in SIDES:
        G = spec.graph(side)
        idx = index(G)
        lines.append(f"  {side}: rank {spec.rank(side)}, core graph {G.num_vertices} vertices, "
                     f"{G.num_edges} edges, index {idx}")
    if all(index(spec.graph(s)) != math.inf for s in SIDES):
        lines.append("  C has finite index in both factors: every form is singular and unstable")
    return lines
