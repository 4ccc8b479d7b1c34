"""Random words and random normal forms.

All randomness flows through :class:`numpy.random.Generator` instances
(PCG64).  Independent streams for parallel tasks are spawned from one master
seed with :class:`numpy.random.SeedSequence`, so a seed fixes every output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .forms import GroupSpec, NormalForm, SIDES, other
from .measures import MeasureParams, ThetaDist, UnsupportedConfiguration
from .stratify import conjugate_into
from .subgraph import Transversal, index
from .words import Word, concat_reduce


class SamplerStarvation(RuntimeError):
    """A rejection loop exhausted its attempt budget."""


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(ss))
            for ss in np.random.SeedSequence(seed).spawn(n)]


def _letters(rank: int) -> np.ndarray:
    return np.array([x for i in range(1, rank + 1) for x in (i, -i)], dtype=np.int64)


def _step_letter(rng: np.random.Generator, rank: int, last: int) -> int:
    """Uniform letter that does not cancel ``last`` (0 means no constraint)."""
    letters = 2 * rank
    if last == 0:
        i = int(rng.integers(letters))
    else:
        banned = 2 * (abs(last) - 1) + (0 if -last > 0 else 1)
        i = int(rng.integers(letters - 1))
        if i >= banned:
            i += 1
    return (i // 2 + 1) * (1 if i % 2 == 0 else -1)


def sample_mu_s(p: MeasureParams, rng: np.random.Generator) -> Word:
    """One draw of the stopping point of the no-return walk."""
    n = int(rng.geometric(p.s)) - 1
    out: list = []
    last = 0
    for _ in range(n):
        last = _step_letter(rng, p.rank, last)
        out.append(last)
    return tuple(out)


def sample_mu_s_batch(p: MeasureParams, rng: np.random.Generator, size: int):
    """Vectorised draws: returns ``(lengths, letters)`` where row ``i`` of the
    signed-letter matrix holds the word in its first ``lengths[i]`` columns."""
    lengths = rng.geometric(p.s, size).astype(np.int64) - 1
    width = int(lengths.max()) if size else 0
    r = p.rank
    table = _letters(r)
    idx = np.zeros((size, width), dtype=np.int64)
    if width:
        idx[:, 0] = rng.integers(2 * r, size=size)
        for j in range(1, width):
            prev = idx[:, j - 1]
            banned = prev ^ 1  # the inverse sits next to each letter in the table
            draw = rng.integers(2 * r - 1, size=size)
            idx[:, j] = draw + (draw >= banned)
    words = table[idx] if width else idx
    mask = np.arange(width)[None, :] < lengths[:, None]
    return lengths, np.where(mask, words, 0)


def batch_to_words(lengths, letters) -> list:
    return [tuple(int(x) for x in row[:n]) for n, row in zip(lengths, letters)]


def sample_factor_minus_C(T: Transversal, p: MeasureParams, rng: np.random.Generator,
                          avoid: str = "base", max_steps: int = 10 ** 4) -> Word:
    """Walk on the Schreier graph that never stops on an avoided vertex.

    The output is never in ``C``.
    """
    G = T.graph
    if index(G) != math.inf:
        raise UnsupportedConfiguration(
            "the subgroup has finite index here, so the walk avoiding it cannot be used")
    v = G.base  # None once the walk has left the core graph
    out: list = []
    last = 0
    for _ in range(max_steps):
        avoided = v is not None and (v == G.base or avoid == "core")
        if not avoided and rng.random() < p.s:
            return tuple(out)
        last = _step_letter(rng, G.rank, last)
        out.append(last)
        if v is not None:
            t = G.adj[v].get(last)
            v = None if t is None else t[0]
    raise SamplerStarvation(f"walk did not stop within {max_steps} steps")


def sample_C(spec: GroupSpec, p: MeasureParams, rng: np.random.Generator) -> Word:
    """Element of ``C`` as a word over its own basis ``Z``."""
    return sample_mu_s(MeasureParams(p.s, spec.rank_c), rng)


def _nontrivial(p: MeasureParams, rng, max_tries: int = 10 ** 5) -> Word:
    for _ in range(max_tries):
        w = sample_mu_s(p, rng)
        if w:
            return w
    raise SamplerStarvation("could not draw a nontrivial word")


@dataclass
class SamplerStats:
    attempts: int = 0
    accepted: int = 0
    rejections_by_k: dict = field(default_factory=dict)

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else float("nan")


def _params(spec: GroupSpec, s: float, side: str) -> MeasureParams:
    return MeasureParams(s, spec.rank(side))


def rg_ef(spec: GroupSpec, theta: ThetaDist, s_A: float, s_B: float,
          rng: np.random.Generator) -> NormalForm:
    """Alternating nontrivial syllables; ``k = 0`` gives the identity."""
    k = theta.sample(rng)
    side = SIDES[int(rng.integers(2))]
    ss = {"A": s_A, "B": s_B}
    body = []
    for _ in range(k):
        body.append((side, _nontrivial(_params(spec, ss[side], side), rng)))
        side = other(side)
    return NormalForm("EF", (), tuple(body))


def rg_rf(spec: GroupSpec, theta: ThetaDist, s_A: float, s_B: float,
          rng: np.random.Generator) -> NormalForm:
    k = theta.sample(rng)
    side = SIDES[int(rng.integers(2))]
    ss = {"A": s_A, "B": s_B}
    if k == 0:
        return NormalForm("RF", sample_C(spec, _params(spec, ss[side], side), rng), ())
    body = []
    for _ in range(k):
        T = spec.transversal(side)
        body.append((side, sample_factor_minus_C(T, _params(spec, ss[side], side), rng)))
        side = other(side)
    return NormalForm("RF", (), tuple(body))


def rg_cnf(spec: GroupSpec, theta: ThetaDist, s_A: float, s_B: float,
           rng: np.random.Generator) -> NormalForm:
    k = theta.sample(rng)
    side = SIDES[int(rng.integers(2))]
    ss = {"A": s_A, "B": s_B}
    head = sample_C(spec, _params(spec, ss[side], side), rng)
    body = []
    for _ in range(k):
        T = spec.transversal(side)
        g = sample_factor_minus_C(T, _params(spec, ss[side], side), rng)
        body.append((side, T.representative_of(g)))
        side = other(side)
    return NormalForm("CNF", head, tuple(body))


def rg_crf(spec: GroupSpec, theta: ThetaDist, s_A: float, s_B: float,
           rng: np.random.Generator, max_attempts: int = 10 ** 5,
           stats: SamplerStats | None = None) -> NormalForm:
    """Cyclically reduced forms with ``k`` in ``{0, 1, 2, 4, ...}``.

    Syllables are drawn outside every conjugate of ``C`` by rejection; for
    ``k = 1`` the final syllable ``c s_1`` is re-checked as well.
    """
    k = theta.sample(rng)
    if k > 1 and k % 2:
        raise ValueError("syllable-count law must live on {0, 1} and the even numbers")
    stats = stats if stats is not None else SamplerStats()
    side = SIDES[int(rng.integers(2))]
    ss = {"A": s_A, "B": s_B}
    first = side

    def draw(side_):
        T = spec.transversal(side_)
        G = spec.graph(side_)
        p = _params(spec, ss[side_], side_)
        for _ in range(max_attempts):
            stats.attempts += 1
            g = sample_factor_minus_C(T, p, rng)
            if not conjugate_into(g, G):
                stats.accepted += 1
                return T.representative_of(g)
            stats.rejections_by_k[k] = stats.rejections_by_k.get(k, 0) + 1
        raise SamplerStarvation(
            f"no element outside the conjugates of C after {max_attempts} draws "
            f"(side {side_}, acceptance {stats.acceptance_rate:.3g})")

    for _ in range(max_attempts):
        head = sample_C(spec, _params(spec, ss[first], first), rng)
        if k == 0:
            return NormalForm("CRF", head, (), ())
        body = []
        side = first
        for _ in range(k):
            body.append((side, draw(side)))
            side = other(side)
        if k == 1:
            w = concat_reduce(spec.embed(head, first), body[0][1])
            if conjugate_into(w, spec.graph(first)):
                stats.rejections_by_k[1] = stats.rejections_by_k.get(1, 0) + 1
                continue
        return NormalForm("CRF", head, tuple(body), ())
    raise SamplerStarvation(f"k = 1 rejection loop exceeded {max_attempts} attempts")


GENERATORS = {"EF": rg_ef, "RF": rg_rf, "CNF": rg_cnf, "CRF": rg_crf}


def dump_header(seed: int, s_A: float, s_B: float, theta: ThetaDist, spec: GroupSpec) -> str:
    return (f"# seed={seed} s_A={s_A} s_B={s_B} theta={theta.kind}:{theta.param}:"
            f"{theta.domain} spec={spec.digest()}\n")


def sample_from_automaton(E, s: float, rng: np.random.Generator,
                          max_steps: int = 10 ** 5) -> Word:
    """Walk on a trimmed automaton (see ``GroupAutomaton.expand``): at an
    accepting state stop with probability ``s``, otherwise take a uniform
    outgoing letter.  Accepting states without exits always stop."""
    q = E.start
    out: list = []
    for _ in range(max_steps):
        row = E.trans[q]
        if q in E.accepting and (not row or rng.random() < s):
            return tuple(out)
        letters = sorted(row)
        x = letters[int(rng.integers(len(letters)))]
        out.append(x)
        q = row[x]
    raise SamplerStarvation(f"walk did not stop within {max_steps} steps")
