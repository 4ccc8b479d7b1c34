"""Measures and densities on free groups and on sets of normal forms.

The basic law is the stopping distribution of a no-return walk on a Cayley
graph: stop with probability ``s`` at each step, otherwise move along one of
the edges that do not go back.  Its mean length is ``l = 1/s - 1``.  Most
masses of regular sets are obtained by running that walk through an
automaton, so no enumeration is needed beyond desk-scale cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .automata import GroupAutomaton
from .subgraph import Transversal, index
from .words import free_reduce, sphere_count


class InsufficientData(ValueError):
    pass


class UnsupportedConfiguration(ValueError):
    pass


@dataclass(frozen=True)
class MeasureParams:
    s: float
    rank: int = 2

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError("stop probability must lie strictly between 0 and 1")
        if self.rank < 1:
            raise ValueError("rank must be positive")

    @property
    def l(self) -> float:
        return 1 / self.s - 1

    @classmethod
    def from_l(cls, l: float, rank: int = 2) -> "MeasureParams":
        return cls(1 / (l + 1), rank)


def mu_s(g: Sequence[int], p: MeasureParams) -> float:
    n = len(free_reduce(g))
    if n == 0:
        return p.s
    return p.s * (1 - p.s) ** n / sphere_count(p.rank, n)


def mu_s_sphere(n: int, p: MeasureParams) -> float:
    return p.s * (1 - p.s) ** n


def visits(w: Sequence[int], T: Transversal, avoid: str = "base") -> int:
    """How often the path of ``w`` (before its last letter) sits on an
    avoided vertex: the base coset, or any vertex of the core graph."""
    G = T.graph
    v = G.base
    inside = True
    count = 0
    for x in w:
        if inside and (v == G.base if avoid == "base" else True):
            count += 1
        if inside:
            t = G.adj[v].get(x)
            if t is None:
                inside = False
            else:
                v = t[0]
    return count


def mu_s_relative(w: Sequence[int], T: Transversal, p: MeasureParams,
                  include_stop: bool = True, avoid: str = "base") -> float:
    """Stopping law of the walk on the Schreier graph that never stops on an
    avoided vertex, evaluated at ``w`` outside ``C``.

    With ``include_stop=False`` the final stopping factor ``s`` is left out.
    """
    G = T.graph
    if index(G) != math.inf:
        raise UnsupportedConfiguration("the walk avoiding C needs C of infinite index")
    w = free_reduce(w)
    end = G.read(w)
    if end == G.base or (avoid == "core" and end is not None):
        raise ValueError("the walk never stops at this word")
    m = visits(w, T, avoid)
    n = len(w)
    r = p.rank
    value = (1 - p.s) ** (n - m) / (2 * r * (2 * r - 1) ** (n - 1))
    return p.s * value if include_stop else value


# ---------------------------------------------------------------------------
# syllable-count laws


DOMAINS = ("N1", "N0", "CRF", "CRF0")


@dataclass(frozen=True)
class ThetaDist:
    """A law on syllable counts; ``j`` indexes the domain from 1."""

    kind: str = "zeta2"  # zeta2 | geometric | uniform
    param: float = 0.0  # p for geometric, K for uniform
    domain: str = "N1"

    def __post_init__(self):
        if self.kind not in ("zeta2", "geometric", "uniform"):
            raise ValueError(f"unknown law {self.kind!r}")
        if self.domain not in DOMAINS:
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.kind == "geometric" and not 0 < self.param <= 1:
            raise ValueError("geometric parameter must lie in (0, 1]")
        if self.kind == "uniform" and (self.param < 1 or int(self.param) != self.param):
            raise ValueError("uniform law needs a positive integer bound")

    def element(self, j: int) -> int:
        if self.domain == "N1":
            return j
        if self.domain == "N0":
            return j - 1
        if self.domain == "CRF":
            return 1 if j == 1 else 2 * (j - 1)
        return {1: 0, 2: 1}.get(j, 2 * (j - 2))

    def position(self, k: int):
        """Index ``j`` of ``k`` in the domain, or None."""
        if self.domain == "N1":
            return k if k >= 1 else None
        if self.domain == "N0":
            return k + 1 if k >= 0 else None
        if self.domain == "CRF":
            if k == 1:
                return 1
            return k // 2 + 1 if k >= 2 and k % 2 == 0 else None
        if k in (0, 1):
            return k + 1
        return k // 2 + 2 if k >= 2 and k % 2 == 0 else None

    def weight(self, j: int) -> float:
        if j < 1:
            return 0.0
        if self.kind == "zeta2":
            return 6 / (math.pi ** 2 * j * j)
        if self.kind == "geometric":
            return self.param * (1 - self.param) ** (j - 1)
        return 1 / self.param if j <= self.param else 0.0

    def pmf(self, k: int) -> float:
        j = self.position(k)
        return 0.0 if j is None else self.weight(j)

    def tail(self, J: int) -> float:
        """Upper bound for the mass beyond the first ``J`` domain points."""
        if self.kind == "zeta2":
            return 6 / (math.pi ** 2 * J) if J > 0 else 1.0
        if self.kind == "geometric":
            return (1 - self.param) ** J
        return max(0.0, 1 - J / self.param)

    def support(self, J: int) -> list[int]:
        return [self.element(j) for j in range(1, J + 1)]

    def sample(self, rng: np.random.Generator, size: int | None = None):
        n = 1 if size is None else size
        if self.kind == "geometric":
            js = rng.geometric(self.param, n)
        elif self.kind == "uniform":
            js = rng.integers(1, int(self.param) + 1, n)
        else:
            js = _zeta2_indices(rng.random(n))
        ks = np.array([self.element(int(j)) for j in js], dtype=np.int64)
        return int(ks[0]) if size is None else ks


_ZETA_TABLE_SIZE = 10 ** 6
_zeta_cdf = None


def _zeta2_indices(u: np.ndarray) -> np.ndarray:
    global _zeta_cdf
    if _zeta_cdf is None:
        j = np.arange(1, _ZETA_TABLE_SIZE + 1, dtype=np.float64)
        _zeta_cdf = np.cumsum(6 / (math.pi ** 2 * j * j))
    out = np.searchsorted(_zeta_cdf, u, side="right") + 1
    big = out > _ZETA_TABLE_SIZE
    if big.any():
        # invert the tail 6/(pi^2 j) beyond the table
        out[big] = np.ceil(6 / (math.pi ** 2 * (1 - u[big]))).astype(np.int64)
    return out


# ---------------------------------------------------------------------------
# free-product measure


def conditioned_mu_s(p: MeasureParams) -> Callable:
    """``mu_s`` restricted to nontrivial words and renormalised."""
    def mu(g):
        g = free_reduce(g)
        return 0.0 if not g else mu_s(g, p) / (1 - p.s)
    return mu


def mu_free_product(f, theta: ThetaDist, mu_A: Callable, mu_B: Callable) -> float:
    """``1/2 theta(k) prod mu(f_i)`` for an alternating mixed word ``f``."""
    k = len(f)
    val = 0.5 * theta.pmf(k)
    for side, w in f:
        val *= mu_A(w) if side == "A" else mu_B(w)
    return val


def layer_mass(i: int, theta: ThetaDist, pA: MeasureParams, pB: MeasureParams,
               L: int = 80) -> float:
    """Total free-product mass of syllable count ``i``, syllables of length ≤ L,
    summed over length classes (exact up to the geometric truncation)."""
    def side_mass(p):
        return sum(mu_s_sphere(n, p) for n in range(1, L + 1)) / (1 - p.s)
    a, b = side_mass(pA), side_mass(pB)
    hi, lo = (i + 1) // 2, i // 2
    return 0.5 * theta.pmf(i) * (a ** hi * b ** lo + a ** lo * b ** hi)


# ---------------------------------------------------------------------------
# frequencies and densities


def frequency(R: Sequence, L: Sequence, n: int):
    """``|R ∩ S_n| / |L ∩ S_n|``, or None where the denominator vanishes."""
    if n >= len(L) or n >= len(R) or L[n] == 0:
        return None
    return Fraction(R[n], L[n]) if isinstance(R[n], int) and isinstance(L[n], int) \
        else R[n] / L[n]


def cumulative(R: Sequence, L: Sequence, N: int | None = None):
    N = min(len(R), len(L)) - 1 if N is None else N
    den = sum(L[: N + 1])
    if den == 0:
        return None
    num = sum(R[: N + 1])
    return Fraction(num, den) if isinstance(num, int) and isinstance(den, int) else num / den


@dataclass(frozen=True)
class CesaroResult:
    value: float
    averages: tuple
    drift: float  # change of the running average over the second half


def cesaro_density(freqs: Sequence) -> CesaroResult:
    vals = [float(f) for f in freqs if f is not None]
    if not vals:
        raise InsufficientData("no defined frequencies")
    avgs = np.cumsum(vals) / np.arange(1, len(vals) + 1)
    half = len(avgs) // 2
    return CesaroResult(float(avgs[-1]), tuple(float(a) for a in avgs),
                        float(abs(avgs[-1] - avgs[half])))


def spherical_density(R: Sequence, L: Sequence):
    return [frequency(R, L, n) for n in range(min(len(R), len(L)))]


def ball_density(R: Sequence, L: Sequence):
    return [cumulative(R, L, n) for n in range(min(len(R), len(L)))]


def parity_product(a, b, k: int):
    """``1/2 (a^ceil(k/2) b^floor(k/2) + a^floor(k/2) b^ceil(k/2))``: the mass of
    ``k``-syllable products when each side contributes ``a`` or ``b``."""
    hi, lo = (k + 1) // 2, k // 2
    return (a ** hi * b ** lo + a ** lo * b ** hi) / 2


def bidim_frequency(QA, QB, TA, TB, k: int):
    """Cell frequency of a free product of factor subsets ``Q`` inside ``T``.

    Arguments are per-factor masses within the cell (counts of the length-≤n
    ball for cardinality, walk masses for the Cesaro variant).  Integer input
    gives an exact Fraction; None marks an empty denominator.
    """
    if isinstance(QA, int) and isinstance(TA, int):
        num = QA ** ((k + 1) // 2) * QB ** (k // 2) + QA ** (k // 2) * QB ** ((k + 1) // 2)
        den = TA ** ((k + 1) // 2) * TB ** (k // 2) + TA ** (k // 2) * TB ** ((k + 1) // 2)
        return None if den == 0 else Fraction(num, den)
    den = parity_product(TA, TB, k)
    return None if den == 0 else parity_product(QA, QB, k) / den


@dataclass(frozen=True)
class DecayFit:
    delta: float
    quality: float
    points: int


def fit_decay(values: Sequence, ts: Sequence | None = None) -> tuple[float, float]:
    """Least-squares slope of ``log values`` against ``t``; returns
    ``(exp(slope), R^2)``.  Nonpositive values are dropped."""
    if ts is None:
        ts = range(len(values))
    pts = [(float(t), float(v)) for t, v in zip(ts, values) if v is not None and v > 0]
    if len(pts) < 4:
        raise InsufficientData(f"need at least 4 positive points, got {len(pts)}")
    t = np.array([p[0] for p in pts])
    y = np.log(np.array([p[1] for p in pts]))
    slope, icept = np.polyfit(t, y, 1)
    resid = y - (slope * t + icept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    quality = 1.0 if ss_tot == 0 else 1 - float(np.sum(resid ** 2)) / ss_tot
    return float(math.exp(slope)), quality


# ---------------------------------------------------------------------------
# walk masses of regular sets


def sphere_fractions(A: GroupAutomaton, n_max: int, rank: int | None = None) -> list[float]:
    """``f_n = |R ∩ S_n| / |S_n|`` by a float DP with uniform no-return weights."""
    letters = A.signed_letters()
    r = rank if rank is not None else len(A.letters)
    layer = {(A.start, 0): 1.0}
    out = []
    for n in range(n_max + 1):
        out.append(sum(w for (q, _), w in layer.items() if q in A.accepting))
        if n == n_max:
            break
        share = 1 / (2 * r) if n == 0 else 1 / (2 * r - 1)
        nxt: dict = {}
        for (q, last), w in layer.items():
            row = A.trans[q]
            for x in letters:
                if x == -last or x not in row:
                    continue
                key = (row[x], x)
                nxt[key] = nxt.get(key, 0.0) + w * share
        layer = nxt
    return out


def mu_s_mass(A: GroupAutomaton, p: MeasureParams, n_max: int = 200) -> tuple[float, float]:
    """``mu_s`` of the language of ``A`` and an upper bound on the truncation."""
    f = sphere_fractions(A, n_max, p.rank)
    mass = sum(p.s * (1 - p.s) ** n * fn for n, fn in enumerate(f))
    return mass, (1 - p.s) ** (n_max + 1)


def relative_walk_mass(A: GroupAutomaton, T: Transversal, p: MeasureParams,
                       n_max: int = 400, avoid: str = "base") -> tuple[float, float]:
    """Mass of ``A``'s language under the walk that never stops at an avoided
    vertex of the Schreier graph.

    ``A`` must be a factor automaton of ``T`` (its state keys locate the walk:
    ``("v", vertex)`` inside the core graph, anything else outside).  Returns
    ``(mass, remaining_walk_mass)``.
    """
    G = T.graph
    r = G.rank
    letters = [x for i in range(1, r + 1) for x in (i, -i)]

    def avoided(state, vertex):
        if vertex is None:
            return False
        return vertex == G.base if avoid == "base" else True

    # state: (automaton state or -1, core vertex or None, last letter)
    layer = {(A.start, G.base, 0): 1.0}
    mass = 0.0
    for n in range(n_max + 1):
        nxt: dict = {}
        for (q, v, last), w in layer.items():
            stop = 0.0 if avoided(q, v) else p.s
            if stop:
                if q >= 0 and q in A.accepting:
                    mass += w * stop
            move = w * (1 - stop)
            share = move / (2 * r if n == 0 else 2 * r - 1)
            for x in letters:
                if x == -last:
                    continue
                q2 = A.trans[q].get(x, -1) if q >= 0 else -1
                if v is not None:
                    t = G.adj[v].get(x)
                    v2 = None if t is None else t[0]
                else:
                    v2 = None
                key = (q2, v2, x)
                nxt[key] = nxt.get(key, 0.0) + share
        layer = nxt
    return mass, sum(layer.values())
