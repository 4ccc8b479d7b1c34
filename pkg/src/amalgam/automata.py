"""Finite automata over group alphabets.

A :class:`GroupAutomaton` is a deterministic, possibly partial automaton
reading signed letters.  It is always interpreted on *reduced* words: a run
never uses the inverse of the letter it just read.  Counting and walk
computations therefore work over pairs ``(state, last letter)``, which is
how the no-backtracking condition is realised without a reduction pass.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .stratify import exit_subset, subset_step, vertex_unstable
from .subgraph import CoreGraph, Transversal
from .words import free_reduce, letter_key


@dataclass(frozen=True, eq=False)
class GroupAutomaton:
    letters: tuple  # positive letters
    trans: tuple  # tuple[dict[int, int], ...] keyed by signed letter
    start: int
    accepting: frozenset
    meta: tuple | None = None
    name: str = ""

    @property
    def num_states(self) -> int:
        return len(self.trans)

    def signed_letters(self) -> list[int]:
        return [x for a in sorted(self.letters) for x in (a, -a)]

    def run(self, word: Sequence[int]):
        q = self.start
        for x in word:
            q = self.trans[q].get(x)
            if q is None:
                return None
        return q

    def accepts(self, word: Sequence[int]) -> bool:
        word = tuple(word)
        if free_reduce(word) != word:
            return False
        q = self.run(word)
        return q is not None and q in self.accepting

    def shifted(self, offset: int) -> "GroupAutomaton":
        """Relabel letter ``x`` as ``x + offset`` (sign preserved)."""
        def sh(x):
            return x + offset if x > 0 else x - offset
        trans = tuple({sh(x): q for x, q in row.items()} for row in self.trans)
        return GroupAutomaton(tuple(a + offset for a in self.letters), trans,
                              self.start, self.accepting, self.meta, self.name)

    # -- reduced-word dynamics -------------------------------------------

    def pair_successors(self, q: int, last: int):
        for x, r in self.trans[q].items():
            if x != -last:
                yield x, r

    def count_by_length(self, n_max: int) -> list[int]:
        """Number of accepted reduced words of each length ``0..n_max``."""
        layer = {(self.start, 0): 1}
        out = []
        for n in range(n_max + 1):
            out.append(sum(c for (q, _), c in layer.items() if q in self.accepting))
            if n == n_max:
                break
            nxt: dict = {}
            for (q, last), c in layer.items():
                for x, r in self.pair_successors(q, last):
                    key = (r, x)
                    nxt[key] = nxt.get(key, 0) + c
            layer = nxt
        return out

    def words_of_length(self, n: int):
        stack = [(self.start, ())]
        while stack:
            q, w = stack.pop()
            if len(w) == n:
                if q in self.accepting:
                    yield w
                continue
            last = w[-1] if w else 0
            for x, r in sorted(self.pair_successors(q, last), key=lambda t: letter_key(t[0]),
                               reverse=True):
                stack.append((r, w + (x,)))

    def expand(self) -> "GroupAutomaton":
        """Equivalent automaton on reachable, co-reachable ``(state, last)``
        pairs; its transitions never backtrack and every state is live."""
        start = (self.start, 0)
        ids = {start: 0}
        order = [start]
        edges: list[dict] = [{}]
        queue = deque([start])
        while queue:
            p = queue.popleft()
            q, last = p
            for x, r in sorted(self.pair_successors(q, last), key=lambda t: letter_key(t[0])):
                np_ = (r, x)
                if np_ not in ids:
                    ids[np_] = len(order)
                    order.append(np_)
                    edges.append({})
                    queue.append(np_)
                edges[ids[p]][x] = ids[np_]
        live = {i for i, (q, _) in enumerate(order) if q in self.accepting}
        rev: list[list[int]] = [[] for _ in order]
        for i, row in enumerate(edges):
            for j in row.values():
                rev[j].append(i)
        stack = list(live)
        while stack:
            j = stack.pop()
            for i in rev[j]:
                if i not in live:
                    live.add(i)
                    stack.append(i)
        if 0 not in live:
            return GroupAutomaton(self.letters, ({},), 0, frozenset(), None, self.name)
        keep = sorted(live)
        new_id = {old: k for k, old in enumerate(keep)}
        trans = tuple({x: new_id[j] for x, j in edges[i].items() if j in new_id} for i in keep)
        acc = frozenset(new_id[i] for i in keep if order[i][0] in self.accepting)
        meta = tuple((self.meta[order[i][0]] if self.meta else order[i][0], order[i][1])
                     for i in keep)
        return GroupAutomaton(self.letters, trans, 0, acc, meta, self.name)

    def prefix_closure(self) -> "GroupAutomaton":
        e = self.expand()
        return GroupAutomaton(e.letters, e.trans, e.start, frozenset(range(e.num_states)),
                              e.meta, self.name + "*")

    def is_prefix_closed(self) -> bool:
        e = self.expand()
        return e.num_states == len(e.accepting) or (not e.accepting and e.num_states == 1
                                                   and not e.trans[0])

    def is_empty(self) -> bool:
        e = self.expand()
        return not e.accepting

    def to_dot(self, name: str = "automaton") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;", '  init [shape=point];']
        for q in range(self.num_states):
            shape = "doublecircle" if q in self.accepting else "circle"
            lines.append(f"  q{q} [shape={shape}];")
        lines.append(f"  init -> q{self.start};")
        for q, row in enumerate(self.trans):
            for x in sorted(row, key=letter_key):
                lines.append(f'  q{q} -> q{row[x]} [label="{x}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        rows = [f"states {self.num_states} start {self.start} letters "
                + ",".join(map(str, self.letters)),
                "accepting " + " ".join(map(str, sorted(self.accepting)))]
        for q, row in enumerate(self.trans):
            for x in sorted(row, key=letter_key):
                rows.append(f"{q} {x} {row[x]}")
        return "\n".join(rows) + "\n"


def _build(letters, start_key, step: Callable, accept: Callable, name="") -> GroupAutomaton:
    """Breadth-first construction from a state-key transition function.

    ``step(key, x)`` returns the successor key or None.
    """
    ids = {start_key: 0}
    keys = [start_key]
    trans: list[dict] = [{}]
    queue = deque([start_key])
    signed = [x for a in sorted(letters) for x in (a, -a)]
    while queue:
        k = queue.popleft()
        for x in signed:
            nk = step(k, x)
            if nk is None:
                continue
            if nk not in ids:
                ids[nk] = len(keys)
                keys.append(nk)
                trans.append({})
                queue.append(nk)
            trans[ids[k]][x] = ids[nk]
    acc = frozenset(i for i, k in enumerate(keys) if accept(k))
    return GroupAutomaton(tuple(sorted(letters)), tuple(trans), 0, acc, tuple(keys), name)


def full_group(letters: Sequence[int] | int, name: str = "F") -> GroupAutomaton:
    if isinstance(letters, int):
        letters = range(1, letters + 1)
    return _build(tuple(letters), 0, lambda k, x: 0, lambda k: True, name)


def nontrivial_words(letters: Sequence[int] | int, name: str = "F-1") -> GroupAutomaton:
    if isinstance(letters, int):
        letters = range(1, letters + 1)
    return _build(tuple(letters), 0, lambda k, x: 1, lambda k: k == 1, name)


def from_core_graph(G: CoreGraph, accept: Sequence[int] | None = None,
                    name: str = "C") -> GroupAutomaton:
    """Automaton reading paths in ``G`` from the base; accepts at ``accept``."""
    acc = {G.base} if accept is None else set(accept)
    return _build(range(1, G.rank + 1), G.base, lambda v, x: G.step(v, x),
                  lambda v: v in acc, name)


def forbidden_subword_automaton(W: Sequence[Sequence[int]], letters: Sequence[int],
                                name: str = "F0") -> GroupAutomaton:
    """Reduced words containing no element of ``W`` as a factor (Aho-Corasick)."""
    pats = [free_reduce(w) for w in W]
    pats = [p for p in pats if p]
    if not pats:
        raise ValueError("forbidden set has no nontrivial word")
    signed = [x for a in sorted(letters) for x in (a, -a)]
    goto: list[dict] = [{}]
    bad = [False]
    for p in pats:
        q = 0
        for x in p:
            if x not in goto[q]:
                goto[q][x] = len(goto)
                goto.append({})
                bad.append(False)
            q = goto[q][x]
        bad[q] = True
    fail = [0] * len(goto)
    delta: list[dict] = [dict() for _ in goto]
    for x in signed:
        delta[0][x] = goto[0].get(x, 0)
    queue = deque()
    for x, q in goto[0].items():
        fail[q] = 0
        queue.append(q)
    while queue:
        q = queue.popleft()
        bad[q] = bad[q] or bad[fail[q]]
        for x in signed:
            if x in goto[q]:
                r = goto[q][x]
                fail[r] = delta[fail[q]][x]
                queue.append(r)
                delta[q][x] = r
            else:
                delta[q][x] = delta[fail[q]][x]
    return _build(tuple(letters), 0,
                  lambda q, x: None if bad[delta[q][x]] else delta[q][x],
                  lambda q: True, name)


def intersect(A: GroupAutomaton, B: GroupAutomaton, name: str = "") -> GroupAutomaton:
    letters = tuple(sorted(set(A.letters) | set(B.letters)))

    def step(k, x):
        p, q = k
        a, b = A.trans[p].get(x), B.trans[q].get(x)
        return None if a is None or b is None else (a, b)

    return _build(letters, (A.start, B.start), step,
                  lambda k: k[0] in A.accepting and k[1] in B.accepting,
                  name or f"({A.name}&{B.name})")


def complement(A: GroupAutomaton, letters: Sequence[int] | None = None,
               name: str = "") -> GroupAutomaton:
    """Reduced words over ``letters`` not accepted by ``A``."""
    letters = tuple(sorted(letters if letters is not None else A.letters))
    sink = -1

    def step(q, x):
        if q == sink:
            return sink
        r = A.trans[q].get(x)
        return sink if r is None else r

    return _build(letters, A.start, step,
                  lambda q: q == sink or q not in A.accepting, name or f"~{A.name}")


def difference(A: GroupAutomaton, B: GroupAutomaton, name: str = "") -> GroupAutomaton:
    letters = tuple(sorted(set(A.letters) | set(B.letters)))
    return intersect(A, complement(B, letters), name or f"({A.name}-{B.name})")


def cone_automaton(u: Sequence[int], letters: Sequence[int]) -> GroupAutomaton:
    u = free_reduce(u)
    n = len(u)

    def step(i, x):
        if i < n:
            return i + 1 if x == u[i] else None
        return n

    return _build(tuple(letters), 0, step, lambda i: i == n, f"cone{u}")


def cone_membership(u: Sequence[int], w: Sequence[int]) -> bool:
    u, w = tuple(u), tuple(w)
    return len(w) >= len(u) and w[: len(u)] == u


def L_cone(A: GroupAutomaton, u: Sequence[int]) -> GroupAutomaton:
    return intersect(A, cone_automaton(u, A.letters), f"{A.name}@{tuple(u)}")


def free_product_regular(L: GroupAutomaton, M: GroupAutomaton,
                         L_first: GroupAutomaton | None = None,
                         M_first: GroupAutomaton | None = None,
                         include_identity: bool = True,
                         name: str = "") -> GroupAutomaton:
    """Alternating products of nontrivial syllables from ``L`` and ``M``.

    The first syllable may come from different languages (``L_first``,
    ``M_first``); pass an automaton with no accepting state to forbid a side
    from starting.  Syllable boundaries are only allowed at accepting states.
    """
    L_first = L if L_first is None else L_first
    M_first = M if M_first is None else M_first
    if set(L.letters) & set(M.letters):
        raise ValueError("free product needs disjoint alphabets")
    sideL, sideM = set(L.letters), set(M.letters)
    comps = {("L", True): L_first, ("L", False): L, ("M", True): M_first, ("M", False): M}

    def side_of(x):
        return "L" if abs(x) in sideL else "M"

    def step(k, x):
        if abs(x) not in sideL and abs(x) not in sideM:
            return None
        sx = side_of(x)
        if k == "start":
            A = comps[(sx, True)]
            r = A.trans[A.start].get(x)
            return None if r is None else (sx, True, r)
        side, first, q = k
        A = comps[(side, first)]
        if sx == side:
            r = A.trans[q].get(x)
            return None if r is None else (side, first, r)
        if q not in A.accepting:
            return None
        B = comps[(sx, False)]
        r = B.trans[B.start].get(x)
        return None if r is None else (sx, False, r)

    def accept(k):
        if k == "start":
            return include_identity
        side, first, q = k
        return q in comps[(side, first)].accepting

    letters = tuple(sorted(sideL | sideM))
    return _build(letters, "start", step, accept, name or f"({L.name}*{M.name})")


def minimize(A: GroupAutomaton) -> GroupAutomaton:
    """Moore partition refinement (plain DFA semantics, sink added and removed)."""
    signed = A.signed_letters()
    n = A.num_states
    sink = n

    def tr(q, x):
        return sink if q == sink else A.trans[q].get(x, sink)

    block = [1 if q in A.accepting else 0 for q in range(n)] + [0]
    while True:
        sig = {}
        new = []
        for q in range(n + 1):
            key = (block[q],) + tuple(block[tr(q, x)] for x in signed)
            new.append(sig.setdefault(key, len(sig)))
        if len(sig) == len(set(block)):
            break
        block = new
    sink_block = block[sink]
    dead = {b for b in set(block) if b == sink_block}
    ids: dict = {}
    for q in range(n):
        if block[q] not in dead:
            ids.setdefault(block[q], len(ids))
    trans: list[dict] = [dict() for _ in ids]
    for q in range(n):
        b = block[q]
        if b in dead:
            continue
        for x in signed:
            r = tr(q, x)
            if block[r] not in dead:
                trans[ids[b]][x] = ids[block[r]]
    if block[A.start] in dead:
        return GroupAutomaton(A.letters, ({},), 0, frozenset(), None, A.name)
    acc = frozenset(ids[block[q]] for q in A.accepting if block[q] not in dead)
    return GroupAutomaton(A.letters, tuple(trans), ids[block[A.start]], acc, None, A.name)


# ---------------------------------------------------------------------------
# walk weights


def walk_graph(L: GroupAutomaton) -> GroupAutomaton:
    """The trimmed pair automaton on which the no-return walk runs."""
    return L.expand()


def lambda_walk(L: GroupAutomaton, w: Sequence[int], exact: bool = False,
                _E: GroupAutomaton | None = None):
    """Probability that the uniform no-return walk on ``L`` starts with ``w``."""
    E = walk_graph(L) if _E is None else _E
    one = Fraction(1) if exact else 1.0
    weight = one
    q = E.start
    for x in w:
        row = E.trans[q]
        if x not in row:
            raise ValueError(f"{tuple(w)} is not a prefix of a word in the language")
        weight = weight * one / len(row)
        q = row[x]
    return weight


def aggregate_series(L: GroupAutomaton, R, n_max: int, exact: bool = False) -> list:
    """``f'_n(R, L)`` for ``n = 0..n_max``.

    ``R`` is an automaton (product DP) or a predicate on words (enumeration of
    walk paths, only sensible for small ``n``).
    """
    E = walk_graph(L)
    one = Fraction(1) if exact else 1.0
    zero = one * 0
    if not E.trans[E.start] and E.start not in E.accepting:
        return [zero] * (n_max + 1)
    if callable(R) and not isinstance(R, GroupAutomaton):
        out = [zero] * (n_max + 1)
        stack = [(E.start, (), one)]
        while stack:
            q, w, wt = stack.pop()
            if R(w):
                out[len(w)] += wt
            if len(w) == n_max:
                continue
            row = E.trans[q]
            for x, r in row.items():
                stack.append((r, w + (x,), wt / len(row)))
        return out
    layer = {(E.start, R.start): one}
    out = []
    for n in range(n_max + 1):
        out.append(sum((wt for (q, r), wt in layer.items() if r in R.accepting), zero))
        if n == n_max:
            break
        nxt: dict = {}
        for (q, r), wt in layer.items():
            row = E.trans[q]
            if not row:
                continue
            share = wt / len(row)
            for x, q2 in row.items():
                r2 = R.trans[r].get(x)
                if r2 is None:
                    continue
                key = (q2, r2)
                nxt[key] = nxt.get(key, zero) + share
        layer = nxt
    return out


def aggregate(L: GroupAutomaton, R, n: int, exact: bool = False):
    return aggregate_series(L, R, n, exact)[n]


@dataclass(frozen=True)
class ProbeResult:
    small: bool
    delta: float
    quality: float
    series: tuple


def smallness_probe(A: GroupAutomaton, u: Sequence[int], n_max: int,
                    threshold: float = 0.95, min_quality: float = 0.9) -> ProbeResult:
    """Evidence (never a proof) on whether the ``L``-cone at ``u`` is small."""
    from .measures import fit_decay

    cone = L_cone(A, u)
    series = aggregate_series(A, cone, n_max)
    start = len(tuple(u))
    pts = [(n, series[n]) for n in range(start, n_max + 1) if series[n] > 0]
    if len(pts) < 4 and series[n_max] == 0:
        # the cone is finite: it vanishes outright
        return ProbeResult(True, 0.0, 1.0, tuple(series))
    delta, quality = fit_decay([v for _, v in pts], [n for n, _ in pts])
    small = delta <= threshold and quality >= min_quality
    return ProbeResult(small, delta, quality, tuple(series))


# ---------------------------------------------------------------------------
# factor languages read off a Schreier graph

FACTOR_KINDS = (
    "all", "nontrivial", "C", "minus_C", "unstable", "unstable_minus_C",
    "reps", "reps_nontrivial", "unstable_reps", "unstable_reps_nontrivial",
)


def factor_automaton(T: Transversal, kind: str, name: str | None = None) -> GroupAutomaton:
    """Subsets of one factor described through its Schreier graph.

    ``minus_C`` is the factor minus the subgroup, ``unstable`` the union of
    cosets whose representative is unstable, ``reps`` the transversal, and
    ``*_nontrivial`` drop the identity.  State keys are ``("v", vertex)``
    inside the core graph, ``("out",)`` in a hanging tree, or ``("P", set)``
    while tracking instability of an external representative.
    """
    if kind not in FACTOR_KINDS:
        raise ValueError(f"unknown factor language {kind!r}")
    G = T.graph
    letters = tuple(range(1, G.rank + 1))
    if kind == "all":
        return full_group(letters, name or kind)
    if kind == "nontrivial":
        return nontrivial_words(letters, name or kind)
    tree_only = kind.startswith("reps") or kind.startswith("unstable_reps")
    track = kind.startswith("unstable")
    drop_base = kind.endswith("nontrivial") or kind.endswith("minus_C")
    if kind == "C":
        return from_core_graph(G, name=name or kind)

    def step(k, x):
        tag = k[0]
        if tag == "v":
            v = k[1]
            t = G.adj[v].get(x)
            if t is not None:
                if tree_only and (v, x) not in T.tree:
                    return None
                return ("v", t[0])
            if track:
                P = exit_subset(T, v, x)
                return ("P", P) if P else None
            return ("out",)
        if tag == "out":
            return k
        P = subset_step(G, k[1], x)
        return ("P", P) if P else None

    def accept(k):
        tag = k[0]
        if tag == "v":
            v = k[1]
            if drop_base and v == G.base:
                return False
            return vertex_unstable(T, v) if track else True
        if tag == "out":
            return True
        return G.base in k[1]

    return _build(letters, ("v", G.base), step, accept, name or kind)
