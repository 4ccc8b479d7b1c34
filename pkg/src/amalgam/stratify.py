"""Classification of Schreier representatives.

Each representative ``s`` is internal or external (does its path stay inside
the core graph?), singular or regular (``s^-1 C s ∩ C`` nontrivial or not)
and stable or unstable (does ``s c`` stay a representative for every
``c`` in ``C``?).

Stability is decided exactly.  ``s c`` can only fail to be a representative
if the cancellation in ``s c`` stops at an internal prefix ``s'`` of ``s``;
writing ``s = s' u`` and ``c = u^-1 c'``, a witness exists iff some reduced
``c'`` runs, inside the core graph, from the vertex ``z`` reached by ``u^-1``
back to the base, while the same word read from the vertex of ``s'`` leaves
the spanning tree before it leaves the core graph.  That is a reachability
question in the product of the core graph with itself.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

from .subgraph import (
    CoreGraph,
    Transversal,
    conjugate_graph,
    pullback,
)
from .words import Word, concat_reduce, cyclic_reduce, free_reduce, inverse, letter_key


@dataclass(frozen=True)
class Unstable:
    witness: Word


@dataclass(frozen=True)
class StableCertified:
    pass


@dataclass(frozen=True)
class StableUpTo:
    radius: int


@dataclass(frozen=True)
class RepClass:
    internal: bool
    singular: bool
    stability: object

    @property
    def unstable(self) -> bool:
        return isinstance(self.stability, Unstable)

    @property
    def certified_stable(self) -> bool:
        return isinstance(self.stability, StableCertified)


def is_singular(s: Sequence[int], C: CoreGraph) -> bool:
    """True iff ``s^-1 C s`` meets ``C`` nontrivially."""
    return pullback(conjugate_graph(C, s), C).cycle_rank() >= 1


def unstable_witness_check(s: Sequence[int], c: Sequence[int], T: Transversal) -> bool:
    if T.graph.read(c) != T.base:
        raise ValueError("witness candidate is not in the subgroup")
    return not T.is_representative(concat_reduce(tuple(s), tuple(c)))


def default_radius(T: Transversal) -> int:
    return 2 * T.max_rep_length() + 2 * T.graph.diameter() + 4


def loops(G: CoreGraph, max_len: int) -> Iterator[Word]:
    """Nontrivial reduced closed paths at the base, by increasing length."""
    for n in range(1, max_len + 1):
        stack = [(G.base, ())]
        while stack:
            v, w = stack.pop()
            if len(w) == n:
                if v == G.base:
                    yield w
                continue
            for x in sorted(G.adj[v], key=letter_key, reverse=True):
                if w and w[-1] == -x:
                    continue
                stack.append((G.adj[v][x][0], w + (x,)))


def _escape_search(T: Transversal, z: int, w: int, forbid: frozenset):
    """Shortest reduced ``c'`` with ``z·c' = base`` in the core graph while
    ``w·c'`` uses a non-tree edge before leaving the core graph.

    Returns the word or None.  Memoised on the transversal.
    """
    key = ("escape", z, w, forbid)
    if key in T.cache:
        return T.cache[key]
    G = T.graph
    start = (z, w, 0, False)
    prev = {start: None}
    queue = deque([start])
    found = None
    while queue and found is None:
        state = queue.popleft()
        zp, wp, last, flag = state
        for x in sorted(G.adj[zp], key=letter_key):
            if x == -last or (last == 0 and x in forbid):
                continue
            zn = G.adj[zp][x][0]
            if flag:
                nxt = (zn, -1, x, True)
            else:
                t = G.adj[wp].get(x)
                if t is None:
                    continue  # left the core graph along the tree: still a rep
                if (wp, x) in T.tree:
                    nxt = (zn, t[0], x, False)
                else:
                    nxt = (zn, -1, x, True)
            if nxt in prev:
                continue
            prev[nxt] = (state, x)
            if nxt[3] and zn == G.base:
                found = nxt
                break
            queue.append(nxt)
    result = None
    if found is not None:
        letters = []
        cur = found
        while prev[cur] is not None:
            cur, x = prev[cur]
            letters.append(x)
        result = tuple(reversed(letters))
    T.cache[key] = result
    return result


def _internal_prefix_vertices(T: Transversal, s: Sequence[int]) -> list[int]:
    """Vertices reached by the prefixes of ``s`` that stay in the core graph."""
    G = T.graph
    v = G.base
    out = [v]
    for x in s:
        t = G.adj[v].get(x)
        if t is None:
            break
        v = t[0]
        out.append(v)
    return out


def exact_unstable_witness(s: Sequence[int], T: Transversal) -> Word | None:
    """A shortest-per-split ``c`` in ``C`` with ``s c`` outside ``S``, or None."""
    s = tuple(s)
    G = T.graph
    verts = _internal_prefix_vertices(T, s)
    best = None
    for j in range(len(verts) - 1, -1, -1):
        u = s[j:]
        z = G.read(inverse(u))
        if z is None:
            continue
        forbid = set()
        if u:
            forbid.add(u[0])
        if j > 0:
            forbid.add(-s[j - 1])
        tail = _escape_search(T, z, verts[j], frozenset(forbid))
        if tail is not None:
            c = inverse(u) + tail
            if best is None or len(c) < len(best):
                best = c
    return best


def prefilter_stable(s: Sequence[int], T: Transversal) -> bool:
    """Coset test: stable is certified if ``s2 s1^-1 s`` is never in ``C``."""
    reps = T.rep
    for s1 in reps:
        for s2 in reps:
            g = concat_reduce(concat_reduce(s2, inverse(s1)), tuple(s))
            if T.graph.read(g) == T.base:
                return False
    return True


def classify_stability(s: Sequence[int], T: Transversal, R: int | None = None,
                       exact: bool = True):
    """Unstable(witness), StableCertified, or (with ``exact=False``) StableUpTo(R)."""
    s = free_reduce(s)
    if not T.is_representative(s):
        raise ValueError(f"{s} is not a Schreier representative")
    key = ("stability", s, R, exact)
    if key in T.cache:
        return T.cache[key]
    if R is None:
        R = default_radius(T)
    result = None
    if prefilter_stable(s, T):
        result = StableCertified()
    else:
        for c in loops(T.graph, R):
            if unstable_witness_check(s, c, T):
                result = Unstable(c)
                break
        if result is None:
            if exact:
                w = exact_unstable_witness(s, T)
                result = StableCertified() if w is None else Unstable(w)
            else:
                result = StableUpTo(R)
    T.cache[key] = result
    return result


def classify_rep(s: Sequence[int], T: Transversal, R: int | None = None,
                 exact: bool = True) -> RepClass:
    s = free_reduce(s)
    key = ("class", s, R, exact)
    if key not in T.cache:
        T.cache[key] = RepClass(
            T.is_internal(s),
            is_singular(s, T.graph),
            classify_stability(s, T, R, exact),
        )
    return T.cache[key]


def conjugate_into_witness(g: Sequence[int], C: CoreGraph):
    """If ``g = h c h^-1`` with ``c`` in ``C``, return ``(h, c)``; else None."""
    core, t = cyclic_reduce(free_reduce(g))
    if not core:
        return t, ()
    for v in range(C.num_vertices):
        if C.read(core, v) == v:
            # core is a loop at v; move it to the base along any path
            p = _path_from_base(C, v)
            c = concat_reduce(concat_reduce(p, core), inverse(p))
            return concat_reduce(t, inverse(p)), c
    return None


def conjugate_into(g: Sequence[int], C: CoreGraph) -> bool:
    return conjugate_into_witness(g, C) is not None


def _path_from_base(C: CoreGraph, v: int) -> Word:
    prev = {C.base: None}
    queue = deque([C.base])
    while queue:
        u = queue.popleft()
        if u == v:
            break
        for x in sorted(C.adj[u], key=letter_key):
            w = C.adj[u][x][0]
            if w not in prev:
                prev[w] = (u, x)
                queue.append(w)
    out = []
    while prev[v] is not None:
        v, x = prev[v]
        out.append(x)
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# vertex-level data used by the automata layer


def vertex_unstable(T: Transversal, v: int) -> bool:
    """Is the internal representative of vertex ``v`` unstable?"""
    key = ("vertex_unstable", v)
    if key not in T.cache:
        T.cache[key] = exact_unstable_witness(T.rep[v], T) is not None
    return T.cache[key]


def vertex_singular(T: Transversal, v: int) -> bool:
    key = ("vertex_singular", v)
    if key not in T.cache:
        T.cache[key] = is_singular(T.rep[v], T.graph)
    return T.cache[key]


def tree_path_vertices(T: Transversal, v: int) -> list[int]:
    G = T.graph
    out = [G.base]
    for x in T.rep[v]:
        out.append(G.adj[out[-1]][x][0])
    return out


def exit_subset(T: Transversal, v: int, x: int) -> frozenset:
    """Tracking set for external representatives ``rep(v) x q``.

    ``rep(v) x q`` is unstable iff reading ``q`` from the returned set of
    vertices (dropping those where the letter is missing) can reach the base.
    """
    key = ("exit", v, x)
    if key in T.cache:
        return T.cache[key]
    G = T.graph
    rep = T.rep[v]
    verts = tree_path_vertices(T, v)
    out = set()
    for j in range(len(rep) + 1):
        r = rep[j:]
        forbid = {r[0] if r else x}
        if j > 0:
            forbid.add(-rep[j - 1])
        forbid = frozenset(forbid)
        for z in range(G.num_vertices):
            p = G.read(r + (x,), z)
            if p is None or p in out:
                continue
            if _escape_search(T, z, verts[j], forbid) is not None:
                out.add(p)
    result = frozenset(out)
    T.cache[key] = result
    return result


def subset_step(G: CoreGraph, P: frozenset, x: int) -> frozenset:
    return frozenset(G.adj[p][x][0] for p in P if x in G.adj[p])


# ---------------------------------------------------------------------------
# censuses


def representatives_of_length(T: Transversal, n: int) -> Iterator[Word]:
    """All representatives of length ``n`` in shortlex order (S is prefix-closed)."""
    letters = T.graph.letters()
    stack = [()]
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
            continue
        for x in reversed(letters):
            if w and w[-1] == -x:
                continue
            cand = w + (x,)
            if T.is_representative(cand):
                stack.append(cand)


CENSUS_FIELDS = ("n", "total", "internal", "external", "singular", "unstable",
                 "stable_certified", "stable_up_to_R")


class GuardExceeded(RuntimeError):
    pass


def stratify_sphere(T: Transversal, n: int, R: int | None = None,
                    exact: bool = True, max_n: int = 10) -> dict:
    if n < 0:
        raise ValueError("negative length")
    if n > max_n:
        raise GuardExceeded(f"sphere radius {n} exceeds guard {max_n}")
    rec = dict.fromkeys(CENSUS_FIELDS, 0)
    rec["n"] = n
    for s in representatives_of_length(T, n):
        cls = classify_rep(s, T, R, exact)
        if cls.singular and cls.certified_stable:
            raise AssertionError(f"singular representative {s} certified stable")
        rec["total"] += 1
        rec["internal" if cls.internal else "external"] += 1
        rec["singular"] += cls.singular
        if cls.unstable:
            rec["unstable"] += 1
        elif cls.certified_stable:
            rec["stable_certified"] += 1
        else:
            rec["stable_up_to_R"] += 1
    return rec
