"""Stallings subgroup graphs of finitely generated subgroups of free groups.

A :class:`CoreGraph` is a folded, based graph whose reduced closed paths at
the base spell exactly the elements of the subgroup.  Every edge carries a
*decoration*, a word over the subgroup's own basis ``Z``; reading a loop at
the base and multiplying the decorations gives the loop's expression in that
basis.  Decorations are maintained through folding with vertex potentials,
which is what makes membership witnesses (and the translation of subgroup
elements between factors of an amalgam) possible.

Vertices are integers ``0..n-1`` and the base is always ``0``.  The
adjacency ``adj[v]`` maps a *signed* letter ``x`` to ``(w, deco)``: reading
``x`` at ``v`` leads to ``w`` and contributes ``deco``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .words import (
    Alphabet,
    Word,
    concat_reduce,
    free_reduce,
    inverse,
    letter_key,
    multiply,
)


class NotABasis(ValueError):
    """The supplied generators do not form a free basis of the subgroup."""


@dataclass(frozen=True, eq=False)
class CoreGraph:
    rank: int
    num_vertices: int
    adj: tuple  # tuple[dict[int, tuple[int, Word]], ...]
    num_generators: int | None = None
    is_basis: bool = False
    base: int = 0

    @property
    def edges(self) -> list[tuple[int, int, int, Word]]:
        """Positive edges ``(origin, letter, target, deco)``."""
        out = []
        for v, row in enumerate(self.adj):
            for x, (w, d) in row.items():
                if x > 0:
                    out.append((v, x, w, d))
        out.sort(key=lambda e: (e[0], e[1], e[2]))
        return out

    @property
    def num_edges(self) -> int:
        return sum(1 for row in self.adj for x in row if x > 0)

    def cycle_rank(self) -> int:
        return self.num_edges - self.num_vertices + 1

    def letters(self) -> list[int]:
        return [x for i in range(1, self.rank + 1) for x in (i, -i)]

    def step(self, v: int, x: int):
        t = self.adj[v].get(x)
        return None if t is None else t[0]

    def read(self, word: Sequence[int], start: int = 0):
        """Follow ``word`` from ``start``; return the end vertex or None."""
        v = start
        for x in word:
            t = self.adj[v].get(x)
            if t is None:
                return None
            v = t[0]
        return v

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def is_folded(self) -> bool:
        # dict rows make outgoing labels unique; check incoming uniqueness too
        for v in range(self.num_vertices):
            seen = set()
            for x, (w, _) in self.adj[v].items():
                back = self.adj[w].get(-x)
                if back is None or back[0] != v:
                    return False
                seen.add(x)
        return True

    def diameter(self) -> int:
        best = 0
        for v in range(self.num_vertices):
            dist = {v: 0}
            queue = deque([v])
            while queue:
                u = queue.popleft()
                for w, _ in self.adj[u].values():
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            best = max(best, max(dist.values()))
        return best

    def to_dot(self, alphabet: Alphabet | None = None, name: str = "core") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for v in range(self.num_vertices):
            shape = "doublecircle" if v == self.base else "circle"
            lines.append(f'  v{v} [shape={shape}, label="{v}"];')
        zalpha = Alphabet(self.num_generators, "C") if self.num_generators else None
        for o, x, t, d in self.edges:
            label = alphabet.name(x) if alphabet else str(x)
            tip = zalpha.render(d) if (zalpha and d) else " ".join(map(str, d))
            lines.append(f'  v{o} -> v{t} [label="{label}", tooltip="{tip}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        """Plain serialization: header line, then one edge per line."""
        head = f"vertices {self.num_vertices} base {self.base} rank {self.rank}"
        head += f" generators {self.num_generators or 0} basis {int(self.is_basis)}"
        rows = [head]
        for o, x, t, d in self.edges:
            rows.append(f"{o} {x} {t} " + ",".join(map(str, d)))
        return "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CoreGraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        tok = lines[0].split()
        fields_ = dict(zip(tok[::2], tok[1::2]))
        n = int(fields_["vertices"])
        adj: list[dict] = [dict() for _ in range(n)]
        for ln in lines[1:]:
            parts = ln.split()
            o, x, t = int(parts[0]), int(parts[1]), int(parts[2])
            d = tuple(int(c) for c in parts[3].split(",")) if len(parts) > 3 else ()
            adj[o][x] = (t, d)
            adj[t][-x] = (o, inverse(d))
        gens = int(fields_.get("generators", 0)) or None
        return cls(int(fields_["rank"]), n, tuple(adj), gens,
                   bool(int(fields_.get("basis", 0))))


class _Folder:
    """Incremental folding with vertex potentials over ``F(Z)``.

    Merging vertex ``a`` into ``b`` records a potential ``phi`` such that a
    path arriving at ``a`` with accumulated decoration ``Q`` is equivalent to
    one arriving at ``b`` with ``Q phi``.
    """

    def __init__(self):
        self.adj: dict[int, dict[int, tuple[int, Word]]] = {}
        self.redirect: dict[int, tuple[int, Word]] = {}
        self.pending: deque = deque()
        self.consistent = True
        self.base = self.new_vertex()

    def new_vertex(self) -> int:
        v = len(self.adj) + len(self.redirect)
        while v in self.adj or v in self.redirect:
            v += 1
        self.adj[v] = {}
        return v

    def find(self, v: int) -> tuple[int, Word]:
        phi: Word = ()
        while v in self.redirect:
            w, p = self.redirect[v]
            phi = concat_reduce(phi, p)
            v = w
        return v, phi

    def add_edge(self, v: int, x: int, w: int, d: Word = ()):
        self.pending.append((v, x, w, tuple(d)))
        while self.pending:
            v, x, w, d = self.pending.popleft()
            v, pv = self.find(v)
            w, pw = self.find(w)
            self._insert(v, x, w, multiply(inverse(pv), d, pw))

    def add_path(self, start: int, word: Sequence[int], end: int, first_deco: Word = ()):
        if not word:
            return
        prev = start
        for i, x in enumerate(word):
            nxt = end if i == len(word) - 1 else self.new_vertex()
            self.add_edge(prev, x, nxt, first_deco if i == 0 else ())
            prev = nxt

    def _insert(self, v, x, w, d):
        cur = self.adj[v].get(x)
        if cur is not None:
            w1, d1 = cur
            if w1 == w:
                if d1 != d:
                    self.consistent = False
                return
            self._merge_pair(w, d, w1, d1)
            return
        cur = self.adj[w].get(-x)
        if cur is not None:
            v1, e = cur
            if v1 == v:
                if e != inverse(d):
                    self.consistent = False
                return
            self._merge_pair(v, inverse(d), v1, e)
            return
        self.adj[v][x] = (w, d)
        self.adj[w][-x] = (v, inverse(d))

    def _merge_pair(self, a, da, b, db):
        # the same path reaches a with decoration P da and b with P db
        if a == self.base:
            self._merge(b, a, multiply(inverse(db), da))
        else:
            self._merge(a, b, multiply(inverse(da), db))

    def _merge(self, a, b, phi):
        self.redirect[a] = (b, phi)
        row = self.adj.pop(a)
        for y, (u, e) in row.items():
            if u != a:
                del self.adj[u][-y]
            elif y < 0:
                continue  # loop already carried by its positive entry
            self.pending.append((a, y, u, e))

    def finish(self, rank: int, num_generators: int | None) -> CoreGraph:
        return _finalize(self.adj, self.base, rank, num_generators, self.consistent)


def _finalize(adj: dict, base, rank: int, num_generators, consistent: bool) -> CoreGraph:
    """Trim hanging trees (keeping the base) and renumber canonically."""
    adj = {v: dict(row) for v, row in adj.items()}
    # drop anything not connected to the base
    seen = {base}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for w, _ in adj[u].values():
            if w not in seen:
                seen.add(w)
                queue.append(w)
    adj = {v: row for v, row in adj.items() if v in seen}
    leaves = [v for v in adj if v != base and len(adj[v]) <= 1]
    while leaves:
        v = leaves.pop()
        if v not in adj or len(adj[v]) > 1:
            continue
        for y, (u, _) in adj.pop(v).items():
            del adj[u][-y]
            if u != base and len(adj[u]) <= 1:
                leaves.append(u)
    # canonical BFS numbering in shortlex letter order
    order = {base: 0}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for x in sorted(adj[u], key=letter_key):
            w = adj[u][x][0]
            if w not in order:
                order[w] = len(order)
                queue.append(w)
    new_adj: list[dict] = [dict() for _ in range(len(order))]
    for v, row in adj.items():
        for x in sorted(row, key=letter_key):
            w, d = row[x]
            new_adj[order[v]][x] = (order[w], d)
    n = len(order)
    edges = sum(1 for row in new_adj for x in row if x > 0)
    basis = (
        consistent
        and num_generators is not None
        and edges - n + 1 == num_generators
    )
    return CoreGraph(rank, n, tuple(new_adj), num_generators, basis)


def fold(generators: Iterable[Sequence[int]], rank: int | None = None) -> CoreGraph:
    """Core graph of the subgroup generated by ``generators``.

    Generator ``i`` (1-based) becomes the basis letter ``z_i``; its loop's
    first edge is decorated with ``(i,)``.
    """
    gens = [free_reduce(g) for g in generators]
    if rank is None:
        rank = max((abs(x) for g in gens for x in g), default=1)
    folder = _Folder()
    for i, g in enumerate(gens, 1):
        if any(abs(x) > rank for x in g):
            raise ValueError(f"generator {g} uses letters beyond rank {rank}")
        folder.add_path(folder.base, g, folder.base, (i,))
    graph = folder.finish(rank, len(gens))
    if any(len(g) == 0 for g in gens):
        graph = CoreGraph(graph.rank, graph.num_vertices, graph.adj,
                          graph.num_generators, False)
    return graph


def fold_basis(generators: Sequence[Sequence[int]], rank: int | None = None) -> CoreGraph:
    """Like :func:`fold`, but insist that the generators form a free basis."""
    graph = fold(generators, rank)
    if not graph.is_basis:
        raise NotABasis(
            f"generators span a subgroup of rank {graph.cycle_rank()}, "
            f"not a free basis of size {len(list(generators))}"
        )
    return graph


def membership(g: Sequence[int], G: CoreGraph) -> tuple[bool, Word | None]:
    """Decide ``g in C``; on success also return its expression over ``Z``."""
    g = free_reduce(g)
    v = G.base
    deco: list[int] = []
    for x in g:
        t = G.adj[v].get(x)
        if t is None:
            return False, None
        v, d = t
        deco.extend(d)
    if v != G.base:
        return False, None
    return True, free_reduce(deco)


def accepts(G: CoreGraph, g: Sequence[int]) -> bool:
    return G.read(g) == G.base


def index(G: CoreGraph):
    """Index of the subgroup: an int when finite, ``math.inf`` otherwise."""
    full = 2 * G.rank
    if all(len(row) == full for row in G.adj):
        return G.num_vertices
    return math.inf


def substitute(zword: Sequence[int], images: Sequence[Sequence[int]]) -> Word:
    """Image of a ``Z``-word under ``z_i -> images[i-1]``."""
    out: Word = ()
    for z in zword:
        img = tuple(images[abs(z) - 1])
        out = concat_reduce(out, img if z > 0 else inverse(img))
    return out


@dataclass(eq=False)
class Transversal:
    """Schreier transversal read off a shortlex breadth-first spanning tree.

    Internal representatives are stored per vertex; external ones (paths that
    leave the core graph into a hanging Cayley tree) are decided on demand.
    Stratum counts depend on the tree; this one is fixed and canonical.
    """

    graph: CoreGraph
    rep: list = field(default_factory=list)
    parent: list = field(default_factory=list)  # (parent vertex, letter) or None
    tree: frozenset = frozenset()  # signed (vertex, letter) pairs along tree edges
    cache: dict = field(default_factory=dict)

    @property
    def base(self) -> int:
        return self.graph.base

    def is_tree_edge(self, v: int, x: int) -> bool:
        return (v, x) in self.tree

    def frontier(self) -> list[int]:
        full = 2 * self.graph.rank
        return [v for v in range(self.graph.num_vertices) if len(self.graph.adj[v]) < full]

    def missing_letters(self, v: int) -> list[int]:
        return [x for x in self.graph.letters() if x not in self.graph.adj[v]]

    def max_rep_length(self) -> int:
        return max(len(r) for r in self.rep)

    def trace(self, w: Sequence[int]):
        """Locate ``w`` in the Schreier graph.

        Returns ``("in", v, tree_only)`` if the whole path stays in the core
        graph, or ``("out", v, i, tree_only)`` if letter ``w[i]`` is missing
        at vertex ``v``; ``tree_only`` says whether only tree edges were used
        before that point.
        """
        G = self.graph
        v = G.base
        tree_only = True
        for i, x in enumerate(w):
            t = G.adj[v].get(x)
            if t is None:
                return ("out", v, i, tree_only)
            if (v, x) not in self.tree:
                tree_only = False
            v = t[0]
        return ("in", v, tree_only)

    def is_representative(self, w: Sequence[int]) -> bool:
        w = tuple(w)
        if len(w) != len(free_reduce(w)):
            return False
        return self.trace(w)[-1]

    def is_internal(self, s: Sequence[int]) -> bool:
        return self.trace(s)[0] == "in"

    def coset_decompose(self, g: Sequence[int]) -> tuple[Word, Word]:
        """Split ``g = c s`` with ``c`` in the subgroup and ``s`` in ``S``."""
        g = free_reduce(g)
        res = self.trace(g)
        if res[0] == "in":
            s = tuple(self.rep[res[1]])
        else:
            _, v, i, _ = res
            s = tuple(self.rep[v]) + g[i:]
        return concat_reduce(g, inverse(s)), s

    def representative_of(self, g: Sequence[int]) -> Word:
        return self.coset_decompose(g)[1]


def schreier_transversal(G: CoreGraph) -> Transversal:
    rep: list = [None] * G.num_vertices
    parent: list = [None] * G.num_vertices
    rep[G.base] = ()
    tree = set()
    queue = deque([G.base])
    while queue:
        u = queue.popleft()
        for x in sorted(G.adj[u], key=letter_key):
            w = G.adj[u][x][0]
            if rep[w] is None:
                rep[w] = rep[u] + (x,)
                parent[w] = (u, x)
                tree.add((u, x))
                tree.add((w, -x))
                queue.append(w)
    return Transversal(G, rep, parent, frozenset(tree))


def pullback(G1: CoreGraph, G2: CoreGraph) -> CoreGraph:
    """Core graph of ``C1 ∩ C2`` (decorations inherited from ``G1``)."""
    if G1.rank != G2.rank:
        raise ValueError("pullback needs graphs over the same alphabet")
    start = (G1.base, G2.base)
    ids = {start: 0}
    adj: dict[int, dict] = {0: {}}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        v1, v2 = p
        for x, (w1, d) in G1.adj[v1].items():
            t2 = G2.adj[v2].get(x)
            if t2 is None:
                continue
            q = (w1, t2[0])
            if q not in ids:
                ids[q] = len(ids)
                adj[ids[q]] = {}
                queue.append(q)
            adj[ids[p]][x] = (ids[q], d)
    return _finalize(adj, 0, G1.rank, G1.num_generators, G1.is_basis)


def conjugate_graph(G: CoreGraph, w: Sequence[int]) -> CoreGraph:
    """Core graph of ``w^-1 C w``."""
    w = free_reduce(w)
    folder = _Folder()
    old = {G.base: folder.base}
    for v in range(G.num_vertices):
        if v not in old:
            old[v] = folder.new_vertex()
    for o, x, t, d in G.edges:
        folder.add_edge(old[o], x, old[t], d)
    if w:
        nb = folder.new_vertex()
        folder.base = nb
        folder.add_path(nb, inverse(w), old[G.base])
    return folder.finish(G.rank, G.num_generators)


def count_reduced_accepted(G: CoreGraph, n: int, start: int | None = None,
                           end: int | None = None) -> int:
    """Number of reduced words of length ``n`` labelling a path ``start -> end``."""
    start = G.base if start is None else start
    end = G.base if end is None else end
    if n == 0:
        return 1 if start == end else 0
    layer = {(start, 0): 1}
    for _ in range(n):
        nxt: dict = {}
        for (v, last), cnt in layer.items():
            for x, (w, _) in G.adj[v].items():
                if x == -last:
                    continue
                key = (w, x)
                nxt[key] = nxt.get(key, 0) + cnt
        layer = nxt
    return sum(c for (v, _), c in layer.items() if v == end)
