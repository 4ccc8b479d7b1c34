"""Elements of an amalgamated product ``G = A *_C B`` and their normal forms.

``A = F(X)`` and ``B = F(Y)`` are free, and ``C = F(Z)`` embeds in both via
the words ``u_z`` (in ``A``) and ``v_z`` (in ``B``).  An element of ``G`` is
handled as a *mixed word*: a tuple of syllables ``(side, word)`` with
``side`` in ``{"A", "B"}``.  Elements of ``C`` are stored as words over
``Z`` and only translated into ``X`` or ``Y`` at factor boundaries.

Four normal forms are produced:

* ``EF``  freely reduced alternating syllables, no use of the amalgamation;
* ``RF``  alternating syllables none of which lies in ``C``;
* ``CNF`` ``c p_1 ... p_l`` with ``c`` over ``Z`` and nontrivial transversal
  representatives ``p_i``, which is unique per element;
* ``CRF`` a conjugate that is cyclically reduced: ``k = 0``, or ``k = 1``
  with the syllable not conjugate into ``C``, or ``k`` even.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

from .stratify import (
    RepClass,
    StableCertified,
    Unstable,
    classify_rep,
    conjugate_into,
    conjugate_into_witness,
)
from .subgraph import CoreGraph, Transversal, fold, membership, schreier_transversal, substitute
from .words import Alphabet, MalformedWord, Word, concat_reduce, free_reduce, inverse, shortlex_key

SIDES = ("A", "B")

Syllable = tuple  # (side, Word)
MixedWord = tuple  # tuple[Syllable, ...]


class ConfigError(ValueError):
    """Invalid group description."""


def other(side: str) -> str:
    return "B" if side == "A" else "A"


@dataclass(eq=False)
class GroupSpec:
    rank_a: int
    rank_b: int
    rank_c: int
    u: tuple  # u_z as A-words, one per basis letter of C
    v: tuple  # v_z as B-words
    names_a: tuple = ()
    names_b: tuple = ()
    names_c: tuple = ()
    label: str = ""

    def __post_init__(self):
        if min(self.rank_a, self.rank_b, self.rank_c) < 1:
            raise ConfigError("all ranks must be at least 1")
        self.u = tuple(free_reduce(w) for w in self.u)
        self.v = tuple(free_reduce(w) for w in self.v)
        if len(self.u) != self.rank_c or len(self.v) != self.rank_c:
            raise ConfigError(f"need exactly {self.rank_c} u_z and v_z words")
        try:
            self.alpha = {
                "A": Alphabet(self.rank_a, "A", tuple(self.names_a)),
                "B": Alphabet(self.rank_b, "B", tuple(self.names_b)),
                "C": Alphabet(self.rank_c, "C", tuple(self.names_c)),
            }
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        names = [set(self.alpha[k].names) for k in "ABC"]
        if names[0] & names[1] or names[0] & names[2] or names[1] & names[2]:
            raise ConfigError("generator names must differ across A, B and C")
        for side, words, rank in (("A", self.u, self.rank_a), ("B", self.v, self.rank_b)):
            for w in words:
                if any(abs(x) > rank for x in w):
                    raise ConfigError(f"embedding word {w} exceeds rank of {side}")
            g = fold(words, rank)
            if not g.is_basis:
                raise ConfigError(
                    f"the {side}-side embedding words are not a free basis "
                    f"(subgroup rank {g.cycle_rank()}, expected {self.rank_c})"
                )

    # derived structure -----------------------------------------------------

    @cached_property
    def graphs(self) -> dict:
        return {"A": fold(self.u, self.rank_a), "B": fold(self.v, self.rank_b)}

    @cached_property
    def transversals(self) -> dict:
        return {s: schreier_transversal(self.graphs[s]) for s in SIDES}

    def graph(self, side: str) -> CoreGraph:
        return self.graphs[side]

    def transversal(self, side: str) -> Transversal:
        return self.transversals[side]

    def rank(self, side: str) -> int:
        return {"A": self.rank_a, "B": self.rank_b, "C": self.rank_c}[side]

    def embed(self, zword: Sequence[int], side: str) -> Word:
        return substitute(zword, self.u if side == "A" else self.v)

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:12]

    # spec files --------------------------------------------------------------

    def to_text(self) -> str:
        rows = [f"rank_a = {self.rank_a}", f"rank_b = {self.rank_b}",
                f"rank_c = {self.rank_c}"]
        for key, side in (("names_a", "A"), ("names_b", "B"), ("names_c", "C")):
            rows.append(f"{key} = {' '.join(self.alpha[side].names)}")
        rows += [f"u_z = {self.alpha['A'].render(w)}" for w in self.u]
        rows += [f"v_z = {self.alpha['B'].render(w)}" for w in self.v]
        return "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str, label: str = "") -> "GroupSpec":
        vals: dict = {}
        us, vs = [], []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, val = (p.strip() for p in line.split("=", 1))
            if key == "u_z":
                us.append(val)
            elif key == "v_z":
                vs.append(val)
            elif key in ("rank_a", "rank_b", "rank_c"):
                try:
                    vals[key] = int(val)
                except ValueError:
                    raise ConfigError(f"line {lineno}: {key} must be an integer") from None
            elif key in ("names_a", "names_b", "names_c"):
                vals[key] = tuple(val.split())
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        for key in ("rank_a", "rank_b", "rank_c"):
            if key not in vals:
                raise ConfigError(f"missing {key}")
        try:
            alpha_a = Alphabet(vals["rank_a"], "A", vals.get("names_a", ()))
            alpha_b = Alphabet(vals["rank_b"], "B", vals.get("names_b", ()))
            u = tuple(alpha_a.parse(w) for w in us)
            v = tuple(alpha_b.parse(w) for w in vs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return cls(vals["rank_a"], vals["rank_b"], vals["rank_c"], u, v,
                   vals.get("names_a", ()), vals.get("names_b", ()),
                   vals.get("names_c", ()), label)

    @classmethod
    def from_file(cls, path) -> "GroupSpec":
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read spec file {p}: {exc}") from exc
        return cls.from_text(text, p.stem)


DATA_DIR = Path(__file__).parent / "data"


def reference_spec() -> GroupSpec:
    """``F(a,b) *_C F(x,y)`` with ``C = <z>``, ``z = a^2 = x^3``."""
    return GroupSpec.from_file(DATA_DIR / "reference.spec")


def finite_index_spec() -> GroupSpec:
    """Both embeddings of ``C`` have index 2."""
    return GroupSpec.from_file(DATA_DIR / "finite_index.spec")


# ---------------------------------------------------------------------------
# mixed words


def normalize_syllables(g: MixedWord) -> MixedWord:
    """Drop empty syllables and merge equal-side neighbours (free reduction)."""
    out: list = []
    for side, w in g:
        if side not in SIDES:
            raise MalformedWord(f"unknown factor tag {side!r}")
        w = free_reduce(w)
        if not w:
            continue
        if out and out[-1][0] == side:
            # the stack alternates, so one merge is all that can happen
            merged = concat_reduce(out.pop()[1], w)
            if merged:
                out.append((side, merged))
        else:
            out.append((side, w))
    return tuple(out)


def mixed_inverse(g: MixedWord) -> MixedWord:
    return tuple((side, inverse(w)) for side, w in reversed(g))


def mixed_product(*gs: MixedWord) -> MixedWord:
    out: tuple = ()
    for g in gs:
        out = out + tuple(g)
    return normalize_syllables(out)


def joint_word(g: MixedWord, spec: GroupSpec) -> Word:
    """Word over the joint alphabet: B letter ``j`` becomes ``rank_a + j``."""
    out: list = []
    for side, w in g:
        if side == "A":
            out.extend(w)
        else:
            out.extend(x + spec.rank_a if x > 0 else x - spec.rank_a for x in w)
    return tuple(out)


def split_joint(word: Sequence[int], spec: GroupSpec) -> MixedWord:
    out: list = []
    for x in word:
        side = "A" if abs(x) <= spec.rank_a else "B"
        y = x if side == "A" else (x - spec.rank_a if x > 0 else x + spec.rank_a)
        if out and out[-1][0] == side:
            out[-1] = (side, out[-1][1] + (y,))
        else:
            out.append((side, (y,)))
    return tuple(out)


@dataclass(frozen=True)
class NormalForm:
    kind: str
    head: Word = ()  # word over Z
    body: MixedWord = ()
    conjugator: MixedWord | None = None

    @property
    def k(self) -> int:
        return len(self.body)

    def element(self, spec: GroupSpec, head_side: str | None = None) -> MixedWord:
        """Mixed word for the element (conjugator ignored for CRF)."""
        if head_side is None:
            head_side = self.body[0][0] if self.body else "A"
        head = ((head_side, spec.embed(self.head, head_side)),) if self.head else ()
        return head + tuple(self.body)

    def render(self, spec: GroupSpec) -> str:
        return render_form(self, spec)


# ---------------------------------------------------------------------------
# translations and forms


def translate_C(c: Sequence[int], spec: GroupSpec, direction: str = "AB") -> Word:
    """Rewrite an element of ``C`` from one factor's letters to the other's."""
    src, dst = direction[0], direction[1]
    ok, z = membership(c, spec.graph(src))
    if not ok:
        raise ValueError(f"{tuple(c)} is not in the amalgamated subgroup of {src}")
    return spec.embed(z, dst)


def c_witness(c: Sequence[int], spec: GroupSpec, side: str) -> Word:
    ok, z = membership(c, spec.graph(side))
    if not ok:
        raise ValueError(f"{tuple(c)} is not in C")
    return z


def in_C(w: Sequence[int], spec: GroupSpec, side: str) -> bool:
    G = spec.graph(side)
    return G.read(w) == G.base


def to_free_form(g: MixedWord, spec: GroupSpec | None = None) -> NormalForm:
    return NormalForm("EF", (), normalize_syllables(g))


def _reduce_syllables(g: MixedWord, spec: GroupSpec) -> tuple[Word, MixedWord]:
    """Core of the reduced form: returns ``(head over Z, body)``."""
    body = list(normalize_syllables(g))
    while True:
        hit = next((i for i, (side, w) in enumerate(body) if in_C(w, spec, side)), None)
        if hit is None:
            return (), tuple(body)
        side, w = body[hit]
        if len(body) == 1:
            return c_witness(w, spec, side), ()
        body[hit] = (other(side), translate_C(w, spec, side + other(side)))
        body = list(normalize_syllables(tuple(body)))


def to_reduced_form(g: MixedWord, spec: GroupSpec) -> NormalForm:
    head, body = _reduce_syllables(g, spec)
    return NormalForm("RF", head, body)


def to_canonical_form(g: MixedWord, spec: GroupSpec) -> NormalForm:
    head, body = _reduce_syllables(g, spec)
    if not body:
        return NormalForm("CNF", head, ())
    carry: Word = ()
    reps: list = []
    for side, w in reversed(body):
        w = concat_reduce(w, spec.embed(carry, side))
        c, s = spec.transversal(side).coset_decompose(w)
        carry = c_witness(c, spec, side)
        reps.append((side, s))
    return NormalForm("CNF", carry, tuple(reversed(reps)))


def _rotation_key(body: MixedWord):
    return tuple((side, shortlex_key(w)) for side, w in body)


def to_cyclically_reduced_form(g: MixedWord, spec: GroupSpec) -> NormalForm:
    """Conjugate ``g`` into cyclically reduced form; ``g = h w h^-1`` where
    ``h`` is the returned ``conjugator``."""
    head, body = _reduce_syllables(g, spec)
    h: MixedWord = ()
    while True:
        k = len(body)
        if k == 0:
            return NormalForm("CRF", head, (), normalize_syllables(h))
        if k == 1:
            side, w = body[0]
            hit = conjugate_into_witness(w, spec.graph(side))
            if hit is None:
                return NormalForm("CRF", (), body, normalize_syllables(h))
            t, c = hit
            h = h + ((side, t),)
            return NormalForm("CRF", c_witness(c, spec, side), (), normalize_syllables(h))
        if k % 2 == 0:
            best, best_j = None, 0
            for j in range(k):
                rot = body[j:] + body[:j]
                key = _rotation_key(rot)
                if best is None or key < best:
                    best, best_j = key, j
            h = h + tuple(body[:best_j])
            body = body[best_j:] + body[:best_j]
            return NormalForm("CRF", (), body, normalize_syllables(h))
        # odd k >= 3: conjugate the last syllable round to the front
        last = body[-1]
        h = h + ((last[0], inverse(last[1])),)
        head, body = _reduce_syllables((last,) + tuple(body[:-1]), spec)


def to_form(g: MixedWord, spec: GroupSpec, kind: str) -> NormalForm:
    return {
        "EF": to_free_form,
        "RF": to_reduced_form,
        "CNF": to_canonical_form,
        "CRF": to_cyclically_reduced_form,
    }[kind](g, spec)


def element_of(nf: NormalForm, spec: GroupSpec) -> MixedWord:
    """The element a form stands for (for CRF: ``h w h^-1``)."""
    g = nf.element(spec)
    if nf.kind == "CRF" and nf.conjugator:
        g = mixed_product(nf.conjugator, g, mixed_inverse(nf.conjugator))
    return g


def same_element(g: MixedWord, h: MixedWord, spec: GroupSpec) -> bool:
    return to_canonical_form(g, spec) == to_canonical_form(h, spec)


# ---------------------------------------------------------------------------
# validation and classification


def _alternates(body: MixedWord) -> bool:
    return all(body[i][0] != body[i + 1][0] for i in range(len(body) - 1))


def validate(nf: NormalForm, spec: GroupSpec) -> bool:
    body = nf.body
    if not _alternates(body) or any(not w or free_reduce(w) != w for _, w in body):
        return False
    if any(side not in SIDES for side, _ in body):
        return False
    if nf.kind == "EF":
        return not nf.head
    if nf.kind == "RF":
        if nf.head and body:
            return False
        return all(not in_C(w, spec, s) for s, w in body)
    if nf.kind == "CNF":
        return all(spec.transversal(s).is_representative(w) for s, w in body)
    if nf.kind == "CRF":
        k = len(body)
        if k == 0:
            return True
        if k == 1:
            # a head is folded into the single syllable
            side, w = body[0]
            w = concat_reduce(spec.embed(nf.head, side), w)
            return not conjugate_into(w, spec.graph(side))
        return k % 2 == 0 and all(not in_C(w, spec, s) for s, w in body)
    return False


@dataclass(frozen=True)
class FormClass:
    regular: bool
    stable: bool
    indeterminate: bool
    syllables: tuple = field(default=())

    @property
    def singular(self) -> bool:
        return not self.regular

    @property
    def unstable(self) -> bool:
        return not self.stable


def syllable_class(side: str, w: Sequence[int], spec: GroupSpec, R=None,
                   exact: bool = True) -> RepClass:
    T = spec.transversal(side)
    s = T.representative_of(w)
    return classify_rep(s, T, R, exact)


def classify_form(nf: NormalForm, spec: GroupSpec, R=None, exact: bool = True) -> FormClass:
    if not nf.body:
        return FormClass(False, False, False, ())
    classes = tuple(syllable_class(s, w, spec, R, exact) for s, w in nf.body)
    regular = any(not c.singular for c in classes)
    stable = any(isinstance(c.stability, StableCertified) for c in classes)
    indeterminate = not stable and any(
        not isinstance(c.stability, (Unstable, StableCertified)) for c in classes
    )
    return FormClass(regular, stable, indeterminate, classes)


# ---------------------------------------------------------------------------
# text syntax: "[z] a a | x Y", uppercase for inverses


def parse_element(text: str, spec: GroupSpec) -> MixedWord:
    text = text.strip()
    head: MixedWord = ()
    if text.startswith("["):
        end = text.find("]")
        if end < 0:
            raise MalformedWord("unterminated head bracket")
        z = spec.alpha["C"].parse(text[1:end])
        text = text[end + 1 :].strip()
        head = (("A", spec.embed(z, "A")),) if z else ()
    out: list = list(head)
    if text:
        for chunk in text.split("|"):
            chunk = chunk.strip()
            if not chunk:
                continue
            side = _side_of_chunk(chunk, spec)
            out.append((side, spec.alpha[side].parse(chunk)))
    return tuple(out)


def _side_of_chunk(chunk: str, spec: GroupSpec) -> str:
    for side in SIDES:
        alpha = spec.alpha[side]
        try:
            toks = alpha.tokenize(chunk)
        except ValueError:
            continue
        if toks and all(alpha.owns(t) for t in toks):
            return side
    raise MalformedWord(f"syllable {chunk!r} is not a word over A or B")


def render_element(g: MixedWord, spec: GroupSpec) -> str:
    if not g:
        return "1"
    return " | ".join(spec.alpha[s].render(w) for s, w in g)


def render_form(nf: NormalForm, spec: GroupSpec) -> str:
    parts = []
    if nf.head or not nf.body:
        parts.append(f"[{spec.alpha['C'].render(nf.head)}]")
    if nf.body:
        parts.append(render_element(nf.body, spec))
    out = " ".join(parts)
    if nf.kind == "CRF" and nf.conjugator:
        out += " ; conj " + render_element(nf.conjugator, spec)
    return out
