"""Free group words over ranked alphabets.

A word is a tuple of nonzero ints: ``i`` stands for the generator ``x_i`` and
``-i`` for its inverse.  The empty tuple is the identity.  Everything in the
package passes words around as plain tuples; :class:`Alphabet` is only needed
for validation, rendering and parsing.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence

Word = tuple  # tuple[int, ...], freely reduced unless stated otherwise

DEFAULT_NAMES = {
    "A": "abcdefgh",
    "B": "xywvutsr",
    "C": "zpqmnjkl",
}


class MalformedWord(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    rank: int
    tag: str = "A"
    names: tuple = ()

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("alphabet rank must be positive")
        if not self.names:
            pool = DEFAULT_NAMES.get(self.tag, DEFAULT_NAMES["A"])
            if self.rank <= len(pool):
                names = tuple(pool[: self.rank])
            else:
                names = tuple(f"{pool[0]}{i}" for i in range(1, self.rank + 1))
            object.__setattr__(self, "names", names)
        if len(self.names) != self.rank or len(set(self.names)) != self.rank:
            raise ValueError(f"need {self.rank} distinct generator names")
        for name in self.names:
            if not name[:1].islower():
                raise ValueError(f"generator names must start lowercase: {name!r}")

    def letters(self) -> list[int]:
        """Signed letters in shortlex order: x1 < X1 < x2 < X2 < ..."""
        return [x for i in range(1, self.rank + 1) for x in (i, -i)]

    def name(self, letter: int) -> str:
        base = self.names[abs(letter) - 1]
        return base if letter > 0 else base[0].upper() + base[1:]

    def render(self, word: Sequence[int]) -> str:
        return " ".join(self.name(x) for x in word)

    def token_map(self) -> dict[str, int]:
        out = {}
        for i, base in enumerate(self.names, 1):
            out[base] = i
            out[base[0].upper() + base[1:]] = -i
        return out

    def tokenize(self, text: str) -> list[str]:
        text = text.strip()
        if not text or text in ("1", "e"):
            return []
        if any(ch.isspace() for ch in text) or any(len(n) > 1 for n in self.names):
            return text.split()
        return list(text)

    def parse(self, text: str) -> Word:
        table = self.token_map()
        letters = []
        for tok in self.tokenize(text):
            if tok not in table:
                raise MalformedWord(f"unknown letter {tok!r} for alphabet {self.names}")
            letters.append(table[tok])
        return free_reduce(letters, self)

    def owns(self, token: str) -> bool:
        return token in self.token_map()


def letter_key(x: int) -> tuple[int, int]:
    return (abs(x), 1 if x < 0 else 0)


def shortlex_key(word: Sequence[int]):
    return (len(word), [letter_key(x) for x in word])


def free_reduce(letters: Sequence[int], alphabet: Alphabet | None = None) -> Word:
    """Freely reduce a raw letter sequence (stack cancellation)."""
    out: list[int] = []
    for x in letters:
        if x == 0 or (alphabet is not None and abs(x) > alphabet.rank):
            raise MalformedWord(f"letter {x} outside alphabet")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(word: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(word))


def concat_reduce(u: Sequence[int], v: Sequence[int]) -> Word:
    """Reduced product ``u v`` of two reduced words."""
    i = 0
    m = min(len(u), len(v))
    while i < m and u[len(u) - 1 - i] == -v[i]:
        i += 1
    return tuple(u[: len(u) - i]) + tuple(v[i:])


def multiply(*words: Sequence[int]) -> Word:
    out: Word = ()
    for w in words:
        out = concat_reduce(out, w)
    return out


def power(word: Sequence[int], n: int) -> Word:
    if n < 0:
        return power(inverse(word), -n)
    out: Word = ()
    for _ in range(n):
        out = concat_reduce(out, word)
    return out


def is_reduced(word: Sequence[int]) -> bool:
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1))


def cyclic_reduce(word: Sequence[int]) -> tuple[Word, Word]:
    """Split ``w = t core t^-1`` with ``core`` cyclically reduced."""
    w = tuple(word)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i : j + 1], w[:i]


def is_cyclically_reduced(word: Sequence[int]) -> bool:
    return len(word) < 2 or word[0] != -word[-1]


def cyclic_permutations(word: Sequence[int]) -> Iterator[Word]:
    w = tuple(word)
    for i in range(max(len(w), 1)):
        yield w[i:] + w[:i]


def sphere_count(rank: int, n: int) -> int:
    if n < 0:
        raise ValueError("negative length")
    if n == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (n - 1)


def ball_count(rank: int, n: int) -> int:
    return sum(sphere_count(rank, i) for i in range(n + 1))


def enumerate_sphere(rank: int, n: int) -> Iterator[Word]:
    """All reduced words of length exactly ``n``, in shortlex order."""
    letters = [x for i in range(1, rank + 1) for x in (i, -i)]
    if n == 0:
        yield ()
        return
    stack = [()]
    # depth-first with letters pushed in reverse so output is shortlex
    while stack:
        w = stack.pop()
        if len(w) == n:
            yield w
            continue
        for x in reversed(letters):
            if not w or w[-1] != -x:
                stack.append(w + (x,))


def enumerate_ball(rank: int, n: int, start: int = 0) -> Iterator[Word]:
    for k in range(start, n + 1):
        yield from enumerate_sphere(rank, k)


def random_reduced_word(rank: int, length: int, rng: random.Random) -> Word:
    letters = [x for i in range(1, rank + 1) for x in (i, -i)]
    out: list[int] = []
    while len(out) < length:
        x = rng.choice(letters)
        if not out or out[-1] != -x:
            out.append(x)
    return tuple(out)
