"""Free groups of finite rank with endomorphisms given on generators.

A reduced word is a tuple of nonzero integers: ``k`` stands for the
generator ``k-1`` and ``-k`` for its inverse.  In string form generators
are the letters ``a, b, c, ...`` and capitals are inverses.
"""

from __future__ import annotations

from typing import Iterable

from .errors import DomainError

LETTERS = "abcdefghijklmnopqrstuvwxyz"


def reduce_word(letters: Iterable[int]) -> tuple:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise DomainError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(u: tuple, v: tuple) -> tuple:
    """Concatenate two reduced words, cancelling only at the junction."""
    i = 0
    n = min(len(u), len(v))
    while i < n and u[-1 - i] == -v[i]:
        i += 1
    return u[: len(u) - i] + v[i:]


def inverse(w: tuple) -> tuple:
    return tuple(-x for x in reversed(w))


def parse_word(text: str) -> tuple:
    text = text.strip()
    if text in ("", "1", "e"):
        return ()
    out = []
    for ch in text:
        k = LETTERS.find(ch.lower())
        if k < 0:
            raise DomainError(f"cannot parse {ch!r} in word {text!r}")
        out.append(k + 1 if ch.islower() else -(k + 1))
    return reduce_word(out)


def format_word(w: tuple) -> str:
    if not w:
        return "1"
    return "".join(LETTERS[abs(x) - 1] if x > 0 else LETTERS[abs(x) - 1].upper() for x in w)


class FreeGroupFlow:
    """An endomorphism of the free group of rank ``rank``."""

    def __init__(self, rank: int, images: dict | None = None, name: str = ""):
        if rank < 1 or rank > len(LETTERS):
            raise DomainError(f"rank {rank} out of range")
        self.rank = rank
        self.name = name
        images = images or {}
        self.images = []
        for i in range(rank):
            w = images.get(i, (i + 1,))
            if isinstance(w, str):
                w = parse_word(w)
            w = reduce_word(w)
            if any(abs(x) > rank for x in w):
                raise DomainError(f"image of generator {i} uses letters beyond rank {rank}")
            self.images.append(w)

    def op(self, u: tuple, v: tuple) -> tuple:
        return multiply(u, v)

    def canonical(self, w) -> tuple:
        if isinstance(w, str):
            return parse_word(w)
        return reduce_word(w)

    def apply(self, w: tuple) -> tuple:
        out: tuple = ()
        for x in w:
            img = self.images[abs(x) - 1]
            out = multiply(out, img if x > 0 else inverse(img))
        return out

    __call__ = apply

    def generators(self) -> list[tuple]:
        return [(i + 1,) for i in range(self.rank)]

    def symmetric_generators(self, with_identity: bool = True) -> list[tuple]:
        out = [()] if with_identity else []
        for i in range(self.rank):
            out += [(i + 1,), (-(i + 1),)]
        return out

    def word_length(self, w: tuple) -> int:
        return len(w)


def free_identity(rank: int = 2) -> FreeGroupFlow:
    return FreeGroupFlow(rank, name="id")

