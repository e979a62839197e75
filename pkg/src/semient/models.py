"""A small catalog of concrete normed semigroups.

The additive naturals carry several norms with different behaviour under
iteration; the free semigroup on letters indexed by the integers carries
the two word norms that separate right and left trajectory entropy.
"""

from __future__ import annotations

import math
import operator

from .errors import DomainError
from .semigroup import NormedSemigroupModel, SemigroupEndomorphism


def digit_sum(n: int, base: int) -> int:
    total = 0
    while n:
        n, r = divmod(n, base)
        total += r
    return total


def naturals(norm: str = "id", base: int = 2, bound: int = 7) -> NormedSemigroupModel:
    """``(N, +)`` with one of the norms ``id``, ``log1p``, ``sqrt``, ``digits`` or ``bounded``."""
    if norm == "id":
        v, arithmetic, s_mono = (lambda x: x), False, True
    elif norm == "log1p":
        v, arithmetic, s_mono = (lambda x: math.log1p(x)), True, True
    elif norm == "sqrt":
        v, arithmetic, s_mono = (lambda x: math.sqrt(x)), False, True
    elif norm == "digits":
        if base < 2:
            raise DomainError("digit-sum base must be at least 2")
        v, arithmetic, s_mono = (lambda x: digit_sum(x, base)), True, False
    elif norm == "bounded":
        v, arithmetic, s_mono = (lambda x: min(x, bound)), True, True
    else:
        raise DomainError(f"unknown norm {norm!r}")
    label = f"digits{base}" if norm == "digits" else (f"min(x,{bound})" if norm == "bounded" else norm)
    return NormedSemigroupModel(
        op=operator.add, norm=v, identity=0, name=f"(N,+,{label})",
        claims_arithmetic=arithmetic, claims_s_monotone=s_mono, commutative=True,
        size=lambda x: x.bit_length(),
    )


def multiply_by(k: int, contractive: bool = True) -> SemigroupEndomorphism:
    return SemigroupEndomorphism(lambda x: k * x, contractive, f"x↦{k}x")


# ---------------------------------------------------------------------------
# free semigroup on letters x_i, i an integer; words are tuples of indices
# ---------------------------------------------------------------------------


def ascents(word: tuple) -> int:
    return sum(1 for a, b in zip(word, word[1:]) if a < b)


def ascent_norm(word: tuple) -> int:
    """One more than the number of adjacent ascents."""
    return ascents(word) + 1


def longest_unit_run(word: tuple) -> int:
    """Length of the longest stretch of consecutive letters stepping up by exactly one."""
    best = run = 1
    for a, b in zip(word, word[1:]):
        run = run + 1 if b == a + 1 else 1
        best = max(best, run)
    return best


def free_semigroup(norm: str = "ascent") -> NormedSemigroupModel:
    if norm == "ascent":
        v = ascent_norm
    elif norm == "unit_run":
        v = longest_unit_run
    else:
        raise DomainError(f"unknown word norm {norm!r}")
    return NormedSemigroupModel(
        op=operator.add, norm=v, name=f"free semigroup ({norm})", size=len,
    )


def index_shift(k: int = 1) -> SemigroupEndomorphism:
    """The automorphism sending each letter ``x_i`` to ``x_{i+k}``."""
    return SemigroupEndomorphism(lambda w: tuple(i + k for i in w), True, f"shift{k:+d}")


def word(*indices: int) -> tuple:
    if not indices:
        raise DomainError("the free semigroup has no empty word")
    return tuple(indices)


def predicted_ascent_entropy(w: tuple, left: bool = False) -> int:
    """Closed form of the right (or left) entropy of ``w`` under the unit index shift.

    Each junction between consecutive shifted copies adds one ascent
    exactly when the last letter of one copy is below the first letter of
    the next.
    """
    first, last = w[0], w[-1]
    if left:
        return ascents(w) + (1 if first > last + 1 else 0)
    return ascents(w) + (1 if last <= first else 0)
