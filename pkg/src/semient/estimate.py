"""Limits of trajectory norm sequences.

Two estimators share the ``EntropyEstimate`` record:

* ``fekete_estimate`` for additive norm values ``c_n``: the limit is read
  off an affine tail of the sequence, and ``min c_n / n`` is always
  available as an upper bound.
* ``count_estimate`` for norms of the form ``log |T_n|``: the counts are
  searched for a linear recurrence, whose dominant root gives the growth
  rate exactly.  Without a recurrence it falls back to the first
  estimator on the logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .errors import DomainError
from .exact import IntPolynomial, lcm


class Verdict(str, Enum):
    EXACT = "ExactLimit"
    UPPER = "UpperBound"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ExactValue:
    """``coefficient`` itself, or ``coefficient * log(base)`` when a base is set."""

    coefficient: Fraction
    base: Fraction | None = None

    def __float__(self):
        if self.base is None:
            return float(self.coefficient)
        if self.coefficient == 0 or self.base == 1:
            return 0.0
        if self.coefficient == 1:
            return _log(self.base)
        return float(self.coefficient) * _log(self.base)

    def is_zero(self) -> bool:
        return self.coefficient == 0 or self.base == 1

    def equals(self, other: "ExactValue") -> bool:
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        if (self.base is None) != (other.base is None):
            return False
        if self.base is None:
            return self.coefficient == other.coefficient
        # a log x = b log y  <=>  x^a = y^b, compared after clearing denominators
        d = lcm(self.coefficient.denominator, other.coefficient.denominator)
        p, q = int(self.coefficient * d), int(other.coefficient * d)
        lhs = _power(self.base, p)
        rhs = _power(other.base, q)
        return lhs == rhs

    def __str__(self):
        if self.base is None:
            return str(self.coefficient)
        if self.is_zero():
            return "0"
        coef = "" if self.coefficient == 1 else f"{self.coefficient}*"
        return f"{coef}log({self.base})"


def _log(x: Fraction) -> float:
    x = Fraction(x)
    if x.denominator == 1:
        return math.log(x.numerator)
    return math.log(x.numerator) - math.log(x.denominator)


def _power(x: Fraction, k: int) -> Fraction:
    return Fraction(x) ** k


@dataclass(frozen=True)
class TailModel:
    slope: float
    intercept: float
    onset: int


@dataclass
class EntropyEstimate:
    c: list
    verdict: Verdict
    value: float
    fekete_bound: float
    exact: ExactValue | None = None
    tail: TailModel | None = None
    counts: list | None = None
    recurrence: dict | None = None
    members: list = field(default_factory=list)
    note: str = ""

    @property
    def ratios(self) -> list[float]:
        return [float(x) / (i + 1) for i, x in enumerate(self.c)]

    @property
    def is_exact(self) -> bool:
        return self.verdict is Verdict.EXACT

    def to_dict(self, members: bool = True) -> dict:
        out = {
            "verdict": self.verdict.value,
            "value": _json_float(self.value),
            "fekete_bound": _json_float(self.fekete_bound),
            "c": [_json_float(float(x)) for x in self.c],
        }
        if self.exact is not None:
            out["exact"] = str(self.exact)
        if self.tail is not None:
            out["tail"] = {"slope": self.tail.slope, "intercept": self.tail.intercept, "onset": self.tail.onset}
        if self.counts is not None:
            out["counts"] = [int(x) for x in self.counts]
        if self.recurrence is not None:
            out["recurrence"] = self.recurrence
        if self.note:
            out["note"] = self.note
        if members and self.members:
            out["members"] = [m.to_dict(members=False) for m in self.members]
        return out


def _json_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _is_exact_number(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def fekete_estimate(
    c: Sequence,
    tolerance: float = 1e-9,
    window: int = 5,
    divergence_threshold: float = 1.0,
) -> EntropyEstimate:
    """Estimate ``lim c_n / n`` for a (typically subadditive) sequence ``c_1, c_2, ...``.

    ExactLimit when the last ``window`` increments agree (exactly for int
    or Fraction input, within ``tolerance`` otherwise); increments that are
    themselves below tolerance count as a zero slope.
    """
    c = list(c)
    if not c:
        raise DomainError("empty norm sequence")
    exact = all(_is_exact_number(x) for x in c)
    if exact:
        ratios = [Fraction(x) / (i + 1) for i, x in enumerate(c)]
    else:
        c = [float(x) for x in c]
        ratios = [x / (i + 1) for i, x in enumerate(c)]
    bound = min(ratios)
    inc = [c[i + 1] - c[i] for i in range(len(c) - 1)]
    if len(inc) < window:
        return EntropyEstimate(c, Verdict.INCONCLUSIVE, float(bound), float(bound), note="sequence shorter than window")
    tail = inc[-window:]
    if exact:
        alpha = tail[-1]
        flat = all(x == alpha for x in tail)
        same = lambda x: x == alpha  # noqa: E731
    else:
        flat = max(tail) - min(tail) <= tolerance
        alpha = math.fsum(tail) / window
        if abs(alpha) <= tolerance:
            alpha = 0.0
        same = lambda x: abs(x - alpha) <= tolerance  # noqa: E731
    if flat:
        j = len(inc) - 1
        while j > 0 and same(inc[j - 1]):
            j -= 1
        onset = j + 1
        intercept = c[-1] - alpha * len(c)
        ev = ExactValue(Fraction(alpha)) if exact else None
        return EntropyEstimate(
            c, Verdict.EXACT, float(alpha), float(bound), exact=ev,
            tail=TailModel(float(alpha), float(intercept), onset),
        )
    if all(a < b for a, b in zip(tail, tail[1:])) and tail[-1] > divergence_threshold:
        return EntropyEstimate(c, Verdict.DIVERGENT, math.inf, float(bound))
    return EntropyEstimate(c, Verdict.UPPER, float(bound), float(bound))


# ---------------------------------------------------------------------------
# counting norms
# ---------------------------------------------------------------------------


def berlekamp_massey(seq: Sequence) -> list[Fraction]:
    """Shortest connection polynomial ``[1, c_1, ..., c_L]`` over the rationals.

    ``sum_{i=0}^{L} c_i s_{n-i} = 0`` for every ``n >= L``.
    """
    s = [Fraction(x) for x in seq]
    C, B = [Fraction(1)], [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n in range(len(s)):
        d = s[n] + sum(C[i] * s[n - i] for i in range(1, L + 1))
        if d == 0:
            m += 1
            continue
        coef = d / b
        T = list(C)
        C = C + [Fraction(0)] * max(0, len(B) + m - len(C))
        for i, x in enumerate(B):
            C[i + m] -= coef * x
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    return (C + [Fraction(0)] * (L + 1))[: L + 1]


def find_recurrence(seq: Sequence, verify: int = 3) -> list[Fraction] | None:
    """A linear recurrence found on a prefix and confirmed on ``verify`` further terms."""
    n = len(seq)
    if n - verify < 2:
        return None
    conn = berlekamp_massey(seq[: n - verify])
    L = len(conn) - 1
    if L == 0 or 2 * L > n - verify:
        return None
    for k in range(L, n):
        if sum(conn[i] * seq[k - i] for i in range(L + 1)) != 0:
            return None
    return conn


def _dominant_root(conn: list[Fraction]) -> tuple[float, Fraction | None, int]:
    """Largest root modulus of ``t^L + c_1 t^(L-1) + ... + c_L``.

    Returns ``(rho, exact_rho_or_None, multiplicity)`` where multiplicity
    counts the roots on the dominant circle (with multiplicity).
    """
    from .mahler import find_roots  # local import: mahler is heavier

    den = lcm(*[c.denominator for c in conn])
    poly = IntPolynomial([int(c * den) for c in reversed(conn)])
    if poly.degree < 1:
        return 0.0, Fraction(0), 0
    roots = find_roots(poly, target_eps=1e-9)
    rho = max(abs(r.value) for r in roots.roots)
    mult = sum(r.multiplicity for r in roots.roots if abs(abs(r.value) - rho) <= 1e-9 * max(1.0, rho))
    exact = None
    guess = Fraction(rho).limit_denominator(1000)
    for cand in (guess, -guess):
        if poly(cand) == 0:
            exact = guess
            break
    return rho, exact, mult


def count_estimate(
    counts: Sequence[int],
    tolerance: float = 1e-9,
    window: int = 5,
    verify: int = 3,
) -> EntropyEstimate:
    """Estimate ``lim log(counts_n) / n`` for positive integer counts."""
    counts = [int(x) for x in counts]
    if not counts:
        raise DomainError("empty count sequence")
    if min(counts) < 1:
        raise DomainError("counts must be positive")
    logs = [math.log(x) for x in counts]
    bound = min(x / (i + 1) for i, x in enumerate(logs))
    conn = find_recurrence(counts, verify=verify)
    if conn is not None:
        rho, exact_rho, mult = _dominant_root(conn)
        if rho >= 1 - 1e-12:
            rec = {"connection": [str(x) for x in conn], "dominant": rho, "multiplicity": mult}
            if exact_rho is not None:
                ev = ExactValue(Fraction(1), exact_rho) if exact_rho != 1 else ExactValue(Fraction(0))
                value = float(ev)
            else:
                ev = None
                value = math.log(rho)
            return EntropyEstimate(logs, Verdict.EXACT, value, bound, exact=ev, counts=counts, recurrence=rec)
    est = fekete_estimate(logs, tolerance, window)
    est.counts = counts
    return est


# ---------------------------------------------------------------------------
# suprema over families
# ---------------------------------------------------------------------------


def family_estimate(members: Sequence[EntropyEstimate], divergence_step: float = 0.25, divergence_count: int = 5) -> EntropyEstimate:
    """Supremum of per-element estimates over a finite family.

    Divergent when some member diverges, or when the last
    ``divergence_count`` steps along the family each raise the value by
    more than ``divergence_step``.  A rise that levels off before the end
    of the family is not taken as evidence of divergence.
    """
    members = list(members)
    if not members:
        raise DomainError("empty element family")
    values = [m.value for m in members]
    run = 0
    for a, b in zip(values, values[1:]):
        run = run + 1 if b - a > divergence_step else 0
    if any(m.verdict is Verdict.DIVERGENT for m in members) or run >= divergence_count:
        return EntropyEstimate([], Verdict.DIVERGENT, math.inf, math.inf, members=members)
    top = max(range(len(members)), key=lambda i: values[i])
    verdicts = {m.verdict for m in members}
    if verdicts == {Verdict.EXACT}:
        verdict = Verdict.EXACT
    elif Verdict.INCONCLUSIVE in verdicts:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.UPPER
    best = members[top]
    exact = best.exact if verdict is Verdict.EXACT else None
    return EntropyEstimate(best.c, verdict, best.value, best.fekete_bound, exact=exact, members=members)
