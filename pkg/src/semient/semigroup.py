"""Normed semigroups, trajectories and semigroup entropy.

A model is a bag of callables: an associative ``op``, a ``norm`` and an
optional ``identity``.  Elements are whatever hashable values the model
chooses; canonical forms (trimmed tuples, reduced words, frozensets) are
the model's job.

Counting norms (``log_norm=True``) return a cardinality; the actual norm
is its logarithm, taken only when a value is reported.  This keeps
ExactLimit verdicts exact for set-like adapters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from .errors import DomainError, PropertyViolation, ResourceError
from .estimate import EntropyEstimate, Verdict, count_estimate, family_estimate, fekete_estimate

DEFAULT_CAP = 10**7


@dataclass(frozen=True)
class NormedSemigroupModel:
    op: Callable[[Any, Any], Any]
    norm: Callable[[Any], Any]
    identity: Any = None
    name: str = ""
    claims_arithmetic: bool = False
    claims_s_monotone: bool = False
    commutative: bool = False
    log_norm: bool = False
    size: Callable[[Any], int] | None = None
    pseudo: bool = False
    has_identity: bool = False

    def __post_init__(self):
        if self.identity is not None and not self.has_identity:
            object.__setattr__(self, "has_identity", True)

    @property
    def is_monoid(self) -> bool:
        return self.has_identity

    def value(self, x) -> float:
        """The norm as a real number (the log of the count for counting norms)."""
        raw = self.norm(x)
        if self.log_norm:
            return math.log(raw)
        return float(raw)

    def power(self, x, n: int):
        out = x
        for _ in range(n - 1):
            out = self.op(out, x)
        return out


def PseudonormedSemigroupModel(op, norm, **kwargs) -> NormedSemigroupModel:
    """A model whose norm carries no subadditivity contract."""
    return NormedSemigroupModel(op, norm, pseudo=True, **kwargs)


@dataclass(frozen=True)
class SemigroupEndomorphism:
    map: Callable[[Any], Any]
    contractive: bool = True
    name: str = ""

    def __call__(self, x):
        return self.map(x)

    def power(self, k: int) -> "SemigroupEndomorphism":
        if k < 1:
            raise DomainError("endomorphism powers start at 1")
        f = self.map

        def iterate(x):
            for _ in range(k):
                x = f(x)
            return x

        return SemigroupEndomorphism(iterate, self.contractive, f"{self.name}^{k}")

    def compose(self, other: "SemigroupEndomorphism") -> "SemigroupEndomorphism":
        """``self`` after ``other``."""
        f, g = self.map, other.map
        return SemigroupEndomorphism(lambda x: f(g(x)), self.contractive and other.contractive,
                                     f"{self.name}∘{other.name}")


def identity_endomorphism() -> SemigroupEndomorphism:
    return SemigroupEndomorphism(lambda x: x, True, "id")


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


def iter_trajectory(S: NormedSemigroupModel, phi, x, n: int, left: bool = False, cap: int = DEFAULT_CAP):
    """Yield ``T_1, ..., T_n`` (or the left-ordered ``T^#_k``) incrementally."""
    if n < 1:
        raise DomainError("trajectory length must be positive")
    t, image = x, x
    norms = []
    for k in range(1, n + 1):
        if k > 1:
            image = phi(image)
            t = S.op(image, t) if left else S.op(t, image)
        if S.size is not None and S.size(t) > cap:
            raise ResourceError(f"trajectory element exceeded size cap {cap} at n={k}", partial=norms)
        norms.append(S.norm(t))
        yield t


def trajectory(S, phi, x, n: int, cap: int = DEFAULT_CAP):
    """``x · phi(x) · ... · phi^(n-1)(x)``."""
    for t in iter_trajectory(S, phi, x, n, False, cap):
        pass
    return t


def left_trajectory(S, phi, x, n: int, cap: int = DEFAULT_CAP):
    """``phi^(n-1)(x) · ... · phi(x) · x``."""
    for t in iter_trajectory(S, phi, x, n, True, cap):
        pass
    return t


def norm_sequence(S, phi, x, budget: int, left: bool = False, cap: int = DEFAULT_CAP) -> list:
    return [S.norm(t) for t in iter_trajectory(S, phi, x, budget, left, cap)]


def _estimate(S: NormedSemigroupModel, raw: list, tolerance: float, window: int) -> EntropyEstimate:
    if S.log_norm:
        return count_estimate(raw, tolerance, window)
    return fekete_estimate(raw, tolerance, window)


def semigroup_entropy_at(
    S: NormedSemigroupModel,
    phi,
    x,
    budget: int = 20,
    left: bool = False,
    tolerance: float = 1e-9,
    window: int = 5,
    cap: int = DEFAULT_CAP,
) -> EntropyEstimate:
    """Estimate ``lim v(T_n(phi, x)) / n``; checks the bound by ``v(x)``."""
    raw = norm_sequence(S, phi, x, budget, left, cap)
    est = _estimate(S, raw, tolerance, window)
    if not S.pseudo and est.value > S.value(x) + max(tolerance, 1e-12):
        raise PropertyViolation(f"entropy {est.value} exceeds the norm {S.value(x)} of its element")
    return est


def left_semigroup_entropy_at(S, phi, x, budget: int = 20, **kwargs) -> EntropyEstimate:
    return semigroup_entropy_at(S, phi, x, budget, left=True, **kwargs)


def semigroup_entropy(
    S: NormedSemigroupModel,
    phi,
    family: Iterable,
    budget: int = 20,
    left: bool = False,
    divergence_step: float = 0.25,
    divergence_count: int = 5,
    **kwargs,
) -> EntropyEstimate:
    """Supremum of element entropies over a finite family of elements."""
    members = [semigroup_entropy_at(S, phi, x, budget, left, **kwargs) for x in family]
    if not members:
        raise DomainError("empty element family")
    return family_estimate(members, divergence_step, divergence_count)


def left_semigroup_entropy(S, phi, family, budget: int = 20, **kwargs) -> EntropyEstimate:
    return semigroup_entropy(S, phi, family, budget, left=True, **kwargs)


def element_entropy(S: NormedSemigroupModel, x, budget: int = 20, tolerance: float = 1e-9, window: int = 5) -> EntropyEstimate:
    """Growth rate of ``v(x^n)``.

    For a pseudonorm the limit may not exist; without an affine tail the
    result is Inconclusive and its value is the largest ``v(x^n)/n`` over
    the second half of the computed range.
    """
    raw = norm_sequence(S, identity_endomorphism(), x, budget)
    est = _estimate(S, raw, tolerance, window)
    if S.pseudo and est.verdict is not Verdict.EXACT:
        ratios = est.ratios
        tail = ratios[len(ratios) // 2:]
        est.verdict, est.value = Verdict.INCONCLUSIVE, max(tail)
        est.note = "limsup over the second half of the range"
    return est


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def product_model(S1: NormedSemigroupModel, S2: NormedSemigroupModel) -> NormedSemigroupModel:
    """Pairs with the max norm."""
    if S1.log_norm != S2.log_norm:
        raise DomainError("cannot mix counting and additive norms in a product")
    identity = (S1.identity, S2.identity) if S1.is_monoid and S2.is_monoid else None
    size = None
    if S1.size and S2.size:
        size = lambda p: S1.size(p[0]) + S2.size(p[1])  # noqa: E731
    return NormedSemigroupModel(
        op=lambda p, q: (S1.op(p[0], q[0]), S2.op(p[1], q[1])),
        norm=lambda p: max(S1.norm(p[0]), S2.norm(p[1])),
        identity=identity,
        has_identity=identity is not None,
        name=f"{S1.name}×{S2.name}",
        claims_arithmetic=S1.claims_arithmetic and S2.claims_arithmetic,
        claims_s_monotone=S1.claims_s_monotone and S2.claims_s_monotone,
        commutative=S1.commutative and S2.commutative,
        log_norm=S1.log_norm,
        size=size,
    )


def product_endomorphism(phi1, phi2) -> SemigroupEndomorphism:
    return SemigroupEndomorphism(lambda p: (phi1(p[0]), phi2(p[1])), True, "product")


def _combine_norms(models, values):
    if models[0].log_norm:
        return math.prod(values)
    return sum(values)


def coproduct_model(models: list[NormedSemigroupModel]) -> NormedSemigroupModel:
    """Tuples over a finite list of monoids with the sum norm."""
    models = list(models)
    if not models:
        raise DomainError("coproduct of an empty list")
    if not all(M.is_monoid for M in models):
        raise DomainError("coproducts are defined for normed monoids only")
    if len({M.log_norm for M in models}) > 1:
        raise DomainError("cannot mix counting and additive norms in a coproduct")
    k = len(models)
    return NormedSemigroupModel(
        op=lambda x, y: tuple(models[i].op(x[i], y[i]) for i in range(k)),
        norm=lambda x: _combine_norms(models, [models[i].norm(x[i]) for i in range(k)]),
        identity=tuple(M.identity for M in models),
        has_identity=True,
        name="⊕".join(M.name for M in models),
        claims_arithmetic=all(M.claims_arithmetic for M in models),
        claims_s_monotone=all(M.claims_s_monotone for M in models),
        commutative=all(M.commutative for M in models),
        log_norm=models[0].log_norm,
    )


def coproduct_endomorphism(maps) -> SemigroupEndomorphism:
    maps = list(maps)
    return SemigroupEndomorphism(lambda x: tuple(f(c) for f, c in zip(maps, x)), True, "coproduct")


def _trim(x: tuple, identity) -> tuple:
    end = len(x)
    while end and x[end - 1] == identity:
        end -= 1
    return x[:end]


def bernoulli_shift(M: NormedSemigroupModel, side: str = "right"):
    """The monoid of finitely supported sequences over ``M`` and its shift.

    Elements are tuples with trailing identities removed.  The right shift
    prepends the identity; the left shift drops coordinate 0.
    """
    if not M.is_monoid:
        raise DomainError("Bernoulli shifts need a normed monoid")
    one = M.identity

    def op(x, y):
        n = max(len(x), len(y))
        x = x + (one,) * (n - len(x))
        y = y + (one,) * (n - len(y))
        return _trim(tuple(M.op(a, b) for a, b in zip(x, y)), one)

    def norm(x):
        values = [M.norm(a) for a in x]
        if M.log_norm:
            return math.prod(values)
        return sum(values)

    model = NormedSemigroupModel(
        op=op, norm=norm, identity=(), has_identity=True, name=f"B({M.name})",
        claims_arithmetic=M.claims_arithmetic, claims_s_monotone=M.claims_s_monotone,
        commutative=M.commutative, log_norm=M.log_norm, size=len,
    )
    if side == "right":
        shift = SemigroupEndomorphism(lambda x: (one,) + x if x else x, True, "right shift")
    elif side == "left":
        shift = SemigroupEndomorphism(lambda x: x[1:], True, "left shift")
    else:
        raise DomainError(f"unknown shift side {side!r}")
    return model, shift


def single_coordinate(x, position: int, identity) -> tuple:
    """The sequence with ``x`` at ``position`` and the identity elsewhere."""
    return _trim((identity,) * position + (x,), identity)


__all__ = [
    "NormedSemigroupModel", "PseudonormedSemigroupModel", "SemigroupEndomorphism", "identity_endomorphism",
    "iter_trajectory", "trajectory", "left_trajectory", "norm_sequence", "semigroup_entropy_at",
    "left_semigroup_entropy_at", "semigroup_entropy", "left_semigroup_entropy", "element_entropy",
    "product_model", "product_endomorphism", "coproduct_model", "coproduct_endomorphism",
    "bernoulli_shift", "single_coordinate"
]
