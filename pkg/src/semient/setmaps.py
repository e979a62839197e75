"""Self-maps of the naturals (or of a finite set) and the generalized shifts they induce."""

from __future__ import annotations

from dataclasses import dataclass, field

from .abelian import DirectSumGroupFlow, TailRule
from .errors import DomainError, UnsupportedEndomorphism


@dataclass(frozen=True)
class SetSelfMap:
    """``lam(n) = table[n]`` for ``n < start`` and ``slope * n + offset`` beyond.

    With ``size`` set the domain is ``{0, ..., size-1}`` and the table must
    cover it.
    """

    table: tuple = ()
    start: int = 0
    slope: int = 1
    offset: int = 0
    size: int | None = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.size is not None:
            if len(self.table) != self.size or any(not 0 <= y < self.size for y in self.table):
                raise DomainError("finite self-map table must map the domain into itself")
        else:
            if len(self.table) != self.start:
                raise DomainError("table must list exactly the values below the affine start")
            if any(y < 0 for y in self.table) or self.slope < 0 or self.slope * self.start + self.offset < 0:
                raise DomainError("self-map leaves the naturals")

    @property
    def finite(self) -> bool:
        return self.size is not None

    def __call__(self, n: int) -> int:
        if n < 0 or (self.finite and n >= self.size):
            raise DomainError(f"{n} outside the domain")
        if n < len(self.table):
            return self.table[n]
        return self.slope * n + self.offset

    def preimage(self, y: int) -> set[int]:
        out = {n for n, v in enumerate(self.table) if v == y}
        if self.finite:
            return out
        if self.slope == 0:
            if y == self.offset:
                raise DomainError(f"the fiber over {y} is infinite")
            return out
        n, r = divmod(y - self.offset, self.slope)
        if r == 0 and n >= self.start:
            out.add(n)
        return out

    def fiber_size(self, y: int) -> int:
        return len(self.preimage(y))

    def image_set(self, A) -> frozenset:
        return frozenset(self(n) for n in A)

    def preimage_set(self, A) -> frozenset:
        out: set[int] = set()
        for y in A:
            out |= self.preimage(y)
        return frozenset(out)

    def finitely_many_to_one(self) -> bool:
        return self.finite or self.slope != 0


def successor() -> SetSelfMap:
    return SetSelfMap(slope=1, offset=1, name="successor")


def plus_two() -> SetSelfMap:
    return SetSelfMap(slope=1, offset=2, name="n+2")


def doubling() -> SetSelfMap:
    return SetSelfMap(slope=2, offset=0, name="2n")


def identity_map(size: int | None = None) -> SetSelfMap:
    if size is not None:
        return SetSelfMap(tuple(range(size)), size=size, name="id")
    return SetSelfMap(slope=1, offset=0, name="id")


def swap() -> SetSelfMap:
    return SetSelfMap((1, 0), size=2, name="swap")


def clamped_predecessor() -> SetSelfMap:
    """``0 -> 0`` and ``n -> n-1``."""
    return SetSelfMap((0,), start=1, slope=1, offset=-1, name="clamped predecessor")


def constant(value: int = 0) -> SetSelfMap:
    return SetSelfMap(slope=0, offset=value, name=f"const {value}")


def catalog() -> list[SetSelfMap]:
    return [successor(), plus_two(), identity_map(), swap(), clamped_predecessor()]


def generalized_shift_flow(lam: SetSelfMap, m: int, variant: str = "sum") -> DirectSumGroupFlow:
    """Flows on ``sum_X Z_m`` induced by ``lam``.

    ``sum``: ``e_x -> sum of e_y over y in lam^-1(x)``, the restriction of
    ``f -> f∘lam`` to finitely supported ``f``.
    ``pushforward``: ``e_x -> e_{lam(x)}``, whose Pontryagin dual is
    ``f -> f∘lam`` on the full product ``Z_m^X``.
    """
    if variant not in ("sum", "pushforward"):
        raise DomainError(f"unknown variant {variant!r}")
    name = f"{'σ⊕' if variant == 'sum' else 'push'}[{lam.name}] Z_{m}"
    if lam.finite:
        if variant == "sum":
            cols = {x: {y: 1 for y in lam.preimage(x)} for x in range(lam.size)}
        else:
            cols = {x: {lam(x): 1} for x in range(lam.size)}
        return DirectSumGroupFlow(cols, moduli=[m] * lam.size, name=name)
    if not lam.finitely_many_to_one():
        raise DomainError(f"{lam.name} has an infinite fiber")
    if lam.slope != 1:
        raise UnsupportedEndomorphism(f"{lam.name} is not eventually a translation; its shift has no tail rule")
    b = lam.offset
    if variant == "pushforward":
        cols = {x: {lam(x): 1} for x in range(lam.start)}
        return DirectSumGroupFlow(cols, exponent=m, tail=TailRule(lam.start, 1, b), name=name)
    # beyond every table value and beyond start + b, the fiber over x is exactly {x - b}
    top = max([lam.start + b, 0] + [v + 1 for v in lam.table])
    cols = {x: {y: 1 for y in lam.preimage(x)} for x in range(top)}
    return DirectSumGroupFlow(cols, exponent=m, tail=TailRule(top, 1, -b), name=name)
