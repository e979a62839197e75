"""Polynomial roots, Mahler measure and the Yuzvinski-type entropy formula.

Roots come from Aberth's simultaneous iteration in double precision,
polished and certified in multiprecision.  Before iterating, the
polynomial is split into square-free parts so every root handed to the
iteration is simple; multiplicities are reattached afterwards.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DomainError, NumericError
from .exact import IntPolynomial, RatMatrix, char_poly, primitive_scale, squarefree_decomposition

GOLDEN_ANGLE = math.pi * (3 - math.sqrt(5))
POLISH_DPS = 60


@dataclass
class Root:
    value: complex
    radius: float  # certified: a true root lies within this distance
    multiplicity: int = 1

    @property
    def modulus_interval(self) -> tuple[float, float]:
        r = abs(self.value)
        return max(r - self.radius, 0.0), r + self.radius

    def side(self) -> int:
        """+1 if surely outside the unit circle, -1 if surely inside, 0 otherwise."""
        lo, hi = self.modulus_interval
        if lo > 1:
            return 1
        if hi < 1:
            return -1
        return 0


@dataclass
class RootSet:
    roots: list[Root]
    degree: int

    @property
    def values(self) -> list[complex]:
        out = []
        for r in self.roots:
            out.extend([r.value] * r.multiplicity)
        return out

    @property
    def ambiguous(self) -> list[Root]:
        return [r for r in self.roots if r.side() == 0]


@dataclass
class MahlerResult:
    value: float
    leading_term: float
    contributions: list = field(default_factory=list)  # (root, multiplicity, log|root|)
    ambiguous: bool = False
    error_bound: float = 0.0


def _aberth(coeffs: np.ndarray, max_iter: int = 500) -> np.ndarray:
    """Aberth iteration on a polynomial with nonzero constant term (high degree first)."""
    n = len(coeffs) - 1
    lead = abs(coeffs[0])
    radius = 1 + max(abs(c) for c in coeffs[1:]) / lead
    z = np.array([radius * cmath.exp(1j * (GOLDEN_ANGLE * k + 0.25)) for k in range(n)])
    deriv = np.polyder(coeffs)
    for _ in range(max_iter):
        p = np.polyval(coeffs, z)
        dp = np.polyval(deriv, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1)
            inter = (1 / diff).sum(axis=1) - 1  # remove the diagonal's 1/1
            step = ratio / (1 - ratio * inter)
        step = np.where(np.isfinite(step), step, 0)
        z = z - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1, np.abs(z))):
            break
    return z


def _polish(f: IntPolynomial, z, steps: int = 8):
    """A few Aberth steps at high precision; returns mp complex roots."""
    coeffs = [mpmath.mpf(c) for c in reversed(f.coeffs)]
    dcoeffs = [mpmath.mpf(c) for c in reversed(f.derivative().coeffs)]
    zs = [mpmath.mpc(complex(x)) for x in z]
    n = len(zs)
    for _ in range(steps):
        new = []
        biggest = mpmath.mpf(0)
        for i, zi in enumerate(zs):
            p = mpmath.polyval(coeffs, zi)
            dp = mpmath.polyval(dcoeffs, zi)
            if dp == 0:
                new.append(zi)
                continue
            ratio = p / dp
            inter = mpmath.fsum(1 / (zi - zs[j]) for j in range(n) if j != i)
            step = ratio / (1 - ratio * inter)
            new.append(zi - step)
            biggest = max(biggest, abs(step))
        zs = new
        if biggest < mpmath.mpf(10) ** (-POLISH_DPS + 10):
            break
    return zs


def _certify(f: IntPolynomial, zs) -> list[float]:
    """Inclusion radii from the Weierstrass correction ``n |f(z_i)| / |a_n prod (z_i - z_j)|``.

    The disks contain all roots; a disk disjoint from the others contains
    exactly one.  Overlapping disks get the radius of their union.
    """
    n = len(zs)
    coeffs = [mpmath.mpf(c) for c in reversed(f.coeffs)]
    abs_coeffs = [abs(c) for c in coeffs]
    eps = mpmath.mpf(10) ** (-POLISH_DPS + 5)
    radii = []
    for i, zi in enumerate(zs):
        value = abs(mpmath.polyval(coeffs, zi))
        value += eps * mpmath.polyval(abs_coeffs, abs(zi))  # rounding slack
        denom = abs(coeffs[0])
        for j in range(n):
            if j != i:
                denom *= abs(zi - zs[j])
        radii.append(n * value / denom if denom else mpmath.inf)
    # merge overlapping disks
    out = list(radii)
    for i in range(n):
        for j in range(n):
            if i != j and abs(zs[i] - zs[j]) <= radii[i] + radii[j]:
                out[i] = max(out[i], abs(zs[i] - zs[j]) + radii[j])
    return [float(r) for r in out]


def find_roots(f: IntPolynomial, target_eps: float = 1e-12) -> RootSet:
    """All complex roots of ``f`` with certified error radii."""
    if f.is_zero() or f.degree < 1:
        raise DomainError("find_roots needs a polynomial of degree at least 1")
    f = f.primitive()
    roots = []
    zeros = next(i for i, c in enumerate(f.coeffs) if c)
    if zeros:
        roots.append(Root(0j, 0.0, zeros))
        f = IntPolynomial(f.coeffs[zeros:])
    if f.degree >= 1:
        with mpmath.workdps(POLISH_DPS):
            for g, mult in squarefree_decomposition(f):
                if g.degree == 1:
                    a0, a1 = g.coeffs
                    roots.append(Root(complex(Fraction(-a0, a1)), 0.0, mult))
                    continue
                approx = _aberth(np.array([float(c) for c in reversed(g.coeffs)]))
                zs = _polish(g, approx)
                radii = _certify(g, zs)
                if max(radii) > target_eps:
                    raise NumericError(f"roots of {g} not certified to {target_eps}", partial=zs)
                roots.extend(Root(complex(z), r, mult) for z, r in zip(zs, radii))
    return RootSet(roots, sum(r.multiplicity for r in roots))


def mahler_measure(f: IntPolynomial, eps: float = 1e-12) -> MahlerResult:
    """``log|a_n| + sum over roots outside the unit disc of log|root|``.

    Roots whose certified modulus interval contains 1 contribute nothing;
    their worst-case contribution is recorded in ``error_bound``.  Such
    roots are flagged ambiguous only when that bound exceeds ``eps``.
    """
    if f.is_zero():
        raise DomainError("Mahler measure of the zero polynomial is undefined")
    leading = math.log(abs(f.leading))
    if f.degree < 1:
        return MahlerResult(leading, leading)
    roots = find_roots(f, target_eps=min(eps, 1e-12))
    terms = []
    err = 0.0
    with mpmath.workdps(30):
        for r in roots.roots:
            side = r.side()
            if side > 0:
                terms.append((r.value, r.multiplicity, float(mpmath.log(abs(mpmath.mpc(r.value))))))
            elif side == 0:
                err += r.multiplicity * math.log1p(r.radius)
    value = math.fsum([leading] + [m * t for _, m, t in terms])
    return MahlerResult(value, leading, terms, ambiguous=err > eps, error_bound=err)


def _as_matrix(A) -> RatMatrix:
    return A if isinstance(A, RatMatrix) else RatMatrix(A)


def ayf_entropy(A, eps: float = 1e-12) -> float:
    """Algebraic entropy of a rational matrix: Mahler measure of its characteristic polynomial."""
    return mahler_measure(primitive_scale(char_poly(_as_matrix(A))), eps).value


@dataclass
class AdditionReport:
    total: float
    upper: float
    lower: float
    difference: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.difference < self.tolerance


def ayf_addition_check(A, split: int, eps: float = 1e-12, tolerance: float = 1e-7) -> AdditionReport:
    """Compare the entropy of a block upper-triangular matrix with the sum over its diagonal blocks."""
    A = _as_matrix(A)
    if not 0 < split < A.size or not A.is_block_upper(split):
        raise DomainError(f"matrix is not block upper-triangular at split {split}")
    total = ayf_entropy(A, eps)
    upper = ayf_entropy(A.submatrix(0, split), eps)
    lower = ayf_entropy(A.submatrix(split, A.size), eps)
    return AdditionReport(total, upper, lower, abs(total - upper - lower), tolerance)
