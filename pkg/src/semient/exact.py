"""Exact integer and rational linear algebra.

Everything here works on Python ints and ``fractions.Fraction``; no
floating point is involved.  Subgroups of ``Z_{m_1} + ... + Z_{m_k}`` are
encoded by a list of moduli where ``0`` stands for an infinite cyclic
factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Sequence

from .errors import DomainError

INFINITE = math.inf


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``g = gcd(a, b) = s*a + t*b`` and ``g >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def lcm(*values: int) -> int:
    return reduce(lambda x, y: x * y // math.gcd(x, y) if x and y else 0, values, 1)


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------


class IntPolynomial:
    """Integer polynomial stored as coefficients ``a_0 .. a_n`` (low degree first)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[int]):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def from_string(cls, text: str) -> "IntPolynomial":
        """Parse an expression such as ``"t^10+t^9-t^7+1"`` in one variable."""
        import sympy
        from sympy.parsing.sympy_parser import (
            convert_xor,
            implicit_multiplication_application,
            parse_expr,
            standard_transformations,
        )

        transforms = standard_transformations + (convert_xor, implicit_multiplication_application)
        try:
            expr = parse_expr(text, transformations=transforms, evaluate=True)
        except Exception as exc:  # sympy raises a zoo of exception types
            raise DomainError(f"cannot parse polynomial {text!r}: {exc}") from exc
        symbols = sorted(expr.free_symbols, key=str)
        if len(symbols) > 1:
            raise DomainError(f"expected one variable, found {[str(s) for s in symbols]}")
        var = symbols[0] if symbols else sympy.Symbol("t")
        try:
            poly = sympy.Poly(expr, var)
        except sympy.PolynomialError as exc:
            raise DomainError(f"not a polynomial: {text!r}") from exc
        coeffs = poly.all_coeffs()[::-1]
        if not all(c.is_integer for c in coeffs):
            raise DomainError(f"coefficients must be integers: {text!r}")
        return cls([int(c) for c in coeffs])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def primitive(self) -> "IntPolynomial":
        """Divide by the content and make the leading coefficient positive."""
        g = self.content()
        if g == 0:
            return self
        if self.leading < 0:
            g = -g
        return IntPolynomial([a // g for a in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero() or other.is_zero():
            return IntPolynomial([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return IntPolynomial([-a for a in self.coeffs])

    def __pow__(self, k: int) -> "IntPolynomial":
        out = IntPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, z):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * z + a
        return acc

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial([i * a for i, a in enumerate(self.coeffs)][1:])

    def reversed(self) -> "IntPolynomial":
        """``t^n f(1/t)``."""
        return IntPolynomial(self.coeffs[::-1])

    def negated_variable(self) -> "IntPolynomial":
        """``f(-t)``."""
        return IntPolynomial([a if i % 2 == 0 else -a for i, a in enumerate(self.coeffs)])

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            a = self.coeffs[i]
            if a == 0:
                continue
            mag = abs(a)
            if i == 0:
                body = str(mag)
            else:
                body = ("" if mag == 1 else str(mag)) + ("t" if i == 1 else f"t^{i}")
            sign = "-" if a < 0 else "+"
            terms.append((sign, body))
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[list, list]:
    """Division with remainder of rational polynomials (low degree first)."""
    a = _trim([Fraction(x) for x in a])
    b = _trim([Fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        factor = a[-1] / b[-1]
        q[shift] = factor
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a.pop()
        _trim(a)
    return _trim(q), a


def poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    """Monic gcd of two rational polynomials."""
    a = _trim([Fraction(x) for x in a])
    b = _trim([Fraction(x) for x in b])
    while b:
        _, r = poly_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def _to_int_poly(p: Sequence[Fraction]) -> IntPolynomial:
    den = lcm(*[Fraction(c).denominator for c in p]) if p else 1
    return IntPolynomial([int(Fraction(c) * den) for c in p]).primitive()


def squarefree_decomposition(f: IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Yun's algorithm: primitive square-free ``g_i`` with ``f ~ prod g_i^i``.

    Factors of degree zero are dropped; the constant (content and sign) is
    not tracked.
    """
    if f.degree < 1:
        return []
    a = [Fraction(c) for c in f.coeffs]
    da = [Fraction(c) for c in f.derivative().coeffs]
    out = []
    g = poly_gcd(a, da)
    b, _ = poly_divmod(a, g)
    c, _ = poly_divmod(da, g)
    i = 1
    while len(b) > 1:
        db = [k * x for k, x in enumerate(b)][1:]
        d = [x - y for x, y in _pad(c, db)]
        _trim(d)
        h = poly_gcd(b, d) if d else [Fraction(x) for x in b]
        if len(h) > 1:
            out.append((_to_int_poly(h), i))
        b, _ = poly_divmod(b, h)
        c, _ = poly_divmod(d, h) if d else ([], [])
        i += 1
    return out


def _pad(p, q):
    n = max(len(p), len(q))
    return zip(list(p) + [0] * (n - len(p)), list(q) + [0] * (n - len(q)))


# ---------------------------------------------------------------------------
# Rational matrices
# ---------------------------------------------------------------------------


class RatMatrix:
    """Square matrix with exact rational entries."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if any(len(r) != len(rows) for r in rows):
            raise DomainError("matrix must be square")
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def block_upper(cls, upper_left, coupling, lower_right) -> "RatMatrix":
        """Assemble ``[[B, X], [0, C]]``."""
        b, c = len(upper_left.rows), len(lower_right.rows)
        rows = [list(upper_left.rows[i]) + list(coupling[i]) for i in range(b)]
        rows += [[0] * b + list(lower_right.rows[i]) for i in range(c)]
        return cls(rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        cols = list(zip(*other.rows))
        return RatMatrix([[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows])

    def __pow__(self, k: int) -> "RatMatrix":
        out = RatMatrix.identity(self.size)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def scale(self, c) -> "RatMatrix":
        return RatMatrix([[c * x for x in row] for row in self.rows])

    def __add__(self, other):
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def transpose(self) -> "RatMatrix":
        return RatMatrix(list(zip(*self.rows)))

    def submatrix(self, start: int, stop: int) -> "RatMatrix":
        return RatMatrix([row[start:stop] for row in self.rows[start:stop]])

    def is_block_upper(self, split: int) -> bool:
        return all(self.rows[i][j] == 0 for i in range(split, self.size) for j in range(split))

    def inverse(self) -> "RatMatrix":
        n = self.size
        aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(self.rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
            if piv is None:
                raise DomainError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            p = aug[col][col]
            aug[col] = [x / p for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col] != 0:
                    f = aug[r][col]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
        return RatMatrix([row[n:] for row in aug])

    def __repr__(self):
        return f"RatMatrix({[[str(x) for x in row] for row in self.rows]})"


def char_poly(A: RatMatrix) -> tuple[Fraction, ...]:
    """Monic characteristic polynomial ``det(tI - A)``, coefficients low degree first.

    Berkowitz's algorithm: division free, so the only growth is in the
    entries themselves.
    """
    n = A.size
    poly = [Fraction(1)]  # high degree first while building
    for r in range(n):
        row = A.rows[r][:r]
        col = [A.rows[i][r] for i in range(r)]
        toeplitz = [Fraction(1), -A.rows[r][r]]
        vec = col
        for _ in range(r):
            toeplitz.append(-sum(a * b for a, b in zip(row, vec)))
            vec = [sum(A.rows[i][j] * vec[j] for j in range(r)) for i in range(r)]
        poly = [sum(toeplitz[i - j] * poly[j] for j in range(min(i, len(poly) - 1) + 1)) for i in range(r + 2)]
    return tuple(reversed(poly))


def primitive_scale(g: Sequence[Fraction]) -> IntPolynomial:
    """Scale a monic rational polynomial by the least ``s`` making it integral."""
    g = _trim([Fraction(c) for c in g])
    if not g or g[-1] != 1:
        raise DomainError("primitive_scale expects a monic polynomial")
    s = lcm(*[c.denominator for c in g])
    out = IntPolynomial([int(c * s) for c in g])
    assert out.content() == 1, "scaled polynomial is not primitive"
    return out


# ---------------------------------------------------------------------------
# Integer matrices: Smith and Hermite forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZmMatrix:
    """Rectangular matrix over Z_m with entries reduced mod m."""

    rows: tuple
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise DomainError("modulus must be at least 2")
        object.__setattr__(self, "rows", tuple(tuple(x % self.modulus for x in r) for r in self.rows))

    def lift(self) -> list[list[int]]:
        """Integer matrix whose row lattice, together with ``m Z^k``, is this one."""
        k = len(self.rows[0]) if self.rows else 0
        return [list(r) for r in self.rows] + [[self.modulus * int(i == j) for j in range(k)] for i in range(k)]


@dataclass(frozen=True)
class SmithForm:
    factors: tuple  # d_1 | d_2 | ... (zeros last)
    U: tuple
    V: tuple

    @property
    def rank(self) -> int:
        return sum(1 for d in self.factors if d)


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A) -> SmithForm:
    """Smith normal form ``U A V = diag(d_1, ..., d_r, 0, ...)`` over the integers."""
    D = [[int(x) for x in row] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    U, V = _identity(m), _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for M in (D, V):
            for row in M:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // p))
                    dirty = dirty or D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // p))
                    dirty = dirty or D[t][j] != 0
            if dirty:
                cand = [(abs(D[i][t]), i, t) for i in range(t, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t, n) if D[t][j]]
                _, i, j = min(cand)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    factors = tuple(D[i][i] for i in range(min(m, n)))
    return SmithForm(factors, tuple(map(tuple, U)), tuple(map(tuple, V)))


def invariant_factors(A) -> tuple[int, ...]:
    return smith_normal_form(A).factors


def subgroup_index(generators: Sequence[Sequence[int]], moduli: Sequence[int]) -> int | float:
    """Index of the subgroup generated by ``generators`` in ``sum Z_{m_i}``.

    ``moduli[i] == 0`` means a free factor; the index is then ``math.inf``
    when the generators do not have full rank there.
    """
    k = len(moduli)
    rows = [[int(x) for x in g] + [0] * (k - len(g)) for g in generators]
    rows += [[m * int(i == j) for j in range(k)] for i, m in enumerate(moduli) if m]
    if k == 0:
        return 1
    if not rows:
        return INFINITE
    factors = invariant_factors(rows)
    if sum(1 for d in factors if d) < k:
        return INFINITE
    return math.prod(factors[:k])


class SubgroupLattice:
    """Canonical triangular basis of a subgroup of ``sum Z_{m_i}``.

    The basis row with pivot ``i`` has pivot entry dividing ``m_i`` (when
    ``m_i > 0``); entries above later pivots are reduced, which makes the
    basis a Hermite normal form and hence canonical.
    """

    __slots__ = ("moduli", "basis")

    def __init__(self, moduli: Sequence[int], rows: Sequence[Sequence[int]] = ()):
        self.moduli = tuple(int(m) for m in moduli)
        k = len(self.moduli)
        self.basis: list = [None] * k
        for i, m in enumerate(self.moduli):
            if m:
                self.basis[i] = [m * int(i == j) for j in range(k)]
        for r in rows:
            self.add(r)
        self._reduce_above()

    def _normalize(self, v):
        return [x % m if m else x for x, m in zip(v, self.moduli)]

    def add(self, v) -> None:
        k = len(self.moduli)
        v = self._normalize(list(v) + [0] * (k - len(v)))
        for i in range(k):
            a = v[i]
            if a == 0:
                continue
            row = self.basis[i]
            if row is None:
                self.basis[i] = v if a > 0 else [-x for x in v]
                return
            p = row[i]
            g, s, t = xgcd(p, a)
            new_row = self._normalize([s * x + t * y for x, y in zip(row, v)])
            v = self._normalize([(a // g) * x - (p // g) * y for x, y in zip(row, v)])
            self.basis[i] = new_row

    def _reduce_above(self) -> None:
        k = len(self.moduli)
        for i in range(k):
            row = self.basis[i]
            if row is None:
                continue
            for j in range(i + 1, k):
                piv = self.basis[j]
                if piv is None or row[j] == 0:
                    continue
                q = row[j] // piv[j]
                if q:
                    row = [a - q * b for a, b in zip(row, piv)]
                    row = [x % m if m and idx != i else x for idx, (x, m) in enumerate(zip(row, self.moduli))]
            self.basis[i] = row

    def pivots(self) -> list:
        return [None if r is None else r[i] for i, r in enumerate(self.basis)]

    def order(self) -> int | float:
        """Cardinality of the subgroup (infinite if it meets a free factor)."""
        total = 1
        for i, m in enumerate(self.moduli):
            p = self.basis[i]
            if m == 0:
                if p is not None:
                    return INFINITE
            else:
                total *= m // p[i]
        return total

    def index(self) -> int | float:
        if any(r is None for r in self.basis):
            return INFINITE
        return math.prod(r[i] for i, r in enumerate(self.basis))

    def contains(self, v) -> bool:
        k = len(self.moduli)
        v = self._normalize(list(v) + [0] * (k - len(v)))
        for i in range(k):
            if v[i] == 0:
                continue
            row = self.basis[i]
            if row is None or v[i] % row[i]:
                return False
            q = v[i] // row[i]
            v = self._normalize([a - q * b for a, b in zip(v, row)])
        return True

    def generators(self) -> tuple:
        """Canonical basis rows that are nonzero in the quotient, as tuples."""
        self._reduce_above()
        out = []
        for i, row in enumerate(self.basis):
            if row is None or (self.moduli[i] and row[i] == self.moduli[i]):
                continue
            out.append(tuple(row))
        return tuple(out)
