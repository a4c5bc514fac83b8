"""Polynomial vector fields under anisotropic dilations.

A :class:`VectorFieldSystem` bundles m polynomial vector fields on R^n
with integer dilation exponents sigma.  The module provides the degree-1
homogeneity / triangularity check on the coefficient polynomials, exact
Lie brackets, left-nested iterated brackets, and point evaluation of the
composed operators X_I u through jets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .jets import Jet, JetSpace
from .poly import Poly
from .scalarfield import MAX_JET_ORDER, ScalarField

Word = tuple[int, ...]


@dataclass(frozen=True)
class MultiIndex:
    """Word over {1, ..., m} indexing iterated operators and brackets."""

    word: Word

    def __post_init__(self):
        word = tuple(int(i) for i in self.word)
        if len(word) < 1:
            raise ValueError("a multi-index must be nonempty")
        if any(i < 1 for i in word):
            raise ValueError("multi-index entries are 1-based field indices")
        object.__setattr__(self, "word", word)

    def __len__(self):
        return len(self.word)

    def __iter__(self):
        return iter(self.word)


def _as_word(index) -> Word:
    if isinstance(index, MultiIndex):
        return index.word
    word = tuple(int(i) for i in index)
    if not word or any(i < 1 for i in word):
        raise ValueError("invalid multi-index")
    return word


class VectorField:
    """First-order operator sum_k b_k(x) d/dx_k with polynomial b_k."""

    __slots__ = ("n_vars", "coeffs")

    def __init__(self, coeffs: Sequence[Poly]):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a vector field needs at least one component")
        n = coeffs[0].n_vars
        if any(c.n_vars != n for c in coeffs):
            raise ValueError("component polynomials disagree on n_vars")
        if len(coeffs) != n:
            raise ValueError("need one coefficient polynomial per coordinate")
        self.n_vars = n
        self.coeffs = coeffs

    @classmethod
    def from_components(cls, n: int, entries: dict[int, Poly]) -> "VectorField":
        coeffs = [entries.get(k, Poly.zero(n)) for k in range(n)]
        return cls(coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def apply_poly(self, p: Poly) -> Poly:
        """Exact directional derivative of a polynomial."""
        if p.n_vars != self.n_vars:
            raise ValueError("dimension mismatch")
        out = Poly.zero(self.n_vars)
        for k, b in enumerate(self.coeffs):
            if not b.is_zero():
                out = out + b * p.partial(k)
        return out

    def bracket(self, other: "VectorField") -> "VectorField":
        """Exact commutator [self, other] as a derivation."""
        if self.n_vars != other.n_vars:
            raise ValueError("dimension mismatch")
        return VectorField(
            [
                self.apply_poly(b) - other.apply_poly(a)
                for a, b in zip(self.coeffs, other.coeffs)
            ]
        )

    def value_at(self, point) -> tuple:
        return tuple(c.eval(point) for c in self.coeffs)

    def __add__(self, other):
        return VectorField([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        return VectorField([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, factor) -> "VectorField":
        return VectorField([c * factor for c in self.coeffs])

    def apply_jet(self, u_jet: Jet, point) -> Jet:
        """Jet of (self u) at the point, one order lower than u_jet."""
        lower = u_jet.space.lower
        acc = Jet.constant(lower, 0)
        for k, b in enumerate(self.coeffs):
            if b.is_zero():
                continue
            dk = u_jet.deriv(k)
            if b.is_constant():
                acc = acc + dk.scale(b.constant_term())
            else:
                acc = acc + Jet(lower, b.taylor_coefficients(point, lower.exps)) * dk
        return acc

    def __repr__(self):
        parts = [
            f"({c!r}) d{m + 1}" for m, c in enumerate(self.coeffs) if not c.is_zero()
        ]
        return " + ".join(parts) if parts else "0"


def lie_bracket(a: VectorField, b: VectorField) -> VectorField:
    return a.bracket(b)


# ---------------------------------------------------------------------------
# exact linear algebra over the rationals
# ---------------------------------------------------------------------------


class RationalRowBasis:
    """Incremental row space with exact Gaussian elimination."""

    def __init__(self, width: int):
        self.width = width
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def _reduce(self, vec):
        vec = [Fraction(v) for v in vec]
        for row, piv in zip(self.rows, self.pivots):
            factor = vec[piv]
            if factor:
                for i in range(self.width):
                    vec[i] -= factor * row[i]
        return vec

    def try_add(self, vec) -> bool:
        """Insert if it increases the rank; returns whether it did."""
        vec = self._reduce(vec)
        for piv in range(self.width):
            if vec[piv]:
                inv = Fraction(1) / vec[piv]
                self.rows.append([v * inv for v in vec])
                self.pivots.append(piv)
                return True
        return False

    @property
    def rank(self) -> int:
        return len(self.rows)


def exact_rank(rows: Sequence[Sequence]) -> int:
    rows = list(rows)
    if not rows:
        return 0
    basis = RationalRowBasis(len(rows[0]))
    for row in rows:
        basis.try_add(row)
    return basis.rank


def exact_det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(matrix)
    rows = [[Fraction(v) for v in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        det *= rows[col][col]
        inv = Fraction(1) / rows[col][col]
        for r in range(col + 1, n):
            factor = rows[r][col] * inv
            if factor:
                for c in range(col, n):
                    rows[r][c] -= factor * rows[col][c]
    return det


# ---------------------------------------------------------------------------
# systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class H1Violation:
    field_index: int  # 1-based j
    coordinate: int  # 1-based k
    monomial: tuple[int, ...]
    weighted_degree: int
    expected_degree: int

    def to_json(self) -> dict:
        return {
            "field": self.field_index,
            "coordinate": self.coordinate,
            "monomial": list(self.monomial),
            "weighted_degree": self.weighted_degree,
            "expected_degree": self.expected_degree,
        }


@dataclass(frozen=True)
class H1Certificate:
    passed: bool
    violations: tuple[H1Violation, ...]
    triangular: bool
    triangular_violations: tuple[tuple[int, int], ...]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "violations": [v.to_json() for v in self.violations],
            "triangular": self.triangular,
            "triangular_violations": [list(t) for t in self.triangular_violations],
        }


@dataclass(frozen=True)
class VectorFieldSystem:
    """m polynomial vector fields on R^n with dilation exponents sigma."""

    n: int
    m: int
    sigma: tuple[int, ...]
    fields: tuple[VectorField, ...]
    name: str = "system"

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(s) for s in self.sigma))
        object.__setattr__(self, "fields", tuple(self.fields))
        if len(self.sigma) != self.n:
            raise ValueError("sigma must have one exponent per coordinate")
        if self.sigma[0] != 1:
            raise ValueError("the first dilation exponent must be 1")
        if any(a > b for a, b in zip(self.sigma, self.sigma[1:])):
            raise ValueError("dilation exponents must be nondecreasing")
        if len(self.fields) != self.m or self.m < 1:
            raise ValueError("need exactly m vector fields")
        for f in self.fields:
            if f.n_vars != self.n:
                raise ValueError("field dimension mismatch")
        if not self._independent():
            raise ValueError("vector fields are linearly dependent over Q")

    def _independent(self) -> bool:
        columns = sorted(
            {
                (k, exps)
                for f in self.fields
                for k, c in enumerate(f.coeffs)
                for exps in c.terms
            }
        )
        if not columns:
            return False
        col_index = {key: i for i, key in enumerate(columns)}
        rows = []
        for f in self.fields:
            row = [Fraction(0)] * len(columns)
            for k, c in enumerate(f.coeffs):
                for exps, coeff in c.terms.items():
                    row[col_index[(k, exps)]] = coeff
            rows.append(row)
        return exact_rank(rows) == self.m

    @property
    def q(self) -> int:
        """Homogeneous dimension: the sum of the dilation exponents."""
        return sum(self.sigma)

    def field(self, index: int) -> VectorField:
        """1-based access matching multi-index entries."""
        if not 1 <= index <= self.m:
            raise ValueError(f"field index {index} out of range")
        return self.fields[index - 1]


def check_h1(sys: VectorFieldSystem) -> H1Certificate:
    """Certify that every coefficient b_{j,k} is dilation-homogeneous of
    weighted degree sigma_k - 1 (zero polynomials allowed), and report the
    triangular dependence b_{j,k} = b_{j,k}(x_1, ..., x_{k-1})."""
    violations = []
    triangular_violations = []
    for j, f in enumerate(sys.fields, start=1):
        for k, b in enumerate(f.coeffs, start=1):
            if b.is_zero():
                continue
            expected = sys.sigma[k - 1] - 1
            for exps in sorted(b.terms):
                wd = sum(s * e for s, e in zip(sys.sigma, exps))
                if wd != expected:
                    violations.append(
                        H1Violation(j, k, exps, wd, expected)
                    )
            if any(i >= k - 1 for i in b.variables_used()):
                triangular_violations.append((j, k))
    return H1Certificate(
        passed=not violations,
        violations=tuple(violations),
        triangular=not triangular_violations,
        triangular_violations=tuple(triangular_violations),
    )


def nested_bracket(sys: VectorFieldSystem, index) -> VectorField:
    """Left-nested bracket [[X_{i1}, X_{i2}], ..., X_{ik}]; X_{i1} for k=1."""
    word = _as_word(index)
    if any(i > sys.m for i in word):
        raise ValueError("multi-index entry exceeds the number of fields")
    acc = sys.field(word[0])
    for i in word[1:]:
        acc = acc.bracket(sys.field(i))
    return acc


def apply_word(
    fields: Sequence[VectorField], index, u: ScalarField, point
) -> object:
    """Value of X_{i1} X_{i2} ... X_{ik} u at point for a raw field list
    (entries are 1-based indices into ``fields``)."""
    word = _as_word(index)
    if len(word) > MAX_JET_ORDER:
        raise ValueError(f"operator words are limited to length {MAX_JET_ORDER}")
    if any(i > len(fields) for i in word):
        raise ValueError("multi-index entry exceeds the number of fields")
    if u.n_vars != fields[0].n_vars:
        raise ValueError("dimension mismatch between fields and scalar field")
    point = tuple(point)
    u_jet = u.jet(point, len(word))
    for i in reversed(word):
        u_jet = fields[i - 1].apply_jet(u_jet, point)
    return u_jet.value


def apply_operator(sys: VectorFieldSystem, index, u: ScalarField, point) -> object:
    """Value of the composed operator X_{i1} X_{i2} ... X_{ik} u at point.

    Computed from the order-k jet of u; exact when u is polynomial and the
    point is rational.
    """
    if u.n_vars != sys.n:
        raise ValueError("dimension mismatch between system and field")
    return apply_word(sys.fields, index, u, point)


def word_values(
    sys: VectorFieldSystem,
    u: ScalarField,
    point,
    words: Sequence[Word],
    memo: dict | None = None,
) -> dict[Word, object]:
    """Values of X_w u at one point for a batch of words, sharing jets.

    The jet of u is computed once at the maximal requested order; suffix
    jets are cached so overlapping words cost one field application each.
    """
    words = [() if not tuple(w) else _as_word(w) for w in words]
    depth = max((len(w) for w in words), default=0)
    if depth > MAX_JET_ORDER:
        raise ValueError(f"operator words are limited to length {MAX_JET_ORDER}")
    point = tuple(point)
    cache: dict[Word, Jet] = {(): u.jet(point, depth, memo=memo)}

    def suffix_jet(word: Word) -> Jet:
        jet = cache.get(word)
        if jet is None:
            jet = sys.field(word[0]).apply_jet(suffix_jet(word[1:]), point)
            cache[word] = jet
        return jet

    return {w: suffix_jet(w).value for w in words}


def all_words(m: int, length: int) -> list[Word]:
    """Words over {1..m} of exactly the given length, lexicographic order."""
    if length == 0:
        return [()]
    shorter = all_words(m, length - 1)
    return [w + (i,) for w in shorter for i in range(1, m + 1)]
