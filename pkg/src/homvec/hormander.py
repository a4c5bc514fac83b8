"""Rank certificates for iterated brackets at (and away from) the origin.

Left-nested brackets are enumerated in shortlex order; columns that
increase the exact rational rank of the value-at-zero matrix are kept.
The resulting certificate is deterministic and can be replayed at any
rational point through the determinant of the certified-word matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fields import (
    RationalRowBasis,
    VectorField,
    VectorFieldSystem,
    Word,
    _as_word,
    exact_det,
)
from .poly import Poly


@dataclass(frozen=True)
class HormanderCertificate:
    passed: bool
    rank: int
    depth_used: int
    max_depth: int
    basis_words: tuple[Word, ...]
    matrix_at_origin: tuple[tuple[Fraction, ...], ...]  # columns

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "rank": self.rank,
            "depth_used": self.depth_used,
            "max_depth": self.max_depth,
            "basis_words": [list(w) for w in self.basis_words],
            "matrix_columns": [
                [[c.numerator, c.denominator] for c in col]
                for col in self.matrix_at_origin
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HormanderCertificate":
        return cls(
            passed=bool(data["passed"]),
            rank=int(data["rank"]),
            depth_used=int(data["depth_used"]),
            max_depth=int(data["max_depth"]),
            basis_words=tuple(tuple(w) for w in data["basis_words"]),
            matrix_at_origin=tuple(
                tuple(Fraction(num, den) for num, den in col)
                for col in data["matrix_columns"]
            ),
        )


def bracket_table(
    fields: Sequence[VectorField], max_depth: int
) -> dict[Word, VectorField]:
    """All left-nested brackets X_[w] with 1 <= |w| <= max_depth."""
    m = len(fields)
    table: dict[Word, VectorField] = {}
    for i in range(1, m + 1):
        table[(i,)] = fields[i - 1]
    for depth in range(2, max_depth + 1):
        for word, bracket in [w for w in table.items() if len(w[0]) == depth - 1]:
            for i in range(1, m + 1):
                table[word + (i,)] = bracket.bracket(fields[i - 1])
    return table


def rank_certificate(
    fields: Sequence[VectorField], n: int, max_depth: int
) -> HormanderCertificate:
    """Greedy shortlex selection of bracket words spanning R^n at 0."""
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    origin = (Fraction(0),) * n
    table = bracket_table(fields, max_depth)
    basis = RationalRowBasis(n)
    words: list[Word] = []
    columns: list[tuple[Fraction, ...]] = []
    for word in sorted(table, key=lambda w: (len(w), w)):
        value = table[word].value_at(origin)
        if basis.try_add(value):
            words.append(word)
            columns.append(tuple(Fraction(v) for v in value))
            if basis.rank == n:
                break
    return HormanderCertificate(
        passed=basis.rank == n,
        rank=basis.rank,
        depth_used=max((len(w) for w in words), default=0),
        max_depth=max_depth,
        basis_words=tuple(words),
        matrix_at_origin=tuple(columns),
    )


def check_rank_at_origin(
    sys: VectorFieldSystem, max_depth: int
) -> HormanderCertificate:
    return rank_certificate(sys.fields, sys.n, max_depth)


def minimal_depth(sys: VectorFieldSystem, max_depth: int) -> int | None:
    """Smallest bracket length whose values span R^n at 0, if any."""
    for depth in range(1, max_depth + 1):
        if rank_certificate(sys.fields, sys.n, depth).passed:
            return depth
    return None


@dataclass(frozen=True)
class PointRankResult:
    point: tuple
    det_nonzero: bool
    determinant: Fraction
    fallback_nonvanishing: bool

    def to_json(self) -> dict:
        return {
            "point": [str(x) for x in self.point],
            "det_nonzero": self.det_nonzero,
            "determinant": [self.determinant.numerator, self.determinant.denominator],
            "fallback_nonvanishing": self.fallback_nonvanishing,
        }


def word_matrix(sys: VectorFieldSystem, words: Sequence, point) -> list[list[Fraction]]:
    """Rows-by-columns matrix whose j-th column is X_[w_j](point)."""
    point = tuple(Fraction(x) for x in point)
    from .fields import nested_bracket

    cols = [nested_bracket(sys, w).value_at(point) for w in words]
    return [[cols[j][i] for j in range(len(cols))] for i in range(sys.n)]


def det_with_words(sys: VectorFieldSystem, words: Sequence, point) -> Fraction:
    return exact_det(word_matrix(sys, words, point))


def check_rank_at_point(
    cert: HormanderCertificate, sys: VectorFieldSystem, point
) -> PointRankResult:
    """Replay the certificate at an arbitrary rational point.

    A zero determinant for the certified words does not refute the rank
    condition there (other words may span); as a fallback, the
    determinant along the dilation ray through the point is computed as
    an exact polynomial in the scale parameter and tested for
    nonvanishing near 0.
    """
    if not cert.passed:
        raise ValueError("certificate did not pass at the origin")
    point = tuple(Fraction(x) for x in point)
    det = det_with_words(sys, cert.basis_words, point)
    if det != 0:
        return PointRankResult(point, True, det, True)

    # entries become univariate polynomials in the ray parameter
    from .fields import nested_bracket

    n_plus = 1
    matrix: list[list[Poly]] = [
        [Poly.zero(n_plus) for _ in cert.basis_words] for _ in range(sys.n)
    ]
    for j, word in enumerate(cert.basis_words):
        bracket = nested_bracket(sys, word)
        for i, comp in enumerate(bracket.coeffs):
            entry = Poly.zero(n_plus)
            for exps, coeff in comp.terms.items():
                weight = sum(s * e for s, e in zip(sys.sigma, exps))
                value = coeff
                for x, e in zip(point, exps):
                    value *= x ** e
                entry = entry + Poly.monomial((weight,), value, n_plus)
            matrix[i][j] = entry
    det_poly = _poly_det(matrix)
    return PointRankResult(point, False, Fraction(0), not det_poly.is_zero())


def _poly_det(matrix: list[list[Poly]]) -> Poly:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    n_vars = matrix[0][0].n_vars
    out = Poly.zero(n_vars)
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = entry * _poly_det(minor)
        out = out + (term if j % 2 == 0 else -term)
    return out


def scaling_identity_residual(
    sys: VectorFieldSystem, words: Sequence, point
) -> Poly:
    """Residual of lambda^{sum |w_j|} det M(delta_lambda(point)) =
    lambda^{sum sigma} det M(point), as a polynomial in lambda."""
    words = [_as_word(w) for w in words]
    point = tuple(Fraction(x) for x in point)
    from .fields import nested_bracket

    matrix = []
    for i in range(sys.n):
        matrix.append([Poly.zero(1) for _ in words])
    for j, word in enumerate(words):
        bracket = nested_bracket(sys, word)
        for i, comp in enumerate(bracket.coeffs):
            entry = Poly.zero(1)
            for exps, coeff in comp.terms.items():
                weight = sum(s * e for s, e in zip(sys.sigma, exps))
                value = coeff
                for x, e in zip(point, exps):
                    value *= x ** e
                entry = entry + Poly.monomial((weight,), value, 1)
            matrix[i][j] = entry
    lhs = _poly_det(matrix) * Poly.monomial((sum(len(w) for w in words),), 1, 1)
    det_at_point = det_with_words(sys, words, point)
    rhs = Poly.monomial((sum(sys.sigma),), det_at_point, 1)
    return lhs - rhs
