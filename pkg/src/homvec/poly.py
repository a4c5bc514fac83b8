"""Sparse multivariate polynomials with exact rational coefficients.

Polynomials are stored as a map from exponent tuples to nonzero
``fractions.Fraction`` coefficients.  All arithmetic (addition,
multiplication, partial derivatives, substitution) is exact; nothing in
this module ever rounds.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Exponent = tuple[int, ...]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError("Poly coefficients must be exact rationals, not float")
    return Fraction(value)


def graded_exponents(n_vars: int, max_degree: int) -> list[Exponent]:
    """All exponent tuples with total degree <= max_degree, graded lex order."""
    out: list[Exponent] = []
    for deg in range(max_degree + 1):
        out.extend(_layer(n_vars, deg))
    return out


def _layer(n_vars: int, deg: int) -> list[Exponent]:
    if n_vars == 1:
        return [(deg,)]
    out = []
    for head in range(deg, -1, -1):
        out.extend((head,) + rest for rest in _layer(n_vars - 1, deg - head))
    return out


class Poly:
    """Polynomial in ``n_vars`` variables over the rationals.

    Instances are immutable in practice: every operation returns a new
    polynomial, and ``terms`` must not be mutated after construction.
    """

    __slots__ = ("n_vars", "terms", "_derivs", "_taylor", "_float_terms")

    def __init__(self, n_vars: int, terms: Mapping[Exponent, Fraction] | None = None):
        if n_vars < 1:
            raise ValueError("n_vars must be positive")
        clean: dict[Exponent, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n_vars:
                raise ValueError(f"exponent tuple {exps} does not have {n_vars} entries")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = _as_fraction(coeff)
            if coeff != 0:
                clean[exps] = coeff
        self.n_vars = n_vars
        self.terms = clean
        self._derivs: dict[int, "Poly"] | None = None
        self._taylor: dict | None = None
        self._float_terms: list | None = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n_vars: int) -> "Poly":
        return cls(n_vars, {})

    @classmethod
    def constant(cls, value, n_vars: int) -> "Poly":
        return cls(n_vars, {(0,) * n_vars: _as_fraction(value)})

    @classmethod
    def variable(cls, index: int, n_vars: int) -> "Poly":
        """The coordinate polynomial x_index (0-based index)."""
        if not 0 <= index < n_vars:
            raise ValueError(f"variable index {index} out of range for n_vars={n_vars}")
        exps = tuple(1 if i == index else 0 for i in range(n_vars))
        return cls(n_vars, {exps: Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff, n_vars: int | None = None) -> "Poly":
        exps = tuple(exps)
        return cls(n_vars if n_vars is not None else len(exps), {exps: _as_fraction(coeff)})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.n_vars, Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def variables_used(self) -> set[int]:
        used = set()
        for exps in self.terms:
            used.update(i for i, e in enumerate(exps) if e > 0)
        return used

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n_vars == other.n_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------------

    def _check_same(self, other: "Poly"):
        if self.n_vars != other.n_vars:
            raise ValueError(f"dimension mismatch: {self.n_vars} vs {other.n_vars}")

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other, self.n_vars)
        self._check_same(other)
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            acc = terms.get(exps, Fraction(0)) + coeff
            if acc == 0:
                terms.pop(exps, None)
            else:
                terms[exps] = acc
        return Poly(self.n_vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n_vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other, self.n_vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            coeff = _as_fraction(other)
            if coeff == 0:
                return Poly.zero(self.n_vars)
            return Poly(self.n_vars, {e: c * coeff for e, c in self.terms.items()})
        self._check_same(other)
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                acc = terms.get(exps, Fraction(0)) + c1 * c2
                if acc == 0:
                    terms.pop(exps, None)
                else:
                    terms[exps] = acc
        return Poly(self.n_vars, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise ValueError("Poly power must be a nonnegative integer")
        result = Poly.constant(1, self.n_vars)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def partial(self, index: int) -> "Poly":
        """Exact partial derivative with respect to variable ``index``."""
        if self._derivs is None:
            self._derivs = {}
        cached = self._derivs.get(index)
        if cached is not None:
            return cached
        terms: dict[Exponent, Fraction] = {}
        for exps, coeff in self.terms.items():
            e = exps[index]
            if e == 0:
                continue
            new = list(exps)
            new[index] = e - 1
            terms[tuple(new)] = coeff * e
        out = Poly(self.n_vars, terms)
        self._derivs[index] = out
        return out

    def eval(self, point: Sequence):
        """Evaluate at a point; exact when all coordinates are rational."""
        if len(point) != self.n_vars:
            raise ValueError("point dimension mismatch")
        total = 0
        for exps, coeff in self.terms.items():
            term = coeff
            for x, e in zip(point, exps):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def eval_float(self, point: Sequence) -> float:
        """Floating-point evaluation with cached float coefficients."""
        if self._float_terms is None:
            self._float_terms = [(e, float(c)) for e, c in self.terms.items()]
        total = 0.0
        for exps, coeff in self._float_terms:
            term = coeff
            for x, e in zip(point, exps):
                if e == 1:
                    term *= x
                elif e:
                    term *= x ** e
            total += term
        return total

    def substitute(self, args: Sequence["Poly"]) -> "Poly":
        """Substitute args[i] for variable i; args live in a common ring."""
        if len(args) != self.n_vars:
            raise ValueError("substitution needs one polynomial per variable")
        target = args[0].n_vars if args else self.n_vars
        for a in args:
            if a.n_vars != target:
                raise ValueError("substitution arguments must share n_vars")
        result = Poly.zero(target)
        for exps, coeff in self.terms.items():
            term = Poly.constant(coeff, target)
            for a, e in zip(args, exps):
                if e:
                    term = term * a ** e
            result = result + term
        return result

    def embed(self, n_new: int, offset: int = 0) -> "Poly":
        """Reinterpret in a larger ring, shifting variable indices by offset."""
        if offset < 0 or self.n_vars + offset > n_new:
            raise ValueError("embedding does not fit")
        terms = {}
        for exps, coeff in self.terms.items():
            new = (0,) * offset + exps + (0,) * (n_new - offset - self.n_vars)
            terms[new] = coeff
        return Poly(n_new, terms)

    # -- grading -----------------------------------------------------------

    def weighted_degrees(self, sigma: Sequence[int]) -> set[int]:
        """Set of dilation-weighted degrees over the monomials of self.

        Empty for the zero polynomial; a singleton {d} exactly when self is
        homogeneous of weighted degree d under x_i -> lambda^sigma_i x_i.
        """
        if len(sigma) != self.n_vars:
            raise ValueError("sigma length must equal n_vars")
        return {sum(s * e for s, e in zip(sigma, exps)) for exps in self.terms}

    def dilate(self, sigma: Sequence[int]) -> "Poly":
        """p(lambda^sigma_1 x_1, ..., lambda^sigma_n x_n) as a polynomial in
        (lambda, x_1, ..., x_n), with lambda as variable 0."""
        if len(sigma) != self.n_vars:
            raise ValueError("sigma length must equal n_vars")
        terms = {}
        for exps, coeff in self.terms.items():
            lam = sum(s * e for s, e in zip(sigma, exps))
            terms[(lam,) + exps] = coeff
        return Poly(self.n_vars + 1, terms)

    # -- jets ----------------------------------------------------------------

    def taylor_coefficients(self, point: Sequence, exps_list: Sequence[Exponent]) -> list:
        """Taylor coefficients d^a p(point)/a! for each requested multi-index."""
        if self._taylor is None:
            self._taylor = {}
        key = exps_list if isinstance(exps_list, tuple) else tuple(exps_list)
        table = self._taylor.get(key)
        if table is None:
            derivs: dict[Exponent, Poly] = {(0,) * self.n_vars: self}
            table = []
            for alpha in exps_list:
                p = derivs.get(alpha)
                if p is None:
                    k = next(i for i, e in enumerate(alpha) if e > 0)
                    prev = list(alpha)
                    prev[k] -= 1
                    p = derivs[tuple(prev)].partial(k)
                    derivs[alpha] = p
                fact = 1
                for e in alpha:
                    fact *= math.factorial(e)
                table.append((p, Fraction(1, fact), 1.0 / fact))
            self._taylor[key] = table
        if any(type(x) is float for x in point):
            return [p.eval_float(point) * f for p, _, f in table]
        return [
            p.eval(point) * inv_fact if inv_fact != 1 else p.eval(point)
            for p, inv_fact, _ in table
        ]

    # -- serialization -------------------------------------------------------

    def to_json(self) -> list:
        """Sparse monomial list [[exponents], numerator, denominator]."""
        items = sorted(self.terms.items())
        return [[list(e), c.numerator, c.denominator] for e, c in items]

    @classmethod
    def from_json(cls, n_vars: int, data: Iterable) -> "Poly":
        terms = {}
        for entry in data:
            if len(entry) != 3:
                raise ValueError(f"bad polynomial term {entry!r}")
            exps, num, den = entry
            terms[tuple(int(e) for e in exps)] = Fraction(int(num), int(den))
        return cls(n_vars, terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, coeff in sorted(self.terms.items()):
            factors = [] if coeff != 1 or sum(exps) == 0 else []
            if coeff != 1 or sum(exps) == 0:
                factors.append(str(coeff))
            for i, e in enumerate(exps):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)
