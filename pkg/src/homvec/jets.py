"""Taylor-mode jet arithmetic: truncated multivariate Taylor polynomials.

A :class:`Jet` holds the Taylor coefficients c_a = (d^a f)(x0)/a! of a
function at a base point, for all multi-indices |a| <= order.  Arithmetic
(+, *, reciprocal, integer powers, exp, composition with a univariate
Taylor series) is carried out in the nilpotent truncated algebra, so jets
of arbitrary compositions come out correct up to the truncation order.

Coefficients may be exact (int / Fraction) or float; operations never
promote exact coefficients unless a transcendental step forces it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .poly import graded_exponents

_SPACES: dict[tuple[int, int], "JetSpace"] = {}


class JetSpace:
    """Shared immutable tables for jets with a fixed (n_vars, order).

    Exponents are enumerated in graded order, so the jets of order k-1
    occupy a prefix of the order-k enumeration; truncation is a slice.
    """

    def __init__(self, n_vars: int, order: int):
        self.n_vars = n_vars
        self.order = order
        self.exps = tuple(graded_exponents(n_vars, order))
        self.index = {e: i for i, e in enumerate(self.exps)}
        self.size = len(self.exps)
        self.factorials = [
            math.prod(math.factorial(e) for e in exps) for exps in self.exps
        ]
        # prod_table[i][j] = index of exps[i]+exps[j], or -1 past the order.
        self.prod_table = []
        for e1 in self.exps:
            d1 = sum(e1)
            row = []
            for e2 in self.exps:
                if d1 + sum(e2) > order:
                    row.append(-1)
                else:
                    row.append(self.index[tuple(a + b for a, b in zip(e1, e2))])
            self.prod_table.append(row)
        # deriv_table[k]: (dst index in lower space, src index here, factor)
        self.deriv_tables = []
        if order >= 1:
            lower = JetSpace.get(n_vars, order - 1)
            for k in range(n_vars):
                table = []
                for src, exps in enumerate(self.exps):
                    if exps[k] >= 1:
                        down = list(exps)
                        down[k] -= 1
                        table.append((lower.index[tuple(down)], src, exps[k]))
                self.deriv_tables.append(table)

    @staticmethod
    def get(n_vars: int, order: int) -> "JetSpace":
        key = (n_vars, order)
        space = _SPACES.get(key)
        if space is None:
            space = _SPACES[key] = JetSpace(n_vars, order)
        return space

    @property
    def lower(self) -> "JetSpace":
        return JetSpace.get(self.n_vars, self.order - 1)


class Jet:
    __slots__ = ("space", "coeffs")

    def __init__(self, space: JetSpace, coeffs: list):
        self.space = space
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, space: JetSpace, value) -> "Jet":
        coeffs = [0] * space.size
        coeffs[0] = value
        return cls(space, coeffs)

    @classmethod
    def variable(cls, space: JetSpace, index: int, value) -> "Jet":
        coeffs = [0] * space.size
        coeffs[0] = value
        if space.order >= 1:
            unit = tuple(1 if i == index else 0 for i in range(space.n_vars))
            coeffs[space.index[unit]] = 1
        return cls(space, coeffs)

    # -- access --------------------------------------------------------------

    @property
    def value(self):
        return self.coeffs[0]

    def taylor_coefficient(self, alpha: Sequence[int]):
        return self.coeffs[self.space.index[tuple(alpha)]]

    def partial(self, alpha: Sequence[int]):
        """Mixed partial derivative d^alpha f at the base point."""
        idx = self.space.index[tuple(alpha)]
        return self.coeffs[idx] * self.space.factorials[idx]

    def partials(self) -> dict:
        return {
            exps: c * f
            for exps, c, f in zip(self.space.exps, self.coeffs, self.space.factorials)
        }

    # -- ring operations -----------------------------------------------------

    def _same(self, other: "Jet"):
        if self.space is not other.space:
            raise ValueError("jets from different spaces")

    def __add__(self, other):
        if not isinstance(other, Jet):
            coeffs = list(self.coeffs)
            coeffs[0] = coeffs[0] + other
            return Jet(self.space, coeffs)
        self._same(other)
        return Jet(self.space, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, [-a for a in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return self + (-other)
        self._same(other)
        return Jet(self.space, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor) -> "Jet":
        return Jet(self.space, [factor * a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._same(other)
        table = self.space.prod_table
        out = [0] * self.space.size
        B = other.coeffs
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            row = table[i]
            for j, b in enumerate(B):
                if b:
                    k = row[j]
                    if k >= 0:
                        out[k] += a * b
        return Jet(self.space, out)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("jet with zero constant term has no reciprocal")
        inv0 = Fraction(1, 1) / c0 if isinstance(c0, (int, Fraction)) else 1.0 / c0
        z = Jet.constant(self.space, inv0)
        # Newton doubles the correct ε-adic order each step.
        steps = max(1, math.ceil(math.log2(self.space.order + 1))) if self.space.order else 0
        for _ in range(steps):
            z = z * (2 - self * z)
        return z

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self.scale(Fraction(1, 1) / other if isinstance(other, (int, Fraction)) else 1.0 / other)

    def powi(self, power: int) -> "Jet":
        if power < 0:
            return self.reciprocal().powi(-power)
        result = Jet.constant(self.space, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def exp(self) -> "Jet":
        c0 = self.coeffs[0]
        lead = math.exp(float(c0))
        nil = list(self.coeffs)
        nil[0] = 0
        nil_jet = Jet(self.space, nil)
        acc = Jet.constant(self.space, 1)
        for j in range(self.space.order, 0, -1):
            acc = (nil_jet * acc).scale(Fraction(1, j)) + 1
        return acc.scale(lead)

    def compose_univariate(self, outer: Sequence) -> "Jet":
        """Apply a univariate function given its Taylor coefficients at the
        constant term of self: outer[j] = g^(j)(self.value)/j!."""
        nil = list(self.coeffs)
        nil[0] = 0
        nil_jet = Jet(self.space, nil)
        acc = Jet.constant(self.space, outer[-1])
        for j in range(len(outer) - 2, -1, -1):
            acc = nil_jet * acc + outer[j]
        return acc

    # -- calculus ------------------------------------------------------------

    def deriv(self, k: int) -> "Jet":
        """Jet of the k-th partial derivative, one order lower."""
        if self.space.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        lower = self.space.lower
        out = [0] * lower.size
        for dst, src, factor in self.space.deriv_tables[k]:
            c = self.coeffs[src]
            if c:
                out[dst] = c * factor
        return Jet(lower, out)

    def truncate(self, order: int) -> "Jet":
        if order > self.space.order:
            raise ValueError("cannot extend a jet by truncation")
        if order == self.space.order:
            return self
        lower = JetSpace.get(self.space.n_vars, order)
        return Jet(lower, self.coeffs[: lower.size])

    def to_float(self) -> "Jet":
        return Jet(self.space, [float(c) for c in self.coeffs])

    def __repr__(self):
        entries = ", ".join(
            f"{exps}:{c}" for exps, c in zip(self.space.exps, self.coeffs) if c
        )
        return f"Jet(order={self.space.order}, {{{entries}}})"
