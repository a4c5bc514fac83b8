"""Closed-form scalar fields with Taylor-mode point differentiation.

A :class:`ScalarField` is an expression tree over variables, rational
constants, +, *, /, integer powers, exp, a homogeneous-norm node and the
smooth step profile used for cutoff functions.  Fields support plain
evaluation everywhere on their domain and jet evaluation (all mixed
partials up to order 6) at points where every node is smooth.

Jets of polynomial expressions at rational points are exact; jets of
transcendental nodes are floating point.

Prefix grammar (see :func:`parse_prefix`)::

    expr   := VAR | NUMBER | (+ e1 e2 ...) | (* e1 e2 ...) | (- e1 [e2])
            | (/ e1 e2) | (^ e1 INT) | (exp e) | (chi e)
            | (norm (w1 ... wd) e1 ... ed)
            | (poly NVARS ((a1 ... an) NUM DEN) ...)
    VAR    := x1 | x2 | ...          (1-based)
    NUMBER := INT | INT/INT          (exact rationals)

``chi`` is the fixed smooth decreasing profile that equals 1 on
(-inf, -1/4] and 0 on [1/4, +inf); ``norm`` is the homogeneous norm with
the given integer dilation exponents applied to the argument vector.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import hom_norm_value
from .jets import Jet, JetSpace
from .poly import Poly

MAX_JET_ORDER = 6


class NonSmoothPointError(ValueError):
    """Raised when a jet is requested where a profile node is not smooth."""


# ---------------------------------------------------------------------------
# smooth step profile
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(80)


def _bump(t: float) -> float:
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return math.exp(-1.0 / (t * (1.0 - t)))


def _integral_bump(a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * sum(w * _bump(mid + half * x) for x, w in zip(_GL_NODES, _GL_WEIGHTS))


_BUMP_MASS = _integral_bump(0.0, 1.0)


def smoothstep(y: float) -> float:
    """Normalized integral of the standard bump: 0 at y<=0, 1 at y>=1."""
    if y <= 0.0:
        return 0.0
    if y >= 1.0:
        return 1.0
    return _integral_bump(0.0, y) / _BUMP_MASS


def chi(s: float) -> float:
    """Smooth decreasing profile: 1 on (-inf,-1/4], 0 on [1/4,inf)."""
    if s <= -0.25:
        return 1.0
    if s >= 0.25:
        return 0.0
    return 1.0 - smoothstep(2.0 * s + 0.5)


def chi_taylor(s0: float, order: int) -> list[float]:
    """Taylor coefficients of chi at s0, for -1/4 < s0 < 1/4."""
    y0 = 2.0 * s0 + 0.5
    coeffs = [1.0 - smoothstep(y0)]
    if order >= 1:
        if order == 1:
            bump_coeffs = [_bump(y0)]
        else:
            space = JetSpace.get(1, order - 1)
            y = Jet.variable(space, 0, y0)
            bump_jet = (-(y * (1 - y)).reciprocal()).exp()
            bump_coeffs = bump_jet.coeffs
        for j in range(1, order + 1):
            step_j = bump_coeffs[j - 1] / (_BUMP_MASS * j)
            coeffs.append(-step_j * 2.0 ** j)
    return coeffs


# ---------------------------------------------------------------------------
# expression nodes
# ---------------------------------------------------------------------------


class Expr:
    __slots__ = ()

    def eval(self, point, memo):
        raise NotImplementedError

    def jet(self, point, space, memo):
        raise NotImplementedError

    def rebuild(self, children):
        raise NotImplementedError

    def children(self) -> tuple:
        return ()

    def prefix(self) -> str:
        raise NotImplementedError


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        value = value if isinstance(value, Fraction) else Fraction(value)
        self.value = int(value) if value.denominator == 1 else value

    def eval(self, point, memo):
        return self.value

    def jet(self, point, space, memo):
        return Jet.constant(space, self.value)

    def rebuild(self, children):
        return self

    def prefix(self):
        return str(self.value)


class Var(Expr):
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index

    def eval(self, point, memo):
        return point[self.index]

    def jet(self, point, space, memo):
        return Jet.variable(space, self.index, point[self.index])

    def rebuild(self, children):
        return self

    def prefix(self):
        return f"x{self.index + 1}"


class _Nary(Expr):
    __slots__ = ("args",)
    symbol = "?"

    def __init__(self, args):
        self.args = tuple(args)

    def children(self):
        return self.args

    def rebuild(self, children):
        return type(self)(children)

    def prefix(self):
        inner = " ".join(a.prefix() for a in self.args)
        return f"({self.symbol} {inner})"


class Sum(_Nary):
    __slots__ = ()
    symbol = "+"

    def eval(self, point, memo):
        return sum(_memo_eval(a, point, memo) for a in self.args)

    def jet(self, point, space, memo):
        acc = _memo_jet(self.args[0], point, space, memo)
        for a in self.args[1:]:
            acc = acc + _memo_jet(a, point, space, memo)
        return acc


class Prod(_Nary):
    __slots__ = ()
    symbol = "*"

    def eval(self, point, memo):
        acc = _memo_eval(self.args[0], point, memo)
        for a in self.args[1:]:
            acc = acc * _memo_eval(a, point, memo)
        return acc

    def jet(self, point, space, memo):
        acc = _memo_jet(self.args[0], point, space, memo)
        for a in self.args[1:]:
            acc = acc * _memo_jet(a, point, space, memo)
        return acc


class Quot(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num, den):
        self.num = num
        self.den = den

    def children(self):
        return (self.num, self.den)

    def rebuild(self, children):
        return Quot(*children)

    def eval(self, point, memo):
        return _memo_eval(self.num, point, memo) / _memo_eval(self.den, point, memo)

    def jet(self, point, space, memo):
        return _memo_jet(self.num, point, space, memo) / _memo_jet(self.den, point, space, memo)

    def prefix(self):
        return f"(/ {self.num.prefix()} {self.den.prefix()})"


class IntPow(Expr):
    __slots__ = ("base", "power")

    def __init__(self, base, power: int):
        self.base = base
        self.power = int(power)

    def children(self):
        return (self.base,)

    def rebuild(self, children):
        return IntPow(children[0], self.power)

    def eval(self, point, memo):
        v = _memo_eval(self.base, point, memo)
        if self.power >= 0:
            return v ** self.power
        return (Fraction(1) if isinstance(v, (int, Fraction)) else 1.0) / v ** (-self.power)

    def jet(self, point, space, memo):
        return _memo_jet(self.base, point, space, memo).powi(self.power)

    def prefix(self):
        return f"(^ {self.base.prefix()} {self.power})"


class ExpNode(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return ExpNode(children[0])

    def eval(self, point, memo):
        return math.exp(float(_memo_eval(self.arg, point, memo)))

    def jet(self, point, space, memo):
        return _memo_jet(self.arg, point, space, memo).exp()

    def prefix(self):
        return f"(exp {self.arg.prefix()})"


class PolyTerm(Expr):
    __slots__ = ("poly",)

    def __init__(self, poly: Poly):
        self.poly = poly

    def eval(self, point, memo):
        return self.poly.eval(point)

    def jet(self, point, space, memo):
        return Jet(space, self.poly.taylor_coefficients(point, space.exps))

    def rebuild(self, children):
        return self

    def prefix(self):
        terms = " ".join(
            "((%s) %d %d)" % (" ".join(map(str, e)), num, den)
            for e, num, den in self.poly.to_json()
        )
        return f"(poly {self.poly.n_vars} {terms})".rstrip()


class NormNode(Expr):
    """Homogeneous norm of an argument vector, smooth away from 0.

    Jets are found by solving sum_i a_i(eps)^2 t(eps)^{2 w_i} = 1 for the
    truncated series t with Newton iteration, then inverting; derivatives
    are floating point.
    """

    __slots__ = ("weights", "args")

    def __init__(self, weights, args):
        self.weights = tuple(int(w) for w in weights)
        self.args = tuple(args)
        if len(self.weights) != len(self.args):
            raise ValueError("norm node needs one weight per argument")
        if any(w < 1 for w in self.weights):
            raise ValueError("norm weights must be positive integers")

    def children(self):
        return self.args

    def rebuild(self, children):
        return NormNode(self.weights, children)

    def eval(self, point, memo):
        values = [float(_memo_eval(a, point, memo)) for a in self.args]
        return hom_norm_value(self.weights, values)

    def jet(self, point, space, memo):
        values = [float(_memo_eval(a, point, memo)) for a in self.args]
        if all(v == 0.0 for v in values):
            raise NonSmoothPointError("homogeneous norm is not smooth at the origin")
        if space.order == 0:
            return Jet.constant(space, hom_norm_value(self.weights, values))
        squares = [
            _memo_jet(a, point, space, memo).to_float().powi(2) for a in self.args
        ]
        from .geometry import norm_root

        t = Jet.constant(space, norm_root(self.weights, values))
        steps = max(1, math.ceil(math.log2(space.order + 1)))
        for _ in range(steps):
            powers = _power_table(t, 2 * max(self.weights))
            g = Jet.constant(space, 0.0)
            slope = Jet.constant(space, 0.0)
            for sq, w in zip(squares, self.weights):
                g = g + sq * powers[2 * w]
                slope = slope + sq.scale(2 * w) * powers[2 * w - 1]
            t = t - (g - 1) * slope.reciprocal()
        return t.reciprocal()

    def prefix(self):
        ws = " ".join(map(str, self.weights))
        inner = " ".join(a.prefix() for a in self.args)
        return f"(norm ({ws}) {inner})"


def _power_table(jet: Jet, top: int) -> list[Jet]:
    powers = [Jet.constant(jet.space, 1.0), jet]
    for _ in range(top - 1):
        powers.append(powers[-1] * jet)
    return powers


class ChiNode(Expr):
    """The smooth step profile applied to a scalar argument.

    On the flat regions (argument <= -1/4 or >= 1/4) the composite is
    locally constant, so the jet short-circuits to a constant without
    requiring the argument to be smooth there.
    """

    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg

    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        return ChiNode(children[0])

    def eval(self, point, memo):
        return chi(float(_memo_eval(self.arg, point, memo)))

    def jet(self, point, space, memo):
        s0 = float(_memo_eval(self.arg, point, memo))
        if s0 <= -0.25:
            return Jet.constant(space, 1.0)
        if s0 >= 0.25:
            return Jet.constant(space, 0.0)
        inner = _memo_jet(self.arg, point, space, memo).to_float()
        outer = chi_taylor(float(inner.value), space.order)
        return inner.compose_univariate(outer)

    def prefix(self):
        return f"(chi {self.arg.prefix()})"


# ---------------------------------------------------------------------------
# public wrapper
# ---------------------------------------------------------------------------


class ScalarField:
    """A smooth scalar function of ``n_vars`` variables."""

    __slots__ = ("n_vars", "root")

    def __init__(self, n_vars: int, root: Expr):
        self.n_vars = n_vars
        self.root = root

    # construction helpers

    @classmethod
    def constant(cls, value, n_vars: int) -> "ScalarField":
        return cls(n_vars, Const(value))

    @classmethod
    def variable(cls, index: int, n_vars: int) -> "ScalarField":
        if not 0 <= index < n_vars:
            raise ValueError("variable index out of range")
        return cls(n_vars, Var(index))

    @classmethod
    def from_poly(cls, poly: Poly) -> "ScalarField":
        return cls(poly.n_vars, PolyTerm(poly))

    @classmethod
    def norm(cls, weights: Sequence[int], n_vars: int | None = None) -> "ScalarField":
        n = len(weights) if n_vars is None else n_vars
        if len(weights) > n:
            raise ValueError("more weights than variables")
        return cls(n, NormNode(weights, [Var(i) for i in range(len(weights))]))

    def exp(self) -> "ScalarField":
        return ScalarField(self.n_vars, ExpNode(self.root))

    def chi_of(self) -> "ScalarField":
        return ScalarField(self.n_vars, ChiNode(self.root))

    # operators

    def _coerce(self, other) -> Expr:
        if isinstance(other, ScalarField):
            if other.n_vars != self.n_vars:
                raise ValueError("dimension mismatch")
            return other.root
        if isinstance(other, Poly):
            return PolyTerm(other)
        return Const(other)

    def __add__(self, other):
        return ScalarField(self.n_vars, Sum((self.root, self._coerce(other))))

    __radd__ = __add__

    def __mul__(self, other):
        return ScalarField(self.n_vars, Prod((self.root, self._coerce(other))))

    __rmul__ = __mul__

    def __sub__(self, other):
        return ScalarField(
            self.n_vars, Sum((self.root, Prod((Const(-1), self._coerce(other)))))
        )

    def __rsub__(self, other):
        return ScalarField(
            self.n_vars, Sum((self._coerce(other), Prod((Const(-1), self.root))))
        )

    def __neg__(self):
        return ScalarField(self.n_vars, Prod((Const(-1), self.root)))

    def __truediv__(self, other):
        return ScalarField(self.n_vars, Quot(self.root, self._coerce(other)))

    def __pow__(self, power: int):
        return ScalarField(self.n_vars, IntPow(self.root, power))

    # evaluation

    def eval(self, point: Sequence, memo: dict | None = None):
        if len(point) != self.n_vars:
            raise ValueError("point dimension mismatch")
        return _memo_eval(self.root, tuple(point), {} if memo is None else memo)

    __call__ = eval

    def jet(self, point: Sequence, order: int, memo: dict | None = None) -> Jet:
        """All mixed partials of self at ``point`` up to ``order`` <= 6."""
        if len(point) != self.n_vars:
            raise ValueError("point dimension mismatch")
        if order < 0 or order > MAX_JET_ORDER:
            raise ValueError(f"jet order must be in 0..{MAX_JET_ORDER}")
        space = JetSpace.get(self.n_vars, order)
        return _memo_jet(self.root, tuple(point), space, {} if memo is None else memo)

    # structural transforms

    def scale_vars(self, factors: Sequence) -> "ScalarField":
        """Substitute x_i -> factors[i] * x_i (exact rational factors)."""
        if len(factors) != self.n_vars:
            raise ValueError("need one factor per variable")
        fr = [Fraction(f) for f in factors]

        def walk(node: Expr) -> Expr:
            if isinstance(node, Var):
                return Prod((Const(fr[node.index]), node))
            if isinstance(node, PolyTerm):
                args = [
                    Poly.variable(i, node.poly.n_vars) * fr[i]
                    for i in range(node.poly.n_vars)
                ]
                return PolyTerm(node.poly.substitute(args))
            kids = node.children()
            if not kids:
                return node
            return node.rebuild(tuple(walk(k) for k in kids))

        return ScalarField(self.n_vars, walk(self.root))

    def embed(self, n_new: int) -> "ScalarField":
        """View as a field of more variables (the extras are ignored)."""
        if n_new < self.n_vars:
            raise ValueError("cannot shrink the variable count")
        if n_new == self.n_vars:
            return self

        def walk(node: Expr) -> Expr:
            if isinstance(node, PolyTerm):
                return PolyTerm(node.poly.embed(n_new))
            kids = node.children()
            if not kids:
                return node
            return node.rebuild(tuple(walk(k) for k in kids))

        return ScalarField(n_new, walk(self.root))

    def to_prefix(self) -> str:
        return self.root.prefix()

    def __repr__(self):
        return f"ScalarField({self.n_vars}, {self.to_prefix()})"


def _memo_eval(node: Expr, point, memo: dict):
    key = (0, id(node))
    hit = memo.get(key)
    if hit is not None:
        return hit
    value = node.eval(point, memo)
    memo[key] = value
    return value


def _memo_jet(node: Expr, point, space, memo: dict):
    key = (1, id(node))
    hit = memo.get(key)
    if hit is not None:
        return hit
    value = node.jet(point, space, memo)
    memo[key] = value
    return value


def jet(field: ScalarField, point: Sequence, order: int) -> Jet:
    """Module-level alias for :meth:`ScalarField.jet`."""
    return field.jet(point, order)


# ---------------------------------------------------------------------------
# prefix notation parser
# ---------------------------------------------------------------------------


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse_prefix(text: str, n_vars: int) -> ScalarField:
    """Parse a field from the documented prefix grammar."""
    tokens = _tokenize(text)
    pos = 0

    def read():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        return tok

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def parse_atom(tok: str) -> Expr:
        if tok.startswith("x") and tok[1:].isdigit():
            idx = int(tok[1:]) - 1
            if not 0 <= idx < n_vars:
                raise ValueError(f"variable {tok} out of range for n_vars={n_vars}")
            return Var(idx)
        try:
            return Const(Fraction(tok))
        except ValueError:
            raise ValueError(f"unrecognized token {tok!r}") from None

    def parse_int_list() -> list[int]:
        if read() != "(":
            raise ValueError("expected '('")
        out = []
        while peek() != ")":
            out.append(int(read()))
        read()
        return out

    def parse_expr() -> Expr:
        tok = read()
        if tok != "(":
            return parse_atom(tok)
        op = read()
        if op == "+":
            args = _parse_args()
            if len(args) < 2:
                raise ValueError("(+ ...) needs at least two arguments")
            return Sum(tuple(args))
        if op == "*":
            args = _parse_args()
            if len(args) < 2:
                raise ValueError("(* ...) needs at least two arguments")
            return Prod(tuple(args))
        if op == "-":
            args = _parse_args()
            if len(args) == 1:
                return Prod((Const(-1), args[0]))
            if len(args) == 2:
                return Sum((args[0], Prod((Const(-1), args[1]))))
            raise ValueError("(- ...) takes one or two arguments")
        if op == "/":
            args = _parse_args()
            if len(args) != 2:
                raise ValueError("(/ ...) takes two arguments")
            return Quot(args[0], args[1])
        if op == "^":
            base = parse_expr()
            power = int(read())
            if read() != ")":
                raise ValueError("expected ')'")
            return IntPow(base, power)
        if op == "exp":
            arg = parse_expr()
            if read() != ")":
                raise ValueError("expected ')'")
            return ExpNode(arg)
        if op == "chi":
            arg = parse_expr()
            if read() != ")":
                raise ValueError("expected ')'")
            return ChiNode(arg)
        if op == "norm":
            weights = parse_int_list()
            args = _parse_args()
            return NormNode(weights, args)
        if op == "poly":
            nv = int(read())
            terms = {}
            while peek() != ")":
                if read() != "(":
                    raise ValueError("expected '(' starting a poly term")
                exps = tuple(parse_int_list())
                num = int(read())
                den = int(read())
                if read() != ")":
                    raise ValueError("expected ')' ending a poly term")
                terms[exps] = Fraction(num, den)
            read()
            return PolyTerm(Poly(nv, terms))
        raise ValueError(f"unknown operator {op!r}")

    def _parse_args() -> list[Expr]:
        args = []
        while peek() != ")":
            args.append(parse_expr())
        read()
        return args

    root = parse_expr()
    if pos != len(tokens):
        raise ValueError("trailing tokens after expression")
    return ScalarField(n_vars, root)
