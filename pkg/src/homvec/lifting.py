"""Verification of user-supplied Carnot-group lifts.

A candidate lift consists of a polynomial group law on R^N = R^n x R^s,
fiber dilation exponents tau, and lifted vector fields.  All structural
checks (associativity, identity, polynomial inverse, dilation
automorphism, projection onto the base fields, fiber-only remainders,
degree-1 homogeneity, left-invariance, Lie generation) are exact
polynomial identities: a check passes when its residual is the zero
polynomial, never by numeric tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .fields import VectorField, VectorFieldSystem
from .geometry import unit_ball_volume
from .hormander import rank_certificate
from .poly import Poly
from .quadrature import QuadratureConfig, ball_rule_pair
from .scalarfield import ScalarField


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class Certificate:
    passed: bool
    items: tuple[CheckItem, ...]

    def item(self, name: str) -> CheckItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"passed": self.passed, "items": [i.to_json() for i in self.items]}


def _first_residual(residuals) -> str:
    for label, poly in residuals:
        if not poly.is_zero():
            return f"{label}: residual {poly!r}"
    return ""


@dataclass(frozen=True)
class CarnotGroupSpec:
    """Candidate global lift of a homogeneous system to a Carnot group.

    The group law is given by N polynomials in 2N variables: variables
    0..N-1 are the first factor, N..2N-1 the second.  The fiber
    dilations use the exponents tau (nondecreasing, all >= 1); the full
    dilation acts with exponents sigma + tau.
    """

    base: VectorFieldSystem
    N: int
    tau: tuple[int, ...]
    law: tuple[Poly, ...]
    lifted_fields: tuple[VectorField, ...]
    name: str = "lift"

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(int(t) for t in self.tau))
        object.__setattr__(self, "law", tuple(self.law))
        object.__setattr__(self, "lifted_fields", tuple(self.lifted_fields))
        if self.N != self.base.n + len(self.tau):
            raise ValueError("N must equal base dimension plus len(tau)")
        if any(t < 1 for t in self.tau):
            raise ValueError("tau exponents must be >= 1")
        if any(a > b for a, b in zip(self.tau, self.tau[1:])):
            raise ValueError("tau exponents must be nondecreasing")
        if len(self.law) != self.N:
            raise ValueError("the group law needs one polynomial per coordinate")
        for p in self.law:
            if p.n_vars != 2 * self.N:
                raise ValueError("group law polynomials live in 2N variables")
        if len(self.lifted_fields) != self.base.m:
            raise ValueError("need one lifted field per base field")
        for f in self.lifted_fields:
            if f.n_vars != self.N:
                raise ValueError("lifted fields live on R^N")
        bad = _identity_residuals(self.law, self.N)
        if bad:
            raise ValueError(f"0 is not the group identity: {bad}")

    @property
    def s(self) -> int:
        return self.N - self.base.n

    @property
    def weights(self) -> tuple[int, ...]:
        return self.base.sigma + self.tau

    @property
    def Q(self) -> int:
        """Homogeneous dimension of the lifted space."""
        return sum(self.weights)


def _identity_residuals(law: Sequence[Poly], N: int) -> str:
    vars_first = [Poly.variable(j, N) for j in range(N)]
    zero = [Poly.zero(N)] * N
    for i, comp in enumerate(law):
        left = comp.substitute(zero + vars_first)
        right = comp.substitute(vars_first + zero)
        target = vars_first[i]
        if left != target:
            return f"0 * y != y at coordinate {i + 1}"
        if right != target:
            return f"y * 0 != y at coordinate {i + 1}"
    return ""


def group_inverse(spec: CarnotGroupSpec) -> list[Poly]:
    """Polynomial inverse solved coordinate-by-coordinate in increasing
    dilation weight; relies on the graded triangular structure."""
    N = spec.N
    weights = spec.weights
    y_vars = [Poly.variable(j, N) for j in range(N)]
    inverse: list[Poly | None] = [None] * N
    order = sorted(range(N), key=lambda i: (weights[i], i))
    for i in order:
        mixed = spec.law[i] - Poly.variable(i, 2 * N) - Poly.variable(N + i, 2 * N)
        needed = {j - N for j in mixed.variables_used() if j >= N}
        if any(inverse[j] is None for j in needed):
            raise ValueError(
                f"coordinate {i + 1}: mixed terms reference unsolved inverse "
                "components; the law is not weight-triangular"
            )
        args = y_vars + [
            inverse[j] if inverse[j] is not None else Poly.zero(N) for j in range(N)
        ]
        inverse[i] = -y_vars[i] - mixed.substitute(args)
    return [p for p in inverse]  # type: ignore[misc]


def verify_group(spec: CarnotGroupSpec) -> Certificate:
    """Group axioms and the dilation-automorphism identity, all exact."""
    N = spec.N
    items = []

    detail = _identity_residuals(spec.law, N)
    items.append(CheckItem("identity", not detail, detail))

    # associativity in 3N variables (a, b, c)
    a_vars = [Poly.variable(j, 3 * N) for j in range(N)]
    c_vars = [Poly.variable(2 * N + j, 3 * N) for j in range(N)]
    law_ab = [p.embed(3 * N) for p in spec.law]
    law_bc = [
        p.substitute(
            [Poly.variable(N + j, 3 * N) for j in range(N)]
            + [Poly.variable(2 * N + j, 3 * N) for j in range(N)]
        )
        for p in spec.law
    ]
    residuals = []
    for i, comp in enumerate(spec.law):
        left = comp.substitute(law_ab + c_vars)
        right = comp.substitute(a_vars + law_bc)
        residuals.append((f"coordinate {i + 1}", left - right))
    detail = _first_residual(residuals)
    items.append(CheckItem("associativity", not detail, detail))

    # two-sided polynomial inverse
    try:
        inv = group_inverse(spec)
        y_vars = [Poly.variable(j, N) for j in range(N)]
        residuals = []
        for i, comp in enumerate(spec.law):
            right_inv = comp.substitute(y_vars + inv)
            left_inv = comp.substitute(inv + y_vars)
            residuals.append((f"y * inv(y), coordinate {i + 1}", right_inv))
            residuals.append((f"inv(y) * y, coordinate {i + 1}", left_inv))
        detail = _first_residual(residuals)
        items.append(CheckItem("inverse", not detail, detail))
    except ValueError as exc:
        items.append(CheckItem("inverse", False, str(exc)))

    # dilation automorphism, identity in (lambda, y, y'); lambda is var 0
    weights = spec.weights
    big = 2 * N + 1
    scaled = [
        Poly.monomial((weights[j] if k == 0 else 0 for k in range(big)), 1, big)
        * Poly.variable(1 + j, big)
        for j in range(N)
    ] + [
        Poly.monomial((weights[j] if k == 0 else 0 for k in range(big)), 1, big)
        * Poly.variable(1 + N + j, big)
        for j in range(N)
    ]
    residuals = []
    for i, comp in enumerate(spec.law):
        lhs = comp.embed(big, offset=1) * Poly.monomial(
            (weights[i],) + (0,) * (big - 1), 1, big
        )
        rhs = comp.substitute(scaled)
        residuals.append((f"coordinate {i + 1}", lhs - rhs))
    detail = _first_residual(residuals)
    items.append(CheckItem("dilation_automorphism", not detail, detail))

    return Certificate(all(i.passed for i in items), tuple(items))


def verify_lift(spec: CarnotGroupSpec) -> Certificate:
    """The five lifting checks: base projection, fiber-only remainder,
    degree-1 homogeneity, left-invariance, and Lie generation at 0."""
    N, n = spec.N, spec.base.n
    items = []

    # (a) the first n coefficients coincide with the base fields
    residuals = []
    for i, (lifted, base) in enumerate(zip(spec.lifted_fields, spec.base.fields)):
        for k in range(n):
            residuals.append(
                (
                    f"field {i + 1}, coordinate {k + 1}",
                    lifted.coeffs[k] - base.coeffs[k].embed(N),
                )
            )
    detail = _first_residual(residuals)
    items.append(CheckItem("base_projection", not detail, detail))

    # (b) the remainder acts only on the fiber coordinates
    residuals = []
    for i, (lifted, base) in enumerate(zip(spec.lifted_fields, spec.base.fields)):
        remainder = [
            lifted.coeffs[k] - base.coeffs[k].embed(N) for k in range(n)
        ]
        for k, comp in enumerate(remainder):
            residuals.append((f"remainder {i + 1}, base coordinate {k + 1}", comp))
    detail = _first_residual(residuals)
    items.append(CheckItem("fiber_only_remainder", not detail, detail))

    # (c) degree-1 homogeneity of the lifted fields
    weights = spec.weights
    bad = ""
    for i, lifted in enumerate(spec.lifted_fields):
        for k, comp in enumerate(lifted.coeffs):
            degrees = comp.weighted_degrees(weights)
            if degrees - {weights[k] - 1}:
                bad = (
                    f"field {i + 1}, coordinate {k + 1}: weighted degrees "
                    f"{sorted(degrees)} != {{{weights[k] - 1}}}"
                )
                break
        if bad:
            break
    items.append(CheckItem("homogeneous_degree_1", not bad, bad))

    # (d) left-invariance: d(L_a) X(y) = X(a * y) in (a, y)
    a_vars = [Poly.variable(j, 2 * N) for j in range(N)]
    y_embedded = [Poly.variable(N + j, 2 * N) for j in range(N)]
    law_ay = list(spec.law)  # already polynomials in (a, y)
    residuals = []
    for i, lifted in enumerate(spec.lifted_fields):
        coeffs_at_y = [c.embed(2 * N, offset=N) for c in lifted.coeffs]
        for k, law_k in enumerate(spec.law):
            lhs = Poly.zero(2 * N)
            for j in range(N):
                dkj = law_k.partial(N + j)
                if not dkj.is_zero() and not coeffs_at_y[j].is_zero():
                    lhs = lhs + dkj * coeffs_at_y[j]
            rhs = lifted.coeffs[k].substitute(law_ay)
            residuals.append((f"field {i + 1}, coordinate {k + 1}", lhs - rhs))
    detail = _first_residual(residuals)
    items.append(CheckItem("left_invariance", not detail, detail))

    # (e) Lie generation at the origin, bracket depth capped by the
    # largest dilation exponent on either factor
    depth = max(max(spec.base.sigma), max(spec.tau) if spec.tau else 1)
    cert = rank_certificate(spec.lifted_fields, N, depth)
    detail = (
        ""
        if cert.passed
        else f"rank {cert.rank} < {N} at 0 with bracket depth <= {depth} "
        "(inconclusive beyond this depth)"
    )
    items.append(CheckItem("lie_generation", cert.passed, detail))

    return Certificate(all(i.passed for i in items), tuple(items))


# ---------------------------------------------------------------------------
# projected norms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SandwichReport:
    radius: float
    p: float
    lower_constant: float
    upper_constant: float
    lower_norm: float
    lifted_norm: float
    upper_norm: float
    quadrature_error: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "p": self.p,
            "lower_constant": self.lower_constant,
            "upper_constant": self.upper_constant,
            "lower_norm": self.lower_norm,
            "lifted_norm": self.lifted_norm,
            "upper_norm": self.upper_norm,
            "quadrature_error": self.quadrature_error,
            "passed": self.passed,
        }


def _lp_on_ball(u: ScalarField, exponents, r, p, config, fiber_half=0, prefactor=1.0):
    lo_rule, hi_rule = ball_rule_pair(exponents, r, config, fiber_half=fiber_half)
    sums = []
    for pts, weights in (lo_rule, hi_rule):
        total = 0.0
        for row, w in zip(pts, weights):
            if w:
                total += float(w) * abs(float(u.eval(tuple(map(float, row))))) ** p
        sums.append(total * prefactor)
    lo, hi = (s ** (1.0 / p) for s in sums)
    return hi, abs(hi - lo)


def projected_norm_sandwich(
    spec: CarnotGroupSpec,
    u: ScalarField,
    r: float,
    p: float,
    config: QuadratureConfig | None = None,
) -> SandwichReport:
    """Compare the Lp norm of the trivially lifted function on the lifted
    ball against the base-ball norms scaled by the fiber-ball measures.

    The lifted integral is reduced exactly to a base integral: the fiber
    slice over a base point x is a Euclidean ellipsoid whose measure is
    meas(fiber unit ball) * r^{sum tau} * (1 - ||x||-profile)^{s/2}.
    """
    if not 1.0 <= p < math.inf:
        raise ValueError("p must lie in [1, infinity)")
    if config is None:
        config = QuadratureConfig()
    sigma = spec.base.sigma
    s = spec.s
    tau_sum = sum(spec.tau)

    lower_norm, err_lower = _lp_on_ball(u, sigma, r / 2.0, p, config)
    upper_norm, err_upper = _lp_on_ball(u, sigma, r, p, config)
    fiber_prefactor = unit_ball_volume(s) * float(r) ** tau_sum if s else 1.0
    lifted_norm, err_lifted = _lp_on_ball(
        u, sigma, r, p, config, fiber_half=s, prefactor=fiber_prefactor
    )

    c1 = (unit_ball_volume(s) * (r / 2.0) ** tau_sum) ** (1.0 / p) if s else 1.0
    c2 = (unit_ball_volume(s) * float(r) ** tau_sum) ** (1.0 / p) if s else 1.0

    error = err_lower + err_upper + err_lifted
    slack = error + 1e-12 * (1.0 + lifted_norm)
    passed = (
        c1 * lower_norm <= lifted_norm + slack
        and lifted_norm <= c2 * upper_norm + slack
    )
    return SandwichReport(
        radius=float(r),
        p=float(p),
        lower_constant=c1,
        upper_constant=c2,
        lower_norm=lower_norm,
        lifted_norm=lifted_norm,
        upper_norm=upper_norm,
        quadrature_error=error,
        passed=passed,
    )


def lift_scalar(spec: CarnotGroupSpec, u: ScalarField) -> ScalarField:
    """The trivial lift: the same function read on R^N, ignoring the fiber."""
    if u.n_vars != spec.base.n:
        raise ValueError("dimension mismatch")
    return u.embed(spec.N)
