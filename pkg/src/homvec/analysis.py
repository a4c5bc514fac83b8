"""Cutoffs, anisotropic Sobolev norms, and empirical-constant harnesses.

The cutoff of radii (r1, r2) is chi applied to an affine rescaling of the
homogeneous norm: identically 1 on the inner ball, identically 0 outside
the outer ball, smooth everywhere.  Lp norms of iterated derivatives
X_I u are computed by quadrature over anisotropic balls, with jets shared
across all requested words at each node.

The harnesses estimate the best constants that make the interpolation
inequality (first-order norms against eps * second-order + zero-order /
eps), its ball-local scaled variant, the Phi-functional variant, and the
a-priori estimates hold over a finite family of smooth compactly
supported test functions.  The reported constants are empirical lower
bounds for the universal constants: a finite family can never certify a
universal inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .fields import VectorFieldSystem, Word, all_words, apply_operator, word_values
from .geometry import Ball, HomNorm
from .poly import Poly
from .quadrature import QuadratureConfig, ball_rule_pair
from .scalarfield import ScalarField, chi

DEFAULT_SIGMA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))
DEFAULT_EPS_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))
DEFAULT_R_GRID = (1.0, 2.0)


# ---------------------------------------------------------------------------
# cutoffs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffSpec:
    r1: float
    r2: float
    exponents: tuple[int, ...]
    phi: ScalarField

    @property
    def profile(self) -> Callable[[float], float]:
        return chi


def make_cutoff(sigma: Sequence[int], r1, r2) -> CutoffSpec:
    """Smooth cutoff: 1 on the inner ball, 0 outside the outer ball.

    phi(x) = chi( ||x|| / (2 (r2-r1)) - (r1+r2) / (4 (r2-r1)) ), so the
    profile argument crosses -1/4 at ||x|| = r1 and +1/4 at ||x|| = r2.
    """
    r1f, r2f = Fraction(r1), Fraction(r2)
    if not 0 < r1f < r2f:
        raise ValueError("cutoff radii must satisfy 0 < r1 < r2")
    gap = r2f - r1f
    scale = Fraction(1, 2) / gap
    shift = -(r1f + r2f) / (4 * gap)
    norm = ScalarField.norm(tuple(int(s) for s in sigma))
    phi = (norm * scale + shift).chi_of()
    return CutoffSpec(
        r1=float(r1f), r2=float(r2f), exponents=tuple(int(s) for s in sigma), phi=phi
    )


@dataclass(frozen=True)
class CutoffBoundsReport:
    order: int
    r1: float
    r2: float
    supremum: float
    normalized: float  # supremum * (r2 - r1)^order
    samples: int
    seed: int

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "r1": self.r1,
            "r2": self.r2,
            "supremum": self.supremum,
            "normalized": self.normalized,
            "samples": self.samples,
            "seed": self.seed,
        }


def cutoff_derivative_bounds(
    cutoff: CutoffSpec,
    sys: VectorFieldSystem,
    order: int,
    samples: int = 2000,
    seed: int = 0,
) -> CutoffBoundsReport:
    """Sampled sup of sum_{|I|=order} |X_I phi|, and the same scaled by
    (r2-r1)^order, which stays bounded uniformly over radius pairs."""
    if order < 0 or order > 3:
        raise ValueError("derivative order must be in 0..3")
    rng = np.random.default_rng(seed)
    n = sys.n
    rho = rng.uniform(0.0, cutoff.r2 * 1.05, size=samples)
    direction = rng.normal(size=(samples, n))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    words = all_words(sys.m, order) if order else []
    best = 0.0
    for i in range(samples):
        point = tuple(
            rho[i] ** w * direction[i, k] for k, w in enumerate(sys.sigma)
        )
        if order == 0:
            value = abs(float(cutoff.phi.eval(point)))
        else:
            vals = word_values(sys, cutoff.phi, point, words)
            value = sum(abs(float(v)) for v in vals.values())
        if value > best:
            best = value
    return CutoffBoundsReport(
        order=order,
        r1=cutoff.r1,
        r2=cutoff.r2,
        supremum=best,
        normalized=best * (cutoff.r2 - cutoff.r1) ** order,
        samples=samples,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Lp norms of iterated derivatives by quadrature
# ---------------------------------------------------------------------------


def _norms_from_sums(lo: float, hi: float, p: float) -> tuple[float, float]:
    lo_n, hi_n = lo ** (1.0 / p), hi ** (1.0 / p)
    return hi_n, abs(hi_n - lo_n)


def family_word_norms(
    sys: VectorFieldSystem,
    members: Sequence[ScalarField],
    radius: float,
    words: Sequence[Word],
    p: float,
    config: QuadratureConfig,
    laplace_words: Sequence[Word] = (),
) -> list[dict]:
    """Lp norms over the ball of the given radius of X_w u for each
    member u and each word w, plus (optionally) of X_I (L u) where
    L = sum_j X_j^2; jets are shared across members at each node.

    Returns one dict per member: {("w", word): (norm, err),
    ("L", word): (norm, err)}.
    """
    words = [tuple(w) for w in words]
    laplace_words = [tuple(w) for w in laplace_words]
    needed = set(words)
    for base in laplace_words:
        for j in range(1, sys.m + 1):
            needed.add(base + (j, j))
    needed = sorted(needed, key=lambda w: (len(w), w))
    lo_rule, hi_rule = ball_rule_pair(sys.sigma, radius, config)
    sums = [
        {
            **{("w", w): [0.0, 0.0] for w in words},
            **{("L", w): [0.0, 0.0] for w in laplace_words},
        }
        for _ in members
    ]
    for level, (pts, weights) in enumerate((lo_rule, hi_rule)):
        for row, np_weight in zip(pts, weights):
            weight = float(np_weight)
            if not weight:
                continue
            point = tuple(map(float, row))
            memo: dict = {}
            for mi, u in enumerate(members):
                if needed:
                    vals = word_values(sys, u, point, needed, memo=memo)
                else:
                    vals = {}
                acc = sums[mi]
                for w in words:
                    acc[("w", w)][level] += weight * abs(float(vals[w])) ** p
                for base in laplace_words:
                    lap = sum(
                        float(vals[base + (j, j)]) for j in range(1, sys.m + 1)
                    )
                    acc[("L", base)][level] += weight * abs(lap) ** p
    out = []
    for acc in sums:
        out.append({key: _norms_from_sums(lo, hi, p) for key, (lo, hi) in acc.items()})
    return out


@dataclass(frozen=True)
class SobolevReport:
    p: float
    k: int
    per_word: dict
    per_order: tuple[float, ...]
    total: float
    max_error: float

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "k": self.k,
            "per_word": {
                ",".join(map(str, w)): v for w, (v, _) in sorted(self.per_word.items())
            },
            "per_order": list(self.per_order),
            "total": self.total,
            "max_error": self.max_error,
        }


def sobolev_norm(
    sys: VectorFieldSystem,
    u: ScalarField,
    domain: Ball,
    k: int,
    p: float,
    config: QuadratureConfig | None = None,
) -> SobolevReport:
    """Sobolev norm along the system: the Lp norm of u plus the Lp norms
    of every X_I u with 1 <= |I| <= k, aggregated per derivative order."""
    if k < 0 or k > 4:
        raise ValueError("k must be in 0..4")
    if tuple(domain.norm.exponents) != sys.sigma:
        raise ValueError("domain ball does not match the system dilations")
    if config is None:
        config = QuadratureConfig()
    words: list[Word] = [()]
    for length in range(1, k + 1):
        words.extend(all_words(sys.m, length))
    norms = family_word_norms(sys, [u], domain.radius, words, p, config)[0]
    per_word = {w: norms[("w", w)] for w in words}
    per_order = tuple(
        sum(v for w, (v, _) in per_word.items() if len(w) == i) for i in range(k + 1)
    )
    return SobolevReport(
        p=float(p),
        k=k,
        per_word=per_word,
        per_order=per_order,
        total=sum(per_order),
        max_error=max(e for _, e in per_word.values()),
    )


# ---------------------------------------------------------------------------
# Phi functionals
# ---------------------------------------------------------------------------


def _phi_config(config: QuadratureConfig) -> QuadratureConfig:
    from dataclasses import replace

    return replace(config, resolution=max(4, config.resolution // 2))


def phi_profile(
    sys: VectorFieldSystem,
    members: Sequence[ScalarField],
    R: float,
    p: float,
    orders: Sequence[int],
    sigma_grid: Sequence[float] = DEFAULT_SIGMA_GRID,
    config: QuadratureConfig | None = None,
) -> list[dict]:
    """For each member, the grid maximum over sigma of
    ((1-sigma) R)^k ||D^k u||_{Lp(B_{sigma R})} for each requested order k.

    A finite grid gives a lower bound for the supremum over sigma in (0,1).
    Returns per-member dicts with "phi" {k: value}, "errors" {k: err}.
    """
    if config is None:
        config = QuadratureConfig()
    config = _phi_config(config)
    orders = sorted(set(orders))
    if any(k < 0 or k > 2 for k in orders):
        raise ValueError("Phi orders must be in {0, 1, 2}")
    words: list[Word] = []
    for k in orders:
        words.extend(all_words(sys.m, k))
    out = [
        {"phi": {k: 0.0 for k in orders}, "errors": {k: 0.0 for k in orders}}
        for _ in members
    ]
    for sig in sigma_grid:
        if not 0.0 < sig < 1.0:
            raise ValueError("sigma grid values must lie in (0, 1)")
        norms = family_word_norms(sys, members, sig * R, words, p, config)
        factor = (1.0 - sig) * R
        for mi, member_norms in enumerate(norms):
            for k in orders:
                dk = sum(
                    v for (kind, w), (v, _) in member_norms.items() if len(w) == k
                )
                err = sum(
                    e for (kind, w), (_, e) in member_norms.items() if len(w) == k
                )
                term = factor ** k * dk
                if term > out[mi]["phi"][k]:
                    out[mi]["phi"][k] = term
                    out[mi]["errors"][k] = factor ** k * err
    return out


def phi_functional(
    sys: VectorFieldSystem,
    u: ScalarField,
    R: float,
    k: int,
    p: float,
    sigma_grid: Sequence[float] = DEFAULT_SIGMA_GRID,
    config: QuadratureConfig | None = None,
) -> float:
    return phi_profile(sys, [u], R, p, [k], sigma_grid, config)[0]["phi"][k]


# ---------------------------------------------------------------------------
# test-function families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    name: str
    field: ScalarField
    support_radius: float | None = None


def gaussian_field(n: int) -> ScalarField:
    minus_square = Poly.zero(n)
    for i in range(n):
        minus_square = minus_square - Poly.variable(i, n) ** 2
    return ScalarField.from_poly(minus_square).exp()


def default_family(sys: VectorFieldSystem, radii: Sequence[float] = (1, 2)) -> list[FamilyMember]:
    """Monomials of weighted degree <= 4 (total degree <= 2), times a
    Gaussian, times a cutoff supported in the ball of radius 2r."""
    from .poly import graded_exponents

    n = sys.n
    monomials = [
        exps
        for exps in graded_exponents(n, 2)
        if sum(s * e for s, e in zip(sys.sigma, exps)) <= 4
    ]
    members = []
    for r in radii:
        envelope = gaussian_field(n) * make_cutoff(sys.sigma, r, 2 * r).phi
        for exps in monomials:
            mono = Poly.monomial(exps, 1, n)
            name = "*".join(
                [f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(exps) if e]
            ) or "1"
            members.append(
                FamilyMember(
                    name=f"{name}*gauss*phi({r},{2 * r})",
                    field=ScalarField.from_poly(mono) * envelope,
                    support_radius=2.0 * r,
                )
            )
    return members


# ---------------------------------------------------------------------------
# inequality harnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    inequality: str
    p: float
    constants: dict
    rows: tuple[dict, ...]
    eps_grid: tuple[float, ...]
    R_grid: tuple[float, ...]
    passed: bool
    max_quadrature_error: float
    config: QuadratureConfig

    def to_json(self) -> dict:
        return {
            "inequality": self.inequality,
            "p": self.p,
            "constants": dict(sorted(self.constants.items())),
            "rows": list(self.rows),
            "eps_grid": list(self.eps_grid),
            "R_grid": list(self.R_grid),
            "passed": self.passed,
            "max_quadrature_error": self.max_quadrature_error,
            "quadrature": self.config.to_json(),
        }

    def rows_csv(self) -> str:
        headers = ["function", "form", "field_index", "eps", "R", "lhs", "second_order", "zero_order", "constant"]
        lines = [",".join(headers)]
        for row in self.rows:
            lines.append(",".join(str(row.get(h, "")) for h in headers))
        return "\n".join(lines) + "\n"


def _ratio(eps: float, lhs: float, second: float, zero: float) -> float:
    if zero <= 0.0:
        return 0.0
    return max(0.0, eps * (lhs - eps * second) / zero)


def _check_family(family: Sequence[FamilyMember], need_support: bool):
    if not family:
        raise ValueError("empty family")
    if need_support:
        for member in family:
            if member.support_radius is None:
                raise ValueError(
                    f"family member {member.name!r} has unbounded support"
                )


def interpolation_harness(
    sys: VectorFieldSystem,
    family: Sequence[FamilyMember],
    p: float,
    eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
    R_grid: Sequence[float] = DEFAULT_R_GRID,
    config: QuadratureConfig | None = None,
) -> InequalityReport:
    """Empirical constants for the interpolation inequality.

    Three forms are exercised: the global form ||X_i u|| <= eps
    ||X_i^2 u|| + (c/eps) ||u|| with norms over the support ball, the
    ball-local scaled form with left side on the quarter ball, and the
    Phi-functional form (restricted to eps <= 1).  The constant reported
    for each form is the smallest c making every tested instance true,
    i.e. the maximum of eps (lhs - eps * second) / zero over the family
    and the grids, clamped at zero.
    """
    _check_family(family, need_support=True)
    if config is None:
        config = QuadratureConfig()
    eps_grid = tuple(float(e) for e in eps_grid)
    if any(e <= 0 for e in eps_grid):
        raise ValueError("eps grid must be positive")
    R_grid = tuple(float(R) for R in R_grid)
    fields = [member.field for member in family]
    single_words: list[Word] = [()]
    single_words += [(i,) for i in range(1, sys.m + 1)]
    single_words += [(i, i) for i in range(1, sys.m + 1)]

    rows: list[dict] = []
    c_global = 0.0
    c_scaled = 0.0
    alpha = 0.0
    max_err = 0.0

    # global form, one quadrature pass per distinct support radius
    by_radius: dict[float, list[int]] = {}
    for idx, member in enumerate(family):
        by_radius.setdefault(float(member.support_radius), []).append(idx)
    support_norms: dict[int, dict] = {}
    for radius, indices in sorted(by_radius.items()):
        norms = family_word_norms(
            sys, [fields[i] for i in indices], radius, single_words, p, config
        )
        for pos, idx in enumerate(indices):
            support_norms[idx] = norms[pos]
    for idx, member in enumerate(family):
        norms = support_norms[idx]
        zero, e0 = norms[("w", ())]
        max_err = max(max_err, e0)
        for i in range(1, sys.m + 1):
            lhs, e1 = norms[("w", (i,))]
            second, e2 = norms[("w", (i, i))]
            max_err = max(max_err, e1, e2)
            for eps in eps_grid:
                c = _ratio(eps, lhs, second, zero)
                c_global = max(c_global, c)
                rows.append(
                    {
                        "function": member.name,
                        "form": "global",
                        "field_index": i,
                        "eps": eps,
                        "R": "",
                        "lhs": lhs,
                        "second_order": second,
                        "zero_order": zero,
                        "constant": c,
                    }
                )

    # scaled ball form: left side on the quarter ball
    for R in R_grid:
        quarter = family_word_norms(
            sys, fields, R / 4.0, [(i,) for i in range(1, sys.m + 1)], p, config
        )
        full = family_word_norms(
            sys, fields, R, [()] + [(i, i) for i in range(1, sys.m + 1)], p, config
        )
        for idx, member in enumerate(family):
            zero, e0 = full[idx][("w", ())]
            max_err = max(max_err, e0)
            for i in range(1, sys.m + 1):
                lhs, e1 = quarter[idx][("w", (i,))]
                second, e2 = full[idx][("w", (i, i))]
                max_err = max(max_err, e1, e2)
                for eps in eps_grid:
                    c = _ratio(eps, lhs, second, zero)
                    c_scaled = max(c_scaled, c)
                    rows.append(
                        {
                            "function": member.name,
                            "form": "scaled_ball",
                            "field_index": i,
                            "eps": eps,
                            "R": R,
                            "lhs": lhs,
                            "second_order": second,
                            "zero_order": zero,
                            "constant": c,
                        }
                    )

    # Phi form at the largest requested ball radius, eps restricted to (0, 1]
    R_phi = max(R_grid)
    profiles = phi_profile(sys, fields, R_phi, p, [0, 1, 2], config=config)
    for idx, member in enumerate(family):
        phi0 = profiles[idx]["phi"][0]
        phi1 = profiles[idx]["phi"][1]
        phi2 = profiles[idx]["phi"][2]
        max_err = max(max_err, *profiles[idx]["errors"].values())
        for eps in eps_grid:
            if eps > 1.0:
                continue
            a = _ratio(eps, phi1, phi2, phi0)
            alpha = max(alpha, a)
            rows.append(
                {
                    "function": member.name,
                    "form": "phi",
                    "field_index": "",
                    "eps": eps,
                    "R": R_phi,
                    "lhs": phi1,
                    "second_order": phi2,
                    "zero_order": phi0,
                    "constant": a,
                }
            )

    constants = {
        "c_global": c_global,
        "c_scaled_ball": c_scaled,
        "alpha_phi": alpha,
    }
    passed = all(math.isfinite(v) for v in constants.values())
    return InequalityReport(
        inequality="interpolation",
        p=float(p),
        constants=constants,
        rows=tuple(rows),
        eps_grid=eps_grid,
        R_grid=R_grid,
        passed=passed,
        max_quadrature_error=max_err,
        config=config,
    )


def apriori_harness(
    sys: VectorFieldSystem,
    family: Sequence[FamilyMember],
    p: float,
    k: int,
    config: QuadratureConfig | None = None,
) -> InequalityReport:
    """Empirical constants for the a-priori estimates.

    theta: the largest ||D^{i+2} u|| / ||D^i (L u)|| over the family and
    i = 0..k; lambda: the largest Sobolev-quotient
    ||u||_{k+2,p} / (||L u||_{k,p} + ||u||_p).  Norms are over each
    member's support ball, where they agree with the whole-space norms.
    """
    _check_family(family, need_support=True)
    if k < 0 or k > 2:
        raise ValueError("k must be in 0..2")
    if config is None:
        config = QuadratureConfig()
    words: list[Word] = [()]
    for length in range(1, k + 3):
        words.extend(all_words(sys.m, length))
    laplace_words: list[Word] = [()]
    for length in range(1, k + 1):
        laplace_words.extend(all_words(sys.m, length))

    rows: list[dict] = []
    theta = 0.0
    lam = 0.0
    max_err = 0.0
    by_radius: dict[float, list[int]] = {}
    for idx, member in enumerate(family):
        by_radius.setdefault(float(member.support_radius), []).append(idx)
    member_norms: dict[int, dict] = {}
    for radius, indices in sorted(by_radius.items()):
        norms = family_word_norms(
            sys,
            [family[i].field for i in indices],
            radius,
            words,
            p,
            config,
            laplace_words=laplace_words,
        )
        for pos, idx in enumerate(indices):
            member_norms[idx] = norms[pos]

    for idx, member in enumerate(family):
        norms = member_norms[idx]
        max_err = max(max_err, *(e for _, e in norms.values()))
        d_order = [
            sum(v for (kind, w), (v, _) in norms.items() if kind == "w" and len(w) == i)
            for i in range(k + 3)
        ]
        lap_order = [
            sum(v for (kind, w), (v, _) in norms.items() if kind == "L" and len(w) == i)
            for i in range(k + 1)
        ]
        for i in range(k + 1):
            lhs = d_order[i + 2]
            rhs = lap_order[i]
            ratio = math.inf if rhs == 0.0 and lhs > 0.0 else (lhs / rhs if rhs else 0.0)
            theta = max(theta, ratio)
            rows.append(
                {
                    "function": member.name,
                    "form": f"derivative_bound_i{i}",
                    "field_index": "",
                    "eps": "",
                    "R": "",
                    "lhs": lhs,
                    "second_order": "",
                    "zero_order": rhs,
                    "constant": ratio,
                }
            )
        sobolev_total = sum(d_order[: k + 3])
        lap_total = sum(lap_order)
        denom = lap_total + d_order[0]
        ratio = math.inf if denom == 0.0 and sobolev_total > 0.0 else (
            sobolev_total / denom if denom else 0.0
        )
        lam = max(lam, ratio)
        rows.append(
            {
                "function": member.name,
                "form": "sobolev_bound",
                "field_index": "",
                "eps": "",
                "R": "",
                "lhs": sobolev_total,
                "second_order": "",
                "zero_order": denom,
                "constant": ratio,
            }
        )

    constants = {"theta": theta, "lambda": lam}
    passed = all(math.isfinite(v) for v in constants.values())
    return InequalityReport(
        inequality="apriori",
        p=float(p),
        constants=constants,
        rows=tuple(rows),
        eps_grid=(),
        R_grid=(),
        passed=passed,
        max_quadrature_error=max_err,
        config=config,
    )


# ---------------------------------------------------------------------------
# pointwise identities
# ---------------------------------------------------------------------------


def leibniz_residuals(
    sys: VectorFieldSystem,
    phi: ScalarField,
    u: ScalarField,
    points: Sequence[Sequence[float]],
) -> list[float]:
    """Relative residuals of X_i^2(phi u) = u X_i^2 phi
    + 2 (X_i phi)(X_i u) + phi X_i^2 u at the given points."""
    product = phi * u
    out = []
    for point in points:
        point = tuple(point)
        for i in range(1, sys.m + 1):
            lhs = float(apply_operator(sys, (i, i), product, point))
            phi_vals = word_values(sys, phi, point, [(i,), (i, i)])
            u_vals = word_values(sys, u, point, [(i,), (i, i)])
            rhs = (
                float(u.eval(point)) * float(phi_vals[(i, i)])
                + 2.0 * float(phi_vals[(i,)]) * float(u_vals[(i,)])
                + float(phi.eval(point)) * float(u_vals[(i, i)])
            )
            scale = 1.0 + abs(lhs) + abs(rhs)
            out.append(abs(lhs - rhs) / scale)
    return out
