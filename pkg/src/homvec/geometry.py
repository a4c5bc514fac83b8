"""Homogeneous norms, anisotropic balls, inclusions and measures.

The dilation delta_lambda(x) = (lambda^w_1 x_1, ..., lambda^w_d x_d)
induces a homogeneous norm: ||0|| = 0 and, for x != 0, ||x|| = 1/t where
t is the unique positive solution of sum_i x_i^2 t^{2 w_i} = 1.  The
radius-r ball around the origin is the solid ellipsoid
sum_i x_i^2 / r^{2 w_i} < 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

BISECTION_WIDTH = 1e-14
RESIDUAL_TOL = 1e-12
MAX_NEWTON_STEPS = 5


def unit_ball_volume(dim: int) -> float:
    """Lebesgue measure of the Euclidean unit ball in R^dim."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def _residual(values, exponents, t: float) -> float:
    return sum(v * v * t ** (2 * w) for v, w in zip(values, exponents))


def norm_root(exponents: Sequence[int], values: Sequence[float]) -> float:
    """Unique t > 0 with sum v_i^2 t^{2 w_i} = 1, for values not all zero.

    Monotone bisection down to an interval of width 1e-14, then at most
    five Newton polish steps; stops early once the residual is below
    1e-12 in absolute value.
    """
    vals = [float(v) for v in values]
    norm2 = math.sqrt(sum(v * v for v in vals))
    if norm2 == 0.0:
        raise ValueError("norm_root undefined at the origin")
    w_min, w_max = min(exponents), max(exponents)
    lo = min(norm2 ** (-1.0 / w_min), norm2 ** (-1.0 / w_max))
    hi = max(norm2 ** (-1.0 / w_min), norm2 ** (-1.0 / w_max))
    # guard against rounding at the bracket ends
    while _residual(vals, exponents, lo) > 1.0 and lo > 0:
        lo *= 0.5
    while _residual(vals, exponents, hi) < 1.0:
        hi *= 2.0
    while hi - lo > BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _residual(vals, exponents, mid) < 1.0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(MAX_NEWTON_STEPS):
        res = _residual(vals, exponents, t) - 1.0
        if abs(res) <= RESIDUAL_TOL:
            break
        slope = sum(2 * w * v * v * t ** (2 * w - 1) for v, w in zip(vals, exponents))
        if slope == 0.0:
            break
        t -= res / slope
    return t


def hom_norm_value(exponents: Sequence[int], values: Sequence[float]) -> float:
    if all(v == 0 for v in values):
        return 0.0
    return 1.0 / norm_root(exponents, values)


@dataclass(frozen=True)
class HomNorm:
    """Homogeneous norm induced by coordinate dilations with the given
    integer exponents (which need not be sorted)."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if not self.exponents or any(w < 1 for w in self.exponents):
            raise ValueError("exponents must be positive integers")
        object.__setattr__(self, "exponents", tuple(int(w) for w in self.exponents))

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def __call__(self, x: Sequence[float]) -> float:
        if len(x) != self.dim:
            raise ValueError("point dimension mismatch")
        return hom_norm_value(self.exponents, x)

    def batch(self, points: np.ndarray) -> np.ndarray:
        """Vectorized norm of an (m, dim) array of points."""
        pts = np.asarray(points, dtype=float)
        sq = pts * pts
        nonzero = sq.sum(axis=1) > 0.0
        out = np.zeros(len(pts))
        if not nonzero.any():
            return out
        sq = sq[nonzero]
        w = np.array(self.exponents, dtype=float)
        eu = np.sqrt(sq.sum(axis=1))
        lo = np.minimum(eu ** (-1.0 / w.min()), eu ** (-1.0 / w.max()))
        hi = np.maximum(eu ** (-1.0 / w.min()), eu ** (-1.0 / w.max()))

        def residual(t):
            return (sq * t[:, None] ** (2.0 * w)).sum(axis=1) - 1.0

        lo = np.where(residual(lo) > 0.0, lo * 0.5, lo)
        hi = np.where(residual(hi) < 0.0, hi * 2.0, hi)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            below = residual(mid) < 0.0
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        t = 0.5 * (lo + hi)
        for _ in range(MAX_NEWTON_STEPS):
            res = residual(t)
            slope = (2.0 * w * sq * t[:, None] ** (2.0 * w - 1.0)).sum(axis=1)
            t = t - res / slope
        out[nonzero] = 1.0 / t
        return out

    def dilate(self, lam: float, x: Sequence[float]) -> tuple:
        return tuple(lam ** w * xi for w, xi in zip(self.exponents, x))


@dataclass(frozen=True)
class Ball:
    """Anisotropic ball of the given radius, centered at the origin."""

    norm: HomNorm
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dim(self) -> int:
        return self.norm.dim

    def contains(self, x: Sequence[float]) -> bool:
        return (
            sum(
                float(v) ** 2 / self.radius ** (2 * w)
                for v, w in zip(x, self.norm.exponents)
            )
            < 1.0
        )

    def measure(self) -> float:
        return ball_measure(self.norm.exponents, self.radius)


def ball_measure(exponents: Sequence[int], r: float) -> float:
    """Lebesgue measure of the anisotropic ball: r^q times the Euclidean
    unit-ball volume, with q the sum of the exponents."""
    if r <= 0:
        raise ValueError("radius must be positive")
    q = sum(exponents)
    return r ** q * unit_ball_volume(len(exponents))


def _membership(pts: np.ndarray, exponents: Sequence[int], r: float) -> np.ndarray:
    w = np.array(exponents, dtype=float)
    return (pts ** 2 / r ** (2.0 * w)).sum(axis=1) < 1.0


def _sample_ball(rng, exponents, r, count) -> np.ndarray:
    """Uniform samples from the anisotropic ball via box rejection."""
    dim = len(exponents)
    w = np.array(exponents, dtype=float)
    half = r ** w
    out = np.empty((0, dim))
    while len(out) < count:
        batch = rng.uniform(-half, half, size=(max(count, 1024), dim))
        keep = batch[_membership(batch, exponents, r)]
        out = np.concatenate([out, keep])
    return out[:count]


@dataclass(frozen=True)
class InclusionReport:
    radius: float
    sigma: tuple[int, ...]
    tau: tuple[int, ...]
    samples: int
    seed: int
    product_violations: int
    half_radius_violations: int

    @property
    def passed(self) -> bool:
        return self.product_violations == 0 and self.half_radius_violations == 0

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "sigma": list(self.sigma),
            "tau": list(self.tau),
            "samples": self.samples,
            "seed": self.seed,
            "product_violations": self.product_violations,
            "half_radius_violations": self.half_radius_violations,
            "passed": self.passed,
        }


def ball_inclusions_check(
    r: float,
    sigma: Sequence[int],
    tau: Sequence[int],
    samples: int,
    seed: int = 0,
) -> InclusionReport:
    """Sampled check of the two product inclusions for lifted balls.

    Every point of the lifted ball of radius r must lie in the product of
    the base and fiber balls of radius r, and every point of the product
    of the half-radius balls must lie in the lifted ball of radius r.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    sigma = tuple(int(s) for s in sigma)
    tau = tuple(int(t) for t in tau)
    combined = sigma + tau
    n = len(sigma)
    rng = np.random.default_rng(seed)

    lifted = _sample_ball(rng, combined, r, samples)
    in_base = _membership(lifted[:, :n], sigma, r)
    in_fiber = _membership(lifted[:, n:], tau, r)
    product_violations = int((~(in_base & in_fiber)).sum())

    base_half = _sample_ball(rng, sigma, r / 2.0, samples)
    fiber_half = _sample_ball(rng, tau, r / 2.0, samples)
    paired = np.concatenate([base_half, fiber_half], axis=1)
    half_radius_violations = int((~_membership(paired, combined, r)).sum())

    return InclusionReport(
        radius=float(r),
        sigma=sigma,
        tau=tau,
        samples=samples,
        seed=seed,
        product_violations=product_violations,
        half_radius_violations=half_radius_violations,
    )
