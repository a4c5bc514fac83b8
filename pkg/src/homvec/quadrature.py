"""Quadrature rules over anisotropic balls.

The anisotropic ball of radius r is the image of the Euclidean unit ball
under the diagonal map y -> (r^{w_1} y_1, ..., r^{w_d} y_d), whose
Jacobian is the constant r^{sum w}.  The default "transform" scheme
integrates over the unit ball in polar / spherical coordinates
(Gauss-Legendre radially, trapezoid in the periodic angle), which keeps
smooth integrands smooth; an optional radial weight (1 - |y|^2)^{h/2}
supports fiber-integrated lifted-ball integrals, with a sin substitution
when h is odd so the boundary stays regular.

Alternative schemes: "masked" (tensor Gauss-Legendre over the bounding
box with an indicator), kept for comparison, and "mc" (seeded uniform
rejection sampling) for dimensions where product rules are impractical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class QuadratureConfig:
    scheme: str = "transform"
    resolution: int = 16
    angular_factor: int = 4
    seed: int = 0
    tolerance: float = 1e-4
    mc_samples: int = 100000

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "resolution": self.resolution,
            "angular_factor": self.angular_factor,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "mc_samples": self.mc_samples,
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuadratureConfig":
        return cls(
            scheme=data.get("scheme", "transform"),
            resolution=int(data.get("resolution", 16)),
            angular_factor=int(data.get("angular_factor", 4)),
            seed=int(data.get("seed", 0)),
            tolerance=float(data.get("tolerance", 1e-4)),
            mc_samples=int(data.get("mc_samples", 100000)),
        )


def _gauss(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def _radial_rule(n_radial: int, dim: int, fiber_half: int):
    """Nodes/weights for integral_0^1 g(rho) rho^{dim-1} (1-rho^2)^{h/2} drho."""
    if fiber_half % 2 == 0:
        rho, w = _gauss(n_radial, 0.0, 1.0)
        weight = w * rho ** (dim - 1) * (1.0 - rho ** 2) ** (fiber_half // 2)
    else:
        psi, w = _gauss(n_radial, 0.0, 0.5 * math.pi)
        rho = np.sin(psi)
        weight = w * rho ** (dim - 1) * np.cos(psi) ** (fiber_half + 1)
    return rho, weight


def unit_ball_rule(dim: int, n_radial: int, n_angular: int, fiber_half: int = 0):
    """Rule for integral over the Euclidean unit ball in R^dim of
    f(y) (1-|y|^2)^{fiber_half/2} dy; returns (points, weights)."""
    if dim == 1:
        if fiber_half % 2 == 0:
            y, w = _gauss(n_radial, -1.0, 1.0)
            weights = w * (1.0 - y ** 2) ** (fiber_half // 2)
        else:
            psi, w = _gauss(n_radial, -0.5 * math.pi, 0.5 * math.pi)
            y = np.sin(psi)
            weights = w * np.cos(psi) ** (fiber_half + 1)
        return y[:, None], weights
    if dim == 2:
        rho, w_r = _radial_rule(n_radial, 2, fiber_half)
        theta = 2.0 * math.pi * np.arange(n_angular) / n_angular
        w_t = 2.0 * math.pi / n_angular
        pts = np.empty((n_radial * n_angular, 2))
        pts[:, 0] = np.outer(rho, np.cos(theta)).ravel()
        pts[:, 1] = np.outer(rho, np.sin(theta)).ravel()
        weights = np.repeat(w_r, n_angular) * w_t
        return pts, weights
    if dim == 3:
        rho, w_r = _radial_rule(n_radial, 3, fiber_half)
        c, w_c = _gauss(n_radial, -1.0, 1.0)
        theta = 2.0 * math.pi * np.arange(n_angular) / n_angular
        w_t = 2.0 * math.pi / n_angular
        s = np.sqrt(1.0 - c ** 2)
        pts = []
        weights = []
        for i in range(n_radial):
            for j in range(n_radial):
                x = rho[i] * s[j] * np.cos(theta)
                y = rho[i] * s[j] * np.sin(theta)
                z = np.full(n_angular, rho[i] * c[j])
                pts.append(np.column_stack([x, y, z]))
                weights.append(np.full(n_angular, w_r[i] * w_c[j] * w_t))
        return np.concatenate(pts), np.concatenate(weights)
    raise ValueError("transform rules cover dimensions 1-3; use the mc scheme")


def anisotropic_ball_rule(
    exponents: Sequence[int],
    r: float,
    n_radial: int,
    n_angular: int,
    fiber_half: int = 0,
):
    """Rule over the anisotropic ball of radius r, including the
    Jacobian r^{sum w}; the optional fiber weight is expressed in the
    unit-ball radius (|y| = ||x|| / r pointwise on the dilation ray)."""
    dim = len(exponents)
    pts, weights = unit_ball_rule(dim, n_radial, n_angular, fiber_half)
    scale = np.array([float(r) ** w for w in exponents])
    return pts * scale, weights * float(r) ** sum(exponents)


def masked_box_rule(exponents: Sequence[int], r: float, per_axis: int):
    """Tensor Gauss-Legendre on the bounding box, zero weight outside."""
    dim = len(exponents)
    axes, ws = [], []
    for w_exp in exponents:
        half = float(r) ** w_exp
        x, w = _gauss(per_axis, -half, half)
        axes.append(x)
        ws.append(w)
    grids = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([g.ravel() for g in grids])
    weight_grids = np.meshgrid(*ws, indexing="ij")
    weights = np.ones(pts.shape[0])
    for g in weight_grids:
        weights = weights * g.ravel()
    wvec = np.array(exponents, dtype=float)
    inside = (pts ** 2 / float(r) ** (2 * wvec)).sum(axis=1) < 1.0
    weights = np.where(inside, weights, 0.0)
    return pts, weights


def mc_ball_rule(exponents: Sequence[int], r: float, n_samples: int, seed: int):
    """Uniform samples in the ball with equal weights summing to its measure."""
    from .geometry import _sample_ball, ball_measure

    rng = np.random.default_rng(seed)
    pts = _sample_ball(rng, tuple(exponents), r, n_samples)
    measure = ball_measure(exponents, r)
    weights = np.full(n_samples, measure / n_samples)
    return pts, weights


def ball_rule_pair(
    exponents: Sequence[int],
    r: float,
    config: QuadratureConfig,
    fiber_half: int = 0,
):
    """(coarse, fine) rules for the configured scheme; the difference of
    the two resulting integrals serves as the error estimate."""
    if config.scheme == "transform":
        fac = config.angular_factor
        lo = anisotropic_ball_rule(
            exponents, r, config.resolution, fac * config.resolution, fiber_half
        )
        hi = anisotropic_ball_rule(
            exponents, r, 2 * config.resolution, 2 * fac * config.resolution, fiber_half
        )
        return lo, hi
    if config.scheme == "masked":
        if fiber_half:
            raise ValueError("the masked scheme has no fiber weight support")
        return (
            masked_box_rule(exponents, r, 2 * config.resolution),
            masked_box_rule(exponents, r, 4 * config.resolution),
        )
    if config.scheme == "mc":
        if fiber_half:
            raise ValueError("the mc scheme has no fiber weight support")
        half = config.mc_samples // 2
        return (
            mc_ball_rule(exponents, r, half, config.seed),
            mc_ball_rule(exponents, r, config.mc_samples, config.seed + 1),
        )
    raise ValueError(f"unknown quadrature scheme {config.scheme!r}")


def integrate_rule(points, weights, func) -> float:
    """Deterministic ordered accumulation of sum_i w_i f(x_i)."""
    total = 0.0
    for row, w in zip(points, weights):
        if w:
            total += w * func(tuple(row))
    return float(total)
