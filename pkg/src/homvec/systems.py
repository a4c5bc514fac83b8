"""Built-in model systems, their Carnot lifts, and JSON (de)serialization.

System files::

    { "schema": 1, "name": ..., "n": ..., "m": ..., "sigma": [...],
      "fields": [ [poly, ...], ... ] }

where each poly is a sparse monomial list [[exponents], num, den] and
each field lists one poly per coordinate.  Lift files::

    { "schema": 1, "name": ..., "base_system": name-or-path, "N": ...,
      "tau": [...], "law": [poly, ...], "lifted_fields": [[poly, ...], ...] }

with law polynomials in 2N variables (first factor then second factor).
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .fields import VectorField, VectorFieldSystem
from .lifting import CarnotGroupSpec
from .poly import Poly

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# factories for the model systems
# ---------------------------------------------------------------------------


def grushin_system() -> VectorFieldSystem:
    """d/dx1 and x1 d/dx2 with exponents (1, 2)."""
    return grushin_family(1)


def grushin_family(k: int) -> VectorFieldSystem:
    """d/dx1 and x1^k d/dx2 with exponents (1, k+1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x1 = Poly.variable(0, 2)
    f1 = VectorField([Poly.constant(1, 2), Poly.zero(2)])
    f2 = VectorField([Poly.zero(2), x1 ** k])
    name = "grushin" if k == 1 else f"grushin_k{k}"
    return VectorFieldSystem(n=2, m=2, sigma=(1, k + 1), fields=(f1, f2), name=name)


def chain_system(n: int) -> VectorFieldSystem:
    """d/dx1 and x1 d/dx2 + ... + x_{n-1} d/dx_n with exponents (1, ..., n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    f1 = VectorField.from_components(n, {0: Poly.constant(1, n)})
    f2 = VectorField.from_components(
        n, {k: Poly.variable(k - 1, n) for k in range(1, n)}
    )
    return VectorFieldSystem(
        n=n, m=2, sigma=tuple(range(1, n + 1)), fields=(f1, f2), name=f"chain{n}"
    )


def grushin_lift() -> CarnotGroupSpec:
    """Lift of the k=1 system to R^3: law (x1+x1', x2+x2'+x1 xi1', xi1+xi1')."""
    base = grushin_system()
    N = 3
    y = [Poly.variable(j, 2 * N) for j in range(N)]
    yp = [Poly.variable(N + j, 2 * N) for j in range(N)]
    law = (y[0] + yp[0], y[1] + yp[1] + y[0] * yp[2], y[2] + yp[2])
    x1 = Poly.variable(0, N)
    lifted = (
        VectorField.from_components(N, {0: Poly.constant(1, N)}),
        VectorField.from_components(N, {1: x1, 2: Poly.constant(1, N)}),
    )
    return CarnotGroupSpec(
        base=base, N=N, tau=(1,), law=law, lifted_fields=lifted, name="grushin_lift"
    )


def grushin2_lift() -> CarnotGroupSpec:
    """Lift of the k=2 system to R^4 with fiber exponents (1, 2)."""
    base = grushin_family(2)
    N = 4
    y = [Poly.variable(j, 2 * N) for j in range(N)]
    yp = [Poly.variable(N + j, 2 * N) for j in range(N)]
    half = Fraction(1, 2)
    law = (
        y[0] + yp[0],
        y[1] + yp[1] + y[0] * (y[0] + yp[0]) * yp[2] + 2 * y[0] * yp[3],
        y[2] + yp[2],
        y[3] + yp[3] + half * (y[0] * yp[2] - yp[0] * y[2]),
    )
    x1 = Poly.variable(0, N)
    xi1 = Poly.variable(2, N)
    lifted = (
        VectorField.from_components(N, {0: Poly.constant(1, N), 3: xi1 * (-half)}),
        VectorField.from_components(
            N, {1: x1 ** 2, 2: Poly.constant(1, N), 3: x1 * half}
        ),
    )
    return CarnotGroupSpec(
        base=base, N=N, tau=(1, 2), law=law, lifted_fields=lifted, name="grushin2_lift"
    )


BUILTIN_SYSTEMS = {
    "grushin": grushin_system,
    "grushin_k": lambda: grushin_family(2),
    "grushin_k2": lambda: grushin_family(2),
    "grushin_k3": lambda: grushin_family(3),
    "chain": lambda: chain_system(4),
    "chain3": lambda: chain_system(3),
    "chain4": lambda: chain_system(4),
}

BUILTIN_LIFTS = {
    "grushin_lift": grushin_lift,
    "grushin2_lift": grushin2_lift,
}


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------


def system_to_json(sys: VectorFieldSystem) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "name": sys.name,
        "n": sys.n,
        "m": sys.m,
        "sigma": list(sys.sigma),
        "fields": [[c.to_json() for c in f.coeffs] for f in sys.fields],
    }


def system_from_json(data: dict) -> VectorFieldSystem:
    try:
        n = int(data["n"])
        m = int(data["m"])
        sigma = tuple(int(s) for s in data["sigma"])
        fields = tuple(
            VectorField([Poly.from_json(n, comp) for comp in field])
            for field in data["fields"]
        )
        name = str(data.get("name", "system"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed system spec: {exc}") from exc
    return VectorFieldSystem(n=n, m=m, sigma=sigma, fields=fields, name=name)


def lift_to_json(spec: CarnotGroupSpec) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "name": spec.name,
        "base_system": system_to_json(spec.base),
        "N": spec.N,
        "tau": list(spec.tau),
        "law": [p.to_json() for p in spec.law],
        "lifted_fields": [[c.to_json() for c in f.coeffs] for f in spec.lifted_fields],
    }


def lift_from_json(data: dict, base: VectorFieldSystem | None = None) -> CarnotGroupSpec:
    try:
        N = int(data["N"])
        tau = tuple(int(t) for t in data["tau"])
        law = tuple(Poly.from_json(2 * N, p) for p in data["law"])
        lifted = tuple(
            VectorField([Poly.from_json(N, comp) for comp in field])
            for field in data["lifted_fields"]
        )
        name = str(data.get("name", "lift"))
        if base is None:
            ref = data["base_system"]
            if isinstance(ref, dict):
                base = system_from_json(ref)
            else:
                base = load_system(str(ref))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed lift spec: {exc}") from exc
    return CarnotGroupSpec(
        base=base, N=N, tau=tau, law=law, lifted_fields=lifted, name=name
    )


def _fixture_text(filename: str) -> str:
    return (
        resources.files("homvec").joinpath("fixtures").joinpath(filename).read_text()
    )


def load_system(ref: str) -> VectorFieldSystem:
    """Resolve a system reference: builtin name, fixture file, or path."""
    if ref in BUILTIN_SYSTEMS:
        return BUILTIN_SYSTEMS[ref]()
    path = Path(ref)
    if path.exists():
        return system_from_json(json.loads(path.read_text()))
    try:
        return system_from_json(json.loads(_fixture_text(f"{ref}.json")))
    except FileNotFoundError:
        raise ValueError(f"unknown system {ref!r}") from None


def load_lift(ref: str) -> CarnotGroupSpec:
    if ref in BUILTIN_LIFTS:
        return BUILTIN_LIFTS[ref]()
    path = Path(ref)
    if path.exists():
        return lift_from_json(json.loads(path.read_text()))
    try:
        return lift_from_json(json.loads(_fixture_text(f"{ref}.json")))
    except FileNotFoundError:
        raise ValueError(f"unknown lift {ref!r}") from None
