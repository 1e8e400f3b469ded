"""Spectral laws of the free graph algebra's edge generators.

For a non-loop edge with endpoint masses ``mu_alpha >= mu_beta`` put
``a = (mu_alpha / mu_beta) ** (1/4) >= 1``.  The two positive operators
``T_{e'}* T_{e'}`` (supported at beta) and ``T_{e''}* T_{e''}`` (supported at
alpha) have free Poisson laws on ``[(a - 1/a)**2, (a + 1/a)**2]``; the second
one carries an extra atom of mass ``mu_alpha (1 - a**-4)`` at zero.  A loop
generator is semicircular on ``[-2, 2]``.

Moments are exact rationals whenever ``a**2`` is rational.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Mapping

import numpy as np
from scipy import integrate

from .graph_core import WeightedUndirectedGraph, structure_set

FORWARD = "forward"
BACKWARD = "backward"


class QuadratureError(ArithmeticError):
    def __init__(self, estimate: float, error: float, tol: float):
        super().__init__(f"quadrature error estimate {error:.3g} above tolerance {tol:.3g} (value {estimate!r})")
        self.estimate = estimate
        self.error = error


class BranchError(ArithmeticError):
    """Neither square-root branch gives a Herglotz Cauchy transform; a bug."""


def _exact_sqrt(x):
    """Square root, kept rational when ``x`` is the square of a rational."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x >= 0:
            rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
            if rn * rn == x.numerator and rd * rd == x.denominator:
                return Fraction(rn, rd)
    return math.sqrt(x)


@dataclass(frozen=True)
class EdgeLawParams:
    """Edge law parameters, oriented so that ``a >= 1``.

    ``a2`` is ``a**2`` (rational where possible); ``mu_beta`` is the mass of
    the lighter endpoint.  ``flipped`` records that the caller's orientation
    had the lighter vertex as source.
    """

    a2: Real
    mu_beta: Real = 1
    flipped: bool = False

    def __post_init__(self):
        if not self.a2 > 0 or not self.mu_beta > 0:
            raise ValueError("a**2 and mu_beta must be positive")
        if self.a2 < 1:
            raise ValueError("parameters must be oriented with a >= 1; use from_masses")

    @classmethod
    def from_masses(cls, mu_source: Real, mu_target: Real) -> "EdgeLawParams":
        flipped = mu_source < mu_target
        mu_alpha, mu_beta = (mu_target, mu_source) if flipped else (mu_source, mu_target)
        ratio = Fraction(mu_alpha) / Fraction(mu_beta) if isinstance(mu_alpha, (int, Fraction)) and isinstance(mu_beta, (int, Fraction)) else mu_alpha / mu_beta
        return cls(_exact_sqrt(ratio), mu_beta, flipped)

    @property
    def a(self) -> float:
        return math.sqrt(self.a2)

    @property
    def mu_alpha(self) -> Real:
        return self.a2 * self.a2 * self.mu_beta

    @property
    def support(self) -> tuple[float, float]:
        s = float(self.a2) + 1 / float(self.a2)
        return (max(s - 2.0, 0.0), s + 2.0)


@dataclass(frozen=True)
class MomentSequence:
    forward: tuple
    backward: tuple


def moment_recursion(p: EdgeLawParams, n: int) -> MomentSequence:
    """Normalized moments P_0..P_n of both orientations by the coupled recursion.

    ``P_k(e')  = a**2  * sum_j P_j(e'') P_{k-j-1}(e')``
    ``P_k(e'') = a**-2 * sum_j P_j(e')  P_{k-j-1}(e'')``
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    a2 = p.a2
    inv = 1 / Fraction(a2) if isinstance(a2, (int, Fraction)) else 1 / a2
    one = Fraction(1) if isinstance(a2, (int, Fraction)) else 1.0
    fwd, bwd = [one], [one]
    for k in range(1, n + 1):
        fwd.append(a2 * sum(bwd[j] * fwd[k - j - 1] for j in range(k)))
        bwd.append(inv * sum(fwd[j] * bwd[k - j - 1] for j in range(k)))
    return MomentSequence(tuple(fwd), tuple(bwd))


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


# ---------------------------------------------------------------- laws


@dataclass(frozen=True)
class SpectralLaw:
    atoms: tuple[tuple[float, float], ...]
    density_kind: str  # semicircular | free_poisson_forward | free_poisson_backward | none
    params: EdgeLawParams | None
    support: tuple[float, float]
    total_mass: float
    loop_mass: float | None = None

    @property
    def ac_mass(self) -> float:
        return self.total_mass - sum(m for _, m in self.atoms)

    def density(self, x) -> np.ndarray:
        """Density of the absolutely continuous part (zero off the support)."""
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x > lo) & (x < hi)
        out = np.zeros_like(x)
        xi = x[inside]
        if self.density_kind == "semicircular":
            out[inside] = self.loop_mass * np.sqrt(4 - xi * xi) / (2 * math.pi)
        elif self.density_kind.startswith("free_poisson"):
            a2 = float(self.params.a2)
            poly = 4 * a2 * xi - (a2 * a2 - 1 - a2 * xi) ** 2
            out[inside] = float(self.params.mu_beta) * np.sqrt(np.clip(poly, 0, None)) / (2 * math.pi * xi)
        return out

    def to_json(self) -> dict:
        out = {
            "density_kind": self.density_kind,
            "atoms": [{"location": float(x), "mass": float(m)} for x, m in self.atoms],
            "support": [float(self.support[0]), float(self.support[1])],
            "total_mass": float(self.total_mass),
            "ac_mass": float(self.ac_mass),
        }
        if self.params is not None:
            out["params"] = {
                "a": self.params.a,
                "a2": float(self.params.a2),
                "mu_alpha": float(self.params.mu_alpha),
                "mu_beta": float(self.params.mu_beta),
                "flipped": self.params.flipped,
            }
        else:
            out["params"] = {"mass": float(self.loop_mass)}
        return out


def edge_law(p: EdgeLawParams, orientation: str = FORWARD) -> SpectralLaw:
    """Law of ``T_{e'}* T_{e'}`` (forward) or ``T_{e''}* T_{e''}`` (backward) under Tr_mu."""
    if orientation == FORWARD:
        return SpectralLaw((), "free_poisson_forward", p, p.support, p.mu_beta)
    if orientation == BACKWARD:
        atom = p.mu_alpha - p.mu_beta  # = mu_alpha (1 - a**-4)
        atoms = ((0.0, atom),) if atom > 0 else ()
        return SpectralLaw(atoms, "free_poisson_backward", p, p.support, p.mu_alpha)
    raise ValueError(f"orientation must be {FORWARD!r} or {BACKWARD!r}")


def loop_law(mass: Real = 1) -> SpectralLaw:
    return SpectralLaw((), "semicircular", None, (-2.0, 2.0), mass, mass)


def _ac_integrand(law: SpectralLaw, g):
    """Pull back ``g(x) * density(x) dx`` along ``x = m + r cos(theta)``, theta in [0, pi].

    Square-root edges become ``sin(theta)`` factors, so the integrand is
    smooth; for ``a = 1`` the ``1/x`` blow-up at 0 is cancelled by hand.
    """
    lo, hi = law.support
    m, r = (lo + hi) / 2, (hi - lo) / 2
    if law.density_kind == "semicircular":
        c = law.loop_mass / (2 * math.pi)
        return lambda th: g(m + r * math.cos(th)) * c * (r * math.sin(th)) ** 2
    a2 = float(law.params.a2)
    c = float(law.params.mu_beta) * a2 / (2 * math.pi)
    if lo == 0.0:
        # r^2 sin^2 / x = r (1 - cos) when m = r
        return lambda th: g(m + r * math.cos(th)) * c * r * (1 - math.cos(th))
    return lambda th: g(m + r * math.cos(th)) * c * (r * math.sin(th)) ** 2 / (m + r * math.cos(th))


def density_moment(law: SpectralLaw, n: int) -> float:
    """``int x**n dlaw`` by adaptive quadrature plus the atom contributions."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    lo, hi = law.support
    tol = 1e-9 * float(law.total_mass) * max(1.0, max(abs(lo), abs(hi)) ** n)
    atoms = sum(float(mass) * (x ** n if n else 1.0) for x, mass in law.atoms)
    if law.density_kind == "none":
        return atoms
    f = _ac_integrand(law, lambda x: x ** n)
    val, err = integrate.quad(f, 0.0, math.pi, epsabs=tol / 10, epsrel=1e-13, limit=200)
    if err > tol:
        raise QuadratureError(val, err, tol)
    return atoms + val


def cauchy_by_quadrature(law: SpectralLaw, z: complex) -> complex:
    """``int dlaw(x) / (z - x)`` numerically; independent of the closed form."""
    atoms = sum(mass / (z - x) for x, mass in law.atoms)
    re = _ac_integrand(law, lambda x: (1 / (z - x)).real)
    im = _ac_integrand(law, lambda x: (1 / (z - x)).imag)
    opts = dict(epsabs=1e-12, epsrel=1e-12, limit=400)
    return atoms + integrate.quad(re, 0, math.pi, **opts)[0] + 1j * integrate.quad(im, 0, math.pi, **opts)[0]


def _sqrt_disc(z: complex, lo: float, hi: float) -> complex:
    """Branch of sqrt((z - lo)(z - hi)) analytic off [lo, hi] and ~ z at infinity."""
    return np.sqrt(complex(z - lo)) * np.sqrt(complex(z - hi))


def _cauchy_closed(law: SpectralLaw, z: complex) -> complex:
    lo, hi = law.support
    root = _sqrt_disc(z, lo, hi)
    # (u - v) is rewritten as (u^2 - v^2) / (u + v) when u - v cancels
    if law.density_kind == "semicircular":
        minus, plus = z - root, z + root
        return law.loop_mass * (minus / 2 if abs(minus) >= abs(plus) else 2 / plus)
    p = law.params
    a2 = float(p.a2)
    if law.density_kind == "free_poisson_forward":
        b, c, mass = a2, a2 * a2 - 1, float(p.mu_beta)
    else:
        b, c, mass = 1 / a2, 1 / (a2 * a2) - 1, float(p.mu_alpha)
    # the discriminant (c - b z)^2 - 4 b z equals b^2 (z - lo)(z - hi)
    minus, plus = b * z - c - b * root, b * z - c + b * root
    if abs(minus) >= abs(plus):
        return mass * minus / (2 * z)
    return mass * 2 * b / plus


def cauchy_transform(law: SpectralLaw, z: complex) -> complex:
    """Closed-form Cauchy transform on the upper half plane.

    The square-root branch is the one making ``G(z) -> 0`` as ``Im z -> oo``;
    the Herglotz property ``Im G < 0`` is checked on every call.
    """
    z = complex(z)
    if not z.imag > 0:
        raise ValueError("Cauchy transform is evaluated on the upper half plane only")
    g = _cauchy_closed(law, z)
    if not g.imag < 0:
        raise BranchError(f"G({z}) = {g} violates Im G < 0")
    return g


def moment_generating_function(law: SpectralLaw, z: complex) -> complex:
    """``M(z) = sum P_n z**n`` from ``G(w) = mass * w**-1 * M(1/w)``; valid for small ``|z|``."""
    if z == 0:
        return complex(1.0)
    w = 1 / complex(z)
    return _cauchy_closed(law, w) * w / law.total_mass


def stieltjes_density(law: SpectralLaw, x: float, y: float = 1e-6) -> float:
    return -cauchy_transform(law, complex(x, y)).imag / math.pi


def density_samples(law: SpectralLaw, points: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint grid over the support with density values."""
    lo, hi = law.support
    x = lo + (np.arange(points) + 0.5) * (hi - lo) / points
    return x, law.density(x)


# ---------------------------------------------------------------- structure


@dataclass(frozen=True)
class EdgeStructure:
    edge: str
    case: str  # loop | unequal_mass | equal_mass
    heavy: str
    light: str
    blocks: dict
    flipped: bool = False

    def to_json(self) -> dict:
        return {
            "edge": self.edge,
            "case": self.case,
            "heavy": self.heavy,
            "light": self.light,
            "blocks": {k: float(v) for k, v in self.blocks.items()},
            "flipped": self.flipped,
        }


@dataclass(frozen=True)
class StructureReport:
    edges: tuple[EdgeStructure, ...]
    a_mu: dict
    A_set: tuple[str, ...]
    atom_masses: dict
    factor_type: str
    intersects_compacts: bool
    total_trace: float = field(default=0.0)

    def to_json(self) -> dict:
        return {
            "edges": [e.to_json() for e in self.edges],
            "a_mu": {k: float(v) for k, v in self.a_mu.items()},
            "A_set": list(self.A_set),
            "atom_masses": {k: float(v) for k, v in self.atom_masses.items()},
            "factor_type": self.factor_type,
            "intersects_compacts": self.intersects_compacts,
            "total_trace": float(self.total_trace),
        }


EQUAL_MASS_RTOL = 1e-12


def _masses_equal(x, y) -> bool:
    if isinstance(x, (int, Fraction)) and isinstance(y, (int, Fraction)):
        return x == y
    return abs(x - y) <= EQUAL_MASS_RTOL * max(abs(x), abs(y))


def vn_structure(g: WeightedUndirectedGraph, weights: Mapping[str, Real] | None = None) -> StructureReport:
    """Per-edge block decomposition and the atomic part of the von Neumann completion."""
    mu = g.require_weights() if weights is None else dict(weights)
    edges = []
    for e in g.edges:
        alpha, beta = e.ends
        if e.is_loop:
            edges.append(EdgeStructure(e.id, "loop", alpha, alpha, {"p_alpha": mu[alpha]}))
            continue
        flipped = mu[alpha] < mu[beta]
        heavy, light = (beta, alpha) if flipped else (alpha, beta)
        if _masses_equal(mu[heavy], mu[light]):
            edges.append(EdgeStructure(e.id, "equal_mass", heavy, light, {"p_alpha+p_beta": 2 * mu[heavy]}, flipped))
        else:
            blocks = {"p_beta+q_alpha": 2 * mu[light], "r_alpha": mu[heavy] - mu[light]}
            edges.append(EdgeStructure(e.id, "unequal_mass", heavy, light, blocks, flipped))
    ss = structure_set(g, mu)
    a_set = tuple(v for v in g.vertices if v in ss.A_set)
    atoms = {v: mu[v] - ss.a_mu[v] for v in a_set}
    total = sum(mu[v] for v in g.vertices if v not in ss.A_set) + sum(ss.a_mu[v] for v in a_set)
    # a finite graph always has a finite trace; semifinite only arises for infinite graphs
    factor = "finite" if math.isfinite(float(total)) else "semifinite"
    return StructureReport(tuple(edges), ss.a_mu, a_set, atoms, factor, bool(a_set), total)
