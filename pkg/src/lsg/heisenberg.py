"""Heisenberg-group computations: heat integrand, continued integrand,
geodesics, circle projections, cut-locus.

The group is viewed as R³ with points (x, u, ξ). The heat-kernel integrand
is smooth (removable singularity at λ = 0), but its analytic continuation
t → -it — the would-be Schrödinger kernel — is singular at λ = kπ/t, the
same distances kπ/t at which geodesics through the origin hit their
cut-locus along circles of radius 1/t in the contact plane. Because of
that, no λ-integration of the continued integrand is offered: the module
exposes the integrand and its singular set, nothing more.

Evaluation here deliberately does not reuse the semi-simple machinery:
the sub-Laplacian setting has no Weyl denominator to conjugate with.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationAtSingularity, QuadratureFailure

_SERIES_CUTOFF = 1e-4       # |λt| below this uses the removable-limit series
_SINGULARITY_GUARD = 1e-9


@dataclass(frozen=True)
class HeisenbergPoint:
    x: float
    u: float
    xi: float


@dataclass(frozen=True)
class GeodesicParams:
    """Angle β, curvature parameter t_param (≠ 0), arc parameter s.

    t_param is the `t` of the geodesic formulas, unrelated to evolution
    time.
    """
    beta: float
    t_param: float
    s: float

    def __post_init__(self):
        if self.t_param == 0:
            raise ValueError("t_param must be nonzero")


def _lam_over_sinh(lam: float, t: float) -> float:
    """λ/sinh(λt), series branch near the removable point λt = 0."""
    z = lam * t
    if abs(z) < _SERIES_CUTOFF:
        # 1/sinh(z) = (1/z)(1 - z²/6 + 7z⁴/360 + ...)
        return (1.0 - z * z / 6.0 + 7.0 * z**4 / 360.0) / t
    return lam / np.sinh(z)


def _lam_coth(lam: float, t: float) -> float:
    """λ·coth(λt) with the same series treatment."""
    z = lam * t
    if abs(z) < _SERIES_CUTOFF:
        # coth(z) = 1/z + z/3 - z³/45 + ...
        return 1.0 / t + lam * lam * t / 3.0 - lam**4 * t**3 / 45.0
    return lam / np.tanh(z)


def _lam_over_sin(lam: float, t: float) -> float:
    z = lam * t
    if abs(z) < _SERIES_CUTOFF:
        # 1/sin(z) = (1/z)(1 + z²/6 + 7z⁴/360 + ...)
        return (1.0 + z * z / 6.0 + 7.0 * z**4 / 360.0) / t
    return lam / np.sin(z)


def _lam_cot(lam: float, t: float) -> float:
    z = lam * t
    if abs(z) < _SERIES_CUTOFF:
        # cot(z) = 1/z - z/3 - z³/45 - ...
        return 1.0 / t - lam * lam * t / 3.0 - lam**4 * t**3 / 45.0
    return lam / np.tan(z)


def heat_integrand(lam: float, x: float, u: float, xi: float,
                   t: float) -> complex:
    """e^{-iλξ} e^{-tλ²} (λ/sinh λt) e^{-¼ λ coth(λt)(x²+u²)}, t > 0."""
    if t <= 0:
        raise ValueError("heat integrand needs t > 0")
    radial = x * x + u * u
    return (np.exp(-1j * lam * xi) * np.exp(-t * lam * lam)
            * _lam_over_sinh(lam, t)
            * np.exp(-0.25 * _lam_coth(lam, t) * radial))


def heat_kernel(x: float, u: float, xi: float, t: float,
                tol: float = 1e-10, max_doublings: int = 14) -> complex:
    """Unnormalized heat kernel: adaptive Gauss–Legendre over λ.

    The λ-range is truncated where the Gaussian factor e^{-tλ²} drops
    below tol relative to its peak; composite panels double until two
    successive estimates agree to tol (relative). The overall
    normalization constant of the kernel is not pinned down here.
    """
    if t <= 0 or tol <= 0:
        raise ValueError("heat_kernel needs t > 0 and tol > 0")
    lam_max = np.sqrt(max(np.log(1.0 / tol), 1.0) / t) + 2.0 / np.sqrt(t)

    base_nodes, base_weights = np.polynomial.legendre.leggauss(16)

    def composite(panels: int) -> complex:
        edges = np.linspace(-lam_max, lam_max, panels + 1)
        total = 0.0 + 0.0j
        for a, b in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            for node, weight in zip(base_nodes, base_weights):
                total += half * weight * heat_integrand(
                    mid + half * node, x, u, xi, t)
        return total

    prev = composite(2)
    for k in range(1, max_doublings + 1):
        cur = composite(2 ** (k + 1))
        scale = max(abs(cur), 1e-300)
        if abs(cur - prev) <= tol * scale:
            return cur
        prev = cur
    raise QuadratureFailure(
        f"heat kernel quadrature did not converge to {tol:g} "
        f"after {max_doublings} doublings")


def singularities(t: float, k_max: int) -> list[float]:
    """The continued integrand's singular set {kπ/t : k = 1..k_max}."""
    if t <= 0 or k_max < 1:
        raise ValueError("need t > 0 and k_max >= 1")
    return [k * np.pi / t for k in range(1, k_max + 1)]


def schrodinger_integrand(lam: float, x: float, u: float, t: float) -> complex:
    """(λ/sin λt) e^{-(i/4) λ cot(λt)(x²+u²)}: the t → -it continuation.

    Pointwise evaluation only; no λ-integration is offered because the
    putative solution operator is singular at every λ = kπ/t (and blows
    up toward a Dirac delta there at x = u = 0). Evaluation within 1e-9
    of a singularity raises.
    """
    if t <= 0:
        raise ValueError("needs t > 0")
    k_near = round(abs(lam) * t / np.pi)
    if k_near >= 1 and abs(abs(lam) - k_near * np.pi / t) < _SINGULARITY_GUARD:
        raise EvaluationAtSingularity(
            f"lambda = {lam:g} within {_SINGULARITY_GUARD:g} of "
            f"{k_near}·pi/t")
    radial = x * x + u * u
    return (_lam_over_sin(lam, t)
            * np.exp(-0.25j * _lam_cot(lam, t) * radial))


def geodesic(params: GeodesicParams) -> HeisenbergPoint:
    """The displayed geodesic through the origin, evaluated literally."""
    beta, t, s = params.beta, params.t_param, params.s
    cos_b, sin_b = np.cos(beta), np.sin(beta)
    x = (cos_b * (1.0 - np.cos(t * s)) + sin_b * np.sin(t * s)) / t
    u = (-sin_b * (1.0 - np.cos(t * s)) + cos_b * np.sin(t * s)) / t
    xi = 2.0 * (t * s - np.sin(t * s)) / (t * t)
    return HeisenbergPoint(float(x), float(u), float(xi))


def projection_residual(beta: float, t_param: float,
                        s_samples: np.ndarray) -> float:
    """Max deviation of the contact-plane projection from its circle.

    The projection satisfies (x - cosβ/t)² + (u + sinβ/t)² = 1/t²
    identically; the residual is pure floating-point noise.
    """
    if t_param == 0:
        raise ValueError("t_param must be nonzero")
    t = t_param
    worst = 0.0
    for s in np.asarray(s_samples, dtype=float):
        p = geodesic(GeodesicParams(beta=beta, t_param=t, s=float(s)))
        lhs = (p.x - np.cos(beta) / t) ** 2 + (p.u + np.sin(beta) / t) ** 2
        worst = max(worst, abs(lhs - 1.0 / (t * t)))
    return float(worst)


def cutlocus_distance(k: int, t_param: float) -> float:
    """Cut-locus distance kπ/t along the radius-1/t circle.

    Coincides with singularities(t, ·) of the continued integrand — the
    central observation this module exists to exhibit.
    """
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    if t_param <= 0:
        raise ValueError("t_param must be positive")
    return k * np.pi / t_param
