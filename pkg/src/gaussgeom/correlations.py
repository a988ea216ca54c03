"""Entanglement and steering of two-mode Gaussian states.

Everything here works on the local-symplectic invariants (mu, mu_A, mu_B,
Delta); matrix-level operations are limited to the partial transpose, which
serves as the independent oracle for the invariant formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import DomainError, InvariantCoords, validate_covmat

__all__ = [
    "PptSpectrum",
    "RegionClass",
    "partial_transpose",
    "ppt_spectrum",
    "log_negativity",
    "steerability",
    "steerability_a_to_b",
    "steerability_b_to_a",
    "delta_threshold",
    "delta_bounds",
    "delta_bounds_batch",
    "classify_region",
]

_LN2 = float(np.log(2.0))

#: Momentum inversion of the second mode.
_PT = np.diag([1.0, 1.0, 1.0, -1.0])


@dataclass(frozen=True)
class PptSpectrum:
    """Symplectic spectrum (nu~_-, nu~_+) after partial transposition.

    nu~_- < 1 signals entanglement; the product nu~_+ nu~_- equals 1/mu.
    """

    nu_tilde_minus: float
    nu_tilde_plus: float

    def __post_init__(self):
        if not self.nu_tilde_minus > 0.0:
            raise ValueError("nu_tilde_minus must be positive")
        if self.nu_tilde_plus < self.nu_tilde_minus:
            raise ValueError("nu_tilde_plus must be >= nu_tilde_minus")


class RegionClass(Enum):
    """Classification of a point (mu, mu_A, mu_B) of the purity space."""

    UNPHYSICAL = "Unphysical"
    ALL_SEPARABLE = "AllSeparable"
    COEXISTENCE = "Coexistence"
    ALL_ENTANGLED = "AllEntangled"


def partial_transpose(sigma) -> np.ndarray:
    """Partial transpose of a two-mode covariance matrix.

    Flips the sign of the second mode's momentum: Lambda @ Sigma @ Lambda
    with Lambda = diag(1, 1, 1, -1).  Applying it twice returns the input
    bit-exactly.
    """
    sigma = validate_covmat(sigma)
    if sigma.shape[0] != 4:
        raise ValueError("partial transpose is defined here for two-mode matrices")
    return _PT @ sigma @ _PT


def ppt_spectrum(coords: InvariantCoords, linear_delta_tilde: bool = False) -> PptSpectrum:
    """Symplectic spectrum of the partially transposed state from invariants.

    Uses Delta~ = 2/mu_A^2 + 2/mu_B^2 - Delta, the seralian of the partially
    transposed standard form (a, b, c+, -c-).  The dimensionally inconsistent
    variant with first powers of the marginal purities is kept behind
    ``linear_delta_tilde`` for comparison only; it fails the matrix-level
    oracle.  For physical coordinates the discriminant Delta~^2 - 4/mu^2 is
    nonnegative; a clearly negative value raises DomainError.
    """
    mu = coords.mu
    if linear_delta_tilde:
        d_tilde = 2.0 / coords.mu_a + 2.0 / coords.mu_b - coords.delta
    else:
        d_tilde = 2.0 / coords.mu_a**2 + 2.0 / coords.mu_b**2 - coords.delta
    disc = d_tilde * d_tilde - 4.0 / mu**2
    scale = max(1.0, d_tilde * d_tilde)
    if disc < -1e-9 * scale:
        raise DomainError(
            f"PPT discriminant is negative ({disc:.3e}); "
            "coordinates do not describe a physical state"
        )
    nu_plus = float(np.sqrt(0.5 * (d_tilde + np.sqrt(max(disc, 0.0)))))
    # The stable root: enforces nu~_+ nu~_- = 1/mu instead of subtracting.
    nu_minus = 1.0 / (mu * nu_plus)
    return PptSpectrum(nu_tilde_minus=nu_minus, nu_tilde_plus=nu_plus)


def log_negativity(coords: InvariantCoords) -> float:
    """Logarithmic negativity E_N = max(0, -log2(nu~_-))."""
    return max(0.0, -float(np.log2(ppt_spectrum(coords).nu_tilde_minus)))


def steerability_a_to_b(coords: InvariantCoords) -> float:
    """Directional Gaussian steering measure max(0, ln(mu/mu_A))."""
    return max(0.0, float(np.log(coords.mu / coords.mu_a)))


def steerability_b_to_a(coords: InvariantCoords) -> float:
    """Directional Gaussian steering measure max(0, ln(mu/mu_B))."""
    return max(0.0, float(np.log(coords.mu / coords.mu_b)))


def steerability(coords: InvariantCoords) -> float:
    """Steerability G = max(0, ln(mu/mu_A), ln(mu/mu_B)) in natural log units.

    Positive iff the state is steerable in at least one direction, which
    happens iff mu exceeds the smaller marginal purity.
    """
    return max(steerability_a_to_b(coords), steerability_b_to_a(coords))


def delta_threshold(mu: float, mu_a: float, mu_b: float) -> float:
    """Seralian value below which states at these purities are entangled.

    From nu~_- < 1: Delta < 2/mu_A^2 + 2/mu_B^2 - 1 - 1/mu^2.
    """
    return 2.0 / mu_a**2 + 2.0 / mu_b**2 - 1.0 - 1.0 / mu**2


def _feasible(mu, mu_a, mu_b, delta, eps: float = 1e-15):
    """Vectorized test that (mu, mu_a, mu_b, delta) admits a physical state.

    Conditions: delta within the spectrum window [2/mu, 1 + 1/mu^2], real
    solutions for (c+, c-), and a positive definite reconstruction
    (c+^2 <= ab).  All evaluated in closed form, each with a float-rounding
    slack proportional to its own magnitude (a global scale would swamp the
    narrow seralian window near mu = 1).
    """
    a = 1.0 / np.asarray(mu_a, dtype=float)
    b = 1.0 / np.asarray(mu_b, dtype=float)
    delta = np.asarray(delta, dtype=float)
    ab = a * b
    inv_mu2 = 1.0 / mu**2
    eps_d = eps * (1.0 + np.abs(delta))
    ok = (delta >= 2.0 / mu - eps_d) & (delta <= 1.0 + inv_mu2 + eps_d)
    p = 0.5 * (delta - a * a - b * b)
    t = (ab * ab + p * p - inv_mu2) / ab
    ok &= t >= -eps * (ab * ab + p * p + inv_mu2) / ab
    disc = t * t - 4.0 * p * p
    ok &= disc >= -eps * (t * t + 4.0 * p * p)
    x_plus = 0.5 * (np.maximum(t, 0.0) + np.sqrt(np.maximum(disc, 0.0)))
    ok &= x_plus <= ab + eps * (ab + t)
    return ok


def delta_bounds_batch(mu: float, mu_a, mu_b, tol: float = 1e-10):
    """Vectorized seralian bounds; see :func:`delta_bounds`.

    Returns ``(delta_min, delta_max, valid)`` arrays; entries where ``valid``
    is False carry NaN bounds.
    """
    if not 0.0 < mu <= 1.0 + 1e-9:
        raise DomainError(f"mu = {mu} must lie in (0, 1]")
    mu = min(mu, 1.0)
    mu_a = np.atleast_1d(np.asarray(mu_a, dtype=float))
    mu_b = np.atleast_1d(np.asarray(mu_b, dtype=float))
    lo0 = 2.0 / mu
    hi0 = 1.0 + 1.0 / mu**2
    a, b = 1.0 / mu_a, 1.0 / mu_b
    # The feasible set is an interval containing the clamp of a^2 + b^2
    # (the center of the c-realness window) whenever it is non-empty.
    seed = np.clip(a * a + b * b, lo0, hi0)
    valid = _feasible(mu, mu_a, mu_b, seed)

    # Near mu = 1 the whole window (1 - 1/mu)^2 can undercut the requested
    # tolerance; resolve it to 1e-6 relative in that regime.
    tol = min(tol, max((hi0 - lo0) * 1e-6, 1e-15))
    n_iter = max(1, int(np.ceil(np.log2(max(hi0 - lo0, tol) / tol))))
    lo_out = np.full(seed.shape, lo0)
    hi_in = seed.copy()
    for _ in range(n_iter):
        mid = 0.5 * (lo_out + hi_in)
        feas = _feasible(mu, mu_a, mu_b, mid)
        hi_in = np.where(feas, mid, hi_in)
        lo_out = np.where(feas, lo_out, mid)
    d_min = hi_in

    lo_in = seed.copy()
    hi_out = np.full(seed.shape, hi0)
    for _ in range(n_iter):
        mid = 0.5 * (lo_in + hi_out)
        feas = _feasible(mu, mu_a, mu_b, mid)
        lo_in = np.where(feas, mid, lo_in)
        hi_out = np.where(feas, hi_out, mid)
    d_max = lo_in

    d_min = np.where(valid, d_min, np.nan)
    d_max = np.where(valid, d_max, np.nan)
    return d_min, d_max, valid


def delta_bounds(
    mu: float, mu_a: float, mu_b: float, tol: float = 1e-10
) -> tuple[float, float] | None:
    """Range of the seralian allowed by the physicality condition.

    Returns the closed interval (Delta_min, Delta_max) of seralian values for
    which a physical state with the given purities exists, located by
    bisection on the closed-form feasibility conditions, or None when no
    physical state exists (for instance when the marginal purities exceed
    sqrt(mu) on the symmetric cut).
    """
    for name, val in (("mu_a", mu_a), ("mu_b", mu_b)):
        if not 0.0 < val <= 1.0 + 1e-9:
            raise DomainError(f"{name} = {val} must lie in (0, 1]")
    d_min, d_max, valid = delta_bounds_batch(mu, mu_a, mu_b, tol=tol)
    if not bool(valid[0]):
        return None
    return float(d_min[0]), float(d_max[0])


def classify_region(mu: float, mu_a: float, mu_b: float) -> tuple[RegionClass, float]:
    """Region class of (mu, mu_A, mu_B) and the proportion of entangled states.

    The proportion is the fraction of the allowed seralian interval below the
    entanglement threshold.  Points with an empty interval are Unphysical and
    carry proportion NaN; proportions strictly between 0 and 1 classify as
    Coexistence.
    """
    bounds = delta_bounds(mu, mu_a, mu_b)
    if bounds is None:
        return RegionClass.UNPHYSICAL, float("nan")
    d_min, d_max = bounds
    thr = delta_threshold(mu, mu_a, mu_b)
    width = d_max - d_min
    if width <= 1e-12:
        prop = 1.0 if d_min < thr else 0.0
    else:
        prop = float(np.clip((min(d_max, thr) - d_min) / width, 0.0, 1.0))
    if prop >= 1.0:
        return RegionClass.ALL_ENTANGLED, 1.0
    if prop <= 0.0:
        return RegionClass.ALL_SEPARABLE, 0.0
    return RegionClass.COEXISTENCE, prop
