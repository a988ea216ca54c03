"""Invariant measure densities over symplectic spectra and metric line elements.

Three invariant measures on mixed Gaussian states are supported through
their eigenvalue densities: the one induced by the Hilbert-Schmidt metric,
the Fisher-Rao one, and the measure obtained by reducing Haar-random pure
states on twice the mode number.  Overall normalization constants are
dropped; only the shapes and ratios of the densities are meaningful here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import InvariantCoords, StdForm, validate_covmat

__all__ = [
    "MeasureKind",
    "HILBERT_SCHMIDT",
    "FISHER_RAO",
    "REDUCED_PURE",
    "fixed_purity",
    "TangentDirection",
    "density_hs",
    "density_fr",
    "density_reduced_pure",
    "density",
    "density_ratio",
    "line_element_hs",
    "line_element_fr",
    "numeric_metric_density",
    "hs_density_invariant_coords",
    "hs_density_std_form",
    "numeric_std_form_density",
]

_SPECTRUM_TOL = 1e-9


@dataclass(frozen=True)
class MeasureKind:
    """Tag selecting one of the invariant measures.

    ``mu`` is only set for the fixed-purity measure, whose eigenvalue
    density is supported on the shell prod(1/nu_k) = mu.
    """

    tag: str
    mu: float | None = None


HILBERT_SCHMIDT = MeasureKind("hilbert-schmidt")
FISHER_RAO = MeasureKind("fisher-rao")
REDUCED_PURE = MeasureKind("reduced-pure")


def fixed_purity(mu: float) -> MeasureKind:
    """Fixed-purity measure on the shell of global purity ``mu``."""
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu = {mu} must lie in (0, 1]")
    return MeasureKind("fixed-purity", mu=mu)


def _spectrum(nu) -> np.ndarray:
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    if nu.ndim != 1 or nu.size == 0:
        raise ValueError("spectrum must be a non-empty 1D sequence")
    if float(nu.min()) < 1.0 - _SPECTRUM_TOL:
        raise ValueError(f"symplectic eigenvalues must be >= 1, got min {nu.min()}")
    return nu


def _repulsion(nu: np.ndarray) -> float:
    """prod_{l>m} (nu_l^2 - nu_m^2)^2, the eigenvalue repulsion factor."""
    out = 1.0
    for l in range(nu.size):
        for m in range(l):
            out *= (nu[l] ** 2 - nu[m] ** 2) ** 2
    return out


def density_hs(nu) -> float:
    """Hilbert-Schmidt eigenvalue density (up to a constant).

    (prod nu_k)^(-N(N+5/2)+1) * prod_{l>m} (nu_l^2 - nu_m^2)^2.
    """
    nu = _spectrum(nu)
    n = nu.size
    return float(np.prod(nu) ** (-n * (n + 2.5) + 1.0) * _repulsion(nu))


def density_fr(nu) -> float:
    """Fisher-Rao eigenvalue density: (prod nu_k)^(-2N+1) * repulsion."""
    nu = _spectrum(nu)
    return float(np.prod(nu) ** (-2.0 * nu.size + 1.0) * _repulsion(nu))


def density_reduced_pure(nu) -> float:
    """Density from reduced Haar-random pure states: (prod nu_k)^2 * repulsion.

    The exponent 2 on the product is independent of the mode number.
    """
    nu = _spectrum(nu)
    return float(np.prod(nu) ** 2 * _repulsion(nu))


def density(kind: MeasureKind, nu) -> float:
    """Evaluate the eigenvalue density of the given measure kind.

    For the fixed-purity kind the value is the repulsion factor on the
    purity shell and zero off the shell (the delta factor cannot be
    evaluated pointwise).
    """
    if kind.tag == "hilbert-schmidt":
        return density_hs(nu)
    if kind.tag == "fisher-rao":
        return density_fr(nu)
    if kind.tag == "reduced-pure":
        return density_reduced_pure(nu)
    if kind.tag == "fixed-purity":
        nu = _spectrum(nu)
        if abs(float(np.prod(1.0 / nu)) - kind.mu) > 1e-9:
            return 0.0
        return _repulsion(nu)
    raise ValueError(f"unknown measure kind {kind.tag!r}")


def density_ratio(kind_a: MeasureKind, kind_b: MeasureKind, nu) -> float:
    """Ratio of two eigenvalue densities at the same spectrum.

    The ratio is a power of prod(nu_k) only; in particular HS over FR
    equals (prod nu_k)^(-N^2 - N/2).  A degenerate spectrum makes both
    densities vanish and the ratio undefined (except for equal kinds).
    """
    if kind_a == kind_b:
        return 1.0
    num = density(kind_a, nu)
    den = density(kind_b, nu)
    if den == 0.0:
        raise ValueError("density ratio undefined: denominator density vanishes")
    return num / den


# ---------------------------------------------------------------------------
# Metric line elements


def _sym_pair(sigma, d_sigma) -> tuple[np.ndarray, np.ndarray]:
    sigma = validate_covmat(sigma)
    d_sigma = np.asarray(d_sigma, dtype=float)
    if d_sigma.shape != sigma.shape:
        raise ValueError("d_sigma must have the same shape as sigma")
    scale = max(1.0, float(np.abs(d_sigma).max()))
    if float(np.abs(d_sigma - d_sigma.T).max()) > 1e-10 * scale:
        raise ValueError("d_sigma must be symmetric")
    return sigma, d_sigma


def line_element_hs(sigma, d_sigma) -> float:
    """Squared Hilbert-Schmidt length of the displacement d_sigma at sigma.

    ds^2 = ((tr(Sigma^-1 dSigma))^2 + 2 tr((Sigma^-1 dSigma)^2)) / (16 sqrt(det Sigma)).
    """
    sigma, d_sigma = _sym_pair(sigma, d_sigma)
    det = float(np.linalg.det(sigma))
    if det <= 0.0:
        raise ValueError("sigma must have positive determinant")
    x = np.linalg.solve(sigma, d_sigma)
    tr1 = float(np.trace(x))
    tr2 = float(np.trace(x @ x))
    return (tr1 * tr1 + 2.0 * tr2) / (16.0 * np.sqrt(det))


def line_element_fr(sigma, d_sigma) -> float:
    """Squared Fisher-Rao length: tr((Sigma^-1 dSigma)^2) / 2."""
    sigma, d_sigma = _sym_pair(sigma, d_sigma)
    x = np.linalg.solve(sigma, d_sigma)
    return 0.5 * float(np.trace(x @ x))


# ---------------------------------------------------------------------------
# Numerical validation of the eigenvalue densities


@dataclass(frozen=True)
class TangentDirection:
    """Tangent coordinates at a Williamson point Sigma = D, S = identity.

    ``d_nu`` shifts the symplectic eigenvalues; (d_x, d_y, d_z) build the
    generator H with 2x2 blocks [[X_ij, Y_ij], [Z_ij, -X_ji]] of an
    infinitesimal symplectic transformation, where Y and Z are symmetric
    and Z has zero diagonal (the diagonal of Z generates the torus that
    stabilizes D and carries no volume).
    """

    d_nu: np.ndarray
    d_x: np.ndarray
    d_y: np.ndarray
    d_z: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.d_nu).size
        for name, m in (("d_x", self.d_x), ("d_y", self.d_y), ("d_z", self.d_z)):
            m = np.asarray(m)
            if m.shape != (n, n):
                raise ValueError(f"{name} must have shape ({n}, {n})")
        if np.any(np.asarray(self.d_y) != np.asarray(self.d_y).T):
            raise ValueError("d_y must be symmetric")
        d_z = np.asarray(self.d_z)
        if np.any(d_z != d_z.T) or np.any(np.diagonal(d_z) != 0.0):
            raise ValueError("d_z must be symmetric with zero diagonal")

    def hamiltonian(self) -> np.ndarray:
        """Assemble the 2N x 2N symplectic generator from the block data."""
        n = np.asarray(self.d_nu).size
        h = np.zeros((2 * n, 2 * n))
        x, y, z = np.asarray(self.d_x), np.asarray(self.d_y), np.asarray(self.d_z)
        for i in range(n):
            for j in range(n):
                h[2 * i, 2 * j] = x[i, j]
                h[2 * i, 2 * j + 1] = y[i, j]
                h[2 * i + 1, 2 * j] = z[i, j]
                h[2 * i + 1, 2 * j + 1] = -x[j, i]
        return h


def _tangent_basis(n: int) -> list[TangentDirection]:
    """Coordinate basis (d_nu_i, X_ij, Y_{i<=j}, Z_{i<j}); 2N^2 + N directions."""
    dirs = []

    def make(d_nu=None, x=None, y=None, z=None):
        return TangentDirection(
            d_nu=d_nu if d_nu is not None else np.zeros(n),
            d_x=x if x is not None else np.zeros((n, n)),
            d_y=y if y is not None else np.zeros((n, n)),
            d_z=z if z is not None else np.zeros((n, n)),
        )

    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        dirs.append(make(d_nu=e))
    for i in range(n):
        for j in range(n):
            x = np.zeros((n, n))
            x[i, j] = 1.0
            dirs.append(make(x=x))
    for i in range(n):
        for j in range(i, n):
            y = np.zeros((n, n))
            y[i, j] = y[j, i] = 1.0
            dirs.append(make(y=y))
    for i in range(n):
        for j in range(i + 1, n):
            z = np.zeros((n, n))
            z[i, j] = z[j, i] = 1.0
            dirs.append(make(z=z))
    return dirs


def _curve_tangent(nu: np.ndarray, direction: TangentDirection, step: float) -> np.ndarray:
    """Central difference of Sigma(t) = S(t)^T D(t) S(t) at t = 0."""

    def sigma_at(t: float) -> np.ndarray:
        d = np.diag(np.repeat(nu + t * np.asarray(direction.d_nu), 2))
        h = direction.hamiltonian()
        if not np.any(h):
            return d
        s = expm(t * h)
        return s.T @ d @ s

    return (sigma_at(step) - sigma_at(-step)) / (2.0 * step)


def _gram_sqrt_det(base: np.ndarray, tangents: list[np.ndarray], quad) -> float:
    """sqrt(det g) of a quadratic form via the polarization identity."""
    k = len(tangents)
    g = np.empty((k, k))
    for i in range(k):
        g[i, i] = quad(base, tangents[i])
        for j in range(i):
            plus = quad(base, tangents[i] + tangents[j])
            minus = quad(base, tangents[i] - tangents[j])
            g[i, j] = g[j, i] = 0.25 * (plus - minus)
    det = float(np.linalg.det(g))
    return float(np.sqrt(det)) if det > 0.0 else 0.0


def numeric_metric_density(nu, kind: MeasureKind, step: float = 1e-5) -> float:
    """Numerically computed sqrt(det g) over the (nu, X, Y, Z) tangent basis.

    The tangent vectors are obtained by central finite differences of the
    group action, so this validates the closed-form densities without
    re-deriving them: for a fixed mode number the ratio to
    :func:`density_hs` or :func:`density_fr` is constant over spectra.
    A degenerate spectrum gives a singular metric and the value 0.
    """
    nu = _spectrum(nu)
    if nu.size > 3:
        raise ValueError("numeric metric density supports at most 3 modes")
    if kind.tag == "hilbert-schmidt":
        quad = line_element_hs
    elif kind.tag == "fisher-rao":
        quad = line_element_fr
    else:
        raise ValueError(f"no line element available for measure kind {kind.tag!r}")
    base = np.diag(np.repeat(nu, 2))
    tangents = [_curve_tangent(nu, d, step) for d in _tangent_basis(nu.size)]
    return _gram_sqrt_det(base, tangents, quad)


# ---------------------------------------------------------------------------
# Two-mode volume densities in standard-form and invariant coordinates


def hs_density_invariant_coords(coords: InvariantCoords) -> float:
    """Hilbert-Schmidt volume density in (mu_A, mu_B, mu, Delta) coordinates.

    sqrt(3)/512 * mu^7 / (mu_A^3 mu_B^3); the local-group directions have
    been separated off and Delta does not appear.
    """
    return float(np.sqrt(3.0) / 512.0 * coords.mu**7 / (coords.mu_a**3 * coords.mu_b**3))


def hs_density_std_form(std: StdForm) -> float:
    """Closed-form HS volume density in (a, b, c+, c-) coordinates, up to a constant.

    a^2 b^2 (c+^2 - c-^2) / |c+^2 - ab|^5 / |c-^2 - ab|^5, nonnegative under
    the c+ >= |c-| convention for physical states (where c^2 < ab).
    """
    ab = std.a * std.b
    num = std.a**2 * std.b**2 * abs(std.c_plus**2 - std.c_minus**2)
    den = abs(std.c_plus**2 - ab) ** 5 * abs(std.c_minus**2 - ab) ** 5
    return float(num / den)


def _local_generators() -> list[np.ndarray]:
    """Basis of the local symplectic algebra sp(2) + sp(2) on two modes."""
    out = []
    for mode in range(2):
        for h in (
            np.array([[1.0, 0.0], [0.0, -1.0]]),
            np.array([[0.0, 1.0], [0.0, 0.0]]),
            np.array([[0.0, 0.0], [1.0, 0.0]]),
        ):
            g = np.zeros((4, 4))
            g[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2] = h
            out.append(g)
    return out


_LOCAL_GENERATORS = _local_generators()


def numeric_std_form_density(std: StdForm, step: float = 1e-5) -> float:
    """Numeric sqrt(det g) of the HS metric in standard-form coordinates.

    The ten coordinates are (a, b, c+, c-) plus the six local symplectic
    group directions around the identity; central differences with the
    given step build the tangent vectors.  Proportional to
    :func:`hs_density_std_form` with a spectrum-independent constant.
    """
    base = std.matrix()
    tangents = []
    for field in ("a", "b", "c_plus", "c_minus"):
        vals = {f: getattr(std, f) for f in ("a", "b", "c_plus", "c_minus")}
        plus, minus = dict(vals), dict(vals)
        plus[field] += step
        minus[field] -= step
        tangents.append((StdForm(**plus).matrix() - StdForm(**minus).matrix()) / (2.0 * step))
    for gen in _LOCAL_GENERATORS:
        s_plus = expm(step * gen)
        s_minus = expm(-step * gen)
        tangents.append(
            (s_plus.T @ base @ s_plus - s_minus.T @ base @ s_minus) / (2.0 * step)
        )
    return _gram_sqrt_det(base, tangents, line_element_hs)
