"""Spatial correlation of the Tx-RIS channel across RIS elements.

Three routes give the correlation coefficient of two elements a distance
``d`` apart:

* empirical: sample average of ``h_n conj(h_m)`` over simulated channels;
* semi-analytic: mean of ``exp(j k d sin(theta))`` over elevation samples;
* analytic: the same expectation integrated against a fitted elevation PDF.

The fitted PDFs are expressed in degrees, as they were fitted; only the
argument of ``sin`` is converted.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .channel import generate_realization
from .errors import InsufficientSamples, NotHermitian, QuadratureFailure
from .propagation import element_gain, path_loss, wavenumber

__all__ = [
    "CorrelationMatrix",
    "ElevationPdf",
    "LaplacianElevationPdf",
    "AsymmetricLaplacianElevationPdf",
    "OUTDOOR_ELEVATION_PDF",
    "INDOOR_ELEVATION_PDF",
    "empirical_correlation",
    "semi_analytic_correlation",
    "analytic_correlation",
    "element_pair_distances",
    "correlation_matrix",
    "eigenvalue_spread",
    "ris_elevation_samples",
    "nlos_channel_samples",
    "mean_amplitude",
]


@dataclass
class CorrelationMatrix:
    matrix: np.ndarray
    distances: np.ndarray | None = None

    @property
    def n(self):
        return self.matrix.shape[0]

    def eigenvalues(self):
        return eigenvalue_spread(self)


def empirical_correlation(samples):
    """Sample correlation of ``samples`` (shape ``(M, N)``), unit diagonal."""
    h = np.asarray(samples, dtype=complex)
    if h.ndim != 2 or h.shape[0] < 2:
        raise InsufficientSamples("need at least two channel vectors of equal length")
    r = h.T @ h.conj() / h.shape[0]
    diag = np.sqrt(np.real(np.diag(r)))
    r = r / np.outer(diag, diag)
    r = 0.5 * (r + r.conj().T)
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(r)


def semi_analytic_correlation(theta_samples, d_nm, k):
    """Mean of ``exp(j k d sin(theta_i))``; ``theta_samples`` in radians."""
    theta = np.asarray(theta_samples, dtype=float).ravel()
    if theta.size < 1:
        raise InsufficientSamples("need at least one elevation sample")
    d = np.asarray(d_nm, dtype=float)
    s = np.sin(theta)
    if d.ndim == 0:
        return complex(np.mean(np.exp(1j * k * float(d) * s)))
    # characteristic-function style evaluation on the unique distances only
    uniq, inv = np.unique(d, return_inverse=True)
    vals = np.array([np.mean(np.exp(1j * k * u * s)) for u in uniq])
    return vals[inv].reshape(d.shape)


class ElevationPdf:
    """Elevation density on ``[-bound_deg, bound_deg]`` (degrees), renormalized."""

    bound_deg = 90.0
    breakpoints = (0.0,)

    def raw(self, theta_deg):
        raise NotImplementedError

    @property
    def norm(self):
        if not hasattr(self, "_norm"):
            pts = [-self.bound_deg, *self.breakpoints, self.bound_deg]
            total = 0.0
            for a, b in zip(pts[:-1], pts[1:]):
                total += integrate.quad(self.raw, a, b, epsabs=0, epsrel=1e-12, limit=200)[0]
            self._norm = total
        return self._norm

    def __call__(self, theta_deg):
        t = np.asarray(theta_deg, dtype=float)
        inside = np.abs(t) <= self.bound_deg
        return np.where(inside, self.raw(t) / self.norm, 0.0)

    def sample(self, n, rng, grid_points=400_001):
        """Inverse-CDF samples in degrees."""
        grid = np.linspace(-self.bound_deg, self.bound_deg, grid_points)
        pdf = self(grid)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))])
        cdf /= cdf[-1]
        u = rng.random(n)
        return np.interp(u, cdf, grid)


class LaplacianElevationPdf(ElevationPdf):
    """``(1/(2 b)) exp(-|theta|/b)``; outdoors ``b = 11`` degrees."""

    def __init__(self, scale_deg=11.0, bound_deg=90.0):
        self.scale_deg = float(scale_deg)
        self.bound_deg = float(bound_deg)

    def raw(self, theta_deg):
        t = np.asarray(theta_deg, dtype=float)
        return np.exp(-np.abs(t) / self.scale_deg) / (2 * self.scale_deg)


class AsymmetricLaplacianElevationPdf(ElevationPdf):
    """Two asymmetric-Laplacian pieces joined at 0 degrees.

    Each piece is ``c exp(-(theta - tau) eps xi zeta**xi)`` with
    ``xi = sign(theta - tau)``; ``upper`` applies for theta > 0 and
    ``lower`` for theta <= 0. Entries are ``(coef, tau, eps, zeta)``. The
    printed coefficients are kept as given and the whole density is
    renormalized numerically.
    """

    def __init__(self, upper=(2.5 / (1.7 / 0.7), -2.3, 2.5, 0.7),
                 lower=(3.5 / (2.4 / 1.4), 1.7, 3.5, 1.4), bound_deg=90.0):
        self.upper = tuple(map(float, upper))
        self.lower = tuple(map(float, lower))
        self.bound_deg = float(bound_deg)

    @staticmethod
    def _piece(t, coef, tau, eps, zeta):
        xi = np.where(t - tau >= 0, 1.0, -1.0)
        return coef * np.exp(-(t - tau) * eps * xi * zeta**xi)

    def raw(self, theta_deg):
        t = np.asarray(theta_deg, dtype=float)
        return np.where(t > 0, self._piece(t, *self.upper), self._piece(t, *self.lower))


OUTDOOR_ELEVATION_PDF = LaplacianElevationPdf()
INDOOR_ELEVATION_PDF = AsymmetricLaplacianElevationPdf()


def analytic_correlation(pdf, d_nm, k, epsrel=1e-8):
    """Integral of ``exp(j k d sin(theta)) f(theta)`` over the PDF support."""
    d = float(d_nm)
    pts = [-pdf.bound_deg, *pdf.breakpoints, pdf.bound_deg]
    to_rad = np.pi / 180.0
    parts = []
    for fn in (np.cos, np.sin):
        total = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            val, err = integrate.quad(lambda t: fn(k * d * np.sin(t * to_rad)) * pdf(t),
                                      a, b, epsabs=1e-13, epsrel=epsrel, limit=400)
            if not np.isfinite(val) or err > max(1e-10, epsrel * abs(val)) * 10:
                raise QuadratureFailure(f"quadrature error {err:.3g} for d={d:.4g}")
            total += val
        parts.append(total)
    return complex(parts[0], parts[1])


def element_pair_distances(panel, f_hz):
    """Signed element separations after rotating each pair onto one row.

    The magnitude is the Euclidean separation; the sign follows the vertical
    offset (then the horizontal one) so that ``d[m, n] == -d[n, m]`` and the
    resulting correlation matrix is Hermitian.
    """
    x, y = panel.indices()
    sp = panel.element_spacing(f_hz)
    dv = (x[:, None] - x[None, :]) * sp
    dh = (y[:, None] - y[None, :]) * sp
    mag = np.hypot(dv, dh)
    sign = np.where(dv != 0, np.sign(dv), np.sign(dh))
    return sign * mag


def correlation_matrix(panel, f_hz, method, *, samples=None, theta_samples=None, pdf=None):
    """Correlation matrix for ``panel`` by ``method`` in {empirical, semi, analytic}."""
    k = wavenumber(f_hz)
    if method == "empirical":
        if samples is None:
            raise ValueError("empirical correlation needs channel samples")
        return empirical_correlation(samples)
    d = element_pair_distances(panel, f_hz)
    if method == "semi":
        if theta_samples is None:
            raise ValueError("semi-analytic correlation needs elevation samples")
        r = semi_analytic_correlation(theta_samples, d, k)
    elif method == "analytic":
        if pdf is None:
            raise ValueError("analytic correlation needs an elevation pdf")
        uniq, inv = np.unique(np.round(d, 15), return_inverse=True)
        vals = np.array([analytic_correlation(pdf, u, k) for u in uniq])
        r = vals[inv].reshape(d.shape)
    else:
        raise ValueError(f"unknown correlation method {method!r}")
    return CorrelationMatrix(np.asarray(r, dtype=complex), d)


def eigenvalue_spread(R, tol=1e-8):
    """Eigenvalues of a Hermitian correlation matrix, sorted descending.

    Round-off negatives down to ``-tol`` are clamped to 0. Larger negative
    values are kept, with a warning: model matrices built from the
    rotated-frame distance reduction need not be positive semi-definite, and
    hiding those eigenvalues would break ``sum == trace``.
    """
    m = R.matrix if isinstance(R, CorrelationMatrix) else np.asarray(R, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(m))))
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.allclose(m, m.conj().T, atol=tol * scale, rtol=0):
        raise NotHermitian("correlation matrix is not Hermitian")
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    w = np.where((w < 0) & (w >= -tol), 0.0, w)
    if np.any(w < 0):
        warnings.warn(f"correlation matrix is indefinite (min eigenvalue {w.min():.3g})",
                      RuntimeWarning, stacklevel=2)
    return np.sort(w)[::-1]


def ris_elevation_samples(scene, n_realizations, seed=0):
    """Arrival elevations (rad) of every Tx-RIS scatterer over many draws."""
    from .geometry import ris_arrival_angles

    out = []
    for i in range(n_realizations):
        cl = generate_realization(scene, i, seed).clusters["tx_ris"]
        out.append(ris_arrival_angles(scene.ris, cl.positions, scene.panel.scenario).elevation)
    return np.concatenate(out)


def nlos_channel_samples(scene, n_realizations, seed=0, remove_shadowing=True):
    """Clustered (LOS removed) Tx-RIS vectors, shape ``(M, N)``.

    The log-normal shadow factor is one scalar per realization, common to
    all elements and independent of the angles and gains. Dividing it out
    leaves the unit-diagonal correlation unchanged in expectation and stops
    a few strongly shadowed draws from dominating the sample average.
    """
    rows = []
    for i in range(n_realizations):
        r = generate_realization(scene, i, seed)
        h = r.h_nlos
        if remove_shadowing:
            h = h * 10.0 ** (r.shadow_db["tx_ris"][1] / 20.0)
        rows.append(h)
    return np.stack(rows)


def mean_amplitude(scene, n_realizations, seed=0):
    """Diagnostic ``E[sqrt(G_e(theta) L)]`` over scatterers; cancels in R."""
    from .geometry import distance, ris_arrival_angles

    vals = []
    d = float(distance(scene.tx, scene.ris))
    for i in range(n_realizations):
        r = generate_realization(scene, i, seed)
        cl = r.clusters["tx_ris"]
        th = ris_arrival_angles(scene.ris, cl.positions, scene.panel.scenario).elevation
        l = path_loss(scene.nlos_profile, scene.f_hz, d, r.shadow_db["tx_ris"][1])
        vals.append(np.sqrt(element_gain(scene.panel.pattern, th) * l))
    return float(np.mean(np.concatenate(vals)))
