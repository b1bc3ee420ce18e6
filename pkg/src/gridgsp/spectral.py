"""Graph-spectral machinery: eigendecomposition, GFT, Dirichlet energy,
graph filters, and low-pass analysis of bus-indexed signals.

All operations are pure functions over immutable inputs; the dense symmetric
eigensolver is adequate for the target scale (a few hundred buses).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceFailure, DimensionMismatch, ZeroLambda2


@dataclass(frozen=True)
class GraphSpectrum:
    eigenvalues: np.ndarray    # ascending
    eigenvectors: np.ndarray   # orthonormal columns, column n pairs eigenvalue n

    @property
    def n(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class LowPassAnalysis:
    eta: np.ndarray                 # eta_1 .. eta_{N-1}
    c2: float
    frequency_response: np.ndarray  # psi(lambda_1) .. psi(lambda_N)

    def lowpass_orders(self):
        """All K (1-based) for which the filter is order-K low-pass."""
        return [k + 1 for k, e in enumerate(self.eta) if e < 1.0]


def _as_matrix(lap):
    return getattr(lap, "matrix", lap)


def eig_laplacian(lap):
    """Eigendecomposition of a symmetric PSD Laplacian.

    Eigenvalues ascend; the sign of each eigenvector is fixed by making its
    largest-magnitude entry positive, for reproducible GFT plots.
    """
    L = _as_matrix(lap)
    try:
        w, V = np.linalg.eigh(L)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"eigendecomposition failed: {exc}") from exc
    for j in range(V.shape[1]):
        k = np.argmax(np.abs(V[:, j]))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return GraphSpectrum(eigenvalues=w, eigenvectors=V)


def gft(spectrum, signal):
    """Graph Fourier transform: project a signal onto the eigenbasis."""
    a = np.asarray(signal, float)
    if a.shape != (spectrum.n,):
        raise DimensionMismatch(f"signal length {a.shape} != {spectrum.n}")
    return spectrum.eigenvectors.T @ a


def igft(spectrum, coefficients):
    """Inverse GFT: left multiplication by the eigenvector matrix."""
    c = np.asarray(coefficients, float)
    if c.shape != (spectrum.n,):
        raise DimensionMismatch(f"coefficient length {c.shape} != {spectrum.n}")
    return spectrum.eigenvectors @ c


def dirichlet_energy(lap, signal):
    """Quadratic-form smoothness measure a^T L a (>= 0 for PSD L)."""
    L = _as_matrix(lap)
    a = np.asarray(signal, float)
    if a.shape != (L.shape[0],):
        raise DimensionMismatch(f"signal length {a.shape} != {L.shape[0]}")
    return float(a @ L @ a)


def dirichlet_energy_edge_sum(lap, signal):
    """Edge-difference form: 1/2 sum_kn W_kn (a_k - a_n)^2.

    Equals `dirichlet_energy` for a valid Laplacian; kept as an independent
    route for cross-checking.
    """
    a = np.asarray(signal, float)
    total = 0.0
    for (k, n), w in lap.edge_weights.items():
        total += w * (a[k - 1] - a[n - 1]) ** 2
    return total


def dirichlet_energy_spectral(spectrum, signal):
    """Spectral form: sum_k lambda_k * gft(a)_k^2."""
    coeffs = gft(spectrum, signal)
    return float(np.sum(spectrum.eigenvalues * coeffs ** 2))


def apply_graph_filter(spectrum, response, signal):
    """Apply V diag(psi) V^T to a signal."""
    psi = np.asarray(response, float)
    if psi.shape != (spectrum.n,):
        raise DimensionMismatch(f"response length {psi.shape} != {spectrum.n}")
    a = np.asarray(signal, float)
    if a.shape != (spectrum.n,):
        raise DimensionMismatch(f"signal length {a.shape} != {spectrum.n}")
    V = spectrum.eigenvectors
    return V @ (psi * (V.T @ a))


def inverse_laplacian_response(spectrum, c2):
    """Frequency response 1/lambda_n for n >= 2 and N*c2 at the zero mode."""
    lam = spectrum.eigenvalues
    psi = np.empty_like(lam)
    psi[0] = spectrum.n * c2
    psi[1:] = 1.0 / lam[1:]
    return psi


def lowpass_analysis(spectrum, c2):
    """Low-pass ratios of the inverse-Laplacian filter.

    eta_1 = 1 / (N c2 lambda_2); eta_k = lambda_k / lambda_{k+1} for k >= 2.
    The filter is order-K low-pass exactly when eta_K < 1.
    """
    lam = spectrum.eigenvalues
    n = spectrum.n
    if n < 2 or lam[1] <= 1e-12 * max(abs(lam[-1]), 1.0):
        raise ZeroLambda2("lambda_2 is zero: graph is not connected")
    if c2 <= 0:
        raise ValueError("c2 must be positive")
    eta = np.empty(n - 1)
    eta[0] = 1.0 / (n * c2 * lam[1])
    for k in range(2, n):
        eta[k - 1] = lam[k - 1] / lam[k]
    return LowPassAnalysis(eta=eta, c2=c2,
                           frequency_response=inverse_laplacian_response(spectrum, c2))


def default_c2(spectrum, margin=10.0):
    """c2 = margin / (N lambda_2); comfortably above the low-pass boundary."""
    lam2 = spectrum.eigenvalues[1]
    if lam2 <= 0:
        raise ZeroLambda2("lambda_2 is zero: graph is not connected")
    return margin / (spectrum.n * lam2)


@dataclass(frozen=True)
class SmoothnessReport:
    case: str
    theta_ratio: float    # E_L(theta) / ||theta||^2
    vmag_ratio: float     # E_L(v) / ||v||^2
    power_ratio: float    # E_L(z_bus) / ||z_bus||^2
    theta_gft: np.ndarray
    vmag_gft: np.ndarray
    power_gft: np.ndarray

    def rows(self):
        return [("theta", self.theta_ratio),
                ("vmag", self.vmag_ratio),
                ("power", self.power_ratio)]


def smoothness_report(net, lap, theta=None, vmag=None, z_bus=None):
    """Normalized Dirichlet energies of the angle, magnitude, and injection
    signals of a solved case, plus their GFT coefficient vectors.

    Signals default to the case-file values; angle datum is shifted so the
    reference bus sits at zero, matching the estimation convention.
    """
    if theta is None:
        theta = net.angles()
        theta = theta - theta[net.reference_bus - 1]
    if vmag is None:
        vmag = net.magnitudes()
    if z_bus is None:
        z_bus = net.active_injections()
    spec = eig_laplacian(lap)

    def ratio(sig):
        nrm = float(sig @ sig)
        return dirichlet_energy(lap, sig) / nrm if nrm > 0 else 0.0

    return SmoothnessReport(
        case=net.name,
        theta_ratio=ratio(theta),
        vmag_ratio=ratio(vmag),
        power_ratio=ratio(z_bus),
        theta_gft=gft(spec, theta),
        vmag_gft=gft(spec, vmag),
        power_gft=gft(spec, z_bus),
    )
