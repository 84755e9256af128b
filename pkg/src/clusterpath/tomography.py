"""Two-qubit polarization state tomography and figures of merit.

Measurement scheme: the overcomplete 36-setting set, one projector per
pair of single-qubit analyzer states drawn from {H, V, D, A, R, L} with

    D = (H + V)/sqrt(2)   A = (H - V)/sqrt(2)
    R = (H + i V)/sqrt(2) L = (H - i V)/sqrt(2)

Counts are per projector: each setting is an independent Poisson variable
with mean shots * Tr(rho P). linear_inversion solves the 16 Pauli
correlations by least squares (Hermitian and trace-one by construction,
possibly indefinite at finite shots). mle_reconstruct maximizes the
Poisson log-likelihood over the Cholesky parameterization rho = T T^dag /
Tr(T T^dag), so its output is positive semidefinite with unit trace no
matter what the counts look like. The ascent runs L-BFGS-B seeded from
the physicality-projected linear inversion estimate, which guarantees the
final likelihood is at least that of the projected seed.

Density matrices are plain 4x4 complex numpy arrays in the basis
(HH, HV, VH, VV), first letter arm 1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import xlogy

from .errors import AnalysisError, DomainError

ANALYZER_KETS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "A": np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
    "R": np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
    "L": np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2.0),
}
ANALYZER_ORDER = ("H", "V", "D", "A", "R", "L")

PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

MLE_ITERATION_CAP = 100_000


def all_settings() -> list[tuple[str, str]]:
    return [(a, b) for a in ANALYZER_ORDER for b in ANALYZER_ORDER]


def setting_projector(s1: str, s2: str) -> np.ndarray:
    k1 = ANALYZER_KETS[s1]
    k2 = ANALYZER_KETS[s2]
    ket = np.kron(k1, k2)
    return np.outer(ket, ket.conj())


def check_density_matrix(rho: np.ndarray, eig_floor: float = -1e-8):
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DomainError(f"density matrix must be 4x4, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise DomainError("density matrix is not Hermitian within 1e-10")
    if abs(np.trace(rho).real - 1.0) > 1e-10:
        raise DomainError(f"trace is {np.trace(rho).real}, not 1 within 1e-10")
    w = np.linalg.eigvalsh(rho)
    if w.min() < eig_floor:
        raise DomainError(f"negative eigenvalue {w.min():.3e}")
    return rho


def simulate_tomography(rho: np.ndarray, settings, shots: int | None, rng=None) -> np.ndarray:
    """Per-setting counts; shots None means infinite statistics (exact
    probabilities are returned instead of sampled counts)."""
    rho = check_density_matrix(rho)
    probs = np.array(
        [float(np.real(np.trace(rho @ setting_projector(a, b)))) for a, b in settings]
    )
    probs = np.clip(probs, 0.0, 1.0)
    if shots is None:
        return probs
    if shots <= 0:
        raise DomainError(f"shots must be positive, got {shots}")
    if isinstance(rng, (int, np.integer)) or rng is None:
        rng = np.random.default_rng(rng)
    return rng.poisson(shots * probs).astype(float)


def _design_matrix(settings) -> np.ndarray:
    rows = []
    for a, b in settings:
        proj = setting_projector(a, b)
        rows.append(
            [
                float(np.real(np.trace(proj @ np.kron(PAULIS[i], PAULIS[j])))) / 4.0
                for i in range(4)
                for j in range(4)
            ]
        )
    return np.array(rows)


def linear_inversion(counts, settings) -> np.ndarray:
    """Least-squares Pauli-correlation solve; may be unphysical at finite shots."""
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (len(settings),):
        raise ValueError("one count per setting required")
    design = _design_matrix(settings)
    if np.linalg.matrix_rank(design) < 16:
        raise AnalysisError("setting set is not informationally complete")
    coeffs, *_ = np.linalg.lstsq(design, counts, rcond=None)
    scale = coeffs[0]  # estimates shots, since S_00 = Tr(rho) = 1
    if scale <= 1e-12:
        raise AnalysisError("degenerate counts (all zero or inconsistent)")
    coeffs = coeffs / scale
    rho = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            rho += coeffs[4 * i + j] * np.kron(PAULIS[i], PAULIS[j])
    return rho / 4.0


def project_to_physical(rho: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues and renormalize the trace."""
    rho = np.asarray(rho, dtype=complex)
    rho = (rho + rho.conj().T) / 2.0
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0.0:
        raise AnalysisError("projection produced the zero matrix")
    w = w / w.sum()
    return (v * w) @ v.conj().T


@dataclass
class MleResult:
    rho: np.ndarray
    converged: bool
    iterations: int
    log_likelihood: float


def _params_to_t(x: np.ndarray) -> np.ndarray:
    t = np.zeros((4, 4), dtype=complex)
    t[np.diag_indices(4)] = x[:4]
    lower = np.tril_indices(4, -1)
    t[lower] = x[4:10] + 1j * x[10:16]
    return t


def _t_to_params(t: np.ndarray) -> np.ndarray:
    lower = np.tril_indices(4, -1)
    return np.concatenate(
        [np.real(np.diag(t)), np.real(t[lower]), np.imag(t[lower])]
    )


def mle_reconstruct(counts, settings, tolerance: float = 1e-10) -> MleResult:
    """Poisson maximum-likelihood density matrix, physical by construction.

    The overall count scale is profiled out analytically each evaluation,
    so the estimator does not need to know the shot number. Convergence
    is declared when the likelihood improvement falls below tolerance; if
    the iteration cap is hit first the best iterate is returned with
    converged = False.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (len(settings),):
        raise ValueError("one count per setting required")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if counts.sum() <= 0:
        raise AnalysisError("degenerate counts (all zero)")
    projectors = np.array([setting_projector(a, b) for a, b in settings])

    def neg_ll(x):
        t = _params_to_t(x)
        rho = t @ t.conj().T
        tr = np.trace(rho).real
        if tr <= 1e-300:
            return 1e300
        rho = rho / tr
        probs = np.clip(np.real(np.einsum("kij,ji->k", projectors, rho)), 1e-12, None)
        s = counts.sum() / probs.sum()
        return -float(np.sum(xlogy(counts, s * probs) - s * probs))

    seed = project_to_physical(linear_inversion(counts, settings))
    t0 = np.linalg.cholesky(seed + 1e-10 * np.eye(4))
    x0 = _t_to_params(t0)
    res = optimize.minimize(
        neg_ll,
        x0,
        method="L-BFGS-B",
        options={"maxiter": MLE_ITERATION_CAP, "ftol": tolerance, "gtol": 1e-12},
    )
    t = _params_to_t(res.x)
    rho = t @ t.conj().T
    rho = rho / np.trace(rho).real
    converged = bool(res.success) or res.status == 0
    return MleResult(
        rho=rho,
        converged=converged,
        iterations=int(res.nit),
        log_likelihood=-float(res.fun),
    )


def log_likelihood(rho: np.ndarray, counts, settings) -> float:
    """Poisson log-likelihood with the count scale profiled out."""
    counts = np.asarray(counts, dtype=float)
    probs = np.clip(
        np.array(
            [float(np.real(np.trace(rho @ setting_projector(a, b)))) for a, b in settings]
        ),
        1e-12,
        None,
    )
    s = counts.sum() / probs.sum()
    return float(np.sum(xlogy(counts, s * probs) - s * probs))


def fidelity_pure(rho: np.ndarray, psi: np.ndarray) -> float:
    """<psi|rho|psi> for a pure target."""
    rho = np.asarray(rho, dtype=complex)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if rho.shape != (psi.size, psi.size):
        raise ValueError("dimension mismatch")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > 1e-9:
        raise ValueError("target state must be normalized")
    return float(np.real(psi.conj() @ rho @ psi))


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    return float(np.real(np.trace(rho @ rho)))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = np.asarray(rho, dtype=complex) - np.asarray(sigma, dtype=complex)
    w = np.linalg.eigvalsh((diff + diff.conj().T) / 2.0)
    return float(0.5 * np.sum(np.abs(w)))


def counts_to_csv(counts, settings) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["setting_q1", "setting_q2", "counts"])
    for (a, b), c in zip(settings, counts):
        value = f"{c:.12e}" if float(c) != int(c) else str(int(c))
        writer.writerow([a, b, value])
    return buf.getvalue()


def counts_from_csv(text: str):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header != ["setting_q1", "setting_q2", "counts"]:
        raise ValueError(f"unexpected counts header {header}")
    settings = []
    counts = []
    for a, b, c in reader:
        settings.append((a, b))
        counts.append(float(c))
    return np.array(counts), settings


def rho_to_json_dict(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {
        "basis": ["HH", "HV", "VH", "VV"],
        "re": [[float(x) for x in row] for row in np.real(rho)],
        "im": [[float(x) for x in row] for row in np.imag(rho)],
    }


def rho_from_json_dict(d: dict) -> np.ndarray:
    return np.array(d["re"], dtype=float) + 1j * np.array(d["im"], dtype=float)
