"""Dense complex linear algebra for 2x2 and 4x4 operators.

Everything the engine needs from linear algebra lives here: a cyclic
Jacobi eigensolver for Hermitian matrices, the spectral propagator
exp(-i t H), partial traces of two-qubit states, and density-matrix
validity checks.  The solver is hand-rolled on purpose: the matrices are
tiny, the path engine needs reproducible eigenvector conventions
(descending eigenvalues, positive-real leading component, deterministic
tie-breaks inside degenerate clusters), and the test suite checks this
implementation against independent oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidState, NoConvergence, NotHermitian

HERMITICITY_TOL = 1e-10
DEGENERACY_TOL = 1e-10
PHASE_TOL = 1e-12
OFF_NORM_TOL = 1e-14
SWEEP_BUDGET = 100
DEFAULT_PSD_TOL = 1e-10


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    """Max-norm of M - M^dag."""
    return float(np.max(np.abs(m - dagger(m))))


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitian(defect)


@dataclass(frozen=True)
class SpectralEnsemble:
    """Eigenvalues (descending) and matching orthonormal eigenvectors.

    ``eigenvalues[k]`` belongs to column ``eigenvectors[:, k]``.  Phases
    follow the convention that the first component with modulus above
    ``PHASE_TOL`` is real and positive, so repeated runs produce
    bit-identical ensembles.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    degenerate: bool = field(default=False)

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    for comp in vec:
        if abs(comp) > PHASE_TOL:
            return vec * (abs(comp) / comp)
    return vec


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Zero out a[p, q] (and a[q, p]) with a complex plane rotation."""
    apq = a[p, q]
    r = abs(apq)
    if r == 0.0:
        return
    phase = apq / r
    theta = 0.5 * np.arctan2(2.0 * r, (a[q, q] - a[p, p]).real)
    c = np.cos(theta)
    s = np.sin(theta)
    g = np.eye(a.shape[0], dtype=complex)
    g[p, p] = c
    g[q, q] = c
    g[p, q] = s * phase
    g[q, p] = -s * np.conj(phase)
    a[...] = dagger(g) @ a @ g
    v[...] = v @ g


def hermitian_eig(
    m: np.ndarray,
    psd_tol: float | None = None,
    unit_trace: bool = False,
) -> SpectralEnsemble:
    """Eigendecompose a Hermitian matrix by cyclic Jacobi rotations.

    The iteration runs on a max-abs normalized copy so the convergence
    threshold ``OFF_NORM_TOL`` is scale free.  Within degenerate clusters
    (eigenvalue gap below ``DEGENERACY_TOL``) the vectors are
    re-orthonormalized and ordered lexicographically by their phase-fixed
    components, which makes the output deterministic.

    With ``unit_trace=True`` (density-matrix sources) the eigenvalue sum
    is checked against 1 and negativity against ``psd_tol``.
    """
    m = np.asarray(m, dtype=complex)
    require_hermitian(m)
    n = m.shape[0]
    scale = float(np.max(np.abs(m)))
    if scale == 0.0:
        return SpectralEnsemble(np.zeros(n), np.eye(n, dtype=complex))
    a = m / scale
    v = np.eye(n, dtype=complex)
    converged = False
    for _ in range(SWEEP_BUDGET):
        if _off_norm(a) < OFF_NORM_TOL:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 0.0:
                    _jacobi_rotate(a, v, p, q)
    else:
        converged = _off_norm(a) < OFF_NORM_TOL
    if not converged:
        raise NoConvergence(_off_norm(a), SWEEP_BUDGET)

    eigenvalues = np.real(np.diag(a)) * scale
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = v[:, order]

    degenerate = False
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and abs(eigenvalues[stop] - eigenvalues[start]) < DEGENERACY_TOL:
            stop += 1
        if stop - start > 1:
            degenerate = True
            cluster = _canonical_cluster(vectors[:, start:stop])
            vectors[:, start:stop] = cluster
        else:
            vectors[:, start] = _fix_phase(vectors[:, start])
        start = stop

    ensemble = SpectralEnsemble(eigenvalues, vectors, degenerate)
    if unit_trace:
        tol = DEFAULT_PSD_TOL if psd_tol is None else psd_tol
        if abs(float(np.sum(eigenvalues)) - 1.0) > 1e-12:
            raise InvalidState([f"eigenvalue sum {np.sum(eigenvalues):.12f} != 1"])
        if float(np.min(eigenvalues)) < -tol:
            raise InvalidState([f"negative eigenvalue {np.min(eigenvalues):.3e}"])
    return ensemble


def _canonical_cluster(vectors: np.ndarray) -> np.ndarray:
    """Deterministic basis for a degenerate eigenspace.

    Re-orthonormalizes by modified Gram-Schmidt, fixes phases, then sorts
    the columns lexicographically on (real, imag) component pairs.
    """
    cols = []
    for k in range(vectors.shape[1]):
        w = vectors[:, k].copy()
        for u in cols:
            w = w - u * (np.vdot(u, w))
        w = w / np.linalg.norm(w)
        cols.append(_fix_phase(w))
    keys = [tuple(np.column_stack([c.real, c.imag]).ravel()) for c in cols]
    order = sorted(range(len(cols)), key=lambda k: keys[k])
    return np.column_stack([cols[k] for k in order])


def propagator_from_hermitian(h: np.ndarray, t: float, hbar: float = 1.0) -> np.ndarray:
    """exp(-i t H / hbar) through the spectral decomposition of H.

    The engine stores generators in angular-frequency units, so the
    default hbar = 1 applies throughout; the result is unitary.
    """
    ens = hermitian_eig(h)
    phases = np.exp(-1j * (t / hbar) * ens.eigenvalues)
    u = (ens.eigenvectors * phases) @ dagger(ens.eigenvectors)
    defect = float(np.max(np.abs(dagger(u) @ u - np.eye(h.shape[0]))))
    if defect > 1e-10:
        raise InvalidState([f"propagator unitarity defect {defect:.3e}"])
    return u


def unitarity_defect(u: np.ndarray) -> float:
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))))


def partial_trace(rho: np.ndarray, keep: str, validate: bool = True) -> np.ndarray:
    """Reduce a 4x4 two-qubit state to the marginal of qubit ``keep``.

    Qubit A is the left tensor factor (basis order |00>,|01>,|10>,|11>).
    """
    if keep not in ("A", "B"):
        raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("partial_trace expects a 4x4 matrix")
    if validate:
        verdict = validate_density_matrix(rho)
        if not verdict.valid:
            raise InvalidState(verdict.violations)
    r = rho.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.trace(r, axis1=1, axis2=3)
    return np.trace(r, axis1=0, axis2=2)


@dataclass(frozen=True)
class ValidityVerdict:
    """Outcome of validate_density_matrix: empty violations means valid."""

    violations: tuple
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_density_matrix(
    m: np.ndarray, tol_psd: float = DEFAULT_PSD_TOL
) -> ValidityVerdict:
    """Check Hermiticity, unit trace and positivity; never raises."""
    m = np.asarray(m, dtype=complex)
    violations = []
    h_defect = hermiticity_defect(m)
    if h_defect > HERMITICITY_TOL:
        violations.append(f"non-Hermitian (defect {h_defect:.3e})")
    trace_defect = abs(float(np.trace(m).real) - 1.0) + abs(float(np.trace(m).imag))
    if trace_defect > 1e-10:
        violations.append(f"trace != 1 (defect {trace_defect:.3e})")
    if not violations:
        min_eig = float(np.min(hermitian_eig(m).eigenvalues))
    else:
        sym = (m + dagger(m)) / 2.0
        min_eig = float(np.min(hermitian_eig(sym).eigenvalues))
    if min_eig < -tol_psd:
        violations.append(f"negative eigenvalue ({min_eig:.3e})")
    return ValidityVerdict(tuple(violations), h_defect, trace_defect, min_eig)


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Max-norm of [A, B]."""
    return float(np.max(np.abs(a @ b - b @ a)))
