"""Local Hamiltonians, Gibbs marginals and the correlated two-qubit state.

Units: energies in peV, times in seconds, frequencies in Hz.  The only
quantities that enter exponentials are beta * E products, which are
dimensionless by construction.  Basis order is |00>, |01>, |10>, |11>
with qubit A as the left factor; sigma_z|0> = +|0> so E(|0>) = 0 and
E(|1>) = h * nu0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import AlphaOutOfBound, InvalidState
from .linalg import hermitian_eig, validate_density_matrix

PLANCK_H_PEV_S = 4.135667696e-3  # Planck constant, peV * s

SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |1><0|
SIGMA_MINUS = SIGMA_PLUS.conj().T

KET_01 = 1  # index of |01> in the computational basis
KET_10 = 2


@dataclass(frozen=True)
class QubitHamiltonian:
    """H_j = h nu0 (1 - sigma_z)/2 for one qubit, diagonal with E0=0, E1=h nu0."""

    which: str
    nu0: float
    matrix: np.ndarray = field(repr=False)
    energies: tuple

    @classmethod
    def build(cls, which: str, nu0: float) -> "QubitHamiltonian":
        if which not in ("A", "B"):
            raise ValueError("which must be 'A' or 'B'")
        quantum = PLANCK_H_PEV_S * nu0
        matrix = quantum * (np.eye(2, dtype=complex) - SIGMA_Z) / 2.0
        return cls(which=which, nu0=nu0, matrix=matrix, energies=(0.0, quantum))

    @property
    def quantum(self) -> float:
        """Level splitting h nu0 in peV."""
        return self.energies[1]


@dataclass(frozen=True)
class ThermalParameters:
    """Physical parameters of a run: inverse temperatures, coupling, alpha.

    ``beta_a``/``beta_b`` are inverse temperatures in 1/peV; ``alpha`` is
    the complex correlation amplitude of the initial state.
    """

    beta_a: float
    beta_b: float
    nu0: float
    j_coupling: float
    alpha: complex

    def __post_init__(self):
        if self.beta_a <= 0 or self.beta_b <= 0:
            raise ValueError("inverse temperatures must be positive")
        if self.nu0 <= 0:
            raise ValueError("nu0 must be positive")
        if self.j_coupling <= 0:
            raise ValueError("J must be positive")
        bound = alpha_bound(self.beta_a, self.beta_b, self.nu0)
        if abs(self.alpha) > bound + 1e-12:
            raise AlphaOutOfBound(abs(self.alpha), bound)

    @property
    def delta_beta(self) -> float:
        """beta_A - beta_B in 1/peV."""
        return self.beta_a - self.beta_b

    def hamiltonian(self, which: str) -> QubitHamiltonian:
        return QubitHamiltonian.build(which, self.nu0)

    def with_alpha(self, alpha: complex) -> "ThermalParameters":
        return replace(self, alpha=alpha)

    def to_dict(self) -> dict:
        return {
            "beta_a_inv_pev": 1.0 / self.beta_a,
            "beta_b_inv_pev": 1.0 / self.beta_b,
            "nu0_hz": self.nu0,
            "j_hz": self.j_coupling,
            "alpha": [self.alpha.real, self.alpha.imag],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ThermalParameters":
        alpha = data.get("alpha", [0.0, 0.0])
        return cls(
            beta_a=1.0 / float(data["beta_a_inv_pev"]),
            beta_b=1.0 / float(data["beta_b_inv_pev"]),
            nu0=float(data.get("nu0_hz", 1000.0)),
            j_coupling=float(data.get("j_hz", 215.1)),
            alpha=complex(float(alpha[0]), float(alpha[1])),
        )


def gibbs_state(beta: float, h: QubitHamiltonian) -> np.ndarray:
    """Thermal state exp(-beta H)/Z as a diagonal 2x2 density matrix."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    w = math.exp(-beta * h.quantum)
    z = 1.0 + w
    return np.diag([1.0 / z, w / z]).astype(complex)


def alpha_bound(beta_a: float, beta_b: float, nu0: float) -> float:
    """Largest |alpha| keeping the correlated state positive semidefinite.

    Equals exp(-h nu0 (beta_a + beta_b)/2) / (Z_a Z_b), the geometric mean
    of the |01> and |10> populations of the product state.
    """
    quantum = PLANCK_H_PEV_S * nu0
    za = 1.0 + math.exp(-beta_a * quantum)
    zb = 1.0 + math.exp(-beta_b * quantum)
    return math.exp(-quantum * (beta_a + beta_b) / 2.0) / (za * zb)


def correlated_initial_state(p: ThermalParameters) -> np.ndarray:
    """rho0 = rho_A x rho_B + alpha|01><10| + alpha*|10><01|.

    The correlation term is traceless on either qubit, so both marginals
    stay exactly thermal for any admissible alpha.
    """
    rho_a = gibbs_state(p.beta_a, p.hamiltonian("A"))
    rho_b = gibbs_state(p.beta_b, p.hamiltonian("B"))
    rho = np.kron(rho_a, rho_b)
    rho[KET_01, KET_10] += p.alpha
    rho[KET_10, KET_01] += np.conj(p.alpha)
    verdict = validate_density_matrix(rho, tol_psd=1e-10)
    if not verdict.valid:
        raise InvalidState(verdict.violations)
    return rho


@dataclass(frozen=True)
class LocalBetaResult:
    """Outcome of effective_local_beta."""

    beta: float | None
    status: str  # "thermal" | "degenerate" | "not_thermal"
    off_diagonal: float


def effective_local_beta(
    rho_j: np.ndarray,
    h: QubitHamiltonian,
    tol_offdiag: float = 1e-9,
    tol_degenerate: float = 1e-12,
) -> LocalBetaResult:
    """Inverse temperature of a qubit state, if it is thermal.

    Returns beta = ln(p0/p1)/(h nu0) when the state is diagonal in the
    Hamiltonian eigenbasis; flags maximally mixed populations as
    "degenerate" (beta = 0) and coherent states as "not_thermal".
    """
    verdict = validate_density_matrix(rho_j)
    if not verdict.valid:
        raise InvalidState(verdict.violations)
    off = abs(complex(rho_j[0, 1]))
    if off > tol_offdiag:
        return LocalBetaResult(None, "not_thermal", off)
    p0 = float(np.real(rho_j[0, 0]))
    p1 = float(np.real(rho_j[1, 1]))
    if abs(p0 - p1) < tol_degenerate:
        return LocalBetaResult(0.0, "degenerate", off)
    beta = math.log(p0 / p1) / h.quantum
    return LocalBetaResult(beta, "thermal", off)


def minimum_eigenvalue(rho: np.ndarray) -> float:
    return float(np.min(hermitian_eig(rho).eigenvalues))


# Named presets for the two reference runs: with and without initial
# correlations, each at its own temperature pair.
PRESETS = {
    "correlated": {
        "beta_a_inv_pev": 4.7,
        "beta_b_inv_pev": 3.3,
        "nu0_hz": 1000.0,
        "j_hz": 215.1,
        "alpha": [0.17, 0.03],
    },
    "uncorrelated": {
        "beta_a_inv_pev": 4.3,
        "beta_b_inv_pev": 3.7,
        "nu0_hz": 1000.0,
        "j_hz": 215.1,
        "alpha": [0.0, 0.0],
    },
}


def preset(name: str) -> ThermalParameters:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    return ThermalParameters.from_dict(PRESETS[name])
