"""Exchange interaction, propagators and unitary evolution.

Internally hbar = 1: the interaction is stored in angular-frequency
units, so exp(-i t H_int) rotates the one-excitation block {|01>, |10>}
by theta = pi J t / 2.  That rotation angle is the observable contract
the tests pin down.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EnergyConservationViolated, InvalidState
from .linalg import (
    commutator_norm,
    dagger,
    hermitian_eig,
    unitarity_defect,
    validate_density_matrix,
)
from .states import SIGMA_MINUS, SIGMA_PLUS, QubitHamiltonian

ENERGY_COMMUTATOR_TOL = 1e-10
DEFAULT_T_MAX_S = 2.32e-3
DEFAULT_N_POINTS = 22


@dataclass(frozen=True)
class ExchangeCoupling:
    """Partial-swap interaction i (pi J / 2)(sigma_A^+ sigma_B^- - h.c.)."""

    j_coupling: float
    h_int: np.ndarray = field(repr=False)


def build_exchange(j_coupling: float) -> ExchangeCoupling:
    """Construct the exchange coupling and verify its structure.

    The matrix is supported only on span{|01>, |10>} and commutes exactly
    with H_A + H_B because that block is degenerate in energy.
    """
    if j_coupling <= 0:
        raise ValueError("J must be positive")
    rate = np.pi * j_coupling / 2.0  # rad/s with hbar = 1
    h_int = 1j * rate * (
        np.kron(SIGMA_PLUS, SIGMA_MINUS) - np.kron(SIGMA_MINUS, SIGMA_PLUS)
    )
    outside = h_int.copy()
    outside[1:3, 1:3] = 0.0
    if np.max(np.abs(outside)) != 0.0:
        raise InvalidState(["exchange coupling leaks outside the one-excitation block"])
    return ExchangeCoupling(j_coupling=j_coupling, h_int=h_int)


def propagator_at(coupling: ExchangeCoupling, t: float) -> np.ndarray:
    """Unitary exp(-i t H_int); the {|01>,|10>} block is the real rotation
    [[cos th, -sin th], [sin th, cos th]] with th = pi J t / 2."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return np.eye(4, dtype=complex)
    ens = hermitian_eig(coupling.h_int)
    phases = np.exp(-1j * t * ens.eigenvalues)
    u = (ens.eigenvectors * phases) @ dagger(ens.eigenvectors)
    defect = unitarity_defect(u)
    if defect > 1e-10:
        raise InvalidState([f"propagator unitarity defect {defect:.3e}"])
    return u


def rotation_angle(coupling: ExchangeCoupling, t: float) -> float:
    """theta = pi J t / 2."""
    return np.pi * coupling.j_coupling * t / 2.0


def evolve(rho0: np.ndarray, u: np.ndarray) -> np.ndarray:
    """U rho U^dag with validity and spectrum checks."""
    verdict = validate_density_matrix(rho0)
    if not verdict.valid:
        raise InvalidState(verdict.violations)
    if unitarity_defect(u) > 1e-10:
        raise InvalidState(["evolution operator is not unitary"])
    rho_t = u @ rho0 @ dagger(u)
    # exact Hermitization keeps exported states byte-stable on reload
    rho_t = (rho_t + dagger(rho_t)) / 2.0
    after = validate_density_matrix(rho_t)
    if not after.valid:
        raise InvalidState(after.violations)
    return rho_t


def certify_energy_conservation(
    u: np.ndarray, h_total: np.ndarray, tol: float = ENERGY_COMMUTATOR_TOL
) -> float:
    """Max-norm of [U, H_A + H_B]; raises when it exceeds ``tol``.

    This gate guarantees pathwise Q_A = -Q_B before any trajectory work.
    """
    norm = commutator_norm(u, h_total)
    if norm > tol:
        raise EnergyConservationViolated(norm)
    return norm


def total_hamiltonian(h_a: QubitHamiltonian, h_b: QubitHamiltonian) -> np.ndarray:
    return np.kron(h_a.matrix, np.eye(2)) + np.kron(np.eye(2), h_b.matrix)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sampling times (seconds) starting at 0."""

    times: tuple

    def __post_init__(self):
        if not self.times:
            raise ValueError("time grid is empty")
        if self.times[0] != 0.0:
            raise ValueError("time grid must start at 0")
        diffs = np.diff(self.times)
        if len(diffs) and float(np.min(diffs)) <= 0.0:
            raise ValueError("time grid must be strictly increasing")

    @classmethod
    def uniform(
        cls, t_max: float = DEFAULT_T_MAX_S, n_points: int = DEFAULT_N_POINTS
    ) -> "TimeGrid":
        if n_points < 2:
            raise ValueError("need at least two grid points")
        step = t_max / (n_points - 1)
        return cls(tuple(i * step for i in range(n_points)))

    @classmethod
    def explicit(cls, times) -> "TimeGrid":
        return cls(tuple(float(t) for t in times))

    def __len__(self) -> int:
        return len(self.times)

    def to_dict(self) -> dict:
        return {"times_s": list(self.times)}

    @classmethod
    def from_dict(cls, data: dict) -> "TimeGrid":
        if "times_s" in data and data["times_s"] is not None:
            return cls.explicit(data["times_s"])
        return cls.uniform(
            t_max=float(data.get("t_max_s", DEFAULT_T_MAX_S)),
            n_points=int(data.get("n_points", DEFAULT_N_POINTS)),
        )
