"""Exception types shared across the package."""


class HeatFtError(Exception):
    """Base class for all package errors."""


class NotHermitian(HeatFtError):
    """Matrix fails the Hermiticity tolerance."""

    def __init__(self, defect: float):
        self.defect = defect
        super().__init__(f"matrix is not Hermitian (max |M - M^dag| = {defect:.3e})")


class NoConvergence(HeatFtError):
    """Jacobi eigensolver exceeded its sweep budget."""

    def __init__(self, off_norm: float, sweeps: int):
        self.off_norm = off_norm
        self.sweeps = sweeps
        super().__init__(
            f"eigensolver did not converge in {sweeps} sweeps "
            f"(off-diagonal norm {off_norm:.3e})"
        )


class InvalidState(HeatFtError):
    """Matrix is not a valid density matrix."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid density matrix: " + "; ".join(self.violations))


class AlphaOutOfBound(HeatFtError):
    """Correlation amplitude exceeds the positivity bound."""

    def __init__(self, modulus: float, bound: float):
        self.modulus = modulus
        self.bound = bound
        super().__init__(
            f"|alpha| = {modulus:.6g} exceeds the positivity bound {bound:.6g}"
        )


class EnergyConservationViolated(HeatFtError):
    """Propagator fails to commute with the bare Hamiltonian."""

    def __init__(self, norm: float):
        self.norm = norm
        super().__init__(f"[U, H_A + H_B] max-norm {norm:.3e} exceeds tolerance")


class UnsnappableHeat(HeatFtError):
    """Per-path heat is too far from the discrete support."""

    def __init__(self, value: float):
        self.value = value
        super().__init__(f"heat value {value:.6g} peV is not near the discrete support")


class UndefinedOnPath(HeatFtError):
    """A log-functional hit a vanishing probability on a nonzero-measure path."""


class PipelineStageError(HeatFtError):
    """A pipeline stage failed; carries the time point and the cause."""

    def __init__(self, time_s: float, point_index: int, original: Exception):
        self.time_s = time_s
        self.point_index = point_index
        self.original = original
        super().__init__(
            f"t = {time_s * 1e3:.6g} ms (point {point_index}): "
            f"{type(original).__name__}: {original}"
        )


class ParseError(HeatFtError):
    """Snapshot file failed structural validation."""


class InvalidSnapshot(HeatFtError):
    """A loaded state violates validity beyond the ingest tolerance."""

    def __init__(self, index: int, violations):
        self.index = index
        self.violations = list(violations)
        super().__init__(
            f"snapshot {index} invalid: " + "; ".join(self.violations)
        )


class GridMismatch(HeatFtError):
    """Two reports cannot be compared because their time grids differ."""


class MonteCarloFailure(HeatFtError):
    """Too many Monte-Carlo resamples failed to analyze."""

    def __init__(self, failed: int, total: int):
        self.failed = failed
        self.total = total
        super().__init__(f"{failed}/{total} Monte-Carlo resamples failed")
