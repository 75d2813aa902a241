"""Pydantic request/response models for the HTTP service.

These mirror the core dataclasses on the wire: configs come in as JSON
matching the CLI config file, reports go out as the same structure that
``summary.json`` stores.
"""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field, model_validator

from ..dynamics import DEFAULT_N_POINTS, DEFAULT_T_MAX_S, TimeGrid
from ..ingest import SNAPSHOT_SCHEMA_VERSION, UncertaintyConfig
from ..report import RunConfig
from ..states import PRESETS, ThermalParameters


class ThermalModel(BaseModel):
    beta_a_inv_pev: float = Field(gt=0)
    beta_b_inv_pev: float = Field(gt=0)
    nu0_hz: float = Field(default=1000.0, gt=0)
    j_hz: float = Field(default=215.1, gt=0)
    alpha: list[float] = Field(default=[0.0, 0.0], min_length=2, max_length=2)

    def to_params(self) -> ThermalParameters:
        return ThermalParameters.from_dict(self.model_dump())


class GridModel(BaseModel):
    times_s: Optional[list[float]] = None
    t_max_s: float = DEFAULT_T_MAX_S
    n_points: int = Field(default=DEFAULT_N_POINTS, ge=2)

    def to_grid(self) -> TimeGrid:
        if self.times_s is not None:
            return TimeGrid.explicit(self.times_s)
        return TimeGrid.uniform(self.t_max_s, self.n_points)


class UncertaintyModel(BaseModel):
    n_resamples: int = Field(default=1000, ge=1)
    noise_sigma: float = Field(default=0.0, ge=0)
    seed: int = 0

    def to_config(self) -> UncertaintyConfig:
        return UncertaintyConfig(self.n_resamples, self.noise_sigma, self.seed)


class ConfigModel(BaseModel):
    """Run configuration; ``preset`` fills ``thermal`` when omitted."""

    preset: Optional[str] = None
    thermal: Optional[ThermalModel] = None
    grid: GridModel = GridModel()
    mode: str = "simulate"
    literal_rho0_jl: bool = False
    uncertainty: Optional[UncertaintyModel] = None
    seed: int = 0
    tolerance_integral: float = 1e-9
    tolerance_detailed: float = 1e-9
    tolerance_second_law: float = 1e-10
    psd_tol: float = 1e-10
    psd_tol_ingest: float = 1e-3

    @model_validator(mode="after")
    def _check(self):
        if self.thermal is None and self.preset is None:
            raise ValueError("either 'preset' or 'thermal' is required")
        if self.preset is not None and self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")
        if self.mode not in ("simulate", "analyze"):
            raise ValueError("mode must be 'simulate' or 'analyze'")
        return self

    def to_run_config(self, grid: TimeGrid | None = None) -> RunConfig:
        if self.thermal is not None:
            thermal = self.thermal.to_params()
        else:
            thermal = ThermalParameters.from_dict(PRESETS[self.preset])
        return RunConfig(
            thermal=thermal,
            grid=grid if grid is not None else self.grid.to_grid(),
            mode=self.mode,
            literal_rho0_jl=self.literal_rho0_jl,
            uncertainty=self.uncertainty.to_config() if self.uncertainty else None,
            seed=self.seed,
            tolerance_integral=self.tolerance_integral,
            tolerance_detailed=self.tolerance_detailed,
            tolerance_second_law=self.tolerance_second_law,
            psd_tol=self.psd_tol,
            psd_tol_ingest=self.psd_tol_ingest,
            preset_name=self.preset,
        )


class SnapshotsPayload(BaseModel):
    """Wire form of the snapshot file schema."""

    schema_version: int = SNAPSHOT_SCHEMA_VERSION
    times: list[float]
    states: list[Any]


class DetailedRecordModel(BaseModel):
    q_pev: float
    p_f: float
    p_r_neg: float
    lhs: Optional[float]
    rhs_jw: float
    psi: Optional[float]
    defined: bool


class PointModel(BaseModel):
    time_s: float
    hist_forward: list[float]
    hist_reverse: list[float]
    heat_support_pev: list[float]
    detailed: list[DetailedRecordModel]
    integral: dict[str, float]
    integral_deviation: dict[str, float]
    integral_pass: dict[str, bool]
    mean_heat_pev: float
    mean_sigma: float
    jw_slope: Optional[float]
    functional_means: dict[str, float]
    excluded_mass: float
    commutator_norm: float
    unitarity_defect: float
    forward_mass_defect: float
    reverse_mass_defect: float
    max_sstar_eigenvalue_gap: float
    warnings: list[str]
    paths: list[dict[str, Any]]


class ReportModel(BaseModel):
    schema_version: int
    package_version: str
    config: dict[str, Any]
    points: list[PointModel]
    passed: bool
    failures: list[list[Any]]
    exit_code: int
    metadata: dict[str, Any]
    uncertainty: Optional[dict[str, Any]] = None


class SimulateRequest(BaseModel):
    config: ConfigModel
    include_states: bool = False


class SimulateResponse(BaseModel):
    report: ReportModel
    snapshots: Optional[SnapshotsPayload] = None


class AnalyzeRequest(BaseModel):
    config: ConfigModel
    snapshots: SnapshotsPayload


class AnalyzeResponse(BaseModel):
    report: ReportModel


class CheckResponse(BaseModel):
    passed: bool
    exit_code: int
    failures: list[list[Any]]
    n_points: int


class CompareRequest(BaseModel):
    report_a: ReportModel
    report_b: ReportModel


class CompareResponse(BaseModel):
    max_abs_difference: float
    per_time: list[dict[str, Any]]


class HealthResponse(BaseModel):
    status: str
    version: str
    report_schema_version: int
    snapshot_schema_version: int


class PresetsResponse(BaseModel):
    presets: dict[str, dict[str, Any]]
