"""FastAPI service wrapping the fluctuation-theorem engine.

The service is stateless: every request carries its full configuration
(and, for analysis, the measured state series) and gets back the
complete report.  File handling stays client-side.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .._version import __version__
from ..dynamics import TimeGrid
from ..errors import GridMismatch, HeatFtError, InvalidSnapshot, ParseError
from ..ingest import SNAPSHOT_SCHEMA_VERSION, snapshots_from_payload, snapshots_to_payload
from ..report import (
    REPORT_SCHEMA_VERSION,
    FtReport,
    compare_runs,
    evaluate_run,
    preset_catalog,
    simulate_states,
)
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    CheckResponse,
    CompareRequest,
    CompareResponse,
    ConfigModel,
    HealthResponse,
    PresetsResponse,
    ReportModel,
    SimulateRequest,
    SimulateResponse,
    SnapshotsPayload,
)


def create_app() -> FastAPI:
    app = FastAPI(
        title="heatft",
        description="Quantum fluctuation theorems for two-qubit heat exchange",
        version=__version__,
    )

    @app.exception_handler(HeatFtError)
    async def _domain_error(request, exc):  # noqa: ARG001
        from fastapi.responses import JSONResponse

        status = 409 if isinstance(exc, GridMismatch) else 422
        return JSONResponse(
            status_code=status,
            content={"detail": {"error": type(exc).__name__, "message": str(exc)}},
        )

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(
            status="ok",
            version=__version__,
            report_schema_version=REPORT_SCHEMA_VERSION,
            snapshot_schema_version=SNAPSHOT_SCHEMA_VERSION,
        )

    @app.get("/presets", response_model=PresetsResponse)
    def presets():
        return PresetsResponse(presets=preset_catalog())

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest):
        config = request.config.to_run_config()
        if config.mode != "simulate":
            raise HTTPException(422, "POST /simulate requires mode 'simulate'")
        report = evaluate_run(config)
        snapshots = None
        if request.include_states:
            snapshots = SnapshotsPayload(
                **snapshots_to_payload(simulate_states(config))
            )
        return SimulateResponse(
            report=ReportModel(**report.to_dict()), snapshots=snapshots
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(request: AnalyzeRequest):
        payload = request.snapshots.model_dump()
        config_model = request.config
        try:
            snapshots = snapshots_from_payload(
                payload, tol_psd=config_model.psd_tol_ingest
            )
        except (ParseError, InvalidSnapshot) as exc:
            raise HTTPException(
                422, {"error": type(exc).__name__, "message": str(exc)}
            ) from exc
        grid = TimeGrid.explicit([s.time for s in snapshots])
        config = config_model.model_copy(update={"mode": "analyze"}).to_run_config(
            grid=grid
        )
        report = evaluate_run(config, snapshots=snapshots)
        return AnalyzeResponse(report=ReportModel(**report.to_dict()))

    @app.post("/check", response_model=CheckResponse)
    def check(config_model: ConfigModel):
        config = config_model.to_run_config()
        report = evaluate_run(config)
        return CheckResponse(
            passed=report.passed,
            exit_code=report.exit_code,
            failures=[list(f) for f in report.failures],
            n_points=len(report.points),
        )

    @app.post("/export", response_model=SnapshotsPayload)
    def export(config_model: ConfigModel):
        config = config_model.to_run_config()
        return SnapshotsPayload(**snapshots_to_payload(simulate_states(config)))

    @app.post("/compare", response_model=CompareResponse)
    def compare(request: CompareRequest):
        a = FtReport.from_dict(request.report_a.model_dump())
        b = FtReport.from_dict(request.report_b.model_dump())
        diff = compare_runs(a, b)
        return CompareResponse(**diff)

    return app


app = create_app()
