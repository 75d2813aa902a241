"""Loading, repair and uncertainty propagation for measured state series.

File schema (JSON): ``{"schema_version": 1, "times": [seconds, ...],
"states": [state, ...]}`` where each state is a 4x4 row-major nested list
of ``[re, im]`` pairs in the basis |00>, |01>, |10>, |11| with qubit A as
the left factor.  A CSV alternative uses columns (t, row, col, re, im).

Loaded matrices are Hermitized and trace-renormalized automatically
(logged per snapshot); states whose negativity exceeds the ingest
tolerance are rejected, smaller defects are clipped away.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSnapshot, MonteCarloFailure, ParseError
from .linalg import dagger, hermitian_eig, hermiticity_defect

SNAPSHOT_SCHEMA_VERSION = 1
DEFAULT_PSD_TOL_INGEST = 1e-3
# Repairs below these thresholds are skipped entirely so that loading a
# file produced by export round-trips bit-identically.
HERMITIZE_SKIP_TOL = 0.0
TRACE_SKIP_TOL = 1e-14
CLIP_SKIP_TOL = 1e-15


@dataclass(frozen=True)
class StateSnapshot:
    """One reconstructed global state at a given interaction time."""

    time: float
    rho: np.ndarray = field(repr=False)
    source: str = "measured"  # "simulated" | "measured"
    repair_log: tuple = ()


@dataclass(frozen=True)
class UncertaintyConfig:
    """Monte-Carlo resampling setup for error bars."""

    n_resamples: int = 1000
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_resamples < 1:
            raise ValueError("n_resamples must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "n_resamples": self.n_resamples,
            "noise_sigma": self.noise_sigma,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UncertaintyConfig":
        return cls(
            n_resamples=int(data.get("n_resamples", 1000)),
            noise_sigma=float(data.get("noise_sigma", 0.0)),
            seed=int(data.get("seed", 0)),
        )


def matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(m[i, j].real), float(m[i, j].imag)] for j in range(4)] for i in range(4)]


def pairs_to_matrix(entries) -> np.ndarray:
    m = np.empty((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            re, im = entries[i][j]
            m[i, j] = complex(float(re), float(im))
    return m


def snapshots_to_payload(snapshots) -> dict:
    return {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "times": [float(s.time) for s in snapshots],
        "states": [matrix_to_pairs(s.rho) for s in snapshots],
    }


def validate_payload(payload: dict) -> None:
    """Structural schema check; raises ParseError on any violation."""
    if not isinstance(payload, dict):
        raise ParseError("snapshot payload must be a JSON object")
    for key in ("times", "states"):
        if key not in payload:
            raise ParseError(f"snapshot payload misses key {key!r}")
    times = payload["times"]
    states = payload["states"]
    if not isinstance(times, list) or not isinstance(states, list):
        raise ParseError("'times' and 'states' must be lists")
    if len(times) != len(states):
        raise ParseError(
            f"{len(times)} times but {len(states)} states in snapshot payload"
        )
    if not times:
        raise ParseError("snapshot payload is empty")
    for k, (t, state) in enumerate(zip(times, states)):
        if not isinstance(t, (int, float)) or not math.isfinite(float(t)):
            raise ParseError(f"time {k} is not a finite number")
        if not (isinstance(state, list) and len(state) == 4):
            raise ParseError(f"state {k} is not a 4-row matrix")
        for row in state:
            if not (isinstance(row, list) and len(row) == 4):
                raise ParseError(f"state {k} is not 4x4")
            for entry in row:
                if not (isinstance(entry, list) and len(entry) == 2):
                    raise ParseError(f"state {k} entries must be [re, im] pairs")
                for part in entry:
                    if not isinstance(part, (int, float)) or not math.isfinite(
                        float(part)
                    ):
                        raise ParseError(f"state {k} has a non-finite entry")


def _repair(
    index: int, time: float, m: np.ndarray, tol_psd: float, source: str
) -> StateSnapshot:
    log = []
    defect = hermiticity_defect(m)
    if defect > HERMITIZE_SKIP_TOL:
        m = (m + dagger(m)) / 2.0
        log.append(f"hermitized (defect {defect:.3e})")
    trace = float(np.trace(m).real)
    if trace <= 0:
        raise InvalidSnapshot(index, [f"non-positive trace {trace:.3e}"])
    if abs(trace - 1.0) > TRACE_SKIP_TOL:
        m = m / trace
        log.append(f"trace renormalized (was {trace:.12g})")
    min_eig = float(np.min(hermitian_eig(m).eigenvalues))
    if min_eig < -tol_psd:
        raise InvalidSnapshot(index, [f"negative eigenvalue {min_eig:.3e}"])
    if min_eig < -CLIP_SKIP_TOL:
        m, distance = psd_project(m)
        log.append(
            f"psd-projected (min eigenvalue {min_eig:.3e}, moved {distance:.3e})"
        )
    return StateSnapshot(time=time, rho=m, source=source, repair_log=tuple(log))


def snapshots_from_payload(
    payload: dict,
    tol_psd: float = DEFAULT_PSD_TOL_INGEST,
    source: str = "measured",
) -> list:
    validate_payload(payload)
    order = np.argsort(np.asarray(payload["times"], dtype=float), kind="stable")
    out = []
    for index in order:
        t = float(payload["times"][index])
        m = pairs_to_matrix(payload["states"][index])
        out.append(_repair(int(index), t, m, tol_psd, source))
    return out


def load_snapshots(
    path, fmt: str | None = None, tol_psd: float = DEFAULT_PSD_TOL_INGEST
) -> list:
    """Read a snapshot series from a JSON or CSV file.

    Snapshots come back sorted by time, validated and repaired, with the
    applied repairs recorded per snapshot.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    if fmt == "json":
        try:
            payload = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read snapshot file {path}: {exc}") from exc
        return snapshots_from_payload(payload, tol_psd=tol_psd)
    if fmt == "csv":
        return snapshots_from_payload(_payload_from_csv(path), tol_psd=tol_psd)
    raise ValueError(f"unknown snapshot format {fmt!r}")


def _payload_from_csv(path: Path) -> dict:
    groups: dict = {}
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"t", "row", "col", "re", "im"}.issubset(
                set(reader.fieldnames)
            ):
                raise ParseError("snapshot CSV needs columns t, row, col, re, im")
            for line in reader:
                t = float(line["t"])
                groups.setdefault(t, np.zeros((4, 4, 2)))
                r, c = int(line["row"]), int(line["col"])
                if not (0 <= r < 4 and 0 <= c < 4):
                    raise ParseError(f"snapshot CSV indices out of range: {r},{c}")
                groups[t][r, c, 0] = float(line["re"])
                groups[t][r, c, 1] = float(line["im"])
    except OSError as exc:
        raise ParseError(f"cannot read snapshot file {path}: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise ParseError(f"malformed snapshot CSV {path}: {exc}") from exc
    times = sorted(groups)
    return {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "times": times,
        "states": [groups[t].tolist() for t in times],
    }


def save_snapshots(snapshots, path) -> None:
    path = Path(path)
    path.write_text(json.dumps(snapshots_to_payload(snapshots)))


def psd_project(rho: np.ndarray) -> tuple:
    """Clip negative eigenvalues and renormalize the trace.

    Returns (projected, max-norm distance to the input).  Already-valid
    states pass through unchanged, which makes the projection idempotent
    bit for bit.
    """
    ens = hermitian_eig(rho)
    min_eig = float(np.min(ens.eigenvalues))
    trace = float(np.sum(ens.eigenvalues))
    if min_eig >= -CLIP_SKIP_TOL and abs(trace - 1.0) <= TRACE_SKIP_TOL:
        return rho, 0.0
    clipped = np.maximum(ens.eigenvalues, 0.0)
    total = float(np.sum(clipped))
    if total <= 0:
        raise InvalidSnapshot(-1, ["state has no positive weight after clipping"])
    clipped = clipped / total
    projected = (ens.eigenvectors * clipped) @ dagger(ens.eigenvectors)
    projected = (projected + dagger(projected)) / 2.0
    return projected, float(np.max(np.abs(projected - rho)))


def perturb_hermitian(rho: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Gaussian noise on every independent real degree of freedom."""
    n = rho.shape[0]
    noise = np.zeros_like(rho)
    for i in range(n):
        noise[i, i] = rng.normal(0.0, sigma)
        for j in range(i + 1, n):
            z = complex(rng.normal(0.0, sigma), rng.normal(0.0, sigma))
            noise[i, j] = z
            noise[j, i] = np.conj(z)
    return rho + noise


def monte_carlo_uncertainty(
    snapshots,
    cfg: UncertaintyConfig,
    pipeline,
    max_failure_fraction: float = 0.01,
) -> dict:
    """Mean and standard deviation of every scalar the pipeline reports.

    Each resample perturbs all snapshots (Gaussian noise on the Hermitian
    degrees of freedom), repairs them, and reruns ``pipeline`` which must
    return a flat {name: value} dict.  Failed resamples are counted; the
    run aborts if more than ``max_failure_fraction`` of them fail.
    Deterministic for a fixed seed.
    """
    if cfg.noise_sigma < 0:
        raise ValueError("noise_sigma must be nonnegative")
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.n_resamples)
    samples: dict = {}
    failed = 0
    for seq in streams:
        rng = np.random.default_rng(seq)
        try:
            perturbed = []
            for snap in snapshots:
                rho = perturb_hermitian(snap.rho, cfg.noise_sigma, rng)
                rho = (rho + dagger(rho)) / 2.0
                rho, _ = psd_project(rho / float(np.trace(rho).real))
                perturbed.append(
                    StateSnapshot(snap.time, rho, snap.source, snap.repair_log)
                )
            result = pipeline(perturbed)
        except Exception:
            failed += 1
            continue
        for name, value in result.items():
            samples.setdefault(name, []).append(float(value))
    if failed > max_failure_fraction * cfg.n_resamples:
        raise MonteCarloFailure(failed, cfg.n_resamples)
    out = {"n_resamples": cfg.n_resamples, "n_failed": failed, "quantities": {}}
    for name, values in samples.items():
        arr = np.asarray(values)
        if float(np.max(arr)) == float(np.min(arr)):
            out["quantities"][name] = {"mean": float(arr[0]), "std": 0.0}
        else:
            out["quantities"][name] = {
                "mean": float(np.mean(arr)),
                "std": float(np.std(arr)),
            }
    return out
