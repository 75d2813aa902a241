"""Command-line client for the fluctuation-theorem service.

The CLI is a thin HTTP client: it assembles a request, sends it to the
service (in-process by default, or a remote instance via ``--server``),
and writes the response to local CSV/JSON files.  Subcommands:

  simulate   run the configured forward process and export the report
  analyze    run the analysis on a measured snapshot file
  check      print fluctuation-theorem verdicts only
  export     write a simulated snapshot series (the analyze input format)
  compare    diff two saved reports
  serve      start the HTTP service

Exit codes: 0 all checks pass; 2 integral-FT failure; 3 detailed-FT
failure; 4 second-law failure; 5 structural failure; 6 input/parse
error; 7 configuration error; 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .dynamics import DEFAULT_N_POINTS, DEFAULT_T_MAX_S
from .report import (
    EXIT_CONFIG,
    EXIT_GENERIC,
    EXIT_INGEST,
    FtReport,
    write_outputs,
)
from .states import PRESETS


class ServiceClient:
    """HTTP client talking either to an in-process app or a remote server."""

    def __init__(self, server: str | None = None):
        self._server = server
        self._client = (
            httpx.Client(base_url=server, timeout=300.0) if server else None
        )

    def close(self):
        if self._client is not None:
            self._client.close()

    def _request(self, method: str, path: str, payload: dict | None):
        if self._client is not None:
            return self._client.request(method, path, json=payload)

        import asyncio

        from .service.app import app

        async def go():
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://heatft.local", timeout=300.0
            ) as client:
                return await client.request(method, path, json=payload)

        return asyncio.run(go())

    def post(self, path: str, payload: dict) -> dict:
        response = self._request("POST", path, payload)
        if response.status_code >= 400:
            raise ClientError(response.status_code, response.text)
        return response.json()

    def get(self, path: str) -> dict:
        response = self._request("GET", path, None)
        if response.status_code >= 400:
            raise ClientError(response.status_code, response.text)
        return response.json()


class ClientError(Exception):
    def __init__(self, status: int, body: str):
        self.status = status
        self.body = body
        super().__init__(f"service returned {status}: {body}")


def _config_from_args(args, mode: str) -> dict:
    config: dict = {}
    if getattr(args, "config", None):
        try:
            config = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(_fail(f"cannot read config file: {exc}", EXIT_CONFIG))
    if args.preset:
        config["preset"] = args.preset
    thermal = config.get("thermal") or {}
    if args.beta_a_inv is not None:
        thermal["beta_a_inv_pev"] = args.beta_a_inv
    if args.beta_b_inv is not None:
        thermal["beta_b_inv_pev"] = args.beta_b_inv
    if args.nu0 is not None:
        thermal["nu0_hz"] = args.nu0
    if args.j_coupling is not None:
        thermal["j_hz"] = args.j_coupling
    if args.alpha is not None:
        try:
            z = complex(args.alpha)
        except ValueError as exc:
            raise SystemExit(_fail(f"bad --alpha: {exc}", EXIT_CONFIG))
        thermal["alpha"] = [z.real, z.imag]
    if thermal:
        base = dict(PRESETS[config["preset"]]) if config.get("preset") else {}
        base.update(thermal)
        if "beta_a_inv_pev" not in base or "beta_b_inv_pev" not in base:
            raise SystemExit(
                _fail("need --preset or both --beta-a-inv and --beta-b-inv", EXIT_CONFIG)
            )
        config["thermal"] = base
        config.pop("preset", None)
    if config.get("thermal") is None and config.get("preset") is None:
        raise SystemExit(_fail("need --preset, --config or thermal flags", EXIT_CONFIG))
    grid = config.get("grid") or {}
    if args.times:
        grid["times_s"] = [float(x) * 1e-3 for x in args.times.split(",")]
    else:
        if args.t_max is not None:
            grid["t_max_s"] = args.t_max * 1e-3
        if args.t_points is not None:
            grid["n_points"] = args.t_points
    if grid:
        config["grid"] = grid
    if args.literal_rho0_jl:
        config["literal_rho0_jl"] = True
    if getattr(args, "seed", None) is not None:
        config["seed"] = args.seed
    if getattr(args, "tolerance", None) is not None:
        config["tolerance_integral"] = args.tolerance
        config["tolerance_detailed"] = args.tolerance
    if getattr(args, "noise_sigma", None):
        config["uncertainty"] = {
            "n_resamples": args.n_resamples,
            "noise_sigma": args.noise_sigma,
            "seed": args.seed or 0,
        }
    config["mode"] = mode
    return config


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _print_verdict(report: dict) -> None:
    for category, t, detail in report["failures"]:
        print(f"FAIL [{category}] t={t * 1e3:.6g} ms: {detail}")
    n = len(report["points"])
    status = "PASS" if report["passed"] else "FAIL"
    print(
        f"{status}: {n} time points, exit code {report['exit_code']}, "
        f"runtime {report['metadata'].get('runtime_s', 0.0):.3f} s"
    )


def _write_report(report_dict: dict, outdir: str) -> None:
    report = FtReport.from_dict(report_dict)
    written = write_outputs(report, outdir)
    for name in sorted(written):
        print(f"wrote {written[name]}")


def cmd_simulate(args) -> int:
    client = ServiceClient(args.server)
    try:
        payload = {
            "config": _config_from_args(args, "simulate"),
            "include_states": bool(args.export_states),
        }
        data = client.post("/simulate", payload)
    except ClientError as exc:
        return _fail(str(exc), EXIT_INGEST if exc.status == 422 else EXIT_GENERIC)
    finally:
        client.close()
    _write_report(data["report"], args.out)
    if args.export_states:
        path = Path(args.out) / "snapshots.json"
        path.write_text(json.dumps(data["snapshots"]))
        print(f"wrote {path}")
    _print_verdict(data["report"])
    return data["report"]["exit_code"]


def cmd_analyze(args) -> int:
    try:
        snapshots = json.loads(Path(args.snapshots).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read snapshots: {exc}", EXIT_INGEST)
    client = ServiceClient(args.server)
    try:
        payload = {
            "config": _config_from_args(args, "analyze"),
            "snapshots": snapshots,
        }
        data = client.post("/analyze", payload)
    except ClientError as exc:
        return _fail(str(exc), EXIT_INGEST if exc.status == 422 else EXIT_GENERIC)
    finally:
        client.close()
    _write_report(data["report"], args.out)
    _print_verdict(data["report"])
    return data["report"]["exit_code"]


def cmd_check(args) -> int:
    client = ServiceClient(args.server)
    try:
        data = client.post("/check", _config_from_args(args, "simulate"))
    except ClientError as exc:
        return _fail(str(exc), EXIT_INGEST if exc.status == 422 else EXIT_GENERIC)
    finally:
        client.close()
    for category, t, detail in data["failures"]:
        print(f"FAIL [{category}] t={t * 1e3:.6g} ms: {detail}")
    status = "PASS" if data["passed"] else "FAIL"
    print(f"{status}: {data['n_points']} time points, exit code {data['exit_code']}")
    return data["exit_code"]


def cmd_export(args) -> int:
    client = ServiceClient(args.server)
    try:
        data = client.post("/export", _config_from_args(args, "simulate"))
    except ClientError as exc:
        return _fail(str(exc), EXIT_INGEST if exc.status == 422 else EXIT_GENERIC)
    finally:
        client.close()
    Path(args.out).write_text(json.dumps(data))
    print(f"wrote {args.out}")
    return 0


def cmd_compare(args) -> int:
    reports = []
    for path in (args.report_a, args.report_b):
        try:
            reports.append(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            return _fail(f"cannot read report {path}: {exc}", EXIT_INGEST)
    client = ServiceClient(args.server)
    try:
        data = client.post(
            "/compare", {"report_a": reports[0], "report_b": reports[1]}
        )
    except ClientError as exc:
        return _fail(str(exc), EXIT_INGEST if exc.status == 409 else EXIT_GENERIC)
    finally:
        client.close()
    print(f"max abs difference: {data['max_abs_difference']:.6e}")
    for row in data["per_time"]:
        psi_info = ""
        if row["psi"]:
            worst = max(
                abs(v["a_minus_1"]) for v in row["psi"].values()
            )
            psi_info = f"  max|psi-1|(a) = {worst:.3e}"
        print(f"t={row['time_s'] * 1e3:8.4f} ms{psi_info}")
    if args.out:
        Path(args.out).write_text(json.dumps(data, sort_keys=True))
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("heatft.service.app:app", host=args.host, port=args.port)
    return 0


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (same keys as the service)")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter preset")
    p.add_argument("--beta-a-inv", type=float, metavar="PEV",
                   help="inverse temperature of qubit A as 1/beta in peV")
    p.add_argument("--beta-b-inv", type=float, metavar="PEV",
                   help="inverse temperature of qubit B as 1/beta in peV")
    p.add_argument("--alpha", help="initial correlation amplitude, e.g. '0.17+0.03j'")
    p.add_argument("--nu0", type=float, metavar="HZ", help="qubit frequency offset")
    p.add_argument("--j-coupling", type=float, metavar="HZ", help="exchange coupling")
    p.add_argument("--t-max", type=float, default=None, metavar="MS",
                   help=f"grid end time in ms (default {DEFAULT_T_MAX_S * 1e3})")
    p.add_argument("--t-points", type=int, default=None,
                   help=f"number of grid points (default {DEFAULT_N_POINTS})")
    p.add_argument("--times", metavar="MS_LIST",
                   help="explicit comma-separated times in ms")
    p.add_argument("--literal-rho0-jl", action="store_true",
                   help="evaluate J_1/C_1 on the initial state (comparison variant)")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--tolerance", type=float, default=None,
                   help="override the integral/detailed FT tolerance")
    p.add_argument("--server", help="base URL of a running service "
                                    "(default: in-process)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heatft",
        description="Fluctuation theorems for heat exchange between two "
                    "correlated thermal qubits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate and write the full report")
    _add_config_flags(p)
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--export-states", action="store_true",
                   help="also write snapshots.json (analyze input)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analyze", help="analyze a measured snapshot series")
    _add_config_flags(p)
    p.add_argument("snapshots", help="snapshot JSON file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--noise-sigma", type=float, default=None,
                   help="Monte-Carlo noise level for error bars")
    p.add_argument("--n-resamples", type=int, default=1000,
                   help="Monte-Carlo resamples")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="print fluctuation-theorem verdicts")
    _add_config_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export", help="write a simulated snapshot series")
    _add_config_flags(p)
    p.add_argument("--out", default="snapshots.json", help="output file")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("compare", help="diff two saved reports")
    p.add_argument("report_a", help="first summary.json")
    p.add_argument("report_b", help="second summary.json")
    p.add_argument("--out", help="write the diff JSON here")
    p.add_argument("--server", help="base URL of a running service")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
