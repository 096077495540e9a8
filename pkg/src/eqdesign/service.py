"""HTTP JSON API for interactive design exploration.

POST /api/design   -- synchronous; body is a run config, response the report
POST /api/validate -- asynchronous; returns a job id to poll
GET  /api/jobs/{id}
GET  /api/health

Each request gets an independent engine run; the only shared state is
the write-once report cache keyed by config hash.  Engine failures map
to 422 with the engine error code; malformed bodies map to 400 with
field-level messages.
"""

import json
import math
import os
import threading
import uuid

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import __version__
from .adjustment import TestWithLength
from .config import parse_config
from .errors import ConfigurationError, EngineError
from .oracle import simulate_length_criterion, simulate_power
from .report import default_cache_dir, execute_design

__all__ = ["create_app"]


def _engine_error_response(exc):
    body = {"error_code": exc.code, "message": str(exc)}
    if exc.field:
        body["field"] = exc.field
    if getattr(exc, "classification", None):
        body["classification"] = exc.classification
    return JSONResponse(status_code=422, content=body)


def _bad_request(message, field=None):
    errors = [{"message": message, **({"field": field} if field else {})}]
    return JSONResponse(status_code=400, content={"errors": errors})


class _Jobs:
    def __init__(self):
        self._lock = threading.Lock()
        self._jobs = {}

    def create(self):
        job_id = uuid.uuid4().hex
        with self._lock:
            self._jobs[job_id] = {"status": "queued", "result": None, "error": None}
        return job_id

    def update(self, job_id, **fields):
        with self._lock:
            self._jobs[job_id].update(fields)

    def get(self, job_id):
        with self._lock:
            job = self._jobs.get(job_id)
            return dict(job) if job is not None else None


def _run_validation(report, reps, percentiles, m, seed, workers=1):
    from scipy import special

    cfg = parse_config(report["config"])
    if report.get("stage_two") is None:
        raise EngineError("report has no prior-adjusted stage to validate")
    s2 = report["stage_two"]
    l = report["stage_one"]["l"]
    test = TestWithLength(cfg.test, l)
    rows = []
    for p in percentiles:
        n = int(math.ceil(s2["mu_hat"] + float(special.ndtri(p)) * s2["sigma_hat"]))
        est = simulate_length_criterion(
            cfg.design, cfg.priors, test, n, l, reps=reps, m=m, seed=seed, workers=workers
        )
        rows.append(
            {"percentile": p, "n": n, "proportion": est.proportion, "se": est.se}
        )
    n_rec = report["recommendation"]["n"]
    power = simulate_power(
        cfg.design, cfg.priors, test, n_rec, reps=reps, m=m, seed=seed, workers=workers
    )
    return {
        "config_hash": report["config_hash"],
        "reps": reps,
        "m": m,
        "seed": seed,
        "length_criterion": rows,
        "power_at_recommended": {
            "n": n_rec,
            "proportion": power.proportion,
            "se": power.se,
        },
        "warnings": report.get("warnings", []),
    }


def create_app(cache_dir=None, ui_dir=None):
    """Build the service app; ``ui_dir`` (or EQDESIGN_UI_DIR) optionally
    mounts a built browser frontend at the root path."""
    cache_dir = default_cache_dir() if cache_dir is None else cache_dir
    app = FastAPI(title="eqdesign", version=__version__)
    jobs = _Jobs()

    @app.get("/api/health")
    def health():
        return {"status": "ok", "name": "eqdesign", "version": __version__}

    @app.post("/api/design")
    async def design(request: Request):
        try:
            raw = await request.json()
        except json.JSONDecodeError as exc:
            return _bad_request(f"body is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            return _bad_request("body must be a JSON object")
        try:
            cfg = parse_config(raw)
        except ConfigurationError as exc:
            return _bad_request(str(exc), field=exc.field)
        try:
            payload, _, _ = execute_design(cfg, cache_dir=cache_dir)
        except EngineError as exc:
            return _engine_error_response(exc)
        return Response(content=payload, media_type="application/json")

    @app.post("/api/validate")
    async def validate(request: Request):
        try:
            raw = await request.json()
        except json.JSONDecodeError as exc:
            return _bad_request(f"body is not valid JSON: {exc}")
        if not isinstance(raw, dict) or "report" not in raw:
            return _bad_request("body must be an object with a 'report' key", "report")
        report = raw["report"]
        reps = raw.get("reps", 500)
        percentiles = raw.get("percentiles", [0.25, 0.5, 0.9])
        m = raw.get("m", 10_000)
        seed = raw.get("seed", 0)
        if not isinstance(reps, int) or isinstance(reps, bool):
            return _bad_request("reps must be an integer", "reps")
        if not isinstance(percentiles, list) or not all(
            isinstance(p, (int, float)) and 0.0 < p < 1.0 for p in percentiles
        ):
            return _bad_request("percentiles must be numbers in (0, 1)", "percentiles")

        job_id = jobs.create()

        def work():
            jobs.update(job_id, status="running")
            try:
                result = _run_validation(report, reps, percentiles, m, seed)
            except EngineError as exc:
                jobs.update(
                    job_id,
                    status="error",
                    error={"error_code": exc.code, "message": str(exc)},
                )
            except Exception as exc:  # pragma: no cover - defensive
                jobs.update(
                    job_id,
                    status="error",
                    error={"error_code": "internal", "message": str(exc)},
                )
            else:
                jobs.update(job_id, status="done", result=result)

        threading.Thread(target=work, daemon=True).start()
        return {"job_id": job_id, "status": "queued"}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"message": "unknown job id"})
        return job

    ui_dir = os.environ.get("EQDESIGN_UI_DIR") if ui_dir is None else ui_dir
    if ui_dir and os.path.isfile(os.path.join(ui_dir, "index.html")):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
