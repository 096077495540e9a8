"""HTTP API: design, async validate jobs, health, caching, error bodies."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from eqdesign.cli import main
from eqdesign.service import create_app

from test_config_report import mini_config


@pytest.fixture()
def client(tmp_path):
    app = create_app(cache_dir=str(tmp_path / "cache"))
    with TestClient(app) as c:
        yield c


class TestHealth:
    def test_ok(self, client):
        resp = client.get("/api/health")
        assert resp.status_code == 200
        body = resp.json()
        assert body["status"] == "ok"
        assert body["name"] == "eqdesign"
        assert "version" in body


class TestDesignEndpoint:
    def test_returns_report(self, client):
        resp = client.post("/api/design", json=mini_config())
        assert resp.status_code == 200
        report = resp.json()
        assert report["recommendation"]["n"] >= 1
        assert report["stage_two"]["mu_hat"] > 0

    def test_second_request_served_from_cache_identical(self, client):
        r1 = client.post("/api/design", json=mini_config())
        r2 = client.post("/api/design", json=mini_config())
        assert r1.content == r2.content

    def test_malformed_body_is_400_with_field(self, client):
        resp = client.post("/api/design", json={"design": {}, "priors": {}, "test": {}})
        assert resp.status_code == 400
        body = resp.json()
        assert body["errors"] and "field" in body["errors"][0]

    def test_unknown_key_rejected(self, client):
        cfg = mini_config()
        cfg["extra"] = 1
        resp = client.post("/api/design", json=cfg)
        assert resp.status_code == 400
        assert "extra" in resp.json()["errors"][0]["message"]

    def test_engine_error_is_422_with_code(self, client):
        cfg = mini_config()
        cfg["design"]["eta1"] = [0.2]
        cfg["design"]["eta2"] = [0.7]
        resp = client.post("/api/design", json=cfg)
        assert resp.status_code == 422
        assert resp.json()["error_code"] == "unattainable-design"

    def test_warnings_match_cli_output_verbatim(self, client, tmp_path, capsys):
        cfg = mini_config()
        cfg["design"]["eta1"] = [0.5]
        cfg["design"]["eta2"] = [0.5]
        resp = client.post("/api/design", json=cfg)
        api_warnings = resp.json()["warnings"]
        assert api_warnings

        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(cfg))
        main(["design", "--config", str(cfg_path), "--no-cache"])
        stdout = capsys.readouterr().out
        for w in api_warnings:
            assert f"warning: {w}" in stdout

    def test_cli_and_http_reports_byte_identical(self, client, tmp_path):
        # shared cache: whichever surface computes first, the other replays
        cfg_path = tmp_path / "config.json"
        cfg_path.write_text(json.dumps(mini_config()))
        out = tmp_path / "report.json"
        code = main(
            [
                "design",
                "--config",
                str(cfg_path),
                "--out",
                str(out),
                "--cache-dir",
                str(tmp_path / "cache"),
            ]
        )
        assert code == 0
        resp = client.post("/api/design", json=mini_config())
        assert resp.content == out.read_bytes()


class TestValidateEndpoint:
    def test_async_job_lifecycle(self, client):
        report = client.post("/api/design", json=mini_config()).json()
        resp = client.post(
            "/api/validate",
            json={"report": report, "reps": 100, "m": 1000, "percentiles": [0.5]},
        )
        assert resp.status_code == 200
        job_id = resp.json()["job_id"]
        for _ in range(600):
            job = client.get(f"/api/jobs/{job_id}").json()
            if job["status"] in ("done", "error"):
                break
            time.sleep(0.1)
        assert job["status"] == "done", job
        result = job["result"]
        assert result["length_criterion"][0]["percentile"] == 0.5
        assert 0.0 <= result["power_at_recommended"]["proportion"] <= 1.0

    def test_bad_percentiles_rejected(self, client):
        report = client.post("/api/design", json=mini_config()).json()
        resp = client.post(
            "/api/validate", json={"report": report, "percentiles": [1.5]}
        )
        assert resp.status_code == 400

    def test_unknown_job_404(self, client):
        assert client.get("/api/jobs/nope").status_code == 404


class TestUiMount:
    def test_serves_frontend_when_present(self, tmp_path):
        ui = tmp_path / "ui"
        ui.mkdir()
        (ui / "index.html").write_text("<html><body>explorer</body></html>")
        app = create_app(cache_dir=str(tmp_path / "cache"), ui_dir=str(ui))
        with TestClient(app) as c:
            page = c.get("/")
            assert page.status_code == 200
            assert "explorer" in page.text
            assert c.get("/api/health").status_code == 200

    def test_no_ui_dir_is_api_only(self, tmp_path):
        app = create_app(cache_dir=str(tmp_path / "cache"), ui_dir=None)
        with TestClient(app) as c:
            assert c.get("/api/health").status_code == 200
