import pytest
from fastapi.testclient import TestClient

from magkerr import __version__
from magkerr.errors import (
    ConfigError,
    NumericalError,
    PhysicalityError,
    SolverError,
    SqueezeDomainError,
    StabilityError,
)
from magkerr.service import _ERROR_KINDS, app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


EFFECTIVE_PARAMS = {
    "Delta_a_MHz": 100.0,
    "Delta_b_tilde_MHz": -100.0,
    "Delta_c_tilde_MHz": -100.0,
    "G_tilde_MHz": 19.4,
    "g_ab_MHz": 35.0,
    "gamma_a_MHz": 5.5,
    "gamma_b_MHz": 12.0,
    "gamma_c_MHz": 12.0,
}

MICRO_PARAMS = {
    "Delta_a_MHz": 100.0,
    "Delta_b_MHz": -110.0,
    "Delta_c_MHz": -185.5,
    "gamma_a_MHz": 18.6,
    "gamma_b_MHz": 6.7,
    "gamma_c_MHz": 6.7,
    "g_ab_MHz": 30.0,
    "Omega_b_MHz": 4.0e9,
}


class TestMeta:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body == {"status": "ok", "version": __version__}

    def test_preset_listing(self, client):
        assert client.get("/presets").json() == {
            "presets": ["fig2", "fig3", "fig4"]
        }

    def test_preset_info(self, client):
        body = client.get("/presets/fig3").json()
        assert body["name"] == "fig3"
        assert body["mode"] == "effective"
        assert body["shape"] == [101, 3]
        assert [a["name"] for a in body["axes"]] == ["Delta_a_MHz", "kerr_scale"]
        assert body["description"]

    def test_unknown_preset_is_404(self, client):
        resp = client.get("/presets/fig9")
        assert resp.status_code == 404
        assert "unknown preset 'fig9'" in resp.json()["detail"]


class TestPoint:
    def test_effective_point(self, client):
        resp = client.post("/point", json={"params": EFFECTIVE_PARAMS})
        assert resp.status_code == 200
        body = resp.json()
        assert body["stable"] is True
        assert body["E_ab"] > 0.0
        assert body["R_min"] > 0.0
        assert body["nu_min"] >= 0.5
        assert body["note"] == ""

    def test_microscopic_point_reports_occupations(self, client):
        resp = client.post(
            "/point", json={"mode": "microscopic", "params": MICRO_PARAMS}
        )
        assert resp.status_code == 200
        assert "|b|^2=" in resp.json()["note"]

    def test_branch_requires_microscopic_mode(self, client):
        resp = client.post(
            "/point", json={"params": EFFECTIVE_PARAMS, "branch": 1}
        )
        assert resp.status_code == 400
        body = resp.json()
        assert body["kind"] == "config"
        assert "microscopic" in body["detail"]

    def test_unknown_param_key_is_schema_error(self, client):
        params = dict(EFFECTIVE_PARAMS, coupling_MHz=1.0)
        resp = client.post("/point", json={"params": params})
        assert resp.status_code == 422
        assert "coupling_MHz" in resp.text

    def test_wrong_mode_key_is_config_error(self, client):
        params = dict(EFFECTIVE_PARAMS, K_b_nHz=0.1)
        resp = client.post("/point", json={"params": params})
        assert resp.status_code == 400
        assert "only valid in the other mode" in resp.json()["detail"]

    def test_missing_branch_is_solver_error(self, client):
        resp = client.post(
            "/point",
            json={"mode": "microscopic", "params": MICRO_PARAMS, "branch": 5},
        )
        assert resp.status_code == 422
        body = resp.json()
        assert body["kind"] == "solver"
        assert "branch 5 not found" in body["detail"]


class TestSweep:
    REQUEST = {
        "params": EFFECTIVE_PARAMS,
        "axis1": {"name": "Delta_a_MHz", "min": 60.0, "max": 140.0, "points": 3},
        "axis2": {"name": "G_tilde_MHz", "min": 10.0, "max": 19.4, "points": 2},
    }

    def test_json_records(self, client):
        resp = client.post("/sweep", json=self.REQUEST)
        assert resp.status_code == 200
        body = resp.json()
        assert body["axes"] == ["Delta_a_MHz", "G_tilde_MHz"]
        assert len(body["records"]) == 6
        assert body["records"][0]["axis1"] == 60.0
        assert all(r["stable"] for r in body["records"])

    def test_csv_route(self, client):
        resp = client.post("/sweep/csv", json=self.REQUEST)
        assert resp.status_code == 200
        assert resp.headers["content-type"].startswith("text/csv")
        lines = resp.text.splitlines()
        assert lines[0] == (
            "# magkerr-sweep-csv v1 mode=effective axes=Delta_a_MHz,G_tilde_MHz"
        )
        assert len(lines) == 2 + 6

    def test_axis_needs_two_points(self, client):
        req = dict(self.REQUEST)
        req["axis1"] = {"name": "Delta_a_MHz", "min": 0.0, "max": 1.0, "points": 1}
        assert client.post("/sweep", json=req).status_code == 422

    def test_preset_run_returns_csv(self, client):
        resp = client.post("/presets/fig4/run", params={"jobs": 1, "seed": 0})
        assert resp.status_code == 200
        lines = resp.text.splitlines()
        assert lines[0] == "# magkerr-sweep-csv v1 mode=effective axes=T_e_K"
        assert len(lines) == 2 + 61


class TestCheck:
    def test_fast_suite_passes(self, client):
        resp = client.post("/check", json={"fast": True, "seed": 0})
        assert resp.status_code == 200
        body = resp.json()
        assert body["passed"] is True
        names = [c["name"] for c in body["checks"]]
        assert len(names) == len(set(names)) >= 5
        assert all(c["detail"] for c in body["checks"])


class TestErrorTaxonomy:
    def test_status_mapping_table(self):
        assert _ERROR_KINDS == (
            (ConfigError, 400, "config"),
            (SolverError, 422, "solver"),
            (StabilityError, 422, "stability"),
            (PhysicalityError, 422, "physicality"),
            (SqueezeDomainError, 422, "squeeze-domain"),
            (NumericalError, 422, "numerical"),
        )

    def test_config_errors_are_bad_requests(self, client):
        resp = client.post(
            "/point", json={"params": {"gamma_a_MHz": 18.6}}
        )
        assert resp.status_code == 400
        assert resp.json()["kind"] == "config"
