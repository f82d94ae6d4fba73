import pytest
from fastapi.testclient import TestClient

from app.main import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


def test_root(client):
    assert client.get("/").status_code == 200


def test_upper_bound(client):
    response = client.get("/bounds/upper", params={"mu": 3, "c": 1.0, "n": 1024})
    assert response.status_code == 200
    assert response.json()["leading_term_value"] == pytest.approx(14470.42, rel=1e-5)


def test_upper_bound_rejects_mu_two(client):
    response = client.get("/bounds/upper", params={"mu": 2, "n": 1024})
    assert response.status_code == 422
    assert "upper-2plus1" in response.json()["detail"]


def test_optimal_c(client):
    body = client.get("/bounds/optimal-c").json()
    assert body["c"] == pytest.approx(1.302776, abs=1e-5)


def test_unknown_bound_kind(client):
    assert client.get("/bounds/sideways").status_code == 422


def test_chain_solve(client):
    response = client.post("/chain/solve", json={"p_m": 0.0, "p_d": 0.5, "p_c": 0.5, "p_r": 0.0})
    assert response.status_code == 200
    times = response.json()["times"]
    assert times["E_T1"] == pytest.approx(4.0)
    assert times["E_T2"] == pytest.approx(2.0)


def test_chain_solve_with_simulation(client):
    response = client.post(
        "/chain/solve", json={"p_m": 0.05, "p_d": 0.2, "p_c": 0.3, "p_r": 0.1, "episodes": 5000, "seed": 3}
    )
    assert response.status_code == 200
    assert len(response.json()["simulation"]) == 2


def test_chain_solve_errors(client):
    assert client.post("/chain/solve", json={"p_m": 0, "p_d": 0, "p_c": 0, "p_r": 0}).status_code == 400
    assert client.post("/chain/solve", json={"p_m": 0.9, "p_d": 0.9, "p_c": 0, "p_r": 0}).status_code == 422


def test_builtin_specs(client):
    body = client.get("/experiments/builtin").json()
    names = [entry["name"] for entry in body]
    assert names == ["fig1", "fig2", "fig3", "fig4", "fig5", "table1"]
    table1 = body[names.index("table1")]
    assert table1["points"] == 88
    assert client.get("/experiments/builtin/fig9").status_code == 404


def test_run_and_history(client):
    payload = {"algo": "mu-plus-one-ga", "n": 16, "mu": 2, "c": 1.0, "runs": 4, "seed": 5}
    first = client.post("/experiments/run", json=payload, params={"record": True})
    assert first.status_code == 200
    row = first.json()
    assert row["n"] == 16 and row["runs"] == 4
    again = client.post("/experiments/run", json=payload)
    assert again.json() == row

    history = client.get("/history", params={"name": "run"}).json()
    assert history
    record_id = history[0]["id"]
    record = client.get(f"/history/{record_id}").json()
    assert record["rows"][0]["mean"] == pytest.approx(row["mean"])
    csv_text = client.get(f"/history/{record_id}/csv").text
    assert csv_text.startswith("name,algorithm,n,mu,c")

    assert client.delete(f"/history/{record_id}").status_code == 200
    assert client.get(f"/history/{record_id}").status_code == 404
    assert client.delete(f"/history/{record_id}").status_code == 404


def test_run_with_invalid_configuration(client):
    response = client.post("/experiments/run", json={"algo": "mu-plus-one-ga", "n": 2, "c": 3.0, "runs": 1})
    assert response.status_code == 422
