"""Tests for the Flask API."""

import pytest

from app import app


@pytest.fixture
def client():
    app.config["TESTING"] = True
    with app.test_client() as client:
        yield client


class TestEndpoints:
    """Tests for the JSON endpoints."""

    def test_groups(self, client):
        """Test the shipped groups are listed."""
        response = client.get("/api/groups")
        assert response.status_code == 200
        assert "S3" in response.get_json()["groups"]

    def test_reduce(self, client):
        """Test cyclic reduction over HTTP."""
        response = client.post("/api/reduce", json={"groups": "C2,C3", "word": "f0.1 f1.1 f0.1"})
        assert response.status_code == 200
        data = response.get_json()
        assert data["cyclic"] == "f1.1"
        assert data["conjugator"] == "f0.1"

    def test_translen(self, client):
        """Test both length computations agree on the star."""
        body = {"groups": "C2,C3", "word": "f0.1 f1.1", "shape": "star"}
        data = client.post("/api/translen", json=body).get_json()
        assert data["symbolic"] == data["path"] == 4

    def test_act(self, client):
        """Test applying an automorphism."""
        body = {"groups": "C2,C3", "automorphism": "pc(0,1.1)", "word": "f0.1"}
        data = client.post("/api/act", json=body).get_json()
        assert data["image"] == "f1.2 f0.1 f1.1"

    @pytest.mark.parametrize(
        "factors, result",
        [("C2:4", "FA"), ("C2:3", "NotFA"), ([{"flags": {"name": "G"}, "count": 4}], "Unknown")],
    )
    def test_fa_check(self, client, factors, result):
        """Test count strings and factor lists."""
        data = client.post("/api/fa-check", json={"factors": factors}).get_json()
        assert data["result"] == result
        assert data["explanation"].startswith("Aut(")


class TestErrors:
    """Tests for error responses."""

    def test_missing_field(self, client):
        """Test missing fields are reported."""
        response = client.post("/api/reduce", json={"groups": "C2,C3"})
        assert response.status_code == 400
        assert response.get_json()["error"] == "missing field 'word'"

    def test_non_object_body(self, client):
        """Test the body must be a JSON object."""
        response = client.post("/api/reduce", json=[1, 2])
        assert response.status_code == 400
        assert "JSON object" in response.get_json()["error"]

    def test_library_error(self, client):
        """Test library errors become 400 responses."""
        response = client.post("/api/fa-check", json={"factors": "C2:1"})
        assert response.status_code == 400
        assert "at least two factors" in response.get_json()["error"]

    def test_unknown_shape(self, client):
        """Test unknown shapes are client errors."""
        body = {"groups": "C2,C3", "word": "f0.1", "shape": "ring"}
        response = client.post("/api/translen", json=body)
        assert response.status_code == 400
        assert "unknown shape" in response.get_json()["error"]
