"""
Unit tests for the HTTP shell.
Covers health, scene listing and command runs through FastAPI's TestClient.
"""

import unittest

from fastapi.testclient import TestClient

from chernloc.app import create_app
from chernloc.config.settings import Settings


class TestApp(unittest.TestCase):
    """
    Unit tests for the web shell routes.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.client = TestClient(create_app(Settings()))

    def test_health(self):
        """GET /health answers ok."""
        response = self.client.get("/health")

        # Assertions
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json(), "ok")

    def test_scenes(self):
        """GET /scenes lists the packaged scenes."""
        response = self.client.get("/scenes")
        names = {entry["name"] for entry in response.json()["scenes"]}

        # Assertions
        self.assertEqual(response.status_code, 200)
        self.assertIn("tp1_vector_field", names)

    def test_run_camacho_sad(self):
        """POST /run returns the report JSON."""
        response = self.client.post("/run", json={"scene": "linear_foliation", "command": "residue camacho-sad"})
        report = response.json()

        # Assertions
        self.assertEqual(response.status_code, 200)
        self.assertEqual(report["schema"], 1)
        self.assertTrue(report["passed"])
        self.assertAlmostEqual(report["results"][0]["value"][0], 1.5, delta=1e-8)

    def test_run_with_params(self):
        """Parameters override the scene's."""
        response = self.client.post(
            "/run", json={"scene": "linear_foliation", "command": "residue camacho-sad", "params": {"lam": 1, "mu": 4}}
        )

        # Assertions
        self.assertEqual(response.status_code, 200)
        self.assertAlmostEqual(response.json()["results"][0]["value"][0], 0.25, delta=1e-8)

    def test_input_errors_are_400(self):
        """Unknown scenes, unknown commands and paths are rejected."""
        unknown_scene = self.client.post("/run", json={"scene": "nowhere", "command": "chern"})
        unknown_command = self.client.post("/run", json={"scene": "p1_od", "command": "chern-simons"})
        path = self.client.post("/run", json={"scene": "../p1_od", "command": "chern"})

        # Assertions
        self.assertEqual(unknown_scene.status_code, 400)
        self.assertEqual(unknown_command.status_code, 400)
        self.assertEqual(path.status_code, 400)


if __name__ == "__main__":
    unittest.main()
