"""
Unit tests for SceneService.
Covers loading of the packaged scenes, parameter overrides, schema and reference
errors and the load-time sampled checks.
"""

import copy
import json
import tempfile
import unittest
from pathlib import Path

import sympy as sp

from chernloc.config.settings import Settings
from chernloc.layers.fields_forms.scalar_field import z
from chernloc.layers.scene.scene_service import SceneService
from chernloc.utils.errors import InvariantViolation, SceneError

PACKAGED = {"p1_od", "tp1_vector_field", "linear_foliation", "bloom_herrera", "torus_area"}


def raw_scene(service: SceneService, name: str) -> dict:
    with open(service.resolve(name), "r", encoding="utf-8") as f:
        return json.load(f)


class TestLoadScene(unittest.TestCase):
    """
    Unit tests for loading packaged scenes.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = SceneService(Settings())

    def test_p1_od_loads(self):
        """p1_od has two charts and the transition z^3."""
        scene = self.service.load_scene("p1_od")
        g = scene.bundle.matrix("U0", "U1")

        # Assertions
        self.assertEqual(len(scene.atlas.charts), 2)
        self.assertEqual(sp.simplify(g[0, 0] - z(1) ** 3), 0)
        self.assertEqual(scene.residue_radii(), (0.3, 0.95, 0.7))

    def test_parameter_override(self):
        """d = -2 replaces the file's d = 3 everywhere."""
        scene = self.service.load_scene("p1_od", {"d": -2})
        g = scene.bundle.matrix("U0", "U1")

        # Assertions
        self.assertEqual(scene.params["d"], -2)
        self.assertEqual(sp.simplify(g[0, 0] - z(1) ** -2), 0)

    def test_path_or_name(self):
        """A file path and a bare name load the same scene."""
        by_name = self.service.load_scene("linear_foliation")
        by_path = self.service.load_scene(str(self.service.resolve("linear_foliation.json")))

        # Assertions
        self.assertEqual(by_name.name, by_path.name)
        self.assertEqual(by_name.foliation.link_radius, by_path.foliation.link_radius)

    def test_named_sections(self):
        """Unnamed lookups give the first entry; unknown names are scene errors."""
        scene = self.service.load_scene("tp1_vector_field")

        # Assertions
        self.assertIs(scene.connection(), scene.connections["fubini_study"])
        with self.assertRaisesRegex(SceneError, "no connection"):
            scene.connection("flat")
        with self.assertRaisesRegex(SceneError, "foliation required"):
            scene.require("foliation")

    def test_bloom_herrera_needs_no_bundle(self):
        """The obstruction scene carries only its map and form."""
        scene = self.service.load_scene("bloom_herrera")

        # Assertions
        self.assertIsNone(scene.bundle)
        self.assertEqual(scene.extendability.max_degree, 20)
        self.assertEqual(list(scene.extendability.map), ["z1**5", "z1**6 + z1**7"])

    def test_list_scenes(self):
        """Every packaged scene is listed with its file."""
        listed = self.service.list_scenes()

        # Assertions
        self.assertEqual({entry["name"] for entry in listed}, PACKAGED)
        self.assertTrue(all(entry["file"].endswith(".json") for entry in listed))


class TestSceneErrors(unittest.TestCase):
    """
    Unit tests for rejected scene files.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = SceneService(Settings())
        self.data = raw_scene(self.service, "p1_od")

    def test_missing_file(self):
        """Unknown names are not found."""
        # Assertions
        with self.assertRaisesRegex(FileNotFoundError, "Scene file not found"):
            self.service.load_scene("no_such_scene")

    def test_broken_cocycle_is_named(self):
        """Transitions z^d and 2 w^d violate the cocycle condition at a sample point."""
        data = copy.deepcopy(self.data)
        data["bundle"]["transitions"][1]["matrix"] = [["2*z1**d"]]

        # Assertions
        with self.assertRaises(InvariantViolation) as caught:
            self.service.build(self.service.parse(data))
        self.assertIn("cocycle", caught.exception.invariant)
        self.assertIsNotNone(caught.exception.point)

    def test_unchecked_build(self):
        """check=False builds the broken scene without sampling it."""
        data = copy.deepcopy(self.data)
        data["bundle"]["transitions"][1]["matrix"] = [["2*z1**d"]]
        scene = self.service.build(self.service.parse(data), check=False)

        # Assertions
        self.assertEqual(scene.name, "p1_od")

    def test_schema_error_names_location(self):
        """A non-integer rank is reported with its location."""
        data = copy.deepcopy(self.data)
        data["bundle"]["rank"] = "one"

        # Assertions
        with self.assertRaisesRegex(SceneError, "bundle.rank"):
            self.service.parse(data, "p1_od.json")

    def test_unknown_chart_reference(self):
        """A covering disk in an undeclared chart is a scene error."""
        data = copy.deepcopy(self.data)
        data["covering"]["disks"][0]["chart"] = "U7"

        # Assertions
        with self.assertRaisesRegex(SceneError, "U7"):
            self.service.build(self.service.parse(data))

    def test_missing_section(self):
        """A scene without a triangulation says so when one is required."""
        data = copy.deepcopy(self.data)
        del data["triangulation"]
        scene = self.service.build(self.service.parse(data))

        # Assertions
        self.assertIsNone(scene.triangulation)
        with self.assertRaisesRegex(SceneError, "triangulation required"):
            scene.require("triangulation")

    def test_invalid_json(self):
        """Truncated files are scene errors, not JSON tracebacks."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "broken.json"
            path.write_text("{\"name\": ", encoding="utf-8")

            # Assertions
            with self.assertRaisesRegex(SceneError, "invalid JSON"):
                self.service.read(path)

    def test_unreadable_scenes_are_skipped(self):
        """list_scenes skips files that do not validate."""
        with tempfile.TemporaryDirectory() as tmp:
            Path(tmp, "good.json").write_text(json.dumps(self.data), encoding="utf-8")
            Path(tmp, "bad.json").write_text("[]", encoding="utf-8")
            listed = SceneService(Settings(), tmp).list_scenes()

        # Assertions
        self.assertEqual([entry["file"] for entry in listed], ["good.json"])


if __name__ == "__main__":
    unittest.main()
