"""
Unit tests for MeshService.
Covers simplex quadrature, boundaries, Stokes and fundamental classes.
"""

import unittest

import numpy as np
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from chernloc.config.settings import Settings
from chernloc.layers.fields_forms.fields_forms_service import FieldsFormsService
from chernloc.layers.fields_forms.form import ChartMap, Form, SceneForm, dz_label, dzbar_label
from chernloc.layers.fields_forms.sampling import random_points, random_polynomial_form
from chernloc.layers.fields_forms.scalar_field import param, z
from chernloc.layers.geometry.atlas import Atlas, Chart
from chernloc.layers.geometry.chains import link_of_point
from chernloc.layers.mesh.mesh_service import MeshService
from chernloc.layers.mesh.simplices import Chain, Simplex, boundary, cube_cell
from chernloc.layers.mesh.triangulation import Triangulation
from chernloc.utils.errors import ChartMismatchError, DimensionMismatchError, NonCompactSceneError, QuadratureError

SEEDS = st.integers(min_value=0, max_value=2 ** 32 - 1)
SQUARE = (1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j)


def torus_triangulation():
    atlas = Atlas([Chart("T", 1, periods=(1 + 0j, 1j))])
    simplices = [
        Simplex.affine("T", [(0j,), (1 + 0j,), (1 + 1j,)]),
        Simplex.affine("T", [(0j,), (1 + 1j,), (1j,)]),
    ]
    return Triangulation(atlas, simplices)


def sphere_triangulation():
    atlas = Atlas(
        [Chart("U0", 1), Chart("U1", 1)],
        [ChartMap("U0", "U1", 1, (1 / z(1),)), ChartMap("U1", "U0", 1, (1 / z(1),))],
    )
    t1, t2 = param(1), param(2)
    simplices = []
    for k in range(4):
        first, second = SQUARE[k], SQUARE[(k + 1) % 4]
        simplices.append(Simplex.affine("U0", [(0j,), (first,), (second,)]))
        edge = sp.nsimplify(second, rational=True) + t2 * sp.nsimplify(first - second, rational=True)
        simplices.extend(cube_cell("U1", (t1 / edge,), 2, 1, f"U1:fan[{k}]"))
    return Triangulation(atlas, simplices)


class TestSimplexIntegration(unittest.TestCase):
    """
    Unit tests for integration over single simplices.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = MeshService(Settings())
        self.forms = FieldsFormsService()

    def test_dx_over_unit_interval(self):
        """The integral of dx over [0, 1] is 1."""
        dx = self.forms.parse_form("(1/2)*dz1 + (1/2)*dzbar1", "U", 1)
        segment = Simplex.affine("U", [(0j,), (1 + 0j,)])

        # Assertions
        self.assertAlmostEqual(self.service.integrate_over_simplex(dx, segment).value, 1.0, places=12)

    def test_dz_wedge_dzbar_over_triangle(self):
        """dz ^ dzbar over the triangle (0, 1, i) is -2i times its area."""
        form = self.forms.parse_form("dz1^dzbar1", "U", 1)
        triangle = Simplex.affine("U", [(0j,), (1 + 0j,), (1j,)])

        # Assertions
        self.assertAlmostEqual(self.service.integrate_over_simplex(form, triangle).value, -1j, places=12)

    def test_orientation_reversal(self):
        """Reversing a simplex negates the integral."""
        form = self.forms.parse_form("z1*dz1^dzbar1", "U", 1)
        triangle = Simplex.affine("U", [(0j,), (1 + 0j,), (1j,)])
        forward = self.service.integrate_over_simplex(form, triangle).value
        backward = self.service.integrate_over_simplex(form, triangle.reversed()).value

        # Assertions
        self.assertAlmostEqual(forward, -backward, places=12)

    def test_unit_circle(self):
        """dz/z around the unit circle is 2 pi i."""
        form = Form.covector("U", 1, dz_label(1), 1 / z(1))
        result = self.service.integrate_over_chain(form, link_of_point("U", (0j,), 1.0))

        # Assertions
        self.assertAlmostEqual(result.value, 2j * np.pi, places=9)
        self.assertLess(result.error, 1e-8)

    def test_threaded_sum_matches_serial(self):
        """Worker threads do not change the result."""
        form = Form.covector("U", 1, dz_label(1), 1 / z(1))
        link = link_of_point("U", (0j,), 1.0)
        serial = self.service.integrate_over_chain(form, link).value
        threaded = MeshService(Settings(workers=4)).integrate_over_chain(form, link).value

        # Assertions
        self.assertEqual(serial, threaded)

    def test_degree_mismatch(self):
        """A 1-form cannot be integrated over a 2-simplex."""
        triangle = Simplex.affine("U", [(0j,), (1 + 0j,), (1j,)])

        # Assertions
        with self.assertRaises(DimensionMismatchError):
            self.service.integrate_over_simplex(Form.covector("U", 1, dz_label(1)), triangle)

    def test_chart_mismatch_without_atlas(self):
        """Forms are not moved between charts without an atlas."""
        segment = Simplex.affine("V", [(0j,), (1 + 0j,)])

        # Assertions
        with self.assertRaises(ChartMismatchError):
            self.service.integrate_over_simplex(Form.covector("U", 1, dz_label(1)), segment)

    def test_budget_exhausted(self):
        """A tiny cell budget with an impossible tolerance raises QuadratureError."""
        service = MeshService(Settings(max_cells=4))
        form = Form.covector("U", 1, dz_label(1), sp.exp(20 * z(1)))
        segment = Simplex.affine("U", [(0j,), (1 + 0j,)])

        # Assertions
        with self.assertRaises(QuadratureError):
            service.integrate_over_simplex(form, segment, tol=1e-14)

    def test_subdivision_invariance(self):
        """Refining a triangle does not change the integral."""
        form = self.forms.parse_form("(z1**2 + conj(z1))*dz1^dzbar1", "U", 1)
        triangle = Simplex.affine("U", [(0j,), (2 + 0j,), (1 + 1j,)])
        refined = Triangulation(Atlas([Chart("U", 1)]), [triangle]).refine()
        whole = self.service.integrate_over_simplex(form, triangle).value
        pieces = self.service.integrate_over_chain(form, refined.chain()).value

        # Assertions
        self.assertEqual(len(refined.simplices), 4)
        self.assertAlmostEqual(whole, pieces, places=10)


class TestBoundary(unittest.TestCase):
    """
    Unit tests for boundaries and Stokes.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = MeshService(Settings())

    def test_boundary_of_interval(self):
        """The boundary of [0, 1] is [1] - [0]."""
        result = boundary(Chain.of([Simplex.affine("U", [(0j,), (1 + 0j,)])]))
        weights = {simplex.vertices[0][0]: weight for simplex, weight in result.simplices()}

        # Assertions
        self.assertEqual(weights, {1 + 0j: 1, 0j: -1})

    def test_boundary_of_boundary(self):
        """The boundary of the boundary of a 3-simplex is empty."""
        rng = np.random.default_rng(7)
        tetra = Simplex.affine("U", [tuple(p) for p in random_points(rng, 4, 2)])

        # Assertions
        self.assertTrue(boundary(boundary(Chain.of([tetra]))).is_empty())
        self.assertTrue(self.service.is_closed(boundary(Chain.of([tetra]))))

    def test_stokes_on_triangle(self):
        """Stokes holds for z dzbar on the triangle (0, 1, i)."""
        form = Form.covector("U", 1, dzbar_label(1), z(1))
        triangle = Chain.of([Simplex.affine("U", [(0j,), (1 + 0j,), (1j,)])])
        report = self.service.stokes_check(form, triangle)

        # Assertions
        self.assertTrue(report.passed)
        self.assertAlmostEqual(complex(*report.interior), -1j, places=10)

    @settings(derandomize=True, max_examples=30, deadline=None)
    @given(SEEDS)
    def test_stokes_random(self, seed):
        """Stokes holds for random polynomial forms on random simplices."""
        rng = np.random.default_rng(seed)
        dimension = int(rng.integers(1, 3))
        order = int(rng.integers(2, 2 * dimension + 1))
        form = random_polynomial_form(rng, "U", dimension, order - 1)
        simplex = Simplex.affine("U", [tuple(p) for p in random_points(rng, order + 1, dimension)])
        report = self.service.stokes_check(form, Chain.of([simplex]), tol=1e-7)

        # Assertions
        self.assertTrue(report.passed, msg=f"difference {report.difference}")


class TestFundamentalClass(unittest.TestCase):
    """
    Unit tests for compact triangulated models.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = MeshService(Settings())
        self.forms = FieldsFormsService()

    def test_torus_area(self):
        """The flat torus C / (Z + iZ) has area 1."""
        area = self.forms.parse_form("(i/2)*dz1^dzbar1", "T", 1)
        result = self.service.integrate_fundamental_class(area, torus_triangulation())

        # Assertions
        self.assertAlmostEqual(result.value, 1.0, places=10)

    def test_torus_refinement(self):
        """Refining the torus triangulation keeps it closed and keeps the area."""
        area = self.forms.parse_form("(i/2)*dz1^dzbar1", "T", 1)
        refined = self.service.refine(torus_triangulation())

        # Assertions
        self.assertTrue(refined.is_closed())
        self.assertAlmostEqual(self.service.integrate_fundamental_class(area, refined).value, 1.0, places=10)

    def test_open_triangulation_is_rejected(self):
        """A single triangle is not a compact model."""
        triangulation = Triangulation(Atlas([Chart("U", 1)]), [Simplex.affine("U", [(0j,), (1 + 0j,), (1j,)])])

        # Assertions
        with self.assertRaises(NonCompactSceneError):
            self.service.integrate_fundamental_class(Form.zero("U", 1, 2), triangulation)

    def test_riemann_sphere_is_closed(self):
        """The square-plus-fan triangulation of P^1 is closed and coherent; Fubini-Study volume is 1."""
        triangulation = sphere_triangulation()
        text = "(i/(2*pi))/(1 + z1*conj(z1))**2*dz1^dzbar1"
        fubini_study = {chart: self.forms.parse_form(text, chart, 1) for chart in ("U0", "U1")}
        scene_form = SceneForm.from_mapping(2, fubini_study)
        result = MeshService(Settings(), triangulation.atlas).integrate_fundamental_class(scene_form, triangulation)

        # Assertions
        self.assertTrue(triangulation.is_closed())
        self.assertAlmostEqual(result.value, 1.0, places=8)


if __name__ == "__main__":
    unittest.main()
