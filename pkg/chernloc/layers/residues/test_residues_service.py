"""
Unit tests for ResiduesService.
Covers the Bochner-Martinelli kernel and indices, Camacho-Sad residues and the
residue-theorem check on P^1.
"""

import unittest

import numpy as np
import sympy as sp

from chernloc.config.settings import Settings
from chernloc.layers.bundles.bundle import BundleData, SectionTuple, connection_from_forms
from chernloc.layers.bundles.singular_locus import LocatedPoint
from chernloc.layers.chernweil.chernweil_service import ChernWeilService
from chernloc.layers.fields_forms.form import ChartMap, Form, TangentVector, dz_label, evaluate, exterior_derivative
from chernloc.layers.fields_forms.sampling import random_points, sampled_norm
from chernloc.layers.fields_forms.scalar_field import param, z, zbar
from chernloc.layers.geometry.atlas import Atlas, Chart
from chernloc.layers.geometry.chains import link_of_point, sphere_chain
from chernloc.layers.geometry.covering import Covering, SingularDisk
from chernloc.layers.mesh.simplices import Simplex, cube_cell
from chernloc.layers.mesh.triangulation import Triangulation
from chernloc.layers.residues.foliation import FoliationGerm
from chernloc.layers.residues.kernel import bochner_martinelli_kernel
from chernloc.layers.residues.residues_service import ResiduesService, nearest_integer
from chernloc.utils.errors import (
    DimensionMismatchError,
    HoneycombError,
    InvariantViolation,
    PoleError,
    ResidualTooLargeError,
)

SQUARE = (1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j)
RADII = (0.3, 0.95, 0.7)


def sphere_atlas():
    return Atlas(
        [Chart("U0", 1), Chart("U1", 1)],
        [ChartMap("U0", "U1", 1, (1 / z(1),)), ChartMap("U1", "U0", 1, (1 / z(1),))],
    )


def sphere_triangulation(atlas):
    t1, t2 = param(1), param(2)
    simplices = []
    for k in range(4):
        first, second = SQUARE[k], SQUARE[(k + 1) % 4]
        simplices.append(Simplex.affine("U0", [(0j,), (first,), (second,)]))
        edge = sp.nsimplify(second, rational=True) + t2 * sp.nsimplify(first - second, rational=True)
        simplices.extend(cube_cell("U1", (t1 / edge,), 2, 1, f"U1:fan[{k}]"))
    return Triangulation(atlas, simplices)


def line_bundle(atlas, g):
    """Line bundle with e1 = e0 g(z) and e0 = e1 g(w)."""
    matrix = sp.ImmutableMatrix([[g]])
    return BundleData(1, atlas, (("U0", "U1", matrix), ("U1", "U0", matrix)))


def smooth_connection(bundle, d):
    theta = Form.covector("U0", 1, dz_label(1), -d * zbar(1) / (1 + z(1) * zbar(1)))
    return connection_from_forms(bundle, {"U0": [[theta]]})


class TestBochnerMartinelli(unittest.TestCase):
    """
    Unit tests for the Bochner-Martinelli kernel.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.rng = np.random.default_rng(3)

    def test_one_variable_kernel(self):
        """beta_1 = (-1/2 pi i) dz/z."""
        expected = Form.covector("C^m", 1, dz_label(1), -1 / (2 * sp.pi * sp.I * z(1)))
        points = random_points(self.rng, 20, 1) + 0.1

        # Assertions
        self.assertLess(sampled_norm(bochner_martinelli_kernel(1) - expected, points, self.rng), 1e-12)

    def test_kernel_has_pole_at_origin(self):
        """Evaluating beta_1 at 0 is a pole."""
        # Assertions
        with self.assertRaises(PoleError):
            evaluate(bochner_martinelli_kernel(1), np.zeros((1, 1)), [TangentVector.partial_x(1, 1)])

    def test_kernel_is_closed(self):
        """d beta_2 vanishes away from the origin."""
        points = random_points(self.rng, 20, 2) + 0.2
        beta = bochner_martinelli_kernel(2)

        # Assertions
        self.assertEqual(beta.degree, 3)
        self.assertLess(sampled_norm(exterior_derivative(beta), points, self.rng), 1e-9)

    def test_kernel_needs_positive_dimension(self):
        """m = 0 is rejected."""
        # Assertions
        with self.assertRaises(ValueError):
            bochner_martinelli_kernel(0)


class TestIndex(unittest.TestCase):
    """
    Unit tests for Bochner-Martinelli indices.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = ResiduesService(Settings())
        self.circle = link_of_point("U", (0j,), 1.0)

    def test_powers_of_z(self):
        """The index of z^k at 0 is k."""
        for k in (1, 2, 3):
            # Assertions
            self.assertEqual(self.service.bm_index([z(1) ** k], self.circle), k)

    def test_nonvanishing_map_has_index_zero(self):
        """f = 1 has index 0."""
        # Assertions
        self.assertEqual(self.service.bm_index([sp.Integer(1)], self.circle), 0)

    def test_identity_on_three_sphere(self):
        """The identity of C^2 has index 1 on S^3."""
        sphere = sphere_chain("U", (0j, 0j), 1.0, 2)

        # Assertions
        self.assertEqual(self.service.bm_index([z(1), z(2)], sphere, tol=1e-6), 1)

    def test_radius_invariance(self):
        """The index does not depend on the radius while no zero crosses the sphere."""
        f = [z(1) ** 2 * (z(1) - 3)]
        indices = {self.service.bm_index(f, link_of_point("U", (0j,), r)) for r in (0.5, 1.0, 2.0)}

        # Assertions
        self.assertEqual(indices, {2})

    def test_multiplicativity(self):
        """index(f g) = index(f) + index(g)."""
        f = z(1) * (z(1) - sp.Rational(1, 5))
        g = z(1) ** 2

        # Assertions
        self.assertEqual(
            self.service.bm_index([f * g], self.circle),
            self.service.bm_index([f], self.circle) + self.service.bm_index([g], self.circle),
        )

    def test_chain_dimension_must_match(self):
        """A map into C^1 is integrated over circles."""
        sphere = sphere_chain("U", (0j, 0j), 1.0, 2)

        # Assertions
        with self.assertRaises(DimensionMismatchError):
            self.service.bm_integral([z(1)], sphere)

    def test_non_integer_is_rejected(self):
        """Values farther than 1e-3 from an integer are errors."""
        # Assertions
        self.assertEqual(nearest_integer(2.0004 + 0j), 2)
        with self.assertRaises(ResidualTooLargeError):
            nearest_integer(0.5 + 0j)


class TestCamachoSad(unittest.TestCase):
    """
    Unit tests for Camacho-Sad residues.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = ResiduesService(Settings())
        self.link = link_of_point("Y", (0j,), 0.5)

    def test_linear_germ(self):
        """a = 3, b = 2y gives 3/2."""
        germ = FoliationGerm(sp.Integer(3), 2 * z(2))
        value = self.service.camacho_sad_residue(germ, self.link)

        # Assertions
        self.assertAlmostEqual(value.real, 1.5, places=8)
        self.assertAlmostEqual(value.imag, 0.0, places=8)

    def test_germ_with_second_pole_outside_link(self):
        """a = 1, b = y(1 + y) on the link of radius 1/2 gives 1."""
        germ = FoliationGerm(sp.Integer(1), z(2) * (1 + z(2)))

        # Assertions
        self.assertAlmostEqual(abs(self.service.camacho_sad_residue(germ, self.link) - 1), 0.0, places=8)

    def test_holomorphic_ratio_gives_zero(self):
        """a(0, y)/b(0, y) holomorphic across 0 gives 0."""
        germ = FoliationGerm(z(2) + z(1), 1 + z(2) ** 2)

        # Assertions
        self.assertAlmostEqual(abs(self.service.camacho_sad_residue(germ, self.link)), 0.0, places=8)

    def test_link_radius_invariance(self):
        """The residue does not change while the link stays inside |y| < 1."""
        germ = FoliationGerm(sp.Integer(1), z(2) * (1 + z(2)))
        values = [self.service.camacho_sad_residue(germ, link_of_point("Y", (0j,), r)) for r in (0.3, 0.6, 0.9)]

        # Assertions
        for value in values:
            self.assertAlmostEqual(abs(value - values[0]), 0.0, places=8)

    def test_bott_residue_matches_direct_formula(self):
        """-int bott(nabla0, 0) over the link equals the direct residue."""
        germ = FoliationGerm(3 + z(1), 2 * z(2) + z(1) * z(2) ** 2)

        # Assertions
        self.assertAlmostEqual(
            abs(self.service.camacho_sad_via_bott(germ, self.link) - self.service.camacho_sad_residue(germ, self.link)),
            0.0,
            places=8,
        )

    def test_induced_connection_is_flat(self):
        """c^1 of the induced normal connection vanishes."""
        germ = FoliationGerm(sp.Integer(3), 2 * z(2))
        connection = self.service.induced_connection(germ)

        # Assertions
        self.assertTrue(ChernWeilService(Settings()).chern_form(connection, 1).on("Y").is_zero())

    def test_bare_coordinate_coefficients(self):
        """a = h, b = y: a vanishes on the line, so the residue is 0."""
        germ = FoliationGerm(z(1), z(2))

        # Assertions
        self.assertEqual(germ.ratio(), 0)
        self.assertAlmostEqual(abs(self.service.camacho_sad_residue(germ, self.link)), 0.0, places=8)

    def test_invalid_germs(self):
        """Non-holomorphic coefficients and b vanishing on the line are rejected."""
        # Assertions
        with self.assertRaises(InvariantViolation):
            FoliationGerm(zbar(2), z(2))
        with self.assertRaises(InvariantViolation):
            FoliationGerm(sp.Integer(1), z(1))


class TestResidueTheorem(unittest.TestCase):
    """
    Unit tests for the residue theorem on P^1.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = ResiduesService(Settings())
        self.atlas = sphere_atlas()
        self.triangulation = sphere_triangulation(self.atlas)

    def test_tangent_bundle(self):
        """s = z d/dz on TP^1: residues 1 at 0 and at infinity, global 2."""
        bundle = line_bundle(self.atlas, -z(1) ** 2)
        section = SectionTuple(bundle, (("U0", sp.ImmutableMatrix([[z(1)]])),))
        report = self.service.residue_theorem_check(section, smooth_connection(bundle, 2), self.triangulation, 1, RADII, 1e-8)

        # Assertions
        self.assertEqual(sorted(p.chart for p in report.points), ["U0", "U1"])
        for point in report.points:
            self.assertAlmostEqual(point.local[0], 1.0, places=6)
        self.assertAlmostEqual(report.global_value[0], 2.0, places=6)
        self.assertLess(report.discrepancy, 1e-6)
        self.assertTrue(report.integral_check)

    def test_cubic_section_of_o3(self):
        """s = z^3 e0 on O(3): one residue 3 at 0, global 3."""
        bundle = line_bundle(self.atlas, z(1) ** 3)
        section = SectionTuple(bundle, (("U0", sp.ImmutableMatrix([[z(1) ** 3]])),))
        report = self.service.residue_theorem_check(section, smooth_connection(bundle, 3), self.triangulation, 1, RADII, 1e-8)

        # Assertions
        self.assertEqual(len(report.points), 1)
        self.assertAlmostEqual(report.points[0].local[0], 3.0, places=6)
        self.assertLess(report.discrepancy, 1e-6)

    def test_trivial_bundle_without_zeros(self):
        """A nonvanishing section of O(0) has no residues and global 0."""
        bundle = line_bundle(self.atlas, sp.Integer(1))
        section = SectionTuple(bundle, (("U0", sp.ImmutableMatrix([[1]])),))
        report = self.service.residue_theorem_check(section, smooth_connection(bundle, 0), self.triangulation, 1, RADII)

        # Assertions
        self.assertEqual(report.points, [])
        self.assertAlmostEqual(abs(complex(*report.global_value)), 0.0, places=9)

    def test_close_singular_points_are_rejected(self):
        """Two zeros closer than two cell radii cannot get separate cells."""
        bundle = line_bundle(self.atlas, z(1) ** 2)
        section = SectionTuple(bundle, (("U0", sp.ImmutableMatrix([[z(1) * (z(1) - sp.Rational(1, 2))]])),))

        # Assertions
        with self.assertRaises(HoneycombError):
            self.service.residue_theorem_check(section, smooth_connection(bundle, 2), self.triangulation, 1, RADII)

    def test_differential_residue_matches_index(self):
        """The local term at a zero of s = z d/dz equals its Bochner-Martinelli index."""
        bundle = line_bundle(self.atlas, -z(1) ** 2)
        section = SectionTuple(bundle, (("U0", sp.ImmutableMatrix([[z(1)]])),))
        point = LocatedPoint("U0", (0j,), 0.0)
        covering = Covering(self.atlas, (SingularDisk("U0", (0j,), 0.3, 0.95), SingularDisk("U1", (0j,), 0.3, 0.95)))
        local = self.service.differential_residue(section, smooth_connection(bundle, 2), 1, point, covering, 0.7)

        # Assertions
        self.assertAlmostEqual(local.value.real, self.service.section_index(section, point, 0.7), places=6)


if __name__ == "__main__":
    unittest.main()
