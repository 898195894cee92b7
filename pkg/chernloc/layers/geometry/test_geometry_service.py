"""
Unit tests for GeometryService.
Covers atlases, partitions of unity, honeycombs, links and adapted sets.
"""

import unittest

import numpy as np

from chernloc.config.settings import Settings
from chernloc.layers.fields_forms.fields_forms_service import FieldsFormsService
from chernloc.layers.fields_forms.form import ChartMap, Form, TangentVector, dz_label, evaluate
from chernloc.layers.fields_forms.scalar_field import conj, z
from chernloc.layers.geometry.atlas import Atlas, Chart
from chernloc.layers.geometry.covering import Covering, SingularDisk
from chernloc.layers.geometry.geometry_service import GeometryService
from chernloc.layers.geometry.regions import Region
from chernloc.layers.mesh.quadrature import AdaptiveQuadrature
from chernloc.layers.mesh.simplices import boundary
from chernloc.models.data_models import RegionKind
from chernloc.utils.errors import DegenerateOverlapError, HoneycombError, InvariantViolation


def plane_atlas():
    return Atlas([Chart("U", 1)])


def sphere_atlas():
    return Atlas(
        [Chart("U0", 1), Chart("U1", 1)],
        [ChartMap("U0", "U1", 1, (1 / z(1),)), ChartMap("U1", "U0", 1, (1 / z(1),))],
    )


def integrate_chain(form, chain, tol=1e-10):
    quadrature = AdaptiveQuadrature()
    return sum(weight * quadrature.integrate_form(form, simplex, tol).value for simplex, weight in chain.simplices())


class TestAtlas(unittest.TestCase):
    """
    Unit tests for sampled transition checks.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = GeometryService(Settings())

    def test_sphere_transitions_pass(self):
        """The Riemann sphere transitions are holomorphic, inverse and satisfy the cocycle."""
        residual = self.service.check_atlas(sphere_atlas())

        # Assertions
        self.assertLess(residual, 1e-9)

    def test_wrong_inverse_is_reported(self):
        """A transition pair that does not invert violates the cocycle."""
        atlas = Atlas(
            [Chart("U0", 1), Chart("U1", 1)],
            [ChartMap("U0", "U1", 1, (1 / z(1),)), ChartMap("U1", "U0", 1, (2 / z(1),))],
        )

        # Assertions
        with self.assertRaises(InvariantViolation):
            self.service.check_atlas(atlas)

    def test_antiholomorphic_transition_is_reported(self):
        """conj(z) is not an admissible transition."""
        atlas = Atlas([Chart("U0", 1), Chart("U1", 1)], [ChartMap("U0", "U1", 1, (conj(z(1)),))])

        # Assertions
        with self.assertRaises(InvariantViolation):
            self.service.check_atlas(atlas)


class TestPartitionOfUnity(unittest.TestCase):
    """
    Unit tests for partitions of unity on the annulus 1 < |z| < 2.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = GeometryService(Settings())
        self.covering = Covering(plane_atlas(), (SingularDisk("U", (0j,), 1.0, 2.0),))
        self.partition = self.service.build_partition_of_unity(self.covering)

    def test_values_inside_and_outside(self):
        """rho1 is 1 on the inner disk and rho0 is 1 outside the outer disk."""
        inside = self.partition.evaluate_rho1(0, "U", np.array([[0.5]]))
        outside = self.partition.evaluate_rho0("U", np.array([[3.0]]))
        middle = self.partition.evaluate_rho1(0, "U", np.array([[1.5j]]))

        # Assertions
        self.assertAlmostEqual(float(inside[0]), 1.0, places=12)
        self.assertAlmostEqual(float(outside[0]), 1.0, places=12)
        self.assertTrue(0.0 < middle[0] < 1.0)

    def test_sum_is_one(self):
        """rho0 + rho1 = 1 at 100 sample points."""
        rng = np.random.default_rng(3)
        points = Region("U", RegionKind.BOX, (0j,), 0.0, 3.0).sample(rng, 100)

        # Assertions
        self.assertLess(self.partition.sum_residual("U", points), 1e-12)

    def test_differential_vanishes_off_the_overlap(self):
        """d rho1 is zero just inside the inner circle and just outside the outer circle."""
        d_rho = self.partition.d_rho1(0, "U", 1)
        points = np.array([[0.9], [2.1], [0.9j], [-2.1j]])
        x_values = evaluate(d_rho, points, [TangentVector.partial_x(1, 1)])
        y_values = evaluate(d_rho, points, [TangentVector.partial_y(1, 1)])

        # Assertions
        self.assertLess(float(np.max(np.abs(x_values))), 1e-12)
        self.assertLess(float(np.max(np.abs(y_values))), 1e-12)

    def test_derivatives_match_finite_differences(self):
        """Symbolic Wirtinger derivatives of rho1 agree with central differences on the annulus."""
        rng = np.random.default_rng(5)
        points = Region("U", RegionKind.ANNULUS, (0j,), 1.2, 1.8).sample(rng, 10)
        residual = FieldsFormsService().derivative_residual(self.partition.rho1_on(0, "U"), points)

        # Assertions
        self.assertLess(residual, 1e-5)

    def test_sharpness_changes_the_partition(self):
        """Different bump profiles agree off the overlap and differ on it."""
        from chernloc.layers.geometry.partition import BumpProfile

        sharper = self.service.build_partition_of_unity(self.covering, BumpProfile(sharpness=3))
        on_overlap = np.array([[1.4]])

        # Assertions
        self.assertNotAlmostEqual(
            float(sharper.evaluate_rho1(0, "U", on_overlap)[0]),
            float(self.partition.evaluate_rho1(0, "U", on_overlap)[0]),
            places=6,
        )
        self.assertAlmostEqual(float(sharper.evaluate_rho1(0, "U", np.array([[0.3]]))[0]), 1.0, places=12)

    def test_extends_to_the_other_chart(self):
        """On the Riemann sphere rho1 of a disk in U0 vanishes at infinity (w = 0 in U1)."""
        covering = Covering(sphere_atlas(), (SingularDisk("U0", (0j,), 0.25, 1.0),))
        partition = self.service.build_partition_of_unity(covering)
        at_infinity = partition.evaluate_rho0("U1", np.array([[0.0]]))
        near_zero = partition.evaluate_rho1(0, "U1", np.array([[5.0]]))

        # Assertions
        self.assertAlmostEqual(float(at_infinity[0]), 1.0, places=12)
        self.assertAlmostEqual(float(near_zero[0]), 1.0, places=12)

    def test_degenerate_overlap(self):
        """inner >= outer is rejected."""
        # Assertions
        with self.assertRaises(DegenerateOverlapError):
            SingularDisk("U", (0j,), 2.0, 1.0)

    def test_overlapping_disks_are_rejected(self):
        """Two V1 disks that meet do not form a covering."""
        covering = Covering(plane_atlas(), (SingularDisk("U", (0j,), 0.5, 1.0), SingularDisk("U", (1.5 + 0j,), 0.5, 1.0)))

        # Assertions
        with self.assertRaises(DegenerateOverlapError):
            self.service.build_partition_of_unity(covering)


class TestHoneycomb(unittest.TestCase):
    """
    Unit tests for honeycomb systems.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = GeometryService(Settings())
        self.covering = Covering(
            plane_atlas(), (SingularDisk("U", (0j,), 0.2, 1.0), SingularDisk("U", (3 + 0j,), 0.2, 1.0))
        )

    def test_overlapping_marks(self):
        """Marks at 0 and 1 with radius 1 overlap."""
        # Assertions
        with self.assertRaises(HoneycombError):
            self.service.honeycomb_from_marks(self.covering, [("U", (0j,)), ("U", (1 + 0j,))], 1.0)

    def test_disk_escaping_v1(self):
        """A honeycomb disk larger than its covering disk is rejected."""
        # Assertions
        with self.assertRaises(HoneycombError):
            self.service.honeycomb_from_marks(self.covering, [("U", (0j,)), ("U", (3 + 0j,))], 1.2)

    def test_disk_smaller_than_the_removed_disk(self):
        """R0 must stay inside V0, so the honeycomb disk has to swallow the inner disk."""
        # Assertions
        with self.assertRaises(HoneycombError):
            self.service.honeycomb_from_marks(self.covering, [("U", (0j,)), ("U", (3 + 0j,))], 0.1)

    def test_cells_are_exclusive(self):
        """Every sample lies in exactly one open cell."""
        honeycomb = self.service.honeycomb_from_marks(self.covering, [("U", (0j,)), ("U", (3 + 0j,))], 0.5)
        rng = np.random.default_rng(11)
        points = Region("U", RegionKind.BOX, (1.5 + 0j,), 0.0, 3.0).sample(rng, 1000)
        cells = honeycomb.cell_of("U", points)
        census = self.service.cell_census(honeycomb, "U", points)

        # Assertions
        self.assertTrue(np.all(cells >= 0))
        self.assertEqual(int(census.sum()), 1000)
        self.assertEqual(honeycomb.cell_of("U", np.array([[0.1], [3.1], [1.5]])).tolist(), [1, 2, 0])

    def test_interface_bounds_the_singular_cell(self):
        """The interface circle integrates dz/z to 2 pi i around its mark."""
        honeycomb = self.service.honeycomb_from_marks(self.covering, [("U", (0j,)), ("U", (3 + 0j,))], 0.5)
        dz_over_z = Form.covector("U", 1, dz_label(1), 1 / z(1))

        # Assertions
        self.assertAlmostEqual(integrate_chain(dz_over_z, honeycomb.interface(0)), 2j * np.pi, places=8)

    def test_with_radius(self):
        """Changing the radius keeps the marks."""
        honeycomb = self.service.honeycomb_from_marks(self.covering, [("U", (0j,)), ("U", (3 + 0j,))], 0.5)
        wider = honeycomb.with_radius(0.7)

        # Assertions
        self.assertEqual([d.center for d in wider.disks], [d.center for d in honeycomb.disks])
        self.assertEqual({d.radius for d in wider.disks}, {0.7})


class TestChains(unittest.TestCase):
    """
    Unit tests for links, disks and spheres.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = GeometryService(Settings())
        self.dz_over_z = Form.covector("U", 1, dz_label(1), 1 / z(1))

    def test_link_winds_once(self):
        """The integral of dz/z over the unit link is 2 pi i."""
        link = self.service.link_of_point("U", (0j,), 1.0)

        # Assertions
        self.assertAlmostEqual(integrate_chain(self.dz_over_z, link), 2j * np.pi, places=8)

    def test_link_is_closed(self):
        """The boundary of a link is the empty chain."""
        link = self.service.link_of_point("U", (0.5 + 0j,), 0.25)

        # Assertions
        self.assertTrue(boundary(link).is_empty())

    def test_reversal_negates(self):
        """Reversing the link negates the integral."""
        link = self.service.link_of_point("U", (0j,), 1.0)

        # Assertions
        self.assertAlmostEqual(integrate_chain(self.dz_over_z, -link), -2j * np.pi, places=8)

    def test_too_few_segments(self):
        """Links need at least eight segments."""
        # Assertions
        with self.assertRaises(ValueError):
            self.service.link_of_point("U", (0j,), 1.0, segments=4)

    def test_disk_area(self):
        """(i/2) dz ^ dzbar integrates to the area of the disk."""
        area_form = FieldsFormsService().parse_form("(i/2)*dz1^dzbar1", "U", 1)
        disk = self.service.disk_chain("U", (0j,), 1.0)

        # Assertions
        self.assertAlmostEqual(integrate_chain(area_form, disk), np.pi, places=8)

    def test_sphere_lies_on_its_radius(self):
        """Every simplex of the 3-sphere chain maps into |z| = r."""
        sphere = self.service.sphere_chain("U", (0j, 0j), 0.5, 2)
        rng = np.random.default_rng(2)
        t = rng.dirichlet(np.ones(4), size=20)[:, 1:]

        # Assertions
        self.assertEqual(sphere.order, 3)
        self.assertEqual(len(sphere), 6)
        for simplex, _ in sphere.simplices():
            norms = np.linalg.norm(simplex.map_points(t), axis=1)
            np.testing.assert_allclose(norms, 0.5, atol=1e-12)


class TestAdaptedSet(unittest.TestCase):
    """
    Unit tests for Z checks.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = GeometryService(Settings())
        self.disk = SingularDisk("U", (0j,), 1.0, 2.0)

    def test_z_inside_v1_is_rejected(self):
        """Z may not meet V1."""
        covering = Covering(plane_atlas(), (self.disk,), (Region("U", RegionKind.DISK, (0.5 + 0j,), 0.0, 0.2),))

        # Assertions
        with self.assertRaises(InvariantViolation):
            self.service.check_adapted_set(covering)

    def test_relative_form_vanishes_on_z(self):
        """rho1 dz vanishes on Z far from the disk; dz does not."""
        covering = Covering(plane_atlas(), (self.disk,), (Region("U", RegionKind.DISK, (5 + 0j,), 0.0, 0.5),))
        self.service.check_adapted_set(covering)
        rho1 = self.service.build_partition_of_unity(covering).rho1_on(0, "U")

        # Assertions
        self.assertTrue(self.service.vanishes_on_z(Form.covector("U", 1, dz_label(1), rho1), covering))
        with self.assertRaises(InvariantViolation):
            self.service.vanishes_on_z(Form.covector("U", 1, dz_label(1)), covering)


if __name__ == "__main__":
    unittest.main()
