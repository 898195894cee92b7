"""
Unit tests for BundlesService.
Covers curvature, trivial and glued connections, sampled compatibility checks and
the singular-locus search.
"""

import unittest

import numpy as np
import sympy as sp

from chernloc.config.settings import Settings
from chernloc.layers.bundles.bundle import (
    BundleData,
    ConnectionData,
    Domain,
    SectionTuple,
    connection_from_forms,
    evaluate_matrix,
)
from chernloc.layers.bundles.bundles_service import BundlesService
from chernloc.layers.bundles.form_matrix import FormMatrix, gauge_transform
from chernloc.layers.fields_forms.form import ChartMap, Form, TangentVector, dz_label, dzbar_label
from chernloc.layers.fields_forms.sampling import random_points, random_polynomial_form
from chernloc.layers.fields_forms.scalar_field import z, zbar
from chernloc.layers.geometry.atlas import Atlas, Chart
from chernloc.layers.geometry.covering import Covering, SingularDisk
from chernloc.layers.geometry.partition import build_partition_of_unity
from chernloc.utils.errors import FrameSingularError, InvariantViolation, NonIsolatedZeroError


def plane_bundle(rank=1, dimension=1):
    return BundleData(rank, Atlas([Chart("U", dimension)]))


def sphere_atlas():
    return Atlas(
        [Chart("U0", 1), Chart("U1", 1)],
        [ChartMap("U0", "U1", 1, (1 / z(1),)), ChartMap("U1", "U0", 1, (1 / z(1),))],
    )


def line_bundle(d=3):
    """O(d) on P^1: e1 = z^d e0."""
    g = sp.ImmutableMatrix([[z(1) ** d]])
    return BundleData(1, sphere_atlas(), (("U0", "U1", g), ("U1", "U0", g)))


def section(bundle, pieces):
    return SectionTuple(bundle, tuple((chart, sp.ImmutableMatrix(matrix)) for chart, matrix in pieces.items()))


def unit_vectors(count):
    return [TangentVector.real(np.ones((count, 1))), TangentVector.real(1j * np.ones((count, 1)))]


class TestCurvature(unittest.TestCase):
    """
    Unit tests for curvature and the Bianchi identity.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = BundlesService(Settings())

    def test_zero_connection_is_flat(self):
        """theta = 0 gives K = 0."""
        bundle = plane_bundle(2)
        zero = Form.zero("U", 1, 1)
        connection = connection_from_forms(bundle, {"U": [[zero, zero], [zero, zero]]})

        # Assertions
        self.assertTrue(self.service.curvature(connection)["U"].is_zero())

    def test_holomorphic_line_connection_is_flat(self):
        """A rank-1 theta = f dz with f holomorphic in one variable has K = 0."""
        theta = Form.covector("U", 1, dz_label(1), z(1) ** 2 + 3 * z(1))
        connection = connection_from_forms(plane_bundle(), {"U": [[theta]]})

        # Assertions
        self.assertTrue(self.service.curvature(connection)["U"].is_zero())

    def test_non_holomorphic_line_connection(self):
        """theta = zbar dz has K = dzbar ^ dz = -dz ^ dzbar."""
        theta = Form.covector("U", 1, dz_label(1), zbar(1))
        K = self.service.curvature(connection_from_forms(plane_bundle(), {"U": [[theta]]}))["U"]

        # Assertions
        self.assertEqual(K[0, 0].coefficient((dz_label(1), dzbar_label(1))), -1)

    def test_bianchi_identity(self):
        """dK - K ^ theta + theta ^ K vanishes for a random rank-2 connection on C^2."""
        rng = np.random.default_rng(11)
        rows = [[random_polynomial_form(rng, "U", 2, 1, max_degree=1) for _ in range(2)] for _ in range(2)]
        connection = connection_from_forms(plane_bundle(2, 2), {"U": rows})
        residual = self.service.bianchi_residual(connection, "U", random_points(rng, 10, 2))

        # Assertions
        self.assertLess(residual, 1e-8)

    def test_gauge_covariance(self):
        """The curvature of the gauge-transformed connection is g^-1 K g."""
        rng = np.random.default_rng(5)
        rows = [[random_polynomial_form(rng, "U", 1, 1) for _ in range(2)] for _ in range(2)]
        theta = FormMatrix.from_forms(rows, "U", 1, 1)
        g = sp.Matrix([[1, z(1)], [0, 2 + z(1) ** 2]])
        bundle = plane_bundle(2)
        K = self.service.curvature(ConnectionData(bundle, (("U", theta),)))["U"]
        moved = self.service.curvature(ConnectionData(bundle, (("U", gauge_transform(theta, g)),)))["U"]
        points = random_points(rng, 20, 1, radius=0.5)
        G = evaluate_matrix(g, points)
        expected = np.linalg.inv(G) @ K.evaluate(points, unit_vectors(20)) @ G

        # Assertions
        np.testing.assert_allclose(moved.evaluate(points, unit_vectors(20)), expected, atol=1e-8)


class TestTrivialConnection(unittest.TestCase):
    """
    Unit tests for frame-trivial connections and frame completion.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = BundlesService(Settings())

    def test_standard_frame_is_trivial(self):
        """The standard frame of a trivial bundle gives theta = 0."""
        bundle = plane_bundle(2)
        connection = self.service.trivial_connection(SectionTuple.standard(bundle, "U"))

        # Assertions
        self.assertTrue(connection.on("U").is_zero())

    def test_frame_z_times_e(self):
        """The frame z e on the punctured plane gives theta = -dz/z in the frame e."""
        frame = section(plane_bundle(), {"U": [[z(1)]]})
        samples = {"U": np.array([[0.5 + 0j], [1j]])}
        theta = self.service.trivial_connection(frame, Domain("V0"), samples).on("U")
        points = np.array([[0.5 + 0j], [2j]])
        value = theta.evaluate(points, [TangentVector.partial_z(1, 1)])[:, 0, 0]

        # Assertions
        np.testing.assert_allclose(value, -1 / points[:, 0], atol=1e-12)

    def test_singular_frame_is_rejected(self):
        """A frame vanishing at a sample point raises FrameSingularError."""
        frame = section(plane_bundle(), {"U": [[z(1) - 1]]})

        # Assertions
        with self.assertRaises(FrameSingularError):
            self.service.trivial_connection(frame, samples={"U": np.array([[0.5 + 0j], [1 + 0j]])})

    def test_frame_completion(self):
        """A 1-section of a rank-2 bundle is completed with the first standard column that keeps it a frame."""
        bundle = plane_bundle(2)
        samples = {"U": random_points(np.random.default_rng(2), 10, 1)}
        completed, chosen = self.service.complete_frame(section(bundle, {"U": [[1], [0]]}), samples)
        other, other_chosen = self.service.complete_frame(section(bundle, {"U": [[z(1)], [1]]}), samples)

        # Assertions
        self.assertEqual(chosen, [1])
        self.assertEqual(completed.on("U"), sp.Matrix([[1, 0], [0, 1]]))
        self.assertEqual(other_chosen, [0])
        self.assertEqual(other.r, 2)


class TestGluing(unittest.TestCase):
    """
    Unit tests for connections glued on O(d) over P^1.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = BundlesService(Settings())
        self.bundle = line_bundle(3)
        covering = Covering(self.bundle.atlas, (SingularDisk("U0", (0j,), 0.25, 1.0),))
        self.partition = build_partition_of_unity(covering)
        s = section(self.bundle, {"U0": [[z(1) ** 3]], "U1": [[1]]})
        self.nabla0 = self.service.trivial_connection(s, Domain("V0", covering))
        self.nabla1 = self.service.trivial_connection(SectionTuple.standard(self.bundle, "U0"), Domain("V1", covering))

    def test_cocycle_and_section(self):
        """The O(3) transitions satisfy the cocycle and z^3 e0 = e1 is a section."""
        s = section(self.bundle, {"U0": [[z(1) ** 3]], "U1": [[1]]})

        # Assertions
        self.assertLess(self.service.check_cocycle(self.bundle), 1e-9)
        self.assertLess(self.service.check_section(s), 1e-9)

    def test_glued_connection_values(self):
        """The glued connection is -3 rho0 dz/z in e0: zero near 0, -3/z outside the covering disk."""
        glued = self.service.glue_connections(self.partition, self.nabla0, self.nabla1)
        points = np.array([[0.1 + 0j], [2 + 0j]])
        value = glued.on("U0").evaluate(points, [TangentVector.partial_z(1, 1)])[:, 0, 0]

        # Assertions
        np.testing.assert_allclose(value, [0.0, -1.5], atol=1e-12)

    def test_glued_connection_is_compatible(self):
        """The per-chart glued matrices obey the gauge rule across the overlap."""
        glued = self.service.glue_connections(self.partition, self.nabla0, self.nabla1)

        # Assertions
        self.assertLess(self.service.check_connection(glued), 1e-8)

    def test_gluing_equal_connections(self):
        """Gluing a connection with itself gives it back."""
        glued = self.service.glue_connections(self.partition, self.nabla0, self.nabla0)
        points = random_points(np.random.default_rng(3), 10, 1, radius=1.5)
        vectors = [TangentVector.partial_z(1, 1)]

        # Assertions
        np.testing.assert_allclose(
            glued.on("U0").evaluate(points, vectors), self.nabla0.on("U0").evaluate(points, vectors), atol=1e-10
        )

    def test_connection_moves_to_other_chart(self):
        """theta0 = -3 dz/z keeps e1 = z^3 e0 parallel, so moved to U1 it is zero there."""
        theta0 = Form.covector("U0", 1, dz_label(1), -3 / z(1))
        connection = connection_from_forms(self.bundle, {"U0": [[theta0]]})
        moved = connection.on("U1")

        # Assertions
        self.assertEqual(moved.chart_id, "U1")
        self.assertEqual(moved[0, 0].chart_id, "U1")
        self.assertTrue(moved.is_zero())

    def test_two_chart_connection_is_compatible(self):
        """Data on both charts passes the sampled gauge check across the overlap."""
        theta0 = Form.covector("U0", 1, dz_label(1), -3 / z(1))
        connection = connection_from_forms(self.bundle, {"U0": [[theta0]], "U1": [[Form.zero("U1", 1, 1)]]})

        # Assertions
        self.assertLess(self.service.check_connection(connection), 1e-9)

    def test_broken_cocycle(self):
        """Transitions z^3 and w^2 are not inverse to each other."""
        broken = BundleData(
            1,
            sphere_atlas(),
            (("U0", "U1", sp.ImmutableMatrix([[z(1) ** 3]])), ("U1", "U0", sp.ImmutableMatrix([[z(1) ** 2]]))),
        )

        # Assertions
        with self.assertRaises(InvariantViolation):
            self.service.check_cocycle(broken)

    def test_incompatible_section(self):
        """z^2 e0 and e1 are not the same section of O(3)."""
        s = section(self.bundle, {"U0": [[z(1) ** 2]], "U1": [[1]]})

        # Assertions
        with self.assertRaises(InvariantViolation):
            self.service.check_section(s)

    def test_whitney_sum(self):
        """The direct sum is block diagonal on the sum bundle."""
        summed = self.service.direct_sum(self.nabla0, self.nabla1)
        theta = summed.on("U0")

        # Assertions
        self.assertEqual(summed.bundle.rank, 2)
        self.assertTrue(theta[0, 1].is_zero() and theta[1, 0].is_zero())
        self.assertEqual(theta[0, 0], self.nabla0.on("U0")[0, 0])


class TestSingularLocus(unittest.TestCase):
    """
    Unit tests for the singular points of sections.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = BundlesService(Settings())

    def test_simple_zero(self):
        """z e vanishes at 0 only."""
        points = self.service.singular_locus(section(plane_bundle(), {"U": [[z(1)]]}))

        # Assertions
        self.assertEqual(len(points), 1)
        self.assertAlmostEqual(points[0].coords[0], 0j, places=9)

    def test_nowhere_vanishing(self):
        """e has no singular points."""
        # Assertions
        self.assertEqual(self.service.singular_locus(section(plane_bundle(), {"U": [[1]]})), [])

    def test_two_zeros(self):
        """z(z - 1) e vanishes at 0 and 1."""
        points = self.service.singular_locus(section(plane_bundle(), {"U": [[z(1) * (z(1) - 1)]]}))
        coords = sorted(p.coords[0].real for p in points)

        # Assertions
        self.assertEqual(len(points), 2)
        self.assertAlmostEqual(coords[0], 0.0, places=9)
        self.assertAlmostEqual(coords[1], 1.0, places=9)
        self.assertTrue(all(p.residual < 1e-10 for p in points))

    def test_zeros_on_both_charts(self):
        """The section z d/dz of TP^1 vanishes at 0 and at infinity."""
        g = sp.ImmutableMatrix([[-z(1) ** 2]])
        bundle = BundleData(1, sphere_atlas(), (("U0", "U1", g), ("U1", "U0", g)))
        points = self.service.singular_locus(section(bundle, {"U0": [[z(1)]], "U1": [[-z(1)]]}))

        # Assertions
        self.assertEqual([p.chart_id for p in points], ["U0", "U1"])

    def test_curve_of_zeros(self):
        """A line section vanishing on {z1 = 0} in C^2 is not isolated."""
        # Assertions
        with self.assertRaises(NonIsolatedZeroError):
            self.service.singular_locus(section(plane_bundle(1, 2), {"U": [[z(1)]]}))


if __name__ == "__main__":
    unittest.main()
