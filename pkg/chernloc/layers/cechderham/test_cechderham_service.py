"""
Unit tests for CechDeRhamService.
Covers the operator D, collation, honeycomb clipping and honeycomb integration.
"""

import unittest

import numpy as np
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from chernloc.config.settings import Settings
from chernloc.layers.cechderham.cechderham_service import CechDeRhamService
from chernloc.layers.cechderham.clipping import clip_simplex
from chernloc.layers.cechderham.cochain import CechCochain, apply_d, cochain_from_forms, random_cochain, restrict_global
from chernloc.layers.fields_forms.form import ChartMap, Form, SceneForm, dz_label, dzbar_label, wedge
from chernloc.layers.fields_forms.sampling import random_points, random_polynomial_form, sampled_norm
from chernloc.layers.fields_forms.scalar_field import param, z, zbar
from chernloc.layers.geometry.atlas import Atlas, Chart
from chernloc.layers.geometry.chains import disk_chain
from chernloc.layers.geometry.covering import Covering, SingularDisk
from chernloc.layers.geometry.honeycomb import honeycomb_from_marks
from chernloc.layers.geometry.partition import build_partition_of_unity
from chernloc.layers.mesh.simplices import Chain, Simplex, cube_cell
from chernloc.utils.errors import ClippingError, DimensionMismatchError

SEEDS = st.integers(min_value=0, max_value=2 ** 32 - 1)
SQUARE = (1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j)


def plane_atlas():
    return Atlas([Chart("U", 1)])


def sphere_atlas():
    return Atlas(
        [Chart("U0", 1), Chart("U1", 1)],
        [ChartMap("U0", "U1", 1, (1 / z(1),)), ChartMap("U1", "U0", 1, (1 / z(1),))],
    )


def square_fan(apex=0j, chart="U"):
    """Four positively oriented triangles from the apex to the edges of the square of half-width 1."""
    return Chain.of(
        [Simplex.affine(chart, [(apex,), (SQUARE[k],), (SQUARE[(k + 1) % 4],)]) for k in range(4)]
    )


def sphere_chain_of(atlas):
    """Square in U0 plus the fan over its complement in U1: the fundamental chain of P^1."""
    t1, t2 = param(1), param(2)
    simplices = list(square_fan(0j, "U0").simplices())
    for k in range(4):
        first, second = SQUARE[k], SQUARE[(k + 1) % 4]
        edge = sp.nsimplify(second, rational=True) + t2 * sp.nsimplify(first - second, rational=True)
        simplices.extend((s, 1) for s in cube_cell("U1", (t1 / edge,), 2, 1, f"U1:fan[{k}]"))
    return Chain(2, tuple(simplices))


def line_bundle_cocycle(d):
    """(0, 0, (i/2pi) d dz/z) on U0: the localized first Chern cocycle of O(d) along z^d e0."""
    zero = SceneForm.from_mapping(2, {"U0": Form.zero("U0", 1, 2)})
    bott = Form.covector("U0", 1, dz_label(1), sp.I * d / (2 * sp.pi) / z(1))
    return CechCochain(2, zero, zero, SceneForm.from_mapping(1, {"U0": bott}))


class TestOperatorD(unittest.TestCase):
    """
    Unit tests for D and restriction.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.service = CechDeRhamService(Settings())

    def test_d_of_zero(self):
        """D(0) is structurally zero."""
        zero = SceneForm.from_mapping(1, {"U": Form.zero("U", 1, 1)})
        c = cochain_from_forms(zero, zero)

        # Assertions
        self.assertTrue(apply_d(c).is_zero())
        self.assertEqual(apply_d(c).degree, 2)

    @settings(derandomize=True, max_examples=30, deadline=None)
    @given(SEEDS)
    def test_d_squared_vanishes(self, seed):
        """D o D = 0 on random polynomial cochains."""
        rng = np.random.default_rng(seed)
        dimension = int(rng.integers(1, 3))
        degree = int(rng.integers(0, 2 * dimension))
        c = random_cochain(rng, "U", dimension, degree)

        # Assertions
        self.assertLess(self.service.check_dd(c), 1e-9)

    def test_d_squared_above_top_degree(self):
        """On curves D o D of a degree-2 cocycle lands in degree 4, where every form is zero."""
        c = line_bundle_cocycle(3)
        dd = apply_d(apply_d(c))

        # Assertions
        self.assertEqual(dd.degree, 4)
        self.assertTrue(dd.is_zero())
        self.assertEqual(self.service.check_dd(c), 0.0)

    def test_restriction_of_closed_form_is_closed(self):
        """P(omega) is D-closed for the closed form z dz."""
        form = SceneForm.from_mapping(1, {"U": Form.covector("U", 1, dz_label(1), z(1))})
        c = restrict_global(form)

        # Assertions
        self.assertTrue(apply_d(c).is_zero())

    def test_cocycle_residual(self):
        """check_cocycle vanishes on the O(d) cocycle and not on P(zbar dz)."""
        form = SceneForm.from_mapping(1, {"U": Form.covector("U", 1, dz_label(1), zbar(1))})

        # Assertions
        self.assertEqual(self.service.check_cocycle(line_bundle_cocycle(3)), 0.0)
        self.assertGreater(self.service.check_cocycle(restrict_global(form)), 1e-3)

    def test_components_are_checked(self):
        """A degree-1 cochain needs an overlap 0-form."""
        one = SceneForm.from_mapping(1, {"U": Form.zero("U", 1, 1)})

        # Assertions
        with self.assertRaises(DimensionMismatchError):
            CechCochain(1, one, one, None)
        with self.assertRaises(DimensionMismatchError):
            CechCochain(1, one, one, one)


class TestCollate(unittest.TestCase):
    """
    Unit tests for collation by a partition of unity on the plane.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.atlas = plane_atlas()
        self.service = CechDeRhamService(Settings(), self.atlas)
        self.covering = Covering(self.atlas, (SingularDisk("U", (0j,), 0.5, 1.0),))
        self.partition = build_partition_of_unity(self.covering)
        self.points = {"U": random_points(np.random.default_rng(11), 50, 1, 1.5)}

    def test_collate_restrict_is_identity(self):
        """collate(P(omega)) = omega in degrees 0, 1 and 2."""
        rng = np.random.default_rng(17)
        for degree in range(3):
            form = SceneForm.from_mapping(degree, {"U": random_polynomial_form(rng, "U", 1, degree)})

            # Assertions
            self.assertLess(self.service.check_collate_restrict(form, self.partition, self.points), 1e-9)

    def test_overlap_only_cochain(self):
        """collate(0, 0, omega01) = d rho1 ^ omega01 = -d rho0 ^ omega01."""
        overlap = Form.covector("U", 1, dz_label(1), zbar(1))
        zero = SceneForm.from_mapping(2, {"U": Form.zero("U", 1, 2)})
        c = CechCochain(2, zero, zero, SceneForm.from_mapping(1, {"U": overlap}))
        glued = self.service.collate(c, self.partition)
        expected = -wedge(self.partition.d_rho0("U", 1), overlap)
        rng = np.random.default_rng(3)

        # Assertions
        self.assertLess(sampled_norm(glued.on("U") - expected, self.points["U"], rng), 1e-10)

    def test_closed_cocycle_collates_to_closed_form(self):
        """d collate(c) vanishes for the D-closed cocycle (0, 0, dz/z)."""
        c = line_bundle_cocycle(1)
        atlas = Atlas([Chart("U0", 1)])
        covering = Covering(atlas, (SingularDisk("U0", (0j,), 0.5, 1.0),))
        partition = build_partition_of_unity(covering)
        annulus = {"U0": 0.75 * np.exp(2j * np.pi * np.linspace(0, 1, 20, endpoint=False)).reshape(-1, 1)}

        # Assertions
        self.assertTrue(apply_d(c).is_zero())
        self.assertLess(CechDeRhamService(Settings(), atlas).collate_closed_residual(c, partition, annulus), 1e-8)


class TestClipping(unittest.TestCase):
    """
    Unit tests for cutting simplices along honeycomb disks.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.covering = Covering(plane_atlas(), (SingularDisk("U", (0j,), 0.3, 1.2),))
        self.honeycomb = honeycomb_from_marks(self.covering, [("U", (0j,))], 0.5)
        self.service = CechDeRhamService(Settings(), plane_atlas())

    def test_far_triangle_is_regular(self):
        """A triangle away from the disk stays whole in the regular cell."""
        triangle = Simplex.affine("U", [(2 + 0j,), (3 + 0j,), (2 + 1j,)])
        pieces = clip_simplex(triangle, self.honeycomb)

        # Assertions
        self.assertEqual(pieces.regular, [triangle])
        self.assertEqual(pieces.singular, {})

    def test_small_triangle_is_singular(self):
        """A triangle inside the disk goes to the singular cell."""
        triangle = Simplex.affine("U", [(0.1 + 0j,), (0.2 + 0j,), (0.1 + 0.1j,)])
        pieces = clip_simplex(triangle, self.honeycomb)

        # Assertions
        self.assertEqual(pieces.singular, {0: [triangle]})
        self.assertEqual(pieces.regular, [])

    def test_areas_add_up(self):
        """The clipped pieces of a crossing triangle have the areas of the two cells."""
        area = SceneForm.from_mapping(2, {"U": Form.from_terms("U", 1, 2, [((dz_label(1), dzbar_label(1)), sp.I / 2)])})
        chain = square_fan(0.15 + 0.1j)
        split = self.service.split(chain, self.honeycomb)
        inner = self.service.mesh.integrate_over_chain(area, split.singular).value
        outer = self.service.mesh.integrate_over_chain(area, split.regular).value
        arcs = self.service.mesh.integrate_over_chain(SceneForm.from_mapping(1, {"U": Form.covector("U", 1, dz_label(1), 1 / z(1))}), split.interface).value

        # Assertions
        self.assertAlmostEqual(inner, np.pi * 0.25, places=8)
        self.assertAlmostEqual(outer, 4.0 - np.pi * 0.25, places=8)
        self.assertAlmostEqual(arcs, 2j * np.pi, places=8)

    def test_tangent_edge_is_rejected(self):
        """An edge tangent to the interface circle raises ClippingError."""
        triangle = Simplex.affine("U", [(-1 + 0.5j,), (1 + 0.5j,), (2j,)])

        # Assertions
        with self.assertRaises(ClippingError):
            clip_simplex(triangle, self.honeycomb)

    def test_curved_cell_across_interface_is_rejected(self):
        """A non-affine cell crossing the interface cannot be clipped."""
        chain = disk_chain("U", (0j,), 1.0)

        # Assertions
        with self.assertRaises(ClippingError):
            self.service.split(chain, self.honeycomb)

    def test_two_interfaces_are_rejected(self):
        """A triangle crossing two interfaces raises ClippingError."""
        covering = Covering(
            plane_atlas(), (SingularDisk("U", (0j,), 0.1, 0.6), SingularDisk("U", (2 + 0j,), 0.1, 0.6))
        )
        honeycomb = honeycomb_from_marks(covering, [("U", (0j,)), ("U", (2 + 0j,))], 0.4)
        triangle = Simplex.affine("U", [(-1 + 0j,), (3 + 0j,), (1 + 1j,)])

        # Assertions
        with self.assertRaises(ClippingError):
            clip_simplex(triangle, honeycomb)


class TestHoneycombIntegration(unittest.TestCase):
    """
    Unit tests for honeycomb integration of cochains.
    """

    def setUp(self):
        """Set up test fixtures."""
        self.atlas = plane_atlas()
        self.service = CechDeRhamService(Settings(), self.atlas)
        self.covering = Covering(self.atlas, (SingularDisk("U", (0j,), 0.3, 1.2),))
        self.honeycomb = honeycomb_from_marks(self.covering, [("U", (0j,))], 0.7)

    def test_overlap_only_reduces_to_interface(self):
        """(0, 0, zbar dz) integrates to minus the circle integral, -2 pi i r^2."""
        zero = SceneForm.from_mapping(2, {"U": Form.zero("U", 1, 2)})
        overlap = SceneForm.from_mapping(1, {"U": Form.covector("U", 1, dz_label(1), zbar(1))})
        result = self.service.honeycomb_integrate(CechCochain(2, zero, zero, overlap), square_fan(), self.honeycomb)

        # Assertions
        self.assertAlmostEqual(result.value, -2j * np.pi * 0.49, places=8)

    @settings(derandomize=True, max_examples=10, deadline=None)
    @given(SEEDS)
    def test_restriction_matches_direct_integral(self, seed):
        """Honeycomb integration of P(omega) equals the direct integral of omega."""
        rng = np.random.default_rng(seed)
        form = SceneForm.from_mapping(2, {"U": random_polynomial_form(rng, "U", 1, 2)})
        comparison = self.service.honeycomb_vs_direct(form, square_fan(0.15 + 0.1j), self.honeycomb)

        # Assertions
        self.assertLess(comparison.difference, 1e-7)

    def test_degree_must_match_chain(self):
        """A 1-cochain cannot be integrated over a 2-chain."""
        zero = SceneForm.from_mapping(1, {"U": Form.zero("U", 1, 1)})
        c = cochain_from_forms(zero, zero)

        # Assertions
        with self.assertRaises(DimensionMismatchError):
            self.service.honeycomb_integrate(c, square_fan(), self.honeycomb)

    def test_line_bundle_degree_on_sphere(self):
        """The localized cocycle of O(d) integrates to d over P^1, for every honeycomb radius."""
        atlas = sphere_atlas()
        service = CechDeRhamService(Settings(), atlas)
        covering = Covering(atlas, (SingularDisk("U0", (0j,), 0.3, 0.95),))
        chain = sphere_chain_of(atlas)
        for d in (-2, 3):
            for radius in (0.5, 0.7, 0.9):
                honeycomb = honeycomb_from_marks(covering, [("U0", (0j,))], radius)
                result = service.honeycomb_integrate(line_bundle_cocycle(d), chain, honeycomb)

                # Assertions
                self.assertAlmostEqual(result.value, d, places=8, msg=f"d={d} radius={radius}")


if __name__ == "__main__":
    unittest.main()
