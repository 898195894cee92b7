"""
Report Service
==============
This service handles the report layer responsibilities:
- Dispatching a command on a loaded scene to the module operations
- Turning numeric outcomes into named results and pass/fail verdicts
- Running the embedded expected blocks of scenes
- Stamping every report with the convention memo hash
"""

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.cechderham.cechderham_service import CechDeRhamService
from chernloc.layers.chernweil.chernweil_service import ChernWeilService
from chernloc.layers.extendability.extendability_service import ExtendabilityService
from chernloc.layers.fields_forms.sampling import random_points, random_polynomial_form, sampled_norm
from chernloc.layers.geometry.geometry_service import GeometryService
from chernloc.layers.mesh.mesh_service import MeshService
from chernloc.layers.mesh.simplices import Chain, Simplex
from chernloc.layers.report.conventions import convention_memo_sha256
from chernloc.layers.residues.foliation import LINE_CHART
from chernloc.layers.residues.kernel import INDEX_RESIDUAL
from chernloc.layers.residues.residues_service import ResiduesService
from chernloc.layers.scene.scene import Scene
from chernloc.layers.scene.scene_service import SceneService
from chernloc.models.data_models import (
    Feasibility,
    NumericResult,
    QuadratureResult,
    Report,
    SweepEntry,
    Verdict,
    VerdictStatus,
)
from chernloc.utils.errors import ClippingError, InputError, SceneError

logger = logging.getLogger(__name__)

# Thresholds of checks that are exact up to rounding
IDENTITY_TOL = 1e-7
STRUCTURAL_TOL = 1e-9
STOKES_TOL = 1e-8
STOKES_TRIALS = 30

# Commands that run without a scene
SCENELESS = frozenset({"verify stokes", "extendability bloom-herrera", "scenes"})


@dataclass
class Outcome:
    """What a command handler produces before it is wrapped into a Report."""

    results: List[NumericResult] = field(default_factory=list)
    verdicts: List[Verdict] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    def result(self, name: str, value, error: float = 0.0, cells: int = 0) -> None:
        if isinstance(value, QuadratureResult):
            value, error, cells = value.value, value.error, value.cells
        value = complex(value)
        self.results.append(NumericResult(name=name, value=[value.real, value.imag], error=float(error), cells=int(cells)))

    def check(self, name: str, measured: float, tol: float, detail: str = "") -> None:
        status = VerdictStatus.PASS if measured <= tol else VerdictStatus.FAIL
        self.verdicts.append(Verdict(name=name, status=status, measured=float(measured), tol=float(tol), detail=detail))

    def flag(self, name: str, ok: bool, detail: str = "") -> None:
        self.verdicts.append(Verdict(name=name, status=VerdictStatus.PASS if ok else VerdictStatus.FAIL, detail=detail))


def normalize_flags(flags: Optional[Mapping[str, Any]]) -> Dict[str, Any]:
    """Flag names with dashes as underscores, dropping unset values."""
    return {str(k).replace("-", "_"): v for k, v in (flags or {}).items() if v is not None}


def _distance_to_integer(value: complex) -> float:
    return abs(value - round(value.real))


def sweep_is_monotone(sweep: Sequence[SweepEntry]) -> bool:
    """Once a truncation degree is infeasible, every larger one is."""
    seen_infeasible = False
    for entry in sorted(sweep, key=lambda e: e.degree):
        if entry.status == Feasibility.INFEASIBLE:
            seen_infeasible = True
        elif seen_infeasible:
            return False
    return True


class ReportService:
    """
    Service class for command dispatch and report assembly.
    """

    def __init__(self, settings: Optional[Settings] = None, scenes: Optional[SceneService] = None):
        """
        Initialize the report service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
            scenes: Optional scene service; defaults to one over settings.scenes_dir
        """
        self.settings = settings or get_settings()
        self.scenes = scenes or SceneService(self.settings)
        self.chern = ChernWeilService(self.settings)
        self.residues = ResiduesService(self.settings)
        self.geometry = GeometryService(self.settings)
        self._handlers: Dict[str, Callable[[Optional[Scene], Dict[str, Any]], Outcome]] = {
            "chern": self._chern,
            "bott-diff": self._bott_diff,
            "integrate": self._integrate,
            "cech verify": self._cech_verify,
            "verify stokes": self._verify_stokes,
            "verify residue-theorem": self._verify_residue_theorem,
            "verify expected": self._verify_expected,
            "residue index": self._residue_index,
            "residue camacho-sad": self._residue_camacho_sad,
            "extendability bloom-herrera": self._bloom_herrera,
            "scenes": self._scenes,
        }

    @property
    def commands(self) -> Tuple[str, ...]:
        return tuple(self._handlers)

    def _handler(self, command: str) -> Callable[[Optional[Scene], Dict[str, Any]], Outcome]:
        handler = self._handlers.get(command)
        if handler is None:
            raise InputError(f"unknown command {command!r} (known: {', '.join(self.commands)})")
        return handler

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.settings.seed)

    def run(
        self,
        command: str,
        scene: Optional[str] = None,
        flags: Optional[Mapping[str, Any]] = None,
        params: Optional[Mapping[str, object]] = None,
    ) -> Report:
        """
        Load the named scene (if any) and run a command on it.

        Raises:
            InputError: On an unknown command, before any scene is loaded
            FileNotFoundError: If the scene cannot be found
            SceneError: On scene problems
        """
        self._handler(command)
        loaded = self.scenes.load_scene(scene, params) if scene else None
        return self.run_command(loaded, command, flags)

    def run_command(self, scene: Optional[Scene], command: str, flags: Optional[Mapping[str, Any]] = None) -> Report:
        """
        Dispatch a command on a loaded scene.

        Args:
            scene: the scene, or None for the commands that need none
            command: command name, e.g. 'chern' or 'verify residue-theorem'
            flags: command flags

        Returns:
            Report with results, verdicts and details; passed when every verdict passes

        Raises:
            InputError: On an unknown command
            SceneError: If the command needs a scene or a scene section that is missing
        """
        handler = self._handler(command)
        if scene is None and command not in SCENELESS:
            raise SceneError(f"command {command!r}: scene required")
        flags = normalize_flags(flags)
        logger.info("[REPORT] command=%s scene=%s flags=%s", command, scene.name if scene else None, flags)
        outcome = handler(scene, flags)
        effective = dict(flags, tol=self.settings.quadrature_tol, acceptance_tol=self.settings.acceptance_tol, seed=self.settings.seed)
        if scene is not None and scene.params:
            effective["params"] = {k: str(v) for k, v in sorted(scene.params.items())}
        passed = all(v.status == VerdictStatus.PASS for v in outcome.verdicts)
        if not passed:
            failed = [v.name for v in outcome.verdicts if v.status == VerdictStatus.FAIL]
            logger.warning("[REPORT] command=%s failed checks=%s", command, failed)
        return Report(
            command=command,
            scene=scene.name if scene else None,
            flags=dict(sorted(effective.items())),
            results=outcome.results,
            verdicts=outcome.verdicts,
            details=outcome.details,
            passed=passed,
            convention_memo_sha256=convention_memo_sha256(),
        )

    # -- chern ------------------------------------------------------------------

    def _chern(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        q = int(flags.get("q", 1))
        connection = scene.connection(flags.get("connection"))
        form = self.chern.chern_form(connection, q)
        atlas = scene.atlas
        tol = self.settings.acceptance_tol
        outcome = Outcome(details={"form": {chart_id: str(piece) for chart_id, piece in form}})
        outcome.check("closed", self.chern.check_closed(form, atlas), tol)
        outcome.check("real", self.chern.check_real(form, atlas), tol)
        outcome.check("overlaps agree", self.chern.check_overlaps(form, atlas), tol)
        triangulation = scene.triangulation
        if triangulation is not None and triangulation.order == 2 * q:
            integral = self.chern.chern_integral(connection, q, triangulation, self.settings.quadrature_tol)
            outcome.result("integral", integral)
            if q == atlas.charts[0].dimension:
                outcome.check("integral is an integer", _distance_to_integer(integral.value), tol)
        return outcome

    def _bott_diff(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        q = int(flags.get("q", 1))
        names = list(scene.require("connections"))
        if "c0" not in flags and len(names) < 2:
            raise SceneError(f"scene {scene.name!r}: bott-diff needs two connections")
        c0 = scene.connection(flags.get("c0", names[0]))
        c1 = scene.connection(flags.get("c1", names[1] if len(names) > 1 else names[0]))
        bott = self.chern.bott_difference(c0, c1, q)
        outcome = Outcome(details={"bott": {chart_id: str(piece) for chart_id, piece in bott}})
        outcome.check("d bott = c(nabla1) - c(nabla0)", self.chern.check_difference_identity(c0, c1, q), IDENTITY_TOL)
        outcome.check("antisymmetric", self.chern.check_antisymmetry(c0, c1, q), STRUCTURAL_TOL)
        return outcome

    def _integrate(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        form = scene.form(flags.get("form"))
        triangulation = scene.require("triangulation")
        result = MeshService(self.settings, scene.atlas).integrate_fundamental_class(form, triangulation, self.settings.quadrature_tol)
        outcome = Outcome()
        outcome.result("integral", result)
        outcome.check("quadrature error", result.error, self.settings.acceptance_tol)
        return outcome

    # -- cech -------------------------------------------------------------------

    def _cech_verify(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        q = int(flags.get("q", 1))
        bundle, covering = scene.require("bundle"), scene.require("covering")
        partition, honeycomb = scene.require("partition"), scene.require("honeycomb")
        section = scene.section(flags.get("section"))
        connection = scene.connection(flags.get("connection"))
        cech = CechDeRhamService(self.settings, scene.atlas)

        cocycle = self.chern.localized_chern_cocycle(bundle, section, connection, q, covering)
        outcome = Outcome()
        outcome.check("D(c) = 0", cech.check_cocycle(cocycle), self.settings.acceptance_tol)
        outcome.check("D o D = 0", cech.check_dd(cocycle), STRUCTURAL_TOL)

        rng = self._rng()
        points = {
            chart.id: chart.sampling_region().sample(rng, self.settings.sample_count) for chart in scene.atlas.charts
        }
        global_form = self.chern.chern_form(connection, q)
        outcome.check("collate o restrict = id", cech.check_collate_restrict(global_form, partition, points), STRUCTURAL_TOL)

        triangulation = scene.triangulation
        if triangulation is None or triangulation.order != 2 * q:
            return outcome
        try:
            glued = cech.honeycomb_integrate(cocycle, triangulation.chain(), honeycomb, self.settings.quadrature_tol)
        except ClippingError as e:
            logger.warning("[REPORT] honeycomb integral skipped: %s", e)
            outcome.details["honeycomb"] = f"skipped: {e}"
            return outcome
        direct = self.chern.chern_integral(connection, q, triangulation, self.settings.quadrature_tol)
        outcome.result("honeycomb", glued)
        outcome.result("direct", direct)
        outcome.check("honeycomb = direct", abs(glued.value - direct.value), self.settings.acceptance_tol)
        return outcome

    # -- verify -----------------------------------------------------------------

    def _verify_stokes(self, scene: Optional[Scene], flags: Dict[str, Any]) -> Outcome:
        trials = int(flags.get("trials", STOKES_TRIALS))
        threshold = float(flags.get("threshold", STOKES_TOL))
        rng = self._rng()
        mesh = MeshService(self.settings)
        reports = []
        for _ in range(trials):
            form = random_polynomial_form(rng, "U", 1, 1)
            triangle = Simplex.affine("U", [tuple(p) for p in random_points(rng, 3, 1)])
            reports.append(mesh.stokes_check(form, Chain.of([triangle]), threshold))
        passed = sum(r.passed for r in reports)
        worst = max((r.difference for r in reports), default=0.0)
        outcome = Outcome(details={"trials": [r.model_dump() for r in reports]})
        outcome.check("stokes", worst, threshold, detail=f"{passed}/{trials} pass")
        return outcome

    def _verify_residue_theorem(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        q = int(flags.get("q", 1))
        triangulation = scene.require("triangulation")
        section = scene.section(flags.get("section"))
        connection = scene.connection(flags.get("connection"))
        report = self.residues.residue_theorem_check(
            section, connection, triangulation, q, scene.residue_radii(), self.settings.quadrature_tol
        )
        outcome = Outcome(details=report.model_dump(mode="json"))
        global_value = complex(*report.global_value)
        outcome.result("global", global_value, report.global_error, report.global_cells)
        outcome.result("local_sum", complex(*report.local_sum), report.local_error, report.local_cells)
        for i, point in enumerate(report.points):
            outcome.result(f"local[{i}]", complex(*point.local), point.error, point.cells)
        outcome.check("global = sum of locals", report.discrepancy, self.settings.acceptance_tol)
        if report.integral_check:
            outcome.check("global is an integer", _distance_to_integer(global_value), self.settings.acceptance_tol)
            for i, point in enumerate(report.points):
                outcome.check(f"local[{i}] is an integer", _distance_to_integer(complex(*point.local)), INDEX_RESIDUAL)
        return outcome

    def _verify_expected(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        outcome = Outcome()
        cache: Dict[Tuple[str, str], Report] = {}
        for entry in scene.expected:
            if entry.command == "verify expected":
                raise SceneError(f"scene {scene.name!r}: expected entries cannot run 'verify expected'")
            key = (entry.command, json.dumps(entry.flags, sort_keys=True, default=str))
            if key not in cache:
                cache[key] = self.run_command(scene, entry.command, entry.flags)
            found = lookup(cache[key], entry.key)
            name = f"{entry.command} {entry.key}"
            if isinstance(entry.value, str):
                outcome.flag(name, found == entry.value, detail=f"got {found!r}, expected {entry.value!r}")
                continue
            expected = complex(*entry.value) if isinstance(entry.value, list) else complex(entry.value)
            measured = abs(as_complex(found) - expected)
            outcome.check(name, measured, entry.tol, detail=f"got {found}, expected {entry.value}")
        outcome.details["entries"] = len(scene.expected)
        return outcome

    # -- residues ---------------------------------------------------------------

    def _residue_index(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        index = scene.require("index")
        m = len(index.components)
        radius = float(flags.get("radius", index.radius))
        sphere = self.geometry.sphere_chain("index", index.center, radius, m)
        integral = self.residues.bm_integral(index.components, sphere, self.settings.quadrature_tol)
        k = round(integral.value.real)
        outcome = Outcome()
        outcome.result("bm_integral", integral)
        outcome.result("index", k)
        outcome.check("integer index", _distance_to_integer(integral.value), INDEX_RESIDUAL)
        return outcome

    def _residue_camacho_sad(self, scene: Scene, flags: Dict[str, Any]) -> Outcome:
        foliation = scene.require("foliation")
        radius = float(flags.get("radius", foliation.link_radius))
        link = self.geometry.link_of_point(LINE_CHART, (foliation.center,), radius)
        tol = self.settings.quadrature_tol
        direct = self.residues.camacho_sad_result(foliation.germ, link, tol)
        via_bott = self.residues.camacho_sad_via_bott_result(foliation.germ, link, tol)
        outcome = Outcome()
        outcome.result("camacho_sad", direct)
        outcome.result("camacho_sad_bott", via_bott)
        outcome.check("direct = Bott residue", abs(direct.value - via_bott.value), self.settings.acceptance_tol)
        curvature = self.chern.chern_form(self.residues.induced_connection(foliation.germ), 1).on(LINE_CHART)
        rng = self._rng()
        flatness = 0.0 if curvature.is_zero() else sampled_norm(
            curvature, foliation.center + random_points(rng, self.settings.sample_count, 1, radius), rng
        )
        outcome.check("induced connection is flat", flatness, STRUCTURAL_TOL)
        return outcome

    # -- extendability ----------------------------------------------------------

    def _bloom_herrera(self, scene: Optional[Scene], flags: Dict[str, Any]) -> Outcome:
        spec = scene.extendability if scene is not None else None
        max_degree = int(flags.get("max_degree", spec.max_degree if spec else 20))
        report = ExtendabilityService(self.settings).bloom_herrera(
            max_degree, omega=spec.form if spec else None, components=spec.map if spec else None
        )
        membership = report.membership
        outcome = Outcome(details=report.model_dump(mode="json"))
        outcome.result("max_degree", membership.max_degree)
        if membership.obstruction_degree is not None:
            outcome.result("obstruction_degree", membership.obstruction_degree)
        outcome.flag("sweep is monotone", sweep_is_monotone(report.sweep))
        feasible = [entry for entry in report.sweep if entry.status == Feasibility.FEASIBLE]
        verified = sum(1 for entry in feasible if entry.certificate_verified)
        outcome.flag(
            "FEASIBLE certificates reproduce the primitive",
            verified == len(feasible),
            f"{verified}/{len(feasible)} FEASIBLE truncations",
        )
        return outcome

    def _scenes(self, scene: Optional[Scene], flags: Dict[str, Any]) -> Outcome:
        return Outcome(details={"scenes": self.scenes.list_scenes()})


def as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(*value)
    return complex(value)


def lookup(report: Report, key: str):
    """
    A value of a report by key: a result name first, then a dotted path into the details.

    Raises:
        SceneError: If the report has no such key
    """
    for result in report.results:
        if result.name == key:
            return result.value
    node: Any = report.details
    for part in key.split("."):
        if isinstance(node, Mapping) and part in node:
            node = node[part]
        elif isinstance(node, list) and part.isdigit() and int(part) < len(node):
            node = node[int(part)]
        else:
            raise SceneError(f"report of {report.command!r} has no key {key!r}")
    return node
