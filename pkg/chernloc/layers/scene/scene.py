"""
Scene
=====
A scene file turned into the package's objects: atlas, covering, partition, honeycomb,
triangulation, bundle, sections, connections, forms, foliation germ, index map and
extendability data. Every section is optional; commands ask for what they need.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import sympy as sp

from chernloc.layers.bundles.bundle import (
    BundleData,
    ConnectionData,
    Domain,
    SectionTuple,
    connection_from_forms,
    trivial_connection,
)
from chernloc.layers.fields_forms.form import ChartMap, Form, SceneForm, parse_form
from chernloc.layers.fields_forms.scalar_field import parse_field
from chernloc.layers.geometry.atlas import Atlas, Chart
from chernloc.layers.geometry.covering import Covering, SingularDisk
from chernloc.layers.geometry.honeycomb import HoneycombSystem, honeycomb_from_marks
from chernloc.layers.geometry.partition import BumpProfile, PartitionOfUnity, build_partition_of_unity
from chernloc.layers.geometry.regions import Region
from chernloc.layers.mesh.simplices import Simplex, cube_cell, params
from chernloc.layers.mesh.triangulation import Triangulation
from chernloc.layers.residues.foliation import FoliationGerm
from chernloc.models.data_models import (
    ConnectionSpec,
    ExpectedSpec,
    ExtendabilitySpec,
    RegionSpec,
    SceneFile,
    SimplexSpec,
)
from chernloc.utils.errors import SceneError

logger = logging.getLogger(__name__)

Params = Mapping[str, object]


@dataclass(frozen=True)
class IndexMap:
    """Local representative f: C^m -> C^m of a section, with the sphere it is integrated over."""

    components: Tuple[sp.Expr, ...]
    center: Tuple[complex, ...]
    radius: float


@dataclass(frozen=True)
class FoliationData:
    germ: FoliationGerm
    center: complex
    link_radius: float


@dataclass(frozen=True)
class Scene:
    """
    A loaded scene.

    Attributes:
        name: scene name
        params: effective parameters (file values with overrides applied)
        atlas: charts and transitions
        covering: two-set covering, if declared
        partition: partition of unity subordinate to the covering
        honeycomb: honeycomb cell system, if declared
        triangulation: fundamental chain, if declared
        bundle: vector bundle, if declared
        sections: named r-sections
        connections: named connections
        forms: named scene forms
        foliation: foliation germ with its singular point and link radius
        index: local map for Bochner-Martinelli indices
        extendability: obstruction data
        expected: self-checks of the scene
    """

    name: str
    params: Dict[str, object]
    atlas: Atlas
    covering: Optional[Covering] = None
    partition: Optional[PartitionOfUnity] = None
    honeycomb: Optional[HoneycombSystem] = None
    triangulation: Optional[Triangulation] = None
    bundle: Optional[BundleData] = None
    sections: Dict[str, SectionTuple] = field(default_factory=dict)
    connections: Dict[str, ConnectionData] = field(default_factory=dict)
    forms: Dict[str, SceneForm] = field(default_factory=dict)
    foliation: Optional[FoliationData] = None
    index: Optional[IndexMap] = None
    extendability: Optional[ExtendabilitySpec] = None
    expected: Tuple[ExpectedSpec, ...] = ()
    description: str = ""

    def require(self, section: str):
        """
        The named scene section.

        Raises:
            SceneError: If the scene does not declare it
        """
        value = getattr(self, section)
        if value is None or (isinstance(value, dict) and not value):
            raise SceneError(f"scene {self.name!r}: {section} required")
        return value

    def section(self, name: Optional[str] = None) -> SectionTuple:
        return self._named(self.require("sections"), name, "section")

    def connection(self, name: Optional[str] = None) -> ConnectionData:
        return self._named(self.require("connections"), name, "connection")

    def form(self, name: Optional[str] = None) -> SceneForm:
        return self._named(self.require("forms"), name, "form")

    def _named(self, table: Dict[str, object], name: Optional[str], what: str):
        if name is None:
            return next(iter(table.values()))
        if name not in table:
            raise SceneError(f"scene {self.name!r} has no {what} {name!r} (known: {sorted(table)})")
        return table[name]

    def residue_radii(self) -> Tuple[float, float, float]:
        """(inner, outer, honeycomb) radii from the first covering disk and the honeycomb."""
        covering, honeycomb = self.require("covering"), self.require("honeycomb")
        if not covering.disks:
            raise SceneError(f"scene {self.name!r}: covering disks required")
        first = covering.disks[0]
        return first.inner, first.outer, honeycomb.disks[0].radius if honeycomb.disks else first.inner


# -- builders ------------------------------------------------------------------


def number(value, p: Params) -> complex:
    """A scene scalar ("1-i", 0.5, "d/2") as a complex number."""
    try:
        return complex(sp.N(parse_field(value if isinstance(value, str) else str(value), 0, p)))
    except TypeError as exc:
        raise SceneError(f"{value!r} is not a number") from exc


def point(values: Sequence, p: Params) -> Tuple[complex, ...]:
    return tuple(number(v, p) for v in values)


def build_region(spec: RegionSpec, dimension: int, p: Params) -> Region:
    center = point(spec.center, p) if spec.center else tuple(0j for _ in range(dimension))
    if len(center) != dimension:
        raise SceneError(f"region center {spec.center} has {len(center)} coordinates in chart {spec.chart!r} of dimension {dimension}")
    return Region(spec.chart, spec.kind, center, spec.inner, spec.outer)


def build_atlas(file: SceneFile, p: Params) -> Atlas:
    if not file.charts:
        raise SceneError(f"scene {file.name!r}: charts required")
    charts = []
    for spec in file.charts:
        periods = None
        if spec.periods is not None:
            if spec.dimension != 1 or len(spec.periods) != 2:
                raise SceneError(f"chart {spec.id!r}: periods are two lattice vectors of a one-dimensional chart")
            periods = tuple(number(w, p) for w in spec.periods)
        domain = build_region(spec.domain, spec.dimension, p) if spec.domain else None
        markers = tuple(point(m, p) for m in spec.singular_points)
        charts.append(Chart(spec.id, spec.dimension, domain, periods, markers))
    dimensions = {c.id: c.dimension for c in charts}
    transitions = []
    for spec in file.transitions:
        source = _chart_dimension(dimensions, spec.source, "transition")
        _chart_dimension(dimensions, spec.target, "transition")
        components = tuple(parse_field(c, source, p) for c in spec.components)
        transitions.append(ChartMap(spec.source, spec.target, source, components))
    return Atlas(charts, transitions)


def _chart_dimension(dimensions: Mapping[str, int], chart_id: str, where: str) -> int:
    if chart_id not in dimensions:
        raise SceneError(f"{where} refers to unknown chart {chart_id!r} (known: {sorted(dimensions)})")
    return dimensions[chart_id]


def build_covering(file: SceneFile, atlas: Atlas, p: Params) -> Optional[Covering]:
    spec = file.covering
    if spec is None:
        return None
    dimensions = {c.id: c.dimension for c in atlas.charts}
    disks = []
    for disk in spec.disks:
        dimension = _chart_dimension(dimensions, disk.chart, "covering disk")
        center = point(disk.center, p)
        if len(center) != dimension:
            raise SceneError(f"covering disk center {disk.center} does not match chart {disk.chart!r}")
        disks.append(SingularDisk(disk.chart, center, disk.inner, disk.outer))
    adapted = tuple(
        build_region(region, _chart_dimension(dimensions, region.chart, "adapted set"), p) for region in spec.adapted_set
    )
    return Covering(atlas, tuple(disks), adapted)


def build_honeycomb(file: SceneFile, covering: Optional[Covering], p: Params) -> Optional[HoneycombSystem]:
    spec = file.honeycomb
    if spec is None:
        return None
    if covering is None:
        raise SceneError(f"scene {file.name!r}: a honeycomb needs a covering")
    if spec.marks is None:
        marks = [(d.chart_id, d.center) for d in covering.disks]
    else:
        marks = [(m.chart, point(m.point, p)) for m in spec.marks]
    return honeycomb_from_marks(covering, marks, spec.radius)


def build_simplices(spec: SimplexSpec, atlas: Atlas, p: Params) -> List[Simplex]:
    dimension = _chart_dimension({c.id: c.dimension for c in atlas.charts}, spec.chart, "simplex")
    if spec.sign not in (1, -1):
        raise SceneError(f"simplex {spec.label or spec.chart!r}: sign must be +1 or -1")
    if spec.vertices is not None:
        return [Simplex.affine(spec.chart, [point(v, p) for v in spec.vertices], spec.sign, spec.label)]
    if spec.components is None or spec.order is None:
        raise SceneError(f"simplex {spec.label or spec.chart!r}: give vertices, or components with an order")
    t = params(spec.order)
    components = tuple(parse_field(c, dimension, p, t) for c in spec.components)
    if spec.domain == "square":
        return cube_cell(spec.chart, components, spec.order, spec.sign, spec.label)
    return [Simplex(spec.chart, dimension, spec.order, components, spec.sign, None, spec.label)]


def build_triangulation(file: SceneFile, atlas: Atlas, p: Params) -> Optional[Triangulation]:
    if file.triangulation is None:
        return None
    simplices: List[Simplex] = []
    for spec in file.triangulation.simplices:
        simplices.extend(build_simplices(spec, atlas, p))
    return Triangulation(atlas, simplices)


def _matrix(rows: Sequence[Sequence[str]], dimension: int, p: Params) -> sp.ImmutableMatrix:
    if not rows or len({len(r) for r in rows}) != 1:
        raise SceneError(f"matrix {rows} is empty or ragged")
    return sp.ImmutableMatrix([[parse_field(entry, dimension, p) for entry in row] for row in rows])


def build_bundle(file: SceneFile, atlas: Atlas, p: Params) -> Optional[BundleData]:
    spec = file.bundle
    if spec is None:
        return None
    dimensions = {c.id: c.dimension for c in atlas.charts}
    transitions = []
    for t in spec.transitions:
        source = _chart_dimension(dimensions, t.source, "bundle transition")
        _chart_dimension(dimensions, t.target, "bundle transition")
        matrix = _matrix(t.matrix, source, p)
        if matrix.shape != (spec.rank, spec.rank):
            raise SceneError(f"bundle transition {t.source}->{t.target} is {matrix.shape}, rank is {spec.rank}")
        transitions.append((t.source, t.target, matrix))
    return BundleData(spec.rank, atlas, tuple(transitions))


def build_sections(file: SceneFile, bundle: Optional[BundleData], p: Params) -> Dict[str, SectionTuple]:
    if file.sections and bundle is None:
        raise SceneError(f"scene {file.name!r}: sections need a bundle")
    dimensions = {c.id: c.dimension for c in bundle.atlas.charts} if bundle else {}
    sections = {}
    for name, spec in file.sections.items():
        pieces = tuple(
            (chart_id, _matrix(rows, _chart_dimension(dimensions, chart_id, f"section {name!r}"), p))
            for chart_id, rows in spec.charts.items()
        )
        sections[name] = SectionTuple(bundle, pieces)
    return sections


def build_connection(
    name: str, spec: ConnectionSpec, bundle: BundleData, sections: Dict[str, SectionTuple], covering: Optional[Covering], p: Params
) -> ConnectionData:
    if spec.region != "all" and covering is None:
        raise SceneError(f"connection {name!r} lives on {spec.region}, which needs a covering")
    domain = Domain(spec.region, covering)
    atlas = bundle.atlas
    if spec.kind == "frame":
        if spec.frame in (None, "standard"):
            frame = SectionTuple.standard(bundle, atlas.charts[0].id)
        elif spec.frame in sections:
            frame = sections[spec.frame]
        else:
            raise SceneError(f"connection {name!r} refers to unknown section {spec.frame!r}")
        return trivial_connection(frame, domain)
    if not spec.charts:
        raise SceneError(f"connection {name!r}: per-chart form matrices required")
    forms: Dict[str, List[List[Form]]] = {}
    for chart_id, rows in spec.charts.items():
        dimension = _chart_dimension({c.id: c.dimension for c in atlas.charts}, chart_id, f"connection {name!r}")
        if len(rows) != bundle.rank or any(len(r) != bundle.rank for r in rows):
            raise SceneError(f"connection {name!r} on {chart_id!r} is not {bundle.rank} x {bundle.rank}")
        forms[chart_id] = [[_one_form(text, chart_id, dimension, p) for text in row] for row in rows]
    return connection_from_forms(bundle, forms, domain)


def _one_form(text: str, chart_id: str, dimension: int, p: Params) -> Form:
    form = parse_form(text, chart_id, dimension, p)
    if form.is_zero():
        return Form.zero(chart_id, dimension, 1)
    if form.degree != 1:
        raise SceneError(f"connection entry {text!r} is a {form.degree}-form")
    return form


def build_forms(file: SceneFile, atlas: Atlas, p: Params) -> Dict[str, SceneForm]:
    dimensions = {c.id: c.dimension for c in atlas.charts}
    forms = {}
    for name, spec in file.forms.items():
        pieces = {}
        for chart_id, text in spec.charts.items():
            dimension = _chart_dimension(dimensions, chart_id, f"form {name!r}")
            piece = parse_form(text, chart_id, dimension, p)
            if piece.is_zero():
                piece = Form.zero(chart_id, dimension, spec.degree)
            elif piece.degree != spec.degree:
                raise SceneError(f"form {name!r} on {chart_id!r} has degree {piece.degree}, declared {spec.degree}")
            pieces[chart_id] = piece
        forms[name] = SceneForm.from_mapping(spec.degree, pieces)
    return forms


def build_scene(file: SceneFile, overrides: Optional[Params] = None) -> Scene:
    """
    Build every declared section of a validated scene file.

    Args:
        file: parsed scene file
        overrides: parameter values replacing the file's (e.g. d for O(d))

    Raises:
        SceneError: On bad references, shapes or missing prerequisite sections
        ExpressionParseError: If an embedded expression does not parse
    """
    p: Dict[str, object] = {**file.params, **(overrides or {})}
    atlas = build_atlas(file, p)
    covering = build_covering(file, atlas, p)
    partition = build_partition_of_unity(covering, BumpProfile(file.partition.sharpness)) if covering else None
    bundle = build_bundle(file, atlas, p)
    sections = build_sections(file, bundle, p)
    connections = {}
    if file.connections and bundle is None:
        raise SceneError(f"scene {file.name!r}: connections need a bundle")
    for name, spec in file.connections.items():
        connections[name] = build_connection(name, spec, bundle, sections, covering, p)
    foliation = None
    if file.foliation is not None:
        germ = FoliationGerm(parse_field(file.foliation.a, 2, p), parse_field(file.foliation.b, 2, p))
        foliation = FoliationData(germ, number(file.foliation.center, p), file.foliation.link_radius)
    index = None
    if file.index is not None:
        m = len(file.index.map)
        center = point(file.index.center, p) if file.index.center else tuple(0j for _ in range(m))
        index = IndexMap(tuple(parse_field(c, m, p) for c in file.index.map), center, file.index.radius)
    scene = Scene(
        name=file.name,
        params=p,
        atlas=atlas,
        covering=covering,
        partition=partition,
        honeycomb=build_honeycomb(file, covering, p),
        triangulation=build_triangulation(file, atlas, p),
        bundle=bundle,
        sections=sections,
        connections=connections,
        forms=build_forms(file, atlas, p),
        foliation=foliation,
        index=index,
        extendability=file.extendability,
        expected=tuple(file.expected),
        description=file.description,
    )
    logger.info("[SCENE] built name=%s charts=%s params=%s", file.name, atlas.chart_ids(), p)
    return scene
