"""
Data Models
===========
Defines the scene-file schema, the report schema and small value types used
throughout the package. These are structural definitions only; parsing of the
embedded expressions happens in the scene layer.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

Scalar = Union[int, float, str]


class RegionKind(str, Enum):
    """Shapes of chart regions."""
    DISK = "disk"
    ANNULUS = "annulus"
    COMPLEMENT = "complement"
    PLANE = "plane"
    BOX = "box"


class Feasibility(str, Enum):
    """Outcome of a truncated subalgebra-membership test."""
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"


class VerdictStatus(str, Enum):
    """Pass/fail of a single check."""
    PASS = "pass"
    FAIL = "fail"


@dataclass(frozen=True)
class ChartPoint:
    """A point given in the coordinates of one chart."""
    chart_id: str
    coords: Tuple[complex, ...]


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a numeric integral with its error estimate and the cells used."""
    value: complex
    error: float
    cells: int

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(self.value + other.value, self.error + other.error, self.cells + other.cells)

    def __neg__(self) -> "QuadratureResult":
        return QuadratureResult(-self.value, self.error, self.cells)

    def __sub__(self, other: "QuadratureResult") -> "QuadratureResult":
        return self + (-other)

    def scaled(self, factor: float) -> "QuadratureResult":
        return QuadratureResult(factor * self.value, abs(factor) * self.error, self.cells)

    @classmethod
    def zero(cls) -> "QuadratureResult":
        return cls(0j, 0.0, 0)


# ---------------------------------------------------------------------------
# Scene file schema
# ---------------------------------------------------------------------------


class RegionSpec(BaseModel):
    """
    A region of one chart: disk, annulus, complement of a disk, the whole plane,
    or a box (product of coordinate squares).
    """
    chart: str = Field(..., description="Chart the region is described in")
    kind: RegionKind = Field(default=RegionKind.PLANE, description="Region shape")
    center: List[Scalar] = Field(default_factory=list, description="Center, one expression per coordinate")
    inner: float = Field(default=0.0, description="Inner radius (annulus, complement)")
    outer: float = Field(default=1.0, description="Outer radius (disk, annulus) or box half-width")

    class Config:
        json_schema_extra = {
            "example": {"chart": "U0", "kind": "disk", "center": ["0"], "outer": 0.5}
        }


class ChartSpec(BaseModel):
    """
    A coordinate chart.
    """
    id: str = Field(..., description="Chart identifier")
    dimension: int = Field(..., ge=1, description="Complex dimension of the chart")
    domain: Optional[RegionSpec] = Field(default=None, description="Where sampled checks draw points")
    periods: Optional[List[str]] = Field(default=None, description="Lattice periods of a torus chart")
    singular_points: List[List[Scalar]] = Field(default_factory=list, description="Optional singular-locus markers")

    class Config:
        json_schema_extra = {
            "example": {"id": "U0", "dimension": 1, "domain": {"chart": "U0", "kind": "box", "outer": 1.5}}
        }


class TransitionSpec(BaseModel):
    """
    Coordinate change: target coordinates as holomorphic expressions of source coordinates.
    """
    source: str = Field(..., description="Source chart id")
    target: str = Field(..., description="Target chart id")
    components: List[str] = Field(..., description="Target coordinates in source variables z1..zn")


class CoveringDiskSpec(BaseModel):
    """
    One component of V1: a disk of radius `outer` around `center`; V0 misses the
    closed disk of radius `inner`.
    """
    chart: str = Field(..., description="Chart of the disk")
    center: List[Scalar] = Field(..., description="Center coordinates")
    inner: float = Field(..., gt=0, description="Radius of the disk removed from V0")
    outer: float = Field(..., gt=0, description="Radius of the V1 disk")


class CoveringSpec(BaseModel):
    """
    Two-set covering V = {V0, V1} given by singular disks, plus an optional adapted set Z.
    """
    disks: List[CoveringDiskSpec] = Field(default_factory=list, description="Components of V1")
    adapted_set: List[RegionSpec] = Field(default_factory=list, description="Regions making up Z (must lie in V0)")


class PartitionSpec(BaseModel):
    """
    Bump profile of the partition of unity.
    """
    sharpness: int = Field(default=1, ge=1, description="Exponent applied to the bump profile")


class MarkSpec(BaseModel):
    chart: str = Field(..., description="Chart of the mark")
    point: List[Scalar] = Field(..., description="Mark coordinates")


class HoneycombSpec(BaseModel):
    """
    Honeycomb cell system: one singular disk per mark.
    """
    radius: float = Field(..., gt=0, description="Radius of the singular cells")
    marks: Optional[List[MarkSpec]] = Field(default=None, description="Marks; defaults to the covering disk centers")


class SimplexSpec(BaseModel):
    """
    One oriented simplex of a chain or triangulation: affine (vertices) or parametric
    (components in t1..tk over the standard simplex or the unit square/cube).
    """
    chart: str = Field(..., description="Chart the simplex maps into")
    vertices: Optional[List[List[Scalar]]] = Field(default=None, description="Affine simplex vertices")
    components: Optional[List[str]] = Field(default=None, description="Parametrization in t1..tk")
    order: Optional[int] = Field(default=None, description="Simplex dimension k for parametric simplices")
    domain: Literal["simplex", "square"] = Field(default="simplex", description="Parameter domain")
    sign: int = Field(default=1, description="Orientation sign (+1 or -1)")
    label: str = Field(default="", description="Optional identifier used in diagnostics")

    class Config:
        json_schema_extra = {
            "example": {"chart": "U0", "vertices": [["0"], ["1-i"], ["1+i"]], "sign": 1}
        }


class TriangulationSpec(BaseModel):
    simplices: List[SimplexSpec] = Field(..., description="Top-dimensional simplices")


class BundleTransitionSpec(BaseModel):
    """
    g_{source,target}: e_target = e_source * g, entries in the source chart's coordinates.
    """
    source: str = Field(..., description="Chart alpha")
    target: str = Field(..., description="Chart beta")
    matrix: List[List[str]] = Field(..., description="e x e holomorphic matrix in alpha coordinates")


class BundleSpec(BaseModel):
    rank: int = Field(..., ge=1, description="Fibre rank e")
    transitions: List[BundleTransitionSpec] = Field(default_factory=list, description="Transition matrices")


class SectionSpec(BaseModel):
    """
    An r-section: per chart, an e x r matrix whose columns are the components.
    """
    charts: Dict[str, List[List[str]]] = Field(..., description="Per-chart e x r matrices")


class ConnectionSpec(BaseModel):
    """
    A connection, either trivial along a frame or given by explicit connection-form matrices.
    """
    kind: Literal["frame", "forms"] = Field(..., description="How the connection is given")
    frame: Optional[str] = Field(default=None, description="'standard' or a section name (kind = frame)")
    region: Literal["V0", "V1", "all"] = Field(default="all", description="Where the connection lives")
    charts: Optional[Dict[str, List[List[str]]]] = Field(default=None, description="Per-chart matrices of 1-forms")


class FoliationSpec(BaseModel):
    """
    Germ a(h,y) h d/dh + b(h,y) d/dy on a two-variable chart (z1 = h, z2 = y).
    """
    a: str = Field(..., description="a(h, y) in z1, z2")
    b: str = Field(..., description="b(h, y) in z1, z2")
    center: Scalar = Field(default="0", description="Singular point on the y-line")
    link_radius: float = Field(default=0.5, gt=0, description="Radius of the link circle")


class IndexSpec(BaseModel):
    """
    Local representative of a section as a map to C^m, for Bochner-Martinelli indices.
    """
    map: List[str] = Field(..., description="Components f_1..f_m in z1..zm")
    center: List[Scalar] = Field(default_factory=list, description="Center of the sphere")
    radius: float = Field(default=1.0, gt=0, description="Sphere radius")


class FormSpec(BaseModel):
    degree: int = Field(..., ge=0, description="Form degree")
    charts: Dict[str, str] = Field(..., description="Per-chart form expressions")


class ExtendabilitySpec(BaseModel):
    """
    Data of the Bloom-Herrera obstruction computation.
    """
    map: List[str] = Field(..., description="Parametrization of the curve, in z1")
    form: str = Field(..., description="Holomorphic 1-form on the ambient space")
    max_degree: int = Field(default=20, ge=1, description="Truncation degree N")


class ExpectedSpec(BaseModel):
    """
    One self-check of a packaged scene.
    """
    command: str = Field(..., description="Command to run, e.g. 'chern'")
    flags: Dict[str, Any] = Field(default_factory=dict, description="Flags of the command")
    key: str = Field(..., description="Result key to compare")
    value: Union[float, int, str, List[float]] = Field(..., description="Expected value")
    tol: float = Field(default=1e-6, description="Accepted absolute deviation")


class SceneFile(BaseModel):
    """
    A scene file: the complete model a command runs on. Every section is optional;
    commands name the sections they require.
    """
    name: str = Field(..., description="Scene name")
    description: str = Field(default="", description="Free text")
    params: Dict[str, Scalar] = Field(default_factory=dict, description="Named parameters of the expressions")
    charts: List[ChartSpec] = Field(default_factory=list, description="Charts")
    transitions: List[TransitionSpec] = Field(default_factory=list, description="Transition maps")
    covering: Optional[CoveringSpec] = Field(default=None, description="Two-set covering")
    partition: PartitionSpec = Field(default_factory=PartitionSpec, description="Partition profile")
    honeycomb: Optional[HoneycombSpec] = Field(default=None, description="Honeycomb cell system")
    triangulation: Optional[TriangulationSpec] = Field(default=None, description="Fundamental chain")
    bundle: Optional[BundleSpec] = Field(default=None, description="Vector bundle")
    sections: Dict[str, SectionSpec] = Field(default_factory=dict, description="Named r-sections")
    connections: Dict[str, ConnectionSpec] = Field(default_factory=dict, description="Named connections")
    forms: Dict[str, FormSpec] = Field(default_factory=dict, description="Named scene forms")
    foliation: Optional[FoliationSpec] = Field(default=None, description="Foliation germ")
    index: Optional[IndexSpec] = Field(default=None, description="Section representative for indices")
    extendability: Optional[ExtendabilitySpec] = Field(default=None, description="Obstruction data")
    expected: List[ExpectedSpec] = Field(default_factory=list, description="Self-checks")

    class Config:
        json_schema_extra = {
            "example": {
                "name": "torus_area",
                "charts": [{"id": "T", "dimension": 1, "periods": ["1", "i"]}],
                "forms": {"area": {"degree": 2, "charts": {"T": "(i/2)*dz1^dzbar1"}}},
            }
        }


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


class NumericResult(BaseModel):
    """
    A named complex number with its quadrature diagnostics. Complex values are [re, im].
    """
    name: str = Field(..., description="Result key")
    value: List[float] = Field(..., description="[re, im]")
    error: float = Field(default=0.0, description="Quadrature error estimate")
    cells: int = Field(default=0, description="Quadrature cells used")


class Verdict(BaseModel):
    """
    Outcome of one check.
    """
    name: str = Field(..., description="Check name")
    status: VerdictStatus = Field(..., description="pass or fail")
    measured: Optional[float] = Field(default=None, description="Measured deviation")
    tol: Optional[float] = Field(default=None, description="Tolerance applied")
    detail: str = Field(default="", description="Free text")


class ResiduePoint(BaseModel):
    chart: str = Field(..., description="Chart of the singular point")
    point: List[List[float]] = Field(..., description="Coordinates as [re, im] pairs")
    local: List[float] = Field(..., description="Local residue [re, im]")
    error: float = Field(default=0.0, description="Quadrature error of the local residue")
    cells: int = Field(default=0, description="Quadrature cells of the local residue")
    disk_term: List[float] = Field(..., description="Integral of c(nabla1) over the singular cell")
    link_term: List[float] = Field(..., description="Integral of the Bott form over the interface")


class ResidueReport(BaseModel):
    """
    Per-point residues against the global Chern integral.
    """
    q: int = Field(..., description="Chern degree")
    points: List[ResiduePoint] = Field(default_factory=list, description="Singular points and residues")
    global_value: List[float] = Field(..., description="Integral of the glued Chern form over [X]")
    global_error: float = Field(default=0.0, description="Quadrature error of the global integral")
    global_cells: int = Field(default=0, description="Quadrature cells of the global integral")
    local_sum: List[float] = Field(..., description="Sum of the local residues")
    local_error: float = Field(default=0.0, description="Summed quadrature error of the local residues")
    local_cells: int = Field(default=0, description="Summed quadrature cells of the local residues")
    discrepancy: float = Field(..., description="|global - sum of locals|")
    integral_check: bool = Field(default=False, description="Whether locals were required to be integers")


class MembershipResult(BaseModel):
    """
    Truncated subalgebra-membership outcome.
    """
    status: Feasibility = Field(..., description="FEASIBLE or INFEASIBLE")
    max_degree: int = Field(..., description="Truncation degree N")
    obstruction_degree: Optional[int] = Field(default=None, description="Lowest inconsistent degree")
    certificate: Dict[str, str] = Field(default_factory=dict, description="c_ab coefficients as exact strings")


class SweepEntry(BaseModel):
    """
    Membership at one truncation degree.
    """
    degree: int = Field(..., description="Truncation degree N")
    status: Feasibility = Field(..., description="FEASIBLE or INFEASIBLE")
    certificate_verified: Optional[bool] = Field(
        default=None, description="Whether the FEASIBLE certificate reproduces the primitive; unset when INFEASIBLE"
    )


class ObstructionReport(BaseModel):
    """
    Bloom-Herrera pipeline: pulled-back form, primitive and membership.
    """
    pulled_back: str = Field(..., description="f^*(omega) as text")
    primitive: Dict[str, str] = Field(..., description="Primitive h: degree -> coefficient")
    membership: MembershipResult = Field(..., description="Membership outcome")
    sweep: List[SweepEntry] = Field(default_factory=list, description="Membership per truncation degree, ascending")
    conclusion: str = Field(..., description="Worded conclusion")

    def status_at(self, degree: int) -> Feasibility:
        for entry in self.sweep:
            if entry.degree == degree:
                return entry.status
        raise KeyError(f"degree {degree} is outside the sweep")


class StokesReport(BaseModel):
    """
    One Stokes comparison.
    """
    interior: List[float] = Field(..., description="Integral of d(omega) over the chain")
    boundary: List[float] = Field(..., description="Integral of omega over the boundary")
    difference: float = Field(..., description="|interior - boundary|")
    passed: bool = Field(..., description="difference < tol")


class Report(BaseModel):
    """
    Deterministic command report; no timestamps.
    """
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=1, alias="schema", description="Report schema version")
    command: str = Field(..., description="Command echo")
    scene: Optional[str] = Field(default=None, description="Scene name")
    flags: Dict[str, Any] = Field(default_factory=dict, description="Effective flags")
    results: List[NumericResult] = Field(default_factory=list, description="Numeric results")
    verdicts: List[Verdict] = Field(default_factory=list, description="Checks")
    details: Dict[str, Any] = Field(default_factory=dict, description="Command-specific structured output")
    passed: bool = Field(..., description="All verdicts pass")
    convention_memo_sha256: str = Field(..., description="Hash of the sign-convention memo")
