"""
Pydantic models for everything bjortho reads or writes as JSON: operator
files, certificates, reports, suite configuration and suite reports.
"""

from typing import Any, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from config import settings
from geometry import Functional, Space, Vector
from operators import Operator

TrialStatus = Literal["pass", "fail", "inconclusive"]


def _check_descriptor(v: str) -> str:
    Space.from_descriptor(v, 1)
    return v.strip().lower()


def _floats(arr) -> List[float]:
    return [float(c) for c in np.asarray(arr).reshape(-1)]


def _jsonable(value: Any) -> Any:
    """numpy scalars and arrays to plain Python, recursively."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


class OperatorFile(BaseModel):
    """Operator JSON format: {"matrix": [[...]], "domain": "lp:2", "codomain": "linf"}."""

    matrix: List[List[float]] = Field(..., min_length=1, description="Rows of the dim_out x dim_in matrix")
    domain: str = Field("lp:2", description="Norm descriptor of the domain")
    codomain: Optional[str] = Field(None, description="Norm descriptor of the codomain (defaults to the domain's)")

    @field_validator("domain", "codomain")
    @classmethod
    def validate_descriptor(cls, v: Optional[str]) -> Optional[str]:
        """Reject descriptors the space parser does not know."""
        return None if v is None else _check_descriptor(v)

    @field_validator("matrix")
    @classmethod
    def validate_rectangular(cls, v: List[List[float]]) -> List[List[float]]:
        """All rows must be nonempty and of equal length."""
        width = len(v[0])
        if width == 0 or any(len(row) != width for row in v):
            raise ValueError("matrix rows must be nonempty and of equal length")
        return v

    def to_operator(self) -> Operator:
        return Operator.from_rows(self.matrix, self.domain, self.codomain or self.domain)

    @classmethod
    def from_operator(cls, T: Operator) -> "OperatorFile":
        return cls(matrix=T.to_rows(), domain=T.domain.descriptor, codomain=T.codomain.descriptor)


class VectorFile(BaseModel):
    """Vector (or functional, with the predual as ``space``) JSON format."""

    coords: List[float] = Field(..., min_length=1, description="Coordinates")
    space: str = Field("lp:2", description="Norm descriptor of the space (the predual for functionals)")

    @field_validator("space")
    @classmethod
    def validate_descriptor(cls, v: str) -> str:
        """Reject descriptors the space parser does not know."""
        return _check_descriptor(v)

    def to_vector(self) -> Vector:
        return Vector(self.coords, Space.from_descriptor(self.space, len(self.coords)))

    def to_functional(self) -> Functional:
        return Functional(self.coords, Space.from_descriptor(self.space, len(self.coords)))

    @classmethod
    def from_vector(cls, v: Vector) -> "VectorFile":
        return cls(coords=v.to_list(), space=v.space.descriptor)

    @classmethod
    def from_functional(cls, f: Functional) -> "VectorFile":
        return cls(coords=f.to_list(), space=f.predual.descriptor)


class CertificateRecord(BaseModel):
    """Serialized orthogonality certificate."""

    verdict: Optional[bool] = Field(..., description="None when inconclusive")
    status: Literal["orthogonal", "not-orthogonal", "inconclusive"]
    lambda_star: float = Field(..., description="Minimizer of lambda -> ||T + lambda A||")
    min_value: float
    left_derivative: float
    right_derivative: float
    norm_T: float
    norm_A: float
    tol: float = Field(..., description="Absolute tolerance on the derivative signs")
    accuracy: float = Field(..., description="Largest accuracy estimate of the norms used")
    method: str = Field(..., description="Operator-norm solver")
    witness: Optional[List[float]] = None

    @classmethod
    def from_certificate(cls, cert) -> "CertificateRecord":
        return cls(
            verdict=cert.verdict,
            status=cert.status,
            lambda_star=cert.lambda_star,
            min_value=cert.min_value,
            left_derivative=cert.left_right_derivs.left,
            right_derivative=cert.left_right_derivs.right,
            norm_T=cert.norm_T,
            norm_A=cert.norm_A,
            tol=cert.tol,
            accuracy=cert.accuracy,
            method=cert.method,
            witness=None if cert.witness is None else cert.witness.to_list(),
        )


class RetrievalRecord(BaseModel):
    """Serialized norm-retrieval report."""

    norm: float
    tol: float
    sup_pos: Optional[float] = None
    sup_neg: Optional[float] = None
    l1_eps: Optional[float] = None
    l2_eps: Optional[float] = None
    l3_eps: Optional[float] = None
    k1: Optional[float] = None
    k2: Optional[float] = None
    l_eps: Optional[float] = None
    eps: Optional[float] = None
    exact_identity: bool = True
    identities: Dict[str, bool] = Field(default_factory=dict)
    witness_x: Optional[List[float]] = None
    witness_y: Optional[List[float]] = None

    @classmethod
    def from_report(cls, report) -> "RetrievalRecord":
        data = {
            name: getattr(report, name)
            for name in (
                "norm", "tol", "sup_pos", "sup_neg", "l1_eps", "l2_eps", "l3_eps",
                "k1", "k2", "l_eps", "eps", "exact_identity", "identities",
            )
        }
        data["witness_x"] = None if report.witness_x is None else _floats(report.witness_x)
        data["witness_y"] = None if report.witness_y is None else _floats(report.witness_y)
        return cls(**data)


class HypothesisPointRecord(BaseModel):
    lam: float
    antipodal_ok: bool


class DistanceRecord(BaseModel):
    """Serialized distance report."""

    dist_min: float = Field(..., ge=0.0)
    dist_sup: float
    agreement: float = Field(..., description="|dist_min - dist_sup|")
    coefficients: List[float]
    lambda0: Optional[float] = None
    norm_T: float
    formula_guaranteed: bool
    hypothesis_grid: List[HypothesisPointRecord] = Field(default_factory=list)

    @classmethod
    def from_report(cls, report) -> "DistanceRecord":
        return cls(
            dist_min=report.dist_min,
            dist_sup=report.dist_sup,
            agreement=report.agreement,
            coefficients=report.coefficients,
            lambda0=report.lambda0,
            norm_T=report.norm_T,
            formula_guaranteed=report.formula_guaranteed,
            hypothesis_grid=[HypothesisPointRecord(lam=p.lam, antipodal_ok=p.antipodal_ok) for p in report.hypothesis_grid],
        )


class CounterexampleRecord(BaseModel):
    """Serialized counterexample checks."""

    norm_T: float
    norm_T_exact: str
    attainment_exact: List[List[str]]
    attainment_ok: bool
    ortho_A1: bool
    ortho_A2: bool
    outside_span: bool
    lhs: float = Field(..., description="dist(T, span{A1, A2})")
    rhs: float = Field(..., description="sup of |<Tx, y>| over y orthogonal to some Bx")
    strict_gap: float
    coefficients: List[float]
    witness_x: List[float]
    witness_y: List[float]
    holds: bool

    @classmethod
    def from_report(cls, report) -> "CounterexampleRecord":
        data = {name: getattr(report, name) for name in cls.model_fields if name != "holds"}
        return cls(holds=report.holds, **data)


class ExperimentRecord(BaseModel):
    """Serialized Euclidean-characterization tallies."""

    space: str
    dim: int
    trials: int
    antipodal_ok: int
    subspace_sphere: int
    violators: List[int]
    fixture_injected: bool
    pointwise_pairs: int = 0
    pointwise_orthogonal: int = 0
    pointwise_witnessed: int = 0

    @classmethod
    def from_summary(cls, summary) -> "ExperimentRecord":
        return cls(**{name: getattr(summary, name) for name in cls.model_fields})


class SuiteConfig(BaseModel):
    """One theorem-suite run."""

    suite: str = Field(..., description="Theorem suite name")
    domain: str = Field("lp:2", description="Norm descriptor of the domain")
    codomain: Optional[str] = Field(None, description="Norm descriptor of the codomain (defaults to the domain's)")
    dims: List[int] = Field(default_factory=settings.get_dims, min_length=1, description="Dimensions, cycled over trials")
    trials: int = Field(settings.SUITE_TRIALS, ge=1)
    seed: int = Field(settings.SEED)
    tol: Optional[float] = Field(None, gt=0.0, description="Suite tolerance override")
    budget: int = Field(settings.ATTAINMENT_BUDGET, ge=1, description="Attainment sample budget")
    eps_values: List[float] = Field(default_factory=settings.get_eps_values, min_length=1, description="Relaxation parameters")
    out: Optional[str] = Field(None, description="Report path")

    @field_validator("domain", "codomain")
    @classmethod
    def validate_descriptor(cls, v: Optional[str]) -> Optional[str]:
        """Reject descriptors the space parser does not know."""
        return None if v is None else _check_descriptor(v)

    @field_validator("dims")
    @classmethod
    def validate_dims(cls, v: List[int]) -> List[int]:
        """Dimensions must be positive."""
        if any(d < 1 for d in v):
            raise ValueError("dimensions must be >= 1")
        return v

    @property
    def codomain_descriptor(self) -> str:
        return self.codomain or self.domain

    def dim_for(self, trial: int) -> int:
        return self.dims[trial % len(self.dims)]


class TrialOutcome(BaseModel):
    """Result of one trial."""

    trial: int = Field(..., ge=0)
    status: TrialStatus
    dim: Optional[int] = None
    metrics: Dict[str, Any] = Field(default_factory=dict, description="Values checked by the suite")
    message: Optional[str] = None

    @field_validator("metrics")
    @classmethod
    def validate_metrics(cls, v: Dict[str, Any]) -> Dict[str, Any]:
        """Metrics must be plain JSON values."""
        return _jsonable(v)


class FailureRecord(BaseModel):
    """Everything needed to re-run one failed trial."""

    suite: str
    trial: int
    seed: int
    config: SuiteConfig
    inputs: Dict[str, Any] = Field(default_factory=dict, description="Serialized operators, vectors, functionals")
    message: str

    @field_validator("inputs")
    @classmethod
    def validate_inputs(cls, v: Dict[str, Any]) -> Dict[str, Any]:
        """Inputs must be plain JSON values."""
        return _jsonable(v)


class SuiteSummary(BaseModel):
    trials: int
    passes: int
    failures: int
    inconclusive: int

    @model_validator(mode="after")
    def validate_counts(self) -> "SuiteSummary":
        """failures + passes + inconclusive = trials."""
        if self.passes + self.failures + self.inconclusive != self.trials:
            raise ValueError("outcome counts must add up to the number of trials")
        return self


class SuiteReport(BaseModel):
    """Schema-versioned suite report; byte-stable for fixed config apart from wall_clock_seconds."""

    schema_version: str = Field(settings.REPORT_SCHEMA_VERSION)
    config: SuiteConfig
    outcomes: List[TrialOutcome]
    failures: List[FailureRecord] = Field(default_factory=list)
    summary: SuiteSummary
    wall_clock_seconds: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def validate_outcomes(self) -> "SuiteReport":
        """Outcomes sorted by trial and consistent with the summary."""
        if [o.trial for o in self.outcomes] != sorted(o.trial for o in self.outcomes):
            raise ValueError("outcomes must be sorted by trial index")
        if len(self.outcomes) != self.summary.trials:
            raise ValueError("summary trial count disagrees with the outcomes")
        return self

    @property
    def exit_code(self) -> int:
        """0 all pass, 1 any failure, 2 inconclusive only."""
        if self.summary.failures:
            return 1
        if self.summary.inconclusive:
            return 2
        return 0
