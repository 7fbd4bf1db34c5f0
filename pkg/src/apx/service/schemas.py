"""Pydantic request/response models for the compute service."""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..errors import ConfigError
from ..matrices import SummabilityMatrix, builtin, matrix_from_rows
from ..poly import APPolynomial, from_config, make_test_corpus


class TermModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    lambda_: float = Field(alias="lambda")
    re: float = 0.0
    im: float = 0.0


class FunctionModel(BaseModel):
    """Inline spectrum, or a reference into the built-in corpus by label."""

    model_config = ConfigDict(extra="forbid")

    alpha: Optional[float] = None
    terms: Optional[List[TermModel]] = None
    label: str = ""
    corpus: Optional[str] = None
    seed: int = 0

    def build(self) -> APPolynomial:
        if self.corpus is not None:
            members = {f.label: f for f in make_test_corpus(self.seed)}
            if self.corpus not in members:
                raise ConfigError(
                    f"unknown corpus member {self.corpus!r}; "
                    f"have {sorted(members)}")
            return members[self.corpus]
        if self.alpha is None or self.terms is None:
            raise ConfigError("function needs either corpus or alpha+terms")
        return from_config({
            "alpha": self.alpha,
            "terms": [{"lambda": t.lambda_, "re": t.re, "im": t.im}
                      for t in self.terms],
            "label": self.label,
        })


class MatrixModel(BaseModel):
    """Named generator, riesz weights, or explicit rows."""

    model_config = ConfigDict(extra="forbid")

    name: Optional[str] = None
    weights: Optional[List[float]] = None
    rows: Optional[List[List[float]]] = None

    def build(self) -> SummabilityMatrix:
        if self.rows is not None:
            return matrix_from_rows(self.rows)
        if self.name is None:
            raise ConfigError("matrix needs a name or explicit rows")
        return builtin(self.name, weights=self.weights)


class NormsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fn: FunctionModel
    p: float = 2.0
    which: Literal["stepanov", "sup", "besicovitch"] = "stepanov"


class ValueResponse(BaseModel):
    value: float


class ModulusRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fn: FunctionModel
    p: float = 2.0
    x: float = 0.0
    kind: Literal["wx", "omega"] = "wx"
    deltas: List[float]


class DeltaValue(BaseModel):
    delta: float
    value: float


class ModulusResponse(BaseModel):
    rows: List[DeltaValue]


class KernelCheckRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fn: FunctionModel
    k_min: int = 0
    k_max: int = 16
    x_points: int = 8
    tol: float = 1e-5


class KernelCheckRow(BaseModel):
    k: int
    x: float
    kernel_value: float
    truncation_value: float
    abs_err: float
    tail_bound: float


class KernelCheckResponse(BaseModel):
    rows: List[KernelCheckRow]
    max_abs_err: float


class ClassifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    matrix: MatrixModel
    n_max: int = 64


class StrongMeanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    fn: FunctionModel
    matrix: MatrixModel
    n: int
    q: float = 2.0
    x: float = 0.0
    gamma: Optional[List[float]] = None
    mode: Literal["direct", "kernel"] = "direct"


class ExperimentConfig(BaseModel):
    """Flat experiment schema: unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    kind: Literal["T1", "T2", "T3", "T4"]
    function: FunctionModel
    matrix: MatrixModel
    p: float = 2.0
    q: float = 2.0
    q_prime: float = 2.0
    p_tilde: float = 2.0
    beta: float = 0.25
    c: float = 1.0
    h_beta: Optional[float] = None
    n_list: Optional[List[int]] = None
    x: float = 0.0
    x_points: int = 64
    gamma: Optional[List[float]] = None
    seed: int = 0


class VerifyResponse(BaseModel):
    status: Literal["PASS", "FAIL", "REFUSED"]
    condition: str = ""
    detail: str = ""
    report: Optional[dict] = None


class AllRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 0
    threads: Optional[int] = None
