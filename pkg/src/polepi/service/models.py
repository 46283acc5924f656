"""Request/response models of the HTTP API."""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from polepi.engine import Params
from polepi.graph import GraphSpec


class HealthResponse(BaseModel):
    status: str
    version: str


class SampleModel(BaseModel):
    step: int
    psi: float
    rho_a: float
    rho_i: float


class RunRequest(BaseModel):
    params: Params = Params()
    overrides: dict[str, Any] = Field(default_factory=dict)


class RunResponse(BaseModel):
    params: Params
    params_digest: str
    seed: int
    final: SampleModel
    samples: list[SampleModel]
    csv: str


class CampaignRequest(BaseModel):
    name: Literal[
        "gamma-sweep", "scenario-mild", "scenario-severe", "heatmap", "epsilon-calibration"
    ]
    out_dir: str
    profile: Literal["desk", "full"] = "desk"
    base_seed: int = Field(default=0, ge=0, lt=2**64)
    workers: Optional[int] = Field(default=None, ge=1)
    replicates: Optional[int] = Field(default=None, ge=1)
    overrides: dict[str, Any] = Field(default_factory=dict)
    shared_graph: bool = False


class JobResponse(BaseModel):
    job_id: str
    name: str
    state: Literal["queued", "running", "done", "failed"]
    done: int
    total: int
    error: Optional[str] = None
    csv_path: Optional[str] = None
    manifest_path: Optional[str] = None
    extra_paths: dict[str, str] = Field(default_factory=dict)


class AnalyzeRequest(BaseModel):
    # scenario label -> runs CSV text (engine schema)
    tables: dict[str, str]


class ReportRowModel(BaseModel):
    metric: str
    scenario: str
    value: Optional[float]
    n: int
    dropped: int


class AggRowModel(BaseModel):
    gamma: float
    psi_mean: float
    psi_std: Optional[float]
    rho_a_mean: float
    rho_a_std: Optional[float]
    rho_i_mean: float
    rho_i_std: Optional[float]
    n: int


class AnalyzeResponse(BaseModel):
    report: list[ReportRowModel]
    report_csv: str
    aggregates_csv: dict[str, str]
    summary: str


class GraphExportRequest(BaseModel):
    spec: GraphSpec = GraphSpec()


class GraphExportResponse(BaseModel):
    nodes: int
    edges: int
    content: str


class ErrorResponse(BaseModel):
    category: str
    detail: str
