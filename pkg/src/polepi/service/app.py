"""FastAPI application exposing runs, campaigns, analysis and graph export."""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import polepi
from polepi.analysis import analyze_tables, aggregates_to_csv, parse_runs_text, report_to_csv, summary_text
from polepi.engine import Params, params_digest, record_rows, run
from polepi.errors import PolepiError
from polepi.experiments import CSV_COLUMNS, apply_overrides, run_campaign
from polepi.graph import cached_holme_kim, generate_holme_kim
from polepi.service.jobs import JobStore
from polepi.service.models import (
    AnalyzeRequest,
    AnalyzeResponse,
    AggRowModel,
    CampaignRequest,
    GraphExportRequest,
    GraphExportResponse,
    HealthResponse,
    JobResponse,
    ReportRowModel,
    RunRequest,
    RunResponse,
    SampleModel,
)


def _nan_to_none(x: float):
    return None if (x != x) else x


def _job_response(job) -> JobResponse:
    return JobResponse(
        job_id=job.job_id,
        name=job.name,
        state=job.state,
        done=job.done,
        total=job.total,
        error=job.error,
        csv_path=job.csv_path,
        manifest_path=job.manifest_path,
        extra_paths={k: str(v) for k, v in job.extra_paths.items()},
    )


def create_app() -> FastAPI:
    app = FastAPI(title="polepi", version=polepi.__version__)
    jobs = JobStore()

    @app.exception_handler(PolepiError)
    async def _polepi_error(_request: Request, exc: PolepiError):
        return JSONResponse(
            status_code=400, content={"category": exc.category, "detail": str(exc)}
        )

    @app.exception_handler(OSError)
    async def _io_error(_request: Request, exc: OSError):
        return JSONResponse(status_code=500, content={"category": "io", "detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=polepi.__version__)

    @app.get("/defaults", response_model=Params)
    def defaults():
        return Params()

    @app.post("/runs", response_model=RunResponse)
    def run_single(req: RunRequest):
        params = apply_overrides(req.params, req.overrides)
        graph = cached_holme_kim(params.graph)
        rec = run(graph, params)
        csv_text = ",".join(CSV_COLUMNS) + "\n"
        csv_text += "\n".join(",".join(r) for r in record_rows(params, rec)) + "\n"
        samples = [SampleModel(step=s.step, psi=s.psi, rho_a=s.rho_a, rho_i=s.rho_i)
                   for s in rec.samples]
        final = SampleModel(
            step=rec.final.step, psi=rec.final.psi, rho_a=rec.final.rho_a, rho_i=rec.final.rho_i
        )
        return RunResponse(
            params=params,
            params_digest=rec.params_digest,
            seed=rec.seed,
            final=final,
            samples=samples,
            csv=csv_text,
        )

    @app.post("/campaigns", response_model=JobResponse)
    def submit_campaign(req: CampaignRequest):
        from polepi.experiments import build_sweep_specs

        specs = build_sweep_specs(  # validates name/profile/overrides up front
            req.name,
            profile=req.profile,
            base_seed=req.base_seed,
            workers=req.workers,
            replicates=req.replicates,
            overrides=req.overrides,
            shared_graph=req.shared_graph,
        )
        total = sum(s.total_runs() for s in specs)

        def work(job):
            def progress(done, _total):
                job.done = done

            result = run_campaign(
                req.name,
                req.out_dir,
                profile=req.profile,
                base_seed=req.base_seed,
                workers=req.workers,
                replicates=req.replicates,
                overrides=req.overrides,
                shared_graph=req.shared_graph,
                progress=progress,
            )
            job.done = total
            job.csv_path = str(result.csv_path)
            job.manifest_path = str(result.manifest_path)
            job.extra_paths = {k: str(v) for k, v in result.extra_paths.items()}

        return _job_response(jobs.submit(req.name, total, work))

    @app.get("/jobs", response_model=list[JobResponse])
    def list_jobs():
        return [_job_response(j) for j in jobs.all()]

    @app.get("/jobs/{job_id}", response_model=JobResponse)
    def get_job(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return JSONResponse(
                status_code=404,
                content={"category": "config", "detail": f"unknown job id {job_id!r}"},
            )
        return _job_response(job)

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(req: AnalyzeRequest):
        tables = {label: parse_runs_text(text, label) for label, text in req.tables.items()}
        report, aggregates = analyze_tables(tables)
        report_models = [
            ReportRowModel(
                metric=r.metric, scenario=r.scenario, value=r.value, n=r.n, dropped=r.dropped
            )
            for r in report
        ]
        agg_csv = {
            label: aggregates_to_csv(aggregates[label], tables[label]) for label in aggregates
        }
        agg_models = {}
        for label, aggs in aggregates.items():
            agg_models[label] = [
                AggRowModel(
                    gamma=a.key[0],
                    psi_mean=a.psi_mean,
                    psi_std=_nan_to_none(a.psi_std),
                    rho_a_mean=a.rho_a_mean,
                    rho_a_std=_nan_to_none(a.rho_a_std),
                    rho_i_mean=a.rho_i_mean,
                    rho_i_std=_nan_to_none(a.rho_i_std),
                    n=a.n,
                )
                for a in aggs
            ]
        return AnalyzeResponse(
            report=report_models,
            report_csv=report_to_csv(report),
            aggregates_csv=agg_csv,
            summary=summary_text(report),
        )

    @app.post("/graph/export", response_model=GraphExportResponse)
    def graph_export(req: GraphExportRequest):
        g = generate_holme_kim(req.spec)
        return GraphExportResponse(nodes=g.node_count, edges=g.edge_count, content=g.to_edgelist())

    return app
