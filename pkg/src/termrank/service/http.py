"""HTTP+JSON front end for the task-allocation service.

create_app wraps a TaskService in a FastAPI application. Domain errors
surface as JSON bodies {"error": <class name>, "detail": <message>}
with a status code per error family: unknown resources and empty pools
map to 404, conflicting or stale writes to 409, malformed requests
to 422.
"""

from __future__ import annotations

from fastapi import FastAPI
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from ..errors import (
    ConflictingResubmission,
    CoverageInfeasible,
    InsufficientWorkers,
    InvalidChoice,
    InvalidDocument,
    InvalidInput,
    NoData,
    NotEnoughStatements,
    NoTaskAvailable,
    StaleAssignment,
    TermRankError,
    UnknownPolicy,
    UnknownStatement,
    UnknownWorker,
)
from ..formats import comparisons_to_csv
from .state import TaskService

__all__ = ["create_app"]

_STATUS_CODES: dict[type, int] = {
    UnknownPolicy: 404,
    UnknownWorker: 404,
    UnknownStatement: 404,
    NoTaskAvailable: 404,
    NoData: 404,
    StaleAssignment: 409,
    ConflictingResubmission: 409,
    InvalidInput: 409,  # only duplicate-registration conflicts reach HTTP
    InvalidChoice: 422,
    InvalidDocument: 422,
    NotEnoughStatements: 422,
    CoverageInfeasible: 422,
    InsufficientWorkers: 422,
}


class PolicyIn(BaseModel):
    raw_text: str
    policy_id: str | None = None
    source_url: str = ""


class WorkerIn(BaseModel):
    worker_id: str | None = None
    qualified: bool = True


class VoteIn(BaseModel):
    worker_id: str
    hit_id: str
    choice: str


class SimulateIn(BaseModel):
    worker_count: int = 6
    noise: float = 0.0
    tie_probability: float = 0.0
    seed: int | None = None
    planted: dict[str, float] | None = None


def create_app(service: TaskService) -> FastAPI:
    app = FastAPI(title="termrank task service")
    app.state.service = service

    @app.exception_handler(TermRankError)
    async def _domain_error(request, exc: TermRankError):
        status = _STATUS_CODES.get(type(exc), 400)
        return JSONResponse(
            status_code=status,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.post("/policies", status_code=201)
    def ingest(body: PolicyIn) -> dict:
        return service.ingest_policy(
            body.raw_text, policy_id=body.policy_id, source_url=body.source_url
        )

    @app.get("/policies")
    def list_policies() -> list[dict]:
        return service.list_policies()

    @app.get("/policies/{policy_id}/statements")
    def statements(policy_id: str) -> list[dict]:
        return service.policy_statements(policy_id)

    @app.post("/policies/{policy_id}/hits", status_code=201)
    def generate_hits(
        policy_id: str, fraction: float = 1.0, seed: int | None = None
    ) -> dict:
        return service.generate_policy_hits(policy_id, fraction=fraction, seed=seed)

    @app.post("/workers", status_code=201)
    def register(body: WorkerIn) -> dict:
        return service.register_worker(body.worker_id, qualified=body.qualified)

    @app.get("/tasks")
    def next_task(worker_id: str) -> dict:
        return service.assign_task(worker_id)

    @app.post("/votes")
    def vote(body: VoteIn) -> dict:
        return service.submit_vote(body.worker_id, body.hit_id, body.choice)

    @app.get("/policies/{policy_id}/status")
    def status(policy_id: str) -> dict:
        return service.policy_status(policy_id)

    @app.get("/policies/{policy_id}/ranking")
    def ranking(policy_id: str) -> dict:
        return service.get_ranking(policy_id)

    @app.get("/policies/{policy_id}/comparisons.csv")
    def comparisons_csv(policy_id: str) -> PlainTextResponse:
        comparisons = service.get_comparisons(policy_id)
        return PlainTextResponse(
            comparisons_to_csv(comparisons), media_type="text/csv"
        )

    @app.post("/policies/{policy_id}/simulate")
    def simulate(policy_id: str, body: SimulateIn) -> dict:
        return service.simulate_workers(
            policy_id,
            worker_count=body.worker_count,
            noise=body.noise,
            planted=body.planted,
            seed=body.seed,
            tie_probability=body.tie_probability,
        )

    return app
