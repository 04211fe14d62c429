"""
API endpoints of the toolkit
"""

import time
from datetime import datetime, timezone
from typing import Dict, Optional

from fastapi import APIRouter, HTTPException, status

from app.core.config import settings
from app.core.logging import get_logger
from app.schemas.common import ErrorResponse, HealthResponse
from app.schemas.decision import Decision, PsiTrace
from app.schemas.genericity import GenericityReport
from app.schemas.orbits import NilpotentCheckRequest, OrbitChainRequest, OrbitChainResponse
from app.schemas.problem import ProblemFile, SolverOptions
from app.schemas.verification import MatrixTupleDocument
from app.services.dsp_decider import decide, psi_chain
from app.services.problems import (
    check_generic,
    nilpotent_check,
    orbit_chain,
    to_class_tuple,
)
from app.services.realizer import build_tuple
from app.services.verify import verify_tuple

logger = get_logger(__name__)

# Create router
router = APIRouter()

# Track service start time
service_start_time = time.time()

# Error envelopes documented on every POST route
ERROR_RESPONSES = {
    400: {"model": ErrorResponse, "description": "Invalid input"},
    422: {"model": ErrorResponse, "description": "Validation failed or instance refused"},
    503: {"model": ErrorResponse, "description": "Solver failure or budget exceeded"},
}


@router.get("/", response_model=Dict[str, str])
async def root():
    """Root endpoint"""
    return {
        "message": f"{settings.APP_NAME} is running",
        "version": settings.APP_VERSION,
        "docs_url": "/docs",
    }


@router.get("/health", response_model=HealthResponse)
async def health_check():
    """Health check endpoint"""
    try:
        return HealthResponse(
            status="healthy",
            service=settings.APP_NAME,
            version=settings.APP_VERSION,
            timestamp=datetime.now(timezone.utc).isoformat(),
            uptime_seconds=time.time() - service_start_time,
        )
    except Exception as e:
        logger.error(f"Health check failed: {e}")
        raise HTTPException(
            status_code=status.HTTP_503_SERVICE_UNAVAILABLE,
            detail="Service unhealthy",
        )


@router.post("/decide", response_model=Decision, responses=ERROR_RESPONSES)
def decide_problem(
    problem: ProblemFile, s_min: Optional[int] = None, s_max: Optional[int] = None
):
    """Verdict for the Jordan data of a problem; exact enumeration runs in the worker pool"""
    t = to_class_tuple(problem)
    decision = decide(t, problem.mode, s_min, s_max)
    logger.info(f"Decided n={problem.n}: {decision.verdict.value}")
    return decision


@router.post("/reduce", response_model=PsiTrace, responses=ERROR_RESPONSES)
async def reduce_problem(problem: ProblemFile):
    """Reduction chain only"""
    return psi_chain(to_class_tuple(problem).forms)


@router.post("/check-generic", response_model=GenericityReport, responses=ERROR_RESPONSES)
def check_generic_problem(
    problem: ProblemFile,
    s_min: Optional[int] = None,
    s_max: Optional[int] = None,
    limit: Optional[int] = None,
):
    """Genericity of the eigenvalues of a problem"""
    return check_generic(problem, s_min, s_max, limit)


@router.post("/realize", response_model=MatrixTupleDocument, responses=ERROR_RESPONSES)
def realize_problem(problem: ProblemFile, force: bool = False):
    """
    Numerical witness tuple with its verification report.

    Runs in the worker thread pool; the solver is CPU bound.
    """
    t = to_class_tuple(problem)
    result = build_tuple(t, problem.solver or SolverOptions(), force=force)
    report = verify_tuple(result, (problem.solver or SolverOptions()).rank_tolerance)
    return result.to_document(report)


@router.post("/orbit-chain", response_model=OrbitChainResponse, responses=ERROR_RESPONSES)
async def orbit_chain_route(request: OrbitChainRequest):
    """Closure comparison and adjacency chain of two nilpotent orbits"""
    return orbit_chain(request.source, request.target)


@router.post("/nilpotent-check", response_model=Decision, responses=ERROR_RESPONSES)
async def nilpotent_check_route(request: NilpotentCheckRequest):
    """Existence of nice tuples in nilpotent classes"""
    return nilpotent_check(request.n, request.partitions)
