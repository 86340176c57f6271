"""
API endpoints for the cluster braiding verifier.
Exposes mutations, braid evaluation, the Kashaev matrix, the quantum
dilogarithm, octahedron volumes and the verification suite over HTTP.
"""

import logging
from typing import Callable, Dict, List, Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from analytic import DilogParams, faddeev_phi, octahedron_volume
from braid_classical import (
    build_braid_matrix,
    evaluate_braid_word,
    parse_braid_word,
    verify_braid_relations,
)
from check_suite import run_check_suite
from cluster_core import generic_x_seed, generic_y_seed, mutate_sequence
from config import load_settings
from root_of_unity import build_RK
from seed_loader import complex_to_json, matrix_to_dict, parse_complex, seed_from_dict, seed_to_dict

logger = logging.getLogger(__name__)

settings = load_settings()

app = FastAPI(
    title="Cluster Braiding Verifier API",
    description="""
    **Cluster Braiding Verifier API**

    Exact and numerical verification of braid-group actions built from
    cluster mutations, their quantum and root-of-unity versions, and the
    quantum dilogarithm.

    ## Workflow

    1. **Mutate** a seed via `/cluster/mutate`
    2. **Apply** braid words via `/braid/eval`, verify relations via `/braid/verify`
    3. **Fetch** the Kashaev R-matrix via `/rk/{N}`
    4. **Evaluate** Phi via `/phi` and octahedron volumes via `/volume`
    5. **Run** the whole suite via `/checks`
    """,
    version="1.0.0",
    license_info={
        "name": "MIT License",
        "url": "https://opensource.org/licenses/MIT",
    },
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

ComplexIn = Union[float, str, List[float]]


# Request/Response models
class MutateRequest(BaseModel):
    seed: Dict = Field(..., description='{"size": n, "B": [[...]], "x" | "y": ["<ratfunc>", ...]}')
    ks: List[int] = Field(..., description="1-based mutation sequence, applied left to right")


class SeedResponse(BaseModel):
    seed: Dict


class BraidEvalRequest(BaseModel):
    n: int = Field(..., ge=2)
    word: str = Field(..., description='whitespace-separated letters, e.g. "s1 s2^-1 s1"')
    mode: str = Field("y", pattern="^(x|y)$")
    seed: Optional[Dict] = None


class PhiRequest(BaseModel):
    z: ComplexIn
    b: ComplexIn
    mode: str = Field("product", pattern="^(product|integral)$")


class VolumeRequest(BaseModel):
    y: List[ComplexIn]
    i: int = 1


class ValueResponse(BaseModel):
    value: Union[float, List[float]]


class ChecksRequest(BaseModel):
    level: Optional[str] = Field(None, pattern="^(fast|full)$")
    seed: Optional[int] = None
    jobs: Optional[int] = Field(None, ge=1)


def _guarded(compute: Callable):
    """ValueError -> 400, ArithmeticError -> 422, anything else -> 500."""
    try:
        return compute()
    except HTTPException:
        raise
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except ArithmeticError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("Unhandled error")
        raise HTTPException(status_code=500, detail=str(e))


@app.get("/", summary="API Information", tags=["General"])
async def root():
    """Service description and endpoint map."""
    return {
        "message": "Cluster Braiding Verifier API",
        "version": "1.0.0",
        "status": "✅ Running",
        "documentation": {
            "swagger_ui": "/docs",
            "redoc": "/redoc",
            "openapi_json": "/openapi.json",
        },
        "endpoints": {
            "/cluster/mutate": "POST - Mutate a seed along a sequence",
            "/braid/eval": "POST - Apply a braid word to a seed",
            "/braid/verify": "GET - Braid relations on a generic seed",
            "/rk/{N}": "GET - Kashaev R-matrix as matrix JSON",
            "/phi": "POST - Evaluate the quantum dilogarithm",
            "/volume": "POST - Octahedron volume of a y-tuple",
            "/checks": "POST - Run the verification suite",
            "/health": "GET - API health status",
        },
    }


@app.get("/health", tags=["General"])
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "level": settings.level, "max_dim": settings.max_dim}


@app.post("/cluster/mutate", response_model=SeedResponse, tags=["Cluster"])
def cluster_mutate(request: MutateRequest):
    """Mutate a seed given in the seed JSON schema."""
    return _guarded(lambda: {"seed": seed_to_dict(mutate_sequence(seed_from_dict(request.seed), request.ks))})


@app.post("/braid/eval", response_model=SeedResponse, tags=["Braid"])
def braid_eval(request: BraidEvalRequest):
    """Apply a braid word; without a seed the generic seed of the mode is used."""
    def compute():
        word = parse_braid_word(request.word, request.n)
        if request.seed is not None:
            seed = seed_from_dict(request.seed)
        else:
            B = build_braid_matrix(request.n)
            seed = generic_x_seed(B) if request.mode == "x" else generic_y_seed(B)
        return {"seed": seed_to_dict(evaluate_braid_word(word, seed))}

    return _guarded(compute)


@app.get("/braid/verify", tags=["Braid"])
def braid_verify(n: int = 3, mode: str = "y"):
    """Exact braid relations for n strands."""
    if mode not in ("x", "y"):
        raise HTTPException(status_code=400, detail=f"mode must be 'x' or 'y', got {mode!r}")
    return _guarded(lambda: verify_braid_relations(n, mode).to_dict())


@app.get("/rk/{N}", tags=["Root of unity"])
def kashaev_matrix(N: int, mode: str = "complex"):
    """R^K as row-major [re, im] pairs."""
    if N < 1 or N * N > settings.max_dim:
        raise HTTPException(status_code=400, detail=f"N must satisfy 1 <= N^2 <= {settings.max_dim}, got {N}")
    if mode not in ("complex", "cyclotomic"):
        raise HTTPException(status_code=400, detail=f"Unknown mode: {mode!r}")
    return _guarded(lambda: matrix_to_dict(build_RK(N, mode), N))


@app.post("/phi", response_model=ValueResponse, tags=["Analytic"])
def phi_value(request: PhiRequest):
    """Phi(z) for parameter b."""
    def compute():
        p = DilogParams(parse_complex(request.b), request.mode)
        return {"value": complex_to_json(faddeev_phi(parse_complex(request.z), p))}

    return _guarded(compute)


@app.post("/volume", response_model=ValueResponse, tags=["Analytic"])
def volume_value(request: VolumeRequest):
    """Signed octahedron volume of the i-th braiding operator."""
    return _guarded(lambda: {"value": octahedron_volume([parse_complex(v) for v in request.y], request.i)})


@app.post("/checks", tags=["Checks"])
def run_checks(request: ChecksRequest):
    """Run the verification suite and return its report."""
    def compute():
        report = run_check_suite(
            request.level or settings.level,
            seed=settings.seed if request.seed is None else request.seed,
            jobs=request.jobs or settings.jobs,
        )
        return report.to_dict()

    return _guarded(compute)


if __name__ == "__main__":
    import uvicorn
    uvicorn.run(app, host=settings.api_host, port=settings.api_port)
