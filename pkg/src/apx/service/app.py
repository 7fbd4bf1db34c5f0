"""FastAPI service wrapping the core package.

Domain outcomes (PASS/FAIL/REFUSED) are payload, not HTTP errors; invalid
configurations map to 422 and numeric contract failures to 500.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from ..errors import ConfigError, GateRefusal, NumericError
from ..kernel import partial_sum_via_kernel
from ..matrices import classify, strong_mean
from ..moduli import ModulusModel
from ..norms import compute_norm, omega_modulus, wx_modulus
from ..rates import run_norm_experiment, run_pointwise_experiment
from ..regression import run_all
from .schemas import (AllRequest, ClassifyRequest, DeltaValue,
                      ExperimentConfig, KernelCheckRequest, KernelCheckResponse,
                      KernelCheckRow, ModulusRequest, ModulusResponse,
                      NormsRequest, StrongMeanRequest, ValueResponse,
                      VerifyResponse)

app = FastAPI(title="apx", description="strong approximation compute service")


def _domain(call):
    try:
        return call()
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc))
    except NumericError as exc:
        raise HTTPException(status_code=500, detail=str(exc))


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/norms", response_model=ValueResponse)
def norms(req: NormsRequest):
    def call():
        f = req.fn.build()
        return ValueResponse(value=compute_norm(f, req.which, req.p))
    return _domain(call)


@app.post("/modulus", response_model=ModulusResponse)
def modulus(req: ModulusRequest):
    def call():
        f = req.fn.build()
        rows = []
        for d in req.deltas:
            if req.kind == "omega":
                v = omega_modulus(f, d, req.p)
            else:
                v = wx_modulus(f, req.x, d, req.p)
            rows.append(DeltaValue(delta=d, value=v))
        return ModulusResponse(rows=rows)
    return _domain(call)


@app.post("/kernel-check", response_model=KernelCheckResponse)
def kernel_check(req: KernelCheckRequest):
    def call():
        f = req.fn.build()
        if not 0 <= req.k_min <= req.k_max:
            raise ConfigError(
                f"need 0 <= k_min <= k_max, got {req.k_min}..{req.k_max}")
        xs = np.linspace(0.0, 3.5, req.x_points)
        rows = []
        worst = 0.0
        for k in range(req.k_min, req.k_max + 1):
            for x in xs:
                r = partial_sum_via_kernel(f, k, float(x), req.tol)
                s = f.star_partial_sum(k, float(x))
                err = abs(r.value - s.value)
                worst = max(worst, err)
                rows.append(KernelCheckRow(
                    k=k, x=float(x), kernel_value=r.value,
                    truncation_value=s.value, abs_err=err,
                    tail_bound=r.tail_bound))
        return KernelCheckResponse(rows=rows, max_abs_err=worst)
    return _domain(call)


@app.post("/classify")
def classify_endpoint(req: ClassifyRequest):
    def call():
        return classify(req.matrix.build(), req.n_max).to_dict()
    return _domain(call)


@app.post("/strong-mean", response_model=ValueResponse)
def strong_mean_endpoint(req: StrongMeanRequest):
    def call():
        f = req.fn.build()
        A = req.matrix.build()
        v = strong_mean(f, A, req.n, req.q, req.x, gamma=req.gamma,
                        mode=req.mode)
        return ValueResponse(value=v)
    return _domain(call)


@app.post("/verify", response_model=VerifyResponse)
def verify(req: ExperimentConfig):
    def call():
        f = req.function.build()
        A = req.matrix.build()
        w = ModulusModel.power_law(req.beta, req.c, h_beta=req.h_beta)
        try:
            if req.kind in ("T1", "T2"):
                report = run_pointwise_experiment(
                    req.kind, f, req.x, A, req.p, req.q, w,
                    n_list=req.n_list, gamma=req.gamma)
            else:
                report = run_norm_experiment(
                    req.kind, f, A, req.p, req.q, req.q_prime, req.p_tilde,
                    w, n_list=req.n_list, x_points=req.x_points,
                    gamma=req.gamma)
        except GateRefusal as exc:
            return VerifyResponse(status="REFUSED", condition=exc.condition,
                                  detail=exc.detail)
        payload = report.to_dict()
        payload["config"] = req.model_dump()
        return VerifyResponse(status=report.verdict, report=payload)
    return _domain(call)


@app.post("/all")
def run_all_endpoint(req: AllRequest):
    def call():
        return run_all(req.seed, threads=req.threads)
    return _domain(call)
