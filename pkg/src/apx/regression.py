"""One-shot regression suite over the built-in corpus (the `all` command).

Runs every acceptance check category at desk scale and returns a summary
suitable for canonical JSON serialization: per-check pass/fail with the
measured values.  The output must be byte-stable across runs and across
parallelism levels, so nothing time- or thread-dependent may appear in it.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import GateRefusal
from .kernel import partial_sum_via_kernel
from .matrices import builtin, classify, rbvs_constant, strong_mean
from .moduli import ModulusModel
from .norms import besicovitch_norm, omega_modulus, stepanov_norm, wx_modulus
from .poly import APPolynomial, make_test_corpus
from .quadrature import ordered_map
from .rates import (check_condition_6, check_condition_7, check_lemma_1,
                    check_lemma_2, run_norm_experiment,
                    run_pointwise_experiment)

SQRT_HALF = 1.0 / math.sqrt(2.0)


def _check(name, passed, **info):
    entry = {"name": name, "passed": bool(passed)}
    entry.update(info)
    return entry


def _round(x, digits=12):
    if isinstance(x, (list, tuple)):
        return [_round(v, digits) for v in x]
    return float(f"{float(x):.{digits}g}")


def run_all(seed: int = 0, threads: int | None = None) -> dict:
    """Run the regression suite; deterministic in (seed,) only."""
    checks = []
    sin = APPolynomial((1.0,), (-0.5j,), 1.0, label="sin")
    cos = APPolynomial((1.0,), (0.5,), 1.0, label="cos")
    ces = builtin("cesaro")

    v = stepanov_norm(sin, 2.0)
    checks.append(_check("stepanov_sin_s2", abs(v - SQRT_HALF) <= 1e-6,
                         value=_round(v)))
    v = besicovitch_norm(cos, 2.0)
    checks.append(_check("besicovitch_cos_b2", abs(v - SQRT_HALF) <= 1e-4,
                         value=_round(v)))
    deltas = [0.1, 0.5, 1.0]
    omega_vals = [omega_modulus(sin, d, 2.0) for d in deltas]
    omega_ok = all(abs(v - math.sqrt(2.0) * math.sin(d / 2.0)) <= 1e-5
                   for v, d in zip(omega_vals, deltas))
    checks.append(_check("omega_sin_closed_form", omega_ok,
                         values=_round(omega_vals)))
    v = wx_modulus(cos, 0.0, math.pi, 2.0)
    checks.append(_check("wx_cos_sqrt6", abs(v - math.sqrt(6.0)) <= 1e-6,
                         value=_round(v)))

    rep = classify(ces, 64)
    checks.append(_check("classify_cesaro",
                         rep.klass == "both" and rep.uniform_rbvs == 1.0
                         and rep.uniform_hbvs == 0.0,
                         klass=rep.klass, k_rbvs=rep.uniform_rbvs))
    rep = classify(builtin("one_hot"), 64)
    checks.append(_check("classify_one_hot",
                         math.isinf(rep.uniform_rbvs) and rep.uniform_hbvs == 1.0,
                         klass=rep.klass))
    inc = builtin("increasing")
    v = rbvs_constant(inc, 8, 0)
    checks.append(_check("increasing_rbvs_n8", v == 17.0, value=_round(v)))

    ineq_ok = True
    for mat in (ces, builtin("one_hot"), inc):
        rep = classify(mat, 64)
        if not math.isfinite(rep.uniform_hbvs):
            continue
        K = rep.uniform_hbvs
        for n in range(65):
            row = mat.row(n)
            run_max = np.maximum.accumulate(row)
            if np.any(run_max > (K + 1.0) * row + 1e-12):
                ineq_ok = False
    checks.append(_check("head_bound_inequality", ineq_ok))

    v = strong_mean(cos, ces, 3, 2.0, 0.0)
    checks.append(_check("strong_mean_exact", abs(v - SQRT_HALF) <= 1e-12,
                         value=_round(v)))

    w = ModulusModel.power_law(0.25)
    c7 = check_condition_7(w.H)
    c12 = check_lemma_1(w.w, w.H)
    c6 = check_condition_6(w.w, w.H, 2.0, 2.0)
    lemma2_vals = [check_lemma_2(APPolynomial((float(m),), (0.5,), 1.0),
                                 2.0, 2.0) for m in range(1, 9)]
    lemma2_ok = all(abs(r - 1.0 / math.sqrt(math.pi)) <= 1e-6
                    for r in lemma2_vals)
    checks.append(_check("condition_and_lemma_oracles",
                         abs(c7.constant - 4.0) <= 1e-3
                         and abs(c12.constant - 4.0) <= 1e-3
                         and c6.passed and lemma2_ok,
                         C7=_round(c7.constant), C12=_round(c12.constant),
                         C6=_round(c6.constant)))

    corpus = make_test_corpus(seed)
    cases = [(f, k, x) for f in corpus for k in range(7)
             for x in (0.0, 1.0, 2.5)]

    def kernel_err(case):
        f, k, x = case
        r = partial_sum_via_kernel(f, k, x, 1e-5)
        return abs(r.value - f.star_partial_sum(k, x).value)

    errs = ordered_map(kernel_err, cases, threads)
    worst = max(errs)
    checks.append(_check("kernel_truncation_equivalence", worst <= 1e-5,
                         max_abs_err=_round(worst, 6), cases=len(cases)))

    rep = run_pointwise_experiment("T1", cos, 0.0, ces, 2.0, 2.0, w,
                                   n_list=[2, 4, 8, 16, 32, 64])
    checks.append(_check("t1_harness_cos", rep.verdict == "PASS",
                         ratio_sup=_round(rep.ratio_sup, 6)))
    try:
        run_pointwise_experiment("T2", cos, 0.0, builtin("one_hot"),
                                 2.0, 2.0, w, n_list=[2, 4, 8])
        refusal = ""
    except GateRefusal as exc:
        refusal = exc.condition
    checks.append(_check("t2_gate_refusal", refusal == "(4)",
                         condition=refusal))

    rep3 = run_norm_experiment("T3", cos, ces, 2.0, 2.0, 2.0, 2.0, w,
                               n_list=[2, 8, 32])
    rep4 = run_norm_experiment("T4", cos, ces, 2.0, 2.0, 2.0, 2.0, w,
                               n_list=[2, 8, 32])
    ident = max(abs(a.value - b.value) for a, b in zip(rep3.rows, rep4.rows))
    checks.append(_check("t3_t4_uniform_identity",
                         rep3.verdict == "PASS" and rep4.verdict == "PASS"
                         and ident <= 1e-12,
                         identity_gap=_round(ident, 6)))

    rng = np.random.default_rng(seed)
    mats = [ces, inc, builtin("riesz")]
    mono_ok = True
    for _ in range(20):
        f = corpus[int(rng.integers(0, len(corpus)))]
        A = mats[int(rng.integers(0, len(mats)))]
        n = int(rng.integers(1, 48))
        x = float(rng.uniform(-5.0, 5.0))
        q1, q2 = sorted(rng.uniform(0.4, 4.0, size=2))
        if strong_mean(f, A, n, q1, x) > strong_mean(f, A, n, q2, x) + 1e-12:
            mono_ok = False
    checks.append(_check("power_mean_monotonicity", mono_ok))

    return {
        "seed": int(seed),
        "checks": checks,
        "all_passed": all(c["passed"] for c in checks),
    }
