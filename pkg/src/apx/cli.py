"""Thin command-line client for the compute service.

Every subcommand builds a request model, sends it to the FastAPI app (an
in-process ASGI client by default, or a remote instance via --server) and
formats the response.  Exit codes: 0 success/PASS, 2 hypothesis-gate
refusal, 3 ratio verdict FAIL, 64 usage error, 65 invalid configuration,
70 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

EXIT_OK = 0
EXIT_REFUSED = 2
EXIT_FAIL = 3
EXIT_USAGE = 64
EXIT_CONFIG = 65
EXIT_NUMERIC = 70


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def fmt(x) -> str:
    """Fixed 6-significant-digit formatting for all emitted numbers."""
    return f"{float(x):.6g}"


def canonical_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def parse_deltas(spec: str):
    """Delta grids: 'start:stop:COUNT[log|lin]' or a comma list."""
    if ":" in spec:
        start_s, stop_s, tail = spec.split(":", 2)
        if tail.endswith("log"):
            count, mode = int(tail[:-3]), "log"
        elif tail.endswith("lin"):
            count, mode = int(tail[:-3]), "lin"
        else:
            count, mode = int(tail), "lin"
        start, stop = float(start_s), float(stop_s)
        if count < 1 or start <= 0 and mode == "log":
            raise ValueError(f"bad delta spec {spec!r}")
        import numpy as np
        grid = (np.geomspace if mode == "log" else np.linspace)(start, stop, count)
        return [float(v) for v in grid]
    return [float(v) for v in spec.split(",") if v.strip()]


class Client:
    """POSTs to a remote server when --server is given, else in-process."""

    def __init__(self, server: str | None):
        if server:
            import httpx
            self._client = httpx.Client(base_url=server, timeout=3600.0)
        else:
            import warnings
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient
            from .service import app
            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        if resp.status_code == 422:
            detail = resp.json().get("detail", resp.text)
            raise ConfigFailure(str(detail))
        if resp.status_code >= 500:
            detail = resp.json().get("detail", resp.text)
            raise NumericFailure(str(detail))
        resp.raise_for_status()
        return resp.json()


class ConfigFailure(Exception):
    pass


class NumericFailure(Exception):
    pass


def _function_payload(args) -> dict:
    if getattr(args, "corpus", None):
        return {"corpus": args.corpus, "seed": getattr(args, "seed", 0)}
    if getattr(args, "fn", None):
        with open(args.fn) as fh:
            cfg = json.load(fh)
        return cfg
    raise ConfigFailure("provide --fn FILE or --corpus LABEL")


def _matrix_payload(args) -> dict:
    name = args.matrix
    if name.endswith(".json") or "/" in name:
        with open(name) as fh:
            payload = json.load(fh)
        if "rows" not in payload:
            raise ConfigFailure("matrix file must contain a 'rows' list")
        return {"rows": payload["rows"]}
    if args.weights:
        return {"name": name, "weights": [float(v) for v in args.weights.split(",")]}
    return {"name": name}


def _write(path, text):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_norms(args, client):
    payload = {"fn": _function_payload(args), "p": args.p, "which": args.which}
    out = client.post("/norms", payload)
    print(fmt(out["value"]))
    return EXIT_OK


def cmd_modulus(args, client):
    payload = {
        "fn": _function_payload(args), "p": args.p, "x": args.x,
        "kind": args.kind, "deltas": parse_deltas(args.deltas),
    }
    out = client.post("/modulus", payload)
    lines = ["delta,value"]
    lines += [f"{fmt(r['delta'])},{fmt(r['value'])}" for r in out["rows"]]
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def parse_k_range(spec: str):
    """'0..16' -> (0, 16); a single integer means 0..k."""
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return int(lo), int(hi)
    return 0, int(spec)


def cmd_kernel_check(args, client):
    k_min, k_max = parse_k_range(args.k)
    payload = {
        "fn": _function_payload(args), "k_min": k_min, "k_max": k_max,
        "x_points": args.x_grid, "tol": args.tol,
    }
    out = client.post("/kernel-check", payload)
    lines = ["k,x,kernel_value,truncation_value,abs_err,tail_bound"]
    for r in out["rows"]:
        lines.append(",".join([str(r["k"]), fmt(r["x"]), fmt(r["kernel_value"]),
                               fmt(r["truncation_value"]), fmt(r["abs_err"]),
                               fmt(r["tail_bound"])]))
    _write(args.out, "\n".join(lines) + "\n")
    print(f"max_abs_err={fmt(out['max_abs_err'])}", file=sys.stderr)
    return EXIT_OK


def cmd_classify(args, client):
    payload = {"matrix": _matrix_payload(args), "n_max": args.n_max}
    out = client.post("/classify", payload)
    if not args.per_row:
        out.pop("per_row_K_rbvs", None)
        out.pop("per_row_K_hbvs", None)
    _write(args.out, canonical_json(out))
    return EXIT_OK


def cmd_strong_mean(args, client):
    payload = {
        "fn": _function_payload(args), "matrix": _matrix_payload(args),
        "n": args.n, "q": args.q, "x": args.x, "mode": args.mode,
    }
    if args.gamma:
        payload["gamma"] = [float(v) for v in args.gamma.split(",")]
    out = client.post("/strong-mean", payload)
    print(fmt(out["value"]))
    return EXIT_OK


def _resolve_function_ref(cfg: dict, base: Path) -> dict:
    fn = cfg.get("function")
    if isinstance(fn, dict) and "path" in fn:
        with open(base / fn["path"]) as fh:
            cfg = dict(cfg)
            cfg["function"] = json.load(fh)
    return cfg


def cmd_verify(args, client):
    with open(args.exp) as fh:
        cfg = json.load(fh)
    cfg = _resolve_function_ref(cfg, Path(args.exp).parent)
    if isinstance(cfg.get("matrix"), str):
        cfg["matrix"] = {"name": cfg["matrix"]}
    out = client.post("/verify", cfg)
    status = out["status"]
    if status == "REFUSED":
        print(f"REFUSED: condition {out['condition']} {out.get('detail', '')}".rstrip())
        return EXIT_REFUSED
    report = out["report"]
    lines = ["n,value,rate_term,e_term,bound,ratio"]
    for r in report["rows"]:
        lines.append(",".join(fmt(r[c]) if c != "n" else str(r[c])
                              for c in ("n", "value", "rate_term", "e_term",
                                        "bound", "ratio")))
    _write(args.out, "\n".join(lines) + "\n")
    print(f"{status}: ratio_sup={fmt(report['ratio_sup'])}")
    return EXIT_OK if status == "PASS" else EXIT_FAIL


def cmd_all(args, client):
    payload = {"seed": args.seed}
    if args.threads is not None:
        payload["threads"] = args.threads
    out = client.post("/all", payload)
    Path(args.out).write_text(canonical_json(out))
    for check in out["checks"]:
        print(f"{'PASS' if check['passed'] else 'FAIL'}  {check['name']}")
    print(("ALL PASS" if out["all_passed"] else "FAILURES") + f" -> {args.out}")
    return EXIT_OK if out["all_passed"] else EXIT_FAIL


def cmd_serve(args, client=None):
    import uvicorn
    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> _Parser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--server", default=os.environ.get("APX_SERVER", ""),
                        help="remote service URL (default: in-process)")
    shared.add_argument("--threads", type=int, default=None,
                        help="parallelism cap (also via APX_THREADS)")
    parser = _Parser(prog="apx", description=__doc__, parents=[shared])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_fn(p):
        p.add_argument("--fn", help="function config JSON file")
        p.add_argument("--corpus", help="built-in corpus member label")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("norms", parents=[shared],
                       help="Stepanov / sup / Besicovitch norm")
    add_fn(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--which", choices=["stepanov", "sup", "besicovitch"],
                   default="stepanov")
    p.set_defaults(run=cmd_norms)

    p = sub.add_parser("modulus", parents=[shared],
                       help="modulus of continuity profile (CSV)")
    add_fn(p)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--kind", choices=["wx", "omega"], default="wx")
    p.add_argument("--deltas", default="0.01:3.1415:32log",
                   help="start:stop:COUNT[log|lin] or comma list")
    p.add_argument("--out", default="")
    p.set_defaults(run=cmd_modulus)

    p = sub.add_parser("kernel-check", parents=[shared],
                       help="kernel integral vs spectral truncation (CSV)")
    add_fn(p)
    p.add_argument("--k", default="0..16", help="index range, e.g. 0..16")
    p.add_argument("--x-grid", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--out", default="")
    p.set_defaults(run=cmd_kernel_check)

    p = sub.add_parser("classify", parents=[shared],
                       help="RBVS/HBVS variation report (JSON)")
    p.add_argument("--matrix", required=True,
                   help="builtin name or matrix JSON file")
    p.add_argument("--weights", default="", help="riesz weights, comma list")
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--per-row", action="store_true",
                   help="include per-row constants")
    p.add_argument("--out", default="")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("strong-mean", parents=[shared],
                       help="weighted strong mean at one point")
    add_fn(p)
    p.add_argument("--matrix", required=True)
    p.add_argument("--weights", default="")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--gamma", default="", help="explicit thresholds, comma list")
    p.add_argument("--mode", choices=["direct", "kernel"], default="direct")
    p.set_defaults(run=cmd_strong_mean)

    p = sub.add_parser("verify", parents=[shared],
                       help="run a theorem-rate experiment")
    p.add_argument("--exp", required=True, help="experiment config JSON")
    p.add_argument("--out", default="", help="report CSV path")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("all", parents=[shared],
                       help="full regression over the built-in corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="summary.json")
    p.set_defaults(run=cmd_all)

    p = sub.add_parser("serve", parents=[shared],
                       help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(run=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.threads is not None:
        os.environ["APX_THREADS"] = str(args.threads)
    try:
        if args.command == "serve":
            return cmd_serve(args)
        client = Client(args.server or None)
        return args.run(args, client)
    except ConfigFailure as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
