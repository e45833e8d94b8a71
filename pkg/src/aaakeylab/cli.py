"""Thin command line client for the lab service.

Every command speaks JSON to the FastAPI app, which runs in-process by
default or remotely via --server, then writes the returned report files
under --out.  Exit codes: 0 success, 1 invalid input or transport
failure, 2 verification found a failing check.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import httpx

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CHECK_FAILED = 2


def _post(server: Optional[str], path: str, payload: dict) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            return client.post(path, json=payload)

    async def _go() -> httpx.Response:
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://lab", timeout=None
        ) as client:
            return await client.post(path, json=payload)

    return asyncio.run(_go())


def _detail(resp: httpx.Response) -> str:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        return resp.text
    if isinstance(detail, str):
        return detail
    lines = []
    for item in detail:
        loc = ".".join(str(part) for part in item.get("loc", ()) if part != "body")
        lines.append(f"{loc}: {item.get('msg', 'invalid')}")
    return "; ".join(lines)


def _write_files(out_dir: Path, files: dict[str, str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, content in sorted(files.items()):
        path = out_dir / name
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(content, encoding="utf-8")
        os.replace(tmp, path)
        written.append(path)
    return written


class UsageError(Exception):
    """Input problem the user must fix; maps to exit code 1."""


def _load_scenarios(path: Path) -> list[dict]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}")
    if isinstance(doc, dict) and "scenarios" in doc:
        extras = set(doc) - {"scenarios"}
        if extras:
            raise UsageError(f"{path}: unknown top-level fields {sorted(extras)}")
        doc = doc["scenarios"]
    if isinstance(doc, dict):
        doc = [doc]
    if not isinstance(doc, list) or not doc or not all(isinstance(s, dict) for s in doc):
        raise UsageError(f"{path}: expected a scenario object or a list of them")
    return doc


def _cmd_run(args: argparse.Namespace) -> int:
    scenarios = _load_scenarios(Path(args.scenario))
    out_dir = Path(args.out)

    def submit(doc: dict) -> httpx.Response:
        payload: dict = {"scenario": doc}
        if args.seed is not None:
            payload["seed"] = args.seed
        if args.trials is not None:
            payload["trials"] = args.trials
        return _post(args.server, "/scenario/run", payload)

    failed = False
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        responses = list(pool.map(submit, scenarios))
    for doc, resp in zip(scenarios, responses):
        label = doc.get("name", "<unnamed>")
        if resp.status_code != 200:
            print(f"{label}: {_detail(resp)}", file=sys.stderr)
            failed = True
            continue
        body = resp.json()
        written = _write_files(out_dir, body["files"])
        print(f"{body['name']}: wrote {', '.join(str(p) for p in written)}")
    return EXIT_INVALID if failed else EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    resp = _post(args.server, "/verify", {"seed": args.seed})
    if resp.status_code != 200:
        print(_detail(resp), file=sys.stderr)
        return EXIT_INVALID
    body = resp.json()
    _write_files(Path(args.out), body["files"])
    for check in body["checks"]:
        flag = "PASS" if check["passed"] else "FAIL"
        print(
            f"[{flag}] {check['name']}: max deviation {check['max_deviation']:.3g} "
            f"over {check['cases']} cases (tolerance {check['tolerance']:.1g})"
        )
    print("all checks passed" if body["passed"] else "some checks failed")
    return EXIT_OK if body["passed"] else EXIT_CHECK_FAILED


def _cmd_sweep(args: argparse.Namespace) -> int:
    payload = {
        "alpha_start": args.alpha_start,
        "alpha_stop": args.alpha_stop,
        "alpha_step": args.alpha_step,
    }
    if args.mu is not None:
        payload["mu"] = args.mu
    resp = _post(args.server, "/sweep/markov", payload)
    if resp.status_code != 200:
        print(_detail(resp), file=sys.stderr)
        return EXIT_INVALID
    body = resp.json()
    written = _write_files(Path(args.out), body["files"])
    summary = body["summary"]
    print(
        f"wrote {written[0]} ({summary['rows']} rows, "
        f"mirror gap {summary['max_mirror_gap']:.3g})"
    )
    return EXIT_OK


def _cmd_extractor(args: argparse.Namespace) -> int:
    payload = {"n": args.n, "mu": args.mu, "draws": args.draws, "seed": args.seed}
    resp = _post(args.server, "/extractor/demo", payload)
    if resp.status_code != 200:
        print(_detail(resp), file=sys.stderr)
        return EXIT_INVALID
    body = resp.json()
    written = _write_files(Path(args.out), body["files"])
    summary = body["summary"]
    verdict = "within" if summary["all_within_5_sigma"] else "OUTSIDE"
    print(
        f"wrote {written[0]} ({summary['steps']} step(s), {summary['draws']} draws, "
        f"empirical full-rank rate {verdict} 5 sigma of the analytic value)"
    )
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aaakeylab",
        description="Equivocation lab for XOR-accumulated keys against erasure "
        "eavesdroppers.",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; defaults to an in-process app",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser(
        "run",
        help="run scenarios from a JSON file and write their reports",
        epilog="Reproduces the per-epoch equivocation tables: closed forms, "
        "exact enumeration, Monte Carlo estimates, capacity and the matching "
        "secrecy bounds, plus optional extractor and correlation-sweep tables.",
    )
    run.add_argument("--scenario", required=True, help="path to a scenario JSON file")
    run.add_argument("--seed", type=int, default=None, help="override every scenario seed")
    run.add_argument("--trials", type=int, default=None, help="override Monte Carlo trials")
    run.add_argument("--out", default="reports", help="directory for report files")
    run.add_argument("--jobs", type=int, default=1, help="scenarios to run in parallel")
    run.set_defaults(func=_cmd_run)

    verify = sub.add_parser(
        "verify",
        help="run every closed-form-versus-enumeration grid check",
        epilog="Certifies the additive per-bit form, the per-file coupling, the "
        "accumulation recursion, capacity domination, the correlated two- and "
        "three-step closed forms and the correlation threshold curve.",
    )
    verify.add_argument("--seed", type=int, default=0, help="seed for sampled sub-checks")
    verify.add_argument("--out", default="reports", help="directory for verify.json")
    verify.set_defaults(func=_cmd_verify)

    sweep = sub.add_parser(
        "sweep-markov",
        help="tabulate the correlation threshold over a stay-probability range",
        epilog="The threshold table is mirror symmetric around one half; with a "
        "constant miss probability the table adds the two- and three-step "
        "equivocations whose difference changes sign at the threshold.",
    )
    sweep.add_argument("--alpha-start", type=float, default=0.0)
    sweep.add_argument("--alpha-stop", type=float, default=1.0)
    sweep.add_argument("--alpha-step", type=float, default=0.01)
    sweep.add_argument("--mu", type=float, default=None, help="constant miss probability")
    sweep.add_argument("--out", default="reports", help="directory for the sweep table")
    sweep.set_defaults(func=_cmd_sweep)

    extractor = sub.add_parser(
        "extractor-demo",
        help="estimate the restricted-hash full-rank rate against the analytic value",
        epilog="Each step hashes n realizations through a random binary matrix "
        "with floor(mu*n) rows; outputs stay secret exactly when the hash "
        "restricted to the missed realizations keeps full row rank.",
    )
    extractor.add_argument("--n", type=int, default=64, help="realizations per step")
    extractor.add_argument(
        "--mu", type=float, nargs="+", default=[0.5], help="miss probability per step"
    )
    extractor.add_argument("--draws", type=int, default=1000, help="hash and miss redraws")
    extractor.add_argument("--seed", type=int, default=0)
    extractor.add_argument("--out", default="reports", help="directory for the demo table")
    extractor.set_defaults(func=_cmd_extractor)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; 2 is reserved for check failures
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    try:
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INVALID
    except httpx.HTTPError as exc:
        print(f"transport failure: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
