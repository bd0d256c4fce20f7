"""Thin command-line client for the solver service.

By default the requests are served in-process through an ASGI transport;
``--server URL`` points the same client at a running instance instead.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import httpx


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from .service import app

    return httpx.Client(
        transport=httpx.ASGITransport(app=app),
        base_url="http://qpbeam.local",
        timeout=None,
    )


def _write_artifacts(artifacts: dict[str, str], out_dir: str):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in artifacts.items():
        (out / name).write_text(text)
        print(f"wrote {out / name}")


def _fail(response: httpx.Response) -> int:
    detail = response.json().get("detail", response.text)
    print(f"error: {detail}", file=sys.stderr)
    return 2


def _cmd_solve(args) -> int:
    payload = {"config": Path(args.config).read_text()}
    if args.tol is not None:
        payload["tol"] = args.tol
    if args.levels is not None:
        payload["levels"] = args.levels
    with _client(args.server) as client:
        response = client.post("/solve", json=payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    _write_artifacts(body["artifacts"], args.out)
    print(f"verdict: {body['verdict']}")
    print(f"final residual (max): {body['final_residual_max']:.3e}")
    for level in body["levels"]:
        print(
            f"  level {level['level']}: N={level['cutoff']} "
            f"increment={level['increment']:.3e} residual={level['residual']:.3e}"
        )
    return 0 if body["verdict"] == "converged" else 1


def _cmd_check_frequency(args) -> int:
    payload = {"config": Path(args.config).read_text()}
    with _client(args.server) as client:
        response = client.post("/check-frequency", json=payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    _write_artifacts(body["artifacts"], args.out)
    state = "valid" if body["valid"] else "INVALID"
    print(
        f"certificate {state}: worst ratio {body['worst_ratio']:.4g} "
        f"at k = {tuple(body['worst_k'])}, minimal gamma {body['minimal_gamma']:.4g}"
    )
    return 0 if body["valid"] else 1


def _cmd_spectrum(args) -> int:
    payload = {"config": Path(args.config).read_text()}
    with _client(args.server) as client:
        response = client.post("/spectrum", json=payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    _write_artifacts(body["artifacts"], args.out)
    print(
        f"min |Theta| = {body['min_abs_symbol']:.4g}, "
        f"violations = {body['violations']}, "
        f"uniform bound {'ok' if body['uniform_bound_ok'] else 'VIOLATED'}"
    )
    return 0 if body["violations"] == 0 and body["uniform_bound_ok"] else 1


def _cmd_verify(args) -> int:
    payload = {}
    if args.config:
        payload["config"] = Path(args.config).read_text()
    with _client(args.server) as client:
        response = client.post("/verify", json=payload)
    if response.status_code != 200:
        return _fail(response)
    body = response.json()
    for line in body["log"]:
        print(line)
    print("verification " + ("passed" if body["ok"] else "FAILED"))
    return 0 if body["ok"] else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qpbeam",
        description="quasi-periodic response solutions of damped beam equations",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running service; default runs in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the full iteration on a configuration")
    solve.add_argument("--config", required=True, help="configuration file path")
    solve.add_argument("--out", default="out", help="artifact output directory")
    solve.add_argument("--tol", type=float, default=None, help="tolerance override")
    solve.add_argument("--levels", type=int, default=None, help="level count override")
    solve.set_defaults(func=_cmd_solve)

    freq = sub.add_parser("check-frequency", help="scan the non-resonance certificate")
    freq.add_argument("--config", required=True)
    freq.add_argument("--out", default="out")
    freq.set_defaults(func=_cmd_check_frequency)

    spec = sub.add_parser("spectrum", help="tabulate the diagonal symbol and its floor")
    spec.add_argument("--config", required=True)
    spec.add_argument("--out", default="out")
    spec.set_defaults(func=_cmd_spectrum)

    verify = sub.add_parser("verify", help="run the oracle cross-check battery")
    verify.add_argument("--config", default=None)
    verify.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
