"""Command line interface: verify / compute / explain.

    radonfourier verify [CHECK ...] --field {r|c|qp} [--p P] --n N
                        --seed S --tol T [--out report.json]
    radonfourier compute {fourier|intertwine|inner-product} --input spec.json
    radonfourier explain CHECK

``verify`` with no check names runs the full battery on the default
configurations (real n=1 plus p-adic n=1 at p=2 and p=3).  Exit codes:
0 all checks pass, 1 some check fails, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from .functions import function_from_json
from .geometry import space_X
from .hilbert import inner_X
from .suite import (
    CHECKS,
    SuiteConfig,
    explain_check,
    field_from_spec,
    report_to_json,
    run_suite,
)
from .transforms import fourier, intertwine_I

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="radonfourier",
        description="verification engine for matrix Fourier / Radon-type "
        "intertwining integrals over local fields",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run verification checks")
    v.add_argument("checks", nargs="*", help=f"checks to run (default: full battery); available: {', '.join(sorted(CHECKS))}")
    v.add_argument("--field", default=None, choices=["r", "c", "qp"])
    v.add_argument("--p", type=int, default=None)
    v.add_argument("--n", type=int, default=1)
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--samples", type=int, default=200)
    v.add_argument("--k-max", type=int, default=7)
    v.add_argument("--m-max", type=int, default=20)
    v.add_argument("--config", default=None, help="JSON config file (overrides flags)")
    v.add_argument("--out", default=None, help="write the JSON report here")

    c = sub.add_parser("compute", help="evaluate a single operation")
    c.add_argument("operation", choices=["fourier", "intertwine", "inner-product"])
    c.add_argument("--input", required=True, help="JSON input specification")
    c.add_argument("--out", default=None)

    e = sub.add_parser("explain", help="describe a check and its tolerance")
    e.add_argument("name")
    return ap


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(payload: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    print(payload)


def _parse_matrix(obj, fd, rows, cols):
    if fd.is_archimedean:
        arr = np.asarray(
            [[_parse_scalar(x, fd) for x in row] for row in obj],
            dtype=complex if fd.kind == "complex" else float,
        )
        if arr.shape != (rows, cols):
            raise ValueError(f"matrix must be {rows}x{cols}")
        return arr
    m = tuple(tuple(Fraction(x) for x in row) for row in obj)
    if len(m) != rows or any(len(r) != cols for r in m):
        raise ValueError(f"matrix must be {rows}x{cols}")
    return m


def _parse_scalar(x, fd):
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def cmd_verify(args) -> int:
    try:
        if args.config:
            cfg_obj = _load_json(args.config)
            configs = (
                [SuiteConfig.from_json(c) for c in cfg_obj]
                if isinstance(cfg_obj, list)
                else [SuiteConfig.from_json(cfg_obj)]
            )
        elif args.field is None:
            # default battery: real n=1 plus p-adic n=1 at p = 2 and 3
            base = dict(
                n=args.n, seed=args.seed, tol=args.tol, samples=args.samples,
                k_max=args.k_max, m_max=args.m_max, checks=tuple(args.checks),
            )
            configs = [
                SuiteConfig(field="r", **base),
                SuiteConfig(field="qp", p=2, **base),
                SuiteConfig(field="qp", p=3, **base),
            ]
        else:
            configs = [
                SuiteConfig(
                    field=args.field, p=args.p, n=args.n, seed=args.seed,
                    tol=args.tol, samples=args.samples, k_max=args.k_max,
                    m_max=args.m_max, checks=tuple(args.checks),
                )
            ]
        for cfg in configs:
            cfg.fd  # validates field/p combination
            unknown = [c for c in (cfg.checks or ()) if c not in CHECKS]
            if unknown:
                raise ValueError(f"unknown checks: {unknown}; available: {sorted(CHECKS)}")
    except (ValueError, TypeError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    reports = [run_suite(cfg) for cfg in configs]
    payload = reports[0] if len(reports) == 1 else {
        "suites": reports,
        "pass": all(r["pass"] for r in reports),
    }
    _emit(report_to_json(payload), args.out)
    all_pass = payload["pass"]
    for rep in reports:
        for check in rep["checks"]:
            status = "PASS" if check.get("pass") else "FAIL"
            extra = " (not applicable)" if check.get("not_applicable") else ""
            print(
                f"[{status}] {check['check']} field={check['field']} n={check['n']}{extra}",
                file=sys.stderr,
            )
    return EXIT_PASS if all_pass else EXIT_FAIL


def cmd_compute(args) -> int:
    try:
        spec = _load_json(args.input)
        fd = field_from_spec(spec.get("field", "r"), spec.get("p"))
        n = int(spec.get("n", 1))
        X = space_X(n, fd)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.operation == "fourier":
        f = function_from_json(spec["f"], X)
        fhat = fourier(f)
        result = {}
        if hasattr(fhat, "to_json"):  # quadrature-backed results are value-only
            result["transform"] = fhat.to_json()
        if "points" in spec:
            Y = X.transpose_space()
            vals = []
            for pt in spec["points"]:
                y = _parse_matrix(pt, fd, n, n + 1)
                v = fhat.value(y)
                vals.append(v if fd.is_archimedean else v.to_json())
            result["values"] = [
                [v.real, v.imag] if isinstance(v, complex) else v for v in vals
            ]
        _emit(report_to_json(result), args.out)
        return EXIT_PASS

    if args.operation == "intertwine":
        f = function_from_json(spec["f"], X)
        y = _parse_matrix(spec["y"], fd, n, n + 1)
        val, err = intertwine_I(f, y, with_error=True)
        if fd.is_archimedean:
            result = {"value": [val.real, val.imag], "error_estimate": float(err)}
        else:
            result = {"value": val.to_json(), "error_estimate": "0"}
        _emit(report_to_json(result), args.out)
        return EXIT_PASS

    # inner-product: two function specs and an a-grid
    f = function_from_json(spec["f"], X)
    h = function_from_json(spec["h"], X)
    pairing = inner_X(f, h)
    rows = []
    for a_obj in spec["a_grid"]:
        a = _parse_matrix(a_obj, fd, n, n)
        val, err = pairing.with_error(a)
        if fd.is_archimedean:
            rows.append(
                {
                    "a": np.asarray(a).tolist(),
                    "value": [val.real, val.imag],
                    "error_estimate": float(err),
                }
            )
        else:
            rows.append(
                {
                    "a": [[f"{x.numerator}/{x.denominator}" for x in row] for row in a],
                    "value": val.to_json(),
                    "error_estimate": "0",
                }
            )
    _emit(report_to_json({"rows": rows, "provenance": pairing.provenance}), args.out)
    return EXIT_PASS


def cmd_explain(args) -> int:
    try:
        print(explain_check(args.name))
        return EXIT_PASS
    except KeyError as exc:
        print(str(exc.args[0]), file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "compute":
        return cmd_compute(args)
    return cmd_explain(args)


if __name__ == "__main__":
    sys.exit(main())
