"""Batch verification harness: configs, check registry, reports.

A suite config fixes the field, the size n, tolerances, a seed and the list
of checks; ``run_suite`` executes the checks (concurrently, thread count from
the RADONFOURIER_THREADS environment variable) and assembles a Report whose
JSON form is stable: keys sorted, rationals as strings, check records ordered
by name.  Fixed seed means identical sample sets, and the p-adic sections are
byte-identical across runs since every p-adic value serializes exactly.

The ``perturb`` block deliberately mis-wires one constant at a time (the
gamma exponent, the fiber measure, the equivariance exponent sign) so the
negative controls can demonstrate that each check discriminates.
"""

from __future__ import annotations

import json
import os
import time
import zlib
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import __version__, sampling
from . import exactlinalg as xl
from .fields import FieldDescriptor, complex_field, padic_field, real_field
from .functions import GaussianForm, SBFunction, function_from_json
from .geometry import fiber_param, rho_weight, rho_weight_exponents, space_X
from .hilbert import decay_bound_check, truncation_sequence
from .lattices import Coset, Lattice
from .transforms import (
    compose_shell_stabilized,
    fourier,
    fourier_equivariance_check,
    fourier_slice_verify,
    intertwine_I,
    intertwine_equivariance_check,
    kernel_identity_check,
    unitarity_verify,
)


def field_from_spec(kind: str, p=None) -> FieldDescriptor:
    if kind in ("r", "real"):
        return real_field()
    if kind in ("c", "complex"):
        return complex_field()
    if kind in ("qp", "p-adic", "padic"):
        if p is None:
            raise ValueError("p-adic field needs --p")
        return padic_field(int(p))
    raise ValueError(f"unknown field {kind!r}")


@dataclass
class SuiteConfig:
    field: str = "r"
    p: int | None = None
    n: int = 1
    seed: int = 7
    tol: float = 1e-6
    tol_exact: float = 1e-12
    samples: int = 200
    k_max: int = 7
    m_max: int = 20
    checks: tuple = ()
    functions: tuple = ()  # optional JSON function specs
    perturb: dict = dc_field(default_factory=dict)

    @property
    def fd(self) -> FieldDescriptor:
        return field_from_spec(self.field, self.p)

    @classmethod
    def from_json(cls, obj: dict) -> "SuiteConfig":
        known = {
            "field", "p", "n", "seed", "tol", "tol_exact", "samples",
            "k_max", "m_max", "checks", "functions", "perturb",
        }
        bad = sorted(set(obj) - known)
        if bad:
            raise ValueError(f"unknown config keys: {bad}")
        kw = dict(obj)
        if "checks" in kw:
            kw["checks"] = tuple(kw["checks"])
        if "functions" in kw:
            kw["functions"] = tuple(kw["functions"])
        return cls(**kw)

    def to_json(self) -> dict:
        return {
            "field": self.field,
            "p": self.p,
            "n": self.n,
            "seed": self.seed,
            "tol": self.tol,
            "tol_exact": self.tol_exact,
            "samples": self.samples,
            "k_max": self.k_max,
            "m_max": self.m_max,
            "checks": list(self.checks) or sorted(CHECKS),
            "perturb": self.perturb,
        }


def _rng_for(cfg: SuiteConfig, check: str) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([cfg.seed, zlib.crc32(check.encode())])
    )


def _default_function(cfg: SuiteConfig, shifted: bool = False):
    fd = cfg.fd
    X = space_X(cfg.n, fd)
    if cfg.functions:
        return function_from_json(cfg.functions[0], X)
    if fd.is_archimedean:
        return GaussianForm.standard(X)
    if not shifted:
        return SBFunction.standard_ball(X)
    center = tuple(
        Fraction(1) if i == 0 else Fraction(0) for i in range(X.dim)
    )
    return SBFunction.indicator(X, Coset(Lattice.scaled_standard(fd.p, X.dim, 1), center))


# ---------------------------------------------------------------------
# Check runners
# ---------------------------------------------------------------------


def _check_gamma_kernel(cfg: SuiteConfig) -> dict:
    rng = _rng_for(cfg, "gamma-kernel")
    fd = cfg.fd
    samples = [sampling.rand_gl(rng, cfg.n, fd) for _ in range(cfg.samples)]
    shift = Fraction(str(cfg.perturb.get("gamma_exponent_shift", 0)))
    return kernel_identity_check(
        fd, cfg.n, samples, tol=cfg.tol_exact, exponent_shift=shift
    )


def _check_slice(cfg: SuiteConfig) -> dict:
    rng = _rng_for(cfg, "slice")
    fd = cfg.fd
    X = space_X(cfg.n, fd)
    f = _default_function(cfg)
    count = min(cfg.samples, 20 if fd.is_archimedean else 8)
    ys = [
        sampling.rand_regular_point(rng, X.transpose_space()) for _ in range(count)
    ]
    factor = cfg.perturb.get("fiber_measure_factor", 1)
    return fourier_slice_verify(f, ys, tol=cfg.tol, measure_factor=factor)


def _check_composition(cfg: SuiteConfig) -> dict:
    fd = cfg.fd
    if fd.is_archimedean:
        return {
            "check": "composition",
            "field": str(fd),
            "n": cfg.n,
            "pass": True,
            "not_applicable": "shell stabilization is a p-adic operation",
            "samples": [],
        }
    if cfg.n > 1:
        return {
            "check": "composition",
            "field": str(fd),
            "n": cfg.n,
            "pass": True,
            "not_applicable": "shell enumeration grows like p^(n k); the suite "
            "exercises the n = 1 surface",
            "samples": [],
        }
    rng = _rng_for(cfg, "composition")
    X = space_X(cfg.n, fd)
    p = fd.p
    rows = []
    ok = True
    stabilized_matches = 0
    for i in range(max(6, min(cfg.samples, 12))):
        f = sampling.rand_sb_function(rng, X, terms=1, unit_leading_center=True)
        y = _unit_row_sample(rng, cfg.n, p)
        val, cert = compose_shell_stabilized(f, y, k_max=cfg.k_max)
        expect = fourier(f).value(y)
        if val is None:
            fallback = fourier_slice_verify(f, [y])
            rows.append(
                {
                    "pair": i,
                    "stabilized": False,
                    "fallback_slice_pass": fallback["pass"],
                    "certificate": cert,
                }
            )
            ok = ok and fallback["pass"]
            continue
        match = val == expect
        stabilized_matches += 1 if match else 0
        rows.append(
            {
                "pair": i,
                "stabilized": True,
                "stabilization_radius": cert["stabilization_radius"],
                "value": val.to_json(),
                "fourier": expect.to_json(),
                "exact_equal": bool(match),
            }
        )
        ok = ok and match
    return {
        "check": "composition",
        "field": str(fd),
        "n": cfg.n,
        "pass": ok,
        "stabilized_matches": stabilized_matches,
        "samples": rows,
    }


def _unit_row_sample(rng, n: int, p: int):
    """A regular point of the opposite space with unimodular leading block
    and tail column in p Z_p.

    For coset functions with unit leading center and integral tail, every
    slice y.x over the support then lands on |det a| = 1 (ultrametrically the
    unit leading product dominates), the class on which the shell-stabilized
    composition provably reproduces the transform.
    """
    lead = sampling.rand_gl_zp(rng, n, p)
    tail = tuple(Fraction(p * int(rng.integers(0, p))) for _ in range(n))
    return tuple(row + (tail[i],) for i, row in enumerate(lead))


def _check_unitarity(cfg: SuiteConfig) -> dict:
    fd = cfg.fd
    f = _default_function(cfg)
    h = _default_function(cfg, shifted=True) if not fd.is_archimedean else f
    grid = sampling.default_a_grid(cfg.n, fd)
    return unitarity_verify(f, h, grid, tol=cfg.tol)


def _check_equivariance(cfg: SuiteConfig) -> dict:
    rng = _rng_for(cfg, "equivariance")
    fd = cfg.fd
    X = space_X(cfg.n, fd)
    f = _default_function(cfg)
    sign = int(cfg.perturb.get("equivariance_exponent_sign", +1))
    reports = []
    from .geometry import base_point_y
    from .fields import padic_valuation

    y0 = base_point_y(cfg.n, fd)  # deterministic point where the ball transform lives
    for k in range(3):
        a = sampling.rand_gl(rng, cfg.n, fd)
        if k == 0 and not fd.is_archimedean:
            # force a non-unit determinant so the exponent sign is visible
            v = padic_valuation(xl.det(a), fd.p)
            e = 1 if v + cfg.n != 0 else 2
            s = Fraction(fd.p) ** e
            a = tuple(tuple(x * s for x in row) for row in a)
        ys = [y0] + [
            sampling.rand_regular_point(rng, X.transpose_space()) for _ in range(3)
        ]
        reports.append(
            fourier_equivariance_check(f, a, ys, tol=cfg.tol, exponent_sign=sign)
        )
    g = sampling.rand_sl(rng, cfg.n + 1, fd)
    a = sampling.rand_gl(rng, cfg.n, fd)
    ys = [sampling.rand_regular_point(rng, X.transpose_space()) for _ in range(4)]
    reports.append(intertwine_equivariance_check(f, g, a, ys, tol=cfg.tol))
    ok = all(r["pass"] for r in reports)
    return {
        "check": "equivariance",
        "field": str(fd),
        "n": cfg.n,
        "pass": ok,
        "samples": [r for r in reports],
    }


def _check_estimate(cfg: SuiteConfig) -> dict:
    rng = _rng_for(cfg, "estimate")
    fd = cfg.fd
    f = _default_function(cfg)
    count = min(cfg.samples, 200)
    samples = [sampling.rand_kak_sample(rng, cfg.n, fd) for _ in range(count)]
    rep = decay_bound_check(f, samples)
    rep.update({"check": "estimate", "field": str(fd), "n": cfg.n})
    return rep


def _check_rho_chain(cfg: SuiteConfig) -> dict:
    rng = _rng_for(cfg, "rho-chain")
    fd = cfg.fd
    n = cfg.n
    rows = []
    ok = True
    for _ in range(min(cfg.samples, 500)):
        if fd.is_archimedean:
            exps = sorted(
                (Fraction(int(rng.integers(-16, 17)), 4) * fd.d_F for _ in range(n)),
                reverse=True,
            )
            diag = tuple(
                float(2.0 ** float(e / fd.d_F)) for e in exps
            )
        else:
            exps = sorted(
                (Fraction(-int(rng.integers(-4, 5))) for _ in range(n)), reverse=True
            )
            diag = tuple(Fraction(fd.p) ** int(-e) for e in exps)
        rho, mid, low = rho_weight_exponents(exps, n)
        chain_ok = rho >= mid >= low
        w = rho_weight(diag, n, fd)
        base = 2.0 if fd.is_archimedean else float(fd.p)
        float_ok = abs(w - base ** float(rho)) <= 1e-9 * max(1.0, abs(w))
        good = chain_ok and float_ok
        rows.append(
            {
                "exponents": [str(e) for e in exps],
                "rho": str(rho),
                "mid": str(mid),
                "low": str(low),
                "chain_ok": chain_ok,
            }
        )
        ok = ok and good
    return {"check": "rho-chain", "field": str(fd), "n": n, "pass": ok, "samples": rows[:10]}


def _check_truncation(cfg: SuiteConfig) -> dict:
    fd = cfg.fd
    if not (fd.kind == "real" and cfg.n == 1):
        return {
            "check": "truncation",
            "field": str(fd),
            "n": cfg.n,
            "pass": True,
            "not_applicable": "truncation diagnostics run on the real n=1 case",
            "samples": [],
        }
    f = GaussianForm.standard(space_X(1, fd))
    grid = [float(a[0][0]) for a in sampling.default_a_grid(1, fd)]
    rep = truncation_sequence(f, cfg.m_max, grid)
    ok = rep["monotone"] and rep["final_sup"] < 1e-3
    return {
        "check": "truncation",
        "field": str(fd),
        "n": cfg.n,
        "pass": ok,
        "monotone": rep["monotone"],
        "final_sup": rep["final_sup"],
        "samples": rep["per_m"],
    }


def _check_fiber(cfg: SuiteConfig) -> dict:
    rng = _rng_for(cfg, "fiber")
    fd = cfg.fd
    X = space_X(cfg.n, fd)
    f = _default_function(cfg)
    rows = []
    ok = True
    count = min(20, cfg.samples)
    factor = cfg.perturb.get("fiber_measure_factor", 1)
    for _ in range(count):
        y = sampling.rand_regular_point(rng, X.transpose_space())
        base = intertwine_I(f, y, fiber=fiber_param(y, cfg.n, fd), measure_factor=factor)
        worst = 0.0
        exact = True
        for _ in range(5):
            fib = fiber_param(y, cfg.n, fd, rng=rng)
            val = intertwine_I(f, y, fiber=fib, measure_factor=factor)
            if fd.is_archimedean:
                worst = max(worst, abs(val - base))
            else:
                exact = exact and (val == base)
        if fd.is_archimedean:
            good = worst <= 1e-10
            rows.append({"max_dev": worst})
        else:
            good = exact
            rows.append({"exact_equal": exact})
        ok = ok and good
    return {"check": "fiber", "field": str(fd), "n": cfg.n, "pass": ok, "samples": rows}


CHECKS = {
    "gamma-kernel": _check_gamma_kernel,
    "slice": _check_slice,
    "composition": _check_composition,
    "unitarity": _check_unitarity,
    "equivariance": _check_equivariance,
    "estimate": _check_estimate,
    "rho-chain": _check_rho_chain,
    "truncation": _check_truncation,
    "fiber": _check_fiber,
}

EXPLANATIONS = {
    "gamma-kernel": (
        "Kernel identity |det a|^((1-n)/2) * gamma_n(a^(-1)) = chi(Tr a), the "
        "algebraic crux linking the normalizing weight to the additive "
        "character.  Exact over Q_p; magnitude and phase compared to 1e-12 "
        "relative over R and C."
    ),
    "slice": (
        "Fourier-slice identity F f(y) = int T(f)(y,a) chi(Tr a) da, the "
        "absolutely convergent face of the normalized-intertwiner "
        "composition.  Both sides computed along independent routes; exact "
        "p-adically, |lhs-rhs| <= tol (default 1e-6) archimedean."
    ),
    "composition": (
        "Shell-stabilized p-adic evaluation of the iterated composition "
        "I(C_gamma f)(y) over growing fiber balls, certified by exact "
        "vanishing of two consecutive shell character sums, compared "
        "exactly against F f(y); inconclusive inputs fall back to the "
        "slice identity."
    ),
    "unitarity": (
        "Inner-product preservation <F f, F h>_Xbar(a) = <f, h>_X(a) on the "
        "default grid in GL(n): the transform extends to a unitary operator "
        "of the module pairings.  Exact p-adically, tol archimedean."
    ),
    "equivariance": (
        "Scaling law F(f^(a^(-1))) = |det a|^(n+1) * F f(a .) (corrected "
        "positive exponent, pinned by the discriminating Gaussian example), "
        "its module form F(f.a) = F(f).a, and the translation laws "
        "I(g.f)(y) = I(f)(y g), I(f.a)(y) = |det a|^((n+1)/2) I(f)(a y).  "
        "Tolerance 1e-8 / 1e-6 archimedean, exact p-adic."
    ),
    "estimate": (
        "Decay estimate |<f,f>_X(k1 a k2)| <= C prod_i min(|a_i|,|a_i|^-1)"
        "^((n+1)/2) with the explicit constant C = prod ||f_i||_inf ||f_i||_1 "
        "from the per-column envelope (C = 1 for the standard Gaussian and "
        "the standard p-adic ball, where the bound is attained exactly)."
    ),
    "rho-chain": (
        "Spherical weight chain: prod |a_i|^(i-(n+1)/2) >= "
        "prod min(|a_i|,|a_i|^-1)^((n-1)/2) >= prod min(|a_i|,|a_i|^-1)"
        "^((n+1)/2), verified with exact rational arithmetic on logarithmic "
        "exponents."
    ),
    "truncation": (
        "Truncation diagnostics: phi_m = <f - f chi_m, f - f chi_m>_X over "
        "the default grid is nonincreasing in m and sup phi_m < 1e-3 by "
        "m = 20 for the standard Gaussian (real, n = 1), the computable "
        "surrogate for convergence of the cutoff approximations."
    ),
    "fiber": (
        "Well-definedness of the intertwining integral: I(f)(y) agrees "
        "across independently drawn unimodular completions of y (exact "
        "p-adically, 1e-10 archimedean), so the fiber measure does not "
        "depend on the completion."
    ),
}


def explain_check(name: str) -> str:
    if name not in EXPLANATIONS:
        avail = ", ".join(sorted(EXPLANATIONS))
        raise KeyError(f"unknown check {name!r}; available: {avail}")
    return EXPLANATIONS[name]


def run_suite(cfg: SuiteConfig) -> dict:
    """Run the selected checks and assemble the report.

    Check records are ordered by name for stable diffs; partial failures do
    not abort the suite.  The report's ``pass`` is the conjunction.
    """
    names = list(cfg.checks) or sorted(CHECKS)
    unknown = [c for c in names if c not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {unknown}; available: {sorted(CHECKS)}")
    t0 = time.time()
    results = {}
    workers = int(os.environ.get("RADONFOURIER_THREADS", "1") or "1")
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {name: pool.submit(_run_one, cfg, name) for name in names}
            for name, fut in futures.items():
                results[name] = fut.result()
    else:
        for name in names:
            results[name] = _run_one(cfg, name)
    checks = [results[name] for name in sorted(results)]
    report = {
        "suite": cfg.to_json(),
        "checks": checks,
        "pass": all(c.get("pass") for c in checks),
        "runtime_s": round(time.time() - t0, 3),
        "versions": {
            "radonfourier": __version__,
            "numpy": np.__version__,
        },
    }
    return report


def _run_one(cfg: SuiteConfig, name: str) -> dict:
    t0 = time.time()
    try:
        rep = CHECKS[name](cfg)
    except Exception as exc:  # noqa: BLE001 - failures must not abort the suite
        rep = {
            "check": name,
            "field": str(cfg.fd),
            "n": cfg.n,
            "pass": False,
            "error": f"{type(exc).__name__}: {exc}",
            "samples": [],
        }
    rep["runtime_s"] = round(time.time() - t0, 3)
    return rep


def report_to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default)


def _json_default(obj):
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "to_json"):
        return obj.to_json()
    return str(obj)
