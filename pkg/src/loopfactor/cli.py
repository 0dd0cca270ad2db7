"""Batch front end: synthesize, recover, factorize, verify, classify, tables.

Exit codes: 0 all checks within tolerance, 1 identity violation beyond
tolerance, 2 input/usage error.  Verbosity via the LOOPFACTOR_LOG environment
variable (DEBUG/INFO/WARNING).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .laurent import MatrixLaurent
from .loops import DiagExponent, assemble, build_k1, build_k2
from . import factorization as fz
from . import operators as ops
from . import symbolic as sym

log = logging.getLogger("loopfactor")

SUITES = ("planch", "toeplitz", "opfact", "keyid", "rh", "appendix2")


@dataclass
class RunConfig:
    cmd: str
    inputs: list
    out: str | None
    N: int
    grid_m: int
    exp_trunc: int
    tol: float
    suites: list
    seed: int
    jobs: int
    fmt: str

    def validate(self):
        if self.N < 1:
            raise ValueError("--N must be >= 1")
        if self.grid_m < 4:
            raise ValueError("--grid-m must be >= 4")
        if self.tol <= 0:
            raise ValueError("--tol must be positive")
        for s in self.suites:
            if s not in SUITES:
                raise ValueError("unknown suite %r (choose from %s)" % (s, ",".join(SUITES)))


def _pairs_to_complex(pairs):
    return [complex(p[0], p[1]) for p in pairs]


def _complex_to_pairs(vals):
    return [[v.real, v.imag] for v in map(complex, vals)]


def load_params(path):
    with open(path) as fh:
        obj = json.load(fh)
    etas = _pairs_to_complex(obj.get("eta", []))
    zetas = _pairs_to_complex(obj.get("zeta", []))
    chi = DiagExponent(
        chi0=1j * float(obj.get("chi0", 0.0)),
        chis=_pairs_to_complex(obj.get("chi", [])),
    )
    label = obj.get("label")
    return etas, chi, zetas, (tuple(label) if label else None)


def dump_params(etas, chi, zetas, extra=None):
    obj = {
        "eta": _complex_to_pairs(etas),
        "chi0": float(np.imag(chi.chi0)),
        "chi": _complex_to_pairs(chi.chis),
        "zeta": _complex_to_pairs(zetas),
    }
    obj.update(extra or {})
    return obj


def load_loop(path):
    with open(path) as fh:
        obj = json.load(fh)
    g = MatrixLaurent.from_json(obj)
    res_u, res_d = g.unitarity_residual()
    g.su2 = res_u < 1e-8 and res_d < 1e-8
    return g


def _write(out, text):
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_reports(reports, cfg):
    import io

    buf = io.StringIO()
    ops.emit_reports(reports, fmt=cfg.fmt, stream=buf)
    _write(cfg.out, buf.getvalue())


def _gate(reports, cfg):
    bad = [r for r in reports if not r.ok(cfg.tol)]
    for r in bad:
        log.warning(
            "violation: %s at N=%d rel_err=%.3g > tol=%.3g",
            r.identity, r.N, r.rel_err, cfg.tol,
        )
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_synth(cfg):
    etas, chi, zetas, label = load_params(cfg.inputs[0])
    if label:
        g = fz.stratum_synthesize(label, etas, chi, zetas, trunc=cfg.exp_trunc)
    else:
        g = assemble(etas, chi, zetas, trunc=cfg.exp_trunc)
    _write(cfg.out, json.dumps(g.to_json()))
    return 0


def cmd_recover(cfg):
    g = load_loop(cfg.inputs[0])
    factors = fz.triangular_factor_numeric(g, N=max(cfg.N, 24))
    rec = fz.recover_params_from_factors(factors.l, factors.u, grid_m=cfg.grid_m)
    chi0 = complex(np.log(factors.m0)).imag
    chi = DiagExponent(chi0=1j * chi0, chis=rec.chis)
    check = assemble(rec.etas, chi, rec.zetas, trunc=cfg.exp_trunc)
    resid = (check - g).norm_inf()
    out = dump_params(
        rec.etas, chi, rec.zetas,
        extra={"a1": rec.a1, "a2": rec.a2, "resynthesis_residual": resid},
    )
    _write(cfg.out, json.dumps(out))
    return 0 if resid <= max(cfg.tol, 1e-6) else 1


def cmd_factor(cfg):
    g = load_loop(cfg.inputs[0])
    factors = fz.triangular_factor_numeric(g, N=max(cfg.N, 24))
    resid = factors.residual(g, cfg.grid_m)
    obj = {
        "l": factors.l.to_json(),
        "m0": [factors.m0.real, factors.m0.imag],
        "a0": factors.a0,
        "u": factors.u.to_json(),
        "residual": resid,
    }
    _write(cfg.out, json.dumps(obj))
    if resid > cfg.tol:
        log.warning("factorization residual %.3g exceeds tol %.3g", resid, cfg.tol)
        return 1
    return 0


def _default_params(cfg):
    rng = np.random.default_rng(cfg.seed)
    def draw(n, rad):
        return [
            rad * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) / 2 for _ in range(n)
        ]
    etas = draw(3, 0.7)
    zetas = draw(3, 0.7)
    chi = DiagExponent(chi0=0.2j, chis=[0.1j, 0.05 + 0.02j])
    return etas, chi, zetas


def _suite_tasks(cfg, etas, chi, zetas):
    rng = np.random.default_rng(cfg.seed + 1)
    tasks = {}
    if "planch" in cfg.suites:
        def planch():
            reps = ops.verify_planch(build_k2([1.0]), [1.0], cfg.N)
            z8 = [0.8 * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)) / 2 for _ in range(8)]
            reps += ops.verify_planch(build_k2(z8), z8, cfg.N)
            if zetas:
                reps += ops.verify_planch(build_k2(zetas), zetas, cfg.N)
            if etas:
                reps += ops.verify_planch(build_k1(etas), etas, cfg.N, kind="k1")
            return reps
        tasks["planch"] = planch
    if "toeplitz" in cfg.suites:
        tasks["toeplitz"] = lambda: ops.verify_toeplitz_identities(
            etas, chi, zetas, cfg.N, exp_trunc=cfg.exp_trunc
        )
    if "opfact" in cfg.suites:
        tasks["opfact"] = lambda: ops.verify_operator_factorization(
            etas, chi, zetas, cfg.N, exp_trunc=cfg.exp_trunc
        )
    if "keyid" in cfg.suites:
        def keyid():
            reps = fz.verify_keyidentities([1.0], N=min(cfg.N, 32))
            reps += fz.verify_keyidentities(zetas or [0.4, -0.3j, 0.1], N=cfg.N)
            return reps
        tasks["keyid"] = keyid
    if "rh" in cfg.suites:
        def rh():
            reps = []
            _, _, r = fz.riemann_hilbert_WZ(build_k2([1.0]), min(cfg.N, 32))
            reps.append(r)
            g = assemble(etas, chi, zetas, trunc=cfg.exp_trunc)
            _, _, r = fz.riemann_hilbert_WZ(g, cfg.N)
            reps.append(r)
            return reps
        tasks["rh"] = rh
    if "appendix2" in cfg.suites:
        def appendix2():
            import time

            t0 = time.perf_counter()
            theta = {}
            for i in (1, 2, 3):
                m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
                theta[i] = m - np.trace(m) / 2 * np.eye(2)
            # W_blocks raises if the three routes disagree; report as residual 0
            sym.W_blocks(theta, 2, 2, mode="numeric")
            sym.W_blocks({i: "t" for i in (1, 2, 3)}, 2, 2)
            reps = [ops.make_report("appendix2/W-blocks-consistent", cfg.N, 0.0, 0.0, t0)]
            t0 = time.perf_counter()
            res = sym.extract_pnk(min(6, sym.MAX_FACTORS))
            reps.append(
                ops.make_report(
                    "appendix2/pnk-positive-integers", 6,
                    0.0 if res.all_positive_integers else 1.0, 0.0, t0,
                )
            )
            t0 = time.perf_counter()
            xres = sym.x_star_symbolic(6)
            reps.append(
                ops.make_report(
                    "appendix2/Cij-positive-integers", 6,
                    0.0 if xres.all_positive_integers else 1.0, 0.0, t0,
                )
            )
            return reps
        tasks["appendix2"] = appendix2
    return tasks


def cmd_verify(cfg):
    if cfg.inputs:
        etas, chi, zetas, _ = load_params(cfg.inputs[0])
    else:
        etas, chi, zetas = _default_params(cfg)
    tasks = _suite_tasks(cfg, etas, chi, zetas)
    reports = []
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
            for res in ex.map(lambda f: f(), tasks.values()):
                reports += res
    else:
        for name, f in tasks.items():
            log.info("running suite %s", name)
            reports += f()
    _emit_reports(reports, cfg)
    return _gate(reports, cfg)


def cmd_strata(cfg):
    etas, chi, zetas, label = load_params(cfg.inputs[0]) if cfg.inputs else ([], DiagExponent(), [], None)
    if cfg.inputs and label is None:
        try:
            g = load_loop(cfg.inputs[0])
        except (KeyError, json.JSONDecodeError):
            g = assemble(etas, chi, zetas, trunc=cfg.exp_trunc)
        found = fz.classify_stratum(g, N=cfg.N, n_max=4)
        _write(cfg.out, json.dumps({"label": [found.epsilon, found.n]}))
        return 0
    g = fz.stratum_synthesize(label, etas, chi, zetas, trunc=cfg.exp_trunc)
    found = fz.classify_stratum(g, N=cfg.N, n_max=max(abs(label[1]) + 1, 2))
    obj = {
        "label": [label[0], label[1]],
        "classified": [found.epsilon, found.n],
        "roundtrip_ok": (found.epsilon, found.n) == tuple(label),
    }
    _write(cfg.out, json.dumps(obj))
    return 0 if obj["roundtrip_ok"] else 1


def cmd_tables(cfg):
    order = cfg.N if cfg.N <= sym.MAX_FACTORS else 6
    pn = {n: sym.extract_pnk(n) for n in range(1, order + 1)}
    xres = sym.x_star_symbolic(order)
    if cfg.fmt == "csv":
        lines = ["table,n,k,monomial,coefficient"]
        for n, res in pn.items():
            for k, tab in sorted(res.tables.items()):
                for mono, c in tab.items():
                    lines.append("p,%d,%d,%s,%s" % (n, k, mono, c))
        for m, tab in sorted(xres.tables.items()):
            for mono, c in tab.items():
                lines.append("s,%d,%d,%s,%s" % (order, m, mono, c))
        _write(cfg.out, "\n".join(lines))
    else:
        obj = {
            "order": order,
            "pnk": {
                str(n): {str(k): {m: str(c) for m, c in tab.items()}
                         for k, tab in res.tables.items()}
                for n, res in pn.items()
            },
            "s": {str(m): {mo: str(c) for mo, c in tab.items()}
                  for m, tab in xres.tables.items()},
            "pnk_positive_integers": all(r.all_positive_integers for r in pn.values()),
            "C_positive_integers": xres.all_positive_integers,
        }
        _write(cfg.out, json.dumps(obj))
    ok = all(r.all_positive_integers for r in pn.values()) and xres.all_positive_integers
    return 0 if ok else 1


COMMANDS = {
    "synth": cmd_synth,
    "recover": cmd_recover,
    "factor": cmd_factor,
    "verify": cmd_verify,
    "strata": cmd_strata,
    "tables": cmd_tables,
}


def build_parser():
    p = argparse.ArgumentParser(
        prog="loopfactor",
        description="Root subgroup factorization of SU(2) loops: synthesis, "
        "recovery, triangular factorization and identity verification.",
    )
    p.add_argument("--cmd", required=True, choices=sorted(COMMANDS))
    p.add_argument("--in", dest="inputs", action="append", default=[],
                   help="input JSON file (params or loop); repeatable")
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--N", type=int, default=64, help="truncation size / table order")
    p.add_argument("--grid-m", type=int, default=10, help="grid exponent: 2^m samples")
    p.add_argument("--exp-trunc", type=int, default=30, help="exp series degree cut")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--suite", default=",".join(SUITES),
                   help="comma-separated subset of %s" % ",".join(SUITES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    return p


def main(argv=None):
    level = os.environ.get("LOOPFACTOR_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        cmd=args.cmd,
        inputs=args.inputs,
        out=args.out,
        N=args.N,
        grid_m=args.grid_m,
        exp_trunc=args.exp_trunc,
        tol=args.tol,
        suites=[s for s in args.suite.split(",") if s],
        seed=args.seed,
        jobs=args.jobs,
        fmt=args.fmt,
    )
    try:
        cfg.validate()
        if cfg.cmd in ("synth", "recover", "factor") and not cfg.inputs:
            raise ValueError("--in is required for %s" % cfg.cmd)
        if cfg.cmd == "strata" and not cfg.inputs:
            raise ValueError("--in is required for strata")
    except ValueError as exc:
        log.error("%s", exc)
        print("error: %s" % exc, file=sys.stderr)
        return 2
    try:
        return COMMANDS[cfg.cmd](cfg)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print("input error: %s" % exc, file=sys.stderr)
        return 2
    except (fz.StratumBoundaryError, ArithmeticError) as exc:
        print("diagnostic: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
