"""Command-line front end: ``spectrum``, ``solve``, ``verify`` and ``scan-constraints``.

Reports are JSON (``config`` echo, ``results``, ``summary``; sorted keys, complex
numbers as ``[re, im]``) or CSV with a fixed column order. Exit codes: 0 success,
1 verification failure, 2 usage error, 3 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import ansatz, bethe, oracle, xxz
from .basis import enumerate_sector
from .hamiltonian import FAMILIES, assemble, assemble_sector, xxx_open, xxx_periodic, xxz_open
from .weyl import MAX_N

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
MAX_L_DENSE = 12
NULL_STATE_TOL = 1e-8
COMMANDS = ("spectrum", "solve", "verify", "scan-constraints")


class UsageError(Exception):
    pass


class GuardError(Exception):
    pass


@dataclass
class RunConfig:
    family: str = "xxx-periodic"
    L: int = 4
    m: int = 1
    alpha: complex = 0.0
    beta: complex = 0.0
    gamma: complex = 0.0
    delta: complex = 0.0
    mu: complex = 0.0
    Q: complex = 1.0
    s: complex = 0.0
    tol: float = bethe.SOLVER_TOL
    max_iter: int = bethe.MAX_ITER
    seeds: list | None = None
    sweep: list | None = None
    threshold: float = 1e-8
    format: str = "json"
    out: str | None = None


COMPLEX_FIELDS = ("alpha", "beta", "gamma", "delta", "mu", "Q", "s")


def parse_complex(text) -> complex:
    if isinstance(text, (list, tuple)):
        if len(text) != 2:
            raise UsageError(f"complex pair must have two entries, got {text!r}")
        return complex(float(text[0]), float(text[1]))
    if isinstance(text, (int, float, complex)):
        return complex(text)
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"not a complex number: {text!r}") from None


def parse_sweep(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        lo, hi = text
    else:
        try:
            lo, hi = str(text).split(":")
        except ValueError:
            raise UsageError(f"--sweep expects LO:HI, got {text!r}") from None
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"--sweep bounds must be integers, got {text!r}") from None
    if hi < lo:
        raise UsageError(f"empty sweep range {lo}:{hi}")
    return [lo, hi]


def parse_seeds(value) -> list[list[complex]]:
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except json.JSONDecodeError:
            raise UsageError("--seeds expects a JSON array of momentum lists") from None
    if not isinstance(value, list):
        raise UsageError("seeds must be a list of momentum lists")
    out = []
    for seed in value:
        if not isinstance(seed, list):
            raise UsageError(f"seed {seed!r} is not a list")
        out.append([parse_complex(x) for x in seed])
    return out


def _real(x) -> float:
    # adding 0.0 folds -0.0 into 0.0
    return float(x) + 0.0


def _num(c: complex):
    c = complex(c)
    return [_real(c.real), _real(c.imag)]


def _jsonable(value):
    if isinstance(value, (complex, np.complexfloating)):
        return _num(value)
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (np.floating, float)):
        v = _real(value)
        return v if math.isfinite(v) else str(v)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    merged = asdict(RunConfig())
    if args.config:
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(from_file, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)} | {"n"}
        unknown = sorted(set(from_file) - known)
        if unknown:
            raise UsageError(f"unknown config fields: {', '.join(unknown)}")
        if "n" in from_file:
            from_file.setdefault("m", from_file.pop("n"))
        merged.update(from_file)
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            merged[f.name] = val
    cfg = RunConfig(**merged)
    for name in COMPLEX_FIELDS:
        setattr(cfg, name, parse_complex(getattr(cfg, name)))
    if cfg.seeds is not None:
        cfg.seeds = parse_seeds(cfg.seeds)
    if cfg.sweep is not None:
        cfg.sweep = parse_sweep(cfg.sweep)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig):
    if cfg.family not in FAMILIES:
        raise UsageError(f"unknown family {cfg.family!r}; expected one of {', '.join(FAMILIES)}")
    for name in ("L", "m", "max_iter"):
        if not isinstance(getattr(cfg, name), int) or isinstance(getattr(cfg, name), bool):
            raise UsageError(f"{name} must be an integer")
    if cfg.L < 2:
        raise UsageError(f"L must be >= 2, got {cfg.L}")
    if not 0 <= cfg.m <= cfg.L:
        raise UsageError(f"excitation count must lie in [0, L], got {cfg.m}")
    if not (cfg.tol > 0 and cfg.max_iter > 0 and cfg.threshold >= 0):
        raise UsageError("tol and max-iter must be positive, threshold non-negative")
    if cfg.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {cfg.format!r}")
    if cfg.family == "xxx-periodic" and any(
        getattr(cfg, n) != 0 for n in ("alpha", "beta", "gamma", "delta", "mu")
    ):
        raise UsageError("the periodic chain takes no boundary parameters")
    if cfg.family != "xxz-open" and (cfg.Q != 1 or cfg.s != 0):
        raise UsageError("Q and s apply to the xxz-open family only")
    if cfg.family == "xxz-open" and cfg.Q == 0:
        raise UsageError("Q must be nonzero")
    if cfg.family == "xxz-open" and cfg.mu != 0:
        raise UsageError("mu applies to the xxx-open family only")
    if cfg.seeds is not None and any(len(s) != cfg.m for s in cfg.seeds):
        raise UsageError(f"every seed needs exactly {cfg.m} momenta")


def config_echo(cfg: RunConfig) -> dict:
    return _jsonable(asdict(cfg))


def model_of(cfg: RunConfig):
    if cfg.family == "xxx-periodic":
        return xxx_periodic(cfg.L)
    if cfg.family == "xxx-open":
        return xxx_open(cfg.L, cfg.alpha, cfg.beta, cfg.gamma, cfg.delta, cfg.mu)
    return xxz_open(cfg.L, cfg.Q, cfg.alpha, cfg.beta, cfg.gamma, cfg.delta, cfg.s)


def _guard_dense(cfg: RunConfig):
    if cfg.L > MAX_L_DENSE:
        raise GuardError(f"exact diagonalization is limited to L <= {MAX_L_DENSE}")


def _bethe_family(cfg: RunConfig) -> str:
    if cfg.family == "xxz-open":
        raise UsageError("Bethe equations are available for the XXX families only")
    return cfg.family


def _params(cfg: RunConfig):
    if cfg.family == "xxx-open":
        return bethe.OpenParams(cfg.alpha, cfg.beta, cfg.gamma, cfg.delta)
    return None


def _energy(cfg: RunConfig, k) -> complex:
    if cfg.family == "xxx-periodic":
        return ansatz.energy_periodic(k)
    return ansatz.energy_open(k, cfg.alpha, cfg.gamma)


def exact_spectrum(cfg: RunConfig) -> oracle.SpectrumReport:
    """Full spectrum; XXX models are block triangular, so the sector blocks suffice."""
    spec = model_of(cfg)
    if cfg.family == "xxz-open":
        return oracle.dense_eigenvalues(assemble(spec))
    diag = spec if spec.conserves_magnetization else xxx_open(cfg.L, cfg.alpha, cfg.beta, cfg.gamma, cfg.delta)
    reports = [oracle.dense_eigenvalues(assemble_sector(diag, enumerate_sector(cfg.L, m))) for m in range(cfg.L + 1)]
    return oracle.SpectrumReport(
        np.concatenate([r.eigenvalues for r in reports]),
        sum(r.iterations for r in reports),
        sum(r.deflations for r in reports),
        np.concatenate([r.backward_errors for r in reports]),
        np.concatenate([r.converged for r in reports]),
    )


def sector_spectrum(cfg: RunConfig) -> np.ndarray:
    """Eigenvalues of the ``m``-down-spin diagonal block (mu dropped: it is off-block)."""
    spec = xxx_periodic(cfg.L) if cfg.family == "xxx-periodic" else xxx_open(
        cfg.L, cfg.alpha, cfg.beta, cfg.gamma, cfg.delta
    )
    return oracle.dense_eigenvalues(assemble_sector(spec, enumerate_sector(cfg.L, cfg.m))).eigenvalues


def cmd_spectrum(cfg: RunConfig) -> tuple[dict, int]:
    _guard_dense(cfg)
    rep = exact_spectrum(cfg)
    order = np.lexsort((rep.eigenvalues.imag, rep.eigenvalues.real))
    results = [
        {"index": i, "eigenvalue": rep.eigenvalues[j], "converged": bool(rep.converged[j])}
        for i, j in enumerate(order)
    ]
    summary = {"dimension": int(len(order)), "all_converged": rep.all_converged}
    return {"results": results, "summary": summary}, EXIT_OK


def run_solver(cfg: RunConfig):
    family = _bethe_family(cfg)
    params = _params(cfg)
    qrange = None if cfg.sweep is None else range(cfg.sweep[0], cfg.sweep[1] + 1)
    return bethe.sweep(
        family, cfg.L, cfg.m, params, qrange=qrange, seeds=cfg.seeds, tol=cfg.tol, max_iter=cfg.max_iter
    )


def _attempt_row(sol: bethe.BetheSolution, i: int) -> dict:
    return {
        "seed_index": i,
        "quantum_numbers": list(sol.quantum_numbers) if sol.quantum_numbers is not None else None,
        "status": sol.status,
        "converged": sol.converged,
        "residual_norm": sol.residual_norm,
        "iterations": sol.iterations,
    }


def cmd_solve(cfg: RunConfig) -> tuple[dict, int]:
    roots, raw = run_solver(cfg)
    results = [
        {
            "k": sol.k,
            "energy": _energy(cfg, sol.k),
            "residual_norm": sol.residual_norm,
            "iterations": sol.iterations,
            "quantum_numbers": list(sol.quantum_numbers) if sol.quantum_numbers is not None else None,
            "slow_converging": sol.slow_converging,
        }
        for sol in roots
    ]
    summary = {
        "seeds": len(raw),
        "converged_seeds": sum(s.converged for s in raw),
        "distinct_roots": len(roots),
        "attempts": [_attempt_row(s, i) for i, s in enumerate(raw)],
    }
    return {"results": results, "summary": summary}, EXIT_OK


def cmd_verify(cfg: RunConfig) -> tuple[dict, int]:
    _guard_dense(cfg)
    if cfg.m > MAX_N:
        raise GuardError(f"amplitude tables are limited to {MAX_N} excitations")
    roots, raw = run_solver(cfg)
    spec = model_of(cfg)
    H = assemble(spec)
    exact = sector_spectrum(cfg)
    results, energies = [], []
    worst = 0.0
    for sol in roots:
        psi, energy = ansatz.build_state(spec, sol.k)
        norm = float(np.linalg.norm(psi))
        row = {"k": sol.k, "energy": energy, "state_norm": norm}
        if norm <= NULL_STATE_TOL:
            row.update(status="null-state", residual=None)
        else:
            res = oracle.eigenpair_residual(H, psi, energy)
            worst = max(worst, res)
            energies.append(energy)
            row.update(status="ok" if res <= cfg.threshold else "residual-too-large", residual=res)
        results.append(row)
    match = oracle.match_spectra(energies, exact, tol=max(cfg.threshold, 1e-8))
    matched = {p for p, _, _ in match.pairs}
    for row in results:
        if row["residual"] is not None:
            row["matched"] = complex(row["energy"]) in matched
    failed = any(r["status"] == "residual-too-large" for r in results)
    summary = {
        "max_residual": worst,
        "coverage": match.coverage,
        "matched": len(match.pairs),
        "unmatched": len(match.unmatched),
        "sector_dimension": int(len(exact)),
        "distinct_roots": len(roots),
        "seeds": len(raw),
        "passed": not failed,
    }
    return {"results": results, "summary": summary}, EXIT_VERIFY if failed else EXIT_OK


def cmd_scan_constraints(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.family != "xxz-open":
        raise UsageError("scan-constraints needs --family xxz-open")
    p = xxz.XxzParams(cfg.L, cfg.Q, cfg.alpha, cfg.beta, cfg.gamma, cfg.delta, cfg.s)
    results = []
    for t in xxz.constraint_defects(p):
        results.append(
            {
                "n": t.n,
                "eps": t.eps,
                "eps_p": t.eps_p,
                "abs_defect": abs(t.defect) if t.defect is not None else None,
                "satisfied": t.satisfied(),
                "error": t.error,
            }
        )
    flagged = [[r["n"], r["eps"], r["eps_p"]] for r in results if r["satisfied"]]
    summary = {"rows": len(results), "satisfied": flagged, "errors": sum(r["error"] is not None for r in results)}
    return {"results": results, "summary": summary}, EXIT_OK


HANDLERS = {
    "spectrum": cmd_spectrum,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "scan-constraints": cmd_scan_constraints,
}

CSV_COLUMNS = {
    "spectrum": ["index", "re", "im", "converged"],
    "solve": ["root", "slot", "k_re", "k_im", "energy_re", "energy_im", "residual_norm", "iterations"],
    "verify": ["root", "energy_re", "energy_im", "residual", "status", "matched"],
    "scan-constraints": ["n", "eps", "eps_p", "abs_defect", "satisfied", "error"],
}


def _csv_rows(command, results):
    if command == "spectrum":
        for r in results:
            ev = complex(r["eigenvalue"])
            yield [r["index"], repr(_real(ev.real)), repr(_real(ev.imag)), r["converged"]]
    elif command == "solve":
        for i, r in enumerate(results):
            e = complex(r["energy"])
            for j, k in enumerate(r["k"]):
                yield [
                    i, j, repr(_real(k.real)), repr(_real(k.imag)),
                    repr(_real(e.real)), repr(_real(e.imag)), repr(_real(r["residual_norm"])), r["iterations"],
                ]
    elif command == "verify":
        for i, r in enumerate(results):
            e = complex(r["energy"])
            res = "" if r["residual"] is None else repr(_real(r["residual"]))
            yield [i, repr(_real(e.real)), repr(_real(e.imag)), res, r["status"], r.get("matched", "")]
    else:
        for r in results:
            d = "" if r["abs_defect"] is None else repr(_real(r["abs_defect"]))
            yield [r["n"], r["eps"], r["eps_p"], d, r["satisfied"], r["error"] or ""]


def render(command: str, cfg: RunConfig, report: dict) -> str:
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS[command])
        writer.writerows(_csv_rows(command, report["results"]))
        return buf.getvalue()
    doc = {"command": command, "config": config_echo(cfg), **_jsonable(report)}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _diagnose(message: str):
    use_color = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    prefix = "\033[31merror:\033[0m" if use_color else "error:"
    print(f"{prefix} {message}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coordbethe", description="Coordinate Bethe ansatz lab for XXX/XXZ chains.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config")
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--L", type=int)
        p.add_argument("--m", "--n", dest="m", type=int)
        for field_name in COMPLEX_FIELDS:
            p.add_argument(f"--{field_name}")
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--seeds", help="JSON array of momentum lists, complex entries as [re, im]")
        p.add_argument("--sweep", help="quantum-number range LO:HI (inclusive)")
        p.add_argument("--threshold", type=float)
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = build_config(args)
        report, code = HANDLERS[args.command](cfg)
    except UsageError as exc:
        _diagnose(str(exc))
        return EXIT_USAGE
    except GuardError as exc:
        _diagnose(str(exc))
        return EXIT_GUARD
    except (ValueError, TypeError) as exc:
        _diagnose(str(exc))
        return EXIT_USAGE
    text = render(args.command, cfg, report)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code
