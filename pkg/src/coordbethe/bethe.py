"""Bethe equations for periodic and open XXX chains and a damped Newton solver.

Unknowns are the momenta ``k_j`` (complex); real and imaginary parts are treated
as independent real unknowns and the Jacobian is a central finite difference.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import (
    SingularMomentaError,
    check_regular,
    r_minus,
    r_plus,
    scattering,
)

PERIODIC = "xxx-periodic"
OPEN = "xxx-open"

SOLVER_TOL = 1e-11
MAX_ITER = 200
POLISH_ITER = 8
# creeping toward a wall is linear at best; give up when 20 steps fail to halve the residual
PROGRESS_WINDOW = 20
FD_STEP = 1e-7
DAMPING_FLOOR = 2.0**-20
COINCIDE_TOL = 1e-8
COINCIDE_KICK = 1e-6
# both sides of a genuine root are O(1); spurious roots at large Im k drive both to 0
SIDE_AGREEMENT_TOL = 1e-8
# Newton only creeps toward singular walls, so regularity is judged with a wide margin
WALL_TOL = 1e-6


@dataclass(frozen=True)
class OpenParams:
    alpha: complex = 0.0
    beta: complex = 0.0
    gamma: complex = 0.0
    delta: complex = 0.0


@dataclass
class BetheSolution:
    family: str
    L: int
    count: int
    k: np.ndarray
    quantum_numbers: tuple | None
    residual_norm: float
    iterations: int
    converged: bool
    status: str = "converged"
    history: list[float] = field(default_factory=list)
    slow_converging: bool = False

    @property
    def z(self) -> np.ndarray:
        return np.exp(1j * self.k)


def _sides_periodic(k, L):
    z = np.exp(1j * np.asarray(k, dtype=complex))
    lhs = np.ones(len(z), dtype=complex)
    for j in range(len(z)):
        for l in range(len(z)):
            if l != j:
                lhs[j] *= scattering(z[l], z[j])
    return lhs, z**L


def _sides_open(k, L, p: OpenParams):
    z = np.exp(1j * np.asarray(k, dtype=complex))
    n = len(z)
    lhs = np.ones(n, dtype=complex)
    rhs = np.zeros(n, dtype=complex)
    for j in range(n):
        for l in range(n):
            if l != j:
                lhs[j] *= scattering(z[l], z[j]) * scattering(1 / z[j], z[l])
        num = r_plus(z[j], p.alpha, p.beta) * r_minus(z[j], p.gamma, p.delta)
        den = r_plus(1 / z[j], p.alpha, p.beta) * r_minus(1 / z[j], p.gamma, p.delta)
        if abs(den) < 1e-300:
            raise SingularMomentaError("boundary factors vanish")
        rhs[j] = z[j] ** (2 * L) * num / den
    return lhs, rhs


def residual_periodic(k, L) -> np.ndarray:
    """``prod_{l != j} S(z_l, z_j) - z_j^L`` for every j."""
    lhs, rhs = _sides_periodic(k, L)
    return lhs - rhs


def residual_open(k, L, alpha, beta, gamma, delta) -> np.ndarray:
    """Open-chain equations, left side minus right side. They do not involve mu."""
    lhs, rhs = _sides_open(k, L, OpenParams(alpha, beta, gamma, delta))
    return lhs - rhs


def _sides(family, k, L, params):
    if family == PERIODIC:
        return _sides_periodic(k, L)
    if family == OPEN:
        return _sides_open(k, L, params)
    raise ValueError(f"no Bethe equations for family {family!r}")


def residual(family, k, L, params=None) -> np.ndarray:
    lhs, rhs = _sides(family, k, L, params)
    return lhs - rhs


def side_disagreement(family, k, L, params=None) -> float:
    lhs, rhs = _sides(family, k, L, params)
    if len(lhs) == 0:
        return 0.0
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(scale > 0, np.abs(lhs - rhs) / scale, 0.0)
    return float(rel.max())


def seed_from_quantum_numbers(family, L, quantum_numbers) -> np.ndarray:
    q = np.asarray(quantum_numbers, dtype=float)
    factor = 2 * math.pi / L if family == PERIODIC else math.pi / L
    return (factor * q).astype(complex)


def _too_close(k, signed) -> bool:
    z = np.exp(1j * k)
    for i in range(len(z)):
        for j in range(i):
            if abs(k[i] - k[j]) < COINCIDE_TOL or abs(z[i] - z[j]) < COINCIDE_TOL:
                return True
            if signed and abs(z[i] * z[j] - 1) < COINCIDE_TOL:
                return True
    return False


def wall_distance(k, signed) -> float:
    """Distance of ``z = e^{ik}`` to the nearest singular configuration of the ansatz."""
    z = np.exp(1j * np.asarray(k, dtype=complex))
    d = math.inf
    for i in range(len(z)):
        for j in range(i):
            d = min(d, abs(z[i] - z[j]))
            if signed:
                d = min(d, abs(z[i] * z[j] - 1))
        if signed:
            d = min(d, abs(z[i] - 1), abs(z[i] + 1))
    return d


def _kick(k):
    return k + COINCIDE_KICK * (np.arange(1, len(k) + 1) * (1 + 0.5j))


def quadratic_tail(history) -> bool:
    """Whether the last three residual norms shrink at least quadratically (slack 10).

    A final norm at the roundoff floor passes, since the ratio is meaningless there.
    """
    if len(history) < 3:
        return True
    e1, e2, e3 = history[-3:]
    if e3 == 0 or e2 == 0:
        return True
    if e1 == 0:
        return False
    return e3 / e2 <= 10 * (e2 / e1) ** 2 or e3 <= 1e-14


def _factor_logs(family, k, L, params):
    """Per-equation ``(c L i k_j, sum of principal logs of the remaining factors)``.

    The equation ``prod S = z^(cL) B`` becomes ``c L i k_j + log B_j - sum log S = 2 pi i I_j``
    with ``c = 1`` (periodic) or ``2`` (open) and ``B`` the boundary ratio.
    """
    k = np.asarray(k, dtype=complex)
    z = np.exp(1j * k)
    n = len(z)
    c = 1 if family == PERIODIC else 2
    rest = np.zeros(n, dtype=complex)
    for j in range(n):
        for l in range(n):
            if l == j:
                continue
            rest[j] -= np.log(scattering(z[l], z[j]))
            if family == OPEN:
                rest[j] -= np.log(scattering(1 / z[j], z[l]))
        if family == OPEN:
            num = r_plus(z[j], params.alpha, params.beta) * r_minus(z[j], params.gamma, params.delta)
            den = r_plus(1 / z[j], params.alpha, params.beta) * r_minus(1 / z[j], params.gamma, params.delta)
            rest[j] += np.log(num) - np.log(den)
    return 1j * c * L * k, rest


def log_residual(family, k, L, params=None, quantum_numbers=None) -> np.ndarray:
    """Logarithmic Bethe equations on the branch fixed by integer ``quantum_numbers``.

    Without quantum numbers the nearest branch is used for every equation.
    """
    if family == OPEN and params is None:
        params = OpenParams()
    phase, rest = _factor_logs(family, k, L, params)
    g = phase + rest
    if quantum_numbers is None:
        branch = np.round(g.imag / (2 * np.pi))
    else:
        branch = np.asarray(quantum_numbers, dtype=float)
    return g - 2j * np.pi * branch


def _newton(F, x, tol, max_iter, signed, count, kicked):
    """Damped Newton on a real vector function; returns (x, norm, iterations, status, history, kicked)."""

    def as_k(v):
        return v[:count] + 1j * v[count:]

    fx = F(x)
    norm = float(np.linalg.norm(fx))
    history = [norm]
    it = 0
    while norm > tol and it < max_iter:
        it += 1
        J = np.empty((2 * count, 2 * count))
        try:
            for i in range(2 * count):
                e = np.zeros(2 * count)
                e[i] = FD_STEP
                J[:, i] = (F(x + e) - F(x - e)) / (2 * FD_STEP)
        except SingularMomentaError:
            return x, norm, it, "singular", history, kicked
        step = np.linalg.lstsq(J, -fx, rcond=None)[0]
        t = 1.0
        while True:
            trial = x + t * step
            try:
                ft = F(trial)
                nt = float(np.linalg.norm(ft))
            except SingularMomentaError:
                nt = math.inf
            if nt < norm:
                break
            t /= 2
            if t < DAMPING_FLOOR:
                return x, norm, it, "stalled", history, kicked
        x, fx, norm = trial, ft, nt
        history.append(norm)
        if len(history) > PROGRESS_WINDOW and norm > 0.5 * history[-PROGRESS_WINDOW - 1]:
            return x, norm, it, "stalled", history, kicked
        if _too_close(as_k(x), signed):
            if kicked:
                return x, norm, it, "coinciding", history, kicked
            kicked = True
            kk = _kick(as_k(x))
            x = np.concatenate([kk.real, kk.imag])
            try:
                fx = F(x)
            except SingularMomentaError:
                return x, norm, it, "singular", history, kicked
            norm = float(np.linalg.norm(fx))
    status = "converged" if norm <= tol else "max-iter"
    return x, norm, it, status, history, kicked


def solve(
    family,
    L,
    count,
    params: OpenParams | None = None,
    seed=None,
    quantum_numbers=None,
    tol=SOLVER_TOL,
    max_iter=MAX_ITER,
) -> BetheSolution:
    """Damped Newton iteration from one seed.

    The seed is either explicit momenta or integer quantum numbers ``I_j`` mapped to
    ``2 pi I_j / L`` (periodic) or ``pi I_j / L`` (open). Newton runs on the
    logarithmic equations (branch ``I_j``, or the nearest one for explicit seeds), whose
    phase term is linear in ``k``, then a few steps on the product form polish the
    root. Convergence is judged on the product-form residual. Failure to converge is
    reported in the returned solution, not raised.
    """
    if family not in (PERIODIC, OPEN):
        raise ValueError(f"no Bethe equations for family {family!r}")
    if family == OPEN and params is None:
        params = OpenParams()
    if (seed is None) == (quantum_numbers is None):
        raise ValueError("give exactly one of seed or quantum_numbers")
    if seed is None:
        k = seed_from_quantum_numbers(family, L, quantum_numbers)
        qn = tuple(int(q) for q in quantum_numbers)
    else:
        k = np.asarray(seed, dtype=complex).copy()
        qn = None
    if len(k) != count:
        raise ValueError(f"seed has {len(k)} momenta, expected {count}")
    signed = family == OPEN

    def make(k, res, it, status, history):
        ok = status == "converged"
        sol = BetheSolution(family, L, count, k, qn, res, it, ok, status, history)
        sol.slow_converging = ok and not quadratic_tail(history)
        return sol

    if count == 0:
        return make(k, 0.0, 0, "converged", [0.0])

    def realify(fn):
        def F(x):
            kk = x[:count] + 1j * x[count:]
            with np.errstate(all="ignore"):
                r = fn(kk)
            out = np.concatenate([r.real, r.imag])
            if not np.all(np.isfinite(out)):
                raise SingularMomentaError("non-finite residual")
            return out

        return F

    kicked = False
    if _too_close(k, signed):
        k = _kick(k)
        kicked = True
    F_prod = realify(lambda kk: residual(family, kk, L, params))
    x = np.concatenate([k.real, k.imag])
    try:
        F_prod(x)
    except SingularMomentaError:
        if kicked:
            return make(k, math.inf, 0, "singular", [])
        k = _kick(k)
        kicked = True
        x = np.concatenate([k.real, k.imag])
        try:
            F_prod(x)
        except SingularMomentaError:
            return make(k, math.inf, 0, "singular", [])

    # fix the branch once so the log residual is a single smooth function
    try:
        with np.errstate(all="ignore"):
            g = sum(_factor_logs(family, x[:count] + 1j * x[count:], L, params))
    except SingularMomentaError:
        return make(k, math.inf, 0, "singular", [])
    branch = qn if qn is not None else np.round(g.imag / (2 * np.pi))
    F_log = realify(lambda kk: log_residual(family, kk, L, params, branch))
    try:
        x, _, it_log, status, log_hist, kicked = _newton(F_log, x, 1e-2 * tol, max_iter, signed, count, kicked)
        if status in ("coinciding", "singular"):
            return make(x[:count] + 1j * x[count:], math.inf, it_log, status, log_hist)
        budget = min(POLISH_ITER, max_iter - it_log)
        x, norm, it_pol, status, pol_hist, kicked = _newton(F_prod, x, tol, budget, signed, count, kicked)
    except SingularMomentaError:
        return make(x[:count] + 1j * x[count:], math.inf, 0, "singular", [])
    history = log_hist + pol_hist[1:]
    it = it_log + it_pol
    k = x[:count] + 1j * x[count:]
    if status != "converged":
        return make(k, norm, it, status, history)
    try:
        check_regular(k, signed)
    except SingularMomentaError:
        return make(k, norm, it, "singular", history)
    if wall_distance(k, signed) < WALL_TOL:
        return make(k, norm, it, "singular", history)
    with np.errstate(all="ignore"):
        disagreement = side_disagreement(family, k, L, params)
    if disagreement > SIDE_AGREEMENT_TOL:
        return make(k, norm, it, "degenerate", history)
    return make(k, norm, it, "converged", history)


def canonical_momenta(k, family) -> np.ndarray:
    """Representative of ``k`` under permutations (and sign flips for open chains)."""
    k = np.asarray(k, dtype=complex)
    re = np.mod(k.real, 2 * math.pi)
    if family == OPEN:
        re = np.where(re > math.pi, re - 2 * math.pi, re)
        im = k.imag.copy()
        flip = (re < -1e-12) | ((np.abs(re) <= 1e-12) & (im < 0))
        re = np.where(flip, -re, re)
        im = np.where(flip, -im, im)
    else:
        re = np.where(re > 2 * math.pi - 1e-12, 0.0, re)
        im = k.imag
    re = np.where(np.abs(re) <= 1e-12, 0.0, re)
    out = re + 1j * im
    order = np.lexsort((np.round(out.imag, 9), np.round(out.real, 9)))
    return out[order]


def deduplicate(solutions, tol=1e-8) -> list[BetheSolution]:
    """Merge solutions equal up to the symmetry of the equations; keeps the first seen.

    Surviving solutions have canonical momenta and are sorted by them.
    """
    kept: list[BetheSolution] = []
    keys: list[np.ndarray] = []
    for sol in solutions:
        key = canonical_momenta(sol.k, sol.family)
        if any(len(key) == len(o) and np.abs(key - o).max() <= tol for o in keys):
            continue
        keys.append(key)
        sol.k = key
        kept.append(sol)
    order = sorted(range(len(kept)), key=lambda i: [(round(c.real, 9), round(c.imag, 9)) for c in keys[i]])
    return [kept[i] for i in order]


def default_quantum_range(family, L) -> range:
    return range(0, L) if family == PERIODIC else range(1, L)


def quantum_number_sets(family, L, count, qrange=None):
    """Non-decreasing tuples of quantum numbers; repeats allowed so bound states can be reached."""
    qrange = default_quantum_range(family, L) if qrange is None else qrange
    return list(itertools.combinations_with_replacement(qrange, count))


def sweep(
    family,
    L,
    count,
    params=None,
    qrange=None,
    seeds=None,
    tol=SOLVER_TOL,
    max_iter=MAX_ITER,
    imag_shifts=(0.0,),
):
    """Solve from every seed; returns (deduplicated converged roots, all raw results).

    Without explicit ``seeds`` every quantum-number tuple is tried once per entry of
    ``imag_shifts``, added to the first momentum (complex boundary roots need it).
    """
    raw = []
    if seeds is not None:
        for s in seeds:
            raw.append(solve(family, L, count, params, seed=s, tol=tol, max_iter=max_iter))
    else:
        for qn in quantum_number_sets(family, L, count, qrange):
            for shift in imag_shifts:
                if shift == 0:
                    raw.append(solve(family, L, count, params, quantum_numbers=qn, tol=tol, max_iter=max_iter))
                    continue
                k0 = seed_from_quantum_numbers(family, L, qn)
                k0[0] += 1j * shift
                sol = solve(family, L, count, params, seed=k0, tol=tol, max_iter=max_iter)
                sol.quantum_numbers = tuple(int(q) for q in qn)
                raw.append(sol)
    good = deduplicate([s for s in raw if s.converged])
    return good, raw
