"""Local and boundary operators, and sparse assembly of XXX / XXZ chain Hamiltonians.

Single-site basis is ``|up> = (1, 0)``, ``|down> = (0, 1)``; two-site operators use
the order (up up, up down, down up, down down) with the left factor on the lower
site. Full-space index of a state is ``sum 2**(x-1)`` over its down sites.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import MAX_L_FULL, SectorBasis, popcounts

FAMILIES = ("xxx-periodic", "xxx-open", "xxz-open")
BOUNDARY_KINDS = ("periodic", "xxx-diagonal", "xxx-triangular", "xxz")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PERMUTATION = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


@dataclass(frozen=True)
class BoundarySpec:
    kind: str = "periodic"
    alpha: complex = 0.0
    beta: complex = 0.0
    gamma: complex = 0.0
    delta: complex = 0.0
    mu: complex = 0.0
    s: complex = 0.0

    def __post_init__(self):
        if self.kind not in BOUNDARY_KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "xxx-diagonal" and self.mu != 0:
            raise ValueError("a diagonal boundary requires mu = 0")


@dataclass(frozen=True)
class ModelSpec:
    family: str
    L: int
    boundary: BoundarySpec = field(default_factory=BoundarySpec)
    Q: complex = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.L < 2:
            raise ValueError(f"chain length must be >= 2, got {self.L}")
        expected = {
            "xxx-periodic": ("periodic",),
            "xxx-open": ("xxx-diagonal", "xxx-triangular"),
            "xxz-open": ("xxz",),
        }[self.family]
        if self.boundary.kind not in expected:
            raise ValueError(
                f"family {self.family!r} needs a boundary of kind {expected}, got {self.boundary.kind!r}"
            )
        if self.family == "xxz-open" and self.Q == 0:
            raise ValueError("XXZ requires Q != 0")

    @property
    def conserves_magnetization(self) -> bool:
        return self.family == "xxx-periodic" or (
            self.family == "xxx-open" and self.boundary.mu == 0
        )


def xxx_open(L, alpha=0.0, beta=0.0, gamma=0.0, delta=0.0, mu=0.0) -> ModelSpec:
    kind = "xxx-diagonal" if mu == 0 else "xxx-triangular"
    return ModelSpec("xxx-open", L, BoundarySpec(kind, alpha, beta, gamma, delta, mu))


def xxx_periodic(L) -> ModelSpec:
    return ModelSpec("xxx-periodic", L, BoundarySpec("periodic"))


def xxz_open(L, Q, alpha=0.0, beta=0.0, gamma=0.0, delta=0.0, s=0.0) -> ModelSpec:
    return ModelSpec("xxz-open", L, BoundarySpec("xxz", alpha, beta, gamma, delta, 0.0, s), Q)


def local_h_xxx() -> np.ndarray:
    """``P - 1``: swaps the two spins and subtracts the identity."""
    return PERMUTATION - np.eye(4)


def xxz_couplings(Q) -> tuple[complex, complex]:
    """Anisotropy and telescoping field, ``((Q + 1/Q)/2, (Q - 1/Q)/2)``."""
    if Q == 0:
        raise ValueError("Q must be nonzero")
    return 0.5 * (Q + 1 / Q), 0.5 * (Q - 1 / Q)


def local_h_xxz(Q) -> np.ndarray:
    """Two-site XXZ term normalized so that it equals ``local_h_xxx()`` at ``Q = 1``.

    ``1/2 {sx sx + sy sy + Delta (sz sz - 1) - h (sz x 1 - 1 x sz)}``; the explicit
    matrix is ``[[0,0,0,0], [0,-Q,1,0], [0,1,-1/Q,0], [0,0,0,0]]``.
    """
    Delta, hfield = xxz_couplings(Q)
    eye2 = np.eye(2)
    inner = (
        np.kron(SIGMA_X, SIGMA_X)
        + np.kron(SIGMA_Y, SIGMA_Y)
        + Delta * (np.kron(SIGMA_Z, SIGMA_Z) - np.eye(4))
        - hfield * (np.kron(SIGMA_Z, eye2) - np.kron(eye2, SIGMA_Z))
    )
    return 0.5 * inner


def boundary_matrix_plus(alpha, beta, mu) -> np.ndarray:
    return np.array([[alpha, mu], [0, beta]], dtype=complex)


def boundary_matrix_minus(gamma, delta) -> np.ndarray:
    return np.array([[gamma, 0], [0, delta]], dtype=complex)


def xxz_boundaries(alpha, beta, gamma, delta, s, Q, L) -> tuple[np.ndarray, np.ndarray]:
    """Left (site 1) and right (site L) XXZ boundary matrices; both are rank one."""
    if Q == 0:
        raise ValueError("Q must be nonzero")
    qL = Q ** (L - 1)
    left = np.array(
        [[alpha, -gamma * np.exp(-s)], [-alpha * np.exp(s), gamma]], dtype=complex
    )
    right = np.array([[delta, -beta * qL], [-delta / qL, beta]], dtype=complex)
    return left, right


# --- sparse assembly ------------------------------------------------------


def _two_site(op, i, j, masks, L):
    """COO triplets of ``op`` on sites (i, j) acting on the given basis masks."""
    bi, bj = 1 << (i - 1), 1 << (j - 1)
    si = (masks & bi) != 0
    sj = (masks & bj) != 0
    col_local = 2 * si + sj
    cleared = masks & ~(bi | bj)
    rows, cols, vals = [], [], []
    for out_local in range(4):
        coeff = op[out_local, col_local]
        nz = coeff != 0
        if not nz.any():
            continue
        new = cleared[nz] | (bi if out_local >> 1 else 0) | (bj if out_local & 1 else 0)
        rows.append(new)
        cols.append(np.nonzero(nz)[0])
        vals.append(coeff[nz])
    return rows, cols, vals


def _one_site(op, i, masks):
    b = 1 << (i - 1)
    s = (masks & b) != 0
    cleared = masks & ~b
    rows, cols, vals = [], [], []
    for out_local in range(2):
        coeff = op[out_local, s.astype(int)]
        nz = coeff != 0
        if not nz.any():
            continue
        rows.append(cleared[nz] | (b if out_local else 0))
        cols.append(np.nonzero(nz)[0])
        vals.append(coeff[nz])
    return rows, cols, vals


def terms(spec: ModelSpec):
    """The Hamiltonian as a list of ``(sites, local matrix)`` pairs."""
    L, bd = spec.L, spec.boundary
    out = []
    if spec.family == "xxz-open":
        h = local_h_xxz(spec.Q)
    else:
        h = local_h_xxx()
    for l in range(1, L):
        out.append(((l, l + 1), h))
    if spec.family == "xxx-periodic":
        out.append(((L, 1), h))
    elif spec.family == "xxx-open":
        out.append(((1,), boundary_matrix_plus(bd.alpha, bd.beta, bd.mu)))
        out.append(((L,), boundary_matrix_minus(bd.gamma, bd.delta)))
    else:
        left, right = xxz_boundaries(bd.alpha, bd.beta, bd.gamma, bd.delta, bd.s, spec.Q, L)
        out.append(((1,), left))
        out.append(((L,), right))
    return out


def build_operator(term_list, L, masks=None) -> sp.csr_matrix:
    """Sum of local terms on the basis spanned by ``masks`` (default: the full space).

    Duplicate entries are summed. Raises if a term leaks out of the given basis.
    """
    full = masks is None
    if full:
        if L > MAX_L_FULL:
            raise ValueError(f"full-space assembly is limited to L <= {MAX_L_FULL}")
        masks = np.arange(1 << L, dtype=np.int64)
    masks = np.asarray(masks, dtype=np.int64)
    rows, cols, vals = [], [], []
    for sites, op in term_list:
        if len(sites) == 2:
            r, c, v = _two_site(op, sites[0], sites[1], masks, L)
        else:
            r, c, v = _one_site(op, sites[0], masks)
        rows += r
        cols += c
        vals += v
    dim = len(masks)
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=complex)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals).astype(complex)
    if not full:
        pos = np.searchsorted(masks, rows)
        pos = np.minimum(pos, dim - 1)
        inside = masks[pos] == rows
        if not inside.all():
            raise ValueError("operator does not preserve the requested basis")
        rows = pos
    return sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsr()


def assemble(spec: ModelSpec) -> sp.csr_matrix:
    """Full ``2**L`` sparse Hamiltonian of the model."""
    return build_operator(terms(spec), spec.L)


def assemble_sector(spec: ModelSpec, basis: SectorBasis) -> sp.csr_matrix:
    if not spec.conserves_magnetization:
        raise ValueError("sector assembly needs a magnetization-conserving model")
    if basis.L != spec.L:
        raise ValueError("basis and model have different chain lengths")
    return build_operator(terms(spec), spec.L, basis.masks)


def matvec(H, v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (H.shape[1],):
        raise ValueError(f"dimension mismatch: operator {H.shape}, vector {v.shape}")
    return H @ v


def sz_diagonal(L) -> np.ndarray:
    """Eigenvalues of the total ``S^z = sum sigma^z`` in the full basis, ``L - 2m``."""
    return L - 2 * popcounts(L)


def sz_commutator_norm(H, L) -> float:
    sz = sp.diags(sz_diagonal(L).astype(complex))
    comm = H @ sz - sz @ H
    return float(spla.norm(comm)) if comm.nnz else 0.0


def sector_order(L) -> np.ndarray:
    """Full-space indices sorted by ascending down-spin count (then by mask).

    In this order a triangular boundary, which only lowers the number of down
    spins, puts every off-block entry above the diagonal blocks.
    """
    counts = popcounts(L)
    return np.lexsort((np.arange(1 << L), counts))


def sector_blocks(L) -> list[slice]:
    counts = np.sort(popcounts(L))
    edges = np.searchsorted(counts, np.arange(L + 2))
    return [slice(int(edges[m]), int(edges[m + 1])) for m in range(L + 1)]
