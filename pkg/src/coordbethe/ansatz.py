"""Bethe-ansatz coefficients and wavefunctions for the XXX chain.

Coefficients take ``z = exp(i k)``. Amplitudes are indexed by signed permutations
(``weyl``); the amplitude of ``g`` is obtained from ``A_id = 1`` by walking the
canonical word of ``g`` and multiplying in a scattering factor for every ``t_j``
and a reflection factor for every ``R1``. With a triangular left boundary the state
carries a tail: components where ``m`` of the ``n`` excitations have been absorbed
by the boundary, weighted by products of transmission coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import weyl
from .basis import enumerate_sector
from .hamiltonian import BoundarySpec, ModelSpec

POLE_RTOL = 1e-10


class SingularMomentaError(ValueError):
    """A coefficient hit one of its poles for the given momenta."""


def _ratio(num, den, what="coefficient"):
    if abs(den) < POLE_RTOL * (1 + abs(num)):
        raise SingularMomentaError(f"{what} is singular (denominator {abs(den):.3g})")
    return num / den


def scattering(z1, z2):
    """Amplitude ratio picked up when the momenta carried by ``z1``, ``z2`` swap slots."""
    return _ratio(-(2 * z2 - z1 * z2 - 1), 2 * z1 - z1 * z2 - 1, "S")


def r_plus(z, alpha, beta):
    """Left-boundary factor ``(z-1)(1-z+beta-alpha) / (z(1+z))``."""
    return _ratio((z - 1) * (1 - z + beta - alpha), z * (1 + z), "r+")


def r_plus_triangular(z, alpha, beta):
    """Same factor with the overall minus sign used in the transmission coefficient."""
    return -r_plus(z, alpha, beta)


def reflection(z, alpha, beta):
    """``R+(z) = -z^2 (1 - 1/z + beta - alpha) / (1 - z + beta - alpha)``."""
    if z == 1:
        raise SingularMomentaError("R+ is 0/0 at z = 1")
    return -(z**2) * _ratio(1 - 1 / z + beta - alpha, 1 - z + beta - alpha, "R+")


def r_minus(z, gamma, delta):
    return _ratio((z - 1) * (1 - z + delta - gamma), z + 1, "r-")


def a_coeff(z1, z2):
    return _ratio(1j * (2 * z2 - z1 * z2 - 1), z1 * z2 - 1, "a")


def transmission(m, z, alpha, beta, mu):
    """Weight ratio between tails of size ``m`` and ``m - 1``; ``z`` holds ``z_1..z_m``."""
    z = list(z)
    if m < 1 or len(z) != m:
        raise ValueError(f"transmission of order {m} needs {m} arguments, got {len(z)}")
    zm = z[-1]
    den = r_plus_triangular(zm, alpha, beta)
    for zj in z[:-1]:
        den *= a_coeff(zm, zj) * a_coeff(zj, 1 / zm)
    return _ratio(mu, den, f"T^({m})")


def lam(z):
    """One-magnon dispersion ``z + 1/z - 2``."""
    return z + 1 / z - 2


def energy_periodic(k) -> complex:
    k = np.asarray(k, dtype=complex)
    return complex(np.sum(np.exp(1j * k) + np.exp(-1j * k) - 2))


def energy_open(k, alpha, gamma) -> complex:
    k = np.asarray(k, dtype=complex)
    return complex(alpha + gamma + np.sum(lam(np.exp(1j * k))))


# --- amplitudes -------------------------------------------------------------


def check_regular(k, signed: bool):
    """Reject coinciding momenta and (for open chains) momenta on the WB symmetry walls."""
    z = np.exp(1j * np.asarray(k, dtype=complex))
    n = len(z)
    for i in range(n):
        for j in range(i):
            if abs(z[i] - z[j]) < 1e-10:
                raise SingularMomentaError(f"momenta {i + 1} and {j + 1} coincide")
            if signed and abs(z[i] * z[j] - 1) < 1e-10:
                raise SingularMomentaError(f"momenta {i + 1} and {j + 1} are opposite")
        if signed and (abs(z[i] - 1) < 1e-10 or abs(z[i] + 1) < 1e-10):
            raise SingularMomentaError(f"momentum {i + 1} sits at 0 or pi")


def amplitude_along(word, k, boundary: BoundarySpec | None = None) -> complex:
    """Top amplitude reached from ``A_id = 1`` by following ``word``."""
    v = np.exp(1j * np.asarray(k, dtype=complex))
    amp = 1.0 + 0j
    for name in word:
        if name == "R1":
            amp *= reflection(v[0], boundary.alpha, boundary.beta)
            v[0] = 1 / v[0]
        else:
            j = int(name[1:]) - 1
            amp *= scattering(v[j], v[j + 1])
            v[j], v[j + 1] = v[j + 1], v[j]
    return amp


@dataclass
class AmplitudeTable:
    """Amplitudes ``A^(n,m)`` keyed by tail size ``m`` and canonical coset representative."""

    n: int
    k: np.ndarray
    signed: bool
    tables: dict[int, dict[weyl.SignedPermutation, complex]] = field(default_factory=dict)

    def top(self, g: weyl.SignedPermutation) -> complex:
        return self.tables[0][g]

    def tail(self, m: int, g: weyl.SignedPermutation) -> complex:
        return self.tables[m][weyl.coset_representative(g, m) if self.signed else g]


def build_amplitudes(n, k, boundary: BoundarySpec | None = None) -> AmplitudeTable:
    """All amplitudes of the ansatz with ``n`` momenta.

    ``boundary`` None means the periodic chain (sum over ``S_n`` only). For open
    boundaries the top level runs over ``WB_n`` and, when ``mu != 0``, tail levels
    ``m = 1..n`` run over the canonical representatives of ``WB_n / WB_m``.
    """
    k = np.asarray(k, dtype=complex)
    if len(k) != n:
        raise ValueError(f"expected {n} momenta, got {len(k)}")
    signed = boundary is not None and boundary.kind != "periodic"
    check_regular(k, signed)
    table = AmplitudeTable(n, k, signed)
    top = {}
    for g in weyl.enumerate_group(n, signed=signed):
        top[g] = amplitude_along(weyl.word_decomposition(g), k, boundary)
    table.tables[0] = top
    if not signed:
        return table
    mu = boundary.mu
    for m in range(1, n + 1):
        level = {}
        for rep in weyl.coset_representatives(n, m):
            if mu == 0:
                level[rep] = 0j
                continue
            zg = np.exp(1j * weyl.apply(rep, k))
            amp = top[rep]
            for j in range(1, m + 1):
                amp *= transmission(j, zg[:j], boundary.alpha, boundary.beta, mu)
            level[rep] = amp
        table.tables[m] = level
    return table


def build_state(spec: ModelSpec, k) -> tuple[np.ndarray, complex]:
    """Full-space Bethe vector for momenta ``k`` and the energy the ansatz predicts.

    The momenta need not solve the Bethe equations; off-shell vectors are useful
    for diagnostics.
    """
    k = np.asarray(k, dtype=complex)
    n = len(k)
    L = spec.L
    if spec.family == "xxz-open":
        raise ValueError("no XXZ wavefunction is available")
    if n > L:
        raise ValueError(f"cannot place {n} excitations on {L} sites")
    periodic = spec.family == "xxx-periodic"
    table = build_amplitudes(n, k, None if periodic else spec.boundary)
    psi = np.zeros(1 << L, dtype=complex)
    levels = [0] if periodic else range(n + 1)
    for m in levels:
        basis = enumerate_sector(L, n - m)
        X = basis.positions()
        comp = np.zeros(basis.dim, dtype=complex)
        for rep, amp in table.tables[m].items():
            if amp == 0:
                continue
            tail_k = weyl.apply(rep, k)[m:]
            comp += amp * np.exp(1j * (X @ tail_k))
        psi[basis.masks] += comp
    if periodic:
        energy = energy_periodic(k)
    else:
        energy = energy_open(k, spec.boundary.alpha, spec.boundary.gamma)
    return psi, energy
