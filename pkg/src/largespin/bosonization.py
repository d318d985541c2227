"""Spin Hamiltonians with coherent eigenstates and their quadratic boson limit.

Starting from

    H = - sum_{x,y} sum_{ij} h_ij(x,y) S^i_x S^j_y - J sum_x sum_i g_i(x) S^i_x

the coefficients are rewritten in the frames attached to the coherent
directions.  The product state is an eigenvector exactly when only the
(-,+), (+,-) and (3,3) pair channels plus the axial field survive, up to
mixed (i,3) channels with vanishing row sums.  After renormalizing the
ground energy to zero, (1/J) H_J converges strongly to the second
quantization of a one-particle operator

    (Hv)_x = [E(x) + g~3(x)] v_x - sum_y [2 h~-+(x,y) + 2 h~+-(y,x)] v_y
    E(x)   = sum_y [h~33(x,y) + h~33(y,x)]

whose spectrum gives the large-spin asymptotics of the spin spectrum.  The
factor 2 on the hopping coefficients is forced by the exact identification
(S~-/sqrt(2J) -> a* makes (1/J) S~-_x S~+_y -> 2 a*_x a_y).
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement
import cmath
import math

import numpy as np

from .errors import ContractViolationError
from .fock import FOCK_DIM_BUDGET, build_fock, boson_field, spin_vector_on_fock
from .spincore import (
    DIM_BUDGET,
    TangentField,
    check_dimension,
    expi_hermitian,
    rotated_frame,
    spin_matrices,
    embed,
)

ADMISSIBILITY_TOL = 1e-12
EIGENVECTOR_TOL = 1e-10
KERNEL_TOL = 1e-12


@dataclass(frozen=True)
class SpinHamiltonianSpec:
    """Pair couplings h_ij(x,y) and site fields g_i(x) in the standard frame."""

    lattice: object
    pair: np.ndarray   # (n, n, 3, 3)
    field: np.ndarray  # (n, 3)

    def __post_init__(self):
        n = len(self.lattice)
        pair = np.asarray(self.pair, dtype=float)
        field = np.asarray(self.field, dtype=float)
        if pair.shape != (n, n, 3, 3):
            raise ContractViolationError(f"pair couplings must have shape {(n, n, 3, 3)}")
        if field.shape != (n, 3):
            raise ContractViolationError(f"site fields must have shape {(n, 3)}")
        object.__setattr__(self, "pair", pair)
        object.__setattr__(self, "field", field)

    @classmethod
    def empty(cls, lattice):
        n = len(lattice)
        return cls(lattice, np.zeros((n, n, 3, 3)), np.zeros((n, 3)))

    @classmethod
    def from_rotated_couplings(cls, lattice, directions, pair_rotated, field_rotated):
        """Build standard-frame couplings whose rotated coefficients are given.

        ``pair_rotated[x, y]`` is the 3x3 block in the local frames of x and
        y; ``field_rotated[x]`` the field in the frame of x.
        """
        n = len(lattice)
        frames = [rotated_frame(u) for u in directions]
        pair = np.zeros((n, n, 3, 3))
        field = np.zeros((n, 3))
        pr = np.asarray(pair_rotated, dtype=float)
        fr = np.asarray(field_rotated, dtype=float)
        for x in range(n):
            field[x] = frames[x].T @ fr[x]
            for y in range(n):
                pair[x, y] = frames[x].T @ pr[x, y] @ frames[y]
        return cls(lattice, pair, field)


@dataclass(frozen=True)
class RotatedCoefficients:
    """Couplings in the local frames, split into ladder channels."""

    lattice: object
    h_frame: np.ndarray   # (n, n, 3, 3) in the 1,2,3 frame indices
    g_frame: np.ndarray   # (n, 3)
    h_mp: np.ndarray      # coefficient of S~-_x S~+_y
    h_pm: np.ndarray      # coefficient of S~+_x S~-_y
    h_pp: np.ndarray
    h_mm: np.ndarray
    h_33: np.ndarray
    g_3: np.ndarray
    violations: tuple

    @property
    def admissible(self):
        return not self.violations


def rotate_hamiltonian(spec, directions, tol=ADMISSIBILITY_TOL):
    """Frame-rotate the couplings and report eigenstate admissibility.

    Violations are (channel, sites, magnitude) tuples; an empty report
    guarantees the coherent product state is an eigenvector.
    """
    n = len(spec.lattice)
    frames = [rotated_frame(u) for u in directions]
    h_frame = np.zeros((n, n, 3, 3))
    g_frame = np.zeros((n, 3))
    for x in range(n):
        g_frame[x] = frames[x] @ spec.field[x]
        for y in range(n):
            h_frame[x, y] = frames[x] @ spec.pair[x, y] @ frames[y].T

    h11, h12 = h_frame[:, :, 0, 0], h_frame[:, :, 0, 1]
    h21, h22 = h_frame[:, :, 1, 0], h_frame[:, :, 1, 1]
    h_mp = 0.25 * (h11 + h22) + 0.25j * (h21 - h12)
    h_pm = 0.25 * (h11 + h22) + 0.25j * (h12 - h21)
    h_pp = 0.25 * (h11 - h22) - 0.25j * (h12 + h21)
    h_mm = 0.25 * (h11 - h22) + 0.25j * (h12 + h21)

    violations = []
    for x in range(n):
        for y in range(n):
            for name, arr in (("h_pp", h_pp), ("h_mm", h_mm)):
                if abs(arr[x, y]) > tol:
                    violations.append((name, (x, y), float(abs(arr[x, y]))))
    for x in range(n):
        for i in (0, 1):
            if abs(g_frame[x, i]) > tol:
                violations.append((f"g_{i + 1}", (x,), float(abs(g_frame[x, i]))))
            row = float(np.sum(h_frame[x, :, i, 2]))
            col = float(np.sum(h_frame[:, x, 2, i]))
            if abs(row) > tol:
                violations.append((f"sum_y h_{i + 1}3", (x,), abs(row)))
            if abs(col) > tol:
                violations.append((f"sum_y h_3{i + 1}", (x,), abs(col)))

    return RotatedCoefficients(
        spec.lattice,
        h_frame,
        g_frame,
        h_mp,
        h_pm,
        h_pp,
        h_mm,
        h_frame[:, :, 2, 2].copy(),
        g_frame[:, 2].copy(),
        tuple(violations),
    )


def assemble_spin_hamiltonian(spec, J, budget=DIM_BUDGET):
    """Dense matrix of the interaction in the standard frame."""
    lattice = spec.lattice
    dim = lattice.dimension(J)
    check_dimension(dim, budget, "spin Hamiltonian")
    ops = spin_matrices(J)
    s = (ops.x, ops.y, ops.z)
    site_ops = [
        [embed(s[i], site, lattice, J, budget) for i in range(3)] for site in lattice
    ]
    out = np.zeros((dim, dim), dtype=complex)
    n = len(lattice)
    for x in range(n):
        for i in range(3):
            if spec.field[x, i] != 0.0:
                out -= J.j * spec.field[x, i] * site_ops[x][i]
            for y in range(n):
                for j in range(3):
                    if spec.pair[x, y, i, j] != 0.0:
                        out -= spec.pair[x, y, i, j] * (site_ops[x][i] @ site_ops[y][j])
    return out


@dataclass(frozen=True)
class RenormalizedHamiltonian:
    matrix: np.ndarray
    ground_energy: float
    residual: float
    min_eigenvalue: float

    @property
    def positive_semidefinite(self):
        return self.min_eigenvalue >= -1e-9


def renormalize(spec, rotated, state, J, budget=DIM_BUDGET):
    """Shift an admissible Hamiltonian so the coherent state has energy zero.

    The eigenvector residual ||H Omega|| is verified below 1e-10; positive
    semidefiniteness is measured and reported, not assumed.
    """
    if not rotated.admissible:
        raise ContractViolationError(
            f"rotated coefficients are not admissible: {rotated.violations[:3]}"
        )
    matrix = assemble_spin_hamiltonian(spec, J, budget)
    vec = state.product_vector(J, budget)
    energy = float(np.real(np.vdot(vec, matrix @ vec)))
    matrix = matrix - energy * np.eye(matrix.shape[0])
    residual = float(np.linalg.norm(matrix @ vec))
    if residual > EIGENVECTOR_TOL * max(1.0, float(np.linalg.norm(matrix))):
        raise ContractViolationError(
            f"coherent state is not an eigenvector (residual {residual:.3e})"
        )
    min_eig = float(np.linalg.eigvalsh(matrix)[0])
    return RenormalizedHamiltonian(matrix, energy, residual, min_eig)


@dataclass(frozen=True)
class BosonHamiltonian:
    """Second quantization of the one-particle operator on the lattice."""

    lattice: object
    one_particle: np.ndarray

    def fock_matrix(self, fock):
        out = np.zeros((fock.dim, fock.dim), dtype=complex)
        n = len(self.lattice)
        for x in range(n):
            for y in range(n):
                if self.one_particle[x, y] != 0.0:
                    out += self.one_particle[x, y] * (fock.adag(x) @ fock.a(y))
        return out

    def sector_eigenvalues(self, max_sector):
        """Exact spectrum on sectors <= max_sector: multiset sums of the
        one-particle eigenvalues (the Hamiltonian is noninteracting)."""
        single = np.linalg.eigvalsh(self.one_particle)
        values = [0.0]
        for size in range(1, max_sector + 1):
            for combo in combinations_with_replacement(single, size):
                values.append(float(sum(combo)))
        return np.sort(np.array(values))


def build_boson_limit(rotated):
    """The limiting quadratic boson Hamiltonian and its one-particle operator.

    Normal ordering of the a a* channel produces a constant which is dropped
    so the vacuum stays at energy zero.
    """
    if not rotated.admissible:
        raise ContractViolationError("rotated coefficients are not admissible")
    n = len(rotated.lattice)
    energy = np.array(
        [float(np.sum(rotated.h_33[x, :]) + np.sum(rotated.h_33[:, x])) for x in range(n)]
    )
    one_particle = np.diag(energy + rotated.g_3).astype(complex)
    one_particle -= 2.0 * rotated.h_mp + 2.0 * rotated.h_pm.T
    boson = BosonHamiltonian(rotated.lattice, one_particle)
    return boson, one_particle


def quartic_remainder_sector_norm(rotated, J, fock, sector):
    """Norm of the dropped quartic term -(1/J) sum h~33 n_x n_y on a sector."""
    n = len(rotated.lattice)
    occ = fock.occupations
    diag = np.zeros(fock.dim)
    for x in range(n):
        for y in range(n):
            diag += rotated.h_33[x, y] * occ[:, x] * occ[:, y]
    idx = fock.sector_indices(sector)
    return float(np.max(np.abs(diag[idx])) / J.j) if idx.size else 0.0


def spectral_compare(spec, state, J_list, m, budget=DIM_BUDGET):
    """Lowest-m eigenvalues of (1/J) H_J against the boson spectrum.

    Returns rows of (twice_j, index, spin_eigenvalue, boson_eigenvalue,
    error) covering every J in the list.
    """
    rotated = rotate_hamiltonian(spec, state.directions)
    boson, _ = build_boson_limit(rotated)
    boson_eigs = boson.sector_eigenvalues(m)[:m]
    rows = []
    for J in J_list:
        renorm = renormalize(spec, rotated, state, J, budget)
        spin_eigs = np.linalg.eigvalsh(renorm.matrix / J.j)[:m]
        take = min(m, spin_eigs.size)
        for i in range(take):
            rows.append(
                {
                    "twice_j": J.twice,
                    "index": i,
                    "spin": float(spin_eigs[i]),
                    "boson": float(boson_eigs[i]),
                    "error": float(abs(spin_eigs[i] - boson_eigs[i])),
                }
            )
    return rows


def _phi_t(eigenvalues, t):
    """int_0^t e^{is lambda} ds, elementwise with the kernel limit."""
    small = np.abs(eigenvalues) < KERNEL_TOL
    lam = np.where(small, 1.0, eigenvalues)
    out = (np.exp(1j * t * lam) - 1.0) / (1j * lam)
    out[small] = t
    return out


def _phase_integral(eigenvalues, weights, t):
    """int_0^t sigma(v~, v~^s) ds by the per-mode closed form."""
    total = 0.0
    for lam, w in zip(eigenvalues, weights):
        if abs(lam) < KERNEL_TOL:
            continue
        total += 2.0 * w * (t / lam - math.sin(t * lam) / lam**2)
    return total


def evolved_tangent(one_particle, tangent, t):
    """v~^t = int_0^t e^{isH} v~ ds via the eigendecomposition of H."""
    w, vecs = np.linalg.eigh(one_particle)
    coeffs = vecs.conj().T @ tangent.plus
    plus_t = vecs @ (_phi_t(w, t) * coeffs)
    return TangentField(tangent.lattice, plus_t)


def boson_predicted_state(one_particle, tangent, t, fock):
    """Coherent prediction e^{-(i/2) int sigma} e^{iF(v~^t)} |vacuum>."""
    w, vecs = np.linalg.eigh(one_particle)
    coeffs = vecs.conj().T @ tangent.plus
    weights = np.abs(coeffs) ** 2
    phase = cmath.exp(-0.5j * _phase_integral(w, weights, t))
    moved = TangentField(tangent.lattice, vecs @ (_phi_t(w, t) * coeffs))
    return phase * (expi_hermitian(boson_field(moved, fock)) @ fock.vacuum())


def perturbed_evolution(spec, state, v, t_grid, J_list, cap=None,
                        budget=DIM_BUDGET, fock_budget=FOCK_DIM_BUDGET):
    """Fidelity between the spin evolution under (1/J)H_J + F_J(v) and the
    boson coherent prediction, per (t, J).

    Returns rows of (twice_j, t, fidelity, leakage).
    """
    from .fluctuations import build_fluctuation

    rotated = rotate_hamiltonian(spec, state.directions)
    _, one_particle = build_boson_limit(rotated)
    max_twice = max(J.twice for J in J_list)
    if cap is None:
        cap = max(24, max_twice)
    cap = max(cap, max_twice)
    fock = build_fock(spec.lattice, cap, fock_budget)
    rows = []
    for J in J_list:
        renorm = renormalize(spec, rotated, state, J, budget)
        generator = renorm.matrix / J.j + build_fluctuation(v, state, J, budget).matrix
        vec = state.product_vector(J, budget)
        for t in t_grid:
            spin_state = expi_hermitian(generator, t) @ vec
            spin_on_fock = spin_vector_on_fock(spin_state, J, state, fock)
            predicted = boson_predicted_state(one_particle, state.tangent(v), t, fock)
            leakage = fock.cap_leakage(predicted)
            fidelity = float(abs(np.vdot(predicted, spin_on_fock)))
            rows.append(
                {
                    "twice_j": J.twice,
                    "t": float(t),
                    "fidelity": fidelity,
                    "leakage": leakage,
                }
            )
    return rows
