"""Exact finite-dimensional spin-J building blocks.

Single-site matrices act on the (2J+1)-dimensional space whose basis is
ordered by the deviation n = J - m from the highest-weight state: index 0 is
|m=J> and index 2J is |m=-J>.  With this ordering the basis index of a site
equals the occupation number of the spin-wave picture.  Multi-site operators
are Kronecker products in lattice order, site 0 being the slowest index.

J is carried everywhere as the integer 2J (class ``HalfInt``) so half-integer
spins stay exact.
"""

from dataclasses import dataclass
from math import comb
import cmath
import math

import numpy as np
from scipy.linalg import expm

from .errors import ContractViolationError, check_dimension

DIM_BUDGET = 4096

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, order=True)
class HalfInt:
    """A spin magnitude J stored exactly as the integer 2J."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)) or self.twice < 1:
            raise ContractViolationError(f"2J must be a positive integer, got {self.twice!r}")

    @property
    def j(self):
        """J as a float; for formulas only, never for dimensions."""
        return self.twice / 2.0

    @property
    def dim(self):
        return self.twice + 1

    def __str__(self):
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


@dataclass(frozen=True)
class Lattice:
    """Ordered finite collection of site labels; order fixes tensor factors."""

    sites: tuple

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        if len(set(self.sites)) != len(self.sites):
            raise ContractViolationError("lattice site labels must be unique")
        if not self.sites:
            raise ContractViolationError("lattice must contain at least one site")

    @classmethod
    def chain(cls, n):
        return cls(tuple(range(n)))

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    def index(self, site):
        return self.sites.index(site)

    def dimension(self, J):
        return J.dim ** len(self.sites)


@dataclass(frozen=True)
class Direction:
    """Unit vector u = (theta, phi) in spherical coordinates (radians).

    theta outside [0, pi] is rejected; phi = 2*pi is folded to 0, any other
    value outside [0, 2*pi) is rejected.
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ContractViolationError(f"theta must lie in [0, pi], got {self.theta}")
        phi = self.phi
        if phi == TWO_PI:
            phi = 0.0
        if not 0.0 <= phi < TWO_PI:
            raise ContractViolationError(f"phi must lie in [0, 2*pi), got {self.phi}")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phi", float(phi))

    def unit_vector(self):
        st, ct = math.sin(self.theta), math.cos(self.theta)
        sp, cp = math.sin(self.phi), math.cos(self.phi)
        return np.array([st * cp, st * sp, ct])


class Vec3Field:
    """A real 3-vector v_x attached to every lattice site."""

    def __init__(self, lattice, values):
        values = np.asarray(values, dtype=float)
        if values.shape != (len(lattice), 3):
            raise ContractViolationError(
                f"field shape {values.shape} does not match lattice of {len(lattice)} sites"
            )
        self.lattice = lattice
        self.values = values

    @classmethod
    def zero(cls, lattice):
        return cls(lattice, np.zeros((len(lattice), 3)))

    @classmethod
    def single_site(cls, lattice, site, vector):
        values = np.zeros((len(lattice), 3))
        values[lattice.index(site)] = vector
        return cls(lattice, values)

    def site_lengths(self):
        return np.linalg.norm(self.values, axis=1)

    def p_norm(self, p):
        if p < 1:
            raise ContractViolationError("p-norms are defined for p >= 1")
        return float(np.sum(self.site_lengths() ** p) ** (1.0 / p))

    def __add__(self, other):
        if other.lattice is not self.lattice and other.lattice != self.lattice:
            raise ContractViolationError("fields live on different lattices")
        return Vec3Field(self.lattice, self.values + other.values)

    def __neg__(self):
        return Vec3Field(self.lattice, -self.values)

    def __rmul__(self, scalar):
        return Vec3Field(self.lattice, float(scalar) * self.values)

    __mul__ = __rmul__


class TangentField:
    """Tangential components of a field: v-tilde^+ complex, v-tilde^3 real."""

    def __init__(self, lattice, plus, axial=None):
        plus = np.asarray(plus, dtype=complex)
        axial = np.zeros(len(lattice)) if axial is None else np.asarray(axial, dtype=float)
        if plus.shape != (len(lattice),) or axial.shape != (len(lattice),):
            raise ContractViolationError("tangent components do not match the lattice")
        self.lattice = lattice
        self.plus = plus
        self.axial = axial

    @property
    def minus(self):
        return np.conj(self.plus)

    def norm2(self):
        """The ell^2 length of the tangential part, |v-tilde|_2."""
        return float(np.sqrt(np.sum(np.abs(self.plus) ** 2)))

    def inner(self, other):
        """<v-tilde, w-tilde> = sum conj(v+) w+."""
        return complex(np.sum(self.minus * other.plus))

    def symplectic(self, other):
        """sigma(v-tilde, w-tilde) = 2 Im <v-tilde, w-tilde>."""
        return 2.0 * self.inner(other).imag

    def __add__(self, other):
        return TangentField(self.lattice, self.plus + other.plus, self.axial + other.axial)

    def __neg__(self):
        return TangentField(self.lattice, -self.plus, -self.axial)

    def __rmul__(self, scalar):
        return TangentField(self.lattice, scalar * self.plus, float(scalar) * self.axial)

    __mul__ = __rmul__


@dataclass(frozen=True)
class SpinOps:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    plus: np.ndarray
    minus: np.ndarray


def spin_matrices(J):
    """Spin-J matrices with S3 diagonal, basis index n = J - m.

    S+- act with the coefficients sqrt(J(J+1) - m(m +- 1)).
    """
    dim = J.dim
    j = J.j
    m = j - np.arange(dim)
    sz = np.diag(m).astype(complex)
    sp = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        sp[n - 1, n] = math.sqrt(n * (J.twice - n + 1))
    sm = sp.conj().T
    sx = (sp + sm) / 2.0
    sy = (sp - sm) / 2.0j
    return SpinOps(sx, sy, sz, sp, sm)


def coherent_vector(J, u):
    """Coherent state |(theta, phi)> as an explicit binomial expansion.

    Component n = J - m is binom(2J, n)^(1/2) cos(theta/2)^(2J-n)
    sin(theta/2)^n e^(i n phi).
    """
    dim = J.dim
    c, s = math.cos(u.theta / 2.0), math.sin(u.theta / 2.0)
    vec = np.empty(dim, dtype=complex)
    for n in range(dim):
        amp = math.sqrt(comb(J.twice, n)) * c ** (J.twice - n) * s ** n
        vec[n] = amp * cmath.exp(1j * n * u.phi)
    return vec


def rotation_generator(J, u):
    """(theta/2)(S- e^{i phi} - S+ e^{-i phi}), the anti-Hermitian rotation generator."""
    ops = spin_matrices(J)
    return (u.theta / 2.0) * (
        ops.minus * cmath.exp(1j * u.phi) - ops.plus * cmath.exp(-1j * u.phi)
    )


def rotation_unitary(J, u):
    """U = exp[(theta/2)(S- e^{i phi} - S+ e^{-i phi})]."""
    return expm(rotation_generator(J, u))


def rotated_frame(u):
    """Orthonormal right-handed triad (f1, f2, f3) with f3 = u, as rows."""
    st, ct = math.sin(u.theta), math.cos(u.theta)
    sp, cp = math.sin(u.phi), math.cos(u.phi)
    return np.array(
        [
            [ct * cp, ct * sp, -st],
            [-sp, cp, 0.0],
            [st * cp, st * sp, ct],
        ]
    )


def rotated_spin_ops(J, u):
    """Rotated spin matrices S~i = f^i . S together with S~+-."""
    ops = spin_matrices(J)
    frame = rotated_frame(u)
    s = (ops.x, ops.y, ops.z)
    rx, ry, rz = (sum(frame[i, k] * s[k] for k in range(3)) for i in range(3))
    return SpinOps(rx, ry, rz, rx + 1j * ry, rx - 1j * ry)


def project_tangent(v, directions):
    """Components of v in the rotated frames: (v~1 + i v~2, v~3) per site."""
    if len(directions) != len(v.lattice):
        raise ContractViolationError("one direction per lattice site is required")
    plus = np.empty(len(v.lattice), dtype=complex)
    axial = np.empty(len(v.lattice))
    for i, u in enumerate(directions):
        frame = rotated_frame(u)
        comps = frame @ v.values[i]
        plus[i] = comps[0] + 1j * comps[1]
        axial[i] = comps[2]
    return TangentField(v.lattice, plus, axial)


def embed(op, site, lattice, J, budget=DIM_BUDGET):
    """Kronecker embedding of a single-site operator, identity elsewhere."""
    dim = J.dim
    if op.shape != (dim, dim):
        raise ContractViolationError(f"site operator must be {dim}x{dim}, got {op.shape}")
    check_dimension(lattice.dimension(J), budget, "lattice operator")
    idx = lattice.index(site)
    out = np.eye(1, dtype=complex)
    for k in range(len(lattice)):
        out = np.kron(out, op if k == idx else np.eye(dim, dtype=complex))
    return out


def sum_field_operator(v, J, budget=DIM_BUDGET):
    """The observable sum_x v_x . S_x as a dense lattice matrix."""
    lattice = v.lattice
    check_dimension(lattice.dimension(J), budget, "lattice operator")
    ops = spin_matrices(J)
    total = np.zeros((lattice.dimension(J),) * 2, dtype=complex)
    for i, site in enumerate(lattice):
        site_op = v.values[i, 0] * ops.x + v.values[i, 1] * ops.y + v.values[i, 2] * ops.z
        total += embed(site_op, site, lattice, J, budget)
    return total


def op_norm(a):
    """Operator (spectral) norm, largest singular value."""
    return float(np.linalg.norm(a, 2))


def assert_hermitian(a, tol=1e-10, what="operator"):
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ContractViolationError(f"{what} is not Hermitian (deviation {dev:.3e})")


def expi_hermitian(h, t=1.0):
    """e^{i t H} for Hermitian H via eigendecomposition."""
    w, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * t * w)) @ vecs.conj().T
