"""Truncated bosonic Fock space and the spin-wave identification.

A ``FockSpace`` carries one bosonic mode per lattice site, truncated at a
uniform per-site occupation cap.  Under the unitary identification of the
spin space with the occupations <= 2J block, the rotated spin operators
become

    S~-/sqrt(2J) = P a* g^(1/2),   S~+/sqrt(2J) = g^(1/2) a P,
    J - S~3      = P a* a P,       g(n) = 1 - n/(2J)  (0 above 2J),

and the fluctuation operator turns into a g-deformed field operator that
converges sector-wise to F(v-tilde) = sum v+ a* + v- a.  Everything here is
dense and carries an explicit truncation (cap-leakage) audit.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .bounds import BoundReport
from .errors import ContractViolationError, check_dimension
from .polynomials import NoncommPoly
from .spincore import (
    DIM_BUDGET,
    assert_hermitian,
    coherent_vector,
    expi_hermitian,
    rotated_spin_ops,
)

FOCK_DIM_BUDGET = 4096
LEAKAGE_LIMIT = 1e-8


class FockSpace:
    """Per-site occupation-truncated Fock space with dense ladder operators."""

    def __init__(self, lattice, cap, budget=FOCK_DIM_BUDGET):
        if cap < 1:
            raise ContractViolationError("occupation cap must be >= 1")
        dim = (cap + 1) ** len(lattice)
        check_dimension(dim, budget, "Fock space")
        self.lattice = lattice
        self.cap = cap
        self.dim = dim
        self.occupations = np.array(
            list(itertools.product(range(cap + 1), repeat=len(lattice))), dtype=int
        )
        self.totals = self.occupations.sum(axis=1)
        single = np.zeros((cap + 1, cap + 1), dtype=complex)
        for n in range(1, cap + 1):
            single[n - 1, n] = math.sqrt(n)
        self._a = [self._embed(single, i) for i in range(len(lattice))]

    def _embed(self, op, index):
        out = np.eye(1, dtype=complex)
        for k in range(len(self.lattice)):
            out = np.kron(out, op if k == index else np.eye(self.cap + 1, dtype=complex))
        return out

    def a(self, index):
        return self._a[index]

    def adag(self, index):
        return self._a[index].conj().T

    def number(self, index):
        return self.adag(index) @ self.a(index)

    def total_number(self):
        return np.diag(self.totals.astype(complex))

    def vacuum(self):
        vec = np.zeros(self.dim, dtype=complex)
        vec[0] = 1.0
        return vec

    def basis_index(self, occupation):
        idx = 0
        for n in occupation:
            if not 0 <= n <= self.cap:
                raise ContractViolationError(f"occupation {occupation} exceeds cap {self.cap}")
            idx = idx * (self.cap + 1) + int(n)
        return idx

    def sector_indices(self, n):
        return np.nonzero(self.totals == n)[0]

    def site_projector(self, max_occ):
        """Diagonal projector onto per-site occupations <= max_occ (P_J)."""
        mask = (self.occupations <= max_occ).all(axis=1)
        return np.diag(mask.astype(complex))

    def cap_leakage(self, vec):
        """Norm of the component with any site occupation at the cap."""
        mask = (self.occupations == self.cap).any(axis=1)
        return float(np.linalg.norm(vec[mask]))

    def sector_support(self, vec, tol=1e-12):
        amps = np.abs(vec)
        return sorted(int(t) for t in np.unique(self.totals[amps > tol]))


def build_fock(lattice, cap, budget=FOCK_DIM_BUDGET):
    return FockSpace(lattice, cap, budget)


@dataclass(frozen=True)
class SectorVector:
    """A Fock vector supported on total occupation = n."""

    vector: np.ndarray
    n: int

    def norm(self):
        return float(np.linalg.norm(self.vector))


def random_sector_vector(fock, n, rng):
    idx = fock.sector_indices(n)
    if idx.size == 0:
        raise ContractViolationError(f"sector {n} is empty at cap {fock.cap}")
    vec = np.zeros(fock.dim, dtype=complex)
    vec[idx] = rng.normal(size=idx.size) + 1j * rng.normal(size=idx.size)
    vec /= np.linalg.norm(vec)
    return SectorVector(vec, n)


def _check_sector(psi, fock):
    if psi.vector.shape != (fock.dim,):
        raise ContractViolationError(
            f"sector vector of length {psi.vector.shape[0]} does not live on "
            f"this Fock space (dim {fock.dim})"
        )
    support = fock.sector_support(psi.vector, 1e-10 * max(psi.norm(), 1.0))
    if support != [psi.n]:
        raise ContractViolationError(
            f"vector tagged as sector {psi.n} is supported on sectors {support}"
        )


def boson_field(tangent, fock):
    """F(v-tilde) = sum_x [v+ a*_x + v- a_x]; Hermitian by construction."""
    out = np.zeros((fock.dim, fock.dim), dtype=complex)
    for i in range(len(fock.lattice)):
        out += tangent.plus[i] * fock.adag(i) + tangent.minus[i] * fock.a(i)
    return out


def g_factor_diagonal(J, fock, site):
    """g_J(n_x) = max(1 - n_x/2J, 0) as a diagonal matrix."""
    g = 1.0 - fock.occupations[:, site] / J.twice
    return np.clip(g, 0.0, None)


def dyson_spin_ops(J, fock):
    """The identified spin operators (S~-/sqrt(2J), S~+/sqrt(2J), J - S~3).

    Requires cap >= 2J so the spin block is fully represented.
    """
    if fock.cap < J.twice:
        raise ContractViolationError(
            f"occupation cap {fock.cap} is below 2J = {J.twice}"
        )
    proj = fock.site_projector(J.twice)
    lower = np.zeros((fock.dim, fock.dim), dtype=complex)
    number = np.zeros((fock.dim, fock.dim), dtype=complex)
    for i in range(len(fock.lattice)):
        g_sqrt = np.sqrt(g_factor_diagonal(J, fock, i))
        lower_i = proj @ (fock.adag(i) * g_sqrt[np.newaxis, :]) @ proj
        lower += lower_i
        number += proj @ fock.number(i) @ proj
    raise_ = lower.conj().T
    return lower, raise_, number


def dyson_spin_ops_site(J, fock, site):
    """Single-site identified operators (lowering, raising, number)."""
    if fock.cap < J.twice:
        raise ContractViolationError(f"occupation cap {fock.cap} is below 2J = {J.twice}")
    proj = fock.site_projector(J.twice)
    g_sqrt = np.sqrt(g_factor_diagonal(J, fock, site))
    lower = proj @ (fock.adag(site) * g_sqrt[np.newaxis, :]) @ proj
    return lower, lower.conj().T, proj @ fock.number(site) @ proj


def dyson_fluctuation(v, state, J, fock):
    """F_J(v) on Fock space:

    P_J { sum_x v+ a* g^(1/2) + v- g^(1/2) a - sqrt(2/J) v3 a* a } P_J.

    When cap < 2J the whole truncated space lies below the projector and
    P_J acts as the identity, which is exactly the regime of the sector
    convergence lemmas.
    """
    tangent = state.tangent(v)
    proj = fock.site_projector(min(J.twice, fock.cap))
    out = np.zeros((fock.dim, fock.dim), dtype=complex)
    for i in range(len(fock.lattice)):
        g_sqrt = np.sqrt(g_factor_diagonal(J, fock, i))
        creation = fock.adag(i) * g_sqrt[np.newaxis, :]
        out += tangent.plus[i] * creation
        out += tangent.minus[i] * creation.conj().T
        out -= math.sqrt(2.0 / J.j) * tangent.axial[i] * fock.number(i)
    return proj @ out @ proj


def dyson_fluctuation_unprojected(tangent, J, fock):
    """The g-deformed field without P_J, valid on sectors below 2J."""
    out = np.zeros((fock.dim, fock.dim), dtype=complex)
    for i in range(len(fock.lattice)):
        g_sqrt = np.sqrt(g_factor_diagonal(J, fock, i))
        creation = fock.adag(i) * g_sqrt[np.newaxis, :]
        out += tangent.plus[i] * creation + tangent.minus[i] * creation.conj().T
        out -= math.sqrt(2.0 / J.j) * tangent.axial[i] * fock.number(i)
    return out


# ---------------------------------------------------------------------------
# identification with the spin-space number basis
# ---------------------------------------------------------------------------

def lowered_basis_matrix(J, u):
    """Columns phi_n = (1/n!) binom(2J,n)^(-1/2) (S~-)^n |u> for one site."""
    ops = rotated_spin_ops(J, u)
    cols = np.empty((J.dim, J.dim), dtype=complex)
    vec = coherent_vector(J, u)
    cols[:, 0] = vec
    for n in range(1, J.dim):
        vec = ops.minus @ vec
        cols[:, n] = vec / (math.factorial(n) * math.sqrt(math.comb(J.twice, n)))
    return cols


def lowered_basis(J, state):
    """Product basis phi_nvec as columns of a unitary on the full spin space."""
    out = np.eye(1, dtype=complex)
    for u in state.directions:
        out = np.kron(out, lowered_basis_matrix(J, u))
    return out


def spin_fock_indices(J, fock):
    """Fock basis index of each spin basis index (occupations <= 2J)."""
    if fock.cap < J.twice:
        raise ContractViolationError(f"occupation cap {fock.cap} is below 2J = {J.twice}")
    nsites = len(fock.lattice)
    indices = np.empty(J.dim ** nsites, dtype=int)
    for k, occ in enumerate(itertools.product(range(J.dim), repeat=nsites)):
        indices[k] = fock.basis_index(occ)
    return indices


def spin_operator_on_fock(op, J, state, fock):
    """Conjugate a spin-space operator into the Fock occupation basis."""
    basis = lowered_basis(J, state)
    in_phi = basis.conj().T @ op @ basis
    idx = spin_fock_indices(J, fock)
    out = np.zeros((fock.dim, fock.dim), dtype=complex)
    out[np.ix_(idx, idx)] = in_phi
    return out


def spin_vector_on_fock(vec, J, state, fock):
    """Map a spin-space vector into Fock space through the phi basis."""
    basis = lowered_basis(J, state)
    coeffs = basis.conj().T @ vec
    out = np.zeros(fock.dim, dtype=complex)
    out[spin_fock_indices(J, fock)] = coeffs
    return out


def dyson_identification_errors(J, state, fock, v=None, budget=DIM_BUDGET):
    """Max matrix-element deviations between the two representations.

    Compares the three identified operators per site and, when a field is
    given, the fluctuation operator, on the occupations <= 2J block.
    """
    errors = {}
    scale = 1.0 / math.sqrt(J.twice)
    for i, site in enumerate(fock.lattice):
        ops = rotated_spin_ops(J, state.directions[i])
        from .spincore import embed

        lower_spin = spin_operator_on_fock(
            scale * embed(ops.minus, site, fock.lattice, J, budget), J, state, fock
        )
        raise_spin = spin_operator_on_fock(
            scale * embed(ops.plus, site, fock.lattice, J, budget), J, state, fock
        )
        num_spin = spin_operator_on_fock(
            embed(J.j * np.eye(J.dim) - ops.z, site, fock.lattice, J, budget),
            J,
            state,
            fock,
        )
        lower_f, raise_f, num_f = dyson_spin_ops_site(J, fock, i)
        errors[f"lowering[{site}]"] = float(np.max(np.abs(lower_spin - lower_f)))
        errors[f"raising[{site}]"] = float(np.max(np.abs(raise_spin - raise_f)))
        errors[f"number[{site}]"] = float(np.max(np.abs(num_spin - num_f)))
    if v is not None:
        from .fluctuations import build_fluctuation

        f_spin = spin_operator_on_fock(
            build_fluctuation(v, state, J, budget).matrix, J, state, fock
        )
        f_fock = dyson_fluctuation(v, state, J, fock)
        errors["fluctuation"] = float(np.max(np.abs(f_spin - f_fock)))
    return errors


# ---------------------------------------------------------------------------
# sector norm bounds and operator convergence
# ---------------------------------------------------------------------------

def petz_bound_check(tangent, psi, fock):
    """||F(v~) psi_n|| <= 2 |v~|_2 (n+1)^(1/2) ||psi_n||."""
    _check_sector(psi, fock)
    if fock.cap < psi.n + 1:
        raise ContractViolationError("cap must exceed the sector to apply a field operator")
    lhs = float(np.linalg.norm(boson_field(tangent, fock) @ psi.vector))
    rhs = 2.0 * tangent.norm2() * math.sqrt(psi.n + 1) * psi.norm()
    return BoundReport("petz", lhs, rhs, context={"n": psi.n})


def petz_j_bound_check(v, state, psi, J, fock):
    """||F_J(v) psi_n|| <= 4 |v|_1 (n+1)^(1/2) ||psi_n||, requiring 2J > n."""
    _check_sector(psi, fock)
    if J.twice <= psi.n:
        raise ContractViolationError(f"2J = {J.twice} must exceed the sector n = {psi.n}")
    if fock.cap < psi.n + 1:
        raise ContractViolationError("cap must exceed the sector to apply a field operator")
    lhs = float(np.linalg.norm(dyson_fluctuation(v, state, J, fock) @ psi.vector))
    rhs = 4.0 * v.p_norm(1) * math.sqrt(psi.n + 1) * psi.norm()
    return BoundReport("petz-J", lhs, rhs, context={"n": psi.n, "twice_j": J.twice})


def convergence_single(v, state, psi, J, fock):
    """||[F(v~) - F_J(v)] psi_n|| <= 4 |v|_1 n (2J)^(-1/2) ||psi_n||."""
    _check_sector(psi, fock)
    if J.twice <= psi.n + 1:
        raise ContractViolationError(f"2J = {J.twice} must exceed n + 1 = {psi.n + 1}")
    if fock.cap < psi.n + 1:
        raise ContractViolationError("cap must be at least n + 1")
    diff = boson_field(state.tangent(v), fock) - dyson_fluctuation(v, state, J, fock)
    lhs = float(np.linalg.norm(diff @ psi.vector))
    rhs = 4.0 * v.p_norm(1) * psi.n / math.sqrt(2.0 * J.j) * psi.norm()
    return BoundReport("field-convergence", lhs, rhs, context={"n": psi.n, "twice_j": J.twice})


def product_convergence_rhs(norms1, n, twice_j):
    """The telescoping bound for k-factor products on sector n:

    (2J)^(-1/2) [prod |v_j|_1] [(n+k)!/n!]^(1/2) sum_i 2^(k+i) (n+k-i)^(1/2).
    """
    k = len(norms1)
    prefactor = math.sqrt(math.factorial(n + k) / math.factorial(n))
    total = sum(2.0 ** (k + i) * math.sqrt(n + k - i) for i in range(1, k + 1))
    return float(np.prod(norms1)) * prefactor * total / math.sqrt(twice_j)


def convergence_product(vs, state, psi, J, fock):
    """|| [prod F(v~_j) - prod F_J(v_j)] psi_n || against the telescoping bound.

    Products are applied right to left.  Requires 2J > n + k and cap >= n + k.
    """
    _check_sector(psi, fock)
    k = len(vs)
    if J.twice <= psi.n + k:
        raise ContractViolationError(f"2J = {J.twice} must exceed n + k = {psi.n + k}")
    if fock.cap < psi.n + k:
        raise ContractViolationError("cap must be at least n + k")
    boson_vec = psi.vector.copy()
    spin_vec = psi.vector.copy()
    for v in reversed(vs):
        boson_vec = boson_field(state.tangent(v), fock) @ boson_vec
        spin_vec = dyson_fluctuation(v, state, J, fock) @ spin_vec
    lhs = float(np.linalg.norm(boson_vec - spin_vec))
    rhs = product_convergence_rhs([v.p_norm(1) for v in vs], psi.n, J.twice) * psi.norm()
    return BoundReport(
        "product-convergence", lhs, rhs, context={"n": psi.n, "k": k, "twice_j": J.twice}
    )


# ---------------------------------------------------------------------------
# moments and characteristic functions
# ---------------------------------------------------------------------------

def spin_moment(vs, state, J, budget=DIM_BUDGET):
    """omega(F_J(v_1) ... F_J(v_k)) on the spin space, right-to-left."""
    from .fluctuations import build_fluctuation

    vec = state.product_vector(J, budget)
    out = vec.copy()
    for v in reversed(vs):
        out = build_fluctuation(v, state, J, budget).matrix @ out
    return complex(np.vdot(vec, out))


def boson_moment(tangents, fock):
    """Vacuum expectation of a product of boson field operators."""
    vec = fock.vacuum()
    for t in reversed(list(tangents)):
        vec = boson_field(t, fock) @ vec
    return complex(vec[0])


def boson_moment_wick(tangents):
    """Quasi-free moment by the pairing formula: sum over pair partitions of
    the ordered two-point functions <v~_i, v~_j>."""
    tangents = list(tangents)
    k = len(tangents)
    if k % 2 == 1:
        return 0.0 + 0.0j
    if k == 0:
        return 1.0 + 0.0j

    def pairings(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for i, partner in enumerate(rest):
            for tail in pairings(rest[:i] + rest[i + 1:]):
                yield [(first, partner)] + tail

    total = 0.0 + 0.0j
    for pairing in pairings(list(range(k))):
        prod = 1.0 + 0.0j
        for i, j in pairing:
            prod *= tangents[i].inner(tangents[j])
        total += prod
    return total


def moments_check(vs, state, J, budget=DIM_BUDGET, fock_budget=FOCK_DIM_BUDGET):
    """Cross-representation moment difference against its (2J)^(-1/2) bound.

    Requires 2J > k.  The boson side is exact at cap = k (k field operators
    cannot leave the first k sectors when starting from the vacuum).
    """
    k = len(vs)
    if J.twice <= k:
        raise ContractViolationError(f"2J = {J.twice} must exceed k = {k}")
    spin_val = spin_moment(vs, state, J, budget)
    fock = build_fock(vs[0].lattice, max(k, 1), fock_budget)
    boson_val = boson_moment([state.tangent(v) for v in vs], fock)
    total = sum(2.0 ** (k + i) * math.sqrt(k - i) for i in range(1, k + 1))
    rhs = (
        math.sqrt(math.factorial(k))
        * float(np.prod([v.p_norm(1) for v in vs]))
        * total
        / math.sqrt(J.twice)
    )
    return BoundReport(
        "moments",
        abs(spin_val - boson_val),
        rhs,
        context={"k": k, "twice_j": J.twice},
    )


def fock_weyl_expectation(tangents, fock):
    """<vacuum| prod_j e^{iF(v~_j)} |vacuum> on the truncated space."""
    vec = fock.vacuum()
    for t in reversed(list(tangents)):
        vec = expi_hermitian(boson_field(t, fock)) @ vec
    return complex(vec[0])


def poly_char_boson(p, tangents, fock):
    """omega~(e^{i p[F(v~_1), ..., F(v~_k)]}) on the truncated space."""
    if not isinstance(p, NoncommPoly) or not p.is_selfadjoint():
        raise ContractViolationError("characteristic functions require a selfadjoint polynomial")
    mats = [boson_field(t, fock) for t in tangents]
    evaluated = p.evaluate(mats)
    assert_hermitian(evaluated, 1e-9, "evaluated polynomial")
    evaluated = 0.5 * (evaluated + evaluated.conj().T)
    vec = expi_hermitian(evaluated) @ fock.vacuum()
    return complex(vec[0])


def poly_char_boson_converged(p, tangents, lattice, start_cap=8, tol=1e-8,
                              max_cap=512, budget=FOCK_DIM_BUDGET):
    """Escalate the occupation cap until the characteristic function is
    stable to ``tol`` under doubling.  The cap leakage of e^{ipM}|0> at the
    final cap is reported alongside.  Returns (value, cap, leakage)."""
    cap = start_cap
    prev = None
    while True:
        fock = build_fock(lattice, cap, budget)
        mats = [boson_field(t, fock) for t in tangents]
        evaluated = p.evaluate(mats)
        evaluated = 0.5 * (evaluated + evaluated.conj().T)
        vec = expi_hermitian(evaluated) @ fock.vacuum()
        value = complex(vec[0])
        leakage = fock.cap_leakage(vec)
        if prev is not None and abs(value - prev) < tol:
            return value, cap, leakage
        if cap >= max_cap:
            return value, cap, leakage
        prev = value
        cap = min(max_cap, cap * 2)


def spectral_function_apply(f, vs, state, psi, J, budget=DIM_BUDGET):
    """Apply f(F_J(v_1)...F_J(v_k)) to a spin-space vector.

    The operator product must be Hermitian (k = 1 or a symmetric word);
    otherwise the spectral calculus is undefined and the call is rejected.
    """
    from .fluctuations import build_fluctuation

    dim = vs[0].lattice.dimension(J)
    prod = np.eye(dim, dtype=complex)
    for v in vs:
        prod = prod @ build_fluctuation(v, state, J, budget).matrix
    assert_hermitian(prod, 1e-10, "operator product")
    w, vecs = np.linalg.eigh(0.5 * (prod + prod.conj().T))
    return (vecs * f(w)) @ (vecs.conj().T @ psi)


def spectral_measure_spin(vs, state, J, budget=DIM_BUDGET):
    """Eigenvalues and omega-weights of a Hermitian product of fluctuations."""
    from .fluctuations import build_fluctuation

    dim = vs[0].lattice.dimension(J)
    prod = np.eye(dim, dtype=complex)
    for v in vs:
        prod = prod @ build_fluctuation(v, state, J, budget).matrix
    assert_hermitian(prod, 1e-10, "operator product")
    w, vecs = np.linalg.eigh(0.5 * (prod + prod.conj().T))
    weights = np.abs(vecs.conj().T @ state.product_vector(J, budget)) ** 2
    return w, weights


def spectral_measure_boson(tangents, fock):
    """Eigenvalues and vacuum weights of a Hermitian product of field ops."""
    prod = np.eye(fock.dim, dtype=complex)
    for t in tangents:
        prod = prod @ boson_field(t, fock)
    assert_hermitian(prod, 1e-10, "operator product")
    w, vecs = np.linalg.eigh(0.5 * (prod + prod.conj().T))
    weights = np.abs(vecs.conj().T @ fock.vacuum()) ** 2
    return w, weights


def kolmogorov_distance(eigs1, w1, eigs2, w2):
    """Sup distance between the two spectral CDFs."""
    grid = np.union1d(eigs1, eigs2)
    cdf1 = np.array([w1[eigs1 <= x].sum() for x in grid])
    cdf2 = np.array([w2[eigs2 <= x].sum() for x in grid])
    return float(np.max(np.abs(cdf1 - cdf2)))
