"""Fluctuation operators and their convergence to the CCR algebra.

F_J(v) = sqrt(2/J) sum_x [v_x . S_x - omega(v_x . S_x)] is the CLT-normalized
spin fluctuation; as J grows its Weyl-type expectations approach the
quasi-free Fock values e^{-|v-tilde|_2^2/2}, and this module quantifies the
distance at finite J.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .bounds import BoundReport, guarded_exp
from .correlators import char_closed_form
from .errors import ContractViolationError
from .polynomials import NoncommPoly
from .spincore import (
    DIM_BUDGET,
    assert_hermitian,
    expi_hermitian,
    op_norm,
    sum_field_operator,
)

NORM_BOUND_FACTOR = 2.0 ** 1.5  # ||F_J(v)|| <= 2^{3/2} |v|_1 sqrt(J)


@dataclass(frozen=True)
class FluctuationOperator:
    field: object
    state: object
    J: object
    matrix: np.ndarray
    tangent: object


def build_fluctuation(v, state, J, budget=DIM_BUDGET):
    """Assemble F_J(v) as a dense matrix; Hermiticity, zero mean and the
    operator-norm bound are verified at build time."""
    from .correlators import mean

    centred = sum_field_operator(v, J, budget)
    centred -= mean(v, state, J) * np.eye(centred.shape[0])
    matrix = math.sqrt(2.0 / J.j) * centred
    assert_hermitian(matrix, 1e-10, "fluctuation operator")
    vac = abs(state.expectation(matrix, J, budget))
    if vac > 1e-12 * max(1.0, op_norm(matrix)):
        raise ContractViolationError(f"fluctuation operator has nonzero mean {vac:.3e}")
    bound = NORM_BOUND_FACTOR * v.p_norm(1) * math.sqrt(J.j)
    if op_norm(matrix) > bound * (1.0 + 1e-10):
        raise ContractViolationError("fluctuation operator norm exceeds 2^{3/2}|v|_1 sqrt(J)")
    return FluctuationOperator(v, state, J, matrix, state.tangent(v))


def fluctuation_commutator(v, w, J, budget=DIM_BUDGET):
    """[F_J(v), F_J(w)] = (2i/J) sum_x (v_x x w_x) . S_x, assembled directly."""
    from .spincore import Vec3Field

    cross = Vec3Field(v.lattice, np.cross(v.values, w.values))
    return (2.0j / J.j) * sum_field_operator(cross, J, budget)


def fluctuation_char(v, state, J):
    """omega(e^{i F_J(v)}) in closed form (generating function, rescaled)."""
    scaled = math.sqrt(2.0 / J.j) * v
    phase = cmath.exp(-1j * math.sqrt(2.0 * J.j) * sum(
        np.dot(v.values[i], u.unit_vector()) for i, u in enumerate(state.directions)
    ))
    return phase * char_closed_form(scaled, state, J)


def b_constant(norm2):
    """b(v) = exp[sqrt2 |v|_2 + sqrt2 exp(sqrt2 |v|_2)]; saturation flagged."""
    inner, sat1 = guarded_exp(math.sqrt(2.0) * norm2)
    if sat1:
        return math.inf, True
    value, sat2 = guarded_exp(math.sqrt(2.0) * norm2 + math.sqrt(2.0) * inner)
    return value, sat2


def a_constant(norm_v, norm_w):
    """a(v, w) = |v||w|(|v|+|w|)/3 + sqrt2 exp[|v||w|/2 + exp(|v||w|)]."""
    prod = norm_v * norm_w
    inner, sat1 = guarded_exp(prod)
    if sat1:
        return math.inf, True
    value, sat2 = guarded_exp(0.5 * prod + inner)
    if sat2:
        return math.inf, True
    return prod * (norm_v + norm_w) / 3.0 + math.sqrt(2.0) * value, False


def clt_single_check(v, state, J):
    """|omega(e^{iF_J(v)}) - e^{-|v-tilde|^2/2}| <= b(v)/sqrt(J)."""
    tangent = state.tangent(v)
    lhs = abs(fluctuation_char(v, state, J) - math.exp(-0.5 * tangent.norm2() ** 2))
    rhs, saturated = b_constant(v.p_norm(2))
    return BoundReport(
        "clt-single",
        lhs,
        rhs / math.sqrt(J.j) if not saturated else math.inf,
        saturated=saturated,
        context={"twice_j": J.twice},
    )


def weyl_product_expectation(tangents):
    """Quasi-free value of W(v1)...W(vn) by iterated CCR reduction:

    exp(-(i/2) sum_{j<k} sigma(vj, vk)) exp(-|sum vj|_2^2 / 2).
    """
    tangents = list(tangents)
    if not tangents:
        return 1.0 + 0.0j
    phase = 0.0
    for j in range(len(tangents)):
        for k in range(j + 1, len(tangents)):
            phase += tangents[j].symplectic(tangents[k])
    total = tangents[0]
    for t in tangents[1:]:
        total = total + t
    return cmath.exp(-0.5j * phase) * math.exp(-0.5 * total.norm2() ** 2)


def spin_weyl_product(vs, state, J, budget=DIM_BUDGET):
    """omega(prod_j e^{iF_J(v_j)}) by dense matrix products."""
    dim = vs[0].lattice.dimension(J)
    prod = np.eye(dim, dtype=complex)
    for v in vs:
        prod = prod @ expi_hermitian(build_fluctuation(v, state, J, budget).matrix)
    return state.expectation(prod, J, budget)


def clt_multi_check(vs, state, J, budget=DIM_BUDGET):
    """Multi-Weyl CLT distance against J^{-1/2}[b(sum v) + sum a(v_j, tails)].

    For a single field this delegates to clt_single_check, so the two agree
    bitwise.
    """
    vs = list(vs)
    if not vs:
        raise ContractViolationError("at least one field is required")
    if len(vs) == 1:
        return clt_single_check(vs[0], state, J)
    spin_side = spin_weyl_product(vs, state, J, budget)
    ccr_side = weyl_product_expectation([state.tangent(v) for v in vs])
    lhs = abs(spin_side - ccr_side)

    total = vs[0]
    for v in vs[1:]:
        total = total + v
    rhs, saturated = b_constant(total.p_norm(2))
    for j in range(len(vs) - 1):
        tail = vs[j + 1]
        for v in vs[j + 2:]:
            tail = tail + v
        a_val, a_sat = a_constant(vs[j].p_norm(2), tail.p_norm(2))
        rhs += a_val
        saturated = saturated or a_sat
    return BoundReport(
        "clt-multi",
        lhs,
        rhs / math.sqrt(J.j) if not math.isinf(rhs) else math.inf,
        saturated=saturated,
        context={"twice_j": J.twice, "n_factors": len(vs)},
    )


BCH_CONSTANT = 2.0 ** 1.5 / 3.0


def bch_defect(v, w, state, J, budget=DIM_BUDGET):
    """Defect of the CCR-type BCH identity for fluctuation exponentials.

    lhs = || e^{iF(v)} e^{iF(w)} - e^{iF(v+w)} e^{-[F(v),F(w)]/2} ||,
    rhs = (2^{3/2}/3) J^{-1/2} |v|_2 |w|_2 (|v|_2 + |w|_2).

    Returns (report, commutator) with the exact commutator matrix
    (2i/J) sum (v x w).S exposed for inspection.
    """
    fv = build_fluctuation(v, state, J, budget).matrix
    fw = build_fluctuation(w, state, J, budget).matrix
    fvw = build_fluctuation(v + w, state, J, budget).matrix
    comm = fluctuation_commutator(v, w, J, budget)
    from scipy.linalg import expm

    lhs = op_norm(
        expi_hermitian(fv) @ expi_hermitian(fw) - expi_hermitian(fvw) @ expm(-0.5 * comm)
    )
    nv, nw = v.p_norm(2), w.p_norm(2)
    rhs = BCH_CONSTANT * nv * nw * (nv + nw) / math.sqrt(J.j)
    report = BoundReport("bch-defect", lhs, rhs, context={"twice_j": J.twice})
    return report, comm


def commutator_bounds(a, b, c):
    """Two C*-algebra commutator estimates for Hermitian a, b and arbitrary c:

    ||[e^{iA}, C]|| <= ||[A, C]||   and
    ||e^{iA}e^{iB} - e^{i(A+B)}e^{-[A,B]/2}|| <= (||[A,[A,B]]|| + ||[B,[B,A]]||)/3.
    """
    assert_hermitian(a, 1e-10, "first operand")
    assert_hermitian(b, 1e-10, "second operand")
    from scipy.linalg import expm

    ea = expi_hermitian(a)
    comm_ac = a @ c - c @ a
    lhs1 = op_norm(ea @ c - c @ ea)
    report1 = BoundReport("unitary-commutator", lhs1, op_norm(comm_ac))

    comm_ab = a @ b - b @ a
    lhs2 = op_norm(ea @ expi_hermitian(b) - expi_hermitian(a + b) @ expm(-0.5 * comm_ab))
    nested_a = a @ comm_ab - comm_ab @ a
    comm_ba = -comm_ab
    nested_b = b @ comm_ba - comm_ba @ b
    report2 = BoundReport("bch-double-commutator", lhs2, (op_norm(nested_a) + op_norm(nested_b)) / 3.0)
    return report1, report2


def poly_char_spin(p, vs, state, J, budget=DIM_BUDGET):
    """omega(e^{i p[F_J(v_1), ..., F_J(v_k)]}) for a selfadjoint polynomial."""
    if not isinstance(p, NoncommPoly) or not p.is_selfadjoint():
        raise ContractViolationError("characteristic functions require a selfadjoint polynomial")
    mats = [build_fluctuation(v, state, J, budget).matrix for v in vs]
    evaluated = p.evaluate(mats)
    assert_hermitian(evaluated, 1e-9, "evaluated polynomial")
    evaluated = 0.5 * (evaluated + evaluated.conj().T)
    return state.expectation(expi_hermitian(evaluated), J, budget)
