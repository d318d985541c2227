"""Closed-form correlation functions of coherent product states.

The generating function for observables sum_x v_x . S_x in a product of
coherent states is

    prod_x { cos(|v_x|/2) + i (v_x.u_x/|v_x|) sin(|v_x|/2) }^(2J)

and everything in this module (means, cumulants, the classical-limit bound)
is derived from it.  Sites with v_x = 0 contribute a factor 1.
"""

from dataclasses import dataclass
import cmath
import math

import numpy as np

from .bounds import BoundReport, guarded_exp
from .errors import ContractViolationError
from .spincore import (
    DIM_BUDGET,
    check_dimension,
    coherent_vector,
    project_tangent,
)


@dataclass(frozen=True)
class CoherentState:
    """Product of per-site coherent states |(theta_x, phi_x)>."""

    lattice: object
    directions: tuple

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        if len(self.directions) != len(self.lattice):
            raise ContractViolationError("one direction per lattice site is required")

    def u_vectors(self):
        return np.array([u.unit_vector() for u in self.directions])

    def site_vector(self, J, site):
        return coherent_vector(J, self.directions[self.lattice.index(site)])

    def product_vector(self, J, budget=DIM_BUDGET):
        check_dimension(self.lattice.dimension(J), budget, "state vector")
        vec = np.ones(1, dtype=complex)
        for u in self.directions:
            vec = np.kron(vec, coherent_vector(J, u))
        return vec

    def expectation(self, matrix, J, budget=DIM_BUDGET):
        """omega(A) = <Omega_J| A |Omega_J> for a lattice operator A."""
        vec = self.product_vector(J, budget)
        return complex(np.vdot(vec, matrix @ vec))

    def tangent(self, v):
        return project_tangent(v, self.directions)


def _site_char_factors(v, state):
    """Per-site (|v_x|, v_x.u_x/|v_x|) with the zero-field convention."""
    lengths = v.site_lengths()
    dots = np.einsum("ij,ij->i", v.values, state.u_vectors())
    cosines = np.where(lengths > 0, dots / np.where(lengths > 0, lengths, 1.0), 0.0)
    return lengths, cosines


def char_closed_form(v, state, J):
    """omega(e^{i sum v_x . S_x}) by the coherent-state product formula."""
    lengths, cosines = _site_char_factors(v, state)
    value = 1.0 + 0.0j
    for length, c in zip(lengths, cosines):
        if length == 0.0:
            continue
        base = math.cos(length / 2.0) + 1j * c * math.sin(length / 2.0)
        value *= base ** J.twice
    return value


def mean(v, state, J):
    """omega(sum v_x . S_x) = J sum_x v_x . u_x."""
    return J.j * float(np.einsum("ij,ij->i", v.values, state.u_vectors()).sum())


def classical_limit_check(v, state, J):
    """Law of large numbers: |omega(e^{(i/J) sum v.S}) - e^{i sum v.u}| <= rhs.

    rhs = (1/J) exp[|v|_1 + 2 exp(|v|_1)].
    """
    scaled = (1.0 / J.j) * v
    lhs_val = char_closed_form(scaled, state, J)
    target = cmath.exp(1j * float(np.einsum("ij,ij->i", v.values, state.u_vectors()).sum()))
    n1 = v.p_norm(1)
    inner, sat1 = guarded_exp(n1)
    rhs, sat2 = guarded_exp(n1 + 2.0 * inner) if not sat1 else (math.inf, True)
    return BoundReport(
        "classical-limit",
        abs(lhs_val - target),
        rhs / J.j if not (sat1 or sat2) else math.inf,
        saturated=sat1 or sat2,
        context={"twice_j": J.twice},
    )


def truncated_cumulant(k, v, state, J):
    """k-th truncated correlation of F_J(v), with its a-priori bound.

    Returns (value, report) where report checks |value| against the bound
    2^{k/2} |v|_2^k / J^{k/2-1}.  k = 1 gives 0: the observable is centered.
    """
    if k < 1:
        raise ContractViolationError("cumulant order must be >= 1")
    if k == 1:
        return 0.0, BoundReport("cumulant-bound", 0.0, 0.0, context={"k": 1})
    lengths, cosines = _site_char_factors(v, state)
    total = 0.0
    for length, c in zip(lengths, cosines):
        if length == 0.0:
            continue
        bracket = (1.0 - c * c) * ((1.0 - c) ** (k - 1) + (-1.0) ** k * (1.0 + c) ** (k - 1))
        if bracket == 0.0:
            continue
        magnitude, _ = guarded_exp(k * math.log(length) + math.log(abs(bracket)))
        total += math.copysign(magnitude, bracket)
    prefactor = 0.5 * (2.0 * J.j) ** (1.0 - k / 2.0)
    value = prefactor * total
    bound = 2.0 ** (k / 2.0) * v.p_norm(2) ** k / J.j ** (k / 2.0 - 1.0)
    report = BoundReport("cumulant-bound", abs(value), bound, context={"k": k, "twice_j": J.twice})
    return value, report


def covariance(v, w, state, J=None, check=True, budget=DIM_BUDGET):
    """omega(F_J(v) F_J(w)), J-independent:

    sum_x [ v.w - (v.u)(w.u) + i (v x w).u ].

    With ``check`` and a concrete J the closed form is asserted against the
    dense-matrix expectation to 1e-12.
    """
    u = state.u_vectors()
    dots_vw = np.einsum("ij,ij->i", v.values, w.values)
    dots_vu = np.einsum("ij,ij->i", v.values, u)
    dots_wu = np.einsum("ij,ij->i", w.values, u)
    crosses = np.einsum("ij,ij->i", np.cross(v.values, w.values), u)
    value = complex(np.sum(dots_vw - dots_vu * dots_wu) + 1j * np.sum(crosses))
    if check and J is not None:
        from .fluctuations import build_fluctuation

        fv = build_fluctuation(v, state, J, budget=budget).matrix
        fw = build_fluctuation(w, state, J, budget=budget).matrix
        brute = state.expectation(fv @ fw, J, budget)
        if abs(brute - value) > 1e-12 * max(1.0, abs(value)):
            raise ContractViolationError(
                f"covariance closed form disagrees with the matrix expectation: "
                f"{value} vs {brute}"
            )
    return value
