"""N independent spin-1/2 particles as one collective spin-N/2.

With S_N = (1/2) sum_i sigma_i, the N-fold coherent product state has the
same generating function as the spin-N/2 coherent state, and

    F_N(v) = N^{-1/2} sum_i [v . sigma_i - omega(v . sigma)]
           = sqrt(2/(N/2)) [v . S_N - omega_N(v . S_N)]

so the collective route reproduces the fluctuation operators exactly.  As N
grows, characteristic functions of selfadjoint polynomials of the F_N(v)
approach their values in the single-mode Fock vacuum.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .bounds import BoundReport
from .correlators import CoherentState, char_closed_form
from .errors import ContractViolationError, ResourceLimitError
from .fluctuations import build_fluctuation, poly_char_spin
from .fock import build_fock, poly_char_boson
from .polynomials import NoncommPoly
from .spincore import Direction, HalfInt, Lattice, Vec3Field, coherent_vector

ENSEMBLE_MAX_N = 10
ROUTE_AGREEMENT_TOL = 1e-12

_POINT = Lattice(("o",))


def _collective_state(u):
    return CoherentState(_POINT, (u,))


def _collective_field(v):
    return Vec3Field(_POINT, np.asarray(v, dtype=float).reshape(1, 3))


@dataclass(frozen=True)
class EnsembleConfig:
    """N spin-1/2 copies in the coherent state of direction u."""

    N: int
    u: Direction
    observables: tuple  # directions v_j in R^3

    def __post_init__(self):
        if self.N < 1:
            raise ContractViolationError("N must be >= 1")
        object.__setattr__(
            self,
            "observables",
            tuple(np.asarray(v, dtype=float) for v in self.observables),
        )

    @property
    def collective_j(self):
        return HalfInt(self.N)


def pauli_matrices():
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return sx, sy, sz


def single_site_char(u, v):
    """omega(e^{(i/2) v . sigma}) = cos(|v|/2) + i (v.u/|v|) sin(|v|/2)."""
    length = float(np.linalg.norm(v))
    if length == 0.0:
        return 1.0 + 0.0j
    c = float(np.dot(v, u.unit_vector())) / length
    return complex(math.cos(length / 2.0), c * math.sin(length / 2.0))


def collective_char(config, v):
    """omega_N(e^{i v . S_N}) computed two ways and cross-checked to 1e-12:

    the N-th power of the single-site expectation, and the closed-form
    generating function at J = N/2.
    """
    v = np.asarray(v, dtype=float)
    product_route = single_site_char(config.u, v) ** config.N
    closed_route = char_closed_form(
        _collective_field(v), _collective_state(config.u), config.collective_j
    )
    if abs(product_route - closed_route) > ROUTE_AGREEMENT_TOL:
        raise ContractViolationError(
            f"product and collective generating functions disagree: "
            f"{product_route} vs {closed_route}"
        )
    return product_route


def ensemble_fluctuation_matrix(config, v, budget_n=ENSEMBLE_MAX_N):
    """F_N(v) as a 2^N-dimensional matrix on the N-fold product space."""
    if config.N > budget_n:
        raise ResourceLimitError(
            f"the 2^{config.N} product route is capped at N = {budget_n}; "
            f"use the (N+1)-dimensional collective route"
        )
    sx, sy, sz = pauli_matrices()
    v = np.asarray(v, dtype=float)
    site = v[0] * sx + v[1] * sy + v[2] * sz
    mean = float(np.dot(v, config.u.unit_vector()))
    dim = 2 ** config.N
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(config.N):
        ops = [np.eye(2, dtype=complex)] * config.N
        ops[i] = site
        embedded = ops[0]
        for o in ops[1:]:
            embedded = np.kron(embedded, o)
        out += embedded
    out -= config.N * mean * np.eye(dim)
    return out / math.sqrt(config.N)


def ensemble_product_vector(config):
    single = coherent_vector(HalfInt(1), config.u)
    vec = np.ones(1, dtype=complex)
    for _ in range(config.N):
        vec = np.kron(vec, single)
    return vec


def collective_fluctuation_matrix(config, v):
    """F_N(v) on the (N+1)-dimensional collective space; the same builder as
    the general fluctuation operator, at J = N/2 on a single site."""
    return build_fluctuation(
        _collective_field(v), _collective_state(config.u), config.collective_j
    ).matrix


def ensemble_fluctuation_check(config, max_order=4, tol=1e-10):
    """Verify that all mixed moments of the configured observables agree
    between the 2^N product route and the collective spin-N/2 route.

    Returns one BoundReport per word length up to ``max_order`` (lhs = the
    worst moment deviation of that order).
    """
    ens_mats = [ensemble_fluctuation_matrix(config, v) for v in config.observables]
    col_mats = [collective_fluctuation_matrix(config, v) for v in config.observables]
    ens_vec = ensemble_product_vector(config)
    col_vec = coherent_vector(config.collective_j, config.u)
    reports = []
    for order in range(1, max_order + 1):
        worst = 0.0
        for word in itertools.product(range(len(config.observables)), repeat=order):
            ens = ens_vec.copy()
            col = col_vec.copy()
            for idx in reversed(word):
                ens = ens_mats[idx] @ ens
                col = col_mats[idx] @ col
            diff = abs(complex(np.vdot(ens_vec, ens)) - complex(np.vdot(col_vec, col)))
            worst = max(worst, diff)
        reports.append(
            BoundReport("ensemble-moment-agreement", worst, tol, context={"order": order})
        )
    return reports


def kuperberg_clt(config_u, p, observables, n_list, fock_cap=40):
    """Characteristic functions of a selfadjoint polynomial of fluctuations
    over an N sweep, against the single-mode Fock limit.

    Returns (rows, limit) where rows carry (N, value, |value - limit|).
    """
    if not isinstance(p, NoncommPoly) or not p.is_selfadjoint():
        raise ContractViolationError("a selfadjoint polynomial is required")
    state = _collective_state(config_u)
    fields = [_collective_field(v) for v in observables]
    fock = build_fock(_POINT, fock_cap)
    tangents = [state.tangent(v) for v in fields]
    limit = poly_char_boson(p, tangents, fock)
    rows = []
    for n in n_list:
        J = HalfInt(int(n))
        value = poly_char_spin(p, fields, state, J)
        rows.append({"N": int(n), "value": value, "difference": abs(value - limit)})
    return rows, limit
