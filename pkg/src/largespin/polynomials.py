"""Noncommutative polynomials in abstract generators.

Words are tuples of generator indices; a polynomial is a finite complex
combination of words.  The involution conjugates coefficients and reverses
words; a polynomial fixed by it is selfadjoint and evaluates to a Hermitian
matrix on Hermitian arguments.  Words are evaluated left to right.
"""

import numpy as np

from .errors import ContractViolationError


class NoncommPoly:
    def __init__(self, terms=None):
        self._terms = {}
        for word, coeff in (terms or {}).items():
            coeff = complex(coeff)
            if coeff != 0:
                self._terms[tuple(word)] = coeff

    @classmethod
    def generator(cls, index):
        return cls({(int(index),): 1.0})

    @classmethod
    def scalar(cls, value):
        return cls({(): value})

    @property
    def terms(self):
        return dict(self._terms)

    def num_generators(self):
        return 1 + max((max(w) for w in self._terms if w), default=-1)

    def adjoint(self):
        return NoncommPoly({w[::-1]: c.conjugate() for w, c in self._terms.items()})

    def is_selfadjoint(self):
        return self.adjoint()._terms == self._terms

    def evaluate(self, matrices):
        """Substitute matrices for the generators (word order = product order)."""
        if self.num_generators() > len(matrices):
            raise ContractViolationError(
                f"polynomial uses {self.num_generators()} generators, got {len(matrices)} matrices"
            )
        dim = matrices[0].shape[0] if matrices else 1
        out = np.zeros((dim, dim), dtype=complex)
        eye = np.eye(dim, dtype=complex)
        for word, coeff in self._terms.items():
            prod = eye
            for idx in word:
                prod = prod @ matrices[idx]
            out += coeff * prod
        return out

    def __add__(self, other):
        other = other if isinstance(other, NoncommPoly) else NoncommPoly.scalar(other)
        terms = dict(self._terms)
        for w, c in other._terms.items():
            terms[w] = terms.get(w, 0.0) + c
        return NoncommPoly(terms)

    __radd__ = __add__

    def __neg__(self):
        return NoncommPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = other if isinstance(other, NoncommPoly) else NoncommPoly.scalar(other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, NoncommPoly):
            return NoncommPoly({w: c * other for w, c in self._terms.items()})
        terms = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                terms[w] = terms.get(w, 0.0) + c1 * c2
        return NoncommPoly(terms)

    def __rmul__(self, scalar):
        return NoncommPoly({w: scalar * c for w, c in self._terms.items()})

    def __eq__(self, other):
        return isinstance(other, NoncommPoly) and self._terms == other._terms

    def __repr__(self):
        if not self._terms:
            return "NoncommPoly(0)"
        parts = []
        for word, coeff in sorted(self._terms.items()):
            name = "*".join(f"X{i}" for i in word) if word else "1"
            parts.append(f"({coeff:g})*{name}")
        return "NoncommPoly(" + " + ".join(parts) + ")"


def anticommutator(i, j):
    """X_i X_j + X_j X_i, the canonical selfadjoint quadratic word."""
    xi, xj = NoncommPoly.generator(i), NoncommPoly.generator(j)
    return xi * xj + xj * xi
