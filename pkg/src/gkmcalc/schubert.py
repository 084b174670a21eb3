"""Averaging map, BGG and Grassmannian Schubert polynomials, reduction mod I.

I is the ideal generated by W-invariant polynomials without constant term,
so S/I is the ordinary cohomology of G/B.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from .errors import UsageError
from .gkm import GkmClass, billey_localize, flowup_basis, structure_constants
from .graph import SCHEMA_VERSION, MomentGraph, moment_graph
from .poly import AlphaExpansion, Polynomial, alpha_expand, bgg_partial, bgg_partial_word
from .roots import Coset, RootSystem, WeylElement, word_to_text


@dataclass(frozen=True)
class SchubertPolynomial:
    owner: WeylElement
    poly: Polynomial
    basis_form: AlphaExpansion

    @classmethod
    def of(cls, owner: WeylElement, poly: Polynomial) -> "SchubertPolynomial":
        return cls(owner, poly, alpha_expand(poly, owner.system))

    def __str__(self) -> str:
        return str(self.poly)


def kappa(p: GkmClass) -> Polynomial:
    """Average of all localizations of a class on the full flag graph."""
    g = p.graph
    if g.parabolic:
        raise UsageError("kappa is defined on the full flag graph; use kappa_parabolic")
    total = Polynomial.zero(g.system.ambient_dim)
    for val in p.values:
        total = total + val
    return total / len(g.vertices)


def kappa_parabolic(w, J: Iterable[int] | None = None) -> Polynomial:
    """Schubert polynomial of w in W^J without building the G/B basis.

    The class of w^-1 on G/B is invariant under W_J, so its average
    regroups over left cosets W_J x: sum the localizations at the minimal
    x, act by every element of W_J, total, and divide by |W|.
    """
    if isinstance(w, Coset):
        J = w.parabolic if J is None else J
        w = w.min_rep
    R = w.system
    J = R.parabolic(() if J is None else J)
    if R.minimal_rep(w, J).min_rep != w:
        raise UsageError(f"{w} is not a minimal coset representative for J={sorted(J)}")
    winv = w.inverse()
    n = R.ambient_dim
    partial = Polynomial.zero(n)
    for x in R.left_minimal_reps(J):
        partial = partial + billey_localize(winv, x)
    total = Polynomial.zero(n)
    for y in R.parabolic_subgroup(J):
        total = total + partial.substitute_signed(y.images)
    return total / R.order


def grassmannian_schubert(w, J: Iterable[int] | None = None) -> SchubertPolynomial:
    rep = w.min_rep if isinstance(w, Coset) else w
    return SchubertPolynomial.of(rep, kappa_parabolic(w, J))


def _top_polynomial(R: RootSystem) -> Polynomial:
    n = R.ambient_dim
    prod = Polynomial.one(n)
    for a in R.positive_roots:
        prod = prod * a.to_poly()
    return prod / R.order


def bgg_schubert(w: WeylElement) -> SchubertPolynomial:
    """Product of positive roots over |W| for w0, then divided differences.

    With w0 w = s_{j_1}...s_{j_m} reduced, apply d_{j_1} first, then d_{j_2}...
    """
    R = w.system
    w0 = R.longest_element()
    word = R.canonical_word(w0 * w)
    poly = bgg_partial_word(word, _top_polynomial(R), R)
    return SchubertPolynomial.of(w, poly)


class IdealReducer:
    """Reads off Schubert coefficients of a polynomial modulo I."""

    def __init__(self, system: RootSystem):
        self.system = system
        self.degree_bound = system.longest_element().length
        self._lock = threading.Lock()
        self._normalizer: Fraction | int | None = None

    @property
    def normalizer(self):
        """The constant d_{w0} applied to the top Schubert polynomial (S_e)."""
        with self._lock:
            if self._normalizer is None:
                R = self.system
                word = R.canonical_word(R.longest_element())
                value = bgg_partial_word(reversed(word), _top_polynomial(R), R)
                if not value.is_constant() or value.constant_term() <= 0:
                    raise UsageError(f"unexpected normalizer {value}")
                self._normalizer = value.constant_term()
            return self._normalizer

    def coefficients(self, f: Polynomial, d: int) -> dict[WeylElement, Fraction | int]:
        R = self.system
        if not f.is_homogeneous:
            raise UsageError("coefficients mod I need a homogeneous polynomial")
        if f and f.degree != d:
            raise UsageError(f"polynomial has degree {f.degree}, not {d}")
        if d > self.degree_bound:
            return {}
        norm = self.normalizer
        out = {}
        for w in R.elements():
            if R.length(w) != d:
                continue
            c = bgg_partial_word(reversed(R.canonical_word(w)), f, R)
            value = Fraction(c.constant_term()) / norm
            out[w] = value.numerator if value.denominator == 1 else value
        return out


_REDUCERS: dict = {}


def reducer(R: RootSystem) -> IdealReducer:
    hit = _REDUCERS.get(R)
    if hit is None:
        hit = _REDUCERS[R] = IdealReducer(R)
    return hit


def schubert_coefficients_mod_I(f: Polynomial, d: int, system: RootSystem) -> dict:
    return reducer(system).coefficients(f, d)


@dataclass
class ProductReport:
    u: str
    v: str
    constants: dict[str, int]
    coefficients: dict[str, Fraction | int]
    in_ideal: bool
    nonnegative: bool = field(default=True)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "u": self.u,
            "v": self.v,
            "constants": dict(sorted(self.constants.items())),
            "schubert_coefficients": {k: str(c) for k, c in sorted(self.coefficients.items())},
            "in_ideal": self.in_ideal,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def verify_product_identity(u, v, graph: MomentGraph | None = None) -> ProductReport:
    """Check S_u S_v = sum c S_w mod I with c the ordinary GKM constants.

    Above the top degree every polynomial lies in I, so the check is empty.

    ``schubert_coefficients`` in the report are the coefficients of
    S_u S_v - sum c S_w; the identity holds when they all vanish.
    """
    if graph is None:
        if not isinstance(u, Coset):
            raise UsageError("pass cosets or a graph")
        R = u.min_rep.system
        graph = moment_graph(R, u.parabolic)
    R = graph.system
    cu, cv = graph.coset(u), graph.coset(v)
    d = cu.length + cv.length
    constants = structure_constants(cu, cv, graph, equivariant=False)
    J = graph.parabolic
    f = kappa_parabolic(cu, J) * kappa_parabolic(cv, J)
    for w, c in constants.items():
        f = f - kappa_parabolic(w, J) * c
    coeffs = schubert_coefficients_mod_I(f, d, R)
    named = {word_to_text(w.word): c for w, c in coeffs.items() if c}
    return ProductReport(
        u=word_to_text(cu.word),
        v=word_to_text(cv.word),
        constants={word_to_text(w.word): c for w, c in constants.items()},
        coefficients=named,
        in_ideal=not named,
        nonnegative=all(c >= 0 for c in constants.values()),
    )
