"""Sparse exact polynomials in t_1..t_n.

Monomials are packed into a single integer, one byte per variable
(byte k holds the exponent of t_{k+1}).  Multiplying monomials is then
integer addition, and unpacking is ``int.to_bytes``.  Exponents and total
degrees are capped at 255, far beyond anything reachable at desk scale.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import InternalError, NotDivisibleError, UsageError

Coeff = Union[int, Fraction]

_MAX_DEGREE = 255


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _clean(d: dict) -> dict:
    out = {}
    for m, c in d.items():
        if c:
            if type(c) is Fraction and c.denominator == 1:
                c = c.numerator
            out[m] = c
    return out


def _div(c, d):
    """Exact quotient c/d of rationals, kept as int when integral."""
    if d == 1:
        return c
    if d == -1:
        return -c
    return _norm(Fraction(c) / d)


def _pack(exps: Sequence[int]) -> int:
    return int.from_bytes(bytes(exps), "little")


class Polynomial:
    """Immutable polynomial with exact rational coefficients."""

    __slots__ = ("nvars", "_terms", "_hash", "_degree")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], Coeff] | None = None):
        if nvars < 1 or nvars > 64:
            raise UsageError(f"unsupported number of variables {nvars}")
        packed = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars or any(e < 0 or e > _MAX_DEGREE for e in exps):
                raise UsageError(f"bad exponent vector {exps} for {nvars} variables")
            if isinstance(c, float):
                raise TypeError("floating point coefficients are not allowed")
            m = _pack(exps)
            packed[m] = packed.get(m, 0) + Fraction(c)
        self.nvars = nvars
        self._terms = _clean(packed)
        self._hash = None
        self._degree = None

    @classmethod
    def _make(cls, nvars: int, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = terms
        p._hash = None
        p._degree = None
        return p

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._make(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: Coeff) -> "Polynomial":
        c = _norm(Fraction(c)) if not isinstance(c, int) else c
        return cls._make(nvars, {0: c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls._make(nvars, {0: 1})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        """The coordinate t_i (1-based)."""
        if not 1 <= i <= nvars:
            raise UsageError(f"variable index {i} out of range 1..{nvars}")
        return cls._make(nvars, {1 << (8 * (i - 1)): 1})

    @classmethod
    def linear(cls, coords: Sequence[Coeff]) -> "Polynomial":
        """The linear form sum(coords[i] * t_{i+1})."""
        terms = {1 << (8 * k): _norm(Fraction(c)) for k, c in enumerate(coords) if c}
        return cls._make(len(coords), terms)

    # inspection

    def terms(self) -> Iterator[tuple[tuple[int, ...], Coeff]]:
        """Yield (exponent tuple, coefficient) pairs in canonical order."""
        n = self.nvars
        for m in self._sorted_monomials():
            yield tuple(m.to_bytes(n, "little")), self._terms[m]

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._degree is None:
            n = self.nvars
            self._degree = max((sum(m.to_bytes(n, "little")) for m in self._terms), default=-1)
        return self._degree

    def degrees(self) -> set[int]:
        n = self.nvars
        return {sum(m.to_bytes(n, "little")) for m in self._terms}

    @property
    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def constant_term(self) -> Coeff:
        return self._terms.get(0, 0)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def homogeneous_part(self, d: int) -> "Polynomial":
        n = self.nvars
        return Polynomial._make(n, {m: c for m, c in self._terms.items()
                                    if sum(m.to_bytes(n, "little")) == d})

    # arithmetic

    def _check(self, other: "Polynomial") -> None:
        if other.nvars != self.nvars:
            raise UsageError(f"dimension mismatch: {self.nvars} vs {other.nvars} variables")

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.nvars, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        a, b = (self, other) if len(self._terms) >= len(other._terms) else (other, self)
        out = dict(a._terms)
        for m, c in b._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
        return Polynomial._make(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._make(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) - c
            if s:
                out[m] = _norm(s)
            else:
                out.pop(m, None)
        return Polynomial._make(self.nvars, out)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def scale(self, c: Coeff) -> "Polynomial":
        if not c:
            return Polynomial.zero(self.nvars)
        if c == 1:
            return self
        return Polynomial._make(self.nvars, {m: _norm(v * c) for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial.zero(self.nvars)
        if self.degree + other.degree > _MAX_DEGREE:
            raise OverflowError("total degree exceeds 255")
        if len(b) == 1:
            (mb, cb), = b.items()
            if cb == 1:
                return Polynomial._make(self.nvars, {m + mb: c for m, c in a.items()})
            return Polynomial._make(self.nvars, {m + mb: _norm(c * cb) for m, c in a.items()})
        if len(a) == 1:
            return other * self
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma + mb
                out[m] = get(m, 0) + ca * cb
        return Polynomial._make(self.nvars, _clean(out))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("polynomial division by zero")
            return self.scale(Fraction(1, 1) / other)
        return NotImplemented

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative exponent")
        result = Polynomial.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_term())
            else:
                self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # substitutions

    def substitute_signed(self, images: Sequence[int]) -> "Polynomial":
        """Apply t_i -> sign * t_|images[i-1]| for a signed permutation."""
        if len(images) != self.nvars:
            raise UsageError(f"dimension mismatch: {len(images)} images for {self.nvars} variables")
        if not self._terms:
            return self
        table = _subst_table(images)
        n = self.nvars
        out = {}
        for m, c in self._terms.items():
            hit = table.get(m)
            if hit is None:
                exps = m.to_bytes(n, "little")
                new = bytearray(n)
                neg = 0
                for k, e in enumerate(exps):
                    if e:
                        img = images[k]
                        if img < 0:
                            new[-img - 1] = e
                            neg ^= e & 1
                        else:
                            new[img - 1] = e
                hit = (int.from_bytes(new, "little"), bool(neg))
                table[m] = hit
            out[hit[0]] = -c if hit[1] else c
        return Polynomial._make(n, out)

    def linear_substitute(self, forms: Sequence["Polynomial"]) -> "Polynomial":
        """Replace t_i by forms[i-1]; the result lives in the forms' ring."""
        if len(forms) != self.nvars:
            raise UsageError("need one form per variable")
        nout = forms[0].nvars
        n = self.nvars
        powers: list[list[Polynomial]] = [[Polynomial.one(nout)] for _ in range(n)]
        result = Polynomial.zero(nout)
        for m, c in self._terms.items():
            term = Polynomial.constant(nout, c)
            for k, e in enumerate(m.to_bytes(n, "little")):
                if e:
                    pw = powers[k]
                    while len(pw) <= e:
                        pw.append(pw[-1] * forms[k])
                    term = term * pw[e]
            result = result + term
        return result

    def evaluate(self, point: Sequence[Coeff]) -> Coeff:
        n = self.nvars
        total = 0
        for m, c in self._terms.items():
            v = c
            for k, e in enumerate(m.to_bytes(n, "little")):
                if e:
                    v = v * point[k] ** e
            total += v
        return _norm(Fraction(total)) if not isinstance(total, int) else total

    # text

    def _sorted_monomials(self) -> list[int]:
        n = self.nvars

        def key(m):
            exps = m.to_bytes(n, "little")
            return (-sum(exps), tuple(-e for e in exps))

        return sorted(self._terms, key=key)

    def to_text(self, var: str = "t") -> str:
        """Canonical text: graded-lex order, rationals as (p/q)."""
        if not self._terms:
            return "0"
        n = self.nvars
        parts = []
        for m in self._sorted_monomials():
            c = self._terms[m]
            exps = m.to_bytes(n, "little")
            factors = [f"{var}{k + 1}" + (f"^{e}" if e > 1 else "")
                       for k, e in enumerate(exps) if e]
            neg = c < 0
            a = -c if neg else c
            if not factors:
                body = str(a)
            elif a == 1:
                body = "*".join(factors)
            elif isinstance(a, Fraction):
                body = f"({a})*" + "*".join(factors)
            else:
                body = f"{a}*" + "*".join(factors)
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()!r}, nvars={self.nvars})"

    @classmethod
    def parse(cls, text: str, nvars: int, var: str = "t") -> "Polynomial":
        """Parse text such as ``(1/2)*t1^2 - t2*t3`` or ``(t1 - t2)*(t1 - t3)``.

        Accepts +, -, *, ^ (or **) with a nonnegative integer exponent, and
        division by a nonzero rational constant.
        """
        if not text or not text.strip():
            raise UsageError("empty polynomial text")
        try:
            tree = ast.parse(text.replace("^", "**"), mode="eval")
        except SyntaxError:
            raise UsageError(f"cannot parse polynomial {text!r}") from None
        name_re = re.compile(re.escape(var) + r"(\d+)$")

        def walk(node) -> "Polynomial":
            if isinstance(node, ast.Constant) and type(node.value) is int:
                return cls.constant(nvars, node.value)
            if isinstance(node, ast.Name):
                m = name_re.match(node.id)
                if not m or not 1 <= int(m.group(1)) <= nvars:
                    raise UsageError(f"unknown variable {node.id!r} in {text!r}")
                return cls.variable(nvars, int(m.group(1)))
            if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
                inner = walk(node.operand)
                return -inner if isinstance(node.op, ast.USub) else inner
            if isinstance(node, ast.BinOp):
                left, right = walk(node.left), walk(node.right)
                if isinstance(node.op, ast.Add):
                    return left + right
                if isinstance(node.op, ast.Sub):
                    return left - right
                if isinstance(node.op, ast.Mult):
                    return left * right
                if isinstance(node.op, ast.Div):
                    if not right.is_constant() or not right:
                        raise UsageError(f"can only divide by a nonzero constant in {text!r}")
                    return left / right.constant_term()
                if isinstance(node.op, ast.Pow):
                    k = right.constant_term() if right.is_constant() else None
                    if k is None or not isinstance(k, int) or k < 0:
                        raise UsageError(f"exponent must be a nonnegative integer in {text!r}")
                    if k > _MAX_DEGREE:
                        raise UsageError(f"exponent {k} exceeds {_MAX_DEGREE} in {text!r}")
                    return left ** k
            raise UsageError(f"cannot parse polynomial {text!r}")

        try:
            return walk(tree.body)
        except OverflowError as exc:
            raise UsageError(f"{exc} in {text!r}") from None


_SUBST_CACHE: dict[tuple[int, ...], dict[int, tuple[int, bool]]] = {}


def _subst_table(images) -> dict:
    key = tuple(images)
    table = _SUBST_CACHE.get(key)
    if table is None:
        if len(_SUBST_CACHE) > 4096:
            _SUBST_CACHE.clear()
        table = _SUBST_CACHE[key] = {}
    elif len(table) > 200_000:
        table.clear()
    return table


def _coords_of(lam) -> tuple:
    if isinstance(lam, Polynomial):
        if lam.degree != 1 or not lam.is_homogeneous:
            raise UsageError(f"{lam} is not a nonzero linear form")
        coords = [0] * lam.nvars
        for exps, c in lam.terms():
            coords[exps.index(1)] = c
        return tuple(coords)
    return tuple(getattr(lam, "coords", lam))


def divmod_linear(f: Polynomial, lam) -> tuple[Polynomial, Polynomial]:
    """Return (q, r) with f = lam*q + r, r free of lam's leading variable.

    Synthetic division in the leading variable x of lam: r is f evaluated
    on the hyperplane lam = 0 (x eliminated), so lam | f iff r == 0.
    """
    coords = _coords_of(lam)
    n = f.nvars
    if len(coords) != n:
        raise UsageError(f"dimension mismatch: {len(coords)} vs {n} variables")
    k = next((j for j, c in enumerate(coords) if c), None)
    if k is None:
        raise UsageError("division by the zero linear form")
    if not f._terms:
        return f, f
    lead = coords[k]
    shift = 8 * k
    x0 = [(1 << (8 * j), _div(-c, lead)) for j, c in enumerate(coords) if c and j != k]
    groups: dict[int, dict[int, Coeff]] = {}
    for m, c in f._terms.items():
        d = (m >> shift) & 255
        groups.setdefault(d, {})[m - (d << shift)] = c
    top = max(groups)
    quotient: dict[int, Coeff] = {}
    b = groups.get(top, {})
    for e in range(top, 0, -1):
        for m, c in b.items():
            quotient[m + ((e - 1) << shift)] = _div(c, lead)
        nb = dict(groups.get(e - 1, {}))
        for m, c in b.items():
            for xm, xc in x0:
                mm = m + xm
                nb[mm] = nb.get(mm, 0) + c * xc
        b = _clean(nb)
    return Polynomial._make(n, quotient), Polynomial._make(n, b)


def linear_remainder(f: Polynomial, lam) -> Polynomial:
    """The remainder of ``divmod_linear``: f on the hyperplane lam = 0.

    Forms x_k and x_k +- x_j (up to a common factor) are a monomial
    substitution; anything else falls back to synthetic division.
    """
    coords = _coords_of(lam)
    n = f.nvars
    if len(coords) != n:
        raise UsageError(f"dimension mismatch: {len(coords)} vs {n} variables")
    nz = [j for j, c in enumerate(coords) if c]
    if not nz:
        raise UsageError("division by the zero linear form")
    if not f._terms:
        return f
    k = nz[0]
    shift = 8 * k
    if len(nz) == 1:
        return Polynomial._make(n, {m: c for m, c in f._terms.items() if not (m >> shift) & 255})
    if len(nz) == 2 and abs(coords[nz[1]]) == abs(coords[k]):
        j = nz[1]
        sign = -1 if coords[j] == coords[k] else 1
        out: dict[int, Coeff] = {}
        for m, c in f._terms.items():
            d = (m >> shift) & 255
            mm = m - (d << shift) + (d << (8 * j))
            if sign < 0 and d & 1:
                c = -c
            out[mm] = out.get(mm, 0) + c
        return Polynomial._make(n, _clean(out))
    return divmod_linear(f, lam)[1]


def exact_divide_linear(f: Polynomial, lam) -> Polynomial:
    """Return f / lam, raising NotDivisibleError (with the remainder) if inexact."""
    q, r = divmod_linear(f, lam)
    if r._terms:
        raise NotDivisibleError(r, lam if isinstance(lam, Polynomial) else Polynomial.linear(_coords_of(lam)))
    return q


def bgg_partial(i: int, f: Polynomial, system) -> Polynomial:
    """The divided difference (f - s_i f) / alpha_i."""
    s = system.simple_reflection(i)
    diff = f - f.substitute_signed(s.images)
    try:
        return exact_divide_linear(diff, system.simple_roots[i - 1])
    except NotDivisibleError as exc:
        raise InternalError(f"divided difference d_{i} of {f} left remainder {exc.remainder}") from exc


def bgg_partial_word(word: Iterable[int], f: Polynomial, system) -> Polynomial:
    """Apply d_{word[0]} first, then d_{word[1]}, and so on."""
    for i in word:
        if not f._terms:
            break
        f = bgg_partial(i, f, system)
    return f


@dataclass(frozen=True)
class AlphaExpansion:
    """A polynomial rewritten in simple-root coordinates a_1..a_r.

    ``coeffs`` keeps the part free of the complementary invariant
    coordinates; ``residual`` is set when those coordinates occur.
    """

    coeffs: Polynomial
    residual: bool

    def to_text(self) -> str:
        return self.coeffs.to_text("a")

    def __str__(self) -> str:
        return self.to_text()

    @property
    def is_nonnegative(self) -> bool:
        return all(c >= 0 for _, c in self.coeffs.terms())

    def substitute_roots(self, system) -> Polynomial:
        """Replace a_i by alpha_i (the inverse change of variables)."""
        forms = [r.to_poly() for r in system.simple_roots]
        return self.coeffs.linear_substitute(forms)


def _rref_inverse(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    a = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def _nullspace(rows: list[list[int]], n: int) -> list[list[Fraction]]:
    a = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(a)) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][col]
        a[r] = [x / p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][free]
        basis.append(v)
    return basis


_ALPHA_FORMS: dict = {}


def _alpha_forms(system) -> tuple[list[Polynomial], int]:
    key = (system.family, system.rank)
    hit = _ALPHA_FORMS.get(key)
    if hit is None:
        n, r = system.ambient_dim, system.rank
        rows = [list(a.coords) for a in system.simple_roots]
        rows += _nullspace(rows, n)
        inv = _rref_inverse(rows)
        forms = [Polynomial.linear(inv[j]) for j in range(n)]
        hit = _ALPHA_FORMS[key] = (forms, r)
    return hit


def alpha_expand(f: Polynomial, system) -> AlphaExpansion:
    """Rewrite f in the coordinates a_i = alpha_i (plus invariant complements)."""
    if f.nvars != system.ambient_dim:
        raise UsageError("dimension mismatch with the root system")
    forms, r = _alpha_forms(system)
    g = f.linear_substitute(forms)
    n = g.nvars
    kept = {}
    residual = False
    for exps, c in g.terms():
        if any(exps[r:]):
            residual = True
        else:
            kept[exps[:r]] = c
    return AlphaExpansion(Polynomial(r, kept), residual)
