"""Root systems of types A/B/C/D and their Weyl groups as signed permutations.

Conventions: type A_n lives on t_1..t_{n+1} with simple roots t_i - t_{i+1};
types B/C/D of rank n live on t_1..t_n and share the first n-1 simple roots,
with last simple root t_n (B), 2t_n (C) or t_{n-1} + t_n (D).

A Weyl element is stored by the images of the coordinates: ``images[i-1] = ±j``
means t_i -> ±t_j.  ``u * v`` is the composite u∘v (v acts first), so
``(u * v)(x) == u(v(x))``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .config import DEFAULT_LIMITS
from .errors import ConfigurationError, ResourceLimitError, UsageError
from .poly import Polynomial

FAMILIES = ("A", "B", "C", "D")


@dataclass(frozen=True)
class Root:
    """Integer linear form sum(coords[i] * t_{i+1})."""

    coords: tuple[int, ...]

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coords))

    def __add__(self, other: "Root") -> "Root":
        return Root(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Root") -> "Root":
        return Root(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def dot(self, other: "Root") -> int:
        return sum(a * b for a, b in zip(self.coords, other.coords))

    def to_poly(self) -> Polynomial:
        return Polynomial.linear(self.coords)

    def __str__(self) -> str:
        return self.to_poly().to_text()


class WeylElement:
    """A Weyl group element realised as a signed permutation of t_1..t_n."""

    __slots__ = ("system", "images", "_hash")

    def __init__(self, system: "RootSystem", images: Sequence[int]):
        self.system = system
        self.images = tuple(images)
        self._hash = hash(self.images)

    def __eq__(self, other) -> bool:
        return (isinstance(other, WeylElement) and self.images == other.images
                and self.system is other.system)

    def __hash__(self) -> int:
        return self._hash

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        if not isinstance(other, WeylElement):
            return NotImplemented
        if other.system is not self.system:
            raise UsageError("elements of different Weyl groups")
        mine = self.images
        out = []
        for img in other.images:
            if img > 0:
                out.append(mine[img - 1])
            else:
                out.append(-mine[-img - 1])
        return WeylElement(self.system, out)

    def inverse(self) -> "WeylElement":
        inv = [0] * len(self.images)
        for i, img in enumerate(self.images, 1):
            if img > 0:
                inv[img - 1] = i
            else:
                inv[-img - 1] = -i
        return WeylElement(self.system, inv)

    def act(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Image of the linear form with the given coordinates."""
        out = [0] * len(coords)
        for c, img in zip(coords, self.images):
            if c:
                if img > 0:
                    out[img - 1] += c
                else:
                    out[-img - 1] -= c
        return tuple(out)

    def __call__(self, x):
        return apply(self, x)

    @property
    def length(self) -> int:
        return self.system.length(self)

    @property
    def word(self) -> tuple[int, ...]:
        """Canonical reduced word (smallest left descent first)."""
        return self.system.canonical_word(self)

    @property
    def is_identity(self) -> bool:
        return self.images == tuple(range(1, len(self.images) + 1))

    def one_line(self) -> tuple[int, ...]:
        return self.images

    def __str__(self) -> str:
        return word_to_text(self.word)

    def __repr__(self) -> str:
        return f"WeylElement({self.system.name}, {word_to_text(self.word)})"


def word_to_text(word: Sequence[int]) -> str:
    return "*".join(f"s{i}" for i in word) if word else "e"


def parse_word(text: str) -> tuple[int, ...]:
    """Parse 's2*s1*s3' (or 'e') into a word of simple indices."""
    text = text.strip()
    if text in ("e", "", "1"):
        return ()
    word = []
    for part in text.replace(" ", "").split("*"):
        if not (part.startswith("s") and part[1:].isdigit()):
            raise UsageError(f"cannot parse Weyl group element {text!r}")
        word.append(int(part[1:]))
    return tuple(word)


def apply(w: WeylElement, x):
    """Act by w on a Root, a Polynomial or a raw coordinate tuple."""
    n = len(w.images)
    if isinstance(x, Root):
        if len(x.coords) != n:
            raise UsageError("dimension mismatch")
        return Root(w.act(x.coords))
    if isinstance(x, Polynomial):
        return x.substitute_signed(w.images)
    if isinstance(x, tuple):
        if len(x) != n:
            raise UsageError("dimension mismatch")
        return w.act(x)
    raise TypeError(f"cannot act on {type(x).__name__}")


@dataclass(frozen=True)
class Coset:
    """A coset w W_J, represented by its minimal-length element."""

    min_rep: WeylElement
    parabolic: frozenset

    @property
    def length(self) -> int:
        return self.min_rep.length

    @property
    def word(self) -> tuple[int, ...]:
        return self.min_rep.word

    def __str__(self) -> str:
        return str(self.min_rep)


class ReducedWords(NamedTuple):
    canonical: tuple[int, ...]
    all: frozenset


def _simple_root_coords(family: str, rank: int) -> list[tuple[int, ...]]:
    n = rank + 1 if family == "A" else rank
    roots = []
    for i in range(n - 1):
        v = [0] * n
        v[i], v[i + 1] = 1, -1
        roots.append(tuple(v))
    if family == "A":
        return roots
    v = [0] * n
    if family == "B":
        v[n - 1] = 1
    elif family == "C":
        v[n - 1] = 2
    else:
        v[n - 2] = v[n - 1] = 1
    return roots + [tuple(v)]


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


class RootSystem:
    """Root datum plus cached Weyl group combinatorics.

    Build instances through ``build_root_system`` so that each (family, rank)
    is a single shared object; elements compare by identity of their system.
    """

    def __init__(self, family: str, rank: int, limits=DEFAULT_LIMITS):
        family = family.upper() if isinstance(family, str) else family
        if family not in FAMILIES:
            raise ConfigurationError(f"unsupported family {family!r}")
        if not isinstance(rank, int) or rank < 1 or (family == "D" and rank < 2):
            raise ConfigurationError(f"unsupported rank {rank!r} for type {family}")
        if rank > 11:
            raise ConfigurationError("rank above 11 is outside desk scale")
        self.family = family
        self.rank = rank
        self.limits = limits
        self.ambient_dim = rank + 1 if family == "A" else rank
        self.name = f"{family}{rank}"
        self.simple_roots = tuple(Root(c) for c in _simple_root_coords(family, rank))
        self._lock = threading.RLock()
        self._build_roots()
        self.simple_reflections = tuple(self.reflection(a) for a in self.simple_roots)
        self.identity = WeylElement(self, range(1, self.ambient_dim + 1))
        self._length: dict[WeylElement, int] = {}
        self._word: dict[WeylElement, tuple[int, ...]] = {}
        self._intervals: dict[WeylElement, frozenset] = {}
        self._memo: dict = {}

    def __repr__(self) -> str:
        return f"RootSystem({self.family!r}, {self.rank})"

    # roots

    def _build_roots(self) -> None:
        simple = [a.coords for a in self.simple_roots]
        norms = [_dot(a, a) for a in simple]
        coeffs: dict[tuple, tuple] = {}
        frontier = []
        for i, a in enumerate(simple):
            c = tuple(int(j == i) for j in range(self.rank))
            coeffs[a] = c
            frontier.append(a)
        while frontier:
            nxt = []
            for b in frontier:
                cb = coeffs[b]
                for i, a in enumerate(simple):
                    pair = 2 * _dot(b, a)
                    if pair % norms[i]:
                        raise ConfigurationError("non-crystallographic datum")
                    k = pair // norms[i]
                    if not k:
                        continue
                    nb = tuple(x - k * y for x, y in zip(b, a))
                    if nb not in coeffs:
                        coeffs[nb] = tuple(x - (k if j == i else 0) for j, x in enumerate(cb))
                        nxt.append(nb)
            frontier = nxt
        self._coeffs = coeffs
        positive = [r for r, c in coeffs.items() if all(x >= 0 for x in c)]
        for r, c in coeffs.items():
            if not (all(x >= 0 for x in c) or all(x <= 0 for x in c)):
                raise ConfigurationError("root with mixed-sign coefficients")
        positive.sort(key=lambda r: (sum(coeffs[r]), tuple(-x for x in r)))
        self.positive_roots = tuple(Root(r) for r in positive)
        self._positive = frozenset(positive)
        self._all = frozenset(coeffs)

    @property
    def roots(self) -> frozenset:
        return frozenset(Root(r) for r in self._all)

    def is_root(self, x) -> bool:
        return tuple(getattr(x, "coords", x)) in self._all

    def is_positive(self, x) -> bool:
        """True for positive roots; the input must be a root."""
        return tuple(getattr(x, "coords", x)) in self._positive

    def simple_coefficients(self, x) -> tuple[int, ...]:
        return self._coeffs[tuple(getattr(x, "coords", x))]

    def positive_of(self, x) -> Root:
        """The positive root among ±x."""
        c = tuple(getattr(x, "coords", x))
        return Root(c) if c in self._positive else Root(tuple(-v for v in c))

    def reflection(self, root) -> WeylElement:
        """s_a(x) = x - 2 (x.a)/(a.a) a, which is a signed permutation here."""
        a = tuple(getattr(root, "coords", root))
        aa = _dot(a, a)
        images = []
        for j in range(self.ambient_dim):
            image = [Fraction(int(k == j)) - Fraction(2 * a[j] * y, aa) for k, y in enumerate(a)]
            nz = [(k, x) for k, x in enumerate(image) if x]
            if len(nz) != 1 or abs(nz[0][1]) != 1:
                raise ConfigurationError("reflection is not a signed permutation")
            k, x = nz[0]
            images.append((k + 1) * int(x))
        return WeylElement(self, images)

    def simple_reflection(self, i: int) -> WeylElement:
        if not 1 <= i <= self.rank:
            raise UsageError(f"simple index {i} out of range 1..{self.rank}")
        return self.simple_reflections[i - 1]

    # elements

    @property
    def order(self) -> int:
        n = self.rank
        if self.family == "A":
            return math.factorial(n + 1)
        if self.family == "D":
            return 2 ** (n - 1) * math.factorial(n)
        return 2 ** n * math.factorial(n)

    def element(self, images: Sequence[int]) -> WeylElement:
        w = WeylElement(self, images)
        if sorted(abs(i) for i in w.images) != list(range(1, self.ambient_dim + 1)):
            raise UsageError(f"{images} is not a signed permutation")
        for a in self.simple_roots:
            if w.act(a.coords) not in self._all:
                raise UsageError(f"{images} is not in the Weyl group of {self.name}")
        return w

    def from_word(self, word: Iterable[int]) -> WeylElement:
        w = self.identity
        for i in word:
            w = w * self.simple_reflection(i)
        return w

    def parse_element(self, text: str) -> WeylElement:
        return self.from_word(parse_word(text))

    def length(self, w: WeylElement) -> int:
        n = self._length.get(w)
        if n is None:
            winv = w.inverse()
            neg = self._positive
            n = sum(1 for b in self.positive_roots if winv.act(b.coords) not in neg)
            self._length[w] = n
        return n

    def left_descents(self, w: WeylElement) -> list[int]:
        """Indices i with l(s_i w) < l(w), i.e. w^-1(alpha_i) < 0."""
        winv = w.inverse()
        return [i for i, a in enumerate(self.simple_roots, 1)
                if winv.act(a.coords) not in self._positive]

    def right_descents(self, w: WeylElement) -> list[int]:
        """Indices i with l(w s_i) < l(w), i.e. w(alpha_i) < 0."""
        return [i for i, a in enumerate(self.simple_roots, 1)
                if w.act(a.coords) not in self._positive]

    def canonical_word(self, w: WeylElement) -> tuple[int, ...]:
        word = self._word.get(w)
        if word is None:
            out = []
            x = w
            while not x.is_identity:
                i = self.left_descents(x)[0]
                out.append(i)
                x = self.simple_reflections[i - 1] * x
            word = self._word[w] = tuple(out)
        return word

    def _check_cap(self, size: int, cap: int | None) -> None:
        cap = self.limits.max_group_order if cap is None else cap
        if size > cap:
            raise ResourceLimitError(f"{self.name}: {size} elements exceeds the cap {cap}")

    def _levels(self, keep, generators: Sequence[int]) -> list[WeylElement]:
        level = [self.identity]
        out = []
        seen = {self.identity}
        while level:
            level.sort(key=self.canonical_word)
            out.extend(level)
            nxt = []
            for w in level:
                winv = w.inverse()
                for i in generators:
                    if winv.act(self.simple_roots[i - 1].coords) not in self._positive:
                        continue
                    v = self.simple_reflections[i - 1] * w
                    if v not in seen and keep(v):
                        seen.add(v)
                        nxt.append(v)
            level = nxt
        return out

    def elements(self, cap: int | None = None) -> list[WeylElement]:
        """All of W ordered by length, then canonical word."""
        self._check_cap(self.order, cap)
        key = ("elements",)
        with self._lock:
            if key not in self._memo:
                self._memo[key] = tuple(self._levels(lambda v: True, range(1, self.rank + 1)))
            return list(self._memo[key])

    def parabolic(self, J: Iterable[int] = ()) -> frozenset:
        J = frozenset(int(j) for j in J)
        bad = [j for j in J if not 1 <= j <= self.rank]
        if bad:
            raise UsageError(f"parabolic indices {sorted(bad)} out of range 1..{self.rank}")
        return J

    def parabolic_order(self, J: Iterable[int]) -> int:
        return len(self.parabolic_subgroup(J))

    def minimal_reps(self, J: Iterable[int] = (), cap: int | None = None) -> list[WeylElement]:
        """W^J in (length, canonical word) order."""
        J = self.parabolic(J)
        key = ("minimal_reps", J)
        with self._lock:
            if key not in self._memo:
                expected = self.order // self.parabolic_order(J)
                self._check_cap(expected, cap)

                def keep(v):
                    return all(v.act(self.simple_roots[j - 1].coords) in self._positive for j in J)

                self._memo[key] = tuple(self._levels(keep, range(1, self.rank + 1)))
            return list(self._memo[key])

    def parabolic_subgroup(self, J: Iterable[int]) -> list[WeylElement]:
        """The elements of W_J."""
        J = self.parabolic(J)
        key = ("subgroup", J)
        with self._lock:
            if key not in self._memo:
                self._memo[key] = tuple(self._levels(lambda v: True, sorted(J)))
            return list(self._memo[key])

    def left_minimal_reps(self, J: Iterable[int]) -> list[WeylElement]:
        """Minimal representatives of the left cosets W_J w (inverses of W^J)."""
        return [w.inverse() for w in self.minimal_reps(J)]

    def minimal_rep(self, w: WeylElement, J: Iterable[int] = ()) -> Coset:
        J = self.parabolic(J)
        x = w
        changed = True
        while changed:
            changed = False
            for j in J:
                if x.act(self.simple_roots[j - 1].coords) not in self._positive:
                    x = x * self.simple_reflections[j - 1]
                    changed = True
        return Coset(x, J)

    def coset(self, w: WeylElement, J: Iterable[int] = ()) -> Coset:
        return self.minimal_rep(w, J)

    # parabolic root data

    def nilradical_roots(self, J: Iterable[int]) -> frozenset:
        """Negative roots involving some alpha_i with i outside J."""
        J = self.parabolic(J)
        key = ("n-", J)
        hit = self._memo.get(key)
        if hit is None:
            outside = [i for i in range(self.rank) if i + 1 not in J]
            hit = frozenset(tuple(-x for x in b.coords) for b in self.positive_roots
                            if any(self._coeffs[b.coords][i] for i in outside))
            self._memo[key] = hit
        return hit

    def levi_roots(self, J: Iterable[int]) -> frozenset:
        """Roots in the integer span of {alpha_j : j in J}."""
        J = self.parabolic(J)
        return frozenset(r for r, c in self._coeffs.items()
                         if all(x == 0 for i, x in enumerate(c) if i + 1 not in J))

    def inversions(self, w: WeylElement, J: Iterable[int] = ()) -> frozenset:
        """Positive roots beta with w^-1(beta) in the negative nilradical."""
        nil = self.nilradical_roots(J)
        winv = w.inverse()
        return frozenset(b for b in self.positive_roots if winv.act(b.coords) in nil)

    # order and words

    def longest_element(self) -> WeylElement:
        key = ("w0",)
        hit = self._memo.get(key)
        if hit is None:
            w = self.identity
            while True:
                winv = w.inverse()
                up = [i for i, a in enumerate(self.simple_roots, 1)
                      if winv.act(a.coords) in self._positive]
                if not up:
                    break
                w = self.simple_reflections[up[0] - 1] * w
            hit = self._memo[key] = w
        return hit

    def w0_conjugate_index(self, i: int) -> int:
        w0 = self.longest_element()
        c = w0 * self.simple_reflection(i) * w0.inverse()
        return self.simple_reflections.index(c) + 1

    def reduced_words(self, w: WeylElement, max_length: int | None = None) -> ReducedWords:
        cap = self.limits.max_word_length if max_length is None else max_length
        if self.length(w) > cap:
            raise ResourceLimitError(f"length {self.length(w)} exceeds the reduced-word cap {cap}")
        memo: dict[WeylElement, frozenset] = {}

        def words(x: WeylElement) -> frozenset:
            if x.is_identity:
                return frozenset({()})
            hit = memo.get(x)
            if hit is None:
                hit = frozenset((i,) + rest for i in self.left_descents(x)
                                for rest in words(self.simple_reflections[i - 1] * x))
                memo[x] = hit
            return hit

        return ReducedWords(self.canonical_word(w), words(w))

    def lower_interval(self, w: WeylElement) -> frozenset:
        """{u : u <= w} via subwords of the canonical word of w."""
        with self._lock:
            hit = self._intervals.get(w)
            if hit is not None:
                return hit
            if w.is_identity:
                hit = frozenset({w})
            else:
                i = self.canonical_word(w)[0]
                s = self.simple_reflections[i - 1]
                rest = self.lower_interval(s * w)
                hit = rest | frozenset(s * u for u in rest)
            if len(self._intervals) > 50_000:
                self._intervals.clear()
            self._intervals[w] = hit
            return hit

    def bruhat_leq(self, u: WeylElement, w: WeylElement) -> bool:
        if self.length(u) > self.length(w):
            return False
        return u in self.lower_interval(w)


@lru_cache(maxsize=None)
def build_root_system(family: str, rank: int) -> RootSystem:
    return RootSystem(family.upper(), rank)


def inversions(w: WeylElement, J: Iterable[int] = ()) -> frozenset:
    return w.system.inversions(w, J)


def minimal_rep(w: WeylElement, J: Iterable[int] = ()) -> Coset:
    return w.system.minimal_rep(w, J)


def reduced_words(w: WeylElement, max_length: int | None = None) -> ReducedWords:
    return w.system.reduced_words(w, max_length)


def bruhat_leq(u: WeylElement, w: WeylElement) -> bool:
    return w.system.bruhat_leq(u, w)
