"""GKM classes on a moment graph and the operators acting on them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InternalError, NotDivisibleError, UsageError, VerificationError
from .graph import SCHEMA_VERSION, Edge, MomentGraph
from .poly import Polynomial, divmod_linear, exact_divide_linear, linear_remainder
from .roots import Coset, RootSystem, WeylElement, word_to_text


class GkmClass:
    """Values at every vertex of a moment graph (vertex id -> Polynomial)."""

    __slots__ = ("graph", "values")

    def __init__(self, graph: MomentGraph, values: Sequence[Polynomial]):
        values = tuple(values)
        if len(values) != len(graph.vertices):
            raise UsageError(f"{len(values)} values for {len(graph.vertices)} vertices")
        n = graph.system.ambient_dim
        if any(v.nvars != n for v in values):
            raise UsageError("values live in the wrong polynomial ring")
        self.graph = graph
        self.values = values

    @classmethod
    def zero(cls, graph: MomentGraph) -> "GkmClass":
        z = Polynomial.zero(graph.system.ambient_dim)
        return cls(graph, [z] * len(graph.vertices))

    @classmethod
    def one(cls, graph: MomentGraph) -> "GkmClass":
        o = Polynomial.one(graph.system.ambient_dim)
        return cls(graph, [o] * len(graph.vertices))

    @classmethod
    def constant(cls, graph: MomentGraph, c: Polynomial) -> "GkmClass":
        return cls(graph, [c] * len(graph.vertices))

    def __getitem__(self, v) -> Polynomial:
        return self.values[self.graph.vertex_id(v)]

    @property
    def support(self) -> list[int]:
        return [v for v, p in enumerate(self.values) if p]

    @property
    def is_zero(self) -> bool:
        return not any(self.values)

    @property
    def degree(self) -> int | None:
        """Common homogeneous degree of the nonzero values, if there is one."""
        degs = set()
        for p in self.values:
            degs |= p.degrees()
        return degs.pop() if len(degs) == 1 else None

    def _same(self, other: "GkmClass") -> None:
        if other.graph is not self.graph:
            raise UsageError("classes live on different graphs")

    def __add__(self, other: "GkmClass") -> "GkmClass":
        self._same(other)
        return GkmClass(self.graph, [a + b for a, b in zip(self.values, other.values)])

    def __sub__(self, other: "GkmClass") -> "GkmClass":
        self._same(other)
        return GkmClass(self.graph, [a - b for a, b in zip(self.values, other.values)])

    def __neg__(self) -> "GkmClass":
        return GkmClass(self.graph, [-a for a in self.values])

    def __mul__(self, other) -> "GkmClass":
        if isinstance(other, GkmClass):
            self._same(other)
            return GkmClass(self.graph, [a * b for a, b in zip(self.values, other.values)])
        if isinstance(other, Polynomial) or isinstance(other, int):
            return GkmClass(self.graph, [other * a for a in self.values])
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, GkmClass) and other.graph is self.graph
                and self.values == other.values)

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        inner = ", ".join(str(p) for p in self.values)
        return f"GkmClass({inner})"

    def to_dict(self) -> dict:
        g = self.graph
        return {"schema_version": SCHEMA_VERSION, "graph_ref": g.ref,
                "values": {g.name(v): str(p) for v, p in enumerate(self.values)}}

    @classmethod
    def from_dict(cls, data: Mapping, graph: MomentGraph) -> "GkmClass":
        if not isinstance(data, Mapping) or "values" not in data:
            raise UsageError("class JSON needs a 'values' object")
        version = data.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise UsageError(f"unsupported class schema_version {version!r}")
        ref = data.get("graph_ref")
        if ref is not None and ref != graph.ref:
            raise UsageError(f"class was made for graph {ref}, not {graph.ref}")
        n = graph.system.ambient_dim
        values = [Polynomial.zero(n)] * len(graph.vertices)
        seen = set()
        for key, text in data["values"].items():
            v = graph.vertex_id(key)
            if v in seen:
                raise UsageError(f"vertex {key} given twice")
            seen.add(v)
            values[v] = Polynomial.parse(str(text), n)
        if len(seen) != len(graph.vertices):
            raise UsageError("class JSON must give a value at every vertex")
        return cls(graph, values)


@dataclass
class GkmReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_gkm(p: GkmClass) -> GkmReport:
    """Check that p(u) - p(v) is divisible by the label of every edge."""
    bad = []
    vals = p.values
    for e in p.graph.edges:
        a, b = vals[e.src], vals[e.dst]
        if not a and not b:
            continue
        diff = a - b
        if diff:
            r = linear_remainder(diff, e.label)
            if r:
                bad.append((e, r))
    return GkmReport(not bad, bad)


def _root_product(roots: Iterable, n: int) -> Polynomial:
    out = Polynomial.one(n)
    for r in roots:
        out = out * r.to_poly()
    return out


def _as_rep(x, graph: MomentGraph | None, R: RootSystem, J) -> WeylElement:
    if isinstance(x, Coset):
        return x.min_rep
    if isinstance(x, WeylElement):
        return R.minimal_rep(x, J).min_rep
    if graph is not None:
        return graph.vertices[graph.vertex_id(x)].min_rep
    raise TypeError(f"cannot interpret {x!r} as a coset")


def billey_localize(w, v, word: Sequence[int] | None = None) -> Polynomial:
    """Localization of the Schubert class of w at v.

    Sums r(i_1)...r(i_k) over positions i_1 < ... < i_k of a reduced word b
    of v whose letters spell a reduced word of w, with r(i) = b_1...b_{i-1}(a_{b_i}).
    The sum is a dynamic program over positions; states are the partial
    products, kept only while they are prefixes of w.
    """
    wr = w.min_rep if isinstance(w, Coset) else w
    vr = v.min_rep if isinstance(v, Coset) else v
    R = wr.system
    n = R.ambient_dim
    lw = R.length(wr)
    b = tuple(R.canonical_word(vr) if word is None else word)
    if word is not None and (R.from_word(b) != vr or len(b) != R.length(vr)):
        raise UsageError(f"{word_to_text(b)} is not a reduced word of {vr}")
    if lw > len(b):
        return Polynomial.zero(n)
    states: dict[WeylElement, Polynomial] = {R.identity: Polynomial.one(n)}
    prefix = R.identity
    for pos, i in enumerate(b):
        s = R.simple_reflections[i - 1]
        r = Polynomial.linear(prefix.act(R.simple_roots[i - 1].coords))
        remaining = len(b) - pos - 1
        new: dict[WeylElement, Polynomial] = {}
        for x, poly in states.items():
            lx = R.length(x)
            if lw - lx <= remaining:
                new[x] = new[x] + poly if x in new else poly
            y = x * s
            ly = R.length(y)
            if ly == lx + 1 and R.length(y.inverse() * wr) == lw - ly:
                term = poly * r
                new[y] = new[y] + term if y in new else term
        states = {x: p for x, p in new.items() if p}
        prefix = prefix * s
    return states.get(wr, Polynomial.zero(n))


def billey_localize_explicit(w: WeylElement, b: Sequence[int]) -> Polynomial:
    """Slow reference: enumerate every subword of b that is a reduced word of w."""
    R = w.system
    n = R.ambient_dim
    lw = R.length(w)
    rs = []
    prefix = R.identity
    for i in b:
        rs.append(Polynomial.linear(prefix.act(R.simple_roots[i - 1].coords)))
        prefix = prefix * R.simple_reflections[i - 1]
    total = Polynomial.zero(n)
    for idx in combinations(range(len(b)), lw):
        letters = [b[k] for k in idx]
        if R.from_word(letters) == w:
            term = Polynomial.one(n)
            for k in idx:
                term = term * rs[k]
            total = total + term
    return total


class FlowUpBasis:
    """The flow-up (equivariant Schubert) classes, one per vertex."""

    def __init__(self, graph: MomentGraph, classes: Sequence[GkmClass]):
        self.graph = graph
        self.classes = tuple(classes)

    def __getitem__(self, x) -> GkmClass:
        return self.classes[self.graph.vertex_id(x)]

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __eq__(self, other) -> bool:
        return isinstance(other, FlowUpBasis) and self.classes == other.classes

    def items(self):
        for v, c in enumerate(self.classes):
            yield self.graph.vertices[v], c


def _localization_table(g: MomentGraph) -> list[list[Polynomial]]:
    """table[v][w] = p_w(v), by peeling the first letter i of v:

    p_w(v) = s_i(p_w(s_i v)) + [s_i w < w] a_i s_i(p_{s_i w}(s_i v)).
    """
    R = g.system
    n = R.ambient_dim
    N = len(g.vertices)
    zero, one = Polynomial.zero(n), Polynomial.one(n)
    lengths = g.lengths
    table: list[list[Polynomial]] = [[zero] * N for _ in range(N)]
    table[0][0] = one
    for v in range(1, N):
        i = g.word(v)[0]
        si = g.simple_action(i)
        s = R.simple_reflections[i - 1]
        alpha = R.simple_roots[i - 1].to_poly()
        prev = table[si[v]]
        moved = [p.substitute_signed(s.images) if p else p for p in prev]
        row = table[v]
        for w in range(N):
            val = moved[w]
            u = si[w]
            if lengths[u] < lengths[w] and moved[u]:
                val = val + alpha * moved[u]
            row[w] = val
    return table


def flowup_basis(g: MomentGraph) -> FlowUpBasis:
    """Flow-up basis of the graph, localized by the subword formula."""
    hit = g._cache.get("basis")
    if hit is None:
        table = _localization_table(g)
        N = len(g.vertices)
        classes = [GkmClass(g, [table[v][w] for v in range(N)]) for w in range(N)]
        hit = g._cache["basis"] = FlowUpBasis(g, classes)
    return hit


def weyl_act(w: WeylElement, p: GkmClass) -> GkmClass:
    """(w.p)([v]) = w(p([w^-1 v]))."""
    g = p.graph
    perm = g.action(w.inverse())
    return GkmClass(g, [p.values[perm[v]].substitute_signed(w.images) for v in range(len(g.vertices))])


def delta(i: int, p: GkmClass) -> GkmClass:
    """(p - s_i.p) / a_i, pointwise."""
    g = p.graph
    R = g.system
    s = R.simple_reflection(i)
    alpha = R.simple_roots[i - 1]
    perm = g.simple_action(i)
    out = []
    for v in range(len(g.vertices)):
        u = perm[v]
        if u < v:
            # the value at s_i v is s_i of the value at v
            out.append(out[u].substitute_signed(s.images))
            continue
        a, b = p.values[v], p.values[u]
        if not a and not b:
            out.append(a)
            continue
        diff = a - b.substitute_signed(s.images)
        if diff:
            try:
                diff = exact_divide_linear(diff, alpha)
            except NotDivisibleError as exc:
                raise InternalError(f"delta_{i} is not exact at vertex {g.name(v)}: {exc}") from exc
        out.append(diff)
    return GkmClass(g, out)


def delta_word(word: Iterable[int], p: GkmClass) -> GkmClass:
    """Apply delta_{word[0]} first, then delta_{word[1]}, and so on."""
    for i in word:
        p = delta(i, p)
    return p


def kk_partial(i: int, p: GkmClass) -> GkmClass:
    """(p(v) - p(v s_i)) / (-v(a_i)); only defined on the full flag graph."""
    g = p.graph
    if g.parabolic:
        raise UsageError("the Kostant-Kumar operator is not defined on a partial flag graph")
    R = g.system
    s = R.simple_reflection(i)
    perm = g.right_action(s)
    alpha = R.simple_roots[i - 1].coords
    out = []
    for v, c in enumerate(g.vertices):
        diff = p.values[v] - p.values[perm[v]]
        if diff:
            lam = tuple(-x for x in c.min_rep.act(alpha))
            try:
                diff = exact_divide_linear(diff, lam)
            except NotDivisibleError as exc:
                raise VerificationError(f"input is not a GKM class at {g.name(v)}") from exc
        out.append(diff)
    return GkmClass(g, out)


def top_class(g: MomentGraph) -> GkmClass:
    """The class supported only at the top vertex, with value the product of its P-inversions."""
    R = g.system
    n = R.ambient_dim
    top = g.top
    values = [Polynomial.zero(n)] * len(g.vertices)
    values[top] = _root_product(R.inversions(g.vertices[top].min_rep, g.parabolic), n)
    return GkmClass(g, values)


def generate_from_top(g: MomentGraph) -> FlowUpBasis:
    """Every flow-up class as a divided difference of the top class.

    For [u], write the minimal element of [w0^-1 u] as s_{i_1}...s_{i_k};
    then p_[u] = delta_{i_1'} ... delta_{i_k'} p_[w0] (rightmost acting first)
    with i' the index conjugate under w0.  Shared tails are reused.
    """
    R = g.system
    J = g.parabolic
    w0 = R.longest_element()
    conj = {i: R.w0_conjugate_index(i) for i in range(1, R.rank + 1)}
    N = len(g.vertices)
    classes: list[GkmClass | None] = [None] * N
    classes[g.top] = top_class(g)
    pending = []
    for u in range(N):
        m = R.minimal_rep(w0.inverse() * g.vertices[u].min_rep, J)
        pending.append((m.length, u, m.word))
    for _, u, word in sorted(pending):
        if classes[u] is not None:
            continue
        # peel the first letter: p_[u] = delta_{i'}(p_[x]) with [x] reached
        # by the remaining letters from the top
        i = word[0]
        x = R.minimal_rep(w0 * R.from_word(word[1:]), J)
        xid = g.vertex_id(x)
        if classes[xid] is None:
            raise InternalError("generation order violated")
        classes[u] = delta(conj[i], classes[xid])
    return FlowUpBasis(g, classes)


def decompose(p: GkmClass, basis: FlowUpBasis | None = None) -> dict[Coset, Polynomial]:
    """Coefficients c_u with p = sum c_u p_[u], by triangular elimination."""
    g = p.graph
    basis = flowup_basis(g) if basis is None else basis
    R = g.system
    n = R.ambient_dim
    residual = list(p.values)
    out: dict[Coset, Polynomial] = {}
    for u in range(len(g.vertices)):
        val = residual[u]
        if not val:
            continue
        c = val
        for beta in R.inversions(g.vertices[u].min_rep, g.parabolic):
            try:
                c = exact_divide_linear(c, beta)
            except NotDivisibleError:
                raise VerificationError(
                    f"not in the span of the flow-up basis: value at {g.name(u)} "
                    f"is not divisible by {beta}") from None
        out[g.vertices[u]] = c
        pu = basis.classes[u].values
        for v in range(u, len(g.vertices)):
            if pu[v]:
                residual[v] = residual[v] - c * pu[v]
        if residual[u]:
            raise InternalError("elimination did not clear the pivot")
    if any(residual):
        raise VerificationError("not in the span of the flow-up basis: nonzero residual")
    return out


def structure_constants(u, v, graph: MomentGraph, equivariant: bool = True) -> dict:
    """Expansion of p_[u] p_[v] in the flow-up basis.

    With ``equivariant=False`` every t_i is set to 0 and the (integer)
    ordinary constants are returned; zero entries are dropped.
    """
    basis = flowup_basis(graph)
    product = basis[u] * basis[v]
    coeffs = decompose(product, basis)
    if equivariant:
        return coeffs
    out = {}
    for w, c in coeffs.items():
        k = c.constant_term()
        if k:
            if getattr(k, "denominator", 1) != 1:
                raise VerificationError(f"non-integral structure constant {k} at {w}")
            out[w] = int(k)
    return out


def class_to_json(p: GkmClass) -> str:
    return json.dumps(p.to_dict(), sort_keys=True, indent=2) + "\n"
