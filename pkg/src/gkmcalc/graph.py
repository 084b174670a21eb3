"""Moment graphs of G/P: generic, quotient and bit-string constructions.

Edges point from the longer coset to the shorter one, so ``u <= v`` in the
graph order exactly when a directed path leads from v down to u.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import ConfigurationError, InternalError, UsageError
from .roots import Coset, Root, RootSystem, WeylElement, build_root_system, parse_word, word_to_text

SCHEMA_VERSION = 1

GRAPH_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version", "family", "rank", "parabolic", "vertices", "edges"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "family": {"enum": ["A", "B", "C", "D"]},
        "rank": {"type": "integer", "minimum": 1},
        "parabolic": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "word", "length"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "word": {"type": "string"},
                    "length": {"type": "integer", "minimum": 0},
                    "bits": {"type": "string", "pattern": "^[01]+$"},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["src", "dst", "label"],
                "additionalProperties": False,
                "properties": {
                    "src": {"type": "integer", "minimum": 0},
                    "dst": {"type": "integer", "minimum": 0},
                    "label": {"type": "string"},
                },
            },
        },
    },
}


class Edge(NamedTuple):
    src: int
    dst: int
    label: Root


class MomentGraph:
    """Vertices are cosets in (length, canonical word) order; ids index them."""

    def __init__(self, system: RootSystem, parabolic: Iterable[int], vertices: Sequence[Coset],
                 edges: Iterable[Edge], bits: Sequence[str] | None = None):
        self.system = system
        self.parabolic = system.parabolic(parabolic)
        self.vertices = tuple(vertices)
        self.bits = tuple(bits) if bits is not None else None
        self._index = {c.min_rep: k for k, c in enumerate(self.vertices)}
        labels: dict[tuple[int, int], Root] = {}
        for e in edges:
            pair = (min(e.src, e.dst), max(e.src, e.dst))
            old = labels.get(pair)
            if old is not None and old != e.label:
                raise InternalError(f"two labels {old} and {e.label} on one vertex pair")
            if e.src == e.dst:
                raise InternalError("self-edge in moment graph")
            labels[pair] = e.label
        edges = {(e.src, e.dst): e for e in edges}
        for (a, b) in edges:
            if (b, a) in edges:
                raise InternalError("edge stored in both directions")
        self.edges = tuple(sorted(edges.values(), key=lambda e: (e.src, e.dst)))
        n = len(self.vertices)
        self._out: list[list[Edge]] = [[] for _ in range(n)]
        self._in: list[list[Edge]] = [[] for _ in range(n)]
        for e in self.edges:
            self._out[e.src].append(e)
            self._in[e.dst].append(e)
        self._label = {(e.src, e.dst): e.label for e in self.edges}
        self._cache: dict = {}

    # identity

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def is_full_flag(self) -> bool:
        return not self.parabolic

    @property
    def lengths(self) -> tuple[int, ...]:
        hit = self._cache.get("lengths")
        if hit is None:
            hit = self._cache["lengths"] = tuple(c.length for c in self.vertices)
        return hit

    def word(self, v: int) -> tuple[int, ...]:
        return self.vertices[v].word

    def name(self, v: int) -> str:
        return word_to_text(self.vertices[v].word)

    def vertex_id(self, x) -> int:
        """Resolve an id, Coset, WeylElement, word text or bit string to an id."""
        if isinstance(x, int):
            if not 0 <= x < len(self.vertices):
                raise UsageError(f"vertex id {x} out of range")
            return x
        if isinstance(x, Coset):
            x = x.min_rep
        if isinstance(x, str):
            if self.bits is not None and x and set(x) <= {"0", "1"} and len(x) == len(self.bits[0]):
                try:
                    return self.bits.index(x)
                except ValueError:
                    raise UsageError(f"{x} is not a vertex of this graph") from None
            word = parse_word(x)
            for i in word:
                if not 1 <= i <= self.system.rank:
                    raise UsageError(f"s{i} is not a simple reflection of {self.system.name}")
            x = self.system.from_word(word)
        if isinstance(x, WeylElement):
            rep = self.system.minimal_rep(x, self.parabolic).min_rep
            hit = self._index.get(rep)
            if hit is None:
                raise UsageError(f"{x} is not a vertex of this graph")
            return hit
        raise TypeError(f"cannot resolve {x!r} to a vertex")

    def coset(self, x) -> Coset:
        return self.vertices[self.vertex_id(x)]

    @property
    def top(self) -> int:
        return len(self.vertices) - 1

    # adjacency

    def out_edges(self, v: int) -> list[Edge]:
        return self._out[v]

    def in_edges(self, v: int) -> list[Edge]:
        return self._in[v]

    def label(self, src: int, dst: int) -> Root | None:
        return self._label.get((src, dst))

    def below(self, v: int) -> int:
        """Bitmask of all u with u <= v (paths from v downwards)."""
        masks = self._cache.get("below")
        if masks is None:
            masks = [0] * len(self.vertices)
            for u in range(len(self.vertices)):
                m = 1 << u
                for e in self._out[u]:
                    m |= masks[e.dst]
                masks[u] = m
            self._cache["below"] = masks
        return masks[v]

    def leq(self, u: int, v: int) -> bool:
        return bool(self.below(v) >> u & 1)

    def above(self, u: int) -> list[int]:
        return [v for v in range(len(self.vertices)) if self.leq(u, v)]

    # Weyl group action on vertices

    def action(self, w: WeylElement) -> tuple[int, ...]:
        """perm[v] = id of [w v]."""
        key = ("act", w)
        hit = self._cache.get(key)
        if hit is None:
            J = self.parabolic
            R = self.system
            hit = tuple(self._index[R.minimal_rep(w * c.min_rep, J).min_rep] for c in self.vertices)
            if len(self._cache) > 4096:
                self._cache.clear()
            self._cache[key] = hit
        return hit

    def simple_action(self, i: int) -> tuple[int, ...]:
        return self.action(self.system.simple_reflection(i))

    def right_action(self, w: WeylElement) -> tuple[int, ...]:
        """perm[v] = id of v w (full flag graphs only)."""
        if self.parabolic:
            raise UsageError("right multiplication is only defined on the full flag graph")
        key = ("ract", w)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = tuple(self._index[c.min_rep * w] for c in self.vertices)
        return hit

    # comparisons and export

    def signature(self) -> tuple:
        """Vertex words, bit tags aside, plus (src word, dst word, label) triples."""
        words = tuple(self.word(v) for v in range(len(self.vertices)))
        edges = frozenset((words[e.src], words[e.dst], e.label.coords) for e in self.edges)
        return (self.system.family, self.system.rank, tuple(sorted(self.parabolic)),
                frozenset(words), edges)

    def to_dict(self) -> dict:
        vertices = []
        for v, c in enumerate(self.vertices):
            item = {"id": v, "word": word_to_text(c.word), "length": c.length}
            if self.bits is not None:
                item["bits"] = self.bits[v]
            vertices.append(item)
        return {
            "schema_version": SCHEMA_VERSION,
            "family": self.system.family,
            "rank": self.system.rank,
            "parabolic": sorted(self.parabolic),
            "vertices": vertices,
            "edges": [{"src": e.src, "dst": e.dst, "label": str(e.label)} for e in self.edges],
        }

    @property
    def ref(self) -> str:
        """Short content hash identifying the graph (bit tags excluded)."""
        hit = self._cache.get("ref")
        if hit is None:
            d = self.to_dict()
            for v in d["vertices"]:
                v.pop("bits", None)
            blob = json.dumps(d, sort_keys=True, separators=(",", ":")).encode()
            hit = self._cache["ref"] = hashlib.sha256(blob).hexdigest()[:16]
        return hit


def export(g: MomentGraph, fmt: str = "json") -> str:
    fmt = fmt.lower()
    if fmt == "json":
        return json.dumps(g.to_dict(), sort_keys=True, indent=2) + "\n"
    if fmt == "dot":
        return _to_dot(g)
    raise UsageError(f"unknown export format {fmt!r}")


def _to_dot(g: MomentGraph) -> str:
    R = g.system
    title = f"{R.name} J={{{','.join(map(str, sorted(g.parabolic)))}}}"
    lines = [f'digraph "{title}" {{']
    for v in range(len(g.vertices)):
        name = g.name(v)
        label = name if g.bits is None else f"{name}\\n{g.bits[v]}"
        lines.append(f'  "{name}" [label="{label}"];')
    for e in g.edges:
        lines.append(f'  "{g.name(e.src)}" -> "{g.name(e.dst)}" [label="{e.label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_from_dict(data: dict) -> MomentGraph:
    """Rebuild a graph from its JSON form (vertices must be the W^J of the header)."""
    R = build_root_system(data["family"], data["rank"])
    J = R.parabolic(data["parabolic"])
    vertices = [R.minimal_rep(R.from_word(parse_word(v["word"])), J) for v in data["vertices"]]
    edges = [Edge(e["src"], e["dst"], _parse_root(R, e["label"])) for e in data["edges"]]
    bits = None
    if data["vertices"] and all("bits" in v for v in data["vertices"]):
        bits = [v["bits"] for v in data["vertices"]]
    return MomentGraph(R, J, vertices, edges, bits)


def _parse_root(R: RootSystem, text: str) -> Root:
    from .poly import Polynomial

    p = Polynomial.parse(text, R.ambient_dim)
    coords = [0] * R.ambient_dim
    for exps, c in p.terms():
        coords[exps.index(1)] = int(c)
    return Root(tuple(coords))


# generic construction

def build_generic(R: RootSystem, J: Iterable[int] = ()) -> MomentGraph:
    """Vertices W^J; an edge [w] -> [s_a w] labeled a whenever w^-1(a) is a
    negative root of the nilradical and the coset changes."""
    J = R.parabolic(J)
    reps = R.minimal_reps(J)
    cosets = [R.minimal_rep(w, J) for w in reps]
    index = {c.min_rep: k for k, c in enumerate(cosets)}
    nil = R.nilradical_roots(J)
    reflections = [(b, R.reflection(b)) for b in R.positive_roots]
    edges = []
    for k, w in enumerate(reps):
        winv = w.inverse()
        for beta, s in reflections:
            image = winv.act(beta.coords)
            if image not in nil:
                # either w^-1(beta) is in the Levi part (same coset) or it lies
                # in the positive nilradical and the edge is found from the
                # other endpoint
                continue
            v = R.minimal_rep(s * w, J).min_rep
            if v == w:
                raise InternalError("reflection in the nilradical fixed a coset")
            edges.append(Edge(k, index[v], beta))
    return MomentGraph(R, J, cosets, edges)


def build_quotient(full: MomentGraph, J: Iterable[int]) -> MomentGraph:
    """Collapse the G/B graph along W/W_J, dropping self-edges."""
    if full.parabolic:
        raise UsageError("quotient construction needs the full flag graph")
    R = full.system
    J = R.parabolic(J)
    reps = R.minimal_reps(J)
    cosets = [R.minimal_rep(w, J) for w in reps]
    index = {c.min_rep: k for k, c in enumerate(cosets)}
    image = [index[R.minimal_rep(c.min_rep, J).min_rep] for c in full.vertices]
    edges: dict[tuple[int, int], Root] = {}
    for e in full.edges:
        a, b = image[e.src], image[e.dst]
        if a == b:
            continue
        if (b, a) in edges:
            raise InternalError("quotient edge directions disagree")
        old = edges.setdefault((a, b), e.label)
        if old != e.label:
            raise InternalError("quotient edge labels disagree")
    return MomentGraph(R, J, cosets, [Edge(a, b, lab) for (a, b), lab in edges.items()])


# reconstruction from simple edges

def _simple_vertex_actions(g: MomentGraph) -> list[list[int]]:
    R = g.system
    n = len(g.vertices)
    perms = []
    for i, a in enumerate(R.simple_roots, 1):
        perm = list(range(n))
        for e in g.edges:
            if e.label == a:
                perm[e.src], perm[e.dst] = e.dst, e.src
        perms.append(perm)
    return perms


def reconstruct_edges(g: MomentGraph, lengths: Sequence[int] | None = None) -> MomentGraph:
    """Complete a graph from its simple-root edges.

    Reflections are generated from the simple ones by conjugation,
    s_{s_j(b)} = s_j s_b s_j, acting on vertices through the simple edges
    (a vertex without an a_i edge is fixed by s_i).  Every moved vertex gets
    an edge to its image, pointing to the shorter end.
    """
    R = g.system
    lengths = list(g.lengths if lengths is None else lengths)
    simple = _simple_vertex_actions(g)
    actions: dict[tuple, list[int]] = {}
    frontier = []
    for i, a in enumerate(R.simple_roots):
        actions[a.coords] = simple[i]
        frontier.append(a.coords)
    while frontier:
        nxt = []
        for b in frontier:
            sb = actions[b]
            for j, s in enumerate(R.simple_reflections):
                c = R.positive_of(s.act(b)).coords
                if c in actions:
                    continue
                sj = simple[j]
                actions[c] = [sj[sb[sj[v]]] for v in range(len(sj))]
                nxt.append(c)
        frontier = nxt
    if len(actions) != len(R.positive_roots):
        raise InternalError("conjugation did not reach every reflection")
    edges = list(g.edges)
    for c, perm in actions.items():
        label = Root(c)
        for v, u in enumerate(perm):
            if u == v:
                continue
            if lengths[v] == lengths[u]:
                raise InternalError("reflection joins two cosets of equal length")
            if lengths[v] > lengths[u]:
                edges.append(Edge(v, u, label))
    return MomentGraph(R, g.parabolic, g.vertices, edges, g.bits)


# bit strings

@dataclass(frozen=True)
class BitLayout:
    """Positions of a bit string and how simple reflections move them."""

    family: str
    k: int
    n: int
    rank: int
    size: int
    weights: tuple[tuple[int, ...], ...]
    moves: tuple[tuple[tuple[int, int], ...], ...]
    parabolic: frozenset

    def identity(self) -> str:
        return "1" * self.k + "0" * (self.size - self.k)

    def is_legal(self, b: str) -> bool:
        if len(b) != self.size or b.count("1") != self.k or set(b) - {"0", "1"}:
            return False
        if self.family == "A":
            return True
        opposite = 2 * self.n + 1 if self.family in "CD" else 2 * self.n + 2
        return all(not (b[p - 1] == "1" and b[opposite - p - 1] == "1")
                   for p in range(1, self.size + 1) if opposite - p != p)

    def move(self, i: int, b: str) -> str:
        chars = list(b)
        for p, q in self.moves[i - 1]:
            chars[p - 1], chars[q - 1] = chars[q - 1], chars[p - 1]
        return "".join(chars)

    def points_down(self, i: int, b: str) -> bool:
        """True when the simple edge runs s_i b -> b, i.e. b is the lower end.

        For each moved pair p < q we need b_p >= b_q, strictly somewhere.
        """
        strict = False
        for p, q in self.moves[i - 1]:
            if b[p - 1] < b[q - 1]:
                return False
            if b[p - 1] > b[q - 1]:
                strict = True
        return strict


def bit_layout(family: str, k: int, n: int) -> BitLayout:
    """Layout for G(k,n) (family A) or the isotropic Grassmannian of rank n."""
    family = family.upper()
    if family == "A":
        if not 1 <= k < n:
            raise ConfigurationError(f"G({k},{n}) needs 1 <= k < n")
        weights = []
        for p in range(1, n + 1):
            v = [0] * n
            v[p - 1] = 1
            weights.append(tuple(v))
        moves = tuple(((i, i + 1),) for i in range(1, n))
        J = frozenset(range(1, n)) - {k}
        return BitLayout("A", k, n, n - 1, n, tuple(weights), moves, J)
    if family not in "BCD" or len(family) != 1:
        raise ConfigurationError(f"unsupported family {family!r}")
    if family == "D":
        if n < 4 or not (1 <= k <= n - 2 or k == n):
            raise ConfigurationError(f"type D bit strings need rank >= 4 and k in 1..{n - 2} or {n}")
    elif n < 2 or not 1 <= k <= n:
        raise ConfigurationError(f"need rank >= 2 and 1 <= k <= {n}")
    size = 2 * n + 1 if family == "B" else 2 * n
    weights = []
    for p in range(1, size + 1):
        v = [0] * n
        if p <= n:
            v[p - 1] = 1
        elif family == "B" and p == n + 1:
            pass
        else:
            v[size - p] = -1
        weights.append(tuple(v))
    moves = [((i, i + 1), (size - i, size + 1 - i)) for i in range(1, n)]
    if family == "C":
        moves.append(((n, n + 1),))
    elif family == "B":
        moves.append(((n, n + 2),))
    else:
        moves.append(((n, n + 2), (n - 1, n + 1)))
    J = frozenset(range(1, n + 1)) - {k}
    return BitLayout(family, k, n, n, size, tuple(weights), tuple(moves), J)


def build_bitstring(family: str, k: int, n: int) -> MomentGraph:
    """Moment graph of a (maximal, isotropic) Grassmannian from bit strings."""
    layout = bit_layout(family, k, n)
    R = build_root_system(layout.family, layout.rank)
    start = layout.identity()
    # the orbit of the identity string under the simple moves
    strings = [start]
    seen = {start}
    for b in strings:
        for i in range(1, layout.rank + 1):
            c = layout.move(i, b)
            if c not in seen:
                if not layout.is_legal(c):
                    raise InternalError(f"simple move produced illegal string {c}")
                seen.add(c)
                strings.append(c)
    # lengths by walking up along simple edges
    length = {start: 0}
    queue = [start]
    for b in queue:
        for i in range(1, layout.rank + 1):
            c = layout.move(i, b)
            if c != b and c not in length and layout.points_down(i, b):
                length[c] = length[b] + 1
                queue.append(c)
    if len(length) != len(strings):
        raise InternalError("some bit strings are not reachable from the identity")
    for b in strings:
        for i in range(1, layout.rank + 1):
            c = layout.move(i, b)
            if c != b and layout.points_down(i, b) and length[c] != length[b] + 1:
                raise InternalError("simple edge does not change length by one")

    def path_word(b: str) -> tuple[int, ...]:
        word = []
        while b != start:
            i = next(i for i in range(1, layout.rank + 1)
                     if layout.move(i, b) != b and layout.points_down(i, layout.move(i, b)))
            word.append(i)
            b = layout.move(i, b)
        return tuple(word)

    J = layout.parabolic
    tagged = []
    for b in strings:
        word = path_word(b)
        rep = R.minimal_rep(R.from_word(word), J)
        if rep.length != len(word):
            raise InternalError(f"path word of {b} is not reduced")
        tagged.append((rep, b))
    tagged.sort(key=lambda t: (t[0].length, t[0].word))
    cosets = [t[0] for t in tagged]
    bits = [t[1] for t in tagged]
    pos = {b: v for v, b in enumerate(bits)}
    edges = []
    for v, b in enumerate(bits):
        for i in range(1, layout.rank + 1):
            c = layout.move(i, b)
            if c != b and layout.points_down(i, b):
                edges.append(Edge(pos[c], v, R.simple_roots[i - 1]))
    skeleton = MomentGraph(R, J, cosets, edges, bits)
    return reconstruct_edges(skeleton, [length[b] for b in bits])


def bits_of(layout: BitLayout, w: WeylElement) -> str:
    """The string w . identity: ones at the positions of the images of the
    weights carried by the identity's ones."""
    where = {wt: p for p, wt in enumerate(layout.weights)}
    out = ["0"] * layout.size
    for p, bit in enumerate(layout.identity()):
        if bit == "1":
            out[where[w.act(layout.weights[p])]] = "1"
    return "".join(out)


def preset(name: str) -> tuple[str, int, frozenset, tuple[str, int, int] | None]:
    """Expand 'grassmannian:k,n' or 'isotropic-c:k,n' to (family, rank, J, bit args)."""
    try:
        kind, args = name.split(":", 1)
        k, n = (int(x) for x in args.split(","))
    except ValueError:
        raise ConfigurationError(f"bad preset {name!r}") from None
    kind = kind.strip().lower()
    if kind == "grassmannian":
        layout = bit_layout("A", k, n)
    elif kind.startswith("isotropic-") and kind[-1] in "bcd" and len(kind) == len("isotropic-") + 1:
        layout = bit_layout(kind[-1].upper(), k, n)
    else:
        raise ConfigurationError(f"unknown preset {kind!r}")
    return layout.family, layout.rank, layout.parabolic, (layout.family, k, n)


_GRAPHS: dict = {}


def moment_graph(R: RootSystem, J: Iterable[int] = ()) -> MomentGraph:
    """Shared generic graph for (R, J)."""
    key = (R.family, R.rank, R.parabolic(J))
    g = _GRAPHS.get(key)
    if g is None:
        g = _GRAPHS[key] = build_generic(R, J)
    return g
