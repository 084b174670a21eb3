"""Invariant checks over a moment graph and its flow-up basis.

Each check returns a list of failure descriptions; an empty list is a pass.
They are shared by the ``selftest`` command and the test suite.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Callable

from .gkm import (GkmClass, billey_localize, delta, flowup_basis, generate_from_top, verify_gkm,
                  weyl_act)
from .graph import MomentGraph, moment_graph
from .poly import Polynomial, bgg_partial
from .roots import RootSystem, build_root_system


def _product(roots, n: int) -> Polynomial:
    out = Polynomial.one(n)
    for r in roots:
        out = out * r.to_poly()
    return out


def check_basis(g: MomentGraph) -> list[str]:
    """GKM condition plus the three flow-up conditions for every basis class."""
    R = g.system
    n = R.ambient_dim
    basis = flowup_basis(g)
    bad = []
    for w, p in enumerate(basis.classes):
        name = g.name(w)
        report = verify_gkm(p)
        if not report.ok:
            bad.append(f"p_{name} violates GKM on {len(report.violations)} edges")
        support = set(p.support)
        if support != set(g.above(w)):
            bad.append(f"p_{name} has the wrong support")
        degs = set()
        for val in p.values:
            degs |= val.degrees()
        if degs != {g.lengths[w]}:
            bad.append(f"p_{name} is not homogeneous of degree {g.lengths[w]}")
        if p.values[w] != _product(R.inversions(g.vertices[w].min_rep, g.parabolic), n):
            bad.append(f"p_{name} has the wrong value at its own vertex")
    return bad


def check_edges(g: MomentGraph) -> list[str]:
    """Out-degree equals length; out-labels are the P-inversions; nilradical rule."""
    R = g.system
    nil = R.nilradical_roots(g.parabolic)
    bad = []
    for v, c in enumerate(g.vertices):
        out = g.out_edges(v)
        if len(out) != c.length:
            bad.append(f"{g.name(v)}: out-degree {len(out)} != length {c.length}")
        labels = {e.label for e in out}
        if labels != set(R.inversions(c.min_rep, g.parabolic)):
            bad.append(f"{g.name(v)}: out-labels differ from the P-inversions")
        winv = c.min_rep.inverse()
        for e in out:
            if winv.act(e.label.coords) not in nil:
                bad.append(f"{g.name(v)}: edge label {e.label} fails the nilradical rule")
            if g.lengths[e.dst] >= c.length:
                bad.append(f"{g.name(v)}: edge to {g.name(e.dst)} does not decrease length")
    return bad


def check_diamonds(g: MomentGraph) -> list[str]:
    """For [s_a w] -> [w] of gap one and [s_i w] > [w] (a != a_i), the square
    [s_i s_a w] -> [s_a w] (a_i), [s_i s_a w] -> [s_i w] (s_i a), [s_i w] -> [w] (a_i)."""
    R = g.system
    bad = []
    L = g.lengths
    for e in g.edges:
        top, w, alpha = e.src, e.dst, e.label
        if L[top] != L[w] + 1:
            continue
        for i in range(1, R.rank + 1):
            si = g.simple_action(i)
            a_i = R.simple_roots[i - 1]
            if alpha == a_i or not (L[si[w]] > L[w]):
                continue
            x = si[top]
            ok = (L[x] == L[w] + 2
                  and g.label(si[w], w) == a_i
                  and g.label(x, top) == a_i
                  and g.label(x, si[w]) == R.positive_of(R.simple_reflection(i).act(alpha.coords)))
            if not ok:
                bad.append(f"diamond fails at w={g.name(w)}, alpha={alpha}, i={i}")
    return bad


def check_automorphisms(g: MomentGraph) -> list[str]:
    """Left multiplication by each simple reflection maps edges to edges."""
    R = g.system
    bad = []
    for i in range(1, R.rank + 1):
        perm = g.simple_action(i)
        s = R.simple_reflection(i)
        for e in g.edges:
            a, b = perm[e.src], perm[e.dst]
            lab = g.label(a, b) or g.label(b, a)
            if lab is None or lab != R.positive_of(s.act(e.label.coords)):
                bad.append(f"s{i} does not map edge {g.name(e.src)}->{g.name(e.dst)} to an edge")
    return bad


def check_delta_on_basis(g: MomentGraph) -> list[str]:
    """delta_i p_v = p_{s_i v} if [s_i v] < [v], else 0."""
    R = g.system
    basis = flowup_basis(g)
    bad = []
    zero = GkmClass.zero(g)
    for v, p in enumerate(basis.classes):
        for i in range(1, R.rank + 1):
            u = g.simple_action(i)[v]
            expected = basis.classes[u] if g.lengths[u] < g.lengths[v] else zero
            if delta(i, p) != expected:
                bad.append(f"delta_{i} p_{g.name(v)} is wrong")
    return bad


def check_action_formula(g: MomentGraph) -> list[str]:
    """s_i . p_w = p_w if [s_i w] >= [w], else p_w - a_i p_{s_i w}.

    Read pointwise this is p_w(v) = s_i(p_w(s_i v)) + [s_i w < w] a_i p_{s_i w}(v);
    at v = s_i w above w it gives p_w(s_i w) = s_i(p_w(w)).
    """
    R = g.system
    basis = flowup_basis(g)
    bad = []
    for w, p in enumerate(basis.classes):
        for i in range(1, R.rank + 1):
            s = R.simple_reflection(i)
            u = g.simple_action(i)[w]
            moved = weyl_act(s, p)
            if g.lengths[u] < g.lengths[w]:
                expected = p - basis.classes[u] * R.simple_roots[i - 1].to_poly()
            else:
                expected = p
            if moved != expected:
                bad.append(f"s{i} . p_{g.name(w)} is wrong")
            elif g.lengths[u] > g.lengths[w] and p.values[u] != p.values[w].substitute_signed(s.images):
                bad.append(f"value of p_{g.name(w)} at s{i}w is not s{i} of its own value")
    return bad


def coxeter_matrix(R: RootSystem) -> dict[tuple[int, int], int]:
    out = {}
    for i in range(1, R.rank + 1):
        for j in range(i + 1, R.rank + 1):
            x = R.simple_reflection(i) * R.simple_reflection(j)
            m, y = 1, x
            while not y.is_identity:
                y = y * x
                m += 1
            out[(i, j)] = m
    return out


def monomials(n: int, max_degree: int) -> list[Polynomial]:
    out = []
    for d in range(max_degree + 1):
        for combo in combinations_with_replacement(range(n), d):
            exps = [0] * n
            for k in combo:
                exps[k] += 1
            out.append(Polynomial(n, {tuple(exps): 1}))
    return out


def check_nilcoxeter(g: MomentGraph, max_degree: int = 3,
                     stop: Callable[[], bool] | None = None) -> list[str]:
    """delta_i^2 = 0 and the braid relations on every m * p_v, deg m <= max_degree.

    ``stop`` is polled between basis classes; when it returns True the
    check raises TimeoutError.
    """
    R = g.system
    basis = flowup_basis(g)
    braid = coxeter_matrix(R)
    bad = []
    for v, p in enumerate(basis.classes):
        if stop is not None and stop():
            raise TimeoutError(f"stopped before p_{g.name(v)}")
        for m in monomials(R.ambient_dim, max_degree):
            q = p * m
            memo: dict[tuple[int, ...], GkmClass] = {(): q}

            def run(word: tuple[int, ...]) -> GkmClass:
                hit = memo.get(word)
                if hit is None:
                    hit = memo[word] = delta(word[-1], run(word[:-1]))
                return hit

            for i in range(1, R.rank + 1):
                if not run((i, i)).is_zero:
                    bad.append(f"delta_{i}^2 != 0 on {m} p_{g.name(v)}")
            for (i, j), mij in braid.items():
                left = tuple(i if k % 2 == 0 else j for k in range(mij))
                right = tuple(j if k % 2 == 0 else i for k in range(mij))
                if run(left) != run(right):
                    bad.append(f"braid relation ({i},{j}) fails on {m} p_{g.name(v)}")
    return bad


def random_polynomial(rng: random.Random, n: int, max_degree: int = 3, terms: int = 4) -> Polynomial:
    out = Polynomial.zero(n)
    for _ in range(terms):
        d = rng.randint(0, max_degree)
        exps = [0] * n
        for _ in range(d):
            exps[rng.randrange(n)] += 1
        out = out + Polynomial(n, {tuple(exps): rng.randint(-5, 5)})
    return out


def check_leibniz(g: MomentGraph, samples: int = 50, seed: int = 0) -> list[str]:
    """delta_i(c p_v) = (d_i c) p_v + (s_i c) delta_i p_v on random (c, v, i)."""
    R = g.system
    rng = random.Random(seed)
    basis = flowup_basis(g)
    bad = []
    for _ in range(samples):
        c = random_polynomial(rng, R.ambient_dim)
        v = rng.randrange(len(g.vertices))
        i = rng.randint(1, R.rank)
        p = basis.classes[v]
        s = R.simple_reflection(i)
        lhs = delta(i, p * c)
        rhs = p * bgg_partial(i, c, R) + delta(i, p) * c.substitute_signed(s.images)
        if lhs != rhs:
            bad.append(f"Leibniz fails for c={c}, v={g.name(v)}, i={i}")
    return bad


def random_reduced_word(w, rng: random.Random) -> tuple[int, ...]:
    """Strip a random right descent until nothing is left."""
    R = w.system
    word = []
    while not w.is_identity:
        i = rng.choice(sorted(R.right_descents(w)))
        word.append(i)
        w = w * R.simple_reflection(i)
    return tuple(reversed(word))


def check_billey_words(R: RootSystem, J, samples: int = 50, seed: int = 0) -> list[str]:
    """Localizations agree for two random reduced words of v."""
    rng = random.Random(seed)
    reps = R.minimal_reps(J)
    bad = []
    for _ in range(samples):
        w = rng.choice(reps)
        v = rng.choice(reps)
        b1, b2 = random_reduced_word(v, rng), random_reduced_word(v, rng)
        if billey_localize(w, v, b1) != billey_localize(w, v, b2):
            bad.append(f"localization of {w} at {v} depends on the word")
    return bad


def check_coset_constancy(R: RootSystem, J) -> list[str]:
    """On G/B, p_w(v u) = p_w(v) for w in W^J and u in W_J."""
    full = moment_graph(R, ())
    basis = flowup_basis(full)
    sub = R.parabolic_subgroup(J)
    cosets = []
    seen: set[int] = set()
    for v, c in enumerate(full.vertices):
        if v not in seen:
            members = [full.vertex_id(c.min_rep * u) for u in sub]
            seen.update(members)
            cosets.append(members)
    bad = []
    for w in R.minimal_reps(J):
        vals = basis[w].values
        for members in cosets:
            first = vals[members[0]]
            if any(vals[x] != first for x in members):
                bad.append(f"p_{w} is not constant on the coset of {full.name(members[0])}")
    return bad


def check_restriction(R: RootSystem, J) -> list[str]:
    """G/B classes of W^J restricted to W^J vertices give the G/P basis."""
    full = moment_graph(R, ())
    g = moment_graph(R, J)
    fb = flowup_basis(full)
    pb = flowup_basis(g)
    bad = []
    for w, c in enumerate(g.vertices):
        big = fb[c.min_rep]
        restricted = [big.values[full.vertex_id(x.min_rep)] for x in g.vertices]
        if tuple(restricted) != pb.classes[w].values:
            bad.append(f"restriction of p_{c} differs from the G/P class")
    return bad


def check_generation(g: MomentGraph) -> list[str]:
    return [] if generate_from_top(g) == flowup_basis(g) else ["generated basis differs"]


def graph_checks(R: RootSystem, J, nilcoxeter_degree: int = 3, samples: int = 50) -> dict[str, Callable[[], list[str]]]:
    g = moment_graph(R, J)
    return {
        "flow-up basis": lambda: check_basis(g),
        "out-degree and labels": lambda: check_edges(g),
        "diamonds": lambda: check_diamonds(g),
        "graph automorphisms": lambda: check_automorphisms(g),
        "delta on basis": lambda: check_delta_on_basis(g),
        "action formula": lambda: check_action_formula(g),
        "nil-Coxeter relations": lambda: check_nilcoxeter(g, nilcoxeter_degree),
        "Leibniz": lambda: check_leibniz(g, samples),
        "Billey word independence": lambda: check_billey_words(R, J, samples),
        "left-coset constancy": lambda: check_coset_constancy(R, J),
        "restriction": lambda: check_restriction(R, J),
        "generation from top": lambda: check_generation(g),
    }


def small_systems(max_order: int = 384) -> list[RootSystem]:
    out = []
    for family, start in (("A", 1), ("B", 2), ("C", 2), ("D", 4)):
        rank = start
        while True:
            R = build_root_system(family, rank)
            if R.order > max_order:
                break
            out.append(R)
            rank += 1
    return out


def all_parabolics(R: RootSystem) -> list[tuple[int, ...]]:
    idx = range(1, R.rank + 1)
    return [J for k in range(R.rank + 1) for J in combinations(idx, k)]


# the checks run by run_suite; the other entries of graph_checks are extras
SUITE_CHECKS = (
    "flow-up basis", "out-degree and labels", "diamonds", "delta on basis", "Leibniz",
    "Billey word independence", "left-coset constancy", "restriction", "generation from top",
)


@dataclass
class SuiteResult:
    failures: list[str] = field(default_factory=list)
    completed: list[str] = field(default_factory=list)
    skipped: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures and not self.skipped


def run_suite(max_order: int = 384, deadline: float | None = None, nilcoxeter_degree: int = 3,
              samples: int = 50, log: Callable[[str], None] | None = None) -> SuiteResult:
    """Every check on every (W, J) with |W| <= max_order.

    The nil-Coxeter pass, by far the most expensive, runs last, smallest graphs
    first; whatever does not fit before ``deadline`` seconds is listed
    in ``skipped``.
    """
    start = time.monotonic()
    result = SuiteResult()
    cases = [(R, J) for R in small_systems(max_order) for J in all_parabolics(R)]

    def over() -> bool:
        return deadline is not None and time.monotonic() - start > deadline

    for R, J in cases:
        tag = f"{R.name} J={list(J)}"
        if over():
            result.skipped.append(f"{tag}: basic checks")
            continue
        for name, fn in graph_checks(R, J, nilcoxeter_degree, samples).items():
            if name not in SUITE_CHECKS:
                continue
            result.failures += [f"{tag} {name}: {msg}" for msg in fn()]
        if log:
            log(f"{tag}: basic checks done")
    # cost grows with the number of vertices, not with |W|
    cases.sort(key=lambda c: (len(moment_graph(*c).vertices), c[0].order))
    for R, J in cases:
        tag = f"{R.name} J={list(J)}"
        if over():
            result.skipped.append(f"{tag}: nil-Coxeter relations")
            continue
        try:
            bad = check_nilcoxeter(moment_graph(R, J), nilcoxeter_degree, over)
        except TimeoutError:
            result.skipped.append(f"{tag}: nil-Coxeter relations (interrupted)")
            continue
        result.failures += [f"{tag} nil-Coxeter: {msg}" for msg in bad]
        result.completed.append(tag)
        if log:
            log(f"{tag}: nil-Coxeter done")
    result.seconds = time.monotonic() - start
    return result
