"""Finite k-graphs presented by a coloured 1-skeleton and commuting squares.

A path is stored in normal form: its edge list sorted by colour (nondecreasing).
Composition concatenates and then bubble-sorts adjacent colour inversions using
the squares; segmentation reorders the edges so the requested piece is contiguous.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import (CubeInconsistency, DegreeOutOfRange, DuplicateId, EmptyGraph,
                     EndpointMismatch, InvalidSkeleton, InvalidSquare, MissingSquare,
                     NonBijectiveSquare, NotComposable, ParseError, UnknownPath)

Degree = tuple[int, ...]

_IDENT = re.compile(r"[A-Za-z0-9_]+\Z")


# ---------------------------------------------------------------- degrees

def dzero(k: int) -> Degree:
    return (0,) * k


def djoin(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(max(a, b) for a, b in zip(m, n))


def dmeet(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(min(a, b) for a, b in zip(m, n))


def dleq(m: Sequence[int], n: Sequence[int]) -> bool:
    return all(a <= b for a, b in zip(m, n))


def dadd(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(a + b for a, b in zip(m, n))


def dsub(m: Sequence[int], n: Sequence[int]) -> Degree:
    return tuple(a - b for a, b in zip(m, n))


def dbelow(n: Sequence[int]) -> Iterator[Degree]:
    """All degrees m with 0 <= m <= n, in lexicographic order."""
    return product(*(range(x + 1) for x in n))


def parse_degree(text: str) -> Degree:
    try:
        out = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"bad degree {text!r}") from None
    if any(x < 0 for x in out):
        raise ParseError(f"negative degree {text!r}")
    return out


# ---------------------------------------------------------------- data types

@dataclass(frozen=True)
class Edge:
    id: str
    color: int
    range: str
    source: str
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Skeleton:
    k: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    vertex_lines: tuple[int | None, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class Square:
    """Relation ``left[0] left[1] == right[0] right[1]``; left is colour i then j, i < j."""
    left: tuple[str, str]
    right: tuple[str, str]
    line: int | None = field(default=None, compare=False)


@dataclass(frozen=True)
class FactorizationRule:
    squares: tuple[Square, ...]


@dataclass(frozen=True)
class Path:
    range: str
    source: str
    degree: Degree
    edges: tuple[str, ...]
    graph: "KGraph | None" = field(default=None, compare=False, repr=False, hash=False)

    @property
    def key(self):
        return (sum(self.degree), self.degree, self.edges, self.range)

    def __lt__(self, other: "Path") -> bool:
        return self.key < other.key

    def is_vertex(self) -> bool:
        return not self.edges

    @property
    def label(self) -> str:
        return ".".join(self.edges) if self.edges else self.range

    def __str__(self) -> str:
        return self.label


def labels(paths: Iterable[Path]) -> list[str]:
    return [p.label for p in sorted(paths)]


# ---------------------------------------------------------------- the graph

class KGraph:
    """A validated finite k-graph. Construct with :func:`validate_kgraph`."""

    def __init__(self, skeleton: Skeleton, rules: FactorizationRule, name: str = ""):
        self.skeleton = skeleton
        self.rules = rules
        self.k = skeleton.k
        self.name = name
        self.vertices: tuple[str, ...] = tuple(sorted(skeleton.vertices))
        self.edges: dict[str, Edge] = {e.id: e for e in skeleton.edges}
        self._fwd: dict[tuple[str, str], tuple[str, str]] = {}
        self._bwd: dict[tuple[str, str], tuple[str, str]] = {}
        for sq in rules.squares:
            self._fwd[sq.left] = sq.right
            self._bwd[sq.right] = sq.left
        self._by_color_range: dict[tuple[int, str], list[Edge]] = {}
        for e in sorted(skeleton.edges, key=lambda e: e.id):
            self._by_color_range.setdefault((e.color, e.range), []).append(e)
        self._compose_cache: dict = {}
        self._degree_cache: dict = {}

    def __repr__(self) -> str:
        return f"KGraph(k={self.k}, vertices={len(self.vertices)}, edges={len(self.edges)})"

    # -- construction of paths
    def vertex(self, v: str) -> Path:
        if v not in self.skeleton.vertices:
            raise UnknownPath(f"unknown vertex {v!r}")
        return Path(v, v, dzero(self.k), (), self)

    def edge(self, e: str) -> Path:
        if e not in self.edges:
            raise UnknownPath(f"unknown edge {e!r}")
        ed = self.edges[e]
        deg = tuple(1 if i + 1 == ed.color else 0 for i in range(self.k))
        return Path(ed.range, ed.source, deg, (e,), self)

    def path(self, ids: Sequence[str]) -> Path:
        """Compose a sequence of edge ids (or a single vertex id) into normal form."""
        if len(ids) == 1 and ids[0] in self.skeleton.vertices:
            return self.vertex(ids[0])
        if not ids:
            raise UnknownPath("empty path literal")
        out = self.edge(ids[0])
        for e in ids[1:]:
            out = self.compose(out, self.edge(e))
        return out

    def parse_path(self, literal: str) -> Path:
        return self.path([t for t in literal.strip().split(".") if t])

    def parse_paths(self, literal: str) -> list[Path]:
        return [self.parse_path(t) for t in literal.split(",") if t.strip()]

    def color(self, e: str) -> int:
        return self.edges[e].color

    def _make(self, seq: Sequence[str]) -> Path:
        deg = [0] * self.k
        for e in seq:
            deg[self.edges[e].color - 1] += 1
        return Path(self.edges[seq[0]].range, self.edges[seq[-1]].source,
                    tuple(deg), tuple(seq), self)

    # -- rewriting
    def _swap(self, x: str, y: str) -> tuple[str, str]:
        """Rewrite the 2-path x y into the equal 2-path with the colours exchanged."""
        table = self._fwd if self.color(x) < self.color(y) else self._bwd
        try:
            return table[(x, y)]
        except KeyError:
            raise MissingSquare(f"no square rewrites {x} {y}", witness=[x, y]) from None

    def normalize(self, seq: Sequence[str]) -> tuple[str, ...]:
        out = list(seq)
        changed = True
        while changed:
            changed = False
            for i in range(len(out) - 1):
                if self.color(out[i]) > self.color(out[i + 1]):
                    out[i], out[i + 1] = self._swap(out[i], out[i + 1])
                    changed = True
        return tuple(out)

    def reorder(self, seq: Sequence[str], colors: Sequence[int]) -> list[str]:
        """Rewrite an edge sequence so its colour word becomes ``colors``."""
        out = list(seq)
        for p, col in enumerate(colors):
            q = next(i for i in range(p, len(out)) if self.color(out[i]) == col)
            while q > p:
                out[q - 1], out[q] = self._swap(out[q - 1], out[q])
                q -= 1
        return out

    def compose(self, mu: Path, nu: Path) -> Path:
        if mu.source != nu.range:
            raise NotComposable(f"s({mu.label})={mu.source} but r({nu.label})={nu.range}",
                                witness=[mu.label, nu.label])
        if not mu.edges:
            return nu
        if not nu.edges:
            return mu
        key = (mu.edges, nu.edges)
        hit = self._compose_cache.get(key)
        if hit is None:
            hit = self._make(self.normalize(mu.edges + nu.edges))
            self._compose_cache[key] = hit
        return hit

    def segment(self, lam: Path, m: Sequence[int], n: Sequence[int]) -> Path:
        m, n = tuple(m), tuple(n)
        if not (len(m) == len(n) == self.k and dleq(dzero(self.k), m)
                and dleq(m, n) and dleq(n, lam.degree)):
            raise DegreeOutOfRange(f"need 0 <= {m} <= {n} <= {lam.degree}",
                                   witness=[lam.label, list(m), list(n)])
        if not lam.edges:
            return lam
        word = []
        for part in (m, dsub(n, m), dsub(lam.degree, n)):
            for c, cnt in enumerate(part):
                word.extend([c + 1] * cnt)
        seq = self.reorder(lam.edges, word)
        a, b = sum(m), sum(n)
        if a == b:
            v = lam.range if a == 0 else self.edges[seq[a - 1]].source
            return self.vertex(v)
        return self._make(seq[a:b])

    def prefix(self, lam: Path, n: Sequence[int]) -> Path:
        return self.segment(lam, dzero(self.k), n)

    def has_prefix(self, lam: Path, mu: Path) -> bool:
        """True iff lam = mu alpha for some alpha."""
        if lam.range != mu.range or not dleq(mu.degree, lam.degree):
            return False
        return self.prefix(lam, mu.degree) == mu

    # -- enumeration
    def paths_of_degree(self, n: Sequence[int], v: str | None = None) -> tuple[Path, ...]:
        n = tuple(n)
        key = (n, v)
        hit = self._degree_cache.get(key)
        if hit is not None:
            return hit
        starts = self.vertices if v is None else (v,)
        word = [c + 1 for c, cnt in enumerate(n) for _ in range(cnt)]
        out: list[Path] = []
        for start in starts:
            if not word:
                out.append(self.vertex(start))
                continue
            stack: list[tuple[str, tuple[str, ...]]] = [(start, ())]
            while stack:
                cur, seq = stack.pop()
                if len(seq) == len(word):
                    out.append(self._make(seq))
                    continue
                for e in reversed(self._by_color_range.get((word[len(seq)], cur), [])):
                    stack.append((e.source, seq + (e.id,)))
        res = tuple(sorted(out))
        self._degree_cache[key] = res
        return res

    def paths_up_to(self, D: Sequence[int], v: str | None = None) -> tuple[Path, ...]:
        out: list[Path] = []
        for n in dbelow(D):
            out.extend(self.paths_of_degree(n, v))
        return tuple(sorted(out))

    def extensions(self, mu: Path, n: Sequence[int]) -> tuple[Path, ...]:
        """All paths of degree n having mu as initial segment."""
        if not dleq(mu.degree, n):
            return ()
        return tuple(sorted(self.compose(mu, a)
                            for a in self.paths_of_degree(dsub(n, mu.degree), mu.source)))

    def reachable_from(self, vs: Iterable[str]) -> set[str]:
        """All w with v Lambda w nonempty for some v in vs."""
        seen = set(vs)
        todo = list(seen)
        out_edges: dict[str, list[str]] = {}
        for e in self.edges.values():
            out_edges.setdefault(e.range, []).append(e.source)
        while todo:
            v = todo.pop()
            for w in out_edges.get(v, ()):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    # -- serialisation
    def to_text(self) -> str:
        lines = [f"k {self.k}"]
        lines += [f"vertex {v}" for v in self.vertices]
        for e in sorted(self.edges.values(), key=lambda e: e.id):
            lines.append(f"edge {e.id} {e.color} {e.range} {e.source}")
        for sq in sorted(self.rules.squares, key=lambda s: s.left):
            lines.append(f"square {sq.left[0]} {sq.left[1]} = {sq.right[0]} {sq.right[1]}")
        return "\n".join(lines) + "\n"

    def describe(self) -> dict:
        return {
            "k": self.k,
            "vertices": list(self.vertices),
            "edges": [[e.id, e.color, e.range, e.source]
                      for e in sorted(self.edges.values(), key=lambda e: e.id)],
            "squares": [[*sq.left, *sq.right]
                        for sq in sorted(self.rules.squares, key=lambda s: s.left)],
        }


# ---------------------------------------------------------------- module API

def compose(mu: Path, nu: Path) -> Path:
    return mu.graph.compose(mu, nu)


def segment(lam: Path, m: Sequence[int], n: Sequence[int]) -> Path:
    return lam.graph.segment(lam, m, n)


def paths_of_degree(g: KGraph, n: Sequence[int], v: str | None = None) -> tuple[Path, ...]:
    return g.paths_of_degree(n, v)


def paths_up_to(g: KGraph, D: Sequence[int]) -> tuple[Path, ...]:
    return g.paths_up_to(D)


# ---------------------------------------------------------------- validation

def validate_kgraph(skeleton: Skeleton, rules: FactorizationRule, name: str = "") -> KGraph:
    k = skeleton.k
    if k < 1:
        raise InvalidSkeleton(f"rank must be >= 1, got {k}")
    if not skeleton.vertices:
        raise EmptyGraph("graph has no vertices")
    seen: set[str] = set()
    lines = skeleton.vertex_lines or (None,) * len(skeleton.vertices)
    for v, ln in zip(skeleton.vertices, lines):
        if v in seen:
            raise DuplicateId(f"duplicate id {v!r}", line=ln)
        seen.add(v)
    for e in skeleton.edges:
        if e.id in seen:
            raise DuplicateId(f"duplicate id {e.id!r}", line=e.line)
        seen.add(e.id)
        if not 1 <= e.color <= k:
            raise InvalidSkeleton(f"edge {e.id} has colour {e.color} outside 1..{k}", line=e.line)
        for v in (e.range, e.source):
            if v not in skeleton.vertices:
                raise InvalidSkeleton(f"edge {e.id} uses unknown vertex {v!r}", line=e.line)

    edges = {e.id: e for e in skeleton.edges}
    fwd: dict[tuple[str, str], Square] = {}
    bwd: dict[tuple[str, str], Square] = {}
    for sq in rules.squares:
        a, b = sq.left
        c, d = sq.right
        for x in (a, b, c, d):
            if x not in edges:
                raise InvalidSquare(f"square uses unknown edge {x!r}", line=sq.line)
        ea, eb, ec, ed = edges[a], edges[b], edges[c], edges[d]
        if not (ea.color == ed.color < eb.color == ec.color):
            raise InvalidSquare(
                f"square {a} {b} = {c} {d} must read colour i,j = colour j,i with i < j",
                line=sq.line)
        if ea.source != eb.range or ec.source != ed.range:
            raise EndpointMismatch(f"square {a} {b} = {c} {d} has a non-composable side",
                                   line=sq.line, witness=[a, b, c, d])
        if ea.range != ec.range or eb.source != ed.source:
            raise EndpointMismatch(f"square {a} {b} = {c} {d} does not preserve endpoints",
                                   line=sq.line, witness=[a, b, c, d])
        if sq.left in fwd:
            raise NonBijectiveSquare(f"2-path {a} {b} is rewritten twice", line=sq.line,
                                     witness=[a, b])
        if sq.right in bwd:
            raise NonBijectiveSquare(f"2-path {c} {d} is the image of both "
                                     f"{' '.join(bwd[sq.right].left)} and {a} {b}",
                                     line=sq.line, witness=[c, d])
        fwd[sq.left] = sq
        bwd[sq.right] = sq

    by_range: dict[str, list[Edge]] = {}
    for e in sorted(skeleton.edges, key=lambda e: e.id):
        by_range.setdefault(e.range, []).append(e)
    for x in sorted(edges.values(), key=lambda e: e.id):
        for y in by_range.get(x.source, []):
            if x.color < y.color and (x.id, y.id) not in fwd:
                raise MissingSquare(f"no square for the 2-path {x.id} {y.id}",
                                    witness=[x.id, y.id])
            if x.color > y.color and (x.id, y.id) not in bwd:
                raise NonBijectiveSquare(f"2-path {x.id} {y.id} is not the image of any square",
                                         witness=[x.id, y.id])

    g = KGraph(skeleton, rules, name)
    if k >= 3:
        _check_cubes(g, by_range)
    return g


def _check_cubes(g: KGraph, by_range: dict[str, list[Edge]]) -> None:
    def step(seq: list[str], i: int) -> list[str]:
        out = list(seq)
        out[i], out[i + 1] = g._swap(out[i], out[i + 1])
        return out

    for x in sorted(g.edges.values(), key=lambda e: e.id):
        for y in by_range.get(x.source, []):
            if y.color <= x.color:
                continue
            for z in by_range.get(y.source, []):
                if z.color <= y.color:
                    continue
                seq = [x.id, y.id, z.id]
                one = step(step(step(seq, 0), 1), 0)
                two = step(step(step(seq, 1), 0), 1)
                if one != two:
                    raise CubeInconsistency(
                        f"3-path {' '.join(seq)} reverses to {' '.join(one)} "
                        f"or {' '.join(two)} depending on rewrite order",
                        witness=seq)


# ---------------------------------------------------------------- parser

def parse_kgraph(text: str, name: str = "<string>") -> KGraph:
    """Parse and validate a graph description."""
    k: int | None = None
    vertices: list[str] = []
    vlines: list[int] = []
    edges: list[Edge] = []
    squares: list[Square] = []
    ids: dict[str, int] = {}

    def ident(tok: str, ln: int, col: int) -> str:
        if not _IDENT.match(tok):
            raise ParseError(f"bad identifier {tok!r}", line=ln, column=col)
        return tok

    def declare(tok: str, ln: int, col: int) -> None:
        if tok in ids:
            raise DuplicateId(f"duplicate id {tok!r} (first declared on line {ids[tok]})",
                              line=ln, column=col)
        ids[tok] = ln

    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", body)]
        if not toks:
            continue
        head, col0 = toks[0]
        words = [t for t, _ in toks]
        if head == "k":
            if len(toks) != 2:
                raise ParseError("expected: k <rank>", line=ln, column=col0)
            if k is not None:
                raise ParseError("rank declared twice", line=ln, column=col0)
            try:
                k = int(words[1])
            except ValueError:
                raise ParseError(f"bad rank {words[1]!r}", line=ln, column=toks[1][1]) from None
        elif head == "vertex":
            if len(toks) != 2:
                raise ParseError("expected: vertex <id>", line=ln, column=col0)
            v = ident(words[1], ln, toks[1][1])
            declare(v, ln, toks[1][1])
            vertices.append(v)
            vlines.append(ln)
        elif head == "edge":
            if len(toks) != 5:
                raise ParseError("expected: edge <id> <color> <range> <source>",
                                 line=ln, column=col0)
            e = ident(words[1], ln, toks[1][1])
            declare(e, ln, toks[1][1])
            try:
                c = int(words[2])
            except ValueError:
                raise ParseError(f"bad colour {words[2]!r}", line=ln, column=toks[2][1]) from None
            edges.append(Edge(e, c, ident(words[3], ln, toks[3][1]),
                              ident(words[4], ln, toks[4][1]), line=ln))
        elif head == "square":
            if len(toks) != 6 or words[3] != "=":
                raise ParseError("expected: square <e> <f> = <f'> <e'>", line=ln, column=col0)
            for i in (1, 2, 4, 5):
                ident(words[i], ln, toks[i][1])
            squares.append(Square((words[1], words[2]), (words[4], words[5]), line=ln))
        else:
            raise ParseError(f"unknown directive {head!r}", line=ln, column=col0)
    if k is None:
        raise ParseError("missing rank declaration 'k <rank>'")
    skel = Skeleton(k, tuple(vertices), tuple(edges), tuple(vlines))
    return validate_kgraph(skel, FactorizationRule(tuple(squares)), name)


def load_kgraph(path: str) -> KGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_kgraph(fh.read(), name=str(path))


def build_kgraph(k: int, vertices: Iterable[str], edges: Iterable[tuple],
                 squares: Iterable[tuple] = ()) -> KGraph:
    """Programmatic constructor: edges as (id, color, range, source), squares as (e, f, f2, e2)."""
    skel = Skeleton(k, tuple(vertices), tuple(Edge(*e) for e in edges))
    rules = FactorizationRule(tuple(Square((a, b), (c, d)) for a, b, c, d in squares))
    return validate_kgraph(skel, rules)
