"""Sparse complex operators on a degree-truncated path space."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .kgraph import Degree, KGraph, Path, dleq, dsub


class TruncatedSpace:
    """Span of the basis vectors xi_alpha for all paths alpha with d(alpha) <= D.

    The basis is ordered by total degree, then degree, then edge list. The safe
    interior for margin M is the set of alpha with d(alpha) + M <= D.
    """

    def __init__(self, graph: KGraph, D: Sequence[int], margin: Sequence[int] | None = None):
        self.graph = graph
        self.D = tuple(D)
        self.margin = tuple(margin) if margin is not None else tuple(0 for _ in D)
        self.basis: tuple[Path, ...] = graph.paths_up_to(self.D)
        self.index = {p: i for i, p in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._interior: dict[Degree, tuple[int, ...]] = {}

    def interior(self, margin: Sequence[int] | None = None) -> tuple[int, ...]:
        m = self.margin if margin is None else tuple(margin)
        hit = self._interior.get(m)
        if hit is None:
            if any(x < 0 for x in dsub(self.D, m)):
                hit = ()
            else:
                top = dsub(self.D, m)
                hit = tuple(i for i, p in enumerate(self.basis) if dleq(p.degree, top))
            self._interior[m] = hit
        return hit

    def degree_of(self, i: int) -> Degree:
        return self.basis[i].degree


class SparseOperator:
    """A finite matrix stored as {(row, col): value}; exact zeros are not stored."""

    __slots__ = ("dim", "entries")

    def __init__(self, dim: int, entries: dict[tuple[int, int], complex] | None = None):
        self.dim = dim
        self.entries = {k: v for k, v in (entries or {}).items() if v != 0}

    @classmethod
    def zero(cls, dim: int) -> "SparseOperator":
        return cls(dim)

    @classmethod
    def diagonal(cls, dim: int, values: dict[int, complex]) -> "SparseOperator":
        return cls(dim, {(i, i): v for i, v in values.items()})

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, 0) + v
        return SparseOperator(self.dim, out)

    def __neg__(self) -> "SparseOperator":
        return SparseOperator(self.dim, {k: -v for k, v in self.entries.items()})

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return self + (-other)

    def __mul__(self, z: complex) -> "SparseOperator":
        return SparseOperator(self.dim, {k: z * v for k, v in self.entries.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        by_col: dict[int, list[tuple[int, complex]]] = {}
        for (i, k), a in self.entries.items():
            by_col.setdefault(k, []).append((i, a))
        out: dict[tuple[int, int], complex] = {}
        for (k, j), b in other.entries.items():
            for i, a in by_col.get(k, ()):
                out[(i, j)] = out.get((i, j), 0) + a * b
        return SparseOperator(self.dim, out)

    def adjoint(self) -> "SparseOperator":
        return SparseOperator(self.dim, {(j, i): v.conjugate() for (i, j), v in self.entries.items()})

    @property
    def H(self) -> "SparseOperator":
        return self.adjoint()

    def apply(self, vec: dict[int, complex]) -> dict[int, complex]:
        out: dict[int, complex] = {}
        for (i, j), a in self.entries.items():
            if j in vec:
                out[i] = out.get(i, 0) + a * vec[j]
        return {i: v for i, v in out.items() if v != 0}

    def column(self, j: int) -> dict[int, complex]:
        return {i: v for (i, jj), v in self.entries.items() if jj == j}

    def max_abs(self, cols: Iterable[int] | None = None) -> float:
        if cols is None:
            return max((abs(v) for v in self.entries.values()), default=0.0)
        cs = set(cols)
        return max((abs(v) for (i, j), v in self.entries.items() if j in cs), default=0.0)

    def restrict_columns(self, cols: Iterable[int]) -> "SparseOperator":
        cs = set(cols)
        return SparseOperator(self.dim, {k: v for k, v in self.entries.items() if k[1] in cs})

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for (i, j), v in self.entries.items():
            out[i, j] = v
        return out

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "entries": [[i, j, v.real, v.imag] for (i, j), v in sorted(self.entries.items())]}

    def __repr__(self) -> str:
        return f"SparseOperator(dim={self.dim}, nnz={len(self.entries)})"


def residual(a: SparseOperator, b: SparseOperator, cols: Iterable[int] | None = None) -> float:
    """max |<xi_beta | (a - b) xi_alpha>| over alpha in cols and every beta."""
    return (a - b).max_abs(cols)


def total(ops: Iterable[SparseOperator], dim: int) -> SparseOperator:
    out = SparseOperator.zero(dim)
    for op in ops:
        out = out + op
    return out
