"""Rays with exact coordinates, orthogonality contexts and KS colorings.

Coordinates live in Q(√2): every entry is ``a + b√2`` with rational
``a`` and ``b``, so orthogonality is decided exactly. Only
:func:`spectral_algebra` works in floating point.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import networkx as nx
import numpy as np

from .lattice import BlockStructure
from .valuation import SearchOutcome, default_node_cap


class VectorSetError(ValueError):
    pass


class Surd:
    """Exact number ``a + b*sqrt(2)`` with rational parts."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def coerce(cls, x) -> Surd:
        return x if isinstance(x, Surd) else cls(x)

    @classmethod
    def parse(cls, x) -> Surd:
        """Accept ints, ``[a, b]`` pairs, or strings such as ``"1-√2"``, ``"1/2+3√2"``."""
        if isinstance(x, Surd):
            return x
        if isinstance(x, bool):
            raise VectorSetError(f"bad coordinate {x!r}")
        if isinstance(x, int):
            return cls(x)
        if isinstance(x, (list, tuple)) and len(x) == 2:
            return cls(_fraction(x[0]), _fraction(x[1]))
        if isinstance(x, str):
            return _parse_surd(x)
        raise VectorSetError(f"bad coordinate {x!r}")

    def __add__(self, o):
        o = Surd.coerce(o)
        return Surd(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-Surd.coerce(o))

    def __mul__(self, o):
        o = Surd.coerce(o)
        return Surd(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = Surd(o)
        if not isinstance(o, Surd):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __float__(self):
        return float(self.a) + float(self.b) * 2**0.5

    def __repr__(self):
        return f"Surd({self.a}, {self.b})"

    def __str__(self):
        if not self.b:
            return str(self.a)
        rad = "√2" if self.b == 1 else "-√2" if self.b == -1 else f"{self.b}√2"
        if not self.a:
            return rad
        return f"{self.a}{'' if rad.startswith('-') else '+'}{rad}"

    def to_doc(self):
        """Integer when possible, otherwise an ``[a, b]`` pair."""
        if not self.b and self.a.denominator == 1:
            return int(self.a)
        return [_fraction_doc(self.a), _fraction_doc(self.b)]


def _fraction(x) -> Fraction:
    try:
        return Fraction(x)
    except (TypeError, ValueError):
        raise VectorSetError(f"bad rational {x!r}") from None


def _fraction_doc(f: Fraction):
    return int(f) if f.denominator == 1 else str(f)


_TERM = re.compile(r"([+-]?)(\d+(?:/\d+)?)?(\*?(?:√2|sqrt2|sqrt\(2\)))?")


def _parse_surd(text: str) -> Surd:
    s = text.replace(" ", "")
    if not s:
        raise VectorSetError("empty coordinate")
    total = Surd()
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or not (m.group(2) or m.group(3)):
            raise VectorSetError(f"bad coordinate {text!r}")
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(1) == "-":
            coef = -coef
        total = total + (Surd(0, coef) if m.group(3) else Surd(coef))
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise VectorSetError(f"bad coordinate {text!r}")
    return total


def inner(u: Sequence[Surd], v: Sequence[Surd]) -> Surd:
    total = Surd()
    for x, y in zip(u, v):
        total = total + x * y
    return total


def proportional(u: Sequence[Surd], v: Sequence[Surd]) -> bool:
    return all(u[i] * v[j] == u[j] * v[i] for i, j in itertools.combinations(range(len(u)), 2))


@dataclass(frozen=True)
class VectorSet:
    dimension: int
    rays: tuple[tuple[Surd, ...], ...]
    labels: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        if self.dimension < 2:
            raise VectorSetError("dimension must be at least 2")
        if len(self.labels) != len(self.rays):
            raise VectorSetError("one label per ray")
        if len(set(self.labels)) != len(self.labels):
            raise VectorSetError("ray labels must be unique")
        for lab, r in zip(self.labels, self.rays):
            if len(r) != self.dimension:
                raise VectorSetError(f"ray {lab} has {len(r)} coordinates, expected {self.dimension}")
            if not any(r):
                raise VectorSetError(f"ray {lab} is the zero vector")
        dups = [
            (self.labels[i], self.labels[j])
            for i, j in itertools.combinations(range(len(self.rays)), 2)
            if proportional(self.rays[i], self.rays[j])
        ]
        if dups:
            raise VectorSetError(f"duplicate rays (scalar multiples): {dups}")

    def __len__(self):
        return len(self.rays)

    def orthogonality_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self.rays)))
        for i, j in itertools.combinations(range(len(self.rays)), 2):
            if not inner(self.rays[i], self.rays[j]):
                g.add_edge(i, j)
        return g


def load_vector_set(doc: dict) -> VectorSet:
    """Build a :class:`VectorSet` from a mapping with ``dimension`` and ``rays``."""
    try:
        d = int(doc["dimension"])
        raw = doc["rays"]
    except (KeyError, TypeError, ValueError) as exc:
        raise VectorSetError(f"vector document needs dimension and rays: {exc}") from None
    labels, rays = [], []
    for k, item in enumerate(raw):
        if isinstance(item, dict):
            labels.append(str(item.get("label", f"r{k + 1}")))
            coords = item["coords"]
        else:
            labels.append(f"r{k + 1}")
            coords = item
        rays.append(tuple(Surd.parse(c) for c in coords))
    return VectorSet(d, tuple(rays), tuple(labels), name=str(doc.get("name", "")))


@dataclass(frozen=True)
class OrthoContext:
    rays: tuple[int, ...]
    complete: bool


def orthogonality_contexts(vs: VectorSet) -> list[OrthoContext]:
    """Maximal pairwise-orthogonal subsets, sorted by ray indices."""
    cliques = sorted(tuple(sorted(c)) for c in nx.find_cliques(vs.orthogonality_graph()))
    for c in cliques:
        if len(c) > vs.dimension:
            raise AssertionError(f"{len(c)} pairwise orthogonal rays in dimension {vs.dimension}")
    return [OrthoContext(c, len(c) == vs.dimension) for c in cliques]


@dataclass(frozen=True)
class Coloring:
    vectors: VectorSet
    assignment: tuple[int, ...]

    def labels(self) -> dict[str, int]:
        return dict(zip(self.vectors.labels, self.assignment))


def is_coloring(vs: VectorSet, assignment: Sequence[int], contexts: Sequence[OrthoContext] | None = None) -> bool:
    """Exactly one 1 per complete context and no orthogonal pair of 1s."""
    contexts = orthogonality_contexts(vs) if contexts is None else contexts
    if any(sum(assignment[r] for r in c.rays) != 1 for c in contexts if c.complete):
        return False
    return not any(assignment[i] and assignment[j] for i, j in vs.orthogonality_graph().edges)


def parity_obstruction(vs: VectorSet) -> bool:
    """True when an odd number of complete contexts each ray meets evenly.

    If every ray lies in an even number of complete contexts, any coloring
    has an even number of (context, 1-ray) incidences; an odd number of
    contexts each needing exactly one 1 then rules a coloring out. This
    is independent of any search.
    """
    complete = [c.rays for c in orthogonality_contexts(vs) if c.complete]
    incidence = [sum(r in c for c in complete) for r in range(len(vs))]
    return len(complete) % 2 == 1 and all(k % 2 == 0 for k in incidence)


def ks_coloring_search(vs: VectorSet, cap: int | None = None) -> SearchOutcome:
    """Backtracking over complete contexts, choosing the ray valued 1.

    Setting a ray to 1 forces every orthogonal ray to 0; a complete
    context whose rays are all 0 is a dead end. Rays left undecided at the
    end get 0.
    """
    cap = default_node_cap() if cap is None else cap
    contexts = orthogonality_contexts(vs)
    complete = [c.rays for c in contexts if c.complete]
    g = vs.orthogonality_graph()
    neigh = [sorted(g[i]) for i in range(len(vs))]
    in_ctx = [[k for k, c in enumerate(complete) if r in c] for r in range(len(vs))]
    value = [-1] * len(vs)
    nodes = 0

    def dead(changed: list[int]) -> bool:
        for r in changed:
            for k in in_ctx[r]:
                if all(value[s] == 0 for s in complete[k]):
                    return True
        return False

    def dfs(k: int) -> bool:
        nonlocal nodes
        while k < len(complete) and any(value[r] == 1 for r in complete[k]):
            k += 1
        if k == len(complete):
            return True
        for r in complete[k]:
            if value[r] != -1:
                continue
            nodes += 1
            if nodes > cap:
                raise _Cap
            value[r] = 1
            zeroed = [s for s in neigh[r] if value[s] == -1]
            for s in zeroed:
                value[s] = 0
            if not dead(zeroed) and dfs(k + 1):
                return True
            for s in zeroed:
                value[s] = -1
            value[r] = -1
        return False

    try:
        found = dfs(0)
    except _Cap:
        return SearchOutcome(False, None, cap, False)
    if not found:
        return SearchOutcome(False, None, nodes, True)
    coloring = Coloring(vs, tuple(max(v, 0) for v in value))
    if not is_coloring(vs, coloring.assignment, contexts):
        raise AssertionError("search produced an invalid coloring")
    return SearchOutcome(True, coloring, nodes, True)


class _Cap(Exception):
    pass


def blocks_from_vectors(vs: VectorSet, complete_only: bool = False) -> BlockStructure:
    """Block structure whose atoms are rays and whose blocks are contexts.

    Each incomplete maximal orthogonal set ``M`` is closed into a Boolean
    block by one extra atom ``perp(M)``, the orthocomplement of the span
    of ``M`` (a coarse eigenprojector). "Exactly one atom per block" then
    says "at most one ray of ``M``", so valuations of the blocks are
    exactly the colorings. With ``complete_only`` the set must consist of
    complete contexts alone, and any incomplete maximal set is rejected.
    """
    contexts = orthogonality_contexts(vs)
    incomplete = [c for c in contexts if not c.complete]
    if complete_only and incomplete:
        sample = [[vs.labels[r] for r in c.rays] for c in incomplete[:3]]
        raise VectorSetError(f"{len(incomplete)} incomplete maximal orthogonal sets, e.g. {sample}")
    atoms = list(vs.labels)
    blocks = []
    for c in contexts:
        blk = list(c.rays)
        if not c.complete:
            atoms.append("perp(" + ",".join(vs.labels[r] for r in c.rays) + ")")
            blk.append(len(atoms) - 1)
        blocks.append(blk)
    return BlockStructure(atoms, blocks, name=vs.name)


# -- spectral algebras ------------------------------------------------------------


class HermitianOperator:
    """A complex square matrix checked to be self-adjoint."""

    def __init__(self, matrix, tol: float = 1e-9):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        scale = max(1.0, float(np.abs(m).max()) if m.size else 1.0)
        err = float(np.abs(m - m.conj().T).max())
        if err > tol * scale:
            raise ValueError(f"operator is not Hermitian: max |M - M†| = {err:.3g}")
        m.setflags(write=False)
        self.matrix = m
        self.tol = tol

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SpectralAlgebra:
    eigenvalues: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(int(round(np.trace(p).real)) for p in self.projectors)

    def reconstruct(self) -> np.ndarray:
        return sum(a * p for a, p in zip(self.eigenvalues, self.projectors))


def spectral_algebra(M: HermitianOperator | np.ndarray, cluster_tol: float = 1e-9) -> SpectralAlgebra:
    """Eigenvalues and eigenprojectors, merging eigenvalues closer than
    ``cluster_tol`` (relative to the spectral radius, floor 1).
    """
    if not isinstance(M, HermitianOperator):
        M = HermitianOperator(M)
    w, v = np.linalg.eigh(M.matrix)
    scale = max(1.0, float(np.abs(w).max()))
    groups: list[list[int]] = []
    for k in range(len(w)):
        if groups and w[k] - w[groups[-1][0]] <= cluster_tol * scale:
            groups[-1].append(k)
        else:
            groups.append([k])
    vals, projs = [], []
    for g in groups:
        vecs = v[:, g]
        vals.append(float(np.mean(w[g])))
        projs.append(vecs @ vecs.conj().T)
    return SpectralAlgebra(tuple(vals), tuple(projs))
