"""Contexts, two-valued homomorphisms and global valuation search.

A global valuation picks, in every block, the unique atom valued 1, such
that blocks agree on every element they share. The search is a
depth-first backtracker with forward checking over blocks; the counter
:func:`count_global_valuations` is a deliberately naive enumerator kept
separate so the two can check each other.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import networkx as nx

from .lattice import BlockStructure, OrthoLattice, is_boolean

DEFAULT_NODE_CAP = 10**8
DEFAULT_ATOM_CAP = 64

Structure = Union[OrthoLattice, BlockStructure]


def default_node_cap() -> int:
    return int(os.environ.get("MODALQM_NODE_CAP", DEFAULT_NODE_CAP))


@dataclass(frozen=True, eq=False)
class Context:
    """A block: a maximal Boolean subalgebra of ``parent``.

    ``atom_sets[x]`` is the set of block atoms below member ``x``; the
    Boolean operations inside the block are computed on these sets.
    """

    parent: Structure
    members: tuple[int, ...]
    atoms: tuple[int, ...]
    atom_sets: Mapping[int, frozenset[int]] = field(repr=False)

    def __post_init__(self):
        by_atoms = {s: x for x, s in self.atom_sets.items()}
        object.__setattr__(self, "_by_atoms", by_atoms)

    @property
    def top(self) -> int:
        return self._by_atoms[frozenset(self.atoms)]

    @property
    def bottom(self) -> int:
        return self._by_atoms[frozenset()]

    def meet(self, x: int, y: int) -> int:
        return self._by_atoms[self.atom_sets[x] & self.atom_sets[y]]

    def join(self, x: int, y: int) -> int:
        return self._by_atoms[self.atom_sets[x] | self.atom_sets[y]]

    def ortho(self, x: int) -> int:
        return self._by_atoms[frozenset(self.atoms) - self.atom_sets[x]]

    def labels(self) -> list[str]:
        return [element_labels(self.parent)[x] for x in self.members]


@dataclass(frozen=True, eq=False)
class BooleanHomomorphism:
    domain: Context
    assignment: Mapping[int, int]

    @classmethod
    def from_atom(cls, ctx: Context, atom: int) -> BooleanHomomorphism:
        return cls(ctx, {x: int(atom in s) for x, s in ctx.atom_sets.items()})

    def true_atom(self) -> int:
        (a,) = [a for a in self.domain.atoms if self.assignment[a] == 1]
        return a


@dataclass(frozen=True, eq=False)
class ValuationFamily:
    contexts: tuple[Context, ...]
    homs: tuple[BooleanHomomorphism, ...]

    def element_values(self) -> dict[int, int]:
        """The valuation as one map on all elements covered by the blocks."""
        out: dict[int, int] = {}
        for h in self.homs:
            out.update(h.assignment)
        return out

    def witness_labels(self) -> dict[str, int]:
        """Label -> value; atoms only for block structures, all elements otherwise."""
        if not self.contexts:
            return {}
        parent = self.contexts[0].parent
        vals = self.element_values()
        if isinstance(parent, BlockStructure):
            return {lab: vals[atom_element(parent, i)] for i, lab in enumerate(parent.atoms)}
        return {parent.labels[x]: vals[x] for x in sorted(vals)}


@dataclass(frozen=True)
class SearchOutcome:
    """Result of a backtracking search.

    ``exhaustive`` is False only when the node cap stopped the search, in
    which case ``found = False`` proves nothing.
    """

    found: bool
    witness: object | None
    nodes_explored: int
    exhaustive: bool

    @property
    def conclusive(self) -> bool:
        return self.found or self.exhaustive


def element_labels(S: Structure) -> tuple[str, ...]:
    return S.labels if isinstance(S, OrthoLattice) else S.element_labels


def atom_element(bs: BlockStructure, atom: int) -> int:
    b = next(i for i, blk in enumerate(bs.blocks) if atom in blk)
    return bs.element_of[(b, (atom,))]


# -- blocks ---------------------------------------------------------------------


def _lattice_context(L: OrthoLattice, members: Sequence[int]) -> Context:
    mem = tuple(sorted(members))
    leq = L.leq_matrix
    nonzero = [x for x in mem if x != L.bottom]
    atoms = tuple(x for x in nonzero if not any(y != x and leq[y, x] for y in nonzero))
    atom_sets = {x: frozenset(a for a in atoms if leq[a, x]) for x in mem}
    ctx = Context(L, mem, atoms, atom_sets)
    if len(set(atom_sets.values())) != len(mem) or len(mem) != 2 ** len(atoms):
        raise AssertionError(f"block {ctx.labels()} is not a Boolean algebra over its atoms")
    for x, y in itertools.combinations(mem, 2):
        if L.meet(x, y) != ctx.meet(x, y):
            raise AssertionError(f"block {ctx.labels()} not closed under meet")
    return ctx


def _block_context(bs: BlockStructure, bi: int) -> Context:
    mem = bs.block_members[bi]
    atoms = tuple(sorted(e for e, s in mem.items() if len(s) == 1))
    atom_of = {next(iter(s)): e for e, s in mem.items() if len(s) == 1}
    atom_sets = {e: frozenset(atom_of[a] for a in s) for e, s in mem.items()}
    return Context(bs, tuple(sorted(mem)), atoms, atom_sets)


def enumerate_blocks(S: Structure) -> list[Context]:
    """All maximal Boolean subalgebras, ordered by their atom index tuples.

    On a lattice these are the maximal sets of pairwise commuting
    elements; on a block structure they are the given blocks.
    """
    if isinstance(S, BlockStructure):
        ctxs = [_block_context(S, i) for i in range(len(S.blocks))]
    else:
        C = S.commutation_matrix()
        g = nx.Graph()
        g.add_nodes_from(range(len(S)))
        g.add_edges_from((int(a), int(b)) for a, b in zip(*C.nonzero()) if a < b)
        ctxs = [_lattice_context(S, clique) for clique in nx.find_cliques(g)]
        for ctx in ctxs:
            if not is_boolean(S, ctx.members):
                raise AssertionError(f"block {ctx.labels()} not distributive")
    return sorted(ctxs, key=lambda c: c.atoms)


# -- homomorphisms and compatibility ---------------------------------------------


def is_boolean_homomorphism(W: Context, assignment: Mapping[int, int]) -> bool:
    """Check v(1) = 1, v(x') = 1 - v(x) and v(x ^ y) = v(x) v(y) on ``W``.

    The equivalent atom criterion (exactly one atom valued 1, and the map
    is the one that atom induces) is cross-checked whenever the laws hold.
    """
    missing = [x for x in W.members if x not in assignment]
    if missing:
        raise ValueError(f"assignment is partial on the context: missing {element_labels(W.parent)[missing[0]]!r}")
    v = {x: int(assignment[x]) for x in W.members}
    if any(val not in (0, 1) for val in v.values()):
        return False
    ok = v[W.top] == 1 and all(v[W.ortho(x)] == 1 - v[x] for x in W.members)
    ok = ok and all(v[W.meet(x, y)] == (v[x] & v[y]) for x, y in itertools.combinations(W.members, 2))
    if ok:
        ones = [a for a in W.atoms if v[a] == 1]
        if len(ones) != 1 or BooleanHomomorphism.from_atom(W, ones[0]).assignment != v:
            raise AssertionError("homomorphism laws hold but the atom criterion fails")
    return ok


def check_compatibility(family: ValuationFamily) -> bool:
    """True iff every two homomorphisms agree on their shared elements."""
    for h1, h2 in itertools.combinations(family.homs, 2):
        shared = set(h1.domain.members) & set(h2.domain.members)
        if any(h1.assignment[x] != h2.assignment[x] for x in shared):
            return False
    return True


def validate_family(family: ValuationFamily) -> bool:
    return all(is_boolean_homomorphism(h.domain, h.assignment) for h in family.homs) and check_compatibility(family)


# -- search ----------------------------------------------------------------------


def _links(ctxs: Sequence[Context]) -> dict[tuple[int, int], list[int]]:
    """For each ordered pair of overlapping blocks, ``allowed[a]`` is a bitmask
    of the atoms of the second block compatible with atom ``a`` of the first.
    """
    links = {}
    for i, j in itertools.permutations(range(len(ctxs)), 2):
        ci, cj = ctxs[i], ctxs[j]
        shared = [x for x in set(ci.members) & set(cj.members) if x not in (ci.top, ci.bottom)]
        if not shared:
            continue
        sig_j = [tuple(b in cj.atom_sets[x] for x in shared) for b in cj.atoms]
        masks = []
        for a in ci.atoms:
            sig = tuple(a in ci.atom_sets[x] for x in shared)
            masks.append(sum(1 << k for k, s in enumerate(sig_j) if s == sig))
        links[(i, j)] = masks
    return links


class _CapReached(Exception):
    pass


def _backtrack(
    ctxs: Sequence[Context],
    domains: list[int],
    cap: int,
    heuristic: str | None,
) -> tuple[list[int] | None, int, bool]:
    links = _links(ctxs)
    neighbours = [[j for j in range(len(ctxs)) if (i, j) in links] for i in range(len(ctxs))]
    choice = [-1] * len(ctxs)
    nodes = 0

    def pick(doms: list[int]) -> int:
        free = [i for i in range(len(ctxs)) if choice[i] < 0]
        if heuristic == "mcf":
            return min(free, key=lambda i: (bin(doms[i]).count("1"), i))
        return free[0]

    def dfs(doms: list[int], depth: int) -> bool:
        nonlocal nodes
        if depth == len(ctxs):
            return True
        k = pick(doms)
        dom = doms[k]
        for a in range(len(ctxs[k].atoms)):
            if not dom >> a & 1:
                continue
            nodes += 1
            if nodes > cap:
                raise _CapReached
            new = list(doms)
            new[k] = 1 << a
            dead = False
            for j in neighbours[k]:
                if choice[j] < 0:
                    new[j] &= links[(k, j)][a]
                    if not new[j]:
                        dead = True
                        break
            if dead:
                continue
            choice[k] = a
            if dfs(new, depth + 1):
                return True
            choice[k] = -1
        return False

    if any(d == 0 for d in domains):
        return None, 0, True
    try:
        found = dfs(list(domains), 0)
    except _CapReached:
        return None, cap, False
    return (list(choice) if found else None), nodes, True


def search_valuation(
    ctxs: Sequence[Context],
    allowed: Sequence[Sequence[int]] | None = None,
    cap: int | None = None,
    heuristic: str | None = None,
) -> SearchOutcome:
    """Backtracking search over a fixed list of blocks.

    ``allowed[i]`` optionally restricts which atoms (by position in
    ``ctxs[i].atoms``) may carry the value 1 in block ``i``.
    """
    if heuristic not in (None, "mcf"):
        raise ValueError(f"unknown heuristic {heuristic!r}")
    cap = default_node_cap() if cap is None else cap
    if allowed is None:
        domains = [(1 << len(c.atoms)) - 1 for c in ctxs]
    else:
        domains = [sum(1 << a for a in al) for al in allowed]
    choice, nodes, exhaustive = _backtrack(ctxs, domains, cap, heuristic)
    if choice is None:
        return SearchOutcome(False, None, nodes, exhaustive)
    homs = tuple(BooleanHomomorphism.from_atom(c, c.atoms[a]) for c, a in zip(ctxs, choice))
    family = ValuationFamily(tuple(ctxs), homs)
    if not validate_family(family):
        raise AssertionError("search produced an invalid global valuation")
    return SearchOutcome(True, family, nodes, True)


def search_global_valuation(S: Structure, cap: int | None = None, heuristic: str | None = None) -> SearchOutcome:
    return search_valuation(enumerate_blocks(S), cap=cap, heuristic=heuristic)


def count_global_valuations(S: Structure, atom_cap: int = DEFAULT_ATOM_CAP) -> int:
    """Exact number of global valuations by plain enumeration.

    Blocks are filled in order and each choice is checked element by
    element against every earlier block; no pruning beyond that.
    """
    ctxs = enumerate_blocks(S)
    n_atoms = len({a for c in ctxs for a in c.atoms})
    if n_atoms > atom_cap:
        raise ValueError(f"{n_atoms} atoms exceeds the counting cap of {atom_cap}")
    shared = {
        (i, j): sorted(set(ctxs[i].members) & set(ctxs[j].members))
        for j in range(len(ctxs))
        for i in range(j)
    }
    chosen: list[int] = []

    def consistent(j: int, a: int) -> bool:
        cj = ctxs[j]
        for i, ai in enumerate(chosen):
            ci = ctxs[i]
            for x in shared[(i, j)]:
                if (ai in ci.atom_sets[x]) != (a in cj.atom_sets[x]):
                    return False
        return True

    def count(j: int) -> int:
        if j == len(ctxs):
            return 1
        total = 0
        for a in ctxs[j].atoms:
            if consistent(j, a):
                chosen.append(a)
                total += count(j + 1)
                chosen.pop()
        return total

    return count(0)
