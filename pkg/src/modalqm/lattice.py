"""Finite orthomodular lattices.

An :class:`OrthoLattice` is stored as a boolean order matrix plus an
orthocomplement permutation. Meet and join tables are derived from the
order once, at construction, and every lattice law is checked eagerly so
that downstream code can trust the tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_ELEMENTS = 4096


class LatticeError(ValueError):
    """A lattice law failed; ``law`` names it and ``witness`` holds labels."""

    def __init__(self, law: str, witness: tuple = (), detail: str = ""):
        self.law = law
        self.witness = tuple(witness)
        msg = f"{law} violated"
        if witness:
            msg += f" at {self.witness}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


@dataclass(frozen=True)
class LatticeVerdict:
    holds: bool
    law: str = ""
    counterexample: tuple | None = None

    def __bool__(self) -> bool:
        return self.holds


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def transitive_closure(leq: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean relation (Warshall)."""
    r = np.array(leq, dtype=bool)
    np.fill_diagonal(r, True)
    for k in range(r.shape[0]):
        r |= r[:, k, None] & r[None, k, :]
    return r


def _bound_table(order: np.ndarray) -> np.ndarray | tuple[int, int]:
    """Greatest common lower bound of every pair under ``order``.

    ``order[x, y]`` means x <= y. Returns the table, or the first pair
    (a, b) that has no greatest lower bound.
    """
    n = order.shape[0]
    height = order.sum(axis=0)  # number of elements below each y
    table = np.empty((n, n), dtype=np.int32)
    for a in range(n):
        lower = order[:, a, None] & order  # lower[c, b]: c <= a and c <= b
        score = np.where(lower, height[:, None], -1)
        cand = score.argmax(axis=0)
        bad = (lower & ~order[:, cand]).any(axis=0) | (score.max(axis=0) < 0)
        if bad.any():
            return a, int(np.flatnonzero(bad)[0])
        table[a] = cand
    return table


class OrthoLattice:
    """A finite orthomodular lattice.

    Elements are identified by position; ``labels`` gives each one a
    stable name. Construction validates the partial order, existence of
    meets and joins, the orthocomplement laws and orthomodularity, raising
    :class:`LatticeError` with a counterexample on the first failure.
    """

    def __init__(
        self,
        labels: Sequence[str],
        leq: np.ndarray,
        ortho: Sequence[int],
        name: str = "",
        max_elements: int = DEFAULT_MAX_ELEMENTS,
    ):
        n = len(labels)
        if n == 0:
            raise LatticeError("nonempty carrier")
        if n > max_elements:
            raise LatticeError("size cap", detail=f"{n} elements > {max_elements}")
        if len(set(labels)) != n:
            raise LatticeError("unique labels")
        leq = np.array(leq, dtype=bool)
        ortho = np.array(ortho, dtype=np.int32)
        if leq.shape != (n, n) or ortho.shape != (n,):
            raise LatticeError("shape", detail="leq must be n x n and ortho length n")
        if ortho.min() < 0 or ortho.max() >= n:
            raise LatticeError("ortho range")
        self.name = name
        self.labels = tuple(labels)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        self._check_order(leq)
        self.leq_matrix = _frozen(leq)
        self.bottom = int(np.flatnonzero(leq.all(axis=1))[0])
        self.top = int(np.flatnonzero(leq.all(axis=0))[0])

        meet = _bound_table(leq)
        if isinstance(meet, tuple):
            raise LatticeError("unique meet", self._lab(meet), "no greatest lower bound")
        join = _bound_table(leq.T)
        if isinstance(join, tuple):
            raise LatticeError("unique join", self._lab(join), "no least upper bound")
        self.meet_table = _frozen(meet)
        self.join_table = _frozen(join)
        self.ortho_map = _frozen(ortho)
        self._check_ortho()
        self._check_orthomodular()

    # -- validation -------------------------------------------------------

    def _lab(self, idx: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.labels[int(i)] for i in idx)

    def _check_order(self, leq: np.ndarray) -> None:
        diag = np.diagonal(leq)
        if not diag.all():
            a = int(np.flatnonzero(~diag)[0])
            raise LatticeError("reflexivity", self._lab([a]))
        anti = leq & leq.T
        np.fill_diagonal(anti, False)
        if anti.any():
            a, b = np.argwhere(anti)[0]
            raise LatticeError("antisymmetry", self._lab([a, b]))
        closed = transitive_closure(leq)
        if (closed & ~leq).any():
            a, c = np.argwhere(closed & ~leq)[0]
            b = int(np.flatnonzero(leq[a] & leq[:, c])[0])
            raise LatticeError("transitivity", self._lab([a, b, c]))
        if not leq.all(axis=1).any():
            raise LatticeError("bottom element")
        if not leq.all(axis=0).any():
            raise LatticeError("top element")

    def _check_ortho(self) -> None:
        o = self.ortho_map
        n = len(o)
        idx = np.arange(n)
        bad = np.flatnonzero(o[o] != idx)
        if bad.size:
            raise LatticeError("ortho involution", self._lab([bad[0]]))
        # a <= b  =>  b' <= a'
        rev = self.leq_matrix & ~self.leq_matrix[np.ix_(o, o)].T
        if rev.any():
            a, b = np.argwhere(rev)[0]
            raise LatticeError("ortho order-reversal", self._lab([a, b]))
        m = self.meet_table[idx, o]
        j = self.join_table[idx, o]
        bad = np.flatnonzero((m != self.bottom) | (j != self.top))
        if bad.size:
            raise LatticeError("complement law", self._lab([bad[0]]))

    def _check_orthomodular(self) -> None:
        # a <= b  =>  b = a v (a' ^ b)
        o = self.ortho_map
        inner = self.meet_table[o, :]  # inner[a, b] = a' ^ b
        n = len(o)
        rhs = self.join_table[np.arange(n)[:, None], inner]
        bad = self.leq_matrix & (rhs != np.arange(n)[None, :])
        if bad.any():
            a, b = np.argwhere(bad)[0]
            raise LatticeError("orthomodular law", self._lab([a, b]))

    # -- basic operations -------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"OrthoLattice({self.name!r}, {len(self)} elements)"

    def __eq__(self, other):
        if not isinstance(other, OrthoLattice):
            return NotImplemented
        return (
            (self.name, self.labels) == (other.name, other.labels)
            and np.array_equal(self.leq_matrix, other.leq_matrix)
            and np.array_equal(self.ortho_map, other.ortho_map)
        )

    def __hash__(self):
        return hash((self.name, self.labels))

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"no element labelled {label!r} in {self.name or 'lattice'}") from None

    def _check(self, *xs: int) -> None:
        n = len(self.labels)
        for x in xs:
            if not 0 <= x < n:
                raise IndexError(f"element index {x} out of range for {n} elements")

    def meet(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.meet_table[a, b])

    def join(self, a: int, b: int) -> int:
        self._check(a, b)
        return int(self.join_table[a, b])

    def ortho(self, a: int) -> int:
        self._check(a)
        return int(self.ortho_map[a])

    def leq(self, a: int, b: int) -> bool:
        self._check(a, b)
        return bool(self.leq_matrix[a, b])

    def atoms(self) -> list[int]:
        """Elements covering the bottom."""
        n = len(self)
        below = self.leq_matrix.sum(axis=0)
        return [x for x in range(n) if below[x] == 2]

    def commutation_matrix(self) -> np.ndarray:
        """``C[a, b]`` is true iff a = (a ^ b) v (a ^ b')."""
        if not hasattr(self, "_commutes"):
            n = len(self)
            m1 = self.meet_table
            m2 = self.meet_table[:, self.ortho_map]
            c = self.join_table[m1, m2] == np.arange(n)[:, None]
            object.__setattr__(self, "_commutes", _frozen(c))
        return self._commutes


# -- free functions mirroring the lattice operations -------------------------


def meet(L: OrthoLattice, a: int, b: int) -> int:
    return L.meet(a, b)


def join(L: OrthoLattice, a: int, b: int) -> int:
    return L.join(a, b)


def ortho(L: OrthoLattice, a: int) -> int:
    return L.ortho(a)


def leq(L: OrthoLattice, a: int, b: int) -> bool:
    return L.leq(a, b)


def commutes(L: OrthoLattice, a: int, b: int) -> bool:
    L._check(a, b)
    return bool(L.commutation_matrix()[a, b])


def center(L: OrthoLattice) -> list[int]:
    """Elements commuting with every element, in index order."""
    z = np.flatnonzero(L.commutation_matrix().all(axis=1)).tolist()
    zs = set(z)
    for a in z:
        if L.ortho(a) not in zs or any(
            L.meet(a, b) not in zs or L.join(a, b) not in zs for b in z
        ):
            raise AssertionError(f"center of {L.name} not closed at {L.labels[a]}")
    return z


def is_boolean(L: OrthoLattice, subset: Iterable[int] | None = None) -> LatticeVerdict:
    """Check distributivity x ^ (y v z) = (x ^ y) v (x ^ z) over all triples.

    With ``subset``, only triples drawn from it are scanned (useful for
    sublattices such as the center).
    """
    idx = np.arange(len(L)) if subset is None else np.array(sorted(subset), dtype=np.int64)
    M, J = L.meet_table, L.join_table
    for x in idx:
        yz = J[np.ix_(idx, idx)]  # y v z
        lhs = M[x, yz]
        xy = M[x, idx]
        rhs = J[xy[:, None], xy[None, :]]
        bad = lhs != rhs
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return LatticeVerdict(False, "distributive law", L._lab([x, idx[i], idx[j]]))
    return LatticeVerdict(True)


def de_morgan(L: OrthoLattice) -> LatticeVerdict:
    o = L.ortho_map
    lhs = o[L.meet_table]
    rhs = L.join_table[np.ix_(o, o)]
    bad = lhs != rhs
    if bad.any():
        a, b = np.argwhere(bad)[0]
        return LatticeVerdict(False, "De Morgan law", L._lab([a, b]))
    return LatticeVerdict(True)


# -- constructors -------------------------------------------------------------


def build_lattice(doc: dict, max_elements: int = DEFAULT_MAX_ELEMENTS) -> OrthoLattice:
    """Build from a mapping with ``elements``, ``leq`` and ``ortho``.

    ``leq`` may list any generating set of pairs (a Hasse diagram is
    enough); the reflexive-transitive closure is taken before validation.
    """
    labels = [str(x) for x in doc["elements"]]
    index = {lab: i for i, lab in enumerate(labels)}
    if len(index) != len(labels):
        raise LatticeError("unique labels")

    def lookup(lab) -> int:
        try:
            return index[str(lab)]
        except KeyError:
            raise LatticeError("known label", (str(lab),), "not among elements") from None

    n = len(labels)
    rel = np.zeros((n, n), dtype=bool)
    for a, b in doc.get("leq", []):
        rel[lookup(a), lookup(b)] = True
    omap = doc["ortho"]
    missing = [lab for lab in labels if lab not in omap]
    if missing:
        raise LatticeError("total ortho map", (missing[0],))
    ortho_idx = [lookup(omap[lab]) for lab in labels]
    closed = transitive_closure(rel)
    anti = closed & closed.T
    np.fill_diagonal(anti, False)
    if anti.any():
        a, b = np.argwhere(anti)[0]
        raise LatticeError("antisymmetry", (labels[a], labels[b]))
    return OrthoLattice(labels, closed, ortho_idx, name=doc.get("name", ""), max_elements=max_elements)


def covers(L: OrthoLattice) -> list[tuple[int, int]]:
    """Hasse diagram edges (a, b) with a < b and nothing strictly between."""
    lt = L.leq_matrix.copy()
    np.fill_diagonal(lt, False)
    between = (lt.astype(np.int32) @ lt.astype(np.int32)) > 0
    return [(int(a), int(b)) for a, b in np.argwhere(lt & ~between)]


def boolean_algebra(n: int) -> OrthoLattice:
    """Powerset lattice on ``n`` atoms ``a1..an``; element i is a bitmask."""
    if n < 1:
        raise ValueError("boolean_algebra needs n >= 1")
    size = 1 << n
    full = size - 1

    def label(mask: int) -> str:
        if mask == 0:
            return "0"
        if mask == full:
            return "1"
        return "|".join(f"a{k + 1}" for k in range(n) if mask >> k & 1)

    masks = np.arange(size)
    leq = (masks[:, None] & ~masks[None, :]) == 0
    return OrthoLattice([label(m) for m in range(size)], leq, full ^ masks, name=f"2^{n}")


def mo(n: int) -> OrthoLattice:
    """The horizontal sum of ``n`` four-element Boolean algebras."""
    if n < 1:
        raise ValueError("mo needs n >= 1")
    labels = ["0"]
    for k in range(1, n + 1):
        labels += [f"a{k}", f"a{k}'"]
    labels.append("1")
    size = len(labels)
    leq = np.eye(size, dtype=bool)
    leq[0, :] = True
    leq[:, -1] = True
    ortho = [size - 1] + [i + 1 if i % 2 else i - 1 for i in range(1, size - 1)] + [0]
    return OrthoLattice(labels, leq, ortho, name=f"MO({n})")


def product(L1: OrthoLattice, L2: OrthoLattice) -> OrthoLattice:
    """Direct product with componentwise order and orthocomplement."""
    n1, n2 = len(L1), len(L2)
    labels = [f"({a},{b})" for a in L1.labels for b in L2.labels]
    leq = (L1.leq_matrix[:, None, :, None] & L2.leq_matrix[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    ortho = (L1.ortho_map[:, None] * n2 + L2.ortho_map[None, :]).reshape(-1)
    return OrthoLattice(labels, leq, ortho, name=f"{L1.name}x{L2.name}")


def pair_index(L1: OrthoLattice, L2: OrthoLattice, a: int, b: int) -> int:
    """Index of (a, b) in ``product(L1, L2)``."""
    return a * len(L2) + b


# -- block structures and Greechie pasting -------------------------------------


class BlockStructure:
    """A family of Boolean blocks given by their atoms.

    Elements of the blocks are atom subsets; a subset of one block is
    identified with a subset of another when the subsets coincide or when
    their in-block complements coincide. This is the carrier of a Greechie
    pasting, whether or not that pasting turns out to be a lattice.
    """

    def __init__(self, atoms: Sequence[str], blocks: Sequence[Sequence[int]], name: str = "", reason: str = ""):
        self.name = name
        self.atoms = tuple(str(a) for a in atoms)
        if len(set(self.atoms)) != len(self.atoms):
            raise LatticeError("unique labels")
        blks = []
        for b in blocks:
            b = tuple(sorted(int(x) for x in b))
            if not b or len(set(b)) != len(b) or b[0] < 0 or b[-1] >= len(self.atoms):
                raise LatticeError("block atoms", self._lab_atoms(b))
            blks.append(b)
        if len(set(blks)) != len(blks):
            raise LatticeError("distinct blocks")
        self.blocks = tuple(blks)
        covered = set().union(*map(set, self.blocks)) if self.blocks else set()
        if covered != set(range(len(self.atoms))):
            lone = min(set(range(len(self.atoms))) - covered)
            raise LatticeError("atom in some block", (self.atoms[lone],))
        self.reason = reason
        self._identify()

    def _lab_atoms(self, s) -> tuple[str, ...]:
        return tuple(self.atoms[i] if 0 <= i < len(self.atoms) else str(i) for i in s)

    def _identify(self) -> None:
        parent: dict = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

        nodes = []
        by_set: dict[frozenset, tuple] = {}
        by_comp: dict[frozenset, tuple] = {}
        for bi, blk in enumerate(self.blocks):
            full = frozenset(blk)
            for r in range(len(blk) + 1):
                for s in itertools.combinations(blk, r):
                    s = frozenset(s)
                    node = (bi, tuple(sorted(s)))
                    parent[node] = node
                    nodes.append(node)
                    if s in by_set:
                        union(node, by_set[s])
                    else:
                        by_set[s] = node
                    c = full - s
                    if c in by_comp:
                        union(node, by_comp[c])
                    else:
                        by_comp[c] = node
        classes: dict = {}
        for node in nodes:
            classes.setdefault(find(node), []).append(node)
        # element order: 0, atoms, atom complements, other subsets, 1
        def sort_key(root):
            reps = classes[root]
            if any(len(s) == 0 for _, s in reps):
                return (0, 0, ())
            if any(len(s) == len(self.blocks[b]) for b, s in reps):
                return (4, 0, ())
            singles = [s[0] for _, s in reps if len(s) == 1]
            if singles:
                return (1, min(singles), ())
            comps = [min(set(self.blocks[b]) - set(s)) for b, s in reps if len(self.blocks[b]) - len(s) == 1]
            if comps:
                return (2, min(comps), ())
            return (3, 0, min(reps))

        roots = sorted(classes, key=sort_key)
        self.element_of: dict[tuple[int, tuple[int, ...]], int] = {}
        labels = []
        for eid, root in enumerate(roots):
            reps = sorted(classes[root])
            for node in reps:
                self.element_of[node] = eid
            labels.append(self._label(reps))
        if len(set(labels)) != len(labels):
            raise LatticeError("unique element labels")
        self.element_labels = tuple(labels)
        # atom subset of each element within each block it belongs to
        self.block_members: tuple[dict[int, frozenset], ...] = tuple(
            {self.element_of[(bi, s)]: frozenset(s) for (b, s) in self.element_of if b == bi}
            for bi in range(len(self.blocks))
        )
        for bi, mem in enumerate(self.block_members):
            if len(mem) != 2 ** len(self.blocks[bi]):
                raise LatticeError("block elements distinct", self._lab_atoms(self.blocks[bi]),
                                   "pasting collapses elements of one block")

    def _label(self, reps) -> str:
        if any(len(s) == 0 for _, s in reps):
            return "0"
        if any(len(s) == len(self.blocks[b]) for b, s in reps):
            return "1"
        singles = [s for _, s in reps if len(s) == 1]
        if singles:
            return self.atoms[singles[0][0]]
        for b, s in reps:
            rest = sorted(set(self.blocks[b]) - set(s))
            if len(rest) == 1:
                return self.atoms[rest[0]] + "'"
        b, s = reps[0]
        return "|".join(self.atoms[i] for i in s)

    def __eq__(self, other):
        if not isinstance(other, BlockStructure):
            return NotImplemented
        return (self.name, self.atoms, self.blocks) == (other.name, other.atoms, other.blocks)

    def __hash__(self):
        return hash((self.name, self.atoms, self.blocks))

    def __repr__(self) -> str:
        return f"BlockStructure({self.name!r}, {len(self.atoms)} atoms, {len(self.blocks)} blocks)"

    @property
    def n_elements(self) -> int:
        return len(self.element_labels)

    def order_and_ortho(self) -> tuple[np.ndarray, list[int]]:
        """Union of the block orders (transitively closed) and the orthocomplement.

        Raises :class:`LatticeError` if the in-block complements disagree.
        """
        n = self.n_elements
        rel = np.eye(n, dtype=bool)
        ortho = [-1] * n
        for bi, mem in enumerate(self.block_members):
            full = frozenset(self.blocks[bi])
            by_set = {s: e for e, s in mem.items()}
            for e, s in mem.items():
                c = by_set[full - s]
                if ortho[e] not in (-1, c):
                    raise LatticeError("well-defined ortho", (self.element_labels[e],))
                ortho[e] = c
                for f, t in mem.items():
                    if s <= t:
                        rel[e, f] = True
        return transitive_closure(rel), ortho

    def to_lattice(self, max_elements: int = DEFAULT_MAX_ELEMENTS) -> OrthoLattice:
        leq, ortho = self.order_and_ortho()
        return OrthoLattice(self.element_labels, leq, ortho, name=self.name, max_elements=max_elements)


def greechie_paste(
    atoms: Sequence[str], blocks: Sequence[Sequence[int]], name: str = ""
) -> OrthoLattice | BlockStructure:
    """Paste Boolean blocks along shared atoms.

    Any two blocks may share at most one atom. Returns the pasted
    :class:`OrthoLattice` when the result satisfies every lattice law;
    otherwise returns the :class:`BlockStructure` with ``reason`` set to
    the failed law, still usable for valuation search.
    """
    for (i, b1), (j, b2) in itertools.combinations(enumerate(blocks), 2):
        shared = set(b1) & set(b2)
        if len(shared) > 1:
            raise LatticeError(
                "block overlap at most one atom",
                tuple(atoms[k] for k in sorted(shared)),
                f"blocks {i} and {j}",
            )
    bs = BlockStructure(atoms, blocks, name=name)
    try:
        return bs.to_lattice()
    except LatticeError as exc:
        bs.reason = str(exc)
        return bs
