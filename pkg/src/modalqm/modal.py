"""The possibility operator as central cover, and compatible actualizations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .lattice import BlockStructure, OrthoLattice, center
from .valuation import (
    Context,
    SearchOutcome,
    count_global_valuations,
    enumerate_blocks,
    search_valuation,
)


def _require_lattice(L) -> OrthoLattice:
    if isinstance(L, BlockStructure):
        raise TypeError(
            f"{L.name or 'block structure'} is blocks-only; possibility needs a full lattice"
            + (f" ({L.reason})" if L.reason else "")
        )
    return L


def diamond(L: OrthoLattice, p: int) -> int:
    """Smallest central element above ``p``."""
    L = _require_lattice(L)
    L._check(p)
    above = [c for c in center(L) if L.leq_matrix[p, c]]
    best = min(above, key=lambda c: int(L.leq_matrix[:, c].sum()))
    if not all(L.leq_matrix[best, c] for c in above):
        raise AssertionError(f"no least central element above {L.labels[p]}")
    return best


def diamond_map(L: OrthoLattice) -> list[int]:
    """``diamond`` for every element, computing the center once."""
    L = _require_lattice(L)
    z = center(L)
    heights = {c: int(L.leq_matrix[:, c].sum()) for c in z}
    z_by_height = sorted(z, key=heights.__getitem__)
    out = []
    for p in range(len(L)):
        out.append(next(c for c in z_by_height if L.leq_matrix[p, c]))
    return out


@dataclass(frozen=True)
class PossibilitySpace:
    parent: OrthoLattice
    members: tuple[int, ...]

    def labels(self) -> list[str]:
        return [self.parent.labels[x] for x in self.members]


def possibility_space(L: OrthoLattice) -> PossibilitySpace:
    dm = diamond_map(L)
    members = tuple(sorted(set(dm)))
    z = set(center(L))
    if not set(members) <= z:
        raise AssertionError("possibility space escapes the center")
    return PossibilitySpace(L, members)


@dataclass(frozen=True, eq=False)
class ModalValuation:
    """A Boolean homomorphism on the center; ``atom`` is its true atom."""

    space: PossibilitySpace
    atom: int
    assignment: Mapping[int, int]

    def existent_possibilities(self) -> list[int]:
        """Members of the possibility space valued 1."""
        return [x for x in self.space.members if self.assignment[x] == 1]


def enumerate_modal_homomorphisms(L: OrthoLattice) -> list[ModalValuation]:
    """All homomorphisms from the center to 2, one per center atom."""
    L = _require_lattice(L)
    space = possibility_space(L)
    z = center(L)
    leq = L.leq_matrix
    z_atoms = [c for c in z if c != L.bottom and not any(d not in (c, L.bottom) and leq[d, c] for d in z)]
    return [ModalValuation(space, a, {x: int(leq[a, x]) for x in z}) for a in z_atoms]


def _allowed_atoms(ctx: Context, f: ModalValuation) -> list[int]:
    fixed = [(x, f.assignment[x]) for x in ctx.members if x in set(f.space.members)]
    return [k for k, a in enumerate(ctx.atoms) if all(int(a in ctx.atom_sets[x]) == v for x, v in fixed)]


def search_compatible_actualization(
    L: OrthoLattice, f: ModalValuation, cap: int | None = None, heuristic: str | None = None
) -> SearchOutcome:
    """A global valuation agreeing with ``f`` on each block's possibilities."""
    L = _require_lattice(L)
    ctxs = enumerate_blocks(L)
    allowed = [_allowed_atoms(c, f) for c in ctxs]
    out = search_valuation(ctxs, allowed=allowed, cap=cap, heuristic=heuristic)
    if out.found:
        vals = out.witness.element_values()
        space = set(f.space.members)
        if any(vals[x] != f.assignment[x] for x in vals if x in space):
            raise AssertionError("actualization disagrees with f on the possibility space")
    return out


@dataclass(frozen=True)
class MksReport:
    """Both sides of the modal Kochen-Specker equivalence for one lattice.

    ``equivalence_holds`` compares "has a global valuation" with "some
    modal homomorphism has a compatible actualization".
    ``all_homs_actualizable`` records the stronger per-homomorphism
    statement, which fails on products of a state-free factor with a
    factor that has states.
    """

    lattice: str
    has_global_valuation: bool
    global_valuation_count: int
    modal_homs_total: int
    modal_homs_with_actualization: int
    equivalence_holds: bool
    all_homs_actualizable: bool
    exhaustive: bool


def mks_check(L: OrthoLattice, cap: int | None = None) -> MksReport:
    L = _require_lattice(L)
    n_global = count_global_valuations(L)
    homs = enumerate_modal_homomorphisms(L)
    outcomes = [search_compatible_actualization(L, f, cap=cap) for f in homs]
    exhaustive = all(o.conclusive for o in outcomes)
    with_act = sum(o.found for o in outcomes)
    has = n_global > 0
    return MksReport(
        lattice=L.name,
        has_global_valuation=has,
        global_valuation_count=n_global,
        modal_homs_total=len(homs),
        modal_homs_with_actualization=with_act,
        equivalence_holds=exhaustive and has == (with_act > 0),
        all_homs_actualizable=with_act == len(homs),
        exhaustive=exhaustive,
    )
