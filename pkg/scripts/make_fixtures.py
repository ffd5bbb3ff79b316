"""Regenerate the shipped fixture documents under src/modalqm/fixtures.

Run from the repository root:  python scripts/make_fixtures.py
Nothing here asserts a search result; the fixtures only encode the
standard constructions, and the test-suite establishes their properties.
"""

import itertools
from pathlib import Path

import numpy as np

from modalqm import documents as D
from modalqm.lattice import boolean_algebra, mo
from modalqm.powers import X_BASIS, Y_BASIS, Z_BASIS, make_psa
from modalqm.vectors import load_vector_set

OUT = Path(__file__).resolve().parents[1] / "src" / "modalqm" / "fixtures"
V = D.FORMAT_VERSION


def write(name, doc):
    (OUT / name).write_text(D.render(doc), encoding="utf-8")


def signed(text):
    """'1-10-1' -> (1, -1, 0, -1)"""
    out, i = [], 0
    while i < len(text):
        if text[i] == "-":
            out.append(-int(text[i + 1]))
            i += 2
        else:
            out.append(int(text[i]))
            i += 1
    return tuple(out)


# Cabello, Estebaranz and Garcia-Alcaine: 18 rays of C^4 in 9 orthogonal
# bases, each ray in exactly two of them.
CABELLO_CONTEXTS = [
    "0001 0010 1100 1-100",
    "0001 0100 1010 10-10",
    "1-11-1 1-1-11 1100 0011",
    "1-11-1 1111 10-10 010-1",
    "0010 0100 1001 100-1",
    "1-1-11 1111 100-1 01-10",
    "11-11 111-1 1-100 0011",
    "11-11 -1111 1010 010-1",
    "111-1 -1111 1001 01-10",
]


def cabello():
    labels = []
    for ctx in CABELLO_CONTEXTS:
        for word in ctx.split():
            if word not in labels:
                labels.append(word)
    rays = [{"label": w, "coords": list(signed(w))} for w in labels]
    notes = (
        "Cabello-Estebaranz-Garcia-Alcaine set: 18 rays in dimension 4, listed in "
        "order of first appearance in the 9 bases " + "; ".join(CABELLO_CONTEXTS) + "."
    )
    vec = {"format_version": V, "kind": "vectors", "name": "cabello18", "dimension": 4, "rays": rays, "notes": notes}
    blk = {
        "format_version": V,
        "kind": "blocks",
        "name": "cabello18-blocks",
        "atoms": labels,
        "blocks": [ctx.split() for ctx in CABELLO_CONTEXTS],
        "notes": "The 9 four-ray bases of cabello18.vec as blocks; each atom lies in two blocks.",
    }
    return vec, blk


def peres():
    """Peres' 33 rays: all rays whose coordinates, up to permutation and
    sign, are (0,0,1), (0,1,1), (0,1,√2) or (1,1,√2)."""
    S = [0, 1]  # √2 as an [a, b] pair
    patterns = [(0, 0, 1), (0, 1, 1), (0, 1, "s"), (1, 1, "s")]
    rays = []
    for pat in patterns:
        for perm in set(itertools.permutations(pat)):
            for signs in itertools.product((1, -1), repeat=3):
                v = [s * (2**0.5 if x == "s" else x) for s, x in zip(signs, perm)]
                first = next(x for x in v if x)
                if first < 0:
                    continue
                if any(np.allclose(v, r[0]) for r in rays):
                    continue
                coords = [
                    (S if s > 0 else [0, -1]) if x == "s" else s * x for s, x in zip(signs, perm)
                ]
                rays.append((v, coords))
    rays.sort(key=lambda r: [-abs(x) for x in r[0]] + [-x for x in r[0]])
    out = []
    for v, coords in rays:
        lab = "(" + ",".join(_surd_text(c) for c in coords) + ")"
        out.append({"label": lab, "coords": coords})
    assert len(out) == 33, len(out)
    notes = (
        "Peres 33-ray set in dimension 3: rays with coordinates, up to permutation "
        "and sign, (0,0,1), (0,1,1), (0,1,√2), (1,1,√2). √2 is encoded as the pair [0, 1]."
    )
    return {"format_version": V, "kind": "vectors", "name": "peres33", "dimension": 3, "rays": out, "notes": notes}


def _surd_text(c):
    if isinstance(c, list):
        return "√2" if c[1] > 0 else "-√2"
    return str(c)


# A 4-regular graph of girth 5 on 19 vertices (hence the Robertson graph,
# the unique (4,5)-cage). Vertices become 4-atom blocks and edges atoms, so
# every atom lies in two blocks and the Greechie diagram has no loops of
# order 3 or 4: the pasting is an orthomodular lattice. 19 blocks is odd,
# which rules out two-valued states by the parity count.
ROBERTSON_EDGES = [
    (0, 1), (0, 4), (0, 7), (0, 8), (1, 3), (1, 15), (1, 18), (2, 5), (2, 8), (2, 14),
    (2, 17), (3, 11), (3, 12), (3, 17), (4, 5), (4, 9), (4, 10), (5, 6), (5, 11), (6, 12),
    (6, 15), (6, 16), (7, 11), (7, 14), (7, 16), (8, 12), (8, 13), (9, 13), (9, 15), (9, 17),
    (10, 12), (10, 14), (10, 18), (11, 13), (13, 18), (14, 15), (16, 17), (16, 18),
]


def greechie_state_free():
    atoms = [f"e{u}_{v}" for u, v in ROBERTSON_EDGES]
    blocks = [[atoms[k] for k, e in enumerate(ROBERTSON_EDGES) if vtx in e] for vtx in range(19)]
    return {
        "format_version": V,
        "kind": "pasting",
        "name": "greechie-robertson",
        "atoms": atoms,
        "blocks": blocks,
        "notes": "Greechie pasting over the Robertson graph: blocks are its 19 vertices, atoms its 38 edges.",
    }


def greechie_two_blocks():
    return {
        "format_version": V,
        "kind": "pasting",
        "name": "greechie-two-blocks",
        "atoms": ["a", "b", "c", "d", "e"],
        "blocks": [["a", "b", "c"], ["c", "d", "e"]],
        "notes": "Two 3-atom blocks sharing the atom c.",
    }


def simple_vectors(name, d, rays, notes=""):
    doc = {"format_version": V, "kind": "vectors", "name": name, "dimension": d,
           "rays": [{"label": lab, "coords": list(c)} for lab, c in rays]}
    if notes:
        doc["notes"] = notes
    return doc


def case(name, verb, inputs, expect, **options):
    return {"name": name, "verb": verb, "inputs": inputs, "options": options, "expect": expect}


def manifest():
    conclusive_none = {"found": False, "exhaustive": True, "exit_code": 0}
    cases = [
        case("two-chain is a Boolean lattice", "lattice-validate", {"input": "two_chain.lat"},
             {"valid": True, "is_boolean": True, "elements": 2}),
        case("O6 fails orthomodularity", "lattice-validate", {"input": "o6.lat"},
             {"valid": False, "law": "orthomodular law", "exit_code": 2}),
        case("MO(2) has 4 global valuations", "valuate", {"input": "mo2.lat"},
             {"found": True, "count": 4, "exit_code": 0}, count=True),
        case("two pasted blocks have 5 global valuations", "valuate", {"input": "greechie_two_blocks.lat"},
             {"found": True, "count": 5, "blocks": 2}, count=True),
        case("state-free Greechie lattice", "valuate", {"input": "greechie_state_free.lat"}, conclusive_none),
        case("Cabello blocks admit no valuation", "valuate", {"input": "cabello18.blk"}, conclusive_none),
        case("Cabello blocks, capped search is inconclusive", "valuate", {"input": "cabello18.blk"},
             {"found": False, "exhaustive": False, "exit_code": 3}, cap=10),
        case("Cabello rays as blocks", "valuate", {"input": "cabello18.vec"}, conclusive_none),
        case("Peres rays as blocks", "valuate", {"input": "peres33.vec"}, conclusive_none),
        case("dim-2 rays as blocks", "valuate", {"input": "dim2_two_bases.vec"}, {"found": True}),
        case("Cabello coloring", "ks-color", {"input": "cabello18.vec"},
             dict(conclusive_none, parity_obstruction=True)),
        case("Peres coloring", "ks-color", {"input": "peres33.vec"}, conclusive_none),
        case("standard basis coloring", "ks-color", {"input": "std3.vec"}, {"found": True}),
        case("dim-2 pair coloring", "ks-color", {"input": "dim2_pair.vec"}, {"found": True}),
        case("dim-2 non-orthogonal coloring", "ks-color", {"input": "dim2_nonorth.vec"}, {"found": True}),
        case("dim-2 two bases coloring", "ks-color", {"input": "dim2_two_bases.vec"}, {"found": True}),
        case("dim-2 sqrt2 coloring", "ks-color", {"input": "dim2_sqrt2.vec"}, {"found": True}),
        case("Cabello contexts", "ks-contexts", {"input": "cabello18.vec"}, {"complete": 9, "rays": 18}),
        case("Peres contexts", "ks-contexts", {"input": "peres33.vec"}, {"complete": 16, "rays": 33}),
        case("MO(2) possibility space", "modal-space", {"input": "mo2.lat"},
             {"possibility_space": ["0", "1"]}),
        case("diamond of an MO(2) atom", "modal-diamond", {"input": "mo2.lat"}, {"diamond": "1"}, element="a1"),
        case("MKS on MO(2)", "modal-mks", {"input": "mo2.lat"},
             {"has_global_valuation": True, "equivalence_holds": True}),
        case("MKS on the state-free lattice", "modal-mks", {"input": "greechie_state_free.lat"},
             {"has_global_valuation": False, "modal_homs_total": 1,
              "modal_homs_with_actualization": 0, "equivalence_holds": True}),
        case("degenerate spectrum", "ks-spectra", {"matrix": "diag112.mat"}, {"ranks": [2, 1]}),
        case("single-power faculty", "powers-faculty", {"state": "up.state", "basis": "z.basis"},
             {"degenerate": True}),
        case("balanced profile", "powers-potentia", {"state": "plus.state", "basis": "x.basis"},
             {"exit_code": 0}),
        case("seeded sampling", "powers-sample", {"state": "plus.state", "basis": "z.basis"},
             {"n": 1000, "exit_code": 0}, n=1000, seed=7),
    ]
    return {"format_version": V, "kind": "manifest", "cases": cases}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("two_chain.lat", {"format_version": V, "kind": "lattice", "name": "2",
                            "elements": ["0", "1"], "leq": [["0", "1"]], "ortho": {"0": "1", "1": "0"}})
    write("bool2.lat", D.lattice_to_doc(boolean_algebra(2)))
    write("mo2.lat", D.lattice_to_doc(mo(2)))
    write("o6.lat", {
        "format_version": V, "kind": "lattice", "name": "O6",
        "elements": ["0", "a", "b", "b'", "a'", "1"],
        "leq": [["0", "a"], ["a", "b"], ["b", "1"], ["0", "b'"], ["b'", "a'"], ["a'", "1"]],
        "ortho": {"0": "1", "a": "a'", "b": "b'", "b'": "b", "a'": "a", "1": "0"},
        "notes": "The benzene ring: an ortholattice that is not orthomodular.",
    })
    write("greechie_two_blocks.lat", greechie_two_blocks())
    write("greechie_state_free.lat", greechie_state_free())
    vec, blk = cabello()
    write("cabello18.vec", vec)
    write("cabello18.blk", blk)
    write("peres33.vec", peres())
    write("std3.vec", simple_vectors("std3", 3, [("e1", (1, 0, 0)), ("e2", (0, 1, 0)), ("e3", (0, 0, 1))]))
    write("dim2_pair.vec", simple_vectors("dim2-pair", 2, [("up", (1, 0)), ("down", (0, 1))]))
    write("dim2_nonorth.vec", simple_vectors("dim2-nonorth", 2, [("up", (1, 0)), ("plus", (1, 1))]))
    write("dim2_two_bases.vec", simple_vectors(
        "dim2-two-bases", 2, [("up", (1, 0)), ("down", (0, 1)), ("plus", (1, 1)), ("minus", (1, -1))]))
    write("dim2_sqrt2.vec", simple_vectors(
        "dim2-sqrt2", 2, [("u", (1, [0, 1])), ("u_perp", ([0, 1], -1)), ("up", (1, 0)), ("down", (0, 1))],
        notes="Rays (1,√2) and (√2,-1) with the standard basis."))
    write("pauli_z.mat", D.matrix_to_doc(np.diag([1, -1])))
    write("pauli_x.mat", D.matrix_to_doc(np.array([[0, 1], [1, 0]])))
    write("diag123.mat", D.matrix_to_doc(np.diag([1, 2, 3])))
    write("diag112.mat", D.matrix_to_doc(np.diag([1, 1, 2])))
    write("up.state", D.state_to_doc(make_psa([1, 0])))
    write("plus.state", D.state_to_doc(make_psa([1, 1])))
    write("z.basis", D.basis_to_doc(Z_BASIS))
    write("x.basis", D.basis_to_doc(X_BASIS))
    write("y.basis", D.basis_to_doc(Y_BASIS))
    write("manifest.json", manifest())
    # sanity: every vector fixture loads
    for p in OUT.glob("*.vec"):
        load_vector_set(D.read(p))


if __name__ == "__main__":
    main()
