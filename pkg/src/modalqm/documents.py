"""Reading and writing the JSON documents used by the CLI and fixtures.

Every document is a JSON object with ``format_version`` and ``kind``.
Rendering is canonical (sorted keys, two-space indent, trailing newline)
so that identical inputs give byte-identical output.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .lattice import BlockStructure, OrthoLattice, build_lattice, covers, greechie_paste
from .powers import Basis, PSAState, make_psa
from .vectors import HermitianOperator, VectorSet, load_vector_set

FORMAT_VERSION = 1


class DocumentError(ValueError):
    pass


def render(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse(text: str, source: str = "<string>") -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{source}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise DocumentError(f"{source}: top level must be an object")
    version = doc.get("format_version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise DocumentError(f"{source}: unsupported format_version {version!r}")
    return doc


def read(path: str | Path) -> dict:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"{p}: {exc.strerror}") from None
    return parse(text, str(p))


def digest(path: str | Path) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _expect_kind(doc: dict, *kinds: str) -> str:
    kind = doc.get("kind")
    if kind not in kinds:
        raise DocumentError(f"expected a document of kind {' or '.join(kinds)}, got {kind!r}")
    return kind


# -- complex numbers ----------------------------------------------------------


def complex_to_doc(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def complex_from_doc(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise DocumentError(f"bad complex entry {x!r}; expected a number or [re, im]")


# -- lattices and block structures ---------------------------------------------


def lattice_to_doc(L: OrthoLattice) -> dict:
    """Lattice document listing the Hasse diagram as ``leq`` pairs."""
    return {
        "format_version": FORMAT_VERSION,
        "kind": "lattice",
        "name": L.name,
        "elements": list(L.labels),
        "leq": [[L.labels[a], L.labels[b]] for a, b in covers(L)],
        "ortho": {L.labels[a]: L.labels[L.ortho(a)] for a in range(len(L))},
    }


def blocks_to_doc(bs: BlockStructure) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "blocks",
        "name": bs.name,
        "atoms": list(bs.atoms),
        "blocks": [[bs.atoms[a] for a in blk] for blk in bs.blocks],
    }
    if bs.reason:
        doc["reason"] = bs.reason
    return doc


def _atoms_blocks(doc: dict) -> tuple[list[str], list[list[int]]]:
    atoms = [str(a) for a in doc["atoms"]]
    index = {a: i for i, a in enumerate(atoms)}
    try:
        blocks = [[index[str(a)] for a in blk] for blk in doc["blocks"]]
    except KeyError as exc:
        raise DocumentError(f"block mentions unknown atom {exc.args[0]!r}") from None
    return atoms, blocks


def structure_from_doc(doc: dict) -> OrthoLattice | BlockStructure:
    """Lattice, pasting (pasted on load) or blocks document."""
    kind = _expect_kind(doc, "lattice", "pasting", "blocks")
    try:
        if kind == "lattice":
            return build_lattice(doc)
        atoms, blocks = _atoms_blocks(doc)
        if kind == "pasting":
            return greechie_paste(atoms, blocks, name=doc.get("name", ""))
        return BlockStructure(atoms, blocks, name=doc.get("name", ""), reason=doc.get("reason", ""))
    except KeyError as exc:
        raise DocumentError(f"{kind} document is missing field {exc.args[0]!r}") from None


def structure_to_doc(S: OrthoLattice | BlockStructure) -> dict:
    return lattice_to_doc(S) if isinstance(S, OrthoLattice) else blocks_to_doc(S)


# -- vectors, states, bases, operators ------------------------------------------


def vectors_to_doc(vs: VectorSet, notes: str = "") -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": "vectors",
        "name": vs.name,
        "dimension": vs.dimension,
        "rays": [{"label": lab, "coords": [c.to_doc() for c in r]} for lab, r in zip(vs.labels, vs.rays)],
    }
    if notes:
        doc["notes"] = notes
    return doc


def vectors_from_doc(doc: dict) -> VectorSet:
    _expect_kind(doc, "vectors")
    return load_vector_set(doc)


def state_to_doc(psa: PSAState) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "state",
        "dimension": psa.dimension,
        "amplitudes": [complex_to_doc(c) for c in psa.amplitudes],
    }


def state_from_doc(doc: dict) -> PSAState:
    _expect_kind(doc, "state")
    amps = [complex_from_doc(x) for x in doc["amplitudes"]]
    if "dimension" in doc and int(doc["dimension"]) != len(amps):
        raise DocumentError(f"state declares dimension {doc['dimension']} but has {len(amps)} amplitudes")
    return make_psa(amps)


def basis_to_doc(b: Basis) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "basis",
        "name": b.name,
        "vectors": [
            {"label": lab, "coords": [complex_to_doc(c) for c in v]} for lab, v in zip(b.labels, b.vectors)
        ],
    }


def basis_from_doc(doc: dict) -> Basis:
    _expect_kind(doc, "basis")
    labels = [str(v["label"]) for v in doc["vectors"]]
    vecs = np.array([[complex_from_doc(c) for c in v["coords"]] for v in doc["vectors"]])
    return Basis(vecs, tuple(labels), name=doc.get("name", ""))


def matrix_to_doc(M) -> dict:
    m = M.matrix if isinstance(M, HermitianOperator) else np.asarray(M)
    return {
        "format_version": FORMAT_VERSION,
        "kind": "matrix",
        "rows": [[complex_to_doc(c) for c in row] for row in m],
    }


def matrix_from_doc(doc: dict) -> HermitianOperator:
    _expect_kind(doc, "matrix")
    return HermitianOperator([[complex_from_doc(c) for c in row] for row in doc["rows"]])
