"""Command-line entry point.

Exit codes: 0 for any conclusive result (including "no valuation
exists"), 1 when a corpus run has mismatches, 2 for usage or input
errors, 3 when a search hit its node cap.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from . import documents as D
from .lattice import (
    BlockStructure,
    LatticeError,
    OrthoLattice,
    boolean_algebra,
    center,
    greechie_paste,
    is_boolean,
    mo,
    product,
)
from .modal import diamond, mks_check, possibility_space
from .powers import (
    DEFAULT_SEED,
    HBAR,
    coarse_potentia,
    evolve,
    faculty,
    potentia_profile,
    sample_effectuations,
)
from .valuation import (
    count_global_valuations,
    enumerate_blocks,
    search_global_valuation,
)
from .vectors import (
    VectorSetError,
    blocks_from_vectors,
    ks_coloring_search,
    orthogonality_contexts,
    parity_obstruction,
    spectral_algebra,
)

log = logging.getLogger("modalqm")

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3
FILE_OPTIONS = ("input", "state", "basis", "matrix", "hamiltonian", "manifest")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Command:
    verb: str
    inputs: dict[str, str] = field(default_factory=dict)
    options: dict[str, object] = field(default_factory=dict)

    def echo(self) -> dict:
        return {"verb": self.verb, "inputs": dict(self.inputs), "options": dict(self.options)}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {v}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="modalqm", description="Orthomodular lattices, valuations and powers.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def cap_opt(q):
        q.add_argument("--cap", type=_positive_int, default=None,
                       help="search node cap (default $MODALQM_NODE_CAP or 1e8)")

    lat = sub.add_parser("lattice").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    q = lat.add_parser("validate")
    q.add_argument("--input", required=True)
    q = lat.add_parser("gen")
    q.add_argument("--kind", required=True, choices=["boolean", "mo", "product", "greechie"])
    q.add_argument("--n", type=_positive_int)
    q.add_argument("--of", action="append", default=[], metavar="KIND:N|PATH",
                   help="product factor, e.g. mo:2 or a lattice document (give twice)")
    q.add_argument("--input", help="blocks or pasting document for --kind greechie")
    q.add_argument("--output")

    q = sub.add_parser("valuate")
    q.add_argument("--input", required=True)
    q.add_argument("--count", action="store_true")
    q.add_argument("--heuristic", choices=["mcf"])
    cap_opt(q)

    modal = sub.add_parser("modal").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    q = modal.add_parser("diamond")
    q.add_argument("--input", required=True)
    q.add_argument("--element", required=True)
    q = modal.add_parser("space")
    q.add_argument("--input", required=True)
    q = modal.add_parser("mks")
    q.add_argument("--input", required=True)
    cap_opt(q)

    ks = sub.add_parser("ks").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    q = ks.add_parser("contexts")
    q.add_argument("--input", required=True)
    q = ks.add_parser("color")
    q.add_argument("--input", required=True)
    cap_opt(q)
    q = ks.add_parser("spectra")
    q.add_argument("--matrix", required=True)
    q.add_argument("--tol", type=_positive_float, default=1e-9)

    pw = sub.add_parser("powers").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    q = pw.add_parser("faculty")
    q.add_argument("--state", required=True)
    q.add_argument("--basis", required=True)
    q = pw.add_parser("potentia")
    q.add_argument("--state", required=True)
    q.add_argument("--basis")
    q.add_argument("--matrix", help="projector; reported as coarse potentia")
    q = pw.add_parser("evolve")
    q.add_argument("--state", required=True)
    q.add_argument("--hamiltonian", required=True)
    q.add_argument("--t", type=float, required=True)
    q.add_argument("--hbar", type=_positive_float, default=HBAR)
    q.add_argument("--basis", help="also report the potentia profile in this basis")
    q = pw.add_parser("sample")
    q.add_argument("--state", required=True)
    q.add_argument("--basis", required=True)
    q.add_argument("--n", type=_positive_int, required=True)
    q.add_argument("--seed", type=_nonneg_int, default=DEFAULT_SEED)

    corpus = sub.add_parser("corpus").add_subparsers(dest="verb", required=True, parser_class=_Parser)
    q = corpus.add_parser("run")
    q.add_argument("--manifest", default=None, help="defaults to the shipped manifest")
    return p


def parse_invocation(argv: Sequence[str]) -> Command:
    """Turn argv into a validated :class:`Command`; raises :class:`UsageError`."""
    ns = vars(build_parser().parse_args(list(argv)))
    group = ns.pop("group")
    verb = ns.pop("verb", None)
    name = group if verb is None else f"{group}-{verb}"
    inputs = {}
    for key in FILE_OPTIONS:
        path = ns.pop(key, None)
        if path is None:
            continue
        if not Path(path).is_file():
            raise UsageError(f"{name}: --{key} file not found: {path}")
        inputs[key] = path
    if name == "lattice-gen":
        for f in ns["of"]:
            if ":" not in f and not Path(f).is_file():
                raise UsageError(f"lattice-gen: --of expects KIND:N or a file, got {f!r}")
    options = {k: v for k, v in ns.items() if v is not None and v != [] and v is not False}
    return Command(name, inputs, options)


# -- handlers ---------------------------------------------------------------------


def _structure(cmd: Command):
    return D.structure_from_doc(D.read(cmd.inputs["input"]))


def _lattice(cmd: Command) -> OrthoLattice:
    s = _structure(cmd)
    if isinstance(s, BlockStructure):
        raise D.DocumentError(f"{cmd.inputs['input']}: blocks-only structure, a full lattice is required")
    return s


def _search_payload(out, S) -> tuple[dict, int]:
    payload = {"found": out.found, "exhaustive": out.exhaustive, "nodes_explored": out.nodes_explored}
    payload["witness"] = out.witness.witness_labels() if out.found else None
    return payload, (EXIT_OK if out.conclusive else EXIT_INCONCLUSIVE)


def h_lattice_validate(cmd):
    try:
        L = _structure(cmd)
    except LatticeError as exc:
        return {"valid": False, "law": exc.law, "counterexample": list(exc.witness), "message": str(exc)}, EXIT_INPUT
    if isinstance(L, BlockStructure):
        return {"valid": False, "blocks_only": True, "message": L.reason}, EXIT_INPUT
    verdict = is_boolean(L)
    return {
        "valid": True,
        "name": L.name,
        "elements": len(L),
        "is_boolean": verdict.holds,
        "distributivity_counterexample": list(verdict.counterexample) if verdict.counterexample else None,
        "center": [L.labels[x] for x in center(L)],
        "blocks": len(enumerate_blocks(L)),
    }, EXIT_OK


def _factor(text: str) -> OrthoLattice:
    if ":" in text and not Path(text).is_file():
        kind, n = text.split(":", 1)
        makers = {"boolean": boolean_algebra, "mo": mo}
        if kind not in makers:
            raise D.DocumentError(f"unknown factor kind {kind!r}")
        return makers[kind](int(n))
    s = D.structure_from_doc(D.read(text))
    if not isinstance(s, OrthoLattice):
        raise D.DocumentError(f"{text}: product factors must be lattices")
    return s


def h_lattice_gen(cmd):
    o = cmd.options
    kind = o["kind"]
    if kind in ("boolean", "mo"):
        if "n" not in o:
            raise D.DocumentError(f"--kind {kind} needs --n")
        S = boolean_algebra(o["n"]) if kind == "boolean" else mo(o["n"])
    elif kind == "product":
        if len(o.get("of", [])) != 2:
            raise D.DocumentError("--kind product needs exactly two --of factors")
        S = product(*(_factor(f) for f in o["of"]))
    else:
        if "input" not in cmd.inputs:
            raise D.DocumentError("--kind greechie needs --input with atoms and blocks")
        doc = D.read(cmd.inputs["input"])
        atoms, blocks = D._atoms_blocks(doc)
        S = greechie_paste(atoms, blocks, name=doc.get("name", ""))
    return D.structure_to_doc(S), EXIT_OK


def h_valuate(cmd):
    doc = D.read(cmd.inputs["input"])
    if doc.get("kind") == "vectors":
        S = blocks_from_vectors(D.vectors_from_doc(doc))
    else:
        S = D.structure_from_doc(doc)
    out = search_global_valuation(S, cap=cmd.options.get("cap"), heuristic=cmd.options.get("heuristic"))
    payload, code = _search_payload(out, S)
    payload["blocks"] = len(enumerate_blocks(S))
    if cmd.options.get("count"):
        payload["count"] = count_global_valuations(S)
    return payload, code


def h_modal_diamond(cmd):
    L = _lattice(cmd)
    p = L.index(cmd.options["element"])
    return {"element": L.labels[p], "diamond": L.labels[diamond(L, p)]}, EXIT_OK


def h_modal_space(cmd):
    L = _lattice(cmd)
    space = possibility_space(L)
    return {"possibility_space": space.labels(), "center": [L.labels[x] for x in center(L)]}, EXIT_OK


def h_modal_mks(cmd):
    L = _lattice(cmd)
    r = mks_check(L, cap=cmd.options.get("cap"))
    return dict(r.__dict__), (EXIT_OK if r.exhaustive else EXIT_INCONCLUSIVE)


def h_ks_contexts(cmd):
    vs = D.vectors_from_doc(D.read(cmd.inputs["input"]))
    ctxs = orthogonality_contexts(vs)
    return {
        "dimension": vs.dimension,
        "rays": len(vs),
        "contexts": [{"rays": [vs.labels[r] for r in c.rays], "complete": c.complete} for c in ctxs],
        "complete": sum(c.complete for c in ctxs),
    }, EXIT_OK


def h_ks_color(cmd):
    vs = D.vectors_from_doc(D.read(cmd.inputs["input"]))
    out = ks_coloring_search(vs, cap=cmd.options.get("cap"))
    payload = {"found": out.found, "exhaustive": out.exhaustive, "nodes_explored": out.nodes_explored,
               "witness": out.witness.labels() if out.found else None,
               "parity_obstruction": parity_obstruction(vs)}
    return payload, (EXIT_OK if out.conclusive else EXIT_INCONCLUSIVE)


def h_ks_spectra(cmd):
    M = D.matrix_from_doc(D.read(cmd.inputs["matrix"]))
    sa = spectral_algebra(M, cluster_tol=cmd.options.get("tol", 1e-9))
    return {
        "eigenvalues": list(sa.eigenvalues),
        "ranks": list(sa.ranks),
        "projectors": [[[D.complex_to_doc(c) for c in row] for row in P] for P in sa.projectors],
        "reconstruction_error": float(np.abs(sa.reconstruct() - M.matrix).max()),
    }, EXIT_OK


def _state_basis(cmd):
    psa = D.state_from_doc(D.read(cmd.inputs["state"]))
    b = D.basis_from_doc(D.read(cmd.inputs["basis"])) if "basis" in cmd.inputs else None
    return psa, b


def h_powers_faculty(cmd):
    psa, b = _state_basis(cmd)
    f = faculty(psa, b)
    return {
        "basis": b.name,
        "pairs": [{"power": lab, "amplitude": D.complex_to_doc(c)} for lab, c in f.pairs],
        "degenerate": f.degenerate,
    }, EXIT_OK


def h_powers_potentia(cmd):
    psa, b = _state_basis(cmd)
    payload = {}
    if b is not None:
        payload["basis"] = b.name
        payload["profile"] = potentia_profile(psa, b)
    if "matrix" in cmd.inputs:
        P = D.matrix_from_doc(D.read(cmd.inputs["matrix"])).matrix
        payload["coarse_potentia"] = coarse_potentia(psa, P)
    if not payload:
        raise D.DocumentError("powers potentia needs --basis or --matrix")
    return payload, EXIT_OK


def h_powers_evolve(cmd):
    psa, b = _state_basis(cmd)
    H = D.matrix_from_doc(D.read(cmd.inputs["hamiltonian"]))
    out = evolve(psa, H, cmd.options["t"], hbar=cmd.options.get("hbar", HBAR))
    payload = {"state": D.state_to_doc(out), "norm": float(np.linalg.norm(out.amplitudes))}
    if b is not None:
        payload["profile"] = potentia_profile(out, b)
    return payload, EXIT_OK


def h_powers_sample(cmd):
    psa, b = _state_basis(cmd)
    rec = sample_effectuations(psa, b, cmd.options["n"], seed=cmd.options.get("seed", DEFAULT_SEED))
    prof = potentia_profile(psa, b)
    freq = rec.frequencies()
    return {
        "basis": b.name,
        "n": rec.total,
        "seed": rec.seed,
        "counts": rec.counts,
        "frequencies": freq,
        "potentia": prof,
        "deviation": {k: abs(freq[k] - prof[k]) for k in rec.labels},
    }, EXIT_OK


def h_corpus_run(cmd):
    manifest = cmd.inputs.get("manifest")
    return run_corpus(manifest)


HANDLERS: dict[str, Callable] = {
    "lattice-validate": h_lattice_validate,
    "lattice-gen": h_lattice_gen,
    "valuate": h_valuate,
    "modal-diamond": h_modal_diamond,
    "modal-space": h_modal_space,
    "modal-mks": h_modal_mks,
    "ks-contexts": h_ks_contexts,
    "ks-color": h_ks_color,
    "ks-spectra": h_ks_spectra,
    "powers-faculty": h_powers_faculty,
    "powers-potentia": h_powers_potentia,
    "powers-evolve": h_powers_evolve,
    "powers-sample": h_powers_sample,
    "corpus-run": h_corpus_run,
}

INPUT_ERRORS = (D.DocumentError, LatticeError, VectorSetError, ValueError, KeyError, TypeError)


def execute(cmd: Command) -> tuple[dict, int]:
    """Run a command; returns the report (or emitted document) and exit code."""
    handler = HANDLERS.get(cmd.verb)
    if handler is None:
        raise UsageError(f"unknown verb {cmd.verb!r}")
    start = time.perf_counter()
    try:
        result, code = handler(cmd)
    except INPUT_ERRORS as exc:
        where = ", ".join(f"--{k} {v}" for k, v in cmd.inputs.items())
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        result, code = {"error": f"{type(exc).__name__}: {msg}", "source": where}, EXIT_INPUT
    elapsed = time.perf_counter() - start
    if cmd.verb == "lattice-gen" and code == EXIT_OK:
        return result, code
    report = {
        "format_version": D.FORMAT_VERSION,
        "kind": "report",
        "command": cmd.echo(),
        "result": result,
        "exit_code": code,
        "timing_s": round(elapsed, 6),
        "tool_version": __version__,
        "input_digests": {k: D.digest(v) for k, v in sorted(cmd.inputs.items())},
    }
    return report, code


# -- corpus ---------------------------------------------------------------------


def shipped_manifest() -> Path:
    return Path(str(resources.files("modalqm") / "fixtures" / "manifest.json"))


def _lookup(payload, dotted: str):
    cur = payload
    for part in dotted.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            raise KeyError(dotted)
    return cur


def run_corpus(manifest: str | Path | None = None) -> tuple[dict, int]:
    """Run every case of a manifest and compare results to expectations.

    A case names a ``verb``, its ``inputs`` (paths relative to the
    manifest), ``options``, and ``expect``: dotted result keys mapped to
    values, with ``exit_code`` compared against the command's exit code.
    """
    path = Path(manifest) if manifest else shipped_manifest()
    doc = D.read(path)
    cases = doc.get("cases", [])
    if not cases:
        log.warning("manifest %s has no cases", path)
    rows, failures = [], 0
    for case in cases:
        inputs = {}
        for k, v in case.get("inputs", {}).items():
            p = path.parent / v
            if not p.is_file():
                raise D.DocumentError(f"{path}: case {case.get('name')!r}: missing fixture {v}")
            inputs[k] = str(p)
        cmd = Command(case["verb"], inputs, dict(case.get("options", {})))
        report, code = execute(cmd)
        result = report.get("result", report)
        mismatches = []
        for key, want in case.get("expect", {}).items():
            try:
                got = code if key == "exit_code" else _lookup(result, key)
            except KeyError:
                got = "<missing>"
            if got != want:
                mismatches.append({"key": key, "expected": want, "got": got})
        failures += bool(mismatches)
        rows.append({"name": case.get("name", case["verb"]), "passed": not mismatches, "mismatches": mismatches})
    payload = {"manifest": path.name, "cases": len(rows), "failed": failures, "results": rows}
    if not rows:
        payload["warning"] = "empty manifest"
    return payload, (EXIT_MISMATCH if failures else EXIT_OK)


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_invocation(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    out, code = execute(cmd)
    text = D.render(out)
    dest = cmd.options.get("output")
    if dest and cmd.verb == "lattice-gen" and code == EXIT_OK:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
