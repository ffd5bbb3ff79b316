"""Powers, potentia and faculties of a state vector.

A state is stored as amplitudes in a fixed reference basis, but every
quantity exported here (potentia, profiles, sampling statistics,
evolution) is unchanged when one unitary is applied to the state, the
bases and the operators together.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .vectors import HermitianOperator

log = logging.getLogger(__name__)

NORM_TOL = 1e-10
BORN_TOL = 1e-12
RENORM_REPORT = 1e-6
DEFAULT_SEED = 20130917
HBAR = 1.0


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PSAState:
    """A normalized amplitude vector; equality ignores a global phase."""

    amplitudes: np.ndarray
    input_norm: float = 1.0

    def __post_init__(self):
        amps = _readonly(self.amplitudes)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a vector")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm!r}); use make_psa")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dimension(self) -> int:
        return len(self.amplitudes)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def __eq__(self, other):
        if not isinstance(other, PSAState):
            return NotImplemented
        if other.dimension != self.dimension:
            return False
        return abs(abs(np.vdot(self.amplitudes, other.amplitudes)) - 1) <= NORM_TOL

    __hash__ = None


def make_psa(amplitudes: Sequence[complex]) -> PSAState:
    """Normalize a nonzero vector into a state."""
    v = np.array(amplitudes, dtype=complex)
    norm = float(np.linalg.norm(v))
    if norm == 0:
        raise ValueError("the zero vector is not a state")
    if abs(norm - 1) > RENORM_REPORT:
        log.info("normalizing input of norm %.6g", norm)
    return PSAState(v / norm, input_norm=norm)


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthonormal basis; row ``i`` of ``vectors`` is the i-th element."""

    vectors: np.ndarray
    labels: tuple[str, ...]
    name: str = ""

    def __post_init__(self):
        vecs = _readonly(self.vectors)
        if vecs.ndim != 2 or vecs.shape[0] != vecs.shape[1]:
            raise ValueError(f"a basis needs d vectors of length d, got shape {vecs.shape}")
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != len(vecs) or len(set(labels)) != len(labels):
            raise ValueError("one unique label per basis vector")
        gram = vecs.conj() @ vecs.T
        err = float(np.abs(gram - np.eye(len(vecs))).max())
        if err > NORM_TOL:
            raise ValueError(f"basis is not orthonormal (max Gram deviation {err:.3g})")
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "labels", labels)

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i) -> np.ndarray:
        if isinstance(i, str):
            i = self.labels.index(i)
        return self.vectors[i]

    @classmethod
    def standard(cls, d: int) -> Basis:
        return cls(np.eye(d), tuple(f"e{k + 1}" for k in range(d)), name="standard")

    def same_as(self, other: Basis) -> bool:
        """Element-wise equal up to a phase on each element."""
        if self.dimension != other.dimension:
            return False
        overlaps = np.abs(np.einsum("ij,ij->i", self.vectors.conj(), other.vectors))
        return bool(np.all(np.abs(overlaps - 1) <= NORM_TOL))


_S = 1 / np.sqrt(2)
Z_BASIS = Basis(np.array([[1, 0], [0, 1]]), ("up_z", "down_z"), name="z")
X_BASIS = Basis(np.array([[_S, _S], [_S, -_S]]), ("up_x", "down_x"), name="x")
Y_BASIS = Basis(np.array([[_S, 1j * _S], [_S, -1j * _S]]), ("up_y", "down_y"), name="y")
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _check_dim(psa: PSAState, d: int) -> None:
    if psa.dimension != d:
        raise ValueError(f"dimension mismatch: state has {psa.dimension}, expected {d}")


@dataclass(frozen=True, eq=False)
class Faculty:
    """Ordered pairs (power, amplitude) of a state in one basis.

    ``degenerate`` marks a single-power expansion, which is not a
    superposition of more than one power.
    """

    basis: Basis
    amplitudes: np.ndarray

    @property
    def pairs(self) -> list[tuple[str, complex]]:
        return list(zip(self.basis.labels, (complex(c) for c in self.amplitudes)))

    @property
    def degenerate(self) -> bool:
        return int(np.sum(np.abs(self.amplitudes) > NORM_TOL)) < 2

    def reconstruct(self) -> np.ndarray:
        return self.amplitudes @ self.basis.vectors


def faculty(psa: PSAState, b: Basis) -> Faculty:
    _check_dim(psa, b.dimension)
    coeffs = _readonly(b.vectors.conj() @ psa.amplitudes)
    f = Faculty(b, coeffs)
    err = float(np.abs(f.reconstruct() - psa.amplitudes).max())
    if err > NORM_TOL:
        raise AssertionError(f"faculty does not reconstruct the state (error {err:.3g})")
    return f


def faculty_equal(f1: Faculty, f2: Faculty) -> bool:
    """Same basis (up to per-element phases) and amplitudes equal up to one
    global phase. Faculties of one state in different bases are unequal.
    """
    if not f1.basis.same_as(f2.basis):
        return False
    overlap = np.vdot(f1.amplitudes, f2.amplitudes)
    if abs(abs(overlap) - 1) > NORM_TOL:
        return False
    phase = overlap / abs(overlap)
    return bool(np.abs(f1.amplitudes * phase - f2.amplitudes).max() <= NORM_TOL)


def _unit(power) -> np.ndarray:
    v = np.array(power, dtype=complex)
    if v.ndim != 1:
        raise ValueError("a power is a single vector")
    norm = np.linalg.norm(v)
    if abs(norm - 1) > NORM_TOL:
        raise ValueError(f"power must be normalized (norm {norm:.12g})")
    return v


def potentia(psa: PSAState, power) -> float:
    """Born weight <psi|P|psi> of a rank-one power, cross-checked against Tr[P_psi P]."""
    alpha = _unit(power)
    _check_dim(psa, len(alpha))
    P = np.outer(alpha, alpha.conj())
    psi = psa.amplitudes
    expect = np.vdot(psi, P @ psi)
    trace = np.trace(psa.projector() @ P)
    if abs(expect - trace) > BORN_TOL:
        raise AssertionError(f"Born forms disagree: {expect} vs {trace}")
    return float(expect.real)


def coarse_potentia(psa: PSAState, projector: np.ndarray) -> float:
    """Tr[P_psi P] for a projector of any rank (an extension of the rank-one case)."""
    P = np.array(projector, dtype=complex)
    _check_dim(psa, P.shape[0])
    if np.abs(P @ P - P).max() > NORM_TOL or np.abs(P - P.conj().T).max() > NORM_TOL:
        raise ValueError("not an orthogonal projector")
    return float(np.trace(psa.projector() @ P).real)


def potentia_profile(psa: PSAState, b: Basis) -> dict[str, float]:
    _check_dim(psa, b.dimension)
    prof = {lab: potentia(psa, b[k]) for k, lab in enumerate(b.labels)}
    total = sum(prof.values())
    if abs(total - 1) > NORM_TOL:
        raise AssertionError(f"profile sums to {total!r}")
    return prof


@dataclass(frozen=True, eq=False)
class ElementaryProcess:
    projector: np.ndarray

    def __post_init__(self):
        P = _readonly(self.projector)
        checks = {
            "idempotent": np.abs(P @ P - P).max(),
            "self-adjoint": np.abs(P - P.conj().T).max(),
            "unit trace": abs(np.trace(P) - 1),
        }
        for law, err in checks.items():
            if err > NORM_TOL:
                raise ValueError(f"not a rank-one projector: {law} off by {err:.3g}")
        object.__setattr__(self, "projector", P)


def elementary_process(power) -> ElementaryProcess:
    alpha = _unit(power)
    return ElementaryProcess(np.outer(alpha, alpha.conj()))


@dataclass(frozen=True)
class EffectuationRecord:
    basis: str
    labels: tuple[str, ...]
    counts: dict[str, int]
    total: int
    seed: int

    def frequencies(self) -> dict[str, float]:
        return {k: c / self.total for k, c in self.counts.items()}


def sample_effectuations(psa: PSAState, b: Basis, n: int, seed: int = DEFAULT_SEED) -> EffectuationRecord:
    """Draw ``n`` outcomes by inverse CDF over the potentia profile.

    Uniforms come from numpy's PCG64 generator seeded with ``seed``,
    whose stream is the same on every platform. The state is not touched.
    """
    if n < 1:
        raise ValueError("need at least one draw")
    prof = potentia_profile(psa, b)
    p = np.array([prof[lab] for lab in b.labels])
    cdf = np.cumsum(p)
    cdf[-1] = 1.0
    u = np.random.Generator(np.random.PCG64(seed)).random(n)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), len(p) - 1)
    counts = np.bincount(idx, minlength=len(p))
    labels = b.labels
    record = EffectuationRecord(
        basis=b.name,
        labels=labels,
        counts={lab: int(c) for lab, c in zip(labels, counts)},
        total=n,
        seed=seed,
    )
    assert sum(record.counts.values()) == n
    return record


def evolve(psa: PSAState, H: HermitianOperator | np.ndarray, t: float, hbar: float = HBAR) -> PSAState:
    """Apply exp(-iHt/hbar) via the eigendecomposition of ``H``."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(H)
    _check_dim(psa, H.dimension)
    w, v = np.linalg.eigh(H.matrix)
    U = (v * np.exp(-1j * w * t / hbar)) @ v.conj().T
    out = U @ psa.amplitudes
    norm = float(np.linalg.norm(out))
    if abs(norm - 1) > NORM_TOL:
        raise AssertionError(f"evolution lost unitarity (norm {norm!r})")
    return PSAState(out)
