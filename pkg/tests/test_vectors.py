import itertools
import random

import numpy as np
import pytest

from modalqm.lattice import BlockStructure
from modalqm.valuation import count_global_valuations, search_global_valuation
from modalqm.vectors import (
    HermitianOperator,
    Surd,
    VectorSet,
    VectorSetError,
    blocks_from_vectors,
    inner,
    is_coloring,
    ks_coloring_search,
    load_vector_set,
    orthogonality_contexts,
    parity_obstruction,
    proportional,
    spectral_algebra,
)

from conftest import load, load_vectors

# all rays of {-1,0,1}^3 up to sign
POOL3 = [v for v in itertools.product((-1, 0, 1), repeat=3) if any(v) and next(x for x in v if x) > 0]


def int_set(rays, name=""):
    return load_vector_set({"dimension": len(rays[0]), "rays": [list(r) for r in rays], "name": name})


def brute_colorings(rays):
    """All 0/1 maps with exactly one 1 in every orthogonal basis inside the
    set and no two orthogonal 1s, by plain enumeration."""
    d = len(rays[0])
    n = len(rays)
    orth = {(i, j) for i, j in itertools.combinations(range(n), 2) if sum(a * b for a, b in zip(rays[i], rays[j])) == 0}
    bases = [
        c
        for c in itertools.combinations(range(n), d)
        if all((i, j) in orth for i, j in itertools.combinations(c, 2))
    ]
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        if any(bits[i] and bits[j] for i, j in orth):
            continue
        if all(sum(bits[r] for r in b) == 1 for b in bases):
            out.append(bits)
    return out


class TestSurd:
    def test_arithmetic(self):
        r2 = Surd(0, 1)
        assert r2 * r2 == 2
        assert (Surd(1, 1) * Surd(1, -1)) == -1
        assert Surd(1, 1) - Surd(1, 1) == 0

    @pytest.mark.parametrize(
        "text, a, b",
        [("1-√2", 1, -1), ("1/2+3√2", 0.5, 3), ("√2", 0, 1), ("-√2", 0, -1), ("7", 7, 0), ("-2/3", -2 / 3, 0)],
    )
    def test_parse_string(self, text, a, b):
        s = Surd.parse(text)
        assert float(s.a) == pytest.approx(a) and float(s.b) == pytest.approx(b)

    def test_parse_pair(self):
        assert Surd.parse([1, 2]) == Surd(1, 2)

    @pytest.mark.parametrize("bad", [True, 1.5, "x", [1, 2, 3], None])
    def test_parse_rejects(self, bad):
        with pytest.raises(VectorSetError):
            Surd.parse(bad)

    def test_float(self):
        assert float(Surd(1, 1)) == pytest.approx(1 + 2**0.5)

    def test_exact_orthogonality(self):
        u = (Surd(1), Surd(0, 1))
        v = (Surd(0, 1), Surd(-1))
        assert not inner(u, v)
        assert proportional(u, (Surd(0, 1), Surd(2)))


class TestLoad:
    def test_fixture(self):
        vs = load_vectors("dim2_sqrt2.vec")
        assert vs.labels == ("u", "u_perp", "up", "down")

    def test_bare_lists(self):
        vs = int_set([(1, 0), (0, 1)])
        assert vs.labels == ("r1", "r2")

    def test_zero_vector(self):
        with pytest.raises(VectorSetError, match="zero"):
            int_set([(0, 0), (1, 0)])

    def test_wrong_length(self):
        with pytest.raises(VectorSetError, match="coordinates"):
            load_vector_set({"dimension": 3, "rays": [[1, 0]]})

    def test_duplicate_ray(self):
        with pytest.raises(VectorSetError, match="duplicate"):
            int_set([(1, 1, 0), (-2, -2, 0)])

    def test_missing_fields(self):
        with pytest.raises(VectorSetError):
            load_vector_set({"rays": []})

    def test_duplicate_labels(self):
        with pytest.raises(VectorSetError, match="unique"):
            VectorSet(2, ((Surd(1), Surd(0)), (Surd(0), Surd(1))), ("a", "a"))


class TestContexts:
    def test_std3(self):
        ctxs = orthogonality_contexts(load_vectors("std3.vec"))
        assert ctxs == [type(ctxs[0])((0, 1, 2), True)]

    def test_dim2_two_bases(self):
        ctxs = orthogonality_contexts(load_vectors("dim2_two_bases.vec"))
        assert len(ctxs) == 2 and all(c.complete for c in ctxs)

    def test_dim2_nonorth(self):
        ctxs = orthogonality_contexts(load_vectors("dim2_nonorth.vec"))
        assert all(not c.complete for c in ctxs)

    def test_cabello(self):
        ctxs = orthogonality_contexts(load_vectors("cabello18.vec"))
        complete = [c for c in ctxs if c.complete]
        assert len(complete) == 9
        inc = [sum(r in c.rays for c in complete) for r in range(18)]
        assert inc == [2] * 18

    def test_peres(self):
        vs = load_vectors("peres33.vec")
        assert len(vs) == 33
        assert sum(c.complete for c in orthogonality_contexts(vs)) == 16


class TestColoring:
    def test_std3_colorings(self):
        vs = load_vectors("std3.vec")
        out = ks_coloring_search(vs)
        assert out.found and sum(out.witness.assignment) == 1

    def test_cabello_uncolorable(self):
        vs = load_vectors("cabello18.vec")
        out = ks_coloring_search(vs)
        assert not out.found and out.exhaustive
        assert parity_obstruction(vs)

    def test_peres_uncolorable(self):
        out = ks_coloring_search(load_vectors("peres33.vec"))
        assert not out.found and out.exhaustive

    def test_peres_no_parity_argument(self):
        # uncolorable, but not for the parity reason
        assert not parity_obstruction(load_vectors("peres33.vec"))

    def test_cap(self):
        out = ks_coloring_search(load_vectors("peres33.vec"), cap=5)
        assert not out.found and not out.exhaustive

    def test_is_coloring_rejects_orthogonal_ones(self):
        vs = int_set([(1, 0, 0), (0, 1, 0)])
        assert not is_coloring(vs, (1, 1))
        assert is_coloring(vs, (0, 0))

    @pytest.mark.parametrize("name", ["dim2_pair.vec", "dim2_two_bases.vec", "dim2_sqrt2.vec", "dim2_nonorth.vec"])
    def test_dimension_two_always_colorable(self, name):
        assert ks_coloring_search(load_vectors(name)).found

    def test_random_dimension_two(self):
        rng = random.Random(7)
        for _ in range(20):
            pool = [(1, k) for k in range(-4, 5)] + [(k, 1) for k in range(-4, 5) if k not in (1, -1)] + [(0, 1)]
            pool = list(dict.fromkeys(pool))
            rays = rng.sample(pool, 8)
            try:
                vs = int_set(rays)
            except VectorSetError:
                continue
            assert ks_coloring_search(vs).found


def random_sets(count, seed=11):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        rays = rng.sample(POOL3, rng.randint(5, 12))
        out.append(rays)
    return out


@pytest.mark.parametrize("rays", random_sets(25), ids=lambda r: f"{len(r)}rays")
def test_engines_agree_with_brute_force(rays):
    vs = int_set(rays)
    oracle = brute_colorings(rays)
    col = ks_coloring_search(vs)
    assert col.found == bool(oracle)
    if col.found:
        assert col.witness.assignment in oracle
    bs = blocks_from_vectors(vs)
    val = search_global_valuation(bs)
    assert val.found == bool(oracle)
    # with padding, valuations of the blocks are the colorings one to one
    assert count_global_valuations(bs) == len(oracle)


def subsets_of(name, count, seed):
    vs = load_vectors(name)
    rng = random.Random(seed)
    out = [vs]
    for _ in range(count):
        keep = sorted(rng.sample(range(len(vs)), len(vs) - rng.randint(1, 4)))
        out.append(VectorSet(vs.dimension, tuple(vs.rays[i] for i in keep), tuple(vs.labels[i] for i in keep)))
    return out


@pytest.mark.parametrize(
    "vs", subsets_of("peres33.vec", 12, 3) + subsets_of("cabello18.vec", 12, 4), ids=lambda v: f"{len(v)}rays"
)
def test_engines_agree_on_ks_subsets(vs):
    col = ks_coloring_search(vs)
    val = search_global_valuation(blocks_from_vectors(vs))
    assert col.exhaustive and val.exhaustive
    assert col.found == val.found


class TestBlocksFromVectors:
    def test_cabello_matches_shipped_blocks(self):
        bs = blocks_from_vectors(load_vectors("cabello18.vec"))
        complete = [b for b in bs.blocks if all(a < 18 for a in b)]
        assert len(complete) == 9
        shipped = load("cabello18.blk")
        assert isinstance(shipped, BlockStructure) and len(shipped.blocks) == 9

    def test_complete_only_rejects(self):
        with pytest.raises(VectorSetError, match="incomplete"):
            blocks_from_vectors(load_vectors("cabello18.vec"), complete_only=True)

    def test_complete_only_accepts(self):
        bs = blocks_from_vectors(load_vectors("std3.vec"), complete_only=True)
        assert bs.blocks == ((0, 1, 2),)

    @pytest.mark.parametrize("name", ["cabello18.vec", "peres33.vec"])
    def test_no_valuation(self, name):
        out = search_global_valuation(blocks_from_vectors(load_vectors(name)))
        assert not out.found and out.exhaustive

    def test_shipped_cabello_blocks_no_valuation(self):
        out = search_global_valuation(load("cabello18.blk"))
        assert not out.found and out.exhaustive


class TestSpectral:
    def test_pauli_z(self):
        sa = spectral_algebra(np.diag([1.0, -1.0]))
        assert sa.eigenvalues == pytest.approx((-1.0, 1.0))
        assert sa.ranks == (1, 1)

    def test_degenerate(self):
        sa = spectral_algebra(np.diag([1.0, 1.0, 2.0]))
        assert sa.eigenvalues == pytest.approx((1.0, 2.0))
        assert sa.ranks == (2, 1)

    def test_non_hermitian(self):
        with pytest.raises(ValueError, match="Hermitian"):
            HermitianOperator([[0, 1], [0, 0]])

    def test_non_square(self):
        with pytest.raises(ValueError, match="square"):
            HermitianOperator(np.zeros((2, 3)))

    @pytest.mark.parametrize("seed", range(10))
    def test_random_reconstruction(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 7))
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        m = (a + a.conj().T) / 2
        sa = spectral_algebra(m)
        assert np.abs(sa.reconstruct() - m).max() < 1e-8
        total = sum(sa.projectors)
        assert np.abs(total - np.eye(d)).max() < 1e-8
        for p, q in itertools.combinations(sa.projectors, 2):
            assert np.abs(p @ q).max() < 1e-8
        for p in sa.projectors:
            assert np.abs(p @ p - p).max() < 1e-8
