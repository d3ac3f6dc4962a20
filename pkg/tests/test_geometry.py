import numpy as np
import pytest

import oracle
from pindist.errors import DimensionMismatch, SizeCapExceeded
from pindist.field import make_field
from pindist.geometry import (bisector_charsum_matrix, bisector_count, bisector_count_charsum,
                              bisector_count_closed_form, bisector_count_matrix, character, character_table,
                              distance, norm, norm_table, sphere, sphere_sizes)
from pindist.points import point_add, point_neg


@pytest.fixture(scope="module")
def F3():
    return make_field(3)


def test_norm_examples(F3):
    assert norm(F3, (0, 0)) == 0
    assert norm(F3, (1, 2)) == 2


def test_distance_examples(F3):
    assert distance(F3, (0, 0), (1, 0)) == 1
    assert distance(F3, (1, 2), (2, 1)) == 2
    assert distance(F3, (2, 1), (2, 1)) == 0
    with pytest.raises(DimensionMismatch):
        distance(F3, (0, 0), (0, 0, 0))


@pytest.mark.parametrize("pk,d", [((3, 1), 2), ((5, 1), 3), ((3, 2), 2), ((7, 1), 2)])
def test_norm_table_matches_oracle(pk, d):
    F = make_field(*pk)
    G = oracle.GF(F.p, F.modulus)
    assert norm_table(F, d).tolist() == [oracle.norm(G, v) for v in oracle.points(F.q, d)]


def test_sphere_sizes_f3(F3):
    assert len(sphere(F3, 2, 0)) == 1
    assert len(sphere(F3, 2, 1)) == 4
    assert len(sphere(F3, 2, 2)) == 4
    assert sphere(F3, 2, 0).points() == [(0, 0)]


@pytest.mark.parametrize("pk,d", [((3, 1), 1), ((5, 1), 2), ((3, 2), 3), ((7, 1), 3), ((5, 2), 2)])
def test_spheres_partition_space(pk, d):
    F = make_field(*pk)
    assert sphere_sizes(F, d).sum() == F.q**d


def test_sphere_cap():
    with pytest.raises(SizeCapExceeded):
        sphere(make_field(5), 3, 1, cap=100)


@pytest.mark.parametrize("pk", [(3, 1), (5, 1), (3, 2), (5, 2)])
def test_norm_symmetry_and_translation_invariance(pk):
    F = make_field(*pk)
    rng = np.random.default_rng(11)
    for _ in range(500):
        x, y, c = (tuple(int(v) for v in rng.integers(0, F.q, 3)) for _ in range(3))
        assert norm(F, point_neg(F, x)) == norm(F, x)
        assert distance(F, x, y) == distance(F, y, x)
        assert distance(F, point_add(F, x, c), point_add(F, y, c)) == distance(F, x, y)


# ---------------------------------------------------------------------------
# characters
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("pk", [(3, 1), (3, 2), (5, 2), (7, 1), (3, 3)])
def test_character_is_nontrivial_homomorphism(pk):
    F = make_field(*pk)
    chi = character_table(F)
    assert np.allclose(np.abs(chi), 1.0, atol=1e-12)
    assert not np.allclose(chi, 1.0)
    # orthogonality: the character sums to zero over the field
    assert abs(chi.sum()) < 1e-9
    for a in F.elements():
        assert abs(character(F, a) - chi[a]) < 1e-12
        for b in F.elements():
            assert abs(chi[F.add(a, b)] - chi[a] * chi[b]) < 1e-12


# ---------------------------------------------------------------------------
# bisectors
# ---------------------------------------------------------------------------

def test_bisector_examples(F3):
    assert bisector_count(F3, (0, 0), (1, 0)) == 3
    assert bisector_count(F3, (1, 1), (1, 1)) == 9
    F5 = make_field(5)
    assert bisector_count(F5, (0, 1, 2), (4, 4, 0)) == 25


def test_bisector_matches_oracle_enumeration():
    F = make_field(3, 2)
    G = oracle.GF(F.p, F.modulus)
    rng = np.random.default_rng(5)
    for _ in range(10):
        x, z = (tuple(int(v) for v in rng.integers(0, 9, 2)) for _ in range(2))
        assert bisector_count(F, x, z) == oracle.bisector(G, 2, x, z)


def test_charsum_examples(F3):
    assert bisector_count_charsum(F3, (0, 0), (1, 0)) == pytest.approx(3.0, abs=1e-9)
    assert bisector_count_charsum(F3, (2, 2), (2, 2)) == pytest.approx(9.0, abs=1e-9)
    F9 = make_field(3, 2)
    assert bisector_count_charsum(F9, (0, 0), (3, 1)) == pytest.approx(9.0, abs=1e-9)


@pytest.mark.parametrize("pk,d", [((5, 1), 3), ((3, 2), 2), ((3, 3), 2), ((7, 1), 2)])
def test_closed_form_agrees_with_enumeration(pk, d):
    F = make_field(*pk)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, z = (tuple(int(v) for v in rng.integers(0, F.q, d)) for _ in range(2))
        assert bisector_count_closed_form(F, x, z) == bisector_count(F, x, z)
    x = (1,) * d
    assert bisector_count_closed_form(F, x, x) == F.q**d


def test_closed_form_used_above_cap():
    F = make_field(101)
    assert bisector_count(F, (0, 0, 0, 0), (1, 0, 0, 0), cap=1000) == 101**3


@pytest.mark.parametrize("pk,d", [((3, 1), 2), ((5, 1), 2), ((3, 2), 2), ((3, 1), 3)])
def test_matrix_paths_agree_with_pairwise(pk, d):
    F = make_field(*pk)
    counts = bisector_count_matrix(F, d)
    charsum = bisector_charsum_matrix(F, d)
    pts = oracle.points(F.q, d)
    rng = np.random.default_rng(9)
    for i, j in rng.integers(0, len(pts), (15, 2)):
        assert counts[i, j] == bisector_count(F, pts[i], pts[j])
        assert charsum[i, j] == pytest.approx(bisector_count_charsum(F, pts[i], pts[j]), abs=1e-9)
