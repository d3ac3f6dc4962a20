import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle
from pindist.errors import BackendUnsupported, DimensionMismatch, SizeCapExceeded
from pindist.field import make_field
from pindist.generators import generate
from pindist.pinned import (avpin_rhs_scaled, distance_set, exact_sum, pin_profile, pinned_distance_set,
                            second_moment_pairs, sweep, sweep_second_moments, total_second_moment,
                            write_sweep_csv)
from pindist.points import PointSet, read_point_file, write_point_file


@pytest.fixture(scope="module")
def F3():
    return make_field(3)


def test_profile_examples(F3):
    single = PointSet.from_points(F3, 2, [(0, 0)])
    prof = pin_profile(single, (0, 0))
    assert prof.counts.tolist() == [1, 0, 0]
    assert prof.second_moment == 1

    full = PointSet.full(F3, 2)
    for y in oracle.points(3, 2):
        prof = pin_profile(full, y)
        assert prof.counts.tolist() == [1, 4, 4]
        assert prof.second_moment == 33

    empty = PointSet.empty(F3, 2)
    prof = pin_profile(empty, (1, 2))
    assert prof.counts.tolist() == [0, 0, 0]
    assert prof.second_moment == 0


def test_profile_dimension_check(F3):
    with pytest.raises(DimensionMismatch):
        pin_profile(PointSet.full(F3, 2), (0, 0, 0))


def test_pinned_and_full_distance_sets(F3):
    full = PointSet.full(F3, 2)
    assert pinned_distance_set(full, (0, 0)) == {0, 1, 2}
    assert pinned_distance_set(PointSet.from_points(F3, 2, [(0, 0)]), (1, 0)) == {1}
    line = PointSet.from_points(F3, 2, [(t, 0) for t in range(3)])
    assert distance_set(line) == {0, 1}
    assert distance_set(PointSet.empty(F3, 2)) == set()
    assert distance_set(full) == {0, 1, 2}


@pytest.mark.parametrize("pk,d,size,seed", [((5, 1), 2, 8, 1), ((3, 2), 2, 12, 2), ((7, 1), 2, 10, 3),
                                            ((3, 1), 3, 9, 4)])
def test_profiles_match_oracle(pk, d, size, seed):
    F = make_field(*pk)
    G = oracle.GF(F.p, F.modulus)
    E = generate(F, d, f"random:{size}:seed={seed}")
    pts = E.points()
    for y in oracle.points(F.q, d)[:: max(1, F.q**d // 20)]:
        prof = pin_profile(E, y)
        assert prof.counts.tolist() == oracle.nu(G, pts, y)
        assert prof.second_moment == oracle.second_moment_by_pairs(G, pts, y)
        assert pinned_distance_set(E, y) == oracle.pinned_set(G, pts, y)
        # the pinned set lies inside the distance set of E with the pin added
        assert pinned_distance_set(E, y) <= distance_set(E.with_point(y))
    assert distance_set(E) == oracle.distance_set(G, pts)


@pytest.mark.parametrize("pk,d,size", [((5, 1), 2, 30), ((3, 2), 2, 40), ((3, 1), 3, 200)])
def test_second_moment_pair_decomposition(pk, d, size):
    F = make_field(*pk)
    E = generate(F, d, f"random:{min(size, F.q**d)}:seed=8")
    for y in oracle.points(F.q, d)[:10]:
        diag, off = second_moment_pairs(E, y)
        assert diag == E.size
        assert diag + off == pin_profile(E, y).second_moment


def test_sweep_examples(F3):
    full = PointSet.full(F3, 2)
    for backend in ("naive", "dft"):
        assert sweep_second_moments(full, backend).tolist() == [33] * 9
    single = PointSet.from_points(F3, 2, [(0, 0)])
    assert sweep_second_moments(single).tolist() == [1] * 9
    assert total_second_moment(full) == 297 == 3 * 81 + 3 * 2 * 9
    assert total_second_moment(single) == 9
    assert total_second_moment(PointSet.empty(F3, 2)) == 0


def test_backends_agree_f5_cubed():
    E = generate(make_field(5), 3, "random:30:seed=7")
    naive, dft = sweep(E, "naive"), sweep(E, "dft")
    assert np.array_equal(naive.second_moments, dft.second_moments)
    assert np.array_equal(naive.pinned_counts, dft.pinned_counts)


def test_dft_rejects_extension_field():
    E = generate(make_field(3, 2), 2, "full")
    with pytest.raises(BackendUnsupported):
        sweep(E, "dft")
    with pytest.raises(BackendUnsupported):
        sweep(E, "fft")


def test_sweep_cap():
    with pytest.raises(SizeCapExceeded):
        sweep(PointSet.empty(make_field(5), 3), cap=100)


def test_threaded_sweep_matches_serial():
    E = generate(make_field(7), 3, "random:100:seed=3")
    assert np.array_equal(sweep(E, threads=1).second_moments, sweep(E, threads=3).second_moments)


def test_sweep_matches_per_pin_profiles():
    E = generate(make_field(3, 2), 2, "random:25:seed=4")
    res = sweep(E)
    for i, y in enumerate(oracle.points(9, 2)):
        prof = pin_profile(E, y)
        assert res.second_moments[i] == prof.second_moment
        assert res.pinned_counts[i] == prof.support_size


def test_exact_sum_beyond_int64():
    values = np.full(10, 2**62, dtype=np.int64)
    assert exact_sum(values) == 10 * 2**62


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([(3, 1, 2), (5, 1, 2), (3, 2, 2), (3, 1, 3), (7, 1, 2)]),
       st.integers(0, 2**32), st.data())
def test_total_second_moment_identity(pkd, seed, data):
    p, k, d = pkd
    F = make_field(p, k)
    size = data.draw(st.integers(0, F.q**d))
    E = generate(F, d, f"random:{size}:seed={seed}")
    res = sweep(E)
    assert res.total() == avpin_rhs_scaled(F.q, d, size)
    # mass conservation and the lower bound sum nu^2 >= sum nu
    assert np.all(res.second_moments >= size)


def test_csv_format():
    E = PointSet.full(make_field(3), 2)
    buf = io.StringIO()
    write_sweep_csv(buf, sweep(E))
    lines = buf.getvalue().splitlines()
    assert lines[0] == "pin_index,second_moment,pinned_count"
    assert lines[1] == "0,33,3"
    assert len(lines) == 10


def test_point_file_roundtrip(tmp_path):
    F = make_field(3, 2)
    E = generate(F, 2, "random:7:seed=5")
    path = tmp_path / "set.txt"
    write_point_file(path, E)
    text = path.read_text()
    path.write_text("# comment\n" + text)
    assert read_point_file(path) == E
    assert text.splitlines()[0] == "3 2 2"
