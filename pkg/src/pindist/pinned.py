"""Pinned counting functions, distance sets and full-space pin sweeps."""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import BackendUnsupported, ResidualTooLarge
from .field import TABLE_THRESHOLD
from .geometry import ROUNDING_MARGIN, norm_arr, norm_table
from .points import Point, PointSet, check_cap, check_point, coords_of

BACKENDS = ("naive", "dft")
# pins x members handled per vectorised block in the naive kernel
BLOCK_ELEMENTS = 1 << 20
THREADS_ENV = "PINDIST_THREADS"


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class PinProfile:
    pin: Point
    counts: np.ndarray
    support_size: int
    second_moment: int

    def __post_init__(self):
        # Pige2 and mass conservation hold for every profile
        total = int(self.counts.sum())
        assert self.support_size == int(np.count_nonzero(self.counts))
        assert self.second_moment >= total
        assert (self.second_moment == total) == bool(np.all(self.counts <= 1))

    @property
    def mass(self) -> int:
        return int(self.counts.sum())

    def support(self) -> set[int]:
        return {int(t) for t in np.flatnonzero(self.counts)}


def _histograms(E: PointSet, pin_coords: np.ndarray) -> np.ndarray:
    """nu_y(t) for a block of pins: shape (len(pins), q)."""
    F = E.field
    n_pins = pin_coords.shape[0]
    if E.size == 0:
        return np.zeros((n_pins, F.q), dtype=np.int64)
    table = _sqdiff_table(F)
    if table is None:
        dist = norm_arr(F, F.sub_arr(E.coords[None, :, :], pin_coords[:, None, :]))
    else:
        members = E.coords.T
        dist = table[pin_coords[:, 0, None], members[0][None, :]].astype(np.int64)
        for j in range(1, E.d):
            term = table[pin_coords[:, j, None], members[j][None, :]]
            dist = dist + term if F.k == 1 else F.add_arr(dist, term)
        if F.k == 1:
            dist %= F.q
    dist += (np.arange(n_pins, dtype=np.int64) * F.q)[:, None]
    return np.bincount(dist.ravel(), minlength=n_pins * F.q).reshape(n_pins, F.q)


@lru_cache(maxsize=16)
def _sqdiff_table(F) -> np.ndarray | None:
    """(a - b)^2 indexed by (a, b), for fields small enough to tabulate."""
    if F.q > TABLE_THRESHOLD:
        return None
    codes = np.arange(F.q, dtype=np.int64)
    dtype = np.uint16 if F.q <= 1 << 15 else np.uint32
    return F.squares[F.sub_arr(codes[:, None], codes[None, :])].astype(dtype)


def _block_size(E: PointSet) -> int:
    return max(1, BLOCK_ELEMENTS // max(1, E.size * E.d))


def iter_histograms(E: PointSet, pins=None, threads: int | None = None) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (offset, histogram block) over ``pins`` (flat indices; default all)."""
    if pins is None:
        pins = np.arange(E.space_size, dtype=np.int64)
    pins = np.asarray(pins, dtype=np.int64)
    block = _block_size(E)
    starts = range(0, pins.size, block)

    def work(start):
        return start, _histograms(E, coords_of(E.field, E.d, pins[start:start + block]))

    threads = default_threads() if threads is None else threads
    if threads <= 1:
        yield from map(work, starts)
    else:
        with ThreadPoolExecutor(threads) as pool:
            yield from pool.map(work, starts)


def pin_profile(E: PointSet, y: Sequence[int]) -> PinProfile:
    y = check_point(E, y)
    counts = _histograms(E, np.asarray([y], dtype=np.int64))[0]
    return PinProfile(y, counts, int(np.count_nonzero(counts)), int((counts * counts).sum()))


def pinned_distance_set(E: PointSet, y: Sequence[int]) -> set[int]:
    return pin_profile(E, y).support()


def distance_set_mask(E: PointSet, threads: int | None = None) -> np.ndarray:
    mask = np.zeros(E.q, dtype=bool)
    for _, hist in iter_histograms(E, E.indices, threads):
        mask |= (hist > 0).any(axis=0)
    return mask


def distance_set(E: PointSet, threads: int | None = None) -> set[int]:
    """Delta(E): the union of the pinned distance sets over pins in E."""
    return {int(t) for t in np.flatnonzero(distance_set_mask(E, threads))}


def second_moment_pairs(E: PointSet, y: Sequence[int]) -> tuple[int, int]:
    """(diagonal, off-diagonal) counts of ordered pairs (x, z) in E x E with
    ||x - y|| = ||z - y||, by direct pair enumeration."""
    y = check_point(E, y)
    dist = norm_arr(E.field, E.field.sub_arr(E.coords, np.asarray(y)[None, :]))
    same = dist[:, None] == dist[None, :]
    diag = int(np.trace(same))
    return diag, int(same.sum()) - diag


# ---------------------------------------------------------------------------
# sweeps over every pin of F_q^d
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    """Per-pin second moments and pinned-distance counts, indexed by flat pin index."""

    second_moments: np.ndarray
    pinned_counts: np.ndarray
    backend: str

    def total(self) -> int:
        return exact_sum(self.second_moments)


def exact_sum(values: np.ndarray) -> int:
    """Overflow-free integer sum of a non-negative int64 array."""
    if values.size == 0:
        return 0
    peak = int(values.max())
    if peak == 0:
        return 0
    chunk = max(1, (2**63 - 1) // peak)
    return sum(int(values[i:i + chunk].sum(dtype=np.int64)) for i in range(0, values.size, chunk))


def _sweep_naive(E: PointSet, threads: int | None) -> SweepResult:
    n = E.space_size
    moments = np.zeros(n, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    for start, hist in iter_histograms(E, None, threads):
        stop = start + hist.shape[0]
        moments[start:stop] = (hist * hist).sum(axis=1)
        counts[start:stop] = np.count_nonzero(hist, axis=1)
    return SweepResult(moments, counts, "naive")


def _sweep_dft(E: PointSet) -> SweepResult:
    """nu_.(t) as the cyclic cross-correlation of 1_E with 1_{S_t} over (Z/q)^d.

    sum_x 1_E(x) 1_{S_t}(x - y) has transform FFT(1_E) * conj(FFT(1_{S_t})).
    """
    F = E.field
    if F.k != 1:
        raise BackendUnsupported("the dft backend needs a prime field (k = 1)")
    shape = (F.q,) * E.d
    n = E.space_size
    moments = np.zeros(n, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    if E.size == 0:
        return SweepResult(moments, counts, "dft")
    spectrum = np.fft.fftn(E.bitmap.reshape(shape).astype(np.float64))
    norms = norm_table(F, E.d).reshape(shape)
    for t in range(F.q):
        sphere_hat = np.fft.fftn((norms == t).astype(np.float64))
        corr = np.fft.ifftn(spectrum * np.conj(sphere_hat)).real.ravel()
        nu = np.rint(corr)
        residual = float(np.max(np.abs(corr - nu)))
        if residual >= ROUNDING_MARGIN:
            raise ResidualTooLarge(f"correlation for t={t} is {residual:.3f} from an integer")
        nu = nu.astype(np.int64)
        moments += nu * nu
        counts += nu > 0
    return SweepResult(moments, counts, "dft")


def sweep(E: PointSet, backend: str = "naive", cap: int | None = None,
          threads: int | None = None) -> SweepResult:
    check_cap(E.field, E.d, cap)
    if backend == "naive":
        return _sweep_naive(E, threads)
    if backend == "dft":
        return _sweep_dft(E)
    raise BackendUnsupported(f"unknown backend {backend!r}; choose from {BACKENDS}")


def sweep_second_moments(E: PointSet, backend: str = "naive", cap: int | None = None,
                         threads: int | None = None) -> np.ndarray:
    return sweep(E, backend, cap, threads).second_moments


def total_second_moment(E: PointSet, cap: int | None = None, result: SweepResult | None = None) -> int:
    """Sum over every pin y of sum_t nu_y(t)^2, as an exact Python int."""
    if result is None:
        result = sweep(E, "naive", cap)
    return result.total()


def avpin_rhs_scaled(q: int, d: int, size: int) -> int:
    """q^d times the pin average predicted for a set of ``size`` points."""
    return q ** (d - 1) * (size * size + (q - 1) * size)


def write_sweep_csv(path_or_file, result: SweepResult) -> None:
    own = isinstance(path_or_file, (str, os.PathLike))
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["pin_index", "second_moment", "pinned_count"])
        for i, (m, c) in enumerate(zip(result.second_moments.tolist(), result.pinned_counts.tolist())):
            writer.writerow([i, m, c])
    finally:
        if own:
            fh.close()


