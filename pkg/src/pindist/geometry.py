"""Norms, distances, spheres and bisector counts in F_q^d."""

from __future__ import annotations

import cmath
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, ResidualTooLarge, SizeCapExceeded
from .field import FieldSpec
from .points import PointSet, check_cap, coords_of, point_sub

ENUMERATION_CAP = 1 << 20
# all-pairs bisector matrices hold q^d x q^d complex entries
MATRIX_CAP = 1 << 11

IMAG_TOLERANCE = 1e-6
ROUNDING_MARGIN = 0.25


def norm(F: FieldSpec, x: Sequence[int]) -> int:
    """Sum of squared coordinates, computed in F_q."""
    total = 0
    for c in x:
        total = F.add(total, F.mul(c, c))
    return total


def distance(F: FieldSpec, x: Sequence[int], y: Sequence[int]) -> int:
    if len(x) != len(y):
        raise DimensionMismatch(f"dimensions {len(x)} and {len(y)} differ")
    return norm(F, point_sub(F, x, y))


def norm_arr(F: FieldSpec, coords) -> np.ndarray:
    """Norms of an array of points; the last axis holds coordinates."""
    coords = np.asarray(coords, dtype=np.int64)
    sq = F.squares[coords]
    if F.k == 1:
        return sq.sum(axis=-1) % F.p
    out = sq[..., 0]
    for j in range(1, coords.shape[-1]):
        out = F.add_arr(out, sq[..., j])
    return out


@lru_cache(maxsize=16)
def norm_table(F: FieldSpec, d: int) -> np.ndarray:
    """Norm of every point of F_q^d, indexed by flat index (read-only)."""
    n = F.q**d
    dtype = np.uint16 if F.q <= 1 << 16 else np.uint32
    out = np.empty(n, dtype=dtype)
    chunk = 1 << 18
    for start in range(0, n, chunk):
        idx = np.arange(start, min(n, start + chunk), dtype=np.int64)
        out[start:start + idx.size] = norm_arr(F, coords_of(F, d, idx))
    out.setflags(write=False)
    return out


def sphere(F: FieldSpec, d: int, t: int, cap: int | None = None) -> PointSet:
    """The level set {v : ||v|| = t}."""
    check_cap(F, d, cap)
    F._check(t)
    return PointSet.from_indices(F, d, np.flatnonzero(norm_table(F, d) == t), cap)


def sphere_sizes(F: FieldSpec, d: int, cap: int | None = None) -> np.ndarray:
    check_cap(F, d, cap)
    return np.bincount(norm_table(F, d), minlength=F.q).astype(np.int64)


# ---------------------------------------------------------------------------
# additive character
# ---------------------------------------------------------------------------

def character(F: FieldSpec, u: int) -> complex:
    """The canonical nontrivial additive character exp(2 pi i Tr(u) / p)."""
    return cmath.exp(2j * cmath.pi * F.trace(u) / F.p)


@lru_cache(maxsize=16)
def character_table(F: FieldSpec) -> np.ndarray:
    table = np.exp(2j * np.pi * F.trace_table / F.p)
    table.setflags(write=False)
    return table


# ---------------------------------------------------------------------------
# bisectors
# ---------------------------------------------------------------------------

def _pin_norms(F: FieldSpec, x: Sequence[int], pins: np.ndarray) -> np.ndarray:
    return norm_arr(F, F.sub_arr(np.asarray(x, dtype=np.int64)[None, :], pins))


def _check_pair(F: FieldSpec, x, z) -> int:
    if len(x) != len(z):
        raise DimensionMismatch(f"dimensions {len(x)} and {len(z)} differ")
    for c in (*x, *z):
        F._check(c)
    return len(x)


def bisector_count(F: FieldSpec, x: Sequence[int], z: Sequence[int],
                   cap: int = ENUMERATION_CAP) -> int:
    """#{y : ||x - y|| = ||z - y||}.

    Enumerates every pin when q^d <= cap; above the cap, pairs x != z go
    through the linear-equation count instead.
    """
    d = _check_pair(F, x, z)
    if F.q**d > cap:
        return bisector_count_closed_form(F, x, z)
    pins = coords_of(F, d, np.arange(F.q**d))
    return int(np.count_nonzero(_pin_norms(F, x, pins) == _pin_norms(F, z, pins)))


def bisector_count_closed_form(F: FieldSpec, x: Sequence[int], z: Sequence[int]) -> int:
    """Solution count of 2(z - x).y = ||z|| - ||x||.

    A nonzero linear form on F_q^d takes each value q^(d-1) times; when x = z
    the form vanishes and every pin solves the equation.
    """
    d = _check_pair(F, x, z)
    normal = [F.add(c, c) for c in point_sub(F, z, x)]
    rhs = F.sub(norm(F, z), norm(F, x))
    if any(normal):
        return F.q ** (d - 1)
    return F.q**d if rhs == 0 else 0


def _check_residual(values: np.ndarray, scale: float, what: str) -> None:
    imag = float(np.max(np.abs(values.imag), initial=0.0))
    if imag > IMAG_TOLERANCE * scale:
        raise ResidualTooLarge(f"{what}: imaginary residual {imag:.3e} exceeds {IMAG_TOLERANCE} * {scale}")
    dev = float(np.max(np.abs(values.real - np.rint(values.real)), initial=0.0))
    if dev >= ROUNDING_MARGIN:
        raise ResidualTooLarge(f"{what}: real part is {dev:.3f} away from an integer")


def bisector_count_charsum(F: FieldSpec, x: Sequence[int], z: Sequence[int],
                           cap: int = ENUMERATION_CAP) -> float:
    """q^-1 sum_y sum_s chi(s (||x - y|| - ||z - y||)), evaluated in floating point."""
    d = _check_pair(F, x, z)
    n = F.q**d
    if n > cap:
        raise SizeCapExceeded(f"q^d = {n} exceeds the enumeration cap {cap}")
    pins = coords_of(F, d, np.arange(n))
    diff = F.sub_arr(_pin_norms(F, x, pins), _pin_norms(F, z, pins))
    chi = character_table(F)
    total = 0j
    for s in range(F.q):
        total += chi[F.mul_arr(s, diff)].sum()
    value = total / F.q
    _check_residual(np.array([value]), n, "bisector character sum")
    return value.real


def distance_matrix(F: FieldSpec, d: int, cap: int = MATRIX_CAP) -> np.ndarray:
    """M[x, y] = ||x - y|| for every pair of flat indices."""
    n = F.q**d
    if n > cap:
        raise SizeCapExceeded(f"q^d = {n} exceeds the all-pairs cap {cap}")
    pts = coords_of(F, d, np.arange(n))
    return norm_arr(F, F.sub_arr(pts[:, None, :], pts[None, :, :]))


def bisector_count_matrix(F: FieldSpec, d: int, cap: int = MATRIX_CAP) -> np.ndarray:
    """B[x, z] = bisector_count(x, z) for all pairs, by exhaustive pin enumeration.

    Sum over t of I_t I_t^T, where I_t[x, y] marks ||x - y|| = t.
    """
    M = distance_matrix(F, d, cap)
    out = np.zeros(M.shape, dtype=np.float64)
    for t in range(F.q):
        I = (M == t).astype(np.float64)
        out += I @ I.T
    return np.rint(out).astype(np.int64)


def bisector_charsum_matrix(F: FieldSpec, d: int, cap: int = MATRIX_CAP) -> np.ndarray:
    """All-pairs character-sum evaluation.

    chi(s(a - b)) = chi(s a) conj(chi(s b)) turns the pin sum for each
    multiplier s into a Hermitian matrix product.
    """
    M = distance_matrix(F, d, cap)
    chi = character_table(F)
    acc = np.zeros(M.shape, dtype=np.complex128)
    for s in range(F.q):
        A = chi[F.mul_arr(s, M)]
        acc += A @ A.conj().T
    acc /= F.q
    _check_residual(acc, M.shape[0], "bisector character-sum matrix")
    return acc.real

