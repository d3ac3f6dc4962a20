"""Points of F_q^d and immutable point sets over flat index codes.

A point is a d-tuple of element codes.  Its flat index is the row-major
mixed-radix number sum_j coords[j] * q^(d-1-j), matching numpy's C order, so a
full-space array of shape (q,)*d can be raveled against flat indices directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, FileFormatError, SizeCapExceeded
from .field import FieldSpec, make_field

DEFAULT_CAP = 1 << 26

Point = tuple[int, ...]


def check_cap(F: FieldSpec, d: int, cap: int | None = None) -> int:
    """Return q^d, raising SizeCapExceeded when it is beyond ``cap``."""
    if d < 1:
        raise ValueError("dimension d must be >= 1")
    size = F.q**d
    cap = DEFAULT_CAP if cap is None else cap
    if size > cap:
        raise SizeCapExceeded(f"q^d = {F.q}^{d} = {size} exceeds cap {cap}")
    return size


def flat_index(F: FieldSpec, point: Sequence[int]) -> int:
    idx = 0
    for c in point:
        if not 0 <= c < F.q:
            raise ValueError(f"coordinate {c} out of range for F_{F.q}")
        idx = idx * F.q + c
    return idx


def point_of(F: FieldSpec, d: int, index: int) -> Point:
    coords = []
    for _ in range(d):
        index, c = divmod(index, F.q)
        coords.append(c)
    if index:
        raise ValueError("flat index out of range")
    return tuple(reversed(coords))


def coords_of(F: FieldSpec, d: int, indices) -> np.ndarray:
    """Coordinate array of shape (len(indices), d) for an array of flat indices."""
    idx = np.asarray(indices, dtype=np.int64)
    out = np.empty(idx.shape + (d,), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        idx, out[..., j] = np.divmod(idx, F.q)
    return out


def flat_of(F: FieldSpec, coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    idx = np.zeros(coords.shape[:-1], dtype=np.int64)
    for j in range(coords.shape[-1]):
        idx = idx * F.q + coords[..., j]
    return idx


def point_add(F: FieldSpec, x: Sequence[int], y: Sequence[int]) -> Point:
    if len(x) != len(y):
        raise DimensionMismatch(f"dimensions {len(x)} and {len(y)} differ")
    return tuple(F.add(a, b) for a, b in zip(x, y))


def point_sub(F: FieldSpec, x: Sequence[int], y: Sequence[int]) -> Point:
    if len(x) != len(y):
        raise DimensionMismatch(f"dimensions {len(x)} and {len(y)} differ")
    return tuple(F.sub(a, b) for a, b in zip(x, y))


def point_neg(F: FieldSpec, x: Sequence[int]) -> Point:
    return tuple(F.neg(a) for a in x)


@dataclass(frozen=True, eq=False)
class PointSet:
    """A subset E of F_q^d.

    ``indices`` is the sorted array of member flat indices; membership tests
    go through a lazily built boolean bitmap over the whole space.
    """

    field: FieldSpec
    d: int
    indices: np.ndarray = dc_field(repr=False)

    @classmethod
    def from_indices(cls, F: FieldSpec, d: int, indices: Iterable[int], cap: int | None = None) -> "PointSet":
        space = check_cap(F, d, cap)
        idx = np.unique(np.fromiter(indices, dtype=np.int64) if not isinstance(indices, np.ndarray)
                        else indices.astype(np.int64, copy=False))
        if idx.size and (idx[0] < 0 or idx[-1] >= space):
            raise ValueError("flat index out of range")
        idx.setflags(write=False)
        return cls(F, d, idx)

    @classmethod
    def from_points(cls, F: FieldSpec, d: int, points: Iterable[Sequence[int]], cap: int | None = None) -> "PointSet":
        flat = []
        for pt in points:
            if len(pt) != d:
                raise DimensionMismatch(f"point {tuple(pt)} is not in dimension {d}")
            flat.append(flat_index(F, pt))
        return cls.from_indices(F, d, flat, cap)

    @classmethod
    def empty(cls, F: FieldSpec, d: int) -> "PointSet":
        return cls.from_indices(F, d, [])

    @classmethod
    def full(cls, F: FieldSpec, d: int, cap: int | None = None) -> "PointSet":
        return cls.from_indices(F, d, np.arange(check_cap(F, d, cap), dtype=np.int64), cap)

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def space_size(self) -> int:
        return self.field.q**self.d

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        for i in self.indices:
            yield point_of(self.field, self.d, int(i))

    def __contains__(self, point) -> bool:
        if isinstance(point, (int, np.integer)):
            i = int(point)
        else:
            if len(point) != self.d:
                return False
            i = flat_index(self.field, point)
        return 0 <= i < self.space_size and bool(self.bitmap[i])

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (self.field == other.field and self.d == other.d
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.field, self.d, self.indices.tobytes()))

    @cached_property
    def bitmap(self) -> np.ndarray:
        bits = np.zeros(self.space_size, dtype=bool)
        bits[self.indices] = True
        return bits

    @cached_property
    def coords(self) -> np.ndarray:
        return coords_of(self.field, self.d, self.indices)

    def points(self) -> list[Point]:
        return list(self)

    def union(self, other: "PointSet") -> "PointSet":
        self._compatible(other)
        return PointSet.from_indices(self.field, self.d, np.union1d(self.indices, other.indices))

    def with_point(self, point: Sequence[int]) -> "PointSet":
        if len(point) != self.d:
            raise DimensionMismatch(f"point {tuple(point)} is not in dimension {self.d}")
        return PointSet.from_indices(self.field, self.d,
                                     np.append(self.indices, flat_index(self.field, point)))

    def _compatible(self, other: "PointSet") -> None:
        if self.field != other.field or self.d != other.d:
            raise DimensionMismatch("point sets live in different spaces")


def check_point(E: PointSet, y: Sequence[int]) -> Point:
    if len(y) != E.d:
        raise DimensionMismatch(f"pin {tuple(y)} has dimension {len(y)}, set has {E.d}")
    y = tuple(int(c) for c in y)
    for c in y:
        E.field._check(c)
    return y


def read_point_file(path, F: FieldSpec | None = None, d: int | None = None) -> PointSet:
    """Parse the plain-text point-set format.

    First non-comment line is ``p k d``; each further line holds d element
    codes.  Lines starting with ``#`` and blank lines are skipped.
    """
    header = None
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            try:
                values = [int(v) for v in parts]
            except ValueError:
                raise FileFormatError(f"{path}:{lineno}: non-integer token in {text!r}") from None
            if header is None:
                if len(values) != 3:
                    raise FileFormatError(f"{path}:{lineno}: header must be 'p k d'")
                header = values
                continue
            if len(values) != header[2]:
                raise FileFormatError(f"{path}:{lineno}: expected {header[2]} codes, got {len(values)}")
            rows.append(values)
    if header is None:
        raise FileFormatError(f"{path}: missing 'p k d' header")
    p, k, fd = header
    if F is None:
        F = make_field(p, k)
    elif (F.p, F.k) != (p, k):
        raise FileFormatError(f"{path}: file field F_{p}^{k} does not match F_{F.p}^{F.k}")
    if d is not None and d != fd:
        raise FileFormatError(f"{path}: file dimension {fd} does not match {d}")
    try:
        return PointSet.from_points(F, fd, rows)
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}") from None


def write_point_file(path, E: PointSet) -> None:
    with open(path, "w") as fh:
        fh.write(f"{E.field.p} {E.field.k} {E.d}\n")
        for pt in E:
            fh.write(" ".join(str(c) for c in pt) + "\n")
