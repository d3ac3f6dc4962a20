"""Reproducible point-set construction from a small textual spec language.

Grammar (whitespace is not allowed)::

    full
    random:<size>:seed=<seed>
    sphere:<t>
    line:<p0>:<v>                 p0, v are comma-separated element codes
    subspace:<v1>;<v2>;...        span of the listed vectors
    union:(<spec>),(<spec>),...
    product:<d1>(<spec>),<d2>(<spec>),...    child dimensions sum to d
    file:<path>

Random sets are the first ``size`` outputs of a keyed permutation of the flat
index range, so a given (p, k, d, spec) always yields the same members.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch, SizeExceedsSpace, SpecParseError
from .field import FieldSpec
from .geometry import sphere
from .points import PointSet, check_cap, flat_of, read_point_file

GENERATOR_ID = "feistel-splitmix64-4r/1"

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class FullSpec:
    def render(self) -> str:
        return "full"


@dataclass(frozen=True)
class RandomSpec:
    size: int
    seed: int

    def render(self) -> str:
        return f"random:{self.size}:seed={self.seed}"


@dataclass(frozen=True)
class SphereSpec:
    t: int

    def render(self) -> str:
        return f"sphere:{self.t}"


@dataclass(frozen=True)
class LineSpec:
    origin: tuple[int, ...]
    direction: tuple[int, ...]

    def render(self) -> str:
        return f"line:{_vec(self.origin)}:{_vec(self.direction)}"


@dataclass(frozen=True)
class SubspaceSpec:
    basis: tuple[tuple[int, ...], ...]

    def render(self) -> str:
        return "subspace:" + ";".join(_vec(v) for v in self.basis)


@dataclass(frozen=True)
class UnionSpec:
    parts: tuple["SetSpec", ...]

    def render(self) -> str:
        return "union:" + ",".join(f"({s.render()})" for s in self.parts)


@dataclass(frozen=True)
class ProductSpec:
    parts: tuple[tuple[int, "SetSpec"], ...]

    def render(self) -> str:
        return "product:" + ",".join(f"{d}({s.render()})" for d, s in self.parts)


@dataclass(frozen=True)
class FileSpec:
    path: str

    def render(self) -> str:
        return f"file:{self.path}"


SetSpec = Union[FullSpec, RandomSpec, SphereSpec, LineSpec, SubspaceSpec, UnionSpec, ProductSpec, FileSpec]


def _vec(v) -> str:
    return ",".join(str(c) for c in v)


def render(spec: SetSpec) -> str:
    return spec.render()


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise SpecParseError(message, self.pos)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            self.error(f"expected {ch!r}, found {self.peek() or 'end of input'!r}")
        self.pos += 1

    def word(self) -> str:
        start = self.pos
        while self.peek().isalpha():
            self.pos += 1
        return self.text[start:self.pos]

    def integer(self) -> int:
        start = self.pos
        while self.peek().isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected a non-negative integer")
        return int(self.text[start:self.pos])

    def vector(self) -> tuple[int, ...]:
        out = [self.integer()]
        while self.peek() == ",":
            self.pos += 1
            out.append(self.integer())
        return tuple(out)

    def spec(self) -> SetSpec:
        start = self.pos
        kind = self.word()
        if kind == "full":
            return FullSpec()
        if kind == "file":
            self.expect(":")
            # a file path runs to the end of the input or the enclosing group
            depth, end = 0, self.pos
            while end < len(self.text):
                ch = self.text[end]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    if depth == 0:
                        break
                    depth -= 1
                end += 1
            path = self.text[self.pos:end]
            if not path:
                self.error("file spec needs a path")
            self.pos = end
            return FileSpec(path)
        if kind not in {"random", "sphere", "line", "subspace", "union", "product"}:
            self.pos = start
            self.error(f"unknown set kind {kind!r}")
        self.expect(":")
        if kind == "random":
            size = self.integer()
            if self.peek() != ":":
                self.error("random spec needs an explicit ':seed=<n>'")
            self.pos += 1
            if self.word() != "seed":
                self.error("expected 'seed'")
            self.expect("=")
            seed = self.integer()
            if seed > _MASK64:
                self.error("seed must fit in 64 bits")
            return RandomSpec(size, seed)
        if kind == "sphere":
            return SphereSpec(self.integer())
        if kind == "line":
            origin = self.vector()
            self.expect(":")
            return LineSpec(origin, self.vector())
        if kind == "subspace":
            basis = [self.vector()]
            while self.peek() == ";":
                self.pos += 1
                basis.append(self.vector())
            return SubspaceSpec(tuple(basis))
        if kind == "union":
            parts = [self.group()]
            while self.peek() == ",":
                self.pos += 1
                parts.append(self.group())
            return UnionSpec(tuple(parts))
        parts = [(self.integer(), self.group())]
        while self.peek() == ",":
            self.pos += 1
            parts.append((self.integer(), self.group()))
        return ProductSpec(tuple(parts))

    def group(self) -> SetSpec:
        self.expect("(")
        inner = self.spec()
        self.expect(")")
        return inner


def parse(text: str) -> SetSpec:
    p = _Parser(text.strip())
    spec = p.spec()
    if p.pos != len(p.text):
        p.error(f"unexpected trailing text {p.text[p.pos:]!r}")
    return spec


# ---------------------------------------------------------------------------
# keyed permutation for random sets
# ---------------------------------------------------------------------------

def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def keyed_permutation(n: int, seed: int, count: int) -> np.ndarray:
    """First ``count`` images of 0, 1, ... under a seeded bijection of range(n).

    Four-round balanced Feistel network on 2h-bit words with SplitMix64 round
    functions, restricted to range(n) by cycle walking.
    """
    if count > n:
        raise SizeExceedsSpace(f"cannot draw {count} distinct points from {n}")
    if count == 0:
        return np.zeros(0, dtype=np.int64)
    half = max(1, ((n - 1).bit_length() + 1) // 2)
    mask = np.uint64((1 << half) - 1)
    shift = np.uint64(half)
    with np.errstate(over="ignore"):
        keys = _splitmix64(np.array([(seed + i) & _MASK64 for i in range(4)], dtype=np.uint64))

        def encrypt(x: np.ndarray) -> np.ndarray:
            left, right = x >> shift, x & mask
            for key in keys:
                left, right = right, left ^ (_splitmix64(right ^ key) & mask)
            return (left << shift) | right

        out = encrypt(np.arange(count, dtype=np.uint64))
        outside = out >= np.uint64(n)
        while outside.any():
            out[outside] = encrypt(out[outside])
            outside = out >= np.uint64(n)
    return out.astype(np.int64)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def _check_vector(F: FieldSpec, d: int, v, what: str) -> np.ndarray:
    if len(v) != d:
        raise DimensionMismatch(f"{what} {v} does not have dimension {d}")
    for c in v:
        F._check(c)
    return np.asarray(v, dtype=np.int64)


def _span(F: FieldSpec, d: int, basis) -> np.ndarray:
    pts = np.zeros((1, d), dtype=np.int64)
    scalars = np.arange(F.q, dtype=np.int64)
    for v in basis:
        v = _check_vector(F, d, v, "basis vector")
        multiples = F.mul_arr(scalars[:, None], v[None, :])
        pts = F.add_arr(pts[:, None, :], multiples[None, :, :]).reshape(-1, d)
        pts = np.unique(pts, axis=0)
    return pts


def generate(F: FieldSpec, d: int, spec: SetSpec | str, cap: int | None = None) -> PointSet:
    if isinstance(spec, str):
        spec = parse(spec)
    space = check_cap(F, d, cap)
    if isinstance(spec, FullSpec):
        return PointSet.full(F, d, cap)
    if isinstance(spec, RandomSpec):
        if spec.size > space:
            raise SizeExceedsSpace(f"random:{spec.size} exceeds q^d = {space}")
        return PointSet.from_indices(F, d, keyed_permutation(space, spec.seed, spec.size), cap)
    if isinstance(spec, SphereSpec):
        return sphere(F, d, spec.t, cap)
    if isinstance(spec, LineSpec):
        origin = _check_vector(F, d, spec.origin, "line origin")
        direction = _check_vector(F, d, spec.direction, "line direction")
        if not direction.any():
            raise ValueError("line direction must be nonzero")
        ts = np.arange(F.q, dtype=np.int64)
        pts = F.add_arr(origin[None, :], F.mul_arr(ts[:, None], direction[None, :]))
        return PointSet.from_indices(F, d, flat_of(F, pts), cap)
    if isinstance(spec, SubspaceSpec):
        return PointSet.from_indices(F, d, flat_of(F, _span(F, d, spec.basis)), cap)
    if isinstance(spec, UnionSpec):
        idx = np.concatenate([generate(F, d, s, cap).indices for s in spec.parts])
        return PointSet.from_indices(F, d, idx, cap)
    if isinstance(spec, ProductSpec):
        if sum(dim for dim, _ in spec.parts) != d:
            raise DimensionMismatch(f"product dimensions {[dim for dim, _ in spec.parts]} do not sum to {d}")
        idx = np.zeros(1, dtype=np.int64)
        for dim, child in spec.parts:
            sub = generate(F, dim, child, cap).indices
            idx = (idx[:, None] * F.q**dim + sub[None, :]).ravel()
        return PointSet.from_indices(F, d, idx, cap)
    if isinstance(spec, FileSpec):
        return read_point_file(spec.path, F, d)
    raise TypeError(f"not a set spec: {spec!r}")
