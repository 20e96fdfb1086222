"""Sparse four-party qudit states, bipartitions, matricization and partial traces.

Parties are numbered 1..4. Computational indices are ordered lexicographically
everywhere: party 1 is the most significant digit of a flattened index.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NonOrthonormalInput, ZeroState

PARTIES = (1, 2, 3, 4)
STORAGE_EPS = 1e-15

Index = tuple[int, int, int, int]


class Ket:
    """Immutable sparse vector over (C^d)^{⊗4}.

    ``terms`` maps index quadruples to complex amplitudes. Amplitudes with
    magnitude below ``STORAGE_EPS`` are dropped on construction.
    """

    __slots__ = ("d", "_terms")
    # Make numpy scalars defer to __rmul__ instead of treating a Ket as a sequence.
    __array_ufunc__ = None

    def __init__(self, d: int, terms: Mapping[Sequence[int], complex] | None = None):
        if d < 1:
            raise ValueError(f"local dimension must be positive, got {d}")
        clean: dict[Index, complex] = {}
        for idx, amp in (terms or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != 4:
                raise IndexOutOfRange(f"expected 4 indices, got {idx}")
            if any(i < 0 or i >= d for i in idx):
                raise IndexOutOfRange(f"index {idx} outside [0, {d})")
            amp = complex(amp)
            if not np.isfinite(amp.real) or not np.isfinite(amp.imag):
                raise ValueError(f"non-finite amplitude at {idx}")
            if abs(amp) >= STORAGE_EPS:
                clean[idx] = clean.get(idx, 0) + amp
        self.d = d
        self._terms = MappingProxyType(
            {k: clean[k] for k in sorted(clean) if abs(clean[k]) >= STORAGE_EPS}
        )

    @classmethod
    def basis(cls, d: int, idx: Sequence[int]) -> "Ket":
        return cls(d, {tuple(idx): 1.0})

    @classmethod
    def from_dense(cls, vec: np.ndarray, d: int) -> "Ket":
        vec = np.asarray(vec).reshape(-1)
        if vec.size != d**4:
            raise DimensionMismatch(f"vector of size {vec.size} is not (C^{d})^4")
        nz = np.flatnonzero(np.abs(vec) >= STORAGE_EPS)
        return cls(d, {np.unravel_index(i, (d,) * 4): vec[i] for i in nz})

    @property
    def terms(self) -> Mapping[Index, complex]:
        return self._terms

    def __getitem__(self, idx: Sequence[int]) -> complex:
        return self._terms.get(tuple(idx), 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __repr__(self) -> str:
        return f"Ket(d={self.d}, nterms={len(self)}, norm={self.norm():.6g})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Ket):
            return NotImplemented
        return self.d == other.d and dict(self._terms) == dict(other._terms)

    def __hash__(self) -> int:
        return hash((self.d, tuple(self._terms.items())))

    def _check(self, other: "Ket") -> None:
        if self.d != other.d:
            raise DimensionMismatch(f"local dimensions differ: {self.d} vs {other.d}")

    def __add__(self, other: "Ket") -> "Ket":
        self._check(other)
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0) + v
        return Ket(self.d, out)

    def __sub__(self, other: "Ket") -> "Ket":
        return self + (-1.0) * other

    def __mul__(self, c: complex) -> "Ket":
        return Ket(self.d, {k: c * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: complex) -> "Ket":
        return self * (1.0 / c)

    def __neg__(self) -> "Ket":
        return self * -1.0

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(v) ** 2 for v in self._terms.values())))

    def normalized(self) -> "Ket":
        n = self.norm()
        if n == 0:
            raise ZeroState("cannot normalize the zero vector")
        return self / n

    def support(self) -> frozenset[Index]:
        return frozenset(self._terms)

    def to_dense(self) -> np.ndarray:
        """Flat length-d**4 complex vector in lexicographic order."""
        out = np.zeros((self.d,) * 4, dtype=complex)
        for k, v in self._terms.items():
            out[k] = v
        return out.reshape(-1)


def inner(u: Ket, v: Ket) -> complex:
    """<u|v>, conjugate-linear in the first argument."""
    if u.d != v.d:
        raise DimensionMismatch(f"local dimensions differ: {u.d} vs {v.d}")
    small, large = (u, v) if len(u) <= len(v) else (v, u)
    total = 0j
    for k, a in small.terms.items():
        b = large.terms.get(k)
        if b is not None:
            total += a.conjugate() * b if small is u else b.conjugate() * a
    return total


def tensor4(f1, f2, f3, f4) -> Ket:
    """Product ket of four single-party vectors."""
    factors = [np.asarray(f, dtype=complex).reshape(-1) for f in (f1, f2, f3, f4)]
    d = factors[0].size
    if any(f.size != d for f in factors):
        raise DimensionMismatch(f"factor sizes differ: {[f.size for f in factors]}")
    supports = [np.flatnonzero(np.abs(f) > 0) for f in factors]
    terms = {}
    for idx in itertools.product(*supports):
        terms[idx] = factors[0][idx[0]] * factors[1][idx[1]] * factors[2][idx[2]] * factors[3][idx[3]]
    return Ket(d, terms)


def basis_vector(d: int, i: int) -> np.ndarray:
    if not 0 <= i < d:
        raise IndexOutOfRange(f"level {i} outside [0, {d})")
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


@dataclass(frozen=True)
class Bipartition:
    """Split of the four parties; ``group_a`` always contains party 1."""

    group_a: tuple[int, ...]

    def __post_init__(self):
        a = tuple(sorted(set(self.group_a)))
        if not a or len(a) == 4 or any(p not in PARTIES for p in a):
            raise ValueError(f"invalid bipartition side {self.group_a}")
        if 1 not in a:
            a = tuple(p for p in PARTIES if p not in a)
        object.__setattr__(self, "group_a", a)

    @property
    def group_b(self) -> tuple[int, ...]:
        return tuple(p for p in PARTIES if p not in self.group_a)

    def complement(self) -> "Bipartition":
        # Canonical form makes A|B and B|A the same cut.
        return Bipartition(self.group_b)

    @classmethod
    def parse(cls, text: str) -> "Bipartition":
        left, _, right = text.partition("|")
        a = tuple(int(c) for c in left.strip())
        b = tuple(int(c) for c in right.strip())
        if sorted(a + b) != list(PARTIES):
            raise ValueError(f"{text!r} does not split parties 1..4")
        return cls(a)

    def __str__(self) -> str:
        return "".join(map(str, self.group_a)) + "|" + "".join(map(str, self.group_b))


ALL_BIPARTITIONS: tuple[Bipartition, ...] = tuple(
    Bipartition.parse(s) for s in ("1|234", "12|34", "13|24", "14|23", "123|4", "124|3", "134|2")
)


def matricize_ordered(k: Ket, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    """Reshape ``k`` with row multi-index over ``rows`` and column multi-index over ``cols``.

    Both are party sequences (1-based); their order sets the digit significance.
    """
    rows, cols = tuple(rows), tuple(cols)
    if sorted(rows + cols) != list(PARTIES):
        raise ValueError(f"rows {rows} and cols {cols} must partition parties 1..4")
    d = k.d
    t = k.to_dense().reshape((d,) * 4)
    t = np.transpose(t, [p - 1 for p in rows + cols])
    return t.reshape(d ** len(rows), d ** len(cols))


def matricize(k: Ket, bp: Bipartition) -> np.ndarray:
    return matricize_ordered(k, bp.group_a, bp.group_b)


def schmidt_values(k: Ket, bp: Bipartition) -> np.ndarray:
    if len(k) == 0:
        raise ZeroState("Schmidt values of the zero vector are undefined")
    return np.linalg.svd(matricize(k, bp), compute_uv=False)


def is_product(k: Ket, bp: Bipartition, tol: float = 1e-10) -> bool:
    s = schmidt_values(k, bp)
    return len(s) < 2 or s[1] <= tol * s[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced operator on the parties in ``keep`` (ascending)."""

    keep: tuple[int, ...]
    matrix: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.matrix).max(initial=0.0), 1.0)
        return bool(np.abs(self.matrix - self.matrix.conj().T).max(initial=0.0) <= tol * scale)


def check_orthonormal(kets: Sequence[Ket], tol: float = 1e-10) -> None:
    if not kets:
        return
    V = np.array([k.to_dense() for k in kets])
    G = V.conj() @ V.T
    dev = np.abs(G - np.eye(len(kets))).max()
    if dev > tol:
        raise NonOrthonormalInput(f"Gram matrix deviates from identity by {dev:.3e}")


def partial_trace(kets: Sequence[Ket], keep: Iterable[int], check: bool = True) -> DensityMatrix:
    """Reduced operator of the projector onto span(kets) on the parties in ``keep``."""
    kets = list(kets)
    keep = tuple(sorted(set(keep)))
    if not kets:
        raise ValueError("need at least one ket")
    d = kets[0].d
    if any(k.d != d for k in kets):
        raise DimensionMismatch("kets have different local dimensions")
    if check:
        check_orthonormal(kets)
    traced = tuple(p for p in PARTIES if p not in keep)
    if not keep:
        return DensityMatrix(keep, np.array([[float(len(kets))]], dtype=complex))
    rho = np.zeros((d ** len(keep),) * 2, dtype=complex)
    for k in kets:
        if traced:
            X = matricize_ordered(k, keep, traced)
        else:
            X = k.to_dense()[:, None]
        rho += X @ X.conj().T
    return DensityMatrix(keep, rho)
