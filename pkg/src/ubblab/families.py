"""Construction of the four-qudit UBB, its stopper, and bases of the complementary GES.

Layer ``l`` (1 <= l <= (d-1)//2) lives on the shell of indices in [l-1, d-l]
minus the inner cube [l, d-l-1]. Within a layer, ``k = l - 1`` is the low edge,
``d - l`` the high edge, and ``n = d - 2k - 1`` the length of the Fourier
vectors eta_j / xi_j.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange, LayerOutOfRange
from .tensor import Ket, basis_vector, inner, tensor4


class Role(str, enum.Enum):
    UBB_MEMBER = "UbbMember"
    STOPPER = "StopperState"
    PSI_PLUS = "PsiPlus"
    CENTER = "CenterState"
    GES_BASIS = "GesBasis"
    F_STATE = "FState"


UBB_ROLES = frozenset({Role.UBB_MEMBER, Role.STOPPER, Role.CENTER})


@dataclass(frozen=True)
class Member:
    label: str
    role: Role
    layer: int | None
    subset: str | None
    ket: Ket


@dataclass(frozen=True)
class StateFamily:
    d: int
    members: tuple[Member, ...]

    def __post_init__(self):
        labels = [m.label for m in self.members]
        if len(set(labels)) != len(labels):
            dup = sorted({x for x in labels if labels.count(x) > 1})
            raise ValueError(f"duplicate labels: {dup}")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.members]

    @property
    def kets(self) -> list[Ket]:
        return [m.ket for m in self.members]

    def get(self, label: str) -> Member:
        for m in self.members:
            if m.label == label:
                return m
        raise KeyError(label)

    def select(self, roles: Iterable[Role]) -> "StateFamily":
        roles = set(roles)
        return StateFamily(self.d, tuple(m for m in self.members if m.role in roles))

    def without(self, labels: Iterable[str]) -> "StateFamily":
        drop = set(labels)
        return StateFamily(self.d, tuple(m for m in self.members if m.label not in drop))

    def __or__(self, other: "StateFamily") -> "StateFamily":
        if other.d != self.d:
            raise ValueError("cannot merge families of different d")
        return StateFamily(self.d, self.members + other.members)


def num_layers(d: int) -> int:
    return (d - 1) // 2


def _check_layer(d: int, l: int) -> None:
    if d < 3:
        raise ValueError(f"d >= 3 required, got {d}")
    if not 1 <= l <= num_layers(d):
        raise LayerOutOfRange(f"layer {l} outside 1..{num_layers(d)} for d={d}")


def root_of_unity(n: int, m: int) -> complex:
    """exp(2 pi i m / n), exact at quarter turns."""
    m %= n
    if (4 * m) % n == 0:
        return (1, 1j, -1, -1j)[(4 * m) // n]
    theta = 2.0 * math.pi * m / n
    return complex(math.cos(theta), math.sin(theta))


def _fourier(d: int, k: int, j: int, shift: int) -> np.ndarray:
    if d < 3 or not 0 <= k <= num_layers(d) - 1:
        raise IndexOutOfRange(f"k={k} outside 0..{num_layers(d) - 1} for d={d}")
    n = d - 2 * k - 1
    if not 0 <= j < n:
        raise IndexOutOfRange(f"j={j} outside Z_{n}")
    v = np.zeros(d, dtype=complex)
    for t in range(k, d - k - 1):
        v[t + shift] = root_of_unity(n, j * (t - k))
    return v


def eta(d: int, k: int, j: int) -> np.ndarray:
    """sum_{t=k}^{d-k-2} w^{j(t-k)} |t>, w = exp(2 pi i/(d-2k-1))."""
    return _fourier(d, k, j, 0)


def xi(d: int, k: int, j: int) -> np.ndarray:
    """Same amplitudes as ``eta`` moved up one level."""
    return _fourier(d, k, j, 1)


# Factor kinds per party: "eta"/"xi" carry a Fourier index, "lo" = |k>, "hi" = |d-l>.
SUBSET_SHAPES: dict[str, tuple[str, str, str, str]] = {
    "C1": ("eta", "lo", "lo", "lo"),
    "C2": ("lo", "xi", "hi", "hi"),
    "C3": ("lo", "lo", "xi", "hi"),
    "C4": ("lo", "lo", "lo", "xi"),
    "C5": ("eta", "xi", "eta", "lo"),
    "C6": ("eta", "xi", "hi", "eta"),
    "C7": ("eta", "lo", "xi", "eta"),
    "C8": ("lo", "xi", "eta", "xi"),
    "D1": ("xi", "hi", "hi", "hi"),
    "D2": ("hi", "eta", "lo", "lo"),
    "D3": ("hi", "hi", "eta", "lo"),
    "D4": ("hi", "hi", "hi", "eta"),
    "D5": ("xi", "eta", "xi", "hi"),
    "D6": ("xi", "eta", "lo", "xi"),
    "D7": ("xi", "hi", "eta", "xi"),
    "D8": ("hi", "eta", "xi", "eta"),
}

# (first term, second term) of each two-term state, and the UBB group it closes.
PSI_PAIRS: dict[int, tuple[str, str]] = {
    1: ("C1", "D2"),
    2: ("C2", "D1"),
    3: ("C3", "C4"),
    4: ("D3", "D4"),
    5: ("C5", "C8"),
    6: ("C6", "C7"),
    7: ("D5", "D8"),
    8: ("D6", "D7"),
}


def _product(d: int, l: int, shape: Sequence[str], js: Sequence[int]) -> Ket:
    k = l - 1
    it = iter(js)
    factors = []
    for kind in shape:
        if kind == "eta":
            factors.append(eta(d, k, next(it)))
        elif kind == "xi":
            factors.append(xi(d, k, next(it)))
        elif kind == "lo":
            factors.append(basis_vector(d, k))
        else:
            factors.append(basis_vector(d, d - l))
    return tensor4(*factors)


def subset_indices(d: int, l: int, subset: str) -> list[tuple[int, ...]]:
    """Fourier index tuples of a subset, all-zero tuple excluded, in lexicographic order."""
    _check_layer(d, l)
    n = d - 2 * (l - 1) - 1
    nfree = sum(kind in ("eta", "xi") for kind in SUBSET_SHAPES[subset])
    return [js for js in itertools.product(range(n), repeat=nfree) if any(js)]


def build_subset(d: int, l: int, subset: str) -> list[Ket]:
    if subset not in SUBSET_SHAPES:
        raise KeyError(f"unknown subset {subset!r}")
    shape = SUBSET_SHAPES[subset]
    return [_product(d, l, shape, js) for js in subset_indices(d, l, subset)]


def subset_block(d: int, l: int, subset: str) -> Ket:
    """The all-zero-index member of a subset (every amplitude 1)."""
    _check_layer(d, l)
    shape = SUBSET_SHAPES[subset]
    return _product(d, l, shape, [0] * sum(kind in ("eta", "xi") for kind in shape))


def build_psi(d: int, l: int, i: int, sign: str) -> Ket:
    if sign not in ("+", "-"):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    if i not in PSI_PAIRS:
        raise ValueError(f"psi index must be 1..8, got {i}")
    first, second = PSI_PAIRS[i]
    a, b = subset_block(d, l, first), subset_block(d, l, second)
    return a + b if sign == "+" else a - b


def _center_level_vec(d: int, j: int) -> np.ndarray:
    h = d // 2
    return basis_vector(d, h - 1) + (-1) ** j * basis_vector(d, h)


def build_center(d: int) -> list[Ket]:
    """The fifteen non-trivial center products for even d; empty for odd d."""
    if d % 2:
        return []
    out = []
    for js in itertools.product(range(2), repeat=4):
        if any(js):
            out.append(tensor4(*(_center_level_vec(d, j) for j in js)))
    return out


def center_state(d: int) -> Ket:
    """The complement's center vector (all-ones amplitudes)."""
    if d % 2:
        m = (d - 1) // 2
        return Ket.basis(d, (m, m, m, m))
    return tensor4(*(_center_level_vec(d, 0) for _ in range(4)))


def build_stopper(d: int) -> Ket:
    ones = np.ones(d, dtype=complex)
    return tensor4(ones, ones, ones, ones)


def ubb_size(d: int) -> int:
    return d**4 - 8 * num_layers(d)


def build_ubb(d: int) -> StateFamily:
    if d < 3:
        raise ValueError(f"d >= 3 required, got {d}")
    members: list[Member] = []
    for l in range(1, num_layers(d) + 1):
        for i, (first, second) in PSI_PAIRS.items():
            for subset in (first, second):
                for n, ket in enumerate(build_subset(d, l, subset), start=1):
                    members.append(Member(f"psi{n}_{subset}_l{l}", Role.UBB_MEMBER, l, subset, ket))
            members.append(Member(f"psiMinus_U{i}_l{l}", Role.UBB_MEMBER, l, f"U{i}", build_psi(d, l, i, "-")))
    for js, ket in zip((js for js in itertools.product(range(2), repeat=4) if any(js)), build_center(d)):
        members.append(Member("center_" + "".join(map(str, js)), Role.CENTER, None, "center", ket))
    members.append(Member("S", Role.STOPPER, None, None, build_stopper(d)))
    return StateFamily(d, tuple(members))


def build_psi_plus(d: int, upto: int = 8) -> StateFamily:
    """The states psi_+ for i = 1..upto in every layer, stored unnormalized."""
    members = []
    for l in range(1, num_layers(d) + 1):
        for i in range(1, upto + 1):
            members.append(Member(f"psiPlus_U{i}_l{l}", Role.PSI_PLUS, l, f"U{i}", build_psi(d, l, i, "+")))
    return StateFamily(d, tuple(members))


def f_state_norm2(d: int, t: int) -> float:
    """<F|F> for the F state of layer t+1 (t = num_layers(d) is the center)."""
    if t == num_layers(d):
        return 1.0 if d % 2 else 1.0 / 16.0
    n = d - 2 * t - 1
    return 1.0 / (8 * (n * n + 1) * n)


def build_f_states(d: int) -> list[Ket]:
    """F states for layers 1..L followed by the center F state (inner product 1 with the stopper)."""
    out = []
    for l in range(1, num_layers(d) + 1):
        n = d - 2 * (l - 1) - 1
        lo = 1.0 / (4 * (n * n + 1) * math.sqrt(2 * n))
        hi = math.sqrt(n) / (4 * math.sqrt(2) * (n * n + 1))
        psi = [build_psi(d, l, i, "+").normalized() for i in range(1, 9)]
        f = _combine([lo] * 4 + [hi] * 4, psi)
        out.append(f)
    c = center_state(d)
    out.append(c if d % 2 else c / 16.0)
    return out


def _combine(coeffs: Sequence[complex], kets: Sequence[Ket]) -> Ket:
    d = kets[0].d
    vec = sum(c * k.to_dense() for c, k in zip(coeffs, kets))
    return Ket.from_dense(vec, d)


def _layer_g17(d: int, l: int) -> list[Ket]:
    n = d - 2 * (l - 1) - 1
    p = [build_psi(d, l, i, "+").normalized() for i in range(1, 9)]
    r2, z = 1 / math.sqrt(2), math.sqrt(4 * n * n + 4)
    return [
        _combine([r2, -r2], [p[0], p[1]]),
        _combine([r2, -r2], [p[2], p[3]]),
        _combine([0.5, 0.5, -0.5, -0.5], p[0:4]),
        _combine([r2, -r2], [p[4], p[5]]),
        _combine([r2, -r2], [p[6], p[7]]),
        _combine([0.5, 0.5, -0.5, -0.5], p[4:8]),
        _combine([n / z] * 4 + [-1 / z] * 4, p),
    ]


def literal_g8(d: int) -> list[Ket]:
    """Discrete-Fourier combinations of the F states, one per layer, as written.

    For d >= 5 these are not mutually orthogonal (the F states carry unequal
    weights); see ``orthonormalized_g8`` and ``g8_overlaps``.
    """
    L = num_layers(d)
    fs = build_f_states(d)
    denom = math.sqrt(sum(f_state_norm2(d, t) for t in range(L + 1)))
    out = []
    for l in range(1, L + 1):
        coeffs = [root_of_unity(L + 1, l * t) / denom for t in range(L + 1)]
        out.append(_combine(coeffs, fs))
    return out


def orthonormalized_g8(d: int) -> list[Ket]:
    """Gram-Schmidt of ``literal_g8`` in layer order; same span, orthonormal."""
    out: list[Ket] = []
    for g in literal_g8(d):
        v = g.to_dense()
        for q in out:
            qv = q.to_dense()
            v = v - np.vdot(qv, v) * qv
        v = v / np.linalg.norm(v)
        out.append(Ket.from_dense(v, d))
    return out


def g8_overlaps(d: int) -> np.ndarray:
    """Gram matrix <G8_l|G8_l'> of the literal per-layer G8 states."""
    g = literal_g8(d)
    return np.array([[inner(a, b) for b in g] for a in g])


def build_ges_basis(d: int, g8: str = "literal") -> StateFamily:
    """GES basis (8 per layer) followed by the F states.

    ``g8="literal"`` uses the per-layer Fourier combinations as written;
    ``g8="orthonormalized"`` replaces them by their Gram-Schmidt fallback.
    """
    if d < 3:
        raise ValueError(f"d >= 3 required, got {d}")
    if g8 not in ("literal", "orthonormalized"):
        raise ValueError(f"unknown g8 mode {g8!r}")
    L = num_layers(d)
    g8s = literal_g8(d) if g8 == "literal" else orthonormalized_g8(d)
    members = []
    for l in range(1, L + 1):
        for i, ket in enumerate(_layer_g17(d, l), start=1):
            members.append(Member(f"G{i}_l{l}", Role.GES_BASIS, l, None, ket))
        members.append(Member(f"G8_l{l}", Role.GES_BASIS, l, None, g8s[l - 1]))
    for t, f in enumerate(build_f_states(d)):
        label = f"F_l{t + 1}" if t < L else "F_center"
        members.append(Member(label, Role.F_STATE, t + 1, None, f))
    return StateFamily(d, tuple(members))


def build_ges_basis_thm1() -> StateFamily:
    """The explicit eight-state orthonormal basis of the d = 3 complement."""
    d = 3
    p = [build_psi(d, 1, i, "+").normalized() for i in range(1, 9)]
    r2, r5 = 1 / math.sqrt(2), math.sqrt(5)
    one = Ket.basis(d, (1, 1, 1, 1))
    coeffs = [
        [r2, -r2, 0, 0, 0, 0, 0, 0],
        [0, 0, r2, -r2, 0, 0, 0, 0],
        [0.5, 0.5, -0.5, -0.5, 0, 0, 0, 0],
        [0, 0, 0, 0, r2, -r2, 0, 0],
        [0, 0, 0, 0, 0, 0, r2, -r2],
        [0, 0, 0, 0, 0.5, 0.5, -0.5, -0.5],
        [1 / r5] * 4 + [-1 / (2 * r5)] * 4,
    ]
    members = [Member(f"G{i}", Role.GES_BASIS, 1, None, _combine(c, p)) for i, c in enumerate(coeffs, start=1)]
    g8 = _combine([1 / (18 * r5)] * 4 + [1 / (9 * r5)] * 4 + [-4 * r5 / 9], p + [one])
    members.append(Member("G8", Role.GES_BASIS, 1, None, g8))
    return StateFamily(d, tuple(members))


def psi_plus_seven_basis(d: int) -> list[Ket]:
    """Orthonormal basis of {v in span(psi_+ for i = 1..7, all layers) : <S|v> = 0}."""
    fam = build_psi_plus(d, upto=7)
    E = np.array([m.ket.normalized().to_dense() for m in fam])
    s = build_stopper(d).to_dense()
    w = E.conj() @ s  # stopper components in this orthonormal set
    # Orthonormal basis of w^perp inside C^{len(E)}: drop the w direction via SVD.
    _, _, Vh = np.linalg.svd(w.conj()[None, :])
    coeffs = Vh[1:].conj()
    return [Ket.from_dense(c @ E, d) for c in coeffs]
