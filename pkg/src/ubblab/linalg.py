"""Dense linear-algebra kernels: spectra, numerical rank, Hermitian nullspaces, sigma_2 search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionMismatch, EmptyConstraintSet, EmptySubspace, NonFinite
from .tensor import PARTIES, Bipartition, Ket, matricize, matricize_ordered

RANK_TOL = 1e-9
RANK_FLOOR = 1e-12


def singular_values(M) -> np.ndarray:
    M = np.asarray(M)
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has non-finite entries")
    if M.size == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def numeric_rank(M, tau_rel: float = RANK_TOL) -> int:
    """Number of singular values above ``tau_rel * sigma_1`` (0 if sigma_1 <= 1e-12)."""
    if not 0 < tau_rel < 1:
        raise ValueError(f"tau_rel must lie in (0, 1), got {tau_rel}")
    s = singular_values(M)
    if s.size == 0 or s[0] <= RANK_FLOOR:
        return 0
    return int(np.count_nonzero(s > tau_rel * s[0]))


# Hermitian coordinates: [H_00 .. H_{D-1,D-1}, sqrt2*Re H_kl (k<l, row-major), sqrt2*Im H_kl (k<l)].
# The map is a linear isometry from (Herm(D), Frobenius) to (R^{D^2}, dot).

def _triu(D: int):
    return np.triu_indices(D, k=1)


def hermitian_to_coords(H) -> np.ndarray:
    H = np.asarray(H)
    D = H.shape[0]
    iu = _triu(D)
    up = H[iu]
    return np.concatenate([np.real(np.diag(H)), np.sqrt(2) * up.real, np.sqrt(2) * up.imag])


def coords_to_hermitian(c, D: int) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.size != D * D:
        raise DimensionMismatch(f"expected {D * D} coordinates, got {c.size}")
    m = D * (D - 1) // 2
    H = np.zeros((D, D), dtype=complex)
    iu = _triu(D)
    H[iu] = (c[D:D + m] + 1j * c[D + m:]) / np.sqrt(2)
    H = H + H.conj().T
    H[np.diag_indices(D)] = c[:D]
    return H


def identity_coords(D: int) -> np.ndarray:
    """Coordinates of the D x D identity: ones on the first D slots, zeros elsewhere."""
    c = np.zeros(D * D)
    c[:D] = 1.0
    return c


def functional_rows(C: np.ndarray) -> np.ndarray:
    """Real rows expressing Re and Im of sum_kl H_kl C_kl = 0 in Hermitian coordinates.

    ``C`` has shape (n, D, D); the result has shape (2n, D^2).
    """
    n, D, _ = C.shape
    iu = _triu(D)
    diag = C[:, np.arange(D), np.arange(D)]
    s = (C[:, iu[0], iu[1]] + C[:, iu[1], iu[0]]) / np.sqrt(2)
    a = (C[:, iu[0], iu[1]] - C[:, iu[1], iu[0]]) / np.sqrt(2)
    # H_kl = (x + i y)/sqrt2 so the kl and lk terms give x*s + i*y*a.
    re_rows = np.concatenate([diag.real, s.real, -a.imag], axis=1)
    im_rows = np.concatenate([diag.imag, s.imag, a.real], axis=1)
    out = np.empty((2 * n, D * D))
    out[0::2] = re_rows
    out[1::2] = im_rows
    return out


def _measured_blocks(kets: Sequence[Ket], measured: tuple[int, ...]) -> np.ndarray:
    others = tuple(p for p in PARTIES if p not in measured)
    return np.array([matricize_ordered(k, measured, others) for k in kets])


def pair_functionals(u_blocks: np.ndarray, v_blocks: np.ndarray) -> np.ndarray:
    """C[k,l] = sum_x conj(U[k,x]) V[l,x], so <u|(I (x) H)|v> = sum_kl H_kl C_kl."""
    return np.einsum("nkx,nlx->nkl", u_blocks.conj(), v_blocks)


@dataclass
class HermitianNullspace:
    D: int
    basis: list[np.ndarray] = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    threshold: float
    n_constraints: int
    gram: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def spectrum_near_threshold(self, width: int = 4) -> list[float]:
        """Smallest eigenvalues around the cut, relative to the largest one."""
        lam = self.eigenvalues
        top = lam[-1] if lam.size and lam[-1] > 0 else 1.0
        return [float(x / top) for x in lam[: self.dim + width]]


def accumulate_gram(rows_iter: Iterable[np.ndarray], D2: int) -> tuple[np.ndarray, int]:
    """Sum of R^T R over row blocks, combined by pairwise (binary-counter) summation."""
    stack: list[tuple[int, np.ndarray]] = []
    count = 0
    for R in rows_iter:
        if R.size == 0:
            continue
        count += R.shape[0]
        level, acc = 0, R.T @ R
        while stack and stack[-1][0] == level:
            _, prev = stack.pop()
            acc = prev + acc
            level += 1
        stack.append((level, acc))
    G = np.zeros((D2, D2))
    for _, part in stack:
        G += part
    return G, count


def nullspace_from_gram(G: np.ndarray, D: int, tau: float = RANK_TOL, n_constraints: int = 0,
                        keep_gram: bool = False) -> HermitianNullspace:
    """Eigenvectors of the Gram matrix with eigenvalue <= max(tau^2, floor) * lambda_max.

    The floor is the eigensolver's own resolution (~ D^2 * eps * lambda_max);
    below it, computed eigenvalues of exact zeros are indistinguishable from noise.
    """
    lam, vecs = np.linalg.eigh(G)
    top = max(float(lam[-1]), 0.0)
    rel = max(tau * tau, G.shape[0] * np.finfo(float).eps)
    thr = rel * top
    if top == 0.0:
        idx = np.arange(len(lam))
    else:
        idx = np.flatnonzero(lam <= thr)
    basis = [coords_to_hermitian(vecs[:, i], D) for i in idx]
    return HermitianNullspace(D, basis, lam, thr, n_constraints, G if keep_gram else None)


def hermitian_constraint_nullspace(
    D: int,
    pairs: Sequence[tuple[Ket, Ket]],
    measured: Sequence[int],
    tau: float = RANK_TOL,
    batch: int = 2048,
    require_constraints: bool = False,
    keep_gram: bool = False,
) -> HermitianNullspace:
    """Hermitian H on the ``measured`` parties with <u|(I (x) H)|v> = 0 for every pair.

    Each pair contributes two real equations (real and imaginary part). The
    solution space is read off the Gram matrix of all constraint rows.
    """
    measured = tuple(sorted(set(measured)))
    pairs = list(pairs)
    if pairs:
        d = pairs[0][0].d
        if d ** len(measured) != D:
            raise DimensionMismatch(f"D={D} but measured parties span dimension {d ** len(measured)}")
    if not pairs:
        if require_constraints:
            raise EmptyConstraintSet("no constraints given")
        G = np.zeros((D * D, D * D))
        return nullspace_from_gram(G, D, tau, 0, keep_gram)

    us = [p[0] for p in pairs]
    vs = [p[1] for p in pairs]
    # Deduplicate kets so each is matricized once.
    uniq: dict[int, int] = {}
    kets: list[Ket] = []
    for k in us + vs:
        if id(k) not in uniq:
            uniq[id(k)] = len(kets)
            kets.append(k)
    blocks = _measured_blocks(kets, measured)
    ui = np.array([uniq[id(k)] for k in us])
    vi = np.array([uniq[id(k)] for k in vs])
    # Pairs whose traced-side supports are disjoint give identically zero rows.
    traced_support = np.abs(blocks).sum(axis=1) > 0
    live = np.flatnonzero((traced_support[ui] & traced_support[vi]).any(axis=1))

    def rows():
        for s in range(0, len(live), batch):
            sel = live[s:s + batch]
            C = pair_functionals(blocks[ui[sel]], blocks[vi[sel]])
            yield functional_rows(C)

    G, _ = accumulate_gram(rows(), D * D)
    return nullspace_from_gram(G, D, tau, 2 * len(pairs), keep_gram)


def constraint_residual(H: np.ndarray, pairs: Sequence[tuple[Ket, Ket]], measured: Sequence[int]) -> float:
    """max |<u|(I (x) H)|v>| over the pairs, computed directly from the kets."""
    measured = tuple(sorted(set(measured)))
    worst = 0.0
    for u, v in pairs:
        others = tuple(p for p in PARTIES if p not in measured)
        U = matricize_ordered(u, measured, others)
        V = matricize_ordered(v, measured, others)
        worst = max(worst, abs(np.sum(U.conj() * (H @ V))))
    return worst


def _sigma2_and_grad(x: np.ndarray, stack: np.ndarray) -> tuple[float, np.ndarray]:
    n = stack.shape[0]
    c = x[:n] + 1j * x[n:]
    r = np.linalg.norm(c)
    M = np.tensordot(c, stack, axes=1)
    U, s, Vh = np.linalg.svd(M)
    sigma = s[1]
    g = np.einsum("i,nij,j->n", U[:, 1].conj(), stack, Vh[1].conj())
    grad = np.concatenate([g.real, -g.imag])
    f = sigma / r
    grad = grad / r - sigma * x / r**3
    return float(f), grad


def second_singular(c: np.ndarray, stack: np.ndarray) -> float:
    c = np.asarray(c, dtype=complex)
    M = np.tensordot(c / np.linalg.norm(c), stack, axes=1)
    return float(np.linalg.svd(M, compute_uv=False)[1])


def min_second_singular(
    subspace: Sequence[Ket],
    bp: Bipartition,
    restarts: int = 200,
    seed: int = 0,
    maxiter: int = 500,
) -> tuple[float, np.ndarray]:
    """Heuristic minimum of sigma_2 over unit vectors of span(subspace) under ``bp``.

    Local quasi-Newton descent from ``restarts`` seeded random unit starts. The
    returned value is re-evaluated at the returned coefficients, so it is an
    upper bound on the true minimum (never a false certificate of entanglement
    on its own; a value near zero is a concrete near-product witness).
    """
    if not subspace:
        raise EmptySubspace("empty subspace")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    stack = np.array([matricize(k, bp) for k in subspace])
    n = len(subspace)
    rng = np.random.default_rng(seed)
    best_val, best_c = np.inf, None
    for _ in range(restarts):
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        z /= np.linalg.norm(z)
        if n == 1:
            c = z
        else:
            res = minimize(_sigma2_and_grad, np.concatenate([z.real, z.imag]), args=(stack,),
                           jac=True, method="L-BFGS-B", options={"maxiter": maxiter})
            c = res.x[:n] + 1j * res.x[n:]
            c /= np.linalg.norm(c)
        val = second_singular(c, stack)
        if val < best_val:
            best_val, best_c = val, c
    return best_val, best_c
