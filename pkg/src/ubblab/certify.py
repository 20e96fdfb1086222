"""Verification suites. Each returns a CheckResult with a verdict, metrics and witnesses."""

from __future__ import annotations

import enum
import itertools
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import LongRunningRequired
from .families import (
    UBB_ROLES,
    Role,
    StateFamily,
    build_ges_basis,
    build_ges_basis_thm1,
    build_psi,
    build_ubb,
    g8_overlaps,
    num_layers,
    psi_plus_seven_basis,
)
from .linalg import RANK_TOL, hermitian_constraint_nullspace, min_second_singular, numeric_rank
from .prover import check_unextendibility_symbolic
from .tensor import ALL_BIPARTITIONS, PARTIES, Bipartition, Ket, matricize, partial_trace

# Relative sigma_2/sigma_1 at or below which a pure state counts as a product across a cut.
PRODUCT_TOL = 1e-10
# Optimizer floor: a subspace whose searched minimum of sigma_2 stays above this
# is treated as numerically free of product states across the cut.
SIGMA2_FLOOR = 0.01
# A searched sigma_2 at or below this is a concrete near-product witness.
SIGMA2_WITNESS = 1e-6

ANCHORS = {
    "orthogonality": "Theorem 1",
    "orthogonality_with_complement": "Theorem 1",
    "biseparability": "Theorem 1",
    "counts": "Theorem 4",
    "ges": "Theorem 1",
    "unextendibility": "Theorem 1",
    "nonlocality": "Theorem 2",
    "distillability_full_complement": "Theorem 3",
    "distillability_psi_plus_seven": "Theorem 3",
}


class Verdict(str, enum.Enum):
    PASS = "Pass"
    WARN = "Warn"
    INCONCLUSIVE = "Inconclusive"
    FAIL = "Fail"

    @property
    def severity(self) -> int:
        return _SEVERITY[self]


_SEVERITY = {Verdict.PASS: 0, Verdict.WARN: 1, Verdict.INCONCLUSIVE: 2, Verdict.FAIL: 3}


def worst(verdicts: Iterable[Verdict]) -> Verdict:
    return max(verdicts, key=lambda v: v.severity, default=Verdict.PASS)


def _plain(x):
    """Convert numpy scalars and containers to plain JSON-friendly Python values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, enum.Enum):
        return x.value
    return x


@dataclass
class CheckResult:
    name: str
    status: Verdict
    metrics: dict = field(default_factory=dict)
    elapsed: float = 0.0
    anchor: str = ""
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.status = Verdict(self.status)
        if self.status is Verdict.FAIL and not self.witness:
            raise ValueError(f"check {self.name!r} failed without a witness")
        self.metrics = _plain(self.metrics)
        self.witness = _plain(self.witness)
        self.details = _plain(self.details)
        if not self.anchor:
            self.anchor = ANCHORS.get(self.name, "")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status.value,
            "anchor": self.anchor,
            "elapsed": self.elapsed,
            "metrics": self.metrics,
            "witness": self.witness,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckResult":
        return cls(
            name=data["name"],
            status=Verdict(data["status"]),
            metrics=data.get("metrics", {}),
            elapsed=data.get("elapsed", 0.0),
            anchor=data.get("anchor", ""),
            witness=data.get("witness"),
            details=data.get("details", {}),
        )


def worker_count() -> int:
    """Thread cap from UBBLAB_THREADS, else the CPU count."""
    env = os.environ.get("UBBLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _pmap(fn: Callable, items: Sequence) -> list:
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(n) as ex:
        return list(ex.map(fn, items))


def _dense(kets: Sequence[Ket]) -> np.ndarray:
    return np.array([k.to_dense() for k in kets])


def _ket_terms(k: Ket) -> list:
    return [[list(idx), amp.real, amp.imag] for idx, amp in k.terms.items()]


def numeric_complement(kets: Sequence[Ket], tau: float = RANK_TOL) -> list[Ket]:
    """Orthonormal basis of span(kets)^perp from the SVD of the stacked vectors."""
    d = kets[0].d
    V = _dense(kets)
    _, s, Vh = np.linalg.svd(V.conj(), full_matrices=True)
    r = int(np.count_nonzero(s > tau * s[0])) if s.size else 0
    return [Ket.from_dense(row.conj(), d) for row in Vh[r:]]


def projector(kets: Sequence[Ket]) -> np.ndarray:
    B = _dense(kets)
    return B.T @ B.conj()


def cut_ratios(k: Ket) -> dict[str, float]:
    """sigma_2/sigma_1 of ``k`` under each of the seven cuts."""
    out = {}
    for bp in ALL_BIPARTITIONS:
        s = np.linalg.svd(matricize(k, bp), compute_uv=False)
        out[str(bp)] = float(s[1] / s[0]) if len(s) > 1 and s[0] > 0 else 0.0
    return out


def verify_orthogonality(family: StateFamily, tol: float = 1e-12, name: str = "orthogonality") -> CheckResult:
    t0 = time.perf_counter()
    if len(family) == 0:
        raise ValueError("family is empty")
    V = _dense(family.kets)
    G = V.conj() @ V.T
    norms = np.sqrt(np.real(np.diag(G)))
    R = np.abs(G) / np.outer(norms, norms)
    np.fill_diagonal(R, 0.0)
    i, j = np.unravel_index(int(np.argmax(R)), R.shape) if len(family) > 1 else (0, 0)
    worst_val = float(R[i, j])
    labels = family.labels
    ok = worst_val <= tol
    pair = sorted([labels[i], labels[j]])
    return CheckResult(
        name,
        Verdict.PASS if ok else Verdict.FAIL,
        {"n_states": len(family), "worst_overlap": worst_val},
        time.perf_counter() - t0,
        witness=None if ok else {"pair": pair, "overlap": worst_val},
        details={"worst_pair": pair, "tol": tol},
    )


def verify_biseparability(family: StateFamily, tol: float = PRODUCT_TOL) -> CheckResult:
    """Every UBB-role member must be a product across at least one cut."""
    t0 = time.perf_counter()
    members = [m for m in family if m.role in UBB_ROLES] or list(family)
    witnesses: dict[str, list[str]] = {}
    worst_label, worst_ratio = None, 0.0
    for m in members:
        ratios = cut_ratios(m.ket)
        cuts = [c for c, r in ratios.items() if r <= tol]
        witnesses[m.label] = cuts
        best = min(ratios.values())
        if best >= worst_ratio:
            worst_label, worst_ratio = m.label, best
    missing = [lab for lab, cuts in witnesses.items() if not cuts]
    witness = None
    if missing:
        witness = {"label": missing[0], "cut_ratios": cut_ratios(family.get(missing[0]).ket)}
    return CheckResult(
        "biseparability",
        Verdict.FAIL if missing else Verdict.PASS,
        {
            "n_checked": len(members),
            "n_biseparable": len(members) - len(missing),
            "worst_best_ratio": worst_ratio,
        },
        time.perf_counter() - t0,
        witness=witness,
        details={"witnesses": witnesses, "worst_label": worst_label, "tol": tol},
    )


def verify_counts(d: int, tau: float = RANK_TOL) -> CheckResult:
    t0 = time.perf_counter()
    L = num_layers(d)
    ubb = build_ubb(d)
    got = {
        "ubb_size": len(ubb),
        "ubb_rank": numeric_rank(_dense(ubb.kets), tau),
        "ges_size": len(build_ges_basis(d).select([Role.GES_BASIS])),
        "psi_plus_seven_dim": len(psi_plus_seven_basis(d)),
    }
    want = {
        "ubb_size": d**4 - 8 * L,
        "ubb_rank": d**4 - 8 * L,
        "ges_size": 8 * L,
        "psi_plus_seven_dim": 7 * L - 1,
    }
    bad = {k: {"got": got[k], "expected": want[k]} for k in got if got[k] != want[k]}
    metrics = dict(got)
    metrics.update({f"expected_{k}": v for k, v in want.items()})
    return CheckResult(
        "counts",
        Verdict.FAIL if bad else Verdict.PASS,
        metrics,
        time.perf_counter() - t0,
        witness={"d": d, "mismatch": bad} if bad else None,
    )


def _gram_deviation(kets: Sequence[Ket]) -> float:
    V = _dense(kets)
    return float(np.abs(V.conj() @ V.T - np.eye(len(kets))).max())


def _random_unit(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def verify_ges(d: int, tol: float = 1e-6, random_trials: int = 100, seed: int = 0,
               orth_tol: float = 1e-10) -> CheckResult:
    """Orthonormality, orthogonality to the UBB and genuine entanglement of the GES basis.

    The literal per-layer G8 states are checked as written. If their Gram matrix
    is not the identity, the deviation is reported and the remaining checks use
    the Gram-Schmidt fallback basis.
    """
    t0 = time.perf_counter()
    metrics: dict = {}
    details: dict = {"seed": seed, "random_trials": random_trials}
    failures: list[dict] = []

    literal = build_ges_basis(d, "literal").select([Role.GES_BASIS])
    lit_dev = _gram_deviation(literal.kets)
    ov = g8_overlaps(d)
    off = ov - np.diag(np.diag(ov))
    metrics["literal_gram_deviation"] = lit_dev
    metrics["g8_max_cross_overlap"] = float(np.abs(off).max()) if ov.shape[0] > 1 else 0.0
    details["g8_gram"] = [[[z.real, z.imag] for z in row] for row in ov]

    if lit_dev <= orth_tol:
        basis, details["basis"] = literal, "literal"
    else:
        basis = build_ges_basis(d, "orthonormalized").select([Role.GES_BASIS])
        details["basis"] = "orthonormalized"
    kets = basis.kets
    metrics["basis_size"] = len(kets)

    # (a) orthonormality of the basis in use
    dev = _gram_deviation(kets)
    metrics["gram_deviation"] = dev
    if dev > orth_tol:
        failures.append({"check": "orthonormality", "gram_deviation": dev})

    # (b) orthogonality to every UBB member
    ubb = build_ubb(d)
    U = _dense(ubb.kets)
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    X = np.abs(U.conj() @ _dense(kets).T)
    i, j = np.unravel_index(int(np.argmax(X)), X.shape)
    metrics["max_ubb_overlap"] = float(X[i, j])
    if X[i, j] > orth_tol:
        failures.append({"check": "ubb_orthogonality", "pair": [ubb.labels[i], basis.labels[j]],
                         "overlap": float(X[i, j])})

    # (c) entanglement of each basis state and of random combinations
    per_state = {m.label: min(cut_ratios(m.ket).values()) for m in basis}
    lab = min(per_state, key=per_state.get)
    metrics["min_basis_ratio"] = per_state[lab]
    if per_state[lab] <= tol:
        failures.append({"check": "basis_entanglement", "label": lab, "ratio": per_state[lab]})
    rng = np.random.default_rng(seed)
    V = _dense(kets)
    best_ratio, best_c, best_cut = np.inf, None, None
    for _ in range(random_trials):
        c = _random_unit(rng, len(kets))
        k = Ket.from_dense(c @ V, d)
        ratios = cut_ratios(k)
        cut = min(ratios, key=ratios.get)
        if ratios[cut] < best_ratio:
            best_ratio, best_c, best_cut = ratios[cut], c, cut
    if random_trials:
        metrics["min_random_ratio"] = float(best_ratio)
        if best_ratio <= tol:
            failures.append({"check": "random_entanglement", "bipartition": best_cut,
                             "coefficients": best_c, "ratio": float(best_ratio)})

    # Projector agreement with the numerically computed complement.
    P_basis = projector(kets)
    P_num = projector(numeric_complement(ubb.kets))
    gap = float(np.linalg.norm(P_basis - P_num, 2))
    metrics["projector_discrepancy"] = gap
    if details["basis"] != "literal":
        metrics["literal_projector_discrepancy"] = float(np.linalg.norm(projector(literal.kets) - P_num, 2))
    if gap > 1e-8:
        failures.append({"check": "projector_agreement", "discrepancy": gap})

    # (d) d = 3: the explicit eight-state basis equals this one up to phases
    if d == 3:
        thm = build_ges_basis_thm1()
        C = _dense(thm.kets).conj() @ _dense(kets).T
        sv = np.linalg.svd(C, compute_uv=False)
        phase = np.abs(np.diag(C))
        metrics["cross_gram_sv_deviation"] = float(np.abs(sv - 1).max())
        metrics["min_matched_overlap"] = float(phase.min())
        if np.abs(sv - 1).max() > 1e-8 or np.abs(phase - 1).max() > orth_tol:
            failures.append({"check": "explicit_basis_match", "singular_values": sv, "overlaps": phase})

    return CheckResult(
        "ges",
        Verdict.FAIL if failures else Verdict.PASS,
        metrics,
        time.perf_counter() - t0,
        witness=failures[0] if failures else None,
        details=dict(details, failures=failures),
    )


def verify_unextendibility(
    d: int,
    mode: str = "both",
    restarts: int = 200,
    seed: int = 0,
    complement: Sequence[Ket] | None = None,
    floor: float = SIGMA2_FLOOR,
) -> CheckResult:
    """No state of the complement is a product across any cut.

    Symbolic Closed on all cuts is a certificate (Pass). Numeric search alone is
    heuristic: Warn when every cut stays above ``floor``, Fail when it finds a
    near-product state (the witness carries the cut and the coefficients).
    ``complement`` replaces the computed complement and is numeric-only.
    """
    if mode not in ("symbolic", "numeric", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    if complement is not None and mode != "numeric":
        raise ValueError("a supplied complement can only be checked numerically")
    t0 = time.perf_counter()
    metrics: dict = {}
    details: dict = {"mode": mode, "restarts": restarts, "seed": seed}
    symbolic_ok = False
    if mode in ("symbolic", "both"):
        outcomes = check_unextendibility_symbolic(d)
        details["symbolic"] = {cut: o.to_dict() for cut, o in outcomes.items()}
        n_closed = sum(o.closed for o in outcomes.values())
        metrics["symbolic_closed"] = n_closed
        metrics["symbolic_max_branches"] = max(o.branches for o in outcomes.values())
        symbolic_ok = n_closed == len(outcomes)

    witness = None
    numeric_ok = None
    if mode in ("numeric", "both"):
        comp = list(complement) if complement is not None else numeric_complement(build_ubb(d).kets)
        metrics["complement_dim"] = len(comp)

        def search(item):
            i, bp = item
            return min_second_singular(comp, bp, restarts=restarts, seed=seed + i)

        found = _pmap(search, list(enumerate(ALL_BIPARTITIONS)))
        per_cut = {str(bp): float(v) for bp, (v, _) in zip(ALL_BIPARTITIONS, found)}
        details["numeric_min_sigma2"] = per_cut
        details["numeric_seeds"] = {str(bp): seed + i for i, bp in enumerate(ALL_BIPARTITIONS)}
        k = int(np.argmin([v for v, _ in found]))
        metrics["numeric_min_sigma2"] = float(found[k][0])
        numeric_ok = found[k][0] > floor
        if found[k][0] <= SIGMA2_WITNESS:
            c = found[k][1]
            state = Ket.from_dense(c @ _dense(comp), comp[0].d)
            witness = {"bipartition": str(ALL_BIPARTITIONS[k]), "sigma2": float(found[k][0]),
                       "coefficients": c, "state": _ket_terms(state)}

    if witness is not None:
        status = Verdict.FAIL
    elif symbolic_ok:
        status = Verdict.PASS
    elif numeric_ok:
        status = Verdict.WARN
    else:
        status = Verdict.INCONCLUSIVE
    details["evidence"] = "certificate" if symbolic_ok else ("heuristic" if numeric_ok else "none")
    return CheckResult("unextendibility", status, metrics, time.perf_counter() - t0,
                       witness=witness, details=details)


def verify_strong_nonlocality(
    d: int,
    parties: Iterable[int] = PARTIES,
    long_running: bool = False,
    family: StateFamily | None = None,
    tau: float = RANK_TOL,
) -> CheckResult:
    """For each chosen party, the orthogonality-preserving Hermitian operators on the
    other three parties must form the one-dimensional span of the identity."""
    if d >= 5 and not long_running:
        raise LongRunningRequired(f"d={d} builds {d**6}x{d**6} Gram matrices; pass long_running=True")
    t0 = time.perf_counter()
    parties = tuple(sorted(set(parties)))
    fam = family if family is not None else build_ubb(d)
    pairs = list(itertools.combinations(fam.kets, 2))
    D = d**3

    def solve(i):
        measured = tuple(p for p in PARTIES if p != i)
        return hermitian_constraint_nullspace(D, pairs, measured, tau)

    results = _pmap(solve, parties)
    metrics: dict = {"n_pairs": len(pairs), "side_dim": D}
    details: dict = {"family_size": len(fam), "parties": list(parties)}
    witness = None
    for i, ns in zip(parties, results):
        metrics[f"nullspace_dim_p{i}"] = ns.dim
        lam = ns.eigenvalues / ns.eigenvalues[-1] if ns.eigenvalues[-1] > 0 else ns.eigenvalues
        if ns.dim < len(lam):
            metrics[f"spectral_gap_p{i}"] = float(lam[ns.dim])
        details[f"smallest_eigenvalues_p{i}"] = ns.spectrum_near_threshold()
        overlap = None
        if ns.dim == 1:
            H = ns.basis[0]
            overlap = float(abs(np.trace(H)) / np.sqrt(D) / np.linalg.norm(H))
            metrics[f"identity_overlap_p{i}"] = overlap
        ok = ns.dim == 1 and abs(overlap - 1) <= 1e-8
        if not ok and witness is None:
            witness = {"party": i, "nullspace_dim": ns.dim, "identity_overlap": overlap,
                       "family_labels_missing": sorted(set(build_ubb(d).labels) - set(fam.labels))}
    return CheckResult(
        "nonlocality",
        Verdict.FAIL if witness else Verdict.PASS,
        metrics,
        time.perf_counter() - t0,
        witness=witness,
        details=details,
    )


def designated_reduced_vectors() -> np.ndarray:
    """The nine d = 3 vectors on parties 2,3,4, one chosen from the range of each
    reduced state Tr_1 |g><g| for g in psi_+^{U1..U8} and |1111>."""

    def prod(*levels):
        out = np.ones(1)
        for ls in levels:
            e = np.zeros(3)
            e[list(ls)] = 1
            out = np.kron(out, e)
        return out

    def two(*pairs):
        e = np.zeros(9)
        for a, b in pairs:
            e[3 * a + b] += 1
        return e

    return np.array([
        prod([0], [0], [0]),
        prod([2], [2], [2]),
        np.kron(prod([0]), two((1, 2), (2, 2), (0, 1), (0, 2))),
        np.kron(prod([2]), two((0, 0), (1, 0), (2, 0), (2, 1))),
        prod([1, 2], [0, 1], [0]),
        np.kron(two((1, 2), (2, 2), (0, 1), (0, 2)), prod([0, 1])),
        prod([0, 1], [1, 2], [2]),
        np.kron(two((0, 0), (1, 0), (2, 0), (2, 1)), prod([1, 2])),
        prod([1], [1], [1]),
    ], dtype=complex)


def _range_residual(rho: np.ndarray, v: np.ndarray) -> float:
    P = rho @ np.linalg.pinv(rho, hermitian=True)
    return float(np.linalg.norm(P @ v - v) / np.linalg.norm(v))


def _marginal_ranks(kets: Sequence[Ket], bp: Bipartition, tau: float) -> tuple[int, int]:
    """(rank of the operator kept on side A, rank kept on side B)."""
    ra = numeric_rank(partial_trace(kets, bp.group_a).matrix, tau)
    rb = numeric_rank(partial_trace(kets, bp.group_b).matrix, tau)
    return ra, rb


def _random_subspace(rng: np.random.Generator, kets: Sequence[Ket]) -> list[Ket]:
    n = len(kets)
    k = int(rng.integers(1, n))
    Z = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    Q, _ = np.linalg.qr(Z)
    V = _dense(kets)
    return [Ket.from_dense(Q[:, j] @ V, kets[0].d) for j in range(k)]


SINGLE_PARTY_CUTS = tuple(Bipartition.parse(s) for s in ("1|234", "134|2", "124|3", "123|4"))
TWO_TWO_CUTS = tuple(Bipartition.parse(s) for s in ("12|34", "13|24", "14|23"))


def verify_distillability(d: int, subspace: str = "full_complement", tau: float = RANK_TOL,
                          seed: int = 0, sub_trials: int = 20) -> CheckResult:
    """Rank condition rank(P) < max(rank P_A, rank P_B) on the claimed cuts.

    ``full_complement`` checks the four single-party cuts, where the three-party
    marginal must exceed the dimension; the 2|2 cuts are reported without a
    verdict. ``psi_plus_seven`` checks all seven cuts. The same inequalities are
    re-checked on ``sub_trials`` random lower-rank sub-projectors.
    """
    if subspace not in ("full_complement", "psi_plus_seven"):
        raise ValueError(f"unknown subspace {subspace!r}")
    t0 = time.perf_counter()
    if subspace == "full_complement":
        kets = numeric_complement(build_ubb(d).kets, tau)
        cuts = SINGLE_PARTY_CUTS
    else:
        kets = psi_plus_seven_basis(d)
        cuts = ALL_BIPARTITIONS
    n = len(kets)
    metrics: dict = {"dim": n}
    details: dict = {"seed": seed, "sub_trials": sub_trials, "marginal_ranks": {}}
    failures: list[dict] = []

    def check(basis: Sequence[Ket], bp: Bipartition) -> tuple[int, int, bool]:
        ra, rb = _marginal_ranks(basis, bp, tau)
        if subspace == "full_complement":
            # The three-party side is group_b for 1|234 and group_a otherwise.
            big = rb if len(bp.group_b) == 3 else ra
            return ra, rb, big >= len(basis) + 1
        return ra, rb, max(ra, rb) >= len(basis) + 1

    for bp in cuts:
        ra, rb, ok = check(kets, bp)
        details["marginal_ranks"][str(bp)] = [ra, rb]
        metrics[f"max_marginal_rank_{bp}"] = max(ra, rb)
        if not ok:
            failures.append({"bipartition": str(bp), "marginal_ranks": [ra, rb], "dim": n})
    metrics["min_rank_margin"] = min(max(r) - n for r in details["marginal_ranks"].values())

    if subspace == "full_complement":
        details["unclaimed_cuts"] = {str(bp): list(_marginal_ranks(kets, bp, tau)) for bp in TWO_TWO_CUTS}
        if d == 3:
            phi = designated_reduced_vectors()
            metrics["nine_vector_rank"] = numeric_rank(phi, tau)
            sources = [build_psi(3, 1, i, "+") for i in range(1, 9)] + [Ket.basis(3, (1, 1, 1, 1))]
            res = [_range_residual(partial_trace([g], (2, 3, 4), check=False).matrix, v)
                   for g, v in zip(sources, phi)]
            metrics["nine_vector_max_range_residual"] = max(res)
            if metrics["nine_vector_rank"] != 9 or max(res) > 1e-10:
                failures.append({"check": "nine_vectors", "rank": metrics["nine_vector_rank"],
                                 "range_residuals": res})

    rng = np.random.default_rng(seed)
    sub_violations = 0
    for trial in range(sub_trials if n > 1 else 0):
        sub = _random_subspace(rng, kets)
        for bp in cuts:
            ra, rb, ok = check(sub, bp)
            if not ok:
                sub_violations += 1
                failures.append({"check": "sub_projector", "trial": trial, "seed": seed,
                                 "bipartition": str(bp), "dim": len(sub), "marginal_ranks": [ra, rb]})
    metrics["sub_projector_violations"] = sub_violations

    return CheckResult(
        f"distillability_{subspace}",
        Verdict.FAIL if failures else Verdict.PASS,
        metrics,
        time.perf_counter() - t0,
        witness=failures[0] if failures else None,
        details=dict(details, failures=failures),
    )

