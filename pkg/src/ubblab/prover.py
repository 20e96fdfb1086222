"""Case-splitting prover showing a coefficient-pattern matrix admits no rank-1 filling.

A pattern matrix assigns one symbol (an unknown complex coefficient) to every
cell. The claim to refute is: some assignment makes the matrix rank one, is not
identically zero, and has zero cell sum (orthogonality to the all-ones stopper).

Rank one means every 2x2 minor vanishes, i.e. x11*x22 = x12*x21. The engine
branches on Zero/Nonzero per symbol, merges symbols forced equal, and closes a
branch when the constraints contradict or the surviving nonzero symbols form a
single equality class (the cell sum is then a nonzero multiple of one value).
"""

from __future__ import annotations

import enum
import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AmbiguousCell, BranchBudgetExceeded, NonUnitAmplitude
from .families import build_psi, center_state, num_layers
from .tensor import ALL_BIPARTITIONS, Bipartition, Ket

ZERO = "0"


@dataclass(frozen=True)
class PatternMatrix:
    cells: tuple[tuple[str, ...], ...]
    alphabet: tuple[str, ...]

    @property
    def rows(self) -> int:
        return len(self.cells)

    @property
    def cols(self) -> int:
        return len(self.cells[0]) if self.cells else 0

    @property
    def multiplicity(self) -> dict[str, int]:
        c = Counter(s for row in self.cells for s in row)
        return {s: c.get(s, 0) for s in self.alphabet + ((ZERO,) if ZERO in c else ())}

    def __str__(self) -> str:
        w = max(len(s) for row in self.cells for s in row)
        return "\n".join(" ".join(s.rjust(w) for s in row) for row in self.cells)

    def instantiate(self, values: dict[str, complex]) -> np.ndarray:
        vals = dict(values)
        vals[ZERO] = 0.0
        return np.array([[vals[s] for s in row] for row in self.cells], dtype=complex)


def derive_pattern(
    basis: Sequence[Ket],
    symbols: Sequence[str],
    bp: Bipartition | None = None,
    rows: Sequence[int] | None = None,
    cols: Sequence[int] | None = None,
) -> PatternMatrix:
    """Pattern of sum_s c_s * basis_s under a bipartition (or explicit row/column party order)."""
    if len(basis) != len(symbols):
        raise ValueError("need one symbol per basis state")
    if ZERO in symbols or len(set(symbols)) != len(symbols):
        raise ValueError("symbols must be distinct and must not use the reserved zero symbol")
    if bp is not None:
        rows, cols = bp.group_a, bp.group_b
    if rows is None or cols is None:
        raise ValueError("give a bipartition or explicit rows/cols")
    owner: dict[tuple[int, ...], str] = {}
    for ket, sym in zip(basis, symbols):
        for idx, amp in ket.terms.items():
            if abs(amp - 1) > 1e-12:
                raise NonUnitAmplitude(f"state {sym} has amplitude {amp} at {idx}")
            if idx in owner:
                raise AmbiguousCell(f"index {idx} shared by {owner[idx]} and {sym}")
            owner[idx] = sym
    d = basis[0].d
    label = np.full((d,) * 4, ZERO, dtype=object)
    for idx, sym in owner.items():
        label[idx] = sym
    t = np.transpose(label, [p - 1 for p in tuple(rows) + tuple(cols)])
    grid = t.reshape(d ** len(rows), d ** len(cols))
    return PatternMatrix(tuple(tuple(r) for r in grid), tuple(symbols))


class Status(enum.IntEnum):
    UNKNOWN = 0
    ZERO = 1
    NONZERO = 2


@dataclass(frozen=True)
class Equation:
    """lhs[0]*lhs[1] = rhs[0]*rhs[1], cited by the first minor that produced it."""

    lhs: tuple[str, str]
    rhs: tuple[str, str]
    minor: tuple[int, int, int, int]  # r1, r2, c1, c2


def minor_equations(P: PatternMatrix) -> list[Equation]:
    """Distinct non-trivial symbol equations from all 2x2 minors, in first-seen order."""
    seen: dict[tuple, Equation] = {}
    cells = P.cells
    cols = range(P.cols)
    col_pairs = list(itertools.combinations(cols, 2))
    for r1, r2 in itertools.combinations(range(P.rows), 2):
        a, b = cells[r1], cells[r2]
        for c1, c2 in col_pairs:
            lhs = tuple(sorted((a[c1], b[c2])))
            rhs = tuple(sorted((a[c2], b[c1])))
            if lhs == rhs:
                continue
            key = (lhs, rhs) if lhs < rhs else (rhs, lhs)
            if key not in seen:
                seen[key] = Equation(key[0], key[1], (r1, r2, c1, c2))
    return list(seen.values())


@dataclass
class _State:
    parent: dict[str, str]
    status: dict[str, Status]  # keyed by class representative

    def copy(self) -> "_State":
        return _State(dict(self.parent), dict(self.status))

    def find(self, s: str) -> str:
        root = s
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[s] != root:
            self.parent[s], s = root, self.parent[s]
        return root

    def get(self, s: str) -> Status:
        return self.status[self.find(s)]


class _Contradiction(Exception):
    def __init__(self, step: dict):
        self.step = step


@dataclass
class ProofOutcome:
    status: str  # "Closed" or "Inconclusive"
    branches: int
    trace: list[dict] = field(repr=False)
    open_branches: list[dict] = field(default_factory=list, repr=False)
    counterexample: bool = False

    @property
    def closed(self) -> bool:
        return self.status == "Closed"

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "branches": self.branches,
            "open_branches": self.open_branches,
            "counterexample": self.counterexample,
            "trace": self.trace,
        }


class _Engine:
    def __init__(self, P: PatternMatrix, max_branches: int):
        self.P = P
        self.max_branches = max_branches
        self.mult = P.multiplicity
        self.symbols = [s for s in P.alphabet if self.mult.get(s, 0) > 0]
        self.equations = minor_equations(P)
        self.by_symbol: dict[str, list[int]] = {s: [] for s in self.symbols + [ZERO]}
        for i, eq in enumerate(self.equations):
            for s in set(eq.lhs + eq.rhs):
                self.by_symbol[s].append(i)
        self.nodes = 0
        self.open: list[dict] = []
        self.counterexample = False
        # Branch order: descending multiplicity, ties by alphabet position.
        self.order = sorted(self.symbols, key=lambda s: (-self.mult[s], P.alphabet.index(s)))

    def _cells(self, eq: Equation) -> dict:
        r1, r2, c1, c2 = eq.minor
        return {"minor": [r1, r2, c1, c2], "lhs": list(eq.lhs), "rhs": list(eq.rhs)}

    # -- state mutation; each returns the symbol classes whose status/shape changed --
    def _set(self, st: _State, s: str, value: Status, eq: Equation | None, rule: str, trace: list) -> list[str]:
        r = st.find(s)
        cur = st.status[r]
        if cur == value:
            return []
        if cur != Status.UNKNOWN:
            step = {"rule": "conflict", "symbol": s, "was": cur.name, "forced": value.name}
            if eq is not None:
                step.update(self._cells(eq))
            raise _Contradiction(step)
        st.status[r] = value
        step = {"rule": rule, "symbol": s, "value": value.name}
        if eq is not None:
            step.update(self._cells(eq))
        trace.append(step)
        return self._members(st, r)

    def _merge(self, st: _State, x: str, y: str, eq: Equation, trace: list,
               cancel: tuple[str, str] | None = None) -> list[str]:
        rx, ry = st.find(x), st.find(y)
        if rx == ry:
            return []
        sx, sy = st.status[rx], st.status[ry]
        if {sx, sy} == {Status.ZERO, Status.NONZERO}:
            raise _Contradiction({"rule": "conflict", "merge": [x, y], **self._cells(eq)})
        new = max(sx, sy)
        keep, drop = sorted((rx, ry), key=lambda s: self.P.alphabet.index(s) if s != ZERO else -1)
        st.parent[drop] = keep
        st.status[keep] = new
        del st.status[drop]
        step = {"rule": "R1", "merge": [x, y], **self._cells(eq)}
        if cancel is not None:
            step["cancel"] = list(cancel)
        trace.append(step)
        return self._members(st, keep)

    def _members(self, st: _State, rep: str) -> list[str]:
        return [s for s in st.parent if st.find(s) == rep]

    def _apply(self, st: _State, eq: Equation, trace: list) -> tuple[list[str], bool]:
        """Propagate one equation. Returns (changed symbols, still pending)."""
        L = [st.find(s) for s in eq.lhs]
        R = [st.find(s) for s in eq.rhs]
        stat = st.status
        lz = any(stat[s] == Status.ZERO for s in L)
        rz = any(stat[s] == Status.ZERO for s in R)
        if lz and rz:
            return [], False
        if lz or rz:
            side, raw = (R, eq.rhs) if lz else (L, eq.lhs)
            st_side = [stat[s] for s in side]
            if all(x == Status.NONZERO for x in st_side):
                raise _Contradiction({"rule": "R2", "reason": "zero product equals nonzero product", **self._cells(eq)})
            if side[0] == side[1]:
                return self._set(st, raw[0], Status.ZERO, eq, "R2", trace), False
            for i in (0, 1):
                if st_side[i] == Status.NONZERO and st_side[1 - i] == Status.UNKNOWN:
                    return self._set(st, raw[1 - i], Status.ZERO, eq, "R2", trace), False
            return [], True
        # No known zero on either side: cancel classes known to be nonzero.
        L, R = list(L), list(R)
        for s in list(L):
            if s in R and stat[s] == Status.NONZERO:
                L.remove(s)
                R.remove(s)
        if not L:
            return [], False
        if len(L) == 1:
            x = next(a for a in eq.lhs if st.find(a) == L[0])
            y = next(a for a in eq.rhs if st.find(a) == R[0])
            lo, ro = list(eq.lhs), list(eq.rhs)
            lo.remove(x)
            ro.remove(y)
            return self._merge(st, x, y, eq, trace, cancel=(lo[0], ro[0])), False
        if sorted(L) == sorted(R):
            return [], False
        lnz = all(stat[s] == Status.NONZERO for s in L)
        rnz = all(stat[s] == Status.NONZERO for s in R)
        if lnz != rnz:
            # A nonzero product forces both factors on the other side to be nonzero.
            raw = eq.rhs if lnz else eq.lhs
            changed = []
            for s in raw:
                if st.get(s) == Status.UNKNOWN:
                    changed += self._set(st, s, Status.NONZERO, eq, "R2", trace)
            return changed, False
        return [], True

    def _saturate(self, st: _State, dirty: list[str], trace: list) -> set[int]:
        """Worklist propagation; returns indices of equations left pending."""
        queue = list(dict.fromkeys(i for s in dirty for i in self.by_symbol.get(s, [])))
        queued = set(queue)
        pending: set[int] = set()
        while queue:
            i = queue.pop(0)
            queued.discard(i)
            changed, still = self._apply(st, self.equations[i], trace)
            if still:
                pending.add(i)
            else:
                pending.discard(i)
            for s in changed:
                for j in self.by_symbol.get(s, []):
                    if j not in queued:
                        queue.append(j)
                        queued.add(j)
        return pending

    def _closure(self, st: _State) -> str | None:
        reps = {st.find(s) for s in self.symbols}
        stats = [st.status[r] for r in reps]
        if all(x == Status.ZERO for x in stats):
            return "all coefficients zero"
        if Status.UNKNOWN in stats:
            return None
        nonzero = [r for r in reps if st.status[r] == Status.NONZERO]
        if len(nonzero) == 1:
            return "single nonzero class: stopper overlap is a nonzero multiple"
        return None

    def run(self) -> ProofOutcome:
        st = _State({s: s for s in self.symbols + [ZERO]}, {s: Status.UNKNOWN for s in self.symbols})
        st.status[ZERO] = Status.ZERO
        node = self._explore(st, list(self.symbols) + [ZERO], [])
        status = "Closed" if not self.open else "Inconclusive"
        return ProofOutcome(status, self.nodes, [node], self.open, self.counterexample)

    def _explore(self, st: _State, dirty: list[str], path: list) -> dict:
        self.nodes += 1
        if self.nodes > self.max_branches:
            raise BranchBudgetExceeded(f"more than {self.max_branches} branches")
        trace: list[dict] = []
        node = {"path": list(path), "steps": trace}
        try:
            pending = self._saturate(st, dirty, trace)
        except _Contradiction as c:
            trace.append(c.step)
            node["closed"] = "contradiction"
            return node
        why = self._closure(st)
        if why is not None:
            trace.append({"rule": "R3", "reason": why})
            node["closed"] = why
            return node
        unknown = [s for s in self.order if st.get(s) == Status.UNKNOWN and st.find(s) == s]
        if not unknown:
            # Leaf with >= 2 nonzero classes. Pending sets are per node, so re-check everything.
            pending = self._saturate(st, list(self.symbols) + [ZERO], trace)
            desc = {
                "path": list(path),
                "classes": self._classes(st),
                "pending": [self._cells(self.equations[i]) for i in sorted(pending)],
            }
            if not pending:
                # Every minor vanishes identically: a genuine rank-1 family with free
                # class values, which can be chosen to make the stopper overlap zero.
                desc["counterexample"] = True
                self.counterexample = True
            self.open.append(desc)
            node["open"] = True
            return node
        pivot = unknown[0]
        children = []
        for value in (Status.ZERO, Status.NONZERO):
            child = st.copy()
            child_trace_step = {"rule": "branch", "symbol": pivot, "value": value.name}
            child.status[child.find(pivot)] = value
            sub = self._explore(child, self._members(child, child.find(pivot)), path + [child_trace_step])
            children.append(sub)
        node["children"] = children
        return node

    def _classes(self, st: _State) -> list[dict]:
        groups: dict[str, list[str]] = {}
        for s in self.symbols:
            groups.setdefault(st.find(s), []).append(s)
        return [{"symbols": g, "status": st.status[r].name} for r, g in groups.items()]


def prove_no_rank1(P: PatternMatrix, max_branches: int = 1 << 20) -> ProofOutcome:
    """Try to refute a nonzero rank-1 filling of ``P`` with zero cell sum.

    Closed means every Zero/Nonzero case split ended in a contradiction. Anything
    left undecided is reported as Inconclusive with the open branches; the engine
    never closes a branch on an unresolved equation.
    """
    return _Engine(P, max_branches).run()


def iter_steps(node: dict):
    """Depth-first walk over every recorded step of a proof trace tree."""
    for step in node.get("path", [])[-1:]:
        yield step
    yield from node["steps"]
    for child in node.get("children", []):
        yield from iter_steps(child)


def unextendibility_basis(d: int) -> tuple[list[Ket], list[str]]:
    """Disjoint 0/1 basis that spans every complement candidate, with its symbols.

    d = 3 uses a..h for the eight psi_+ states and k for |1111>; larger d uses
    a_l..h_l per layer and p for the center state.
    """
    if d < 3:
        raise ValueError(f"d >= 3 required, got {d}")
    kets, symbols = [], []
    for l in range(1, num_layers(d) + 1):
        for i, letter in enumerate("abcdefgh", start=1):
            kets.append(build_psi(d, l, i, "+"))
            symbols.append(letter if d == 3 else f"{letter}_{l}")
    kets.append(center_state(d))
    symbols.append("k" if d == 3 else "p")
    return kets, symbols


def unextendibility_patterns(d: int) -> dict[Bipartition, PatternMatrix]:
    kets, symbols = unextendibility_basis(d)
    return {bp: derive_pattern(kets, symbols, bp) for bp in ALL_BIPARTITIONS}


def check_unextendibility_symbolic(d: int, max_branches: int = 1 << 20) -> dict[str, ProofOutcome]:
    """Run the prover on all seven cut patterns; keys are cut strings like ``"12|34"``.

    A branch budget overrun is reported as an Inconclusive outcome for that cut.
    """
    out = {}
    for bp, P in unextendibility_patterns(d).items():
        try:
            out[str(bp)] = prove_no_rank1(P, max_branches)
        except BranchBudgetExceeded as exc:
            out[str(bp)] = ProofOutcome("Inconclusive", max_branches, [], [{"reason": str(exc)}])
    return out
