"""State-family files and verification reports (both JSON text documents)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .certify import CheckResult, Verdict, worst
from .families import Member, Role, StateFamily
from .tensor import Ket

FORMAT_VERSION = 1

# Human-readable names for each check, keyed by check name.
CHECK_TITLES = {
    "counts": "Theorem 4 (dimension counts)",
    "orthogonality": "Theorem 1 (pairwise orthogonality)",
    "orthogonality_with_complement": "Theorem 1 (complement basis orthogonal to the UBB)",
    "biseparability": "Theorem 1 (every member biseparable)",
    "ges": "Theorem 1 (genuinely entangled subspace basis)",
    "unextendibility": "Theorem 1 (unextendibility)",
    "nonlocality": "Theorem 2 (strong nonlocality)",
    "distillability_full_complement": "Theorem 3 (distillability of the full complement)",
    "distillability_psi_plus_seven": "Theorem 3 (distillability across every cut)",
}


def _num(x: float) -> str:
    return format(float(x), ".17g")


def dump_family(family: StateFamily) -> str:
    """Canonical text: states in family order, terms in lexicographic index order,
    amplitudes with 17 significant digits."""
    lines = ["{", f'  "format_version": {FORMAT_VERSION},', f'  "d": {family.d},', '  "states": [']
    for n, m in enumerate(family):
        terms = ", ".join(
            '{"idx": [%s], "re": %s, "im": %s}' % (", ".join(map(str, idx)), _num(a.real), _num(a.imag))
            for idx, a in m.ket.terms.items()
        )
        head = {"label": m.label, "role": m.role.value, "layer": m.layer, "subset": m.subset}
        body = json.dumps(head)[:-1] + f', "terms": [{terms}]}}'
        lines.append("    " + body + ("," if n < len(family) - 1 else ""))
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def load_family(text: str) -> StateFamily:
    data = json.loads(text)
    if data.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported family format version {data.get('format_version')!r}")
    d = int(data["d"])
    members = []
    for s in data["states"]:
        ket = Ket(d, {tuple(t["idx"]): complex(t["re"], t["im"]) for t in s["terms"]})
        members.append(Member(s["label"], Role(s["role"]), s["layer"], s["subset"], ket))
    return StateFamily(d, tuple(members))


@dataclass
class VerificationReport:
    version: str
    d: int
    checks: list[CheckResult]
    config: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def overall(self) -> Verdict:
        return worst(c.status for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "artifact_version": self.version,
            "d": self.d,
            "overall": self.overall.value,
            "config": self.config,
            "elapsed": self.elapsed,
            "checks": [c.to_dict() for c in self.checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        if data.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported report format version {data.get('format_version')!r}")
        return cls(
            version=data["artifact_version"],
            d=int(data["d"]),
            checks=[CheckResult.from_dict(c) for c in data["checks"]],
            config=data.get("config", {}),
            elapsed=data.get("elapsed", 0.0),
        )

    @classmethod
    def loads(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


def render_human(report: VerificationReport) -> str:
    out = [f"ubblab {report.version}  d={report.d}  overall: {report.overall.value}  ({report.elapsed:.1f} s)"]
    for c in report.checks:
        title = CHECK_TITLES.get(c.name, c.name)
        out.append(f"[{c.status.value}] {title}  ({c.elapsed:.2f} s)")
        for k, v in c.metrics.items():
            out.append(f"    {k}: {_fmt(v)}")
        if c.witness:
            out.append(f"    witness: {json.dumps(c.witness)}")
    return "\n".join(out) + "\n"


def render_machine(report: VerificationReport) -> str:
    return report.dumps()
