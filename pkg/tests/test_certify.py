import itertools

import numpy as np
import pytest

from ubblab.certify import (
    CheckResult,
    Verdict,
    numeric_complement,
    projector,
    verify_biseparability,
    verify_counts,
    verify_distillability,
    verify_ges,
    verify_orthogonality,
    verify_strong_nonlocality,
    verify_unextendibility,
    worker_count,
    worst,
)
from ubblab.errors import LongRunningRequired
from ubblab.families import Member, Role, StateFamily, build_ges_basis, build_psi_plus, build_ubb
from ubblab.linalg import hermitian_constraint_nullspace
from ubblab.tensor import Bipartition, Ket, inner, matricize


def test_verdict_ordering():
    assert worst([Verdict.PASS, Verdict.WARN]) is Verdict.WARN
    assert worst([Verdict.WARN, Verdict.INCONCLUSIVE]) is Verdict.INCONCLUSIVE
    assert worst([Verdict.INCONCLUSIVE, Verdict.FAIL, Verdict.PASS]) is Verdict.FAIL
    assert worst([]) is Verdict.PASS


def test_fail_requires_witness():
    with pytest.raises(ValueError):
        CheckResult("x", Verdict.FAIL)


def test_check_result_round_trip():
    r = CheckResult("counts", Verdict.PASS, {"a": np.int64(3), "b": np.float64(0.5)}, 1.0,
                    details={"z": 1 + 2j})
    assert r.anchor == "Theorem 4"
    assert CheckResult.from_dict(r.to_dict()).to_dict() == r.to_dict()
    assert r.details["z"] == [1.0, 2.0]


@pytest.mark.parametrize("d", [3, 4, 5])
def test_counts(d):
    r = verify_counts(d)
    assert r.status is Verdict.PASS
    expect = {3: (73, 8, 6), 4: (248, 8, 6), 5: (609, 16, 13)}[d]
    assert (r.metrics["ubb_size"], r.metrics["ges_size"], r.metrics["psi_plus_seven_dim"]) == expect
    assert r.metrics["ubb_rank"] == expect[0]


def test_orthogonality_pass_and_duplicate_fail():
    ubb = build_ubb(3)
    r = verify_orthogonality(ubb)
    assert r.status is Verdict.PASS and r.metrics["worst_overlap"] <= 1e-12
    dup = ubb.get("psi1_C1_l1")
    bad = StateFamily(3, ubb.members + (Member("dup", dup.role, dup.layer, dup.subset, dup.ket),))
    r = verify_orthogonality(bad)
    assert r.status is Verdict.FAIL
    assert set(r.witness["pair"]) == {"psi1_C1_l1", "dup"}
    # The witness alone reproduces the failure.
    a, b = (bad.get(lab).ket for lab in r.witness["pair"])
    assert np.isclose(abs(inner(a, b)) / (a.norm() * b.norm()), r.witness["overlap"])


def test_orthogonality_with_complement():
    fam = build_ubb(3) | build_ges_basis(3).select([Role.GES_BASIS])
    assert verify_orthogonality(fam).status is Verdict.PASS


def test_biseparability_witnesses():
    r = verify_biseparability(build_ubb(3))
    assert r.status is Verdict.PASS
    w = r.details["witnesses"]
    assert "12|34" in w["psiMinus_U1_l1"]
    assert len(w["S"]) == 7
    plus = verify_biseparability(build_psi_plus(3)).details["witnesses"]
    assert str(Bipartition.parse("23|41")) in plus["psiPlus_U5_l1"]
    for i in (1, 2, 3, 4):
        assert "12|34" in plus[f"psiPlus_U{i}_l1"]
    for i in (5, 6, 7, 8):
        assert "14|23" in plus[f"psiPlus_U{i}_l1"]


def test_biseparability_fail_names_entangled_member():
    ghz = Ket(3, {(0, 0, 0, 0): 1, (1, 1, 1, 1): 1, (2, 2, 2, 2): 1})
    fam = StateFamily(3, (Member("ghz", Role.UBB_MEMBER, None, None, ghz),))
    r = verify_biseparability(fam)
    assert r.status is Verdict.FAIL and r.witness["label"] == "ghz"


def test_ges_d3():
    r = verify_ges(3, random_trials=100, seed=0)
    assert r.status is Verdict.PASS
    assert r.details["basis"] == "literal"
    assert r.metrics["cross_gram_sv_deviation"] <= 1e-10
    assert abs(r.metrics["min_matched_overlap"] - 1) <= 1e-10
    assert r.metrics["min_random_ratio"] > 0.01
    assert r.metrics["max_ubb_overlap"] <= 1e-10


def test_ges_d5_reports_literal_overlap_and_uses_fallback():
    r = verify_ges(5, random_trials=20)
    assert r.details["basis"] == "orthonormalized"
    assert r.metrics["g8_max_cross_overlap"] > 0.5
    assert r.metrics["literal_projector_discrepancy"] > 0.5
    assert r.metrics["projector_discrepancy"] <= 1e-8
    assert r.status is Verdict.PASS


@pytest.mark.parametrize("d", [3, 4])
def test_projector_agreement(d):
    ges = build_ges_basis(d).select([Role.GES_BASIS]).kets
    num = numeric_complement(build_ubb(d).kets)
    assert len(num) == len(ges)
    assert np.linalg.norm(projector(ges) - projector(num), 2) <= 1e-8


def test_unextendibility_symbolic_d3():
    r = verify_unextendibility(3, "symbolic")
    assert r.status is Verdict.PASS
    assert r.metrics["symbolic_closed"] == 7
    assert r.details["evidence"] == "certificate"


def test_unextendibility_numeric_only_is_a_warning():
    r = verify_unextendibility(3, "numeric", restarts=20, seed=3)
    assert r.status is Verdict.WARN
    assert r.metrics["numeric_min_sigma2"] > 0.01


def test_unextendibility_fake_complement_fails_with_witness():
    d = 3
    fake = [Ket.basis(d, (0, 0, 0, 0)), Ket.basis(d, (1, 1, 1, 1))]
    r = verify_unextendibility(d, "numeric", restarts=10, complement=fake)
    assert r.status is Verdict.FAIL
    w = r.witness
    state = Ket(d, {tuple(idx): complex(re, im) for idx, re, im in w["state"]})
    s = np.linalg.svd(matricize(state, Bipartition.parse(w["bipartition"])), compute_uv=False)
    assert s[1] / s[0] <= 1e-6
    with pytest.raises(ValueError):
        verify_unextendibility(d, "symbolic", complement=fake)


def test_nonlocality_d3_party_1():
    r = verify_strong_nonlocality(3, parties=[1])
    assert r.status is Verdict.PASS
    assert r.metrics["nullspace_dim_p1"] == 1
    assert abs(r.metrics["identity_overlap_p1"] - 1) <= 1e-8


def test_nonlocality_without_stopper_reports_dimension():
    fam = build_ubb(3).without(["S"])
    r = verify_strong_nonlocality(3, parties=[1], family=fam)
    # Reported as computed; the checked family still pins the operator to the identity.
    assert r.metrics["nullspace_dim_p1"] >= 1
    assert r.details["family_size"] == 72


def test_nonlocality_gate():
    with pytest.raises(LongRunningRequired):
        verify_strong_nonlocality(5)


def test_nonlocality_constraint_order_invariance():
    kets = build_ubb(3).kets
    pairs = list(itertools.combinations(kets, 2))
    rng = np.random.default_rng(7)
    shuffled = [pairs[i][:: 1 if rng.random() < 0.5 else -1] for i in rng.permutation(len(pairs))]
    a = hermitian_constraint_nullspace(27, pairs, (2, 3, 4), keep_gram=True)
    b = hermitian_constraint_nullspace(27, shuffled, (2, 3, 4), keep_gram=True, batch=97)
    assert np.abs(a.gram - b.gram).max() <= 1e-12 * np.abs(a.gram).max()
    assert a.dim == b.dim == 1


def test_distillability_full_complement_d3():
    r = verify_distillability(3, "full_complement")
    assert r.status is Verdict.PASS
    assert r.metrics["nine_vector_rank"] == 9
    assert r.metrics["max_marginal_rank_1|234"] >= 9
    assert set(r.details["unclaimed_cuts"]) == {"12|34", "13|24", "14|23"}


def test_distillability_psi_plus_seven_d3():
    r = verify_distillability(3, "psi_plus_seven")
    assert r.status is Verdict.PASS
    assert r.metrics["dim"] == 6
    assert r.metrics["max_marginal_rank_12|34"] >= 7
    assert r.metrics["sub_projector_violations"] == 0


def test_distillability_psi_plus_seven_d5_two_cuts_fall_short():
    r = verify_distillability(5, "psi_plus_seven", sub_trials=5)
    assert r.status is Verdict.FAIL
    assert r.metrics["dim"] == 13
    bad = {f["bipartition"] for f in r.details["failures"] if "check" not in f}
    assert bad == {"12|34", "14|23"}
    assert r.metrics["sub_projector_violations"] == 0


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("UBBLAB_THREADS", "2")
    assert worker_count() == 2
    r = verify_unextendibility(3, "numeric", restarts=3)
    monkeypatch.setenv("UBBLAB_THREADS", "1")
    s = verify_unextendibility(3, "numeric", restarts=3)
    assert r.details["numeric_min_sigma2"] == s.details["numeric_min_sigma2"]
