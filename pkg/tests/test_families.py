import numpy as np
import pytest

from ubblab.errors import LayerOutOfRange
from ubblab.families import (
    Role,
    build_center,
    build_f_states,
    build_ges_basis,
    build_ges_basis_thm1,
    build_psi,
    build_psi_plus,
    build_stopper,
    build_subset,
    build_ubb,
    eta,
    f_state_norm2,
    g8_overlaps,
    literal_g8,
    num_layers,
    orthonormalized_g8,
    psi_plus_seven_basis,
    root_of_unity,
    xi,
)
from ubblab.tensor import ALL_BIPARTITIONS, Bipartition, Ket, inner, is_product


def dense(kets):
    return np.array([k.to_dense() for k in kets])


def test_eta_and_xi_levels():
    assert np.allclose(eta(3, 0, 0), [1, 1, 0])
    assert np.allclose(eta(3, 0, 1), [1, -1, 0])
    assert np.allclose(xi(3, 0, 0), [0, 1, 1])
    # Levels k..d-k-2 with phases from the (d-2k-1)-th roots of unity.
    assert np.allclose(eta(5, 1, 1), [0, 1, -1, 0, 0])
    assert np.allclose(eta(5, 0, 1), [1, 1j, -1, -1j, 0])
    w = np.exp(2j * np.pi / 3)
    assert np.allclose(eta(6, 1, 1), [0, 1, w, w**2, 0, 0])
    assert np.allclose(xi(6, 1, 1), [0, 0, 1, w, w**2, 0])


def test_root_of_unity_exact_at_quarter_turns():
    assert root_of_unity(4, 1) == 1j
    assert root_of_unity(2, 1) == -1


def test_subset_sizes():
    assert len(build_subset(3, 1, "C5")) == 7
    assert len(build_subset(3, 1, "C1")) == 1
    assert len(build_subset(5, 1, "D8")) == 63
    assert len(build_subset(5, 2, "D8")) == 7
    assert len(build_subset(5, 1, "C2")) == 3
    c1 = build_subset(3, 1, "C1")[0]
    assert c1 == Ket(3, {(0, 0, 0, 0): 1, (1, 0, 0, 0): -1})
    for k in build_subset(4, 1, "C6"):
        assert all(is_product(k, bp) for bp in ALL_BIPARTITIONS)


def test_layer_out_of_range():
    with pytest.raises(LayerOutOfRange):
        build_subset(3, 2, "C1")
    with pytest.raises(LayerOutOfRange):
        build_psi(4, 0, 1, "+")


def test_psi_examples():
    expect = Ket(3, {(0, 0, 0, 0): 1, (1, 0, 0, 0): 1, (2, 0, 0, 0): -1, (2, 1, 0, 0): -1})
    assert build_psi(3, 1, 1, "-") == expect
    p5 = build_psi(3, 1, 5, "+")
    assert len(p5) == 16 and all(a == 1 for a in p5.terms.values())
    # xi_+ on party 2, eta_+ on party 3, (00+01+10+20) on parties 4,1.
    for idx in p5.terms:
        assert idx[1] in (1, 2) and idx[2] in (0, 1)
        assert (idx[3], idx[0]) in {(0, 0), (0, 1), (1, 0), (2, 0)}
    for d in (3, 5, 6):
        for l in range(1, num_layers(d) + 1):
            n = d - 2 * (l - 1) - 1
            assert np.isclose(build_psi(d, l, 1, "+").norm(), np.sqrt(2 * n))


def test_center_and_stopper():
    assert build_center(3) == []
    assert len(build_center(4)) == 15
    c6 = build_center(6)
    assert len(c6) == 15
    assert all(set(idx) <= {2, 3} for k in c6 for idx in k.terms)
    s = build_stopper(3)
    assert len(s) == 81 and all(a == 1 for a in s.terms.values())
    assert inner(s, build_psi(3, 1, 1, "-")) == 0
    assert inner(s, build_psi(3, 1, 1, "+")) == 4


@pytest.mark.parametrize("d,count", [(3, 73), (4, 248), (5, 609), (6, 1280)])
def test_ubb_counts(d, count):
    fam = build_ubb(d)
    assert len(fam) == count == d**4 - 8 * num_layers(d)
    assert len(set(fam.labels)) == len(fam)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_ubb_pairwise_orthogonal(d):
    V = dense(build_ubb(d).kets)
    V = V / np.linalg.norm(V, axis=1, keepdims=True)
    G = np.abs(V.conj() @ V.T) - np.eye(len(V))
    assert G.max() <= 1e-12


@pytest.mark.parametrize("d", [3, 4, 5])
def test_psi_pairs_orthogonal_to_ubb_except_stopper(d):
    ubb = build_ubb(d).without(["S"])
    U = dense(ubb.kets)
    for l in range(1, num_layers(d) + 1):
        for i in range(1, 9):
            p, m = build_psi(d, l, i, "+"), build_psi(d, l, i, "-")
            assert abs(inner(p, m)) < 1e-12
            assert np.abs(U.conj() @ p.to_dense()).max() < 1e-10
            # The minus state is itself a UBB member; compare against the others.
            others = [k for k in ubb.kets if k != m]
            assert np.abs(dense(others).conj() @ m.to_dense()).max() < 1e-10


def _in_shell(idx, d, l):
    lo, hi = l - 1, d - l
    inside = all(lo <= i <= hi for i in idx)
    core = all(lo + 1 <= i <= hi - 1 for i in idx)
    return inside and not core


@pytest.mark.parametrize("d", [4, 5, 7])
def test_layer_supports_lie_in_their_shell(d):
    for m in build_ubb(d):
        if m.layer is None or m.role is not Role.UBB_MEMBER:
            continue
        assert all(_in_shell(idx, d, m.layer) for idx in m.ket.terms), m.label


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_f_state_overlaps(d):
    s = build_stopper(d)
    fs = build_f_states(d)
    assert len(fs) == num_layers(d) + 1
    for t, f in enumerate(fs):
        assert np.isclose(inner(s, f), 1)
        assert np.isclose(inner(f, f).real, f_state_norm2(d, t))
    assert np.isclose(f_state_norm2(3, 0), 1 / 80)


def test_g7_coefficients_d3():
    g7 = build_ges_basis_thm1().get("G7").ket
    p1 = build_psi(3, 1, 1, "+")
    p5 = build_psi(3, 1, 5, "+")
    idx1, idx5 = next(iter(p1.terms)), next(iter(p5.terms))
    assert np.isclose(g7[idx1], 1 / np.sqrt(5) / p1.norm())
    assert np.isclose(g7[idx5], -1 / (2 * np.sqrt(5)) / p5.norm())


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_ges_basis_is_orthogonal_to_ubb(d):
    ges = build_ges_basis(d).select([Role.GES_BASIS])
    assert len(ges) == 8 * num_layers(d)
    U = dense(build_ubb(d).kets)
    assert np.abs(U.conj() @ dense(ges.kets).T).max() < 1e-10


def test_explicit_d3_basis_matches_general_basis_up_to_phase():
    a = dense(build_ges_basis_thm1().kets)
    b = dense(build_ges_basis(3).select([Role.GES_BASIS]).kets)
    C = np.abs(a.conj() @ b.T)
    assert np.allclose(np.diag(C), 1, atol=1e-10)
    assert np.allclose(np.linalg.svd(C, compute_uv=False), 1, atol=1e-10)


def test_g8_overlaps_vanish_for_single_layer_but_not_for_d5():
    assert g8_overlaps(3).shape == (1, 1)
    ov = g8_overlaps(5)
    assert np.allclose(np.diag(ov), 1)
    assert abs(ov[0, 1]) > 0.5
    fixed = dense(orthonormalized_g8(5))
    assert np.allclose(fixed.conj() @ fixed.T, np.eye(2), atol=1e-12)
    # Same span as the literal states.
    lit = dense(literal_g8(5))
    assert np.linalg.matrix_rank(np.vstack([lit, fixed]), tol=1e-10) == 2


@pytest.mark.parametrize("d", [3, 4, 5])
def test_psi_plus_seven_basis(d):
    basis = psi_plus_seven_basis(d)
    assert len(basis) == 7 * num_layers(d) - 1
    B = dense(basis)
    assert np.allclose(B.conj() @ B.T, np.eye(len(basis)), atol=1e-12)
    assert np.abs(B.conj() @ build_stopper(d).to_dense()).max() < 1e-10
    span = dense(build_psi_plus(d, upto=7).kets)
    assert np.linalg.matrix_rank(np.vstack([span, B]), tol=1e-8) == len(span)


def test_family_select_without_and_union():
    ubb = build_ubb(3)
    assert len(ubb.select([Role.STOPPER])) == 1
    assert len(ubb.without(["S"])) == 72
    both = ubb | build_ges_basis(3)
    assert len(both) == 73 + 8 + 2
    with pytest.raises(ValueError):
        ubb | ubb


def test_psi_minus_u1_product_across_12_34():
    k = build_psi(3, 1, 1, "-")
    assert is_product(k, Bipartition.parse("34|12"))
