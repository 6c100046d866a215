from __future__ import annotations

import pytest

from bianchi.certify import (
    BIANCHI,
    SubgroupDescriptor,
    certify_noncongruence,
    class_number,
    power_subgroup_status,
    reduced_forms,
    reference_abelianization,
    verify_appendix_a,
    verify_lemma_6_1,
)
from bianchi.sweep import CLASS_NUMBER_AT_MOST_2, squarefree_range

import oracles


@pytest.mark.parametrize("d, h", [(-1, 1), (-5, 2), (-23, 3), (-3, 1), (-163, 1), (-427, 2), (-14, 4), (-47, 5)])
def test_class_number_examples(d, h):
    assert class_number(d) == h


def test_reduced_forms_listed():
    assert reduced_forms(-5) == [(1, 0, 5), (2, 2, 3)]
    assert sorted(reduced_forms(-23)) == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]


def test_class_number_matches_independent_count():
    for d in squarefree_range(-430, -1):
        assert class_number(d) == oracles.class_number_by_forms(d), d


def test_class_number_small_set():
    found = {d for d in squarefree_range(-430, -1) if class_number(d) <= 2}
    assert found == CLASS_NUMBER_AT_MOST_2 and len(found) == 27


def test_class_number_rejects_real():
    with pytest.raises(ValueError):
        class_number(5)


def test_reference_abelianization():
    r1 = reference_abelianization(-1)
    assert (r1.free_rank, r1.torsion, r1.mod_squares, r1.equals_bianchi) == (0, (2, 2), (2, 2), True)
    r3 = reference_abelianization(-3)
    assert r3.torsion == (3,) and r3.mod_squares_order == 1
    r19 = reference_abelianization(-19)
    assert not r19.equals_bianchi and r19.free_rank == 1 and r19.torsion == (6,)


def test_certificate_noncongruence_minus2_q5():
    c = certify_noncongruence(-2, 5)
    assert c.verdict == "NonCongruence"
    assert c.index == 5 and c.level == 5
    names = [h.name for h in c.hypotheses]
    assert {"splitting", "rank_source", "gcd_condition", "d_exclusion"} <= set(names)
    assert all(h.checked for h in c.hypotheses)
    split = c.hypothesis("splitting").witness
    assert split["type"] == "inert" and split["legendre_disc"] == -1
    gcd = c.hypothesis("gcd_condition").witness
    assert gcd["gcd"] == 1


@pytest.mark.parametrize("d", [-1, -3])
def test_certificate_not_applicable(d):
    assert certify_noncongruence(d, 5).verdict == "NotApplicable"


def test_certificate_undetermined_when_q_ramified():
    c = certify_noncongruence(-2, 2)
    assert c.verdict == "Undetermined"
    assert not c.hypothesis("splitting").checked
    assert "splitting" in c.reason


def test_certificate_user_subgroup():
    sub = SubgroupDescriptor("S", index=6, level=2, free_rank=1, torsion=(2,))
    c = certify_noncongruence(-7, 5, sub)
    assert c.hypothesis("rank_source").witness["source"] == "user-supplied"
    assert c.hypothesis("gcd_condition").checked
    with pytest.raises(ValueError):
        certify_noncongruence(-7, 5, SubgroupDescriptor("S", index=7, level=2))
    with pytest.raises(ValueError):
        certify_noncongruence(-7, 4)
    assert BIANCHI.is_whole_group


@pytest.mark.parametrize("d, kind, order", [(-3, "inert", 60), (-7, "split", 36), (-1, "ramified", 48)])
def test_psl_mod_2_branches(d, kind, order):
    rep = verify_lemma_6_1(d)
    assert rep.kind == kind and rep.order == order and rep.ok
    if kind == "inert":
        assert rep.checks["squares_generate"]
    else:
        assert rep.data["square_index"] == 4
    if kind == "ramified":
        assert rep.data["D_order"] == 12 and rep.checks["D_normal"] and rep.checks["D_index_4"]


def test_power_status_minus3():
    rep = power_subgroup_status(-3)
    assert rep.get("B_d^2").verdict == "Congruence" and rep.get("B_d^2").index == 1
    prime = rep.get("B_d'")
    assert prime.verdict == "Congruence" and prime.level == 3


@pytest.mark.parametrize("d", [-11, -19])
def test_power_status_two_inert(d):
    rep = power_subgroup_status(d)
    assert rep.get("B_d^2").verdict == "NonCongruence"
    assert rep.get("B_d'").verdict == "NonCongruence"


def test_power_status_class_number_three():
    rep = power_subgroup_status(-23)
    c = rep.get("B_d^2")
    assert c.verdict == "NonCongruence"
    w = c.hypothesis("mod_squares_order").witness
    assert w["class_number"] == 3 and w["value"] == 8


@pytest.mark.parametrize("d", [-7, -1])
def test_power_status_reference_table_congruence(d):
    c = power_subgroup_status(d).get("B_d^2")
    assert c.verdict == "Congruence"
    assert c.hypothesis("mod_squares_order").witness["value"] == 4


def test_power_status_undetermined_without_data():
    rep = power_subgroup_status(-5)
    assert rep.get("B_d^2").verdict == "Undetermined"
    assert power_subgroup_status(-5, mod_squares_order=8).get("B_d^2").verdict == "NonCongruence"
    assert power_subgroup_status(-5, mod_squares_order=4).get("B_d^2").verdict == "Congruence"


@pytest.mark.parametrize("d", [-5, 5])
def test_ramified_q5_relations(d):
    rep = verify_appendix_a(d, 5)
    assert rep.ok
    assert all(rep.relations.values()) and len(rep.relations) == 6
    assert rep.kernel_order == 125 and rep.kernel_exponent == 5
    assert rep.psl_order == 7500 and rep.derived_index % 5 != 0


@pytest.mark.parametrize("d, q", [(-1, 5), (-5, 2), (-5, 3), (-5, 6)])
def test_ramified_q5_rejects(d, q):
    with pytest.raises(ValueError):
        verify_appendix_a(d, q)
