import dataclasses
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movoid.construct import ConstructionParams, build_candidate
from movoid.cyclotomy import CyclotomicSystem, ExponentSet, predicted_spectrum
from movoid.errors import BadParameters, CountMismatch, NotSrg
from movoid.verify import (
    QuadraticSurd,
    SrgParams,
    SrgType,
    certify,
    check_movoid,
    check_pds_spectrum,
    check_rho,
    check_self_dual,
    check_sigma,
    check_srg_parameters,
    classify_type,
    expected_perp_counts,
    lower_bound_check,
    negative_latin_params,
    srg_eigen,
)

J1 = ExponentSet.of(28, [0, 13, 14, 27])
PRED = predicted_spectrum(3, 3, 2, 4)


def test_sigma():
    assert check_sigma(J1)
    assert not check_sigma(ExponentSet.of(28, [0]))
    assert check_sigma(ExponentSet.of(28, range(28)))


def test_rho():
    assert check_rho(J1, 7)
    assert not check_rho(ExponentSet.of(28, [0, 1]), 7)
    assert check_rho(ExponentSet.of(28, [3]), 14)


def test_self_dual():
    assert check_self_dual(J1, PRED)
    assert check_self_dual(ExponentSet.of(28, [0, 27]), predicted_spectrum(3, 3, 2, 2))
    assert not check_self_dual(ExponentSet.of(28, [1, 2]), predicted_spectrum(3, 3, 2, 2))


@settings(max_examples=200, deadline=None)
@given(J=st.sets(st.integers(0, 27), min_size=1, max_size=27))
def test_self_dual_routes_agree(J):
    # raises InternalInconsistency if the shift and sigma routes disagree
    v = check_self_dual(ExponentSet.of(28, J), predicted_spectrum(3, 3, 2, len(J)))
    assert v.passed == check_sigma(ExponentSet.of(28, J)).passed


def test_srg_eigen_petersen():
    e = srg_eigen(SrgParams(10, 3, 0, 1))
    assert (e.alpha1.value(), e.alpha2.value()) == (1, -2)
    assert (e.m1.value(), e.m2.value()) == (5, 4)


def test_srg_eigen_pentagon_surd():
    e = srg_eigen(SrgParams(5, 2, 0, 1))
    assert e.alpha1 == QuadraticSurd(Fraction(-1, 2), Fraction(1, 2), 5)
    assert e.alpha2 == QuadraticSurd(Fraction(-1, 2), Fraction(-1, 2), 5)
    assert not e.alpha1.is_rational
    assert (e.m1.value(), e.m2.value()) == (2, 2)
    with pytest.raises(ValueError):
        e.alpha1.value()


def test_srg_eigen_candidate():
    prm = negative_latin_params(3**12, 75920)
    e = srg_eigen(prm)
    assert (e.alpha1.value(), e.alpha2.value()) == (104, -625)
    assert (e.m1.value(), e.m2.value()) == (3**12 - 1 - 75920, 75920)


def test_srg_relation_enforced():
    with pytest.raises(NotSrg):
        srg_eigen(SrgParams(10, 3, 1, 1))


@settings(max_examples=200, deadline=None)
@given(v=st.integers(2, 400), k=st.integers(1, 399), lam=st.integers(0, 399),
       mu=st.integers(0, 399))
def test_srg_relation_on_all_inputs(v, k, lam, mu):
    prm = SrgParams(v, k, lam, mu)
    if k * (k - lam - 1) != (v - k - 1) * mu:
        with pytest.raises(NotSrg):
            srg_eigen(prm)
    else:
        try:
            e = srg_eigen(prm)
        except NotSrg:
            return  # zero discriminant
        # the two multiplicities add to v - 1 and the trace of A is 0
        assert e.m1.rational + e.m2.rational == v - 1


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 60), a=st.integers(1, 30), eps=st.sampled_from([-1, 1]))
def test_latin_families_satisfy_relation(n, a, eps):
    k = a * (n - eps)
    prm = SrgParams(n * n, k, eps * n + a * a - 3 * eps * a, a * a - eps * a)
    if 0 < k < n * n - 1 and prm.lam >= 0:
        assert prm.satisfies_relation()
        kind = classify_type(prm)
        assert kind.kind in (SrgType.LATIN, SrgType.NEGATIVE_LATIN)
        if eps == -1:
            assert kind.kind is SrgType.NEGATIVE_LATIN


def test_classify_examples():
    c = classify_type(negative_latin_params(3**12, 75920))
    assert (c.kind, c.n, c.a) == (SrgType.NEGATIVE_LATIN, 729, 104)
    assert classify_type(SrgParams(10, 3, 0, 1)).kind is SrgType.NEITHER
    c = classify_type(SrgParams(81, 16, 7, 2))
    assert (c.kind, c.n, c.a) == (SrgType.LATIN, 9, 2)


def test_lower_bound():
    assert lower_bound_check(13, 3, 2, 3)
    assert not lower_bound_check(1, 3, 2, 3)
    assert lower_bound_check((9**3 - 1) // 8, 3, 2, 3)
    with pytest.raises(BadParameters):
        lower_bound_check(1, 3, 2, 2)


def test_pds_spectrum(smallest):
    sys = smallest.cyclotomy
    v = check_pds_spectrum(J1, sys)
    assert v.passed
    vals = v.witness["values"]
    assert sorted(vals) == [-625] * 4 + [104] * 24
    assert v.witness["valency"] == 75920
    single = check_pds_spectrum(ExponentSet.of(28, [0]), sys)
    assert sorted(single.witness["values"]) == [-703] + [26] * 27


def test_expected_counts():
    assert expected_perp_counts(13, 3, 2, 3) == (985, 1066)


def test_character_mode(smallest):
    v = check_movoid(smallest, "character")
    assert v.passed, v.witness.get("problems")
    assert check_srg_parameters(smallest)


def test_perp_mode_and_checksum(smallest):
    v = check_movoid(smallest, "perp")
    assert v.passed
    assert v.witness["counts_in_M"] == {985: 9490}
    assert v.witness["counts_outside"] == {1066: 56940}
    assert v.witness["checksum"]["sum"] == v.witness["checksum"]["expected"]


def test_perp_sampled_label(smallest):
    v = check_movoid(smallest, "perp", full_limit=1000, seed=3)
    assert v.passed and v.status == "sampled"
    assert v.witness["points_checked"] == 2 * 9490


def test_mutation_strict(smallest):
    M = np.delete(smallest.M, 17)
    bad = dataclasses.replace(smallest, M=M)
    with pytest.raises(CountMismatch) as info:
        check_movoid(bad, "perp", strict=True, early_exit=True)
    assert "first_bad" in info.value.witness
    assert not check_movoid(bad, "character")


def test_certificate_routes(smallest):
    cert = certify(smallest, modes=("character", "perp"))
    assert cert.passed and cert.status == "certified"
    d = cert.to_dict()
    assert d["overall"] == "pass"
    assert [c["name"] for c in d["checks"]][:2] == ["sigma-invariance", "rho-invariance"]
    with pytest.raises(BadParameters):
        certify(smallest, modes=("nope",))


@pytest.mark.parametrize("b", [1, 2, 3])
def test_srg_type_on_candidates(smallest, b):
    c = build_candidate(ConstructionParams.resolve(3, ell=3, t=2, b=b), space=smallest.space)
    assert check_srg_parameters(c)
    kind = classify_type(negative_latin_params(c.space.q, c.D_size))
    assert kind.kind is SrgType.NEGATIVE_LATIN
