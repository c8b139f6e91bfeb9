import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movoid.errors import BadParameters, BudgetExceeded, LogOfZero
from movoid.symplectic import (
    LinearizedForm,
    SymplecticSpace,
    check_alternating,
    check_nondegenerate,
    make_space,
    rank_mod_p,
)


def scalars(space):
    """Non-zero elements of GF(p^e) inside the big field."""
    F = space.field
    step = F.order // (space.sub_order - 1)
    return [F(k * step) for k in range(space.sub_order - 1)]


def brute_generators(space):
    """Every maximal totally isotropic subspace, as a frozenset of points.

    Grows isotropic flags one point at a time; spans are closed with raw
    exp/log arithmetic, independent of the coordinate enumeration.
    """
    F = space.field
    order = F.order
    scal = np.array([x.index for x in scalars(space)], dtype=np.int64)
    zero = space.form_zero_mask()
    allpts = np.arange(space.num_points, dtype=np.int64)

    def extend(pset, z):
        y = np.array(sorted(pset), dtype=np.int64)
        a = np.repeat(F.exp[y], len(scal))
        b = F.exp[np.tile((z + scal) % order, len(y))]
        s = F.log[F.add_encodings(a, b)].astype(np.int64)
        s = s[s >= 0] % space.point_modulus
        return frozenset(pset) | {int(z)} | set(s.tolist())

    level = {frozenset([int(y)]): [int(y)] for y in allpts}
    for _ in range(space.r - 1):
        nxt = {}
        for pset, basis in level.items():
            ok = np.ones(space.num_points, dtype=bool)
            for b in basis:
                lb = space.perp_shifts(np.array([b]))[0]
                ok &= zero[(allpts + lb) % order].astype(bool)
            ok[list(pset)] = False
            for z in np.nonzero(ok)[0].tolist():
                s = extend(pset, z)
                if s not in nxt:
                    nxt[s] = basis + [z]
        level = nxt
    return set(level)


@pytest.mark.parametrize("p,e,r,count", [(3, 1, 2, 40), (3, 1, 3, 1120), (3, 2, 2, 820),
                                         (5, 1, 2, 156)])
def test_generators_match_brute_force(p, e, r, count):
    space = make_space(p, e, r)
    assert space.generator_count == count
    found = []
    for G in space.enumerate_generators():
        assert G.dim == r
        assert space.is_totally_isotropic(G.basis)
        pts = space.points_of_subspace(G)
        assert len(pts) == (p ** (e * r) - 1) // (p**e - 1)
        found.append(frozenset(pts.tolist()))
    assert len(found) == count
    assert len(set(found)) == count
    assert set(found) == brute_generators(space)


def test_w33_form_exhaustive(w33):
    space = w33
    F = space.field
    els = list(F.elements())
    for x in els:
        assert space.eval_form(x, x).is_zero()
        for y in els:
            fxy = space.eval_form(x, y)
            assert fxy == -space.eval_form(y, x)
            assert fxy.in_subfield(1)


def test_w33_bilinear_and_nondegenerate(w33):
    F = w33.field
    els = list(F.elements())
    two = F.one + F.one
    for x in els[::4]:
        for y in els[::3]:
            for z in els[::7]:
                assert w33.eval_form(x + y, z) == w33.eval_form(x, z) + w33.eval_form(y, z)
            assert w33.eval_form(two * x, y) == two * w33.eval_form(x, y)
    for x in els[1:]:
        assert any(not w33.eval_form(x, y).is_zero() for y in els)


def test_form_checks(w33):
    ok, witness = check_alternating(w33.form)
    assert ok and witness is None
    assert check_nondegenerate(w33.form)
    F = w33.field
    degenerate = LinearizedForm(F, 1, (F.zero,) * 4)
    assert not check_nondegenerate(degenerate)
    # delta x^3 with delta in GF(3) is symmetric, not alternating
    bad = LinearizedForm(F, 1, (F.zero, F.one, F.zero, F.zero))
    ok, witness = check_alternating(bad)
    assert not ok and witness is not None


def test_space_attributes():
    space = make_space(3, 2, 3)
    assert space.point_modulus == 66430
    assert space.delta.index == 365
    assert space.hyperplane_size == (9**5 - 1) // 8
    assert space.generator_count == 598600
    assert repr(space) == "W(5, 3^2)"


def test_space_errors():
    with pytest.raises(BadParameters):
        SymplecticSpace(2, 1, 2)
    with pytest.raises(BadParameters):
        SymplecticSpace(3, 1, 1)
    w = make_space(3, 1, 2)
    with pytest.raises(LogOfZero):
        w.point_of(w.field.zero)
    with pytest.raises(BudgetExceeded):
        w.scan_generators([0], max_generators=10)


def test_perp_counts_brute_force():
    space = make_space(3, 1, 3)
    F = space.field
    rng = np.random.default_rng(5)
    M = np.sort(rng.choice(space.num_points, size=60, replace=False))
    counts = space.perp_counts(np.arange(space.num_points), M)
    for y in range(0, space.num_points, 9):
        ly = F(y)
        expect = sum(1 for x in M.tolist() if space.eval_form(F(x), ly).is_zero())
        assert counts[y] == expect
        assert space.perp_count(ly, M) == expect
    # every point lies on hyperplane_size hyperplanes
    assert counts.sum() == len(M) * space.hyperplane_size


def test_all_points_sanity():
    space = make_space(3, 1, 3)
    scan = space.scan_generators(np.arange(space.num_points))
    assert scan.meet_counts == {13: 1120}
    assert scan.count == space.generator_count


def test_scan_threads_and_target():
    space = make_space(3, 2, 2)
    M = space.points_of_logs(np.arange(0, space.field.order, 5))
    one = space.scan_generators(M)
    two = space.scan_generators(M, threads=2, chunk=8)
    assert one.meet_counts == two.meet_counts
    assert one.count == two.count == 820
    target = max(one.meet_counts, key=one.meet_counts.get)
    hit = space.scan_generators(M, target=target)
    assert not hit.complete
    bad = hit.first_bad
    assert bad["meet"] != target
    pts = space.points_of_subspace([space.field(k) for k in bad["basis_logs"]])
    assert len(np.intersect1d(pts, M)) == bad["meet"]


def test_rank_mod_p():
    assert rank_mod_p(np.eye(4, dtype=np.int64), 3) == 4
    assert rank_mod_p(np.array([[1, 2], [2, 1]]), 3) == 1
    assert rank_mod_p(np.array([[1, 2], [2, 1]]), 5) == 2


@settings(max_examples=50, deadline=None)
@given(a=st.integers(0, 6560), b=st.integers(0, 6560), k=st.integers(0, 7))
def test_form_properties_w39(a, b, k):
    space = make_space(3, 2, 2)
    F = space.field
    x, y = F(a), F(b)
    lam = scalars(space)[k]
    assert space.eval_form(x, y) == -space.eval_form(y, x)
    assert space.eval_form(lam * x, y) == lam * space.eval_form(x, y)
    assert space.eval_form(x, y).in_subfield(2)
